//! Dense multi-qubit linear algebra: states, operators, Pauli words and
//! projective measurement. Qubit 0 is the least significant bit of a basis
//! index throughout the crate.

mod operator;
mod pauli;
mod state;

pub use operator::{pauli_matrix, CMatrix, DensityOperator, Operator};
pub use pauli::{Pauli, PauliString, Phase};
pub use state::{
    apply_to_qubits, haar_random_state, inner_product, measure_projector, measure_qubit,
    Measurement, PureState, StateVector, DEGENERATE_NORM, NORM_TOL,
};

pub(crate) use operator::{max_abs_diff, spectral_norm};
pub(crate) use state::{inner_product_raw, norm_sqr};

pub fn pauli_string_to_operator(p: &PauliString) -> Operator {
    p.to_operator()
}
