//! Transversal logical gates and the noisy analog gate model.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::code::{EncodingIsometry, N_DATA};
use crate::error::{invalid, Error, Result};
use crate::qubit::{pauli_matrix, spectral_norm, CMatrix, Operator, PureState, DEGENERATE_NORM};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GateLabel {
    I,
    X,
    Y,
    Z,
    SH,
    K(Sign, Sign, Sign),
    Custom(String),
}

impl GateLabel {
    /// All eight sign patterns of the K family.
    pub fn k_family() -> Vec<GateLabel> {
        const SIGNS: [Sign; 2] = [Sign::Plus, Sign::Minus];
        let mut out = Vec::with_capacity(8);
        for x in SIGNS {
            for y in SIGNS {
                for z in SIGNS {
                    out.push(GateLabel::K(x, y, z));
                }
            }
        }
        out
    }
}

impl fmt::Display for GateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateLabel::I => f.write_str("I"),
            GateLabel::X => f.write_str("X"),
            GateLabel::Y => f.write_str("Y"),
            GateLabel::Z => f.write_str("Z"),
            GateLabel::SH => f.write_str("SH"),
            GateLabel::K(x, y, z) => write!(f, "K{}{}{}", x.symbol(), y.symbol(), z.symbol()),
            GateLabel::Custom(name) => f.write_str(name),
        }
    }
}

impl FromStr for GateLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let sign = |c: char| match c {
            '+' => Ok(Sign::Plus),
            '-' => Ok(Sign::Minus),
            _ => Err(invalid(format!("bad K-gate sign {c:?} in {s:?}"))),
        };
        match s.trim() {
            "I" => Ok(GateLabel::I),
            "X" => Ok(GateLabel::X),
            "Y" => Ok(GateLabel::Y),
            "Z" => Ok(GateLabel::Z),
            "SH" => Ok(GateLabel::SH),
            k if k.starts_with('K') && k.chars().count() == 4 => {
                let c: Vec<char> = k.chars().skip(1).collect();
                Ok(GateLabel::K(sign(c[0])?, sign(c[1])?, sign(c[2])?))
            }
            other => Err(invalid(format!("unknown gate label {other:?}"))),
        }
    }
}

/// A one-qubit unitary with its label.
#[derive(Debug, Clone, PartialEq)]
pub struct OneQubitGate {
    matrix: Operator,
    label: GateLabel,
}

impl OneQubitGate {
    pub const UNITARY_TOL: f64 = 1e-10;

    pub fn new(matrix: Operator, label: GateLabel) -> Result<Self> {
        if matrix.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                actual: matrix.dim(),
            });
        }
        if !matrix.is_unitary(Self::UNITARY_TOL) {
            return Err(invalid(format!("gate {label} is not unitary")));
        }
        Ok(Self { matrix, label })
    }

    pub fn from_label(label: &GateLabel) -> Result<Self> {
        match label {
            GateLabel::I => Self::new(pauli_matrix(0)?, GateLabel::I),
            GateLabel::X => Self::new(pauli_matrix(1)?, GateLabel::X),
            GateLabel::Y => Self::new(pauli_matrix(2)?, GateLabel::Y),
            GateLabel::Z => Self::new(pauli_matrix(3)?, GateLabel::Z),
            GateLabel::SH => Ok(sh_gate()),
            &GateLabel::K(x, y, z) => Ok(k_gate(x, y, z)),
            GateLabel::Custom(name) => Err(invalid(format!(
                "custom gate {name:?} has no built-in matrix"
            ))),
        }
    }

    pub fn matrix(&self) -> &Operator {
        &self.matrix
    }

    pub fn label(&self) -> &GateLabel {
        &self.label
    }

    fn entries(&self) -> [Complex64; 4] {
        let m = self.matrix.matrix();
        [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]]
    }
}

/// `exp[i pi/(3 sqrt 3) (s_x X + s_y Y + s_z Z)]`, evaluated as
/// `cos(pi/3) I + i sin(pi/3) n.sigma` with the unit axis `n = s / sqrt 3`.
pub fn k_gate(sx: Sign, sy: Sign, sz: Sign) -> OneQubitGate {
    let (c, s) = ((PI / 3.0).cos(), (PI / 3.0).sin() / 3f64.sqrt());
    let (nx, ny, nz) = (sx.value() * s, sy.value() * s, sz.value() * s);
    let i = Complex64::new(0.0, 1.0);
    // n.sigma = [[nz, nx - i ny], [nx + i ny, -nz]]
    let entries = [
        Complex64::new(c, 0.0) + i * nz,
        i * Complex64::new(nx, -ny),
        i * Complex64::new(nx, ny),
        Complex64::new(c, 0.0) - i * nz,
    ];
    OneQubitGate::new(
        Operator::from_rows(2, &entries).expect("2x2"),
        GateLabel::K(sx, sy, sz),
    )
    .expect("K gates are unitary")
}

/// `S H` with `S = diag(1, i)` and `H = (X + Z)/sqrt 2`.
pub fn sh_gate() -> OneQubitGate {
    let i = Complex64::new(0.0, 1.0);
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let s = Operator::from_rows(
        2,
        &[
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            i,
        ],
    )
    .expect("2x2");
    let had = Operator::from_rows(2, &[h, h, h, -h]).expect("2x2");
    OneQubitGate::new(s.mul(&had).expect("2x2"), GateLabel::SH).expect("SH is unitary")
}

/// `g (x) g (x) g (x) g (x) g` on the five data qubits.
pub fn transversal_operator(g: &OneQubitGate) -> Operator {
    let mut op = g.matrix.clone();
    for _ in 1..N_DATA {
        op = op.kron(&g.matrix);
    }
    op
}

/// The logical action of a physical operator on the codespace.
#[derive(Debug, Clone, PartialEq)]
pub struct LogicalAction {
    /// `V^dagger phys V`.
    pub matrix: CMatrix,
    /// `|| (I - V V^dagger) phys V ||_2`.
    pub codespace_leak: f64,
}

impl LogicalAction {
    pub fn operator(&self) -> Operator {
        Operator::new(self.matrix.clone()).expect("2x2")
    }

    /// `|Tr(L^dagger g)| / 2`; equals 1 iff `L` is `g` up to a global phase
    /// (for unitary `L` and `g`).
    pub fn projective_overlap(&self, g: &Operator) -> f64 {
        (self.matrix.adjoint() * g.matrix()).trace().norm() / 2.0
    }

    /// Applies `L` to a logical state and renormalizes.
    pub fn apply(&self, psi: &PureState) -> Result<PureState> {
        PureState::from_unnormalized(1, self.operator().apply(psi.amplitudes())?)
    }
}

pub fn logical_action(phys: &Operator, v: &EncodingIsometry) -> Result<LogicalAction> {
    if phys.dim() != 1 << N_DATA {
        return Err(Error::DimensionMismatch {
            expected: 1 << N_DATA,
            actual: phys.dim(),
        });
    }
    let vm = v.matrix();
    let image = phys.matrix() * &vm;
    let matrix = vm.adjoint() * &image;
    let off = &image - &vm * &matrix;
    Ok(LogicalAction {
        matrix,
        codespace_leak: spectral_norm(&off),
    })
}

/// Additive Gaussian perturbation of every real matrix component of a gate,
/// drawn fresh per application and per qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisyGateModel {
    pub coeff_sigma: f64,
    pub per_qubit_independent: bool,
}

impl NoisyGateModel {
    pub fn new(coeff_sigma: f64) -> Result<Self> {
        if !coeff_sigma.is_finite() || coeff_sigma < 0.0 {
            return Err(invalid(format!(
                "coeff_sigma must be finite and non-negative, got {coeff_sigma}"
            )));
        }
        Ok(Self {
            coeff_sigma,
            per_qubit_independent: true,
        })
    }

    pub fn noiseless() -> Self {
        Self {
            coeff_sigma: 0.0,
            per_qubit_independent: true,
        }
    }
}

/// Per-qubit depolarizing probability with the same first-order infidelity
/// as one noisy gate application: `p = 4 coeff_sigma^2`.
pub fn coeff_equivalent_p(coeff_sigma: f64) -> f64 {
    4.0 * coeff_sigma * coeff_sigma
}

/// Inverse of [`coeff_equivalent_p`].
pub fn coeff_sigma_for_p(p: f64) -> f64 {
    (p / 4.0).sqrt()
}

fn apply_2x2(amps: &mut [Complex64], q: usize, m: &[Complex64; 4]) {
    let bit = 1usize << q;
    for i in (0..amps.len()).filter(|i| i & bit == 0) {
        let (a0, a1) = (amps[i], amps[i | bit]);
        amps[i] = m[0] * a0 + m[1] * a1;
        amps[i | bit] = m[2] * a0 + m[3] * a1;
    }
}

/// Applies `g + Delta` independently to each target and renormalizes once.
/// With `coeff_sigma == 0` this is the exact unitary application.
pub fn apply_noisy_gate<R: Rng + ?Sized>(
    state: &PureState,
    g: &OneQubitGate,
    model: &NoisyGateModel,
    targets: &[usize],
    rng: &mut R,
) -> Result<PureState> {
    let n = state.n_qubits();
    let mut seen = 0usize;
    for &t in targets {
        if t >= n {
            return Err(invalid(format!(
                "target qubit {t} out of range for {n} qubits"
            )));
        }
        if seen & (1 << t) != 0 {
            return Err(invalid(format!("duplicate target qubit {t}")));
        }
        seen |= 1 << t;
    }
    let base = g.entries();
    let mut amps = state.amplitudes().to_vec();
    if model.coeff_sigma == 0.0 {
        for &t in targets {
            apply_2x2(&mut amps, t, &base);
        }
        return PureState::new(n, amps);
    }
    let sd = model.coeff_sigma;
    for &t in targets {
        let mut m = base;
        for e in m.iter_mut() {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *e += Complex64::new(sd * re, sd * im);
        }
        apply_2x2(&mut amps, t, &m);
    }
    let norm = crate::qubit::norm_sqr(&amps).sqrt();
    if norm < DEGENERATE_NORM {
        return Err(Error::DegenerateGate { norm });
    }
    let amps = amps.into_iter().map(|a| a / norm).collect();
    PureState::new(n, amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{build_codewords, encode};
    use crate::qubit::{haar_random_state, inner_product};
    use crate::rng::rng_from_seed;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn labels_round_trip() {
        for s in ["I", "X", "Y", "Z", "SH", "K+++", "K+-+", "K---"] {
            assert_eq!(s.parse::<GateLabel>().unwrap().to_string(), s);
        }
        assert!("K+*+".parse::<GateLabel>().is_err());
        assert!("H".parse::<GateLabel>().is_err());
        assert_eq!(GateLabel::k_family().len(), 8);
    }

    #[test]
    fn k_plus_closed_form() {
        let k = k_gate(Sign::Plus, Sign::Plus, Sign::Plus);
        let want = [c(0.5, 0.5), c(0.5, 0.5), c(-0.5, 0.5), c(0.5, -0.5)];
        for (a, b) in k.entries().iter().zip(want) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn sh_matches_phase_rotated_k() {
        let sh = sh_gate();
        let phase = Complex64::from_polar(1.0, -PI / 4.0);
        let k = k_gate(Sign::Plus, Sign::Plus, Sign::Plus);
        assert!(sh.matrix().max_abs_diff(&k.matrix().scale(phase)) < 1e-12);
        let prod = sh.matrix().mul(&sh.matrix().adjoint()).unwrap();
        assert!(prod.max_abs_diff(&Operator::identity(2)) < 1e-12);
    }

    #[test]
    fn transversal_x_and_z_on_codewords() {
        let v = build_codewords();
        let [zero, one] = v.columns();
        let x = transversal_operator(&OneQubitGate::from_label(&GateLabel::X).unwrap());
        let xz = zero.apply_full(&x).unwrap();
        assert!(xz
            .amplitudes()
            .iter()
            .zip(one.amplitudes())
            .all(|(a, b)| (a - b).norm() < 1e-12));
        let z = transversal_operator(&OneQubitGate::from_label(&GateLabel::Z).unwrap());
        let zo = one.apply_full(&z).unwrap();
        assert!(zo
            .amplitudes()
            .iter()
            .zip(one.amplitudes())
            .all(|(a, b)| (a + b).norm() < 1e-12));
        let id = transversal_operator(&OneQubitGate::from_label(&GateLabel::I).unwrap());
        assert_eq!(id, Operator::identity(32));
    }

    #[test]
    fn logical_action_of_single_error_leaks() {
        let x0: crate::qubit::PauliString = "IIIIX".parse().unwrap();
        let la = logical_action(&x0.to_operator(), &build_codewords()).unwrap();
        assert!((la.codespace_leak - 1.0).abs() < 1e-9);
        assert!(logical_action(&Operator::identity(4), &build_codewords()).is_err());
    }

    #[test]
    fn noiseless_gate_is_exact() {
        let mut rng = rng_from_seed(1);
        let psi = encode(&haar_random_state(1, &mut rng).unwrap()).unwrap();
        let g = sh_gate();
        let out = apply_noisy_gate(
            &psi,
            &g,
            &NoisyGateModel::noiseless(),
            &[0, 1, 2, 3, 4],
            &mut rng,
        )
        .unwrap();
        let mut reference = psi.clone();
        for q in 0..5 {
            reference = reference.apply_unitary(g.matrix(), &[q]).unwrap();
        }
        assert_eq!(out, reference);
        let ideal = psi
            .apply_full(&transversal_operator(&g))
            .unwrap()
            .normalize()
            .unwrap();
        assert!((inner_product(&ideal, &out).unwrap().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noisy_gate_determinism_and_errors() {
        let psi = haar_random_state(2, &mut rng_from_seed(3)).unwrap();
        let g = OneQubitGate::from_label(&GateLabel::X).unwrap();
        let model = NoisyGateModel::new(0.05).unwrap();
        let a = apply_noisy_gate(&psi, &g, &model, &[0, 1], &mut rng_from_seed(4)).unwrap();
        let b = apply_noisy_gate(&psi, &g, &model, &[0, 1], &mut rng_from_seed(4)).unwrap();
        assert_eq!(a, b);
        assert!(apply_noisy_gate(&psi, &g, &model, &[0, 0], &mut rng_from_seed(4)).is_err());
        assert!(apply_noisy_gate(&psi, &g, &model, &[2], &mut rng_from_seed(4)).is_err());
        assert!(NoisyGateModel::new(-1.0).is_err());
    }

    #[test]
    fn equivalent_p_inverts() {
        assert!((coeff_equivalent_p(coeff_sigma_for_p(3e-3)) - 3e-3).abs() < 1e-15);
    }
}
