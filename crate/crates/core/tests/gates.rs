use std::f64::consts::FRAC_PI_4;

use qedsim::code::FiveQubitCode;
use qedsim::gates::{
    apply_noisy_gate, k_gate, logical_action, sh_gate, transversal_operator, GateLabel,
    NoisyGateModel, OneQubitGate, Sign,
};
use qedsim::metrics::state_fidelity;
use qedsim::qubit::{haar_random_state, Operator, PureState};
use qedsim::rng::rng_from_seed;
use qedsim::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn eq12() -> Operator {
    Operator::from_rows(2, &[c(0.5, 0.5), c(0.5, 0.5), c(-0.5, 0.5), c(0.5, -0.5)]).unwrap()
}

#[test]
fn k_plus_plus_plus_matches_closed_form() {
    let k = k_gate(Sign::Plus, Sign::Plus, Sign::Plus);
    assert!(k.matrix().max_abs_diff(&eq12()) <= 1e-12);
}

#[test]
fn k_cubed_is_minus_identity() {
    let minus = Operator::identity(2).scale(c(-1.0, 0.0));
    for label in GateLabel::k_family() {
        let k = OneQubitGate::from_label(&label).unwrap();
        let m = k.matrix();
        assert!(
            m.mul(m).unwrap().mul(m).unwrap().max_abs_diff(&minus) <= 1e-10,
            "{label}"
        );
        assert!(
            m.adjoint()
                .mul(m)
                .unwrap()
                .max_abs_diff(&Operator::identity(2))
                <= 1e-12
        );
    }
}

#[test]
fn sh_gate_relations() {
    let sh = sh_gate();
    let m = sh.matrix();
    let phase = c(FRAC_PI_4.cos(), -FRAC_PI_4.sin());
    assert!(m.max_abs_diff(&eq12().scale(phase)) <= 1e-12);
    assert!(
        m.mul(&m.adjoint())
            .unwrap()
            .max_abs_diff(&Operator::identity(2))
            <= 1e-12
    );
    let cube = m.mul(m).unwrap().mul(m).unwrap();
    let want = Operator::identity(2).scale(c(FRAC_PI_4.cos(), FRAC_PI_4.sin()));
    assert!(cube.max_abs_diff(&want) <= 1e-10);
}

#[test]
fn transversal_paulis() {
    let code = FiveQubitCode::get();
    let (zero, one) = code.codewords();
    let id = transversal_operator(&OneQubitGate::from_label(&GateLabel::I).unwrap());
    assert!(id.max_abs_diff(&Operator::identity(32)) == 0.0);

    let x = transversal_operator(&OneQubitGate::from_label(&GateLabel::X).unwrap());
    let flipped = zero.apply_full(&x).unwrap();
    assert!(flipped
        .amplitudes()
        .iter()
        .zip(one.amplitudes())
        .all(|(a, b)| (a - b).norm() <= 1e-12));

    let z = transversal_operator(&OneQubitGate::from_label(&GateLabel::Z).unwrap());
    let z0 = zero.apply_full(&z).unwrap();
    let z1 = one.apply_full(&z).unwrap();
    assert!(z0
        .amplitudes()
        .iter()
        .zip(zero.amplitudes())
        .all(|(a, b)| (a - b).norm() <= 1e-12));
    assert!(z1
        .amplitudes()
        .iter()
        .zip(one.amplitudes())
        .all(|(a, b)| (a + b).norm() <= 1e-12));
}

#[test]
fn logical_actions() {
    let v = FiveQubitCode::get().isometry();
    for label in [GateLabel::X, GateLabel::Z] {
        let g = OneQubitGate::from_label(&label).unwrap();
        let l = logical_action(&transversal_operator(&g), &v).unwrap();
        assert!(l.codespace_leak <= 1e-10);
        assert!(
            (l.projective_overlap(g.matrix()) - 1.0).abs() <= 1e-10,
            "{label}"
        );
    }
    let x0: qedsim::qubit::PauliString = "IIIIX".parse().unwrap();
    let l = logical_action(&x0.to_operator(), &v).unwrap();
    assert!((l.codespace_leak - 1.0).abs() <= 1e-9);
}

#[test]
fn noiseless_gate_is_exact() {
    let mut rng = rng_from_seed(1);
    let psi = haar_random_state(3, &mut rng).unwrap();
    let g = sh_gate();
    let noisy =
        apply_noisy_gate(&psi, &g, &NoisyGateModel::noiseless(), &[0, 2], &mut rng).unwrap();
    let ideal = psi
        .apply_unitary(g.matrix(), &[0])
        .unwrap()
        .apply_unitary(g.matrix(), &[2])
        .unwrap();
    assert!(state_fidelity(&ideal, &noisy).unwrap() >= 1.0 - 1e-12);
    assert!(apply_noisy_gate(&psi, &g, &NoisyGateModel::noiseless(), &[1, 1], &mut rng).is_err());
}

#[test]
fn noisy_gate_infidelity_is_quadratic() {
    let g = OneQubitGate::from_label(&GateLabel::Z).unwrap();
    let mut rng = rng_from_seed(2);
    let mut points = Vec::new();
    for sigma in [1e-3, 3e-3, 1e-2] {
        let model = NoisyGateModel::new(sigma).unwrap();
        let trials = 10_000;
        let mut total = 0.0;
        for _ in 0..trials {
            let psi = haar_random_state(1, &mut rng).unwrap();
            let ideal = psi.apply_unitary(g.matrix(), &[0]).unwrap();
            let out = apply_noisy_gate(&psi, &g, &model, &[0], &mut rng).unwrap();
            total += 1.0 - state_fidelity(&ideal, &out).unwrap().powi(2);
        }
        points.push((sigma.ln(), (total / trials as f64).ln()));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let slope = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!((1.8..=2.2).contains(&slope), "slope {slope}");
}

#[test]
fn noisy_gate_is_reproducible() {
    let psi = PureState::basis(2, 1).unwrap();
    let g = k_gate(Sign::Minus, Sign::Plus, Sign::Minus);
    let model = NoisyGateModel::new(0.05).unwrap();
    let a = apply_noisy_gate(&psi, &g, &model, &[0, 1], &mut rng_from_seed(3)).unwrap();
    let b = apply_noisy_gate(&psi, &g, &model, &[0, 1], &mut rng_from_seed(3)).unwrap();
    assert_eq!(a, b);
}
