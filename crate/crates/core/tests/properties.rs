//! Property tests against independent dense-matrix oracles.

use nonlocal_gates::network::{CnotNetwork, Role};
use nonlocal_gates::pauli::{conjugate_through_gate, push_through_network, Pauli, PauliOp, Phase};
use nonlocal_gates::statevec::{equal_up_to_global_phase, Amplitudes, Gate, GateKind, QubitLabel, StateVector};
use num_complex::Complex64;
use proptest::prelude::*;

const LABELS: [&str; 3] = ["A", "B", "C"];

type Mat = Vec<Vec<Complex64>>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pauli_matrix(p: Pauli) -> [[Complex64; 2]; 2] {
    let (o, l, i) = (c(0., 0.), c(1., 0.), c(0., 1.));
    match p {
        Pauli::I => [[l, o], [o, l]],
        Pauli::X => [[o, l], [l, o]],
        Pauli::Y => [[o, -i], [i, o]],
        Pauli::Z => [[l, o], [o, -l]],
    }
}

fn matmul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    (0..n).map(|r| (0..n).map(|k| (0..n).map(|j| a[r][j] * b[j][k]).sum()).collect()).collect()
}

fn dagger(a: &Mat) -> Mat {
    let n = a.len();
    (0..n).map(|r| (0..n).map(|k| a[k][r].conj()).collect()).collect()
}

/// Kronecker product over `LABELS`, first label most significant.
fn dense_pauli(p: &PauliOp) -> Mat {
    let n = LABELS.len();
    let entry = |r: usize, k: usize| {
        LABELS.iter().enumerate().fold(p.phase().to_complex(), |v, (q, l)| {
            let shift = n - 1 - q;
            v * pauli_matrix(p.get(&QubitLabel::from(*l)))[(r >> shift) & 1][(k >> shift) & 1]
        })
    };
    (0..1 << n).map(|r| (0..1 << n).map(|k| entry(r, k)).collect()).collect()
}

fn bit_of(label: &QubitLabel) -> usize {
    LABELS.len() - 1 - LABELS.iter().position(|l| *l == label.as_str()).unwrap()
}

fn dense_gate(g: &Gate) -> Mat {
    let dim = 1usize << LABELS.len();
    let t = g.targets();
    let mut m = vec![vec![c(0., 0.); dim]; dim];
    for k in 0..dim {
        match g.kind() {
            GateKind::H => {
                let b = bit_of(&t[0]);
                let s = std::f64::consts::FRAC_1_SQRT_2;
                m[k & !(1 << b)][k] += c(s, 0.);
                m[k | (1 << b)][k] += c(if k >> b & 1 == 1 { -s } else { s }, 0.);
            }
            GateKind::X => m[k ^ (1 << bit_of(&t[0]))][k] = c(1., 0.),
            GateKind::Z => m[k][k] = c(if k >> bit_of(&t[0]) & 1 == 1 { -1. } else { 1. }, 0.),
            GateKind::Cnot => {
                let (cb, tb) = (bit_of(&t[0]), bit_of(&t[1]));
                m[if k >> cb & 1 == 1 { k ^ (1 << tb) } else { k }][k] = c(1., 0.);
            }
            GateKind::Swap => {
                let (a, b) = (bit_of(&t[0]), bit_of(&t[1]));
                let (x, y) = (k >> a & 1, k >> b & 1);
                let j = (k & !(1 << a) & !(1 << b)) | (y << a) | (x << b);
                m[j][k] = c(1., 0.);
            }
        }
    }
    m
}

fn close(a: &Mat, b: &Mat, tol: f64) -> bool {
    a.iter().flatten().zip(b.iter().flatten()).all(|(x, y)| (x - y).norm() < tol)
}

fn letter() -> impl Strategy<Value = Pauli> {
    (0u8..4).prop_map(|k| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][k as usize])
}

fn pauli_op() -> impl Strategy<Value = PauliOp> {
    (0u8..4, letter(), letter(), letter()).prop_map(|(ph, a, b, cc)| {
        PauliOp::from_factors(Phase::from_quarter_turns(ph), [("A", a), ("B", b), ("C", cc)])
    })
}

fn gate() -> impl Strategy<Value = Gate> {
    (0usize..5, 0usize..3, 1usize..3).prop_map(|(kind, q, off)| {
        let (a, b) = (LABELS[q], LABELS[(q + off) % 3]);
        match kind {
            0 => Gate::h(a),
            1 => Gate::x(a),
            2 => Gate::z(a),
            3 => Gate::cnot(a, b),
            _ => Gate::swap(a, b),
        }
    })
}

fn network(roles: usize, max_len: usize) -> impl Strategy<Value = CnotNetwork> {
    prop::collection::vec((0..roles as u8, 1..roles as u8), 0..=max_len).prop_map(move |pairs| {
        CnotNetwork::new(pairs.into_iter().map(|(c, off)| (Role(c), Role((c + off) % roles as u8)))).unwrap()
    })
}

fn amplitudes() -> impl Strategy<Value = Amplitudes> {
    (0.0..std::f64::consts::PI, 0.0..std::f64::consts::TAU).prop_map(|(theta, phi)| {
        Amplitudes::new(c((theta / 2.).cos(), 0.), Complex64::from_polar((theta / 2.).sin(), phi))
    })
}

/// Random three-qubit state: a product state scrambled by a gate sequence.
fn state() -> impl Strategy<Value = StateVector> {
    (prop::array::uniform3(amplitudes()), prop::collection::vec(gate(), 0..8)).prop_map(|(amps, gates)| {
        let mut s = StateVector::product(LABELS.iter().copied().zip(amps)).unwrap();
        for g in &gates {
            s.apply_gate(g).unwrap();
        }
        s
    })
}

fn dense_apply(m: &Mat, s: &StateVector) -> Vec<Complex64> {
    let v = s.reordered(&LABELS.map(QubitLabel::from)).unwrap();
    m.iter().map(|row| row.iter().zip(v.amplitudes()).map(|(a, b)| a * b).sum()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn norm_preserved(s in state(), gates in prop::collection::vec(gate(), 1..6), p in pauli_op()) {
        let mut s = s;
        for g in &gates {
            s.apply_gate(g).unwrap();
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        }
        s.apply_pauli(&p).unwrap();
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bell_completeness(s in state(), pair in 0usize..3) {
        let (a, b) = (LABELS[pair], LABELS[(pair + 1) % 3]);
        let probs = s.bell_probabilities(&a.into(), &b.into()).unwrap();
        prop_assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ancilla_independence(s in state(), q in 0usize..3) {
        let mut s = s;
        s.append_ebit("E1".into(), "E2".into()).unwrap();
        let probs = s.bell_probabilities(&LABELS[q].into(), &"E1".into()).unwrap();
        for p in probs {
            prop_assert!((p - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn label_order_independence(s in state(), perm in Just(LABELS.to_vec()).prop_shuffle()) {
        let order: Vec<QubitLabel> = perm.into_iter().map(QubitLabel::from).collect();
        let r = s.reordered(&order).unwrap();
        prop_assert!(equal_up_to_global_phase(&s, &r, 1e-12).unwrap());
        prop_assert!(equal_up_to_global_phase(&r, &s, 1e-12).unwrap());
    }

    #[test]
    fn pauli_action_matches_dense_matrix(s in state(), p in pauli_op()) {
        let expect = dense_apply(&dense_pauli(&p), &s);
        let mut s = s;
        s.apply_pauli(&p).unwrap();
        let got = s.reordered(&LABELS.map(QubitLabel::from)).unwrap();
        for (x, y) in got.amplitudes().iter().zip(&expect) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn gate_action_matches_dense_matrix(s in state(), g in gate()) {
        let expect = dense_apply(&dense_gate(&g), &s);
        let mut s = s;
        s.apply_gate(&g).unwrap();
        let got = s.reordered(&LABELS.map(QubitLabel::from)).unwrap();
        for (x, y) in got.amplitudes().iter().zip(&expect) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn conjugation_matches_dense_matrix(g in gate(), p in pauli_op()) {
        let gm = dense_gate(&g);
        let expect = matmul(&matmul(&gm, &dense_pauli(&p)), &dagger(&gm));
        let got = conjugate_through_gate(&g, &p);
        prop_assert!(close(&dense_pauli(&got), &expect, 1e-12), "{} -> {}", p, got);
    }

    #[test]
    fn network_push_is_homomorphism(net in network(3, 8), p in pauli_op(), q in pauli_op()) {
        let lhs = push_through_network(&net, &(p.clone() * q.clone()));
        let rhs = push_through_network(&net, &p) * push_through_network(&net, &q);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn network_push_respects_support(net in network(3, 8), p in pauli_op()) {
        let touched: Vec<QubitLabel> = net
            .gates()
            .iter()
            .flat_map(|g| [g.control.label(), g.target.label()])
            .chain(p.support().cloned())
            .collect();
        let out = push_through_network(&net, &p);
        prop_assert!(out.support().all(|l| touched.contains(l)));
    }

    #[test]
    fn pauli_group_structure(p in pauli_op(), q in pauli_op(), r in pauli_op()) {
        prop_assert_eq!((p.clone() * q.clone()) * r.clone(), p.clone() * (q.clone() * r));
        prop_assert!((p.clone() * p.clone()).eq_up_to_phase(&PauliOp::identity()));
        prop_assert!((p.clone() * q.clone()).eq_up_to_phase(&(q * p)));
    }
}
