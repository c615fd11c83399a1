//! Shared scenario corpus for the integration suites.

#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use weakctx::hilbert::{Operator, State};
use weakctx::pointer::Scenario;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli_z() -> Operator {
    Operator::from_rows(vec![
        vec![c(1.0, 0.0), c(0.0, 0.0)],
        vec![c(0.0, 0.0), c(-1.0, 0.0)],
    ])
    .unwrap()
}

/// psi = (cos t, sin t), phi = (cos t, -sin t) with cos 2t fixed; the
/// projector weak value of |1><1| is -sin^2(t)/cos(2t).
pub fn tilted_pair(cos2t: f64) -> (State, State) {
    let t = 0.5 * cos2t.acos();
    let psi = State::new(vec![c(t.cos(), 0.0), c(t.sin(), 0.0)]).unwrap();
    let phi = State::new(vec![c(t.cos(), 0.0), c(-t.sin(), 0.0)]).unwrap();
    (psi, phi)
}

/// The cos2t = 0.5 scenario (p_phi = 1/4, projector weak value -1/2).
pub fn zw2_scenario(sigma: f64) -> Scenario {
    let (psi, phi) = tilted_pair(0.5);
    let pi = Operator::basis_projector(2, &[1]).unwrap();
    Scenario::new(psi, phi, pi, sigma).unwrap()
}

/// The cos2t = 0.01 scenario (Z_w = 100, witness weak value -49.5).
pub fn aav_scenario(sigma: f64) -> Scenario {
    let (psi, phi) = tilted_pair(0.01);
    let pi = Operator::basis_projector(2, &[1]).unwrap();
    Scenario::new(psi, phi, pi, sigma).unwrap()
}

/// psi = phi = |0>, Pi = |1><1|: no anomaly, p_- = 1/2 exactly.
pub fn eigenstate_scenario(sigma: f64) -> Scenario {
    let zero = State::basis(2, 0);
    let pi = Operator::basis_projector(2, &[1]).unwrap();
    Scenario::new(zero.clone(), zero, pi, sigma).unwrap()
}

pub fn random_state(rng: &mut impl Rng, d: usize) -> State {
    let raw: Vec<Complex64> = (0..d)
        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    State::new(raw.into_iter().map(|a| a / norm).collect()).unwrap()
}

pub fn random_hermitian(rng: &mut impl Rng, d: usize) -> Operator {
    let mut op = Operator::zeros(d);
    for i in 0..d {
        op.set(i, i, c(rng.gen_range(-2.0..2.0), 0.0));
        for j in (i + 1)..d {
            let v = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            op.set(i, j, v);
            op.set(j, i, v.conj());
        }
    }
    op
}

pub fn random_scenario(rng: &mut impl Rng, sigma: f64) -> Scenario {
    loop {
        let d = 2 + rng.gen_range(0..3usize);
        let psi = random_state(rng, d);
        let phi = random_state(rng, d);
        let rank = 1 + rng.gen_range(0..d - 1);
        let indices: Vec<usize> = (0..rank).collect();
        let pi = Operator::basis_projector(d, &indices).unwrap();
        if let Ok(s) = Scenario::new(psi, phi, pi, sigma) {
            return s;
        }
    }
}

/// Deterministic corpus of at least 20 structurally distinct scenarios at
/// the given pointer width: tilted qubit pairs against both projectors,
/// complex-phase selections, an eigenstate case, qutrit and two-ququart
/// setups with rank-1 and rank-2 projectors, plus seeded random draws.
pub fn scenario_corpus(sigma: f64) -> Vec<Scenario> {
    let mut corpus = Vec::new();
    let pi1 = Operator::basis_projector(2, &[1]).unwrap();
    let pi0 = Operator::basis_projector(2, &[0]).unwrap();

    for cos2t in [0.5, 0.2, 0.8, 0.05, 0.01] {
        let (psi, phi) = tilted_pair(cos2t);
        corpus.push(Scenario::new(psi, phi, pi1.clone(), sigma).unwrap());
    }
    for cos2t in [0.5, 0.3] {
        let (psi, phi) = tilted_pair(cos2t);
        corpus.push(Scenario::new(psi, phi, pi0.clone(), sigma).unwrap());
    }
    corpus.push(eigenstate_scenario(sigma));

    // Complex selection phases exercise the cross term through im(Pi_w).
    for (alpha, beta, gamma) in [
        (0.4, 0.9, 0.7),
        (1.1, 0.3, 2.1),
        (0.8, 0.8, 1.2),
        (0.25, 1.2, -0.9),
    ] {
        let (a, b, g): (f64, f64, f64) = (alpha, beta, gamma);
        let psi = State::new(vec![c(a.cos(), 0.0), c(a.sin(), 0.0)]).unwrap();
        let phi = State::new(vec![
            c(b.cos(), 0.0),
            c(b.sin() * g.cos(), b.sin() * g.sin()),
        ])
        .unwrap();
        corpus.push(Scenario::new(psi, phi, pi1.clone(), sigma).unwrap());
    }

    // Qutrit setups, rank-1 and rank-2 projectors, complex amplitudes.
    let psi3 = State::new(vec![c(0.6, 0.0), c(0.0, 0.48), c(0.64, 0.0)]).unwrap();
    let phi3 = State::new(vec![c(0.6, 0.0), c(0.0, -0.48), c(0.64, 0.0)]).unwrap();
    for indices in [vec![0usize], vec![1], vec![0, 2], vec![1, 2]] {
        let pi = Operator::basis_projector(3, &indices).unwrap();
        corpus.push(Scenario::new(psi3.clone(), phi3.clone(), pi, sigma).unwrap());
    }

    // Ququart setups with rank-2 projectors.
    let psi4 = State::new(vec![c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0)]).unwrap();
    // Overlap with psi4 is 0.5, comfortably non-orthogonal.
    let phi4 = State::new(vec![c(0.5, 0.0), c(0.0, 0.5), c(0.5, 0.0), c(0.0, -0.5)]).unwrap();
    for indices in [vec![0usize, 1], vec![1, 3]] {
        let pi = Operator::basis_projector(4, &indices).unwrap();
        corpus.push(Scenario::new(psi4.clone(), phi4.clone(), pi, sigma).unwrap());
    }

    // Seeded random fill to at least 22 entries.
    let mut rng = ChaCha12Rng::seed_from_u64(2024);
    while corpus.len() < 22 {
        corpus.push(random_scenario(&mut rng, sigma));
    }
    corpus
}
