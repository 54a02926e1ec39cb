mod common;

use common::*;
use eha_core::analysis::{
    aggregate, avg_entropy, commutator_norm, exact_ground, fidelity_to_ground, lanczos_ground, sector_ground,
    LanczosOptions, SolverKind, SpectrumResult, DEFAULT_DEGENERACY_TOL,
};
use eha_core::experiment::{run_experiment, ExperimentConfig, RunOptions};
use eha_core::hamiltonians::{build_hm, build_symmetry_ops, build_tfim, Boundary};
use eha_core::optimize::{AdamConfig, GradientMethod, TraceRecord, TrainingTrace};
use eha_core::pauli::serialize_pauli_file;
use eha_core::statevec::{prepare_reference, ReferenceState};
use eha_core::{PauliLetter, PauliString, PauliSum, Statevector};
use num_complex::Complex64 as C;
use proptest::prelude::*;
use rand::Rng;

/// Oracle entropy from explicit single-qubit marginals, base 2.
fn entropy_oracle(psi: &[C]) -> f64 {
    let n = psi.len().trailing_zeros() as usize;
    let mut total = 0.0;
    for q in 0..n {
        let bit = 1usize << (n - 1 - q);
        let (mut p0, mut p1, mut c) = (0.0, 0.0, C::new(0.0, 0.0));
        for i in 0..psi.len() {
            if i & bit == 0 {
                p0 += psi[i].norm_sqr();
                c += psi[i] * psi[i | bit].conj();
            } else {
                p1 += psi[i].norm_sqr();
            }
        }
        let disc = (((p0 - p1) / 2.0).powi(2) + c.norm_sqr()).sqrt();
        for l in [(p0 + p1) / 2.0 + disc, (p0 + p1) / 2.0 - disc] {
            let l = l.clamp(0.0, 1.0);
            if l > 0.0 {
                total -= l * l.log2();
            }
        }
    }
    total / n as f64
}

fn product_state(n: usize, seed: u64) -> Vec<C> {
    let mut r = rng(seed);
    let mut v = vec![C::new(1.0, 0.0)];
    for _ in 0..n {
        let t: f64 = r.random_range(0.0..std::f64::consts::PI);
        let p: f64 = r.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let q = [C::new((t / 2.0).cos(), 0.0), C::from_polar((t / 2.0).sin(), p)];
        v = v.iter().flat_map(|a| q.iter().map(move |b| a * b)).collect();
    }
    v
}

fn ghz(n: usize) -> Statevector {
    let mut a = vec![C::new(0.0, 0.0); 1 << n];
    a[0] = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    a[(1 << n) - 1] = a[0];
    Statevector::from_amplitudes(a).unwrap()
}

#[test]
fn entropy_examples() {
    for seed in 0..100 {
        let n = 1 + (seed as usize % 8);
        let s = Statevector::from_amplitudes(product_state(n, seed)).unwrap();
        assert!(avg_entropy(&s).abs() < 1e-10, "seed {seed}");
    }
    for n in [2, 4, 6, 8] {
        let s = prepare_reference(&ReferenceState::SingletPairs, n).unwrap();
        assert!((avg_entropy(&s) - 1.0).abs() < 1e-10, "singlets n={n}");
    }
    for n in [2, 3, 5] {
        assert!((avg_entropy(&ghz(n)) - 1.0).abs() < 1e-10, "ghz n={n}");
    }
}

#[test]
fn entropy_matches_marginal_oracle() {
    for n in 1..=6 {
        for seed in 0..10 {
            let psi = random_state(n, 50 * n as u64 + seed);
            let s = Statevector::from_amplitudes(psi.clone()).unwrap();
            assert!((avg_entropy(&s) - entropy_oracle(&psi)).abs() < 1e-10);
        }
    }
}

fn check_spectrum(h: &PauliSum, s: &SpectrumResult) {
    let m = sum_to_mat(h);
    for (i, g) in s.ground_space.iter().enumerate() {
        for (j, k) in s.ground_space.iter().enumerate() {
            let ip = g.inner(k).unwrap();
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((ip - C::new(want, 0.0)).norm() < 1e-8, "overlap {i},{j}");
        }
        let hg = m.apply(g.amplitudes());
        let res: f64 = hg
            .iter()
            .zip(g.amplitudes())
            .map(|(a, b)| (a - b * s.ground_energy).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(res < 1e-8, "residual {res}");
    }
}

fn random_real_sum(n: usize, terms: usize, seed: u64) -> PauliSum {
    let mut r = rng(seed);
    let letters = [PauliLetter::I, PauliLetter::X, PauliLetter::Y, PauliLetter::Z];
    let mut out = Vec::new();
    while out.len() < terms {
        let w: Vec<(usize, PauliLetter)> = (0..n).map(|q| (q, letters[r.random_range(0..4)])).collect();
        if w.iter().filter(|(_, l)| *l == PauliLetter::Y).count() % 2 == 0 {
            out.push((r.random_range(-1.0..1.0), PauliString::new(n, &w).unwrap()));
        }
    }
    PauliSum::new(n, out).unwrap()
}

fn real_entries(m: &Mat) -> Vec<f64> {
    assert!(m.a.iter().all(|c| c.im.abs() < 1e-14));
    m.a.iter().map(|c| c.re).collect()
}

#[test]
fn dense_ground_matches_jacobi_and_eigen_equation() {
    for n in 2..=5 {
        for seed in 0..4 {
            let h = random_real_sum(n, 10, 10 * n as u64 + seed);
            let s = exact_ground(&h, DEFAULT_DEGENERACY_TOL).unwrap();
            let ev = jacobi_eigenvalues(real_entries(&sum_to_mat(&h)), 1 << n);
            assert!((s.ground_energy - ev[0]).abs() < 1e-9, "n={n} seed={seed}");
            let deg = ev.iter().filter(|&&e| e - ev[0] <= DEFAULT_DEGENERACY_TOL).count();
            assert_eq!(s.degeneracy(), deg);
            check_spectrum(&h, &s);
        }
    }
    let ising = build_tfim(4, -1.0, 0.0).unwrap();
    let s = exact_ground(&ising, DEFAULT_DEGENERACY_TOL).unwrap();
    assert_eq!(s.degeneracy(), 2);
    check_spectrum(&ising, &s);
}

#[test]
fn lanczos_agrees_with_dense() {
    let opts = LanczosOptions::default();
    for h in [
        build_hm(8, 1.0, Boundary::Open).unwrap(),
        build_tfim(9, -1.0, 0.7).unwrap(),
        random_real_sum(7, 20, 3),
    ] {
        let d = exact_ground(&h, DEFAULT_DEGENERACY_TOL).unwrap();
        let l = lanczos_ground(&h, DEFAULT_DEGENERACY_TOL, &opts).unwrap();
        assert_eq!(l.solver, SolverKind::Lanczos);
        assert!((d.ground_energy - l.ground_energy).abs() < 1e-8);
        assert_eq!(d.degeneracy(), l.degeneracy());
        let f = fidelity_to_ground(&l.ground_space[0], &d).unwrap();
        assert!((f - 1.0).abs() < 1e-8);
    }
}

/// Mixes the ground basis with a random unitary, `Q = exp(iA)`.
fn rotate_basis(s: &SpectrumResult, seed: u64) -> SpectrumResult {
    let k = s.degeneracy();
    let mut r = rng(seed);
    let mut a = Mat::zeros(k);
    for i in 0..k {
        for j in 0..k {
            a.a[i * k + j] = C::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
        }
    }
    let herm = a.add(&a.dagger()).scale(C::new(0.0, 0.5));
    let q = herm.expm();
    let dim = s.ground_space[0].dim();
    let space = (0..k)
        .map(|j| {
            let mut v = vec![C::new(0.0, 0.0); dim];
            for (i, g) in s.ground_space.iter().enumerate() {
                for (x, y) in v.iter_mut().zip(g.amplitudes()) {
                    *x += q.at(i, j) * y;
                }
            }
            Statevector::from_amplitudes(v).unwrap()
        })
        .collect();
    SpectrumResult {
        ground_space: space,
        ..s.clone()
    }
}

#[test]
fn fidelity_examples() {
    let hm2 = exact_ground(&build_hm(2, 1.0, Boundary::Open).unwrap(), DEFAULT_DEGENERACY_TOL).unwrap();
    assert!((fidelity_to_ground(&hm2.ground_space[0], &hm2).unwrap() - 1.0).abs() < 1e-12);
    // |00> is a triplet state
    assert!(fidelity_to_ground(&Statevector::zero(2).unwrap(), &hm2).unwrap().abs() < 1e-12);
    let ising = exact_ground(&build_tfim(2, -1.0, 0.0).unwrap(), DEFAULT_DEGENERACY_TOL).unwrap();
    assert!((fidelity_to_ground(&ghz(2), &ising).unwrap() - 1.0).abs() < 1e-12);
    assert!(fidelity_to_ground(&Statevector::zero(3).unwrap(), &ising).is_err());
}

#[test]
fn fidelity_is_invariant_under_ground_basis_rotation() {
    let ising = exact_ground(&build_tfim(4, -1.0, 0.0).unwrap(), DEFAULT_DEGENERACY_TOL).unwrap();
    assert_eq!(ising.degeneracy(), 2);
    for seed in 0..10 {
        let rotated = rotate_basis(&ising, seed);
        let s = Statevector::from_amplitudes(random_state(4, 100 + seed)).unwrap();
        let a = fidelity_to_ground(&s, &ising).unwrap();
        let b = fidelity_to_ground(&s, &rotated).unwrap();
        assert!((a - b).abs() < 1e-12, "seed {seed}");
    }
}

fn constant_trace(energy: f64, entropy: f64, len: usize, state: Statevector) -> TrainingTrace {
    TrainingTrace {
        seed: 0,
        records: (0..len)
            .map(|iter| TraceRecord {
                iter,
                energy,
                cost: energy,
                entropy,
                grad_norm: 0.0,
            })
            .collect(),
        initial_params: vec![],
        final_params: vec![],
        best_iteration: 0,
        best_cost: energy,
        best_energy: energy,
        best_params: vec![],
        adam: AdamConfig::default(),
        gradient_method: GradientMethod::Adjoint,
        aborted: None,
        best_state: Some(state.clone()),
        final_state: Some(state),
    }
}

#[test]
fn aggregate_examples() {
    let spec = exact_ground(&build_hm(2, 1.0, Boundary::Open).unwrap(), DEFAULT_DEGENERACY_TOL).unwrap();
    let g = spec.ground_space[0].clone();
    let mut one = constant_trace(-3.0, 1.0, 5, g.clone());
    one.records[2].energy = -2.5;
    let st = aggregate(std::slice::from_ref(&one), &spec).unwrap();
    let e: Vec<f64> = one.records.iter().map(|r| r.energy).collect();
    assert_eq!(st.energy.mean, e);
    assert_eq!(st.energy.min, e);
    assert_eq!(st.energy.max, e);
    assert_eq!(st.terminal_energy.std, 0.0);
    assert!((st.terminal_fidelity.mean - 1.0).abs() < 1e-12);

    let (a, b) = (-3.0, -1.0);
    let two = [
        constant_trace(a, 1.0, 4, g.clone()),
        constant_trace(b, 0.0, 4, Statevector::zero(2).unwrap()),
    ];
    let st = aggregate(&two, &spec).unwrap();
    assert!(st.energy.mean.iter().all(|&m| m == (a + b) / 2.0));
    assert!(st.energy.min.iter().all(|&m| m == a));
    assert!(st.energy.max.iter().all(|&m| m == b));
    assert_eq!(st.terminal_energy.best, a);
    assert_eq!(st.terminal_energy.std, (b - a) / 2.0);
    assert_eq!(st.terminal_fidelity.best, st.terminal_fidelities[0]);

    assert!(aggregate(&[], &spec).is_err());
    let ragged = [two[0].clone(), constant_trace(a, 1.0, 3, g)];
    assert!(aggregate(&ragged, &spec).is_err());
}

#[test]
fn commutator_examples() {
    let h = build_hm(4, 1.0, Boundary::Open).unwrap();
    let sz = build_symmetry_ops(4).unwrap().s_z;
    assert!(commutator_norm(&h, &sz).unwrap() < 1e-10);
    assert_eq!(commutator_norm(&h, &h).unwrap(), 0.0);
    let big = build_hm(7, 1.0, Boundary::Open).unwrap();
    assert!(commutator_norm(&big, &big).is_err());
}

/// Number-conserving 6-qubit model: hopping `(XX + YY)/2`, density couplings
/// `ZZ` and on-site `Z`, all real.
fn synthetic_molecule(seed: u64) -> PauliSum {
    let n = 6;
    let mut r = rng(seed);
    let mut terms = Vec::new();
    for i in 0..n {
        terms.push((r.random_range(-1.0..1.0), vec![(i, PauliLetter::Z)]));
        for j in i + 1..n {
            let t: f64 = r.random_range(-0.5..0.5);
            terms.push((t, vec![(i, PauliLetter::X), (j, PauliLetter::X)]));
            terms.push((t, vec![(i, PauliLetter::Y), (j, PauliLetter::Y)]));
            terms.push((r.random_range(-0.3..0.3), vec![(i, PauliLetter::Z), (j, PauliLetter::Z)]));
        }
    }
    PauliSum::new(n, terms.into_iter().map(|(c, w)| (c, PauliString::new(n, &w).unwrap()))).unwrap()
}

/// Lowest eigenvalue of `h` on basis states with exactly `k` excitations.
fn restricted_ground(h: &PauliSum, k: u32) -> f64 {
    let m = sum_to_mat(h);
    let basis: Vec<usize> = (0..m.d).filter(|i| i.count_ones() == k).collect();
    let d = basis.len();
    let mut sub = vec![0.0; d * d];
    for (a, &i) in basis.iter().enumerate() {
        for (b, &j) in basis.iter().enumerate() {
            sub[a * d + b] = m.at(i, j).re;
        }
    }
    jacobi_eigenvalues(sub, d)[0]
}

#[test]
fn sector_ground_matches_restricted_oracle() {
    let number = build_symmetry_ops(6).unwrap().number_op;
    for seed in 0..5 {
        let h = synthetic_molecule(seed);
        assert!(commutator_norm(&h, &number).unwrap() < 1e-10);
        for k in [1u32, 2, 3] {
            let s = sector_ground(&h, &number, k as f64, DEFAULT_DEGENERACY_TOL).unwrap();
            let want = restricted_ground(&h, k);
            assert!((s.ground_energy - want).abs() < 1e-8, "seed {seed} k={k}");
            let nbar = number.expectation(&s.ground_space[0]).unwrap();
            assert!((nbar - k as f64).abs() < 1e-8);
        }
    }
    let h = synthetic_molecule(0);
    assert!(sector_ground(&h, &number, 2.5, DEFAULT_DEGENERACY_TOL).is_err());
    assert!(sector_ground(&h, &h, 2.0, DEFAULT_DEGENERACY_TOL).is_err());
}

#[test]
fn penalized_training_reaches_sector_ground() {
    let h = synthetic_molecule(7);
    let oracle = restricted_ground(&h, 2);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mol.txt");
    std::fs::write(&path, serialize_pauli_file(&h)).unwrap();
    let cfg = ExperimentConfig::from_toml_str(&format!(
        r#"
name = "mol6"
realizations = 3
master_seed = 11
reference_state = {{ basis_string = "110000" }}
penalty = {{ operator = "number_op", target = 2.0, beta = 10.0 }}

[model]
family = "external"
path = "{}"

[ansatz]
family = "eha"
blocks = 6

[[schedule]]
step_size = 0.01
iterations = 1500
"#,
        path.display()
    ))
    .unwrap();
    let out = run_experiment(
        &cfg,
        &RunOptions {
            out_dir: Some(dir.path().join("out")),
            ..RunOptions::default()
        },
    )
    .unwrap();
    let s = &out.summary;
    assert!((s.exact.ground_energy - oracle).abs() < 1e-8);
    for r in &s.per_realization {
        assert!((r.best_energy - oracle).abs() < 1.6e-3, "realization {}: {} vs {oracle}", r.index, r.best_energy);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn entropy_is_bounded(n in 1usize..8, seed in 0u64..100_000) {
        let s = Statevector::from_amplitudes(random_state(n, seed)).unwrap();
        let e = avg_entropy(&s);
        prop_assert!((0.0..=1.0).contains(&e));
    }

    #[test]
    fn expectations_respect_variational_bound(seed in 0u64..1000) {
        let h = build_hm(4, 1.0, Boundary::Open).unwrap();
        let e0 = exact_ground(&h, DEFAULT_DEGENERACY_TOL).unwrap().ground_energy;
        let s = Statevector::from_amplitudes(random_state(4, seed)).unwrap();
        prop_assert!(h.expectation(&s).unwrap() >= e0 - 1e-9);
    }
}
