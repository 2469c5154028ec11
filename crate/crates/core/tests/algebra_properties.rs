use proptest::prelude::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zenosim::channels::{
    apply_dephasing, evolve_unitary, release_branch_mixture, BranchConfig, DephasingChannel, Hamiltonian,
};
use zenosim::collapse::{apply_answer, probability_yes, process1, select_event_index, Answer};
use zenosim::opalg::{
    expectation_value, partial_trace, random_hermitian, random_unitary, random_weight_operator, tensor_product,
    ComplexMatrix, FactorSpace, Projector, WeightOperator,
};
use zenosim::zeno::literal_single_step;
use zenosim::Complex64;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random rank-`rank` projector in dimension `dim`.
fn random_projector(rng: &mut ChaCha8Rng, dim: usize, rank: usize) -> Projector {
    let u = random_unitary(rng, dim);
    let cols: Vec<Vec<Complex64>> = (0..rank).map(|c| (0..dim).map(|r| u.get(r, c)).collect()).collect();
    Projector::onto_vectors(&cols, "random").unwrap()
}

/// Two-factor reduced operator by direct index summation.
fn brute_force_trace_out(s: &ComplexMatrix, da: usize, db: usize, keep_first: bool) -> ComplexMatrix {
    let kept = if keep_first { da } else { db };
    let mut out = vec![Complex64::new(0.0, 0.0); kept * kept];
    for a in 0..da {
        for a2 in 0..da {
            for b in 0..db {
                for b2 in 0..db {
                    let v = s.get(a * db + b, a2 * db + b2);
                    if keep_first && b == b2 {
                        out[a * kept + a2] += v;
                    }
                    if !keep_first && a == a2 {
                        out[b * kept + b2] += v;
                    }
                }
            }
        }
    }
    ComplexMatrix::from_row_major(kept, &out).unwrap()
}

fn min_eigenvalue(s: &WeightOperator) -> f64 {
    s.eigenvalues()[0]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn partial_trace_matches_index_summation(seed in any::<u64>(), keep_first in any::<bool>(), db in 2usize..4) {
        let mut r = rng(seed);
        let s = random_weight_operator(&mut r, 2 * db).scaled(1.7).unwrap();
        let space = FactorSpace::new(vec![2, db], vec![if keep_first { 0 } else { 1 }]).unwrap();
        let reduced = partial_trace(&s, &space).unwrap();
        let oracle = brute_force_trace_out(s.matrix(), 2, db, keep_first);
        prop_assert!(reduced.matrix().max_abs_diff(&oracle) < 1e-14);
        prop_assert!((reduced.trace() - s.trace()).abs() <= 1e-12);
        prop_assert!(min_eigenvalue(&reduced) >= -1e-10);
    }

    #[test]
    fn partial_trace_is_linear(seed in any::<u64>(), alpha in 0.0f64..3.0, beta in 0.0f64..3.0) {
        let mut r = rng(seed);
        let s1 = random_weight_operator(&mut r, 8);
        let s2 = random_weight_operator(&mut r, 8);
        let space = FactorSpace::new(vec![2, 2, 2], vec![0, 2]).unwrap();
        let combo = WeightOperator::mixture(&[(alpha, &s1), (beta, &s2)]);
        prop_assume!(combo.is_ok());
        let lhs = partial_trace(&combo.unwrap(), &space).unwrap();
        let p1 = partial_trace(&s1, &space).unwrap();
        let p2 = partial_trace(&s2, &space).unwrap();
        let rhs = &p1.matrix().scale(alpha) + &p2.matrix().scale(beta);
        prop_assert!(lhs.matrix().max_abs_diff(&rhs) <= 1e-12);
    }

    #[test]
    fn tensor_trace_multiplies(seed in any::<u64>(), da in 1usize..4, db in 1usize..4) {
        let mut r = rng(seed);
        let a = random_hermitian(&mut r, da);
        let b = random_hermitian(&mut r, db);
        let lhs = tensor_product(&a, &b).trace();
        let rhs = a.trace() * b.trace();
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn expectation_ignores_positive_scale(seed in any::<u64>(), k in -20i32..20, c in 1e-3f64..1e3) {
        let mut r = rng(seed);
        let s = random_weight_operator(&mut r, 4);
        let a = random_hermitian(&mut r, 4);
        let base = expectation_value(&s, &a).unwrap();
        // Powers of two scale exactly.
        let exact = expectation_value(&s.scaled(2f64.powi(k)).unwrap(), &a).unwrap();
        prop_assert_eq!(exact, base);
        let general = expectation_value(&s.scaled(c).unwrap(), &a).unwrap();
        prop_assert!((general - base).norm() <= 1e-12 * base.norm().max(1.0));
        prop_assert!(base.im.abs() <= 1e-10);
    }

    #[test]
    fn mixture_expectation_is_classical_average(seed in any::<u64>()) {
        let mut r = rng(seed);
        let states: Vec<WeightOperator> = (0..3).map(|_| random_weight_operator(&mut r, 4)).collect();
        let raw = [0.2, 0.5, 0.3];
        let a = random_hermitian(&mut r, 4);
        let mix = WeightOperator::mixture(&[(raw[0], &states[0]), (raw[1], &states[1]), (raw[2], &states[2])]).unwrap();
        let lhs = expectation_value(&mix, &a).unwrap();
        let rhs: Complex64 = states
            .iter()
            .zip(raw)
            .map(|(s, p)| s.matrix().trace_product(&a) / s.trace() * p)
            .sum();
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn unitary_evolution_keeps_spectrum(seed in any::<u64>(), d in 0.0f64..10.0) {
        let mut r = rng(seed);
        let s = random_weight_operator(&mut r, 4);
        let h = Hamiltonian::new(random_hermitian(&mut r, 4)).unwrap();
        let out = evolve_unitary(&s, &h, d).unwrap();
        for (x, y) in s.eigenvalues().iter().zip(out.eigenvalues()) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
        prop_assert!((out.trace() - s.trace()).abs() <= 1e-12);
    }

    #[test]
    fn dephasing_shrinks_coherences_and_composes(seed in any::<u64>(), rate in 0.0f64..5.0, d1 in 0.0f64..2.0, d2 in 0.0f64..2.0) {
        let mut r = rng(seed);
        let s = random_weight_operator(&mut r, 3);
        let basis = random_unitary(&mut r, 3);
        let ch = DephasingChannel::new(basis.clone(), rate).unwrap();
        let once = apply_dephasing(&s, &ch, d1).unwrap();

        let before = basis.adjoint().sandwich(s.matrix());
        let after = basis.adjoint().sandwich(once.matrix());
        for i in 0..3 {
            prop_assert!((after.get(i, i) - before.get(i, i)).norm() <= 1e-12);
            for j in 0..3 {
                if i != j {
                    prop_assert!(after.get(i, j).norm() <= before.get(i, j).norm() + 1e-14);
                }
            }
        }
        prop_assert!(min_eigenvalue(&once) >= -1e-10);
        prop_assert!((once.trace() - s.trace()).abs() <= 1e-12);

        let twice = apply_dephasing(&once, &ch, d2).unwrap();
        let joint = apply_dephasing(&s, &ch, d1 + d2).unwrap();
        prop_assert!(twice.matrix().max_abs_diff(joint.matrix()) <= 1e-12);
    }

    #[test]
    fn dephasing_commutes_with_pointer_diagonal_generator(seed in any::<u64>(), rate in 0.0f64..5.0, d in 0.0f64..3.0) {
        let mut r = rng(seed);
        let s = random_weight_operator(&mut r, 4);
        let basis = random_unitary(&mut r, 4);
        let energies: Vec<f64> = (0..4).map(|_| r.random_range(-2.0..2.0)).collect();
        let h = Hamiltonian::new(basis.sandwich(&ComplexMatrix::from_diagonal(&energies))).unwrap();
        let ch = DephasingChannel::new(basis, rate).unwrap();
        let a = apply_dephasing(&evolve_unitary(&s, &h, d).unwrap(), &ch, d).unwrap();
        let b = evolve_unitary(&apply_dephasing(&s, &ch, d).unwrap(), &h, d).unwrap();
        prop_assert!(a.matrix().max_abs_diff(b.matrix()) <= 1e-10);
    }

    #[test]
    fn branch_mixture_full_support(n in 1u32..12, p in 0.001f64..0.999) {
        let m = release_branch_mixture(&BranchConfig::new(n, p).unwrap());
        prop_assert_eq!(m.nonzero_count(), 1usize << n);
        prop_assert!((m.trace() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn yes_and_no_branches_sum_to_process1(seed in any::<u64>(), rank in 1usize..4) {
        let mut r = rng(seed);
        let s = random_weight_operator(&mut r, 4).scaled(2.3).unwrap();
        let p = random_projector(&mut r, 4, rank);
        let yes = apply_answer(&s, &p, Answer::Yes).unwrap();
        let no = apply_answer(&s, &p, Answer::No).unwrap();
        let p1 = process1(&s, &p).unwrap();
        prop_assert!((yes.matrix() + no.matrix()).max_abs_diff(p1.matrix()) <= 1e-12);
        prop_assert!((yes.trace() + no.trace() - s.trace()).abs() <= 1e-12);
        let py = probability_yes(&s, &p).unwrap();
        prop_assert!((yes.trace() - s.trace() * py).abs() <= 1e-12);
        for out in [&yes, &no, &p1] {
            prop_assert!(out.matrix().hermiticity_defect() <= 1e-10);
            prop_assert!(min_eigenvalue(out) >= -1e-10);
        }
    }

    #[test]
    fn process1_conserves_and_is_idempotent(seed in any::<u64>(), rank in 1usize..4) {
        let mut r = rng(seed);
        let s = random_weight_operator(&mut r, 4);
        let p = random_projector(&mut r, 4, rank);
        let once = process1(&s, &p).unwrap();
        let twice = process1(&once, &p).unwrap();
        prop_assert!((once.trace() - s.trace()).abs() <= 1e-12);
        prop_assert!(twice.matrix().max_abs_diff(once.matrix()) <= 1e-12);
        let q = p.complement();
        let cross = &(p.matrix() * once.matrix()) * q.matrix();
        prop_assert!(cross.max_abs() <= 1e-12);
    }

    #[test]
    fn yes_probabilities_are_complementary(seed in any::<u64>(), rank in 1usize..4) {
        let mut r = rng(seed);
        let s = random_weight_operator(&mut r, 4).scaled(0.4).unwrap();
        let p = random_projector(&mut r, 4, rank);
        let total = probability_yes(&s, &p).unwrap() + probability_yes(&s, &p.complement()).unwrap();
        prop_assert!((total - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn selection_ignores_positive_scale(seed in any::<u64>(), c in 1e-4f64..1e4) {
        let mut r = rng(seed);
        let s = random_weight_operator(&mut r, 4);
        let cands: Vec<Projector> = (0..4).map(|k| Projector::onto_basis(4, &[k], format!("e{k}")).unwrap()).collect();
        let a = select_event_index(&s, &cands).unwrap();
        let b = select_event_index(&s.scaled(c).unwrap(), &cands).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn literal_single_step_matches_pipeline(seed in any::<u64>(), d in 0.0f64..2.0, rank in 1usize..4) {
        let mut r = rng(seed);
        let s = random_weight_operator(&mut r, 4);
        let h = Hamiltonian::new(random_hermitian(&mut r, 4)).unwrap();
        let p = random_projector(&mut r, 4, rank);
        let literal = literal_single_step(&s, &h, &p, d).unwrap();
        let composed = process1(&evolve_unitary(&process1(&s, &p).unwrap(), &h, d).unwrap(), &p).unwrap();
        prop_assert!(literal.matrix().max_abs_diff(composed.matrix()) <= 1e-12);
    }
}

#[test]
fn extended_projector_probability_equals_reduced_probability() {
    // Tr(S P') / Tr S on the full space equals Tr_b(S_b P) / Tr_b S_b.
    let mut r = rng(11);
    for _ in 0..50 {
        let s = random_weight_operator(&mut r, 12).scaled(3.0).unwrap();
        let space = FactorSpace::new(vec![3, 2, 2], vec![1]).unwrap();
        let p = random_projector(&mut r, 2, 1);
        let full = probability_yes(&s, &p.extend_to(&space).unwrap()).unwrap();
        let reduced = probability_yes(&partial_trace(&s, &space).unwrap(), &p).unwrap();
        assert!((full - reduced).abs() < 1e-12);
    }
}
