use proptest::prelude::*;
use qcomm::comm::Party;
use qcomm::instances::{conditioned_matrix, disjointness_regression, hamiltonian_split, multiparty_regression};
use qcomm::linalg::{
    fidelity, frob_norm, op_norm, pinv, random_complex_matrix, random_real_matrix, random_unit_vector, vec_norm,
    Matrix, Vector,
};
use qcomm::protocols::{
    coordinator_regression, hamiltonian_sim_coordinator, hamiltonian_sim_two_party, regression_case1, regression_case2,
    regression_case3, Direction, Mode, ProtocolOutcome, Schedule,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instance(seed: u64, m: usize, n: usize, complex: bool) -> (Matrix, Vector) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = if complex { random_complex_matrix(&mut rng, m, n) } else { random_real_matrix(&mut rng, m, n) };
    let b = random_unit_vector(&mut rng, m);
    (a, b)
}

fn closed_form(a: &Matrix, b: &Vector) -> (f64, f64) {
    let p = pinv(a).unwrap();
    let x = vec_norm(&(&p * b)).powi(2);
    (x / op_norm(&p).unwrap().powi(2), x / frob_norm(&p).powi(2))
}

fn same_run(x: &ProtocolOutcome, y: &ProtocolOutcome) -> bool {
    x.ledger == y.ledger && x.output_state == y.output_state && x.success_prob == y.success_prob
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn success_probabilities_are_exact(seed: u64, m in 2usize..=12, n in 1usize..=12, complex: bool) {
        let (a, b) = instance(seed, m, n, complex);
        let (p1, p2) = closed_form(&a, &b);
        let c1 = regression_case1(&a, &b, Mode::Postselect).unwrap();
        let c2 = regression_case2(&a, &b, Mode::Postselect).unwrap();
        prop_assert!((c1.success_prob - p1).abs() <= 1e-9);
        prop_assert!((c2.success_prob - p2).abs() <= 1e-9);
    }

    #[test]
    fn exact_paths_reach_the_solution(seed: u64, m in 2usize..=10, n in 1usize..=10) {
        let (a, b) = instance(seed, m, n, true);
        let target = pinv(&a).unwrap() * &b;
        prop_assume!(vec_norm(&target) > 1e-6);
        for out in [
            regression_case1(&a, &b, Mode::Postselect).unwrap(),
            regression_case2(&a, &b, Mode::Postselect).unwrap(),
            regression_case3(&a, &b, Schedule::KnownProbability).unwrap(),
        ] {
            prop_assert!(fidelity(&out.output_state, &target) >= 1.0 - 1e-8, "{}", out.protocol);
            prop_assert!(out.monolithic_gap() <= 1e-8, "{}", out.protocol);
        }
    }

    #[test]
    fn one_way_protocols_keep_their_direction(seed: u64, m in 2usize..=8, n in 1usize..=8, repeat: bool) {
        let (a, b) = instance(seed, m, n, false);
        let mode = if repeat { Mode::Repeat } else { Mode::Postselect };
        let c1 = regression_case1(&a, &b, mode).unwrap();
        let c2 = regression_case2(&a, &b, mode).unwrap();
        prop_assert!(!c1.ledger.has_direction(Party::Alice, Party::Bob));
        prop_assert!(!c2.ledger.has_direction(Party::Bob, Party::Alice));
    }

    #[test]
    fn amplified_ledger_never_exceeds_repetition(seed: u64, dim in 2usize..=12, kappa in 2.0f64..40.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = conditioned_matrix(&mut rng, dim, dim, kappa).unwrap();
        let b = random_unit_vector(&mut rng, dim);
        let (p, _) = closed_form(&a, &b);
        prop_assume!(p <= 0.25);
        let c1 = regression_case1(&a, &b, Mode::Repeat).unwrap();
        let c3 = regression_case3(&a, &b, Schedule::KnownProbability).unwrap();
        let (t1, t3) = (c1.ledger.totals(), c3.ledger.totals());
        prop_assert!(t3.qubits_sent + t3.bits_sent <= t1.qubits_sent + t1.bits_sent, "{t3:?} vs {t1:?}");
    }

    #[test]
    fn replays_are_identical(seed: u64, m in 2usize..=6, n in 1usize..=6, oblivious: bool) {
        let (a, b) = instance(seed, m, n, true);
        let schedule = if oblivious { Schedule::Oblivious { seed } } else { Schedule::KnownProbability };
        prop_assert!(same_run(
            &regression_case3(&a, &b, schedule).unwrap(),
            &regression_case3(&a, &b, schedule).unwrap()
        ));
        prop_assert!(same_run(
            &regression_case1(&a, &b, Mode::Repeat).unwrap(),
            &regression_case1(&a, &b, Mode::Repeat).unwrap()
        ));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn coordinator_matches_monolithic(seed: u64, r in 1usize..=3, kappa in 1.5f64..4.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = qcomm::instances::coordinator_split(&mut rng, 4, r, kappa).unwrap();
        let eps = 1e-3;
        let out = coordinator_regression(&inst.a_parts, &inst.b_parts, None, eps).unwrap();
        prop_assert!(out.monolithic_gap() <= 1e-8);
        prop_assert!(out.fidelity_to_target >= 1.0 - eps - 1e-6);
    }

    #[test]
    fn hamiltonian_runs_match_monolithic(seed: u64, t in -1.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = hamiltonian_split(&mut rng, 4, 2, t, 2.0).unwrap();
        let psi = inst.b();
        let out = hamiltonian_sim_coordinator(&inst.a_parts, &psi, t, 1e-4).unwrap();
        prop_assert!(out.monolithic_gap() <= 1e-8);
        for direction in [Direction::BobToAlice, Direction::AliceToBob] {
            let out = hamiltonian_sim_two_party(&inst.a(), &psi, t, direction, Mode::Postselect).unwrap();
            prop_assert!(out.monolithic_gap() <= 1e-8);
        }
    }
}

/// Largest entry of the output distribution above one half flags an intersection.
fn verdict(out: &ProtocolOutcome) -> bool {
    out.output_distribution.iter().cloned().fold(0.0, f64::max) > 0.5 + 1e-9
}

fn subsets(l: usize) -> impl Iterator<Item = Vec<usize>> {
    (1..(1u32 << l) - 1).map(move |mask| (0..l).filter(|&i| mask & (1 << i) != 0).collect())
}

#[test]
fn disjointness_verdicts_are_sound() {
    for l in 2..=6 {
        for s in subsets(l) {
            for t in subsets(l) {
                let common = s.iter().filter(|i| t.contains(i)).count();
                if common > 1 {
                    continue;
                }
                let inst = disjointness_regression(&s, &t, l, l, None).unwrap();
                let (a, b) = (inst.a(), inst.b());
                for out in [
                    regression_case1(&a, &b, Mode::Postselect).unwrap(),
                    regression_case2(&a, &b, Mode::Postselect).unwrap(),
                    regression_case3(&a, &b, Schedule::KnownProbability).unwrap(),
                ] {
                    assert_eq!(verdict(&out), common == 1, "{} on S = {s:?}, T = {t:?}", out.protocol);
                }
            }
        }
    }
}

#[test]
fn multiparty_verdicts_are_sound() {
    // A sampled index is checked for membership with every player, so the
    // detection probability is the output mass on the common elements.
    let n = 4;
    for s in subsets(n) {
        for t in subsets(n) {
            let common: Vec<usize> = s.iter().copied().filter(|i| t.contains(i)).collect();
            if common.len() > 1 {
                continue;
            }
            let inst = multiparty_regression(&[s.clone(), t.clone()], n, None).unwrap();
            let out = coordinator_regression(&inst.a_parts, &inst.b_parts, None, 1e-3).unwrap();
            let detected: f64 =
                (0..n).filter(|i| s.contains(i) && t.contains(i)).map(|i| out.output_distribution[i]).sum();
            assert_eq!(detected >= 1.0 / 3.0, !common.is_empty(), "S = {s:?}, T = {t:?}, mass {detected}");
        }
    }
}
