mod common;

use energy_flowshop::instance::{generate_instance, Instance, Permutation};
use energy_flowshop::objectives::{
    evaluate, schedule_tableau, simulate_oracle, Evaluator, DEFAULT_KAPPA,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn case() -> impl Strategy<Value = (Instance, Permutation)> {
    (1usize..=9, 1usize..=6, any::<u64>()).prop_map(|(n, m, seed)| {
        let inst = generate_instance(n, m, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let perm = common::random_perm(&mut rng, n);
        (inst, perm)
    })
}

proptest! {
    #[test]
    fn matches_event_simulation((inst, perm) in case()) {
        let fast = evaluate(&inst, &perm).unwrap();
        let slow = simulate_oracle(&inst, &perm, DEFAULT_KAPPA).unwrap();
        prop_assert_eq!(fast.flowtime, slow.flowtime);
        prop_assert!((fast.energy - slow.energy).abs() <= 1e-9 * slow.energy.abs().max(1.0));
    }

    #[test]
    fn completion_grid_is_monotone((inst, perm) in case()) {
        let tab = schedule_tableau(&inst, &perm).unwrap();
        for i in 0..tab.n_positions() {
            let job = perm.as_slice()[i];
            for j in 0..tab.n_machines() {
                let t = inst.time(job, j) as u64;
                if i > 0 {
                    prop_assert!(tab.completion(i, j) >= tab.completion(i - 1, j) + t);
                }
                if j > 0 {
                    prop_assert!(tab.completion(i, j) >= tab.completion(i, j - 1) + t);
                }
                prop_assert!(tab.completion(i, j) >= t);
            }
        }
    }

    #[test]
    fn flowtime_lower_bounds((inst, perm) in case()) {
        let tab = schedule_tableau(&inst, &perm).unwrap();
        let obj = evaluate(&inst, &perm).unwrap();
        let last = inst.n_machines() - 1;
        let sum_last: u64 = (0..inst.n_jobs()).map(|j| inst.time(j, last) as u64).sum();
        prop_assert!(obj.flowtime >= tab.makespan());
        prop_assert!(obj.flowtime >= sum_last);
        prop_assert!(obj.energy >= 0.0);
    }

    #[test]
    fn energy_scales_with_power((inst, perm) in case(), c in 0.5f64..4.0) {
        let scaled = inst.with_powers(inst.fixed_power().iter().map(|p| p * c).collect()).unwrap();
        let a = evaluate(&inst, &perm).unwrap();
        let b = evaluate(&scaled, &perm).unwrap();
        prop_assert_eq!(a.flowtime, b.flowtime);
        prop_assert!((b.energy - c * a.energy).abs() <= 1e-9 * b.energy.abs().max(1.0));
    }

    #[test]
    fn job_relabelling_is_invisible((inst, perm) in case(), shuffle_seed in any::<u64>()) {
        // Job k of the relabelled instance is job sigma[k] of the original.
        let mut rng = ChaCha8Rng::seed_from_u64(shuffle_seed);
        let sigma = common::random_perm(&mut rng, inst.n_jobs());
        let mut inverse = vec![0; inst.n_jobs()];
        for (k, &j) in sigma.as_slice().iter().enumerate() {
            inverse[j] = k;
        }
        let rows = sigma.as_slice().iter().map(|&j| inst.job_row(j).to_vec()).collect();
        let relabelled = Instance::new(rows, inst.fixed_power().to_vec()).unwrap();
        let order = Permutation::new(perm.as_slice().iter().map(|&j| inverse[j]).collect()).unwrap();
        prop_assert!(evaluate(&inst, &perm).unwrap().same_point(&evaluate(&relabelled, &order).unwrap()));
    }

    #[test]
    fn kappa_is_linear((inst, perm) in case(), kappa in 0.001f64..1.0) {
        let base = Evaluator::with_kappa(&inst, 1.0).evaluate(&perm).unwrap();
        let k = Evaluator::with_kappa(&inst, kappa).evaluate(&perm).unwrap();
        prop_assert!((k.energy - kappa * base.energy).abs() <= 1e-9 * base.energy.max(1.0));
    }
}

#[test]
fn two_by_two_hand_values() {
    let inst = common::two_by_two();
    let a = evaluate(&inst, &Permutation::new(vec![0, 1]).unwrap()).unwrap();
    let b = evaluate(&inst, &Permutation::new(vec![1, 0]).unwrap()).unwrap();
    assert_eq!((a.flowtime, a.energy), (19, 60.0));
    assert_eq!((b.flowtime, b.energy), (18, 40.0));
    assert!(energy_flowshop::dominates(&b, &a));
}

#[test]
fn invalid_permutation_is_rejected() {
    let inst = common::two_by_two();
    let three = Permutation::identity(3);
    assert!(evaluate(&inst, &three).is_err());
}
