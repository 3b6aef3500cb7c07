use energy_flowshop::instance::{
    generate_instance, parse_taillard, parse_taillard_all, taillard_lcg_times, Instance,
    TaillardInstance, DEFAULT_POWERS, TAILLARD_20X5_SEEDS,
};
use energy_flowshop::Error;
use proptest::prelude::*;

const TAI20_5: &str = include_str!("../data/tai20_5.txt");

#[test]
fn bundled_file_matches_generator() {
    let blocks = parse_taillard_all(TAI20_5).unwrap();
    assert_eq!(blocks.len(), 10);
    for (block, seed) in blocks.iter().zip(TAILLARD_20X5_SEEDS) {
        assert_eq!(
            (block.n_jobs, block.n_machines, block.seed),
            (20, 5, Some(seed))
        );
        assert_eq!(block.proc_time, taillard_lcg_times(20, 5, seed));
    }
}

#[test]
fn first_bundled_instance() {
    let ta001 = parse_taillard(TAI20_5, 1).unwrap();
    let m1: Vec<u32> = (0..20).map(|j| ta001.time(j, 0)).collect();
    assert_eq!(
        m1,
        [54, 83, 15, 71, 77, 36, 53, 38, 27, 87, 76, 91, 14, 29, 12, 77, 32, 87, 68, 94]
    );
    assert_eq!(ta001.upper_bound, Some(1278));
    let inst = ta001.with_default_powers().unwrap();
    assert_eq!(inst.fixed_power(), &DEFAULT_POWERS[..5]);
}

#[test]
fn index_past_end() {
    assert!(matches!(
        parse_taillard(TAI20_5, 11),
        Err(Error::IndexOutOfRange {
            index: 11,
            available: 10
        })
    ));
}

proptest! {
    #[test]
    fn taillard_round_trip(n in 1usize..12, m in 1usize..8, seed in 1i64..2_000_000_000) {
        let block = TaillardInstance {
            n_jobs: n,
            n_machines: m,
            seed: Some(seed),
            upper_bound: None,
            lower_bound: None,
            proc_time: taillard_lcg_times(n, m, seed),
        };
        let text = block.to_taillard();
        let back = parse_taillard(&text, 1).unwrap();
        prop_assert_eq!(&back.proc_time, &block.proc_time);
        prop_assert_eq!(back.to_taillard(), text);
    }

    #[test]
    fn native_round_trip(n in 1usize..12, m in 1usize..8, seed in any::<u64>()) {
        let inst = generate_instance(n, m, seed).unwrap();
        let back = Instance::from_native(&inst.to_native()).unwrap();
        prop_assert_eq!(back, inst);
    }

    #[test]
    fn lcg_times_in_range(n in 1usize..30, m in 1usize..10, seed in 1i64..2_000_000_000) {
        prop_assert!(taillard_lcg_times(n, m, seed).iter().all(|t| (1..=99).contains(t)));
    }
}
