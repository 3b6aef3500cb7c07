mod common;

use energy_flowshop::objectives::Objectives;
use energy_flowshop::pareto::{
    crowding_distances, dominates, fast_nondominated_sort, nondominated_fronts, CrowdingMode,
    Individual,
};
use energy_flowshop::Permutation;
use proptest::prelude::*;

fn points() -> impl Strategy<Value = Vec<Objectives>> {
    prop::collection::vec((0u64..15, 0u32..15), 1..64).prop_map(|v| {
        v.into_iter()
            .map(|(f, e)| Objectives::new(f, e as f64 * 0.25))
            .collect()
    })
}

fn sorted(mut fronts: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    for f in &mut fronts {
        f.sort_unstable();
    }
    fronts
}

proptest! {
    #[test]
    fn sort_equals_peeling(pts in points()) {
        prop_assert_eq!(sorted(nondominated_fronts(&pts)), common::peel_fronts(&pts));
    }

    #[test]
    fn ranks_and_crowding_assigned(pts in points()) {
        let pop: Vec<Individual> = pts.iter().map(|&o| Individual::new(Permutation::identity(1), o)).collect();
        let fs = fast_nondominated_sort(pop, CrowdingMode::Unnormalized);
        prop_assert_eq!(fs.fronts.iter().map(Vec::len).sum::<usize>(), pts.len());
        for (r, front) in fs.fronts.iter().enumerate() {
            for ind in front {
                prop_assert_eq!(ind.rank, r + 1);
                prop_assert!(ind.crowding >= 0.0);
            }
            if front.len() <= 2 {
                prop_assert!(front.iter().all(|i| i.crowding == f64::INFINITY));
            }
            // No member of a later front dominates a member of this one.
            for later in &fs.fronts[r + 1..] {
                for a in later {
                    prop_assert!(front.iter().all(|b| !dominates(&a.obj, &b.obj)));
                }
            }
        }
    }

    #[test]
    fn dominance_relation(a in (0u64..6, 0u32..6), b in (0u64..6, 0u32..6), c in (0u64..6, 0u32..6)) {
        let [a, b, c] = [a, b, c].map(|(f, e)| Objectives::new(f, e as f64));
        prop_assert!(!dominates(&a, &a));
        prop_assert!(!(dominates(&a, &b) && dominates(&b, &a)));
        if dominates(&a, &b) && dominates(&b, &c) {
            prop_assert!(dominates(&a, &c));
        }
        prop_assert_eq!(dominates(&a, &b), common::dominates_ref(&a, &b));
    }

    #[test]
    fn boundary_crowding_infinite(pts in points()) {
        for mode in [CrowdingMode::Unnormalized, CrowdingMode::Normalized] {
            for front in nondominated_fronts(&pts) {
                let fp: Vec<_> = front.iter().map(|&i| pts[i]).collect();
                let d = crowding_distances(&fp, mode);
                let infinite = d.iter().filter(|x| x.is_infinite()).count();
                prop_assert!(infinite >= fp.len().min(2));
                prop_assert!(d.iter().all(|x| !x.is_nan()));
            }
        }
    }
}
