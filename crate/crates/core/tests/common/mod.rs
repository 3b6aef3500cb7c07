#![allow(dead_code)]

use energy_flowshop::instance::{generate_instance, Instance, Permutation};
use energy_flowshop::objectives::Objectives;
use rand::seq::SliceRandom;
use rand::Rng;

pub const TWO_BY_TWO: [[u32; 2]; 2] = [[3, 4], [2, 5]];

pub fn two_by_two() -> Instance {
    Instance::new(
        TWO_BY_TWO.iter().map(|r| r.to_vec()).collect(),
        vec![600.0, 1200.0],
    )
    .unwrap()
}

pub fn random_instance<R: Rng>(rng: &mut R, max_jobs: usize, max_machines: usize) -> Instance {
    let n = rng.gen_range(1..=max_jobs);
    let m = rng.gen_range(1..=max_machines);
    generate_instance(n, m, rng.gen()).unwrap()
}

pub fn random_perm<R: Rng>(rng: &mut R, n: usize) -> Permutation {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    Permutation::new(v).unwrap()
}

/// Plain-definition dominance, kept separate from the library's.
pub fn dominates_ref(a: &Objectives, b: &Objectives) -> bool {
    let ge = a.flowtime <= b.flowtime && a.energy <= b.energy;
    ge && (a.flowtime < b.flowtime || a.energy < b.energy)
}

/// Fronts by repeated peeling of the non-dominated remainder, as sorted
/// index sets.
pub fn peel_fronts(points: &[Objectives]) -> Vec<Vec<usize>> {
    let mut left: Vec<usize> = (0..points.len()).collect();
    let mut fronts = Vec::new();
    while !left.is_empty() {
        let front: Vec<usize> = left
            .iter()
            .copied()
            .filter(|&i| !left.iter().any(|&j| dominates_ref(&points[j], &points[i])))
            .collect();
        left.retain(|i| !front.contains(i));
        fronts.push(front);
    }
    fronts
}

pub fn random_points<R: Rng>(rng: &mut R, max_len: usize) -> Vec<Objectives> {
    let len = rng.gen_range(1..=max_len);
    // Small ranges so ties and duplicates are common.
    (0..len)
        .map(|_| Objectives::new(rng.gen_range(0..12), rng.gen_range(0..12) as f64 * 0.5))
        .collect()
}

/// All orders of `n` jobs.
pub fn all_perms(n: usize) -> Vec<Permutation> {
    fn rec(prefix: &mut Vec<usize>, left: &mut Vec<usize>, out: &mut Vec<Permutation>) {
        if left.is_empty() {
            out.push(Permutation::new(prefix.clone()).unwrap());
            return;
        }
        for k in 0..left.len() {
            let j = left.remove(k);
            prefix.push(j);
            rec(prefix, left, out);
            prefix.pop();
            left.insert(k, j);
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut (0..n).collect(), &mut out);
    out
}
