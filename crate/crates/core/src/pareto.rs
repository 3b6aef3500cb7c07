//! Pareto dominance, fast non-dominated sorting and crowding distance.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::instance::Permutation;
use crate::objectives::Objectives;

/// A job order together with its objectives and NSGA-II bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub perm: Permutation,
    pub obj: Objectives,
    /// 1 = non-dominated; 0 until sorted.
    pub rank: usize,
    pub crowding: f64,
}

impl Individual {
    pub fn new(perm: Permutation, obj: Objectives) -> Self {
        Individual {
            perm,
            obj,
            rank: 0,
            crowding: 0.0,
        }
    }
}

/// How crowding distance treats objective scales.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CrowdingMode {
    /// Raw sum of neighbour gaps over objectives.
    #[default]
    Unnormalized,
    /// Each objective's gap divided by that objective's range in the front.
    Normalized,
}

/// `a` dominates `b`: no worse in both objectives and better in at least one.
pub fn dominates(a: &Objectives, b: &Objectives) -> bool {
    let no_worse = a.flowtime <= b.flowtime && a.energy <= b.energy;
    let better = a.flowtime < b.flowtime || a.energy < b.energy;
    no_worse && better
}

/// Ranked fronts; `fronts[0]` holds the rank-1 members.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FrontSet {
    pub fronts: Vec<Vec<Individual>>,
}

impl FrontSet {
    pub fn first(&self) -> &[Individual] {
        self.fronts.first().map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn len(&self) -> usize {
        self.fronts.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.fronts.is_empty()
    }
}

/// Deb's fast non-dominated sort over objective vectors. Returns indices
/// grouped by front, each group in ascending input order.
pub fn nondominated_fronts(points: &[Objectives]) -> Vec<Vec<usize>> {
    let n = points.len();
    // dominated[p]: the points p dominates; counts[p]: how many dominate p.
    let mut dominated: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut counts = vec![0usize; n];
    for p in 0..n {
        for q in (p + 1)..n {
            if dominates(&points[p], &points[q]) {
                dominated[p].push(q);
                counts[q] += 1;
            } else if dominates(&points[q], &points[p]) {
                dominated[q].push(p);
                counts[p] += 1;
            }
        }
    }

    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&p| counts[p] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &p in &current {
            for &q in &dominated[p] {
                counts[q] -= 1;
                if counts[q] == 0 {
                    next.push(q);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Indices of the non-dominated points (rank 1), in input order.
pub fn first_front(points: &[Objectives]) -> Vec<usize> {
    (0..points.len())
        .filter(|&p| !points.iter().any(|q| dominates(q, &points[p])))
        .collect()
}

/// Sorts a population into ranked fronts and sets each member's rank.
/// Crowding distance is assigned within each front.
pub fn fast_nondominated_sort(pop: Vec<Individual>, mode: CrowdingMode) -> FrontSet {
    let points: Vec<Objectives> = pop.iter().map(|ind| ind.obj).collect();
    let index_fronts = nondominated_fronts(&points);
    let mut slots: Vec<Option<Individual>> = pop.into_iter().map(Some).collect();
    let fronts = index_fronts
        .iter()
        .enumerate()
        .map(|(k, idx)| {
            let mut front: Vec<Individual> = idx
                .iter()
                .map(|&i| {
                    let mut ind = slots[i].take().expect("each index appears once");
                    ind.rank = k + 1;
                    ind
                })
                .collect();
            assign_crowding(&mut front, mode);
            front
        })
        .collect();
    FrontSet { fronts }
}

/// Crowding distance of each point of one front. Members at either end of
/// any objective's ordering get +infinity; interior members sum
/// `|f(next) - f(prev)|` over objectives.
#[allow(clippy::needless_range_loop)]
pub fn crowding_distances(front: &[Objectives], mode: CrowdingMode) -> Vec<f64> {
    let n = front.len();
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let mut distance = vec![0.0; n];
    let values: Vec<[f64; 2]> = front.iter().map(Objectives::as_array).collect();
    for h in 0..2 {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[a][h].total_cmp(&values[b][h]));
        let lo = values[order[0]][h];
        let hi = values[order[n - 1]][h];
        distance[order[0]] = f64::INFINITY;
        distance[order[n - 1]] = f64::INFINITY;
        let scale = match mode {
            CrowdingMode::Unnormalized => 1.0,
            CrowdingMode::Normalized if hi > lo => 1.0 / (hi - lo),
            CrowdingMode::Normalized => 0.0,
        };
        for k in 1..n - 1 {
            let gap = (values[order[k + 1]][h] - values[order[k - 1]][h]).abs();
            distance[order[k]] += gap * scale;
        }
    }
    distance
}

/// Writes crowding distances into a front of individuals.
pub fn assign_crowding(front: &mut [Individual], mode: CrowdingMode) {
    let points: Vec<Objectives> = front.iter().map(|ind| ind.obj).collect();
    for (ind, d) in front.iter_mut().zip(crowding_distances(&points, mode)) {
        ind.crowding = d;
    }
}

/// Crowded-comparison order: lower rank first, then larger crowding.
/// `Ordering::Less` means `a` is preferred; equal elements compare `Equal`
/// so stable sorts keep input order.
pub fn crowded_compare(a: &Individual, b: &Individual) -> Ordering {
    a.rank.cmp(&b.rank).then_with(|| {
        b.crowding
            .partial_cmp(&a.crowding)
            .unwrap_or(Ordering::Equal)
    })
}

/// The preferred of two individuals; `a` on ties.
pub fn crowded_winner<'a>(a: &'a Individual, b: &'a Individual) -> &'a Individual {
    if crowded_compare(b, a) == Ordering::Less {
        b
    } else {
        a
    }
}

/// Drops members whose objective pair repeats an earlier member's.
pub fn dedup_by_objectives(members: Vec<Individual>) -> Vec<Individual> {
    let mut out: Vec<Individual> = Vec::with_capacity(members.len());
    for ind in members {
        if !out.iter().any(|o| o.obj.same_point(&ind.obj)) {
            out.push(ind);
        }
    }
    out
}
