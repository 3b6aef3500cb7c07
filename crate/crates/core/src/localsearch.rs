//! Neighbourhood operators and the variable neighbourhood descent (VND)
//! applied to rank-1 solutions between generations.
//!
//! Three operators cycle: two random swaps, two random segment reversals, and
//! ten random insertion moves. Each step samples the current operator's
//! neighbours, keeps the non-dominated ones, picks the most isolated by
//! crowding distance and accepts it only if it dominates the incumbent. An
//! accepted move recentres the search and keeps the operator; a rejected one
//! advances to the next operator. The search stops after three consecutive
//! rejections or `max_iters` steps.

use rand::Rng;

use crate::instance::Permutation;
use crate::objectives::Evaluator;
use crate::pareto::{crowding_distances, dominates, first_front, CrowdingMode, Individual};

/// Number of neighbours produced by the insertion operator.
pub const INSERTION_NEIGHBOURS: usize = 10;

/// Neighbourhood operators, indexed 0..3 in cycling order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operator {
    Swap,
    Reversion,
    Insertion,
}

impl Operator {
    pub fn from_index(a: usize) -> Self {
        match a % 3 {
            0 => Operator::Swap,
            1 => Operator::Reversion,
            _ => Operator::Insertion,
        }
    }

    pub fn apply<R: Rng + ?Sized>(self, x: &Permutation, rng: &mut R) -> Vec<Permutation> {
        match self {
            Operator::Swap => op_swap(x, rng).into(),
            Operator::Reversion => op_reversion(x, rng).into(),
            Operator::Insertion => op_neighborhood(x, rng),
        }
    }
}

/// Exchanges positions `i` and `j`.
pub fn swap_positions(x: &Permutation, i: usize, j: usize) -> Permutation {
    let mut order = x.as_slice().to_vec();
    order.swap(i, j);
    Permutation::from_vec_unchecked(order)
}

/// Reverses positions `start..end`.
pub fn reverse_segment(x: &Permutation, start: usize, end: usize) -> Permutation {
    let mut order = x.as_slice().to_vec();
    order[start..end].reverse();
    Permutation::from_vec_unchecked(order)
}

/// Removes the job at `from` and reinserts it so that it ends up at `to`.
pub fn insert_move(x: &Permutation, from: usize, to: usize) -> Permutation {
    let mut order = x.as_slice().to_vec();
    let job = order.remove(from);
    order.insert(to, job);
    Permutation::from_vec_unchecked(order)
}

fn distinct_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (usize, usize) {
    let i = rng.gen_range(0..n);
    let mut j = rng.gen_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    (i, j)
}

/// Two independent random swaps of `x`.
pub fn op_swap<R: Rng + ?Sized>(x: &Permutation, rng: &mut R) -> [Permutation; 2] {
    if x.len() < 2 {
        return [x.clone(), x.clone()];
    }
    std::array::from_fn(|_| {
        let (i, j) = distinct_pair(x.len(), rng);
        swap_positions(x, i, j)
    })
}

/// Two independent reversals of random segments of length at least two.
pub fn op_reversion<R: Rng + ?Sized>(x: &Permutation, rng: &mut R) -> [Permutation; 2] {
    let n = x.len();
    if n < 2 {
        return [x.clone(), x.clone()];
    }
    std::array::from_fn(|_| {
        let start = rng.gen_range(0..n - 1);
        let end = rng.gen_range(start + 2..=n);
        reverse_segment(x, start, end)
    })
}

/// Ten random insertion moves. `(from, to)` pairs are distinct while the
/// `n(n-1)` possible pairs last.
pub fn op_neighborhood<R: Rng + ?Sized>(x: &Permutation, rng: &mut R) -> Vec<Permutation> {
    let n = x.len();
    if n < 2 {
        return vec![x.clone(); INSERTION_NEIGHBOURS];
    }
    let total_pairs = n * (n - 1);
    let mut used: Vec<(usize, usize)> = Vec::with_capacity(INSERTION_NEIGHBOURS);
    (0..INSERTION_NEIGHBOURS)
        .map(|_| {
            if used.len() == total_pairs {
                used.clear();
            }
            let pair = loop {
                let pair = distinct_pair(n, rng);
                if !used.contains(&pair) {
                    break pair;
                }
            };
            used.push(pair);
            insert_move(x, pair.0, pair.1)
        })
        .collect()
}

/// Search state of one VND run.
#[derive(Debug, Clone)]
pub struct LsState {
    pub best: Individual,
    /// Current operator index.
    pub action: usize,
    pub prev_action: usize,
    /// Number of rejected steps so far.
    pub flag: usize,
    pub iteration: usize,
    /// Rejections since the last accepted move.
    pub failures: usize,
}

impl LsState {
    pub fn new(x0: Individual) -> Self {
        LsState {
            best: x0,
            action: 0,
            prev_action: 0,
            flag: 0,
            iteration: 0,
            failures: 0,
        }
    }

    /// Every operator has failed in a row since the last improvement.
    pub fn exhausted(&self) -> bool {
        self.failures >= 3
    }

    /// One VND step. Returns true when the incumbent improved.
    pub fn step<R: Rng + ?Sized>(
        &mut self,
        eval: &Evaluator<'_>,
        mode: CrowdingMode,
        rng: &mut R,
    ) -> bool {
        let centre = &self.best;
        let mut pool: Vec<Individual> = Operator::from_index(self.action)
            .apply(&centre.perm, rng)
            .into_iter()
            .map(|p| {
                let obj = eval.evaluate_order(p.as_slice());
                Individual::new(p, obj)
            })
            .collect();
        pool.push(centre.clone());

        let points: Vec<_> = pool.iter().map(|ind| ind.obj).collect();
        let survivors = first_front(&points);
        let pick = if survivors.len() == 1 {
            survivors[0]
        } else {
            let front: Vec<_> = survivors.iter().map(|&i| points[i]).collect();
            let d = crowding_distances(&front, mode);
            let mut best = 0;
            for k in 1..d.len() {
                if d[k] > d[best] {
                    best = k;
                }
            }
            survivors[best]
        };

        self.iteration += 1;
        if dominates(&points[pick], &self.best.obj) {
            self.best = pool.swap_remove(pick);
            self.failures = 0;
            true
        } else {
            self.prev_action = self.action;
            self.flag += 1;
            self.action = self.flag % 3;
            self.failures += 1;
            false
        }
    }
}

/// Runs VND from `x0`. The result is `x0` itself or a solution dominating it.
pub fn vnd_local_search<R: Rng + ?Sized>(
    x0: &Individual,
    eval: &Evaluator<'_>,
    max_iters: usize,
    mode: CrowdingMode,
    rng: &mut R,
) -> Individual {
    let mut state = LsState::new(x0.clone());
    while state.iteration < max_iters && !state.exhausted() {
        state.step(eval, mode, rng);
    }
    state.best
}
