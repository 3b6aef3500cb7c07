//! NSGA-II generational loop with an optional local-search phase on the
//! rank-1 members of each merged population.
//!
//! One generation: binary tournaments fill a mating pool, order crossover and
//! swap mutation produce N children, parents and children are merged, the
//! merged pool's rank-1 members may be improved by VND, and the best N by
//! (rank, crowding) survive.
//!
//! Randomness comes from a single root seed. Each generation draws from its
//! own ChaCha8 streams, one for variation and one for local search, so
//! toggling local search leaves the variation stream untouched.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Instance, Permutation};
use crate::localsearch::vnd_local_search;
use crate::objectives::{Evaluator, DEFAULT_KAPPA};
use crate::pareto::{
    crowded_compare, crowded_winner, dedup_by_objectives, dominates, fast_nondominated_sort,
    first_front, CrowdingMode, Individual,
};

pub type Population = Vec<Individual>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub pop_size: usize,
    pub generations: usize,
    pub p_crossover: f64,
    pub p_mutation: f64,
    pub seed: u64,
    pub ls_enabled: bool,
    /// VND step budget per local-search call.
    pub ls_max_iters: usize,
    /// Rank-1 members improved per generation, most isolated first.
    pub ls_front_cap: usize,
    pub kappa: f64,
    pub crowding: CrowdingMode,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            pop_size: 200,
            generations: 50,
            p_crossover: 0.6,
            p_mutation: 0.05,
            seed: 0,
            ls_enabled: true,
            ls_max_iters: 15,
            ls_front_cap: 10,
            kappa: DEFAULT_KAPPA,
            crowding: CrowdingMode::Unnormalized,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.pop_size < 2 || !self.pop_size.is_multiple_of(2) {
            return Err(Error::contract(format!(
                "population size must be even and at least 2, got {}",
                self.pop_size
            )));
        }
        for (name, p) in [
            ("crossover", self.p_crossover),
            ("mutation", self.p_mutation),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::contract(format!(
                    "{name} probability {p} outside [0, 1]"
                )));
            }
        }
        if self.ls_enabled && (self.ls_max_iters == 0 || self.ls_front_cap == 0) {
            return Err(Error::contract("local-search budget must be positive"));
        }
        if !(self.kappa.is_finite() && self.kappa > 0.0) {
            return Err(Error::contract(format!(
                "kappa must be positive, got {}",
                self.kappa
            )));
        }
        Ok(())
    }
}

const STREAM_INIT: u64 = 0;
const STREAM_VARIATION: u64 = 1;
const STREAM_LOCAL_SEARCH: u64 = 2;

fn stream(seed: u64, generation: usize, purpose: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((generation as u64) << 2) | purpose);
    rng
}

/// Sorts `pool` and returns it front by front with rank and crowding set.
pub fn rank_population(pool: Population, mode: CrowdingMode) -> Population {
    fast_nondominated_sort(pool, mode)
        .fronts
        .into_iter()
        .flatten()
        .collect()
}

/// `pop_size` uniformly random orders, evaluated and ranked.
pub fn init_population(instance: &Instance, config: &RunConfig) -> Result<Population> {
    config.validate()?;
    let eval = Evaluator::with_kappa(instance, config.kappa);
    let mut rng = stream(config.seed, 0, STREAM_INIT);
    Ok(random_population(&eval, config, &mut rng))
}

fn random_population(eval: &Evaluator<'_>, config: &RunConfig, rng: &mut ChaCha8Rng) -> Population {
    let n = eval.instance().n_jobs();
    let orders: Vec<Vec<usize>> = (0..config.pop_size)
        .map(|_| {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(rng);
            order
        })
        .collect();
    rank_population(evaluate_all(eval, orders), config.crowding)
}

fn evaluate_all(eval: &Evaluator<'_>, orders: Vec<Vec<usize>>) -> Population {
    orders
        .into_par_iter()
        .map(|order| {
            let obj = eval.evaluate_order(&order);
            Individual::new(Permutation::from_vec_unchecked(order), obj)
        })
        .collect()
}

/// Binary tournament between two distinct random members.
pub fn tournament_select<'a, R: Rng + ?Sized>(
    pop: &'a [Individual],
    rng: &mut R,
) -> &'a Individual {
    if pop.len() == 1 {
        return &pop[0];
    }
    let i = rng.gen_range(0..pop.len());
    let mut j = rng.gen_range(0..pop.len() - 1);
    if j >= i {
        j += 1;
    }
    crowded_winner(&pop[i], &pop[j])
}

/// Order crossover with an explicit cut `[start, end)`.
pub fn order_crossover_at(
    parent_a: &Permutation,
    parent_b: &Permutation,
    start: usize,
    end: usize,
) -> Result<(Permutation, Permutation)> {
    if parent_a.len() != parent_b.len() {
        return Err(Error::contract(format!(
            "crossover parents differ in length ({} vs {})",
            parent_a.len(),
            parent_b.len()
        )));
    }
    if start > end || end > parent_a.len() {
        return Err(Error::contract(format!("bad cut [{start}, {end})")));
    }
    Ok((
        ox_child(parent_a.as_slice(), parent_b.as_slice(), start, end),
        ox_child(parent_b.as_slice(), parent_a.as_slice(), start, end),
    ))
}

fn ox_child(keep: &[usize], fill: &[usize], start: usize, end: usize) -> Permutation {
    let n = keep.len();
    let mut child = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for k in start..end {
        child[k] = keep[k];
        used[keep[k]] = true;
    }
    let mut slot = end % n.max(1);
    for k in 0..n {
        let job = fill[(end + k) % n];
        if used[job] {
            continue;
        }
        child[slot] = job;
        used[job] = true;
        slot = (slot + 1) % n;
    }
    Permutation::from_vec_unchecked(child)
}

/// Order crossover (OX1) with a random non-empty cut segment.
pub fn order_crossover<R: Rng + ?Sized>(
    parent_a: &Permutation,
    parent_b: &Permutation,
    rng: &mut R,
) -> Result<(Permutation, Permutation)> {
    let n = parent_a.len();
    if n < 2 {
        return order_crossover_at(parent_a, parent_b, 0, n);
    }
    let start = rng.gen_range(0..n);
    let end = rng.gen_range(start + 1..=n);
    order_crossover_at(parent_a, parent_b, start, end)
}

/// Exchanges two distinct random positions; identity below two jobs.
pub fn swap_mutation<R: Rng + ?Sized>(perm: &Permutation, rng: &mut R) -> Permutation {
    let n = perm.len();
    let mut out = perm.clone();
    if n >= 2 {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        out.as_mut_vec().swap(i, j);
    }
    out
}

/// Produces `pop.len()` evaluated children from `pop.len() / 2` tournament pairs.
pub fn make_offspring<R: Rng + ?Sized>(
    pop: &[Individual],
    eval: &Evaluator<'_>,
    config: &RunConfig,
    rng: &mut R,
) -> Population {
    let mut orders = Vec::with_capacity(pop.len());
    for _ in 0..pop.len() / 2 {
        let a = &tournament_select(pop, rng).perm;
        let b = &tournament_select(pop, rng).perm;
        let (mut c1, mut c2) = if rng.gen_bool(config.p_crossover) {
            order_crossover(a, b, rng).expect("population members share a length")
        } else {
            (a.clone(), b.clone())
        };
        for child in [&mut c1, &mut c2] {
            if rng.gen_bool(config.p_mutation) {
                *child = swap_mutation(child, rng);
            }
        }
        orders.push(c1.into_vec());
        orders.push(c2.into_vec());
    }
    evaluate_all(eval, orders)
}

/// Keeps the best `n` of `pool`: whole fronts while they fit, then the
/// most isolated members of the first front that does not.
pub fn select_survivors(pool: Population, n: usize, mode: CrowdingMode) -> Population {
    let mut next = Vec::with_capacity(n);
    for mut front in fast_nondominated_sort(pool, mode).fronts {
        let room = n - next.len();
        if front.len() > room {
            front.sort_by(crowded_compare);
            front.truncate(room);
        }
        next.extend(front);
        if next.len() == n {
            break;
        }
    }
    next
}

/// Merges parents and offspring and keeps `parents.len()` survivors.
pub fn elite_retention(
    parents: Population,
    offspring: Population,
    mode: CrowdingMode,
) -> Population {
    let n = parents.len();
    let mut pool = parents;
    pool.extend(offspring);
    select_survivors(pool, n, mode)
}

/// Runs VND on up to `ls_front_cap` rank-1 members of `pool` (largest
/// crowding first) and swaps in every result that dominates its start.
pub fn improve_first_front<R: Rng + ?Sized>(
    pool: &mut [Individual],
    eval: &Evaluator<'_>,
    config: &RunConfig,
    rng: &mut R,
) -> usize {
    let points: Vec<_> = pool.iter().map(|ind| ind.obj).collect();
    let front = first_front(&points);
    let front_points: Vec<_> = front.iter().map(|&i| points[i]).collect();
    let crowding = crate::pareto::crowding_distances(&front_points, config.crowding);
    let mut order: Vec<usize> = (0..front.len()).collect();
    order.sort_by(|&a, &b| crowding[b].total_cmp(&crowding[a]));
    let targets: Vec<(usize, u64)> = order
        .into_iter()
        .take(config.ls_front_cap)
        .map(|k| (front[k], rng.gen()))
        .collect();

    let results: Vec<(usize, Individual)> = targets
        .par_iter()
        .map(|&(idx, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let out = vnd_local_search(
                &pool[idx],
                eval,
                config.ls_max_iters,
                config.crowding,
                &mut rng,
            );
            (idx, out)
        })
        .collect();

    let mut replaced = 0;
    for (idx, out) in results {
        if dominates(&out.obj, &pool[idx].obj) {
            pool[idx] = out;
            replaced += 1;
        }
    }
    replaced
}

/// What an observer sees after each generation.
#[derive(Debug)]
pub struct GenerationView<'a> {
    /// 1-based generation number.
    pub generation: usize,
    /// Merged parents + offspring (after local search) the survivors came from.
    pub pool: &'a [Individual],
    pub survivors: &'a [Individual],
}

/// Runs the full loop and returns the final rank-1 front, one member per
/// distinct objective pair, ordered by flowtime then energy.
pub fn evolve(instance: &Instance, config: &RunConfig) -> Result<Vec<Individual>> {
    evolve_with(instance, config, |_| {})
}

/// [`evolve`] with a per-generation observer.
pub fn evolve_with<F>(
    instance: &Instance,
    config: &RunConfig,
    mut observer: F,
) -> Result<Vec<Individual>>
where
    F: FnMut(&GenerationView<'_>),
{
    config.validate()?;
    let eval = Evaluator::with_kappa(instance, config.kappa);
    let mut pop = random_population(&eval, config, &mut stream(config.seed, 0, STREAM_INIT));

    for generation in 1..=config.generations {
        let mut rng = stream(config.seed, generation, STREAM_VARIATION);
        let offspring = make_offspring(&pop, &eval, config, &mut rng);
        let mut pool = pop;
        pool.extend(offspring);
        if config.ls_enabled {
            let mut ls_rng = stream(config.seed, generation, STREAM_LOCAL_SEARCH);
            improve_first_front(&mut pool, &eval, config, &mut ls_rng);
        }
        let snapshot = pool.clone();
        pop = select_survivors(pool, config.pop_size, config.crowding);
        observer(&GenerationView {
            generation,
            pool: &snapshot,
            survivors: &pop,
        });
    }

    Ok(final_front(pop, config.crowding))
}

/// Rank-1 members of `pop`, deduplicated by objectives and sorted by
/// (flowtime, energy), with crowding recomputed on the result.
pub fn final_front(pop: Population, mode: CrowdingMode) -> Vec<Individual> {
    let points: Vec<_> = pop.iter().map(|ind| ind.obj).collect();
    let keep = first_front(&points);
    let mut slots: Vec<Option<Individual>> = pop.into_iter().map(Some).collect();
    let front: Vec<Individual> = keep.into_iter().filter_map(|i| slots[i].take()).collect();
    let mut front = dedup_by_objectives(front);
    front.sort_by(|a, b| {
        a.obj
            .flowtime
            .cmp(&b.obj.flowtime)
            .then(a.obj.energy.total_cmp(&b.obj.energy))
    });
    for ind in &mut front {
        ind.rank = 1;
    }
    crate::pareto::assign_crowding(&mut front, mode);
    front
}
