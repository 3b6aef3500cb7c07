//! Taguchi L16(4^4) parameter study: the orthogonal array over generations,
//! population size, crossover and mutation probability, response tables of
//! level means, and smaller-is-better signal-to-noise ratios.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::nsga2::{evolve, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Factor {
    Gen,
    Pop,
    Crossover,
    Mutation,
}

impl Factor {
    /// Column order of the array and of the response tables.
    pub const ALL: [Factor; 4] = [
        Factor::Gen,
        Factor::Pop,
        Factor::Crossover,
        Factor::Mutation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Factor::Gen => "Gen",
            Factor::Pop => "Pop",
            Factor::Crossover => "Crossover",
            Factor::Mutation => "Mutation",
        }
    }

    fn column(self) -> usize {
        self as usize
    }
}

/// Which end of the final front a design row reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Response {
    /// Smallest flowtime on the front.
    Flowtime,
    /// Smallest energy on the front.
    Energy,
}

/// An orthogonal array with the concrete value of every level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaguchiDesign {
    /// `levels[factor][level]`, factors in [`Factor::ALL`] order.
    pub levels: [[f64; 4]; 4],
    /// Level index of each factor, per row.
    pub rows: Vec<[usize; 4]>,
}

/// Level values for generations, population, crossover and mutation.
pub const L16_LEVELS: [[f64; 4]; 4] = [
    [10.0, 25.0, 50.0, 100.0],
    [25.0, 50.0, 100.0, 200.0],
    [0.5, 0.6, 0.7, 0.8],
    [0.05, 0.06, 0.07, 0.08],
];

const L16_ROWS: [[usize; 4]; 16] = [
    [0, 0, 0, 0],
    [0, 1, 1, 1],
    [0, 2, 2, 2],
    [0, 3, 3, 3],
    [1, 0, 1, 2],
    [1, 1, 0, 3],
    [1, 2, 3, 0],
    [1, 3, 2, 1],
    [2, 0, 2, 3],
    [2, 1, 3, 2],
    [2, 2, 0, 1],
    [2, 3, 1, 0],
    [3, 0, 3, 1],
    [3, 1, 2, 0],
    [3, 2, 1, 3],
    [3, 3, 0, 2],
];

/// The 16-run array used for the NSGA-II parameter study.
pub fn build_l16() -> TaguchiDesign {
    TaguchiDesign {
        levels: L16_LEVELS,
        rows: L16_ROWS.to_vec(),
    }
}

/// Parameter values of one design row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TunedParams {
    pub generations: usize,
    pub pop_size: usize,
    pub p_crossover: f64,
    pub p_mutation: f64,
}

impl TunedParams {
    /// Overlays these parameters on `base`. Offspring come in pairs, so an
    /// odd population size runs as the next even one.
    pub fn apply(&self, base: &RunConfig) -> RunConfig {
        RunConfig {
            generations: self.generations,
            pop_size: self.pop_size + self.pop_size % 2,
            p_crossover: self.p_crossover,
            p_mutation: self.p_mutation,
            ..base.clone()
        }
    }
}

impl TaguchiDesign {
    pub fn value(&self, factor: Factor, level: usize) -> f64 {
        self.levels[factor.column()][level]
    }

    pub fn params(&self, row: usize) -> TunedParams {
        let r = self.rows[row];
        TunedParams {
            generations: self.levels[0][r[0]] as usize,
            pop_size: self.levels[1][r[1]] as usize,
            p_crossover: self.levels[2][r[2]],
            p_mutation: self.levels[3][r[3]],
        }
    }

    /// Every pair of columns shows each level pair equally often.
    pub fn is_orthogonal(&self) -> bool {
        let per_pair = self.rows.len() / 16;
        if per_pair == 0 || !self.rows.len().is_multiple_of(16) {
            return false;
        }
        for a in 0..4 {
            for b in (a + 1)..4 {
                let mut counts = [[0usize; 4]; 4];
                for r in &self.rows {
                    counts[r[a]][r[b]] += 1;
                }
                if counts.iter().flatten().any(|&c| c != per_pair) {
                    return false;
                }
            }
        }
        true
    }
}

/// Runs the solver once per design row and records the chosen response.
/// Every row uses `base.seed`; other `base` fields (local search, kappa)
/// carry over.
pub fn run_design(
    design: &TaguchiDesign,
    instance: &Instance,
    base: &RunConfig,
    response: Response,
) -> Result<Vec<f64>> {
    (0..design.rows.len())
        .into_par_iter()
        .map(|row| {
            let config = design.params(row).apply(base);
            let front = evolve(instance, &config)?;
            let best = match response {
                Response::Flowtime => front
                    .iter()
                    .map(|i| i.obj.flowtime as f64)
                    .fold(f64::INFINITY, f64::min),
                Response::Energy => front
                    .iter()
                    .map(|i| i.obj.energy)
                    .fold(f64::INFINITY, f64::min),
            };
            Ok(best)
        })
        .collect()
}

/// Level means per factor, their spread (delta) and importance rank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseTable {
    /// `means[factor][level]`.
    pub means: [[f64; 4]; 4],
    pub delta: [f64; 4],
    /// 1 = largest delta; ties go to the earlier factor.
    pub rank: [usize; 4],
}

pub fn response_table(design: &TaguchiDesign, responses: &[f64]) -> Result<ResponseTable> {
    if responses.len() != design.rows.len() || design.rows.len() != 16 {
        return Err(Error::contract(format!(
            "expected 16 responses, got {}",
            responses.len()
        )));
    }
    let mut sums = [[0.0f64; 4]; 4];
    let mut counts = [[0usize; 4]; 4];
    for (row, &y) in design.rows.iter().zip(responses) {
        for f in 0..4 {
            sums[f][row[f]] += y;
            counts[f][row[f]] += 1;
        }
    }
    let mut means = [[0.0; 4]; 4];
    let mut delta = [0.0; 4];
    for f in 0..4 {
        for l in 0..4 {
            means[f][l] = sums[f][l] / counts[f][l] as f64;
        }
        let hi = means[f].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = means[f].iter().copied().fold(f64::INFINITY, f64::min);
        delta[f] = hi - lo;
    }
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| delta[b].total_cmp(&delta[a]));
    let mut rank = [0; 4];
    for (k, &f) in order.iter().enumerate() {
        rank[f] = k + 1;
    }
    Ok(ResponseTable { means, delta, rank })
}

/// Smaller-is-better S/N ratio: `-10 log10(mean(y^2))`.
pub fn sn_ratio(responses: &[f64]) -> Result<f64> {
    if responses.is_empty() {
        return Err(Error::Domain("S/N ratio of an empty response set".into()));
    }
    if let Some(y) = responses.iter().find(|y| y.is_nan() || **y <= 0.0) {
        return Err(Error::Domain(format!(
            "S/N ratio needs positive responses, got {y}"
        )));
    }
    let mean_sq = responses.iter().map(|y| y * y).sum::<f64>() / responses.len() as f64;
    Ok(-10.0 * mean_sq.log10())
}

/// Response table of per-row S/N ratios (larger is better).
pub fn sn_table(design: &TaguchiDesign, responses: &[f64]) -> Result<ResponseTable> {
    let sn = responses
        .iter()
        .map(|&y| sn_ratio(&[y]))
        .collect::<Result<Vec<_>>>()?;
    response_table(design, &sn)
}

impl ResponseTable {
    pub fn factor_mean(&self, factor: Factor, level: usize) -> f64 {
        self.means[factor.column()][level]
    }

    pub fn factor_delta(&self, factor: Factor) -> f64 {
        self.delta[factor.column()]
    }

    pub fn factor_rank(&self, factor: Factor) -> usize {
        self.rank[factor.column()]
    }

    /// Level index chosen for `factor` under `rule`; first level on ties.
    pub fn best_level(&self, factor: Factor, rule: LevelRule) -> usize {
        let m = &self.means[factor.column()];
        let mut best = 0;
        for l in 1..4 {
            let better = match rule {
                LevelRule::LowestMean => m[l] < m[best],
                LevelRule::HighestMean => m[l] > m[best],
            };
            if better {
                best = l;
            }
        }
        best
    }

    /// CSV laid out as Level / Delta / Rank rows under factor columns.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("Level");
        for f in Factor::ALL {
            write!(out, ",{}", f.name()).unwrap();
        }
        out.push('\n');
        for l in 0..4 {
            write!(out, "{}", l + 1).unwrap();
            for f in 0..4 {
                write!(out, ",{:.2}", self.means[f][l]).unwrap();
            }
            out.push('\n');
        }
        out.push_str("Delta");
        for d in self.delta {
            write!(out, ",{d:.2}").unwrap();
        }
        out.push_str("\nRank");
        for r in self.rank {
            write!(out, ",{r}").unwrap();
        }
        out.push('\n');
        out
    }
}

/// How a level is read off a response table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LevelRule {
    /// Lowest mean response (both objectives are minimised).
    #[default]
    LowestMean,
    /// Highest mean response; reproduces the published parameter choice
    /// (population 200, 50 generations, mutation 0.05, crossover 0.6) from
    /// its own response tables.
    HighestMean,
}

/// Combines the flowtime and energy studies: the flowtime table fixes
/// generations and population, the energy table fixes crossover, and
/// mutation comes from whichever table ranks it as more important when the
/// two disagree (flowtime on a tie).
pub fn pick_best_params(
    design: &TaguchiDesign,
    ft: &ResponseTable,
    ec: &ResponseTable,
    rule: LevelRule,
) -> TunedParams {
    let pm_ft = ft.best_level(Factor::Mutation, rule);
    let pm_ec = ec.best_level(Factor::Mutation, rule);
    let pm =
        if pm_ft == pm_ec || ft.factor_rank(Factor::Mutation) <= ec.factor_rank(Factor::Mutation) {
            pm_ft
        } else {
            pm_ec
        };
    TunedParams {
        generations: design.value(Factor::Gen, ft.best_level(Factor::Gen, rule)) as usize,
        pop_size: design.value(Factor::Pop, ft.best_level(Factor::Pop, rule)) as usize,
        p_crossover: design.value(Factor::Crossover, ec.best_level(Factor::Crossover, rule)),
        p_mutation: design.value(Factor::Mutation, pm),
    }
}
