//! Benchmark campaigns and report formats.
//!
//! A campaign solves each instance several times, merges the returned fronts
//! into one non-dominated set and reports its two extreme points: FT-best
//! (lowest flowtime, `FT1`/`EC1`) and EC-best (lowest energy, `FT2`/`EC2`),
//! together with `(FT2 - FT1) / FT1` and `(EC1 - EC2) / EC1` in percent.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{parse_taillard_all, read_text, Instance, Permutation};
use crate::nsga2::{evolve, RunConfig};
use crate::objectives::Objectives;
use crate::pareto::{dedup_by_objectives, first_front, Individual};

/// `(FT-best, EC-best)` of a non-empty front. Ties on the primary objective
/// go to the better secondary objective.
pub fn extreme_points(front: &[Individual]) -> Result<(Objectives, Objectives)> {
    let points: Vec<Objectives> = front.iter().map(|i| i.obj).collect();
    extreme_points_of(&points)
}

pub fn extreme_points_of(points: &[Objectives]) -> Result<(Objectives, Objectives)> {
    let ft_best = points
        .iter()
        .min_by(|a, b| {
            a.flowtime
                .cmp(&b.flowtime)
                .then(a.energy.total_cmp(&b.energy))
        })
        .ok_or_else(|| Error::contract("extreme points of an empty front"))?;
    let ec_best = points
        .iter()
        .min_by(|a, b| {
            a.energy
                .total_cmp(&b.energy)
                .then(a.flowtime.cmp(&b.flowtime))
        })
        .expect("non-empty");
    Ok((*ft_best, *ec_best))
}

/// `(100 (ft2 - ft1) / ft1, 100 (ec1 - ec2) / ec1)`, unrounded.
pub fn percent_diffs(ft1: f64, ec1: f64, ft2: f64, ec2: f64) -> Result<(f64, f64)> {
    if ft1.is_nan() || ec1.is_nan() || ft1 <= 0.0 || ec1 <= 0.0 {
        return Err(Error::contract(format!(
            "percent differences need positive FT1 and EC1 (got {ft1}, {ec1})"
        )));
    }
    Ok((100.0 * (ft2 - ft1) / ft1, 100.0 * (ec1 - ec2) / ec1))
}

/// One line of a benchmark report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub problem: String,
    pub dataset: usize,
    pub ft1: u64,
    pub ec1: f64,
    pub ft2: u64,
    pub ec2: f64,
    pub pct_ft: f64,
    pub pct_ec: f64,
}

impl BenchRecord {
    pub fn from_extremes(
        problem: &str,
        dataset: usize,
        ft_best: Objectives,
        ec_best: Objectives,
    ) -> Result<Self> {
        let (ft1, ec1, ft2, ec2) = (
            ft_best.flowtime,
            ft_best.energy,
            ec_best.flowtime,
            ec_best.energy,
        );
        // A front with zero standby energy everywhere has nothing to trade.
        let (pct_ft, pct_ec) = if ec1 == 0.0 {
            let (pct_ft, _) = percent_diffs(ft1 as f64, 1.0, ft2 as f64, 1.0)?;
            (pct_ft, 0.0)
        } else {
            percent_diffs(ft1 as f64, ec1, ft2 as f64, ec2)?
        };
        Ok(BenchRecord {
            problem: problem.to_string(),
            dataset,
            ft1,
            ec1,
            ft2,
            ec2,
            pct_ft,
            pct_ec,
        })
    }
}

/// An instance queued for benchmarking.
#[derive(Debug, Clone)]
pub struct BenchInstance {
    pub problem: String,
    pub dataset: usize,
    pub instance: Instance,
}

/// `Ta{jobs}x{machines}`.
pub fn problem_label(instance: &Instance) -> String {
    format!("Ta{}x{}", instance.n_jobs(), instance.n_machines())
}

/// Where fixed powers for Taillard instances come from.
#[derive(Debug, Clone, PartialEq)]
pub enum PowerSource {
    /// Prefix of the built-in 20-machine list.
    Builtin,
    /// Explicit values; the first `m` are used.
    Values(Vec<f64>),
}

impl PowerSource {
    pub fn powers_for(&self, n_machines: usize) -> Result<Vec<f64>> {
        match self {
            PowerSource::Builtin => crate::instance::default_powers(n_machines),
            PowerSource::Values(v) if v.len() >= n_machines => Ok(v[..n_machines].to_vec()),
            PowerSource::Values(v) => Err(Error::contract(format!(
                "{} power values supplied, instance has {n_machines} machines",
                v.len()
            ))),
        }
    }
}

/// Loads every block of each Taillard file. `indices` (1-based) restricts
/// the blocks taken from each file; empty means all.
pub fn load_bench_instances(
    paths: &[PathBuf],
    indices: &[usize],
    powers: &PowerSource,
) -> Result<Vec<BenchInstance>> {
    let mut out = Vec::new();
    for path in paths {
        let text = read_text(path)?;
        let blocks = parse_taillard_all(&text)?;
        for (k, block) in blocks.iter().enumerate() {
            let dataset = k + 1;
            if !indices.is_empty() && !indices.contains(&dataset) {
                continue;
            }
            let instance = block.with_powers(powers.powers_for(block.n_machines)?)?;
            out.push(BenchInstance {
                problem: problem_label(&instance),
                dataset,
                instance,
            });
        }
        for &i in indices {
            if i == 0 || i > blocks.len() {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    available: blocks.len(),
                });
            }
        }
    }
    Ok(out)
}

/// Seed of repeat `r` under root seed `seed`.
pub fn repeat_seed(seed: u64, r: usize) -> u64 {
    seed.wrapping_add(r as u64)
}

/// Runs `repeats` seeded solves and returns their merged rank-1 front.
pub fn solve_repeated(
    instance: &Instance,
    config: &RunConfig,
    repeats: usize,
) -> Result<Vec<Individual>> {
    if repeats == 0 {
        return Err(Error::contract("repeats must be at least 1"));
    }
    let fronts = (0..repeats)
        .into_par_iter()
        .map(|r| {
            let cfg = RunConfig {
                seed: repeat_seed(config.seed, r),
                ..config.clone()
            };
            evolve(instance, &cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(merge_fronts(fronts))
}

/// Union of fronts reduced to its non-dominated, objective-distinct members,
/// sorted by flowtime.
pub fn merge_fronts(fronts: Vec<Vec<Individual>>) -> Vec<Individual> {
    let all: Vec<Individual> = fronts.into_iter().flatten().collect();
    let points: Vec<Objectives> = all.iter().map(|i| i.obj).collect();
    let keep = first_front(&points);
    let mut slots: Vec<Option<Individual>> = all.into_iter().map(Some).collect();
    let mut merged =
        dedup_by_objectives(keep.into_iter().filter_map(|i| slots[i].take()).collect());
    merged.sort_by(|a, b| {
        a.obj
            .flowtime
            .cmp(&b.obj.flowtime)
            .then(a.obj.energy.total_cmp(&b.obj.energy))
    });
    merged
}

/// Mean percentage differences of one problem size, or of all sizes
/// sharing a job count (`problem` = `Ta20` etc.).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AverageRow {
    pub problem: String,
    pub datasets: usize,
    pub pct_ft: f64,
    pub pct_ec: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
    pub averages: Vec<AverageRow>,
    pub overall: Vec<AverageRow>,
}

/// Solves every instance and assembles the report, ordered by
/// (problem label, dataset).
pub fn run_benchmark(
    instances: &[BenchInstance],
    config: &RunConfig,
    repeats: usize,
) -> Result<BenchReport> {
    config.validate()?;
    let mut records = instances
        .iter()
        .map(|b| {
            let front = solve_repeated(&b.instance, config, repeats)?;
            let (ft_best, ec_best) = extreme_points(&front)?;
            BenchRecord::from_extremes(&b.problem, b.dataset, ft_best, ec_best)
        })
        .collect::<Result<Vec<_>>>()?;
    sort_records(&mut records);
    Ok(report_from_records(records))
}

fn label_key(problem: &str) -> (u64, u64, String) {
    let dims = problem
        .trim_start_matches(|c: char| !c.is_ascii_digit())
        .split(|c: char| !c.is_ascii_digit())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<u64>().unwrap_or(u64::MAX))
        .collect::<Vec<_>>();
    (
        dims.first().copied().unwrap_or(u64::MAX),
        dims.get(1).copied().unwrap_or(u64::MAX),
        problem.to_string(),
    )
}

pub fn sort_records(records: &mut [BenchRecord]) {
    records.sort_by(|a, b| {
        label_key(&a.problem)
            .cmp(&label_key(&b.problem))
            .then(a.dataset.cmp(&b.dataset))
    });
}

/// Per-size averages and per-job-count overall averages of `records`.
/// Overall rows average the per-size averages.
pub fn report_from_records(records: Vec<BenchRecord>) -> BenchReport {
    let averages = aggregate(&records);
    let mut by_jobs: BTreeMap<(u64, String), Vec<&AverageRow>> = BTreeMap::new();
    for row in &averages {
        let (jobs, _, _) = label_key(&row.problem);
        let prefix = row
            .problem
            .split('x')
            .next()
            .unwrap_or(&row.problem)
            .to_string();
        by_jobs.entry((jobs, prefix)).or_default().push(row);
    }
    let overall = by_jobs
        .into_iter()
        .map(|((_, prefix), rows)| AverageRow {
            problem: prefix,
            datasets: rows.iter().map(|r| r.datasets).sum(),
            pct_ft: rows.iter().map(|r| r.pct_ft).sum::<f64>() / rows.len() as f64,
            pct_ec: rows.iter().map(|r| r.pct_ec).sum::<f64>() / rows.len() as f64,
        })
        .collect();
    BenchReport {
        records,
        averages,
        overall,
    }
}

/// Mean `pct_ft` / `pct_ec` per problem label, in label order.
pub fn aggregate(records: &[BenchRecord]) -> Vec<AverageRow> {
    let mut groups: BTreeMap<(u64, u64, String), Vec<&BenchRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(label_key(&r.problem)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((_, _, problem), rs)| AverageRow {
            problem,
            datasets: rs.len(),
            pct_ft: rs.iter().map(|r| r.pct_ft).sum::<f64>() / rs.len() as f64,
            pct_ec: rs.iter().map(|r| r.pct_ec).sum::<f64>() / rs.len() as f64,
        })
        .collect()
}

pub const FRONT_CSV_HEADER: &str = "sequence,flowtime,energy_whr";

/// One row of a front file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontRow {
    /// Dash-separated 1-based job ids.
    pub sequence: String,
    pub flowtime: u64,
    pub energy_whr: f64,
}

impl FrontRow {
    pub fn from_individual(ind: &Individual) -> Self {
        FrontRow {
            sequence: ind.perm.to_one_based(),
            flowtime: ind.obj.flowtime,
            energy_whr: ind.obj.energy,
        }
    }

    pub fn permutation(&self) -> Result<Permutation> {
        Permutation::from_one_based(&self.sequence)
    }
}

/// Front as CSV. Energy is written with round-trip precision.
pub fn front_to_csv(front: &[Individual]) -> String {
    let mut out = String::from(FRONT_CSV_HEADER);
    out.push('\n');
    for ind in front {
        let row = FrontRow::from_individual(ind);
        out.push_str(&format!(
            "{},{},{}\n",
            row.sequence, row.flowtime, row.energy_whr
        ));
    }
    out
}

pub fn front_to_json(front: &[Individual]) -> Result<String> {
    let rows: Vec<FrontRow> = front.iter().map(FrontRow::from_individual).collect();
    Ok(serde_json::to_string_pretty(&rows)?)
}

pub fn parse_front_csv(text: &str) -> Result<Vec<FrontRow>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers()?.iter().collect::<Vec<_>>().join(",");
    if header != FRONT_CSV_HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header {FRONT_CSV_HEADER:?}, got {header:?}"),
        });
    }
    Ok(reader
        .deserialize()
        .collect::<std::result::Result<Vec<FrontRow>, _>>()?)
}

pub const RECORD_CSV_HEADER: &str = "problem,dataset,ft1,ec1,ft2,ec2,pct_ft,pct_ec";

/// Benchmark records as CSV; percentages rounded to two decimals.
pub fn records_to_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from(RECORD_CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{:.2},{:.2}\n",
            r.problem, r.dataset, r.ft1, r.ec1, r.ft2, r.ec2, r.pct_ft, r.pct_ec
        ));
    }
    out
}

pub fn parse_records_csv(text: &str) -> Result<Vec<BenchRecord>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    Ok(reader
        .deserialize()
        .collect::<std::result::Result<Vec<BenchRecord>, _>>()?)
}

pub fn averages_to_csv(report: &BenchReport) -> String {
    let mut out = String::from("problem,datasets,avg_pct_ft,avg_pct_ec\n");
    for row in report.averages.iter().chain(&report.overall) {
        out.push_str(&format!(
            "{},{},{:.2},{:.2}\n",
            row.problem, row.datasets, row.pct_ft, row.pct_ec
        ));
    }
    out
}

/// Writes `contents`, creating parent directories.
pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ind(f: u64, e: f64) -> Individual {
        Individual::new(Permutation::identity(1), Objectives::new(f, e))
    }

    #[test]
    fn extremes_of_published_front() {
        let front: Vec<_> = [
            (909, 1348.7),
            (910, 1309.8),
            (913, 1290.4),
            (915, 1290.4),
            (916, 1207.8),
            (932, 1145.8),
        ]
        .iter()
        .map(|&(f, e)| ind(f, e))
        .collect();
        let (a, b) = extreme_points(&front).unwrap();
        assert_eq!(a, Objectives::new(909, 1348.7));
        assert_eq!(b, Objectives::new(932, 1145.8));
    }

    #[test]
    fn extremes_edge_cases() {
        let (a, b) = extreme_points(&[ind(5, 5.0)]).unwrap();
        assert_eq!(a, b);
        let (a, _) = extreme_points(&[ind(5, 9.0), ind(5, 3.0)]).unwrap();
        assert_eq!(a, Objectives::new(5, 3.0));
        assert!(extreme_points(&[]).is_err());
    }

    #[test]
    fn percent_diff_rows() {
        let (f, e) = percent_diffs(14502.0, 13890.0, 14650.0, 12433.0).unwrap();
        assert_eq!(
            (format!("{f:.2}"), format!("{e:.2}")),
            ("1.02".into(), "10.49".into())
        );
        let (f, e) = percent_diffs(355213.0, 141423.0, 361950.0, 111160.0).unwrap();
        assert_eq!(
            (format!("{f:.2}"), format!("{e:.2}")),
            ("1.90".into(), "21.40".into())
        );
        assert_eq!(percent_diffs(7.0, 3.0, 7.0, 3.0).unwrap(), (0.0, 0.0));
        assert!(percent_diffs(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(percent_diffs(1.0, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn records_round_trip_through_csv() {
        let r = BenchRecord::from_extremes(
            "Ta20x5",
            3,
            Objectives::new(100, 50.0),
            Objectives::new(110, 40.0),
        )
        .unwrap();
        let parsed = parse_records_csv(&records_to_csv(std::slice::from_ref(&r))).unwrap();
        assert_eq!(parsed[0].problem, "Ta20x5");
        assert_eq!(parsed[0].pct_ft, 10.0);
        assert_eq!(parsed[0].pct_ec, 20.0);
    }

    #[test]
    fn aggregation_orders_labels_numerically() {
        let mk = |p: &str, d, f, e| BenchRecord {
            problem: p.into(),
            dataset: d,
            ft1: 1,
            ec1: 1.0,
            ft2: 1,
            ec2: 1.0,
            pct_ft: f,
            pct_ec: e,
        };
        let mut recs = vec![
            mk("Ta100x5", 1, 1.0, 2.0),
            mk("Ta20x10", 1, 3.0, 4.0),
            mk("Ta20x5", 2, 5.0, 6.0),
            mk("Ta20x5", 1, 7.0, 8.0),
        ];
        sort_records(&mut recs);
        let labels: Vec<_> = recs
            .iter()
            .map(|r| (r.problem.as_str(), r.dataset))
            .collect();
        assert_eq!(
            labels,
            vec![("Ta20x5", 1), ("Ta20x5", 2), ("Ta20x10", 1), ("Ta100x5", 1)]
        );
        let report = report_from_records(recs);
        assert_eq!(report.averages[0].pct_ft, 6.0);
        assert_eq!(report.overall[0].problem, "Ta20");
        assert_eq!(report.overall[0].pct_ft, (6.0 + 3.0) / 2.0);
        assert_eq!(report.overall[1].problem, "Ta100");
    }

    #[test]
    fn merged_front_is_nondominated() {
        let merged = merge_fronts(vec![
            vec![ind(1, 9.0), ind(5, 5.0)],
            vec![ind(4, 4.0), ind(1, 9.0), ind(9, 1.0)],
        ]);
        let pts: Vec<_> = merged
            .iter()
            .map(|i| (i.obj.flowtime, i.obj.energy))
            .collect();
        assert_eq!(pts, vec![(1, 9.0), (4, 4.0), (9, 1.0)]);
    }
}
