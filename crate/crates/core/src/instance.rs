//! Problem data: processing times, per-machine fixed power, and job orders.
//!
//! Two text formats are supported. Taillard's benchmark format stores a
//! machine-major matrix and carries no power data; the native format stores a
//! job-major matrix followed by one line of fixed powers:
//!
//! ```text
//! # comment
//! 2 2          <- jobs machines
//! 3 4          <- job 1, one value per machine (minutes)
//! 2 5          <- job 2
//! 600 1200     <- fixed power per machine
//! ```

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fixed power ratings for up to 20 machines, used for the Taillard sets.
pub const DEFAULT_POWERS: [f64; 20] = [
    769.0, 802.0, 1290.0, 967.0, 1166.0, 1003.0, 1211.0, 1321.0, 989.0, 1411.0, 782.0, 980.0,
    1005.0, 1333.0, 867.0, 1209.0, 781.0, 809.0, 1113.0, 977.0,
];

/// Bounds of the uniform distributions used by [`generate_instance`].
pub const PROC_TIME_RANGE: (u32, u32) = (1, 99);
pub const POWER_RANGE: (u32, u32) = (700, 1500);

/// A job processing order shared by every machine.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation(Vec<usize>);

impl Permutation {
    /// Validates that `order` is a bijection on `0..order.len()`.
    pub fn new(order: Vec<usize>) -> Result<Self> {
        if !is_bijection(&order) {
            return Err(Error::contract(format!(
                "{order:?} is not a permutation of 0..{}",
                order.len()
            )));
        }
        Ok(Permutation(order))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    /// Parses the dash-separated, 1-based form used in reports (`3-1-2`).
    pub fn from_one_based(text: &str) -> Result<Self> {
        let order = text
            .trim()
            .split('-')
            .map(|tok| match tok.trim().parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v - 1),
                _ => Err(Error::contract(format!(
                    "bad job id {tok:?} in sequence {text:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Permutation::new(order)
    }

    /// Dash-separated 1-based job ids.
    pub fn to_one_based(&self) -> String {
        let mut out = String::with_capacity(self.0.len() * 3);
        for (k, job) in self.0.iter().enumerate() {
            if k > 0 {
                out.push('-');
            }
            write!(out, "{}", job + 1).unwrap();
        }
        out
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    /// Wraps an order the caller already knows to be valid.
    pub(crate) fn from_vec_unchecked(order: Vec<usize>) -> Self {
        debug_assert!(is_bijection(&order));
        Permutation(order)
    }

    pub(crate) fn as_mut_vec(&mut self) -> &mut Vec<usize> {
        &mut self.0
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(order: Vec<usize>) -> Result<Self> {
        Permutation::new(order)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.0
    }
}

pub fn is_bijection(order: &[usize]) -> bool {
    let mut seen = vec![false; order.len()];
    for &job in order {
        match seen.get_mut(job) {
            Some(s) if !*s => *s = true,
            _ => return false,
        }
    }
    true
}

/// Processing times (minutes, job-major) plus fixed power per machine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    n_jobs: usize,
    n_machines: usize,
    proc_time: Vec<u32>,
    fixed_power: Vec<f64>,
}

impl Instance {
    /// Builds an instance from job-major rows.
    pub fn new(proc_time: Vec<Vec<u32>>, fixed_power: Vec<f64>) -> Result<Self> {
        let n_jobs = proc_time.len();
        if n_jobs == 0 {
            return Err(Error::contract("an instance needs at least one job"));
        }
        let n_machines = proc_time[0].len();
        if n_machines == 0 {
            return Err(Error::contract("an instance needs at least one machine"));
        }
        if let Some(j) = proc_time.iter().position(|row| row.len() != n_machines) {
            return Err(Error::contract(format!(
                "job {} has {} processing times, expected {n_machines}",
                j + 1,
                proc_time[j].len()
            )));
        }
        Self::from_flat(n_jobs, n_machines, proc_time.concat(), fixed_power)
    }

    /// Builds an instance from a flat job-major matrix.
    pub fn from_flat(
        n_jobs: usize,
        n_machines: usize,
        proc_time: Vec<u32>,
        fixed_power: Vec<f64>,
    ) -> Result<Self> {
        if n_jobs == 0 || n_machines == 0 {
            return Err(Error::contract(
                "an instance needs at least one job and one machine",
            ));
        }
        if proc_time.len() != n_jobs * n_machines {
            return Err(Error::contract(format!(
                "expected {} processing times, got {}",
                n_jobs * n_machines,
                proc_time.len()
            )));
        }
        if fixed_power.len() != n_machines {
            return Err(Error::contract(format!(
                "expected {n_machines} fixed powers, got {}",
                fixed_power.len()
            )));
        }
        if let Some(p) = fixed_power.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
            return Err(Error::contract(format!(
                "fixed power must be positive, got {p}"
            )));
        }
        Ok(Instance {
            n_jobs,
            n_machines,
            proc_time,
            fixed_power,
        })
    }

    pub fn n_jobs(&self) -> usize {
        self.n_jobs
    }

    pub fn n_machines(&self) -> usize {
        self.n_machines
    }

    /// Processing time of `job` on `machine` (both 0-based).
    #[inline]
    pub fn time(&self, job: usize, machine: usize) -> u32 {
        self.proc_time[job * self.n_machines + machine]
    }

    /// All processing times of one job, one per machine.
    pub fn job_row(&self, job: usize) -> &[u32] {
        &self.proc_time[job * self.n_machines..(job + 1) * self.n_machines]
    }

    pub fn fixed_power(&self) -> &[f64] {
        &self.fixed_power
    }

    /// Same processing times, different powers.
    pub fn with_powers(&self, fixed_power: Vec<f64>) -> Result<Self> {
        Self::from_flat(
            self.n_jobs,
            self.n_machines,
            self.proc_time.clone(),
            fixed_power,
        )
    }

    /// Checks that `perm` orders exactly this instance's jobs.
    pub fn check_permutation(&self, perm: &Permutation) -> Result<()> {
        if perm.len() != self.n_jobs {
            return Err(Error::contract(format!(
                "permutation has {} jobs, instance has {}",
                perm.len(),
                self.n_jobs
            )));
        }
        Ok(())
    }

    /// Renders the native text format.
    pub fn to_native(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{} {}", self.n_jobs, self.n_machines).unwrap();
        for job in 0..self.n_jobs {
            push_joined(&mut out, self.job_row(job).iter());
        }
        push_joined(&mut out, self.fixed_power.iter());
        out
    }

    /// Parses the native text format.
    pub fn from_native(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let (line_no, header) = lines.next().ok_or(Error::Parse {
            line: 0,
            message: "empty instance file".into(),
        })?;
        let dims: Vec<usize> = parse_tokens(header, line_no)?;
        let [n, m] = dims[..] else {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected \"jobs machines\", got {header:?}"),
            });
        };
        if n == 0 || m == 0 {
            return Err(Error::Parse {
                line: line_no,
                message: "jobs and machines must be positive".into(),
            });
        }

        let mut proc_time = Vec::with_capacity(n * m);
        for job in 0..n {
            let (line_no, row) = lines.next().ok_or(Error::Truncated {
                expected: n * m,
                found: proc_time.len(),
            })?;
            let values: Vec<u32> = parse_tokens(row, line_no)?;
            if values.len() != m {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("job {} lists {} times, expected {m}", job + 1, values.len()),
                });
            }
            proc_time.extend(values);
        }

        let (line_no, row) = lines.next().ok_or(Error::Parse {
            line: 0,
            message: "missing fixed-power line".into(),
        })?;
        let powers: Vec<f64> = parse_tokens(row, line_no)?;
        if powers.len() != m {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {m} fixed powers, got {}", powers.len()),
            });
        }
        if let Some((line_no, _)) = lines.next() {
            return Err(Error::Parse {
                line: line_no,
                message: "unexpected trailing data".into(),
            });
        }
        Instance::from_flat(n, m, proc_time, powers).map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })
    }
}

fn push_joined<T: std::fmt::Display>(out: &mut String, values: impl Iterator<Item = T>) {
    for (k, v) in values.enumerate() {
        if k > 0 {
            out.push(' ');
        }
        write!(out, "{v}").unwrap();
    }
    out.push('\n');
}

fn parse_tokens<T: std::str::FromStr>(line: &str, line_no: usize) -> Result<Vec<T>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<T>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("cannot parse {tok:?}"),
            })
        })
        .collect()
}

/// One block of a Taillard flowshop file. Powers are not part of the format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaillardInstance {
    pub n_jobs: usize,
    pub n_machines: usize,
    /// Generator seed from the header; informational only.
    pub seed: Option<i64>,
    pub upper_bound: Option<i64>,
    pub lower_bound: Option<i64>,
    /// Job-major processing times.
    pub proc_time: Vec<u32>,
}

impl TaillardInstance {
    pub fn time(&self, job: usize, machine: usize) -> u32 {
        self.proc_time[job * self.n_machines + machine]
    }

    pub fn with_powers(&self, fixed_power: Vec<f64>) -> Result<Instance> {
        Instance::from_flat(
            self.n_jobs,
            self.n_machines,
            self.proc_time.clone(),
            fixed_power,
        )
    }

    pub fn with_default_powers(&self) -> Result<Instance> {
        self.with_powers(default_powers(self.n_machines)?)
    }

    /// Renders the block in Taillard's layout (machine-major matrix).
    pub fn to_taillard(&self) -> String {
        let mut out = String::new();
        out.push_str(
            "number of jobs, number of machines, initial seed, upper bound and lower bound :\n",
        );
        write!(out, "{:>12}{:>12}", self.n_jobs, self.n_machines).unwrap();
        for v in [self.seed, self.upper_bound, self.lower_bound] {
            write!(out, "{:>12}", v.unwrap_or(0)).unwrap();
        }
        out.push_str("\nprocessing times :\n");
        for machine in 0..self.n_machines {
            for job in 0..self.n_jobs {
                write!(out, "{:>3}", self.time(job, machine)).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Reads the `instance_index`-th (1-based) block of a Taillard file.
pub fn parse_taillard(text: &str, instance_index: usize) -> Result<TaillardInstance> {
    if instance_index == 0 {
        return Err(Error::IndexOutOfRange {
            index: 0,
            available: 0,
        });
    }
    let mut parser = TaillardParser::new(text);
    let mut seen = 0;
    while let Some(block) = parser.next_block()? {
        seen += 1;
        if seen == instance_index {
            return Ok(block);
        }
    }
    if seen == 0 {
        return Err(Error::Parse {
            line: parser.last_line,
            message: "no Taillard instance header found".into(),
        });
    }
    Err(Error::IndexOutOfRange {
        index: instance_index,
        available: seen,
    })
}

/// Reads every block of a Taillard file.
pub fn parse_taillard_all(text: &str) -> Result<Vec<TaillardInstance>> {
    let mut parser = TaillardParser::new(text);
    let mut blocks = Vec::new();
    while let Some(block) = parser.next_block()? {
        blocks.push(block);
    }
    if blocks.is_empty() {
        return Err(Error::Parse {
            line: parser.last_line,
            message: "no Taillard instance header found".into(),
        });
    }
    Ok(blocks)
}

/// Heuristic used by the CLI to tell the two formats apart.
pub fn looks_like_taillard(text: &str) -> bool {
    text.lines().any(is_times_marker)
}

fn is_times_marker(line: &str) -> bool {
    line.to_ascii_lowercase().contains("times")
}

fn has_alpha(line: &str) -> bool {
    line.chars().any(|c| c.is_ascii_alphabetic())
}

struct TaillardParser<'a> {
    lines: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
    last_line: usize,
}

impl<'a> TaillardParser<'a> {
    fn new(text: &'a str) -> Self {
        TaillardParser {
            lines: text.lines().enumerate().peekable(),
            last_line: 0,
        }
    }

    fn next_nonblank(&mut self) -> Option<(usize, &'a str)> {
        for (k, line) in self.lines.by_ref() {
            self.last_line = k + 1;
            if !line.trim().is_empty() {
                return Some((k + 1, line.trim()));
            }
        }
        None
    }

    fn next_block(&mut self) -> Result<Option<TaillardInstance>> {
        // Header: skip label lines, then expect "jobs machines [seed ub lb]".
        let (header_line, header) = loop {
            match self.next_nonblank() {
                None => return Ok(None),
                Some((_, l))
                    if has_alpha(l)
                        && !is_times_marker(l)
                        && !l.bytes().any(|b| b.is_ascii_digit()) =>
                {
                    continue
                }
                Some(found) => break found,
            }
        };
        let fields: Vec<i64> = parse_tokens(header, header_line).map_err(|_| Error::Parse {
            line: header_line,
            message: format!("malformed instance header {header:?}"),
        })?;
        if !(2..=5).contains(&fields.len()) || fields[0] <= 0 || fields[1] <= 0 {
            return Err(Error::Parse {
                line: header_line,
                message: format!("malformed instance header {header:?}"),
            });
        }
        let (n, m) = (fields[0] as usize, fields[1] as usize);

        match self.next_nonblank() {
            Some((_, l)) if is_times_marker(l) => {}
            Some((line, l)) => {
                return Err(Error::Parse {
                    line,
                    message: format!("expected \"processing times\" marker, got {l:?}"),
                })
            }
            None => {
                return Err(Error::Truncated {
                    expected: n * m,
                    found: 0,
                })
            }
        }

        let mut machine_major = Vec::with_capacity(n * m);
        while machine_major.len() < n * m {
            let Some(&(k, line)) = self.lines.peek() else {
                break;
            };
            if has_alpha(line) {
                break;
            }
            self.lines.next();
            self.last_line = k + 1;
            machine_major.extend(parse_tokens::<u32>(line, k + 1)?);
        }
        if machine_major.len() < n * m {
            return Err(Error::Truncated {
                expected: n * m,
                found: machine_major.len(),
            });
        }
        if machine_major.len() > n * m {
            return Err(Error::Parse {
                line: self.last_line,
                message: format!(
                    "matrix has {} values, expected {}",
                    machine_major.len(),
                    n * m
                ),
            });
        }

        let mut proc_time = vec![0; n * m];
        for machine in 0..m {
            for job in 0..n {
                proc_time[job * m + machine] = machine_major[machine * n + job];
            }
        }
        Ok(Some(TaillardInstance {
            n_jobs: n,
            n_machines: m,
            seed: fields.get(2).copied(),
            upper_bound: fields.get(3).copied(),
            lower_bound: fields.get(4).copied(),
            proc_time,
        }))
    }
}

/// The first `n_machines` entries of [`DEFAULT_POWERS`].
pub fn default_powers(n_machines: usize) -> Result<Vec<f64>> {
    if n_machines == 0 {
        return Err(Error::contract("need at least one machine"));
    }
    DEFAULT_POWERS
        .get(..n_machines)
        .map(<[f64]>::to_vec)
        .ok_or(Error::UnsupportedSize(n_machines))
}

/// Random instance: times uniform on integers [1, 99], powers uniform on
/// integers [700, 1500]. ChaCha8 seeded with `seed`; times are drawn
/// job-major before the powers.
pub fn generate_instance(n_jobs: usize, n_machines: usize, seed: u64) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let proc_time = (0..n_jobs * n_machines)
        .map(|_| rng.gen_range(PROC_TIME_RANGE.0..=PROC_TIME_RANGE.1))
        .collect();
    let fixed_power = (0..n_machines)
        .map(|_| f64::from(rng.gen_range(POWER_RANGE.0..=POWER_RANGE.1)))
        .collect();
    Instance::from_flat(n_jobs, n_machines, proc_time, fixed_power)
}

/// Time seeds of the ten 20-job, 5-machine Taillard instances (ta001-ta010).
pub const TAILLARD_20X5_SEEDS: [i64; 10] = [
    873654221, 379008056, 1866992158, 216771124, 495070989, 402959317, 1369363414, 2021925980,
    573109518, 88325120,
];

/// Taillard's portable Lehmer generator (a = 16807, m = 2^31 - 1). Produces
/// the machine-major UD[1, 99] matrix of the published benchmark instances
/// from their time seed, returned job-major.
pub fn taillard_lcg_times(n_jobs: usize, n_machines: usize, time_seed: i64) -> Vec<u32> {
    const M: i64 = 2_147_483_647;
    const A: i64 = 16_807;
    const B: i64 = 127_773;
    const C: i64 = 2_836;

    let mut seed = time_seed;
    let mut unif = |low: i64, high: i64| -> u32 {
        let k = seed / B;
        seed = A * (seed % B) - k * C;
        if seed < 0 {
            seed += M;
        }
        let u = seed as f64 / M as f64;
        (low + (u * (high - low + 1) as f64).floor() as i64) as u32
    };

    let mut proc_time = vec![0; n_jobs * n_machines];
    for machine in 0..n_machines {
        for job in 0..n_jobs {
            proc_time[job * n_machines + machine] = unif(1, 99);
        }
    }
    proc_time
}

/// The 15-job, 5-machine literature instance used for the Table-3 study.
pub fn load_table3() -> Instance {
    const TIMES: [[u32; 5]; 15] = [
        [3, 4, 6, 10, 3],
        [4, 5, 2, 8, 8],
        [7, 10, 8, 4, 7],
        [9, 10, 2, 2, 6],
        [2, 2, 5, 9, 9],
        [2, 1, 1, 8, 3],
        [5, 7, 8, 2, 5],
        [2, 9, 2, 9, 8],
        [9, 7, 3, 8, 1],
        [8, 5, 7, 2, 2],
        [9, 6, 9, 4, 7],
        [7, 9, 3, 2, 4],
        [8, 8, 2, 2, 9],
        [1, 2, 6, 5, 9],
        [8, 2, 10, 1, 4],
    ];
    Instance::from_flat(
        15,
        5,
        TIMES.iter().flatten().copied().collect(),
        DEFAULT_POWERS[..5].to_vec(),
    )
    .expect("static instance is valid")
}

/// Reads a file, attaching the path to I/O errors.
pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Reads whitespace-separated power values (comments after '#').
pub fn parse_powers(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        out.extend(parse_tokens::<f64>(line, k + 1)?);
    }
    if out.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "no power values found".into(),
        });
    }
    Ok(out)
}
