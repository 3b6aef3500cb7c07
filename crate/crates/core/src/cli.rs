//! The `eflow` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 I/O or input-format error,
//! 3 contract violation.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::harness::{
    self, averages_to_csv, front_to_csv, front_to_json, load_bench_instances, parse_front_csv,
    parse_records_csv, records_to_csv, report_from_records, run_benchmark, solve_repeated,
    write_file, PowerSource,
};
use crate::instance::{
    self, generate_instance, looks_like_taillard, parse_powers, parse_taillard, read_text,
    taillard_lcg_times, Instance, TaillardInstance,
};
use crate::nsga2::RunConfig;
use crate::objectives::DEFAULT_KAPPA;
use crate::tuning::{
    build_l16, pick_best_params, response_table, run_design, sn_table, LevelRule, Response,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_CONTRACT: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "eflow",
    version,
    about = "Flowtime / standby-energy flowshop solver"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Population size (even).
    #[arg(long, global = true, default_value_t = 200)]
    pub pop: usize,
    /// Number of generations.
    #[arg(long = "gen", global = true, default_value_t = 50)]
    pub generations: usize,
    /// Crossover probability.
    #[arg(long, global = true, default_value_t = 0.6)]
    pub pc: f64,
    /// Mutation probability.
    #[arg(long, global = true, default_value_t = 0.05)]
    pub pm: f64,
    /// Root random seed.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Local search between generations.
    #[arg(long, global = true, value_enum, default_value_t = Switch::On)]
    pub ls: Switch,
    /// Independent runs per instance (seeds seed, seed+1, ...).
    #[arg(long, global = true, default_value_t = 1)]
    pub runs: usize,
    /// Minutes-to-hours factor applied to standby energy.
    #[arg(long, global = true, default_value_t = DEFAULT_KAPPA)]
    pub kappa: f64,
    /// Output file (or directory for `tune`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Fixed powers: `table9` or a file of whitespace-separated values.
    #[arg(long, global = true)]
    pub powers: Option<String>,
}

impl GlobalOpts {
    pub fn run_config(&self) -> RunConfig {
        RunConfig {
            pop_size: self.pop,
            generations: self.generations,
            p_crossover: self.pc,
            p_mutation: self.pm,
            seed: self.seed,
            ls_enabled: self.ls == Switch::On,
            kappa: self.kappa,
            ..RunConfig::default()
        }
    }

    fn power_source(&self) -> Result<Option<PowerSource>> {
        match self.powers.as_deref() {
            None => Ok(None),
            Some("table9") => Ok(Some(PowerSource::Builtin)),
            Some(path) => Ok(Some(PowerSource::Values(parse_powers(&read_text(
                Path::new(path),
            )?)?))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InstanceFormat {
    Native,
    Taillard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ResponseArg {
    Ft,
    Ec,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    Lowest,
    Highest,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesise a random instance (times UD[1,99], powers UD[700,1500]).
    Generate {
        #[arg(long)]
        jobs: usize,
        #[arg(long)]
        machines: usize,
        #[arg(long, value_enum, default_value_t = InstanceFormat::Native)]
        format: InstanceFormat,
        /// Draw times with Taillard's generator, using --seed as time seed.
        #[arg(long)]
        lcg: bool,
    },
    /// Solve one instance and write its front.
    Solve {
        /// `table3`, a native instance file, or a Taillard file.
        #[arg(long)]
        instance: String,
        /// Block of a Taillard file (1-based).
        #[arg(long, default_value_t = 1)]
        index: usize,
        /// JSON instead of CSV.
        #[arg(long)]
        json: bool,
    },
    /// Run the L16 parameter study and print response tables.
    Tune {
        #[arg(long, default_value = "table3")]
        instance: String,
        #[arg(long, default_value_t = 1)]
        index: usize,
        #[arg(long, value_enum, default_value_t = ResponseArg::Both)]
        response: ResponseArg,
        /// How levels are read off the tables.
        #[arg(long, value_enum, default_value_t = RuleArg::Lowest)]
        rule: RuleArg,
    },
    /// Benchmark Taillard files and write one record per instance.
    Bench {
        #[arg(long, required = true, num_args = 1..)]
        instances: Vec<PathBuf>,
        /// Only these blocks of each file (1-based).
        #[arg(long, value_delimiter = ',')]
        index: Vec<usize>,
    },
    /// Re-aggregate stored benchmark records, or emit plot columns of a front.
    Report {
        #[arg(long, conflicts_with = "front", required_unless_present = "front")]
        input: Option<PathBuf>,
        #[arg(long)]
        front: Option<PathBuf>,
    },
}

/// Parses arguments into a run configuration without executing anything.
pub fn config_from_args<I, T>(args: I) -> std::result::Result<RunConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    Ok(Cli::try_parse_from(args)?.global.run_config())
}

/// Runs the CLI against the process's stdout/stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match execute(&cli, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::IndexOutOfRange { .. } | Error::UnsupportedSize(_) => EXIT_USAGE,
        Error::Io { .. }
        | Error::Csv(_)
        | Error::Json(_)
        | Error::Parse { .. }
        | Error::Truncated { .. } => EXIT_IO,
        Error::Contract(_) | Error::Domain(_) => EXIT_CONTRACT,
    }
}

fn emit(out: &mut dyn Write, target: Option<&Path>, contents: &str) -> Result<()> {
    match target {
        Some(path) => write_file(path, contents),
        None => out
            .write_all(contents.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

/// Resolves `table3`, a native file or a Taillard file into an instance.
pub fn load_instance(spec: &str, index: usize, powers: Option<&PowerSource>) -> Result<Instance> {
    let base = if spec.eq_ignore_ascii_case("table3") {
        instance::load_table3()
    } else {
        let text = read_text(Path::new(spec))?;
        if looks_like_taillard(&text) {
            let block = parse_taillard(&text, index)?;
            let source = powers.cloned().unwrap_or(PowerSource::Builtin);
            return block.with_powers(source.powers_for(block.n_machines)?);
        }
        Instance::from_native(&text)?
    };
    match powers {
        Some(source) => base.with_powers(source.powers_for(base.n_machines())?),
        None => Ok(base),
    }
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let g = &cli.global;
    let config = g.run_config();
    let powers = g.power_source()?;
    let target = g.out.as_deref();

    match &cli.command {
        Command::Generate {
            jobs,
            machines,
            format,
            lcg,
        } => {
            if *jobs == 0 || *machines == 0 {
                return Err(Error::contract("jobs and machines must be positive"));
            }
            let mut inst = generate_instance(*jobs, *machines, g.seed)?;
            if *lcg {
                let times = taillard_lcg_times(*jobs, *machines, g.seed as i64);
                inst = Instance::from_flat(*jobs, *machines, times, inst.fixed_power().to_vec())?;
            }
            if let Some(source) = &powers {
                inst = inst.with_powers(source.powers_for(*machines)?)?;
            }
            let text = match format {
                InstanceFormat::Native => inst.to_native(),
                InstanceFormat::Taillard => {
                    let times = (0..*jobs).flat_map(|j| inst.job_row(j).to_vec()).collect();
                    TaillardInstance {
                        n_jobs: *jobs,
                        n_machines: *machines,
                        seed: Some(g.seed as i64),
                        upper_bound: None,
                        lower_bound: None,
                        proc_time: times,
                    }
                    .to_taillard()
                }
            };
            emit(out, target, &text)
        }
        Command::Solve {
            instance,
            index,
            json,
        } => {
            config.validate()?;
            let inst = load_instance(instance, *index, powers.as_ref())?;
            let front = solve_repeated(&inst, &config, g.runs)?;
            let as_json =
                *json || target.is_some_and(|p| p.extension().is_some_and(|e| e == "json"));
            let text = if as_json {
                front_to_json(&front)?
            } else {
                front_to_csv(&front)
            };
            emit(out, target, &text)?;
            let (a, b) = harness::extreme_points(&front)?;
            let _ = writeln!(
                err,
                "{} point(s); FT-best ({}, {:.1}); EC-best ({}, {:.1})",
                front.len(),
                a.flowtime,
                a.energy,
                b.flowtime,
                b.energy
            );
            Ok(())
        }
        Command::Tune {
            instance,
            index,
            response,
            rule,
        } => {
            config.validate()?;
            let inst = load_instance(instance, *index, powers.as_ref())?;
            let design = build_l16();
            let wanted: &[(Response, &str)] = match response {
                ResponseArg::Ft => &[(Response::Flowtime, "flowtime")],
                ResponseArg::Ec => &[(Response::Energy, "energy")],
                ResponseArg::Both => &[
                    (Response::Flowtime, "flowtime"),
                    (Response::Energy, "energy"),
                ],
            };
            let mut tables = Vec::new();
            let mut responses_csv = String::from("row,gen,pop,crossover,mutation");
            let mut columns = Vec::new();
            for &(resp, name) in wanted {
                responses_csv.push_str(&format!(",{name}"));
                let ys = run_design(&design, &inst, &config, resp)?;
                let means = response_table(&design, &ys)?;
                let sn = sn_table(&design, &ys)?;
                let mut section = format!("# {name}: response table for means\n{}", means.to_csv());
                section.push_str(&format!(
                    "# {name}: response table for S/N ratios\n{}",
                    sn.to_csv()
                ));
                match target {
                    Some(dir) => {
                        write_file(&dir.join(format!("{name}_means.csv")), &means.to_csv())?;
                        write_file(&dir.join(format!("{name}_sn.csv")), &sn.to_csv())?;
                    }
                    None => emit(out, None, &section)?,
                }
                columns.push(ys);
                tables.push(means);
            }
            responses_csv.push('\n');
            for row in 0..design.rows.len() {
                let p = design.params(row);
                responses_csv.push_str(&format!(
                    "{},{},{},{},{}",
                    row + 1,
                    p.generations,
                    p.pop_size,
                    p.p_crossover,
                    p.p_mutation
                ));
                for col in &columns {
                    responses_csv.push_str(&format!(",{}", col[row]));
                }
                responses_csv.push('\n');
            }
            match target {
                Some(dir) => write_file(&dir.join("responses.csv"), &responses_csv)?,
                None => emit(out, None, &format!("# responses\n{responses_csv}"))?,
            }
            if tables.len() == 2 {
                let level_rule = match rule {
                    RuleArg::Lowest => LevelRule::LowestMean,
                    RuleArg::Highest => LevelRule::HighestMean,
                };
                let best = pick_best_params(&design, &tables[0], &tables[1], level_rule);
                let _ = writeln!(
                    err,
                    "selected: pop {} gen {} pc {} pm {}",
                    best.pop_size, best.generations, best.p_crossover, best.p_mutation
                );
            }
            Ok(())
        }
        Command::Bench { instances, index } => {
            let source = powers.unwrap_or(PowerSource::Builtin);
            let queue = load_bench_instances(instances, index, &source)?;
            let report = run_benchmark(&queue, &config, g.runs)?;
            emit(out, target, &records_to_csv(&report.records))?;
            if let Some(path) = target {
                write_file(&sibling(path, "_averages"), &averages_to_csv(&report))?;
            }
            let _ = write!(err, "{}", averages_to_csv(&report));
            Ok(())
        }
        Command::Report { input, front } => {
            if let Some(path) = input {
                let records = parse_records_csv(&read_text(path)?)?;
                let report = report_from_records(records);
                emit(out, target, &averages_to_csv(&report))
            } else {
                let path = front.as_ref().expect("clap enforces one of input/front");
                let rows = parse_front_csv(&read_text(path)?)?;
                let mut text = String::from("flowtime,energy_whr\n");
                for r in rows {
                    text.push_str(&format!("{},{:.1}\n", r.flowtime, r.energy_whr));
                }
                emit(out, target, &text)
            }
        }
    }
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("bench");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    path.with_file_name(format!("{stem}{suffix}.{ext}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let cfg = config_from_args(["eflow", "solve", "--instance", "table3"]).unwrap();
        assert_eq!(
            (
                cfg.pop_size,
                cfg.generations,
                cfg.p_crossover,
                cfg.p_mutation
            ),
            (200, 50, 0.6, 0.05)
        );
        assert!(cfg.ls_enabled);
        assert_eq!(cfg.kappa, DEFAULT_KAPPA);
    }

    #[test]
    fn global_flags_anywhere() {
        let cfg = config_from_args([
            "eflow",
            "--pop",
            "20",
            "solve",
            "--instance",
            "table3",
            "--ls",
            "off",
        ])
        .unwrap();
        assert_eq!(cfg.pop_size, 20);
        assert!(!cfg.ls_enabled);
    }

    #[test]
    fn usage_errors_exit_one() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        assert_eq!(run_with(["eflow", "bench"], &mut out, &mut err), EXIT_USAGE);
        assert_eq!(
            run_with(["eflow", "solve", "--bogus"], &mut out, &mut err),
            EXIT_USAGE
        );
        assert_eq!(run_with(["eflow"], &mut out, &mut err), EXIT_USAGE);
    }

    #[test]
    fn missing_file_exits_two() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(
            ["eflow", "solve", "--instance", "/nonexistent/file.txt"],
            &mut out,
            &mut err,
        );
        assert_eq!(code, EXIT_IO);
        assert!(String::from_utf8(err)
            .unwrap()
            .contains("/nonexistent/file.txt"));
    }

    #[test]
    fn bad_config_exits_three() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(
            ["eflow", "--pop", "3", "solve", "--instance", "table3"],
            &mut out,
            &mut err,
        );
        assert_eq!(code, EXIT_CONTRACT);
    }
}
