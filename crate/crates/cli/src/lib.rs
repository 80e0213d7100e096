//! The `wardgen` command line: generate instances from a template, check a
//! census against a ward, validate instance files and summarize them.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success (feasible, valid) |
//! | 1 | malformed input, config or instance parse error |
//! | 2 | I/O failure |
//! | 3 | census infeasible |
//! | 4 | instance has violations |

pub mod stats;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use wardgen_core::distributions::TableStore;
use wardgen_core::feasibility::{classify, is_feasible, Census, WardConfig};
use wardgen_core::generator::{infeasible_days, Generator, GeneratorConfig};
use wardgen_core::model::parse_instance;

pub use stats::InstanceStats;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_IO: u8 = 2;
pub const EXIT_INFEASIBLE: u8 = 3;
pub const EXIT_VIOLATIONS: u8 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "wardgen",
    version,
    about = "Patient-to-room instance generator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate instances from a template and write instance_{k}.json files.
    Generate {
        #[arg(long)]
        template: PathBuf,
        /// Output directory; defaults to the template's output_dir, then ".".
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        count: Option<u32>,
        /// Target load in (0, 1].
        #[arg(long)]
        load: Option<f64>,
    },
    /// Decide whether F female and M male patients fit the rooms.
    Check {
        /// Comma-separated room capacities, e.g. 2,2,4.
        #[arg(long, value_delimiter = ',', required = true)]
        rooms: Vec<u32>,
        #[arg(long = "f")]
        females: u32,
        #[arg(long = "m")]
        males: u32,
        #[arg(long)]
        json: bool,
    },
    /// Check an instance file against the instance rules.
    Validate {
        path: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Print load, attribute rates and histograms of an instance file.
    Stats {
        path: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Print (or write) an example template.
    Template {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// What a command printed and how it ends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self::with_code(stdout, EXIT_OK)
    }

    fn with_code(stdout: String, code: u8) -> Self {
        Self {
            stdout,
            stderr: String::new(),
            code,
        }
    }

    fn error(code: u8, message: impl std::fmt::Display) -> Self {
        Self {
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
            code,
        }
    }
}

fn read(path: &Path) -> Result<String, Outcome> {
    fs::read_to_string(path)
        .map_err(|e| Outcome::error(EXIT_IO, format!("cannot read {}: {e}", path.display())))
}

fn json_line(value: &impl Serialize) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    text
}

pub fn run(cli: Cli) -> Outcome {
    let result = match cli.command {
        Command::Generate {
            template,
            out,
            seed,
            count,
            load,
        } => cmd_generate(&template, out.as_deref(), seed, count, load),
        Command::Check {
            rooms,
            females,
            males,
            json,
        } => cmd_check(&rooms, females, males, json),
        Command::Validate { path, json } => cmd_validate(&path, json),
        Command::Stats { path, json } => cmd_stats(&path, json),
        Command::Template { out } => cmd_template(out.as_deref()),
    };
    result.unwrap_or_else(|e| e)
}

pub fn cmd_generate(
    template: &Path,
    out: Option<&Path>,
    seed: Option<u64>,
    count: Option<u32>,
    load: Option<f64>,
) -> Result<Outcome, Outcome> {
    let text = read(template)?;
    let mut config =
        GeneratorConfig::from_json(&text).map_err(|e| Outcome::error(EXIT_INPUT, e))?;
    if let Some(seed) = seed {
        config.start.seed = seed;
    }
    if let Some(count) = count {
        config.generate.instance_count = count;
    }
    if let Some(load) = load {
        config.start.target_load = load;
    }
    let out_dir = out
        .map(Path::to_path_buf)
        .or_else(|| config.generate.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let base = template.parent().map(Path::to_path_buf).unwrap_or_default();
    let store = TableStore::with_base_dir(base);
    let generator = Generator::new(config, &store).map_err(|e| Outcome::error(EXIT_INPUT, e))?;

    fs::create_dir_all(&out_dir).map_err(|e| {
        Outcome::error(EXIT_IO, format!("cannot create {}: {e}", out_dir.display()))
    })?;
    let mut stdout = String::new();
    let mut stderr: String = generator
        .warnings()
        .iter()
        .map(|w| format!("warning: {w}\n"))
        .collect();
    let days = generator.config().start.horizon;
    for generated in generator.generate_all() {
        let name = format!("instance_{}.json", generated.report.index);
        let path = out_dir.join(&name);
        fs::write(&path, generated.instance.to_json()).map_err(|e| {
            Outcome::error(EXIT_IO, format!("cannot write {}: {e}", path.display()))
        })?;
        let bad = infeasible_days(&generated.instance);
        let audit = if bad.is_empty() {
            format!("all {days} days feasible")
        } else {
            format!("{} of {days} days infeasible", bad.len())
        };
        stdout.push_str(&format!(
            "{name}  patients {}  load {:.4} (target {})  audit: {audit}\n",
            generated.report.accepted, generated.report.achieved_load, generated.report.target_load
        ));
        for w in &generated.report.warnings {
            stderr.push_str(&format!("warning: {name}: {w}\n"));
        }
    }
    Ok(Outcome {
        stdout,
        stderr,
        code: EXIT_OK,
    })
}

#[derive(Serialize)]
struct CheckReport<'a> {
    rooms: Vec<u32>,
    females: u32,
    males: u32,
    feasible: bool,
    method: &'a str,
    witness: Option<&'a [usize]>,
}

pub fn cmd_check(rooms: &[u32], females: u32, males: u32, json: bool) -> Result<Outcome, Outcome> {
    let ward = WardConfig::from_capacities(rooms).map_err(|e| Outcome::error(EXIT_INPUT, e))?;
    let census = Census::new(females, males);
    let verdict = is_feasible(census, &ward);
    let code = if verdict.feasible {
        EXIT_OK
    } else {
        EXIT_INFEASIBLE
    };
    let stdout = if json {
        json_line(&CheckReport {
            rooms: rooms.to_vec(),
            females,
            males,
            feasible: verdict.feasible,
            method: verdict.method.name(),
            witness: verdict.witness.as_deref(),
        })
    } else {
        let status = if verdict.feasible {
            "feasible"
        } else {
            "infeasible"
        };
        let mut line = format!(
            "{status}  method {}  family {:?}",
            verdict.method,
            classify(&ward)
        );
        if let Some(witness) = &verdict.witness {
            let rooms: Vec<String> = witness.iter().map(usize::to_string).collect();
            line.push_str(&format!(
                "  female rooms [{}] ({} beds)",
                rooms.join(","),
                ward.capacity_of(witness)
            ));
        }
        line.push('\n');
        line
    };
    Ok(Outcome::with_code(stdout, code))
}

#[derive(Serialize)]
struct ValidateReport {
    valid: bool,
    patients: usize,
    violations: Vec<wardgen_core::model::Violation>,
    warnings: Vec<String>,
}

pub fn cmd_validate(path: &Path, json: bool) -> Result<Outcome, Outcome> {
    let text = read(path)?;
    let (instance, warnings) = parse_instance(&text).map_err(|e| Outcome::error(EXIT_INPUT, e))?;
    let violations = instance.validate();
    let code = if violations.is_empty() {
        EXIT_OK
    } else {
        EXIT_VIOLATIONS
    };
    let stdout = if json {
        json_line(&ValidateReport {
            valid: violations.is_empty(),
            patients: instance.patients.len(),
            violations,
            warnings,
        })
    } else {
        let mut out: String = warnings.iter().map(|w| format!("warning: {w}\n")).collect();
        if violations.is_empty() {
            out.push_str(&format!(
                "ok: {} patients, no violations\n",
                instance.patients.len()
            ));
        } else {
            for v in &violations {
                out.push_str(&format!("{v}\n"));
            }
            out.push_str(&format!("{} violations\n", violations.len()));
        }
        out
    };
    Ok(Outcome::with_code(stdout, code))
}

pub fn cmd_stats(path: &Path, json: bool) -> Result<Outcome, Outcome> {
    let text = read(path)?;
    let (instance, _) = parse_instance(&text).map_err(|e| Outcome::error(EXIT_INPUT, e))?;
    let stats = InstanceStats::of(&instance);
    Ok(Outcome::ok(if json {
        json_line(&stats)
    } else {
        stats.render()
    }))
}

pub fn cmd_template(out: Option<&Path>) -> Result<Outcome, Outcome> {
    let text = GeneratorConfig::example().to_json();
    match out {
        None => Ok(Outcome::ok(text)),
        Some(path) => {
            fs::write(path, text).map_err(|e| {
                Outcome::error(EXIT_IO, format!("cannot write {}: {e}", path.display()))
            })?;
            Ok(Outcome::ok(format!("wrote {}\n", path.display())))
        }
    }
}
