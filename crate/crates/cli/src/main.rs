use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use icnoma::checks;
use icnoma::pipeline::design_plain;
use icnoma::report::{self, RunOptions};
use icnoma::{is_valid_code, PowerProfile, RandomInstanceSpec, Scenario, SolverKind};

const EXIT_VALIDATION: u8 = 2;
const EXIT_CAPABILITY: u8 = 3;
const EXIT_PROPERTY: u8 = 4;

#[derive(Parser)]
#[command(name = "icnoma", version, about = "Three-group index coding with NOMA superposition")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimum-length plain index code for a scenario, ignoring groups.
    Solve {
        scenario: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Grouping, staged codes, schedule, rates and power as JSON.
    Run {
        scenario: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Emit a one-line CSV summary instead of the JSON report.
        #[arg(long)]
        csv: bool,
    },
    /// CSV of rate and power figures over a grid of total powers.
    Sweep {
        scenario: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Either `start:stop:step` or a comma-separated list.
        #[arg(long, default_value = "1:100:1")]
        grid: String,
    },
    /// Random scenario with three gain clusters.
    Generate {
        #[arg(long, default_value_t = 6)]
        n: usize,
        /// Cluster sizes as near,intermediate,far.
        #[arg(long, default_value = "2,2,2")]
        sizes: String,
        #[arg(long, default_value_t = 0.3)]
        side_density: f64,
        #[arg(long, default_value_t = 0.3)]
        demand_density: f64,
        /// Allow users whose demands are all cached.
        #[arg(long)]
        allow_empty_wants: bool,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded property checks; exits with 4 when any property fails.
    PropertyCheck {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        /// Largest message count of the random instances.
        #[arg(long, default_value_t = 8)]
        max_n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Plain and two-group transmission counts next to the three-group one.
    Baseline {
        scenario: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Power split as alpha,beta,gamma,alpha1.
    #[arg(long)]
    profile: Option<String>,
    /// Total transmit power.
    #[arg(long)]
    power: Option<f64>,
    #[arg(long)]
    solver: Option<SolverKind>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn options(&self, s: &Scenario) -> anyhow::Result<RunOptions> {
        let mut profile = None;
        if let Some(text) = &self.profile {
            let v = parse_list::<f64>(text, "profile")?;
            let [a, b, g, a1] = v[..] else {
                bail!("--profile expects four values alpha,beta,gamma,alpha1");
            };
            let p = s.profile_or_default().p;
            profile = Some(PowerProfile::new(p, a, b, g, a1)?);
        }
        if let Some(p) = self.power {
            let base = profile.unwrap_or_else(|| s.profile_or_default());
            profile = Some(base.with_power(p)?);
        }
        Ok(RunOptions {
            profile,
            solver: self.solver,
        })
    }
}

fn load(path: &Path) -> anyhow::Result<Scenario> {
    Scenario::ingest(path).with_context(|| format!("loading {}", path.display()))
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> anyhow::Result<Vec<T>> {
    text.split(',')
        .map(|x| x.trim().parse::<T>().ok().with_context(|| format!("bad {what} entry {x:?}")))
        .collect()
}

fn parse_grid(text: &str) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let grid = match parts[..] {
        [_] => parse_list::<f64>(text, "grid")?,
        [a, b, c] => {
            let (start, stop, step): (f64, f64, f64) = (a.trim().parse()?, b.trim().parse()?, c.trim().parse()?);
            if !(step > 0.0) || stop < start {
                bail!("grid needs start <= stop and a positive step");
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            (0..count).map(|i| start + i as f64 * step).collect()
        }
        _ => bail!("grid must be start:stop:step or a comma-separated list"),
    };
    Ok(grid)
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn json<T: serde::Serialize>(value: &T) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

/// Runs the command; `Ok(false)` means a property check failed.
fn execute(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Solve { scenario, common } => {
            let s = load(&scenario)?;
            let (_, solver) = common.options(&s)?.resolve(&s);
            let p = s.problem()?;
            let code = design_plain(&p, &solver)?;
            let body = serde_json::json!({
                "solver": solver.kind,
                "length": code.len(),
                "rows": code.combinations(),
                "valid": is_valid_code(&p, &code)?,
            });
            emit(common.out.as_deref(), &json(&body)?)?;
        }
        Command::Run { scenario, common, csv } => {
            let s = load(&scenario)?;
            let r = report::run(&s, &common.options(&s)?)?;
            let text = if csv {
                report::csv_string(&[(&r).into()])?
            } else {
                json(&r)?
            };
            emit(common.out.as_deref(), &text)?;
        }
        Command::Sweep { scenario, common, grid } => {
            let s = load(&scenario)?;
            let rows = report::sweep(&s, &common.options(&s)?, &parse_grid(&grid)?)?;
            emit(common.out.as_deref(), &report::csv_string(&rows)?)?;
        }
        Command::Generate {
            n,
            sizes,
            side_density,
            demand_density,
            allow_empty_wants,
            seed,
            out,
        } => {
            let v = parse_list::<usize>(&sizes, "sizes")?;
            let [near, mid, far] = v[..] else {
                bail!("--sizes expects three counts near,intermediate,far");
            };
            let spec = RandomInstanceSpec {
                n,
                sizes: [near, mid, far],
                side_density,
                demand_density,
                require_wants: !allow_empty_wants,
                seed,
                ..RandomInstanceSpec::default()
            };
            emit(out.as_deref(), &spec.generate()?.emit())?;
        }
        Command::PropertyCheck {
            trials,
            seed,
            max_n,
            out,
        } => {
            let outcomes = checks::run_all(trials, seed, max_n)?;
            for o in &outcomes {
                let verdict = if o.passed() { "PASS" } else { "FAIL" };
                eprintln!("{verdict} {} ({} applicable, {} violations)", o.name, o.applicable, o.violations);
            }
            emit(out.as_deref(), &json(&outcomes)?)?;
            return Ok(outcomes.iter().all(|o| o.passed()));
        }
        Command::Baseline { scenario, common } => {
            let s = load(&scenario)?;
            let b = report::baseline(&s, &common.options(&s)?)?;
            emit(common.out.as_deref(), &json(&b)?)?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_PROPERTY),
        Err(e) => {
            eprintln!("error: {e:#}");
            let capability = e.downcast_ref::<icnoma::Error>().is_some_and(|e| e.is_capability());
            ExitCode::from(if capability { EXIT_CAPABILITY } else { EXIT_VALIDATION })
        }
    }
}
