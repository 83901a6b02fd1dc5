use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use direction_space::commands::{self, Outcome};
use direction_space::instances::AnyInstance;
use direction_space::{report, verify, Error, TruncationProfile};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "direction-space",
    version,
    about = "Hyperbolicity, axes, scales and directions at finite truncation"
)]
struct Cli {
    #[command(flatten)]
    profile: ProfileArgs,
    /// Print row data as CSV instead of JSON where the command has rows.
    #[arg(long, global = true)]
    csv: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ProfileArgs {
    /// Ball radius R.
    #[arg(long, global = true, default_value_t = 8)]
    horizon: usize,
    /// Power bound N.
    #[arg(long, global = true, default_value_t = 40)]
    power_bound: usize,
    /// Exponent bound K.
    #[arg(long, global = true, default_value_t = 64)]
    exponent_bound: usize,
    #[arg(long, global = true, default_value_t = 5)]
    end_threshold: u64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

impl ProfileArgs {
    fn profile(&self) -> TruncationProfile {
        TruncationProfile {
            horizon: self.horizon,
            power_bound: self.power_bound,
            exponent_bound: self.exponent_bound,
            end_threshold: self.end_threshold,
            seed: self.seed,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Slim and four-point constants on a ball about the basepoint.
    Hyperbolicity {
        instance: String,
        #[arg(long, default_value_t = 3)]
        radius: usize,
    },
    /// Elliptic, hyperbolic or undetermined.
    Classify { instance: String, iso: String },
    /// A finite window of an axis.
    Axis {
        instance: String,
        iso: String,
        /// Use the short-lex construction instead of concatenating translates.
        #[arg(long)]
        shortlex: bool,
        /// Edge colouring seed for the short-lex construction.
        #[arg(long = "color-seed", default_value_t = 0)]
        color_seed: u64,
    },
    /// The scale of an element.
    Scale {
        instance: String,
        iso: String,
        /// closed-form, limit or tidy.
        #[arg(long)]
        method: Option<String>,
    },
    /// Distance between two compact open subgroups.
    Cosdist {
        instance: String,
        u: String,
        v: String,
    },
    /// The symmetrized pseudometric between two elements.
    Delta {
        instance: String,
        a: String,
        b: String,
    },
    /// Whether two rays stay at bounded distance after matching speeds.
    Asymptotic {
        instance: String,
        a: String,
        b: String,
    },
    /// Classes and pairwise distances of a set of elements.
    Directions {
        instance: String,
        #[arg(required = true)]
        isos: Vec<String>,
    },
    /// Run the acceptance checks: `all`, `acceptance`, or a list like `1,4,7`.
    Verify {
        #[arg(default_value = "all")]
        suite: String,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Hyperbolicity { .. } => "hyperbolicity",
            Command::Classify { .. } => "classify",
            Command::Axis { .. } => "axis",
            Command::Scale { .. } => "scale",
            Command::Cosdist { .. } => "cosdist",
            Command::Delta { .. } => "delta",
            Command::Asymptotic { .. } => "asymptotic",
            Command::Directions { .. } => "directions",
            Command::Verify { .. } => "verify",
        }
    }
}

fn verify_suite(suite: &str) -> direction_space::Result<(Outcome, bool)> {
    let ids = verify::parse_suite(suite)?;
    let results: Vec<_> = ids.into_iter().map(verify::run).collect();
    let passed = results.iter().filter(|r| r.passed).count();
    let summary = results
        .iter()
        .map(|r| r.line())
        .chain([format!("{passed}/{} passed", results.len())])
        .collect::<Vec<_>>()
        .join("\n");
    let all = passed == results.len();
    let rows = results
        .iter()
        .map(|r| json!({ "id": r.id, "name": r.name, "passed": r.passed, "detail": r.detail }))
        .collect::<Vec<_>>();
    Ok((
        Outcome {
            json: json!({ "criteria": rows, "passed": passed, "total": results.len() }),
            csv: None,
            summary,
        },
        all,
    ))
}

fn execute(command: &Command, p: &TruncationProfile) -> direction_space::Result<(Outcome, bool)> {
    p.validate()?;
    let load = |s: &str| AnyInstance::parse(s, p.horizon);
    let out = match command {
        Command::Hyperbolicity { instance, radius } => {
            commands::hyperbolicity(&load(instance)?, *radius, p)?
        }
        Command::Classify { instance, iso } => commands::classify(&load(instance)?, iso, p)?,
        Command::Axis {
            instance,
            iso,
            shortlex,
            color_seed,
        } => commands::axis(&load(instance)?, iso, p, *shortlex, *color_seed)?,
        Command::Scale {
            instance,
            iso,
            method,
        } => {
            let m = method.as_deref().map(commands::parse_method).transpose()?;
            commands::scale(&load(instance)?, iso, p, m)?
        }
        Command::Cosdist { instance, u, v } => commands::cosdist(&load(instance)?, u, v, p)?,
        Command::Delta { instance, a, b } => commands::delta(&load(instance)?, a, b, p)?,
        Command::Asymptotic { instance, a, b } => {
            commands::asymptotic_relation(&load(instance)?, a, b, p)?
        }
        Command::Directions { instance, isos } => commands::directions(&load(instance)?, isos, p)?,
        Command::Verify { suite } => return verify_suite(suite),
    };
    Ok((out, true))
}

fn configure_threads() {
    if let Some(n) = std::env::var("DIRECTION_SPACE_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
    {
        if n > 0 {
            // Fails only if a global pool already exists, which cannot happen this early.
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let p = cli.profile.profile();
    let name = cli.command.name();
    match execute(&cli.command, &p) {
        Ok((out, ok)) => {
            match (&out.csv, cli.csv) {
                (Some(csv), true) => print!("{csv}"),
                _ => println!("{}", report::envelope(name, &p, out.json)),
            }
            eprintln!("{}", out.summary);
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            println!("{}", report::error(name, &p, &e));
            eprintln!("error: {e}");
            match e {
                Error::InvalidProfile(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
