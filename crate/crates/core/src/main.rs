use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use regulus::expr::{self, ExprSource};
use regulus::gcr::{check_region, Method, Tolerances};
use regulus::manifold::{projective_atlas, quaternion_atlas, validate_atlas};
use regulus::report::CheckReport;
use regulus::sampling::Region;

const EXIT_NOT_REGULAR: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_EMPTY_REGION: u8 = 3;

#[derive(Parser)]
#[command(
    name = "regulus",
    version,
    about = "Check algebraic regularity of quaternionic functions and atlases"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Number of sample points (per transition for atlases).
    #[arg(long, default_value_t = 200)]
    n: usize,
    /// Sampler seed.
    #[arg(long, env = "REGULUS_SEED", default_value_t = 0)]
    seed: u64,
    /// Residual tolerance of the active route (default 1e-9 for jets, 1e-5 for differences).
    #[arg(long)]
    tol: Option<f64>,
    /// Also write the report as JSON to this path.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a function at quasi-random points of a box.
    Check {
        #[arg(long)]
        expr: String,
        /// Sampling box, e.g. q1=-2:2,q2=-2:2,q3=-2:2,q4=-2:2.
        #[arg(long = "box", default_value = "q1=-2:2,q2=-2:2,q3=-2:2,q4=-2:2")]
        region: String,
        /// Use finite differences of the evaluated map instead of jets.
        #[arg(long)]
        fd: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Check the transition maps of a built-in atlas.
    Atlas {
        #[arg(value_enum)]
        id: AtlasId,
        #[command(flatten)]
        common: Common,
    },
    /// Parse expressions and print their canonical forms.
    Parse {
        #[arg(long, required_unless_present = "file", conflicts_with = "file")]
        expr: Option<String>,
        /// A corpus file: one expression per line, `#` starts a comment.
        #[arg(long)]
        file: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AtlasId {
    /// H with the identity chart.
    #[value(name = "H")]
    H,
    /// The right projective line with charts phi1, phi2.
    #[value(name = "HP1")]
    Hp1,
}

fn parse_expr(text: &str) -> Result<regulus::RegularFn, ExitCode> {
    let src = ExprSource::new(text);
    src.parse().map_err(|e| {
        eprintln!("{}", src.describe(&e));
        ExitCode::from(EXIT_USAGE)
    })
}

fn emit(report: &CheckReport, json: Option<&PathBuf>) -> ExitCode {
    print!("{}", report.render_text());
    if let Some(path) = json {
        if let Err(e) = std::fs::write(path, report.to_json()) {
            eprintln!("cannot write {}: {e}", path.display());
            return ExitCode::FAILURE;
        }
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_NOT_REGULAR)
    }
}

fn run(cli: Cli) -> Result<ExitCode, ExitCode> {
    match cli.command {
        Command::Parse {
            expr: Some(text), ..
        } => {
            println!("{}", expr::print(&parse_expr(&text)?));
            Ok(ExitCode::SUCCESS)
        }
        Command::Parse { file, .. } => {
            let path = file.expect("clap requires --expr or --file");
            let text = std::fs::read_to_string(&path).map_err(|e| {
                eprintln!("cannot read {}: {e}", path.display());
                ExitCode::from(EXIT_USAGE)
            })?;
            let mut ok = true;
            for src in expr::corpus_sources(&text, &path.display().to_string()) {
                match src.parse() {
                    Ok(f) => println!("{}", expr::print(&f)),
                    Err(e) => {
                        ok = false;
                        eprintln!("{}", src.describe(&e));
                    }
                }
            }
            Ok(if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_USAGE)
            })
        }
        Command::Check {
            expr,
            region,
            fd,
            common,
        } => {
            let f = parse_expr(&expr)?;
            let region = Region::parse(&region).map_err(|e| {
                eprintln!("{e}");
                ExitCode::from(EXIT_USAGE)
            })?;
            let method = if fd {
                Method::FiniteDifference
            } else {
                Method::Jet
            };
            let mut tol = Tolerances::default();
            if let Some(t) = common.tol {
                match method {
                    Method::Jet => tol.jet = t,
                    Method::FiniteDifference => tol.fd = t,
                }
            }
            let check = check_region(&f, &region, common.n, common.seed, method, &tol);
            if common.n > 0 && check.samples.is_empty() {
                eprintln!(
                    "no sample of the box lies in the domain of {expr} ({} draws)",
                    check.draws
                );
                return Err(ExitCode::from(EXIT_EMPTY_REGION));
            }
            let report =
                CheckReport::for_region(&expr::print(&f), &check, region, common.seed, method, tol);
            Ok(emit(&report, common.json.as_ref()))
        }
        Command::Atlas { id, common } => {
            let mut tol = Tolerances::default();
            if let Some(t) = common.tol {
                tol.fd = t;
            }
            let atlas_report = match id {
                AtlasId::H => validate_atlas(&quaternion_atlas(), common.n, common.seed, &tol),
                AtlasId::Hp1 => validate_atlas(&projective_atlas(), common.n, common.seed, &tol),
            };
            let report = CheckReport::for_atlas(&atlas_report, common.seed, tol);
            Ok(emit(&report, common.json.as_ref()))
        }
    }
}

fn main() -> ExitCode {
    run(Cli::parse()).unwrap_or_else(|code| code)
}
