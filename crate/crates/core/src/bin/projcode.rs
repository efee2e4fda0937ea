use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use projcode::cli::{self, JobConfig, JobError, VerbError, BUNDLED_CORPUS};
use projcode::matrix::export_matrix;

const EXIT_NEGATIVE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_SCALE: u8 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Parser, Debug)]
#[command(name = "projcode", version, about = "Linear codes from projective-space complements")]
struct Args {
    #[command(subcommand)]
    verb: Verb,
    /// Job configuration (TOML)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Override `limits.max_pm` from the config
    #[arg(long, global = true)]
    max_pm: Option<u64>,
    /// Reserved. Nothing here is randomized, so this flag is rejected.
    #[arg(long, global = true)]
    seedless: bool,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Build the code and print its parameters
    Build,
    /// Run every analysis requested in the config
    Analyze,
    /// Write the generator matrix in `p m n` text form
    Export,
    /// Read a matrix file and report its parameters
    Import {
        matrix: PathBuf,
        /// Also certify (2, delta)-locality by line scan
        #[arg(long)]
        delta: Option<usize>,
    },
    /// Run the regression corpus
    Corpus {
        /// Directory of case files to run instead of the bundled cases
        #[arg(long)]
        dir: Option<PathBuf>,
        /// Only run cases whose name contains this string
        #[arg(long)]
        filter: Option<String>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }
}

impl From<JobError> for Failure {
    fn from(e: JobError) -> Self {
        let code = match e {
            JobError::ConfigInvalid(_) => EXIT_CONFIG,
            JobError::ScaleLimitExceeded { .. } => EXIT_SCALE,
            JobError::Stage { .. } => EXIT_NEGATIVE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<VerbError> for Failure {
    fn from(e: VerbError) -> Self {
        match e {
            VerbError::Job(j) => j.into(),
            VerbError::Locality(projcode::locality::LocalityError::ScaleLimitExceeded { .. }) => Self {
                code: EXIT_SCALE,
                message: e.to_string(),
            },
            other => Failure::config(other.to_string()),
        }
    }
}

fn load_config(args: &Args) -> Result<JobConfig, Failure> {
    let path = args
        .config
        .as_deref()
        .ok_or_else(|| Failure::config("--config <path> is required for this verb"))?;
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg = JobConfig::from_toml(&text)?;
    if let Some(max_pm) = args.max_pm {
        cfg.limits.max_pm = max_pm;
    }
    Ok(cfg)
}

fn emit(out: Option<&Path>, body: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, body)
            .map_err(|e| Failure::config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn run(args: &Args) -> Result<u8, Failure> {
    if args.seedless {
        return Err(Failure::config(
            "--seedless is reserved: no computation here uses randomness",
        ));
    }
    let out = args.out.as_deref();
    match &args.verb {
        Verb::Build => {
            let cfg = load_config(args)?;
            let dc = cli::build(&cfg)?;
            let params = dc
                .parameters()
                .map_err(|e| Failure::from(JobError::from_code("parameters", e)))?;
            let body = match args.format {
                Format::Text => {
                    let d = params.d.map_or("-".into(), |d| d.to_string());
                    format!("[{}, {}, {}]_{}\n", params.n, params.k, d, cfg.p)
                }
                Format::Machine => json(&params),
            };
            emit(out, &body)?;
            Ok(0)
        }
        Verb::Analyze => {
            let cfg = load_config(args)?;
            let report = cli::run(&cfg)?;
            let body = match args.format {
                Format::Text => report.to_text(),
                Format::Machine => report.to_json() + "\n",
            };
            emit(out, &body)?;
            Ok(if report.is_negative() { EXIT_NEGATIVE } else { 0 })
        }
        Verb::Export => {
            let cfg = load_config(args)?;
            let dc = cli::build(&cfg)?;
            emit(out, &export_matrix(dc.code()))?;
            Ok(0)
        }
        Verb::Import { matrix, delta } => {
            let text = fs::read_to_string(matrix)
                .map_err(|e| Failure::config(format!("cannot read {}: {e}", matrix.display())))?;
            let max_pm = args.max_pm.unwrap_or(projcode::projgeom::DEFAULT_MAX_PM);
            let rep = cli::analyze_matrix(&text, max_pm, *delta)?;
            let negative = rep.locality.as_ref().is_some_and(|l| !l.certified);
            let body = match args.format {
                Format::Text => {
                    let d = rep.d.map_or("-".into(), |d| d.to_string());
                    let mut s = format!("[{}, {}, {}]_{}\n{}\n", rep.n, rep.k, d, rep.p, rep.enumerator);
                    if let Some(l) = &rep.locality {
                        s += &format!(
                            "locality (2,{}): {}\n",
                            l.delta,
                            if l.certified { "certified" } else { "not certified" }
                        );
                    }
                    s
                }
                Format::Machine => json(&rep),
            };
            emit(out, &body)?;
            Ok(if negative { EXIT_NEGATIVE } else { 0 })
        }
        Verb::Corpus { dir, filter } => {
            let summary = match dir {
                None => cli::run_corpus(BUNDLED_CORPUS.iter().copied(), filter.as_deref()),
                Some(dir) => {
                    let mut files: Vec<_> = fs::read_dir(dir)
                        .map_err(|e| Failure::config(format!("cannot read {}: {e}", dir.display())))?
                        .filter_map(|e| e.ok().map(|e| e.path()))
                        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
                        .collect();
                    files.sort();
                    let mut cases = Vec::new();
                    for f in files {
                        let name = f.file_stem().unwrap_or_default().to_string_lossy().into_owned();
                        let text = fs::read_to_string(&f)
                            .map_err(|e| Failure::config(format!("cannot read {}: {e}", f.display())))?;
                        cases.push((name, text));
                    }
                    cli::run_corpus(
                        cases.iter().map(|(n, t)| (n.as_str(), t.as_str())),
                        filter.as_deref(),
                    )
                }
            };
            let body = match args.format {
                Format::Text => summary.to_text(),
                Format::Machine => json(&summary),
            };
            emit(out, &body)?;
            Ok(if summary.all_passed() { 0 } else { EXIT_NEGATIVE })
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
