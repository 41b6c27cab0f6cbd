use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ritzcert::forms::{OperatorRep, Subspace};
use ritzcert::linalg::{parse_matrix, MatrixFile};
use ritzcert::report::{bounds_report, string_report, table1_report, ReportDocument, Status};
use ritzcert::selfcheck::run_selfcheck;
use ritzcert::{Error, Tolerances};

const EXIT_USAGE: u8 = 1;
const EXIT_NOT_APPLICABLE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

/// Certified relative eigenvalue and eigenvector bounds for Rayleigh-Ritz
/// approximations.
#[derive(Debug, Parser)]
#[command(name = "ritzcert", version, about)]
struct Cli {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ConfigArgs {
    /// Relative rank threshold for decompositions [default: n * machine epsilon]
    #[arg(long, global = true)]
    rank_tol: Option<f64>,
    /// Accepted asymmetry of input matrices, relative to their norm
    #[arg(long, global = true)]
    sym_tol: Option<f64>,
    /// Convergence tolerance of the adaptive quadrature
    #[arg(long, global = true)]
    quad_tol: Option<f64>,
    /// Relative bracket width for secular-equation roots
    #[arg(long, global = true)]
    secular_tol: Option<f64>,
    /// Seed recorded in reports and used by selfcheck
    #[arg(long, global = true, env = "RITZ_SEED", default_value_t = 42)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lower estimates for lambda_1 of the graded 2x2 family
    Table1 {
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
        eta_list: Vec<f64>,
    },
    /// Certify a test subspace of a matrix or factor read from file
    Bounds {
        #[arg(long)]
        matrix: PathBuf,
        /// Columns spanning the test subspace
        #[arg(long)]
        basis: PathBuf,
        /// Gap parameter for Temple-Kato [default: second eigenvalue]
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// The two-piece string with stiffness contrast 1 + eta^2
    String {
        #[arg(long)]
        eta: f64,
        #[arg(long, default_value_t = 1)]
        modes: usize,
        /// Cells of the finite-difference cross-check
        #[arg(long, default_value_t = 4000)]
        mesh: usize,
    },
    /// Randomized property checks
    Selfcheck {
        #[arg(long, default_value_t = 200)]
        count: usize,
    },
}

/// Tolerances, seed and output format of one invocation.
#[derive(Debug, Clone, Copy)]
struct RunConfig {
    tolerances: Tolerances<f64>,
    seed: u64,
    format: OutputFormat,
}

impl RunConfig {
    fn from_args(a: &ConfigArgs) -> Result<Self, Error> {
        let d = Tolerances::<f64>::default();
        let tolerances = Tolerances {
            rank_tol: a.rank_tol,
            sym_tol: a.sym_tol.unwrap_or(d.sym_tol),
            quad_tol: a.quad_tol.unwrap_or(d.quad_tol),
            secular_tol: a.secular_tol.unwrap_or(d.secular_tol),
        };
        tolerances.validate()?;
        Ok(Self {
            tolerances,
            seed: a.seed,
            format: a.format,
        })
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NotApplicable(_) => EXIT_NOT_APPLICABLE,
        Error::NoConvergence { .. }
        | Error::SingularOperator(_)
        | Error::BracketFailure { .. }
        | Error::InsufficientEigenvalues { .. } => EXIT_NUMERICAL,
        _ => EXIT_USAGE,
    }
}

fn read_matrix(path: &Path) -> Result<MatrixFile<f64>, Error> {
    let name = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        source_name: name.clone(),
        line: 0,
        message: e.to_string(),
    })?;
    parse_matrix(&text, &name)
}

fn bounds(
    matrix: &Path,
    basis: &Path,
    gamma: Option<f64>,
    cfg: &RunConfig,
) -> Result<ReportDocument, Error> {
    let tol = &cfg.tolerances;
    let m = read_matrix(matrix)?;
    let op = if m.is_factor {
        OperatorRep::factor(m.matrix, tol)?
    } else {
        OperatorRep::explicit(m.matrix, tol)?
    };
    let n = op.dimension().expect("matrix operators have a dimension");
    let x = read_matrix(basis)?.matrix;
    if x.rows() != n {
        return Err(Error::Parse {
            source_name: basis.display().to_string(),
            line: 1,
            message: format!(
                "basis has {} rows but the operator has dimension {n}",
                x.rows()
            ),
        });
    }
    let sub = Subspace::new(&x, tol.rank_tol_for(n))?;
    bounds_report(&op, &sub, tol, gamma, cfg.seed)
}

fn render(doc: &ReportDocument, format: OutputFormat) -> String {
    match format {
        OutputFormat::Text => doc.to_text(),
        OutputFormat::Csv => doc.to_csv(),
        OutputFormat::Json => doc.to_json(),
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    let cfg = RunConfig::from_args(&cli.config)?;
    let tol = &cfg.tolerances;
    let doc = match cli.command {
        Command::Table1 { eta_list } => table1_report(&eta_list, tol, cfg.seed)?,
        Command::Bounds {
            matrix,
            basis,
            gamma,
        } => bounds(&matrix, &basis, gamma, &cfg)?,
        Command::String { eta, modes, mesh } => string_report(eta, modes, mesh, tol, cfg.seed)?,
        Command::Selfcheck { count } => {
            if count == 0 {
                return Err(Error::InvalidArgument("count must be at least 1".into()));
            }
            let summary = run_selfcheck(cfg.seed, count);
            print!("{}", summary.render());
            return Ok(if summary.all_passed() {
                0
            } else {
                EXIT_NUMERICAL
            });
        }
    };
    print!("{}", render(&doc, cfg.format));
    Ok(match doc.status {
        Status::Ok => 0,
        Status::NotApplicable => EXIT_NOT_APPLICABLE,
        Status::CheckFailed => EXIT_NUMERICAL,
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
