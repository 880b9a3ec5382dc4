//! Command handlers behind the `rajchman` binary. Each handler returns the
//! report text so that tests can run commands without spawning processes.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rajchman::classify::{
    continuity_verdict, quasi_rajchman_scan, rajchman_scan, supersequence_witnesses, Outcome, ScanConfig, Verdict,
};
use rajchman::operators::{disjointness_report, foguel_quasistability_scan, OperatorKind, SparseSet, SparseVector};
use rajchman::position::{gram_matrix, weak_stability_facets, FacetFamilies};
use rajchman::report::{self, Format};
use rajchman::spec::{MeasureSpec, OperatorSpec};
use rajchman::{Error, FourierTable, Measure};

#[derive(Debug, Parser)]
#[command(
    name = "rajchman",
    version,
    about = "Fourier coefficients of measures on the circle and operator power sequences"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coefficient table `k, re, im, abs, error_bound` for |k| ≤ K.
    Fourier {
        #[command(flatten)]
        common: Common,
        /// Print the canonical form of the input spec instead.
        #[arg(long)]
        dump_canonical: bool,
    },
    /// Continuity, Rajchman and quasi-Rajchman verdicts.
    Classify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        tol: Tolerances,
    },
    /// Gram matrix of the monomials z^j, |j| ≤ K.
    Gram {
        #[command(flatten)]
        common: Common,
    },
    /// Weak-stability facets of the position operator.
    Facets {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        tol: Tolerances,
    },
    /// Scan of ⟨F^n x; y⟩ for the Foguel operator.
    Foguel {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "e0")]
        x2: String,
        #[arg(long, default_value = "e0")]
        y1: String,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
    },
    /// Power norms of an operator, or the coercive/stable index report for
    /// an orbit when `--x0` is given.
    Blocks {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        x0: Option<String>,
        /// Coercivity level M.
        #[arg(long, default_value_t = 10.0)]
        level: f64,
        #[arg(long, default_value_t = 1e-12)]
        eps: f64,
    },
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Measure or operator spec (JSON).
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// Output path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Coefficient window.
    #[arg(long = "K")]
    pub window: Option<usize>,
    #[arg(long)]
    pub horizon: Option<u64>,
    /// Quadrature points (power of two); defaults to the smallest valid size.
    #[arg(long)]
    pub quad: Option<usize>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Args)]
pub struct Tolerances {
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    /// Vanishing threshold for supersequence witnesses; defaults to `eps`.
    #[arg(long)]
    pub eps_small: Option<f64>,
    /// Non-vanishing threshold for supersequence witnesses.
    #[arg(long, default_value_t = 0.1)]
    pub eps_big: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Csv => Format::Csv,
            OutputFormat::Json => Format::Json,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Core(Error),
}

impl CliError {
    /// 2 for bad input, 3 for resolution limits, 4 for invariant breaches.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 2,
            CliError::Core(Error::InvariantBreach(_)) => 4,
            CliError::Core(e) if e.is_resolution() => 3,
            CliError::Core(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

const DEFAULT_WINDOW: usize = 3000;
const DEFAULT_FACET_HORIZON: u64 = 2000;
const DEFAULT_FOGUEL_HORIZON: u64 = 1458;

fn read_input(common: &Common) -> CliResult<String> {
    let path = common.input.as_ref().ok_or_else(|| CliError::Io("missing --in".into()))?;
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn read_measure(common: &Common) -> CliResult<Measure> {
    Ok(MeasureSpec::parse(&read_input(common)?)?.to_measure()?)
}

fn quadrature(common: &Common, window: usize) -> usize {
    common.quad.unwrap_or_else(|| (4 * window).next_power_of_two().max(64))
}

fn table(common: &Common, measure: &Measure, window: usize) -> CliResult<FourierTable> {
    let t = measure.fourier_table(window, quadrature(common, window))?;
    t.check_invariants()?;
    Ok(t)
}

fn positive(name: &str, v: Option<u64>) -> CliResult<Option<u64>> {
    match v {
        Some(0) => Err(Error::InvalidArgument(format!("--{name} must be positive")).into()),
        v => Ok(v),
    }
}

/// Runs a command and returns the report text.
pub fn run(cli: &Cli) -> CliResult<String> {
    match &cli.command {
        Command::Fourier { common, dump_canonical } => {
            let m = read_measure(common)?;
            if *dump_canonical {
                let mut s = MeasureSpec::from_measure(&m).to_json();
                s.push('\n');
                return Ok(s);
            }
            let k = positive("K", common.window.map(|w| w as u64))?.unwrap_or(DEFAULT_WINDOW as u64) as usize;
            let t = table(common, &m, k)?;
            Ok(match common.format.into() {
                Format::Csv => report::fourier_csv(&t),
                Format::Json => report::to_json(&t),
            })
        }
        Command::Classify { common, tol } => {
            let m = read_measure(common)?;
            let k = positive("K", common.window.map(|w| w as u64))?.unwrap_or(DEFAULT_WINDOW as u64) as usize;
            let verdicts = classify(&m, &table(common, &m, k)?, tol)?;
            Ok(render_verdicts(&verdicts, common.format))
        }
        Command::Gram { common } => {
            let m = read_measure(common)?;
            let k = positive("K", common.window.map(|w| w as u64))?.unwrap_or(3) as usize;
            let g = gram_matrix(&table(common, &m, 2 * k)?, k)?;
            Ok(match common.format.into() {
                Format::Csv => report::gram_csv(&g),
                Format::Json => report::to_json(&g.entries().iter().map(|c| [c.re, c.im]).collect::<Vec<_>>()),
            })
        }
        Command::Facets { common, tol } => {
            let m = read_measure(common)?;
            let horizon = positive("horizon", common.horizon)?.unwrap_or(DEFAULT_FACET_HORIZON) as usize;
            let families = FacetFamilies::default();
            // Room for the widest pairing in the default families.
            let window = common.window.unwrap_or(horizon + 8);
            let t = table(common, &m, window)?;
            let r = weak_stability_facets(&m, &t, horizon, tol.eps, &families, &ScanConfig::default())?;
            Ok(match common.format.into() {
                Format::Csv => report::facets_csv(&r),
                Format::Json => report::to_json(&r),
            })
        }
        Command::Foguel { common, x2, y1, eps } => {
            let set = match &common.input {
                Some(_) => match OperatorSpec::parse(&read_input(common)?)?.to_operator()?.kind() {
                    OperatorKind::Foguel(s) => s.clone(),
                    _ => return Err(Error::InvalidOperator("spec is not a Foguel operator".into()).into()),
                },
                None => SparseSet::default(),
            };
            let horizon = positive("horizon", common.horizon)?.unwrap_or(DEFAULT_FOGUEL_HORIZON);
            let x2: SparseVector = x2.parse()?;
            let y1: SparseVector = y1.parse()?;
            let scan = foguel_quasistability_scan(&set, &x2, &y1, horizon, *eps)?;
            Ok(match common.format.into() {
                Format::Csv => report::foguel_csv(&scan),
                Format::Json => report::to_json(&scan),
            })
        }
        Command::Blocks { common, x0, level, eps } => {
            let op = OperatorSpec::parse(&read_input(common)?)?.to_operator()?;
            let horizon = positive("horizon", common.horizon)?.unwrap_or(50);
            match x0 {
                Some(x0) => {
                    let x0: SparseVector = x0.parse()?;
                    let r = disjointness_report(&op, &x0, &[horizon, 10 * horizon], *eps, *level, 0)?;
                    Ok(match common.format.into() {
                        Format::Csv => report::disjointness_csv(&r),
                        Format::Json => report::to_json(&r),
                    })
                }
                None => {
                    let norms = (0..=horizon).map(|n| Ok((n, op.power_norm(n)?))).collect::<CliResult<Vec<_>>>()?;
                    Ok(match common.format.into() {
                        Format::Csv => report::norms_csv(&norms),
                        Format::Json => report::to_json(&norms),
                    })
                }
            }
        }
    }
}

fn render_verdicts(verdicts: &[Verdict], format: OutputFormat) -> String {
    match format.into() {
        Format::Csv => report::verdicts_csv(verdicts),
        Format::Json => report::to_json(verdicts),
    }
}

/// Continuity from the Wiener mean at the full window, Rajchman on the
/// upper half of the window, quasi-Rajchman on the whole window. A
/// continuous measure that is not Rajchman also gets a supersequence row.
pub fn classify(measure: &Measure, table: &FourierTable, tol: &Tolerances) -> CliResult<Vec<Verdict>> {
    let window = table.window();
    let mass = table.total_mass();
    let cont = continuity_verdict(measure, table, window, tol.eps * mass)?;
    let raj = rajchman_scan(table, (window / 2).max(1), tol.eps * mass)?;
    let quasi = quasi_rajchman_scan(table, tol.eps * mass)?;
    let mut out = vec![cont.spectral, raj.clone(), quasi];
    if cont.structural && raj.fails() {
        let eps_small = tol.eps_small.unwrap_or(tol.eps) * mass;
        out.push(
            match supersequence_witnesses(measure, table, eps_small, tol.eps_big * mass, &ScanConfig::default()) {
                Ok(s) => Verdict {
                    property: "supersequence".into(),
                    outcome: Outcome::Holds,
                    residual: 0.0,
                    horizon: s.m_witness.horizon(),
                    tolerance: eps_small,
                    witness: Some(s.m_witness),
                },
                Err(Error::FailsToCertify { horizon, .. }) => Verdict {
                    property: "supersequence".into(),
                    outcome: Outcome::UndecidedAtHorizon,
                    residual: 0.0,
                    horizon: horizon as u64,
                    tolerance: eps_small,
                    witness: None,
                },
                Err(e) => return Err(e.into()),
            },
        );
    }
    Ok(out)
}

/// Writes the report to `--out` or stdout.
pub fn emit(cli: &Cli, text: &str) -> CliResult<()> {
    let common = match &cli.command {
        Command::Fourier { common, .. }
        | Command::Classify { common, .. }
        | Command::Gram { common }
        | Command::Facets { common, .. }
        | Command::Foguel { common, .. }
        | Command::Blocks { common, .. } => common,
    };
    match &common.out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
