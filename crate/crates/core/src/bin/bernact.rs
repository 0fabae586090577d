//! `bernact`: runs the experiments and writes CSV reports.
//!
//! Every option can also be given in a `--config` file of `key=value`
//! lines using the long flag name as key; flags win over the file.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use bernoulli_action::bvp::{discretize_laplacian, Grid, GridKind};
use bernoulli_action::experiments::{
    cmd_arnoldi_compare, cmd_bvp_compare, cmd_delta_table, cmd_scalar_error, test_grid,
    ArnoldiCompareConfig, BvpCompareConfig, DeltaTableConfig, ScalarErrorConfig,
};
use bernoulli_action::matfunc::BandedOperator;
use bernoulli_action::report::ExperimentReport;
use bernoulli_action::Error;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "bernact",
    version,
    about = "Bernoulli generating function experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Output CSV path (stdout if absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// File of key=value settings.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads for independent parameter points.
    #[arg(long)]
    threads: Option<String>,
    /// Fill the elapsed_s column.
    #[arg(long)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Residual quantity Delta(N) per (z, N).
    DeltaTable {
        #[command(flatten)]
        common: Common,
        /// Comma list of z values.
        #[arg(long, allow_hyphen_values = true)]
        z: Option<String>,
        /// Comma list of N values.
        #[arg(long = "N")]
        modes: Option<String>,
        /// Number of residual modes summed past N.
        #[arg(long = "K")]
        tail: Option<String>,
    },
    /// Relative error of the scalar approximation over a real w grid.
    ScalarError {
        #[command(flatten)]
        common: Common,
        #[arg(long = "w-min", allow_hyphen_values = true)]
        w_min: Option<String>,
        #[arg(long = "w-max", allow_hyphen_values = true)]
        w_max: Option<String>,
        #[arg(long)]
        points: Option<String>,
        #[arg(long = "N")]
        modes: Option<String>,
        /// Comma list; fractions such as 1/8 are accepted.
        #[arg(long)]
        tau: Option<String>,
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        ell: Option<String>,
        /// Shift used for tau = 0 with ell >= 1.
        #[arg(long)]
        alpha: Option<String>,
    },
    /// Matrix errors of the classical and accelerated expansions.
    BvpCompare {
        #[command(flatten)]
        common: Common,
        /// uniform or geometric.
        #[arg(long)]
        grid: Option<String>,
        /// Grid nodes, one per line, replacing --grid.
        #[arg(long = "grid-file")]
        grid_file: Option<PathBuf>,
        /// Write the grid nodes used.
        #[arg(long = "grid-out")]
        grid_out: Option<PathBuf>,
        /// Operator in Matrix Market (.mtx) or "sub diag super" form.
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[arg(long)]
        s: Option<String>,
        #[arg(long)]
        tau: Option<String>,
        #[arg(long = "N")]
        modes: Option<String>,
        /// Classical expansion indices, p = 2n + 2.
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        ell: Option<String>,
        /// Order of the accelerated expansion.
        #[arg(long)]
        p: Option<String>,
    },
    /// Arnoldi error and orthogonality loss per step.
    ArnoldiCompare {
        #[command(flatten)]
        common: Common,
        /// 3 or 4.
        #[arg(long)]
        test: Option<String>,
        #[arg(long)]
        s: Option<String>,
        #[arg(long)]
        steps: Option<String>,
        #[arg(long)]
        tau: Option<String>,
        #[arg(long)]
        p: Option<String>,
        #[arg(long = "N")]
        modes: Option<String>,
        #[arg(long)]
        ell: Option<String>,
        /// Second Gram-Schmidt pass.
        #[arg(long)]
        reorth: bool,
    },
}

enum Failure {
    Usage(String),
    Numerical(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Pole(_) | Error::Singular(_) | Error::Evaluator(_) => {
                Failure::Numerical(e.to_string())
            }
            Error::Io(_) => Failure::Io(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Flag values layered over config-file values.
struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    fn new(
        config: Option<&Path>,
        flags: Vec<(&'static str, Option<String>)>,
    ) -> Result<Self, Failure> {
        let mut values = BTreeMap::new();
        if let Some(path) = config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
            for (i, line) in text.lines().enumerate() {
                let line = line.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let (k, v) = line
                    .split_once('=')
                    .ok_or_else(|| usage(format!("config line {}: expected key=value", i + 1)))?;
                let k = k.trim();
                let known = flags.iter().any(|(name, _)| *name == k)
                    || matches!(k, "out" | "threads" | "timing");
                if !known {
                    return Err(usage(format!("config line {}: unknown key '{k}'", i + 1)));
                }
                values.insert(k.to_string(), v.trim().trim_matches('"').to_string());
            }
        }
        for (k, v) in flags {
            if let Some(v) = v {
                values.insert(k.to_string(), v);
            }
        }
        Ok(Self { values })
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn one<T: FromStr>(&self, key: &str) -> Result<Option<T>, Failure> {
        self.raw(key).map(|v| parse_value(key, v)).transpose()
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, Failure> {
        self.raw(key)
            .map(|v| {
                v.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| parse_value(key, s))
                    .collect()
            })
            .transpose()
    }

    fn real(&self, key: &str) -> Result<Option<f64>, Failure> {
        self.raw(key).map(|v| parse_real(key, v)).transpose()
    }

    fn reals(&self, key: &str) -> Result<Option<Vec<f64>>, Failure> {
        self.raw(key)
            .map(|v| {
                v.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| parse_real(key, s))
                    .collect()
            })
            .transpose()
    }

    fn flag(&self, key: &str, cli: bool) -> Result<bool, Failure> {
        if cli {
            return Ok(true);
        }
        match self.raw(key) {
            None => Ok(false),
            Some("true" | "1" | "yes") => Ok(true),
            Some("false" | "0" | "no") => Ok(false),
            Some(v) => Err(usage(format!("{key}: expected a boolean, got '{v}'"))),
        }
    }
}

fn parse_value<T: FromStr>(key: &str, v: &str) -> Result<T, Failure> {
    v.trim()
        .parse()
        .map_err(|_| usage(format!("{key}: cannot parse '{v}'")))
}

/// A real number or a fraction `a/b`.
fn parse_real(key: &str, v: &str) -> Result<f64, Failure> {
    let x = match v.split_once('/') {
        Some((a, b)) => parse_value::<f64>(key, a)? / parse_value::<f64>(key, b)?,
        None => parse_value(key, v)?,
    };
    if !x.is_finite() {
        return Err(usage(format!("{key}: '{v}' is not a finite number")));
    }
    Ok(x)
}

fn parse_grid_kind(v: &str) -> Result<GridKind, Failure> {
    match v {
        "uniform" => Ok(GridKind::Uniform),
        "geometric" => Ok(GridKind::Geometric),
        other => Err(usage(format!(
            "grid: expected uniform or geometric, got '{other}'"
        ))),
    }
}

fn read_operator(path: &Path) -> Result<BandedOperator, Failure> {
    let op = if path.extension().is_some_and(|e| e == "mtx") {
        BandedOperator::from_matrix_market(path)
    } else {
        BandedOperator::from_triplet_file(path)
    };
    op.map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn read_grid(path: &Path) -> Result<Grid, Failure> {
    let file = File::open(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Grid::read_text(BufReader::new(file)).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), Failure> {
    let (common, settings, report) = match cli.command {
        Command::DeltaTable {
            common,
            z,
            modes,
            tail,
        } => {
            let s = Settings::new(
                common.config.as_deref(),
                vec![("z", z), ("N", modes), ("K", tail)],
            )?;
            setup_threads(&s)?;
            let mut cfg = DeltaTableConfig::default();
            if let Some(v) = s.reals("z")? {
                cfg.z = v;
            }
            if let Some(v) = s.list("N")? {
                cfg.modes = v;
            }
            if let Some(v) = s.one("K")? {
                cfg.tail = v;
            }
            let r = cmd_delta_table(&cfg)?;
            (common, s, r)
        }
        Command::ScalarError {
            common,
            w_min,
            w_max,
            points,
            modes,
            tau,
            p,
            ell,
            alpha,
        } => {
            let s = Settings::new(
                common.config.as_deref(),
                vec![
                    ("w-min", w_min),
                    ("w-max", w_max),
                    ("points", points),
                    ("N", modes),
                    ("tau", tau),
                    ("p", p),
                    ("ell", ell),
                    ("alpha", alpha),
                ],
            )?;
            setup_threads(&s)?;
            let mut cfg = ScalarErrorConfig::default();
            if let Some(v) = s.real("w-min")? {
                cfg.w_min = v;
            }
            if let Some(v) = s.real("w-max")? {
                cfg.w_max = v;
            }
            if let Some(v) = s.one("points")? {
                cfg.points = v;
            }
            if let Some(v) = s.one("N")? {
                cfg.modes = v;
            }
            if let Some(v) = s.reals("tau")? {
                cfg.taus = v;
            }
            if let Some(v) = s.list("p")? {
                cfg.orders = v;
            }
            if let Some(v) = s.list("ell")? {
                cfg.depths = v;
            }
            cfg.alpha = s.real("alpha")?;
            let r = cmd_scalar_error(&cfg)?;
            (common, s, r)
        }
        Command::BvpCompare {
            common,
            grid,
            grid_file,
            grid_out,
            matrix,
            s: size,
            tau,
            modes,
            n,
            ell,
            p,
        } => {
            let s = Settings::new(
                common.config.as_deref(),
                vec![
                    ("grid", grid),
                    ("grid-file", grid_file.map(|p| p.display().to_string())),
                    ("grid-out", grid_out.map(|p| p.display().to_string())),
                    ("matrix", matrix.map(|p| p.display().to_string())),
                    ("s", size),
                    ("tau", tau),
                    ("N", modes),
                    ("n", n),
                    ("ell", ell),
                    ("p", p),
                ],
            )?;
            setup_threads(&s)?;
            let mut cfg = BvpCompareConfig::default();
            if let Some(v) = s.raw("grid") {
                cfg.grid = parse_grid_kind(v)?;
            }
            if let Some(v) = s.one("s")? {
                cfg.s = v;
            }
            if let Some(v) = s.reals("tau")? {
                cfg.taus = v;
            }
            if let Some(v) = s.list("N")? {
                cfg.modes = v;
            }
            if let Some(v) = s.list("n")? {
                cfg.lanczos_n = v;
            }
            if let Some(v) = s.list("ell")? {
                cfg.depths = v;
            }
            if let Some(v) = s.one("p")? {
                cfg.order = v;
            }
            cfg.timing = s.flag("timing", common.timing)?;
            let grid = match (s.raw("matrix"), s.raw("grid-file")) {
                (Some(_), Some(_)) => return Err(usage("--matrix and --grid-file are exclusive")),
                (Some(m), None) => {
                    cfg.operator = Some(read_operator(Path::new(m))?);
                    None
                }
                (None, Some(g)) => {
                    let grid = read_grid(Path::new(g))?;
                    cfg.operator = Some(discretize_laplacian(&grid)?);
                    Some(grid)
                }
                (None, None) => Some(test_grid(cfg.grid, cfg.s)?),
            };
            if let Some(path) = s.raw("grid-out") {
                let grid = grid.ok_or_else(|| usage("--grid-out needs a grid, not --matrix"))?;
                let file = File::create(path).map_err(|e| Failure::Io(format!("{path}: {e}")))?;
                let mut w = BufWriter::new(file);
                grid.write_text(&mut w)?;
                w.flush().map_err(|e| Failure::Io(format!("{path}: {e}")))?;
            }
            let r = cmd_bvp_compare(&cfg)?;
            (common, s, r)
        }
        Command::ArnoldiCompare {
            common,
            test,
            s: size,
            steps,
            tau,
            p,
            modes,
            ell,
            reorth,
        } => {
            let s = Settings::new(
                common.config.as_deref(),
                vec![
                    ("test", test),
                    ("s", size),
                    ("steps", steps),
                    ("tau", tau),
                    ("p", p),
                    ("N", modes),
                    ("ell", ell),
                    ("reorth", reorth.then(|| "true".to_string())),
                ],
            )?;
            setup_threads(&s)?;
            let mut cfg = ArnoldiCompareConfig::default();
            if let Some(v) = s.one("test")? {
                cfg.test = v;
            }
            if let Some(v) = s.one("s")? {
                cfg.s = v;
            }
            if let Some(v) = s.one("steps")? {
                cfg.steps = v;
            }
            if let Some(v) = s.real("tau")? {
                cfg.tau = v;
            }
            if let Some(v) = s.one("p")? {
                cfg.order = v;
            }
            if let Some(v) = s.one("N")? {
                cfg.modes = v;
            }
            cfg.depth = s.one("ell")?;
            cfg.reorthogonalize = s.flag("reorth", false)?;
            cfg.timing = s.flag("timing", common.timing)?;
            let r = cmd_arnoldi_compare(&cfg)?;
            (common, s, r)
        }
    };
    let out = common
        .out
        .or_else(|| settings.raw("out").map(PathBuf::from));
    write_report(&report, out.as_deref())
}

fn setup_threads(s: &Settings) -> Result<(), Failure> {
    if let Some(n) = s.one::<usize>("threads")? {
        if n == 0 {
            return Err(usage("threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| usage(format!("threads: {e}")))?;
    }
    Ok(())
}

fn write_report(report: &ExperimentReport, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => {
            let file =
                File::create(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            report.write_csv(BufWriter::new(file))?;
        }
        None => report.write_csv(io::stdout().lock())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Io(m)) => {
            eprintln!("i/o error: {m}");
            ExitCode::from(1)
        }
    }
}
