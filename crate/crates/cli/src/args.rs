use clap::{Args, Parser, Subcommand, ValueEnum};
use lpmax_core::experiments::ProfileName;
use lpmax_core::{RadiiSet, Result, TorusGrid};
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Debug, Parser)]
#[command(name = "lpmax", version, about = "Maximal operators, Littlewood-Paley norms and the lacunary counterexample on a periodic grid")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Explicit grid `L,M`; overrides the profile's main grid.
    #[arg(long, global = true, value_parser = parse_grid)]
    pub grid: Option<TorusGrid>,
    /// Named profile: quick, reference or large.
    #[arg(long, global = true, default_value = "quick")]
    pub profile: ProfileName,
    /// Radii for `compute`: dyadic, all, or a list k1,k2,...
    #[arg(long, global = true, default_value = "dyadic")]
    pub radii: RadiiSpec,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Band-limit tolerance for inverse dilations in `verify`.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply a maximal operator to a grid-function file.
    Compute {
        input: PathBuf,
        #[arg(long, value_enum)]
        op: Operator,
        /// Kernel for `--op tk`: diamond, box, bump, odd-bump.
        #[arg(long, default_value = "diamond")]
        kernel: String,
    },
    /// Print the B-norm report of a grid-function file.
    Bnorm { input: PathBuf },
    /// Run one parameter scan and write its table.
    Scan {
        #[arg(value_enum)]
        name: ScanName,
        #[arg(long)]
        n_min: Option<usize>,
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long, allow_negative_numbers = true)]
        j_min: Option<i32>,
        #[arg(long, allow_negative_numbers = true)]
        j_max: Option<i32>,
        #[arg(long, default_value = "diamond")]
        kernel: String,
    },
    /// Run the verification suite against the stored calibration.
    Verify {
        /// Calibration file (default: the fixture built into the binary).
        #[arg(long)]
        calibration: Option<PathBuf>,
        /// Also write a calibration derived from this run's measurements.
        #[arg(long)]
        write_calibration: Option<PathBuf>,
    },
    /// Print admissible lacunary depths per grid, or the full record for one N.
    Describe {
        #[arg(long)]
        n: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Operator {
    Hl,
    Sharp,
    Diamond,
    Tk,
}

impl Operator {
    pub fn name(self) -> &'static str {
        match self {
            Operator::Hl => "hl",
            Operator::Sharp => "sharp",
            Operator::Diamond => "diamond",
            Operator::Tk => "tk",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScanName {
    Ratio,
    KernelDecay,
    LpFacts,
    Glambda,
    Lacunary,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RadiiSpec {
    Dyadic,
    All,
    List(Vec<usize>),
}

impl RadiiSpec {
    pub fn resolve(&self, grid: &TorusGrid) -> Result<RadiiSet> {
        match self {
            RadiiSpec::Dyadic => Ok(RadiiSet::dyadic(grid)),
            RadiiSpec::All => Ok(RadiiSet::all(grid)),
            RadiiSpec::List(k) => RadiiSet::new(grid, k.clone()),
        }
    }
}

impl FromStr for RadiiSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "dyadic" => Ok(RadiiSpec::Dyadic),
            "all" => Ok(RadiiSpec::All),
            list => list
                .split(',')
                .map(|k| k.trim().parse::<usize>().map_err(|e| format!("radius '{k}': {e}")))
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(RadiiSpec::List),
        }
    }
}

impl std::fmt::Display for RadiiSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RadiiSpec::Dyadic => write!(f, "dyadic"),
            RadiiSpec::All => write!(f, "all"),
            RadiiSpec::List(k) => {
                let parts: Vec<String> = k.iter().map(|v| v.to_string()).collect();
                write!(f, "{}", parts.join(","))
            }
        }
    }
}

fn parse_grid(s: &str) -> std::result::Result<TorusGrid, String> {
    let (l, m) = s.split_once(',').ok_or("expected L,M")?;
    let l: f64 = l.trim().parse().map_err(|e| format!("L: {e}"))?;
    let m: usize = m.trim().parse().map_err(|e| format!("M: {e}"))?;
    TorusGrid::new(l, m).map_err(|e| e.to_string())
}
