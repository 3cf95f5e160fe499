//! Command-line front end for the one-level density laboratory.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod verify;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use gamma1_core::special::MellinProbe;
use gamma1_core::TestFnKind;

use commands::BlockGrid;
use config::{ConfigLayer, OutputFormat, RunConfig};
use error::{CliError, CliResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_UNCERTIFIED: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "gamma1-lab", version, about = "One-level density of the Γ₁(q) family from the Petersson formula")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub q: Option<u64>,
    #[arg(long, global = true)]
    pub q_min: Option<u64>,
    #[arg(long, global = true)]
    pub q_max: Option<u64>,
    #[arg(long, global = true)]
    pub primes_only: bool,
    #[arg(long, global = true)]
    pub k: Option<u32>,
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    #[arg(long, global = true)]
    pub testfn: Option<TestFnArg>,
    #[arg(long, global = true)]
    pub tail_eps: Option<f64>,
    /// Cap on U in s·t <= U.
    #[arg(long, global = true)]
    pub st_cap: Option<u64>,
    #[arg(long, global = true)]
    pub deterministic: bool,
    /// Worker threads (default: GAMMA1_LAB_THREADS, else all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum TestFnArg {
    Fejer,
    Bump,
}

impl From<TestFnArg> for TestFnKind {
    fn from(a: TestFnArg) -> Self {
        match a {
            TestFnArg::Fejer => TestFnKind::Fejer,
            TestFnArg::Bump => TestFnKind::Bump,
        }
    }
}

impl CommonArgs {
    fn layer(&self) -> ConfigLayer {
        ConfigLayer {
            q: self.q,
            q_min: self.q_min,
            q_max: self.q_max,
            primes_only: self.primes_only.then_some(true),
            k: self.k,
            delta: self.delta,
            testfn: self.testfn.map(Into::into),
            tail_eps: self.tail_eps,
            st_cap: self.st_cap,
            deterministic: self.deterministic.then_some(true),
            threads: self.threads,
            output_path: self.out.clone(),
            format: self.format,
        }
    }

    pub fn resolve(&self, default_format: OutputFormat) -> CliResult<RunConfig> {
        let file = self.config.as_deref().map(ConfigLayer::from_file).transpose()?;
        RunConfig::resolve(self.layer(), file, default_format)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the invariant suites.
    Verify {
        /// Only suites whose name starts with this.
        #[arg(long)]
        filter: Option<String>,
        #[arg(long, hide = true)]
        inject_fault: Option<verify::Fault>,
    },
    /// One-level density report for a single level.
    Density,
    /// Density over a range of levels, as CSV.
    Scan,
    /// Dyadic block diagnostics.
    DiagnoseBlocks {
        /// P centers; default: powers of two below q^delta.
        #[arg(long, value_delimiter = ',')]
        p_grid: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
        s_grid: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
        t_grid: Vec<f64>,
    },
    /// Mellin transform regimes on a v grid.
    MellinProbe {
        #[arg(long, default_value_t = 100.0)]
        x: f64,
        #[arg(long, default_value_t = 1.0)]
        j: f64,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        sign: i8,
        /// Default: −16π X/j. Stationary points lie at negative v.
        #[arg(long, allow_negative_numbers = true)]
        v_min: Option<f64>,
        /// Default: 16π X/j, twice the largest stationary |v|.
        #[arg(long, allow_negative_numbers = true)]
        v_max: Option<f64>,
        #[arg(long, default_value_t = 200)]
        v_points: usize,
        /// Gauss–Legendre nodes per panel.
        #[arg(long, default_value_t = 20)]
        nodes: usize,
    },
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

fn dispatch(cli: &Cli) -> CliResult<i32> {
    let default_format = match cli.command {
        Command::Density => OutputFormat::Json,
        _ => OutputFormat::Csv,
    };
    let cfg = cli.common.resolve(default_format)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| CliError::Pool(e.to_string()))?;
    pool.install(|| match &cli.command {
        Command::Verify { filter, inject_fault } => commands::cmd_verify(filter.as_deref(), *inject_fault),
        Command::Density => commands::cmd_density(&cfg),
        Command::Scan => commands::cmd_scan(&cfg),
        Command::DiagnoseBlocks { p_grid, s_grid, t_grid } => {
            let q = cfg.single_q()?;
            let p = match p_grid {
                Some(p) => p.clone(),
                None => {
                    let reach = (q as f64).powf(cfg.delta);
                    (0..).map(|j| 2f64.powi(j)).take_while(|&p| p < reach).collect()
                }
            };
            commands::cmd_diagnose_blocks(&cfg, &BlockGrid { p, s: s_grid.clone(), t: t_grid.clone() })
        }
        Command::MellinProbe { x, j, alpha, sign, v_min, v_max, v_points, nodes } => {
            let mut probe = MellinProbe::new(*x, *j, *alpha, *sign);
            probe.nodes = *nodes;
            let reach = 16.0 * std::f64::consts::PI * x / j;
            let lo = v_min.unwrap_or(-reach);
            let hi = v_max.unwrap_or(reach);
            commands::cmd_mellin_probe(&cfg, &probe, &linspace(lo, hi, *v_points))
        }
    })
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
