//! `tricover`: probability that a random triangle in a region covers a point.

mod config;
mod report;
mod run;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use triangle_cover::Error;

use config::{load_region_source, AnchorSpec, CommandKind, KernelMethod, OutputFormat, RunConfig};

#[derive(Parser)]
#[command(
    name = "tricover",
    version,
    about = "Probability that a triangle with uniform random vertices in a region covers a point"
)]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Text, global = true)]
    output: OutputFormat,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct RegionArgs {
    /// Inline region (limacon:a=2, cardioid, square, disk, crescent, triangle,
    /// regular:n=5, slice-disk:a=0.25, offset-disk:r=0.5) or a region file.
    #[arg(long)]
    region: String,

    /// `origin`, `centroid`, or two coordinates `X Y`. Defaults to the region
    /// file's anchor, else the region's natural anchor.
    #[arg(long, num_args = 1..=2, allow_negative_numbers = true, value_name = "ANCHOR")]
    anchor: Vec<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Probability by one-dimensional quadrature (or the double-integral oracle).
    Compute {
        #[command(flatten)]
        region: RegionArgs,
        #[arg(long, value_enum, default_value_t = KernelMethod::Eq15)]
        method: KernelMethod,
        /// Absolute quadrature tolerance.
        #[arg(long, default_value_t = 1e-10)]
        tolerance: f64,
        /// Starting direction (radians) for `--method eq12`.
        #[arg(long, allow_negative_numbers = true)]
        u: Option<f64>,
        /// Cells per axis for `--method double-integral`.
        #[arg(long, default_value_t = 512)]
        panels: usize,
    },
    /// Closed-form value for a named family.
    ClosedForm {
        /// limacon, regular-polygon, triangle, square, square-diagonal,
        /// slice-disk, offset-disk or disk-average.
        family: String,
        #[command(flatten)]
        params: FamilyParams,
    },
    /// Monte Carlo estimate of the covering probability.
    Simulate {
        #[command(flatten)]
        region: RegionArgs,
        #[arg(long, default_value_t = 1_000_000)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Monte Carlo estimate for four points: the first inside the others' triangle.
    Sylvester {
        #[arg(long)]
        region: String,
        #[arg(long, default_value_t = 1_000_000)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Bounds on the probability from the smallest half-turn mass.
    Bounds {
        #[command(flatten)]
        region: RegionArgs,
    },
    /// Search for the anchor with the largest probability.
    Maximize {
        #[arg(long)]
        region: String,
        /// Grid points per axis for the initial scan (at least 8).
        #[arg(long, default_value_t = 16)]
        grid: usize,
        /// Refinement iterations after the scan.
        #[arg(long, default_value_t = 200)]
        refine: usize,
    },
    /// Closed form, quadrature and optional Monte Carlo over a parameter list.
    Sweep {
        /// limacon, regular-polygon, offset-disk, square-diagonal or slice-disk.
        family: String,
        /// Comma-separated parameter values.
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        grid: Vec<f64>,
        /// Monte Carlo samples per row; omitted means no Monte Carlo column.
        #[arg(long)]
        mc_samples: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-10)]
        tolerance: f64,
    },
    /// Re-run the configuration embedded in a json report.
    Replay {
        report: PathBuf,
    },
}

#[derive(Args)]
struct FamilyParams {
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    u: Option<f64>,
    #[arg(long)]
    v: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
}

impl FamilyParams {
    fn into_map(self) -> BTreeMap<String, f64> {
        [
            ("a", self.a),
            ("m", self.m),
            ("r", self.r),
            ("u", self.u),
            ("v", self.v),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
        .collect()
    }
}

fn base_config(command: CommandKind, output: OutputFormat) -> RunConfig {
    RunConfig {
        command,
        region_spec: None,
        region_source: None,
        anchor: None,
        family: None,
        parameters: BTreeMap::new(),
        grid: Vec::new(),
        method: None,
        u: None,
        tolerance: triangle_cover::kernel::DEFAULT_TOLERANCE,
        samples: None,
        seed: 0,
        panels: None,
        grid_size: None,
        refine_iters: None,
        output,
    }
}

fn with_region(mut cfg: RunConfig, region: String, anchor: Option<&[String]>) -> Result<RunConfig, Error> {
    cfg.region_source = load_region_source(&region)?;
    cfg.region_spec = Some(region);
    if let Some(values) = anchor {
        cfg.anchor = Some(AnchorSpec::from_args(values)?);
    }
    Ok(cfg)
}

#[derive(Deserialize)]
struct EmbeddedConfig {
    config: RunConfig,
}

fn build_config(cli: Cli) -> Result<RunConfig, Error> {
    let out = cli.output;
    Ok(match cli.command {
        Cmd::Compute {
            region,
            method,
            tolerance,
            u,
            panels,
        } => {
            let mut cfg = with_region(base_config(CommandKind::Compute, out), region.region, Some(&region.anchor))?;
            cfg.method = Some(method);
            cfg.tolerance = tolerance;
            cfg.u = u;
            if method == KernelMethod::DoubleIntegral {
                cfg.panels = Some(panels);
            }
            cfg
        }
        Cmd::ClosedForm { family, params } => {
            let mut cfg = base_config(CommandKind::ClosedForm, out);
            cfg.family = Some(family);
            cfg.parameters = params.into_map();
            cfg
        }
        Cmd::Simulate { region, n, seed } => {
            let mut cfg = with_region(base_config(CommandKind::Simulate, out), region.region, Some(&region.anchor))?;
            cfg.samples = Some(n);
            cfg.seed = seed;
            cfg
        }
        Cmd::Sylvester { region, n, seed } => {
            let mut cfg = with_region(base_config(CommandKind::Sylvester, out), region, None)?;
            cfg.samples = Some(n);
            cfg.seed = seed;
            cfg
        }
        Cmd::Bounds { region } => {
            with_region(base_config(CommandKind::Bounds, out), region.region, Some(&region.anchor))?
        }
        Cmd::Maximize { region, grid, refine } => {
            let mut cfg = with_region(base_config(CommandKind::Maximize, out), region, None)?;
            cfg.grid_size = Some(grid);
            cfg.refine_iters = Some(refine);
            cfg
        }
        Cmd::Sweep {
            family,
            grid,
            mc_samples,
            seed,
            tolerance,
        } => {
            let mut cfg = base_config(CommandKind::Sweep, out);
            cfg.family = Some(family);
            cfg.grid = grid;
            cfg.samples = mc_samples;
            cfg.seed = seed;
            cfg.tolerance = tolerance;
            cfg
        }
        Cmd::Replay { report } => {
            let text = std::fs::read_to_string(&report)
                .map_err(|e| Error::Parse(format!("cannot read report `{}`: {e}", report.display())))?;
            let embedded: EmbeddedConfig = serde_json::from_str(&text).map_err(|e| {
                Error::Parse(format!("report `{}` line {}: {e}", report.display(), e.line()))
            })?;
            embedded.config
        }
    })
}

fn exit_code(e: &Error) -> ExitCode {
    if e.is_domain() {
        ExitCode::from(2)
    } else {
        ExitCode::from(3)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match build_config(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let outcome = match run::execute(&config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let mut buf = Vec::new();
    let written = report::write_report(&mut buf, &config, &outcome)
        .and_then(|_| std::io::stdout().lock().write_all(&buf));
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: cannot write report: {e}");
            ExitCode::from(3)
        }
    }
}
