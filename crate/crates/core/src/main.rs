use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use monopole_yamabe::cli::{self, Command, RunConfig, TestFamily};
use monopole_yamabe::conformal::Gauge;
use monopole_yamabe::yamabe::Scheme;
use monopole_yamabe::{Error, Result};

/// Thread count for the rayon pool; results do not depend on it.
const THREADS_VAR: &str = "MONOPOLE_YAMABE_THREADS";

#[derive(Parser)]
#[command(name = "monopole-yamabe", version, about = "Yamabe test energies, radial shooting and bubble-tree budgets for LeBrun monopole metrics")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// TOML run description; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    rho_max: Option<f64>,
    /// radial-1d, axisymmetric-2d or tensor-3d
    #[arg(long)]
    scheme: Option<Scheme>,
    /// CSV destination.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Test energy of a monopole configuration.
    Energy {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_gauge)]
        gauge: Option<Gauge>,
        /// Symmetric pair at this hyperbolic distance.
        #[arg(long)]
        distance: Option<f64>,
        /// neg-dist, avg-neg-dist or log-u
        #[arg(long, value_parser = parse_family)]
        test_function: Option<TestFamily>,
    },
    /// Closed-form bounds and the orbifold existence test.
    Bounds {
        #[command(flatten)]
        common: Common,
        /// Multiplicities of the monopole points.
        #[arg(long, value_delimiter = ',')]
        multiplicities: Vec<u32>,
    },
    /// Radial integrals against their closed forms.
    Integrals {
        #[command(flatten)]
        common: Common,
    },
    /// Shooting scan over a log-spaced lambda grid.
    OdeScan {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        count: Option<usize>,
    },
    /// Exact characteristic-number budgets.
    Budgets {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<u32>,
    },
    /// Bubble tree of a degenerating family.
    Tree {
        #[command(flatten)]
        common: Common,
        /// nested-collision, boundary-pair or no-degeneration
        #[arg(long, value_parser = parse_example)]
        example: Option<cli::TreeExample>,
    },
    /// Two-point energy sweep over the pair distance.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_gauge)]
        gauge: Option<Gauge>,
        #[arg(long)]
        min: Option<f64>,
        #[arg(long)]
        max: Option<f64>,
        #[arg(long)]
        count: Option<usize>,
    },
    /// Runs a TOML description as is.
    Run { file: PathBuf },
}

fn kebab<T: serde::de::DeserializeOwned>(s: &str) -> std::result::Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|_| format!("unrecognized value `{s}`"))
}

fn parse_gauge(s: &str) -> std::result::Result<Gauge, String> {
    kebab(s)
}

fn parse_family(s: &str) -> std::result::Result<TestFamily, String> {
    kebab(s)
}

fn parse_example(s: &str) -> std::result::Result<cli::TreeExample, String> {
    kebab(s)
}

fn base_config(common: &Common, command: Command) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("reading {}: {e}", path.display())))?;
            let mut cfg: RunConfig = toml::from_str(&text).map_err(|e| Error::Config(e.message().to_string()))?;
            cfg.command = command;
            cfg
        }
        None => RunConfig::new(command),
    };
    if let Some(t) = common.tol {
        cfg.quadrature.tol = t;
    }
    if let Some(r) = common.rho_max {
        cfg.quadrature.rho_max = r;
    }
    if common.scheme.is_some() {
        cfg.quadrature.scheme = common.scheme;
    }
    if let Some(out) = &common.out {
        cfg.output = Some(out.display().to_string());
    }
    Ok(cfg)
}

fn build(cmd: Cmd) -> Result<RunConfig> {
    let mut cfg = match cmd {
        Cmd::Run { file } => {
            let text = std::fs::read_to_string(&file)
                .map_err(|e| Error::Config(format!("reading {}: {e}", file.display())))?;
            return cli::parse_config(&text);
        }
        Cmd::Energy { common, gauge, distance, test_function } => {
            let mut cfg = base_config(&common, Command::Energy)?;
            if let Some(g) = gauge {
                cfg.gauge = g;
            }
            if distance.is_some() {
                cfg.distance = distance;
                cfg.monopole.clear();
            }
            if let Some(f) = test_function {
                cfg.test_function = f;
            }
            if cfg.monopole.is_empty() && cfg.distance.is_none() && cfg.gauge == Gauge::Hyperbolic {
                // the one-point configuration at (0,0,1)
                cfg.monopole.push(cli::MonopoleEntry { x: 0.0, y: 0.0, z: 1.0, multiplicity: 1 });
            }
            cfg
        }
        Cmd::Bounds { common, multiplicities } => {
            let mut cfg = base_config(&common, Command::Bounds)?;
            if !multiplicities.is_empty() {
                // points on a line; only the multiplicities matter here
                cfg.monopole = multiplicities
                    .iter()
                    .enumerate()
                    .map(|(i, &m)| cli::MonopoleEntry { x: i as f64, y: 0.0, z: 1.0, multiplicity: m })
                    .collect();
            }
            cfg
        }
        Cmd::Integrals { common } => base_config(&common, Command::Integrals)?,
        Cmd::OdeScan { common, n, count } => {
            let mut cfg = base_config(&common, Command::OdeScan)?;
            if let Some(n) = n {
                cfg.ode.n = n;
            }
            if let Some(c) = count {
                cfg.ode.count = c;
            }
            cfg
        }
        Cmd::Budgets { common, n } => {
            let mut cfg = base_config(&common, Command::Budgets)?;
            if let Some(n) = n {
                cfg.budgets.n = n;
            }
            cfg
        }
        Cmd::Tree { common, example } => {
            let mut cfg = base_config(&common, Command::Tree)?;
            if let Some(e) = example {
                cfg.tree.example = e;
                cfg.tree.sample.clear();
            }
            cfg
        }
        Cmd::Sweep { common, gauge, min, max, count } => {
            let mut cfg = base_config(&common, Command::Sweep)?;
            if let Some(g) = gauge {
                cfg.gauge = g;
            }
            if let Some(v) = min {
                cfg.sweep.min = v;
            }
            if let Some(v) = max {
                cfg.sweep.max = v;
            }
            if let Some(c) = count {
                cfg.sweep.count = c;
            }
            cfg
        }
    };
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Cli::parse();
    if let Ok(v) = std::env::var(THREADS_VAR) {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: {THREADS_VAR} must be a positive integer, got `{v}`");
                return ExitCode::from(2);
            }
        }
    }
    let result = build(args.cmd).and_then(|cfg| {
        let out = cli::run(&cfg)?;
        print!("{}", out.report);
        if let (Some(path), Some(csv)) = (&cfg.output, &out.csv) {
            std::fs::write(path, csv).map_err(|e| Error::Config(format!("writing {path}: {e}")))?;
            println!("csv written to {path}");
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
