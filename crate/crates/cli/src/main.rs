use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use splitstep_cli::{run, write_output, AppError, Experiment, ExperimentConfig, Format, ModelConfig, Spacing};

#[derive(Parser)]
#[command(name = "splitstep", version, about = "Run split-step decomposition experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Two-step error versus z for the GUE pair
    Fig2(Common),
    /// Stability threshold versus GUE dimension
    ZmaxGue(Common),
    /// Stability threshold versus Ising chain length
    ZmaxIsing(Common),
    /// Q(z) and gamma(z) for a pair of Pauli terms
    Gamma(Common),
    /// Fitted error order per scheme
    OrderScan(Common),
    /// Residual of the fourth-order error operator
    K4Check(Common),
}

#[derive(Args)]
struct Common {
    /// JSON file overriding the built-in defaults
    #[arg(long)]
    config: Option<PathBuf>,
    /// GUE dimension(s); a list sets the sweep for zmax-gue
    #[arg(long, value_delimiter = ',')]
    dim: Vec<usize>,
    /// Ising chain lengths
    #[arg(long, value_delimiter = ',')]
    sites: Vec<usize>,
    /// Master seed
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    realizations: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    z_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    z_max: Option<f64>,
    #[arg(long)]
    z_points: Option<usize>,
    /// Logarithmic z spacing
    #[arg(long, conflicts_with = "linear")]
    log: bool,
    /// Linear z spacing
    #[arg(long)]
    linear: bool,
    /// Scheme label (L1, S2, R3, C3, C3c, C4); repeat for several
    #[arg(long = "scheme")]
    schemes: Vec<String>,
    /// Also run the renormalized variant of every selected scheme
    #[arg(long)]
    renorm: bool,
    /// Output file (stdout if omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json
    #[arg(long)]
    format: Option<Format>,
    /// Worker threads (default: SPLITSTEP_THREADS, then all cores)
    #[arg(long)]
    threads: Option<usize>,
}

impl Command {
    fn split(self) -> (Experiment, Common) {
        match self {
            Command::Fig2(c) => (Experiment::Fig2, c),
            Command::ZmaxGue(c) => (Experiment::ZmaxGue, c),
            Command::ZmaxIsing(c) => (Experiment::ZmaxIsing, c),
            Command::Gamma(c) => (Experiment::Gamma, c),
            Command::OrderScan(c) => (Experiment::OrderScan, c),
            Command::K4Check(c) => (Experiment::K4Check, c),
        }
    }
}

fn resolve(experiment: Experiment, args: Common) -> Result<ExperimentConfig, AppError> {
    let text = match &args.config {
        Some(p) => Some(
            std::fs::read_to_string(p).map_err(|e| AppError::Config(format!("cannot read {}: {e}", p.display())))?,
        ),
        None => None,
    };
    let mut cfg = ExperimentConfig::from_defaults_and_file(experiment, text.as_deref())?;

    if !args.dim.is_empty() {
        match (experiment, &mut cfg.model) {
            (Experiment::ZmaxGue, _) => cfg.sizes = args.dim.clone(),
            (_, ModelConfig::Gue { dim }) if args.dim.len() == 1 => *dim = args.dim[0],
            (_, ModelConfig::Gue { .. }) => return Err(AppError::Config("--dim takes a single value here".into())),
            _ => return Err(AppError::Config(format!("--dim does not apply to {experiment}"))),
        }
    }
    if !args.sites.is_empty() {
        if experiment != Experiment::ZmaxIsing {
            return Err(AppError::Config(format!("--sites does not apply to {experiment}")));
        }
        cfg.sizes = args.sites.clone();
    }
    if let Some(s) = args.seed {
        cfg.master_seed = s;
    }
    if let Some(r) = args.realizations {
        cfg.realizations = r;
    }
    if let Some(v) = args.z_min {
        cfg.z_grid.min = v;
    }
    if let Some(v) = args.z_max {
        cfg.z_grid.max = v;
    }
    if let Some(v) = args.z_points {
        cfg.z_grid.points = v;
    }
    if args.log {
        cfg.z_grid.spacing = Spacing::Log;
    }
    if args.linear {
        cfg.z_grid.spacing = Spacing::Linear;
    }
    if !args.schemes.is_empty() {
        cfg.schemes = args.schemes.clone();
    }
    if args.renorm {
        let extra: Vec<String> = cfg
            .schemes
            .iter()
            .filter(|s| !s.ends_with('r'))
            .map(|s| format!("{s}r"))
            .filter(|r| !cfg.schemes.contains(r))
            .collect();
        cfg.schemes.extend(extra);
    }
    if args.out.is_some() {
        cfg.output.path = args.out;
    }
    if let Some(f) = args.format {
        cfg.output.format = f;
    }
    if args.threads.is_some() {
        cfg.threads = args.threads;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (experiment, args) = cli.command.split();
    let result = resolve(experiment, args).and_then(|cfg| {
        eprintln!("{}", serde_json::to_string(&cfg).expect("config serializes"));
        let table = run(&cfg)?;
        write_output(&table, &cfg.output)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
