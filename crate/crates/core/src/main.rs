use std::f64::consts::PI;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use zenosim::config::{
    BranchSpec, DephasingConfig, EffortConfig, HamiltonianConfig, IonConfig, ModeName, OutputConfig, OutputFormat,
    ProjectorConfig, ScenarioConfig, ScenarioKind,
};
use zenosim::output::render;
use zenosim::scenario::run_scenario;
use zenosim::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "zenosim", version, about = "Projection-event and Zeno-dynamics simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a scenario described by a JSON config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `root_seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides `output.path`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
    /// Two-level Rabi drive interrupted by repeated process 1.
    Zeno(ZenoArgs),
    /// Fixed-T sweep over event counts with a log-log leakage fit.
    Sweep(SweepArgs),
    /// Calcium-ion uncertainty estimate.
    Calcium(CalciumArgs),
    /// Vesicle-release branch mixture weights.
    Branch(BranchArgs),
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ModeArg {
    Expected,
    Sampled,
}

#[derive(Args, Debug)]
struct OutArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Defaults to the output file extension, else json.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Args, Debug)]
struct DriveArgs {
    /// Rabi frequency ω of H = (ω/2) σ_x.
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    /// Total time T.
    #[arg(long, default_value_t = PI)]
    total_time: f64,
    /// Pointer-basis dephasing rate (computational basis).
    #[arg(long)]
    dephasing_rate: Option<f64>,
}

#[derive(Args, Debug)]
struct ZenoArgs {
    #[command(flatten)]
    drive: DriveArgs,
    /// Number of events N.
    #[arg(long, conflicts_with = "effort")]
    events: Option<usize>,
    /// Effort in [0, 1]; needs --rate-min and --rate-max.
    #[arg(long, requires_all = ["rate_min", "rate_max"])]
    effort: Option<f64>,
    #[arg(long)]
    rate_min: Option<f64>,
    #[arg(long)]
    rate_max: Option<f64>,
    #[arg(long, value_enum, default_value = "expected")]
    mode: ModeArg,
    #[arg(long)]
    trajectories: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Include per-trajectory event logs.
    #[arg(long)]
    record_events: bool,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    drive: DriveArgs,
    #[arg(long, value_delimiter = ',', default_value = "100,200,400,800")]
    counts: Vec<usize>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct CalciumArgs {
    #[arg(long)]
    mass_u: Option<f64>,
    #[arg(long)]
    temperature_k: Option<f64>,
    #[arg(long)]
    channel_width_nm: Option<f64>,
    #[arg(long)]
    transit_distance_nm: Option<f64>,
    #[arg(long)]
    ion_diameter_nm: Option<f64>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct BranchArgs {
    #[arg(long)]
    terminals: u32,
    #[arg(long)]
    probability: f64,
    #[command(flatten)]
    out: OutArgs,
}

fn output_config(out: &OutArgs) -> Option<OutputConfig> {
    if out.out.is_none() && out.format.is_none() {
        return None;
    }
    Some(OutputConfig {
        path: out.out.clone(),
        format: out.format.map(FormatArg::into),
    })
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

fn two_level(kind: ScenarioKind, drive: &DriveArgs) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::new(kind);
    cfg.hamiltonian = Some(HamiltonianConfig::Rabi { omega: drive.omega });
    cfg.projector = Some(ProjectorConfig::Basis {
        indices: vec![0],
        label: Some("E".into()),
    });
    cfg.total_time = Some(drive.total_time);
    cfg.dephasing = drive.dephasing_rate.map(|rate| DephasingConfig { rate, basis: None });
    cfg
}

fn build_config(command: Command) -> Result<ScenarioConfig, Error> {
    Ok(match command {
        Command::Run {
            config,
            seed,
            out,
            format,
        } => {
            let mut cfg = ScenarioConfig::from_path(&config)?;
            if seed.is_some() {
                cfg.root_seed = seed;
            }
            if out.is_some() || format.is_some() {
                let mut o = cfg.output.take().unwrap_or(OutputConfig {
                    path: None,
                    format: None,
                });
                if out.is_some() {
                    o.path = out;
                }
                if let Some(f) = format {
                    o.format = Some(f.into());
                }
                cfg.output = Some(o);
            }
            cfg
        }
        Command::Zeno(args) => {
            let mut cfg = two_level(ScenarioKind::Zeno, &args.drive);
            cfg.event_count = args.events;
            if let Some(effort) = args.effort {
                cfg.effort = Some(EffortConfig {
                    effort,
                    rate_min: args.rate_min.unwrap_or_default(),
                    rate_max: args.rate_max.unwrap_or_default(),
                });
            }
            cfg.mode = Some(match args.mode {
                ModeArg::Expected => ModeName::Expected,
                ModeArg::Sampled => ModeName::Sampled,
            });
            cfg.trajectories = args.trajectories;
            cfg.root_seed = args.seed;
            cfg.record_events = args.record_events;
            cfg.output = output_config(&args.out);
            cfg
        }
        Command::Sweep(args) => {
            let mut cfg = two_level(ScenarioKind::ZenoSweep, &args.drive);
            cfg.counts = Some(args.counts);
            cfg.output = output_config(&args.out);
            cfg
        }
        Command::Calcium(args) => {
            let d = IonConfig::default();
            let mut cfg = ScenarioConfig::new(ScenarioKind::Calcium);
            cfg.ion = Some(IonConfig {
                mass_u: args.mass_u.unwrap_or(d.mass_u),
                temperature_k: args.temperature_k.unwrap_or(d.temperature_k),
                channel_width_nm: args.channel_width_nm.unwrap_or(d.channel_width_nm),
                transit_distance_nm: args.transit_distance_nm.unwrap_or(d.transit_distance_nm),
                ion_diameter_nm: args.ion_diameter_nm.unwrap_or(d.ion_diameter_nm),
            });
            cfg.output = output_config(&args.out);
            cfg
        }
        Command::Branch(args) => {
            let mut cfg = ScenarioConfig::new(ScenarioKind::Branch);
            cfg.branch = Some(BranchSpec {
                terminal_count: args.terminals,
                release_probability: args.probability,
            });
            cfg.output = output_config(&args.out);
            cfg
        }
    })
}

fn run(command: Command) -> Result<(), Error> {
    let cfg = build_config(command)?;
    let record = run_scenario(&cfg)?;
    eprintln!("wall time: {:.3} s", record.wall_time.as_secs_f64());
    if cfg.output_path().is_none() {
        let text = render(&record, cfg.output_format())?;
        std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| Error::Io {
                path: "<stdout>".into(),
                source,
            })?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_error() { EXIT_CONFIG } else { EXIT_RUNTIME })
        }
    }
}
