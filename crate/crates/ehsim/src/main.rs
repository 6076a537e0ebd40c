use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ehsim::net::{run_endpoint, Endpoint, Role};
use ehsim::{load_selected, run_experiment, Error, Experiment, Outcome, RunOptions};

/// Electrohydraulic haptic device simulator.
#[derive(Parser)]
#[command(name = "ehsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON config file (falls back to $EHSIM_CONFIG, then defaults).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Simulated duration, ms.
    #[arg(long, global = true)]
    duration: Option<f64>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the mixing parameter to the built-in squeeze-force table.
    Calibrate(Sub),
    /// Squeeze force against stack displacement.
    ForceCurve(Sub),
    /// Finger force over the full pinch stroke at the calibration voltage.
    MaxForce(Sub),
    /// Open-loop voltage step and 10-90 % rise time.
    StepResponse(Sub),
    /// Closed-loop tracking of the configured force target.
    Track(Sub),
    /// Composite-waveform drive and force ripple.
    Vibrate(Sub),
    /// Bilateral teleoperation.
    Teleop(TeleopArgs),
}

#[derive(Args)]
struct Sub {
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, ValueEnum)]
enum TeleopRole {
    Master,
    Slave,
    /// Both ends in-process under the deterministic scheduler.
    Demo,
}

#[derive(Args)]
struct TeleopArgs {
    role: TeleopRole,
    /// Accept the peer on this address.
    #[arg(long, conflicts_with = "connect")]
    listen: Option<String>,
    /// Connect to the peer at this address.
    #[arg(long)]
    connect: Option<String>,
    #[command(flatten)]
    common: Common,
}

fn run(cli: Cli) -> Result<Outcome, Error> {
    let (common, job) = match cli.command {
        Command::Calibrate(s) => (s.common, Ok(Experiment::Calibrate)),
        Command::ForceCurve(s) => (s.common, Ok(Experiment::ForceCurve)),
        Command::MaxForce(s) => (s.common, Ok(Experiment::MaxForce)),
        Command::StepResponse(s) => (s.common, Ok(Experiment::StepResponse)),
        Command::Track(s) => (s.common, Ok(Experiment::Track)),
        Command::Vibrate(s) => (s.common, Ok(Experiment::Vibrate)),
        Command::Teleop(t) => {
            let endpoint = match (t.listen, t.connect) {
                (Some(a), None) => Some(Endpoint::Listen(a)),
                (None, Some(a)) => Some(Endpoint::Connect(a)),
                _ => None,
            };
            let job = match (t.role, endpoint) {
                (TeleopRole::Demo, None) => Ok(Experiment::TeleopDemo),
                (TeleopRole::Demo, Some(_)) => {
                    return Err(Error::Usage("demo runs in-process; drop --listen/--connect".into()))
                }
                (TeleopRole::Master, Some(e)) => Err((Role::Master, e)),
                (TeleopRole::Slave, Some(e)) => Err((Role::Slave, e)),
                (_, None) => {
                    return Err(Error::Usage("master and slave need --listen or --connect".into()))
                }
            };
            (t.common, job)
        }
    };
    let mut cfg = load_selected(common.config.as_deref())?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    let outcome = match job {
        Ok(exp) => run_experiment(exp, &cfg, RunOptions { duration: common.duration })?,
        Err((role, endpoint)) => run_endpoint(role, &endpoint, &cfg, common.duration)?,
    };
    outcome.write_to(&common.out)?;
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = Error::Usage(e.kind().to_string());
            eprint!("{}", e.render());
            eprintln!("{}", err.to_json_line());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json_line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
