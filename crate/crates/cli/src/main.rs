use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mvdrisk_cli::config::ScenarioConfig;
use mvdrisk_cli::{
    cmd_example_curves, cmd_forward, cmd_invert, cmd_simulate, CliError, CommandOutput,
    ForwardOverrides, InvertFormat, InvertOverrides, SimulateOverrides,
};

const PRECEDENCE: &str = "\
The scenario config is a JSON file given by path, or read from standard input
when the path is omitted or `-`. Command-line flags override the matching
config fields.

Exit codes: 0 success, 2 config error, 3 numeric error.";

#[derive(Parser)]
#[command(
    name = "mvdrisk",
    version,
    about = "Expected loss, PD and LGD curves from a market-value-decline distribution",
    after_help = PRECEDENCE
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArg {
    /// Scenario config file (JSON); `-` or omitted reads standard input
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Emit `lvr,el,lgd_a,pd_l,lgd_l` over the configured LVR grid
    #[command(after_help = PRECEDENCE)]
    Forward {
        #[command(flatten)]
        config: ConfigArg,
        /// Arrears-default probability (overrides `p_a`)
        #[arg(long = "p-a")]
        p_a: Option<f64>,
        /// Minimum LGD floor (overrides `lgd_min`)
        #[arg(long)]
        lgd_min: Option<f64>,
        /// Quadrature strip width (overrides `quadrature.step`)
        #[arg(long)]
        quad_step: Option<f64>,
    },
    /// Invert the configured EL curve into implied MVD strip masses
    #[command(after_help = PRECEDENCE)]
    Invert {
        #[command(flatten)]
        config: ConfigArg,
        /// Strip width and LVR increment (overrides `inversion.step`)
        #[arg(long)]
        step: Option<f64>,
        /// Arrears-default probability (overrides `inversion.p_a`)
        #[arg(long = "p-a")]
        p_a: Option<f64>,
        /// Highest LVR matched (overrides `inversion.max_lvr`)
        #[arg(long)]
        max_lvr: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Monte Carlo estimate of EL, liquidation PD and LGD at one LVR
    #[command(after_help = PRECEDENCE)]
    Simulate {
        #[command(flatten)]
        config: ConfigArg,
        /// Arrears-default probability (overrides `p_a`)
        #[arg(long = "p-a")]
        p_a: Option<f64>,
        /// Loan-to-value ratio (overrides `simulation.lvr`)
        #[arg(long)]
        lvr: Option<f64>,
        /// Number of trials (overrides `simulation.n_trials`)
        #[arg(long)]
        n_trials: Option<u64>,
        /// Generator seed (overrides `simulation.seed`)
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Emit the reference parametric EL curve over LVR 0.01 to 1.80
    ExampleCurves,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn load(arg: &ConfigArg) -> Result<ScenarioConfig, CliError> {
    let text = match arg.config.as_deref() {
        Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?,
        _ => {
            let mut s = String::new();
            io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| CliError::Config(format!("cannot read standard input: {e}")))?;
            s
        }
    };
    ScenarioConfig::from_json(&text)
}

fn run(cli: Cli) -> Result<CommandOutput, CliError> {
    match cli.command {
        Command::Forward {
            config,
            p_a,
            lgd_min,
            quad_step,
        } => cmd_forward(
            &load(&config)?,
            &ForwardOverrides {
                p_a,
                lgd_min,
                quad_step,
            },
        ),
        Command::Invert {
            config,
            step,
            p_a,
            max_lvr,
            format,
        } => cmd_invert(
            &load(&config)?,
            &InvertOverrides {
                step,
                p_a,
                max_lvr,
                format: match format {
                    Format::Csv => InvertFormat::Csv,
                    Format::Json => InvertFormat::Json,
                },
            },
        ),
        Command::Simulate {
            config,
            p_a,
            lvr,
            n_trials,
            seed,
        } => cmd_simulate(
            &load(&config)?,
            &SimulateOverrides {
                p_a,
                lvr,
                n_trials,
                seed,
            },
        ),
        Command::ExampleCurves => Ok(cmd_example_curves()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            let mut stdout = io::stdout().lock();
            if stdout.write_all(out.stdout.as_bytes()).is_err() {
                return ExitCode::from(1);
            }
            for line in out.stderr {
                eprintln!("{line}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("mvdrisk: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
