use clap::{Parser, Subcommand, ValueEnum};
use shellgap::sweep::SweepVariable;
use shellgap::MethodId;
use shellgap_cli::*;
use std::path::PathBuf;
use std::process::ExitCode;

/// Resonant band gaps of square arrays of thin elastic shells.
#[derive(Parser)]
#[command(name = "shellgap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dispersion curves of one method as CSV.
    BandStructure {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value = "rayleigh")]
        method: Method,
        /// Multipole truncation order (Rayleigh).
        #[arg(long = "n", default_value_t = 5)]
        n_trunc: usize,
        /// Frequency grid points.
        #[arg(long, default_value_t = 2000)]
        grid: usize,
        /// Bloch vectors per Brillouin-zone segment.
        #[arg(long, default_value_t = 64)]
        per_segment: usize,
        #[arg(long, value_enum, default_value = "gamma-x")]
        path: BzPath,
        /// Lower end of the frequency window [Hz].
        #[arg(long, requires = "f_max")]
        f_min: Option<f64>,
        /// Upper end of the frequency window [Hz].
        #[arg(long, requires = "f_min")]
        f_max: Option<f64>,
        /// Output CSV, `-` for standard output.
        #[arg(long)]
        out: PathBuf,
        /// Also write the curves as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Gap edges of several methods as CSV.
    Gaps {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated: rayleigh, foldy, mae, cpa.
        #[arg(long, default_value = "foldy,mae,cpa")]
        methods: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Gap edges along a one-parameter sweep as CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// radius, lattice_constant, thickness or youngs_modulus.
        #[arg(long = "var")]
        variable: String,
        #[arg(long, allow_negative_numbers = true)]
        lo: f64,
        #[arg(long, allow_negative_numbers = true)]
        hi: f64,
        #[arg(long, default_value_t = 30)]
        samples: usize,
        /// Comma-separated; rayleigh is slow and off by default.
        #[arg(long, default_value = "foldy,mae,cpa")]
        methods: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Rayleigh,
    Foldy,
    Mae,
    Cpa,
}

impl From<Method> for MethodId {
    fn from(m: Method) -> Self {
        match m {
            Method::Rayleigh => MethodId::Rayleigh,
            Method::Foldy => MethodId::Foldy,
            Method::Mae => MethodId::Mae,
            Method::Cpa => MethodId::Cpa,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BzPath {
    GammaX,
    Full,
}

fn run(cli: Cli) -> CliResult<()> {
    configure_threads()?;
    match cli.command {
        Command::BandStructure { config, method, n_trunc, grid, per_segment, path, f_min, f_max, out, json } => {
            let args = BandStructureArgs {
                method: method.into(),
                n_trunc,
                grid,
                per_segment,
                path: match path {
                    BzPath::GammaX => PathKind::GammaX,
                    BzPath::Full => PathKind::Full,
                },
                f_range: f_min.zip(f_max),
            };
            cmd_band_structure(&config, &args, &out, json.as_deref())
        }
        Command::Gaps { config, methods, out, json } => cmd_gaps(&config, &parse_methods(&methods)?, &out, json.as_deref()),
        Command::Sweep { config, variable, lo, hi, samples, methods, out, json } => {
            let variable: SweepVariable = variable.parse().map_err(|e: shellgap::Error| CliError::Usage(e.to_string()))?;
            let args = SweepArgs { variable, lo, hi, samples, methods: parse_methods(&methods)? };
            cmd_sweep(&config, &args, &out, json.as_deref())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("shellgap: {msg}");
            log::debug!("exit code {}", e.exit_code());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
