use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use polarization_cli::commands::{self, CommandError, ComputeArgs, Format};
use polarization_cli::service::{self, AppState};
use polarization_core::bench::Suite;
use polarization_core::pipeline::ErrorDocument;

/// Contracted generalized polarization tensors of planar inclusions.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the tensor of one shape
    Compute(ComputeArgs),
    /// Run a parameter sweep and print one record per configuration
    Benchmark {
        /// fig1, fig2, fig3, fig4 or timing
        suite: Suite,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Trace an image (PNG, PBM/PGM/PPM/PAM or BMP; dark shape on light
    /// background) into a contour shape
    Import {
        image: PathBuf,
        #[arg(long, default_value_t = service::DEFAULT_IMPORT_POINTS)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Start the HTTP service
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        /// Computations allowed to run at once (default: available cores)
        #[arg(long)]
        slots: Option<usize>,
    },
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Compute(args) => {
            let doc = commands::run_compute(&args)?;
            let text = match args.format {
                Format::Json => commands::to_json(&doc)?,
                Format::Csv => commands::tensor_csv(&doc)?,
            };
            for w in &doc.warnings {
                log::warn!("{w}");
            }
            commands::emit(args.out.as_deref(), &text)
        }
        Command::Benchmark { suite, out, format } => {
            let rows = commands::run_benchmark(suite);
            let text = match format {
                Format::Csv => commands::bench_csv(&rows)?,
                Format::Json => commands::to_json(&rows)?,
            };
            commands::emit(out.as_deref(), &text)
        }
        Command::Import { image, points, out } => {
            let result = commands::run_import(&image, points)?;
            for w in &result.warnings {
                log::warn!("{w}");
            }
            commands::emit(out.as_deref(), &commands::to_json(&result)?)
        }
        Command::Serve { port, host, slots } => {
            let state = slots.map(AppState::new).unwrap_or_default();
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(service::serve(SocketAddr::new(host, port), state))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let doc = match e.downcast_ref::<CommandError>() {
                Some(c) => c.document.clone(),
                None => ErrorDocument::new("error", format!("{e:#}"), None),
            };
            eprintln!("error: {}", doc.error.message);
            if let Ok(text) = commands::to_json(&doc) {
                print!("{text}");
            }
            ExitCode::FAILURE
        }
    }
}
