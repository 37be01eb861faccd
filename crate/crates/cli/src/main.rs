use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use distvar::certify::Grids;
use distvar::inner::DiscGrid;
use distvar_cli::{cmd_batch, cmd_certify, cmd_demo, cmd_variety, parse_disc_grid, Format, Options};

#[derive(Parser)]
#[command(name = "distvar", version, about = "Distinguished-variety certificates for commuting matrix pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Annihilation tolerance for the defining polynomial.
    #[arg(long, default_value_t = distvar::certify::TOL_ANN)]
    tol: f64,
    #[arg(long, default_value_t = 2048)]
    boundary_samples: usize,
    /// Disc grid as RADIIxANGLES.
    #[arg(long, default_value = "64x256", value_parser = parse_disc_grid)]
    disc_samples: DiscGrid,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for report, sample and plot files.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

impl Common {
    fn options(&self) -> Options {
        Options {
            tol: self.tol,
            grids: Grids { boundary: self.boundary_samples.max(1), disc: self.disc_samples },
            seed: self.seed,
            out: self.out.clone(),
            format: self.format,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Defining polynomial and distinguished certificate of an inner function.
    Variety {
        psi: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Full certificate pipeline for a pair file or generator recipe.
    Certify {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Seeded recipes run in parallel with a pass-rate table.
    Batch {
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[command(flatten)]
        common: Common,
    },
    /// The w^2 = z walkthrough.
    Demo {
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match &cli.command {
        Command::Variety { psi, common } => cmd_variety(psi, &common.options()),
        Command::Certify { input, common } => cmd_certify(input, &common.options()),
        Command::Batch { count, common } => cmd_batch(*count, &common.options()),
        Command::Demo { common } => cmd_demo(&common.options()),
    };
    print!("{}", out.stdout);
    ExitCode::from(out.exit.code() as u8)
}
