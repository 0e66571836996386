//! `ndlt` — needlet analysis on the sphere and rotation group.

use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

use ndlt_cli::commands::{self, Direction, OutputFormat};
use ndlt_core::harness::Precision;
use ndlt_core::quadrature::Manifold;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ManifoldArg {
    S2,
    So3,
}

impl From<ManifoldArg> for Manifold {
    fn from(m: ManifoldArg) -> Manifold {
        match m {
            ManifoldArg::S2 => Manifold::S2,
            ManifoldArg::So3 => Manifold::So3,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PrecisionArg {
    Single,
    Double,
}

impl From<PrecisionArg> for Precision {
    fn from(p: PrecisionArg) -> Precision {
        match p {
            PrecisionArg::Single => Precision::Single,
            PrecisionArg::Double => Precision::Double,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
    Csv,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> OutputFormat {
        match f {
            FormatArg::Text => OutputFormat::Text,
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Csv => OutputFormat::Csv,
        }
    }
}

/// Needlet analysis on S² and SO(3): quadrature rules, generalized Fourier
/// transforms, tight-frame decomposition, spectral convolution and
/// verification reports, all through one binary container format.
#[derive(Debug, Parser)]
#[command(name = "ndlt", version, max_term_width = 100)]
struct Cli {
    /// Seed for every randomized command.
    #[arg(long, global = true, default_value_t = 20260810)]
    seed: u64,

    /// Arithmetic width for verification pipelines.
    #[arg(long, global = true, value_enum, default_value_t = PrecisionArg::Double)]
    precision: PrecisionArg,

    /// Report format for the verify subcommands.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Emit a polynomial-exact quadrature rule.
    Quadrature {
        #[arg(long, value_enum)]
        manifold: ManifoldArg,
        #[arg(long)]
        bandwidth: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate signals: random spectra, unit harmonics, molecular potentials.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Forward (grid to spectrum) or inverse (spectrum to grid) transform.
    Transform {
        #[arg(long, value_enum)]
        direction: DirectionArg,
        #[arg(long, value_enum)]
        manifold: ManifoldArg,
        #[arg(long, value_name = "FILE")]
        r#in: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Multi-level needlet decomposition of a spectral container.
    Decompose {
        #[arg(long, value_name = "FILE")]
        r#in: PathBuf,
        /// Coarse scale J0.
        #[arg(long)]
        j0: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rebuild the spectrum from needlet coefficients.
    Reconstruct {
        #[arg(long, value_name = "FILE")]
        r#in: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Spectral convolution of a signal with a filter.
    Convolve {
        #[arg(long, value_name = "FILE")]
        signal: PathBuf,
        #[arg(long, value_name = "FILE")]
        filter: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rotate a spectral or needlet container by ZYZ Euler angles.
    Rotate {
        #[arg(long, value_name = "FILE")]
        r#in: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Soft-threshold the high-pass bands of a needlet container.
    Shrink {
        #[arg(long, value_name = "FILE")]
        r#in: PathBuf,
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Halve the bandwidth of a spectral container.
    Pool {
        #[arg(long, value_name = "FILE")]
        r#in: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Dump sampled filter and generator profiles as CSV.
    Filters {
        /// Number of grid intervals on [0, 1].
        #[arg(long, default_value_t = 1000)]
        grid: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a verification report.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Sweep the shrinkage noise level; writes CSV (sigma, error, compression).
    SweepSigma {
        #[arg(long, default_value_t = 1e-7)]
        from: f64,
        #[arg(long, default_value_t = 1.0)]
        to: f64,
        #[arg(long, default_value_t = 15)]
        points: usize,
        #[arg(long, default_value_t = 64)]
        bandwidth: usize,
        #[arg(long, default_value_t = 2)]
        j0: usize,
        /// Rotations sampled for the equivariance maximum.
        #[arg(long, default_value_t = 5)]
        rotations: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DirectionArg {
    Fwd,
    Inv,
}

#[derive(Debug, Subcommand)]
enum GenCommand {
    /// Random band-limited spectrum with per-degree decay (1+l)^-decay.
    Random {
        #[arg(long, value_enum)]
        manifold: ManifoldArg,
        #[arg(long)]
        bandwidth: usize,
        #[arg(long, default_value_t = 1)]
        channels: usize,
        #[arg(long, default_value_t = 1.0)]
        decay: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// A single unit coefficient at (l, m[, n]).
    Harmonic {
        #[arg(long, value_enum, default_value_t = ManifoldArg::S2)]
        manifold: ManifoldArg,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        m: isize,
        /// Column order for SO(3) containers.
        #[arg(long, default_value_t = 0)]
        n: isize,
        /// Container bandwidth; defaults to the degree itself.
        #[arg(long)]
        bandwidth: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Coulomb-style potential on an atom-centered unit sphere.
    Molecule {
        /// Text file with one `charge x y z` line per atom.
        #[arg(long, value_name = "FILE")]
        atoms: PathBuf,
        /// Index of the center atom.
        #[arg(long)]
        center: usize,
        /// Charge selecting the contributing atoms.
        #[arg(long)]
        charge: f64,
        #[arg(long, default_value_t = 20)]
        bandwidth: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
enum VerifyCommand {
    /// Operator ablation: equivariance error per operator and precision.
    Equivariance {
        #[arg(long, default_value_t = 16)]
        bandwidth: usize,
        #[arg(long, default_value_t = 1e-3)]
        sigma: f64,
        #[arg(long, default_value_t = 10)]
        trials: usize,
    },
    /// Tight-frame residuals on both manifolds.
    TightFrame {
        #[arg(long, default_value_t = 16)]
        bandwidth: usize,
        #[arg(long, default_value_t = 2)]
        j0: usize,
        #[arg(long, default_value_t = 10)]
        trials: usize,
    },
    /// Partition-of-unity and refinement residuals of the filter bank.
    Partition {
        /// Number of grid intervals.
        #[arg(long, default_value_t = 10_000)]
        grid: usize,
    },
}

fn run(cli: Cli) -> ndlt_cli::Result<()> {
    let format: OutputFormat = cli.format.into();
    match cli.command {
        Command::Quadrature {
            manifold,
            bandwidth,
            out,
        } => commands::quadrature(manifold.into(), bandwidth, &out),
        Command::Gen(gen) => match gen {
            GenCommand::Random {
                manifold,
                bandwidth,
                channels,
                decay,
                out,
            } => commands::gen_random(manifold.into(), bandwidth, channels, decay, cli.seed, &out),
            GenCommand::Harmonic {
                manifold,
                l,
                m,
                n,
                bandwidth,
                out,
            } => commands::gen_harmonic(manifold.into(), l, m, n, bandwidth, &out),
            GenCommand::Molecule {
                atoms,
                center,
                charge,
                bandwidth,
                out,
            } => commands::gen_molecule(&atoms, center, charge, bandwidth, &out),
        },
        Command::Transform {
            direction,
            manifold,
            r#in,
            out,
        } => {
            let direction = match direction {
                DirectionArg::Fwd => Direction::Forward,
                DirectionArg::Inv => Direction::Inverse,
            };
            commands::transform(direction, manifold.into(), &r#in, &out)
        }
        Command::Decompose { r#in, j0, out } => commands::decompose_cmd(&r#in, j0, &out),
        Command::Reconstruct { r#in, out } => commands::reconstruct_cmd(&r#in, &out),
        Command::Convolve {
            signal,
            filter,
            out,
        } => commands::convolve(&signal, &filter, &out),
        Command::Rotate {
            r#in,
            alpha,
            beta,
            gamma,
            out,
        } => commands::rotate_cmd(&r#in, alpha, beta, gamma, &out),
        Command::Shrink { r#in, sigma, out } => commands::shrink_cmd(&r#in, sigma, &out),
        Command::Pool { r#in, out } => commands::pool_cmd(&r#in, &out),
        Command::Filters { grid, out } => commands::filters(grid, &out),
        Command::Verify(what) => {
            let report = match what {
                VerifyCommand::Equivariance {
                    bandwidth,
                    sigma,
                    trials,
                } => commands::verify_equivariance(bandwidth, sigma, trials, cli.seed, format)?,
                VerifyCommand::TightFrame {
                    bandwidth,
                    j0,
                    trials,
                } => commands::verify_tight_frame(bandwidth, j0, trials, cli.seed, format)?,
                VerifyCommand::Partition { grid } => commands::verify_partition(grid, format)?,
            };
            print!("{report}");
            Ok(())
        }
        Command::SweepSigma {
            from,
            to,
            points,
            bandwidth,
            j0,
            rotations,
            out,
        } => commands::sweep_sigma(
            from,
            to,
            points,
            bandwidth,
            j0,
            rotations,
            cli.seed,
            cli.precision.into(),
            &out,
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(64);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ndlt: {e}");
            ExitCode::from(u8::try_from(e.exit_code()).unwrap_or(1))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndlt_cli::error::CliError;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn error_codes_match_contract() {
        assert_eq!(CliError::Parse(String::new()).exit_code(), 2);
        assert_eq!(CliError::Corruption(String::new()).exit_code(), 3);
        assert_eq!(CliError::Usage(String::new()).exit_code(), 64);
        let numeric: CliError = ndlt_core::Error::InvalidArgument(String::new()).into();
        assert_eq!(numeric.exit_code(), 4);
    }
}
