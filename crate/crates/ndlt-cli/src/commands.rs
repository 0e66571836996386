//! Implementations behind the `ndlt` subcommands: pure file-to-file
//! transforms plus report formatting for the verification commands.

use std::path::Path;
use std::sync::Arc;

use num_complex::Complex;

use crate::container::{read_container, write_container, Value};
use crate::error::{CliError, Result};
use ndlt_core::convolution::{rotate, s2_convolve, so3_convolve};
use ndlt_core::filterbank::{filter_hat, generator_hat, FilterKind, GeneratorKind};
use ndlt_core::harmonics::{s2_analysis, s2_synthesis, so3_analysis, so3_synthesis, Rotation};
use ndlt_core::harness::{
    ablation_table, molecule_potential_signal, sigma_sweep_at, Atom, Precision,
};
use ndlt_core::layers::{shrink, spectral_pool, ShrinkageConfig};
use ndlt_core::needlet::{decompose, reconstruct, verify_tightness, TightnessReport};
use ndlt_core::quadrature::{rule_for, Manifold};
use ndlt_core::spectral::random_spectral;
use ndlt_core::Spectral;

/// Output style of the verification reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

pub fn quadrature(manifold: Manifold, bandwidth: usize, out: &Path) -> Result<()> {
    let rule = rule_for(manifold, bandwidth)?;
    write_container(&Value::Quadrature(Arc::new(rule)), out)
}

pub fn gen_random(
    manifold: Manifold,
    bandwidth: usize,
    channels: usize,
    decay: f64,
    seed: u64,
    out: &Path,
) -> Result<()> {
    use rand::SeedableRng;
    if bandwidth == 0 || channels == 0 {
        return Err(CliError::Usage(
            "bandwidth and channels must be positive".into(),
        ));
    }
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    let spec = random_spectral::<f64, _>(manifold, bandwidth, channels, decay, &mut rng);
    write_container(&Value::Spectral(spec), out)
}

pub fn gen_harmonic(
    manifold: Manifold,
    degree: usize,
    m: isize,
    n: isize,
    bandwidth: Option<usize>,
    out: &Path,
) -> Result<()> {
    let l_max = bandwidth.unwrap_or(degree);
    if l_max < degree {
        return Err(CliError::Usage(format!(
            "bandwidth {l_max} cannot hold degree {degree}"
        )));
    }
    if m.unsigned_abs() > degree || n.unsigned_abs() > degree {
        return Err(CliError::Usage(format!(
            "orders (m = {m}, n = {n}) exceed degree {degree}"
        )));
    }
    let mut spec = Spectral::<f64>::zeros(manifold, l_max, 1);
    match &mut spec {
        Spectral::S2(s) => s.set(0, degree, m, Complex::new(1.0, 0.0)),
        Spectral::So3(s) => s.set(0, degree, m, n, Complex::new(1.0, 0.0)),
    }
    write_container(&Value::Spectral(spec), out)
}

/// Parse an atoms file: one `charge x y z` line per atom, `#` comments.
pub fn parse_atoms(path: &Path) -> Result<Vec<Atom>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    let mut atoms = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<f64> = line
            .split_whitespace()
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| {
                CliError::Parse(format!(
                    "{}:{}: expected `charge x y z`",
                    path.display(),
                    idx + 1
                ))
            })?;
        if fields.len() != 4 {
            return Err(CliError::Parse(format!(
                "{}:{}: expected 4 fields, got {}",
                path.display(),
                idx + 1,
                fields.len()
            )));
        }
        atoms.push(Atom {
            charge: fields[0],
            position: [fields[1], fields[2], fields[3]],
        });
    }
    if atoms.is_empty() {
        return Err(CliError::Parse(format!(
            "{}: no atoms found",
            path.display()
        )));
    }
    Ok(atoms)
}

pub fn gen_molecule(
    atoms_path: &Path,
    center: usize,
    charge: f64,
    bandwidth: usize,
    out: &Path,
) -> Result<()> {
    let atoms = parse_atoms(atoms_path)?;
    if center >= atoms.len() {
        return Err(CliError::Usage(format!(
            "center index {center} out of range for {} atoms",
            atoms.len()
        )));
    }
    let rule = Arc::new(rule_for(Manifold::S2, bandwidth)?);
    let grid = molecule_potential_signal(&atoms, center, charge, &rule)?;
    write_container(&Value::Grid(grid), out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

pub fn transform(direction: Direction, manifold: Manifold, input: &Path, out: &Path) -> Result<()> {
    let value = read_container(input)?;
    match (direction, value) {
        (Direction::Forward, Value::Grid(grid)) => {
            if grid.rule().manifold() != manifold {
                return Err(CliError::Usage(format!(
                    "input grid is on {}, flag says {manifold}",
                    grid.rule().manifold()
                )));
            }
            let spec = match manifold {
                Manifold::S2 => Spectral::S2(s2_analysis(&grid)?),
                Manifold::So3 => Spectral::So3(so3_analysis(&grid)?),
            };
            write_container(&Value::Spectral(spec), out)
        }
        (Direction::Inverse, Value::Spectral(spec)) => {
            if spec.manifold() != manifold {
                return Err(CliError::Usage(format!(
                    "input spectrum is on {}, flag says {manifold}",
                    spec.manifold()
                )));
            }
            let rule = Arc::new(rule_for(manifold, spec.bandwidth())?);
            let grid = match &spec {
                Spectral::S2(s) => s2_synthesis(s, &rule)?,
                Spectral::So3(s) => so3_synthesis(s, &rule)?,
            };
            write_container(&Value::Grid(grid), out)
        }
        (Direction::Forward, other) => Err(CliError::Usage(format!(
            "forward transform needs a grid container, got `{}`",
            other.kind()
        ))),
        (Direction::Inverse, other) => Err(CliError::Usage(format!(
            "inverse transform needs a spectral container, got `{}`",
            other.kind()
        ))),
    }
}

pub fn decompose_cmd(input: &Path, j0: usize, out: &Path) -> Result<()> {
    match read_container(input)? {
        Value::Spectral(spec) => {
            let coeffs = decompose(&spec, j0)?;
            write_container(&Value::Needlet(coeffs), out)
        }
        other => Err(CliError::Usage(format!(
            "decompose needs a spectral container, got `{}`",
            other.kind()
        ))),
    }
}

pub fn reconstruct_cmd(input: &Path, out: &Path) -> Result<()> {
    match read_container(input)? {
        Value::Needlet(coeffs) => {
            let spec = reconstruct(&coeffs)?;
            write_container(&Value::Spectral(spec), out)
        }
        other => Err(CliError::Usage(format!(
            "reconstruct needs a needlet container, got `{}`",
            other.kind()
        ))),
    }
}

pub fn convolve(signal_path: &Path, filter_path: &Path, out: &Path) -> Result<()> {
    let signal = read_container(signal_path)?;
    let filter = read_container(filter_path)?;
    match (signal, filter) {
        (Value::Spectral(Spectral::S2(f)), Value::Spectral(Spectral::S2(g))) => {
            let conv = s2_convolve(&f, &g)?;
            write_container(&Value::Spectral(Spectral::So3(conv)), out)
        }
        (Value::Spectral(Spectral::So3(f)), Value::Spectral(Spectral::So3(g))) => {
            let conv = so3_convolve(&f, &g)?;
            write_container(&Value::Spectral(Spectral::So3(conv)), out)
        }
        (a, b) => Err(CliError::Usage(format!(
            "convolve needs two spectral containers on the same manifold, got `{}` and `{}`",
            a.kind(),
            b.kind()
        ))),
    }
}

pub fn rotate_cmd(input: &Path, alpha: f64, beta: f64, gamma: f64, out: &Path) -> Result<()> {
    if !(0.0..=std::f64::consts::PI).contains(&beta) {
        return Err(CliError::Usage(format!(
            "beta must lie in [0, pi], got {beta}"
        )));
    }
    let r = Rotation::new(alpha, beta, gamma);
    match read_container(input)? {
        Value::Spectral(spec) => write_container(&Value::Spectral(rotate(&spec, &r)), out),
        Value::Needlet(coeffs) => {
            let top = ndlt_core::needlet::lowpass_bandwidth(coeffs.j_end());
            let op = ndlt_core::convolution::SpectralRotation::<f64>::new(top, &r);
            write_container(&Value::Needlet(op.apply_needlet(&coeffs)), out)
        }
        other => Err(CliError::Usage(format!(
            "rotate needs a spectral or needlet container, got `{}`",
            other.kind()
        ))),
    }
}

pub fn shrink_cmd(input: &Path, sigma: f64, out: &Path) -> Result<()> {
    if sigma < 0.0 {
        return Err(CliError::Usage(format!(
            "sigma must be non-negative, got {sigma}"
        )));
    }
    match read_container(input)? {
        Value::Needlet(coeffs) => {
            let cfg = ShrinkageConfig::new(sigma)?;
            write_container(&Value::Needlet(shrink(&coeffs, &cfg)), out)
        }
        other => Err(CliError::Usage(format!(
            "shrink needs a needlet container, got `{}`",
            other.kind()
        ))),
    }
}

pub fn pool_cmd(input: &Path, out: &Path) -> Result<()> {
    match read_container(input)? {
        Value::Spectral(spec) => {
            let pooled = spectral_pool(&spec)?;
            write_container(&Value::Spectral(pooled), out)
        }
        other => Err(CliError::Usage(format!(
            "pool needs a spectral container, got `{}`",
            other.kind()
        ))),
    }
}

/// Dump sampled filter and generator profiles as CSV for external plots.
pub fn filters(grid: usize, out: &Path) -> Result<()> {
    if grid < 2 {
        return Err(CliError::Usage("grid must have at least 2 points".into()));
    }
    let mut text = String::from("xi,a,b1,b2,alpha,beta1,beta2\n");
    for i in 0..=grid {
        let xi = i as f64 / grid as f64;
        text.push_str(&format!(
            "{xi},{},{},{},{},{},{}\n",
            filter_hat(FilterKind::A, xi),
            filter_hat(FilterKind::B1, xi),
            filter_hat(FilterKind::B2, xi),
            generator_hat(GeneratorKind::Alpha, xi),
            generator_hat(GeneratorKind::Beta1, xi),
            generator_hat(GeneratorKind::Beta2, xi),
        ));
    }
    std::fs::write(out, text)
        .map_err(|e| CliError::Parse(format!("cannot write {}: {e}", out.display())))
}

/// Filter-identity residuals over a dense grid.
#[derive(Debug, serde::Serialize)]
pub struct PartitionReport {
    pub grid_points: usize,
    pub max_partition_residual: f64,
    pub max_refinement_residual: f64,
    pub max_two_scale_residual: f64,
}

/// Check the partition of unity and the two-scale relations on `grid`
/// points across the filter and generator supports.
pub fn partition_report(grid: usize) -> PartitionReport {
    let mut partition = 0.0f64;
    let mut refinement = 0.0f64;
    let mut two_scale = 0.0f64;
    for i in 0..=grid {
        let xi = 0.5 * i as f64 / grid as f64;
        let total = filter_hat(FilterKind::A, xi).powi(2)
            + filter_hat(FilterKind::B1, xi).powi(2)
            + filter_hat(FilterKind::B2, xi).powi(2);
        partition = partition.max((total - 1.0).abs());

        let alpha = generator_hat(GeneratorKind::Alpha, xi);
        refinement = refinement.max(
            (generator_hat(GeneratorKind::Alpha, 2.0 * xi)
                - filter_hat(FilterKind::A, xi) * alpha)
                .abs(),
        );
        refinement = refinement.max(
            (generator_hat(GeneratorKind::Beta1, 2.0 * xi)
                - filter_hat(FilterKind::B1, xi) * alpha)
                .abs(),
        );
        refinement = refinement.max(
            (generator_hat(GeneratorKind::Beta2, 2.0 * xi)
                - filter_hat(FilterKind::B2, xi) * alpha)
                .abs(),
        );

        let wide = 1.2 * i as f64 / grid as f64;
        let lhs = generator_hat(GeneratorKind::Alpha, 2.0 * wide).powi(2)
            + generator_hat(GeneratorKind::Beta1, 2.0 * wide).powi(2)
            + generator_hat(GeneratorKind::Beta2, 2.0 * wide).powi(2);
        two_scale =
            two_scale.max((lhs - generator_hat(GeneratorKind::Alpha, wide).powi(2)).abs());
    }
    PartitionReport {
        grid_points: grid + 1,
        max_partition_residual: partition,
        max_refinement_residual: refinement,
        max_two_scale_residual: two_scale,
    }
}

pub fn verify_partition(grid: usize, format: OutputFormat) -> Result<String> {
    let report = partition_report(grid);
    Ok(match format {
        OutputFormat::Json => serde_json::to_string_pretty(&report).expect("serializable"),
        OutputFormat::Csv => format!(
            "check,residual\npartition,{:e}\nrefinement,{:e}\ntwo_scale,{:e}\n",
            report.max_partition_residual,
            report.max_refinement_residual,
            report.max_two_scale_residual
        ),
        OutputFormat::Text => format!(
            "filter identities over {} points\n  partition of unity : {:e}\n  refinement         : {:e}\n  two-scale energy   : {:e}\n",
            report.grid_points,
            report.max_partition_residual,
            report.max_refinement_residual,
            report.max_two_scale_residual
        ),
    })
}

pub fn verify_equivariance(
    bandwidth: usize,
    sigma: f64,
    trials: usize,
    seed: u64,
    format: OutputFormat,
) -> Result<String> {
    let table = ablation_table(bandwidth, sigma, trials, 10, seed)?;
    Ok(match format {
        OutputFormat::Json => serde_json::to_string_pretty(&table).expect("serializable"),
        OutputFormat::Csv => {
            let mut text = String::from("operator,single,double\n");
            for row in &table.rows {
                text.push_str(&format!("{},{:e},{:e}\n", row.operator, row.single, row.double));
            }
            text
        }
        OutputFormat::Text => table.to_string(),
    })
}

fn tightness_text(report: &TightnessReport) -> String {
    format!(
        "{} L = {}, J0 = {}, J = {}, {} trials\n  per-level energy   : {:e}\n  reconstruction     : {:e}\n  gram products      : {:e}\n",
        report.manifold,
        report.bandwidth,
        report.j0,
        report.j_end,
        report.trials,
        report.max_energy_residual,
        report.max_reconstruction_residual,
        report.max_gram_residual
    )
}

pub fn verify_tight_frame(
    bandwidth: usize,
    j0: usize,
    trials: usize,
    seed: u64,
    format: OutputFormat,
) -> Result<String> {
    let s2 = verify_tightness(Manifold::S2, bandwidth, j0, trials, seed)?;
    let so3 = verify_tightness(Manifold::So3, bandwidth, j0, trials, seed ^ 1)?;
    Ok(match format {
        OutputFormat::Json => {
            serde_json::to_string_pretty(&[&s2, &so3]).expect("serializable")
        }
        OutputFormat::Csv => {
            let mut text =
                String::from("manifold,energy_residual,reconstruction_residual,gram_residual\n");
            for r in [&s2, &so3] {
                text.push_str(&format!(
                    "{},{:e},{:e},{:e}\n",
                    r.manifold,
                    r.max_energy_residual,
                    r.max_reconstruction_residual,
                    r.max_gram_residual
                ));
            }
            text
        }
        OutputFormat::Text => format!("{}{}", tightness_text(&s2), tightness_text(&so3)),
    })
}

#[allow(clippy::too_many_arguments)]
pub fn sweep_sigma(
    from: f64,
    to: f64,
    points: usize,
    bandwidth: usize,
    j0: usize,
    rotations: usize,
    seed: u64,
    precision: Precision,
    out: &Path,
) -> Result<()> {
    if !(from > 0.0 && to > from && points >= 2) {
        return Err(CliError::Usage(
            "need 0 < from < to and at least 2 points".into(),
        ));
    }
    let sigmas: Vec<f64> = (0..points)
        .map(|i| {
            let t = i as f64 / (points - 1) as f64;
            10f64.powf(from.log10() + t * (to.log10() - from.log10()))
        })
        .collect();
    let curve = match precision {
        Precision::Double => sigma_sweep_at::<f64>(bandwidth, j0, &sigmas, rotations, seed)?,
        Precision::Single => sigma_sweep_at::<f32>(bandwidth, j0, &sigmas, rotations, seed)?,
    };
    let mut text = String::from("sigma,error,compression\n");
    for p in &curve {
        text.push_str(&format!("{:e},{:e},{:e}\n", p.sigma, p.error, p.compression));
    }
    std::fs::write(out, text)
        .map_err(|e| CliError::Parse(format!("cannot write {}: {e}", out.display())))
}

