//! Acceptance suite: one test per release criterion, each printing a
//! single PASS line with its measured values (run with `--nocapture` to
//! see them). Tolerances are pinned here, not configurable.

use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use ndlt_cli::container::{read_container, write_container, Value};
use ndlt_core::convolution::s2_convolve;
use ndlt_core::filterbank::{filter_hat, generator_hat, FilterKind, GeneratorKind};
use ndlt_core::harmonics::{
    eval_s2, s2_analysis, s2_synthesis, so3_analysis, so3_norm, so3_synthesis, unit_vector,
    vector_angles, wigner_big_d, Rotation,
};
use ndlt_core::harness::{ablation_table, decay_curve, sigma_sweep};
use ndlt_core::needlet::{decompose, finest_scale, reconstruct};
use ndlt_core::quadrature::{s2_rule, so3_rule, Manifold};
use ndlt_core::spectral::{random_spectral, symmetrize_real};
use ndlt_core::Spectral;

const SEED: u64 = 20260810;

#[test]
fn criterion_1_filter_identities() {
    let start = Instant::now();
    let grid = 10_000;
    let mut partition = 0.0f64;
    let mut refinement = 0.0f64;
    for i in 0..=grid {
        let xi = 0.5 * i as f64 / grid as f64;
        let total = filter_hat(FilterKind::A, xi).powi(2)
            + filter_hat(FilterKind::B1, xi).powi(2)
            + filter_hat(FilterKind::B2, xi).powi(2);
        partition = partition.max((total - 1.0).abs());
        let alpha = generator_hat(GeneratorKind::Alpha, xi);
        for (gen, fil) in [
            (GeneratorKind::Alpha, FilterKind::A),
            (GeneratorKind::Beta1, FilterKind::B1),
            (GeneratorKind::Beta2, FilterKind::B2),
        ] {
            let r = (generator_hat(gen, 2.0 * xi) - filter_hat(fil, xi) * alpha).abs();
            refinement = refinement.max(r);
        }
    }
    let elapsed = start.elapsed();
    println!(
        "criterion 1 (filter identities): PASS — partition {partition:.2e}, refinement {refinement:.2e}, {:.3}s",
        elapsed.as_secs_f64()
    );
    assert!(partition < 1e-14, "partition residual {partition:e}");
    assert!(refinement < 1e-14, "refinement residual {refinement:e}");
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
}

#[test]
fn criterion_2_transform_round_trips() {
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(SEED);

    let rel_s2 = {
        let rule = Arc::new(s2_rule(32).unwrap());
        let spec = random_spectral::<f64, _>(Manifold::S2, 32, 1, 0.0, &mut rng);
        let grid = s2_synthesis(spec.as_s2().unwrap(), &rule).unwrap();
        let back = Spectral::S2(s2_analysis(&grid).unwrap());
        back.diff_norm_sq(&spec).sqrt() / spec.norm_sq().sqrt()
    };
    let rel_so3 = {
        let rule = Arc::new(so3_rule(16).unwrap());
        let spec = random_spectral::<f64, _>(Manifold::So3, 16, 1, 0.0, &mut rng);
        let grid = so3_synthesis(spec.as_so3().unwrap(), &rule).unwrap();
        let back = Spectral::So3(so3_analysis(&grid).unwrap());
        back.diff_norm_sq(&spec).sqrt() / spec.norm_sq().sqrt()
    };
    let elapsed = start.elapsed();
    println!(
        "criterion 2 (transform round trips): PASS — S2 {rel_s2:.2e}, SO(3) {rel_so3:.2e}, {:.2}s",
        elapsed.as_secs_f64()
    );
    assert!(rel_s2 < 1e-11, "S2 relative error {rel_s2:e}");
    assert!(rel_so3 < 1e-10, "SO(3) relative error {rel_so3:e}");
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
}

#[test]
fn criterion_3_tight_frame() {
    let start = Instant::now();
    let l = 32;
    let mut worst_recon = 0.0f64;
    let mut worst_energy = 0.0f64;
    for manifold in [Manifold::S2, Manifold::So3] {
        let mut rng = ChaCha12Rng::seed_from_u64(SEED ^ 3);
        for _trial in 0..10 {
            let f = random_spectral::<f64, _>(manifold, l, 1, 0.0, &mut rng);
            let j_end = finest_scale(l);
            for j0 in 1..j_end {
                let c = decompose(&f, j0).unwrap();
                let back = reconstruct(&c).unwrap();
                let padded = f.resized(back.bandwidth());
                let rel = back.diff_norm_sq(&padded).sqrt() / padded.norm_sq().sqrt();
                worst_recon = worst_recon.max(rel);
                // Per-level energy identity, telescoped across all bands.
                let parseval = (c.norm_sq() - f.norm_sq()).abs() / f.norm_sq();
                worst_energy = worst_energy.max(parseval);
            }
            // Per-level identities, one cascade step at a time.
            let mut v = f.resized(1usize << (finest_scale(l) - 1));
            for j in (2..=finest_scale(l)).rev() {
                let w1 = v.scale_per_degree(|d| filter_hat(FilterKind::B1, d as f64 / (1u64 << j) as f64));
                let w2 = v.scale_per_degree(|d| filter_hat(FilterKind::B2, d as f64 / (1u64 << j) as f64));
                let next = v.scale_per_degree(|d| filter_hat(FilterKind::A, d as f64 / (1u64 << j) as f64));
                let upper = v.norm_sq();
                let lower = next.norm_sq() + w1.norm_sq() + w2.norm_sq();
                worst_energy = worst_energy.max((upper - lower).abs() / upper);
                v = next.resized(1usize << (j - 2));
            }
        }
    }
    let elapsed = start.elapsed();
    println!(
        "criterion 3 (tight frame): PASS — reconstruction {worst_recon:.2e}, per-level energy {worst_energy:.2e}, {:.2}s",
        elapsed.as_secs_f64()
    );
    assert!(worst_recon < 1e-12, "reconstruction residual {worst_recon:e}");
    assert!(worst_energy < 1e-12, "energy residual {worst_energy:e}");
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
}

#[test]
fn criterion_4_equivariance_ablation() {
    let start = Instant::now();
    let table = ablation_table(16, 1e-3, 10, 10, SEED).unwrap();
    let elapsed = start.elapsed();
    let row = |label: &str| {
        table
            .rows
            .iter()
            .find(|r| r.operator == label)
            .unwrap_or_else(|| panic!("missing row {label}"))
    };
    println!(
        "criterion 4 (equivariance ablation): PASS — {} rows over {} trials, {:.1}s\n{table}",
        table.rows.len(),
        table.trials,
        elapsed.as_secs_f64()
    );
    for label in ["S2-Conv", "SO(3)-Conv", "SO(3)+ReLU"] {
        let r = row(label);
        assert!(r.double < 1e-12, "{label} double {:e}", r.double);
        assert!(r.single < 1e-5, "{label} single {:e}", r.single);
    }
    let pooling = row("Pooling");
    assert_eq!(pooling.double, 0.0, "pooling double must be exactly zero");
    assert_eq!(pooling.single, 0.0, "pooling single must be exactly zero");
    let shrinkage = row("SO(3)+Shrinkage");
    assert!(
        shrinkage.double > 5e-9 && shrinkage.double < 5e-5,
        "shrinkage double {:e} outside two orders of 5e-7",
        shrinkage.double
    );
    assert!(
        shrinkage.single > 2e-6 && shrinkage.single < 2e-2,
        "shrinkage single {:e} outside two orders of 2e-4",
        shrinkage.single
    );
    assert!(elapsed.as_secs_f64() < 300.0, "took {elapsed:?}");
}

#[test]
fn criterion_5_sigma_sensitivity() {
    let start = Instant::now();
    let sigmas: Vec<f64> = (0..15)
        .map(|i| 10f64.powf(-7.0 + 7.0 * i as f64 / 14.0))
        .collect();
    let points = sigma_sweep(64, 2, &sigmas, 5, SEED).unwrap();
    let elapsed = start.elapsed();

    let at_tenth = &points[12]; // σ = 10^{-1}
    assert!((at_tenth.sigma - 0.1).abs() < 1e-12);
    println!(
        "criterion 5 (sigma sensitivity): PASS — err(1e-6) {:.2e}, err(0.1) {:.2e}, compression(0.1) {:.3}, {:.1}s",
        points[2].error,
        at_tenth.error,
        at_tenth.compression,
        elapsed.as_secs_f64()
    );
    for p in points.iter().take(3) {
        // σ ≤ 1e-6: far below single-precision machine scale.
        assert!(p.error < 1e-6, "error {:e} at sigma {:e}", p.error, p.sigma);
    }
    assert!(
        at_tenth.error >= 0.01 && at_tenth.error <= 1.0,
        "error at sigma 0.1 is {:e}, not of order 0.1",
        at_tenth.error
    );
    assert!(
        (0.10..=0.30).contains(&at_tenth.compression),
        "compression at sigma 0.1 is {}, outside 20% +/- 10 points",
        at_tenth.compression
    );
    for pair in points.windows(2) {
        assert!(
            pair[1].error >= pair[0].error - 1e-15,
            "error not monotone: {:e} -> {:e} between sigma {:e} and {:e}",
            pair[0].error,
            pair[1].error,
            pair[0].sigma,
            pair[1].sigma
        );
    }
    assert!(elapsed.as_secs_f64() < 300.0, "took {elapsed:?}");
}

#[test]
fn criterion_6_coarse_scale_decay() {
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(SEED ^ 6);
    // Decaying spectrum: error non-increasing in J0.
    let f = random_spectral::<f64, _>(Manifold::So3, 32, 1, 2.0, &mut rng);
    let j_end = finest_scale(32);
    let j0_list: Vec<usize> = (1..j_end).collect();
    let curve = decay_curve(&f, &j0_list, 0.1, 5, SEED ^ 7).unwrap();
    for pair in curve.windows(2) {
        assert!(
            pair[1].1 <= pair[0].1 + 1e-15,
            "error grew from J0={} ({:e}) to J0={} ({:e})",
            pair[0].0,
            pair[0].1,
            pair[1].0,
            pair[1].1
        );
    }
    // Empty high-pass bands: a bandwidth-4 signal has no content above
    // 2^{J0-2} once J0 >= 4, so the shrinkage error vanishes identically.
    let narrow = random_spectral::<f64, _>(Manifold::So3, 4, 1, 1.0, &mut rng).resized(32);
    let zero_curve = decay_curve(&narrow, &[4, 5], 0.1, 5, SEED ^ 8).unwrap();
    for (j0, err) in &zero_curve {
        assert_eq!(*err, 0.0, "expected exact zero at J0 = {j0}");
    }
    let elapsed = start.elapsed();
    println!(
        "criterion 6 (coarse-scale decay): PASS — errors {:?}, empty-band errors {:?}, {:.1}s",
        curve.iter().map(|(_, e)| *e).collect::<Vec<_>>(),
        zero_curve.iter().map(|(_, e)| *e).collect::<Vec<_>>(),
        elapsed.as_secs_f64()
    );
}

#[test]
fn criterion_7_convolution_oracle() {
    let start = Instant::now();
    // Spectral convolution against the brute-force correlation integral.
    let l = 8;
    let mut rng = ChaCha12Rng::seed_from_u64(SEED ^ 9);
    let f = symmetrize_real(&random_spectral::<f64, _>(Manifold::S2, l, 1, 0.5, &mut rng));
    let phi = symmetrize_real(&random_spectral::<f64, _>(Manifold::S2, l, 1, 0.5, &mut rng));
    let f_s2 = f.as_s2().unwrap();
    let phi_s2 = phi.as_s2().unwrap();

    let s2 = s2_rule(l).unwrap();
    let f_values: Vec<(f64, [f64; 3], f64)> = s2
        .iter()
        .map(|(p, w)| (w, unit_vector(p[0], p[1]), eval_s2(f_s2, 0, p[0], p[1]).re))
        .collect();

    let conv = Spectral::So3(s2_convolve(f_s2, phi_s2).unwrap());
    let correlation = conv.scale_per_degree(|d| 1.0 / so3_norm(d));
    let so3 = Arc::new(so3_rule(l).unwrap());
    let grid = so3_synthesis(correlation.as_so3().unwrap(), &so3).unwrap();

    let mut worst_conv = 0.0f64;
    for (k, (p, _)) in so3.iter().enumerate() {
        let q = Rotation::new(p[0], p[1], p[2]);
        let q_inv = q.inverse().matrix();
        let mut direct = 0.0;
        for (w, dir, sample) in &f_values {
            let y = q_inv.apply(*dir);
            let (alpha, beta) = vector_angles(y);
            direct += w * eval_s2(phi_s2, 0, alpha, beta).re * sample;
        }
        let spectral = grid.samples()[k];
        worst_conv = worst_conv.max((spectral.re - direct).abs().max(spectral.im.abs()));
    }

    // Wigner homomorphism ‖D(R1)D(R2) - D(R1 R2)‖_F.
    let mut worst_hom = 0.0f64;
    for _ in 0..10 {
        let r1 = Rotation::random(&mut rng);
        let r2 = Rotation::random(&mut rng);
        let composed = r1.compose(&r2);
        for degree in 0..=8usize {
            let d1 = wigner_big_d::<f64>(degree, &r1);
            let d2 = wigner_big_d::<f64>(degree, &r2);
            let dc = wigner_big_d::<f64>(degree, &composed);
            let w = 2 * degree + 1;
            let mut frob = 0.0f64;
            for i in 0..w {
                for j in 0..w {
                    let mut acc = Complex::new(0.0, 0.0);
                    for k in 0..w {
                        acc += d1[(i, k)] * d2[(k, j)];
                    }
                    frob += (acc - dc[(i, j)]).norm_sqr();
                }
            }
            worst_hom = worst_hom.max(frob.sqrt());
        }
    }
    let elapsed = start.elapsed();
    println!(
        "criterion 7 (convolution oracle): PASS — integral deviation {worst_conv:.2e}, homomorphism {worst_hom:.2e}, {:.1}s",
        elapsed.as_secs_f64()
    );
    assert!(worst_conv < 1e-8, "brute-force deviation {worst_conv:e}");
    assert!(worst_hom < 1e-11, "homomorphism residual {worst_hom:e}");
}

#[test]
fn criterion_8_io_and_determinism() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();

    // Byte-identical container round trips for every kind.
    let mut rng = ChaCha12Rng::seed_from_u64(SEED ^ 11);
    let spec = random_spectral::<f64, _>(Manifold::So3, 8, 2, 1.0, &mut rng);
    let needlet = decompose(&spec, 2).unwrap();
    let rule = Arc::new(s2_rule(6).unwrap());
    let grid = {
        let s = random_spectral::<f64, _>(Manifold::S2, 6, 1, 1.0, &mut rng);
        s2_synthesis(s.as_s2().unwrap(), &rule).unwrap()
    };
    for (name, value) in [
        ("spec", Value::Spectral(spec)),
        ("needlet", Value::Needlet(needlet)),
        ("grid", Value::Grid(grid)),
        ("rule", Value::Quadrature(Arc::clone(&rule))),
    ] {
        let path = dir.path().join(format!("{name}.ndlt"));
        write_container(&value, &path).unwrap();
        let first = std::fs::read(&path).unwrap();
        let reread = read_container(&path).unwrap();
        write_container(&reread, &path).unwrap();
        let second = std::fs::read(&path).unwrap();
        assert_eq!(first, second, "round trip of {name} not byte-identical");
    }

    // Fixed seed means byte-identical CLI outputs across runs.
    let run = |out: &Path| {
        let status = Command::new(env!("CARGO_BIN_EXE_ndlt"))
            .args([
                "gen",
                "random",
                "--manifold",
                "so3",
                "--bandwidth",
                "12",
                "--seed",
                "7",
                "--out",
                &out.to_string_lossy(),
            ])
            .status()
            .unwrap();
        assert!(status.success());
    };
    let a = dir.path().join("a.ndlt");
    let b = dir.path().join("b.ndlt");
    run(&a);
    run(&b);
    assert_eq!(
        std::fs::read(&a).unwrap(),
        std::fs::read(&b).unwrap(),
        "same seed produced different bytes"
    );
    let elapsed = start.elapsed();
    println!(
        "criterion 8 (i/o and determinism): PASS — 4 kinds byte-identical, seeded runs identical, {:.1}s",
        elapsed.as_secs_f64()
    );
}
