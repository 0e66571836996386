//! The on-disk container: a line-oriented text manifest followed by a raw
//! little-endian payload.
//!
//! ```text
//! ndlt-container
//! format_version = 1
//! kind = so3-spectral
//! manifold = so3
//! bandwidth = 16
//! channels = 1
//! dtype = c128
//! payload_bytes = 104720
//!
//! <payload_bytes of raw data>
//! ```
//!
//! Needlet containers add `j0 = <K>` and `j = <J>` lines. Complex payloads
//! interleave `(re, im)` f64 pairs; quadrature payloads store all weights
//! then all point angle tuples, in the rule's point order. Spectral and
//! grid payloads follow the coefficient and sample layouts of the core
//! containers, channel-major. Writes go through a temporary file and a
//! rename, so partially written containers are never observed.

use num_complex::Complex;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use crate::error::{CliError, Result};
use ndlt_core::needlet::{lowpass_bandwidth, NeedletCoefficients};
use ndlt_core::quadrature::{rule_for, Manifold, QuadratureRule};
use ndlt_core::spectral::{s2_len, so3_len};
use ndlt_core::{GridSignal, Spectral, SpectralS2, SpectralSo3};

const MAGIC: &str = "ndlt-container";
const FORMAT_VERSION: u32 = 1;

/// A typed value read from or written to a container file.
#[derive(Debug, Clone)]
pub enum Value {
    Grid(GridSignal<f64>),
    Spectral(Spectral<f64>),
    Needlet(NeedletCoefficients<f64>),
    Quadrature(Arc<QuadratureRule>),
}

impl Value {
    pub fn kind(&self) -> &'static str {
        match self {
            Value::Grid(g) => match g.rule().manifold() {
                Manifold::S2 => "s2-grid",
                Manifold::So3 => "so3-grid",
            },
            Value::Spectral(s) => match s.manifold() {
                Manifold::S2 => "s2-spectral",
                Manifold::So3 => "so3-spectral",
            },
            Value::Needlet(_) => "needlet",
            Value::Quadrature(_) => "quadrature",
        }
    }

    pub fn manifold(&self) -> Manifold {
        match self {
            Value::Grid(g) => g.rule().manifold(),
            Value::Spectral(s) => s.manifold(),
            Value::Needlet(c) => c.manifold(),
            Value::Quadrature(r) => r.manifold(),
        }
    }

    fn bandwidth(&self) -> usize {
        match self {
            Value::Grid(g) => g.rule().bandwidth(),
            Value::Spectral(s) => s.bandwidth(),
            Value::Needlet(c) => lowpass_bandwidth(c.j_end()),
            Value::Quadrature(r) => r.bandwidth(),
        }
    }

    fn channels(&self) -> usize {
        match self {
            Value::Grid(g) => g.channels(),
            Value::Spectral(s) => s.channels(),
            Value::Needlet(c) => c.channels(),
            Value::Quadrature(_) => 1,
        }
    }

    fn dtype(&self) -> &'static str {
        match self {
            Value::Quadrature(_) => "f64",
            _ => "c128",
        }
    }
}

fn complex_bytes(coeffs: &[Complex<f64>], out: &mut Vec<u8>) {
    for z in coeffs {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
}

fn payload_of(value: &Value) -> Vec<u8> {
    let mut out = Vec::new();
    match value {
        Value::Grid(g) => complex_bytes(g.samples(), &mut out),
        Value::Spectral(s) => complex_bytes(s.coeffs(), &mut out),
        Value::Needlet(c) => {
            for band in c.bands() {
                complex_bytes(band.coeffs(), &mut out);
            }
        }
        Value::Quadrature(rule) => {
            for k in 0..rule.n_points() {
                out.extend_from_slice(&rule.weight(k).to_le_bytes());
            }
            let dims = match rule.manifold() {
                Manifold::S2 => 2,
                Manifold::So3 => 3,
            };
            for k in 0..rule.n_points() {
                let p = rule.point(k);
                for angle in p.iter().take(dims) {
                    out.extend_from_slice(&angle.to_le_bytes());
                }
            }
        }
    }
    out
}

/// Serialize and atomically replace `path`.
pub fn write_container(value: &Value, path: &Path) -> Result<()> {
    let payload = payload_of(value);
    let mut header = String::new();
    header.push_str(MAGIC);
    header.push('\n');
    header.push_str(&format!("format_version = {FORMAT_VERSION}\n"));
    header.push_str(&format!("kind = {}\n", value.kind()));
    header.push_str(&format!("manifold = {}\n", value.manifold()));
    header.push_str(&format!("bandwidth = {}\n", value.bandwidth()));
    header.push_str(&format!("channels = {}\n", value.channels()));
    if let Value::Needlet(c) = value {
        header.push_str(&format!("j0 = {}\n", c.j0()));
        header.push_str(&format!("j = {}\n", c.j_end()));
    }
    header.push_str(&format!("dtype = {}\n", value.dtype()));
    header.push_str(&format!("payload_bytes = {}\n", payload.len()));
    header.push('\n');

    let parent = path.parent().unwrap_or_else(|| Path::new("."));
    let tmp = parent.join(format!(
        ".{}.tmp-{}",
        path.file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "container".to_string()),
        std::process::id()
    ));
    let write = || -> std::io::Result<()> {
        let mut file = std::fs::File::create(&tmp)?;
        file.write_all(header.as_bytes())?;
        file.write_all(&payload)?;
        file.sync_all()?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    };
    write().map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        CliError::Parse(format!("cannot write {}: {e}", path.display()))
    })
}

struct Manifest {
    kind: String,
    manifold: Manifold,
    bandwidth: usize,
    channels: usize,
    j0: Option<usize>,
    j_end: Option<usize>,
    dtype: String,
    payload_bytes: usize,
}

fn parse_manifest(text: &str, path: &Path) -> Result<Manifest> {
    let bad = |msg: String| CliError::Parse(format!("{}: {msg}", path.display()));
    let mut lines = text.lines();
    if lines.next() != Some(MAGIC) {
        return Err(bad("missing container magic".into()));
    }
    let mut fields: BTreeMap<String, String> = BTreeMap::new();
    for line in lines {
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| bad(format!("malformed manifest line `{line}`")))?;
        fields.insert(key.trim().to_string(), value.trim().to_string());
    }
    let take = |key: &str| -> Result<String> {
        fields
            .get(key)
            .cloned()
            .ok_or_else(|| bad(format!("manifest missing `{key}`")))
    };
    let number = |key: &str| -> Result<usize> {
        take(key)?
            .parse()
            .map_err(|_| bad(format!("field `{key}` is not a number")))
    };
    let version: u32 = take("format_version")?
        .parse()
        .map_err(|_| bad("format_version is not a number".into()))?;
    if version != FORMAT_VERSION {
        return Err(bad(format!("unsupported format_version {version}")));
    }
    let manifold: Manifold = take("manifold")?
        .parse()
        .map_err(|_| bad("unknown manifold".into()))?;
    let kind = take("kind")?;
    let known = [
        "s2-grid",
        "so3-grid",
        "s2-spectral",
        "so3-spectral",
        "needlet",
        "quadrature",
    ];
    if !known.contains(&kind.as_str()) {
        return Err(bad(format!("unknown kind `{kind}`")));
    }
    if (kind.starts_with("s2") && manifold != Manifold::S2)
        || (kind.starts_with("so3") && manifold != Manifold::So3)
    {
        return Err(bad(format!("kind `{kind}` contradicts manifold `{manifold}`")));
    }
    let j0 = fields.get("j0").map(|_| number("j0")).transpose()?;
    let j_end = fields.get("j").map(|_| number("j")).transpose()?;
    if kind == "needlet" && (j0.is_none() || j_end.is_none()) {
        return Err(bad("needlet container needs `j0` and `j` scales".into()));
    }
    Ok(Manifest {
        kind,
        manifold,
        bandwidth: number("bandwidth")?,
        channels: number("channels")?,
        j0,
        j_end,
        dtype: take("dtype")?,
        payload_bytes: number("payload_bytes")?,
    })
}

fn read_complex(payload: &[u8]) -> Vec<Complex<f64>> {
    payload
        .chunks_exact(16)
        .map(|c| {
            Complex::new(
                f64::from_le_bytes(c[0..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..16].try_into().unwrap()),
            )
        })
        .collect()
}

fn spectral_from(
    manifold: Manifold,
    bandwidth: usize,
    channels: usize,
    coeffs: Vec<Complex<f64>>,
) -> Result<Spectral<f64>> {
    let spec = match manifold {
        Manifold::S2 => Spectral::S2(
            SpectralS2::from_coeffs(bandwidth, channels, coeffs).map_err(CliError::Numeric)?,
        ),
        Manifold::So3 => Spectral::So3(
            SpectralSo3::from_coeffs(bandwidth, channels, coeffs).map_err(CliError::Numeric)?,
        ),
    };
    Ok(spec)
}

/// Parse a container, validating the manifest and every size invariant
/// before returning the typed value.
pub fn read_container(path: &Path) -> Result<Value> {
    let raw = std::fs::read(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    // The header is ASCII text up to the first blank line.
    let split = raw
        .windows(2)
        .position(|w| w == b"\n\n")
        .ok_or_else(|| CliError::Parse(format!("{}: missing manifest terminator", path.display())))?;
    let header = std::str::from_utf8(&raw[..split])
        .map_err(|_| CliError::Parse(format!("{}: manifest is not UTF-8", path.display())))?;
    let manifest = parse_manifest(header, path)?;
    let payload = &raw[split + 2..];

    if payload.len() != manifest.payload_bytes {
        return Err(CliError::Corruption(format!(
            "{}: payload is {} bytes, manifest declares {}",
            path.display(),
            payload.len(),
            manifest.payload_bytes
        )));
    }
    let expected_dtype = if manifest.kind == "quadrature" { "f64" } else { "c128" };
    if manifest.dtype != expected_dtype {
        return Err(CliError::Parse(format!(
            "{}: kind `{}` stores dtype {expected_dtype}, manifest says {}",
            path.display(),
            manifest.kind,
            manifest.dtype
        )));
    }

    let l = manifest.bandwidth;
    let c = manifest.channels;
    let expect_bytes = |count: usize, unit: usize| -> Result<()> {
        if manifest.payload_bytes != count * unit {
            return Err(CliError::Corruption(format!(
                "{}: kind `{}` at L = {l}, C = {c} implies {} bytes, manifest declares {}",
                path.display(),
                manifest.kind,
                count * unit,
                manifest.payload_bytes
            )));
        }
        Ok(())
    };

    match manifest.kind.as_str() {
        "s2-spectral" | "so3-spectral" => {
            let per_channel = match manifest.manifold {
                Manifold::S2 => s2_len(l),
                Manifold::So3 => so3_len(l),
            };
            expect_bytes(c * per_channel, 16)?;
            Ok(Value::Spectral(spectral_from(
                manifest.manifold,
                l,
                c,
                read_complex(payload),
            )?))
        }
        "s2-grid" | "so3-grid" => {
            let rule = Arc::new(rule_for(manifest.manifold, l).map_err(CliError::Numeric)?);
            expect_bytes(c * rule.n_points(), 16)?;
            let grid = GridSignal::from_samples(rule, c, read_complex(payload))
                .map_err(CliError::Numeric)?;
            Ok(Value::Grid(grid))
        }
        "needlet" => {
            let j0 = manifest.j0.expect("validated above");
            let j_end = manifest.j_end.expect("validated above");
            if j0 == 0 || j0 >= j_end {
                return Err(CliError::Parse(format!(
                    "{}: invalid scales j0 = {j0}, j = {j_end}",
                    path.display()
                )));
            }
            let band_len = |bw: usize| match manifest.manifold {
                Manifold::S2 => s2_len(bw),
                Manifold::So3 => so3_len(bw),
            };
            let mut total = band_len(lowpass_bandwidth(j0));
            for j in j0..j_end {
                total += 2 * band_len(1usize << j);
            }
            expect_bytes(c * total, 16)?;
            let coeffs = read_complex(payload);
            let mut cursor = 0usize;
            let mut take_band = |bw: usize| -> Result<Spectral<f64>> {
                let n = c * band_len(bw);
                let slice = coeffs[cursor..cursor + n].to_vec();
                cursor += n;
                spectral_from(manifest.manifold, bw, c, slice)
            };
            let low = take_band(lowpass_bandwidth(j0))?;
            let mut highpass = Vec::new();
            for j in j0..j_end {
                let w1 = take_band(1usize << j)?;
                let w2 = take_band(1usize << j)?;
                highpass.push((w1, w2));
            }
            let needlet = NeedletCoefficients::from_bands(j0, j_end, low, highpass)
                .map_err(|e| CliError::Corruption(format!("{}: {e}", path.display())))?;
            Ok(Value::Needlet(needlet))
        }
        "quadrature" => {
            let rule = Arc::new(rule_for(manifest.manifold, l).map_err(CliError::Numeric)?);
            let dims = match manifest.manifold {
                Manifold::S2 => 2,
                Manifold::So3 => 3,
            };
            expect_bytes(rule.n_points() * (1 + dims), 8)?;
            // The rule is rebuilt deterministically; verify the stored
            // weights match it rather than trusting the payload.
            for k in 0..rule.n_points() {
                let start = k * 8;
                let w = f64::from_le_bytes(payload[start..start + 8].try_into().unwrap());
                if (w - rule.weight(k)).abs() > 1e-12 * rule.weight(k).abs() {
                    return Err(CliError::Corruption(format!(
                        "{}: stored weight {k} deviates from the deterministic rule",
                        path.display()
                    )));
                }
            }
            Ok(Value::Quadrature(rule))
        }
        _ => unreachable!("kind validated during manifest parse"),
    }
}
