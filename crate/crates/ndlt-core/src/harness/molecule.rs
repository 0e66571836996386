//! Coulomb-style potential signals on atom-centered unit spheres.

use num_complex::Complex;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::harmonics::unit_vector;
use crate::quadrature::{Manifold, QuadratureRule};
use crate::spectral::GridSignal;

/// One atom: charge and Cartesian position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub charge: f64,
    pub position: [f64; 3],
}

/// Sample `U_z(x) = Σ_{j≠i, z_j = z} z_i z / ‖x - p_j‖` on the unit sphere
/// centered at atom `i`, at the points of an `S²` rule.
///
/// Fails if any contributing atom sits on the sampling sphere (distance to
/// the surface below `1e-9`), where the potential blows up.
pub fn molecule_potential_signal(
    atoms: &[Atom],
    center: usize,
    charge: f64,
    rule: &Arc<QuadratureRule>,
) -> Result<GridSignal<f64>> {
    if rule.manifold() != Manifold::S2 {
        return Err(Error::invalid("potential signals are sampled on S² rules"));
    }
    let center_atom = atoms
        .get(center)
        .ok_or_else(|| Error::invalid(format!("center index {center} out of range")))?;
    let p_i = center_atom.position;

    let mut sources = Vec::new();
    for (j, atom) in atoms.iter().enumerate() {
        if j == center || atom.charge != charge {
            continue;
        }
        let d = distance(atom.position, p_i);
        if (d - 1.0).abs() < 1e-9 {
            return Err(Error::DegenerateGeometry(format!(
                "atom {j} lies on the unit sphere around atom {center} (offset {:e})",
                (d - 1.0).abs()
            )));
        }
        sources.push(atom.position);
    }

    let mut grid = GridSignal::<f64>::zeros(Arc::clone(rule), 1);
    let zz = center_atom.charge * charge;
    for (k, (p, _)) in rule.iter().enumerate() {
        let dir = unit_vector(p[0], p[1]);
        let x = [p_i[0] + dir[0], p_i[1] + dir[1], p_i[2] + dir[2]];
        let mut u = 0.0;
        for s in &sources {
            u += zz / distance(x, *s);
        }
        grid.samples_mut()[k] = Complex::new(u, 0.0);
    }
    Ok(grid)
}

fn distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}
