//! Polynomial-exact sampling rules on `[-1,1]`, `S²` and `SO(3)`.
//!
//! The product rules pair Gauss-Legendre nodes in `cos β` with equispaced
//! longitudes (and rotation angles on `SO(3)`), which keeps inner products
//! of basis functions up to the declared bandwidth free of discretization
//! error. Rules are immutable after construction and deterministic given
//! `(manifold, bandwidth)`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Maximum Newton sweeps when locating Legendre roots.
const NEWTON_CAP: usize = 100;

/// Which manifold a rule or signal lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Manifold {
    S2,
    So3,
}

impl Manifold {
    pub fn as_str(self) -> &'static str {
        match self {
            Manifold::S2 => "s2",
            Manifold::So3 => "so3",
        }
    }

    /// Surface measure of the whole manifold: `4π` or `8π²`.
    pub fn total_measure(self) -> f64 {
        match self {
            Manifold::S2 => 4.0 * PI,
            Manifold::So3 => 8.0 * PI * PI,
        }
    }
}

impl std::fmt::Display for Manifold {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Manifold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "s2" | "S2" => Ok(Manifold::S2),
            "so3" | "SO3" | "SO(3)" => Ok(Manifold::So3),
            other => Err(Error::invalid(format!("unknown manifold `{other}`"))),
        }
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
///
/// An `n`-point rule integrates polynomials of degree `2n-1` exactly.
#[derive(Debug, Clone)]
pub struct GaussLegendre1D {
    order: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre1D {
    pub fn order(&self) -> usize {
        self.order
    }

    /// Nodes in strictly increasing order.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Quadrature value of `∫_{-1}^{1} f(t) dt`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }
}

/// Legendre polynomial `P_n` and its derivative at `t` by upward recurrence.
pub(crate) fn legendre_and_derivative(n: usize, t: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p_prev = 1.0;
    let mut p = t;
    for k in 2..=n {
        let kf = k as f64;
        let p_next = ((2.0 * kf - 1.0) * t * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = p_next;
    }
    // P'_n(t) = n (t P_n - P_{n-1}) / (t² - 1)
    let dp = (n as f64) * (t * p - p_prev) / (t * t - 1.0);
    (p, dp)
}

/// Construct the `n`-point Gauss-Legendre rule on `[-1, 1]`.
///
/// Roots of `P_n` are located by Newton iteration seeded with the Chebyshev
/// approximation `cos(π (i + 3/4) / (n + 1/2))` and polished until the update
/// falls below `1e-15`.
pub fn gauss_legendre(n: usize) -> Result<GaussLegendre1D> {
    if n == 0 {
        return Err(Error::invalid("Gauss-Legendre order must be at least 1"));
    }
    if n == 1 {
        return Ok(GaussLegendre1D {
            order: 1,
            nodes: vec![0.0],
            weights: vec![2.0],
        });
    }

    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    // Roots come out in decreasing order of the seed; the loop fills the
    // upper half and mirrors, leaving `nodes` ascending.
    let half = n.div_ceil(2);
    for i in 0..half {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut converged = false;
        for _ in 0..NEWTON_CAP {
            let (p, dp) = legendre_and_derivative(n, z);
            let step = p / dp;
            z -= step;
            if step.abs() < 1e-15 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergence(format!(
                "Legendre root {i} of order {n} did not settle in {NEWTON_CAP} sweeps"
            )));
        }
        let (_, dp) = legendre_and_derivative(n, z);
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        // z is the i-th largest root; mirror to the i-th smallest.
        nodes[n - 1 - i] = z;
        nodes[i] = -z;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        // Central root of an odd-order rule is exactly zero.
        nodes[n / 2] = 0.0;
    }
    Ok(GaussLegendre1D {
        order: n,
        nodes,
        weights,
    })
}

/// A product sampling rule on `S²` or `SO(3)` with positive weights.
///
/// Point ordering is fixed so file layouts are stable: `S²` runs α-major
/// over the `(2L+1) × (L+1)` grid, `SO(3)` runs α, then β, then γ over the
/// `(2L+1) × (L+1) × (2L+1)` grid. Colatitudes ascend.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    manifold: Manifold,
    bandwidth: usize,
    alphas: Vec<f64>,
    betas: Vec<f64>,
    beta_weights: Vec<f64>,
    gammas: Vec<f64>,
    exactness_degree: usize,
}

impl QuadratureRule {
    pub fn manifold(&self) -> Manifold {
        self.manifold
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    /// Largest polynomial degree the rule integrates without error.
    pub fn exactness_degree(&self) -> usize {
        self.exactness_degree
    }

    /// Equispaced longitudes `2πk / (2L+1)`.
    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    /// Colatitudes `arccos(t_i)` of the Gauss-Legendre nodes, ascending.
    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    /// Gauss-Legendre weight attached to each colatitude.
    pub fn beta_weights(&self) -> &[f64] {
        &self.beta_weights
    }

    /// Third Euler angle grid; empty on `S²`.
    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn n_points(&self) -> usize {
        match self.manifold {
            Manifold::S2 => self.alphas.len() * self.betas.len(),
            Manifold::So3 => self.alphas.len() * self.betas.len() * self.gammas.len(),
        }
    }

    /// Uniform longitude weight `2π/(2L+1)`, squared on `SO(3)`.
    pub fn angular_weight(&self) -> f64 {
        let per_axis = 2.0 * PI / self.alphas.len() as f64;
        match self.manifold {
            Manifold::S2 => per_axis,
            Manifold::So3 => per_axis * per_axis,
        }
    }

    /// Angles of point `k` as `(α, β, γ)`; `γ = 0` on `S²`.
    pub fn point(&self, k: usize) -> [f64; 3] {
        let nb = self.betas.len();
        match self.manifold {
            Manifold::S2 => {
                let ia = k / nb;
                let ib = k % nb;
                [self.alphas[ia], self.betas[ib], 0.0]
            }
            Manifold::So3 => {
                let ng = self.gammas.len();
                let ig = k % ng;
                let rest = k / ng;
                let ia = rest / nb;
                let ib = rest % nb;
                [self.alphas[ia], self.betas[ib], self.gammas[ig]]
            }
        }
    }

    /// Weight of point `k`.
    pub fn weight(&self, k: usize) -> f64 {
        let nb = self.betas.len();
        let ib = match self.manifold {
            Manifold::S2 => k % nb,
            Manifold::So3 => (k / self.gammas.len()) % nb,
        };
        self.beta_weights[ib] * self.angular_weight()
    }

    /// Iterate `(point, weight)` in storage order.
    pub fn iter(&self) -> impl Iterator<Item = ([f64; 3], f64)> + '_ {
        (0..self.n_points()).map(|k| (self.point(k), self.weight(k)))
    }

    pub fn total_weight(&self) -> f64 {
        let w_beta: f64 = self.beta_weights.iter().sum();
        let n_alpha = self.alphas.len() as f64;
        let n_gamma = self.gammas.len().max(1) as f64;
        w_beta * self.angular_weight() * n_alpha * n_gamma
    }
}

fn colatitude_grid(l: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let gl = gauss_legendre(l + 1)?;
    // β = arccos t is decreasing in t, so reverse for ascending colatitude.
    let betas: Vec<f64> = gl.nodes().iter().rev().map(|&t| t.acos()).collect();
    let weights: Vec<f64> = gl.weights().iter().rev().copied().collect();
    Ok((betas, weights))
}

fn equispaced(count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| 2.0 * PI * k as f64 / count as f64)
        .collect()
}

/// Gauss-Legendre tensor-product rule on `S²` for bandwidth `L`.
///
/// `(2L+1)(L+1)` points; exact for spherical polynomials of degree `2L+1`,
/// so Gram matrices of harmonics up to degree `L` come out as the identity.
pub fn s2_rule(l: usize) -> Result<QuadratureRule> {
    if l == 0 {
        return Err(Error::invalid("bandwidth must be at least 1"));
    }
    let (betas, beta_weights) = colatitude_grid(l)?;
    Ok(QuadratureRule {
        manifold: Manifold::S2,
        bandwidth: l,
        alphas: equispaced(2 * l + 1),
        betas,
        beta_weights,
        gammas: Vec::new(),
        exactness_degree: 2 * l + 1,
    })
}

/// Tensor-product rule on `SO(3)` for bandwidth `L`.
///
/// `(2L+1)²(L+1)` points; exact for products of Wigner-D entries up to
/// degree `L`.
pub fn so3_rule(l: usize) -> Result<QuadratureRule> {
    if l == 0 {
        return Err(Error::invalid("bandwidth must be at least 1"));
    }
    let (betas, beta_weights) = colatitude_grid(l)?;
    Ok(QuadratureRule {
        manifold: Manifold::So3,
        bandwidth: l,
        alphas: equispaced(2 * l + 1),
        betas,
        beta_weights,
        gammas: equispaced(2 * l + 1),
        exactness_degree: 2 * l + 1,
    })
}

/// Rule for the requested manifold.
pub fn rule_for(manifold: Manifold, l: usize) -> Result<QuadratureRule> {
    match manifold {
        Manifold::S2 => s2_rule(l),
        Manifold::So3 => so3_rule(l),
    }
}
