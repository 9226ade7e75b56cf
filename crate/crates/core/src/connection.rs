//! Differential connections along interval families and the parallel
//! transport they generate.
//!
//! Everything lives in the global frame: a connection is the node-sampled
//! coefficient matrix Γ(t) of ∇σ = σ′ + Γσ, and the Leibniz rule pins Γ
//! down through the multiplication. Writing μ_t for the fiber product,
//!
//!   ∇(σ₁σ₂) = μ′(σ₁,σ₂) + μ(σ₁′,σ₂) + μ(σ₁,σ₂′) + Γμ(σ₁,σ₂),
//!   σ₁·∇σ₂ + (∇σ₁)·σ₂ = μ(σ₁,σ₂′) + μ(σ₁,Γσ₂) + μ(σ₁′,σ₂) + μ(Γσ₁,σ₂),
//!
//! so the difference of the two sides is μ′(σ₁,σ₂) − (δΓ)(σ₁,σ₂): the
//! Leibniz identity holds at t exactly when δΓ = μ′(t). A differential
//! connection direction therefore exists iff μ′ is a coboundary, and the
//! least-squares defect of δΓ = μ′ is the obstruction norm. Transport
//! integrates Φ′ = −Γ(t)Φ.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::algebra::StructureConstants;
use crate::cohomology::{self, BilinearMapTensor, EndomorphismMatrix};
use crate::error::{Error, Result};
use crate::family::{interval_axis_weights, AlgebraFamily, BaseGrid, BasePoint, IntervalGrid, Interpolation};
use crate::linalg;
use crate::tensor::Tensor3;

/// Connection coefficients sampled on an interval grid. `residuals` are
/// construction defects, one per node: coboundary defects when the
/// connection was solved from a family, arrival-step coherence defects
/// when it was reconstructed from transport samples.
#[derive(Clone, Debug)]
pub struct PathConnection {
    pub base: IntervalGrid,
    pub samples: Vec<EndomorphismMatrix>,
    pub residuals: Vec<f64>,
}

impl PathConnection {
    pub fn new(
        base: IntervalGrid,
        samples: Vec<EndomorphismMatrix>,
        residuals: Vec<f64>,
    ) -> Result<Self> {
        base.validate()?;
        if samples.len() != base.nodes {
            return Err(Error::input(format!(
                "connection needs one sample per node: expected {}, got {}",
                base.nodes,
                samples.len()
            )));
        }
        if residuals.len() != base.nodes {
            return Err(Error::input(format!(
                "connection needs one residual per node: expected {}, got {}",
                base.nodes,
                residuals.len()
            )));
        }
        let n = samples[0].nrows();
        if let Some(bad) = samples
            .iter()
            .position(|s| s.nrows() != n || s.ncols() != n)
        {
            return Err(Error::input(format!(
                "connection sample {} is {}×{}, expected {}×{}",
                bad,
                samples[bad].nrows(),
                samples[bad].ncols(),
                n,
                n
            )));
        }
        Ok(PathConnection {
            base,
            samples,
            residuals,
        })
    }

    pub fn n(&self) -> usize {
        self.samples[0].nrows()
    }

    /// Γ(t), linearly interpolated between node samples; node hits return
    /// the stored matrix exactly.
    pub fn sample_at(&self, t: f64) -> Result<EndomorphismMatrix> {
        let weights = interval_axis_weights(&self.base, Interpolation::Linear, t)?;
        if weights.len() == 1 && weights[0].1 == 1.0 {
            return Ok(self.samples[weights[0].0].clone());
        }
        let n = self.n();
        let mut out = DMatrix::zeros(n, n);
        for (idx, w) in weights {
            out += &self.samples[idx] * w;
        }
        Ok(out)
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }
}

/// Result of integrating Φ′ = −Γ(t)Φ from `source_t` to `target_t`.
#[derive(Clone, Debug)]
pub struct TransportMap {
    pub source_t: f64,
    pub target_t: f64,
    pub phi: DMatrix<f64>,
    pub steps: usize,
}

impl TransportMap {
    /// 2-norm condition number of Φ; finite iff Φ is invertible.
    pub fn condition_number(&self) -> f64 {
        linalg::condition_number(&self.phi)
    }
}

fn interval_of(f: &AlgebraFamily) -> Result<IntervalGrid> {
    match f.base() {
        BaseGrid::Interval(g) => Ok(*g),
        other => Err(Error::input(format!(
            "this operation needs an interval base, family has kind '{}'",
            other.kind_name()
        ))),
    }
}

/// Central difference (γ(t+h) − γ(t−h)) / (2h) of the interpolated
/// fibers: the t-derivative of the structure functions, accurate to
/// O(h²) on smooth data.
pub fn mu_prime(f: &AlgebraFamily, t: f64, h: f64) -> Result<BilinearMapTensor> {
    let grid = interval_of(f)?;
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::input("differentiation step h must be positive"));
    }
    if t - h < grid.t0 || t + h > grid.t1 {
        return Err(Error::input(format!(
            "mu_prime needs margin h = {} around t = {} inside [{}, {}]",
            h, t, grid.t0, grid.t1
        )));
    }
    let plus = f.fiber_at(BasePoint::Scalar(t + h))?;
    let minus = f.fiber_at(BasePoint::Scalar(t - h))?;
    let half = 0.5 / h;
    let tensor = Tensor3::weighted_sum(&[(half, plus.tensor()), (-half, minus.tensor())])?;
    BilinearMapTensor::from_tensor(tensor)
}

/// Least-squares Γ(t) with δΓ ≈ μ′(t) in the fiber over t, and the
/// defect of that solve. Residual ≈ 0 means a differential connection
/// direction exists at t; a residual at the scale of ‖μ′‖ is the
/// obstruction.
pub fn solve_differential_connection(
    f: &AlgebraFamily,
    t: f64,
    h: f64,
) -> Result<(EndomorphismMatrix, f64)> {
    let fiber = f.fiber_at(BasePoint::Scalar(t))?;
    let rate = mu_prime(f, t, h)?;
    cohomology::coboundary_solve(&fiber, &rate)
}

/// Nodewise connection solve over the whole interval: central differences
/// of the node data in the interior, one-sided three-point stencils at the
/// endpoints (two-point when only two nodes exist), then a coboundary
/// solve per node. All derivative estimates are O(dt²) except the
/// two-node fallback, which is O(dt).
pub fn solve_path_connection(f: &AlgebraFamily) -> Result<PathConnection> {
    let grid = interval_of(f)?;
    let l = grid.nodes;
    let dt = grid.dt();
    let node = |k: usize| f.node_algebra(k).tensor();

    let results: Vec<(EndomorphismMatrix, f64)> = (0..l)
        .into_par_iter()
        .map(|i| {
            let stencil = if l == 2 {
                vec![(1.0 / dt, node(1)), (-1.0 / dt, node(0))]
            } else if i == 0 {
                vec![
                    (-1.5 / dt, node(0)),
                    (2.0 / dt, node(1)),
                    (-0.5 / dt, node(2)),
                ]
            } else if i + 1 == l {
                vec![
                    (1.5 / dt, node(l - 1)),
                    (-2.0 / dt, node(l - 2)),
                    (0.5 / dt, node(l - 3)),
                ]
            } else {
                vec![(0.5 / dt, node(i + 1)), (-0.5 / dt, node(i - 1))]
            };
            let rate = BilinearMapTensor::from_tensor(Tensor3::weighted_sum(&stencil)?)?;
            cohomology::coboundary_solve(f.node_algebra(i), &rate)
        })
        .collect::<Result<_>>()?;

    let (samples, residuals) = results.into_iter().unzip();
    PathConnection::new(grid, samples, residuals)
}

/// One classical Runge–Kutta step of Φ′ = −Γ(t)Φ.
fn rk4_step(
    phi: &DMatrix<f64>,
    t: f64,
    h: f64,
    gamma: &mut impl FnMut(f64) -> Result<DMatrix<f64>>,
) -> Result<DMatrix<f64>> {
    let g0 = gamma(t)?;
    let gm = gamma(t + 0.5 * h)?;
    let g1 = gamma(t + h)?;
    let k1 = -&g0 * phi;
    let k2 = -&gm * &(phi + &k1 * (0.5 * h));
    let k3 = -&gm * &(phi + &k2 * (0.5 * h));
    let k4 = -&g1 * &(phi + &k3 * h);
    Ok(phi + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0))
}

/// Parallel transport Φ(t0 → t1): integrates Φ′ = −Γ(t)Φ, Φ(t0) = I,
/// with `steps` uniform RK4 steps. Γ comes from the connection's node
/// samples by linear interpolation; integration runs in either direction.
pub fn parallel_transport(
    f: &AlgebraFamily,
    gamma_path: &PathConnection,
    t0: f64,
    t1: f64,
    steps: usize,
) -> Result<TransportMap> {
    let grid = interval_of(f)?;
    if gamma_path.n() != f.n() {
        return Err(Error::input(format!(
            "connection dimension {} does not match family dimension {}",
            gamma_path.n(),
            f.n()
        )));
    }
    if steps < 1 {
        return Err(Error::input("transport needs at least 1 step"));
    }
    for (name, t) in [("t0", t0), ("t1", t1)] {
        if !grid.contains(t) || !gamma_path.base.contains(t) {
            return Err(Error::input(format!(
                "transport endpoint {} = {} lies outside the family or connection domain",
                name, t
            )));
        }
    }

    let h = (t1 - t0) / steps as f64;
    // endpoint arithmetic can drift past the domain by one rounding unit;
    // clamping the sample time is exact at the ends and harmless inside
    let lo = gamma_path.base.t0;
    let hi = gamma_path.base.t1;
    let mut gamma = move |t: f64| gamma_path.sample_at(t.clamp(lo, hi));

    let mut phi = DMatrix::identity(f.n(), f.n());
    for s in 0..steps {
        let t = t0 + s as f64 * h;
        phi = rk4_step(&phi, t, h, &mut gamma)?;
    }
    Ok(TransportMap {
        source_t: t0,
        target_t: t1,
        phi,
        steps,
    })
}

/// How far Φ is from being an algebra map fiber(source) → fiber(target):
/// max over basis pairs of ‖Φ(x_i ·_src x_j) − (Φx_i) ·_tgt (Φx_j)‖∞.
pub fn multiplicativity_defect(
    map: &TransportMap,
    a_src: &StructureConstants,
    a_tgt: &StructureConstants,
) -> Result<f64> {
    let n = a_src.n();
    if a_tgt.n() != n || map.phi.nrows() != n || map.phi.ncols() != n {
        return Err(Error::input(format!(
            "multiplicativity_defect dimension mismatch: source n = {}, target n = {}, phi is {}×{}",
            n,
            a_tgt.n(),
            map.phi.nrows(),
            map.phi.ncols()
        )));
    }
    let mut worst = 0.0f64;
    for i in 0..n {
        let phi_i = map.phi.column(i).into_owned();
        for j in 0..n {
            let phi_j = map.phi.column(j).into_owned();
            let through_src = &map.phi * a_src.basis_product(i, j);
            let through_tgt = a_tgt.tensor().apply_bilinear(&phi_i, &phi_j);
            worst = worst.max((through_src - through_tgt).amax());
        }
    }
    Ok(worst)
}

/// Coherence diagnostics for a reconstructed connection: the identity
/// defect at the anchor time (when a sample sits there) and, per grid
/// cell, the mismatch between the stored arrival map and one integration
/// step of the recovered Γ applied to the departure map.
#[derive(Clone, Debug)]
pub struct CoherenceReport {
    pub identity_defect: Option<f64>,
    pub step_defects: Vec<f64>,
    pub max_defect: f64,
    pub coherent: bool,
    pub tol: f64,
}

/// Recover Γ(t) ≈ −Φ′(t)Φ(t)⁻¹ from transports out of a common anchor,
/// sampled at uniformly spaced times. Derivatives use the same stencils
/// as `solve_path_connection`. The returned connection stores coherence
/// defects as its per-node residuals (arrival mismatch at each node,
/// identity mismatch at the first); violations set `coherent = false`
/// rather than raising.
pub fn connection_from_transports(
    samples: &[(f64, TransportMap)],
    h: f64,
    tol: f64,
) -> Result<(PathConnection, CoherenceReport)> {
    if samples.len() < 3 {
        return Err(Error::input(
            "connection reconstruction needs at least 3 transport samples",
        ));
    }
    let n = samples[0].1.phi.nrows();
    let source = samples[0].1.source_t;
    for (idx, (t, map)) in samples.iter().enumerate() {
        if !t.is_finite() {
            return Err(Error::input("sample times must be finite"));
        }
        if map.phi.nrows() != n || map.phi.ncols() != n {
            return Err(Error::input(format!(
                "transport sample {} has shape {}×{}, expected {}×{}",
                idx,
                map.phi.nrows(),
                map.phi.ncols(),
                n,
                n
            )));
        }
        if map.source_t != source {
            return Err(Error::input(format!(
                "transport samples must share a source: sample {} starts at {}, expected {}",
                idx, map.source_t, source
            )));
        }
        if idx > 0 && !(samples[idx - 1].0 < *t) {
            return Err(Error::input(
                "sample times must be strictly increasing",
            ));
        }
        if !linalg::is_invertible(&map.phi) {
            return Err(Error::input(format!(
                "transport sample {} at t = {} is not invertible",
                idx, t
            )));
        }
    }

    let l = samples.len();
    let t_first = samples[0].0;
    let t_last = samples[l - 1].0;
    let spacing = (t_last - t_first) / (l - 1) as f64;
    for w in samples.windows(2) {
        let gap = w[1].0 - w[0].0;
        if (gap - spacing).abs() > 1e-9 * spacing.abs() {
            return Err(Error::input(format!(
                "sample times must be uniformly spaced: found gaps {} and {}",
                spacing, gap
            )));
        }
    }
    if spacing > h {
        return Err(Error::input(format!(
            "samples too sparse: spacing {} exceeds the required bound {}",
            spacing, h
        )));
    }

    let phi = |i: usize| &samples[i].1.phi;
    let mut gammas = Vec::with_capacity(l);
    for i in 0..l {
        let derivative = if i == 0 {
            (phi(1) * 4.0 - phi(0) * 3.0 - phi(2)) / (2.0 * spacing)
        } else if i + 1 == l {
            (phi(l - 1) * 3.0 - phi(l - 2) * 4.0 + phi(l - 3)) / (2.0 * spacing)
        } else {
            (phi(i + 1) - phi(i - 1)) / (2.0 * spacing)
        };
        let inv = samples[i]
            .1
            .phi
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::input(format!("transport sample {} is not invertible", i)))?;
        gammas.push(-derivative * inv);
    }

    let identity_defect = samples
        .iter()
        .find(|(t, _)| *t == source)
        .map(|(_, map)| (&map.phi - DMatrix::<f64>::identity(n, n)).amax());

    let grid = IntervalGrid::new(t_first, t_last, l)?;
    let mut step_defects = Vec::with_capacity(l - 1);
    for i in 0..l - 1 {
        let gamma_lo = gammas[i].clone();
        let gamma_hi = gammas[i + 1].clone();
        let mut gamma = move |t: f64| -> Result<DMatrix<f64>> {
            let w = ((t - grid.coord(i)) / spacing).clamp(0.0, 1.0);
            Ok(&gamma_lo * (1.0 - w) + &gamma_hi * w)
        };
        let advanced = rk4_step(phi(i), grid.coord(i), spacing, &mut gamma)?;
        step_defects.push((phi(i + 1) - advanced).amax());
    }

    let max_defect = step_defects
        .iter()
        .cloned()
        .chain(identity_defect)
        .fold(0.0, f64::max);
    let coherent = max_defect <= tol;

    let mut residuals = Vec::with_capacity(l);
    residuals.push(identity_defect.unwrap_or(0.0));
    residuals.extend(step_defects.iter().cloned());

    let connection = PathConnection::new(grid, gammas, residuals)?;
    let report = CoherenceReport {
        identity_defect,
        step_defects,
        max_defect,
        coherent,
        tol,
    };
    Ok((connection, report))
}
