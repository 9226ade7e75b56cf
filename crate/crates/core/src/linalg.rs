//! Dense linear-algebra helpers shared by the algebra, cohomology and
//! variety modules: numerical rank, nullspace bases, minimal-norm least
//! squares and seeded random orthogonal matrices. All rank decisions go
//! through one threshold rule so dimension counts are consistent across
//! the crate.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

/// Relative singular-value cutoff: max(nrows, ncols) · ε · σ_max.
pub fn default_rank_threshold(nrows: usize, ncols: usize, sigma_max: f64) -> f64 {
    nrows.max(ncols) as f64 * f64::EPSILON * sigma_max
}

/// Thin SVD in descending σ order. All decompositions in this crate go
/// through faer's solver; nalgebra's own bidiagonal SVD produced
/// factorizations with ‖UΣVᵀ − A‖ ~ 1e-2 on some small well-conditioned
/// inputs, which silently corrupts rank and residual decisions.
struct ThinSvd {
    u: Option<DMatrix<f64>>,
    v_t: Option<DMatrix<f64>>,
    singular_values: DVector<f64>,
}

fn svd_of(m: &DMatrix<f64>) -> ThinSvd {
    let a = faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)]);
    let svd = a.thin_svd().expect("SVD of a finite matrix converges");
    let k = m.nrows().min(m.ncols());
    let u = DMatrix::from_fn(m.nrows(), k, |i, j| svd.U()[(i, j)]);
    let v_t = DMatrix::from_fn(k, m.ncols(), |i, j| svd.V()[(j, i)]);
    let singular_values = DVector::from_fn(k, |i, _| svd.S()[i]);
    ThinSvd {
        u: Some(u),
        v_t: Some(v_t),
        singular_values,
    }
}

fn threshold_for(
    svals: &DVector<f64>,
    nrows: usize,
    ncols: usize,
    override_threshold: Option<f64>,
) -> f64 {
    let sigma_max = svals.iter().fold(0.0f64, |a, &s| a.max(s));
    override_threshold.unwrap_or_else(|| default_rank_threshold(nrows, ncols, sigma_max))
}

/// Number of singular values above the threshold (default rule if `None`).
pub fn numerical_rank(m: &DMatrix<f64>, threshold: Option<f64>) -> usize {
    let svd = svd_of(m);
    let thr = threshold_for(&svd.singular_values, m.nrows(), m.ncols(), threshold);
    svd.singular_values.iter().filter(|&&s| s > thr).count()
}

/// Orthonormal basis of the (numerical) right nullspace, returned as columns.
pub fn nullspace(m: &DMatrix<f64>, threshold: Option<f64>) -> DMatrix<f64> {
    let svd = svd_of(m);
    let thr = threshold_for(&svd.singular_values, m.nrows(), m.ncols(), threshold);
    let v_t = svd.v_t.expect("SVD must produce V^T");
    let mut cols: Vec<DVector<f64>> = Vec::new();
    // v_t has min(m,n) rows; singular directions beyond that (underdetermined
    // case) do not occur for the tall systems built in this crate.
    for (idx, &s) in svd.singular_values.iter().enumerate() {
        if s <= thr {
            cols.push(v_t.row(idx).transpose());
        }
    }
    let n = m.ncols();
    let mut out = DMatrix::zeros(n, cols.len());
    for (c, col) in cols.iter().enumerate() {
        out.set_column(c, col);
    }
    out
}

/// Minimal-norm least-squares solution of M x = b together with the
/// Euclidean residual ‖M x − b‖₂. Singular values at or below the
/// threshold are treated as zero.
pub fn min_norm_lstsq(
    m: &DMatrix<f64>,
    b: &DVector<f64>,
    threshold: Option<f64>,
) -> (DVector<f64>, f64) {
    let svd = svd_of(m);
    let thr = threshold_for(&svd.singular_values, m.nrows(), m.ncols(), threshold);
    let u = svd.u.as_ref().expect("SVD must produce U");
    let v_t = svd.v_t.as_ref().expect("SVD must produce V^T");
    let mut x = DVector::zeros(m.ncols());
    for (idx, &s) in svd.singular_values.iter().enumerate() {
        if s > thr {
            let coeff = u.column(idx).dot(b) / s;
            x += coeff * v_t.row(idx).transpose();
        }
    }
    let residual = (m * &x - b).norm();
    (x, residual)
}

/// Tikhonov-damped least squares: the minimizer of ‖M x − b‖² + λ‖x‖²,
/// computed as x = Σᵢ σᵢ(uᵢᵀb)/(σᵢ² + λ) vᵢ. Directions with σᵢ ≪ √λ are
/// suppressed instead of amplified, which is what a Gauss–Newton step
/// needs near a rank drop.
pub fn damped_lstsq(m: &DMatrix<f64>, b: &DVector<f64>, lambda: f64) -> DVector<f64> {
    let svd = svd_of(m);
    let u = svd.u.as_ref().expect("SVD must produce U");
    let v_t = svd.v_t.as_ref().expect("SVD must produce V^T");
    let mut x = DVector::zeros(m.ncols());
    for (idx, &s) in svd.singular_values.iter().enumerate() {
        let denom = s * s + lambda;
        if denom > 0.0 {
            let coeff = s * u.column(idx).dot(b) / denom;
            x += coeff * v_t.row(idx).transpose();
        }
    }
    x
}

/// σ_max / σ_min; infinite when the matrix is numerically singular.
pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    let svd = svd_of(m);
    let max = svd.singular_values.iter().fold(0.0f64, |a, &s| a.max(s));
    let min = svd
        .singular_values
        .iter()
        .fold(f64::INFINITY, |a, &s| a.min(s));
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Invertibility test under the shared threshold rule.
pub fn is_invertible(m: &DMatrix<f64>) -> bool {
    m.is_square() && numerical_rank(m, None) == m.ncols()
}

/// Haar-ish random orthogonal matrix: Q factor of a standard-normal matrix,
/// with column signs fixed so the diagonal of R is positive. Deterministic
/// for a fixed RNG state.
pub fn random_orthogonal(n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}
