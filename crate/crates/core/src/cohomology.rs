//! Linearization of the associativity equations and the first pieces of
//! Hochschild cohomology in degree two.
//!
//! Writing F(α) for the rank-4 associator residual, the differential of F
//! at a point is an n⁴×n³ matrix M acting on vectorized 2-cochains. At an
//! associative point, ker M is the space Z² of Hochschild 2-cocycles: the
//! coboundary expression a·f(b,c) − f(ab,c) + f(a,bc) − f(a,b)·c equals
//! −(M·vec f) entry for entry, so the two descriptions agree with
//! proportionality constant 1. Coboundaries δΓ of endomorphisms Γ form a
//! subspace B² ⊆ Z²; the quotient measures deformations modulo basis
//! drift.

use nalgebra::{DMatrix, DVector};

use crate::algebra::StructureConstants;
use crate::error::{Error, Result};
use crate::linalg;
use crate::tensor::Tensor3;

/// A linear map of the algebra into itself; column j holds the
/// coordinates of the image of x_j.
pub type EndomorphismMatrix = DMatrix<f64>;

/// A 2-cochain: bilinear map f with f(x_i, x_j) = Σ_k f_ij^k x_k.
/// Same storage layout as structure constants; the distinction is one
/// of role, not representation.
#[derive(Clone, Debug, PartialEq)]
pub struct BilinearMapTensor {
    tensor: Tensor3,
}

impl BilinearMapTensor {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::input("cochain dimension must be at least 1"));
        }
        let tensor = Tensor3::from_vec(n, data)?;
        if !tensor.is_finite() {
            return Err(Error::input("cochain entries must be finite"));
        }
        Ok(BilinearMapTensor { tensor })
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize, usize) -> f64) -> Result<Self> {
        let tensor = Tensor3::from_fn(n, f);
        if !tensor.is_finite() {
            return Err(Error::input("cochain entries must be finite"));
        }
        Ok(BilinearMapTensor { tensor })
    }

    pub fn from_tensor(tensor: Tensor3) -> Result<Self> {
        BilinearMapTensor::new(tensor.n(), tensor.data().to_vec())
    }

    /// Reads back a flattened cochain, the inverse of `as_vector`.
    pub fn from_vector(n: usize, v: &DVector<f64>) -> Result<Self> {
        BilinearMapTensor::new(n, v.iter().cloned().collect())
    }

    /// The multiplication tensor itself, viewed as a 2-cochain.
    pub fn from_structure(a: &StructureConstants) -> Self {
        BilinearMapTensor {
            tensor: a.tensor().clone(),
        }
    }

    pub fn n(&self) -> usize {
        self.tensor.n()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.tensor.get(i, j, k)
    }

    pub fn tensor(&self) -> &Tensor3 {
        &self.tensor
    }

    pub fn apply(&self, u: &DVector<f64>, v: &DVector<f64>) -> Result<DVector<f64>> {
        let n = self.n();
        if u.len() != n || v.len() != n {
            return Err(Error::input(format!(
                "cochain expects vectors of length {}, got {} and {}",
                n,
                u.len(),
                v.len()
            )));
        }
        Ok(self.tensor.apply_bilinear(u, v))
    }

    pub fn basis_value(&self, i: usize, j: usize) -> DVector<f64> {
        self.tensor.basis_product(i, j)
    }

    /// vec(f) in the column order used by `tangent_operator` and
    /// `coboundary_operator`: index (i·n + j)·n + k.
    pub fn as_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(self.tensor.data())
    }
}

/// Differential of the associator-residual map at `a`: the n⁴×n³ matrix M
/// with (M·vec f)_{ijkm} = Σ_l (f_ij^l α_lk^m + α_ij^l f_lk^m
/// − f_il^m α_jk^l − α_il^m f_jk^l). Rows are ordered (i,j,k,m), columns
/// (p,q,r), both row-major.
pub fn tangent_operator(a: &StructureConstants) -> DMatrix<f64> {
    let n = a.n();
    let mut m = DMatrix::zeros(n * n * n * n, n * n * n);
    let col = |p: usize, q: usize, r: usize| (p * n + q) * n + r;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for mm in 0..n {
                    let row = ((i * n + j) * n + k) * n + mm;
                    for l in 0..n {
                        m[(row, col(i, j, l))] += a.alpha(l, k, mm);
                        m[(row, col(l, k, mm))] += a.alpha(i, j, l);
                        m[(row, col(i, l, mm))] -= a.alpha(j, k, l);
                        m[(row, col(j, k, l))] -= a.alpha(i, l, mm);
                    }
                }
            }
        }
    }
    m
}

/// dim Z² at an associative point: the nullity of the tangent operator.
/// The rank cut uses the default singular-value threshold.
pub fn z2_dimension(a: &StructureConstants, tol: f64) -> Result<usize> {
    let residual = a.associator_residual();
    if residual.max_abs > tol {
        return Err(Error::precondition(format!(
            "z2_dimension requires an associative point: residual max_abs {:.3e} > tol {:.3e}",
            residual.max_abs, tol
        )));
    }
    let m = tangent_operator(a);
    let n3 = a.n().pow(3);
    Ok(n3 - linalg::numerical_rank(&m, None))
}

/// An orthonormal basis of ker(tangent operator), one cocycle per column.
pub fn z2_basis(a: &StructureConstants, tol: f64) -> Result<DMatrix<f64>> {
    let residual = a.associator_residual();
    if residual.max_abs > tol {
        return Err(Error::precondition(format!(
            "z2_basis requires an associative point: residual max_abs {:.3e} > tol {:.3e}",
            residual.max_abs, tol
        )));
    }
    Ok(linalg::nullspace(&tangent_operator(a), None))
}

/// Worst entry of the degree-two Hochschild coboundary of `f` over all
/// basis triples: max |x_i·f(x_j,x_k) − f(x_i x_j, x_k) + f(x_i, x_j x_k)
/// − f(x_i,x_j)·x_k|. Zero exactly on 2-cocycles.
pub fn cocycle_defect(a: &StructureConstants, f: &BilinearMapTensor) -> Result<f64> {
    let n = a.n();
    if f.n() != n {
        return Err(Error::input(format!(
            "cocycle_defect dimension mismatch: algebra has n = {}, cochain n = {}",
            n,
            f.n()
        )));
    }
    let basis = |i: usize| DVector::from_fn(n, |r, _| if r == i { 1.0 } else { 0.0 });
    let mut worst = 0.0f64;
    for i in 0..n {
        let xi = basis(i);
        for j in 0..n {
            let prod_ij = a.basis_product(i, j);
            let f_ij = f.basis_value(i, j);
            for k in 0..n {
                let xk = basis(k);
                let term1 = a.tensor().apply_bilinear(&xi, &f.basis_value(j, k));
                let term2 = f.tensor().apply_bilinear(&prod_ij, &xk);
                let term3 = f.tensor().apply_bilinear(&xi, &a.basis_product(j, k));
                let term4 = a.tensor().apply_bilinear(&f_ij, &xk);
                let d = term1 - term2 + term3 - term4;
                worst = worst.max(d.amax());
            }
        }
    }
    Ok(worst)
}

/// δΓ(x_i, x_j) = x_i·Γ(x_j) + Γ(x_i)·x_j − Γ(x_i·x_j).
pub fn coboundary(a: &StructureConstants, gamma: &EndomorphismMatrix) -> Result<BilinearMapTensor> {
    let n = a.n();
    if gamma.nrows() != n || gamma.ncols() != n {
        return Err(Error::input(format!(
            "coboundary expects an {}×{} endomorphism, got {}×{}",
            n,
            n,
            gamma.nrows(),
            gamma.ncols()
        )));
    }
    let basis = |i: usize| DVector::from_fn(n, |r, _| if r == i { 1.0 } else { 0.0 });
    let mut out = Tensor3::zeros(n);
    for i in 0..n {
        let xi = basis(i);
        let gamma_i = gamma.column(i).into_owned();
        for j in 0..n {
            let xj = basis(j);
            let gamma_j = gamma.column(j).into_owned();
            let v = a.tensor().apply_bilinear(&xi, &gamma_j)
                + a.tensor().apply_bilinear(&gamma_i, &xj)
                - gamma * a.basis_product(i, j);
            for k in 0..n {
                out.set(i, j, k, v[k]);
            }
        }
    }
    BilinearMapTensor::from_tensor(out)
}

/// Matrix of δ as an n³×n² operator on vectorized endomorphisms; columns
/// are indexed by Γ_{st} at s·n + t.
pub fn coboundary_operator(a: &StructureConstants) -> DMatrix<f64> {
    let n = a.n();
    let mut d = DMatrix::zeros(n * n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let row = (i * n + j) * n + k;
                for u in 0..n {
                    d[(row, u * n + j)] += a.alpha(i, u, k);
                    d[(row, u * n + i)] += a.alpha(u, j, k);
                    d[(row, k * n + u)] -= a.alpha(i, j, u);
                }
            }
        }
    }
    d
}

/// Least-squares preimage of `f` under δ: the minimum-norm Γ minimizing
/// ‖δΓ − f‖_F, returned with that residual norm. A residual at the scale
/// of ‖f‖ certifies that `f` is not a coboundary.
pub fn coboundary_solve(
    a: &StructureConstants,
    f: &BilinearMapTensor,
) -> Result<(EndomorphismMatrix, f64)> {
    let n = a.n();
    if f.n() != n {
        return Err(Error::input(format!(
            "coboundary_solve dimension mismatch: algebra has n = {}, cochain n = {}",
            n,
            f.n()
        )));
    }
    let d = coboundary_operator(a);
    let (x, residual) = linalg::min_norm_lstsq(&d, &f.as_vector(), None);
    let gamma = DMatrix::from_fn(n, n, |s, t| x[s * n + t]);
    Ok((gamma, residual))
}
