//! One finite-dimensional algebra presented by structure constants.
//!
//! A dimension-n algebra with a chosen basis x_1, …, x_n is the tensor
//! α_ij^k with x_i · x_j = Σ_k α_ij^k x_k. The tensor is a point of ℝ^{n³};
//! it describes an associative algebra exactly when the n⁴ quadratic
//! equations Σ_l (α_ij^l α_lk^m − α_il^m α_jk^l) = 0 hold. This module
//! provides products, associativity residuals, two generator families,
//! unit detection, isomorphism invariants and a numerical isomorphism
//! probe.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cohomology;
use crate::error::{Error, Result};
use crate::linalg;
use crate::tensor::Tensor3;

/// Default acceptance tolerance for residual-style checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Structure constants α_ij^k of one algebra-with-basis. Entries are
/// finite by construction; indices are 0-based in code, 1-based in
/// documentation and file formats.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureConstants {
    tensor: Tensor3,
}

impl StructureConstants {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::input("algebra dimension must be at least 1"));
        }
        let tensor = Tensor3::from_vec(n, data)?;
        if !tensor.is_finite() {
            return Err(Error::input("structure constants must be finite"));
        }
        Ok(StructureConstants { tensor })
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize, usize) -> f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::input("algebra dimension must be at least 1"));
        }
        let tensor = Tensor3::from_fn(n, f);
        if !tensor.is_finite() {
            return Err(Error::input("structure constants must be finite"));
        }
        Ok(StructureConstants { tensor })
    }

    pub fn from_tensor(tensor: Tensor3) -> Result<Self> {
        StructureConstants::new(tensor.n(), tensor.data().to_vec())
    }

    pub fn n(&self) -> usize {
        self.tensor.n()
    }

    /// α_ij^k with 0-based indices.
    #[inline]
    pub fn alpha(&self, i: usize, j: usize, k: usize) -> f64 {
        self.tensor.get(i, j, k)
    }

    pub fn tensor(&self) -> &Tensor3 {
        &self.tensor
    }

    /// Coordinates of x_i · x_j.
    pub fn basis_product(&self, i: usize, j: usize) -> DVector<f64> {
        self.tensor.basis_product(i, j)
    }

    /// w_k = Σ_{i,j} u_i v_j α_ij^k.
    pub fn multiply(&self, u: &DVector<f64>, v: &DVector<f64>) -> Result<DVector<f64>> {
        let n = self.n();
        if u.len() != n || v.len() != n {
            return Err(Error::input(format!(
                "multiply expects vectors of length {}, got {} and {}",
                n,
                u.len(),
                v.len()
            )));
        }
        Ok(self.tensor.apply_bilinear(u, v))
    }

    /// Matrix of left multiplication by x_a: column i holds x_a · x_i.
    pub fn left_mult_matrix(&self, a: usize) -> DMatrix<f64> {
        let n = self.n();
        DMatrix::from_fn(n, n, |k, i| self.alpha(a, i, k))
    }

    /// Associativity defect of every basis triple.
    pub fn associator_residual(&self) -> AssociatorResidual {
        let n = self.n();
        let mut tensor = vec![0.0; n * n * n * n];
        let mut frob = 0.0;
        let mut max_abs = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for m in 0..n {
                        let mut r = 0.0;
                        for l in 0..n {
                            r += self.alpha(i, j, l) * self.alpha(l, k, m)
                                - self.alpha(i, l, m) * self.alpha(j, k, l);
                        }
                        tensor[((i * n + j) * n + k) * n + m] = r;
                        frob += r * r;
                        max_abs = max_abs.max(r.abs());
                    }
                }
            }
        }
        AssociatorResidual {
            n,
            tensor,
            frobenius_norm: frob.sqrt(),
            max_abs,
        }
    }

    pub fn is_associative(&self, tol: f64) -> bool {
        self.associator_residual().max_abs <= tol
    }

    /// Two-sided unit by least squares over the 2n² linear conditions
    /// Σ_i e_i α_ij^k = δ_jk and Σ_i e_i α_ji^k = δ_jk. Returns the
    /// solution iff its worst per-basis-vector defect is within `tol`;
    /// absence of a unit is a valid outcome, not an error.
    pub fn find_unit(&self, tol: f64) -> Option<UnitVector> {
        let n = self.n();
        let mut m = DMatrix::zeros(2 * n * n, n);
        let mut rhs = DVector::zeros(2 * n * n);
        for j in 0..n {
            for k in 0..n {
                let left_row = j * n + k;
                let right_row = n * n + j * n + k;
                for i in 0..n {
                    m[(left_row, i)] = self.alpha(i, j, k);
                    m[(right_row, i)] = self.alpha(j, i, k);
                }
                let delta = if j == k { 1.0 } else { 0.0 };
                rhs[left_row] = delta;
                rhs[right_row] = delta;
            }
        }
        let (e, _) = linalg::min_norm_lstsq(&m, &rhs, None);
        // Acceptance defect: worst Euclidean deviation of e·x_j and x_j·e
        // from x_j over the basis.
        let mut worst = 0.0f64;
        for j in 0..n {
            let xj = DVector::from_fn(n, |r, _| if r == j { 1.0 } else { 0.0 });
            let left = self.tensor.apply_bilinear(&e, &xj);
            let right = self.tensor.apply_bilinear(&xj, &e);
            worst = worst.max((&left - &xj).norm());
            worst = worst.max((&right - &xj).norm());
        }
        if worst <= tol {
            Some(UnitVector {
                e,
                residual: worst,
            })
        } else {
            None
        }
    }

    /// Structure constants of the same product written in the basis
    /// g·x_1, …, g·x_n, i.e. the tensor of g·μ(g⁻¹·, g⁻¹·).
    pub fn transport_by(&self, g: &DMatrix<f64>) -> Result<StructureConstants> {
        let n = self.n();
        if g.nrows() != n || g.ncols() != n {
            return Err(Error::input("basis change must be an n×n matrix"));
        }
        let ginv = g
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::input("basis change matrix is singular"))?;
        let mut out = Tensor3::zeros(n);
        for i in 0..n {
            let gi = ginv.column(i).into_owned();
            for j in 0..n {
                let gj = ginv.column(j).into_owned();
                let prod = g * self.tensor.apply_bilinear(&gi, &gj);
                for k in 0..n {
                    out.set(i, j, k, prod[k]);
                }
            }
        }
        StructureConstants::from_tensor(out)
    }

    /// Isomorphism-invariant fingerprint of an associative point: dimension,
    /// commutativity and unitality flags, the eigenvalue signature of the
    /// trace form T(a,b) = trace(L_a L_b), the 2-cocycle space dimension and
    /// the center dimension. Equal signatures are necessary, not sufficient,
    /// for isomorphism.
    pub fn iso_signature(&self, tol: f64) -> Result<IsoSignature> {
        let residual = self.associator_residual();
        if residual.max_abs > tol {
            return Err(Error::precondition(format!(
                "iso_signature requires an associative point: residual max_abs {:.3e} > tol {:.3e}",
                residual.max_abs, tol
            )));
        }
        let n = self.n();

        let mut commutative = true;
        'comm: for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if (self.alpha(i, j, k) - self.alpha(j, i, k)).abs() > tol {
                        commutative = false;
                        break 'comm;
                    }
                }
            }
        }

        let unital = self.find_unit(tol).is_some();

        // T_ab = trace(L_a L_b) = Σ_{k,i} α_ai^k α_bk^i, symmetric by
        // the cyclic property of the trace.
        let trace_form = DMatrix::from_fn(n, n, |a, b| {
            let mut t = 0.0;
            for k in 0..n {
                for i in 0..n {
                    t += self.alpha(a, i, k) * self.alpha(b, k, i);
                }
            }
            t
        });
        let eigen = nalgebra::SymmetricEigen::new(trace_form);
        let mut pos = 0;
        let mut neg = 0;
        for &lambda in eigen.eigenvalues.iter() {
            if lambda > tol {
                pos += 1;
            } else if lambda < -tol {
                neg += 1;
            }
        }
        let zero = n - pos - neg;

        let z2_dim = cohomology::z2_dimension(self, tol)?;

        // Center: c with x_j·c = c·x_j for every basis vector; its dimension
        // is the nullity of the n²×n system below.
        let mut center_sys = DMatrix::zeros(n * n, n);
        for j in 0..n {
            for k in 0..n {
                for i in 0..n {
                    center_sys[(j * n + k, i)] = self.alpha(i, j, k) - self.alpha(j, i, k);
                }
            }
        }
        let center_dim = n - linalg::numerical_rank(&center_sys, None);

        Ok(IsoSignature {
            dim: n,
            commutative,
            unital,
            trace_form_signature: (pos, neg, zero),
            z2_dim,
            center_dim,
        })
    }
}

/// The rank-4 residual tensor R_ijkm = Σ_l (α_ij^l α_lk^m − α_il^m α_jk^l)
/// together with its norms. The point is on the associator variety iff
/// `max_abs` vanishes.
#[derive(Clone, Debug)]
pub struct AssociatorResidual {
    n: usize,
    tensor: Vec<f64>,
    pub frobenius_norm: f64,
    pub max_abs: f64,
}

impl AssociatorResidual {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, m: usize) -> f64 {
        let n = self.n;
        self.tensor[((i * n + j) * n + k) * n + m]
    }

    /// Flat row-major [i][j][k][m] view.
    pub fn entries(&self) -> &[f64] {
        &self.tensor
    }

    pub fn as_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.tensor)
    }
}

/// Coordinates of a two-sided unit, with the worst per-basis-vector
/// defect observed when it was accepted.
#[derive(Clone, Debug)]
pub struct UnitVector {
    pub e: DVector<f64>,
    pub residual: f64,
}

/// Basis-independent invariants of an associative point; the computable
/// stand-in for its isomorphism class. `trace_form_signature` counts
/// positive, negative and zero eigenvalues of T(a,b) = trace(L_a L_b).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IsoSignature {
    pub dim: usize,
    pub commutative: bool,
    pub unital: bool,
    pub trace_form_signature: (usize, usize, usize),
    pub z2_dim: usize,
    pub center_dim: usize,
}

/// Cyclic-convolution product: α_ij^k = 1 when k ≡ i+j (mod n), with the
/// residue 0 represented by n, and 0 otherwise.
pub fn gen_truncated(n: usize) -> Result<StructureConstants> {
    if n == 0 {
        return Err(Error::input("gen_truncated requires n ≥ 1"));
    }
    StructureConstants::from_fn(n, |i, j, k| {
        if k == (i + j + 1) % n {
            1.0
        } else {
            0.0
        }
    })
}

/// Rank-one-profile product α_ij^k = g(k)·h(i)·h(j); associative for any
/// real g, h.
pub fn gen_gh(g: &[f64], h: &[f64]) -> Result<StructureConstants> {
    if g.len() != h.len() {
        return Err(Error::input(format!(
            "gen_gh requires g and h of equal length, got {} and {}",
            g.len(),
            h.len()
        )));
    }
    if g.is_empty() {
        return Err(Error::input("gen_gh requires n ≥ 1"));
    }
    StructureConstants::from_fn(g.len(), |i, j, k| g[k] * h[i] * h[j])
}

/// The canonical g(k)=k, h(j)=(−1)^j instance of `gen_gh` (1-based j).
pub fn gen_gh_canonical(n: usize) -> Result<StructureConstants> {
    let g: Vec<f64> = (1..=n).map(|k| k as f64).collect();
    let h: Vec<f64> = (1..=n).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 }).collect();
    gen_gh(&g, &h)
}

/// Numerical probe of algebra isomorphism. Seeks an invertible g with
/// g·μ_A(g⁻¹·, g⁻¹·) = μ_B by Gauss–Newton on the equivalent polynomial
/// system g·μ_A(x_i, x_j) = μ_B(g x_i, g x_j), starting from the identity
/// and then from `attempts` seeded random orthogonal matrices. A returned
/// g certifies isomorphism (final objective ‖g·μ_A(g⁻¹·,g⁻¹·) − μ_B‖_F is
/// at most `tol`); `None` is inconclusive.
pub fn try_isomorphism(
    a: &StructureConstants,
    b: &StructureConstants,
    attempts: usize,
    tol: f64,
    seed: u64,
) -> Result<Option<DMatrix<f64>>> {
    let n = a.n();
    if b.n() != n {
        return Err(Error::input(format!(
            "try_isomorphism requires equal dimensions, got {} and {}",
            n,
            b.n()
        )));
    }
    for (name, alg) in [("first", a), ("second", b)] {
        let r = alg.associator_residual().max_abs;
        if r > tol {
            return Err(Error::precondition(format!(
                "try_isomorphism requires associative inputs: {} argument has residual {:.3e} > tol {:.3e}",
                name, r, tol
            )));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts = Vec::with_capacity(attempts + 1);
    starts.push(DMatrix::identity(n, n));
    for _ in 0..attempts {
        starts.push(linalg::random_orthogonal(n, &mut rng));
    }

    for start in starts {
        if let Some(g) = gauss_newton_isomorphism(a, b, start) {
            if !linalg::is_invertible(&g) {
                continue;
            }
            let transported = a.transport_by(&g)?;
            let mut dist2 = 0.0;
            for (x, y) in transported
                .tensor()
                .data()
                .iter()
                .zip(b.tensor().data().iter())
            {
                dist2 += (x - y) * (x - y);
            }
            if dist2.sqrt() <= tol {
                return Ok(Some(g));
            }
        }
    }
    Ok(None)
}

/// Gauss–Newton on r_ijm(G) = Σ_l a_ij^l G_ml − Σ_pq G_pi G_qj b_pq^m.
/// Returns the final iterate when the iteration settles; the caller
/// decides acceptance.
fn gauss_newton_isomorphism(
    a: &StructureConstants,
    b: &StructureConstants,
    start: DMatrix<f64>,
) -> Option<DMatrix<f64>> {
    let n = a.n();
    let n3 = n * n * n;
    let n2 = n * n;
    let mut g = start;
    const MAX_ITERS: usize = 80;

    for _ in 0..MAX_ITERS {
        // Residual and the two contraction tables reused by the Jacobian:
        //   bg_right[j] over (s,m): b(e_s, g·x_j)_m
        //   bg_left[i]  over (s,m): b(g·x_i, e_s)_m
        let mut r = DVector::zeros(n3);
        let cols: Vec<DVector<f64>> = (0..n).map(|c| g.column(c).into_owned()).collect();
        let mut bg_right = Vec::with_capacity(n);
        let mut bg_left = Vec::with_capacity(n);
        for c in 0..n {
            let mut right = DMatrix::zeros(n, n);
            let mut left = DMatrix::zeros(n, n);
            for s in 0..n {
                let es = DVector::from_fn(n, |row, _| if row == s { 1.0 } else { 0.0 });
                let rv = b.tensor().apply_bilinear(&es, &cols[c]);
                let lv = b.tensor().apply_bilinear(&cols[c], &es);
                for m in 0..n {
                    right[(s, m)] = rv[m];
                    left[(s, m)] = lv[m];
                }
            }
            bg_right.push(right);
            bg_left.push(left);
        }
        for i in 0..n {
            for j in 0..n {
                let bij = b.tensor().apply_bilinear(&cols[i], &cols[j]);
                for m in 0..n {
                    let mut lin = 0.0;
                    for l in 0..n {
                        lin += a.alpha(i, j, l) * g[(m, l)];
                    }
                    r[(i * n + j) * n + m] = lin - bij[m];
                }
            }
        }
        let rnorm = r.norm();
        if rnorm <= 1e-13 {
            return Some(g);
        }

        let mut jac = DMatrix::zeros(n3, n2);
        for i in 0..n {
            for j in 0..n {
                for m in 0..n {
                    let row = (i * n + j) * n + m;
                    for t in 0..n {
                        jac[(row, m * n + t)] += a.alpha(i, j, t);
                    }
                    for s in 0..n {
                        jac[(row, s * n + i)] -= bg_right[j][(s, m)];
                        jac[(row, s * n + j)] -= bg_left[i][(s, m)];
                    }
                }
            }
        }

        let (delta, _) = linalg::min_norm_lstsq(&jac, &(-&r), None);
        let step_norm = delta.norm();
        if !step_norm.is_finite() || step_norm > 1e6 {
            return None;
        }
        for s in 0..n {
            for t in 0..n {
                g[(s, t)] += delta[s * n + t];
            }
        }
        if step_norm <= 1e-15 {
            return Some(g);
        }
    }
    Some(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use approx::assert_abs_diff_eq;

    fn basis(n: usize, i: usize) -> DVector<f64> {
        DVector::from_fn(n, |r, _| if r == i { 1.0 } else { 0.0 })
    }

    #[test]
    fn truncated_small_cases() {
        let a = gen_truncated(2).unwrap();
        // nonzeros α_11^2, α_12^1, α_21^1, α_22^2 (1-based)
        assert_eq!(a.alpha(0, 0, 1), 1.0);
        assert_eq!(a.alpha(0, 1, 0), 1.0);
        assert_eq!(a.alpha(1, 0, 0), 1.0);
        assert_eq!(a.alpha(1, 1, 1), 1.0);
        assert_eq!(a.tensor().data().iter().sum::<f64>(), 4.0);

        let one = gen_truncated(1).unwrap();
        assert_eq!(one.alpha(0, 0, 0), 1.0);

        // n=3: x2·x2 = x1 since 4 mod 3 = 1
        let c = gen_truncated(3).unwrap();
        let p = c.multiply(&basis(3, 1), &basis(3, 1)).unwrap();
        assert_eq!(p, basis(3, 0));

        assert!(gen_truncated(0).is_err());
    }

    #[test]
    fn truncated_is_associative_exactly() {
        for n in 1..=8 {
            let a = gen_truncated(n).unwrap();
            assert_eq!(a.associator_residual().max_abs, 0.0, "n = {}", n);
        }
    }

    #[test]
    fn gh_canonical_matches_hand_expansion() {
        // g(k)=k, h(j)=(−1)^j: α_11 = (1,2), α_12 = (−1,−2), α_22 = (1,2)
        let a = gen_gh_canonical(2).unwrap();
        assert_eq!(a.basis_product(0, 0), DVector::from_vec(vec![1.0, 2.0]));
        assert_eq!(a.basis_product(0, 1), DVector::from_vec(vec![-1.0, -2.0]));
        assert_eq!(a.basis_product(1, 1), DVector::from_vec(vec![1.0, 2.0]));

        let w = a.multiply(&basis(2, 0), &basis(2, 0)).unwrap();
        assert_eq!(w, DVector::from_vec(vec![1.0, 2.0]));
    }

    #[test]
    fn gh_zero_h_gives_zero_tensor() {
        let a = gen_gh(&[1.0, 2.0, 3.0], &[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(a.tensor().max_abs(), 0.0);
    }

    #[test]
    fn gh_is_associative_for_random_profiles() {
        // both association orders reduce to h(i)h(j)h(k)g(m)·Σ_l g(l)h(l)
        let g = [0.3, -1.7, 2.2, 0.9];
        let h = [1.1, -0.4, 0.6, -2.3];
        let a = gen_gh(&g, &h).unwrap();
        assert!(a.associator_residual().max_abs <= 1e-13);
    }

    #[test]
    fn gh_rejects_length_mismatch() {
        assert!(gen_gh(&[1.0, 2.0], &[1.0]).is_err());
    }

    #[test]
    fn multiply_is_bilinear_and_checks_shapes() {
        let a = gen_truncated(2).unwrap();
        let zero = DVector::zeros(2);
        let u = DVector::from_vec(vec![0.7, -0.2]);
        assert_eq!(a.multiply(&zero, &u).unwrap(), zero);
        // x1·x1 = x2 in the mod-2 index group
        assert_eq!(
            a.multiply(&basis(2, 0), &basis(2, 0)).unwrap(),
            basis(2, 1)
        );
        assert!(a.multiply(&DVector::zeros(3), &u).is_err());
    }

    #[test]
    fn residual_zero_tensor() {
        let z = StructureConstants::new(3, vec![0.0; 27]).unwrap();
        assert_eq!(z.associator_residual().max_abs, 0.0);
    }

    #[test]
    fn residual_against_naive_triple_loop() {
        // independent oracle: evaluate (x_i x_j) x_k − x_i (x_j x_k) through
        // multiply and compare entrywise
        let a = gen_gh(&[1.0, 2.0, -0.5], &[0.5, -1.0, 2.0]).unwrap();
        let mut b = a.clone();
        // knock it off the variety
        let mut data = b.tensor().data().to_vec();
        data[5] += 0.37;
        b = StructureConstants::new(3, data).unwrap();
        let res = b.associator_residual();
        let n = 3;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let left = b
                        .multiply(&b.basis_product(i, j), &basis(n, k))
                        .unwrap();
                    let right = b
                        .multiply(&basis(n, i), &b.basis_product(j, k))
                        .unwrap();
                    for m in 0..n {
                        assert_abs_diff_eq!(
                            res.get(i, j, k, m),
                            left[m] - right[m],
                            epsilon = 1e-12
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn unit_of_truncated_two_is_second_basis_vector() {
        let a = gen_truncated(2).unwrap();
        let unit = a.find_unit(1e-9).expect("x2 is the identity");
        assert_abs_diff_eq!(unit.e[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(unit.e[1], 1.0, epsilon = 1e-12);
        for j in 0..2 {
            let xj = basis(2, j);
            let prod = a.multiply(&unit.e, &xj).unwrap();
            assert!((prod - &xj).norm() <= 1e-9);
        }
    }

    #[test]
    fn gh_canonical_has_no_unit() {
        // the left-unit condition forces a rank-1 matrix to equal the
        // identity, impossible for n ≥ 2
        let a = gen_gh_canonical(2).unwrap();
        assert!(a.find_unit(1e-9).is_none());
        // the least-squares defect stays bounded away from 0
        assert!(a.find_unit(0.3).is_none());
    }

    #[test]
    fn unit_of_the_real_line() {
        let a = StructureConstants::new(1, vec![1.0]).unwrap();
        let unit = a.find_unit(1e-12).unwrap();
        assert_abs_diff_eq!(unit.e[0], 1.0, epsilon = 1e-13);
    }

    #[test]
    fn signature_of_direct_sum() {
        let sig = catalog::direct_sum_rr().iso_signature(1e-9).unwrap();
        assert_eq!(sig.trace_form_signature, (2, 0, 0));
        assert!(sig.commutative);
        assert!(sig.unital);
        assert_eq!(sig.center_dim, 2);
        assert_eq!(sig.dim, 2);
    }

    #[test]
    fn signature_of_dual_numbers() {
        let sig = catalog::dual_numbers().iso_signature(1e-9).unwrap();
        assert_eq!(sig.trace_form_signature, (1, 0, 1));
    }

    #[test]
    fn signature_of_complex_numbers() {
        let sig = catalog::complex_numbers().iso_signature(1e-9).unwrap();
        assert_eq!(sig.trace_form_signature, (1, 1, 0));
    }

    #[test]
    fn signature_rejects_non_associative_input() {
        let bad = StructureConstants::new(2, vec![1.0, 0.3, -0.2, 0.9, 0.4, 1.1, 0.0, 0.7])
            .unwrap();
        assert!(bad.associator_residual().max_abs > 1e-6);
        assert!(matches!(
            bad.iso_signature(1e-9),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn isomorphism_identity_certificate() {
        let a = gen_truncated(2).unwrap();
        let g = try_isomorphism(&a, &a, 0, 1e-9, 1).unwrap().unwrap();
        assert!((g - DMatrix::<f64>::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn isomorphism_split_complex_to_direct_sum() {
        // oracle certificate: e1 = (1+x)/2, e2 = (1−x)/2, i.e. columns
        // (1,1) and (1,−1) map the split-complex basis onto ℝ⊕ℝ
        let a = catalog::split_complex();
        let b = catalog::direct_sum_rr();
        let oracle = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, -1.0]);
        let transported = a.transport_by(&oracle).unwrap();
        let diff: f64 = transported
            .tensor()
            .data()
            .iter()
            .zip(b.tensor().data().iter())
            .map(|(x, y)| (x - y) * (x - y))
            .sum();
        assert!(diff.sqrt() <= 1e-12, "oracle certificate must be exact");

        let g = try_isomorphism(&a, &b, 20, 1e-8, 42).unwrap();
        assert!(g.is_some(), "probe should certify the isomorphism");
    }

    #[test]
    fn isomorphism_inconclusive_for_distinct_signatures() {
        let a = catalog::direct_sum_rr();
        let b = catalog::complex_numbers();
        assert_ne!(
            a.iso_signature(1e-9).unwrap(),
            b.iso_signature(1e-9).unwrap()
        );
        let g = try_isomorphism(&a, &b, 10, 1e-9, 7).unwrap();
        assert!(g.is_none());
    }

    #[test]
    fn accepted_certificate_preserves_signature() {
        let a = catalog::split_complex();
        let b = catalog::direct_sum_rr();
        if let Some(_g) = try_isomorphism(&a, &b, 20, 1e-8, 42).unwrap() {
            assert_eq!(
                a.iso_signature(1e-9).unwrap(),
                b.iso_signature(1e-9).unwrap()
            );
        } else {
            panic!("expected a certificate");
        }
    }

    #[test]
    fn left_mult_matrix_columns_are_products() {
        let a = catalog::complex_numbers();
        let l1 = a.left_mult_matrix(1);
        for i in 0..2 {
            let col = l1.column(i).into_owned();
            assert_eq!(col, a.basis_product(1, i));
        }
    }

    #[test]
    fn rejects_non_finite_entries() {
        assert!(StructureConstants::new(1, vec![f64::NAN]).is_err());
        assert!(StructureConstants::new(1, vec![f64::INFINITY]).is_err());
        assert!(StructureConstants::new(0, vec![]).is_err());
    }
}
