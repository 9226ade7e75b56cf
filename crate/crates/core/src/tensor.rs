//! Dense rank-3 tensors over the reals.
//!
//! A `Tensor3` stores an n×n×n array row-major in `[i][j][k]` order and is
//! the common storage behind structure constants and 2-cochains. Indices
//! are 0-based in code; documentation and file formats speak 1-based.

use nalgebra::DVector;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor3 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(n: usize) -> Self {
        Tensor3 {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut t = Tensor3::zeros(n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    t.set(i, j, k, f(i, j, k));
                }
            }
        }
        t
    }

    /// Wraps a flat row-major `[i][j][k]` buffer; the length must be n³.
    pub fn from_vec(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n * n {
            return Err(Error::input(format!(
                "tensor buffer has {} entries, expected {}^3 = {}",
                data.len(),
                n,
                n * n * n
            )));
        }
        Ok(Tensor3 { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.n + j) * self.n + k]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, value: f64) {
        self.data[(i * self.n + j) * self.n + k] = value;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// w_k = Σ_{i,j} u_i v_j t_ij^k — the bilinear map the tensor encodes.
    pub fn apply_bilinear(&self, u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        let n = self.n;
        let mut w = DVector::zeros(n);
        for i in 0..n {
            let ui = u[i];
            if ui == 0.0 {
                continue;
            }
            for j in 0..n {
                let c = ui * v[j];
                if c == 0.0 {
                    continue;
                }
                for k in 0..n {
                    w[k] += c * self.get(i, j, k);
                }
            }
        }
        w
    }

    /// Coordinates of the product of basis elements i and j (the slice t_ij^·).
    pub fn basis_product(&self, i: usize, j: usize) -> DVector<f64> {
        DVector::from_fn(self.n, |k, _| self.get(i, j, k))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn scaled(&self, factor: f64) -> Tensor3 {
        Tensor3 {
            n: self.n,
            data: self.data.iter().map(|x| factor * x).collect(),
        }
    }

    /// Entrywise Σ w_s · t_s over an aligned stencil. All tensors must share n.
    pub fn weighted_sum(terms: &[(f64, &Tensor3)]) -> Result<Tensor3> {
        let n = terms
            .first()
            .ok_or_else(|| Error::input("weighted_sum needs at least one term"))?
            .1
            .n;
        let mut out = Tensor3::zeros(n);
        for &(w, t) in terms {
            if t.n != n {
                return Err(Error::input("weighted_sum: mismatched tensor dimensions"));
            }
            for (o, x) in out.data.iter_mut().zip(t.data.iter()) {
                *o += w * x;
            }
        }
        Ok(out)
    }

    pub fn flat_index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }
}
