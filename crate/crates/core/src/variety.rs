//! The set of associative points in ℝ^{n³}, as a computational object:
//! Gauss–Newton projection of arbitrary tensors onto it, plus the exact
//! corner embeddings between dimensions.

use crate::algebra::StructureConstants;
use crate::cohomology;
use crate::error::{Error, Result};
use crate::linalg;
use crate::tensor::Tensor3;

/// Step-size guard: an update larger than this aborts the iteration as
/// divergent.
const DIVERGENCE_STEP: f64 = 1e6;

/// Outcome of a projection run. `iterations` counts applied updates;
/// `step_norms` has one entry per update; `final_residual` is the
/// associator max_abs at `point`.
#[derive(Clone, Debug)]
pub struct ProjectionReport {
    pub point: StructureConstants,
    pub iterations: usize,
    pub final_residual: f64,
    pub step_norms: Vec<f64>,
    pub converged: bool,
}

/// Damped Gauss–Newton iteration α ← α − (MᵀM + ‖F‖I)⁻¹Mᵀ·vec F toward
/// the associator variety, M being the residual Jacobian at the current
/// iterate; stops when the residual max_abs falls within `tol`. With
/// `normalize`, each iterate is rescaled to the Frobenius norm of the
/// start, which keeps the iteration off the zero algebra. Divergence and
/// exhaustion of `max_iter` are reported, not raised.
pub fn project_to_variety(
    start: &StructureConstants,
    tol: f64,
    max_iter: usize,
    normalize: bool,
) -> Result<ProjectionReport> {
    if !(tol > 0.0) {
        return Err(Error::input("projection tolerance must be positive"));
    }
    let target_norm = start.tensor().frobenius_norm();
    if normalize && target_norm == 0.0 {
        return Err(Error::input(
            "cannot normalize the zero tensor: its norm cannot be restored",
        ));
    }

    let n = start.n();
    let mut point = start.clone();
    let mut step_norms = Vec::new();
    let mut residual = point.associator_residual();

    while residual.max_abs > tol && step_norms.len() < max_iter {
        let jac = cohomology::tangent_operator(&point);
        // Damped step: by the Euler identity the point itself solves the
        // undamped system exactly, so a raw pseudo-inverse step walks the
        // ray toward the zero tensor instead of toward the nearby zero of
        // the residual. λ = ‖F‖ suppresses that near-null radial direction
        // and decays to a full Newton step as the residual vanishes.
        let delta = linalg::damped_lstsq(
            &jac,
            &residual.as_vector(),
            residual.frobenius_norm,
        );
        let step_norm = delta.norm();
        if !step_norm.is_finite() || step_norm > DIVERGENCE_STEP {
            step_norms.push(step_norm);
            return Ok(ProjectionReport {
                final_residual: residual.max_abs,
                iterations: step_norms.len(),
                point,
                step_norms,
                converged: false,
            });
        }
        step_norms.push(step_norm);

        let mut data = point.tensor().data().to_vec();
        for (idx, value) in data.iter_mut().enumerate() {
            *value -= delta[idx];
        }
        let mut next = Tensor3::from_vec(n, data)?;
        if normalize {
            let norm = next.frobenius_norm();
            if norm == 0.0 {
                return Ok(ProjectionReport {
                    final_residual: residual.max_abs,
                    iterations: step_norms.len(),
                    point,
                    step_norms,
                    converged: false,
                });
            }
            next = next.scaled(target_norm / norm);
        }
        point = StructureConstants::from_tensor(next)?;
        residual = point.associator_residual();
    }

    let converged = residual.max_abs <= tol;
    Ok(ProjectionReport {
        final_residual: residual.max_abs,
        iterations: step_norms.len(),
        point,
        step_norms,
        converged,
    })
}

/// The (n+1)-dimensional point with `a` in the leading n×n×n corner and
/// zeros elsewhere: the n-dimensional algebra extended by an annihilated
/// basis vector. Preserves associativity exactly.
pub fn embed(a: &StructureConstants) -> StructureConstants {
    let n = a.n();
    StructureConstants::from_fn(n + 1, |i, j, k| {
        if i < n && j < n && k < n {
            a.alpha(i, j, k)
        } else {
            0.0
        }
    })
    .expect("corner copy of finite entries is finite")
}

/// Inverse of `embed`: drops the last basis vector. Every entry touching
/// the dropped index must vanish within `tol`; the worst offender is
/// reported otherwise, 1-based.
pub fn restrict(a: &StructureConstants, tol: f64) -> Result<StructureConstants> {
    let n = a.n();
    if n < 2 {
        return Err(Error::input(
            "restrict requires dimension at least 2",
        ));
    }
    let last = n - 1;
    let mut worst: Option<(usize, usize, usize, f64)> = None;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i != last && j != last && k != last {
                    continue;
                }
                let v = a.alpha(i, j, k);
                if v.abs() > tol {
                    let better = match worst {
                        Some((_, _, _, w)) => v.abs() > w.abs(),
                        None => true,
                    };
                    if better {
                        worst = Some((i, j, k, v));
                    }
                }
            }
        }
    }
    if let Some((i, j, k, v)) = worst {
        return Err(Error::precondition(format!(
            "restrict: entry α_{}{}^{} = {:.6e} exceeds tol {:.3e} on the dropped index",
            i + 1,
            j + 1,
            k + 1,
            v,
            tol
        )));
    }
    StructureConstants::from_fn(last, |i, j, k| a.alpha(i, j, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::gen_truncated;
    use crate::catalog;

    #[test]
    fn associative_start_needs_no_iterations() {
        let a = gen_truncated(3).unwrap();
        let report = project_to_variety(&a, 1e-12, 50, true).unwrap();
        assert!(report.converged);
        assert_eq!(report.iterations, 0);
        assert!(report.step_norms.is_empty());
        assert_eq!(report.point.tensor().data(), a.tensor().data());
    }

    #[test]
    fn zero_tensor_is_already_on_the_variety() {
        let z = StructureConstants::new(2, vec![0.0; 8]).unwrap();
        let report = project_to_variety(&z, 1e-12, 50, false).unwrap();
        assert!(report.converged);
        assert_eq!(report.iterations, 0);
    }

    #[test]
    fn zero_tensor_with_normalization_is_rejected() {
        let z = StructureConstants::new(2, vec![0.0; 8]).unwrap();
        assert!(matches!(
            project_to_variety(&z, 1e-12, 50, true),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn projection_restores_a_perturbed_point() {
        let a = gen_truncated(2).unwrap();
        let mut data = a.tensor().data().to_vec();
        data[0] += 5e-3;
        data[3] -= 2e-3;
        data[5] += 1e-3;
        let start = StructureConstants::new(2, data).unwrap();
        assert!(start.associator_residual().max_abs > 1e-4);

        let report = project_to_variety(&start, 1e-10, 50, true).unwrap();
        assert!(report.converged);
        assert!(report.final_residual <= 1e-10);
        assert!(report.iterations >= 1 && report.iterations <= 50);
        // quadratic residual map: the landing point stays near the start
        let dist: f64 = report
            .point
            .tensor()
            .data()
            .iter()
            .zip(start.tensor().data().iter())
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt();
        assert!(dist <= 5e-2, "dist = {}", dist);
        // normalization held
        let norm = report.point.tensor().frobenius_norm();
        assert!((norm - start.tensor().frobenius_norm()).abs() <= 1e-9);
    }

    #[test]
    fn projection_is_idempotent_after_convergence() {
        let a = gen_truncated(2).unwrap();
        let mut data = a.tensor().data().to_vec();
        data[2] += 3e-3;
        let start = StructureConstants::new(2, data).unwrap();
        let first = project_to_variety(&start, 1e-11, 50, true).unwrap();
        assert!(first.converged);
        let second = project_to_variety(&first.point, 1e-11, 50, true).unwrap();
        assert_eq!(second.iterations, 0);
        assert_eq!(second.point.tensor().data(), first.point.tensor().data());
    }

    #[test]
    fn nonpositive_tolerance_is_an_input_error() {
        let a = gen_truncated(2).unwrap();
        assert!(project_to_variety(&a, 0.0, 10, false).is_err());
        assert!(project_to_variety(&a, -1.0, 10, false).is_err());
    }

    #[test]
    fn max_iter_zero_reports_unconverged_start() {
        // x₀x₀ = x₀, x₀x₁ = x₀: (x₀x₁)x₀ = x₀ but x₀(x₁x₀) = 0
        let bad =
            StructureConstants::new(2, vec![1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(bad.associator_residual().max_abs > 1e-9);
        let report = project_to_variety(&bad, 1e-9, 0, false).unwrap();
        assert!(!report.converged);
        assert_eq!(report.iterations, 0);
        assert_eq!(report.final_residual, bad.associator_residual().max_abs);
    }

    #[test]
    fn embed_pads_with_exact_zeros() {
        let a = catalog::complex_numbers();
        let big = embed(&a);
        assert_eq!(big.n(), 3);
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    if i < 2 && j < 2 && k < 2 {
                        assert_eq!(big.alpha(i, j, k), a.alpha(i, j, k));
                    } else {
                        assert_eq!(big.alpha(i, j, k), 0.0);
                    }
                }
            }
        }
        assert_eq!(big.associator_residual().max_abs, 0.0);
    }

    #[test]
    fn restrict_inverts_embed_bitwise() {
        let a = catalog::quadratic_extension(0.7325);
        let back = restrict(&embed(&a), 0.0).unwrap();
        assert_eq!(back.tensor().data(), a.tensor().data());
    }

    #[test]
    fn restrict_names_the_worst_offender() {
        // gen_truncated(3) has α_33^3 = α_23^2 = … nonzero on the last index;
        // the worst (they are all 1) found first in scan order wins, and the
        // message must carry a 1-based offender
        let a = gen_truncated(3).unwrap();
        let err = restrict(&a, 1e-9).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("restrict"), "message: {}", msg);
        assert!(msg.contains("α_"), "message: {}", msg);
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn restrict_of_dimension_one_is_an_input_error() {
        let a = StructureConstants::new(1, vec![1.0]).unwrap();
        assert!(matches!(restrict(&a, 1e-9), Err(Error::Input(_))));
    }
}
