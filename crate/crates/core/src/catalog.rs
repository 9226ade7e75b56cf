//! The handful of low-dimensional algebras used throughout the tests and
//! docs. All are commutative and associative; they exhaust the unital
//! two-dimensional real algebras up to isomorphism.

use crate::algebra::StructureConstants;

/// ℝ ⊕ ℝ in the idempotent basis: x_i·x_j = δ_ij·x_i.
pub fn direct_sum_rr() -> StructureConstants {
    StructureConstants::from_fn(2, |i, j, k| if i == j && j == k { 1.0 } else { 0.0 })
        .expect("constant tensor is finite")
}

/// ℝ[x]/(x² − t) in the basis {1, x}: x_1 is the unit and x_2² = t·x_1.
/// t = −1, 0, 1 give the complex numbers, dual numbers and split-complex
/// numbers; every other t is isomorphic to one of those by scaling x_2.
pub fn quadratic_extension(t: f64) -> StructureConstants {
    StructureConstants::from_fn(2, |i, j, k| match (i, j, k) {
        (0, 0, 0) => 1.0,
        (0, 1, 1) | (1, 0, 1) => 1.0,
        (1, 1, 0) => t,
        _ => 0.0,
    })
    .expect("finite for finite t")
}

/// ℝ[x]/(x² + 1): multiplication of complex numbers in the basis {1, i}.
pub fn complex_numbers() -> StructureConstants {
    quadratic_extension(-1.0)
}

/// ℝ[x]/(x²): the dual numbers, with nilpotent x_2.
pub fn dual_numbers() -> StructureConstants {
    quadratic_extension(0.0)
}

/// ℝ[x]/(x² − 1): the split-complex numbers, isomorphic to ℝ ⊕ ℝ.
pub fn split_complex() -> StructureConstants {
    quadratic_extension(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_catalog_algebras_are_associative_and_unital() {
        for (name, a) in [
            ("direct_sum_rr", direct_sum_rr()),
            ("complex", complex_numbers()),
            ("dual", dual_numbers()),
            ("split", split_complex()),
            ("quadratic(0.37)", quadratic_extension(0.37)),
        ] {
            assert_eq!(a.associator_residual().max_abs, 0.0, "{}", name);
            assert!(a.find_unit(1e-9).is_some(), "{}", name);
        }
    }

    #[test]
    fn direct_sum_unit_is_sum_of_idempotents() {
        let unit = direct_sum_rr().find_unit(1e-12).unwrap();
        assert!((unit.e[0] - 1.0).abs() < 1e-12);
        assert!((unit.e[1] - 1.0).abs() < 1e-12);
    }
}
