//! Numerical toolkit for finite-dimensional algebras given by structure
//! constants: associativity residuals, first-order deformation spaces,
//! projection onto the associative locus, families of algebras over a grid
//! base, and differential connections with parallel transport.

pub mod algebra;
pub mod catalog;
pub mod cohomology;
pub mod connection;
pub mod error;
pub mod family;
pub mod json;
pub mod linalg;
pub mod tensor;
pub mod variety;

pub use algebra::{
    gen_gh, gen_gh_canonical, gen_truncated, try_isomorphism, AssociatorResidual, IsoSignature,
    StructureConstants, UnitVector, DEFAULT_TOL,
};
pub use cohomology::{
    coboundary, coboundary_operator, coboundary_solve, cocycle_defect, tangent_operator,
    z2_basis, z2_dimension, BilinearMapTensor, EndomorphismMatrix,
};
pub use connection::{
    connection_from_transports, mu_prime, multiplicativity_defect, parallel_transport,
    solve_differential_connection, solve_path_connection, CoherenceReport, PathConnection,
    TransportMap,
};
pub use error::{Error, Result};
pub use family::{
    classify_map, pullback, section_product, unit_section, validate_family, AlgebraFamily,
    BaseGrid, BasePoint, ClassifyOptions, ClassifyReport, FamilyValidation, Interpolation,
    IntervalGrid, Section,
};
pub use tensor::Tensor3;
pub use variety::{embed, project_to_variety, restrict, ProjectionReport};
