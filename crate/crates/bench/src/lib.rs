//! Shared fixtures for the benchmark targets.

use abundle::{
    catalog, AlgebraFamily, BaseGrid, BasePoint, Interpolation, IntervalGrid, StructureConstants,
    Tensor3,
};

pub fn quadratic_family(nodes: usize) -> AlgebraFamily {
    let base = BaseGrid::Interval(IntervalGrid {
        t0: -1.0,
        t1: 1.0,
        nodes,
    });
    AlgebraFamily::from_fn(base, Interpolation::Linear, |p| match p {
        BasePoint::Scalar(t) => Ok(catalog::quadratic_extension(t)),
        BasePoint::Planar(_) => unreachable!("interval base"),
    })
    .expect("family builds")
}

/// gen_truncated(n) nudged off the variety along a fixed direction.
pub fn perturbed_generator(n: usize, eps: f64) -> StructureConstants {
    let target = abundle::gen_truncated(n).expect("n is positive");
    let data: Vec<f64> = target
        .tensor()
        .data()
        .iter()
        .enumerate()
        .map(|(idx, x)| x + eps * ((idx % 7) as f64 - 3.0) / 3.0)
        .collect();
    StructureConstants::from_tensor(Tensor3::from_vec(n, data).expect("finite data"))
        .expect("finite tensor")
}
