//! Algebras varying over a base: node data on a simple grid plus an
//! interpolation rule. A family assigns to every admissible base point a
//! structure-constant tensor; at grid nodes the assignment returns the
//! stored tensor bit for bit, between nodes it blends neighbours, so a
//! family is a concrete stand-in for a continuously varying bundle of
//! algebras with its fiberwise products, sections, validation and
//! classification.

use std::collections::HashMap;
use std::f64::consts::TAU;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{try_isomorphism, IsoSignature, StructureConstants};
use crate::error::{Error, Result};
use crate::tensor::Tensor3;

/// Uniform closed-interval grid: nodes at t0 + i·(t1−t0)/(nodes−1).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalGrid {
    pub t0: f64,
    pub t1: f64,
    pub nodes: usize,
}

impl IntervalGrid {
    pub fn new(t0: f64, t1: f64, nodes: usize) -> Result<Self> {
        let grid = IntervalGrid { t0, t1, nodes };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.t0.is_finite() || !self.t1.is_finite() {
            return Err(Error::input("interval endpoints must be finite"));
        }
        if !(self.t0 < self.t1) {
            return Err(Error::input(format!(
                "interval requires t0 < t1, got [{}, {}]",
                self.t0, self.t1
            )));
        }
        if self.nodes < 2 {
            return Err(Error::input("interval grid needs at least 2 nodes"));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        (self.t1 - self.t0) / (self.nodes - 1) as f64
    }

    /// i-th node coordinate; the last node is exactly t1.
    pub fn coord(&self, i: usize) -> f64 {
        if i + 1 == self.nodes {
            self.t1
        } else {
            self.t0 + i as f64 * self.dt()
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        t.is_finite() && t >= self.t0 && t <= self.t1
    }
}

/// Base spaces a family can live over. Circle coordinates are angles,
/// with nodes at 2πi/nodes and every finite angle admissible; grid2d
/// nodes are ordered lexicographically, u outer, v inner.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BaseGrid {
    Interval(IntervalGrid),
    Circle { nodes: usize },
    Grid2d { u: IntervalGrid, v: IntervalGrid },
}

impl BaseGrid {
    pub fn validate(&self) -> Result<()> {
        match self {
            BaseGrid::Interval(g) => g.validate(),
            BaseGrid::Circle { nodes } => {
                if *nodes < 3 {
                    Err(Error::input("circle grid needs at least 3 nodes"))
                } else {
                    Ok(())
                }
            }
            BaseGrid::Grid2d { u, v } => {
                u.validate()?;
                v.validate()
            }
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            BaseGrid::Interval(g) => g.nodes,
            BaseGrid::Circle { nodes } => *nodes,
            BaseGrid::Grid2d { u, v } => u.nodes * v.nodes,
        }
    }

    pub fn node_point(&self, idx: usize) -> Result<BasePoint> {
        if idx >= self.node_count() {
            return Err(Error::input(format!(
                "node index {} out of range for {} nodes",
                idx,
                self.node_count()
            )));
        }
        Ok(match self {
            BaseGrid::Interval(g) => BasePoint::Scalar(g.coord(idx)),
            BaseGrid::Circle { nodes } => BasePoint::Scalar(idx as f64 * (TAU / *nodes as f64)),
            BaseGrid::Grid2d { u, v } => {
                BasePoint::Planar([u.coord(idx / v.nodes), v.coord(idx % v.nodes)])
            }
        })
    }

    pub fn contains(&self, p: BasePoint) -> bool {
        match (self, p) {
            (BaseGrid::Interval(g), BasePoint::Scalar(t)) => g.contains(t),
            (BaseGrid::Circle { .. }, BasePoint::Scalar(t)) => t.is_finite(),
            (BaseGrid::Grid2d { u, v }, BasePoint::Planar([a, b])) => {
                u.contains(a) && v.contains(b)
            }
            _ => false,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            BaseGrid::Grid2d { .. } => 2,
            _ => 1,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            BaseGrid::Interval(_) => "interval",
            BaseGrid::Circle { .. } => "circle",
            BaseGrid::Grid2d { .. } => "grid2d",
        }
    }

    /// Grid edges as index pairs, in node order: interval chains, circle
    /// chains plus the wrap-around edge, grid2d emits the v-neighbour then
    /// the u-neighbour of each node.
    pub fn adjacent_pairs(&self) -> Vec<(usize, usize)> {
        match self {
            BaseGrid::Interval(g) => (0..g.nodes - 1).map(|i| (i, i + 1)).collect(),
            BaseGrid::Circle { nodes } => (0..*nodes).map(|i| (i, (i + 1) % nodes)).collect(),
            BaseGrid::Grid2d { u, v } => {
                let mut pairs = Vec::new();
                for iu in 0..u.nodes {
                    for iv in 0..v.nodes {
                        let here = iu * v.nodes + iv;
                        if iv + 1 < v.nodes {
                            pairs.push((here, here + 1));
                        }
                        if iu + 1 < u.nodes {
                            pairs.push((here, here + v.nodes));
                        }
                    }
                }
                pairs
            }
        }
    }
}

/// A point of the base: a scalar for interval and circle bases, a pair
/// for grid2d.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BasePoint {
    Scalar(f64),
    Planar([f64; 2]),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Interpolation {
    Linear,
    Cubic,
}

/// Node weights for evaluating one axis at coordinate `t`. A bitwise hit
/// on a node coordinate returns that single node with weight 1, which is
/// what makes node evaluation reproduce stored data exactly.
pub(crate) fn interval_axis_weights(
    grid: &IntervalGrid,
    interpolation: Interpolation,
    t: f64,
) -> Result<Vec<(usize, f64)>> {
    if !grid.contains(t) {
        return Err(Error::input(format!(
            "coordinate {} lies outside the base interval [{}, {}]",
            t, grid.t0, grid.t1
        )));
    }
    let count = grid.nodes;
    let u = (t - grid.t0) / grid.dt();
    let near = u.round() as isize;
    if near >= 0 && (near as usize) < count && grid.coord(near as usize) == t {
        return Ok(vec![(near as usize, 1.0)]);
    }
    let i = (u.floor() as usize).min(count - 2);
    let w = ((t - grid.coord(i)) / grid.dt()).clamp(0.0, 1.0);
    match interpolation {
        Interpolation::Linear => Ok(vec![(i, 1.0 - w), (i + 1, w)]),
        Interpolation::Cubic => {
            let stencil = cubic_stencil(w);
            let mut acc: HashMap<usize, f64> = HashMap::new();
            for (offset, c) in stencil {
                let idx = i as isize + offset;
                // ghost nodes fold through linear extrapolation:
                // p_{-1} = 2γ_0 − γ_1 and p_count = 2γ_last − γ_{last−1}
                if idx < 0 {
                    *acc.entry(0).or_insert(0.0) += 2.0 * c;
                    *acc.entry(1).or_insert(0.0) -= c;
                } else if idx as usize >= count {
                    *acc.entry(count - 1).or_insert(0.0) += 2.0 * c;
                    *acc.entry(count - 2).or_insert(0.0) -= c;
                } else {
                    *acc.entry(idx as usize).or_insert(0.0) += c;
                }
            }
            let mut out: Vec<(usize, f64)> = acc.into_iter().collect();
            out.sort_by_key(|(idx, _)| *idx);
            Ok(out)
        }
    }
}

fn circle_axis_weights(
    count: usize,
    interpolation: Interpolation,
    t: f64,
) -> Result<Vec<(usize, f64)>> {
    if !t.is_finite() {
        return Err(Error::input("circle coordinate must be finite"));
    }
    let dtheta = TAU / count as f64;
    let theta = t.rem_euclid(TAU);
    let s = theta / dtheta;
    let near = (s.round() as usize) % count;
    if near as f64 * dtheta == theta {
        return Ok(vec![(near, 1.0)]);
    }
    let i = (s.floor() as usize) % count;
    let w = (s - s.floor()).clamp(0.0, 1.0);
    match interpolation {
        Interpolation::Linear => Ok(vec![(i, 1.0 - w), ((i + 1) % count, w)]),
        Interpolation::Cubic => {
            let stencil = cubic_stencil(w);
            let mut acc: HashMap<usize, f64> = HashMap::new();
            for (offset, c) in stencil {
                let idx = (i as isize + offset).rem_euclid(count as isize) as usize;
                *acc.entry(idx).or_insert(0.0) += c;
            }
            let mut out: Vec<(usize, f64)> = acc.into_iter().collect();
            out.sort_by_key(|(idx, _)| *idx);
            Ok(out)
        }
    }
}

/// Catmull–Rom weights for the four nodes at offsets −1, 0, 1, 2 around
/// the cell parameter w ∈ (0, 1). Reproduces linear data exactly.
fn cubic_stencil(w: f64) -> [(isize, f64); 4] {
    let w2 = w * w;
    let w3 = w2 * w;
    [
        (-1, 0.5 * (-w3 + 2.0 * w2 - w)),
        (0, 0.5 * (3.0 * w3 - 5.0 * w2 + 2.0)),
        (1, 0.5 * (-3.0 * w3 + 4.0 * w2 + w)),
        (2, 0.5 * (w3 - w2)),
    ]
}

/// Node tensors over a base grid plus the interpolation rule that fills
/// in the rest of the base.
#[derive(Clone, Debug)]
pub struct AlgebraFamily {
    n: usize,
    base: BaseGrid,
    interpolation: Interpolation,
    gamma: Vec<StructureConstants>,
}

impl AlgebraFamily {
    pub fn new(
        base: BaseGrid,
        interpolation: Interpolation,
        gamma: Vec<StructureConstants>,
    ) -> Result<Self> {
        base.validate()?;
        if gamma.len() != base.node_count() {
            return Err(Error::input(format!(
                "family needs one tensor per node: expected {}, got {}",
                base.node_count(),
                gamma.len()
            )));
        }
        let n = gamma[0].n();
        if let Some(bad) = gamma.iter().position(|g| g.n() != n) {
            return Err(Error::input(format!(
                "family dimension mismatch: node 0 has n = {}, node {} has n = {}",
                n,
                bad,
                gamma[bad].n()
            )));
        }
        Ok(AlgebraFamily {
            n,
            base,
            interpolation,
            gamma,
        })
    }

    pub fn from_fn(
        base: BaseGrid,
        interpolation: Interpolation,
        mut f: impl FnMut(BasePoint) -> Result<StructureConstants>,
    ) -> Result<Self> {
        base.validate()?;
        let mut gamma = Vec::with_capacity(base.node_count());
        for idx in 0..base.node_count() {
            gamma.push(f(base.node_point(idx)?)?);
        }
        AlgebraFamily::new(base, interpolation, gamma)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn base(&self) -> &BaseGrid {
        &self.base
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    pub fn node_algebra(&self, idx: usize) -> &StructureConstants {
        &self.gamma[idx]
    }

    pub fn node_algebras(&self) -> &[StructureConstants] {
        &self.gamma
    }

    /// Node index/weight pairs the fiber at `p` is blended from.
    fn weights(&self, p: BasePoint) -> Result<Vec<(usize, f64)>> {
        match (&self.base, p) {
            (BaseGrid::Interval(g), BasePoint::Scalar(t)) => {
                interval_axis_weights(g, self.interpolation, t)
            }
            (BaseGrid::Circle { nodes }, BasePoint::Scalar(t)) => {
                circle_axis_weights(*nodes, self.interpolation, t)
            }
            (BaseGrid::Grid2d { u, v }, BasePoint::Planar([a, b])) => {
                let wu = interval_axis_weights(u, self.interpolation, a)?;
                let wv = interval_axis_weights(v, self.interpolation, b)?;
                let mut out = Vec::with_capacity(wu.len() * wv.len());
                for (iu, cu) in &wu {
                    for (iv, cv) in &wv {
                        out.push((iu * v.nodes + iv, cu * cv));
                    }
                }
                Ok(out)
            }
            (grid, point) => Err(Error::input(format!(
                "{} base expects a {} point, got {:?}",
                grid.kind_name(),
                if grid.dim() == 1 { "scalar" } else { "planar" },
                point
            ))),
        }
    }

    /// The algebra over `p`: stored data at nodes (bit for bit), an
    /// interpolated blend elsewhere.
    pub fn fiber_at(&self, p: BasePoint) -> Result<StructureConstants> {
        let weights = self.weights(p)?;
        if weights.len() == 1 && weights[0].1 == 1.0 {
            return Ok(self.gamma[weights[0].0].clone());
        }
        let terms: Vec<(f64, &Tensor3)> = weights
            .iter()
            .map(|(idx, w)| (*w, self.gamma[*idx].tensor()))
            .collect();
        StructureConstants::from_tensor(Tensor3::weighted_sum(&terms)?)
    }
}

/// Per-node associativity residuals of a family.
#[derive(Clone, Debug, Serialize)]
pub struct FamilyValidation {
    pub tol: f64,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub valid: bool,
}

pub fn validate_family(f: &AlgebraFamily, tol: f64) -> FamilyValidation {
    let residuals: Vec<f64> = f
        .node_algebras()
        .par_iter()
        .map(|g| g.associator_residual().max_abs)
        .collect();
    let max_residual = residuals.iter().cloned().fold(0.0, f64::max);
    FamilyValidation {
        tol,
        residuals,
        max_residual,
        valid: max_residual <= tol,
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ClassifyOptions {
    pub tol: f64,
    pub attempts: usize,
    pub seed: u64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            tol: 1e-9,
            attempts: 20,
            seed: 0,
        }
    }
}

/// Fiberwise classification: per-node invariant signatures, nodes grouped
/// by equal signature (cluster ids in order of first appearance), and —
/// when a single cluster covers the whole base — an attempt to certify
/// that adjacent fibers are actually isomorphic, making the family a
/// candidate for local triviality in the strict sense.
#[derive(Clone, Debug, Serialize)]
pub struct ClassifyReport {
    pub signatures: Vec<IsoSignature>,
    pub cluster_of_node: Vec<usize>,
    pub clusters: Vec<Vec<usize>>,
    pub strict_candidate: bool,
}

pub fn classify_map(f: &AlgebraFamily, opts: &ClassifyOptions) -> Result<ClassifyReport> {
    let validation = validate_family(f, opts.tol);
    if !validation.valid {
        let worst = validation
            .residuals
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(idx, _)| idx)
            .unwrap_or(0);
        return Err(Error::precondition(format!(
            "classify_map requires an associative family: node {} has residual {:.3e} > tol {:.3e}",
            worst, validation.max_residual, opts.tol
        )));
    }

    let signatures: Vec<IsoSignature> = f
        .node_algebras()
        .par_iter()
        .map(|g| g.iso_signature(opts.tol))
        .collect::<Result<_>>()?;

    let mut cluster_ids: HashMap<&IsoSignature, usize> = HashMap::new();
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut cluster_of_node = Vec::with_capacity(signatures.len());
    for (idx, sig) in signatures.iter().enumerate() {
        let next_id = clusters.len();
        let id = *cluster_ids.entry(sig).or_insert(next_id);
        if id == clusters.len() {
            clusters.push(Vec::new());
        }
        clusters[id].push(idx);
        cluster_of_node.push(id);
    }

    // strictness probe: only meaningful when the signature is constant;
    // every grid edge must carry an isomorphism certificate
    let strict_candidate = if clusters.len() == 1 {
        let pairs = f.base().adjacent_pairs();
        let verdicts: Vec<bool> = pairs
            .par_iter()
            .enumerate()
            .map(|(edge, (i, j))| {
                try_isomorphism(
                    f.node_algebra(*i),
                    f.node_algebra(*j),
                    opts.attempts,
                    opts.tol,
                    opts.seed.wrapping_add(edge as u64),
                )
                .map(|cert| cert.is_some())
            })
            .collect::<Result<_>>()?;
        verdicts.into_iter().all(|ok| ok)
    } else {
        false
    };

    Ok(ClassifyReport {
        signatures,
        cluster_of_node,
        clusters,
        strict_candidate,
    })
}

/// A choice of fiber element over every node.
#[derive(Clone, Debug, PartialEq)]
pub struct Section {
    pub values: Vec<DVector<f64>>,
}

impl Section {
    pub fn constant(count: usize, v: DVector<f64>) -> Self {
        Section {
            values: vec![v; count],
        }
    }
}

/// Nodewise product of two sections in the fiber algebras.
pub fn section_product(f: &AlgebraFamily, s: &Section, t: &Section) -> Result<Section> {
    let count = f.base().node_count();
    for (name, sec) in [("first", s), ("second", t)] {
        if sec.values.len() != count {
            return Err(Error::input(format!(
                "{} section has {} values, family has {} nodes",
                name,
                sec.values.len(),
                count
            )));
        }
        if let Some(bad) = sec.values.iter().position(|v| v.len() != f.n()) {
            return Err(Error::input(format!(
                "{} section node {} has length {}, fiber dimension is {}",
                name,
                bad,
                sec.values[bad].len(),
                f.n()
            )));
        }
    }
    let values = (0..count)
        .map(|i| f.node_algebra(i).multiply(&s.values[i], &t.values[i]))
        .collect::<Result<_>>()?;
    Ok(Section { values })
}

/// Nodewise two-sided units, when every fiber has one within `tol`.
pub fn unit_section(f: &AlgebraFamily, tol: f64) -> Option<Section> {
    let values = f
        .node_algebras()
        .iter()
        .map(|g| g.find_unit(tol).map(|u| u.e))
        .collect::<Option<Vec<_>>>()?;
    Some(Section { values })
}

/// Reindex a family along a map of bases: node s of `new_base` receives
/// the fiber of `f` over `phi[s]`. Every image point must be admissible.
pub fn pullback(
    f: &AlgebraFamily,
    new_base: BaseGrid,
    phi: &[BasePoint],
) -> Result<AlgebraFamily> {
    new_base.validate()?;
    if phi.len() != new_base.node_count() {
        return Err(Error::input(format!(
            "pullback map needs one image per node: expected {}, got {}",
            new_base.node_count(),
            phi.len()
        )));
    }
    let gamma = phi
        .iter()
        .map(|p| f.fiber_at(*p))
        .collect::<Result<Vec<_>>>()?;
    AlgebraFamily::new(new_base, f.interpolation(), gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn quadratic_family(t0: f64, t1: f64, nodes: usize) -> AlgebraFamily {
        let base = BaseGrid::Interval(IntervalGrid { t0, t1, nodes });
        AlgebraFamily::from_fn(base, Interpolation::Linear, |p| {
            let BasePoint::Scalar(t) = p else { unreachable!() };
            Ok(catalog::quadratic_extension(t))
        })
        .unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(IntervalGrid::new(0.0, 1.0, 2).is_ok());
        assert!(IntervalGrid::new(1.0, 0.0, 5).is_err());
        assert!(IntervalGrid::new(0.0, 0.0, 5).is_err());
        assert!(IntervalGrid::new(0.0, 1.0, 1).is_err());
        assert!(BaseGrid::Circle { nodes: 3 }.validate().is_ok());
        assert!(BaseGrid::Circle { nodes: 2 }.validate().is_err());
    }

    #[test]
    fn interval_last_node_is_exactly_t1() {
        let g = IntervalGrid::new(-1.0, 1.0, 201).unwrap();
        assert_eq!(g.coord(0), -1.0);
        assert_eq!(g.coord(200), 1.0);
    }

    #[test]
    fn node_evaluation_is_bit_identical() {
        let fam = quadratic_family(-1.0, 1.0, 7);
        let BaseGrid::Interval(g) = *fam.base() else { unreachable!() };
        for i in 0..7 {
            let fiber = fam.fiber_at(BasePoint::Scalar(g.coord(i))).unwrap();
            assert_eq!(fiber.tensor().data(), fam.node_algebra(i).tensor().data());
        }
    }

    #[test]
    fn linear_interpolation_reproduces_linear_data() {
        let fam = quadratic_family(-1.0, 1.0, 9);
        for &t in &[-0.93, -0.4, 0.123, 0.777] {
            let fiber = fam.fiber_at(BasePoint::Scalar(t)).unwrap();
            let exact = catalog::quadratic_extension(t);
            let diff: f64 = fiber
                .tensor()
                .data()
                .iter()
                .zip(exact.tensor().data().iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(diff <= 1e-14, "t = {}, diff = {}", t, diff);
        }
    }

    #[test]
    fn cubic_interpolation_also_reproduces_linear_data() {
        let base = BaseGrid::Interval(IntervalGrid::new(-1.0, 1.0, 9).unwrap());
        let fam = AlgebraFamily::from_fn(base, Interpolation::Cubic, |p| {
            let BasePoint::Scalar(t) = p else { unreachable!() };
            Ok(catalog::quadratic_extension(t))
        })
        .unwrap();
        // interior cells and both boundary cells, where ghost folding acts
        for &t in &[-0.99, -0.95, -0.2, 0.6, 0.95, 0.99] {
            let fiber = fam.fiber_at(BasePoint::Scalar(t)).unwrap();
            let exact = catalog::quadratic_extension(t);
            let diff: f64 = fiber
                .tensor()
                .data()
                .iter()
                .zip(exact.tensor().data().iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(diff <= 1e-13, "t = {}, diff = {}", t, diff);
        }
    }

    #[test]
    fn cubic_weights_sum_to_one() {
        let g = IntervalGrid::new(0.0, 1.0, 5).unwrap();
        for &t in &[0.05, 0.13, 0.5, 0.93] {
            let w = interval_axis_weights(&g, Interpolation::Cubic, t).unwrap();
            let total: f64 = w.iter().map(|(_, c)| c).sum();
            assert!((total - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn out_of_domain_points_are_input_errors() {
        let fam = quadratic_family(0.0, 1.0, 5);
        assert!(matches!(
            fam.fiber_at(BasePoint::Scalar(1.5)),
            Err(Error::Input(_))
        ));
        assert!(matches!(
            fam.fiber_at(BasePoint::Planar([0.5, 0.5])),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn circle_families_are_periodic() {
        let base = BaseGrid::Circle { nodes: 8 };
        let fam = AlgebraFamily::from_fn(base, Interpolation::Linear, |p| {
            let BasePoint::Scalar(theta) = p else { unreachable!() };
            Ok(catalog::quadratic_extension(theta.cos()))
        })
        .unwrap();
        for &theta in &[0.3, 2.0, 5.9] {
            let a = fam.fiber_at(BasePoint::Scalar(theta)).unwrap();
            let b = fam.fiber_at(BasePoint::Scalar(theta + TAU)).unwrap();
            let diff: f64 = a
                .tensor()
                .data()
                .iter()
                .zip(b.tensor().data().iter())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            assert!(diff <= 1e-9, "theta = {}", theta);
        }
        // the wrap-around cell interpolates between the last and first node
        let wrapped = fam.fiber_at(BasePoint::Scalar(-0.1)).unwrap();
        assert!(wrapped.tensor().is_finite());
    }

    #[test]
    fn grid2d_nodes_are_lexicographic() {
        let base = BaseGrid::Grid2d {
            u: IntervalGrid::new(0.0, 1.0, 3).unwrap(),
            v: IntervalGrid::new(10.0, 11.0, 2).unwrap(),
        };
        assert_eq!(base.node_count(), 6);
        assert_eq!(base.node_point(0).unwrap(), BasePoint::Planar([0.0, 10.0]));
        assert_eq!(base.node_point(1).unwrap(), BasePoint::Planar([0.0, 11.0]));
        assert_eq!(base.node_point(2).unwrap(), BasePoint::Planar([0.5, 10.0]));
        assert_eq!(base.node_point(5).unwrap(), BasePoint::Planar([1.0, 11.0]));
    }

    #[test]
    fn grid2d_fiber_blends_both_axes() {
        let base = BaseGrid::Grid2d {
            u: IntervalGrid::new(0.0, 1.0, 3).unwrap(),
            v: IntervalGrid::new(0.0, 1.0, 3).unwrap(),
        };
        let fam = AlgebraFamily::from_fn(base, Interpolation::Linear, |p| {
            let BasePoint::Planar([a, b]) = p else { unreachable!() };
            Ok(catalog::quadratic_extension(a + 2.0 * b))
        })
        .unwrap();
        let fiber = fam.fiber_at(BasePoint::Planar([0.25, 0.6])).unwrap();
        let expected = catalog::quadratic_extension(0.25 + 1.2);
        let diff: f64 = fiber
            .tensor()
            .data()
            .iter()
            .zip(expected.tensor().data().iter())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(diff <= 1e-13);
        // node hit must be exact
        let node = fam.fiber_at(base.node_point(4).unwrap()).unwrap();
        assert_eq!(node.tensor().data(), fam.node_algebra(4).tensor().data());
    }

    #[test]
    fn validation_reports_worst_node() {
        let base = BaseGrid::Interval(IntervalGrid::new(0.0, 1.0, 3).unwrap());
        let good = catalog::dual_numbers();
        let mut data = good.tensor().data().to_vec();
        // break x₀(x₀x₁) = (x₀x₀)x₁ by mixing x₀ into the x₀x₁ product
        data[2] += 0.25;
        let bad = StructureConstants::new(2, data).unwrap();
        let fam = AlgebraFamily::new(
            base,
            Interpolation::Linear,
            vec![good.clone(), bad, good],
        )
        .unwrap();
        let v = validate_family(&fam, 1e-9);
        assert!(!v.valid);
        assert_eq!(v.residuals.len(), 3);
        assert_eq!(v.residuals[0], 0.0);
        assert!(v.residuals[1] > 1e-3);
        assert_eq!(v.max_residual, v.residuals[1]);
    }

    #[test]
    fn classify_splits_the_quadratic_family_into_three_clusters() {
        let fam = quadratic_family(-1.0, 1.0, 11);
        let report = classify_map(&fam, &ClassifyOptions::default()).unwrap();
        assert_eq!(report.clusters.len(), 3);
        // first appearance order: negative t, then t = 0, then positive
        assert_eq!(report.cluster_of_node[0], 0);
        assert_eq!(report.cluster_of_node[5], 1);
        assert_eq!(report.cluster_of_node[10], 2);
        assert_eq!(report.clusters[1], vec![5]);
        assert_eq!(report.signatures[0].trace_form_signature, (1, 1, 0));
        assert_eq!(report.signatures[5].trace_form_signature, (1, 0, 1));
        assert_eq!(report.signatures[10].trace_form_signature, (2, 0, 0));
        assert!(!report.strict_candidate);
    }

    #[test]
    fn classify_marks_constant_families_strict() {
        let base = BaseGrid::Interval(IntervalGrid::new(0.0, 1.0, 5).unwrap());
        let fam = AlgebraFamily::from_fn(base, Interpolation::Linear, |_| {
            Ok(catalog::complex_numbers())
        })
        .unwrap();
        let report = classify_map(&fam, &ClassifyOptions::default()).unwrap();
        assert_eq!(report.clusters.len(), 1);
        assert!(report.strict_candidate);
    }

    #[test]
    fn classify_rejects_invalid_families() {
        let base = BaseGrid::Interval(IntervalGrid::new(0.0, 1.0, 2).unwrap());
        let bad =
            StructureConstants::new(2, vec![1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let fam = AlgebraFamily::new(base, Interpolation::Linear, vec![bad.clone(), bad]).unwrap();
        assert!(matches!(
            classify_map(&fam, &ClassifyOptions::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn section_product_multiplies_nodewise() {
        let fam = quadratic_family(0.5, 1.0, 3);
        // x2 ⊙ x2 = t·x1 at each node
        let x2 = DVector::from_vec(vec![0.0, 1.0]);
        let s = Section::constant(3, x2);
        let prod = section_product(&fam, &s, &s).unwrap();
        let BaseGrid::Interval(g) = *fam.base() else { unreachable!() };
        for i in 0..3 {
            assert!((prod.values[i][0] - g.coord(i)).abs() <= 1e-15);
            assert_eq!(prod.values[i][1], 0.0);
        }
    }

    #[test]
    fn unit_section_exists_for_unital_families() {
        let fam = quadratic_family(-1.0, 1.0, 5);
        let unit = unit_section(&fam, 1e-9).expect("each quadratic extension is unital");
        for v in &unit.values {
            assert!((v[0] - 1.0).abs() <= 1e-9);
            assert!(v[1].abs() <= 1e-9);
        }
        // unit ⊙ unit = unit
        let sq = section_product(&fam, &unit, &unit).unwrap();
        for (a, b) in sq.values.iter().zip(unit.values.iter()) {
            assert!((a - b).norm() <= 1e-9);
        }
    }

    #[test]
    fn unit_section_is_none_when_a_fiber_lacks_one() {
        let base = BaseGrid::Interval(IntervalGrid::new(0.0, 1.0, 2).unwrap());
        let no_unit = StructureConstants::new(2, vec![0.0; 8]).unwrap();
        let fam = AlgebraFamily::new(
            base,
            Interpolation::Linear,
            vec![catalog::dual_numbers(), no_unit],
        )
        .unwrap();
        assert!(unit_section(&fam, 1e-9).is_none());
    }

    #[test]
    fn pullback_reindexes_fibers() {
        let fam = quadratic_family(-1.0, 1.0, 21);
        let new_base = BaseGrid::Interval(IntervalGrid::new(0.0, 1.0, 3).unwrap());
        // φ(s) = −s: pulls the family back through a flip
        let phi: Vec<BasePoint> = (0..3)
            .map(|i| {
                let BasePoint::Scalar(s) = new_base.node_point(i).unwrap() else {
                    unreachable!()
                };
                BasePoint::Scalar(-s)
            })
            .collect();
        let pulled = pullback(&fam, new_base, &phi).unwrap();
        assert_eq!(pulled.n(), 2);
        let fiber = pulled.node_algebra(2);
        let expected = catalog::quadratic_extension(-1.0);
        assert_eq!(fiber.tensor().data(), expected.tensor().data());
    }

    #[test]
    fn pullback_rejects_out_of_domain_images() {
        let fam = quadratic_family(0.0, 1.0, 5);
        let new_base = BaseGrid::Interval(IntervalGrid::new(0.0, 1.0, 2).unwrap());
        let phi = [BasePoint::Scalar(0.0), BasePoint::Scalar(2.0)];
        assert!(matches!(
            pullback(&fam, new_base, &phi),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn base_point_kind_mismatch_in_pullback() {
        let fam = quadratic_family(0.0, 1.0, 5);
        let new_base = BaseGrid::Interval(IntervalGrid::new(0.0, 1.0, 2).unwrap());
        let phi = [BasePoint::Planar([0.0, 0.0]), BasePoint::Scalar(0.5)];
        assert!(pullback(&fam, new_base, &phi).is_err());
    }
}
