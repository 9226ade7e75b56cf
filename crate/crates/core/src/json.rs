//! On-disk document formats. Every format is a small JSON object with
//! explicit shape; parsers reject anything that does not match exactly.
//! Numbers are written with 17 significant digits so that write → read →
//! write is byte-identical and read → write preserves every bit.

use std::io;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use crate::algebra::StructureConstants;
use crate::cohomology::{BilinearMapTensor, EndomorphismMatrix};
use crate::connection::{PathConnection, TransportMap};
use crate::error::{Error, Result};
use crate::family::{AlgebraFamily, BaseGrid, BasePoint, Interpolation, Section};
use crate::tensor::Tensor3;

/// serde_json formatter printing every float as d.dddddddddddddddde±x
/// (17 significant digits), enough to reproduce any f64 exactly.
struct SigDigits17;

impl Formatter for SigDigits17 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{:.16e}", value)
    }
}

/// Serialize any report or document with the 17-digit float convention.
pub fn to_json_17<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigDigits17);
    value
        .serialize(&mut ser)
        .expect("document serialization is infallible");
    String::from_utf8(out).expect("serializer emits UTF-8")
}

/// The same float convention for CSV cells.
pub fn format_f64(value: f64) -> String {
    format!("{:.16e}", value)
}

fn parse<'a, T: Deserialize<'a>>(text: &'a str, what: &str) -> Result<T> {
    serde_json::from_str(text)
        .map_err(|e| Error::input(format!("invalid {} document: {}", what, e)))
}

/// Nested-array form of a 3-tensor, for embedding in composite reports.
pub fn nested_tensor(t: &Tensor3) -> Vec<Vec<Vec<f64>>> {
    nested3(t)
}

/// Nested-array (row-major) form of a matrix, for composite reports.
pub fn nested_matrix(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    nested2(m)
}

fn nested3(t: &Tensor3) -> Vec<Vec<Vec<f64>>> {
    let n = t.n();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| t.get(i, j, k)).collect())
                .collect()
        })
        .collect()
}

fn tensor3_from_nested(n: usize, nested: &[Vec<Vec<f64>>], what: &str) -> Result<Tensor3> {
    if nested.len() != n {
        return Err(Error::input(format!(
            "{}: expected {} outer entries, found {}",
            what,
            n,
            nested.len()
        )));
    }
    let mut flat = Vec::with_capacity(n * n * n);
    for (i, plane) in nested.iter().enumerate() {
        if plane.len() != n {
            return Err(Error::input(format!(
                "{}: entry [{}] has {} rows, expected {}",
                what,
                i,
                plane.len(),
                n
            )));
        }
        for (j, row) in plane.iter().enumerate() {
            if row.len() != n {
                return Err(Error::input(format!(
                    "{}: entry [{}][{}] has length {}, expected {}",
                    what,
                    i,
                    j,
                    row.len(),
                    n
                )));
            }
            flat.extend_from_slice(row);
        }
    }
    Tensor3::from_vec(n, flat)
}

fn nested2(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
        .collect()
}

fn matrix_from_nested(n: usize, nested: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>> {
    if nested.len() != n {
        return Err(Error::input(format!(
            "{}: expected {} rows, found {}",
            what,
            n,
            nested.len()
        )));
    }
    for (r, row) in nested.iter().enumerate() {
        if row.len() != n {
            return Err(Error::input(format!(
                "{}: row {} has length {}, expected {}",
                what,
                r,
                row.len(),
                n
            )));
        }
    }
    Ok(DMatrix::from_fn(n, n, |r, c| nested[r][c]))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraDoc {
    n: usize,
    alpha: Vec<Vec<Vec<f64>>>,
}

pub fn write_algebra(a: &StructureConstants) -> String {
    to_json_17(&AlgebraDoc {
        n: a.n(),
        alpha: nested3(a.tensor()),
    })
}

pub fn read_algebra(text: &str) -> Result<StructureConstants> {
    let doc: AlgebraDoc = parse(text, "algebra")?;
    let tensor = tensor3_from_nested(doc.n, &doc.alpha, "algebra alpha")?;
    StructureConstants::from_tensor(tensor)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CochainDoc {
    n: usize,
    f: Vec<Vec<Vec<f64>>>,
}

pub fn write_cochain(f: &BilinearMapTensor) -> String {
    to_json_17(&CochainDoc {
        n: f.n(),
        f: nested3(f.tensor()),
    })
}

pub fn read_cochain(text: &str) -> Result<BilinearMapTensor> {
    let doc: CochainDoc = parse(text, "cochain")?;
    let tensor = tensor3_from_nested(doc.n, &doc.f, "cochain f")?;
    BilinearMapTensor::from_tensor(tensor)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EndomorphismDoc {
    n: usize,
    gamma: Vec<Vec<f64>>,
}

pub fn write_endomorphism(gamma: &EndomorphismMatrix) -> String {
    to_json_17(&EndomorphismDoc {
        n: gamma.nrows(),
        gamma: nested2(gamma),
    })
}

pub fn read_endomorphism(text: &str) -> Result<EndomorphismMatrix> {
    let doc: EndomorphismDoc = parse(text, "endomorphism")?;
    if doc.n == 0 {
        return Err(Error::input("endomorphism dimension must be at least 1"));
    }
    matrix_from_nested(doc.n, &doc.gamma, "endomorphism gamma")
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyDoc {
    n: usize,
    base: BaseGrid,
    interpolation: Interpolation,
    gamma: Vec<Vec<Vec<Vec<f64>>>>,
}

pub fn write_family(f: &AlgebraFamily) -> String {
    to_json_17(&FamilyDoc {
        n: f.n(),
        base: *f.base(),
        interpolation: f.interpolation(),
        gamma: f
            .node_algebras()
            .iter()
            .map(|g| nested3(g.tensor()))
            .collect(),
    })
}

pub fn read_family(text: &str) -> Result<AlgebraFamily> {
    let doc: FamilyDoc = parse(text, "family")?;
    doc.base.validate()?;
    if doc.gamma.len() != doc.base.node_count() {
        return Err(Error::input(format!(
            "family gamma has {} nodes, base expects {}",
            doc.gamma.len(),
            doc.base.node_count()
        )));
    }
    let gamma = doc
        .gamma
        .iter()
        .enumerate()
        .map(|(idx, nested)| {
            let tensor = tensor3_from_nested(doc.n, nested, &format!("family gamma[{}]", idx))?;
            StructureConstants::from_tensor(tensor)
        })
        .collect::<Result<Vec<_>>>()?;
    AlgebraFamily::new(doc.base, doc.interpolation, gamma)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PathConnectionDoc {
    base: BaseGrid,
    gamma_samples: Vec<Vec<Vec<f64>>>,
    residuals: Vec<f64>,
}

pub fn write_connection(c: &PathConnection) -> String {
    to_json_17(&PathConnectionDoc {
        base: BaseGrid::Interval(c.base),
        gamma_samples: c.samples.iter().map(nested2).collect(),
        residuals: c.residuals.clone(),
    })
}

pub fn read_connection(text: &str) -> Result<PathConnection> {
    let doc: PathConnectionDoc = parse(text, "connection")?;
    let BaseGrid::Interval(grid) = doc.base else {
        return Err(Error::input(format!(
            "connection base must be an interval, got kind '{}'",
            doc.base.kind_name()
        )));
    };
    grid.validate()?;
    if doc.gamma_samples.is_empty() {
        return Err(Error::input("connection needs at least one sample"));
    }
    let n = doc.gamma_samples[0].len();
    if n == 0 {
        return Err(Error::input("connection samples must be nonempty matrices"));
    }
    let samples = doc
        .gamma_samples
        .iter()
        .enumerate()
        .map(|(idx, nested)| matrix_from_nested(n, nested, &format!("gamma_samples[{}]", idx)))
        .collect::<Result<Vec<_>>>()?;
    PathConnection::new(grid, samples, doc.residuals)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransportDoc {
    t0: f64,
    t1: f64,
    phi: Vec<Vec<f64>>,
    steps: usize,
}

pub fn write_transport(map: &TransportMap) -> String {
    to_json_17(&TransportDoc {
        t0: map.source_t,
        t1: map.target_t,
        phi: nested2(&map.phi),
        steps: map.steps,
    })
}

pub fn read_transport(text: &str) -> Result<TransportMap> {
    let doc: TransportDoc = parse(text, "transport")?;
    if doc.phi.is_empty() {
        return Err(Error::input("transport phi must be a nonempty matrix"));
    }
    let phi = matrix_from_nested(doc.phi.len(), &doc.phi, "transport phi")?;
    Ok(TransportMap {
        source_t: doc.t0,
        target_t: doc.t1,
        phi,
        steps: doc.steps,
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SectionDoc {
    n: usize,
    values: Vec<Vec<f64>>,
}

pub fn write_section(s: &Section) -> String {
    let n = s.values.first().map_or(0, |v| v.len());
    to_json_17(&SectionDoc {
        n,
        values: s
            .values
            .iter()
            .map(|v| v.iter().cloned().collect())
            .collect(),
    })
}

pub fn read_section(text: &str) -> Result<Section> {
    let doc: SectionDoc = parse(text, "section")?;
    if doc.n == 0 {
        return Err(Error::input("section dimension must be at least 1"));
    }
    let values = doc
        .values
        .iter()
        .enumerate()
        .map(|(idx, v)| {
            if v.len() != doc.n {
                return Err(Error::input(format!(
                    "section value {} has length {}, expected {}",
                    idx,
                    v.len(),
                    doc.n
                )));
            }
            Ok(DVector::from_column_slice(v))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Section { values })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PullbackMapDoc {
    base: BaseGrid,
    phi: Vec<BasePoint>,
}

pub fn write_pullback_map(base: &BaseGrid, phi: &[BasePoint]) -> String {
    to_json_17(&PullbackMapDoc {
        base: *base,
        phi: phi.to_vec(),
    })
}

pub fn read_pullback_map(text: &str) -> Result<(BaseGrid, Vec<BasePoint>)> {
    let doc: PullbackMapDoc = parse(text, "pullback map")?;
    doc.base.validate()?;
    if doc.phi.len() != doc.base.node_count() {
        return Err(Error::input(format!(
            "pullback map has {} image points, base expects {}",
            doc.phi.len(),
            doc.base.node_count()
        )));
    }
    Ok((doc.base, doc.phi))
}
