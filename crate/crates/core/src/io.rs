//! JSON file formats for groups, isometries, polytopes and tilings.
//!
//! Rationals are written as plain integers when integral and as `"p/q"`
//! strings otherwise; both forms are accepted on input.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{validate_group, CrystalGroup, RawGroup};
use crate::isometry::Isometry;
use crate::polytope::ConvexPolytope;
use crate::rational::{format_rational, parse_rational, QMatrix, QVector, Rational};
use crate::tiling::PeriodicTiling;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonRational {
    Int(i64),
    Str(String),
}

impl JsonRational {
    pub fn from_rational(r: &Rational) -> Self {
        if r.is_integer() {
            if let Some(i) = r.to_integer().to_i64() {
                return JsonRational::Int(i);
            }
        }
        JsonRational::Str(format_rational(r))
    }

    pub fn to_rational(&self) -> Result<Rational> {
        match self {
            JsonRational::Int(i) => Ok(Rational::from_integer(BigInt::from(*i))),
            JsonRational::Str(s) => parse_rational(s),
        }
    }
}

pub fn vector_to_json(v: &QVector) -> Vec<JsonRational> {
    v.iter().map(JsonRational::from_rational).collect()
}

pub fn matrix_to_json(m: &QMatrix) -> Vec<Vec<JsonRational>> {
    (0..m.rows()).map(|i| vector_to_json(&m.row(i))).collect()
}

fn vector_from_json(v: &[JsonRational], n: usize, what: &str) -> Result<QVector> {
    if v.len() != n {
        return Err(Error::Parse(format!("{what}: expected {n} entries, found {}", v.len())));
    }
    v.iter()
        .map(JsonRational::to_rational)
        .collect::<Result<Vec<_>>>()
        .map(QVector::new)
        .map_err(|e| Error::Parse(format!("{what}: {e}")))
}

fn matrix_from_json(m: &[Vec<JsonRational>], n: usize, what: &str) -> Result<QMatrix> {
    if m.len() != n {
        return Err(Error::Parse(format!("{what}: expected {n} rows, found {}", m.len())));
    }
    let rows = m
        .iter()
        .enumerate()
        .map(|(i, r)| vector_from_json(r, n, &format!("{what} row {i}")).map(QVector::into_inner))
        .collect::<Result<Vec<_>>>()?;
    Ok(QMatrix::from_rows(rows))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IsometryJson {
    pub linear: Vec<Vec<JsonRational>>,
    pub translation: Vec<JsonRational>,
}

impl IsometryJson {
    pub fn from_isometry(g: &Isometry) -> Self {
        IsometryJson { linear: matrix_to_json(g.linear()), translation: vector_to_json(g.translation()) }
    }

    pub fn to_isometry(&self) -> Result<Isometry> {
        let n = self.translation.len();
        let l = matrix_from_json(&self.linear, n, "linear")?;
        let t = vector_from_json(&self.translation, n, "translation")?;
        Ok(Isometry::from_parts(l, t))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupJson {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub gram: Vec<Vec<JsonRational>>,
    /// Lattice basis columns in host coordinates, for groups computed from tilings.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<Vec<JsonRational>>>,
    pub reps: Vec<IsometryJson>,
}

impl GroupJson {
    pub fn from_group(g: &CrystalGroup) -> Self {
        GroupJson {
            dim: g.dim(),
            name: g.name().map(str::to_owned),
            gram: matrix_to_json(&host_gram(g).unwrap_or_else(|| g.gram().clone())),
            basis: (!g.is_native()).then(|| matrix_to_json(g.basis())),
            reps: g.reps().iter().map(|r| IsometryJson::from_isometry(&r.to_isometry())).collect(),
        }
    }

    pub fn into_group(self) -> Result<CrystalGroup> {
        let n = self.dim;
        let gram = matrix_from_json(&self.gram, n, "gram")?;
        let reps = self
            .reps
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let l = matrix_from_json(&r.linear, n, &format!("reps[{i}].linear"))?;
                let t = vector_from_json(&r.translation, n, &format!("reps[{i}].translation"))?;
                Ok((l, t))
            })
            .collect::<Result<Vec<_>>>()?;
        match self.basis {
            None => validate_group(RawGroup { name: self.name, gram, reps }),
            Some(b) => {
                let basis = matrix_from_json(&b, n, "basis")?;
                if basis.det().is_zero() {
                    return Err(Error::Parse("basis is singular".into()));
                }
                // The gram of a basis-carrying group is the host gram.
                CrystalGroup::with_host_basis(self.name, &gram, basis, reps)
            }
        }
    }
}

pub fn group_to_json(g: &CrystalGroup) -> String {
    serde_json::to_string_pretty(&GroupJson::from_group(g)).expect("serializable")
}

/// Gram of the host frame for basis-carrying groups.
fn host_gram(g: &CrystalGroup) -> Option<QMatrix> {
    if g.is_native() {
        return None;
    }
    let binv = g.basis().inverse()?;
    Some(&(&binv.transpose() * g.gram()) * &binv)
}

pub fn group_from_json(text: &str) -> Result<CrystalGroup> {
    let json: GroupJson = serde_json::from_str(text)?;
    json.into_group()
}

pub fn isometry_from_json(text: &str) -> Result<Isometry> {
    let json: IsometryJson = serde_json::from_str(text)?;
    json.to_isometry()
}

pub fn isometry_to_json(g: &Isometry) -> String {
    serde_json::to_string_pretty(&IsometryJson::from_isometry(g)).expect("serializable")
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolytopeJson {
    pub vertices: Vec<Vec<JsonRational>>,
}

impl PolytopeJson {
    pub fn from_polytope(p: &ConvexPolytope) -> Self {
        PolytopeJson { vertices: p.vertices().iter().map(vector_to_json).collect() }
    }

    pub fn to_polytope(&self, n: usize) -> Result<ConvexPolytope> {
        let pts = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| vector_from_json(v, n, &format!("vertex {i}")))
            .collect::<Result<Vec<_>>>()?;
        ConvexPolytope::from_vertices(pts)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TilingJson {
    pub dim: usize,
    pub gram: Vec<Vec<JsonRational>>,
    /// Period lattice basis columns; the integer lattice when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<Vec<Vec<JsonRational>>>,
    pub cell_tiles: Vec<PolytopeJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<serde_json::Value>,
}

impl TilingJson {
    pub fn from_tiling(t: &PeriodicTiling) -> Self {
        TilingJson {
            dim: t.dim(),
            gram: matrix_to_json(t.frame().gram()),
            lattice: (!t.lattice().is_identity()).then(|| matrix_to_json(t.lattice())),
            cell_tiles: t.cell_tiles().iter().map(PolytopeJson::from_polytope).collect(),
            provenance: t.provenance().cloned(),
        }
    }

    pub fn into_tiling(self) -> Result<PeriodicTiling> {
        let n = self.dim;
        let gram = matrix_from_json(&self.gram, n, "gram")?;
        let lattice = match &self.lattice {
            Some(l) => matrix_from_json(l, n, "lattice")?,
            None => QMatrix::identity(n),
        };
        let tiles = self
            .cell_tiles
            .iter()
            .enumerate()
            .map(|(i, p)| p.to_polytope(n).map_err(|e| Error::Parse(format!("cell_tiles[{i}]: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let frame = crate::isometry::Frame::new(gram)?;
        let mut t = PeriodicTiling::with_lattice(frame, lattice, tiles)?;
        if let Some(p) = self.provenance {
            t.set_provenance(p);
        }
        Ok(t)
    }
}

pub fn tiling_to_json(t: &PeriodicTiling) -> String {
    serde_json::to_string_pretty(&TilingJson::from_tiling(t)).expect("serializable")
}

pub fn tiling_from_json(text: &str) -> Result<PeriodicTiling> {
    let json: TilingJson = serde_json::from_str(text)?;
    json.into_tiling()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::preset;
    use crate::rational::qf;

    #[test]
    fn rational_forms() {
        assert_eq!(JsonRational::from_rational(&qf(4, 2)), JsonRational::Int(2));
        assert_eq!(JsonRational::from_rational(&qf(-1, 2)), JsonRational::Str("-1/2".into()));
        assert!(JsonRational::Str("0.5".into()).to_rational().is_err());
    }

    #[test]
    fn group_round_trip() {
        let g = preset("p6m").unwrap();
        let back = group_from_json(&group_to_json(&g)).unwrap();
        assert!(g.same_group(&back));
        assert_eq!(back.name(), Some("p6m"));
    }

    #[test]
    fn shear_file_rejected() {
        let text = r#"{"dim": 2, "gram": [[1, 0], [0, 1]], "reps": [
            {"linear": [[1, 0], [0, 1]], "translation": [0, 0]},
            {"linear": [[1, 1], [0, 1]], "translation": [0, 0]}]}"#;
        assert!(matches!(group_from_json(text), Err(Error::InvalidGroup(_))));
    }
}
