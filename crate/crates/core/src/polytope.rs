//! Polytopes in canonical embedding: origin in the interior, facet normals
//! homogenized as `[-1, h]`, vertices as `[1, x]`, so that `h_i . v_j <= 0`
//! with equality exactly on incidences.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::enumeration::{self, EnumerationError};
use crate::incidence::IncidenceMatrix;
use crate::linalg::{self, dot, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolytopeError {
    #[error("row {index} has {found} entries, expected {expected}")]
    Shape {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("facet normal {index} must start with -1, found {found}")]
    NotCanonicalNormal { index: usize, found: Rational },
    #[error("vertex {index} must start with 1, found {found}")]
    NotHomogenizedVertex { index: usize, found: Rational },
    #[error("dimension mismatch: H has d = {h}, V has d = {v}")]
    DimensionMismatch { h: usize, v: usize },
    #[error("vertex {vertex} violates facet {facet} (inner product {value})")]
    PositiveProduct {
        facet: usize,
        vertex: usize,
        value: Rational,
    },
    #[error("origin is not interior (inequality {row}); translate by ({})", join(.suggested_translation))]
    OriginNotInterior {
        row: usize,
        suggested_translation: Vec<Rational>,
    },
    #[error("{0}")]
    Enumeration(#[from] EnumerationError),
    #[error("{count} labels given for {expected} {kind}")]
    LabelCount {
        kind: &'static str,
        count: usize,
        expected: usize,
    },
    #[error("invalid polytope: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("facet index {0} out of range")]
    FacetOutOfRange(usize),
    #[error("vertex index {0} out of range")]
    VertexOutOfRange(usize),
}

pub(crate) fn join(v: &[Rational]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// Facet normals `[-1, h_i]` of a `d`-polytope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HRep {
    dim: usize,
    normals: Vec<Vec<Rational>>,
}

impl HRep {
    /// Strict constructor: every row has `d + 1` entries and starts with `-1`.
    pub fn new(dim: usize, normals: Vec<Vec<Rational>>) -> Result<Self, PolytopeError> {
        for (index, row) in normals.iter().enumerate() {
            check_len(index, dim + 1, row)?;
            if row[0] != -Rational::one() {
                return Err(PolytopeError::NotCanonicalNormal {
                    index,
                    found: row[0].clone(),
                });
            }
        }
        Ok(Self { dim, normals })
    }

    /// Canonicalizes inequalities `r . [1; x] <= 0` by scaling each row so its
    /// first entry is `-1`. That needs `r_0 < 0`, i.e. the origin strictly inside
    /// every halfspace; otherwise the error carries the vertex barycenter as a
    /// translation that would fix it.
    pub fn from_inequalities(dim: usize, rows: Vec<Vec<Rational>>) -> Result<Self, PolytopeError> {
        let mut normals = Vec::with_capacity(rows.len());
        for (index, row) in rows.iter().enumerate() {
            check_len(index, dim + 1, row)?;
            if !row[0].is_negative() {
                let verts = enumeration::enumerate_vertices(dim, &rows)?;
                let center = barycenter(dim, &verts);
                return Err(PolytopeError::OriginNotInterior {
                    row: index,
                    suggested_translation: center,
                });
            }
            let scale = -row[0].recip();
            normals.push(row.iter().map(|x| x * &scale).collect());
        }
        Self::new(dim, normals)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }

    pub fn normals(&self) -> &[Vec<Rational>] {
        &self.normals
    }

    pub fn normal(&self, i: usize) -> &[Rational] {
        &self.normals[i]
    }

    pub fn into_normals(self) -> Vec<Vec<Rational>> {
        self.normals
    }
}

/// Vertices `[1, x_j]` of a `d`-polytope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VRep {
    dim: usize,
    verts: Vec<Vec<Rational>>,
}

impl VRep {
    /// Strict constructor: every column has `d + 1` entries and starts with `1`.
    pub fn new(dim: usize, verts: Vec<Vec<Rational>>) -> Result<Self, PolytopeError> {
        for (index, v) in verts.iter().enumerate() {
            check_len(index, dim + 1, v)?;
            if !v[0].is_one() {
                return Err(PolytopeError::NotHomogenizedVertex {
                    index,
                    found: v[0].clone(),
                });
            }
        }
        Ok(Self { dim, verts })
    }

    /// Homogenizes plain coordinates.
    pub fn from_points(dim: usize, points: Vec<Vec<Rational>>) -> Result<Self, PolytopeError> {
        let verts = points
            .into_iter()
            .map(|p| {
                let mut v = Vec::with_capacity(p.len() + 1);
                v.push(Rational::one());
                v.extend(p);
                v
            })
            .collect();
        Self::new(dim, verts)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    pub fn verts(&self) -> &[Vec<Rational>] {
        &self.verts
    }

    pub fn vert(&self, j: usize) -> &[Rational] {
        &self.verts[j]
    }

    pub fn into_verts(self) -> Vec<Vec<Rational>> {
        self.verts
    }
}

fn check_len(index: usize, expected: usize, row: &[Rational]) -> Result<(), PolytopeError> {
    if row.len() != expected {
        return Err(PolytopeError::Shape {
            index,
            expected,
            found: row.len(),
        });
    }
    Ok(())
}

fn barycenter(dim: usize, verts: &[Vec<Rational>]) -> Vec<Rational> {
    let mut c = vec![Rational::zero(); dim];
    if verts.is_empty() {
        return c;
    }
    for v in verts {
        for (acc, x) in c.iter_mut().zip(&v[1..]) {
            *acc += x;
        }
    }
    let count = linalg::int(verts.len() as i64);
    c.iter_mut().for_each(|x| *x /= &count);
    c
}

/// Exact incidence of an H/V pair. Any strictly positive inner product means a
/// vertex outside a halfspace, and the pair is rejected.
pub fn incidence(h: &HRep, v: &VRep) -> Result<IncidenceMatrix, PolytopeError> {
    if h.dim != v.dim {
        return Err(PolytopeError::DimensionMismatch { h: h.dim, v: v.dim });
    }
    let mut products = Vec::with_capacity(h.len() * v.len());
    for (facet, row) in h.normals.iter().enumerate() {
        for (vertex, col) in v.verts.iter().enumerate() {
            let value = dot(row, col);
            if value.is_positive() {
                return Err(PolytopeError::PositiveProduct {
                    facet,
                    vertex,
                    value,
                });
            }
            products.push(value.is_zero());
        }
    }
    let m = v.len();
    Ok(IncidenceMatrix::from_fn(h.len(), m, |i, j| products[i * m + j]))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    RedundantFacet { facet: usize, duplicate_of: Option<usize> },
    RedundantVertex { vertex: usize, duplicate_of: Option<usize> },
    NotFullDimensional { affine_dim: isize, dim: usize },
    DuplicateLabel { label: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RedundantFacet {
                facet,
                duplicate_of: Some(of),
            } => write!(f, "redundant facet {facet} (duplicate of {of})"),
            Violation::RedundantFacet { facet, .. } => {
                write!(f, "redundant facet {facet} (does not define a facet)")
            }
            Violation::RedundantVertex {
                vertex,
                duplicate_of: Some(of),
            } => write!(f, "redundant vertex {vertex} (duplicate of {of})"),
            Violation::RedundantVertex { vertex, .. } => {
                write!(f, "redundant vertex {vertex} (not a vertex)")
            }
            Violation::NotFullDimensional { affine_dim, dim } => {
                write!(f, "not full-dimensional (affine dimension {affine_dim} < {dim})")
            }
            Violation::DuplicateLabel { label } => write!(f, "duplicate label {label:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    /// Holds by construction of the canonical form: `h_i . [1; 0] = -1`.
    pub origin_interior: bool,
    pub full_dimensional: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Paired H/V representation with its incidence matrix and stable labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polytope {
    h: HRep,
    v: VRep,
    incidence: IncidenceMatrix,
    facet_labels: Vec<String>,
    vertex_labels: Vec<String>,
}

impl Polytope {
    /// Builds and validates; any violation is an error.
    pub fn new(h: HRep, v: VRep) -> Result<Self, PolytopeError> {
        let p = Self::assemble(h, v)?;
        let report = p.validate();
        if !report.is_valid() {
            return Err(PolytopeError::Invalid(report.violations));
        }
        Ok(p)
    }

    /// Pairs the representations and computes incidence without the
    /// minimality and dimension checks of [`Polytope::validate`].
    pub fn assemble(h: HRep, v: VRep) -> Result<Self, PolytopeError> {
        let incidence = incidence(&h, &v)?;
        let facet_labels = (0..h.len()).map(|i| format!("f{i}")).collect();
        let vertex_labels = (0..v.len()).map(|j| format!("v{j}")).collect();
        Ok(Self {
            h,
            v,
            incidence,
            facet_labels,
            vertex_labels,
        })
    }

    /// Completes an irredundant H-representation with its vertices.
    pub fn from_h(h: HRep) -> Result<Self, PolytopeError> {
        let v = enumeration::vertices_from_h(&h)?;
        Self::new(h, v)
    }

    /// Completes a point set with its facets. Points that are not vertices of
    /// the hull are dropped; the remaining ones keep their input order.
    pub fn from_v(v: VRep) -> Result<Self, PolytopeError> {
        Ok(Self::from_v_keep(v)?.0)
    }

    /// Like [`Polytope::from_v`], also returning the input positions that were kept.
    pub fn from_v_keep(v: VRep) -> Result<(Self, Vec<usize>), PolytopeError> {
        let h = enumeration::facets_from_v(&v)?;
        let dim = v.dim;
        let mut seen = BTreeSet::new();
        let mut keep = Vec::new();
        for (j, col) in v.verts.iter().enumerate() {
            if !seen.insert(col.clone()) {
                continue;
            }
            let active: Vec<Vec<Rational>> = h
                .normals
                .iter()
                .filter(|row| dot(row, col).is_zero())
                .cloned()
                .collect();
            let rank = linalg::RatMatrix::from_rows(&active, dim + 1)
                .map(|m| m.rank())
                .unwrap_or(0);
            if rank == dim {
                keep.push(j);
            }
        }
        let verts = keep.iter().map(|&j| v.verts[j].clone()).collect();
        let p = Self::new(h, VRep::new(dim, verts)?)?;
        Ok((p, keep))
    }

    pub fn with_labels(
        mut self,
        facet_labels: Option<Vec<String>>,
        vertex_labels: Option<Vec<String>>,
    ) -> Result<Self, PolytopeError> {
        if let Some(labels) = facet_labels {
            if labels.len() != self.h.len() {
                return Err(PolytopeError::LabelCount {
                    kind: "facets",
                    count: labels.len(),
                    expected: self.h.len(),
                });
            }
            self.facet_labels = labels;
        }
        if let Some(labels) = vertex_labels {
            if labels.len() != self.v.len() {
                return Err(PolytopeError::LabelCount {
                    kind: "vertices",
                    count: labels.len(),
                    expected: self.v.len(),
                });
            }
            self.vertex_labels = labels;
        }
        let dups = duplicate_labels(&self.facet_labels)
            .into_iter()
            .chain(duplicate_labels(&self.vertex_labels))
            .map(|label| Violation::DuplicateLabel { label })
            .collect::<Vec<_>>();
        if !dups.is_empty() {
            return Err(PolytopeError::Invalid(dups));
        }
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.h.dim
    }

    pub fn facet_count(&self) -> usize {
        self.h.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.v.len()
    }

    pub fn h(&self) -> &HRep {
        &self.h
    }

    pub fn v(&self) -> &VRep {
        &self.v
    }

    pub fn incidence(&self) -> &IncidenceMatrix {
        &self.incidence
    }

    pub fn facet_labels(&self) -> &[String] {
        &self.facet_labels
    }

    pub fn vertex_labels(&self) -> &[String] {
        &self.vertex_labels
    }

    pub fn facet_label(&self, i: usize) -> &str {
        &self.facet_labels[i]
    }

    pub fn vertex_label(&self, j: usize) -> &str {
        &self.vertex_labels[j]
    }

    pub fn facet_by_label(&self, label: &str) -> Option<usize> {
        self.facet_labels.iter().position(|l| l == label)
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<usize> {
        self.vertex_labels.iter().position(|l| l == label)
    }

    /// Last normal coordinate is zero.
    pub fn is_vertical(&self, facet: usize) -> bool {
        self.h.normals[facet].last().is_some_and(|x| x.is_zero())
    }

    /// Number of facets through `vertex`.
    pub fn vertex_degree(&self, vertex: usize) -> usize {
        self.incidence.vertex_facets(vertex).count_ones(..)
    }

    pub fn is_simple_vertex(&self, vertex: usize) -> bool {
        self.vertex_degree(vertex) == self.dim()
    }

    /// `f_0` of a facet: the number of its vertices.
    pub fn facet_vertex_count(&self, facet: usize) -> Result<usize, PolytopeError> {
        if facet >= self.facet_count() {
            return Err(PolytopeError::FacetOutOfRange(facet));
        }
        Ok(self.incidence.facet_vertices(facet).count_ones(..))
    }

    /// Checks minimality of both representations and full dimension. All
    /// problems are collected rather than failing on the first.
    pub fn validate(&self) -> ValidationReport {
        let d = self.dim();
        let mut violations = Vec::new();

        let all: Vec<Vec<Rational>> = self.v.verts.clone();
        let affine_dim = linalg::affine_dim(&all).unwrap_or(-1);
        let full_dimensional = affine_dim == d as isize;
        if !full_dimensional {
            violations.push(Violation::NotFullDimensional { affine_dim, dim: d });
        }

        for (i, row) in self.h.normals.iter().enumerate() {
            if let Some(of) = self.h.normals[..i].iter().position(|r| r == row) {
                violations.push(Violation::RedundantFacet {
                    facet: i,
                    duplicate_of: Some(of),
                });
                continue;
            }
            // A facet's vertices span a (d-1)-flat: rank d when homogenized.
            let on: Vec<Vec<Rational>> = self
                .incidence
                .facet_vertices(i)
                .ones()
                .map(|j| self.v.verts[j].clone())
                .collect();
            if full_dimensional && rank_of(&on, d + 1) != d {
                violations.push(Violation::RedundantFacet {
                    facet: i,
                    duplicate_of: None,
                });
            }
        }

        for (j, col) in self.v.verts.iter().enumerate() {
            if let Some(of) = self.v.verts[..j].iter().position(|c| c == col) {
                violations.push(Violation::RedundantVertex {
                    vertex: j,
                    duplicate_of: Some(of),
                });
                continue;
            }
            let active: Vec<Vec<Rational>> = self
                .incidence
                .vertex_facets(j)
                .ones()
                .map(|i| self.h.normals[i].clone())
                .collect();
            if rank_of(&active, d + 1) != d {
                violations.push(Violation::RedundantVertex {
                    vertex: j,
                    duplicate_of: None,
                });
            }
        }

        for label in duplicate_labels(&self.facet_labels)
            .into_iter()
            .chain(duplicate_labels(&self.vertex_labels))
        {
            violations.push(Violation::DuplicateLabel { label });
        }

        ValidationReport {
            origin_interior: self
                .h
                .normals
                .iter()
                .all(|r| r[0] == -Rational::one()),
            full_dimensional,
            violations,
        }
    }

    /// Polar dual: vertices `x_j` become facet normals `[-1, x_j]`, facet normals
    /// `h_i` become vertices `[1, h_i]`. The incidence matrix is transposed.
    pub fn polar_dual(&self) -> Polytope {
        let swap = |rows: &[Vec<Rational>]| -> Vec<Vec<Rational>> {
            rows.iter()
                .map(|r| {
                    let mut s = r.clone();
                    s[0] = -s[0].clone();
                    s
                })
                .collect()
        };
        Polytope {
            h: HRep {
                dim: self.dim(),
                normals: swap(&self.v.verts),
            },
            v: VRep {
                dim: self.dim(),
                verts: swap(&self.h.normals),
            },
            incidence: self.incidence.transpose(),
            facet_labels: self.vertex_labels.clone(),
            vertex_labels: self.facet_labels.clone(),
        }
    }

    /// Replaces labels, keeping them consistent with any renumbering done by the caller.
    pub(crate) fn set_labels(&mut self, facet_labels: Vec<String>, vertex_labels: Vec<String>) {
        debug_assert_eq!(facet_labels.len(), self.facet_count());
        debug_assert_eq!(vertex_labels.len(), self.vertex_count());
        self.facet_labels = facet_labels;
        self.vertex_labels = vertex_labels;
    }
}

fn rank_of(rows: &[Vec<Rational>], cols: usize) -> usize {
    linalg::RatMatrix::from_rows(rows, cols)
        .map(|m| m.rank())
        .unwrap_or(0)
}

fn duplicate_labels(labels: &[String]) -> Vec<String> {
    let mut seen = BTreeSet::new();
    let mut dups = BTreeSet::new();
    for l in labels {
        if !seen.insert(l) {
            dups.insert(l.clone());
        }
    }
    dups.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::linalg::{int, ints};

    #[test]
    fn cube_incidence_has_three_facets_per_vertex() {
        let cube = fixtures::cube(3);
        for j in 0..cube.vertex_count() {
            assert_eq!(cube.vertex_degree(j), 3);
        }
        for i in 0..cube.facet_count() {
            assert_eq!(cube.facet_vertex_count(i).unwrap(), 4);
        }
    }

    #[test]
    fn simplex_incidence_is_complement_of_identity_pattern() {
        for d in 1..=4 {
            let s = fixtures::simplex(d);
            let m = s.incidence();
            // each facet misses exactly one vertex, each vertex misses exactly one facet
            for i in 0..=d {
                assert_eq!(m.facet_vertices(i).count_ones(..), d);
                assert_eq!(s.facet_vertex_count(i).unwrap(), d);
            }
            for j in 0..=d {
                assert_eq!(m.vertex_facets(j).count_ones(..), d);
            }
        }
    }

    #[test]
    fn outside_point_is_rejected() {
        let cube = fixtures::cube(3);
        let mut verts = cube.v().verts().to_vec();
        // reflect the origin through the facet x_1 = 1
        verts.push(ints(&[1, 2, 0, 0]));
        let v = VRep::new(3, verts).unwrap();
        assert!(matches!(
            incidence(cube.h(), &v),
            Err(PolytopeError::PositiveProduct { vertex: 8, .. })
        ));
    }

    #[test]
    fn valid_cube_has_no_violations() {
        let report = fixtures::cube(3).validate();
        assert!(report.is_valid(), "{report:?}");
        assert!(report.origin_interior && report.full_dimensional);
    }

    #[test]
    fn duplicate_row_is_redundant_facet() {
        let cube = fixtures::cube(3);
        let mut rows = cube.h().normals().to_vec();
        rows.push(rows[2].clone());
        let p = Polytope::assemble(HRep::new(3, rows).unwrap(), cube.v().clone()).unwrap();
        let report = p.validate();
        assert_eq!(
            report.violations,
            vec![Violation::RedundantFacet {
                facet: 6,
                duplicate_of: Some(2)
            }]
        );
        assert!(report.violations[0].to_string().contains("redundant facet"));
    }

    #[test]
    fn flat_vertex_set_is_not_full_dimensional() {
        let cube = fixtures::cube(3);
        let flat: Vec<Vec<Rational>> = cube
            .v()
            .verts()
            .iter()
            .filter(|v| v[3] == int(1))
            .cloned()
            .collect();
        let p = Polytope::assemble(cube.h().clone(), VRep::new(3, flat).unwrap()).unwrap();
        let report = p.validate();
        assert!(!report.full_dimensional);
        assert!(report.violations.contains(&Violation::NotFullDimensional {
            affine_dim: 2,
            dim: 3
        }));
    }

    #[test]
    fn polar_of_cube_is_octahedron() {
        let cube = fixtures::cube(3);
        let oct = cube.polar_dual();
        assert_eq!(oct.facet_count(), 8);
        assert_eq!(oct.vertex_count(), 6);
        assert_eq!(oct.incidence(), &cube.incidence().transpose());
        assert!(oct.validate().is_valid());
        // recomputing incidence from the coordinates agrees with the transpose
        assert_eq!(&incidence(oct.h(), oct.v()).unwrap(), oct.incidence());
        assert_eq!(oct.polar_dual(), cube);
    }

    #[test]
    fn simplex_is_self_dual() {
        for d in 2..=4 {
            let s = fixtures::simplex(d);
            assert!(s.polar_dual().incidence().is_isomorphic(s.incidence()));
        }
    }

    #[test]
    fn pyramid_facet_sizes() {
        let p = fixtures::square_pyramid();
        let base = p.facet_by_label("base").unwrap();
        assert_eq!(p.facet_vertex_count(base).unwrap(), 4);
        for i in (0..p.facet_count()).filter(|&i| i != base) {
            assert_eq!(p.facet_vertex_count(i).unwrap(), 3);
        }
        assert!(matches!(
            p.facet_vertex_count(5),
            Err(PolytopeError::FacetOutOfRange(5))
        ));
    }

    #[test]
    fn inequalities_are_scaled_to_canonical_form() {
        // 2x <= 4, -3x <= 6  in d = 1
        let h = HRep::from_inequalities(1, vec![ints(&[-4, 2]), ints(&[-6, -3])]).unwrap();
        assert_eq!(h.normal(0), &[int(-1), crate::linalg::ratio(1, 2)][..]);
        assert_eq!(h.normal(1), &[int(-1), crate::linalg::ratio(-1, 2)][..]);
    }

    #[test]
    fn origin_outside_suggests_barycenter() {
        // 1 <= x <= 3 written as 1 - x <= 0 and x - 3 <= 0
        let err = HRep::from_inequalities(1, vec![ints(&[1, -1]), ints(&[-3, 1])]).unwrap_err();
        match err {
            PolytopeError::OriginNotInterior {
                row,
                suggested_translation,
                ..
            } => {
                assert_eq!(row, 0);
                assert_eq!(suggested_translation, vec![int(2)]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn from_v_drops_interior_points() {
        let cube = fixtures::cube(3);
        let mut verts = cube.v().verts().to_vec();
        verts.insert(3, ints(&[1, 0, 0, 0]));
        let (p, keep) = Polytope::from_v_keep(VRep::new(3, verts).unwrap()).unwrap();
        assert_eq!(p.vertex_count(), 8);
        assert_eq!(p.facet_count(), 6);
        assert!(!keep.contains(&3));
    }
}
