//! Conversion between H- and V-representations by the incremental double
//! description method, in exact integer arithmetic.
//!
//! A bounded polytope `{x : r_i . [1; x] <= 0}` is the `t = 1` slice of the
//! pointed cone `{z : r_i . z <= 0, -t <= 0}`; its vertices are the extreme
//! rays with `t > 0`. Rays are kept as primitive integer vectors, and ray pairs
//! are combined only when they pass the combinatorial adjacency test, so the
//! generator set stays minimal at every stage even on highly degenerate input.

use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::linalg::{self, int_dot, make_primitive, primitive_integer, Rational};
use crate::polytope::{HRep, VRep};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerationError {
    #[error("unbounded: the inequalities admit a recession direction")]
    Unbounded,
    #[error("infeasible: the inequalities have no solution")]
    Infeasible,
    #[error("degenerate: the solution set has affine dimension {affine_dim} < {dim}")]
    Degenerate { affine_dim: isize, dim: usize },
    #[error("not full-dimensional: the points span affine dimension {affine_dim} < {dim}")]
    NotFullDimensional { affine_dim: isize, dim: usize },
    #[error("origin is not interior to the hull; translate by ({})", crate::polytope::join(.suggested_translation))]
    OriginNotInterior { suggested_translation: Vec<Rational> },
    #[error("row {index} has {found} entries, expected {expected}")]
    Shape {
        index: usize,
        expected: usize,
        found: usize,
    },
}

#[derive(Debug, Clone)]
struct Ray {
    coords: Vec<BigInt>,
    /// Processed constraints that are tight on this ray.
    zero: FixedBitSet,
}

/// State of the double description iteration: the constraints seen so far and
/// the extreme rays of the cone they cut out.
#[derive(Debug, Clone)]
pub struct DoubleDescription {
    rows: Vec<Vec<BigInt>>,
    processed: FixedBitSet,
    rays: Vec<Ray>,
    cone_dim: usize,
}

impl DoubleDescription {
    /// Starts from a simplicial cone on `cone_dim` linearly independent rows.
    /// Returns `None` when the rows have a nontrivial common kernel, i.e. the
    /// cone contains a line.
    fn new(rows: Vec<Vec<BigInt>>, cone_dim: usize) -> Option<Self> {
        let mut basis: Vec<usize> = Vec::with_capacity(cone_dim);
        for (i, _) in rows.iter().enumerate() {
            if basis.len() == cone_dim {
                break;
            }
            let mut trial: Vec<Vec<BigInt>> = basis.iter().map(|&b| rows[b].clone()).collect();
            trial.push(rows[i].clone());
            if linalg::integer_rank(trial, cone_dim) == basis.len() + 1 {
                basis.push(i);
            }
        }
        if basis.len() < cone_dim {
            return None;
        }
        let to_rat = |v: &[BigInt]| -> Vec<Rational> {
            v.iter().map(|x| Rational::from_integer(x.clone())).collect()
        };
        let b = linalg::RatMatrix::from_rows(
            &basis.iter().map(|&i| to_rat(&rows[i])).collect::<Vec<_>>(),
            cone_dim,
        )
        .expect("square basis");
        let mut processed = FixedBitSet::with_capacity(rows.len());
        for &i in &basis {
            processed.insert(i);
        }
        // Ray k solves B r = -e_k: tight on every basis row except row k.
        let rays = (0..cone_dim)
            .map(|k| {
                let mut rhs = vec![Rational::zero(); cone_dim];
                rhs[k] = -Rational::from_integer(BigInt::from(1));
                let sol = b.solve(&rhs).expect("nonsingular basis");
                let mut zero = FixedBitSet::with_capacity(rows.len());
                for (pos, &i) in basis.iter().enumerate() {
                    if pos != k {
                        zero.insert(i);
                    }
                }
                Ray {
                    coords: primitive_integer(&sol),
                    zero,
                }
            })
            .collect();
        Some(Self {
            rows,
            processed,
            rays,
            cone_dim,
        })
    }

    /// Picks the unprocessed constraint that cuts off the fewest current rays.
    fn next_row(&self) -> Option<(usize, Vec<BigInt>)> {
        let mut best: Option<(usize, usize, Vec<BigInt>)> = None;
        for i in 0..self.rows.len() {
            if self.processed.contains(i) {
                continue;
            }
            let values: Vec<BigInt> = self
                .rays
                .iter()
                .map(|r| int_dot(&self.rows[i], &r.coords))
                .collect();
            let cut = values.iter().filter(|v| v.is_positive()).count();
            if best.as_ref().is_none_or(|(_, c, _)| cut < *c) {
                best = Some((i, cut, values));
            }
        }
        best.map(|(i, _, values)| (i, values))
    }

    fn run(&mut self) {
        while let Some((row, values)) = self.next_row() {
            self.add_row(row, &values);
        }
    }

    fn add_row(&mut self, row: usize, values: &[BigInt]) {
        let mut kept = Vec::new();
        let mut positive = Vec::new();
        let mut negative = Vec::new();
        for (idx, v) in values.iter().enumerate() {
            if v.is_positive() {
                positive.push(idx);
            } else if v.is_negative() {
                negative.push(idx);
            } else {
                kept.push(idx);
            }
        }
        let mut created = Vec::new();
        for &p in &negative {
            for &q in &positive {
                if !self.adjacent(p, q) {
                    continue;
                }
                // values[q] > 0 and -values[p] > 0: a positive combination, tight on `row`.
                let coords: Vec<BigInt> = self.rays[p]
                    .coords
                    .iter()
                    .zip(&self.rays[q].coords)
                    .map(|(a, b)| &values[q] * a - &values[p] * b)
                    .collect();
                let mut zero = self.rays[p].zero.clone();
                zero.intersect_with(&self.rays[q].zero);
                zero.insert(row);
                created.push(Ray {
                    coords: make_primitive(coords),
                    zero,
                });
            }
        }
        let mut next: Vec<Ray> = Vec::with_capacity(kept.len() + negative.len() + created.len());
        for idx in kept {
            let mut r = self.rays[idx].clone();
            r.zero.insert(row);
            next.push(r);
        }
        next.extend(negative.into_iter().map(|idx| self.rays[idx].clone()));
        next.extend(created);
        self.rays = next;
        self.processed.insert(row);
    }

    /// Two extreme rays are adjacent iff no third ray is tight on every
    /// constraint the pair shares, and they share at least `cone_dim - 2`.
    fn adjacent(&self, a: usize, b: usize) -> bool {
        let mut common = self.rays[a].zero.clone();
        common.intersect_with(&self.rays[b].zero);
        if common.count_ones(..) + 2 < self.cone_dim {
            return false;
        }
        !self
            .rays
            .iter()
            .enumerate()
            .any(|(k, r)| k != a && k != b && common.is_subset(&r.zero))
    }

    fn into_rays(self) -> Vec<Vec<BigInt>> {
        self.rays.into_iter().map(|r| r.coords).collect()
    }
}

/// Vertices of `{x : r . [1; x] <= 0 for all rows r}`, for arbitrary homogenized
/// rows (canonical or not), sorted lexicographically.
pub(crate) fn enumerate_vertices(
    dim: usize,
    rows: &[Vec<Rational>],
) -> Result<Vec<Vec<Rational>>, EnumerationError> {
    let cone_dim = dim + 1;
    let mut int_rows = Vec::with_capacity(rows.len() + 1);
    for (index, r) in rows.iter().enumerate() {
        if r.len() != cone_dim {
            return Err(EnumerationError::Shape {
                index,
                expected: cone_dim,
                found: r.len(),
            });
        }
        int_rows.push(primitive_integer(r));
    }
    // homogenizing constraint -t <= 0
    let mut t_row = vec![BigInt::zero(); cone_dim];
    t_row[0] = BigInt::from(-1);
    int_rows.push(t_row);

    let Some(mut dd) = DoubleDescription::new(int_rows, cone_dim) else {
        // A line in the cone: with t = 0 on it, a two-sided recession direction.
        return Err(EnumerationError::Unbounded);
    };
    dd.run();
    let rays = dd.into_rays();
    if rays.iter().any(|r| r[0].is_zero()) {
        return Err(EnumerationError::Unbounded);
    }
    if rays.is_empty() {
        return Err(EnumerationError::Infeasible);
    }
    let verts: BTreeSet<Vec<Rational>> = rays
        .into_iter()
        .map(|r| {
            let t = r[0].clone();
            r.into_iter()
                .map(|x| Rational::new(x, t.clone()))
                .collect()
        })
        .collect();
    Ok(verts.into_iter().collect())
}

/// Complete, irredundant vertex set of a canonical H-representation, in
/// lexicographic order of coordinates.
pub fn vertices_from_h(h: &HRep) -> Result<VRep, EnumerationError> {
    let verts = enumerate_vertices(h.dim(), h.normals())?;
    let affine_dim = linalg::affine_dim(&verts).unwrap_or(-1);
    if affine_dim < h.dim() as isize {
        return Err(EnumerationError::Degenerate {
            affine_dim,
            dim: h.dim(),
        });
    }
    Ok(VRep::new(h.dim(), verts).expect("homogenized by construction"))
}

/// Irredundant facets of the hull of `v`, computed as the vertices of the polar.
/// Rows are sorted lexicographically.
pub fn facets_from_v(v: &VRep) -> Result<HRep, EnumerationError> {
    let dim = v.dim();
    let affine_dim = linalg::affine_dim(v.verts()).unwrap_or(-1);
    if affine_dim < dim as isize {
        return Err(EnumerationError::NotFullDimensional { affine_dim, dim });
    }
    let polar_rows: Vec<Vec<Rational>> = v
        .verts()
        .iter()
        .map(|x| {
            let mut r = x.clone();
            r[0] = -r[0].clone();
            r
        })
        .collect();
    let polar = match enumerate_vertices(dim, &polar_rows) {
        Ok(p) => p,
        Err(EnumerationError::Unbounded) => {
            return Err(EnumerationError::OriginNotInterior {
                suggested_translation: point_barycenter(v),
            })
        }
        Err(e) => return Err(e),
    };
    let normals = polar
        .into_iter()
        .map(|mut r| {
            r[0] = -r[0].clone();
            r
        })
        .collect();
    Ok(HRep::new(dim, normals).expect("canonical by construction"))
}

fn point_barycenter(v: &VRep) -> Vec<Rational> {
    let count = linalg::int(v.len() as i64);
    (1..=v.dim())
        .map(|k| v.verts().iter().map(|x| x[k].clone()).sum::<Rational>() / &count)
        .collect()
}

/// Drops duplicate rows and rows whose hyperplane meets the polytope in less
/// than a facet. Row order of the survivors is preserved.
pub fn remove_redundant(h: &HRep) -> Result<HRep, EnumerationError> {
    let d = h.dim();
    let verts = vertices_from_h(h)?;
    let mut seen = BTreeSet::new();
    let mut keep = Vec::new();
    for row in h.normals() {
        if !seen.insert(row.clone()) {
            continue;
        }
        let on: Vec<Vec<Rational>> = verts
            .verts()
            .iter()
            .filter(|x| linalg::dot(row, x).is_zero())
            .cloned()
            .collect();
        let rank = linalg::RatMatrix::from_rows(&on, d + 1)
            .map(|m| m.rank())
            .unwrap_or(0);
        if rank == d {
            keep.push(row.clone());
        }
    }
    Ok(HRep::new(d, keep).expect("rows were canonical"))
}
