//! Facet-vertex incidence matrices and their combinatorial comparison.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;

/// `n x m` 0/1 matrix; bit `(i, j)` is set iff facet `i` contains vertex `j`.
///
/// Stored twice, by rows and by columns, since the graph and path code reads
/// vertex facet sets while redundancy checks read facet vertex sets.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IncidenceMatrix {
    rows: Vec<FixedBitSet>,
    cols: Vec<FixedBitSet>,
}

impl IncidenceMatrix {
    pub fn from_fn(n: usize, m: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut rows = vec![FixedBitSet::with_capacity(m); n];
        let mut cols = vec![FixedBitSet::with_capacity(n); m];
        for i in 0..n {
            for j in 0..m {
                if f(i, j) {
                    rows[i].insert(j);
                    cols[j].insert(i);
                }
            }
        }
        Self { rows, cols }
    }

    pub fn facet_count(&self) -> usize {
        self.rows.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.cols.len()
    }

    pub fn get(&self, facet: usize, vertex: usize) -> bool {
        self.rows[facet].contains(vertex)
    }

    /// Vertices lying on `facet`.
    pub fn facet_vertices(&self, facet: usize) -> &FixedBitSet {
        &self.rows[facet]
    }

    /// Facets containing `vertex`.
    pub fn vertex_facets(&self, vertex: usize) -> &FixedBitSet {
        &self.cols[vertex]
    }

    pub fn transpose(&self) -> Self {
        Self {
            rows: self.cols.clone(),
            cols: self.rows.clone(),
        }
    }

    /// Keeps the listed vertex columns, in the given order.
    pub fn select_vertices(&self, keep: &[usize]) -> Self {
        Self::from_fn(self.facet_count(), keep.len(), |i, j| self.get(i, keep[j]))
    }

    /// Sorted column patterns. Equal signatures mean equal matrices up to a
    /// permutation of vertices, with facets held in place.
    pub fn column_signature(&self) -> Vec<Vec<usize>> {
        let mut sig: Vec<Vec<usize>> = self.cols.iter().map(|c| c.ones().collect()).collect();
        sig.sort();
        sig
    }

    /// Whether the two matrices agree after some permutation of rows and of columns.
    pub fn is_isomorphic(&self, other: &Self) -> bool {
        if self.facet_count() != other.facet_count() || self.vertex_count() != other.vertex_count()
        {
            return false;
        }
        // Backtrack over the shorter side.
        if self.facet_count() > self.vertex_count() {
            return self.transpose().is_isomorphic(&other.transpose());
        }
        let Some((row_colors_a, row_colors_b)) = refine_colors(self, other) else {
            return false;
        };
        let n = self.facet_count();
        // Order rows of `self` so the most constrained color classes come first.
        let mut class_size: BTreeMap<usize, usize> = BTreeMap::new();
        for &c in &row_colors_a {
            *class_size.entry(c).or_default() += 1;
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| (class_size[&row_colors_a[i]], row_colors_a[i], i));

        let mut search = IsoSearch {
            a: self,
            b: other,
            row_colors_a: &row_colors_a,
            row_colors_b: &row_colors_b,
            order: &order,
            image: vec![usize::MAX; n],
            used: FixedBitSet::with_capacity(n),
        };
        search.extend(0)
    }
}

struct IsoSearch<'a> {
    a: &'a IncidenceMatrix,
    b: &'a IncidenceMatrix,
    row_colors_a: &'a [usize],
    row_colors_b: &'a [usize],
    order: &'a [usize],
    image: Vec<usize>,
    used: FixedBitSet,
}

impl IsoSearch<'_> {
    fn extend(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let row = self.order[depth];
        for target in 0..self.b.facet_count() {
            if self.used.contains(target) || self.row_colors_b[target] != self.row_colors_a[row] {
                continue;
            }
            self.image[row] = target;
            self.used.insert(target);
            if self.consistent(depth + 1) && self.extend(depth + 1) {
                return true;
            }
            self.used.set(target, false);
            self.image[row] = usize::MAX;
        }
        false
    }

    /// Column patterns restricted to the mapped rows must agree as multisets.
    fn consistent(&self, mapped: usize) -> bool {
        let rows = &self.order[..mapped];
        let project = |m: &IncidenceMatrix, map: &dyn Fn(usize) -> usize| {
            let mut cols: Vec<Vec<bool>> = (0..m.vertex_count())
                .map(|j| rows.iter().map(|&r| m.get(map(r), j)).collect())
                .collect();
            cols.sort();
            cols
        };
        project(self.a, &|r| r) == project(self.b, &|r| self.image[r])
    }
}

/// Joint colour refinement on the two bipartite incidence graphs. Returns the
/// stable row colours, or `None` when the colour histograms already differ.
fn refine_colors(a: &IncidenceMatrix, b: &IncidenceMatrix) -> Option<(Vec<usize>, Vec<usize>)> {
    let mut rows_a = vec![0usize; a.facet_count()];
    let mut rows_b = vec![0usize; b.facet_count()];
    let mut cols_a = vec![0usize; a.vertex_count()];
    let mut cols_b = vec![0usize; b.vertex_count()];
    let mut classes = 0;
    loop {
        let mut palette: BTreeMap<(usize, Vec<usize>), usize> = BTreeMap::new();
        let sig_rows = |m: &IncidenceMatrix, rows: &[usize], cols: &[usize]| -> Vec<(usize, Vec<usize>)> {
            (0..m.facet_count())
                .map(|i| {
                    let mut nb: Vec<usize> = m.facet_vertices(i).ones().map(|j| cols[j]).collect();
                    nb.sort_unstable();
                    (rows[i], nb)
                })
                .collect()
        };
        let sig_cols = |m: &IncidenceMatrix, rows: &[usize], cols: &[usize]| -> Vec<(usize, Vec<usize>)> {
            (0..m.vertex_count())
                .map(|j| {
                    let mut nb: Vec<usize> = m.vertex_facets(j).ones().map(|i| rows[i]).collect();
                    nb.sort_unstable();
                    // Offset keeps row and column colours disjoint.
                    (usize::MAX - cols[j], nb)
                })
                .collect()
        };
        let ra = sig_rows(a, &rows_a, &cols_a);
        let rb = sig_rows(b, &rows_b, &cols_b);
        let ca = sig_cols(a, &rows_a, &cols_a);
        let cb = sig_cols(b, &rows_b, &cols_b);
        for s in ra.iter().chain(&rb).chain(&ca).chain(&cb) {
            let next = palette.len();
            palette.entry(s.clone()).or_insert(next);
        }
        let recolor = |sigs: &[(usize, Vec<usize>)]| -> Vec<usize> {
            sigs.iter().map(|s| palette[s]).collect()
        };
        let (nra, nrb, nca, ncb) = (recolor(&ra), recolor(&rb), recolor(&ca), recolor(&cb));
        let histogram = |v: &[usize]| {
            let mut h = v.to_vec();
            h.sort_unstable();
            h
        };
        if histogram(&nra) != histogram(&nrb) || histogram(&nca) != histogram(&ncb) {
            return None;
        }
        let count = palette.len();
        rows_a = nra;
        rows_b = nrb;
        cols_a = nca;
        cols_b = ncb;
        if count == classes {
            return Some((rows_a, rows_b));
        }
        classes = count;
    }
}
