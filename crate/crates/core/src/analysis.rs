//! Edge graph, distances, simplicity, spindles and nonrevisiting paths.

use std::collections::{BTreeMap, HashSet, VecDeque};

use fixedbitset::FixedBitSet;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::affine_dim;
use crate::polytope::Polytope;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("a path needs at least one vertex")]
    Empty,
    #[error("vertex index {0} out of range")]
    VertexOutOfRange(usize),
    #[error("vertices {0} and {1} are not adjacent")]
    NotAdjacent(usize, usize),
    #[error("vertex {0} appears twice")]
    Repeated(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    /// Facets containing both endpoints.
    pub facets: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PolytopeGraph {
    vertex_count: usize,
    adjacency: Vec<Vec<usize>>,
    edges: Vec<Edge>,
}

/// `u, v` span an edge iff the only vertices on every common facet are `u` and `v`.
pub fn graph(p: &Polytope) -> PolytopeGraph {
    let m = p.vertex_count();
    let inc = p.incidence();
    let mut adjacency = vec![Vec::new(); m];
    let mut edges = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            let mut common = inc.vertex_facets(a).clone();
            common.intersect_with(inc.vertex_facets(b));
            let face_size = (0..m)
                .filter(|&j| common.is_subset(inc.vertex_facets(j)))
                .take(3)
                .count();
            if face_size == 2 {
                adjacency[a].push(b);
                adjacency[b].push(a);
                edges.push(Edge {
                    a,
                    b,
                    facets: common.ones().collect(),
                });
            }
        }
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }
    PolytopeGraph {
        vertex_count: m,
        adjacency,
        edges,
    }
}

impl PolytopeGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn are_adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    pub fn edge(&self, a: usize, b: usize) -> Option<&Edge> {
        let (a, b) = (a.min(b), a.max(b));
        self.edges.iter().find(|e| e.a == a && e.b == b)
    }

    /// BFS distances from `source`; `None` for unreachable vertices.
    pub fn distances_from(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertex_count];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].expect("queued vertices have a distance");
            for &w in &self.adjacency[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn distance(&self, a: usize, b: usize) -> Option<usize> {
        self.distances_from(a)[b]
    }

    /// Largest pairwise distance; `None` if the graph is disconnected.
    pub fn diameter(&self) -> Option<usize> {
        let mut best = 0;
        for s in 0..self.vertex_count {
            for d in self.distances_from(s) {
                best = best.max(d?);
            }
        }
        Some(best)
    }

    /// Up to `limit` shortest paths from `a` to `b`, in lexicographic order.
    pub fn shortest_paths(&self, a: usize, b: usize, limit: usize) -> Vec<Vec<usize>> {
        let to_b = self.distances_from(b);
        let mut out = Vec::new();
        if to_b[a].is_none() {
            return out;
        }
        let mut path = vec![a];
        self.collect_geodesics(&to_b, b, &mut path, limit, &mut out);
        out
    }

    fn collect_geodesics(
        &self,
        to_b: &[Option<usize>],
        b: usize,
        path: &mut Vec<usize>,
        limit: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        if out.len() >= limit {
            return;
        }
        let u = *path.last().expect("nonempty path");
        if u == b {
            out.push(path.clone());
            return;
        }
        let du = to_b[u].expect("on a geodesic");
        for &w in &self.adjacency[u] {
            if to_b[w] == Some(du - 1) {
                path.push(w);
                self.collect_geodesics(to_b, b, path, limit, out);
                path.pop();
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VertexSimplicity {
    pub vertex: usize,
    pub facets: usize,
    pub simple: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeSimplicity {
    pub a: usize,
    pub b: usize,
    pub facets: usize,
    /// Exactly `d - 1` facets contain the edge.
    pub space_simple: bool,
    /// Space-simple with simple endpoints.
    pub simple: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimplicityReport {
    pub dim: usize,
    pub vertices: Vec<VertexSimplicity>,
    pub edges: Vec<EdgeSimplicity>,
    pub simple: bool,
}

impl SimplicityReport {
    pub fn nonsimple_vertices(&self) -> Vec<usize> {
        self.vertices.iter().filter(|v| !v.simple).map(|v| v.vertex).collect()
    }

    pub fn nonsimple_edges(&self) -> Vec<(usize, usize)> {
        self.edges.iter().filter(|e| !e.simple).map(|e| (e.a, e.b)).collect()
    }
}

pub fn simplicity(p: &Polytope, g: &PolytopeGraph) -> SimplicityReport {
    let d = p.dim();
    let vertices: Vec<VertexSimplicity> = (0..p.vertex_count())
        .map(|v| VertexSimplicity {
            vertex: v,
            facets: p.vertex_degree(v),
            simple: p.vertex_degree(v) == d,
        })
        .collect();
    let edges = g
        .edges()
        .iter()
        .map(|e| {
            let space_simple = e.facets.len() + 1 == d;
            EdgeSimplicity {
                a: e.a,
                b: e.b,
                facets: e.facets.len(),
                space_simple,
                simple: space_simple && vertices[e.a].simple && vertices[e.b].simple,
            }
        })
        .collect();
    let simple = vertices.iter().all(|v| v.simple);
    SimplicityReport {
        dim: d,
        vertices,
        edges,
        simple,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FaceSimplicity {
    pub dim: isize,
    pub facets: Vec<usize>,
    pub space_simple: bool,
    pub simple: bool,
}

/// Simplicity of the smallest face containing `vertices`: a `k`-face is space
/// simple when exactly `d - k` facets contain it, and simple when moreover
/// every face on its boundary is simple.
pub fn face_simplicity(p: &Polytope, vertices: &[usize]) -> Result<FaceSimplicity, PathError> {
    if vertices.is_empty() {
        return Err(PathError::Empty);
    }
    if let Some(&v) = vertices.iter().find(|&&v| v >= p.vertex_count()) {
        return Err(PathError::VertexOutOfRange(v));
    }
    let facets = common_facets(p, vertices);
    let face = face_vertices(p, &facets);
    let mut memo = BTreeMap::new();
    let (dim, space_simple, simple) = face_status(p, &face, &mut memo);
    Ok(FaceSimplicity {
        dim,
        facets: facets.ones().collect(),
        space_simple,
        simple,
    })
}

fn common_facets(p: &Polytope, vertices: &[usize]) -> FixedBitSet {
    let mut common = p.incidence().vertex_facets(vertices[0]).clone();
    for &v in &vertices[1..] {
        common.intersect_with(p.incidence().vertex_facets(v));
    }
    common
}

fn face_vertices(p: &Polytope, facets: &FixedBitSet) -> Vec<usize> {
    (0..p.vertex_count())
        .filter(|&j| facets.is_subset(p.incidence().vertex_facets(j)))
        .collect()
}

fn face_status(
    p: &Polytope,
    face: &[usize],
    memo: &mut BTreeMap<Vec<usize>, (isize, bool, bool)>,
) -> (isize, bool, bool) {
    if let Some(&hit) = memo.get(face) {
        return hit;
    }
    let points: Vec<_> = face.iter().map(|&j| p.v().vert(j).to_vec()).collect();
    let k = affine_dim(&points).expect("vertices are homogenized");
    let facets = common_facets(p, face);
    let space_simple = facets.count_ones(..) as isize == p.dim() as isize - k;
    let mut simple = space_simple;
    if simple && k > 0 {
        // boundary faces: intersections with facets not containing the face
        for i in 0..p.facet_count() {
            if facets.contains(i) {
                continue;
            }
            let sub: Vec<usize> = face
                .iter()
                .copied()
                .filter(|&j| p.incidence().get(i, j))
                .collect();
            if sub.is_empty() {
                continue;
            }
            let sub = face_vertices(p, &common_facets(p, &sub));
            let (sk, _, sub_simple) = face_status(p, &sub, memo);
            if sk == k - 1 && !sub_simple {
                simple = false;
                break;
            }
        }
    }
    memo.insert(face.to_vec(), (k, space_simple, simple));
    (k, space_simple, simple)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpindleCertificate {
    pub x: usize,
    pub y: usize,
    pub x_facets: Vec<usize>,
    pub y_facets: Vec<usize>,
    pub n1: usize,
    pub n2: usize,
    pub length: usize,
    /// Every vertex other than `x` and `y` is simple.
    pub all_but_simple: bool,
}

/// Certificate for the pair, or `None` when some facet misses both vertices.
pub fn spindle(p: &Polytope, g: &PolytopeGraph, x: usize, y: usize) -> Option<SpindleCertificate> {
    let inc = p.incidence();
    let mut cover = inc.vertex_facets(x).clone();
    cover.union_with(inc.vertex_facets(y));
    if cover.count_ones(..) != p.facet_count() || x == y {
        return None;
    }
    let x_facets: Vec<usize> = inc.vertex_facets(x).ones().collect();
    let y_facets: Vec<usize> = inc.vertex_facets(y).ones().collect();
    Some(SpindleCertificate {
        x,
        y,
        n1: x_facets.len(),
        n2: y_facets.len(),
        x_facets,
        y_facets,
        length: g.distance(x, y)?,
        all_but_simple: (0..p.vertex_count())
            .all(|v| v == x || v == y || p.is_simple_vertex(v)),
    })
}

/// All spindle pairs `x < y`.
pub fn find_spindles(p: &Polytope, g: &PolytopeGraph) -> Vec<SpindleCertificate> {
    let m = p.vertex_count();
    (0..m)
        .flat_map(|x| (x + 1..m).map(move |y| (x, y)))
        .filter_map(|(x, y)| spindle(p, g, x, y))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathRecord {
    pub vertices: Vec<usize>,
    pub facets: Vec<Vec<usize>>,
}

impl PathRecord {
    pub fn new(p: &Polytope, g: &PolytopeGraph, vertices: Vec<usize>) -> Result<Self, PathError> {
        if vertices.is_empty() {
            return Err(PathError::Empty);
        }
        if let Some(&v) = vertices.iter().find(|&&v| v >= p.vertex_count()) {
            return Err(PathError::VertexOutOfRange(v));
        }
        let mut seen = HashSet::new();
        for &v in &vertices {
            if !seen.insert(v) {
                return Err(PathError::Repeated(v));
            }
        }
        for w in vertices.windows(2) {
            if !g.are_adjacent(w[0], w[1]) {
                return Err(PathError::NotAdjacent(w[0], w[1]));
            }
        }
        let facets = vertices
            .iter()
            .map(|&v| p.incidence().vertex_facets(v).ones().collect())
            .collect();
        Ok(Self { vertices, facets })
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn start(&self) -> usize {
        self.vertices[0]
    }

    pub fn end(&self) -> usize {
        *self.vertices.last().expect("nonempty path")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Revisit {
    pub facet: usize,
    /// Positions `i < j < l` on the path: on the facet, off it, back on it.
    pub witness: (usize, usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RevisitReport {
    pub revisits: Vec<Revisit>,
}

impl RevisitReport {
    pub fn is_nonrevisiting(&self) -> bool {
        self.revisits.is_empty()
    }
}

pub fn revisit_check(p: &Polytope, path: &PathRecord) -> RevisitReport {
    let on = |f: usize, pos: usize| p.incidence().get(f, path.vertices[pos]);
    let k = path.vertices.len();
    let revisits = (0..p.facet_count())
        .filter_map(|f| {
            let i = (0..k).find(|&i| on(f, i))?;
            let j = (i + 1..k).find(|&j| !on(f, j))?;
            let l = (j + 1..k).find(|&l| on(f, l))?;
            Some(Revisit {
                facet: f,
                witness: (i, j, l),
            })
        })
        .collect();
    RevisitReport { revisits }
}

/// Shortest nonrevisiting path from `x` to `y`, or `None` if there is none.
///
/// Iterative deepening over paths that carry the set of abandoned facets;
/// a step is legal when the new vertex lies on no abandoned facet. Such a path
/// can never repeat a vertex, so the search space is finite.
pub fn nonrevisiting_search(
    p: &Polytope,
    g: &PolytopeGraph,
    x: usize,
    y: usize,
) -> Option<PathRecord> {
    let to_y = g.distances_from(y);
    let lower = to_y[x]?;
    let mut order: Vec<Vec<usize>> = (0..p.vertex_count())
        .map(|v| g.neighbors(v).to_vec())
        .collect();
    for list in &mut order {
        list.sort_by(|&a, &b| p.vertex_label(a).cmp(p.vertex_label(b)).then(a.cmp(&b)));
    }
    let mut search = Search {
        p,
        order: &order,
        to_y: &to_y,
        y,
        failed: HashSet::new(),
    };
    for depth in lower..p.vertex_count() {
        let mut path = vec![x];
        if search.dfs(&mut path, &FixedBitSet::with_capacity(p.facet_count()), depth) {
            return Some(PathRecord::new(p, g, path).expect("search yields valid paths"));
        }
    }
    None
}

struct Search<'a> {
    p: &'a Polytope,
    order: &'a [Vec<usize>],
    to_y: &'a [Option<usize>],
    y: usize,
    /// (vertex, abandoned facets, remaining steps) known to be dead ends.
    failed: HashSet<(usize, Vec<usize>, usize)>,
}

impl Search<'_> {
    fn dfs(&mut self, path: &mut Vec<usize>, abandoned: &FixedBitSet, remaining: usize) -> bool {
        let u = *path.last().expect("nonempty path");
        if u == self.y {
            return true;
        }
        if self.to_y[u].is_none_or(|d| d > remaining) {
            return false;
        }
        let key = (u, abandoned.ones().collect::<Vec<_>>(), remaining);
        if self.failed.contains(&key) {
            return false;
        }
        let inc = self.p.incidence();
        for &w in &self.order[u] {
            if !inc.vertex_facets(w).is_disjoint(abandoned) {
                continue;
            }
            let mut next = abandoned.clone();
            next.union_with(inc.vertex_facets(u));
            next.difference_with(inc.vertex_facets(w));
            if !inc.vertex_facets(self.y).is_disjoint(&next) {
                continue;
            }
            path.push(w);
            if self.dfs(path, &next, remaining - 1) {
                return true;
            }
            path.pop();
        }
        self.failed.insert(key);
        false
    }
}
