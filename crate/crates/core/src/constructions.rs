//! Wedges, vertical facet perturbations, perturbed wedges and two-point
//! suspensions, with bookkeeping of where every facet and vertex goes.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::analysis;
use crate::enumeration::{self, EnumerationError};
use crate::linalg::{dot, integer_rank, primitive_integer, ser, RatMatrix, Rational};
use crate::polytope::{HRep, Polytope, PolytopeError, VRep};

/// Halvings tried by [`choose_epsilon`] before giving up.
pub const MAX_HALVINGS: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("facet index {0} out of range")]
    FacetOutOfRange(usize),
    #[error("vertex index {0} out of range")]
    VertexOutOfRange(usize),
    #[error("epsilon must be > 0, got {0}")]
    NonPositiveEpsilon(Rational),
    #[error("facet {0} is not vertical (last normal coordinate is nonzero)")]
    NotVertical(usize),
    #[error("the perturbed facet must differ from the foot")]
    FacetIsFoot,
    #[error("combinatorics still change for perturbations below epsilon = {0}")]
    UnstableEpsilon(Rational),
    #[error("incidence did not stabilize within {0} halvings of epsilon")]
    NoStableEpsilon(u32),
    #[error("wedge has {found_facets} facets and {found_vertices} vertices, expected {facets} and {vertices}")]
    WedgeCount {
        facets: usize,
        vertices: usize,
        found_facets: usize,
        found_vertices: usize,
    },
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
}

/// Where a vertex of the wedged polytope comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexImage {
    /// On the foot: a single image with last coordinate 0.
    Foot(usize),
    /// Off the foot: one copy on the top facet, one on the base.
    Split { top: usize, base: usize },
}

#[derive(Debug, Clone)]
pub struct WedgeResult {
    pub polytope: Polytope,
    /// Foot facet, indexed in the source polytope.
    pub foot: usize,
    pub top_facet: usize,
    pub base_facet: usize,
    /// Source facet to wedge facets; the foot maps to `[top, base]`.
    pub facet_map: Vec<Vec<usize>>,
    pub vertex_map: Vec<VertexImage>,
}

/// Wedge over `foot`: normals `[-1, h_F, +1]` (top) and `[-1, h_F, -1]` (base)
/// replace the foot, every other normal gains a trailing 0. Foot vertices gain
/// a trailing 0; any other vertex `v` splits into `[v, -(h_F . v)]` on the top
/// and `[v, h_F . v]` on the base.
pub fn wedge(p: &Polytope, foot: usize) -> Result<WedgeResult, ConstructionError> {
    let n = p.facet_count();
    if foot >= n {
        return Err(ConstructionError::FacetOutOfRange(foot));
    }
    let d = p.dim();
    let extend = |row: &[Rational], last: Rational| -> Vec<Rational> {
        let mut r = row.to_vec();
        r.push(last);
        r
    };

    let mut normals = Vec::with_capacity(n + 1);
    let mut facet_labels = Vec::with_capacity(n + 1);
    let mut facet_map = Vec::with_capacity(n);
    let mut taken: BTreeSet<String> = p
        .facet_labels()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != foot)
        .map(|(_, l)| l.clone())
        .collect();
    let (mut top_facet, mut base_facet) = (0, 0);
    for (i, row) in p.h().normals().iter().enumerate() {
        if i == foot {
            top_facet = normals.len();
            base_facet = top_facet + 1;
            normals.push(extend(row, Rational::one()));
            normals.push(extend(row, -Rational::one()));
            let t = fresh_label(&mut taken, "T".to_string());
            let b = fresh_label(&mut taken, "B".to_string());
            facet_labels.push(t);
            facet_labels.push(b);
            facet_map.push(vec![top_facet, base_facet]);
        } else {
            facet_map.push(vec![normals.len()]);
            normals.push(extend(row, Rational::zero()));
            facet_labels.push(p.facet_label(i).to_string());
        }
    }

    let h_foot = p.h().normal(foot);
    let on_foot: Vec<usize> = p.incidence().facet_vertices(foot).ones().collect();
    let off_foot: Vec<usize> = (0..p.vertex_count())
        .filter(|j| !p.incidence().get(foot, *j))
        .collect();
    let mut verts = Vec::with_capacity(2 * p.vertex_count() - on_foot.len());
    let mut vertex_labels = Vec::with_capacity(verts.capacity());
    let mut vertex_map = vec![VertexImage::Foot(0); p.vertex_count()];
    for &j in &on_foot {
        vertex_map[j] = VertexImage::Foot(verts.len());
        verts.push(extend(p.v().vert(j), Rational::zero()));
        vertex_labels.push(p.vertex_label(j).to_string());
    }
    let tops = verts.len();
    for (k, &j) in off_foot.iter().enumerate() {
        let slack = dot(h_foot, p.v().vert(j));
        debug_assert!(slack.is_negative());
        verts.push(extend(p.v().vert(j), -slack));
        vertex_labels.push(format!("{}^t", p.vertex_label(j)));
        vertex_map[j] = VertexImage::Split {
            top: tops + k,
            base: tops + off_foot.len() + k,
        };
    }
    for &j in &off_foot {
        let slack = dot(h_foot, p.v().vert(j));
        verts.push(extend(p.v().vert(j), slack));
        vertex_labels.push(format!("{}_b", p.vertex_label(j)));
    }
    let vertex_labels = uniquify(vertex_labels);

    let mut w = Polytope::new(HRep::new(d + 1, normals)?, VRep::new(d + 1, verts)?)?;
    w.set_labels(facet_labels, vertex_labels);
    let expected_vertices = 2 * p.vertex_count() - on_foot.len();
    if w.facet_count() != n + 1 || w.vertex_count() != expected_vertices {
        return Err(ConstructionError::WedgeCount {
            facets: n + 1,
            vertices: expected_vertices,
            found_facets: w.facet_count(),
            found_vertices: w.vertex_count(),
        });
    }
    Ok(WedgeResult {
        polytope: w,
        foot,
        top_facet,
        base_facet,
        facet_map,
        vertex_map,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Epsilon {
    Value(Rational),
    /// Chosen by [`choose_epsilon`].
    Auto,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerturbationSpec {
    pub facet: usize,
    pub epsilon: Epsilon,
}

/// Sign of `h_G~ . v` for an old vertex `v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// On the perturbed hyperplane.
    On,
    /// Strictly violates the perturbed inequality: cut off.
    Beyond,
    /// Strictly satisfies it.
    Beneath,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "fate", rename_all = "snake_case")]
pub enum VertexFate {
    /// Still a vertex, at the same coordinates.
    Retained { image: usize },
    /// Replaced by exactly one new vertex on the line of the old edge
    /// `(vertex, neighbor)`: pushed back along it when cut off, out along its
    /// extension otherwise.
    Slid { neighbor: usize, image: usize },
    /// Gone; the listed new vertices replace it.
    Truncated { new_vertices: Vec<usize> },
}

impl VertexFate {
    pub fn kind(&self) -> FateKind {
        match self {
            VertexFate::Retained { .. } => FateKind::Retained,
            VertexFate::Slid { .. } => FateKind::Slid,
            VertexFate::Truncated { .. } => FateKind::Truncated,
        }
    }

    /// Index in the perturbed polytope of the vertex that continues this one, if any.
    pub fn image(&self) -> Option<usize> {
        match self {
            VertexFate::Retained { image } | VertexFate::Slid { image, .. } => Some(*image),
            VertexFate::Truncated { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FateKind {
    Retained,
    Slid,
    Truncated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FateEntry {
    pub vertex: usize,
    pub label: String,
    pub side: Side,
    #[serde(flatten)]
    pub fate: VertexFate,
}

/// How a new vertex of the perturbed polytope relates to the old one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    /// Strictly inside the old edge `[from, to]`; `from` is the cut-off end.
    OldEdge { from: usize, to: usize },
    /// On the extension of the old edge `[from, through]` beyond `through`.
    EdgeExtension { through: usize, from: usize },
    /// End of an edge revealed at the retained old vertex `from`.
    RevealedEdge { from: usize },
    Unattributed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NewVertex {
    pub index: usize,
    pub label: String,
    #[serde(serialize_with = "ser::rational_vec")]
    pub coords: Vec<Rational>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Serialize)]
pub struct PerturbationReport {
    #[serde(skip)]
    pub polytope: Polytope,
    pub facet: usize,
    #[serde(serialize_with = "ser::rational")]
    pub epsilon: Rational,
    pub fates: Vec<FateEntry>,
    pub new_vertices: Vec<NewVertex>,
}

impl PerturbationReport {
    pub fn count(&self, kind: FateKind) -> usize {
        self.fates.iter().filter(|f| f.fate.kind() == kind).count()
    }
}

/// Moves the last coordinate of facet `g`'s normal from 0 to `epsilon > 0`,
/// re-enumerates, and classifies what happened to each old vertex.
pub fn perturb_facet(
    p: &Polytope,
    spec: &PerturbationSpec,
) -> Result<PerturbationReport, ConstructionError> {
    let g = spec.facet;
    if g >= p.facet_count() {
        return Err(ConstructionError::FacetOutOfRange(g));
    }
    if !p.is_vertical(g) {
        return Err(ConstructionError::NotVertical(g));
    }
    let epsilon = match &spec.epsilon {
        Epsilon::Value(e) if !e.is_positive() => {
            return Err(ConstructionError::NonPositiveEpsilon(e.clone()))
        }
        Epsilon::Value(e) if !is_stable_below(p, g, e) => {
            return Err(ConstructionError::UnstableEpsilon(e.clone()))
        }
        Epsilon::Value(e) => e.clone(),
        Epsilon::Auto => choose_epsilon(p, g)?,
    };
    perturb_unchecked(p, g, epsilon)
}

fn perturbed_h(p: &Polytope, g: usize, epsilon: &Rational) -> HRep {
    let mut normals = p.h().normals().to_vec();
    *normals[g].last_mut().expect("nonempty normal") = epsilon.clone();
    HRep::new(p.dim(), normals).expect("first coordinate untouched")
}

/// The perturbation without argument checks; `epsilon = 0` reproduces `p`.
pub(crate) fn perturb_unchecked(
    p: &Polytope,
    g: usize,
    epsilon: Rational,
) -> Result<PerturbationReport, ConstructionError> {
    let h = perturbed_h(p, g, &epsilon);
    let g_row = h.normal(g).to_vec();
    let found = enumeration::vertices_from_h(&h)?;
    let found_set: BTreeSet<&Vec<Rational>> = found.verts().iter().collect();

    // Retained old vertices first, in old order, then the new ones in lexicographic order.
    let old = p.v().verts();
    let old_index: BTreeMap<&Vec<Rational>, usize> =
        old.iter().enumerate().map(|(j, v)| (v, j)).collect();
    let mut verts: Vec<Vec<Rational>> = Vec::with_capacity(found.len());
    let mut retained_image = vec![None; old.len()];
    for (j, v) in old.iter().enumerate() {
        if found_set.contains(v) {
            retained_image[j] = Some(verts.len());
            verts.push(v.clone());
        }
    }
    let first_new = verts.len();
    verts.extend(found.verts().iter().filter(|v| !old_index.contains_key(v)).cloned());

    let out = Polytope::new(h, VRep::new(p.dim(), verts)?)?;
    let sides: Vec<Side> = old
        .iter()
        .map(|v| match dot(&g_row, v).cmp(&Rational::zero()) {
            Ordering::Equal => Side::On,
            Ordering::Greater => Side::Beyond,
            Ordering::Less => Side::Beneath,
        })
        .collect();

    let old_graph = analysis::graph(p);
    let new_graph = analysis::graph(&out);
    let lost = |j: usize| retained_image[j].is_none();

    let mut provenance = Vec::with_capacity(out.vertex_count() - first_new);
    let mut attributed: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for z in first_new..out.vertex_count() {
        let point = out.v().vert(z);
        let mut prov = Provenance::Unattributed;
        for e in old_graph.edges() {
            let (a, b) = (e.a, e.b);
            if lost(a) && sides[a] == Side::Beyond && strictly_between(point, &old[a], &old[b]) {
                prov = Provenance::OldEdge { from: a, to: b };
                break;
            }
            if lost(b) && sides[b] == Side::Beyond && strictly_between(point, &old[b], &old[a]) {
                prov = Provenance::OldEdge { from: b, to: a };
                break;
            }
        }
        if prov == Provenance::Unattributed {
            for e in old_graph.edges() {
                for (through, from) in [(e.a, e.b), (e.b, e.a)] {
                    if lost(through)
                        && sides[through] == Side::Beneath
                        && strictly_between(&old[through], &old[from], point)
                    {
                        prov = Provenance::EdgeExtension { through, from };
                        break;
                    }
                }
                if prov != Provenance::Unattributed {
                    break;
                }
            }
        }
        if prov == Provenance::Unattributed {
            let revealed = new_graph.neighbors(z).iter().copied().find_map(|r| {
                let j = *old_index.get(&out.v().vert(r).to_vec())?;
                (sides[j] == Side::Beneath && p.incidence().get(g, j)).then_some(j)
            });
            if let Some(from) = revealed {
                prov = Provenance::RevealedEdge { from };
            }
        }
        match prov {
            Provenance::OldEdge { from, to } => attributed.entry(from).or_default().push((z, to)),
            Provenance::EdgeExtension { through, from } => {
                attributed.entry(through).or_default().push((z, from))
            }
            _ => {}
        }
        provenance.push(prov);
    }

    let mut fates = Vec::with_capacity(old.len());
    for j in 0..old.len() {
        let fate = match retained_image[j] {
            Some(image) => VertexFate::Retained { image },
            None => match attributed.get(&j).map(Vec::as_slice) {
                Some(&[(image, neighbor)]) => VertexFate::Slid { neighbor, image },
                other => VertexFate::Truncated {
                    new_vertices: other.unwrap_or(&[]).iter().map(|&(z, _)| z).collect(),
                },
            },
        };
        fates.push(FateEntry {
            vertex: j,
            label: p.vertex_label(j).to_string(),
            side: sides[j],
            fate,
        });
    }

    // Labels: retained vertices keep theirs; new ones are named after their origin.
    let mut vertex_labels: Vec<String> = (0..old.len())
        .filter(|&j| retained_image[j].is_some())
        .map(|j| p.vertex_label(j).to_string())
        .collect();
    let mut revealed_count: BTreeMap<usize, usize> = BTreeMap::new();
    for (k, prov) in provenance.iter().enumerate() {
        let z = first_new + k;
        let slid_from = fates.iter().find_map(|f| match f.fate {
            VertexFate::Slid { image, .. } if image == z => Some(f.vertex),
            _ => None,
        });
        let label = match prov {
            Provenance::OldEdge { from, to } => {
                match split_pair(p.vertex_label(*from), p.vertex_label(*to)) {
                    Some(stem) => format!("{stem}_0"),
                    None => match slid_from {
                        Some(v) => format!("{}'", p.vertex_label(v)),
                        None => format!("{}/{}", p.vertex_label(*from), p.vertex_label(*to)),
                    },
                }
            }
            Provenance::EdgeExtension { through, .. } => format!("{}'", p.vertex_label(*through)),
            Provenance::RevealedEdge { from } => {
                let c = revealed_count.entry(*from).or_default();
                *c += 1;
                format!("{}+{}", p.vertex_label(*from), c)
            }
            Provenance::Unattributed => format!("n{}", k + 1),
        };
        vertex_labels.push(label);
    }
    let vertex_labels = uniquify(vertex_labels);

    let new_vertices = provenance
        .into_iter()
        .enumerate()
        .map(|(k, provenance)| NewVertex {
            index: first_new + k,
            label: vertex_labels[first_new + k].clone(),
            coords: out.v().vert(first_new + k).to_vec(),
            provenance,
        })
        .collect();

    let mut out = out;
    out.set_labels(p.facet_labels().to_vec(), vertex_labels);
    Ok(PerturbationReport {
        polytope: out,
        facet: g,
        epsilon,
        fates,
        new_vertices,
    })
}

/// `"y^t"`, `"y_b"` (either order) gives `Some("y")`.
fn split_pair(a: &str, b: &str) -> Option<String> {
    let stem = |s: &str, suffix: &str| s.strip_suffix(suffix).map(str::to_string);
    match (stem(a, "^t"), stem(b, "_b")) {
        (Some(x), Some(y)) if x == y => return Some(x),
        _ => {}
    }
    match (stem(a, "_b"), stem(b, "^t")) {
        (Some(x), Some(y)) if x == y => Some(x),
        _ => None,
    }
}

/// `z` lies on the open segment `(a, b)`.
fn strictly_between(z: &[Rational], a: &[Rational], b: &[Rational]) -> bool {
    let Some(k) = (0..a.len()).find(|&k| a[k] != b[k]) else {
        return false;
    };
    let t = (&z[k] - &a[k]) / (&b[k] - &a[k]);
    if !t.is_positive() || t >= Rational::one() {
        return false;
    }
    (0..a.len()).all(|i| z[i] == &a[i] + &t * (&b[i] - &a[i]))
}

/// Whether perturbing `g` to any `t` in `(0, epsilon]` gives the same
/// combinatorial type as at `epsilon`.
///
/// Each vertex at `epsilon` is followed as the basic solution `v(t) = p + t q`
/// of `d` of its active rows (cofactors are linear in `t`, since only row `g`
/// depends on it). The type is constant on the interval iff every active row
/// stays identically active along `v(t)` and no other slack, nor `v_0`,
/// vanishes on `(0, epsilon]`.
pub fn is_stable_below(p: &Polytope, g: usize, epsilon: &Rational) -> bool {
    let h = perturbed_h(p, g, epsilon);
    let Ok(v) = enumeration::vertices_from_h(&h) else {
        return false;
    };
    let d = p.dim();
    let base = p.h().normals();
    for x in v.verts() {
        let active: Vec<usize> = (0..h.len()).filter(|&i| dot(h.normal(i), x).is_zero()).collect();
        let mut basis: Vec<usize> = Vec::with_capacity(d);
        for &i in &active {
            let mut trial: Vec<Vec<BigInt>> =
                basis.iter().map(|&b| primitive_integer(h.normal(b))).collect();
            trial.push(primitive_integer(h.normal(i)));
            if integer_rank(trial, d + 1) > basis.len() {
                basis.push(i);
            }
            if basis.len() == d {
                break;
            }
        }
        let (pv, qv) = parametric_kernel(base, g, &basis, d);
        for i in 0..h.len() {
            // slack of row i along v(t), as a + b t + c t^2
            let (a, mut b, mut c) = (dot(&base[i], &pv), dot(&base[i], &qv), Rational::zero());
            if i == g {
                b += &pv[d];
                c = qv[d].clone();
            }
            let identically_zero = a.is_zero() && b.is_zero() && c.is_zero();
            if active.contains(&i) != identically_zero {
                return false;
            }
            if !identically_zero && has_root_in(&a, &b, &c, epsilon) {
                return false;
            }
        }
        if has_root_in(&pv[0], &qv[0], &Rational::zero(), epsilon) {
            return false;
        }
    }
    true
}

/// Homogeneous kernel `p + t q` of the basis rows, by signed maximal minors.
/// Row `g` carries `t` in its last entry; the others are taken at `t = 0`.
fn parametric_kernel(
    base: &[Vec<Rational>],
    g: usize,
    basis: &[usize],
    d: usize,
) -> (Vec<Rational>, Vec<Rational>) {
    let minor = |drop_col: usize, replace_g: bool| -> Rational {
        let rows: Vec<Vec<Rational>> = basis
            .iter()
            .map(|&i| {
                (0..=d)
                    .filter(|&k| k != drop_col)
                    .map(|k| match (replace_g && i == g, k == d) {
                        (true, true) => Rational::one(),
                        (true, false) => Rational::zero(),
                        (false, _) => base[i][k].clone(),
                    })
                    .collect()
            })
            .collect();
        RatMatrix::from_rows(&rows, d)
            .ok()
            .and_then(|m| m.determinant())
            .expect("square basis")
    };
    let has_g = basis.contains(&g);
    let signed = |k: usize, x: Rational| if k % 2 == 0 { x } else { -x };
    let pv = (0..=d).map(|k| signed(k, minor(k, false))).collect();
    let qv = (0..=d)
        .map(|k| {
            if has_g && k != d {
                signed(k, minor(k, true))
            } else {
                Rational::zero()
            }
        })
        .collect();
    (pv, qv)
}

/// `a + b t + c t^2` vanishes somewhere in `(0, epsilon]`.
fn has_root_in(a: &Rational, b: &Rational, c: &Rational, epsilon: &Rational) -> bool {
    let f = |t: &Rational| a + b * t + c * t * t;
    let at_end = f(epsilon);
    if at_end.is_zero() || (a * &at_end).is_negative() {
        return true;
    }
    if c.is_zero() {
        return false;
    }
    let vertex = -b / (c * Rational::from_integer(BigInt::from(2)));
    if vertex.is_positive() && &vertex < epsilon {
        let there = f(&vertex);
        return there.is_zero() || there.signum() != at_end.signum();
    }
    false
}

/// Largest `epsilon = 2^-k`, `k = 0..=64`, for which [`is_stable_below`] holds.
pub fn choose_epsilon(p: &Polytope, g: usize) -> Result<Rational, ConstructionError> {
    if g >= p.facet_count() {
        return Err(ConstructionError::FacetOutOfRange(g));
    }
    if !p.is_vertical(g) {
        return Err(ConstructionError::NotVertical(g));
    }
    (0..=MAX_HALVINGS)
        .map(|k| Rational::new(BigInt::one(), BigInt::one() << k))
        .find(|eps| is_stable_below(p, g, eps))
        .ok_or(ConstructionError::NoStableEpsilon(MAX_HALVINGS))
}

/// Images of one source vertex in the perturbed wedge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VertexImages {
    pub vertex: usize,
    pub label: String,
    /// Image of a foot vertex.
    pub foot: Option<usize>,
    /// What became of the top copy (`^t`); `None` if truncated.
    pub top: Option<usize>,
    /// What became of the base copy (`_b`).
    pub base: Option<usize>,
    /// New vertex on the vertical edge between the two copies (`_0`).
    pub zero: Option<usize>,
}

impl VertexImages {
    pub fn all(&self) -> Vec<usize> {
        [self.foot, self.top, self.base, self.zero]
            .into_iter()
            .flatten()
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NaturalImageMap {
    pub source: String,
    pub target: String,
    pub vertex_images: Vec<VertexImages>,
    pub facet_images: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PerturbedWedge {
    #[serde(skip)]
    pub wedge: WedgeResult,
    pub images: NaturalImageMap,
    pub perturbation: PerturbationReport,
    /// Nonsimple vertices on `g` and off the foot.
    pub nonsimple_candidates: Vec<usize>,
    pub flags: Vec<String>,
}

impl PerturbedWedge {
    pub fn polytope(&self) -> &Polytope {
        &self.perturbation.polytope
    }
}

/// Wedge over `foot`, then perturb the image of `g`.
pub fn perturbed_wedge(
    p: &Polytope,
    foot: usize,
    g: usize,
    epsilon: Epsilon,
) -> Result<PerturbedWedge, ConstructionError> {
    for f in [foot, g] {
        if f >= p.facet_count() {
            return Err(ConstructionError::FacetOutOfRange(f));
        }
    }
    if foot == g {
        return Err(ConstructionError::FacetIsFoot);
    }
    let nonsimple_candidates: Vec<usize> = (0..p.vertex_count())
        .filter(|&y| {
            !p.is_simple_vertex(y) && p.incidence().get(g, y) && !p.incidence().get(foot, y)
        })
        .collect();
    let mut flags = Vec::new();
    if nonsimple_candidates.is_empty() {
        flags.push("y not nonsimple: no nonsimple vertex on G off the foot".to_string());
    }

    let w = wedge(p, foot)?;
    let g_image = w.facet_map[g][0];
    let perturbation = perturb_facet(
        &w.polytope,
        &PerturbationSpec {
            facet: g_image,
            epsilon,
        },
    )?;

    let follow = |k: usize| perturbation.fates[k].fate.image();
    let vertex_images = (0..p.vertex_count())
        .map(|j| {
            let mut im = VertexImages {
                vertex: j,
                label: p.vertex_label(j).to_string(),
                foot: None,
                top: None,
                base: None,
                zero: None,
            };
            match w.vertex_map[j] {
                VertexImage::Foot(k) => im.foot = follow(k),
                VertexImage::Split { top, base } => {
                    im.top = follow(top);
                    im.base = follow(base);
                    im.zero = perturbation.new_vertices.iter().find_map(|nv| match nv.provenance {
                        Provenance::OldEdge { from, to }
                            if (from == top && to == base) || (from == base && to == top) =>
                        {
                            Some(nv.index)
                        }
                        _ => None,
                    });
                }
            }
            im
        })
        .collect();
    let images = NaturalImageMap {
        source: "P".to_string(),
        target: format!(
            "pwedge[{},{}]",
            p.facet_label(foot),
            p.facet_label(g)
        ),
        vertex_images,
        facet_images: w.facet_map.clone(),
    };
    Ok(PerturbedWedge {
        wedge: w,
        images,
        perturbation,
        nonsimple_candidates,
        flags,
    })
}

/// Two-point suspension over vertex `u`: every other vertex is lifted to last
/// coordinate 0 and `u` is replaced by `[u, +1]` and `[u, -1]`.
pub fn two_point_suspension(q: &Polytope, u: usize) -> Result<Polytope, ConstructionError> {
    if u >= q.vertex_count() {
        return Err(ConstructionError::VertexOutOfRange(u));
    }
    let mut verts = Vec::with_capacity(q.vertex_count() + 1);
    let mut labels = Vec::with_capacity(q.vertex_count() + 1);
    for j in 0..q.vertex_count() {
        let x = q.v().vert(j);
        if j == u {
            for (sign, suffix) in [(1, "+"), (-1, "-")] {
                let mut v = x.to_vec();
                v.push(Rational::from_integer(BigInt::from(sign)));
                verts.push(v);
                labels.push(format!("{}{}", q.vertex_label(j), suffix));
            }
        } else {
            let mut v = x.to_vec();
            v.push(Rational::zero());
            verts.push(v);
            labels.push(q.vertex_label(j).to_string());
        }
    }
    let (s, keep) = Polytope::from_v_keep(VRep::new(q.dim() + 1, verts)?)?;
    let facet_labels = (0..s.facet_count()).map(|i| format!("f{i}")).collect();
    let vertex_labels = keep.iter().map(|&k| labels[k].clone()).collect();
    let mut s = s;
    s.set_labels(facet_labels, vertex_labels);
    Ok(s)
}

fn fresh_label(taken: &mut BTreeSet<String>, mut label: String) -> String {
    while taken.contains(&label) {
        label.push('\'');
    }
    taken.insert(label.clone());
    label
}

fn uniquify(labels: Vec<String>) -> Vec<String> {
    let mut taken = BTreeSet::new();
    labels
        .into_iter()
        .map(|l| fresh_label(&mut taken, l))
        .collect()
}
