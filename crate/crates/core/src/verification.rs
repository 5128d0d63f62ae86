//! Mechanical checks: spindle revisit lemma with its counting certificate,
//! survival of nonsimple edges under the perturbed wedge, the vertex-fate case
//! analysis, and path lengths through natural images.

use std::fmt;

use fixedbitset::FixedBitSet;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::analysis::{
    self, nonrevisiting_search, revisit_check, spindle, PathError, PathRecord, PolytopeGraph,
    SpindleCertificate,
};
use crate::constructions::{
    self, ConstructionError, Epsilon, FateKind, PerturbationSpec, Side,
};
use crate::linalg::{ser, Rational};
use crate::polytope::Polytope;

/// Geodesics for which [`verify_lemma1`] attaches counting certificates.
pub const CERTIFIED_PATHS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerificationError {
    #[error("vertex index {0} out of range")]
    VertexOutOfRange(usize),
    #[error("facet index {0} out of range")]
    FacetOutOfRange(usize),
    #[error("({x}, {y}) is not a spindle: some facet contains neither vertex")]
    NotASpindle { x: usize, y: usize },
    #[error("path runs from {start} to {end}, expected {x} to {y}")]
    Endpoints {
        start: usize,
        end: usize,
        x: usize,
        y: usize,
    },
    #[error("interior vertex {0} is not simple; the certificate needs simple interior vertices")]
    NonsimpleInterior(usize),
    #[error("preconditions not met: {}", .0.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("; "))]
    Lemma2Preconditions(Vec<Lemma2Precondition>),
    #[error("the perturbation created no vertex y_0 for vertex {0}")]
    MissingY0(usize),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SearchOutcome {
    NoNonrevisitingPath,
    Found { path: PathRecord },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lemma1Report {
    pub spindle: SpindleCertificate,
    pub dim: usize,
    /// All-but-simple and of length `d + 1`.
    pub precondition_met: bool,
    pub search_result: SearchOutcome,
    /// A nonrevisiting path was found although the preconditions hold.
    pub contradiction: bool,
    pub certificates: Vec<CountingCertificate>,
}

impl Lemma1Report {
    pub fn holds(&self) -> bool {
        !self.contradiction
    }
}

/// Runs the exhaustive nonrevisiting search on a spindle and attaches
/// counting certificates for shortest paths with simple interior vertices.
pub fn verify_lemma1(
    p: &Polytope,
    g: &PolytopeGraph,
    x: usize,
    y: usize,
) -> Result<Lemma1Report, VerificationError> {
    for v in [x, y] {
        if v >= p.vertex_count() {
            return Err(VerificationError::VertexOutOfRange(v));
        }
    }
    let cert = spindle(p, g, x, y).ok_or(VerificationError::NotASpindle { x, y })?;
    let precondition_met = cert.all_but_simple && cert.length == p.dim() + 1;
    let search_result = match nonrevisiting_search(p, g, x, y) {
        Some(path) => SearchOutcome::Found { path },
        None => SearchOutcome::NoNonrevisitingPath,
    };
    let contradiction = precondition_met && matches!(search_result, SearchOutcome::Found { .. });
    let mut certificates = Vec::new();
    for vertices in g.shortest_paths(x, y, usize::MAX) {
        if certificates.len() == CERTIFIED_PATHS {
            break;
        }
        let interior_simple = vertices[1..vertices.len() - 1]
            .iter()
            .all(|&u| p.is_simple_vertex(u));
        if !interior_simple {
            continue;
        }
        let path = PathRecord::new(p, g, vertices)?;
        certificates.push(counting_certificate(p, &path, &cert)?);
    }
    Ok(Lemma1Report {
        spindle: cert,
        dim: p.dim(),
        precondition_met,
        search_result,
        contradiction,
        certificates,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountRow {
    /// Position on the path; `0` is `x`, `k` is `y`.
    pub position: usize,
    pub vertex: usize,
    pub in_x: usize,
    pub in_y: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepCheck {
    /// The step from position `step - 1` to `step`.
    pub step: usize,
    pub departed: Vec<usize>,
    pub arrived: Vec<usize>,
    /// No departed facet contains `y`.
    pub departures_avoid_y: bool,
    /// No arrived facet contains `x`.
    pub arrivals_avoid_x: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountingCertificate {
    pub path: Vec<usize>,
    pub length: usize,
    pub rows: Vec<CountRow>,
    pub steps: Vec<StepCheck>,
    /// Every step departs only from `X \ Y` and arrives only in `Y \ X`.
    pub bookkeeping_holds: bool,
    pub first_violation: Option<usize>,
    pub nonrevisiting: bool,
    /// First position where the vertex lies on no facet of `X`.
    pub x_exhausted_at: Option<usize>,
    /// `Some(d)` when `k > d`: by `u_d` all of `X` is used up, so some facet
    /// must be revisited.
    pub forced_revisit_at: Option<usize>,
    /// `u_j` lies on exactly `d - j` facets of `X` for every interior `j`.
    pub table_matches: bool,
}

pub fn counting_certificate(
    p: &Polytope,
    path: &PathRecord,
    spindle: &SpindleCertificate,
) -> Result<CountingCertificate, VerificationError> {
    if path.start() != spindle.x || path.end() != spindle.y {
        return Err(VerificationError::Endpoints {
            start: path.start(),
            end: path.end(),
            x: spindle.x,
            y: spindle.y,
        });
    }
    let k = path.len();
    let vs = &path.vertices;
    if let Some(&u) = vs[1..k].iter().find(|&&u| !p.is_simple_vertex(u)) {
        return Err(VerificationError::NonsimpleInterior(u));
    }
    let d = p.dim();
    let inc = p.incidence();
    let (x_set, y_set) = (inc.vertex_facets(spindle.x), inc.vertex_facets(spindle.y));
    let count_in = |v: usize, set: &FixedBitSet| inc.vertex_facets(v).intersection(set).count();

    let rows: Vec<CountRow> = vs
        .iter()
        .enumerate()
        .map(|(position, &vertex)| CountRow {
            position,
            vertex,
            in_x: count_in(vertex, x_set),
            in_y: count_in(vertex, y_set),
        })
        .collect();
    let steps: Vec<StepCheck> = (1..=k)
        .map(|s| {
            let (from, to) = (inc.vertex_facets(vs[s - 1]), inc.vertex_facets(vs[s]));
            let departed: Vec<usize> = from.difference(to).collect();
            let arrived: Vec<usize> = to.difference(from).collect();
            StepCheck {
                step: s,
                departures_avoid_y: departed.iter().all(|&f| !y_set.contains(f)),
                arrivals_avoid_x: arrived.iter().all(|&f| !x_set.contains(f)),
                departed,
                arrived,
            }
        })
        .collect();
    let first_violation = steps
        .iter()
        .find(|s| !(s.departures_avoid_y && s.arrivals_avoid_x))
        .map(|s| s.step);
    let table_matches = rows[1..k]
        .iter()
        .all(|r| r.position <= d && r.in_x == d - r.position);
    Ok(CountingCertificate {
        path: vs.clone(),
        length: k,
        x_exhausted_at: rows.iter().find(|r| r.in_x == 0).map(|r| r.position),
        forced_revisit_at: (k > d).then_some(d),
        bookkeeping_holds: first_violation.is_none(),
        first_violation,
        nonrevisiting: revisit_check(p, path).is_nonrevisiting(),
        table_matches,
        rows,
        steps,
    })
}

/// A failed precondition of the edge-survival check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Lemma2Precondition {
    FootIsG,
    YIsSimple,
    YOnFoot,
    YNotOnG,
    NotAnEdge,
    EdgeNotInG,
    WNotOnFoot,
    EdgeIsSimple,
}

impl fmt::Display for Lemma2Precondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Lemma2Precondition::FootIsG => "foot equals G",
            Lemma2Precondition::YIsSimple => "y is simple",
            Lemma2Precondition::YOnFoot => "y on foot",
            Lemma2Precondition::YNotOnG => "y not on G",
            Lemma2Precondition::NotAnEdge => "[y, w] is not an edge",
            Lemma2Precondition::EdgeNotInG => "edge not in G",
            Lemma2Precondition::WNotOnFoot => "w not on foot",
            Lemma2Precondition::EdgeIsSimple => "edge is simple",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeSurvivalReport {
    pub y: usize,
    pub w: usize,
    pub foot: usize,
    pub g: usize,
    pub labels: [String; 4],
    /// Facets through the edge other than `G`.
    pub hat_y: Vec<usize>,
    /// Facets through `w` outside `hat_y`, `G` and the foot; may be empty.
    pub hat_x: Vec<usize>,
    #[serde(serialize_with = "ser::rational")]
    pub epsilon: Rational,
    pub w_image: usize,
    pub y_zero: Option<usize>,
    pub survived: bool,
    pub surviving_edge: Option<(usize, usize)>,
}

/// Checks that the nonsimple edge `[y, w]` in `G` with `w` on the foot gives
/// an edge `[w, y_0]` of the perturbed wedge.
pub fn verify_lemma2(
    p: &Polytope,
    foot: usize,
    g: usize,
    y: usize,
    w: usize,
    epsilon: Epsilon,
) -> Result<EdgeSurvivalReport, VerificationError> {
    for f in [foot, g] {
        if f >= p.facet_count() {
            return Err(VerificationError::FacetOutOfRange(f));
        }
    }
    for v in [y, w] {
        if v >= p.vertex_count() {
            return Err(VerificationError::VertexOutOfRange(v));
        }
    }
    let inc = p.incidence();
    let graph = analysis::graph(p);
    let mut failed = Vec::new();
    if foot == g {
        failed.push(Lemma2Precondition::FootIsG);
    }
    if p.is_simple_vertex(y) {
        failed.push(Lemma2Precondition::YIsSimple);
    }
    if inc.get(foot, y) {
        failed.push(Lemma2Precondition::YOnFoot);
    }
    if !inc.get(g, y) {
        failed.push(Lemma2Precondition::YNotOnG);
    }
    let edge = graph.edge(y, w);
    match edge {
        None => failed.push(Lemma2Precondition::NotAnEdge),
        Some(e) => {
            if !e.facets.contains(&g) {
                failed.push(Lemma2Precondition::EdgeNotInG);
            }
            if e.facets.len() < p.dim() {
                failed.push(Lemma2Precondition::EdgeIsSimple);
            }
        }
    }
    if !inc.get(foot, w) {
        failed.push(Lemma2Precondition::WNotOnFoot);
    }
    if !failed.is_empty() {
        return Err(VerificationError::Lemma2Preconditions(failed));
    }
    let edge = edge.expect("checked above");
    let hat_y: Vec<usize> = edge.facets.iter().copied().filter(|&f| f != g).collect();
    let hat_x: Vec<usize> = inc
        .vertex_facets(w)
        .ones()
        .filter(|f| *f != g && *f != foot && !hat_y.contains(f))
        .collect();

    let pw = constructions::perturbed_wedge(p, foot, g, epsilon)?;
    let w_image = pw.images.vertex_images[w]
        .foot
        .expect("foot vertices are always retained");
    let y_zero = pw.images.vertex_images[y].zero;
    let new_graph = analysis::graph(pw.polytope());
    let surviving_edge = y_zero
        .filter(|&z| new_graph.are_adjacent(w_image, z))
        .map(|z| (w_image, z));
    Ok(EdgeSurvivalReport {
        y,
        w,
        foot,
        g,
        labels: [
            p.vertex_label(y).to_string(),
            p.vertex_label(w).to_string(),
            p.facet_label(foot).to_string(),
            p.facet_label(g).to_string(),
        ],
        hat_y,
        hat_x,
        epsilon: pw.perturbation.epsilon.clone(),
        w_image,
        y_zero,
        survived: surviving_edge.is_some(),
        surviving_edge,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FatePrediction {
    pub vertex: usize,
    pub label: String,
    pub side: Side,
    /// Edges at the vertex whose other end is off `G`.
    pub terminated_edges: Vec<usize>,
    pub predicted: FateKind,
    pub observed: FateKind,
    /// For predicted slides, the edge the vertex was expected to move along.
    pub predicted_neighbor: Option<usize>,
    pub observed_neighbor: Option<usize>,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FateComparisonReport {
    pub foot: usize,
    pub g: usize,
    #[serde(serialize_with = "ser::rational")]
    pub epsilon: Rational,
    pub predictions: Vec<FatePrediction>,
    pub mismatches: usize,
}

impl FateComparisonReport {
    pub fn all_match(&self) -> bool {
        self.mismatches == 0
    }
}

/// Predicts the fate of every vertex of the wedge on `G` from the sign of its
/// last coordinate and the number of its edges leaving `G`, then compares with
/// re-enumeration of the perturbed system.
pub fn verify_vertex_fates(
    p: &Polytope,
    foot: usize,
    g: usize,
    epsilon: Epsilon,
) -> Result<FateComparisonReport, VerificationError> {
    for f in [foot, g] {
        if f >= p.facet_count() {
            return Err(VerificationError::FacetOutOfRange(f));
        }
    }
    if foot == g {
        return Err(ConstructionError::FacetIsFoot.into());
    }
    let w = constructions::wedge(p, foot)?;
    let wp = &w.polytope;
    let g_image = w.facet_map[g][0];
    let graph = analysis::graph(wp);
    let inc = wp.incidence();

    // Predictions first, from the unperturbed wedge alone.
    let mut predictions: Vec<(usize, Vec<usize>, FateKind, Option<usize>)> = Vec::new();
    for v in inc.facet_vertices(g_image).ones() {
        let terminated: Vec<usize> = graph
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&u| !inc.get(g_image, u))
            .collect();
        let last = wp.v().vert(v).last().expect("nonempty vertex");
        let single = (terminated.len() == 1).then(|| terminated[0]);
        let predicted = if last.is_zero() {
            FateKind::Retained
        } else if single.is_some() {
            FateKind::Slid
        } else if last.is_positive() {
            FateKind::Truncated
        } else {
            FateKind::Retained
        };
        let neighbor = if last.is_zero() { None } else { single };
        predictions.push((v, terminated, predicted, neighbor));
    }

    let report = constructions::perturb_facet(
        wp,
        &PerturbationSpec {
            facet: g_image,
            epsilon,
        },
    )?;
    let predictions: Vec<FatePrediction> = predictions
        .into_iter()
        .map(|(v, terminated_edges, predicted, predicted_neighbor)| {
            let entry = &report.fates[v];
            let observed = entry.fate.kind();
            let observed_neighbor = match entry.fate {
                constructions::VertexFate::Slid { neighbor, .. } => Some(neighbor),
                _ => None,
            };
            let matches = predicted == observed
                && (predicted != FateKind::Slid || predicted_neighbor == observed_neighbor);
            FatePrediction {
                vertex: v,
                label: wp.vertex_label(v).to_string(),
                side: entry.side,
                terminated_edges,
                predicted,
                observed,
                predicted_neighbor,
                observed_neighbor,
                matches,
            }
        })
        .collect();
    let mismatches = predictions.iter().filter(|p| !p.matches).count();
    Ok(FateComparisonReport {
        foot,
        g,
        epsilon: report.epsilon,
        predictions,
        mismatches,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathImageReport {
    pub path: Vec<usize>,
    pub original_length: usize,
    /// What is measured: the graph distance from the nearest image of `x` to `y_0`.
    pub measure: &'static str,
    pub x_image: usize,
    pub y_zero: usize,
    pub new_distance: usize,
    pub increased: bool,
    pub claim: ClaimObservation,
}

/// Revisits on a shortest path between the images, against the source path.
/// Observed only; nothing is asserted about it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClaimObservation {
    pub image_path: Vec<usize>,
    pub source_revisits: usize,
    pub image_revisits: usize,
    pub new_revisits: bool,
}

pub fn path_image_length(
    p: &Polytope,
    path: &PathRecord,
    foot: usize,
    g: usize,
    epsilon: Epsilon,
) -> Result<PathImageReport, VerificationError> {
    let (x, y) = (path.start(), path.end());
    let pw = constructions::perturbed_wedge(p, foot, g, epsilon)?;
    let y_zero = pw.images.vertex_images[y]
        .zero
        .ok_or(VerificationError::MissingY0(y))?;
    let out = pw.polytope();
    let graph = analysis::graph(out);
    let dist = graph.distances_from(y_zero);
    let (new_distance, x_image) = pw.images.vertex_images[x]
        .all()
        .into_iter()
        .filter_map(|v| Some((dist[v]?, v)))
        .min()
        .expect("some image of x survives and the graph is connected");
    let image_path = graph
        .shortest_paths(x_image, y_zero, 1)
        .pop()
        .expect("connected graph");
    let image_record = PathRecord::new(out, &graph, image_path.clone())?;
    let source_revisits = revisit_check(p, path).revisits.len();
    let image_revisits = revisit_check(out, &image_record).revisits.len();
    Ok(PathImageReport {
        path: path.vertices.clone(),
        original_length: path.len(),
        measure: "distance from the nearest image of x to y_0",
        x_image,
        y_zero,
        new_distance,
        increased: new_distance > path.len(),
        claim: ClaimObservation {
            image_path,
            source_revisits,
            image_revisits,
            new_revisits: image_revisits > source_revisits,
        },
    })
}

/// The smallest instance with a nonsimple edge: the wedged square pyramid,
/// with `y = y_b`, `w = y^t`, foot `T` and `G` the image of the side `s1`.
#[derive(Debug, Clone)]
pub struct Lemma2Instance {
    pub polytope: Polytope,
    pub foot: usize,
    pub g: usize,
    pub y: usize,
    pub w: usize,
}

pub fn lemma2_instance() -> Lemma2Instance {
    let w = crate::fixtures::wedged_square_pyramid();
    let p = w.polytope;
    Lemma2Instance {
        foot: p.facet_by_label("T").expect("top facet"),
        g: p.facet_by_label("s1").expect("side facet"),
        y: p.vertex_by_label("y_b").expect("base copy of the apex"),
        w: p.vertex_by_label("y^t").expect("top copy of the apex"),
        polytope: p,
    }
}
