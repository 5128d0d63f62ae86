//! Acceptance suite. Prints one PASS/FAIL/SKIP line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polywedge::analysis::{self, find_spindles, nonrevisiting_search, revisit_check, spindle};
use polywedge::constructions::{perturb_facet, two_point_suspension, wedge, Epsilon, PerturbationSpec};
use polywedge::linalg::{dot, int, ratio, Rational};
use polywedge::verification::{
    counting_certificate, lemma2_instance, path_image_length, verify_lemma1, verify_lemma2,
    verify_vertex_fates, SearchOutcome,
};
use polywedge::{
    facets_from_v, fixtures, io, remove_redundant, vertices_from_h, HRep, PathRecord, Polytope,
};

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

type Check = fn() -> Outcome;

fn pass_if(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Outcome::Fail(format!($($msg)*));
        }
    };
}

fn row_set(rows: &[Vec<Rational>]) -> BTreeSet<Vec<Rational>> {
    rows.iter().cloned().collect()
}

fn wedge_fixtures() -> Vec<(&'static str, Polytope, usize)> {
    let pyr = fixtures::square_pyramid();
    let base = pyr.facet_by_label("base").unwrap();
    vec![
        ("triangle", fixtures::simplex(2), 0),
        ("cube3", fixtures::cube(3), 0),
        ("square pyramid", pyr, base),
    ]
}

fn ac1_wedge_counts() -> Outcome {
    let expected = [(4, 4), (7, 12), (6, 6)];
    let mut seen = Vec::new();
    for ((name, p, foot), want) in wedge_fixtures().into_iter().zip(expected) {
        let w = wedge(&p, foot).unwrap();
        let got = (w.polytope.facet_count(), w.polytope.vertex_count());
        let f0 = p.facet_vertex_count(foot).unwrap();
        ensure!(got == want, "{name}: got {got:?}, expected {want:?}");
        ensure!(
            got == (p.facet_count() + 1, 2 * p.vertex_count() - f0),
            "{name}: count formula violated"
        );
        seen.push(format!("{name} -> {got:?}"));
    }
    Outcome::Pass(seen.join(", "))
}

/// Vertices on the foot keep last coordinate 0; every other vertex `x` splits
/// into `(x, s)` and `(x, -s)` where `s` is its slack in the foot inequality.
fn block_vertices(p: &Polytope, foot: usize) -> BTreeSet<Vec<Rational>> {
    let h = p.h().normal(foot);
    let mut out = BTreeSet::new();
    for x in p.v().verts() {
        let slack = -dot(h, x);
        let mut lifted = x.clone();
        lifted.push(slack.clone());
        out.insert(lifted.clone());
        *lifted.last_mut().unwrap() = -slack;
        out.insert(lifted);
    }
    out
}

fn ac2_wedge_block_form() -> Outcome {
    for (name, p, foot) in wedge_fixtures() {
        let w = wedge(&p, foot).unwrap();
        let enumerated = row_set(vertices_from_h(w.polytope.h()).unwrap().verts());
        ensure!(enumerated == block_vertices(&p, foot), "{name}: vertex sets differ");
        ensure!(
            enumerated == row_set(w.polytope.v().verts()),
            "{name}: stored V differs from enumeration"
        );
    }
    Outcome::Pass("triangle, cube3, square pyramid".into())
}

fn ac3_duality_square() -> Outcome {
    let mut checked = 0;
    for (name, p) in [("cube3", fixtures::cube(3)), ("simplex3", fixtures::simplex(3))] {
        for u in 0..p.facet_count() {
            let lhs = wedge(&p, u).unwrap().polytope.polar_dual();
            let rhs = two_point_suspension(&p.polar_dual(), u).unwrap();
            ensure!(
                lhs.incidence().is_isomorphic(rhs.incidence()),
                "{name}, u = {u}: not isomorphic"
            );
            checked += 1;
        }
    }
    Outcome::Pass(format!("{checked} (polytope, facet) pairs"))
}

fn ac4_edge_survives() -> Outcome {
    let inst = lemma2_instance();
    let r = match verify_lemma2(&inst.polytope, inst.foot, inst.g, inst.y, inst.w, Epsilon::Auto) {
        Ok(r) => r,
        Err(e) => return Outcome::Fail(e.to_string()),
    };
    pass_if(
        r.survived,
        format!("edge {:?} at epsilon = {}", r.surviving_edge, r.epsilon),
    )
}

fn fate_fixtures() -> Vec<(String, Polytope)> {
    vec![
        ("square".into(), fixtures::cube(2)),
        ("cube3".into(), fixtures::cube(3)),
        ("square pyramid".into(), fixtures::square_pyramid()),
        ("octahedron".into(), fixtures::cross_polytope(3)),
        ("triangular prism".into(), fixtures::prism(&fixtures::simplex(2))),
    ]
}

fn ac5_vertex_fates() -> Outcome {
    let mut total = 0;
    let mut fixtures_used = 0;
    for (name, p) in fate_fixtures() {
        for foot in 0..p.facet_count() {
            for g in (0..p.facet_count()).filter(|&g| g != foot) {
                let r = match verify_vertex_fates(&p, foot, g, Epsilon::Auto) {
                    Ok(r) => r,
                    Err(e) => return Outcome::Fail(format!("{name} ({foot}, {g}): {e}")),
                };
                ensure!(r.all_match(), "{name} (foot {foot}, G {g}): {} mismatches", r.mismatches);
                total += r.predictions.len();
            }
        }
        fixtures_used += 1;
    }
    pass_if(
        fixtures_used >= 3 && total >= 20,
        format!("{total} G-incident vertices over {fixtures_used} fixtures"),
    )
}

fn ac6_epsilon_stable() -> Outcome {
    let mut cases = 0;
    for (name, p) in fate_fixtures() {
        for foot in 0..p.facet_count() {
            let w = wedge(&p, foot).unwrap();
            for g in (0..p.facet_count()).filter(|&g| g != foot) {
                let g_image = w.facet_map[g][0];
                let at = |epsilon| {
                    perturb_facet(&w.polytope, &PerturbationSpec { facet: g_image, epsilon })
                };
                let chosen = match at(Epsilon::Auto) {
                    Ok(r) => r,
                    Err(e) => return Outcome::Fail(format!("{name} ({foot}, {g}): {e}")),
                };
                for k in [2, 4] {
                    let half = match at(Epsilon::Value(&chosen.epsilon / int(k))) {
                        Ok(r) => r,
                        Err(e) => return Outcome::Fail(format!("{name} ({foot}, {g}), eps/{k}: {e}")),
                    };
                    ensure!(
                        chosen.polytope.incidence().is_isomorphic(half.polytope.incidence()),
                        "{name} (foot {foot}, G {g}): eps/{k} differs"
                    );
                }
                cases += 1;
            }
        }
    }
    Outcome::Pass(format!("{cases} perturbations"))
}

fn ac7_lemma1_machinery() -> Outcome {
    let mut certificates = 0;
    for p in [fixtures::cube(3), fixtures::cube(4)] {
        let g = analysis::graph(&p);
        let (x, y) = (0, p.vertex_count() - 1);
        let Some(s) = spindle(&p, &g, x, y) else {
            return Outcome::Fail(format!("cube{}: antipodes are not a spindle", p.dim()));
        };
        for vertices in g.shortest_paths(x, y, usize::MAX) {
            let path = PathRecord::new(&p, &g, vertices).unwrap();
            let cert = counting_certificate(&p, &path, &s).unwrap();
            ensure!(cert.table_matches, "cube{}: table mismatch on {:?}", p.dim(), path.vertices);
            certificates += 1;
        }
    }
    let mut pairs = 0;
    let mut names = Vec::new();
    for (name, p) in fixtures::corpus() {
        let g = analysis::graph(&p);
        if p.dim() > 4 || p.facet_count() > 10 || !analysis::simplicity(&p, &g).simple {
            continue;
        }
        for x in 0..p.vertex_count() {
            for y in 0..p.vertex_count() {
                let Some(path) = nonrevisiting_search(&p, &g, x, y) else {
                    return Outcome::Fail(format!("{name}: no nonrevisiting path {x} -> {y}"));
                };
                ensure!(revisit_check(&p, &path).is_nonrevisiting(), "{name}: returned path revisits");
                pairs += 1;
            }
        }
        names.push(name);
    }
    Outcome::Pass(format!(
        "{certificates} geodesic certificates; {pairs} pairs over {}",
        names.join(", ")
    ))
}

fn ac8_path_not_increased() -> Outcome {
    let inst = lemma2_instance();
    let p = &inst.polytope;
    let g = analysis::graph(p);
    ensure!(g.are_adjacent(inst.w, inst.y), "[w, y] is not an edge");
    let mut checked = 0;
    for x in (0..p.vertex_count()).filter(|&x| x != inst.y) {
        for mut vertices in g.shortest_paths(x, inst.w, 4) {
            if vertices.contains(&inst.y) {
                continue;
            }
            vertices.push(inst.y);
            let path = PathRecord::new(p, &g, vertices).unwrap();
            let r = match path_image_length(p, &path, inst.foot, inst.g, Epsilon::Auto) {
                Ok(r) => r,
                Err(e) => return Outcome::Fail(e.to_string()),
            };
            ensure!(
                !r.increased,
                "path {:?}: {} -> {}",
                path.vertices,
                r.original_length,
                r.new_distance
            );
            checked += 1;
        }
    }
    pass_if(checked > 0, format!("{checked} paths ending in [w, y]"))
}

fn ac9_external_spindle() -> Outcome {
    let Ok(file) = std::env::var("POLYWEDGE_SPINDLE") else {
        return Outcome::Skip("set POLYWEDGE_SPINDLE to a .poly file to run".into());
    };
    let text = match std::fs::read_to_string(&file) {
        Ok(t) => t,
        Err(e) => return Outcome::Fail(format!("{file}: {e}")),
    };
    let p = match io::load(&text) {
        Ok(p) => p,
        Err(e) => return Outcome::Fail(format!("{file}: {e}")),
    };
    let g = analysis::graph(&p);
    let Some(s) = find_spindles(&p, &g)
        .into_iter()
        .find(|s| s.all_but_simple && s.length == p.dim() + 1)
    else {
        return Outcome::Fail("no all-but-simple spindle of length d + 1".into());
    };
    let r = verify_lemma1(&p, &g, s.x, s.y).unwrap();
    pass_if(
        r.search_result == SearchOutcome::NoNonrevisitingPath,
        format!("spindle ({}, {}) of length {}", s.x, s.y, s.length),
    )
}

fn random_h(rng: &mut ChaCha8Rng) -> HRep {
    let d = rng.random_range(2..=4);
    let mut rows = Vec::new();
    for i in 0..d {
        for sign in [1, -1] {
            let mut r = vec![int(-1)];
            r.extend((0..d).map(|k| if k == i { ratio(sign, rng.random_range(1..=3)) } else { int(0) }));
            rows.push(r);
        }
    }
    while rows.len() < 12 && rng.random_bool(0.8) {
        let h: Vec<i64> = (0..d).map(|_| rng.random_range(-3..=3)).collect();
        if h.iter().all(|&x| x == 0) {
            continue;
        }
        let den = rng.random_range(1..=3);
        let mut r = vec![int(-1)];
        r.extend(h.into_iter().map(|x| ratio(x, den)));
        rows.push(r);
    }
    HRep::new(d, rows).unwrap()
}

fn ac10_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut redundant = 0;
    for case in 0..50 {
        let h = random_h(&mut rng);
        let irredundant = remove_redundant(&h).unwrap();
        redundant += h.len() - irredundant.len();
        let back = facets_from_v(&vertices_from_h(&h).unwrap()).unwrap();
        ensure!(
            row_set(back.normals()) == row_set(irredundant.normals()),
            "case {case} (d = {}, n = {}): facet sets differ",
            h.dim(),
            h.len()
        );
    }
    Outcome::Pass(format!("50 instances, {redundant} redundant rows dropped"))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check, Duration); 10] = [
        ("AC1 wedge counts", ac1_wedge_counts, Duration::from_secs(3)),
        ("AC2 wedge block form", ac2_wedge_block_form, Duration::from_secs(5)),
        ("AC3 duality square", ac3_duality_square, Duration::from_secs(5)),
        ("AC4 nonsimple edge survives", ac4_edge_survives, Duration::from_secs(30)),
        ("AC5 vertex fates", ac5_vertex_fates, Duration::from_secs(30)),
        ("AC6 epsilon stable", ac6_epsilon_stable, Duration::from_secs(30)),
        ("AC7 nonrevisiting machinery", ac7_lemma1_machinery, Duration::from_secs(60)),
        ("AC8 path not increased", ac8_path_not_increased, Duration::from_secs(30)),
        ("AC9 external spindle", ac9_external_spindle, Duration::from_secs(600)),
        ("AC10 enumeration round trip", ac10_round_trip, Duration::from_secs(120)),
    ];
    let mut failed = 0;
    for (name, check, budget) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let (tag, detail) = match outcome {
            Outcome::Pass(d) if elapsed <= budget => ("PASS", d),
            Outcome::Pass(d) => ("FAIL", format!("{d}; over budget of {budget:?}")),
            Outcome::Fail(d) => ("FAIL", d),
            Outcome::Skip(d) => ("SKIP", d),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!("{tag} {name} [{:.2?}]: {detail}", elapsed);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
