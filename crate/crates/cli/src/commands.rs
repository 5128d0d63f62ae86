use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use serde::Serialize;
use serde_json::{json, Map, Value};
use thiserror::Error;

use polywedge::analysis::{self, find_spindles, revisit_check};
use polywedge::constructions::{self, Epsilon, FateKind, PerturbationReport, PerturbationSpec, VertexFate};
use polywedge::io::{self, PolyFile};
use polywedge::verification::{self, SearchOutcome, VerificationError};
use polywedge::{fixtures, parse_rational, PathRecord, Polytope};

use crate::Format;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Load {
        path: PathBuf,
        source: io::LoadError,
    },
    #[error("no {kind} {name:?}: not a label or an index below {count}")]
    Reference {
        kind: &'static str,
        name: String,
        count: usize,
    },
    #[error("bad --eps {0:?}: expected a positive rational or `auto`")]
    Epsilon(String),
    #[error("unknown fixture {0:?}; see `polywedge fixture --list`")]
    Fixture(String),
    #[error(transparent)]
    Construction(#[from] constructions::ConstructionError),
    #[error(transparent)]
    Verification(#[from] VerificationError),
    #[error(transparent)]
    Path(#[from] analysis::PathError),
}

/// A finished command: the report plus an optional polytope to write.
pub struct Outcome {
    command: &'static str,
    input: Map<String, Value>,
    result: Value,
    violations: Vec<String>,
    text: String,
    polytope: Option<Polytope>,
}

impl Outcome {
    fn new(command: &'static str, input: Map<String, Value>) -> Self {
        Self {
            command,
            input,
            result: Value::Null,
            violations: Vec::new(),
            text: String::new(),
            polytope: None,
        }
    }

    pub fn emit(mut self, format: Format, output: Option<&Path>) -> Result<ExitCode, CliError> {
        if let Some(p) = &self.polytope {
            let poly = io::write_poly(&PolyFile::from_polytope(p));
            match output {
                Some(path) => {
                    std::fs::write(path, &poly).map_err(|source| CliError::Write {
                        path: path.to_path_buf(),
                        source,
                    })?;
                    self.input
                        .insert("output".into(), json!(path.display().to_string()));
                }
                None => {
                    if let Value::Object(m) = &mut self.result {
                        m.insert("poly".into(), json!(poly));
                    }
                    self.text.push_str(&poly);
                }
            }
        }
        let rendered = match format {
            Format::Json => {
                let report = json!({
                    "command": self.command,
                    "input": self.input,
                    "result": self.result,
                    "violations": self.violations,
                });
                serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
            }
            Format::Text => {
                let mut t = self.text;
                for v in &self.violations {
                    let _ = writeln!(t, "VIOLATION: {v}");
                }
                t
            }
        };
        let mut stdout = std::io::stdout().lock();
        match stdout.write_all(rendered.as_bytes()).and_then(|_| stdout.flush()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                return Err(CliError::Write {
                    path: PathBuf::from("<stdout>"),
                    source: e,
                })
            }
            _ => {}
        }
        Ok(if self.violations.is_empty() {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(1)
        })
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report serializes")
}

fn load(path: &Path) -> Result<Polytope, CliError> {
    let mut text = String::new();
    let read = if path == Path::new("-") {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    read.map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    io::load(&text).map_err(|source| CliError::Load {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads the input and records its validation problems as violations.
fn start(command: &'static str, path: &Path) -> Result<(Polytope, Outcome), CliError> {
    let p = load(path)?;
    let mut input = Map::new();
    input.insert("file".into(), json!(path.display().to_string()));
    let mut out = Outcome::new(command, input);
    out.violations
        .extend(p.validate().violations.iter().map(|v| format!("input: {v}")));
    Ok((p, out))
}

fn resolve(kind: &'static str, name: &str, labels: &[String]) -> Result<usize, CliError> {
    if let Some(i) = labels.iter().position(|l| l == name) {
        return Ok(i);
    }
    match name.parse::<usize>() {
        Ok(i) if i < labels.len() => Ok(i),
        _ => Err(CliError::Reference {
            kind,
            name: name.to_string(),
            count: labels.len(),
        }),
    }
}

fn facet(p: &Polytope, name: &str) -> Result<usize, CliError> {
    resolve("facet", name, p.facet_labels())
}

fn vertex(p: &Polytope, name: &str) -> Result<usize, CliError> {
    resolve("vertex", name, p.vertex_labels())
}

fn epsilon(text: &str) -> Result<Epsilon, CliError> {
    if text == "auto" {
        return Ok(Epsilon::Auto);
    }
    parse_rational(text)
        .map(Epsilon::Value)
        .map_err(|_| CliError::Epsilon(text.to_string()))
}

fn summary(p: &Polytope) -> Value {
    json!({
        "dim": p.dim(),
        "facets": p.facet_count(),
        "vertices": p.vertex_count(),
        "facet_labels": p.facet_labels(),
        "vertex_labels": p.vertex_labels(),
    })
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
        b.extend(e);
    }
    base
}

pub fn enumerate(path: &Path) -> Result<Outcome, CliError> {
    let (p, mut out) = start("enumerate", path)?;
    out.result = summary(&p);
    out.text = format!(
        "dimension {}, {} facets, {} vertices\n",
        p.dim(),
        p.facet_count(),
        p.vertex_count()
    );
    out.polytope = Some(p);
    Ok(out)
}

pub fn analyze(path: &Path) -> Result<Outcome, CliError> {
    let (p, mut out) = start("analyze", path)?;
    let g = analysis::graph(&p);
    let simplicity = analysis::simplicity(&p, &g);
    let vl = |j: usize| p.vertex_label(j).to_string();
    let edges: Vec<[String; 2]> = g.edges().iter().map(|e| [vl(e.a), vl(e.b)]).collect();
    let spindles: Vec<Value> = find_spindles(&p, &g)
        .iter()
        .map(|s| {
            json!({
                "x": vl(s.x), "y": vl(s.y), "length": s.length,
                "n1": s.n1, "n2": s.n2, "all_but_simple": s.all_but_simple,
            })
        })
        .collect();
    let nonsimple_vertices: Vec<String> =
        simplicity.nonsimple_vertices().into_iter().map(vl).collect();
    let nonsimple_edges: Vec<[String; 2]> = simplicity
        .nonsimple_edges()
        .into_iter()
        .map(|(a, b)| [vl(a), vl(b)])
        .collect();
    let diameter = g.diameter();
    out.result = merge(
        summary(&p),
        json!({
            "edges": edges,
            "diameter": diameter,
            "hirsch_bound": p.facet_count() - p.dim(),
            "simple": simplicity.simple,
            "nonsimple_vertices": nonsimple_vertices,
            "nonsimple_edges": nonsimple_edges,
            "spindles": spindles,
        }),
    );
    let mut t = String::new();
    let _ = writeln!(
        t,
        "dimension {}, {} facets, {} vertices, {} edges",
        p.dim(),
        p.facet_count(),
        p.vertex_count(),
        edges.len()
    );
    match diameter {
        Some(d) => {
            let _ = writeln!(t, "diameter {d} (n - d = {})", p.facet_count() - p.dim());
        }
        None => t.push_str("graph is disconnected\n"),
    }
    let _ = writeln!(t, "simple: {}", if simplicity.simple { "yes" } else { "no" });
    if !nonsimple_vertices.is_empty() {
        let _ = writeln!(t, "nonsimple vertices: {}", nonsimple_vertices.join(" "));
    }
    for s in out.result["spindles"].as_array().into_iter().flatten() {
        let _ = writeln!(
            t,
            "spindle {} {} length {}{}",
            s["x"].as_str().unwrap_or_default(),
            s["y"].as_str().unwrap_or_default(),
            s["length"],
            if s["all_but_simple"] == json!(true) { " all-but-simple" } else { "" }
        );
    }
    out.text = t;
    Ok(out)
}

pub fn wedge(path: &Path, foot: &str) -> Result<Outcome, CliError> {
    let (p, mut out) = start("wedge", path)?;
    let f = facet(&p, foot)?;
    out.input.insert("foot".into(), json!(p.facet_label(f)));
    let w = constructions::wedge(&p, f)?;
    let wp = &w.polytope;
    out.result = merge(
        summary(wp),
        json!({
            "foot": wp.facet_label(w.foot),
            "top_facet": wp.facet_label(w.top_facet),
            "base_facet": wp.facet_label(w.base_facet),
            "vertex_map": to_value(&w.vertex_map),
            "facet_map": w.facet_map,
        }),
    );
    out.text = format!(
        "wedge over {}: dimension {}, {} facets, {} vertices\n",
        p.facet_label(f),
        wp.dim(),
        wp.facet_count(),
        wp.vertex_count()
    );
    out.polytope = Some(w.polytope);
    Ok(out)
}

fn fate_text(r: &PerturbationReport) -> String {
    let out = &r.polytope;
    let mut t = format!(
        "epsilon {}: {} retained, {} slid, {} truncated, {} new vertices\n",
        r.epsilon,
        r.count(FateKind::Retained),
        r.count(FateKind::Slid),
        r.count(FateKind::Truncated),
        r.new_vertices.len()
    );
    for f in &r.fates {
        let fate = match &f.fate {
            VertexFate::Retained { image } => format!("retained as {}", out.vertex_label(*image)),
            VertexFate::Slid { image, .. } => format!("slid to {}", out.vertex_label(*image)),
            VertexFate::Truncated { new_vertices } => {
                let names: Vec<&str> = new_vertices.iter().map(|&k| out.vertex_label(k)).collect();
                format!("truncated into {}", names.join(" "))
            }
        };
        let _ = writeln!(t, "  {} ({:?}): {fate}", f.label, f.side);
    }
    t
}

pub fn perturb(path: &Path, facet_ref: &str, eps: &str) -> Result<Outcome, CliError> {
    let (p, mut out) = start("perturb", path)?;
    let g = facet(&p, facet_ref)?;
    out.input.insert("facet".into(), json!(p.facet_label(g)));
    out.input.insert("eps".into(), json!(eps));
    let r = constructions::perturb_facet(
        &p,
        &PerturbationSpec {
            facet: g,
            epsilon: epsilon(eps)?,
        },
    )?;
    out.result = merge(summary(&r.polytope), to_value(&r));
    out.text = fate_text(&r);
    out.polytope = Some(r.polytope);
    Ok(out)
}

pub fn pwedge(path: &Path, foot: &str, facet_ref: &str, eps: &str) -> Result<Outcome, CliError> {
    let (p, mut out) = start("pwedge", path)?;
    let (f, g) = (facet(&p, foot)?, facet(&p, facet_ref)?);
    out.input.insert("foot".into(), json!(p.facet_label(f)));
    out.input.insert("facet".into(), json!(p.facet_label(g)));
    out.input.insert("eps".into(), json!(eps));
    let pw = constructions::perturbed_wedge(&p, f, g, epsilon(eps)?)?;
    out.result = merge(summary(pw.polytope()), to_value(&pw));
    let mut t = format!(
        "perturbed wedge over {} at {}: dimension {}, {} facets, {} vertices\n",
        p.facet_label(f),
        p.facet_label(g),
        pw.polytope().dim(),
        pw.polytope().facet_count(),
        pw.polytope().vertex_count()
    );
    for flag in &pw.flags {
        let _ = writeln!(t, "note: {flag}");
    }
    t.push_str(&fate_text(&pw.perturbation));
    out.text = t;
    out.polytope = Some(pw.perturbation.polytope);
    Ok(out)
}

pub fn lemma1(path: &Path, x: &str, y: &str) -> Result<Outcome, CliError> {
    let (p, mut out) = start("verify lemma1", path)?;
    let (x, y) = (vertex(&p, x)?, vertex(&p, y)?);
    out.input.insert("x".into(), json!(p.vertex_label(x)));
    out.input.insert("y".into(), json!(p.vertex_label(y)));
    let g = analysis::graph(&p);
    let r = verification::verify_lemma1(&p, &g, x, y)?;
    out.result = to_value(&r);
    let mut t = format!(
        "spindle of length {} in dimension {}; all-but-simple: {}; preconditions met: {}\n",
        r.spindle.length, r.dim, r.spindle.all_but_simple, r.precondition_met
    );
    match &r.search_result {
        SearchOutcome::NoNonrevisitingPath => t.push_str("no nonrevisiting path\n"),
        SearchOutcome::Found { path } => {
            let names: Vec<&str> = path.vertices.iter().map(|&v| p.vertex_label(v)).collect();
            let _ = writeln!(t, "nonrevisiting path: {}", names.join(" "));
        }
    }
    let _ = writeln!(t, "{} counting certificates", r.certificates.len());
    out.text = t;
    if r.contradiction {
        out.violations
            .push("nonrevisiting path found on an all-but-simple spindle of length d + 1".into());
    }
    Ok(out)
}

pub fn lemma2(
    path: &Path,
    foot: &str,
    facet_ref: &str,
    y: &str,
    w: &str,
    eps: &str,
) -> Result<Outcome, CliError> {
    let (p, mut out) = start("verify lemma2", path)?;
    let (f, g) = (facet(&p, foot)?, facet(&p, facet_ref)?);
    let (y, w) = (vertex(&p, y)?, vertex(&p, w)?);
    out.input.insert("foot".into(), json!(p.facet_label(f)));
    out.input.insert("facet".into(), json!(p.facet_label(g)));
    out.input.insert("y".into(), json!(p.vertex_label(y)));
    out.input.insert("w".into(), json!(p.vertex_label(w)));
    out.input.insert("eps".into(), json!(eps));
    match verification::verify_lemma2(&p, f, g, y, w, epsilon(eps)?) {
        Ok(r) => {
            out.text = format!(
                "epsilon {}: edge [w, y_0] {}\n",
                r.epsilon,
                if r.survived { "survived" } else { "did not survive" }
            );
            if !r.survived {
                out.violations.push("edge [w, y_0] missing from the perturbed wedge".into());
            }
            out.result = to_value(&r);
        }
        Err(VerificationError::Lemma2Preconditions(failed)) => {
            out.result = json!({ "survived": null, "failed_preconditions": to_value(&failed) });
            for pre in failed {
                out.violations.push(format!("precondition: {pre}"));
            }
            out.text = "preconditions not met\n".into();
        }
        Err(e) => return Err(e.into()),
    }
    Ok(out)
}

pub fn fates(path: &Path, foot: &str, facet_ref: &str, eps: &str) -> Result<Outcome, CliError> {
    let (p, mut out) = start("verify fates", path)?;
    let (f, g) = (facet(&p, foot)?, facet(&p, facet_ref)?);
    out.input.insert("foot".into(), json!(p.facet_label(f)));
    out.input.insert("facet".into(), json!(p.facet_label(g)));
    out.input.insert("eps".into(), json!(eps));
    let r = verification::verify_vertex_fates(&p, f, g, epsilon(eps)?)?;
    let mut t = format!(
        "epsilon {}: {} of {} predictions match\n",
        r.epsilon,
        r.predictions.len() - r.mismatches,
        r.predictions.len()
    );
    for pr in &r.predictions {
        let _ = writeln!(
            t,
            "  {}: predicted {:?}, observed {:?}{}",
            pr.label,
            pr.predicted,
            pr.observed,
            if pr.matches { "" } else { "  MISMATCH" }
        );
        if !pr.matches {
            out.violations.push(format!(
                "{}: predicted {:?}, observed {:?}",
                pr.label, pr.predicted, pr.observed
            ));
        }
    }
    out.text = t;
    out.result = to_value(&r);
    Ok(out)
}

pub fn path_image(
    path: &Path,
    foot: &str,
    facet_ref: &str,
    vertices: &[String],
    eps: &str,
) -> Result<Outcome, CliError> {
    let (p, mut out) = start("verify path-image", path)?;
    let (f, g) = (facet(&p, foot)?, facet(&p, facet_ref)?);
    let vertices = vertices
        .iter()
        .map(|v| vertex(&p, v))
        .collect::<Result<Vec<_>, _>>()?;
    out.input.insert("foot".into(), json!(p.facet_label(f)));
    out.input.insert("facet".into(), json!(p.facet_label(g)));
    out.input.insert(
        "path".into(),
        json!(vertices.iter().map(|&v| p.vertex_label(v)).collect::<Vec<_>>()),
    );
    out.input.insert("eps".into(), json!(eps));
    let graph = analysis::graph(&p);
    let record = PathRecord::new(&p, &graph, vertices)?;
    let revisits = revisit_check(&p, &record);
    let r = verification::path_image_length(&p, &record, f, g, epsilon(eps)?)?;
    out.text = format!(
        "path length {} ({}revisiting); image distance {}\n",
        r.original_length,
        if revisits.is_nonrevisiting() { "non" } else { "" },
        r.new_distance
    );
    if r.increased {
        out.violations.push(format!(
            "image distance {} exceeds the original length {}",
            r.new_distance, r.original_length
        ));
    }
    out.result = merge(to_value(&r), json!({ "source_revisits": to_value(&revisits) }));
    Ok(out)
}

pub fn fixture(name: Option<&str>, list: bool, output_given: bool) -> Result<Outcome, CliError> {
    let mut out = Outcome::new("fixture", Map::new());
    if list {
        let names: Vec<String> = fixtures::corpus().into_iter().map(|(n, _)| n).collect();
        out.text = names.iter().map(|n| format!("{n}\n")).collect();
        out.result = json!({ "fixtures": names, "sized": ["simplex<d>", "cube<d>", "cross<d>"] });
        return Ok(out);
    }
    let name = name.unwrap_or_default();
    out.input.insert("name".into(), json!(name));
    let p = fixtures::by_name(name).ok_or_else(|| CliError::Fixture(name.to_string()))?;
    out.result = summary(&p);
    if output_given {
        out.text = format!(
            "{name}: dimension {}, {} facets, {} vertices\n",
            p.dim(),
            p.facet_count(),
            p.vertex_count()
        );
    }
    out.polytope = Some(p);
    Ok(out)
}
