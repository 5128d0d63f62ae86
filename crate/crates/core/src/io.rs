//! Line-oriented text format for polytopes in canonical embedding.
//!
//! ```text
//! POLY 1
//! d 2
//! H 3
//! -1 -2 1
//! -1 1 -2
//! -1 1 1
//! V 3
//! 1 1 0
//! 1 0 1
//! 1 -1 -1
//! LABELS F f0 f1 f2
//! LABELS V v0 v1 v2
//! ```
//!
//! `#` starts a comment; blank lines are ignored. At least one of `H`, `V` is
//! required.

use std::fmt::Write as _;

use thiserror::Error;

use crate::linalg::{parse_rational, Rational};
use crate::polytope::{HRep, Polytope, PolytopeError, VRep};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("neither an H nor a V block is present")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoadError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyFile {
    pub version: u32,
    pub dim: usize,
    pub h: Option<Vec<Vec<Rational>>>,
    pub v: Option<Vec<Vec<Rational>>>,
    pub facet_labels: Option<Vec<String>>,
    pub vertex_labels: Option<Vec<String>>,
}

impl PolyFile {
    /// Both representations and both label lists.
    pub fn from_polytope(p: &Polytope) -> Self {
        Self {
            version: FORMAT_VERSION,
            dim: p.dim(),
            h: Some(p.h().normals().to_vec()),
            v: Some(p.v().verts().to_vec()),
            facet_labels: Some(p.facet_labels().to_vec()),
            vertex_labels: Some(p.vertex_labels().to_vec()),
        }
    }

    /// Builds the polytope, computing whichever representation is missing.
    /// When `V` is computed, labels for it are only accepted if `H` is given too.
    pub fn to_polytope(&self) -> Result<Polytope, PolytopeError> {
        let p = match (&self.h, &self.v) {
            (Some(h), Some(v)) => Polytope::new(
                HRep::new(self.dim, h.clone())?,
                VRep::new(self.dim, v.clone())?,
            )?,
            (Some(h), None) => Polytope::from_h(HRep::new(self.dim, h.clone())?)?,
            (None, Some(v)) => Polytope::from_v(VRep::new(self.dim, v.clone())?)?,
            (None, None) => unreachable!("parser rejects files without blocks"),
        };
        let facet_labels = self.h.as_ref().and(self.facet_labels.clone());
        let vertex_labels = self.v.as_ref().and(self.vertex_labels.clone());
        p.with_labels(facet_labels, vertex_labels)
    }
}

pub fn load(text: &str) -> Result<Polytope, LoadError> {
    Ok(parse_poly(text)?.to_polytope()?)
}

/// `(column, token)` pairs of one line.
type Tokens<'a> = Vec<(usize, &'a str)>;

struct Lines<'a> {
    inner: std::iter::Peekable<std::vec::IntoIter<(usize, Tokens<'a>)>>,
}

/// Splits into non-empty lines of `(column, token)` pairs, comments removed.
fn tokenize(text: &str) -> Lines<'_> {
    let lines: Vec<(usize, Vec<(usize, &str)>)> = text
        .lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let content = raw.split('#').next().unwrap_or("");
            let mut tokens = Vec::new();
            let mut start = None;
            for (k, ch) in content.char_indices() {
                match (ch.is_whitespace(), start) {
                    (false, None) => start = Some(k),
                    (true, Some(s)) => {
                        tokens.push((s + 1, &content[s..k]));
                        start = None;
                    }
                    _ => {}
                }
            }
            if let Some(s) = start {
                tokens.push((s + 1, &content[s..]));
            }
            (!tokens.is_empty()).then_some((i + 1, tokens))
        })
        .collect();
    Lines {
        inner: lines.into_iter().peekable(),
    }
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn expect_keyword<'a>(
    lines: &mut Lines<'a>,
    keyword: &str,
    last_line: usize,
) -> Result<(usize, Tokens<'a>), ParseError> {
    let (line, tokens) = lines
        .inner
        .next()
        .ok_or_else(|| syntax(last_line + 1, 1, format!("expected `{keyword}`")))?;
    if tokens[0].1 != keyword {
        return Err(syntax(
            line,
            tokens[0].0,
            format!("expected `{keyword}`, found `{}`", tokens[0].1),
        ));
    }
    Ok((line, tokens))
}

fn single_number(line: usize, tokens: &[(usize, &str)], what: &str) -> Result<usize, ParseError> {
    if tokens.len() != 2 {
        let column = tokens.get(2).map_or(tokens[0].0, |t| t.0);
        return Err(syntax(line, column, format!("expected `{} <{what}>`", tokens[0].1)));
    }
    tokens[1]
        .1
        .parse()
        .map_err(|_| syntax(line, tokens[1].0, format!("invalid {what} `{}`", tokens[1].1)))
}

/// Strict parse; every error carries a 1-based line and column.
pub fn parse_poly(text: &str) -> Result<PolyFile, ParseError> {
    let mut lines = tokenize(text);
    let (line, tokens) = expect_keyword(&mut lines, "POLY", 0)?;
    let version = single_number(line, &tokens, "version")?;
    if version != FORMAT_VERSION as usize {
        return Err(syntax(line, tokens[1].0, format!("unsupported version {version}")));
    }
    let (line, tokens) = expect_keyword(&mut lines, "d", line)?;
    let dim = single_number(line, &tokens, "dimension")?;
    if dim == 0 {
        return Err(syntax(line, tokens[1].0, "dimension must be positive"));
    }
    let mut file = PolyFile {
        version: FORMAT_VERSION,
        dim,
        h: None,
        v: None,
        facet_labels: None,
        vertex_labels: None,
    };
    while let Some((line, tokens)) = lines.inner.next() {
        let mut last = line;
        match tokens[0].1 {
            block @ ("H" | "V") => {
                let present = if block == "H" { &file.h } else { &file.v };
                if present.is_some() {
                    return Err(syntax(line, tokens[0].0, format!("duplicate {block} block")));
                }
                if file.facet_labels.is_some() || file.vertex_labels.is_some() {
                    return Err(syntax(line, tokens[0].0, "blocks must precede LABELS"));
                }
                if block == "H" && file.v.is_some() {
                    return Err(syntax(line, tokens[0].0, "H block must precede V block"));
                }
                let count = single_number(line, &tokens, "row count")?;
                let (lead, kind) = if block == "H" {
                    (-1, "H row")
                } else {
                    (1, "V row")
                };
                let mut rows = Vec::with_capacity(count);
                for r in 0..count {
                    let (row_line, row_tokens) = lines.inner.next().ok_or_else(|| {
                        syntax(last + 1, 1, format!("{block} block ends after {r} of {count} rows"))
                    })?;
                    last = row_line;
                    if row_tokens.len() != dim + 1 {
                        return Err(syntax(
                            row_line,
                            row_tokens[0].0,
                            format!("{kind} {r} has {} entries, expected {}", row_tokens.len(), dim + 1),
                        ));
                    }
                    let row = row_tokens
                        .iter()
                        .map(|&(col, tok)| {
                            parse_rational(tok).map_err(|e| syntax(row_line, col, e.to_string()))
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    if row[0] != Rational::from_integer(lead.into()) {
                        return Err(syntax(
                            row_line,
                            row_tokens[0].0,
                            format!("{kind} {r} must start with {lead}, found {}", row[0]),
                        ));
                    }
                    rows.push(row);
                }
                if block == "H" {
                    file.h = Some(rows);
                } else {
                    file.v = Some(rows);
                }
            }
            "LABELS" => {
                let Some(&(col, which)) = tokens.get(1) else {
                    return Err(syntax(line, tokens[0].0, "expected `LABELS F` or `LABELS V`"));
                };
                let (slot, expected) = match which {
                    "F" => (&mut file.facet_labels, file.h.as_ref().map(Vec::len)),
                    "V" => (&mut file.vertex_labels, file.v.as_ref().map(Vec::len)),
                    other => return Err(syntax(line, col, format!("unknown label kind `{other}`"))),
                };
                if slot.is_some() {
                    return Err(syntax(line, tokens[0].0, format!("duplicate LABELS {which}")));
                }
                let labels: Vec<String> = tokens[2..].iter().map(|t| t.1.to_string()).collect();
                match expected {
                    None => {
                        return Err(syntax(
                            line,
                            col,
                            format!("LABELS {which} without a matching block"),
                        ))
                    }
                    Some(n) if n != labels.len() => {
                        return Err(syntax(
                            line,
                            col,
                            format!("{} labels for {n} rows", labels.len()),
                        ))
                    }
                    _ => {}
                }
                *slot = Some(labels);
            }
            other => return Err(syntax(line, tokens[0].0, format!("unexpected `{other}`"))),
        }
    }
    if file.h.is_none() && file.v.is_none() {
        return Err(ParseError::Empty);
    }
    Ok(file)
}

/// Canonical text: blocks in the order H, V, LABELS F, LABELS V.
pub fn write_poly(file: &PolyFile) -> String {
    let mut out = String::new();
    writeln!(out, "POLY {}", file.version).unwrap();
    writeln!(out, "d {}", file.dim).unwrap();
    for (name, block) in [("H", &file.h), ("V", &file.v)] {
        if let Some(rows) = block {
            writeln!(out, "{name} {}", rows.len()).unwrap();
            for row in rows {
                let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
                writeln!(out, "{}", cells.join(" ")).unwrap();
            }
        }
    }
    for (name, labels) in [("F", &file.facet_labels), ("V", &file.vertex_labels)] {
        if let Some(labels) = labels {
            writeln!(out, "LABELS {name} {}", labels.join(" ")).unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    const SQUARE: &str = "\
POLY 1
# the square [-1, 1]^2
d 2
H 4
-1 1 0
-1 -1 0
-1 0 1   # top
-1 0 -1
";

    #[test]
    fn parse_h_only() {
        let f = parse_poly(SQUARE).unwrap();
        assert_eq!(f.dim, 2);
        assert_eq!(f.h.as_ref().unwrap().len(), 4);
        assert!(f.v.is_none());
        let p = f.to_polytope().unwrap();
        assert_eq!(p.vertex_count(), 4);
    }

    #[test]
    fn cube_file_loads() {
        let text = write_poly(&PolyFile {
            v: None,
            vertex_labels: None,
            ..PolyFile::from_polytope(&fixtures::cube(3))
        });
        let p = load(&text).unwrap();
        assert_eq!((p.facet_count(), p.vertex_count()), (6, 8));
        assert_eq!(p.facet_label(0), "p1");
    }

    #[test]
    fn round_trip_on_fixtures() {
        for (name, p) in fixtures::corpus() {
            let file = PolyFile::from_polytope(&p);
            let text = write_poly(&file);
            let back = parse_poly(&text).unwrap();
            assert_eq!(back, file, "{name}");
            assert_eq!(write_poly(&back), text);
            assert_eq!(back.to_polytope().unwrap(), p, "{name}");
        }
    }

    #[test]
    fn rationals() {
        let f = parse_poly("POLY 1\nd 1\nV 2\n1 -3/7\n1 5/2\n").unwrap();
        assert_eq!(f.v.unwrap()[0][1], crate::linalg::ratio(-3, 7));
    }

    fn error_at(text: &str) -> (usize, usize, String) {
        match parse_poly(text).unwrap_err() {
            ParseError::Syntax {
                line,
                column,
                message,
            } => (line, column, message),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn h_row_with_wrong_lead_names_the_row() {
        let (line, column, message) = error_at("POLY 1\nd 1\nH 2\n-1 1\n1 -1\n");
        assert_eq!((line, column), (5, 1));
        assert!(message.contains("H row 1"), "{message}");
    }

    #[test]
    fn malformed_rational_has_position() {
        let (line, column, _) = error_at("POLY 1\nd 2\nV 1\n1  0.5 1\n");
        assert_eq!((line, column), (4, 4));
        let (_, _, m) = error_at("POLY 1\nd 1\nV 1\n1 1/0\n");
        assert!(!m.is_empty());
    }

    #[test]
    fn structural_errors() {
        assert_eq!(parse_poly("POLY 1\nd 2\n"), Err(ParseError::Empty));
        assert_eq!(error_at("POLY 2\nd 2\n").0, 1);
        assert_eq!(error_at("d 2\n").0, 1);
        assert_eq!(error_at("POLY 1\nd 1\nH 3\n-1 1\n").0, 5);
        assert_eq!(error_at("POLY 1\nd 1\nH 1\n-1 1 0\n").0, 4);
        assert!(error_at("POLY 1\nd 1\nV 2\n1 1\n1 -1\nLABELS F a b\n").2.contains("without"));
        assert!(error_at("POLY 1\nd 1\nV 2\n1 1\n1 -1\nLABELS V a\n").2.contains("1 labels"));
        assert!(error_at("POLY 1\nd 1\nV 1\n1 1\nQ\n").2.contains("unexpected"));
    }

    #[test]
    fn labels_are_applied() {
        let p = load("POLY 1\nd 1\nV 2\n1 1\n1 -1\nLABELS V hi lo\n").unwrap();
        assert_eq!(p.vertex_by_label("lo"), Some(1));
        assert_eq!(p.facet_count(), 2);
    }
}
