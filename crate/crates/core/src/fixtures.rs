//! Small labelled polytopes in canonical embedding, used by tests, benches
//! and the `fixture` CLI command.

use crate::constructions::{self, WedgeResult};
use crate::linalg::{int, Rational};
use crate::polytope::{HRep, Polytope, VRep};

fn build(
    dim: usize,
    normals: Vec<Vec<Rational>>,
    verts: Vec<Vec<Rational>>,
    facet_labels: Vec<String>,
    vertex_labels: Vec<String>,
) -> Polytope {
    let h = HRep::new(dim, normals).expect("fixture normals are canonical");
    let v = VRep::new(dim, verts).expect("fixture vertices are homogenized");
    Polytope::new(h, v)
        .and_then(|p| p.with_labels(Some(facet_labels), Some(vertex_labels)))
        .expect("fixture is a valid polytope")
}

fn homogenize(lead: i64, x: impl IntoIterator<Item = Rational>) -> Vec<Rational> {
    std::iter::once(int(lead)).chain(x).collect()
}

/// The `d`-simplex with vertices `e_1, ..., e_d, -(1, ..., 1)`. Facet `fk` is
/// the one opposite vertex `vk`.
pub fn simplex(d: usize) -> Polytope {
    assert!(d >= 1);
    let di = d as i64;
    let mut verts = Vec::with_capacity(d + 1);
    let mut normals = Vec::with_capacity(d + 1);
    for k in 0..d {
        verts.push(homogenize(1, (0..d).map(|i| int((i == k) as i64))));
        normals.push(homogenize(-1, (0..d).map(|i| if i == k { int(-di) } else { int(1) })));
    }
    verts.push(homogenize(1, (0..d).map(|_| int(-1))));
    normals.push(homogenize(-1, (0..d).map(|_| int(1))));
    build(
        d,
        normals,
        verts,
        (0..=d).map(|k| format!("f{k}")).collect(),
        (0..=d).map(|k| format!("v{k}")).collect(),
    )
}

/// `[-1, 1]^d`. Facets `p{i}` / `n{i}` are `x_i = 1` / `x_i = -1`; vertex
/// `v` + bits has bit `i` set iff `x_i = 1`, listed in lexicographic order.
pub fn cube(d: usize) -> Polytope {
    assert!(d >= 1);
    let mut normals = Vec::with_capacity(2 * d);
    let mut facet_labels = Vec::with_capacity(2 * d);
    for i in 0..d {
        for (s, name) in [(1, "p"), (-1, "n")] {
            normals.push(homogenize(-1, (0..d).map(|k| int(if k == i { s } else { 0 }))));
            facet_labels.push(format!("{name}{}", i + 1));
        }
    }
    let mut verts = Vec::with_capacity(1 << d);
    let mut vertex_labels = Vec::with_capacity(1 << d);
    for mask in 0..1usize << d {
        // most significant bit is coordinate 1, so the order is lexicographic
        let bit = |i: usize| mask >> (d - 1 - i) & 1 == 1;
        verts.push(homogenize(1, (0..d).map(|i| int(if bit(i) { 1 } else { -1 }))));
        vertex_labels.push(format!(
            "v{}",
            (0..d).map(|i| if bit(i) { '1' } else { '0' }).collect::<String>()
        ));
    }
    build(d, normals, verts, facet_labels, vertex_labels)
}

/// Convex hull of `±e_i`.
pub fn cross_polytope(d: usize) -> Polytope {
    cube(d).polar_dual()
}

/// Pyramid over the square `[-1, 1]^2 x {-1}` with apex `y = (0, 0, 1)`.
/// Facets `base`, `s1..s4`; base vertices `b1..b4` counterclockwise.
pub fn square_pyramid() -> Polytope {
    let normals = vec![
        vec![int(-1), int(0), int(0), int(-1)],
        vec![int(-1), int(2), int(0), int(1)],
        vec![int(-1), int(0), int(2), int(1)],
        vec![int(-1), int(-2), int(0), int(1)],
        vec![int(-1), int(0), int(-2), int(1)],
    ];
    let verts = vec![
        vec![int(1), int(1), int(1), int(-1)],
        vec![int(1), int(-1), int(1), int(-1)],
        vec![int(1), int(-1), int(-1), int(-1)],
        vec![int(1), int(1), int(-1), int(-1)],
        vec![int(1), int(0), int(0), int(1)],
    ];
    build(
        3,
        normals,
        verts,
        ["base", "s1", "s2", "s3", "s4"].map(String::from).to_vec(),
        ["b1", "b2", "b3", "b4", "y"].map(String::from).to_vec(),
    )
}

/// `p x [-1, 1]` in dimension `d`, with facets `top<d>` and `bottom<d>` added and each vertex `v`
/// split into `vu` (last coordinate 1) and `vd` (last coordinate -1).
pub fn prism(p: &Polytope) -> Polytope {
    let d = p.dim() + 1;
    let zero = Rational::default();
    let mut normals: Vec<Vec<Rational>> = p
        .h()
        .normals()
        .iter()
        .map(|r| r.iter().cloned().chain([zero.clone()]).collect())
        .collect();
    for s in [1, -1] {
        normals.push(homogenize(-1, (1..d).map(|_| zero.clone()).chain([int(s)])));
    }
    let mut facet_labels = p.facet_labels().to_vec();
    facet_labels.extend([format!("top{d}"), format!("bottom{d}")]);
    let mut verts = Vec::with_capacity(2 * p.vertex_count());
    let mut vertex_labels = Vec::with_capacity(2 * p.vertex_count());
    for (s, suffix) in [(1, "u"), (-1, "d")] {
        for j in 0..p.vertex_count() {
            verts.push(p.v().vert(j).iter().cloned().chain([int(s)]).collect());
            vertex_labels.push(format!("{}{suffix}", p.vertex_label(j)));
        }
    }
    build(d, normals, verts, facet_labels, vertex_labels)
}

/// Wedge of [`square_pyramid`] over its base: a 4-polytope whose edge
/// `[y_b, y^t]` lies in four facets.
pub fn wedged_square_pyramid() -> WedgeResult {
    let p = square_pyramid();
    constructions::wedge(&p, 0).expect("base is a facet")
}

/// Every fixture by name.
pub fn corpus() -> Vec<(String, Polytope)> {
    vec![
        ("triangle".into(), simplex(2)),
        ("simplex3".into(), simplex(3)),
        ("simplex4".into(), simplex(4)),
        ("square".into(), cube(2)),
        ("cube3".into(), cube(3)),
        ("cube4".into(), cube(4)),
        ("octahedron".into(), cross_polytope(3)),
        ("square_pyramid".into(), square_pyramid()),
        ("triangular_prism".into(), prism(&simplex(2))),
        ("wedged_square_pyramid".into(), wedged_square_pyramid().polytope),
    ]
}

/// Looks a fixture up by name; also accepts `simplex<d>`, `cube<d>` and `cross<d>`.
pub fn by_name(name: &str) -> Option<Polytope> {
    if let Some((_, p)) = corpus().into_iter().find(|(n, _)| n == name) {
        return Some(p);
    }
    let sized = |prefix: &str| -> Option<usize> {
        name.strip_prefix(prefix)?.parse().ok().filter(|d| (1..=8).contains(d))
    };
    if let Some(d) = sized("simplex") {
        return Some(simplex(d));
    }
    if let Some(d) = sized("cube") {
        return Some(cube(d));
    }
    sized("cross").filter(|&d| d >= 2).map(cross_polytope)
}
