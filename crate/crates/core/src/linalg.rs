//! Exact rational scalars and dense matrices.
//!
//! Every computation in the crate runs over [`Rational`], so there is no
//! tolerance anywhere: zero tests, incidences and ranks are exact.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always in lowest terms with a positive denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("malformed rational {0:?}")]
    MalformedRational(String),
    #[error("point {index} has leading coordinate {found}, expected 1")]
    NotHomogenized { index: usize, found: Rational },
    #[error("expected {expected} entries, found {found}")]
    Shape { expected: usize, found: usize },
}

/// Shorthand for an integral rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for `num/den`. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Builds a rational vector from integers.
pub fn ints(values: &[i64]) -> Vec<Rational> {
    values.iter().map(|&v| int(v)).collect()
}

/// Parses `[+-]digits[/digits]`. The denominator must be a positive integer.
pub fn parse_rational(text: &str) -> Result<Rational, LinalgError> {
    let bad = || LinalgError::MalformedRational(text.to_string());
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (text, None),
    };
    let unsigned = num.strip_prefix(['+', '-']).unwrap_or(num);
    if unsigned.is_empty() || !unsigned.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let numerator: BigInt = num.parse().map_err(|_| bad())?;
    let denominator = match den {
        None => BigInt::one(),
        Some(d) => {
            if d.is_empty() || !d.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let d: BigInt = d.parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            d
        }
    };
    Ok(Rational::new(numerator, denominator))
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Scales a rational vector to the primitive integer vector pointing the same way.
/// The zero vector maps to the zero vector.
pub fn primitive_integer(v: &[Rational]) -> Vec<BigInt> {
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scaled: Vec<BigInt> = v
        .iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect();
    make_primitive(scaled)
}

/// Divides an integer vector by the gcd of its entries.
pub fn make_primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in &mut v {
            *x = &*x / &g;
        }
    }
    v
}

/// Dense row-major matrix of rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self, LinalgError> {
        if entries.len() != rows * cols {
            return Err(LinalgError::Shape {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Rational::one();
        }
        m
    }

    /// Stacks equal-length rows. An empty slice gives a `0 x cols` matrix.
    pub fn from_rows(rows: &[Vec<Rational>], cols: usize) -> Result<Self, LinalgError> {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(LinalgError::Shape {
                    expected: cols,
                    found: r.len(),
                });
            }
            entries.extend(r.iter().cloned());
        }
        Self::new(rows.len(), cols, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: Rational) {
        self.entries[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &RatMatrix) -> Result<RatMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::Shape {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = Rational::zero();
                for k in 0..self.cols {
                    acc += self.get(r, k) * other.get(k, c);
                }
                out.set(r, c, acc);
            }
        }
        Ok(out)
    }

    /// Exact rank over the rationals.
    pub fn rank(&self) -> usize {
        let rows: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|r| primitive_integer(self.row(r)))
            .collect();
        integer_rank(rows, self.cols)
    }

    /// Solves `self * x = rhs` for a square nonsingular matrix.
    pub fn solve(&self, rhs: &[Rational]) -> Option<Vec<Rational>> {
        if self.rows != self.cols || rhs.len() != self.rows {
            return None;
        }
        let n = self.rows;
        let mut a: Vec<Vec<Rational>> = (0..n)
            .map(|r| {
                let mut row = self.row(r).to_vec();
                row.push(rhs[r].clone());
                row
            })
            .collect();
        for c in 0..n {
            let pivot = (c..n).find(|&r| !a[r][c].is_zero())?;
            a.swap(c, pivot);
            let inv = a[c][c].recip();
            for x in a[c][c..].iter_mut() {
                *x *= &inv;
            }
            for r in 0..n {
                if r != c && !a[r][c].is_zero() {
                    let f = a[r][c].clone();
                    for k in c..=n {
                        let sub = &f * &a[c][k];
                        a[r][k] -= sub;
                    }
                }
            }
        }
        Some(a.into_iter().map(|mut row| row.pop().unwrap()).collect())
    }

    /// Determinant of a square matrix; `None` if not square.
    pub fn determinant(&self) -> Option<Rational> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut a: Vec<Vec<Rational>> = (0..n).map(|r| self.row(r).to_vec()).collect();
        let mut det = Rational::one();
        for c in 0..n {
            let Some(pivot) = (c..n).find(|&r| !a[r][c].is_zero()) else {
                return Some(Rational::zero());
            };
            if pivot != c {
                a.swap(c, pivot);
                det = -det;
            }
            det *= &a[c][c];
            for r in c + 1..n {
                if !a[r][c].is_zero() {
                    let f = &a[r][c] / &a[c][c];
                    for k in c..n {
                        let sub = &f * &a[c][k];
                        a[r][k] -= sub;
                    }
                }
            }
        }
        Some(det)
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let cells: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  {}", cells.join(" "))?;
        }
        write!(f, "]")
    }
}

/// Rank of an integer matrix by fraction-free (Bareiss) elimination.
///
/// After the step with pivot `p_k`, every remaining entry is a `(k+1)`-minor of
/// the input, so the division by the previous pivot is exact.
pub fn integer_rank(mut a: Vec<Vec<BigInt>>, cols: usize) -> usize {
    let rows = a.len();
    let mut rank = 0;
    let mut prev = BigInt::one();
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let (head, tail) = a.split_at_mut(rank + 1);
        let pivot_row = &head[rank];
        for row in tail.iter_mut() {
            for j in c + 1..cols {
                let v = &row[j] * &pivot_row[c] - &row[c] * &pivot_row[j];
                row[j] = v / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = pivot_row[c].clone();
        rank += 1;
    }
    rank
}

/// Affine dimension of a set of homogenized points `[1; x]`; `-1` for the empty set.
pub fn affine_dim(points: &[Vec<Rational>]) -> Result<isize, LinalgError> {
    let Some(first) = points.first() else {
        return Ok(-1);
    };
    let cols = first.len();
    for (index, p) in points.iter().enumerate() {
        if p.len() != cols {
            return Err(LinalgError::Shape {
                expected: cols,
                found: p.len(),
            });
        }
        if !p[0].is_one() {
            return Err(LinalgError::NotHomogenized {
                index,
                found: p[0].clone(),
            });
        }
    }
    let rows: Vec<Vec<BigInt>> = points.iter().map(|p| primitive_integer(p)).collect();
    Ok(integer_rank(rows, cols) as isize - 1)
}

/// Integer dot product; the hot path of the double description loop.
pub(crate) fn int_dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).fold(BigInt::zero(), |acc, (x, y)| acc + x * y)
}

/// Serde adapters that write rationals in their exact text form.
pub(crate) mod ser {
    use super::Rational;
    use serde::ser::SerializeSeq;
    use serde::Serializer;

    pub fn rational<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn rational_vec<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&x.to_string())?;
        }
        seq.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Plain rational Gauss-Jordan, independent of the Bareiss path.
    fn oracle_rank(rows: &[Vec<Rational>]) -> usize {
        let mut a = rows.to_vec();
        let cols = a.first().map_or(0, |r| r.len());
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..a.len()).find(|&r| !a[r][c].is_zero()) else {
                continue;
            };
            a.swap(rank, p);
            for r in 0..a.len() {
                if r != rank && !a[r][c].is_zero() {
                    let f = &a[r][c] / &a[rank][c];
                    for k in 0..cols {
                        let sub = &f * &a[rank][k];
                        a[r][k] -= sub;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    fn cube_normals() -> Vec<Vec<Rational>> {
        let mut rows = Vec::new();
        for i in 0..3 {
            for s in [1, -1] {
                let mut r = ints(&[-1, 0, 0, 0]);
                r[i + 1] = int(s);
                rows.push(r);
            }
        }
        rows
    }

    #[test]
    fn parses_rational_syntax() {
        assert_eq!(parse_rational("-3/7").unwrap(), ratio(-3, 7));
        assert_eq!(parse_rational("5").unwrap(), int(5));
        assert_eq!(parse_rational("+4/6").unwrap(), ratio(2, 3));
        assert_eq!(parse_rational("0/5").unwrap(), int(0));
        for bad in ["", "-", "1/", "/2", "1/0", "1/-2", "1.5", "a", "1/2/3", "--1", " 1"] {
            assert!(parse_rational(bad).is_err(), "{bad:?} accepted");
        }
    }

    #[test]
    fn display_round_trips() {
        for x in [ratio(-3, 7), int(5), int(0), ratio(12345678901234567, 3)] {
            assert_eq!(parse_rational(&x.to_string()).unwrap(), x);
        }
    }

    #[test]
    fn rank_examples() {
        assert_eq!(RatMatrix::identity(3).rank(), 3);
        assert_eq!(RatMatrix::zeros(2, 3).rank(), 0);
        let cube = RatMatrix::from_rows(&cube_normals(), 4).unwrap();
        assert_eq!(oracle_rank(&cube_normals()), 4);
        assert_eq!(cube.rank(), 4);
        assert_eq!(cube.transpose().rank(), 4);
    }

    #[test]
    fn rank_with_skipped_columns() {
        let rows = vec![ints(&[0, 2, 4, 1]), ints(&[0, 1, 2, 3]), ints(&[0, 3, 6, 4])];
        assert_eq!(oracle_rank(&rows), 2);
        assert_eq!(RatMatrix::from_rows(&rows, 4).unwrap().rank(), 2);
    }

    #[test]
    fn affine_dim_examples() {
        assert_eq!(affine_dim(&[]).unwrap(), -1);
        assert_eq!(affine_dim(&[ints(&[1, 0, 0]), ints(&[1, 1, 2])]).unwrap(), 1);
        let square: Vec<_> = [[1, 1], [1, -1], [-1, 1], [-1, -1]]
            .iter()
            .map(|[a, b]| ints(&[1, 1, *a, *b]))
            .collect();
        assert_eq!(affine_dim(&square).unwrap(), 2);
        assert!(matches!(
            affine_dim(&[ints(&[2, 0])]),
            Err(LinalgError::NotHomogenized { index: 0, .. })
        ));
    }

    #[test]
    fn solve_recovers_solution() {
        let a = RatMatrix::from_rows(&[ints(&[2, 1]), ints(&[1, 3])], 2).unwrap();
        let x = a.solve(&ints(&[3, 5])).unwrap();
        assert_eq!(x, vec![ratio(4, 5), ratio(7, 5)]);
        let singular = RatMatrix::from_rows(&[ints(&[1, 2]), ints(&[2, 4])], 2).unwrap();
        assert!(singular.solve(&ints(&[1, 1])).is_none());
    }

    /// Laplace expansion along the first row.
    fn oracle_det(m: &[Vec<Rational>]) -> Rational {
        if m.is_empty() {
            return int(1);
        }
        (0..m.len())
            .map(|c| {
                let minor: Vec<Vec<Rational>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|&(k, _)| k != c).map(|(_, x)| x.clone()).collect())
                    .collect();
                let term = &m[0][c] * oracle_det(&minor);
                if c % 2 == 0 { term } else { -term }
            })
            .sum()
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(RatMatrix::identity(4).determinant(), Some(int(1)));
        let a = RatMatrix::from_rows(&[ints(&[0, 2]), ints(&[3, 1])], 2).unwrap();
        assert_eq!(a.determinant(), Some(int(-6)));
        assert_eq!(RatMatrix::zeros(2, 3).determinant(), None);
        let rows = vec![ints(&[2, -1, 0]), ratio_row(&[(1, 2), (3, 1), (-2, 3)]), ints(&[4, 0, 5])];
        assert_eq!(RatMatrix::from_rows(&rows, 3).unwrap().determinant(), Some(oracle_det(&rows)));
    }

    fn ratio_row(v: &[(i64, i64)]) -> Vec<Rational> {
        v.iter().map(|&(n, d)| ratio(n, d)).collect()
    }

    #[test]
    fn primitive_integer_keeps_direction() {
        let v = vec![ratio(1, 2), ratio(-3, 4), int(0)];
        assert_eq!(
            primitive_integer(&v),
            vec![BigInt::from(2), BigInt::from(-3), BigInt::from(0)]
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn small_matrix() -> impl Strategy<Value = Vec<Vec<Rational>>> {
            (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
                proptest::collection::vec(
                    proptest::collection::vec((-3i64..4, 1i64..4), c),
                    r,
                )
                .prop_map(|rows| {
                    rows.into_iter()
                        .map(|row| row.into_iter().map(|(n, d)| ratio(n, d)).collect())
                        .collect()
                })
            })
        }

        proptest! {
            #[test]
            fn rank_matches_oracle_and_is_permutation_invariant(rows in small_matrix(), seed in 0u64..1000) {
                let cols = rows[0].len();
                let m = RatMatrix::from_rows(&rows, cols).unwrap();
                let r = m.rank();
                prop_assert_eq!(r, oracle_rank(&rows));
                prop_assert_eq!(m.transpose().rank(), r);
                let mut shuffled = rows.clone();
                shuffled.rotate_left((seed as usize) % rows.len());
                let mut perm_cols: Vec<usize> = (0..cols).collect();
                perm_cols.rotate_left((seed as usize / 7) % cols);
                let permuted: Vec<Vec<Rational>> = shuffled
                    .iter()
                    .map(|row| perm_cols.iter().map(|&c| row[c].clone()).collect())
                    .collect();
                prop_assert_eq!(RatMatrix::from_rows(&permuted, cols).unwrap().rank(), r);
            }

            #[test]
            fn determinant_matches_expansion(rows in small_matrix()) {
                let n = rows.len().min(rows[0].len());
                let square: Vec<Vec<Rational>> = rows[..n].iter().map(|r| r[..n].to_vec()).collect();
                let m = RatMatrix::from_rows(&square, n).unwrap();
                let det = m.determinant().unwrap();
                prop_assert_eq!(&det, &oracle_det(&square));
                prop_assert_eq!(det.is_zero(), m.rank() < n);
            }

            #[test]
            fn addition_round_trips(a in -50i64..50, b in 1i64..50, c in -50i64..50, d in 1i64..50) {
                let x = ratio(a, b);
                let y = ratio(c, d);
                prop_assert_eq!((&x + &y) - &y, x);
            }

            #[test]
            fn simplex_points_have_full_affine_dim(k in 0usize..5) {
                // origin plus unit vectors: k+1 affinely independent points in R^k
                let mut pts = vec![{
                    let mut p = vec![int(0); k + 1];
                    p[0] = int(1);
                    p
                }];
                for i in 0..k {
                    let mut p = vec![int(0); k + 1];
                    p[0] = int(1);
                    p[i + 1] = int(1);
                    pts.push(p);
                }
                prop_assert_eq!(affine_dim(&pts).unwrap(), k as isize);
            }
        }
    }
}
