//! Exact rational arithmetic and fraction-free determinants.
//!
//! Everything downstream rests on exact signs of determinants of small
//! rational matrices, so no floating point appears anywhere in this module.
//! The determinant is a Bareiss elimination over integers: each row is
//! scaled by the lcm of its denominators, the integer-preserving
//! elimination runs (in `i128` with a `BigInt` fallback on overflow), and
//! the row scales are divided back out at the end.

use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};
use std::fmt;
use thiserror::Error;

/// Arbitrary-precision rational. Always reduced, denominator positive,
/// zero is `0/1`; `num` maintains those invariants on construction.
pub type Rational = BigRational;

/// `p/q` from machine integers. Panics when `q == 0`.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Integer as a rational.
pub fn rat_int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("cannot parse {input:?} as a rational (expected \"p\" or \"p/q\" with q nonzero)")]
pub struct ParseRationalError {
    input: String,
}

/// Parse `"p"` or `"p/q"`. The result is normalized, so `"6/4"` parses to
/// `3/2` and `"3/-2"` to `-3/2`.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError { input: s.to_owned() };
    match s.split_once('/') {
        None => s.parse::<BigInt>().map(Rational::from_integer).map_err(|_| err()),
        Some((p, q)) => {
            let p: BigInt = p.parse().map_err(|_| err())?;
            let q: BigInt = q.parse().map_err(|_| err())?;
            if q.is_zero() {
                return Err(err());
            }
            Ok(Rational::new(p, q))
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("row {row} has length {len}, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("matrix is not symmetric at ({i}, {j})")]
    Asymmetric { i: usize, j: usize },
    #[error("diagonal entry {i} is nonzero")]
    NonzeroDiagonal { i: usize },
    #[error("off-diagonal entry ({i}, {j}) is not positive")]
    NonpositiveEntry { i: usize, j: usize },
}

/// Dense square matrix of rationals, row major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<Rational>,
}

impl SquareMatrix {
    pub fn zero(n: usize) -> Self {
        SquareMatrix { n, data: vec![Rational::zero(); n * n] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        SquareMatrix { n, data }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, MatrixError> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(MatrixError::NotSquare { row: i, len: row.len(), expected: n });
            }
            data.extend(row);
        }
        Ok(SquareMatrix { n, data })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Rational]> {
        self.data.chunks(self.n.max(1))
    }
}

impl std::ops::Index<(usize, usize)> for SquareMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for SquareMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.n + j]
    }
}

impl fmt::Display for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            for j in 0..self.n {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Determinant by fraction-free Bareiss elimination. The empty matrix has
/// determinant 1.
pub fn det(m: &SquareMatrix) -> Rational {
    let n = m.n;
    if n == 0 {
        return Rational::one();
    }
    // det(M) = det(scaled integer rows) / product of row scales.
    let mut scale = BigInt::one();
    let mut ints: Vec<BigInt> = Vec::with_capacity(n * n);
    for i in 0..n {
        let mut l = BigInt::one();
        for j in 0..n {
            l = l.lcm(m.data[i * n + j].denom());
        }
        for j in 0..n {
            let e = &m.data[i * n + j];
            ints.push(e.numer() * (&l / e.denom()));
        }
        scale *= l;
    }
    Rational::new(int_det(ints, n), scale)
}

/// Integer determinant: `i128` path when everything fits, `BigInt` otherwise.
pub(crate) fn int_det(mut entries: Vec<BigInt>, n: usize) -> BigInt {
    if let Some(mut small) = entries.iter().map(ToPrimitive::to_i128).collect::<Option<Vec<_>>>() {
        if let Some(d) = bareiss_i128(&mut small, n) {
            return BigInt::from(d);
        }
    }
    bareiss_bigint(&mut entries, n)
}

/// Bareiss elimination with checked `i128` arithmetic; `None` on overflow.
/// Intermediate entries are minors of the (row-swapped) input, so every
/// division by the previous pivot is exact. Clobbers `a`.
pub(crate) fn bareiss_i128(a: &mut [i128], n: usize) -> Option<i128> {
    debug_assert_eq!(a.len(), n * n);
    if n == 0 {
        return Some(1);
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k * n + k] == 0 {
            let Some(r) = (k + 1..n).find(|&r| a[r * n + k] != 0) else {
                return Some(0);
            };
            for j in k..n {
                a.swap(k * n + j, r * n + j);
            }
            sign = -sign;
        }
        let pivot = a[k * n + k];
        for i in k + 1..n {
            let head = a[i * n + k];
            for j in k + 1..n {
                let t = a[i * n + j]
                    .checked_mul(pivot)?
                    .checked_sub(head.checked_mul(a[k * n + j])?)?;
                debug_assert_eq!(t % prev, 0);
                a[i * n + j] = t / prev;
            }
        }
        prev = pivot;
    }
    Some(sign * a[n * n - 1])
}

/// As [`bareiss_i128`] without the overflow concern. Clobbers `a`.
pub(crate) fn bareiss_bigint(a: &mut [BigInt], n: usize) -> BigInt {
    debug_assert_eq!(a.len(), n * n);
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k * n + k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !a[r * n + k].is_zero()) else {
                return BigInt::zero();
            };
            for j in k..n {
                a.swap(k * n + j, r * n + j);
            }
            sign = -sign;
        }
        let pivot = a[k * n + k].clone();
        for i in k + 1..n {
            let head = a[i * n + k].clone();
            for j in k + 1..n {
                let t = &a[i * n + j] * &pivot - &head * &a[k * n + j];
                a[i * n + j] = t / &prev;
            }
        }
        prev = pivot;
    }
    let d = std::mem::take(&mut a[n * n - 1]);
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Symmetric matrix of squared point-to-point distances: zero diagonal,
/// positive off-diagonal entries. Squared entries are primary; integer side
/// lengths exist only when every entry is a perfect square.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquaredDistanceMatrix {
    m: SquareMatrix,
}

impl SquaredDistanceMatrix {
    pub fn new(m: SquareMatrix) -> Result<Self, MatrixError> {
        let n = m.size();
        for i in 0..n {
            if !m[(i, i)].is_zero() {
                return Err(MatrixError::NonzeroDiagonal { i });
            }
            for j in i + 1..n {
                if m[(i, j)] != m[(j, i)] {
                    return Err(MatrixError::Asymmetric { i, j });
                }
                if !m[(i, j)].is_positive() {
                    return Err(MatrixError::NonpositiveEntry { i, j });
                }
            }
        }
        Ok(SquaredDistanceMatrix { m })
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, MatrixError> {
        Self::new(SquareMatrix::from_rows(rows)?)
    }

    /// Number of points (matrix side).
    pub fn points(&self) -> usize {
        self.m.size()
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rational {
        &self.m[(i, j)]
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.m
    }

    /// Principal submatrix on the given point set, deduplicated and taken in
    /// ascending index order. Panics when the set is empty.
    pub fn principal_submatrix(&self, s: &[usize]) -> Self {
        let mut idx: Vec<usize> = s.to_vec();
        idx.sort_unstable();
        idx.dedup();
        assert!(!idx.is_empty(), "principal submatrix on an empty point set");
        assert!(*idx.last().unwrap() < self.points(), "point index out of range");
        let m = SquareMatrix::from_fn(idx.len(), |i, j| self.m[(idx[i], idx[j])].clone());
        SquaredDistanceMatrix { m }
    }

    /// Bordered matrix `[[0, 1...1], [1...1, A]]` used by the realizability
    /// criterion.
    pub fn border(&self) -> BorderedMatrix {
        let n = self.points();
        let full = SquareMatrix::from_fn(n + 1, |i, j| {
            if i == 0 && j == 0 {
                Rational::zero()
            } else if i == 0 || j == 0 {
                Rational::one()
            } else {
                self.m[(i - 1, j - 1)].clone()
            }
        });
        BorderedMatrix { full }
    }
}

/// Squared-distance matrix with the all-ones border row and column attached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BorderedMatrix {
    full: SquareMatrix,
}

impl BorderedMatrix {
    /// Number of points of the inner matrix.
    pub fn points(&self) -> usize {
        self.full.size() - 1
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.full
    }

    pub fn det(&self) -> Rational {
        det(&self.full)
    }

    /// Strip the border back off.
    pub fn inner(&self) -> SquaredDistanceMatrix {
        let n = self.points();
        let m = SquareMatrix::from_fn(n, |i, j| self.full[(i + 1, j + 1)].clone());
        SquaredDistanceMatrix { m }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Cofactor expansion, the slow independent route.
    fn naive_det(m: &SquareMatrix) -> Rational {
        fn go(rows: &[Vec<Rational>]) -> Rational {
            let n = rows.len();
            if n == 0 {
                return Rational::one();
            }
            if n == 1 {
                return rows[0][0].clone();
            }
            let mut acc = Rational::zero();
            for (c, head) in rows[0].iter().enumerate() {
                if head.is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Rational>> = rows[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|(j, _)| *j != c)
                            .map(|(_, e)| e.clone())
                            .collect()
                    })
                    .collect();
                let term = head * go(&minor);
                if c % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        }
        let rows: Vec<Vec<Rational>> = m.rows().map(|r| r.to_vec()).collect();
        if m.size() == 0 {
            return Rational::one();
        }
        go(&rows)
    }

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> SquareMatrix {
        SquareMatrix::from_fn(n, |_, _| rat(rng.gen_range(-9..=9), rng.gen_range(1..=4)))
    }

    #[test]
    fn det_of_two_point_distance_matrix() {
        let m = SquareMatrix::from_rows(vec![
            vec![rat_int(0), rat_int(1)],
            vec![rat_int(1), rat_int(0)],
        ])
        .unwrap();
        assert_eq!(det(&m), rat_int(-1));
    }

    #[test]
    fn det_of_unit_triangle_matrix() {
        let m = SquareMatrix::from_rows(vec![
            vec![rat_int(0), rat_int(1), rat_int(1)],
            vec![rat_int(1), rat_int(0), rat_int(1)],
            vec![rat_int(1), rat_int(1), rat_int(0)],
        ])
        .unwrap();
        assert_eq!(det(&m), rat_int(2));
    }

    #[test]
    fn det_of_bordered_unit_triangle() {
        // 16 * squared area of the unit triangle is 3, and the bordered
        // determinant for three points is -16 V^2.
        let a = SquaredDistanceMatrix::from_rows(vec![
            vec![rat_int(0), rat_int(1), rat_int(1)],
            vec![rat_int(1), rat_int(0), rat_int(1)],
            vec![rat_int(1), rat_int(1), rat_int(0)],
        ])
        .unwrap();
        assert_eq!(a.border().det(), rat_int(-3));
    }

    #[test]
    fn det_of_empty_matrix_is_one() {
        assert_eq!(det(&SquareMatrix::zero(0)), Rational::one());
    }

    #[test]
    fn det_matches_naive_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
        for case in 0..1200 {
            let n = 1 + case % 6;
            let m = random_matrix(&mut rng, n);
            assert_eq!(det(&m), naive_det(&m), "disagreement on\n{m}");
        }
    }

    #[test]
    fn det_with_duplicated_row_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
        for _ in 0..200 {
            let mut m = random_matrix(&mut rng, 5);
            let src = rng.gen_range(0..5);
            let dst = (src + rng.gen_range(1..5)) % 5;
            for j in 0..5 {
                m[(dst, j)] = m[(src, j)].clone();
            }
            assert!(det(&m).is_zero());
        }
    }

    #[test]
    fn det_survives_i128_overflow() {
        // Entries around 2^80 force the BigInt fallback; cross-check against
        // the naive route, which never leaves BigInt arithmetic.
        let big = BigInt::from(1u128 << 80);
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
        for _ in 0..20 {
            let m = SquareMatrix::from_fn(4, |_, _| {
                Rational::from_integer(&big * BigInt::from(rng.gen_range(-5..=5i32)))
            });
            assert_eq!(det(&m), naive_det(&m));
        }
    }

    #[test]
    fn bordered_all_ones_closed_form() {
        // n unit-separated points: the bordered matrix is J - I of size n+1,
        // whose determinant is n * (-1)^n.
        for n in 1..=7usize {
            let a = SquaredDistanceMatrix::new(SquareMatrix::from_fn(n, |i, j| {
                if i == j {
                    Rational::zero()
                } else {
                    Rational::one()
                }
            }))
            .unwrap();
            let b = a.border();
            let expect = if n % 2 == 0 { rat_int(n as i64) } else { rat_int(-(n as i64)) };
            assert_eq!(b.det(), expect);
            assert_eq!(naive_det(b.matrix()), expect);
        }
    }

    #[test]
    fn border_round_trips() {
        let a = SquaredDistanceMatrix::from_rows(vec![
            vec![rat_int(0), rat_int(1), rat(9, 2)],
            vec![rat_int(1), rat_int(0), rat_int(4)],
            vec![rat(9, 2), rat_int(4), rat_int(0)],
        ])
        .unwrap();
        assert_eq!(a.border().inner(), a);
        assert_eq!(a.principal_submatrix(&[0, 1, 2]), a);
        let sub = a.principal_submatrix(&[2, 0]);
        assert_eq!(sub.points(), 2);
        assert_eq!(*sub.entry(0, 1), rat(9, 2));
    }

    #[test]
    fn distance_matrix_validation() {
        let asym = SquareMatrix::from_rows(vec![
            vec![rat_int(0), rat_int(1)],
            vec![rat_int(2), rat_int(0)],
        ])
        .unwrap();
        assert_eq!(
            SquaredDistanceMatrix::new(asym).unwrap_err(),
            MatrixError::Asymmetric { i: 0, j: 1 }
        );
        let neg = SquareMatrix::from_rows(vec![
            vec![rat_int(0), rat_int(-1)],
            vec![rat_int(-1), rat_int(0)],
        ])
        .unwrap();
        assert_eq!(
            SquaredDistanceMatrix::new(neg).unwrap_err(),
            MatrixError::NonpositiveEntry { i: 0, j: 1 }
        );
        let diag = SquareMatrix::from_rows(vec![vec![rat_int(3)]]).unwrap();
        assert_eq!(
            SquaredDistanceMatrix::new(diag).unwrap_err(),
            MatrixError::NonzeroDiagonal { i: 0 }
        );
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("17/4").unwrap(), rat(17, 4));
        assert_eq!(parse_rational("-6/4").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("3/-2").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("12").unwrap(), rat_int(12));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("a/b").is_err());
        for s in ["17/4", "-3/2", "12", "0"] {
            assert_eq!(parse_rational(s).unwrap().to_string(), s);
        }
    }
}
