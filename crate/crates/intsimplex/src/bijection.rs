//! Integer partitions and the two-distance simplex correspondence.
//!
//! Simplices whose edge lengths take only the values 1 and lambda, with
//! lambda >= 2, are exactly the "clustered" matrices: distance 1 is an
//! equivalence relation, and the block sizes form a partition of the point
//! count. [`partition_to_matrix`] and [`matrix_to_partition`] are the two
//! directions of that correspondence. [`lemma_check`] verifies, per
//! instance, the determinant inequalities that make the cluster matrices
//! nondegenerately realizable, and [`sigma`] evaluates the sharp lower
//! threshold on lambda below which the correspondence starts to
//! fail. [`threshold_scan`] measures that failure empirically.

use crate::census::{is_canonical, DistanceWordMatrix};
use crate::exact::{det, rat_int, Rational, SquareMatrix, SquaredDistanceMatrix};
use crate::geometry::minimal_embedding_dimension;
use num::{BigInt, BigUint, One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BijectionError {
    #[error("parts must be positive and weakly decreasing, got {0:?}")]
    InvalidPartition(Vec<u32>),
    #[error("lambda^2 = {lambda_sq} is out of range; need lambda^2 >= {bound}")]
    LambdaTooSmall { lambda_sq: Rational, bound: Rational },
    #[error("lambda^2 = {lambda_sq} is out of range; need lambda^2 > 1")]
    LambdaNotAboveOne { lambda_sq: Rational },
    #[error("off-diagonal values are not of the form {{1, lambda^2}} with lambda^2 > 1 at ({i}, {j})")]
    BadAlphabet { i: usize, j: usize },
    #[error("distance 1 is not transitive: d({i},{j}) = d({j},{k}) = 1 but d({i},{k}) != 1")]
    NotClustered { i: usize, j: usize, k: usize },
    #[error("sigma(d) needs d >= 2, got {0}")]
    SigmaDomain(u64),
    #[error("exhaustive scan is limited to dimension <= 5, got {0}")]
    ScanTooLarge(usize),
}

/// Weakly decreasing positive parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self, BijectionError> {
        let ok = parts.iter().all(|&p| p > 0) && parts.windows(2).all(|w| w[0] >= w[1]);
        if ok {
            Ok(Partition { parts })
        } else {
            Err(BijectionError::InvalidPartition(parts))
        }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// The partitioned number: sum of the parts.
    pub fn n(&self) -> usize {
        self.parts.iter().map(|&p| p as usize).sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// All partitions of n in reverse lexicographic order, so `(n)` first and
/// the all-ones partition last. `n = 0` yields just the empty partition.
pub fn enumerate_partitions(n: usize) -> Vec<Partition> {
    if n == 0 {
        return vec![Partition { parts: vec![] }];
    }
    let mut out = Vec::new();
    let mut cur: Vec<u32> = vec![n as u32];
    loop {
        out.push(Partition { parts: cur.clone() });
        // Decrement the rightmost part above 1, then refill greedily.
        let Some(idx) = cur.iter().rposition(|&p| p > 1) else {
            break;
        };
        let ones = cur.len() - idx - 1;
        cur.truncate(idx + 1);
        cur[idx] -= 1;
        let cap = cur[idx];
        let mut rem = ones as u32 + 1;
        while rem > 0 {
            let add = rem.min(cap);
            cur.push(add);
            rem -= add;
        }
    }
    out
}

/// p(n) by the pentagonal-number recurrence.
pub fn partition_count(n: usize) -> BigUint {
    let mut p: Vec<BigInt> = Vec::with_capacity(n + 1);
    p.push(BigInt::one());
    for m in 1..=n {
        let mut acc = BigInt::zero();
        let mut k = 1i64;
        loop {
            let g1 = k * (3 * k - 1) / 2;
            let g2 = k * (3 * k + 1) / 2;
            if g1 as usize > m {
                break;
            }
            let sign = if k % 2 == 0 { -1 } else { 1 };
            let mut term = p[m - g1 as usize].clone();
            if g2 as usize <= m {
                term += &p[m - g2 as usize];
            }
            if sign > 0 {
                acc += term;
            } else {
                acc -= term;
            }
            k += 1;
        }
        p.push(acc);
    }
    p[n].to_biguint().expect("partition count is nonnegative")
}

fn four() -> Rational {
    rat_int(4)
}

/// Squared-distance matrix of a partition: 1 within a block, `lambda_sq`
/// across blocks, points grouped block by block in partition order.
/// Requires `lambda_sq >= 4` (lambda >= 2), the regime where the
/// correspondence is a proven bijection.
pub fn partition_to_matrix(
    pi: &Partition,
    lambda_sq: &Rational,
) -> Result<SquaredDistanceMatrix, BijectionError> {
    if *lambda_sq < four() {
        return Err(BijectionError::LambdaTooSmall {
            lambda_sq: lambda_sq.clone(),
            bound: four(),
        });
    }
    cluster_matrix(pi, lambda_sq)
}

/// As [`partition_to_matrix`] but accepting any `lambda_sq > 1`, for
/// exploring the regime between the sharp threshold and 4. Realizability is
/// not guaranteed down there.
pub fn partition_to_matrix_relaxed(
    pi: &Partition,
    lambda_sq: &Rational,
) -> Result<SquaredDistanceMatrix, BijectionError> {
    if *lambda_sq <= Rational::one() {
        return Err(BijectionError::LambdaNotAboveOne { lambda_sq: lambda_sq.clone() });
    }
    cluster_matrix(pi, lambda_sq)
}

fn cluster_matrix(
    pi: &Partition,
    lambda_sq: &Rational,
) -> Result<SquaredDistanceMatrix, BijectionError> {
    let n = pi.n();
    let mut block_of = Vec::with_capacity(n);
    for (b, &size) in pi.parts().iter().enumerate() {
        block_of.extend(std::iter::repeat(b).take(size as usize));
    }
    let m = SquareMatrix::from_fn(n, |i, j| {
        if i == j {
            Rational::zero()
        } else if block_of[i] == block_of[j] {
            Rational::one()
        } else {
            lambda_sq.clone()
        }
    });
    Ok(SquaredDistanceMatrix::new(m).expect("cluster matrix is valid by construction"))
}

/// Read the partition back off a two-valued matrix. The off-diagonal values
/// must be `{1, lambda_sq}` with `lambda_sq > 1` (either value may be
/// absent), and distance 1 must be transitive; otherwise the error carries
/// the offending positions.
pub fn matrix_to_partition(a: &SquaredDistanceMatrix) -> Result<Partition, BijectionError> {
    let n = a.points();
    let one = Rational::one();
    // Alphabet check: collect the non-1 value, insist it is unique and > 1.
    let mut lambda_sq: Option<&Rational> = None;
    for i in 0..n {
        for j in i + 1..n {
            let e = a.entry(i, j);
            if *e == one {
                continue;
            }
            match lambda_sq {
                None if *e > one => lambda_sq = Some(e),
                Some(l) if l == e => {}
                _ => return Err(BijectionError::BadAlphabet { i, j }),
            }
        }
    }
    // Transitivity of distance 1, with a witness triple on failure.
    for j in 0..n {
        for i in 0..n {
            for k in 0..n {
                if i == j || j == k || i == k || i > k {
                    continue;
                }
                if *a.entry(i, j) == one && *a.entry(j, k) == one && *a.entry(i, k) != one {
                    return Err(BijectionError::NotClustered { i, j, k });
                }
            }
        }
    }
    // Components of the distance-1 graph.
    let mut block = vec![usize::MAX; n];
    let mut sizes = Vec::new();
    for i in 0..n {
        if block[i] != usize::MAX {
            continue;
        }
        let b = sizes.len();
        block[i] = b;
        let mut size = 1u32;
        for j in i + 1..n {
            if *a.entry(i, j) == one {
                block[j] = b;
                size += 1;
            }
        }
        sizes.push(size);
    }
    sizes.sort_unstable_by(|x, y| y.cmp(x));
    Partition::new(sizes)
}

/// The two determinant inequalities verified per partition and lambda.
#[derive(Debug, Clone)]
pub struct LemmaReport {
    pub partition: Partition,
    pub lambda_sq: Rational,
    pub det_a: Rational,
    pub det_bordered: Rational,
    /// `(-1)^n (lambda_sq * det_bordered + det_a)` where n is the point count.
    pub expr_combined: Rational,
    /// `(-1)^n det_bordered`.
    pub expr_bordered: Rational,
}

impl LemmaReport {
    /// Both expressions strictly positive; recomputed, never stored.
    pub fn holds(&self) -> bool {
        self.expr_combined.is_positive() && self.expr_bordered.is_positive()
    }
}

/// Evaluate the nondegeneracy inequalities for the cluster matrix of `pi`.
pub fn lemma_check(pi: &Partition, lambda_sq: &Rational) -> Result<LemmaReport, BijectionError> {
    let a = partition_to_matrix(pi, lambda_sq)?;
    let det_a = det(a.matrix());
    let det_bordered = a.border().det();
    let n = a.points();
    let sign = if n % 2 == 0 { Rational::one() } else { -Rational::one() };
    let expr_combined = &sign * (lambda_sq * &det_bordered + &det_a);
    let expr_bordered = &sign * &det_bordered;
    Ok(LemmaReport {
        partition: pi.clone(),
        lambda_sq: lambda_sq.clone(),
        det_a,
        det_bordered,
        expr_combined,
        expr_bordered,
    })
}

/// The threshold `sigma(d) = sqrt((9d - 10 + sqrt(33d^2 - 52d + 20)) / (4d - 4))`,
/// kept with its exact radicands.
#[derive(Debug, Clone, PartialEq)]
pub struct Sigma {
    pub d: u64,
    /// `33 d^2 - 52 d + 20`, the inner radicand.
    pub inner_radicand: BigInt,
    /// `9 d - 10`, added to the inner square root.
    pub linear_term: BigInt,
    /// `4 d - 4`.
    pub denominator: BigInt,
    /// Floating-point evaluation of the nested radical.
    pub value: f64,
}

/// Evaluate the threshold for d >= 2. Decreasing in d, with infimum
/// `sqrt(9 + sqrt(33)) / 2 = 1.91993...`.
pub fn sigma(d: u64) -> Result<Sigma, BijectionError> {
    if d < 2 {
        return Err(BijectionError::SigmaDomain(d));
    }
    let df = d as f64;
    let inner = 33.0 * df * df - 52.0 * df + 20.0;
    let value = (((9.0 * df - 10.0) + inner.sqrt()) / (4.0 * df - 4.0)).sqrt();
    Ok(Sigma {
        d,
        inner_radicand: BigInt::from(33u64) * d * d - BigInt::from(52u64) * d
            + BigInt::from(20u64),
        linear_term: BigInt::from(9u64) * d - BigInt::from(10u64),
        denominator: BigInt::from(4u64) * d - BigInt::from(4u64),
        value,
    })
}

/// One lambda^2 grid point of a [`threshold_scan`].
#[derive(Debug, Clone)]
pub struct ScanRow {
    pub lambda_sq: Rational,
    /// Two-valued matrices on d+1 points, up to relabeling, that realize as
    /// nondegenerate d-simplices.
    pub realizable_count: usize,
    /// p(d+1), what the count should be for the correspondence to hold.
    pub partition_count: usize,
    /// Cluster matrices whose simplex degenerates or fails to realize.
    pub failed_partitions: Vec<Partition>,
    /// Non-cluster matrices that realize anyway, as distance words over the
    /// symbols 1 and 2 (2 standing for lambda).
    pub unexpected_words: Vec<Vec<u32>>,
}

impl ScanRow {
    pub fn bijection_holds(&self) -> bool {
        self.failed_partitions.is_empty() && self.unexpected_words.is_empty()
    }
}

/// Exhaustively test the correspondence on every two-valued matrix on d+1
/// points for each grid value of lambda^2. Exponential in d; capped at
/// d <= 5. Grid values must exceed 1.
pub fn threshold_scan(d: usize, grid: &[Rational]) -> Result<Vec<ScanRow>, BijectionError> {
    if d > 5 {
        return Err(BijectionError::ScanTooLarge(d));
    }
    for l in grid {
        if *l <= Rational::one() {
            return Err(BijectionError::LambdaNotAboveOne { lambda_sq: l.clone() });
        }
    }
    let n = d + 1;
    let patterns = two_valued_patterns(n);
    let p_n = partition_count(n).to_usize().expect("p(d+1) fits usize for d <= 5");
    let rows: Vec<ScanRow> = grid
        .par_iter()
        .map(|lambda_sq| {
            let mut row = ScanRow {
                lambda_sq: lambda_sq.clone(),
                realizable_count: 0,
                partition_count: p_n,
                failed_partitions: Vec::new(),
                unexpected_words: Vec::new(),
            };
            for pat in &patterns {
                let a = pattern_matrix(pat, lambda_sq);
                let report = minimal_embedding_dimension(&a);
                let realizes = report.realizable_in_dim == Some(d) && report.nondegenerate;
                if realizes {
                    row.realizable_count += 1;
                }
                match matrix_to_partition(&a) {
                    Ok(pi) => {
                        if !realizes {
                            row.failed_partitions.push(pi);
                        }
                    }
                    Err(_) => {
                        if realizes {
                            row.unexpected_words.push(pat.word());
                        }
                    }
                }
            }
            row
        })
        .collect();
    Ok(rows)
}

/// Canonical representatives of all symmetric {1,2}-valued matrices on n
/// points: one per relabeling class.
fn two_valued_patterns(n: usize) -> Vec<DistanceWordMatrix> {
    let entries = n * (n - 1) / 2;
    let mut out = Vec::new();
    for bits in 0u32..1 << entries {
        let word: Vec<u32> = (0..entries).map(|t| 1 + ((bits >> t) & 1)).collect();
        let m = DistanceWordMatrix::from_word(n, &word);
        if is_canonical(&m) {
            out.push(m);
        }
    }
    out
}

fn pattern_matrix(pat: &DistanceWordMatrix, lambda_sq: &Rational) -> SquaredDistanceMatrix {
    let n = pat.points();
    let m = SquareMatrix::from_fn(n, |i, j| {
        if i == j {
            Rational::zero()
        } else if pat.get(i, j) == 1 {
            Rational::one()
        } else {
            lambda_sq.clone()
        }
    });
    SquaredDistanceMatrix::new(m).expect("pattern matrix is valid by construction")
}
