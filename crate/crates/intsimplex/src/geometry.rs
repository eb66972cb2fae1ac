//! Realizability of squared-distance matrices in Euclidean space.
//!
//! A matrix on n points embeds in some Euclidean space exactly when, for
//! every point subset S, the bordered determinant satisfies
//! `(-1)^|S| det(border(A_S)) >= 0`; the criterion for a target dimension d
//! additionally bounds the affine rank, which equals the largest subset
//! size with nonzero bordered determinant, minus one. All verdicts here are
//! exact. [`gram_oracle`] is the deliberately independent floating-point
//! route (double centering plus an eigendecomposition) used to cross-check
//! the exact one in tests; it is advisory and never authoritative.

use crate::exact::{bareiss_bigint, bareiss_i128, Rational, SquaredDistanceMatrix};
use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};

/// Verdict of [`menger_realizable`]. When the answer is negative, `witness`
/// names a point subset that cannot be placed: either its bordered
/// determinant has the wrong sign, or it is an affinely independent set too
/// large for the target dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MengerVerdict {
    pub realizable: bool,
    pub witness: Option<Vec<usize>>,
}

/// Outcome of [`minimal_embedding_dimension`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealizabilityReport {
    /// Smallest dimension the points embed into, `None` when the matrix is
    /// not a Euclidean squared-distance matrix at all.
    pub realizable_in_dim: Option<usize>,
    /// True when the matrix needs the full n-1 dimensions, i.e. describes a
    /// nondegenerate simplex.
    pub nondegenerate: bool,
    /// For unrealizable input, the first subset (smallest, then lowest
    /// indices) whose bordered-determinant sign is wrong.
    pub witness: Option<Vec<usize>>,
}

/// Can the matrix be realized by points in Euclidean d-space?
///
/// Degenerate placements count: a weakly violated criterion (determinant
/// zero) still realizes, in fewer dimensions.
pub fn menger_realizable(a: &SquaredDistanceMatrix, d: usize) -> MengerVerdict {
    let scan = scan_subsets(a);
    if let Some(mask) = scan.violation {
        return MengerVerdict { realizable: false, witness: Some(mask_to_indices(mask)) };
    }
    if d >= scan.affine_rank {
        MengerVerdict { realizable: true, witness: None }
    } else {
        // Any affinely independent subset of d+2 points refuses d-space.
        let witness = scan.first_nonzero_of_size(d + 2).map(mask_to_indices);
        MengerVerdict { realizable: false, witness }
    }
}

/// Smallest dimension hosting the matrix, with the nondegeneracy flag.
pub fn minimal_embedding_dimension(a: &SquaredDistanceMatrix) -> RealizabilityReport {
    let scan = scan_subsets(a);
    match scan.violation {
        Some(mask) => RealizabilityReport {
            realizable_in_dim: None,
            nondegenerate: false,
            witness: Some(mask_to_indices(mask)),
        },
        None => RealizabilityReport {
            realizable_in_dim: Some(scan.affine_rank),
            nondegenerate: scan.affine_rank + 1 == a.points(),
            witness: None,
        },
    }
}

/// Floating-point cross-check: double-center at point 0 and inspect the
/// eigenvalues of the Gram matrix. True when the spectrum is nonnegative up
/// to `-tol` and at most `d` eigenvalues exceed `+tol`.
pub fn gram_oracle(a: &SquaredDistanceMatrix, d: usize, tol: f64) -> bool {
    let n = a.points();
    if n <= 1 {
        return true;
    }
    let g = nalgebra::DMatrix::from_fn(n - 1, n - 1, |i, j| {
        let gij = (a.entry(0, i + 1) + a.entry(0, j + 1) - a.entry(i + 1, j + 1))
            / Rational::from_integer(BigInt::from(2));
        gij.to_f64().expect("Gram entry out of f64 range")
    });
    let eigen = g.symmetric_eigen();
    let mut positive = 0usize;
    for ev in eigen.eigenvalues.iter() {
        if *ev < -tol {
            return false;
        }
        if *ev > tol {
            positive += 1;
        }
    }
    positive <= d
}

struct SubsetScan {
    /// First subset (by size, then numeric mask) with a sign violation.
    violation: Option<u32>,
    /// Valid only when `violation` is `None`.
    affine_rank: usize,
    /// Smallest subset mask with nonzero bordered determinant, per size.
    first_nonzero: Vec<Option<u32>>,
}

impl SubsetScan {
    fn first_nonzero_of_size(&self, s: usize) -> Option<u32> {
        self.first_nonzero.get(s).copied().flatten()
    }
}

/// Walk every subset in (size, mask) order, checking bordered-determinant
/// signs and tracking the affine rank. 2^n determinants; meant for small n.
fn scan_subsets(a: &SquaredDistanceMatrix) -> SubsetScan {
    let n = a.points();
    assert!(n <= 20, "subset scan is exponential; {n} points is too many");
    let lift = IntLift::new(a);
    let mut scan =
        SubsetScan { violation: None, affine_rank: 0, first_nonzero: vec![None; n + 2] };
    for s in 2..=n {
        let mut mask = (1u32 << s) - 1;
        while mask < (1u32 << n) {
            let sign = lift.bordered_det_sign(mask);
            let ok = if s % 2 == 0 { sign >= 0 } else { sign <= 0 };
            if !ok {
                scan.violation = Some(mask);
                return scan;
            }
            if sign != 0 {
                scan.affine_rank = s - 1;
                if scan.first_nonzero[s].is_none() {
                    scan.first_nonzero[s] = Some(mask);
                }
            }
            // Gosper's hack: next mask with the same popcount.
            let c = mask & mask.wrapping_neg();
            let r = mask + c;
            mask = (((r ^ mask) >> 2) / c) | r;
        }
    }
    scan
}

fn mask_to_indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).collect()
}

/// The matrix lifted to integers: M = L * A with L the lcm of all entry
/// denominators. For a subset S of size s, `det [[0, 1], [L, M_S]]` equals
/// `L^s det(border(A_S))`, so signs carry over.
struct IntLift {
    n: usize,
    l_big: BigInt,
    m_big: Vec<BigInt>,
    small: Option<(i128, Vec<i128>)>,
}

impl IntLift {
    fn new(a: &SquaredDistanceMatrix) -> Self {
        let n = a.points();
        let mut l = BigInt::one();
        for i in 0..n {
            for j in 0..n {
                l = l.lcm(a.entry(i, j).denom());
            }
        }
        let m_big: Vec<BigInt> = (0..n * n)
            .map(|k| {
                let e = a.entry(k / n, k % n);
                e.numer() * (&l / e.denom())
            })
            .collect();
        let small = l.to_i128().and_then(|l128| {
            m_big
                .iter()
                .map(ToPrimitive::to_i128)
                .collect::<Option<Vec<_>>>()
                .map(|m| (l128, m))
        });
        IntLift { n, l_big: l, m_big, small }
    }

    fn bordered_det_sign(&self, mask: u32) -> i8 {
        let idx = mask_to_indices(mask);
        let s = idx.len();
        let side = s + 1;
        if let Some((l, m)) = &self.small {
            let mut buf = vec![0i128; side * side];
            for (r, &i) in idx.iter().enumerate() {
                buf[r + 1] = 1;
                buf[(r + 1) * side] = *l;
                for (c, &j) in idx.iter().enumerate() {
                    buf[(r + 1) * side + c + 1] = m[i * self.n + j];
                }
            }
            if let Some(d) = bareiss_i128(&mut buf, side) {
                return sign_i128(d);
            }
        }
        let mut buf = vec![BigInt::zero(); side * side];
        for (r, &i) in idx.iter().enumerate() {
            buf[r + 1] = BigInt::one();
            buf[(r + 1) * side] = self.l_big.clone();
            for (c, &j) in idx.iter().enumerate() {
                buf[(r + 1) * side + c + 1] = self.m_big[i * self.n + j].clone();
            }
        }
        let d = bareiss_bigint(&mut buf, side);
        if d.is_zero() {
            0
        } else if d.is_positive() {
            1
        } else {
            -1
        }
    }
}

fn sign_i128(d: i128) -> i8 {
    match d.cmp(&0) {
        std::cmp::Ordering::Less => -1,
        std::cmp::Ordering::Equal => 0,
        std::cmp::Ordering::Greater => 1,
    }
}
