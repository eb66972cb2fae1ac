//! Explicit Euclidean coordinates for clustered two-distance simplices.
//!
//! The cluster matrix of a partition (blocks at squared distance 1
//! inside, lambda^2 across) realizes by a direct construction: each block
//! becomes a unit-edge regular simplex centered in its own coordinate
//! subspace, pushed out along a private axis far enough that every point
//! lands on a common sphere of squared radius lambda^2 / 2. Cross-block
//! inner products then vanish and cross-block squared distances are
//! exactly lambda^2. The Gram matrix of that construction is rational:
//! lambda^2 / 2 on the diagonal, (lambda^2 - 1) / 2 inside a block, 0
//! across blocks. Only the coordinates themselves need square roots.
//!
//! [`build_gram`] and [`block_parameters`] are the exact side;
//! [`build_coordinates`] produces the floating-point points in dimension
//! d + 1, and [`reduce_dimension`] drops them to dimension d through an
//! exact factorization of the translated Gram matrix.

use crate::bijection::Partition;
use crate::exact::{rat_int, Rational, SquareMatrix};
use num::{Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EmbeddingError {
    #[error(
        "a block of {size} points cannot reach separation lambda^2 = {lambda_sq}: \
         the offset along its axis would be imaginary"
    )]
    ShiftImpossible { size: u32, lambda_sq: Rational },
    #[error("translated Gram matrix has rank {rank}, expected {expected}: the points are affinely dependent")]
    RankDeficient { rank: usize, expected: usize },
    #[error("Gram matrix is not positive semidefinite (detected at pivot {index})")]
    NotPositiveSemidefinite { index: usize },
}

/// Exact constants of one block of the construction.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockParameters {
    pub size: u32,
    /// Squared circumradius of the unit-edge regular simplex on `size`
    /// points: (size - 1) / (2 size).
    pub circumradius_sq: Rational,
    /// Inner product of two distinct vertices of that centered simplex:
    /// -1 / (2 size).
    pub vertex_ip: Rational,
    /// Squared offset along the block's private axis: lambda^2 / 2 minus
    /// the squared circumradius, chosen to put the block on the common
    /// sphere.
    pub shift_sq: Rational,
}

pub fn block_parameters(size: u32, lambda_sq: &Rational) -> Result<BlockParameters, EmbeddingError> {
    assert!(size > 0, "blocks are nonempty");
    let k = rat_int(size as i64);
    let two_k = rat_int(2 * size as i64);
    let circumradius_sq = (&k - rat_int(1)) / &two_k;
    let vertex_ip = -(rat_int(1) / &two_k);
    let shift_sq = lambda_sq / rat_int(2) - &circumradius_sq;
    if shift_sq.is_negative() {
        return Err(EmbeddingError::ShiftImpossible { size, lambda_sq: lambda_sq.clone() });
    }
    Ok(BlockParameters { size, circumradius_sq, vertex_ip, shift_sq })
}

/// Exact Gram matrix of the standard construction, origin at the sphere
/// center: lambda^2 / 2 on the diagonal, (lambda^2 - 1) / 2 for two
/// points of one block, 0 across blocks. A valid Gram matrix of real
/// points whenever every block's shift is real.
pub fn build_gram(pi: &Partition, lambda_sq: &Rational) -> SquareMatrix {
    let block_of = blocks_of(pi);
    let diag = lambda_sq / rat_int(2);
    let inside = (lambda_sq - rat_int(1)) / rat_int(2);
    SquareMatrix::from_fn(pi.n(), |i, j| {
        if i == j {
            diag.clone()
        } else if block_of[i] == block_of[j] {
            inside.clone()
        } else {
            Rational::zero()
        }
    })
}

/// Squared distances induced by a Gram matrix:
/// d(i,j)^2 = g(i,i) + g(j,j) - 2 g(i,j).
pub fn squared_distances_from_gram(g: &SquareMatrix) -> SquareMatrix {
    let two = rat_int(2);
    SquareMatrix::from_fn(g.size(), |i, j| &g[(i, i)] + &g[(j, j)] - &two * &g[(i, j)])
}

/// A realized point set: floating-point coordinates plus the exact Gram
/// matrix they implement.
#[derive(Debug, Clone)]
pub struct Embedding {
    /// One coordinate row per point, each of length `ambient_dim`.
    pub points: Vec<Vec<f64>>,
    pub ambient_dim: usize,
    /// Exact Gram matrix of the points around this embedding's origin.
    pub gram: SquareMatrix,
    /// Block index of each point, following the partition's order.
    pub block_of: Vec<usize>,
    pub partition: Partition,
    pub lambda_sq: Rational,
}

impl Embedding {
    /// Exact squared distances, straight from the Gram matrix.
    pub fn squared_distance_matrix(&self) -> SquareMatrix {
        squared_distances_from_gram(&self.gram)
    }
}

fn blocks_of(pi: &Partition) -> Vec<usize> {
    let mut out = Vec::with_capacity(pi.n());
    for (b, &size) in pi.parts().iter().enumerate() {
        out.extend(std::iter::repeat(b).take(size as usize));
    }
    out
}

/// Vertices of the unit-edge regular simplex on k points in R^{k-1},
/// barycenter at the origin. Built by stacking: lift the (m-1)-point
/// simplex by -s in a new axis and add an apex at (m-1)s, with
/// s^2 = 1 / (2 m (m-1)) so edges stay unit.
fn regular_simplex(k: usize) -> Vec<Vec<f64>> {
    let mut pts: Vec<Vec<f64>> = vec![Vec::new()];
    for m in 2..=k {
        let mf = m as f64;
        let s = (mf / (2.0 * (mf - 1.0))).sqrt() / mf;
        for p in pts.iter_mut() {
            p.push(-s);
        }
        let mut apex = vec![0.0; m - 2];
        apex.push((mf - 1.0) * s);
        pts.push(apex);
    }
    pts
}

/// Coordinates of the standard construction in dimension d + 1. Block i
/// of size k owns a chunk of k consecutive axes: k - 1 for its regular
/// simplex and a final private shift axis.
pub fn build_coordinates(
    pi: &Partition,
    lambda_sq: &Rational,
) -> Result<Embedding, EmbeddingError> {
    let n = pi.n();
    let mut points = Vec::with_capacity(n);
    let mut start = 0usize;
    for &size in pi.parts() {
        let k = size as usize;
        let params = block_parameters(size, lambda_sq)?;
        let shift = params.shift_sq.to_f64().expect("small rational").sqrt();
        for vertex in regular_simplex(k) {
            let mut coords = vec![0.0; n];
            coords[start..start + k - 1].copy_from_slice(&vertex);
            coords[start + k - 1] = shift;
            points.push(coords);
        }
        start += k;
    }
    Ok(Embedding {
        points,
        ambient_dim: n,
        gram: build_gram(pi, lambda_sq),
        block_of: blocks_of(pi),
        partition: pi.clone(),
        lambda_sq: lambda_sq.clone(),
    })
}

/// Re-embed in the affine span of the points: dimension d for a
/// nondegenerate d-simplex, with the first point at the origin. The
/// translated Gram matrix g'(i,j) = g(i,j) - g(i,0) - g(0,j) + g(0,0)
/// is factored exactly (rational LDL^T); its pivots certify positive
/// semidefiniteness and its rank must be full. Only the final square
/// roots are floating point.
pub fn reduce_dimension(emb: &Embedding) -> Result<Embedding, EmbeddingError> {
    let n = emb.gram.size();
    let q = n.saturating_sub(1);
    // a = translated Gram over points 1..n, eliminated in place.
    let mut a = vec![vec![Rational::zero(); q]; q];
    for i in 0..q {
        for j in 0..q {
            a[i][j] = &emb.gram[(i + 1, j + 1)] - &emb.gram[(i + 1, 0)] - &emb.gram[(0, j + 1)]
                + &emb.gram[(0, 0)];
        }
    }
    // pivots: (column index, pivot value); l: unit lower-triangular columns.
    let mut pivots: Vec<(usize, Rational)> = Vec::new();
    let mut l = vec![vec![Rational::zero(); q]; q];
    for k in 0..q {
        let d = a[k][k].clone();
        if d.is_negative() {
            return Err(EmbeddingError::NotPositiveSemidefinite { index: k });
        }
        if d.is_zero() {
            // A semidefinite matrix with a zero diagonal entry must have a
            // zero row there; anything else certifies indefiniteness.
            if (k..q).any(|j| !a[k][j].is_zero()) {
                return Err(EmbeddingError::NotPositiveSemidefinite { index: k });
            }
            continue;
        }
        for i in k..q {
            l[i][pivots.len()] = &a[i][k] / &d;
        }
        for i in k + 1..q {
            for j in k + 1..q {
                let t = &a[i][k] * &a[k][j] / &d;
                a[i][j] -= t;
            }
        }
        pivots.push((k, d));
    }
    let rank = pivots.len();
    if rank < q {
        return Err(EmbeddingError::RankDeficient { rank, expected: q });
    }
    // x_i = L_i * sqrt(D): exact factor rows, floating square roots.
    let roots: Vec<f64> =
        pivots.iter().map(|(_, d)| d.to_f64().expect("small rational").sqrt()).collect();
    let mut points = vec![vec![0.0; rank]; n];
    for i in 0..q {
        for c in 0..rank {
            points[i + 1][c] = l[i][c].to_f64().expect("small rational") * roots[c];
        }
    }
    // Gram about the new origin (the first point): zero row and column 0,
    // translated Gram inside.
    let gram = SquareMatrix::from_fn(n, |i, j| {
        if i == 0 || j == 0 {
            Rational::zero()
        } else {
            &emb.gram[(i, j)] - &emb.gram[(i, 0)] - &emb.gram[(0, j)] + &emb.gram[(0, 0)]
        }
    });
    Ok(Embedding {
        points,
        ambient_dim: rank,
        gram,
        block_of: emb.block_of.clone(),
        partition: emb.partition.clone(),
        lambda_sq: emb.lambda_sq.clone(),
    })
}
