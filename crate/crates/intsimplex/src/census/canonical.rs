//! Lexicographically minimal relabelings of symmetric distance words.
//!
//! A symmetric matrix on n points is addressed by the row-major word of
//! its strict upper triangle. Relabeling the points permutes the word;
//! the canonical form is the smallest word over all n! relabelings. It
//! is found without touching all permutations: labels are assigned one
//! position at a time, and the set of orderings still attaining the
//! minimal word prefix is carried as ordered cells (a partition of the
//! unplaced points into blocks that must keep their relative order,
//! free inside a block). Placing point u emits one row segment, and the
//! smallest segment u can emit is its distances to each cell in cell
//! order, sorted inside a cell; that sort refines the cells for the
//! next position. Surviving branches with equal cells have identical
//! completions, so states deduplicate on the cell list. The identity
//! ordering always survives while its prefix is minimal, which makes
//! the greedy segment choice exact rather than heuristic.

use std::collections::HashSet;
use std::fmt;

use crate::exact::{Rational, SquareMatrix, SquaredDistanceMatrix};
use num::{BigInt, Zero};

/// Symmetric matrix of positive integer labels with zero diagonal, stored
/// dense, addressed by its row-major upper-triangle word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DistanceWordMatrix {
    n: usize,
    d: Vec<u32>,
}

impl DistanceWordMatrix {
    /// `word` holds the strict upper triangle row-major:
    /// (0,1), (0,2), ..., (0,n-1), (1,2), ...
    pub fn from_word(n: usize, word: &[u32]) -> Self {
        assert_eq!(word.len(), n * n.saturating_sub(1) / 2, "word length must be n(n-1)/2");
        let mut d = vec![0u32; n * n];
        let mut t = 0;
        for i in 0..n {
            for j in i + 1..n {
                d[i * n + j] = word[t];
                d[j * n + i] = word[t];
                t += 1;
            }
        }
        DistanceWordMatrix { n, d }
    }

    pub fn points(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.d[i * self.n + j]
    }

    pub fn word(&self) -> Vec<u32> {
        let mut w = Vec::with_capacity(self.n * self.n.saturating_sub(1) / 2);
        for i in 0..self.n {
            for j in i + 1..self.n {
                w.push(self.get(i, j));
            }
        }
        w
    }

    /// Largest label; 0 when there are fewer than two points.
    pub fn max_label(&self) -> u32 {
        self.d.iter().copied().max().unwrap_or(0)
    }

    /// Apply a relabeling, `perm[new] = old`.
    pub fn relabeled(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        let n = self.n;
        let mut d = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                d[i * n + j] = self.get(perm[i], perm[j]);
            }
        }
        DistanceWordMatrix { n, d }
    }

    /// Entrywise squares as exact arithmetic, for realizability checks.
    pub fn to_squared_matrix(&self) -> SquaredDistanceMatrix {
        let m = SquareMatrix::from_fn(self.n, |i, j| {
            if i == j {
                Rational::zero()
            } else {
                let b = BigInt::from(self.get(i, j));
                Rational::from_integer(&b * &b)
            }
        });
        SquaredDistanceMatrix::new(m).expect("squared word matrix is valid by construction")
    }
}

impl fmt::Display for DistanceWordMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            for j in 0..self.n {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Result of [`canonical_form`]: the minimal word plus one relabeling
/// that attains it, `relabeling[new] = old`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    pub word: Vec<u32>,
    pub relabeling: Vec<usize>,
}

/// One surviving branch: a placed prefix and the ordered cells of the
/// points still to place. All branches alive at once share the same
/// (minimal) word prefix, so their futures depend only on the cells.
struct State {
    placed: Vec<usize>,
    cells: Vec<Vec<usize>>,
}

/// The smallest row segment point `u` can emit from `cells`: distances to
/// every other unplaced point, cell order preserved, ascending inside a
/// cell.
fn segment(m: &DistanceWordMatrix, cells: &[Vec<usize>], u: usize) -> Vec<u32> {
    let mut out = Vec::new();
    for cell in cells {
        let start = out.len();
        for &w in cell {
            if w != u {
                out.push(m.get(u, w));
            }
        }
        out[start..].sort_unstable();
    }
    out
}

/// Split every cell by distance to `u` (ascending), dropping `u` itself.
/// Exactly the orderings compatible with the result emit `segment(u)`.
fn refine(m: &DistanceWordMatrix, cells: &[Vec<usize>], u: usize) -> Vec<Vec<usize>> {
    let mut next = Vec::new();
    for cell in cells {
        let mut members: Vec<usize> = cell.iter().copied().filter(|&w| w != u).collect();
        members.sort_by_key(|&w| m.get(u, w));
        for group in members.chunk_by(|&a, &b| m.get(u, a) == m.get(u, b)) {
            next.push(group.to_vec());
        }
    }
    next
}

/// One label position: the minimal next segment over all branches, and
/// the refined, deduplicated branches that attain it.
fn minimize_position(m: &DistanceWordMatrix, states: Vec<State>) -> (Vec<u32>, Vec<State>) {
    let mut best: Option<Vec<u32>> = None;
    let mut next: Vec<State> = Vec::new();
    let mut seen: HashSet<Vec<Vec<usize>>> = HashSet::new();
    for st in &states {
        for &u in &st.cells[0] {
            let seg = segment(m, &st.cells, u);
            match &best {
                Some(b) if seg > *b => continue,
                Some(b) if seg == *b => {}
                _ => {
                    best = Some(seg);
                    next.clear();
                    seen.clear();
                }
            }
            let cells = refine(m, &st.cells, u);
            if seen.insert(cells.clone()) {
                let mut placed = st.placed.clone();
                placed.push(u);
                next.push(State { placed, cells });
            }
        }
    }
    (best.expect("at least one branch survives"), next)
}

fn initial_state(n: usize) -> Vec<State> {
    vec![State { placed: Vec::new(), cells: vec![(0..n).collect()] }]
}

/// The minimal word over all relabelings, with a witness.
pub fn canonical_form(m: &DistanceWordMatrix) -> CanonicalForm {
    let n = m.points();
    if n == 0 {
        return CanonicalForm { word: Vec::new(), relabeling: Vec::new() };
    }
    let mut states = initial_state(n);
    let mut word = Vec::with_capacity(n * (n - 1) / 2);
    for _ in 0..n {
        let (seg, next) = minimize_position(m, states);
        word.extend(seg);
        states = next;
    }
    let relabeling = states.into_iter().next().expect("a witness survives").placed;
    CanonicalForm { word, relabeling }
}

/// Whether the matrix's own word is already the canonical one. Stops at
/// the first position where the minimal word drops below the input, so
/// rejections are cheap.
pub fn is_canonical(m: &DistanceWordMatrix) -> bool {
    let n = m.points();
    if n <= 1 {
        return true;
    }
    let own = m.word();
    let mut states = initial_state(n);
    let mut pos = 0;
    for p in 0..n {
        let (seg, next) = minimize_position(m, states);
        let own_seg = &own[pos..pos + (n - 1 - p)];
        // The identity ordering survives while prefixes agree, so the
        // minimum can never exceed the input's segment.
        debug_assert!(seg.as_slice() <= own_seg);
        if seg.as_slice() < own_seg {
            return false;
        }
        pos += n - 1 - p;
        states = next;
    }
    true
}
