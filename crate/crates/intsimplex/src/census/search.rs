//! Depth-first enumeration of integral point sets by diameter.
//!
//! Words over the alphabet {1, ..., D} are filled row-major. Three prune
//! families keep the tree small, and none of them can lose a valid class:
//!
//! 1. row 0 must be nondecreasing, which every canonical word satisfies;
//! 2. every completed triple must satisfy the strict triangle inequality;
//! 3. every point subset of a nondegenerate simplex is nondegenerate, so
//!    each newly completed subset must pass its strict bordered
//!    determinant sign test, checked the moment its last pair is placed.
//!
//! A subset {v1 < ... < vk} completes when the pair (v_{k-1}, v_k) is
//! placed, so the placement of (i, j) checks exactly the subsets
//! T + {i, j} with T inside {0, ..., i-1}; sizes 2 and 3 are already
//! covered by positivity and the triangle step. Surviving leaves are
//! counted when the word is its own canonical form, giving one count per
//! congruence class.

use std::ops::RangeInclusive;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use num::{BigInt, One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use super::canonical::{is_canonical, DistanceWordMatrix};
use crate::exact::{bareiss_bigint, bareiss_i128};

/// Whether a run counts simplices whose largest edge equals the diameter
/// exactly, or all simplices with edges up to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiameterMode {
    Exact,
    UpTo,
}

/// Order in which the independent row-0 subtrees are handed to the pool.
/// Results are identical either way; having both orders makes that easy
/// to demonstrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubtreeOrder {
    Forward,
    Reversed,
}

#[derive(Debug, Clone)]
pub struct CensusTask {
    /// Simplex dimension d; the search runs on d + 1 points.
    pub dimension: usize,
    /// Largest edge label D.
    pub diameter: u32,
    pub mode: DiameterMode,
    /// Keep the canonical representatives, not just the count.
    pub emit_representatives: bool,
    /// Worker threads; 0 picks the pool default.
    pub jobs: usize,
    /// Abort after roughly this many search nodes; 0 disables the cap.
    /// Enforced to within one batch per worker.
    pub node_budget: u64,
    /// Abort after this much wall time; zero disables the cap.
    pub time_budget: Duration,
    pub subtree_order: SubtreeOrder,
}

impl CensusTask {
    pub fn new(dimension: usize, diameter: u32) -> Self {
        CensusTask {
            dimension,
            diameter,
            mode: DiameterMode::Exact,
            emit_representatives: false,
            jobs: 0,
            node_budget: 1_000_000_000,
            time_budget: Duration::from_secs(600),
            subtree_order: SubtreeOrder::Forward,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CensusStats {
    /// Candidate placements examined.
    pub nodes: u64,
    /// Placements rejected by the strict triangle inequality.
    pub pruned_triangle: u64,
    /// Placements rejected by a subset determinant sign.
    pub pruned_realizability: u64,
    /// Full words rejected as relabelings of an earlier class.
    pub pruned_canonicity: u64,
}

#[derive(Debug, Clone)]
pub struct CensusResult {
    pub task: CensusTask,
    /// Congruence classes found.
    pub count: u64,
    /// Canonical words in ascending order, when requested.
    pub representatives: Option<Vec<DistanceWordMatrix>>,
    pub stats: CensusStats,
    pub elapsed: Duration,
}

#[derive(Debug, Error)]
pub enum CensusError {
    #[error("invalid task: {0}")]
    InvalidTask(String),
    #[error(
        "node or time budget exceeded after {} nodes in {:.2} s",
        .stats.nodes,
        .elapsed.as_secs_f64()
    )]
    BudgetExceeded { stats: CensusStats, elapsed: Duration },
}

struct Shared {
    n: usize,
    dmax: u32,
    total: usize,
    pairs: Vec<(usize, usize)>,
    mode: DiameterMode,
    emit: bool,
    node_budget: u64,
    deadline: Option<Instant>,
    nodes: AtomicU64,
    aborted: AtomicBool,
}

#[derive(Default)]
struct Local {
    count: u64,
    reps: Vec<DistanceWordMatrix>,
    pruned_triangle: u64,
    pruned_realizability: u64,
    pruned_canonicity: u64,
    unflushed: u64,
    verts: Vec<usize>,
    scratch: Vec<i128>,
}

/// Fold the batched node counter into the shared one and re-check the
/// budgets. Returns false once the run is aborted.
fn flush(sh: &Shared, local: &mut Local) -> bool {
    let k = std::mem::take(&mut local.unflushed);
    if k > 0 {
        let c = sh.nodes.fetch_add(k, Ordering::Relaxed) + k;
        if sh.node_budget > 0 && c > sh.node_budget {
            sh.aborted.store(true, Ordering::Relaxed);
        } else if sh.deadline.is_some_and(|dl| Instant::now() > dl) {
            sh.aborted.store(true, Ordering::Relaxed);
        }
    }
    !sh.aborted.load(Ordering::Relaxed)
}

#[inline]
fn bump(sh: &Shared, local: &mut Local) -> bool {
    local.unflushed += 1;
    if local.unflushed >= 1024 {
        flush(sh, local)
    } else {
        !sh.aborted.load(Ordering::Relaxed)
    }
}

/// Strict sign test for one completed subset: the bordered determinant of
/// its squared labels must be nonzero with sign (-1)^{subset size}.
fn subset_strictly_nondegenerate(
    grid: &[u32],
    n: usize,
    verts: &[usize],
    scratch: &mut Vec<i128>,
) -> bool {
    let s = verts.len();
    let side = s + 1;
    scratch.clear();
    scratch.resize(side * side, 0);
    for (r, &a) in verts.iter().enumerate() {
        scratch[r + 1] = 1;
        scratch[(r + 1) * side] = 1;
        for (c, &b) in verts.iter().enumerate() {
            let d = grid[a * n + b] as i128;
            scratch[(r + 1) * side + c + 1] = d * d;
        }
    }
    if let Some(det) = bareiss_i128(scratch, side) {
        return det != 0 && ((det > 0) == (s % 2 == 0));
    }
    // Overflow needs astronomically large labels; redo exactly.
    let mut big = vec![BigInt::zero(); side * side];
    for (r, &a) in verts.iter().enumerate() {
        big[r + 1] = BigInt::one();
        big[(r + 1) * side] = BigInt::one();
        for (c, &b) in verts.iter().enumerate() {
            let d = BigInt::from(grid[a * n + b]);
            big[(r + 1) * side + c + 1] = &d * &d;
        }
    }
    let det = bareiss_bigint(&mut big, side);
    !det.is_zero() && (det.is_positive() == (s % 2 == 0))
}

/// Check every subset completed by the placement of (i, j): T + {i, j}
/// for T inside {0, ..., i-1} with at least two members.
fn new_subsets_nondegenerate(sh: &Shared, local: &mut Local, grid: &[u32], i: usize, j: usize) -> bool {
    for mask in 0u32..(1u32 << i) {
        if mask.count_ones() < 2 {
            continue;
        }
        local.verts.clear();
        for b in 0..i {
            if (mask >> b) & 1 == 1 {
                local.verts.push(b);
            }
        }
        local.verts.push(i);
        local.verts.push(j);
        if !subset_strictly_nondegenerate(grid, sh.n, &local.verts, &mut local.scratch) {
            return false;
        }
    }
    true
}

fn leaf(sh: &Shared, local: &mut Local, word: &[u32], maxv: u32) {
    if sh.mode == DiameterMode::Exact && maxv != sh.dmax {
        return;
    }
    let m = DistanceWordMatrix::from_word(sh.n, word);
    if is_canonical(&m) {
        local.count += 1;
        if sh.emit {
            local.reps.push(m);
        }
    } else {
        local.pruned_canonicity += 1;
    }
}

fn dfs(
    sh: &Shared,
    local: &mut Local,
    word: &mut [u32],
    grid: &mut [u32],
    t: usize,
    maxv: u32,
) {
    if t == sh.total {
        leaf(sh, local, word, maxv);
        return;
    }
    let (i, j) = sh.pairs[t];
    let n = sh.n;
    'values: for v in 1..=sh.dmax {
        if !bump(sh, local) {
            return;
        }
        for x in 0..i {
            let a = grid[x * n + i];
            let b = grid[x * n + j];
            if a.abs_diff(b) >= v || v >= a + b {
                local.pruned_triangle += 1;
                continue 'values;
            }
        }
        word[t] = v;
        grid[i * n + j] = v;
        grid[j * n + i] = v;
        if i >= 2 && !new_subsets_nondegenerate(sh, local, grid, i, j) {
            local.pruned_realizability += 1;
            continue 'values;
        }
        dfs(sh, local, word, grid, t + 1, maxv.max(v));
        if sh.aborted.load(Ordering::Relaxed) {
            return;
        }
    }
}

fn run_root(sh: &Shared, row0: &[u32]) -> Local {
    let n = sh.n;
    let mut local = Local::default();
    let mut word = vec![0u32; sh.total];
    let mut grid = vec![0u32; n * n];
    for (t, &v) in row0.iter().enumerate() {
        let (i, j) = sh.pairs[t];
        word[t] = v;
        grid[i * n + j] = v;
        grid[j * n + i] = v;
    }
    if bump(sh, &mut local) {
        dfs(sh, &mut local, &mut word, &mut grid, n - 1, *row0.last().expect("n >= 2"));
    }
    flush(sh, &mut local);
    local
}

/// All nondecreasing words of the given length over {1, ..., dmax}, in
/// ascending lexicographic order. These are the row-0 candidates, each an
/// independent search subtree.
fn nondecreasing_words(len: usize, dmax: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![1u32; len];
    loop {
        out.push(cur.clone());
        let Some(i) = (0..len).rev().find(|&i| cur[i] < dmax) else {
            break;
        };
        cur[i] += 1;
        let v = cur[i];
        for slot in cur[i + 1..].iter_mut() {
            *slot = v;
        }
    }
    out
}

/// Count (and optionally collect) the congruence classes of nondegenerate
/// simplices with integer edge labels, per the task's diameter rule.
pub fn enumerate(task: &CensusTask) -> Result<CensusResult, CensusError> {
    if task.dimension == 0 {
        return Err(CensusError::InvalidTask("dimension must be at least 1".into()));
    }
    if task.dimension > 20 {
        return Err(CensusError::InvalidTask(format!(
            "dimension {} is beyond the search's design range (20)",
            task.dimension
        )));
    }
    if task.diameter == 0 {
        return Err(CensusError::InvalidTask("diameter must be at least 1".into()));
    }
    if task.diameter > 1_000_000 {
        return Err(CensusError::InvalidTask(format!(
            "diameter {} is beyond the search's design range (1000000)",
            task.diameter
        )));
    }
    let n = task.dimension + 1;
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((i, j));
        }
    }
    let start = Instant::now();
    let sh = Shared {
        n,
        dmax: task.diameter,
        total: pairs.len(),
        pairs,
        mode: task.mode,
        emit: task.emit_representatives,
        node_budget: task.node_budget,
        deadline: (task.time_budget > Duration::ZERO).then(|| start + task.time_budget),
        nodes: AtomicU64::new(0),
        aborted: AtomicBool::new(false),
    };
    let mut roots = nondecreasing_words(n - 1, task.diameter);
    if task.subtree_order == SubtreeOrder::Reversed {
        roots.reverse();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(task.jobs)
        .build()
        .map_err(|e| CensusError::InvalidTask(format!("thread pool: {e}")))?;
    let locals: Vec<Local> =
        pool.install(|| roots.par_iter().map(|row0| run_root(&sh, row0)).collect());
    let elapsed = start.elapsed();
    let mut stats = CensusStats { nodes: sh.nodes.load(Ordering::Relaxed), ..CensusStats::default() };
    let mut count = 0u64;
    let mut reps = Vec::new();
    for local in locals {
        count += local.count;
        stats.pruned_triangle += local.pruned_triangle;
        stats.pruned_realizability += local.pruned_realizability;
        stats.pruned_canonicity += local.pruned_canonicity;
        reps.extend(local.reps);
    }
    if sh.aborted.load(Ordering::Relaxed) {
        return Err(CensusError::BudgetExceeded { stats, elapsed });
    }
    reps.sort_unstable();
    Ok(CensusResult {
        task: task.clone(),
        count,
        representatives: task.emit_representatives.then_some(reps),
        stats,
        elapsed,
    })
}

/// One cell of a census table.
#[derive(Debug, Clone)]
pub struct TableCell {
    pub dimension: usize,
    pub diameter: u32,
    pub count: u64,
    pub nodes: u64,
    pub seconds: f64,
}

/// Run the task template over a grid of dimensions and diameters,
/// smallest cells first, stopping at the first failure.
pub fn census_table(
    dimensions: RangeInclusive<usize>,
    diameters: RangeInclusive<u32>,
    template: &CensusTask,
) -> Result<Vec<TableCell>, CensusError> {
    let mut out = Vec::new();
    for dimension in dimensions {
        for diameter in diameters.clone() {
            let mut task = template.clone();
            task.dimension = dimension;
            task.diameter = diameter;
            task.emit_representatives = false;
            let r = enumerate(&task)?;
            out.push(TableCell {
                dimension,
                diameter,
                count: r.count,
                nodes: r.stats.nodes,
                seconds: r.elapsed.as_secs_f64(),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bijection::{matrix_to_partition, partition_count, Partition};
    use crate::geometry::minimal_embedding_dimension;
    use num::ToPrimitive;

    fn count(dimension: usize, diameter: u32, mode: DiameterMode) -> u64 {
        let mut t = CensusTask::new(dimension, diameter);
        t.mode = mode;
        enumerate(&t).expect("search within budget").count
    }

    #[test]
    fn segments_have_one_class_per_length() {
        for diameter in 1..=5 {
            assert_eq!(count(1, diameter, DiameterMode::Exact), 1);
        }
        assert_eq!(count(1, 3, DiameterMode::UpTo), 3);
    }

    #[test]
    fn triangles_by_exact_diameter() {
        // Integer-sided triangles up to congruence, strict triangle
        // inequality, largest side exactly D. By hand: D = 2 gives
        // (1,2,2), (2,2,2); D = 3 gives (1,3,3), (2,2,3), (2,3,3),
        // (3,3,3); D = 4 adds (1,4,4), (2,3,4), (2,4,4), (3,3,4),
        // (3,4,4), (4,4,4).
        assert_eq!(count(2, 1, DiameterMode::Exact), 1);
        assert_eq!(count(2, 2, DiameterMode::Exact), 2);
        assert_eq!(count(2, 3, DiameterMode::Exact), 4);
        assert_eq!(count(2, 4, DiameterMode::Exact), 6);
    }

    #[test]
    fn three_dimensional_counts() {
        assert_eq!(count(3, 1, DiameterMode::Exact), 1);
        assert_eq!(count(3, 2, DiameterMode::Exact), 4);
        assert_eq!(count(3, 3, DiameterMode::Exact), 16);
    }

    #[test]
    fn up_to_mode_sums_the_exact_counts() {
        for (dimension, diameter) in [(2, 4), (3, 3), (4, 2)] {
            let total = count(dimension, diameter, DiameterMode::UpTo);
            let sum: u64 =
                (1..=diameter).map(|k| count(dimension, k, DiameterMode::Exact)).sum();
            assert_eq!(total, sum, "d = {dimension}, D = {diameter}");
        }
    }

    #[test]
    fn diameter_one_is_always_the_regular_simplex() {
        for dimension in 1..=7 {
            assert_eq!(count(dimension, 1, DiameterMode::Exact), 1);
        }
    }

    #[test]
    fn diameter_two_tracks_the_partition_numbers() {
        // At D = 2 the classes are the clustered two-distance sets minus
        // the all-ones regular simplex.
        for dimension in 2..=6usize {
            let p = partition_count(dimension + 1).to_u64().expect("small");
            assert_eq!(count(dimension, 2, DiameterMode::Exact), p - 1);
        }
    }

    #[test]
    fn representatives_are_canonical_strict_and_on_diameter() {
        let mut t = CensusTask::new(3, 2);
        t.emit_representatives = true;
        let r = enumerate(&t).expect("small search");
        let reps = r.representatives.expect("requested");
        assert_eq!(reps.len(), r.count as usize);
        assert_eq!(reps.len(), 4);
        let mut parts: Vec<Partition> = Vec::new();
        for m in &reps {
            assert!(is_canonical(m));
            assert_eq!(m.max_label(), 2);
            let report = minimal_embedding_dimension(&m.to_squared_matrix());
            assert_eq!(report.realizable_in_dim, Some(3));
            assert!(report.nondegenerate);
            parts.push(matrix_to_partition(&m.to_squared_matrix()).expect("clustered"));
        }
        parts.sort();
        parts.dedup();
        // Partitions of 4 except the single block (that one has diameter 1).
        assert_eq!(parts.len(), 4);
    }

    #[test]
    fn determinism_across_jobs_and_subtree_order() {
        let mut base = CensusTask::new(3, 3);
        base.emit_representatives = true;
        let reference = enumerate(&base).expect("small search");
        for jobs in [1, 2, 8] {
            for order in [SubtreeOrder::Forward, SubtreeOrder::Reversed] {
                let mut t = base.clone();
                t.jobs = jobs;
                t.subtree_order = order;
                let r = enumerate(&t).expect("small search");
                assert_eq!(r.count, reference.count);
                assert_eq!(r.representatives, reference.representatives);
                assert_eq!(r.stats, reference.stats);
            }
        }
    }

    #[test]
    fn node_budget_aborts_with_partial_stats() {
        let mut t = CensusTask::new(4, 3);
        t.node_budget = 40;
        match enumerate(&t) {
            Err(CensusError::BudgetExceeded { stats, .. }) => assert!(stats.nodes > 40),
            other => panic!("expected a budget error, got {other:?}"),
        }
    }

    #[test]
    fn time_budget_aborts() {
        let mut t = CensusTask::new(5, 3);
        t.time_budget = Duration::from_nanos(1);
        assert!(matches!(enumerate(&t), Err(CensusError::BudgetExceeded { .. })));
    }

    #[test]
    fn invalid_tasks_are_rejected() {
        for t in [CensusTask::new(0, 2), CensusTask::new(3, 0), CensusTask::new(21, 1)] {
            assert!(matches!(enumerate(&t), Err(CensusError::InvalidTask(_))));
        }
    }

    #[test]
    fn table_covers_the_grid_in_order() {
        let cells =
            census_table(2..=3, 1..=2, &CensusTask::new(1, 1)).expect("small grid");
        let triples: Vec<(usize, u32, u64)> =
            cells.iter().map(|c| (c.dimension, c.diameter, c.count)).collect();
        assert_eq!(triples, vec![(2, 1, 1), (2, 2, 2), (3, 1, 1), (3, 2, 4)]);
    }

    #[test]
    fn row_zero_candidates_are_sorted_and_complete() {
        let words = nondecreasing_words(3, 2);
        assert_eq!(
            words,
            vec![vec![1, 1, 1], vec![1, 1, 2], vec![1, 2, 2], vec![2, 2, 2]]
        );
        assert_eq!(nondecreasing_words(5, 4).len(), 56);
    }
}
