//! Cross-module invariants: the census, the partition correspondence, the
//! geometry verdicts, and the explicit construction must all tell the same
//! story about the same objects.

use std::collections::BTreeSet;

use intsimplex::bijection::{
    enumerate_partitions, matrix_to_partition, partition_to_matrix, sigma, threshold_scan,
    Partition,
};
use intsimplex::census::{canonical_form, enumerate, CensusTask, DistanceWordMatrix};
use intsimplex::embedding::{build_coordinates, reduce_dimension};
use intsimplex::exact::{rat, rat_int};
use intsimplex::geometry::minimal_embedding_dimension;
use num::ToPrimitive;

fn emitted(task: &mut CensusTask) -> Vec<DistanceWordMatrix> {
    task.emit_representatives = true;
    enumerate(task).expect("small cell").representatives.expect("emission requested")
}

/// Distance word of the matrix with label 1 inside blocks and 2 across.
fn cluster_word(pi: &Partition) -> DistanceWordMatrix {
    let mut block_of = Vec::new();
    for (b, &size) in pi.parts().iter().enumerate() {
        block_of.extend(std::iter::repeat(b).take(size as usize));
    }
    let n = pi.n();
    let mut word = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            word.push(if block_of[i] == block_of[j] { 1 } else { 2 });
        }
    }
    DistanceWordMatrix::from_word(n, &word)
}

/// The diameter-2 classes are exactly the multi-block cluster patterns:
/// same canonical words in both directions, and the recovered partitions
/// are exactly the partitions of d+1 with at least two blocks.
#[test]
fn diameter_two_classes_are_the_cluster_patterns() {
    for d in 3usize..=6 {
        let n = d + 1;
        let reps = emitted(&mut CensusTask::new(d, 2));
        let rep_words: BTreeSet<Vec<u32>> = reps.iter().map(|m| m.word()).collect();

        let mut cluster_words = BTreeSet::new();
        let mut partitions = BTreeSet::new();
        for pi in enumerate_partitions(n) {
            if pi.len() < 2 {
                continue; // a single block never reaches distance 2
            }
            cluster_words.insert(canonical_form(&cluster_word(&pi)).word);
            partitions.insert(pi.parts().to_vec());
        }
        assert_eq!(rep_words, cluster_words, "canonical words disagree at d = {d}");

        let recovered: BTreeSet<Vec<u32>> = reps
            .iter()
            .map(|m| {
                matrix_to_partition(&m.to_squared_matrix())
                    .expect("diameter-2 classes are clustered")
                    .parts()
                    .to_vec()
            })
            .collect();
        assert_eq!(recovered, partitions, "recovered partitions disagree at d = {d}");
    }
}

/// Every emitted representative really is a nondegenerate d-simplex, and
/// in exact mode its largest label really is the requested diameter.
#[test]
fn census_representatives_are_full_dimensional_simplices() {
    for (d, diameter) in [(3usize, 3u32), (4, 3)] {
        let reps = emitted(&mut CensusTask::new(d, diameter));
        for m in &reps {
            assert_eq!(m.max_label(), diameter);
            let report = minimal_embedding_dimension(&m.to_squared_matrix());
            assert_eq!(report.realizable_in_dim, Some(d), "{m}");
            assert!(report.nondegenerate, "{m}");
            assert_eq!(report.witness, None);
        }
    }
}

/// The sign conditions promise full rank; the geometry module and the
/// coordinate construction must deliver it for every partition.
#[test]
fn cluster_matrices_realize_as_full_dimensional_simplices() {
    for n in 2usize..=9 {
        for pi in enumerate_partitions(n) {
            for lambda_sq in [rat_int(4), rat(17, 4)] {
                let a = partition_to_matrix(&pi, &lambda_sq).expect("lambda above the bound");
                let report = minimal_embedding_dimension(&a);
                assert_eq!(report.realizable_in_dim, Some(n - 1), "{pi} at {lambda_sq}");
                assert!(report.nondegenerate, "{pi} at {lambda_sq}");

                let emb = build_coordinates(&pi, &lambda_sq).expect("construction applies");
                let reduced = reduce_dimension(&emb).expect("full rank");
                assert_eq!(reduced.ambient_dim, n - 1);
                let sq = reduced.squared_distance_matrix();
                for i in 0..n {
                    for j in 0..n {
                        assert_eq!(sq[(i, j)], *a.entry(i, j), "{pi} at {lambda_sq}");
                    }
                }
            }
        }
    }
}

/// The scan flips verdict exactly where the threshold says it should.
/// For d+1 points in dimension d the governing value is sigma(d-1):
/// 29/8 sits below sigma(d-1)^2 and admits extra patterns, 15/4 sits
/// above it and restores the correspondence.
#[test]
fn scan_verdicts_straddle_the_threshold() {
    let below = rat(29, 8);
    let above = rat(15, 4);
    for d in [3usize, 4, 5] {
        let s = sigma(d as u64 - 1).expect("d - 1 >= 2").value;
        let s_sq = s * s;
        assert!(below.to_f64().unwrap() < s_sq && s_sq < above.to_f64().unwrap(), "d = {d}");

        let rows = threshold_scan(d, &[below.clone(), above.clone()]).expect("small scan");
        assert!(!rows[0].bijection_holds(), "d = {d} below the threshold");
        assert!(!rows[0].unexpected_words.is_empty(), "d = {d} below the threshold");
        assert!(rows[1].bijection_holds(), "d = {d} above the threshold");
        assert_eq!(
            rows[1].realizable_count,
            rows[1].partition_count,
            "d = {d} above the threshold"
        );
    }
}

/// Dimension 2 has no formula threshold: the flip is the triangle
/// inequality itself. Sides (1, 1, lambda) close a genuine triangle for
/// every lambda < 2, so any lambda^2 below 4 admits that extra word.
#[test]
fn two_dimensional_flip_is_the_triangle_bound() {
    let rows = threshold_scan(2, &[rat(15, 4), rat_int(4)]).expect("small scan");
    assert!(!rows[0].bijection_holds());
    assert!(rows[0].unexpected_words.contains(&vec![1, 1, 2]));
    assert!(rows[1].bijection_holds());
}
