//! File formats and table rendering.
//!
//! Exact data is serialized as JSON with every rational encoded as a bare
//! integer when the denominator is 1 (and the value fits a 64-bit integer)
//! and as a `"p/q"` string otherwise, so matrices and Gram entries never
//! pass through floating point. Embedding coordinates are the only floats;
//! serde_json writes them with the shortest decimal that round-trips.

use std::collections::BTreeSet;
use std::fmt;

use intsimplex::bijection::Partition;
use intsimplex::census::{CensusResult, DiameterMode, TableCell};
use intsimplex::embedding::Embedding;
use intsimplex::exact::{parse_rational, Rational};
use intsimplex::{SquareMatrix, SquaredDistanceMatrix};
use num::{One, ToPrimitive};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    /// serde_json syntax and type errors, which carry line/column positions.
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("field n is {n} but sq_dists has {rows} rows")]
    WrongRowCount { n: usize, rows: usize },
    #[error("{0}")]
    Matrix(#[from] intsimplex::exact::MatrixError),
    #[error("{0}")]
    Partition(#[from] intsimplex::bijection::BijectionError),
    #[error("partition sums to {expected} points but the file has {actual}")]
    PartitionMismatch { expected: usize, actual: usize },
    #[error("gram matrix is {gram}x{gram} but the file has {points} points")]
    GramMismatch { gram: usize, points: usize },
    #[error("point {index} has {len} coordinates, expected ambient_dim = {ambient}")]
    BadPointLength { index: usize, len: usize, ambient: usize },
}

/// A rational in the file encoding: integer or `"p/q"` string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rat(pub Rational);

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.denom().is_one() {
            if let Some(i) = self.0.numer().to_i64() {
                return s.serialize_i64(i);
            }
        }
        s.serialize_str(&self.0.to_string())
    }
}

struct RatVisitor;

impl Visitor<'_> for RatVisitor {
    type Value = Rat;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an integer or a \"p/q\" rational string")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rat, E> {
        Ok(Rat(Rational::from_integer(v.into())))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rat, E> {
        Ok(Rat(Rational::from_integer(v.into())))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Rat, E> {
        parse_rational(v).map(Rat).map_err(E::custom)
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        d.deserialize_any(RatVisitor)
    }
}

fn rational_grid(m: &SquareMatrix) -> Vec<Vec<Rat>> {
    m.rows().map(|r| r.iter().cloned().map(Rat).collect()).collect()
}

/// On-disk form of a squared-distance matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub n: usize,
    pub sq_dists: Vec<Vec<Rat>>,
}

impl MatrixFile {
    pub fn from_matrix(a: &SquaredDistanceMatrix) -> Self {
        MatrixFile { n: a.points(), sq_dists: rational_grid(a.matrix()) }
    }

    /// Validates shape, symmetry, zero diagonal and positivity on the way in.
    pub fn to_matrix(&self) -> Result<SquaredDistanceMatrix, FormatError> {
        if self.sq_dists.len() != self.n {
            return Err(FormatError::WrongRowCount { n: self.n, rows: self.sq_dists.len() });
        }
        let rows = self
            .sq_dists
            .iter()
            .map(|r| r.iter().map(|x| x.0.clone()).collect())
            .collect();
        Ok(SquaredDistanceMatrix::from_rows(rows)?)
    }

    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("matrix files always serialize")
    }
}

/// On-disk form of an embedding: float coordinates plus the exact Gram
/// matrix they realize.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingFile {
    pub ambient_dim: usize,
    pub points: Vec<Vec<f64>>,
    pub gram: Vec<Vec<Rat>>,
    pub partition: Vec<u32>,
    pub lambda_sq: Rat,
}

impl EmbeddingFile {
    pub fn from_embedding(e: &Embedding) -> Self {
        EmbeddingFile {
            ambient_dim: e.ambient_dim,
            points: e.points.clone(),
            gram: rational_grid(&e.gram),
            partition: e.partition.parts().to_vec(),
            lambda_sq: Rat(e.lambda_sq.clone()),
        }
    }

    /// Rebuilds the in-memory embedding; the block map is implied by the
    /// partition, everything else is checked for consistency.
    pub fn to_embedding(&self) -> Result<Embedding, FormatError> {
        let partition = Partition::new(self.partition.clone())?;
        if partition.n() != self.points.len() {
            return Err(FormatError::PartitionMismatch {
                expected: partition.n(),
                actual: self.points.len(),
            });
        }
        if self.gram.len() != self.points.len() {
            return Err(FormatError::GramMismatch {
                gram: self.gram.len(),
                points: self.points.len(),
            });
        }
        for (index, p) in self.points.iter().enumerate() {
            if p.len() != self.ambient_dim {
                return Err(FormatError::BadPointLength {
                    index,
                    len: p.len(),
                    ambient: self.ambient_dim,
                });
            }
        }
        let rows = self.gram.iter().map(|r| r.iter().map(|x| x.0.clone()).collect()).collect();
        let gram = SquareMatrix::from_rows(rows)?;
        let mut block_of = Vec::with_capacity(partition.n());
        for (b, &size) in partition.parts().iter().enumerate() {
            block_of.extend(std::iter::repeat(b).take(size as usize));
        }
        Ok(Embedding {
            points: self.points.clone(),
            ambient_dim: self.ambient_dim,
            gram,
            block_of,
            partition,
            lambda_sq: self.lambda_sq.0.clone(),
        })
    }

    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("embedding files always serialize")
    }
}

pub const CENSUS_CSV_HEADER: &str = "dimension,diameter,count,nodes,seconds";

pub fn census_csv_row(r: &CensusResult) -> String {
    format!(
        "{},{},{},{},{:.3}",
        r.task.dimension,
        r.task.diameter,
        r.count,
        r.stats.nodes,
        r.elapsed.as_secs_f64()
    )
}

pub fn census_text(r: &CensusResult) -> String {
    let mode = match r.task.mode {
        DiameterMode::Exact => "exact",
        DiameterMode::UpTo => "upto",
    };
    format!(
        "count {} (dimension {}, diameter {}, {})\n\
         searched {} nodes in {:.3} s; pruned: triangle {}, realizability {}, canonicity {}",
        r.count,
        r.task.dimension,
        r.task.diameter,
        mode,
        r.stats.nodes,
        r.elapsed.as_secs_f64(),
        r.stats.pruned_triangle,
        r.stats.pruned_realizability,
        r.stats.pruned_canonicity
    )
}

/// Pivot table cells into a diameter-by-dimension grid: one row per
/// diameter, one column per dimension, in increasing order.
fn grid_axes(cells: &[TableCell]) -> (Vec<u32>, Vec<usize>) {
    let diameters: BTreeSet<u32> = cells.iter().map(|c| c.diameter).collect();
    let dimensions: BTreeSet<usize> = cells.iter().map(|c| c.dimension).collect();
    (diameters.into_iter().collect(), dimensions.into_iter().collect())
}

fn grid_lookup(cells: &[TableCell], dimension: usize, diameter: u32) -> Option<u64> {
    cells
        .iter()
        .find(|c| c.dimension == dimension && c.diameter == diameter)
        .map(|c| c.count)
}

pub fn grid_csv(cells: &[TableCell]) -> String {
    let (diameters, dimensions) = grid_axes(cells);
    let mut out = String::from("diameter");
    for d in &dimensions {
        out.push_str(&format!(",d={d}"));
    }
    out.push('\n');
    for &k in &diameters {
        out.push_str(&k.to_string());
        for &d in &dimensions {
            match grid_lookup(cells, d, k) {
                Some(c) => out.push_str(&format!(",{c}")),
                None => out.push(','),
            }
        }
        out.push('\n');
    }
    out
}

pub fn grid_text(cells: &[TableCell]) -> String {
    let (diameters, dimensions) = grid_axes(cells);
    let mut header: Vec<String> = vec!["diameter".to_owned()];
    header.extend(dimensions.iter().map(|d| format!("d={d}")));
    let mut rows: Vec<Vec<String>> = vec![header];
    for &k in &diameters {
        let mut row = vec![k.to_string()];
        for &d in &dimensions {
            row.push(match grid_lookup(cells, d, k) {
                Some(c) => c.to_string(),
                None => "-".to_owned(),
            });
        }
        rows.push(row);
    }
    align_columns(&rows)
}

/// Right-align each column to its widest entry, two spaces between columns.
pub fn align_columns(rows: &[Vec<String>]) -> String {
    let columns = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    let mut widths = vec![0usize; columns];
    for row in rows {
        for (j, cell) in row.iter().enumerate() {
            widths[j] = widths[j].max(cell.len());
        }
    }
    let mut out = String::new();
    for row in rows {
        for (j, cell) in row.iter().enumerate() {
            if j > 0 {
                out.push_str("  ");
            }
            out.push_str(&" ".repeat(widths[j] - cell.len()));
            out.push_str(cell);
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use intsimplex::embedding::build_coordinates;
    use intsimplex::exact::rat_int;

    fn sample_matrix() -> SquaredDistanceMatrix {
        let rows = vec![
            vec![rat_int(0), rat_int(1), rat_int(4)],
            vec![rat_int(1), rat_int(0), rat_int(4)],
            vec![rat_int(4), rat_int(4), rat_int(0)],
        ];
        SquaredDistanceMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn matrix_file_round_trips_bit_exact() {
        let a = sample_matrix();
        let file = MatrixFile::from_matrix(&a);
        let text = file.to_json();
        let back = MatrixFile::parse(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_matrix().unwrap(), a);
    }

    #[test]
    fn rationals_encode_as_integers_or_strings() {
        let file = MatrixFile {
            n: 2,
            sq_dists: vec![
                vec![Rat(rat_int(0)), Rat(intsimplex::exact::rat(9, 4))],
                vec![Rat(intsimplex::exact::rat(9, 4)), Rat(rat_int(0))],
            ],
        };
        let text = file.to_json();
        assert!(text.contains("\"9/4\""), "{text}");
        assert!(!text.contains("\"0\""), "integers must stay bare: {text}");
        let back = MatrixFile::parse(&text).unwrap();
        assert_eq!(back, file);
    }

    #[test]
    fn matrix_file_rejects_shape_and_symmetry_errors() {
        let bad = r#"{"n": 3, "sq_dists": [[0, 1], [1, 0]]}"#;
        let err = MatrixFile::parse(bad).unwrap().to_matrix().unwrap_err();
        assert!(matches!(err, FormatError::WrongRowCount { n: 3, rows: 2 }));

        let asym = r#"{"n": 2, "sq_dists": [[0, 1], [2, 0]]}"#;
        let err = MatrixFile::parse(asym).unwrap().to_matrix().unwrap_err();
        assert!(matches!(err, FormatError::Matrix(_)));

        // Syntax errors surface serde_json's line/column diagnostics.
        let err = MatrixFile::parse("{\"n\": 2,\n  \"sq_dists\": [[0, }]]").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn embedding_file_round_trips() {
        let pi = Partition::new(vec![2, 1]).unwrap();
        let e = build_coordinates(&pi, &rat_int(4)).unwrap();
        let file = EmbeddingFile::from_embedding(&e);
        let back = EmbeddingFile::parse(&file.to_json()).unwrap();
        assert_eq!(back, file);

        let rebuilt = back.to_embedding().unwrap();
        assert_eq!(rebuilt.points, e.points);
        assert_eq!(rebuilt.gram, e.gram);
        assert_eq!(rebuilt.block_of, e.block_of);
        assert_eq!(rebuilt.partition, e.partition);
        assert_eq!(rebuilt.lambda_sq, e.lambda_sq);
    }

    #[test]
    fn embedding_file_consistency_checks() {
        let pi = Partition::new(vec![1, 1]).unwrap();
        let e = build_coordinates(&pi, &rat_int(4)).unwrap();
        let good = EmbeddingFile::from_embedding(&e);

        let mut bad = good.clone();
        bad.partition = vec![3];
        assert!(matches!(
            bad.to_embedding().unwrap_err(),
            FormatError::PartitionMismatch { expected: 3, actual: 2 }
        ));

        let mut bad = good.clone();
        bad.points[1].push(0.0);
        assert!(matches!(
            bad.to_embedding().unwrap_err(),
            FormatError::BadPointLength { index: 1, .. }
        ));

        let mut bad = good;
        bad.gram.pop();
        assert!(matches!(bad.to_embedding().unwrap_err(), FormatError::GramMismatch { .. }));
    }

    #[test]
    fn grid_renders_diameter_rows_and_dimension_columns() {
        let cells = vec![
            TableCell { dimension: 3, diameter: 1, count: 1, nodes: 10, seconds: 0.0 },
            TableCell { dimension: 3, diameter: 2, count: 4, nodes: 20, seconds: 0.0 },
            TableCell { dimension: 4, diameter: 1, count: 1, nodes: 10, seconds: 0.0 },
            TableCell { dimension: 4, diameter: 2, count: 6, nodes: 40, seconds: 0.0 },
        ];
        let csv = grid_csv(&cells);
        assert_eq!(csv, "diameter,d=3,d=4\n1,1,1\n2,4,6\n");

        let text = grid_text(&cells);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "diameter  d=3  d=4");
        assert_eq!(lines[1], "       1    1    1");
        assert_eq!(lines[2], "       2    4    6");
    }
}
