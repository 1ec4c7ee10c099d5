//! Vector dataset ingestion and dissimilarity weight matrices.
//!
//! Datasets come from delimiter-separated numeric text (comma, tab, or
//! whitespace, auto-detected). A [`WeightMatrix`] holds the pairwise
//! dissimilarities the cut algorithm operates on, and can be enlarged with
//! zero rows/columns to relax the ambient dimension without adding weight.

use ndarray::{s, Array2, ArrayView1};

use crate::error::{Error, Result};

/// A set of `n` points of identical dimension `d`, with optional labels kept
/// for evaluation only.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    points: Array2<f64>,
    labels: Option<Vec<String>>,
}

impl Dataset {
    pub fn new(points: Vec<Vec<f64>>, labels: Option<Vec<String>>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Size(format!(
                "a dataset needs at least 2 points, got {}",
                points.len()
            )));
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::Size("points must have dimension >= 1".into()));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::Dimension(format!(
                    "point {} has dimension {} but the first point has {}",
                    i,
                    p.len(),
                    dim
                )));
            }
            if let Some(bad) = p.iter().find(|c| !c.is_finite()) {
                return Err(Error::Domain(format!(
                    "point {i} contains a non-finite coordinate {bad}"
                )));
            }
        }
        if let Some(ref l) = labels {
            if l.len() != points.len() {
                return Err(Error::Dimension(format!(
                    "{} labels for {} points",
                    l.len(),
                    points.len()
                )));
            }
        }
        let n = points.len();
        let mut flat = Array2::zeros((n, dim));
        for (i, p) in points.iter().enumerate() {
            for (j, &c) in p.iter().enumerate() {
                flat[[i, j]] = c;
            }
        }
        Ok(Self {
            points: flat,
            labels,
        })
    }

    /// Build a dataset directly from an `n x d` matrix of coordinates.
    pub fn from_matrix(points: Array2<f64>) -> Result<Self> {
        let rows: Vec<Vec<f64>> = points.rows().into_iter().map(|r| r.to_vec()).collect();
        Self::new(rows, None)
    }

    pub fn len(&self) -> usize {
        self.points.nrows()
    }

    pub fn is_empty(&self) -> bool {
        false // n >= 2 by construction
    }

    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    pub fn point(&self, i: usize) -> ArrayView1<'_, f64> {
        self.points.row(i)
    }

    pub fn points(&self) -> &Array2<f64> {
        &self.points
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }
}

/// Pairwise dissimilarity rule used when building a weight matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightKind {
    #[default]
    Euclidean,
    SquaredEuclidean,
}

impl std::str::FromStr for WeightKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(WeightKind::Euclidean),
            "squared" | "squared_euclidean" => Ok(WeightKind::SquaredEuclidean),
            other => Err(Error::Config(format!(
                "unknown weight kind '{other}' (expected euclidean or squared)"
            ))),
        }
    }
}

/// Symmetric nonnegative dissimilarity matrix with zero diagonal.
///
/// Indices at or beyond `original_count` are padding: their rows and columns
/// are identically zero, so they carry no weight toward any cut.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    entries: Array2<f64>,
    original_count: usize,
}

impl WeightMatrix {
    /// Validating constructor for externally supplied matrices.
    pub fn from_entries(entries: Array2<f64>, original_count: usize) -> Result<Self> {
        let m = entries.nrows();
        if entries.ncols() != m {
            return Err(Error::Dimension(format!(
                "weight matrix must be square, got {}x{}",
                m,
                entries.ncols()
            )));
        }
        if m == 0 || original_count == 0 || original_count > m {
            return Err(Error::Dimension(format!(
                "original count {original_count} out of range for size {m}"
            )));
        }
        for i in 0..m {
            if entries[[i, i]] != 0.0 {
                return Err(Error::Domain(format!("diagonal entry ({i},{i}) is not zero")));
            }
            for j in 0..m {
                let e = entries[[i, j]];
                if !e.is_finite() || e < 0.0 {
                    return Err(Error::Domain(format!("entry ({i},{j}) = {e} is invalid")));
                }
                if e != entries[[j, i]] {
                    return Err(Error::Domain(format!("entries ({i},{j}) and ({j},{i}) differ")));
                }
                if (i >= original_count || j >= original_count) && e != 0.0 {
                    return Err(Error::Domain(format!(
                        "padding entry ({i},{j}) must be zero, got {e}"
                    )));
                }
            }
        }
        Ok(Self {
            entries,
            original_count,
        })
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    /// Number of real (non-padding) points.
    pub fn original_count(&self) -> usize {
        self.original_count
    }

    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[[i, j]]
    }

    /// Sum of w_ij over unordered pairs i < j.
    pub fn total_weight(&self) -> f64 {
        let m = self.size();
        let mut total = 0.0;
        for i in 0..m {
            for j in (i + 1)..m {
                total += self.entries[[i, j]];
            }
        }
        total
    }

    pub fn max_weight(&self) -> f64 {
        self.entries.iter().fold(0.0_f64, |a, &b| a.max(b))
    }

    pub fn is_zero(&self) -> bool {
        self.max_weight() == 0.0
    }

    /// Leading `original_count x original_count` block, dropping padding.
    pub fn real_block(&self) -> WeightMatrix {
        let n = self.original_count;
        WeightMatrix {
            entries: self.entries.slice(s![..n, ..n]).to_owned(),
            original_count: n,
        }
    }
}

/// Build the pairwise dissimilarity matrix of a dataset.
pub fn build_weights(ds: &Dataset, kind: WeightKind) -> WeightMatrix {
    let n = ds.len();
    let mut entries = Array2::zeros((n, n));
    for i in 0..n {
        for j in (i + 1)..n {
            let mut sq = 0.0;
            for (a, b) in ds.point(i).iter().zip(ds.point(j).iter()) {
                let d = a - b;
                sq += d * d;
            }
            let w = match kind {
                WeightKind::Euclidean => sq.sqrt(),
                WeightKind::SquaredEuclidean => sq,
            };
            entries[[i, j]] = w;
            entries[[j, i]] = w;
        }
    }
    WeightMatrix {
        entries,
        original_count: n,
    }
}

/// Enlarge a weight matrix to `m x m` by appending zero rows and columns.
///
/// The added indices are phantom points: they touch every other point with
/// weight zero, so the total pairwise weight is unchanged.
pub fn pad_weights(w: &WeightMatrix, m: usize) -> Result<WeightMatrix> {
    let base = w.size();
    if m < base {
        return Err(Error::Dimension(format!(
            "cannot pad a {base}x{base} matrix down to {m}x{m}"
        )));
    }
    let mut entries = Array2::zeros((m, m));
    entries.slice_mut(s![..base, ..base]).assign(&w.entries);
    Ok(WeightMatrix {
        entries,
        original_count: w.original_count,
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Delimiter {
    Comma,
    Tab,
    Whitespace,
}

fn split_fields(line: &str, delim: Delimiter) -> Vec<&str> {
    match delim {
        Delimiter::Comma => line.split(',').map(str::trim).collect(),
        Delimiter::Tab => line.split('\t').map(str::trim).collect(),
        Delimiter::Whitespace => line.split_whitespace().collect(),
    }
}

fn numeric(cell: &str) -> Option<f64> {
    cell.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Parse delimiter-separated numeric text into a dataset.
///
/// The delimiter (comma, tab, or whitespace) is detected from the first
/// non-blank line. A first row in which no cell parses as a number is
/// treated as a header and skipped. With `has_labels`, the last column is
/// kept as a label rather than a coordinate.
pub fn load_dataset(source: &str, has_labels: bool) -> Result<Dataset> {
    let text = source.replace("\r\n", "\n");
    let rows: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty())
        .collect();
    if rows.is_empty() {
        return Err(Error::Size("input contains no data rows".into()));
    }

    let delim = {
        let first = rows[0].1;
        if first.contains(',') {
            Delimiter::Comma
        } else if first.contains('\t') {
            Delimiter::Tab
        } else {
            Delimiter::Whitespace
        }
    };

    // Header row: first row where no cell is numeric.
    let first_fields = split_fields(rows[0].1, delim);
    let skip_header = !first_fields.iter().any(|c| numeric(c).is_some());
    let data_rows = if skip_header { &rows[1..] } else { &rows[..] };

    let mut points: Vec<Vec<f64>> = Vec::with_capacity(data_rows.len());
    let mut labels: Vec<String> = Vec::new();
    let mut expected_cols: Option<usize> = None;

    for &(lineno, line) in data_rows {
        let fields = split_fields(line, delim);
        let cols = *expected_cols.get_or_insert(fields.len());
        if fields.len() != cols {
            return Err(Error::Format {
                line: lineno,
                message: format!("expected {} columns, found {}", cols, fields.len()),
            });
        }
        let coord_cols = if has_labels {
            if cols < 2 {
                return Err(Error::Format {
                    line: lineno,
                    message: "a labeled row needs at least one coordinate column".into(),
                });
            }
            cols - 1
        } else {
            cols
        };
        let mut point = Vec::with_capacity(coord_cols);
        for (c, cell) in fields[..coord_cols].iter().enumerate() {
            match numeric(cell) {
                Some(v) => point.push(v),
                None => {
                    return Err(Error::Parse {
                        line: lineno,
                        message: format!("non-numeric value '{}' in column {}", cell, c + 1),
                    })
                }
            }
        }
        if has_labels {
            labels.push(fields[coord_cols].to_string());
        }
        points.push(point);
    }

    if points.len() < 2 {
        return Err(Error::Size(format!(
            "a dataset needs at least 2 data rows, got {}",
            points.len()
        )));
    }
    Dataset::new(points, has_labels.then_some(labels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn loads_plain_rows() {
        let ds = load_dataset("0,0\n1,0\n0,1\n", false).unwrap();
        assert_eq!(ds.len(), 3);
        assert_eq!(ds.dim(), 2);
        assert_eq!(ds.point(1).to_vec(), vec![1.0, 0.0]);
    }

    #[test]
    fn loads_hundred_rows() {
        let mut text = String::new();
        for i in 0..100 {
            text.push_str(&format!("{},{}\n", i as f64 * 0.1, (i % 7) as f64));
        }
        let ds = load_dataset(&text, false).unwrap();
        assert_eq!(ds.len(), 100);
        assert_eq!(ds.dim(), 2);
    }

    #[test]
    fn non_numeric_cell_reports_line() {
        let err = load_dataset("1,x\n2,3\n", false).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn ragged_row_reports_line() {
        let err = load_dataset("1,2\n3,4,5\n", false).unwrap_err();
        match err {
            Error::Format { line, .. } => assert_eq!(line, 2),
            other => panic!("expected format error, got {other}"),
        }
    }

    #[test]
    fn single_row_is_too_small() {
        assert!(matches!(load_dataset("1,2\n", false), Err(Error::Size(_))));
        assert!(matches!(load_dataset("", false), Err(Error::Size(_))));
    }

    #[test]
    fn header_row_is_skipped() {
        let ds = load_dataset("x,y\n1,2\n3,4\n", false).unwrap();
        assert_eq!(ds.len(), 2);
        // A row with any numeric cell is data, not a header.
        let err = load_dataset("1,x\n", false).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn detects_tab_and_whitespace_delimiters() {
        let tab = load_dataset("1\t2\n3\t4\n", false).unwrap();
        assert_eq!(tab.dim(), 2);
        let ws = load_dataset("1 2\n3 4\n", false).unwrap();
        assert_eq!(ws.dim(), 2);
        assert_eq!(tab.points(), ws.points());
    }

    #[test]
    fn labels_come_from_last_column() {
        let ds = load_dataset("x,y,tag\n1,2,a\n3,4,b\n", true).unwrap();
        assert_eq!(ds.dim(), 2);
        assert_eq!(ds.labels().unwrap(), &["a".to_string(), "b".to_string()]);
    }

    #[test]
    fn euclidean_345_triangle() {
        let ds = Dataset::new(vec![vec![0.0, 0.0], vec![3.0, 4.0]], None).unwrap();
        let w = build_weights(&ds, WeightKind::Euclidean);
        assert_eq!(w.get(0, 1), 5.0);
        let w2 = build_weights(&ds, WeightKind::SquaredEuclidean);
        assert_eq!(w2.get(0, 1), 25.0);
        assert_eq!(w.get(0, 0), 0.0);
        assert_eq!(w.get(1, 1), 0.0);
    }

    #[test]
    fn pad_identity_and_total_weight() {
        let ds = Dataset::new(
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 2.0]],
            None,
        )
        .unwrap();
        let w = build_weights(&ds, WeightKind::Euclidean);
        let same = pad_weights(&w, 3).unwrap();
        assert_eq!(same.entries(), w.entries());
        let padded = pad_weights(&w, 5).unwrap();
        assert_eq!(padded.size(), 5);
        assert_eq!(padded.original_count(), 3);
        assert_eq!(padded.total_weight(), w.total_weight());
        assert!(pad_weights(&w, 2).is_err());
    }

    #[test]
    fn pad_to_figure_sizes() {
        let points: Vec<Vec<f64>> = (0..100)
            .map(|i| vec![(i as f64 * 0.37).sin(), (i as f64 * 0.91).cos()])
            .collect();
        let ds = Dataset::new(points, None).unwrap();
        let w = build_weights(&ds, WeightKind::Euclidean);
        for m in [101usize, 106, 109] {
            let p = pad_weights(&w, m).unwrap();
            assert_eq!(p.size(), m);
            assert_eq!(p.total_weight(), w.total_weight());
            assert_eq!(p.real_block().entries(), w.entries());
        }
    }

    #[test]
    fn from_entries_validates() {
        let ok = Array2::from_shape_vec((2, 2), vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        assert!(WeightMatrix::from_entries(ok, 2).is_ok());
        let asym = Array2::from_shape_vec((2, 2), vec![0.0, 1.0, 2.0, 0.0]).unwrap();
        assert!(WeightMatrix::from_entries(asym, 2).is_err());
        let neg = Array2::from_shape_vec((2, 2), vec![0.0, -1.0, -1.0, 0.0]).unwrap();
        assert!(WeightMatrix::from_entries(neg, 2).is_err());
        let diag = Array2::from_shape_vec((2, 2), vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(WeightMatrix::from_entries(diag, 2).is_err());
        let pad = Array2::from_shape_vec((2, 2), vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        assert!(WeightMatrix::from_entries(pad, 1).is_err());
    }

    proptest! {
        #[test]
        fn built_weights_hold_invariants(
            pts in proptest::collection::vec(
                proptest::collection::vec(-50.0f64..50.0, 3),
                2..12,
            )
        ) {
            let ds = Dataset::new(pts, None).unwrap();
            let w = build_weights(&ds, WeightKind::Euclidean);
            let n = w.size();
            for i in 0..n {
                prop_assert_eq!(w.get(i, i), 0.0);
                for j in 0..n {
                    prop_assert!(w.get(i, j) >= 0.0);
                    prop_assert_eq!(w.get(i, j), w.get(j, i));
                }
            }
        }

        #[test]
        fn build_weights_is_permutation_equivariant(
            pts in proptest::collection::vec(
                proptest::collection::vec(-10.0f64..10.0, 2),
                3..8,
            ),
            rot in 1usize..7,
        ) {
            let n = pts.len();
            let shift = rot % n;
            let perm: Vec<usize> = (0..n).map(|i| (i + shift) % n).collect();
            let permuted: Vec<Vec<f64>> = perm.iter().map(|&i| pts[i].clone()).collect();
            let w = build_weights(&Dataset::new(pts, None).unwrap(), WeightKind::Euclidean);
            let wp = build_weights(&Dataset::new(permuted, None).unwrap(), WeightKind::Euclidean);
            for a in 0..n {
                for b in 0..n {
                    prop_assert_eq!(wp.get(a, b), w.get(perm[a], perm[b]));
                }
            }
        }

        #[test]
        fn padding_preserves_total_weight(
            pts in proptest::collection::vec(
                proptest::collection::vec(-10.0f64..10.0, 2),
                2..10,
            ),
            extra in 0usize..16,
        ) {
            let ds = Dataset::new(pts, None).unwrap();
            let w = build_weights(&ds, WeightKind::Euclidean);
            let p = pad_weights(&w, w.size() + extra).unwrap();
            prop_assert_eq!(p.total_weight(), w.total_weight());
        }
    }
}
