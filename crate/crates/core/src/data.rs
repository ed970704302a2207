//! Categorical datasets: an `n x d` matrix of small non-negative
//! integers with declared per-column support sizes.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DataError {
    #[error("dataset must have n >= 1 and d >= 1")]
    Empty,
    #[error("row {row} has {got} values, expected {expected}")]
    RaggedRow { row: usize, got: usize, expected: usize },
    #[error("value {value} at row {row}, column {col} exceeds declared support {support}")]
    ValueOutOfSupport { row: usize, col: usize, value: u16, support: usize },
    #[error("support sizes must be >= 1 (column {0})")]
    BadSupport(usize),
    #[error("malformed dataset CSV: {0}")]
    Parse(String),
}

/// Immutable sample matrix. Values are stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    n: usize,
    d: usize,
    values: Vec<u16>,
    supports: Vec<usize>,
}

impl Dataset {
    /// Builds a dataset from row-major values, validating every entry
    /// against the declared supports.
    pub fn new(values: Vec<u16>, d: usize, supports: Vec<usize>) -> Result<Self, DataError> {
        if d == 0 || values.is_empty() {
            return Err(DataError::Empty);
        }
        if !values.len().is_multiple_of(d) {
            return Err(DataError::RaggedRow {
                row: values.len() / d,
                got: values.len() % d,
                expected: d,
            });
        }
        if supports.len() != d {
            return Err(DataError::Parse(format!(
                "{} support sizes declared for {} columns",
                supports.len(),
                d
            )));
        }
        if let Some(col) = supports.iter().position(|&k| k == 0) {
            return Err(DataError::BadSupport(col));
        }
        let n = values.len() / d;
        for (i, &v) in values.iter().enumerate() {
            let (row, col) = (i / d, i % d);
            if (v as usize) >= supports[col] {
                return Err(DataError::ValueOutOfSupport {
                    row,
                    col,
                    value: v,
                    support: supports[col],
                });
            }
        }
        Ok(Dataset {
            n,
            d,
            values,
            supports,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn supports(&self) -> &[usize] {
        &self.supports
    }

    pub fn row(&self, i: usize) -> &[u16] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u16]> {
        self.values.chunks_exact(self.d)
    }

    /// CSV with a support-declaration comment, a header, and one row per
    /// sample:
    ///
    /// ```text
    /// # supports: 2 2 3
    /// x0,x1,x2
    /// 0,1,2
    /// ```
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = write!(s, "# supports:");
        for k in &self.supports {
            let _ = write!(s, " {}", k);
        }
        s.push('\n');
        let header: Vec<String> = (0..self.d).map(|j| format!("x{j}")).collect();
        s.push_str(&header.join(","));
        s.push('\n');
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    /// Parses the CSV format written by [`Dataset::to_csv`]. The header
    /// line is optional; the supports comment is required unless
    /// `fallback_supports` is given.
    pub fn from_csv(text: &str, fallback_supports: Option<&[usize]>) -> Result<Self, DataError> {
        let mut supports: Option<Vec<usize>> = None;
        let mut values: Vec<u16> = Vec::new();
        let mut d: Option<usize> = None;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                if let Some(list) = rest.strip_prefix("supports:") {
                    let parsed: Result<Vec<usize>, _> =
                        list.split_whitespace().map(str::parse).collect();
                    supports =
                        Some(parsed.map_err(|e| DataError::Parse(format!("supports: {e}")))?);
                }
                continue;
            }
            let cells: Vec<&str> = line.split(',').collect();
            if cells.iter().all(|c| c.starts_with('x')) {
                continue; // header
            }
            let width = *d.get_or_insert(cells.len());
            if cells.len() != width {
                return Err(DataError::Parse(format!(
                    "row width {} != {}",
                    cells.len(),
                    width
                )));
            }
            for c in cells {
                let v: u16 = c
                    .trim()
                    .parse()
                    .map_err(|e| DataError::Parse(format!("bad cell '{c}': {e}")))?;
                values.push(v);
            }
        }
        let d = d.ok_or_else(|| DataError::Parse("no data rows".into()))?;
        let supports = supports
            .or_else(|| fallback_supports.map(<[usize]>::to_vec))
            .ok_or_else(|| DataError::Parse("no '# supports:' line and no fallback".into()))?;
        Dataset::new(values, d, supports)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_entries() {
        assert!(Dataset::new(vec![0, 1, 1, 0], 2, vec![2, 2]).is_ok());
        assert_eq!(
            Dataset::new(vec![0, 2], 2, vec![2, 2]),
            Err(DataError::ValueOutOfSupport {
                row: 0,
                col: 1,
                value: 2,
                support: 2
            })
        );
        assert!(Dataset::new(vec![], 2, vec![2, 2]).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let ds = Dataset::new(vec![0, 1, 2, 1, 0, 0], 3, vec![2, 2, 3]).unwrap();
        let csv = ds.to_csv();
        assert!(csv.starts_with("# supports: 2 2 3\nx0,x1,x2\n"));
        let back = Dataset::from_csv(&csv, None).unwrap();
        assert_eq!(back, ds);
    }

    #[test]
    fn csv_without_header_or_supports() {
        let ds = Dataset::from_csv("0,1\n1,0\n", Some(&[2, 2])).unwrap();
        assert_eq!(ds.n(), 2);
        assert!(Dataset::from_csv("0,1\n", None).is_err());
    }
}
