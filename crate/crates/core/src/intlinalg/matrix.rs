use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::LinAlgError;

/// Dense row-major matrix of arbitrary-precision integers.
///
/// Zero-sized matrices are representable (they show up as empty blocks of
/// assembled determinant matrices) but the text and JSON parsers reject them.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self, LinAlgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinAlgError::Parse("rows have different lengths".into()));
        }
        Ok(IntMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Convenience constructor for literal matrices. Panics on ragged input.
    pub fn from_i64<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let rows = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Self::from_rows(rows).expect("ragged literal matrix")
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn column_vector(values: &[BigInt]) -> Self {
        IntMatrix {
            rows: values.len(),
            cols: 1,
            data: values.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    /// Largest absolute entry (0 for an empty matrix).
    pub fn max_abs_entry(&self) -> BigInt {
        self.data.iter().map(|x| x.abs()).max().unwrap_or_else(BigInt::zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, LinAlgError> {
        if self.cols != other.rows {
            return Err(LinAlgError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[BigInt]) -> Result<Vec<BigInt>, LinAlgError> {
        if x.len() != self.cols {
            return Err(LinAlgError::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                x.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> IntMatrix {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out[(a, b)] = self[(i, j)].clone();
            }
        }
        out
    }

    /// `(self | c)` with `c` appended as the last column.
    pub fn augment(&self, c: &[BigInt]) -> Result<IntMatrix, LinAlgError> {
        if c.len() != self.rows {
            return Err(LinAlgError::DimensionMismatch(format!(
                "column of length {} against {} rows",
                c.len(),
                self.rows
            )));
        }
        let rows = (0..self.rows)
            .map(|i| {
                let mut row = self.row(i).to_vec();
                row.push(c[i].clone());
                row
            })
            .collect();
        Self::from_rows(rows)
    }

    pub fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for k in 0..self.cols {
            self.data.swap(i * self.cols + k, j * self.cols + k);
        }
    }

    pub fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for k in 0..self.rows {
            self.data.swap(k * self.cols + i, k * self.cols + j);
        }
    }

    /// `row[dst] += t * row[src]`
    pub fn add_row_multiple(&mut self, dst: usize, src: usize, t: &BigInt) {
        for k in 0..self.cols {
            let v = &self[(src, k)] * t;
            self[(dst, k)] += v;
        }
    }

    /// `col[dst] += t * col[src]`
    pub fn add_col_multiple(&mut self, dst: usize, src: usize, t: &BigInt) {
        for k in 0..self.rows {
            let v = &self[(k, src)] * t;
            self[(k, dst)] += v;
        }
    }

    pub fn negate_row(&mut self, i: usize) {
        for k in 0..self.cols {
            let v = -&self[(i, k)];
            self[(i, k)] = v;
        }
    }

    pub fn negate_col(&mut self, j: usize) {
        for k in 0..self.rows {
            let v = -&self[(k, j)];
            self[(k, j)] = v;
        }
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson {
            rows: self.rows,
            cols: self.cols,
            entries: (0..self.rows)
                .map(|i| self.row(i).iter().map(ToString::to_string).collect())
                .collect(),
        }
    }

    pub fn from_json(json: &MatrixJson) -> Result<Self, LinAlgError> {
        if json.entries.len() != json.rows {
            return Err(LinAlgError::Parse(format!(
                "declared {} rows, found {}",
                json.rows,
                json.entries.len()
            )));
        }
        let rows = json
            .entries
            .iter()
            .map(|row| {
                if row.len() != json.cols {
                    return Err(LinAlgError::Parse(format!(
                        "declared {} columns, found {}",
                        json.cols,
                        row.len()
                    )));
                }
                row.iter().map(|s| parse_int(s)).collect()
            })
            .collect::<Result<Vec<Vec<BigInt>>, _>>()?;
        let m = Self::from_rows(rows)?;
        if m.rows == 0 || m.cols == 0 {
            return Err(LinAlgError::Parse("empty matrix".into()));
        }
        Ok(m)
    }

    /// Text (`"2 4; 6 8"`) or JSON, chosen by the leading character.
    pub fn parse_any(text: &str) -> Result<Self, LinAlgError> {
        if text.trim_start().starts_with('{') {
            let json: MatrixJson = serde_json::from_str(text).map_err(|e| LinAlgError::Parse(e.to_string()))?;
            Self::from_json(&json)
        } else {
            text.parse()
        }
    }
}

fn parse_int(s: &str) -> Result<BigInt, LinAlgError> {
    s.trim()
        .parse()
        .map_err(|_| LinAlgError::Parse(format!("not an integer: {s:?}")))
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;

    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl FromStr for IntMatrix {
    type Err = LinAlgError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let rows = s
            .split(';')
            .map(|row| row.split_whitespace().map(parse_int).collect())
            .collect::<Result<Vec<Vec<BigInt>>, _>>()?;
        let m = Self::from_rows(rows)?;
        if m.rows == 0 || m.cols == 0 {
            return Err(LinAlgError::Parse("empty matrix".into()));
        }
        Ok(m)
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        f.write_str(&rows.join("; "))
    }
}

/// JSON encoding of a matrix; entries are decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<String>>,
}
