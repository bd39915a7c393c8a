//! Dense rational matrices, exact elimination, and checkable solve certificates.

use num_traits::{One, Zero};
use serde::Serialize;

use super::rational::{serde_text, Rational};
use super::KernelError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<Rational>>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![vec![Rational::zero(); cols]; rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i][i] = Rational::one();
        }
        m
    }

    pub fn from_rows(data: Vec<Vec<Rational>>) -> Result<Self, KernelError> {
        let rows = data.len();
        let cols = data.first().map_or(0, Vec::len);
        if let Some(bad) = data.iter().position(|r| r.len() != cols) {
            return Err(KernelError::Dimension(format!(
                "row {bad} has {} entries, expected {cols}",
                data[bad].len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds the matrix whose columns are `columns`, each of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<Rational>]) -> Result<Self, KernelError> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(KernelError::Dimension(format!(
                    "column {j} has {} entries, expected {rows}",
                    col.len()
                )));
            }
            for (i, v) in col.iter().enumerate() {
                m.data[i][j] = v.clone();
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i][j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        self.data.clone()
    }

    /// Keeps the listed rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self {
            rows: rows.len(),
            cols: self.cols,
            data: rows.iter().map(|&i| self.data[i].clone()).collect(),
        }
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Result<Vec<Rational>, KernelError> {
        if x.len() != self.cols {
            return Err(KernelError::Dimension(format!(
                "vector length {} does not match {} columns",
                x.len(),
                self.cols
            )));
        }
        Ok(self
            .data
            .iter()
            .map(|row| dot(row, x))
            .collect())
    }

    /// `y^T A`.
    pub fn left_mul_vec(&self, y: &[Rational]) -> Result<Vec<Rational>, KernelError> {
        if y.len() != self.rows {
            return Err(KernelError::Dimension(format!(
                "functional length {} does not match {} rows",
                y.len(),
                self.rows
            )));
        }
        let mut out = vec![Rational::zero(); self.cols];
        for (yi, row) in y.iter().zip(&self.data) {
            if yi.is_zero() {
                continue;
            }
            for (o, a) in out.iter_mut().zip(row) {
                if !a.is_zero() {
                    *o += yi * a;
                }
            }
        }
        Ok(out)
    }
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    Solution,
    Infeasible,
}

/// Outcome of an exact linear solve `A x = b`.
///
/// A solution carries a particular solution (free variables set to zero) together with a
/// nullspace basis, one vector per free column in ascending column order. An infeasible
/// system carries a functional `y` with `y^T A = 0` and `y^T b != 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    Solution {
        #[serde(serialize_with = "serde_text::vector")]
        solution: Vec<Rational>,
        #[serde(serialize_with = "serde_text::matrix")]
        nullspace: Vec<Vec<Rational>>,
        free_columns: Vec<usize>,
    },
    Infeasible {
        #[serde(serialize_with = "serde_text::vector")]
        functional: Vec<Rational>,
    },
}

impl Certificate {
    pub fn kind(&self) -> CertificateKind {
        match self {
            Certificate::Solution { .. } => CertificateKind::Solution,
            Certificate::Infeasible { .. } => CertificateKind::Infeasible,
        }
    }

    pub fn is_solution(&self) -> bool {
        self.kind() == CertificateKind::Solution
    }

    /// The solution vector or the infeasibility functional.
    pub fn vector(&self) -> &[Rational] {
        match self {
            Certificate::Solution { solution, .. } => solution,
            Certificate::Infeasible { functional } => functional,
        }
    }

    /// Re-checks the certificate against the system with fresh arithmetic.
    pub fn verify(&self, a: &RationalMatrix, b: &[Rational]) -> bool {
        if b.len() != a.rows() {
            return false;
        }
        match self {
            Certificate::Solution {
                solution,
                nullspace,
                ..
            } => {
                let Ok(ax) = a.mul_vec(solution) else {
                    return false;
                };
                if ax != b {
                    return false;
                }
                nullspace.iter().all(|v| {
                    a.mul_vec(v)
                        .map(|av| av.iter().all(Zero::is_zero))
                        .unwrap_or(false)
                })
            }
            Certificate::Infeasible { functional } => {
                let Ok(ya) = a.left_mul_vec(functional) else {
                    return false;
                };
                ya.iter().all(Zero::is_zero) && !dot(functional, b).is_zero()
            }
        }
    }
}

/// Reduced row echelon form of `[A | b]` with the row transform recorded.
struct Reduction {
    /// Reduced rows, `cols + 1` entries each (the last is the right-hand side).
    rows: Vec<Vec<Rational>>,
    /// `transform * [A | b] = rows`.
    transform: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
}

/// Pivot on the first row with a nonzero entry in the leftmost unresolved column.
fn reduce(a: &RationalMatrix, b: &[Rational]) -> Reduction {
    let (m, n) = (a.rows(), a.cols());
    let mut rows: Vec<Vec<Rational>> = (0..m)
        .map(|i| {
            let mut r = a.row(i).to_vec();
            r.push(b[i].clone());
            r
        })
        .collect();
    let mut transform = RationalMatrix::identity(m).to_rows();
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..n {
        if next == m {
            break;
        }
        let Some(p) = (next..m).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(next, p);
        transform.swap(next, p);
        let inv = Rational::one() / &rows[next][col];
        for v in rows[next].iter_mut() {
            *v *= &inv;
        }
        for v in transform[next].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = rows[next].clone();
        let pivot_t = transform[next].clone();
        for i in 0..m {
            if i == next || rows[i][col].is_zero() {
                continue;
            }
            let factor = rows[i][col].clone();
            for (v, p) in rows[i].iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
            for (v, p) in transform[i].iter_mut().zip(&pivot_t) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        pivots.push(col);
        next += 1;
    }
    Reduction {
        rows,
        transform,
        pivots,
    }
}

/// Solves `A x = b` exactly, returning a solution family or an infeasibility functional.
pub fn solve_exact(a: &RationalMatrix, b: &[Rational]) -> Result<Certificate, KernelError> {
    if b.len() != a.rows() {
        return Err(KernelError::Dimension(format!(
            "right-hand side has {} entries, matrix has {} rows",
            b.len(),
            a.rows()
        )));
    }
    let n = a.cols();
    let red = reduce(a, b);
    let rank = red.pivots.len();
    if let Some(i) = (rank..a.rows()).find(|&i| !red.rows[i][n].is_zero()) {
        return Ok(Certificate::Infeasible {
            functional: red.transform[i].clone(),
        });
    }
    let mut solution = vec![Rational::zero(); n];
    for (i, &col) in red.pivots.iter().enumerate() {
        solution[col] = red.rows[i][n].clone();
    }
    let free_columns: Vec<usize> = (0..n).filter(|c| !red.pivots.contains(c)).collect();
    let nullspace = free_columns
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); n];
            v[f] = Rational::one();
            for (i, &col) in red.pivots.iter().enumerate() {
                v[col] = -red.rows[i][f].clone();
            }
            v
        })
        .collect();
    Ok(Certificate::Solution {
        solution,
        nullspace,
        free_columns,
    })
}

pub fn rank(a: &RationalMatrix) -> usize {
    let zero = vec![Rational::zero(); a.rows()];
    reduce(a, &zero).pivots.len()
}
