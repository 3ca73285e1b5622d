use super::{Scalar, Vector};
use crate::{Error, Result};
use num::bigint::BigInt;
use num::{One, Zero};

/// A dense rational matrix.  Sizes here stay small (truncation windows), so
/// the representation favors clarity over packing.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Columns are the given vectors read off along `slots`.
    pub fn from_columns(cols: &[Vector], slots: &[i64]) -> Self {
        let mut m = Matrix::zeros(slots.len(), cols.len());
        for (j, v) in cols.iter().enumerate() {
            for (i, s) in slots.iter().enumerate() {
                m.set(i, j, v.coeff(*s));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r * self.cols + c] = v;
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = a * other.at(k, j);
                    if !add.is_zero() {
                        let cur = out.at(i, j).clone();
                        out.set(i, j, cur + add);
                    }
                }
            }
        }
        out
    }

    pub fn column_as_vector(&self, c: usize, slots: &[i64]) -> Vector {
        Vector::from_pairs((0..self.rows).map(|r| (slots[r], self.at(r, c).clone())))
    }

    /// Exact determinant via Bareiss fraction-free elimination on the
    /// denominator-cleared integer matrix, so intermediate entries stay
    /// divisions-exact instead of growing multiplicatively.
    pub fn det(&self) -> Result<Scalar> {
        if self.rows != self.cols {
            return Err(Error::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Scalar::one());
        }

        // Clear denominators row by row, remembering the scaling.
        let mut scale = Scalar::one();
        let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
        for r in 0..n {
            let mut lcm = BigInt::one();
            for c in 0..n {
                lcm = num::integer::lcm(lcm, self.at(r, c).denom().clone());
            }
            scale = scale * Scalar::from_bigint(lcm.clone());
            a.push(
                (0..n)
                    .map(|c| {
                        let s = self.at(r, c);
                        s.numer() * (&lcm / s.denom())
                    })
                    .collect(),
            );
        }

        let mut sign = 1i64;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return Ok(Scalar::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = num / &prev; // exact by Bareiss
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        let det_int = Scalar::from_bigint(a[n - 1][n - 1].clone() * BigInt::from(sign));
        Ok(det_int / scale)
    }

    /// Inverse by Gauss-Jordan; `None` when singular.
    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a.at(r, col).is_zero())?;
            if pivot != col {
                for j in 0..n {
                    let (x, y) = (a.at(col, j).clone(), a.at(pivot, j).clone());
                    a.set(col, j, y);
                    a.set(pivot, j, x);
                    let (x, y) = (inv.at(col, j).clone(), inv.at(pivot, j).clone());
                    inv.set(col, j, y);
                    inv.set(pivot, j, x);
                }
            }
            let p = a.at(col, col).recip();
            for j in 0..n {
                a.set(col, j, a.at(col, j) * &p);
                inv.set(col, j, inv.at(col, j) * &p);
            }
            for r in 0..n {
                if r == col || a.at(r, col).is_zero() {
                    continue;
                }
                let f = a.at(r, col).clone();
                for j in 0..n {
                    let av = a.at(r, j) - &(a.at(col, j) * &f);
                    a.set(r, j, av);
                    let iv = inv.at(r, j) - &(inv.at(col, j) * &f);
                    inv.set(r, j, iv);
                }
            }
        }
        Some(inv)
    }

    pub fn apply_to_vector(&self, coords: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(coords.len(), self.cols);
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.at(r, c) * &coords[c]).sum())
            .collect()
    }
}

impl std::fmt::Debug for Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for r in 0..self.rows {
            writeln!(
                f,
                "[{}]",
                (0..self.cols)
                    .map(|c| self.at(r, c).to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64, d: i64) -> Scalar {
        Scalar::new(n, d)
    }

    // Cofactor expansion, the independent oracle for the elimination-based
    // determinant.
    fn det_cofactor(m: &Matrix) -> Scalar {
        let n = m.rows();
        if n == 0 {
            return Scalar::one();
        }
        if n == 1 {
            return m.at(0, 0).clone();
        }
        let mut acc = Scalar::zero();
        for j in 0..n {
            if m.at(0, j).is_zero() {
                continue;
            }
            let minor = Matrix::from_rows(
                (1..n)
                    .map(|r| {
                        (0..n)
                            .filter(|&c| c != j)
                            .map(|c| m.at(r, c).clone())
                            .collect()
                    })
                    .collect(),
            );
            let term = m.at(0, j) * &det_cofactor(&minor);
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    #[test]
    fn det_identity_and_swap() {
        assert_eq!(Matrix::identity(4).det().unwrap(), Scalar::one());
        let mut swap = Matrix::identity(3);
        swap.set(0, 0, Scalar::zero());
        swap.set(1, 1, Scalar::zero());
        swap.set(0, 1, Scalar::one());
        swap.set(1, 0, Scalar::one());
        assert_eq!(swap.det().unwrap(), Scalar::from_int(-1));
    }

    #[test]
    fn det_rational_entries() {
        let m = Matrix::from_rows(vec![vec![s(1, 1), s(1, 2)], vec![s(1, 3), s(1, 1)]]);
        assert_eq!(m.det().unwrap(), s(5, 6));
        assert_eq!(det_cofactor(&m), s(5, 6));
    }

    #[test]
    fn det_nonsquare_rejected() {
        let m = Matrix::zeros(2, 3);
        assert_eq!(m.det(), Err(Error::NonSquare { rows: 2, cols: 3 }));
    }

    #[test]
    fn det_agrees_with_cofactor_on_a_4x4() {
        let m = Matrix::from_rows(vec![
            vec![s(2, 1), s(-1, 2), s(0, 1), s(3, 1)],
            vec![s(1, 3), s(1, 1), s(4, 1), s(0, 1)],
            vec![s(0, 1), s(5, 2), s(-1, 1), s(1, 1)],
            vec![s(1, 1), s(0, 1), s(2, 5), s(-2, 1)],
        ]);
        assert_eq!(m.det().unwrap(), det_cofactor(&m));
    }

    #[test]
    fn inverse_roundtrip() {
        let m = Matrix::from_rows(vec![vec![s(0, 1), s(1, 1)], vec![s(1, 1), s(1, 1)]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(2));
        let sing = Matrix::from_rows(vec![vec![s(1, 1), s(2, 1)], vec![s(2, 1), s(4, 1)]]);
        assert!(sing.inverse().is_none());
    }
}
