//! Dense exact linear algebra over the rationals, plus a certified-pivot
//! elimination for interval matrices.

use num_traits::{One, Zero};

use crate::exact::{CertInterval, Rational, Sign};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        RatMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut t = RatMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (RatMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(row, p);
            let inv = m.get(row, col).recip();
            for c in col..m.cols {
                let v = m.get(row, c) * &inv;
                m.set(row, c, v);
            }
            for r in 0..m.rows {
                if r == row || m.get(r, col).is_zero() {
                    continue;
                }
                let f = m.get(r, col).clone();
                for c in col..m.cols {
                    let v = m.get(r, c) - &f * m.get(row, c);
                    m.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of {x : self·x = 0}.
    pub fn kernel(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![Rational::zero(); self.cols];
                x[f] = Rational::one();
                for (i, &p) in pivots.iter().enumerate() {
                    x[p] = -r.get(i, f).clone();
                }
                x
            })
            .collect()
    }

    pub fn determinant(&self) -> Option<Rational> {
        if self.rows != self.cols {
            return None;
        }
        let mut m = self.clone();
        let n = m.rows;
        let mut det = Rational::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m.get(r, col).is_zero()) else {
                return Some(Rational::zero());
            };
            if p != col {
                m.swap_rows(p, col);
                det = -det;
            }
            let piv = m.get(col, col).clone();
            det *= &piv;
            for r in (col + 1)..n {
                if m.get(r, col).is_zero() {
                    continue;
                }
                let f = m.get(r, col) / &piv;
                for c in col..n {
                    let v = m.get(r, c) - &f * m.get(col, c);
                    m.set(r, c, v);
                }
            }
        }
        Some(det)
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Vec<Rational> {
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Gaussian elimination on an interval matrix, accepting only pivots whose
/// sign is certified. Returns the number of certified pivots found, a lower
/// bound on the rank of every real matrix inside the enclosure.
pub fn interval_rank_lower_bound(rows: &[Vec<CertInterval>]) -> usize {
    let mut m: Vec<Vec<CertInterval>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut used = vec![false; m.len()];
    for col in 0..ncols {
        let mut best: Option<(usize, Rational)> = None;
        for (r, row) in m.iter().enumerate() {
            if used[r] || row[col].sign() == Sign::ContainsZero {
                continue;
            }
            let mag = row[col].abs().lo_rational();
            if best.as_ref().is_none_or(|(_, b)| mag > *b) {
                best = Some((r, mag));
            }
        }
        let Some((p, _)) = best else { continue };
        used[p] = true;
        rank += 1;
        let pivot_row = m[p].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if used[r] {
                continue;
            }
            let Some(f) = row[col].div(&pivot_row[col]) else { continue };
            for c in col..ncols {
                row[c] = row[c].sub(&f.mul(&pivot_row[c]));
            }
        }
    }
    rank
}
