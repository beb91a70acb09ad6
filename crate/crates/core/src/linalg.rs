//! Dense matrices over `F_p` with reduced row-echelon form and null spaces.

use crate::fp::Prime;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    p: Prime,
    cols: usize,
    rows: Vec<Vec<u32>>,
}

impl Matrix {
    pub fn new(p: Prime, cols: usize) -> Self {
        Matrix {
            p,
            cols,
            rows: Vec::new(),
        }
    }

    pub fn from_rows(p: Prime, cols: usize, rows: Vec<Vec<u32>>) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().map(|v| v % p.get()).collect())
            .collect();
        Matrix { p, cols, rows }
    }

    pub fn push_row(&mut self, row: Vec<u32>) {
        assert_eq!(row.len(), self.cols);
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    /// Reduces in place to reduced row-echelon form, dropping zero rows.
    /// Returns the pivot column of each remaining row.
    pub fn rref(&mut self) -> Vec<usize> {
        let p = self.p;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            let Some(found) = (r..self.rows.len()).find(|&i| self.rows[i][c] != 0) else {
                continue;
            };
            self.rows.swap(r, found);
            let inv = p.inv(self.rows[r][c]);
            for v in self.rows[r].iter_mut() {
                *v = p.mul(*v, inv);
            }
            let pivot_row = self.rows[r].clone();
            for (i, row) in self.rows.iter_mut().enumerate() {
                if i == r || row[c] == 0 {
                    continue;
                }
                let f = row[c];
                for (v, &pv) in row.iter_mut().zip(&pivot_row) {
                    *v = p.sub(*v, p.mul(f, pv));
                }
            }
            pivots.push(c);
            r += 1;
            if r == self.rows.len() {
                break;
            }
        }
        self.rows.truncate(r);
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// A basis of `{ x : A x = 0 }`, one vector per free column in increasing
    /// column order; each has a 1 in its free column and 0 in the others.
    pub fn kernel(&self) -> Kernel {
        let mut m = self.clone();
        let pivots = m.rref();
        let is_pivot = {
            let mut v = vec![false; self.cols];
            for &c in &pivots {
                v[c] = true;
            }
            v
        };
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let basis = free
            .iter()
            .map(|&f| {
                let mut x = vec![0u32; self.cols];
                x[f] = 1;
                for (row, &pc) in m.rows.iter().zip(&pivots) {
                    x[pc] = self.p.neg(row[f]);
                }
                x
            })
            .collect();
        Kernel {
            rank: pivots.len(),
            pivots,
            free,
            basis,
        }
    }

    pub fn mul_vec(&self, x: &[u32]) -> Vec<u32> {
        assert_eq!(x.len(), self.cols);
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .zip(x)
                    .fold(0, |acc, (&a, &b)| self.p.add(acc, self.p.mul(a, b)))
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Kernel {
    pub rank: usize,
    pub pivots: Vec<usize>,
    pub free: Vec<usize>,
    pub basis: Vec<Vec<u32>>,
}
