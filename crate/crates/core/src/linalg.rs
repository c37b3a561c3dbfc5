//! Dense linear algebra over `F_p`: Gaussian elimination and solvability of
//! `M x = b` for several right-hand sides at once.

use crate::fp;

/// Row-major dense matrix with entries in `[0, p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    p: u32,
    data: Vec<u32>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize, p: u32) -> Self {
        DenseMatrix {
            rows,
            cols,
            p,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize, p: u32) -> Self {
        let mut m = Self::zeros(n, n, p);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v % self.p;
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn mul_vec(&self, x: &[u32]) -> Vec<u32> {
        let p = self.p as u64;
        (0..self.rows)
            .map(|r| {
                let row = &self.data[r * self.cols..(r + 1) * self.cols];
                (row.iter()
                    .zip(x)
                    .map(|(&a, &b)| a as u64 * b as u64 % p)
                    .sum::<u64>()
                    % p) as u32
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.eliminate(self.cols)
    }

    /// Row-reduces using pivots from the first `pivot_cols` columns only and
    /// returns the number of pivots. Rows past the returned rank are zero on those columns.
    fn eliminate(&mut self, pivot_cols: usize) -> usize {
        let (p, cols) = (self.p, self.cols);
        let mut rank = 0;
        for c in 0..pivot_cols {
            let Some(piv) = (rank..self.rows).find(|&r| self.get(r, c) != 0) else {
                continue;
            };
            if piv != rank {
                for j in 0..cols {
                    self.data.swap(piv * cols + j, rank * cols + j);
                }
            }
            let inv = fp::inv(self.get(rank, c), p);
            for j in c..cols {
                let v = fp::mul(self.get(rank, j), inv, p);
                self.data[rank * cols + j] = v;
            }
            let (before, rest) = self.data.split_at_mut(rank * cols);
            let (pivot_row, after) = rest.split_at_mut(cols);
            for row in before
                .chunks_exact_mut(cols)
                .chain(after.chunks_exact_mut(cols))
            {
                let f = row[c];
                if f == 0 {
                    continue;
                }
                let f = p - f;
                for j in c..cols {
                    if pivot_row[j] != 0 {
                        row[j] =
                            ((row[j] as u64 + f as u64 * pivot_row[j] as u64) % p as u64) as u32;
                    }
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }
}

/// For each right-hand side `b`, whether `M x = b` has a solution.
pub fn solvable(m: &DenseMatrix, rhs: &[Vec<u32>]) -> Vec<bool> {
    let n = m.cols;
    let mut aug = DenseMatrix::zeros(m.rows, n + rhs.len(), m.p);
    for r in 0..m.rows {
        for c in 0..n {
            aug.data[r * aug.cols + c] = m.get(r, c);
        }
        for (j, b) in rhs.iter().enumerate() {
            aug.data[r * aug.cols + n + j] = b[r] % m.p;
        }
    }
    let rank = aug.eliminate(n);
    (0..rhs.len())
        .map(|j| (rank..m.rows).all(|r| aug.get(r, n + j) == 0))
        .collect()
}
