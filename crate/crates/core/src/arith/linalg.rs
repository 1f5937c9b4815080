//! Dense linear algebra over F_p: row reduction, kernels and solving.

use super::fp::Prime;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpMatrix {
    prime: Prime,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl FpMatrix {
    pub fn zero(prime: Prime, rows: usize, cols: usize) -> Self {
        FpMatrix { prime, rows, cols, data: vec![0; rows * cols] }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(prime: Prime, rows: usize, columns: &[Vec<u64>]) -> Self {
        let mut m = Self::zero(prime, rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, &v) in c.iter().enumerate() {
                m.set(i, j, v);
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

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = self.prime.reduce(v);
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let p = self.prime;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(piv) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            if piv != r {
                for j in 0..self.cols {
                    self.data.swap(piv * self.cols + j, r * self.cols + j);
                }
            }
            let inv = p.inv(self.get(r, c)).unwrap();
            for j in c..self.cols {
                let v = p.mul(self.get(r, j), inv);
                self.data[r * self.cols + j] = v;
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let f = self.get(i, c);
                if f == 0 {
                    continue;
                }
                for j in c..self.cols {
                    let v = p.sub(self.get(i, j), p.mul(f, self.get(r, j)));
                    self.data[i * self.cols + j] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// A basis of the right kernel, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<u64>> {
        let p = self.prime;
        let mut m = self.clone();
        let pivots = m.rref();
        let mut is_pivot = vec![None; self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            is_pivot[c] = Some(r);
        }
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if is_pivot[free].is_some() {
                continue;
            }
            let mut v = vec![0; self.cols];
            v[free] = 1;
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = p.neg(m.get(r, free));
            }
            basis.push(v);
        }
        basis
    }

    /// Some solution of `self * x = b`, or `None` if inconsistent.
    pub fn solve(&self, b: &[u64]) -> Option<Vec<u64>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = FpMatrix::zero(self.prime, self.rows, self.cols + 1);
        for (i, &bi) in b.iter().enumerate() {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, self.cols, bi);
        }
        let pivots = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![0; self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug.get(r, self.cols);
        }
        Some(x)
    }

    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        let p = self.prime;
        (0..self.rows)
            .map(|i| (0..self.cols).fold(0, |acc, j| p.add(acc, p.mul(self.get(i, j), v[j]))))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_and_solve() {
        let p = Prime::new(5).unwrap();
        let m = FpMatrix::from_columns(p, 2, &[vec![1, 2], vec![2, 4], vec![0, 1]]);
        let ker = m.nullspace();
        assert_eq!(ker.len(), 1);
        assert!(m.mul_vec(&ker[0]).iter().all(|&v| v == 0));
        let x = m.solve(&[3, 1]).unwrap();
        assert_eq!(m.mul_vec(&x), vec![3, 1]);
        assert_eq!(m.rank(), 2);
        let singular = FpMatrix::from_columns(p, 2, &[vec![1, 2], vec![2, 4]]);
        assert!(singular.solve(&[1, 0]).is_none());
    }
}
