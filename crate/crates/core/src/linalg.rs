//! Small dense complex linear algebra: LU with partial pivoting, used by the
//! matrix-exponential oracle. Dimensions here stay in the hundreds, so a
//! straightforward O(n³) factorization is plenty.

use crate::C64;
use ndarray::Array2;

pub struct LuFactors {
    lu: Array2<C64>,
    piv: Vec<usize>,
}

/// Factor a copy of `a`. Returns None on an exactly singular pivot.
pub fn lu_factor(a: &Array2<C64>) -> Option<LuFactors> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let mut lu = a.clone();
    let mut piv = vec![0usize; n];
    for k in 0..n {
        let mut p = k;
        let mut best = lu[(k, k)].norm_sqr();
        for i in k + 1..n {
            let v = lu[(i, k)].norm_sqr();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 {
            return None;
        }
        piv[k] = p;
        if p != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = tmp;
            }
        }
        let pivot = lu[(k, k)];
        for i in k + 1..n {
            let m = lu[(i, k)] / pivot;
            lu[(i, k)] = m;
            for j in k + 1..n {
                let sub = m * lu[(k, j)];
                lu[(i, j)] -= sub;
            }
        }
    }
    Some(LuFactors { lu, piv })
}

impl LuFactors {
    pub fn solve_in_place(&self, b: &mut [C64]) {
        let n = self.lu.nrows();
        assert_eq!(b.len(), n);
        // The factorization swaps entire rows, multipliers included, so all
        // interchanges are replayed before the triangular solves.
        for k in 0..n {
            b.swap(k, self.piv[k]);
        }
        for k in 0..n {
            let bk = b[k];
            for i in k + 1..n {
                b[i] -= self.lu[(i, k)] * bk;
            }
        }
        for k in (0..n).rev() {
            b[k] /= self.lu[(k, k)];
            let bk = b[k];
            for i in 0..k {
                b[i] -= self.lu[(i, k)] * bk;
            }
        }
    }

    /// Solve A·X = B column by column.
    pub fn solve_matrix(&self, b: &Array2<C64>) -> Array2<C64> {
        let n = self.lu.nrows();
        let mut out = b.clone();
        let mut col = vec![C64::new(0.0, 0.0); n];
        for j in 0..b.ncols() {
            for i in 0..n {
                col[i] = out[(i, j)];
            }
            self.solve_in_place(&mut col);
            for i in 0..n {
                out[(i, j)] = col[i];
            }
        }
        out
    }
}

/// Maximum absolute column sum (the induced 1-norm).
pub fn one_norm(a: &Array2<C64>) -> f64 {
    let mut best = 0.0f64;
    for j in 0..a.ncols() {
        let s: f64 = (0..a.nrows()).map(|i| a[(i, j)].norm()).sum();
        best = best.max(s);
    }
    best
}
