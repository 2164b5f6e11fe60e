use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::{min_abs_nonzero, IntMatrix};

/// Diagonal form `S = U * M * V` with unimodular `U` and `V`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnfResult {
    pub s: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl SnfResult {
    /// Nonzero diagonal entries in divisor-chain order.
    pub fn divisors(&self) -> Vec<BigInt> {
        let k = self.s.rows().min(self.s.cols());
        (0..k)
            .map(|i| self.s.get(i, i).clone())
            .take_while(|d| !d.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.divisors().len()
    }
}

struct Work {
    s: Vec<Vec<BigInt>>,
    u: Vec<Vec<BigInt>>,
    // V is stored transposed so column operations become row operations.
    vt: Vec<Vec<BigInt>>,
}

fn axpy(dst: &mut [BigInt], q: &BigInt, src: &[BigInt]) {
    for (d, s) in dst.iter_mut().zip(src) {
        if !s.is_zero() {
            *d -= q * s;
        }
    }
}

fn two_rows(rows: &mut [Vec<BigInt>], a: usize, b: usize) -> (&mut Vec<BigInt>, &Vec<BigInt>) {
    debug_assert_ne!(a, b);
    if a < b {
        let (lo, hi) = rows.split_at_mut(b);
        (&mut lo[a], &hi[0])
    } else {
        let (lo, hi) = rows.split_at_mut(a);
        (&mut hi[0], &lo[b])
    }
}

impl Work {
    fn row_sub(&mut self, i: usize, q: &BigInt, t: usize) {
        let (dst, src) = two_rows(&mut self.s, i, t);
        axpy(dst, q, src);
        let (dst, src) = two_rows(&mut self.u, i, t);
        axpy(dst, q, src);
    }

    fn col_sub(&mut self, j: usize, q: &BigInt, t: usize) {
        for row in self.s.iter_mut() {
            if !row[t].is_zero() {
                let delta = q * &row[t];
                row[j] -= delta;
            }
        }
        let (dst, src) = two_rows(&mut self.vt, j, t);
        axpy(dst, q, src);
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            self.s.swap(a, b);
            self.u.swap(a, b);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for row in self.s.iter_mut() {
                row.swap(a, b);
            }
            self.vt.swap(a, b);
        }
    }

    fn row_add(&mut self, t: usize, i: usize) {
        let minus_one = BigInt::from(-1);
        self.row_sub(t, &minus_one, i);
    }
}

/// Smith normal form with transformation matrices.
///
/// Each round pivots on the nonzero entry of least absolute value.
pub fn smith_normal_form(m: &IntMatrix) -> SnfResult {
    let (rows, cols) = (m.rows(), m.cols());
    let mut w = Work {
        s: m.to_row_vecs(),
        u: IntMatrix::identity(rows).to_row_vecs(),
        vt: IntMatrix::identity(cols).to_row_vecs(),
    };

    for t in 0..rows.min(cols) {
        // Global minimum over the trailing block.
        let best = min_abs_nonzero(
            (t..rows).flat_map(|i| (t..cols).map(move |j| (i, j))).map(|(i, j)| (i * cols + j, &w.s[i][j])),
        );
        let Some((flat, _)) = best else { break };
        w.swap_rows(t, flat / cols);
        w.swap_cols(t, flat % cols);

        loop {
            eliminate_cross(&mut w, t, rows, cols);
            // Every trailing entry must be a multiple of the pivot.
            let pivot = w.s[t][t].clone();
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !w.s[i][j].is_multiple_of(&pivot)));
            match bad {
                Some(i) => w.row_add(t, i),
                None => break,
            }
        }
        if w.s[t][t].is_negative() {
            for x in w.s[t].iter_mut().chain(w.u[t].iter_mut()) {
                *x = -&*x;
            }
        }
    }

    let flatten = |rows_: Vec<Vec<BigInt>>, r: usize, c: usize| {
        IntMatrix::from_entries(r, c, rows_.into_iter().flatten().collect())
    };
    let vt = flatten(w.vt, cols, cols);
    let mut v = IntMatrix::zeros(cols, cols);
    for i in 0..cols {
        for j in 0..cols {
            v.set(i, j, vt.get(j, i).clone());
        }
    }
    SnfResult {
        s: flatten(w.s, rows, cols),
        u: flatten(w.u, rows, rows),
        v,
    }
}

/// Clear row `t` and column `t` apart from the pivot at `(t, t)`.
fn eliminate_cross(w: &mut Work, t: usize, rows: usize, cols: usize) {
    loop {
        let pivot = w.s[t][t].clone();
        debug_assert!(!pivot.is_zero());
        for i in t + 1..rows {
            if !w.s[i][t].is_zero() {
                let q = w.s[i][t].div_floor(&pivot);
                if !q.is_zero() {
                    w.row_sub(i, &q, t);
                }
            }
        }
        for j in t + 1..cols {
            if !w.s[t][j].is_zero() {
                let q = w.s[t][j].div_floor(&pivot);
                if !q.is_zero() {
                    w.col_sub(j, &q, t);
                }
            }
        }
        let col_rem = min_abs_nonzero((t + 1..rows).map(|i| (i, &w.s[i][t])));
        let row_rem = min_abs_nonzero((t + 1..cols).map(|j| (j, &w.s[t][j])));
        match (col_rem, row_rem) {
            (None, None) => return,
            (Some((i, a)), Some((j, b))) => {
                if a <= b {
                    w.swap_rows(t, i);
                } else {
                    w.swap_cols(t, j);
                }
            }
            (Some((i, _)), None) => w.swap_rows(t, i),
            (None, Some((j, _))) => w.swap_cols(t, j),
        }
    }
}
