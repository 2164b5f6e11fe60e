use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::{is_prime, IntMatrix, LinalgError};

/// Dense matrix over the prime field `F_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpMatrix {
    p: u32,
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
}

pub(crate) fn inv_mod(a: u32, p: u32) -> u32 {
    // p is prime, so a^(p-2) is the inverse.
    pow_mod(a, p - 2, p)
}

pub(crate) fn pow_mod(a: u32, mut e: u32, p: u32) -> u32 {
    let (mut base, mut acc) = (a as u64 % p as u64, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as u32
}

impl FpMatrix {
    pub fn zeros(p: u32, rows: usize, cols: usize) -> Result<Self, LinalgError> {
        if !is_prime(p as u64) {
            return Err(LinalgError::NotPrime(p as u64));
        }
        Ok(FpMatrix {
            p,
            rows,
            cols,
            entries: vec![0; rows * cols],
        })
    }

    /// Rows of signed integers, reduced into `0..p`.
    pub fn from_i64_rows(p: u32, rows: &[Vec<i64>], cols: usize) -> Result<Self, LinalgError> {
        let mut m = FpMatrix::zeros(p, rows.len(), cols)?;
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(LinalgError::Shape("ragged row".into()));
            }
            for (j, &x) in r.iter().enumerate() {
                m.entries[i * cols + j] = x.rem_euclid(p as i64) as u32;
            }
        }
        Ok(m)
    }

    pub fn identity(p: u32, n: usize) -> Result<Self, LinalgError> {
        let mut m = FpMatrix::zeros(p, n, n)?;
        for i in 0..n {
            m.entries[i * n + i] = 1 % p;
        }
        Ok(m)
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.entries[i * self.cols + j] = v % self.p;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_row_vecs(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn push_row(&mut self, row: &[u32]) {
        assert_eq!(row.len(), self.cols);
        self.entries.extend(row.iter().map(|&x| x % self.p));
        self.rows += 1;
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let (p, cols) = (self.p as u64, self.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == self.rows {
                break;
            }
            let Some(piv) = (r..self.rows).find(|&i| self.entries[i * cols + c] != 0) else {
                continue;
            };
            if piv != r {
                for j in 0..cols {
                    self.entries.swap(piv * cols + j, r * cols + j);
                }
            }
            let inv = inv_mod(self.entries[r * cols + c], self.p) as u64;
            for x in &mut self.entries[r * cols..(r + 1) * cols] {
                *x = (*x as u64 * inv % p) as u32;
            }
            let pivot_row: Vec<u32> = self.entries[r * cols + c..(r + 1) * cols].to_vec();
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let f = self.entries[i * cols + c] as u64;
                if f == 0 {
                    continue;
                }
                let neg = p - f;
                let row = &mut self.entries[i * cols + c..(i + 1) * cols];
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    if y != 0 {
                        *x = ((*x as u64 + neg * y as u64) % p) as u32;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rref(&self) -> (FpMatrix, Vec<usize>) {
        let mut m = self.clone();
        let piv = m.rref_in_place();
        (m, piv)
    }

    /// Row space as a reduced echelon basis.
    pub fn row_basis(&self) -> (Vec<Vec<u32>>, Vec<usize>) {
        let (m, piv) = self.rref();
        ((0..piv.len()).map(|i| m.row(i).to_vec()).collect(), piv)
    }

    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        let p = self.p as u64;
        (0..self.rows)
            .map(|i| {
                let s = self.row(i).iter().zip(v).map(|(&a, &b)| a as u64 * b as u64 % p).sum::<u64>();
                (s % p) as u32
            })
            .collect()
    }
}

/// Forward elimination only; cheaper than [`FpMatrix::rref_in_place`].
fn echelon_rank(m: &FpMatrix) -> usize {
    let (p, cols) = (m.p as u64, m.cols);
    let mut rows: Vec<Vec<u32>> = m.to_row_vecs();
    rows.retain(|r| r.iter().any(|&x| x != 0));
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows.len() {
            break;
        }
        let Some(piv) = (rank..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(piv, rank);
        let inv = inv_mod(rows[rank][c], m.p) as u64;
        let (head, tail) = rows.split_at_mut(rank + 1);
        let pivot_row = &head[rank];
        for row in tail.iter_mut() {
            let f = row[c] as u64;
            if f == 0 {
                continue;
            }
            let k = p - f * inv % p;
            for (x, &y) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                if y != 0 {
                    *x = ((*x as u64 + k * y as u64) % p) as u32;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn fp_rank(m: &FpMatrix) -> usize {
    echelon_rank(m)
}

/// Basis of `{x : M x = 0}`, returned in reduced echelon form.
pub fn fp_nullspace(m: &FpMatrix) -> Vec<Vec<u32>> {
    let (r, pivots) = m.rref();
    let p = m.p;
    let mut basis = FpMatrix {
        p,
        rows: 0,
        cols: m.cols,
        entries: Vec::new(),
    };
    for f in (0..m.cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![0u32; m.cols];
        v[f] = 1 % p;
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = (p - r.get(i, f)) % p;
        }
        basis.push_row(&v);
    }
    basis.row_basis().0
}

/// Entrywise reduction of an integer matrix into `0..p`.
pub fn modp_reduce(m: &IntMatrix, p: u32) -> Result<FpMatrix, LinalgError> {
    let mut out = FpMatrix::zeros(p, m.rows(), m.cols())?;
    let modulus = BigInt::from(p);
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let x = m.get(i, j).mod_floor(&modulus);
            out.entries[i * m.cols() + j] = x.to_u32().expect("reduced entry fits");
        }
    }
    Ok(out)
}

/// True when `M` has full column rank mod `q`, which forces full column
/// rank over the rationals (rank can only drop under reduction).
pub fn betti_lower_bound_check(m: &IntMatrix, q: u32) -> Result<bool, LinalgError> {
    if m.rows() < m.cols() {
        is_prime(q as u64).then_some(false).ok_or(LinalgError::NotPrime(q as u64))
    } else {
        Ok(fp_rank(&modp_reduce(m, q)?) == m.cols())
    }
}
