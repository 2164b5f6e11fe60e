//! Abelianization: integral invariants and elementary abelian p-quotients.

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;
use thiserror::Error;

use crate::exactlinalg::{
    betti_lower_bound_check, is_prime, modp_reduce, smith_normal_form, FpMatrix, IntMatrix, LinalgError,
};
use crate::fpres::Presentation;
use crate::word::Word;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbelianError {
    #[error("p = {0} must be an odd prime")]
    BadPrime(u32),
    #[error("homomorphism images must have {expected} coordinates, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("relator {0} does not map to zero")]
    RelatorNotKilled(usize),
    #[error("images do not span the target")]
    NotSurjective,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Rank of the free part plus torsion coefficients of `H_1(G, Z)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianInvariants {
    pub betti: usize,
    pub torsion: Vec<BigInt>,
}

impl AbelianInvariants {
    /// Number of torsion coefficients divisible by `p`.
    pub fn p_torsion_count(&self, p: u32) -> usize {
        let p = BigInt::from(p);
        self.torsion.iter().filter(|t| (*t % &p) == BigInt::from(0)).count()
    }
}

/// Surjection from a presented group onto `(Z/p)^r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PHom {
    p: u32,
    rank: usize,
    images: Vec<Vec<u32>>,
}

impl PHom {
    /// Validated constructor: every relator must die and the images must span.
    pub fn new(pres: &Presentation, p: u32, rank: usize, images: Vec<Vec<u32>>) -> Result<Self, AbelianError> {
        check_odd_prime(p)?;
        if images.len() != pres.ngens() {
            return Err(AbelianError::Shape {
                expected: pres.ngens(),
                got: images.len(),
            });
        }
        if let Some(bad) = images.iter().find(|v| v.len() != rank) {
            return Err(AbelianError::Shape {
                expected: rank,
                got: bad.len(),
            });
        }
        let h = PHom {
            p,
            rank,
            images: images.into_iter().map(|v| v.into_iter().map(|x| x % p).collect()).collect(),
        };
        for (k, r) in pres.relators().iter().enumerate() {
            if h.apply(r).iter().any(|&x| x != 0) {
                return Err(AbelianError::RelatorNotKilled(k));
            }
        }
        if !h.is_surjective() {
            return Err(AbelianError::NotSurjective);
        }
        Ok(h)
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn images(&self) -> &[Vec<u32>] {
        &self.images
    }

    /// Index of the kernel, `p^r`, or `None` on overflow.
    pub fn index(&self) -> Option<u64> {
        (self.p as u64).checked_pow(self.rank as u32)
    }

    pub fn apply(&self, w: &Word) -> Vec<u32> {
        let p = self.p;
        let mut acc = vec![0u32; self.rank];
        for l in w.letters() {
            let img = &self.images[l.generator()];
            for (a, &x) in acc.iter_mut().zip(img) {
                *a = if l.is_inverse() { (*a + p - x) % p } else { (*a + x) % p };
            }
        }
        acc
    }

    pub fn is_surjective(&self) -> bool {
        if self.rank == 0 {
            return true;
        }
        let rows: Vec<Vec<i64>> = self.images.iter().map(|v| v.iter().map(|&x| x as i64).collect()).collect();
        let m = FpMatrix::from_i64_rows(self.p, &rows, self.rank).expect("prime checked on construction");
        crate::exactlinalg::fp_rank(&m) == self.rank
    }
}

fn check_odd_prime(p: u32) -> Result<(), AbelianError> {
    if p == 2 || !is_prime(p as u64) {
        Err(AbelianError::BadPrime(p))
    } else {
        Ok(())
    }
}

/// Rows are the exponent vectors of the relators.
pub fn relation_matrix(pres: &Presentation) -> IntMatrix {
    let n = pres.ngens();
    let rows: Vec<Vec<i64>> = pres.relators().iter().map(|r| r.exponent_vector(n)).collect();
    IntMatrix::from_rows(&rows, n)
}

pub fn abelian_invariants(pres: &Presentation) -> AbelianInvariants {
    let m = relation_matrix(pres);
    let divisors = smith_normal_form(&m).divisors();
    AbelianInvariants {
        betti: pres.ngens() - divisors.len(),
        torsion: divisors.into_iter().filter(|d| !d.is_one()).collect(),
    }
}

/// Dimension of `H^1(G, F_p)`, i.e. the rank of the elementary abelian
/// p-quotient. Works for any prime, including 2.
pub fn h1_fp_rank(pres: &Presentation, p: u32) -> Result<usize, LinalgError> {
    let m = modp_reduce(&relation_matrix(pres), p)?;
    Ok(pres.ngens() - crate::exactlinalg::fp_rank(&m))
}

/// The maximal elementary abelian p-quotient with its defining map.
///
/// Generator images are coordinates with respect to the non-pivot columns
/// of the reduced echelon form of the relation matrix mod p.
pub fn elementary_abelian_quotient(pres: &Presentation, p: u32) -> Result<PHom, AbelianError> {
    check_odd_prime(p)?;
    let n = pres.ngens();
    let m = modp_reduce(&relation_matrix(pres), p)?;
    let (rref, pivots) = m.rref();
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut images = vec![vec![0u32; free.len()]; n];
    for (k, &f) in free.iter().enumerate() {
        images[f][k] = 1;
    }
    for (i, &pc) in pivots.iter().enumerate() {
        for (k, &f) in free.iter().enumerate() {
            images[pc][k] = (p - rref.get(i, f)) % p;
        }
    }
    Ok(PHom {
        p,
        rank: free.len(),
        images,
    })
}

/// How a Betti number was decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum BettiMethod {
    /// Full column rank modulo this prime, hence Betti number 0.
    ModQ { q: u32 },
    Snf,
}

/// Primes tried for the Betti-0 shortcut, before falling back to SNF.
pub const BETTI_SHORTCUT_PRIMES: [u32; 3] = [5, 7, 11];

/// First Betti number, trying the mod-q full-rank shortcut first.
pub fn betti_number(pres: &Presentation) -> (usize, BettiMethod) {
    let m = relation_matrix(pres);
    for q in BETTI_SHORTCUT_PRIMES {
        if betti_lower_bound_check(&m, q).expect("shortcut primes are prime") {
            return (0, BettiMethod::ModQ { q });
        }
    }
    let rank = smith_normal_form(&m).rank();
    (pres.ngens() - rank, BettiMethod::Snf)
}
