//! Free-group words over a numbered alphabet.
//!
//! Generators are numbered `1..=n`; a letter `k > 0` is generator `k` and
//! `-k` is its formal inverse. Every [`Word`] is kept freely reduced.

use std::fmt;
use std::ops::Mul;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("malformed letter: index 0 at position {position}")]
    ZeroLetter { position: usize },
    #[error("letter {letter} outside alphabet of size {alphabet}")]
    OutOfAlphabet { letter: i32, alphabet: usize },
}

/// A generator or the inverse of a generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(i32);

impl Letter {
    pub fn new(index: i32) -> Result<Self, WordError> {
        if index == 0 {
            return Err(WordError::ZeroLetter { position: 0 });
        }
        Ok(Letter(index))
    }

    /// Positive letter for the zero-based generator `g`.
    pub fn gen(g: usize) -> Self {
        Letter(g as i32 + 1)
    }

    /// Inverse letter for the zero-based generator `g`.
    pub fn gen_inv(g: usize) -> Self {
        Letter(-(g as i32 + 1))
    }

    #[inline]
    pub fn index(self) -> i32 {
        self.0
    }

    /// Zero-based generator number, ignoring the sign.
    #[inline]
    pub fn generator(self) -> usize {
        (self.0.unsigned_abs() - 1) as usize
    }

    #[inline]
    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    #[inline]
    pub fn inverse(self) -> Self {
        Letter(-self.0)
    }

    /// Column of this letter in a coset table laid out as
    /// `g1, g1^-1, g2, g2^-1, ...`.
    #[inline]
    pub fn column(self) -> usize {
        2 * self.generator() + usize::from(self.is_inverse())
    }

    #[inline]
    pub fn from_column(col: usize) -> Self {
        if col.is_multiple_of(2) {
            Letter::gen(col / 2)
        } else {
            Letter::gen_inv(col / 2)
        }
    }
}

/// A freely reduced word. The empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

/// Freely reduce a raw sequence of letter indices.
pub fn free_reduce(raw: &[i32]) -> Result<Word, WordError> {
    let mut out: Vec<Letter> = Vec::with_capacity(raw.len());
    for (position, &x) in raw.iter().enumerate() {
        if x == 0 {
            return Err(WordError::ZeroLetter { position });
        }
        push_reduced(&mut out, Letter(x));
    }
    Ok(Word { letters: out })
}

#[inline]
fn push_reduced(out: &mut Vec<Letter>, l: Letter) {
    if out.last().is_some_and(|&last| last == l.inverse()) {
        out.pop();
    } else {
        out.push(l);
    }
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    pub fn from_letter(l: Letter) -> Self {
        Word { letters: vec![l] }
    }

    /// Build from letters, reducing as we go.
    pub fn from_letter_iter<I: IntoIterator<Item = Letter>>(it: I) -> Self {
        let mut out = Vec::new();
        for l in it {
            push_reduced(&mut out, l);
        }
        Word { letters: out }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    /// Largest generator number (1-based) used, or 0 for the identity.
    pub fn max_generator(&self) -> usize {
        self.letters.iter().map(|l| l.generator() + 1).max().unwrap_or(0)
    }

    pub fn check_alphabet(&self, n: usize) -> Result<(), WordError> {
        match self.letters.iter().find(|l| l.generator() >= n) {
            Some(l) => Err(WordError::OutOfAlphabet {
                letter: l.index(),
                alphabet: n,
            }),
            None => Ok(()),
        }
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut out = self.letters.clone();
        out.reserve(other.len());
        for &l in &other.letters {
            push_reduced(&mut out, l);
        }
        Word { letters: out }
    }

    pub fn push(&mut self, l: Letter) {
        push_reduced(&mut self.letters, l);
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// `u^-1 v^-1 u v`.
    pub fn commutator(u: &Word, v: &Word) -> Word {
        u.inverse().concat(&v.inverse()).concat(u).concat(v)
    }

    /// Split `self = conjugator * core * conjugator^-1` with `core`
    /// cyclically reduced.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let l = &self.letters;
        let mut i = 0;
        let mut j = l.len();
        while j >= i + 2 && l[i] == l[j - 1].inverse() {
            i += 1;
            j -= 1;
        }
        (
            Word {
                letters: l[i..j].to_vec(),
            },
            Word {
                letters: l[..i].to_vec(),
            },
        )
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(&a), Some(&b)) => self.letters.len() == 1 || a != b.inverse(),
            _ => true,
        }
    }

    /// Cyclic rotation starting at position `k`. Only meaningful for
    /// cyclically reduced words, where it stays reduced.
    pub fn rotate(&self, k: usize) -> Word {
        if self.letters.is_empty() {
            return Word::identity();
        }
        let k = k % self.letters.len();
        let mut letters = Vec::with_capacity(self.letters.len());
        letters.extend_from_slice(&self.letters[k..]);
        letters.extend_from_slice(&self.letters[..k]);
        Word::from_letter_iter(letters)
    }

    /// Signed letter counts, one entry per generator.
    pub fn exponent_vector(&self, n: usize) -> Vec<i64> {
        let mut v = vec![0i64; n];
        for l in &self.letters {
            v[l.generator()] += if l.is_inverse() { -1 } else { 1 };
        }
        v
    }

    /// Number of occurrences of generator `g` (either sign).
    pub fn occurrences(&self, g: usize) -> usize {
        self.letters.iter().filter(|l| l.generator() == g).count()
    }

    /// Replace each letter by a word; `images[g]` is the image of generator `g`.
    pub fn substitute(&self, images: &[Word]) -> Word {
        let mut out = Word::identity();
        for &l in &self.letters {
            let img = &images[l.generator()];
            if l.is_inverse() {
                for &m in img.letters.iter().rev() {
                    out.push(m.inverse());
                }
            } else {
                for &m in &img.letters {
                    out.push(m);
                }
            }
        }
        out
    }

    /// Lexicographically least representative among all rotations of
    /// the word and of its inverse. Used to compare relators up to
    /// conjugation and inversion.
    pub fn cyclic_canonical(&self) -> Word {
        let (core, _) = self.cyclic_reduce();
        let inv = core.inverse();
        let mut best = core.clone();
        for w in [&core, &inv] {
            for k in 0..w.len() {
                let r = w.rotate(k);
                if r < best {
                    best = r;
                }
            }
        }
        best
    }
}

impl Mul for &Word {
    type Output = Word;
    fn mul(self, rhs: &Word) -> Word {
        self.concat(rhs)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "{}", l.index())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(xs: &[i32]) -> Word {
        free_reduce(xs).unwrap()
    }

    #[test]
    fn cancellation() {
        assert!(w(&[1, -1]).is_identity());
        assert_eq!(w(&[1, 2, -2, 1]).letters(), w(&[1, 1]).letters());
        assert_eq!(
            free_reduce(&[1, 0]),
            Err(WordError::ZeroLetter { position: 1 })
        );
    }

    #[test]
    fn first_gamma1_relator_is_reduced() {
        // a*b^-1*c^-1*b*a^-1*d*c*d^-1
        let raw = [1, -2, -3, 2, -1, 4, 3, -4];
        assert_eq!(w(&raw).len(), 8);
    }

    #[test]
    fn cyclic_reduction() {
        let (core, conj) = w(&[1, 2, -1]).cyclic_reduce();
        assert_eq!(core, w(&[2]));
        assert_eq!(conj, w(&[1]));

        let (core, conj) = w(&[3, 3, 3]).cyclic_reduce();
        assert_eq!(core, w(&[3, 3, 3]));
        assert!(conj.is_identity());

        let (core, conj) = w(&[-1, 4, 3, 1]).cyclic_reduce();
        assert_eq!(core, w(&[4, 3]));
        assert_eq!(conj, w(&[-1]));
    }

    #[test]
    fn invert_and_concat() {
        assert_eq!(w(&[1, 2]).inverse(), w(&[-2, -1]));
        assert!(w(&[1]).concat(&w(&[-1])).is_identity());
        assert_eq!(w(&[1, 2]).concat(&w(&[-2, 3])), w(&[1, 3]));
    }

    #[test]
    fn exponent_vectors() {
        assert_eq!(Word::identity().exponent_vector(4), vec![0, 0, 0, 0]);
        // a*b*a^-1*d*c*d*a^-2*b*c
        let r2 = w(&[1, 2, -1, 4, 3, 4, -1, -1, 2, 3]);
        assert_eq!(r2.exponent_vector(4), vec![-2, 2, 2, 2]);
        // c*d^2*c*d^2*c*d^2
        let r4 = w(&[3, 4, 4, 3, 4, 4, 3, 4, 4]);
        assert_eq!(r4.exponent_vector(4), vec![0, 0, 3, 6]);
    }

    #[test]
    fn cyclic_canonical_identifies_rotations_and_inverses() {
        let r = w(&[1, 2, -1, 3]);
        assert_eq!(r.cyclic_canonical(), r.rotate(2).cyclic_canonical());
        assert_eq!(r.cyclic_canonical(), r.inverse().cyclic_canonical());
        let conj = w(&[2]).concat(&r).concat(&w(&[-2]));
        assert_eq!(r.cyclic_canonical(), conj.cyclic_canonical());
    }

    fn raw_letters() -> impl Strategy<Value = Vec<i32>> {
        prop::collection::vec(prop_oneof![-4i32..=-1, 1i32..=4], 0..30)
    }

    proptest! {
        #[test]
        fn free_reduce_idempotent(raw in raw_letters()) {
            let once = free_reduce(&raw).unwrap();
            let idx: Vec<i32> = once.letters().iter().map(|l| l.index()).collect();
            prop_assert_eq!(free_reduce(&idx).unwrap(), once.clone());
            prop_assert!(once.len() <= raw.len());
            prop_assert_eq!(once.len() % 2, raw.len() % 2);
        }

        #[test]
        fn inverse_cancels(raw in raw_letters()) {
            let x = free_reduce(&raw).unwrap();
            prop_assert!(x.concat(&x.inverse()).is_identity());
        }

        #[test]
        fn exponent_vector_is_a_homomorphism(a in raw_letters(), b in raw_letters()) {
            let u = free_reduce(&a).unwrap();
            let v = free_reduce(&b).unwrap();
            let sum: Vec<i64> = u.exponent_vector(4).iter()
                .zip(v.exponent_vector(4)).map(|(x, y)| x + y).collect();
            prop_assert_eq!(u.concat(&v).exponent_vector(4), sum);
            let neg: Vec<i64> = u.exponent_vector(4).iter().map(|x| -x).collect();
            prop_assert_eq!(u.inverse().exponent_vector(4), neg);
            prop_assert_eq!(u.concat(&v).inverse(), v.inverse().concat(&u.inverse()));
        }

        #[test]
        fn cyclic_reduce_recomposes(raw in raw_letters()) {
            let x = free_reduce(&raw).unwrap();
            let (core, conj) = x.cyclic_reduce();
            prop_assert!(core.is_cyclically_reduced());
            prop_assert_eq!(conj.concat(&core).concat(&conj.inverse()), x);
        }
    }
}
