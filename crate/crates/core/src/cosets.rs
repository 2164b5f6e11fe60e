//! Coset tables for finite-index subgroups.
//!
//! Tables are laid out with one column per letter in the order
//! `g1, g1^-1, g2, g2^-1, ...`, so the inverse of column `x` is `x ^ 1`.

use std::collections::VecDeque;

use thiserror::Error;

use crate::abelian::PHom;
use crate::fpres::Presentation;
use crate::word::{Letter, Word};

pub const DEFAULT_COSET_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CosetError {
    #[error("quotient of order {order} exceeds the coset cap {cap}")]
    TooManyCosets { order: u128, cap: usize },
    #[error("coset enumeration overflowed the cap of {cap} cosets")]
    EnumerationOverflow { cap: usize },
    #[error("invalid coset table: {0}")]
    Invalid(String),
}

/// Permutation action of the generators on the right cosets of a subgroup.
/// Coset 0 is the subgroup itself.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CosetTable {
    ngens: usize,
    len: usize,
    rows: Vec<u32>,
}

impl CosetTable {
    /// Build from per-generator permutations; inverse columns are derived.
    pub fn from_permutations(perms: &[Vec<usize>]) -> Result<Self, CosetError> {
        let ngens = perms.len();
        let len = perms.first().map_or(1, Vec::len);
        let mut rows = vec![u32::MAX; len * 2 * ngens];
        for (g, perm) in perms.iter().enumerate() {
            if perm.len() != len {
                return Err(CosetError::Invalid("permutations of different degrees".into()));
            }
            for (c, &d) in perm.iter().enumerate() {
                if d >= len || rows[d * 2 * ngens + 2 * g + 1] != u32::MAX {
                    return Err(CosetError::Invalid(format!("generator {g} is not a bijection")));
                }
                rows[c * 2 * ngens + 2 * g] = d as u32;
                rows[d * 2 * ngens + 2 * g + 1] = c as u32;
            }
        }
        Ok(CosetTable { ngens, len, rows })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn ngens(&self) -> usize {
        self.ngens
    }

    #[inline]
    pub fn act(&self, coset: usize, l: Letter) -> usize {
        self.rows[coset * 2 * self.ngens + l.column()] as usize
    }

    #[inline]
    fn act_col(&self, coset: usize, col: usize) -> usize {
        self.rows[coset * 2 * self.ngens + col] as usize
    }

    /// Image of every coset under generator `g`.
    pub fn permutation(&self, g: usize) -> Vec<usize> {
        (0..self.len).map(|c| self.act(c, Letter::gen(g))).collect()
    }

    /// Renumber cosets in breadth-first order from coset 0, visiting
    /// columns in table order.
    pub fn standardize(&self) -> CosetTable {
        let ncols = 2 * self.ngens;
        let mut new_of = vec![u32::MAX; self.len];
        let mut order = Vec::with_capacity(self.len);
        new_of[0] = 0;
        order.push(0);
        let mut head = 0;
        while head < order.len() {
            let c = order[head];
            head += 1;
            for x in 0..ncols {
                let d = self.act_col(c, x);
                if new_of[d] == u32::MAX {
                    new_of[d] = order.len() as u32;
                    order.push(d);
                }
            }
        }
        // Unreachable cosets (only in invalid tables) keep their relative order.
        for (c, slot) in new_of.iter_mut().enumerate() {
            if *slot == u32::MAX {
                *slot = order.len() as u32;
                order.push(c);
            }
        }
        let mut rows = Vec::with_capacity(self.rows.len());
        for &old in &order {
            for x in 0..ncols {
                rows.push(new_of[self.act_col(old, x)]);
            }
        }
        CosetTable {
            ngens: self.ngens,
            len: self.len,
            rows,
        }
    }

    pub fn is_standardized(&self) -> bool {
        self.standardize() == *self
    }

    /// Check bijectivity, relator closure, transitivity and that every
    /// subgroup generator fixes coset 0.
    pub fn validate(&self, pres: &Presentation, subgroup_gens: &[Word]) -> Result<(), CosetError> {
        if self.ngens != pres.ngens() {
            return Err(CosetError::Invalid("generator count mismatch".into()));
        }
        for g in 0..self.ngens {
            let mut seen = vec![false; self.len];
            for c in 0..self.len {
                let d = self.act(c, Letter::gen(g));
                if d >= self.len || seen[d] {
                    return Err(CosetError::Invalid(format!("generator {g} is not a bijection")));
                }
                seen[d] = true;
                if self.act(d, Letter::gen_inv(g)) != c {
                    return Err(CosetError::Invalid(format!("inverse column of generator {g} is wrong")));
                }
            }
        }
        for (k, r) in pres.relators().iter().enumerate() {
            if let Some(c) = (0..self.len).find(|&c| trace(self, c, r) != c) {
                return Err(CosetError::Invalid(format!("relator {k} moves coset {c}")));
            }
        }
        let mut reached = vec![false; self.len];
        let mut queue = VecDeque::from([0usize]);
        reached[0] = true;
        while let Some(c) = queue.pop_front() {
            for x in 0..2 * self.ngens {
                let d = self.act_col(c, x);
                if !reached[d] {
                    reached[d] = true;
                    queue.push_back(d);
                }
            }
        }
        if reached.iter().any(|&r| !r) {
            return Err(CosetError::Invalid("action is not transitive".into()));
        }
        if let Some(k) = subgroup_gens.iter().position(|w| trace(self, 0, w) != 0) {
            return Err(CosetError::Invalid(format!("subgroup generator {k} moves coset 0")));
        }
        Ok(())
    }
}

/// Apply the letters of `w` left to right starting from `start`.
pub fn trace(table: &CosetTable, start: usize, w: &Word) -> usize {
    w.letters().iter().fold(start, |c, &l| table.act(c, l))
}

/// Coset table of the kernel of `h`: cosets are the vectors of `F_p^r`
/// in lexicographic order, and generator `g` adds `images(g)`.
pub fn table_from_phom(pres: &Presentation, h: &PHom, cap: usize) -> Result<CosetTable, CosetError> {
    let p = h.prime() as usize;
    let r = h.rank();
    let order = (p as u128).checked_pow(r as u32).unwrap_or(u128::MAX);
    if order > cap as u128 {
        return Err(CosetError::TooManyCosets { order, cap });
    }
    let len = order as usize;
    let digits = |mut c: usize| {
        let mut v = vec![0usize; r];
        for slot in v.iter_mut().rev() {
            *slot = c % p;
            c /= p;
        }
        v
    };
    let number = |v: &[usize]| v.iter().fold(0usize, |acc, &x| acc * p + x);
    let perms: Vec<Vec<usize>> = (0..pres.ngens())
        .map(|g| {
            let img = &h.images()[g];
            (0..len)
                .map(|c| {
                    let v: Vec<usize> = digits(c).iter().zip(img).map(|(&a, &b)| (a + b as usize) % p).collect();
                    number(&v)
                })
                .collect()
        })
        .collect();
    let mut t = CosetTable::from_permutations(&perms)?;
    if pres.ngens() == 0 {
        t.len = len;
    }
    Ok(t)
}

const NONE: u32 = u32::MAX;

/// HLT coset enumeration state.
struct Enumerator {
    ncols: usize,
    table: Vec<u32>,
    parent: Vec<u32>,
    live: usize,
    relators: Vec<Vec<usize>>,
    subgroup: Vec<Vec<usize>>,
    queue: Vec<u32>,
    cap: usize,
    soft_armed: bool,
}

enum Step {
    Done,
    Full,
}

impl Enumerator {
    fn allocated(&self) -> usize {
        self.parent.len()
    }

    #[inline]
    fn get(&self, c: usize, x: usize) -> u32 {
        self.table[c * self.ncols + x]
    }

    #[inline]
    fn put(&mut self, c: usize, x: usize, d: u32) {
        self.table[c * self.ncols + x] = d;
    }

    fn is_live(&self, c: usize) -> bool {
        self.parent[c] as usize == c
    }

    fn rep(&mut self, c: u32) -> u32 {
        let mut root = c;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut x = c;
        while self.parent[x as usize] != root {
            let next = self.parent[x as usize];
            self.parent[x as usize] = root;
            x = next;
        }
        root
    }

    fn define(&mut self, c: usize, x: usize) -> u32 {
        let d = self.allocated() as u32;
        self.table.extend(std::iter::repeat_n(NONE, self.ncols));
        self.parent.push(d);
        self.live += 1;
        self.put(c, x, d);
        self.put(d as usize, x ^ 1, c as u32);
        d
    }

    fn merge(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.rep(a), self.rep(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
            self.live -= 1;
            self.queue.push(hi);
        }
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        self.queue.clear();
        self.merge(a, b);
        let mut i = 0;
        while i < self.queue.len() {
            let g = self.queue[i] as usize;
            i += 1;
            for x in 0..self.ncols {
                let d = self.get(g, x);
                if d == NONE {
                    continue;
                }
                self.put(d as usize, x ^ 1, NONE);
                let mu = self.rep(g as u32);
                let nu = self.rep(d);
                let fwd = self.get(mu as usize, x);
                if fwd != NONE {
                    self.merge(nu, fwd);
                } else {
                    let back = self.get(nu as usize, x ^ 1);
                    if back != NONE {
                        self.merge(mu, back);
                    } else {
                        self.put(mu as usize, x, nu);
                        self.put(nu as usize, x ^ 1, mu);
                    }
                }
            }
        }
        self.queue.clear();
    }

    /// Scan `w` at coset `a`, filling gaps with new cosets when `fill` is set.
    fn scan(&mut self, a: usize, w: &[usize], fill: bool) -> Step {
        if w.is_empty() {
            return Step::Done;
        }
        let (mut f, mut b) = (a as u32, a as u32);
        let (mut i, mut j) = (0usize, w.len() as isize - 1);
        loop {
            while (i as isize) <= j && self.get(f as usize, w[i]) != NONE {
                f = self.get(f as usize, w[i]);
                i += 1;
            }
            if (i as isize) > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Step::Done;
            }
            while j >= i as isize && self.get(b as usize, w[j as usize] ^ 1) != NONE {
                b = self.get(b as usize, w[j as usize] ^ 1);
                j -= 1;
            }
            if j < i as isize {
                self.coincidence(f, b);
                return Step::Done;
            }
            if j == i as isize {
                self.put(f as usize, w[i], b);
                self.put(b as usize, w[i] ^ 1, f);
                return Step::Done;
            }
            if !fill {
                return Step::Done;
            }
            if self.allocated() >= self.cap {
                return Step::Full;
            }
            self.define(f as usize, w[i]);
        }
    }

    fn lookahead(&mut self) {
        for w in self.subgroup.clone() {
            if self.is_live(0) {
                self.scan(0, &w, false);
            }
        }
        let relators = self.relators.clone();
        for c in 0..self.allocated() {
            for w in &relators {
                if !self.is_live(c) {
                    break;
                }
                self.scan(c, w, false);
            }
        }
    }

    /// Drop dead rows; returns the new number of the first live coset at
    /// or after `cursor`.
    fn compact(&mut self, cursor: usize) -> usize {
        let n = self.allocated();
        let mut new_of = vec![NONE; n];
        let mut next = 0u32;
        for (c, slot) in new_of.iter_mut().enumerate() {
            if self.is_live(c) {
                *slot = next;
                next += 1;
            }
        }
        let new_cursor = (0..cursor).filter(|&c| self.is_live(c)).count();
        let mut table = Vec::with_capacity(next as usize * self.ncols);
        for c in 0..n {
            if !self.is_live(c) {
                continue;
            }
            for x in 0..self.ncols {
                let d = self.get(c, x);
                table.push(if d == NONE { NONE } else { new_of[self.rep(d) as usize] });
            }
        }
        self.table = table;
        self.parent = (0..next).collect();
        self.live = next as usize;
        new_cursor
    }

    fn run(&mut self) -> Result<(), CosetError> {
        let soft = (self.cap * 3 / 4).max(1);
        let mut cursor = 0usize;
        let mut setup = 0usize;
        loop {
            let step = if setup < self.subgroup.len() {
                let w = self.subgroup[setup].clone();
                self.scan(0, &w, true)
            } else if cursor >= self.allocated() {
                return Ok(());
            } else {
                self.process(cursor, soft)
            };
            match step {
                Step::Done if setup < self.subgroup.len() => setup += 1,
                Step::Done => cursor += 1,
                Step::Full => {
                    let before = self.allocated();
                    self.lookahead();
                    cursor = self.compact(cursor);
                    let freed = before - self.allocated();
                    self.soft_armed = self.allocated() < soft;
                    if before >= self.cap && freed < (self.cap / 20).max(1) {
                        return Err(CosetError::EnumerationOverflow { cap: self.cap });
                    }
                }
            }
        }
    }

    /// One HLT step at coset `a`: scan all relators, then fill the row.
    fn process(&mut self, a: usize, soft: usize) -> Step {
        if !self.is_live(a) {
            return Step::Done;
        }
        let relators = std::mem::take(&mut self.relators);
        let mut out = Step::Done;
        for w in &relators {
            if !self.is_live(a) {
                break;
            }
            if let Step::Full = self.scan(a, w, true) {
                out = Step::Full;
                break;
            }
        }
        self.relators = relators;
        if let Step::Full = out {
            return out;
        }
        for x in 0..self.ncols {
            if !self.is_live(a) {
                break;
            }
            if self.get(a, x) == NONE {
                if self.allocated() >= self.cap || (self.soft_armed && self.allocated() >= soft) {
                    return Step::Full;
                }
                self.define(a, x);
            }
        }
        Step::Done
    }

    fn finish(mut self, ngens: usize) -> CosetTable {
        let _ = self.compact(0);
        CosetTable {
            ngens,
            len: self.live,
            rows: self.table,
        }
        .standardize()
    }
}

/// Todd–Coxeter (HLT with lookahead) enumeration of the cosets of the
/// subgroup generated by `subgroup_gens`. The result is standardized.
pub fn todd_coxeter(pres: &Presentation, subgroup_gens: &[Word], cap: usize) -> Result<CosetTable, CosetError> {
    let to_cols = |w: &Word| -> Vec<usize> { w.letters().iter().map(|l| l.column()).collect() };
    let cap = cap.max(1);
    let ncols = 2 * pres.ngens();
    let mut e = Enumerator {
        ncols,
        table: vec![NONE; ncols],
        parent: vec![0],
        live: 1,
        relators: pres.relators().iter().map(to_cols).collect(),
        subgroup: subgroup_gens.iter().map(to_cols).collect(),
        queue: Vec::new(),
        cap,
        soft_armed: true,
    };
    e.run()?;
    Ok(e.finish(pres.ngens()))
}

/// The relators `g^p` and `[g_i, g_j]` cutting a group down to its
/// maximal elementary abelian p-quotient.
pub fn elementary_abelian_relators(ngens: usize, p: u32) -> Vec<Word> {
    let gens: Vec<Word> = (0..ngens).map(|g| Word::from_letter(Letter::gen(g))).collect();
    let mut out: Vec<Word> = gens.iter().map(|g| g.pow(p as i64)).collect();
    for i in 0..ngens {
        for j in i + 1..ngens {
            out.push(Word::commutator(&gens[i], &gens[j]));
        }
    }
    out
}

/// Coset table of `G^p[G,G]` found by enumerating the trivial subgroup of
/// `G / G^p[G,G]`, without reference to any homomorphism.
pub fn kernel_table_by_enumeration(pres: &Presentation, p: u32, cap: usize) -> Result<CosetTable, CosetError> {
    let mut relators = pres.relators().to_vec();
    relators.extend(elementary_abelian_relators(pres.ngens(), p));
    let augmented = Presentation::new(pres.names().to_vec(), relators).expect("same alphabet");
    todd_coxeter(&augmented, &[], cap)
}
