//! Reidemeister–Schreier presentations of finite-index subgroups, and a
//! conservative Tietze simplifier.

use std::collections::{HashSet, VecDeque};

use crate::cosets::{trace, CosetTable};
use crate::fpres::{is_valid_name, Presentation};
use crate::word::{Letter, Word};

pub const DEFAULT_TIETZE_BUDGET: usize = 100;

/// Prefix-closed coset representatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transversal {
    reps: Vec<Word>,
    // Tree edge that discovered each coset: (parent coset, letter).
    tree: Vec<Option<(usize, Letter)>>,
}

impl Transversal {
    pub fn reps(&self) -> &[Word] {
        &self.reps
    }

    pub fn rep(&self, coset: usize) -> &Word {
        &self.reps[coset]
    }

    /// True when `coset * g` was discovered along generator `g` from
    /// `coset`, or `coset` was discovered along `g^-1` from `coset * g`.
    fn is_tree_edge(&self, table: &CosetTable, coset: usize, g: usize) -> bool {
        let target = table.act(coset, Letter::gen(g));
        self.tree[target] == Some((coset, Letter::gen(g))) || self.tree[coset] == Some((target, Letter::gen_inv(g)))
    }
}

/// Breadth-first transversal visiting letters in table order
/// (`g1, g1^-1, g2, ...`).
pub fn schreier_transversal(table: &CosetTable) -> Transversal {
    let n = table.len();
    let mut reps: Vec<Option<Word>> = vec![None; n];
    let mut tree = vec![None; n];
    reps[0] = Some(Word::identity());
    let mut queue = VecDeque::from([0usize]);
    while let Some(c) = queue.pop_front() {
        for col in 0..2 * table.ngens() {
            let l = Letter::from_column(col);
            let d = table.act(c, l);
            if reps[d].is_none() {
                let mut w = reps[c].clone().expect("queued cosets have reps");
                w.push(l);
                reps[d] = Some(w);
                tree[d] = Some((c, l));
                queue.push_back(d);
            }
        }
    }
    Transversal {
        reps: reps.into_iter().map(|r| r.expect("table is transitive")).collect(),
        tree,
    }
}

/// `x_{c,g} = rep(c) * g * rep(c*g)^-1` for a non-tree edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchreierGenerator {
    pub coset: usize,
    pub generator: usize,
    pub word: Word,
}

/// Schreier generators in (coset, generator) order, tree edges omitted.
pub fn schreier_generators(table: &CosetTable, t: &Transversal) -> Vec<SchreierGenerator> {
    let mut out = Vec::new();
    for c in 0..table.len() {
        for g in 0..table.ngens() {
            if t.is_tree_edge(table, c, g) {
                continue;
            }
            let d = table.act(c, Letter::gen(g));
            let mut word = t.rep(c).clone();
            word.push(Letter::gen(g));
            let word = word.concat(&t.rep(d).inverse());
            out.push(SchreierGenerator {
                coset: c,
                generator: g,
                word,
            });
        }
    }
    out
}

/// A subgroup presentation together with the origin of each generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupPresentation {
    pub presentation: Presentation,
    pub generators: Vec<SchreierGenerator>,
    pub transversal: Transversal,
}

struct Rewriter<'a> {
    table: &'a CosetTable,
    // label[c * ngens + g] = Schreier generator index for edge (c, g).
    label: Vec<Option<usize>>,
}

impl Rewriter<'_> {
    fn rewrite(&self, start: usize, w: &Word) -> Word {
        let n = self.table.ngens();
        let mut out = Word::identity();
        let mut c = start;
        for &l in w.letters() {
            let g = l.generator();
            if l.is_inverse() {
                let prev = self.table.act(c, l);
                if let Some(k) = self.label[prev * n + g] {
                    out.push(Letter::gen_inv(k));
                }
                c = prev;
            } else {
                if let Some(k) = self.label[c * n + g] {
                    out.push(Letter::gen(k));
                }
                c = self.table.act(c, l);
            }
        }
        out
    }
}

fn schreier_names(pres: &Presentation, gens: &[SchreierGenerator]) -> Vec<String> {
    let names: Vec<String> = gens
        .iter()
        .map(|s| format!("{}_{}", pres.names()[s.generator], s.coset))
        .collect();
    let distinct = names.iter().collect::<HashSet<_>>().len() == names.len();
    if distinct && names.iter().all(|n| is_valid_name(n)) {
        names
    } else {
        (1..=gens.len()).map(|k| format!("s{k}")).collect()
    }
}

/// Rewrite `rep(c) * w * rep(c)^-1` for every relator `w` (outer loop) and
/// coset `c` (inner loop) into Schreier generators.
pub fn rewrite_subgroup_presentation(pres: &Presentation, table: &CosetTable) -> SubgroupPresentation {
    let transversal = schreier_transversal(table);
    let generators = schreier_generators(table, &transversal);
    let n = table.ngens();
    let mut label = vec![None; table.len() * n];
    for (k, s) in generators.iter().enumerate() {
        label[s.coset * n + s.generator] = Some(k);
    }
    let rw = Rewriter { table, label };
    let relators: Vec<Word> = pres
        .relators()
        .iter()
        .flat_map(|r| (0..table.len()).map(move |c| (r, c)))
        .map(|(r, c)| rw.rewrite(c, r))
        .collect();
    let names = schreier_names(pres, &generators);
    let presentation = Presentation::new(names, relators).expect("Schreier names are distinct");
    SubgroupPresentation {
        presentation,
        generators,
        transversal,
    }
}

/// Express an ambient word lying in the subgroup in Schreier generators.
pub fn rewrite_word(sub: &SubgroupPresentation, table: &CosetTable, w: &Word) -> Option<Word> {
    if trace(table, 0, w) != 0 {
        return None;
    }
    let n = table.ngens();
    let mut label = vec![None; table.len() * n];
    for (k, s) in sub.generators.iter().enumerate() {
        label[s.coset * n + s.generator] = Some(k);
    }
    Some(Rewriter { table, label }.rewrite(0, w))
}

/// Result of Tietze simplification. `kept[i]` is the input generator that
/// became output generator `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Simplified {
    pub presentation: Presentation,
    pub kept: Vec<usize>,
    pub passes: usize,
}

pub fn tietze_simplify(pres: &Presentation, budget: usize) -> Presentation {
    tietze_simplify_traced(pres, budget).presentation
}

/// Conservative Tietze moves: cyclic reduction, removal of empty and
/// duplicate relators (up to rotation and inversion), and elimination of
/// generators occurring exactly once in some relator. An elimination is
/// skipped when it would push the total relator length past twice the
/// starting total, which keeps large raw presentations tractable.
pub fn tietze_simplify_traced(pres: &Presentation, budget: usize) -> Simplified {
    let n = pres.ngens();
    let mut alive = vec![true; n];
    let mut rels: Vec<Word> = pres.relators().to_vec();
    let limit = 2 * pres.total_length().max(1);
    let mut passes = 0;
    while passes < budget {
        passes += 1;
        let before = (rels.clone(), alive.clone());
        rels = normalize(rels);
        while let Some((ri, g)) = elimination_candidate(&rels, n, limit) {
            eliminate(&mut rels, ri, g);
            alive[g] = false;
        }
        if (rels.clone(), alive.clone()) == before {
            break;
        }
    }
    rels = normalize(rels);

    // Dense renumbering of surviving generators.
    let kept: Vec<usize> = (0..n).filter(|&g| alive[g]).collect();
    let mut new_of = vec![usize::MAX; n];
    for (i, &g) in kept.iter().enumerate() {
        new_of[g] = i;
    }
    let relators = rels
        .iter()
        .map(|r| {
            Word::from_letter_iter(r.letters().iter().map(|l| {
                let g = new_of[l.generator()];
                if l.is_inverse() {
                    Letter::gen_inv(g)
                } else {
                    Letter::gen(g)
                }
            }))
        })
        .collect();
    let names = kept.iter().map(|&g| pres.names()[g].clone()).collect();
    Simplified {
        presentation: Presentation::new(names, relators).expect("subset of valid names"),
        kept,
        passes,
    }
}

fn normalize(rels: Vec<Word>) -> Vec<Word> {
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(rels.len());
    for r in rels {
        let (core, _) = r.cyclic_reduce();
        if core.is_identity() {
            continue;
        }
        if seen.insert(core.cyclic_canonical()) {
            out.push(core);
        }
    }
    out
}

/// Cheapest `(relator, generator)` pair where the generator occurs exactly
/// once in the relator. Cost is the substitution length times the number
/// of occurrences elsewhere; ties go to the lower generator, then relator.
/// Pairs whose estimated resulting total length exceeds `limit` are skipped.
fn elimination_candidate(rels: &[Word], n: usize, limit: usize) -> Option<(usize, usize)> {
    let current: usize = rels.iter().map(Word::len).sum();
    let mut total = vec![0usize; n];
    for r in rels {
        for l in r.letters() {
            total[l.generator()] += 1;
        }
    }
    let mut best: Option<(usize, usize, usize)> = None;
    let mut counts = vec![0usize; n];
    for (ri, r) in rels.iter().enumerate() {
        for l in r.letters() {
            counts[l.generator()] += 1;
        }
        for l in r.letters() {
            let g = l.generator();
            if counts[g] != 1 {
                continue;
            }
            let cost = (r.len() - 1) * (total[g] - 1);
            // Each other occurrence of g grows by len - 2; the relator goes.
            let estimate = (current + (r.len().saturating_sub(2)) * (total[g] - 1)).saturating_sub(r.len());
            if estimate > limit {
                continue;
            }
            let key = (cost, g, ri);
            if best.is_none_or(|b| key < b) {
                best = Some(key);
            }
        }
        for l in r.letters() {
            counts[l.generator()] = 0;
        }
    }
    best.map(|(_, g, ri)| (ri, g))
}

fn eliminate(rels: &mut Vec<Word>, ri: usize, g: usize) {
    let r = rels.remove(ri);
    let pos = r.letters().iter().position(|l| l.generator() == g).expect("candidate occurs");
    let rotated = r.rotate(pos);
    let rest = Word::from_letter_iter(rotated.letters()[1..].iter().copied());
    // g^e * rest = 1, so g = rest^-1 when e = 1 and g = rest when e = -1.
    let image = if rotated.letters()[0].is_inverse() { rest } else { rest.inverse() };
    let mut images: Vec<Word> = Vec::new();
    let n = rels.iter().map(Word::max_generator).max().unwrap_or(0).max(g + 1);
    for k in 0..n {
        images.push(if k == g { image.clone() } else { Word::from_letter(Letter::gen(k)) });
    }
    for w in rels.iter_mut() {
        if w.occurrences(g) > 0 {
            *w = w.substitute(&images).cyclic_reduce().0;
        }
    }
    rels.retain(|w| !w.is_identity());
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::{abelian_invariants, elementary_abelian_quotient, h1_fp_rank};
    use crate::cosets::{table_from_phom, DEFAULT_COSET_CAP};
    use crate::fpres::parse_presentation;
    use crate::word::free_reduce;

    fn w(xs: &[i32]) -> Word {
        free_reduce(xs).unwrap()
    }

    fn kernel_table(pres: &Presentation, p: u32) -> CosetTable {
        let h = elementary_abelian_quotient(pres, p).unwrap();
        table_from_phom(pres, &h, DEFAULT_COSET_CAP).unwrap()
    }

    #[test]
    fn index_one() {
        let g = parse_presentation("< a, b | a^3, b^3, a*b*a^-1*b^-1 >").unwrap();
        let t = CosetTable::from_permutations(&[vec![0], vec![0]]).unwrap();
        let tr = schreier_transversal(&t);
        assert_eq!(tr.reps(), [Word::identity()]);
        let sg = schreier_generators(&t, &tr);
        assert_eq!(sg.len(), 2);
        let sub = rewrite_subgroup_presentation(&g, &t);
        assert_eq!(sub.presentation.relators(), g.relators());
    }

    #[test]
    fn cyclic_nine_down_to_three() {
        let g = parse_presentation("< a | a^9 >").unwrap();
        let t = kernel_table(&g, 3);
        assert_eq!(t.len(), 3);
        let tr = schreier_transversal(&t);
        // a^-1 and a^2 name the same coset; BFS reaches it through a^-1 first.
        assert_eq!(tr.reps(), [Word::identity(), w(&[1]), w(&[-1])]);
        let sg = schreier_generators(&t, &tr);
        assert_eq!(sg.len(), 1);
        assert_eq!(sg[0].word, w(&[1, 1, 1]));
        let sub = rewrite_subgroup_presentation(&g, &t);
        assert_eq!(sub.presentation.ngens(), 1);
        assert_eq!(sub.presentation.relators(), [w(&[1, 1, 1]), w(&[1, 1, 1]), w(&[1, 1, 1])]);
    }

    #[test]
    fn gamma1_kernel_counts() {
        let g = crate::fixtures::gamma1();
        let t = kernel_table(&g, 3);
        let tr = schreier_transversal(&t);
        assert_eq!(tr.reps().len(), 9);
        assert!(tr.reps().iter().all(|r| r.len() <= 2));
        for (c, r) in tr.reps().iter().enumerate() {
            assert_eq!(trace(&t, 0, r), c);
        }
        let sub = rewrite_subgroup_presentation(&g, &t);
        assert_eq!(sub.generators.len(), 28);
        assert_eq!(sub.presentation.ngens(), 28);
        assert_eq!(sub.presentation.relators().len(), 54);
    }

    #[test]
    fn transversal_is_prefix_closed() {
        let g = crate::fixtures::gamma1();
        let t = kernel_table(&g, 3);
        let tr = schreier_transversal(&t);
        let reps: HashSet<&Word> = tr.reps().iter().collect();
        for r in tr.reps() {
            for k in 0..r.len() {
                let prefix = Word::from_letter_iter(r.letters()[..k].iter().copied());
                assert!(reps.contains(&prefix));
            }
        }
    }

    #[test]
    fn rewritten_relators_map_back_to_conjugates() {
        let g = crate::fixtures::gamma1();
        let t = kernel_table(&g, 3);
        let sub = rewrite_subgroup_presentation(&g, &t);
        let images: Vec<Word> = sub.generators.iter().map(|s| s.word.clone()).collect();
        for (k, rel) in sub.presentation.relators().iter().enumerate() {
            let (ri, c) = (k / 9, k % 9);
            let rep = sub.transversal.rep(c);
            let expected = rep.concat(&g.relators()[ri]).concat(&rep.inverse());
            assert_eq!(rel.substitute(&images), expected);
        }
    }

    #[test]
    fn tietze_basic_moves() {
        let g = parse_presentation("< a, b | b >").unwrap();
        assert_eq!(tietze_simplify(&g, 100).to_string(), "< a | >");
        let g = parse_presentation("< a | a^3, a^3 >").unwrap();
        assert_eq!(tietze_simplify(&g, 100).to_string(), "< a | a^3 >");
        let g = parse_presentation("< a, b | a*b*a^-1, b^-1*a^2*b >").unwrap();
        // a*b*a^-1 ~ b, which eliminates b; a^2 survives.
        assert_eq!(tietze_simplify(&g, 100).to_string(), "< a | a^2 >");
    }

    #[test]
    fn tietze_preserves_gamma2_invariants() {
        let g = crate::fixtures::gamma1();
        let t = kernel_table(&g, 3);
        let raw = rewrite_subgroup_presentation(&g, &t).presentation;
        let simple = tietze_simplify(&raw, DEFAULT_TIETZE_BUDGET);
        assert!(simple.ngens() < raw.ngens());
        assert_eq!(abelian_invariants(&simple), abelian_invariants(&raw));
        for p in [3, 5] {
            assert_eq!(h1_fp_rank(&simple, p).unwrap(), h1_fp_rank(&raw, p).unwrap());
        }
    }
}
