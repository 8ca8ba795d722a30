//! Gröbner bases for submodules of free modules `R^k` over the polynomial
//! ring, with position-over-term order.
//!
//! Used for involutivity certificates (membership of Lie brackets in the
//! module spanned by distribution generators, with explicit coefficients)
//! and for syzygy modules of restricted generators in blowup transforms.

use std::cmp::Ordering;

use num::traits::One;

use crate::monomial::{Monomial, MonomialOrder};
use crate::poly::{Polynomial, Q};

/// An element of the free module `R^rank`: one polynomial per position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModVec {
    comps: Vec<Polynomial>,
}

/// Leading data of a module element under position-over-term order with
/// `e_0 > e_1 > ...` and grevlex inside each position.
#[derive(Debug, Clone, PartialEq, Eq)]
struct ModTerm {
    pos: usize,
    mono: Monomial,
    coeff: Q,
}

fn term_cmp(a: &(usize, &Monomial), b: &(usize, &Monomial)) -> Ordering {
    // Lower position index is the greater basis vector.
    match a.0.cmp(&b.0) {
        Ordering::Less => Ordering::Greater,
        Ordering::Greater => Ordering::Less,
        Ordering::Equal => MonomialOrder::GrevLex.cmp(a.1, b.1),
    }
}

impl ModVec {
    pub fn new(comps: Vec<Polynomial>) -> Self {
        assert!(!comps.is_empty(), "module vectors need positive rank");
        ModVec { comps }
    }

    pub fn zero(rank: usize, nvars: usize) -> Self {
        ModVec { comps: vec![Polynomial::zero(nvars); rank] }
    }

    pub fn rank(&self) -> usize {
        self.comps.len()
    }

    pub fn nvars(&self) -> usize {
        self.comps[0].nvars()
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.comps
    }

    pub fn into_components(self) -> Vec<Polynomial> {
        self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    fn leading(&self) -> Option<ModTerm> {
        for (pos, c) in self.comps.iter().enumerate() {
            if let Some((m, q)) = c.leading_term(MonomialOrder::GrevLex) {
                return Some(ModTerm { pos, mono: m.clone(), coeff: q.clone() });
            }
        }
        None
    }

    fn sub_scaled(&self, other: &ModVec, mono: &Monomial, coeff: &Q) -> ModVec {
        ModVec {
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a - &b.mul_monomial(mono, coeff))
                .collect(),
        }
    }

    fn scale(&self, c: &Q) -> ModVec {
        ModVec { comps: self.comps.iter().map(|p| p.scale(c)).collect() }
    }

    fn monic(&self) -> ModVec {
        match self.leading() {
            None => self.clone(),
            Some(lt) => self.scale(&(Q::one() / &lt.coeff)),
        }
    }
}

/// Full reduction of `f` against `basis`; deterministic reducer choice.
fn reduce_modvec(f: &ModVec, basis: &[ModVec]) -> ModVec {
    let leads: Vec<ModTerm> = basis
        .iter()
        .map(|g| g.leading().expect("zero element in module basis"))
        .collect();
    let mut p = f.clone();
    let mut rem = ModVec::zero(f.rank(), f.nvars());
    'outer: while let Some(lt) = p.leading() {
        for (k, lg) in leads.iter().enumerate() {
            if lg.pos == lt.pos {
                if let Some(m) = lt.mono.try_div(&lg.mono) {
                    let c = &lt.coeff / &lg.coeff;
                    p = p.sub_scaled(&basis[k], &m, &c);
                    continue 'outer;
                }
            }
        }
        // Move the irreducible leading term to the remainder.
        rem.comps[lt.pos].add_term(lt.mono.clone(), lt.coeff.clone());
        let mut single = ModVec::zero(p.rank(), p.nvars());
        single.comps[lt.pos].add_term(lt.mono.clone(), lt.coeff.clone());
        p = p.sub_scaled(&single, &Monomial::one(), &Q::one());
    }
    rem
}

/// Buchberger for submodules: S-vectors only exist between elements whose
/// leading terms share a position.
pub fn module_groebner(gens: &[ModVec]) -> Vec<ModVec> {
    let mut basis: Vec<ModVec> = gens.iter().filter(|g| !g.is_zero()).cloned().collect();
    if basis.is_empty() {
        return basis;
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for j in 1..basis.len() {
        for i in 0..j {
            pairs.push((i, j));
        }
    }
    while let Some(&(i, j)) = pairs.first() {
        // Deterministic: process in insertion order.
        pairs.remove(0);
        let (li, lj) = (basis[i].leading().unwrap(), basis[j].leading().unwrap());
        if li.pos != lj.pos {
            continue;
        }
        let lcm = li.mono.lcm(&lj.mono);
        let mi = lcm.try_div(&li.mono).unwrap();
        let mj = lcm.try_div(&lj.mono).unwrap();
        let a = basis[i].scale(&(Q::one() / &li.coeff));
        let b = basis[j].scale(&(Q::one() / &lj.coeff));
        let s = ModVec {
            comps: a
                .comps
                .iter()
                .zip(&b.comps)
                .map(|(p, q)| {
                    &p.mul_monomial(&mi, &Q::one()) - &q.mul_monomial(&mj, &Q::one())
                })
                .collect(),
        };
        let red = reduce_modvec(&s, &basis);
        if red.is_zero() {
            continue;
        }
        let new_index = basis.len();
        basis.push(red);
        for k in 0..new_index {
            pairs.push((k, new_index));
        }
    }
    inter_reduce_module(basis)
}

fn inter_reduce_module(mut basis: Vec<ModVec>) -> Vec<ModVec> {
    basis.retain(|g| !g.is_zero());
    // Minimalize by leading-term divisibility within equal positions.
    let mut keep = vec![true; basis.len()];
    for i in 0..basis.len() {
        if !keep[i] {
            continue;
        }
        let li = basis[i].leading().unwrap();
        for j in 0..basis.len() {
            if i == j || !keep[j] {
                continue;
            }
            let lj = basis[j].leading().unwrap();
            if lj.pos == li.pos && lj.mono.divides(&li.mono) && (lj.mono != li.mono || j < i) {
                keep[i] = false;
                break;
            }
        }
    }
    let minimal: Vec<ModVec> = basis
        .into_iter()
        .zip(keep)
        .filter_map(|(g, k)| if k { Some(g) } else { None })
        .collect();
    let mut reduced: Vec<ModVec> = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<ModVec> = minimal
            .iter()
            .enumerate()
            .filter_map(|(j, g)| if j != i { Some(g.clone()) } else { None })
            .collect();
        let r = if others.is_empty() {
            minimal[i].clone()
        } else {
            reduce_modvec(&minimal[i], &others)
        };
        if !r.is_zero() {
            reduced.push(r.monic());
        }
    }
    reduced.sort_by(|a, b| {
        let la = a.leading().unwrap();
        let lb = b.leading().unwrap();
        term_cmp(&(la.pos, &la.mono), &(lb.pos, &lb.mono))
    });
    reduced
}

/// Decides membership of `target` in the submodule generated by `gens`;
/// returns expression coefficients `c` with `target = Σ c_i · gens[i]` on
/// success.
///
/// Works in the augmented module `R^{rank + r}` where generator `i` is
/// extended by the `i`-th coefficient-tracking basis vector; the original
/// positions dominate, so reducing `(target | 0)` leaves the negated
/// certificate in the tracking block.
pub fn module_membership(target: &ModVec, gens: &[ModVec]) -> Option<Vec<Polynomial>> {
    let rank = target.rank();
    let nvars = target.nvars();
    let r = gens.len();
    if r == 0 {
        return if target.is_zero() { Some(Vec::new()) } else { None };
    }
    let mut aug_gens = Vec::with_capacity(r);
    for (i, g) in gens.iter().enumerate() {
        assert_eq!(g.rank(), rank, "module rank mismatch");
        let mut comps = g.comps.clone();
        for k in 0..r {
            comps.push(if k == i {
                Polynomial::one(nvars)
            } else {
                Polynomial::zero(nvars)
            });
        }
        aug_gens.push(ModVec::new(comps));
    }
    let basis = module_groebner(&aug_gens);
    let mut aug_target = target.comps.clone();
    for _ in 0..r {
        aug_target.push(Polynomial::zero(nvars));
    }
    let nf = reduce_modvec(&ModVec::new(aug_target), &basis);
    if nf.comps[..rank].iter().all(|p| p.is_zero()) {
        Some(nf.comps[rank..].iter().map(|p| -p).collect())
    } else {
        None
    }
}

/// Generators of the syzygy module of `gens`: all `(f_1, ..., f_r)` with
/// `Σ f_i · gens[i] = 0`, read off from the augmented-basis elements whose
/// original block vanishes.
pub fn syzygy_basis(gens: &[ModVec]) -> Vec<Vec<Polynomial>> {
    if gens.is_empty() {
        return Vec::new();
    }
    let rank = gens[0].rank();
    let nvars = gens[0].nvars();
    let r = gens.len();
    let mut aug_gens = Vec::with_capacity(r);
    for (i, g) in gens.iter().enumerate() {
        assert_eq!(g.rank(), rank, "module rank mismatch");
        let mut comps = g.comps.clone();
        for k in 0..r {
            comps.push(if k == i {
                Polynomial::one(nvars)
            } else {
                Polynomial::zero(nvars)
            });
        }
        aug_gens.push(ModVec::new(comps));
    }
    let basis = module_groebner(&aug_gens);
    basis
        .into_iter()
        .filter(|v| v.comps[..rank].iter().all(|p| p.is_zero()))
        .map(|v| v.comps[rank..].to_vec())
        .collect()
}
