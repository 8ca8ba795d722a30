//! Polynomial ideals, Gröbner bases and the derived decision procedures.
//!
//! The basis engine is classic Buchberger with the sugar selection strategy
//! and coprime-leading-term pair skipping. Bases are fully reduced, monic and
//! sorted, so a basis is a canonical form for the ideal under its order.

use std::sync::OnceLock;

use num::traits::{One, Zero};

use crate::error::EngineError;
use crate::monomial::{Monomial, MonomialOrder};
use crate::poly::{Point, Polynomial, Q};

/// A verified Gröbner basis: reduced, monic, sorted ascending by leading
/// monomial under `order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroebnerBasis {
    nvars: usize,
    order: MonomialOrder,
    elements: Vec<Polynomial>,
}

impl GroebnerBasis {
    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn elements(&self) -> &[Polynomial] {
        &self.elements
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Full normal form: every term of the result is reduced.
    pub fn normal_form(&self, f: &Polynomial) -> Result<Polynomial, EngineError> {
        if f.nvars() != self.nvars {
            return Err(EngineError::DimensionMismatch { expected: self.nvars, got: f.nvars() });
        }
        Ok(reduce_full(f, &self.elements, self.order))
    }
}

/// S-polynomial of `f` and `g` (both nonzero) under `order`.
fn s_polynomial(f: &Polynomial, g: &Polynomial, order: MonomialOrder) -> Polynomial {
    let (ltf, cf) = f.leading_term(order).expect("s_polynomial of zero");
    let (ltg, cg) = g.leading_term(order).expect("s_polynomial of zero");
    let lcm = ltf.lcm(ltg);
    let mf = lcm.try_div(ltf).unwrap();
    let mg = lcm.try_div(ltg).unwrap();
    let a = f.mul_monomial(&mf, &(Q::one() / cf));
    let b = g.mul_monomial(&mg, &(Q::one() / cg));
    &a - &b
}

/// Full reduction of `f` modulo `basis`: the remainder has no term divisible
/// by any basis leading term. Deterministic: the first basis element (in
/// list order) whose leading term divides is always chosen.
fn reduce_full(f: &Polynomial, basis: &[Polynomial], order: MonomialOrder) -> Polynomial {
    let mut p = f.clone();
    let mut rem = Polynomial::zero(f.nvars());
    let leads: Vec<(Monomial, Q)> = basis
        .iter()
        .map(|g| {
            let (m, c) = g.leading_term(order).expect("zero element in basis");
            (m.clone(), c.clone())
        })
        .collect();
    'outer: while !p.is_zero() {
        let (lt, lc) = {
            let (m, c) = p.leading_term(order).unwrap();
            (m.clone(), c.clone())
        };
        for (k, (lm, lcoef)) in leads.iter().enumerate() {
            if let Some(q) = lt.try_div(lm) {
                let coef = &lc / lcoef;
                p = &p - &basis[k].mul_monomial(&q, &coef);
                continue 'outer;
            }
        }
        // Leading term irreducible: move it to the remainder.
        rem.add_term(lt.clone(), lc.clone());
        let lead = Polynomial::from_term(p.nvars(), lt, lc);
        p = &p - &lead;
    }
    rem
}

/// Division with quotient tracking by a single divisor; returns the quotient
/// when the remainder is zero.
pub fn exact_divide(f: &Polynomial, g: &Polynomial) -> Result<Polynomial, EngineError> {
    if g.is_zero() {
        return Err(EngineError::DivisionByZero);
    }
    if f.is_zero() {
        return Ok(Polynomial::zero(f.nvars()));
    }
    let order = MonomialOrder::GrevLex;
    let (ltg, cg) = g.leading_term(order).unwrap();
    let (ltg, cg) = (ltg.clone(), cg.clone());
    let mut p = f.clone();
    let mut quot = Polynomial::zero(f.nvars());
    while !p.is_zero() {
        let (lt, lc) = {
            let (m, c) = p.leading_term(order).unwrap();
            (m.clone(), c.clone())
        };
        match lt.try_div(&ltg) {
            Some(q) => {
                let coef = &lc / &cg;
                quot.add_term(q.clone(), coef.clone());
                p = &p - &g.mul_monomial(&q, &coef);
            }
            None => {
                return Err(EngineError::NotDivisible(
                    "leading term not divisible during exact polynomial division".to_string(),
                ))
            }
        }
    }
    Ok(quot)
}

/// Buchberger completion with sugar selection and coprime-pair skipping,
/// followed by inter-reduction to the canonical reduced monic basis.
pub fn buchberger(generators: &[Polynomial], order: MonomialOrder) -> Vec<Polynomial> {
    let mut basis: Vec<Polynomial> = Vec::new();
    let mut sugars: Vec<u32> = Vec::new();
    for g in generators {
        if !g.is_zero() {
            sugars.push(g.total_degree().unwrap_or(0));
            basis.push(g.clone());
        }
    }
    if basis.is_empty() {
        return Vec::new();
    }

    struct Pair {
        i: usize,
        j: usize,
        lcm: Monomial,
        sugar: u32,
    }
    let make_pair = |basis: &[Polynomial], sugars: &[u32], i: usize, j: usize| -> Option<Pair> {
        let (li, _) = basis[i].leading_term(order).unwrap();
        let (lj, _) = basis[j].leading_term(order).unwrap();
        // First Buchberger criterion: coprime leading terms reduce to zero.
        if li.coprime(lj) {
            return None;
        }
        let lcm = li.lcm(lj);
        let si = sugars[i] + lcm.try_div(li).unwrap().total_degree();
        let sj = sugars[j] + lcm.try_div(lj).unwrap().total_degree();
        Some(Pair { i, j, lcm, sugar: si.max(sj) })
    };

    let mut pairs: Vec<Pair> = Vec::new();
    for j in 1..basis.len() {
        for i in 0..j {
            if let Some(p) = make_pair(&basis, &sugars, i, j) {
                pairs.push(p);
            }
        }
    }

    while !pairs.is_empty() {
        // Sugar strategy: smallest sugar first, ties by lcm order then index.
        let mut best = 0;
        for k in 1..pairs.len() {
            let a = &pairs[k];
            let b = &pairs[best];
            let better = match a.sugar.cmp(&b.sugar) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Greater => false,
                std::cmp::Ordering::Equal => match order.cmp(&a.lcm, &b.lcm) {
                    std::cmp::Ordering::Less => true,
                    std::cmp::Ordering::Greater => false,
                    std::cmp::Ordering::Equal => (a.i, a.j) < (b.i, b.j),
                },
            };
            if better {
                best = k;
            }
        }
        let pair = pairs.swap_remove(best);
        let s = s_polynomial(&basis[pair.i], &basis[pair.j], order);
        let red = reduce_full(&s, &basis, order);
        if red.is_zero() {
            continue;
        }
        let new_index = basis.len();
        sugars.push(pair.sugar.max(red.total_degree().unwrap_or(0)));
        basis.push(red);
        for i in 0..new_index {
            if let Some(p) = make_pair(&basis, &sugars, i, new_index) {
                pairs.push(p);
            }
        }
    }

    inter_reduce(basis, order)
}

/// Minimalizes and tail-reduces a basis; output monic, sorted ascending.
fn inter_reduce(mut basis: Vec<Polynomial>, order: MonomialOrder) -> Vec<Polynomial> {
    basis.retain(|g| !g.is_zero());
    if basis.is_empty() {
        return basis;
    }
    // Minimal generating set of the leading-term ideal.
    let mut keep: Vec<bool> = vec![true; basis.len()];
    for i in 0..basis.len() {
        if !keep[i] {
            continue;
        }
        let (li, _) = basis[i].leading_term(order).unwrap();
        let li = li.clone();
        for j in 0..basis.len() {
            if i == j || !keep[j] {
                continue;
            }
            let (lj, _) = basis[j].leading_term(order).unwrap();
            if lj.divides(&li) && (lj != &li || j < i) {
                keep[i] = false;
                break;
            }
        }
    }
    let minimal: Vec<Polynomial> = basis
        .into_iter()
        .zip(keep)
        .filter_map(|(g, k)| if k { Some(g) } else { None })
        .collect();
    // Tail-reduce every element against the others.
    let mut reduced: Vec<Polynomial> = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<Polynomial> = minimal
            .iter()
            .enumerate()
            .filter_map(|(j, g)| if j != i { Some(g.clone()) } else { None })
            .collect();
        let r = reduce_full(&minimal[i], &others, order);
        if !r.is_zero() {
            reduced.push(r.monic(order));
        }
    }
    reduced.sort_by(|a, b| {
        let (la, _) = a.leading_term(order).unwrap();
        let (lb, _) = b.leading_term(order).unwrap();
        order.cmp(la, lb)
    });
    reduced
}

/// Checks the Buchberger criterion: every S-polynomial of the putative basis
/// reduces to zero. Used as an independent soundness certificate.
pub fn is_groebner_basis(basis: &[Polynomial], order: MonomialOrder) -> bool {
    for j in 1..basis.len() {
        for i in 0..j {
            let s = s_polynomial(&basis[i], &basis[j], order);
            if !reduce_full(&s, basis, order).is_zero() {
                return false;
            }
        }
    }
    true
}

/// A finitely generated polynomial ideal.
///
/// The declared generator list is preserved verbatim (it matters to Fitting
/// matrices and controlled transforms); the reduced Gröbner basis under
/// grevlex is computed lazily into a write-once cell, so a shared `Ideal` is
/// safe to query concurrently. At fill time every declared generator is
/// checked to reduce to zero against the computed basis.
#[derive(Debug)]
pub struct Ideal {
    nvars: usize,
    generators: Vec<Polynomial>,
    cache: OnceLock<GroebnerBasis>,
}

impl Clone for Ideal {
    fn clone(&self) -> Self {
        let cache = OnceLock::new();
        if let Some(basis) = self.cache.get() {
            let _ = cache.set(basis.clone());
        }
        Ideal { nvars: self.nvars, generators: self.generators.clone(), cache }
    }
}

impl PartialEq for Ideal {
    /// Structural equality of generator lists (use [`Ideal::equals`] for
    /// mathematical equality).
    fn eq(&self, other: &Self) -> bool {
        self.nvars == other.nvars && self.generators == other.generators
    }
}
impl Eq for Ideal {}

impl Ideal {
    /// Builds an ideal from generators; zero generators are dropped.
    pub fn new(nvars: usize, generators: Vec<Polynomial>) -> Result<Self, EngineError> {
        for g in &generators {
            if g.nvars() != nvars {
                return Err(EngineError::DimensionMismatch { expected: nvars, got: g.nvars() });
            }
        }
        let generators: Vec<Polynomial> =
            generators.into_iter().filter(|g| !g.is_zero()).collect();
        Ok(Ideal { nvars, generators, cache: OnceLock::new() })
    }

    pub fn zero(nvars: usize) -> Self {
        Ideal { nvars, generators: Vec::new(), cache: OnceLock::new() }
    }

    pub fn unit(nvars: usize) -> Self {
        Ideal {
            nvars,
            generators: vec![Polynomial::one(nvars)],
            cache: OnceLock::new(),
        }
    }

    /// The maximal ideal of a rational point: `(x_1 - p_1, ..., x_n - p_n)`.
    pub fn maximal_ideal_at(p: &Point) -> Self {
        let n = p.dim();
        let gens = (0..n)
            .map(|i| {
                let x = Polynomial::var(n, i).expect("index in range");
                &x - &Polynomial::constant(n, p.0[i].clone())
            })
            .collect();
        Ideal { nvars: n, generators: gens, cache: OnceLock::new() }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn is_zero_ideal(&self) -> bool {
        self.generators.is_empty()
    }

    /// The reduced grevlex Gröbner basis, computed once and cached.
    pub fn groebner_basis(&self) -> &GroebnerBasis {
        self.cache.get_or_init(|| {
            let elements = buchberger(&self.generators, MonomialOrder::GrevLex);
            let basis = GroebnerBasis {
                nvars: self.nvars,
                order: MonomialOrder::GrevLex,
                elements,
            };
            // Fill-time soundness check: the basis must reduce every
            // declared generator to zero.
            for g in &self.generators {
                let nf = reduce_full(g, &basis.elements, basis.order);
                assert!(
                    nf.is_zero(),
                    "internal invariant violated: generator does not reduce to zero \
                     against its own cached basis"
                );
            }
            basis
        })
    }

    /// A reduced basis under an explicitly chosen order (not cached).
    pub fn groebner_basis_with(&self, order: MonomialOrder) -> GroebnerBasis {
        GroebnerBasis {
            nvars: self.nvars,
            order,
            elements: buchberger(&self.generators, order),
        }
    }

    /// Ideal membership via normal form against the cached basis.
    pub fn contains(&self, f: &Polynomial) -> Result<bool, EngineError> {
        if f.nvars() != self.nvars {
            return Err(EngineError::DimensionMismatch { expected: self.nvars, got: f.nvars() });
        }
        if f.is_zero() {
            return Ok(true);
        }
        if self.generators.is_empty() {
            return Ok(false);
        }
        Ok(self.groebner_basis().normal_form(f)?.is_zero())
    }

    /// Containment `other ⊆ self`.
    pub fn contains_ideal(&self, other: &Ideal) -> Result<bool, EngineError> {
        for g in &other.generators {
            if !self.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Mathematical equality via mutual containment of generators.
    pub fn equals(&self, other: &Ideal) -> Result<bool, EngineError> {
        Ok(self.contains_ideal(other)? && other.contains_ideal(self)?)
    }

    /// True iff the ideal is the whole ring.
    pub fn is_unit_ideal(&self) -> bool {
        let basis = self.groebner_basis();
        basis.elements.len() == 1 && basis.elements[0].is_unit()
    }

    /// Sum of ideals: concatenated generator lists, structural duplicates
    /// dropped.
    pub fn sum(&self, other: &Ideal) -> Result<Ideal, EngineError> {
        if other.nvars != self.nvars {
            return Err(EngineError::DimensionMismatch { expected: self.nvars, got: other.nvars });
        }
        let mut gens = self.generators.clone();
        for g in &other.generators {
            if !gens.contains(g) {
                gens.push(g.clone());
            }
        }
        Ideal::new(self.nvars, gens)
    }

    /// Multiplies every generator by `p`.
    pub fn scale_generators(&self, p: &Polynomial) -> Result<Ideal, EngineError> {
        if p.nvars() != self.nvars {
            return Err(EngineError::DimensionMismatch { expected: self.nvars, got: p.nvars() });
        }
        Ideal::new(self.nvars, self.generators.iter().map(|g| g * p).collect())
    }

    /// True iff every generator vanishes at `p` (i.e. `p ∈ V(I)`).
    pub fn vanishes_at(&self, p: &Point) -> Result<bool, EngineError> {
        for g in &self.generators {
            if !g.evaluate(p)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Intersection via the auxiliary-variable trick: eliminate `t` from
    /// `t·I + (1-t)·J`.
    pub fn intersection(&self, other: &Ideal) -> Result<Ideal, EngineError> {
        if other.nvars != self.nvars {
            return Err(EngineError::DimensionMismatch { expected: self.nvars, got: other.nvars });
        }
        if self.is_zero_ideal() || other.is_zero_ideal() {
            return Ok(Ideal::zero(self.nvars));
        }
        let n = self.nvars;
        let ext = n + 1; // t is variable 0, originals shifted by one.
        let t = Polynomial::var(ext, 0).expect("t in range");
        let one_minus_t = &Polynomial::one(ext) - &t;
        let mut gens: Vec<Polynomial> = Vec::new();
        for f in &self.generators {
            gens.push(&t * &f.shift_vars(1, ext));
        }
        for g in &other.generators {
            gens.push(&one_minus_t * &g.shift_vars(1, ext));
        }
        let basis = buchberger(&gens, MonomialOrder::Eliminate(1));
        let kept: Vec<Polynomial> = basis
            .into_iter()
            .filter(|f| f.degree_in(0) == 0)
            .map(|f| f.unshift_vars(1, n))
            .collect();
        Ideal::new(n, kept)
    }

    /// Ideal quotient `(self : other)` by the elimination method: for each
    /// generator `g` of `other`, divide `self ∩ (g)` by `g`, then intersect
    /// over the generators.
    pub fn quotient(&self, other: &Ideal) -> Result<Ideal, EngineError> {
        if other.nvars != self.nvars {
            return Err(EngineError::DimensionMismatch { expected: self.nvars, got: other.nvars });
        }
        // (I : (0)) is the whole ring.
        if other.is_zero_ideal() {
            return Ok(Ideal::unit(self.nvars));
        }
        let mut acc: Option<Ideal> = None;
        for g in &other.generators {
            let principal = Ideal::new(self.nvars, vec![g.clone()])?;
            let meet = self.intersection(&principal)?;
            let divided: Result<Vec<Polynomial>, EngineError> =
                meet.generators.iter().map(|f| exact_divide(f, g)).collect();
            let colon_g = Ideal::new(self.nvars, divided?)?;
            acc = Some(match acc {
                None => colon_g,
                Some(prev) => prev.intersection(&colon_g)?,
            });
        }
        Ok(acc.expect("other has at least one generator"))
    }

    /// Canonical display of the generator list.
    pub fn display(&self, names: &[String]) -> String {
        if self.generators.is_empty() {
            return "(0)".to_string();
        }
        let body: Vec<String> = self.generators.iter().map(|g| g.display(names)).collect();
        format!("({})", body.join(", "))
    }
}

/// Brute-force membership for monomial ideals: a monomial lies in a
/// monomial ideal iff some generator divides it; a polynomial lies in it
/// iff every term does. Independent oracle used by the test suites.
pub fn monomial_ideal_membership_oracle(gens: &[Monomial], f: &Polynomial) -> bool {
    f.terms()
        .all(|(m, _)| gens.iter().any(|g| g.divides(m)))
}
