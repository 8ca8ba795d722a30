//! Exact multivariate polynomials over the rationals, plus rational points.
//!
//! Terms are held in a `BTreeMap` keyed by [`Monomial`], whose `Ord` is
//! grevlex; storage order is therefore canonical and iteration is
//! deterministic. Coefficients are arbitrary-precision rationals and no zero
//! coefficient is ever stored, so structural equality is mathematical
//! equality within a fixed variable context.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};

use crate::error::EngineError;
use crate::monomial::{Monomial, MonomialOrder};

/// Exact rational scalar used everywhere in the engine.
pub type Q = BigRational;

/// Convenience constructor for integer scalars.
pub fn q_int(n: i64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

/// Convenience constructor for `num/den` scalars.
pub fn q_ratio(num: i64, den: i64) -> Q {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// A point with exact rational coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Point(pub Vec<Q>);

impl Point {
    pub fn origin(nvars: usize) -> Self {
        Point(vec![Q::zero(); nvars])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Q] {
        &self.0
    }

    pub fn is_origin(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, c) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", c)?;
        }
        write!(f, ")")
    }
}

/// A multivariate polynomial with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, Q>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Polynomial::constant(nvars, Q::one())
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Polynomial { nvars, terms }
    }

    /// The coordinate polynomial `x_i`.
    pub fn var(nvars: usize, i: usize) -> Result<Self, EngineError> {
        if i >= nvars {
            return Err(EngineError::IndexOutOfRange { index: i, nvars });
        }
        Ok(Polynomial::from_term(nvars, Monomial::var(i), Q::one()))
    }

    pub fn from_term(nvars: usize, m: Monomial, c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { nvars, terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Q)>>(nvars: usize, it: I) -> Self {
        let mut p = Polynomial::zero(nvars);
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending grevlex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    /// Terms in descending grevlex order (leading term first).
    pub fn terms_desc(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter().rev()
    }

    pub fn coefficient(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn constant_term(&self) -> Q {
        self.coefficient(&Monomial::one())
    }

    /// True iff the polynomial is a constant (possibly zero).
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    /// Returns the constant value when the polynomial is constant.
    pub fn as_constant(&self) -> Option<Q> {
        if self.is_constant() {
            Some(self.constant_term())
        } else {
            None
        }
    }

    /// True iff the polynomial is a nonzero constant, i.e. a unit of the
    /// polynomial ring.
    pub fn is_unit(&self) -> bool {
        !self.is_zero() && self.is_constant()
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.total_degree()).max()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.degree_of(var)).max().unwrap_or(0)
    }

    /// Leading monomial and coefficient under `order`.
    pub fn leading_term(&self, order: MonomialOrder) -> Option<(&Monomial, &Q)> {
        match order {
            MonomialOrder::GrevLex => self.terms.iter().next_back(),
            _ => self
                .terms
                .iter()
                .max_by(|(a, _), (b, _)| order.cmp(a, b)),
        }
    }

    pub fn scale(&self, c: &Q) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    /// Divides by the leading coefficient under `order`.
    pub fn monic(&self, order: MonomialOrder) -> Polynomial {
        match self.leading_term(order) {
            None => self.clone(),
            Some((_, c)) => {
                let inv = Q::one() / c;
                self.scale(&inv)
            }
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Q) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(t, a)| (t.mul(m), a * c))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.nvars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Partial derivative with respect to `x_i`.
    pub fn derive(&self, var: usize) -> Result<Polynomial, EngineError> {
        if var >= self.nvars {
            return Err(EngineError::IndexOutOfRange { index: var, nvars: self.nvars });
        }
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.degree_of(var);
            if e == 0 {
                continue;
            }
            let mut pairs: Vec<(usize, u32)> = m.pairs().to_vec();
            for p in pairs.iter_mut() {
                if p.0 == var {
                    p.1 -= 1;
                }
            }
            out.add_term(Monomial::from_pairs(pairs), c * q_int(e as i64));
        }
        Ok(out)
    }

    /// Exact evaluation at a rational point.
    pub fn evaluate(&self, p: &Point) -> Result<Q, EngineError> {
        if p.dim() != self.nvars {
            return Err(EngineError::DimensionMismatch { expected: self.nvars, got: p.dim() });
        }
        // Memoized powers per variable keep repeated exponents cheap.
        let mut powers: BTreeMap<(usize, u32), Q> = BTreeMap::new();
        let mut acc = Q::zero();
        for (m, c) in &self.terms {
            let mut val = c.clone();
            for &(i, e) in m.pairs() {
                let pw = powers.entry((i, e)).or_insert_with(|| {
                    let mut w = Q::one();
                    for _ in 0..e {
                        w *= &p.0[i];
                    }
                    w
                });
                val *= &*pw;
            }
            acc += val;
        }
        Ok(acc)
    }

    /// Simultaneous substitution `x_i -> images[i]`; a ring homomorphism
    /// into the context of `target_nvars` variables.
    pub fn substitute(
        &self,
        images: &[Polynomial],
        target_nvars: usize,
    ) -> Result<Polynomial, EngineError> {
        if images.len() != self.nvars {
            return Err(EngineError::UnmappedVariable { expected: self.nvars, got: images.len() });
        }
        for img in images {
            if img.nvars != target_nvars {
                return Err(EngineError::DimensionMismatch {
                    expected: target_nvars,
                    got: img.nvars,
                });
            }
        }
        let mut powers: BTreeMap<(usize, u32), Polynomial> = BTreeMap::new();
        let mut acc = Polynomial::zero(target_nvars);
        for (m, c) in &self.terms {
            let mut val = Polynomial::constant(target_nvars, c.clone());
            for &(i, e) in m.pairs() {
                let pw = powers
                    .entry((i, e))
                    .or_insert_with(|| images[i].pow(e));
                val = &val * pw;
            }
            acc = &acc + &val;
        }
        Ok(acc)
    }

    /// Sets `x_var = 0`.
    pub fn restrict_var_to_zero(&self, var: usize) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree_of(var) == 0)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Exact division by `x_var^k`; errors when some term lacks the factor.
    pub fn exact_divide_by_variable(&self, var: usize, k: u32) -> Result<Polynomial, EngineError> {
        if var >= self.nvars {
            return Err(EngineError::IndexOutOfRange { index: var, nvars: self.nvars });
        }
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            if m.degree_of(var) < k {
                return Err(EngineError::NotDivisible(format!(
                    "term {} is not divisible by variable {} to order {}",
                    m, var, k
                )));
            }
            let mut pairs: Vec<(usize, u32)> = m.pairs().to_vec();
            for p in pairs.iter_mut() {
                if p.0 == var {
                    p.1 -= k;
                }
            }
            out.add_term(Monomial::from_pairs(pairs), c.clone());
        }
        Ok(out)
    }

    /// Largest `k` with `x_var^k` dividing every term (0 for the zero
    /// polynomial).
    pub fn max_variable_divisor(&self, var: usize) -> u32 {
        self.terms
            .keys()
            .map(|m| m.degree_of(var))
            .min()
            .unwrap_or(0)
    }

    /// Re-embeds into a wider context, mapping `x_i` to `x_{i + offset}`.
    pub fn shift_vars(&self, offset: usize, target_nvars: usize) -> Polynomial {
        Polynomial {
            nvars: target_nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.shift(offset), c.clone()))
                .collect(),
        }
    }

    /// Inverse of [`Polynomial::shift_vars`]: maps `x_{i + offset}` back to
    /// `x_i`. The polynomial must not involve the first `offset` variables.
    pub fn unshift_vars(&self, offset: usize, target_nvars: usize) -> Polynomial {
        Polynomial {
            nvars: target_nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let pairs = m
                        .pairs()
                        .iter()
                        .map(|&(i, e)| {
                            assert!(i >= offset, "unshift below variable zero");
                            (i - offset, e)
                        })
                        .collect();
                    (Monomial::from_pairs(pairs), c.clone())
                })
                .collect(),
        }
    }

    /// Splits off the degree-≤1 truncation: constant term, the vector of
    /// linear coefficients, and whether any higher-degree term exists.
    pub fn linear_decomposition(&self) -> (Q, Vec<Q>, bool) {
        let mut linear = vec![Q::zero(); self.nvars];
        let mut higher = false;
        let mut constant = Q::zero();
        for (m, c) in &self.terms {
            match m.total_degree() {
                0 => constant = c.clone(),
                1 => {
                    let var = m.pairs()[0].0;
                    linear[var] = c.clone();
                }
                _ => higher = true,
            }
        }
        (constant, linear, higher)
    }

    /// True when every term is divisible by `x_var` (membership in the
    /// principal ideal `(x_var)`, no basis computation needed).
    pub fn in_variable_ideal(&self, var: usize) -> bool {
        self.terms.keys().all(|m| m.degree_of(var) > 0)
    }

    fn assert_same_context(&self, other: &Polynomial) {
        assert_eq!(
            self.nvars, other.nvars,
            "polynomial arithmetic across different variable contexts"
        );
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.assert_same_context(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.assert_same_context(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.assert_same_context(rhs);
        let mut out = Polynomial::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

/// Renders a coefficient for display; `3/2` style for non-integers.
fn fmt_coeff(c: &Q) -> String {
    if c.denom().is_one() {
        format!("{}", c.numer())
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl Polynomial {
    /// Canonical textual form using the given variable names: terms in
    /// descending grevlex order, `+ - * ^` syntax.
    pub fn display(&self, names: &[String]) -> String {
        assert_eq!(names.len(), self.nvars, "display names mismatch context");
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms_desc().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else if neg {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let coeff_is_one = abs.is_one();
            if m.is_one() {
                out.push_str(&fmt_coeff(&abs));
            } else {
                if !coeff_is_one {
                    out.push_str(&fmt_coeff(&abs));
                    out.push('*');
                }
                let mut first = true;
                for &(i, e) in m.pairs() {
                    if !first {
                        out.push('*');
                    }
                    first = false;
                    out.push_str(&names[i]);
                    if e > 1 {
                        out.push('^');
                        out.push_str(&e.to_string());
                    }
                }
            }
        }
        out
    }
}
