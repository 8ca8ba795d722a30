//! Laurent polynomials with poles confined to designated variables.
//!
//! A [`LaurentPolynomial`] is a polynomial numerator together with a pole
//! exponent for finitely many variables (in practice: exceptional variables
//! of blowup charts). The canonical form cancels every common power of a
//! pole variable between numerator and denominator, so `is_polynomial`
//! detects removable poles exactly.

use std::collections::BTreeMap;

use crate::error::EngineError;
use crate::monomial::Monomial;
use crate::poly::{Polynomial, Q};

/// `numerator / Π x_v^{pole(v)}` in canonical (fully cancelled) form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentPolynomial {
    numerator: Polynomial,
    /// Positive pole exponents keyed by variable index.
    poles: BTreeMap<usize, u32>,
}

impl LaurentPolynomial {
    pub fn from_polynomial(p: Polynomial) -> Self {
        LaurentPolynomial { numerator: p, poles: BTreeMap::new() }
    }

    pub fn zero(nvars: usize) -> Self {
        LaurentPolynomial::from_polynomial(Polynomial::zero(nvars))
    }

    /// Builds `num / Π x_v^{e_v}` and cancels to canonical form.
    pub fn new(numerator: Polynomial, poles: BTreeMap<usize, u32>) -> Self {
        let mut out = LaurentPolynomial { numerator, poles };
        out.canonicalize();
        out
    }

    /// Divides a polynomial by a single variable power, keeping the
    /// uncancellable part as a pole.
    pub fn quotient_by_variable(p: Polynomial, var: usize, power: u32) -> Self {
        let mut poles = BTreeMap::new();
        if power > 0 {
            poles.insert(var, power);
        }
        LaurentPolynomial::new(p, poles)
    }

    fn canonicalize(&mut self) {
        if self.numerator.is_zero() {
            self.poles.clear();
            return;
        }
        let mut cancelled: Vec<(usize, u32)> = Vec::new();
        for (&v, &e) in self.poles.iter() {
            let avail = self.numerator.max_variable_divisor(v);
            let k = avail.min(e);
            if k > 0 {
                cancelled.push((v, k));
            }
        }
        for (v, k) in cancelled {
            self.numerator = self
                .numerator
                .exact_divide_by_variable(v, k)
                .expect("cancellation bounded by max divisor");
            let rest = self.poles[&v] - k;
            if rest == 0 {
                self.poles.remove(&v);
            } else {
                self.poles.insert(v, rest);
            }
        }
        self.poles.retain(|_, e| *e > 0);
    }

    pub fn nvars(&self) -> usize {
        self.numerator.nvars()
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.numerator
    }

    pub fn poles(&self) -> &BTreeMap<usize, u32> {
        &self.poles
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    /// True iff the canonical form has no pole left.
    pub fn is_polynomial(&self) -> bool {
        self.poles.is_empty()
    }

    /// Pole order in `var` (0 when analytic there).
    pub fn pole_order(&self, var: usize) -> u32 {
        self.poles.get(&var).copied().unwrap_or(0)
    }

    /// Extracts the numerator when no pole remains.
    pub fn into_polynomial(self) -> Result<Polynomial, EngineError> {
        if let Some((&v, &e)) = self.poles.iter().next() {
            return Err(EngineError::PoleObstruction(format!(
                "expression retains a pole of order {} in variable {}",
                e, v
            )));
        }
        Ok(self.numerator)
    }

    fn common_denominator(&self, other: &LaurentPolynomial) -> BTreeMap<usize, u32> {
        let mut den = self.poles.clone();
        for (&v, &e) in &other.poles {
            let cur = den.entry(v).or_insert(0);
            *cur = (*cur).max(e);
        }
        den
    }

    fn lift_to(&self, den: &BTreeMap<usize, u32>) -> Polynomial {
        let mut extra = Vec::new();
        for (&v, &e) in den {
            let have = self.pole_order(v);
            if e > have {
                extra.push((v, e - have));
            }
        }
        let m = Monomial::from_pairs(extra);
        self.numerator.mul_monomial(&m, &num::traits::One::one())
    }

    pub fn add(&self, other: &LaurentPolynomial) -> LaurentPolynomial {
        let den = self.common_denominator(other);
        let num = &self.lift_to(&den) + &other.lift_to(&den);
        LaurentPolynomial::new(num, den)
    }

    pub fn sub(&self, other: &LaurentPolynomial) -> LaurentPolynomial {
        let den = self.common_denominator(other);
        let num = &self.lift_to(&den) - &other.lift_to(&den);
        LaurentPolynomial::new(num, den)
    }

    pub fn neg(&self) -> LaurentPolynomial {
        LaurentPolynomial {
            numerator: -&self.numerator,
            poles: self.poles.clone(),
        }
    }

    pub fn mul(&self, other: &LaurentPolynomial) -> LaurentPolynomial {
        let mut poles = self.poles.clone();
        for (&v, &e) in &other.poles {
            *poles.entry(v).or_insert(0) += e;
        }
        LaurentPolynomial::new(&self.numerator * &other.numerator, poles)
    }

    pub fn mul_polynomial(&self, p: &Polynomial) -> LaurentPolynomial {
        LaurentPolynomial::new(&self.numerator * p, self.poles.clone())
    }

    pub fn scale(&self, c: &Q) -> LaurentPolynomial {
        LaurentPolynomial::new(self.numerator.scale(c), self.poles.clone())
    }

    /// Multiplies by `x_var` once (pole cancellation happens automatically).
    pub fn mul_variable(&self, var: usize) -> LaurentPolynomial {
        let m = Monomial::var(var);
        LaurentPolynomial::new(
            self.numerator.mul_monomial(&m, &num::traits::One::one()),
            self.poles.clone(),
        )
    }

    /// Canonical textual form `num / den` (plain numerator when analytic).
    pub fn display(&self, names: &[String]) -> String {
        if self.poles.is_empty() {
            return self.numerator.display(names);
        }
        let mut den = String::new();
        for (k, (&v, &e)) in self.poles.iter().enumerate() {
            if k > 0 {
                den.push('*');
            }
            den.push_str(&names[v]);
            if e > 1 {
                den.push('^');
                den.push_str(&e.to_string());
            }
        }
        let num = self.numerator.display(names);
        if self.numerator.num_terms() > 1 {
            format!("({}) / {}", num, den)
        } else {
            format!("{} / {}", num, den)
        }
    }
}
