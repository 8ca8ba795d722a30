//! Sparse exponent vectors and the monomial orders used by the engine.

use std::cmp::Ordering;
use std::fmt;

/// A monomial, stored as a sparse exponent vector sorted by variable index.
///
/// Zero exponents are never stored, so structural equality is canonical
/// equality of monomials. Variable indices refer to positions in the ambient
/// chart's ordered variable list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    /// `(variable index, exponent)` pairs, strictly increasing in the index,
    /// every exponent positive.
    pairs: Vec<(usize, u32)>,
}

impl Monomial {
    /// The monomial `1`.
    pub fn one() -> Self {
        Monomial { pairs: Vec::new() }
    }

    /// The monomial `x_i`.
    pub fn var(i: usize) -> Self {
        Monomial { pairs: vec![(i, 1)] }
    }

    /// The monomial `x_i^e` (`1` when `e == 0`).
    pub fn var_pow(i: usize, e: u32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial { pairs: vec![(i, e)] }
        }
    }

    /// Builds a monomial from arbitrary `(index, exponent)` pairs.
    pub fn from_pairs(mut pairs: Vec<(usize, u32)>) -> Self {
        pairs.retain(|&(_, e)| e > 0);
        pairs.sort_by_key(|&(i, _)| i);
        let mut merged: Vec<(usize, u32)> = Vec::with_capacity(pairs.len());
        for (i, e) in pairs {
            match merged.last_mut() {
                Some(last) if last.0 == i => last.1 += e,
                _ => merged.push((i, e)),
            }
        }
        Monomial { pairs: merged }
    }

    pub fn is_one(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(usize, u32)] {
        &self.pairs
    }

    pub fn total_degree(&self) -> u32 {
        self.pairs.iter().map(|&(_, e)| e).sum()
    }

    pub fn degree_of(&self, var: usize) -> u32 {
        self.pairs
            .iter()
            .find(|&&(i, _)| i == var)
            .map(|&(_, e)| e)
            .unwrap_or(0)
    }

    /// Largest variable index appearing, if any.
    pub fn max_var(&self) -> Option<usize> {
        self.pairs.last().map(|&(i, _)| i)
    }

    /// Iterator over the variables that appear.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.pairs.iter().map(|&(i, _)| i)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut pairs = Vec::with_capacity(self.pairs.len() + other.pairs.len());
        let (mut a, mut b) = (self.pairs.iter().peekable(), other.pairs.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&(ia, ea)), Some(&&(ib, eb))) => match ia.cmp(&ib) {
                    Ordering::Less => {
                        pairs.push((ia, ea));
                        a.next();
                    }
                    Ordering::Greater => {
                        pairs.push((ib, eb));
                        b.next();
                    }
                    Ordering::Equal => {
                        pairs.push((ia, ea + eb));
                        a.next();
                        b.next();
                    }
                },
                (Some(&&p), None) => {
                    pairs.push(p);
                    a.next();
                }
                (None, Some(&&p)) => {
                    pairs.push(p);
                    b.next();
                }
                (None, None) => break,
            }
        }
        Monomial { pairs }
    }

    /// `self / other` when `other` divides `self`.
    pub fn try_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut pairs = Vec::with_capacity(self.pairs.len());
        let mut b = other.pairs.iter().peekable();
        for &(i, e) in &self.pairs {
            match b.peek() {
                Some(&&(ib, eb)) if ib == i => {
                    if eb > e {
                        return None;
                    }
                    if e > eb {
                        pairs.push((i, e - eb));
                    }
                    b.next();
                }
                _ => pairs.push((i, e)),
            }
        }
        if b.peek().is_some() {
            return None;
        }
        Some(Monomial { pairs })
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        other.try_div(self).is_some()
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let mut pairs = Vec::new();
        let (mut a, mut b) = (self.pairs.iter().peekable(), other.pairs.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&(ia, ea)), Some(&&(ib, eb))) => match ia.cmp(&ib) {
                    Ordering::Less => {
                        pairs.push((ia, ea));
                        a.next();
                    }
                    Ordering::Greater => {
                        pairs.push((ib, eb));
                        b.next();
                    }
                    Ordering::Equal => {
                        pairs.push((ia, ea.max(eb)));
                        a.next();
                        b.next();
                    }
                },
                (Some(&&p), None) => {
                    pairs.push(p);
                    a.next();
                }
                (None, Some(&&p)) => {
                    pairs.push(p);
                    b.next();
                }
                (None, None) => break,
            }
        }
        Monomial { pairs }
    }

    /// True when the two monomials share no variable.
    pub fn coprime(&self, other: &Monomial) -> bool {
        let (mut a, mut b) = (self.pairs.iter().peekable(), other.pairs.iter().peekable());
        while let (Some(&&(ia, _)), Some(&&(ib, _))) = (a.peek(), b.peek()) {
            match ia.cmp(&ib) {
                Ordering::Less => {
                    a.next();
                }
                Ordering::Greater => {
                    b.next();
                }
                Ordering::Equal => return false,
            }
        }
        true
    }

    /// Shifts every variable index by `offset` (used to splice auxiliary
    /// variables in front of a context).
    pub fn shift(&self, offset: usize) -> Monomial {
        Monomial {
            pairs: self.pairs.iter().map(|&(i, e)| (i + offset, e)).collect(),
        }
    }

    /// Removes variable `var` entirely (sets its exponent to zero).
    pub fn without_var(&self, var: usize) -> Monomial {
        Monomial {
            pairs: self
                .pairs
                .iter()
                .copied()
                .filter(|&(i, _)| i != var)
                .collect(),
        }
    }

    /// Graded reverse lexicographic comparison, `x_0 > x_1 > ...` as the
    /// underlying variable order.
    pub fn grevlex_cmp(&self, other: &Monomial) -> Ordering {
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        // Ties: compare from the largest variable index downwards; the
        // monomial with the *smaller* exponent on the last differing
        // variable is the larger one.
        let (mut a, mut b) = (self.pairs.iter().rev(), other.pairs.iter().rev());
        loop {
            match (a.next(), b.next()) {
                (Some(&(ia, ea)), Some(&(ib, eb))) => match ia.cmp(&ib) {
                    // `self` has a higher trailing variable: its exponent
                    // there exceeds `other`'s zero, so `self` is smaller.
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Equal => match ea.cmp(&eb) {
                        Ordering::Equal => {}
                        Ordering::Less => return Ordering::Greater,
                        Ordering::Greater => return Ordering::Less,
                    },
                },
                (Some(_), None) => return Ordering::Less,
                (None, Some(_)) => return Ordering::Greater,
                (None, None) => return Ordering::Equal,
            }
        }
    }

    /// Lexicographic comparison with `x_0 > x_1 > ...`.
    pub fn lex_cmp(&self, other: &Monomial) -> Ordering {
        let (mut a, mut b) = (self.pairs.iter(), other.pairs.iter());
        loop {
            match (a.next(), b.next()) {
                (Some(&(ia, ea)), Some(&(ib, eb))) => match ia.cmp(&ib) {
                    // `self`'s earliest variable comes before `other`'s, so
                    // `self` has positive exponent where `other` has zero.
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => match ea.cmp(&eb) {
                        Ordering::Equal => {}
                        ord => return ord,
                    },
                },
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (None, None) => return Ordering::Equal,
            }
        }
    }

    /// The sub-monomial supported on variables `< k`.
    fn head_block(&self, k: usize) -> Monomial {
        Monomial {
            pairs: self
                .pairs
                .iter()
                .copied()
                .take_while(|&(i, _)| i < k)
                .collect(),
        }
    }

    /// The sub-monomial supported on variables `>= k`.
    fn tail_block(&self, k: usize) -> Monomial {
        Monomial {
            pairs: self
                .pairs
                .iter()
                .copied()
                .skip_while(|&(i, _)| i < k)
                .collect(),
        }
    }
}

/// Total order used for storage: grevlex. `BTreeMap<Monomial, _>` therefore
/// holds polynomial terms in ascending grevlex order.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.grevlex_cmp(other)
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for &(i, e) in &self.pairs {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "x{}", i)?;
            } else {
                write!(f, "x{}^{}", i, e)?;
            }
        }
        Ok(())
    }
}

/// A monomial order on a polynomial ring.
///
/// `GrevLex` is the default computational order. `Lex` and the block
/// elimination orders are constructed on demand for elimination tasks
/// (ideal quotients, intersections, auxiliary-variable tricks).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MonomialOrder {
    /// Graded reverse lexicographic.
    GrevLex,
    /// Pure lexicographic, `x_0 > x_1 > ...`.
    Lex,
    /// Block elimination order for the first `k` variables: monomials are
    /// compared by grevlex on the first block, ties broken by grevlex on
    /// the remaining variables. Any monomial involving a block variable is
    /// larger than any monomial free of them.
    Eliminate(usize),
}

impl MonomialOrder {
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match *self {
            MonomialOrder::GrevLex => a.grevlex_cmp(b),
            MonomialOrder::Lex => a.lex_cmp(b),
            MonomialOrder::Eliminate(k) => {
                match a.head_block(k).grevlex_cmp(&b.head_block(k)) {
                    Ordering::Equal => a.tail_block(k).grevlex_cmp(&b.tail_block(k)),
                    ord => ord,
                }
            }
        }
    }

    pub fn max<'a>(&self, a: &'a Monomial, b: &'a Monomial) -> &'a Monomial {
        if self.cmp(a, b) == Ordering::Less {
            b
        } else {
            a
        }
    }
}
