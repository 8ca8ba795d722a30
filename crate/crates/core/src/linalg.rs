//! Exact dense linear algebra over the rationals: row reduction, solving,
//! inversion, characteristic polynomials, and rational root extraction.
//!
//! Internal support for coordinate-change construction; sizes are tiny
//! (ambient dimensions), so dense Gaussian elimination is appropriate.

use num::traits::{One, Signed, Zero};
use num::BigInt;

use crate::poly::Q;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<Q>>,
}

impl QMatrix {
    pub fn from_rows(data: Vec<Vec<Q>>) -> Self {
        assert!(!data.is_empty(), "matrix needs at least one row");
        let cols = data[0].len();
        assert!(data.iter().all(|r| r.len() == cols), "ragged matrix rows");
        QMatrix { rows: data.len(), cols, data }
    }

    pub fn identity(n: usize) -> Self {
        let data = (0..n)
            .map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
            .collect();
        QMatrix { rows: n, cols: n, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn at(&self, i: usize, j: usize) -> &Q {
        &self.data[i][j]
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.data[i]
    }

    pub fn transpose(&self) -> QMatrix {
        let data = (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.data[i][j].clone()).collect())
            .collect();
        QMatrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let data = (0..self.rows)
            .map(|i| {
                (0..other.cols)
                    .map(|j| {
                        let mut s = Q::zero();
                        for k in 0..self.cols {
                            s += &self.data[i][k] * &other.data[k][j];
                        }
                        s
                    })
                    .collect()
            })
            .collect();
        QMatrix { rows: self.rows, cols: other.cols, data }
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut s = Q::zero();
                for k in 0..self.cols {
                    s += &self.data[i][k] * &v[k];
                }
                s
            })
            .collect()
    }

    pub fn trace(&self) -> Q {
        assert_eq!(self.rows, self.cols, "trace of non-square matrix");
        let mut s = Q::zero();
        for i in 0..self.rows {
            s += &self.data[i][i];
        }
        s
    }

    pub fn scale(&self, c: &Q) -> QMatrix {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|r| r.iter().map(|x| x * c).collect()).collect(),
        }
    }

    pub fn add(&self, other: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.iter().all(|x| x.is_zero()))
    }

    /// Reduced row echelon form plus the pivot column of each nonzero row.
    pub fn rref(&self) -> (QMatrix, Vec<usize>) {
        let mut m = self.data.clone();
        let mut pivots = Vec::new();
        let mut r = 0usize;
        for c in 0..self.cols {
            if r >= self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| !m[i][c].is_zero()) else {
                continue;
            };
            m.swap(r, pr);
            let inv = Q::one() / &m[r][c];
            for j in c..self.cols {
                let v = &m[r][j] * &inv;
                m[r][j] = v;
            }
            for i in 0..self.rows {
                if i != r && !m[i][c].is_zero() {
                    let f = m[i][c].clone();
                    for j in c..self.cols {
                        let v = &m[i][j] - &(&m[r][j] * &f);
                        m[i][j] = v;
                    }
                    m[i][c] = Q::zero();
                }
            }
            pivots.push(c);
            r += 1;
        }
        (QMatrix { rows: self.rows, cols: self.cols, data: m }, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// One exact solution of `self * x = b` (free variables set to zero),
    /// or `None` if inconsistent.
    pub fn solve(&self, b: &[Q]) -> Option<Vec<Q>> {
        assert_eq!(self.rows, b.len(), "solve shape mismatch");
        let mut aug = self.data.clone();
        for (i, row) in aug.iter_mut().enumerate() {
            row.push(b[i].clone());
        }
        let augm = QMatrix::from_rows(aug);
        let (r, pivots) = augm.rref();
        if pivots.contains(&self.cols) {
            return None; // pivot in the constants column
        }
        let mut x = vec![Q::zero(); self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = r.data[row][self.cols].clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<QMatrix> {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        let n = self.rows;
        let mut aug = self.data.clone();
        for (i, row) in aug.iter_mut().enumerate() {
            for j in 0..n {
                row.push(if i == j { Q::one() } else { Q::zero() });
            }
        }
        let (r, pivots) = QMatrix::from_rows(aug).rref();
        if pivots.len() != n || pivots.iter().any(|&c| c >= n) {
            return None;
        }
        let data = (0..n).map(|i| r.data[i][n..].to_vec()).collect();
        Some(QMatrix { rows: n, cols: n, data })
    }

    /// Canonical null-space basis from the reduced echelon form: one vector
    /// per free column, in ascending column order, with a unit in the free
    /// slot.
    pub fn null_space_basis(&self) -> Vec<Vec<Q>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![Q::zero(); self.cols];
                v[fc] = Q::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -r.data[row][fc].clone();
                }
                v
            })
            .collect()
    }

    /// Monic characteristic polynomial `det(lambda * I - A)` as coefficients
    /// `c[0] + c[1] lambda + ... + c[n] lambda^n`, by the trace recurrence.
    pub fn char_poly(&self) -> Vec<Q> {
        assert_eq!(self.rows, self.cols, "characteristic polynomial needs square matrix");
        let n = self.rows;
        let mut coeffs = vec![Q::zero(); n + 1];
        coeffs[n] = Q::one();
        let mut m = QMatrix::identity(n);
        for k in 1..=n {
            m = self.mul(&m);
            let c = -(m.trace() / Q::from_integer(BigInt::from(k)));
            coeffs[n - k] = c.clone();
            m = m.add(&QMatrix::identity(n).scale(&c));
        }
        coeffs
    }
}

fn divisors_of(n: &BigInt, cap: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs();
    if n.is_zero() {
        return Some(Vec::new());
    }
    if &n > cap {
        return None;
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            small.push(d.clone());
            let q = &n / &d;
            if q != d {
                large.push(q);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    Some(small)
}

/// All rational roots with multiplicity of a monic polynomial with rational
/// coefficients `c[0] + ... + c[n] x^n`. Returns `None` when the bounded
/// divisor search cannot certify the candidate set (coefficients too large).
pub(crate) fn rational_roots_with_multiplicity(coeffs: &[Q]) -> Option<Vec<(Q, usize)>> {
    let cap = BigInt::from(1_000_000_000_000u64);
    let mut c: Vec<Q> = coeffs.to_vec();
    let mut roots: Vec<(Q, usize)> = Vec::new();
    // Strip zero roots first.
    let mut zero_mult = 0usize;
    while c.len() > 1 && c[0].is_zero() {
        c.remove(0);
        zero_mult += 1;
    }
    if zero_mult > 0 {
        roots.push((Q::zero(), zero_mult));
    }
    while c.len() > 1 {
        // Clear denominators to an integer polynomial.
        let mut lcm = BigInt::one();
        for q in &c {
            let d = q.denom();
            let g = num::integer::gcd(lcm.clone(), d.clone());
            lcm = &lcm / &g * d;
        }
        let ints: Vec<BigInt> =
            c.iter().map(|q| q.numer() * (&lcm / q.denom())).collect();
        let a0 = &ints[0];
        let an = &ints[ints.len() - 1];
        let ps = divisors_of(a0, &cap)?;
        let qs = divisors_of(an, &cap)?;
        let mut found: Option<Q> = None;
        'search: for p in &ps {
            for q in &qs {
                for sign in [1i32, -1] {
                    let cand = Q::new(p * BigInt::from(sign), q.clone());
                    // Horner evaluation.
                    let mut acc = Q::zero();
                    for k in (0..c.len()).rev() {
                        acc = acc * &cand + &c[k];
                    }
                    if acc.is_zero() {
                        found = Some(cand);
                        break 'search;
                    }
                }
            }
        }
        let Some(root) = found else {
            // No further rational roots; report what was found so the caller
            // can compare total multiplicity against the degree.
            roots.sort_by(|a, b| a.0.cmp(&b.0));
            return Some(roots);
        };
        // Deflate by (x - root) repeatedly to capture multiplicity.
        let mut mult = 0usize;
        loop {
            // Synthetic division of c by (x - root).
            let n = c.len() - 1;
            let mut quot = vec![Q::zero(); n];
            let mut carry = Q::zero();
            for k in (0..=n).rev() {
                let v = &c[k] + &(&carry * &root);
                if k == 0 {
                    if !v.is_zero() {
                        break;
                    }
                } else {
                    quot[k - 1] = v.clone();
                }
                carry = v;
            }
            // Remainder is the value at the root.
            let mut acc = Q::zero();
            for k in (0..c.len()).rev() {
                acc = acc * &root + &c[k];
            }
            if !acc.is_zero() {
                break;
            }
            c = quot;
            mult += 1;
            if c.len() <= 1 {
                break;
            }
        }
        debug_assert!(mult > 0);
        roots.push((root, mult));
    }
    roots.sort_by(|a, b| a.0.cmp(&b.0));
    Some(roots)
}
