//! Sparse multivariate polynomials with integer coefficients.
//!
//! Variables live in fixed slots: `x1..x6` occupy slots 0..=5 and the
//! parameter `lambda` occupies slot 6. A monomial is packed into a `u64`
//! with one byte per slot and the total degree in the top byte, so that
//! comparing the packed words is exactly graded-lexicographic order with
//! `x1 < x2 < ... < x6 < lambda`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::AlgebraError;

/// Number of coordinate slots available for `x` variables.
pub const MAX_X: usize = 6;
/// Total number of variable slots (coordinates plus `lambda`).
pub const NUM_SLOTS: usize = 7;
/// Slot occupied by the formal parameter `lambda`.
pub const LAMBDA_SLOT: usize = 6;

/// A declared variable of the scalar ring.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    /// Base coordinate `x_i`, 1-based.
    X(u8),
    Lambda,
}

impl Var {
    pub fn slot(self) -> Result<usize, AlgebraError> {
        match self {
            Var::X(i) if (1..=MAX_X as u8).contains(&i) => Ok(i as usize - 1),
            Var::X(i) => Err(AlgebraError::UnknownVariable(format!("x{i}"))),
            Var::Lambda => Ok(LAMBDA_SLOT),
        }
    }

    pub fn from_slot(slot: usize) -> Var {
        if slot == LAMBDA_SLOT {
            Var::Lambda
        } else {
            Var::X(slot as u8 + 1)
        }
    }

    pub fn name(self) -> String {
        match self {
            Var::X(i) => format!("x{i}"),
            Var::Lambda => "lambda".to_string(),
        }
    }
}

/// Packed exponent vector.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(u64);

const DEG_SHIFT: u32 = 56;

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn var(slot: usize) -> Monomial {
        Monomial::var_pow(slot, 1)
    }

    pub fn var_pow(slot: usize, e: u32) -> Monomial {
        assert!(slot < NUM_SLOTS && e < 256, "monomial exponent out of range");
        Monomial(((e as u64) << (8 * slot)) | ((e as u64) << DEG_SHIFT))
    }

    pub fn from_exponents(exps: &[u32]) -> Monomial {
        exps.iter()
            .enumerate()
            .fold(Monomial::ONE, |m, (s, &e)| m.mul(Monomial::var_pow(s, e)))
    }

    #[inline]
    pub fn exp(self, slot: usize) -> u32 {
        ((self.0 >> (8 * slot)) & 0xff) as u32
    }

    #[inline]
    pub fn degree(self) -> u32 {
        (self.0 >> DEG_SHIFT) as u32
    }

    pub fn exponents(self) -> [u32; NUM_SLOTS] {
        let mut out = [0; NUM_SLOTS];
        for (s, e) in out.iter_mut().enumerate() {
            *e = self.exp(s);
        }
        out
    }

    #[inline]
    pub fn mul(self, other: Monomial) -> Monomial {
        assert!(self.degree() + other.degree() < 256, "monomial degree overflow");
        Monomial(self.0 + other.0)
    }

    #[inline]
    pub fn divides(self, other: Monomial) -> bool {
        (0..NUM_SLOTS).all(|s| self.exp(s) <= other.exp(s))
    }

    /// `other / self`, assuming divisibility.
    #[inline]
    pub fn div_into(self, other: Monomial) -> Monomial {
        Monomial(other.0 - self.0)
    }

    pub fn without_slot(self, slot: usize) -> Monomial {
        let e = self.exp(slot) as u64;
        Monomial(self.0 - (e << (8 * slot)) - (e << DEG_SHIFT))
    }

    pub fn is_one(self) -> bool {
        self.0 == 0
    }
}

/// Polynomial over the integers, terms sorted by decreasing monomial.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: Vec<(Monomial, BigInt)>,
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(other.terms.iter()) {
            match a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Poly {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(Monomial::ONE, c)] }
        }
    }

    pub fn var(slot: usize) -> Poly {
        Poly { terms: vec![(Monomial::var(slot), BigInt::one())] }
    }

    pub fn term(m: Monomial, c: BigInt) -> Poly {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(m, c)] }
        }
    }

    /// Builds a polynomial from arbitrary (possibly repeated) terms.
    pub fn from_terms(mut terms: Vec<(Monomial, BigInt)>) -> Poly {
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        let mut out: Vec<(Monomial, BigInt)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some(last) if last.0 == m => last.1 += c,
                _ => {
                    if let Some(last) = out.last() {
                        if last.1.is_zero() {
                            out.pop();
                        }
                    }
                    out.push((m, c));
                }
            }
        }
        if let Some(last) = out.last() {
            if last.1.is_zero() {
                out.pop();
            }
        }
        Poly { terms: out }
    }

    fn from_sorted(terms: Vec<(Monomial, BigInt)>) -> Poly {
        debug_assert!(terms.windows(2).all(|w| w[0].0 > w[1].0));
        debug_assert!(terms.iter().all(|t| !t.1.is_zero()));
        Poly { terms }
    }

    pub fn terms(&self) -> &[(Monomial, BigInt)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    /// The constant value, if the polynomial is constant.
    pub fn as_constant(&self) -> Option<BigInt> {
        match self.terms.as_slice() {
            [] => Some(BigInt::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn leading(&self) -> Option<&(Monomial, BigInt)> {
        self.terms.first()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|t| t.0.degree()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, slot: usize) -> u32 {
        self.terms.iter().map(|t| t.0.exp(slot)).max().unwrap_or(0)
    }

    pub fn uses_slot(&self, slot: usize) -> bool {
        self.terms.iter().any(|t| t.0.exp(slot) > 0)
    }

    /// Highest slot index appearing in the polynomial.
    pub fn max_slot(&self) -> Option<usize> {
        (0..NUM_SLOTS).rev().find(|&s| self.uses_slot(s))
    }

    pub fn neg(&self) -> Poly {
        Poly::from_sorted(self.terms.iter().map(|(m, c)| (*m, -c)).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.merge(other, false)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.merge(other, true)
    }

    fn merge(&self, other: &Poly, negate: bool) -> Poly {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if negate { other.neg() } else { other.clone() };
        }
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let c = if negate { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0, c));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        for t in &b[j..] {
            let c = if negate { -&t.1 } else { t.1.clone() };
            out.push((t.0, c));
        }
        Poly::from_sorted(out)
    }

    pub fn scale(&self, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        if c.is_one() {
            return self.clone();
        }
        Poly::from_sorted(self.terms.iter().map(|(m, a)| (*m, a * c)).collect())
    }

    pub fn mul_term(&self, m: Monomial, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly::from_sorted(self.terms.iter().map(|(a, b)| (a.mul(m), b * c)).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let (small, big) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        if small.len() == 1 {
            let (m, c) = &small.terms[0];
            return big.mul_term(*m, c);
        }
        let mut prods = Vec::with_capacity(small.len() * big.len());
        for (ma, ca) in &small.terms {
            for (mb, cb) in &big.terms {
                prods.push((ma.mul(*mb), ca * cb));
            }
        }
        Poly::from_terms(prods)
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Exact division; `None` when `d` does not divide `self` in `Z[x]`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        assert!(!d.is_zero(), "division by the zero polynomial");
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if d.len() == 1 {
            let (md, cd) = &d.terms[0];
            let mut out = Vec::with_capacity(self.len());
            for (m, c) in &self.terms {
                if !md.divides(*m) {
                    return None;
                }
                let (q, r) = c.div_rem(cd);
                if !r.is_zero() {
                    return None;
                }
                out.push((md.div_into(*m), q));
            }
            return Some(Poly::from_sorted(out));
        }
        let (lm, lc) = d.terms[0].clone();
        if self.total_degree() < d.total_degree() {
            return None;
        }
        let mut rem: BTreeMap<Monomial, BigInt> = self.terms.iter().cloned().collect();
        let mut quot = Vec::new();
        while let Some((&m, c)) = rem.iter().next_back() {
            if !lm.divides(m) {
                return None;
            }
            let (qc, r) = c.div_rem(&lc);
            if !r.is_zero() {
                return None;
            }
            let qm = lm.div_into(m);
            for (dm, dc) in &d.terms {
                let key = dm.mul(qm);
                let delta = dc * &qc;
                let remove = match rem.get_mut(&key) {
                    Some(v) => {
                        *v -= &delta;
                        v.is_zero()
                    }
                    None => {
                        rem.insert(key, -delta);
                        false
                    }
                };
                if remove {
                    rem.remove(&key);
                }
            }
            quot.push((qm, qc));
        }
        Some(Poly::from_sorted(quot))
    }

    /// Positive gcd of the coefficients (zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divides every coefficient by the integer `c`, which must divide them all.
    pub fn div_scalar(&self, c: &BigInt) -> Poly {
        if c.is_one() {
            return self.clone();
        }
        Poly::from_sorted(self.terms.iter().map(|(m, a)| (*m, a / c)).collect())
    }

    /// Sign of the leading coefficient (+1 for the zero polynomial).
    pub fn leading_sign(&self) -> i32 {
        match self.terms.first() {
            Some((_, c)) if c.is_negative() => -1,
            _ => 1,
        }
    }

    /// Primitive part with positive leading coefficient.
    pub fn normalized(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = self.content();
        if self.leading_sign() < 0 {
            c = -c;
        }
        self.div_scalar(&c)
    }

    pub fn derivative(&self, slot: usize) -> Poly {
        let step = Monomial::var(slot);
        let out = self
            .terms
            .iter()
            .filter(|(m, _)| m.exp(slot) > 0)
            .map(|(m, c)| (step.div_into(*m), c * BigInt::from(m.exp(slot))))
            .collect::<Vec<_>>();
        // Removing a fixed factor preserves the relative order of the terms that survive.
        Poly::from_sorted(out)
    }

    /// Coefficients with respect to `slot`: `self = sum_k out[k] * v^k`.
    pub fn coeffs_in(&self, slot: usize) -> Vec<Poly> {
        let deg = self.degree_in(slot) as usize;
        let mut buckets: Vec<Vec<(Monomial, BigInt)>> = vec![Vec::new(); deg + 1];
        for (m, c) in &self.terms {
            buckets[m.exp(slot) as usize].push((m.without_slot(slot), c.clone()));
        }
        buckets.into_iter().map(Poly::from_terms).collect()
    }

    pub fn from_coeffs_in(slot: usize, coeffs: &[Poly]) -> Poly {
        let mut terms = Vec::new();
        for (k, p) in coeffs.iter().enumerate() {
            let vk = Monomial::var_pow(slot, k as u32);
            for (m, c) in &p.terms {
                terms.push((m.mul(vk), c.clone()));
            }
        }
        Poly::from_terms(terms)
    }

    /// Renames variable slots according to `map[old_slot] = new_slot`.
    pub fn rename_slots(&self, map: &[usize; NUM_SLOTS]) -> Poly {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut exps = [0u32; NUM_SLOTS];
                for s in 0..NUM_SLOTS {
                    exps[map[s]] += m.exp(s);
                }
                (Monomial::from_exponents(&exps), c.clone())
            })
            .collect();
        Poly::from_terms(terms)
    }
}

impl fmt::Display for Poly {
    /// Fully parenthesised text: `(c1*x1^2*lambda) + (c2)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "(0)");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c}")?;
            for s in 0..NUM_SLOTS {
                match m.exp(s) {
                    0 => {}
                    1 => write!(f, "*{}", Var::from_slot(s).name())?,
                    e => write!(f, "*{}^{}", Var::from_slot(s).name(), e)?,
                }
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Poly {
        Poly::var(i)
    }

    #[test]
    fn monomial_order_is_graded_lex_with_lambda_largest() {
        let x1 = Monomial::var(0);
        let x2 = Monomial::var(1);
        let lam = Monomial::var(LAMBDA_SLOT);
        assert!(x1 < x2 && x2 < lam);
        assert!(lam < x1.mul(x1));
        assert!(x1.mul(x2) < lam.mul(x1));
    }

    #[test]
    fn exact_division_and_failure() {
        let p = x(0).mul(&x(0)).sub(&Poly::one());
        let q = x(0).sub(&Poly::one());
        let e = p.div_exact(&q).unwrap();
        assert_eq!(e, x(0).add(&Poly::one()));
        assert!(q.div_exact(&p).is_none());
        assert!(p.div_exact(&x(1)).is_none());
    }

    #[test]
    fn derivative_and_coefficients() {
        let p = x(0).mul(&x(0)).mul(&x(1));
        assert_eq!(p.derivative(0), x(0).mul(&x(1)).scale(&BigInt::from(2)));
        let cs = p.coeffs_in(0);
        assert_eq!(cs.len(), 3);
        assert_eq!(Poly::from_coeffs_in(0, &cs), p);
    }
}
