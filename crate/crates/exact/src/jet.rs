//! Truncated power series in the ambient variable `rho`.
//!
//! A jet carries the coefficients it knows and an order `N` meaning the value
//! is only determined modulo `rho^N`. Exact (polynomial) jets use
//! [`RhoJet::EXACT`]. Operations track the order precisely and fail loudly
//! instead of truncating when an operation would need unknown coefficients.

use crate::error::AlgebraError;
use crate::ratfn::RatFn;
use crate::Rat;

#[derive(Clone, Debug)]
pub struct RhoJet {
    coeffs: Vec<RatFn>,
    order: usize,
}

impl RhoJet {
    pub const EXACT: usize = usize::MAX;

    pub fn new(coeffs: Vec<RatFn>, order: usize) -> RhoJet {
        let mut j = RhoJet { coeffs, order };
        j.normalize();
        j
    }

    pub fn exact(coeffs: Vec<RatFn>) -> RhoJet {
        RhoJet::new(coeffs, RhoJet::EXACT)
    }

    pub fn zero(order: usize) -> RhoJet {
        RhoJet { coeffs: Vec::new(), order }
    }

    pub fn constant(c: RatFn) -> RhoJet {
        RhoJet::exact(vec![c])
    }

    pub fn one() -> RhoJet {
        RhoJet::constant(RatFn::one())
    }

    /// `c * rho^m`, exact.
    pub fn monomial(c: RatFn, m: usize) -> RhoJet {
        let mut coeffs = vec![RatFn::zero(); m];
        coeffs.push(c);
        RhoJet::exact(coeffs)
    }

    pub fn rho() -> RhoJet {
        RhoJet::monomial(RatFn::one(), 1)
    }

    fn normalize(&mut self) {
        if self.coeffs.len() > self.order {
            self.coeffs.truncate(self.order);
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Highest `rho` power whose coefficient is known (`order - 1`), or
    /// `None` when nothing is known. Exact jets report [`RhoJet::EXACT`].
    pub fn guaranteed_order(&self) -> Option<usize> {
        match self.order {
            0 => None,
            RhoJet::EXACT => Some(RhoJet::EXACT),
            o => Some(o - 1),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.order == RhoJet::EXACT
    }

    /// Stored coefficients; entries past the end are zero (up to the order).
    pub fn coeffs(&self) -> &[RatFn] {
        &self.coeffs
    }

    /// Coefficient of `rho^j`; errors when `j` is beyond the known order.
    pub fn coeff(&self, j: usize) -> Result<RatFn, AlgebraError> {
        if j >= self.order {
            return Err(AlgebraError::TruncationShortfall { needed: j + 1, available: self.order });
        }
        Ok(self.coeffs.get(j).cloned().unwrap_or_else(RatFn::zero))
    }

    /// Lower bound for the `rho`-adic valuation: the first non-zero known
    /// coefficient, or the order when all known coefficients vanish.
    pub fn valuation_bound(&self) -> usize {
        self.coeffs.iter().position(|c| !c.is_zero()).unwrap_or(self.order)
    }

    /// Whether every coefficient is known to vanish (including beyond storage).
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// `true` if the jet is `O(rho^m)`; errors if that is not decidable.
    pub fn vanishes_to(&self, m: usize) -> Result<bool, AlgebraError> {
        if m > self.order {
            return Err(AlgebraError::TruncationShortfall { needed: m, available: self.order });
        }
        Ok(self.coeffs.iter().take(m).all(|c| c.is_zero()))
    }

    pub fn truncate(&self, order: usize) -> RhoJet {
        RhoJet::new(self.coeffs.clone(), self.order.min(order))
    }

    pub fn map(&self, f: impl Fn(&RatFn) -> RatFn) -> RhoJet {
        RhoJet::new(self.coeffs.iter().map(f).collect(), self.order)
    }

    pub fn try_map(&self, f: impl Fn(&RatFn) -> Result<RatFn, AlgebraError>) -> Result<RhoJet, AlgebraError> {
        Ok(RhoJet::new(self.coeffs.iter().map(f).collect::<Result<_, _>>()?, self.order))
    }

    pub fn reduce(&self) -> RhoJet {
        self.map(RatFn::reduce)
    }

    pub fn neg(&self) -> RhoJet {
        self.map(RatFn::neg)
    }

    pub fn scale(&self, c: &RatFn) -> RhoJet {
        if c.is_zero() {
            return RhoJet::zero(RhoJet::EXACT);
        }
        self.map(|x| x.mul(c))
    }

    pub fn scale_rat(&self, c: &Rat) -> RhoJet {
        if num_traits::Zero::is_zero(c) {
            return RhoJet::zero(RhoJet::EXACT);
        }
        self.map(|x| x.scale(c))
    }

    pub fn add(&self, other: &RhoJet) -> RhoJet {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &RhoJet) -> RhoJet {
        self.combine(other, true)
    }

    fn combine(&self, other: &RhoJet, negate: bool) -> RhoJet {
        let order = self.order.min(other.order);
        let len = self.coeffs.len().max(other.coeffs.len()).min(order);
        let zero = RatFn::zero();
        let coeffs = (0..len)
            .map(|j| {
                let a = self.coeffs.get(j).unwrap_or(&zero);
                let b = other.coeffs.get(j).unwrap_or(&zero);
                if negate {
                    a.sub(b)
                } else {
                    a.add(b)
                }
            })
            .collect();
        RhoJet::new(coeffs, order)
    }

    pub fn mul(&self, other: &RhoJet) -> RhoJet {
        let va = self.valuation_bound();
        let vb = other.valuation_bound();
        let order = self.order.saturating_add(vb).min(other.order.saturating_add(va));
        let len = (self.coeffs.len() + other.coeffs.len()).saturating_sub(1).min(order);
        let mut coeffs = vec![RatFn::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                if !b.is_zero() {
                    coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
                }
            }
        }
        RhoJet::new(coeffs, order)
    }

    pub fn pow(&self, e: u32) -> RhoJet {
        (0..e).fold(RhoJet::one(), |acc, _| acc.mul(self))
    }

    /// Derivative in `rho`. The order drops by one.
    pub fn d_rho(&self) -> Result<RhoJet, AlgebraError> {
        if self.order == 0 {
            return Err(AlgebraError::TruncationShortfall { needed: 1, available: 0 });
        }
        let order = if self.is_exact() { RhoJet::EXACT } else { self.order - 1 };
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(j, c)| c.scale_int(j as i64)).collect();
        Ok(RhoJet::new(coeffs, order))
    }

    /// Multiplication by `rho^m`.
    pub fn mul_rho_pow(&self, m: usize) -> RhoJet {
        if self.is_zero() && self.is_exact() {
            return self.clone();
        }
        let mut coeffs = vec![RatFn::zero(); m];
        coeffs.extend(self.coeffs.iter().cloned());
        RhoJet::new(coeffs, self.order.saturating_add(m))
    }

    /// Division by `rho^m`; the jet must be known to vanish to order `m`.
    pub fn shift_down(&self, m: usize) -> Result<RhoJet, AlgebraError> {
        if m > self.order {
            return Err(AlgebraError::TruncationShortfall { needed: m, available: self.order });
        }
        let v = self.valuation_bound();
        if v < m {
            return Err(AlgebraError::NotDivisible { valuation: v, shift: m });
        }
        let order = if self.is_exact() { RhoJet::EXACT } else { self.order - m };
        Ok(RhoJet::new(self.coeffs.iter().skip(m).cloned().collect(), order))
    }

    /// Multiplicative inverse through `target` (required for exact jets).
    pub fn invert(&self, target: Option<usize>) -> Result<RhoJet, AlgebraError> {
        let order = match (self.is_exact(), target) {
            (_, Some(t)) => t.min(self.order),
            (false, None) => self.order,
            (true, None) => {
                if self.coeffs.len() <= 1 {
                    RhoJet::EXACT
                } else {
                    return Err(AlgebraError::Unsupported(
                        "inverse of a non-constant exact jet needs a target order".into(),
                    ));
                }
            }
        };
        let a0 = self.coeffs.first().cloned().unwrap_or_else(RatFn::zero);
        if a0.is_zero() {
            return Err(AlgebraError::NotInvertible);
        }
        let b0 = a0.inv()?.reduce();
        if order == RhoJet::EXACT {
            return Ok(RhoJet::constant(b0));
        }
        let mut b: Vec<RatFn> = Vec::with_capacity(order);
        b.push(b0.clone());
        for j in 1..order {
            let mut s = RatFn::zero();
            for i in 1..=j.min(self.coeffs.len().saturating_sub(1)) {
                s = s.add(&self.coeffs[i].mul(&b[j - i]));
            }
            b.push(s.mul(&b0).neg().reduce());
        }
        Ok(RhoJet::new(b, order))
    }

    /// `(1 + c rho)^w` through `order` (exact when `w` is a non-negative integer).
    pub fn binomial(c: &RatFn, w: &Rat, order: usize) -> RhoJet {
        if c.is_zero() {
            return RhoJet::one();
        }
        let nonneg_int = w.is_integer() && !num_traits::Signed::is_negative(w);
        let (len, out_order) = if nonneg_int {
            let e: usize = w.to_integer().try_into().expect("exponent fits in usize");
            (e + 1, RhoJet::EXACT)
        } else {
            (order, order)
        };
        let mut coeffs = Vec::with_capacity(len);
        let mut binom = Rat::from_integer(1.into());
        let mut cpow = RatFn::one();
        for j in 0..len {
            if j > 0 {
                let jj = Rat::from_integer((j as i64).into());
                binom = binom * (w - &jj + Rat::from_integer(1.into())) / jj;
                cpow = cpow.mul(c);
            }
            coeffs.push(cpow.scale(&binom));
        }
        RhoJet::new(coeffs, out_order)
    }

    /// Equality of all coefficients below the smaller of the two orders.
    pub fn equals_through(&self, other: &RhoJet) -> bool {
        let d = self.sub(other);
        d.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, rat_int};

    fn c(n: i64) -> RatFn {
        RatFn::from_int(n)
    }

    #[test]
    fn orders_follow_valuations() {
        let a = RhoJet::new(vec![c(0), c(1)], 3);
        let b = RhoJet::new(vec![c(2)], 2);
        let p = a.mul(&b);
        assert_eq!(p.order(), 3);
        assert_eq!(p.coeff(1).unwrap().as_rat(), Some(rat_int(2)));
        assert!(p.coeff(3).is_err());
    }

    #[test]
    fn shift_and_derivative_errors() {
        let a = RhoJet::new(vec![c(1), c(1)], 3);
        assert!(matches!(a.shift_down(1), Err(AlgebraError::NotDivisible { .. })));
        assert!(matches!(a.shift_down(4), Err(AlgebraError::TruncationShortfall { .. })));
        let z = RhoJet::zero(0);
        assert!(z.d_rho().is_err());
        assert_eq!(a.d_rho().unwrap().order(), 2);
    }

    #[test]
    fn binomial_series() {
        let half = rat(1, 2);
        let s = RhoJet::binomial(&c(1), &half, 4);
        let sq = s.mul(&s);
        let expected = RhoJet::exact(vec![c(1), c(1)]).truncate(4);
        assert!(sq.equals_through(&expected));
        let cube = RhoJet::binomial(&c(2), &rat_int(3), 2);
        assert!(cube.is_exact());
        assert_eq!(cube.coeff(3).unwrap().as_rat(), Some(rat_int(8)));
    }

    #[test]
    fn inverse_of_exact_requires_target() {
        let a = RhoJet::exact(vec![c(1), c(1)]);
        assert!(a.invert(None).is_err());
        let b = a.invert(Some(5)).unwrap();
        assert!(a.mul(&b).equals_through(&RhoJet::one().truncate(5)));
        assert!(RhoJet::rho().invert(Some(3)).is_err());
    }
}
