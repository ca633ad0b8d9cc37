//! Rational functions in `x1..x6, lambda` over the rationals.
//!
//! A value is stored as `coeff * core * prod(base_i ^ e_i)` with a rational
//! `coeff`, an integer polynomial `core` and signed exponents on shared
//! primitive bases. Products and quotients of factored values cancel by
//! exponent arithmetic; sums factor out the common powers. Cancellation of a
//! base against the core is deferred to [`RatFn::reduce`], and a fully reduced
//! numerator/denominator pair is produced by [`RatFn::canonical`].

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::AlgebraError;
use crate::gcd::gcd;
use crate::poly::{Monomial, Poly, Var, LAMBDA_SLOT, MAX_X, NUM_SLOTS};
use crate::Rat;

type Base = Arc<Poly>;

#[derive(Clone, Debug)]
pub struct RatFn {
    coeff: Rat,
    core: Poly,
    factors: Vec<(Base, i32)>,
}

fn base_cmp(a: &Base, b: &Base) -> Ordering {
    if Arc::ptr_eq(a, b) {
        Ordering::Equal
    } else {
        a.as_ref().cmp(b.as_ref())
    }
}

/// Merges two factor lists, combining exponents with `op`.
fn merge_factors(
    a: &[(Base, i32)],
    b: &[(Base, i32)],
    op: impl Fn(i32, i32) -> i32,
) -> Vec<(Base, i32)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ord = match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) => base_cmp(&x.0, &y.0),
            (Some(_), None) => Ordering::Less,
            _ => Ordering::Greater,
        };
        let (base, e) = match ord {
            Ordering::Less => {
                i += 1;
                (a[i - 1].0.clone(), op(a[i - 1].1, 0))
            }
            Ordering::Greater => {
                j += 1;
                (b[j - 1].0.clone(), op(0, b[j - 1].1))
            }
            Ordering::Equal => {
                i += 1;
                j += 1;
                (a[i - 1].0.clone(), op(a[i - 1].1, b[j - 1].1))
            }
        };
        if e != 0 {
            out.push((base, e));
        }
    }
    out
}

fn exponent_of(f: &[(Base, i32)], base: &Base) -> i32 {
    f.iter().find(|(b, _)| base_cmp(b, base) == Ordering::Equal).map_or(0, |x| x.1)
}

fn rat_from(c: BigInt) -> Rat {
    Rat::from_integer(c)
}

impl RatFn {
    pub fn zero() -> RatFn {
        RatFn { coeff: Rat::zero(), core: Poly::zero(), factors: Vec::new() }
    }

    pub fn one() -> RatFn {
        RatFn::from_rat(Rat::one())
    }

    pub fn from_int(n: i64) -> RatFn {
        RatFn::from_rat(rat_from(n.into()))
    }

    pub fn from_rat(c: Rat) -> RatFn {
        if c.is_zero() {
            return RatFn::zero();
        }
        RatFn { coeff: c, core: Poly::one(), factors: Vec::new() }
    }

    pub fn from_poly(p: Poly) -> RatFn {
        if p.is_zero() {
            return RatFn::zero();
        }
        RatFn { coeff: Rat::one(), core: p, factors: Vec::new() }
    }

    pub fn var(v: Var) -> Result<RatFn, AlgebraError> {
        Ok(RatFn::from_poly(Poly::var(v.slot()?)))
    }

    pub fn x(i: usize) -> RatFn {
        assert!((1..=MAX_X).contains(&i), "coordinate index out of range");
        RatFn::from_poly(Poly::var(i - 1))
    }

    pub fn lambda() -> RatFn {
        RatFn::from_poly(Poly::var(LAMBDA_SLOT))
    }

    /// `coeff * core * base^exp` where `base` is used as a shared factor.
    pub fn with_base_power(coeff: Rat, core: Poly, base: &Poly, exp: i32) -> RatFn {
        let mut out = RatFn { coeff, core, factors: Vec::new() };
        if out.core.is_zero() || out.coeff.is_zero() {
            return RatFn::zero();
        }
        if exp != 0 && !base.is_constant() {
            let (c, b) = split_base(base);
            out.coeff *= pow_rat(&rat_from(c), exp);
            out.factors.push((Arc::new(b), exp));
        } else if exp != 0 {
            let c = base.as_constant().expect("constant base");
            out.coeff *= pow_rat(&rat_from(c), exp);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.core.is_zero() || self.coeff.is_zero()
    }

    /// The rational value, if this is a constant.
    pub fn as_rat(&self) -> Option<Rat> {
        if self.is_zero() {
            return Some(Rat::zero());
        }
        let r = self.reduce();
        if r.factors.is_empty() {
            r.core.as_constant().map(|c| r.coeff * rat_from(c))
        } else {
            None
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_rat().is_some()
    }

    pub fn neg(&self) -> RatFn {
        RatFn { coeff: -&self.coeff, core: self.core.clone(), factors: self.factors.clone() }
    }

    pub fn scale(&self, c: &Rat) -> RatFn {
        if c.is_zero() || self.is_zero() {
            return RatFn::zero();
        }
        RatFn { coeff: &self.coeff * c, core: self.core.clone(), factors: self.factors.clone() }
    }

    pub fn scale_int(&self, c: i64) -> RatFn {
        self.scale(&rat_from(c.into()))
    }

    pub fn mul(&self, other: &RatFn) -> RatFn {
        if self.is_zero() || other.is_zero() {
            return RatFn::zero();
        }
        RatFn {
            coeff: &self.coeff * &other.coeff,
            core: self.core.mul(&other.core),
            factors: merge_factors(&self.factors, &other.factors, |a, b| a + b),
        }
    }

    pub fn add(&self, other: &RatFn) -> RatFn {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &RatFn) -> RatFn {
        self.combine(other, true)
    }

    fn combine(&self, other: &RatFn, negate: bool) -> RatFn {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if negate { other.neg() } else { other.clone() };
        }
        let common = merge_factors(&self.factors, &other.factors, |a, b| a.min(b));
        // Each side keeps its own exponent above the common minimum (always >= 0,
        // and also covers bases absent from `common` whose minimum is 0).
        let lift = |x: &RatFn| -> Poly {
            let mut p = x.core.clone();
            for (b, e) in &x.factors {
                let extra = e - exponent_of(&common, b);
                if extra > 0 {
                    p = p.mul(&b.pow(extra as u32));
                }
            }
            p
        };
        let lift_missing = |x: &RatFn, y: &RatFn, p: Poly| -> Poly {
            // Bases that only occur in `y` with negative exponent raise `x`.
            let mut p = p;
            for (b, e) in &y.factors {
                if exponent_of(&x.factors, b) == 0 && *e < 0 {
                    p = p.mul(&b.pow((-e) as u32));
                }
            }
            p
        };
        let pa = lift_missing(self, other, lift(self));
        let pb = lift_missing(other, self, lift(other));
        // Rational coefficients: bring both over a common denominator.
        let da = self.coeff.denom();
        let db = other.coeff.denom();
        let l = da.lcm(db);
        let ca = self.coeff.numer() * (&l / da);
        let cb = other.coeff.numer() * (&l / db);
        let pb = pb.scale(&cb);
        let core = if negate { pa.scale(&ca).sub(&pb) } else { pa.scale(&ca).add(&pb) };
        if core.is_zero() {
            return RatFn::zero();
        }
        let c = core.content();
        let core = core.div_scalar(&c);
        RatFn { coeff: Rat::new(c, l), core, factors: common }
    }

    pub fn inv(&self) -> Result<RatFn, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        let mut factors: Vec<(Base, i32)> = self.factors.iter().map(|(b, e)| (b.clone(), -e)).collect();
        let mut coeff = self.coeff.recip();
        if let Some(c) = self.core.as_constant() {
            coeff /= rat_from(c);
        } else {
            let (c, mut p) = split_base(&self.core);
            coeff /= rat_from(c);
            // Absorb existing bases that divide the new one.
            let mut absorbed: Vec<(Base, i32)> = Vec::new();
            for (b, _) in &self.factors {
                while let Some(q) = p.div_exact(b) {
                    p = q;
                    absorbed.push((b.clone(), -1));
                }
            }
            absorbed.sort_by(|x, y| base_cmp(&x.0, &y.0));
            for a in absorbed {
                factors = merge_factors(&factors, &[a], |x, y| x + y);
            }
            if !p.is_constant() {
                factors = merge_factors(&factors, &[(Arc::new(p), -1)], |x, y| x + y);
            } else {
                coeff /= rat_from(p.as_constant().expect("constant"));
            }
        }
        Ok(RatFn { coeff, core: Poly::one(), factors })
    }

    pub fn div(&self, other: &RatFn) -> Result<RatFn, AlgebraError> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: i32) -> Result<RatFn, AlgebraError> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let mut acc = RatFn::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        Ok(acc)
    }

    pub fn derivative(&self, slot: usize) -> RatFn {
        if self.is_zero() {
            return RatFn::zero();
        }
        let live: Vec<&(Base, i32)> = self.factors.iter().filter(|(b, _)| b.uses_slot(slot)).collect();
        if live.is_empty() {
            return RatFn {
                coeff: self.coeff.clone(),
                core: self.core.derivative(slot),
                factors: self.factors.clone(),
            }
            .normalize_zero();
        }
        // d(P prod B^e) = prod B^(e-1) * (P' prod B + P sum e_i B_i' prod_{j != i} B_j)
        let prod_all = live.iter().fold(Poly::one(), |acc, (b, _)| acc.mul(b));
        let mut core = self.core.derivative(slot).mul(&prod_all);
        for (i, (b, e)) in live.iter().enumerate() {
            let mut term = self.core.mul(&b.derivative(slot)).scale(&BigInt::from(*e));
            for (j, (bj, _)) in live.iter().enumerate() {
                if j != i {
                    term = term.mul(bj);
                }
            }
            core = core.add(&term);
        }
        let lowered: Vec<(Base, i32)> = live.iter().map(|(b, _)| (b.clone(), -1)).collect();
        RatFn {
            coeff: self.coeff.clone(),
            core,
            factors: merge_factors(&self.factors, &lowered, |a, b| a + b),
        }
        .normalize_zero()
    }

    fn normalize_zero(self) -> RatFn {
        if self.is_zero() {
            RatFn::zero()
        } else {
            self
        }
    }

    /// Cancels bases that divide the core and moves integer content into the
    /// coefficient.
    pub fn reduce(&self) -> RatFn {
        if self.is_zero() {
            return RatFn::zero();
        }
        let mut core = self.core.clone();
        let mut factors = Vec::with_capacity(self.factors.len());
        for (b, e) in &self.factors {
            let mut e = *e;
            if e < 0 {
                while e < 0 && core.total_degree() >= b.total_degree() {
                    match core.div_exact(b) {
                        Some(q) => {
                            core = q;
                            e += 1;
                        }
                        None => break,
                    }
                }
            }
            if e != 0 {
                factors.push((b.clone(), e));
            }
        }
        let mut c = core.content();
        if core.leading_sign() < 0 {
            c = -c;
        }
        let core = core.div_scalar(&c);
        RatFn { coeff: &self.coeff * rat_from(c), core, factors }
    }

    /// Fully reduced `(numerator, denominator)` over the integers, with the
    /// denominator having positive leading coefficient.
    pub fn canonical(&self) -> (Poly, Poly) {
        if self.is_zero() {
            return (Poly::zero(), Poly::one());
        }
        let r = self.reduce();
        let mut num = r.core.scale(r.coeff.numer());
        let mut den = Poly::constant(r.coeff.denom().clone());
        for (b, e) in &r.factors {
            if *e > 0 {
                num = num.mul(&b.pow(*e as u32));
            } else {
                den = den.mul(&b.pow((-e) as u32));
            }
        }
        let g = gcd(&num, &den);
        if !g.is_one() {
            num = num.div_exact(&g).expect("gcd divides numerator");
            den = den.div_exact(&g).expect("gcd divides denominator");
        }
        if den.leading_sign() < 0 {
            num = num.neg();
            den = den.neg();
        }
        (num, den)
    }

    /// Numerator and denominator as stored, without gcd reduction.
    pub fn expanded(&self) -> (Poly, Poly) {
        if self.is_zero() {
            return (Poly::zero(), Poly::one());
        }
        let mut num = self.core.scale(self.coeff.numer());
        let mut den = Poly::constant(self.coeff.denom().clone());
        for (b, e) in &self.factors {
            if *e > 0 {
                num = num.mul(&b.pow(*e as u32));
            } else {
                den = den.mul(&b.pow((-e) as u32));
            }
        }
        (num, den)
    }

    /// Whether the value is a polynomial (possibly with rational coefficients).
    pub fn is_polynomial(&self) -> bool {
        let r = self.reduce();
        r.factors.iter().all(|(_, e)| *e > 0)
    }

    pub fn uses_slot(&self, slot: usize) -> bool {
        let (n, d) = self.canonical();
        n.uses_slot(slot) || d.uses_slot(slot)
    }

    /// Substitutes the rational `value` for the variable in `slot`.
    pub fn subst(&self, slot: usize, value: &Rat) -> Result<RatFn, AlgebraError> {
        if self.is_zero() {
            return Ok(RatFn::zero());
        }
        let mut out = RatFn::from_rat(self.coeff.clone()).mul(&subst_poly(&self.core, slot, value));
        for (b, e) in &self.factors {
            let sb = subst_poly(b, slot, value);
            if *e < 0 && sb.is_zero() {
                return Err(AlgebraError::DivisionByZero);
            }
            out = out.mul(&sb.pow(*e)?);
        }
        Ok(out)
    }

    /// Evaluates at a full assignment of all slots.
    pub fn eval(&self, values: &[Rat; NUM_SLOTS]) -> Result<Rat, AlgebraError> {
        let mut acc = self.coeff.clone() * eval_poly(&self.core, values);
        for (b, e) in &self.factors {
            let v = eval_poly(b, values);
            if v.is_zero() {
                if *e < 0 {
                    return Err(AlgebraError::DivisionByZero);
                }
                return Ok(Rat::zero());
            }
            acc *= pow_rat(&v, *e);
        }
        Ok(acc)
    }

    /// Taylor polynomial in the `x` variables about `point` (one rational per
    /// coordinate slot, `x1` first), through total degree `degree`. The result
    /// is written in the shifted variables, so the point becomes the origin.
    /// `lambda` stays symbolic and is not counted in the degree.
    pub fn taylor(&self, point: &[Rat], degree: u32) -> Result<RatFn, AlgebraError> {
        if self.is_zero() {
            return Ok(RatFn::zero());
        }
        let shift = |p: &Poly| -> (Poly, BigInt) {
            let mut p = p.clone();
            let mut den = BigInt::one();
            for (s, v) in point.iter().enumerate() {
                if !v.is_zero() && p.uses_slot(s) {
                    let (q, d) = shift_slot(&p, s, v);
                    p = q;
                    den *= d;
                }
            }
            (p, den)
        };
        let (core, cden) = shift(&self.core);
        let mut acc = truncate_x(&core, degree);
        let mut coeff = &self.coeff / rat_from(cden);
        for (b, e) in &self.factors {
            let (sb, bden) = shift(b);
            coeff *= pow_rat(&rat_from(bden), -e);
            let series = if *e > 0 {
                truncated_pow(&sb, *e as u32, degree)
            } else {
                let (inv, inv_den) = inverse_series(&sb, degree)?;
                coeff /= pow_rat(&rat_from(inv_den), -e);
                truncated_pow(&inv, (-e) as u32, degree)
            };
            acc = truncate_x(&acc.mul(&series), degree);
        }
        Ok(RatFn::from_rat(coeff).mul(&RatFn::from_poly(acc)).reduce())
    }

    /// Structural equality test (exact, independent of representation).
    pub fn equals(&self, other: &RatFn) -> bool {
        self.sub(other).is_zero()
    }

    /// Renames variable slots (`map[old] = new`).
    pub fn rename_slots(&self, map: &[usize; NUM_SLOTS]) -> RatFn {
        let mut out = RatFn::from_rat(self.coeff.clone()).mul(&RatFn::from_poly(self.core.rename_slots(map)));
        for (b, e) in &self.factors {
            out = out.mul(&RatFn::with_base_power(Rat::one(), Poly::one(), &b.rename_slots(map), *e));
        }
        out
    }

    pub fn parse(s: &str) -> Result<RatFn, AlgebraError> {
        Parser { src: s.as_bytes(), pos: 0 }.parse_all()
    }
}

impl PartialEq for RatFn {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other)
    }
}

impl Eq for RatFn {}

impl From<Rat> for RatFn {
    fn from(c: Rat) -> Self {
        RatFn::from_rat(c)
    }
}

impl From<Poly> for RatFn {
    fn from(p: Poly) -> Self {
        RatFn::from_poly(p)
    }
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(c) = self.as_rat() {
            return write!(f, "{c}");
        }
        let (n, d) = self.canonical();
        if d.is_one() {
            write!(f, "{n}")
        } else {
            write!(f, "({n})/({d})")
        }
    }
}

impl serde::Serialize for RatFn {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for RatFn {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        RatFn::parse(&s).map_err(serde::de::Error::custom)
    }
}

fn pow_rat(r: &Rat, e: i32) -> Rat {
    if e >= 0 {
        num_traits::pow(r.clone(), e as usize)
    } else {
        num_traits::pow(r.recip(), (-e) as usize)
    }
}

/// Splits a polynomial into integer content (carrying the sign) and a
/// primitive part with positive leading coefficient.
fn split_base(p: &Poly) -> (BigInt, Poly) {
    let mut c = p.content();
    if p.leading_sign() < 0 {
        c = -c;
    }
    (c.clone(), p.div_scalar(&c))
}

fn subst_poly(p: &Poly, slot: usize, value: &Rat) -> RatFn {
    let coeffs = p.coeffs_in(slot);
    let v = RatFn::from_rat(value.clone());
    let mut acc = RatFn::zero();
    for c in coeffs.iter().rev() {
        acc = acc.mul(&v).add(&RatFn::from_poly(c.clone()));
    }
    acc
}

fn eval_poly(p: &Poly, values: &[Rat; NUM_SLOTS]) -> Rat {
    let mut acc = Rat::zero();
    for (m, c) in p.terms() {
        let mut t = rat_from(c.clone());
        for (s, v) in values.iter().enumerate() {
            let e = m.exp(s);
            if e > 0 {
                t *= num_traits::pow(v.clone(), e as usize);
            }
        }
        acc += t;
    }
    acc
}

/// `b^d * p(x_s -> x_s + a/b)` returned with the factor `b^d`.
fn shift_slot(p: &Poly, slot: usize, v: &Rat) -> (Poly, BigInt) {
    let a = v.numer();
    let b = v.denom();
    let coeffs = p.coeffs_in(slot);
    let d = coeffs.len() - 1;
    let lin = Poly::from_terms(vec![(Monomial::var(slot), b.clone()), (Monomial::ONE, a.clone())]);
    let mut acc = coeffs[d].clone();
    let mut bpow = BigInt::one();
    for c in coeffs[..d].iter().rev() {
        bpow *= b;
        acc = acc.mul(&lin).add(&c.scale(&bpow));
    }
    (acc, num_traits::pow(b.clone(), d))
}

fn x_degree(m: Monomial) -> u32 {
    m.degree() - m.exp(LAMBDA_SLOT)
}

fn truncate_x(p: &Poly, degree: u32) -> Poly {
    Poly::from_terms(p.terms().iter().filter(|(m, _)| x_degree(*m) <= degree).cloned().collect())
}

fn truncated_pow(p: &Poly, e: u32, degree: u32) -> Poly {
    let mut acc = Poly::one();
    for _ in 0..e {
        acc = truncate_x(&acc.mul(p), degree);
    }
    acc
}

/// Series inverse of `p` through `degree`, as `(q, den)` with `1/p = q/den + O(x^{degree+1})`.
fn inverse_series(p: &Poly, degree: u32) -> Result<(Poly, BigInt), AlgebraError> {
    let lowest = truncate_x(p, 0);
    let d0 = match lowest.as_constant() {
        Some(c) if !c.is_zero() => c,
        Some(_) => return Err(AlgebraError::DivisionByZero),
        None => return Err(AlgebraError::SingularExpansion("lambda".into())),
    };
    let rest = p.sub(&Poly::constant(d0.clone()));
    // 1/(d0 + r) = sum_k (-r)^k d0^{degree-k} / d0^{degree+1}
    let mut acc = Poly::zero();
    let mut rk = Poly::one();
    let neg_rest = rest.neg();
    for k in 0..=degree {
        let scale = num_traits::pow(d0.clone(), (degree - k) as usize);
        acc = acc.add(&rk.scale(&scale));
        rk = truncate_x(&rk.mul(&neg_rest), degree);
        if rk.is_zero() {
            break;
        }
    }
    Ok((acc, num_traits::pow(d0, degree as usize + 1)))
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, message: impl Into<String>) -> AlgebraError {
        AlgebraError::Parse { offset: self.pos, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn parse_all(&mut self) -> Result<RatFn, AlgebraError> {
        let v = self.expr()?;
        if self.peek().is_some() {
            return Err(self.err("unexpected trailing input"));
        }
        Ok(v.reduce())
    }

    fn expr(&mut self) -> Result<RatFn, AlgebraError> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let t = self.term()?;
            acc = if c == b'+' { acc.add(&t) } else { acc.sub(&t) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RatFn, AlgebraError> {
        let mut acc = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let t = self.unary()?;
            acc = if c == b'*' { acc.mul(&t) } else { acc.div(&t).map_err(|_| self.err("division by zero"))? };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RatFn, AlgebraError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RatFn, AlgebraError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let neg = if self.peek() == Some(b'-') {
                self.pos += 1;
                true
            } else {
                false
            };
            let paren = self.peek() == Some(b'(');
            if paren {
                self.pos += 1;
                let e = self.integer()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                let e = if neg { -e } else { e };
                return base.pow(e).map_err(|_| self.err("division by zero"));
            }
            let e = self.integer()?;
            let e = if neg { -e } else { e };
            return base.pow(e).map_err(|_| self.err("division by zero"));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<i32, AlgebraError> {
        let start_neg = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer exponent"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        let v: i32 = s.parse().map_err(|_| self.err("exponent too large"))?;
        Ok(if start_neg { -v } else { v })
    }

    fn atom(&mut self) -> Result<RatFn, AlgebraError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                let n: BigInt = s.parse().map_err(|_| self.err("bad integer"))?;
                Ok(RatFn::from_rat(rat_from(n)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                let var = match name {
                    "lambda" => Var::Lambda,
                    _ => match name.strip_prefix('x').and_then(|d| d.parse::<u8>().ok()) {
                        Some(i) if (1..=MAX_X as u8).contains(&i) => Var::X(i),
                        _ => {
                            self.pos = start;
                            return Err(self.err(format!("unknown variable `{name}`")));
                        }
                    },
                };
                RatFn::var(var)
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}
