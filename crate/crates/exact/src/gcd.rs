//! Multivariate gcd over `Z[x1..x6, lambda]`.
//!
//! A modular coprimality test settles the common case quickly; otherwise a
//! recursive primitive pseudo-remainder sequence is run.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::poly::{Monomial, Poly, NUM_SLOTS};

/// Greatest common divisor, normalised to have a positive leading coefficient.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return sign_normalize(b);
    }
    if b.is_zero() {
        return sign_normalize(a);
    }
    if a.is_constant() || b.is_constant() {
        return Poly::constant(a.content().gcd(&b.content()));
    }
    if provably_coprime(a, b) {
        return Poly::constant(a.content().gcd(&b.content()));
    }
    if b.div_exact(a).is_some() {
        return sign_normalize(a);
    }
    if a.div_exact(b).is_some() {
        return sign_normalize(b);
    }
    let v = a.max_slot().max(b.max_slot()).expect("non-constant input");
    if !a.uses_slot(v) {
        return gcd(a, &content_in(b, v));
    }
    if !b.uses_slot(v) {
        return gcd(&content_in(a, v), b);
    }
    let ca = content_in(a, v);
    let cb = content_in(b, v);
    let c = gcd(&ca, &cb);
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    let (mut f, mut g) = if pa.degree_in(v) >= pb.degree_in(v) { (pa, pb) } else { (pb, pa) };
    loop {
        let r = pseudo_rem(&f, &g, v);
        if r.is_zero() {
            break;
        }
        if r.degree_in(v) == 0 {
            g = Poly::one();
            break;
        }
        let r = primitive_in(&r, v);
        if provably_coprime(&g, &r) {
            g = Poly::one();
            break;
        }
        f = g;
        g = r;
    }
    sign_normalize(&c.mul(&primitive_in(&g, v)))
}

const P: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn to_mod(c: &BigInt) -> u64 {
    let p = BigInt::from(P);
    let r = c.mod_floor(&p);
    r.to_u64_digits().1.first().copied().unwrap_or(0)
}

/// Image of `p` in `F_P[v]` after substituting `point` for the other slots.
fn univariate_image(p: &Poly, v: usize, point: &[u64; NUM_SLOTS]) -> Vec<u64> {
    let mut out = vec![0u64; p.degree_in(v) as usize + 1];
    for (m, c) in p.terms() {
        let mut t = to_mod(c);
        for (s, &x) in point.iter().enumerate() {
            if s != v && m.exp(s) > 0 {
                t = mulmod(t, powmod(x, m.exp(s) as u64));
            }
        }
        let k = m.exp(v) as usize;
        out[k] = (out[k] + t) % P;
    }
    out
}

fn trim(p: &mut Vec<u64>) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

/// Degree of the gcd of two univariate polynomials over `F_P`.
fn gcd_degree_mod(mut a: Vec<u64>, mut b: Vec<u64>) -> usize {
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        // a <- a mod b
        let inv = powmod(*b.last().expect("non-empty"), P - 2);
        while a.len() >= b.len() {
            let q = mulmod(*a.last().expect("non-empty"), inv);
            let shift = a.len() - b.len();
            for (i, &bi) in b.iter().enumerate() {
                a[shift + i] = (a[shift + i] + P - mulmod(q, bi)) % P;
            }
            trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// Cheap sufficient test for `gcd(a, b)` being an integer: for each shared
/// variable, an evaluation image whose leading coefficients survive bounds
/// the gcd degree in that variable from above.
fn provably_coprime(a: &Poly, b: &Poly) -> bool {
    let mut seed: u64 = 0x9e37_79b9_7f4a_7c15;
    for v in 0..NUM_SLOTS {
        if !(a.uses_slot(v) && b.uses_slot(v)) {
            continue;
        }
        let mut ok = false;
        for _ in 0..3 {
            let mut point = [0u64; NUM_SLOTS];
            for x in point.iter_mut() {
                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                *x = (seed >> 3) % P;
            }
            let ia = univariate_image(a, v, &point);
            let ib = univariate_image(b, v, &point);
            if ia.last() == Some(&0) || ib.last() == Some(&0) {
                continue;
            }
            if gcd_degree_mod(ia, ib) == 0 {
                ok = true;
                break;
            }
            // A positive image degree is either a genuine common factor or an
            // unlucky point; the exact algorithm decides.
            break;
        }
        if !ok {
            return false;
        }
    }
    true
}

/// gcd of the coefficients of `p` viewed as a polynomial in slot `v`.
pub fn content_in(p: &Poly, v: usize) -> Poly {
    let mut acc = Poly::zero();
    for c in p.coeffs_in(v).into_iter().filter(|c| !c.is_zero()) {
        acc = gcd(&acc, &c);
        if acc.is_one() {
            break;
        }
    }
    acc
}

fn primitive_in(p: &Poly, v: usize) -> Poly {
    let c = content_in(p, v);
    if c.is_one() {
        p.clone()
    } else {
        p.div_exact(&c).expect("content divides")
    }
}

fn pseudo_rem(f: &Poly, g: &Poly, v: usize) -> Poly {
    let dg = g.degree_in(v);
    let lg = g.coeffs_in(v).pop().expect("non-zero");
    let mut f = f.clone();
    while !f.is_zero() && f.degree_in(v) >= dg {
        let df = f.degree_in(v);
        let lf = f.coeffs_in(v).pop().expect("non-zero");
        let shift = Poly::term(Monomial::var_pow(v, df - dg), BigInt::one());
        f = lg.mul(&f).sub(&lf.mul(&shift).mul(g));
    }
    f
}

fn sign_normalize(p: &Poly) -> Poly {
    if p.leading_sign() < 0 {
        p.neg()
    } else {
        p.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Poly {
        Poly::var(i)
    }

    fn c(n: i64) -> Poly {
        Poly::constant(n.into())
    }

    #[test]
    fn gcd_of_products() {
        let f = x(0).add(&x(1).mul(&x(1))).add(&c(4));
        let g1 = x(2).sub(&x(0).mul(&x(6)));
        let g2 = x(1).add(&c(3));
        let a = f.mul(&g1).scale(&6.into());
        let b = f.mul(&g2).scale(&4.into());
        let g = gcd(&a, &b);
        assert_eq!(g, f.scale(&2.into()));
    }

    #[test]
    fn coprime_inputs() {
        let a = x(0).mul(&x(0)).add(&c(1));
        let b = x(0).add(&x(1));
        assert!(gcd(&a, &b).is_one());
    }
}
