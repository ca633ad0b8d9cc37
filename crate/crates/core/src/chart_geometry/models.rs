//! Model metrics, Einstein certificates and TT test tensors.

use ambient_exact::{gcd::gcd, rat_int, solve_exact, LinearSystem, Monomial, Poly, Rat, RatFn, SolveOutcome};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use serde::Serialize;
use std::collections::BTreeMap;

use super::{divergence, trace, ChartMetric};
use crate::error::{GeometryError, Result};
use crate::tensor::{Symmetry, TensorField};

/// Certificate that `P = lambda g` for a constant `lambda`.
#[derive(Clone, Debug)]
pub struct EinsteinCertificate {
    pub lambda: RatFn,
    /// `P - lambda g`.
    pub residual: TensorField,
}

impl EinsteinCertificate {
    pub fn is_valid(&self) -> bool {
        self.residual.is_zero() && (0..ambient_exact::MAX_X).all(|s| !self.lambda.uses_slot(s))
    }
}

/// Computes `lambda = Sc / (2n(n-1))` and the residual `P - lambda g`.
pub fn einstein_certificate(g: &ChartMetric) -> Result<EinsteinCertificate> {
    let p = super::schouten(g)?;
    let n = g.dim() as i64;
    let lambda = g.curvature().scalar.scale(&Rat::new(1.into(), (2 * n * (n - 1)).into())).reduce();
    let residual = p.sub(&g.metric().scale(&lambda))?;
    Ok(EinsteinCertificate { lambda, residual })
}

/// The chart `g = delta / D^2` with `D = 1 + c|x|^2/4`, together with its
/// Einstein constant `lambda = c/2`.
#[derive(Clone, Debug)]
pub struct SpaceForm {
    pub metric: ChartMetric,
    pub lambda: RatFn,
    /// The conformal factor `D`.
    pub factor: RatFn,
}

fn radius_squared(n: usize) -> Poly {
    (0..n).fold(Poly::zero(), |acc, i| acc.add(&Poly::var(i).mul(&Poly::var(i))))
}

fn conformal_metric(n: usize, base: &Poly, coeff: Rat) -> Result<ChartMetric> {
    let entry = RatFn::with_base_power(coeff, Poly::one(), base, -2);
    let m = (0..n).map(|i| (0..n).map(|j| if i == j { entry.clone() } else { RatFn::zero() }).collect()).collect();
    ChartMetric::new(m, vec![Rat::zero(); n])
}

/// Space form of curvature `c`; `c = 0` gives the flat metric.
pub fn space_form_metric(n: usize, c: &Rat) -> Result<SpaceForm> {
    if n < 3 {
        return Err(GeometryError::DimensionTooSmall { dim: n, what: "space form" });
    }
    if c.is_zero() {
        return Ok(SpaceForm { metric: ChartMetric::flat(n), lambda: RatFn::zero(), factor: RatFn::one() });
    }
    let (p, q) = (c.numer().clone(), c.denom().clone());
    let four_q = q * 4i32;
    let base = Poly::constant(four_q.clone()).add(&radius_squared(n).scale(&p));
    let metric = conformal_metric(n, &base, Rat::from_integer(&four_q * &four_q))?;
    let factor = RatFn::from_poly(base).scale(&Rat::new(1.into(), four_q));
    Ok(SpaceForm { metric, lambda: RatFn::from_rat(c / rat_int(2)), factor })
}

/// Space form with symbolic Einstein constant: `c = 2 lambda`.
pub fn space_form_symbolic(n: usize) -> Result<SpaceForm> {
    if n < 3 {
        return Err(GeometryError::DimensionTooSmall { dim: n, what: "space form" });
    }
    let base = Poly::constant(2.into()).add(&radius_squared(n).mul(&Poly::var(ambient_exact::LAMBDA_SLOT)));
    let metric = conformal_metric(n, &base, rat_int(4))?;
    let factor = RatFn::from_poly(base).scale(&Rat::new(1.into(), 2.into()));
    Ok(SpaceForm { metric, lambda: RatFn::lambda(), factor })
}

impl SpaceForm {
    /// Carries a flat TT tensor `chi` to the TT tensor `D^{n-2} chi` of the
    /// space form.
    pub fn transplant_tt(&self, chi: &TensorField) -> Result<TensorField> {
        let n = self.metric.dim();
        let f = self.factor.pow(n as i32 - 2)?;
        Ok(chi.scale(&f))
    }
}

/// Outcome of a TT test.
#[derive(Clone, Debug, PartialEq)]
pub enum TtVerdict {
    Yes,
    No { trace: RatFn, divergence: Option<(usize, RatFn)> },
}

impl TtVerdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, TtVerdict::Yes)
    }
}

/// Trace-free and divergence-free, identically.
pub fn is_tt(g: &ChartMetric, phi: &TensorField) -> Result<TtVerdict> {
    let tr = trace(g, phi)?;
    let div = divergence(g, phi)?;
    let bad = (0..g.dim()).map(|i| (i, div.at(&[i]))).find(|(_, v)| !v.is_zero());
    if tr.is_zero() && bad.is_none() {
        Ok(TtVerdict::Yes)
    } else {
        Ok(TtVerdict::No { trace: tr, divergence: bad })
    }
}

/// Seeded random symmetric 2-tensor with small integer polynomial entries of
/// degree at most `degree`.
pub fn random_symmetric(n: usize, degree: u32, seed: u64) -> TensorField {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    TensorField::from_fn(n, 0, 2, Symmetry::pair(0, 1), |_| {
        let mut acc = RatFn::from_int(rng.gen_range(-2..=2));
        for _ in 0..2 {
            let mut m = RatFn::from_int(rng.gen_range(-2..=2));
            for _ in 0..rng.gen_range(1..=degree.max(1)) {
                m = m.mul(&RatFn::x(rng.gen_range(1..=n)));
            }
            acc = acc.add(&m);
        }
        acc
    })
}

/// A polynomial trace-free tensor with prescribed divergence vanishing order.
#[derive(Clone, Debug, Serialize)]
pub struct TtJet {
    #[serde(skip)]
    pub phi: TensorField,
    pub degree: u32,
    /// `delta phi` vanishes to this order at the base point; `None` when the
    /// divergence is identically zero.
    pub divergence_order: Option<u32>,
}

/// Monomial exponent vectors in `n` variables of total degree at most `d`.
fn exponents(n: usize, d: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for e in &out {
            let used: u32 = e.iter().sum();
            for k in 0..=d - used {
                let mut f = e.clone();
                f.push(k);
                next.push(f);
            }
        }
        out = next;
    }
    out.sort_by_key(|e| (e.iter().sum::<u32>(), e.clone()));
    out
}

fn shifted_monomial(e: &[u32], point: &[Rat]) -> RatFn {
    let mut acc = RatFn::one();
    for (s, &k) in e.iter().enumerate() {
        if k > 0 {
            let lin = RatFn::x(s + 1).sub(&RatFn::from_rat(point[s].clone()));
            acc = acc.mul(&lin.pow(k as i32).expect("non-negative power"));
        }
    }
    acc
}

/// Groups polynomial coefficients by monomial, one equation per monomial.
fn push_poly_equations(rows: &mut BTreeMap<Monomial, Vec<(usize, Rat)>>, unknown: usize, p: &Poly, scale: &Rat) {
    for (m, c) in p.terms() {
        rows.entry(*m).or_default().push((unknown, Rat::from_integer(c.clone()) * scale));
    }
}

/// Builds a polynomial symmetric `phi` of degree `<= degree` (in coordinates
/// centred at the base point), exactly trace-free, whose divergence has
/// vanishing Taylor coefficients through degree `degree - 1` at the base
/// point. A seeded random element of the solution space is returned.
pub fn tt_jet_construct(g: &ChartMetric, degree: u32, seed: u64) -> Result<TtJet> {
    let n = g.dim();
    let point = g.base_point().to_vec();
    let exps = exponents(n, degree);
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let basis: Vec<(usize, usize, RatFn)> = pairs
        .iter()
        .flat_map(|&(i, j)| exps.iter().map(move |e| (i, j, e)))
        .map(|(i, j, e)| (i, j, shifted_monomial(e, &point)))
        .collect();

    // Trace: clear denominators of g^{ij} with their lcm.
    let dens: Vec<Poly> = pairs.iter().map(|&(i, j)| g.ginv(i, j).canonical().1).collect();
    let lcm = dens.iter().fold(Poly::one(), |acc, d| {
        let gg = gcd(&acc, d);
        acc.mul(&d.div_exact(&gg).expect("gcd divides"))
    });
    let cleared: Vec<Poly> = pairs
        .iter()
        .map(|&(i, j)| {
            let (num, den) = g.ginv(i, j).canonical();
            num.mul(&lcm.div_exact(&den).expect("lcm is a multiple"))
        })
        .collect();

    let mut trace_rows: BTreeMap<Monomial, Vec<(usize, Rat)>> = BTreeMap::new();
    let mut div_taylor: Vec<Vec<(Poly, Rat)>> = Vec::with_capacity(basis.len());
    for (u, (i, j, m)) in basis.iter().enumerate() {
        let pi = pairs.iter().position(|p| p == &(*i, *j)).expect("pair");
        let mult = if i == j { Rat::one() } else { rat_int(2) };
        let (mnum, _) = m.expanded();
        push_poly_equations(&mut trace_rows, u, &cleared[pi].mul(&mnum), &mult);
        let mut field = TensorField::zeros(n, 0, 2, Symmetry::pair(0, 1));
        field.set(&[*i, *j], m.clone());
        let div = divergence(g, &field)?;
        let mut per = Vec::with_capacity(n);
        for k in 0..n {
            let t = div.get(&[k]).taylor(&point, degree.saturating_sub(1))?;
            let (num, den) = t.expanded();
            let d = den.as_constant().expect("Taylor polynomial");
            per.push((num, Rat::new(1.into(), d)));
        }
        div_taylor.push(per);
    }

    let solve_with = |div_degree: Option<u32>| -> SolveOutcome {
        let mut sys = LinearSystem::new(basis.len());
        for row in trace_rows.values() {
            sys.push_row(row.clone(), Rat::zero());
        }
        if let Some(dd) = div_degree {
            for k in 0..n {
                let mut rows: BTreeMap<Monomial, Vec<(usize, Rat)>> = BTreeMap::new();
                for (u, per) in div_taylor.iter().enumerate() {
                    let (num, scale) = &per[k];
                    push_poly_equations(&mut rows, u, &truncate_x(num, dd), scale);
                }
                for row in rows.into_values() {
                    sys.push_row(row, Rat::zero());
                }
            }
        }
        solve_exact(&sys)
    };

    let nullspace = match solve_with(degree.checked_sub(1)) {
        SolveOutcome::Underdetermined { nullspace, .. } if !nullspace.is_empty() => nullspace,
        _ => {
            let mut best = 0;
            for dd in (0..degree.saturating_sub(1)).rev() {
                if let SolveOutcome::Underdetermined { nullspace, .. } = solve_with(Some(dd)) {
                    if !nullspace.is_empty() {
                        best = dd as usize + 1;
                        break;
                    }
                }
            }
            return Err(GeometryError::NoSolution { max_order: best });
        }
    };

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<Rat> = loop {
        let mut c = vec![Rat::zero(); basis.len()];
        for v in &nullspace {
            let w = rat_int(rng.gen_range(-3..=3));
            for (ci, vi) in c.iter_mut().zip(v) {
                *ci += &w * vi;
            }
        }
        if c.iter().any(|x| !x.is_zero()) {
            break c;
        }
    };

    let mut comps: BTreeMap<(usize, usize), RatFn> = BTreeMap::new();
    for ((i, j, m), c) in basis.iter().zip(&coeffs) {
        if !c.is_zero() {
            let e = comps.entry((*i, *j)).or_insert_with(RatFn::zero);
            *e = e.add(&m.scale(c));
        }
    }
    let phi = TensorField::from_fn(n, 0, 2, Symmetry::pair(0, 1), |idx| {
        comps.get(&(idx[0], idx[1])).cloned().unwrap_or_else(RatFn::zero)
    });
    let divergence_order = divergence_vanishing_order(g, &phi, degree + 4)?;
    Ok(TtJet { phi, degree, divergence_order })
}

fn truncate_x(p: &Poly, degree: u32) -> Poly {
    Poly::from_terms(
        p.terms()
            .iter()
            .filter(|(m, _)| (0..ambient_exact::MAX_X).map(|s| m.exp(s)).sum::<u32>() <= degree)
            .cloned()
            .collect(),
    )
}

/// Order to which `delta phi` vanishes at the base point (checked through
/// total degree `limit`), or `None` if it vanishes identically.
pub fn divergence_vanishing_order(g: &ChartMetric, phi: &TensorField, limit: u32) -> Result<Option<u32>> {
    let div = divergence(g, phi)?;
    if div.is_zero() {
        return Ok(None);
    }
    let point = g.base_point().to_vec();
    let mut best = limit + 1;
    for k in 0..g.dim() {
        let t = div.get(&[k]).taylor(&point, limit)?;
        let (num, _) = t.expanded();
        for (m, _) in num.terms() {
            let d: u32 = (0..ambient_exact::MAX_X).map(|s| m.exp(s)).sum();
            best = best.min(d);
        }
    }
    Ok(Some(best))
}

/// Exactly TT polynomial tensor on the flat chart.
pub fn flat_tt(n: usize, degree: u32, seed: u64) -> Result<TensorField> {
    let g = ChartMetric::flat(n);
    let jet = tt_jet_construct(&g, degree, seed)?;
    debug_assert!(jet.divergence_order.is_none());
    Ok(jet.phi)
}

/// First variation of the Bach tensor `B_ij = nabla^k nabla^l W_ikjl +
/// P^kl W_ikjl` along `g_s = delta + s phi` at the flat metric. Only partial
/// derivatives appear: the quadratic terms drop at first order.
pub fn linearized_bach_flat(phi: &TensorField) -> Result<TensorField> {
    let n = phi.dim();
    if phi.valence() != (0, 2) || n < 3 {
        return Err(GeometryError::Valence("linearised Bach tensor expects a symmetric 2-tensor, n >= 3".into()));
    }
    let d = |f: &RatFn, a: usize| f.derivative(a);
    // Gamma'_{kij} = (d_i phi_jk + d_j phi_ik - d_k phi_ij)/2, index k lowered
    let half = Rat::new(1.into(), 2.into());
    let gamma = |k: usize, i: usize, j: usize| {
        d(phi.get(&[j, k]), i).add(&d(phi.get(&[i, k]), j)).sub(&d(phi.get(&[i, j]), k)).scale(&half)
    };
    // R'_abcd = d_a Gamma'_{c b d} - d_b Gamma'_{c a d}
    let riem = TensorField::from_fn(n, 0, 4, Symmetry::none(), |i| {
        let (a, b, c, dd) = (i[0], i[1], i[2], i[3]);
        d(&gamma(c, b, dd), a).sub(&d(&gamma(c, a, dd), b)).reduce()
    });
    let ric = TensorField::from_fn(n, 0, 2, Symmetry::pair(0, 1), |i| {
        (0..n).fold(RatFn::zero(), |acc, a| acc.add(riem.get(&[a, i[0], a, i[1]]))).reduce()
    });
    let scal = (0..n).fold(RatFn::zero(), |acc, a| acc.add(ric.get(&[a, a]))).reduce();
    let nn = n as i64;
    let j = scal.scale(&Rat::new(1.into(), (2 * (nn - 1)).into()));
    let p = TensorField::from_fn(n, 0, 2, Symmetry::pair(0, 1), |i| {
        let mut v = ric.get(i).clone();
        if i[0] == i[1] {
            v = v.sub(&j);
        }
        v.scale(&Rat::new(1.into(), (nn - 2).into())).reduce()
    });
    let delta = |a: usize, b: usize| if a == b { RatFn::one() } else { RatFn::zero() };
    let weyl = |a: usize, b: usize, c: usize, dd: usize| {
        let pg = p.get(&[a, c]).mul(&delta(b, dd)).add(&p.get(&[b, dd]).mul(&delta(a, c)))
            .sub(&p.get(&[a, dd]).mul(&delta(b, c)))
            .sub(&p.get(&[b, c]).mul(&delta(a, dd)));
        riem.get(&[a, b, c, dd]).sub(&pg)
    };
    Ok(TensorField::from_fn(n, 0, 2, Symmetry::pair(0, 1), |i| {
        let mut acc = RatFn::zero();
        for k in 0..n {
            for l in 0..n {
                acc = acc.add(&d(&d(&weyl(i[0], k, i[1], l), k), l));
            }
        }
        acc.reduce()
    }))
}
