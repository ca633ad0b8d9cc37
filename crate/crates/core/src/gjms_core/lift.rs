//! Ambient lift of a trace-free tensor: an extension that is trace-free,
//! annihilated by `T`, and divergence-free to the order allowed by the weight.

use ambient_exact::{Rat, RatFn, RhoJet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::ri;
use crate::ambient_geometry::{
    divergence, mul_r, mul_scalar, order_predicate, outer, restrict_g, restrict_tm, sym_product, t_contract, t_lower, trace, AmbientTensor,
    NormalFormAmbient, OrderKind, OrderVerdict,
};
use crate::chart_geometry::trace as base_trace;
use crate::error::{GeometryError, Result};
use crate::tensor::{Symmetry, TensorField};

/// How to choose the initial extension and the free part of each `W`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LiftChoice {
    Canonical,
    /// Adds seeded `rho`-multiples of trace-free tensors and free mixed
    /// components; the restriction to `G` must not change.
    Perturbed(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LiftOptions {
    pub seed: LiftChoice,
    pub completion: LiftChoice,
}

impl Default for LiftOptions {
    fn default() -> LiftOptions {
        LiftOptions { seed: LiftChoice::Canonical, completion: LiftChoice::Canonical }
    }
}

/// Orders achieved by the lift, each certified by an order predicate.
#[derive(Clone, Debug, Serialize)]
pub struct LiftOrders {
    /// `delta sigma = O^-(r^divergence)`.
    pub divergence: usize,
    /// `T ⌟ sigma = O^-(r^t_contraction)`.
    pub t_contraction: usize,
    /// `tr sigma = O(r^trace)`.
    pub trace: usize,
}

#[derive(Clone, Debug)]
pub struct LiftResult {
    pub sigma: AmbientTensor,
    pub k: usize,
    /// Steps of the recursion; the last one may omit the `T T` term.
    pub steps: usize,
    /// The order the construction is required to reach, `ceil((n/2 + k)/2)`.
    pub target: usize,
    pub orders: LiftOrders,
    pub certificates: Vec<OrderVerdict>,
    pub phi_tilde: AmbientTensor,
}

impl LiftResult {
    /// All certificates hold.
    pub fn is_certified(&self) -> bool {
        self.certificates.iter().all(|c| c.holds)
    }
}

/// Weight `-n/2 + 2 + k`.
pub fn lift_weight(n: usize, k: usize) -> Rat {
    Rat::new((4 + 2 * k as i64 - n as i64).into(), 2.into())
}

/// `ceil((n/2 + k)/2)` without floating point.
pub fn lift_target(n: usize, k: usize) -> usize {
    // (n + 2k)/4 rounded up
    (n + 2 * k).div_ceil(4)
}

fn half_sum(n: usize, plus: i64) -> Rat {
    // n/2 + plus
    Rat::new((n as i64 + 2 * plus).into(), 2.into())
}

fn random_trace_free_ij(amb: &NormalFormAmbient, weight: Rat, rng: &mut ChaCha8Rng) -> AmbientTensor {
    let n = amb.n();
    let mut psi = vec![vec![RatFn::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let v = RatFn::from_int(rng.gen_range(-2..=2)).add(&RatFn::x(rng.gen_range(1..=n)).scale_int(rng.gen_range(-2..=2)));
            psi[i][j] = v.clone();
            psi[j][i] = v;
        }
    }
    let psi = TensorField::sym2(n, &psi);
    tf_rho(amb, &psi, weight)
}

/// `tf_{g_rho} psi`, placed in the base block with exact-zero other components.
pub fn tf_rho(amb: &NormalFormAmbient, psi: &TensorField, weight: Rat) -> AmbientTensor {
    let n = amb.n();
    let inv = amb.inverse();
    let mut tr = RhoJet::zero(RhoJet::EXACT);
    for k in 0..n {
        for l in 0..n {
            let p = psi.get(&[k, l]);
            if !p.is_zero() {
                tr = tr.add(&inv.get(&[k + 1, l + 1]).scale(p));
            }
        }
    }
    let tr = tr.scale_rat(&Rat::new(1.into(), (n as i64).into())).reduce();
    let fam = amb.family();
    AmbientTensor::from_fn(n, 0, 2, weight, Symmetry::pair(0, 1), |idx| {
        if (1..=n).contains(&idx[0]) && (1..=n).contains(&idx[1]) {
            let (i, j) = (idx[0] - 1, idx[1] - 1);
            RhoJet::constant(psi.get(&[i, j]).clone()).sub(&tr.mul(&fam[i][j])).reduce()
        } else {
            RhoJet::zero(RhoJet::EXACT)
        }
    })
}

/// Free `i,inf` components (they touch neither the trace nor `T ⌟`).
fn random_mixed(amb: &NormalFormAmbient, weight: Rat, rng: &mut ChaCha8Rng) -> AmbientTensor {
    let n = amb.n();
    let vals: Vec<RatFn> = (0..n).map(|_| RatFn::from_int(rng.gen_range(-3..=3)).add(&RatFn::x(rng.gen_range(1..=n)))).collect();
    AmbientTensor::from_fn(n, 0, 2, weight, Symmetry::pair(0, 1), |idx| match (idx[0], idx[1]) {
        (i, j) if j == n + 1 && (1..=n).contains(&i) => RhoJet::constant(vals[i - 1].clone()),
        (j, i) if j == n + 1 && (1..=n).contains(&i) => RhoJet::constant(vals[i - 1].clone()),
        _ => RhoJet::zero(RhoJet::EXACT),
    })
}

/// Initial extension `sigma_(0)` of `phi`: trace-free, `T ⌟ sigma = 0`.
pub fn seed_extension(amb: &NormalFormAmbient, phi: &TensorField, weight: Rat, choice: LiftChoice) -> Result<AmbientTensor> {
    let base = tf_rho(amb, phi, weight.clone());
    match choice {
        LiftChoice::Canonical => Ok(base),
        LiftChoice::Perturbed(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let extra = random_trace_free_ij(amb, weight.clone(), &mut rng).mul_rho_pow(1);
            base.add(&extra)?.add(&random_mixed(amb, weight, &mut rng))
        }
    }
}

/// The `W` of one recursion step: `T ⌟ W = V + f T` and `tr W = f` with the
/// pure-trace base block carrying the trace.
fn completion(amb: &NormalFormAmbient, v: &AmbientTensor, f: &AmbientTensor, choice: LiftChoice, step: usize) -> Result<AmbientTensor> {
    let n = amb.n();
    let inf = n + 1;
    let w = v.weight().clone();
    let fj = f.get(&[]).clone();
    let t0 = |i: usize| -> RhoJet {
        // V_I + f T_I stored
        let tl = match i {
            0 => RhoJet::rho().scale_rat(&ri(2)),
            k if k == inf => RhoJet::one(),
            _ => RhoJet::zero(RhoJet::EXACT),
        };
        v.get(&[i]).add(&fj.mul(&tl)).reduce()
    };
    let w0inf = t0(inf);
    let c = fj.sub(&w0inf.scale_rat(&ri(2))).scale_rat(&Rat::new(1.into(), (n as i64).into())).reduce();
    let fam = amb.family();
    let mut out = AmbientTensor::from_fn(n, 0, 2, w.clone(), Symmetry::pair(0, 1), |idx| match (idx[0], idx[1]) {
        (0, j) => t0(j),
        (i, 0) => t0(i),
        (i, j) if (1..=n).contains(&i) && (1..=n).contains(&j) => c.mul(&fam[i - 1][j - 1]).reduce(),
        _ => RhoJet::zero(RhoJet::EXACT),
    });
    if let LiftChoice::Perturbed(seed) = choice {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(31).wrapping_add(step as u64));
        out = out.add(&random_trace_free_ij(amb, w.clone(), &mut rng).mul_rho_pow(1))?;
        out = out.add(&random_mixed(amb, w, &mut rng))?;
    }
    Ok(out)
}

/// Largest `m <= cap` for which the predicate holds; exact zero reports
/// [`RhoJet::EXACT`].
pub(crate) fn max_order(t: &AmbientTensor, base: &crate::chart_geometry::ChartMetric, kind: OrderKind, cap: usize) -> Result<usize> {
    if t.is_zero() && t.order() == RhoJet::EXACT {
        return Ok(RhoJet::EXACT);
    }
    let mut best = 0;
    for m in 1..=cap {
        match order_predicate(t, base, kind, m) {
            Ok(v) if v.holds => best = m,
            Ok(_) | Err(GeometryError::Truncation { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    Ok(best)
}

/// Ambient lift of a trace-free `phi` of weight `-n/2 + 2 + k`.
pub fn ambient_lift(amb: &NormalFormAmbient, phi: &TensorField, k: usize, options: LiftOptions) -> Result<LiftResult> {
    check_lift_input(amb, phi, k)?;
    let sigma0 = seed_extension(amb, phi, lift_weight(amb.n(), k), options.seed)?;
    lift_from_seed(amb, phi, k, sigma0, options.completion)
}

fn check_lift_input(amb: &NormalFormAmbient, phi: &TensorField, k: usize) -> Result<()> {
    let n = amb.n();
    if phi.dim() != n || phi.valence() != (0, 2) {
        return Err(GeometryError::Valence("the lift expects a symmetric 2-tensor on the base".into()));
    }
    if k == 0 || (n % 2 == 0 && k > n / 2) {
        return Err(GeometryError::Range(format!("k = {k} is outside 1..=n/2 for n = {n}")));
    }
    let tr = base_trace(amb.base(), phi)?.reduce();
    if !tr.is_zero() {
        return Err(GeometryError::NotTraceFree { residual: tr.to_string() });
    }
    Ok(())
}

/// Runs the recursion from a caller-supplied initial extension, which must be
/// trace-free, annihilated by `T` and restrict to `phi`.
pub fn lift_from_seed(amb: &NormalFormAmbient, phi: &TensorField, k: usize, sigma0: AmbientTensor, completion_choice: LiftChoice) -> Result<LiftResult> {
    check_lift_input(amb, phi, k)?;
    let n = amb.n();
    if sigma0.weight() != &lift_weight(n, k) {
        return Err(GeometryError::Valence(format!("initial extension has weight {}, expected {}", sigma0.weight(), lift_weight(n, k))));
    }
    if let Some((idx, _)) = t_contract(&sigma0)?.first_nonzero() {
        return Err(GeometryError::Precondition(format!("initial extension has T-contraction at {}", AmbientTensor::index_label(n, &idx))));
    }
    if !trace(amb, &sigma0)?.is_zero() {
        return Err(GeometryError::Precondition("initial extension is not trace-free".into()));
    }
    if !restrict_tm(&sigma0)?.tensor.equals(phi) {
        return Err(GeometryError::Precondition("initial extension does not restrict to phi".into()));
    }
    let w = lift_weight(n, k);
    let target = lift_target(n, k);
    let mut sigma = sigma0;
    // Regular steps, then (n even, n/2 + k odd) one step without the T T term.
    let regular = if n % 2 == 0 { (n / 2 + k) / 2 } else { target };
    let steps = if n % 2 == 0 && (n / 2 + k) % 2 == 1 { regular + 1 } else { regular };
    let tl = t_lower(n);
    let tt = outer(&tl, &tl)?;
    for m in 1..=steps {
        let a = half_sum(n, 2 + k as i64 - 2 * m as i64);
        let b = half_sum(n, 1 + k as i64 - 2 * m as i64);
        if a == ri(0) {
            return Err(GeometryError::Range(format!("vanishing denominator n/2 + 2 + k - 2m at m = {m}")));
        }
        let div = divergence(amb, &sigma)?;
        let check = order_predicate(&div, amb.base(), OrderKind::Plain, m - 1)?;
        if !check.holds {
            return Err(GeometryError::Precondition(format!("divergence is not O(r^{}) before step {m}: {:?}", m - 1, check.witness)));
        }
        let scale = Rat::new(1.into(), ri(2).pow(m as i32 - 1).to_integer()) / &a;
        let v = div
            .try_map(|j| j.shift_down(m - 1).map_err(crate::ambient_geometry::lift_err))?
            .scale_rat(&scale)
            .with_weight(&w - ri(2 * m as i64));
        let f = if m <= regular {
            if b == ri(0) {
                return Err(GeometryError::Range(format!("vanishing denominator n/2 + 1 + k - 2m at m = {m}")));
            }
            divergence(amb, &v)?.scale_rat(&(ri(1) / &b))
        } else {
            AmbientTensor::scalar(n, &w - ri(2 * m as i64 + 2), RhoJet::zero(RhoJet::EXACT))
        };
        let wt = completion(amb, &v, &f, completion_choice, m)?;
        let term = mul_r(&sym_product(&tl, &v)?, m - 1).add(&mul_r(&mul_scalar(&f, &tt)?, m - 1))?.sub(&mul_r(&wt, m))?;
        sigma = sigma.add(&term)?.with_symmetry(Symmetry::pair(0, 1));
    }
    let base = amb.base();
    let div = divergence(amb, &sigma)?;
    let tc = t_contract(&sigma)?;
    let trs = trace(amb, &sigma)?;
    let certificates = vec![
        order_predicate(&div, base, OrderKind::Minus, target)?,
        order_predicate(&tc, base, OrderKind::Minus, target + 1)?,
        order_predicate(&trs, base, OrderKind::Plain, target)?,
    ];
    let cap = sigma.order().min(64);
    let orders = LiftOrders {
        divergence: max_order(&div, base, OrderKind::Minus, cap)?,
        t_contraction: max_order(&tc, base, OrderKind::Minus, cap)?,
        trace: max_order(&trs, base, OrderKind::Plain, cap)?,
    };
    let restricted = restrict_tm(&sigma)?;
    if !restricted.tensor.equals(phi) {
        return Err(GeometryError::Precondition("the lift does not restrict to phi".into()));
    }
    Ok(LiftResult { phi_tilde: restrict_g(&sigma), sigma, k, steps, target, orders, certificates })
}
