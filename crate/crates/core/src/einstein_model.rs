//! Closed forms for conformally Einstein metrics `P = lambda g`: the ambient
//! Lichnerowicz action on `t^w (1 + lambda rho)^w sigma`, the factorisation
//! of `P_k` on TT tensors, and the sign of the total Q-curvature Hessian.

use ambient_exact::{Rat, RatFn, RhoJet};
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ambient_geometry::{lichnerowicz as ambient_lichnerowicz, AmbientTensor, IdentityCheck, NormalFormAmbient};
use crate::chart_geometry::{
    curvature_action_with, einstein_certificate, laplacian, lichnerowicz, space_form_metric, trace_free, weyl, ChartMetric,
};
use crate::error::{GeometryError, Result};
use crate::gjms_core::check_range;
use crate::tensor::{multi_indices, Symmetry, TensorField};

fn ri(v: i64) -> Rat {
    Rat::from_integer(v.into())
}

fn half_n(n: usize) -> Rat {
    Rat::new((n as i64).into(), 2.into())
}

/// Shift in `Lichnerowicz(t^w (1+lambda rho)^w sigma) = t^(w-2) (1+lambda rho)^(w-2) (Delta_L + s) sigma`:
/// `s = -4(n-1) lambda - 2(w-2)(n+w-3) lambda`.
pub fn einstein_shift(n: usize, w: &Rat, lambda: &RatFn) -> RatFn {
    let nn = ri(n as i64);
    let c = ri(-4) * (&nn - ri(1)) - ri(2) * (w - ri(2)) * (&nn + w - ri(3));
    lambda.scale(&c).reduce()
}

fn einstein_lambda(g: &ChartMetric) -> Result<RatFn> {
    let cert = einstein_certificate(g)?;
    if !cert.is_valid() {
        return Err(GeometryError::Precondition(format!("metric is not Einstein: P - lambda g has {:?}", cert.residual.first_nonzero())));
    }
    Ok(cert.lambda)
}

/// `Delta_L = Delta + 4 n lambda - 2 W o` on an Einstein metric, the form in
/// which the ambient computation comes out for an arbitrary symmetric `sigma`.
fn weyl_form_lichnerowicz(g: &ChartMetric, lambda: &RatFn, sigma: &TensorField) -> Result<TensorField> {
    let n = g.dim() as i64;
    let lap = laplacian(g, sigma)?;
    let wa = curvature_action_with(g, weyl(g)?, sigma)?;
    Ok(lap.add(&sigma.scale(&lambda.scale_int(4 * n)))?.sub(&wa.scale(&RatFn::from_int(2)))?.with_symmetry(Symmetry::pair(0, 1)))
}

/// Base side: `(Delta + 4n lambda - 2 W o - 4(n-1) lambda - 2(w-2)(n+w-3) lambda) sigma`.
pub fn einstein_ambient_rhs(g: &ChartMetric, sigma: &TensorField, w: &Rat) -> Result<TensorField> {
    let lambda = einstein_lambda(g)?;
    let base = weyl_form_lichnerowicz(g, &lambda, sigma)?;
    let s = einstein_shift(g.dim(), w, &lambda);
    Ok(base.add(&sigma.scale(&s))?.map(|c| c.reduce()))
}

/// Compares the Christoffel symbols of `2 rho dt^2 + 2t dt drho + t^2 (1+lambda rho)^2 g`
/// with the closed forms, one check per upper index block (`0`, base, `infinity`).
/// Stored jets omit the `t` powers, which are fixed by the weights.
pub fn christoffel_table_check(amb: &NormalFormAmbient) -> Result<Vec<IdentityCheck>> {
    let n = amb.n();
    let inf = n + 1;
    let lambda = amb
        .lambda()
        .cloned()
        .ok_or_else(|| GeometryError::Precondition("the closed forms need an Einstein ambient".into()))?;
    let order = amb.order();
    let g = amb.base();
    let gam = amb.christoffel()?;
    let base_gam = g.christoffel();
    let one_l = RhoJet::exact(vec![RatFn::one(), lambda.clone()]);
    let one_ml = RhoJet::exact(vec![RatFn::one(), lambda.neg()]);
    let inv = RhoJet::binomial(&lambda, &ri(-1), order).scale(&lambda);
    let zero = RhoJet::zero(RhoJet::EXACT);
    let is_base = |i: usize| (1..=n).contains(&i);
    let expected = |up: usize, i: usize, j: usize| -> RhoJet {
        let gij = || RhoJet::constant(g.g(i - 1, j - 1).clone());
        if up == 0 {
            if is_base(i) && is_base(j) {
                return gij().mul(&one_l).scale(&lambda).neg();
            }
        } else if up == inf {
            if is_base(i) && is_base(j) {
                return gij().mul(&one_l).mul(&one_ml).neg();
            }
            if (i, j) == (0, inf) || (i, j) == (inf, 0) {
                return RhoJet::one();
            }
        } else {
            let k = up;
            if is_base(i) && is_base(j) {
                return RhoJet::constant(base_gam.get(&[k - 1, i - 1, j - 1]).clone());
            }
            let other = if i == 0 || i == inf { (i, j) } else { (j, i) };
            if other.1 == k {
                return match other.0 {
                    0 => RhoJet::one(),
                    _ => inv.clone(),
                };
            }
        }
        zero.clone()
    };
    let mut out = Vec::new();
    for (name, ups) in [("Gamma^0", vec![0]), ("Gamma^k", (1..=n).collect::<Vec<_>>()), ("Gamma^infinity", vec![inf])] {
        let mut witness = None;
        'scan: for &up in &ups {
            for i in 0..=inf {
                for j in 0..=inf {
                    let d = gam.get(&[up, i, j]).sub(&expected(up, i, j));
                    if !d.is_zero() {
                        let p = d.coeffs().iter().position(|c| !c.is_zero()).unwrap_or(0);
                        witness = Some(format!(
                            "{name}: entry ({}; {}) differs at rho^{p}",
                            AmbientTensor::index_label(n, &[up]),
                            AmbientTensor::index_label(n, &[i, j])
                        ));
                        break 'scan;
                    }
                }
            }
        }
        out.push(IdentityCheck { name: name.into(), holds: witness.is_none(), witness });
    }
    Ok(out)
}

/// Outcome of the ambient-versus-base comparison.
#[derive(Clone, Debug, Serialize)]
pub struct EinsteinAmbientCheck {
    pub n: usize,
    pub weight: String,
    /// Jet order through which the ambient side was compared.
    pub order: usize,
    /// The `ij` block agrees.
    pub holds: bool,
    pub witness: Option<String>,
    /// The remaining components of the ambient side vanish. They carry
    /// divergence terms, so this is expected only for divergence-free `sigma`.
    pub off_block_vanishes: bool,
    pub off_block_witness: Option<String>,
}

/// Computes `Lichnerowicz(t^w (1+lambda rho)^w sigma)` on the Einstein ambient
/// and compares it with `t^(w-2) (1+lambda rho)^(w-2)` times [`einstein_ambient_rhs`].
pub fn einstein_ambient_check(amb: &NormalFormAmbient, sigma: &TensorField, w: &Rat) -> Result<EinsteinAmbientCheck> {
    let g = amb.base();
    let n = amb.n();
    let lambda = amb
        .lambda()
        .cloned()
        .ok_or_else(|| GeometryError::Precondition("the comparison needs an Einstein ambient".into()))?;
    let rhs = einstein_ambient_rhs(g, sigma, w)?;
    let order = amb.order();
    let up = RhoJet::binomial(&lambda, w, order);
    let lifted = AmbientTensor::from_fn(n, 0, 2, w.clone(), Symmetry::pair(0, 1), |i| {
        if (1..=n).contains(&i[0]) && (1..=n).contains(&i[1]) {
            up.scale(sigma.get(&[i[0] - 1, i[1] - 1]))
        } else {
            RhoJet::zero(RhoJet::EXACT)
        }
    });
    let lhs = ambient_lichnerowicz(amb, &lifted)?;
    let got = lhs.order();
    let down = RhoJet::binomial(&lambda, &(w - ri(2)), got);
    let expected = AmbientTensor::from_fn(n, 0, 2, w - ri(2), Symmetry::pair(0, 1), |i| {
        if (1..=n).contains(&i[0]) && (1..=n).contains(&i[1]) {
            down.scale(rhs.get(&[i[0] - 1, i[1] - 1]))
        } else {
            RhoJet::zero(RhoJet::EXACT)
        }
    });
    let mut witness = None;
    let mut off_block = None;
    for idx in multi_indices(n + 2, 2) {
        let d = lhs.get(&idx).sub(expected.get(&idx));
        if d.is_zero() {
            continue;
        }
        let p = d.coeffs().iter().position(|c| !c.is_zero()).unwrap_or(0);
        let msg = format!("component {} differs at rho^{p}: {}", AmbientTensor::index_label(n, &idx), d.coeffs()[p]);
        let in_block = idx.iter().all(|i| (1..=n).contains(i));
        if in_block && witness.is_none() {
            witness = Some(msg);
        } else if !in_block && off_block.is_none() {
            off_block = Some(msg);
        }
    }
    Ok(EinsteinAmbientCheck {
        n,
        weight: w.to_string(),
        order: got,
        holds: witness.is_none(),
        witness,
        off_block_vanishes: off_block.is_none(),
        off_block_witness: off_block,
    })
}

/// `P_k` on TT tensors of an Einstein metric as `prod_m (Delta_L + c_m)`.
#[derive(Clone, Debug, Serialize)]
pub struct FactorList {
    pub n: usize,
    pub k: usize,
    pub lambda: RatFn,
    pub shifts: Vec<RatFn>,
}

/// `c_m = -4(n-1) lambda - 2(-n/2+k-2m)(n/2+k-2m-1) lambda` for `m = 0..k-1`.
pub fn pk_tt_factors(n: usize, k: usize, lambda: &RatFn) -> Result<FactorList> {
    check_range(n, k)?;
    let h = half_n(n);
    let shifts: Vec<RatFn> = (0..k)
        .map(|m| {
            let a = -&h + ri(k as i64) - ri(2 * m as i64);
            let b = &h + ri(k as i64) - ri(2 * m as i64) - ri(1);
            let c = ri(-4) * ri(n as i64 - 1) - ri(2) * a * b;
            lambda.scale(&c).reduce()
        })
        .collect();
    if n % 2 == 0 && k == n / 2 {
        let q = critical_shifts(n, lambda);
        if let Some(m) = (0..k).find(|&m| !shifts[m].equals(&q[m])) {
            return Err(GeometryError::Precondition(format!("shift {m} disagrees with the critical form: {} vs {}", shifts[m], q[m])));
        }
    }
    Ok(FactorList { n, k, lambda: lambda.clone(), shifts })
}

/// Shifts of the Hessian factors at `k = n/2`: `-4(n-1) lambda + 4m(n-2m-1) lambda`.
pub fn critical_shifts(n: usize, lambda: &RatFn) -> Vec<RatFn> {
    let nn = n as i64;
    (0..n / 2)
        .map(|m| {
            let m = m as i64;
            lambda.scale(&(ri(-4 * (nn - 1)) + ri(4 * m * (nn - 2 * m - 1)))).reduce()
        })
        .collect()
}

/// `-2(-n/2+k-2m)(n/2+k-2m-1) = 4m(n-2m-1)` at `k = n/2`, as a polynomial
/// identity in `n` and `m` (the first two coordinate slots stand in for them).
pub fn shift_identity_symbolic() -> bool {
    let n = RatFn::x(1);
    let m = RatFn::x(2);
    let h = n.scale(&Rat::new(1.into(), 2.into()));
    let two_m = m.scale_int(2);
    let a = h.neg().add(&h).sub(&two_m);
    let b = h.add(&h).sub(&two_m).sub(&RatFn::one());
    let lhs = a.mul(&b).scale_int(-2);
    let rhs = m.scale_int(4).mul(&n.sub(&two_m).sub(&RatFn::one()));
    lhs.equals(&rhs)
}

impl FactorList {
    /// `prod_m (Delta_L + c_m) phi` with the chart Lichnerowicz Laplacian.
    pub fn apply(&self, g: &ChartMetric, phi: &TensorField) -> Result<TensorField> {
        let mut acc = phi.clone();
        for c in &self.shifts {
            acc = lichnerowicz(g, &acc)?.add(&acc.scale(c))?.map(|x| x.reduce());
        }
        Ok(acc)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    LocalMax,
    Unknown,
}

/// Signs of the Hessian factors `alpha + c_m` at the smallest TT eigenvalue.
#[derive(Clone, Debug, Serialize)]
pub struct HessianVerdict {
    pub n: usize,
    pub lambda: String,
    pub alpha: String,
    pub factors: Vec<String>,
    pub all_positive: bool,
    /// `alpha > 4(n-1) lambda`.
    pub eigenvalue_condition: bool,
    pub verdict: Verdict,
}

/// Factor values `alpha - 4(n-1) lambda + 4m(n-2m-1) lambda`, `m < n/2`. The
/// verdict is local-max when `lambda >= 0` and every factor is positive;
/// otherwise it is unknown.
pub fn q_hessian(n: usize, lambda: &Rat, alpha: &Rat) -> Result<HessianVerdict> {
    if n < 4 || n % 2 == 1 {
        return Err(GeometryError::Range(format!("the Q-curvature Hessian needs even n >= 4, got {n}")));
    }
    let nn = n as i64;
    let values: Vec<Rat> = (0..nn / 2).map(|m| alpha - ri(4 * (nn - 1)) * lambda + ri(4 * m * (nn - 2 * m - 1)) * lambda).collect();
    let all_positive = values.iter().all(|v| v.is_positive());
    let eigenvalue_condition = alpha > &(ri(4 * (nn - 1)) * lambda);
    let verdict = if !lambda.is_negative() && all_positive { Verdict::LocalMax } else { Verdict::Unknown };
    Ok(HessianVerdict {
        n,
        lambda: lambda.to_string(),
        alpha: alpha.to_string(),
        factors: values.iter().map(|v| v.to_string()).collect(),
        all_positive,
        eigenvalue_condition,
        verdict,
    })
}

/// Space-form check of `lambda = 1/2` and `Delta_L = Delta + 2n` on trace-free tensors.
#[derive(Clone, Debug, Serialize)]
pub struct SphereReport {
    pub n: usize,
    pub c: String,
    pub lambda: String,
    pub einstein_certified: bool,
    pub lambda_is_half: bool,
    pub identity_holds: bool,
    pub witness: Option<String>,
}

impl SphereReport {
    pub fn passes(&self) -> bool {
        self.einstein_certified && self.lambda_is_half && self.identity_holds
    }
}

fn random_trace_free(g: &ChartMetric, rng: &mut ChaCha8Rng) -> Result<TensorField> {
    let n = g.dim();
    let raw = TensorField::from_fn(n, 0, 2, Symmetry::pair(0, 1), |_| {
        let mut acc = RatFn::from_int(rng.gen_range(-2..=2));
        for _ in 0..2 {
            let mut m = RatFn::from_int(rng.gen_range(-2..=2));
            for _ in 0..rng.gen_range(1..=2) {
                m = m.mul(&RatFn::x(rng.gen_range(1..=n)));
            }
            acc = acc.add(&m);
        }
        acc
    });
    trace_free(g, &raw)
}

/// Certifies the space form of curvature `c` and tests `Delta_L sigma = Delta sigma + 2n sigma`
/// on random trace-free `sigma`. Passes exactly for `c = 1`.
pub fn sphere_check(n: usize, c: &Rat, samples: usize, seed: u64) -> Result<SphereReport> {
    let s = space_form_metric(n, c)?;
    let g = &s.metric;
    let cert = einstein_certificate(g)?;
    let einstein_certified = cert.is_valid();
    let half = Rat::new(1.into(), 2.into());
    let lambda_is_half = cert.lambda.as_rat().is_some_and(|l| l == half);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut witness = None;
    for _ in 0..samples {
        let sigma = random_trace_free(g, &mut rng)?;
        let lhs = lichnerowicz(g, &sigma)?;
        let rhs = laplacian(g, &sigma)?.add(&sigma.scale(&RatFn::from_int(2 * n as i64)))?;
        if let Some((idx, v)) = lhs.sub(&rhs)?.map(|x| x.reduce()).first_nonzero() {
            witness = Some(format!("component {} of Delta_L - Delta - 2n is {}", TensorField::index_key(&idx), v));
            break;
        }
    }
    Ok(SphereReport {
        n,
        c: c.to_string(),
        lambda: cert.lambda.to_string(),
        einstein_certified,
        lambda_is_half,
        identity_holds: witness.is_none(),
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ambient_exact::rat;

    #[test]
    fn factor_example_n4_k2() {
        let f = pk_tt_factors(4, 2, &RatFn::lambda()).unwrap();
        assert!(f.shifts[0].equals(&RatFn::lambda().scale_int(-12)));
        assert!(f.shifts[1].equals(&RatFn::lambda().scale_int(-8)));
        assert!(pk_tt_factors(4, 3, &RatFn::lambda()).is_err());
    }

    #[test]
    fn shift_example_w0() {
        // n = 4, w = 0, lambda = 1/2: -6 + 2 = -4
        let s = einstein_shift(4, &ri(0), &RatFn::from_rat(rat(1, 2)));
        assert_eq!(s.as_rat(), Some(ri(-4)));
        assert!(einstein_shift(4, &ri(2), &RatFn::lambda()).equals(&RatFn::lambda().scale_int(-12)));
    }

    #[test]
    fn hessian_boundary_is_unknown() {
        let v = q_hessian(6, &rat(1, 2), &ri(10)).unwrap();
        assert_eq!(v.verdict, Verdict::Unknown);
        assert!(!v.eigenvalue_condition);
        assert_eq!(q_hessian(4, &ri(0), &ri(1)).unwrap().verdict, Verdict::LocalMax);
        assert_eq!(q_hessian(4, &ri(-1), &ri(100)).unwrap().verdict, Verdict::Unknown);
        assert!(q_hessian(5, &ri(0), &ri(1)).is_err());
    }

    #[test]
    fn symbolic_identity() {
        assert!(shift_identity_symbolic());
    }
}
