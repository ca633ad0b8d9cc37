//! Straightness of the normal form, checked on jets and, for small `n`, in an
//! honest coordinate chart `(t, x, rho)`.

use ambient_exact::{Rat, RatFn, RhoJet, NUM_SLOTS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{covariant_derivative, gradient, identity, nabla_t, r_field, ri, t_contract, t_vector, AmbientTensor, NormalFormAmbient};
use crate::chart_geometry::{self as chart, ChartMetric};
use crate::error::{GeometryError, Result};
use crate::tensor::{Symmetry, TensorField};

/// One straightness identity with its first failing component, if any.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub holds: bool,
    pub witness: Option<String>,
}

impl IdentityCheck {
    fn from_difference(name: impl Into<String>, n: usize, diff: Option<(Vec<usize>, RhoJet)>) -> IdentityCheck {
        let witness = diff.map(|(idx, j)| {
            let c = j.coeffs().iter().position(|c| !c.is_zero()).unwrap_or(0);
            format!("component {} differs at rho^{}: {}", AmbientTensor::index_label(n, &idx), c, j.coeffs().get(c).map(|x| x.to_string()).unwrap_or_default())
        });
        IdentityCheck { name: name.into(), holds: witness.is_none(), witness }
    }
}

/// A random homogeneous covariant tensor with small polynomial jet entries.
pub fn random_ambient(n: usize, rank: usize, weight: Rat, order: usize, symmetric: bool, seed: u64) -> AmbientTensor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sym = if symmetric && rank == 2 { Symmetry::pair(0, 1) } else { Symmetry::none() };
    let mut t = AmbientTensor::zeros(n, 0, rank, weight, sym.clone());
    for idx in crate::tensor::multi_indices(n + 2, rank) {
        if !sym.is_canonical(&idx) {
            continue;
        }
        let coeffs = (0..order.min(3))
            .map(|_| {
                let mut c = RatFn::from_int(rng.gen_range(-3..=3));
                if n > 0 {
                    let i = rng.gen_range(1..=n);
                    c = c.add(&RatFn::x(i).scale_int(rng.gen_range(-2..=2)));
                }
                c
            })
            .collect();
        t.set(&idx, RhoJet::new(coeffs, order));
    }
    t
}

/// `nabla T = id`, `dr = 2 T ⌟ g` and the derived identities
/// `nabla_T tau = (w - 1) tau`, `nabla_T sigma = (w - 2) sigma` on random
/// homogeneous tensors.
pub fn straightness_check(amb: &NormalFormAmbient, samples: usize, seed: u64) -> Result<Vec<IdentityCheck>> {
    let n = amb.n();
    let mut out = Vec::new();
    let dt = covariant_derivative(amb, &t_vector(n))?;
    out.push(IdentityCheck::from_difference("nabla T = id", n, dt.first_difference(&identity(n))));
    let dr = gradient(&r_field(n))?;
    let tg = t_contract(amb.metric())?.scale_rat(&ri(2));
    out.push(IdentityCheck::from_difference("dr = 2 T.g", n, dr.first_difference(&tg)));
    let order = amb.order().min(4);
    for s in 0..samples {
        let w = Rat::new((s as i64 * 3 - 5).into(), 2.into());
        let tau = random_ambient(n, 1, w.clone(), order, false, seed.wrapping_add(2 * s as u64));
        let lhs = nabla_t(amb, &tau)?;
        let rhs = tau.scale_rat(&(&w - ri(1)));
        out.push(IdentityCheck::from_difference(format!("nabla_T tau = (w-1) tau, w = {w}"), n, lhs.first_difference(&rhs)));
        let sigma = random_ambient(n, 2, w.clone(), order, true, seed.wrapping_add(2 * s as u64 + 1));
        let lhs = nabla_t(amb, &sigma)?;
        let rhs = sigma.scale_rat(&(&w - ri(2)));
        out.push(IdentityCheck::from_difference(format!("nabla_T sigma = (w-2) sigma, w = {w}"), n, lhs.first_difference(&rhs)));
    }
    Ok(out)
}

/// Which `dt drho` coefficient to use in the chart: the straight normal form
/// has `2 t dt drho`; the variant with `2 rho dt drho` is degenerate on `G`
/// and is not straight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CrossTerm {
    TDtDrho,
    RhoDtDrho,
}

/// Result of the coordinate-chart straightness check.
#[derive(Clone, Debug, Serialize)]
pub struct ChartStraightness {
    pub cross_term: CrossTerm,
    pub holds: bool,
    pub witness: Option<String>,
}

/// Builds `2 rho dt^2 + 2 c dt drho + t^2 g_rho` as a chart metric in
/// `(t, x_1..x_n, rho)` and checks `nabla T = id` symbolically. Needs exact
/// polynomial `g_rho` and `n <= 4`.
pub fn chart_straightness(amb: &NormalFormAmbient, cross: CrossTerm) -> Result<ChartStraightness> {
    let n = amb.n();
    if n + 2 >= NUM_SLOTS {
        return Err(GeometryError::Range(format!("chart check needs n <= {}", NUM_SLOTS - 3)));
    }
    let mut map = [0usize; NUM_SLOTS];
    for (k, m) in map.iter_mut().enumerate() {
        *m = if k < n { k + 1 } else { k };
    }
    let t = RatFn::x(1);
    let rho = RatFn::x(n + 2);
    let d = n + 2;
    let mut g = vec![vec![RatFn::zero(); d]; d];
    g[0][0] = rho.scale_int(2);
    let c = match cross {
        CrossTerm::TDtDrho => t.clone(),
        CrossTerm::RhoDtDrho => rho.clone(),
    };
    g[0][d - 1] = c.clone();
    g[d - 1][0] = c;
    let t2 = t.mul(&t);
    for i in 0..n {
        for j in 0..n {
            let jet = &amb.family()[i][j];
            if !jet.is_exact() {
                return Err(GeometryError::Precondition("chart check needs an exact g_rho".into()));
            }
            let mut v = RatFn::zero();
            let mut rp = RatFn::one();
            for cf in jet.coeffs() {
                v = v.add(&cf.rename_slots(&map).mul(&rp));
                rp = rp.mul(&rho);
            }
            g[i + 1][j + 1] = t2.mul(&v).reduce();
        }
    }
    // t = 1 and rho = 1/7: off G, since the variant degenerates at rho = 0.
    let mut point = vec![Rat::from_integer(1.into())];
    point.extend(amb.base().base_point().iter().cloned());
    point.push(Rat::new(1.into(), 7.into()));
    let chart = ChartMetric::new(g, point)?;
    let tv = TensorField::from_fn(d, 1, 0, Symmetry::none(), |i| if i[0] == 0 { t.clone() } else { RatFn::zero() });
    let dt = chart::covariant_derivative(&chart, &tv)?;
    let id = TensorField::from_fn(d, 1, 1, Symmetry::none(), |i| if i[0] == i[1] { RatFn::one() } else { RatFn::zero() });
    let witness = chart::differing_indices(&dt, &id).first().map(|idx| {
        let label = |k: usize| match k {
            0 => "t".to_string(),
            k if k == d - 1 => "rho".to_string(),
            k => format!("x{k}"),
        };
        format!("(nabla T)^{}_{} = {}", label(idx[0]), label(idx[1]), dt.get(idx).reduce())
    });
    Ok(ChartStraightness { cross_term: cross, holds: witness.is_none(), witness })
}
