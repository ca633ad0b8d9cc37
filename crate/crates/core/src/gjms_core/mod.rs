//! GJMS operators on trace-free symmetric 2-tensors via the ambient
//! Lichnerowicz Laplacian.

mod harmonic;
mod lift;
mod obstruction;
mod sl2;

use ambient_exact::Rat;

use crate::ambient_geometry::{
    lichnerowicz, restrict_g, restrict_tm, AmbientTensor, NormalFormAmbient, OrderKind, OrderVerdict, WeightedTensor,
};
use crate::chart_geometry::trace_free;
use crate::error::{GeometryError, Result};
use crate::tensor::TensorField;

pub use harmonic::*;
pub use lift::*;
pub use obstruction::*;
pub use sl2::*;

pub(crate) fn ri(v: i64) -> Rat {
    Rat::from_integer(v.into())
}

/// `y^k` applied to an ambient symmetric 2-tensor.
pub fn lichnerowicz_power(amb: &NormalFormAmbient, sigma: &AmbientTensor, k: usize) -> Result<AmbientTensor> {
    (0..k).try_fold(sigma.clone(), |s, _| lichnerowicz(amb, &s))
}

/// Both routes to `P_k phi` and their comparison.
#[derive(Clone, Debug)]
pub struct PkResult {
    pub k: usize,
    /// `P_k phi` on the base with weight `-n/2 + 2 - k`.
    pub value: WeightedTensor,
    /// `Lichnerowicz^k sigma|_G` for the lift.
    pub direct: AmbientTensor,
    /// `4^(k-1) (k-1)!^2` times the harmonic-extension obstruction.
    pub via_obstruction: AmbientTensor,
    pub routes_agree: bool,
    pub trace_free_applied: bool,
    pub lift: LiftResult,
    /// Orders of the output (trace, `T` contraction, divergence), compared
    /// with the thresholds for weight `-n/2 + 2 - k`.
    pub output_certificates: Vec<OrderVerdict>,
}

/// Whether `(n, k)` is in the supported range.
pub fn check_range(n: usize, k: usize) -> Result<()> {
    if n < 3 {
        return Err(GeometryError::DimensionTooSmall { dim: n, what: "GJMS operators" });
    }
    if k == 0 || (n % 2 == 0 && k > n / 2) || (n % 2 == 1 && k > 3) {
        return Err(GeometryError::Range(format!("k = {k} is not supported for n = {n}")));
    }
    Ok(())
}

/// Inverse-metric order that suffices for `P_k` on an exact normal form.
pub fn required_order(n: usize, k: usize) -> usize {
    2 * k + 2 * lift_target(n, k) + 3
}

/// `P_k phi = tf_g(Lichnerowicz^k sigma|_TM)` for the ambient lift `sigma`,
/// cross-checked against the harmonic-extension obstruction.
pub fn gjms_pk(amb: &NormalFormAmbient, phi: &TensorField, k: usize) -> Result<PkResult> {
    let n = amb.n();
    check_range(n, k)?;
    let lift = ambient_lift(amb, phi, k, LiftOptions::default())?;
    let top = lichnerowicz_power(amb, &lift.sigma, k)?;
    if top.order() == 0 {
        return Err(GeometryError::Truncation { needed: 1, available: 0 });
    }
    let direct = restrict_g(&top);
    let ext = harmonic_extend(amb, &lift, k)?;
    let via_obstruction = ext.obstruction.scale_rat(&obstruction_constant(k));
    let routes_agree = direct.equals_through(&via_obstruction);
    let mut value = restrict_tm(&direct)?;
    let critical = n % 2 == 0 && k == n / 2;
    if critical {
        value.tensor = trace_free(amb.base(), &value.tensor)?.map(|c| c.reduce());
    }
    let output_certificates = output_orders(amb, &top, n, k)?;
    Ok(PkResult { k, value, direct, via_obstruction, routes_agree, trace_free_applied: critical, lift, output_certificates })
}

/// Mapping-property clauses for `Lichnerowicz^k sigma` at weight
/// `w = -n/2 + 2 - k`: trace `O(r^c)` and divergence `O^-(r^c)` with
/// `c = ceil((n - 2 + w)/2)`, and `T ⌟ = O^-(r^(c+1))`.
fn output_orders(amb: &NormalFormAmbient, top: &AmbientTensor, n: usize, k: usize) -> Result<Vec<OrderVerdict>> {
    use crate::ambient_geometry::{divergence, order_predicate, t_contract, trace};
    // n - 2 + w = n/2 - k; ceil of half, clamped at 0
    let c = if n >= 2 * k { (n - 2 * k).div_ceil(4) } else { 0 };
    let base = amb.base();
    let mut out = Vec::new();
    let avail = top.order();
    let tr = trace(amb, top)?;
    let tc = t_contract(top)?;
    let dv = divergence(amb, top)?;
    for (t, kind, m) in [(&tr, OrderKind::Plain, c), (&tc, OrderKind::Minus, c + 1), (&dv, OrderKind::Minus, c)] {
        if m <= avail {
            out.push(order_predicate(t, base, kind, m)?);
        }
    }
    Ok(out)
}
