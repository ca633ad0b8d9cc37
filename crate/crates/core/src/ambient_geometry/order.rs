//! Vanishing-order predicates in `r` and restriction to the base.

use ambient_exact::{Rat, RatFn, RhoJet};
use serde::Serialize;

use super::{lift_err, ri, AmbientTensor};
use crate::chart_geometry::ChartMetric;
use crate::error::{GeometryError, Result};
use crate::tensor::{multi_indices, Symmetry, TensorField};

/// Which flavour of `O(r^m)` to test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OrderKind {
    /// Every component vanishes to order `m`.
    Plain,
    /// 1-forms: `O(r^(m-1))`, and the `r^(m-1)` coefficient is a multiple of
    /// `T ⌟ g`.
    Minus,
    /// Symmetric 2-tensors: `O(r^m)`, `T ⌟ sigma = O^-(r^(m+1))`, and the
    /// leading coefficient restricted to `TM` is trace-free.
    Plus,
}

/// A violated clause: the component, the power of `rho` and its coefficient.
#[derive(Clone, Debug, Serialize)]
pub struct OrderWitness {
    pub component: String,
    pub power: usize,
    pub coefficient: String,
    pub clause: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderVerdict {
    pub kind: OrderKind,
    pub m: usize,
    pub holds: bool,
    pub witness: Option<OrderWitness>,
}

fn need(t: &AmbientTensor, m: usize) -> Result<()> {
    if t.order() < m {
        return Err(GeometryError::Truncation { needed: m, available: t.order() });
    }
    Ok(())
}

fn plain_witness(t: &AmbientTensor, m: usize) -> Result<Option<OrderWitness>> {
    need(t, m)?;
    for idx in multi_indices(t.dim(), t.rank()) {
        let j = t.get(&idx);
        for p in 0..m.min(j.coeffs().len()) {
            let c = j.coeff(p).map_err(lift_err)?;
            if !c.is_zero() {
                return Ok(Some(OrderWitness {
                    component: AmbientTensor::index_label(t.n(), &idx),
                    power: p,
                    coefficient: c.to_string(),
                    clause: "O(r^m)",
                }));
            }
        }
    }
    Ok(None)
}

fn minus_witness(t: &AmbientTensor, m: usize) -> Result<Option<OrderWitness>> {
    if t.valence() != (0, 1) {
        return Err(GeometryError::Valence("O^- is defined for 1-forms".into()));
    }
    if m == 0 {
        return Ok(None);
    }
    if let Some(w) = plain_witness(t, m - 1)? {
        return Ok(Some(w));
    }
    need(t, m)?;
    for i in 0..=t.n() {
        let c = t.get(&[i]).coeff(m - 1).map_err(lift_err)?;
        if !c.is_zero() {
            return Ok(Some(OrderWitness {
                component: AmbientTensor::index_label(t.n(), &[i]),
                power: m - 1,
                coefficient: c.to_string(),
                clause: "leading coefficient tangent to G",
            }));
        }
    }
    Ok(None)
}

fn plus_witness(t: &AmbientTensor, base: &ChartMetric, m: usize) -> Result<Option<OrderWitness>> {
    if t.valence() != (0, 2) {
        return Err(GeometryError::Valence("O^+ is defined for symmetric 2-tensors".into()));
    }
    if let Some(w) = plain_witness(t, m)? {
        return Ok(Some(w));
    }
    if let Some(mut w) = minus_witness(&super::t_contract(t)?, m + 1)? {
        w.clause = "T-contraction O^-(r^(m+1))";
        return Ok(Some(w));
    }
    let lead = rho_coefficient_tm(t, m)?;
    let n = base.dim();
    let mut tr = RatFn::zero();
    for i in 0..n {
        for j in 0..n {
            tr = tr.add(&base.ginv(i, j).mul(lead.get(&[i, j])));
        }
    }
    let tr = tr.reduce();
    if !tr.is_zero() {
        return Ok(Some(OrderWitness {
            component: "trace".into(),
            power: m,
            coefficient: tr.to_string(),
            clause: "leading coefficient trace-free",
        }));
    }
    Ok(None)
}

/// Tests `t = O(r^m)`, `O^-(r^m)` or `O^+(r^m)`. Fails with a truncation error
/// when the jets do not carry enough coefficients to decide.
pub fn order_predicate(t: &AmbientTensor, base: &ChartMetric, kind: OrderKind, m: usize) -> Result<OrderVerdict> {
    let witness = match kind {
        OrderKind::Plain => plain_witness(t, m)?,
        OrderKind::Minus => minus_witness(t, m)?,
        OrderKind::Plus => plus_witness(t, base, m)?,
    };
    Ok(OrderVerdict { kind, m, holds: witness.is_none(), witness })
}

/// `[rho^m] sigma_ij / 2^m`, i.e. `(r^(-m) sigma)|_TM` when it makes sense.
fn rho_coefficient_tm(t: &AmbientTensor, m: usize) -> Result<TensorField> {
    let n = t.n();
    let scale = Rat::new(1.into(), ri(2).pow(m as i32).to_integer());
    TensorField::try_from_fn(n, 0, 2, Symmetry::pair(0, 1), |idx| {
        Ok(t.get(&[idx[0] + 1, idx[1] + 1]).coeff(m).map_err(lift_err)?.scale(&scale).reduce())
    })
}

/// Restriction to `G` (`rho = 0`): all components, truncated to order 1.
pub fn restrict_g(t: &AmbientTensor) -> AmbientTensor {
    t.truncate(1)
}

/// A weighted base tensor: components on `M` and the conformal weight.
#[derive(Clone, Debug)]
pub struct WeightedTensor {
    pub tensor: TensorField,
    pub weight: Rat,
}

/// `sigma|_TM` for a covariant tensor whose contractions with `T` vanish on
/// `G`. The precondition failure names the offending component.
pub fn restrict_tm(t: &AmbientTensor) -> Result<WeightedTensor> {
    let (r, s) = t.valence();
    if r != 0 {
        return Err(GeometryError::Valence("restriction to TM expects a covariant tensor".into()));
    }
    let n = t.n();
    for idx in multi_indices(t.dim(), s) {
        if idx.contains(&0) && !idx.contains(&(n + 1)) {
            let c = t.get(&idx).coeff(0).map_err(lift_err)?;
            if !c.is_zero() {
                return Err(GeometryError::Precondition(format!(
                    "T-contraction does not vanish on G: component {} is {}",
                    AmbientTensor::index_label(n, &idx),
                    c
                )));
            }
        }
    }
    let tensor = TensorField::try_from_fn(n, 0, s, t.symmetry().clone(), |idx| {
        let full: Vec<usize> = idx.iter().map(|i| i + 1).collect();
        t.get(&full).coeff(0).map_err(lift_err)
    })?;
    Ok(WeightedTensor { tensor, weight: t.weight().clone() })
}

/// `(r^(-m) sigma)|_TM` for `sigma = O(r^m)`.
pub fn restrict_tm_scaled(t: &AmbientTensor, m: usize) -> Result<WeightedTensor> {
    if let Some(w) = plain_witness(t, m)? {
        return Err(GeometryError::Precondition(format!("tensor is not O(r^{m}): component {} has {}", w.component, w.coefficient)));
    }
    let shifted = t.try_map(|j| j.shift_down(m).map_err(lift_err))?;
    let scaled = shifted.scale_rat(&Rat::new(1.into(), ri(2).pow(m as i32).to_integer())).with_weight(t.weight() - ri(2 * m as i64));
    restrict_tm(&scaled)
}

/// A base-independent jet from a base tensor: the `ij` block carries `phi`,
/// every other component is zero.
pub fn extend_constant(phi: &TensorField, weight: Rat) -> Result<AmbientTensor> {
    if phi.valence().0 != 0 {
        return Err(GeometryError::Valence("extension expects a covariant tensor".into()));
    }
    let n = phi.dim();
    Ok(AmbientTensor::from_fn(n, 0, phi.rank(), weight, phi.symmetry().clone(), |idx| {
        if idx.iter().all(|&i| (1..=n).contains(&i)) {
            let base: Vec<usize> = idx.iter().map(|i| i - 1).collect();
            RhoJet::constant(phi.get(&base).clone())
        } else {
            RhoJet::zero(RhoJet::EXACT)
        }
    }))
}
