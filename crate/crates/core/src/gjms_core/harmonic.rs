//! Harmonic extension of an ambient lift and the obstruction it meets at
//! order `k`.

use ambient_exact::{Rat, RhoJet};

use super::{ri, LiftResult};
use crate::ambient_geometry::{lichnerowicz, lift_err, mul_r, order_predicate, AmbientTensor, NormalFormAmbient, OrderKind};
use crate::error::{GeometryError, Result};
use crate::tensor::Symmetry;

#[derive(Clone, Debug)]
pub struct HarmonicExtension {
    pub sigma: AmbientTensor,
    pub k: usize,
    /// `(r^(1-k) Lichnerowicz sigma)|_G`, stored to order 1.
    pub obstruction: AmbientTensor,
}

/// `(r^(-m) X)|_G` as a `rho`-independent tensor of weight `w - 2m`; the
/// extension used for the correction terms.
pub fn leading_coefficient(x: &AmbientTensor, m: usize) -> Result<AmbientTensor> {
    let scale = Rat::new(1.into(), ri(2).pow(m as i32).to_integer());
    let lead = x.try_map(|j| {
        let c = j.coeff(m).map_err(lift_err)?;
        Ok(RhoJet::constant(c.scale(&scale).reduce()))
    })?;
    Ok(lead.with_weight(x.weight() - ri(2 * m as i64)))
}

/// `sigma_(m) = sigma_(m-1) + r^m sigma_1` with
/// `sigma_1 = -(4 m (m - k))^(-1) (r^(1-m) Lichnerowicz sigma_(m-1))|_G`,
/// for `m = 1..k-1`.
pub fn harmonic_extend(amb: &NormalFormAmbient, lift: &LiftResult, k: usize) -> Result<HarmonicExtension> {
    if k == 0 || k != lift.k {
        return Err(GeometryError::Range(format!("harmonic extension for k = {k} of a lift built for k = {}", lift.k)));
    }
    let mut sigma = lift.sigma.clone();
    let kk = k as i64;
    for m in 1..k {
        let lap = lichnerowicz(amb, &sigma)?;
        let v = order_predicate(&lap, amb.base(), OrderKind::Plain, m - 1)?;
        if !v.holds {
            return Err(GeometryError::Precondition(format!("Lichnerowicz Laplacian is not O(r^{}) at step {m}", m - 1)));
        }
        let f = leading_coefficient(&lap, m - 1)?;
        let mm = m as i64;
        let s1 = f.scale_rat(&(ri(-1) / ri(4 * mm * (mm - kk))));
        sigma = sigma.add(&mul_r(&s1, m))?.with_symmetry(Symmetry::pair(0, 1));
    }
    let lap = lichnerowicz(amb, &sigma)?;
    let v = order_predicate(&lap, amb.base(), OrderKind::Plain, k - 1)?;
    if !v.holds {
        return Err(GeometryError::Precondition(format!("Lichnerowicz Laplacian is not O(r^{}): {:?}", k - 1, v.witness)));
    }
    let obstruction = leading_coefficient(&lap, k - 1)?.truncate(1);
    Ok(HarmonicExtension { sigma, k, obstruction })
}

/// `4^(k-1) (k-1)!^2`.
pub fn obstruction_constant(k: usize) -> Rat {
    let fact: i64 = (1..k as i64).product();
    ri(4).pow(k as i32 - 1) * ri(fact * fact)
}
