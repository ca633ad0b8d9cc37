//! Covariant calculus on the ambient space. Every operator works on stored
//! jets; the `t`-grading is handled by [`AmbientTensor::partial`] and by the
//! additivity of weights under contraction.

use ambient_exact::{Rat, RhoJet};

use super::{ri, AmbientTensor, NormalFormAmbient};
use crate::error::{GeometryError, Result};
use crate::tensor::{multi_indices, Symmetry};

fn check(amb: &NormalFormAmbient, t: &AmbientTensor) -> Result<()> {
    if t.n() != amb.n() {
        return Err(GeometryError::Valence(format!("ambient tensor over n = {} used with n = {}", t.n(), amb.n())));
    }
    Ok(())
}

fn expect(t: &AmbientTensor, v: (usize, usize), what: &str) -> Result<()> {
    if t.valence() != v {
        return Err(GeometryError::Valence(format!("{what} expects valence {v:?}, got {:?}", t.valence())));
    }
    Ok(())
}

fn half() -> Rat {
    Rat::new(1.into(), 2.into())
}

/// Symmetry pairs after inserting a new slot at position `at`.
fn shift_symmetry(s: &Symmetry, at: usize, by: usize) -> Symmetry {
    let f = |a: usize| if a >= at { a + by } else { a };
    Symmetry(s.0.iter().map(|&(a, b)| (f(a), f(b))).collect())
}

/// One component of `nabla_c X` at the index `idx` of `X`.
pub fn nabla_component(amb: &NormalFormAmbient, x: &AmbientTensor, c: usize, idx: &[usize]) -> Result<RhoJet> {
    let sp = amb.sparse_christoffel()?;
    let (r, s) = x.valence();
    let mut acc = x.partial(c, idx)?;
    let mut shifted = idx.to_vec();
    for k in 0..r + s {
        let orig = idx[k];
        // upper slot: + Gamma^A_{cE} X^{..E..}; lower slot: - Gamma^E_{cB} X_{..E..}
        let list = if k < r { &sp.by_upper[orig][c] } else { &sp.by_lower[c][orig] };
        for (e, g) in list {
            shifted[k] = *e;
            let v = x.get(&shifted);
            if !v.is_zero() {
                acc = if k < r { acc.add(&g.mul(v)) } else { acc.sub(&g.mul(v)) };
            }
        }
        shifted[k] = orig;
    }
    Ok(acc.reduce())
}

/// `nabla X`, derivative slot first among the covariant slots; the weight is
/// unchanged.
pub fn covariant_derivative(amb: &NormalFormAmbient, x: &AmbientTensor) -> Result<AmbientTensor> {
    check(amb, x)?;
    let (r, s) = x.valence();
    let sym = shift_symmetry(x.symmetry(), r, 1);
    AmbientTensor::try_from_fn(amb.n(), r, s + 1, x.weight().clone(), sym, |idx| {
        let mut base = idx[..r].to_vec();
        base.extend_from_slice(&idx[r + 1..]);
        nabla_component(amb, x, idx[r], &base)
    })
}

/// `nabla_T X`, i.e. `nabla X` with the derivative slot set to `0`.
pub fn nabla_t(amb: &NormalFormAmbient, x: &AmbientTensor) -> Result<AmbientTensor> {
    check(amb, x)?;
    let (r, s) = x.valence();
    AmbientTensor::try_from_fn(amb.n(), r, s, x.weight().clone(), x.symmetry().clone(), |idx| {
        nabla_component(amb, x, 0, idx)
    })
}

/// Contracts two covariant slots (positions in the full index list) with the
/// inverse metric. The weight drops by 2.
pub fn contract_metric(amb: &NormalFormAmbient, t: &AmbientTensor, a: usize, b: usize) -> Result<AmbientTensor> {
    check(amb, t)?;
    let (r, s) = t.valence();
    if a < r || b < r || a == b || a >= r + s || b >= r + s {
        return Err(GeometryError::Valence("metric contraction needs two covariant slots".into()));
    }
    let keep: Vec<usize> = (0..r + s).filter(|&k| k != a && k != b).collect();
    AmbientTensor::try_from_fn(amb.n(), r, s - 2, t.weight() - ri(2), Symmetry::none(), |idx| {
        let mut full = vec![0; r + s];
        for (slot, &k) in keep.iter().enumerate() {
            full[k] = idx[slot];
        }
        let mut acc = RhoJet::zero(RhoJet::EXACT);
        for (i, j, gi) in amb.inverse_entries() {
            full[a] = *i;
            full[b] = *j;
            let v = t.get(&full);
            if !v.is_zero() {
                acc = acc.add(&gi.mul(v));
            }
        }
        Ok(acc.reduce())
    })
}

/// `tr sigma = g^{IJ} sigma_IJ` as a scalar of weight `w - 2`.
pub fn trace(amb: &NormalFormAmbient, sigma: &AmbientTensor) -> Result<AmbientTensor> {
    expect(sigma, (0, 2), "trace")?;
    contract_metric(amb, sigma, 0, 1)
}

/// `T ⌟ X` on the first covariant slot. Since `T = t d_t`, the stored jets are
/// those with first covariant index `0` and the weight is unchanged.
pub fn t_contract(x: &AmbientTensor) -> Result<AmbientTensor> {
    let (r, s) = x.valence();
    if s == 0 {
        return Err(GeometryError::Valence("T-contraction needs a covariant slot".into()));
    }
    Ok(AmbientTensor::from_fn(x.n(), r, s - 1, x.weight().clone(), Symmetry::none(), |idx| {
        let mut full = idx[..r].to_vec();
        full.push(0);
        full.extend_from_slice(&idx[r..]);
        x.get(&full).clone()
    }))
}

/// `(delta X)_{...} = -g^{AB} nabla_A X_{B...}`, weight `w - 2`.
pub fn divergence(amb: &NormalFormAmbient, x: &AmbientTensor) -> Result<AmbientTensor> {
    let (r, s) = x.valence();
    if r != 0 || s == 0 {
        return Err(GeometryError::Valence("divergence expects a covariant tensor of rank >= 1".into()));
    }
    let d = covariant_derivative(amb, x)?;
    Ok(contract_metric(amb, &d, 0, 1)?.map(RhoJet::neg))
}

/// Symmetrised gradient `(nabla_A tau_B + nabla_B tau_A)/2`.
pub fn sym_gradient(amb: &NormalFormAmbient, tau: &AmbientTensor) -> Result<AmbientTensor> {
    expect(tau, (0, 1), "symmetrised gradient")?;
    let d = covariant_derivative(amb, tau)?;
    Ok(AmbientTensor::from_fn(amb.n(), 0, 2, tau.weight().clone(), Symmetry::pair(0, 1), |i| {
        d.get(&[i[0], i[1]]).add(d.get(&[i[1], i[0]])).scale_rat(&half()).reduce()
    }))
}

/// Killing operator `2 nabla_(A tau_B)`.
pub fn killing(amb: &NormalFormAmbient, tau: &AmbientTensor) -> Result<AmbientTensor> {
    Ok(sym_gradient(amb, tau)?.scale_rat(&ri(2)))
}

/// Connection Laplacian `-g^{AB} nabla_A nabla_B X`, weight `w - 2`. Second
/// derivatives are only formed where the inverse metric is non-zero.
pub fn laplacian(amb: &NormalFormAmbient, x: &AmbientTensor) -> Result<AmbientTensor> {
    check(amb, x)?;
    let (r, s) = x.valence();
    let y = covariant_derivative(amb, x)?;
    AmbientTensor::try_from_fn(amb.n(), r, s, x.weight() - ri(2), x.symmetry().clone(), |idx| {
        let mut acc = RhoJet::zero(RhoJet::EXACT);
        let mut yi = idx[..r].to_vec();
        yi.push(0);
        yi.extend_from_slice(&idx[r..]);
        for (a, b, gi) in amb.inverse_entries() {
            yi[r] = *b;
            acc = acc.sub(&gi.mul(&nabla_component(amb, &y, *a, &yi)?));
        }
        Ok(acc.reduce())
    })
}

/// Graded differential of a scalar.
pub fn gradient(s: &AmbientTensor) -> Result<AmbientTensor> {
    expect(s, (0, 0), "gradient")?;
    AmbientTensor::try_from_fn(s.n(), 0, 1, s.weight().clone(), Symmetry::none(), |i| s.partial(i[0], &[]))
}

/// `(d tau)_AB = d_A tau_B - d_B tau_A`.
pub fn exterior_d(tau: &AmbientTensor) -> Result<AmbientTensor> {
    expect(tau, (0, 1), "exterior derivative")?;
    AmbientTensor::try_from_fn(tau.n(), 0, 2, tau.weight().clone(), Symmetry::none(), |i| {
        Ok(tau.partial(i[0], &[i[1]])?.sub(&tau.partial(i[1], &[i[0]])?).reduce())
    })
}

/// Hodge Laplacian `d delta + delta d` on 1-forms.
pub fn hodge_laplacian(amb: &NormalFormAmbient, tau: &AmbientTensor) -> Result<AmbientTensor> {
    expect(tau, (0, 1), "Hodge Laplacian")?;
    let dd = gradient(&divergence(amb, tau)?)?;
    dd.add(&divergence(amb, &exterior_d(tau)?)?)
}

/// `Ric_A^B` with the weight `-2` of a raised index.
fn mixed_ricci(amb: &NormalFormAmbient) -> Result<Vec<Vec<RhoJet>>> {
    let ric = amb.ricci()?;
    let d = amb.dim();
    let mut out = vec![vec![RhoJet::zero(RhoJet::EXACT); d]; d];
    for (l, k, gi) in amb.inverse_entries() {
        for (i, row) in out.iter_mut().enumerate() {
            let v = ric.get(&[i, *l]);
            if !v.is_zero() {
                row[*k] = row[*k].add(&v.mul(gi)).reduce();
            }
        }
    }
    Ok(out)
}

/// `Ric(tau)_A = Ric_A^B tau_B`, weight `w - 2`.
pub fn ricci_action_form(amb: &NormalFormAmbient, tau: &AmbientTensor) -> Result<AmbientTensor> {
    expect(tau, (0, 1), "Ricci action")?;
    let m = mixed_ricci(amb)?;
    let d = amb.dim();
    Ok(AmbientTensor::from_fn(amb.n(), 0, 1, tau.weight() - ri(2), Symmetry::none(), |i| {
        (0..d).fold(RhoJet::zero(RhoJet::EXACT), |acc, k| acc.add(&m[i[0]][k].mul(tau.get(&[k])))).reduce()
    }))
}

/// `(Ric o sigma)_IJ = (Ric_I^K sigma_KJ + Ric_J^K sigma_IK)/2`.
pub fn ricci_action(amb: &NormalFormAmbient, sigma: &AmbientTensor) -> Result<AmbientTensor> {
    expect(sigma, (0, 2), "Ricci action")?;
    let m = mixed_ricci(amb)?;
    let d = amb.dim();
    Ok(AmbientTensor::from_fn(amb.n(), 0, 2, sigma.weight() - ri(2), Symmetry::pair(0, 1), |idx| {
        let (i, j) = (idx[0], idx[1]);
        let mut acc = RhoJet::zero(RhoJet::EXACT);
        for k in 0..d {
            acc = acc.add(&m[i][k].mul(sigma.get(&[k, j]))).add(&m[j][k].mul(sigma.get(&[i, k])));
        }
        acc.scale_rat(&half()).reduce()
    }))
}

/// Raises both slots of a `(0,2)` tensor (weight drops by 4).
pub fn raise2(amb: &NormalFormAmbient, sigma: &AmbientTensor) -> Result<AmbientTensor> {
    expect(sigma, (0, 2), "raise")?;
    let inv = amb.inverse_entries();
    let mut out = AmbientTensor::zeros(amb.n(), 2, 0, sigma.weight() - ri(4), Symmetry::none());
    for idx in multi_indices(amb.dim(), 2) {
        let mut acc = RhoJet::zero(RhoJet::EXACT);
        for (_, k, a) in inv.iter().filter(|e| e.0 == idx[0]) {
            for (_, l, b) in inv.iter().filter(|e| e.0 == idx[1]) {
                let v = sigma.get(&[*k, *l]);
                if !v.is_zero() {
                    acc = acc.add(&a.mul(b).mul(v));
                }
            }
        }
        out.set(&idx, acc.reduce());
    }
    Ok(out.with_symmetry(sigma.symmetry().clone()))
}

/// `(R o sigma)_IJ = R_IKJL sigma^{KL}`, weight `w - 2`.
pub fn riemann_action(amb: &NormalFormAmbient, sigma: &AmbientTensor) -> Result<AmbientTensor> {
    let up = raise2(amb, sigma)?;
    let riem = amb.riemann()?;
    let d = amb.dim();
    let nz: Vec<(usize, usize, &RhoJet)> = multi_indices(d, 2)
        .filter_map(|kl| {
            let v = up.get(&kl);
            (!v.is_zero()).then_some((kl[0], kl[1], v))
        })
        .collect();
    Ok(AmbientTensor::from_fn(amb.n(), 0, 2, sigma.weight() - ri(2), Symmetry::pair(0, 1), |idx| {
        let mut acc = RhoJet::zero(RhoJet::EXACT);
        for (k, l, s) in &nz {
            let v = riem.get(&[idx[0], *k, idx[1], *l]);
            if !v.is_zero() {
                acc = acc.add(&v.mul(s));
            }
        }
        acc.reduce()
    }))
}

/// Lichnerowicz Laplacian `Delta + 2 Ric o - 2 R o` on symmetric 2-tensors.
pub fn lichnerowicz(amb: &NormalFormAmbient, sigma: &AmbientTensor) -> Result<AmbientTensor> {
    expect(sigma, (0, 2), "Lichnerowicz Laplacian")?;
    let d = amb.dim();
    for i in 0..d {
        for j in i + 1..d {
            if !sigma.get(&[i, j]).equals_through(sigma.get(&[j, i])) {
                return Err(GeometryError::Valence(format!(
                    "tensor is not symmetric in components {}",
                    AmbientTensor::index_label(amb.n(), &[i, j])
                )));
            }
        }
    }
    let sigma = sigma.clone().with_symmetry(Symmetry::pair(0, 1));
    let lap = laplacian(amb, &sigma)?;
    let ric = ricci_action(amb, &sigma)?;
    let rr = riemann_action(amb, &sigma)?;
    lap.add(&ric.scale_rat(&ri(2)))?.sub(&rr.scale_rat(&ri(2)))
}

/// `r^m X`: the stored jet gains `(2 rho)^m` and the weight rises by `2m`.
pub fn mul_r(x: &AmbientTensor, m: usize) -> AmbientTensor {
    let c = ri(2).pow(m as i32);
    x.mul_rho_pow(m).scale_rat(&c).with_weight(x.weight() + ri(2 * m as i64))
}

/// Product with a scalar; weights add.
pub fn mul_scalar(f: &AmbientTensor, x: &AmbientTensor) -> Result<AmbientTensor> {
    expect(f, (0, 0), "scalar product")?;
    let c = f.get(&[]).clone();
    Ok(x.scale_jet(&c).with_weight(x.weight() + f.weight()))
}

/// Tensor product `a ⊗ b` of covariant tensors; weights add.
pub fn outer(a: &AmbientTensor, b: &AmbientTensor) -> Result<AmbientTensor> {
    if a.valence().0 != 0 || b.valence().0 != 0 || a.n() != b.n() {
        return Err(GeometryError::Valence("outer product expects covariant tensors on one space".into()));
    }
    let (ra, rb) = (a.rank(), b.rank());
    Ok(AmbientTensor::from_fn(a.n(), 0, ra + rb, a.weight() + b.weight(), Symmetry::none(), |idx| {
        a.get(&idx[..ra]).mul(b.get(&idx[ra..])).reduce()
    }))
}

/// `a_I b_J + a_J b_I` for 1-forms.
pub fn sym_product(a: &AmbientTensor, b: &AmbientTensor) -> Result<AmbientTensor> {
    expect(a, (0, 1), "symmetric product")?;
    expect(b, (0, 1), "symmetric product")?;
    Ok(AmbientTensor::from_fn(a.n(), 0, 2, a.weight() + b.weight(), Symmetry::pair(0, 1), |i| {
        a.get(&[i[0]]).mul(b.get(&[i[1]])).add(&a.get(&[i[1]]).mul(b.get(&[i[0]]))).reduce()
    }))
}

/// Dilation field `T^I` (weight 0): `t d_t`.
pub fn t_vector(n: usize) -> AmbientTensor {
    AmbientTensor::from_fn(n, 1, 0, ri(0), Symmetry::none(), |i| {
        if i[0] == 0 {
            RhoJet::one()
        } else {
            RhoJet::zero(RhoJet::EXACT)
        }
    })
}

/// `T_I = g_IJ T^J` (weight 2): `2 rho t dt + t drho`.
pub fn t_lower(n: usize) -> AmbientTensor {
    AmbientTensor::from_fn(n, 0, 1, ri(2), Symmetry::none(), |i| match i[0] {
        0 => RhoJet::rho().scale_rat(&ri(2)),
        k if k == n + 1 => RhoJet::one(),
        _ => RhoJet::zero(RhoJet::EXACT),
    })
}

/// Defining function `r = |T|^2 = 2 rho t^2` (weight 2).
pub fn r_field(n: usize) -> AmbientTensor {
    AmbientTensor::scalar(n, ri(2), RhoJet::rho().scale_rat(&ri(2)))
}

/// Identity endomorphism `delta^I_J`.
pub fn identity(n: usize) -> AmbientTensor {
    AmbientTensor::from_fn(n, 1, 1, ri(0), Symmetry::none(), |i| {
        if i[0] == i[1] {
            RhoJet::one()
        } else {
            RhoJet::zero(RhoJet::EXACT)
        }
    })
}
