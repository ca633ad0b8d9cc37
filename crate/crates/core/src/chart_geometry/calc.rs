//! Covariant derivatives and the first- and second-order operators built on
//! them: trace, divergence, Killing operator, Laplacians.

use ambient_exact::{Rat, RatFn};

use super::ChartMetric;
use crate::error::{GeometryError, Result};
use crate::tensor::{multi_indices, Symmetry, TensorField};

fn check_dim(g: &ChartMetric, t: &TensorField) -> Result<()> {
    if t.dim() != g.dim() {
        return Err(GeometryError::Valence(format!("tensor dimension {} on a {}-dimensional chart", t.dim(), g.dim())));
    }
    Ok(())
}

fn expect_valence(t: &TensorField, v: (usize, usize), what: &str) -> Result<()> {
    if t.valence() != v {
        return Err(GeometryError::Valence(format!("{what} expects valence {v:?}, got {:?}", t.valence())));
    }
    Ok(())
}

/// `nabla T` with the derivative slot placed first among the covariant slots.
pub fn covariant_derivative(g: &ChartMetric, t: &TensorField) -> Result<TensorField> {
    check_dim(g, t)?;
    let n = g.dim();
    let (r, s) = t.valence();
    let gam = g.christoffel();
    let symmetry = Symmetry(
        t.symmetry()
            .0
            .iter()
            .map(|&(a, b)| (if a >= r { a + 1 } else { a }, if b >= r { b + 1 } else { b }))
            .collect(),
    );
    Ok(TensorField::from_fn(n, r, s + 1, symmetry, |idx| {
        let c = idx[r];
        let mut base: Vec<usize> = idx[..r].to_vec();
        base.extend_from_slice(&idx[r + 1..]);
        let mut acc = t.get(&base).derivative(c);
        let mut shifted = base.clone();
        for k in 0..r + s {
            let orig = base[k];
            for e in 0..n {
                let coeff = if k < r { gam.get(&[orig, c, e]) } else { gam.get(&[e, c, orig]) };
                if coeff.is_zero() {
                    continue;
                }
                shifted[k] = e;
                let v = t.get(&shifted);
                if !v.is_zero() {
                    acc = if k < r { acc.add(&coeff.mul(v)) } else { acc.sub(&coeff.mul(v)) };
                }
            }
            shifted[k] = orig;
        }
        acc
    }))
}

/// Contracts covariant slot pair `(a, b)` (positions within the full index
/// list) with the inverse metric.
pub fn metric_contract(g: &ChartMetric, t: &TensorField, a: usize, b: usize) -> Result<TensorField> {
    check_dim(g, t)?;
    let (r, s) = t.valence();
    if a < r || b < r || a == b || a >= r + s || b >= r + s {
        return Err(GeometryError::Valence("metric contraction needs two covariant slots".into()));
    }
    let n = g.dim();
    let keep: Vec<usize> = (0..r + s).filter(|&k| k != a && k != b).collect();
    Ok(TensorField::from_fn(n, r, s - 2, Symmetry::none(), |idx| {
        let mut full = vec![0; r + s];
        for (slot, &k) in keep.iter().enumerate() {
            full[k] = idx[slot];
        }
        let mut acc = RatFn::zero();
        for i in 0..n {
            for j in 0..n {
                let gi = g.ginv(i, j);
                if gi.is_zero() {
                    continue;
                }
                full[a] = i;
                full[b] = j;
                let v = t.get(&full);
                if !v.is_zero() {
                    acc = acc.add(&gi.mul(v));
                }
            }
        }
        acc
    }))
}

/// `tr_g sigma = g^{ij} sigma_ij`.
pub fn trace(g: &ChartMetric, sigma: &TensorField) -> Result<RatFn> {
    expect_valence(sigma, (0, 2), "trace")?;
    Ok(metric_contract(g, sigma, 0, 1)?.comps()[0].clone())
}

/// Trace-free part `sigma - (tr sigma / n) g`.
pub fn trace_free(g: &ChartMetric, sigma: &TensorField) -> Result<TensorField> {
    let tr = trace(g, sigma)?.scale(&Rat::new(1.into(), (g.dim() as i64).into()));
    sigma.sub(&g.metric().scale(&tr))
}

/// Divergence `(delta T)_{...} = -g^{jk} nabla_k T_{j...}` on a covariant tensor.
pub fn divergence(g: &ChartMetric, t: &TensorField) -> Result<TensorField> {
    let (r, s) = t.valence();
    if r != 0 || s == 0 {
        return Err(GeometryError::Valence("divergence expects a covariant tensor of rank >= 1".into()));
    }
    let d = covariant_derivative(g, t)?;
    let c = metric_contract(g, &d, 0, 1)?;
    let c = c.map(RatFn::neg);
    Ok(if s == 2 && t.symmetry().0.contains(&(0, 1)) { c } else { c.without_symmetry() })
}

/// Symmetrised gradient `(delta* tau)_ij = (nabla_i tau_j + nabla_j tau_i)/2`.
pub fn sym_gradient(g: &ChartMetric, tau: &TensorField) -> Result<TensorField> {
    expect_valence(tau, (0, 1), "symmetrised gradient")?;
    let d = covariant_derivative(g, tau)?;
    let half = Rat::new(1.into(), 2.into());
    Ok(TensorField::from_fn(g.dim(), 0, 2, Symmetry::pair(0, 1), |i| {
        d.get(&[i[0], i[1]]).add(d.get(&[i[1], i[0]])).scale(&half)
    }))
}

/// Killing operator `K xi = 2 nabla_(i xi_j)` on a 1-form.
pub fn killing(g: &ChartMetric, xi: &TensorField) -> Result<TensorField> {
    Ok(sym_gradient(g, xi)?.scale(&RatFn::from_int(2)))
}

/// Lowers a vector field to a 1-form.
pub fn lower(g: &ChartMetric, v: &TensorField) -> Result<TensorField> {
    expect_valence(v, (1, 0), "lower")?;
    let n = g.dim();
    Ok(TensorField::from_fn(n, 0, 1, Symmetry::none(), |i| {
        (0..n).fold(RatFn::zero(), |acc, j| acc.add(&g.g(i[0], j).mul(v.get(&[j]))))
    }))
}

/// Connection Laplacian `Delta T = -g^{ab} nabla_a nabla_b T` (non-negative).
pub fn laplacian(g: &ChartMetric, t: &TensorField) -> Result<TensorField> {
    check_dim(g, t)?;
    let (r, _) = t.valence();
    let d2 = covariant_derivative(g, &covariant_derivative(g, t)?)?;
    let c = metric_contract(g, &d2, r, r + 1)?.map(RatFn::neg);
    Ok(c.with_symmetry(t.symmetry().clone()))
}

/// Exterior derivative of a 1-form, `(d tau)_ij = d_i tau_j - d_j tau_i`.
pub fn exterior_d(g: &ChartMetric, tau: &TensorField) -> Result<TensorField> {
    expect_valence(tau, (0, 1), "exterior derivative")?;
    Ok(TensorField::from_fn(g.dim(), 0, 2, Symmetry::none(), |i| {
        tau.get(&[i[1]]).derivative(i[0]).sub(&tau.get(&[i[0]]).derivative(i[1]))
    }))
}

/// Hodge Laplacian `d delta + delta d` on 1-forms.
pub fn hodge_laplacian(g: &ChartMetric, tau: &TensorField) -> Result<TensorField> {
    expect_valence(tau, (0, 1), "Hodge Laplacian")?;
    let dt = divergence(g, tau)?.comps()[0].clone();
    let ddt = TensorField::from_fn(g.dim(), 0, 1, Symmetry::none(), |i| dt.derivative(i[0]));
    let dd = divergence(g, &exterior_d(g, tau)?)?;
    ddt.add(&dd)
}

/// `Ric(tau)_i = Ric_i^j tau_j`.
pub fn ricci_action_form(g: &ChartMetric, tau: &TensorField) -> Result<TensorField> {
    let n = g.dim();
    let ric = &g.curvature().ricci;
    Ok(TensorField::from_fn(n, 0, 1, Symmetry::none(), |i| {
        let mut acc = RatFn::zero();
        for j in 0..n {
            for k in 0..n {
                let gi = g.ginv(j, k);
                if !gi.is_zero() {
                    acc = acc.add(&ric.get(&[i[0], j]).mul(gi).mul(tau.get(&[k])));
                }
            }
        }
        acc
    }))
}

/// Raises both slots of a `(0,2)` tensor.
pub fn raise2(g: &ChartMetric, sigma: &TensorField) -> TensorField {
    let n = g.dim();
    TensorField::from_fn(n, 2, 0, sigma.symmetry().clone(), |i| {
        let mut acc = RatFn::zero();
        for k in 0..n {
            let a = g.ginv(i[0], k);
            if a.is_zero() {
                continue;
            }
            for l in 0..n {
                let b = g.ginv(i[1], l);
                if !b.is_zero() {
                    acc = acc.add(&a.mul(b).mul(sigma.get(&[k, l])));
                }
            }
        }
        acc
    })
}

/// `(Ric o sigma)_ij = (Ric_i^k sigma_kj + Ric_j^k sigma_ik) / 2`.
pub fn ricci_action(g: &ChartMetric, sigma: &TensorField) -> Result<TensorField> {
    expect_valence(sigma, (0, 2), "Ricci action")?;
    let n = g.dim();
    let ric = &g.curvature().ricci;
    // Ric_i^k = Ric_il g^{lk}
    let mixed: Vec<Vec<RatFn>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|k| (0..n).fold(RatFn::zero(), |acc, l| acc.add(&ric.get(&[i, l]).mul(g.ginv(l, k)))).reduce())
                .collect()
        })
        .collect();
    let half = Rat::new(1.into(), 2.into());
    Ok(TensorField::from_fn(n, 0, 2, Symmetry::pair(0, 1), |idx| {
        let (i, j) = (idx[0], idx[1]);
        let mut acc = RatFn::zero();
        for k in 0..n {
            acc = acc.add(&mixed[i][k].mul(sigma.get(&[k, j]))).add(&mixed[j][k].mul(sigma.get(&[i, k])));
        }
        acc.scale(&half)
    }))
}

/// Contraction of a `(0,4)` curvature-type tensor with `sigma`:
/// `(R o sigma)_ij = R_ikjl sigma^{kl}`.
pub fn curvature_action_with(g: &ChartMetric, r: &TensorField, sigma: &TensorField) -> Result<TensorField> {
    expect_valence(sigma, (0, 2), "curvature action")?;
    let n = g.dim();
    let up = raise2(g, sigma);
    Ok(TensorField::from_fn(n, 0, 2, Symmetry::pair(0, 1), |idx| {
        let (i, j) = (idx[0], idx[1]);
        let mut acc = RatFn::zero();
        for k in 0..n {
            for l in 0..n {
                let s = up.get(&[k, l]);
                if !s.is_zero() {
                    let v = r.get(&[i, k, j, l]);
                    if !v.is_zero() {
                        acc = acc.add(&v.mul(s));
                    }
                }
            }
        }
        acc
    }))
}

/// `R o sigma` for the Riemann tensor of `g`.
pub fn riemann_action(g: &ChartMetric, sigma: &TensorField) -> Result<TensorField> {
    curvature_action_with(g, &g.curvature().riemann, sigma)
}

/// Lichnerowicz Laplacian `Delta + 2 Ric o - 2 R o` on symmetric 2-tensors.
pub fn lichnerowicz(g: &ChartMetric, sigma: &TensorField) -> Result<TensorField> {
    expect_valence(sigma, (0, 2), "Lichnerowicz Laplacian")?;
    let n = g.dim();
    if let Some((i, j)) = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .find(|&(i, j)| !sigma.get(&[i, j]).equals(sigma.get(&[j, i])))
    {
        return Err(GeometryError::Valence(format!("tensor is not symmetric: components {}{} and {}{} differ", i + 1, j + 1, j + 1, i + 1)));
    }
    let sigma = sigma.clone().with_symmetry(Symmetry::pair(0, 1));
    let lap = laplacian(g, &sigma)?;
    let ric = ricci_action(g, &sigma)?;
    let rr = riemann_action(g, &sigma)?;
    let two = RatFn::from_int(2);
    lap.add(&ric.scale(&two))?.sub(&rr.scale(&two))
}

/// `Delta_L` on an Einstein metric with `P = lambda g` written through the
/// Weyl action: `Delta + 4 n lambda - 4 lambda g tr - 2 W o`.
pub fn lichnerowicz_einstein(g: &ChartMetric, lambda: &RatFn, sigma: &TensorField) -> Result<TensorField> {
    let w = super::weyl(g)?;
    let n = g.dim() as i64;
    let lap = laplacian(g, sigma)?;
    let wa = curvature_action_with(g, w, sigma)?;
    let tr = trace(g, sigma)?;
    let out = lap
        .add(&sigma.scale(&lambda.scale_int(4 * n)))?
        .sub(&g.metric().scale(&lambda.scale_int(4).mul(&tr)))?
        .sub(&wa.scale(&RatFn::from_int(2)))?;
    Ok(out.with_symmetry(Symmetry::pair(0, 1)))
}

/// Every single trace of a `(0,4)` tensor, as `(slot pair, contraction)`.
pub fn all_traces(g: &ChartMetric, t: &TensorField) -> Result<Vec<((usize, usize), TensorField)>> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in a + 1..4 {
            out.push(((a, b), metric_contract(g, t, a, b)?));
        }
    }
    Ok(out)
}

/// Whether `nabla g` vanishes identically.
pub fn metric_is_parallel(g: &ChartMetric) -> bool {
    covariant_derivative(g, g.metric()).map(|d| d.is_zero()).unwrap_or(false)
}

/// Substitutes the base point into each component, leaving `lambda` symbolic.
pub fn at_base_point(g: &ChartMetric, t: &TensorField) -> Result<TensorField> {
    let p = g.base_point().to_vec();
    t.map_components(|c| super::at_point(c, &p))
}

/// Components equal identically.
pub fn tensors_agree(a: &TensorField, b: &TensorField) -> bool {
    a.equals(b)
}

/// Lists all multi-indices `(i, j)` for which `a` and `b` differ.
pub fn differing_indices(a: &TensorField, b: &TensorField) -> Vec<Vec<usize>> {
    multi_indices(a.dim(), a.rank()).filter(|i| !a.get(i).equals(b.get(i))).collect()
}
