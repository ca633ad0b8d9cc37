//! Normal-form ambient metrics `2 rho dt^2 + 2 t dt drho + t^2 g_rho`, their
//! Levi-Civita connection and curvature.

use std::sync::OnceLock;

use ambient_exact::{Rat, RatFn, RhoJet};

use super::{lift_err, ri, AmbientTensor};
use crate::chart_geometry::{ChartMetric, SpaceForm};
use crate::error::{GeometryError, Result};
use crate::tensor::{multi_indices, Symmetry};

/// Non-zero Christoffel symbols for sparse contraction:
/// `by_upper[k][i]` lists `(j, Gamma^k_ij)` and `by_lower[i][j]` lists
/// `(k, Gamma^k_ij)`.
#[derive(Clone, Debug)]
pub struct SparseChristoffel {
    pub by_upper: Vec<Vec<Vec<(usize, RhoJet)>>>,
    pub by_lower: Vec<Vec<Vec<(usize, RhoJet)>>>,
}

/// A normal-form ambient metric with truncated inverse.
#[derive(Debug)]
pub struct NormalFormAmbient {
    base: ChartMetric,
    lambda: Option<RatFn>,
    family: Vec<Vec<RhoJet>>,
    order: usize,
    metric: AmbientTensor,
    inverse: AmbientTensor,
    inverse_nz: Vec<(usize, usize, RhoJet)>,
    christoffel: OnceLock<Result<(AmbientTensor, SparseChristoffel)>>,
    riemann: OnceLock<Result<AmbientTensor>>,
    ricci: OnceLock<Result<AmbientTensor>>,
}

fn matrix_jet_inverse(family: &[Vec<RhoJet>], base_inv: &[Vec<RatFn>], order: usize) -> Vec<Vec<RhoJet>> {
    // (g + E)^{-1} = sum_k (-g^{-1} E)^k g^{-1}, with E = O(rho).
    let n = family.len();
    let ginv: Vec<Vec<RhoJet>> =
        base_inv.iter().map(|r| r.iter().map(|c| RhoJet::constant(c.clone()).truncate(order)).collect()).collect();
    let e: Vec<Vec<RhoJet>> = family
        .iter()
        .map(|r| r.iter().map(|j| j.sub(&RhoJet::constant(j.coeffs().first().cloned().unwrap_or_else(RatFn::zero))).truncate(order)).collect())
        .collect();
    let matmul = |a: &Vec<Vec<RhoJet>>, b: &Vec<Vec<RhoJet>>| -> Vec<Vec<RhoJet>> {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).fold(RhoJet::zero(RhoJet::EXACT), |acc, k| acc.add(&a[i][k].mul(&b[k][j]))).reduce())
                    .collect()
            })
            .collect()
    };
    let neg_ge: Vec<Vec<RhoJet>> = matmul(&ginv, &e).into_iter().map(|r| r.into_iter().map(|j| j.neg()).collect()).collect();
    let mut term = ginv.clone();
    let mut acc = ginv;
    for _ in 1..order.max(1) {
        term = matmul(&neg_ge, &term);
        if term.iter().all(|r| r.iter().all(RhoJet::is_zero)) {
            break;
        }
        for i in 0..n {
            for j in 0..n {
                acc[i][j] = acc[i][j].add(&term[i][j]).reduce();
            }
        }
    }
    acc.into_iter().map(|r| r.into_iter().map(|j| j.truncate(order)).collect()).collect()
}

impl NormalFormAmbient {
    /// General normal form from `g_rho = sum_j rho^j h_j` with `h_0 = g`; the
    /// inverse metric is known modulo `rho^order`.
    pub fn from_family(base: &ChartMetric, coeffs: &[Vec<Vec<RatFn>>], order: usize) -> Result<NormalFormAmbient> {
        let n = base.dim();
        if coeffs.is_empty() || coeffs.iter().any(|h| h.len() != n || h.iter().any(|r| r.len() != n)) {
            return Err(GeometryError::Valence("family coefficients must be n x n matrices".into()));
        }
        for i in 0..n {
            for j in 0..n {
                if !coeffs[0][i][j].equals(base.g(i, j)) {
                    return Err(GeometryError::Precondition("g_rho at rho = 0 must equal g".into()));
                }
                if coeffs.iter().any(|h| !h[i][j].equals(&h[j][i])) {
                    return Err(GeometryError::Valence("family must be symmetric".into()));
                }
            }
        }
        let family: Vec<Vec<RhoJet>> = (0..n)
            .map(|i| (0..n).map(|j| RhoJet::exact(coeffs.iter().map(|h| h[i][j].clone()).collect())).collect())
            .collect();
        let base_inv: Vec<Vec<RatFn>> = (0..n).map(|i| (0..n).map(|j| base.ginv(i, j).clone()).collect()).collect();
        let inv = matrix_jet_inverse(&family, &base_inv, order);
        Ok(NormalFormAmbient::assemble(base.clone(), None, family, inv, order))
    }

    /// The Ricci-flat ambient metric `g_rho = (1 + lambda rho)^2 g` of an
    /// Einstein metric with `P = lambda g`.
    pub fn einstein(base: &ChartMetric, lambda: &RatFn, order: usize) -> Result<NormalFormAmbient> {
        let n = base.dim();
        let lam2 = lambda.mul(lambda).reduce();
        let family: Vec<Vec<RhoJet>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let g = base.g(i, j);
                        RhoJet::exact(vec![g.clone(), g.mul(lambda).scale_int(2).reduce(), g.mul(&lam2).reduce()])
                    })
                    .collect()
            })
            .collect();
        let factor = if lambda.is_zero() { RhoJet::one() } else { RhoJet::binomial(lambda, &ri(-2), order) };
        let inv: Vec<Vec<RhoJet>> = (0..n)
            .map(|i| (0..n).map(|j| factor.scale(base.ginv(i, j)).reduce()).collect())
            .collect();
        Ok(NormalFormAmbient::assemble(base.clone(), Some(lambda.clone()), family, inv, order))
    }

    pub fn from_space_form(s: &SpaceForm, order: usize) -> Result<NormalFormAmbient> {
        NormalFormAmbient::einstein(&s.metric, &s.lambda, order)
    }

    pub fn flat(n: usize, order: usize) -> Result<NormalFormAmbient> {
        NormalFormAmbient::einstein(&ChartMetric::flat(n), &RatFn::zero(), order)
    }

    fn assemble(
        base: ChartMetric,
        lambda: Option<RatFn>,
        family: Vec<Vec<RhoJet>>,
        inv: Vec<Vec<RhoJet>>,
        order: usize,
    ) -> NormalFormAmbient {
        let n = base.dim();
        let inf = n + 1;
        let metric = AmbientTensor::from_fn(n, 0, 2, ri(2), Symmetry::pair(0, 1), |idx| match (idx[0], idx[1]) {
            (0, 0) => RhoJet::rho().scale_rat(&ri(2)),
            (0, b) if b == inf => RhoJet::one(),
            (a, b) if (1..=n).contains(&a) && (1..=n).contains(&b) => family[a - 1][b - 1].clone(),
            _ => RhoJet::zero(RhoJet::EXACT),
        });
        let inverse = AmbientTensor::from_fn(n, 2, 0, ri(-2), Symmetry::pair(0, 1), |idx| match (idx[0], idx[1]) {
            (0, b) if b == inf => RhoJet::one(),
            (a, b) if a == inf && b == inf => RhoJet::rho().scale_rat(&ri(-2)),
            (a, b) if (1..=n).contains(&a) && (1..=n).contains(&b) => inv[a - 1][b - 1].clone(),
            _ => RhoJet::zero(RhoJet::EXACT),
        });
        let inverse_nz = multi_indices(n + 2, 2)
            .filter_map(|i| {
                let j = inverse.get(&i);
                (!j.is_zero()).then(|| (i[0], i[1], j.clone()))
            })
            .collect();
        NormalFormAmbient {
            base,
            lambda,
            family,
            order,
            metric,
            inverse,
            inverse_nz,
            christoffel: OnceLock::new(),
            riemann: OnceLock::new(),
            ricci: OnceLock::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.base.dim()
    }

    pub fn dim(&self) -> usize {
        self.n() + 2
    }

    pub fn inf(&self) -> usize {
        self.n() + 1
    }

    pub fn base(&self) -> &ChartMetric {
        &self.base
    }

    /// Einstein constant when built from the closed form.
    pub fn lambda(&self) -> Option<&RatFn> {
        self.lambda.as_ref()
    }

    /// Order of the inverse metric (known modulo `rho^order`).
    pub fn order(&self) -> usize {
        self.order
    }

    /// `g_rho` as a matrix of jets over base indices.
    pub fn family(&self) -> &[Vec<RhoJet>] {
        &self.family
    }

    pub fn metric(&self) -> &AmbientTensor {
        &self.metric
    }

    pub fn inverse(&self) -> &AmbientTensor {
        &self.inverse
    }

    /// Non-zero entries of the inverse metric.
    pub fn inverse_entries(&self) -> &[(usize, usize, RhoJet)] {
        &self.inverse_nz
    }

    /// Levi-Civita connection as a weight-0 object of valence (1,2).
    pub fn christoffel(&self) -> Result<&AmbientTensor> {
        self.christoffel_data().map(|(t, _)| t)
    }

    pub fn sparse_christoffel(&self) -> Result<&SparseChristoffel> {
        self.christoffel_data().map(|(_, s)| s)
    }

    fn christoffel_data(&self) -> Result<&(AmbientTensor, SparseChristoffel)> {
        self.christoffel.get_or_init(|| self.compute_christoffel()).as_ref().map_err(Clone::clone)
    }

    fn compute_christoffel(&self) -> Result<(AmbientTensor, SparseChristoffel)> {
        let n = self.n();
        let d = self.dim();
        let g = &self.metric;
        let half = Rat::new(1.into(), 2.into());
        // Gamma_{l,ij} = (d_i g_jl + d_j g_il - d_l g_ij)/2
        let lowered = AmbientTensor::try_from_fn(n, 0, 3, ri(2), Symmetry::pair(1, 2), |idx| {
            let (l, i, j) = (idx[0], idx[1], idx[2]);
            Ok(g.partial(i, &[j, l])?.add(&g.partial(j, &[i, l])?).sub(&g.partial(l, &[i, j])?).scale_rat(&half).reduce())
        })?;
        let gamma = AmbientTensor::from_fn(n, 1, 2, ri(0), Symmetry::pair(1, 2), |idx| {
            let (k, i, j) = (idx[0], idx[1], idx[2]);
            let mut acc = RhoJet::zero(RhoJet::EXACT);
            for (a, l, inv) in &self.inverse_nz {
                if *a == k {
                    let low = lowered.get(&[*l, i, j]);
                    if !low.is_zero() {
                        acc = acc.add(&inv.mul(low));
                    }
                }
            }
            acc.reduce()
        });
        let mut by_upper = vec![vec![Vec::new(); d]; d];
        let mut by_lower = vec![vec![Vec::new(); d]; d];
        for idx in multi_indices(d, 3) {
            let v = gamma.get(&idx);
            if !v.is_zero() {
                by_upper[idx[0]][idx[1]].push((idx[2], v.clone()));
                by_lower[idx[1]][idx[2]].push((idx[0], v.clone()));
            }
        }
        Ok((gamma, SparseChristoffel { by_upper, by_lower }))
    }

    /// `R^d_{cab}` terms evaluated without storing the full up-index tensor.
    fn riemann_up(&self, d_: usize, c: usize, a: usize, b: usize) -> Result<RhoJet> {
        if a == b {
            return Ok(RhoJet::zero(RhoJet::EXACT));
        }
        let gam = self.christoffel()?;
        let sp = self.sparse_christoffel()?;
        let mut acc = gam.partial(a, &[d_, b, c])?.sub(&gam.partial(b, &[d_, a, c])?);
        for (e, g1) in &sp.by_upper[d_][a] {
            let g2 = gam.get(&[*e, b, c]);
            if !g2.is_zero() {
                acc = acc.add(&g1.mul(g2));
            }
        }
        for (e, g1) in &sp.by_upper[d_][b] {
            let g2 = gam.get(&[*e, a, c]);
            if !g2.is_zero() {
                acc = acc.sub(&g1.mul(g2));
            }
        }
        Ok(acc.reduce())
    }

    /// Lowered curvature `R_abcd = g_ce R^e_{dab}` (weight 2).
    pub fn riemann(&self) -> Result<&AmbientTensor> {
        self.riemann
            .get_or_init(|| {
                let n = self.n();
                let d = self.dim();
                let mut out = AmbientTensor::zeros(n, 0, 4, ri(2), Symmetry::none());
                // Fill using the pair antisymmetries: only a < b, c < d are computed.
                for a in 0..d {
                    for b in a + 1..d {
                        for c in 0..d {
                            for dd in c + 1..d {
                                if (c, dd) < (a, b) {
                                    continue;
                                }
                                let mut acc = RhoJet::zero(RhoJet::EXACT);
                                for e in 0..d {
                                    let gce = self.metric.get(&[c, e]);
                                    if !gce.is_zero() {
                                        acc = acc.add(&gce.mul(&self.riemann_up(e, dd, a, b)?));
                                    }
                                }
                                let v = acc.reduce();
                                let nv = v.neg();
                                for (p, q, val) in [((a, b), (c, dd), &v), ((c, dd), (a, b), &v)] {
                                    out.set(&[p.0, p.1, q.0, q.1], val.clone());
                                    out.set(&[p.1, p.0, q.0, q.1], nv.clone());
                                    out.set(&[p.0, p.1, q.1, q.0], nv.clone());
                                    out.set(&[p.1, p.0, q.1, q.0], val.clone());
                                }
                            }
                        }
                    }
                }
                Ok(out)
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Ricci tensor `Ric_bd = R^a_{dab}` (weight 0), computed directly from
    /// the connection.
    pub fn ricci(&self) -> Result<&AmbientTensor> {
        self.ricci
            .get_or_init(|| {
                let n = self.n();
                let d = self.dim();
                AmbientTensor::try_from_fn(n, 0, 2, ri(0), Symmetry::pair(0, 1), |idx| {
                    let (b, dd) = (idx[0], idx[1]);
                    let mut acc = RhoJet::zero(RhoJet::EXACT);
                    for a in 0..d {
                        acc = acc.add(&self.riemann_up(a, dd, a, b)?);
                    }
                    Ok(acc.reduce())
                })
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Weyl-type check helper: `g^{-1}` contracted against `g` (identity).
    pub fn metric_times_inverse(&self) -> Result<AmbientTensor> {
        let n = self.n();
        let d = self.dim();
        Ok(AmbientTensor::from_fn(n, 1, 1, ri(0), Symmetry::none(), |idx| {
            let (i, j) = (idx[0], idx[1]);
            (0..d).fold(RhoJet::zero(RhoJet::EXACT), |acc, k| acc.add(&self.inverse.get(&[i, k]).mul(self.metric.get(&[k, j])))).reduce()
        }))
    }

    /// The stored base metric evaluated via the family at `rho = 0`.
    pub fn check_initial_value(&self) -> Result<()> {
        let n = self.n();
        for i in 0..n {
            for j in 0..n {
                let c0 = self.family[i][j].coeff(0).map_err(lift_err)?;
                if !c0.equals(self.base.g(i, j)) {
                    return Err(GeometryError::Precondition("g_rho at rho = 0 differs from g".into()));
                }
            }
        }
        Ok(())
    }
}
