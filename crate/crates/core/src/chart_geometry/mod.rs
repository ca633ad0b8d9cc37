//! Pseudo-Riemannian geometry of a base metric in a single coordinate chart.
//!
//! Curvature conventions: `R^d_{cab}` is the `d` component of
//! `R(d_a, d_b) d_c = nabla_a nabla_b d_c - nabla_b nabla_a d_c`, the lowered
//! tensor is `R_abcd = g_ce R^e_{dab}`, and `Ric_bd = g^{ac} R_abcd`. With these
//! choices the unit sphere has `R_abcd = g_ac g_bd - g_ad g_bc` and
//! `Ric = (n-1) g`.

mod calc;
mod models;

use std::sync::OnceLock;

use ambient_exact::{Rat, RatFn, NUM_SLOTS};
use num_traits::Zero;

use crate::error::{GeometryError, Result};
use crate::tensor::{multi_indices, Symmetry, TensorField};

pub use calc::*;
pub use models::*;

/// Inverts a square matrix of rational functions by Gauss-Jordan elimination.
pub fn invert_matrix(m: &[Vec<RatFn>]) -> Result<(Vec<Vec<RatFn>>, RatFn)> {
    let n = m.len();
    let diagonal = (0..n).all(|i| (0..n).all(|j| i == j || m[i][j].is_zero()));
    if diagonal {
        let mut inv = vec![vec![RatFn::zero(); n]; n];
        let mut det = RatFn::one();
        for i in 0..n {
            inv[i][i] = m[i][i].inv().map_err(|_| GeometryError::NonInvertible)?.reduce();
            det = det.mul(&m[i][i]);
        }
        return Ok((inv, det.reduce()));
    }
    let mut a: Vec<Vec<RatFn>> = m.to_vec();
    let mut inv: Vec<Vec<RatFn>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { RatFn::one() } else { RatFn::zero() }).collect()).collect();
    let mut det = RatFn::one();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].reduce().is_zero()).ok_or(GeometryError::NonInvertible)?;
        if pivot != col {
            a.swap(pivot, col);
            inv.swap(pivot, col);
            det = det.neg();
        }
        let p = a[col][col].reduce();
        det = det.mul(&p);
        let pinv = p.inv().map_err(|_| GeometryError::NonInvertible)?;
        for j in 0..n {
            a[col][j] = a[col][j].mul(&pinv).reduce();
            inv[col][j] = inv[col][j].mul(&pinv).reduce();
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                a[r][j] = a[r][j].sub(&f.mul(&a[col][j])).reduce();
                inv[r][j] = inv[r][j].sub(&f.mul(&inv[col][j])).reduce();
            }
        }
    }
    Ok((inv, det.reduce()))
}

/// Evaluates the coordinate slots of `f` at `point`, leaving `lambda` symbolic.
pub fn at_point(f: &RatFn, point: &[Rat]) -> Result<RatFn> {
    let mut v = f.clone();
    for (s, x) in point.iter().enumerate() {
        v = v.subst(s, x)?;
    }
    Ok(v.reduce())
}

/// Inertia `(positive, negative)` of a symmetric rational matrix.
fn inertia(m: &[Vec<Rat>]) -> Option<(usize, usize)> {
    let n = m.len();
    let mut a = m.to_vec();
    let (mut p, mut q) = (0, 0);
    let mut k = 0;
    while k < n {
        let piv = (k..n).find(|&i| !a[i][i].is_zero());
        match piv {
            Some(i) => {
                a.swap(i, k);
                for row in a.iter_mut() {
                    row.swap(i, k);
                }
            }
            None => {
                // Congruence by e_k + e_j to create a diagonal pivot.
                let j = (k + 1..n).find(|&j| !a[k][j].is_zero())?;
                for c in 0..n {
                    let v = a[j][c].clone();
                    a[k][c] += v;
                }
                for r in 0..n {
                    let v = a[r][j].clone();
                    a[r][k] += v;
                }
                if a[k][k].is_zero() {
                    return None;
                }
            }
        }
        let d = a[k][k].clone();
        if d > Rat::zero() {
            p += 1;
        } else {
            q += 1;
        }
        for i in k + 1..n {
            let f = &a[i][k] / &d;
            for j in k..n {
                let v = &f * &a[k][j];
                a[i][j] -= v;
            }
        }
        for i in k + 1..n {
            a[k][i] = Rat::zero();
            a[i][k] = Rat::zero();
        }
        k += 1;
    }
    Some((p, q))
}

/// Curvature tensors of a chart metric.
#[derive(Clone, Debug)]
pub struct Curvature {
    /// `R_abcd`, valence (0,4).
    pub riemann: TensorField,
    pub ricci: TensorField,
    pub scalar: RatFn,
    /// Present when `n >= 3`.
    pub schouten: Option<TensorField>,
    /// Present when `n >= 3`.
    pub weyl: Option<TensorField>,
}

/// A metric on a coordinate chart with coordinates `x1..xn`.
#[derive(Clone, Debug)]
pub struct ChartMetric {
    dim: usize,
    signature: (usize, usize),
    g: TensorField,
    ginv: TensorField,
    det: RatFn,
    base_point: Vec<Rat>,
    christoffel: OnceLock<TensorField>,
    curvature: OnceLock<Curvature>,
}

impl ChartMetric {
    pub fn new(components: Vec<Vec<RatFn>>, base_point: Vec<Rat>) -> Result<ChartMetric> {
        let n = components.len();
        if n == 0 || n >= NUM_SLOTS || components.iter().any(|r| r.len() != n) {
            return Err(GeometryError::Valence(format!("metric must be square with 1 <= n <= {}", NUM_SLOTS - 1)));
        }
        if base_point.len() != n {
            return Err(GeometryError::Valence("base point has the wrong dimension".into()));
        }
        for i in 0..n {
            for j in 0..n {
                if !components[i][j].equals(&components[j][i]) {
                    return Err(GeometryError::Valence(format!("g_{}{} != g_{}{}", i + 1, j + 1, j + 1, i + 1)));
                }
            }
        }
        let (inv, det) = invert_matrix(&components)?;
        let det0 = at_point(&det, &base_point).map_err(|_| GeometryError::NonInvertible)?;
        if det0.is_zero() {
            return Err(GeometryError::NonInvertible);
        }
        let evaluated: Vec<Vec<Rat>> = components
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| {
                        let v = at_point(c, &base_point)?;
                        let v = if v.as_rat().is_some() { v } else { v.subst(ambient_exact::LAMBDA_SLOT, &Rat::zero())? };
                        v.as_rat().ok_or(GeometryError::NonInvertible)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let signature = inertia(&evaluated).ok_or(GeometryError::NonInvertible)?;
        let g = TensorField::sym2(n, &components);
        let ginv = TensorField::from_fn(n, 2, 0, Symmetry::pair(0, 1), |i| inv[i[0]][i[1]].clone());
        Ok(ChartMetric {
            dim: n,
            signature,
            g,
            ginv,
            det,
            base_point,
            christoffel: OnceLock::new(),
            curvature: OnceLock::new(),
        })
    }

    pub fn flat(n: usize) -> ChartMetric {
        let m = (0..n).map(|i| (0..n).map(|j| if i == j { RatFn::one() } else { RatFn::zero() }).collect()).collect();
        ChartMetric::new(m, vec![Rat::zero(); n]).expect("flat metric is valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    pub fn base_point(&self) -> &[Rat] {
        &self.base_point
    }

    pub fn metric(&self) -> &TensorField {
        &self.g
    }

    pub fn inverse(&self) -> &TensorField {
        &self.ginv
    }

    pub fn g(&self, i: usize, j: usize) -> &RatFn {
        self.g.get(&[i, j])
    }

    pub fn ginv(&self, i: usize, j: usize) -> &RatFn {
        self.ginv.get(&[i, j])
    }

    pub fn det(&self) -> &RatFn {
        &self.det
    }

    pub fn components(&self) -> Vec<Vec<RatFn>> {
        (0..self.dim).map(|i| (0..self.dim).map(|j| self.g(i, j).clone()).collect()).collect()
    }

    pub fn is_flat_coordinates(&self) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| self.g(i, j).as_rat().is_some()))
    }

    /// `Gamma^k_ij`, valence (1,2), symmetric in the lower pair.
    pub fn christoffel(&self) -> &TensorField {
        self.christoffel.get_or_init(|| christoffel_of(self))
    }

    pub fn curvature(&self) -> &Curvature {
        self.curvature.get_or_init(|| curvature_of(self))
    }

    pub fn to_document(&self) -> crate::tensor::TensorDocument {
        self.g.to_document(Some(self.signature))
    }
}

fn christoffel_of(g: &ChartMetric) -> TensorField {
    let n = g.dim;
    // Lowered symbols Gamma_{l,ij} = (d_i g_jl + d_j g_il - d_l g_ij)/2.
    let dg: Vec<Vec<Vec<RatFn>>> =
        (0..n).map(|l| (0..n).map(|i| (0..n).map(|j| g.g(i, j).derivative(l)).collect()).collect()).collect();
    let half = Rat::new(1.into(), 2.into());
    let lowered = TensorField::from_fn(n, 0, 3, Symmetry::pair(1, 2), |idx| {
        let (l, i, j) = (idx[0], idx[1], idx[2]);
        dg[i][j][l].add(&dg[j][i][l]).sub(&dg[l][i][j]).scale(&half)
    });
    TensorField::from_fn(n, 1, 2, Symmetry::pair(1, 2), |idx| {
        let (k, i, j) = (idx[0], idx[1], idx[2]);
        let mut acc = RatFn::zero();
        for l in 0..n {
            let a = g.ginv(k, l);
            if !a.is_zero() {
                let b = lowered.get(&[l, i, j]);
                if !b.is_zero() {
                    acc = acc.add(&a.mul(b));
                }
            }
        }
        acc
    })
}

fn curvature_of(g: &ChartMetric) -> Curvature {
    let n = g.dim;
    let gam = g.christoffel();
    // R^d_{cab} = d_a Gamma^d_bc - d_b Gamma^d_ac + Gamma^d_ae Gamma^e_bc - Gamma^d_be Gamma^e_ac
    let up = TensorField::from_fn(n, 1, 3, Symmetry::none(), |idx| {
        let (d, c, a, b) = (idx[0], idx[1], idx[2], idx[3]);
        if a == b {
            return RatFn::zero();
        }
        let mut acc = gam.get(&[d, b, c]).derivative(a).sub(&gam.get(&[d, a, c]).derivative(b));
        for e in 0..n {
            let t1 = gam.get(&[d, a, e]);
            let t2 = gam.get(&[e, b, c]);
            if !t1.is_zero() && !t2.is_zero() {
                acc = acc.add(&t1.mul(t2));
            }
            let t3 = gam.get(&[d, b, e]);
            let t4 = gam.get(&[e, a, c]);
            if !t3.is_zero() && !t4.is_zero() {
                acc = acc.sub(&t3.mul(t4));
            }
        }
        acc
    });
    // R_abcd = g_ce R^e_{dab}
    let riemann = TensorField::from_fn(n, 0, 4, Symmetry::none(), |idx| {
        let (a, b, c, d) = (idx[0], idx[1], idx[2], idx[3]);
        let mut acc = RatFn::zero();
        for e in 0..n {
            let ge = g.g(c, e);
            if !ge.is_zero() {
                let r = up.get(&[e, d, a, b]);
                if !r.is_zero() {
                    acc = acc.add(&ge.mul(r));
                }
            }
        }
        acc
    });
    let ricci = TensorField::from_fn(n, 0, 2, Symmetry::pair(0, 1), |idx| {
        let (b, d) = (idx[0], idx[1]);
        let mut acc = RatFn::zero();
        for a in 0..n {
            for c in 0..n {
                let gi = g.ginv(a, c);
                if !gi.is_zero() {
                    acc = acc.add(&gi.mul(riemann.get(&[a, b, c, d])));
                }
            }
        }
        acc
    });
    let mut scalar = RatFn::zero();
    for b in 0..n {
        for d in 0..n {
            scalar = scalar.add(&g.ginv(b, d).mul(ricci.get(&[b, d])));
        }
    }
    let scalar = scalar.reduce();
    let (schouten, weyl) = if n >= 3 {
        let nn = n as i64;
        let c1 = Rat::new(1.into(), (nn - 2).into());
        let c2 = Rat::new(1.into(), (2 * (nn - 1) * (nn - 2)).into());
        let p = TensorField::from_fn(n, 0, 2, Symmetry::pair(0, 1), |i| {
            ricci.get(i).scale(&c1).sub(&scalar.mul(g.g(i[0], i[1])).scale(&c2))
        });
        let w = TensorField::from_fn(n, 0, 4, Symmetry::none(), |idx| {
            let (a, b, c, d) = (idx[0], idx[1], idx[2], idx[3]);
            let kn = p
                .get(&[a, c])
                .mul(g.g(b, d))
                .add(&p.get(&[b, d]).mul(g.g(a, c)))
                .sub(&p.get(&[a, d]).mul(g.g(b, c)))
                .sub(&p.get(&[b, c]).mul(g.g(a, d)));
            riemann.get(idx).sub(&kn)
        });
        (Some(p), Some(w))
    } else {
        (None, None)
    };
    Curvature { riemann, ricci, scalar, schouten, weyl }
}

/// Schouten tensor; requires `n >= 3`.
pub fn schouten(g: &ChartMetric) -> Result<&TensorField> {
    g.curvature().schouten.as_ref().ok_or(GeometryError::DimensionTooSmall { dim: g.dim(), what: "Schouten tensor" })
}

/// Weyl tensor; requires `n >= 3`.
pub fn weyl(g: &ChartMetric) -> Result<&TensorField> {
    g.curvature().weyl.as_ref().ok_or(GeometryError::DimensionTooSmall { dim: g.dim(), what: "Weyl tensor" })
}

/// Checks the algebraic Riemann symmetries and first Bianchi identity.
pub fn riemann_symmetries_hold(g: &ChartMetric) -> bool {
    let r = &g.curvature().riemann;
    let n = g.dim();
    multi_indices(n, 4).all(|i| {
        let (a, b, c, d) = (i[0], i[1], i[2], i[3]);
        let v = r.get(&[a, b, c, d]);
        r.get(&[b, a, c, d]).add(v).is_zero()
            && r.get(&[c, d, a, b]).equals(v)
            && v.add(r.get(&[a, c, d, b])).add(r.get(&[a, d, b, c])).is_zero()
    })
}
