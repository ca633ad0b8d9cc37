//! Linearised obstruction tensor at a flat background: the first variation of
//! the normal-form ambient metric, its harmonisation by a Killing term, and
//! the read-off of `O'` from the Ricci and Lichnerowicz residues.

use ambient_exact::linsolve::Elimination;
use ambient_exact::{LinearSystem, Rat, RatFn, RhoJet};

use super::{leading_coefficient, ri};
use crate::ambient_geometry::{
    divergence, gradient, killing, laplacian, lichnerowicz, lift_err, mul_r, order_predicate, restrict_tm_scaled,
    sym_gradient, t_contract, trace, AmbientTensor, NormalFormAmbient, OrderKind, OrderVerdict, WeightedTensor,
};
use crate::chart_geometry::{is_tt, trace_free, ChartMetric};
use crate::error::{GeometryError, Result};
use crate::tensor::{Symmetry, TensorField};

/// Bianchi operator `B sigma = delta sigma + d(tr sigma)/2`.
pub fn bianchi_operator(amb: &NormalFormAmbient, sigma: &AmbientTensor) -> Result<AmbientTensor> {
    let dv = divergence(amb, sigma)?;
    let dt = gradient(&trace(amb, sigma)?)?;
    dv.add(&dt.scale_rat(&Rat::new(1.into(), 2.into())))
}

/// Differential of the Ricci tensor, `Ric' sigma = Lichnerowicz(sigma)/2 - delta^* B sigma`.
pub fn ricci_linearization(amb: &NormalFormAmbient, sigma: &AmbientTensor) -> Result<AmbientTensor> {
    let half = Rat::new(1.into(), 2.into());
    let lap = lichnerowicz(amb, sigma)?.scale_rat(&half);
    let b = bianchi_operator(amb, sigma)?;
    lap.sub(&sym_gradient(amb, &b)?)
}

/// `c_n = (-1)^(n/2-1) 2^(n-2) (n/2-1)!^2 / (n-2)` for even `n >= 4`.
pub fn obstruction_normalization(n: usize) -> Rat {
    let h = n as i64 / 2;
    let fact: i64 = (1..h).product();
    let sign = if h % 2 == 0 { -1 } else { 1 };
    ri(sign) * ri(2).pow(n as i32 - 2) * ri(fact * fact) / ri(n as i64 - 2)
}

/// `(-1)^(n/2-1) / (2(n-2))`: the factor relating `O'` and `P` when `O = 0`.
pub fn obstruction_gjms_factor(n: usize) -> Rat {
    let sign = if (n / 2) % 2 == 0 { -1 } else { 1 };
    ri(sign) / ri(2 * (n as i64 - 2))
}

/// Named order certificate.
#[derive(Clone, Debug)]
pub struct NamedVerdict {
    pub name: &'static str,
    pub verdict: OrderVerdict,
}

#[derive(Clone, Debug)]
pub struct ObstructionLinearization {
    pub n: usize,
    /// Variation `t^2 h_rho` of the normal-form family, ij block only.
    pub sigma_norm: AmbientTensor,
    /// Harmonising field (as a 1-form), vanishing on `G`.
    pub xi: AmbientTensor,
    /// `sigma_norm + K xi`, approximately harmonic.
    pub sigma: AmbientTensor,
    /// `O' phi = c_n (r^(1-n/2) Ric' sigma_norm)|_TM`.
    pub value: WeightedTensor,
    /// `(r^(1-n/2) Lichnerowicz sigma)|_TM`.
    pub lichnerowicz_residue: TensorField,
    /// `tf(2^(n-2) (n/2-1)!^2 (r^(1-n/2) Lichnerowicz sigma)|_TM)`, i.e. `P phi`.
    pub p_phi: TensorField,
    pub certificates: Vec<NamedVerdict>,
}

impl ObstructionLinearization {
    pub fn is_certified(&self) -> bool {
        self.certificates.iter().all(|c| c.verdict.holds)
    }

    /// `O' phi == (-1)^(n/2-1)/(2(n-2)) P phi` for a supplied `P phi`.
    pub fn matches_gjms(&self, p: &TensorField) -> bool {
        let predicted = p.map(|c| c.scale(&obstruction_gjms_factor(self.n)).reduce());
        self.value.tensor.equals(&predicted)
    }
}

fn sym_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|a| (a..n).map(move |b| (a, b))).collect()
}

fn coefficient(t: &AmbientTensor, idx: &[usize], p: usize) -> Result<RatFn> {
    Ok(t.get(idx).coeff(p).map_err(lift_err)?.reduce())
}

/// Rows of the order-`j` step: the `ij` block of `Ric'` at `rho^(j-1)` while
/// `j < n/2`, the `infinity infinity` component at `rho^(j-2)` from `j = 2`.
fn step_equations(amb: &NormalFormAmbient, ric: &AmbientTensor, j: usize) -> Result<Vec<RatFn>> {
    let n = amb.n();
    let inf = amb.inf();
    let mut out = Vec::new();
    if j < n / 2 {
        for (a, b) in sym_pairs(n) {
            out.push(coefficient(ric, &[a + 1, b + 1], j - 1)?);
        }
    }
    if j >= 2 {
        out.push(coefficient(ric, &[inf, inf], j - 2)?);
    }
    Ok(out)
}

fn block_tensor(n: usize, blocks: &[(usize, TensorField)]) -> AmbientTensor {
    AmbientTensor::from_fn(n, 0, 2, ri(2), Symmetry::pair(0, 1), |idx| {
        if idx.iter().all(|&i| (1..=n).contains(&i)) {
            let mut coeffs = Vec::new();
            for (p, h) in blocks {
                if coeffs.len() <= *p {
                    coeffs.resize(p + 1, RatFn::zero());
                }
                coeffs[*p] = h.get(&[idx[0] - 1, idx[1] - 1]).clone();
            }
            RhoJet::exact(coeffs)
        } else {
            RhoJet::zero(RhoJet::EXACT)
        }
    })
}

fn unit(n: usize, a: usize, b: usize) -> TensorField {
    TensorField::from_fn(n, 0, 2, Symmetry::pair(0, 1), |i| {
        if (i[0], i[1]) == (a, b) || (i[0], i[1]) == (b, a) {
            RatFn::one()
        } else {
            RatFn::zero()
        }
    })
}

/// Linearised normal form: `h_rho = phi + rho h_1 + ... + rho^(n/2) h_(n/2)`
/// with each `h_j` found by an exact solve. The coefficient matrix is probed
/// with constant unit tensors; the top step is gauged to pure trace.
fn linearized_normal_form(amb: &NormalFormAmbient, phi: &TensorField) -> Result<AmbientTensor> {
    let n = amb.n();
    let pairs = sym_pairs(n);
    let mut blocks = vec![(0usize, phi.clone())];
    for j in 1..=n / 2 {
        let sigma = block_tensor(n, &blocks);
        let rhs: Vec<RatFn> = step_equations(amb, &ricci_linearization(amb, &sigma)?, j)?.iter().map(RatFn::neg).collect();
        let mut columns = Vec::new();
        for &(a, b) in &pairs {
            let probe = block_tensor(n, &[(j, unit(n, a, b))]);
            let resp = step_equations(amb, &ricci_linearization(amb, &probe)?, j)?;
            let col = resp
                .iter()
                .map(|c| c.as_rat().ok_or_else(|| GeometryError::Precondition(format!("non-constant coefficient {c} at step {j}"))))
                .collect::<Result<Vec<Rat>>>()?;
            columns.push(col);
        }
        let mut sys = LinearSystem::new(pairs.len());
        let mut rhs_all = rhs;
        for (row, _) in rhs_all.iter().enumerate() {
            sys.push_row(columns.iter().enumerate().map(|(c, col)| (c, col[row].clone())).collect(), Rat::from_integer(0.into()));
        }
        if j == n / 2 {
            // trace-free part of the top coefficient is free: fix it to zero
            for (c, &(a, b)) in pairs.iter().enumerate() {
                if a != b {
                    sys.push_row(vec![(c, ri(1))], ri(0));
                    rhs_all.push(RatFn::zero());
                }
            }
            for a in 0..n - 1 {
                let ca = pairs.iter().position(|&p| p == (a, a)).unwrap_or(0);
                let cb = pairs.iter().position(|&p| p == (a + 1, a + 1)).unwrap_or(0);
                sys.push_row(vec![(ca, ri(1)), (cb, ri(-1))], ri(0));
                rhs_all.push(RatFn::zero());
            }
        }
        let sol = Elimination::new(&sys).solve(&rhs_all).map_err(|_| {
            GeometryError::Precondition(format!("linearised normal-form equations are inconsistent at rho^{j}"))
        })?;
        let mut h = TensorField::zeros(n, 0, 2, Symmetry::pair(0, 1));
        for (c, &(a, b)) in pairs.iter().enumerate() {
            h.set(&[a, b], sol[c].reduce());
        }
        blocks.push((j, h));
    }
    Ok(block_tensor(n, &blocks))
}

/// `xi = sum r^m V_m` with `Laplacian xi = -B sigma_norm + O(r^(n/2))`, using
/// `Laplacian(r^m V) = -2m(n + 2 - 2m) r^(m-1) V + O(r^m)` for `V` of weight
/// `2 - 2m`.
fn harmonizing_field(amb: &NormalFormAmbient, sigma_norm: &AmbientTensor) -> Result<AmbientTensor> {
    let n = amb.n();
    let b = bianchi_operator(amb, sigma_norm)?;
    let mut xi = AmbientTensor::zeros(n, 0, 1, ri(2), Symmetry::none());
    for m in 1..=n / 2 {
        let e = laplacian(amb, &xi)?.add(&b)?;
        let v = order_predicate(&e, amb.base(), OrderKind::Plain, m - 1)?;
        if !v.holds {
            return Err(GeometryError::Precondition(format!("harmonisation residual is not O(r^{}): {:?}", m - 1, v.witness)));
        }
        let mm = m as i64;
        let f = leading_coefficient(&e, m - 1)?;
        let vm = f.scale_rat(&(ri(1) / ri(2 * mm * (n as i64 + 2 - 2 * mm))));
        xi = xi.add(&mul_r(&vm, m))?;
    }
    Ok(xi)
}

fn ensure_flat(amb: &NormalFormAmbient) -> Result<()> {
    let n = amb.n();
    if n < 4 || n % 2 == 1 {
        return Err(GeometryError::Range(format!("the obstruction tensor needs even n >= 4, got {n}")));
    }
    let fam = amb.family();
    let flat = amb.lambda().is_none_or(|l| l.is_zero())
        && (0..n).all(|i| (0..n).all(|j| fam[i][j].is_exact() && fam[i][j].equals_through(&RhoJet::constant(if i == j { RatFn::one() } else { RatFn::zero() }))));
    if !flat {
        return Err(GeometryError::Precondition("obstruction linearisation needs the flat ambient".into()));
    }
    Ok(())
}

/// `O' phi` at the flat metric, with the certificates of every intermediate
/// order claim.
pub fn obstruction_linearization_flat(amb: &NormalFormAmbient, phi: &TensorField) -> Result<ObstructionLinearization> {
    ensure_flat(amb)?;
    let n = amb.n();
    if phi.dim() != n || phi.valence() != (0, 2) {
        return Err(GeometryError::Valence("expected a symmetric 2-tensor on the base".into()));
    }
    if !is_tt(&ChartMetric::flat(n), phi)?.is_yes() {
        return Err(GeometryError::NotTT { residual: format!("{:?}", is_tt(&ChartMetric::flat(n), phi)?) });
    }
    let h = n / 2;
    let base = amb.base();
    let mut certificates = Vec::new();
    let mut cert = |name: &'static str, verdict: OrderVerdict| certificates.push(NamedVerdict { name, verdict });

    let sigma_norm = linearized_normal_form(amb, phi)?;
    let ric = ricci_linearization(amb, &sigma_norm)?;
    cert("Ric' sigma_norm = O(r^(n/2-1))", order_predicate(&ric, base, OrderKind::Plain, h - 1)?);
    let tric = t_contract(&ric)?;
    cert("T.Ric' sigma_norm = O^-(r^(n/2))", order_predicate(&tric, base, OrderKind::Minus, h)?);
    cert("tr sigma_norm = O(r)", order_predicate(&trace(amb, &sigma_norm)?, base, OrderKind::Plain, 1)?);

    let xi = harmonizing_field(amb, &sigma_norm)?;
    let kxi = killing(amb, &xi)?;
    let sigma = sigma_norm.add(&kxi)?.with_symmetry(Symmetry::pair(0, 1));
    cert("B(sigma_norm + K xi) = O(r^(n/2))", order_predicate(&bianchi_operator(amb, &sigma)?, base, OrderKind::Plain, h)?);
    cert("xi|_G = 0", order_predicate(&xi, base, OrderKind::Plain, 1)?);
    cert("g(T, xi) = O(r^2)", order_predicate(&AmbientTensor::scalar(n, ri(2), xi.get(&[0]).clone()), base, OrderKind::Plain, 2)?);
    cert("tr K xi = O(r)", order_predicate(&trace(amb, &kxi)?, base, OrderKind::Plain, 1)?);

    let lap = lichnerowicz(amb, &sigma)?;
    cert("Lichnerowicz sigma = O(r^(n/2-1))", order_predicate(&lap, base, OrderKind::Plain, h - 1)?);
    cert("T.Lichnerowicz sigma = O^-(r^(n/2))", order_predicate(&t_contract(&lap)?, base, OrderKind::Minus, h)?);
    cert("tr sigma = O(r^(n/2))", order_predicate(&trace(amb, &sigma)?, base, OrderKind::Plain, h)?);
    cert("delta sigma = O^-(r^(n/2))", order_predicate(&divergence(amb, &sigma)?, base, OrderKind::Minus, h)?);
    cert("T.sigma = O^-(r^(n/2+1))", order_predicate(&t_contract(&sigma)?, base, OrderKind::Minus, h + 1)?);

    // Lichnerowicz sigma - 2 Ric' sigma_norm: leading coefficient vanishes on TG
    let diff = lap.sub(&ric.scale_rat(&ri(2)))?;
    let mut tg = diff.clone();
    for a in 0..=n {
        for b in 0..=n {
            tg.set(&[a, b], diff.get(&[a, b]).clone());
        }
        tg.set(&[a, n + 1], RhoJet::zero(RhoJet::EXACT));
        tg.set(&[n + 1, a], RhoJet::zero(RhoJet::EXACT));
    }
    tg.set(&[n + 1, n + 1], RhoJet::zero(RhoJet::EXACT));
    cert("(Lichnerowicz sigma - 2 Ric' sigma_norm)|_TG = O(r^(n/2))", order_predicate(&tg, base, OrderKind::Plain, h)?);

    let mut value = restrict_tm_scaled(&ric, h - 1)?;
    value.tensor = value.tensor.map(|c| c.scale(&obstruction_normalization(n)).reduce());
    value.weight = ri(2) - ri(n as i64);
    let lichnerowicz_residue = restrict_tm_scaled(&lap, h - 1)?.tensor;
    let fact: i64 = (1..h as i64).product();
    let cp = ri(2).pow(n as i32 - 2) * ri(fact * fact);
    let p_phi = trace_free(base, &lichnerowicz_residue.map(|c| c.scale(&cp)))?.map(|c| c.reduce());
    Ok(ObstructionLinearization { n, sigma_norm, xi, sigma, value, lichnerowicz_residue, p_phi, certificates })
}
