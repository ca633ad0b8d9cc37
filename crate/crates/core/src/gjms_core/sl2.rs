//! The operators `x = r/4`, `y = Lichnerowicz Laplacian`, `h = w + n/2 - 1`
//! on homogeneous symmetric 2-tensors, and exact checks of their relations.

use ambient_exact::Rat;
use serde::Serialize;

use crate::ambient_geometry::{lichnerowicz, mul_r, random_ambient, restrict_g, AmbientTensor, IdentityCheck, NormalFormAmbient};
use crate::error::{GeometryError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Sl2Op {
    X,
    Y,
    H,
}

/// A homogeneous symmetric 2-tensor together with its ambient space.
#[derive(Clone, Debug)]
pub struct SL2State<'a> {
    pub tensor: AmbientTensor,
    pub ambient: &'a NormalFormAmbient,
}

impl<'a> SL2State<'a> {
    pub fn new(ambient: &'a NormalFormAmbient, tensor: AmbientTensor) -> Result<SL2State<'a>> {
        if tensor.valence() != (0, 2) || tensor.n() != ambient.n() {
            return Err(GeometryError::Valence("sl(2) states are covariant 2-tensors on the ambient space".into()));
        }
        Ok(SL2State { tensor, ambient })
    }

    pub fn weight(&self) -> &Rat {
        self.tensor.weight()
    }

    /// Eigenvalue of `h` on this weight.
    pub fn h_value(&self) -> Rat {
        h_eigenvalue(self.ambient.n(), self.weight())
    }

    pub fn apply(&self, op: Sl2Op) -> Result<SL2State<'a>> {
        sl2_apply(self, op)
    }

    /// Applies a word right to left, like operator composition.
    pub fn apply_word(&self, word: &[Sl2Op]) -> Result<SL2State<'a>> {
        word.iter().rev().try_fold(self.clone(), |s, op| s.apply(*op))
    }

    /// Scalar multiple, keeping the weight.
    pub fn scaled(&self, c: &Rat) -> SL2State<'a> {
        SL2State { tensor: self.tensor.scale_rat(c), ambient: self.ambient }
    }

    pub fn sub(&self, other: &SL2State<'a>) -> Result<SL2State<'a>> {
        Ok(SL2State { tensor: self.tensor.sub(&other.tensor)?, ambient: self.ambient })
    }
}

/// `w + n/2 - 1`.
pub fn h_eigenvalue(n: usize, w: &Rat) -> Rat {
    w + Rat::new((n as i64).into(), 2.into()) - Rat::from_integer(1.into())
}

pub fn sl2_apply<'a>(state: &SL2State<'a>, op: Sl2Op) -> Result<SL2State<'a>> {
    let tensor = match op {
        Sl2Op::X => mul_r(&state.tensor, 1).scale_rat(&Rat::new(1.into(), 4.into())),
        Sl2Op::Y => lichnerowicz(state.ambient, &state.tensor)?,
        Sl2Op::H => state.tensor.scale_rat(&state.h_value()),
    };
    Ok(SL2State { tensor, ambient: state.ambient })
}

fn compare(name: String, lhs: &AmbientTensor, rhs: &AmbientTensor) -> IdentityCheck {
    let n = lhs.n();
    let diff = if lhs.weight() != rhs.weight() {
        Some(format!("weights {} and {} differ", lhs.weight(), rhs.weight()))
    } else {
        lhs.first_difference(rhs).map(|(idx, j)| format!("component {} differs: {:?}", AmbientTensor::index_label(n, &idx), j.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>()))
    };
    IdentityCheck { name, holds: diff.is_none(), witness: diff }
}

fn falling(n: usize, w: &Rat, m: usize) -> Rat {
    // h(h+1)...(h+m-2) evaluated at weight w
    let h = h_eigenvalue(n, w);
    (0..m.saturating_sub(1)).fold(Rat::from_integer(1.into()), |acc, j| acc * (&h + Rat::from_integer((j as i64).into())))
}

/// Parameters for [`sl2_commutator_check`].
#[derive(Clone, Debug)]
pub struct Sl2CheckConfig {
    pub weights: Vec<Rat>,
    pub trials: usize,
    /// Iterated identities are checked for `1 <= m <= max_m`.
    pub max_m: usize,
    /// Jet order of the random test tensors.
    pub order: usize,
    pub seed: u64,
}

/// Exact checks of the sl(2) relations and of their iterated forms on random
/// tensors, `trials` per weight.
pub fn sl2_commutator_check(amb: &NormalFormAmbient, cfg: &Sl2CheckConfig) -> Result<Vec<IdentityCheck>> {
    use Sl2Op::{H, X, Y};
    let n = amb.n();
    let (max_m, order, seed) = (cfg.max_m, cfg.order, cfg.seed);
    let mut out = Vec::new();
    let cases = cfg.weights.iter().flat_map(|w| (0..cfg.trials).map(move |s| (w.clone(), s)));
    for (case, (w, s)) in cases.enumerate() {
        let sigma = SL2State::new(amb, random_ambient(n, 2, w.clone(), order, true, seed.wrapping_add(case as u64)))?;
        let tag = format!("trial {s}, w = {w}");
        // [h,x] = 2x, [h,y] = -2y, [x,y] = h
        let hx = sigma.apply_word(&[H, X])?.sub(&sigma.apply_word(&[X, H])?)?;
        out.push(compare(format!("[h,x] = 2x ({tag})"), &hx.tensor, &sigma.apply(X)?.scaled(&Rat::from_integer(2.into())).tensor));
        let hy = sigma.apply_word(&[H, Y])?.sub(&sigma.apply_word(&[Y, H])?)?;
        out.push(compare(format!("[h,y] = -2y ({tag})"), &hy.tensor, &sigma.apply(Y)?.scaled(&Rat::from_integer((-2).into())).tensor));
        let xy = sigma.apply_word(&[X, Y])?.sub(&sigma.apply_word(&[Y, X])?)?;
        out.push(compare(format!("[x,y] = h ({tag})"), &xy.tensor, &sigma.apply(H)?.tensor));
        for m in 1..=max_m {
            let ym: Vec<Sl2Op> = vec![Y; m];
            let xm: Vec<Sl2Op> = vec![X; m];
            let mf = Rat::from_integer((m as i64).into());
            // [y^m, x] = -m y^(m-1) (h - m + 1)
            let mut yx = ym.clone();
            yx.push(X);
            let mut xy = vec![X];
            xy.extend(ym.iter().copied());
            let lhs = sigma.apply_word(&yx)?.sub(&sigma.apply_word(&xy)?)?;
            let c = -(&mf) * (sigma.h_value() - &mf + Rat::from_integer(1.into()));
            let rhs = sigma.scaled(&c).apply_word(&vec![Y; m - 1])?;
            out.push(compare(format!("[y^{m},x] ({tag})"), &lhs.tensor, &rhs.tensor));
            // [x^m, y] = m x^(m-1) (h + m - 1)
            let mut xmy = xm.clone();
            xmy.push(Y);
            let mut yxm = vec![Y];
            yxm.extend(xm.iter().copied());
            let lhs = sigma.apply_word(&xmy)?.sub(&sigma.apply_word(&yxm)?)?;
            let c = &mf * (sigma.h_value() + &mf - Rat::from_integer(1.into()));
            let rhs = sigma.scaled(&c).apply_word(&vec![X; m - 1])?;
            out.push(compare(format!("[x^{m},y] ({tag})"), &lhs.tensor, &rhs.tensor));
            // y^(m-1) x^(m-1) = (-1)^(m-1) (m-1)! h(h+1)...(h+m-2) + x Z, on G
            let mut word = vec![Y; m - 1];
            word.extend(vec![X; m - 1]);
            let lhs = restrict_g(&sigma.apply_word(&word)?.tensor);
            let fact: Rat = (1..m).fold(Rat::from_integer(1.into()), |a, j| a * Rat::from_integer((j as i64).into()));
            let sign = if (m - 1) % 2 == 0 { Rat::from_integer(1.into()) } else { Rat::from_integer((-1).into()) };
            let rhs = restrict_g(&sigma.tensor.scale_rat(&(sign * fact * falling(n, &w, m))));
            out.push(compare(format!("y^{0}x^{0} on G, m = {m} ({tag})", m - 1), &lhs, &rhs));
        }
    }
    Ok(out)
}
