//! The ambient space `R_+ x M x R` in coordinates `(t, x, rho)`.
//!
//! Ambient index `0` is `t`, `1..=n` are the base coordinates and `n+1` is
//! `rho`. A homogeneous tensor of weight `w` has components
//! `t^(w - a + b) * J(x, rho)` where `a` (`b`) counts covariant (contravariant)
//! slots equal to `0`; only the jet `J` is stored.

mod metric;
mod ops;
mod order;
mod straight;

use std::collections::BTreeMap;

use ambient_exact::{Rat, RatFn, RhoJet};
use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::tensor::{flat_index, multi_indices, unflatten, Symmetry};

pub use metric::*;
pub use ops::*;
pub use order::*;
pub use straight::*;

/// Converts an algebra-level truncation error into the geometry error.
pub(crate) fn lift_err(e: ambient_exact::AlgebraError) -> GeometryError {
    match GeometryError::truncation_of(&e) {
        Some((needed, available)) => GeometryError::Truncation { needed, available },
        None => GeometryError::Algebra(e),
    }
}

/// A homogeneous tensor on the ambient space with jet components.
#[derive(Clone, Debug)]
pub struct AmbientTensor {
    n: usize,
    upper: usize,
    lower: usize,
    weight: Rat,
    symmetry: Symmetry,
    comps: Vec<RhoJet>,
}

impl AmbientTensor {
    pub fn zeros(n: usize, upper: usize, lower: usize, weight: Rat, symmetry: Symmetry) -> AmbientTensor {
        let d = n + 2;
        AmbientTensor {
            n,
            upper,
            lower,
            weight,
            symmetry,
            comps: vec![RhoJet::zero(RhoJet::EXACT); d.pow((upper + lower) as u32)],
        }
    }

    pub fn from_fn(
        n: usize,
        upper: usize,
        lower: usize,
        weight: Rat,
        symmetry: Symmetry,
        mut f: impl FnMut(&[usize]) -> RhoJet,
    ) -> AmbientTensor {
        let mut t = AmbientTensor::zeros(n, upper, lower, weight, symmetry);
        for idx in multi_indices(n + 2, upper + lower) {
            if t.symmetry.is_canonical(&idx) {
                let v = f(&idx);
                t.set(&idx, v);
            }
        }
        t
    }

    pub fn try_from_fn(
        n: usize,
        upper: usize,
        lower: usize,
        weight: Rat,
        symmetry: Symmetry,
        mut f: impl FnMut(&[usize]) -> Result<RhoJet>,
    ) -> Result<AmbientTensor> {
        let mut t = AmbientTensor::zeros(n, upper, lower, weight, symmetry);
        for idx in multi_indices(n + 2, upper + lower) {
            if t.symmetry.is_canonical(&idx) {
                let v = f(&idx)?;
                t.set(&idx, v);
            }
        }
        Ok(t)
    }

    /// Scalar of the given weight.
    pub fn scalar(n: usize, weight: Rat, v: RhoJet) -> AmbientTensor {
        let mut t = AmbientTensor::zeros(n, 0, 0, weight, Symmetry::none());
        t.comps[0] = v;
        t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Ambient dimension `n + 2`.
    pub fn dim(&self) -> usize {
        self.n + 2
    }

    /// Index of the `rho` direction.
    pub fn inf(&self) -> usize {
        self.n + 1
    }

    pub fn valence(&self) -> (usize, usize) {
        (self.upper, self.lower)
    }

    pub fn rank(&self) -> usize {
        self.upper + self.lower
    }

    pub fn weight(&self) -> &Rat {
        &self.weight
    }

    pub fn symmetry(&self) -> &Symmetry {
        &self.symmetry
    }

    pub fn comps(&self) -> &[RhoJet] {
        &self.comps
    }

    pub fn get(&self, idx: &[usize]) -> &RhoJet {
        &self.comps[flat_index(self.dim(), idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: RhoJet) {
        let d = self.dim();
        let mut stack = vec![idx.to_vec()];
        let mut seen = Vec::new();
        while let Some(i) = stack.pop() {
            let k = flat_index(d, &i);
            if seen.contains(&k) {
                continue;
            }
            seen.push(k);
            self.comps[k] = v.clone();
            for &(a, b) in &self.symmetry.0 {
                let mut j = i.clone();
                j.swap(a, b);
                stack.push(j);
            }
        }
    }

    /// Implied power of `t` for a component.
    pub fn t_power(&self, idx: &[usize]) -> Rat {
        let up0 = idx[..self.upper].iter().filter(|&&i| i == 0).count() as i64;
        let low0 = idx[self.upper..].iter().filter(|&&i| i == 0).count() as i64;
        &self.weight - Rat::from_integer(low0.into()) + Rat::from_integer(up0.into())
    }

    /// Graded partial derivative `d_c` of the stored component at `idx`.
    pub fn partial(&self, c: usize, idx: &[usize]) -> Result<RhoJet> {
        let j = self.get(idx);
        if c == 0 {
            Ok(j.scale_rat(&self.t_power(idx)))
        } else if c <= self.n {
            Ok(j.map(|x| x.derivative(c - 1)))
        } else {
            j.d_rho().map_err(lift_err)
        }
    }

    pub fn with_weight(mut self, w: Rat) -> AmbientTensor {
        self.weight = w;
        self
    }

    pub fn with_symmetry(mut self, s: Symmetry) -> AmbientTensor {
        self.symmetry = s;
        self
    }

    pub fn map(&self, f: impl Fn(&RhoJet) -> RhoJet) -> AmbientTensor {
        AmbientTensor { comps: self.comps.iter().map(f).collect(), ..self.clone_shape() }
    }

    pub fn try_map(&self, f: impl Fn(&RhoJet) -> Result<RhoJet>) -> Result<AmbientTensor> {
        Ok(AmbientTensor { comps: self.comps.iter().map(f).collect::<Result<_>>()?, ..self.clone_shape() })
    }

    fn clone_shape(&self) -> AmbientTensor {
        AmbientTensor {
            n: self.n,
            upper: self.upper,
            lower: self.lower,
            weight: self.weight.clone(),
            symmetry: self.symmetry.clone(),
            comps: Vec::new(),
        }
    }

    fn check_compatible(&self, other: &AmbientTensor) -> Result<()> {
        if self.n != other.n || self.valence() != other.valence() || self.weight != other.weight {
            return Err(GeometryError::Valence(format!(
                "cannot combine valence {:?} weight {} with valence {:?} weight {}",
                self.valence(),
                self.weight,
                other.valence(),
                other.weight
            )));
        }
        Ok(())
    }

    fn zip(&self, other: &AmbientTensor, f: impl Fn(&RhoJet, &RhoJet) -> RhoJet) -> Result<AmbientTensor> {
        self.check_compatible(other)?;
        let mut out = self.clone_shape();
        if self.symmetry != other.symmetry {
            out.symmetry = Symmetry::none();
        }
        out.comps = self.comps.iter().zip(&other.comps).map(|(a, b)| f(a, b)).collect();
        Ok(out)
    }

    pub fn add(&self, other: &AmbientTensor) -> Result<AmbientTensor> {
        self.zip(other, |a, b| a.add(b).reduce())
    }

    pub fn sub(&self, other: &AmbientTensor) -> Result<AmbientTensor> {
        self.zip(other, |a, b| a.sub(b).reduce())
    }

    pub fn scale_rat(&self, c: &Rat) -> AmbientTensor {
        self.map(|j| j.scale_rat(c))
    }

    /// Multiplies every component by a weight-0 jet.
    pub fn scale_jet(&self, c: &RhoJet) -> AmbientTensor {
        self.map(|j| j.mul(c).reduce())
    }

    /// `rho^m` times each stored component, leaving the weight unchanged.
    pub fn mul_rho_pow(&self, m: usize) -> AmbientTensor {
        self.map(|j| j.mul_rho_pow(m))
    }

    pub fn truncate(&self, order: usize) -> AmbientTensor {
        self.map(|j| j.truncate(order))
    }

    /// Smallest component order.
    pub fn order(&self) -> usize {
        self.comps.iter().map(RhoJet::order).min().unwrap_or(RhoJet::EXACT)
    }

    /// All known coefficients vanish.
    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(RhoJet::is_zero)
    }

    /// Agreement of all known coefficients.
    pub fn equals_through(&self, other: &AmbientTensor) -> bool {
        self.first_difference(other).is_none()
    }

    /// First component index where the known coefficients differ.
    pub fn first_difference(&self, other: &AmbientTensor) -> Option<(Vec<usize>, RhoJet)> {
        if self.n != other.n || self.valence() != other.valence() {
            return Some((Vec::new(), RhoJet::one()));
        }
        self.comps.iter().zip(&other.comps).enumerate().find_map(|(k, (a, b))| {
            let d = a.sub(b);
            (!d.is_zero()).then(|| (unflatten(self.dim(), self.rank(), k), d))
        })
    }

    /// First component that is not (known to be) zero.
    pub fn first_nonzero(&self) -> Option<(Vec<usize>, RhoJet)> {
        self.comps
            .iter()
            .enumerate()
            .find(|(_, j)| !j.is_zero())
            .map(|(k, j)| (unflatten(self.dim(), self.rank(), k), j.clone()))
    }

    /// Human-readable ambient index label: `0`, `1..n`, `inf`.
    pub fn index_label(n: usize, idx: &[usize]) -> String {
        idx.iter()
            .map(|&i| if i == n + 1 { "inf".to_string() } else { i.to_string() })
            .collect::<Vec<_>>()
            .join(",")
    }

    fn parse_label(n: usize, rank: usize, key: &str) -> Result<Vec<usize>> {
        if rank == 0 {
            return if key.is_empty() { Ok(Vec::new()) } else { Err(GeometryError::Malformed(format!("bad index `{key}`"))) };
        }
        let idx: Vec<usize> = key
            .split(',')
            .map(|p| match p {
                "inf" => Ok(n + 1),
                _ => p.parse::<usize>().ok().filter(|&i| i <= n).ok_or_else(|| GeometryError::Malformed(format!("bad index `{key}`"))),
            })
            .collect::<Result<_>>()?;
        if idx.len() != rank {
            return Err(GeometryError::Malformed(format!("index `{key}` has wrong rank")));
        }
        Ok(idx)
    }

    pub fn to_document(&self) -> AmbientDocument {
        let mut components = BTreeMap::new();
        for (k, j) in self.comps.iter().enumerate() {
            let idx = unflatten(self.dim(), self.rank(), k);
            if !j.is_zero() && self.symmetry.is_canonical(&idx) {
                components.insert(
                    AmbientTensor::index_label(self.n, &idx),
                    j.coeffs().iter().map(|c| c.to_string()).collect(),
                );
            }
        }
        let order = self.order();
        AmbientDocument {
            n: self.n,
            weight: self.weight.to_string(),
            valence: [self.upper, self.lower],
            symmetry: self.symmetry.0.iter().map(|&(a, b)| [a, b]).collect(),
            truncation: (order != RhoJet::EXACT).then(|| order.saturating_sub(1)),
            components,
        }
    }

    pub fn from_document(doc: &AmbientDocument) -> Result<AmbientTensor> {
        let weight = ambient_exact::parse_rat(&doc.weight)?;
        let order = doc.truncation.map(|t| t + 1).unwrap_or(RhoJet::EXACT);
        let symmetry = Symmetry(doc.symmetry.iter().map(|p| (p[0], p[1])).collect());
        let rank = doc.valence[0] + doc.valence[1];
        if symmetry.0.iter().any(|&(a, b)| a >= rank || b >= rank) {
            return Err(GeometryError::Malformed("symmetry slot out of range".into()));
        }
        let mut t = AmbientTensor::zeros(doc.n, doc.valence[0], doc.valence[1], weight, symmetry);
        for idx in multi_indices(doc.n + 2, rank) {
            t.comps[flat_index(doc.n + 2, &idx)] = RhoJet::zero(order);
        }
        for (key, coeffs) in &doc.components {
            let idx = AmbientTensor::parse_label(doc.n, rank, key)?;
            let coeffs = coeffs.iter().map(|c| RatFn::parse(c)).collect::<std::result::Result<Vec<_>, _>>()?;
            let canonical = t.symmetry.canonical(&idx);
            if canonical != idx && doc.components.contains_key(&AmbientTensor::index_label(doc.n, &canonical)) {
                return Err(GeometryError::Malformed(format!("component `{key}` duplicates a symmetric partner")));
            }
            t.set(&idx, RhoJet::new(coeffs, order));
        }
        Ok(t)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("serialisable")
    }

    pub fn from_json(s: &str) -> Result<AmbientTensor> {
        let doc: AmbientDocument = serde_json::from_str(s).map_err(|e| GeometryError::Malformed(e.to_string()))?;
        AmbientTensor::from_document(&doc)
    }
}

/// JSON form of an ambient tensor. Components map an index label such as
/// `"0,inf"` to the list of `rho`-coefficients; `truncation` is the highest
/// known `rho` power (absent for exact tensors).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmbientDocument {
    pub n: usize,
    pub weight: String,
    pub valence: [usize; 2],
    #[serde(default)]
    pub symmetry: Vec<[usize; 2]>,
    pub truncation: Option<usize>,
    pub components: BTreeMap<String, Vec<String>>,
}

/// Rational from an integer.
pub(crate) fn ri(v: i64) -> Rat {
    Rat::from_integer(v.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn document_round_trip() {
        let t = AmbientTensor::from_fn(3, 0, 2, ri(2), Symmetry::pair(0, 1), |i| {
            RhoJet::new(vec![RatFn::x(1).scale_int(i[0] as i64), RatFn::from_int(i[1] as i64)], 3)
        });
        let back = AmbientTensor::from_json(&t.to_json()).unwrap();
        assert!(back.equals_through(&t));
        assert_eq!(back.order(), 3);
        assert_eq!(back.weight(), &ri(2));
    }

    #[test]
    fn grading_rule() {
        let t = AmbientTensor::zeros(3, 1, 2, ri(1), Symmetry::none());
        assert_eq!(t.t_power(&[0, 0, 4]), ri(1));
        assert_eq!(t.t_power(&[1, 0, 0]), ri(-1));
        assert_eq!(t.t_power(&[0, 2, 3]), ri(2));
    }
}
