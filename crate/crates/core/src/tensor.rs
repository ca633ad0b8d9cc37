//! Dense chart tensors with rational-function components.

use std::collections::BTreeMap;

use ambient_exact::RatFn;
use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};

/// Pairs of index slots under which a tensor is symmetric.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Symmetry(pub Vec<(usize, usize)>);

impl Symmetry {
    pub fn none() -> Symmetry {
        Symmetry(Vec::new())
    }

    pub fn pair(a: usize, b: usize) -> Symmetry {
        Symmetry(vec![(a, b)])
    }

    /// Whether `idx` is the representative of its symmetry class.
    pub fn is_canonical(&self, idx: &[usize]) -> bool {
        self.0.iter().all(|&(a, b)| idx[a] <= idx[b])
    }

    /// The canonical representative of `idx`.
    pub fn canonical(&self, idx: &[usize]) -> Vec<usize> {
        let mut out = idx.to_vec();
        for &(a, b) in &self.0 {
            if out[a] > out[b] {
                out.swap(a, b);
            }
        }
        out
    }
}

/// Row-major flattening of multi-indices over `0..dim`.
pub(crate) fn flat_index(dim: usize, idx: &[usize]) -> usize {
    idx.iter().fold(0, |acc, &i| acc * dim + i)
}

pub(crate) fn unflatten(dim: usize, rank: usize, mut k: usize) -> Vec<usize> {
    let mut idx = vec![0; rank];
    for slot in (0..rank).rev() {
        idx[slot] = k % dim;
        k /= dim;
    }
    idx
}

/// All multi-indices of the given rank.
pub(crate) fn multi_indices(dim: usize, rank: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..dim.pow(rank as u32)).map(move |k| unflatten(dim, rank, k))
}

/// A tensor field on a chart: contravariant slots first, then covariant.
#[derive(Clone, Debug)]
pub struct TensorField {
    dim: usize,
    upper: usize,
    lower: usize,
    symmetry: Symmetry,
    comps: Vec<RatFn>,
}

impl TensorField {
    pub fn zeros(dim: usize, upper: usize, lower: usize, symmetry: Symmetry) -> TensorField {
        TensorField {
            dim,
            upper,
            lower,
            symmetry,
            comps: vec![RatFn::zero(); dim.pow((upper + lower) as u32)],
        }
    }

    /// Builds a tensor by evaluating `f` on canonical indices and copying to
    /// symmetric partners.
    pub fn from_fn(
        dim: usize,
        upper: usize,
        lower: usize,
        symmetry: Symmetry,
        mut f: impl FnMut(&[usize]) -> RatFn,
    ) -> TensorField {
        let mut t = TensorField::zeros(dim, upper, lower, symmetry);
        let rank = upper + lower;
        for idx in multi_indices(dim, rank) {
            if t.symmetry.is_canonical(&idx) {
                let v = f(&idx).reduce();
                t.set(&idx, v);
            }
        }
        t
    }

    pub fn try_from_fn(
        dim: usize,
        upper: usize,
        lower: usize,
        symmetry: Symmetry,
        mut f: impl FnMut(&[usize]) -> Result<RatFn>,
    ) -> Result<TensorField> {
        let mut t = TensorField::zeros(dim, upper, lower, symmetry);
        for idx in multi_indices(dim, upper + lower) {
            if t.symmetry.is_canonical(&idx) {
                let v = f(&idx)?.reduce();
                t.set(&idx, v);
            }
        }
        Ok(t)
    }

    /// Symmetric `(0,2)` tensor from a matrix.
    pub fn sym2(dim: usize, m: &[Vec<RatFn>]) -> TensorField {
        TensorField::from_fn(dim, 0, 2, Symmetry::pair(0, 1), |i| m[i[0]][i[1]].clone())
    }

    pub fn scalar(dim: usize, v: RatFn) -> TensorField {
        let mut t = TensorField::zeros(dim, 0, 0, Symmetry::none());
        t.comps[0] = v;
        t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn valence(&self) -> (usize, usize) {
        (self.upper, self.lower)
    }

    pub fn rank(&self) -> usize {
        self.upper + self.lower
    }

    pub fn symmetry(&self) -> &Symmetry {
        &self.symmetry
    }

    pub fn comps(&self) -> &[RatFn] {
        &self.comps
    }

    pub fn get(&self, idx: &[usize]) -> &RatFn {
        &self.comps[flat_index(self.dim, idx)]
    }

    pub fn at(&self, idx: &[usize]) -> RatFn {
        self.get(idx).clone()
    }

    /// Sets a component and all of its symmetric partners.
    pub fn set(&mut self, idx: &[usize], v: RatFn) {
        let mut stack = vec![idx.to_vec()];
        let mut seen = Vec::new();
        while let Some(i) = stack.pop() {
            let k = flat_index(self.dim, &i);
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

    /// Drops declared symmetries (components are unchanged).
    pub fn without_symmetry(mut self) -> TensorField {
        self.symmetry = Symmetry::none();
        self
    }

    pub fn with_symmetry(mut self, s: Symmetry) -> TensorField {
        self.symmetry = s;
        self
    }

    pub fn map(&self, f: impl Fn(&RatFn) -> RatFn) -> TensorField {
        TensorField {
            dim: self.dim,
            upper: self.upper,
            lower: self.lower,
            symmetry: self.symmetry.clone(),
            comps: self.comps.iter().map(|c| f(c).reduce()).collect(),
        }
    }

    pub fn try_map(&self, f: impl Fn(&RatFn) -> Result<RatFn>) -> Result<TensorField> {
        Ok(TensorField {
            dim: self.dim,
            upper: self.upper,
            lower: self.lower,
            symmetry: self.symmetry.clone(),
            comps: self.comps.iter().map(|c| f(c).map(|v| v.reduce())).collect::<Result<_>>()?,
        })
    }

    fn check_same_shape(&self, other: &TensorField) -> Result<()> {
        if self.dim != other.dim || self.valence() != other.valence() {
            return Err(GeometryError::Valence(format!(
                "shapes {:?}/{} and {:?}/{} differ",
                self.valence(),
                self.dim,
                other.valence(),
                other.dim
            )));
        }
        Ok(())
    }

    fn zip(&self, other: &TensorField, f: impl Fn(&RatFn, &RatFn) -> RatFn) -> Result<TensorField> {
        self.check_same_shape(other)?;
        let symmetry = if self.symmetry == other.symmetry { self.symmetry.clone() } else { Symmetry::none() };
        Ok(TensorField {
            dim: self.dim,
            upper: self.upper,
            lower: self.lower,
            symmetry,
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| f(a, b).reduce()).collect(),
        })
    }

    pub fn add(&self, other: &TensorField) -> Result<TensorField> {
        self.zip(other, RatFn::add)
    }

    pub fn sub(&self, other: &TensorField) -> Result<TensorField> {
        self.zip(other, RatFn::sub)
    }

    pub fn scale(&self, c: &RatFn) -> TensorField {
        self.map(|x| x.mul(c))
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(RatFn::is_zero)
    }

    /// First non-zero component, as `(index, value)`.
    pub fn first_nonzero(&self) -> Option<(Vec<usize>, RatFn)> {
        self.comps
            .iter()
            .enumerate()
            .find(|(_, c)| !c.is_zero())
            .map(|(k, c)| (unflatten(self.dim, self.rank(), k), c.clone()))
    }

    /// Componentwise exact equality.
    pub fn equals(&self, other: &TensorField) -> bool {
        self.dim == other.dim
            && self.valence() == other.valence()
            && self.comps.iter().zip(&other.comps).all(|(a, b)| a.equals(b))
    }

    /// Checks the declared symmetries componentwise.
    pub fn symmetries_hold(&self) -> bool {
        multi_indices(self.dim, self.rank()).all(|idx| {
            self.symmetry.0.iter().all(|&(a, b)| {
                let mut j = idx.clone();
                j.swap(a, b);
                self.get(&idx).equals(self.get(&j))
            })
        })
    }

    /// Applies `f` to every component (e.g. substitution or Taylor expansion).
    pub fn map_components(&self, f: impl Fn(&RatFn) -> Result<RatFn>) -> Result<TensorField> {
        self.try_map(f)
    }

    /// Symmetric-pair representative key such as `"12"` (1-based indices).
    pub fn index_key(idx: &[usize]) -> String {
        idx.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(if idx.iter().any(|&i| i >= 9) { "," } else { "" })
    }

    fn parse_key(key: &str, rank: usize, dim: usize) -> Result<Vec<usize>> {
        let parts: Vec<&str> = if key.contains(',') {
            key.split(',').collect()
        } else {
            key.split("").filter(|s| !s.is_empty()).collect()
        };
        if parts.len() != rank {
            return Err(GeometryError::Malformed(format!("index `{key}` has wrong rank")));
        }
        parts
            .iter()
            .map(|p| match p.parse::<usize>() {
                Ok(i) if (1..=dim).contains(&i) => Ok(i - 1),
                _ => Err(GeometryError::Malformed(format!("bad index `{key}`"))),
            })
            .collect()
    }

    pub fn to_document(&self, signature: Option<(usize, usize)>) -> TensorDocument {
        let mut components = BTreeMap::new();
        for idx in multi_indices(self.dim, self.rank()) {
            let c = self.get(&idx);
            if self.symmetry.is_canonical(&idx) && !c.is_zero() {
                components.insert(TensorField::index_key(&idx), c.to_string());
            }
        }
        TensorDocument {
            dim: self.dim,
            signature,
            valence: [self.upper, self.lower],
            symmetry: self.symmetry.0.iter().map(|&(a, b)| [a, b]).collect(),
            components,
        }
    }

    pub fn from_document(doc: &TensorDocument) -> Result<TensorField> {
        let [upper, lower] = doc.valence;
        if upper + lower > 4 {
            return Err(GeometryError::Malformed("total valence above 4".into()));
        }
        let symmetry = Symmetry(doc.symmetry.iter().map(|p| (p[0], p[1])).collect());
        if symmetry.0.iter().any(|&(a, b)| a >= upper + lower || b >= upper + lower || a == b) {
            return Err(GeometryError::Malformed("symmetry slot out of range".into()));
        }
        let mut t = TensorField::zeros(doc.dim, upper, lower, Symmetry::none());
        for (key, text) in &doc.components {
            let idx = TensorField::parse_key(key, upper + lower, doc.dim)?;
            let v = RatFn::parse(text).map_err(|e| GeometryError::Malformed(format!("component {key}: {e}")))?;
            t.set(&idx, v);
        }
        // Fill symmetric partners that were omitted, then check consistency.
        let mut full = t.clone().with_symmetry(symmetry.clone());
        for idx in multi_indices(doc.dim, upper + lower) {
            let c = t.get(&idx);
            if !c.is_zero() {
                for &(a, b) in &symmetry.0 {
                    let mut j = idx.clone();
                    j.swap(a, b);
                    let partner = t.get(&j);
                    if partner.is_zero() {
                        full.comps[flat_index(doc.dim, &j)] = c.clone();
                    } else if !partner.equals(c) {
                        return Err(GeometryError::Malformed(format!(
                            "component {} violates the declared symmetry",
                            TensorField::index_key(&idx)
                        )));
                    }
                }
            }
        }
        Ok(full)
    }

    pub fn to_json(&self, signature: Option<(usize, usize)>) -> String {
        serde_json::to_string_pretty(&self.to_document(signature)).expect("serialisable")
    }

    pub fn from_json(s: &str) -> Result<TensorField> {
        let doc: TensorDocument = serde_json::from_str(s).map_err(|e| GeometryError::Malformed(e.to_string()))?;
        TensorField::from_document(&doc)
    }
}

/// Serialised form of a [`TensorField`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorDocument {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signature: Option<(usize, usize)>,
    pub valence: [usize; 2],
    #[serde(default)]
    pub symmetry: Vec<[usize; 2]>,
    pub components: BTreeMap<String, String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_keeps_symmetry() {
        let m = vec![
            vec![RatFn::x(1), RatFn::from_int(2), RatFn::zero()],
            vec![RatFn::from_int(2), RatFn::zero(), RatFn::lambda()],
            vec![RatFn::zero(), RatFn::lambda(), RatFn::one()],
        ];
        let t = TensorField::sym2(3, &m);
        let s = t.to_json(Some((3, 0)));
        let back = TensorField::from_json(&s).unwrap();
        assert!(back.equals(&t));
        assert!(back.symmetries_hold());
        assert_eq!(t.to_document(None).components.len(), 4);
    }

    #[test]
    fn inconsistent_symmetric_input_is_rejected() {
        let doc = r#"{"dim":2,"valence":[0,2],"symmetry":[[0,1]],"components":{"12":"1","21":"2"}}"#;
        assert!(TensorField::from_json(doc).is_err());
    }
}
