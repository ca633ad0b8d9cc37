//! Exact sparse linear algebra over the rationals.
//!
//! Elimination records, for every reduced row, which combination of the
//! original equations produced it. That gives right-hand-side-independent
//! solving (the same factorisation applies to rational or rational-function
//! right-hand sides) and explicit certificates of inconsistency.

use num_traits::{One, Zero};

use crate::ratfn::RatFn;
use crate::Rat;

type SparseRow = Vec<(usize, Rat)>;

/// Values a right-hand side can take: anything forming a vector space over `Q`.
pub trait LinearValue: Clone {
    fn zero_value() -> Self;
    fn add_value(&self, other: &Self) -> Self;
    fn scale_value(&self, c: &Rat) -> Self;
    fn is_zero_value(&self) -> bool;
}

impl LinearValue for Rat {
    fn zero_value() -> Self {
        Zero::zero()
    }
    fn add_value(&self, other: &Self) -> Self {
        self + other
    }
    fn scale_value(&self, c: &Rat) -> Self {
        self * c
    }
    fn is_zero_value(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl LinearValue for RatFn {
    fn zero_value() -> Self {
        RatFn::zero()
    }
    fn add_value(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn scale_value(&self, c: &Rat) -> Self {
        self.scale(c)
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
}

/// A sparse system `A x = b` with rational entries.
#[derive(Clone, Debug, Default)]
pub struct LinearSystem {
    ncols: usize,
    rows: Vec<SparseRow>,
    rhs: Vec<Rat>,
}

impl LinearSystem {
    pub fn new(ncols: usize) -> LinearSystem {
        LinearSystem { ncols, rows: Vec::new(), rhs: Vec::new() }
    }

    pub fn from_dense(a: &[Vec<Rat>], b: &[Rat]) -> LinearSystem {
        let ncols = a.first().map_or(0, Vec::len);
        let mut sys = LinearSystem::new(ncols);
        for (row, rhs) in a.iter().zip(b) {
            sys.push_row(row.iter().cloned().enumerate().collect(), rhs.clone());
        }
        sys
    }

    /// Adds an equation given as `(column, coefficient)` pairs.
    pub fn push_row(&mut self, coeffs: Vec<(usize, Rat)>, rhs: Rat) {
        self.rows.push(normalize_row(coeffs));
        self.rhs.push(rhs);
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn rhs(&self) -> &[Rat] {
        &self.rhs
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SolveOutcome {
    Unique(Vec<Rat>),
    Underdetermined { particular: Vec<Rat>, nullspace: Vec<Vec<Rat>>, rank: usize },
    /// `witness` is a row vector `y` with `y A = 0` and `y b != 0`.
    Inconsistent { witness: Vec<Rat> },
}

fn normalize_row(mut coeffs: Vec<(usize, Rat)>) -> SparseRow {
    coeffs.sort_by_key(|e| e.0);
    let mut out: SparseRow = Vec::with_capacity(coeffs.len());
    for (c, v) in coeffs {
        match out.last_mut() {
            Some(last) if last.0 == c => last.1 += v,
            _ => out.push((c, v)),
        }
    }
    out.retain(|e| !e.1.is_zero());
    out
}

/// `a + s * b` for sorted sparse rows.
fn axpy(a: &[(usize, Rat)], s: &Rat, b: &[(usize, Rat)]) -> SparseRow {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, s * &b[j].1));
            j += 1;
        } else {
            let v = &a[i].1 + s * &b[j].1;
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn lookup(row: &[(usize, Rat)], col: usize) -> Option<&Rat> {
    row.binary_search_by_key(&col, |e| e.0).ok().map(|i| &row[i].1)
}

/// Reduced row echelon form of a coefficient matrix, with row histories.
#[derive(Clone, Debug)]
pub struct Elimination {
    ncols: usize,
    /// `(pivot column, reduced row over free columns, history)`.
    pivots: Vec<(usize, SparseRow, SparseRow)>,
    free: Vec<usize>,
    /// Histories of rows that reduced to zero: left null vectors of `A`.
    left_null: Vec<SparseRow>,
}

impl Elimination {
    pub fn new(sys: &LinearSystem) -> Elimination {
        let mut pivot_of: Vec<Option<usize>> = vec![None; sys.ncols];
        let mut prow: Vec<(usize, SparseRow, SparseRow)> = Vec::new();
        let mut left_null = Vec::new();
        for (ri, row) in sys.rows.iter().enumerate() {
            let mut row = row.clone();
            let mut hist: SparseRow = vec![(ri, Rat::one())];
            loop {
                let hit = row.iter().find_map(|(c, v)| pivot_of[*c].map(|p| (p, v.clone())));
                match hit {
                    Some((p, v)) => {
                        let s = -v;
                        row = axpy(&row, &s, &prow[p].1);
                        hist = axpy(&hist, &s, &prow[p].2);
                    }
                    None => break,
                }
            }
            match row.first() {
                None => left_null.push(hist),
                Some((c, v)) => {
                    let inv = v.recip();
                    let c = *c;
                    row = row.into_iter().map(|(k, x)| (k, x * &inv)).collect();
                    hist = hist.into_iter().map(|(k, x)| (k, x * &inv)).collect();
                    pivot_of[c] = Some(prow.len());
                    prow.push((c, row, hist));
                }
            }
        }
        // Back elimination: clear every pivot column from the other pivot rows.
        let mut order: Vec<usize> = (0..prow.len()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(prow[i].0));
        for &pi in &order {
            let (pc, prow_coeffs, phist) = prow[pi].clone();
            for qi in 0..prow.len() {
                if qi == pi {
                    continue;
                }
                if let Some(v) = lookup(&prow[qi].1, pc).cloned() {
                    let s = -v;
                    let r = axpy(&prow[qi].1, &s, &prow_coeffs);
                    let h = axpy(&prow[qi].2, &s, &phist);
                    prow[qi].1 = r;
                    prow[qi].2 = h;
                }
            }
        }
        let mut free = Vec::new();
        for (c, p) in pivot_of.iter().enumerate() {
            if p.is_none() {
                free.push(c);
            }
        }
        prow.sort_by_key(|p| p.0);
        Elimination { ncols: sys.ncols, pivots: prow, free, left_null }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn free_columns(&self) -> &[usize] {
        &self.free
    }

    /// Basis of the null space, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<Rat>> {
        self.free
            .iter()
            .map(|&f| {
                let mut v = vec![Rat::zero(); self.ncols];
                v[f] = Rat::one();
                for (pc, row, _) in &self.pivots {
                    if let Some(a) = lookup(row, f) {
                        v[*pc] = -a.clone();
                    }
                }
                v
            })
            .collect()
    }

    /// Particular solution with free variables set to zero, or a left null
    /// vector exposing inconsistency.
    pub fn solve<T: LinearValue>(&self, rhs: &[T]) -> Result<Vec<T>, Vec<Rat>> {
        let combine = |hist: &SparseRow| -> T {
            hist.iter().fold(T::zero_value(), |acc, (i, c)| acc.add_value(&rhs[*i].scale_value(c)))
        };
        for y in &self.left_null {
            if !combine(y).is_zero_value() {
                let mut w = vec![Rat::zero(); rhs.len()];
                for (i, c) in y {
                    w[*i] = c.clone();
                }
                return Err(w);
            }
        }
        let mut x = vec![T::zero_value(); self.ncols];
        for (pc, _, hist) in &self.pivots {
            x[*pc] = combine(hist);
        }
        Ok(x)
    }
}

/// Solves `sys` exactly.
pub fn solve_exact(sys: &LinearSystem) -> SolveOutcome {
    let elim = Elimination::new(sys);
    match elim.solve(&sys.rhs) {
        Err(witness) => SolveOutcome::Inconsistent { witness },
        Ok(x) if elim.free.is_empty() => SolveOutcome::Unique(x),
        Ok(particular) => {
            SolveOutcome::Underdetermined { particular, nullspace: elim.nullspace(), rank: elim.rank() }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, rat_int};

    fn r(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| rat_int(x)).collect()
    }

    #[test]
    fn unique_solution() {
        let sys = LinearSystem::from_dense(&[r(&[2, 1]), r(&[1, 3])], &r(&[3, 5]));
        assert_eq!(solve_exact(&sys), SolveOutcome::Unique(vec![rat(4, 5), rat(7, 5)]));
    }

    #[test]
    fn underdetermined_nullspace() {
        let a = [r(&[1, 2, 3]), r(&[2, 4, 6])];
        let sys = LinearSystem::from_dense(&a, &r(&[1, 2]));
        match solve_exact(&sys) {
            SolveOutcome::Underdetermined { particular, nullspace, rank } => {
                assert_eq!(rank, 1);
                assert_eq!(nullspace.len(), 2);
                for v in nullspace.iter().chain(std::iter::once(&particular)) {
                    let lhs: Rat = a[0].iter().zip(v).map(|(x, y)| x * y).sum();
                    let expected = if std::ptr::eq(v, &particular) { rat_int(1) } else { rat_int(0) };
                    assert_eq!(lhs, expected);
                }
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn inconsistent_witness() {
        let a = [r(&[1, 1]), r(&[2, 2])];
        let b = r(&[1, 3]);
        let sys = LinearSystem::from_dense(&a, &b);
        let SolveOutcome::Inconsistent { witness } = solve_exact(&sys) else { panic!() };
        for col in 0..2 {
            let s: Rat = (0..2).map(|i| &witness[i] * &a[i][col]).sum();
            assert!(s.is_zero());
        }
        let yb: Rat = witness.iter().zip(&b).map(|(y, v)| y * v).sum();
        assert!(!yb.is_zero());
    }
}
