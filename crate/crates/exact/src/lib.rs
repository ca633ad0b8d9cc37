//! Exact arithmetic for the ambient metric toolkit: rationals, integer
//! polynomials in `x1..x6, lambda`, rational functions with factored
//! denominators, truncated power series in the ambient variable `rho`, and
//! exact linear solving.

pub mod error;
pub mod gcd;
pub mod jet;
pub mod linsolve;
pub mod poly;
pub mod ratfn;

pub use error::AlgebraError;
pub use jet::RhoJet;
pub use linsolve::{solve_exact, LinearSystem, SolveOutcome};
pub use poly::{Monomial, Poly, Var, LAMBDA_SLOT, MAX_X, NUM_SLOTS};
pub use ratfn::RatFn;

/// Exact rational numbers.
pub type Rat = num_rational::BigRational;

/// Parses `"p"` or `"p/q"` into a rational.
pub fn parse_rat(s: &str) -> Result<Rat, AlgebraError> {
    s.trim().parse::<Rat>().map_err(|e| AlgebraError::Parse {
        offset: 0,
        message: format!("invalid rational `{s}`: {e}"),
    })
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(n.into())
}
