//! Rotationally symmetric Bernoulli solutions on the unit disc.
//!
//! With `u = 1` on the unit circle, `u = offset` on the circle of radius `ρ`
//! and `|u'(ρ)| = λ`, the harmonic profile is
//! `u(r) = rhs·(ln ρ − ln r)/ln ρ + offset` where `λ ρ ln ρ = rhs` and
//! `rhs = 1 − offset`. The uncorrected problem has `offset = 0`; the wall-law
//! corrected one has `offset = −ε B0`.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Closed-form radial solution `(ρ, u)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialSolution<T> {
    pub lambda: T,
    pub rhs: T,
    pub rho: T,
    pub offset: T,
}

impl<T: Real> RadialSolution<T> {
    /// Solution with zero outer Dirichlet value (`λ ρ0 ln ρ0 = 1`).
    pub fn unperturbed(lambda: T) -> Result<Self> {
        Self::with_offset(lambda, T::zero())
    }

    /// Wall-law corrected solution with outer value `−ε B0`.
    pub fn corrected(lambda: T, b0: T, eps: T) -> Result<Self> {
        Self::with_offset(lambda, -b0 * eps)
    }

    fn with_offset(lambda: T, offset: T) -> Result<Self> {
        let rhs = T::one() - offset;
        let rho = solve_radius(lambda, rhs)?;
        Ok(Self {
            lambda,
            rhs,
            rho,
            offset,
        })
    }

    /// `u(r)` for `1 ≤ r ≤ ρ`.
    pub fn eval_u(&self, r: T) -> Result<T> {
        self.check_range(r)?;
        let ln_rho = self.rho.ln();
        Ok(self.rhs * (ln_rho - r.ln()) / ln_rho + self.offset)
    }

    /// `du/dr` for `1 ≤ r ≤ ρ`.
    pub fn eval_du_dr(&self, r: T) -> Result<T> {
        self.check_range(r)?;
        Ok(-self.rhs / (r * self.rho.ln()))
    }

    /// `|u'(ρ)|`, equal to `λ` up to the root-finder tolerance.
    pub fn outer_gradient(&self) -> T {
        self.rhs / (self.rho * self.rho.ln())
    }

    fn check_range(&self, r: T) -> Result<()> {
        // admit rounding at the end points
        let slack = T::lit(64.0) * T::epsilon() * self.rho;
        if !(r >= T::one() - slack && r <= self.rho + slack) {
            return Err(Error::Range {
                value: r.to_f64_lossy(),
                min: 1.0,
                max: self.rho.to_f64_lossy(),
            });
        }
        Ok(())
    }
}

/// Unique `ρ > 1` with `λ ρ ln ρ = rhs`.
///
/// Safeguarded Newton iteration on the bracket `[1, e^{rhs/λ} + 1]`; a step
/// that leaves the current bracket is replaced by bisection.
pub fn solve_radius<T: Real>(lambda: T, rhs: T) -> Result<T> {
    if !(lambda > T::zero()) || !lambda.is_finite() {
        return Err(Error::NoSolution(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    if !(rhs > T::zero()) || !rhs.is_finite() {
        return Err(Error::NoSolution(format!(
            "lambda rho ln rho = {rhs} has no root with rho > 1"
        )));
    }
    let f = |rho: T| lambda * rho * rho.ln() - rhs;
    let mut lo = T::one() + T::lit(1e-12);
    if f(lo) >= T::zero() {
        lo = T::one();
    }
    let mut hi = (rhs / lambda).exp() + T::one();
    if !hi.is_finite() {
        return Err(Error::Numeric(format!(
            "upper bracket overflows for rhs/lambda = {}",
            rhs / lambda
        )));
    }
    let tol = T::lit(1e-12).max(T::lit(4.0) * T::epsilon());
    let machine = T::lit(4.0) * T::epsilon();
    // start from the small-gap expansion ρ ln ρ ≈ (ρ − 1), clipped into the bracket
    let mut rho = (T::one() + rhs / lambda).min(hi).max(lo);
    for _ in 0..200 {
        let fx = f(rho);
        if fx.is_zero() {
            return Ok(rho);
        }
        if fx < T::zero() {
            lo = rho;
        } else {
            hi = rho;
        }
        let slope = lambda * (rho.ln() + T::one());
        let newton = rho - fx / slope;
        let next = if newton > lo && newton < hi {
            newton
        } else {
            T::lit(0.5) * (lo + hi)
        };
        let step = (next - rho).abs();
        rho = next;
        // iterate to machine precision; Newton converges quadratically
        if step <= machine * rho || hi - lo <= machine * rho {
            return Ok(rho);
        }
    }
    let slope = lambda * (rho.ln() + T::one());
    if (f(rho) / slope).abs() <= tol {
        return Ok(rho);
    }
    Err(Error::Numeric(format!(
        "radius root-finder stalled for lambda = {lambda}, rhs = {rhs}"
    )))
}
