//! Rough exterior Bernoulli problem by fixed-point iteration on the free boundary.
//!
//! Each iterate solves the Dirichlet problem `u = 1` on the rough inner curve,
//! `u = 0` on the trial outer curve `r = ρ_k(θ)`, and moves the outer curve
//! according to the mismatch `|∇u_k|/λ − 1`.
//!
//! The default [`UpdateRule::Preconditioned`] rescales each angular Fourier
//! mode of the mismatch by `1 / (1 + |k| coth(|k| L))`, `L = ln(ρ/r_in)`, which
//! is the inverse of the linearised response of the radial solution. The
//! plain rule `ρ ← ρ (1 + τ (|∇u|/λ − 1))` amplifies mode `k` by
//! `1 − τ (1 + |k| coth(|k| L))` and diverges on fine angular grids.

use num_complex::Complex;
use rustfft::FftPlanner;

use crate::elliptic::{
    boundary_gradient, build_layered_mesh, build_mesh, solve_dirichlet_with, GridField, Side,
    SolverOptions,
};
use crate::error::{Error, Result};
use crate::geometry::{
    inner_boundary, reciprocal_integer, CurveDistances, RoughnessProfile, StarCurve,
};
use crate::radial::{solve_radius, RadialSolution};
use crate::scalar::Real;

/// How the gradient mismatch is turned into a boundary displacement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpdateRule {
    /// `ρ ← ρ (1 + τ P⁻¹(|∇u|/λ − 1))` with the radial response multiplier `P`.
    Preconditioned,
    /// `ρ ← ρ (1 + τ (|∇u|/λ − 1))`.
    Plain,
}

/// Problem data and iteration controls.
#[derive(Clone, Debug, PartialEq)]
pub struct BernoulliParams<T> {
    pub lambda: T,
    pub profile: RoughnessProfile<T>,
    pub eps: T,
    pub nr: usize,
    pub ntheta: usize,
    /// Initial relaxation factor in `(0, 1]`; halved whenever a step raises the residual.
    pub tau: T,
    /// Stop once `sup |∇u|/λ − 1| ≤ tol`.
    pub tol: T,
    pub max_iter: usize,
    /// Wall-law constant used for the starting circle `ρ_ε^0`; `None` starts at `ρ0`.
    pub b0: Option<T>,
    pub update: UpdateRule,
    /// Three-point angular smoothing of the gradient trace before the update.
    pub filter: bool,
    /// Knot of the layered mesh interpolation; `None` blends the two curves linearly.
    pub layer_knot: Option<T>,
    pub linear: SolverOptions,
}

impl<T: Real> BernoulliParams<T> {
    pub fn new(lambda: T, profile: RoughnessProfile<T>, eps: T, nr: usize, ntheta: usize) -> Self {
        Self {
            lambda,
            profile,
            eps,
            nr,
            ntheta,
            tau: T::one(),
            tol: T::lit(1e-8),
            max_iter: 200,
            b0: None,
            update: UpdateRule::Preconditioned,
            filter: false,
            layer_knot: Some(T::lit(0.5)),
            linear: SolverOptions {
                tol: 1e-12,
                max_iter: 5000,
            },
        }
    }

    pub fn with_b0(mut self, b0: T) -> Self {
        self.b0 = Some(b0);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > T::zero()) || !self.lambda.is_finite() {
            return Err(Error::Range {
                value: self.lambda.to_f64_lossy(),
                min: 0.0,
                max: f64::INFINITY,
            });
        }
        if !(self.tau > T::zero() && self.tau <= T::one()) {
            return Err(Error::Range {
                value: self.tau.to_f64_lossy(),
                min: 0.0,
                max: 1.0,
            });
        }
        if !(self.tol > T::zero()) {
            return Err(Error::Range {
                value: self.tol.to_f64_lossy(),
                min: 0.0,
                max: f64::INFINITY,
            });
        }
        if self.nr < 3 || self.ntheta < 8 {
            return Err(Error::InvalidGrid(format!(
                "need nr >= 3 and ntheta >= 8, got {} x {}",
                self.nr, self.ntheta
            )));
        }
        reciprocal_integer(self.eps)?;
        // checks eps·max h < 1 and the grid/period compatibility
        inner_boundary(&self.profile, self.eps, self.ntheta).map(|_| ())
    }

    /// Rough inner boundary `r = 1 − ε h(θ/ε)` on the solver grid.
    pub fn inner(&self) -> Result<StarCurve<T>> {
        inner_boundary(&self.profile, self.eps, self.ntheta)
    }

    /// Radius of the starting circle.
    pub fn initial_radius(&self) -> Result<T> {
        match self.b0 {
            Some(b0) => Ok(RadialSolution::corrected(self.lambda, b0, self.eps)?.rho),
            None => solve_radius(self.lambda, T::one()),
        }
    }
}

/// One trial domain with its potential.
#[derive(Clone, Debug)]
pub struct FreeBoundaryState<T> {
    pub outer: StarCurve<T>,
    pub field: GridField<T>,
    /// `|∇u|` at the outer nodes.
    pub gradient: Vec<T>,
    /// `sup_θ ||∇u| − λ| / λ`.
    pub residual: T,
    pub iteration: usize,
    /// Residual of every accepted iterate, starting with the initial guess.
    pub history: Vec<T>,
    /// Relaxation factor in use when the iteration stopped.
    pub tau: T,
    pub filtered: bool,
}

/// `sup_θ ||∇u|(θ) − λ| / λ` for a sampled gradient.
pub fn gradient_residual<T: Real>(gradient: &[T], lambda: T) -> T {
    gradient
        .iter()
        .map(|&g| ((g - lambda) / lambda).abs())
        .fold(T::zero(), T::max)
}

/// Recomputes the free-boundary residual of a solved state.
pub fn residual<T: Real>(state: &FreeBoundaryState<T>, lambda: T) -> T {
    gradient_residual(&boundary_gradient(&state.field, Side::Outer), lambda)
}

/// Solves the Dirichlet problem on the domain bounded by `outer`.
pub fn trial_state<T: Real>(
    p: &BernoulliParams<T>,
    inner: &StarCurve<T>,
    outer: StarCurve<T>,
    guess: Option<&GridField<T>>,
) -> Result<FreeBoundaryState<T>> {
    let mesh = match p.layer_knot {
        Some(knot) => build_layered_mesh(inner.clone(), outer.clone(), p.nr, p.ntheta, knot),
        None => build_mesh(inner.clone(), outer.clone(), p.nr, p.ntheta),
    }
    .map_err(|e| Error::Geometry(format!("trial boundary rejected: {e}")))?;
    let ones = vec![T::one(); p.ntheta];
    let zeros = vec![T::zero(); p.ntheta];
    let field = solve_dirichlet_with(&mesh, &ones, &zeros, &p.linear, guess)?;
    let mut gradient = boundary_gradient(&field, Side::Outer);
    if p.filter {
        gradient = smooth3(&gradient);
    }
    let residual = gradient_residual(&gradient, p.lambda);
    Ok(FreeBoundaryState {
        outer,
        field,
        gradient,
        residual,
        iteration: 0,
        history: vec![residual],
        tau: p.tau,
        filtered: p.filter,
    })
}

fn smooth3<T: Real>(g: &[T]) -> Vec<T> {
    let n = g.len();
    let q = T::lit(0.25);
    (0..n)
        .map(|i| q * (g[(i + n - 1) % n] + g[(i + 1) % n]) + T::lit(0.5) * g[i])
        .collect()
}

/// Outer curve after one update step of size `tau` from `state`.
pub fn update_boundary<T: Real>(
    p: &BernoulliParams<T>,
    inner: &StarCurve<T>,
    state: &FreeBoundaryState<T>,
    tau: T,
) -> Result<StarCurve<T>> {
    let mismatch: Vec<T> = state
        .gradient
        .iter()
        .map(|&g| g / p.lambda - T::one())
        .collect();
    let step = match p.update {
        UpdateRule::Plain => mismatch,
        UpdateRule::Preconditioned => {
            let gap = (state.outer.mean_radius() / inner.mean_radius()).ln();
            response_inverse(&mismatch, gap)
        }
    };
    let radii: Vec<T> = state
        .outer
        .radii()
        .iter()
        .zip(&step)
        .map(|(&r, &d)| r * (T::one() + tau * d))
        .collect();
    for (i, (&r, &ri)) in radii.iter().zip(inner.radii()).enumerate() {
        if !r.is_finite() || !(r > ri) {
            return Err(Error::Geometry(format!(
                "free boundary meets the rough wall at sample {i} (r = {r}, wall = {ri})"
            )));
        }
    }
    StarCurve::new(radii)
}

/// Divides each Fourier mode of `v` by `1 + |k| coth(|k| L)` (`1 + 1/L` for `k = 0`).
fn response_inverse<T: Real>(v: &[T], gap: T) -> Vec<T> {
    let n = v.len();
    let mut buf: Vec<Complex<T>> = v.iter().map(|&x| Complex::new(x, T::zero())).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    for (k, z) in buf.iter_mut().enumerate() {
        let m = T::from_usize_lossy(k.min(n - k));
        let gain = if k == 0 {
            T::one() + T::one() / gap
        } else {
            T::one() + m / (m * gap).tanh()
        };
        *z = *z / gain;
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let scale = T::one() / T::from_usize_lossy(n);
    buf.into_iter().map(|z| z.re * scale).collect()
}

/// Damped fixed-point iteration from the circle of radius [`BernoulliParams::initial_radius`].
pub fn solve_free_boundary<T: Real>(p: &BernoulliParams<T>) -> Result<FreeBoundaryState<T>> {
    p.validate()?;
    let inner = p.inner()?;
    let outer = StarCurve::circle(p.initial_radius()?, p.ntheta)?;
    let start = trial_state(p, &inner, outer, None)?;
    iterate_from(p, &inner, start)
}

/// Continues the fixed-point iteration from a solved state.
pub fn iterate_from<T: Real>(
    p: &BernoulliParams<T>,
    inner: &StarCurve<T>,
    mut state: FreeBoundaryState<T>,
) -> Result<FreeBoundaryState<T>> {
    let mut tau = p.tau;
    let tau_floor = T::lit(1.0 / 1024.0);
    let mut history = state.history.clone();
    let mut iteration = state.iteration;
    while state.residual > p.tol {
        if iteration >= p.max_iter {
            return Err(Error::NonConvergence {
                history: history.iter().map(|r| r.to_f64_lossy()).collect(),
            });
        }
        iteration += 1;
        let outer = update_boundary(p, inner, &state, tau)?;
        let next = trial_state(p, inner, outer, Some(&state.field))?;
        if next.residual > state.residual {
            // reject the step and retry with a shorter one
            tau *= T::lit(0.5);
            if tau < tau_floor {
                history.push(next.residual);
                return Err(Error::NonConvergence {
                    history: history.iter().map(|r| r.to_f64_lossy()).collect(),
                });
            }
            continue;
        }
        history.push(next.residual);
        state = next;
    }
    state.iteration = iteration;
    state.history = history;
    state.tau = tau;
    Ok(state)
}

/// Distances from the computed free boundary to one reference circle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistanceRecord<T> {
    pub radius: T,
    pub dh: T,
    pub d1: T,
    pub d2: T,
    pub dh_over_eps: T,
    pub dh_over_eps2: T,
}

impl<T: Real> DistanceRecord<T> {
    fn against(outer: &StarCurve<T>, radius: T, eps: T) -> Result<Self> {
        let circle = StarCurve::circle(radius, outer.len())?;
        let d = CurveDistances::between(outer, &circle);
        Ok(Self {
            radius,
            dh: d.hausdorff,
            d1: d.d1,
            d2: d.d2,
            dh_over_eps: d.hausdorff / eps,
            dh_over_eps2: d.hausdorff / (eps * eps),
        })
    }
}

/// Distances to the corrected disc `ρ_ε^0` and to the uncorrected disc `ρ0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EffectiveComparison<T> {
    pub corrected: DistanceRecord<T>,
    pub baseline: DistanceRecord<T>,
}

pub fn compare_to_effective<T: Real>(
    state: &FreeBoundaryState<T>,
    p: &BernoulliParams<T>,
    b0: T,
) -> Result<EffectiveComparison<T>> {
    let rho_eps = RadialSolution::corrected(p.lambda, b0, p.eps)?.rho;
    let rho0 = solve_radius(p.lambda, T::one())?;
    Ok(EffectiveComparison {
        corrected: DistanceRecord::against(&state.outer, rho_eps, p.eps)?,
        baseline: DistanceRecord::against(&state.outer, rho0, p.eps)?,
    })
}
