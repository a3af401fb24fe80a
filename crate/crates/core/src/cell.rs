//! Periodic cell problem for the wall law and the constant `B0`.
//!
//! The boundary-layer corrector solves `Δũ = 0` on the strip
//! `{−h(Θ) < R < M}` with `ũ = −h` on the rough wall, `∂_R ũ = 0` on the cap
//! `R = M` and periodicity in `Θ`. The strip is mapped to `(S, Θ) ∈ [0,1] × T¹`
//! by
//!
//! ```text
//! R(S, Θ) = L(S) − h(Θ) w(S)
//! ```
//!
//! where `L` is piecewise linear (`0 → R_flat` on `[0, S_k]`, `R_flat → M`
//! above) and `w(S) = (1 − S/S_k)²` vanishes above the knot `S_k`. Grid rows
//! above the knot are therefore straight lines `R = const`, and the upper part
//! of the strip carries the plain five-point Laplacian.

use num_complex::Complex;
use rustfft::FftPlanner;

use crate::elliptic::operator::{BlendMap, Metric, StripOperator, TopBoundary, Weight};
use crate::elliptic::pcg::{pcg, FourierPreconditioner, SolveStats, SolverOptions};
use crate::elliptic::write_matrix;
use crate::error::{Error, Result};
use crate::geometry::{grid_angle, RoughnessProfile};
use crate::scalar::Real;

/// Truncation height used when none is given.
pub const DEFAULT_M_TRUNC: f64 = 6.0;

/// Resolution and truncation of the cell solve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellOptions {
    pub m_trunc: f64,
    /// Node count in `S` (both blocks together).
    pub n_s: usize,
    /// Node count in `Θ`; must be even.
    pub n_theta: usize,
    pub solver: SolverOptions,
}

impl Default for CellOptions {
    fn default() -> Self {
        Self {
            m_trunc: DEFAULT_M_TRUNC,
            n_s: 513,
            n_theta: 512,
            solver: SolverOptions {
                tol: 1e-12,
                max_iter: 5000,
            },
        }
    }
}

/// Discrete corrector on the mapped strip.
#[derive(Clone, Debug)]
pub struct CellSolution<T> {
    profile: RoughnessProfile<T>,
    m_trunc: T,
    r_flat: T,
    s_knot: T,
    n_s: usize,
    n_theta: usize,
    h: Vec<T>,
    values: Vec<T>,
    stats: SolveStats,
}

/// Solves the truncated cell problem for `profile`.
pub fn solve_cell<T: Real>(
    profile: &RoughnessProfile<T>,
    opts: &CellOptions,
) -> Result<CellSolution<T>> {
    let m_trunc = T::lit(opts.m_trunc);
    if !(m_trunc > T::zero()) || !m_trunc.is_finite() {
        return Err(Error::Range {
            value: opts.m_trunc,
            min: 0.0,
            max: f64::INFINITY,
        });
    }
    if opts.n_theta < 8 || !opts.n_theta.is_multiple_of(2) {
        return Err(Error::InvalidGrid(format!(
            "n_theta must be even and at least 8, got {}",
            opts.n_theta
        )));
    }
    if opts.n_s < 5 {
        return Err(Error::InvalidGrid(format!(
            "n_s must be at least 5, got {}",
            opts.n_s
        )));
    }
    let n_s = opts.n_s;
    let n_theta = opts.n_theta;
    let knot_row = (n_s - 1) / 2;
    let s_knot = T::from_usize_lossy(knot_row) / T::from_usize_lossy(n_s - 1);
    let r_flat = T::one().min(T::lit(0.5) * m_trunc);
    let h: Vec<T> = (0..n_theta)
        .map(|i| profile.eval(grid_angle(i, n_theta)))
        .collect();

    let map = BlendMap::new(
        Metric::Flat,
        (
            Weight::Kinked {
                knot: s_knot,
                knot_value: r_flat,
                end_value: m_trunc,
            },
            vec![T::one(); n_theta],
        ),
        (
            Weight::Ramp { knot: s_knot },
            h.iter().map(|&v| -v).collect(),
        ),
    )?;
    let op = StripOperator::assemble(&map, n_s, TopBoundary::Neumann)?;
    let pre = FourierPreconditioner::new(&op);
    let wall: Vec<T> = h.iter().map(|&v| -v).collect();
    let rhs = op.dirichlet_rhs(&wall, None);
    let mut x = vec![T::zero(); op.unknowns()];
    let stats = pcg(&op, &pre, &rhs, &mut x, &opts.solver)?;
    let mut values = wall;
    values.extend_from_slice(&x);
    Ok(CellSolution {
        profile: profile.clone(),
        m_trunc,
        r_flat,
        s_knot,
        n_s,
        n_theta,
        h,
        values,
        stats,
    })
}

impl<T: Real> CellSolution<T> {
    pub fn profile(&self) -> &RoughnessProfile<T> {
        &self.profile
    }

    pub fn m_trunc(&self) -> T {
        self.m_trunc
    }

    pub fn n_s(&self) -> usize {
        self.n_s
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn stats(&self) -> SolveStats {
        self.stats
    }

    pub fn get(&self, j: usize, i: usize) -> T {
        self.values[j * self.n_theta + i]
    }

    /// Height `R` above the flat reference of node `(j, i)`.
    pub fn height(&self, j: usize, i: usize) -> T {
        let s = T::from_usize_lossy(j) / T::from_usize_lossy(self.n_s - 1);
        self.height_at(s, i)
    }

    fn height_at(&self, s: T, i: usize) -> T {
        let lift = Weight::Kinked {
            knot: self.s_knot,
            knot_value: self.r_flat,
            end_value: self.m_trunc,
        };
        let ramp = Weight::Ramp { knot: self.s_knot };
        lift.value(s) - self.h[i] * ramp.value(s)
    }

    /// Mapped coordinate `S` of height `R` in column `i`.
    fn s_of_height(&self, r: T, i: usize) -> T {
        let h = self.h[i];
        let rf = self.r_flat;
        if r >= rf {
            return self.s_knot + (r - rf) * (T::one() - self.s_knot) / (self.m_trunc - rf);
        }
        // t r_f − h (1 − t)² = R, smaller root
        let two = T::lit(2.0);
        let four = T::lit(4.0);
        let disc = (rf * rf + four * h * (rf - r)).sqrt();
        let t = two * (h + r) / (two * h + rf + disc);
        t * self.s_knot
    }

    /// `ũ(R, Θ_i)` by cubic Lagrange interpolation along `S`.
    pub fn value_at(&self, r: T, i: usize) -> T {
        let s = self.s_of_height(r, i);
        let ns = self.n_s;
        let scaled = s * T::from_usize_lossy(ns - 1);
        let base = scaled.floor().to_usize().unwrap_or(0);
        let j0 = base.saturating_sub(1).min(ns - 4);
        let x = scaled - T::from_usize_lossy(j0);
        let mut acc = T::zero();
        for a in 0..4 {
            let mut w = T::one();
            for b in 0..4 {
                if a != b {
                    w *= (x - T::from_usize_lossy(b))
                        / (T::from_usize_lossy(a) - T::from_usize_lossy(b));
                }
            }
            acc += w * self.get(j0 + a, i);
        }
        acc
    }

    /// `Θ ↦ ũ(R, Θ)` on the grid angles.
    pub fn level(&self, r: T) -> Vec<T> {
        (0..self.n_theta).map(|i| self.value_at(r, i)).collect()
    }

    /// `(Θ_i, ũ(0, Θ_i))`.
    pub fn trace(&self) -> Vec<(T, T)> {
        (0..self.n_theta)
            .map(|i| (grid_angle(i, self.n_theta), self.value_at(T::zero(), i)))
            .collect()
    }

    /// Text dump in the grid matrix format (`n_s n_theta` header).
    pub fn dump<W: std::io::Write>(&self, out: W) -> Result<()> {
        write_matrix(out, self.n_s, self.n_theta, &self.values)
    }
}

/// `∫_{T¹} ũ(0, Θ) dΘ` with the normalised measure `dt/2π` (trapezoidal rule).
pub fn trace_mean<T: Real>(c: &CellSolution<T>) -> T {
    let level = c.level(T::zero());
    level.iter().copied().sum::<T>() / T::from_usize_lossy(level.len())
}

/// Wall-law constant `B0 = λ ρ0 ∫ ũ(0, Θ) dΘ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WallLawConstant<T> {
    pub mean_trace: T,
    pub b0: T,
    pub lambda: T,
    pub rho0: T,
}

pub fn compute_b0<T: Real>(lambda: T, rho0: T, mean_trace: T) -> Result<WallLawConstant<T>> {
    if !(lambda > T::zero()) {
        return Err(Error::Range {
            value: lambda.to_f64_lossy(),
            min: 0.0,
            max: f64::INFINITY,
        });
    }
    if !(rho0 > T::one()) {
        return Err(Error::Range {
            value: rho0.to_f64_lossy(),
            min: 1.0,
            max: f64::INFINITY,
        });
    }
    Ok(WallLawConstant {
        mean_trace,
        b0: lambda * rho0 * mean_trace,
        lambda,
        rho0,
    })
}

/// Normalised discrete Fourier coefficients of `Θ ↦ ũ(R, Θ)`.
///
/// Entry `k` holds mode `k` for `k ≤ n/2` and mode `k − n` above; entry 0 is
/// the mean.
pub fn fourier_trace<T: Real>(c: &CellSolution<T>, r: T) -> Result<Vec<Complex<T>>> {
    let upper = c.m_trunc - T::one();
    if !(r >= T::zero() && r <= upper) {
        return Err(Error::Range {
            value: r.to_f64_lossy(),
            min: 0.0,
            max: upper.to_f64_lossy(),
        });
    }
    let mut buf: Vec<Complex<T>> = c
        .level(r)
        .into_iter()
        .map(|v| Complex::new(v, T::zero()))
        .collect();
    let n = buf.len();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = T::one() / T::from_usize_lossy(n);
    Ok(buf.into_iter().map(|z| z * scale).collect())
}

/// Coefficient of mode `k` (negative modes allowed) from [`fourier_trace`] output.
pub fn mode<T: Real>(coefs: &[Complex<T>], k: i64) -> Complex<T> {
    let n = coefs.len() as i64;
    coefs[k.rem_euclid(n) as usize]
}

/// Empirical check of `sup_Θ |ũ(R, Θ) − mean| ≤ C e^{−μR}`.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayReport<T> {
    pub mu: T,
    /// Smallest `C` consistent with every sampled level.
    pub constant: T,
    /// Whether the deviation never increases with `R`.
    pub monotone: bool,
    /// `(R, sup_Θ |ũ(R, Θ) − mean|)`.
    pub samples: Vec<(T, T)>,
}

impl<T: Real> DecayReport<T> {
    pub fn deviation_at(&self, r: T) -> Option<T> {
        self.samples
            .iter()
            .find(|(x, _)| (*x - r).abs() <= T::lit(1e-9))
            .map(|s| s.1)
    }
}

/// Samples the deviation from the mean on levels `R = 0, 1/4, …, M − 1`.
pub fn decay_check<T: Real>(c: &CellSolution<T>, mu: T) -> Result<DecayReport<T>> {
    if !(mu > T::zero() && mu < T::one()) {
        return Err(Error::Range {
            value: mu.to_f64_lossy(),
            min: 0.0,
            max: 1.0,
        });
    }
    let mean = trace_mean(c);
    let upper = c.m_trunc - T::one();
    let step = T::lit(0.25);
    let count = (upper / step).floor().to_usize().unwrap_or(0);
    let mut samples = Vec::with_capacity(count + 1);
    for k in 0..=count {
        let r = T::from_usize_lossy(k) * step;
        let dev = c
            .level(r)
            .into_iter()
            .map(|v| (v - mean).abs())
            .fold(T::zero(), T::max);
        samples.push((r, dev));
    }
    let constant = samples
        .iter()
        .map(|&(r, d)| (mu * r).exp() * d)
        .fold(T::zero(), T::max);
    let slack = T::lit(1e-12);
    let monotone = samples.windows(2).all(|w| w[1].1 <= w[0].1 + slack);
    Ok(DecayReport {
        mu,
        constant,
        monotone,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coarse() -> CellOptions {
        CellOptions {
            n_s: 65,
            n_theta: 64,
            ..CellOptions::default()
        }
    }

    #[test]
    fn zero_profile_gives_zero_solution() {
        let c = solve_cell(&RoughnessProfile::<f64>::zero(), &coarse()).unwrap();
        assert!(c.values().iter().all(|v| *v == 0.0));
        assert_eq!(trace_mean(&c), 0.0);
        let d = decay_check(&c, 0.9).unwrap();
        assert_eq!(d.constant, 0.0);
        let f = fourier_trace(&c, 1.0).unwrap();
        assert!(f.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn constant_profile_gives_constant_solution() {
        let c = solve_cell(&RoughnessProfile::<f64>::constant(0.4).unwrap(), &coarse()).unwrap();
        assert!(c.values().iter().all(|v| (v + 0.4).abs() < 1e-10));
        assert!((trace_mean(&c) + 0.4).abs() < 1e-10);
        assert!(decay_check(&c, 0.5).unwrap().constant < 1e-9);
    }

    #[test]
    fn mapping_reaches_wall_and_cap() {
        let c = solve_cell(&RoughnessProfile::<f64>::h1(), &coarse()).unwrap();
        for i in 0..c.n_theta() {
            let h = c.profile().eval(grid_angle(i, c.n_theta()));
            assert!((c.height(0, i) + h).abs() < 1e-14);
            assert!((c.height(c.n_s() - 1, i) - 6.0).abs() < 1e-12);
            assert!((c.get(0, i) + h).abs() < 1e-14);
            for j in 0..c.n_s() - 1 {
                assert!(c.height(j + 1, i) > c.height(j, i));
            }
            // the inverse map recovers node heights
            for j in [0, 5, 31, 32, 50] {
                let s = c.s_of_height(c.height(j, i), i);
                assert!((s * 64.0 - j as f64).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn neumann_cap_is_flat() {
        let c = solve_cell(&RoughnessProfile::<f64>::h1(), &coarse()).unwrap();
        let n = c.n_s();
        for i in 0..c.n_theta() {
            // one-sided ∂_S at the cap, second order
            let d = 3.0 * c.get(n - 1, i) - 4.0 * c.get(n - 2, i) + c.get(n - 3, i);
            assert!(d.abs() < 1e-6, "{d}");
        }
    }

    #[test]
    fn compute_b0_values() {
        let lambda = 2.0 * (-0.5f64).exp();
        let rho0 = 0.5f64.exp();
        let w = compute_b0(lambda, rho0, -0.58738).unwrap();
        assert!((w.b0 + 1.17476).abs() < 1e-12);
        let w = compute_b0(lambda, rho0, -0.87754).unwrap();
        assert!((w.b0 + 1.75508).abs() < 1e-12);
        assert_eq!(compute_b0(lambda, rho0, 0.0).unwrap().b0, 0.0);
        assert!(compute_b0(0.0, rho0, 0.1).is_err());
        assert!(compute_b0(lambda, 1.0, 0.1).is_err());
    }

    #[test]
    fn preconditions() {
        let p = RoughnessProfile::<f64>::h1();
        let bad = CellOptions {
            n_theta: 63,
            ..coarse()
        };
        assert!(matches!(solve_cell(&p, &bad), Err(Error::InvalidGrid(_))));
        let bad = CellOptions {
            m_trunc: 0.0,
            ..coarse()
        };
        assert!(matches!(solve_cell(&p, &bad), Err(Error::Range { .. })));
        let c = solve_cell(&p, &coarse()).unwrap();
        assert!(matches!(fourier_trace(&c, 5.5), Err(Error::Range { .. })));
        assert!(matches!(fourier_trace(&c, -0.1), Err(Error::Range { .. })));
        assert!(decay_check(&c, 1.0).is_err());
        assert!(decay_check(&c, 0.0).is_err());
    }

    #[test]
    fn mean_mode_is_the_trace_mean() {
        let c = solve_cell(&RoughnessProfile::<f64>::h1(), &coarse()).unwrap();
        let f = fourier_trace(&c, 0.0).unwrap();
        assert!((f[0].re - trace_mean(&c)).abs() < 1e-14);
        assert!(f[0].im.abs() < 1e-14);
    }
}
