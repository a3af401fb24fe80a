//! Star-shaped curves, rough disc boundaries and curve metrics.
//!
//! A star-shaped curve is stored by its polar radius `f(θ_i)` at `N` uniform
//! angles `θ_i = 2πi/N`. Between samples the curve is the straight chord, so
//! every curve is a closed polygon around the origin.

use std::borrow::Cow;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Built-in roughness shapes plus user tables.
#[derive(Clone, Debug, PartialEq)]
pub enum ProfileKind<T> {
    /// `h(Θ) = 1 - cos Θ`
    H1,
    /// `h(Θ) = π - |Θ - π|` on `[0, 2π)`
    H2,
    /// `h ≡ c` with `c ≥ 0`
    Constant(T),
    /// Periodic piecewise-linear interpolant through `(Θ_i, h_i)`.
    Tabulated { theta: Vec<T>, value: Vec<T> },
}

/// Nonnegative, 2π-periodic Lipschitz roughness profile `h` on the torus.
#[derive(Clone, Debug, PartialEq)]
pub struct RoughnessProfile<T> {
    kind: ProfileKind<T>,
    lipschitz_bound: T,
}

impl<T: Real> RoughnessProfile<T> {
    pub fn h1() -> Self {
        Self {
            kind: ProfileKind::H1,
            lipschitz_bound: T::one(),
        }
    }

    pub fn h2() -> Self {
        Self {
            kind: ProfileKind::H2,
            lipschitz_bound: T::one(),
        }
    }

    pub fn zero() -> Self {
        Self {
            kind: ProfileKind::Constant(T::zero()),
            lipschitz_bound: T::zero(),
        }
    }

    pub fn constant(c: T) -> Result<Self> {
        if !(c >= T::zero()) || !c.is_finite() {
            return Err(Error::InvalidProfile(format!(
                "constant profile must be finite and nonnegative, got {c}"
            )));
        }
        Ok(Self {
            kind: ProfileKind::Constant(c),
            lipschitz_bound: T::zero(),
        })
    }

    /// Builds a tabulated profile from samples over one period.
    ///
    /// Angles must lie in `[0, 2π)` and be strictly increasing; values must be
    /// finite and nonnegative.
    pub fn tabulated(samples: &[(T, T)]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidProfile("empty table".into()));
        }
        let two_pi = T::TAU();
        let mut prev: Option<T> = None;
        for (k, &(t, v)) in samples.iter().enumerate() {
            if !t.is_finite() || t < T::zero() || t >= two_pi {
                return Err(Error::InvalidProfile(format!(
                    "sample {k}: angle {t} outside [0, 2π)"
                )));
            }
            if let Some(p) = prev {
                if t <= p {
                    return Err(Error::InvalidProfile(format!(
                        "sample {k}: angles must be strictly increasing"
                    )));
                }
            }
            if !v.is_finite() || v < T::zero() {
                return Err(Error::InvalidProfile(format!(
                    "sample {k}: value {v} is negative or not finite"
                )));
            }
            prev = Some(t);
        }
        let theta: Vec<T> = samples.iter().map(|s| s.0).collect();
        let value: Vec<T> = samples.iter().map(|s| s.1).collect();
        let n = theta.len();
        let mut lip = T::zero();
        for k in 0..n {
            let (t0, v0) = (theta[k], value[k]);
            let (t1, v1) = if k + 1 < n {
                (theta[k + 1], value[k + 1])
            } else {
                (theta[0] + two_pi, value[0])
            };
            lip = lip.max(((v1 - v0) / (t1 - t0)).abs());
        }
        Ok(Self {
            kind: ProfileKind::Tabulated { theta, value },
            lipschitz_bound: lip,
        })
    }

    pub fn kind(&self) -> &ProfileKind<T> {
        &self.kind
    }

    pub fn lipschitz_bound(&self) -> T {
        self.lipschitz_bound
    }

    /// Short name used in reports and file headers.
    pub fn name(&self) -> String {
        match &self.kind {
            ProfileKind::H1 => "h1".into(),
            ProfileKind::H2 => "h2".into(),
            ProfileKind::Constant(c) if c.is_zero() => "zero".into(),
            ProfileKind::Constant(c) => format!("const:{c}"),
            ProfileKind::Tabulated { theta, .. } => format!("table[{}]", theta.len()),
        }
    }

    /// Whether the profile has a derivative jump at `Θ = π` that grids should resolve with a node.
    pub fn has_kink_at_pi(&self) -> bool {
        matches!(self.kind, ProfileKind::H2)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, ProfileKind::Constant(c) if c.is_zero())
    }

    /// Maximum of `h` over the torus.
    pub fn max_value(&self) -> T {
        match &self.kind {
            ProfileKind::H1 => T::lit(2.0),
            ProfileKind::H2 => T::PI(),
            ProfileKind::Constant(c) => *c,
            ProfileKind::Tabulated { value, .. } => value.iter().copied().fold(T::zero(), T::max),
        }
    }

    /// Evaluates `h(Θ)`; the angle is reduced to `[0, 2π)` first.
    pub fn eval(&self, theta: T) -> T {
        let t = reduce_angle(theta);
        match &self.kind {
            ProfileKind::H1 => T::one() - t.cos(),
            ProfileKind::H2 => T::PI() - (t - T::PI()).abs(),
            ProfileKind::Constant(c) => *c,
            ProfileKind::Tabulated { theta, value } => periodic_linear(theta, value, t),
        }
    }
}

/// Reduces an angle to `[0, 2π)`.
pub fn reduce_angle<T: Real>(theta: T) -> T {
    let two_pi = T::TAU();
    let mut t = theta % two_pi;
    if t < T::zero() {
        t += two_pi;
    }
    if t >= two_pi {
        t = T::zero();
    }
    t
}

fn periodic_linear<T: Real>(theta: &[T], value: &[T], t: T) -> T {
    let n = theta.len();
    if n == 1 {
        return value[0];
    }
    let two_pi = T::TAU();
    // index of the first node strictly greater than t
    let k = theta.partition_point(|&x| x <= t);
    let (t0, v0, t1, v1) = if k == 0 {
        (theta[n - 1] - two_pi, value[n - 1], theta[0], value[0])
    } else if k == n {
        (theta[n - 1], value[n - 1], theta[0] + two_pi, value[0])
    } else {
        (theta[k - 1], value[k - 1], theta[k], value[k])
    };
    let w = (t - t0) / (t1 - t0);
    v0 + w * (v1 - v0)
}

/// Radii bounds `0 < δ < M` of the admissible curve class.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnulusBounds<T> {
    pub delta: T,
    pub m_bound: T,
}

impl<T: Real> AnnulusBounds<T> {
    pub fn new(delta: T, m_bound: T) -> Result<Self> {
        if !(delta > T::zero() && m_bound > delta && m_bound.is_finite()) {
            return Err(Error::Geometry(format!(
                "annulus bounds need 0 < delta < m_bound, got ({delta}, {m_bound})"
            )));
        }
        Ok(Self { delta, m_bound })
    }

    pub fn contains(&self, curve: &StarCurve<T>) -> bool {
        curve
            .radii()
            .iter()
            .all(|&r| r >= self.delta && r <= self.m_bound)
    }
}

/// Star-shaped closed curve `r = f(θ)` sampled on a uniform angular grid.
#[derive(Clone, Debug, PartialEq)]
pub struct StarCurve<T> {
    radii: Vec<T>,
}

impl<T: Real> StarCurve<T> {
    pub fn new(radii: Vec<T>) -> Result<Self> {
        if radii.len() < 3 {
            return Err(Error::Geometry(format!(
                "a star curve needs at least 3 samples, got {}",
                radii.len()
            )));
        }
        if let Some((i, r)) = radii
            .iter()
            .enumerate()
            .find(|(_, r)| !(**r > T::zero()) || !r.is_finite())
        {
            return Err(Error::Geometry(format!(
                "radius at sample {i} must be positive and finite, got {r}"
            )));
        }
        Ok(Self { radii })
    }

    pub fn circle(radius: T, n: usize) -> Result<Self> {
        Self::new(vec![radius; n])
    }

    /// Samples `f` at the `n` uniform grid angles.
    pub fn from_fn(n: usize, f: impl Fn(T) -> T) -> Result<Self> {
        Self::new((0..n).map(|i| f(grid_angle(i, n))).collect())
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn radii(&self) -> &[T] {
        &self.radii
    }

    pub fn into_radii(self) -> Vec<T> {
        self.radii
    }

    pub fn angle(&self, i: usize) -> T {
        grid_angle(i, self.len())
    }

    pub fn min_radius(&self) -> T {
        self.radii.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max_radius(&self) -> T {
        self.radii.iter().copied().fold(T::zero(), T::max)
    }

    pub fn mean_radius(&self) -> T {
        self.radii.iter().copied().sum::<T>() / T::from_usize_lossy(self.len())
    }

    /// Linear interpolation of the radius in `θ` (periodic).
    pub fn radius_at(&self, theta: T) -> T {
        let n = self.len();
        let x = reduce_angle(theta) / T::TAU() * T::from_usize_lossy(n);
        let k = x.floor();
        let w = x - k;
        let i = k.to_usize().unwrap_or(0) % n;
        let j = (i + 1) % n;
        self.radii[i] * (T::one() - w) + self.radii[j] * w
    }

    /// Resamples onto `n` uniform angles by linear interpolation in `θ`.
    pub fn resample(&self, n: usize) -> Result<Self> {
        if n == self.len() {
            return Ok(self.clone());
        }
        Self::from_fn(n, |t| self.radius_at(t))
    }

    pub fn scaled(&self, factor: T) -> Result<Self> {
        Self::new(self.radii.iter().map(|&r| r * factor).collect())
    }

    /// Cartesian vertices of the polygon.
    pub fn points(&self) -> Vec<[T; 2]> {
        self.radii
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let t = self.angle(i);
                [r * t.cos(), r * t.sin()]
            })
            .collect()
    }
}

/// `θ_i = 2πi/n`.
pub fn grid_angle<T: Real>(i: usize, n: usize) -> T {
    T::TAU() * T::from_usize_lossy(i) / T::from_usize_lossy(n)
}

/// Returns `1/ε` when it is a positive integer.
pub fn reciprocal_integer<T: Real>(eps: T) -> Result<usize> {
    let e = eps.to_f64_lossy();
    if !(e > 0.0) || !e.is_finite() {
        return Err(Error::InvalidEpsilon(e));
    }
    let inv = 1.0 / e;
    let k = inv.round();
    // f32 epsilons such as 0.1 are not exact reciprocals
    let tol = 1e-9_f64.max(4.0 * T::epsilon().to_f64_lossy()) * k.max(1.0);
    if k < 1.0 || (inv - k).abs() > tol {
        return Err(Error::InvalidEpsilon(e));
    }
    Ok(k as usize)
}

/// Boundary `r = 1 - ε h(θ/ε)` of the rough disc sampled at `n` angles.
///
/// `n` must be a multiple of `1/ε` so that each roughness period holds the
/// same number of nodes. For a profile with a kink at `Θ = π` the number of
/// nodes per period must also be even, which places a node on the kink.
pub fn inner_boundary<T: Real>(
    profile: &RoughnessProfile<T>,
    eps: T,
    n: usize,
) -> Result<StarCurve<T>> {
    let periods = reciprocal_integer(eps)?;
    if eps * profile.max_value() >= T::one() {
        return Err(Error::DegenerateDomain(format!(
            "eps * max h = {} must stay below 1",
            eps * profile.max_value()
        )));
    }
    if n == 0 || !n.is_multiple_of(periods) {
        return Err(Error::InvalidGrid(format!(
            "{n} angular nodes do not resolve {periods} whole roughness periods"
        )));
    }
    if profile.has_kink_at_pi() && !(n / periods).is_multiple_of(2) {
        return Err(Error::InvalidGrid(format!(
            "{} nodes per period leaves the kink at Θ = π unresolved; use an even count",
            n / periods
        )));
    }
    let per = n / periods;
    StarCurve::new(
        (0..n)
            .map(|i| {
                // Θ = θ/ε computed on the period grid, exact at the kink node
                let local = grid_angle::<T>(i % per, per);
                T::one() - eps * profile.eval(local)
            })
            .collect(),
    )
}

fn aligned<'a, T: Real>(
    a: &'a StarCurve<T>,
    b: &'a StarCurve<T>,
) -> (Cow<'a, StarCurve<T>>, Cow<'a, StarCurve<T>>) {
    use std::cmp::Ordering::*;
    match a.len().cmp(&b.len()) {
        Equal => (Cow::Borrowed(a), Cow::Borrowed(b)),
        Less => (
            Cow::Owned(
                a.resample(b.len())
                    .expect("resampling keeps radii positive"),
            ),
            Cow::Borrowed(b),
        ),
        Greater => (
            Cow::Borrowed(a),
            Cow::Owned(
                b.resample(a.len())
                    .expect("resampling keeps radii positive"),
            ),
        ),
    }
}

/// `sup_θ |f_a - f_b|` over the shared grid.
pub fn metric_d1<T: Real>(a: &StarCurve<T>, b: &StarCurve<T>) -> T {
    let (a, b) = aligned(a, b);
    a.radii()
        .iter()
        .zip(b.radii())
        .map(|(&x, &y)| (x - y).abs())
        .fold(T::zero(), T::max)
}

/// Scaling metric: the largest `|ln λ|` such that `λ·a` meets `b`.
///
/// For star curves the admissible scalings form the interval spanned by the
/// pointwise ratios `f_b/f_a`, so the supremum is the largest `|ln(f_b/f_a)|`.
pub fn metric_d2<T: Real>(a: &StarCurve<T>, b: &StarCurve<T>) -> T {
    let (a, b) = aligned(a, b);
    a.radii()
        .iter()
        .zip(b.radii())
        .map(|(&x, &y)| (y.ln() - x.ln()).abs())
        .fold(T::zero(), T::max)
}

/// Hausdorff distance between the two polygons, vertex-to-segment in both directions.
pub fn metric_hausdorff<T: Real>(a: &StarCurve<T>, b: &StarCurve<T>) -> T {
    let pa = a.points();
    let pb = b.points();
    // on a shared grid the vertex on the same ray is exactly |Δr| away
    let ray: Option<Vec<T>> = (a.len() == b.len()).then(|| {
        a.radii()
            .iter()
            .zip(b.radii())
            .map(|(&x, &y)| (x - y).abs())
            .collect()
    });
    let ray = ray.as_deref();
    directed_hausdorff(&pa, &pb, ray).max(directed_hausdorff(&pb, &pa, ray))
}

/// Distance from `p` to the segment `[u, v]`.
pub fn point_segment_distance<T: Real>(p: [T; 2], u: [T; 2], v: [T; 2]) -> T {
    let dx = v[0] - u[0];
    let dy = v[1] - u[1];
    let len2 = dx * dx + dy * dy;
    let t = if len2 > T::zero() {
        (((p[0] - u[0]) * dx + (p[1] - u[1]) * dy) / len2)
            .max(T::zero())
            .min(T::one())
    } else {
        T::zero()
    };
    let qx = u[0] + t * dx - p[0];
    let qy = u[1] + t * dy - p[1];
    (qx * qx + qy * qy).sqrt()
}

/// `max_{p ∈ from} dist(p, polygon(to))`, with the early-exit scan that
/// visits segments outward from the angularly matching index.
fn directed_hausdorff<T: Real>(from: &[[T; 2]], to: &[[T; 2]], ray: Option<&[T]>) -> T {
    let n = from.len();
    let m = to.len();
    let mut cmax = T::zero();
    for (i, &p) in from.iter().enumerate() {
        let start = (i * m + n / 2) / n % m;
        let mut cmin = ray.map_or(T::infinity(), |g| g[i]);
        if cmin <= cmax {
            continue;
        }
        for step in 0..m {
            // alternate start, start-1, start+1, start-2, ...
            let off = step.div_ceil(2);
            let k = if step % 2 == 1 {
                (start + m - off % m) % m
            } else {
                (start + off) % m
            };
            let d = point_segment_distance(p, to[k], to[(k + 1) % m]);
            if d < cmin {
                cmin = d;
                if cmin <= cmax {
                    break;
                }
            }
        }
        if cmin > cmax {
            cmax = cmin;
        }
    }
    cmax
}

/// The three curve distances together.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveDistances<T> {
    pub d1: T,
    pub d2: T,
    pub hausdorff: T,
}

impl<T: Real> CurveDistances<T> {
    pub fn between(a: &StarCurve<T>, b: &StarCurve<T>) -> Self {
        Self {
            d1: metric_d1(a, b),
            d2: metric_d2(a, b),
            hausdorff: metric_hausdorff(a, b),
        }
    }

    /// Slack in the three equivalence inequalities on the class bounded by `bounds`:
    /// `d1 - D_H`, `(M/δ²) D_H - d2` and `(M²/δ) d2 - d1`. All are nonnegative
    /// when both curves belong to the class.
    pub fn equivalence_slack(&self, bounds: &AnnulusBounds<T>) -> [T; 3] {
        let (delta, m) = (bounds.delta, bounds.m_bound);
        [
            self.d1 - self.hausdorff,
            m / (delta * delta) * self.hausdorff - self.d2,
            m * m / delta * self.d2 - self.d1,
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn builtin_profiles() {
        let h1 = RoughnessProfile::<f64>::h1();
        let h2 = RoughnessProfile::<f64>::h2();
        assert_eq!(h1.eval(0.0), 0.0);
        assert!((h1.eval(PI) - 2.0).abs() < 1e-15);
        assert!((h2.eval(PI) - PI).abs() < 1e-15);
        assert_eq!(h2.eval(0.0), 0.0);
        // periodic reduction
        assert!((h1.eval(PI + 2.0 * PI) - 2.0).abs() < 1e-12);
        assert!((h2.eval(-PI / 2.0) - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn tabulated_profile_interpolates_and_wraps() {
        let p = RoughnessProfile::tabulated(&[(0.0, 0.0), (PI, 2.0)]).unwrap();
        assert!((p.eval(PI / 2.0) - 1.0).abs() < 1e-14);
        assert!((p.eval(1.5 * PI) - 1.0).abs() < 1e-14);
        assert!((p.lipschitz_bound() - 2.0 / PI).abs() < 1e-14);
        assert_eq!(p.max_value(), 2.0);
    }

    #[test]
    fn tabulated_profile_rejects_bad_tables() {
        assert!(matches!(
            RoughnessProfile::tabulated(&[(0.0, 1.0), (1.0, -0.1)]),
            Err(Error::InvalidProfile(_))
        ));
        assert!(RoughnessProfile::tabulated(&[(1.0, 1.0), (0.5, 1.0)]).is_err());
        assert!(RoughnessProfile::tabulated(&[(0.0, 1.0), (7.0, 1.0)]).is_err());
        assert!(RoughnessProfile::<f64>::tabulated(&[]).is_err());
        assert!(RoughnessProfile::constant(-1.0).is_err());
    }

    #[test]
    fn inner_boundary_values() {
        let h1 = RoughnessProfile::<f64>::h1();
        let c = inner_boundary(&h1, 0.1, 200).unwrap();
        assert_eq!(c.radii()[0], 1.0);
        // θ = 0.1π is sample 10 of 200
        assert!((c.radii()[10] - 0.8).abs() < 1e-14);
        let flat = inner_boundary(&RoughnessProfile::zero(), 0.05, 80).unwrap();
        assert!(flat.radii().iter().all(|&r| r == 1.0));
    }

    #[test]
    fn inner_boundary_preconditions() {
        let h1 = RoughnessProfile::<f64>::h1();
        assert!(matches!(
            inner_boundary(&h1, 0.3, 90),
            Err(Error::InvalidEpsilon(_))
        ));
        assert!(matches!(
            inner_boundary(&h1, 0.5, 90),
            Err(Error::DegenerateDomain(_))
        ));
        assert!(matches!(
            inner_boundary(&h1, 0.1, 95),
            Err(Error::InvalidGrid(_))
        ));
        let h2 = RoughnessProfile::<f64>::h2();
        assert!(matches!(
            inner_boundary(&h2, 0.1, 90),
            Err(Error::InvalidGrid(_))
        ));
        let c = inner_boundary(&h2, 0.1, 80).unwrap();
        // node 4 of each 8-node period sits on the kink
        assert!((c.radii()[4] - (1.0 - 0.1 * PI)).abs() < 1e-14);
    }

    #[test]
    fn reciprocal_integer_accepts_f32_inputs() {
        assert_eq!(reciprocal_integer(0.1f32).unwrap(), 10);
        assert_eq!(reciprocal_integer(0.025f64).unwrap(), 40);
        assert!(reciprocal_integer(0.0f64).is_err());
        assert!(reciprocal_integer(-0.5f64).is_err());
    }

    #[test]
    fn circle_distances() {
        let a = StarCurve::<f64>::circle(1.0, 64).unwrap();
        let b = StarCurve::circle(2.0, 64).unwrap();
        assert!((metric_d1(&a, &b) - 1.0).abs() < 1e-14);
        assert!((metric_d2(&a, &b) - 2f64.ln()).abs() < 1e-14);
        assert!((metric_hausdorff(&a, &b) - 1.0).abs() < 1e-12);
        assert_eq!(metric_d1(&a, &a), 0.0);
        assert_eq!(metric_d2(&a, &a), 0.0);
        assert_eq!(metric_hausdorff(&a, &a), 0.0);
    }

    #[test]
    fn d2_of_uniform_scaling() {
        let a = StarCurve::from_fn(50, |t: f64| 1.5 + 0.3 * (3.0 * t).cos()).unwrap();
        for c in [0.3, 0.9, 1.7] {
            let b = a.scaled(c).unwrap();
            assert!((metric_d2(&a, &b) - f64::ln(c).abs()).abs() < 1e-13);
        }
    }

    #[test]
    fn mismatched_grids_are_resampled() {
        let a = StarCurve::<f64>::circle(1.0, 32).unwrap();
        let b = StarCurve::circle(1.5, 96).unwrap();
        assert!((metric_d1(&a, &b) - 0.5).abs() < 1e-14);
        assert!((metric_d1(&b, &a) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn resample_keeps_linear_interpolant() {
        let a = StarCurve::from_fn(16, |t: f64| 2.0 + t.sin()).unwrap();
        let b = a.resample(32).unwrap();
        for i in 0..16 {
            assert!((b.radii()[2 * i] - a.radii()[i]).abs() < 1e-14);
            let mid = 0.5 * (a.radii()[i] + a.radii()[(i + 1) % 16]);
            assert!((b.radii()[2 * i + 1] - mid).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_nonpositive_radii() {
        assert!(StarCurve::new(vec![1.0, 0.0, 1.0]).is_err());
        assert!(StarCurve::new(vec![1.0, f64::NAN, 1.0]).is_err());
        assert!(StarCurve::<f64>::new(vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn f32_curves() {
        let a = StarCurve::<f32>::circle(1.0, 16).unwrap();
        let b = StarCurve::<f32>::circle(2.0, 16).unwrap();
        assert!((metric_hausdorff(&a, &b) - 1.0).abs() < 1e-5);
        assert!((metric_d2(&a, &b) - 2f32.ln()).abs() < 1e-6);
    }
}
