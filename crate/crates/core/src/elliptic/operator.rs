//! Conservative finite differences for the Laplacian on a mapped periodic strip.
//!
//! Physical points are `r(s, θ) = Σ_m φ_m(s) g_m(θ)` with `s ∈ [0, 1]` and `θ`
//! periodic. In the computational coordinates the Laplacian is
//! `J⁻¹ ∂_a (J g^{ab} ∂_b u)`; multiplying by `J` gives a divergence-form
//! operator whose centred discretisation (including the cross terms) is a
//! symmetric 9-point stencil.
//!
//! With `ρ = r` for polar maps and `ρ = 1` for flat ones:
//!
//! ```text
//! J g^{ss} = (r_θ² + ρ²) / (r_s ρ)
//! J g^{sθ} = −r_θ / ρ
//! J g^{θθ} = r_s / ρ
//! ```

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Interpretation of the mapped coordinate `r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    /// `(r, θ)` are polar coordinates.
    Polar,
    /// `(θ, r)` are Cartesian coordinates on a periodic strip.
    Flat,
}

/// Weight `φ(s)` of one blend term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Weight<T> {
    /// `1 − s`
    Falling,
    /// `s`
    Rising,
    /// Piecewise linear through `(0, 0)`, `(knot, knot_value)` and `(1, end_value)`.
    Kinked {
        knot: T,
        knot_value: T,
        end_value: T,
    },
    /// `(1 − s/knot)²` below `knot`, zero above.
    Ramp { knot: T },
}

impl<T: Real> Weight<T> {
    pub fn value(&self, s: T) -> T {
        match *self {
            Weight::Falling => T::one() - s,
            Weight::Rising => s,
            Weight::Kinked {
                knot,
                knot_value,
                end_value,
            } => {
                if s <= knot {
                    knot_value * s / knot
                } else {
                    knot_value + (end_value - knot_value) * (s - knot) / (T::one() - knot)
                }
            }
            Weight::Ramp { knot } => {
                if s < knot {
                    let t = T::one() - s / knot;
                    t * t
                } else {
                    T::zero()
                }
            }
        }
    }

    pub fn slope(&self, s: T) -> T {
        match *self {
            Weight::Falling => -T::one(),
            Weight::Rising => T::one(),
            Weight::Kinked {
                knot,
                knot_value,
                end_value,
            } => {
                if s <= knot {
                    knot_value / knot
                } else {
                    (end_value - knot_value) / (T::one() - knot)
                }
            }
            Weight::Ramp { knot } => {
                if s < knot {
                    -T::lit(2.0) * (T::one() - s / knot) / knot
                } else {
                    T::zero()
                }
            }
        }
    }
}

/// Local mapping data `(r, ∂_s r, ∂_θ r)`.
#[derive(Clone, Copy, Debug)]
pub struct MapPoint<T> {
    pub r: T,
    pub r_s: T,
    pub r_theta: T,
}

/// Blend map `r(s, θ) = Σ φ_k(s) g_k(θ)` sampled on a uniform periodic `θ` grid.
#[derive(Clone, Debug)]
pub struct BlendMap<T> {
    pub metric: Metric,
    terms: Vec<(Weight<T>, Vec<T>)>,
    dtheta: T,
}

impl<T: Real> BlendMap<T> {
    pub fn new(
        metric: Metric,
        first: (Weight<T>, Vec<T>),
        second: (Weight<T>, Vec<T>),
    ) -> Result<Self> {
        let n = first.1.len();
        if n < 4 || second.1.len() != n {
            return Err(Error::Mesh(format!(
                "blend samples must share a periodic grid of at least 4 nodes ({} vs {})",
                n,
                second.1.len()
            )));
        }
        Ok(Self {
            metric,
            terms: vec![first, second],
            dtheta: T::TAU() / T::from_usize_lossy(n),
        })
    }

    /// Adds one more term on the same grid.
    pub fn with_term(mut self, term: (Weight<T>, Vec<T>)) -> Result<Self> {
        if term.1.len() != self.ntheta() {
            return Err(Error::Mesh(format!(
                "blend term has {} samples, map has {}",
                term.1.len(),
                self.ntheta()
            )));
        }
        self.terms.push(term);
        Ok(self)
    }

    /// Radius `r(s, θ_i)`.
    pub fn radius(&self, s: T, i: usize) -> T {
        self.terms
            .iter()
            .map(|(w, g)| w.value(s) * g[i])
            .fold(T::zero(), |a, b| a + b)
    }

    pub fn ntheta(&self) -> usize {
        self.terms[0].1.len()
    }

    pub fn dtheta(&self) -> T {
        self.dtheta
    }

    fn rho(&self, r: T) -> T {
        match self.metric {
            Metric::Polar => r,
            Metric::Flat => T::one(),
        }
    }

    /// Mapping at `(s, θ_i)`; `∂_θ` by central differences of the samples.
    pub fn at_node(&self, s: T, i: usize) -> MapPoint<T> {
        let n = self.ntheta();
        let ip = (i + 1) % n;
        let im = (i + n - 1) % n;
        let two_dt = self.dtheta + self.dtheta;
        let mut p = MapPoint {
            r: T::zero(),
            r_s: T::zero(),
            r_theta: T::zero(),
        };
        for (w, g) in &self.terms {
            let (phi, dphi) = (w.value(s), w.slope(s));
            p.r += phi * g[i];
            p.r_s += dphi * g[i];
            p.r_theta += phi * (g[ip] - g[im]) / two_dt;
        }
        p
    }

    /// Mapping at `(s, θ_{i+1/2})` from the two neighbouring samples.
    pub fn at_half(&self, s: T, i: usize) -> MapPoint<T> {
        let n = self.ntheta();
        let ip = (i + 1) % n;
        let half = T::lit(0.5);
        let mut p = MapPoint {
            r: T::zero(),
            r_s: T::zero(),
            r_theta: T::zero(),
        };
        for (w, g) in &self.terms {
            let (phi, dphi) = (w.value(s), w.slope(s));
            let gm = half * (g[i] + g[ip]);
            p.r += phi * gm;
            p.r_s += dphi * gm;
            p.r_theta += phi * (g[ip] - g[i]) / self.dtheta;
        }
        p
    }

    /// `(J g^{ss}, J g^{sθ}, J g^{θθ})` at a mapped point.
    pub fn flux_coefficients(&self, p: &MapPoint<T>) -> (T, T, T) {
        let rho = self.rho(p.r);
        (
            (p.r_theta * p.r_theta + rho * rho) / (p.r_s * rho),
            -p.r_theta / rho,
            p.r_s / rho,
        )
    }

    /// Inverse metric `(g^{ss}, g^{sθ}, g^{θθ})` at a mapped point.
    pub fn inverse_metric(&self, p: &MapPoint<T>) -> (T, T, T) {
        let rho = self.rho(p.r);
        let rho2 = rho * rho;
        (
            (p.r_theta * p.r_theta + rho2) / (p.r_s * p.r_s * rho2),
            -p.r_theta / (p.r_s * rho2),
            T::one() / rho2,
        )
    }
}

/// Boundary condition on the `s = 1` edge. The `s = 0` edge is always Dirichlet.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TopBoundary {
    Dirichlet,
    /// Homogeneous Neumann; requires `∂_θ r = 0` on the edge.
    Neumann,
}

// stencil slots
const C: usize = 0;
const S: usize = 1;
const N: usize = 2;
const W: usize = 3;
const E: usize = 4;
const SW: usize = 5;
const SE: usize = 6;
const NW: usize = 7;
const NE: usize = 8;

/// Symmetric positive definite 9-point operator on the unknown rows of the strip.
///
/// Unknowns are rows `1..=last_row` of the `ns × nt` grid, stored row-major.
#[derive(Clone, Debug)]
pub struct StripOperator<T> {
    ns: usize,
    nt: usize,
    top: TopBoundary,
    stencil: Vec<[T; 9]>,
    /// θ-averaged `J g^{ss}` at half rows `j + 1/2`, `j = 0..ns-1`.
    a_mean: Vec<T>,
    /// θ-averaged `J g^{θθ}` at each unknown row (index = row − 1).
    c_mean: Vec<T>,
    ws: T,
    wt: T,
}

impl<T: Real> StripOperator<T> {
    pub fn assemble(map: &BlendMap<T>, ns: usize, top: TopBoundary) -> Result<Self> {
        let nt = map.ntheta();
        if ns < 3 {
            return Err(Error::Mesh(format!("need at least 3 rows, got {ns}")));
        }
        let ds = T::one() / T::from_usize_lossy(ns - 1);
        let dt = map.dtheta();
        let half = T::lit(0.5);
        let s_of = |j: usize| T::from_usize_lossy(j) * ds;
        let s_half = |j: usize| (T::from_usize_lossy(j) + half) * ds;

        let check = |p: &MapPoint<T>, what: &str| -> Result<()> {
            if !(p.r_s > T::zero()) || !p.r_s.is_finite() {
                return Err(Error::Mesh(format!(
                    "mapping folds ({what}: dr/ds = {})",
                    p.r_s
                )));
            }
            if map.metric == Metric::Polar && !(p.r > T::zero()) {
                return Err(Error::Mesh(format!("nonpositive radius at {what}")));
            }
            Ok(())
        };

        // J g^{ss} at (j+1/2, i)
        let mut a = vec![T::zero(); (ns - 1) * nt];
        for j in 0..ns - 1 {
            for i in 0..nt {
                let p = map.at_node(s_half(j), i);
                check(&p, "half row")?;
                a[j * nt + i] = map.flux_coefficients(&p).0;
            }
        }
        // J g^{sθ} at nodes
        let mut b = vec![T::zero(); ns * nt];
        for j in 0..ns {
            for i in 0..nt {
                let p = map.at_node(s_of(j), i);
                b[j * nt + i] = map.flux_coefficients(&p).1;
            }
        }
        if top == TopBoundary::Neumann {
            let tol = T::lit(1e3) * T::epsilon();
            if b[(ns - 1) * nt..].iter().any(|v| v.abs() > tol) {
                return Err(Error::Mesh(
                    "Neumann edge must be a coordinate line (dr/dθ = 0)".into(),
                ));
            }
        }
        // J g^{θθ} at (j, i+1/2): mean of the two neighbouring half rows, so
        // that a kink of the blend weights along a grid row is averaged out
        let c_at = |j: usize, i: usize| -> Result<T> {
            if j == ns - 1 {
                let p = map.at_half(T::one(), i);
                check(&p, "top edge")?;
                return Ok(map.flux_coefficients(&p).2);
            }
            let lo = map.at_half(s_half(j - 1), i);
            let hi = map.at_half(s_half(j), i);
            check(&lo, "half cell")?;
            check(&hi, "half cell")?;
            Ok(half * (map.flux_coefficients(&lo).2 + map.flux_coefficients(&hi).2))
        };

        let ws = dt / ds;
        let wt = ds / dt;
        let wx = T::lit(0.25);
        let last_row = match top {
            TopBoundary::Dirichlet => ns - 2,
            TopBoundary::Neumann => ns - 1,
        };
        let mut stencil = vec![[T::zero(); 9]; last_row * nt];
        let mut c_mean = vec![T::zero(); last_row];
        let inv_nt = T::one() / T::from_usize_lossy(nt);
        for j in 1..=last_row {
            let mut c_row = vec![T::zero(); nt];
            for (i, c) in c_row.iter_mut().enumerate() {
                *c = c_at(j, i)?;
            }
            c_mean[j - 1] = c_row.iter().copied().sum::<T>() * inv_nt;
            for i in 0..nt {
                let ip = (i + 1) % nt;
                let im = (i + nt - 1) % nt;
                let c_e = c_row[i];
                let c_w = c_row[im];
                let a_s = a[(j - 1) * nt + i];
                let bs = b[(j - 1) * nt + i];
                let st = &mut stencil[(j - 1) * nt + i];
                if j < ns - 1 {
                    let a_n = a[j * nt + i];
                    let bn = b[(j + 1) * nt + i];
                    let be = b[j * nt + ip];
                    let bw = b[j * nt + im];
                    st[C] = ws * (a_n + a_s) + wt * (c_e + c_w);
                    st[N] = -ws * a_n;
                    st[S] = -ws * a_s;
                    st[E] = -wt * c_e;
                    st[W] = -wt * c_w;
                    st[NE] = -wx * (bn + be);
                    st[NW] = wx * (bn + bw);
                    st[SE] = wx * (bs + be);
                    st[SW] = -wx * (bs + bw);
                } else {
                    // mirrored ghost row, halved so the matrix stays symmetric
                    st[C] = ws * a_s + half * wt * (c_e + c_w);
                    st[S] = -ws * a_s;
                    st[E] = -half * wt * c_e;
                    st[W] = -half * wt * c_w;
                    st[SE] = wx * bs;
                    st[SW] = -wx * bs;
                }
            }
        }
        let mut a_mean = vec![T::zero(); ns - 1];
        for (j, m) in a_mean.iter_mut().enumerate() {
            *m = a[j * nt..(j + 1) * nt].iter().copied().sum::<T>() * inv_nt;
        }
        Ok(Self {
            ns,
            nt,
            top,
            stencil,
            a_mean,
            c_mean,
            ws,
            wt,
        })
    }

    pub fn rows(&self) -> usize {
        self.ns
    }

    pub fn ntheta(&self) -> usize {
        self.nt
    }

    pub fn top(&self) -> TopBoundary {
        self.top
    }

    /// Number of unknown rows.
    pub fn unknown_rows(&self) -> usize {
        self.stencil.len() / self.nt
    }

    pub fn unknowns(&self) -> usize {
        self.stencil.len()
    }

    /// `y = A x` over the unknowns; Dirichlet rows are treated as zero.
    pub fn apply(&self, x: &[T], y: &mut [T]) {
        let nt = self.nt;
        let rows = self.unknown_rows();
        for r in 0..rows {
            let base = r * nt;
            let has_s = r > 0;
            let has_n = r + 1 < rows;
            for i in 0..nt {
                let ip = if i + 1 == nt { 0 } else { i + 1 };
                let im = if i == 0 { nt - 1 } else { i - 1 };
                let st = &self.stencil[base + i];
                let mut acc = st[C] * x[base + i] + st[E] * x[base + ip] + st[W] * x[base + im];
                if has_s {
                    let sb = base - nt;
                    acc += st[S] * x[sb + i] + st[SE] * x[sb + ip] + st[SW] * x[sb + im];
                }
                if has_n {
                    let nb = base + nt;
                    acc += st[N] * x[nb + i] + st[NE] * x[nb + ip] + st[NW] * x[nb + im];
                }
                y[base + i] = acc;
            }
        }
    }

    /// Right-hand side produced by Dirichlet data on the `s = 0` edge and,
    /// for a Dirichlet top, on the `s = 1` edge.
    pub fn dirichlet_rhs(&self, bottom: &[T], top: Option<&[T]>) -> Vec<T> {
        let nt = self.nt;
        let rows = self.unknown_rows();
        let mut rhs = vec![T::zero(); rows * nt];
        for i in 0..nt {
            let ip = (i + 1) % nt;
            let im = (i + nt - 1) % nt;
            let st = &self.stencil[i];
            rhs[i] -= st[S] * bottom[i] + st[SE] * bottom[ip] + st[SW] * bottom[im];
        }
        if let (TopBoundary::Dirichlet, Some(top)) = (self.top, top) {
            let base = (rows - 1) * nt;
            for i in 0..nt {
                let ip = (i + 1) % nt;
                let im = (i + nt - 1) % nt;
                let st = &self.stencil[base + i];
                rhs[base + i] -= st[N] * top[i] + st[NE] * top[ip] + st[NW] * top[im];
            }
        }
        rhs
    }

    /// Tridiagonal data of the θ-averaged operator for the Fourier preconditioner:
    /// `(diag_base, diag_theta, off)` where mode `k` has diagonal
    /// `diag_base + diag_theta · (2 − 2 cos kΔθ)` and off-diagonal `off`.
    pub fn averaged(&self) -> (Vec<T>, Vec<T>, Vec<T>) {
        let rows = self.unknown_rows();
        let half = T::lit(0.5);
        let mut base = vec![T::zero(); rows];
        let mut theta = vec![T::zero(); rows];
        let mut off = vec![T::zero(); rows.saturating_sub(1)];
        for r in 0..rows {
            let j = r + 1;
            let a_s = self.a_mean[j - 1];
            if j < self.ns - 1 {
                base[r] = self.ws * (a_s + self.a_mean[j]);
                theta[r] = self.wt * self.c_mean[r];
            } else {
                base[r] = self.ws * a_s;
                theta[r] = half * self.wt * self.c_mean[r];
            }
            if r + 1 < rows {
                off[r] = -self.ws * self.a_mean[j];
            }
        }
        (base, theta, off)
    }
}
