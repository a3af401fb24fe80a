//! Boundary-fitted Laplace solver on the region between two star curves.
//!
//! The annulus is mapped to the rectangle `(s, θ) ∈ [0, 1] × T¹` through
//! `r(s, θ) = (1 − s) f_in(θ) + s f_out(θ)`.
//!
//! A layered variant replaces the inner curve by the circle `c = max f_in`
//! and lets the wall detail `f_in − c` fade out through `(1 − s/s_k)²`:
//!
//! ```text
//! r(s, θ) = (1 − s) c + s f_out(θ) + (f_in(θ) − c) w(s)
//! ```
//!
//! Grid lines above the knot `s_k` then carry no trace of the wall's corners.

pub mod operator;
pub mod pcg;

use std::io::Write;

use crate::error::{Error, Result};
use crate::geometry::{grid_angle, StarCurve};
use crate::scalar::Real;

use operator::{BlendMap, Metric, StripOperator, TopBoundary, Weight};
pub use pcg::{SolveStats, SolverOptions};

/// Interpolation between the two boundary curves.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Layering<T> {
    Linear,
    /// Wall detail confined to `s < knot`.
    Layered {
        knot: T,
    },
}

/// Mesh between an inner and an outer star curve sharing one angular grid.
#[derive(Clone, Debug, PartialEq)]
pub struct AnnularMesh<T> {
    inner: StarCurve<T>,
    outer: StarCurve<T>,
    nr: usize,
    layering: Layering<T>,
}

impl<T: Real> AnnularMesh<T> {
    pub fn inner(&self) -> &StarCurve<T> {
        &self.inner
    }

    pub fn outer(&self) -> &StarCurve<T> {
        &self.outer
    }

    pub fn nr(&self) -> usize {
        self.nr
    }

    pub fn ntheta(&self) -> usize {
        self.inner.len()
    }

    pub fn s(&self, j: usize) -> T {
        T::from_usize_lossy(j) / T::from_usize_lossy(self.nr - 1)
    }

    pub fn theta(&self, i: usize) -> T {
        grid_angle(i, self.ntheta())
    }

    pub fn layering(&self) -> Layering<T> {
        self.layering
    }

    /// Physical radius of node `(j, i)`.
    pub fn radius(&self, j: usize, i: usize) -> T {
        self.blend_map().radius(self.s(j), i)
    }

    pub fn blend_map(&self) -> BlendMap<T> {
        let outer = (Weight::Rising, self.outer.radii().to_vec());
        match self.layering {
            Layering::Linear => BlendMap::new(
                Metric::Polar,
                (Weight::Falling, self.inner.radii().to_vec()),
                outer,
            ),
            Layering::Layered { knot } => {
                let c = self.inner.max_radius();
                let detail: Vec<T> = self.inner.radii().iter().map(|&r| r - c).collect();
                BlendMap::new(
                    Metric::Polar,
                    (Weight::Falling, vec![c; self.ntheta()]),
                    outer,
                )
                .and_then(|m| m.with_term((Weight::Ramp { knot }, detail)))
            }
        }
        .expect("mesh curves share a grid")
    }
}

/// Builds the annular mesh; requires `f_out > f_in` at every grid angle.
pub fn build_mesh<T: Real>(
    inner: StarCurve<T>,
    outer: StarCurve<T>,
    nr: usize,
    ntheta: usize,
) -> Result<AnnularMesh<T>> {
    if nr < 3 {
        return Err(Error::Mesh(format!("nr must be at least 3, got {nr}")));
    }
    if ntheta < 8 {
        return Err(Error::Mesh(format!(
            "ntheta must be at least 8, got {ntheta}"
        )));
    }
    if inner.len() != ntheta || outer.len() != ntheta {
        return Err(Error::Mesh(format!(
            "curves have {} and {} samples, mesh expects {ntheta}",
            inner.len(),
            outer.len()
        )));
    }
    if let Some(i) = (0..ntheta).find(|&i| !(outer.radii()[i] > inner.radii()[i])) {
        return Err(Error::Mesh(format!(
            "outer boundary does not enclose the inner one at sample {i}"
        )));
    }
    Ok(AnnularMesh {
        inner,
        outer,
        nr,
        layering: Layering::Linear,
    })
}

/// [`build_mesh`] with the layered interpolation; the outer curve must clear
/// the circle through the outermost wall point.
pub fn build_layered_mesh<T: Real>(
    inner: StarCurve<T>,
    outer: StarCurve<T>,
    nr: usize,
    ntheta: usize,
    knot: T,
) -> Result<AnnularMesh<T>> {
    if !(knot > T::zero() && knot <= T::one()) {
        return Err(Error::Mesh(format!(
            "layer knot must lie in (0, 1], got {knot}"
        )));
    }
    let mut mesh = build_mesh(inner, outer, nr, ntheta)?;
    if !(mesh.outer.min_radius() > mesh.inner.max_radius()) {
        return Err(Error::Mesh(
            "outer boundary does not clear the rough layer".to_string(),
        ));
    }
    mesh.layering = Layering::Layered { knot };
    Ok(mesh)
}

/// Nodal values on an annular mesh, row-major in `s` then `θ`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField<T> {
    mesh: AnnularMesh<T>,
    values: Vec<T>,
    stats: SolveStats,
}

impl<T: Real> GridField<T> {
    pub fn mesh(&self) -> &AnnularMesh<T> {
        &self.mesh
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn get(&self, j: usize, i: usize) -> T {
        self.values[j * self.mesh.ntheta() + i]
    }

    pub fn stats(&self) -> SolveStats {
        self.stats
    }

    /// Text dump: a `nr ntheta` header line, then one row of values per `s` level.
    pub fn dump<W: Write>(&self, out: W) -> Result<()> {
        write_matrix(out, self.mesh.nr(), self.mesh.ntheta(), &self.values)
    }
}

/// Writes a row-major matrix in the grid dump format.
pub fn write_matrix<T: Real, W: Write>(
    mut out: W,
    rows: usize,
    cols: usize,
    values: &[T],
) -> Result<()> {
    writeln!(out, "{rows} {cols}")?;
    for row in values.chunks(cols) {
        let line: Vec<String> = row.iter().map(|v| format!("{:.11e}", v)).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

/// Solves `Δu = 0` with `u = g_inner` on the inner curve and `u = g_outer` on the outer one.
pub fn solve_dirichlet<T: Real>(
    mesh: &AnnularMesh<T>,
    g_inner: &[T],
    g_outer: &[T],
) -> Result<GridField<T>> {
    solve_dirichlet_with(mesh, g_inner, g_outer, &SolverOptions::default(), None)
}

/// [`solve_dirichlet`] with explicit solver options and an optional starting guess
/// (a field on a mesh of the same dimensions).
pub fn solve_dirichlet_with<T: Real>(
    mesh: &AnnularMesh<T>,
    g_inner: &[T],
    g_outer: &[T],
    opts: &SolverOptions,
    guess: Option<&GridField<T>>,
) -> Result<GridField<T>> {
    let nt = mesh.ntheta();
    let nr = mesh.nr();
    if g_inner.len() != nt || g_outer.len() != nt {
        return Err(Error::Mesh(format!(
            "boundary data lengths ({}, {}) do not match ntheta = {nt}",
            g_inner.len(),
            g_outer.len()
        )));
    }
    let op = StripOperator::assemble(&mesh.blend_map(), nr, TopBoundary::Dirichlet)?;
    let pre = pcg::FourierPreconditioner::new(&op);
    let rhs = op.dirichlet_rhs(g_inner, Some(g_outer));
    let mut x: Vec<T> = match guess {
        Some(g) if g.mesh.nr() == nr && g.mesh.ntheta() == nt => {
            g.values[nt..(nr - 1) * nt].to_vec()
        }
        _ => (1..nr - 1)
            .flat_map(|j| {
                let s = mesh.s(j);
                (0..nt).map(move |i| (T::one() - s) * g_inner[i] + s * g_outer[i])
            })
            .collect(),
    };
    let stats = pcg::pcg(&op, &pre, &rhs, &mut x, opts)?;
    let mut values = Vec::with_capacity(nr * nt);
    values.extend_from_slice(g_inner);
    values.extend_from_slice(&x);
    values.extend_from_slice(g_outer);
    Ok(GridField {
        mesh: mesh.clone(),
        values,
        stats,
    })
}

/// Which boundary curve of the annulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Inner,
    Outer,
}

/// `|∇u|` at the nodes of one boundary curve.
///
/// `∂_s u` uses the one-sided three-point difference, `∂_θ u` the central
/// difference along the boundary; both are combined through the inverse
/// metric of the mapping.
pub fn boundary_gradient<T: Real>(field: &GridField<T>, side: Side) -> Vec<T> {
    let mesh = &field.mesh;
    let nt = mesh.ntheta();
    let nr = mesh.nr();
    let map = mesh.blend_map();
    let ds = T::one() / T::from_usize_lossy(nr - 1);
    let dt = T::TAU() / T::from_usize_lossy(nt);
    let (j0, j1, j2, s, sign) = match side {
        Side::Inner => (0, 1, 2, T::zero(), T::one()),
        Side::Outer => (nr - 1, nr - 2, nr - 3, T::one(), -T::one()),
    };
    let two = T::lit(2.0);
    (0..nt)
        .map(|i| {
            let ip = (i + 1) % nt;
            let im = (i + nt - 1) % nt;
            let u_s = sign
                * (-T::lit(3.0) * field.get(j0, i) + T::lit(4.0) * field.get(j1, i)
                    - field.get(j2, i))
                / (two * ds);
            let u_t = (field.get(j0, ip) - field.get(j0, im)) / (two * dt);
            let p = map.at_node(s, i);
            let (gss, gst, gtt) = map.inverse_metric(&p);
            (gss * u_s * u_s + two * gst * u_s * u_t + gtt * u_t * u_t)
                .max(T::zero())
                .sqrt()
        })
        .collect()
}
