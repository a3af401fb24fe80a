//! Preconditioned conjugate gradients with a θ-Fourier preconditioner.
//!
//! The preconditioner is the operator with coefficients averaged over `θ`
//! and the cross terms dropped. It is diagonalised by the discrete Fourier
//! transform in `θ`, leaving one symmetric tridiagonal system in `s` per mode.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::operator::StripOperator;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Stopping rule for the linear solve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// Relative residual `‖b − Ax‖ / ‖b‖`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 5000,
        }
    }
}

/// Outcome of a converged solve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

pub struct FourierPreconditioner<T: Real> {
    nt: usize,
    rows: usize,
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
    /// Off-diagonal of the tridiagonal systems (independent of the mode).
    off: Vec<T>,
    /// Reciprocal pivots of the `L D Lᵀ` factors, per distinct mode `k ≤ nt/2`.
    inv_pivot: Vec<Vec<T>>,
    /// Elimination multipliers `off[j] / pivot[j]`, per distinct mode.
    mult: Vec<Vec<T>>,
}

impl<T: Real> FourierPreconditioner<T> {
    pub fn new(op: &StripOperator<T>) -> Self {
        let nt = op.ntheta();
        let rows = op.unknown_rows();
        let (base, theta, off) = op.averaged();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(nt);
        let inv = planner.plan_fft_inverse(nt);
        let dt = T::TAU() / T::from_usize_lossy(nt);
        let two = T::lit(2.0);
        let modes = nt / 2 + 1;
        let mut inv_pivot = Vec::with_capacity(modes);
        let mut mult = Vec::with_capacity(modes);
        for k in 0..modes {
            let sym = two - two * (T::from_usize_lossy(k) * dt).cos();
            let mut ip = vec![T::zero(); rows];
            let mut m = vec![T::zero(); rows.saturating_sub(1)];
            let mut pivot = base[0] + theta[0] * sym;
            ip[0] = T::one() / pivot;
            for j in 1..rows {
                m[j - 1] = off[j - 1] / pivot;
                pivot = base[j] + theta[j] * sym - m[j - 1] * off[j - 1];
                ip[j] = T::one() / pivot;
            }
            inv_pivot.push(ip);
            mult.push(m);
        }
        Self {
            nt,
            rows,
            fwd,
            inv,
            off,
            inv_pivot,
            mult,
        }
    }

    /// `z = P⁻¹ r`.
    pub fn apply(&self, r: &[T], z: &mut [T]) {
        let nt = self.nt;
        let rows = self.rows;
        let mut spec = vec![Complex::new(T::zero(), T::zero()); rows * nt];
        let mut scratch =
            vec![Complex::new(T::zero(), T::zero()); self.fwd.get_inplace_scratch_len()];
        let half = T::lit(0.5);
        // two real rows per complex transform
        let mut j = 0;
        while j < rows {
            let pair = j + 1 < rows;
            let buf = &mut spec[j * nt..(j + 1) * nt];
            for i in 0..nt {
                let im = if pair { r[(j + 1) * nt + i] } else { T::zero() };
                buf[i] = Complex::new(r[j * nt + i], im);
            }
            self.fwd.process_with_scratch(buf, &mut scratch);
            if pair {
                let zrow: Vec<Complex<T>> = buf.to_vec();
                let (a, b) = spec.split_at_mut((j + 1) * nt);
                let xa = &mut a[j * nt..];
                let xb = &mut b[..nt];
                for k in 0..nt {
                    let zk = zrow[k];
                    let zc = zrow[(nt - k) % nt].conj();
                    xa[k] = (zk + zc) * half;
                    // (zk − zc) / (2i)
                    let d = (zk - zc) * half;
                    xb[k] = Complex::new(d.im, -d.re);
                }
            }
            j += 2;
        }
        // tridiagonal solve per mode
        for k in 0..nt {
            let kk = k.min(nt - k);
            let ip = &self.inv_pivot[kk];
            let m = &self.mult[kk];
            for j in 1..rows {
                let prev = spec[(j - 1) * nt + k];
                spec[j * nt + k] = spec[j * nt + k] - prev * m[j - 1];
            }
            spec[(rows - 1) * nt + k] = spec[(rows - 1) * nt + k] * ip[rows - 1];
            for j in (0..rows - 1).rev() {
                let next = spec[(j + 1) * nt + k];
                spec[j * nt + k] = (spec[j * nt + k] - next * self.off[j]) * ip[j];
            }
        }
        let scale = T::one() / T::from_usize_lossy(nt);
        let mut j = 0;
        while j < rows {
            let pair = j + 1 < rows;
            let mut buf: Vec<Complex<T>> = if pair {
                (0..nt)
                    .map(|k| {
                        let a = spec[j * nt + k];
                        let b = spec[(j + 1) * nt + k];
                        // a + i b
                        Complex::new(a.re - b.im, a.im + b.re)
                    })
                    .collect()
            } else {
                spec[j * nt..(j + 1) * nt].to_vec()
            };
            self.inv.process_with_scratch(&mut buf, &mut scratch);
            for i in 0..nt {
                z[j * nt + i] = buf[i].re * scale;
                if pair {
                    z[(j + 1) * nt + i] = buf[i].im * scale;
                }
            }
            j += 2;
        }
    }
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Solves `A x = b` by PCG starting from `x`.
pub fn pcg<T: Real>(
    op: &StripOperator<T>,
    pre: &FourierPreconditioner<T>,
    b: &[T],
    x: &mut [T],
    opts: &SolverOptions,
) -> Result<SolveStats> {
    let n = b.len();
    let bnorm = dot(b, b).sqrt();
    if bnorm.is_zero() {
        x.iter_mut().for_each(|v| *v = T::zero());
        return Ok(SolveStats {
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let tol = T::lit(opts.tol);
    let mut r = vec![T::zero(); n];
    op.apply(x, &mut r);
    for (ri, &bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let mut rel = dot(&r, &r).sqrt() / bnorm;
    if rel <= tol {
        return Ok(SolveStats {
            iterations: 0,
            relative_residual: rel.to_f64_lossy(),
        });
    }
    let mut z = vec![T::zero(); n];
    pre.apply(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![T::zero(); n];
    for it in 1..=opts.max_iter {
        op.apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > T::zero()) {
            return Err(Error::Numeric(format!(
                "operator lost positive definiteness (pAp = {pap})"
            )));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        rel = dot(&r, &r).sqrt() / bnorm;
        if rel <= tol {
            return Ok(SolveStats {
                iterations: it,
                relative_residual: rel.to_f64_lossy(),
            });
        }
        pre.apply(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::Solver {
        iterations: opts.max_iter,
        residual: rel.to_f64_lossy(),
    })
}
