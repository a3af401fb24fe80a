//! Shared generators and brute-force oracles for the integration tests.
#![allow(dead_code)]

use rand::Rng;
use rough_bernoulli::geometry::StarCurve;

pub type Pt = [f64; 2];

pub fn polar(r: f64, t: f64) -> Pt {
    [r * t.cos(), r * t.sin()]
}

fn cross(o: Pt, a: Pt, b: Pt) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn on_segment(p: Pt, a: Pt, b: Pt) -> bool {
    p[0] >= a[0].min(b[0]) - 1e-15
        && p[0] <= a[0].max(b[0]) + 1e-15
        && p[1] >= a[1].min(b[1]) - 1e-15
        && p[1] <= a[1].max(b[1]) + 1e-15
}

/// Closed or touching segment intersection by orientation tests.
pub fn segments_intersect(p1: Pt, p2: Pt, q1: Pt, q2: Pt) -> bool {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(p1, q1, q2))
        || (d2 == 0.0 && on_segment(p2, q1, q2))
        || (d3 == 0.0 && on_segment(q1, p1, p2))
        || (d4 == 0.0 && on_segment(q2, p1, p2))
}

pub fn vertices(c: &StarCurve<f64>) -> Vec<Pt> {
    (0..c.len())
        .map(|i| polar(c.radii()[i], c.angle(i)))
        .collect()
}

pub fn polylines_meet(a: &[Pt], b: &[Pt]) -> bool {
    let (n, m) = (a.len(), b.len());
    (0..n).any(|i| (0..m).any(|k| segments_intersect(a[i], a[(i + 1) % n], b[k], b[(k + 1) % m])))
}

/// Scans `t = ln λ` inward from `±t_max` in steps of `step` and returns the
/// outermost values for which `λ·a` meets `b`, i.e. `sup |ln λ|` to within `step`.
pub fn lambda_scan(a: &StarCurve<f64>, b: &StarCurve<f64>, t_max: f64, step: f64) -> f64 {
    let pa = vertices(a);
    let pb = vertices(b);
    let meets = |t: f64| {
        let s = t.exp();
        let scaled: Vec<Pt> = pa.iter().map(|p| [p[0] * s, p[1] * s]).collect();
        polylines_meet(&scaled, &pb)
    };
    let steps = (t_max / step).ceil() as i64;
    let hi = (0..=2 * steps)
        .map(|k| t_max - k as f64 * step)
        .find(|&t| meets(t))
        .expect("some scaling must meet");
    let lo = (0..=2 * steps)
        .map(|k| -t_max + k as f64 * step)
        .find(|&t| meets(t))
        .expect("some scaling must meet");
    hi.abs().max(lo.abs())
}

fn seg_dist(p: Pt, u: Pt, v: Pt) -> f64 {
    let d = [v[0] - u[0], v[1] - u[1]];
    let l2 = d[0] * d[0] + d[1] * d[1];
    let t = if l2 > 0.0 {
        (((p[0] - u[0]) * d[0] + (p[1] - u[1]) * d[1]) / l2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    ((u[0] + t * d[0] - p[0]).powi(2) + (u[1] + t * d[1] - p[1]).powi(2)).sqrt()
}

/// `refine` points per edge, including the start vertex.
pub fn densify(p: &[Pt], refine: usize) -> Vec<Pt> {
    let n = p.len();
    let mut out = Vec::with_capacity(n * refine);
    for i in 0..n {
        let (u, v) = (p[i], p[(i + 1) % n]);
        for k in 0..refine {
            let t = k as f64 / refine as f64;
            out.push([u[0] + t * (v[0] - u[0]), u[1] + t * (v[1] - u[1])]);
        }
    }
    out
}

/// Plain double loop: dense points of each polyline against every edge of the other.
pub fn dense_hausdorff(a: &StarCurve<f64>, b: &StarCurve<f64>, refine: usize) -> f64 {
    let pa = vertices(a);
    let pb = vertices(b);
    let directed = |from: &[Pt], to: &[Pt]| {
        let m = to.len();
        densify(from, refine)
            .into_iter()
            .map(|p| {
                (0..m)
                    .map(|k| seg_dist(p, to[k], to[(k + 1) % m]))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    directed(&pa, &pb).max(directed(&pb, &pa))
}

/// Linear interpolant of the polar radius at `theta`, independent of the library.
pub fn interp_radius(c: &StarCurve<f64>, theta: f64) -> f64 {
    let n = c.len();
    let x = theta.rem_euclid(std::f64::consts::TAU) / std::f64::consts::TAU * n as f64;
    let i = (x.floor() as usize).min(n - 1);
    let w = x - i as f64;
    (1.0 - w) * c.radii()[i] + w * c.radii()[(i + 1) % n]
}

/// True when the polygon holds the disc of radius `delta` in its kernel and
/// stays inside the disc of radius `m`.
pub fn in_class(c: &StarCurve<f64>, delta: f64, m: f64) -> bool {
    let p = vertices(c);
    let n = p.len();
    c.radii().iter().all(|&r| r >= delta && r <= m)
        && (0..n).all(|i| {
            let (u, v) = (p[i], p[(i + 1) % n]);
            let len = ((v[0] - u[0]).powi(2) + (v[1] - u[1]).powi(2)).sqrt();
            cross(u, v, [0.0, 0.0]) / len >= delta
        })
}

/// Random smooth star curve of the class with bounds `(delta, m)`, by rejection.
pub fn class_curve<R: Rng>(rng: &mut R, n: usize, delta: f64, m: f64) -> StarCurve<f64> {
    loop {
        let base: f64 = rng.gen_range(delta * 1.3..m * 0.9);
        let modes = rng.gen_range(1..=6);
        let room = (base - delta).min(m - base);
        let mut coefs = Vec::new();
        for k in 1..=modes {
            let amp = rng.gen_range(0.0..room) / (modes as f64 * k as f64);
            coefs.push((k as f64, amp, rng.gen_range(0.0..std::f64::consts::TAU)));
        }
        let c = StarCurve::from_fn(n, |t: f64| {
            base + coefs
                .iter()
                .map(|&(k, a, ph)| a * (k * t + ph).cos())
                .sum::<f64>()
        });
        if let Ok(c) = c {
            if in_class(&c, delta, m) {
                return c;
            }
        }
    }
}

pub fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
