//! The unicritical family f_c(z) = z^d + c: critical-orbit jets in c,
//! the Green function of the connectedness locus, and parameter rays.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;
use num_traits::Zero;

use crate::error::{Error, Result};

type C64 = Complex64;

/// Modulus above which jets switch to logarithmic form.
const LOG_SWITCH: f64 = 1e100;

/// p_j(c) = f_c^j(0) together with its c-derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Jet {
    Direct {
        v: C64,
        dv: C64,
    },
    /// `l` is a branch of log p_j and `r` = p_j' / p_j.
    Log {
        l: C64,
        r: C64,
    },
}

impl Jet {
    /// p_j' / p_j (infinite at zeros).
    pub fn log_derivative(&self) -> C64 {
        match *self {
            Jet::Direct { v, dv } => {
                if v.is_zero() {
                    C64::new(f64::INFINITY, 0.0)
                } else {
                    dv / v
                }
            }
            Jet::Log { r, .. } => r,
        }
    }

    pub fn log(&self) -> C64 {
        match *self {
            Jet::Direct { v, .. } => v.ln(),
            Jet::Log { l, .. } => l,
        }
    }

    pub fn value(&self) -> Option<C64> {
        match *self {
            Jet::Direct { v, .. } => Some(v),
            Jet::Log { .. } => None,
        }
    }
}

/// Jets p_0, …, p_n at c.
pub fn orbit_jets(d: usize, c: C64, n: usize) -> Vec<Jet> {
    let mut out = Vec::with_capacity(n + 1);
    let mut jet = Jet::Direct { v: C64::zero(), dv: C64::zero() };
    out.push(jet);
    let df = d as f64;
    for _ in 0..n {
        jet = match jet {
            Jet::Direct { v, dv } => {
                let vd1 = v.powu(d as u32 - 1);
                let nv = vd1 * v + c;
                let ndv = vd1 * dv * df + 1.0;
                if nv.norm() > LOG_SWITCH && nv.is_finite() {
                    Jet::Log { l: nv.ln(), r: ndv / nv }
                } else {
                    Jet::Direct { v: nv, dv: ndv }
                }
            }
            Jet::Log { l, r } => {
                let inv = (-(l * df)).exp();
                let q = C64::new(1.0, 0.0) + c * inv;
                Jet::Log { l: l * df + q.ln(), r: (r * df + inv) / q }
            }
        };
        out.push(jet);
    }
    out
}

/// Log-derivative of p_n − p_k at the jets.
pub fn difference_log_derivative(jn: &Jet, jk: &Jet) -> C64 {
    match (*jn, *jk) {
        (Jet::Direct { v: a, dv: da }, Jet::Direct { v: b, dv: db }) => {
            let diff = a - b;
            if diff.is_zero() {
                C64::new(f64::INFINITY, 0.0)
            } else {
                (da - db) / diff
            }
        }
        (Jet::Log { l, r }, other) => {
            let (t, s) = match other {
                Jet::Direct { v, dv } => {
                    let e = (-l).exp();
                    (v * e, dv * e)
                }
                Jet::Log { l: lk, r: rk } => {
                    let t = (lk - l).exp();
                    (t, rk * t)
                }
            };
            (r - s) / (C64::new(1.0, 0.0) - t)
        }
        (Jet::Direct { .. }, Jet::Log { .. }) => difference_log_derivative(jk, jn),
    }
}

/// Green function of the connectedness locus: G(c) = g_c(c).
pub fn green_locus(d: usize, c: C64, max_iter: usize) -> f64 {
    let df = d as f64;
    let mut z = c;
    let mut scale = 1.0;
    for _ in 0..max_iter {
        let m = z.norm();
        if m > 1e8 {
            // log|z^d + c| = d log|z| + O(|c|/|z|^d) beyond this radius.
            return scale * m.ln();
        }
        z = z.powu(d as u32) + c;
        scale /= df;
    }
    0.0
}

/// Point of potential `rho` on the parameter ray of angle `theta`.
///
/// Solves log p_{m+1}(c) = d^m (rho + 2πiθ) by Newton continuation from
/// far out, with m large enough that d^m rho stays above a fixed level.
pub fn parameter_ray_point(d: usize, theta: f64, rho: f64) -> Result<C64> {
    if !(rho > 0.0) || d < 2 {
        return Err(Error::InvalidArgument("need rho > 0 and d ≥ 2".into()));
    }
    let df = d as f64;
    let start = rho.max(4.0);
    let mut c = C64::from_polar(start.exp(), 2.0 * PI * theta);
    let kappa = df.powf(-0.25);
    let mut level = start;
    loop {
        let next = (level * kappa).max(rho);
        c = ray_newton(d, theta, next, c).ok_or_else(|| Error::NonConvergence("parameter ray Newton failed".into()))?;
        level = next;
        if level <= rho {
            return Ok(c);
        }
    }
}

fn ray_newton(d: usize, theta: f64, rho: f64, mut c: C64) -> Option<C64> {
    let df = d as f64;
    let mut m = 0usize;
    let mut scale = 1.0;
    while scale * rho < 12.0 {
        m += 1;
        scale *= df;
    }
    let mut t = theta;
    for _ in 0..m {
        t = (t * df).fract();
    }
    let target_im = 2.0 * PI * t;
    for _ in 0..60 {
        let jets = orbit_jets(d, c, m + 1);
        let j = jets[m + 1];
        let l = j.log();
        let r = j.log_derivative();
        let mut im = (l.im - target_im) % (2.0 * PI);
        if im > PI {
            im -= 2.0 * PI;
        } else if im < -PI {
            im += 2.0 * PI;
        }
        let f = C64::new(l.re - scale * rho, im);
        let step = f / r;
        if !step.is_finite() {
            return None;
        }
        // Damp steps that would jump across the ray grid.
        let cap = 0.5 * c.norm().max(1e-3);
        let step = if step.norm() > cap { step * (cap / step.norm()) } else { step };
        c -= step;
        if step.norm() <= 1e-13 * c.norm().max(1e-3) {
            return Some(c);
        }
    }
    Some(c)
}

/// `count` points of potential `rho` at angles (j + phase)/count.
pub fn equipotential_points(d: usize, count: usize, rho: f64, phase: f64) -> Result<Vec<C64>> {
    (0..count).map(|j| parameter_ray_point(d, (j as f64 + phase) / count as f64, rho)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jets_match_direct_iteration() {
        let c = C64::new(0.3, 0.5);
        let jets = orbit_jets(2, c, 4);
        // p_3 = (c^2 + c)^2 + c
        let p3 = (c * c + c) * (c * c + c) + c;
        let dp3 = (c * c + c) * (c * 2.0 + 1.0) * 2.0 + 1.0;
        assert!((jets[3].value().unwrap() - p3).norm() < 1e-14);
        assert!((jets[3].log_derivative() - dp3 / p3).norm() < 1e-12);
    }

    #[test]
    fn log_form_continues_consistently() {
        let c = C64::new(2.0, 1.0);
        let jets = orbit_jets(2, c, 40);
        assert!(matches!(jets[40], Jet::Log { .. }));
        // finite-difference check of r on log|p|
        let h = 1e-7;
        let a = orbit_jets(2, c + h, 12)[12].log().re;
        let b = orbit_jets(2, c - h, 12)[12].log().re;
        let fd = (a - b) / (2.0 * h);
        assert!((fd - orbit_jets(2, c, 12)[12].log_derivative().re).abs() < 1e-3 * fd.abs());
        let dl = difference_log_derivative(&jets[40], &jets[39]);
        assert!(dl.is_finite());
    }

    #[test]
    fn green_locus_values() {
        assert_eq!(green_locus(2, C64::new(-1.0, 0.0), 500), 0.0);
        // for c = 4 the bracket [log 4, log 5] holds for g_c(c)
        let g = green_locus(2, C64::new(4.0, 0.0), 500);
        assert!(g > 4f64.ln() && g < 5f64.ln());
    }

    #[test]
    fn ray_points_have_requested_potential() {
        for &(d, theta) in &[(2usize, 0.0), (2, 1.0 / 3.0), (3, 0.1), (2, 0.77)] {
            let c = parameter_ray_point(d, theta, 0.01).unwrap();
            let g = green_locus(d, c, 100_000);
            assert!((g - 0.01).abs() < 1e-6, "d={d} θ={theta} g={g}");
        }
        let c = parameter_ray_point(2, 0.0, 1e-3).unwrap();
        assert!(c.re > 0.25 && c.im.abs() < 1e-9);
        assert!((green_locus(2, c, 1_000_000) - 1e-3).abs() < 1e-8);
    }
}
