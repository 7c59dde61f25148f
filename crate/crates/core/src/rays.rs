//! External rays in the dynamical plane, traced by Newton continuation on a
//! deep iterate of the Böttcher coordinate.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::angle::Angle;
use crate::dynamics::bottcher_asymptotics;
use crate::error::{invalid, Result};
use crate::poly::Polynomial;

type C64 = Complex64;

/// Potential at which the asymptotic chart plus its correction series is used.
pub(crate) const CHART_LEVEL: f64 = 12.0;

/// Largest relative potential step taken without subdivision.
pub(crate) const MAX_RATIO_STEP: f64 = 0.04;

/// Asymptotic data of the Böttcher chart φ(z) ≈ λ(z − δ).
#[derive(Debug, Clone)]
pub(crate) struct Chart {
    pub d: usize,
    pub lambda: C64,
    pub delta: C64,
    /// Potential from which on the chart is applied.
    pub level: f64,
}

impl Chart {
    pub fn new(p: &Polynomial) -> Chart {
        let d = p.degree();
        let (lambda, delta) = bottcher_asymptotics(p);
        let lead = p.leading();
        let mut spread = 0.0f64;
        for j in 0..d {
            let c = (p.coeffs[j] / lead).norm();
            if c > 0.0 {
                spread = spread.max(c.powf(1.0 / (d - j) as f64));
            }
        }
        Chart { d, lambda, delta, level: CHART_LEVEL + (1.0 + spread + delta.norm()).ln() }
    }

    /// Smallest n with d^n·potential ≥ level.
    pub fn depth(&self, potential: f64) -> usize {
        let mut n = 0;
        let mut s = potential;
        while s < self.level && n < 200 {
            s *= self.d as f64;
            n += 1;
        }
        n
    }

    /// log φ(z) for z above the chart level: the asymptotic term plus the
    /// convergent product corrections.
    pub fn log_phi(&self, p: &Polynomial, z: C64) -> C64 {
        let df = self.d as f64;
        let mut prev = self.lambda * (z - self.delta);
        let mut acc = prev.ln();
        let mut w = z;
        let mut scale = 1.0 / df;
        for _ in 0..64 {
            let nw = p.eval(w);
            let an = self.lambda * (nw - self.delta);
            let ratio = an / prev.powi(self.d as i32);
            if !ratio.re.is_finite() {
                break;
            }
            acc += ratio.ln() * scale;
            if (ratio - 1.0).norm() < 1e-17 || nw.norm() > 1e40 {
                break;
            }
            scale /= df;
            prev = an;
            w = nw;
        }
        acc
    }
}

/// Wraps the imaginary part into (−π, π].
pub(crate) fn wrap_im(z: C64) -> C64 {
    let mut im = z.im % (2.0 * PI);
    if im > PI {
        im -= 2.0 * PI;
    } else if im <= -PI {
        im += 2.0 * PI;
    }
    C64::new(z.re, im)
}

/// 2π·(d^n·angle mod 1).
pub(crate) fn level_argument(angle: &Angle, d: usize, n: usize) -> f64 {
    2.0 * PI * angle.mul_pow(d as i128, n as u32).to_f64()
}

#[derive(Debug, Clone, Copy)]
pub struct RayPoint {
    pub potential: f64,
    pub point: C64,
    pub angle: Angle,
}

#[derive(Debug, Clone)]
pub struct RayTrace {
    pub points: Vec<RayPoint>,
    /// Continuation stalled before reaching r_stop; `points` ends at the last good point.
    pub truncated: bool,
    pub message: Option<String>,
}

/// Newton for φ(z) = e^{ρ + 2πiα} from `z`, in level coordinates.
fn ray_newton(p: &Polynomial, chart: &Chart, angle: &Angle, rho: f64, mut z: C64) -> Option<C64> {
    let n = chart.depth(rho);
    let scale = (chart.d as f64).powi(n as i32);
    let target = C64::new(scale * rho, level_argument(angle, chart.d, n));
    for _ in 0..50 {
        let mut w = z;
        let mut dw = C64::new(1.0, 0.0);
        for _ in 0..n {
            let (v, dv) = p.eval_d(w);
            dw *= dv;
            w = v;
        }
        let f = wrap_im(chart.log_phi(p, w) - target);
        let df = dw / (w - chart.delta);
        let mut step = f / df;
        if !step.is_finite() {
            return None;
        }
        if f.norm() > 1.0 {
            step /= f.norm();
        }
        z -= step;
        if step.norm() <= 1e-15 * z.norm().max(1.0) || f.norm() <= 1e-13 * scale * rho.max(1.0) {
            return if f.norm() <= 1e-7 { Some(z) } else { None };
        }
    }
    None
}

/// Moves a ray point from potential `from` to `to`, subdividing on failure.
fn advance(p: &Polynomial, chart: &Chart, angle: &Angle, from: f64, to: f64, z: C64) -> Option<C64> {
    let mut cur = from;
    let mut z = z;
    let mut ratio = 1.0 - MAX_RATIO_STEP / chart.d as f64 * 3.0;
    while cur != to {
        let next = if to < cur { (cur * ratio).max(to) } else { (cur / ratio).min(to) };
        match ray_newton(p, chart, angle, next, z) {
            Some(w) if (w - z).norm() <= 0.5 * (z - chart.delta).norm() + 1e-12 => {
                z = w;
                cur = next;
            }
            _ => {
                ratio = ratio.sqrt();
                if 1.0 - ratio < 1e-7 {
                    return None;
                }
            }
        }
    }
    Some(z)
}

/// Start of a ray at a potential where the asymptotic chart is accurate.
fn ray_start(p: &Polynomial, chart: &Chart, angle: &Angle, rho: f64) -> Option<(f64, C64)> {
    let hi = rho.max(chart.level);
    let guess = chart.delta + C64::from_polar(hi.exp(), 2.0 * PI * angle.to_f64()) / chart.lambda;
    ray_newton(p, chart, angle, hi, guess).map(|z| (hi, z))
}

/// The point of potential `rho` on the external ray of angle `angle`.
pub fn ray_point(p: &Polynomial, angle: &Angle, rho: f64) -> Result<C64> {
    if p.degree() < 2 || !(rho > 0.0) {
        return invalid("need degree ≥ 2 and rho > 0");
    }
    let chart = Chart::new(p);
    let (hi, z) = ray_start(p, &chart, angle, rho).ok_or_else(|| crate::Error::NonConvergence("ray start failed".into()))?;
    advance(p, &chart, angle, hi, rho, z).ok_or_else(|| crate::Error::NonConvergence(format!("ray stalled above potential {rho}")))
}

/// Samples the ray at `steps` potentials from r_start down to r_stop,
/// geometrically spaced.
pub fn trace_dynamical_ray(p: &Polynomial, angle: &Angle, r_start: f64, r_stop: f64, steps: usize) -> Result<RayTrace> {
    if p.degree() < 2 {
        return invalid("degree must be at least 2");
    }
    if !(r_start > r_stop && r_stop > 0.0) || steps < 2 {
        return invalid("need r_start > r_stop > 0 and at least 2 steps");
    }
    let chart = Chart::new(p);
    let mut points = Vec::with_capacity(steps);
    let Some((hi, z0)) = ray_start(p, &chart, angle, r_start) else {
        return Ok(RayTrace { points, truncated: true, message: Some("ray start failed".into()) });
    };
    let Some(mut z) = advance(p, &chart, angle, hi, r_start, z0) else {
        return Ok(RayTrace { points, truncated: true, message: Some(format!("stalled above potential {r_start}")) });
    };
    let q = (r_stop / r_start).powf(1.0 / (steps - 1) as f64);
    let mut rho = r_start;
    points.push(RayPoint { potential: rho, point: z, angle: *angle });
    for j in 1..steps {
        let next = if j == steps - 1 { r_stop } else { r_start * q.powi(j as i32) };
        match advance(p, &chart, angle, rho, next, z) {
            Some(w) => {
                z = w;
                rho = next;
                points.push(RayPoint { potential: rho, point: z, angle: *angle });
            }
            None => {
                return Ok(RayTrace {
                    points,
                    truncated: true,
                    message: Some(format!("Newton stagnated between potentials {rho} and {next}")),
                })
            }
        }
    }
    Ok(RayTrace { points, truncated: false, message: None })
}

/// |P(ray_α(ρ)) − ray_{dα}(dρ)|.
pub fn doubling_defect(p: &Polynomial, angle: &Angle, rho: f64) -> Result<f64> {
    let d = p.degree();
    let z = ray_point(p, angle, rho)?;
    let w = ray_point(p, &angle.mul(d as i128), rho * d as f64)?;
    Ok((p.eval(z) - w).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::bottcher_value;

    fn half_square() -> Polynomial {
        Polynomial::from_real(&[0.0, 0.0, 0.5])
    }

    #[test]
    fn closed_form_rays() {
        let p = half_square();
        let t = trace_dynamical_ray(&p, &Angle::exact(0, 1).unwrap(), 2.0, 0.01, 12).unwrap();
        assert!(!t.truncated);
        for pt in &t.points {
            let expect = 2.0 * pt.potential.exp();
            assert!((pt.point - C64::new(expect, 0.0)).norm() < 1e-12 * expect, "{:?}", pt.point);
        }
        let t = trace_dynamical_ray(&p, &Angle::exact(1, 2).unwrap(), 1.0, 0.1, 5).unwrap();
        for pt in &t.points {
            assert!((pt.point + 2.0 * pt.potential.exp()).norm() < 1e-12 * 4.0);
        }
    }

    #[test]
    fn matches_bottcher_coordinate() {
        let p = Polynomial::new(alloc::vec![C64::new(-0.12, 0.75), C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
        let a = Angle::exact(3, 7).unwrap();
        let z = ray_point(&p, &a, 0.05).unwrap();
        let phi = bottcher_value(&p, z, 1e-12).unwrap();
        assert!((phi.norm().ln() - 0.05).abs() < 1e-10);
        let ang = (phi.arg() / (2.0 * PI)).rem_euclid(1.0);
        assert!((ang - 3.0 / 7.0).abs() < 1e-10);
    }

    #[test]
    fn doubling_identity_on_a_cubic() {
        let p = Polynomial::new(alloc::vec![C64::new(0.31, -0.42), C64::new(-0.2, 0.1), C64::new(0.45, 0.05), C64::new(1.0, 0.0)]);
        for (k, rho) in [(1, 0.3), (5, 0.08), (11, 0.02)] {
            let a = Angle::exact(k, 13).unwrap();
            let defect = doubling_defect(&p, &a, rho).unwrap();
            assert!(defect < 1e-8, "{defect}");
        }
    }

    #[test]
    fn invalid_inputs() {
        let p = half_square();
        let a = Angle::exact(0, 1).unwrap();
        assert!(trace_dynamical_ray(&p, &a, 0.1, 1.0, 5).is_err());
        assert!(trace_dynamical_ray(&p, &a, 1.0, 0.1, 1).is_err());
    }
}
