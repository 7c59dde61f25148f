//! Numerical detection of critically finite parameters.

use alloc::vec::Vec;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;
use num_traits::Zero;

use crate::dynamics::critical_points;
use crate::param::ParamPoint;
use crate::poly::Polynomial;

type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MisiurewiczKind {
    /// Every critical point strictly preperiodic onto a repelling cycle.
    Misiurewicz,
    /// Every critical point eventually lands on a cycle containing a critical point.
    CriticallyFiniteHyperbolic,
    NotDetected,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalOrbit {
    pub critical_point: C64,
    pub preperiod: Option<usize>,
    pub period: Option<usize>,
    pub multiplier: Option<C64>,
    /// First point of the cycle reached by the orbit.
    pub cycle_point: Option<C64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub kind: MisiurewiczKind,
    pub orbits: Vec<CriticalOrbit>,
}

fn refine_cycle(p: &Polynomial, w0: C64, period: usize) -> C64 {
    let mut w = w0;
    for _ in 0..30 {
        let mut z = w;
        let mut dz = C64::new(1.0, 0.0);
        for _ in 0..period {
            let (v, dv) = p.eval_d(z);
            dz *= dv;
            z = v;
        }
        let den = dz - 1.0;
        if den.is_zero() {
            break;
        }
        let step = (z - w) / den;
        if !step.is_finite() {
            break;
        }
        w -= step;
        if step.norm() <= 1e-15 * w.norm().max(1.0) {
            break;
        }
    }
    w
}

/// Orbit data of one critical point: smallest l + m with z_{l+m} ≈ z_l.
pub fn detect_orbit(p: &Polynomial, crit: C64, tol: f64, budget: usize) -> CriticalOrbit {
    let mut orbit = Vec::with_capacity(budget + 1);
    orbit.push(crit);
    let none = CriticalOrbit { critical_point: crit, preperiod: None, period: None, multiplier: None, cycle_point: None };
    for t in 1..=budget {
        let z = p.eval(orbit[t - 1]);
        if !(z.norm() < 1e12) {
            return none;
        }
        orbit.push(z);
        for l in 0..t {
            let scale = orbit[l].norm().max(1.0);
            if (z - orbit[l]).norm() <= tol * scale {
                let m = t - l;
                let w = refine_cycle(p, orbit[l], m);
                let w = if (w - orbit[l]).norm() <= tol * scale { w } else { orbit[l] };
                let mut mu = C64::new(1.0, 0.0);
                let mut y = w;
                for _ in 0..m {
                    mu *= p.eval_d(y).1;
                    y = p.eval(y);
                }
                return CriticalOrbit {
                    critical_point: crit,
                    preperiod: Some(l),
                    period: Some(m),
                    multiplier: Some(mu),
                    cycle_point: Some(w),
                };
            }
        }
    }
    none
}

/// Classifies a polynomial from the orbits of the given critical points.
pub fn classify_polynomial(p: &Polynomial, crits: &[C64], tol: f64, budget: usize) -> Classification {
    let orbits: Vec<CriticalOrbit> = crits.iter().map(|&c| detect_orbit(p, c, tol, budget)).collect();
    let all_found = orbits.iter().all(|o| o.period.is_some());
    let kind = if !all_found || orbits.is_empty() {
        MisiurewiczKind::NotDetected
    } else if orbits.iter().all(|o| o.preperiod.unwrap() > 0 && o.multiplier.unwrap().norm() > 1.0 + tol) {
        MisiurewiczKind::Misiurewicz
    } else if orbits.iter().all(|o| o.multiplier.unwrap().norm() <= tol) {
        MisiurewiczKind::CriticallyFiniteHyperbolic
    } else {
        MisiurewiczKind::NotDetected
    };
    Classification { kind, orbits }
}

/// Classifies z^d + c.
pub fn misiurewicz_classify_unicritical(d: usize, c: C64, tol: f64, budget: usize) -> Classification {
    let mut coeffs = alloc::vec![C64::zero(); d + 1];
    coeffs[0] = c;
    coeffs[d] = C64::new(1.0, 0.0);
    classify_polynomial(&Polynomial::new(coeffs), &[C64::zero()], tol, budget)
}

/// Classifies P_{c,a} using its distinct marked critical points.
pub fn misiurewicz_classify(p: &ParamPoint, tol: f64, budget: usize) -> Classification {
    let mp = p.polynomial();
    let mut crits: Vec<C64> = Vec::new();
    for z in mp.critical_points() {
        if !crits.iter().any(|w| (w - z).norm() <= tol) {
            crits.push(z);
        }
    }
    classify_polynomial(&mp, &crits, tol, budget)
}

/// Classifies an arbitrary polynomial from its numerically computed critical points.
pub fn misiurewicz_classify_poly(p: &Polynomial, tol: f64, budget: usize) -> Classification {
    let mut crits: Vec<C64> = Vec::new();
    for z in critical_points(p) {
        if !crits.iter().any(|w| (w - z).norm() <= tol.sqrt()) {
            crits.push(z);
        }
    }
    classify_polynomial(p, &crits, tol, budget)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_examples() {
        let r = misiurewicz_classify_unicritical(2, C64::new(0.0, 1.0), 1e-9, 50);
        assert_eq!(r.kind, MisiurewiczKind::Misiurewicz);
        let o = r.orbits[0];
        assert_eq!((o.preperiod, o.period), (Some(2), Some(2)));
        assert!((o.multiplier.unwrap().norm() - 4.0 * 2f64.sqrt()).abs() < 1e-9);

        let r = misiurewicz_classify_unicritical(2, C64::zero(), 1e-9, 50);
        assert_eq!(r.kind, MisiurewiczKind::CriticallyFiniteHyperbolic);

        let r = misiurewicz_classify_unicritical(2, C64::new(-2.0, 0.0), 1e-9, 50);
        assert_eq!(r.kind, MisiurewiczKind::Misiurewicz);
        let o = r.orbits[0];
        assert_eq!((o.preperiod, o.period), (Some(2), Some(1)));
        assert!((o.multiplier.unwrap() - 4.0).norm() < 1e-12);

        // airplane center: period 3, superattracting
        let r = misiurewicz_classify_unicritical(2, C64::new(-1.754_877_666_246_693, 0.0), 1e-9, 50);
        assert_eq!(r.kind, MisiurewiczKind::CriticallyFiniteHyperbolic);
        assert_eq!(r.orbits[0].period, Some(3));
        // interior non-center, parabolic, escaping: nothing detected
        for c in [C64::new(-0.1, 0.1), C64::new(0.25, 0.0), C64::new(1.0, 0.0)] {
            assert_eq!(misiurewicz_classify_unicritical(2, c, 1e-9, 60).kind, MisiurewiczKind::NotDetected);
        }
    }

    #[test]
    fn param_point_classification() {
        let p = ParamPoint::from_unicritical(2, C64::new(0.0, 1.0));
        assert_eq!(misiurewicz_classify(&p, 1e-9, 50).kind, MisiurewiczKind::Misiurewicz);
        // z^3/3 (both critical points fixed at 0)
        let p = ParamPoint::new(3, alloc::vec![C64::zero()], C64::zero()).unwrap();
        assert_eq!(misiurewicz_classify(&p, 1e-9, 50).kind, MisiurewiczKind::CriticallyFiniteHyperbolic);
    }

    #[test]
    fn perturbed_point_still_detected() {
        let c = C64::new(0.0, 1.0) + C64::new(3e-9, -2e-9);
        let r = misiurewicz_classify_unicritical(2, c, 1e-6, 50);
        assert_eq!(r.kind, MisiurewiczKind::Misiurewicz);
    }
}
