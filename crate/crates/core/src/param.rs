//! Parameter space of marked polynomials: ζ-equivalence, the potential
//! G = max_k g(c_k), connectedness-locus tests and the Lyapunov exponent.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::dynamics::{build_polynomial, GreenEvaluator, GreenOptions, GreenStatus, GreenValue, MarkedPolynomial};
use crate::error::{invalid, Error, Result};
use crate::poly::{roots_dense, Polynomial};
use crate::rng::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct ParamPoint {
    pub d: usize,
    pub c: Vec<Complex64>,
    pub a: Complex64,
}

impl ParamPoint {
    pub fn new(d: usize, c: Vec<Complex64>, a: Complex64) -> Result<Self> {
        if d < 2 || c.len() != d - 2 {
            return invalid(format!("degree {d} needs {} critical parameters", d.saturating_sub(2)));
        }
        if !a.re.is_finite() || !a.im.is_finite() || c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return invalid("non-finite coordinate");
        }
        Ok(ParamPoint { d, c, a })
    }

    /// The point whose polynomial is affinely conjugate to z^d + c
    /// (all finite critical points at 0): a^d = c·d^{1/(d-1)}.
    pub fn from_unicritical(d: usize, c: Complex64) -> Self {
        let kappa = (d as f64).powf(1.0 / (d - 1) as f64);
        let ad = if d == 2 { c * 2.0 } else { c * kappa };
        let a = principal_root(ad, d);
        ParamPoint { d, c: alloc::vec![Complex64::new(0.0, 0.0); d - 2], a }
    }

    /// A marked parameter affinely conjugate to `p`: the first critical
    /// point moves to 0 and the scaling s = (dL)^{-1/(d-1)} makes the
    /// derivative monic.
    pub fn from_polynomial(p: &Polynomial) -> Result<Self> {
        let d = p.degree();
        if d < 2 {
            return invalid("degree must be at least 2");
        }
        let crit = crate::dynamics::critical_points(p);
        let w0 = crit[0];
        let s = (p.leading() * d as f64).powf(-1.0 / (d - 1) as f64);
        let c: Vec<Complex64> = crit[1..].iter().map(|w| (w - w0) / s).collect();
        let ad = (p.eval(w0) - w0) / s;
        ParamPoint::new(d, c, principal_root(ad, d))
    }

    pub fn polynomial(&self) -> MarkedPolynomial {
        build_polynomial(self.d, &self.c, self.a).expect("validated parameter point")
    }

    /// max{|a|, |c_k|}.
    pub fn size(&self) -> f64 {
        self.c.iter().map(|z| z.norm()).fold(self.a.norm(), f64::max)
    }
}

/// Principal d-th root, snapped to a nearby short dyadic value when that
/// does not worsen the residual (so e.g. sqrt(-4) is exactly 2i).
pub fn principal_root(w: Complex64, d: usize) -> Complex64 {
    let r = if d == 2 { w.norm().sqrt() } else { w.norm().powf(1.0 / d as f64) };
    let raw = Complex64::from_polar(r, w.arg() / d as f64);
    let snap = |x: f64| {
        let s = (x * 256.0).round() / 256.0;
        if (x - s).abs() <= 1e-14 * r.max(1e-300) {
            s
        } else {
            x
        }
    };
    let snapped = Complex64::new(snap(raw.re), snap(raw.im));
    let res = |z: Complex64| (z.powu(d as u32) - w).norm();
    if res(snapped) <= res(raw) {
        snapped
    } else {
        raw
    }
}

/// True iff some (d-1)-th root of unity ζ has ζ·c_i(p) = c_i(q) and
/// ζ·a(p)^d = a(q)^d, each within `tol` (relative to the coordinate size).
pub fn are_equivalent(p: &ParamPoint, q: &ParamPoint, tol: f64) -> bool {
    if p.d != q.d || p.c.len() != q.c.len() {
        return false;
    }
    let d = p.d;
    let ad_p = p.a.powu(d as u32);
    let ad_q = q.a.powu(d as u32);
    let close = |x: Complex64, y: Complex64| (x - y).norm() <= tol * (1.0 + x.norm().max(y.norm()));
    (0..d - 1).any(|k| {
        let zeta = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / (d - 1) as f64);
        let zeta = snap_unit(zeta);
        p.c.iter().zip(&q.c).all(|(&x, &y)| close(zeta * x, y)) && close(zeta * ad_p, ad_q)
    })
}

/// Removes rounding noise from roots of unity so ±1, ±i are exact.
fn snap_unit(z: Complex64) -> Complex64 {
    let s = |x: f64| {
        if x.abs() < 1e-15 {
            0.0
        } else if (x.abs() - 1.0).abs() < 1e-15 {
            x.signum()
        } else {
            x
        }
    };
    Complex64::new(s(z.re), s(z.im))
}

/// Critical-point Green values in marked order.
pub fn critical_greens(p: &ParamPoint, opts: &GreenOptions) -> Vec<GreenValue> {
    let poly = p.polynomial();
    let ev = GreenEvaluator::new(&poly).expect("degree at least 2");
    poly.critical_points().iter().map(|&c| ev.value(c, opts)).collect()
}

/// Combines per-critical values into G = max_k g(c_k).
pub fn combine_max(values: &[GreenValue]) -> GreenValue {
    let iterations_used = values.iter().map(|g| g.iterations_used).max().unwrap_or(0);
    let escaped: Vec<&GreenValue> = values.iter().filter(|g| g.is_escaping()).collect();
    let undecided_upper = values.iter().filter(|g| g.status == GreenStatus::Undecided).map(|g| g.upper()).fold(0.0, f64::max);
    if let Some(best) = escaped.iter().max_by(|x, y| x.value.partial_cmp(&y.value).unwrap()) {
        if best.value - best.error_bound >= undecided_upper {
            return GreenValue { iterations_used, ..**best };
        }
        return GreenValue {
            value: best.value,
            error_bound: best.error_bound.max(undecided_upper - best.value),
            iterations_used,
            status: GreenStatus::Undecided,
        };
    }
    if values.iter().all(|g| g.status == GreenStatus::Bounded) {
        return GreenValue { value: 0.0, error_bound: 0.0, iterations_used, status: GreenStatus::Bounded };
    }
    GreenValue { value: 0.0, error_bound: undecided_upper, iterations_used, status: GreenStatus::Undecided }
}

pub fn big_green(p: &ParamPoint, tol: f64) -> Result<GreenValue> {
    if !(tol > 0.0) {
        return invalid("tolerance must be positive");
    }
    let g = combine_max(&critical_greens(p, &GreenOptions::new(tol)));
    if g.status == GreenStatus::Undecided {
        return Err(Error::Undecided(format!("G not certified (value {} ± {})", g.value, g.error_bound)));
    }
    Ok(g)
}

/// Constant C_d with |P(z)| ≤ C_d·max(|z|, A, 1)^d, A = max{|a|, |c_k|}.
pub fn upper_growth_constant(d: usize) -> f64 {
    let mut s = 1.0 / d as f64 + 1.0;
    for j in 2..d {
        s += binomial(d - 2, d - j) / j as f64;
    }
    s
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

/// For A ≥ 1: log A − log 8 − log d/(d−1) ≤ G ≤ log A + log C_d/(d−1).
/// Lower side from the Koebe-type bound max(g(z), G) ≥ log|z−δ| − log 4 + log λ,
/// λ = d^{-1/(d-1)}, applied at z = a^d or at a critical point far from δ.
pub fn growth_lower_shift(d: usize) -> f64 {
    8f64.ln() + (d as f64).ln() / (d - 1) as f64
}

/// Recorded constant K_d with |G − log⁺ max{|a|,|c_k|}| ≤ K_d everywhere.
pub fn growth_constant(d: usize) -> f64 {
    growth_lower_shift(d).max(upper_growth_constant(d).ln() / (d - 1) as f64)
}

/// Every parameter with max{|a|,|c_k|} above this radius has G > 0.
pub fn compactness_radius(d: usize) -> f64 {
    growth_lower_shift(d).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocusStatus {
    Escaping,
    BoundedCertified,
    Undecided,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocusVerdict {
    pub status: LocusStatus,
    /// One entry per marked critical point; empty when decided by the a-priori bound.
    pub per_critical: Vec<GreenValue>,
    /// Lower bound on G from the growth estimate when it alone decided escape.
    pub a_priori_lower: Option<f64>,
}

pub fn locus_test(p: &ParamPoint, budget: usize, tol: f64) -> LocusVerdict {
    let size = p.size();
    if size > compactness_radius(p.d) {
        return LocusVerdict {
            status: LocusStatus::Escaping,
            per_critical: Vec::new(),
            a_priori_lower: Some(size.ln() - growth_lower_shift(p.d)),
        };
    }
    let opts = GreenOptions { tol, max_iter: budget, certify: true };
    let per = critical_greens(p, &opts);
    let status = if per.iter().any(|g| g.is_escaping() && g.value > 0.0) {
        LocusStatus::Escaping
    } else if per.iter().all(|g| g.status == GreenStatus::Bounded) {
        LocusStatus::BoundedCertified
    } else {
        LocusStatus::Undecided
    };
    LocusVerdict { status, per_critical: per, a_priori_lower: None }
}

/// Lyap = log d + Σ_k g(c_k).
pub fn lyapunov(p: &ParamPoint, tol: f64) -> Result<f64> {
    let per = critical_greens(p, &GreenOptions::new(tol));
    if per.iter().any(|g| g.status == GreenStatus::Undecided) {
        return Err(Error::Undecided("critical Green value not certified".into()));
    }
    Ok((p.d as f64).ln() + per.iter().map(|g| g.value).sum::<f64>())
}

/// Birkhoff average of log|P'| along a random backward orbit (iterated
/// uniform choice among the d preimages), after `burn_in` steps. Samples the
/// maximal-entropy measure; used as an independent check of `lyapunov`.
pub fn birkhoff_lyapunov(p: &ParamPoint, samples: usize, burn_in: usize, seed: u64) -> f64 {
    let poly = p.polynomial();
    let dpoly = poly.derivative();
    let mut rng = Rng::new(seed);
    let mut z = Complex64::new(10.0, 3.0) * (1.0 + p.size());
    let mut sum = 0.0;
    let mut count = 0usize;
    for step in 0..burn_in + samples {
        let mut coeffs = poly.coeffs.clone();
        coeffs[0] -= z;
        let pre = roots_dense(&coeffs);
        z = pre[rng.below(pre.len() as u64) as usize];
        if step >= burn_in {
            let v = dpoly.eval(z).norm();
            if v > 0.0 {
                sum += v.ln();
                count += 1;
            }
        }
    }
    sum / count.max(1) as f64
}

impl Default for LocusStatus {
    fn default() -> Self {
        LocusStatus::Undecided
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn equivalence_examples() {
        let p = ParamPoint::new(3, vec![c(1.0, 0.0)], c(1.0, 0.0)).unwrap();
        // ζ = -1 needs q.a^3 = -1: take a = e^{iπ/3}.
        let q = ParamPoint::new(3, vec![c(-1.0, 0.0)], Complex64::from_polar(1.0, PI / 3.0)).unwrap();
        assert!(are_equivalent(&p, &q, 1e-12));
        assert!(are_equivalent(&p, &p, 1e-12));
        let r = ParamPoint::new(3, vec![c(2.0, 0.0)], c(1.0, 0.0)).unwrap();
        assert!(!are_equivalent(&p, &r, 1e-12));
    }

    #[test]
    fn big_green_examples() {
        let p = ParamPoint::new(2, vec![], c(0.0, 0.0)).unwrap();
        assert_eq!(big_green(&p, 1e-10).unwrap().value, 0.0);
        let p = ParamPoint::new(2, vec![], c(1e6, 0.0)).unwrap();
        let g = big_green(&p, 1e-10).unwrap();
        assert!((g.value - 1e6f64.ln()).abs() < 8f64.ln());
        let p = ParamPoint::new(3, vec![c(0.0, 0.0)], c(0.0, 0.0)).unwrap();
        assert_eq!(big_green(&p, 1e-10).unwrap().value, 0.0);
    }

    #[test]
    fn locus_examples() {
        let p = ParamPoint::new(2, vec![], c(0.0, 0.0)).unwrap();
        assert_eq!(locus_test(&p, 500, 1e-10).status, LocusStatus::BoundedCertified);
        let p = ParamPoint::from_unicritical(2, c(1.0, 0.0));
        assert_eq!(locus_test(&p, 500, 1e-10).status, LocusStatus::Escaping);
        let p = ParamPoint::new(3, vec![c(0.0, 0.0)], c(100.0, 0.0)).unwrap();
        let v = locus_test(&p, 500, 1e-10);
        assert_eq!(v.status, LocusStatus::Escaping);
        assert!(v.per_critical.is_empty() && v.a_priori_lower.unwrap() > 0.0);
    }

    #[test]
    fn lyapunov_examples() {
        let p = ParamPoint::new(2, vec![], c(0.0, 0.0)).unwrap();
        assert!((lyapunov(&p, 1e-10).unwrap() - 2f64.ln()).abs() < 1e-15);
        let p = ParamPoint::new(3, vec![c(0.0, 0.0)], c(0.0, 0.0)).unwrap();
        assert!((lyapunov(&p, 1e-10).unwrap() - 3f64.ln()).abs() < 1e-15);
        let p = ParamPoint::from_unicritical(2, c(-2.0, 0.0));
        let l = lyapunov(&p, 1e-10).unwrap();
        assert!((l - 2f64.ln()).abs() < 1e-15);
        let b = birkhoff_lyapunov(&p, 10_000, 100, 11);
        assert!((b - l).abs() < 5e-2, "birkhoff {b} vs {l}");
    }

    #[test]
    fn polynomial_conversion_is_conjugate() {
        let p = Polynomial::from_real(&[0.0, 1.0, 0.5, 1.0]);
        let q = ParamPoint::from_polynomial(&p).unwrap();
        // conjugacy preserves the fixed-point multipliers (0 is a double fixed point, so roots carry √ε error)
        let mut fixed_p = p.coeffs.clone();
        fixed_p[1] -= 1.0;
        let mq = q.polynomial();
        let mut fixed_q = mq.coeffs.clone();
        fixed_q[1] -= 1.0;
        let mut mp: Vec<f64> = roots_dense(&fixed_p).iter().map(|z| p.eval_d(*z).1.norm()).collect();
        let mut mm: Vec<f64> = roots_dense(&fixed_q).iter().map(|z| mq.eval_d(*z).1.norm()).collect();
        mp.sort_by(|a, b| a.partial_cmp(b).unwrap());
        mm.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (x, y) in mp.iter().zip(&mm) {
            assert!((x - y).abs() < 1e-7, "{mp:?} {mm:?}");
        }
        let v = locus_test(&q, 4096, 1e-9);
        assert_ne!(v.status, LocusStatus::Escaping);
    }

    #[test]
    fn unicritical_conversion() {
        // z^2 + c  <->  w^2/2 + a^2 with a^2 = 2c.
        let p = ParamPoint::from_unicritical(2, c(0.0, 1.0));
        assert!((p.a * p.a - c(0.0, 2.0)).norm() < 1e-15);
        let p = ParamPoint::from_unicritical(3, c(0.5, 0.0));
        assert!((p.a.powu(3) - c(0.5 * 3f64.sqrt(), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn constants() {
        assert!((compactness_radius(2) - 16.0).abs() < 1e-12);
        assert!((upper_growth_constant(3) - (1.0 / 3.0 + 1.0 + 0.5)).abs() < 1e-15);
        assert!(growth_constant(2) >= 8f64.ln());
    }
}
