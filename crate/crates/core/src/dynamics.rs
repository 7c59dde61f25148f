//! Marked polynomials P_{c,a}, orbits, Green functions, Böttcher coordinates
//! and holomorphic fixed-point indices.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::Deref;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;
use num_traits::{One, Zero};

use crate::error::{invalid, Error, Result};
use crate::exact::exact_preperiod;
use crate::poly::Polynomial;

/// P(z) = z^d/d + Σ_{j=2}^{d-1} (-1)^{d-j} σ_{d-j}(c) z^j / j + a^d,
/// whose derivative is z·∏(z - c_i).
#[derive(Debug, Clone, PartialEq)]
pub struct MarkedPolynomial {
    pub degree: usize,
    pub crit_params: Vec<Complex64>,
    pub a: Complex64,
    pub poly: Polynomial,
}

impl Deref for MarkedPolynomial {
    type Target = Polynomial;
    fn deref(&self) -> &Polynomial {
        &self.poly
    }
}

impl MarkedPolynomial {
    /// Critical points in marked order (0, c_1, ..., c_{d-2}).
    pub fn critical_points(&self) -> Vec<Complex64> {
        let mut v = Vec::with_capacity(self.degree - 1);
        v.push(Complex64::zero());
        v.extend_from_slice(&self.crit_params);
        v
    }

    /// δ = Σ c_k / (d-1), the centre of the Böttcher asymptotics.
    pub fn delta(&self) -> Complex64 {
        self.crit_params.iter().sum::<Complex64>() / (self.degree - 1) as f64
    }
}

/// Elementary symmetric polynomials σ_0..σ_m of the given values.
pub fn elementary_symmetric(values: &[Complex64]) -> Vec<Complex64> {
    let mut e = vec![Complex64::zero(); values.len() + 1];
    e[0] = Complex64::one();
    for (i, &v) in values.iter().enumerate() {
        for j in (1..=i + 1).rev() {
            let prev = e[j - 1];
            e[j] += prev * v;
        }
    }
    e
}

pub fn build_polynomial(d: usize, crit_params: &[Complex64], a: Complex64) -> Result<MarkedPolynomial> {
    if d < 2 {
        return invalid(format!("degree must be at least 2, got {d}"));
    }
    if crit_params.len() != d - 2 {
        return invalid(format!("expected {} critical parameters, got {}", d - 2, crit_params.len()));
    }
    if !a.re.is_finite() || !a.im.is_finite() || crit_params.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return invalid("non-finite parameter");
    }
    let sigma = elementary_symmetric(crit_params);
    let mut coeffs = vec![Complex64::zero(); d + 1];
    for j in 2..=d {
        let s = sigma[d - j];
        let sign = if (d - j) % 2 == 0 { 1.0 } else { -1.0 };
        coeffs[j] = s * sign / j as f64;
    }
    let mut ad = Complex64::one();
    for _ in 0..d {
        ad *= a;
    }
    coeffs[0] = ad;
    Ok(MarkedPolynomial { degree: d, crit_params: crit_params.to_vec(), a, poly: Polynomial { coeffs } })
}

pub fn evaluate(p: &Polynomial, z: Complex64) -> Complex64 {
    p.eval(z)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitRecord {
    pub start: Complex64,
    pub points: Vec<Complex64>,
    pub escaped_at: Option<usize>,
    pub escape_radius: f64,
}

/// Orbit z, P(z), ..., stopping at the first point outside the escape radius
/// or after `n_max` applications of P.
pub fn iterate(p: &Polynomial, z: Complex64, n_max: usize, escape_radius: f64) -> OrbitRecord {
    let mut points = Vec::with_capacity(n_max.min(1 << 16) + 1);
    let mut w = z;
    let mut escaped_at = None;
    for j in 0..=n_max {
        points.push(w);
        if w.norm() > escape_radius {
            escaped_at = Some(j);
            break;
        }
        if j < n_max {
            w = p.eval(w);
        }
    }
    OrbitRecord { start: z, points, escaped_at, escape_radius }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreenStatus {
    /// Orbit left the certified escape radius; value carries a rigorous tail bound.
    Escaped,
    /// Orbit certified bounded (exact preperiodicity or an attracting invariant disk).
    Bounded,
    /// Budget exhausted with neither certificate.
    Undecided,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenValue {
    pub value: f64,
    pub error_bound: f64,
    pub iterations_used: usize,
    pub status: GreenStatus,
}

impl GreenValue {
    pub fn is_escaping(&self) -> bool {
        self.status == GreenStatus::Escaped
    }

    /// Upper bound on the true Green value.
    pub fn upper(&self) -> f64 {
        self.value + self.error_bound
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GreenOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Attempt bounded-orbit certificates when the budget runs out.
    pub certify: bool,
}

impl GreenOptions {
    pub fn new(tol: f64) -> Self {
        GreenOptions { tol, max_iter: 4096, certify: true }
    }
}

/// Precomputed escape data for one polynomial. With L the leading
/// coefficient and ε(R) = Σ_{j<d} |b_j| R^{j-d} / |L|, every |w| ≥ R★ has
/// ε(|w|) ≤ 1/2 and |P(w)| ≥ 2|w|, so g(w) = log|w| + log|L|/(d-1) up to
/// 2ε(|w|)/(d-1).
#[derive(Debug, Clone)]
pub struct GreenEvaluator<'a> {
    pub poly: &'a Polynomial,
    pub degree: usize,
    pub escape_radius: f64,
    log_lead_shift: f64,
    abs_low: Vec<f64>,
    abs_lead: f64,
}

impl<'a> GreenEvaluator<'a> {
    pub fn new(poly: &'a Polynomial) -> Result<Self> {
        let degree = poly.degree();
        if degree < 2 {
            return invalid("Green function needs degree at least 2");
        }
        let abs_lead = poly.leading().norm();
        let abs_low: Vec<f64> = poly.coeffs[..degree].iter().map(|c| c.norm()).collect();
        let mut ev =
            GreenEvaluator { poly, degree, escape_radius: 1.0, log_lead_shift: abs_lead.ln() / (degree - 1) as f64, abs_low, abs_lead };
        let growth = (4.0 / abs_lead).powf(1.0 / (degree - 1) as f64);
        let mut r = growth.max(1.0);
        while ev.tail_eps(r) > 0.5 {
            r *= 2.0;
        }
        // Tighten by bisection between r/2 and r.
        let (mut lo, mut hi) = ((r / 2.0).max(growth), r);
        if lo < hi {
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if ev.tail_eps(mid) > 0.5 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            r = hi;
        }
        ev.escape_radius = r;
        Ok(ev)
    }

    pub fn tail_eps(&self, r: f64) -> f64 {
        let d = self.degree as i32;
        let mut s = 0.0;
        for (j, &b) in self.abs_low.iter().enumerate() {
            if b != 0.0 {
                s += b * r.powi(j as i32 - d);
            }
        }
        s / self.abs_lead
    }

    /// log|φ| estimate from a point beyond the escape radius, n iterations deep.
    fn escaped_value(&self, w: Complex64, n: usize) -> (f64, f64) {
        let dn = (self.degree as f64).powi(-(n as i32));
        let value = dn * (w.norm().ln() + self.log_lead_shift);
        let err = dn * 2.0 * self.tail_eps(w.norm()) / (self.degree - 1) as f64;
        (value, err)
    }

    /// Fast estimate: 0 when the orbit stays below the escape radius for
    /// `max_iter` steps, otherwise the escape-time value.
    pub fn estimate(&self, z: Complex64, max_iter: usize) -> f64 {
        let mut w = z;
        for n in 0..=max_iter {
            if w.norm() >= self.escape_radius {
                let (v, _) = self.escaped_value(w, n);
                return v.max(0.0);
            }
            if n < max_iter {
                w = self.poly.eval(w);
            }
        }
        0.0
    }

    pub fn value(&self, z: Complex64, opts: &GreenOptions) -> GreenValue {
        let mut w = z;
        let mut tail: Vec<Complex64> = Vec::new();
        let mut n = 0usize;
        loop {
            let r = w.norm();
            if !r.is_finite() {
                break;
            }
            if r >= self.escape_radius {
                let (value, err) = self.escaped_value(w, n);
                if err <= opts.tol || r > 1e150 {
                    return GreenValue { value, error_bound: err, iterations_used: n, status: GreenStatus::Escaped };
                }
            } else if n >= opts.max_iter {
                break;
            }
            if tail.len() == 256 {
                tail.remove(0);
            }
            tail.push(w);
            w = self.poly.eval(w);
            n += 1;
        }
        let undecided_err = (self.degree as f64).powi(-(opts.max_iter.min(1000) as i32))
            * (self.escape_radius.ln() + self.log_lead_shift).abs().max(self.escape_radius.ln());
        if opts.certify && self.certify_bounded(z, &tail) {
            return GreenValue { value: 0.0, error_bound: 0.0, iterations_used: n, status: GreenStatus::Bounded };
        }
        GreenValue { value: 0.0, error_bound: undecided_err, iterations_used: n, status: GreenStatus::Undecided }
    }

    fn certify_bounded(&self, z: Complex64, tail: &[Complex64]) -> bool {
        if exact_preperiod(&self.poly.coeffs, z, 96, 1 << 15).is_some() {
            return true;
        }
        attracting_cycle_certificate(self.poly, tail).is_some()
    }
}

/// Looks for an attracting cycle near the end of a bounded orbit and a disk
/// around one of its points that P^p maps strictly into itself (checked by
/// sampling the boundary circle). Returns (cycle point, period, multiplier).
pub fn attracting_cycle_certificate(p: &Polynomial, tail: &[Complex64]) -> Option<(Complex64, usize, Complex64)> {
    let n = tail.len();
    if n < 4 {
        return None;
    }
    let last = tail[n - 1];
    let scale = 1.0 + last.norm();
    let period = (1..=(n / 2).min(96)).find(|&q| (tail[n - 1] - tail[n - 1 - q]).norm() < 1e-6 * scale)?;
    // Newton refinement of the cycle point on P^q(x) = x.
    let mut x = last;
    for _ in 0..50 {
        let (mut y, mut dy) = (x, Complex64::one());
        for _ in 0..period {
            let (v, dv) = p.eval_d(y);
            dy *= dv;
            y = v;
        }
        let denom = dy - Complex64::one();
        if denom.norm() < 1e-300 {
            break;
        }
        let step = (y - x) / denom;
        x -= step;
        if step.norm() < 1e-15 * scale {
            break;
        }
    }
    let mut mult = Complex64::one();
    let mut y = x;
    for _ in 0..period {
        let (v, dv) = p.eval_d(y);
        mult *= dv;
        y = v;
    }
    if (y - x).norm() > 1e-8 * scale || mult.norm() >= 1.0 - 1e-9 {
        return None;
    }
    let target = 0.5 * (1.0 + mult.norm());
    let mut rho = 0.25 * scale;
    for _ in 0..48 {
        let mut ok = true;
        for s in 0..64 {
            let b = x + Complex64::from_polar(rho, 2.0 * PI * (s as f64 + 0.5) / 64.0);
            let mut w = b;
            for _ in 0..period {
                w = p.eval(w);
            }
            if (w - x).norm() > target.max(0.9) * rho * if target < 0.9 { 1.0 } else { 0.999 } {
                ok = false;
                break;
            }
        }
        if ok {
            // The orbit must actually enter the disk.
            if tail.iter().any(|w| (w - x).norm() < 0.5 * rho) {
                return Some((x, period, mult));
            }
            let mut w = last;
            for _ in 0..period * 200 {
                w = p.eval(w);
                if (w - x).norm() < 0.5 * rho {
                    return Some((x, period, mult));
                }
            }
            return None;
        }
        rho *= 0.5;
    }
    None
}

pub fn green_value(p: &Polynomial, z: Complex64, tol: f64) -> Result<GreenValue> {
    green_value_with(p, z, &GreenOptions::new(tol))
}

pub fn green_value_with(p: &Polynomial, z: Complex64, opts: &GreenOptions) -> Result<GreenValue> {
    if !(opts.tol > 0.0) {
        return invalid("tolerance must be positive");
    }
    Ok(GreenEvaluator::new(p)?.value(z, opts))
}

/// Critical points of an arbitrary polynomial (roots of P').
pub fn critical_points(p: &Polynomial) -> Vec<Complex64> {
    p.derivative().roots()
}

/// Böttcher normalisation φ(w) ≈ λ(w - δ) at infinity for P = L z^d + b z^{d-1} + ...:
/// λ = L^{1/(d-1)} (principal root), δ = -b/(dL).
pub fn bottcher_asymptotics(p: &Polynomial) -> (Complex64, Complex64) {
    let d = p.degree();
    let lead = p.leading();
    let lambda = lead.powf(1.0 / (d - 1) as f64);
    let delta = -p.coeffs[d - 1] / (lead * d as f64);
    (lambda, delta)
}

struct Bottcher<'a> {
    p: &'a Polynomial,
    d: usize,
    lambda: Complex64,
    delta: Complex64,
    /// Coefficient moduli of P(δ+u) - δ below degree d-1, for the ratio bound.
    shifted_low: Vec<f64>,
    lead: f64,
}

impl<'a> Bottcher<'a> {
    fn new(p: &'a Polynomial) -> Self {
        let d = p.degree();
        let (lambda, delta) = bottcher_asymptotics(p);
        let mut t = p.taylor_at(delta);
        t[0] -= delta;
        let shifted_low = t[..d - 1].iter().map(|c| c.norm()).collect();
        Bottcher { p, d, lambda, delta, shifted_low, lead: p.leading().norm() }
    }

    fn asym(&self, w: Complex64) -> Complex64 {
        self.lambda * (w - self.delta)
    }

    /// Bound on |φ_asym(P(w)) / φ_asym(w)^d - 1|.
    fn ratio_dev(&self, w: Complex64) -> f64 {
        let u = (w - self.delta).norm();
        let d = self.d as i32;
        let mut s = 0.0;
        for (j, &b) in self.shifted_low.iter().enumerate() {
            if b != 0.0 {
                s += b * u.powi(j as i32 - d);
            }
        }
        s / self.lead
    }

    fn safe(&self, w: Complex64) -> bool {
        let u = (w - self.delta).norm();
        self.ratio_dev(w) <= 0.25 && self.lead * u.powi(self.d as i32 - 1) >= 4.0
    }

    /// Product formula, valid when w is in the safe region.
    fn product(&self, w: Complex64, tol: f64) -> Complex64 {
        let mut phi = self.asym(w);
        let mut prev = phi;
        let mut x = w;
        let mut pow = 1.0 / self.d as f64;
        for _ in 0..200 {
            let next = self.p.eval(x);
            let an = self.asym(next);
            let ratio = an / prev.powi(self.d as i32);
            if !ratio.re.is_finite() {
                break;
            }
            phi *= ratio.powf(pow);
            let dev = self.ratio_dev(next);
            if 2.0 * dev * pow <= tol * 0.1 || next.norm() > 1e100 {
                break;
            }
            prev = an;
            x = next;
            pow /= self.d as f64;
        }
        phi
    }

    /// d(log φ)/dz by the chain rule, d^{-n} (P^n)'/P^n.
    fn log_derivative(&self, z: Complex64) -> Complex64 {
        let mut w = z;
        let mut ld = Complex64::one() / (z - self.delta);
        let mut scale = 1.0;
        for _ in 0..400 {
            if w.norm() > 1e40 && self.safe(w) {
                break;
            }
            let (v, dv) = self.p.eval_d(w);
            ld = ld * dv * (w - self.delta) / (v - self.delta);
            scale /= self.d as f64;
            w = v;
        }
        ld * scale
    }
}

/// Returns φ_P(z) for z in the basin of infinity above all critical levels.
pub fn bottcher_value(p: &Polynomial, z: Complex64, tol: f64) -> Result<Complex64> {
    let d = p.degree();
    let ev = GreenEvaluator::new(p)?;
    let opts = GreenOptions { tol: tol.min(1e-10), max_iter: 4096, certify: false };
    let gz = ev.value(z, &opts);
    if !gz.is_escaping() {
        return Err(Error::Domain("point does not escape".into()));
    }
    let mut big_g = 0.0f64;
    for c in critical_points(p) {
        let gc = ev.value(c, &opts);
        if gc.is_escaping() {
            big_g = big_g.max(gc.value + gc.error_bound);
        }
    }
    if gz.value - gz.error_bound <= big_g * (1.0 + 1e-9) + 1e-12 {
        return Err(Error::Domain("point is not above the critical level".into()));
    }
    let b = Bottcher::new(p);
    // Orbit up to the first safe point.
    let mut orbit = vec![z];
    while !b.safe(*orbit.last().unwrap()) {
        let next = p.eval(*orbit.last().unwrap());
        orbit.push(next);
        if orbit.len() > 4096 {
            return Err(Error::Domain("orbit does not reach the Böttcher chart".into()));
        }
    }
    let m = orbit.len() - 1;
    let phi_m = b.product(orbit[m], tol);
    if m == 0 {
        return Ok(phi_m);
    }
    // Refinement levels: e_n is the d^n-th root of φ_asym(z_n) closest to e_{n-1}.
    let mut est = b.asym(z);
    let mut consistent = true;
    let mut dn = 1.0f64;
    for w in orbit.iter().skip(1) {
        dn *= d as f64;
        let cand = nearest_root(b.asym(*w), dn, est);
        let jump = angle_between(cand, est);
        if jump > PI / (2.0 * dn) {
            consistent = false;
            break;
        }
        est = cand;
    }
    let guide = if consistent { est } else { flow_guide(&b, z, gz.value, tol)? };
    let dm = (d as f64).powi(m as i32);
    let phi = nearest_root(phi_m, dm, guide);
    if angle_between(phi, guide) > PI / (4.0 * dm) {
        return Err(Error::StepRefinementNeeded("branch guide too far from every root".into()));
    }
    Ok(phi)
}

fn angle_between(a: Complex64, b: Complex64) -> f64 {
    (a / b).arg().abs()
}

/// The n-th root (n given as a float power, possibly huge) of w closest in
/// argument to `guide`, with modulus |w|^{1/n}.
fn nearest_root(w: Complex64, n: f64, guide: Complex64) -> Complex64 {
    let r = w.norm().ln() / n;
    let base = w.arg() / n;
    let step = 2.0 * PI / n;
    let k = ((guide.arg() - base) / step).round();
    Complex64::from_polar(r.exp(), base + k * step)
}

/// Follows the gradient line of g outward from z (dz/dt = ρ / L'(z), t = ln ρ)
/// to the safe region; the external angle there is the angle of z.
fn flow_guide(b: &Bottcher<'_>, z: Complex64, g0: f64, tol: f64) -> Result<Complex64> {
    let run = |steps: usize| -> Option<Complex64> {
        let mut x = z;
        let mut t = g0.ln();
        // Potential at which a point is comfortably inside the safe region.
        let mut g_target = g0;
        let mut probe = x;
        for _ in 0..64 {
            if b.safe(probe) && probe.norm() > 4.0 * (1.0 + b.delta.norm()) {
                break;
            }
            g_target *= 2.0;
            probe = b.p.eval(probe);
        }
        g_target = g_target.max(g0 * 2.0);
        let t_end = g_target.ln();
        let h = (t_end - t) / steps as f64;
        let f = |x: Complex64, t: f64| -> Complex64 { Complex64::new(t.exp(), 0.0) / b.log_derivative(x) };
        for _ in 0..steps {
            let k1 = f(x, t);
            let k2 = f(x + k1 * (h / 2.0), t + h / 2.0);
            let k3 = f(x + k2 * (h / 2.0), t + h / 2.0);
            let k4 = f(x + k3 * h, t + h);
            x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
            t += h;
            if !x.re.is_finite() {
                return None;
            }
        }
        let mut w = x;
        let mut guard = 0;
        while !b.safe(w) {
            w = b.p.eval(w);
            guard += 1;
            if guard > 4096 {
                return None;
            }
        }
        let phi_w = b.product(w, tol);
        let dn = (b.d as f64).powi(guard);
        // Any root works for the angle up to the spacing at this level; the
        // flow endpoint is itself safe in practice (guard = 0).
        let ang = if guard == 0 { phi_w.arg() } else { nearest_root(phi_w, dn, b.asym(x)).arg() };
        Some(Complex64::from_polar(g0.exp(), ang))
    };
    let coarse = run(200).ok_or_else(|| Error::StepRefinementNeeded("gradient flow diverged".into()))?;
    let fine = run(400).ok_or_else(|| Error::StepRefinementNeeded("gradient flow diverged".into()))?;
    if angle_between(coarse, fine) > 1e-4 {
        return Err(Error::StepRefinementNeeded("gradient flow not resolved".into()));
    }
    Ok(fine)
}

/// Residue of 1/(P(z) - z) at the fixed point z0.
pub fn holomorphic_index(p: &Polynomial, z0: Complex64) -> Result<Complex64> {
    let mut t = p.taylor_at(z0);
    if t.len() < 2 {
        t.resize(2, Complex64::zero());
    }
    t[0] -= z0;
    t[1] -= Complex64::one();
    let scale: f64 = t.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1.0);
    if t[0].norm() > 1e-9 * scale * (1.0 + z0.norm()) {
        return invalid("z0 is not a fixed point");
    }
    // Lowest non-vanishing order m of P(z) - z at z0 (m = 1: simple fixed point).
    let eps = 1e-12 * scale;
    let m = match (1..t.len()).find(|&j| t[j].norm() > eps) {
        Some(m) => m,
        None => return invalid("P(z) = z identically"),
    };
    // 1/(t_m w^m (1 + s_1 w + ...)): residue = [w^{m-1}] (1+S)^{-1} / t_m.
    let lead = t[m];
    let s: Vec<Complex64> = (0..m).map(|j| if m + j < t.len() { t[m + j] / lead } else { Complex64::zero() }).collect();
    let mut inv = vec![Complex64::zero(); m];
    inv[0] = Complex64::one();
    for k in 1..m {
        let mut acc = Complex64::zero();
        for j in 1..=k {
            acc += s[j] * inv[k - j];
        }
        inv[k] = -acc;
    }
    Ok(inv[m - 1] / lead)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn build_examples() {
        let p = build_polynomial(2, &[], c(0.0, 0.0)).unwrap();
        assert_eq!(p.coeffs, vec![c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)]);
        let p = build_polynomial(3, &[c(2.0, 0.0)], c(1.0, 0.0)).unwrap();
        assert_eq!(p.coeffs, vec![c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0), c(1.0 / 3.0, 0.0)]);
        let p = build_polynomial(4, &[c(0.0, 0.0), c(0.0, 0.0)], c(0.0, 0.0)).unwrap();
        assert_eq!(p.coeffs[4], c(0.25, 0.0));
        assert!(p.coeffs[..4].iter().all(|z| z.is_zero()));
        assert!(build_polynomial(3, &[], c(0.0, 0.0)).is_err());
        assert!(build_polynomial(1, &[], c(0.0, 0.0)).is_err());
    }

    #[test]
    fn evaluate_examples() {
        let p = build_polynomial(2, &[], c(0.0, 0.0)).unwrap();
        assert_eq!(evaluate(&p, c(2.0, 0.0)), c(2.0, 0.0));
        let q = build_polynomial(3, &[c(2.0, 0.0)], c(1.0, 0.0)).unwrap();
        assert_eq!(evaluate(&q, c(0.0, 0.0)), c(1.0, 0.0));
        assert!((evaluate(&q, c(3.0, 0.0)) - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn iterate_examples() {
        let p = build_polynomial(2, &[], c(0.0, 0.0)).unwrap();
        let o = iterate(&p, c(0.0, 0.0), 10, 10.0);
        assert!(o.points.iter().all(|z| z.is_zero()) && o.escaped_at.is_none());
        let o = iterate(&p, c(4.0, 0.0), 10, 10.0);
        assert_eq!(o.points, vec![c(4.0, 0.0), c(8.0, 0.0), c(32.0, 0.0)]);
        assert_eq!(o.escaped_at, Some(2));
        let q = build_polynomial(3, &[c(0.0, 0.0)], c(0.0, 0.0)).unwrap();
        let o = iterate(&q, c(1.0, 0.0), 20, 10.0);
        assert!(o.escaped_at.is_none());
        assert!(o.points.windows(2).all(|w| w[1].norm() < w[0].norm() || w[0].is_zero()));
    }

    #[test]
    fn green_examples() {
        let p = build_polynomial(2, &[], c(0.0, 0.0)).unwrap();
        let g = green_value(&p, c(0.0, 0.0), 1e-10).unwrap();
        assert_eq!(g.value, 0.0);
        assert_eq!(g.status, GreenStatus::Bounded);
        let g = green_value(&p, c(1e6, 0.0), 1e-10).unwrap();
        assert!((g.value - (1e6f64.ln() - 2f64.ln())).abs() < 1e-6);
        // z^2 + 4 is conjugate to w^2/2 + 8 via w = 2z; its critical value 4 sits at w = 8.
        let q = build_polynomial(2, &[], c(8f64.sqrt(), 0.0)).unwrap();
        let g = green_value(&q, c(8.0, 0.0), 1e-12).unwrap();
        assert!(g.value >= 4f64.ln() && g.value <= 5f64.ln(), "{}", g.value);
    }

    #[test]
    fn green_undecided_is_explicit() {
        // Parabolic z + z^2: orbit of -1/2 creeps towards 0.
        let p = Polynomial::from_real(&[0.0, 1.0, 1.0]);
        let g = green_value_with(&p, c(-0.5, 0.0), &GreenOptions { tol: 1e-10, max_iter: 200, certify: true }).unwrap();
        assert_eq!(g.status, GreenStatus::Undecided);
        assert!(g.error_bound > 0.0);
    }

    #[test]
    fn attracting_cycle_is_certified() {
        // z^2 - 1 (superattracting 2-cycle) as w^2/2 - 2.
        let p = Polynomial::from_real(&[-2.0 + 1e-3, 0.0, 0.5]);
        let g = green_value(&p, c(0.0, 0.0), 1e-10).unwrap();
        assert_eq!(g.status, GreenStatus::Bounded);
    }

    #[test]
    fn bottcher_examples() {
        let p = build_polynomial(2, &[], c(0.0, 0.0)).unwrap();
        let phi = bottcher_value(&p, c(4.0, 0.0), 1e-12).unwrap();
        assert!((phi - c(2.0, 0.0)).norm() < 1e-12);
        let q = build_polynomial(2, &[], c(1.0, 0.0)).unwrap();
        let z = c(5.0, 5.0);
        let a = bottcher_value(&q, z, 1e-13).unwrap();
        let b = bottcher_value(&q, q.eval(z), 1e-13).unwrap();
        assert!((b - a * a).norm() < 1e-10 * b.norm());
        assert!(matches!(bottcher_value(&q, c(0.0, 0.0), 1e-10), Err(Error::Domain(_))));
    }

    #[test]
    fn bottcher_deep_points_use_consistent_branch() {
        // Points close to the Julia set of a cubic; check the functional equation.
        let p = build_polynomial(3, &[c(0.4, 0.3)], c(0.9, -0.2)).unwrap();
        for k in 0..24 {
            let z = Complex64::from_polar(1.6 + 0.05 * k as f64, 0.7 * k as f64);
            let gz = green_value(&p, z, 1e-12).unwrap();
            let crit = p.critical_points().iter().map(|&w| green_value(&p, w, 1e-12).unwrap().value).fold(0.0, f64::max);
            if gz.value <= crit * 1.01 {
                continue;
            }
            let a = bottcher_value(&p, z, 1e-12).unwrap();
            let b = bottcher_value(&p, p.eval(z), 1e-12).unwrap();
            assert!((b - a.powi(3)).norm() < 1e-8 * b.norm(), "z={z} a={a} b={b}");
            assert!((a.norm().ln() - gz.value).abs() < 1e-9);
        }
    }

    #[test]
    fn index_examples() {
        let douady = Polynomial::from_real(&[0.0, 1.0, 0.5, 1.0]);
        let r = holomorphic_index(&douady, c(0.0, 0.0)).unwrap();
        assert!((r - c(-4.0, 0.0)).norm() < 1e-12);
        let lin = Polynomial::from_real(&[0.0, 2.0]);
        assert!((holomorphic_index(&lin, c(0.0, 0.0)).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let p = build_polynomial(2, &[], c(0.0, 0.0)).unwrap();
        assert!((holomorphic_index(&p, c(2.0, 0.0)).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
        assert!(holomorphic_index(&p, c(1.0, 0.0)).is_err());
    }

    #[test]
    fn index_matches_contour_integral() {
        let p = build_polynomial(2, &[], c(0.0, 0.0)).unwrap();
        let z0 = c(2.0, 0.0);
        let n = 4096;
        let mut acc = c(0.0, 0.0);
        for j in 0..n {
            let th = 2.0 * PI * j as f64 / n as f64;
            let w = z0 + Complex64::from_polar(0.5, th);
            let dw = Complex64::from_polar(0.5, th) * c(0.0, 2.0 * PI / n as f64);
            acc += dw / (p.eval(w) - w);
        }
        let res = acc / c(0.0, 2.0 * PI);
        assert!((res - holomorphic_index(&p, z0).unwrap()).norm() < 1e-10);
    }
}
