//! Dense complex polynomials and a small-degree simultaneous root finder.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;
use num_traits::Zero;

/// Coefficients in ascending order: `coeffs[j]` multiplies `z^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    pub coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::zero());
        }
        Polynomial { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> Complex64 {
        *self.coeffs.last().unwrap()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::zero(), |acc, &c| acc * z + c)
    }

    /// Value and first derivative by a single Horner pass.
    pub fn eval_d(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::zero();
        let mut dp = Complex64::zero();
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() == 1 {
            return Polynomial::new(vec![Complex64::zero()]);
        }
        Polynomial::new(self.coeffs.iter().enumerate().skip(1).map(|(j, &c)| c * j as f64).collect())
    }

    /// Taylor coefficients at `z0`: `t[j] = P^{(j)}(z0)/j!`.
    pub fn taylor_at(&self, z0: Complex64) -> Vec<Complex64> {
        let mut t = self.coeffs.clone();
        let n = t.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let carry = t[j + 1] * z0;
                t[j] += carry;
            }
        }
        t
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![Complex64::zero(); n];
        for (j, &c) in self.coeffs.iter().enumerate() {
            out[j] += c;
        }
        for (j, &c) in other.coeffs.iter().enumerate() {
            out[j] -= c;
        }
        Polynomial::new(out)
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = vec![Complex64::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    /// All roots (with repetition) of a small-degree polynomial.
    pub fn roots(&self) -> Vec<Complex64> {
        roots_dense(&self.coeffs)
    }
}

/// Aberth iteration on explicit coefficients followed by Newton polishing.
/// Intended for degrees up to a few hundred; multiple roots come back as
/// clusters of size about eps^(1/m).
pub fn roots_dense(coeffs: &[Complex64]) -> Vec<Complex64> {
    let p = Polynomial::new(coeffs.to_vec());
    let n = p.degree();
    if n == 0 {
        return Vec::new();
    }
    // Roots at the origin are split off exactly.
    let zeros = p.coeffs.iter().take_while(|c| c.is_zero()).count();
    let q = Polynomial::new(p.coeffs[zeros..].to_vec());
    let m = q.degree();
    let mut out = vec![Complex64::zero(); zeros];
    if m == 0 {
        return out;
    }
    if m == 1 {
        out.push(-q.coeffs[0] / q.coeffs[1]);
        return out;
    }
    let lead = q.leading().norm();
    // Fujiwara-type radius, then a geometric mean of moduli for the start circle.
    let mut bound = 0.0f64;
    for (j, c) in q.coeffs.iter().enumerate().take(m) {
        let r = (c.norm() / lead).powf(1.0 / (m - j) as f64);
        bound = bound.max(r);
    }
    let r0 = (q.coeffs[0].norm() / lead).powf(1.0 / m as f64).max(1e-300);
    let radius = (r0 * 0.5 + bound * 0.5).max(1e-12);
    let mut z: Vec<Complex64> =
        (0..m).map(|j| Complex64::from_polar(radius, 2.0 * core::f64::consts::PI * (j as f64 + 0.37) / m as f64)).collect();
    let dq = q.derivative();
    let mut done = vec![false; m];
    for _ in 0..500 {
        let mut all = true;
        for i in 0..m {
            if done[i] {
                continue;
            }
            let zi = z[i];
            let f = q.eval(zi);
            if f.is_zero() {
                done[i] = true;
                continue;
            }
            let ratio = f / dq.eval(zi);
            let mut s = Complex64::zero();
            for j in 0..m {
                if j != i {
                    s += (zi - z[j]).inv();
                }
            }
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if !w.re.is_finite() || !w.im.is_finite() {
                continue;
            }
            z[i] = zi - w;
            if w.norm() <= 1e-15 * zi.norm().max(1e-300) {
                done[i] = true;
            } else {
                all = false;
            }
        }
        if all {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (f, df) = q.eval_d(*zi);
            if df.is_zero() {
                break;
            }
            let step = f / df;
            let cand = *zi - step;
            if q.eval(cand).norm() <= f.norm() {
                *zi = cand;
            } else {
                break;
            }
        }
    }
    out.extend(z);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn horner_and_derivative() {
        let p = Polynomial::from_real(&[1.0, 0.0, -1.0, 1.0 / 3.0]);
        assert!((p.eval(c(3.0, 0.0)) - c(1.0, 0.0)).norm() < 1e-14);
        let (v, d) = p.eval_d(c(2.0, 0.0));
        assert!((v - c(8.0 / 3.0 - 4.0 + 1.0, 0.0)).norm() < 1e-14);
        assert!(d.norm() < 1e-14);
    }

    #[test]
    fn taylor_shift_matches_derivatives() {
        let p = Polynomial::from_real(&[2.0, -1.0, 0.5, 3.0]);
        let z0 = c(0.3, -0.7);
        let t = p.taylor_at(z0);
        assert!((t[0] - p.eval(z0)).norm() < 1e-13);
        assert!((t[1] - p.derivative().eval(z0)).norm() < 1e-13);
        assert!((t[2] * 2.0 - p.derivative().derivative().eval(z0)).norm() < 1e-13);
        assert!((t[3] - c(3.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn roots_of_cubic() {
        // (z-1)(z+2)(z-i)
        let p = Polynomial::new(vec![c(1.0, 0.0), c(-1.0, 0.0)])
            .mul(&Polynomial::new(vec![c(2.0, 0.0), c(1.0, 0.0)]))
            .mul(&Polynomial::new(vec![c(0.0, -1.0), c(1.0, 0.0)]));
        let r = p.roots();
        for want in [c(1.0, 0.0), c(-2.0, 0.0), c(0.0, 1.0)] {
            assert!(r.iter().any(|z| (z - want).norm() < 1e-12), "{want}");
        }
    }

    #[test]
    fn roots_with_zero_root() {
        let p = Polynomial::from_real(&[0.0, 0.0, 1.0, 1.0]);
        let mut r = p.roots();
        r.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((r[0] - c(-1.0, 0.0)).norm() < 1e-12);
        assert_eq!(r[1], c(0.0, 0.0));
    }
}
