//! Critically periodic cubics: solutions of P^{n0}(0) = 0 and P^{n1}(c) = c
//! for P(z) = z³/3 − c z²/2 + A (critical points 0 and c, A = a³), with an
//! exact resultant oracle for the solution count.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
#[cfg(not(feature = "std"))]
use num_traits::Float;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{invalid, Result};
use crate::param::{compactness_radius, principal_root, ParamPoint};
use crate::poly::{roots_dense, Polynomial};

type C64 = Complex64;

/// Largest n0, n1 accepted.
pub const MAX_CENTER_PERIOD: usize = 3;

fn orbit_with_partials(c: C64, a: C64, z0: C64, dz0_dc: C64, n: usize) -> (C64, C64, C64) {
    let (mut z, mut zc, mut za) = (z0, dz0_dc, C64::zero());
    for _ in 0..n {
        let pz = z * z - c * z;
        let nz = z * z * z / 3.0 - c * z * z / 2.0 + a;
        let nzc = pz * zc - z * z / 2.0;
        let nza = pz * za + 1.0;
        z = nz;
        zc = nzc;
        za = nza;
    }
    (z, zc, za)
}

/// Residuals (F0, F1) and their Jacobian at (c, A).
fn system(c: C64, a: C64, n0: usize, n1: usize) -> ([C64; 2], [[C64; 2]; 2]) {
    let (f0, f0c, f0a) = orbit_with_partials(c, a, C64::zero(), C64::zero(), n0);
    let (g, gc, ga) = orbit_with_partials(c, a, c, C64::new(1.0, 0.0), n1);
    ([f0, g - c], [[f0c, f0a], [gc - 1.0, ga]])
}

fn newton2(mut c: C64, mut a: C64, n0: usize, n1: usize) -> Option<(C64, C64, f64)> {
    let bound = 4.0 * compactness_radius(3).powi(3);
    for _ in 0..80 {
        let (f, j) = system(c, a, n0, n1);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.is_zero() || !det.is_finite() {
            return None;
        }
        let dc = (f[0] * j[1][1] - f[1] * j[0][1]) / det;
        let da = (j[0][0] * f[1] - j[1][0] * f[0]) / det;
        if !dc.is_finite() || !da.is_finite() {
            return None;
        }
        let scale = (dc.norm() + da.norm()).max(1e-300);
        let damp = if scale > 1.0 { 1.0 / scale } else { 1.0 };
        c -= dc * damp;
        a -= da * damp;
        if c.norm() > bound || a.norm() > bound {
            return None;
        }
        if scale < 1e-14 * (1.0 + c.norm() + a.norm()) {
            let (f, _) = system(c, a, n0, n1);
            return Some((c, a, f[0].norm().max(f[1].norm())));
        }
    }
    None
}

/// F0(c, ·) as a polynomial in A for numeric c.
fn f0_in_a(c: C64, n0: usize) -> Polynomial {
    let third = C64::new(1.0 / 3.0, 0.0);
    let mut w = Polynomial::new(vec![C64::zero()]);
    let a = Polynomial::new(vec![C64::zero(), C64::new(1.0, 0.0)]);
    for _ in 0..n0 {
        let w2 = w.mul(&w);
        let w3 = w2.mul(&w);
        let t3 = Polynomial::new(w3.coeffs.iter().map(|x| x * third).collect());
        let t2 = Polynomial::new(w2.coeffs.iter().map(|x| x * c * 0.5).collect());
        w = t3.sub(&t2).sub(&Polynomial::new(a.coeffs.iter().map(|x| -x).collect()));
    }
    w
}

#[derive(Debug, Clone, PartialEq)]
pub struct Center {
    pub c: C64,
    /// A = a³.
    pub a_cubed: C64,
    pub point: ParamPoint,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CentersResult {
    pub n0: usize,
    pub n1: usize,
    pub centers: Vec<Center>,
    /// Product of the A- and c-weighted degrees, an upper bound on the count.
    pub bezout_bound: usize,
    /// False when fewer solutions were found than the resultant oracle recovers.
    pub complete: bool,
}

/// Multi-start Newton over a grid of c values, with A started at the roots
/// of P^{n0}(0) = 0 for that c; solutions are deduplicated at `tol`.
pub fn centers_2d(d: usize, n0: usize, n1: usize, tol: f64) -> Result<CentersResult> {
    if d != 3 {
        return invalid("centers_2d supports d = 3 only");
    }
    if n0 == 0 || n1 == 0 || n0 > MAX_CENTER_PERIOD || n1 > MAX_CENTER_PERIOD {
        return invalid("periods must lie in 1..=3");
    }
    let oracle = resultant_oracle(n0, n1);
    let target = oracle.as_ref().map(|o| o.solutions.len());
    let mut found: Vec<(C64, C64, f64)> = Vec::new();
    for &(radius, steps) in &[(3.0, 24usize), (4.0, 64), (5.0, 128)] {
        for i in 0..=steps {
            for j in 0..=steps {
                let c0 = C64::new(-radius + 2.0 * radius * i as f64 / steps as f64, -radius + 2.0 * radius * j as f64 / steps as f64);
                for a0 in f0_in_a(c0, n0).roots() {
                    if let Some((c, a, res)) = newton2(c0, a0, n0, n1) {
                        if res > 1e-9 {
                            continue;
                        }
                        if !found.iter().any(|(x, y, _)| (x - c).norm() + (y - a).norm() <= tol) {
                            found.push((c, a, res));
                        }
                    }
                }
            }
        }
        if target.map_or(true, |t| found.len() >= t) {
            break;
        }
    }
    found.sort_by(|x, y| {
        (x.0.re, x.0.im, x.1.re, x.1.im).partial_cmp(&(y.0.re, y.0.im, y.1.re, y.1.im)).unwrap_or(core::cmp::Ordering::Equal)
    });
    let centers: Vec<Center> = found
        .into_iter()
        .map(|(c, a, residual)| {
            let point = ParamPoint::new(3, vec![c], principal_root(a, 3)).expect("valid cubic parameter");
            Center { c, a_cubed: a, point, residual }
        })
        .collect();
    let complete =
        oracle.as_ref().map_or(true, |o| centers.len() >= o.solutions.len() && distinct_c_count(&centers, tol) >= o.distinct_roots);
    let bezout_bound = 3usize.pow((n0 - 1) as u32) * 3usize.pow(n1 as u32);
    Ok(CentersResult { n0, n1, centers, bezout_bound, complete })
}

fn distinct_c_count(centers: &[Center], tol: f64) -> usize {
    let mut cs: Vec<C64> = Vec::new();
    for x in centers {
        if !cs.iter().any(|y| (y - x.c).norm() <= tol) {
            cs.push(x.c);
        }
    }
    cs.len()
}

type Q = BigRational;

/// Polynomial in c over ℚ, ascending, no trailing zeros.
#[derive(Debug, Clone, PartialEq)]
struct QPoly(Vec<Q>);

impl QPoly {
    fn new(mut v: Vec<Q>) -> Self {
        while v.last().map_or(false, |x| x.is_zero()) {
            v.pop();
        }
        QPoly(v)
    }
    fn zero() -> Self {
        QPoly(Vec::new())
    }
    fn constant(x: Q) -> Self {
        QPoly::new(vec![x])
    }
    fn c() -> Self {
        QPoly::new(vec![Q::zero(), Q::one()])
    }
    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
    fn degree(&self) -> isize {
        self.0.len() as isize - 1
    }
    fn add(&self, o: &QPoly) -> QPoly {
        let n = self.0.len().max(o.0.len());
        QPoly::new((0..n).map(|i| self.0.get(i).cloned().unwrap_or_else(Q::zero) + o.0.get(i).cloned().unwrap_or_else(Q::zero)).collect())
    }
    fn neg(&self) -> QPoly {
        QPoly(self.0.iter().map(|x| -x).collect())
    }
    fn sub(&self, o: &QPoly) -> QPoly {
        self.add(&o.neg())
    }
    fn mul(&self, o: &QPoly) -> QPoly {
        if self.is_zero() || o.is_zero() {
            return QPoly::zero();
        }
        let mut v = vec![Q::zero(); self.0.len() + o.0.len() - 1];
        for (i, x) in self.0.iter().enumerate() {
            for (j, y) in o.0.iter().enumerate() {
                v[i + j] += x * y;
            }
        }
        QPoly::new(v)
    }
    fn scale(&self, s: &Q) -> QPoly {
        QPoly::new(self.0.iter().map(|x| x * s).collect())
    }
    fn divrem(&self, d: &QPoly) -> (QPoly, QPoly) {
        let mut r = self.0.clone();
        let dl = d.0.len();
        if r.len() < dl {
            return (QPoly::zero(), self.clone());
        }
        let lead = d.0.last().unwrap().clone();
        let mut q = vec![Q::zero(); r.len() - dl + 1];
        for i in (0..q.len()).rev() {
            let coef = &r[i + dl - 1] / &lead;
            if !coef.is_zero() {
                for j in 0..dl {
                    let t = &coef * &d.0[j];
                    r[i + j] -= t;
                }
            }
            q[i] = coef;
        }
        r.truncate(dl - 1);
        (QPoly::new(q), QPoly::new(r))
    }
    fn derivative(&self) -> QPoly {
        QPoly::new(self.0.iter().enumerate().skip(1).map(|(i, x)| x * Q::from_integer(BigInt::from(i))).collect())
    }
    fn gcd(&self, o: &QPoly) -> QPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r;
        }
        match a.0.last().cloned() {
            Some(l) => a.scale(&(Q::one() / l)),
            None => a,
        }
    }
    fn to_complex(&self) -> Vec<C64> {
        self.0.iter().map(|x| C64::new(x.to_f64().unwrap_or(f64::NAN), 0.0)).collect()
    }
}

/// Polynomial in A with coefficients in ℚ[c].
type BiPoly = Vec<QPoly>;

fn bi_trim(mut v: BiPoly) -> BiPoly {
    while v.last().map_or(false, |x| x.is_zero()) {
        v.pop();
    }
    v
}

fn bi_add(a: &BiPoly, b: &BiPoly) -> BiPoly {
    let n = a.len().max(b.len());
    bi_trim((0..n).map(|i| a.get(i).cloned().unwrap_or_else(QPoly::zero).add(&b.get(i).cloned().unwrap_or_else(QPoly::zero))).collect())
}

fn bi_mul(a: &BiPoly, b: &BiPoly) -> BiPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut v = vec![QPoly::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            v[i + j] = v[i + j].add(&x.mul(y));
        }
    }
    bi_trim(v)
}

fn bi_scale(a: &BiPoly, s: &QPoly) -> BiPoly {
    bi_trim(a.iter().map(|x| x.mul(s)).collect())
}

fn rat(p: i64, q: i64) -> Q {
    Q::new(BigInt::from(p), BigInt::from(q))
}

/// w ↦ w³/3 − c w²/2 + A.
fn bi_step(w: &BiPoly) -> BiPoly {
    let w2 = bi_mul(w, w);
    let w3 = bi_mul(&w2, w);
    let t3 = bi_scale(&w3, &QPoly::constant(rat(1, 3)));
    let t2 = bi_scale(&w2, &QPoly::c().scale(&rat(-1, 2)));
    let a: BiPoly = vec![QPoly::zero(), QPoly::constant(Q::one())];
    bi_add(&bi_add(&t3, &t2), &a)
}

fn determinant(mut m: Vec<Vec<QPoly>>) -> QPoly {
    let n = m.len();
    let mut prev = QPoly::constant(Q::one());
    let mut sign = false;
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = !sign;
                }
                None => return QPoly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[k][k].mul(&m[i][j]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = num.divrem(&prev).0;
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign {
        det.neg()
    } else {
        det
    }
}

fn sylvester(f: &BiPoly, g: &BiPoly) -> Vec<Vec<QPoly>> {
    let (df, dg) = (f.len() - 1, g.len() - 1);
    let n = df + dg;
    let mut m = vec![vec![QPoly::zero(); n]; n];
    for r in 0..dg {
        for (i, x) in f.iter().rev().enumerate() {
            m[r][r + i] = x.clone();
        }
    }
    for r in 0..df {
        for (i, x) in g.iter().rev().enumerate() {
            m[dg + r][r + i] = x.clone();
        }
    }
    m
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultantOracle {
    /// Degree of Res_A(F0, F1) in c.
    pub degree: usize,
    /// Number of distinct roots of the resultant.
    pub distinct_roots: usize,
    /// Common solutions (c, A) recovered from the resultant roots.
    pub solutions: Vec<(C64, C64)>,
}

/// Eliminates A exactly by a fraction-free Sylvester determinant over ℚ[c].
pub fn resultant_oracle(n0: usize, n1: usize) -> Option<ResultantOracle> {
    if n0 == 0 || n1 == 0 {
        return None;
    }
    let mut f0: BiPoly = Vec::new();
    for _ in 0..n0 {
        f0 = bi_step(&f0);
    }
    let mut f1: BiPoly = vec![QPoly::c()];
    for _ in 0..n1 {
        f1 = bi_step(&f1);
    }
    f1 = bi_add(&f1, &vec![QPoly::c().neg()]);
    let res = determinant(sylvester(&f0, &f1));
    if res.is_zero() {
        return None;
    }
    let degree = res.degree() as usize;
    let sf = res.divrem(&res.gcd(&res.derivative())).0;
    let distinct_roots = sf.degree() as usize;
    let mut solutions = Vec::new();
    for c in roots_dense(&sf.to_complex()) {
        let c = polish_root(&sf, c);
        for a in f0_in_a(c, n0).roots() {
            let (f, _) = system(c, a, n0, n1);
            if f[1].norm() <= 1e-6 * (1.0 + a.norm() + c.norm()).powi(3i32.pow(n1 as u32)) {
                if let Some((cc, aa, _)) = newton2(c, a, n0, n1) {
                    if !solutions.iter().any(|(x, y): &(C64, C64)| (x - cc).norm() + (y - aa).norm() < 1e-8) {
                        solutions.push((cc, aa));
                    }
                }
            }
        }
    }
    Some(ResultantOracle { degree, distinct_roots, solutions })
}

fn polish_root(p: &QPoly, mut z: C64) -> C64 {
    let poly = Polynomial::new(p.to_complex());
    for _ in 0..5 {
        let (v, dv) = poly.eval_d(z);
        if dv.is_zero() {
            break;
        }
        z -= v / dv;
    }
    z
}

/// Whether every center lies in the closed ball of the compactness radius.
pub fn all_within_compactness(r: &CentersResult) -> bool {
    let radius = compactness_radius(3);
    r.centers.iter().all(|x| x.point.size() <= radius)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn period_one_one() {
        let r = centers_2d(3, 1, 1, 1e-8).unwrap();
        assert_eq!(r.centers.len(), 3);
        assert!(r.centers.iter().any(|x| x.c.norm() < 1e-12 && x.a_cubed.norm() < 1e-12));
        assert!(r.complete && all_within_compactness(&r));
        let o = resultant_oracle(1, 1).unwrap();
        assert_eq!(o.distinct_roots, 3);
        assert_eq!(o.degree, 3);
    }

    #[test]
    fn counts_match_oracle() {
        for (n0, n1) in [(2, 1), (1, 2), (2, 2)] {
            let r = centers_2d(3, n0, n1, 1e-8).unwrap();
            let o = resultant_oracle(n0, n1).unwrap();
            assert_eq!(r.centers.len(), o.solutions.len(), "({n0},{n1})");
            for (c, a) in &o.solutions {
                assert!(r.centers.iter().any(|x| (x.c - c).norm() + (x.a_cubed - a).norm() < 1e-7));
            }
            for x in &r.centers {
                assert!(x.residual < 1e-8);
            }
            assert!(all_within_compactness(&r));
        }
    }
}
