//! The Goldberg map from critical portraits to parameters with all critical
//! Green values equal to r, and stretching rays r ↦ Φ(Θ, r).

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::angle::Angle;
use crate::dynamics::{build_polynomial, GreenEvaluator, GreenOptions};
use crate::error::{invalid, Error, Result};
use crate::misiurewicz::{misiurewicz_classify, Classification};
use crate::param::{principal_root, ParamPoint};
use crate::poly::Polynomial;
use crate::portrait::{misiurewicz_portrait, validate_portrait, CriticalPortrait};
use crate::rays::{level_argument, ray_point, wrap_im, Chart, MAX_RATIO_STEP};
use crate::rng::Rng;

type C64 = Complex64;

/// Largest supported degree (d − 1 unknowns).
pub const MAX_DEGREE: usize = 5;
const K: usize = MAX_DEGREE - 1;

/// Potential at which continuation starts from the asymptotic seed.
pub const SEED_POTENTIAL: f64 = 4.0;

/// Complex value with gradient in up to K unknowns.
#[derive(Debug, Clone, Copy)]
struct Dual {
    v: C64,
    g: [C64; K],
}

impl Dual {
    fn constant(v: C64) -> Dual {
        Dual { v, g: [C64::new(0.0, 0.0); K] }
    }

    fn var(v: C64, i: usize) -> Dual {
        let mut g = [C64::new(0.0, 0.0); K];
        g[i] = C64::new(1.0, 0.0);
        Dual { v, g }
    }

    fn scale(self, s: C64) -> Dual {
        Dual { v: self.v * s, g: self.g.map(|x| x * s) }
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        let mut g = self.g;
        for i in 0..K {
            g[i] += o.g[i];
        }
        Dual { v: self.v + o.v, g }
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        self + o.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        let mut g = [C64::new(0.0, 0.0); K];
        for i in 0..K {
            g[i] = self.g[i] * o.v + self.v * o.g[i];
        }
        Dual { v: self.v * o.v, g }
    }
}

/// Unknowns (c_1, …, c_{d−2}, A = a^d); with `unicritical` only A (all c_j = 0).
#[derive(Debug, Clone)]
struct Problem {
    d: usize,
    unicritical: bool,
    /// One representative angle per marked critical point.
    reps: Vec<Angle>,
}

impl Problem {
    fn unknowns(&self) -> usize {
        if self.unicritical {
            1
        } else {
            self.d - 1
        }
    }

    fn crit_params(&self, x: &[C64]) -> Vec<C64> {
        if self.unicritical {
            vec![C64::new(0.0, 0.0); self.d - 2]
        } else {
            x[..self.d - 2].to_vec()
        }
    }

    fn a_power(&self, x: &[C64]) -> C64 {
        x[self.unknowns() - 1]
    }

    fn polynomial(&self, x: &[C64]) -> Polynomial {
        let cs = self.crit_params(x);
        let mut p = build_polynomial(self.d, &cs, C64::new(0.0, 0.0)).expect("valid degree").poly;
        p.coeffs[0] = self.a_power(x);
        p
    }

    /// Coefficients of P and the critical points, as duals.
    fn dual_data(&self, x: &[C64]) -> (Vec<Dual>, Vec<Dual>) {
        let d = self.d;
        let m = self.unknowns();
        let cs: Vec<Dual> = if self.unicritical {
            vec![Dual::constant(C64::new(0.0, 0.0)); d - 2]
        } else {
            (0..d - 2).map(|j| Dual::var(x[j], j)).collect()
        };
        // elementary symmetric polynomials of the c_j
        let mut e = vec![Dual::constant(C64::new(0.0, 0.0)); cs.len() + 1];
        e[0] = Dual::constant(C64::new(1.0, 0.0));
        for (i, &v) in cs.iter().enumerate() {
            for j in (1..=i + 1).rev() {
                e[j] = e[j] + e[j - 1] * v;
            }
        }
        let mut coeffs = vec![Dual::constant(C64::new(0.0, 0.0)); d + 1];
        for j in 2..=d {
            let sign = if (d - j) % 2 == 0 { 1.0 } else { -1.0 };
            coeffs[j] = e[d - j].scale(C64::new(sign / j as f64, 0.0));
        }
        coeffs[0] = Dual::var(x[m - 1], m - 1);
        let mut crits = vec![Dual::constant(C64::new(0.0, 0.0))];
        crits.extend(cs);
        if self.unicritical {
            crits.truncate(1);
        }
        (coeffs, crits)
    }

    /// Level-n residuals F_i = log φ(P^{n+1}(c_i)) − d^n(d r + 2πi·d θ_i), wrapped,
    /// and their Jacobian (asymptotic term only).
    fn residual(&self, x: &[C64], r: f64) -> (Vec<C64>, Vec<Vec<C64>>, f64) {
        let d = self.d;
        let m = self.unknowns();
        let p = self.polynomial(x);
        let chart = Chart::new(&p);
        let n = chart.depth(d as f64 * r);
        let scale = (d as f64).powi(n as i32);
        let (coeffs, crits) = self.dual_data(x);
        let eval = |z: Dual| {
            let mut acc = coeffs[d];
            for j in (0..d).rev() {
                acc = acc * z + coeffs[j];
            }
            acc
        };
        let mut delta = Dual::constant(C64::new(0.0, 0.0));
        for c in crits.iter().skip(1) {
            delta = delta + *c;
        }
        if self.unicritical {
            delta = Dual::constant(C64::new(0.0, 0.0));
        }
        let delta = delta.scale(C64::new(1.0 / (d - 1) as f64, 0.0));
        let mut f = Vec::with_capacity(m);
        let mut jac = Vec::with_capacity(m);
        for (i, c) in crits.iter().enumerate() {
            let mut z = eval(*c);
            for _ in 0..n {
                z = eval(z);
            }
            let u = z - delta;
            let target = C64::new(scale * d as f64 * r, level_argument(&self.reps[i], d, n + 1));
            f.push(wrap_im(chart.log_phi(&p, z.v) - target));
            jac.push((0..m).map(|j| u.g[j] / u.v).collect());
        }
        (f, jac, scale)
    }

    fn newton(&self, mut x: Vec<C64>, r: f64) -> Option<(Vec<C64>, f64)> {
        let m = self.unknowns();
        // residual floor from rounding the unknowns, per equation
        let noise = |jac: &[Vec<C64>], x: &[C64]| -> Vec<f64> {
            jac.iter().map(|row| 16.0 * f64::EPSILON * row.iter().zip(x).map(|(j, v)| j.norm() * v.norm()).sum::<f64>()).collect()
        };
        for _ in 0..60 {
            let (f, jac, scale) = self.residual(&x, r);
            let floor = noise(&jac, &x);
            let level = 1e-13 * (scale * r * self.d as f64).max(1.0);
            let fmax = f.iter().map(|v| v.norm()).fold(0.0, f64::max);
            if f.iter().zip(&floor).all(|(v, n)| v.norm() <= level + n) {
                return Some((x, fmax / scale));
            }
            let mut step = solve_linear(jac.clone(), f)?;
            if step.iter().any(|s| !s.is_finite()) {
                return None;
            }
            if fmax > 1.0 {
                for s in step.iter_mut() {
                    *s /= fmax;
                }
            }
            let size = x.iter().map(|v| v.norm()).fold(1e-300, f64::max);
            let snorm = step.iter().map(|v| v.norm()).fold(0.0, f64::max);
            for j in 0..m {
                x[j] -= step[j];
            }
            if snorm <= 4.0 * f64::EPSILON * size {
                let (f, jac, scale) = self.residual(&x, r);
                let floor = noise(&jac, &x);
                let ok = f.iter().zip(&floor).all(|(v, n)| v.norm() <= 1e-7 + 64.0 * n);
                let fmax = f.iter().map(|v| v.norm()).fold(0.0, f64::max);
                return if ok { Some((x, fmax / scale)) } else { None };
            }
        }
        None
    }
}

/// Gaussian elimination with partial pivoting.
fn solve_linear(mut a: Vec<Vec<C64>>, mut b: Vec<C64>) -> Option<Vec<C64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].norm().partial_cmp(&a[j][col].norm()).unwrap())?;
        if a[piv][col].norm() == 0.0 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                let t = a[col][k];
                a[row][k] -= f * t;
            }
            let t = b[col];
            b[row] -= f * t;
        }
    }
    let mut x = vec![C64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in row + 1..n {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    Some(x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoldbergSolution {
    pub point: ParamPoint,
    pub r: f64,
    /// max_i |log φ(P(c_i)) − target_i| in potential units.
    pub residual: f64,
    /// Internal coordinates (c_1, …, c_{d−2}, a^d).
    pub coords: Vec<C64>,
}

fn setup(theta: &CriticalPortrait, d: usize) -> Result<Problem> {
    if !(2..=MAX_DEGREE).contains(&d) {
        return invalid(format!("degree must be in 2..={MAX_DEGREE}"));
    }
    let verdict = validate_portrait(theta, d);
    if !verdict.valid {
        return invalid("portrait fails validation");
    }
    let reps: Vec<Angle> = theta.sets.iter().map(|s| s[0]).collect();
    let first = &theta.sets[0];
    let all_equal = theta.sets.iter().all(|s| s.len() == first.len() && s.iter().all(|a| first.iter().any(|b| same(a, b))));
    let any_shared = (0..theta.sets.len())
        .any(|i| (i + 1..theta.sets.len()).any(|j| theta.sets[i].iter().any(|a| theta.sets[j].iter().any(|b| same(a, b)))));
    if any_shared && !all_equal {
        return invalid("partially coincident critical points are not supported");
    }
    Ok(Problem { d, unicritical: all_equal && d > 2, reps })
}

fn same(a: &Angle, b: &Angle) -> bool {
    match (a.as_frac(), b.as_frac()) {
        (Some(x), Some(y)) => x == y,
        _ => circle_dist(a.to_f64(), b.to_f64()) <= 1e-12,
    }
}

fn circle_dist(a: f64, b: f64) -> f64 {
    let t = (a - b) - (a - b).floor();
    t.min(1.0 - t)
}

/// Approximate solutions at potential r0 from φ(w) ≈ λ(w − δ).
fn seeds(problem: &Problem, r0: f64) -> Vec<Vec<C64>> {
    let d = problem.d;
    let df = d as f64;
    let lambda = df.powf(-1.0 / (df - 1.0));
    let w: Vec<C64> =
        problem.reps.iter().map(|a| C64::from_polar((df * r0).exp(), 2.0 * PI * a.mul(d as i128).to_f64()) / lambda).collect();
    if d == 2 || problem.unicritical {
        return vec![vec![w[0]]];
    }
    if d == 3 {
        // A − c/2 = W1, A − c³/6 − c/2 = W2
        let cube = (w[0] - w[1]) * 6.0;
        let base = cube.powf(1.0 / 3.0);
        return (0..3)
            .map(|k| {
                let c = base * C64::from_polar(1.0, 2.0 * PI * k as f64 / 3.0);
                vec![c, w[0] + c / 2.0]
            })
            .collect();
    }
    // best effort: random starts of the size of the critical points
    let mut rng = Rng::new(0x60_1d);
    let size = w[0].norm().powf(1.0 / (df - 1.0));
    (0..64)
        .map(|_| {
            let mut x: Vec<C64> = (0..d - 2).map(|_| C64::from_polar(size * rng.range(0.2, 2.0), 2.0 * PI * rng.uniform())).collect();
            x.push(w[0]);
            x
        })
        .collect()
}

/// Relative height above the critical level at which crashing rays are probed.
const CRASH_PROBE: f64 = 1e-6;

/// For each angle, the index of the critical point nearest to its ray at
/// potential r(1 + CRASH_PROBE), and that distance relative to the critical
/// point separation (or scale, for a single critical point).
pub fn crash_targets(poly: &Polynomial, crit: &[C64], angles: &[Angle], r: f64) -> Result<Vec<(usize, f64)>> {
    let mut sep = f64::INFINITY;
    for i in 0..crit.len() {
        for j in i + 1..crit.len() {
            sep = sep.min((crit[i] - crit[j]).norm());
        }
    }
    if !sep.is_finite() {
        sep = crit.iter().map(|c| c.norm()).fold(1.0, f64::max);
    }
    angles
        .iter()
        .map(|a| {
            let z = ray_point(poly, a, r * (1.0 + CRASH_PROBE))?;
            let (i, dist) = crit
                .iter()
                .enumerate()
                .map(|(i, c)| (i, (z - c).norm()))
                .min_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
                .expect("at least one critical point");
            Ok((i, dist / sep))
        })
        .collect()
}

/// Largest relative crash distance when every ray of Θ reaches its own
/// critical point, or None when some ray ends nearer another one.
fn portrait_fit(problem: &Problem, theta: &CriticalPortrait, x: &[C64], r: f64) -> Option<f64> {
    let p = problem.polynomial(x);
    let mut crit = vec![C64::new(0.0, 0.0)];
    crit.extend_from_slice(&x[..problem.d - 2]);
    let mut worst = 0.0f64;
    for (i, set) in theta.sets.iter().enumerate() {
        for (j, rel) in crash_targets(&p, &crit, set, r).ok()? {
            if j != i {
                return None;
            }
            worst = worst.max(rel);
        }
    }
    Some(worst)
}

/// Continues x from potential `from` to `to` with step subdivision.
fn continue_to(problem: &Problem, x: Vec<C64>, from: f64, to: f64) -> Result<(Vec<C64>, f64)> {
    let mut cur = from;
    let mut x = x;
    let mut residual = 0.0;
    let mut ratio = 1.0 - MAX_RATIO_STEP * 3.0 / problem.d as f64;
    if from == to {
        return problem.newton(x, to).ok_or_else(|| Error::ContinuationFailed(format!("Newton failed at r = {to}")));
    }
    let size = |v: &[C64]| v.iter().map(|z| z.norm()).fold(1e-3, f64::max);
    while cur != to {
        let next = if to < cur { (cur * ratio).max(to) } else { (cur / ratio).min(to) };
        match problem.newton(x.clone(), next) {
            Some((y, res)) if y.iter().zip(&x).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) <= 0.5 * size(&x) => {
                x = y;
                residual = res;
                cur = next;
                ratio = (ratio * ratio).max(1.0 - MAX_RATIO_STEP * 3.0 / problem.d as f64);
            }
            _ => {
                ratio = ratio.sqrt();
                if 1.0 - ratio < 1e-8 {
                    return Err(Error::ContinuationFailed(format!("stalled between r = {cur} and r = {next}; last point {:?}", x)));
                }
            }
        }
    }
    Ok((x, residual))
}

fn to_solution(problem: &Problem, x: Vec<C64>, r: f64, residual: f64) -> GoldbergSolution {
    let cs = problem.crit_params(&x);
    let a = principal_root(problem.a_power(&x), problem.d);
    let point = ParamPoint { d: problem.d, c: cs, a };
    let mut coords = problem.crit_params(&x);
    coords.push(problem.a_power(&x));
    GoldbergSolution { point, r, residual, coords }
}

/// Initial point at potential max(r, r0) carrying the portrait Θ.
fn start(problem: &Problem, theta: &CriticalPortrait, r: f64) -> Result<(Vec<C64>, f64)> {
    let r0 = r.max(SEED_POTENTIAL);
    let cands = seeds(problem, r0);
    if cands.len() == 1 {
        let x = cands.into_iter().next().unwrap();
        return problem
            .newton(x, r0)
            .map(|(x, _)| (x, r0))
            .ok_or_else(|| Error::ContinuationFailed(format!("seed Newton failed at r = {r0}")));
    }
    let mut found: Vec<Vec<C64>> = Vec::new();
    let mut best: Option<(f64, Vec<C64>)> = None;
    for s in cands {
        if let Some((x, _)) = problem.newton(s, r0) {
            if found.iter().any(|y| y.iter().zip(&x).all(|(a, b)| (a - b).norm() <= 1e-8 * (1.0 + a.norm()))) {
                continue;
            }
            if let Some(fit) = portrait_fit(problem, theta, &x, r0) {
                if best.as_ref().map_or(true, |b| fit < b.0) {
                    best = Some((fit, x.clone()));
                }
            }
            found.push(x);
        }
    }
    best.map(|(_, x)| (x, r0))
        .ok_or_else(|| Error::ContinuationFailed(format!("no seed at r = {r0} carries the portrait ({} candidates)", found.len())))
}

/// Φ(Θ, r): the parameter whose critical values sit at potential d·r with
/// Böttcher arguments 2π·dθ_i, with Θ's angles crashing into the marked
/// critical points.
pub fn goldberg_solve(theta: &CriticalPortrait, r: f64, d: usize, tol: f64) -> Result<GoldbergSolution> {
    if !(r > 0.0) || !(tol > 0.0) {
        return invalid("need r > 0 and tol > 0");
    }
    let problem = setup(theta, d)?;
    let (x, r0) = start(&problem, theta, r)?;
    let (x, residual) = continue_to(&problem, x, r0, r)?;
    if residual > tol {
        return Err(Error::NonConvergence(format!("residual {residual} above tolerance {tol}")));
    }
    Ok(to_solution(&problem, x, r, residual))
}

/// Critical Green values of a parameter, in marked order.
pub fn critical_green_values(p: &ParamPoint, tol: f64) -> Vec<f64> {
    let mp = p.polynomial();
    let ev = GreenEvaluator::new(&mp).expect("degree at least 2");
    let opts = GreenOptions { tol, max_iter: 1 << 16, certify: false };
    mp.critical_points().iter().map(|&c| ev.value(c, &opts).value).collect()
}

/// Number of final schedule points over which landing is judged.
pub const LANDING_TAIL: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct StretchResult {
    pub path: Vec<GoldbergSolution>,
    pub landed: bool,
    /// Sum of coordinate increments over the last LANDING_TAIL steps.
    pub tail: f64,
    pub landing: Option<ParamPoint>,
    /// Present when Θ is a Misiurewicz portrait and the ray landed.
    pub classification: Option<Classification>,
    pub message: Option<String>,
}

/// Follows Θ along a decreasing schedule of potentials.
pub fn stretch_ray(theta: &CriticalPortrait, d: usize, schedule: &[f64], tol: f64) -> Result<StretchResult> {
    if schedule.len() < 2 || schedule.windows(2).any(|w| !(w[1] < w[0])) || !(schedule[schedule.len() - 1] > 0.0) {
        return invalid("schedule must be positive and strictly decreasing");
    }
    if !(tol > 0.0) {
        return invalid("tol must be positive");
    }
    let problem = setup(theta, d)?;
    let (mut x, r0) = start(&problem, theta, schedule[0])?;
    let mut cur = r0;
    let mut path = Vec::with_capacity(schedule.len());
    let mut message = None;
    for &r in schedule {
        match continue_to(&problem, x.clone(), cur, r) {
            Ok((y, res)) => {
                x = y;
                cur = r;
                path.push(to_solution(&problem, x.clone(), r, res));
            }
            Err(e) => {
                message = Some(format!("{e}"));
                break;
            }
        }
    }
    let complete = path.len() == schedule.len();
    let tail = if path.len() > LANDING_TAIL {
        path[path.len() - LANDING_TAIL - 1..]
            .windows(2)
            .map(|w| w[0].coords.iter().zip(&w[1].coords).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
            .sum()
    } else {
        f64::INFINITY
    };
    let landed = complete && tail < tol;
    if complete && !landed {
        message = Some("not landed at this resolution".into());
    }
    let landing = if landed { path.last().map(|s| s.point.clone()) } else { None };
    let classification = match (&landing, misiurewicz_portrait(theta, d)) {
        (Some(p), Ok(true)) => Some(misiurewicz_classify(p, 1e-6, 200)),
        _ => None,
    };
    Ok(StretchResult { path, landed, tail, landing, classification, message })
}

/// Geometric schedule from r_hi down to r_lo with `per_decade` points per factor 10.
pub fn geometric_schedule(r_hi: f64, r_lo: f64, per_decade: usize) -> Vec<f64> {
    let steps = ((r_hi / r_lo).log10() * per_decade as f64).ceil().max(1.0) as usize;
    let q = (r_lo / r_hi).powf(1.0 / steps as f64);
    let mut s: Vec<f64> = (0..steps).map(|j| r_hi * q.powi(j as i32)).collect();
    s.push(r_lo);
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::misiurewicz::MisiurewiczKind;
    use crate::portrait::Cb0Sampler;
    use crate::unicritical::parameter_ray_point;

    fn portrait(sets: &[&[&str]]) -> CriticalPortrait {
        CriticalPortrait::parse(sets).unwrap()
    }

    #[test]
    fn quadratic_matches_parameter_rays() {
        // a² = 2c with c on the parameter ray of angle 2α at potential 2r
        for (alpha, r) in [("1/5", 0.3), ("3/7", 0.05), ("0", 1.0)] {
            let a = Angle::parse(alpha).unwrap();
            let th = CriticalPortrait::new(vec![vec![a, a.add(&Angle::exact(1, 2).unwrap())]]);
            let s = goldberg_solve(&th, r, 2, 1e-10).unwrap();
            let c = parameter_ray_point(2, a.mul(2).to_f64(), 2.0 * r).unwrap();
            assert!((s.point.a * s.point.a / 2.0 - c).norm() < 1e-9, "{alpha}");
        }
        let s = goldberg_solve(&portrait(&[&["0", "1/2"]]), 0.4, 2, 1e-10).unwrap();
        assert_eq!(s.point.a.im, 0.0);
        assert!(s.point.a.re > 0.0);
    }

    #[test]
    fn green_values_equal_r() {
        let mut sampler = Cb0Sampler::new(3, 17);
        let mut rng = Rng::new(5);
        for _ in 0..6 {
            let th = sampler.sample().unwrap();
            let r = rng.range(0.05, 1.0);
            let s = goldberg_solve(&th, r, 3, 1e-9).unwrap();
            for g in critical_green_values(&s.point, 1e-12) {
                assert!((g - r).abs() < 1e-7, "{g} vs {r}");
            }
            let mp = s.point.polynomial();
            let crit = mp.critical_points();
            for (i, set) in th.sets.iter().enumerate() {
                for (j, rel) in crash_targets(&mp, &crit, set, r).unwrap() {
                    assert!(j == i && rel < 0.5, "{j} {rel}");
                }
            }
        }
    }

    #[test]
    fn double_critical_point() {
        let th = portrait(&[&["0", "1/3", "2/3"], &["0", "1/3", "2/3"]]);
        let s = goldberg_solve(&th, 0.5, 3, 1e-10).unwrap();
        assert_eq!(s.point.c[0], C64::new(0.0, 0.0));
        let g = critical_green_values(&s.point, 1e-12);
        assert!((g[0] - 0.5).abs() < 1e-8);
    }

    #[test]
    fn quadratic_misiurewicz_landings() {
        let sched = geometric_schedule(1.0, 1e-7, 6);
        let s = stretch_ray(&portrait(&[&["1/12", "7/12"]]), 2, &sched, 1e-6).unwrap();
        assert!(s.landed, "{:?}", s.message);
        let c = s.landing.as_ref().unwrap().a.powi(2) / 2.0;
        assert!((c - C64::new(0.0, 1.0)).norm() < 1e-6, "{c}");
        assert_eq!(s.classification.unwrap().kind, MisiurewiczKind::Misiurewicz);
        let s = stretch_ray(&portrait(&[&["1/4", "3/4"]]), 2, &sched, 1e-6).unwrap();
        assert!(s.landed);
        let c = s.landing.as_ref().unwrap().a.powi(2) / 2.0;
        assert!((c + 2.0).norm() < 1e-6, "{c}");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(goldberg_solve(&portrait(&[&["0", "1/3"]]), 0.5, 2, 1e-9).is_err());
        assert!(stretch_ray(&portrait(&[&["0", "1/2"]]), 2, &[0.5, 0.6], 1e-9).is_err());
    }
}
