//! The varieties Per(n, k) = {c : f_c^n(0) = f_c^k(0)} of the unicritical
//! family f_c(z) = z^d + c: exact coefficients, factor structure and roots.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{invalid, Error, Result};
use crate::modp::{Field, PolyP, PRIMES};
use crate::rng::Rng;
use crate::unicritical::{difference_log_derivative, equipotential_points, orbit_jets, Jet};

type C64 = Complex64;

/// Largest degree accepted for exact integer coefficients by default.
pub const DEFAULT_MAX_EXACT_DEGREE: usize = 4096;
/// Largest degree for which modular factor structure is computed when k ≥ 1.
pub const MAX_MODULAR_DEGREE: usize = 1 << 14;
/// Largest degree handed to the root finder.
pub const MAX_SOLVE_DEGREE: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq)]
pub struct PerPolynomial {
    pub d: usize,
    pub n: usize,
    pub k: usize,
    /// Ascending integer coefficients of p_n − p_k, when built exactly.
    pub coeffs: Option<Vec<BigInt>>,
}

fn check_dnk(d: usize, n: usize, k: usize) -> Result<usize> {
    if d < 2 {
        return invalid("degree must be at least 2");
    }
    if n <= k {
        return invalid("need n > k ≥ 0");
    }
    (d as u64)
        .checked_pow((n - 1) as u32)
        .filter(|&v| v <= usize::MAX as u64 / 2)
        .map(|v| v as usize)
        .ok_or_else(|| Error::ResourceLimit(format!("d^(n-1) overflows for d={d}, n={n}")))
}

impl PerPolynomial {
    /// Described by the recursion only, without expanding coefficients.
    pub fn implicit(d: usize, n: usize, k: usize) -> Result<Self> {
        check_dnk(d, n, k)?;
        Ok(PerPolynomial { d, n, k, coeffs: None })
    }

    pub fn degree(&self) -> usize {
        self.d.pow((self.n - 1) as u32)
    }

    /// f_c^n(0) − f_c^k(0) by the recursion.
    pub fn eval(&self, c: C64) -> C64 {
        let mut z = C64::zero();
        let mut zk = C64::zero();
        for j in 1..=self.n {
            z = z.powu(self.d as u32) + c;
            if j == self.k {
                zk = z;
            }
        }
        z - zk
    }
}

fn big_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn big_pow(a: &[BigInt], e: usize) -> Vec<BigInt> {
    let mut r = vec![BigInt::one()];
    let mut b = a.to_vec();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            r = big_mul(&r, &b);
        }
        e >>= 1;
        if e > 0 {
            b = big_mul(&b, &b);
        }
    }
    r
}

/// Exact integer coefficients of p_j(c) = f_c^j(0) for j = 0..=n.
pub fn orbit_polys_exact(d: usize, n: usize) -> Vec<Vec<BigInt>> {
    let mut v: Vec<Vec<BigInt>> = vec![vec![BigInt::zero()]];
    for j in 0..n {
        let mut next = if v[j].iter().all(|x| x.is_zero()) { vec![BigInt::zero()] } else { big_pow(&v[j], d) };
        if next.len() < 2 {
            next.resize(2, BigInt::zero());
        }
        next[1] += 1;
        v.push(next);
    }
    v
}

/// Exact p_n − p_k, refusing degrees above `max_degree`.
pub fn per_poly_with_budget(d: usize, n: usize, k: usize, max_degree: usize) -> Result<PerPolynomial> {
    let deg = check_dnk(d, n, k)?;
    if deg > max_degree {
        return Err(Error::ResourceLimit(format!("degree {deg} exceeds coefficient budget {max_degree}")));
    }
    let polys = orbit_polys_exact(d, n);
    let mut c = polys[n].clone();
    for (i, x) in polys[k].iter().enumerate() {
        c[i] -= x;
    }
    while c.len() > 1 && c.last().map_or(false, |x| x.is_zero()) {
        c.pop();
    }
    Ok(PerPolynomial { d, n, k, coeffs: Some(c) })
}

pub fn per_poly(d: usize, n: usize, k: usize) -> Result<PerPolynomial> {
    per_poly_with_budget(d, n, k, DEFAULT_MAX_EXACT_DEGREE)
}

fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|m| n % m == 0).collect()
}

fn mobius(mut n: usize) -> i64 {
    let mut r = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            r = -r;
        }
        p += 1;
    }
    if n > 1 {
        r = -r;
    }
    r
}

/// Number of parameters at which the critical point has exact period m.
pub fn gleason_degree(d: usize, m: usize) -> usize {
    let s: i64 = divisors(m).into_iter().map(|q| mobius(m / q) * (d as i64).pow((q - 1) as u32)).sum();
    s as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorKind {
    /// All of p_n (k = 0): the critical point is periodic with period dividing n.
    Periodic,
    /// Critical point of exact period m.
    ExactPeriod(usize),
    /// Critical point strictly preperiodic.
    StrictPreperiodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PerFactor {
    pub kind: FactorKind,
    pub multiplicity: usize,
    pub degree: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub d: usize,
    pub n: usize,
    pub k: usize,
    pub factors: Vec<PerFactor>,
    /// Every factor is squarefree and the factors are pairwise coprime.
    pub squarefree_certified: bool,
}

fn smallest_prime_factor(d: usize) -> usize {
    (2..=d).find(|p| d % p == 0).unwrap()
}

fn frobenius(a: &PolyP, p: usize) -> PolyP {
    if a.is_zero() {
        return a.clone();
    }
    let mut c = vec![0u64; (a.c.len() - 1) * p + 1];
    for (i, &x) in a.c.iter().enumerate() {
        c[i * p] = x;
    }
    PolyP::new(a.f, c)
}

/// Checks p_n' ≡ 1 mod a prime dividing d, which forces p_n to be squarefree.
pub fn certify_periodic_squarefree(d: usize, n: usize) -> bool {
    let p = smallest_prime_factor(d);
    let f = Field::new(p as u64);
    let x = PolyP::x(f);
    let mut cur = PolyP::zero(f);
    for _ in 0..n {
        cur = frobenius(&cur.pow(d / p), p).add(&x);
    }
    let deg_ok = cur.degree() == (d as isize).pow((n - 1) as u32);
    deg_ok && cur.derivative() == PolyP::one(f)
}

fn modular_structure(f: Field, d: usize, n: usize, k: usize) -> (Vec<(usize, usize)>, bool, usize) {
    let p = crate::modp::unicritical_orbit_polys(f, d, n);
    let mut rest = p[n].sub(&p[k]);
    let mut gleason: Vec<(usize, PolyP)> = Vec::new();
    let mut out = Vec::new();
    for m in divisors(n - k) {
        let mut phi = p[m].clone();
        for (q, g) in &gleason {
            if m % q == 0 {
                phi = phi.div_exact(g).expect("Gleason factor divides");
            }
        }
        let (r, e) = rest.strip(&phi);
        rest = r;
        out.push((m, e));
        gleason.push((m, phi));
    }
    let sf = rest.degree() < 1 || rest.is_squarefree();
    (out, sf, rest.degree().max(0) as usize)
}

/// Splits p_n − p_k into periodic Gleason factors with multiplicities and
/// the strictly preperiodic remainder.
pub fn factor_structure(d: usize, n: usize, k: usize) -> Result<Factorization> {
    let deg = check_dnk(d, n, k)?;
    if k == 0 {
        let cert = deg <= MAX_SOLVE_DEGREE && certify_periodic_squarefree(d, n);
        return Ok(Factorization {
            d,
            n,
            k,
            factors: vec![PerFactor { kind: FactorKind::Periodic, multiplicity: 1, degree: deg }],
            squarefree_certified: cert,
        });
    }
    if deg > MAX_MODULAR_DEGREE {
        return Err(Error::ResourceLimit(format!("degree {deg} too large for modular factoring")));
    }
    let (a, sf_a, ra) = modular_structure(Field::new(PRIMES[0]), d, n, k);
    let (b, sf_b, rb) = modular_structure(Field::new(PRIMES[1]), d, n, k);
    if a != b || ra != rb {
        return Err(Error::Undecided("modular factor structure disagrees between primes".into()));
    }
    let mut factors: Vec<PerFactor> = a
        .iter()
        .filter(|(_, e)| *e > 0)
        .map(|&(m, e)| PerFactor { kind: FactorKind::ExactPeriod(m), multiplicity: e, degree: gleason_degree(d, m) })
        .collect();
    if ra > 0 {
        factors.push(PerFactor { kind: FactorKind::StrictPreperiodic, multiplicity: 1, degree: ra });
    }
    let total: usize = factors.iter().map(|f| f.multiplicity * f.degree).sum();
    if total != deg {
        return Err(Error::Undecided(format!("factor degrees sum to {total}, expected {deg}")));
    }
    Ok(Factorization { d, n, k, factors, squarefree_certified: sf_a || sf_b })
}

fn factor_log_derivative(fac: &Factorization, kind: FactorKind, jets: &[Jet]) -> C64 {
    let periodic = |m: usize| -> C64 {
        divisors(m).into_iter().map(|q| jets[q].log_derivative() * mobius(m / q) as f64).fold(C64::zero(), |a, b| a + b)
    };
    match kind {
        FactorKind::Periodic => jets[fac.n].log_derivative(),
        FactorKind::ExactPeriod(m) => periodic(m),
        FactorKind::StrictPreperiodic => {
            let mut v = difference_log_derivative(&jets[fac.n], &jets[fac.k]);
            for f in &fac.factors {
                if let FactorKind::ExactPeriod(m) = f.kind {
                    v -= periodic(m) * f.multiplicity as f64;
                }
            }
            v
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub z: C64,
    pub multiplicity: usize,
    /// Newton step |F/F'| for the factor F containing the root.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Root>,
    pub residual_bound: f64,
    pub degree: usize,
    pub converged: bool,
    pub squarefree_certified: bool,
}

impl RootSet {
    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    pub fn points(&self) -> Vec<C64> {
        self.roots.iter().map(|r| r.z).collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.roots.iter().map(|r| r.residual).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_sweeps: usize,
    pub seed: u64,
    /// Potential of the equipotential carrying the initial guesses;
    /// defaults to min(0.05, 4/degree).
    pub seed_potential: Option<f64>,
}

impl SolveOptions {
    pub fn new(tol: f64) -> Self {
        SolveOptions { tol, max_sweeps: 400, seed: 0x5eed, seed_potential: None }
    }
}

/// Simultaneous Aberth–Ehrlich iteration for the zeros of F given its
/// logarithmic derivative. Updates are Jacobi-style (all corrections from the
/// previous positions), so the sweep is deterministic.
pub fn aberth<F: Fn(C64) -> C64>(ld: F, mut z: Vec<C64>, max_sweeps: usize) -> (Vec<C64>, bool) {
    let n = z.len();
    let mut active: Vec<usize> = (0..n).collect();
    let mut step = vec![C64::zero(); n];
    for _ in 0..max_sweeps {
        if active.is_empty() {
            break;
        }
        for &i in &active {
            let zi = z[i];
            let g = ld(zi);
            if !g.is_finite() {
                step[i] = C64::zero();
                continue;
            }
            let mut s = C64::zero();
            for zj in &z[..i] {
                s += (zi - zj).inv();
            }
            for zj in &z[i + 1..] {
                s += (zi - zj).inv();
            }
            let w = (g - s).inv();
            step[i] = if w.is_finite() { w } else { C64::zero() };
        }
        let mut still = Vec::with_capacity(active.len());
        for &i in &active {
            z[i] -= step[i];
            if step[i].norm() > 1e-14 * z[i].norm().max(1.0) {
                still.push(i);
            }
        }
        active = still;
    }
    (z, active.is_empty())
}

fn newton_polish<F: Fn(C64) -> C64>(ld: &F, mut z: C64) -> (C64, f64) {
    let mut res = f64::INFINITY;
    for _ in 0..4 {
        let g = ld(z);
        if !g.is_finite() {
            return (z, 0.0);
        }
        let w = g.inv();
        if w.norm() >= res {
            break;
        }
        res = w.norm();
        z -= w;
    }
    let g = ld(z);
    let r = if g.is_finite() { g.inv().norm() } else { 0.0 };
    (z, r.min(res))
}

fn solve_factor(fac: &Factorization, f: &PerFactor, opts: &SolveOptions, rng: &mut Rng) -> Result<(Vec<Root>, bool)> {
    let (d, n) = (fac.d, fac.n);
    let ld = |c: C64| factor_log_derivative(fac, f.kind, &orbit_jets(d, c, n));
    if f.degree == 0 {
        return Ok((Vec::new(), true));
    }
    let phase = rng.uniform();
    let rho = opts.seed_potential.unwrap_or((4.0 / f.degree as f64).min(0.05));
    let seeds = equipotential_points(d, f.degree, rho, phase)?;
    let (z, ok) = aberth(&ld, seeds, opts.max_sweeps);
    let mut roots = Vec::with_capacity(z.len());
    let mut all = ok;
    for zi in z {
        let (zp, res) = newton_polish(&ld, zi);
        if !(res <= opts.tol) {
            all = false;
        }
        roots.push(Root { z: zp, multiplicity: f.multiplicity, residual: res });
    }
    Ok((roots, all))
}

/// Minimum distance between distinct entries, via a sort on the real part.
fn min_separation(points: &[C64]) -> f64 {
    let mut v: Vec<C64> = points.to_vec();
    v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap_or(core::cmp::Ordering::Equal));
    let mut best = f64::INFINITY;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[j].re - v[i].re >= best {
                break;
            }
            best = best.min((v[j] - v[i]).norm());
        }
    }
    best
}

/// All roots of p_n − p_k with multiplicities.
pub fn solve_per(d: usize, n: usize, k: usize, opts: &SolveOptions) -> Result<RootSet> {
    let deg = check_dnk(d, n, k)?;
    if deg > MAX_SOLVE_DEGREE {
        return Err(Error::ResourceLimit(format!("degree {deg} above solver limit")));
    }
    let fac = factor_structure(d, n, k)?;
    solve_factored(&fac, opts, |_| true)
}

fn solve_factored(fac: &Factorization, opts: &SolveOptions, keep: impl Fn(FactorKind) -> bool) -> Result<RootSet> {
    let mut rng = Rng::new(opts.seed);
    let mut roots = Vec::new();
    let mut converged = fac.squarefree_certified;
    let mut degree = 0;
    for f in &fac.factors {
        if !keep(f.kind) {
            continue;
        }
        let (r, ok) = solve_factor(fac, f, opts, &mut rng)?;
        converged &= ok;
        degree += f.degree * f.multiplicity;
        roots.extend(r);
    }
    let pts: Vec<C64> = roots.iter().map(|r| r.z).collect();
    let max_res = roots.iter().map(|r| r.residual).fold(0.0, f64::max);
    if pts.len() > 1 && min_separation(&pts) <= 10.0 * max_res.max(1e-15) {
        converged = false;
    }
    Ok(RootSet { roots, residual_bound: opts.tol, degree, converged, squarefree_certified: fac.squarefree_certified })
}

pub fn solve_roots(p: &PerPolynomial, tol: f64) -> Result<RootSet> {
    solve_per(p.d, p.n, p.k, &SolveOptions::new(tol))
}

/// Roots of p_n − p_k at which the critical point is strictly preperiodic.
///
/// Parameters where the critical point is periodic (of any period dividing
/// n − k) are removed with their full multiplicity.
pub fn strict_preper_roots(d: usize, n: usize, k: usize, tol: f64) -> Result<RootSet> {
    if k == 0 {
        return invalid("need k ≥ 1");
    }
    check_dnk(d, n, k)?;
    let fac = factor_structure(d, n, k)?;
    solve_factored(&fac, &SolveOptions::new(tol), |kind| kind == FactorKind::StrictPreperiodic)
}

/// Exact coefficient vector as floats (for small degrees).
pub fn coeffs_f64(p: &PerPolynomial) -> Option<Vec<C64>> {
    p.coeffs.as_ref().map(|c| c.iter().map(|x| C64::new(x.to_f64().unwrap_or(f64::NAN), 0.0)).collect())
}
