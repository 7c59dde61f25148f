//! Empirical measures, grid potentials and their discrete Laplacians.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{invalid, Result};
use crate::per::RootSet;
use crate::unicritical::{green_locus, orbit_jets, Jet};

type C64 = Complex64;

/// Pairwise summation, so results do not depend on how work is split.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 16 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    pub atoms: Vec<(C64, f64)>,
    pub total_mass: f64,
}

impl EmpiricalMeasure {
    pub fn new(atoms: Vec<(C64, f64)>) -> Result<Self> {
        if atoms.iter().any(|(_, w)| !(*w > 0.0) || !w.is_finite()) {
            return invalid("weights must be positive and finite");
        }
        let w: Vec<f64> = atoms.iter().map(|a| a.1).collect();
        Ok(EmpiricalMeasure { total_mass: pairwise_sum(&w), atoms })
    }

    pub fn zero() -> Self {
        EmpiricalMeasure { atoms: Vec::new(), total_mass: 0.0 }
    }

    pub fn integrate<F: Fn(C64) -> f64>(&self, f: F) -> f64 {
        let v: Vec<f64> = self.atoms.iter().map(|(z, w)| w * f(*z)).collect();
        pairwise_sum(&v)
    }

    /// Logarithmic potential Σ w log|z − atom|, or None at an atom.
    pub fn potential(&self, z: C64) -> Option<f64> {
        let mut v = Vec::with_capacity(self.atoms.len());
        for (a, w) in &self.atoms {
            let r = (z - a).norm();
            if r <= 1e-12 {
                return None;
            }
            v.push(w * r.ln());
        }
        Some(pairwise_sum(&v))
    }

    pub fn scaled(&self, s: f64) -> Result<EmpiricalMeasure> {
        EmpiricalMeasure::new(self.atoms.iter().map(|(z, w)| (*z, w * s)).collect())
    }

    /// Image under `f`, splitting each atom evenly over the returned points.
    pub fn push_split<F: Fn(C64) -> Vec<C64>>(&self, f: F) -> Result<EmpiricalMeasure> {
        let mut out = Vec::new();
        for (z, w) in &self.atoms {
            let pts = f(*z);
            let share = w / pts.len() as f64;
            out.extend(pts.into_iter().map(|p| (p, share)));
        }
        EmpiricalMeasure::new(out)
    }
}

/// One atom per root, weighted multiplicity / normalization.
pub fn empirical_from_roots(roots: &RootSet, normalization: f64) -> Result<EmpiricalMeasure> {
    if !(normalization > 0.0) {
        return invalid("normalization must be positive");
    }
    EmpiricalMeasure::new(roots.roots.iter().map(|r| (r.z, r.multiplicity as f64 / normalization)).collect())
}

/// d^n + d^{(1−e)k}, total weight for normalizing the roots of p_n − p_k.
pub fn theorem_normalization(d: usize, n: usize, k: usize, e: usize) -> f64 {
    let df = d as f64;
    df.powi(n as i32) + df.powi(((1 - e.min(1)) * k) as i32)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        if !(re_min < re_max && im_min < im_max) {
            return invalid("empty rectangle");
        }
        Ok(Rect { re_min, re_max, im_min, im_max })
    }

    pub fn centered(center: C64, half: f64) -> Result<Self> {
        Rect::new(center.re - half, center.re + half, center.im - half, center.im + half)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub bounds: Rect,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(bounds: Rect, nx: usize, ny: usize) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return invalid("need at least 2 nodes per axis");
        }
        Ok(GridSpec { bounds, nx, ny })
    }

    pub fn hx(&self) -> f64 {
        (self.bounds.re_max - self.bounds.re_min) / (self.nx - 1) as f64
    }

    pub fn hy(&self) -> f64 {
        (self.bounds.im_max - self.bounds.im_min) / (self.ny - 1) as f64
    }

    /// Node (i, j): column i along the real axis, row j along the imaginary axis.
    pub fn point(&self, i: usize, j: usize) -> C64 {
        C64::new(self.bounds.re_min + i as f64 * self.hx(), self.bounds.im_min + j as f64 * self.hy())
    }
}

/// Node samples, row-major with rows along the real axis.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub spec: GridSpec,
    pub values: Vec<f64>,
}

impl GridField {
    pub fn sample<F: Fn(C64) -> f64>(spec: GridSpec, f: F) -> GridField {
        let mut values = Vec::with_capacity(spec.nx * spec.ny);
        for j in 0..spec.ny {
            for i in 0..spec.nx {
                values.push(f(spec.point(i, j)));
            }
        }
        GridField { spec, values }
    }

    pub fn from_values(spec: GridSpec, values: Vec<f64>) -> Result<GridField> {
        if values.len() != spec.nx * spec.ny {
            return invalid("value count does not match resolution");
        }
        Ok(GridField { spec, values })
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.spec.nx + i]
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> GridField {
        GridField { spec: self.spec, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Largest |value| over finite entries, and the number of non-finite entries.
    pub fn sup_abs(&self) -> (f64, usize) {
        let mut sup = 0.0f64;
        let mut flagged = 0;
        for &v in &self.values {
            if v.is_finite() {
                sup = sup.max(v.abs());
            } else {
                flagged += 1;
            }
        }
        (sup, flagged)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().filter(|v| v.is_finite()).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().filter(|v| v.is_finite()).fold(f64::INFINITY, f64::min)
    }
}

/// Iteration budget used for G on grids.
pub const GREEN_GRID_ITER: usize = 2000;

/// G(c) = g_c(c) of the unicritical family sampled on a grid.
pub fn green_grid(d: usize, spec: GridSpec) -> GridField {
    GridField::sample(spec, |c| green_locus(d, c, GREEN_GRID_ITER))
}

/// h_n(c) = d^{−n} (log|p_n − p_k| − log⁺|p_n|) in logarithmic form;
/// −∞ marks parameters where p_n = p_k exactly.
pub fn h_value(d: usize, n: usize, k: usize, c: C64) -> f64 {
    let jets = orbit_jets(d, c, n);
    let (jn, jk) = (jets[n], jets[k]);
    let log_diff = match (jn, jk) {
        (Jet::Direct { v: a, .. }, Jet::Direct { v: b, .. }) => (a - b).norm().ln(),
        (Jet::Log { l, .. }, other) => {
            let ratio = match other {
                Jet::Direct { v, .. } => v * (-l).exp(),
                Jet::Log { l: lk, .. } => (lk - l).exp(),
            };
            l.re + (C64::new(1.0, 0.0) - ratio).norm().ln()
        }
        (Jet::Direct { .. }, Jet::Log { .. }) => f64::NAN,
    };
    let log_n = jn.log().re;
    (log_diff - log_n.max(0.0)) / (d as f64).powi(n as i32)
}

/// h_n on a grid (unicritical family).
pub fn convergence_gap(d: usize, n: usize, k: usize, spec: GridSpec) -> Result<GridField> {
    if n <= k {
        return invalid("need n > k");
    }
    Ok(GridField::sample(spec, |c| h_value(d, n, k, c)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialGap {
    pub sup: f64,
    pub excluded: usize,
}

/// sup over the grid of |u_μ − G|, u_μ the logarithmic potential of μ.
pub fn potential_compare(measure: &EmpiricalMeasure, reference: &GridField) -> PotentialGap {
    let mut sup = 0.0f64;
    let mut excluded = 0;
    let spec = reference.spec;
    for j in 0..spec.ny {
        for i in 0..spec.nx {
            match measure.potential(spec.point(i, j)) {
                Some(u) => sup = sup.max((u - reference.get(i, j)).abs()),
                None => excluded += 1,
            }
        }
    }
    PotentialGap { sup, excluded }
}

/// φ(z) = (1 − |z − z₀|²/ρ²)² on |z − z₀| < ρ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub center: C64,
    pub radius: f64,
}

impl Bump {
    pub fn new(center: C64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return invalid("bump radius must be positive");
        }
        Ok(Bump { center, radius })
    }

    fn s(&self, z: C64) -> f64 {
        (z - self.center).norm_sqr() / (self.radius * self.radius)
    }

    pub fn value(&self, z: C64) -> f64 {
        let s = self.s(z);
        if s >= 1.0 {
            0.0
        } else {
            (1.0 - s) * (1.0 - s)
        }
    }

    /// Δφ = (16 s − 8)/ρ² inside the disk.
    pub fn laplacian(&self, z: C64) -> f64 {
        let s = self.s(z);
        if s >= 1.0 {
            0.0
        } else {
            (16.0 * s - 8.0) / (self.radius * self.radius)
        }
    }

    pub fn sup(&self) -> f64 {
        1.0
    }

    /// sup |∇φ| = 8 / (3√3 ρ), attained at s = 1/3.
    pub fn sup_gradient(&self) -> f64 {
        8.0 / (3.0 * 3f64.sqrt() * self.radius)
    }
}

/// |μ(φ) − ref(φ)| for each bump.
pub fn test_function_discrepancy(measure: &EmpiricalMeasure, reference: &EmpiricalMeasure, phis: &[Bump]) -> Vec<f64> {
    phis.iter().map(|b| (measure.integrate(|z| b.value(z)) - reference.integrate(|z| b.value(z))).abs()).collect()
}

/// (1/2π) ∫ u Δφ dA by a midpoint rule in polar coordinates around the bump.
pub fn weak_laplacian_pairing<F: Fn(C64) -> f64>(u: F, bump: &Bump, nr: usize, ntheta: usize) -> f64 {
    let dr = bump.radius / nr as f64;
    let dt = 2.0 * PI / ntheta as f64;
    let mut rows = Vec::with_capacity(nr);
    for i in 0..nr {
        let r = (i as f64 + 0.5) * dr;
        let mut ring = Vec::with_capacity(ntheta);
        for j in 0..ntheta {
            let z = bump.center + C64::from_polar(r, (j as f64 + 0.5) * dt);
            ring.push(u(z));
        }
        let lap = bump.laplacian(bump.center + C64::new(r, 0.0));
        rows.push(pairwise_sum(&ring) * lap * r * dr * dt);
    }
    pairwise_sum(&rows) / (2.0 * PI)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianMeasure {
    pub measure: EmpiricalMeasure,
    /// Total of the clipped negative cell masses (as a positive number).
    pub negative_mass: f64,
    pub negative_cells: usize,
    /// Negative cells below −tolerance.
    pub significant_negative_cells: usize,
    /// Σ |cell mass| before clipping.
    pub absolute_mass: f64,
}

impl LaplacianMeasure {
    /// Total of the unclipped cell masses (equals the boundary flux / 2π).
    pub fn signed_mass(&self) -> f64 {
        self.measure.total_mass - self.negative_mass
    }
}

/// Cell masses (Δ_h u) h²/2π from the 5-point stencil at interior nodes,
/// negative masses clipped and reported.
pub fn laplacian_measure(field: &GridField) -> Result<LaplacianMeasure> {
    laplacian_measure_tol(field, 1e-12)
}

pub fn laplacian_measure_tol(field: &GridField, tolerance: f64) -> Result<LaplacianMeasure> {
    let spec = field.spec;
    let (hx, hy) = (spec.hx(), spec.hy());
    if (hx - hy).abs() > 1e-9 * hx.max(hy) {
        return invalid("grid cells must be square");
    }
    let mut atoms = Vec::new();
    let mut neg = Vec::new();
    let mut abs = Vec::new();
    let mut significant = 0;
    for j in 1..spec.ny - 1 {
        for i in 1..spec.nx - 1 {
            let u = field.get(i, j);
            let s = field.get(i + 1, j) + field.get(i - 1, j) + field.get(i, j + 1) + field.get(i, j - 1);
            let m = (s - 4.0 * u) / (2.0 * PI);
            if !m.is_finite() {
                continue;
            }
            abs.push(m.abs());
            if m > 0.0 {
                atoms.push((spec.point(i, j), m));
            } else if m < 0.0 {
                neg.push(-m);
                if m < -tolerance {
                    significant += 1;
                }
            }
        }
    }
    Ok(LaplacianMeasure {
        measure: EmpiricalMeasure::new(atoms)?,
        negative_mass: pairwise_sum(&neg),
        negative_cells: neg.len(),
        significant_negative_cells: significant,
        absolute_mass: pairwise_sum(&abs),
    })
}

/// Signed density (Δ_h u)/2π at interior nodes; 0 on the boundary and at
/// non-finite stencils.
pub fn laplacian_density(field: &GridField) -> Result<GridField> {
    let spec = field.spec;
    let (hx, hy) = (spec.hx(), spec.hy());
    if (hx - hy).abs() > 1e-9 * hx.max(hy) {
        return invalid("grid cells must be square");
    }
    let h2 = hx * hy;
    let mut values = vec![0.0; spec.nx * spec.ny];
    for j in 1..spec.ny.saturating_sub(1) {
        for i in 1..spec.nx - 1 {
            let s = field.get(i + 1, j) + field.get(i - 1, j) + field.get(i, j + 1) + field.get(i, j - 1);
            let m = (s - 4.0 * field.get(i, j)) / (2.0 * PI * h2);
            if m.is_finite() {
                values[j * spec.nx + i] = m;
            }
        }
    }
    GridField::from_values(spec, values)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularizedMeasure {
    pub laplacian: LaplacianMeasure,
    pub r: f64,
    /// r is below twice the grid spacing, so {G = r} is not resolved.
    pub resolution_warning: bool,
    /// r exceeds G on the whole grid; any mass is a boundary effect.
    pub above_field: bool,
}

/// Discrete Laplacian of max{G, r}.
pub fn monge_ampere_regularized(g: &GridField, r: f64) -> Result<RegularizedMeasure> {
    if !(r > 0.0) {
        return invalid("r must be positive");
    }
    let field = g.map(|v| v.max(r));
    let laplacian = laplacian_measure(&field)?;
    let h = g.spec.hx();
    Ok(RegularizedMeasure { laplacian, r, resolution_warning: r < 2.0 * h, above_field: r >= g.max() })
}
