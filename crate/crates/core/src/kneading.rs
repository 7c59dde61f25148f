//! Kneading sequences of portrait pairs and exact cylinder arcs.
//!
//! The moving partition d^j α ∈ (α, α + k/d) is equivalent to the fixed
//! condition (d^j − 1) α mod 1 ∈ (0, k/d), so the set of α with a given
//! itinerary prefix is a finite union of open arcs with rational endpoints.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;
use num_traits::{ToPrimitive, Zero};

use crate::angle::{Angle, Frac};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KneadingResult {
    pub digits: Vec<u8>,
    /// Step j ≥ 1 at which d^j α hit α or α + k/d.
    pub boundary_hit_at: Option<usize>,
}

impl KneadingResult {
    pub fn word(&self) -> String {
        self.digits.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect()
    }
}

fn check_dk(d: usize, k: usize) -> Result<()> {
    if d < 2 || k < 1 || 2 * k > d {
        return invalid("need d ≥ 2 and 1 ≤ k ≤ d/2");
    }
    Ok(())
}

/// Digits j = 1..=n of the itinerary of α relative to the pair {α, α + k/d}.
pub fn kneading(alpha: &Angle, d: usize, k: usize, n: usize) -> Result<KneadingResult> {
    check_dk(d, k)?;
    let a = match alpha {
        Angle::Exact(f) => *f,
        Angle::Float(_) => return invalid("exact angle required"),
    };
    let lo = a;
    let hi = a + Frac::new(k as i128, d as i128);
    let one = Frac::from_integer(1);
    let mut x = *alpha;
    let mut digits = Vec::with_capacity(n);
    for j in 1..=n {
        x = x.mul(d as i128);
        let mut t = x.as_frac().unwrap();
        if t < lo {
            t += one;
        }
        if t == lo || t == hi {
            return Ok(KneadingResult { digits, boundary_hit_at: Some(j) });
        }
        digits.push(if t < hi { 0 } else { 1 });
    }
    Ok(KneadingResult { digits, boundary_hit_at: None })
}

/// Open arc (start, end) with 0 ≤ start < end ≤ 1.
pub type Arc = (Frac, Frac);

#[derive(Debug, Clone, PartialEq)]
pub struct CylinderCover {
    pub word: String,
    pub intervals: Vec<Arc>,
    pub count: usize,
}

impl CylinderCover {
    pub fn full() -> Self {
        CylinderCover { word: String::new(), intervals: vec![(Frac::zero(), Frac::from_integer(1))], count: 1 }
    }

    pub fn total_length(&self) -> Frac {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    pub fn max_length(&self) -> Frac {
        self.intervals.iter().map(|(a, b)| b - a).max().unwrap_or_else(Frac::zero)
    }

    pub fn contains(&self, x: Frac) -> bool {
        self.intervals.iter().any(|(a, b)| *a < x && x < *b)
    }

    /// Refines by the condition on digit j = len(word) + 1.
    pub fn refine(&self, digit: u8, d: usize, k: usize) -> Result<CylinderCover> {
        let j = self.word.len() as u32 + 1;
        let m = match (d as i128).checked_pow(j + 1) {
            Some(p) if p <= EXACT_LIMIT => p / d as i128 - 1,
            _ => return Err(Error::ResourceLimit(format!("word length {j} exceeds exact arithmetic range"))),
        };
        let kd = Frac::new(k as i128, d as i128);
        let (lo, hi) = if digit == 0 { (Frac::zero(), kd) } else { (kd, Frac::from_integer(1)) };
        let mf = Frac::from_integer(m);
        let mut out = Vec::new();
        for (a, b) in &self.intervals {
            // Pieces ((r + lo)/m, (r + hi)/m) meeting (a, b).
            let r0 = (a * mf - hi).floor().to_integer().max(0);
            let r1 = (b * mf - lo).ceil().to_integer().min(m - 1);
            for r in r0..=r1 {
                let rf = Frac::from_integer(r);
                let s = ((rf + lo) / mf).max(*a);
                let e = ((rf + hi) / mf).min(*b);
                if s < e {
                    out.push((s, e));
                }
            }
        }
        let mut word = self.word.clone();
        word.push(if digit == 0 { '0' } else { '1' });
        let count = out.len();
        Ok(CylinderCover { word, intervals: out, count })
    }
}

/// Bound on d^(n+1) keeping endpoint products inside i128.
const EXACT_LIMIT: i128 = 1 << 56;

/// Longest word accepted by `cylinder_cover` before reporting a resource limit.
pub const MAX_WORD_LEN: usize = 24;

/// Exact arcs of angles whose kneading digits begin with `word`.
pub fn cylinder_cover(word: &str, d: usize, k: usize) -> Result<CylinderCover> {
    check_dk(d, k)?;
    if 2 * k == d {
        return invalid("the case k = d/2 is not supported");
    }
    if word.len() > MAX_WORD_LEN {
        return Err(Error::ResourceLimit(format!("word longer than {MAX_WORD_LEN}")));
    }
    let mut c = CylinderCover::full();
    for ch in word.chars() {
        let digit = match ch {
            '0' => 0,
            '1' => 1,
            _ => return invalid("word must be binary"),
        };
        c = c.refine(digit, d, k)?;
    }
    Ok(c)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelStats {
    pub n: usize,
    pub max_count: usize,
    pub max_count_word: String,
    pub max_length: f64,
    pub total_length: f64,
    /// C·n·(d−k)^n with the frozen constant.
    pub count_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountingReport {
    pub d: usize,
    pub k: usize,
    pub n_max: usize,
    pub constant: f64,
    pub levels: Vec<LevelStats>,
    /// Least-squares slope of ln(max count / n) against n ln d.
    pub dimension_estimate: f64,
    /// Same fit without removing the linear factor n.
    pub raw_dimension_estimate: f64,
    pub dimension_bound: f64,
    /// Whether N(n+1) ≤ (d−k)N(n) + 1 held for the max counts (reported only).
    pub max_recursion_holds: bool,
    pub violations: Vec<String>,
    pub passed: bool,
}

/// Enumerates every word up to length `n_max` and checks the counting bound.
pub fn verify_counting_bound(d: usize, k: usize, n_max: usize) -> Result<CountingReport> {
    check_dk(d, k)?;
    if 2 * k == d {
        return invalid("the case k = d/2 is not supported");
    }
    if n_max == 0 || n_max > MAX_WORD_LEN {
        return invalid("n_max out of range");
    }
    let growth = (d - k) as f64;
    let mut levels: Vec<LevelStats> = Vec::new();
    let mut violations = Vec::new();
    let mut layer = vec![CylinderCover::full()];
    for n in 1..=n_max {
        let mut next = Vec::with_capacity(layer.len() * 2);
        for c in &layer {
            let c0 = c.refine(0, d, k)?;
            let c1 = c.refine(1, d, k)?;
            if c.count > c0.count + c1.count + 1 {
                violations.push(format!("recursion fails at word '{}'", c.word));
            }
            next.push(c0);
            next.push(c1);
        }
        layer = next;
        let mut st = LevelStats { n, max_count: 0, max_count_word: String::new(), max_length: 0.0, total_length: 0.0, count_bound: 0.0 };
        let mut total = Frac::zero();
        for c in &layer {
            if c.count > st.max_count {
                st.max_count = c.count;
                st.max_count_word = c.word.clone();
            }
            st.max_length = st.max_length.max(c.max_length().to_f64().unwrap());
            total += c.total_length();
        }
        st.total_length = total.to_f64().unwrap();
        if total > Frac::from_integer(1) {
            violations.push(format!("level {n} arcs have total length above 1"));
        }
        levels.push(st);
    }
    let constant = levels[0].max_count as f64 / growth;
    let mut max_recursion_holds = true;
    for i in 0..levels.len() {
        let n = levels[i].n;
        let dn = (d as f64).powi(n as i32);
        levels[i].count_bound = constant * n as f64 * growth.powi(n as i32);
        if levels[i].max_count as f64 > levels[i].count_bound {
            violations.push(format!(
                "word '{}' has {} arcs, above C n (d-k)^n = {}",
                levels[i].max_count_word, levels[i].max_count, levels[i].count_bound
            ));
        }
        if levels[i].max_length > 2.0 / dn {
            violations.push(format!("level {n} has an arc longer than 2 d^-n"));
        }
        if i > 0 && levels[i].max_count > (d - k) * levels[i - 1].max_count + 1 {
            max_recursion_holds = false;
        }
    }
    let ln_d = (d as f64).ln();
    let xs: Vec<f64> = levels.iter().map(|l| l.n as f64 * ln_d).collect();
    let ys: Vec<f64> = levels.iter().map(|l| (l.max_count as f64 / l.n as f64).ln()).collect();
    let dimension_estimate = slope(&xs, &ys);
    let raw: Vec<f64> = levels.iter().map(|l| (l.max_count as f64).ln()).collect();
    let raw_dimension_estimate = slope(&xs, &raw);
    let dimension_bound = growth.ln() / ln_d + 0.05;
    if dimension_estimate > dimension_bound {
        violations.push(format!("dimension estimate {dimension_estimate} above {dimension_bound}"));
    }
    let passed = violations.is_empty();
    Ok(CountingReport {
        d,
        k,
        n_max,
        constant,
        levels,
        dimension_estimate,
        raw_dimension_estimate,
        dimension_bound,
        max_recursion_holds,
        violations,
        passed,
    })
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return if xs.is_empty() || xs[0] == 0.0 { 0.0 } else { ys[0] / xs[0] };
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn fr(p: i128, q: i128) -> Frac {
        Frac::new(p, q)
    }

    #[test]
    fn kneading_examples() {
        let r = kneading(&Angle::exact(1, 7).unwrap(), 3, 1, 8).unwrap();
        assert_eq!(r.word(), "00111");
        assert_eq!(r.boundary_hit_at, Some(6));
        let r = kneading(&Angle::exact(1, 4).unwrap(), 3, 1, 8).unwrap();
        assert_eq!(r.digits, vec![1]);
        assert_eq!(r.boundary_hit_at, Some(2));
        // 3·(1/6) = 1/2 = 1/6 + 1/3
        let r = kneading(&Angle::exact(1, 6).unwrap(), 3, 1, 4).unwrap();
        assert_eq!(r.boundary_hit_at, Some(1));
        assert!(kneading(&Angle::float(0.1).unwrap(), 3, 1, 4).is_err());
        assert!(kneading(&Angle::exact(1, 5).unwrap(), 3, 2, 4).is_err());
    }

    #[test]
    fn cover_examples() {
        let c = cylinder_cover("0", 3, 1).unwrap();
        assert_eq!(c.intervals, vec![(fr(0, 1), fr(1, 6)), (fr(1, 2), fr(2, 3))]);
        let c = cylinder_cover("1", 3, 1).unwrap();
        assert_eq!(c.intervals, vec![(fr(1, 6), fr(1, 2)), (fr(2, 3), fr(1, 1))]);
        let c = cylinder_cover("", 3, 1).unwrap();
        assert_eq!(c.count, 1);
        assert!(cylinder_cover("01x", 3, 1).is_err());
        assert!(matches!(cylinder_cover(&"0".repeat(30), 3, 1), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn covers_refine_prefixes() {
        for w in ["0", "01", "011", "0110", "10", "101", "1011"] {
            let c = cylinder_cover(w, 3, 1).unwrap();
            let p = cylinder_cover(&w[..w.len() - 1], 3, 1).unwrap();
            for (a, b) in &c.intervals {
                assert!(p.intervals.iter().any(|(s, e)| s <= a && b <= e), "{w}");
            }
            for pair in c.intervals.windows(2) {
                assert!(pair[0].1 <= pair[1].0);
            }
        }
    }

    #[test]
    fn moving_partition_matches_fixed_condition() {
        let mut rng = Rng::new(11);
        let mut checked = 0;
        for _ in 0..10_000 {
            let q = 2 + rng.below(5000) as i128;
            let p = rng.below(q as u64) as i128;
            let a = Angle::exact(p, q).unwrap();
            for (d, k, n) in [(3, 1, 6), (5, 2, 4), (4, 1, 4)] {
                let kn = kneading(&a, d, k, n).unwrap();
                if kn.boundary_hit_at.is_some() {
                    continue;
                }
                let c = cylinder_cover(&kn.word(), d, k).unwrap();
                assert!(c.contains(a.as_frac().unwrap()), "{a} d={d} k={k}");
                let mut flipped = kn.word().into_bytes();
                let last = flipped.len() - 1;
                flipped[last] ^= 1;
                let other = cylinder_cover(core::str::from_utf8(&flipped).unwrap(), d, k).unwrap();
                assert!(!other.contains(a.as_frac().unwrap()));
                checked += 1;
            }
        }
        assert!(checked > 20_000, "{checked}");
    }

    #[test]
    fn counting_bound_small() {
        let r = verify_counting_bound(3, 1, 1).unwrap();
        assert_eq!(r.levels[0].max_count, 2);
        assert_eq!(r.constant, 1.0);
        let r = verify_counting_bound(3, 1, 8).unwrap();
        assert!(r.passed, "{:?}", r.violations);
        let r = verify_counting_bound(5, 1, 5).unwrap();
        assert!(r.passed, "{:?}", r.violations);
    }
}
