//! Critical portraits: the spaces S, Cb₀ and Cb, their natural measure, the
//! gluing map from the closure of Cb₀, and the ℍ-action on leaves.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_complex::Complex64;
use num_integer::Integer;

use crate::angle::{Angle, Frac};
use crate::error::{invalid, Error, Result};
use crate::rng::Rng;

/// A pair {α, α'} with dα = dα' and α ≠ α'.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortraitPair {
    pub alpha: Angle,
    pub alpha_prime: Angle,
}

impl PortraitPair {
    pub fn new(alpha: Angle, alpha_prime: Angle, d: usize) -> Result<Self> {
        if alpha == alpha_prime {
            return invalid("pair angles coincide");
        }
        let (x, y) = (alpha.mul(d as i128), alpha_prime.mul(d as i128));
        let same = match (x, y) {
            (Angle::Exact(a), Angle::Exact(b)) => a == b,
            _ => {
                let t = (x.to_f64() - y.to_f64()).abs();
                t.min(1.0 - t) < 1e-12
            }
        };
        if !same {
            return invalid("pair angles have different images under multiplication by d");
        }
        Ok(PortraitPair { alpha, alpha_prime })
    }

    pub fn as_set(&self) -> Vec<Angle> {
        sorted(vec![self.alpha, self.alpha_prime])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPortrait {
    pub sets: Vec<Vec<Angle>>,
}

fn sorted(mut v: Vec<Angle>) -> Vec<Angle> {
    v.sort_by(|a, b| a.cmp_value(b));
    v.dedup_by(|a, b| a.cmp_value(b) == Ordering::Equal);
    v
}

impl CriticalPortrait {
    pub fn new(sets: Vec<Vec<Angle>>) -> Self {
        CriticalPortrait { sets: sets.into_iter().map(sorted).collect() }
    }

    pub fn parse(sets: &[&[&str]]) -> Result<Self> {
        let mut out = Vec::new();
        for s in sets {
            out.push(s.iter().map(|x| Angle::parse(x)).collect::<Result<Vec<_>>>()?);
        }
        Ok(CriticalPortrait::new(out))
    }

    pub fn is_exact(&self) -> bool {
        self.sets.iter().flatten().all(|a| a.is_exact())
    }

    /// Adds x to every angle.
    pub fn translate(&self, x: &Angle) -> CriticalPortrait {
        CriticalPortrait::new(self.sets.iter().map(|s| s.iter().map(|a| a.add(x)).collect()).collect())
    }
}

fn sets_equal(a: &[Angle], b: &[Angle]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x == y)
}

fn sets_disjoint(a: &[Angle], b: &[Angle]) -> bool {
    !a.iter().any(|x| b.iter().any(|y| x == y))
}

/// Exact circular-order test: t2 lies in a single component of the circle minus t1.
pub fn is_unlinked(t1: &[Angle], t2: &[Angle]) -> Result<bool> {
    if !sets_disjoint(t1, t2) {
        return invalid("sets are not disjoint");
    }
    let s1 = sorted(t1.to_vec());
    if s1.is_empty() {
        return Ok(true);
    }
    let m = s1.len();
    let component = |x: &Angle| -> usize {
        let below = s1.iter().filter(|s| s.cmp_value(x) == Ordering::Less).count();
        below % m
    };
    let mut comps = t2.iter().map(component);
    let first = match comps.next() {
        Some(c) => c,
        None => return Ok(true),
    };
    Ok(comps.all(|c| c == first))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PortraitVerdict {
    pub valid: bool,
    pub in_cb0: bool,
    pub exact: bool,
    pub set_count_ok: bool,
    pub common_image: bool,
    pub equal_or_disjoint: bool,
    /// (Card of the union, d + N − 1).
    pub cardinality: (usize, usize),
    pub cardinality_ok: bool,
    pub unlinked: bool,
    pub messages: Vec<String>,
}

/// Checks the defining conditions of Cb and membership in Cb₀.
pub fn validate_portrait(theta: &CriticalPortrait, d: usize) -> PortraitVerdict {
    let mut messages = Vec::new();
    let sets = &theta.sets;
    let set_count_ok = d >= 2 && sets.len() == d - 1 && sets.iter().all(|s| !s.is_empty());
    if !set_count_ok {
        messages.push(format!("expected {} non-empty sets, got {}", d.saturating_sub(1), sets.len()));
    }
    let common_image = sets.iter().all(|s| {
        let imgs: Vec<Angle> = s.iter().map(|a| a.mul(d as i128)).collect();
        imgs.windows(2).all(|w| match (w[0], w[1]) {
            (Angle::Exact(a), Angle::Exact(b)) => a == b,
            (x, y) => {
                let t = (x.to_f64() - y.to_f64()).abs();
                t.min(1.0 - t) < 1e-12
            }
        })
    });
    if !common_image {
        messages.push("a set has more than one image under multiplication by d".into());
    }
    let mut equal_or_disjoint = true;
    let mut unlinked = true;
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            if sets_equal(&sets[i], &sets[j]) {
                continue;
            }
            if !sets_disjoint(&sets[i], &sets[j]) {
                equal_or_disjoint = false;
                messages.push(format!("sets {i} and {j} overlap without being equal"));
                continue;
            }
            if !is_unlinked(&sets[i], &sets[j]).unwrap_or(false) {
                unlinked = false;
                messages.push(format!("sets {i} and {j} are linked"));
            }
        }
    }
    let mut distinct: Vec<&Vec<Angle>> = Vec::new();
    for s in sets {
        if !distinct.iter().any(|t| sets_equal(t, s)) {
            distinct.push(s);
        }
    }
    let mut union: Vec<Angle> = Vec::new();
    for s in sets {
        union.extend_from_slice(s);
    }
    let card = sorted(union).len();
    let want = d + distinct.len() - 1;
    let cardinality_ok = card == want;
    if !cardinality_ok {
        messages.push(format!("card of union is {card}, expected d + N - 1 = {want}"));
    }
    let valid = set_count_ok && common_image && equal_or_disjoint && cardinality_ok && unlinked;
    let in_cb0 = valid && sets.iter().all(|s| s.len() == 2) && distinct.len() == sets.len();
    PortraitVerdict {
        valid,
        in_cb0,
        exact: theta.is_exact(),
        set_count_ok,
        common_image,
        equal_or_disjoint,
        cardinality: (card, want),
        cardinality_ok,
        unlinked,
        messages,
    }
}

/// Rejection sampler for the natural measure on Cb₀.
#[derive(Debug, Clone)]
pub struct Cb0Sampler {
    pub d: usize,
    rng: Rng,
    pub attempts: u64,
    pub accepted: u64,
    pub max_attempts_per_sample: u64,
}

/// Denominator of sampled base angles: α = m / 2^52.
const SAMPLE_BITS: u32 = 52;

impl Cb0Sampler {
    pub fn new(d: usize, seed: u64) -> Self {
        Cb0Sampler { d, rng: Rng::new(seed), attempts: 0, accepted: 0, max_attempts_per_sample: 1_000_000 }
    }

    /// A pair from S: component k (distance k/d) with probability ∝ its
    /// translation length (1, or 1/2 for k = d/2), then a uniform angle.
    pub fn sample_pair(&mut self) -> PortraitPair {
        let d = self.d;
        let half = d / 2;
        let weights: Vec<f64> = (1..=half).map(|k| if 2 * k == d { 0.5 } else { 1.0 }).collect();
        let total: f64 = weights.iter().sum();
        let mut u = self.rng.uniform() * total;
        let mut k = half;
        for (i, w) in weights.iter().enumerate() {
            if u < *w {
                k = i + 1;
                break;
            }
            u -= w;
        }
        let m = (self.rng.next_u64() >> (64 - SAMPLE_BITS)) as i128;
        let alpha = Frac::new(m, 1i128 << SAMPLE_BITS);
        let beta = alpha + Frac::new(k as i128, d as i128);
        PortraitPair { alpha: Angle::from_frac(alpha), alpha_prime: Angle::from_frac(beta) }
    }

    pub fn sample(&mut self) -> Result<CriticalPortrait> {
        for _ in 0..self.max_attempts_per_sample {
            self.attempts += 1;
            let sets: Vec<Vec<Angle>> = (0..self.d - 1).map(|_| self.sample_pair().as_set()).collect();
            let ok = (0..sets.len()).all(|i| {
                (i + 1..sets.len()).all(|j| sets_disjoint(&sets[i], &sets[j]) && is_unlinked(&sets[i], &sets[j]).unwrap_or(false))
            });
            if ok {
                self.accepted += 1;
                return Ok(CriticalPortrait::new(sets));
            }
        }
        Err(Error::ResourceLimit("rejection budget exceeded".into()))
    }

    pub fn acceptance_rate(&self) -> f64 {
        self.accepted as f64 / self.attempts.max(1) as f64
    }
}

pub fn sample_cb0(d: usize, seed: u64) -> Result<CriticalPortrait> {
    if d < 2 {
        return invalid("degree must be at least 2");
    }
    Cb0Sampler::new(d, seed).sample()
}

/// The gluing map from the closure of Cb₀: each set is replaced by the union
/// of all sets chained to it through common angles.
pub fn portrait_glue(theta: &CriticalPortrait) -> CriticalPortrait {
    let n = theta.sets.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut j = i;
        while p[j] != r {
            let next = p[j];
            p[j] = r;
            j = next;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if !sets_disjoint(&theta.sets[i], &theta.sets[j]) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let root = find(&mut parent, i);
        let mut union = Vec::new();
        for j in 0..n {
            if find(&mut parent, j) == root {
                union.extend_from_slice(&theta.sets[j]);
            }
        }
        out.push(union);
    }
    CriticalPortrait::new(out)
}

/// (s+it)·(Θ, r) = (Θ + r t, s r) on exact data.
pub fn leaf_action_exact(s: Frac, t: Frac, theta: &CriticalPortrait, r: Frac) -> Result<(CriticalPortrait, Frac)> {
    if s <= Frac::from_integer(0) || r <= Frac::from_integer(0) {
        return invalid("need Re u > 0 and r > 0");
    }
    Ok((theta.translate(&Angle::from_frac(r * t)), s * r))
}

/// Floating version of the leaf action; angles become floats unless the shift is zero.
pub fn leaf_action(u: Complex64, theta: &CriticalPortrait, r: f64) -> Result<(CriticalPortrait, f64)> {
    if !(u.re > 0.0) || !(r > 0.0) {
        return invalid("need Re u > 0 and r > 0");
    }
    let shift = r * u.im;
    if shift == 0.0 {
        return Ok((theta.clone(), u.re * r));
    }
    Ok((theta.translate(&Angle::float(shift)?), u.re * r))
}

/// Group law on ℍ: (s1 + i t1) ⋆ (s2 + i t2) = s1 s2 + i (t1 s2 + t2).
pub fn leaf_compose(u1: (Frac, Frac), u2: (Frac, Frac)) -> (Frac, Frac) {
    (u1.0 * u2.0, u1.1 * u2.0 + u2.1)
}

/// True iff every angle is strictly preperiodic under multiplication by d.
pub fn misiurewicz_portrait(theta: &CriticalPortrait, d: usize) -> Result<bool> {
    let mut all = true;
    for a in theta.sets.iter().flatten() {
        match a {
            Angle::Exact(f) => {
                if f.denom().gcd(&(d as i128)) == 1 {
                    all = false;
                }
            }
            Angle::Float(_) => return invalid("exact angles required"),
        }
    }
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn portrait(s: &[&[&str]]) -> CriticalPortrait {
        CriticalPortrait::parse(s).unwrap()
    }

    fn set(s: &[&str]) -> Vec<Angle> {
        s.iter().map(|x| Angle::parse(x).unwrap()).collect()
    }

    #[test]
    fn unlinked_examples() {
        assert!(is_unlinked(&set(&["0", "1/3"]), &set(&["1/9", "2/9"])).unwrap());
        assert!(!is_unlinked(&set(&["0", "1/4"]), &set(&["1/8", "3/8"])).unwrap());
        assert!(is_unlinked(&set(&["0", "1/4"]), &set(&["3/8"])).unwrap());
        assert!(is_unlinked(&set(&["0", "1/3"]), &set(&["1/2", "3/4"])).unwrap());
        assert!(is_unlinked(&set(&["0", "1/3"]), &set(&["0", "1/2"])).is_err());
    }

    #[test]
    fn validate_examples() {
        let v = validate_portrait(&portrait(&[&["0", "1/2"]]), 2);
        assert!(v.valid && v.in_cb0);
        let v = validate_portrait(&portrait(&[&["0", "1/3"], &["0", "1/3"]]), 3);
        assert!(!v.valid && !v.cardinality_ok && v.cardinality == (2, 3));
        let v = validate_portrait(&portrait(&[&["0", "1/3", "2/3"], &["0", "1/3", "2/3"]]), 3);
        assert!(v.valid && !v.in_cb0);
        let v = validate_portrait(&portrait(&[&["1/12", "5/12"], &["7/12", "11/12"]]), 3);
        assert!(v.valid && v.in_cb0, "{:?}", v.messages);
        let v = validate_portrait(&portrait(&[&["0", "1/3"], &["1/6", "1/2"]]), 3);
        assert!(!v.unlinked);
    }

    #[test]
    fn sampler_d2_is_half_turn() {
        for seed in 0..20 {
            let t = sample_cb0(2, seed).unwrap();
            let s = &t.sets[0];
            let diff = s[1].as_frac().unwrap() - s[0].as_frac().unwrap();
            assert_eq!(diff, Frac::new(1, 2));
        }
    }

    #[test]
    fn samples_are_in_cb0() {
        for d in 2..=5 {
            let mut sm = Cb0Sampler::new(d, 3);
            for _ in 0..50 {
                let t = sm.sample().unwrap();
                let v = validate_portrait(&t, d);
                assert!(v.valid && v.in_cb0, "d={d} {:?}", v.messages);
            }
        }
    }

    #[test]
    fn glue_of_touching_pairs_is_valid() {
        let t = portrait(&[&["0", "1/3"], &["1/3", "2/3"]]);
        let g = portrait_glue(&t);
        assert_eq!(g.sets[0], set(&["0", "1/3", "2/3"]));
        assert!(validate_portrait(&g, 3).valid);
        let t = portrait(&[&["1/12", "5/12"], &["7/12", "11/12"]]);
        assert_eq!(portrait_glue(&t), t);
    }

    #[test]
    fn leaf_action_examples() {
        let t = portrait(&[&["1/12", "7/12"]]);
        let one = Frac::from_integer(1);
        let (t1, r1) = leaf_action_exact(one, Frac::from_integer(0), &t, Frac::new(1, 3)).unwrap();
        assert_eq!((t1, r1), (t.clone(), Frac::new(1, 3)));
        let r = Frac::new(2, 5);
        let (t2, r2) = leaf_action_exact(one, one / r, &t, r).unwrap();
        assert_eq!((t2, r2), (t, r));
    }

    #[test]
    fn misiurewicz_examples() {
        assert!(misiurewicz_portrait(&portrait(&[&["1/6"]]), 2).unwrap());
        assert!(!misiurewicz_portrait(&portrait(&[&["1/3"]]), 2).unwrap());
        assert!(misiurewicz_portrait(&portrait(&[&["1/2"]]), 2).unwrap());
        assert!(!misiurewicz_portrait(&portrait(&[&["1/6", "2/3"]]), 2).unwrap());
        assert!(misiurewicz_portrait(&portrait(&[&["1/12", "7/12"]]), 2).unwrap());
        let float = CriticalPortrait::new(vec![vec![Angle::float(0.25).unwrap()]]);
        assert!(misiurewicz_portrait(&float, 2).is_err());
    }
}
