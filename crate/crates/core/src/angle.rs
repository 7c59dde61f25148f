//! Points of ℝ/ℤ, exact or floating.

use alloc::format;
use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;

use num_integer::Integer;
use num_rational::Ratio;
#[cfg(not(feature = "std"))]
use num_traits::Float;
use num_traits::{ToPrimitive, Zero};

use crate::error::{invalid, Result};

pub type Frac = Ratio<i128>;

/// Reduces a fraction into [0, 1).
pub fn frac_mod1(x: Frac) -> Frac {
    let fl = x.floor();
    x - fl
}

#[derive(Debug, Clone, Copy)]
pub enum Angle {
    Exact(Frac),
    Float(f64),
}

impl Angle {
    pub fn exact(p: i128, q: i128) -> Result<Angle> {
        if q == 0 {
            return invalid("zero denominator");
        }
        Ok(Angle::Exact(frac_mod1(Frac::new(p, q))))
    }

    pub fn from_frac(x: Frac) -> Angle {
        Angle::Exact(frac_mod1(x))
    }

    pub fn float(x: f64) -> Result<Angle> {
        if !x.is_finite() {
            return invalid("non-finite angle");
        }
        let y = x - x.floor();
        Ok(Angle::Float(if y >= 1.0 { 0.0 } else { y }))
    }

    pub fn parse(s: &str) -> Result<Angle> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: i128 = p.trim().parse().map_err(|_| crate::Error::InvalidArgument(format!("bad angle {s}")))?;
            let q: i128 = q.trim().parse().map_err(|_| crate::Error::InvalidArgument(format!("bad angle {s}")))?;
            Angle::exact(p, q)
        } else if let Ok(p) = s.parse::<i128>() {
            Angle::exact(p, 1)
        } else {
            let x: f64 = s.parse().map_err(|_| crate::Error::InvalidArgument(format!("bad angle {s}")))?;
            Angle::float(x)
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Angle::Exact(_))
    }

    pub fn as_frac(&self) -> Option<Frac> {
        match self {
            Angle::Exact(f) => Some(*f),
            Angle::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Angle::Exact(f) => f.numer().to_f64().unwrap() / f.denom().to_f64().unwrap(),
            Angle::Float(x) => *x,
        }
    }

    /// Image under t ↦ m·t mod 1 (exact for exact angles).
    pub fn mul(&self, m: i128) -> Angle {
        match self {
            Angle::Exact(f) => {
                let q = *f.denom();
                let p = (f.numer().rem_euclid(q) * m.rem_euclid(q)).rem_euclid(q);
                Angle::Exact(Frac::new(p, q))
            }
            Angle::Float(x) => Angle::Float(fract(x * m as f64)),
        }
    }

    /// Image under t ↦ d^n·t mod 1, computed by repeated exact steps.
    pub fn mul_pow(&self, d: i128, n: u32) -> Angle {
        match self {
            Angle::Exact(_) => {
                let mut a = *self;
                for _ in 0..n {
                    a = a.mul(d);
                }
                a
            }
            Angle::Float(x) => {
                let mut y = *x;
                for _ in 0..n {
                    y = fract(y * d as f64);
                }
                Angle::Float(y)
            }
        }
    }

    pub fn add(&self, other: &Angle) -> Angle {
        match (self, other) {
            (Angle::Exact(a), Angle::Exact(b)) => Angle::from_frac(a + b),
            _ => Angle::Float(fract(self.to_f64() + other.to_f64())),
        }
    }

    pub fn to_string_pq(&self) -> String {
        match self {
            Angle::Exact(f) => format!("{}/{}", f.numer(), f.denom()),
            Angle::Float(x) => format!("{x}"),
        }
    }
}

fn fract(x: f64) -> f64 {
    let y = x - x.floor();
    if y >= 1.0 {
        0.0
    } else {
        y
    }
}

impl PartialEq for Angle {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_value(other) == Ordering::Equal
    }
}

impl Angle {
    /// Order of representatives in [0, 1).
    pub fn cmp_value(&self, other: &Angle) -> Ordering {
        match (self, other) {
            (Angle::Exact(a), Angle::Exact(b)) => a.cmp(b),
            _ => self.to_f64().partial_cmp(&other.to_f64()).unwrap_or(Ordering::Equal),
        }
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_pq())
    }
}

/// gcd helper for reduced denominators.
pub fn gcd_i128(a: i128, b: i128) -> i128 {
    a.gcd(&b)
}

/// Length of the open arc from `a` counterclockwise to `b` in [0,1).
pub fn arc_length(a: Frac, b: Frac) -> Frac {
    let l = b - a;
    if l <= Frac::zero() {
        l + Frac::from_integer(1)
    } else {
        l
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_and_parsing() {
        let a = Angle::exact(7, 6).unwrap();
        assert_eq!(a.as_frac().unwrap(), Frac::new(1, 6));
        let b = Angle::exact(-1, 3).unwrap();
        assert_eq!(b.as_frac().unwrap(), Frac::new(2, 3));
        assert_eq!(Angle::parse(" 2/4 ").unwrap().as_frac().unwrap(), Frac::new(1, 2));
        assert!(!Angle::parse("0.25").unwrap().is_exact());
        assert!(Angle::parse("1/0").is_err());
    }

    #[test]
    fn doubling_is_exact() {
        let a = Angle::exact(1, 6).unwrap();
        assert_eq!(a.mul(2).as_frac().unwrap(), Frac::new(1, 3));
        assert_eq!(a.mul_pow(2, 3).as_frac().unwrap(), Frac::new(1, 3));
        let big = Angle::exact(1, 3 * (1i128 << 52)).unwrap();
        assert_eq!(big.mul_pow(2, 52).as_frac().unwrap(), Frac::new(1, 3));
    }
}
