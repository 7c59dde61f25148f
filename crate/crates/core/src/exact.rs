//! Exact Gaussian-rational arithmetic for orbit certification.
//!
//! Every finite double is a dyadic rational, so a polynomial with double
//! coefficients can be iterated exactly. Orbits that are genuinely
//! preperiodic (c = -2, c = i, ...) then repeat exactly.

use alloc::vec::Vec;
use num_bigint::{BigInt, Sign};
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type CRational = Complex<BigRational>;

pub fn rational_from_f64(x: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    if x == 0.0 {
        return Some(BigRational::zero());
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { Sign::Minus } else { Sign::Plus };
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mant, e) = if exp == 0 { (frac, -1074i64) } else { (frac | (1u64 << 52), exp - 1075) };
    let m = BigInt::from_biguint(sign, mant.into());
    Some(if e >= 0 { BigRational::from_integer(m << (e as usize)) } else { BigRational::new(m, BigInt::one() << ((-e) as usize)) })
}

pub fn crational_from(z: Complex64) -> Option<CRational> {
    Some(Complex::new(rational_from_f64(z.re)?, rational_from_f64(z.im)?))
}

fn bits(z: &CRational) -> u64 {
    z.re.numer().bits() + z.re.denom().bits() + z.im.numer().bits() + z.im.denom().bits()
}

fn eval(coeffs: &[CRational], z: &CRational) -> CRational {
    let mut acc = CRational::zero();
    for c in coeffs.iter().rev() {
        acc = acc * z.clone() + c.clone();
    }
    acc
}

/// Outcome of an exact orbit search: `Some((preperiod, period))` when the
/// orbit of `z0` repeats within `max_steps` without exceeding `max_bits`.
pub fn exact_preperiod(coeffs: &[Complex64], z0: Complex64, max_steps: usize, max_bits: u64) -> Option<(usize, usize)> {
    let cs: Vec<CRational> = coeffs.iter().map(|&c| crational_from(c)).collect::<Option<_>>()?;
    let mut orbit: Vec<CRational> = Vec::new();
    let mut z = crational_from(z0)?;
    for _ in 0..=max_steps {
        if let Some(j) = orbit.iter().position(|w| *w == z) {
            return Some((j, orbit.len() - j));
        }
        if bits(&z) > max_bits {
            return None;
        }
        let next = eval(&cs, &z);
        orbit.push(z);
        z = next;
    }
    None
}
