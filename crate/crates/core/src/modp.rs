//! Dense polynomials over 𝔽_p for primes below 2^62.

use alloc::vec;
use alloc::vec::Vec;

/// Large primes used for modular certificates.
pub const PRIMES: [u64; 2] = [(1 << 61) - 1, (1 << 62) - 57];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Field {
    pub p: u64,
}

impl Field {
    pub fn new(p: u64) -> Self {
        assert!(p < 1 << 62);
        Field { p }
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a as u128 + b as u128;
        (s % self.p as u128) as u64
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.p - (b - a)
        }
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    pub fn inv(&self, a: u64) -> u64 {
        self.pow(a, self.p - 2)
    }

    pub fn from_i64(&self, x: i64) -> u64 {
        let r = (x as i128).rem_euclid(self.p as i128);
        r as u64
    }
}

/// Polynomial over 𝔽_p, ascending coefficients, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyP {
    pub f: Field,
    pub c: Vec<u64>,
}

impl PolyP {
    pub fn new(f: Field, mut c: Vec<u64>) -> Self {
        while c.last() == Some(&0) {
            c.pop();
        }
        PolyP { f, c }
    }

    pub fn zero(f: Field) -> Self {
        PolyP { f, c: Vec::new() }
    }

    pub fn one(f: Field) -> Self {
        PolyP::new(f, vec![1])
    }

    pub fn x(f: Field) -> Self {
        PolyP::new(f, vec![0, 1])
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree, with −1 for the zero polynomial.
    pub fn degree(&self) -> isize {
        self.c.len() as isize - 1
    }

    pub fn add(&self, o: &PolyP) -> PolyP {
        let n = self.c.len().max(o.c.len());
        let v = (0..n).map(|i| self.f.add(*self.c.get(i).unwrap_or(&0), *o.c.get(i).unwrap_or(&0))).collect();
        PolyP::new(self.f, v)
    }

    pub fn sub(&self, o: &PolyP) -> PolyP {
        let n = self.c.len().max(o.c.len());
        let v = (0..n).map(|i| self.f.sub(*self.c.get(i).unwrap_or(&0), *o.c.get(i).unwrap_or(&0))).collect();
        PolyP::new(self.f, v)
    }

    pub fn mul(&self, o: &PolyP) -> PolyP {
        if self.is_zero() || o.is_zero() {
            return PolyP::zero(self.f);
        }
        let p = self.f.p as u128;
        let cap = 1u128 << 126;
        let mut acc = vec![0u128; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                let t = acc[i + j] + a as u128 * b as u128;
                acc[i + j] = if t >= cap { t % p } else { t };
            }
        }
        PolyP::new(self.f, acc.into_iter().map(|t| (t % p) as u64).collect())
    }

    pub fn scale(&self, s: u64) -> PolyP {
        PolyP::new(self.f, self.c.iter().map(|&a| self.f.mul(a, s)).collect())
    }

    pub fn pow(&self, e: usize) -> PolyP {
        let mut r = PolyP::one(self.f);
        let mut b = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        r
    }

    pub fn derivative(&self) -> PolyP {
        if self.c.len() <= 1 {
            return PolyP::zero(self.f);
        }
        let v = (1..self.c.len()).map(|i| self.f.mul(self.c[i], i as u64 % self.f.p)).collect();
        PolyP::new(self.f, v)
    }

    pub fn monic(&self) -> PolyP {
        match self.c.last() {
            Some(&l) => self.scale(self.f.inv(l)),
            None => self.clone(),
        }
    }

    /// Quotient and remainder; `d` must be nonzero.
    pub fn divrem(&self, d: &PolyP) -> (PolyP, PolyP) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let f = self.f;
        let mut r = self.c.clone();
        let dl = d.c.len();
        if r.len() < dl {
            return (PolyP::zero(f), self.clone());
        }
        let inv = f.inv(*d.c.last().unwrap());
        let mut q = vec![0u64; r.len() - dl + 1];
        for i in (0..q.len()).rev() {
            let coef = f.mul(r[i + dl - 1], inv);
            q[i] = coef;
            if coef == 0 {
                continue;
            }
            for j in 0..dl {
                r[i + j] = f.sub(r[i + j], f.mul(coef, d.c[j]));
            }
        }
        r.truncate(dl - 1);
        (PolyP::new(f, q), PolyP::new(f, r))
    }

    pub fn gcd(&self, o: &PolyP) -> PolyP {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Exact quotient if `d` divides `self`.
    pub fn div_exact(&self, d: &PolyP) -> Option<PolyP> {
        let (q, r) = self.divrem(d);
        if r.is_zero() {
            Some(q)
        } else {
            None
        }
    }

    /// Largest e with d^e | self, dividing it out.
    pub fn strip(&self, d: &PolyP) -> (PolyP, usize) {
        let mut cur = self.clone();
        let mut e = 0;
        if d.degree() < 1 {
            return (cur, 0);
        }
        while let Some(q) = cur.div_exact(d) {
            cur = q;
            e += 1;
        }
        (cur, e)
    }

    /// Yun's square-free decomposition (valid when p exceeds the degree):
    /// returns (factor, multiplicity) with factors squarefree and coprime.
    pub fn squarefree_decomposition(&self) -> Vec<(PolyP, usize)> {
        let mut out = Vec::new();
        if self.degree() < 1 {
            return out;
        }
        let a = self.monic();
        let da = a.derivative();
        let g = a.gcd(&da);
        let mut b = a.divrem(&g).0;
        let mut c = da.divrem(&g).0;
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        while b.degree() >= 1 {
            let h = b.gcd(&d);
            if h.degree() >= 1 {
                out.push((h.clone(), i));
            }
            b = b.divrem(&h).0;
            c = d.divrem(&h).0;
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).degree() == 0
    }
}

/// Coefficients of p_n(c) = f_c^n(0) for f_c(z) = z^d + c, reduced mod p.
pub fn unicritical_orbit_polys(f: Field, d: usize, n: usize) -> Vec<PolyP> {
    let mut v = Vec::with_capacity(n + 1);
    v.push(PolyP::zero(f));
    let c = PolyP::x(f);
    for j in 0..n {
        let next = v[j].pow(d).add(&c);
        v.push(next);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_division() {
        let f = Field::new(PRIMES[0]);
        assert_eq!(f.mul(f.inv(12345), 12345), 1);
        let x = PolyP::x(f);
        let a = x.add(&PolyP::one(f)); // x + 1
        let b = x.sub(&PolyP::one(f)).pow(3); // (x − 1)^3
        let prod = a.pow(2).mul(&b);
        let dec = prod.squarefree_decomposition();
        assert_eq!(dec.len(), 2);
        assert_eq!(dec[0], (a.clone(), 2));
        assert_eq!(dec[1].1, 3);
        assert_eq!(prod.strip(&a).1, 2);
    }

    #[test]
    fn orbit_polys_small() {
        let f = Field::new(PRIMES[1]);
        let p = unicritical_orbit_polys(f, 2, 3);
        assert_eq!(p[2].c, vec![0, 1, 1]);
        assert_eq!(p[3].c, vec![0, 1, 1, 2, 1]);
    }
}
