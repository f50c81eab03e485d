//! Fixed-point complex arithmetic on big integers, used as an independent
//! high-precision reference for the special functions.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Fractional bits of every fixed-point value.
const BITS: u32 = 480;

#[derive(Clone, Debug)]
pub struct Fixed(BigInt);

impl Fixed {
    pub fn zero() -> Self {
        Fixed(BigInt::zero())
    }

    pub fn one() -> Self {
        Fixed(BigInt::one() << BITS)
    }

    /// Exact conversion of a finite double.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite());
        if x == 0.0 {
            return Self::zero();
        }
        let bits = x.to_bits();
        let negative = bits >> 63 == 1;
        let exponent = ((bits >> 52) & 0x7ff) as i64;
        let fraction = bits & ((1u64 << 52) - 1);
        let (mantissa, exp) = if exponent == 0 {
            (fraction, -1074)
        } else {
            (fraction | (1u64 << 52), exponent - 1075)
        };
        let mut v = BigInt::from(mantissa);
        let shift = exp + BITS as i64;
        v = if shift >= 0 {
            v << shift as usize
        } else {
            v >> (-shift) as usize
        };
        Fixed(if negative { -v } else { v })
    }

    pub fn to_f64(&self) -> f64 {
        // Keep 64 significant bits before the float conversion.
        let len = self.0.bits() as i64;
        let drop = (len - 64).max(0);
        let top = (&self.0 >> drop as usize).to_f64().unwrap();
        top * 2f64.powi((drop - BITS as i64) as i32)
    }

    pub fn add(&self, o: &Self) -> Self {
        Fixed(&self.0 + &o.0)
    }

    pub fn sub(&self, o: &Self) -> Self {
        Fixed(&self.0 - &o.0)
    }

    pub fn mul(&self, o: &Self) -> Self {
        Fixed((&self.0 * &o.0) >> BITS)
    }

    pub fn div_int(&self, n: u64) -> Self {
        Fixed(&self.0 / BigInt::from(n))
    }

    pub fn div(&self, o: &Self) -> Self {
        Fixed((&self.0 << BITS) / &o.0)
    }

    pub fn sqrt(&self) -> Self {
        assert!(!self.0.is_negative());
        Fixed((&self.0 << BITS).sqrt())
    }

    fn is_negligible(&self) -> bool {
        self.0.bits() < 8
    }

    /// atan(1/n) by its alternating series.
    fn arctan_inverse(n: u64) -> Self {
        let n2 = n * n;
        let mut power = Self::one().div_int(n);
        let mut sum = Self::zero();
        let mut k = 0u64;
        while !power.is_negligible() {
            let term = power.div_int(2 * k + 1);
            sum = if k % 2 == 0 {
                sum.add(&term)
            } else {
                sum.sub(&term)
            };
            power = power.div_int(n2);
            k += 1;
        }
        sum
    }

    /// π = 16·atan(1/5) − 4·atan(1/239).
    pub fn pi() -> Self {
        let a = Self::arctan_inverse(5);
        let b = Self::arctan_inverse(239);
        Fixed(a.0 * 16 - b.0 * 4)
    }
}

#[derive(Clone, Debug)]
pub struct FixedComplex {
    pub re: Fixed,
    pub im: Fixed,
}

impl FixedComplex {
    pub fn from_c64(z: Complex64) -> Self {
        Self {
            re: Fixed::from_f64(z.re),
            im: Fixed::from_f64(z.im),
        }
    }

    pub fn real(x: Fixed) -> Self {
        Self {
            re: x,
            im: Fixed::zero(),
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn add(&self, o: &Self) -> Self {
        Self {
            re: self.re.add(&o.re),
            im: self.im.add(&o.im),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self {
            re: self.re.sub(&o.re),
            im: self.im.sub(&o.im),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    pub fn scale(&self, x: &Fixed) -> Self {
        Self {
            re: self.re.mul(x),
            im: self.im.mul(x),
        }
    }

    pub fn div_int(&self, n: u64) -> Self {
        Self {
            re: self.re.div_int(n),
            im: self.im.div_int(n),
        }
    }

    fn is_negligible(&self) -> bool {
        self.re.is_negligible() && self.im.is_negligible()
    }

    /// Taylor series of e^z; arguments are kept moderate by the callers.
    pub fn exp(&self) -> Self {
        let mut term = Self::real(Fixed::one());
        let mut sum = term.clone();
        let mut k = 1u64;
        loop {
            term = term.mul(self).div_int(k);
            if term.is_negligible() {
                return sum;
            }
            sum = sum.add(&term);
            k += 1;
        }
    }

    /// erf(z) = (2/√π)·Σ (−1)ⁿ z^{2n+1}/(n!(2n+1)).
    pub fn erf(&self) -> Self {
        let z2 = self.mul(self);
        let mut power = self.clone();
        let mut sum = Self::real(Fixed::zero());
        let mut n = 0u64;
        loop {
            let term = power.div_int(2 * n + 1);
            if n > 4 && term.is_negligible() {
                break;
            }
            sum = if n % 2 == 0 {
                sum.add(&term)
            } else {
                sum.sub(&term)
            };
            power = power.mul(&z2).div_int(n + 1);
            n += 1;
        }
        let two_over_sqrt_pi = Fixed(Fixed::one().0 * 2).div(&Fixed::pi().sqrt());
        sum.scale(&two_over_sqrt_pi)
    }

    /// erfcx(z) = e^{z²}·(1 − erf z).
    pub fn erfcx(&self) -> Self {
        let one = Self::real(Fixed::one());
        self.mul(self).exp().mul(&one.sub(&self.erf()))
    }
}

/// Reference erfcx for moderate |z| (the series needs |z| ≲ 6 at this precision).
pub fn erfcx_reference(z: Complex64) -> Complex64 {
    assert!(z.norm() <= 6.5, "reference series limited to |z| ≤ 6.5");
    FixedComplex::from_c64(z).erfcx().to_c64()
}

/// Reference erfc on the real line.
pub fn erfc_reference(x: f64) -> f64 {
    let one = FixedComplex::real(Fixed::one());
    one.sub(&FixedComplex::from_c64(Complex64::new(x, 0.0)).erf())
        .to_c64()
        .re
}
