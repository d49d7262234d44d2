//! Arbitrary-precision complex numbers on top of MPFR floats.
//!
//! Only the handful of operations the Abel map and torus code need: ring
//! operations, scaling, `exp(2 pi i tau)` and complex division. Every operation
//! rounds to nearest at the value's precision.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use rug::float::Constant;
use rug::Float;

pub const MIN_PREC: u32 = 64;

pub fn real(prec: u32, v: f64) -> Float {
    Float::with_val(prec, v)
}

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

pub fn sqrt_int(prec: u32, n: i64) -> Float {
    Float::with_val(prec, n).sqrt()
}

/// `2^-k` as a float, for error budgets.
pub fn pow2(prec: u32, k: i32) -> Float {
    Float::with_val(prec, 1) << k
}

#[derive(Clone, PartialEq)]
pub struct HPComplex {
    pub re: Float,
    pub im: Float,
}

impl HPComplex {
    pub fn zero(prec: u32) -> Self {
        HPComplex {
            re: Float::new(prec),
            im: Float::new(prec),
        }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_f64(prec, 1.0, 0.0)
    }

    pub fn i(prec: u32) -> Self {
        Self::from_f64(prec, 0.0, 1.0)
    }

    pub fn new(re: Float, im: Float) -> Self {
        HPComplex { re, im }
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        HPComplex {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn from_real(re: Float) -> Self {
        let prec = re.prec();
        HPComplex {
            re,
            im: Float::new(prec),
        }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    /// `exp(i * pi * k / 4)`, exact up to rounding of `sqrt(2)/2`.
    pub fn zeta8(prec: u32, k: i64) -> Self {
        let h = Float::with_val(prec, 2).sqrt() / 2u32;
        let z = Float::new(prec);
        let (re, im) = match k.rem_euclid(8) {
            0 => (Float::with_val(prec, 1), z),
            1 => (h.clone(), h),
            2 => (z, Float::with_val(prec, 1)),
            3 => (-h.clone(), h),
            4 => (Float::with_val(prec, -1), z),
            5 => (-h.clone(), -h),
            6 => (z, Float::with_val(prec, -1)),
            _ => (h.clone(), -h),
        };
        HPComplex { re, im }
    }

    pub fn conj(&self) -> Self {
        HPComplex {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn norm_sqr(&self) -> Float {
        let mut n = self.re.clone() * &self.re;
        n += self.im.clone() * &self.im;
        n
    }

    pub fn abs(&self) -> Float {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: &Float) -> Self {
        HPComplex {
            re: self.re.clone() * s,
            im: self.im.clone() * s,
        }
    }

    pub fn scale_i64(&self, s: i64) -> Self {
        HPComplex {
            re: self.re.clone() * s,
            im: self.im.clone() * s,
        }
    }

    pub fn div_i64(&self, s: i64) -> Self {
        HPComplex {
            re: self.re.clone() / s,
            im: self.im.clone() / s,
        }
    }

    /// Multiply by `i^k`; exact.
    pub fn mul_i_pow(&self, k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => self.clone(),
            1 => HPComplex {
                re: -self.im.clone(),
                im: self.re.clone(),
            },
            2 => -self.clone(),
            _ => HPComplex {
                re: self.im.clone(),
                im: -self.re.clone(),
            },
        }
    }

    pub fn recip(&self) -> Self {
        let n = self.norm_sqr();
        HPComplex {
            re: self.re.clone() / &n,
            im: -self.im.clone() / &n,
        }
    }

    pub fn div(&self, other: &Self) -> Self {
        self * &other.recip()
    }

    /// `q = exp(2 pi i tau)`.
    pub fn exp_2pi_i(tau: &HPComplex) -> Self {
        let prec = tau.prec();
        let two_pi = pi(prec) * 2u32;
        let modulus = (-(tau.im.clone() * &two_pi)).exp();
        let (s, c) = (tau.re.clone() * &two_pi).sin_cos(Float::new(prec));
        HPComplex {
            re: c * &modulus,
            im: s * &modulus,
        }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl fmt::Debug for HPComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.20e} + {:.20e}i)", self.re.to_f64(), self.im.to_f64())
    }
}

impl<'a> Add<&'a HPComplex> for &'a HPComplex {
    type Output = HPComplex;
    fn add(self, o: &HPComplex) -> HPComplex {
        HPComplex {
            re: self.re.clone() + &o.re,
            im: self.im.clone() + &o.im,
        }
    }
}

impl<'a> Sub<&'a HPComplex> for &'a HPComplex {
    type Output = HPComplex;
    fn sub(self, o: &HPComplex) -> HPComplex {
        HPComplex {
            re: self.re.clone() - &o.re,
            im: self.im.clone() - &o.im,
        }
    }
}

impl<'a> Mul<&'a HPComplex> for &'a HPComplex {
    type Output = HPComplex;
    fn mul(self, o: &HPComplex) -> HPComplex {
        let prec = self.prec();
        let mut re = Float::with_val(prec, &self.re * &o.re);
        re -= &self.im * &o.im;
        let mut im = Float::with_val(prec, &self.re * &o.im);
        im += &self.im * &o.re;
        HPComplex { re, im }
    }
}

impl AddAssign<&HPComplex> for HPComplex {
    fn add_assign(&mut self, o: &HPComplex) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl Neg for HPComplex {
    type Output = HPComplex;
    fn neg(self) -> HPComplex {
        HPComplex {
            re: -self.re,
            im: -self.im,
        }
    }
}
