use std::ops::{Add, Mul, Sub};

use super::{CertifiedReal, PrecisionContext};
use crate::error::Result;

/// Rectangular complex enclosure: both parts are certified reals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifiedComplex {
    pub re: CertifiedReal,
    pub im: CertifiedReal,
}

impl CertifiedComplex {
    pub fn new(re: CertifiedReal, im: CertifiedReal) -> Self {
        Self { re, im }
    }

    pub fn real(re: CertifiedReal) -> Self {
        let ctx = re.context();
        Self { re, im: CertifiedReal::zero(ctx) }
    }

    pub fn from_integer(v: i64, ctx: PrecisionContext) -> Self {
        Self::real(CertifiedReal::from_integer(v, ctx))
    }

    pub fn norm_sqr(&self) -> CertifiedReal {
        self.re.square() + self.im.square()
    }

    pub fn abs(&self) -> CertifiedReal {
        let n = self.norm_sqr();
        // the squares may dip below zero only through rounding
        let n = if n.lower_ulps() < num_bigint::BigInt::from(0) {
            CertifiedReal::from_ulp_bounds(num_bigint::BigInt::from(0), n.upper_ulps(), n.context())
        } else {
            n
        };
        n.sqrt().expect("clamped to nonnegative")
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -&self.im }
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        let den = other.norm_sqr();
        let num = self * &other.conj();
        Ok(Self { re: num.re.checked_div(&den)?, im: num.im.checked_div(&den)? })
    }

    pub fn scale(&self, s: &CertifiedReal) -> Self {
        Self { re: &self.re * s, im: &self.im * s }
    }
}

impl Add for &CertifiedComplex {
    type Output = CertifiedComplex;
    fn add(self, rhs: &CertifiedComplex) -> CertifiedComplex {
        CertifiedComplex { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub for &CertifiedComplex {
    type Output = CertifiedComplex;
    fn sub(self, rhs: &CertifiedComplex) -> CertifiedComplex {
        CertifiedComplex { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul for &CertifiedComplex {
    type Output = CertifiedComplex;
    fn mul(self, rhs: &CertifiedComplex) -> CertifiedComplex {
        CertifiedComplex {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}
