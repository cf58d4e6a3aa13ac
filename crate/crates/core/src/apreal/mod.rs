//! Certified arbitrary-precision reals.
//!
//! A [`CertifiedReal`] is a binary fixed-point center together with an error
//! radius expressed in the same units: the value `mid / 2^bits` with
//! `|x - mid / 2^bits| <= rad / 2^bits` for the true value `x`. Every
//! operation rounds the center and widens the radius so that the enclosure
//! stays valid. Centers are plain integers, which makes every printed value
//! reproducible across platforms.

mod complex;
mod log;
mod roots;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use complex::CertifiedComplex;
pub use roots::{all_roots, dominant_root, f_k_at, CharacteristicPolynomial};

/// Smallest accepted working precision, in decimal digits.
pub const MIN_DIGITS: u32 = 30;

/// Requested decimal working precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PrecisionContext {
    digits: u32,
}

impl PrecisionContext {
    pub fn new(digits: u32) -> Result<Self> {
        if digits < MIN_DIGITS {
            return Err(Error::InvalidPrecision(digits));
        }
        Ok(Self { digits })
    }

    pub fn digits(self) -> u32 {
        self.digits
    }

    /// Binary fraction bits used for centers and radii. Always a few bits
    /// more than `digits * log2(10)`.
    pub fn bits(self) -> u32 {
        (self.digits as u64 * 3322).div_ceil(1000) as u32 + 16
    }

    pub fn doubled(self) -> Self {
        Self { digits: self.digits.saturating_mul(2) }
    }

    /// Context with room for `extra` more binary digits.
    pub fn with_extra_bits(self, extra: u32) -> Self {
        Self { digits: self.digits + (extra as u64 * 30103).div_ceil(100000) as u32 }
    }

    pub fn with_extra_digits(self, extra: u32) -> Self {
        Self { digits: self.digits + extra }
    }

    fn finer(self, other: Self) -> Self {
        if self.digits >= other.digits {
            self
        } else {
            other
        }
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self { digits: 60 }
    }
}

/// Run `f` at `ctx`, doubling the digits whenever it fails for lack of
/// precision. Gives up after `max_doublings` retries.
pub fn with_escalation<T>(
    ctx: PrecisionContext,
    max_doublings: u32,
    mut f: impl FnMut(PrecisionContext) -> Result<T>,
) -> Result<T> {
    let mut cur = ctx;
    let mut last = None;
    for _ in 0..=max_doublings {
        match f(cur) {
            Ok(v) => return Ok(v),
            Err(e) if e.is_precision_limited() => last = Some(e),
            Err(e) => return Err(e),
        }
        cur = cur.doubled();
    }
    Err(Error::PrecisionExhausted(format!(
        "gave up at {} digits: {}",
        cur.digits() / 2,
        last.map(|e| e.to_string()).unwrap_or_default()
    )))
}

pub(crate) fn pow2(s: u32) -> BigInt {
    BigInt::one() << s as usize
}

/// Nearest-integer shift; reports whether any bits were discarded.
fn round_shift(x: &BigInt, s: u32) -> (BigInt, bool) {
    if s == 0 {
        return (x.clone(), false);
    }
    let inexact = x.trailing_zeros().is_some_and(|tz| tz < s as u64);
    let half = pow2(s - 1);
    ((x + half) >> s as usize, inexact)
}

/// Ceiling shift of a nonnegative integer.
fn ceil_shift(x: &BigInt, s: u32) -> BigInt {
    if s == 0 {
        return x.clone();
    }
    (x + pow2(s) - 1) >> s as usize
}

fn ceil_sqrt(n: &BigInt) -> BigInt {
    let s = n.sqrt();
    if &s * &s < *n {
        s + 1
    } else {
        s
    }
}

/// Direction used when printing an endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rounding {
    Floor,
    Ceil,
    Nearest,
}

/// A real number known to lie in `[mid - rad, mid + rad] / 2^bits`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifiedReal {
    mid: BigInt,
    rad: BigInt,
    ctx: PrecisionContext,
}

impl CertifiedReal {
    fn raw(mid: BigInt, rad: BigInt, ctx: PrecisionContext) -> Self {
        debug_assert!(!rad.is_negative());
        Self { mid, rad, ctx }
    }

    /// Builds the smallest centered enclosure of `[lo, hi]` (in ulps).
    pub(crate) fn from_ulp_bounds(lo: BigInt, hi: BigInt, ctx: PrecisionContext) -> Self {
        debug_assert!(lo <= hi);
        let mid = (&lo + &hi).div_floor(&BigInt::from(2));
        let rad = &hi - &mid;
        Self::raw(mid, rad, ctx)
    }

    pub fn zero(ctx: PrecisionContext) -> Self {
        Self::raw(BigInt::zero(), BigInt::zero(), ctx)
    }

    pub fn one(ctx: PrecisionContext) -> Self {
        Self::from_integer(1, ctx)
    }

    pub fn from_integer(v: impl Into<BigInt>, ctx: PrecisionContext) -> Self {
        Self::raw(v.into() << ctx.bits() as usize, BigInt::zero(), ctx)
    }

    /// Encloses `num / den`. The radius is zero exactly when the fraction is a
    /// dyadic rational fitting in the context's bits.
    pub fn make_constant(num: &BigInt, den: &BigInt, ctx: PrecisionContext) -> Self {
        assert!(!den.is_zero(), "make_constant with zero denominator");
        let scaled = num << ctx.bits() as usize;
        let (q, r) = scaled.div_mod_floor(den);
        if r.is_zero() {
            Self::raw(q, BigInt::zero(), ctx)
        } else {
            Self::raw(q, BigInt::one(), ctx)
        }
    }

    pub fn from_ratio(num: i64, den: i64, ctx: PrecisionContext) -> Self {
        Self::make_constant(&BigInt::from(num), &BigInt::from(den), ctx)
    }

    /// Parses an exact decimal literal such as `3.83e13`, `-1.4` or `2e162`.
    pub fn from_decimal(s: &str, ctx: PrecisionContext) -> Result<Self> {
        let (num, den) = parse_decimal(s)?;
        Ok(Self::make_constant(&num, &den, ctx))
    }

    pub fn context(&self) -> PrecisionContext {
        self.ctx
    }

    pub fn bits(&self) -> u32 {
        self.ctx.bits()
    }

    pub fn center_ulps(&self) -> &BigInt {
        &self.mid
    }

    pub fn radius_ulps(&self) -> &BigInt {
        &self.rad
    }

    pub fn lower_ulps(&self) -> BigInt {
        &self.mid - &self.rad
    }

    pub fn upper_ulps(&self) -> BigInt {
        &self.mid + &self.rad
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    /// Re-expresses the value at another precision. Moving to a finer
    /// context is exact; moving to a coarser one rounds outward.
    pub fn with_context(&self, ctx: PrecisionContext) -> Self {
        let (from, to) = (self.bits(), ctx.bits());
        match from.cmp(&to) {
            Ordering::Equal => Self::raw(self.mid.clone(), self.rad.clone(), ctx),
            Ordering::Less => {
                let d = (to - from) as usize;
                Self::raw(&self.mid << d, &self.rad << d, ctx)
            }
            Ordering::Greater => {
                let d = from - to;
                let (mid, inexact) = round_shift(&self.mid, d);
                let rad = ceil_shift(&self.rad, d) + u32::from(inexact);
                Self::raw(mid, rad, ctx)
            }
        }
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        let ctx = self.ctx.finer(other.ctx);
        (self.with_context(ctx), other.with_context(ctx))
    }

    pub fn is_positive(&self) -> bool {
        self.lower_ulps().is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.upper_ulps().is_negative()
    }

    pub fn contains_zero(&self) -> bool {
        !self.is_positive() && !self.is_negative()
    }

    /// Certified `self < other`.
    pub fn certainly_lt(&self, other: &Self) -> bool {
        let (a, b) = self.aligned(other);
        a.upper_ulps() < b.lower_ulps()
    }

    /// Certified `self <= other`.
    pub fn certainly_le(&self, other: &Self) -> bool {
        let (a, b) = self.aligned(other);
        a.upper_ulps() <= b.lower_ulps()
    }

    pub fn certainly_gt(&self, other: &Self) -> bool {
        other.certainly_lt(self)
    }

    pub fn certainly_ge(&self, other: &Self) -> bool {
        other.certainly_le(self)
    }

    /// Certified ordering, or `None` when the intervals overlap.
    pub fn certain_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.certainly_lt(other) {
            Some(Ordering::Less)
        } else if self.certainly_gt(other) {
            Some(Ordering::Greater)
        } else {
            let (a, b) = self.aligned(other);
            (a.is_exact() && b.is_exact() && a.mid == b.mid).then_some(Ordering::Equal)
        }
    }

    /// Whether `other`'s interval is inside `self`'s.
    pub fn encloses(&self, other: &Self) -> bool {
        let (a, b) = self.aligned(other);
        a.lower_ulps() <= b.lower_ulps() && b.upper_ulps() <= a.upper_ulps()
    }

    /// Whether the exact rational `num / den` lies in the interval.
    pub fn contains_ratio(&self, num: &BigInt, den: &BigInt) -> bool {
        let (num, den) = if den.is_negative() { (-num, -den) } else { (num.clone(), den.clone()) };
        let scaled = num << self.bits() as usize;
        self.lower_ulps() * &den <= scaled && scaled <= self.upper_ulps() * &den
    }

    /// Whether the intervals intersect.
    pub fn overlaps(&self, other: &Self) -> bool {
        let (a, b) = self.aligned(other);
        a.lower_ulps() <= b.upper_ulps() && b.lower_ulps() <= a.upper_ulps()
    }

    pub fn abs(&self) -> Self {
        if self.mid.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Enclosure of `|x|` that is tight when the interval straddles zero.
    pub fn abs_tight(&self) -> Self {
        if !self.contains_zero() {
            return self.abs();
        }
        let hi = self.lower_ulps().abs().max(self.upper_ulps().abs());
        Self::from_ulp_bounds(BigInt::zero(), hi, self.ctx)
    }

    pub fn max(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        let lo = a.lower_ulps().max(b.lower_ulps());
        let hi = a.upper_ulps().max(b.upper_ulps());
        Self::from_ulp_bounds(lo, hi, a.ctx)
    }

    pub fn min(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        let lo = a.lower_ulps().min(b.lower_ulps());
        let hi = a.upper_ulps().min(b.upper_ulps());
        Self::from_ulp_bounds(lo, hi, a.ctx)
    }

    /// Exact multiplication by an integer.
    pub fn mul_int(&self, n: &BigInt) -> Self {
        Self::raw(&self.mid * n, &self.rad * n.abs(), self.ctx)
    }

    /// Division by a nonzero integer.
    pub fn div_int(&self, n: &BigInt) -> Self {
        assert!(!n.is_zero(), "div_int by zero");
        let (q, r) = self.mid.div_mod_floor(n);
        let rad = self.rad.div_ceil(&n.abs()) + u32::from(!r.is_zero());
        Self::raw(q, rad, self.ctx)
    }

    /// Multiplication by `2^e` (exact for e >= 0).
    pub fn mul_pow2(&self, e: i64) -> Self {
        if e >= 0 {
            Self::raw(&self.mid << e as usize, &self.rad << e as usize, self.ctx)
        } else {
            let s = (-e) as u32;
            let (mid, inexact) = round_shift(&self.mid, s);
            Self::raw(mid, ceil_shift(&self.rad, s) + u32::from(inexact), self.ctx)
        }
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.aligned(other);
        let p = a.bits();
        let y_abs = b.mid.abs();
        if y_abs <= b.rad {
            return Err(Error::DivisionByZero);
        }
        let (q, r) = (&a.mid << p as usize).div_mod_floor(&b.mid);
        let x_abs = a.mid.abs();
        let num = (&a.rad * &y_abs + &b.rad * &x_abs) << p as usize;
        let den = &y_abs * (&y_abs - &b.rad);
        let rad = num.div_ceil(&den) + u32::from(!r.is_zero());
        Ok(Self::raw(q, rad, a.ctx))
    }

    pub fn recip(&self) -> Result<Self> {
        Self::one(self.ctx).checked_div(self)
    }

    /// Integer power by repeated squaring.
    pub fn powi(&self, n: i64) -> Result<Self> {
        if n < 0 {
            return self.powi(-n)?.recip();
        }
        let mut result = Self::one(self.ctx);
        let mut base = self.clone();
        let mut e = n as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        Ok(result)
    }

    pub fn sqrt(&self) -> Result<Self> {
        let lo = self.lower_ulps();
        if lo.is_negative() {
            return Err(Error::NegativeSqrt);
        }
        let p = self.bits() as usize;
        let lower = (lo << p).sqrt();
        let upper = ceil_sqrt(&(self.upper_ulps() << p));
        Ok(Self::from_ulp_bounds(lower, upper, self.ctx))
    }

    /// Natural logarithm, computed at both endpoints so that the enclosure is
    /// monotone in the input interval.
    pub fn ln(&self) -> Result<Self> {
        let lo = self.lower_ulps();
        if !lo.is_positive() {
            return Err(Error::NonPositiveInput);
        }
        let p = self.bits();
        let (lower, _) = log::ln_bounds(&lo, p);
        let (_, upper) = log::ln_bounds(&self.upper_ulps(), p);
        Ok(Self::from_ulp_bounds(lower, upper, self.ctx))
    }

    /// Floor of the lower endpoint.
    pub fn floor_lower(&self) -> BigInt {
        self.lower_ulps() >> self.bits() as usize
    }

    /// Floor of the upper endpoint.
    pub fn floor_upper(&self) -> BigInt {
        self.upper_ulps() >> self.bits() as usize
    }

    /// Ceiling of the upper endpoint.
    pub fn ceil_upper(&self) -> BigInt {
        let p = self.bits();
        let hi = self.upper_ulps();
        let f = &hi >> p as usize;
        if (&f << p as usize) == hi {
            f
        } else {
            f + 1
        }
    }

    /// Floor of the value if the whole interval shares it.
    pub fn floor_exact(&self) -> Option<BigInt> {
        let (a, b) = (self.floor_lower(), self.floor_upper());
        (a == b).then_some(a)
    }

    /// Approximate center, for diagnostics only.
    pub fn to_f64(&self) -> f64 {
        ulps_to_f64(&self.mid, self.bits())
    }

    pub fn radius_f64(&self) -> f64 {
        ulps_to_f64(&self.rad, self.bits())
    }

    /// Scientific-notation decimal of the lower endpoint, rounded down.
    pub fn lower_decimal(&self, sig: usize) -> String {
        sci_string(&self.lower_ulps(), self.bits(), sig, Rounding::Floor)
    }

    /// Scientific-notation decimal of the upper endpoint, rounded up.
    pub fn upper_decimal(&self, sig: usize) -> String {
        sci_string(&self.upper_ulps(), self.bits(), sig, Rounding::Ceil)
    }

    pub fn center_decimal(&self, sig: usize) -> String {
        sci_string(&self.mid, self.bits(), sig, Rounding::Nearest)
    }
}

fn ulps_to_f64(x: &BigInt, p: u32) -> f64 {
    let shift = x.bits().saturating_sub(62);
    let m = (x >> shift as usize).to_f64().unwrap_or(0.0);
    let e = shift as i64 - p as i64;
    m * 2f64.powi(e.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
}

fn pow10(e: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), e as usize)
}

fn div_round(num: &BigInt, den: &BigInt, mode: Rounding) -> BigInt {
    match mode {
        Rounding::Floor => num.div_floor(den),
        Rounding::Ceil => num.div_ceil(den),
        Rounding::Nearest => (num * BigInt::from(2) + den).div_floor(&(den * BigInt::from(2))),
    }
}

/// `x / 2^p` printed with `sig` significant digits in the given direction.
pub(crate) fn sci_string(x: &BigInt, p: u32, sig: usize, mode: Rounding) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let sig = sig.max(1) as i64;
    let den = pow2(p);
    // first guess of the decimal exponent
    let mut exp10 = ((x.bits() as f64 - p as f64) * std::f64::consts::LOG10_2).floor() as i64;
    for _ in 0..4 {
        let shift = sig - 1 - exp10;
        let (num, d) = if shift >= 0 {
            (x * pow10(shift as u32), den.clone())
        } else {
            (x.clone(), &den * pow10((-shift) as u32))
        };
        let digits = div_round(&num, &d, mode);
        let mag = digits.abs();
        if mag >= pow10(sig as u32) {
            exp10 += 1;
            continue;
        }
        if mag < pow10(sig as u32 - 1) {
            exp10 -= 1;
            continue;
        }
        let s = mag.to_string();
        let sign = if digits.sign() == Sign::Minus { "-" } else { "" };
        let (head, tail) = s.split_at(1);
        let tail = tail.trim_end_matches('0');
        return if tail.is_empty() {
            format!("{sign}{head}e{exp10}")
        } else {
            format!("{sign}{head}.{tail}e{exp10}")
        };
    }
    // rounding pushed the value exactly onto a power of ten
    let sign = if x.is_negative() { "-" } else { "" };
    format!("{sign}1e{}", exp10)
}

/// Parses `[-]int[.frac][e[-]exp]` into an exact fraction.
pub fn parse_decimal(s: &str) -> Result<(BigInt, BigInt)> {
    let bad = || Error::Parse(format!("not a decimal literal: {s:?}"));
    let t = s.trim();
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = digits.parse().map_err(|_| bad())?;
    if neg {
        num = -num;
    }
    let e = exp - frac_part.len() as i64;
    if e.unsigned_abs() > 100_000 {
        return Err(bad());
    }
    Ok(if e >= 0 {
        (num * pow10(e as u32), BigInt::one())
    } else {
        (num, pow10((-e) as u32))
    })
}

impl fmt::Display for CertifiedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sig = f.precision().unwrap_or(20);
        write!(
            f,
            "{} ± {}",
            self.center_decimal(sig),
            sci_string(&self.rad, self.bits(), 2, Rounding::Ceil)
        )
    }
}

impl Neg for &CertifiedReal {
    type Output = CertifiedReal;
    fn neg(self) -> CertifiedReal {
        CertifiedReal::raw(-&self.mid, self.rad.clone(), self.ctx)
    }
}

impl Neg for CertifiedReal {
    type Output = CertifiedReal;
    fn neg(self) -> CertifiedReal {
        CertifiedReal::raw(-self.mid, self.rad, self.ctx)
    }
}

impl Add for &CertifiedReal {
    type Output = CertifiedReal;
    fn add(self, rhs: &CertifiedReal) -> CertifiedReal {
        let (a, b) = self.aligned(rhs);
        CertifiedReal::raw(a.mid + b.mid, a.rad + b.rad, a.ctx)
    }
}

impl Sub for &CertifiedReal {
    type Output = CertifiedReal;
    fn sub(self, rhs: &CertifiedReal) -> CertifiedReal {
        let (a, b) = self.aligned(rhs);
        CertifiedReal::raw(a.mid - b.mid, a.rad + b.rad, a.ctx)
    }
}

impl Mul for &CertifiedReal {
    type Output = CertifiedReal;
    fn mul(self, rhs: &CertifiedReal) -> CertifiedReal {
        let (a, b) = self.aligned(rhs);
        let p = a.bits();
        let (mid, inexact) = round_shift(&(&a.mid * &b.mid), p);
        let err = a.mid.abs() * &b.rad + b.mid.abs() * &a.rad + &a.rad * &b.rad;
        let rad = ceil_shift(&err, p) + u32::from(inexact);
        CertifiedReal::raw(mid, rad, a.ctx)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for CertifiedReal {
            type Output = CertifiedReal;
            fn $m(self, rhs: CertifiedReal) -> CertifiedReal {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&CertifiedReal> for CertifiedReal {
            type Output = CertifiedReal;
            fn $m(self, rhs: &CertifiedReal) -> CertifiedReal {
                (&self).$m(rhs)
            }
        }
        impl $tr<CertifiedReal> for &CertifiedReal {
            type Output = CertifiedReal;
            fn $m(self, rhs: CertifiedReal) -> CertifiedReal {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// √2 enclosed at `ctx`.
pub fn sqrt2(ctx: PrecisionContext) -> CertifiedReal {
    CertifiedReal::from_integer(2, ctx).sqrt().expect("2 is positive")
}

/// γ = 1 + √2, the dominant root of x² − 2x − 1.
pub fn gamma(ctx: PrecisionContext) -> CertifiedReal {
    sqrt2(ctx) + CertifiedReal::one(ctx)
}

/// ln 2 enclosed at `ctx`.
pub fn ln2(ctx: PrecisionContext) -> CertifiedReal {
    let (lo, hi) = log::ln2_bounds(ctx.bits());
    CertifiedReal::from_ulp_bounds(lo, hi, ctx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(d: u32) -> PrecisionContext {
        PrecisionContext::new(d).unwrap()
    }

    fn dec(s: &str, d: u32) -> CertifiedReal {
        CertifiedReal::from_decimal(s, ctx(d)).unwrap()
    }

    #[test]
    fn context_rejects_low_precision() {
        assert_eq!(PrecisionContext::new(29), Err(Error::InvalidPrecision(29)));
        assert!(PrecisionContext::new(30).is_ok());
    }

    #[test]
    fn constants_exactness() {
        let half = CertifiedReal::from_ratio(1, 2, ctx(50));
        assert!(half.is_exact());
        assert_eq!(half.to_f64(), 0.5);

        let third = CertifiedReal::from_ratio(1, 3, ctx(50));
        assert!(!third.is_exact());
        assert!(third.contains_ratio(&BigInt::from(1), &BigInt::from(3)));
        assert!(third.radius_f64() <= 1e-50);

        let big = dec("2e162", 200);
        assert!(big.is_exact());
        assert_eq!(big.floor_lower(), BigInt::from(2) * pow10(162));
    }

    #[test]
    fn decimal_parsing() {
        assert_eq!(parse_decimal("3.83e13").unwrap(), (BigInt::from(38_300_000_000_000i64), BigInt::one()));
        assert_eq!(parse_decimal("-1.4").unwrap(), (BigInt::from(-14), BigInt::from(10)));
        assert_eq!(parse_decimal(".5").unwrap(), (BigInt::from(5), BigInt::from(10)));
        assert!(parse_decimal("1.2.3").is_err());
        assert!(parse_decimal("abc").is_err());
        assert!(parse_decimal("").is_err());
    }

    #[test]
    fn sqrt2_and_gamma() {
        let c = ctx(30);
        let s = sqrt2(c);
        let sq = &s * &s - CertifiedReal::from_integer(2, c);
        assert!(sq.contains_zero());
        // |s² − 2| is bounded by roughly 2·√2·radius
        assert!(sq.abs_tight().upper_ulps() <= s.radius_ulps() * 4 + 2);

        let g = gamma(c);
        assert!(g.radius_f64() <= 1e-28);
        let oracle = newton_gamma_oracle();
        assert!(g.overlaps(&CertifiedReal::from_decimal(&oracle, c).unwrap().with_context(c)));
        let lhs = g.square();
        let rhs = g.mul_int(&BigInt::from(2)) + CertifiedReal::one(c);
        assert!((lhs - rhs).contains_zero());
    }

    /// Newton on x² − 2x − 1 over exact rationals, printed to 40 digits.
    fn newton_gamma_oracle() -> String {
        let mut num = BigInt::from(5);
        let mut den = BigInt::from(2);
        for _ in 0..8 {
            // x ← x − (x² − 2x − 1)/(2x − 2) = (x² + 1)/(2x − 2)
            let n2 = &num * &num + &den * &den;
            let d2 = (&num - &den) * &den * 2;
            num = n2;
            den = d2;
        }
        let scaled = num * pow10(40) / den;
        let s = scaled.to_string();
        format!("{}.{}", &s[..1], &s[1..])
    }

    #[test]
    fn ln_values() {
        let c = ctx(30);
        let z = CertifiedReal::one(c).ln().unwrap();
        assert!(z.contains_zero());
        assert!(z.radius_f64() < 1e-28);

        let l2 = CertifiedReal::from_integer(2, c).ln().unwrap();
        assert!(l2.overlaps(&dec("0.693147180559945309417232121458176568", 40)));
        assert!(l2.radius_f64() <= 1e-28);

        let lg = gamma(c).ln().unwrap();
        assert!(lg.overlaps(&dec("0.881373587019543025232609324979792309", 40)));
        assert!(lg.radius_f64() <= 1e-28);

        assert!(ln2(c).overlaps(&l2));
        assert_eq!(CertifiedReal::zero(c).ln(), Err(Error::NonPositiveInput));
        assert_eq!(CertifiedReal::from_integer(-3, c).ln(), Err(Error::NonPositiveInput));
    }

    #[test]
    fn ln_against_series_oracle() {
        // ln(x) via the plain Mercator series of ln(1 + t) in exact rationals
        // for t = 1/10, truncated with a bounded tail.
        let c = ctx(40);
        let x = CertifiedReal::from_ratio(11, 10, c);
        let l = x.ln().unwrap();
        let mut acc = 0f64;
        for i in 1..40 {
            let t = 0.1f64.powi(i) / i as f64;
            acc += if i % 2 == 1 { t } else { -t };
        }
        assert!((l.to_f64() - acc).abs() < 1e-15);
        assert!((l.to_f64() - 1.1f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn ln_of_large_and_small_values() {
        let c = ctx(60);
        let big = dec("2.6e15", 60).ln().unwrap();
        assert!((big.to_f64() - 2.6e15f64.ln()).abs() < 1e-12);
        let small = dec("3e-20", 60).ln().unwrap();
        assert!((small.to_f64() - 3e-20f64.ln()).abs() < 1e-12);
        assert!(small.radius_f64() < 1e-40);
        let _ = c;
    }

    #[test]
    fn division_and_powers() {
        let c = ctx(40);
        let a = CertifiedReal::from_integer(7, c);
        let b = CertifiedReal::from_integer(3, c);
        let q = a.checked_div(&b).unwrap();
        assert!(q.contains_ratio(&BigInt::from(7), &BigInt::from(3)));
        assert_eq!(
            a.checked_div(&CertifiedReal::zero(c)),
            Err(Error::DivisionByZero)
        );
        let p = b.powi(5).unwrap();
        assert!(p.is_exact());
        assert_eq!(p.floor_lower(), BigInt::from(243));
        let inv = b.powi(-2).unwrap();
        assert!(inv.contains_ratio(&BigInt::from(1), &BigInt::from(9)));
        let h = a.div_int(&BigInt::from(-2));
        assert!(h.contains_ratio(&BigInt::from(-7), &BigInt::from(2)));
    }

    #[test]
    fn rounding_helpers() {
        let c = ctx(30);
        let x = CertifiedReal::from_ratio(7, 2, c);
        assert_eq!(x.floor_exact(), Some(BigInt::from(3)));
        assert_eq!(x.ceil_upper(), BigInt::from(4));
        let n = CertifiedReal::from_ratio(-7, 2, c);
        assert_eq!(n.floor_exact(), Some(BigInt::from(-4)));
        assert_eq!(CertifiedReal::from_integer(5, c).ceil_upper(), BigInt::from(5));
    }

    #[test]
    fn printing_is_directional() {
        let c = ctx(30);
        let third = CertifiedReal::from_ratio(1, 3, c);
        assert_eq!(third.lower_decimal(5), "3.3333e-1");
        assert_eq!(third.upper_decimal(5), "3.3334e-1");
        assert_eq!(CertifiedReal::from_integer(-250, c).center_decimal(3), "-2.5e2");
        assert_eq!(dec("2e162", 200).upper_decimal(4), "2e162");
    }

    #[test]
    fn escalation_retries_then_gives_up() {
        let mut seen = Vec::new();
        let r: Result<u32> = with_escalation(ctx(30), 2, |c| {
            seen.push(c.digits());
            if c.digits() >= 120 {
                Ok(c.digits())
            } else {
                Err(Error::IntervalTooWide("x".into()))
            }
        });
        assert_eq!(r, Ok(120));
        assert_eq!(seen, vec![30, 60, 120]);
        let r: Result<u32> = with_escalation(ctx(30), 1, |_| Err(Error::IntervalTooWide("x".into())));
        assert!(matches!(r, Err(Error::PrecisionExhausted(_))));
    }

    #[test]
    fn coarsening_keeps_enclosure() {
        let fine = gamma(ctx(80));
        let coarse = fine.with_context(ctx(30));
        assert!(coarse.encloses(&fine));
    }
}
