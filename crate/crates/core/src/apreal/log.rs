//! Rigorous natural logarithms of dyadic rationals.
//!
//! `ln v = 2 atanh((m - 1)/(m + 1)) + e ln 2` with `v = m 2^e` and
//! `m ∈ [3/4, 3/2)`, so the atanh argument stays below 1/5 in magnitude.
//! Every truncation and rounding step is charged to an explicit error
//! counter in units of the working precision.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::pow2;

fn guard_bits(p: u32) -> u32 {
    48 + (32 - p.leading_zeros())
}

/// atanh(y / 2^wp) for |y| <= 2^wp / 5. Returns (approximation, error bound).
fn atanh_series(y: &BigInt, wp: u32) -> (BigInt, BigInt) {
    let w = wp as usize;
    let y2 = (y * y) >> w;
    let mut t = y.clone();
    let mut sum = y.clone();
    let mut terms: u64 = 0;
    let mut i: u64 = 1;
    loop {
        t = (&t * &y2) >> w;
        if t.is_zero() || t == BigInt::from(-1) {
            break;
        }
        sum += t.div_floor(&BigInt::from(2 * i + 1));
        terms += 1;
        i += 1;
    }
    // per-step error on t grows by < 2 ulps; each term adds < 2 ulps and the
    // dropped tail is bounded by the last error on t
    (sum, BigInt::from(6 * (terms + 2)))
}

/// atanh(1/n) at `wp` fraction bits, n >= 2.
fn atanh_inv(n: u64, wp: u32) -> (BigInt, BigInt) {
    let n = BigInt::from(n);
    let n2 = &n * &n;
    let mut power = pow2(wp) / &n;
    let mut sum = power.clone();
    let mut terms: u64 = 0;
    let mut i: u64 = 1;
    loop {
        power = &power / &n2;
        if power.is_zero() {
            break;
        }
        sum += &power / BigInt::from(2 * i + 1);
        terms += 1;
        i += 1;
    }
    (sum, BigInt::from(3 * terms + 6))
}

/// ln 2 = 18 atanh(1/26) − 2 atanh(1/4801) + 8 atanh(1/8749).
fn ln2_fixed(wp: u32) -> (BigInt, BigInt) {
    let (a, ea) = atanh_inv(26, wp);
    let (b, eb) = atanh_inv(4801, wp);
    let (c, ec) = atanh_inv(8749, wp);
    let v = a * 18 - b * 2 + c * 8;
    let e = ea * 18 + eb * 2 + ec * 8;
    (v, e)
}

fn outward(approx: &BigInt, err: &BigInt, guard: u32) -> (BigInt, BigInt) {
    let g = pow2(guard);
    let lo = (approx - err).div_floor(&g);
    let hi = (approx + err).div_ceil(&g);
    (lo, hi)
}

/// Lower and upper bounds (in ulps of 2^-p) for ln 2.
pub(super) fn ln2_bounds(p: u32) -> (BigInt, BigInt) {
    let guard = guard_bits(p);
    let (v, e) = ln2_fixed(p + guard);
    outward(&v, &e, guard)
}

/// Lower and upper bounds (in ulps of 2^-p) for ln(n / 2^p), n > 0.
pub(super) fn ln_bounds(n: &BigInt, p: u32) -> (BigInt, BigInt) {
    debug_assert!(n.is_positive());
    let guard = guard_bits(p);
    let wp = p + guard;
    // 2^s <= n < 2^(s+1)
    let mut s = n.bits() - 1;
    if n * 2 >= pow2(s as u32) * 3 {
        s += 1;
    }
    let e = s as i64 - p as i64;
    let base = pow2(s as u32);
    let num = n - &base;
    let den = n + &base;
    let y = (num << wp as usize).div_floor(&den);
    let (at, err_at) = atanh_series(&y, wp);
    let mut approx = at * 2;
    let mut err = err_at * 2 + 3;
    if e != 0 {
        let (l2, err2) = ln2_fixed(wp);
        approx += l2 * e;
        err += err2 * e.unsigned_abs();
    }
    outward(&approx, &err, guard)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln2_matches_reference_digits() {
        let p = 200;
        let (lo, hi) = ln2_bounds(p);
        assert!(&hi - &lo <= BigInt::from(4));
        let approx = super::super::ulps_to_f64(&lo, p);
        assert!((approx - std::f64::consts::LN_2).abs() < 1e-16);
    }

    #[test]
    fn ln_of_powers_of_two_is_multiple_of_ln2() {
        let p = 120;
        let n = pow2(p + 10);
        let (lo, hi) = ln_bounds(&n, p);
        let (l2lo, l2hi) = ln2_bounds(p);
        assert!(lo <= &l2hi * 10 && &l2lo * 10 <= hi);
    }

    #[test]
    fn atanh_small_argument() {
        let wp = 100;
        let y = pow2(wp) / 7;
        let (v, e) = atanh_series(&y, wp);
        let approx = super::super::ulps_to_f64(&v, wp);
        assert!((approx - (1.0f64 / 7.0).atanh()).abs() < 1e-15);
        assert!(e < BigInt::from(1000));
    }
}
