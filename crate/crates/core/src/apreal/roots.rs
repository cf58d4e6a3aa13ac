//! Roots of Ψ_k(z) = z^k − z^(k−1) − ⋯ − z − 1.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{pow2, CertifiedComplex, CertifiedReal, PrecisionContext};
use crate::error::{Error, Result};

/// Ψ_k with exact integer coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacteristicPolynomial {
    k: u32,
    coefficients: Vec<BigInt>,
}

impl CharacteristicPolynomial {
    pub fn new(k: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::DomainError(format!("k must be at least 2, got {k}")));
        }
        let mut coefficients = vec![BigInt::from(-1); k as usize];
        coefficients.push(BigInt::one());
        Ok(Self { k, coefficients })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coefficients
    }

    pub fn eval(&self, z: &CertifiedReal) -> CertifiedReal {
        let ctx = z.context();
        self.coefficients
            .iter()
            .rev()
            .fold(CertifiedReal::zero(ctx), |acc, c| &acc * z + CertifiedReal::from_integer(c.clone(), ctx))
    }

    pub fn eval_complex(&self, z: &CertifiedComplex) -> CertifiedComplex {
        let ctx = z.re.context();
        self.coefficients.iter().rev().fold(CertifiedComplex::from_integer(0, ctx), |acc, c| {
            let prod = &acc * z;
            CertifiedComplex::new(prod.re + CertifiedReal::from_integer(c.clone(), ctx), prod.im)
        })
    }
}

/// g(z) = (z − 1)Ψ_k(z) = z^k (z − 2) + 1, which has the same sign as Ψ_k for z > 1.
fn shifted(k: u32, z: &CertifiedReal) -> CertifiedReal {
    let ctx = z.context();
    let zk = z.powi(k as i64).expect("nonnegative exponent");
    zk * (z - &CertifiedReal::from_integer(2, ctx)) + CertifiedReal::one(ctx)
}

fn shifted_derivative(k: u32, z: &CertifiedReal) -> CertifiedReal {
    let zk1 = z.powi(k as i64 - 1).expect("nonnegative exponent");
    let zk = &zk1 * z;
    zk.mul_int(&BigInt::from(k + 1)) - zk1.mul_int(&BigInt::from(2 * k))
}

fn sign_at(k: u32, z: &BigInt, ctx: PrecisionContext) -> Option<Ordering> {
    let v = shifted(k, &CertifiedReal::raw(z.clone(), BigInt::zero(), ctx));
    if v.is_positive() {
        Some(Ordering::Greater)
    } else if v.is_negative() {
        Some(Ordering::Less)
    } else {
        None
    }
}

/// The dominant root α(k) of Ψ_k, certified inside (2(1 − 2^−k), 2).
///
/// Bisects from the known bracket until it is narrower than 2^−10, polishes
/// with Newton steps and certifies the final enclosure by sign changes of
/// z^k(z − 2) + 1. The result carries `k + 64` bits more than `ctx` so that
/// the distance of α(k) to 2 (about 2^−k) stays resolvable.
pub fn dominant_root(k: u32, ctx: PrecisionContext) -> Result<CertifiedReal> {
    if k < 2 {
        return Err(Error::DomainError(format!("k must be at least 2, got {k}")));
    }
    let wctx = ctx.with_extra_bits(k + 64);
    let p = wctx.bits();
    let lower_bracket = pow2(p + 1) - pow2(p + 1 - k);
    let upper_bracket = pow2(p + 1);
    if sign_at(k, &lower_bracket, wctx) != Some(Ordering::Less) {
        return Err(Error::PrecisionExhausted(format!("cannot certify Ψ_{k} < 0 at the lower bracket")));
    }
    let mut lo = lower_bracket.clone();
    let mut hi = upper_bracket.clone();
    let coarse = pow2(p - 10);
    while &hi - &lo > coarse {
        let mid: BigInt = (&lo + &hi) >> 1usize;
        match sign_at(k, &mid, wctx) {
            Some(Ordering::Less) => lo = mid,
            Some(_) => hi = mid,
            None => break,
        }
    }

    let mut z = CertifiedReal::raw((&lo + &hi) >> 1usize, BigInt::zero(), wctx);
    let tiny = pow2(16);
    for _ in 0..200 {
        let step = match shifted(k, &z).checked_div(&shifted_derivative(k, &z)) {
            Ok(s) => s.mid,
            Err(_) => break,
        };
        let next = (&z.mid - &step).clamp(lo.clone(), hi.clone());
        z = CertifiedReal::raw(next, BigInt::zero(), wctx);
        if step.abs() < tiny {
            break;
        }
    }

    let delta = pow2(24);
    let a = &z.mid - &delta;
    let b = &z.mid + &delta;
    let certified = a > lower_bracket
        && b < upper_bracket
        && sign_at(k, &a, wctx) == Some(Ordering::Less)
        && sign_at(k, &b, wctx) == Some(Ordering::Greater);
    if certified {
        return Ok(CertifiedReal::from_ulp_bounds(a, b, wctx));
    }

    // Newton did not land where it could be certified: finish by bisection.
    while &hi - &lo > delta {
        let mid: BigInt = (&lo + &hi) >> 1usize;
        match sign_at(k, &mid, wctx) {
            Some(Ordering::Less) => lo = mid,
            Some(_) => hi = mid,
            None => break,
        }
    }
    if lo == lower_bracket || hi == upper_bracket {
        return Err(Error::PrecisionExhausted(format!("root of Ψ_{k} not isolated inside its bracket")));
    }
    Ok(CertifiedReal::from_ulp_bounds(lo, hi, wctx))
}

/// f_k(α) = (α − 1)/(2 + (k + 1)(α − 2)), certified inside (1/2, 3/4).
pub fn f_k_at(k: u32, alpha: &CertifiedReal) -> Result<CertifiedReal> {
    let ctx = alpha.context();
    let one = CertifiedReal::one(ctx);
    let two = CertifiedReal::from_integer(2, ctx);
    let den = &two + &(alpha - &two).mul_int(&BigInt::from(k + 1));
    let v = (alpha - &one).checked_div(&den).map_err(|_| {
        Error::IntervalTooWide(format!("denominator of f_{k}(α) not separated from zero"))
    })?;
    let half = CertifiedReal::from_ratio(1, 2, ctx);
    let three_quarters = CertifiedReal::from_ratio(3, 4, ctx);
    if !(half.certainly_lt(&v) && v.certainly_lt(&three_quarters)) {
        return Err(Error::IntervalTooWide(format!("cannot certify 1/2 < f_{k}(α) < 3/4")));
    }
    Ok(v)
}

#[derive(Clone, Copy, Debug)]
struct C64 {
    re: f64,
    im: f64,
}

impl C64 {
    fn mul(self, o: C64) -> C64 {
        C64 { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }
    fn sub(self, o: C64) -> C64 {
        C64 { re: self.re - o.re, im: self.im - o.im }
    }
    fn div(self, o: C64) -> C64 {
        let d = o.re * o.re + o.im * o.im;
        C64 { re: (self.re * o.re + self.im * o.im) / d, im: (self.im * o.re - self.re * o.im) / d }
    }
    fn norm(self) -> f64 {
        self.re.hypot(self.im)
    }
}

/// Durand–Kerner approximations of all roots of Ψ_k.
fn approximate_roots(k: u32) -> Vec<C64> {
    let n = k as usize;
    let eval = |z: C64| {
        let mut acc = C64 { re: 1.0, im: 0.0 };
        for _ in 0..n {
            acc = acc.mul(z).sub(C64 { re: 1.0, im: 0.0 });
        }
        acc
    };
    let seed = C64 { re: 0.4, im: 0.9 };
    let mut z: Vec<C64> = Vec::with_capacity(n);
    let mut cur = C64 { re: 1.0, im: 0.0 };
    for _ in 0..n {
        z.push(cur);
        cur = cur.mul(seed);
    }
    for _ in 0..2000 {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let mut den = C64 { re: 1.0, im: 0.0 };
            for j in 0..n {
                if i != j {
                    den = den.mul(z[i].sub(z[j]));
                }
            }
            let step = eval(z[i]).div(den);
            z[i] = z[i].sub(step);
            max_step = max_step.max(step.norm());
        }
        if max_step < 1e-17 {
            break;
        }
    }
    z
}

fn exact_f64(x: f64, ctx: PrecisionContext) -> CertifiedReal {
    if x == 0.0 {
        return CertifiedReal::zero(ctx);
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1 } else { 1 };
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mant, e) = if exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp - 1075) };
    let v = CertifiedReal::from_integer(BigInt::from(sign) * BigInt::from(mant), ctx);
    v.mul_pow2(e)
}

/// All k roots of Ψ_k with certified enclosures, dominant root first.
///
/// Approximations come from Durand–Kerner; each one is then wrapped in the
/// disk of radius k·|Ψ_k(z_i) / ∏_{j≠i}(z_i − z_j)|. When these disks are
/// pairwise disjoint every disk holds exactly one root.
pub fn all_roots(k: u32, ctx: PrecisionContext) -> Result<Vec<CertifiedComplex>> {
    let poly = CharacteristicPolynomial::new(k)?;
    let mut approx = approximate_roots(k);
    approx.sort_by(|a, b| b.norm().total_cmp(&a.norm()).then(a.re.total_cmp(&b.re)).then(a.im.total_cmp(&b.im)));

    let centers: Vec<CertifiedComplex> = approx
        .iter()
        .map(|z| CertifiedComplex::new(exact_f64(z.re, ctx), exact_f64(z.im, ctx)))
        .collect();
    let kk = CertifiedReal::from_integer(k, ctx);
    let mut radii = Vec::with_capacity(centers.len());
    for (i, zi) in centers.iter().enumerate() {
        let mut prod = CertifiedComplex::from_integer(1, ctx);
        for (j, zj) in centers.iter().enumerate() {
            if i != j {
                prod = &prod * &(zi - zj);
            }
        }
        let rho = (&kk * &poly.eval_complex(zi).abs())
            .checked_div(&prod.abs())
            .map_err(|_| Error::PrecisionExhausted(format!("coincident root approximations for k = {k}")))?;
        radii.push(CertifiedReal::from_ulp_bounds(rho.upper_ulps(), rho.upper_ulps(), ctx));
    }
    for i in 0..centers.len() {
        for j in i + 1..centers.len() {
            let dist = (&centers[i] - &centers[j]).abs();
            if !(&radii[i] + &radii[j]).certainly_lt(&dist) {
                return Err(Error::PrecisionExhausted(format!("roots of Ψ_{k} not separated")));
            }
        }
    }

    let one = CertifiedReal::one(ctx);
    for (i, (z, r)) in centers.iter().zip(&radii).enumerate() {
        let m = z.abs();
        let outside = (&m - r).certainly_gt(&one);
        let inside = (&m + r).certainly_lt(&one);
        if (i == 0 && !outside) || (i > 0 && !inside) {
            return Err(Error::PrecisionExhausted(format!("cannot place root {i} of Ψ_{k} relative to the unit circle")));
        }
    }

    Ok(centers
        .into_iter()
        .zip(radii)
        .map(|(z, r)| {
            let widen = |x: &CertifiedReal| CertifiedReal::from_ulp_bounds(x.lower_ulps() - r.upper_ulps(), x.upper_ulps() + r.upper_ulps(), ctx);
            CertifiedComplex::new(widen(&z.re), widen(&z.im))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(d: u32) -> PrecisionContext {
        PrecisionContext::new(d).unwrap()
    }

    /// Plain bisection on Ψ_k in f64 over [1.5, 2].
    fn bisect_oracle(k: i32) -> f64 {
        let psi = |z: f64| z.powi(k) - (0..k).map(|i| z.powi(i)).sum::<f64>();
        let (mut lo, mut hi) = (1.5f64, 2.0f64);
        for _ in 0..100 {
            let m = 0.5 * (lo + hi);
            if psi(m) < 0.0 {
                lo = m
            } else {
                hi = m
            }
        }
        lo
    }

    #[test]
    fn polynomial_shape() {
        let p = CharacteristicPolynomial::new(4).unwrap();
        assert_eq!(p.degree(), 4);
        assert_eq!(p.coefficients().last(), Some(&BigInt::one()));
        assert!(p.coefficients()[..4].iter().all(|c| *c == BigInt::from(-1)));
        assert!(CharacteristicPolynomial::new(1).is_err());
    }

    #[test]
    fn golden_ratio() {
        let c = ctx(40);
        let a = dominant_root(2, c).unwrap();
        let phi = (CertifiedReal::from_integer(5, c).sqrt().unwrap() + CertifiedReal::one(c)).div_int(&BigInt::from(2));
        assert!(a.overlaps(&phi));
        assert!(a.radius_f64() < 1e-36);
    }

    #[test]
    fn tribonacci_constant() {
        let a = dominant_root(3, ctx(30)).unwrap();
        assert!((a.to_f64() - bisect_oracle(3)).abs() < 1e-14);
        assert!((a.to_f64() - 1.839_286_755_214_161).abs() < 1e-14);
    }

    #[test]
    fn root_inside_known_bracket() {
        for k in [2u32, 3, 10, 57, 420, 1000] {
            let c = ctx(30);
            let a = dominant_root(k, c).unwrap();
            let fine = a.context();
            let lo = CertifiedReal::from_integer(2, fine) - CertifiedReal::one(fine).mul_pow2(1 - k as i64);
            assert!(lo.certainly_lt(&a), "k={k}");
            assert!(a.certainly_lt(&CertifiedReal::from_integer(2, c)), "k={k}");
            assert!(a.radius_f64() <= 1e-26, "k={k}");
            assert!(CharacteristicPolynomial::new(k).unwrap().eval(&a).contains_zero(), "k={k}");
        }
        let a10 = dominant_root(10, ctx(30)).unwrap();
        assert!(CertifiedReal::from_decimal("1.998046875", ctx(30)).unwrap().certainly_lt(&a10));
    }

    #[test]
    fn f_k_values() {
        let c = ctx(40);
        let f2 = f_k_at(2, &dominant_root(2, c).unwrap()).unwrap();
        // (φ − 1)/(2 + 3(φ − 2)) = 1/2 + √5/10
        let closed = CertifiedReal::from_ratio(1, 2, c)
            + CertifiedReal::from_integer(5, c).sqrt().unwrap().div_int(&BigInt::from(10));
        assert!(f2.overlaps(&closed));
        assert!((f2.to_f64() - 0.723_606_797_7).abs() < 1e-10);

        let a3 = bisect_oracle(3);
        let f3 = f_k_at(3, &dominant_root(3, c).unwrap()).unwrap();
        assert!((f3.to_f64() - (a3 - 1.0) / (2.0 + 4.0 * (a3 - 2.0))).abs() < 1e-12);
        assert!((f3.to_f64() - 0.618_419_9).abs() < 1e-7);
    }

    #[test]
    fn f_k_bounds_for_many_k() {
        let c = ctx(30);
        for k in 2..=1000u32 {
            let a = dominant_root(k, c).unwrap();
            assert!(f_k_at(k, &a).is_ok(), "k={k}");
        }
    }

    #[test]
    fn roots_for_small_k() {
        let c = ctx(30);
        let r2 = all_roots(2, c).unwrap();
        assert_eq!(r2.len(), 2);
        let s5 = CertifiedReal::from_integer(5, c).sqrt().unwrap();
        let phi = (&s5 + &CertifiedReal::one(c)).div_int(&BigInt::from(2));
        let psi = (CertifiedReal::one(c) - s5).div_int(&BigInt::from(2));
        assert!(r2[0].re.overlaps(&phi) && r2[0].im.contains_zero());
        assert!(r2[1].re.overlaps(&psi) && r2[1].im.contains_zero());

        let r3 = all_roots(3, c).unwrap();
        assert!((r3[0].re.to_f64() - 1.8393).abs() < 1e-4);
        for z in &r3[1..] {
            assert!((z.abs().to_f64() - 0.7374).abs() < 1e-4);
        }
    }

    #[test]
    fn roots_match_coefficients() {
        let c = ctx(30);
        for k in 2..=30u32 {
            let roots = all_roots(k, c).unwrap();
            let sum = roots.iter().fold(CertifiedComplex::from_integer(0, c), |acc, z| &acc + z);
            assert!(sum.re.overlaps(&CertifiedReal::one(c)) && sum.im.contains_zero(), "k={k}");
            let prod = roots.iter().fold(CertifiedComplex::from_integer(1, c), |acc, z| &acc * z);
            let expected = if k % 2 == 1 { 1 } else { -1 };
            assert!(prod.re.overlaps(&CertifiedReal::from_integer(expected, c)), "k={k}");
            assert!(dominant_root(k, c).unwrap().overlaps(&roots[0].re));
        }
    }

    #[test]
    fn conjugate_values_of_f_k_are_small() {
        let c = ctx(30);
        let one = CertifiedReal::one(c);
        for k in 2..=30u32 {
            for z in &all_roots(k, c).unwrap()[1..] {
                let num = z - &CertifiedComplex::from_integer(1, c);
                let shift = z - &CertifiedComplex::from_integer(2, c);
                let den = &CertifiedComplex::from_integer(2, c) + &shift.scale(&CertifiedReal::from_integer(k + 1, c));
                let f = num.checked_div(&den).unwrap();
                assert!(f.abs().certainly_lt(&one), "k={k}");
            }
        }
    }
}
