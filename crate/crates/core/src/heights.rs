//! Logarithmic heights of the algebraic numbers entering the three linear
//! forms. The default path returns the standard upper bounds; the exact
//! evaluator for h(f_k(α)) exists to validate them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::apreal::{all_roots, dominant_root, CertifiedComplex, CertifiedReal, PrecisionContext};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeightSubject {
    Gamma,
    Alpha { k: u32 },
    FkAlpha { k: u32 },
    /// 2√2·f_k(α)²
    TwoSqrt2FkSquared { k: u32 },
    /// 2√2·f_k(α)·F^(k)_m
    TwoSqrt2FkFm { k: u32, m: u64 },
    Two,
    Sqrt2,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightBound {
    pub subject: HeightSubject,
    /// Upper bound for h(subject), or its exact value when `exact` is set.
    pub value: CertifiedReal,
    pub exact: bool,
}

fn ln_int(v: u64, ctx: PrecisionContext) -> CertifiedReal {
    CertifiedReal::from_integer(v, ctx).ln().expect("positive integer")
}

/// h(γ) = (log γ)/2: γ̄ = 1 − √2 lies inside the unit circle and x² − 2x − 1 is monic.
pub fn h_gamma(ctx: PrecisionContext) -> HeightBound {
    let value = crate::apreal::gamma(ctx).ln().expect("γ > 1").div_int(&BigInt::from(2));
    HeightBound { subject: HeightSubject::Gamma, value, exact: true }
}

/// h(α) = (log α)/k, certified below (log 2)/k.
pub fn h_alpha(k: u32, ctx: PrecisionContext) -> Result<HeightBound> {
    // 2 − α is about 2^(−k), so the comparison runs at the root's own precision
    let alpha = dominant_root(k, ctx)?;
    let fine = alpha.context();
    let value = alpha.ln()?.div_int(&BigInt::from(k));
    let cap = ln_int(2, fine).div_int(&BigInt::from(k));
    if !value.certainly_lt(&cap) {
        return Err(Error::IntervalTooWide(format!("h(α({k})) < (log 2)/{k} not certified")));
    }
    Ok(HeightBound { subject: HeightSubject::Alpha { k }, value: value.with_context(ctx), exact: true })
}

/// The standard bound h(f_k(α)) < 2 log k.
pub fn h_fk_bound(k: u32, ctx: PrecisionContext) -> Result<HeightBound> {
    if k < 2 {
        return Err(Error::DomainError(format!("k must be at least 2, got {k}")));
    }
    let value = ln_int(k as u64, ctx).mul_int(&BigInt::from(2));
    Ok(HeightBound { subject: HeightSubject::FkAlpha { k }, value, exact: false })
}

/// h(2) = log 2.
pub fn h_two(ctx: PrecisionContext) -> HeightBound {
    HeightBound { subject: HeightSubject::Two, value: ln_int(2, ctx), exact: true }
}

/// h(√2) = (log 2)/2.
pub fn h_sqrt2(ctx: PrecisionContext) -> HeightBound {
    HeightBound { subject: HeightSubject::Sqrt2, value: ln_int(2, ctx).div_int(&BigInt::from(2)), exact: true }
}

/// h(2√2) = (3 log 2)/2.
fn h_two_sqrt2(ctx: PrecisionContext) -> CertifiedReal {
    ln_int(2, ctx).mul_int(&BigInt::from(3)).div_int(&BigInt::from(2))
}

/// h(2√2 f_k(α)²) ≤ (3 log 2)/2 + 4 log k ≤ 5 log k, valid for k ≥ 3.
///
/// Both links of the chain are certified for the given k; the returned value
/// is 5 log k.
pub fn h_eta3_form1(k: u32, ctx: PrecisionContext) -> Result<HeightBound> {
    if k < 3 {
        return Err(Error::DomainError(format!("the 5 log k chain needs k ≥ 3, got {k}")));
    }
    let log_k = ln_int(k as u64, ctx);
    let chain = h_two_sqrt2(ctx) + log_k.mul_int(&BigInt::from(4));
    let value = log_k.mul_int(&BigInt::from(5));
    if !chain.certainly_le(&value) {
        return Err(Error::IntervalTooWide(format!("(3 log 2)/2 + 4 log {k} ≤ 5 log {k} not certified")));
    }
    Ok(HeightBound { subject: HeightSubject::TwoSqrt2FkSquared { k }, value, exact: false })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Eta3Form2 {
    /// (3 log 2)/2 + 2 log k + (m − 1) log α
    pub bound: HeightBound,
    /// 4×10¹³ k⁴ log²k log n
    pub cap: CertifiedReal,
}

/// Cap on m·log α coming from the first linear form: 3.9×10¹³ k⁴ log²k log n.
pub fn m_log_alpha_cap(k: u32, n: &BigInt, ctx: PrecisionContext) -> Result<CertifiedReal> {
    let log_k = ln_int(k as u64, ctx);
    let log_n = CertifiedReal::from_integer(n.clone(), ctx).ln()?;
    let c = CertifiedReal::from_decimal("3.9e13", ctx)?;
    Ok(c.mul_int(&BigInt::from(k).pow(4)) * log_k.square() * log_n)
}

/// h(2√2 f_k(α) F^(k)_m) < (3 log 2)/2 + 2 log k + (m − 1) log α, together with
/// the coarse cap 4×10¹³ k⁴ log²k log n that holds once m log α respects the
/// first-form cap.
pub fn h_eta3_form2(k: u32, m: u64, n: &BigInt, ctx: PrecisionContext) -> Result<Eta3Form2> {
    if m < 3 || k < 3 {
        return Err(Error::DomainError(format!("need k ≥ 3 and m ≥ 3, got k = {k}, m = {m}")));
    }
    let log_alpha = dominant_root(k, ctx)?.with_context(ctx).ln()?;
    let log_k = ln_int(k as u64, ctx);
    let value = h_two_sqrt2(ctx) + log_k.mul_int(&BigInt::from(2)) + log_alpha.mul_int(&BigInt::from(m - 1));
    let m_cap = m_log_alpha_cap(k, n, ctx)?;
    if !log_alpha.mul_int(&BigInt::from(m)).certainly_lt(&m_cap) {
        return Err(Error::DomainError(format!("m = {m} violates m log α < 3.9e13 k⁴ log²k log n")));
    }
    let log_n = CertifiedReal::from_integer(n.clone(), ctx).ln()?;
    let cap = CertifiedReal::from_decimal("4e13", ctx)?.mul_int(&BigInt::from(k).pow(4)) * log_k.square() * log_n;
    if !value.certainly_lt(&cap) {
        return Err(Error::IntervalTooWide(format!("h(η₃) < 4e13 k⁴ log²k log n not certified at k = {k}")));
    }
    Ok(Eta3Form2 {
        bound: HeightBound { subject: HeightSubject::TwoSqrt2FkFm { k, m }, value, exact: false },
        cap,
    })
}

/// h(p/q) = log max(|p|, q) for p/q in lowest terms.
pub fn h_rational(p: &BigInt, q: &BigInt, ctx: PrecisionContext) -> Result<CertifiedReal> {
    if q.is_zero() {
        return Err(Error::DomainError("zero denominator".into()));
    }
    if p.is_zero() {
        return Ok(CertifiedReal::zero(ctx));
    }
    let g = p.gcd(q);
    let (p, q) = (p / &g, (q / &g).abs());
    CertifiedReal::from_integer(p.abs().max(q), ctx).ln()
}

type Poly = Vec<BigInt>;

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_pow(a: &Poly, e: u32) -> Poly {
    (0..e).fold(vec![BigInt::one()], |acc, _| poly_mul(&acc, a))
}

/// Minimal primitive polynomial of f_k(α), lowest degree first, positive
/// leading coefficient.
///
/// Inverting β = f_k(z) gives z = (2kβ − 1)/((k + 1)β − 1); clearing
/// denominators in Ψ_k(z) = 0 yields a degree-k integer polynomial in β, which
/// is irreducible because β generates the same degree-k field as α.
pub fn fk_minimal_polynomial(k: u32) -> Result<Vec<BigInt>> {
    if k < 2 {
        return Err(Error::DomainError(format!("k must be at least 2, got {k}")));
    }
    let num: Poly = vec![BigInt::from(-1), BigInt::from(2 * k)];
    let den: Poly = vec![BigInt::from(-1), BigInt::from(k + 1)];
    let mut q = poly_pow(&num, k);
    for j in 0..k {
        let term = poly_mul(&poly_pow(&num, j), &poly_pow(&den, k - j));
        for (i, c) in term.into_iter().enumerate() {
            q[i] -= c;
        }
    }
    let content = q.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    let sign = if q.last().is_some_and(|c| c.is_negative()) { -1 } else { 1 };
    Ok(q.into_iter().map(|c| c / &content * sign).collect())
}

/// Exact h(f_k(α)) from the minimal polynomial and all conjugates
/// f_k(α_i). Needs the certified complex roots of Ψ_k.
pub fn exact_height_fk(k: u32, ctx: PrecisionContext) -> Result<CertifiedReal> {
    let poly = fk_minimal_polynomial(k)?;
    let lead = poly.last().expect("degree k").clone();
    let one = CertifiedReal::one(ctx);
    let mut total = CertifiedReal::from_integer(lead, ctx).ln()?;
    for z in all_roots(k, ctx)? {
        let num = &z - &CertifiedComplex::from_integer(1, ctx);
        let shift = &z - &CertifiedComplex::from_integer(2, ctx);
        let den = &CertifiedComplex::from_integer(2, ctx) + &shift.scale(&CertifiedReal::from_integer(k + 1, ctx));
        let modulus = num.checked_div(&den)?.abs();
        if modulus.certainly_gt(&one) {
            total = total + modulus.ln()?;
        } else if !modulus.certainly_lt(&one) {
            // log max(|β|, 1) ∈ [0, log(upper)]
            let up = CertifiedReal::from_ulp_bounds(modulus.upper_ulps(), modulus.upper_ulps(), ctx).ln()?;
            let top = up.upper_ulps().max(BigInt::zero());
            total = total + CertifiedReal::from_ulp_bounds(BigInt::zero(), top, ctx);
        }
    }
    Ok(total.div_int(&BigInt::from(k)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(30).unwrap()
    }

    #[test]
    fn gamma_height() {
        let h = h_gamma(ctx());
        assert!(h.exact);
        assert!((h.value.to_f64() - 0.440_686_793_5).abs() < 1e-9);
        let twice = h.value.mul_int(&BigInt::from(2));
        assert!(twice.overlaps(&crate::apreal::gamma(ctx()).ln().unwrap()));
    }

    #[test]
    fn gamma_height_from_definition() {
        // x² − 2x − 1: leading coefficient 1, conjugates 1 ± √2
        let c = ctx();
        let s = crate::apreal::sqrt2(c);
        let big = (&s + &CertifiedReal::one(c)).ln().unwrap();
        let small = (&s - &CertifiedReal::one(c)).abs();
        assert!(small.certainly_lt(&CertifiedReal::one(c)));
        assert!(big.div_int(&BigInt::from(2)).overlaps(&h_gamma(c).value));
    }

    #[test]
    fn alpha_heights() {
        let h2 = h_alpha(2, ctx()).unwrap();
        assert!((h2.value.to_f64() - 0.240_605_912_5).abs() < 1e-9);
        let h3 = h_alpha(3, ctx()).unwrap();
        assert!((h3.value.to_f64() - 0.2032).abs() < 1e-4);
        assert!(h3.value.to_f64() < 0.2310);
        let h100 = h_alpha(100, ctx()).unwrap();
        assert!(h100.value.to_f64() < 0.00694);
    }

    #[test]
    fn fk_and_eta3_bounds() {
        assert!((h_fk_bound(3, ctx()).unwrap().value.to_f64() - 2.197_224_577).abs() < 1e-8);
        assert!((h_fk_bound(10, ctx()).unwrap().value.to_f64() - 2.0 * 10f64.ln()).abs() < 1e-12);
        let e = h_eta3_form1(3, ctx()).unwrap();
        assert!((e.value.to_f64() - 5.493_061_443).abs() < 1e-8);
        let chain = 1.5 * 2f64.ln() + 4.0 * 3f64.ln();
        assert!((chain - 5.434).abs() < 1e-3);
        assert!((h_eta3_form1(420, ctx()).unwrap().value.to_f64() - 5.0 * 420f64.ln()).abs() < 1e-10);
        assert!(matches!(h_eta3_form1(2, ctx()), Err(Error::DomainError(_))));
    }

    #[test]
    fn eta3_form2_values() {
        let n = BigInt::from(1000);
        let r = h_eta3_form2(3, 3, &n, ctx()).unwrap();
        assert!((r.bound.value.to_f64() - 4.456).abs() < 1e-3);
        let cap = 4e13 * 81.0 * 3f64.ln().powi(2) * 1000f64.ln();
        assert!((r.cap.to_f64() / cap - 1.0).abs() < 1e-12);
        // h(F_m) = log F_m ≤ (m − 1) log α
        let f = crate::sequences::kfib(3, 3).unwrap();
        let log_f = CertifiedReal::from_integer(BigInt::from(f), ctx()).ln().unwrap();
        let a = dominant_root(3, ctx()).unwrap().with_context(ctx()).ln().unwrap();
        assert!(log_f.certainly_le(&a.mul_int(&BigInt::from(2))));
    }

    #[test]
    fn minimal_polynomial_of_f2() {
        // f₂(φ) = (5 + √5)/10 has minimal polynomial 5β² − 5β + 1
        let p = fk_minimal_polynomial(2).unwrap();
        assert_eq!(p, vec![BigInt::from(1), BigInt::from(-5), BigInt::from(5)]);
        let h = exact_height_fk(2, ctx()).unwrap();
        assert!((h.to_f64() - 5f64.ln() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn minimal_polynomial_vanishes_at_f_k() {
        let c = ctx();
        for k in 2..=12u32 {
            let p = fk_minimal_polynomial(k).unwrap();
            assert_eq!(p.len(), k as usize + 1);
            let beta = crate::apreal::f_k_at(k, &dominant_root(k, c).unwrap()).unwrap();
            let v = p.iter().rev().fold(CertifiedReal::zero(beta.context()), |acc, a| {
                &acc * &beta + CertifiedReal::from_integer(a.clone(), beta.context())
            });
            assert!(v.contains_zero(), "k={k}");
        }
    }

    #[test]
    fn exact_heights_respect_bound() {
        for k in 2..=20u32 {
            let exact = exact_height_fk(k, ctx()).unwrap();
            let bound = h_fk_bound(k, ctx()).unwrap().value;
            assert!(exact.certainly_lt(&bound), "k={k}: {exact} vs {bound}");
        }
    }

    #[test]
    fn rational_heights() {
        let c = ctx();
        let h = h_rational(&BigInt::from(-6), &BigInt::from(4), c).unwrap();
        assert!((h.to_f64() - 3f64.ln()).abs() < 1e-12);
        assert!(h_rational(&BigInt::from(0), &BigInt::from(5), c).unwrap().contains_zero());
        assert!(h_rational(&BigInt::from(1), &BigInt::from(0), c).is_err());
    }
}
