//! Matveev's lower bound for linear forms in logarithms, instantiated for
//! the three forms of the proof, plus the explicit bounds derived from it.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::apreal::{dominant_root, gamma, ln2, CertifiedReal, PrecisionContext};
use crate::error::{Error, Result};
use crate::heights;

fn lit(s: &str, ctx: PrecisionContext) -> CertifiedReal {
    CertifiedReal::from_decimal(s, ctx).expect("valid decimal literal")
}

fn int(v: impl Into<BigInt>, ctx: PrecisionContext) -> CertifiedReal {
    CertifiedReal::from_integer(v, ctx)
}

fn ln_of(v: impl Into<BigInt>, ctx: PrecisionContext) -> Result<CertifiedReal> {
    int(v, ctx).ln()
}

/// Which linear form an instance or bound belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormLabel {
    /// γ^ℓ α^−(n+m−2) (2√2 f_k²)^−1 − 1
    Lambda1,
    /// γ^ℓ α^−(n−1) (2√2 f_k F_m)^−1 − 1
    Lambda2,
    /// γ^ℓ 2^−(n+m−3) √2^−1 − 1
    Lambda3,
    Generic,
}

/// What an Aᵢ must dominate. Since |log η| ≤ [K:Q]·h(η) ≤ D·h(η) for real
/// algebraic η, an upper bound for D·h(ηᵢ) covers both terms.
#[derive(Clone, Debug)]
pub enum Requirement {
    /// Certified upper bound for D·h(ηᵢ); Aᵢ must be certifiably ≥ it.
    Bound(CertifiedReal),
    /// Aᵢ is D·h(ηᵢ) (or D times a height bound) by construction; the
    /// independently recomputed value must agree with Aᵢ.
    Exact(CertifiedReal),
}

#[derive(Clone, Debug)]
pub struct MatveevInstance {
    pub label: FormLabel,
    pub d: u64,
    pub b: BigInt,
    pub a: Vec<CertifiedReal>,
    /// The 0.16 floor is added by the dominance check.
    pub requirements: Vec<Requirement>,
}

impl MatveevInstance {
    pub fn new(
        label: FormLabel,
        d: u64,
        b: BigInt,
        a: Vec<CertifiedReal>,
        requirements: Vec<Requirement>,
    ) -> Result<Self> {
        let inst = Self { label, d, b, a, requirements };
        inst.check()?;
        Ok(inst)
    }

    pub fn t(&self) -> usize {
        self.a.len()
    }

    pub fn check(&self) -> Result<()> {
        if self.a.is_empty() || self.d == 0 || self.b < BigInt::one() {
            return Err(Error::InvalidInstance(format!(
                "need t ≥ 1, D ≥ 1, B ≥ 1 (t = {}, D = {}, B = {})",
                self.a.len(),
                self.d,
                self.b
            )));
        }
        if self.requirements.len() != self.a.len() {
            return Err(Error::InvalidInstance("one requirement per Aᵢ".into()));
        }
        for (i, (a, req)) in self.a.iter().zip(&self.requirements).enumerate() {
            let floor = lit("0.16", a.context());
            let (ok, r) = match req {
                Requirement::Bound(r) => (a.certainly_ge(r), r),
                Requirement::Exact(r) => (a.overlaps(r), r),
            };
            if !a.certainly_ge(&floor) || !ok {
                return Err(Error::InvalidInstance(format!(
                    "A{} = {} does not dominate max(D·h, |log η|, 0.16) with D·h ≤ {}",
                    i + 1,
                    a.center_decimal(6),
                    r.upper_decimal(6)
                )));
            }
        }
        Ok(())
    }
}

/// −1.4·30^(t+3)·t^4.5·D²(1 + log D)(1 + log B)·A₁⋯A_t, a lower bound for
/// log|Λ| whenever Λ ≠ 0 and the field is real.
pub fn matveev_lower(inst: &MatveevInstance) -> Result<CertifiedReal> {
    inst.check()?;
    let ctx = inst.a[0].context();
    let t = inst.t() as u32;
    let one = CertifiedReal::one(ctx);
    let t_pow = int(BigInt::from(t).pow(4), ctx) * int(t, ctx).sqrt()?;
    let mut c = lit("1.4", ctx).mul_int(&BigInt::from(30u32).pow(t + 3)) * t_pow;
    c = c.mul_int(&BigInt::from(inst.d).pow(2));
    c = c * (&one + &ln_of(inst.d, ctx)?);
    c = c * (&one + &int(inst.b.clone(), ctx).ln()?);
    for a in &inst.a {
        c = c * a.clone();
    }
    Ok(-c)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundName {
    E1,
    E2,
    E3,
    E4,
    NOfK,
    EllOfK,
    Absolute,
}

#[derive(Clone, Debug)]
pub struct DerivedBound {
    pub name: BoundName,
    pub k: Option<u64>,
    pub n: Option<BigInt>,
    pub value: CertifiedReal,
    /// The unsimplified Matveev value the bound was compared against.
    pub raw: Option<CertifiedReal>,
}

/// The three simplification inequalities used in E1, E3 and E4:
/// 1 + log 2k ≤ 2.6 log k (k ≥ 3), 1 + log 2n ≤ 2.1 log n (n ≥ 5) and
/// 1 + log 2n ≤ 1.3 log n (n ≥ 420). Each difference c·log x − 1 − log 2x is
/// increasing in x, so checking the boundary point suffices.
pub fn simplification_lemmas_hold() -> bool {
    static HOLDS: OnceLock<bool> = OnceLock::new();
    *HOLDS.get_or_init(|| {
        let ctx = PrecisionContext::new(40).expect("valid");
        let check = |c: &str, x: u64| {
            let lhs = CertifiedReal::one(ctx) + ln_of(2 * x, ctx).expect("positive");
            lhs.certainly_le(&(lit(c, ctx) * ln_of(x, ctx).expect("positive")))
        };
        check("2.6", 3) && check("2.1", 5) && check("1.3", 420)
    })
}

fn require_lemmas() -> Result<()> {
    if simplification_lemmas_hold() {
        Ok(())
    } else {
        Err(Error::DominanceViolation("simplification lemmas not certified".into()))
    }
}

/// Instance for Λ₁ with D = 2k, B = 2n, A = (k log γ, 2 log 2, 10 k log k).
pub fn lambda1_instance(k: u32, n: &BigInt, ctx: PrecisionContext) -> Result<MatveevInstance> {
    if k < 3 {
        return Err(Error::DomainError(format!("Λ₁ needs k ≥ 3, got {k}")));
    }
    let d = 2 * k as u64;
    let alpha = dominant_root(k, ctx)?;
    let fine = alpha.context();
    let log_gamma = gamma(fine).ln()?;
    let log_k = ln_of(k, fine)?;
    let a = vec![log_gamma.mul_int(&BigInt::from(k)), ln2(fine).mul_int(&BigInt::from(2)), log_k.mul_int(&BigInt::from(10 * k))];
    let h3 = heights::h_eta3_form1(k, fine)?.value;
    let requirements = vec![
        Requirement::Exact(heights::h_gamma(fine).value.mul_int(&BigInt::from(d))),
        Requirement::Bound(heights::h_alpha(k, fine)?.value.mul_int(&BigInt::from(d))),
        Requirement::Exact(h3.mul_int(&BigInt::from(d))),
    ];
    MatveevInstance::new(FormLabel::Lambda1, d, n * 2, a, requirements)
}

fn x_k_n(k: u32, n: &BigInt, ctx: PrecisionContext) -> Result<CertifiedReal> {
    let log_k = ln_of(k, ctx)?;
    Ok(int(BigInt::from(k).pow(4), ctx) * log_k.square() * int(n.clone(), ctx).ln()?)
}

/// Instance for Λ₂: as Λ₁ but A₃ = 8×10¹³ k⁵ log²k log n, which dominates
/// 2k·h(η₃) once m log α < 3.9×10¹³ k⁴ log²k log n.
pub fn lambda2_instance(k: u32, n: &BigInt, ctx: PrecisionContext) -> Result<MatveevInstance> {
    let base = lambda1_instance(k, n, ctx)?;
    let fine = base.a[0].context();
    let x = x_k_n(k, n, fine)?;
    // 3 log 2 / 2 + 2 log k + 3.9e13·X < 4e13·X bounds h(η₃) for every admissible m
    let chain = ln2(fine).mul_int(&BigInt::from(3)).div_int(&BigInt::from(2))
        + ln_of(k, fine)?.mul_int(&BigInt::from(2))
        + lit("3.9e13", fine) * x.clone();
    let h_cap = lit("4e13", fine) * x;
    if !chain.certainly_lt(&h_cap) {
        return Err(Error::DominanceViolation(format!("h(η₃) < 4e13 k⁴ log²k log n not certified at k = {k}")));
    }
    let d = base.d;
    let mut a = base.a;
    let mut requirements = base.requirements;
    a[2] = lit("8e13", fine).mul_int(&BigInt::from(k)) * x_k_n(k, n, fine)?;
    requirements[2] = Requirement::Bound(chain.mul_int(&BigInt::from(d)));
    MatveevInstance::new(FormLabel::Lambda2, d, base.b, a, requirements)
}

/// Instance for Λ₃ over Q(√2): D = 2, B = 2n, A = (log γ, 2 log 2, log 2).
pub fn lambda3_instance(n: &BigInt, ctx: PrecisionContext) -> Result<MatveevInstance> {
    let log_gamma = gamma(ctx).ln()?;
    let l2 = ln2(ctx);
    let a = vec![log_gamma.clone(), l2.mul_int(&BigInt::from(2)), l2.clone()];
    let requirements = vec![
        Requirement::Exact(heights::h_gamma(ctx).value.mul_int(&BigInt::from(2))),
        Requirement::Exact(heights::h_two(ctx).value.mul_int(&BigInt::from(2))),
        Requirement::Exact(heights::h_sqrt2(ctx).value.mul_int(&BigInt::from(2))),
    ];
    MatveevInstance::new(FormLabel::Lambda3, 2, n * 2, a, requirements)
}

fn dominated(name: BoundName, k: Option<u64>, n: &BigInt, simplified: CertifiedReal, raw: CertifiedReal) -> Result<DerivedBound> {
    if !raw.certainly_ge(&simplified) {
        return Err(Error::DominanceViolation(format!(
            "{name:?}: raw Matveev value {} is not ≥ simplified {}",
            raw.lower_decimal(6),
            simplified.upper_decimal(6)
        )));
    }
    Ok(DerivedBound { name, k, n: Some(n.clone()), value: simplified, raw: Some(raw) })
}

fn check_kn(k: u32, n: &BigInt) -> Result<()> {
    if k < 3 || *n < BigInt::from(5) {
        return Err(Error::DomainError(format!("need k ≥ 3 and n ≥ 5, got k = {k}, n = {n}")));
    }
    Ok(())
}

/// log|Λ₁| > −3.83×10¹³ k⁴ log²k log n.
pub fn bound_e1(k: u32, n: &BigInt, ctx: PrecisionContext) -> Result<DerivedBound> {
    check_kn(k, n)?;
    require_lemmas()?;
    let raw = matveev_lower(&lambda1_instance(k, n, ctx)?)?;
    let simplified = -(lit("3.83e13", ctx) * x_k_n(k, n, ctx)?);
    dominated(BoundName::E1, Some(k as u64), n, simplified, raw)
}

/// m log α < 3.9×10¹³ k⁴ log²k log n, from E1 against |Λ₁| < 10/α^m.
pub fn bound_e2(k: u32, n: &BigInt, ctx: PrecisionContext) -> Result<DerivedBound> {
    let e1 = bound_e1(k, n, ctx)?;
    let x = x_k_n(k, n, ctx)?;
    let value = lit("3.9e13", ctx) * x;
    let needed = ln_of(10, ctx)? - e1.value;
    if !needed.certainly_le(&value) {
        return Err(Error::DominanceViolation(format!("log 10 + 3.83e13·X ≤ 3.9e13·X fails at k = {k}")));
    }
    Ok(DerivedBound { name: BoundName::E2, k: Some(k as u64), n: Some(n.clone()), value, raw: None })
}

/// log|Λ₂| > −3.1×10²⁶ k⁸ log³k log²n.
pub fn bound_e3(k: u32, n: &BigInt, ctx: PrecisionContext) -> Result<DerivedBound> {
    check_kn(k, n)?;
    require_lemmas()?;
    let raw = matveev_lower(&lambda2_instance(k, n, ctx)?)?;
    let log_k = ln_of(k, ctx)?;
    let log_n = int(n.clone(), ctx).ln()?;
    let simplified = -(lit("3.1e26", ctx).mul_int(&BigInt::from(k).pow(8)) * log_k.powi(3)? * log_n.square());
    dominated(BoundName::E3, Some(k as u64), n, simplified, raw)
}

/// log|Λ₃| > −1.1×10¹² log n, for n ≥ 420.
pub fn bound_e4(n: &BigInt, ctx: PrecisionContext) -> Result<DerivedBound> {
    if *n < BigInt::from(420) {
        return Err(Error::DomainError(format!("E4 needs n ≥ 420, got {n}")));
    }
    require_lemmas()?;
    let raw = matveev_lower(&lambda3_instance(n, ctx)?)?;
    let simplified = -(lit("1.1e12", ctx) * int(n.clone(), ctx).ln()?);
    dominated(BoundName::E4, None, n, simplified, raw)
}

/// Product of the constant factors of E1, E3, E4 after the simplification
/// lemmas, for auditing against the stated coefficients.
#[derive(Clone, Debug)]
pub struct CoefficientAudit {
    pub name: BoundName,
    pub computed: CertifiedReal,
    pub stated: CertifiedReal,
}

impl CoefficientAudit {
    pub fn holds(&self) -> bool {
        self.computed.certainly_le(&self.stated)
    }
}

pub fn coefficient_audits(ctx: PrecisionContext) -> Result<Vec<CoefficientAudit>> {
    let base = lit("1.4", ctx).mul_int(&BigInt::from(30u32).pow(6)).mul_int(&BigInt::from(81)) * int(3, ctx).sqrt()?;
    let log_gamma = gamma(ctx).ln()?;
    let l2 = ln2(ctx);
    // D² = 4k², (1 + log D) ≤ 2.6 log k, (1 + log B) ≤ 2.1 log n
    let common = base.mul_int(&BigInt::from(4)) * lit("2.6", ctx) * lit("2.1", ctx) * log_gamma.clone() * l2.mul_int(&BigInt::from(2));
    let e1 = common.mul_int(&BigInt::from(10));
    let e3 = common * lit("8e13", ctx);
    // D = 2: D²(1 + log 2), (1 + log B) ≤ 1.3 log n, A = (log γ, 2 log 2, log 2)
    let e4 = base.mul_int(&BigInt::from(4))
        * (CertifiedReal::one(ctx) + l2.clone())
        * lit("1.3", ctx)
        * log_gamma
        * l2.mul_int(&BigInt::from(2))
        * l2;
    Ok(vec![
        CoefficientAudit { name: BoundName::E1, computed: e1, stated: lit("3.83e13", ctx) },
        CoefficientAudit { name: BoundName::E3, computed: e3, stated: lit("3.1e26", ctx) },
        CoefficientAudit { name: BoundName::E4, computed: e4, stated: lit("1.1e12", ctx) },
    ])
}

/// If T > (4s²)^s and x / log^s x < T then x < 2^s T log^s T.
pub fn guzman(s: u32, t: &CertifiedReal) -> Result<CertifiedReal> {
    if s == 0 {
        return Err(Error::DomainError("s must be at least 1".into()));
    }
    let ctx = t.context();
    let threshold = int(BigInt::from(4 * s * s).pow(s), ctx);
    if !t.certainly_gt(&threshold) {
        return Err(Error::DomainError(format!("T = {} must exceed (4s²)^s = {}", t.center_decimal(6), threshold.center_decimal(6))));
    }
    Ok(t.mul_pow2(s as i64) * t.ln()?.powi(s as i64)?)
}

/// Stated and independently derived bounds on n and ℓ for a fixed k ≥ 3.
#[derive(Clone, Debug)]
pub struct SmallKBounds {
    pub k: u64,
    /// 8.3×10³⁰ k⁸ log⁵k
    pub n_stated: CertifiedReal,
    /// 4 T log²T with T = (3.1×10²⁶ k⁸ log³k + log 3 / log²5) / log α(k)
    pub n_derived: CertifiedReal,
    pub n_stated_holds: bool,
    /// 1.7×10³¹ k⁸ log⁵k
    pub ell_stated: CertifiedReal,
    /// ℓ < 2n, using whichever n-bound is certified
    pub ell_stated_holds: bool,
}

impl SmallKBounds {
    pub fn n_effective(&self) -> &CertifiedReal {
        if self.n_stated_holds {
            &self.n_stated
        } else {
            &self.n_derived
        }
    }

    pub fn ell_effective(&self) -> CertifiedReal {
        if self.ell_stated_holds {
            self.ell_stated.clone()
        } else {
            self.n_effective().mul_int(&BigInt::from(2))
        }
    }

    /// Integer upper bound on ℓ used as M in the reductions.
    pub fn ell_cap(&self) -> BigInt {
        self.ell_effective().floor_upper()
    }
}

fn k8_log5(k: &CertifiedReal) -> Result<CertifiedReal> {
    Ok(k.powi(8)? * k.ln()?.powi(5)?)
}

/// log α(k) from below. α is increasing in k, so for large k the value at
/// k = 64 is used instead of computing the root.
fn log_alpha_lower(k: u64, ctx: PrecisionContext) -> Result<CertifiedReal> {
    let kk = k.min(64) as u32;
    let a = dominant_root(kk, ctx)?.with_context(ctx).ln()?;
    Ok(CertifiedReal::from_ulp_bounds(a.lower_ulps(), a.lower_ulps(), ctx))
}

fn n_ell_bounds(k: u64, ctx: PrecisionContext) -> Result<SmallKBounds> {
    if k < 3 {
        return Err(Error::DomainError(format!("need k ≥ 3, got {k}")));
    }
    let kr = int(k, ctx);
    let k8l5 = k8_log5(&kr)?;
    let n_stated = lit("8.3e30", ctx) * k8l5.clone();
    let ell_stated = lit("1.7e31", ctx) * k8l5;
    let log_k = kr.ln()?;
    let log5 = ln_of(5, ctx)?;
    let t = (lit("3.1e26", ctx) * kr.powi(8)? * log_k.powi(3)? + ln_of(3, ctx)?.checked_div(&log5.square())?)
        .checked_div(&log_alpha_lower(k, ctx)?)?;
    let n_derived = guzman(2, &t)?;
    let n_stated_holds = n_derived.certainly_le(&n_stated);
    let n_eff = if n_stated_holds { &n_stated } else { &n_derived };
    let ell_stated_holds = n_eff.mul_int(&BigInt::from(2)).certainly_le(&ell_stated);
    Ok(SmallKBounds { k, n_stated, n_derived, n_stated_holds, ell_stated, ell_stated_holds })
}

/// Certifies log(4.9×10²⁶ k⁸ log³k) ≤ 65 log k.
pub fn log_t_le_65_log_k(k: u64, ctx: PrecisionContext) -> Result<bool> {
    let kr = int(k, ctx);
    let log_k = kr.ln()?;
    let t = lit("4.9e26", ctx) * kr.powi(8)? * log_k.powi(3)?;
    Ok(t.ln()?.certainly_le(&log_k.mul_int(&BigInt::from(65))))
}

/// n < 8.3×10³⁰ k⁸ log⁵k, with the independently derived bound attached.
pub fn bound_n_of_k(k: u64, ctx: PrecisionContext) -> Result<(DerivedBound, SmallKBounds)> {
    let b = n_ell_bounds(k, ctx)?;
    if !log_t_le_65_log_k(k, ctx)? {
        return Err(Error::DominanceViolation(format!("log(4.9e26 k⁸ log³k) ≤ 65 log k fails at k = {k}")));
    }
    let d = DerivedBound { name: BoundName::NOfK, k: Some(k), n: None, value: b.n_stated.clone(), raw: Some(b.n_derived.clone()) };
    Ok((d, b))
}

/// ℓ < 1.7×10³¹ k⁸ log⁵k.
pub fn bound_ell_of_k(k: u64, ctx: PrecisionContext) -> Result<(DerivedBound, SmallKBounds)> {
    let b = n_ell_bounds(k, ctx)?;
    let d = DerivedBound {
        name: BoundName::EllOfK,
        k: Some(k),
        n: None,
        value: b.ell_stated.clone(),
        raw: Some(b.n_effective().mul_int(&BigInt::from(2))),
    };
    Ok((d, b))
}

/// Sound integer caps (n, ℓ) for every k ≤ `k_max`, where k_max may be huge.
/// Both stated expressions are increasing in k; n < 8.3×10³⁰ k⁸ log⁵k is
/// certified for k ≥ 4 by the derived bound, which is checked here at k = 4
/// and is monotone through log α(k) ≥ log α(4).
pub fn caps_for_k_up_to(k_max: &CertifiedReal) -> Result<(CertifiedReal, CertifiedReal)> {
    let ctx = k_max.context();
    let four = n_ell_bounds(4, ctx)?;
    if !four.n_stated_holds {
        return Err(Error::DominanceViolation("stated n-bound not certified at k = 4".into()));
    }
    let n = lit("8.3e30", ctx) * k8_log5(k_max)?;
    Ok((n.clone(), n.mul_int(&BigInt::from(2))))
}

#[derive(Clone, Debug)]
pub struct AbsoluteBounds {
    /// Certified K with k < K, from k < 7.1×10¹³ log k
    pub k: CertifiedReal,
    pub n: CertifiedReal,
    pub ell: CertifiedReal,
    pub k_stated: CertifiedReal,
    pub n_stated: CertifiedReal,
    pub ell_stated: CertifiedReal,
    pub iterations: usize,
}

impl AbsoluteBounds {
    pub fn within_stated(&self) -> bool {
        self.k.certainly_le(&self.k_stated) && self.n.certainly_le(&self.n_stated) && self.ell.certainly_le(&self.ell_stated)
    }
}

/// The chain from E4 to k < 7.1×10¹³ log k for k > 420:
/// k < (2/log 2)(1.1×10¹² log n + log 9) ≤ 3.2×10¹² log n,
/// log n < 71.2 + 8 log k + 5 log log k < 22 log k.
pub fn large_k_chain(ctx: PrecisionContext) -> Result<()> {
    let fail = |what: &str| Err(Error::DominanceViolation(format!("large-k chain: {what}")));
    let l2 = ln2(ctx);
    let log420 = ln_of(420, ctx)?;
    // (2/log 2)(1.1e12 L + log 9) ≤ 3.2e12 L is linear in L = log n; check at L = log 420
    let lhs = (lit("1.1e12", ctx) * log420.clone() + ln_of(9, ctx)?).mul_int(&BigInt::from(2)).checked_div(&l2)?;
    if !lhs.certainly_le(&(lit("3.2e12", ctx) * log420)) {
        return fail("k < 3.2e12 log n");
    }
    let log_83e29 = ln_of(83, ctx)? + ln_of(10, ctx)?.mul_int(&BigInt::from(29));
    if !log_83e29.certainly_lt(&lit("71.2", ctx)) {
        return fail("log 8.3e30 < 71.2");
    }
    // 22 log k − 8 log k − 5 log log k − 71.2 has derivative (14 − 5/log k)/k > 0
    let k0 = int(421, ctx);
    let log_k0 = k0.ln()?;
    let rhs = log_k0.mul_int(&BigInt::from(22));
    let lhs = lit("71.2", ctx) + log_k0.mul_int(&BigInt::from(8)) + log_k0.ln()?.mul_int(&BigInt::from(5));
    if !lhs.certainly_lt(&rhs) {
        return fail("71.2 + 8 log k + 5 log log k < 22 log k");
    }
    if !(lit("3.2e12", ctx).mul_int(&BigInt::from(22))).certainly_le(&lit("7.1e13", ctx)) {
        return fail("3.2e12 · 22 ≤ 7.1e13");
    }
    Ok(())
}

/// Absolute bounds k < K, n < 8.3×10³⁰ K⁸ log⁵K, ℓ < 2n from the fixed point
/// of K = 7.1×10¹³ log K.
pub fn absolute_bounds(ctx: PrecisionContext) -> Result<AbsoluteBounds> {
    large_k_chain(ctx)?;
    let c = lit("7.1e13", ctx);
    // iterate K ← c log K from above; every iterate stays above the fixed point
    let mut k = lit("1e16", ctx);
    let mut iterations = 0;
    loop {
        iterations += 1;
        let next = (&c * &k.ln()?).ceil_upper();
        let next = int(next, ctx);
        if next == k || iterations > 200 {
            break;
        }
        k = next;
    }
    // a little slack so the defining inequality is strict at K
    let k = int((k.mul_int(&BigInt::from(1_000_001)).div_int(&BigInt::from(1_000_000))).ceil_upper(), ctx);
    if !k.certainly_gt(&(&c * &k.ln()?)) || !k.certainly_gt(&c) {
        return Err(Error::DominanceViolation("fixed point of K = 7.1e13 log K not certified".into()));
    }
    let (n, ell) = caps_for_k_up_to(&k)?;
    Ok(AbsoluteBounds {
        k,
        n,
        ell,
        k_stated: lit("2.6e15", ctx),
        n_stated: lit("9.8e161", ctx),
        ell_stated: lit("2e162", ctx),
        iterations,
    })
}

/// The open interval 2(n+m)/5 < ℓ < 9(n+m)/10.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EllWindow {
    pub sum: u64,
}

impl EllWindow {
    pub fn contains(&self, ell: u64) -> bool {
        5 * ell as u128 > 2 * self.sum as u128 && (10 * ell as u128) < 9 * self.sum as u128
    }

    pub fn lower(&self) -> f64 {
        2.0 * self.sum as f64 / 5.0
    }

    pub fn upper(&self) -> f64 {
        9.0 * self.sum as f64 / 10.0
    }

    /// Smallest integer strictly above 2(n+m)/5.
    pub fn min_ell(&self) -> u64 {
        2 * self.sum / 5 + 1
    }

    /// Largest integer strictly below 9(n+m)/10.
    pub fn max_ell(&self) -> u64 {
        (9 * self.sum).div_ceil(10) - 1
    }
}

/// Bracket ℓ in terms of n + m for k ≥ 3, certifying
/// (s − 4)·r₃ + 1 ≥ 2s/5 and (s − 2)·r₂ + 2 ≤ 9s/10 with r₃ = log α(3)/log γ
/// and r₂ = log 2/log γ.
pub fn ell_window(n: u64, m: u64, ctx: PrecisionContext) -> Result<EllWindow> {
    let s = n + m;
    if s < 8 {
        return Err(Error::DomainError(format!("need n + m ≥ 8, got {s}")));
    }
    let log_gamma = gamma(ctx).ln()?;
    let r3 = dominant_root(3, ctx)?.with_context(ctx).ln()?.checked_div(&log_gamma)?;
    let r2 = ln2(ctx).checked_div(&log_gamma)?;
    let sr = int(s, ctx);
    let low = r3.mul_int(&BigInt::from(s - 4)) + CertifiedReal::one(ctx);
    let high = r2.mul_int(&BigInt::from(s - 2)) + int(2, ctx);
    if !low.certainly_ge(&sr.mul_int(&BigInt::from(2)).div_int(&BigInt::from(5)))
        || !high.certainly_le(&sr.mul_int(&BigInt::from(9)).div_int(&BigInt::from(10)))
    {
        return Err(Error::DominanceViolation(format!("ℓ-window chain fails at n + m = {s}")));
    }
    Ok(EllWindow { sum: s })
}

/// Certified α(3) > x for a decimal x. The ℓ-window chain only needs 1.83.
pub fn alpha3_exceeds(x: &str, ctx: PrecisionContext) -> Result<bool> {
    let x = CertifiedReal::from_decimal(x, ctx)?;
    Ok(dominant_root(3, ctx)?.certainly_gt(&x))
}

/// n < 8.3×10³⁰ k⁸ log⁵k < 2^(k/2) for k > 420; the ratio of the right side
/// to the left grows with k, so the check at k = 421 covers the range.
pub fn n_below_two_pow_half_k(ctx: PrecisionContext) -> Result<bool> {
    let k = int(421, ctx);
    let n = lit("8.3e30", ctx) * k8_log5(&k)?;
    let two_pow = crate::apreal::sqrt2(ctx) * int(BigInt::one() << 210, ctx);
    Ok(n.certainly_lt(&two_pow))
}
