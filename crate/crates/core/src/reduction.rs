//! Continued fractions of certified reals and the Dujella–Pethő reduction.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::apreal::{dominant_root, f_k_at, gamma, ln2, pow2, sqrt2, CertifiedReal, PrecisionContext};
use crate::error::{Error, Result};
use crate::sequences::{kfib, DEFAULT_DOUBLINGS};

/// Extra convergents tried after the first one past 6M when ε ≤ 0.
pub const EXTRA_ATTEMPTS: usize = 20;

#[derive(Clone, Debug)]
pub struct ContinuedFraction {
    pub source: CertifiedReal,
    /// Partial quotients a₀, a₁, …, each proven correct for every real in
    /// the source interval.
    pub quotients: Vec<BigInt>,
    /// Convergents (pᵢ, qᵢ), one per quotient.
    pub convergents: Vec<(BigInt, BigInt)>,
}

impl ContinuedFraction {
    /// Number of certified quotients; every stored convergent is certified.
    pub fn certified_upto(&self) -> usize {
        self.quotients.len()
    }

    pub fn denominators(&self) -> impl Iterator<Item = &BigInt> {
        self.convergents.iter().map(|(_, q)| q)
    }

    /// Index of the first convergent with q > bound.
    pub fn first_beyond(&self, bound: &BigInt) -> Option<usize> {
        self.convergents.iter().position(|(_, q)| q > bound)
    }

    /// Whether the certified quotients of `other` agree with ours on the
    /// common prefix.
    pub fn consistent_with(&self, other: &ContinuedFraction) -> bool {
        self.quotients.iter().zip(&other.quotients).all(|(a, b)| a == b)
    }
}

/// Expand the quotients shared by both endpoints of `tau`. Two reals with the
/// same prefix [a₀; …, a_j] (neither terminating there) bound an interval of
/// reals with that prefix, so every shared quotient is certified.
pub fn cf_certified(tau: &CertifiedReal) -> ContinuedFraction {
    let den = pow2(tau.bits());
    let (mut n1, mut d1) = (tau.lower_ulps(), den.clone());
    let (mut n2, mut d2) = (tau.upper_ulps(), den);
    let mut quotients = Vec::new();
    let mut convergents = Vec::new();
    // (p₋₂, q₋₂) = (0, 1), (p₋₁, q₋₁) = (1, 0)
    let (mut p_prev, mut q_prev) = (BigInt::zero(), BigInt::one());
    let (mut p, mut q) = (BigInt::one(), BigInt::zero());
    loop {
        let (a1, r1) = n1.div_mod_floor(&d1);
        let (a2, r2) = n2.div_mod_floor(&d2);
        if a1 != a2 || r1.is_zero() || r2.is_zero() {
            break;
        }
        let p_next = &a1 * &p + &p_prev;
        let q_next = &a1 * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
        convergents.push((p.clone(), q.clone()));
        quotients.push(a1);
        (n1, d1) = (d1, r1);
        (n2, d2) = (d2, r2);
    }
    ContinuedFraction { source: tau.clone(), quotients, convergents }
}

/// Certified expansion of `tau` until some convergent denominator exceeds
/// `target_q`.
pub fn cf_expand(tau: &CertifiedReal, target_q: &BigInt) -> Result<ContinuedFraction> {
    let cf = cf_certified(tau);
    if cf.first_beyond(target_q).is_some() {
        return Ok(cf);
    }
    if tau.is_exact() {
        return Err(Error::RationalCollision(format!(
            "τ = {} is rational with denominator ≤ {target_q}",
            tau.center_decimal(20)
        )));
    }
    Err(Error::PrecisionExhausted(format!(
        "{} certified quotients at {} digits do not reach q > {target_q}",
        cf.quotients.len(),
        tau.context().digits()
    )))
}

/// Escalating expansion: recompute τ at doubled precision until a
/// convergent passes `target_q`. Successive expansions must agree on their
/// common prefix.
pub fn cf_expand_with(
    target_q: &BigInt,
    ctx: PrecisionContext,
    max_doublings: u32,
    mut tau_at: impl FnMut(PrecisionContext) -> Result<CertifiedReal>,
) -> Result<ContinuedFraction> {
    let mut cur = ctx;
    let mut previous: Option<ContinuedFraction> = None;
    for _ in 0..=max_doublings {
        let tau = tau_at(cur)?;
        let cf = cf_certified(&tau);
        if let Some(prev) = &previous {
            if !cf.consistent_with(prev) {
                return Err(Error::VerificationFailed("continued fraction changed between precisions".into()));
            }
        }
        if cf.first_beyond(target_q).is_some() {
            return Ok(cf);
        }
        if tau.is_exact() {
            return cf_expand(&tau, target_q);
        }
        previous = Some(cf);
        cur = cur.doubled();
    }
    Err(Error::PrecisionExhausted(format!("no convergent beyond {target_q} within {max_doublings} doublings")))
}

/// Distance from `x` to the nearest integer, as an enclosure of
/// {‖t‖ : t ∈ x}.
pub fn nearest_distance(x: &CertifiedReal) -> Result<CertifiedReal> {
    let p = x.bits();
    let one = pow2(p);
    let half = pow2(p - 1);
    if x.radius_ulps() * 4 >= one {
        return Err(Error::PrecisionExhausted(format!("radius of {x} is not below 1/4")));
    }
    let (lo, hi) = (x.lower_ulps(), x.upper_ulps());
    let dist = |v: &BigInt| {
        let r = v.mod_floor(&one);
        if r > half {
            &one - r
        } else {
            r
        }
    };
    let (dl, dh) = (dist(&lo), dist(&hi));
    // an integer lies in [lo, hi] iff floor(hi) > floor(lo) or lo is an integer
    let integer_inside = hi.div_floor(&one) > lo.div_floor(&one) || lo.mod_floor(&one).is_zero();
    let shifted = (&lo - &half, &hi - &half);
    let half_inside = shifted.1.div_floor(&one) > shifted.0.div_floor(&one) || shifted.0.mod_floor(&one).is_zero();
    let min = if integer_inside { BigInt::zero() } else { (&dl).min(&dh).clone() };
    let max = if half_inside { half } else { dl.max(dh) };
    Ok(CertifiedReal::from_ulp_bounds(min, max, x.context()))
}

/// Data for 0 < |uτ − v + μ| < A·B^(−w) with u ≤ M.
#[derive(Clone, Debug)]
pub struct ReductionProblem {
    pub tau: CertifiedReal,
    pub mu: CertifiedReal,
    pub a: CertifiedReal,
    /// log B, which is all the lemma uses of B.
    pub log_b: CertifiedReal,
    pub m: BigInt,
}

impl ReductionProblem {
    pub fn new(tau: CertifiedReal, mu: CertifiedReal, a: CertifiedReal, log_b: CertifiedReal, m: BigInt) -> Result<Self> {
        if !a.is_positive() || !log_b.is_positive() || m < BigInt::one() {
            return Err(Error::InvalidProblem(format!(
                "need A > 0, B > 1, M ≥ 1 (A = {}, log B = {}, M = {m})",
                a.center_decimal(6),
                log_b.center_decimal(6)
            )));
        }
        Ok(Self { tau, mu, a, log_b, m })
    }
}

#[derive(Clone, Debug)]
pub struct ReductionOutcome {
    pub convergent_index: usize,
    pub q: BigInt,
    pub next_q: Option<BigInt>,
    pub epsilon: CertifiedReal,
    /// log(Aq/ε)/log B
    pub bound: CertifiedReal,
    /// Least integer W such that every w ≥ W is excluded.
    pub w_bound: BigInt,
    /// Convergents examined, counting the successful one.
    pub attempts: usize,
    pub digits: u32,
}

impl ReductionOutcome {
    /// Largest w that survives the reduction.
    pub fn max_w(&self) -> BigInt {
        &self.w_bound - 1
    }
}

/// Certified ε = ‖μq‖ − M‖τq‖.
pub fn epsilon(prob: &ReductionProblem, q: &BigInt) -> Result<CertifiedReal> {
    let mu_q = nearest_distance(&prob.mu.mul_int(q))?;
    let tau_q = nearest_distance(&prob.tau.mul_int(q))?;
    Ok(mu_q - tau_q.mul_int(&prob.m))
}

pub fn dp_reduce(prob: &ReductionProblem) -> Result<ReductionOutcome> {
    let cf = cf_expand(&prob.tau, &(&prob.m * 6))?;
    dp_reduce_with_cf(prob, &cf)
}

/// Runs the reduction lemma against a precomputed expansion of τ, starting
/// at the first convergent with q > 6M and moving on while ε ≤ 0.
pub fn dp_reduce_with_cf(prob: &ReductionProblem, cf: &ContinuedFraction) -> Result<ReductionOutcome> {
    let six_m = &prob.m * 6;
    let start = cf.first_beyond(&six_m).ok_or_else(|| {
        Error::PrecisionExhausted(format!("expansion of τ stops before q > {six_m}"))
    })?;
    let mut ambiguous = false;
    let mut attempts = 0;
    for i in start..cf.convergents.len().min(start + EXTRA_ATTEMPTS + 1) {
        attempts += 1;
        let q = &cf.convergents[i].1;
        let eps = match epsilon(prob, q) {
            Ok(e) => e,
            Err(e) if e.is_precision_limited() => {
                ambiguous = true;
                continue;
            }
            Err(e) => return Err(e),
        };
        if !eps.is_positive() {
            ambiguous |= !eps.certainly_le(&CertifiedReal::zero(eps.context()));
            continue;
        }
        let bound = prob.a.mul_int(q).checked_div(&eps)?.ln()?.checked_div(&prob.log_b)?;
        return Ok(ReductionOutcome {
            convergent_index: i,
            q: q.clone(),
            next_q: cf.convergents.get(i + 1).map(|(_, q)| q.clone()),
            epsilon: eps,
            w_bound: bound.ceil_upper(),
            bound,
            attempts,
            digits: prob.tau.context().digits(),
        });
    }
    let exhausted_budget = attempts == EXTRA_ATTEMPTS + 1;
    if ambiguous || !exhausted_budget {
        Err(Error::PrecisionExhausted(format!("ε not certified positive after {attempts} convergents")))
    } else {
        Err(Error::EpsilonExhausted { attempts })
    }
}

/// Starting precision for a reduction with bound M: 1.2 × digits(6M) + 60.
pub fn initial_digits(m: &BigInt) -> u32 {
    let len = (m * BigInt::from(6)).to_string().trim_start_matches('-').len() as u32;
    (len * 6).div_ceil(5) + 60
}

/// Everything the two small-k reductions share for a fixed k: τ_k, its
/// expansion past 6M_k, log α and log(2√2 f_k(α)).
#[derive(Clone, Debug)]
pub struct SmallKReducer {
    pub k: u32,
    pub m_cap: BigInt,
    pub ctx: PrecisionContext,
    pub log_alpha: CertifiedReal,
    pub cf: ContinuedFraction,
    log_2sqrt2_f: CertifiedReal,
}

#[derive(Clone, Debug)]
pub struct Form1Result {
    pub k: u32,
    /// ⌈20/log α(k)⌉
    pub a: BigInt,
    pub outcome: ReductionOutcome,
    /// Largest m not excluded; at least 4 since the reduction assumes m ≥ 5.
    pub m_bound: u64,
}

#[derive(Clone, Debug)]
pub struct Form2Result {
    pub k: u32,
    pub m: u64,
    pub outcome: ReductionOutcome,
    pub n_bound: u64,
}

fn to_u64(v: &BigInt) -> Result<u64> {
    v.to_u64().ok_or_else(|| Error::DomainError(format!("{v} does not fit in u64")))
}

impl SmallKReducer {
    pub fn new(k: u32, m_cap: &BigInt, ctx: PrecisionContext) -> Result<Self> {
        if k < 3 {
            return Err(Error::DomainError(format!("small-k reductions need k ≥ 3, got {k}")));
        }
        let alpha = dominant_root(k, ctx)?;
        let f = f_k_at(k, &alpha)?;
        let log_alpha = alpha.ln()?.with_context(ctx);
        let log_2sqrt2_f = (sqrt2(alpha.context()).mul_int(&BigInt::from(2)) * f).ln()?.with_context(ctx);
        let tau = gamma(ctx).ln()?.checked_div(&log_alpha)?;
        let cf = cf_expand(&tau, &(m_cap * 6))?;
        Ok(Self { k, m_cap: m_cap.clone(), ctx, log_alpha, cf, log_2sqrt2_f })
    }

    /// Escalating construction starting from `initial_digits(M)`.
    pub fn build(k: u32, m_cap: &BigInt) -> Result<Self> {
        let start = PrecisionContext::new(initial_digits(m_cap))?;
        crate::apreal::with_escalation(start, DEFAULT_DOUBLINGS, |c| Self::new(k, m_cap, c))
    }

    pub fn doubled(&self) -> Result<Self> {
        Self::new(self.k, &self.m_cap, self.ctx.doubled())
    }

    fn problem(&self, mu: CertifiedReal, a: CertifiedReal) -> Result<ReductionProblem> {
        ReductionProblem::new(self.cf.source.clone(), mu, a, self.log_alpha.clone(), self.m_cap.clone())
    }

    /// 0 < |ℓτ_k − (n+m−2) + μ_k| < A α^(−m) with μ_k = −log(2√2 f_k²)/log α.
    pub fn form1(&self) -> Result<Form1Result> {
        let c = self.ctx;
        let a_exact = CertifiedReal::from_integer(20, c).checked_div(&self.log_alpha)?;
        let a = a_exact.ceil_upper();
        // log(2√2 f²) = 2 log(2√2 f) − log(2√2)
        let log_2sqrt2 = (sqrt2(c).mul_int(&BigInt::from(2))).ln()?;
        let mu = -(self.log_2sqrt2_f.mul_int(&BigInt::from(2)) - log_2sqrt2).checked_div(&self.log_alpha)?;
        let prob = self.problem(mu, CertifiedReal::from_integer(a.clone(), c))?;
        let outcome = dp_reduce_with_cf(&prob, &self.cf)?;
        let m_bound = to_u64(&outcome.max_w())?.max(4);
        Ok(Form1Result { k: self.k, a, outcome, m_bound })
    }

    /// 0 < |ℓτ_k − (n−1) + μ_{k,m}| < 10 α^(−n) with
    /// μ_{k,m} = −log(2√2 f_k F_m)/log α.
    pub fn form2(&self, m: u64) -> Result<Form2Result> {
        let c = self.ctx;
        let ten = CertifiedReal::from_integer(10, c);
        if !CertifiedReal::from_integer(6, c).checked_div(&self.log_alpha)?.certainly_le(&ten) {
            return Err(Error::DominanceViolation(format!("6/log α({}) ≤ 10 not certified", self.k)));
        }
        let f_m: BigUint = kfib(self.k, m as i64)?;
        let log_fm = CertifiedReal::from_integer(BigInt::from(f_m), c).ln()?;
        let mu = -(&self.log_2sqrt2_f + &log_fm).checked_div(&self.log_alpha)?;
        let outcome = dp_reduce_with_cf(&self.problem(mu, ten)?, &self.cf)?;
        let n_bound = to_u64(&outcome.max_w())?;
        Ok(Form2Result { k: self.k, m, outcome, n_bound })
    }

    /// form2 with local escalation: the shared expansion is rebuilt at
    /// doubled precision only for the (k, m) pairs that need it.
    pub fn form2_escalating(&self, m: u64) -> Result<Form2Result> {
        let mut owned: Option<Self> = None;
        for _ in 0..=DEFAULT_DOUBLINGS {
            let reducer = owned.as_ref().unwrap_or(self);
            match reducer.form2(m) {
                Err(e) if e.is_precision_limited() => owned = Some(reducer.doubled()?),
                other => return other,
            }
        }
        Err(Error::PrecisionExhausted(format!("form 2 at (k, m) = ({}, {m})", self.k)))
    }
}

pub fn reduce_form1(k: u32, m_cap: &BigInt) -> Result<Form1Result> {
    let start = PrecisionContext::new(initial_digits(m_cap))?;
    crate::apreal::with_escalation(start, DEFAULT_DOUBLINGS, |c| SmallKReducer::new(k, m_cap, c)?.form1())
}

pub fn reduce_form2(k: u32, m: u64, m_cap: &BigInt) -> Result<Form2Result> {
    if m < 3 {
        return Err(Error::DomainError(format!("m must be at least 3, got {m}")));
    }
    let start = PrecisionContext::new(initial_digits(m_cap))?;
    crate::apreal::with_escalation(start, DEFAULT_DOUBLINGS, |c| SmallKReducer::new(k, m_cap, c)?.form2(m))
}

#[derive(Clone, Debug)]
pub struct LargeKResult {
    pub m_cap: BigInt,
    pub outcome: ReductionOutcome,
    /// Largest k not excluded.
    pub k_bound: u64,
}

/// 0 < |ℓ(log γ/log 2) − (n+m−3) − 1/2| < 26·√2^(−k).
pub fn large_k_problem(m_cap: &BigInt, ctx: PrecisionContext) -> Result<ReductionProblem> {
    let l2 = ln2(ctx);
    let a = CertifiedReal::from_integer(26, ctx);
    if !CertifiedReal::from_integer(18, ctx).checked_div(&l2)?.certainly_le(&a) {
        return Err(Error::DominanceViolation("18/log 2 ≤ 26 not certified".into()));
    }
    let tau = gamma(ctx).ln()?.checked_div(&l2)?;
    ReductionProblem::new(tau, CertifiedReal::from_ratio(-1, 2, ctx), a, l2.div_int(&BigInt::from(2)), m_cap.clone())
}

pub fn reduce_large_k(m_cap: &BigInt) -> Result<LargeKResult> {
    reduce_large_k_with(m_cap, DEFAULT_DOUBLINGS)
}

pub fn reduce_large_k_with(m_cap: &BigInt, doublings: u32) -> Result<LargeKResult> {
    let start = PrecisionContext::new(initial_digits(m_cap))?;
    crate::apreal::with_escalation(start, doublings, |c| {
        let outcome = dp_reduce(&large_k_problem(m_cap, c)?)?;
        let k_bound = to_u64(&outcome.max_w())?;
        Ok(LargeKResult { m_cap: m_cap.clone(), outcome, k_bound })
    })
}

/// Parses integer-valued decimal or scientific notation such as "2e162" or
/// "6.6e59".
pub fn parse_bound(s: &str) -> Result<BigInt> {
    let (num, den) = crate::apreal::parse_decimal(s)?;
    if den.is_zero() || !(&num % &den).is_zero() || num.is_negative() {
        return Err(Error::Parse(format!("{s} is not a nonnegative integer")));
    }
    Ok(num / den)
}
