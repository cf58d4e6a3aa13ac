//! Exact Pell and k-generalized Fibonacci numbers, and certified checks of
//! the Binet-type error terms attached to them.

use std::collections::VecDeque;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::apreal::{dominant_root, f_k_at, gamma, sqrt2, with_escalation, CertifiedReal, PrecisionContext};
use crate::error::{Error, Result};

/// Default number of precision doublings before giving up.
pub const DEFAULT_DOUBLINGS: u32 = 4;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PellTerm {
    pub index: u64,
    pub value: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KFibTerm {
    pub k: u32,
    pub index: i64,
    pub value: BigUint,
}

/// P_ℓ by iteration.
pub fn pell(l: u64) -> BigUint {
    PellSequence::new().nth(l as usize).expect("infinite stream").value
}

/// Stream P_0, P_1, P_2, …
#[derive(Clone, Debug)]
pub struct PellSequence {
    index: u64,
    cur: BigUint,
    next: BigUint,
}

impl PellSequence {
    pub fn new() -> Self {
        Self { index: 0, cur: BigUint::zero(), next: BigUint::one() }
    }
}

impl Default for PellSequence {
    fn default() -> Self {
        Self::new()
    }
}

impl Iterator for PellSequence {
    type Item = PellTerm;

    fn next(&mut self) -> Option<PellTerm> {
        let term = PellTerm { index: self.index, value: self.cur.clone() };
        let following = (&self.next << 1usize) + &self.cur;
        self.cur = std::mem::replace(&mut self.next, following);
        self.index += 1;
        Some(term)
    }
}

pub fn pell_upto(l: u64) -> impl Iterator<Item = PellTerm> {
    PellSequence::new().take_while(move |t| t.index <= l)
}

/// Stream F^(k)_n starting at n = 2 − k, kept as a sliding window of the
/// last k terms with their running sum.
#[derive(Clone, Debug)]
pub struct KFibSequence {
    k: u32,
    index: i64,
    window: VecDeque<BigUint>,
    sum: BigUint,
}

impl KFibSequence {
    pub fn new(k: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::DomainError(format!("k must be at least 2, got {k}")));
        }
        Ok(Self { k, index: 2 - k as i64, window: VecDeque::with_capacity(k as usize), sum: BigUint::zero() })
    }

    pub fn k(&self) -> u32 {
        self.k
    }
}

impl Iterator for KFibSequence {
    type Item = KFibTerm;

    fn next(&mut self) -> Option<KFibTerm> {
        let value = if self.index <= 0 {
            BigUint::zero()
        } else if self.index == 1 {
            BigUint::one()
        } else {
            self.sum.clone()
        };
        self.sum += &value;
        self.window.push_back(value.clone());
        if self.window.len() > self.k as usize {
            let old = self.window.pop_front().expect("window is nonempty");
            self.sum -= old;
        }
        let term = KFibTerm { k: self.k, index: self.index, value };
        self.index += 1;
        Some(term)
    }
}

pub fn kfib_upto(k: u32, n: i64) -> Result<impl Iterator<Item = KFibTerm>> {
    Ok(KFibSequence::new(k)?.take_while(move |t| t.index <= n))
}

/// F^(k)_n for n ≥ 2 − k.
pub fn kfib(k: u32, n: i64) -> Result<BigUint> {
    if n < 2 - k as i64 {
        return Err(Error::DomainError(format!("index {n} below 2 − k for k = {k}")));
    }
    let offset = (n - (2 - k as i64)) as usize;
    Ok(KFibSequence::new(k)?.nth(offset).expect("infinite stream").value)
}

/// Memoized F^(k)_n for n = 0..=max_index of a single k.
#[derive(Clone, Debug)]
pub struct KFibTable {
    k: u32,
    values: Vec<BigUint>,
}

impl KFibTable {
    pub fn new(k: u32, max_index: u64) -> Result<Self> {
        let values = KFibSequence::new(k)?
            .skip_while(|t| t.index < 0)
            .take_while(|t| t.index <= max_index as i64)
            .map(|t| t.value)
            .collect();
        Ok(Self { k, values })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn max_index(&self) -> u64 {
        self.values.len() as u64 - 1
    }

    pub fn get(&self, n: u64) -> &BigUint {
        &self.values[n as usize]
    }

    pub fn values(&self) -> &[BigUint] {
        &self.values
    }
}

/// `<k-or-P> <index> <value>` line used by the `sequences` subcommand.
pub fn pell_line(t: &PellTerm) -> String {
    format!("P {} {}", t.index, t.value)
}

pub fn kfib_line(t: &KFibTerm) -> String {
    format!("{} {} {}", t.k, t.index, t.value)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinetQuantity {
    /// ξ(ℓ) = P_ℓ − γ^ℓ/(2√2)
    XiPell,
    /// e_k(r) = F_r − f_k(α)α^(r−1)
    EK,
    /// X_r = F_r/(f_k(α)α^(r−1)) − 1
    XR,
    /// ζ_r = F_r/2^(r−2) − 1
    ZetaR,
}

/// A certified `|error| < bound` statement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinetErrorReport {
    pub which: BinetQuantity,
    pub k: Option<u32>,
    pub index: i64,
    pub error: CertifiedReal,
    pub bound: CertifiedReal,
}

impl BinetErrorReport {
    fn certify(self) -> Result<Self> {
        if self.error.abs_tight().certainly_lt(&self.bound) {
            Ok(self)
        } else {
            Err(Error::IntervalTooWide(format!(
                "{:?} at k={:?}, index={}: |error| < bound not certified",
                self.which, self.k, self.index
            )))
        }
    }
}

fn biguint_real(v: &BigUint, ctx: PrecisionContext) -> CertifiedReal {
    CertifiedReal::from_integer(BigInt::from(v.clone()), ctx)
}

/// Extra digits so that quantities of size ~base^index keep `ctx` digits after the point.
fn headroom(index: i64, log10_base_milli: i64) -> u32 {
    (index.unsigned_abs() as i64 * log10_base_milli / 1000 + 10) as u32
}

/// Certifies |P_ℓ − γ^ℓ/(2√2)| < 1/5.
pub fn check_pell_xi(l: u64, ctx: PrecisionContext) -> Result<BinetErrorReport> {
    if l == 0 {
        return Err(Error::DomainError("ξ(ℓ) is only bounded for ℓ ≥ 1".into()));
    }
    let p = pell(l);
    let start = ctx.with_extra_digits(headroom(l as i64, 383));
    with_escalation(start, DEFAULT_DOUBLINGS, |c| {
        let main = gamma(c).powi(l as i64)?.checked_div(&sqrt2(c).mul_int(&BigInt::from(2)))?;
        BinetErrorReport {
            which: BinetQuantity::XiPell,
            k: None,
            index: l as i64,
            error: biguint_real(&p, c) - main,
            bound: CertifiedReal::from_ratio(1, 5, c),
        }
        .certify()
    })
}

fn dominant_term(k: u32, r: i64, c: PrecisionContext) -> Result<(CertifiedReal, CertifiedReal)> {
    let alpha = dominant_root(k, c)?;
    let f = f_k_at(k, &alpha)?;
    let term = &f * &alpha.powi(r - 1)?;
    Ok((alpha, term))
}

/// Certifies |F^(k)_r − f_k(α)α^(r−1)| < 1/2 for r ≥ 2 − k.
pub fn check_kfib_e(k: u32, r: i64, ctx: PrecisionContext) -> Result<BinetErrorReport> {
    let value = kfib(k, r)?;
    let start = ctx.with_extra_digits(headroom(r, 302));
    with_escalation(start, DEFAULT_DOUBLINGS, |c| {
        let (_, term) = dominant_term(k, r, c)?;
        let c = term.context();
        BinetErrorReport {
            which: BinetQuantity::EK,
            k: Some(k),
            index: r,
            error: biguint_real(&value, c) - term,
            bound: CertifiedReal::from_ratio(1, 2, c),
        }
        .certify()
    })
}

/// Certifies |F^(k)_r/(f_k(α)α^(r−1)) − 1| < 2/α^r for r ≥ 2.
pub fn check_x_r(k: u32, r: i64, ctx: PrecisionContext) -> Result<BinetErrorReport> {
    if r < 2 {
        return Err(Error::DomainError(format!("X_r needs r ≥ 2, got {r}")));
    }
    let value = kfib(k, r)?;
    let start = ctx.with_extra_digits(headroom(r, 302));
    with_escalation(start, DEFAULT_DOUBLINGS, |c| {
        let (alpha, term) = dominant_term(k, r, c)?;
        let c = term.context();
        let x = biguint_real(&value, c).checked_div(&term)? - CertifiedReal::one(c);
        let bound = CertifiedReal::from_integer(2, c).checked_div(&alpha.powi(r)?)?;
        BinetErrorReport { which: BinetQuantity::XR, k: Some(k), index: r, error: x, bound }.certify()
    })
}

/// Certifies |F^(k)_r/2^(r−2) − 1| < 2/2^(k/2) for 2 ≤ r < 2^(k/2).
///
/// Both sides are exact rationals, so the comparison is done on integers:
/// `|F_r − 2^(r−2)|² · 2^k < 4 · 2^(2(r−2))`.
pub fn check_zeta(k: u32, r: i64, ctx: PrecisionContext) -> Result<BinetErrorReport> {
    if r < 2 {
        return Err(Error::DomainError(format!("ζ_r needs r ≥ 2, got {r}")));
    }
    // r < 2^(k/2)  ⇔  r² < 2^k
    if BigUint::from(r as u64).pow(2) >= BigUint::one() << k as usize {
        return Err(Error::DomainError(format!("ζ_r needs r < 2^(k/2); r = {r}, k = {k}")));
    }
    let value = BigInt::from(kfib(k, r)?);
    let power = BigInt::one() << (r - 2) as usize;
    let diff = &value - &power;
    let lhs = &diff * &diff * (BigInt::one() << k as usize);
    let rhs = (&power * &power) << 2usize;
    let c = ctx.with_extra_digits(headroom(k as i64, 151));
    let error = CertifiedReal::make_constant(&diff, &power, c);
    // 2/2^(k/2) = 2^(1 − k/2)
    let bound = if k.is_multiple_of(2) {
        CertifiedReal::one(c).mul_pow2(1 - (k / 2) as i64)
    } else {
        sqrt2(c).mul_pow2(-((k / 2) as i64))
    };
    if lhs >= rhs {
        return Err(Error::VerificationFailed(format!("|ζ_{r}| ≥ 2/2^(k/2) for k = {k}")));
    }
    Ok(BinetErrorReport { which: BinetQuantity::ZetaR, k: Some(k), index: r, error, bound })
}
