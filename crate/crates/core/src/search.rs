//! Exact searches over F^(k)_n · F^(k)_m = P_ℓ.

use std::ops::RangeInclusive;

use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::apreal::PrecisionContext;
use crate::matveev::ell_window;
use crate::sequences::{kfib, pell, pell_upto, KFibTable};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Solution {
    pub n: u64,
    pub m: u64,
    pub k: u32,
    pub ell: u64,
    pub value: BigUint,
}

impl Solution {
    pub fn tuple(&self) -> (u64, u64, u32, u64) {
        (self.n, self.m, self.k, self.ell)
    }
}

/// Exact test of F^(k)_n · F^(k)_m = P_ℓ.
pub fn verify_solution(n: u64, m: u64, k: u32, ell: u64) -> bool {
    match (kfib(k, n as i64), kfib(k, m as i64)) {
        (Ok(a), Ok(b)) => a * b == pell(ell),
        _ => false,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairConstraint {
    /// n > m
    Greater,
    /// n = m
    Equal,
    /// n ≥ m
    None,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBox {
    pub k: RangeInclusive<u32>,
    pub n: RangeInclusive<u64>,
    pub m: RangeInclusive<u64>,
    pub ell: RangeInclusive<u64>,
    pub constraint: PairConstraint,
    /// Additionally require n ≥ k + 2.
    pub n_beyond_k: bool,
}

impl SearchBox {
    /// 3 ≤ k ≤ k_max, k+2 ≤ n ≤ n_max, 3 ≤ m < n, ell_min ≤ ℓ ≤ ell_max.
    pub fn proof_box(k_max: u32, n_max: u64, ell_min: u64, ell_max: u64) -> Self {
        Self {
            k: 3..=k_max,
            n: 3..=n_max,
            m: 3..=n_max,
            ell: ell_min..=ell_max,
            constraint: PairConstraint::Greater,
            n_beyond_k: true,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty() || self.n.is_empty() || self.m.is_empty() || self.ell.is_empty()
    }

    fn n_range(&self, k: u32) -> RangeInclusive<u64> {
        let lo = if self.n_beyond_k { (*self.n.start()).max(k as u64 + 2) } else { *self.n.start() };
        lo..=*self.n.end()
    }

    fn m_range(&self, n: u64) -> RangeInclusive<u64> {
        let hi = match self.constraint {
            PairConstraint::Greater => n.saturating_sub(1).min(*self.m.end()),
            PairConstraint::Equal | PairConstraint::None => n.min(*self.m.end()),
        };
        let lo = match self.constraint {
            PairConstraint::Equal => n.max(*self.m.start()),
            _ => *self.m.start(),
        };
        lo..=hi
    }
}

/// Sorted Pell values P_ℓ for ℓ in a range, for membership by binary search.
pub struct PellTable {
    start: u64,
    values: Vec<BigUint>,
}

impl PellTable {
    pub fn new(ell: RangeInclusive<u64>) -> Self {
        let start = *ell.start();
        let values = pell_upto(*ell.end()).skip(start as usize).map(|t| t.value).collect();
        Self { start, values }
    }

    pub fn max(&self) -> Option<&BigUint> {
        self.values.last()
    }

    /// ℓ with P_ℓ = v, if any. P is strictly increasing from ℓ = 1.
    pub fn index_of(&self, v: &BigUint) -> Option<u64> {
        self.values.binary_search(v).ok().map(|i| self.start + i as u64)
    }
}

/// All solutions inside the box, sorted.
pub fn enumerate(b: &SearchBox) -> Vec<Solution> {
    if b.is_empty() {
        return Vec::new();
    }
    let pells = PellTable::new(b.ell.clone());
    let Some(max_pell) = pells.max().cloned() else { return Vec::new() };
    let tasks: Vec<(u32, u64)> = b.k.clone().flat_map(|k| b.n_range(k).map(move |n| (k, n))).collect();
    let tables: Vec<KFibTable> = b
        .k
        .clone()
        .into_par_iter()
        .map(|k| KFibTable::new(k, *b.n.end()).expect("k ≥ 2"))
        .collect();
    let k0 = *b.k.start();
    let mut out: Vec<Solution> = tasks
        .into_par_iter()
        .flat_map_iter(|(k, n)| {
            let table = &tables[(k - k0) as usize];
            let fnk = table.get(n);
            let mut found = Vec::new();
            for m in b.m_range(n) {
                let prod = fnk * table.get(m);
                // F_m is nondecreasing in m, so nothing larger can match
                if prod > max_pell {
                    break;
                }
                if let Some(ell) = pells.index_of(&prod) {
                    found.push(Solution { n, m, k, ell, value: prod });
                }
            }
            found
        })
        .collect();
    out.sort();
    out
}

/// Reference enumeration by a naive double loop over all term pairs and all ℓ.
pub fn enumerate_naive(b: &SearchBox) -> Vec<Solution> {
    let mut out = Vec::new();
    for k in b.k.clone() {
        let table = KFibTable::new(k, *b.n.end()).expect("k ≥ 2");
        for n in b.n_range(k) {
            for m in b.m_range(n) {
                let prod = table.get(n) * table.get(m);
                for ell in b.ell.clone() {
                    if pell(ell) == prod {
                        out.push(Solution { n, m, k, ell, value: prod.clone() });
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// Solutions with n = m and k ≥ 3: (F_n)² = P_ℓ forces P_ℓ to be a perfect
/// square, so ℓ ∈ {1, 7} and F_n ∈ {1, 13}; F_n = 1 needs n ≤ 2.
pub fn equal_case(k_range: RangeInclusive<u32>, n_max: u64) -> Vec<Solution> {
    let mut out = Vec::new();
    for (ell, root) in [(1u64, 1u32), (7, 13)] {
        let target = BigUint::from(root);
        for k in k_range.clone() {
            for t in crate::sequences::kfib_upto(k, n_max as i64).expect("k ≥ 2") {
                if t.index >= 3 && t.value == target {
                    let n = t.index as u64;
                    out.push(Solution { n, m: n, k, ell, value: pell(ell) });
                }
                if t.value > target {
                    break;
                }
            }
        }
    }
    out.sort();
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrefixAudit {
    pub ell_max: u64,
    /// (ℓ, j) with P_ℓ = 2^j
    pub powers_of_two: Vec<(u64, u64)>,
    /// Smallest exponent n + m − 4 reachable with n ≥ 5, m ≥ 3.
    pub min_exponent: u64,
    pub k_max: u32,
    /// F^(k)_r = 2^(r−2) verified for 2 ≤ r ≤ k + 1 and all 3 ≤ k ≤ k_max.
    pub prefix_identity_holds: bool,
}

impl PrefixAudit {
    /// No Pell number equals 2^(n+m−4) in the branch n ≤ k + 1.
    pub fn branch_empty(&self) -> bool {
        self.prefix_identity_holds && self.powers_of_two.iter().all(|&(_, j)| j < self.min_exponent)
    }
}

/// Direct scan of Pell numbers that are powers of two, plus the identity
/// F^(k)_r = 2^(r−2) on the prefix 2 ≤ r ≤ k+1 that reduces this branch to
/// 2^(n+m−4) = P_ℓ.
pub fn prefix_case_audit(k_max: u32, ell_max: u64) -> PrefixAudit {
    let powers_of_two = pell_upto(ell_max)
        .filter(|t| t.index >= 1 && t.value.count_ones() == 1)
        .map(|t| (t.index, t.value.bits() - 1))
        .filter(|&(_, j)| j >= 1)
        .collect();
    let prefix_identity_holds = (3..=k_max).into_par_iter().all(|k| {
        let table = KFibTable::new(k, k as u64 + 1).expect("k ≥ 2");
        (2..=k as u64 + 1).all(|r| *table.get(r) == BigUint::one() << (r - 2))
    });
    PrefixAudit { ell_max, powers_of_two, min_exponent: 4, k_max, prefix_identity_holds }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerfectPowerReport {
    pub ell_max: u64,
    pub exp_max: u32,
    /// (ℓ, x, e) with P_ℓ = x^e, e ≥ 2, ℓ ≥ 2
    pub hits: Vec<(u64, BigUint, u32)>,
}

/// Tests P_ℓ = x^e for 2 ≤ ℓ ≤ ell_max and 2 ≤ e ≤ exp_max by integer roots.
pub fn perfect_power_scan(ell_max: u64, exp_max: u32) -> PerfectPowerReport {
    let terms: Vec<_> = pell_upto(ell_max).filter(|t| t.index >= 2).collect();
    let mut hits: Vec<_> = terms
        .par_iter()
        .flat_map_iter(|t| {
            (2..=exp_max).filter_map(move |e| {
                let x = t.value.nth_root(e);
                (x.pow(e) == t.value).then_some((t.index, x, e))
            })
        })
        .collect();
    hits.sort();
    PerfectPowerReport { ell_max, exp_max, hits }
}

/// Whether every solution's ℓ lies in the window 2(n+m)/5 < ℓ < 9(n+m)/10
/// (applicable when k ≥ 3 and n + m ≥ 8).
pub fn window_consistent(sols: &[Solution]) -> bool {
    let ctx = PrecisionContext::new(30).expect("valid");
    sols.iter().filter(|s| s.k >= 3 && s.n + s.m >= 8).all(|s| {
        ell_window(s.n, s.m, ctx).map(|w| w.contains(s.ell)).unwrap_or(false)
    })
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn fast_matches_naive(k_lo in 2u32..6, k_span in 0u32..3, n_max in 3u64..22, ell_max in 1u64..40, c in 0usize..3) {
            let constraint = [PairConstraint::Greater, PairConstraint::Equal, PairConstraint::None][c];
            let b = SearchBox { k: k_lo..=k_lo + k_span, n: 3..=n_max, m: 1..=n_max, ell: 1..=ell_max, constraint, n_beyond_k: false };
            prop_assert_eq!(enumerate(&b), enumerate_naive(&b));
        }
    }
}
