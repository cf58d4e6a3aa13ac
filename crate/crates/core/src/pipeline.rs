//! End-to-end proof run and its replayable certificate.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::apreal::{CertifiedReal, PrecisionContext};
use crate::error::{Error, Result};
use crate::matveev::{self, ell_window, EllWindow};
use crate::reduction::{self, Form1Result, Form2Result, SmallKReducer};
use crate::search::{self, PairConstraint, SearchBox, Solution};
use crate::sequences::DEFAULT_DOUBLINGS;

pub const TOOL_NAME: &str = "pellfib";

/// The solution set the run is expected to reproduce.
pub const EXPECTED: [(u64, u64, u32, u64); 3] = [(6, 6, 3, 7), (7, 7, 2, 7), (15, 3, 5, 12)];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofConfig {
    /// Maximum number of precision doublings per computation.
    pub precision_ceiling: u32,
    /// Worker threads; `None` uses the available parallelism.
    pub threads: Option<usize>,
    /// Largest k handled by the small-k branch.
    pub k_split: u32,
    pub k_min: u32,
    /// Digits for the fixed-size certified checks.
    pub digits: u32,
}

impl Default for ProofConfig {
    fn default() -> Self {
        Self { precision_ceiling: DEFAULT_DOUBLINGS, threads: None, k_split: 420, k_min: 3, digits: 60 }
    }
}

impl ProofConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_min < 3 || self.k_split < self.k_min {
            return Err(Error::DomainError(format!(
                "need 3 ≤ k_min ≤ k_split, got k_min = {}, k_split = {}",
                self.k_min, self.k_split
            )));
        }
        if self.threads == Some(0) {
            return Err(Error::DomainError("thread count must be positive".into()));
        }
        PrecisionContext::new(self.digits)?;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    MatveevBound,
    Reduction,
    Search,
    OracleCitation,
}

/// Certified real as outward-rounded decimal endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealRecord {
    pub lower: String,
    pub upper: String,
}

impl From<&CertifiedReal> for RealRecord {
    fn from(x: &CertifiedReal) -> Self {
        Self { lower: x.lower_decimal(20), upper: x.upper_decimal(20) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub id: String,
    pub kind: StepKind,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
    pub digits: Option<u32>,
}

impl Step {
    fn new(id: &str, kind: StepKind) -> Self {
        Self { id: id.into(), kind, inputs: BTreeMap::new(), outputs: BTreeMap::new(), digits: None }
    }

    fn input(mut self, k: &str, v: impl ToString) -> Self {
        self.inputs.insert(k.into(), v.to_string());
        self
    }

    fn output(mut self, k: &str, v: impl ToString) -> Self {
        self.outputs.insert(k.into(), v.to_string());
        self
    }

    fn real(self, k: &str, v: &CertifiedReal) -> Self {
        let r = RealRecord::from(v);
        self.output(&format!("{k}.lower"), r.lower).output(&format!("{k}.upper"), r.upper)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Form1Record {
    pub k: u32,
    pub m_cap: String,
    pub stated_n_bound_certified: bool,
    pub a: String,
    pub convergent_index: usize,
    pub q: String,
    pub next_q: Option<String>,
    pub epsilon: RealRecord,
    pub w_bound: String,
    pub m_bound: u64,
    pub attempts: usize,
    pub digits: u32,
}

impl Form1Record {
    fn new(r: &Form1Result, m_cap: &BigInt, stated_n_bound_certified: bool) -> Self {
        let o = &r.outcome;
        Self {
            k: r.k,
            m_cap: m_cap.to_string(),
            stated_n_bound_certified,
            a: r.a.to_string(),
            convergent_index: o.convergent_index,
            q: o.q.to_string(),
            next_q: o.next_q.as_ref().map(ToString::to_string),
            epsilon: (&o.epsilon).into(),
            w_bound: o.w_bound.to_string(),
            m_bound: r.m_bound,
            attempts: o.attempts,
            digits: o.digits,
        }
    }
}

/// Aggregate of the form-2 reductions for one k over m ∈ [3, m_bound].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Form2Summary {
    pub k: u32,
    pub m_max: u64,
    pub pairs: usize,
    pub max_n_bound: u64,
    pub argmax_m: u64,
    pub min_epsilon_lower: String,
    pub max_attempts: usize,
    pub max_digits: u32,
}

impl Form2Summary {
    fn new(k: u32, results: &[Form2Result]) -> Self {
        let best = results.iter().max_by_key(|r| (r.n_bound, std::cmp::Reverse(r.m))).expect("nonempty");
        let min_eps = results
            .iter()
            .map(|r| &r.outcome.epsilon)
            .reduce(|a, b| if b.lower_ulps_cmp(a) { b } else { a })
            .expect("nonempty");
        Self {
            k,
            m_max: results.iter().map(|r| r.m).max().unwrap_or(0),
            pairs: results.len(),
            max_n_bound: best.n_bound,
            argmax_m: best.m,
            min_epsilon_lower: min_eps.lower_decimal(6),
            max_attempts: results.iter().map(|r| r.outcome.attempts).max().unwrap_or(0),
            max_digits: results.iter().map(|r| r.outcome.digits).max().unwrap_or(0),
        }
    }
}

trait LowerCmp {
    fn lower_ulps_cmp(&self, other: &Self) -> bool;
}

impl LowerCmp for CertifiedReal {
    /// Whether self's lower endpoint is below other's.
    fn lower_ulps_cmp(&self, other: &Self) -> bool {
        let c = self.context().max(other.context());
        self.with_context(c).lower_ulps() < other.with_context(c).lower_ulps()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub n: u64,
    pub m: u64,
    pub k: u32,
    pub ell: u64,
    pub value: String,
    pub source: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum Status {
    Proved,
    Failed { step: String, reason: String, precision_limited: bool },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxRecord {
    pub k_max: u32,
    pub n_max: u64,
    pub m_min: u64,
    pub ell_min: u64,
    pub ell_max: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateBody {
    pub config: ProofConfig,
    pub steps: Vec<Step>,
    pub form1: Vec<Form1Record>,
    pub form2: Vec<Form2Summary>,
    pub search_box: Option<BoxRecord>,
    pub solutions: Vec<SolutionRecord>,
    pub status: Status,
}

/// Run metadata that varies between runs and is excluded from replay
/// comparisons.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateHeader {
    pub tool: String,
    pub version: String,
    pub started_unix: u64,
    /// Wall times in seconds, as decimal strings.
    pub total_seconds: String,
    pub step_seconds: BTreeMap<String, String>,
    pub threads: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProofCertificate {
    pub header: CertificateHeader,
    pub body: CertificateBody,
}

impl ProofCertificate {
    pub fn proved(&self) -> bool {
        self.body.status == Status::Proved
    }

    pub fn solution_tuples(&self) -> Vec<(u64, u64, u32, u64)> {
        self.body.solutions.iter().map(|s| (s.n, s.m, s.k, s.ell)).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// The replay-relevant part only.
    pub fn body_json(&self) -> String {
        serde_json::to_string_pretty(&self.body).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.body.steps {
            out.push_str(&format!("[{:?}] {}\n", s.kind, s.id));
            for (k, v) in &s.outputs {
                out.push_str(&format!("    {k} = {v}\n"));
            }
        }
        if let Some(b) = &self.body.search_box {
            out.push_str(&format!(
                "search box: 3 ≤ k ≤ {}, k+2 ≤ n ≤ {}, {} ≤ m < n, {} ≤ ℓ ≤ {}\n",
                b.k_max, b.n_max, b.m_min, b.ell_min, b.ell_max
            ));
        }
        out.push_str("solutions (n, m, k, ℓ):\n");
        for s in &self.body.solutions {
            out.push_str(&format!("    ({}, {}, {}, {}) = {} [{}]\n", s.n, s.m, s.k, s.ell, s.value, s.source));
        }
        match &self.body.status {
            Status::Proved => out.push_str("status: PROVED\n"),
            Status::Failed { step, reason, .. } => out.push_str(&format!("status: FAILED at {step}: {reason}\n")),
        }
        out
    }
}

struct Run {
    config: ProofConfig,
    ctx: PrecisionContext,
    steps: Vec<Step>,
    timings: BTreeMap<String, String>,
    form1: Vec<Form1Record>,
    form2: Vec<Form2Summary>,
    search_box: Option<BoxRecord>,
    solutions: Vec<SolutionRecord>,
    /// (k, m, n-bound) for every form-2 reduction
    small_n_bounds: Vec<(u32, u64, u64)>,
}

/// A failed step: its id and the error.
type StepError = (String, Error);

fn fail<T>(step: &str, e: Error) -> std::result::Result<T, StepError> {
    Err((step.to_string(), e))
}

fn check(step: &str, ok: bool, what: &str) -> std::result::Result<(), StepError> {
    if ok {
        Ok(())
    } else {
        fail(step, Error::VerificationFailed(what.to_string()))
    }
}

fn lit(s: &str, ctx: PrecisionContext) -> CertifiedReal {
    CertifiedReal::from_decimal(s, ctx).expect("valid literal")
}

/// Per-k small-branch result.
struct SmallK {
    form1: Form1Record,
    form2: Form2Summary,
    max_n: u64,
    m_bound: u64,
    n_bounds: Vec<(u64, u64)>,
}

impl Run {
    fn timed<T>(&mut self, id: &str, f: impl FnOnce(&mut Self) -> std::result::Result<T, StepError>) -> std::result::Result<T, StepError> {
        let t = Instant::now();
        let r = f(self);
        self.timings.insert(id.to_string(), seconds(t));
        r
    }

    fn push(&mut self, mut step: Step, digits: Option<u32>) {
        step.digits = digits;
        self.steps.push(step);
    }

    fn side_branches(&mut self) -> std::result::Result<(), StepError> {
        self.push(
            Step::new("k2_prior_result", StepKind::OracleCitation)
                .input("k", 2)
                .output("solutions_with_m_at_least_3", "(7,7,2,7)"),
            None,
        );
        let k2 = search::enumerate(&SearchBox {
            k: 2..=2,
            n: 3..=30,
            m: 3..=30,
            ell: 1..=59,
            constraint: PairConstraint::None,
            n_beyond_k: false,
        });
        let tuples: Vec<_> = k2.iter().map(Solution::tuple).collect();
        self.push(
            Step::new("k2_desk_search", StepKind::Search)
                .input("box", "k=2, 3≤m≤n≤30, ℓ≤59")
                .output("solutions", format!("{tuples:?}")),
            None,
        );
        check("k2_desk_search", tuples == [(7, 7, 2, 7)], "k = 2 desk search disagrees with the cited result")?;
        for s in &k2 {
            self.solutions.push(record(s, "k2_prior_result"));
        }

        self.push(
            Step::new("pell_perfect_powers", StepKind::OracleCitation)
                .output("statement", "P_ℓ = x^e with e ≥ 2 only for (ℓ, x, e) = (1, 1, e), (7, 13, 2)"),
            None,
        );
        let scan = search::perfect_power_scan(2000, 64);
        let hits: Vec<_> = scan.hits.iter().map(|(l, x, e)| (*l, x.to_string(), *e)).collect();
        self.push(
            Step::new("pell_perfect_power_scan", StepKind::Search)
                .input("ell_max", 2000)
                .input("exp_max", 64)
                .output("hits", format!("{hits:?}")),
            None,
        );
        check("pell_perfect_power_scan", hits == [(7, "13".to_string(), 2)], "unexpected Pell perfect power")?;

        let k_max = self.config.k_split;
        let eq = search::equal_case(3..=k_max, k_max as u64 + 8);
        let eq_tuples: Vec<_> = eq.iter().map(Solution::tuple).collect();
        self.push(
            Step::new("equal_case", StepKind::Search)
                .input("k_range", format!("[3, {k_max}]"))
                .output("reason", "F_n² = P_ℓ forces ℓ = 7, F_n = 13; for k ≥ 4 the terms skip 13")
                .output("solutions", format!("{eq_tuples:?}")),
            None,
        );
        check("equal_case", eq_tuples == [(6, 6, 3, 7)], "equal case should give only (6, 6, 3, 7)")?;
        for s in &eq {
            self.solutions.push(record(s, "equal_case"));
        }

        let audit = search::prefix_case_audit(200, 500);
        self.push(
            Step::new("prefix_case_audit", StepKind::Search)
                .input("k_max", audit.k_max)
                .input("ell_max", audit.ell_max)
                .output("pell_powers_of_two", format!("{:?}", audit.powers_of_two))
                .output("min_exponent", audit.min_exponent)
                .output("prefix_identity_holds", audit.prefix_identity_holds),
            None,
        );
        check("prefix_case_audit", audit.branch_empty(), "a Pell number equals 2^(n+m−4)")
    }

    fn matveev_checks(&mut self) -> std::result::Result<(), StepError> {
        let ctx = self.ctx;
        let id = "matveev_coefficients";
        let audits = matveev::coefficient_audits(ctx).or_else(|e| fail(id, e))?;
        let mut step = Step::new(id, StepKind::MatveevBound);
        for a in &audits {
            let name = format!("{:?}", a.name);
            step = step.real(&format!("{name}.computed"), &a.computed).output(&format!("{name}.stated"), a.stated.center_decimal(4));
        }
        let all = audits.iter().all(|a| a.holds());
        self.push(step.output("all_hold", all), Some(ctx.digits()));
        check(id, all, "a Matveev coefficient exceeds its stated value")?;
        check(id, matveev::simplification_lemmas_hold(), "simplification lemmas")?;
        let a3 = matveev::alpha3_exceeds("1.83", ctx).or_else(|e| fail(id, e))?;
        check(id, a3, "α(3) > 1.83")
    }

    fn small_k(&mut self) -> std::result::Result<(u64, u64), StepError> {
        let ctx = self.ctx;
        let ks: Vec<u32> = (self.config.k_min..=self.config.k_split).collect();
        let doublings = self.config.precision_ceiling;
        // collecting into a Result stops scheduling new k after a failure
        let results: Vec<SmallK> = ks.par_iter().map(|&k| small_k_one(k, ctx, doublings)).collect::<std::result::Result<_, _>>()?;
        let mut global_m = 0;
        let mut global_n = 0;
        let mut n_bounds = Vec::new();
        let mut per_k = Vec::new();
        for r in results {
            global_m = global_m.max(r.m_bound);
            global_n = global_n.max(r.max_n);
            n_bounds.extend(r.n_bounds.iter().map(|&(m, n)| (r.form1.k, m, n)));
            per_k.push(r);
        }
        let stated_fail: Vec<u32> = per_k.iter().filter(|r| !r.form1.stated_n_bound_certified).map(|r| r.form1.k).collect();
        let a_not_32: Vec<String> = per_k.iter().filter(|r| r.form1.a != "32").map(|r| format!("{}:{}", r.form1.k, r.form1.a)).collect();
        let (k_lo, k_hi) = (self.config.k_min, self.config.k_split);
        self.push(
            Step::new("n_and_ell_of_k", StepKind::MatveevBound)
                .input("k_range", format!("[{k_lo}, {k_hi}]"))
                .output("ell_cap", "M_k = ⌊1.7e31 k⁸ log⁵k⌋, certified ≥ 2·(sound n-bound) for every k")
                .output("stated_n_bound_not_certified_at", format!("{stated_fail:?}")),
            Some(ctx.digits()),
        );
        self.push(
            Step::new("form1_reductions", StepKind::Reduction)
                .input("k_range", format!("[{k_lo}, {k_hi}]"))
                .input("a", "⌈20/log α(k)⌉")
                .output("a_differs_from_32", format!("{a_not_32:?}"))
                .output("max_m_bound", global_m)
                .output("m_below_5", "m ∈ {3, 4} left to the final search"),
            None,
        );
        self.push(
            Step::new("form2_reductions", StepKind::Reduction)
                .input("pairs", per_k.iter().map(|r| r.form2.pairs).sum::<usize>())
                .input("a", 10)
                .output("max_n_bound", global_n),
            None,
        );
        for r in per_k {
            self.form1.push(r.form1);
            self.form2.push(r.form2);
        }
        self.small_n_bounds = n_bounds;
        Ok((global_m, global_n))
    }
}

fn small_k_one(k: u32, ctx: PrecisionContext, doublings: u32) -> std::result::Result<SmallK, StepError> {
    let id = format!("small_k[{k}]");
    let (_, bounds) = matveev::bound_ell_of_k(k as u64, ctx).or_else(|e| fail(&id, e))?;
    if !bounds.ell_stated_holds {
        return fail(&id, Error::DominanceViolation(format!("ℓ-bound at k = {k}")));
    }
    let m_cap = bounds.ell_cap();
    let start = PrecisionContext::new(reduction::initial_digits(&m_cap)).or_else(|e| fail(&id, e))?;
    let mut reducer = crate::apreal::with_escalation(start, doublings, |c| SmallKReducer::new(k, &m_cap, c))
        .or_else(|e| fail(&id, e))?;
    let f1 = with_reducer(&mut reducer, doublings, |r| r.form1()).or_else(|e| fail(&id, e))?;
    let mut f2 = Vec::new();
    for m in 3..=f1.m_bound {
        f2.push(with_reducer(&mut reducer, doublings, |r| r.form2(m)).or_else(|e| fail(&id, e))?);
    }
    let max_n = f2.iter().map(|r| r.n_bound).max().unwrap_or(0);
    Ok(SmallK {
        form1: Form1Record::new(&f1, &m_cap, bounds.n_stated_holds),
        form2: Form2Summary::new(k, &f2),
        max_n,
        m_bound: f1.m_bound,
        n_bounds: f2.iter().map(|r| (r.m, r.n_bound)).collect(),
    })
}

/// Runs `f`, upgrading the shared reducer in place on precision failures.
fn with_reducer<T>(reducer: &mut SmallKReducer, doublings: u32, f: impl Fn(&SmallKReducer) -> Result<T>) -> Result<T> {
    for _ in 0..=doublings {
        match f(reducer) {
            Err(e) if e.is_precision_limited() => *reducer = reducer.doubled()?,
            other => return other,
        }
    }
    f(reducer)
}

fn seconds(t: Instant) -> String {
    format!("{:.3}", t.elapsed().as_secs_f64())
}

fn record(s: &Solution, source: &str) -> SolutionRecord {
    SolutionRecord { n: s.n, m: s.m, k: s.k, ell: s.ell, value: s.value.to_string(), source: source.into() }
}

impl Run {
    fn final_search(&mut self, global_m: u64, global_n: u64) -> std::result::Result<(), StepError> {
        let id = "final_search";
        let n_max = global_n;
        let k_max = (n_max.saturating_sub(2)).min(self.config.k_split as u64) as u32;
        // ℓ ≥ 5 since P_ℓ ≥ F^(3)_5 F^(3)_3 = 14
        let ell_min = crate::sequences::pell_upto(10).find(|t| t.value >= 14u32.into()).map(|t| t.index).unwrap_or(1);
        let window: EllWindow = ell_window(n_max, n_max - 1, self.ctx).or_else(|e| fail(id, e))?;
        let ell_max = window.max_ell();
        let b = SearchBox::proof_box(k_max, n_max, ell_min, ell_max);
        let found = search::enumerate(&b);
        let tuples: Vec<_> = found.iter().map(Solution::tuple).collect();
        self.search_box = Some(BoxRecord { k_max, n_max, m_min: 3, ell_min, ell_max });
        self.push(
            Step::new(id, StepKind::Search)
                .input("k_max", k_max)
                .input("n_max", n_max)
                .input("m_bound_form1", global_m)
                .input("ell_range", format!("[{ell_min}, {ell_max}]"))
                .output("solutions", format!("{tuples:?}")),
            None,
        );
        check(id, search::window_consistent(&found), "a solution lies outside the ℓ window")?;
        // every recorded bound must admit the solutions found
        for s in &found {
            let f1 = self.form1.iter().find(|r| r.k == s.k);
            let ok_m = s.m < 5 || f1.is_some_and(|r| s.m <= r.m_bound);
            let ok_n = self.small_n_bounds.iter().any(|&(k, m, n)| k == s.k && m == s.m && s.n <= n);
            check(id, ok_m && ok_n, &format!("solution {:?} violates a recorded bound", s.tuple()))?;
        }
        for s in &found {
            self.solutions.push(record(s, "final_search"));
        }
        Ok(())
    }

    fn large_k(&mut self) -> std::result::Result<(), StepError> {
        let ctx = self.ctx;
        let id = "absolute_bounds";
        let abs = matveev::absolute_bounds(ctx).or_else(|e| fail(id, e))?;
        let below = matveev::n_below_two_pow_half_k(ctx).or_else(|e| fail(id, e))?;
        self.push(
            Step::new(id, StepKind::MatveevBound)
                .input("chain", "k < 3.2e12 log n, log n < 22 log k ⇒ k < 7.1e13 log k")
                .real("k", &abs.k)
                .real("n", &abs.n)
                .real("ell", &abs.ell)
                .output("fixed_point_iterations", abs.iterations)
                .output("n_below_2^(k/2)", below),
            Some(ctx.digits()),
        );
        check(id, abs.within_stated(), "absolute bounds exceed 2.6e15 / 9.8e161 / 2e162")?;
        check(id, below, "n < 2^(k/2) for k > 420")?;

        let m1 = reduction::parse_bound("2e162").expect("literal");
        check(id, abs.ell.certainly_le(&CertifiedReal::from_integer(m1.clone(), ctx)), "ℓ < 2e162")?;
        let doublings = self.config.precision_ceiling;
        let first = self.timed("large_k_pass1", |_| {
            reduction::reduce_large_k_with(&m1, doublings).or_else(|e| fail("large_k_pass1", e))
        })?;
        self.push(large_k_step("large_k_pass1", &first), Some(first.outcome.digits));

        let id = "large_k_rebound";
        let (n1, ell1) = matveev::caps_for_k_up_to(&CertifiedReal::from_integer(first.k_bound, ctx)).or_else(|e| fail(id, e))?;
        let m2 = reduction::parse_bound("6.6e59").expect("literal");
        let m2_cert = CertifiedReal::from_integer(m2.clone(), ctx);
        let ok = n1.certainly_lt(&lit("3.3e59", ctx)) && ell1.certainly_lt(&m2_cert);
        self.push(
            Step::new(id, StepKind::MatveevBound)
                .input("k_bound", first.k_bound)
                .real("n", &n1)
                .real("ell", &ell1)
                .output("next_m", &m2),
            Some(ctx.digits()),
        );
        check(id, ok, "n < 3.3e59 and ℓ < 6.6e59")?;

        let second = self.timed("large_k_pass2", |_| {
            reduction::reduce_large_k_with(&m2, doublings).or_else(|e| fail("large_k_pass2", e))
        })?;
        let closes = second.k_bound <= self.config.k_split as u64;
        self.push(
            large_k_step("large_k_pass2", &second).output("contradicts_k_above_split", closes),
            Some(second.outcome.digits),
        );
        check("large_k_pass2", closes, "second pass does not reach the split point")
    }
}

fn large_k_step(id: &str, r: &reduction::LargeKResult) -> Step {
    let o = &r.outcome;
    Step::new(id, StepKind::Reduction)
        .input("M", &r.m_cap)
        .input("tau", "log γ / log 2")
        .input("mu", "-1/2")
        .input("A", 26)
        .input("B", "√2")
        .output("convergent_index", o.convergent_index)
        .output("q", &o.q)
        .real("epsilon", &o.epsilon)
        .real("bound", &o.bound)
        .output("k_bound", r.k_bound)
}

/// Executes the whole proof and returns its certificate. Any failure stops
/// the run and is recorded as the certificate's status.
pub fn run_proof(config: &ProofConfig) -> ProofCertificate {
    let started = Instant::now();
    let started_unix = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let ctx = PrecisionContext::new(config.digits.max(30)).expect("valid");
    let mut run = Run {
        config: config.clone(),
        ctx,
        steps: Vec::new(),
        timings: BTreeMap::new(),
        form1: Vec::new(),
        form2: Vec::new(),
        search_box: None,
        solutions: Vec::new(),
        small_n_bounds: Vec::new(),
    };
    let threads = config.threads.unwrap_or_else(rayon::current_num_threads);
    let outcome = match config.validate() {
        Err(e) => Err(("config".to_string(), e)),
        Ok(()) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build();
            let body = |run: &mut Run| -> std::result::Result<(), StepError> {
                run.timed("side_branches", |r| r.side_branches())?;
                run.timed("matveev", |r| r.matveev_checks())?;
                let (m, n) = run.timed("small_k", |r| r.small_k())?;
                run.timed("final_search", |r| r.final_search(m, n))?;
                run.timed("large_k", |r| r.large_k())
            };
            match pool {
                Ok(p) => p.install(|| body(&mut run)),
                Err(e) => Err(("config".to_string(), Error::DomainError(e.to_string()))),
            }
        }
    };
    run.solutions.sort_by_key(|s| (s.n, s.m, s.k, s.ell));
    let status = match outcome {
        Err((step, e)) => Status::Failed { step, precision_limited: e.is_precision_limited(), reason: e.to_string() },
        Ok(()) => {
            let got: Vec<_> = run.solutions.iter().map(|s| (s.n, s.m, s.k, s.ell)).collect();
            if got == EXPECTED {
                Status::Proved
            } else {
                Status::Failed {
                    step: "solution_set".into(),
                    reason: format!("found {got:?}, expected {EXPECTED:?}"),
                    precision_limited: false,
                }
            }
        }
    };
    ProofCertificate {
        header: CertificateHeader {
            tool: TOOL_NAME.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            started_unix,
            total_seconds: seconds(started),
            step_seconds: run.timings,
            threads,
        },
        body: CertificateBody {
            // the thread count lives in the header so replays compare equal
            config: ProofConfig { threads: None, ..config.clone() },
            steps: run.steps,
            form1: run.form1,
            form2: run.form2,
            search_box: run.search_box,
            solutions: run.solutions,
            status,
        },
    }
}
