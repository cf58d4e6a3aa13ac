use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use pellfib::apreal::{with_escalation, CertifiedReal, PrecisionContext};
use pellfib::matveev;
use pellfib::pipeline::{self, ProofConfig, RealRecord, Status};
use pellfib::reduction::{self, initial_digits, ReductionOutcome, SmallKReducer};
use pellfib::search::{self, PairConstraint, SearchBox};
use pellfib::sequences;
use pellfib::Error;

#[derive(Parser, Debug)]
#[command(name = "pellfib", version, about = "Certified search for Pell numbers that are products of two k-Fibonacci numbers")]
struct Cli {
    /// Working precision in decimal digits for fixed-precision checks
    #[arg(long, global = true, default_value_t = 60)]
    precision: u32,
    /// Maximum number of precision doublings before giving up
    #[arg(long, global = true, env = "PELLFIB_PRECISION_CEILING", default_value_t = 4)]
    precision_ceiling: u32,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Emit::Text)]
    emit: Emit,
    /// Write output to this file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Emit {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the full proof and emit its certificate
    Prove {
        /// Largest k handled by the small-k reductions
        #[arg(long, default_value_t = 420)]
        k_split: u32,
    },
    /// Run a single Baker–Davenport reduction
    Reduce {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        form: u8,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        m: Option<u64>,
        /// Upper bound on ℓ, e.g. 2e162; defaults to the k-dependent cap
        #[arg(long = "M")]
        m_cap: Option<String>,
    },
    /// Enumerate solutions inside a box
    Search {
        #[arg(long, default_value_t = 3)]
        kmin: u32,
        #[arg(long)]
        kmax: u32,
        #[arg(long)]
        nmax: u64,
        #[arg(long, default_value_t = 1)]
        lmin: u64,
        #[arg(long)]
        lmax: u64,
        /// Only n = m instead of n > m
        #[arg(long)]
        equal: bool,
    },
    /// Check P_ℓ = F^(k)_n F^(k)_m exactly
    Verify { n: u64, m: u64, k: u32, ell: u64 },
    /// Print sequence terms
    Sequences {
        #[command(subcommand)]
        which: Seq,
    },
    /// Linear-form and n/ℓ bounds for a given k
    Bounds {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum Seq {
    Pell {
        #[arg(long)]
        upto: u64,
    },
    Kfib {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        upto: i64,
    },
}

/// Successful output plus whether the result was a positive verdict.
struct Report {
    json: Value,
    text: String,
    ok: bool,
}

fn real(x: &CertifiedReal) -> Value {
    let r = RealRecord::from(x);
    json!({ "lower": r.lower, "upper": r.upper })
}

fn real_text(x: &CertifiedReal) -> String {
    format!("[{}, {}]", x.lower_decimal(20), x.upper_decimal(20))
}

fn outcome_json(o: &ReductionOutcome) -> Value {
    json!({
        "convergent_index": o.convergent_index,
        "q": o.q.to_string(),
        "epsilon": real(&o.epsilon),
        "bound": real(&o.bound),
        "w_bound": o.w_bound.to_string(),
        "attempts": o.attempts,
        "digits": o.digits,
    })
}

fn outcome_text(o: &ReductionOutcome) -> String {
    format!(
        "convergent {} with q = {}\nε ∈ {}\nbound ∈ {}\nW = {}, digits = {}, attempts = {}\n",
        o.convergent_index,
        o.q,
        real_text(&o.epsilon),
        real_text(&o.bound),
        o.w_bound,
        o.digits,
        o.attempts
    )
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T, Error> {
    v.ok_or_else(|| Error::DomainError(format!("{flag} is required here")))
}

fn k_cap(k: u32, ctx: PrecisionContext) -> Result<BigInt, Error> {
    Ok(matveev::bound_ell_of_k(k as u64, ctx)?.1.ell_cap())
}

fn run(cli: &Cli) -> Result<Report, Error> {
    let ctx = PrecisionContext::new(cli.precision)?;
    let doublings = cli.precision_ceiling;
    match &cli.command {
        Command::Prove { k_split } => {
            let config = ProofConfig {
                precision_ceiling: doublings,
                threads: cli.threads,
                k_split: *k_split,
                digits: cli.precision,
                ..ProofConfig::default()
            };
            let cert = pipeline::run_proof(&config);
            if let Status::Failed { precision_limited: true, step, reason } = &cert.body.status {
                eprintln!("precision exhausted at {step}: {reason}");
            }
            let ok = cert.proved();
            let json = serde_json::to_value(&cert).map_err(|e| Error::Parse(e.to_string()))?;
            if let Status::Failed { precision_limited: true, reason, .. } = &cert.body.status {
                // partial certificate is still emitted before the error code
                emit(cli, &Report { json, text: cert.to_text(), ok })?;
                return Err(Error::PrecisionExhausted(reason.clone()));
            }
            Ok(Report { json, text: cert.to_text(), ok })
        }
        Command::Reduce { form, k, m, m_cap } => {
            let cap = |k: Option<u32>| -> Result<BigInt, Error> {
                match (m_cap, k) {
                    (Some(s), _) => reduction::parse_bound(s),
                    (None, Some(k)) => k_cap(k, ctx),
                    (None, None) => Err(Error::DomainError("--M is required here".into())),
                }
            };
            match form {
                1 | 2 => {
                    let k = need(*k, "--k")?;
                    let cap = cap(Some(k))?;
                    let start = PrecisionContext::new(initial_digits(&cap).max(cli.precision))?;
                    if *form == 1 {
                        let r = with_escalation(start, doublings, |c| SmallKReducer::new(k, &cap, c)?.form1())?;
                        Ok(Report {
                            json: json!({ "form": 1, "k": k, "M": cap.to_string(), "A": r.a.to_string(),
                                          "outcome": outcome_json(&r.outcome), "m_bound": r.m_bound }),
                            text: format!("form 1, k = {k}, M = {cap}, A = {}\n{}m ≤ {}\n", r.a, outcome_text(&r.outcome), r.m_bound),
                            ok: true,
                        })
                    } else {
                        let m = need(*m, "--m")?;
                        if m < 3 {
                            return Err(Error::DomainError(format!("m must be at least 3, got {m}")));
                        }
                        let r = with_escalation(start, doublings, |c| SmallKReducer::new(k, &cap, c)?.form2(m))?;
                        Ok(Report {
                            json: json!({ "form": 2, "k": k, "m": m, "M": cap.to_string(),
                                          "outcome": outcome_json(&r.outcome), "n_bound": r.n_bound }),
                            text: format!("form 2, k = {k}, m = {m}, M = {cap}\n{}n ≤ {}\n", outcome_text(&r.outcome), r.n_bound),
                            ok: true,
                        })
                    }
                }
                _ => {
                    let cap = cap(None)?;
                    let r = reduction::reduce_large_k_with(&cap, doublings)?;
                    Ok(Report {
                        json: json!({ "form": 3, "M": cap.to_string(), "outcome": outcome_json(&r.outcome), "k_bound": r.k_bound }),
                        text: format!("form 3, M = {cap}\n{}k ≤ {}\n", outcome_text(&r.outcome), r.k_bound),
                        ok: true,
                    })
                }
            }
        }
        Command::Search { kmin, kmax, nmax, lmin, lmax, equal } => {
            if kmin > kmax || *kmin < 2 {
                return Err(Error::DomainError(format!("need 2 ≤ kmin ≤ kmax, got {kmin}..{kmax}")));
            }
            let b = SearchBox {
                k: *kmin..=*kmax,
                n: 3..=*nmax,
                m: 3..=*nmax,
                ell: *lmin..=*lmax,
                constraint: if *equal { PairConstraint::Equal } else { PairConstraint::Greater },
                n_beyond_k: false,
            };
            let sols = search::enumerate(&b);
            let text: String = sols.iter().map(|s| format!("({}, {}, {}, {}) = {}\n", s.n, s.m, s.k, s.ell, s.value)).collect();
            let json = json!(sols
                .iter()
                .map(|s| json!({ "n": s.n, "m": s.m, "k": s.k, "ell": s.ell, "value": s.value.to_string() }))
                .collect::<Vec<_>>());
            Ok(Report { json, text, ok: true })
        }
        Command::Verify { n, m, k, ell } => {
            let ok = search::verify_solution(*n, *m, *k, *ell);
            let p = sequences::pell(*ell);
            let f = sequences::kfib(*k, *n as i64)? * sequences::kfib(*k, *m as i64)?;
            Ok(Report {
                json: json!({ "holds": ok, "pell": p.to_string(), "product": f.to_string() }),
                text: format!("P_{ell} = {p}\nF^({k})_{n} F^({k})_{m} = {f}\n{}\n", if ok { "holds" } else { "does not hold" }),
                ok,
            })
        }
        Command::Sequences { which } => {
            let terms: Vec<(i64, String)> = match which {
                Seq::Pell { upto } => sequences::pell_upto(*upto).map(|t| (t.index as i64, t.value.to_string())).collect(),
                Seq::Kfib { k, upto } => sequences::kfib_upto(*k, *upto)?.map(|t| (t.index, t.value.to_string())).collect(),
            };
            Ok(Report {
                json: json!(terms.iter().map(|(i, v)| json!({ "index": i, "value": v })).collect::<Vec<_>>()),
                text: terms.iter().map(|(i, v)| format!("{i} {v}\n")).collect(),
                ok: true,
            })
        }
        Command::Bounds { k, n } => {
            let (_, b) = matveev::bound_n_of_k(*k as u64, ctx)?;
            let mut json = json!({
                "k": k,
                "n_stated": real(&b.n_stated),
                "n_derived": real(&b.n_derived),
                "n_stated_certified": b.n_stated_holds,
                "ell_stated": real(&b.ell_stated),
                "ell_cap": b.ell_cap().to_string(),
            });
            let mut text = format!(
                "k = {k}\nn < {} (derived {})\nℓ < {}\n",
                real_text(&b.n_stated),
                real_text(&b.n_derived),
                real_text(&b.ell_stated)
            );
            if !b.n_stated_holds {
                text.push_str("the stated n-bound is not certified at this k; the derived one applies\n");
            }
            if let Some(n) = n {
                let n = reduction::parse_bound(n)?;
                let mut forms = Vec::new();
                for d in [matveev::bound_e1(*k, &n, ctx)?, matveev::bound_e2(*k, &n, ctx)?, matveev::bound_e3(*k, &n, ctx)?] {
                    let what = if d.name == matveev::BoundName::E2 { "m log α <" } else { "log|Λ| >" };
                    text.push_str(&format!("{:?}: {what} {}\n", d.name, real_text(&d.value)));
                    forms.push(json!({ "name": format!("{:?}", d.name), "value": real(&d.value) }));
                }
                json["forms"] = json!(forms);
                json["n"] = json!(n.to_string());
            }
            Ok(Report { json, text, ok: true })
        }
    }
}

fn emit(cli: &Cli, r: &Report) -> Result<(), Error> {
    let body = match cli.emit {
        Emit::Json => serde_json::to_string_pretty(&r.json).map_err(|e| Error::Parse(e.to_string()))? + "\n",
        Emit::Text => r.text.clone(),
    };
    match &cli.out {
        Some(p) => std::fs::write(p, body).map_err(|e| Error::DomainError(format!("{}: {e}", p.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|r| emit(&cli, &r).map(|_| r.ok));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if e.is_precision_limited() => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(e @ Error::VerificationFailed(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
