//! Numeric feasibility search for existential real systems.
//!
//! Random restarts of a penalty descent; a converged point is rounded to
//! rationals and accepted only if [`verify`] passes in exact arithmetic.
//! Infeasibility is never reported: failure to find a witness is `Unknown`.

pub mod lm;

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::realc::{Constraint, ConstraintRel, RealSystem};
use crate::scalar::{format_rational, rationalize, Rational, Scalar};

pub const DEFAULT_TOL: f64 = 1e-7;
pub const DEFAULT_RESTARTS: usize = 64;
pub const DEFAULT_MAX_DEN: u64 = 1_000_000;

/// Denominator caps tried in turn when rounding a numeric point.
const DEN_LADDER: [u64; 12] = [1, 2, 3, 4, 6, 8, 12, 24, 60, 360, 2520, 27720];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveConfig {
    pub restarts: usize,
    pub max_iters: u64,
    pub tol: f64,
    pub seed: u64,
    pub max_den: u64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            restarts: DEFAULT_RESTARTS,
            max_iters: 300,
            tol: DEFAULT_TOL,
            seed: 0,
            max_den: DEFAULT_MAX_DEN,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Sat,
    Unknown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: Status,
    /// Variable name → value.
    pub witness: Option<BTreeMap<String, Rational>>,
    pub residual: f64,
    /// Whether every constraint holds exactly under the witness.
    pub exact: bool,
    pub iterations: u64,
    pub restarts: usize,
    pub seed: u64,
}

impl SolveResult {
    pub fn to_json(&self) -> Value {
        json!({
            "status": if self.status == Status::Sat { "SAT" } else { "UNKNOWN" },
            "witness": self.witness.as_ref().map(|w| {
                w.iter().map(|(k, v)| (k.clone(), Value::String(format_rational(v)))).collect::<serde_json::Map<_, _>>()
            }),
            "residual": self.residual,
            "exact": self.exact,
            "iterations": self.iterations,
            "restarts": self.restarts,
            "seed": self.seed,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub ok: bool,
    pub residual: f64,
    /// Constraints satisfied only within the tolerance.
    pub inexact: Vec<usize>,
}

struct Attempt {
    witness: Option<(BTreeMap<usize, Rational>, VerifyReport)>,
    iterations: u64,
}

pub fn solve(sys: &RealSystem, cfg: &SolveConfig) -> Result<SolveResult> {
    let (unknowns, constraints) = sys.existential_constraints()?;
    let problem = lm::Problem {
        constraints: &constraints,
        columns: &unknowns,
        num_vars: sys.vars.len(),
    };
    let batch = rayon::current_num_threads().max(1);
    let mut iterations = 0;
    let mut start = 0;
    while start < cfg.restarts {
        let end = (start + batch).min(cfg.restarts);
        let attempts: Vec<Attempt> = (start..end)
            .into_par_iter()
            .map(|i| attempt(sys, &problem, &constraints, cfg, i))
            .collect();
        for (offset, a) in attempts.into_iter().enumerate() {
            iterations += a.iterations;
            if let Some((values, report)) = a.witness {
                return Ok(SolveResult {
                    status: Status::Sat,
                    witness: Some(sys.named(&values)),
                    residual: report.residual,
                    exact: report.inexact.is_empty(),
                    iterations,
                    restarts: start + offset + 1,
                    seed: cfg.seed,
                });
            }
        }
        start = end;
    }
    Ok(SolveResult {
        status: Status::Unknown,
        witness: None,
        residual: f64::NAN,
        exact: false,
        iterations,
        restarts: cfg.restarts,
        seed: cfg.seed,
    })
}

fn attempt(
    sys: &RealSystem,
    p: &lm::Problem<'_>,
    cs: &[Constraint],
    cfg: &SolveConfig,
    index: usize,
) -> Attempt {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let u0: Vec<f64> = p.columns.iter().map(|_| rng.gen_range(0.0..1.0)).collect();
    let d = p.descend(u0, cfg.max_iters, cfg.tol * cfg.tol);
    let mut out = Attempt {
        witness: None,
        iterations: d.iterations,
    };
    if d.cost > cfg.tol * cfg.tol {
        return out;
    }
    let caps = DEN_LADDER
        .iter()
        .copied()
        .filter(|&c| c < cfg.max_den)
        .chain([cfg.max_den]);
    for cap in caps {
        let values: BTreeMap<usize, Rational> = p
            .columns
            .iter()
            .zip(&d.x)
            .map(|(&col, &v)| (col, rationalize(if v.abs() < 1e-12 { 0.0 } else { v }, cap)))
            .collect();
        let report = check(sys, cs, &values, cfg.tol).expect("all unknowns assigned");
        if report.ok && (report.inexact.is_empty() || cap == cfg.max_den) {
            out.witness = Some((values, report));
            return out;
        }
    }
    out
}

/// Exact check of a named witness against an existential system.
pub fn verify(
    sys: &RealSystem,
    witness: &BTreeMap<String, Rational>,
    tol: f64,
) -> Result<VerifyReport> {
    let (unknowns, constraints) = sys.existential_constraints()?;
    let mut values = BTreeMap::new();
    for id in unknowns {
        let name = &sys.vars[id].name;
        let v = witness
            .get(name)
            .ok_or_else(|| Error::MissingVariable(name.clone()))?;
        values.insert(id, v.clone());
    }
    check(sys, &constraints, &values, tol)
}

fn check(
    sys: &RealSystem,
    cs: &[Constraint],
    values: &BTreeMap<usize, Rational>,
    tol: f64,
) -> Result<VerifyReport> {
    let mut exact = vec![None; sys.vars.len()];
    for (id, v) in values {
        exact[*id] = Some(v.clone());
    }
    let approx: Vec<f64> = exact
        .iter()
        .map(|v| v.as_ref().map_or(0.0, Scalar::to_f64))
        .collect();
    let mut residual: f64 = 0.0;
    let mut inexact = Vec::new();
    let mut ok = true;
    for (i, c) in cs.iter().enumerate() {
        let (holds, viol) = match (c.lhs.eval_exact(&exact)?, c.rhs.eval_exact(&exact)?) {
            (Some(a), Some(b)) => {
                let diff = a.clone() - b.clone();
                match c.rel {
                    ConstraintRel::Eq => (diff.is_zero(), diff.abs().to_f64()),
                    ConstraintRel::Le => (!diff.is_positive(), diff.to_f64().max(0.0)),
                    ConstraintRel::Lt => {
                        let neg = Signed::is_negative(&diff);
                        (neg, if neg { 0.0 } else { 1.0 })
                    }
                    ConstraintRel::Ne => (!diff.is_zero(), if diff.is_zero() { 1.0 } else { 0.0 }),
                }
            }
            _ => {
                let diff = c.lhs.eval_f64(&approx) - c.rhs.eval_f64(&approx);
                let viol = match c.rel {
                    ConstraintRel::Eq => diff.abs(),
                    ConstraintRel::Le => diff.max(0.0),
                    ConstraintRel::Lt => {
                        if diff < -tol {
                            0.0
                        } else {
                            1.0
                        }
                    }
                    ConstraintRel::Ne => {
                        if diff.abs() > tol {
                            0.0
                        } else {
                            1.0
                        }
                    }
                };
                (false, viol)
            }
        };
        residual = residual.max(viol);
        if !holds {
            let tolerable = matches!(c.rel, ConstraintRel::Eq | ConstraintRel::Le) && viol <= tol;
            if tolerable {
                inexact.push(i);
            } else {
                ok = false;
            }
        }
    }
    Ok(VerifyReport {
        ok,
        residual,
        inexact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realc::{compile, Fragment, Mode, RFormula, RRel, RTerm, RealVar};
    use crate::structure::Structure;
    use crate::syntax::parser::parse;
    use crate::team::WeightedTeam;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn toy(second: RFormula) -> RealSystem {
        let s = RTerm::Var(0);
        let body = RFormula::Exists(
            vec![0],
            Box::new(RFormula::And(vec![
                RFormula::Atom(RTerm::zero(), RRel::Le, s),
                second,
            ])),
        );
        RealSystem {
            mode: Mode::Sat,
            fragment: Fragment::Existential,
            free_vars: vec![],
            vars: vec![RealVar {
                name: "s".into(),
                assignment: None,
                fixed: None,
            }],
            outer: vec![0],
            body,
            stats: Default::default(),
        }
    }

    #[test]
    fn forced_and_infeasible_toys() {
        let sys = toy(RFormula::Atom(
            RTerm::Var(0),
            RRel::Eq,
            RTerm::Const(q(1, 1)),
        ));
        let r = solve(&sys, &SolveConfig::default()).unwrap();
        assert_eq!(r.status, Status::Sat);
        assert_eq!(r.witness.unwrap()["s"], q(1, 1));
        let sys = toy(RFormula::Atom(
            RTerm::Add(vec![RTerm::Var(0), RTerm::Const(q(1, 1))]),
            RRel::Eq,
            RTerm::zero(),
        ));
        let r = solve(
            &sys,
            &SolveConfig {
                restarts: 4,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(r.status, Status::Unknown);
    }

    #[test]
    fn verify_residuals() {
        let st = Structure::with_size(2).unwrap();
        let sys = compile(&st, &parse("indep( ; x ; y)").unwrap(), Mode::Sat, None).unwrap();
        let mut w: BTreeMap<String, Rational> =
            ["s_v_e0_e0", "s_v_e0_e1", "s_v_e1_e0", "s_v_e1_e1"]
                .iter()
                .map(|n| (n.to_string(), q(1, 4)))
                .collect();
        let r = verify(&sys, &w, DEFAULT_TOL).unwrap();
        assert!(r.ok && r.residual == 0.0);
        // (1/4 + e)(1/2) vs (1/4)(1/2 + e) on the first product: difference e/4
        w.insert("s_v_e0_e0".into(), q(1, 4) + q(1, 1000));
        let r = verify(&sys, &w, DEFAULT_TOL).unwrap();
        assert!(!r.ok);
        assert!(r.residual > 1e-4 && r.residual < 1e-3);
        w.remove("s_v_e1_e1");
        assert!(matches!(
            verify(&sys, &w, DEFAULT_TOL),
            Err(Error::MissingVariable(_))
        ));
    }

    #[test]
    fn empty_system_verifies() {
        let st = Structure::with_size(2).unwrap();
        let sys = compile(
            &st,
            &parse("x = x").unwrap(),
            Mode::Check,
            Some(&WeightedTeam::uniform(["x"], &[vec![0]]).unwrap()),
        )
        .unwrap();
        let r = verify(&sys, &BTreeMap::new(), DEFAULT_TOL).unwrap();
        assert!(r.ok && r.residual == 0.0);
    }

    #[test]
    fn check_mode_split() {
        let st = Structure::with_size(2).unwrap();
        let team =
            WeightedTeam::from_rows(["x", "y"], [(vec![0, 0], q(1, 2)), (vec![1, 1], q(1, 2))])
                .unwrap();
        let sys = compile(
            &st,
            &parse("indep( ; x ; y) \\/ dep(x ; y)").unwrap(),
            Mode::Check,
            Some(&team),
        )
        .unwrap();
        let r = solve(&sys, &SolveConfig::default()).unwrap();
        assert_eq!(r.status, Status::Sat);
        assert!(
            verify(&sys, r.witness.as_ref().unwrap(), DEFAULT_TOL)
                .unwrap()
                .ok
        );
        let again = solve(&sys, &SolveConfig::default()).unwrap();
        assert_eq!(r, again);
    }

    #[test]
    fn refuses_full_systems() {
        let st = Structure::with_size(2).unwrap();
        let sys = compile(&st, &parse("~x = y").unwrap(), Mode::Sat, None).unwrap();
        assert!(matches!(
            solve(&sys, &SolveConfig::default()),
            Err(Error::NonExistentialSystem(_))
        ));
    }
}
