//! Fourier–Motzkin elimination over named rate variables.
//!
//! Coefficients are exact rationals; constants are `f64` instantiations of
//! information expressions. Constraint-system fixtures reference information
//! terms by name and are resolved against a joint at load time.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{self, GeomError, HalfPlane, RateRegion};
use crate::info::{FeedbackBudget, InfoError, JointPmf, Var};

/// Slack below which a constant-only condition counts as violated.
pub const CONDITION_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FmeError {
    #[error("projection is empty (worst condition slack {slack:.3e})")]
    Infeasible { slack: f64 },
    #[error("projection is unbounded")]
    Unbounded,
    #[error("fixture error: {0}")]
    Fixture(String),
    #[error(transparent)]
    Info(#[from] InfoError),
}

pub type Result<T> = std::result::Result<T, FmeError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RateVar {
    R1,
    R2,
    Rc1,
    Rc2,
    Rp1,
    Rp2,
    Rprime1,
    Rprime2,
    Rtilde1,
    Rtilde2,
    Rhat1,
    Rhat2,
    RtildeV,
}

impl RateVar {
    pub const ALL: [RateVar; 13] = [
        RateVar::R1,
        RateVar::R2,
        RateVar::Rc1,
        RateVar::Rc2,
        RateVar::Rp1,
        RateVar::Rp2,
        RateVar::Rprime1,
        RateVar::Rprime2,
        RateVar::Rtilde1,
        RateVar::Rtilde2,
        RateVar::Rhat1,
        RateVar::Rhat2,
        RateVar::RtildeV,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RateVar::R1 => "R1",
            RateVar::R2 => "R2",
            RateVar::Rc1 => "Rc1",
            RateVar::Rc2 => "Rc2",
            RateVar::Rp1 => "Rp1",
            RateVar::Rp2 => "Rp2",
            RateVar::Rprime1 => "Rprime1",
            RateVar::Rprime2 => "Rprime2",
            RateVar::Rtilde1 => "Rtilde1",
            RateVar::Rtilde2 => "Rtilde2",
            RateVar::Rhat1 => "Rhat1",
            RateVar::Rhat2 => "Rhat2",
            RateVar::RtildeV => "RtildeV",
        }
    }
}

impl fmt::Display for RateVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Fixed elimination order for auxiliary rates.
pub const ELIMINATION_ORDER: [RateVar; 11] = [
    RateVar::Rhat1,
    RateVar::Rhat2,
    RateVar::RtildeV,
    RateVar::Rtilde1,
    RateVar::Rtilde2,
    RateVar::Rprime1,
    RateVar::Rprime2,
    RateVar::Rp1,
    RateVar::Rp2,
    RateVar::Rc1,
    RateVar::Rc2,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub coeffs: BTreeMap<RateVar, Rational64>,
    pub sense: Sense,
    pub strict: bool,
    pub constant: f64,
    pub label: Option<String>,
}

impl LinearConstraint {
    pub fn new(terms: &[(RateVar, i64)], sense: Sense, constant: f64) -> Self {
        let mut coeffs = BTreeMap::new();
        for &(v, c) in terms {
            *coeffs.entry(v).or_insert_with(|| Rational64::from_integer(0)) +=
                Rational64::from_integer(c);
        }
        coeffs.retain(|_, c| *c != Rational64::from_integer(0));
        Self { coeffs, sense, strict: false, constant, label: None }
    }

    pub fn le(terms: &[(RateVar, i64)], constant: f64) -> Self {
        Self::new(terms, Sense::Le, constant)
    }

    pub fn ge(terms: &[(RateVar, i64)], constant: f64) -> Self {
        Self::new(terms, Sense::Ge, constant)
    }

    pub fn strict(mut self) -> Self {
        self.strict = true;
        self
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn coeff(&self, v: RateVar) -> Rational64 {
        self.coeffs.get(&v).copied().unwrap_or_else(|| Rational64::from_integer(0))
    }

    pub fn is_condition(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The same constraint written as Σ c·x ≤ b.
    pub fn to_le(&self) -> Self {
        match self.sense {
            Sense::Le => self.clone(),
            Sense::Ge => Self {
                coeffs: self.coeffs.iter().map(|(&v, &c)| (v, -c)).collect(),
                sense: Sense::Le,
                strict: self.strict,
                constant: -self.constant,
                label: self.label.clone(),
            },
        }
    }

    /// Amount by which the constraint holds at `x`; negative when violated.
    pub fn slack(&self, x: &BTreeMap<RateVar, f64>) -> f64 {
        let lhs: f64 = self
            .coeffs
            .iter()
            .map(|(v, c)| to_f64(*c) * x.get(v).copied().unwrap_or(0.0))
            .sum();
        match self.sense {
            Sense::Le => self.constant - lhs,
            Sense::Ge => lhs - self.constant,
        }
    }
}

fn to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearSystem {
    pub constraints: Vec<LinearConstraint>,
}

impl LinearSystem {
    pub fn new(constraints: Vec<LinearConstraint>) -> Self {
        Self { constraints }
    }

    pub fn variables(&self) -> Vec<RateVar> {
        let mut vs: Vec<RateVar> =
            self.constraints.iter().flat_map(|c| c.coeffs.keys().copied()).collect();
        vs.sort();
        vs.dedup();
        vs
    }

    /// Add v ≥ 0 for every variable that appears.
    pub fn with_nonnegativity(mut self) -> Self {
        for v in self.variables() {
            self.constraints.push(LinearConstraint::ge(&[(v, 1)], 0.0).labeled(format!("{v}>=0")));
        }
        self
    }

    pub fn satisfied_by(&self, x: &BTreeMap<RateVar, f64>, tol: f64) -> bool {
        self.constraints.iter().all(|c| c.slack(x) >= -tol)
    }

    /// Smallest slack among constant-only conditions (+∞ if none).
    pub fn condition_slack(&self) -> f64 {
        self.constraints
            .iter()
            .filter(|c| c.is_condition())
            .map(|c| c.slack(&BTreeMap::new()))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Replace strict inequalities by their closures, tightened by `epsilon`.
pub fn strict_to_weak(system: &LinearSystem, epsilon: f64) -> LinearSystem {
    LinearSystem::new(
        system
            .constraints
            .iter()
            .map(|c| {
                let mut c = c.clone();
                if c.strict {
                    c.strict = false;
                    match c.sense {
                        Sense::Le => c.constant -= epsilon,
                        Sense::Ge => c.constant += epsilon,
                    }
                }
                c
            })
            .collect(),
    )
}

type Key = Vec<(RateVar, Rational64)>;

fn normalized(c: &LinearConstraint) -> (Key, f64) {
    let scale = c.coeffs.values().map(|r| if *r < Rational64::from_integer(0) { -*r } else { *r }).max().unwrap_or_else(|| Rational64::from_integer(1));
    let key = c.coeffs.iter().map(|(&v, &r)| (v, r / scale)).collect();
    (key, c.constant / to_f64(scale))
}

fn prune(constraints: Vec<LinearConstraint>) -> Vec<LinearConstraint> {
    let nonneg: Vec<RateVar> = constraints
        .iter()
        .filter(|c| c.coeffs.len() == 1 && c.constant == 0.0)
        .filter_map(|c| {
            let (&v, &r) = c.coeffs.iter().next()?;
            (r < Rational64::from_integer(0)).then_some(v)
        })
        .collect();
    let mut best: BTreeMap<Key, LinearConstraint> = BTreeMap::new();
    let mut condition: Option<LinearConstraint> = None;
    for c in constraints {
        if c.is_condition() {
            if condition.as_ref().is_none_or(|k| c.constant < k.constant) {
                condition = Some(c);
            }
            continue;
        }
        // implied by nonnegativity of every variable involved
        let all_nonpos = c.coeffs.iter().all(|(v, r)| *r < Rational64::from_integer(0) && nonneg.contains(v));
        if all_nonpos && c.constant >= 0.0 && !(c.coeffs.len() == 1 && c.constant == 0.0) {
            continue;
        }
        let (key, b) = normalized(&c);
        let scaled = LinearConstraint {
            coeffs: key.iter().copied().collect(),
            sense: Sense::Le,
            strict: c.strict,
            constant: b,
            label: c.label,
        };
        match best.get(&key) {
            Some(old) if old.constant <= b => {}
            _ => {
                best.insert(key, scaled);
            }
        }
    }
    let mut out: Vec<LinearConstraint> = best.into_values().collect();
    out.extend(condition);
    out
}

/// Project out `var`.
pub fn eliminate(system: &LinearSystem, var: RateVar) -> LinearSystem {
    let zero = Rational64::from_integer(0);
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let mut rest = Vec::new();
    for c in &system.constraints {
        let c = c.to_le();
        let a = c.coeff(var);
        if a > zero {
            pos.push(c);
        } else if a < zero {
            neg.push(c);
        } else {
            rest.push(c);
        }
    }
    for p in &pos {
        for n in &neg {
            let (ap, an) = (p.coeff(var), -n.coeff(var));
            let mut coeffs: BTreeMap<RateVar, Rational64> = BTreeMap::new();
            for (&v, &r) in &p.coeffs {
                *coeffs.entry(v).or_insert(zero) += r * an;
            }
            for (&v, &r) in &n.coeffs {
                *coeffs.entry(v).or_insert(zero) += r * ap;
            }
            coeffs.retain(|_, r| *r != zero);
            debug_assert!(!coeffs.contains_key(&var));
            rest.push(LinearConstraint {
                coeffs,
                sense: Sense::Le,
                strict: p.strict || n.strict,
                constant: to_f64(an) * p.constant + to_f64(ap) * n.constant,
                label: None,
            });
        }
    }
    LinearSystem::new(prune(rest))
}

fn elimination_sequence(system: &LinearSystem, order: &[RateVar]) -> Vec<RateVar> {
    let present = system.variables();
    let mut seq: Vec<RateVar> = order.iter().copied().filter(|v| present.contains(v)).collect();
    for v in present {
        if v != RateVar::R1 && v != RateVar::R2 && !seq.contains(&v) {
            seq.push(v);
        }
    }
    seq
}

/// Eliminate every variable except R1 and R2, in the given order.
pub fn project_system(system: &LinearSystem, order: &[RateVar]) -> LinearSystem {
    let mut s = LinearSystem::new(prune(system.constraints.iter().map(|c| c.to_le()).collect()));
    for v in elimination_sequence(system, order) {
        s = eliminate(&s, v);
    }
    s
}

fn to_region(projected: &LinearSystem) -> Result<RateRegion> {
    let slack = projected.condition_slack();
    if slack < -CONDITION_TOL {
        return Err(FmeError::Infeasible { slack });
    }
    let halfplanes = projected
        .constraints
        .iter()
        .filter(|c| !c.is_condition())
        .map(|c| {
            let c = c.to_le();
            HalfPlane::new(to_f64(c.coeff(RateVar::R1)), to_f64(c.coeff(RateVar::R2)), c.constant)
        })
        .collect();
    let region = RateRegion::new(halfplanes);
    match region.vertices() {
        Ok(_) => Ok(region),
        Err(GeomError::Infeasible) => Err(FmeError::Infeasible { slack }),
        Err(_) => Err(FmeError::Unbounded),
    }
}

/// Closure of the system, projected onto (R1, R2) in [`ELIMINATION_ORDER`].
pub fn project_to_rates(system: &LinearSystem) -> Result<RateRegion> {
    project_with_order(system, &ELIMINATION_ORDER)
}

pub fn project_with_order(system: &LinearSystem, order: &[RateVar]) -> Result<RateRegion> {
    let weak = strict_to_weak(system, 0.0);
    to_region(&project_system(&weak, order))
}

/// Extend a point of the projection to a full solution by back-substitution.
pub fn lift(
    system: &LinearSystem,
    order: &[RateVar],
    point: &BTreeMap<RateVar, f64>,
    tol: f64,
) -> Option<BTreeMap<RateVar, f64>> {
    let weak = strict_to_weak(system, 0.0);
    let seq = elimination_sequence(&weak, order);
    let mut stages = vec![LinearSystem::new(weak.constraints.iter().map(|c| c.to_le()).collect())];
    for &v in &seq {
        let next = eliminate(stages.last().unwrap(), v);
        stages.push(next);
    }
    let mut x = point.clone();
    if !stages.last().unwrap().satisfied_by(&x, tol) {
        return None;
    }
    for (k, &v) in seq.iter().enumerate().rev() {
        let stage = &stages[k];
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for c in &stage.constraints {
            let a = to_f64(c.coeff(v));
            if a == 0.0 {
                continue;
            }
            let rest: f64 = c
                .coeffs
                .iter()
                .filter(|(w, _)| **w != v)
                .map(|(w, r)| to_f64(*r) * x.get(w).copied().unwrap_or(0.0))
                .sum();
            let bound = (c.constant - rest) / a;
            if a > 0.0 {
                hi = hi.min(bound);
            } else {
                lo = lo.max(bound);
            }
        }
        if lo > hi + tol {
            return None;
        }
        let val = if lo.is_finite() {
            if hi.is_finite() {
                0.5 * (lo + hi.max(lo))
            } else {
                lo
            }
        } else if hi.is_finite() {
            hi
        } else {
            0.0
        };
        x.insert(v, val);
    }
    Some(x)
}

/// A named information expression or feedback budget.
#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    Info { left: Vec<Var>, right: Vec<Var>, given: Vec<Var> },
    Budget1,
    Budget2,
}

impl Term {
    pub fn parse(s: &str) -> Result<Term> {
        let s = s.trim();
        match s {
            "RFb1" => return Ok(Term::Budget1),
            "RFb2" => return Ok(Term::Budget2),
            _ => {}
        }
        let body = s
            .strip_prefix("I(")
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| FmeError::Fixture(format!("cannot parse term {s:?}")))?;
        let (args, given) = match body.split_once('|') {
            Some((a, g)) => (a, g),
            None => (body, ""),
        };
        let (l, r) = args
            .split_once(';')
            .ok_or_else(|| FmeError::Fixture(format!("term {s:?} lacks ';'")))?;
        let list = |t: &str| -> Result<Vec<Var>> {
            t.split(',')
                .filter(|p| !p.trim().is_empty())
                .map(|p| p.parse::<Var>().map_err(FmeError::from))
                .collect()
        };
        Ok(Term::Info { left: list(l)?, right: list(r)?, given: list(given)? })
    }

    pub fn eval(&self, joint: &JointPmf, budget: &FeedbackBudget) -> Result<f64> {
        match self {
            Term::Info { left, right, given } => Ok(joint.mutual_info(left, right, given)?),
            Term::Budget1 => Ok(budget.r_fb1),
            Term::Budget2 => Ok(budget.r_fb2),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureConstraint {
    pub label: String,
    pub lhs: BTreeMap<RateVar, i64>,
    pub sense: String,
    pub rhs: Vec<(f64, String)>,
}

/// A constraint system whose constants are information terms.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fixture {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub constraints: Vec<FixtureConstraint>,
}

const APPENDIX_A: &str = include_str!("../fixtures/appendix_a.json");
const APPENDIX_B: &str = include_str!("../fixtures/appendix_b.json");
const APPENDIX_C: &str = include_str!("../fixtures/appendix_c.json");

impl Fixture {
    pub fn from_json(s: &str) -> Result<Self> {
        let f: Fixture = serde_json::from_str(s).map_err(|e| FmeError::Fixture(e.to_string()))?;
        for c in &f.constraints {
            for (_, t) in &c.rhs {
                Term::parse(t)?;
            }
            parse_sense(&c.sense)?;
        }
        Ok(f)
    }

    /// One of the bundled fixtures: `appendix_a`, `appendix_b`, `appendix_c`.
    pub fn bundled(name: &str) -> Result<Self> {
        let src = match name {
            "appendix_a" => APPENDIX_A,
            "appendix_b" => APPENDIX_B,
            "appendix_c" => APPENDIX_C,
            _ => return Err(FmeError::Fixture(format!("no bundled fixture {name:?}"))),
        };
        Self::from_json(src)
    }

    /// Numeric system for a concrete joint and budget, with nonnegativity.
    pub fn instantiate(&self, joint: &JointPmf, budget: &FeedbackBudget) -> Result<LinearSystem> {
        let mut out = Vec::new();
        for c in &self.constraints {
            let mut constant = 0.0;
            for (coef, t) in &c.rhs {
                constant += coef * Term::parse(t)?.eval(joint, budget)?;
            }
            let terms: Vec<(RateVar, i64)> = c.lhs.iter().map(|(&v, &k)| (v, k)).collect();
            let (senses, strict) = parse_sense(&c.sense)?;
            for sense in senses {
                let mut lc = LinearConstraint::new(&terms, sense, constant).labeled(c.label.clone());
                lc.strict = strict;
                out.push(lc);
            }
        }
        Ok(LinearSystem::new(out).with_nonnegativity())
    }
}

fn parse_sense(s: &str) -> Result<(Vec<Sense>, bool)> {
    Ok(match s {
        "<" => (vec![Sense::Le], true),
        "<=" => (vec![Sense::Le], false),
        ">" => (vec![Sense::Ge], true),
        ">=" => (vec![Sense::Ge], false),
        "=" => (vec![Sense::Le, Sense::Ge], false),
        _ => return Err(FmeError::Fixture(format!("unknown sense {s:?}"))),
    })
}

/// Vertex Hausdorff distance between two projections.
pub fn projection_distance(a: &RateRegion, b: &RateRegion) -> std::result::Result<f64, GeomError> {
    geometry::region_distance(a, b)
}
