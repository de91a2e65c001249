//! Parameter sweeps over auxiliary families, the feedback-usefulness
//! certificate, and the Blackwell-channel optimizer.

use std::collections::BTreeMap;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::examples::{self, BscBecParams, BsbcParams, ExampleError, GaussianParams};
use crate::geometry::{max_r2_at, violation, GeomError, RatePoint, RateRegion, PREDICATE_TOL, WITNESS_TOL};
use crate::info::{
    assemble_joint, BroadcastChannel, FeedbackBudget, InfoError, JointPmf, SchemeSpec, TestChannel, TwoAuxSpec, Var,
};
use crate::regions::{self, Receiver, RegionError, RegionVerdict, SideCondition};

/// Slacks closer to zero than this are reported as exactly zero.
pub const SLACK_SNAP: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("precondition {name} failed: {detail}")]
    Precondition { name: String, detail: String },
    #[error("no feasible grid point: {}", reasons.join("; "))]
    Infeasible { reasons: Vec<String> },
    #[error("bad grid: {0}")]
    Grid(String),
    #[error("certificate disagrees with direct evaluation: {0}")]
    Unsound(String),
    #[error(transparent)]
    Info(#[from] InfoError),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error(transparent)]
    Example(#[from] ExampleError),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

pub type Result<T> = std::result::Result<T, SearchError>;

fn precondition(name: &str, detail: impl Into<String>) -> SearchError {
    SearchError::Precondition { name: name.into(), detail: detail.into() }
}

// ---------------------------------------------------------------------------
// Grids and frontiers

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Axis {
    pub fn new(name: &str, lo: f64, hi: f64, steps: usize) -> Self {
        Self { name: name.into(), lo, hi, steps }
    }

    fn step(&self) -> f64 {
        if self.steps > 1 {
            (self.hi - self.lo) / (self.steps - 1) as f64
        } else {
            0.0
        }
    }

    fn value(&self, k: usize) -> f64 {
        if self.steps > 1 {
            self.lo + (self.hi - self.lo) * k as f64 / (self.steps - 1) as f64
        } else {
            self.lo
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub axes: Vec<Axis>,
    /// Levels of local refinement around each incumbent, halving the step each time.
    #[serde(default = "one")]
    pub refine: usize,
    /// Number of R1 sample positions on the frontier.
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn one() -> usize {
    1
}

fn default_samples() -> usize {
    101
}

impl GridSpec {
    pub fn new(axes: Vec<Axis>) -> Self {
        Self { axes, refine: 1, samples: default_samples() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() {
            return Err(SearchError::Grid("no axes".into()));
        }
        for a in &self.axes {
            if a.steps == 0 || !(a.lo <= a.hi) || !a.lo.is_finite() || !a.hi.is_finite() {
                return Err(SearchError::Grid(format!("axis {} has range [{}, {}] with {} steps", a.name, a.lo, a.hi, a.steps)));
            }
        }
        if self.samples < 2 {
            return Err(SearchError::Grid("need at least 2 frontier samples".into()));
        }
        Ok(())
    }

    fn points(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![]];
        for a in &self.axes {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (0..a.steps).map(move |k| {
                        let mut q = p.clone();
                        q.push(a.value(k));
                        q
                    })
                })
                .collect();
        }
        out
    }

    /// Neighbours of `centre` at offsets of ±`scale`·step per axis, clipped to range.
    fn neighbours(&self, centre: &[f64], scale: f64) -> Vec<Vec<f64>> {
        let mut out = vec![vec![]];
        for (a, &c) in self.axes.iter().zip(centre) {
            let h = a.step() * scale;
            let opts: Vec<f64> = if h > 0.0 {
                vec![(c - h).max(a.lo), c, (c + h).min(a.hi)]
            } else {
                vec![c]
            };
            out = out
                .into_iter()
                .flat_map(|p| {
                    opts.iter().map(move |&v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        out.retain(|p| p.as_slice() != centre);
        out
    }
}

/// A parametrized family of achievable regions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Family {
    /// Binary symmetric BC, axes (β1, β2).
    Bsbc { p1: f64, p2: f64, r_fb1: f64 },
    /// Binary symmetric BC without feedback, axis β.
    BsbcNofb { p1: f64, p2: f64 },
    /// BSC/BEC with receiver-1 feedback, axes (s, γ).
    Bscbec1 { p: f64, e: f64, r_fb1: f64 },
    /// BSC/BEC with receiver-2 feedback, axes (α, γ).
    Bscbec2 { p: f64, e: f64, r_fb2: f64 },
    /// BSC/BEC without feedback, axis s.
    BscbecNofb { p: f64, e: f64 },
    /// Gaussian BC, axes (α, t) with β = β_min · 10^t.
    Gaussian { power: f64, n1: f64, n2: f64, r_fb1: f64 },
    /// Gaussian BC without feedback, axis α.
    GaussianNofb { power: f64, n1: f64, n2: f64 },
    /// Superposition input over binary U and X with erasing test channels on
    /// both outputs, evaluated by the backward-decoding bound. Axes
    /// (P(U=1), P(X=1|U=0), P(X=1|U=1), reveal₁, reveal₂).
    #[serde(rename = "generic-thm2-smallalphabet")]
    GenericThm2 { channel: BroadcastChannel, r_fb1: f64, r_fb2: f64 },
}

impl Family {
    pub fn id(&self) -> &'static str {
        match self {
            Family::Bsbc { .. } => "bsbc",
            Family::BsbcNofb { .. } => "bsbc-nofb",
            Family::Bscbec1 { .. } => "bscbec1",
            Family::Bscbec2 { .. } => "bscbec2",
            Family::BscbecNofb { .. } => "bscbec-nofb",
            Family::Gaussian { .. } => "gaussian",
            Family::GaussianNofb { .. } => "gaussian-nofb",
            Family::GenericThm2 { .. } => "generic-thm2-smallalphabet",
        }
    }

    pub fn default_grid(&self) -> GridSpec {
        let axes = match self {
            Family::Bsbc { .. } => vec![Axis::new("beta1", 0.0, 0.5, 26), Axis::new("beta2", 0.0, 0.5, 26)],
            Family::BsbcNofb { .. } => vec![Axis::new("beta", 0.0, 0.5, 201)],
            Family::Bscbec1 { .. } => vec![Axis::new("s", 0.0, 0.5, 26), Axis::new("gamma", 0.002, 0.998, 26)],
            Family::Bscbec2 { .. } => vec![Axis::new("alpha", 0.0, 1.0, 26), Axis::new("gamma", 0.002, 0.998, 26)],
            Family::BscbecNofb { .. } => vec![Axis::new("s", 0.0, 0.5, 201)],
            Family::Gaussian { .. } => vec![Axis::new("alpha", 0.0, 1.0, 41), Axis::new("log10_beta_scale", 0.0, 4.0, 21)],
            Family::GaussianNofb { .. } => vec![Axis::new("alpha", 0.0, 1.0, 201)],
            Family::GenericThm2 { .. } => vec![
                Axis::new("p_u", 0.0, 1.0, 5),
                Axis::new("p_x_given_u0", 0.0, 1.0, 5),
                Axis::new("p_x_given_u1", 0.0, 1.0, 5),
                Axis::new("reveal1", 0.0, 1.0, 3),
                Axis::new("reveal2", 0.0, 1.0, 3),
            ],
        };
        GridSpec::new(axes)
    }

    fn arity(&self) -> usize {
        match self {
            Family::BsbcNofb { .. } | Family::BscbecNofb { .. } | Family::GaussianNofb { .. } => 1,
            Family::GenericThm2 { .. } => 5,
            _ => 2,
        }
    }

    /// The region at one parameter vector; `Err` carries the reason it is empty.
    pub fn evaluate(&self, x: &[f64]) -> std::result::Result<RateRegion, String> {
        if x.len() != self.arity() {
            return Err(format!("{} expects {} parameters, got {}", self.id(), self.arity(), x.len()));
        }
        let verdict = |v: std::result::Result<RegionVerdict, ExampleError>| match v {
            Ok(v) => {
                let why = v.violated().iter().map(|c| c.name.clone()).collect::<Vec<_>>().join(", ");
                v.region.ok_or(why)
            }
            Err(e) => Err(e.to_string()),
        };
        match *self {
            Family::Bsbc { p1, p2, r_fb1 } => {
                let params = BsbcParams::new(p1, p2, x[0], x[1]).map_err(|e| e.to_string())?;
                verdict(examples::bsbc_region(&params, r_fb1))
            }
            Family::BsbcNofb { p1, p2 } => examples::bsbc_nofb_region(p1, p2, x[0]).map_err(|e| e.to_string()),
            Family::Bscbec1 { p, e, r_fb1 } => {
                let params = BscBecParams { p, e, s: x[0], alpha: 0.0, gamma: x[1] };
                verdict(examples::bscbec_case1(&params, r_fb1))
            }
            Family::Bscbec2 { p, e, r_fb2 } => {
                let params = BscBecParams { p, e, s: 0.0, alpha: x[0], gamma: x[1] };
                verdict(examples::bscbec_case2(&params, r_fb2))
            }
            Family::BscbecNofb { p, e } => examples::bscbec_nofb(p, e, x[0]).map_err(|e| e.to_string()),
            Family::Gaussian { power, n1, n2, r_fb1 } => {
                let beta_min = examples::gaussian_beta_min(power, n1, n2, x[0], r_fb1)
                    .ok_or_else(|| "compression within feedback budget".to_string())?;
                let beta = beta_min * 10f64.powf(x[1]) * (1.0 + 1e-12);
                let params = GaussianParams { power, n1, n2, alpha: x[0], beta, r_fb1 };
                verdict(examples::gaussian_region(&params))
            }
            Family::GaussianNofb { power, n1, n2 } => {
                examples::gaussian_nofb(power, n1, n2, x[0]).map_err(|e| e.to_string())
            }
            Family::GenericThm2 { ref channel, r_fb1, r_fb2 } => {
                let scheme = generic_scheme(channel, x).map_err(|e| e.to_string())?;
                let budget = FeedbackBudget::new(r_fb1, r_fb2).map_err(|e| e.to_string())?;
                match regions::thm2_region(&scheme, channel, &budget) {
                    Ok(v) => verdict(Ok(v)),
                    Err(e) => Err(e.to_string()),
                }
            }
        }
    }
}

/// Output symbol `size` of an erasing test channel marks "not revealed".
fn erasing_test(y_size: usize, reveal: f64) -> TestChannel {
    let t = y_size + 1;
    let mut law = vec![0.0; y_size * t];
    for y in 0..y_size {
        law[y * t + y] = reveal;
        law[y * t + y_size] = 1.0 - reveal;
    }
    TestChannel::GivenY { size: t, law }
}

fn generic_scheme(channel: &BroadcastChannel, x: &[f64]) -> std::result::Result<SchemeSpec, InfoError> {
    if channel.x_size() != 2 {
        return Err(InfoError::Structural("the small-alphabet family needs a binary input".into()));
    }
    let (pu, a, b) = (x[0], x[1], x[2]);
    let p_ux = [(1.0 - pu) * (1.0 - a), (1.0 - pu) * a, pu * (1.0 - b), pu * b];
    let mut scheme = SchemeSpec::cloud_and_satellite(2, 2, &p_ux, erasing_test(channel.y1_size(), x[3]))?;
    scheme.test2 = erasing_test(channel.y2_size(), x[4]);
    Ok(scheme)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierSample {
    pub r1: f64,
    pub r2: f64,
    /// Parameters of the region attaining this sample.
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frontier {
    pub family: String,
    pub axes: Vec<String>,
    pub samples: Vec<FrontierSample>,
    pub evaluated: usize,
    pub infeasible: usize,
}

impl Frontier {
    pub fn points(&self) -> Vec<RatePoint> {
        self.samples.iter().map(|s| RatePoint::new(s.r1, s.r2)).collect()
    }

    /// Largest frontier R2 at `r1`, interpolating between samples.
    pub fn r2_at(&self, r1: f64) -> Option<f64> {
        let s = &self.samples;
        let last = s.last()?;
        if r1 > last.r1 + PREDICATE_TOL || r1 < s[0].r1 - PREDICATE_TOL {
            return None;
        }
        let k = s.partition_point(|p| p.r1 < r1);
        if k == 0 || k == s.len() {
            return Some(s[k.min(s.len() - 1)].r2);
        }
        let (a, b) = (&s[k - 1], &s[k]);
        let t = (r1 - a.r1) / (b.r1 - a.r1);
        Some(a.r2 + t * (b.r2 - a.r2))
    }
}

struct Pool {
    params: Vec<Vec<f64>>,
    polys: Vec<Vec<RatePoint>>,
    failures: BTreeMap<String, usize>,
    evaluated: usize,
}

impl Pool {
    fn add(&mut self, family: &Family, batch: Vec<Vec<f64>>) {
        let results: Vec<_> = batch
            .par_iter()
            .map(|x| family.evaluate(x).and_then(|r| r.vertices().map_err(|e| e.to_string())))
            .collect();
        self.evaluated += batch.len();
        for (x, r) in batch.into_iter().zip(results) {
            match r {
                Ok(v) => {
                    self.params.push(x);
                    self.polys.push(v);
                }
                Err(reason) => *self.failures.entry(reason).or_default() += 1,
            }
        }
    }

    /// (R1 grid, per-sample best R2 and the index of the region attaining it).
    fn sweep(&self, n: usize) -> Vec<(f64, f64, usize)> {
        let r1max = self.polys.iter().flatten().map(|p| p.r1).fold(0.0, f64::max);
        (0..n)
            .into_par_iter()
            .map(|k| {
                let r1 = r1max * k as f64 / (n - 1) as f64;
                let mut best = (f64::NEG_INFINITY, usize::MAX);
                for (i, poly) in self.polys.iter().enumerate() {
                    if let Some(r2) = max_r2_at(poly, r1) {
                        if r2 > best.0 {
                            best = (r2, i);
                        }
                    }
                }
                (r1, best.0, best.1)
            })
            .collect()
    }
}

/// Pareto frontier of the union of a family's regions over a grid, with one
/// round of local refinement per level around every sample's incumbent.
pub fn frontier(family: &Family, grid: &GridSpec) -> Result<Frontier> {
    grid.validate()?;
    if grid.axes.len() != family.arity() {
        return Err(SearchError::Grid(format!("{} needs {} axes, grid has {}", family.id(), family.arity(), grid.axes.len())));
    }
    let mut pool = Pool { params: vec![], polys: vec![], failures: BTreeMap::new(), evaluated: 0 };
    pool.add(family, grid.points());
    if pool.polys.is_empty() {
        return Err(SearchError::Infeasible {
            reasons: pool.failures.iter().map(|(r, n)| format!("{r} ({n} points)")).collect(),
        });
    }
    let mut scale = 1.0;
    for _ in 0..grid.refine {
        scale *= 0.5;
        let sweep = pool.sweep(grid.samples);
        let mut incumbents: Vec<usize> = sweep.iter().filter(|s| s.2 != usize::MAX).map(|s| s.2).collect();
        incumbents.sort_unstable();
        incumbents.dedup();
        let mut seen: std::collections::BTreeSet<Vec<u64>> =
            pool.params.iter().map(|p| p.iter().map(|v| v.to_bits()).collect()).collect();
        let mut batch = vec![];
        for i in incumbents {
            for q in grid.neighbours(&pool.params[i], scale) {
                if seen.insert(q.iter().map(|v| v.to_bits()).collect()) {
                    batch.push(q);
                }
            }
        }
        pool.add(family, batch);
    }
    let sweep = pool.sweep(grid.samples);
    // make the curve non-increasing from the right, keeping the argmax that supplies each value
    let mut samples: Vec<FrontierSample> = Vec::with_capacity(sweep.len());
    let mut run = (f64::NEG_INFINITY, usize::MAX);
    for &(r1, r2, i) in sweep.iter().rev() {
        if r2 > run.0 {
            run = (r2, i);
        }
        let (r2, idx) = if run.0 < 0.0 { (0.0, run.1) } else { run };
        samples.push(FrontierSample { r1, r2, params: pool.params.get(idx).cloned().unwrap_or_default() });
    }
    samples.reverse();
    Ok(Frontier {
        family: family.id().into(),
        axes: grid.axes.iter().map(|a| a.name.clone()).collect(),
        samples,
        evaluated: pool.evaluated,
        infeasible: pool.failures.values().sum(),
    })
}

// ---------------------------------------------------------------------------
// Usefulness certificate

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UsefulnessCertificate {
    pub gamma: f64,
    /// Largest γ with γ·H(Y1|Y2) ≤ (1−γ)·Γ for the enhanced input.
    pub gamma_info_bound: f64,
    /// Largest γ with γ·H(Y1|Y2,X) ≤ R_Fb,1 for the enhanced input.
    pub gamma_fb_bound: f64,
    /// The mixed point (1−γ)·R_M + γ·R_Enh.
    pub target_point: RatePoint,
    pub constraint_slacks: Vec<SideCondition>,
    pub pass: bool,
}

/// Information terms of a Marton input that enter the certificate.
#[derive(Debug, Clone, Copy)]
struct MartonTerms {
    r1: f64,
    r2: f64,
    sum1: f64,
    sum2: f64,
    gap: f64,
}

/// Information terms of an enhanced-channel superposition input.
#[derive(Debug, Clone, Copy)]
struct EnhancedTerms {
    cloud: f64,
    satellite: f64,
    full: f64,
    h_y1_y2: f64,
    h_y1_y2x: f64,
    h_y1_uy2: f64,
}

fn marton_terms(joint: &JointPmf) -> Result<MartonTerms> {
    use Var::{Q, U0, U1, U2, Y1, Y2};
    let i = |l: &[Var], r: &[Var], g: &[Var]| -> Result<f64> {
        let mut g = g.to_vec();
        g.push(Q);
        Ok(joint.mutual_info(l, r, &g)?)
    };
    let a = i(&[U1], &[U2], &[U0])?;
    let r1 = i(&[U0, U1], &[Y1], &[])?;
    let r2 = i(&[U0, U2], &[Y2], &[])?;
    Ok(MartonTerms {
        r1,
        r2,
        sum1: r1 + i(&[U2], &[Y2], &[U0])? - a,
        sum2: i(&[U1], &[Y1], &[U0])? + r2 - a,
        gap: i(&[U0], &[Y2], &[])? - i(&[U0], &[Y1], &[])?,
    })
}

fn enhanced_terms(joint: &JointPmf) -> Result<EnhancedTerms> {
    use Var::{U, X, Y1, Y2};
    let h = |v: &[Var]| joint.entropy_of(v);
    Ok(EnhancedTerms {
        cloud: joint.mutual_info(&[U], &[Y1], &[])?,
        satellite: joint.mutual_info(&[X], &[Y1, Y2], &[U])?,
        full: joint.mutual_info(&[X], &[Y1, Y2], &[])?,
        h_y1_y2: h(&[Y1, Y2])? - h(&[Y2])?,
        h_y1_y2x: h(&[X, Y1, Y2])? - h(&[X, Y2])?,
        h_y1_uy2: h(&[U, Y1, Y2])? - h(&[U, Y2])?,
    })
}

fn snap(x: f64) -> f64 {
    if x.abs() < SLACK_SNAP {
        0.0
    } else {
        x
    }
}

/// Checks that mixing a Marton point with an enhanced-channel point at weight
/// `gamma` stays achievable with receiver-1 feedback of rate `r_fb1`.
///
/// `marton` must have a single time-sharing slot; `enhanced` is P(u, x).
pub fn usefulness_certificate(
    marton: &SchemeSpec,
    marton_point: RatePoint,
    enhanced: &TwoAuxSpec,
    enhanced_point: RatePoint,
    channel: &BroadcastChannel,
    gamma: f64,
    r_fb1: f64,
) -> Result<UsefulnessCertificate> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(precondition("gamma-range", format!("gamma = {gamma} outside (0, 1)")));
    }
    if marton.q_size() != 1 {
        return Err(precondition("marton-slots", "the Marton input must not time-share"));
    }
    if !(r_fb1 > 0.0) {
        return Err(precondition("feedback", format!("feedback rate {r_fb1} must be positive")));
    }
    let m = marton_terms(&assemble_joint(marton, channel)?)?;
    let marton_region = regions::marton(&assemble_joint(marton, channel)?)?;
    if !marton_region.contains_point(marton_point, PREDICATE_TOL) {
        return Err(precondition("marton-point", "point lies outside the Marton region of its input"));
    }
    if m.gap <= 0.0 {
        return Err(precondition("gamma-gap", format!("I(U0;Y2) - I(U0;Y1) = {} is not positive", m.gap)));
    }
    if marton_point.r2 >= m.r2 - SLACK_SNAP {
        return Err(precondition("strictness", format!("R2 = {} meets I(U0,U2;Y2) = {}", marton_point.r2, m.r2)));
    }
    let ejoint = enhanced.assemble(channel)?;
    let e = enhanced_terms(&ejoint)?;
    if !regions::enhanced(&ejoint, &[Var::U], Receiver::One)?.contains_point(enhanced_point, PREDICATE_TOL) {
        return Err(precondition("enhanced-point", "point lies outside the enhanced region of its input"));
    }

    let g = gamma;
    let target = RatePoint::new(
        (1.0 - g) * marton_point.r1 + g * enhanced_point.r1,
        (1.0 - g) * marton_point.r2 + g * enhanced_point.r2,
    );
    let sum = target.r1 + target.r2;
    let delta1 = (g * e.h_y1_uy2 - r_fb1).max(0.0);
    let slacks = vec![
        ("R1", (1.0 - g) * m.r1 + g * e.cloud - target.r1),
        ("R2", (1.0 - g) * m.r2 + g * (e.full - e.h_y1_y2) - target.r2),
        ("R1+R2 via receiver 1", (1.0 - g) * m.sum1 + g * (e.cloud + e.satellite) - delta1 - sum),
        ("R1+R2 via receiver 2", (1.0 - g) * m.sum2 + g * (e.full - e.h_y1_y2) - sum),
        ("gamma within information gap", (1.0 - g) * m.gap - g * e.h_y1_y2),
        ("compression within feedback budget", r_fb1 - g * e.h_y1_y2x),
    ];
    let constraint_slacks: Vec<SideCondition> =
        slacks.into_iter().map(|(n, s)| SideCondition { name: n.into(), slack: snap(s) }).collect();
    let pass = constraint_slacks.iter().all(|c| c.slack >= 0.0);
    Ok(UsefulnessCertificate {
        gamma,
        gamma_info_bound: if e.h_y1_y2 > 0.0 { m.gap / (m.gap + e.h_y1_y2) } else { 1.0 },
        gamma_fb_bound: if e.h_y1_y2x > 0.0 { (r_fb1 / e.h_y1_y2x).min(1.0) } else { 1.0 },
        target_point: target,
        constraint_slacks,
        pass,
    })
}

/// The time-shared input behind a certificate: slot 0 runs the Marton input,
/// slot 1 (probability γ) the enhanced input with receiver 1 relaying its
/// output uncompressed.
pub fn mixed_scheme(marton: &SchemeSpec, enhanced: &TwoAuxSpec, channel: &BroadcastChannel, gamma: f64) -> Result<SchemeSpec> {
    if marton.q_size() != 1 || enhanced.v_size != 1 {
        return Err(precondition("mixed-scheme", "inputs must be single-slot with V constant"));
    }
    let [a, b, c] = marton.u_sizes;
    let x_size = channel.x_size();
    let (n0, n1, n2) = (a.max(enhanced.u_size), b, c.max(x_size));
    let cells = n0 * n1 * n2;
    let mut aux = vec![0.0; 2 * cells];
    let mut map = vec![0; 2 * cells];
    for u0 in 0..a {
        for u1 in 0..b {
            for u2 in 0..c {
                let dst = (u0 * n1 + u1) * n2 + u2;
                let src = (u0 * b + u1) * c + u2;
                aux[dst] = marton.aux_pmf[src];
                map[dst] = marton.symbol_map[src];
            }
        }
    }
    for u0 in 0..n0 {
        for u1 in 0..n1 {
            for u2 in 0..n2 {
                map[cells + (u0 * n1 + u1) * n2 + u2] = u2.min(x_size - 1);
            }
        }
    }
    for u in 0..enhanced.u_size {
        for x in 0..x_size {
            aux[cells + u * n1 * n2 + x] = enhanced.pmf[u * x_size + x];
        }
    }
    let scheme = SchemeSpec {
        q_pmf: vec![1.0 - gamma, gamma],
        u_sizes: [n0, n1, n2],
        aux_pmf: aux,
        symbol_map: map,
        test1: TestChannel::per_slot(2, channel.y1_size(), |q| q == 1),
        test2: TestChannel::Absent,
        update: None,
    };
    scheme.validate(channel)?;
    Ok(scheme)
}

/// Direct check of a passing certificate: the mixed point must lie in the
/// hybrid-decoding region of [`mixed_scheme`]. Returns the point's violation
/// of that region (≤ 0 inside).
pub fn certificate_violation(
    marton: &SchemeSpec,
    enhanced: &TwoAuxSpec,
    channel: &BroadcastChannel,
    cert: &UsefulnessCertificate,
    r_fb1: f64,
) -> Result<f64> {
    let scheme = mixed_scheme(marton, enhanced, channel, cert.gamma)?;
    let budget = FeedbackBudget::new(r_fb1, 0.0)?;
    let verdict = regions::thm3_region(&scheme, channel, &budget, Receiver::One)?;
    match verdict.region {
        Some(r) => Ok(violation(&r, cert.target_point)),
        None => Ok(f64::INFINITY),
    }
}

// ---------------------------------------------------------------------------
// Improvement search

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImprovementOptions {
    /// Grid resolution for P(U) and P(X|U) with binary inputs.
    pub steps: usize,
    /// Random superposition inputs drawn for larger input alphabets.
    pub random_inputs: usize,
    pub seed: u64,
}

impl Default for ImprovementOptions {
    fn default() -> Self {
        Self { steps: 21, random_inputs: 4000, seed: 7 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// Receiver whose feedback is used.
    pub direction: Receiver,
    /// No-feedback boundary point being improved on.
    pub witness_point: RatePoint,
    pub marton_input: TwoAuxSpec,
    pub enhanced_point: RatePoint,
    pub enhanced_input: TwoAuxSpec,
    /// Certified point, strictly outside the no-feedback baseline.
    pub feedback_point: RatePoint,
    /// Distance of the certified point beyond the baseline.
    pub improvement: f64,
    /// Largest violation of the direct evaluation (≤ 1e-9 when sound).
    pub soundness_violation: f64,
    pub certificate: UsefulnessCertificate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImprovementReport {
    pub baseline_region: RateRegion,
    pub witness: Option<Witness>,
    pub note: String,
}

impl ImprovementReport {
    pub fn to_json(&self) -> serde_json::Value {
        let baseline = json!({
            "constraints": self.baseline_region.halfplanes,
            "vertices": self.baseline_region.vertices().unwrap_or_default(),
        });
        match &self.witness {
            Some(w) => json!({
                "witness_point": w.witness_point,
                "baseline_region": baseline,
                "feedback_point_or_region": {
                    "direction": w.direction,
                    "point": w.feedback_point,
                    "enhanced_point": w.enhanced_point,
                    "improvement": w.improvement,
                    "soundness_violation": w.soundness_violation,
                },
                "certificate": w.certificate,
            }),
            None => json!({
                "witness_point": null,
                "baseline_region": baseline,
                "feedback_point_or_region": null,
                "certificate": null,
                "note": self.note,
            }),
        }
    }
}

/// Superposition inputs P(u, x) with |U| = 2.
pub fn superposition_inputs(x_size: usize, opts: &ImprovementOptions) -> Result<Vec<TwoAuxSpec>> {
    let mut out = vec![];
    if x_size == 2 {
        let n = opts.steps.max(2);
        let v = |k: usize| k as f64 / (n - 1) as f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let (pu, a, b) = (v(i), v(j), v(k));
                    let pmf = vec![(1.0 - pu) * (1.0 - a), (1.0 - pu) * a, pu * (1.0 - b), pu * b];
                    out.push(TwoAuxSpec::from_ux(2, 2, pmf)?);
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        for _ in 0..opts.random_inputs {
            let w: Vec<f64> = (0..2 * x_size).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
            let s: f64 = w.iter().sum();
            out.push(TwoAuxSpec::from_ux(2, x_size, w.iter().map(|v| v / s).collect())?);
        }
    }
    Ok(out)
}

struct InputTerms {
    aux: TwoAuxSpec,
    /// Superposition corner (I(U;Y1), I(X;Y2|U)).
    corner: RatePoint,
    sum: f64,
    gap: f64,
    /// Enhanced corner (I(U;Y1), I(X;Y1,Y2|U)).
    enhanced: RatePoint,
}

fn input_terms(aux: TwoAuxSpec, channel: &BroadcastChannel) -> Result<InputTerms> {
    use Var::{U, X, Y1, Y2};
    let j = aux.assemble(channel)?;
    let c = j.mutual_info(&[U], &[Y1], &[])?;
    Ok(InputTerms {
        corner: RatePoint::new(c, j.mutual_info(&[X], &[Y2], &[U])?),
        sum: j.mutual_info(&[X], &[Y2], &[])?,
        gap: j.mutual_info(&[U], &[Y2], &[])? - c,
        enhanced: RatePoint::new(c, j.mutual_info(&[X], &[Y1, Y2], &[U])?),
        aux,
    })
}

/// Marton form of a superposition input: U0 = U, U1 constant, U2 = X.
pub fn superposition_marton(aux: &TwoAuxSpec) -> Result<SchemeSpec> {
    Ok(SchemeSpec::cloud_and_satellite(aux.u_size, aux.x_size, &aux.pmf, TestChannel::Absent)?)
}

/// Signed distance of `p` from the upper-right boundary of `region`
/// (≥ 0 on or beyond it), ignoring the coordinate axes.
fn pareto_excess(region: &RateRegion, p: RatePoint) -> f64 {
    region
        .halfplanes
        .iter()
        .filter(|h| h.a1 >= 0.0 && h.a2 >= 0.0 && (h.a1 > 0.0 || h.a2 > 0.0))
        .map(|h| h.excess(p))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Time-sharing of two inputs as one input with U = (Q, U): weight `lambda` on `b`.
pub fn mix_inputs(a: &TwoAuxSpec, b: &TwoAuxSpec, lambda: f64) -> Result<TwoAuxSpec> {
    let pmf = a.pmf.iter().map(|p| (1.0 - lambda) * p).chain(b.pmf.iter().map(|p| lambda * p)).collect();
    Ok(TwoAuxSpec::new(a.u_size + b.u_size, 1, a.x_size, pmf)?)
}

/// Number of interior mixing weights tried between adjacent boundary corners.
const MIX_STEPS: usize = 20;

fn search_direction(
    channel: &BroadcastChannel,
    r_fb: f64,
    inputs: &[TwoAuxSpec],
) -> Result<(RateRegion, Option<Witness>)> {
    let eval = |aux: &[TwoAuxSpec]| -> Result<Vec<InputTerms>> {
        aux.par_iter().map(|a| input_terms(a.clone(), channel)).collect()
    };
    let hull = |terms: &[InputTerms]| -> Result<RateRegion> {
        let mut pts = vec![];
        for t in terms {
            pts.push(t.corner);
            pts.push(RatePoint::new(0.0, t.sum));
            pts.push(RatePoint::new(t.corner.r1, (t.sum - t.corner.r1).min(t.corner.r2).max(0.0)));
        }
        Ok(RateRegion::hull_of(&pts)?)
    };
    let mut terms = eval(inputs)?;
    // time-share neighbouring boundary corners so edge points get their own inputs
    let first = hull(&terms)?;
    let mut boundary: Vec<usize> =
        (0..terms.len()).filter(|&i| pareto_excess(&first, terms[i].corner) >= -PREDICATE_TOL).collect();
    boundary.sort_by(|&i, &j| terms[i].corner.r1.total_cmp(&terms[j].corner.r1).then(i.cmp(&j)));
    boundary.dedup_by(|j, i| (terms[*i].corner.r1 - terms[*j].corner.r1).abs() <= PREDICATE_TOL);
    let mut mixes = vec![];
    for w in boundary.windows(2) {
        for k in 1..MIX_STEPS {
            mixes.push(mix_inputs(&terms[w[0]].aux, &terms[w[1]].aux, k as f64 / MIX_STEPS as f64)?);
        }
    }
    terms.extend(eval(&mixes)?);
    let baseline = hull(&terms)?;
    if r_fb <= 0.0 {
        return Ok((baseline, None));
    }
    // boundary corners with a positive cloud gap, paired with the enhanced corner dominating them most
    let mut candidates: Vec<(f64, usize, usize)> = vec![];
    for (i, t) in terms.iter().enumerate() {
        let interior = t.corner.r1 <= WITNESS_TOL || t.corner.r2 <= WITNESS_TOL;
        if interior || t.gap <= WITNESS_TOL || pareto_excess(&baseline, t.corner) < -PREDICATE_TOL || t.corner.r2 >= t.sum - WITNESS_TOL {
            continue;
        }
        let best = terms
            .iter()
            .enumerate()
            .map(|(k, e)| ((e.enhanced.r1 - t.corner.r1).min(e.enhanced.r2 - t.corner.r2), k))
            .fold((f64::NEG_INFINITY, 0), |a, b| if b.0 > a.0 { b } else { a });
        if best.0 >= WITNESS_TOL {
            candidates.push((best.0, i, best.1));
        }
    }
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut found: Option<Witness> = None;
    for &(_, i, k) in candidates.iter().take(32) {
        let marton = superposition_marton(&terms[i].aux)?;
        let enh = &terms[k];
        let probe = usefulness_certificate(&marton, terms[i].corner, &enh.aux, enh.enhanced, channel, 0.5, r_fb);
        let probe = match probe {
            Ok(c) => c,
            Err(SearchError::Precondition { .. }) => continue,
            Err(e) => return Err(e),
        };
        let mut gamma = probe.gamma_info_bound.min(probe.gamma_fb_bound).min(0.5);
        while gamma >= 1e-9 {
            let cert = usefulness_certificate(&marton, terms[i].corner, &enh.aux, enh.enhanced, channel, gamma, r_fb)?;
            if !cert.pass {
                gamma *= 0.5;
                continue;
            }
            let improvement = violation(&baseline, cert.target_point);
            if improvement >= WITNESS_TOL && found.as_ref().is_none_or(|w| improvement > w.improvement) {
                let sv = certificate_violation(&marton, &enh.aux, channel, &cert, r_fb)?;
                if sv > PREDICATE_TOL {
                    return Err(SearchError::Unsound(format!(
                        "mixed point {:?} violates the direct region by {sv}",
                        cert.target_point
                    )));
                }
                found = Some(Witness {
                    direction: Receiver::One,
                    witness_point: terms[i].corner,
                    marton_input: terms[i].aux.clone(),
                    enhanced_point: enh.enhanced,
                    enhanced_input: enh.aux.clone(),
                    feedback_point: cert.target_point,
                    improvement,
                    soundness_violation: sv,
                    certificate: cert,
                });
            }
            break;
        }
    }
    Ok((baseline, found))
}

/// Looks for a no-feedback boundary point that a certified feedback point
/// strictly improves on, trying receiver 1's feedback and then receiver 2's.
pub fn improvement_report(channel: &BroadcastChannel, budget: &FeedbackBudget, opts: &ImprovementOptions) -> Result<ImprovementReport> {
    let inputs = superposition_inputs(channel.x_size(), opts)?;
    let (baseline, w1) = search_direction(channel, budget.r_fb1, &inputs)?;
    if let Some(w) = w1 {
        return Ok(ImprovementReport { baseline_region: baseline, witness: Some(w), note: "receiver 1 feedback".into() });
    }
    let (_, w2) = search_direction(&channel.swapped(), budget.r_fb2, &inputs)?;
    let witness = w2.map(|w| Witness {
        direction: Receiver::Two,
        witness_point: w.witness_point.swapped(),
        enhanced_point: w.enhanced_point.swapped(),
        feedback_point: w.feedback_point.swapped(),
        ..w
    });
    let note = if witness.is_some() { "receiver 2 feedback" } else { "none found at this grid" };
    Ok(ImprovementReport { baseline_region: baseline, witness, note: note.into() })
}

// ---------------------------------------------------------------------------
// Blackwell channel

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlackwellOptions {
    pub budget: f64,
    pub seed: u64,
    /// Random starting points per auxiliary choice.
    pub random_samples: usize,
    /// Hill-climbing iterations from the best starts.
    pub refine_iters: usize,
    /// Number of best starts that are refined.
    pub starts: usize,
}

impl Default for BlackwellOptions {
    fn default() -> Self {
        Self { budget: 8.0, seed: 1, random_samples: 300, refine_iters: 400, starts: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlackwellCandidate {
    pub choice: String,
    pub symmetric_rate: f64,
    pub sum_rate: f64,
    pub scheme: SchemeSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlackwellReport {
    pub best: BlackwellCandidate,
    pub per_choice: Vec<BlackwellCandidate>,
    pub no_feedback_sum: f64,
    pub evaluations: usize,
}

fn softmax(z: &[f64]) -> [f64; 3] {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = z.iter().map(|v| (v - m).exp()).collect();
    let s: f64 = e.iter().sum();
    [e[0] / s, e[1] / s, e[2] / s]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BlackwellChoice {
    TimeSharing,
    Superposition,
}

impl BlackwellChoice {
    fn dims(self) -> usize {
        match self {
            BlackwellChoice::TimeSharing => 10,
            BlackwellChoice::Superposition => 21,
        }
    }

    fn name(self) -> &'static str {
        match self {
            BlackwellChoice::TimeSharing => "coded time-sharing",
            BlackwellChoice::Superposition => "randomized superposition",
        }
    }

    fn scheme(self, z: &[f64]) -> Result<SchemeSpec> {
        Ok(match self {
            BlackwellChoice::TimeSharing => {
                let p = 0.5 / (1.0 + (-z[0]).exp());
                examples::blackwell_time_sharing(p, [softmax(&z[1..4]), softmax(&z[4..7]), softmax(&z[7..10])])?
            }
            BlackwellChoice::Superposition => {
                let u0 = softmax(&z[0..3]);
                let r1: Vec<[f64; 3]> = (0..3).map(|k| softmax(&z[3 + 3 * k..6 + 3 * k])).collect();
                let r2: Vec<[f64; 3]> = (0..3).map(|k| softmax(&z[12 + 3 * k..15 + 3 * k])).collect();
                examples::blackwell_superposition(&u0, &r1, &r2)?
            }
        })
    }
}

fn blackwell_value(choice: BlackwellChoice, z: &[f64], channel: &BroadcastChannel, budget: &FeedbackBudget) -> f64 {
    let eval = || -> Result<f64> {
        let scheme = choice.scheme(z)?;
        let v = regions::thm2_region(&scheme, channel, budget)?;
        Ok(match v.region {
            Some(r) => r.symmetric_rate()?,
            None => 0.0,
        })
    };
    eval().unwrap_or(0.0)
}

fn optimize_choice(choice: BlackwellChoice, opts: &BlackwellOptions, seed: u64) -> Result<(BlackwellCandidate, usize)> {
    let channel = examples::blackwell_channel();
    let budget = FeedbackBudget::new(opts.budget, opts.budget)?;
    let d = choice.dims();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<Vec<f64>> =
        (0..opts.random_samples.max(1)).map(|_| (0..d).map(|_| rng.random_range(-3.0..3.0)).collect()).collect();
    let values: Vec<f64> = starts.par_iter().map(|z| blackwell_value(choice, z, &channel, &budget)).collect();
    let mut evals = starts.len();
    let mut order: Vec<usize> = (0..starts.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let chains: Vec<(Vec<f64>, f64, u64)> = order
        .iter()
        .take(opts.starts.max(1))
        .enumerate()
        .map(|(k, &i)| (starts[i].clone(), values[i], seed.wrapping_add(1 + k as u64)))
        .collect();
    let refined: Vec<(Vec<f64>, f64, usize)> = chains
        .into_par_iter()
        .map(|(mut z, mut v, s)| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let mut step = 1.0;
            let mut n = 0;
            for it in 0..opts.refine_iters {
                let cand: Vec<f64> = if it % 2 == 0 {
                    z.iter().map(|x| x + step * rng.random_range(-1.0..1.0)).collect()
                } else {
                    let mut c = z.clone();
                    let k = rng.random_range(0..d);
                    c[k] += step * rng.random_range(-2.0..2.0);
                    c
                };
                let cv = blackwell_value(choice, &cand, &channel, &budget);
                n += 1;
                if cv > v {
                    z = cand;
                    v = cv;
                } else {
                    step = (step * 0.985).max(0.01);
                }
            }
            (z, v, n)
        })
        .collect();
    evals += refined.iter().map(|r| r.2).sum::<usize>();
    let best = refined
        .iter()
        .fold(&refined[0], |a, b| if b.1 > a.1 { b } else { a });
    Ok((
        BlackwellCandidate {
            choice: choice.name().into(),
            symmetric_rate: best.1,
            sum_rate: 2.0 * best.1,
            scheme: choice.scheme(&best.0)?,
        },
        evals,
    ))
}

/// Seeded random search with hill-climbing refinement of the symmetric rate
/// of the backward-decoding region over both auxiliary choices.
pub fn blackwell_optimize(opts: &BlackwellOptions) -> Result<BlackwellReport> {
    let mut per_choice = vec![];
    let mut evaluations = 0;
    for (k, choice) in [BlackwellChoice::TimeSharing, BlackwellChoice::Superposition].into_iter().enumerate() {
        let (c, n) = optimize_choice(choice, opts, opts.seed.wrapping_mul(1000).wrapping_add(k as u64))?;
        per_choice.push(c);
        evaluations += n;
    }
    let best = per_choice
        .iter()
        .fold(&per_choice[0], |a, b| if b.symmetric_rate > a.symmetric_rate { b } else { a })
        .clone();
    Ok(BlackwellReport { best, per_choice, no_feedback_sum: examples::blackwell_nofb_sum(), evaluations })
}

/// Thm-2 region of a Blackwell scheme, for reporting.
pub fn blackwell_region(scheme: &SchemeSpec, budget: f64) -> Result<RegionVerdict> {
    let channel = examples::blackwell_channel();
    Ok(regions::thm2_region(scheme, &channel, &FeedbackBudget::new(budget, budget)?)?)
}

/// Largest distance by which any of `points` lies beyond `baseline`.
pub fn max_gain(points: &[RatePoint], baseline: &RateRegion) -> f64 {
    points.iter().map(|&p| violation(baseline, p)).fold(f64::NEG_INFINITY, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_points_enumerate_product() {
        let g = GridSpec::new(vec![Axis::new("a", 0.0, 1.0, 3), Axis::new("b", 0.0, 0.5, 2)]);
        let pts = g.points();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[0], vec![0.0, 0.0]);
        assert_eq!(pts[5], vec![1.0, 0.5]);
    }

    #[test]
    fn neighbours_clip_and_skip_centre() {
        let g = GridSpec::new(vec![Axis::new("a", 0.0, 1.0, 3)]);
        let n = g.neighbours(&[0.0], 0.5);
        assert_eq!(n, vec![vec![0.25]]);
    }

    #[test]
    fn single_point_frontier() {
        let fam = Family::BsbcNofb { p1: 0.3, p2: 0.1 };
        let mut g = GridSpec::new(vec![Axis::new("beta", 0.2, 0.2, 1)]);
        g.refine = 0;
        let f = frontier(&fam, &g).unwrap();
        let c = examples::bsbc_nofb_point(0.3, 0.1, 0.2).unwrap();
        assert!((f.samples.last().unwrap().r1 - c.r1).abs() < 1e-15);
        assert!(f.samples.iter().all(|s| (s.r2 - c.r2).abs() < 1e-15));
    }

    #[test]
    fn all_infeasible_reports_reasons() {
        let fam = Family::Bsbc { p1: 0.3, p2: 0.1, r_fb1: 0.0 };
        let mut g = GridSpec::new(vec![Axis::new("beta1", 0.1, 0.2, 2), Axis::new("beta2", 0.0, 0.1, 2)]);
        g.refine = 0;
        match frontier(&fam, &g) {
            Err(SearchError::Infeasible { reasons }) => assert!(reasons[0].contains("feedback budget")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn mixed_scheme_slots() {
        let ch = examples::bsbc_channel(0.2, 0.1).unwrap();
        let aux = TwoAuxSpec::from_ux(2, 2, vec![0.4, 0.1, 0.1, 0.4]).unwrap();
        let m = superposition_marton(&aux).unwrap();
        let s = mixed_scheme(&m, &aux, &ch, 0.25).unwrap();
        assert_eq!(s.u_sizes, [2, 1, 2]);
        assert_eq!(s.q_pmf, vec![0.75, 0.25]);
    }
}
