//! Direct evaluators for inner and outer bounds on the capacity region.
//!
//! Every evaluator takes an assembled joint. If the joint contains a
//! time-sharing variable `Q`, all information terms are conditioned on it.

use std::cell::RefCell;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::geometry::{GeomError, HalfPlane, RateRegion};
use crate::info::{
    self, assemble_joint, BroadcastChannel, FeedbackBudget, InfoError, JointPmf, SchemeSpec,
    TestChannel, TwoAuxSpec, Var,
};

/// Slack below which a side condition counts as violated.
pub const FEASIBILITY_TOL: f64 = 1e-10;

/// Bound on conditional mutual information treated as a Markov chain.
pub const MARKOV_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegionError {
    #[error(transparent)]
    Info(#[from] InfoError),
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, RegionError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Receiver {
    One,
    Two,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideCondition {
    pub name: String,
    pub slack: f64,
}

impl SideCondition {
    pub(crate) fn new(name: &str, slack: f64) -> Self {
        Self { name: name.into(), slack }
    }

    pub fn holds(&self) -> bool {
        self.slack >= -FEASIBILITY_TOL
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaTerms {
    pub delta1: f64,
    pub delta2: f64,
}

/// A region together with the side conditions that make it valid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionVerdict {
    pub region: Option<RateRegion>,
    pub constraints: RateRegion,
    pub feasibility: Vec<SideCondition>,
    /// Conditions that emerge from elimination but need not be enforced.
    pub diagnostics: Vec<SideCondition>,
}

impl RegionVerdict {
    pub(crate) fn build(halfplanes: Vec<HalfPlane>, mut feasibility: Vec<SideCondition>, diagnostics: Vec<SideCondition>) -> Self {
        // every bound has nonnegative coefficients, so the origin decides emptiness
        let floor = halfplanes.iter().map(|h| h.b).fold(f64::INFINITY, f64::min);
        if floor.is_finite() {
            feasibility.push(SideCondition { name: "rate bounds nonnegative".into(), slack: floor });
        }
        let constraints = RateRegion::new(halfplanes);
        let region = feasibility.iter().all(SideCondition::holds).then(|| constraints.clone());
        Self { region, constraints, feasibility, diagnostics }
    }

    pub fn is_feasible(&self) -> bool {
        self.region.is_some()
    }

    pub fn violated(&self) -> Vec<&SideCondition> {
        self.feasibility.iter().filter(|c| !c.holds()).collect()
    }

    pub fn diagnostics_hold(&self) -> bool {
        self.diagnostics.iter().all(SideCondition::holds)
    }

    /// `{constraints, vertices, feasibility, diagnostics}`.
    pub fn to_json(&self) -> serde_json::Value {
        let vertices = self
            .region
            .as_ref()
            .and_then(|r| r.vertices().ok())
            .unwrap_or_default();
        json!({
            "constraints": self.constraints.halfplanes,
            "vertices": vertices,
            "feasibility": self.feasibility,
            "diagnostics": self.diagnostics,
        })
    }

    /// Exchange the roles of R1 and R2.
    pub(crate) fn swapped(self) -> Self {
        Self {
            region: self.region.map(|r| r.swapped()),
            constraints: self.constraints.swapped(),
            feasibility: self.feasibility,
            diagnostics: self.diagnostics,
        }
    }
}

/// Region JSON for a plain region.
pub fn region_json(region: &RateRegion) -> serde_json::Value {
    json!({
        "constraints": region.halfplanes,
        "vertices": region.vertices().unwrap_or_default(),
        "feasibility": [],
    })
}

/// Cached information terms with optional Q conditioning and index mirroring.
struct Terms<'a> {
    joint: &'a JointPmf,
    with_q: bool,
    mirror: bool,
    cache: RefCell<HashMap<Vec<Var>, f64>>,
}

impl<'a> Terms<'a> {
    fn new(joint: &'a JointPmf) -> Self {
        Self { joint, with_q: joint.has(Var::Q), mirror: false, cache: RefCell::new(HashMap::new()) }
    }

    fn mirrored(joint: &'a JointPmf, mirror: bool) -> Self {
        Self { mirror, ..Self::new(joint) }
    }

    fn require(&self, vs: &[Var]) -> Result<()> {
        for &v in vs {
            let v = if self.mirror { v.mirrored() } else { v };
            if !self.joint.has(v) {
                return Err(InfoError::Structural(format!("joint lacks variable {v}")).into());
            }
        }
        Ok(())
    }

    fn h(&self, vs: &[Var]) -> Result<f64> {
        let mut key: Vec<Var> = vs.iter().map(|&v| if self.mirror { v.mirrored() } else { v }).collect();
        if self.with_q {
            key.push(Var::Q);
        }
        key.sort();
        key.dedup();
        if let Some(&v) = self.cache.borrow().get(&key) {
            return Ok(v);
        }
        let v = self.joint.entropy_of(&key)?;
        self.cache.borrow_mut().insert(key, v);
        Ok(v)
    }

    /// I(l; r | g [, Q]).
    fn i(&self, l: &[Var], r: &[Var], g: &[Var]) -> Result<f64> {
        let cat = |a: &[Var], b: &[Var]| -> Vec<Var> { a.iter().chain(b).copied().collect() };
        let lg = cat(l, g);
        let rg = cat(r, g);
        let all = cat(&lg, r);
        let v = self.h(&lg)? + self.h(&rg)? - self.h(&all)? - self.h(g)?;
        Ok(info::clamp_mi(v)?)
    }
}

use Var::{Yt1, Yt2, U, U0, U1, U2, V, X, Y1, Y2};

fn hp(a1: f64, a2: f64, b: f64, name: &str) -> HalfPlane {
    HalfPlane::named(a1, a2, b, name)
}

/// Marton's inner bound.
pub fn marton(joint: &JointPmf) -> Result<RateRegion> {
    let t = Terms::new(joint);
    t.require(&[U0, U1, U2, Y1, Y2])?;
    let a = t.i(&[U1], &[U2], &[U0])?;
    let r1 = t.i(&[U0, U1], &[Y1], &[])?;
    let r2 = t.i(&[U0, U2], &[Y2], &[])?;
    let s1 = r1 + t.i(&[U2], &[Y2], &[U0])? - a;
    let s2 = r2 + t.i(&[U1], &[Y1], &[U0])? - a;
    Ok(RateRegion::new(vec![
        hp(1.0, 0.0, r1, "R1"),
        hp(0.0, 1.0, r2, "R2"),
        hp(1.0, 1.0, s1, "R1+R2 via cloud at receiver 1"),
        hp(1.0, 1.0, s2, "R1+R2 via cloud at receiver 2"),
    ]))
}

/// Superposition coding; `which` is the receiver that decodes only the cloud `u`.
pub fn superposition(joint: &JointPmf, u: &[Var], which: Receiver) -> Result<RateRegion> {
    let t = Terms::new(joint);
    t.require(u)?;
    t.require(&[X, Y1, Y2])?;
    let (weak, strong) = match which {
        Receiver::One => (Y1, Y2),
        Receiver::Two => (Y2, Y1),
    };
    let cloud = t.i(u, &[weak], &[])?;
    let sat = t.i(&[X], &[strong], u)?;
    let total = t.i(&[X], &[strong], &[])?;
    let r = RateRegion::new(vec![
        hp(1.0, 0.0, cloud, "cloud rate"),
        hp(0.0, 1.0, sat, "satellite rate"),
        hp(1.0, 1.0, total, "sum rate"),
    ]);
    Ok(if which == Receiver::Two { r.swapped() } else { r })
}

pub fn superposition_region(aux: &TwoAuxSpec, channel: &BroadcastChannel, which: Receiver) -> Result<RateRegion> {
    superposition(&aux.assemble(channel)?, &[U], which)
}

/// Two-auxiliary outer bound: `u` serves receiver 1, `v` receiver 2.
pub fn nair_elgamal(joint: &JointPmf, u: &[Var], v: &[Var]) -> Result<RateRegion> {
    let t = Terms::new(joint);
    t.require(u)?;
    t.require(v)?;
    t.require(&[X, Y1, Y2])?;
    let iu = t.i(u, &[Y1], &[])?;
    let iv = t.i(v, &[Y2], &[])?;
    Ok(RateRegion::new(vec![
        hp(1.0, 0.0, iu, "R1"),
        hp(0.0, 1.0, iv, "R2"),
        hp(1.0, 1.0, iu + t.i(&[X], &[Y2], u)?, "R1+R2 via U"),
        hp(1.0, 1.0, iv + t.i(&[X], &[Y1], v)?, "R1+R2 via V"),
    ]))
}

pub fn nair_elgamal_outer(aux: &TwoAuxSpec, channel: &BroadcastChannel) -> Result<RateRegion> {
    nair_elgamal(&aux.assemble(channel)?, &[U], &[V])
}

/// Capacity region of the channel enhanced by giving one receiver's output
/// to the other.
pub fn enhanced(joint: &JointPmf, u: &[Var], which: Receiver) -> Result<RateRegion> {
    let t = Terms::new(joint);
    t.require(u)?;
    t.require(&[X, Y1, Y2])?;
    let weak = if which == Receiver::One { Y1 } else { Y2 };
    let cloud = t.i(u, &[weak], &[])?;
    let sat = t.i(&[X], &[Y1, Y2], u)?;
    let r = RateRegion::new(vec![hp(1.0, 0.0, cloud, "cloud rate"), hp(0.0, 1.0, sat, "satellite rate")]);
    Ok(if which == Receiver::Two { r.swapped() } else { r })
}

pub fn enhanced_outer(aux: &TwoAuxSpec, channel: &BroadcastChannel, which: Receiver) -> Result<RateRegion> {
    enhanced(&aux.assemble(channel)?, &[U], which)
}

fn deltas(t: &Terms, budget: &FeedbackBudget) -> Result<DeltaTerms> {
    Ok(DeltaTerms {
        delta1: (t.i(&[Yt1], &[Y1], &[U0, Y2])? - budget.r_fb1).max(0.0),
        delta2: (t.i(&[Yt2], &[Y2], &[U0, Y1])? - budget.r_fb2).max(0.0),
    })
}

/// Compression penalties of the sliding-window scheme for a joint and budget.
pub fn delta_terms(joint: &JointPmf, budget: &FeedbackBudget) -> Result<DeltaTerms> {
    let t = Terms::new(joint);
    t.require(&[U0, Y1, Y2, Yt1, Yt2])?;
    deltas(&t, budget)
}

/// Superposition scheme with receiver-1 compression relayed to receiver 2.
/// The joint uses the cloud/satellite layout: `U0` is the cloud, `X` the input.
pub fn simple_scheme(joint: &JointPmf, budget: &FeedbackBudget) -> Result<RegionVerdict> {
    let t = Terms::new(joint);
    t.require(&[U0, X, Y1, Y2, Yt1])?;
    let r1 = t.i(&[U0], &[Y1], &[])?;
    let gap = t.i(&[U0], &[Y2], &[])? - r1;
    let wz = t.i(&[Yt1], &[Y1], &[Y2, U0])?;
    let r2 = t.i(&[X], &[Yt1, Y2], &[U0])?;
    Ok(RegionVerdict::build(
        vec![hp(1.0, 0.0, r1, "cloud rate"), hp(0.0, 1.0, r2, "satellite rate with side information")],
        vec![
            SideCondition::new("compression rate within cloud-rate gap", gap - wz),
            SideCondition::new("compression rate within feedback budget", budget.r_fb1 - wz),
        ],
        vec![],
    ))
}

pub fn simple_scheme_region(
    aux: &TwoAuxSpec,
    test1: &TestChannel,
    channel: &BroadcastChannel,
    budget: &FeedbackBudget,
) -> Result<RegionVerdict> {
    let scheme = cloud_scheme(aux, test1)?;
    simple_scheme(&assemble_joint(&scheme, channel)?, budget)
}

fn cloud_scheme(aux: &TwoAuxSpec, test1: &TestChannel) -> Result<SchemeSpec> {
    if aux.v_size != 1 {
        return Err(RegionError::Unsupported("expected a P(u,x) specification".into()));
    }
    Ok(SchemeSpec::cloud_and_satellite(aux.u_size, aux.x_size, &aux.pmf, test1.clone())?)
}

/// Sliding-window decoding at both receivers.
pub fn thm1(joint: &JointPmf, budget: &FeedbackBudget) -> Result<RegionVerdict> {
    let t = Terms::new(joint);
    t.require(&[U0, U1, U2, Y1, Y2, Yt1, Yt2])?;
    let d = deltas(&t, budget)?;
    let a = t.i(&[U1], &[U2], &[U0])?;
    let b1 = t.i(&[U0], &[Y1], &[])?;
    let b2 = t.i(&[U0], &[Y2], &[])?;
    let s1 = t.i(&[U1], &[Y1, Yt2], &[U0])?;
    let s2 = t.i(&[U2], &[Y2, Yt1], &[U0])?;
    let e1 = t.i(&[Yt1], &[Y1], &[U0, U2, Y2])?;
    let e2 = t.i(&[Yt2], &[Y2], &[U0, U1, Y1])?;
    let a1 = t.i(&[U0, U1], &[Y1, Yt2], &[])? - t.i(&[Yt2], &[U0, Y2], &[Y1])?;
    let c1 = t.i(&[U0, U2], &[Y2, Yt1], &[])? - t.i(&[Yt1], &[U0, Y1], &[Y2])?;
    Ok(RegionVerdict::build(
        vec![
            hp(1.0, 0.0, a1, "R1"),
            hp(1.0, 0.0, b2 + s1 - d.delta2 - e1, "R1 with cloud at receiver 2"),
            hp(0.0, 1.0, c1, "R2"),
            hp(0.0, 1.0, b1 + s2 - d.delta1 - e2, "R2 with cloud at receiver 1"),
            hp(1.0, 1.0, a1 + s2 - d.delta1 - a, "R1+R2 via receiver 1"),
            hp(1.0, 1.0, c1 + s1 - d.delta2 - a, "R1+R2 via receiver 2"),
            hp(1.0, 1.0, a1 + c1 - a, "R1+R2 joint"),
        ],
        vec![
            SideCondition::new("satellite 1 exceeds penalty 2", s1 - d.delta2),
            SideCondition::new("satellite 2 exceeds penalty 1", s2 - d.delta1),
            SideCondition::new("compression 1 within cloud rate at receiver 2", b2 - e1),
            SideCondition::new("compression 1 within feedback budget", budget.r_fb1 - e1),
            SideCondition::new("compression 2 within cloud rate at receiver 1", b1 - e2),
            SideCondition::new("compression 2 within feedback budget", budget.r_fb2 - e2),
        ],
        vec![SideCondition::new("satellites cover binning loss", s1 + s2 - d.delta1 - d.delta2 - a)],
    ))
}

pub fn thm1_region(scheme: &SchemeSpec, channel: &BroadcastChannel, budget: &FeedbackBudget) -> Result<RegionVerdict> {
    thm1(&assemble_joint(scheme, channel)?, budget)
}

fn check_not_u0_conditioned(t: &Terms) -> Result<()> {
    for (tv, y) in [(Yt1, Y1), (Yt2, Y2)] {
        if t.i(&[tv], &[U0], &[y])? > MARKOV_TOL {
            return Err(InfoError::Structural(format!(
                "{tv} depends on U0 beyond {y}; backward decoding requires test channels conditioned on the output only"
            ))
            .into());
        }
    }
    Ok(())
}

/// Backward decoding at both receivers.
pub fn thm2(joint: &JointPmf, budget: &FeedbackBudget) -> Result<RegionVerdict> {
    let t = Terms::new(joint);
    t.require(&[U0, U1, U2, Y1, Y2, Yt1, Yt2])?;
    check_not_u0_conditioned(&t)?;
    let d = deltas(&t, budget)?;
    let a = t.i(&[U1], &[U2], &[U0])?;
    let s1 = t.i(&[U1], &[Y1, Yt2], &[U0])?;
    let s2 = t.i(&[U2], &[Y2, Yt1], &[U0])?;
    let r1 = t.i(&[U0, U1], &[Y1, Yt2], &[])? - t.i(&[Yt2], &[Y2], &[Y1])?;
    let r2 = t.i(&[U0, U2], &[Y2, Yt1], &[])? - t.i(&[Yt1], &[Y1], &[Y2])?;
    let e1 = t.i(&[Yt1], &[Y1], &[U0, U2, Y2])?;
    let e2 = t.i(&[Yt2], &[Y2], &[U0, U1, Y1])?;
    Ok(RegionVerdict::build(
        vec![
            hp(1.0, 0.0, r1, "R1"),
            hp(0.0, 1.0, r2, "R2"),
            hp(1.0, 1.0, r1 + s2 - d.delta1 - a, "R1+R2 via receiver 1"),
            hp(1.0, 1.0, r2 + s1 - d.delta2 - a, "R1+R2 via receiver 2"),
            hp(1.0, 1.0, r1 + r2 - a, "R1+R2 joint"),
        ],
        vec![
            SideCondition::new("compression 1 within feedback budget", budget.r_fb1 - e1),
            SideCondition::new("compression 2 within feedback budget", budget.r_fb2 - e2),
        ],
        vec![
            SideCondition::new("satellites cover binning loss", s1 + s2 - d.delta1 - d.delta2 - a),
            SideCondition::new("satellite 1 exceeds penalty 2", s1 - d.delta2),
            SideCondition::new("satellite 2 exceeds penalty 1", s2 - d.delta1),
        ],
    ))
}

pub fn thm2_region(scheme: &SchemeSpec, channel: &BroadcastChannel, budget: &FeedbackBudget) -> Result<RegionVerdict> {
    if scheme.test1.depends_on_u0() || scheme.test2.depends_on_u0() {
        return Err(InfoError::Structural(
            "backward decoding requires test channels conditioned on the output only".into(),
        )
        .into());
    }
    thm2(&assemble_joint(scheme, channel)?, budget)
}

/// Hybrid decoding with feedback from receiver `which` only.
pub fn thm3(joint: &JointPmf, budget: &FeedbackBudget, which: Receiver) -> Result<RegionVerdict> {
    let mirror = which == Receiver::Two;
    let t = Terms::mirrored(joint, mirror);
    t.require(&[U0, U1, U2, Y1, Y2, Yt1])?;
    let fb = if mirror { budget.r_fb2 } else { budget.r_fb1 };
    let delta = (t.i(&[Yt1], &[Y1], &[U0, Y2])? - fb).max(0.0);
    let a = t.i(&[U1], &[U2], &[U0])?;
    let r1 = t.i(&[U0, U1], &[Y1], &[])?;
    let loss = t.i(&[Yt1], &[U0, U1, U2, Y1], &[Y2])?;
    let r2 = t.i(&[U0, U2], &[Yt1, Y2], &[])? - loss;
    let v = RegionVerdict::build(
        vec![
            hp(1.0, 0.0, r1, "R1"),
            hp(0.0, 1.0, r2, "R2"),
            hp(1.0, 1.0, r1 + t.i(&[U2], &[Y2, Yt1], &[U0])? - delta - a, "R1+R2 via receiver 1"),
            hp(1.0, 1.0, t.i(&[U1], &[Y1], &[U0])? + r2 - a, "R1+R2 via receiver 2"),
        ],
        vec![SideCondition::new(
            "compression within feedback budget",
            fb - t.i(&[Yt1], &[U1, Y1], &[U0, U2, Y2])?,
        )],
        vec![],
    );
    Ok(if mirror { v.swapped() } else { v })
}

pub fn thm3_region(
    scheme: &SchemeSpec,
    channel: &BroadcastChannel,
    budget: &FeedbackBudget,
    which: Receiver,
) -> Result<RegionVerdict> {
    thm3(&assemble_joint(scheme, channel)?, budget, which)
}

/// Superposition coding with feedback from receiver `which`, on a
/// cloud/satellite joint (`U0` is the cloud, `X` the input).
pub fn cor1(joint: &JointPmf, budget: &FeedbackBudget, which: Receiver) -> Result<RegionVerdict> {
    let mirror = which == Receiver::Two;
    let t = Terms::mirrored(joint, mirror);
    t.require(&[U0, X, Y1, Y2, Yt1])?;
    let fb = if mirror { budget.r_fb2 } else { budget.r_fb1 };
    let cloud = t.i(&[U0], &[Y1], &[])?;
    let wz = t.i(&[Yt1], &[Y1], &[U0, Y2])?;
    let v = RegionVerdict::build(
        vec![
            hp(1.0, 0.0, cloud, "cloud rate"),
            hp(1.0, 1.0, cloud + t.i(&[X], &[Y2, Yt1], &[U0])?, "R1+R2 with side information"),
            hp(1.0, 1.0, t.i(&[X], &[Y2], &[])? - wz, "R1+R2 at the strong receiver"),
        ],
        vec![SideCondition::new("compression within feedback budget", fb - wz)],
        vec![],
    );
    Ok(if mirror { v.swapped() } else { v })
}

/// `aux` is P(u, x); `test1` acts on the feedback receiver's output and may
/// condition on the cloud. With `which = Two` the roles of the receivers are
/// exchanged.
pub fn cor1_region(
    aux: &TwoAuxSpec,
    test: &TestChannel,
    channel: &BroadcastChannel,
    budget: &FeedbackBudget,
    which: Receiver,
) -> Result<RegionVerdict> {
    let scheme = cloud_scheme(aux, test)?;
    match which {
        Receiver::One => cor1(&assemble_joint(&scheme, channel)?, budget, which),
        Receiver::Two => {
            let swapped = cor1(&assemble_joint(&scheme, &channel.swapped())?, &budget.swapped(), Receiver::One)?;
            Ok(swapped.swapped())
        }
    }
}

/// Processed feedback: the transmitter recompresses the feedback into `V`.
pub fn thm4(joint: &JointPmf, budget: &FeedbackBudget) -> Result<RegionVerdict> {
    let t = Terms::new(joint);
    t.require(&[U0, U1, U2, Y1, Y2, Yt1, Yt2])?;
    if !joint.has(V) {
        return Err(InfoError::Structural("processed-feedback bound needs an update variable V".into()).into());
    }
    let a = t.i(&[U1], &[U2], &[U0])?;
    let k1 = t.i(&[U0, U1], &[Y1, Yt1, V], &[])? - t.i(&[V], &[U0, U1, U2, Yt2], &[Yt1, Y1])?;
    let k2 = t.i(&[U0, U2], &[Y2, Yt2, V], &[])? - t.i(&[V], &[U0, U1, U2, Yt1], &[Yt2, Y2])?;
    let s1 = t.i(&[U1], &[Y1, Yt1, V], &[U0])?;
    let s2 = t.i(&[U2], &[Y2, Yt2, V], &[U0])?;
    Ok(RegionVerdict::build(
        vec![
            hp(1.0, 0.0, k1, "R1"),
            hp(0.0, 1.0, k2, "R2"),
            hp(1.0, 1.0, k1 + s2 - a, "R1+R2 via receiver 1"),
            hp(1.0, 1.0, k2 + s1 - a, "R1+R2 via receiver 2"),
            hp(1.0, 1.0, k1 + k2 - a, "R1+R2 joint"),
        ],
        vec![
            SideCondition::new(
                "compression 1 within feedback budget",
                budget.r_fb1 - t.i(&[Y1], &[Yt1], &[U0, U1, U2, Yt2])?,
            ),
            SideCondition::new(
                "compression 2 within feedback budget",
                budget.r_fb2 - t.i(&[Y2], &[Yt2], &[U0, U1, U2, Yt1])?,
            ),
            SideCondition::new(
                "joint compression within total budget",
                budget.r_fb1 + budget.r_fb2 - t.i(&[Y1, Y2], &[Yt1, Yt2], &[U0, U1, U2])?,
            ),
        ],
        vec![SideCondition::new("satellites cover binning loss", s1 + s2 - a)],
    ))
}

pub fn thm4_region(scheme: &SchemeSpec, channel: &BroadcastChannel, budget: &FeedbackBudget) -> Result<RegionVerdict> {
    if scheme.update.is_none() {
        return Err(InfoError::Structural("processed-feedback bound needs an update channel".into()).into());
    }
    thm4(&assemble_joint(scheme, channel)?, budget)
}

/// Processed feedback with unlimited feedback rates (the receivers' outputs
/// themselves are available to the transmitter).
pub fn cor2(joint: &JointPmf) -> Result<RateRegion> {
    let t = Terms::new(joint);
    t.require(&[U0, U1, U2, Y1, Y2, V])?;
    let a = t.i(&[U1], &[U2], &[U0])?;
    let k1 = t.i(&[U0, U1], &[Y1, V], &[])? - t.i(&[V], &[U0, U1, U2, Y2], &[Y1])?;
    let k2 = t.i(&[U0, U2], &[Y2, V], &[])? - t.i(&[V], &[U0, U1, U2, Y1], &[Y2])?;
    let s1 = t.i(&[U1], &[Y1, V], &[U0])?;
    let s2 = t.i(&[U2], &[Y2, V], &[U0])?;
    let c1 = t.i(&[U0], &[Y1, V], &[])? - t.i(&[V], &[U0, U1, U2, Y2], &[Y1])?;
    let c2 = t.i(&[U0], &[Y2, V], &[])? - t.i(&[V], &[U0, U1, U2, Y1], &[Y2])?;
    Ok(RateRegion::new(vec![
        hp(1.0, 0.0, k1, "R1"),
        hp(0.0, 1.0, k2, "R2"),
        hp(1.0, 1.0, s1 + s2 - a + c1.min(c2), "R1+R2 via weaker cloud"),
        hp(1.0, 1.0, k1 + k2 - a, "R1+R2 joint"),
    ]))
}

/// Merge the receiver-1 satellite into the cloud when receiver 2 decodes
/// (U0, U1) at least as well as receiver 1.
pub fn marton_sufficiency_transform(joint: &JointPmf) -> Result<JointPmf> {
    let t = Terms::new(joint);
    t.require(&[U0, U1, U2, Y1, Y2])?;
    let i1 = t.i(&[U0, U1], &[Y1], &[])?;
    let i2 = t.i(&[U0, U1], &[Y2], &[])?;
    if i1 > i2 + FEASIBILITY_TOL {
        return Err(RegionError::Unsupported(format!(
            "receiver 1 decodes (U0,U1) better than receiver 2 ({i1:.6} > {i2:.6}); only the opposite case is handled"
        )));
    }
    Ok(joint.merge_into(U0, U1)?)
}
