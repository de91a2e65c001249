//! Closed-form regions and auxiliary families for the binary symmetric,
//! BSC/BEC, Gaussian and Blackwell-with-state broadcast channels.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{HalfPlane, RatePoint, RateRegion};
use crate::info::{conv, entropy, hb, BroadcastChannel, InfoError, SchemeSpec, TestChannel, TwoAuxSpec};
use crate::regions::{RegionError, RegionVerdict, SideCondition};

/// Width of the bracket at which the s0 bisection stops.
pub const S0_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum ExampleError {
    #[error("parameter out of range: {0}")]
    Domain(String),
    #[error(transparent)]
    Info(#[from] InfoError),
    #[error(transparent)]
    Region(#[from] RegionError),
}

pub type Result<T> = std::result::Result<T, ExampleError>;

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(ExampleError::Domain(what()))
    }
}

fn unit(x: f64) -> bool {
    (0.0..=1.0).contains(&x)
}

fn hp(a1: f64, a2: f64, b: f64, name: &str) -> HalfPlane {
    HalfPlane::named(a1, a2, b, name)
}

fn bsc(p: f64) -> [f64; 4] {
    [1.0 - p, p, p, 1.0 - p]
}

// ---------------------------------------------------------------------------
// Binary symmetric broadcast channel

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BsbcParams {
    pub p1: f64,
    pub p2: f64,
    pub beta1: f64,
    pub beta2: f64,
}

impl BsbcParams {
    pub fn new(p1: f64, p2: f64, beta1: f64, beta2: f64) -> Result<Self> {
        let s = Self { p1, p2, beta1, beta2 };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        check(unit(self.p1) && unit(self.p2), || format!("crossovers ({}, {})", self.p1, self.p2))?;
        check((0.0..=0.5).contains(&self.beta1) && (0.0..=0.5).contains(&self.beta2), || {
            format!("beta ({}, {}) outside [0, 1/2]", self.beta1, self.beta2)
        })
    }

    /// Joint law of (Ỹ1 ⊕ U, Y2 ⊕ U) in the order (00, 01, 10, 11).
    pub fn alphas(&self) -> [f64; 4] {
        let n = conv(self.p1, self.beta2);
        let (p2, b1) = (self.p2, self.beta1);
        [
            n * p2 * b1 + (1.0 - n) * (1.0 - p2) * (1.0 - b1),
            n * (1.0 - p2) * b1 + (1.0 - n) * p2 * (1.0 - b1),
            n * (1.0 - p2) * (1.0 - b1) + (1.0 - n) * p2 * b1,
            n * p2 * (1.0 - b1) + (1.0 - n) * (1.0 - p2) * b1,
        ]
    }

    /// Compression rate I(Ỹ1; Y1 | Y2, U).
    pub fn compression_rate(&self) -> f64 {
        entropy(&self.alphas()) - hb(conv(self.beta1, self.p2)) - hb(self.beta2)
    }
}

pub fn bsbc_channel(p1: f64, p2: f64) -> Result<BroadcastChannel> {
    check(unit(p1) && unit(p2), || format!("crossovers ({p1}, {p2})"))?;
    Ok(BroadcastChannel::from_marginals(2, &bsc(p1), &bsc(p2))?)
}

/// Superposition region with feedback from receiver 1 for U ~ Bern(1/2),
/// X = U ⊕ W1 and Ỹ1 = Y1 ⊕ W2.
pub fn bsbc_region(params: &BsbcParams, r_fb1: f64) -> Result<RegionVerdict> {
    params.validate()?;
    check(r_fb1 >= 0.0, || format!("feedback rate {r_fb1}"))?;
    let BsbcParams { p1, p2, beta1, beta2 } = *params;
    let h = entropy(&params.alphas());
    let cloud = 1.0 - hb(conv(beta1, p1));
    let wz = params.compression_rate();
    Ok(RegionVerdict::build(
        vec![
            hp(1.0, 0.0, cloud, "cloud rate"),
            hp(1.0, 1.0, cloud + h - hb(p2) - hb(conv(beta2, p1)), "R1+R2 with side information"),
            hp(1.0, 1.0, 1.0 - hb(p2) - wz, "R1+R2 at the strong receiver"),
        ],
        vec![SideCondition::new("compression within feedback budget", r_fb1 - wz)],
        vec![],
    ))
}

/// The auxiliary choice behind [`bsbc_region`]: P(u, x) and the test channel.
pub fn bsbc_scheme(params: &BsbcParams) -> Result<(TwoAuxSpec, TestChannel)> {
    params.validate()?;
    let b1 = params.beta1;
    let aux = TwoAuxSpec::from_ux(2, 2, vec![0.5 * (1.0 - b1), 0.5 * b1, 0.5 * b1, 0.5 * (1.0 - b1)])?;
    let test = TestChannel::GivenY { size: 2, law: bsc(params.beta2).to_vec() };
    Ok((aux, test))
}

/// Corner of the no-feedback superposition region for cloud noise `beta`.
pub fn bsbc_nofb_point(p1: f64, p2: f64, beta: f64) -> Result<RatePoint> {
    check(unit(p1) && unit(p2) && (0.0..=0.5).contains(&beta), || format!("({p1}, {p2}, {beta})"))?;
    Ok(RatePoint::new(1.0 - hb(conv(beta, p1)), hb(conv(beta, p2)) - hb(p2)))
}

pub fn bsbc_nofb_region(p1: f64, p2: f64, beta: f64) -> Result<RateRegion> {
    let c = bsbc_nofb_point(p1, p2, beta)?;
    Ok(RateRegion::new(vec![hp(1.0, 0.0, c.r1, "cloud rate"), hp(0.0, 1.0, c.r2, "satellite rate")]))
}

/// Largest no-feedback R2 at a given R1, inverting the cloud rate in β.
pub fn bsbc_nofb_r2_at(p1: f64, p2: f64, r1: f64) -> Result<f64> {
    check(unit(p1) && unit(p2) && p1 != 0.5, || format!("crossovers ({p1}, {p2})"))?;
    let top = 1.0 - hb(p1);
    if r1 > top {
        return Ok(f64::NEG_INFINITY);
    }
    if r1 <= 0.0 {
        return Ok(1.0 - hb(p2));
    }
    // cloud rate decreases in β on [0, 1/2]
    let (mut lo, mut hi) = (0.0, 0.5);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if 1.0 - hb(conv(mid, p1)) >= r1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hb(conv(lo, p2)) - hb(p2))
}

// ---------------------------------------------------------------------------
// BSC to receiver 1, BEC to receiver 2

/// Output symbol of the erasure channel and of erasing test channels.
pub const ERASURE: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BscBecParams {
    pub p: f64,
    pub e: f64,
    pub s: f64,
    pub alpha: f64,
    pub gamma: f64,
}

impl BscBecParams {
    fn check_channel(p: f64, e: f64) -> Result<()> {
        check(p > 0.0 && p < 0.5, || format!("crossover {p} outside (0, 1/2)"))?;
        check(e > 0.0 && e < 1.0, || format!("erasure probability {e} outside (0, 1)"))
    }

    pub fn validate(&self) -> Result<()> {
        Self::check_channel(self.p, self.e)?;
        check((0.0..=0.5).contains(&self.s), || format!("s = {} outside [0, 1/2]", self.s))?;
        check(unit(self.alpha), || format!("alpha = {} outside [0, 1]", self.alpha))?;
        check(self.gamma > 0.0 && self.gamma < 1.0, || format!("gamma = {} outside (0, 1)", self.gamma))
    }

    /// 0 < e < H_b(p): receiver 1 is more capable.
    pub fn is_case1(&self) -> bool {
        self.e < hb(self.p)
    }
}

/// Y1 ∈ {0, 1}, Y2 ∈ {0, 1, [`ERASURE`]}.
pub fn bscbec_channel(p: f64, e: f64) -> Result<BroadcastChannel> {
    BscBecParams::check_channel(p, e)?;
    let bec = [1.0 - e, 0.0, e, 0.0, 1.0 - e, e];
    Ok(BroadcastChannel::from_marginals(2, &bsc(p), &bec)?)
}

/// Superposition region with cloud noise `s` (no feedback).
pub fn bscbec_nofb(p: f64, e: f64, s: f64) -> Result<RateRegion> {
    BscBecParams::check_channel(p, e)?;
    check((0.0..=0.5).contains(&s), || format!("s = {s}"))?;
    Ok(RateRegion::new(vec![
        hp(1.0, 0.0, 1.0 - hb(conv(s, p)), "R1"),
        hp(0.0, 1.0, (1.0 - e) * hb(s), "R2"),
        hp(1.0, 1.0, 1.0 - e, "sum rate"),
    ]))
}

/// Time-sharing between the two single-user capacities.
pub fn bscbec_timesharing(p: f64, e: f64, alpha: f64) -> Result<RateRegion> {
    BscBecParams::check_channel(p, e)?;
    check(unit(alpha), || format!("alpha = {alpha}"))?;
    Ok(RateRegion::new(vec![
        hp(1.0, 0.0, alpha * (1.0 - hb(p)), "R1"),
        hp(0.0, 1.0, (1.0 - alpha) * (1.0 - e), "R2"),
    ]))
}

/// Receiver-1 feedback region for 0 < e < H_b(p), with X = U ⊕ Bern(s) and
/// Ỹ1 = Y1 with probability γ, erased otherwise.
pub fn bscbec_case1(params: &BscBecParams, r_fb1: f64) -> Result<RegionVerdict> {
    params.validate()?;
    check(params.is_case1(), || format!("case 1 needs e < H_b(p), got e = {}", params.e))?;
    let BscBecParams { p, e, s, gamma, .. } = *params;
    let hsp = hb(conv(s, p));
    let wz = gamma * (hb(p) * (1.0 - e) + e * hsp);
    Ok(RegionVerdict::build(
        vec![
            hp(1.0, 0.0, 1.0 - hsp, "cloud rate"),
            hp(1.0, 1.0, 1.0 - hsp + (1.0 - e) * hb(s) + gamma * e * (hsp - hb(p)), "R1+R2 with side information"),
            hp(1.0, 1.0, 1.0 - e - wz, "R1+R2 at the strong receiver"),
        ],
        vec![SideCondition::new("compression within feedback budget", r_fb1 - wz)],
        vec![],
    ))
}

/// Largest γ admitted by the receiver-1 budget in case 1.
pub fn bscbec_case1_gamma_max(p: f64, e: f64, s: f64, r_fb1: f64) -> f64 {
    r_fb1 / ((1.0 - e) * hb(p) + e * hb(conv(s, p)))
}

pub fn bscbec_case1_scheme(params: &BscBecParams) -> Result<(TwoAuxSpec, TestChannel)> {
    params.validate()?;
    let (s, g) = (params.s, params.gamma);
    let aux = TwoAuxSpec::from_ux(2, 2, vec![0.5 * (1.0 - s), 0.5 * s, 0.5 * s, 0.5 * (1.0 - s)])?;
    let test = TestChannel::GivenY { size: 3, law: vec![g, 0.0, 1.0 - g, 0.0, g, 1.0 - g] };
    Ok((aux, test))
}

/// Receiver-2 feedback region for H_b(p) < e < 1. Time-sharing variable
/// Q ~ Bern(α): Q = 0 sends a uniform cloud, Q = 1 a uniform satellite for
/// receiver 1 while receiver 2 reveals its output with probability γ.
pub fn bscbec_case2(params: &BscBecParams, r_fb2: f64) -> Result<RegionVerdict> {
    params.validate()?;
    check(!params.is_case1() && params.e > hb(params.p), || {
        format!("case 2 needs e > H_b(p), got e = {}", params.e)
    })?;
    let BscBecParams { p, e, alpha, gamma, .. } = *params;
    let r1 = alpha * (1.0 - hb(p)) + alpha * (1.0 - e) * gamma * hb(p);
    let r2 = (1.0 - alpha) * (1.0 - e);
    Ok(RegionVerdict::build(
        vec![
            hp(1.0, 0.0, r1, "satellite rate with side information"),
            hp(0.0, 1.0, r2, "cloud rate"),
            hp(1.0, 1.0, r1 + r2, "R1+R2 with side information"),
            hp(1.0, 1.0, 1.0 - hb(p) - alpha * gamma * hb(e), "R1+R2 at the strong receiver"),
        ],
        vec![SideCondition::new(
            "compression within feedback budget",
            r_fb2 - alpha * gamma * ((1.0 - e) * hb(p) + hb(e)),
        )],
        vec![],
    ))
}

/// Largest γ admitted by the receiver-2 budget in case 2.
pub fn bscbec_case2_gamma_max(p: f64, e: f64, alpha: f64, r_fb2: f64) -> f64 {
    r_fb2 / (alpha * ((1.0 - e) * hb(p) + hb(e)))
}

/// Scheme behind [`bscbec_case2`] in the three-auxiliary layout: U0 is the
/// cloud, U1 receiver 1's satellite, U2 constant. Ỹ2 has a fourth symbol for
/// "not revealed".
pub fn bscbec_case2_scheme(params: &BscBecParams) -> Result<SchemeSpec> {
    params.validate()?;
    let (alpha, g) = (params.alpha, params.gamma);
    // (q, u0, u1, u2) with u2 constant
    let aux_pmf = vec![0.5, 0.0, 0.5, 0.0, 0.5, 0.5, 0.0, 0.0];
    let symbol_map = vec![0, 0, 1, 1, 0, 1, 0, 1];
    let mut law = vec![0.0; 2 * 3 * 4];
    for y in 0..3 {
        law[y * 4 + 3] = 1.0;
        law[(3 + y) * 4 + y] = g;
        law[(3 + y) * 4 + 3] = 1.0 - g;
    }
    let scheme = SchemeSpec {
        q_pmf: vec![1.0 - alpha, alpha],
        u_sizes: [2, 2, 1],
        aux_pmf,
        symbol_map,
        test1: TestChannel::Absent,
        test2: TestChannel::GivenY { size: 4, law },
        update: None,
    };
    scheme.validate(&bscbec_channel(params.p, params.e)?)?;
    Ok(scheme)
}

/// Largest s in (0, 1/2] where the single-rate corners of [`bscbec_nofb`]
/// stop being dominant: the root of 1 − H_b(s∗p) + (1−e)H_b(s) = 1 − e.
/// When the left side stays below 1 − e on the open interval the root is 1/2.
pub fn bscbec_s0(p: f64, e: f64) -> Result<f64> {
    BscBecParams::check_channel(p, e)?;
    check(e < hb(p), || format!("s0 is defined for e < H_b(p), got e = {e}"))?;
    let f = |s: f64| 1.0 - hb(conv(s, p)) + (1.0 - e) * hb(s) - (1.0 - e);
    // near 1/2, f ≈ c·δ²·((1−2p)² − (1−e)); no sign change when that is ≤ 0
    if (1.0 - 2.0 * p).powi(2) <= 1.0 - e {
        return Ok(0.5);
    }
    let mut hi = 0.25;
    while f(hi) <= 0.0 {
        hi = 0.5 - (0.5 - hi) / 2.0;
        if 0.5 - hi < 1e-12 {
            return Ok(0.5);
        }
    }
    let mut lo = 0.0;
    while hi - lo > S0_TOL {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Dominant no-feedback boundary point for cloud noise `s`.
pub fn bscbec_boundary_point(p: f64, e: f64, s: f64) -> RatePoint {
    RatePoint::new(1.0 - hb(conv(s, p)), (1.0 - e) * hb(s))
}

// ---------------------------------------------------------------------------
// Gaussian broadcast channel

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianParams {
    pub power: f64,
    pub n1: f64,
    pub n2: f64,
    pub alpha: f64,
    pub beta: f64,
    pub r_fb1: f64,
}

impl GaussianParams {
    pub fn validate(&self) -> Result<()> {
        check(0.0 < self.n2 && self.n2 < self.n1 && self.n1 < self.power, || {
            format!("need 0 < N2 < N1 < P, got N2 = {}, N1 = {}, P = {}", self.n2, self.n1, self.power)
        })?;
        check(unit(self.alpha), || format!("alpha = {}", self.alpha))?;
        check(self.beta > 0.0, || format!("beta = {}", self.beta))?;
        check(self.r_fb1 >= 0.0, || format!("feedback rate {}", self.r_fb1))
    }

    /// I(Ỹ1; Y1 | Y2, U).
    pub fn compression_rate(&self) -> f64 {
        let Self { power, n1, n2, alpha, beta, .. } = *self;
        let ap = alpha * power;
        gaussian_c((ap * (n1 + n2) + n1 * n2) / (beta * (n2 + ap)))
    }
}

/// C(x) = ½ log2(1 + x).
pub fn gaussian_c(x: f64) -> f64 {
    0.5 * x.ln_1p() / std::f64::consts::LN_2
}

/// Feedback region for U ~ N(0, (1−α)P), X = U + N(0, αP), Ỹ1 = Y1 + N(0, β).
pub fn gaussian_region(params: &GaussianParams) -> Result<RegionVerdict> {
    params.validate()?;
    let GaussianParams { power, n1, n2, alpha, beta, r_fb1 } = *params;
    let ap = alpha * power;
    let cloud = gaussian_c((1.0 - alpha) * power / (ap + n1));
    let gain = gaussian_c(ap * n2 / ((ap + n2) * (n1 + beta)));
    let wz = params.compression_rate();
    Ok(RegionVerdict::build(
        vec![
            hp(1.0, 0.0, cloud, "cloud rate"),
            hp(1.0, 1.0, cloud + gaussian_c(ap / n2) + gain, "R1+R2 with side information"),
            hp(1.0, 1.0, gaussian_c(power / n2) - wz, "R1+R2 at the strong receiver"),
        ],
        vec![SideCondition::new("compression within feedback budget", r_fb1 - wz)],
        vec![],
    ))
}

/// No-feedback superposition region for power split α.
pub fn gaussian_nofb(power: f64, n1: f64, n2: f64, alpha: f64) -> Result<RateRegion> {
    check(0.0 < n2 && n2 < n1 && n1 < power, || "need 0 < N2 < N1 < P".to_string())?;
    check(unit(alpha), || format!("alpha = {alpha}"))?;
    let ap = alpha * power;
    Ok(RateRegion::new(vec![
        hp(1.0, 0.0, gaussian_c((1.0 - alpha) * power / (ap + n1)), "cloud rate"),
        hp(0.0, 1.0, gaussian_c(ap / n2), "satellite rate"),
    ]))
}

/// Largest no-feedback R2 at a given R1 (exact inverse of the cloud rate in α).
pub fn gaussian_nofb_r2_at(power: f64, n1: f64, n2: f64, r1: f64) -> f64 {
    let k = (2.0 * r1.max(0.0) * std::f64::consts::LN_2).exp_m1();
    let alpha = (power - k * n1) / (power * (1.0 + k));
    if alpha < 0.0 {
        return f64::NEG_INFINITY;
    }
    gaussian_c(alpha.min(1.0) * power / n2)
}

/// Smallest β meeting the feedback budget; `None` when no β > 0 does.
pub fn gaussian_beta_min(power: f64, n1: f64, n2: f64, alpha: f64, r_fb1: f64) -> Option<f64> {
    if r_fb1 <= 0.0 {
        return None;
    }
    let ap = alpha * power;
    // C(x) ≤ R  ⟺  x ≤ 2^{2R} − 1
    let x_max = (2.0 * r_fb1 * std::f64::consts::LN_2).exp_m1();
    Some((ap * (n1 + n2) + n1 * n2) / ((n2 + ap) * x_max))
}

// ---------------------------------------------------------------------------
// Blackwell channel with state

/// Output of receiver `i` for input x under state s, before appending s.
fn blackwell_out(x: usize, state: usize, receiver: usize) -> usize {
    match (state, receiver) {
        (0, 1) => usize::from(x != 0),
        (0, _) => usize::from(x == 1),
        (_, 1) => usize::from(x == 1),
        (_, _) => usize::from(x != 0),
    }
}

/// |X| = 3, Y_i = (Y*_i, S) encoded as 2·S + Y*_i, S ~ Bern(1/2) shared by
/// both receivers. S = 0 is the reversed Blackwell channel.
pub fn blackwell_channel() -> BroadcastChannel {
    let mut law = vec![0.0; 3 * 4 * 4];
    for x in 0..3 {
        for s in 0..2 {
            let y1 = 2 * s + blackwell_out(x, s, 1);
            let y2 = 2 * s + blackwell_out(x, s, 2);
            law[(x * 4 + y1) * 4 + y2] += 0.5;
        }
    }
    BroadcastChannel::new(3, 4, 4, law).expect("static law")
}

/// Largest no-feedback sum rate (achieved by time-sharing).
pub fn blackwell_nofb_sum() -> f64 {
    1.0
}

/// Coded time-sharing choice: Q ∈ {0, 1, 2} with P = (1−2p, p, p), X = U_Q
/// with independent ternary U's. Each receiver reveals its output in the slot
/// carrying the other receiver's satellite.
pub fn blackwell_time_sharing(p: f64, pu: [[f64; 3]; 3]) -> Result<SchemeSpec> {
    check((0.0..=0.5).contains(&p), || format!("p = {p} outside [0, 1/2]"))?;
    let mut aux = Vec::with_capacity(27);
    let mut map = Vec::with_capacity(27);
    for u0 in 0..3 {
        for u1 in 0..3 {
            for u2 in 0..3 {
                aux.push(pu[0][u0] * pu[1][u1] * pu[2][u2]);
                map.push([u0, u1, u2]);
            }
        }
    }
    let scheme = SchemeSpec {
        q_pmf: vec![1.0 - 2.0 * p, p, p],
        u_sizes: [3, 3, 3],
        aux_pmf: [aux.clone(), aux.clone(), aux].concat(),
        symbol_map: (0..3).flat_map(|q| map.iter().map(move |u| u[q])).collect(),
        test1: TestChannel::per_slot(3, 4, |q| q == 2),
        test2: TestChannel::per_slot(3, 4, |q| q == 1),
        update: None,
    };
    scheme.validate(&blackwell_channel())?;
    Ok(scheme)
}

/// Randomized superposition choice: Q uniform on two slots, X = U_{Q+1},
/// U1 and U2 conditionally independent given U0. Each receiver reveals its
/// output in the other receiver's slot. `p_u0` has any length; `p_u1`, `p_u2`
/// are rows P(·|u0) over X.
pub fn blackwell_superposition(p_u0: &[f64], p_u1: &[[f64; 3]], p_u2: &[[f64; 3]]) -> Result<SchemeSpec> {
    let k = p_u0.len();
    check(k > 0 && p_u1.len() == k && p_u2.len() == k, || "conditional rows must match P(u0)".into())?;
    let mut aux = Vec::with_capacity(9 * k);
    let mut map = Vec::with_capacity(18 * k);
    for u0 in 0..k {
        for u1 in 0..3 {
            for u2 in 0..3 {
                aux.push(p_u0[u0] * p_u1[u0][u1] * p_u2[u0][u2]);
            }
        }
    }
    for q in 0..2 {
        for _ in 0..k {
            for u1 in 0..3 {
                for u2 in 0..3 {
                    map.push(if q == 0 { u1 } else { u2 });
                }
            }
        }
    }
    let scheme = SchemeSpec {
        q_pmf: vec![0.5, 0.5],
        u_sizes: [k, 3, 3],
        aux_pmf: [aux.clone(), aux].concat(),
        symbol_map: map,
        test1: TestChannel::per_slot(2, 4, |q| q == 1),
        test2: TestChannel::per_slot(2, 4, |q| q == 0),
        update: None,
    };
    scheme.validate(&blackwell_channel())?;
    Ok(scheme)
}
