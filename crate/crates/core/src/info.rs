//! Finite-alphabet distributions, joint assembly and information measures.
//!
//! All logarithms are base 2. Joints are dense row-major tensors with the
//! last variable varying fastest; entropy sums iterate over the support only.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default cap on the number of dense entries in a joint.
pub const DEFAULT_ENTRY_CAP: usize = 1 << 22;

/// Tolerance on input pmf normalization.
pub const PMF_TOL: f64 = 1e-12;

/// Slack allowed on assembled joints.
pub const JOINT_TOL: f64 = 1e-11;

/// Negative mutual information down to this value is treated as rounding noise.
pub const NEG_MI_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InfoError {
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("invalid pmf: {0}")]
    InvalidPmf(String),
    #[error("structural error: {0}")]
    Structural(String),
    #[error("joint would have {entries} entries, cap is {cap}")]
    TooLarge { entries: usize, cap: usize },
    #[error("mutual information {0} is negative beyond rounding tolerance")]
    Negative(f64),
}

pub type Result<T> = std::result::Result<T, InfoError>;

/// H_b(p) in bits.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(InfoError::Domain(format!("binary_entropy({p})")));
    }
    Ok(hb(p))
}

/// a*b = (1-a)b + a(1-b).
pub fn binary_convolve(a: f64, b: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) {
        return Err(InfoError::Domain(format!("binary_convolve({a}, {b})")));
    }
    Ok(conv(a, b))
}

/// Unchecked binary entropy; callers guarantee p in [0, 1].
pub(crate) fn hb(p: f64) -> f64 {
    plog(p) + plog(1.0 - p)
}

pub(crate) fn conv(a: f64, b: f64) -> f64 {
    (1.0 - a) * b + a * (1.0 - b)
}

#[inline]
fn plog(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

/// Shannon entropy of a probability vector.
pub fn entropy(probs: &[f64]) -> f64 {
    probs.iter().map(|&p| plog(p)).sum()
}

fn check_simplex(probs: &[f64], what: &str) -> Result<()> {
    if probs.is_empty() {
        return Err(InfoError::InvalidPmf(format!("{what}: empty")));
    }
    if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
        return Err(InfoError::InvalidPmf(format!("{what}: entry {p}")));
    }
    let s: f64 = probs.iter().sum();
    if (s - 1.0).abs() > PMF_TOL {
        return Err(InfoError::InvalidPmf(format!("{what}: sums to {s}")));
    }
    Ok(())
}

fn check_slices(probs: &[f64], slice: usize, what: &str) -> Result<()> {
    if slice == 0 || !probs.len().is_multiple_of(slice) {
        return Err(InfoError::Structural(format!(
            "{what}: length {} is not a multiple of {slice}",
            probs.len()
        )));
    }
    for (i, chunk) in probs.chunks(slice).enumerate() {
        check_simplex(chunk, &format!("{what}[{i}]"))?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Pmf {
    probs: Vec<f64>,
}

impl Pmf {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        check_simplex(&probs, "pmf")?;
        Ok(Self { probs })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(InfoError::InvalidPmf("uniform over empty alphabet".into()));
        }
        Ok(Self { probs: vec![1.0 / n as f64; n] })
    }

    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(InfoError::Domain(format!("bernoulli({p})")));
        }
        Ok(Self { probs: vec![1.0 - p, p] })
    }

    pub fn alphabet_size(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn entropy(&self) -> f64 {
        entropy(&self.probs)
    }
}

impl TryFrom<Vec<f64>> for Pmf {
    type Error = InfoError;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Pmf::new(v)
    }
}

impl From<Pmf> for Vec<f64> {
    fn from(p: Pmf) -> Self {
        p.probs
    }
}

/// P(y1, y2 | x), row-major over (x, y1, y2).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChannelRepr", into = "ChannelRepr")]
pub struct BroadcastChannel {
    x_size: usize,
    y1_size: usize,
    y2_size: usize,
    law: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelRepr {
    x_size: usize,
    y1_size: usize,
    y2_size: usize,
    law: Vec<f64>,
}

impl TryFrom<ChannelRepr> for BroadcastChannel {
    type Error = InfoError;
    fn try_from(r: ChannelRepr) -> Result<Self> {
        BroadcastChannel::new(r.x_size, r.y1_size, r.y2_size, r.law)
    }
}

impl From<BroadcastChannel> for ChannelRepr {
    fn from(c: BroadcastChannel) -> Self {
        ChannelRepr { x_size: c.x_size, y1_size: c.y1_size, y2_size: c.y2_size, law: c.law }
    }
}

impl BroadcastChannel {
    pub fn new(x_size: usize, y1_size: usize, y2_size: usize, law: Vec<f64>) -> Result<Self> {
        if x_size == 0 || y1_size == 0 || y2_size == 0 {
            return Err(InfoError::Structural("channel alphabets must be nonempty".into()));
        }
        if law.len() != x_size * y1_size * y2_size {
            return Err(InfoError::Structural(format!(
                "channel law has {} entries, expected {}",
                law.len(),
                x_size * y1_size * y2_size
            )));
        }
        check_slices(&law, y1_size * y2_size, "channel law")?;
        Ok(Self { x_size, y1_size, y2_size, law })
    }

    /// Channel whose outputs are conditionally independent given the input.
    /// `w1` is row-major P(y1|x), `w2` is P(y2|x).
    pub fn from_marginals(x_size: usize, w1: &[f64], w2: &[f64]) -> Result<Self> {
        if x_size == 0 || !w1.len().is_multiple_of(x_size) || !w2.len().is_multiple_of(x_size) {
            return Err(InfoError::Structural("marginal laws do not match x_size".into()));
        }
        let (n1, n2) = (w1.len() / x_size, w2.len() / x_size);
        check_slices(w1, n1, "P(y1|x)")?;
        check_slices(w2, n2, "P(y2|x)")?;
        let mut law = Vec::with_capacity(x_size * n1 * n2);
        for x in 0..x_size {
            for y1 in 0..n1 {
                for y2 in 0..n2 {
                    law.push(w1[x * n1 + y1] * w2[x * n2 + y2]);
                }
            }
        }
        Self::new(x_size, n1, n2, law)
    }

    pub fn x_size(&self) -> usize {
        self.x_size
    }

    pub fn y1_size(&self) -> usize {
        self.y1_size
    }

    pub fn y2_size(&self) -> usize {
        self.y2_size
    }

    pub fn law(&self) -> &[f64] {
        &self.law
    }

    #[inline]
    pub fn prob(&self, x: usize, y1: usize, y2: usize) -> f64 {
        self.law[(x * self.y1_size + y1) * self.y2_size + y2]
    }

    /// The same channel with the receivers exchanged.
    pub fn swapped(&self) -> Self {
        let mut law = Vec::with_capacity(self.law.len());
        for x in 0..self.x_size {
            for y2 in 0..self.y2_size {
                for y1 in 0..self.y1_size {
                    law.push(self.prob(x, y1, y2));
                }
            }
        }
        Self { x_size: self.x_size, y1_size: self.y2_size, y2_size: self.y1_size, law }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeedbackBudget {
    pub r_fb1: f64,
    pub r_fb2: f64,
}

impl FeedbackBudget {
    pub fn new(r_fb1: f64, r_fb2: f64) -> Result<Self> {
        if !(r_fb1 >= 0.0 && r_fb2 >= 0.0) {
            return Err(InfoError::Domain(format!("feedback rates ({r_fb1}, {r_fb2})")));
        }
        Ok(Self { r_fb1, r_fb2 })
    }

    pub fn none() -> Self {
        Self { r_fb1: 0.0, r_fb2: 0.0 }
    }

    pub fn swapped(self) -> Self {
        Self { r_fb1: self.r_fb2, r_fb2: self.r_fb1 }
    }
}

/// Named random variables that can appear in a joint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Var {
    Q,
    U0,
    U1,
    U2,
    U,
    V,
    X,
    Y1,
    Y2,
    Yt1,
    Yt2,
}

impl Var {
    pub const ALL: [Var; 11] = [
        Var::Q,
        Var::U0,
        Var::U1,
        Var::U2,
        Var::U,
        Var::V,
        Var::X,
        Var::Y1,
        Var::Y2,
        Var::Yt1,
        Var::Yt2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Var::Q => "Q",
            Var::U0 => "U0",
            Var::U1 => "U1",
            Var::U2 => "U2",
            Var::U => "U",
            Var::V => "V",
            Var::X => "X",
            Var::Y1 => "Y1",
            Var::Y2 => "Y2",
            Var::Yt1 => "Yt1",
            Var::Yt2 => "Yt2",
        }
    }

    /// Exchange receiver indices.
    pub fn mirrored(self) -> Var {
        match self {
            Var::U1 => Var::U2,
            Var::U2 => Var::U1,
            Var::Y1 => Var::Y2,
            Var::Y2 => Var::Y1,
            Var::Yt1 => Var::Yt2,
            Var::Yt2 => Var::Yt1,
            v => v,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Var {
    type Err = InfoError;
    fn from_str(s: &str) -> Result<Self> {
        Var::ALL
            .iter()
            .copied()
            .find(|v| v.name() == s.trim())
            .ok_or_else(|| InfoError::Structural(format!("unknown variable {s:?}")))
    }
}

/// A joint pmf over named variables.
#[derive(Debug, Clone)]
pub struct JointPmf {
    vars: Vec<Var>,
    sizes: Vec<usize>,
    probs: Vec<f64>,
    // support in coordinates: nnz rows of `vars.len()` digits
    digits: Vec<u16>,
    weights: Vec<f64>,
}

impl JointPmf {
    pub fn new(vars: Vec<(Var, usize)>, probs: Vec<f64>) -> Result<Self> {
        Self::with_cap(vars, probs, DEFAULT_ENTRY_CAP)
    }

    pub fn with_cap(vars: Vec<(Var, usize)>, probs: Vec<f64>, cap: usize) -> Result<Self> {
        let (names, sizes): (Vec<Var>, Vec<usize>) = vars.into_iter().unzip();
        let total = checked_entries(&sizes, cap)?;
        for (i, v) in names.iter().enumerate() {
            if names[..i].contains(v) {
                return Err(InfoError::Structural(format!("variable {v} declared twice")));
            }
        }
        if probs.len() != total {
            return Err(InfoError::Structural(format!(
                "joint has {} entries, variables imply {total}",
                probs.len()
            )));
        }
        if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(InfoError::InvalidPmf(format!("joint entry {p}")));
        }
        let s: f64 = probs.iter().sum();
        if (s - 1.0).abs() > JOINT_TOL {
            return Err(InfoError::InvalidPmf(format!("joint sums to {s}")));
        }
        if sizes.iter().any(|&n| n > u16::MAX as usize) {
            return Err(InfoError::Structural("alphabet larger than 65535".into()));
        }
        let mut digits = Vec::new();
        let mut weights = Vec::new();
        let mut idx = vec![0usize; sizes.len()];
        for &p in &probs {
            if p > 0.0 {
                digits.extend(idx.iter().map(|&d| d as u16));
                weights.push(p);
            }
            for k in (0..sizes.len()).rev() {
                idx[k] += 1;
                if idx[k] < sizes[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        Ok(Self { vars: names, sizes, probs, digits, weights })
    }

    pub fn variables(&self) -> impl Iterator<Item = (Var, usize)> + '_ {
        self.vars.iter().copied().zip(self.sizes.iter().copied())
    }

    pub fn has(&self, v: Var) -> bool {
        self.vars.contains(&v)
    }

    pub fn size_of(&self, v: Var) -> Option<usize> {
        self.position(v).map(|i| self.sizes[i])
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    fn position(&self, v: Var) -> Option<usize> {
        self.vars.iter().position(|&w| w == v)
    }

    fn positions(&self, vs: &[Var]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(vs.len());
        for &v in vs {
            let i = self
                .position(v)
                .ok_or_else(|| InfoError::Structural(format!("variable {v} not in joint")))?;
            if !out.contains(&i) {
                out.push(i);
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    fn marginal_dense(&self, pos: &[usize]) -> Vec<f64> {
        let n = self.vars.len();
        let mut strides = vec![0usize; pos.len()];
        let mut size = 1usize;
        for (k, &i) in pos.iter().enumerate().rev() {
            strides[k] = size;
            size *= self.sizes[i];
        }
        let mut out = vec![0.0; size];
        for (row, &w) in self.weights.iter().enumerate() {
            let d = &self.digits[row * n..(row + 1) * n];
            let mut j = 0usize;
            for (k, &i) in pos.iter().enumerate() {
                j += d[i] as usize * strides[k];
            }
            out[j] += w;
        }
        out
    }

    /// Joint entropy H(vs). The empty set has entropy 0.
    pub fn entropy_of(&self, vs: &[Var]) -> Result<f64> {
        let pos = self.positions(vs)?;
        if pos.is_empty() {
            return Ok(0.0);
        }
        Ok(entropy(&self.marginal_dense(&pos)))
    }

    /// Marginal over `vs`, kept in the joint's own variable order.
    pub fn marginal(&self, vs: &[Var]) -> Result<JointPmf> {
        let pos = self.positions(vs)?;
        let probs = self.marginal_dense(&pos);
        let vars = pos.iter().map(|&i| (self.vars[i], self.sizes[i])).collect();
        JointPmf::new(vars, probs)
    }

    /// I(left; right | given).
    pub fn mutual_info(&self, left: &[Var], right: &[Var], given: &[Var]) -> Result<f64> {
        disjoint(left, right, given)?;
        if left.is_empty() || right.is_empty() {
            self.positions(left)?;
            self.positions(right)?;
            self.positions(given)?;
            return Ok(0.0);
        }
        let lg: Vec<Var> = left.iter().chain(given).copied().collect();
        let rg: Vec<Var> = right.iter().chain(given).copied().collect();
        let all: Vec<Var> = left.iter().chain(right).chain(given).copied().collect();
        let v = self.entropy_of(&lg)? + self.entropy_of(&rg)?
            - self.entropy_of(&all)?
            - self.entropy_of(given)?;
        clamp_mi(v)
    }

    /// Replace `a` by the pair (a, b) and make `b` constant.
    pub fn merge_into(&self, a: Var, b: Var) -> Result<JointPmf> {
        let ia = self.position(a).ok_or_else(|| InfoError::Structural(format!("{a} missing")))?;
        let ib = self.position(b).ok_or_else(|| InfoError::Structural(format!("{b} missing")))?;
        if ia == ib {
            return Err(InfoError::Structural("cannot merge a variable with itself".into()));
        }
        let mut sizes = self.sizes.clone();
        sizes[ia] = self.sizes[ia] * self.sizes[ib];
        sizes[ib] = 1;
        let total = checked_entries(&sizes, DEFAULT_ENTRY_CAP)?;
        let n = self.vars.len();
        let mut probs = vec![0.0; total];
        for (row, &w) in self.weights.iter().enumerate() {
            let d = &self.digits[row * n..(row + 1) * n];
            let mut j = 0usize;
            for k in 0..n {
                let digit = if k == ia {
                    d[ia] as usize * self.sizes[ib] + d[ib] as usize
                } else if k == ib {
                    0
                } else {
                    d[k] as usize
                };
                j = j * sizes[k] + digit;
            }
            probs[j] += w;
        }
        JointPmf::new(self.vars.iter().copied().zip(sizes).collect(), probs)
    }
}

fn checked_entries(sizes: &[usize], cap: usize) -> Result<usize> {
    let mut total = 1usize;
    for &s in sizes {
        if s == 0 {
            return Err(InfoError::Structural("zero-size alphabet".into()));
        }
        total = total.saturating_mul(s);
    }
    if total > cap {
        return Err(InfoError::TooLarge { entries: total, cap });
    }
    Ok(total)
}

fn disjoint(a: &[Var], b: &[Var], c: &[Var]) -> Result<()> {
    for v in a {
        if b.contains(v) || c.contains(v) {
            return Err(InfoError::Structural(format!("variable {v} appears in two argument sets")));
        }
    }
    for v in b {
        if c.contains(v) {
            return Err(InfoError::Structural(format!("variable {v} appears in two argument sets")));
        }
    }
    Ok(())
}

pub(crate) fn clamp_mi(v: f64) -> Result<f64> {
    if v >= 0.0 {
        Ok(v)
    } else if v >= -NEG_MI_TOL {
        Ok(0.0)
    } else if v >= -1e-9 {
        // accumulated rounding on larger supports
        Ok(0.0)
    } else {
        Err(InfoError::Negative(v))
    }
}

/// Free-standing form of [`JointPmf::mutual_info`].
pub fn mutual_info(joint: &JointPmf, left: &[Var], right: &[Var], given: &[Var]) -> Result<f64> {
    joint.mutual_info(left, right, given)
}

/// How a compression test channel is conditioned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TestChannel {
    /// Ỹ is constant.
    Absent,
    /// P(ỹ | y, q), row-major over (q, y, ỹ).
    GivenY { size: usize, law: Vec<f64> },
    /// P(ỹ | y, u0, q), row-major over (q, u0, y, ỹ).
    GivenYU0 { size: usize, law: Vec<f64> },
}

impl TestChannel {
    pub fn out_size(&self) -> usize {
        match self {
            TestChannel::Absent => 1,
            TestChannel::GivenY { size, .. } | TestChannel::GivenYU0 { size, .. } => *size,
        }
    }

    pub fn depends_on_u0(&self) -> bool {
        matches!(self, TestChannel::GivenYU0 { .. })
    }

    /// Ỹ = Y in every time-sharing slot.
    pub fn identity(q_size: usize, y_size: usize) -> Self {
        Self::per_slot(q_size, y_size, |_| true)
    }

    /// Ỹ = Y where `reveal(q)`, constant symbol 0 elsewhere.
    pub fn per_slot(q_size: usize, y_size: usize, reveal: impl Fn(usize) -> bool) -> Self {
        let mut law = vec![0.0; q_size * y_size * y_size];
        for q in 0..q_size {
            for y in 0..y_size {
                let t = if reveal(q) { y } else { 0 };
                law[(q * y_size + y) * y_size + t] = 1.0;
            }
        }
        TestChannel::GivenY { size: y_size, law }
    }

    fn validate(&self, q: usize, u0: usize, y: usize, which: &str) -> Result<()> {
        match self {
            TestChannel::Absent => Ok(()),
            TestChannel::GivenY { size, law } => {
                if law.len() != q * y * size {
                    return Err(InfoError::Structural(format!(
                        "{which}: law has {} entries, expected {}",
                        law.len(),
                        q * y * size
                    )));
                }
                check_slices(law, *size, which)
            }
            TestChannel::GivenYU0 { size, law } => {
                if law.len() != q * u0 * y * size {
                    return Err(InfoError::Structural(format!(
                        "{which}: law has {} entries, expected {}",
                        law.len(),
                        q * u0 * y * size
                    )));
                }
                check_slices(law, *size, which)
            }
        }
    }

    #[inline]
    fn prob(&self, q: usize, u0: usize, u0_size: usize, y: usize, y_size: usize, t: usize) -> f64 {
        match self {
            TestChannel::Absent => 1.0,
            TestChannel::GivenY { size, law } => law[(q * y_size + y) * size + t],
            TestChannel::GivenYU0 { size, law } => {
                law[((q * u0_size + u0) * y_size + y) * size + t]
            }
        }
    }
}

/// P(v | u0, u1, u2, ỹ1, ỹ2), row-major in that order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UpdateChannel {
    pub size: usize,
    pub law: Vec<f64>,
}

/// An auxiliary coding choice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeSpec {
    pub q_pmf: Vec<f64>,
    /// Alphabet sizes of U0, U1, U2.
    pub u_sizes: [usize; 3],
    /// P(u0, u1, u2 | q), row-major over (q, u0, u1, u2).
    pub aux_pmf: Vec<f64>,
    /// x = f(q, u0, u1, u2), same layout as `aux_pmf`.
    pub symbol_map: Vec<usize>,
    #[serde(default = "absent")]
    pub test1: TestChannel,
    #[serde(default = "absent")]
    pub test2: TestChannel,
    #[serde(default)]
    pub update: Option<UpdateChannel>,
}

fn absent() -> TestChannel {
    TestChannel::Absent
}

impl SchemeSpec {
    pub fn q_size(&self) -> usize {
        self.q_pmf.len()
    }

    /// Check internal consistency and compatibility with `channel`.
    pub fn validate(&self, channel: &BroadcastChannel) -> Result<()> {
        check_simplex(&self.q_pmf, "q_pmf")?;
        let [a, b, c] = self.u_sizes;
        if a == 0 || b == 0 || c == 0 {
            return Err(InfoError::Structural("auxiliary alphabets must be nonempty".into()));
        }
        let cells = self.q_size() * a * b * c;
        if self.aux_pmf.len() != cells {
            return Err(InfoError::Structural(format!(
                "aux_pmf has {} entries, expected {cells}",
                self.aux_pmf.len()
            )));
        }
        check_slices(&self.aux_pmf, a * b * c, "aux_pmf")?;
        if self.symbol_map.len() != cells {
            return Err(InfoError::Structural(format!(
                "symbol_map has {} entries, expected {cells}",
                self.symbol_map.len()
            )));
        }
        if let Some(x) = self.symbol_map.iter().find(|&&x| x >= channel.x_size()) {
            return Err(InfoError::Structural(format!(
                "symbol_map emits {x}, channel input alphabet has {}",
                channel.x_size()
            )));
        }
        self.test1.validate(self.q_size(), a, channel.y1_size(), "test1")?;
        self.test2.validate(self.q_size(), a, channel.y2_size(), "test2")?;
        if let Some(up) = &self.update {
            let rows = a * b * c * self.test1.out_size() * self.test2.out_size();
            if up.size == 0 || up.law.len() != rows * up.size {
                return Err(InfoError::Structural(format!(
                    "update law has {} entries, expected {}",
                    up.law.len(),
                    rows * up.size
                )));
            }
            check_slices(&up.law, up.size, "update")?;
        }
        Ok(())
    }

    /// Superposition layout: U0 = U, U1 constant, U2 = X.
    /// `p_ux` is row-major P(u, x); `test1` acts on receiver 1.
    pub fn cloud_and_satellite(
        u_size: usize,
        x_size: usize,
        p_ux: &[f64],
        test1: TestChannel,
    ) -> Result<Self> {
        if p_ux.len() != u_size * x_size {
            return Err(InfoError::Structural("P(u,x) has wrong length".into()));
        }
        check_simplex(p_ux, "P(u,x)")?;
        let mut symbol_map = Vec::with_capacity(u_size * x_size);
        for _ in 0..u_size {
            symbol_map.extend(0..x_size);
        }
        Ok(Self {
            q_pmf: vec![1.0],
            u_sizes: [u_size, 1, x_size],
            aux_pmf: p_ux.to_vec(),
            symbol_map,
            test1,
            test2: TestChannel::Absent,
            update: None,
        })
    }

    /// Exchange receiver roles (U1 with U2, test1 with test2).
    pub fn swapped(&self) -> Self {
        let q = self.q_size();
        let [a, b, c] = self.u_sizes;
        let mut aux = vec![0.0; self.aux_pmf.len()];
        let mut map = vec![0; self.symbol_map.len()];
        for qi in 0..q {
            for u0 in 0..a {
                for u1 in 0..b {
                    for u2 in 0..c {
                        let src = ((qi * a + u0) * b + u1) * c + u2;
                        let dst = ((qi * a + u0) * c + u2) * b + u1;
                        aux[dst] = self.aux_pmf[src];
                        map[dst] = self.symbol_map[src];
                    }
                }
            }
        }
        let update = self.update.as_ref().map(|up| {
            let (t1, t2) = (self.test1.out_size(), self.test2.out_size());
            let mut law = vec![0.0; up.law.len()];
            for u0 in 0..a {
                for u1 in 0..b {
                    for u2 in 0..c {
                        for y1 in 0..t1 {
                            for y2 in 0..t2 {
                                for v in 0..up.size {
                                    let src = ((((u0 * b + u1) * c + u2) * t1 + y1) * t2 + y2)
                                        * up.size
                                        + v;
                                    let dst = ((((u0 * c + u2) * b + u1) * t2 + y2) * t1 + y1)
                                        * up.size
                                        + v;
                                    law[dst] = up.law[src];
                                }
                            }
                        }
                    }
                }
            }
            UpdateChannel { size: up.size, law }
        });
        Self {
            q_pmf: self.q_pmf.clone(),
            u_sizes: [a, c, b],
            aux_pmf: aux,
            symbol_map: map,
            test1: self.test2.clone(),
            test2: self.test1.clone(),
            update,
        }
    }
}

/// Joint over (Q, U0, U1, U2, X, Y1, Y2, Yt1, Yt2[, V]).
pub fn assemble_joint(scheme: &SchemeSpec, channel: &BroadcastChannel) -> Result<JointPmf> {
    assemble_joint_with_cap(scheme, channel, DEFAULT_ENTRY_CAP)
}

pub fn assemble_joint_with_cap(
    scheme: &SchemeSpec,
    channel: &BroadcastChannel,
    cap: usize,
) -> Result<JointPmf> {
    scheme.validate(channel)?;
    let qn = scheme.q_size();
    let [n0, n1, n2] = scheme.u_sizes;
    let (nx, ny1, ny2) = (channel.x_size(), channel.y1_size(), channel.y2_size());
    let (nt1, nt2) = (scheme.test1.out_size(), scheme.test2.out_size());
    let nv = scheme.update.as_ref().map(|u| u.size);
    let mut vars = vec![
        (Var::Q, qn),
        (Var::U0, n0),
        (Var::U1, n1),
        (Var::U2, n2),
        (Var::X, nx),
        (Var::Y1, ny1),
        (Var::Y2, ny2),
        (Var::Yt1, nt1),
        (Var::Yt2, nt2),
    ];
    if let Some(n) = nv {
        vars.push((Var::V, n));
    }
    let sizes: Vec<usize> = vars.iter().map(|v| v.1).collect();
    let total = checked_entries(&sizes, cap)?;
    let nvv = nv.unwrap_or(1);
    let mut probs = vec![0.0; total];
    for q in 0..qn {
        let pq = scheme.q_pmf[q];
        if pq == 0.0 {
            continue;
        }
        for u0 in 0..n0 {
            for u1 in 0..n1 {
                for u2 in 0..n2 {
                    let cell = ((q * n0 + u0) * n1 + u1) * n2 + u2;
                    let pu = pq * scheme.aux_pmf[cell];
                    if pu == 0.0 {
                        continue;
                    }
                    let x = scheme.symbol_map[cell];
                    for y1 in 0..ny1 {
                        for y2 in 0..ny2 {
                            let py = pu * channel.prob(x, y1, y2);
                            if py == 0.0 {
                                continue;
                            }
                            for t1 in 0..nt1 {
                                let p1 = py * scheme.test1.prob(q, u0, n0, y1, ny1, t1);
                                if p1 == 0.0 {
                                    continue;
                                }
                                for t2 in 0..nt2 {
                                    let p2 = p1 * scheme.test2.prob(q, u0, n0, y2, ny2, t2);
                                    if p2 == 0.0 {
                                        continue;
                                    }
                                    let base = ((((((((q * n0 + u0) * n1 + u1) * n2 + u2) * nx
                                        + x)
                                        * ny1
                                        + y1)
                                        * ny2
                                        + y2)
                                        * nt1
                                        + t1)
                                        * nt2
                                        + t2)
                                        * nvv;
                                    match &scheme.update {
                                        None => probs[base] += p2,
                                        Some(up) => {
                                            let row = (((u0 * n1 + u1) * n2 + u2) * nt1 + t1)
                                                * nt2
                                                + t2;
                                            for v in 0..up.size {
                                                probs[base + v] += p2 * up.law[row * up.size + v];
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    JointPmf::with_cap(vars, probs, cap)
}

/// A two-auxiliary input distribution P(u, v, x), row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoAuxSpec {
    pub u_size: usize,
    pub v_size: usize,
    pub x_size: usize,
    pub pmf: Vec<f64>,
}

impl TwoAuxSpec {
    pub fn new(u_size: usize, v_size: usize, x_size: usize, pmf: Vec<f64>) -> Result<Self> {
        if pmf.len() != u_size * v_size * x_size {
            return Err(InfoError::Structural("P(u,v,x) has wrong length".into()));
        }
        check_simplex(&pmf, "P(u,v,x)")?;
        Ok(Self { u_size, v_size, x_size, pmf })
    }

    /// Degenerate form P(u, x) with V constant.
    pub fn from_ux(u_size: usize, x_size: usize, pmf: Vec<f64>) -> Result<Self> {
        Self::new(u_size, 1, x_size, pmf)
    }

    /// Joint over (U, V, X, Y1, Y2).
    pub fn assemble(&self, channel: &BroadcastChannel) -> Result<JointPmf> {
        if self.x_size != channel.x_size() {
            return Err(InfoError::Structural(format!(
                "input alphabet {} does not match channel {}",
                self.x_size,
                channel.x_size()
            )));
        }
        let (n1, n2) = (channel.y1_size(), channel.y2_size());
        let mut probs = Vec::with_capacity(self.pmf.len() * n1 * n2);
        for (i, &p) in self.pmf.iter().enumerate() {
            let x = i % self.x_size;
            for y1 in 0..n1 {
                for y2 in 0..n2 {
                    probs.push(p * channel.prob(x, y1, y2));
                }
            }
        }
        JointPmf::new(
            vec![
                (Var::U, self.u_size),
                (Var::V, self.v_size),
                (Var::X, self.x_size),
                (Var::Y1, n1),
                (Var::Y2, n2),
            ],
            probs,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bsc(p: f64) -> Vec<f64> {
        vec![1.0 - p, p, p, 1.0 - p]
    }

    #[test]
    fn binary_entropy_values() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.5).unwrap() - 1.0).abs() < 1e-15);
        // frozen from an independent natural-log evaluation
        assert!((binary_entropy(0.1).unwrap() - 0.468_995_593_589_281_2).abs() < 1e-15);
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(1.5).is_err());
        assert!(binary_entropy(f64::NAN).is_err());
    }

    #[test]
    fn binary_convolve_values() {
        assert!((binary_convolve(0.0, 0.3).unwrap() - 0.3).abs() < 1e-15);
        assert!((binary_convolve(0.5, 0.77).unwrap() - 0.5).abs() < 1e-15);
        assert!((binary_convolve(0.1, 0.2).unwrap() - 0.26).abs() < 1e-15);
        assert!(binary_convolve(0.1, 2.0).is_err());
    }

    #[test]
    fn pmf_validation() {
        assert!(Pmf::new(vec![0.5, 0.5]).is_ok());
        assert!(Pmf::new(vec![0.5, 0.6]).is_err());
        assert!(Pmf::new(vec![-0.1, 1.1]).is_err());
        assert!(Pmf::new(vec![]).is_err());
    }

    #[test]
    fn channel_validation_and_json() {
        let ch = BroadcastChannel::from_marginals(2, &bsc(0.1), &bsc(0.2)).unwrap();
        let s = serde_json::to_string(&ch).unwrap();
        let back: BroadcastChannel = serde_json::from_str(&s).unwrap();
        assert_eq!(ch, back);
        let bad = r#"{"x_size":1,"y1_size":1,"y2_size":2,"law":[0.3,0.3]}"#;
        assert!(serde_json::from_str::<BroadcastChannel>(bad).is_err());
        assert!(BroadcastChannel::new(2, 2, 2, vec![0.25; 4]).is_err());
    }

    #[test]
    fn bsc_mutual_information() {
        let ch = BroadcastChannel::from_marginals(2, &bsc(0.1), &bsc(0.1)).unwrap();
        let aux = TwoAuxSpec::from_ux(1, 2, vec![0.5, 0.5]).unwrap();
        let j = aux.assemble(&ch).unwrap();
        let i = j.mutual_info(&[Var::X], &[Var::Y1], &[]).unwrap();
        // 1 - H_b(0.1) from a four-entry enumeration
        assert!((i - 0.531_004_406_410_718_8).abs() < 1e-12);
    }

    #[test]
    fn identity_and_independence() {
        let j = JointPmf::new(vec![(Var::X, 2), (Var::Y1, 2)], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!((j.mutual_info(&[Var::X], &[Var::Y1], &[]).unwrap() - 1.0).abs() < 1e-15);
        let k = JointPmf::new(vec![(Var::X, 2), (Var::Y1, 2)], vec![0.12, 0.28, 0.18, 0.42])
            .unwrap();
        assert!(k.mutual_info(&[Var::X], &[Var::Y1], &[]).unwrap() < 1e-12);
    }

    #[test]
    fn structural_errors() {
        let j = JointPmf::new(vec![(Var::X, 2)], vec![0.5, 0.5]).unwrap();
        assert!(matches!(
            j.mutual_info(&[Var::X], &[Var::Y1], &[]),
            Err(InfoError::Structural(_))
        ));
        assert!(matches!(
            j.mutual_info(&[Var::X], &[Var::X], &[]),
            Err(InfoError::Structural(_))
        ));
        let big = JointPmf::with_cap(vec![(Var::X, 4), (Var::Y1, 4)], vec![1.0 / 16.0; 16], 8);
        assert!(matches!(big, Err(InfoError::TooLarge { .. })));
    }

    #[test]
    fn var_names_round_trip() {
        for v in Var::ALL {
            assert_eq!(v.name().parse::<Var>().unwrap(), v);
            assert_eq!(v.mirrored().mirrored(), v);
        }
    }

    #[test]
    fn scheme_assembly_marginal_is_bsc() {
        let ch = BroadcastChannel::from_marginals(2, &bsc(0.3), &bsc(0.1)).unwrap();
        let scheme = SchemeSpec {
            q_pmf: vec![1.0],
            u_sizes: [2, 1, 1],
            aux_pmf: vec![0.5, 0.5],
            symbol_map: vec![0, 1],
            test1: TestChannel::Absent,
            test2: TestChannel::Absent,
            update: None,
        };
        let j = assemble_joint(&scheme, &ch).unwrap();
        let m = j.marginal(&[Var::X, Var::Y1]).unwrap();
        let want = [0.35, 0.15, 0.15, 0.35];
        for (a, b) in m.probs().iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn scheme_dimension_mismatch() {
        let ch = BroadcastChannel::from_marginals(2, &bsc(0.3), &bsc(0.1)).unwrap();
        let scheme = SchemeSpec {
            q_pmf: vec![1.0],
            u_sizes: [2, 1, 1],
            aux_pmf: vec![0.5, 0.5],
            symbol_map: vec![0, 2],
            test1: TestChannel::Absent,
            test2: TestChannel::Absent,
            update: None,
        };
        assert!(matches!(assemble_joint(&scheme, &ch), Err(InfoError::Structural(_))));
    }

    #[test]
    fn merge_keeps_information() {
        let j = JointPmf::new(
            vec![(Var::U0, 2), (Var::U1, 2), (Var::Y1, 2)],
            vec![0.1, 0.05, 0.2, 0.05, 0.15, 0.15, 0.1, 0.2],
        )
        .unwrap();
        let m = j.merge_into(Var::U0, Var::U1).unwrap();
        let a = j.mutual_info(&[Var::U0, Var::U1], &[Var::Y1], &[]).unwrap();
        let b = m.mutual_info(&[Var::U0], &[Var::Y1], &[]).unwrap();
        assert!((a - b).abs() < 1e-14);
        assert_eq!(m.size_of(Var::U1), Some(1));
    }
}
