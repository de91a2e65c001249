#![allow(dead_code)]

pub mod fme_check;

use std::collections::HashMap;

use bcfb::info::{BroadcastChannel, FeedbackBudget, JointPmf, SchemeSpec, TestChannel, UpdateChannel, Var};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_pmf(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln() + 1e-3).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

fn rows(rng: &mut ChaCha8Rng, count: usize, n: usize) -> Vec<f64> {
    (0..count).flat_map(|_| random_pmf(rng, n)).collect()
}

pub fn random_channel(rng: &mut ChaCha8Rng, nx: usize, ny1: usize, ny2: usize) -> BroadcastChannel {
    BroadcastChannel::new(nx, ny1, ny2, rows(rng, nx, ny1 * ny2)).unwrap()
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TestForm {
    Absent,
    GivenY,
    GivenYU0,
}

pub struct SchemeShape {
    pub q: usize,
    pub u: [usize; 3],
    pub t: [usize; 2],
    pub form: TestForm,
    pub v: Option<usize>,
    /// Draw U1 and U2 independently given (Q, U0).
    pub independent_satellites: bool,
    /// Mixing weight of a random law against the uniform one, for test channels.
    pub test_strength: f64,
}

impl SchemeShape {
    pub fn binary(q: usize, form: TestForm, v: Option<usize>) -> Self {
        Self { q, u: [2, 2, 2], t: [2, 2], form, v, independent_satellites: true, test_strength: 0.6 }
    }
}

fn weak_rows(rng: &mut ChaCha8Rng, count: usize, n: usize, strength: f64) -> Vec<f64> {
    rows(rng, count, n).into_iter().map(|p| strength * p + (1.0 - strength) / n as f64).collect()
}

pub fn random_scheme(rng: &mut ChaCha8Rng, shape: &SchemeShape, channel: &BroadcastChannel) -> SchemeSpec {
    let [a, b, c] = shape.u;
    let cells = shape.q * a * b * c;
    let symbol_map = (0..cells).map(|_| rng.random_range(0..channel.x_size())).collect();
    let test = |rng: &mut ChaCha8Rng, ny: usize, nt: usize| match shape.form {
        TestForm::Absent => TestChannel::Absent,
        TestForm::GivenY => TestChannel::GivenY { size: nt, law: weak_rows(rng, shape.q * ny, nt, shape.test_strength) },
        TestForm::GivenYU0 => {
            TestChannel::GivenYU0 { size: nt, law: weak_rows(rng, shape.q * a * ny, nt, shape.test_strength) }
        }
    };
    let test1 = test(rng, channel.y1_size(), shape.t[0]);
    let test2 = test(rng, channel.y2_size(), shape.t[1]);
    let update = shape.v.map(|nv| {
        let rows_n = a * b * c * test1.out_size() * test2.out_size();
        UpdateChannel { size: nv, law: weak_rows(rng, rows_n, nv, shape.test_strength) }
    });
    SchemeSpec {
        q_pmf: random_pmf(rng, shape.q),
        u_sizes: shape.u,
        aux_pmf: if shape.independent_satellites {
            (0..shape.q * a)
                .flat_map(|_| {
                    let w0 = -(1.0 - rng.random::<f64>()).ln() + 1e-3;
                    let p1 = random_pmf(rng, b);
                    let p2 = random_pmf(rng, c);
                    p1.iter().flat_map(|x| p2.iter().map(move |y| w0 * x * y)).collect::<Vec<_>>()
                })
                .collect::<Vec<_>>()
                .chunks(a * b * c)
                .flat_map(|cell| {
                    let s: f64 = cell.iter().sum();
                    cell.iter().map(move |x| x / s).collect::<Vec<_>>()
                })
                .collect()
        } else {
            rows(rng, shape.q, a * b * c)
        },
        symbol_map,
        test1,
        test2,
        update,
    }
}

/// Brute-force I(l;r|g) by enumerating the dense tensor into hash maps.
pub fn oracle_mi(joint: &JointPmf, l: &[Var], r: &[Var], g: &[Var]) -> f64 {
    let vars: Vec<(Var, usize)> = joint.variables().collect();
    let mut idx = vec![0usize; vars.len()];
    let mut maps: [HashMap<Vec<usize>, f64>; 4] = Default::default();
    let sets: [Vec<Var>; 4] = [
        l.iter().chain(g).copied().collect(),
        r.iter().chain(g).copied().collect(),
        l.iter().chain(r).chain(g).copied().collect(),
        g.to_vec(),
    ];
    for &p in joint.probs() {
        if p > 0.0 {
            for (k, set) in sets.iter().enumerate() {
                let key: Vec<usize> = set
                    .iter()
                    .map(|v| idx[vars.iter().position(|(w, _)| w == v).unwrap()])
                    .collect();
                *maps[k].entry(key).or_insert(0.0) += p;
            }
        }
        for k in (0..vars.len()).rev() {
            idx[k] += 1;
            if idx[k] < vars[k].1 {
                break;
            }
            idx[k] = 0;
        }
    }
    let h = |m: &HashMap<Vec<usize>, f64>| -> f64 {
        m.values().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum::<f64>() / std::f64::consts::LN_2
    };
    h(&maps[0]) + h(&maps[1]) - h(&maps[2]) - h(&maps[3])
}

/// Budgets between the compression floor and just above the Wyner-Ziv rate,
/// so that both the zero and positive penalty branches occur.
pub fn random_budget(rng: &mut ChaCha8Rng, joint: &JointPmf) -> FeedbackBudget {
    let q: Vec<Var> = if joint.has(Var::Q) { vec![Var::Q] } else { vec![] };
    let given = |extra: &[Var]| -> Vec<Var> { extra.iter().chain(&q).copied().collect() };
    let wz1 = joint.mutual_info(&[Var::Yt1], &[Var::Y1], &given(&[Var::U0, Var::Y2])).unwrap();
    let wz2 = joint.mutual_info(&[Var::Yt2], &[Var::Y2], &given(&[Var::U0, Var::Y1])).unwrap();
    let f1 = joint.mutual_info(&[Var::Yt1], &[Var::Y1], &given(&[Var::U0, Var::U2, Var::Y2])).unwrap();
    let f2 = joint.mutual_info(&[Var::Yt2], &[Var::Y2], &given(&[Var::U0, Var::U1, Var::Y1])).unwrap();
    let pick = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| lo + (1.3 * hi - lo).max(0.0) * rng.random::<f64>();
    FeedbackBudget::new(pick(rng, f1, wz1), pick(rng, f2, wz2)).unwrap()
}

/// Budgets around the compression floors of the processed-feedback scheme.
pub fn random_processed_budget(rng: &mut ChaCha8Rng, joint: &JointPmf) -> FeedbackBudget {
    let q: Vec<Var> = if joint.has(Var::Q) { vec![Var::Q] } else { vec![] };
    let u: Vec<Var> = [Var::U0, Var::U1, Var::U2].into_iter().chain(q).collect();
    let with = |extra: Var| -> Vec<Var> { u.iter().copied().chain([extra]).collect() };
    let f1 = joint.mutual_info(&[Var::Y1], &[Var::Yt1], &with(Var::Yt2)).unwrap();
    let f2 = joint.mutual_info(&[Var::Y2], &[Var::Yt2], &with(Var::Yt1)).unwrap();
    let both = joint.mutual_info(&[Var::Y1, Var::Y2], &[Var::Yt1, Var::Yt2], &u).unwrap();
    FeedbackBudget::new(f1 + both * rng.random::<f64>(), f2 + both * rng.random::<f64>()).unwrap()
}
