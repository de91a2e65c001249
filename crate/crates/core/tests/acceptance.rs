//! End-to-end acceptance checks, one line per criterion.

mod common;

use std::time::{Duration, Instant};

use bcfb::examples::{self, BscBecParams, BsbcParams, GaussianParams};
use bcfb::geometry::{contains_region, region_distance, violation, RatePoint, RateRegion};
use bcfb::info::{
    assemble_joint, binary_convolve, binary_entropy, entropy, BroadcastChannel, FeedbackBudget, SchemeSpec, TwoAuxSpec,
    Var,
};
use bcfb::regions::{self, Receiver};
use bcfb::search::{self, BlackwellOptions, Family, ImprovementOptions};
use common::fme_check;
use common::*;
use rand::RngExt;
use rand_chacha::ChaCha8Rng;

use Var::{Q, U0, U1, U2, X, Y1, Y2, Yt1, Yt2};

const MI_TOL: f64 = 1e-10;
const MARTON_TOL: f64 = 1e-12;
const FIG2_MARGIN: f64 = 1e-4;
const STRICT_TOL: f64 = 1e-6;
const BETA_GAP: f64 = 1e-6;
const BLACKWELL_STRETCH: f64 = 1.18;
const SOUNDNESS_TOL: f64 = 1e-9;
const TRANSFORM_TOL: f64 = 1e-9;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn hb(p: f64) -> f64 {
    binary_entropy(p).unwrap()
}

fn conv(a: f64, b: f64) -> f64 {
    binary_convolve(a, b).unwrap()
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Random point of a polygon: a convex combination of its vertices pulled
/// towards the origin by `shrink`.
fn random_point(rng: &mut ChaCha8Rng, region: &RateRegion, shrink: f64) -> Option<RatePoint> {
    let vs = region.vertices().ok()?;
    let w = random_pmf(rng, vs.len());
    let (r1, r2) = vs.iter().zip(&w).fold((0.0, 0.0), |(a, b), (v, w)| (a + w * v.r1, b + w * v.r2));
    Some(RatePoint::new(shrink * r1, shrink * r2))
}

// 1 -----------------------------------------------------------------------

fn generic_terms() -> Vec<(Vec<Var>, Vec<Var>, Vec<Var>)> {
    let t = |l: &[Var], r: &[Var], g: &[Var]| (l.to_vec(), r.to_vec(), g.to_vec());
    vec![
        t(&[U0], &[Y1], &[Q]),
        t(&[U0], &[Y2], &[Q]),
        t(&[X], &[Y2], &[Q]),
        t(&[X], &[Y2, Yt1], &[U0, Q]),
        t(&[Yt1], &[Y1], &[U0, Y2, Q]),
        t(&[X], &[Y1, Y2], &[U0, Q]),
        t(&[U0, U1], &[Y1, Yt2], &[Q]),
        t(&[U1], &[Y1, Yt2], &[U0, Q]),
        t(&[Yt2], &[Y2], &[U0, Y1, Q]),
        t(&[Yt2], &[U0, U1, U2, Y2], &[Y1, Q]),
    ]
}

fn mi_oracle() -> Outcome {
    let mut rng = rng(101);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    // every information term of the closed forms, on random small joints
    for k in 0..200 {
        let ch = random_channel(&mut rng, 2 + k % 3, 2 + (k / 3) % 3, 2 + (k / 9) % 3);
        let shape = SchemeShape {
            q: 1 + k % 2,
            u: [2, 2, 1 + k % 2],
            t: [2, 2 + k % 2],
            form: TestForm::GivenY,
            v: None,
            independent_satellites: k % 2 == 0,
            test_strength: 1.0,
        };
        let joint = assemble_joint(&random_scheme(&mut rng, &shape, &ch), &ch).unwrap();
        for (l, r, g) in generic_terms() {
            let got = joint.mutual_info(&l, &r, &g).unwrap();
            worst = worst.max((got - oracle_mi(&joint, &l, &r, &g)).abs());
            count += 1;
        }
    }
    // the closed forms themselves against enumeration of their schemes
    let mut closed_worst: f64 = 0.0;
    for k in 0..200 {
        let checks: Vec<(f64, (Vec<Var>, Vec<Var>, Vec<Var>))>;
        let joint;
        match k % 3 {
            0 => {
                let (p1, p2) = (uniform(&mut rng, 0.01, 0.49), uniform(&mut rng, 0.01, 0.49));
                let prm = BsbcParams::new(p1, p2, uniform(&mut rng, 0.0, 0.5), uniform(&mut rng, 0.0, 0.5)).unwrap();
                let (aux, test) = examples::bsbc_scheme(&prm).unwrap();
                let scheme = SchemeSpec::cloud_and_satellite(2, 2, &aux.pmf, test).unwrap();
                joint = assemble_joint(&scheme, &examples::bsbc_channel(p1, p2).unwrap()).unwrap();
                let h = entropy(&prm.alphas());
                checks = vec![
                    (1.0 - hb(conv(prm.beta1, p1)), (vec![U0], vec![Y1], vec![])),
                    (1.0 - hb(p2), (vec![X], vec![Y2], vec![])),
                    (h - hb(p2) - hb(conv(prm.beta2, p1)), (vec![X], vec![Yt1, Y2], vec![U0])),
                    (h - hb(conv(prm.beta1, p2)) - hb(prm.beta2), (vec![Yt1], vec![Y1], vec![Y2, U0])),
                ];
            }
            1 => {
                let p = uniform(&mut rng, 0.01, 0.49);
                let e = uniform(&mut rng, 0.01, 0.99) * hb(p);
                let prm = BscBecParams {
                    p,
                    e,
                    s: uniform(&mut rng, 0.0, 0.5),
                    alpha: 0.0,
                    gamma: uniform(&mut rng, 0.01, 0.99),
                };
                let (aux, test) = examples::bscbec_case1_scheme(&prm).unwrap();
                let scheme = SchemeSpec::cloud_and_satellite(2, 2, &aux.pmf, test).unwrap();
                joint = assemble_joint(&scheme, &examples::bscbec_channel(p, e).unwrap()).unwrap();
                let (s, g) = (prm.s, prm.gamma);
                checks = vec![
                    (1.0 - hb(conv(s, p)), (vec![U0], vec![Y1], vec![])),
                    (1.0 - e, (vec![X], vec![Y2], vec![])),
                    (g * e * (hb(conv(s, p)) - hb(p)) + (1.0 - e) * hb(s), (vec![X], vec![Yt1, Y2], vec![U0])),
                    (g * ((1.0 - e) * hb(p) + e * hb(conv(s, p))), (vec![Yt1], vec![Y1], vec![U0, Y2])),
                ];
            }
            _ => {
                let p = uniform(&mut rng, 0.01, 0.3);
                let e = hb(p) + uniform(&mut rng, 0.01, 0.99) * (1.0 - hb(p));
                let prm = BscBecParams {
                    p,
                    e,
                    s: 0.0,
                    alpha: uniform(&mut rng, 0.0, 1.0),
                    gamma: uniform(&mut rng, 0.01, 0.99),
                };
                joint = assemble_joint(&examples::bscbec_case2_scheme(&prm).unwrap(), &examples::bscbec_channel(p, e).unwrap())
                    .unwrap();
                let (a, g) = (prm.alpha, prm.gamma);
                let loss = oracle_mi(&joint, &[Yt2], &[U0, U1, U2, Y2], &[Y1, Q]);
                checks = vec![
                    ((1.0 - a) * (1.0 - e), (vec![U0, U2], vec![Y2], vec![Q])),
                    (a * (1.0 - hb(p)) + a * (1.0 - e) * g * hb(p), (vec![U1], vec![Y1, Yt2], vec![U0, Q])),
                    (1.0 - hb(p) - a * g * hb(e) + loss, (vec![U0, U1], vec![Y1, Yt2], vec![Q])),
                    (a * g * ((1.0 - e) * hb(p) + hb(e)), (vec![Yt2], vec![Y2], vec![U0, Y1, Q])),
                ];
            }
        }
        for (want, (l, r, g)) in checks {
            closed_worst = closed_worst.max((want - oracle_mi(&joint, &l, &r, &g)).abs());
            count += 1;
        }
    }
    outcome(
        worst <= MI_TOL && closed_worst <= MI_TOL,
        format!("{count} terms; engine vs enumeration {worst:.2e}, closed forms vs enumeration {closed_worst:.2e} (tol {MI_TOL:e})"),
    )
}

// 2 -----------------------------------------------------------------------

fn marton_reduction() -> Outcome {
    let mut rng = rng(202);
    let mut worst: f64 = 0.0;
    let mut both_empty = 0;
    let mut bad = 0;
    for k in 0..50 {
        let ch = random_channel(&mut rng, 2 + k % 2, 2 + k % 3, 2);
        let mut shape = SchemeShape::binary(1 + k % 2, TestForm::Absent, None);
        shape.independent_satellites = k % 3 != 0;
        let joint = assemble_joint(&random_scheme(&mut rng, &shape, &ch), &ch).unwrap();
        let v = regions::thm2(&joint, &FeedbackBudget::none()).unwrap();
        let m = regions::marton(&joint).unwrap();
        match (v.region, m.vertices()) {
            (Some(r), Ok(_)) => worst = worst.max(region_distance(&r, &m).unwrap()),
            (None, Err(_)) => both_empty += 1,
            _ => bad += 1,
        }
    }
    outcome(
        bad == 0 && worst <= MARTON_TOL,
        format!("50 schemes; max Hausdorff {worst:.2e} (tol {MARTON_TOL:e}); {both_empty} empty in both; {bad} disagreements"),
    )
}

// 3 -----------------------------------------------------------------------

fn fme_equivalence() -> Outcome {
    let runs = [
        ("appendix_a", TestForm::GivenYU0, None, 31),
        ("appendix_b", TestForm::GivenY, None, 32),
        ("appendix_c", TestForm::GivenY, Some(2), 33),
    ];
    let mut pass = true;
    let mut parts = vec![];
    for (name, form, v, seed) in runs {
        let t = fme_check::run(name, form, v, seed, 100, 20_000);
        let branches = t.delta_pos.iter().chain(&t.delta_zero).all(|&b| b);
        let needs_branches = v.is_none();
        pass &= t.mismatches.is_empty() && t.compared >= 100 && (branches || !needs_branches);
        parts.push(format!(
            "{name}: {} compared, {} jointly infeasible, {} mismatches, max {:.1e}, both Δ branches {}",
            t.compared,
            t.both_infeasible,
            t.mismatches.len(),
            t.max_distance,
            branches
        ));
    }
    outcome(pass, parts.join("; "))
}

// 4 -----------------------------------------------------------------------

fn bsbc_frontier() -> Outcome {
    let mut margins = vec![];
    let mut pass = true;
    for p1 in [0.2, 0.25, 0.3] {
        let fam = Family::Bsbc { p1, p2: 0.1, r_fb1: 0.8 };
        let f = search::frontier(&fam, &fam.default_grid()).unwrap();
        let top = 1.0 - hb(p1);
        let (gap, at) = f
            .samples
            .iter()
            .filter(|s| s.r1 > 0.0 && s.r1 < top)
            .map(|s| (s.r2 - examples::bsbc_nofb_r2_at(p1, 0.1, s.r1).unwrap(), s.r1))
            .fold((f64::NEG_INFINITY, 0.0), |a, b| if b.0 > a.0 { b } else { a });
        pass &= gap >= FIG2_MARGIN;
        margins.push((p1, gap, at, gap / top));
    }
    let grows = margins.windows(2).all(|w| w[1].1 > w[0].1);
    let text: Vec<String> = margins
        .iter()
        .map(|(p1, g, at, rel)| format!("p1={p1}: max gain {g:.5} bits at R1={at:.4} ({rel:.4} of R1 range)"))
        .collect();
    outcome(pass && grows, format!("{}; margin increasing in p1: {grows}", text.join(", ")))
}

// 5 -----------------------------------------------------------------------

fn bscbec_regions() -> Outcome {
    let (p, r_fb) = (0.1, 0.8);
    // case 1
    let e = 0.2;
    let s0 = examples::bscbec_s0(p, e).unwrap();
    let mut worst_case1 = f64::INFINITY;
    let mut tested = 0;
    let mut s = 0.05;
    while s < s0 - 1e-12 {
        let target = examples::bscbec_boundary_point(p, e, s);
        let mut best = f64::NEG_INFINITY;
        for i in 0..=12 {
            let s2 = s - 0.02 * 0.5f64.powi(i);
            let gmax = examples::bscbec_case1_gamma_max(p, e, s2, r_fb).min(0.999);
            for j in 0..40 {
                let gamma = gmax * 0.7f64.powi(j);
                let prm = BscBecParams { p, e, s: s2, alpha: 0.0, gamma };
                if let Some(r) = examples::bscbec_case1(&prm, r_fb).unwrap().region {
                    best = best.max(-violation(&r, target));
                }
            }
        }
        worst_case1 = worst_case1.min(best);
        tested += 1;
        s += 0.05;
    }
    // case 2
    let e = 0.7;
    let (c1, c2) = (1.0 - hb(p), 1.0 - e);
    let mut worst_case2 = f64::INFINITY;
    for k in 1..10 {
        let alpha = k as f64 / 10.0;
        let gmax = examples::bscbec_case2_gamma_max(p, e, alpha, r_fb).min(0.999);
        let mut beyond = f64::NEG_INFINITY;
        for j in 1..=40 {
            let gamma = gmax * j as f64 / 40.0;
            let prm = BscBecParams { p, e, s: 0.0, alpha, gamma };
            let Some(r) = examples::bscbec_case2(&prm, r_fb).unwrap().region else { continue };
            // largest excess over the line R1/C1 + R2/C2 = 1 among interior vertices
            let excess = r
                .vertices()
                .unwrap()
                .iter()
                .filter(|v| v.r1 > 0.0 && v.r2 > 0.0)
                .map(|v| (v.r1 / c1 + v.r2 / c2 - 1.0) / (1.0 / c1).hypot(1.0 / c2))
                .fold(f64::NEG_INFINITY, f64::max);
            beyond = beyond.max(excess);
        }
        worst_case2 = worst_case2.min(beyond);
    }
    outcome(
        tested > 0 && worst_case1 >= STRICT_TOL && worst_case2 >= STRICT_TOL,
        format!(
            "case 1 (e=0.2): s0={s0:.10}, {tested} boundary points, smallest depth inside {worst_case1:.2e}; \
             case 2 (e=0.7): smallest gain over time-sharing across alpha=0.1..0.9 {worst_case2:.2e} (tol {STRICT_TOL:e})"
        ),
    )
}

// 6 -----------------------------------------------------------------------

fn gaussian_frontier() -> Outcome {
    let (power, n2, r_fb1) = (10.0, 1.0, 0.8);
    let mut pass = true;
    let mut parts = vec![];
    for n1 in [4.0, 8.0] {
        let fam = Family::Gaussian { power, n1, n2, r_fb1 };
        let f = search::frontier(&fam, &fam.default_grid()).unwrap();
        let gain = f
            .samples
            .iter()
            .filter(|s| s.r1 > 0.0)
            .map(|s| s.r2 - examples::gaussian_nofb_r2_at(power, n1, n2, s.r1))
            .fold(f64::NEG_INFINITY, f64::max);
        // at fixed α the part of the region beyond the no-feedback frontier
        // shrinks to nothing as β → ∞
        let excess = |r: &RateRegion| {
            r.vertices()
                .unwrap()
                .iter()
                .map(|v| v.r2 - examples::gaussian_nofb_r2_at(power, n1, n2, v.r1))
                .fold(0.0f64, f64::max)
        };
        let mut monotone = true;
        let mut final_gap: f64 = 0.0;
        for k in 1..10 {
            let alpha = k as f64 / 10.0;
            let beta_min = examples::gaussian_beta_min(power, n1, n2, alpha, r_fb1).unwrap();
            // at β_min the whole budget goes to compression; the excess rises
            // from there, peaks, then decays like 1/β
            let gaps: Vec<f64> = (0..=14)
                .map(|j| {
                    let beta = beta_min * 10f64.powi(j);
                    let prm = GaussianParams { power, n1, n2, alpha, beta, r_fb1 };
                    excess(&examples::gaussian_region(&prm).unwrap().region.unwrap())
                })
                .collect();
            let peak = gaps.iter().enumerate().fold(0, |m, (i, g)| if *g > gaps[m] { i } else { m });
            monotone &= gaps[peak..].windows(2).all(|w| w[1] <= w[0] + 1e-12);
            let last = gaps[14];
            final_gap = final_gap.max(last);
        }
        pass &= gain >= STRICT_TOL && monotone && final_gap < BETA_GAP;
        parts.push(format!("N1={n1}: max gain {gain:.5}, gap monotone past its peak {monotone}, final gap {final_gap:.2e}"));
    }
    outcome(pass, parts.join("; "))
}

// 7 -----------------------------------------------------------------------

fn blackwell() -> Outcome {
    let r = search::blackwell_optimize(&BlackwellOptions::default()).unwrap();
    let best = &r.best;
    let rates: Vec<String> =
        r.per_choice.iter().map(|c| format!("{} sym {:.4}", c.choice, c.symmetric_rate)).collect();
    if best.sum_rate < BLACKWELL_STRETCH {
        println!("warning: Blackwell stretch target {BLACKWELL_STRETCH} not reached (sum rate {:.4})", best.sum_rate);
    }
    outcome(
        best.sum_rate > r.no_feedback_sum,
        format!(
            "best sum rate {:.4} vs no-feedback {} ({}); stretch {BLACKWELL_STRETCH} {}; {} evaluations",
            best.sum_rate,
            r.no_feedback_sum,
            rates.join(", "),
            if best.sum_rate >= BLACKWELL_STRETCH { "met" } else { "missed" },
            r.evaluations
        ),
    )
}

// 8 -----------------------------------------------------------------------

fn certificate() -> Outcome {
    let (p1, p2, r_fb1) = (0.2, 0.1, 0.1);
    let ch = examples::bsbc_channel(p1, p2).unwrap();
    let report =
        search::improvement_report(&ch, &FeedbackBudget::new(r_fb1, 0.0).unwrap(), &ImprovementOptions::default()).unwrap();
    let main = match &report.witness {
        Some(w) => {
            let exact = w.feedback_point.r2 - examples::bsbc_nofb_r2_at(p1, p2, w.feedback_point.r1).unwrap();
            let ok = w.direction == Receiver::One
                && w.certificate.pass
                && w.certificate.gamma > 0.0
                && w.improvement >= STRICT_TOL
                && exact >= STRICT_TOL
                && w.soundness_violation <= SOUNDNESS_TOL;
            (ok, format!(
                "gamma {:.3e}, point ({:.6}, {:.6}) beyond sampled baseline by {:.2e} and above the exact no-feedback frontier by {:.2e}",
                w.certificate.gamma, w.feedback_point.r1, w.feedback_point.r2, w.improvement, exact
            ))
        }
        None => (false, "no witness".to_string()),
    };
    // soundness on random instances
    let mut rng = rng(808);
    let (mut passing, mut tried, mut worst): (usize, usize, f64) = (0, 0, f64::NEG_INFINITY);
    let mut unsound = 0;
    while passing < 20 && tried < 5000 {
        tried += 1;
        let nx = 2 + tried % 2;
        let ch = random_channel(&mut rng, nx, 2 + tried % 3, 2 + (tried / 3) % 2);
        let mut shape = SchemeShape::binary(1, TestForm::Absent, None);
        shape.independent_satellites = tried % 2 == 0;
        let marton = random_scheme(&mut rng, &shape, &ch);
        let Ok(m_region) = regions::marton(&assemble_joint(&marton, &ch).unwrap()) else { continue };
        let shrink = uniform(&mut rng, 0.3, 0.95);
        let Some(rm) = random_point(&mut rng, &m_region, shrink) else { continue };
        let enh = TwoAuxSpec::from_ux(2, nx, random_pmf(&mut rng, 2 * nx)).unwrap();
        let e_region = regions::enhanced_outer(&enh, &ch, Receiver::One).unwrap();
        let shrink = uniform(&mut rng, 0.5, 1.0);
        let Some(re) = random_point(&mut rng, &e_region, shrink) else { continue };
        let f = uniform(&mut rng, 0.01, 0.5);
        let probe = match search::usefulness_certificate(&marton, rm, &enh, re, &ch, 0.5, f) {
            Ok(c) => c,
            Err(_) => continue,
        };
        let gamma = uniform(&mut rng, 0.05, 1.0) * probe.gamma_info_bound.min(probe.gamma_fb_bound).min(0.9);
        if gamma <= 0.0 {
            continue;
        }
        let cert = search::usefulness_certificate(&marton, rm, &enh, re, &ch, gamma, f).unwrap();
        if !cert.pass {
            continue;
        }
        passing += 1;
        let v = search::certificate_violation(&marton, &enh, &ch, &cert, f).unwrap();
        worst = worst.max(v);
        if v > SOUNDNESS_TOL {
            unsound += 1;
        }
    }
    outcome(
        main.0 && passing >= 20 && unsound == 0,
        format!(
            "BSBC p1=0.2 p2=0.1 RFb1=0.1: {}; soundness: {passing} passing of {tried} random instances, worst violation {worst:.2e}",
            main.1
        ),
    )
}

// 9 -----------------------------------------------------------------------

/// Y1 = Y2 ⊕ Bern(q), Y2 = X ⊕ Bern(p).
fn degraded_bsbc(p: f64, q: f64) -> BroadcastChannel {
    let mut law = vec![0.0; 8];
    for x in 0..2 {
        for y1 in 0..2 {
            for y2 in 0..2 {
                let a = if x == y2 { 1.0 - p } else { p };
                let b = if y1 == y2 { 1.0 - q } else { q };
                law[(x * 2 + y1) * 2 + y2] = a * b;
            }
        }
    }
    BroadcastChannel::new(2, 2, 2, law).unwrap()
}

fn degraded_control() -> Outcome {
    let ch = degraded_bsbc(0.1, 0.15);
    let report =
        search::improvement_report(&ch, &FeedbackBudget::new(0.8, 0.8).unwrap(), &ImprovementOptions::default()).unwrap();
    outcome(report.witness.is_none(), format!("Y1 = Y2 xor Bern(0.15), Y2 = X xor Bern(0.1): {}", report.note))
}

// 10 ----------------------------------------------------------------------

fn transform() -> Outcome {
    let mut rng = rng(1010);
    let (mut done, mut tried, mut failures) = (0, 0, 0);
    while done < 100 && tried < 10_000 {
        tried += 1;
        let ch = random_channel(&mut rng, 2 + tried % 2, 2 + tried % 3, 2 + (tried / 2) % 2);
        let mut shape = SchemeShape::binary(1, TestForm::Absent, None);
        shape.u = [2, 2, 1 + tried % 3];
        shape.independent_satellites = tried % 2 == 0;
        let joint = assemble_joint(&random_scheme(&mut rng, &shape, &ch), &ch).unwrap();
        let i1 = joint.mutual_info(&[U0, U1], &[Y1], &[]).unwrap();
        let i2 = joint.mutual_info(&[U0, U1], &[Y2], &[]).unwrap();
        if i1 > i2 {
            continue;
        }
        let before = regions::marton(&joint).unwrap();
        if before.vertices().is_err() {
            continue;
        }
        let after = regions::marton(&regions::marton_sufficiency_transform(&joint).unwrap()).unwrap();
        done += 1;
        if !contains_region(&after, &before, TRANSFORM_TOL).unwrap_or(false) {
            failures += 1;
        }
    }
    outcome(done >= 100 && failures == 0, format!("{done} joints in the first case ({tried} drawn), {failures} not contained"))
}

fn main() {
    let criteria: Vec<(&str, Duration, fn() -> Outcome)> = vec![
        ("information terms match enumeration", Duration::from_secs(10), mi_oracle),
        ("backward decoding without feedback equals Marton", Duration::from_secs(10), marton_reduction),
        ("projected linear systems equal closed forms", Duration::from_secs(60), fme_equivalence),
        ("binary symmetric BC feedback frontier", Duration::from_secs(300), bsbc_frontier),
        ("BSC/BEC feedback regions", Duration::from_secs(120), bscbec_regions),
        ("Gaussian feedback frontier and beta limit", Duration::from_secs(120), gaussian_frontier),
        ("Blackwell channel with state", Duration::from_secs(600), blackwell),
        ("usefulness certificate and soundness", Duration::from_secs(120), certificate),
        ("physically degraded control", Duration::from_secs(60), degraded_control),
        ("Marton satellite merge", Duration::from_secs(30), transform),
    ];
    let mut failed = 0;
    for (k, (name, limit, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let out = f();
        let took = start.elapsed();
        let pass = out.pass && took <= limit;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {name}: {} [{:.1}s, limit {}s]",
            k + 1,
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            took.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
