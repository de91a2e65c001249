use bcfb::fme::{project_to_rates, Fixture, FmeError};
use bcfb::geometry::region_distance;
use bcfb::info::{assemble_joint, FeedbackBudget, JointPmf};
use bcfb::regions::{self, RegionVerdict};

use super::*;

pub const HAUSDORFF_TOL: f64 = 1e-9;

#[derive(Default, Debug)]
pub struct Tally {
    pub compared: usize,
    pub both_infeasible: usize,
    pub mismatches: Vec<String>,
    pub delta_pos: [bool; 2],
    pub delta_zero: [bool; 2],
    pub max_distance: f64,
}

fn compare(fixture: &Fixture, joint: &JointPmf, budget: &FeedbackBudget, verdict: &RegionVerdict, tally: &mut Tally) {
    let sys = fixture.instantiate(joint, budget).unwrap();
    let proj = project_to_rates(&sys);
    let expect_feasible = verdict.is_feasible() && verdict.diagnostics_hold();
    match (proj, expect_feasible) {
        (Ok(r), true) => {
            let theory = verdict.region.as_ref().unwrap();
            match region_distance(&r, theory) {
                Ok(d) if d <= HAUSDORFF_TOL => {
                    tally.compared += 1;
                    tally.max_distance = tally.max_distance.max(d);
                }
                Ok(d) => tally.mismatches.push(format!("distance {d:e}")),
                Err(e) => tally.mismatches.push(format!("geometry {e}")),
            }
        }
        (Err(FmeError::Infeasible { .. }), false) => tally.both_infeasible += 1,
        (p, e) => tally.mismatches.push(format!(
            "projection {:?} vs expected feasible {e}; feas {:?} diag {:?}",
            p.map(|_| "region"),
            verdict.feasibility,
            verdict.diagnostics
        )),
    }
}

/// Draws random instances until `wanted` feasible ones have been compared.
pub fn run(fixture_name: &str, form: TestForm, v: Option<usize>, seed: u64, wanted: usize, max_trials: usize) -> Tally {
    let fixture = Fixture::bundled(fixture_name).unwrap();
    let mut rng = rng(seed);
    let mut tally = Tally::default();
    for k in 0..max_trials {
        if tally.compared >= wanted {
            break;
        }
        let ch = random_channel(&mut rng, 2, 2, 2);
        let shape = SchemeShape::binary(1 + k % 2, form, v);
        let scheme = random_scheme(&mut rng, &shape, &ch);
        let joint = assemble_joint(&scheme, &ch).unwrap();
        let budget = if v.is_some() {
            random_processed_budget(&mut rng, &joint)
        } else {
            random_budget(&mut rng, &joint)
        };
        let verdict = match fixture_name {
            "appendix_a" => regions::thm1(&joint, &budget).unwrap(),
            "appendix_b" => regions::thm2(&joint, &budget).unwrap(),
            _ => regions::thm4(&joint, &budget).unwrap(),
        };
        if verdict.is_feasible() && verdict.diagnostics_hold() {
            let d = regions::delta_terms(&joint, &budget).unwrap();
            for (i, delta) in [d.delta1, d.delta2].into_iter().enumerate() {
                if delta > 1e-6 {
                    tally.delta_pos[i] = true;
                } else {
                    tally.delta_zero[i] = true;
                }
            }
        }
        compare(&fixture, &joint, &budget, &verdict, &mut tally);
    }
    tally
}

