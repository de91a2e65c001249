//! Frontier CSVs and gnuplot scripts for the three worked channels.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail};
use bcfb::geometry::{to_csv, RatePoint};
use bcfb::info::binary_entropy;
use bcfb::search::{self, Family, GridSpec};

struct Curve {
    file: String,
    title: String,
    dashed: bool,
}

fn frontier_points(family: &Family, grid: Option<&GridSpec>) -> anyhow::Result<Vec<RatePoint>> {
    let g = grid.cloned().unwrap_or_else(|| family.default_grid());
    Ok(search::frontier(family, &g).map_err(|e| anyhow!("{}: {e}", family.id()))?.points())
}

fn emit(out: &Path, name: &str, points: &[RatePoint], title: String, dashed: bool, curves: &mut Vec<Curve>) -> anyhow::Result<()> {
    crate::write(out, name, &to_csv(points))?;
    curves.push(Curve { file: name.to_string(), title, dashed });
    Ok(())
}

/// Writes `fig<id>_*.csv` and `fig<id>.gp`; `grid` overrides the feedback families' grids.
pub fn run(out: &Path, id: u8, grid: Option<&GridSpec>) -> anyhow::Result<()> {
    let mut curves = vec![];
    match id {
        2 => {
            for p1 in [0.2, 0.25, 0.3] {
                let fb = frontier_points(&Family::Bsbc { p1, p2: 0.1, r_fb1: 0.8 }, grid)?;
                let nofb = frontier_points(&Family::BsbcNofb { p1, p2: 0.1 }, None)?;
                emit(out, &format!("fig2_p1_{p1}.csv"), &fb, format!("feedback, p_1={p1}"), false, &mut curves)?;
                emit(out, &format!("fig2_p1_{p1}_nofb.csv"), &nofb, format!("no feedback, p_1={p1}"), true, &mut curves)?;
            }
        }
        3 => {
            let p = 0.1;
            let fb = frontier_points(&Family::Bscbec1 { p, e: 0.2, r_fb1: 0.8 }, grid)?;
            let nofb = frontier_points(&Family::BscbecNofb { p, e: 0.2 }, None)?;
            emit(out, "fig3_e_0.2.csv", &fb, "feedback, e=0.2".into(), false, &mut curves)?;
            emit(out, "fig3_e_0.2_nofb.csv", &nofb, "no feedback, e=0.2".into(), true, &mut curves)?;
            let fb = frontier_points(&Family::Bscbec2 { p, e: 0.7, r_fb2: 0.8 }, grid)?;
            // without feedback this channel is served best by time-sharing
            let c1 = 1.0 - binary_entropy(p).map_err(|e| anyhow!("{e}"))?;
            let c2 = 1.0 - 0.7;
            let nofb: Vec<RatePoint> =
                (0..=100).map(|k| k as f64 / 100.0).map(|a| RatePoint::new(a * c1, (1.0 - a) * c2)).collect();
            emit(out, "fig3_e_0.7.csv", &fb, "feedback, e=0.7".into(), false, &mut curves)?;
            emit(out, "fig3_e_0.7_nofb.csv", &nofb, "no feedback, e=0.7".into(), true, &mut curves)?;
        }
        4 => {
            for n1 in [4.0, 8.0] {
                let fb = frontier_points(&Family::Gaussian { power: 10.0, n1, n2: 1.0, r_fb1: 0.8 }, grid)?;
                let nofb = frontier_points(&Family::GaussianNofb { power: 10.0, n1, n2: 1.0 }, None)?;
                emit(out, &format!("fig4_N1_{n1}.csv"), &fb, format!("feedback, N_1={n1}"), false, &mut curves)?;
                emit(out, &format!("fig4_N1_{n1}_nofb.csv"), &nofb, format!("no feedback, N_1={n1}"), true, &mut curves)?;
            }
        }
        other => bail!("figure id must be 2, 3 or 4, got {other}"),
    }
    let mut gp = String::new();
    writeln!(gp, "set terminal pngcairo size 800,600")?;
    writeln!(gp, "set output 'fig{id}.png'")?;
    writeln!(gp, "set datafile separator ','")?;
    writeln!(gp, "set xlabel 'R_1 [bits]'")?;
    writeln!(gp, "set ylabel 'R_2 [bits]'")?;
    writeln!(gp, "set key top right")?;
    let plots: Vec<String> = curves
        .iter()
        .enumerate()
        .map(|(k, c)| {
            format!(
                "'{}' using 1:2 skip 1 with lines lc {} dt {} title '{}'",
                c.file,
                k / 2 + 1,
                if c.dashed { 2 } else { 1 },
                c.title
            )
        })
        .collect();
    writeln!(gp, "plot {}", plots.join(", \\\n     "))?;
    crate::write(out, &format!("fig{id}.gp"), &gp)?;
    println!("wrote {} curves and fig{id}.gp to {}", curves.len(), out.display());
    Ok(())
}
