mod figure;
mod instances;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use bcfb::examples;
use bcfb::fme::{project_to_rates, Fixture};
use bcfb::geometry::{region_distance, to_csv, RateRegion};
use bcfb::info::{assemble_joint, BroadcastChannel, FeedbackBudget, SchemeSpec, Var};
use bcfb::regions::{self, region_json, Receiver, RegionVerdict};
use bcfb::search::{self, BlackwellOptions, GridSpec, ImprovementOptions};
use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::json;

#[derive(Parser)]
#[command(name = "bcfb", version, about = "Rate regions for broadcast channels with rate-limited feedback")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Output directory (default: $BCFB_OUT_DIR, else the current directory).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Grid override (GridSpec JSON) for the feedback families of `figure`.
    #[arg(long, global = true)]
    grid: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Discrepancy tolerance for `fme check` and `certify`.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate one bound on a channel and scheme.
    Region {
        #[command(subcommand)]
        cmd: RegionCmd,
    },
    /// Frontier CSVs and a gnuplot script for one of the worked channels (2, 3 or 4).
    Figure { id: u8 },
    /// Compare projected linear systems with their closed forms.
    Fme {
        #[command(subcommand)]
        cmd: FmeCmd,
    },
    /// Search for a no-feedback boundary point that feedback improves on.
    Certify {
        /// `bsbc`, or a channel JSON file.
        #[arg(long)]
        channel: String,
        #[arg(long)]
        p1: Option<f64>,
        #[arg(long)]
        p2: Option<f64>,
        #[arg(long, default_value_t = 0.1)]
        rfb1: f64,
        #[arg(long, default_value_t = 0.0)]
        rfb2: f64,
    },
    /// Optimize the symmetric rate on the Blackwell channel with state.
    Blackwell {
        #[arg(long, default_value_t = 8.0)]
        budget: f64,
    },
}

#[derive(Subcommand)]
enum RegionCmd {
    Eval {
        #[arg(long, value_enum)]
        bound: Bound,
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        scheme: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        rfb1: f64,
        #[arg(long, default_value_t = 0.0)]
        rfb2: f64,
    },
}

#[derive(Subcommand)]
enum FmeCmd {
    Check {
        #[arg(long)]
        fixture: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Bound {
    Marton,
    Sp1,
    Sp2,
    NeOuter,
    Enh1,
    Enh2,
    Simple,
    Thm1,
    Thm2,
    Thm3,
    Thm3Swapped,
    Cor1,
    Cor1Swapped,
    Thm4,
    Cor2,
}

/// How a command ended, mapped onto the exit-code contract.
enum Failure {
    Input(anyhow::Error),
    Infeasible(String),
    Regression(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli
        .out
        .clone()
        .or_else(|| std::env::var_os("BCFB_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let run = || -> Outcome {
        fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
        match &cli.cmd {
            Cmd::Region { cmd: RegionCmd::Eval { bound, channel, scheme, rfb1, rfb2 } } => {
                region_eval(&out, *bound, channel, scheme, *rfb1, *rfb2)
            }
            Cmd::Figure { id } => {
                let grid = cli.grid.as_deref().map(|p| load::<GridSpec>(p, "grid")).transpose()?;
                figure::run(&out, *id, grid.as_ref())?;
                Ok(())
            }
            Cmd::Fme { cmd: FmeCmd::Check { fixture, trials } } => {
                fme_check(&out, fixture, *trials, cli.seed.unwrap_or(1), cli.tol.unwrap_or(1e-9))
            }
            Cmd::Certify { channel, p1, p2, rfb1, rfb2 } => {
                certify(&out, channel, *p1, *p2, *rfb1, *rfb2, cli.seed, cli.tol.unwrap_or(1e-9))
            }
            Cmd::Blackwell { budget } => blackwell(&out, *budget, cli.seed),
        }
    };
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Infeasible(msg)) => {
            eprintln!("infeasible: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Regression(msg)) => {
            eprintln!("regression: {msg}");
            ExitCode::from(3)
        }
    }
}

/// Reads JSON, naming the failing path on error.
fn load<T: DeserializeOwned>(path: &Path, what: &str) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {what} file {}", path.display()))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de)
        .map_err(|e| anyhow!("{what} file {}: at `{}`: {}", path.display(), e.path(), e.inner()))
}

fn write(dir: &Path, name: &str, contents: &str) -> anyhow::Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

fn write_json(dir: &Path, name: &str, value: &serde_json::Value) -> anyhow::Result<()> {
    write(dir, name, &(serde_json::to_string_pretty(value)? + "\n"))
}

fn region_eval(out: &Path, bound: Bound, channel: &Path, scheme: &Path, rfb1: f64, rfb2: f64) -> Outcome {
    let ch: BroadcastChannel = load(channel, "channel")?;
    let sc: SchemeSpec = load(scheme, "scheme")?;
    let budget = FeedbackBudget::new(rfb1, rfb2).context("feedback rates")?;
    let joint = assemble_joint(&sc, &ch).context("scheme does not fit the channel")?;
    use Var::{U0, U1, U2};
    let plain = |r: Result<RateRegion, regions::RegionError>| -> anyhow::Result<(Option<RegionVerdict>, Option<RateRegion>)> {
        Ok((None, Some(r?)))
    };
    let verdict = |v: Result<RegionVerdict, regions::RegionError>| -> anyhow::Result<(Option<RegionVerdict>, Option<RateRegion>)> {
        Ok((Some(v?), None))
    };
    let (verdict, region) = match bound {
        Bound::Marton => plain(regions::marton(&joint)),
        Bound::Sp1 => plain(regions::superposition(&joint, &[U0], Receiver::One)),
        Bound::Sp2 => plain(regions::superposition(&joint, &[U0], Receiver::Two)),
        Bound::NeOuter => plain(regions::nair_elgamal(&joint, &[U0, U1], &[U0, U2])),
        Bound::Enh1 => plain(regions::enhanced(&joint, &[U0], Receiver::One)),
        Bound::Enh2 => plain(regions::enhanced(&joint, &[U0], Receiver::Two)),
        Bound::Cor2 => plain(regions::cor2(&joint)),
        Bound::Simple => verdict(regions::simple_scheme(&joint, &budget)),
        Bound::Thm1 => verdict(regions::thm1(&joint, &budget)),
        Bound::Thm2 => verdict(regions::thm2(&joint, &budget)),
        Bound::Thm3 => verdict(regions::thm3(&joint, &budget, Receiver::One)),
        Bound::Thm3Swapped => verdict(regions::thm3(&joint, &budget, Receiver::Two)),
        Bound::Cor1 => verdict(regions::cor1(&joint, &budget, Receiver::One)),
        Bound::Cor1Swapped => verdict(regions::cor1(&joint, &budget, Receiver::Two)),
        Bound::Thm4 => verdict(regions::thm4(&joint, &budget)),
    }
    .context("evaluating the bound")?;
    let (region, doc) = match verdict {
        Some(v) => {
            let doc = v.to_json();
            match v.region {
                Some(r) => (r, doc),
                None => {
                    write_json(out, "verdict.json", &doc)?;
                    let why: Vec<String> =
                        v.violated().iter().map(|c| format!("{} (slack {:e})", c.name, c.slack)).collect();
                    return Err(Failure::Infeasible(why.join(", ")));
                }
            }
        }
        None => {
            let r = region.expect("plain bounds always yield a region");
            let doc = region_json(&r);
            (r, doc)
        }
    };
    let vertices = region.vertices().map_err(|e| Failure::Infeasible(format!("empty region: {e}")))?;
    write_json(out, "region.json", &doc)?;
    write(out, "vertices.csv", &to_csv(&vertices))?;
    print!("{}", to_csv(&vertices));
    Ok(())
}

fn fme_check(out: &Path, fixture: &str, trials: usize, seed: u64, tol: f64) -> Outcome {
    let fx = Fixture::bundled(fixture).map_err(|e| anyhow!("{e}"))?;
    let mut gen = instances::Generator::new(seed, fixture)?;
    let (mut compared, mut both_empty, mut worst) = (0usize, 0usize, 0.0f64);
    let mut mismatches = vec![];
    // draw until `trials` instances with a nonempty region have been compared
    let mut k = 0;
    while compared < trials && k < 200 * trials.max(1) {
        k += 1;
        let (joint, budget) = gen.next()?;
        let verdict = match fixture {
            "appendix_a" => regions::thm1(&joint, &budget),
            "appendix_b" => regions::thm2(&joint, &budget),
            _ => regions::thm4(&joint, &budget),
        }
        .map_err(|e| anyhow!("{e}"))?;
        let proj = project_to_rates(&fx.instantiate(&joint, &budget).map_err(|e| anyhow!("{e}"))?);
        let holds = verdict.diagnostics_hold();
        let closed = verdict.region.filter(|_| holds);
        match (proj, closed) {
            (Ok(p), Some(c)) => {
                let d = region_distance(&p, &c).map_err(|e| anyhow!("{e}"))?;
                worst = worst.max(d);
                compared += 1;
                if d > tol {
                    mismatches.push(format!("instance {k}: distance {d:e}"));
                }
            }
            (Err(_), None) => both_empty += 1,
            (p, c) => mismatches.push(format!(
                "instance {k}: projection {} but closed form {}",
                if p.is_ok() { "nonempty" } else { "empty" },
                if c.is_some() { "nonempty" } else { "empty" }
            )),
        }
    }
    let report = json!({
        "fixture": fixture,
        "trials": trials,
        "draws": k,
        "seed": seed,
        "compared": compared,
        "both_empty": both_empty,
        "max_distance": worst,
        "tolerance": tol,
        "mismatches": mismatches,
    });
    write_json(out, &format!("fme_{fixture}.json"), &report)?;
    println!("{fixture}: {compared} compared, {both_empty} empty in both, max discrepancy {worst:e}");
    if mismatches.is_empty() {
        Ok(())
    } else {
        Err(Failure::Regression(format!("{} mismatches, first: {}", mismatches.len(), mismatches[0])))
    }
}

#[allow(clippy::too_many_arguments)]
fn certify(out: &Path, channel: &str, p1: Option<f64>, p2: Option<f64>, rfb1: f64, rfb2: f64, seed: Option<u64>, tol: f64) -> Outcome {
    let ch = if channel == "bsbc" {
        let (Some(p1), Some(p2)) = (p1, p2) else {
            return Err(anyhow!("--channel bsbc needs --p1 and --p2").into());
        };
        examples::bsbc_channel(p1, p2).context("channel parameters")?
    } else {
        load::<BroadcastChannel>(Path::new(channel), "channel")?
    };
    let budget = FeedbackBudget::new(rfb1, rfb2).context("feedback rates")?;
    let mut opts = ImprovementOptions::default();
    if let Some(s) = seed {
        opts.seed = s;
    }
    let report = search::improvement_report(&ch, &budget, &opts).map_err(|e| anyhow!("{e}"))?;
    write_json(out, "certificate.json", &report.to_json())?;
    match &report.witness {
        Some(w) => {
            println!(
                "pass: {} gamma {} point ({}, {}) improvement {:e} via receiver {:?}",
                w.certificate.pass,
                w.certificate.gamma,
                w.feedback_point.r1,
                w.feedback_point.r2,
                w.improvement,
                w.direction
            );
            if w.soundness_violation > tol {
                return Err(Failure::Regression(format!("certified point violates the direct region by {:e}", w.soundness_violation)));
            }
            Ok(())
        }
        None => {
            println!("no certified improvement: {}", report.note);
            Ok(())
        }
    }
}

fn blackwell(out: &Path, budget: f64, seed: Option<u64>) -> Outcome {
    if !(budget >= 0.0) {
        return Err(anyhow!("budget {budget} must be nonnegative").into());
    }
    let mut opts = BlackwellOptions { budget, ..Default::default() };
    if let Some(s) = seed {
        opts.seed = s;
    }
    let report = search::blackwell_optimize(&opts).map_err(|e| anyhow!("{e}"))?;
    write_json(out, "blackwell.json", &serde_json::to_value(&report).context("serializing report")?)?;
    for c in &report.per_choice {
        println!("{}: symmetric rate {} (sum {})", c.choice, c.symmetric_rate, c.sum_rate);
    }
    println!("best sum rate {} vs no-feedback {}", report.best.sum_rate, report.no_feedback_sum);
    if report.best.sum_rate > report.no_feedback_sum {
        Ok(())
    } else {
        Err(Failure::Regression(format!("sum rate {} does not exceed {}", report.best.sum_rate, report.no_feedback_sum)))
    }
}
