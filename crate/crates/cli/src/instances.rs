//! Random channels, schemes and budgets for `fme check`.

use anyhow::{anyhow, bail};
use bcfb::info::{assemble_joint, BroadcastChannel, FeedbackBudget, JointPmf, SchemeSpec, TestChannel, UpdateChannel, Var};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Generator {
    rng: ChaCha8Rng,
    processed: bool,
    cloud_test: bool,
    count: usize,
}

impl Generator {
    pub fn new(seed: u64, fixture: &str) -> anyhow::Result<Self> {
        let (processed, cloud_test) = match fixture {
            "appendix_a" => (false, true),
            "appendix_b" => (false, false),
            "appendix_c" => (true, false),
            other => bail!("unknown fixture {other:?}"),
        };
        Ok(Self { rng: ChaCha8Rng::seed_from_u64(seed), processed, cloud_test, count: 0 })
    }

    fn pmf(&mut self, n: usize) -> Vec<f64> {
        let w: Vec<f64> = (0..n).map(|_| -(1.0 - self.rng.random::<f64>()).ln() + 1e-3).collect();
        let s: f64 = w.iter().sum();
        w.into_iter().map(|x| x / s).collect()
    }

    fn rows(&mut self, count: usize, n: usize) -> Vec<f64> {
        (0..count).flat_map(|_| self.pmf(n)).collect()
    }

    /// Rows pulled towards uniform so the tests are neither trivial nor exact.
    fn soft_rows(&mut self, count: usize, n: usize) -> Vec<f64> {
        self.rows(count, n).into_iter().map(|p| 0.6 * p + 0.4 / n as f64).collect()
    }

    /// P(u0, u1, u2 | q) with U1 and U2 independent given (Q, U0).
    fn satellites(&mut self, q: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(q * 8);
        for _ in 0..q {
            let cloud = self.pmf(2);
            for p0 in cloud {
                let (a, b) = (self.pmf(2), self.pmf(2));
                out.extend(a.iter().flat_map(|x| b.iter().map(move |y| p0 * x * y)));
            }
        }
        out
    }

    pub fn next(&mut self) -> anyhow::Result<(JointPmf, FeedbackBudget)> {
        self.count += 1;
        let q = 1 + self.count % 2;
        let channel = BroadcastChannel::new(2, 2, 2, self.rows(2, 4)).map_err(|e| anyhow!("{e}"))?;
        let test = |g: &mut Self| {
            if g.cloud_test {
                TestChannel::GivenYU0 { size: 2, law: g.soft_rows(q * 2 * 2, 2) }
            } else {
                TestChannel::GivenY { size: 2, law: g.soft_rows(q * 2, 2) }
            }
        };
        let test1 = test(self);
        let test2 = test(self);
        let update = if self.processed { Some(UpdateChannel { size: 2, law: self.soft_rows(8 * 4, 2) }) } else { None };
        let scheme = SchemeSpec {
            q_pmf: self.pmf(q),
            u_sizes: [2, 2, 2],
            aux_pmf: self.satellites(q),
            symbol_map: (0..q * 8).map(|_| self.rng.random_range(0..2)).collect(),
            test1,
            test2,
            update,
        };
        let joint = assemble_joint(&scheme, &channel).map_err(|e| anyhow!("{e}"))?;
        let budget = self.budget(&joint)?;
        Ok((joint, budget))
    }

    /// Budgets spread around the compression rates so both penalty branches occur.
    fn budget(&mut self, joint: &JointPmf) -> anyhow::Result<FeedbackBudget> {
        use Var::{Q, U0, U1, U2, Y1, Y2, Yt1, Yt2};
        let mi = |l: &[Var], r: &[Var], g: &[Var]| joint.mutual_info(l, r, g).map_err(|e| anyhow!("{e}"));
        let (b1, b2) = if self.processed {
            let u = [U0, U1, U2, Q];
            let both = mi(&[Y1, Y2], &[Yt1, Yt2], &u)?;
            let f1 = mi(&[Y1], &[Yt1], &[U0, U1, U2, Q, Yt2])?;
            let f2 = mi(&[Y2], &[Yt2], &[U0, U1, U2, Q, Yt1])?;
            (f1 + both * self.rng.random::<f64>(), f2 + both * self.rng.random::<f64>())
        } else {
            let w1 = mi(&[Yt1], &[Y1], &[U0, Y2, Q])?;
            let w2 = mi(&[Yt2], &[Y2], &[U0, Y1, Q])?;
            let f1 = mi(&[Yt1], &[Y1], &[U0, U2, Y2, Q])?;
            let f2 = mi(&[Yt2], &[Y2], &[U0, U1, Y1, Q])?;
            let mut pick = |lo: f64, hi: f64| lo + (1.3 * hi - lo).max(0.0) * self.rng.random::<f64>();
            (pick(f1, w1), pick(f2, w2))
        };
        FeedbackBudget::new(b1, b2).map_err(|e| anyhow!("{e}"))
    }
}
