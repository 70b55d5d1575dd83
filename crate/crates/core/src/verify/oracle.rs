//! Randomized comparison of the NSN peak against piecewise-constant controls.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::integrate::{
    event_f2_zero, event_y_peak, integrate_from, null_policy, EventKind, Policy, Tolerances, DEFAULT_HORIZON, Z,
};
use crate::models::{PlanarModel, State};
use crate::nsn::{simulate_nsn, NsnResult, Phase, SimOptions};
use crate::{Error, Result};

/// Number of best samples kept in a report.
pub const KEEP_BEST: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleOptions {
    /// Total samples, including the injected NSN replay.
    pub n_samples: usize,
    pub n_pieces: usize,
    pub seed: u64,
    /// Support of the random controls; defaults to twice the time the NSN
    /// run needs to reach the switching curve.
    pub horizon: Option<f64>,
    pub inject_nsn: bool,
    pub sim: SimOptions,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self { n_samples: 500, n_pieces: 8, seed: 42, horizon: None, inject_nsn: true, sim: SimOptions::default() }
    }
}

/// `u(t) = levels[j]` on `[breaks[j], breaks[j+1])`, zero afterwards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseControl {
    pub breaks: Vec<f64>,
    pub levels: Vec<f64>,
}

impl PiecewiseControl {
    /// Uniform switch times on `[0, horizon]` and uniform levels, scaled so
    /// the spend equals the budget or, half of the time, a random fraction
    /// of it. Levels are never scaled above one.
    pub fn random<R: Rng>(rng: &mut R, horizon: f64, pieces: usize, budget: f64) -> Self {
        let mut cuts: Vec<f64> = (0..pieces.saturating_sub(1)).map(|_| rng.gen::<f64>() * horizon).collect();
        cuts.sort_by(f64::total_cmp);
        let mut breaks = Vec::with_capacity(pieces + 1);
        breaks.push(0.0);
        breaks.extend(cuts);
        breaks.push(horizon);
        let levels: Vec<f64> = (0..pieces).map(|_| rng.gen::<f64>()).collect();

        let target = if rng.gen_bool(0.5) { budget } else { budget * rng.gen::<f64>() };
        let mut c = Self { breaks, levels };
        let spend = c.spend();
        let top = c.levels.iter().copied().fold(0.0, f64::max);
        if spend > 0.0 && top > 0.0 {
            let factor = (target / spend).min(1.0 / top);
            c.levels.iter_mut().for_each(|l| *l = (*l * factor).min(1.0));
        }
        c
    }

    pub fn level_at(&self, t: f64) -> f64 {
        let j = self.breaks.partition_point(|&b| b <= t);
        if j == 0 || j >= self.breaks.len() {
            0.0
        } else {
            self.levels[j - 1]
        }
    }

    pub fn spend(&self) -> f64 {
        self.levels.iter().zip(self.breaks.windows(2)).map(|(l, w)| l * (w[1] - w[0])).sum()
    }
}

impl Policy for PiecewiseControl {
    fn control(&self, t: f64, _s: State) -> f64 {
        self.level_at(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleSource {
    Nsn,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSample {
    pub index: usize,
    pub source: SampleSource,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub control: Option<PiecewiseControl>,
    pub peak: f64,
    pub spent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleFailure {
    pub index: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub n_samples: usize,
    pub n_pieces: usize,
    pub seed: u64,
    pub horizon: f64,
    pub budget: f64,
    pub ystar: f64,
    pub nsn_peak: f64,
    /// Lowest peak over all completed samples, the NSN replay included.
    pub best_alternative_peak: f64,
    pub margin: f64,
    /// Lowest peak over the random samples only.
    pub best_random_peak: Option<f64>,
    pub random_margin: Option<f64>,
    pub nsn_replay_peak: Option<f64>,
    pub best: Vec<OracleSample>,
    pub failed: Vec<SampleFailure>,
}

/// Peak of `y` and final spend under a control law applied on
/// `[t0, t_end]`, followed by `u ≡ 0` until `y` stops rising.
fn peak_under<P: Policy + ?Sized>(
    model: &PlanarModel,
    policy: &P,
    mut t: f64,
    mut z: Z,
    cuts: &[(f64, f64)],
    tol: Tolerances,
) -> Result<(f64, Z)> {
    let mut peak = z[1];
    for &(t_next, u) in cuts {
        if t_next <= t {
            continue;
        }
        let tr = integrate_from(model, policy, t, z, t_next, &[event_y_peak(model, u)], tol)?;
        peak = peak.max(tr.peak());
        let last = tr.last().expect("non-empty trajectory");
        z = [last.x, last.y, last.spent];
        t = t_next;
    }
    if model.f2(z[0], z[1]) > 0.0 {
        let tail = integrate_from(model, &null_policy, t, z, t + DEFAULT_HORIZON, &[event_f2_zero(model)], tol)?;
        if tail.terminal_event().map(|e| e.kind) != Some(EventKind::HitD0) {
            return Err(Error::HorizonReached { horizon: DEFAULT_HORIZON });
        }
        peak = peak.max(tail.peak());
        let last = tail.last().expect("non-empty trajectory");
        z = [last.x, last.y, last.spent];
    }
    Ok((peak, z))
}

/// The `index`-th random sample for a seed. Each index draws from its own
/// ChaCha stream, so samples can be evaluated in any order.
#[allow(clippy::too_many_arguments)]
pub fn oracle_sample(
    model: &PlanarModel,
    s0: State,
    budget: f64,
    horizon: f64,
    pieces: usize,
    seed: u64,
    index: usize,
    tol: Tolerances,
) -> Result<OracleSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let control = PiecewiseControl::random(&mut rng, horizon, pieces, budget);
    let cuts: Vec<(f64, f64)> = control.breaks[1..].iter().copied().zip(control.levels.iter().copied()).collect();
    let (peak, z) = peak_under(model, &control, 0.0, [s0.x, s0.y, 0.0], &cuts, tol)?;
    Ok(OracleSample { index, source: SampleSource::Random, control: Some(control), peak, spent: z[2] })
}

/// Replays the NSN control as an open-loop signal of time.
pub fn nsn_replay(model: &PlanarModel, nsn: &NsnResult, tol: Tolerances) -> Result<OracleSample> {
    let s0 = nsn.synthesis.s0;
    let t1 = nsn.phase(Phase::Singular).t_start;
    let t2 = nsn.phase(Phase::Singular).t_end;
    let open_loop = |t: f64, _s: State| nsn.control_at(model, t);
    let z0 = [s0.x, s0.y, 0.0];
    let (peak, z) = if t1 > 0.0 {
        let tr = integrate_from(model, &null_policy, 0.0, z0, t1, &[], tol)?;
        let last = tr.last().expect("non-empty trajectory");
        let (p, z) = replay_singular(model, &open_loop, t1, [last.x, last.y, 0.0], t2, tol)?;
        (p.max(tr.peak()), z)
    } else {
        replay_singular(model, &open_loop, 0.0, z0, t2, tol)?
    };
    Ok(OracleSample { index: 0, source: SampleSource::Nsn, control: None, peak, spent: z[2] })
}

fn replay_singular<P: Policy + ?Sized>(
    model: &PlanarModel,
    policy: &P,
    t1: f64,
    z: Z,
    t2: f64,
    tol: Tolerances,
) -> Result<(f64, Z)> {
    let mut peak = z[1];
    let mut z = z;
    if t2 > t1 {
        let tr = integrate_from(model, policy, t1, z, t2, &[], tol)?;
        peak = peak.max(tr.peak());
        let last = tr.last().expect("non-empty trajectory");
        z = [last.x, last.y, last.spent];
    }
    let (p, z) = peak_under(model, &null_policy, t2, z, &[], tol)?;
    Ok((peak.max(p), z))
}

/// Twice the time the NSN run takes to reach the switching curve.
pub fn oracle_horizon(nsn: &NsnResult) -> f64 {
    let t = nsn.phase(Phase::Singular).t_end;
    if t > 0.0 {
        2.0 * t
    } else {
        1.0
    }
}

/// Builds the report from per-sample outcomes given as `(index, outcome)`.
pub fn assemble_oracle(
    nsn: &NsnResult,
    opts: &OracleOptions,
    horizon: f64,
    outcomes: Vec<(usize, Result<OracleSample>)>,
) -> OracleReport {
    let mut ok = Vec::with_capacity(outcomes.len());
    let mut failed = Vec::new();
    for (index, r) in outcomes {
        match r {
            Ok(s) => ok.push(s),
            Err(e) => failed.push(SampleFailure { index, message: e.to_string() }),
        }
    }
    ok.sort_by(|a, b| a.peak.total_cmp(&b.peak).then(a.index.cmp(&b.index)));
    failed.sort_by_key(|f| f.index);

    let best_alternative_peak = ok.first().map_or(f64::INFINITY, |s| s.peak);
    let best_random_peak = ok.iter().find(|s| s.source == SampleSource::Random).map(|s| s.peak);
    let nsn_replay_peak = ok.iter().find(|s| s.source == SampleSource::Nsn).map(|s| s.peak);
    ok.truncate(KEEP_BEST);
    OracleReport {
        n_samples: opts.n_samples,
        n_pieces: opts.n_pieces,
        seed: opts.seed,
        horizon,
        budget: nsn.synthesis.budget,
        ystar: nsn.ystar(),
        nsn_peak: nsn.peak,
        best_alternative_peak,
        margin: best_alternative_peak - nsn.peak,
        best_random_peak,
        random_margin: best_random_peak.map(|p| p - nsn.peak),
        nsn_replay_peak,
        best: ok,
        failed,
    }
}

/// Indices of the random samples for the given options.
pub fn random_indices(opts: &OracleOptions) -> core::ops::Range<usize> {
    (if opts.inject_nsn { 1 } else { 0 })..opts.n_samples
}

/// Serial oracle run.
pub fn oracle_compare(model: &PlanarModel, s0: State, budget: f64, opts: &OracleOptions) -> Result<OracleReport> {
    if opts.n_samples == 0 || opts.n_pieces == 0 {
        return Err(Error::InvalidArgument("oracle needs at least one sample and one piece"));
    }
    let nsn = simulate_nsn(model, s0, budget, &opts.sim)?;
    let horizon = opts.horizon.unwrap_or_else(|| oracle_horizon(&nsn));
    let tol = opts.sim.tol;
    let mut outcomes = Vec::with_capacity(opts.n_samples);
    if opts.inject_nsn {
        outcomes.push((0, nsn_replay(model, &nsn, tol)));
    }
    for i in random_indices(opts) {
        outcomes.push((i, oracle_sample(model, s0, budget, horizon, opts.n_pieces, opts.seed, i, tol)));
    }
    Ok(assemble_oracle(&nsn, opts, horizon, outcomes))
}
