//! The subcommands. Each returns what it would print and the files it
//! would write, so the CLI layer only does IO.

use peakctl_core::integrate::{self, event_f2_zero, null_policy, EventKind, EventRecord, EventSpec};
use peakctl_core::nsn::{Phase, PhaseSpan};
use peakctl_core::synthesis::{solve_ystar_with, SynthesisOptions};
use peakctl_core::verify::{
    assemble_oracle, check_all, nsn_replay, oracle_horizon, oracle_sample, random_indices, OracleReport, Status,
    SuiteReport,
};
use peakctl_core::{simulate_nsn, Regime, SynthesisReport, Trajectory};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::output::{csv_table, envelope_json};
use crate::{CliError, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_NUMERICAL, EXIT_OK};

pub struct Artifact {
    pub file_name: &'static str,
    pub contents: String,
}

pub struct Outcome {
    pub stdout: String,
    pub artifacts: Vec<Artifact>,
    pub exit_code: i32,
}

fn synthesis_options(cfg: &RunConfig) -> SynthesisOptions {
    SynthesisOptions { horizon: cfg.horizon, ..SynthesisOptions::default() }
}

#[derive(Serialize)]
struct CurveRow {
    ybar: f64,
    budget: f64,
    xbar: f64,
}

pub fn synthesize(cfg: &RunConfig) -> Result<(SynthesisReport, Outcome), CliError> {
    let model = cfg.build_model()?;
    let report = solve_ystar_with(&model, cfg.start(), cfg.budget, &synthesis_options(cfg))?;
    let rows: Vec<CurveRow> = report
        .budget_curve
        .iter()
        .zip(&report.xbar_arc)
        .map(|(l, x)| CurveRow { ybar: l[0], budget: l[1], xbar: x[1] })
        .collect();
    let json = envelope_json("synthesize", cfg, &report)?;
    let outcome = Outcome {
        stdout: json.clone(),
        artifacts: vec![
            Artifact { file_name: "synthesis.json", contents: json },
            Artifact { file_name: "budget_curve.csv", contents: csv_table(cfg, &rows)? },
        ],
        exit_code: EXIT_OK,
    };
    Ok((report, outcome))
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationReport {
    pub mode: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regime: Option<Regime>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ystar: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y0max: Option<f64>,
    pub peak: f64,
    pub spent: f64,
    pub end_time: f64,
    pub phases: Vec<PhaseSpan>,
    pub safety_exit: bool,
    pub horizon_terminal: bool,
    pub reentry: bool,
    pub events: Vec<EventRecord>,
}

#[derive(Serialize)]
struct TrajectoryRow {
    t: f64,
    x: f64,
    y: f64,
    u: f64,
    spent: f64,
    phase: &'static str,
}

fn phase_name(phases: &[PhaseSpan], t: f64) -> &'static str {
    match phases.iter().rev().find(|p| !p.is_empty() && t >= p.t_start).map(|p| p.phase) {
        Some(Phase::Null1) => "null1",
        Some(Phase::Singular) => "singular",
        Some(Phase::Null2) | None => "null2",
    }
}

/// `u ≡ 0` from the start until the switching curve, then as long again.
fn uncontrolled_run(cfg: &RunConfig) -> Result<(Trajectory, SimulationReport), CliError> {
    let model = cfg.build_model()?;
    let s0 = cfg.start();
    let tol = cfg.tol;
    let mut traj = integrate::integrate(&model, &null_policy, s0, cfg.horizon, &[event_f2_zero(&model)], tol)?;
    let t_h = traj.end_time();
    let hit = traj.terminal_event().map(|e| e.kind) == Some(EventKind::HitD0);
    let y0max = hit.then(|| traj.peak());
    let t_end = if hit && t_h > 0.0 { (2.0 * t_h).min(cfg.horizon) } else { cfg.horizon.min(10.0) };
    if t_end > t_h {
        let last = *traj.last().expect("non-empty trajectory");
        let tail = integrate::integrate_from(
            &model,
            &null_policy,
            t_h,
            [last.x, last.y, 0.0],
            t_end,
            &[EventSpec::left_domain()],
            tol,
        )?;
        traj.append(tail);
    }
    let end = traj.end_time();
    let report = SimulationReport {
        mode: "uncontrolled",
        regime: None,
        ystar: None,
        y0max,
        peak: traj.peak(),
        spent: 0.0,
        end_time: end,
        phases: vec![PhaseSpan { phase: Phase::Null2, t_start: 0.0, t_end: end }],
        safety_exit: false,
        horizon_terminal: !hit,
        reentry: false,
        events: traj.events.clone(),
    };
    Ok((traj, report))
}

pub fn simulate(cfg: &RunConfig) -> Result<(SimulationReport, Outcome), CliError> {
    let (traj, report) = if cfg.uncontrolled {
        uncontrolled_run(cfg)?
    } else {
        let model = cfg.build_model()?;
        let r = simulate_nsn(&model, cfg.start(), cfg.budget, &cfg.sim_options())?;
        let report = SimulationReport {
            mode: "nsn",
            regime: Some(r.regime()),
            ystar: Some(r.ystar()),
            y0max: Some(r.synthesis.y0max),
            peak: r.peak,
            spent: r.spent,
            end_time: r.trajectory.end_time(),
            phases: r.phases.clone(),
            safety_exit: r.safety_exit,
            horizon_terminal: r.horizon_terminal,
            reentry: r.reentry,
            events: r.trajectory.events.clone(),
        };
        (r.trajectory, report)
    };
    let rows: Vec<TrajectoryRow> = traj
        .samples
        .iter()
        .map(|s| TrajectoryRow {
            t: s.t,
            x: s.x,
            y: s.y,
            u: s.u,
            spent: s.spent,
            phase: phase_name(&report.phases, s.t),
        })
        .collect();
    let json = envelope_json("simulate", cfg, &report)?;
    let outcome = Outcome {
        stdout: json.clone(),
        artifacts: vec![
            Artifact { file_name: "simulation.json", contents: json },
            Artifact { file_name: "trajectory.csv", contents: csv_table(cfg, &rows)? },
        ],
        exit_code: EXIT_OK,
    };
    Ok((report, outcome))
}

pub fn check(cfg: &RunConfig) -> Result<(SuiteReport, Outcome), CliError> {
    let model = cfg.build_model()?;
    let grid = cfg.grid_spec(&model)?;
    let ycap = cfg.grid.ycap.unwrap_or(grid.bbox.y_max);
    let suite = check_all(&model, &grid, ycap);
    let exit_code = if suite.verdict() == Status::Fail {
        EXIT_FAIL
    } else if suite.numerical_failure() {
        EXIT_NUMERICAL
    } else if suite.verdict() == Status::Skipped {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    };
    let json = envelope_json("check", cfg, &suite)?;
    let outcome = Outcome {
        stdout: json.clone(),
        artifacts: vec![Artifact { file_name: "check.json", contents: json }],
        exit_code,
    };
    Ok((suite, outcome))
}

/// Oracle run with the random samples spread over the rayon pool. Each
/// sample has its own RNG stream, so the report matches a serial run.
pub fn oracle_report(cfg: &RunConfig) -> Result<OracleReport, CliError> {
    let opts = cfg.oracle_options();
    if opts.n_samples == 0 || opts.n_pieces == 0 {
        return Err(CliError::Usage("oracle needs at least one sample and one piece".into()));
    }
    let model = cfg.build_model()?;
    let s0 = cfg.start();
    let nsn = simulate_nsn(&model, s0, cfg.budget, &opts.sim)?;
    let horizon = opts.horizon.unwrap_or_else(|| oracle_horizon(&nsn));
    let tol = opts.sim.tol;
    let mut outcomes = vec![(0, nsn_replay(&model, &nsn, tol))];
    outcomes.par_extend(
        random_indices(&opts)
            .into_par_iter()
            .map(|i| (i, oracle_sample(&model, s0, cfg.budget, horizon, opts.n_pieces, opts.seed, i, tol))),
    );
    Ok(assemble_oracle(&nsn, &opts, horizon, outcomes))
}

pub fn oracle(cfg: &RunConfig) -> Result<(OracleReport, Outcome), CliError> {
    let report = oracle_report(cfg)?;
    let json = envelope_json("oracle", cfg, &report)?;
    let outcome = Outcome {
        stdout: json.clone(),
        artifacts: vec![Artifact { file_name: "oracle.json", contents: json }],
        exit_code: EXIT_OK,
    };
    Ok((report, outcome))
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub axis: String,
    pub value: f64,
    pub ystar: f64,
    pub spent: f64,
    pub peak: f64,
    pub regime: String,
    pub error: String,
}

pub fn sweep(cfg: &RunConfig, axis: &str, values: &[f64]) -> Result<(Vec<SweepRow>, Outcome), CliError> {
    if values.is_empty() {
        return Err(CliError::Usage("sweep needs at least one value".into()));
    }
    let by_budget = matches!(axis, "budget" | "K");
    if !by_budget && !cfg.params.contains_key(axis) {
        return Err(CliError::Usage(format!("cannot sweep {axis:?}: not the budget or a parameter of {}", cfg.model)));
    }
    let rows: Vec<SweepRow> = values
        .par_iter()
        .map(|&v| {
            let mut c = cfg.clone();
            if by_budget {
                c.budget = v;
            } else {
                c.params.insert(axis.to_string(), v);
            }
            let run = c.build_model().and_then(|m| Ok(simulate_nsn(&m, c.start(), c.budget, &c.sim_options())?));
            match run {
                Ok(r) => SweepRow {
                    axis: axis.to_string(),
                    value: v,
                    ystar: r.ystar(),
                    spent: r.spent,
                    peak: r.peak,
                    regime: serde_json::to_value(r.regime())
                        .ok()
                        .and_then(|x| x.as_str().map(String::from))
                        .unwrap_or_default(),
                    error: String::new(),
                },
                Err(e) => SweepRow {
                    axis: axis.to_string(),
                    value: v,
                    ystar: f64::NAN,
                    spent: f64::NAN,
                    peak: f64::NAN,
                    regime: String::new(),
                    error: e.to_string(),
                },
            }
        })
        .collect();
    let table = csv_table(cfg, &rows)?;
    let exit_code = if rows.iter().any(|r| !r.error.is_empty()) { EXIT_NUMERICAL } else { EXIT_OK };
    let outcome = Outcome {
        stdout: table.clone(),
        artifacts: vec![Artifact { file_name: "sweep.csv", contents: table }],
        exit_code,
    };
    Ok((rows, outcome))
}
