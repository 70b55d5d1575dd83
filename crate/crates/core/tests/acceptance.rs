//! Acceptance suite: one PASS/FAIL line per criterion.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use peakctl_core::integrate::{integrate, null_policy, EventSpec, Tolerances};
use peakctl_core::models::counterexamples::counterexample;
use peakctl_core::models::{builtin, Params, PlanarModel, State};
use peakctl_core::nsn::{simulate_nsn, Phase, SimOptions};
use peakctl_core::synthesis::{budget_at, solve_ystar, solve_ystar_with, uncontrolled_arc, Regime, SynthesisOptions};
use peakctl_core::verify::{
    check_all, check_assumption2, check_assumption3, check_assumption4, default_box, oracle_compare, CheckReport,
    Condition, GridSpec, OracleOptions, Status,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Case {
    model: PlanarModel,
    s0: State,
    budget: f64,
    /// Box `[x_lo, x_hi, y_lo, y_hi]` for random starts in `D₊`.
    starts: [f64; 4],
}

fn params(pairs: &[(&str, f64)]) -> Params {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

fn l_at_start(model: &PlanarModel, s0: State) -> f64 {
    solve_ystar(model, s0, 0.0).unwrap().l_at_y0.unwrap()
}

fn cases() -> Vec<Case> {
    let monod = builtin("monod", &params(&[("m", 0.2), ("Y", 1.0)])).unwrap();
    let contois = builtin("contois", &params(&[("m", 0.2), ("Y", 1.0)])).unwrap();
    let s_monod = State::new(5.0, 0.5);
    let s_contois = State::new(5.0, 0.5);
    let k_monod = 0.5 * l_at_start(&monod, s_monod);
    let k_contois = 0.5 * l_at_start(&contois, s_contois);
    vec![
        Case {
            model: builtin("example1", &Params::new()).unwrap(),
            s0: State::new(2.0, 2.0),
            budget: 0.1,
            starts: [0.2, 3.0, 0.5, 3.0],
        },
        Case {
            model: builtin("sir", &params(&[("beta", 0.5), ("alpha", 0.1)])).unwrap(),
            s0: State::new(0.99, 0.01),
            budget: 0.5,
            starts: [0.3, 0.95, 0.01, 0.6],
        },
        Case { model: monod, s0: s_monod, budget: k_monod, starts: [1.0, 8.0, 0.1, 2.0] },
        Case { model: contois, s0: s_contois, budget: k_contois, starts: [1.0, 8.0, 0.1, 2.0] },
    ]
}

/// Uniform point of `D₊`, or of its complement, inside a box.
fn random_start(rng: &mut ChaCha8Rng, m: &PlanarModel, b: [f64; 4], in_d_plus: bool) -> State {
    loop {
        let s = State::new(rng.gen_range(b[0]..b[1]), rng.gen_range(b[2]..b[3]));
        if m.contains(s) && (m.f2(s.x, s.y) > 0.0) == in_d_plus {
            return s;
        }
    }
}

type Verdict = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Verdict + 'a>);

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn example1_ground_truth() -> Verdict {
    let t = Instant::now();
    let m = builtin("example1", &Params::new()).unwrap();
    let s0 = State::new(2.0, 2.0);
    let y0max = 1.0 / 3.0 + 3f64.ln() + 1.0;
    let r = solve_ystar(&m, s0, 0.1).map_err(|e| e.to_string())?;
    let arc = uncontrolled_arc(&m, s0, &SynthesisOptions::default()).map_err(|e| e.to_string())?;
    let mut worst_l = 0.0f64;
    for i in 0..20 {
        let y = 2.0 + (y0max - 2.0) * i as f64 / 19.0;
        let l = budget_at(&m, &arc, y.min(arc.y0max)).map_err(|e| e.to_string())?;
        worst_l = worst_l.max((l - (y0max / y - 1.0)).abs());
    }
    let e_max = (r.y0max - y0max).abs();
    let e_star = (r.ystar - y0max / 1.1).abs();
    let elapsed = t.elapsed();
    check(
        e_max < 1e-6 && e_star < 1e-6 && worst_l < 1e-8 && elapsed < Duration::from_secs(5),
        format!("|y0max err| {e_max:.1e}, |ystar err| {e_star:.1e}, max |L err| {worst_l:.1e}, {elapsed:.2?}"),
    )
}

fn budget_consistency(cases: &[Case]) -> Verdict {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut worst_spent, mut worst_peak) = (0.0f64, 0.0f64);
    for c in cases {
        let mut done = 0;
        while done < 5 {
            let s0 = random_start(&mut rng, &c.model, c.starts, true);
            let l0 =
                solve_ystar(&c.model, s0, 0.0).map_err(|e| format!("{}: {e}", c.model.name()))?.l_at_y0.unwrap_or(0.0);
            if l0 <= 1e-6 {
                continue;
            }
            let k = rng.gen_range(0.1..0.9) * l0;
            let r = simulate_nsn(&c.model, s0, k, &SimOptions::default()).map_err(|e| e.to_string())?;
            if r.regime() != Regime::Interior {
                return Err(format!("{}: regime {:?}", c.model.name(), r.regime()));
            }
            worst_spent = worst_spent.max((r.spent - k).abs());
            worst_peak = worst_peak.max((r.peak - r.ystar()).abs());
            done += 1;
        }
    }
    let elapsed = t.elapsed();
    check(
        worst_spent < 1e-5 && worst_peak < 1e-6 && elapsed < Duration::from_secs(30),
        format!("max |spent - K| {worst_spent:.1e}, max |peak - ystar| {worst_peak:.1e}, {elapsed:.2?}"),
    )
}

fn monotonicity(cases: &[Case]) -> Verdict {
    let opts = SynthesisOptions { curve_points: 20, ..Default::default() };
    for c in cases {
        let r = solve_ystar_with(&c.model, c.s0, c.budget, &opts).map_err(|e| e.to_string())?;
        let l_dec = r.budget_curve.windows(2).all(|w| w[1][1] < w[0][1]);
        let x_dec = r.xbar_arc.windows(2).all(|w| w[1][1] < w[0][1]);
        if !(l_dec && x_dec && r.budget_curve.len() == 20) {
            return Err(format!("{}: L decreasing {l_dec}, xbar decreasing {x_dec}", c.model.name()));
        }
    }
    Ok("budget curve and xbar strictly decreasing at 20 levels on all builtins".into())
}

fn invariance(cases: &[Case]) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let tol = Tolerances::default();
    let mut worst = f64::NEG_INFINITY;
    for c in cases {
        let b = default_box(&c.model);
        for _ in 0..50 {
            let s0 = random_start(&mut rng, &c.model, [b.x_min, b.x_max, b.y_min, b.y_max], false);
            let tr = integrate(&c.model, &null_policy, s0, 50.0, &[EventSpec::left_domain()], tol)
                .map_err(|e| format!("{} from {s0:?}: {e}", c.model.name()))?;
            let top = tr.samples.iter().map(|s| c.model.f2(s.x, s.y)).fold(f64::NEG_INFINITY, f64::max);
            worst = worst.max(top);
            if top > 1e-8 {
                return Err(format!("{} from {s0:?}: f2 reached {top:.3e}", c.model.name()));
            }
        }
        for _ in 0..50 {
            let s0 = random_start(&mut rng, &c.model, c.starts, true);
            uncontrolled_arc(&c.model, s0, &SynthesisOptions::default())
                .map_err(|e| format!("{} from {s0:?}: {e}", c.model.name()))?;
        }
    }
    Ok(format!("max f2 outside D+ {worst:.1e}; every D+ start reached D0"))
}

fn targeted_failure(model: &PlanarModel, report: &CheckReport, c: Condition) -> Result<(), String> {
    let r = report.condition(c).ok_or_else(|| format!("{}: {c:?} missing", model.name()))?;
    if r.status == Status::Fail && report.reevaluate(model, r) {
        Ok(())
    } else {
        Err(format!("{}: {c:?} did not fail with a reproducible witness", model.name()))
    }
}

fn condition_suite(cases: &[Case]) -> Verdict {
    let mut notes = vec!["builtins pass on 200x200 grids, counterexamples fail with witnesses".to_string()];
    for c in cases {
        let grid = GridSpec::new(default_box(&c.model), 200).unwrap();
        let suite = check_all(&c.model, &grid, grid.bbox.y_max);
        if suite.verdict() != Status::Pass {
            let bad: Vec<String> = suite
                .reports
                .iter()
                .flat_map(|r| {
                    r.conditions
                        .iter()
                        .filter(|x| x.status != Status::Pass)
                        .map(move |x| format!("{}:{:?}", r.check, x.condition))
                })
                .chain(suite.errors.iter().map(|e| format!("{}: {}", e.check, e.message)))
                .collect();
            return Err(format!("{} does not pass: {bad:?}", c.model.name()));
        }
        if !suite.not_applicable.is_empty() {
            notes.push(format!("{} has no Kolmogorov form", c.model.name()));
        }
    }
    for (name, cond) in [
        ("g2_zero", Condition::F2PlusG2Negative),
        ("flat_ratio", Condition::RatioIncreasingY),
        ("phi4_degenerate", Condition::G2NegativeOnD0),
    ] {
        let m = counterexample(name).unwrap();
        let grid = GridSpec::new(default_box(&m), 200).unwrap();
        let report = match cond {
            Condition::F2PlusG2Negative => check_assumption2(&m, &grid),
            Condition::RatioIncreasingY => check_assumption3(&m, &grid),
            _ => check_assumption4(&m, &grid),
        }
        .map_err(|e| e.to_string())?;
        targeted_failure(&m, &report, cond)?;
        if check_all(&m, &grid, grid.bbox.y_max).verdict() != Status::Fail {
            return Err(format!("{name}: suite verdict is not fail"));
        }
    }
    Ok(notes.join("; "))
}

fn oracle_dominance(cases: &[Case]) -> Verdict {
    let mut lines = Vec::new();
    let mut ok = true;
    for c in cases {
        let t = Instant::now();
        let r = oracle_compare(&c.model, c.s0, c.budget, &OracleOptions::default()).map_err(|e| e.to_string())?;
        let elapsed = t.elapsed();
        let best_random = r.best_random_peak.unwrap_or(f64::INFINITY);
        let replay = r.nsn_replay_peak.unwrap_or(f64::NAN);
        let pass =
            best_random >= r.ystar - 1e-3 && (replay - r.ystar).abs() <= 1e-6 && elapsed < Duration::from_secs(120);
        ok &= pass;
        lines.push(format!(
            "{}: best random - ystar {:+.2e}, replay - ystar {:+.1e}, {} failed, {elapsed:.1?}",
            c.model.name(),
            best_random - r.ystar,
            replay - r.ystar,
            r.failed.len()
        ));
    }
    check(ok, lines.join("; "))
}

fn tangential_exit(cases: &[Case]) -> Verdict {
    let mut worst = 0.0f64;
    for c in cases {
        let r = simulate_nsn(&c.model, c.s0, c.budget, &SimOptions::default()).map_err(|e| e.to_string())?;
        let p = *r.phase(Phase::Singular);
        if p.is_empty() {
            return Err(format!("{}: no singular phase", c.model.name()));
        }
        let start = (p.t_end - 1e-3).max(p.t_start);
        let width = (p.t_end - start) * (1.0 - 1e-9);
        let us: Vec<f64> = (0..=20).map(|i| r.control_at(&c.model, start + width * i as f64 / 20.0)).collect();
        let last = *us.last().unwrap();
        worst = worst.max(last);
        if !(last < 1e-2 && us.windows(2).all(|w| w[1] < w[0])) {
            return Err(format!("{}: exit control {last:.2e}, window {us:?}", c.model.name()));
        }
    }
    Ok(format!("max control at exit {worst:.1e}, decreasing over the last 1e-3"))
}

fn sir_scenario() -> Verdict {
    let (beta, alpha) = (0.5, 0.1);
    let m = builtin("sir", &params(&[("beta", beta), ("alpha", alpha)])).unwrap();
    let s0 = State::new(0.99, 0.01);
    let rho = alpha / beta;
    let predicted = s0.x + s0.y - rho * (1.0 + (s0.x / rho).ln());
    let arc = uncontrolled_arc(&m, s0, &SynthesisOptions::default()).map_err(|e| e.to_string())?;
    let r = simulate_nsn(&m, s0, 0.5, &SimOptions::default()).map_err(|e| e.to_string())?;
    let err = (arc.y0max - predicted).abs();
    check(
        err < 1e-5 && (predicted - 0.480122).abs() < 1e-6 && r.peak < arc.y0max,
        format!("uncontrolled peak {:.9} (predicted {predicted:.9}), NSN peak {:.9}", arc.y0max, r.peak),
    )
}

fn main() -> ExitCode {
    let cases = cases();
    let criteria: Vec<Criterion<'_>> = vec![
        ("example1 ground truth", Box::new(example1_ground_truth)),
        ("budget consistency", Box::new(|| budget_consistency(&cases))),
        ("monotonicity", Box::new(|| monotonicity(&cases))),
        ("invariance", Box::new(|| invariance(&cases))),
        ("condition suite", Box::new(|| condition_suite(&cases))),
        ("oracle dominance", Box::new(|| oracle_dominance(&cases))),
        ("tangential exit", Box::new(|| tangential_exit(&cases))),
        ("SIR scenario", Box::new(sir_scenario)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (tag, detail) = match run() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {} [{tag}] {name} ({:.2?}): {detail}", i + 1, t.elapsed());
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
