use peakctl_core::integrate::{integrate, null_policy, EventKind, EventSpec, Tolerances};
use peakctl_core::models::{builtin, Params, PlanarModel, State};
use peakctl_core::nsn::{simulate_nsn, SimOptions};
use peakctl_core::synthesis::{budget_at, solve_ystar, solve_ystar_with, uncontrolled_arc, SynthesisOptions};
use peakctl_core::verify::{
    check_assumption2, check_assumption3, check_assumption4, check_hypotheses5, default_box, GridSpec, Status,
};
use proptest::prelude::*;

fn params(pairs: &[(&str, f64)]) -> Params {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

fn model(i: usize) -> PlanarModel {
    match i {
        0 => builtin("example1", &Params::new()),
        1 => builtin("sir", &params(&[("beta", 0.5), ("alpha", 0.1)])),
        2 => builtin("monod", &params(&[("m", 0.2), ("Y", 1.0)])),
        _ => builtin("contois", &params(&[("m", 0.2), ("Y", 1.0)])),
    }
    .unwrap()
}

/// Maps a point of the unit square into the model's default box.
fn point(m: &PlanarModel, u: f64, v: f64) -> State {
    let b = default_box(m);
    State::new(b.x_min + u * (b.x_max - b.x_min), b.y_min + v * (b.y_max - b.y_min))
}

/// A start in `D₊` with a positive budget curve, if the sample lands there.
fn d_plus_start(m: &PlanarModel, u: f64, v: f64) -> Option<State> {
    let s = point(m, u, v);
    (m.contains(s) && m.f2(s.x, s.y) > 1e-3).then_some(s)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kolmogorov_fields_agree(i in 1usize..4, u in 0.01f64..0.99, v in 0.01f64..0.99) {
        let m = model(i);
        let k = m.kolmogorov().expect("kolmogorov builtin");
        let s = point(&m, u, v);
        prop_assume!(m.contains(s));
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + a.abs());
        prop_assert!(close(m.f1(s.x, s.y), -k.phi(1, s.x, s.y) * s.x));
        prop_assert!(close(m.g1(s.x, s.y), k.phi(2, s.x, s.y) * s.x));
        prop_assert!(close(m.f2(s.x, s.y), k.phi(3, s.x, s.y) * s.y));
        prop_assert!(close(m.g2(s.x, s.y), -k.phi(4, s.x, s.y) * s.y));
    }

    #[test]
    fn delta_is_negative_on_d_plus(i in 0usize..4, u in 0.0f64..1.0, v in 0.0f64..1.0) {
        let m = model(i);
        let s = point(&m, u, v);
        prop_assume!(m.contains(s) && m.f2(s.x, s.y) > 0.0);
        prop_assert!(m.delta_unchecked(s.x, s.y) < 0.0);
    }

    #[test]
    fn null_flow_never_enters_d_plus(i in 0usize..4, u in 0.0f64..1.0, v in 0.0f64..1.0) {
        let m = model(i);
        let s = point(&m, u, v);
        prop_assume!(m.contains(s) && m.f2(s.x, s.y) <= 0.0);
        let tr = integrate(&m, &null_policy, s, 20.0, &[EventSpec::left_domain()], Tolerances::default()).unwrap();
        for p in &tr.samples {
            prop_assert!(m.f2(p.x, p.y) <= 1e-8);
        }
    }

    #[test]
    fn uncontrolled_arc_stops_on_the_switching_curve(i in 0usize..4, u in 0.0f64..1.0, v in 0.0f64..1.0) {
        let m = model(i);
        let s = d_plus_start(&m, u, v);
        prop_assume!(s.is_some());
        let arc = uncontrolled_arc(&m, s.unwrap(), &SynthesisOptions::default()).unwrap();
        let end = arc.arc.last().unwrap();
        prop_assert_eq!(arc.arc.terminal_event().map(|e| e.kind), Some(EventKind::HitD0));
        prop_assert!(m.f2(end.x, end.y).abs() < 1e-9 * (1.0 + end.y.abs()));
        prop_assert!(arc.arc.samples.iter().all(|p| p.y <= arc.y0max + 1e-12));
    }

    #[test]
    fn halving_tolerances_keeps_the_level(i in 0usize..4, u in 0.0f64..1.0, v in 0.0f64..1.0, frac in 0.1f64..0.9) {
        let m = model(i);
        let s = d_plus_start(&m, u, v);
        prop_assume!(s.is_some());
        let s = s.unwrap();
        let l0 = solve_ystar(&m, s, 0.0).unwrap().l_at_y0.unwrap();
        prop_assume!(l0 > 1e-6);
        let coarse = SynthesisOptions { tol: Tolerances::new(1e-9, 1e-11), ..Default::default() };
        let fine = SynthesisOptions { tol: Tolerances::new(5e-10, 5e-12), ..Default::default() };
        let a = solve_ystar_with(&m, s, frac * l0, &coarse).unwrap();
        let b = solve_ystar_with(&m, s, frac * l0, &fine).unwrap();
        prop_assert!((a.ystar - b.ystar).abs() < 1e-7 * (1.0 + a.ystar.abs()));
    }

    #[test]
    fn budget_curve_decreases(i in 0usize..4, u in 0.0f64..1.0, v in 0.0f64..1.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let m = model(i);
        let s = d_plus_start(&m, u, v);
        prop_assume!(s.is_some() && (a - b).abs() > 1e-3);
        let s = s.unwrap();
        let arc = uncontrolled_arc(&m, s, &SynthesisOptions::default()).unwrap();
        let (lo, hi) = (a.min(b), a.max(b));
        let level = |t: f64| s.y + t * (arc.y0max - s.y);
        let (l_lo, l_hi) = (budget_at(&m, &arc, level(lo)).unwrap(), budget_at(&m, &arc, level(hi)).unwrap());
        prop_assert!(l_lo > l_hi);
    }

    #[test]
    fn closed_loop_spends_the_quadrature_budget(i in 0usize..4, u in 0.0f64..1.0, v in 0.0f64..1.0, frac in 0.05f64..0.95) {
        let m = model(i);
        let s = d_plus_start(&m, u, v);
        prop_assume!(s.is_some());
        let s = s.unwrap();
        let l0 = solve_ystar(&m, s, 0.0).unwrap().l_at_y0.unwrap();
        prop_assume!(l0 > 1e-6);
        let r = simulate_nsn(&m, s, frac * l0, &SimOptions::default()).unwrap();
        let arc = r.synthesis.arc.as_ref().unwrap();
        let quad = budget_at(&m, arc, r.ystar()).unwrap();
        prop_assert!((quad - r.spent).abs() < 1e-5);
        prop_assert!((r.peak - r.ystar()).abs() < 1e-6);
    }

    #[test]
    fn hypotheses_imply_the_assumptions(i in 1usize..4, p in 0.05f64..0.9, q in 0.05f64..0.9) {
        let m = match i {
            1 => builtin("sir", &params(&[("beta", 0.5), ("alpha", p * 0.5)])),
            2 => builtin("monod", &params(&[("m", p), ("Y", 0.5 + q)])),
            _ => builtin("contois", &params(&[("m", p), ("Y", 0.5 + q)])),
        }
        .unwrap();
        let grid = GridSpec::new(default_box(&m), 25).unwrap();
        let h5 = check_hypotheses5(&m, &grid).unwrap();
        prop_assume!(h5.verdict() == Status::Pass);
        prop_assert_eq!(check_assumption2(&m, &grid).unwrap().verdict(), Status::Pass);
        prop_assert_eq!(check_assumption3(&m, &grid).unwrap().verdict(), Status::Pass);
        prop_assert_eq!(check_assumption4(&m, &grid).unwrap().verdict(), Status::Pass);
    }
}
