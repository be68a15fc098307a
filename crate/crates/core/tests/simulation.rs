mod common;

use serde_json::{json, Value};

use setdecomp::architecture::Architecture;
use setdecomp::simulation::{
    build_ode, envelope_over_points, integrate, raw_envelope_over_box, DesignPoint, SamplingPlan,
    SimConfig,
};
use setdecomp::Error;

fn range(lo: f64, hi: f64) -> Value {
    json!({"lo": lo, "hi": hi, "unit": ""})
}

/// One integrator `s(0) = y0`, `ṡ = rate`, output `y`.
fn single_state(rate: Value) -> Architecture {
    let a = json!({
        "name": "toy",
        "top": {"name": "toy", "inputs": {"y0": range(0.0, 2.0)}, "outputs": {"y": range(-1e9, 1e9)}},
        "subfunctions": [{
            "id": "f1", "kind": "integrator", "state": "s", "rate": rate, "initial": "y0",
            "inputs": {"y0": range(0.0, 2.0)}, "outputs": {"y": range(-1e9, 1e9)}
        }]
    });
    Architecture::from_json(&a.to_string()).unwrap()
}

fn point(entries: &[(&str, f64)]) -> DesignPoint {
    entries.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

#[test]
fn exponential_decay_matches_closed_form() {
    let arch = single_state(json!(["-", "s"]));
    let sys = build_ode(&arch, &point(&[("y0", 1.5)])).unwrap();
    let traj = integrate(&sys, SimConfig { horizon: 5.0, step: 0.01 }).unwrap();
    assert_eq!(traj.times.len(), 501);
    for (t, y) in traj.times.iter().zip(traj.series("y").unwrap()) {
        let exact = 1.5 * (-t).exp();
        assert!((y - exact).abs() < 1e-9, "t={t}: {y} vs {exact}");
    }
}

#[test]
fn constant_dynamics_keep_initial_range() {
    let arch = single_state(json!(0.0));
    let design_box = common::rm(&[("y0", 0.5, 1.75)]);
    let env = raw_envelope_over_box(
        &arch,
        &design_box,
        SimConfig { horizon: 3.0, step: 0.1 },
        &SamplingPlan::default(),
    )
    .unwrap();
    let b = env.get("y").unwrap();
    assert_eq!((b.lo, b.hi), (0.5, 1.75));
    assert_eq!(env.samples, 3);
}

#[test]
fn step_is_shrunk_to_divide_horizon() {
    let cfg = SimConfig { horizon: 1.0, step: 0.3 };
    assert_eq!(cfg.steps().unwrap(), 4);
    let arch = single_state(json!(1.0));
    let traj = integrate(&build_ode(&arch, &point(&[("y0", 0.0)])).unwrap(), cfg).unwrap();
    assert_eq!(traj.times.last().copied(), Some(1.0));
    assert!((traj.series("y").unwrap()[4] - 1.0).abs() < 1e-12);
}

fn nominal(arch: &Architecture) -> DesignPoint {
    arch.nominal.clone().into_iter().collect()
}

fn settles(times: &[f64], v: &[f64]) -> Option<f64> {
    // last time v was outside [33, 37]
    let last_out = times
        .iter()
        .zip(v)
        .filter(|(_, v)| !(33.0..=37.0).contains(*v))
        .map(|(t, _)| *t)
        .fold(f64::NEG_INFINITY, f64::max);
    (last_out < 20.0).then_some(last_out)
}

#[test]
fn cruise_nominal_settles_like_fine_step_reference() {
    let arch = common::cruise();
    let sys = build_ode(&arch, &nominal(&arch)).unwrap();
    let coarse = integrate(&sys, SimConfig::default()).unwrap();
    let fine = integrate(&sys, SimConfig { horizon: 100.0, step: 1e-4 }).unwrap();
    let (c, f) = (coarse.series("v").unwrap(), fine.series("v").unwrap());
    assert!(settles(&fine.times, f).is_some(), "reference leaves [33, 37] after t=20");
    assert!(settles(&coarse.times, c).is_some(), "default step leaves [33, 37] after t=20");
    // saturation switches are not located, so agreement is first order there
    let worst = c
        .iter()
        .enumerate()
        .map(|(i, v)| (v - f[100 * i]).abs())
        .fold(0.0, f64::max);
    assert!(worst < 5e-3, "max deviation {worst}");
}

#[test]
fn halving_the_step_barely_moves_the_terminal_state() {
    let arch = common::cruise();
    let sys = build_ode(&arch, &nominal(&arch)).unwrap();
    let a = integrate(&sys, SimConfig { horizon: 100.0, step: 0.01 }).unwrap().terminal_state;
    let b = integrate(&sys, SimConfig { horizon: 100.0, step: 0.005 }).unwrap().terminal_state;
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() <= 1e-6 * y.abs().max(1.0), "{x} vs {y}");
    }
}

#[test]
fn zero_forces_keep_speed_constant() {
    let mut doc: Value = serde_json::from_str(
        &std::fs::read_to_string(common::data("cruise.json")).unwrap(),
    )
    .unwrap();
    for sf in doc["subfunctions"].as_array_mut().unwrap() {
        let out = sf["outputs"].as_object().unwrap().keys().next().unwrap().clone();
        if out == "Fa" || out == "Fr" {
            sf["expr"] = json!(0.0);
        }
        if out == "u" {
            sf["saturation"] = json!({"lo": 0.0, "hi": 0.0});
        }
    }
    let arch = Architecture::from_json(&doc.to_string()).unwrap();
    let traj = integrate(&build_ode(&arch, &nominal(&arch)).unwrap(), SimConfig::default()).unwrap();
    assert!(traj.series("u").unwrap().iter().all(|u| *u == 0.0));
    let v0 = arch.nominal["v_0"];
    assert!(traj.series("v").unwrap().iter().all(|v| (v - v0).abs() < 1e-12));
}

#[test]
fn unit_decay_at_fine_step() {
    let arch = single_state(json!(["-", "s"]));
    let traj = integrate(
        &build_ode(&arch, &point(&[("y0", 1.0)])).unwrap(),
        SimConfig { horizon: 1.0, step: 0.001 },
    )
    .unwrap();
    let y1 = *traj.series("y").unwrap().last().unwrap();
    assert!((y1 - (-1.0f64).exp()).abs() < 1e-6);
}

#[test]
fn envelope_is_monotone_in_box_and_density() {
    let arch = common::cruise();
    let cfg = SimConfig { horizon: 30.0, step: 0.05 };
    let inner = common::rm(&[("m", 1000.0, 1050.0), ("omega_m", 400.0, 440.0), ("v_0", 25.0, 28.0), ("v_r", 34.5, 35.5)]);
    let outer = common::rm(&[("m", 990.0, 1100.0), ("omega_m", 350.0, 480.0), ("v_0", 23.0, 30.0), ("v_r", 34.0, 36.0)]);
    // same sampling pattern on both boxes: corners only
    let corners = SamplingPlan { grid: 0, ..SamplingPlan::coarse(0.0) };
    let corners_only = |b| {
        let pts: Vec<DesignPoint> = corners.points(b).into_iter().take(16).collect();
        envelope_over_points(&arch, &pts, cfg).unwrap()
    };
    let (ei, eo) = (corners_only(&inner), corners_only(&outer));
    let sparse = raw_envelope_over_box(&arch, &outer, cfg, &SamplingPlan::coarse(0.0)).unwrap();
    let dense = raw_envelope_over_box(&arch, &outer, cfg, &SamplingPlan::default()).unwrap();
    for (var, b) in &dense.ranges {
        let s = sparse.get(var).unwrap();
        assert!(b.contains_bounds(&s), "{var}: denser sampling shrank {s} to {b}");
    }
    // box monotonicity holds for v, which is monotone in the corner inputs here
    let (vi, vo) = (ei.get("v").unwrap(), eo.get("v").unwrap());
    assert!(vo.contains_bounds(&vi), "{vi} not within {vo}");
}

#[test]
fn blow_up_is_reported_as_non_finite() {
    let arch = single_state(json!(["pow", "s", 2]));
    let sys = build_ode(&arch, &point(&[("y0", 1.0)])).unwrap();
    match integrate(&sys, SimConfig { horizon: 5.0, step: 0.01 }) {
        Err(Error::NonFinite { t, .. }) => assert!(t > 0.9 && t <= 5.0, "t={t}"),
        other => panic!("expected NonFinite, got {other:?}"),
    }
}

#[test]
fn algebraic_loop_is_rejected() {
    let a = json!({
        "top": {"name": "loop", "inputs": {"x": range(0.0, 1.0)}, "outputs": {"a": range(-9.0, 9.0)}},
        "subfunctions": [
            {"id": "f1", "kind": "algebraic", "expr": ["+", "b", "x"],
             "inputs": {"b": range(-9.0, 9.0), "x": range(0.0, 1.0)}, "outputs": {"a": range(-9.0, 9.0)}},
            {"id": "f2", "kind": "algebraic", "expr": "a",
             "inputs": {"a": range(-9.0, 9.0)}, "outputs": {"b": range(-9.0, 9.0)}}
        ]
    });
    let arch = Architecture::from_json(&a.to_string()).unwrap();
    match build_ode(&arch, &point(&[("x", 0.5)])) {
        Err(Error::AlgebraicCycle(ids)) => assert_eq!(ids, vec!["f1", "f2"]),
        other => panic!("expected AlgebraicCycle, got {other:?}"),
    }
}

#[test]
fn division_by_zero_is_caught_before_integration() {
    let a = json!({
        "top": {"name": "div", "inputs": {"x": range(-1.0, 1.0)}, "outputs": {"y": range(-9.0, 9.0)}},
        "subfunctions": [
            {"id": "f1", "kind": "algebraic", "expr": ["/", 1, "x"],
             "inputs": {"x": range(-1.0, 1.0)}, "outputs": {"y": range(-9.0, 9.0)}}
        ]
    });
    let arch = Architecture::from_json(&a.to_string()).unwrap();
    assert!(matches!(
        build_ode(&arch, &point(&[("x", 0.0)])),
        Err(Error::DivisionByZero(_))
    ));
    assert!(build_ode(&arch, &point(&[("x", 0.5)])).is_ok());
}

#[test]
fn failing_sample_is_identified() {
    let arch = single_state(json!(["pow", "s", 2]));
    let points = vec![point(&[("y0", -1.0)]), point(&[("y0", 1.0)])];
    match envelope_over_points(&arch, &points, SimConfig { horizon: 5.0, step: 0.01 }) {
        Err(Error::Sample { sample, source }) => {
            assert_eq!(sample, 1);
            assert!(matches!(*source, Error::NonFinite { .. }));
        }
        other => panic!("expected Sample, got {other:?}"),
    }
}

#[test]
fn sampling_plan_counts() {
    let two = common::rm(&[("a", 0.0, 1.0), ("b", 0.0, 1.0)]);
    // corners are part of the 3x3 grid
    assert_eq!(SamplingPlan::default().points(&two).len(), 9);
    assert_eq!(SamplingPlan::coarse(0.0).points(&two).len(), 5);
    let three = common::rm(&[("a", 0.0, 1.0), ("b", 0.0, 1.0), ("c", 0.0, 1.0)]);
    let capped = SamplingPlan { cap: 5, ..SamplingPlan::default() };
    let pts = capped.points(&three);
    assert_eq!(pts.len(), 5);
    assert!(pts.iter().all(|p| p.values().all(|v| (0.0..=1.0).contains(v))));
    // a degenerate axis contributes a single value
    let flat = common::rm(&[("a", 0.0, 1.0), ("b", 2.0, 2.0)]);
    assert_eq!(SamplingPlan::default().points(&flat).len(), 3);
}

#[test]
fn envelope_merge_is_associative_and_padding_widens() {
    let arch = single_state(json!(["-", "s"]));
    let cfg = SimConfig { horizon: 2.0, step: 0.05 };
    let e: Vec<_> = [0.3, 1.1, 1.9]
        .iter()
        .map(|y0| envelope_over_points(&arch, &[point(&[("y0", *y0)])], cfg).unwrap())
        .collect();
    let left = e[0].merge(&e[1]).merge(&e[2]);
    let right = e[0].merge(&e[1].merge(&e[2]));
    assert_eq!(left, right);
    assert_eq!(left.samples, 3);
    let b = left.get("y").unwrap();
    assert_eq!(b.hi, 1.9);
    let p = left.padded(0.1).get("y").unwrap();
    assert!((b.lo - p.lo - 0.1 * b.width()).abs() < 1e-12);
    assert!((p.hi - b.hi - 0.1 * b.width()).abs() < 1e-12);
}

#[test]
fn trajectory_csv_layout() {
    let arch = common::cruise();
    let traj = integrate(&build_ode(&arch, &nominal(&arch)).unwrap(), SimConfig { horizon: 1.0, step: 0.1 }).unwrap();
    let mut buf = Vec::new();
    traj.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("time,F,Fa,Fr,T,omega,u,v,v_dot"));
    assert_eq!(lines.count(), 11);
}
