//! Random intervals, range maps and functional requirements.

use proptest::prelude::*;

use setdecomp::intervals::{Interval, RangeMap, VarSet, VarId};
use setdecomp::requirements::FunctionalRequirement;

pub const NAMES: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

pub fn interval() -> impl Strategy<Value = Interval> {
    (-100.0..100.0f64, 0.0..50.0f64).prop_map(|(lo, w)| Interval::unitless(lo, lo + w).unwrap())
}

pub fn range_map() -> impl Strategy<Value = RangeMap> {
    proptest::collection::btree_map(proptest::sample::select(NAMES.to_vec()), interval(), 0..5)
        .prop_map(|m| m.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

/// Range maps over the same keys with overlapping ranges, so merges succeed.
pub fn overlapping_maps(n: usize) -> impl Strategy<Value = Vec<RangeMap>> {
    proptest::collection::btree_set(proptest::sample::select(NAMES.to_vec()), 1..5).prop_flat_map(
        move |keys| {
            let keys: Vec<&str> = keys.into_iter().collect();
            let one = proptest::collection::vec((0.0..10.0f64, 0.0..10.0f64), keys.len()).prop_map(
                move |ws| {
                    keys.iter()
                        .zip(ws)
                        // every range contains [0, 0]... [-l, h] around zero
                        .map(|(k, (l, h))| (k.to_string(), Interval::unitless(-l, h).unwrap()))
                        .collect::<RangeMap>()
                },
            );
            proptest::collection::vec(one, n)
        },
    )
}

pub fn var_set() -> impl Strategy<Value = VarSet> {
    proptest::collection::btree_set(proptest::sample::select(NAMES.to_vec()), 0..6)
        .prop_map(|s| s.into_iter().map(|n| VarId::new(n, "")).collect())
}

/// A requirement with inputs `x*` and outputs `y*`.
pub fn requirement() -> impl Strategy<Value = FunctionalRequirement> {
    (
        proptest::collection::vec(interval(), 1..4),
        proptest::collection::vec(interval(), 1..4),
    )
        .prop_map(|(xs, ys)| {
            let inputs = xs.into_iter().enumerate().map(|(i, r)| (format!("x{i}"), r)).collect();
            let outputs = ys.into_iter().enumerate().map(|(i, r)| (format!("y{i}"), r)).collect();
            FunctionalRequirement::new("fr", inputs, RangeMap::new(), RangeMap::new(), outputs)
                .unwrap()
        })
}

/// Fractions used to perturb a requirement, one triple per variable slot.
pub fn perturbation() -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    proptest::collection::vec((0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64), 16)
}

/// Inputs widened and outputs narrowed by the given fractions.
pub fn refine(fr: &FunctionalRequirement, p: &[(f64, f64, f64)]) -> FunctionalRequirement {
    let mut k = 0;
    let mut next = || {
        let v = p[k % p.len()];
        k += 1;
        v
    };
    let inputs = fr
        .inputs
        .iter()
        .map(|(n, r)| {
            let (a, b, _) = next();
            (n.to_string(), r.with_bounds(r.lo() - 5.0 * a, r.hi() + 5.0 * b).unwrap())
        })
        .collect();
    let outputs = fr
        .outputs
        .iter()
        .map(|(n, r)| {
            let (a, b, _) = next();
            // keep lo' ≤ hi' by splitting the width
            let lo = r.lo() + 0.5 * a * r.width();
            let hi = r.hi() - 0.5 * b * r.width();
            (n.to_string(), r.with_bounds(lo, hi.max(lo)).unwrap())
        })
        .collect();
    FunctionalRequirement {
        name: fr.name.clone(),
        inputs,
        outputs,
        uncontrollables: fr.uncontrollables.clone(),
        controllables: fr.controllables.clone(),
        windows: fr.windows.clone(),
    }
}

/// Ranges moved arbitrarily, so the result may or may not refine `fr`.
pub fn jitter(fr: &FunctionalRequirement, p: &[(f64, f64, f64)]) -> FunctionalRequirement {
    let mut k = 0;
    let mut shift = |r: &Interval| {
        let (a, b, _) = p[k % p.len()];
        k += 1;
        let lo = r.lo() + 4.0 * (a - 0.5);
        let hi = r.hi() + 4.0 * (b - 0.5);
        r.with_bounds(lo.min(hi), hi.max(lo)).unwrap()
    };
    FunctionalRequirement {
        inputs: fr.inputs.iter().map(|(n, r)| (n.to_string(), shift(r))).collect(),
        outputs: fr.outputs.iter().map(|(n, r)| (n.to_string(), shift(r))).collect(),
        ..fr.clone()
    }
}

/// A chain `fr0 → fr1 → …` where `fr_k` feeds `z_k` to `fr_{k+1}` and every
/// producer range sits inside its consumer's range.
pub fn composable_chain() -> impl Strategy<Value = Vec<FunctionalRequirement>> {
    (2usize..5).prop_flat_map(|n| {
        proptest::collection::vec((interval(), interval(), 0.0..5.0f64, 0.0..5.0f64, any::<bool>()), n)
            .prop_map(|parts| {
                let mut frs: Vec<FunctionalRequirement> = Vec::new();
                let mut prev_out: Option<Interval> = None;
                for (k, (x, z, sl, sh, extra)) in parts.into_iter().enumerate() {
                    let mut inputs = RangeMap::new();
                    inputs.insert(format!("x{k}"), x.clone()).unwrap();
                    if let Some(p) = &prev_out {
                        inputs
                            .insert(format!("z{}", k - 1), p.with_bounds(p.lo() - sl, p.hi() + sh).unwrap())
                            .unwrap();
                    }
                    let mut outputs = RangeMap::new();
                    outputs.insert(format!("z{k}"), z.clone()).unwrap();
                    if extra {
                        outputs.insert(format!("w{k}"), x.clone()).unwrap();
                    }
                    prev_out = Some(z);
                    frs.push(
                        FunctionalRequirement::new(
                            format!("fr{k}"),
                            inputs,
                            RangeMap::new(),
                            RangeMap::new(),
                            outputs,
                        )
                        .unwrap(),
                    );
                }
                frs
            })
    })
}
