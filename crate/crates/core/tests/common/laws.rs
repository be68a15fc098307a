//! Law checks shared by the property tests and the acceptance run. Each
//! returns `Err` with a description on the first violated expectation.

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use setdecomp::intervals::{
    interval_intersect, names_intersect, names_subset, rangemap_merge, restrict, RangeMap, VarSet,
};
use setdecomp::requirements::{
    check_composable, check_refines, check_satisfaction_static, compose, FunctionalRequirement,
};

use super::gen;
use super::oracle;

type Outcome = Result<(), TestCaseError>;

fn same(a: &RangeMap, b: &RangeMap) -> bool {
    oracle::plain(a) == oracle::plain(b)
}

// ---- set algebra ----

pub fn merge_commutes(a: &RangeMap, b: &RangeMap) -> Outcome {
    match (rangemap_merge(a, b), rangemap_merge(b, a)) {
        (Ok(ab), Ok(ba)) => prop_assert!(same(&ab, &ba)),
        (Err(_), Err(_)) => {}
        (l, r) => prop_assert!(false, "one side failed: {l:?} vs {r:?}"),
    }
    // the oracle agrees on success and failure
    let want = oracle::merge(&oracle::plain(a), &oracle::plain(b));
    match rangemap_merge(a, b) {
        Ok(ab) => prop_assert_eq!(Some(oracle::plain(&ab)), want),
        Err(_) => prop_assert!(want.is_none()),
    }
    Ok(())
}

pub fn merge_associates(maps: &[RangeMap]) -> Outcome {
    let (a, b, c) = (&maps[0], &maps[1], &maps[2]);
    let left = rangemap_merge(&rangemap_merge(a, b).unwrap(), c).unwrap();
    let right = rangemap_merge(a, &rangemap_merge(b, c).unwrap()).unwrap();
    prop_assert!(same(&left, &right));
    Ok(())
}

pub fn merge_idempotent(a: &RangeMap) -> Outcome {
    prop_assert!(same(&rangemap_merge(a, a).unwrap(), a));
    Ok(())
}

pub fn subset_transitive(a: &VarSet, b: &VarSet, c: &VarSet) -> Outcome {
    // intersections give chains that are subsets by construction
    let ab = names_intersect(a, b);
    let abc = names_intersect(&ab, c);
    prop_assert!(names_subset(&abc, &ab) && names_subset(&ab, a));
    prop_assert!(names_subset(&abc, a));
    // arbitrary triples: premise implies conclusion
    if names_subset(a, b) && names_subset(b, c) {
        prop_assert!(names_subset(a, c));
    }
    let brute = a.names().all(|n| c.contains(n));
    prop_assert_eq!(names_subset(a, c), brute);
    Ok(())
}

/// `v|{a ⋓ b}` is the intersection of `v|{a}` and `v|{b}` where both exist,
/// and the single present range otherwise.
pub fn restrict_merge_coherent(maps: &[RangeMap]) -> Outcome {
    let (a, b) = (&maps[0], &maps[1]);
    let m = rangemap_merge(a, b).unwrap();
    for name in m.names() {
        let got = restrict(name, &m).unwrap();
        let want = match (restrict(name, a), restrict(name, b)) {
            (Ok(x), Ok(y)) => interval_intersect(x, y).unwrap().unwrap(),
            (Ok(x), Err(_)) | (Err(_), Ok(x)) => x.clone(),
            (Err(_), Err(_)) => return Err(TestCaseError::fail(format!("stray key {name}"))),
        };
        prop_assert_eq!(got, &want);
    }
    for name in a.names().chain(b.names()) {
        prop_assert!(restrict(name, &m).is_ok());
    }
    Ok(())
}

// ---- refinement and composability ----

fn agree_refines(new: &FunctionalRequirement, old: &FunctionalRequirement) -> Result<bool, TestCaseError> {
    let got = check_refines(new, old).holds();
    prop_assert_eq!(got, oracle::refines(new, old), "checker and oracle disagree");
    Ok(got)
}

/// Property 1 on a generated chain, plus checker-vs-oracle agreement on a
/// pair that may or may not refine.
pub fn property_1(fr: &FunctionalRequirement, p1: &[(f64, f64, f64)], p2: &[(f64, f64, f64)]) -> Outcome {
    let b = gen::refine(fr, p1);
    let c = gen::refine(&b, p2);
    prop_assert!(agree_refines(&b, fr)?);
    prop_assert!(agree_refines(&c, &b)?);
    prop_assert!(agree_refines(&c, fr)?);

    let j = gen::jitter(fr, p1);
    let k = gen::jitter(&j, p2);
    if agree_refines(&k, &j)? && agree_refines(&j, fr)? {
        prop_assert!(agree_refines(&k, fr)?);
    }
    agree_refines(&k, fr)?;
    Ok(())
}

fn linked(frs: &[FunctionalRequirement]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, j) in frs.iter().enumerate() {
        for (k, c) in frs.iter().enumerate() {
            if i != k && !check_composable(j, c).shared.is_empty() {
                out.push((i, k));
            }
        }
    }
    out
}

fn refine_all(frs: &[FunctionalRequirement], p: &[(f64, f64, f64)]) -> Vec<FunctionalRequirement> {
    frs.iter()
        .enumerate()
        .map(|(i, f)| gen::refine(f, &p[i % p.len()..]))
        .collect()
}

pub fn property_2(frs: &[FunctionalRequirement], p: &[(f64, f64, f64)]) -> Outcome {
    let refined = refine_all(frs, p);
    for (i, k) in linked(frs) {
        prop_assert!(check_composable(&frs[i], &frs[k]).holds());
        prop_assert!(oracle::composable(&frs[i], &frs[k]));
        let c = check_composable(&refined[i], &refined[k]);
        prop_assert_eq!(c.holds(), oracle::composable(&refined[i], &refined[k]));
        prop_assert!(c.holds(), "{} -> {} lost composability", refined[i].name, refined[k].name);
    }
    Ok(())
}

/// Property 3 by replacing one part at a time, each step refining the last.
pub fn property_3(frs: &[FunctionalRequirement], p: &[(f64, f64, f64)], order: &[usize]) -> Outcome {
    let refined = refine_all(frs, p);
    let original = compose(frs).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let oracle_original = oracle::composite(frs).unwrap();
    let mut current = frs.to_vec();
    let mut previous = original.interface.clone();
    let mut seen = vec![false; frs.len()];
    for &raw in order {
        let i = raw % frs.len();
        if seen[i] {
            continue;
        }
        seen[i] = true;
        current[i] = refined[i].clone();
        let step = compose(&current).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!(check_refines(&step.interface, &previous).holds());
        let o = oracle::composite(&current).unwrap();
        prop_assert!(oracle::composite_refines(&o, &oracle_original));
        prop_assert!(check_refines(&step.interface, &original.interface).holds());
        previous = step.interface;
    }
    let all = compose(&refined).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert!(check_refines(&all.interface, &original.interface).holds());
    Ok(())
}

/// Properties 4 to 6: systems are modelled by their observed ranges, which
/// satisfy a requirement when they refine it.
pub fn properties_4_to_6(frs: &[FunctionalRequirement], p: &[(f64, f64, f64)], q: &[(f64, f64, f64)]) -> Outcome {
    let refined = refine_all(frs, p);
    let systems = refine_all(&refined, q);
    for i in 0..frs.len() {
        // 4: a system satisfying FR' satisfies FR
        prop_assert!(check_satisfaction_static(&systems[i], &refined[i]).holds());
        prop_assert!(check_satisfaction_static(&systems[i], &frs[i]).holds());
        prop_assert!(oracle::refines(&systems[i], &frs[i]));
    }
    // 5: systems of composable requirements compose
    for (i, k) in linked(frs) {
        prop_assert!(check_composable(&systems[i], &systems[k]).holds());
    }
    // 6: the composite system satisfies the composite requirement
    let s = compose(&systems).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let r = compose(frs).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert!(check_satisfaction_static(&s.interface, &r.interface).holds());
    prop_assert!(oracle::composite_refines(
        &oracle::composite(&systems).unwrap(),
        &oracle::composite(frs).unwrap()
    ));
    Ok(())
}

/// Shrinking a producer's outputs never breaks composability.
pub fn composable_monotone(frs: &[FunctionalRequirement], p: &[(f64, f64, f64)]) -> Outcome {
    for (i, k) in linked(frs) {
        let before = check_composable(&frs[i], &frs[k]).holds();
        let shrunk = gen::refine(&frs[i], p);
        let after = check_composable(&shrunk, &frs[k]).holds();
        prop_assert!(!before || after);
    }
    Ok(())
}
