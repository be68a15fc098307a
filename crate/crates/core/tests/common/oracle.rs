//! First-principles re-implementations used to cross-check the library.
//! Ranges are plain `(lo, hi)` pairs compared endpoint by endpoint.

use std::collections::{BTreeMap, BTreeSet};

use setdecomp::intervals::RangeMap;
use setdecomp::requirements::FunctionalRequirement;

pub type Plain = BTreeMap<String, (f64, f64)>;

pub fn plain(m: &RangeMap) -> Plain {
    m.iter().map(|(k, v)| (k.to_string(), (v.lo(), v.hi()))).collect()
}

pub fn inside(inner: (f64, f64), outer: (f64, f64)) -> bool {
    outer.0 <= inner.0 && inner.1 <= outer.1
}

/// `None` when some shared variable has disjoint ranges.
pub fn merge(a: &Plain, b: &Plain) -> Option<Plain> {
    let mut out = a.clone();
    for (k, &(lo, hi)) in b {
        let r = match a.get(k) {
            Some(&(alo, ahi)) => (alo.max(lo), ahi.min(hi)),
            None => (lo, hi),
        };
        if r.0 > r.1 {
            return None;
        }
        out.insert(k.clone(), r);
    }
    Some(out)
}

pub fn refines(new: &FunctionalRequirement, old: &FunctionalRequirement) -> bool {
    let (ni, no) = (plain(&new.inputs), plain(&new.outputs));
    plain(&old.inputs)
        .iter()
        .all(|(k, r)| ni.get(k).is_some_and(|n| inside(*r, *n)))
        && plain(&old.outputs)
            .iter()
            .all(|(k, r)| no.get(k).is_some_and(|n| inside(*n, *r)))
}

pub fn composable(j: &FunctionalRequirement, k: &FunctionalRequirement) -> bool {
    let (out, inp) = (plain(&j.outputs), plain(&k.inputs));
    let shared: Vec<&String> = out.keys().filter(|v| inp.contains_key(*v)).collect();
    !shared.is_empty() && shared.iter().all(|v| inside(out[*v], inp[*v]))
}

/// `(free inputs, outputs)` of a composite.
pub fn composite(frs: &[FunctionalRequirement]) -> Option<(Plain, Plain)> {
    let produced: BTreeSet<String> = frs
        .iter()
        .flat_map(|f| f.outputs.names().map(str::to_string))
        .collect();
    let mut inputs = Plain::new();
    let mut outputs = Plain::new();
    for f in frs {
        let free: Plain = plain(&f.inputs)
            .into_iter()
            .filter(|(k, _)| !produced.contains(k))
            .collect();
        inputs = merge(&inputs, &free)?;
        outputs = merge(&outputs, &plain(&f.outputs))?;
    }
    Some((inputs, outputs))
}

/// Refinement between two composites given as `(inputs, outputs)`.
pub fn composite_refines(new: &(Plain, Plain), old: &(Plain, Plain)) -> bool {
    old.0
        .iter()
        .all(|(k, r)| new.0.get(k).is_some_and(|n| inside(*r, *n)))
        && old
            .1
            .iter()
            .all(|(k, r)| new.1.get(k).is_some_and(|n| inside(*n, *r)))
}
