//! From the architecture's declared ranges to the feasible design and
//! performance spaces.
//!
//! 1. Aggregate sub-function ranges by intersection (`⋓`).
//! 2. Give each variable group its range.
//! 3. Pin top-level inputs and uncontrollables to the requirement: FDS¹, FPS¹.
//! 4. Shrink the controllables until every sampled output fits FPS¹: FDS².
//! 5. Simulate over FDS² for the achievable outputs: FPS².

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::architecture::{classify, Architecture, Classification};
use crate::error::{Error, Result};
use crate::intervals::{interval_intersect, Bounds, Interval, RangeMap, VarSet};
use crate::simulation::{Envelope, EnvelopeEngine, SamplingPlan};

/// `{x'}, {y'}, {c'}, {u'}` with their merged ranges.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AggregatedRanges {
    pub x: RangeMap,
    pub y: RangeMap,
    pub c: RangeMap,
    pub u: RangeMap,
}

fn merge_into(
    acc: &mut RangeMap,
    sources: &mut BTreeMap<String, Vec<String>>,
    from: &RangeMap,
    id: &str,
) -> Result<()> {
    for (name, iv) in from.iter() {
        let src = sources.entry(name.to_string()).or_default();
        src.push(id.to_string());
        let merged = match acc.get(name) {
            None => iv.clone(),
            Some(prev) => interval_intersect(prev, iv)?.ok_or_else(|| Error::EmptyRange {
                var: name.to_string(),
                sources: src.clone(),
            })?,
        };
        acc.set(name, merged);
    }
    Ok(())
}

pub fn aggregate_ranges(arch: &Architecture) -> Result<AggregatedRanges> {
    let mut agg = AggregatedRanges::default();
    let mut src: [BTreeMap<String, Vec<String>>; 4] = Default::default();
    for sf in &arch.subfunctions {
        merge_into(&mut agg.x, &mut src[0], &sf.inputs, &sf.id)?;
        merge_into(&mut agg.y, &mut src[1], &sf.outputs, &sf.id)?;
        merge_into(&mut agg.c, &mut src[2], &sf.controllables, &sf.id)?;
        merge_into(&mut agg.u, &mut src[3], &sf.uncontrollables, &sf.id)?;
    }
    Ok(agg)
}

/// Range of every classified variable.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GroupRanges {
    pub x: RangeMap,
    pub x_tilde: RangeMap,
    pub c: RangeMap,
    pub c_tilde: RangeMap,
    pub u: RangeMap,
    pub u_tilde: RangeMap,
    pub y1: RangeMap,
    pub y2: RangeMap,
    pub y3: RangeMap,
    pub y4: RangeMap,
}

/// Intersection of every range `var` has in `maps`.
fn meet(var: &str, maps: &[(&str, &RangeMap)]) -> Result<Interval> {
    let mut acc: Option<Interval> = None;
    let mut sources = Vec::new();
    for (label, m) in maps {
        if let Some(iv) = m.get(var) {
            sources.push(label.to_string());
            acc = Some(match acc {
                None => iv.clone(),
                Some(a) => interval_intersect(&a, iv)?.ok_or_else(|| Error::EmptyRange {
                    var: var.to_string(),
                    sources: sources.clone(),
                })?,
            });
        }
    }
    acc.ok_or_else(|| Error::NotFound(var.to_string()))
}

fn group(vars: &VarSet, maps: &[(&str, &RangeMap)]) -> Result<RangeMap> {
    vars.names()
        .map(|v| Ok((v.to_string(), meet(v, maps)?)))
        .collect()
}

pub fn compute_group_ranges(
    arch: &Architecture,
    cls: &Classification,
    agg: &AggregatedRanges,
) -> Result<GroupRanges> {
    let top = &arch.top;
    let (rx, ry, rc, ru) = (
        &top.inputs,
        &top.outputs,
        &top.controllables,
        &top.uncontrollables,
    );
    Ok(GroupRanges {
        x: group(&cls.x, &[("top inputs", rx), ("sub-function inputs", &agg.x)])?,
        x_tilde: group(&cls.x_tilde, &[("sub-function inputs", &agg.x)])?,
        c: group(&cls.c, &[("top controllables", rc), ("sub-function controllables", &agg.c)])?,
        c_tilde: group(&cls.c_tilde, &[("sub-function controllables", &agg.c)])?,
        u: group(&cls.u, &[("top uncontrollables", ru), ("sub-function uncontrollables", &agg.u)])?,
        u_tilde: group(&cls.u_tilde, &[("sub-function uncontrollables", &agg.u)])?,
        y1: group(&cls.y1, &[("sub-function outputs", &agg.y)])?,
        y2: group(
            &cls.y2,
            &[("sub-function inputs", &agg.x), ("sub-function outputs", &agg.y)],
        )?,
        y3: group(
            &cls.y3,
            &[
                ("sub-function inputs", &agg.x),
                ("sub-function outputs", &agg.y),
                ("top outputs", ry),
            ],
        )?,
        y4: group(&cls.y4, &[("sub-function outputs", &agg.y), ("top outputs", ry)])?,
    })
}

fn union(maps: &[&RangeMap]) -> RangeMap {
    maps.iter()
        .flat_map(|m| m.iter())
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

/// `group` with every variable of `required` reset to its required range.
fn pin(required: &RangeMap, group: &RangeMap) -> RangeMap {
    let mut out = group.clone();
    for (name, want) in required.iter() {
        out.set(name, want.clone());
    }
    out
}

/// `(FDS¹, FPS¹)`.
pub fn assemble_spaces(
    arch: &Architecture,
    groups: &GroupRanges,
    agg: &AggregatedRanges,
) -> Result<(RangeMap, RangeMap)> {
    let top = &arch.top;
    for (required, declared) in [(&top.inputs, &agg.x), (&top.uncontrollables, &agg.u)] {
        for (name, want) in required.iter() {
            if let Some(have) = declared.get(name) {
                if !have.contains_interval(want) {
                    return Err(Error::RangeNotContained {
                        var: name.to_string(),
                    });
                }
            }
        }
    }
    let x = pin(&top.inputs, &groups.x);
    let u = pin(&top.uncontrollables, &groups.u);
    let fds1 = union(&[
        &x,
        &groups.x_tilde,
        &groups.c,
        &groups.c_tilde,
        &u,
        &groups.u_tilde,
    ]);
    let fps1 = union(&[&groups.y1, &groups.y2, &groups.y3, &groups.y4]);
    Ok((fds1, fps1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Warning {
    /// The sampled envelope left FPS¹ and was clipped back.
    EnvelopeEscape {
        var: String,
        envelope: Bounds,
        clipped: Bounds,
    },
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::EnvelopeEscape {
                var,
                envelope,
                clipped,
            } => write!(f, "envelope of `{var}` {envelope} escapes FPS¹; clipped to {clipped}"),
        }
    }
}

/// One decision taken while narrowing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub stage: String,
    pub var: String,
    pub detail: String,
}

impl LogEntry {
    fn new(stage: &str, var: &str, detail: impl Into<String>) -> Self {
        Self {
            stage: stage.into(),
            var: var.into(),
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NarrowingConfig {
    /// Sampling used for the final FPS² envelope.
    pub plan: SamplingPlan,
    /// Cheaper sampling used inside the shrink loop.
    pub probe: SamplingPlan,
    /// Bisection steps per controllable bound.
    pub bisections: usize,
}

impl Default for NarrowingConfig {
    fn default() -> Self {
        Self {
            plan: SamplingPlan::default(),
            probe: SamplingPlan::coarse(0.0),
            bisections: 12,
        }
    }
}

/// Whether an envelope stays inside FPS¹ and the top-level windows.
pub fn envelope_fits(arch: &Architecture, fps1: &RangeMap, env: &Envelope) -> Option<String> {
    for (var, b) in &env.ranges {
        if let Some(iv) = fps1.get(var) {
            if !iv.bounds().contains_bounds(b) {
                return Some(format!("`{var}` reaches {b}, outside {}", iv.bounds()));
            }
        }
    }
    for w in &arch.top.windows {
        if let Some(b) = env.window(&w.var, w.t_start, w.t_end) {
            if !w.range.bounds().contains_bounds(&b) {
                return Some(format!(
                    "`{}` reaches {b} over [{}, {}], outside {}",
                    w.var,
                    w.t_start,
                    w.t_end,
                    w.range.bounds()
                ));
            }
        }
    }
    None
}

/// Narrows every controllable (`c ⊔ c̃`) to a sub-range whose sampled outputs
/// stay inside FPS¹.
///
/// Starts from the degenerate midpoint, first tries each full bound, then
/// bisects the remaining gaps round-robin (names in canonical order, lower
/// bound before upper). Uncontrollables and inputs keep their FDS¹ ranges.
pub fn narrow_controllables(
    arch: &Architecture,
    cls: &Classification,
    fds1: &RangeMap,
    fps1: &RangeMap,
    engine: &dyn EnvelopeEngine,
    cfg: &NarrowingConfig,
    log: &mut Vec<LogEntry>,
) -> Result<RangeMap> {
    let ctrl: Vec<String> = cls.controllables().names().map(str::to_string).collect();
    let mut current = fds1.clone();
    for v in &ctrl {
        let iv = fds1.get(v).ok_or_else(|| Error::NotFound(v.clone()))?;
        current.set(v, iv.with_bounds(iv.mid(), iv.mid())?);
    }
    let check = |b: &RangeMap| -> Result<Option<String>> {
        let env = engine.envelope(arch, b, &cfg.probe)?;
        Ok(envelope_fits(arch, fps1, &env))
    };
    if let Some(why) = check(&current)? {
        return Err(Error::Infeasible(format!(
            "outputs leave FPS¹ even at the controllable midpoint: {why}"
        )));
    }
    if ctrl.is_empty() {
        return Ok(current);
    }

    // (var, is_upper, feasible value, infeasible value)
    let mut bounds: Vec<(String, bool, f64, Option<f64>)> = Vec::new();
    for v in &ctrl {
        let full = fds1.get(v).unwrap();
        let mid = full.mid();
        bounds.push((v.clone(), false, mid, Some(full.lo())));
        bounds.push((v.clone(), true, mid, Some(full.hi())));
    }
    let apply = |b: &RangeMap, var: &str, upper: bool, value: f64| -> Result<RangeMap> {
        let mut out = b.clone();
        let iv = b.get(var).unwrap();
        let next = if upper {
            iv.with_bounds(iv.lo(), value)?
        } else {
            iv.with_bounds(value, iv.hi())?
        };
        out.set(var, next);
        Ok(out)
    };

    for round in 0..=cfg.bisections {
        for (var, upper, ok, bad) in bounds.iter_mut() {
            let Some(target) = *bad else { continue };
            let side = if *upper { "upper" } else { "lower" };
            // round 0 tries the full bound, later rounds bisect the gap
            let trial = if round == 0 { target } else { 0.5 * (*ok + target) };
            if trial == *ok {
                *bad = None;
                continue;
            }
            let candidate = apply(&current, var, *upper, trial)?;
            match check(&candidate)? {
                None => {
                    current = candidate;
                    *ok = trial;
                    if round == 0 {
                        *bad = None;
                    }
                    log.push(LogEntry::new("narrow", var, format!("{side} bound {trial} accepted")));
                }
                Some(why) => {
                    *bad = Some(trial);
                    log.push(LogEntry::new(
                        "narrow",
                        var,
                        format!("{side} bound {trial} rejected: {why}"),
                    ));
                }
            }
        }
    }
    for v in &ctrl {
        log.push(LogEntry::new(
            "narrow",
            v,
            format!("FDS² range {}", current.get(v).unwrap().bounds()),
        ));
    }
    Ok(current)
}

/// Achievable outputs over FDS², clipped to FPS¹.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fps2 {
    pub ranges: RangeMap,
    /// Top-level windows with their achievable bounds, clipped to the window.
    pub windows: Vec<crate::requirements::TimedWindow>,
    pub envelope: Envelope,
    pub warnings: Vec<Warning>,
}

pub fn compute_fps2(
    arch: &Architecture,
    fds2: &RangeMap,
    fps1: &RangeMap,
    engine: &dyn EnvelopeEngine,
    plan: &SamplingPlan,
    log: &mut Vec<LogEntry>,
) -> Result<Fps2> {
    let envelope = engine.envelope(arch, fds2, plan)?;
    let mut ranges = RangeMap::new();
    let mut warnings = Vec::new();
    for (var, cap) in fps1.iter() {
        let Some(b) = envelope.get(var) else { continue };
        let clipped = Bounds::new(b.lo.max(cap.lo()), b.hi.min(cap.hi()));
        if clipped.lo > clipped.hi {
            return Err(Error::Infeasible(format!(
                "envelope of `{var}` {b} is disjoint from FPS¹ {}",
                cap.bounds()
            )));
        }
        if clipped != b {
            let w = Warning::EnvelopeEscape {
                var: var.to_string(),
                envelope: b,
                clipped,
            };
            log.push(LogEntry::new("fps2", var, w.to_string()));
            warnings.push(w);
        }
        ranges.insert(var, cap.with_bounds(clipped.lo, clipped.hi)?)?;
    }
    let mut windows = Vec::new();
    for w in &arch.top.windows {
        let Some(b) = envelope.window(&w.var, w.t_start, w.t_end) else {
            continue;
        };
        let r = w.range.bounds();
        let lo = b.lo.max(r.lo);
        let hi = b.hi.min(r.hi);
        if lo > hi {
            return Err(Error::Infeasible(format!(
                "window envelope of `{}` {b} is disjoint from {}",
                w.var, r
            )));
        }
        windows.push(crate::requirements::TimedWindow {
            var: w.var.clone(),
            t_start: w.t_start,
            t_end: w.t_end,
            range: w.range.with_bounds(lo, hi)?,
        });
    }
    Ok(Fps2 {
        ranges,
        windows,
        envelope,
        warnings,
    })
}

/// Everything the narrowing stage produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibleSpaces {
    pub aggregated: AggregatedRanges,
    pub groups: GroupRanges,
    pub fds1: RangeMap,
    pub fps1: RangeMap,
    pub fds2: RangeMap,
    pub fps2: RangeMap,
    pub fps2_windows: Vec<crate::requirements::TimedWindow>,
    pub warnings: Vec<Warning>,
    pub log: Vec<LogEntry>,
}

impl FeasibleSpaces {
    /// The provenance log as JSON.
    pub fn log_json(&self) -> String {
        serde_json::to_string_pretty(&self.log).expect("log serializes")
    }
}

/// Runs the whole narrowing stage.
pub fn narrow(
    arch: &Architecture,
    engine: &dyn EnvelopeEngine,
    cfg: &NarrowingConfig,
) -> Result<(Classification, FeasibleSpaces)> {
    let cls = classify(arch)?;
    let aggregated = aggregate_ranges(arch)?;
    let groups = compute_group_ranges(arch, &cls, &aggregated)?;
    let (fds1, fps1) = assemble_spaces(arch, &groups, &aggregated)?;
    let mut log = Vec::new();
    for (var, iv) in fds1.iter() {
        log.push(LogEntry::new("fds1", var, iv.bounds().to_string()));
    }
    for (var, iv) in fps1.iter() {
        log.push(LogEntry::new("fps1", var, iv.bounds().to_string()));
    }
    let fds2 = narrow_controllables(arch, &cls, &fds1, &fps1, engine, cfg, &mut log)?;
    let fps2 = compute_fps2(arch, &fds2, &fps1, engine, &cfg.plan, &mut log)?;
    Ok((
        cls,
        FeasibleSpaces {
            aggregated,
            groups,
            fds1,
            fps1,
            fds2,
            fps2: fps2.ranges,
            fps2_windows: fps2.windows,
            warnings: fps2.warnings,
            log,
        },
    ))
}
