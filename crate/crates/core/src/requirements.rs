//! Functional requirements as range contracts `(R*_x, R*_c, R*_u) → R*_y`,
//! with the refinement and composability predicates and composite
//! construction.
//!
//! Refinement (`new` refines `old`): `new` accepts every input `old` accepts
//! and produces only outputs `old` allows. Composability (`j` feeds `k`): at
//! least one output of `j` is an input of `k`, and on every such shared
//! variable the producer range sits inside the consumer range.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intervals::{
    interval_intersect, names_intersect, rangemap_merge, Interval, RangeMap, VarSet,
};

/// A time-windowed output bound: `var ∈ range` for `t ∈ [t_start, t_end]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimedWindow {
    pub var: String,
    pub t_start: f64,
    pub t_end: f64,
    pub range: Interval,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalRequirement {
    pub name: String,
    #[serde(default)]
    pub inputs: RangeMap,
    #[serde(default)]
    pub uncontrollables: RangeMap,
    #[serde(default)]
    pub controllables: RangeMap,
    #[serde(default)]
    pub outputs: RangeMap,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub windows: Vec<TimedWindow>,
}

impl FunctionalRequirement {
    pub fn new(
        name: impl Into<String>,
        inputs: RangeMap,
        uncontrollables: RangeMap,
        controllables: RangeMap,
        outputs: RangeMap,
    ) -> Result<Self> {
        let fr = Self {
            name: name.into(),
            inputs,
            uncontrollables,
            controllables,
            outputs,
            windows: Vec::new(),
        };
        fr.validate()?;
        Ok(fr)
    }

    pub fn with_window(mut self, w: TimedWindow) -> Result<Self> {
        self.windows.push(w);
        self.validate()?;
        Ok(self)
    }

    /// Checks that the four key sets are pairwise disjoint and every window
    /// names an output.
    pub fn validate(&self) -> Result<()> {
        let sets = [
            ("inputs", &self.inputs),
            ("uncontrollables", &self.uncontrollables),
            ("controllables", &self.controllables),
            ("outputs", &self.outputs),
        ];
        for (i, (na, a)) in sets.iter().enumerate() {
            for (nb, b) in &sets[i + 1..] {
                if let Some(v) = a.names().find(|n| b.contains(n)) {
                    return Err(Error::Duplicate {
                        var: v.to_string(),
                        context: format!("{na} and {nb} of `{}`", self.name),
                    });
                }
            }
        }
        for w in &self.windows {
            if !self.outputs.contains(&w.var) {
                return Err(Error::Validation(format!(
                    "window on `{}` in `{}` does not name an output",
                    w.var, self.name
                )));
            }
            if !(w.t_start.is_finite() && w.t_end.is_finite()) || w.t_start > w.t_end {
                return Err(Error::Validation(format!(
                    "window [{}, {}] on `{}` is not a valid time span",
                    w.t_start, w.t_end, w.var
                )));
            }
        }
        Ok(())
    }

    /// Effective output bound of `var` over `[t0, t1]`: the static range
    /// intersected with every window covering the whole span.
    pub fn output_bound_over(&self, var: &str, t0: f64, t1: f64) -> Result<Option<Interval>> {
        let Some(mut acc) = self.outputs.get(var).cloned() else {
            return Ok(None);
        };
        for w in self.windows.iter().filter(|w| w.var == var) {
            if w.t_start <= t0 && t1 <= w.t_end {
                match interval_intersect(&acc, &w.range)? {
                    Some(iv) => acc = iv,
                    None => {
                        return Err(Error::EmptyRange {
                            var: var.to_string(),
                            sources: vec![self.name.clone()],
                        })
                    }
                }
            }
        }
        Ok(Some(acc))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let fr: Self = serde_json::from_str(s)?;
        fr.validate()?;
        Ok(fr)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Input,
    Output,
    Uncontrollable,
    Controllable,
    Window,
}

/// Why a refinement or composability check failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A variable required by the reference contract is absent.
    Missing { var: String, role: Role },
    /// `inner` should lie inside `outer` but does not.
    NotContained {
        var: String,
        role: Role,
        outer: Interval,
        inner: Interval,
    },
    /// The two contracts share no output→input variable.
    NothingShared,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Missing { var, role } => write!(f, "{role:?} `{var}` missing"),
            Witness::NotContained {
                var,
                role,
                outer,
                inner,
            } => write!(f, "{role:?} `{var}`: {inner} not within {outer}"),
            Witness::NothingShared => write!(f, "no shared variable"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum RefinementMode {
    /// Inputs and outputs only.
    #[default]
    Standard,
    /// Also uncontrollables (treated like inputs) and controllables (treated
    /// like outputs).
    Strict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub witness: Option<Witness>,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }

    fn pass() -> Self {
        Self { witness: None }
    }

    fn fail(w: Witness) -> Self {
        Self { witness: Some(w) }
    }
}

/// `old`'s ranges must sit inside `new`'s (∀-quantified sides).
fn widening(old: &RangeMap, new: &RangeMap, role: Role) -> Option<Witness> {
    for (var, old_range) in old.iter() {
        match new.get(var) {
            None => {
                return Some(Witness::Missing {
                    var: var.to_string(),
                    role,
                })
            }
            Some(new_range) if !new_range.contains_interval(old_range) => {
                return Some(Witness::NotContained {
                    var: var.to_string(),
                    role,
                    outer: new_range.clone(),
                    inner: old_range.clone(),
                })
            }
            _ => {}
        }
    }
    None
}

/// `new`'s ranges must sit inside `old`'s (guaranteed sides).
fn narrowing(old: &RangeMap, new: &RangeMap, role: Role) -> Option<Witness> {
    for (var, old_range) in old.iter() {
        match new.get(var) {
            None => {
                return Some(Witness::Missing {
                    var: var.to_string(),
                    role,
                })
            }
            Some(new_range) if !old_range.contains_interval(new_range) => {
                return Some(Witness::NotContained {
                    var: var.to_string(),
                    role,
                    outer: old_range.clone(),
                    inner: new_range.clone(),
                })
            }
            _ => {}
        }
    }
    None
}

fn window_witness(new: &FunctionalRequirement, old: &FunctionalRequirement) -> Option<Witness> {
    for w in &old.windows {
        let bound = match new.output_bound_over(&w.var, w.t_start, w.t_end) {
            Ok(Some(b)) => b,
            // empty effective range means nothing is produced, trivially inside
            Err(_) => continue,
            Ok(None) => {
                return Some(Witness::Missing {
                    var: w.var.clone(),
                    role: Role::Window,
                })
            }
        };
        if !w.range.contains_interval(&bound) {
            return Some(Witness::NotContained {
                var: w.var.clone(),
                role: Role::Window,
                outer: w.range.clone(),
                inner: bound,
            });
        }
    }
    None
}

/// Does `new` refine `old`?
pub fn check_refines(new: &FunctionalRequirement, old: &FunctionalRequirement) -> Verdict {
    check_refines_with(new, old, RefinementMode::Standard)
}

pub fn check_refines_with(
    new: &FunctionalRequirement,
    old: &FunctionalRequirement,
    mode: RefinementMode,
) -> Verdict {
    let mut w = widening(&old.inputs, &new.inputs, Role::Input)
        .or_else(|| narrowing(&old.outputs, &new.outputs, Role::Output));
    if mode == RefinementMode::Strict {
        w = w
            .or_else(|| widening(&old.uncontrollables, &new.uncontrollables, Role::Uncontrollable))
            .or_else(|| narrowing(&old.controllables, &new.controllables, Role::Controllable));
    }
    w = w.or_else(|| window_witness(new, old));
    match w {
        Some(w) => Verdict::fail(w),
        None => Verdict::pass(),
    }
}

/// A system's observed ranges satisfy a requirement iff they refine it.
pub fn check_satisfaction_static(
    implementation: &FunctionalRequirement,
    requirement: &FunctionalRequirement,
) -> Verdict {
    check_refines(implementation, requirement)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Composability {
    /// `{z} = {y(j)} ⊓ {x(k)}`.
    pub shared: Vec<String>,
    pub witness: Option<Witness>,
}

impl Composability {
    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }
}

/// Can `producer` feed `consumer`?
pub fn check_composable(
    producer: &FunctionalRequirement,
    consumer: &FunctionalRequirement,
) -> Composability {
    let z = names_intersect(&producer.outputs.var_set(), &consumer.inputs.var_set());
    let shared: Vec<String> = z.names().map(str::to_string).collect();
    if shared.is_empty() {
        return Composability {
            shared,
            witness: Some(Witness::NothingShared),
        };
    }
    let witness = shared.iter().find_map(|var| {
        let produced = producer.outputs.get(var)?;
        let accepted = consumer.inputs.get(var)?;
        (!accepted.contains_interval(produced)).then(|| Witness::NotContained {
            var: var.clone(),
            role: Role::Input,
            outer: accepted.clone(),
            inner: produced.clone(),
        })
    });
    Composability { shared, witness }
}

/// A set of pairwise-composable requirements viewed as one contract.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositeFR {
    pub parts: Vec<FunctionalRequirement>,
    /// Exposed interface: free inputs, all outputs, merged parameters.
    pub interface: FunctionalRequirement,
}

/// Builds the composite. Every producer→consumer link must be composable;
/// inputs produced by some part are hidden, the remaining (free) inputs take
/// the intersection of their consumers' ranges.
pub fn compose(frs: &[FunctionalRequirement]) -> Result<CompositeFR> {
    if frs.is_empty() {
        return Err(Error::Validation("cannot compose an empty set".into()));
    }
    let mut produced = VarSet::new();
    let mut producer_of: Vec<(&str, &str)> = Vec::new();
    for fr in frs {
        for var in fr.outputs.names() {
            if let Some((_, first)) = producer_of.iter().find(|(v, _)| *v == var) {
                return Err(Error::ProducerConflict {
                    var: var.to_string(),
                    first: first.to_string(),
                    second: fr.name.clone(),
                });
            }
            producer_of.push((var, &fr.name));
        }
        for v in fr.outputs.var_set().iter() {
            produced.insert(v)?;
        }
    }
    for j in frs {
        for k in frs {
            let c = check_composable(j, k);
            if let Some(Witness::NotContained { var, .. }) = c.witness {
                return Err(Error::NotComposable {
                    fr_j: j.name.clone(),
                    fr_k: k.name.clone(),
                    var,
                });
            }
        }
    }

    let mut inputs = RangeMap::new();
    let mut outputs = RangeMap::new();
    let mut uncontrollables = RangeMap::new();
    let mut controllables = RangeMap::new();
    let mut windows = Vec::new();
    for fr in frs {
        let free: RangeMap = fr
            .inputs
            .iter()
            .filter(|(n, _)| !produced.contains(n))
            .map(|(n, iv)| (n.to_string(), iv.clone()))
            .collect();
        inputs = rangemap_merge(&inputs, &free)?;
        outputs = rangemap_merge(&outputs, &fr.outputs)?;
        uncontrollables = rangemap_merge(&uncontrollables, &fr.uncontrollables)?;
        controllables = rangemap_merge(&controllables, &fr.controllables)?;
        windows.extend(fr.windows.iter().cloned());
    }
    let name = if frs.len() == 1 {
        frs[0].name.clone()
    } else {
        format!(
            "composite({})",
            frs.iter().map(|f| f.name.as_str()).collect::<Vec<_>>().join(",")
        )
    };
    let interface = FunctionalRequirement {
        name,
        inputs,
        uncontrollables,
        controllables,
        outputs,
        windows,
    };
    interface.validate()?;
    Ok(CompositeFR {
        parts: frs.to_vec(),
        interface,
    })
}
