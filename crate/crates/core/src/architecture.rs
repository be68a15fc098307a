//! Functional architectures: sub-functions wired by shared identifiers, the
//! aggregated name sets, coverage of the top-level requirement, and the
//! classification of every variable into exclusive design/performance groups.
//!
//! Groups (with `{x'}`/`{y'}` the aggregated sub-function inputs/outputs and
//! `{x}`/`{y}` the top-level inputs/outputs):
//!
//! | group | definition |
//! |-------|------------|
//! | `y1`  | `{y'} ⊓ ¬{y} ⊓ ¬{x'}` |
//! | `y2`  | `{y'} ⊓ {x'} ⊓ ¬{y}` |
//! | `y3`  | `{y} ⊓ {x'}` |
//! | `y4`  | `{y} ⊓ ¬{x'}` |
//! | `x̃`   | `{x'} ⊓ ¬{y'} ⊓ ¬{x}` |
//! | `c̃`, `ũ` | parameters not named by the top-level requirement |

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::intervals::{names_intersect, names_subset, names_union, RangeMap, VarSet};
use crate::requirements::FunctionalRequirement;
use crate::tradeoff::WeightSpec;

/// Output clamp applied to an integrating sub-function. While the raw output
/// is outside `[lo, hi]` the state is frozen (conditional integration).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Saturation {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Kind {
    /// `y = expr(inputs)`.
    Algebraic { expr: Expr },
    /// `s(0) = initial`, `ṡ = rate`, `y = output(s, inputs)` (default `y = s`).
    Integrator {
        state: String,
        rate: Expr,
        initial: Expr,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        output: Option<Expr>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        saturation: Option<Saturation>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubFunction {
    pub id: String,
    #[serde(flatten)]
    pub kind: Kind,
    #[serde(default)]
    pub inputs: RangeMap,
    #[serde(default)]
    pub outputs: RangeMap,
    #[serde(default)]
    pub controllables: RangeMap,
    #[serde(default)]
    pub uncontrollables: RangeMap,
}

impl SubFunction {
    pub fn is_integrating(&self) -> bool {
        matches!(self.kind, Kind::Integrator { .. })
    }

    /// The single output variable.
    pub fn output(&self) -> &str {
        self.outputs
            .names()
            .next()
            .expect("validated sub-function has one output")
    }

    /// Variables an expression of this sub-function may read.
    fn readable(&self) -> VarSet {
        let mut s = self.inputs.var_set();
        for v in self
            .controllables
            .var_set()
            .iter()
            .chain(self.uncontrollables.var_set().iter())
        {
            // port sets are checked disjoint before this is called
            let _ = s.insert(v);
        }
        s
    }

    fn validate(&self, constants: &BTreeMap<String, f64>) -> Result<()> {
        let ports = [
            &self.inputs,
            &self.outputs,
            &self.controllables,
            &self.uncontrollables,
        ];
        for (i, a) in ports.iter().enumerate() {
            for b in &ports[i + 1..] {
                if let Some(v) = a.names().find(|n| b.contains(n)) {
                    return Err(Error::Duplicate {
                        var: v.to_string(),
                        context: format!("ports of `{}`", self.id),
                    });
                }
            }
            if let Some(v) = a.names().find(|n| constants.contains_key(*n)) {
                return Err(Error::Validation(format!(
                    "`{v}` in `{}` is both a port and a constant",
                    self.id
                )));
            }
        }
        if self.outputs.len() != 1 {
            return Err(Error::Validation(format!(
                "`{}` must declare exactly one output",
                self.id
            )));
        }
        let readable = self.readable();
        let check = |e: &Expr, local: Option<&str>| -> Result<()> {
            for n in e.names() {
                if !(readable.contains(&n) || constants.contains_key(&n) || local == Some(&n)) {
                    return Err(Error::Validation(format!(
                        "`{}` references undeclared `{n}`",
                        self.id
                    )));
                }
            }
            Ok(())
        };
        match &self.kind {
            Kind::Algebraic { expr } => check(expr, None)?,
            Kind::Integrator {
                state,
                rate,
                initial,
                output,
                saturation,
            } => {
                if readable.contains(state) || constants.contains_key(state) {
                    return Err(Error::Validation(format!(
                        "state `{state}` of `{}` shadows a port or constant",
                        self.id
                    )));
                }
                // the rate may read the block's own output
                let mut with_out = readable.clone();
                with_out.insert(self.outputs.var_set().iter().next().unwrap())?;
                for n in rate.names() {
                    if !(with_out.contains(&n) || constants.contains_key(&n) || *state == n) {
                        return Err(Error::Validation(format!(
                            "`{}` references undeclared `{n}`",
                            self.id
                        )));
                    }
                }
                check(initial, None)?;
                if let Some(o) = output {
                    check(o, Some(state))?;
                }
                if let Some(s) = saturation {
                    if !(s.lo <= s.hi) {
                        return Err(Error::Validation(format!(
                            "saturation of `{}` is not an interval",
                            self.id
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

fn default_name() -> String {
    "architecture".into()
}

/// A functional architecture implementing one top-level requirement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Architecture {
    #[serde(default = "default_name")]
    pub name: String,
    pub top: FunctionalRequirement,
    #[serde(default)]
    pub constants: BTreeMap<String, f64>,
    pub subfunctions: Vec<SubFunction>,
    #[serde(default)]
    pub tradeoff: TradeoffSection,
    /// Default design point for single simulations.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub nominal: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TradeoffSection {
    /// Keyed by output variable.
    #[serde(default)]
    pub weights: BTreeMap<String, WeightSpec>,
}

/// `({x'}, {y'}, {c'}, {u'})`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AggregatedNames {
    pub x: VarSet,
    pub y: VarSet,
    pub c: VarSet,
    pub u: VarSet,
}

/// The ten exclusive variable groups.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Classification {
    pub x: VarSet,
    pub x_tilde: VarSet,
    pub c: VarSet,
    pub c_tilde: VarSet,
    pub u: VarSet,
    pub u_tilde: VarSet,
    pub y1: VarSet,
    pub y2: VarSet,
    pub y3: VarSet,
    pub y4: VarSet,
}

impl Classification {
    pub fn groups(&self) -> [(&'static str, &VarSet); 10] {
        [
            ("x", &self.x),
            ("x~", &self.x_tilde),
            ("c", &self.c),
            ("c~", &self.c_tilde),
            ("u", &self.u),
            ("u~", &self.u_tilde),
            ("y1", &self.y1),
            ("y2", &self.y2),
            ("y3", &self.y3),
            ("y4", &self.y4),
        ]
    }

    /// `(x, x̃, c, c̃, u, ũ)`.
    pub fn design_space(&self) -> VarSet {
        union_all(&[
            &self.x,
            &self.x_tilde,
            &self.c,
            &self.c_tilde,
            &self.u,
            &self.u_tilde,
        ])
    }

    /// `(y1, y2, y3, y4)`.
    pub fn performance_space(&self) -> VarSet {
        union_all(&[&self.y1, &self.y2, &self.y3, &self.y4])
    }

    /// Controllable parameters, `c ⊔ c̃`.
    pub fn controllables(&self) -> VarSet {
        union_all(&[&self.c, &self.c_tilde])
    }

    pub fn group_of(&self, var: &str) -> Option<&'static str> {
        self.groups()
            .into_iter()
            .find(|(_, s)| s.contains(var))
            .map(|(g, _)| g)
    }
}

fn union_all(sets: &[&VarSet]) -> VarSet {
    sets.iter().fold(VarSet::new(), |acc, s| {
        names_union(&acc, s).expect("classification groups share units")
    })
}

impl Architecture {
    pub fn from_json(s: &str) -> Result<Self> {
        let arch: Architecture = serde_json::from_str(s)?;
        arch.validate()?;
        Ok(arch)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.top.validate()?;
        let mut ids = VarSet::new();
        for sf in &self.subfunctions {
            if ids.contains(&sf.id) {
                return Err(Error::Duplicate {
                    var: sf.id.clone(),
                    context: "sub-function ids".into(),
                });
            }
            ids.insert(crate::intervals::VarId::new(sf.id.clone(), ""))?;
            sf.validate(&self.constants)?;
        }
        let agg = aggregate_names(self)?;
        // a parameter must not double as a signal
        for (na, a, nb, b) in [
            ("controllable", &agg.c, "uncontrollable", &agg.u),
            ("controllable", &agg.c, "input", &agg.x),
            ("controllable", &agg.c, "output", &agg.y),
            ("uncontrollable", &agg.u, "input", &agg.x),
            ("uncontrollable", &agg.u, "output", &agg.y),
        ] {
            if let Some(v) = names_intersect(a, b).names().next() {
                return Err(Error::Validation(format!(
                    "`{v}` is declared both {na} and {nb}"
                )));
            }
        }
        if let Some(v) = names_intersect(&self.top.inputs.var_set(), &agg.y)
            .names()
            .next()
        {
            return Err(Error::Validation(format!(
                "top-level input `{v}` is produced inside the architecture"
            )));
        }
        self.producers()?;
        Ok(())
    }

    /// Output variable → producing sub-function id.
    pub fn producers(&self) -> Result<BTreeMap<String, String>> {
        let mut out: BTreeMap<String, String> = BTreeMap::new();
        for sf in &self.subfunctions {
            for v in sf.outputs.names() {
                if let Some(first) = out.get(v) {
                    return Err(Error::ProducerConflict {
                        var: v.to_string(),
                        first: first.clone(),
                        second: sf.id.clone(),
                    });
                }
                out.insert(v.to_string(), sf.id.clone());
            }
        }
        Ok(out)
    }

    pub fn producer_of(&self, var: &str) -> Option<&SubFunction> {
        self.subfunctions.iter().find(|s| s.outputs.contains(var))
    }

    /// Sub-functions reading `var` as an input, in declaration order.
    pub fn consumers_of(&self, var: &str) -> Vec<&SubFunction> {
        self.subfunctions
            .iter()
            .filter(|s| s.inputs.contains(var))
            .collect()
    }

    pub fn subfunction(&self, id: &str) -> Option<&SubFunction> {
        self.subfunctions.iter().find(|s| s.id == id)
    }

    /// Same architecture with a sub-function removed.
    pub fn without(&self, id: &str) -> Architecture {
        let mut a = self.clone();
        a.subfunctions.retain(|s| s.id != id);
        a
    }
}

pub fn aggregate_names(arch: &Architecture) -> Result<AggregatedNames> {
    let mut agg = AggregatedNames::default();
    for sf in &arch.subfunctions {
        agg.x = names_union(&agg.x, &sf.inputs.var_set())?;
        agg.y = names_union(&agg.y, &sf.outputs.var_set())?;
        agg.c = names_union(&agg.c, &sf.controllables.var_set())?;
        agg.u = names_union(&agg.u, &sf.uncontrollables.var_set())?;
    }
    Ok(agg)
}

/// `{x}⊑{x'} ∧ {c}⊑{c'} ∧ {u}⊑{u'} ∧ {y}⊑{y'}`; the error lists every
/// uncovered top-level variable.
pub fn validate_coverage(arch: &Architecture) -> Result<()> {
    let agg = aggregate_names(arch)?;
    let top = &arch.top;
    let pairs = [
        (top.inputs.var_set(), &agg.x),
        (top.controllables.var_set(), &agg.c),
        (top.uncontrollables.var_set(), &agg.u),
        (top.outputs.var_set(), &agg.y),
    ];
    let mut missing = Vec::new();
    for (need, have) in &pairs {
        if !names_subset(need, have) {
            missing.extend(need.minus(have).names().map(str::to_string));
        }
    }
    if missing.is_empty() {
        Ok(())
    } else {
        Err(Error::CoverageViolation { missing })
    }
}

pub fn classify(arch: &Architecture) -> Result<Classification> {
    arch.producers()?;
    validate_coverage(arch)?;
    let agg = aggregate_names(arch)?;
    let top = &arch.top;
    let x = top.inputs.var_set();
    let y = top.outputs.var_set();
    let c = top.controllables.var_set();
    let u = top.uncontrollables.var_set();
    let cls = Classification {
        x_tilde: agg.x.minus(&agg.y).minus(&x),
        c_tilde: agg.c.minus(&c),
        u_tilde: agg.u.minus(&u),
        y1: agg.y.minus(&y).minus(&agg.x),
        y2: names_intersect(&agg.y, &agg.x).minus(&y),
        y3: names_intersect(&y, &agg.x),
        y4: y.minus(&agg.x),
        x,
        c,
        u,
    };
    debug_assert!(groups_are_exclusive(&cls));
    Ok(cls)
}

fn groups_are_exclusive(cls: &Classification) -> bool {
    let groups = cls.groups();
    groups.iter().enumerate().all(|(i, (_, a))| {
        groups[i + 1..]
            .iter()
            .all(|(_, b)| names_intersect(a, b).is_empty())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intervals::Interval;

    fn rm(entries: &[(&str, f64, f64)]) -> RangeMap {
        entries
            .iter()
            .map(|(n, lo, hi)| (n.to_string(), Interval::unitless(*lo, *hi).unwrap()))
            .collect()
    }

    fn alg(id: &str, expr: &str, x: &[(&str, f64, f64)], y: &[(&str, f64, f64)]) -> SubFunction {
        SubFunction {
            id: id.into(),
            kind: Kind::Algebraic {
                expr: Expr::parse(expr).unwrap(),
            },
            inputs: rm(x),
            outputs: rm(y),
            controllables: RangeMap::new(),
            uncontrollables: RangeMap::new(),
        }
    }

    fn arch(top_x: &[(&str, f64, f64)], top_y: &[(&str, f64, f64)], sfs: Vec<SubFunction>) -> Architecture {
        Architecture {
            name: "t".into(),
            top: FunctionalRequirement::new("top", rm(top_x), RangeMap::new(), RangeMap::new(), rm(top_y))
                .unwrap(),
            constants: BTreeMap::new(),
            subfunctions: sfs,
            tradeoff: TradeoffSection::default(),
            nominal: BTreeMap::new(),
        }
    }

    fn names(s: &VarSet) -> Vec<&str> {
        s.names().collect()
    }

    #[test]
    fn single_block_output_is_y4_when_named_by_top() {
        let a = arch(
            &[("a", 0.0, 1.0)],
            &[("b", 0.0, 2.0)],
            vec![alg("f", r#"["*", 2, "a"]"#, &[("a", 0.0, 1.0)], &[("b", 0.0, 2.0)])],
        );
        let cls = classify(&a).unwrap();
        assert!(cls.x_tilde.is_empty());
        assert_eq!(names(&cls.y4), vec!["b"]);
        assert!(cls.y1.is_empty() && cls.y2.is_empty() && cls.y3.is_empty());
        let agg = aggregate_names(&a).unwrap();
        assert_eq!(names(&agg.x), vec!["a"]);
        assert_eq!(names(&agg.y), vec!["b"]);
    }

    #[test]
    fn unnamed_output_is_y1() {
        let a = arch(
            &[("a", 0.0, 1.0)],
            &[],
            vec![alg("f", r#"["*", 2, "a"]"#, &[("a", 0.0, 1.0)], &[("b", 0.0, 2.0)])],
        );
        let cls = classify(&a).unwrap();
        assert_eq!(names(&cls.y1), vec!["b"]);
    }

    #[test]
    fn chain_links_are_y2() {
        let a = arch(
            &[("a", 0.0, 1.0)],
            &[("d", 0.0, 8.0)],
            vec![
                alg("f", r#"["*", 2, "a"]"#, &[("a", 0.0, 1.0)], &[("b", 0.0, 2.0)]),
                alg("g", r#"["*", 2, "b"]"#, &[("b", 0.0, 2.0)], &[("c", 0.0, 4.0)]),
                alg("h", r#"["*", 2, "c"]"#, &[("c", 0.0, 4.0)], &[("d", 0.0, 8.0)]),
            ],
        );
        let cls = classify(&a).unwrap();
        assert_eq!(names(&cls.y2), vec!["b", "c"]);
        assert_eq!(names(&cls.y4), vec!["d"]);
        assert_eq!(names(&cls.x), vec!["a"]);
    }

    #[test]
    fn disjoint_blocks_aggregate_to_disjoint_union() {
        let a = arch(
            &[("a", 0.0, 1.0), ("p", 0.0, 1.0)],
            &[],
            vec![
                alg("f", r#"["*", 2, "a"]"#, &[("a", 0.0, 1.0)], &[("b", 0.0, 2.0)]),
                alg("g", r#"["*", 2, "p"]"#, &[("p", 0.0, 1.0)], &[("q", 0.0, 2.0)]),
            ],
        );
        let agg = aggregate_names(&a).unwrap();
        assert_eq!(names(&agg.x), vec!["a", "p"]);
        assert_eq!(names(&agg.y), vec!["b", "q"]);
    }

    #[test]
    fn empty_architecture_does_not_cover_top() {
        let a = arch(&[("a", 0.0, 1.0)], &[("b", 0.0, 1.0)], vec![]);
        assert_eq!(
            validate_coverage(&a),
            Err(Error::CoverageViolation {
                missing: vec!["a".into(), "b".into()]
            })
        );
    }

    #[test]
    fn two_producers_conflict() {
        let a = arch(
            &[("a", 0.0, 1.0)],
            &[],
            vec![
                alg("f", r#"["*", 2, "a"]"#, &[("a", 0.0, 1.0)], &[("b", 0.0, 2.0)]),
                alg("g", r#"["*", 3, "a"]"#, &[("a", 0.0, 1.0)], &[("b", 0.0, 3.0)]),
            ],
        );
        assert!(matches!(classify(&a), Err(Error::ProducerConflict { .. })));
    }

    #[test]
    fn undeclared_reference_is_rejected() {
        let a = arch(
            &[("a", 0.0, 1.0)],
            &[],
            vec![alg("f", r#"["*", "k", "a"]"#, &[("a", 0.0, 1.0)], &[("b", 0.0, 2.0)])],
        );
        assert!(matches!(a.validate(), Err(Error::Validation(_))));
        let mut with_const = a.clone();
        with_const.constants.insert("k".into(), 2.0);
        assert!(with_const.validate().is_ok());
    }

    #[test]
    fn unused_constant_leaves_classification_unchanged() {
        let a = arch(
            &[("a", 0.0, 1.0)],
            &[("b", 0.0, 2.0)],
            vec![alg("f", r#"["*", 2, "a"]"#, &[("a", 0.0, 1.0)], &[("b", 0.0, 2.0)])],
        );
        let mut b = a.clone();
        b.constants.insert("unused".into(), 42.0);
        assert_eq!(classify(&a).unwrap(), classify(&b).unwrap());
    }
}
