//! The end-to-end run: classify, narrow, trade off, assemble, check.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::architecture::Architecture;
use crate::error::{Error, Result};
use crate::intervals::{Bounds, RangeMap};
use crate::narrowing::{narrow, LogEntry, NarrowingConfig, Warning};
use crate::requirements::{
    check_composable, check_refines_with, compose, FunctionalRequirement, RefinementMode,
    TimedWindow, Verdict, Witness,
};
use crate::simulation::{design_variables, DesignPoint, SamplingEngine, SamplingPlan, SimConfig};
use crate::tradeoff::{
    assemble_subrequirements, solve_tradeoff, BracketSet, Constraints, PreferenceWeights,
    SolverConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub sim: SimConfig,
    pub plan: SamplingPlan,
    pub bisections: usize,
    pub solver: SolverConfig,
    pub refinement: RefinementMode,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            sim: SimConfig::default(),
            plan: SamplingPlan::default(),
            bisections: 12,
            solver: SolverConfig::default(),
            refinement: RefinementMode::Standard,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.sim.steps()?;
        if self.plan.grid == 0 || self.plan.cap == 0 {
            return Err(Error::Validation("sampling grid and cap must be positive".into()));
        }
        if !(self.plan.padding >= 0.0 && self.plan.padding.is_finite()) {
            return Err(Error::Validation("padding must be non-negative".into()));
        }
        if self.solver.max_iters == 0 {
            return Err(Error::Validation("solver iteration budget must be positive".into()));
        }
        Ok(())
    }

    fn narrowing(&self) -> NarrowingConfig {
        NarrowingConfig {
            plan: self.plan,
            probe: SamplingPlan::coarse(0.0),
            bisections: self.bisections,
        }
    }
}

/// Pairwise composability results and the refinement verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawReport {
    pub links: Vec<Link>,
    pub refinement: Verdict,
    pub mode: RefinementMode,
}

impl LawReport {
    pub fn holds(&self) -> bool {
        self.refinement.holds() && self.links.iter().all(|l| l.witness.is_none())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub producer: String,
    pub consumer: String,
    pub shared: Vec<String>,
    pub witness: Option<Witness>,
}

/// Composability of every linked pair plus refinement of `top` by the
/// composition of `parts`.
pub fn check_laws(
    top: &FunctionalRequirement,
    parts: &[FunctionalRequirement],
    mode: RefinementMode,
) -> Result<LawReport> {
    let mut links = Vec::new();
    for j in parts {
        for k in parts {
            let c = check_composable(j, k);
            if c.witness == Some(Witness::NothingShared) {
                continue;
            }
            links.push(Link {
                producer: j.name.clone(),
                consumer: k.name.clone(),
                shared: c.shared,
                witness: c.witness,
            });
        }
    }
    let refinement = if links.iter().any(|l| l.witness.is_some()) {
        // a non-composable set has no composition to refine with
        Verdict {
            witness: links.iter().find_map(|l| l.witness.clone()),
        }
    } else {
        let composite = compose(parts)?;
        check_refines_with(&composite.interface, top, mode)
    };
    Ok(LawReport {
        links,
        refinement,
        mode,
    })
}

/// Reads one requirement or an array of them.
pub fn load_requirements(path: impl AsRef<Path>) -> Result<Vec<FunctionalRequirement>> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let frs: Vec<FunctionalRequirement> = match value {
        serde_json::Value::Array(_) => serde_json::from_value(value)?,
        _ => vec![serde_json::from_value(value)?],
    };
    for fr in &frs {
        fr.validate()?;
    }
    Ok(frs)
}

/// One compared number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Delta {
    pub section: String,
    pub var: String,
    pub bound: String,
    pub ours: f64,
    pub reference: f64,
    /// `|ours − reference| / |reference|` (absolute difference when the
    /// reference is zero).
    pub relative: f64,
}

/// Reference values keyed by section (`fds1`, `fps1`, `fds2`, `fps2`,
/// `fps_star`), then variable.
pub type Golden = BTreeMap<String, BTreeMap<String, Bounds>>;

pub fn load_golden(path: impl AsRef<Path>) -> Result<Golden> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn relative_delta(ours: f64, reference: f64) -> f64 {
    let d = (ours - reference).abs();
    if reference == 0.0 {
        d
    } else {
        d / reference.abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffSummary {
    pub objective: f64,
    pub initial_objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub restoration: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub architecture: String,
    /// Group name → variables.
    pub classification: BTreeMap<String, Vec<String>>,
    pub fds1: RangeMap,
    pub fps1: RangeMap,
    pub fds2: RangeMap,
    pub fps2: RangeMap,
    pub fps2_windows: Vec<TimedWindow>,
    pub fps_star: RangeMap,
    pub tradeoff: TradeoffSummary,
    pub subrequirements: Vec<FunctionalRequirement>,
    pub laws: LawReport,
    pub warnings: Vec<Warning>,
    pub log: Vec<LogEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub comparison: Vec<Delta>,
}

impl PipelineReport {
    pub fn section(&self, name: &str) -> Option<&RangeMap> {
        match name {
            "fds1" => Some(&self.fds1),
            "fps1" => Some(&self.fps1),
            "fds2" => Some(&self.fds2),
            "fps2" => Some(&self.fps2),
            "fps_star" => Some(&self.fps_star),
            _ => None,
        }
    }

    /// Fills `comparison` with a delta for every bound the reference names.
    pub fn compare(&mut self, golden: &Golden) {
        let mut out = Vec::new();
        for (section, vars) in golden {
            let Some(ours) = self.section(section) else { continue };
            for (var, reference) in vars {
                let Some(iv) = ours.get(var) else { continue };
                for (bound, o, r) in [("lo", iv.lo(), reference.lo), ("hi", iv.hi(), reference.hi)] {
                    out.push(Delta {
                        section: section.clone(),
                        var: var.clone(),
                        bound: bound.into(),
                        ours: o,
                        reference: r,
                        relative: relative_delta(o, r),
                    });
                }
            }
        }
        self.comparison = out;
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// `section,var,lo,hi,unit` rows for every space.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("section,var,lo,hi,unit\n");
        for section in ["fds1", "fps1", "fds2", "fps2", "fps_star"] {
            for (var, iv) in self.section(section).unwrap().iter() {
                let _ = writeln!(out, "{section},{var},{},{},{}", iv.lo(), iv.hi(), iv.unit());
            }
        }
        out
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# Decomposition of `{}`\n", self.architecture);
        s.push_str("## Classification\n\n| group | variables |\n|---|---|\n");
        for (g, vars) in &self.classification {
            let _ = writeln!(s, "| {g} | {} |", if vars.is_empty() { "∅".into() } else { vars.join(", ") });
        }
        for (title, m) in [
            ("Initial design space (FDS¹)", &self.fds1),
            ("Initial performance space (FPS¹)", &self.fps1),
            ("Narrowed design space (FDS²)", &self.fds2),
            ("Achievable performance space (FPS²)", &self.fps2),
            ("Sub-requirement outputs (FPS*)", &self.fps_star),
        ] {
            let _ = writeln!(s, "\n## {title}\n\n| variable | lo | hi | unit |\n|---|---|---|---|");
            for (v, iv) in m.iter() {
                let _ = writeln!(s, "| {v} | {:.4} | {:.4} | {} |", iv.lo(), iv.hi(), iv.unit());
            }
        }
        if !self.fps2_windows.is_empty() {
            s.push_str("\n### Windows\n\n| variable | t | lo | hi |\n|---|---|---|---|\n");
            for w in &self.fps2_windows {
                let _ = writeln!(
                    s,
                    "| {} | [{}, {}] | {:.4} | {:.4} |",
                    w.var,
                    w.t_start,
                    w.t_end,
                    w.range.lo(),
                    w.range.hi()
                );
            }
        }
        let t = &self.tradeoff;
        let _ = writeln!(
            s,
            "\n## Trade-off\n\nobjective {:.6} (from {:.6}), {} iterations, {}",
            t.objective,
            t.initial_objective,
            t.iterations,
            if t.converged { "converged" } else { "iteration budget reached" }
        );
        if !t.restoration.is_empty() {
            s.push_str("\nRestoration:\n\n");
            for r in &t.restoration {
                let _ = writeln!(s, "- {r}");
            }
        }
        s.push_str("\n## Sub-requirements\n\n| sub-function | inputs | parameters | output |\n|---|---|---|---|\n");
        let fmt = |m: &RangeMap| {
            m.iter()
                .map(|(v, iv)| format!("{v} ∈ [{:.4}, {:.4}]", iv.lo(), iv.hi()))
                .collect::<Vec<_>>()
                .join("<br>")
        };
        for fr in &self.subrequirements {
            let params: RangeMap = fr
                .controllables
                .iter()
                .chain(fr.uncontrollables.iter())
                .map(|(v, iv)| (v.to_string(), iv.clone()))
                .collect();
            let mut out = fmt(&fr.outputs);
            for w in &fr.windows {
                let _ = write!(
                    out,
                    "<br>{} ∈ [{:.4}, {:.4}] for t ∈ [{}, {}]",
                    w.var,
                    w.range.lo(),
                    w.range.hi(),
                    w.t_start,
                    w.t_end
                );
            }
            let _ = writeln!(s, "| {} | {} | {} | {} |", fr.name, fmt(&fr.inputs), fmt(&params), out);
        }
        s.push_str("\n## Law checks\n\n| producer | consumer | shared | composable |\n|---|---|---|---|\n");
        for l in &self.laws.links {
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} |",
                l.producer,
                l.consumer,
                l.shared.join(", "),
                match &l.witness {
                    None => "yes".to_string(),
                    Some(w) => format!("no: {w}"),
                }
            );
        }
        let _ = writeln!(
            s,
            "\nComposition refines the top-level requirement ({:?}): {}",
            self.laws.mode,
            match &self.laws.refinement.witness {
                None => "yes".to_string(),
                Some(w) => format!("no: {w}"),
            }
        );
        if !self.warnings.is_empty() {
            s.push_str("\n## Warnings\n\n");
            for w in &self.warnings {
                let _ = writeln!(s, "- {w}");
            }
        }
        if !self.comparison.is_empty() {
            s.push_str("\n## Comparison\n\n| section | variable | bound | ours | reference | relative delta |\n|---|---|---|---|---|---|\n");
            for d in &self.comparison {
                let _ = writeln!(
                    s,
                    "| {} | {} | {} | {:.4} | {:.4} | {:.2}% |",
                    d.section,
                    d.var,
                    d.bound,
                    d.ours,
                    d.reference,
                    100.0 * d.relative
                );
            }
        }
        s
    }
}

/// Runs every stage on a validated architecture.
pub fn run_pipeline(arch: &Architecture, cfg: &RunConfig) -> Result<PipelineReport> {
    cfg.validate()?;
    let engine = SamplingEngine { sim: cfg.sim };
    let (cls, spaces) = narrow(arch, &engine, &cfg.narrowing())?;

    let brackets = BracketSet::from_spaces(&spaces.fps1, &spaces.fps2)?;
    let weights = PreferenceWeights::from_architecture(arch)?;
    let constraints = Constraints::new(arch, &spaces.fds2);
    let sol = solve_tradeoff(&brackets, &weights, Some(constraints), &cfg.solver)?;
    let subs = assemble_subrequirements(arch, &spaces.fds2, &sol.fps_star, &spaces.fps2_windows)?;
    let laws = check_laws(&arch.top, &subs.requirements, cfg.refinement)?;
    if let Some(w) = &laws.refinement.witness {
        return Err(Error::PostconditionFailure {
            law: format!("composition refines the top-level requirement ({:?})", cfg.refinement),
            witness: w.to_string(),
        });
    }

    Ok(PipelineReport {
        architecture: arch.name.clone(),
        classification: cls
            .groups()
            .iter()
            .map(|(g, s)| (g.to_string(), s.names().map(str::to_string).collect()))
            .collect(),
        fds1: spaces.fds1,
        fps1: spaces.fps1,
        fds2: spaces.fds2,
        fps2: spaces.fps2,
        fps2_windows: spaces.fps2_windows,
        fps_star: sol.fps_star,
        tradeoff: TradeoffSummary {
            objective: sol.objective,
            initial_objective: sol.initial_objective,
            iterations: sol.iterations,
            converged: sol.converged,
            restoration: sol.restoration,
        },
        subrequirements: subs.requirements,
        laws,
        warnings: spaces.warnings,
        log: spaces.log,
        comparison: Vec::new(),
    })
}

/// Nominal point of the architecture, with `overrides` applied; variables
/// without a nominal value take the midpoint of their declared range.
pub fn design_point(arch: &Architecture, overrides: &DesignPoint) -> Result<DesignPoint> {
    let agg = crate::narrowing::aggregate_ranges(arch)?;
    let mut point = DesignPoint::new();
    for v in design_variables(arch)?.names() {
        let value = overrides
            .get(v)
            .or_else(|| arch.nominal.get(v))
            .copied()
            .or_else(|| arch.top.inputs.get(v).map(|iv| iv.mid()))
            .or_else(|| agg.x.get(v).or(agg.c.get(v)).or(agg.u.get(v)).map(|iv| iv.mid()))
            .ok_or_else(|| Error::NotFound(v.to_string()))?;
        point.insert(v.to_string(), value);
    }
    for k in overrides.keys() {
        if !point.contains_key(k) {
            return Err(Error::Validation(format!("`{k}` is not a design variable")));
        }
    }
    Ok(point)
}

/// Process exit code for a failed run: 2 invalid input, 3 infeasible,
/// 4 law violation.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Sample { source, .. } => exit_code(source),
        Error::EmptyRange { .. }
        | Error::RangeNotContained { .. }
        | Error::Infeasible(_)
        | Error::InfeasibleBrackets(_)
        | Error::NoInteriorPoint(_)
        | Error::BoundaryContact(_)
        | Error::NonFinite { .. } => 3,
        Error::PostconditionFailure { .. } | Error::NotComposable { .. } => 4,
        _ => 2,
    }
}
