//! Sub-requirement ranges between FPS² and FPS¹.
//!
//! Every produced variable `y` gets a range `[lo, hi]` with
//! `l1 ≤ lo ≤ l2` and `u2 ≤ hi ≤ u1`, where `[l1, u1]` is its FPS¹ range and
//! `[l2, u2]` its FPS² range. The producer prefers a wide range (it has to
//! guarantee less), each consumer a narrow one (it has to accept less):
//!
//! ```text
//! h    = −a   (ln(hi − u2) + ln(l2 − lo))     producer
//! h^k  = −a^k (ln(u1 − hi) + ln(lo − l1))     consumer k
//! ```
//!
//! The sum is minimized subject to interval-extension containment: for each
//! algebraic sub-function, its image over the chosen input ranges must lie in
//! the chosen output range.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::architecture::{Architecture, Kind};
use crate::error::{Error, Result};
use crate::intervals::{Bounds, Interval, RangeMap};
use crate::requirements::{
    check_composable, check_refines, compose, FunctionalRequirement, TimedWindow, Witness,
};

pub const DEFAULT_WEIGHT: f64 = 0.5;

/// Weights for one output variable, as written in an architecture file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub producer: Option<f64>,
    /// Consumer sub-function id → weight.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub consumers: BTreeMap<String, f64>,
}

/// `(l1, l2, u2, u1)` for one variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub l1: f64,
    pub l2: f64,
    pub u2: f64,
    pub u1: f64,
}

impl Bracket {
    pub fn new(l1: f64, l2: f64, u2: f64, u1: f64) -> Self {
        Self { l1, l2, u2, u1 }
    }

    fn ordered(&self) -> bool {
        self.l1 <= self.l2 && self.l2 <= self.u2 && self.u2 <= self.u1
    }

    fn span(&self) -> f64 {
        (self.u1 - self.l1).max(f64::MIN_POSITIVE)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BracketSet {
    pub brackets: BTreeMap<String, Bracket>,
    /// Unit of every bracketed variable.
    pub units: BTreeMap<String, String>,
}

impl BracketSet {
    /// Brackets for every variable present in both spaces.
    pub fn from_spaces(fps1: &RangeMap, fps2: &RangeMap) -> Result<Self> {
        let mut out = BracketSet::default();
        for (var, outer) in fps1.iter() {
            let Some(inner) = fps2.get(var) else { continue };
            let b = Bracket::new(outer.lo(), inner.lo(), inner.hi(), outer.hi());
            if !b.ordered() {
                return Err(Error::InfeasibleBrackets(var.to_string()));
            }
            out.brackets.insert(var.to_string(), b);
            out.units.insert(var.to_string(), outer.unit().to_string());
        }
        Ok(out)
    }

    pub fn get(&self, var: &str) -> Option<&Bracket> {
        self.brackets.get(var)
    }
}

/// Producer weight `a` and summed consumer weight `A` of one variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarWeights {
    pub producer: f64,
    pub consumer: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PreferenceWeights {
    pub producer: BTreeMap<String, f64>,
    /// Variable → consumer id → weight.
    pub consumers: BTreeMap<String, BTreeMap<String, f64>>,
}

impl PreferenceWeights {
    /// One producer weight per produced variable and one consumer weight per
    /// consuming sub-function; anything not given defaults to 0.5.
    pub fn from_architecture(arch: &Architecture) -> Result<Self> {
        let producers = arch.producers()?;
        for (var, given) in &arch.tradeoff.weights {
            if !producers.contains_key(var) {
                return Err(Error::Validation(format!(
                    "weights given for `{var}`, which no sub-function produces"
                )));
            }
            for k in given.consumers.keys() {
                if !arch.consumers_of(var).iter().any(|s| &s.id == k) {
                    return Err(Error::Validation(format!(
                        "weight given for `{k}` consuming `{var}`, but `{k}` does not read it"
                    )));
                }
            }
        }
        let mut w = PreferenceWeights::default();
        for var in producers.keys() {
            let given = arch.tradeoff.weights.get(var);
            let a = given.and_then(|s| s.producer).unwrap_or(DEFAULT_WEIGHT);
            check_weight(var, a)?;
            w.producer.insert(var.clone(), a);
            let mut cons = BTreeMap::new();
            for sf in arch.consumers_of(var) {
                let ak = given
                    .and_then(|s| s.consumers.get(&sf.id).copied())
                    .unwrap_or(DEFAULT_WEIGHT);
                check_weight(var, ak)?;
                cons.insert(sf.id.clone(), ak);
            }
            w.consumers.insert(var.clone(), cons);
        }
        Ok(w)
    }

    pub fn of(&self, var: &str) -> VarWeights {
        VarWeights {
            producer: self.producer.get(var).copied().unwrap_or(0.0),
            consumer: self
                .consumers
                .get(var)
                .map(|m| m.values().sum())
                .unwrap_or(0.0),
        }
    }

    /// Every weight multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            producer: self.producer.iter().map(|(v, a)| (v.clone(), a * k)).collect(),
            consumers: self
                .consumers
                .iter()
                .map(|(v, m)| (v.clone(), m.iter().map(|(id, a)| (id.clone(), a * k)).collect()))
                .collect(),
        }
    }
}

fn check_weight(var: &str, a: f64) -> Result<()> {
    if a.is_finite() && a >= 0.0 {
        Ok(())
    } else {
        Err(Error::Validation(format!("weight {a} for `{var}` must be finite and non-negative")))
    }
}

/// The four distances the barrier terms take logarithms of:
/// `(hi − u2, l2 − lo, u1 − hi, lo − l1)`.
fn distances(b: &Bracket, lo: f64, hi: f64) -> [f64; 4] {
    [hi - b.u2, b.l2 - lo, b.u1 - hi, lo - b.l1]
}

/// Barrier value of one variable; terms with zero weight are absent.
pub fn barrier_value(var: &str, b: &Bracket, w: VarWeights, lo: f64, hi: f64) -> Result<f64> {
    let d = distances(b, lo, hi);
    let mut h = 0.0;
    for (i, weight) in [(0, w.producer), (1, w.producer), (2, w.consumer), (3, w.consumer)] {
        if weight == 0.0 {
            continue;
        }
        if !(d[i] > 0.0) {
            return Err(Error::BoundaryContact(var.to_string()));
        }
        h -= weight * d[i].ln();
    }
    Ok(h)
}

/// `(∂h/∂lo, ∂h/∂hi)`.
pub fn barrier_gradient(b: &Bracket, w: VarWeights, lo: f64, hi: f64) -> (f64, f64) {
    let [dp_hi, dp_lo, dc_hi, dc_lo] = distances(b, lo, hi);
    let mut g_lo = 0.0;
    let mut g_hi = 0.0;
    if w.producer != 0.0 {
        g_hi -= w.producer / dp_hi;
        g_lo += w.producer / dp_lo;
    }
    if w.consumer != 0.0 {
        g_hi += w.consumer / dc_hi;
        g_lo -= w.consumer / dc_lo;
    }
    (g_lo, g_hi)
}

/// `(∂²h/∂lo², ∂²h/∂hi²)`; the barrier is separable so this is the whole
/// Hessian.
pub fn barrier_curvature(b: &Bracket, w: VarWeights, lo: f64, hi: f64) -> (f64, f64) {
    let [dp_hi, dp_lo, dc_hi, dc_lo] = distances(b, lo, hi);
    let sq = |weight: f64, d: f64| if weight == 0.0 { 0.0 } else { weight / (d * d) };
    (
        sq(w.producer, dp_lo) + sq(w.consumer, dc_lo),
        sq(w.producer, dp_hi) + sq(w.consumer, dc_hi),
    )
}

/// Minimizer of the barrier alone: `hi = (a·u1 + A·u2)/(a + A)`,
/// `lo = (a·l1 + A·l2)/(a + A)`. With no weight at all the bracket midpoints.
pub fn unconstrained_optimum(b: &Bracket, w: VarWeights) -> (f64, f64) {
    let s = w.producer + w.consumer;
    if s == 0.0 {
        return (0.5 * (b.l1 + b.l2), 0.5 * (b.u2 + b.u1));
    }
    (
        (w.producer * b.l1 + w.consumer * b.l2) / s,
        (w.producer * b.u1 + w.consumer * b.u2) / s,
    )
}

/// An algebraic sub-function whose image is not inside its output range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub subfunction: String,
    pub var: String,
    pub image: Bounds,
    pub range: Bounds,
}

impl Violation {
    /// How far the image sticks out below and above the range.
    pub fn margin(&self) -> (f64, f64) {
        (
            (self.range.lo - self.image.lo).max(0.0),
            (self.image.hi - self.range.hi).max(0.0),
        )
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (below, above) = self.margin();
        write!(
            f,
            "`{}`: image of `{}` {} exceeds {} (by {below} below, {above} above)",
            self.subfunction, self.var, self.image, self.range
        )
    }
}

/// Containment constraints of every algebraic sub-function.
#[derive(Debug, Clone, Copy)]
pub struct Constraints<'a> {
    pub arch: &'a Architecture,
    /// Ranges of the design variables.
    pub fds2: &'a RangeMap,
}

type Candidate = BTreeMap<String, Bounds>;

impl<'a> Constraints<'a> {
    pub fn new(arch: &'a Architecture, fds2: &'a RangeMap) -> Self {
        Self { arch, fds2 }
    }

    fn env<'c>(&'c self, cand: &'c Candidate) -> impl Fn(&str) -> Option<Bounds> + 'c {
        move |n: &str| {
            if let Some(c) = self.arch.constants.get(n) {
                return Some(Bounds::point(*c));
            }
            cand.get(n)
                .copied()
                .or_else(|| self.fds2.get(n).map(Interval::bounds))
        }
    }

    /// `(sub-function, output, image)` for every algebraic sub-function.
    fn images(&self, cand: &Candidate) -> Result<Vec<(String, String, Bounds)>> {
        let env = self.env(cand);
        let mut out = Vec::new();
        for sf in &self.arch.subfunctions {
            if let Kind::Algebraic { expr } = &sf.kind {
                let img = expr.eval_bounds(&env)?;
                out.push((sf.id.clone(), sf.output().to_string(), img));
            }
        }
        Ok(out)
    }

    fn image_of(&self, id: &str, cand: &Candidate) -> Result<Bounds> {
        let sf = self
            .arch
            .subfunction(id)
            .ok_or_else(|| Error::NotFound(id.to_string()))?;
        match &sf.kind {
            Kind::Algebraic { expr } => expr.eval_bounds(&self.env(cand)),
            Kind::Integrator { .. } => Err(Error::Validation(format!("`{id}` integrates"))),
        }
    }

    fn violations_of(&self, cand: &Candidate) -> Result<Vec<Violation>> {
        Ok(self
            .images(cand)?
            .into_iter()
            .filter_map(|(sf, var, image)| {
                let range = *cand.get(&var)?;
                (!range.contains_bounds(&image)).then_some(Violation {
                    subfunction: sf,
                    var,
                    image,
                    range,
                })
            })
            .collect())
    }

    /// Every violated containment for the candidate output ranges.
    pub fn violations(&self, fps_star: &RangeMap) -> Result<Vec<Violation>> {
        let cand = fps_star
            .iter()
            .map(|(k, v)| (k.to_string(), v.bounds()))
            .collect();
        self.violations_of(&cand)
    }
}

/// Standalone form of [`Constraints::violations`].
pub fn containment_constraints(
    arch: &Architecture,
    fds2: &RangeMap,
    fps_star: &RangeMap,
) -> Result<Vec<Violation>> {
    Constraints::new(arch, fds2).violations(fps_star)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Stop once the largest step, relative to the FPS¹ span, falls below this.
    pub tolerance: f64,
    /// Rounds of input shrinking allowed while restoring feasibility.
    pub restoration_rounds: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 10_000,
            tolerance: 1e-9,
            restoration_rounds: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Newton,
    Coordinate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub iteration: usize,
    pub objective: f64,
    pub step: f64,
    pub kind: StepKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffSolution {
    pub fps_star: RangeMap,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective at the first feasible point, before descent.
    pub initial_objective: f64,
    pub trace: Vec<TraceStep>,
    /// Actions taken to reach a feasible starting point.
    pub restoration: Vec<String>,
    /// Minimizer ignoring containment.
    pub unconstrained: BTreeMap<String, Bounds>,
}

/// Coordinates are `(var, is_upper)`, in canonical variable order.
struct Problem<'a> {
    vars: Vec<String>,
    brackets: &'a BracketSet,
    weights: Vec<VarWeights>,
    constraints: Option<Constraints<'a>>,
}

impl<'a> Problem<'a> {
    fn bracket(&self, i: usize) -> &Bracket {
        &self.brackets.brackets[&self.vars[i]]
    }

    fn to_candidate(&self, x: &[f64]) -> Candidate {
        self.vars
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), Bounds::new(x[2 * i], x[2 * i + 1])))
            .collect()
    }

    fn objective(&self, x: &[f64]) -> f64 {
        let mut f = 0.0;
        for i in 0..self.vars.len() {
            match barrier_value(&self.vars[i], self.bracket(i), self.weights[i], x[2 * i], x[2 * i + 1]) {
                Ok(h) => f += h,
                Err(_) => return f64::INFINITY,
            }
        }
        f
    }

    fn gradient(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut g = vec![0.0; x.len()];
        let mut h = vec![0.0; x.len()];
        for i in 0..self.vars.len() {
            let (b, w) = (self.bracket(i), self.weights[i]);
            let (gl, gh) = barrier_gradient(b, w, x[2 * i], x[2 * i + 1]);
            let (hl, hh) = barrier_curvature(b, w, x[2 * i], x[2 * i + 1]);
            g[2 * i] = gl;
            g[2 * i + 1] = gh;
            h[2 * i] = hl;
            h[2 * i + 1] = hh;
        }
        (g, h)
    }

    fn project(&self, x: &mut [f64]) {
        for i in 0..self.vars.len() {
            let b = *self.bracket(i);
            x[2 * i] = x[2 * i].clamp(b.l1, b.l2);
            x[2 * i + 1] = x[2 * i + 1].clamp(b.u2, b.u1);
        }
    }

    fn index(&self, var: &str) -> Option<usize> {
        self.vars.binary_search_by(|v| v.as_str().cmp(var)).ok()
    }

    /// Grows violated outputs to their images, clipped to FPS¹. Returns the
    /// violations that remain, which are exactly the clipped ones.
    fn expand(&self, x: &mut [f64]) -> Result<Vec<Violation>> {
        let Some(c) = &self.constraints else {
            return Ok(Vec::new());
        };
        // the algebraic part is acyclic, so growth settles within one pass
        // per sub-function
        for _ in 0..=c.arch.subfunctions.len() {
            let vs = c.violations_of(&self.to_candidate(x))?;
            let mut changed = false;
            for v in &vs {
                let Some(i) = self.index(&v.var) else { continue };
                let b = *self.bracket(i);
                let grown = v.range.hull(&v.image);
                let (lo, hi) = (grown.lo.max(b.l1), grown.hi.min(b.u1));
                changed |= lo != x[2 * i] || hi != x[2 * i + 1];
                x[2 * i] = lo;
                x[2 * i + 1] = hi;
            }
            if !changed {
                return Ok(vs);
            }
        }
        c.violations_of(&self.to_candidate(x))
    }

    /// Moves every input bound of `id` that reduces the escaping side of its
    /// image halfway toward its FPS² bound.
    /// `x` is the expanded point the violation was found at; moves are
    /// written to `base`.
    fn shrink_inputs(
        &self,
        x: &[f64],
        base_x: &mut [f64],
        id: &str,
        v: &Violation,
        log: &mut Vec<String>,
    ) -> Result<bool> {
        let c = self.constraints.as_ref().unwrap();
        let sf = c.arch.subfunction(id).unwrap();
        let base = self.to_candidate(x);
        let b_out = self.bracket(self.index(&v.var).unwrap());
        let low_escape = v.image.lo < b_out.l1;
        let high_escape = v.image.hi > b_out.u1;
        let mut moves = Vec::new();
        for input in sf.inputs.names() {
            let Some(i) = self.index(input) else { continue };
            let b = *self.bracket(i);
            for (k, target) in [(2 * i, b.l2), (2 * i + 1, b.u2)] {
                if x[k] == target {
                    continue;
                }
                let trial = 0.5 * (x[k] + target);
                let mut cand = base.clone();
                let r = cand.get_mut(input).unwrap();
                if k % 2 == 0 {
                    r.lo = trial;
                } else {
                    r.hi = trial;
                }
                let img = c.image_of(id, &cand)?;
                let better = (low_escape && img.lo > v.image.lo) || (high_escape && img.hi < v.image.hi);
                if better {
                    moves.push((k, trial, input.to_string()));
                }
            }
        }
        for (k, trial, input) in &moves {
            let side = if k % 2 == 0 { "lower" } else { "upper" };
            log.push(format!(
                "`{id}` image of `{}` leaves FPS¹: {side} bound of `{input}` moved to {trial}",
                v.var
            ));
            base_x[*k] = *trial;
        }
        Ok(!moves.is_empty())
    }

    /// A point satisfying every containment constraint.
    ///
    /// Shrinks act on `x` itself and every round re-expands a copy of it, so
    /// an output clipped in an early round does not stay stuck on FPS¹.
    fn restore(&self, x: &mut [f64], cfg: &SolverConfig, log: &mut Vec<String>) -> Result<()> {
        for _ in 0..cfg.restoration_rounds {
            let mut grown = x.to_vec();
            let clipped = self.expand(&mut grown)?;
            if clipped.is_empty() {
                x.copy_from_slice(&grown);
                return Ok(());
            }
            let mut moved = false;
            for v in &clipped {
                moved |= self.shrink_inputs(&grown, x, &v.subfunction, v, log)?;
            }
            if !moved {
                break;
            }
        }
        let left = self.expand(x)?;
        match left.first() {
            None => Ok(()),
            Some(v) => Err(Error::Infeasible(format!(
                "containment cannot be restored inside FPS¹: {v}"
            ))),
        }
    }

    /// Projection onto the brackets followed by expand-only restoration;
    /// `None` if the constraints cannot hold inside FPS¹.
    fn admissible(&self, mut x: Vec<f64>) -> Result<Option<Vec<f64>>> {
        self.project(&mut x);
        if self.expand(&mut x)?.is_empty() {
            Ok(Some(x))
        } else {
            Ok(None)
        }
    }

    fn step_norm(&self, a: &[f64], b: &[f64]) -> f64 {
        (0..a.len())
            .map(|k| (a[k] - b[k]).abs() / self.bracket(k / 2).span())
            .fold(0.0, f64::max)
    }
}

/// Minimizes the barrier objective over the brackets, subject to the
/// containment constraints when given.
///
/// Starts at the bracket midpoints, restores feasibility, then runs projected
/// diagonal-Newton steps with backtracking, falling back to single-coordinate
/// steps when the full step cannot decrease the objective.
pub fn solve_tradeoff(
    brackets: &BracketSet,
    weights: &PreferenceWeights,
    constraints: Option<Constraints<'_>>,
    cfg: &SolverConfig,
) -> Result<TradeoffSolution> {
    let vars: Vec<String> = brackets.brackets.keys().cloned().collect();
    let ws: Vec<VarWeights> = vars.iter().map(|v| weights.of(v)).collect();
    for (v, w) in vars.iter().zip(&ws) {
        let b = &brackets.brackets[v];
        if !b.ordered() {
            return Err(Error::InfeasibleBrackets(v.clone()));
        }
        let weighted = w.producer > 0.0 || w.consumer > 0.0;
        if weighted && (b.l1 == b.l2 || b.u2 == b.u1) {
            return Err(Error::NoInteriorPoint(v.clone()));
        }
    }
    let p = Problem {
        vars,
        brackets,
        weights: ws,
        constraints,
    };
    let unconstrained = p
        .vars
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let (lo, hi) = unconstrained_optimum(p.bracket(i), p.weights[i]);
            (v.clone(), Bounds::new(lo, hi))
        })
        .collect();

    let mut x: Vec<f64> = (0..p.vars.len())
        .flat_map(|i| {
            let b = p.bracket(i);
            [0.5 * (b.l1 + b.l2), 0.5 * (b.u2 + b.u1)]
        })
        .collect();
    let mut restoration = Vec::new();
    p.restore(&mut x, cfg, &mut restoration)?;
    let mut f = p.objective(&x);
    if !f.is_finite() {
        let var = p.vars.iter().enumerate().find(|(i, v)| {
            barrier_value(v, p.bracket(*i), p.weights[*i], x[2 * i], x[2 * i + 1]).is_err()
        });
        return Err(Error::BoundaryContact(
            var.map(|(_, v)| v.clone()).unwrap_or_default(),
        ));
    }
    let initial_objective = f;

    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_iters {
        iterations += 1;
        let (g, h) = p.gradient(&x);
        let dir: Vec<f64> = (0..x.len())
            .map(|k| {
                let b = p.bracket(k / 2);
                // coordinates without curvature get a step scaled to the bracket
                let scale = if h[k] > 0.0 { 1.0 / h[k] } else { b.span() * b.span() };
                -g[k] * scale
            })
            .collect();

        let mut accepted: Option<(Vec<f64>, f64, StepKind)> = None;
        let mut t = 1.0;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(&dir).map(|(a, d)| a + t * d).collect();
            if let Some(cand) = p.admissible(trial)? {
                let fc = p.objective(&cand);
                if fc < f {
                    accepted = Some((cand, fc, StepKind::Newton));
                    break;
                }
            }
            t *= 0.5;
        }
        if accepted.is_none() {
            let mut y = x.clone();
            let mut fy = f;
            for k in 0..x.len() {
                if dir[k] == 0.0 {
                    continue;
                }
                let mut t = 1.0;
                for _ in 0..60 {
                    let mut trial = y.clone();
                    trial[k] += t * dir[k];
                    if let Some(cand) = p.admissible(trial)? {
                        let fc = p.objective(&cand);
                        if fc < fy {
                            y = cand;
                            fy = fc;
                            break;
                        }
                    }
                    t *= 0.5;
                }
            }
            if fy < f {
                accepted = Some((y, fy, StepKind::Coordinate));
            }
        }
        let Some((next, fn_, kind)) = accepted else {
            converged = true;
            break;
        };
        let step = p.step_norm(&x, &next);
        trace.push(TraceStep {
            iteration: iterations,
            objective: fn_,
            step,
            kind,
        });
        x = next;
        f = fn_;
        if step < cfg.tolerance {
            converged = true;
            break;
        }
    }

    let mut fps_star = RangeMap::new();
    for (i, v) in p.vars.iter().enumerate() {
        let unit = brackets.units.get(v).cloned().unwrap_or_default();
        fps_star.insert(v.clone(), Interval::new(x[2 * i], x[2 * i + 1], unit)?)?;
    }
    Ok(TradeoffSolution {
        fps_star,
        objective: f,
        iterations,
        converged,
        initial_objective,
        trace,
        restoration,
        unconstrained,
    })
}

/// The set of sub-requirements and the law checks run on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubRequirements {
    pub requirements: Vec<FunctionalRequirement>,
    /// `(producer, consumer, shared variables)` for every linked pair.
    pub links: Vec<(String, String, Vec<String>)>,
    pub composite: FunctionalRequirement,
}

/// One requirement per sub-function: inputs and parameters from FDS² (or
/// FPS* for internal variables), outputs from FPS*. Top-level windows on a
/// sub-function's output are attached with their achievable range.
///
/// Fails unless every producer/consumer pair is composable and the
/// composition refines the top-level requirement.
pub fn assemble_subrequirements(
    arch: &Architecture,
    fds2: &RangeMap,
    fps_star: &RangeMap,
    windows: &[TimedWindow],
) -> Result<SubRequirements> {
    let lookup = |var: &str| -> Result<Interval> {
        fps_star
            .get(var)
            .or_else(|| fds2.get(var))
            .cloned()
            .ok_or_else(|| Error::NotFound(var.to_string()))
    };
    let pick = |m: &RangeMap| -> Result<RangeMap> {
        m.names().map(|n| Ok((n.to_string(), lookup(n)?))).collect()
    };
    let mut frs = Vec::with_capacity(arch.subfunctions.len());
    for sf in &arch.subfunctions {
        let mut fr = FunctionalRequirement::new(
            sf.id.clone(),
            pick(&sf.inputs)?,
            pick(&sf.uncontrollables)?,
            pick(&sf.controllables)?,
            pick(&sf.outputs)?,
        )?;
        for w in windows.iter().filter(|w| sf.outputs.contains(&w.var)) {
            fr = fr.with_window(w.clone())?;
        }
        frs.push(fr);
    }

    let mut links = Vec::new();
    for j in &frs {
        for k in &frs {
            let c = check_composable(j, k);
            match c.witness {
                Some(Witness::NothingShared) => {}
                Some(w) => {
                    return Err(Error::PostconditionFailure {
                        law: format!("composability of `{}` → `{}`", j.name, k.name),
                        witness: w.to_string(),
                    })
                }
                None => links.push((j.name.clone(), k.name.clone(), c.shared)),
            }
        }
    }
    let composite = compose(&frs)
        .map_err(|e| Error::PostconditionFailure {
            law: "composition".into(),
            witness: e.to_string(),
        })?
        .interface;
    if let Some(w) = check_refines(&composite, &arch.top).witness {
        return Err(Error::PostconditionFailure {
            law: "composition refines the top-level requirement".into(),
            witness: w.to_string(),
        });
    }
    Ok(SubRequirements {
        requirements: frs,
        links,
        composite,
    })
}
