//! Executable composition of the sub-functions and sampled output envelopes.
//!
//! The envelope is an empirical bound: the system is simulated at every
//! sample of a design box (corners plus a per-axis grid), per-variable minima
//! and maxima are taken across the bundle, and each bound is pushed outward by
//! a padding fraction of its span. It is not a sound over-approximation; any
//! engine implementing [`EnvelopeEngine`] can replace it.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::architecture::{Architecture, Kind, Saturation};
use crate::error::{Error, Result};
use crate::expr::{Compiled, Operand};
use crate::intervals::{names_union, Bounds, RangeMap, VarSet};

/// Values for every design variable of one simulation.
pub type DesignPoint = BTreeMap<String, f64>;

/// Inputs not produced inside the architecture, plus all parameters.
pub fn design_variables(arch: &Architecture) -> Result<VarSet> {
    let agg = crate::architecture::aggregate_names(arch)?;
    let free = agg.x.minus(&agg.y);
    names_union(&names_union(&free, &agg.c)?, &agg.u)
}

#[derive(Debug, Clone)]
enum Node {
    Algebraic(Compiled),
    Integrated {
        expr: Compiled,
        saturation: Option<Saturation>,
        integrator: usize,
    },
}

#[derive(Debug, Clone)]
struct Rate {
    expr: Compiled,
    saturable: bool,
}

/// The composed sub-functions as an ODE with algebraic outputs.
///
/// Slot layout: design variables, then signals (sub-function outputs), then
/// integrator states.
#[derive(Debug, Clone)]
pub struct OdeSystem {
    /// Integrator state labels, `"<sub-function>.<state>"`.
    pub states: Vec<String>,
    /// Sub-function ids in evaluation order.
    pub order: Vec<String>,
    /// Output variables, in slot order.
    pub signals: Vec<String>,
    pub parameters: DesignPoint,
    nodes: Vec<(usize, Node)>,
    rates: Vec<Rate>,
    initial: Vec<f64>,
    n_design: usize,
    n_slots: usize,
}

pub fn build_ode(arch: &Architecture, point: &DesignPoint) -> Result<OdeSystem> {
    let design = design_variables(arch)?;
    let design_names: Vec<String> = design.names().map(str::to_string).collect();
    for n in &design_names {
        if !point.contains_key(n) {
            return Err(Error::NotFound(n.clone()));
        }
    }
    let signals: Vec<String> = arch
        .subfunctions
        .iter()
        .map(|s| s.output().to_string())
        .collect();
    let integrating: Vec<usize> = (0..arch.subfunctions.len())
        .filter(|&i| arch.subfunctions[i].is_integrating())
        .collect();

    let n_design = design_names.len();
    let signal_slot = |name: &str| signals.iter().position(|s| s == name).map(|i| n_design + i);
    let design_slot = |name: &str| design_names.iter().position(|s| s == name);
    let state_base = n_design + signals.len();

    // evaluation order: a node waits for the signals its output expression reads
    let mut deps: Vec<BTreeSet<usize>> = Vec::with_capacity(signals.len());
    for sf in &arch.subfunctions {
        let read = match &sf.kind {
            Kind::Algebraic { expr } => expr.names(),
            Kind::Integrator { output, .. } => output.as_ref().map(|e| e.names()).unwrap_or_default(),
        };
        deps.push(
            read.iter()
                .filter_map(|n| signals.iter().position(|s| s == n))
                .collect(),
        );
    }
    let mut done = vec![false; signals.len()];
    let mut order_idx = Vec::with_capacity(signals.len());
    while order_idx.len() < signals.len() {
        let next = (0..signals.len()).find(|&i| !done[i] && deps[i].iter().all(|&d| done[d]));
        match next {
            Some(i) => {
                done[i] = true;
                order_idx.push(i);
            }
            None => {
                let stuck = (0..signals.len())
                    .filter(|&i| !done[i])
                    .map(|i| arch.subfunctions[i].id.clone())
                    .collect();
                return Err(Error::AlgebraicCycle(stuck));
            }
        }
    }

    let constants = &arch.constants;
    let mut nodes = Vec::with_capacity(signals.len());
    let mut rates = Vec::with_capacity(integrating.len());
    let mut initial = Vec::with_capacity(integrating.len());
    let mut states = Vec::new();
    for &i in &order_idx {
        let sf = &arch.subfunctions[i];
        let out_slot = n_design + i;
        let resolve_base = |n: &str| -> Option<Operand> {
            if let Some(c) = constants.get(n) {
                return Some(Operand::Const(*c));
            }
            design_slot(n)
                .or_else(|| signal_slot(n))
                .map(Operand::Slot)
        };
        match &sf.kind {
            Kind::Algebraic { expr } => {
                nodes.push((out_slot, Node::Algebraic(expr.compile(&resolve_base)?)));
            }
            Kind::Integrator { output, saturation, state, .. } => {
                let k = integrating.iter().position(|&j| j == i).unwrap();
                let st_slot = state_base + k;
                let resolve = |n: &str| {
                    if n == state {
                        Some(Operand::Slot(st_slot))
                    } else {
                        resolve_base(n)
                    }
                };
                let expr = match output {
                    Some(e) => e.compile(&resolve)?,
                    None => Compiled::Slot(st_slot),
                };
                nodes.push((
                    out_slot,
                    Node::Integrated {
                        expr,
                        saturation: *saturation,
                        integrator: k,
                    },
                ));
            }
        }
    }
    for &i in &integrating {
        let sf = &arch.subfunctions[i];
        let Kind::Integrator {
            state,
            rate,
            initial: init,
            saturation,
            ..
        } = &sf.kind
        else {
            unreachable!()
        };
        let k = states.len();
        let st_slot = state_base + k;
        let resolve = |n: &str| -> Option<Operand> {
            if n == state {
                return Some(Operand::Slot(st_slot));
            }
            if let Some(c) = constants.get(n) {
                return Some(Operand::Const(*c));
            }
            design_slot(n).or_else(|| signal_slot(n)).map(Operand::Slot)
        };
        rates.push(Rate {
            expr: rate.compile(&resolve)?,
            saturable: saturation.is_some(),
        });
        let x0 = init.eval(&|n| constants.get(n).or_else(|| point.get(n)).copied());
        let x0 = match x0 {
            Ok(v) => v,
            Err(Error::NotFound(n)) => {
                return Err(Error::Validation(format!(
                    "initial condition of `{}` reads `{n}`, which is not a design variable",
                    sf.id
                )))
            }
            Err(e) => return Err(e),
        };
        initial.push(x0);
        states.push(format!("{}.{}", sf.id, state));
    }

    let sys = OdeSystem {
        states,
        order: order_idx
            .iter()
            .map(|&i| arch.subfunctions[i].id.clone())
            .collect(),
        signals,
        parameters: design_names
            .iter()
            .map(|n| (n.clone(), point[n]))
            .collect(),
        nodes,
        rates,
        initial,
        n_design,
        n_slots: state_base + integrating.len(),
    };
    sys.probe(arch)?;
    Ok(sys)
}

impl OdeSystem {
    fn fresh_slots(&self) -> Vec<f64> {
        let mut slots = vec![0.0; self.n_slots];
        for (i, v) in self.parameters.values().enumerate() {
            slots[i] = *v;
        }
        slots
    }

    fn state_base(&self) -> usize {
        self.n_design + self.signals.len()
    }

    /// Checked evaluation at the initial state.
    fn probe(&self, arch: &Architecture) -> Result<()> {
        let mut slots = self.fresh_slots();
        let base = self.state_base();
        slots[base..].copy_from_slice(&self.initial);
        for (slot, node) in &self.nodes {
            let e = match node {
                Node::Algebraic(e) => e,
                Node::Integrated { expr, .. } => expr,
            };
            slots[*slot] = e.eval_checked(&slots).map_err(|_| {
                Error::DivisionByZero(arch.subfunctions[*slot - self.n_design].id.clone())
            })?;
        }
        for (k, r) in self.rates.iter().enumerate() {
            r.expr
                .eval_checked(&slots)
                .map_err(|_| Error::DivisionByZero(self.states[k].clone()))?;
        }
        Ok(())
    }

    /// Evaluates every signal for `state` and writes the state derivative.
    fn eval(&self, state: &[f64], slots: &mut [f64], saturated: &mut [bool], deriv: &mut [f64]) {
        let base = self.state_base();
        slots[base..].copy_from_slice(state);
        for (slot, node) in &self.nodes {
            slots[*slot] = match node {
                Node::Algebraic(e) => e.eval(slots),
                Node::Integrated {
                    expr,
                    saturation,
                    integrator,
                } => {
                    let raw = expr.eval(slots);
                    match saturation {
                        Some(s) if raw > s.hi || raw < s.lo => {
                            saturated[*integrator] = true;
                            raw.clamp(s.lo, s.hi)
                        }
                        _ => {
                            saturated[*integrator] = false;
                            raw
                        }
                    }
                }
            };
        }
        for (k, r) in self.rates.iter().enumerate() {
            deriv[k] = if r.saturable && saturated[k] {
                0.0
            } else {
                r.expr.eval(slots)
            };
        }
    }

    pub fn initial_state(&self) -> &[f64] {
        &self.initial
    }

    pub fn signal_index(&self, name: &str) -> Option<usize> {
        self.signals.iter().position(|s| s == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub horizon: f64,
    pub step: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            horizon: 100.0,
            step: 0.01,
        }
    }
}

impl SimConfig {
    /// Number of steps; the step is shrunk slightly if it does not divide the
    /// horizon.
    pub fn steps(&self) -> Result<usize> {
        if !(self.step > 0.0) || !(self.horizon >= 0.0) {
            return Err(Error::Validation(format!(
                "step must be positive and horizon non-negative (step={}, horizon={})",
                self.step, self.horizon
            )));
        }
        Ok(((self.horizon / self.step) - 1e-9).ceil().max(0.0) as usize)
    }
}

/// Classical fixed-step RK4. `visit(t, signals)` is called at every grid
/// point, including `t = 0` and `t = horizon`. Returns the terminal state.
pub fn integrate_with(
    sys: &OdeSystem,
    cfg: SimConfig,
    mut visit: impl FnMut(f64, &[f64]),
) -> Result<Vec<f64>> {
    let n = cfg.steps()?;
    let h = if n == 0 { 0.0 } else { cfg.horizon / n as f64 };
    let dim = sys.initial.len();
    let mut y = sys.initial.clone();
    let mut slots = sys.fresh_slots();
    let mut sat = vec![false; dim];
    let (mut k1, mut k2, mut k3, mut k4) =
        (vec![0.0; dim], vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]);
    let mut tmp = vec![0.0; dim];
    let sig = sys.n_design..sys.n_design + sys.signals.len();
    for step in 0..=n {
        let t = step as f64 * h;
        sys.eval(&y, &mut slots, &mut sat, &mut k1);
        if let Some(i) = slots[sig.clone()].iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                var: sys.signals[i].clone(),
                t,
            });
        }
        visit(t, &slots[sig.clone()]);
        if step == n {
            break;
        }
        for i in 0..dim {
            tmp[i] = y[i] + 0.5 * h * k1[i];
        }
        sys.eval(&tmp, &mut slots, &mut sat, &mut k2);
        for i in 0..dim {
            tmp[i] = y[i] + 0.5 * h * k2[i];
        }
        sys.eval(&tmp, &mut slots, &mut sat, &mut k3);
        for i in 0..dim {
            tmp[i] = y[i] + h * k3[i];
        }
        sys.eval(&tmp, &mut slots, &mut sat, &mut k4);
        for i in 0..dim {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                var: sys.states[i].clone(),
                t: t + h,
            });
        }
    }
    Ok(y)
}

/// Sampled trajectory of every output variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub values: BTreeMap<String, Vec<f64>>,
    pub terminal_state: Vec<f64>,
}

impl Trajectory {
    pub fn series(&self, var: &str) -> Option<&[f64]> {
        self.values.get(var).map(Vec::as_slice)
    }

    /// `time, var1, var2, ...` with variables in canonical order.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["time".to_string()];
        header.extend(self.values.keys().cloned());
        out.write_record(&header).map_err(csv_err)?;
        for (i, t) in self.times.iter().enumerate() {
            let mut row = vec![t.to_string()];
            row.extend(self.values.values().map(|s| s[i].to_string()));
            out.write_record(&row).map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn integrate(sys: &OdeSystem, cfg: SimConfig) -> Result<Trajectory> {
    let mut times = Vec::new();
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); sys.signals.len()];
    let terminal_state = integrate_with(sys, cfg, |t, s| {
        times.push(t);
        for (c, v) in cols.iter_mut().zip(s) {
            c.push(*v);
        }
    })?;
    Ok(Trajectory {
        times,
        values: sys.signals.iter().cloned().zip(cols).collect(),
        terminal_state,
    })
}

/// Which design-box points to simulate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    /// Points per axis of the regular grid (1 = centre only).
    pub grid: usize,
    pub corners: bool,
    /// Above this many points the grid is replaced by a Halton sequence.
    pub cap: usize,
    /// Outward padding as a fraction of each variable's span.
    pub padding: f64,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        Self {
            grid: 3,
            corners: true,
            cap: 10_000,
            padding: 0.02,
        }
    }
}

impl SamplingPlan {
    /// Corners plus the box centre.
    pub fn coarse(padding: f64) -> Self {
        Self {
            grid: 1,
            corners: true,
            cap: 10_000,
            padding,
        }
    }

    pub fn points(&self, design_box: &RangeMap) -> Vec<DesignPoint> {
        let axes: Vec<(&str, Bounds)> = design_box.iter().map(|(n, iv)| (n, iv.bounds())).collect();
        let d = axes.len();
        let grid_axis = |b: Bounds| -> Vec<f64> {
            if b.width() == 0.0 || self.grid <= 1 {
                vec![0.5 * (b.lo + b.hi)]
            } else {
                (0..self.grid)
                    .map(|k| b.lo + b.width() * k as f64 / (self.grid - 1) as f64)
                    .collect()
            }
        };
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let mut push = |vals: Vec<f64>, out: &mut Vec<DesignPoint>| {
            let key: Vec<u64> = vals.iter().map(|v| v.to_bits()).collect();
            if seen.insert(key) {
                out.push(axes.iter().map(|(n, _)| n.to_string()).zip(vals).collect());
            }
        };
        let corner_count = if self.corners { 1usize.checked_shl(d as u32).unwrap_or(usize::MAX) } else { 0 };
        if self.corners && corner_count <= self.cap {
            for mask in 0..corner_count {
                let vals = axes
                    .iter()
                    .enumerate()
                    .map(|(i, (_, b))| if mask >> i & 1 == 1 { b.hi } else { b.lo })
                    .collect();
                push(vals, &mut out);
            }
        }
        let grids: Vec<Vec<f64>> = axes.iter().map(|(_, b)| grid_axis(*b)).collect();
        let grid_count = grids
            .iter()
            .try_fold(1usize, |acc, g| acc.checked_mul(g.len()))
            .unwrap_or(usize::MAX);
        if out.len().saturating_add(grid_count) <= self.cap {
            let mut idx = vec![0usize; d];
            loop {
                push(idx.iter().enumerate().map(|(i, &k)| grids[i][k]).collect(), &mut out);
                let mut i = 0;
                while i < d {
                    idx[i] += 1;
                    if idx[i] < grids[i].len() {
                        break;
                    }
                    idx[i] = 0;
                    i += 1;
                }
                if i == d {
                    break;
                }
            }
        } else {
            let mut k = 1;
            while out.len() < self.cap {
                let vals = axes
                    .iter()
                    .enumerate()
                    .map(|(i, (_, b))| b.lo + b.width() * halton(k, PRIMES[i % PRIMES.len()]))
                    .collect();
                push(vals, &mut out);
                k += 1;
            }
        }
        out
    }
}

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Radical inverse of `index` in `base`.
pub fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

/// Per-window bounds of one windowed variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowEnvelope {
    pub var: String,
    pub t_start: f64,
    pub t_end: f64,
    pub bounds: Option<Bounds>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Envelope {
    pub ranges: BTreeMap<String, Bounds>,
    pub windows: Vec<WindowEnvelope>,
    pub samples: usize,
}

fn hull_opt(a: Option<Bounds>, b: Option<Bounds>) -> Option<Bounds> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.hull(&b)),
        (a, None) => a,
        (None, b) => b,
    }
}

impl Envelope {
    /// Associative, commutative union of two bundles' envelopes.
    pub fn merge(&self, other: &Envelope) -> Envelope {
        let mut ranges = self.ranges.clone();
        for (k, b) in &other.ranges {
            ranges
                .entry(k.clone())
                .and_modify(|a| *a = a.hull(b))
                .or_insert(*b);
        }
        let windows = if self.windows.is_empty() {
            other.windows.clone()
        } else {
            self.windows
                .iter()
                .zip(other.windows.iter().map(Some).chain(std::iter::repeat(None)))
                .map(|(a, b)| WindowEnvelope {
                    bounds: hull_opt(a.bounds, b.and_then(|b| b.bounds)),
                    ..a.clone()
                })
                .collect()
        };
        Envelope {
            ranges,
            windows,
            samples: self.samples + other.samples,
        }
    }

    /// Pushes every bound outward by `eps` of its span.
    pub fn padded(&self, eps: f64) -> Envelope {
        let pad = |b: Bounds| {
            let m = eps * b.width();
            Bounds::new(b.lo - m, b.hi + m)
        };
        Envelope {
            ranges: self.ranges.iter().map(|(k, b)| (k.clone(), pad(*b))).collect(),
            windows: self
                .windows
                .iter()
                .map(|w| WindowEnvelope {
                    bounds: w.bounds.map(pad),
                    ..w.clone()
                })
                .collect(),
            samples: self.samples,
        }
    }

    pub fn get(&self, var: &str) -> Option<Bounds> {
        self.ranges.get(var).copied()
    }

    pub fn window(&self, var: &str, t_start: f64, t_end: f64) -> Option<Bounds> {
        self.windows
            .iter()
            .find(|w| w.var == var && w.t_start == t_start && w.t_end == t_end)
            .and_then(|w| w.bounds)
    }

    /// `var, lo, hi` rows.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["var", "lo", "hi"]).map_err(csv_err)?;
        for (k, b) in &self.ranges {
            out.write_record([k.clone(), b.lo.to_string(), b.hi.to_string()])
                .map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Envelope of a single trajectory from `point`.
pub fn envelope_of_point(
    arch: &Architecture,
    point: &DesignPoint,
    cfg: SimConfig,
) -> Result<Envelope> {
    let sys = build_ode(arch, point)?;
    let mut lo = vec![f64::INFINITY; sys.signals.len()];
    let mut hi = vec![f64::NEG_INFINITY; sys.signals.len()];
    let windows: Vec<(usize, f64, f64, String)> = arch
        .top
        .windows
        .iter()
        .filter_map(|w| sys.signal_index(&w.var).map(|i| (i, w.t_start, w.t_end, w.var.clone())))
        .collect();
    let mut wb: Vec<Option<Bounds>> = vec![None; windows.len()];
    // grid times carry rounding error; treat window edges with a small slack
    let slack = 1e-9 * cfg.horizon.max(1.0);
    integrate_with(&sys, cfg, |t, s| {
        for (i, v) in s.iter().enumerate() {
            lo[i] = lo[i].min(*v);
            hi[i] = hi[i].max(*v);
        }
        for (k, (i, t0, t1, _)) in windows.iter().enumerate() {
            if t >= t0 - slack && t <= t1 + slack {
                let p = Bounds::point(s[*i]);
                wb[k] = Some(wb[k].map_or(p, |b| b.hull(&p)));
            }
        }
    })?;
    Ok(Envelope {
        ranges: sys
            .signals
            .iter()
            .cloned()
            .zip(lo.into_iter().zip(hi).map(|(l, h)| Bounds::new(l, h)))
            .collect(),
        windows: windows
            .into_iter()
            .zip(wb)
            .map(|((_, t_start, t_end, var), bounds)| WindowEnvelope {
                var,
                t_start,
                t_end,
                bounds,
            })
            .collect(),
        samples: 1,
    })
}

fn pool() -> Option<&'static rayon::ThreadPool> {
    static POOL: OnceLock<Option<rayon::ThreadPool>> = OnceLock::new();
    POOL.get_or_init(|| {
        let n: usize = std::env::var("SETDECOMP_THREADS").ok()?.parse().ok()?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .ok()
    })
    .as_ref()
}

/// Runs `f` on the pool capped by `SETDECOMP_THREADS`, if set.
pub fn in_pool<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    match pool() {
        Some(p) => p.install(f),
        None => f(),
    }
}

/// Padded envelope over every sample of `design_box`.
pub fn envelope_over_box(
    arch: &Architecture,
    design_box: &RangeMap,
    cfg: SimConfig,
    plan: &SamplingPlan,
) -> Result<Envelope> {
    let raw = raw_envelope_over_box(arch, design_box, cfg, plan)?;
    Ok(raw.padded(plan.padding))
}

/// Envelope without padding.
pub fn raw_envelope_over_box(
    arch: &Architecture,
    design_box: &RangeMap,
    cfg: SimConfig,
    plan: &SamplingPlan,
) -> Result<Envelope> {
    if design_box.is_empty() && !design_variables(arch)?.is_empty() {
        return Err(Error::Validation("design box is empty".into()));
    }
    let points = plan.points(design_box);
    envelope_over_points(arch, &points, cfg)
}

pub fn envelope_over_points(
    arch: &Architecture,
    points: &[DesignPoint],
    cfg: SimConfig,
) -> Result<Envelope> {
    let parts: Vec<Envelope> = in_pool(|| {
        points
            .par_iter()
            .enumerate()
            .map(|(i, p)| {
                envelope_of_point(arch, p, cfg).map_err(|e| Error::Sample {
                    sample: i,
                    source: Box::new(e),
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(parts
        .iter()
        .fold(Envelope::default(), |acc, e| acc.merge(e)))
}

/// Something that bounds the outputs of an architecture over a design box.
pub trait EnvelopeEngine: Sync {
    fn envelope(&self, arch: &Architecture, design_box: &RangeMap, plan: &SamplingPlan)
        -> Result<Envelope>;
}

/// The default sampling-based engine.
#[derive(Debug, Clone, Copy, Default)]
pub struct SamplingEngine {
    pub sim: SimConfig,
}

impl EnvelopeEngine for SamplingEngine {
    fn envelope(
        &self,
        arch: &Architecture,
        design_box: &RangeMap,
        plan: &SamplingPlan,
    ) -> Result<Envelope> {
        envelope_over_box(arch, design_box, self.sim, plan)
    }
}
