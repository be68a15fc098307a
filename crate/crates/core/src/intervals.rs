//! Closed intervals, named variable sets and range maps.
//!
//! The set operators follow the usual notation for requirement algebra:
//!
//! - `⊔` [`names_union`]: identifier union, shared names merged
//! - `⊓` [`names_intersect`]: shared identifiers
//! - `⊑` [`names_subset`]: identifier inclusion
//! - `⋓` [`rangemap_merge`]: key union, intersecting the ranges of shared keys
//! - `a|{R}` [`restrict`]: the range bound to `a` in `R`
//! - `TR` [`to_vector`]: canonical column vector of a range map
//!
//! The empty interval is `None` wherever an operation can produce it, so an
//! `Interval` value is always a non-empty, finite, closed range.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Variable identifier. Two ids are identical iff their names match; the
/// unit only takes part in consistency checks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VarId {
    pub name: String,
    #[serde(default)]
    pub unit: String,
}

impl VarId {
    pub fn new(name: impl Into<String>, unit: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            unit: unit.into(),
        }
    }
}

impl PartialEq for VarId {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}

impl Eq for VarId {}

impl PartialOrd for VarId {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for VarId {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.name.cmp(&other.name)
    }
}

impl std::hash::Hash for VarId {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.name.hash(state)
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Unitless bounds used by interval arithmetic (natural interval extension).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lo: f64,
    pub hi: f64,
}

impl Bounds {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "bounds out of order: [{lo}, {hi}]");
        Self { lo, hi }
    }

    pub fn point(v: f64) -> Self {
        Self { lo: v, hi: v }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn contains_bounds(&self, other: &Bounds) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn hull(&self, other: &Bounds) -> Bounds {
        Bounds::new(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    pub fn add(self, o: Bounds) -> Bounds {
        Bounds::new(self.lo + o.lo, self.hi + o.hi)
    }

    pub fn sub(self, o: Bounds) -> Bounds {
        Bounds::new(self.lo - o.hi, self.hi - o.lo)
    }

    pub fn neg(self) -> Bounds {
        Bounds::new(-self.hi, -self.lo)
    }

    pub fn mul(self, o: Bounds) -> Bounds {
        let c = [
            self.lo * o.lo,
            self.lo * o.hi,
            self.hi * o.lo,
            self.hi * o.hi,
        ];
        Bounds::new(
            c.iter().copied().fold(f64::INFINITY, f64::min),
            c.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        )
    }

    /// `None` when the divisor contains zero.
    pub fn div(self, o: Bounds) -> Option<Bounds> {
        if o.contains(0.0) {
            return None;
        }
        Some(self.mul(Bounds::new(1.0 / o.hi, 1.0 / o.lo)))
    }

    pub fn powi(self, n: i32) -> Bounds {
        if n == 0 {
            return Bounds::point(1.0);
        }
        let a = self.lo.powi(n);
        let b = self.hi.powi(n);
        if n % 2 == 0 && n > 0 {
            if self.contains(0.0) {
                Bounds::new(0.0, a.max(b))
            } else {
                Bounds::new(a.min(b), a.max(b))
            }
        } else if n > 0 {
            Bounds::new(a, b)
        } else {
            // negative power: 1 / x^|n|
            let pos = self.powi(-n);
            Bounds::point(1.0)
                .div(pos)
                .unwrap_or(Bounds::new(f64::NEG_INFINITY, f64::INFINITY))
        }
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[derive(Deserialize)]
struct RawInterval {
    lo: f64,
    hi: f64,
    #[serde(default)]
    unit: String,
}

/// Non-empty closed finite interval tagged with a unit string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInterval")]
pub struct Interval {
    lo: f64,
    hi: f64,
    unit: String,
}

impl TryFrom<RawInterval> for Interval {
    type Error = Error;

    fn try_from(r: RawInterval) -> Result<Self> {
        Interval::new(r.lo, r.hi, r.unit)
    }
}

impl Interval {
    pub fn new(lo: f64, hi: f64, unit: impl Into<String>) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(Self {
            lo,
            hi,
            unit: unit.into(),
        })
    }

    pub fn unitless(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, "")
    }

    pub fn point(v: f64, unit: impl Into<String>) -> Result<Self> {
        Self::new(v, v, unit)
    }

    pub fn from_bounds(b: Bounds, unit: impl Into<String>) -> Result<Self> {
        Self::new(b.lo, b.hi, unit)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn unit(&self) -> &str {
        &self.unit
    }

    pub fn bounds(&self) -> Bounds {
        Bounds::new(self.lo, self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    /// `self ⊇ other`, bounds only.
    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn with_bounds(&self, lo: f64, hi: f64) -> Result<Interval> {
        Interval::new(lo, hi, self.unit.clone())
    }

    pub fn hull(&self, other: &Interval) -> Result<Interval> {
        check_units("hull", &self.unit, &other.unit)?;
        self.with_bounds(self.lo.min(other.lo), self.hi.max(other.hi))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.unit.is_empty() {
            write!(f, "[{}, {}]", self.lo, self.hi)
        } else {
            write!(f, "[{}, {}] {}", self.lo, self.hi, self.unit)
        }
    }
}

fn check_units(var: &str, left: &str, right: &str) -> Result<()> {
    if left != right {
        return Err(Error::UnitMismatch {
            var: var.to_string(),
            left: left.to_string(),
            right: right.to_string(),
        });
    }
    Ok(())
}

/// `a ∩ b`; `Ok(None)` is the empty interval.
pub fn interval_intersect(a: &Interval, b: &Interval) -> Result<Option<Interval>> {
    check_units("intersection", &a.unit, &b.unit)?;
    let lo = a.lo.max(b.lo);
    let hi = a.hi.min(b.hi);
    if lo > hi {
        return Ok(None);
    }
    Ok(Some(Interval {
        lo,
        hi,
        unit: a.unit.clone(),
    }))
}

/// A set of variable identifiers, each carrying its unit.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VarSet(BTreeMap<String, String>);

impl VarSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts `v`; fails if the name is already present with another unit.
    pub fn insert(&mut self, v: VarId) -> Result<()> {
        match self.0.get(&v.name) {
            Some(unit) => check_units(&v.name, unit, &v.unit),
            None => {
                self.0.insert(v.name, v.unit);
                Ok(())
            }
        }
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = VarId> + '_ {
        self.0.iter().map(|(n, u)| VarId::new(n.clone(), u.clone()))
    }

    pub fn unit_of(&self, name: &str) -> Option<&str> {
        self.0.get(name).map(String::as_str)
    }

    /// Elements of `self` not in `other` (`self ⊓ ¬other`).
    pub fn minus(&self, other: &VarSet) -> VarSet {
        VarSet(
            self.0
                .iter()
                .filter(|(n, _)| !other.contains(n))
                .map(|(n, u)| (n.clone(), u.clone()))
                .collect(),
        )
    }
}

impl FromIterator<VarId> for VarSet {
    /// Panics on conflicting units; use [`VarSet::insert`] for checked input.
    fn from_iter<T: IntoIterator<Item = VarId>>(iter: T) -> Self {
        let mut s = VarSet::new();
        for v in iter {
            s.insert(v).expect("conflicting units in VarSet literal");
        }
        s
    }
}

/// `a ⊔ b`.
pub fn names_union(a: &VarSet, b: &VarSet) -> Result<VarSet> {
    let mut out = a.clone();
    for v in b.iter() {
        out.insert(v)?;
    }
    Ok(out)
}

/// `a ⊓ b`. Units are taken from `a`.
pub fn names_intersect(a: &VarSet, b: &VarSet) -> VarSet {
    VarSet(
        a.0.iter()
            .filter(|(n, _)| b.contains(n))
            .map(|(n, u)| (n.clone(), u.clone()))
            .collect(),
    )
}

/// `a ⊑ b`.
pub fn names_subset(a: &VarSet, b: &VarSet) -> bool {
    a.names().all(|n| b.contains(n))
}

/// Variable → interval bindings with unique keys.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RangeMap(BTreeMap<String, Interval>);

impl RangeMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a fresh binding; duplicates are rejected.
    pub fn insert(&mut self, name: impl Into<String>, iv: Interval) -> Result<()> {
        let name = name.into();
        if self.0.contains_key(&name) {
            return Err(Error::Duplicate {
                var: name,
                context: "range map".into(),
            });
        }
        self.0.insert(name, iv);
        Ok(())
    }

    /// Inserts or replaces a binding.
    pub fn set(&mut self, name: impl Into<String>, iv: Interval) {
        self.0.insert(name.into(), iv);
    }

    pub fn get(&self, name: &str) -> Option<&Interval> {
        self.0.get(name)
    }

    pub fn remove(&mut self, name: &str) -> Option<Interval> {
        self.0.remove(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Interval)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    pub fn var_set(&self) -> VarSet {
        VarSet(
            self.0
                .iter()
                .map(|(k, v)| (k.clone(), v.unit.clone()))
                .collect(),
        )
    }

    /// Keeps only the variables named in `set`.
    pub fn select(&self, set: &VarSet) -> RangeMap {
        RangeMap(
            self.0
                .iter()
                .filter(|(k, _)| set.contains(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        )
    }
}

impl FromIterator<(String, Interval)> for RangeMap {
    fn from_iter<T: IntoIterator<Item = (String, Interval)>>(iter: T) -> Self {
        RangeMap(iter.into_iter().collect())
    }
}

/// `a ⋓ b`: key union; shared keys get the intersection of their ranges.
pub fn rangemap_merge(a: &RangeMap, b: &RangeMap) -> Result<RangeMap> {
    let mut out = a.clone();
    for (name, iv) in b.iter() {
        let merged = match out.get(name) {
            Some(existing) => {
                check_units(name, &existing.unit, &iv.unit)?;
                interval_intersect(existing, iv)?.ok_or_else(|| Error::EmptyRange {
                    var: name.to_string(),
                    sources: vec![existing.to_string(), iv.to_string()],
                })?
            }
            None => iv.clone(),
        };
        out.set(name, merged);
    }
    Ok(out)
}

/// `v|{m}`.
pub fn restrict<'a>(v: &str, m: &'a RangeMap) -> Result<&'a Interval> {
    m.get(v).ok_or_else(|| Error::NotFound(v.to_string()))
}

/// A range map laid out as a column vector in canonical (lexicographic) order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RangeVector(pub Vec<(VarId, Interval)>);

impl RangeVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&Interval> {
        self.0
            .binary_search_by(|(v, _)| v.name.as_str().cmp(name))
            .ok()
            .map(|i| &self.0[i].1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VarId, &Interval)> {
        self.0.iter().map(|(v, i)| (v, i))
    }

    pub fn names(&self) -> Vec<&str> {
        self.0.iter().map(|(v, _)| v.name.as_str()).collect()
    }
}

/// `TR({R})`.
pub fn to_vector(m: &RangeMap) -> RangeVector {
    RangeVector(
        m.0.iter()
            .map(|(k, v)| (VarId::new(k.clone(), v.unit.clone()), v.clone()))
            .collect(),
    )
}

pub fn from_vector(v: &RangeVector) -> Result<RangeMap> {
    let mut m = RangeMap::new();
    for (id, iv) in &v.0 {
        m.insert(id.name.clone(), iv.clone())?;
    }
    Ok(m)
}
