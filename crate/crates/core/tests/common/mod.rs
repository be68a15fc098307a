#![allow(dead_code)]

use std::path::PathBuf;

use setdecomp::architecture::Architecture;
use setdecomp::intervals::{Interval, RangeMap};
use setdecomp::requirements::FunctionalRequirement;

/// Example data; also reachable from the acceptance package next door.
pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/data")
        .join(name)
}

pub fn cruise() -> Architecture {
    Architecture::load(data("cruise.json")).unwrap()
}

pub fn cruise_unsaturated() -> Architecture {
    Architecture::load(data("cruise_unsaturated.json")).unwrap()
}

pub fn iv(lo: f64, hi: f64) -> Interval {
    Interval::unitless(lo, hi).unwrap()
}

pub fn rm(entries: &[(&str, f64, f64)]) -> RangeMap {
    entries
        .iter()
        .map(|(n, lo, hi)| (n.to_string(), iv(*lo, *hi)))
        .collect()
}

pub fn fr(name: &str, x: &[(&str, f64, f64)], y: &[(&str, f64, f64)]) -> FunctionalRequirement {
    FunctionalRequirement::new(name, rm(x), RangeMap::new(), RangeMap::new(), rm(y)).unwrap()
}

/// Printed cruise values, in canonical variable names. The input labels of
/// the design space are the ones of the top-level requirement.
pub mod printed {
    pub const FDS1: [(&str, f64, f64); 4] = [
        ("m", 990.0, 1100.0),
        ("omega_m", 350.0, 480.0),
        ("v_0", 23.0, 30.0),
        ("v_r", 34.0, 36.0),
    ];

    pub const FPS1: [(&str, f64, f64); 8] = [
        ("F", -250.0, 3500.0),
        ("Fa", 0.0, 1000.0),
        ("Fr", 70.0, 120.0),
        ("T", 0.0, 250.0),
        ("omega", 0.0, 450.0),
        ("u", -0.5, 2.0),
        ("v", 20.0, 40.0),
        ("v_dot", -1.5, 3.0),
    ];

    pub const OMEGA_M_NARROWED: (f64, f64) = (365.0, 450.0);

    pub const FPS2: [(&str, f64, f64); 8] = [
        ("F", -9.33, 2997.78),
        ("Fa", 240.88, 655.25),
        ("Fr", 88.20, 107.80),
        ("T", 179.94, 200.00),
        ("omega", 219.66, 362.30),
        ("u", 0.0, 1.51),
        ("v", 21.97, 36.23),
        ("v_dot", -0.63, 2.89),
    ];

    pub const FPS2_WINDOW_V: (f64, f64) = (33.65, 36.19);

    /// Output ranges of the sub-requirement table.
    pub const FPS_STAR: [(&str, f64, f64); 8] = [
        ("F", -159.1, 3024.0),
        ("Fa", 237.6, 827.6),
        ("Fr", 88.2, 107.8),
        ("T", 150.0, 200.1),
        ("omega", 109.8, 406.1),
        ("u", -0.1, 1.511),
        ("v", 21.8, 38.4),
        ("v_dot", -1.1, 3.0),
    ];
}

pub mod gen;
pub mod oracle;
pub mod laws;
