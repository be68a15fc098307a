//! Refinement, composability and composition of two requirements.

use setdecomp::intervals::{Interval, RangeMap};
use setdecomp::requirements::{check_composable, check_refines, compose, FunctionalRequirement};

fn ranges(entries: &[(&str, f64, f64)]) -> RangeMap {
    entries
        .iter()
        .map(|(n, lo, hi)| (n.to_string(), Interval::unitless(*lo, *hi).unwrap()))
        .collect()
}

fn fr(name: &str, x: &[(&str, f64, f64)], y: &[(&str, f64, f64)]) -> FunctionalRequirement {
    FunctionalRequirement::new(name, ranges(x), RangeMap::new(), RangeMap::new(), ranges(y)).unwrap()
}

fn main() -> setdecomp::Result<()> {
    let sensor = fr("sensor", &[("x", 0.0, 10.0)], &[("z", 0.0, 5.0)]);
    let filter = fr("filter", &[("z", -1.0, 6.0)], &[("y", 0.0, 1.0)]);
    let c = check_composable(&sensor, &filter);
    println!("sensor -> filter shares {:?}, composable: {}", c.shared, c.holds());

    // accepts more, promises less
    let better = fr("sensor'", &[("x", -1.0, 12.0)], &[("z", 1.0, 4.0)]);
    println!("sensor' refines sensor: {}", check_refines(&better, &sensor).holds());
    println!("sensor' -> filter composable: {}", check_composable(&better, &filter).holds());

    let before = compose(&[sensor.clone(), filter.clone()])?;
    let after = compose(&[better, filter])?;
    println!("composite inputs {:?}", before.interface.inputs.names().collect::<Vec<_>>());
    println!(
        "refined composite refines original: {}",
        check_refines(&after.interface, &before.interface).holds()
    );

    let worse = fr("sensor''", &[("x", 0.0, 10.0)], &[("z", 0.0, 7.0)]);
    let v = check_refines(&worse, &sensor);
    if let Some(w) = v.witness {
        println!("sensor'' does not refine sensor: {w}");
    }
    Ok(())
}
