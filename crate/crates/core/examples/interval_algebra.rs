//! Interval intersection, range-map merging and restriction.

use setdecomp::intervals::{
    interval_intersect, rangemap_merge, restrict, to_vector, Interval, RangeMap,
};

fn main() -> setdecomp::Result<()> {
    let declared = Interval::new(0.0, 40.0, "m/s")?;
    let required = Interval::new(23.0, 30.0, "m/s")?;
    match interval_intersect(&declared, &required)? {
        Some(r) => println!("{declared} ∩ {required} = {r}"),
        None => println!("{declared} and {required} are disjoint"),
    }

    let mut f1 = RangeMap::new();
    f1.insert("v", Interval::new(0.0, 50.0, "m/s")?)?;
    f1.insert("m", Interval::new(900.0, 1100.0, "kg")?)?;
    let mut f2 = RangeMap::new();
    f2.insert("m", Interval::new(990.0, 1200.0, "kg")?)?;
    f2.insert("F", Interval::new(-250.0, 3500.0, "N")?)?;

    let merged = rangemap_merge(&f1, &f2)?;
    println!("merged: m = {}", restrict("m", &merged)?);
    for (id, iv) in to_vector(&merged).iter() {
        println!("  {id:<3} {iv}");
    }

    let clash = Interval::new(0.0, 1.0, "km/h")?;
    let mut f3 = RangeMap::new();
    f3.insert("v", clash)?;
    if let Err(e) = rangemap_merge(&f1, &f3) {
        println!("rejected: {e}");
    }
    Ok(())
}
