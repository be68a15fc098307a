//! Simulates the cruise controller from its nominal point.

use setdecomp::architecture::Architecture;
use setdecomp::pipeline::design_point;
use setdecomp::simulation::{build_ode, integrate, DesignPoint, SimConfig};

fn main() -> setdecomp::Result<()> {
    let arch = Architecture::load(concat!(env!("CARGO_MANIFEST_DIR"), "/data/cruise.json"))?;
    let point = design_point(&arch, &DesignPoint::new())?;
    println!("design point {point:?}");
    let sys = build_ode(&arch, &point)?;
    println!("states {:?}, evaluation order {:?}", sys.states, sys.order);

    let traj = integrate(&sys, SimConfig::default())?;
    let (v, u) = (traj.series("v").unwrap(), traj.series("u").unwrap());
    println!("{:>6} {:>8} {:>6}", "t", "v", "u");
    for (i, t) in traj.times.iter().enumerate().step_by(1000) {
        println!("{t:>6.1} {:>8.3} {:>6.3}", v[i], u[i]);
    }
    Ok(())
}
