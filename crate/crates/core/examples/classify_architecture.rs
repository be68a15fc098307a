//! Loads the cruise-control architecture and prints the variable groups.

use setdecomp::architecture::{classify, Architecture};

fn main() -> setdecomp::Result<()> {
    let arch = Architecture::load(concat!(env!("CARGO_MANIFEST_DIR"), "/data/cruise.json"))?;
    let cls = classify(&arch)?;
    for (group, vars) in cls.groups() {
        let names: Vec<&str> = vars.names().collect();
        println!("{group:<3} {names:?}");
    }
    println!("design space      {:?}", cls.design_space().names().collect::<Vec<_>>());
    println!("performance space {:?}", cls.performance_space().names().collect::<Vec<_>>());
    Ok(())
}
