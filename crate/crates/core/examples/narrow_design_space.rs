//! Narrows the cruise design space and bounds the reachable outputs.

use setdecomp::architecture::Architecture;
use setdecomp::intervals::RangeMap;
use setdecomp::narrowing::{narrow, NarrowingConfig};
use setdecomp::simulation::SamplingEngine;

fn show(title: &str, m: &RangeMap) {
    println!("{title}");
    for (var, iv) in m.iter() {
        println!("  {var:<8} {iv}");
    }
}

fn main() -> setdecomp::Result<()> {
    let arch = Architecture::load(concat!(env!("CARGO_MANIFEST_DIR"), "/data/cruise.json"))?;
    let (_, spaces) = narrow(&arch, &SamplingEngine::default(), &NarrowingConfig::default())?;
    show("FDS1", &spaces.fds1);
    show("FPS1", &spaces.fps1);
    show("FDS2", &spaces.fds2);
    show("FPS2", &spaces.fps2);
    for w in &spaces.fps2_windows {
        println!("  {} over [{}, {}] s: {}", w.var, w.t_start, w.t_end, w.range);
    }
    for w in &spaces.warnings {
        println!("warning: {w}");
    }
    Ok(())
}
