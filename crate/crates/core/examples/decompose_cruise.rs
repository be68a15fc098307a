//! Full decomposition of the cruise-control requirement, compared against
//! reference values, printed as Markdown.

use setdecomp::architecture::Architecture;
use setdecomp::pipeline::{load_golden, run_pipeline, RunConfig};

fn main() -> setdecomp::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let arch = Architecture::load(format!("{dir}/cruise.json"))?;
    let mut report = run_pipeline(&arch, &RunConfig::default())?;
    report.compare(&load_golden(format!("{dir}/cruise_reference.json"))?);
    print!("{}", report.to_markdown());
    Ok(())
}
