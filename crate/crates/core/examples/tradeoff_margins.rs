//! Splits range margins between producers and consumers with the barrier
//! objective, with and without the containment constraints.

use setdecomp::architecture::Architecture;
use setdecomp::narrowing::{narrow, NarrowingConfig};
use setdecomp::simulation::SamplingEngine;
use setdecomp::tradeoff::{solve_tradeoff, BracketSet, Constraints, PreferenceWeights, SolverConfig};

fn main() -> setdecomp::Result<()> {
    let arch = Architecture::load(concat!(env!("CARGO_MANIFEST_DIR"), "/data/cruise.json"))?;
    let (_, spaces) = narrow(&arch, &SamplingEngine::default(), &NarrowingConfig::default())?;
    let brackets = BracketSet::from_spaces(&spaces.fps1, &spaces.fps2)?;
    let weights = PreferenceWeights::from_architecture(&arch)?;
    let cfg = SolverConfig::default();

    let free = solve_tradeoff(&brackets, &weights, None, &cfg)?;
    let constraints = Constraints::new(&arch, &spaces.fds2);
    let sol = solve_tradeoff(&brackets, &weights, Some(constraints), &cfg)?;

    println!("{:<6} {:>22} {:>22}", "var", "unconstrained", "constrained");
    for (var, iv) in sol.fps_star.iter() {
        let f = free.fps_star.get(var).unwrap();
        println!(
            "{var:<6} [{:>9.3}, {:>9.3}] [{:>9.3}, {:>9.3}]",
            f.lo(),
            f.hi(),
            iv.lo(),
            iv.hi()
        );
    }
    println!(
        "objective {:.4} -> {:.4} in {} iterations (converged: {})",
        sol.initial_objective, sol.objective, sol.iterations, sol.converged
    );
    for note in &sol.restoration {
        println!("restoration: {note}");
    }
    Ok(())
}
