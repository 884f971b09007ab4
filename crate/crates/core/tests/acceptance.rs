//! Runs every acceptance criterion and prints one line per criterion.
//! `ACCEPTANCE_LEVEL=quick` shrinks the scales; `ACCEPTANCE_SEED` changes
//! the random samples.
//!
//! A criterion whose failures are all instances of known counterexamples
//! to the statement it checks is printed as a failure but does not fail the
//! run; any other failure does.

use pregeom::acceptance::{run_all, Level};

fn main() {
    let level: Level = std::env::var("ACCEPTANCE_LEVEL")
        .ok()
        .map(|s| s.parse().expect("ACCEPTANCE_LEVEL is quick or full"))
        .unwrap_or(Level::Full);
    let seed: u64 = std::env::var("ACCEPTANCE_SEED").ok().map(|s| s.parse().expect("integer seed")).unwrap_or(0);
    let results = run_all(level, seed, |r| println!("{r}"));
    let passed = results.iter().filter(|r| r.passed).count();
    let explained = results.iter().filter(|r| !r.passed && r.explained).count();
    let unexplained = results.len() - passed - explained;
    println!("{passed} passed, {explained} failed on counterexamples to the statement, {unexplained} failed otherwise");
    if unexplained > 0 {
        std::process::exit(1);
    }
}
