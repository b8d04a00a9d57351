use std::process::ExitCode;
use std::time::{Duration, Instant};

use ellsheaf::verify::{run_suite, DEFAULT_SEED};

const CRITERIA: [(&str, &str, Option<u64>); 8] = [
    ("birkhoff", "Birkhoff factorization of 200 random products", Some(5)),
    ("gluing", "golden gluing matrices on E2", None),
    ("cohomology", "cohomology formula against the triples oracle", Some(60)),
    ("stable", "stable sequences and simplicity", None),
    ("cuspidal", "cuspidal displays, simplicity and parameters", None),
    ("tensor", "tensor decompositions against block tensors", None),
    ("pushforward", "pushforward of O along the double cover", None),
    ("duality", "duality involution and Hom duality", None),
];

fn main() -> ExitCode {
    let mut failed = Vec::new();
    for (i, (suite, title, limit)) in CRITERIA.iter().enumerate() {
        let start = Instant::now();
        let rep = run_suite(suite, None, DEFAULT_SEED).expect("known suite");
        let elapsed = start.elapsed();
        let in_time = limit.is_none_or(|s| elapsed < Duration::from_secs(s));
        let ok = rep.passed() && in_time;
        println!(
            "criterion {} [{suite}] {title}: {} ({} cases, {} mismatches, {:.2}s)",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            rep.cases,
            rep.failures.len(),
            elapsed.as_secs_f64()
        );
        for f in rep.failures.iter().take(5) {
            println!("    {f}");
        }
        if !ok {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("all {} criteria passed", CRITERIA.len());
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
