//! Per-criterion timing probe (ignored by default).

use std::time::Instant;

#[test]
#[ignore]
fn timing() {
    let seed = 20260810u64;
    for id in 1..=9usize {
        let t = Instant::now();
        let rep = orlicz_greedy::selftest::run_criterion(id, seed).unwrap();
        println!(
            "criterion {id}: {:.1}s (passed: {})",
            t.elapsed().as_secs_f64(),
            rep.passed
        );
    }
}
