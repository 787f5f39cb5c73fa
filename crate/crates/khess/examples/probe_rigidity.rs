use khess::rigidity::*;
use std::time::Instant;
fn main() {
    for res in [65usize, 97, 129] {
        let cand = EntireCandidate::perturbed_quadratic(1.0, 0.1).unwrap();
        let opts = ExperimentOptions { resolution: res, ..Default::default() };
        let t = Instant::now();
        let trace = rigidity_experiment(&cand, 2, 2, &[2.0, 4.0, 8.0, 16.0], &opts).unwrap();
        println!("res {res} ({:?}):", t.elapsed());
        println!("  flags: {:?}", trace.flags);
        println!("  sup_lap: {:?}", trace.sup_lap);
        println!("  osc: {:?}", trace.osc);
        println!("  exponent: {:?} so_far {:?}", trace.exponent, trace.exponent_so_far);
    }
    // quadratic flat trace at same schedule
    let cand = EntireCandidate::quadratic(1.0).unwrap();
    let opts = ExperimentOptions { resolution: 97, ..Default::default() };
    let trace = rigidity_experiment(&cand, 2, 2, &[2.0, 4.0, 8.0, 16.0], &opts).unwrap();
    println!("quadratic: osc {:?} exponent {:?}", trace.osc, trace.exponent);
}
