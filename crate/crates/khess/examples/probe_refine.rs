use khess::estimates::*;
use khess::solver::RhsConfig;
fn main() {
    let problem = RefinementProblem::unit_box(2, 2, RhsConfig::Constant { value: 1.0 });
    let report = refinement_scan(&problem, &QuantityTag::DepthLaplacian, &[9, 17, 33]);
    for l in &report.levels {
        println!("res {}: max {:?} flag {:?}", l.resolution, l.max, l.flag);
    }
}
