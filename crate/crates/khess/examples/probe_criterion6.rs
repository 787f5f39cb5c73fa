use khess::estimates::*;
use khess::solver::RhsConfig;
use std::time::Instant;
fn main() {
    let fs = [RhsConfig::Constant { value: 1.0 }, RhsConfig::SinProduct { base: 1.0, amplitude: 0.5 }];
    for f in &fs {
        let problem = RefinementProblem::unit_box(2, 2, f.clone());
        let t = Instant::now();
        let report = refinement_scan(&problem, &QuantityTag::DepthLaplacian, &[33, 65, 129, 257]);
        let vals: Vec<String> = report.levels.iter().map(|l| format!("{:?}@{:?}", l.max.map(|v| (v*1e4).round()/1e4), l.argmax)).collect();
        println!("2D {:?}: verdict {} slack {:.4} vals {:?} ({:?})", f, report.verdict, report.slack, vals, t.elapsed());
    }
    for f in &fs {
        let problem = RefinementProblem::unit_box(3, 2, f.clone());
        let t = Instant::now();
        let report = refinement_scan(&problem, &QuantityTag::DepthLaplacian, &[17, 33, 65]);
        let vals: Vec<String> = report.levels.iter().map(|l| format!("{:?}@{:?}", l.max.map(|v| (v*1e4).round()/1e4), l.argmax)).collect();
        println!("3D {:?}: verdict {} slack {:.4} vals {:?} ({:?})", f, report.verdict, report.slack, vals, t.elapsed());
    }
    // pogorelov betas on 2D f=1
    for beta in [1.0, 2.0, 4.0, 8.0] {
        let problem = RefinementProblem::unit_box(2, 2, RhsConfig::Constant { value: 1.0 });
        let report = refinement_scan(&problem, &QuantityTag::Pogorelov { beta, eps: 0.05, a: 0.25 }, &[33, 65, 129, 257]);
        let vals: Vec<String> = report.levels.iter().map(|l| format!("{:?}@{:.3},{:.3}", l.max.map(|v| (v*1e5).round()/1e5), l.argmax.first().unwrap_or(&f64::NAN), l.argmax.get(1).unwrap_or(&f64::NAN))).collect();
        println!("2D pogorelov beta {beta}: verdict {} slack {:.4} vals {:?}", report.verdict, report.slack, vals);
    }
}
