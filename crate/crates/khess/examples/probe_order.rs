use khess::solver::*;
fn main() {
    let mut solutions = Vec::new();
    for res in [33usize, 65, 129] {
        let rhs = RhsSpec::position(|x: &[f64]| 1.0 + 0.5 * (std::f64::consts::PI * x[0]).sin() * (std::f64::consts::PI * x[1]).sin(), 1.5).unwrap();
        let problem = DirichletProblem {
            domain: GridDomain::cube(2, 0.0, 1.0, res).unwrap(),
            shape: DomainShape::Full,
            k: 2,
            rhs,
            boundary: Box::new(|x: &[f64]| 0.5 * (x[0]*x[0] + x[1]*x[1])),
        };
        let (u, _) = match solve_dirichlet(&problem, 1e-11, 60) {
            Ok(x) => x,
            Err(khess::Error::ConeViolation { report, .. }) => {
                println!("res {res} cone violation: iters {} deficits {:?} damping {:?} residual {:.3e}",
                    report.iterations, report.cone_deficit_history, report.damping_history, report.final_residual);
                return;
            }
            Err(e) => { println!("res {res} failed: {e}"); return; }
        };
        solutions.push(u);
    }
    for margin in [0.0, 0.05, 0.1, 0.2] {
        let diff = |coarse: &ScalarField, fine: &ScalarField| -> f64 {
            let cd = coarse.domain();
            let ratio = (fine.domain().resolution() - 1) / (cd.resolution() - 1);
            let mut worst = 0.0f64;
            for idx in cd.node_indices() {
                let c = cd.coords(idx);
                let p = cd.position(c);
                if p[0] < margin || p[0] > 1.0 - margin || p[1] < margin || p[1] > 1.0 - margin { continue; }
                let fc = [c[0]*ratio, c[1]*ratio, c[2]*ratio];
                worst = worst.max((coarse.values()[idx] - fine.get(fc)).abs());
            }
            worst
        };
        let e1 = diff(&solutions[0], &solutions[1]);
        let e2 = diff(&solutions[1], &solutions[2]);
        println!("margin {margin}: e1 {e1:.3e} e2 {e2:.3e} order {:.3}", (e1/e2).log2());
    }
}
