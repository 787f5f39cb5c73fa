use khess::solver::*;
use std::time::Instant;

fn main() {
    for res in [65usize, 129, 257] {
        let problem = DirichletProblem::zero_boundary(
            GridDomain::cube(2, 0.0, 1.0, res).unwrap(),
            2,
            RhsSpec::constant(1.0).unwrap(),
        );
        let t = Instant::now();
        match solve_dirichlet(&problem, 1e-10, 60) {
            Ok((u, report)) => println!(
                "2D res {res}: {:?} iters {} residual {:.2e} halvings {:?} min_u {:.4}",
                t.elapsed(), report.iterations, report.final_residual, report.damping_history,
                u.values().iter().cloned().fold(f64::INFINITY, f64::min)
            ),
            Err(e) => println!("2D res {res}: FAILED after {:?}: {e}", t.elapsed()),
        }
    }
    for res in [17usize, 33, 65] {
        let problem = DirichletProblem::zero_boundary(
            GridDomain::cube(3, 0.0, 1.0, res).unwrap(),
            2,
            RhsSpec::constant(1.0).unwrap(),
        );
        let t = Instant::now();
        match solve_dirichlet(&problem, 1e-10, 60) {
            Ok((u, report)) => println!(
                "3D res {res}: {:?} iters {} residual {:.2e} halvings {:?} min_u {:.4}",
                t.elapsed(), report.iterations, report.final_residual, report.damping_history,
                u.values().iter().cloned().fold(f64::INFINITY, f64::min)
            ),
            Err(e) => println!("3D res {res}: FAILED after {:?}: {e}", t.elapsed()),
        }
    }
}
