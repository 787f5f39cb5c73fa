use khess::solver::*;
use khess::solver::newton::solve_dirichlet_from;
use std::time::Instant;
fn main() {
    let d = GridDomain::cube(3, 0.0, 1.0, 9).unwrap();
    let p = DirichletProblem::zero_boundary(d.clone(), 2, RhsSpec::constant(1.0).unwrap());
    let (mut prev, _) = solve_dirichlet(&p, 1e-10, 60).unwrap();
    for res in [17usize, 33, 65] {
        let d = GridDomain::cube(3, 0.0, 1.0, res).unwrap();
        let p = DirichletProblem::zero_boundary(d.clone(), 2, RhsSpec::constant(1.0).unwrap());
        let warm = spline_resample(&prev, &d).unwrap();
        let t = Instant::now();
        match solve_dirichlet_from(&p, Some(&warm), &SolverOptions{ tol:1e-10, max_iter: 60, ..Default::default()}) {
            Ok((u, r)) => { println!("3D res {res}: {:?} iters {} residual {:.2e}", t.elapsed(), r.iterations, r.final_residual); prev = u; }
            Err(e) => { println!("3D res {res}: failed {e}"); return; }
        }
    }
}
