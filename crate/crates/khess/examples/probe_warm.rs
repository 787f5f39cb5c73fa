use khess::solver::*;
use khess::solver::newton::solve_dirichlet_from;
use std::time::Instant;
fn main() {
    let d9 = GridDomain::cube(2, 0.0, 1.0, 9).unwrap();
    let p9 = DirichletProblem::zero_boundary(d9.clone(), 2, RhsSpec::constant(1.0).unwrap());
    let (u9, _) = solve_dirichlet(&p9, 1e-10, 60).unwrap();
    let d17 = GridDomain::cube(2, 0.0, 1.0, 17).unwrap();
    let mut warm = spline_resample(&u9, &d17).unwrap();
    apply_boundary(&mut warm, &DomainShape::Full, &|_x: &[f64]| 0.0);
    println!("warm deficit: {:.3e}", field_cone_deficit(&warm, &DomainShape::Full, 2, 1e-10));
    let p17 = DirichletProblem::zero_boundary(d17.clone(), 2, RhsSpec::constant(1.0).unwrap());
    println!("warm residual: {:.3e}", residual_norm(&p17, &warm).unwrap());
    match solve_dirichlet_from(&p17, Some(&warm), &SolverOptions{ tol:1e-10, max_iter: 60, ..Default::default()}) {
        Ok((_, r)) => println!("warm solve ok: iters {} damping {:?}", r.iterations, r.damping_history),
        Err(e) => println!("warm solve failed: {e}"),
    }
    // chain up to 257 with warm starts, timing
    let mut prev = u9;
    for res in [17usize, 33, 65, 129, 257] {
        let d = GridDomain::cube(2, 0.0, 1.0, res).unwrap();
        let p = DirichletProblem::zero_boundary(d.clone(), 2, RhsSpec::constant(1.0).unwrap());
        let warm = spline_resample(&prev, &d).unwrap();
        let t = Instant::now();
        match solve_dirichlet_from(&p, Some(&warm), &SolverOptions{ tol:1e-10, max_iter: 60, ..Default::default()}) {
            Ok((u, r)) => { println!("res {res}: {:?} iters {} residual {:.2e}", t.elapsed(), r.iterations, r.final_residual); prev = u; }
            Err(e) => { println!("res {res}: failed {e}"); return; }
        }
    }
}
