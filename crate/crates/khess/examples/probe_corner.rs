use khess::estimates::*;
use khess::solver::*;
use khess::solver::field::{discrete_hessian};
fn main() {
    for res in [17usize, 33, 65, 129] {
        let d = GridDomain::cube(2, 0.0, 1.0, res).unwrap();
        let p = DirichletProblem::zero_boundary(d.clone(), 2, RhsSpec::constant(1.0).unwrap());
        let (u, _) = solve_dirichlet(&p, 1e-10, 60).unwrap();
        let (v, loc) = depth_laplacian_max(&u, &DomainShape::Full).unwrap();
        // quantity at center node and at fixed point (0.25, 0.25)
        let mid = res / 2;
        let q = |c: [usize;3]| {
            let h = discrete_hessian(&u, c).unwrap();
            -u.get(c) * h.trace()
        };
        let quarter = res / 4;
        // corner-adjacent node value
        let corner = q([1, 1, 0]);
        println!("res {res}: max {v:.6} at ({:.4},{:.4}); center {:.6}; quarter {:.6}; corner-adj {:.6}",
            loc[0], loc[1], q([mid, mid, 0]), q([quarter, quarter, 0]), corner);
    }
}
