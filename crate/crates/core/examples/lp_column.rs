//! One column of the sign-constrained CLIME program solved by the simplex
//! routine, next to the unconstrained column.

use bgl::lp::{build_column_constraints, max_violation, solve_clime_column, solve_l1_lp};
use nalgebra::DMatrix;

fn main() -> bgl::Result<()> {
    // covariance of a 3-node graph: node 0 anti-correlated with node 1
    let c = DMatrix::from_row_slice(3, 3, &[1.0, -0.6, 0.2, -0.6, 1.0, -0.1, 0.2, -0.1, 1.0]);
    let rho = 0.1;

    let free = solve_clime_column(&c, 0, rho, None)?;
    println!("rho {rho}: unconstrained column 0 {:.4?}", free.as_slice());

    // s_j l_j <= 0 with s = (-1, 1, 1): entries 1 and 2 forced <= 0, which
    // contradicts the anti-correlation between nodes 0 and 1
    let signs = [-1, 1, 1];
    for rho in [rho, 0.4] {
        let lp = build_column_constraints(&c, 0, rho, &signs)?;
        match solve_l1_lp(&lp.halfspaces, 3) {
            Ok(x) => println!(
                "rho {rho}: constrained column 0 {:.4?}, l1 norm {:.4}, worst violation {:.1e}",
                x.as_slice(),
                x.lp_norm(1),
                max_violation(&lp.halfspaces, &x)
            ),
            Err(e) => println!("rho {rho}: {e}"),
        }
    }
    Ok(())
}
