//! Smallest feasible `rho` for one column found by POCS over the geometric
//! schedule, for both polarity hypotheses.

use bgl::graph::PolarityVector;
use bgl::learn::sign_pattern;
use bgl::pocs::{find_min_rho_with_point, PocsConfig, RhoSchedule};
use nalgebra::DMatrix;

fn main() {
    let c = DMatrix::from_row_slice(2, 2, &[1.0, 0.9, 0.9, 1.0]);
    let beta = PolarityVector::all_positive(2);
    let sched = RhoSchedule::default();
    let cfg = PocsConfig::default();
    for h in [1, -1] {
        let signs = sign_pattern(&beta, 0, h);
        match find_min_rho_with_point(&c, 0, &signs, &sched, &cfg) {
            Ok(found) => println!("hypothesis {h:+}: rho {:.4}, point {:.4?}", found.rho, found.point.as_slice()),
            Err(e) => println!("hypothesis {h:+}: {e}"),
        }
    }
}
