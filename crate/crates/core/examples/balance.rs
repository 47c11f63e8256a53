//! Balance checks and the positive counterpart of a three-node signed graph.
//!
//! Node 2 carries a self-loop of 4 and two negative edges. Flipping its
//! polarity turns both edges positive and the self-loop weight drops to zero.

use bgl::graph::{
    check_consistency, positive_counterpart, positive_self_loops, two_coloring_balance_check,
    BalancedLaplacian, SignedGraph,
};
use nalgebra::DMatrix;

fn main() -> bgl::Result<()> {
    let mut w = DMatrix::zeros(3, 3);
    for (i, j, v) in [(0, 1, 1.0), (0, 2, -1.0), (1, 2, -1.0)] {
        w[(i, j)] = v;
        w[(j, i)] = v;
    }
    w[(2, 2)] = 4.0;
    let g = SignedGraph::new(w.clone())?;

    let beta = two_coloring_balance_check(&g).expect("graph is balanced");
    println!("polarities: {:?}", beta.as_slice());
    let l = g.laplacian();
    println!("consistent: {}", check_consistency(&l, &beta)?);

    let b = BalancedLaplacian::new(l, beta)?;
    let (lp, _) = positive_counterpart(&b);
    println!("L:{}", b.laplacian().matrix());
    println!("T L T:{}", lp.matrix());
    println!("self-loops after the transform: {:?}", positive_self_loops(&w).as_slice());
    Ok(())
}
