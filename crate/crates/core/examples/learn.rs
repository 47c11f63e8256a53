//! Learns a balanced signed graph from GMRF samples and scores it against the
//! ground truth.

use bgl::graph::laplacian_balance_check;
use bgl::learn::{learn_balanced_laplacian, sample_covariance, LearnConfig};
use bgl::synth::{f_measure, gen_pd_balanced_er_graph, relative_error, sample_gmrf, SynthSpec, FM_EPS};

fn main() -> bgl::Result<()> {
    let spec = SynthSpec { n: 20, p: 0.3, seed: 7, ..Default::default() };
    let (truth, _) = gen_pd_balanced_er_graph(&spec, 1000)?;
    let x = sample_gmrf(truth.laplacian(), 200, 8)?;
    let c = sample_covariance(&x)?;

    let out = learn_balanced_laplacian(&c, &LearnConfig::default())?;
    let learned = out.balanced.laplacian();
    println!("sweeps {} (converged: {})", out.sweeps, out.converged);
    println!("balanced: {}", laplacian_balance_check(learned).is_some());
    println!("FM {:.3}", f_measure(learned.matrix(), truth.laplacian().matrix(), FM_EPS)?);
    println!("RE {:.3}", relative_error(learned.matrix(), truth.laplacian().matrix())?);
    Ok(())
}
