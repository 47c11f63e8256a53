//! Small benchmark of the proposed learner against CLIME followed by greedy
//! balancing. Pass a trial count as the first argument (default 5).

use bgl::bench::{run_bench, BenchConfig};
use bgl::synth::SynthSpec;

fn main() -> bgl::Result<()> {
    let trials = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(5);
    let cfg = BenchConfig {
        synth: SynthSpec { n: 30, seed: 1, ..Default::default() },
        k: 300,
        trials,
        ..Default::default()
    };
    let report = run_bench(&cfg)?;
    println!("{:<12} {:>6} {:>8} {:>8}", "method", "trials", "FM", "RE");
    for s in &report.summary {
        println!("{:<12} {:>6} {:>8.3} {:>8.3}", s.method, s.trials, s.fm_mean, s.re_mean);
    }
    Ok(())
}
