//! Runs chains through the exact optimal reconstruction of the two-mode
//! mixture with and without noise re-injected between steps, and counts how
//! often chains cross between the modes.
//!
//! ```text
//! cargo run --release --example mode_switching -- [sigma] [inject]
//! ```

use dae_score::io::RunConfig;
use dae_score::oracle::{OptimalReconstructor, Quadrature};
use dae_score::rng::Prng;
use dae_score::sampler::{sample_from_noise, ChainConfig};

fn main() -> dae_score::Result<()> {
    let mut args = std::env::args().skip(1);
    let sigma: f64 = args.next().map_or(0.05, |s| s.parse().expect("sigma"));
    let inject: f64 = args.next().map_or(0.1, |s| s.parse().expect("inject"));

    let oracle = OptimalReconstructor {
        mixture: RunConfig::default().mixture()?,
        sigma,
        quadrature: Quadrature::default(),
    };
    for noise in [0.0, inject] {
        let trace = sample_from_noise(&oracle, 64, &ChainConfig::new(100, noise, 1)?, &mut Prng::new(5))?;
        let side = |t: usize, c: usize| trace.states[t].data()[c] < 0.5;
        let mut switches = 0;
        let mut movers = 0;
        for c in 0..trace.num_chains() {
            let n = (1..trace.states.len()).filter(|&t| side(t, c) != side(t - 1, c)).count();
            switches += n;
            movers += usize::from(n > 0);
        }
        let left = trace.last().data().iter().filter(|&&x| x < 0.5).count();
        println!(
            "inject {noise}: {switches} crossings, {movers} of 64 chains crossed, final split {left}/{}",
            64 - left
        );
    }
    Ok(())
}
