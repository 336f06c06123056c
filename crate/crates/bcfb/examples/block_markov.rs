//! Block-Markov scheme with feedback on the Dueck channel, next to the same
//! data rates without feedback. A handful of trials only; see the CLI for
//! full runs.

use bcfb::channels::{dueck_correlated_noise, make_dueck, DueckParams, FeedbackConfig};
use bcfb::mcsim::{block_markov_experiment, BlockMarkovConfig, BlockRates, LgwRates, MartonRates};
use bcfb::regions::{dueck_theorem3_scheme, DueckV0};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ch = make_dueck(&DueckParams { noise_law: dueck_correlated_noise(), feedback: FeedbackConfig::Noiseless })?;
    let (aux, upd) = dueck_theorem3_scheme(&ch, DueckV0::Z0Z1)?;
    let rates = BlockRates {
        data: MartonRates { r1p: 0.6, r2p: 0.6, ..Default::default() },
        update: LgwRates { r: [1.0, 0.0, 0.0], rb: [0.0, 1.0, 1.0] },
        last_binning: [0.0, 0.0],
    };
    for n in [12, 16] {
        let cfg = BlockMarkovConfig { aux: aux.clone(), upd: upd.clone(), ch: ch.clone(), rates, b: 2, gamma: 4.0, n, eps: 0.3, seed: 5 };
        let fb = block_markov_experiment(&cfg, 10, None)?;
        let base = block_markov_experiment(&cfg.baseline()?, 10, None)?;
        println!("n {n:>2}  feedback error {:.2}  no feedback error {:.2}", fb.error_rate, base.error_rate);
    }
    Ok(())
}
