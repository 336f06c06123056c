//! Dueck channel: sum capacity with and without feedback, and the feedback
//! region reached by the block-Markov auxiliaries.

use bcfb::channels::{dueck_correlated_noise, dueck_zero_noise, make_dueck, DueckParams, FeedbackConfig};
use bcfb::regions::{dueck_capacity, dueck_theorem3_region, z_markov_chain_holds, DueckWhich};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (name, law) in [("correlated", dueck_correlated_noise()), ("noiseless", dueck_zero_noise())] {
        let fb = dueck_capacity(&law, DueckWhich::Feedback)?.sum_rate_max()?.value;
        let nofb = dueck_capacity(&law, DueckWhich::Nofeedback)?.sum_rate_max()?.value;
        let ch = make_dueck(&DueckParams { noise_law: law.clone(), feedback: FeedbackConfig::Noiseless })?;
        let scheme = dueck_theorem3_region(&ch)?.sum_rate_max()?.value;
        println!(
            "{name:>10}: feedback {fb:.6}  no feedback {nofb:.6}  scheme {scheme:.6}  Z1-Z0-Z2 chain {}",
            z_markov_chain_holds(&law)?
        );
    }

    // Noisy feedback close to noiseless.
    let law = dueck_correlated_noise();
    for q in [1e-1, 1e-2, 1e-3] {
        let ch = make_dueck(&DueckParams { noise_law: law.clone(), feedback: FeedbackConfig::Noisy { q: [q; 3], joint: None } })?;
        println!("q = {q:e}: scheme sum rate {:.6}", dueck_theorem3_region(&ch)?.sum_rate_max()?.value);
    }
    Ok(())
}
