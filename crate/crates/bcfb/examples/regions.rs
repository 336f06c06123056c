//! Marton region and both feedback inner regions for one auxiliary choice on
//! the Dueck channel.

use bcfb::channels::{dueck_correlated_noise, make_dueck, DueckParams, FeedbackConfig};
use bcfb::regions::{dueck_theorem3_scheme, feedback_inner, marton_region, DueckV0, Variant};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ch = make_dueck(&DueckParams { noise_law: dueck_correlated_noise(), feedback: FeedbackConfig::Noiseless })?;
    let (aux, upd) = dueck_theorem3_scheme(&ch, DueckV0::Z0Z1)?;

    let m = marton_region(&aux, &ch)?;
    let full = feedback_inner(&aux, &upd, &ch, Variant::Full)?;
    println!("marton sum rate   {:.6}", m.sum_rate_max()?.value);
    println!("feedback sum rate {:.6}", full.sum_rate_max()?.value);
    print!("feedback vertices\n{}", full.vertices()?.to_csv());
    Ok(())
}
