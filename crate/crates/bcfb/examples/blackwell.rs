//! Noisy Blackwell channel: feedback lower bound against the no-feedback and
//! feedback cut-set bounds.

use bcfb::regions::{blackwell_bounds, GridSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = GridSpec::alpha_beta(200);
    println!("{:>6} {:>10} {:>10} {:>10} {:>7} {:>7}", "p", "fb_lower", "nofb_up", "fb_cut", "alpha", "beta");
    for k in 0..10 {
        let p = 0.05 * k as f64;
        let b = blackwell_bounds(p, &grid)?;
        println!(
            "{p:>6.2} {:>10.6} {:>10.6} {:>10.6} {:>7.4} {:>7.4}",
            b.fb_lower, b.nofb_upper, b.fb_cutset, b.alpha, b.beta
        );
    }
    Ok(())
}
