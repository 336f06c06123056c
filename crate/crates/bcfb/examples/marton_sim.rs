//! Monte Carlo run of the Marton code on two parallel Z-channels, at rates
//! inside the region and above capacity.

use bcfb::channels::make_product_z;
use bcfb::mcsim::{marton_experiment, MartonRates, SchemeSpec};
use bcfb::regions::induced_joint;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ch = make_product_z(0.7)?;
    let (aux, _) = SchemeSpec::Uniform { sizes: [1, 2, 2] }.build(&ch)?;
    let i = induced_joint(&aux, None, &ch)?.mi(&["U1"], &["Y1"])?;
    println!("I(U1;Y1) = {i:.5}");
    for scale in [0.9, 1.15] {
        let r = scale * i;
        let rates = MartonRates { r1p: r, r2p: r, ..Default::default() };
        let rows = marton_experiment(&aux, &ch, &rates, &[20, 40], 200, 0.3, 7, None)?;
        for row in rows {
            println!("rate {r:.4}  n {:>3}  error {:.3}", row.n, row.error_rate);
        }
    }
    Ok(())
}
