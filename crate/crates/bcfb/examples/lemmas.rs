//! Covering, packing and multivariate packing frequencies on either side of
//! their thresholds.

use bcfb::mcsim::LemmaSuite;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut suite = LemmaSuite::standard(11)?;
    suite.trials = 500;
    let rows = suite.run(None)?;
    print!("{}", suite.csv(&rows));
    Ok(())
}
