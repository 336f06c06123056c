//! Fourier-Motzkin elimination of the split and binning rates of a Marton
//! code, compared against the closed-form region.

use bcfb::polytope::region_equal;
use bcfb::regions::{fm_check, fm_pair, random_constants, FmTarget};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    // First draw with a nonempty region.
    let (input, elim, closed) = loop {
        let input = random_constants(&mut rng, FmTarget::Marton)?;
        let (elim, closed) = fm_pair(&input, [8.0; 3])?;
        if !elim.vertices()?.points.is_empty() {
            break (input, elim, closed);
        }
    };
    println!("{input:?}");
    println!("eliminated vertices:\n{}", elim.vertices()?.to_csv());
    println!("equal to closed form: {}", region_equal(&elim, &closed, 1e-9)?);

    for t in FmTarget::ALL {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = fm_check(&mut rng, t, 10, 1e-9)?;
        println!("{t:?}: {}/{}", r.passed, r.cases);
    }
    Ok(())
}
