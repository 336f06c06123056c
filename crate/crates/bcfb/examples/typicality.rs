//! Robust typicality of sampled sequence pairs as the slack grows.

use bcfb::info::{Alphabet, JointPmf};
use bcfb::mcsim::is_jointly_typical;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let law = JointPmf::from_fn(vec![Alphabet::new("X", 2), Alphabet::new("Y", 2)], |s| {
        if s[0] == s[1] {
            0.4
        } else {
            0.1
        }
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 200;
    let pairs: Vec<(Vec<usize>, Vec<usize>)> = (0..500)
        .map(|_| {
            let x: Vec<usize> = (0..n).map(|_| rng.gen_range(0..2)).collect();
            let y = x.iter().map(|&b| if rng.gen_bool(0.2) { 1 - b } else { b }).collect();
            (x, y)
        })
        .collect();
    for eps in [0.05, 0.1, 0.2, 0.4] {
        let mut hits = 0;
        for (x, y) in &pairs {
            hits += is_jointly_typical(&[x, y], &law, eps)? as usize;
        }
        println!("eps {eps:.2}: {hits}/500 typical");
    }
    Ok(())
}
