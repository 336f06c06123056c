//! Entropies and mutual information of a doubly symmetric binary source,
//! plus the chain rule checked numerically.

use bcfb::info::{binary_entropy, Alphabet, JointPmf};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = 0.1;
    let law = JointPmf::from_fn(vec![Alphabet::new("X", 2), Alphabet::new("Y", 2)], |s| {
        if s[0] == s[1] {
            (1.0 - p) / 2.0
        } else {
            p / 2.0
        }
    })?;

    let hxy = law.entropy(&["X", "Y"])?;
    let hx = law.entropy(&["X"])?;
    let hy_x = law.conditional_entropy(&["Y"], &["X"])?;
    let i = law.mi(&["X"], &["Y"])?;
    println!("H(X,Y) = {hxy:.6}");
    println!("H(X) + H(Y|X) = {:.6}", hx + hy_x);
    println!("I(X;Y) = {i:.6}  (1 - h(p) = {:.6})", 1.0 - binary_entropy(p)?);

    // Y = X xor Z with a third axis Z.
    let xz = JointPmf::uniform(vec![Alphabet::new("X", 2)])?.product(&JointPmf::bernoulli("Z", p)?)?;
    let xyz = xz.with_function("Y", 2, &["X", "Z"], |s| s[0] ^ s[1])?;
    println!("I(X;Y|Z) = {:.6}", xyz.mutual_information(&["X"], &["Y"], &["Z"])?);
    Ok(())
}
