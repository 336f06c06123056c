//! Broadcast channels with generalized feedback and the two worked examples.
//!
//! A [`Dmbc`] carries one conditional law `P(Y1, Y2, Yt | X)` with axes named
//! `X`, `Y1`, `Y2`, `Yt`. Multi-bit symbols are packed big-endian in the
//! order the tuple is written, so the Dueck input `(X1, X0, X2)` is
//! `4*x1 + 2*x0 + x2`.

use crate::info::{Alphabet, ConditionalPmf, InfoError, JointPmf, TAU_NUM};
use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error(transparent)]
    Info(#[from] InfoError),
    #[error("noise law must be over binary axes {expected:?}, got {got:?}")]
    NoiseAxes { expected: Vec<String>, got: Vec<String> },
    #[error("Blackwell noise parameter must satisfy 0 <= p < 0.5, got {0}")]
    BlackwellP(f64),
    #[error("probability {0} outside [0,1]")]
    Probability(f64),
    #[error("channel law must be given [X] with outputs [Y1, Y2, Yt], got given {given:?} out {out:?}")]
    LawShape { given: Vec<String>, out: Vec<String> },
    #[error("input symbol {0} out of range")]
    Input(usize),
    #[error("receiver must be 1 or 2, got {0}")]
    Receiver(usize),
}

pub type Result<T> = std::result::Result<T, ChannelError>;

/// Memoryless broadcast channel with a feedback output.
#[derive(Clone, Debug)]
pub struct Dmbc {
    law: ConditionalPmf,
    samplers: Vec<WeightedIndex<f64>>,
}

impl PartialEq for Dmbc {
    fn eq(&self, other: &Self) -> bool {
        self.law == other.law
    }
}

impl Dmbc {
    pub fn new(law: ConditionalPmf) -> Result<Self> {
        let given: Vec<String> = law.given().iter().map(|a| a.name.clone()).collect();
        let out: Vec<String> = law.out().iter().map(|a| a.name.clone()).collect();
        if given != ["X"] || out != ["Y1", "Y2", "Yt"] {
            return Err(ChannelError::LawShape { given, out });
        }
        let samplers = (0..law.given_len())
            .map(|g| WeightedIndex::new(law.row(g).iter().copied()).expect("rows are normalized"))
            .collect();
        Ok(Dmbc { law, samplers })
    }

    /// Builds from a function `x -> list of ((y1, y2, yt), prob)`.
    pub fn from_table(
        sizes: [usize; 4],
        f: impl Fn(usize) -> Vec<((usize, usize, usize), f64)>,
    ) -> Result<Self> {
        let [nx, n1, n2, nt] = sizes;
        let mut mass = vec![0.0; nx * n1 * n2 * nt];
        for x in 0..nx {
            for ((y1, y2, yt), p) in f(x) {
                mass[((x * n1 + y1) * n2 + y2) * nt + yt] += p;
            }
        }
        let law = ConditionalPmf::new(
            vec![Alphabet::new("X", nx)],
            vec![Alphabet::new("Y1", n1), Alphabet::new("Y2", n2), Alphabet::new("Yt", nt)],
            mass,
        )?;
        Dmbc::new(law)
    }

    pub fn law(&self) -> &ConditionalPmf {
        &self.law
    }

    pub fn input_size(&self) -> usize {
        self.law.given()[0].size
    }

    pub fn output_size(&self, receiver: usize) -> usize {
        self.law.out()[receiver - 1].size
    }

    pub fn feedback_size(&self) -> usize {
        self.law.out()[2].size
    }

    /// One draw of `(y1, y2, yt)` given input `x`.
    pub fn sample<R: Rng + ?Sized>(&self, x: usize, rng: &mut R) -> Result<(usize, usize, usize)> {
        let s = self.samplers.get(x).ok_or(ChannelError::Input(x))?;
        Ok(self.split(s.sample(rng)))
    }

    fn split(&self, idx: usize) -> (usize, usize, usize) {
        let (n2, nt) = (self.output_size(2), self.feedback_size());
        (idx / (n2 * nt), (idx / nt) % n2, idx % nt)
    }

    /// `P(Y_i | X)`.
    pub fn marginal_channel(&self, receiver: usize) -> Result<ConditionalPmf> {
        match receiver {
            1 => Ok(self.law.marginal_out(&["Y1"])?),
            2 => Ok(self.law.marginal_out(&["Y2"])?),
            r => Err(ChannelError::Receiver(r)),
        }
    }

    /// Same outputs with the feedback alphabet collapsed to one symbol.
    pub fn without_feedback(&self) -> Result<Dmbc> {
        let out = self.law.marginal_out(&["Y1", "Y2"])?;
        let (nx, n1, n2) = (self.input_size(), self.output_size(1), self.output_size(2));
        Dmbc::from_table([nx, n1, n2, 1], |x| {
            let row = out.row(x);
            (0..n1 * n2).map(|o| ((o / n2, o % n2, 0), row[o])).collect()
        })
    }

    /// Joint law of `(X, Y1, Y2, Yt)` for input law `px`.
    pub fn joint(&self, px: &[f64]) -> Result<JointPmf> {
        Ok(JointPmf::single("X", px)?.compose(&self.law)?)
    }
}

/// What the transmitter observes after each channel use.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FeedbackConfig {
    None,
    #[default]
    Noiseless,
    /// Per-bit XOR noise `W_j ~ Bern(q_j)`, independent unless `joint`
    /// (over `W0, W1, W2`) is given.
    Noisy {
        q: [f64; 3],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        joint: Option<JointPmf>,
    },
}

impl FeedbackConfig {
    /// Law of `(W0, W1, W2)` as a table indexed `4*w0 + 2*w1 + w2`.
    fn noise_table(&self) -> Result<[f64; 8]> {
        let mut t = [0.0; 8];
        match self {
            FeedbackConfig::Noisy { joint: Some(j), .. } => {
                check_binary3(j, ["W0", "W1", "W2"])?;
                let j = j.marginalize(&["W0", "W1", "W2"])?;
                t.copy_from_slice(j.mass());
            }
            FeedbackConfig::Noisy { q, joint: None } => {
                for v in q {
                    if !(0.0..=1.0).contains(v) {
                        return Err(ChannelError::Probability(*v));
                    }
                }
                for (w, slot) in t.iter_mut().enumerate() {
                    let bits = [(w >> 2) & 1, (w >> 1) & 1, w & 1];
                    *slot = (0..3).map(|k| if bits[k] == 1 { q[k] } else { 1.0 - q[k] }).product();
                }
            }
            _ => t[0] = 1.0,
        }
        Ok(t)
    }
}

fn check_binary3(law: &JointPmf, names: [&str; 3]) -> Result<()> {
    let ok = law.axes().len() == 3 && names.iter().all(|n| law.axis(n).map(|a| a.size == 2).unwrap_or(false));
    if ok {
        Ok(())
    } else {
        Err(ChannelError::NoiseAxes {
            expected: names.iter().map(|s| s.to_string()).collect(),
            got: law.names().iter().map(|s| s.to_string()).collect(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DueckParams {
    /// Law over binary axes `Z0, Z1, Z2`.
    pub noise_law: JointPmf,
    #[serde(default)]
    pub feedback: FeedbackConfig,
}

/// Generalized Dueck channel: `Y1 = (X1^Z1, X0^Z0)`, `Y2 = (X0^Z0, X2^Z2)`.
///
/// Feedback is the three distinct output bits `(Y11, Y10, Y22)`, each XORed
/// with `(W1, W0, W2)` in the noisy case.
pub fn make_dueck(params: &DueckParams) -> Result<Dmbc> {
    check_binary3(&params.noise_law, ["Z0", "Z1", "Z2"])?;
    let z = params.noise_law.marginalize(&["Z0", "Z1", "Z2"])?;
    let w = params.feedback.noise_table()?;
    let nt = match params.feedback {
        FeedbackConfig::None => 1,
        _ => 8,
    };
    Dmbc::from_table([8, 4, 4, nt], |x| {
        let (x1, x0, x2) = ((x >> 2) & 1, (x >> 1) & 1, x & 1);
        let mut out = Vec::new();
        for (zi, &pz) in z.mass().iter().enumerate() {
            if pz == 0.0 {
                continue;
            }
            let (z0, z1, z2) = ((zi >> 2) & 1, (zi >> 1) & 1, zi & 1);
            let (y11, y10, y22) = (x1 ^ z1, x0 ^ z0, x2 ^ z2);
            let (y1, y2) = (2 * y11 + y10, 2 * y10 + y22);
            if nt == 1 {
                out.push(((y1, y2, 0), pz));
                continue;
            }
            for (wi, &pw) in w.iter().enumerate() {
                if pw == 0.0 {
                    continue;
                }
                let (w0, w1, w2) = ((wi >> 2) & 1, (wi >> 1) & 1, wi & 1);
                let yt = 4 * (y11 ^ w1) + 2 * (y10 ^ w0) + (y22 ^ w2);
                out.push(((y1, y2, yt), pz * pw));
            }
        }
        out
    })
}

/// `H(Z0,Z1) <= 1` and `H(Z0,Z2) <= 1`, within `TAU_NUM`.
pub fn dueck_condition_holds(noise_law: &JointPmf) -> Result<bool> {
    check_binary3(noise_law, ["Z0", "Z1", "Z2"])?;
    let h01 = noise_law.entropy(&["Z0", "Z1"])?;
    let h02 = noise_law.entropy(&["Z0", "Z2"])?;
    Ok(h01 <= 1.0 + TAU_NUM && h02 <= 1.0 + TAU_NUM)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlackwellParams {
    pub p: f64,
    #[serde(default)]
    pub feedback: FeedbackConfig,
}

/// Noisy Blackwell channel with one shared `Z ~ Bern(p)`.
pub fn make_blackwell(params: &BlackwellParams) -> Result<Dmbc> {
    blackwell_impl(params, false)
}

/// Same marginals as [`make_blackwell`] but with independent `Z1, Z2`.
pub fn make_blackwell_independent(params: &BlackwellParams) -> Result<Dmbc> {
    blackwell_impl(params, true)
}

fn blackwell_impl(params: &BlackwellParams, independent: bool) -> Result<Dmbc> {
    let p = params.p;
    if !(0.0..0.5).contains(&p) {
        return Err(ChannelError::BlackwellP(p));
    }
    let w = params.feedback.noise_table()?;
    // (W1, W2) marginal of the 3-bit noise table.
    let mut w12 = [0.0; 4];
    for (wi, pw) in w.iter().enumerate() {
        w12[wi & 3] += pw;
    }
    let nt = match params.feedback {
        FeedbackConfig::None => 1,
        _ => 4,
    };
    let bern = |b: usize| if b == 1 { p } else { 1.0 - p };
    Dmbc::from_table([3, 2, 2, nt], |x| {
        let (f1, f2) = (usize::from(x >= 1), usize::from(x == 2));
        let mut out = Vec::new();
        for z1 in 0..2 {
            for z2 in 0..2 {
                let pz = if independent {
                    bern(z1) * bern(z2)
                } else if z1 == z2 {
                    bern(z1)
                } else {
                    0.0
                };
                if pz == 0.0 {
                    continue;
                }
                let (y1, y2) = (z1 ^ f1, z2 ^ f2);
                if nt == 1 {
                    out.push(((y1, y2, 0), pz));
                    continue;
                }
                for (wi, &pw) in w12.iter().enumerate() {
                    if pw > 0.0 {
                        let yt = 2 * (y1 ^ (wi >> 1)) + (y2 ^ (wi & 1));
                        out.push(((y1, y2, yt), pz * pw));
                    }
                }
            }
        }
        out
    })
}

/// Channel description accepted on the command line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ChannelSpec {
    Dueck(DueckParams),
    Blackwell {
        p: f64,
        #[serde(default)]
        feedback: FeedbackConfig,
        #[serde(default)]
        independent: bool,
    },
    ProductZ {
        q: f64,
    },
    Custom {
        law: ConditionalPmf,
    },
}

impl ChannelSpec {
    pub fn build(&self) -> Result<Dmbc> {
        match self {
            ChannelSpec::Dueck(d) => make_dueck(d),
            ChannelSpec::Blackwell { p, feedback, independent } => {
                let bp = BlackwellParams { p: *p, feedback: feedback.clone() };
                if *independent {
                    make_blackwell_independent(&bp)
                } else {
                    make_blackwell(&bp)
                }
            }
            ChannelSpec::ProductZ { q } => make_product_z(*q),
            ChannelSpec::Custom { law } => Dmbc::new(law.clone()),
        }
    }
}

/// Two parallel Z-channels: `X = 2*X1 + X2`, `Yi` is `Xi` with `1 -> 0`
/// flips of probability `q`, feedback `Yt = 2*Y1 + Y2`.
pub fn make_product_z(q: f64) -> Result<Dmbc> {
    if !(0.0..=1.0).contains(&q) {
        return Err(ChannelError::Probability(q));
    }
    let z = |x: usize| if x == 0 { vec![(0, 1.0)] } else { vec![(0, q), (1, 1.0 - q)] };
    Dmbc::from_table([4, 2, 2, 4], |x| {
        let mut out = Vec::new();
        for (y1, p1) in z(x >> 1) {
            for (y2, p2) in z(x & 1) {
                if p1 * p2 > 0.0 {
                    out.push(((y1, y2, 2 * y1 + y2), p1 * p2));
                }
            }
        }
        out
    })
}

/// Noise law `Z0 = 0`, `Z1 = Z2 ~ Bern(1/2)`.
pub fn dueck_correlated_noise() -> JointPmf {
    JointPmf::from_fn(
        vec![Alphabet::new("Z0", 2), Alphabet::new("Z1", 2), Alphabet::new("Z2", 2)],
        |z| if z[0] == 0 && z[1] == z[2] { 0.5 } else { 0.0 },
    )
    .expect("valid law")
}

/// Noise law with every `Z` bit fixed to 0.
pub fn dueck_zero_noise() -> JointPmf {
    JointPmf::point(vec![Alphabet::new("Z0", 2), Alphabet::new("Z1", 2), Alphabet::new("Z2", 2)], &[0, 0, 0])
        .expect("valid law")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_noise_is_deterministic() {
        let ch = make_dueck(&DueckParams { noise_law: dueck_zero_noise(), feedback: FeedbackConfig::Noiseless })
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for x in 0..8 {
            let (x1, x0, x2) = ((x >> 2) & 1, (x >> 1) & 1, x & 1);
            let (y1, y2, yt) = ch.sample(x, &mut rng).unwrap();
            assert_eq!((y1, y2, yt), (2 * x1 + x0, 2 * x0 + x2, x));
        }
    }

    #[test]
    fn blackwell_tables() {
        let ch = make_blackwell(&BlackwellParams { p: 0.0, feedback: FeedbackConfig::None }).unwrap();
        let m = ch.law().row(1);
        assert_eq!(m[2], 1.0); // (y1, y2) = (1, 0)
        let ch = make_blackwell(&BlackwellParams { p: 0.1, feedback: FeedbackConfig::None }).unwrap();
        let m = ch.law().row(0);
        assert!((m[0] - 0.9).abs() < 1e-12 && (m[3] - 0.1).abs() < 1e-12);
        assert!(make_blackwell(&BlackwellParams { p: 0.5, feedback: FeedbackConfig::None }).is_err());
    }

    #[test]
    fn condition() {
        assert!(dueck_condition_holds(&dueck_correlated_noise()).unwrap());
        assert!(dueck_condition_holds(&dueck_zero_noise()).unwrap());
        let iid = JointPmf::uniform(vec![Alphabet::new("Z0", 2), Alphabet::new("Z1", 2), Alphabet::new("Z2", 2)])
            .unwrap();
        assert!(!dueck_condition_holds(&iid).unwrap());
    }

    #[test]
    fn spec_json() {
        let s = r#"{"type":"blackwell","p":0.1,"feedback":{"kind":"noisy","q":[0,0.01,0.01]}}"#;
        let spec: ChannelSpec = serde_json::from_str(s).unwrap();
        let ch = spec.build().unwrap();
        assert_eq!(ch.feedback_size(), 4);
    }
}
