use bcfb::channels::{dueck_correlated_noise, make_dueck, DueckParams, FeedbackConfig};
use bcfb::info::{Alphabet, JointPmf};
use bcfb::mcsim::{
    block_markov_trial, gen_lgw_code, gen_marton_code, is_jointly_typical, lgw_encode, marton_encode, trial_rng,
    BlockMarkovConfig, BlockRates, LgwRates, MartonRates, SimError,
};
use bcfb::regions::{dueck_theorem3_scheme, AuxiliaryScheme, DueckV0};
use proptest::prelude::*;

fn pair_law() -> JointPmf {
    JointPmf::from_fn(vec![Alphabet::new("X", 2), Alphabet::new("Y", 2)], |s| if s[0] == s[1] { 0.4 } else { 0.1 }).unwrap()
}

/// Direct frequency check: every cell within `eps * P` of its probability, no mass off the support.
fn typical_oracle(x: &[usize], y: &[usize], law: &JointPmf, eps: f64) -> bool {
    let n = x.len() as f64;
    let mut counts = [0usize; 4];
    for (a, b) in x.iter().zip(y) {
        counts[2 * a + b] += 1;
    }
    counts.iter().zip(law.mass()).all(|(&c, &p)| (c as f64 / n - p).abs() <= eps * p)
}

fn seqs() -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
    (10usize..80).prop_flat_map(|n| (prop::collection::vec(0usize..2, n), prop::collection::vec(0usize..2, n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn typicality_matches_oracle((x, y) in seqs(), eps in prop::sample::select(vec![0.07, 0.13, 0.37, 0.61])) {
        let law = pair_law();
        prop_assert_eq!(is_jointly_typical(&[&x, &y], &law, eps).unwrap(), typical_oracle(&x, &y, &law, eps));
    }

    #[test]
    fn typicality_monotone((x, y) in seqs(), a in 0.01f64..0.98, b in 0.01f64..0.98) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let law = pair_law();
        if is_jointly_typical(&[&x, &y], &law, lo).unwrap() {
            prop_assert!(is_jointly_typical(&[&x, &y], &law, hi).unwrap());
        }
    }
}

#[test]
fn typicality_rejects_bad_input() {
    let law = pair_law();
    assert!(matches!(is_jointly_typical(&[&[0, 1], &[0]], &law, 0.1), Err(SimError::Length { .. })));
    assert!(matches!(is_jointly_typical(&[&[0, 2], &[0, 1]], &law, 0.1), Err(SimError::Symbol { .. })));
    assert!(is_jointly_typical(&[&[0, 1], &[0, 1]], &law, 0.0).is_err());
}

fn correlated_aux() -> AuxiliaryScheme {
    let law = JointPmf::from_fn(vec![Alphabet::new("U0", 1), Alphabet::new("U1", 2), Alphabet::new("U2", 2)], |s| {
        if s[1] == s[2] {
            0.3
        } else {
            0.2
        }
    })
    .unwrap();
    AuxiliaryScheme::new(law, vec![0, 1, 2, 3]).unwrap()
}

#[test]
fn marton_encoder_covering() {
    // Binning rates 0.2 total against I(U1;U2) = 0.029: success frequency must climb toward 1.
    let aux = correlated_aux();
    let rates = MartonRates { r1b: 0.1, r2b: 0.1, ..Default::default() };
    let eps = 0.3;
    let mut freq = Vec::new();
    for n in [20, 40, 80] {
        let mut ok = 0;
        for t in 0..200 {
            let mut rng = trial_rng(3, 1, t);
            let code = gen_marton_code(&aux, &rates, n, &mut rng).unwrap();
            let e = marton_encode(&code, 0, [0, 0], eps, &mut rng).unwrap();
            if !e.fallback {
                ok += 1;
                let u: Vec<&[usize]> = e.u.iter().map(|v| v.as_slice()).collect();
                assert!(is_jointly_typical(&u, &aux.law_u, eps / 32.0).unwrap(), "n {n} trial {t}");
            }
        }
        freq.push(ok as f64 / 200.0);
    }
    assert!(freq.windows(2).all(|w| w[1] > w[0]), "{freq:?}");
    assert!(freq[2] > 0.9, "{freq:?}");
}

#[test]
fn lgw_encoder_soundness() {
    let law = JointPmf::from_fn(
        ["S", "Y1", "Y2", "V0", "V1", "V2"].iter().zip([2, 1, 1, 2, 2, 2]).map(|(n, s)| Alphabet::new(*n, s)).collect(),
        |s| 0.5 * if s[0] == s[3] { 0.8 } else { 0.2 } * 0.25,
    )
    .unwrap();
    // At n = 40 every positive cell of (S, V0, Vi) has an integer window.
    let rates = LgwRates { r: [0.4, 0.25, 0.25], rb: [0.0; 3] };
    let (n, eps) = (40, 0.5);
    let mut hits = 0;
    for t in 0..100 {
        let mut rng = trial_rng(4, 2, t);
        let code = gen_lgw_code(&law, &rates, n, &mut rng).unwrap();
        let s: Vec<usize> = (0..n).map(|j| (j * 7 + t) % 2).collect();
        let e = lgw_encode(&code, &s, eps, &mut rng).unwrap();
        if e.fallback {
            continue;
        }
        hits += 1;
        for (i, vi) in ["V1", "V2"].iter().enumerate() {
            let m = law.marginalize(&["S", "V0", vi]).unwrap();
            assert!(is_jointly_typical(&[&s, &e.v[0], &e.v[i + 1]], &m, eps / 2.0).unwrap());
        }
    }
    assert!(hits > 0);
}

#[test]
fn resource_cap_is_reported() {
    let aux = correlated_aux();
    let rates = MartonRates { r1p: 2.0, ..Default::default() };
    let mut rng = trial_rng(0, 0, 0);
    assert!(matches!(gen_marton_code(&aux, &rates, 40, &mut rng), Err(SimError::Resource { .. })));
}

fn block_cfg(n: usize) -> BlockMarkovConfig {
    let ch = make_dueck(&DueckParams { noise_law: dueck_correlated_noise(), feedback: FeedbackConfig::Noiseless }).unwrap();
    let (aux, upd) = dueck_theorem3_scheme(&ch, DueckV0::Z0Z1).unwrap();
    let rates = BlockRates {
        data: MartonRates { r1p: 0.3, r2p: 0.3, ..Default::default() },
        update: LgwRates { r: [0.5, 0.0, 0.0], rb: [0.0, 0.5, 0.5] },
        last_binning: [0.0, 0.0],
    };
    BlockMarkovConfig { aux, upd, ch, rates, b: 2, gamma: 4.0, n, eps: 0.3, seed: 1 }
}

#[test]
fn block_markov_deterministic_and_accounted() {
    let cfg = block_cfg(12);
    for t in 0..4 {
        let a = block_markov_trial(&cfg, &mut trial_rng(1, 9, t)).unwrap();
        let b = block_markov_trial(&cfg, &mut trial_rng(1, 9, t)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.block_errors.len(), cfg.b);
        assert_eq!(a.error, a.block_errors.iter().any(|e| e[0] || e[1]));
    }
}

#[test]
fn block_markov_rejects_short_last_block() {
    let mut cfg = block_cfg(12);
    cfg.rates.update.r = [1.5, 0.0, 0.0];
    cfg.gamma = 1.2;
    assert!(cfg.validate().is_err());
    cfg.gamma = 2.0;
    assert!(cfg.validate().is_ok());
}
