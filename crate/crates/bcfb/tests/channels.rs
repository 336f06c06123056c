use bcfb::channels::{
    dueck_correlated_noise, make_blackwell, make_dueck, make_product_z, BlackwellParams, ChannelSpec, DueckParams,
    FeedbackConfig,
};
use bcfb::info::{Alphabet, JointPmf};
use proptest::prelude::*;

fn noise() -> impl Strategy<Value = JointPmf> {
    prop::collection::vec(0.0f64..1.0, 8).prop_filter_map("zero mass", |w| {
        let s: f64 = w.iter().sum();
        (s > 1e-3).then(|| {
            JointPmf::new(
                vec![Alphabet::new("Z0", 2), Alphabet::new("Z1", 2), Alphabet::new("Z2", 2)],
                w.iter().map(|x| x / s).collect(),
            )
            .unwrap()
        })
    })
}

fn uniform(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn noisy_feedback_is_degraded(law in noise(), q in prop::array::uniform3(0.0f64..0.5)) {
        let ch = make_dueck(&DueckParams { noise_law: law, feedback: FeedbackConfig::Noisy { q, joint: None } }).unwrap();
        let j = ch.joint(&uniform(8)).unwrap();
        prop_assert!(j.mutual_information(&["X"], &["Yt"], &["Y1", "Y2"]).unwrap() <= 1e-9);
    }

    #[test]
    fn receiver_one_sees_only_its_noise(a in noise(), b in noise()) {
        // Replace the Z2 conditional while keeping the (Z0, Z1) marginal of `a`.
        let a01 = a.marginalize(&["Z0", "Z1"]).unwrap();
        let b2 = b.conditional(&["Z0", "Z1"], &["Z2"]).unwrap();
        let mixed = a01.compose(&b2).unwrap();
        let c1 = make_dueck(&DueckParams { noise_law: a, feedback: FeedbackConfig::None }).unwrap();
        let c2 = make_dueck(&DueckParams { noise_law: mixed, feedback: FeedbackConfig::None }).unwrap();
        let m1 = c1.marginal_channel(1).unwrap();
        let m2 = c2.marginal_channel(1).unwrap();
        for (x, y) in m1.mass().iter().zip(m2.mass()) {
            prop_assert!((x - y).abs() <= 1e-9);
        }
    }

    #[test]
    fn zero_flip_noise_is_noiseless(law in noise()) {
        let a = make_dueck(&DueckParams { noise_law: law.clone(), feedback: FeedbackConfig::Noiseless }).unwrap();
        let b = make_dueck(&DueckParams { noise_law: law, feedback: FeedbackConfig::Noisy { q: [0.0; 3], joint: None } }).unwrap();
        prop_assert_eq!(a.law().mass(), b.law().mass());
    }
}

#[test]
fn dueck_outputs_by_hand() {
    // Z0 = 0, Z1 = Z2 = 1 with probability 1/2: receiver 1 sees X0 exactly and X1 with a fair flip.
    let ch = make_dueck(&DueckParams { noise_law: dueck_correlated_noise(), feedback: FeedbackConfig::Noiseless }).unwrap();
    let j = ch.joint(&uniform(8)).unwrap();
    assert!((j.mi(&["X"], &["Y1"]).unwrap() - 1.0).abs() < 1e-9);
    assert!((j.mi(&["X"], &["Y1", "Y2"]).unwrap() - 2.0).abs() < 1e-9);
    assert!((j.mi(&["X"], &["Yt"]).unwrap() - 2.0).abs() < 1e-9);
}

#[test]
fn blackwell_noiseless_outputs() {
    let ch = make_blackwell(&BlackwellParams { p: 0.0, feedback: FeedbackConfig::Noiseless }).unwrap();
    let j = ch.joint(&uniform(3)).unwrap();
    assert!((j.mi(&["X"], &["Y1", "Y2"]).unwrap() - 3f64.log2()).abs() < 1e-9);
}

#[test]
fn product_z_capacity_per_component() {
    // Z-channel with 1->0 flips q = 0.5, uniform input: I = h(1/4) - 1/2.
    let ch = make_product_z(0.5).unwrap();
    let j = ch.joint(&uniform(4)).unwrap();
    let h = |p: f64| -p * p.log2() - (1.0 - p) * (1.0 - p).log2();
    assert!((j.mi(&["X"], &["Y1"]).unwrap() - (h(0.25) - 0.5)).abs() < 1e-9);
}

#[test]
fn channel_spec_json() {
    let s: ChannelSpec = serde_json::from_str(r#"{"type":"blackwell","p":0.1}"#).unwrap();
    assert_eq!(s.build().unwrap().input_size(), 3);
    let s: ChannelSpec = serde_json::from_str(r#"{"type":"productz","q":0.3}"#).unwrap();
    assert_eq!(s.build().unwrap().feedback_size(), 4);
    assert!(serde_json::from_str::<ChannelSpec>(r#"{"type":"blackwell","p":0.7}"#).unwrap().build().is_err());
}
