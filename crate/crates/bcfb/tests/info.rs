use bcfb::info::{binary_convolution, binary_entropy, Alphabet, ConditionalPmf, JointPmf};
use proptest::prelude::*;

const TAU: f64 = 1e-9;

fn normalize(w: Vec<f64>) -> Vec<f64> {
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

/// Law over `A` (2), `B` (3), `C` (2).
fn law3() -> impl Strategy<Value = JointPmf> {
    prop::collection::vec(0.001f64..1.0, 12).prop_map(|w| {
        JointPmf::new(vec![Alphabet::new("A", 2), Alphabet::new("B", 3), Alphabet::new("C", 2)], normalize(w)).unwrap()
    })
}

fn h(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum()
}

#[test]
fn bsc_capacity_matches_closed_form() {
    // Uniform input through a BSC(p): I(X;Y) = 1 - h(p) by direct summation.
    for p in [0.0, 0.05, 0.11, 0.3, 0.5] {
        let j = JointPmf::from_fn(vec![Alphabet::new("X", 2), Alphabet::new("Y", 2)], |s| {
            0.5 * if s[0] == s[1] { 1.0 - p } else { p }
        })
        .unwrap();
        let oracle = 1.0 - h(&[p, 1.0 - p]);
        assert!((j.mi(&["X"], &["Y"]).unwrap() - oracle).abs() < TAU);
        assert!((binary_entropy(p).unwrap() - h(&[p, 1.0 - p])).abs() < TAU);
    }
}

#[test]
fn entropy_by_hand() {
    let j = JointPmf::new(vec![Alphabet::new("X", 4)], vec![0.5, 0.25, 0.125, 0.125]).unwrap();
    assert!((j.entropy(&["X"]).unwrap() - 1.75).abs() < TAU);
}

#[test]
fn convolution_by_hand() {
    let c = binary_convolution(0.1, 0.2).unwrap();
    assert!((c - (0.1 * 0.8 + 0.9 * 0.2)).abs() < TAU);
}

#[test]
fn bad_inputs_rejected() {
    assert!(JointPmf::new(vec![Alphabet::new("X", 2)], vec![0.6, 0.6]).is_err());
    assert!(JointPmf::new(vec![Alphabet::new("X", 2)], vec![1.2, -0.2]).is_err());
    assert!(binary_entropy(1.5).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nonnegative(j in law3()) {
        for (a, b, c) in [(&["A"][..], &["B"][..], &[][..]), (&["A"], &["C"], &["B"]), (&["B", "C"], &["A"], &[])] {
            prop_assert!(j.mutual_information(a, b, c).unwrap() >= 0.0);
        }
        prop_assert!(j.entropy(&["A", "B"]).unwrap() >= 0.0);
        prop_assert!(j.conditional_entropy(&["C"], &["A", "B"]).unwrap() >= 0.0);
    }

    #[test]
    fn chain_rule(j in law3()) {
        let lhs = j.entropy(&["A", "B"]).unwrap();
        let rhs = j.entropy(&["A"]).unwrap() + j.conditional_entropy(&["B"], &["A"]).unwrap();
        prop_assert!((lhs - rhs).abs() < TAU);
    }

    #[test]
    fn mi_from_entropies(j in law3()) {
        let i = j.mi(&["A"], &["B"]).unwrap();
        let e = j.entropy(&["A"]).unwrap() + j.entropy(&["B"]).unwrap() - j.entropy(&["A", "B"]).unwrap();
        prop_assert!((i - e).abs() < TAU);
        prop_assert!((i - j.mi(&["B"], &["A"]).unwrap()).abs() < TAU);
    }

    #[test]
    fn data_processing(
        pa in prop::collection::vec(0.01f64..1.0, 3),
        wb in prop::collection::vec(0.01f64..1.0, 9),
        wc in prop::collection::vec(0.01f64..1.0, 6),
    ) {
        let a = JointPmf::new(vec![Alphabet::new("A", 3)], normalize(pa)).unwrap();
        let rows = |w: Vec<f64>, k: usize| -> Vec<f64> { w.chunks(k).flat_map(|r| normalize(r.to_vec())).collect() };
        let ab = ConditionalPmf::new(vec![Alphabet::new("A", 3)], vec![Alphabet::new("B", 3)], rows(wb, 3)).unwrap();
        let bc = ConditionalPmf::new(vec![Alphabet::new("B", 3)], vec![Alphabet::new("C", 2)], rows(wc, 2)).unwrap();
        let j = a.compose(&ab).unwrap().compose(&bc).unwrap();
        prop_assert!(j.mi(&["A"], &["C"]).unwrap() <= j.mi(&["A"], &["B"]).unwrap() + TAU);
    }

    #[test]
    fn convolution_algebra(a in 0.0f64..=1.0, b in 0.0f64..=1.0, c in 0.0f64..=1.0) {
        let ab = binary_convolution(a, b).unwrap();
        prop_assert!((ab - binary_convolution(b, a).unwrap()).abs() < TAU);
        let l = binary_convolution(ab, c).unwrap();
        let r = binary_convolution(a, binary_convolution(b, c).unwrap()).unwrap();
        prop_assert!((l - r).abs() < TAU);
    }

    #[test]
    fn marginal_is_consistent(j in law3()) {
        let m = j.marginalize(&["C", "A"]).unwrap();
        prop_assert!((m.entropy(&["A", "C"]).unwrap() - j.entropy(&["A", "C"]).unwrap()).abs() < TAU);
        prop_assert!((m.mass().iter().sum::<f64>() - 1.0).abs() < TAU);
    }
}
