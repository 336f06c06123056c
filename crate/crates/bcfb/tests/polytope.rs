use bcfb::polytope::{convex_hull_union, region_equal, LinIneqSystem, RateRegion3};
use proptest::prelude::*;

/// Random rows over `nv` variables, plus a box `|x_i| <= 5` so projections are bounded.
fn system(nv: usize, names: &[&str]) -> impl Strategy<Value = LinIneqSystem> {
    let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
    prop::collection::vec((prop::collection::vec(-3i32..=3, nv), -4i32..=8), 2..10).prop_map(move |rows| {
        let mut s = LinIneqSystem::new(&names).unwrap();
        for (c, b) in rows {
            s.push_row(c.into_iter().map(f64::from).collect(), f64::from(b)).unwrap();
        }
        for i in 0..nv {
            let mut e = vec![0.0; nv];
            e[i] = 1.0;
            s.push_row(e.clone(), 5.0).unwrap();
            e[i] = -1.0;
            s.push_row(e, 5.0).unwrap();
        }
        s
    })
}

/// Does some `v` extend `x` (all but the last variable) to a solution?
fn extends(s: &LinIneqSystem, x: &[f64]) -> bool {
    let k = x.len();
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for r in &s.rows {
        let rest: f64 = r.coef[..k].iter().zip(x).map(|(a, b)| a * b).sum();
        let slack = r.bound - rest;
        let a = r.coef[k];
        if a > 0.0 {
            hi = hi.min(slack / a);
        } else if a < 0.0 {
            lo = lo.max(slack / a);
        } else if slack < -1e-9 {
            return false;
        }
    }
    lo <= hi + 1e-9
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fm_soundness(s in system(3, &["x", "y", "v"]), pts in prop::collection::vec((-6.0f64..6.0, -6.0f64..6.0), 40)) {
        let p = s.fm_eliminate("v").unwrap();
        for (x, y) in pts {
            let a = p.satisfies(&[x, y], 1e-9);
            let b = extends(&s, &[x, y]);
            // Skip points within rounding distance of the boundary.
            let a_loose = p.satisfies(&[x, y], 1e-6);
            let a_tight = p.satisfies(&[x, y], -1e-6);
            if a_loose == a_tight {
                prop_assert_eq!(a, b, "point ({}, {})", x, y);
            }
        }
    }

    #[test]
    fn fm_order_independent(s in system(5, &["R0", "R1", "R2", "a", "b"])) {
        let p = s.fm_eliminate_all(&["a", "b"]).unwrap().to_region3(Some([5.0; 3])).unwrap();
        let q = s.fm_eliminate_all(&["b", "a"]).unwrap().to_region3(Some([5.0; 3])).unwrap();
        prop_assert!(region_equal(&p, &q, 1e-9).unwrap());
    }

    #[test]
    fn vertices_are_contained(s in system(3, &["R0", "R1", "R2"])) {
        let r = s.to_region3(Some([5.0; 3])).unwrap();
        for v in r.vertices().unwrap().points {
            prop_assert!(r.contains_point(&v));
        }
    }

    #[test]
    fn hull_contains_segments(s in system(3, &["R0", "R1", "R2"]), t in 0.0f64..=1.0) {
        let r = s.to_region3(Some([5.0; 3])).unwrap();
        let h = convex_hull_union(&r, &r).unwrap();
        let v = r.vertices().unwrap().points;
        for a in &v {
            for b in &v {
                let m = [0, 1, 2].map(|i| t * a[i] + (1.0 - t) * b[i]);
                prop_assert!(h.contains_tol(&m, 1e-7));
            }
        }
    }
}

#[test]
fn hull_of_two_boxes() {
    let a = RateRegion3::boxed([1.0, 0.0, 2.0]);
    let b = RateRegion3::boxed([2.0, 1.0, 0.0]);
    let h = convex_hull_union(&a, &b).unwrap();
    assert!(h.contains_point(&[1.5, 0.5, 1.0]));
    assert!(!h.contains_point(&[2.0, 1.0, 2.0]));
}
