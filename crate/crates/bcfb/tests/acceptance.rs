//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::time::{Duration, Instant};

use bcfb::channels::{
    dueck_condition_holds, dueck_correlated_noise, dueck_zero_noise, make_blackwell, make_dueck, make_product_z,
    BlackwellParams, Dmbc, DueckParams, FeedbackConfig,
};
use bcfb::info::{Alphabet, JointPmf};
use bcfb::mcsim::{
    block_markov_experiment, is_jointly_typical, marton_experiment, BlockMarkovConfig, BlockRates, LemmaKind,
    LemmaSuite, LgwRates, MartonRates, SchemeSpec,
};
use bcfb::polytope::{region_equal, RateRegion3};
use bcfb::regions::{
    blackwell_bounds, cutset_sum, dueck_capacity, dueck_theorem3_region, dueck_theorem3_scheme, feedback_constants,
    feedback_inner, fm_check, induced_joint, marton_region, random_aux, random_update, z_markov_chain_holds,
    DueckV0, DueckWhich, FmTarget, GridSpec, RegionConstants, UpdateScheme, Variant,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Res<T> = Result<T, Box<dyn std::error::Error>>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Res<Outcome> {
    Ok(Outcome { pass, detail: detail.into() })
}

fn dueck(law: JointPmf, feedback: FeedbackConfig) -> Res<Dmbc> {
    Ok(make_dueck(&DueckParams { noise_law: law, feedback })?)
}

fn fm(target: FmTarget) -> Res<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let r = fm_check(&mut rng, target, 10, 1e-9)?;
    Ok((r.pass(), format!("{target:?} {}/{}", r.passed, r.cases)))
}

fn c1() -> Res<Outcome> {
    let t = Instant::now();
    let (ok, d) = fm(FmTarget::Marton)?;
    let el = t.elapsed();
    outcome(ok && el < Duration::from_secs(1), format!("{d}, {el:.2?}"))
}

fn c2() -> Res<Outcome> {
    let (a, da) = fm(FmTarget::Lgw)?;
    let (b, db) = fm(FmTarget::Feedback)?;
    outcome(a && b, format!("{da}; {db}"))
}

fn c3() -> Res<Outcome> {
    let law = dueck_correlated_noise();
    let fb = dueck_capacity(&law, DueckWhich::Feedback)?.sum_rate_max()?.value;
    let nofb = dueck_capacity(&law, DueckWhich::Nofeedback)?.sum_rate_max()?.value;
    let th = dueck_theorem3_region(&dueck(law, FeedbackConfig::Noiseless)?)?.sum_rate_max()?.value;
    let mut expect = RateRegion3::new(Vec::new(), Some([4.0; 3]));
    expect.push([1.0, 0.0, 0.0], 0.0);
    expect.push([0.0, 1.0, 0.0], 2.0);
    expect.push([0.0, 0.0, 1.0], 2.0);
    expect.push([0.0, 1.0, 1.0], 3.0);
    let zero = dueck_zero_noise();
    let zf = region_equal(&dueck_capacity(&zero, DueckWhich::Feedback)?, &expect, 1e-9)?;
    let zn = region_equal(&dueck_capacity(&zero, DueckWhich::Nofeedback)?, &expect, 1e-9)?;
    let ok = (fb - 2.0).abs() < 1e-6 && (nofb - 1.0).abs() < 1e-6 && (th - 2.0).abs() < 1e-6 && zf && zn;
    outcome(ok, format!("fb {fb:.6} nofb {nofb:.6} scheme {th:.6} zero-noise region {}", zf && zn))
}

/// Random noise law on a sparse support, redrawn until the Dueck condition holds.
fn random_noise(rng: &mut ChaCha8Rng) -> Res<JointPmf> {
    let axes = || vec![Alphabet::new("Z0", 2), Alphabet::new("Z1", 2), Alphabet::new("Z2", 2)];
    loop {
        let k = rng.gen_range(1..=4);
        let mut mass = vec![0.0; 8];
        for _ in 0..k {
            mass[rng.gen_range(0..8)] += rng.gen::<f64>() + 0.05;
        }
        let total: f64 = mass.iter().sum();
        mass.iter_mut().for_each(|m| *m /= total);
        let law = JointPmf::new(axes(), mass)?;
        if dueck_condition_holds(&law)? {
            return Ok(law);
        }
    }
}

fn c4() -> Res<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut agree, mut chains) = (0, 0);
    for _ in 0..50 {
        let law = random_noise(&mut rng)?;
        let fb = dueck_capacity(&law, DueckWhich::Feedback)?.sum_rate_max()?.value;
        let nofb = dueck_capacity(&law, DueckWhich::Nofeedback)?.sum_rate_max()?.value;
        let chain = z_markov_chain_holds(&law)?;
        chains += chain as usize;
        agree += (chain == (fb - nofb <= 1e-9)) as usize;
    }
    outcome(agree == 50 && chains > 0 && chains < 50, format!("{agree}/50 agree, {chains} Markov chains"))
}

fn c5() -> Res<Outcome> {
    let t = Instant::now();
    let grid = GridSpec::alpha_beta(200);
    let (mut below, mut gain) = (true, 0);
    let mut p0 = f64::NAN;
    for k in 0..19 {
        let p = 0.025 * k as f64;
        let b = blackwell_bounds(p, &grid)?;
        below &= b.fb_lower <= b.fb_cutset + 1e-9;
        gain += (b.fb_lower > b.nofb_upper + 1e-3) as usize;
        if k == 0 {
            p0 = b.fb_lower;
        }
    }
    let el = t.elapsed();
    let ok = below && (p0 - 3f64.log2()).abs() < 1e-4 && gain > 0 && el < Duration::from_secs(30);
    outcome(ok, format!("fb_lower(0) {p0:.6}, gain at {gain}/19 points, below cut-set {below}, {el:.2?}"))
}

fn c6() -> Res<Outcome> {
    let law = dueck_correlated_noise();
    let nofb = dueck_capacity(&law, DueckWhich::Nofeedback)?.sum_rate_max()?.value;
    let ch = dueck(law, FeedbackConfig::Noisy { q: [1e-3; 3], joint: None })?;
    let s = dueck_theorem3_region(&ch)?.sum_rate_max()?.value;
    outcome(s > nofb + 1e-3, format!("q=1e-3 sum {s:.6} vs no feedback {nofb:.6}"))
}

fn c7() -> Res<Outcome> {
    let t = Instant::now();
    let suite = LemmaSuite::standard(11)?;
    let rows = suite.run(None)?;
    let el = t.elapsed();
    let mut ok = el < Duration::from_secs(300);
    let mut parts = Vec::new();
    for (k, c) in suite.cases.iter().enumerate() {
        let above = c.rates[0] > c.threshold;
        let good = match c.lemma {
            LemmaKind::Covering => above,
            LemmaKind::Packing | LemmaKind::MvPacking => !above,
        };
        let errs: Vec<f64> = rows.iter().filter(|(i, _)| *i == k).map(|(_, r)| r.error_rate).collect();
        let ok_case = if good { *errs.last().unwrap_or(&1.0) < 0.05 } else { errs.iter().all(|&e| e > 0.5) };
        ok &= ok_case;
        parts.push(format!("{} {:?}", c.name, errs));
    }
    outcome(ok, format!("{} ({el:.1?})", parts.join("; ")))
}

fn c8() -> Res<Outcome> {
    let ch = make_product_z(0.7)?;
    let (aux, _) = SchemeSpec::Uniform { sizes: [1, 2, 2] }.build(&ch)?;
    let j = induced_joint(&aux, None, &ch)?;
    let r = 0.9 * j.mi(&["U1"], &["Y1"])?;
    let inside = MartonRates { r1p: r, r2p: r, ..Default::default() };
    let rows = marton_experiment(&aux, &ch, &inside, &[20, 40, 80], 2000, 0.3, 7, None)?;
    let errs: Vec<f64> = rows.iter().map(|r| r.error_rate).collect();
    let dec = errs.windows(2).all(|w| w[1] < w[0]);
    let over = 1.1 * cutset_sum(&ch)? / 2.0;
    let outside = MartonRates { r1p: over, r2p: over, ..Default::default() };
    let conv = marton_experiment(&aux, &ch, &outside, &[80], 2000, 0.3, 7, None)?[0].error_rate;
    outcome(dec && conv >= 0.5, format!("inside {errs:?}, 10% above cut-set at n=80: {conv}"))
}

fn c9() -> Res<Outcome> {
    let t = Instant::now();
    let ch = dueck(dueck_correlated_noise(), FeedbackConfig::Noiseless)?;
    let (aux, upd) = dueck_theorem3_scheme(&ch, DueckV0::Z0Z1)?;
    let rates = BlockRates {
        data: MartonRates { r1p: 0.6, r2p: 0.6, ..Default::default() },
        update: LgwRates { r: [1.0, 0.0, 0.0], rb: [0.0, 1.0, 1.0] },
        last_binning: [0.0, 0.0],
    };
    let (mut fb, mut base) = (Vec::new(), Vec::new());
    for n in [12, 16, 20] {
        let cfg =
            BlockMarkovConfig { aux: aux.clone(), upd: upd.clone(), ch: ch.clone(), rates, b: 2, gamma: 4.0, n, eps: 0.3, seed: 5 };
        fb.push(block_markov_experiment(&cfg, 500, None)?.error_rate);
        base.push(block_markov_experiment(&cfg.baseline()?, 500, None)?.error_rate);
    }
    let el = t.elapsed();
    let dec = fb.windows(2).all(|w| w[1] < w[0]);
    let dom = fb.iter().zip(&base).all(|(f, b)| f < b);
    outcome(dec && dom && el < Duration::from_secs(900), format!("feedback {fb:?}, baseline {base:?}, {el:.1?}"))
}

fn constants_match(a: &RegionConstants, b: &RegionConstants) -> bool {
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-9;
    (0..2).all(|i| close(a.i0[i], b.i0[i]) && close(a.a[i], b.a[i]) && close(a.c[i], b.c[i]))
        && close(a.t, b.t)
        && a.g.iter().chain(&a.k).all(|&v| v.abs() <= 1e-9)
}

fn c10() -> Res<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut fails = Vec::new();

    // Information identities.
    let mut id_ok = true;
    for _ in 0..50 {
        let mass: Vec<f64> = (0..12).map(|_| rng.gen::<f64>()).collect();
        let s: f64 = mass.iter().sum();
        let j = JointPmf::new(
            vec![Alphabet::new("A", 2), Alphabet::new("B", 3), Alphabet::new("C", 2)],
            mass.iter().map(|m| m / s).collect(),
        )?;
        let chain = j.entropy(&["A"])? + j.conditional_entropy(&["B"], &["A"])? + j.conditional_entropy(&["C"], &["A", "B"])?;
        id_ok &= (chain - j.entropy(&["A", "B", "C"])?).abs() < 1e-9;
        id_ok &= j.mi(&["A"], &["B"])? >= -1e-12 && j.mutual_information(&["A"], &["C"], &["B"])? >= -1e-12;
    }
    if !id_ok {
        fails.push("information identities".to_string());
    }

    // Marton reduction and inclusions on the example channels.
    let channels = [
        ("dueck", dueck(dueck_correlated_noise(), FeedbackConfig::Noiseless)?),
        ("blackwell", make_blackwell(&BlackwellParams { p: 0.1, feedback: FeedbackConfig::Noiseless })?),
        ("product_z", make_product_z(0.7)?),
    ];
    for (name, ch) in &channels {
        let (mut consts, mut full, mut star, mut incl) = (0, 0, 0, 0);
        for _ in 0..20 {
            let aux = random_aux(&mut rng, [2, 2, 2], ch.input_size());
            let m = marton_region(&aux, ch)?;
            let mc = RegionConstants::from_joint(&induced_joint(&aux, None, ch)?, None)?;
            let uf = UpdateScheme::constant(Variant::Full, &aux, ch)?;
            let us = UpdateScheme::constant(Variant::Star, &aux, ch)?;
            consts += (constants_match(&feedback_constants(&aux, &uf, ch)?, &mc)
                && constants_match(&feedback_constants(&aux, &us, ch)?, &mc)) as usize;
            let f = feedback_inner(&aux, &uf, ch, Variant::Full)?;
            let s = feedback_inner(&aux, &us, ch, Variant::Star)?;
            full += region_equal(&f, &m, 1e-9)? as usize;
            star += region_equal(&s, &m, 1e-9)? as usize;
            let ur = random_update(&mut rng, Variant::Star, &aux, ch, [2, 2, 2])?;
            let rs = feedback_inner(&aux, &ur, ch, Variant::Star)?;
            let rf = feedback_inner(&aux, &ur.lift_to_full(&aux, ch)?, ch, Variant::Full)?;
            incl += (rs.subset_of(&rf, 1e-9)? && m.subset_of(&f, 1e-9)? && m.subset_of(&s, 1e-9)?) as usize;
        }
        for (what, k) in [("constants", consts), ("full region", full), ("star region", star), ("inclusions", incl)] {
            if k < 20 {
                fails.push(format!("{name} reduction {what} {k}/20"));
            }
        }
    }

    // Typicality monotonicity in eps.
    let law = JointPmf::from_fn(vec![Alphabet::new("X", 2), Alphabet::new("Y", 2)], |s| if s[0] == s[1] { 0.4 } else { 0.1 })?;
    let mut mono = true;
    for _ in 0..200 {
        let x: Vec<usize> = (0..60).map(|_| rng.gen_range(0..2)).collect();
        let y: Vec<usize> = x.iter().map(|&b| if rng.gen_bool(0.25) { 1 - b } else { b }).collect();
        let mut prev = false;
        for eps in [0.05, 0.1, 0.2, 0.3, 0.5, 0.8] {
            let now = is_jointly_typical(&[&x, &y], &law, eps)?;
            mono &= !prev || now;
            prev = now;
        }
    }
    if !mono {
        fails.push("typicality monotonicity".into());
    }

    // Determinism under a fixed seed and across worker counts.
    let ch = make_product_z(0.7)?;
    let (aux, _) = SchemeSpec::Uniform { sizes: [1, 2, 2] }.build(&ch)?;
    let rates = MartonRates { r1p: 0.15, r2p: 0.15, ..Default::default() };
    let a = marton_experiment(&aux, &ch, &rates, &[20], 200, 0.3, 9, Some(1))?;
    let b = marton_experiment(&aux, &ch, &rates, &[20], 200, 0.3, 9, None)?;
    let c = marton_experiment(&aux, &ch, &rates, &[20], 200, 0.3, 9, Some(2))?;
    if a != b || a != c {
        fails.push("determinism".into());
    }

    let detail = if fails.is_empty() { "all suites green".to_string() } else { fails.join("; ") };
    outcome(fails.is_empty(), detail)
}

fn main() {
    let criteria: [(usize, &str, fn() -> Res<Outcome>); 10] = [
        (1, "fm marton", c1),
        (2, "fm lgw and feedback", c2),
        (3, "dueck reproduction", c3),
        (4, "dueck gain predicate", c4),
        (5, "blackwell sweep", c5),
        (6, "noisy feedback continuity", c6),
        (7, "lemma thresholds", c7),
        (8, "marton monte carlo", c8),
        (9, "block-markov demo", c9),
        (10, "invariant suites", c10),
    ];
    let only: Vec<usize> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|s| s.trim().parse().ok()).collect())
        .unwrap_or_default();
    let mut failed = 0;
    for (k, name, f) in criteria {
        if !only.is_empty() && !only.contains(&k) {
            continue;
        }
        let (pass, detail) = match f() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += !pass as usize;
        println!("{} {k} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
