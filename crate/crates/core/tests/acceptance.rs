//! Metric and format acceptance criteria. Runs as a plain binary and prints
//! one PASS/FAIL line per criterion.

mod common;

use std::time::{Duration, Instant};

use common::*;
use geneval_core::io::{decode_gemb, encode_gemb, read_gemb_file, write_gemb_file, GembData};
use geneval_core::metrics::{
    frechet_distance, frechet_value, inception_score, inception_score_splits, kid_subset_estimate,
    kid_subset_values, precision_recall, PolynomialKernel,
};
use geneval_core::sweep::{sweep, SweepSpec};
use geneval_core::{
    trace_sqrt_product, BackboneNaming, EmbeddingSet, GaussianSummary, KidSpec, MetricName,
    PrSpec, ProbabilitySet, SetBundle, SplitSpec, SuiteSpec,
};
use ndarray::{array, Array1, Array2};
use rand::RngExt;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(f64::MIN_POSITIVE)
}

fn frechet_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(101);
    let mut worst = 0.0f64;
    for case in 0..1000 {
        let d = if case % 2 == 0 { 1 } else { rng.random_range(2..=16) };
        let mu_r: Array1<f64> = (0..d).map(|_| rng.random_range(-5.0..5.0)).collect();
        let mu_g: Array1<f64> = (0..d).map(|_| rng.random_range(-5.0..5.0)).collect();
        let sd_r: Vec<f64> = (0..d).map(|_| rng.random_range(0.1..4.0)).collect();
        let sd_g: Vec<f64> = (0..d).map(|_| rng.random_range(0.1..4.0)).collect();
        let want: f64 = (0..d)
            .map(|i| (mu_r[i] - mu_g[i]).powi(2) + (sd_r[i] - sd_g[i]).powi(2))
            .sum();
        let cov = |sd: &[f64]| Array2::from_diag(&sd.iter().map(|s| s * s).collect::<Array1<f64>>());
        let r = GaussianSummary::new(mu_r, cov(&sd_r), 10).map_err(|e| e.to_string())?;
        let g = GaussianSummary::new(mu_g, cov(&sd_g), 10).map_err(|e| e.to_string())?;
        let got = frechet_value(&r, &g).map_err(|e| e.to_string())?;
        let err = rel_err(got, want);
        worst = worst.max(err);
        ensure(err <= 1e-8, || format!("case {case} (d={d}): got {got}, closed form {want}"))?;
    }
    // Through the embedding-set entry point, against sample statistics.
    for case in 0..50 {
        let n = rng.random_range(5..60);
        let x = normal_matrix(&mut rng, n, 1) * rng.random_range(0.2..3.0) + rng.random_range(-2.0..2.0);
        let y = normal_matrix(&mut rng, n + 3, 1) * rng.random_range(0.2..3.0);
        let stats = |a: &Array2<f64>| {
            let m = a.column(0).sum() / a.nrows() as f64;
            let v = a.column(0).iter().map(|v| (v - m).powi(2)).sum::<f64>() / (a.nrows() - 1) as f64;
            (m, v.sqrt())
        };
        let ((m1, s1), (m2, s2)) = (stats(&x), stats(&y));
        let want = (m1 - m2).powi(2) + (s1 - s2).powi(2);
        let got = frechet_distance(&set(x, "base"), &set(y, "base"), &BackboneNaming::default(), 0.0)
            .map_err(|e| e.to_string())?
            .value;
        let err = rel_err(got, want);
        worst = worst.max(err);
        ensure(err <= 1e-8, || format!("data case {case}: got {got}, closed form {want}"))?;
    }
    let x = set(normal_matrix(&mut rng, 40, 6), "base");
    let same = frechet_distance(&x, &x.clone(), &BackboneNaming::default(), 0.0)
        .map_err(|e| e.to_string())?
        .value;
    ensure(same == 0.0, || format!("identical sets gave {same}"))?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "1050 cases, worst relative error {worst:.1e}, identical input exactly 0, {:.0} ms",
        elapsed.as_secs_f64() * 1e3
    ))
}

fn singular_regime() -> Outcome {
    let mut rng = rng(202);
    let naming = BackboneNaming::default();
    for trial in 0..5 {
        let x = set(normal_matrix(&mut rng, 32, 64), "base");
        let y = set(normal_matrix(&mut rng, 32, 64) * 1.3 + 0.2, "base");
        let xy = frechet_distance(&x, &y, &naming, 0.0).map_err(|e| e.to_string())?.value;
        let yx = frechet_distance(&y, &x, &naming, 0.0).map_err(|e| e.to_string())?.value;
        ensure(xy >= 0.0 && yx >= 0.0, || format!("trial {trial}: negative {xy} / {yx}"))?;
        ensure(rel_err(xy, yx) <= 1e-8, || format!("trial {trial}: asymmetric {xy} vs {yx}"))?;
    }
    let x = set(normal_matrix(&mut rng, 420, 2048), "base");
    let y = set(normal_matrix(&mut rng, 420, 2048) + 0.05, "base");
    let start = Instant::now();
    let big = frechet_distance(&x, &y, &naming, 0.0).map_err(|e| e.to_string())?.value;
    let elapsed = start.elapsed();
    ensure(big.is_finite() && big >= 0.0, || format!("420x2048 gave {big}"))?;
    ensure(elapsed < Duration::from_secs(10), || format!("420x2048 took {elapsed:?}"))?;
    Ok(format!(
        "n=32/D=64 symmetric and non-negative; n=420/D=2048 in {:.2} s",
        elapsed.as_secs_f64()
    ))
}

fn kid_oracle() -> Outcome {
    let mut rng = rng(303);
    let mut worst = 0.0f64;
    for case in 0..200 {
        let n = rng.random_range(2..=50);
        let d = rng.random_range(1..=8);
        let x = normal_matrix(&mut rng, n, d);
        let y = normal_matrix(&mut rng, n, d) * 1.5 + 0.3;
        let want = kid_triple_sum(&x, &y, 1.0 / d as f64, 1.0, 3);
        let got = kid_subset_estimate(x.view(), y.view(), &PolynomialKernel::standard(d));
        worst = worst.max((got - want).abs());
        ensure((got - want).abs() <= 1e-9, || format!("case {case}: {got} vs {want}"))?;
        // The subset driver with a full-size subset sees a permutation of the
        // same rows.
        let spec = KidSpec {
            subset_size: Some(n),
            subset_count: 1,
            ..KidSpec::default()
        };
        let via_driver = kid_subset_values(&set(x, "base"), &set(y, "base"), &spec)
            .map_err(|e| e.to_string())?[0];
        worst = worst.max((via_driver - want).abs());
        ensure((via_driver - want).abs() <= 1e-9, || format!("case {case} driver: {via_driver} vs {want}"))?;
    }
    let x = array![[1.0], [1.0]];
    let y = array![[0.0], [0.0]];
    let hand = kid_subset_estimate(x.view(), y.view(), &PolynomialKernel::standard(1));
    ensure(hand == 7.0, || format!("hand case gave {hand}"))?;
    Ok(format!("200 random sets, worst abs error {worst:.1e}; hand case exactly 7"))
}

fn pr_oracle() -> Outcome {
    let mut rng = rng(404);
    for case in 0..200 {
        let k = if case % 2 == 0 { 1 } else { 3 };
        let (nr, ng) = (rng.random_range(k + 1..=30), rng.random_range(k + 1..=30));
        let (real, gen) = if case % 3 == 0 {
            (normal_matrix(&mut rng, nr, 2), normal_matrix(&mut rng, ng, 2) + 0.5)
        } else {
            (integer_points(&mut rng, nr, 0, 12), integer_points(&mut rng, ng, 2, 14))
        };
        let want = pr_brute_force(&real, &gen, k);
        let (p, r) = precision_recall(&set(real, "base"), &set(gen, "base"), &PrSpec { neighborhood_k: k })
            .map_err(|e| e.to_string())?;
        ensure((p.value, r.value) == want, || format!("case {case}: {:?} vs {want:?}", (p.value, r.value)))?;
    }
    let x = integer_points(&mut rng, 20, 0, 50);
    let (p, r) = precision_recall(&set(x.clone(), "base"), &set(x.clone(), "base"), &PrSpec::default())
        .map_err(|e| e.to_string())?;
    ensure((p.value, r.value) == (1.0, 1.0), || "identical sets not (1,1)".into())?;
    let far = x + 1000.0;
    let x = integer_points(&mut rng, 20, 0, 50);
    let (p, r) = precision_recall(&set(x, "base"), &set(far, "base"), &PrSpec::default())
        .map_err(|e| e.to_string())?;
    ensure((p.value, r.value) == (0.0, 0.0), || "separated sets not (0,0)".into())?;
    Ok("200 configurations exact; identical (1,1); separated (0,0)".into())
}

fn probs(p: Array2<f64>) -> ProbabilitySet {
    ProbabilitySet::new(p, "base", "gen").unwrap()
}

fn inception_properties() -> Outcome {
    let naming = BackboneNaming::default();
    let uniform = inception_score(&probs(Array2::from_elem((50, 10), 0.1)), &SplitSpec::default(), &naming)
        .map_err(|e| e.to_string())?;
    ensure(uniform.value == 1.0 && uniform.dispersion == Some(0.0), || {
        format!("uniform rows gave {} ± {:?}", uniform.value, uniform.dispersion)
    })?;
    for c in [2usize, 5, 21, 100] {
        let p = Array2::from_shape_fn((4 * c, c), |(i, j)| f64::from(i % c == j));
        let one = SplitSpec { split_count: 1, seed: None };
        let got = inception_score(&probs(p.clone()), &one, &naming).map_err(|e| e.to_string())?.value;
        ensure((got - c as f64).abs() <= 1e-10, || format!("one-hot C={c} gave {got}"))?;
        let four = SplitSpec { split_count: 4, seed: None };
        let splits = inception_score_splits(&probs(p), &four).map_err(|e| e.to_string())?;
        ensure(splits.iter().all(|s| (s - c as f64).abs() <= 1e-10), || format!("one-hot C={c} splits {splits:?}"))?;
    }
    let mut rng = rng(505);
    let one = SplitSpec { split_count: 1, seed: None };
    for case in 0..1000 {
        let c = rng.random_range(2..=30);
        let n = rng.random_range(2..=80);
        let p = random_probabilities(&mut rng, n, c, case % 2 == 0);
        let spec = SplitSpec {
            split_count: rng.random_range(1..=(n / 2).clamp(1, 10)),
            seed: Some(case),
        };
        let is = inception_score_splits(&probs(p.clone()), &spec).map_err(|e| e.to_string())?;
        ensure(is.iter().all(|&s| (1.0..=c as f64).contains(&s)), || format!("case {case}: {is:?} outside [1, {c}]"))?;
        let base = inception_score_splits(&probs(p.clone()), &one).map_err(|e| e.to_string())?[0];
        let oracle = inception_brute_force(&p);
        ensure(rel_err(base, oracle) <= 1e-10, || format!("case {case}: {base} vs definition {oracle}"))?;
        let mut order: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut rng);
        let permuted = p.select(ndarray::Axis(0), &order);
        let again = inception_score_splits(&probs(permuted), &one).map_err(|e| e.to_string())?[0];
        ensure(base.to_bits() == again.to_bits(), || format!("case {case}: {base} vs permuted {again}"))?;
    }
    Ok("uniform exactly 1 ± 0; one-hot = C; bounds, definition and bitwise permutation invariance on 1000 sets".into())
}

fn scaling_and_symmetry() -> Outcome {
    let mut rng = rng(606);
    let naming = BackboneNaming::default();
    for case in 0..50 {
        let d = rng.random_range(1..=12);
        let x = normal_matrix(&mut rng, 30, d);
        let y = normal_matrix(&mut rng, 25, d) * 0.7 + 0.4;
        let c: f64 = rng.random_range(0.1..10.0);
        let base = frechet_distance(&set(x.clone(), "base"), &set(y.clone(), "base"), &naming, 0.0)
            .map_err(|e| e.to_string())?
            .value;
        let scaled = frechet_distance(&set(&x * c, "base"), &set(&y * c, "base"), &naming, 0.0)
            .map_err(|e| e.to_string())?
            .value;
        ensure(rel_err(scaled, c * c * base) <= 1e-6, || format!("case {case}: {scaled} vs {}", c * c * base))?;

        let (ra, rb) = (rng.random_range(1..=2 * d), rng.random_range(1..=2 * d));
        let a = random_psd(&mut rng, d, ra);
        let b = random_psd(&mut rng, d, rb);
        let ab = trace_sqrt_product(a.view(), b.view()).map_err(|e| e.to_string())?;
        let ba = trace_sqrt_product(b.view(), a.view()).map_err(|e| e.to_string())?;
        ensure((ab - ba).abs() <= 1e-8 * ab.abs().max(1.0), || format!("case {case}: {ab} vs {ba}"))?;

        let q = random_rotation(&mut rng, d);
        let spec = KidSpec {
            subset_size: Some(20),
            subset_count: 5,
            seed: case,
            ..KidSpec::default()
        };
        let plain = kid_subset_values(&set(x.clone(), "base"), &set(y.clone(), "base"), &spec)
            .map_err(|e| e.to_string())?;
        let rotated = kid_subset_values(&set(x.dot(&q), "base"), &set(y.dot(&q), "base"), &spec)
            .map_err(|e| e.to_string())?;
        let diff = plain.iter().zip(&rotated).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        ensure(diff <= 1e-8, || format!("case {case}: KID moved by {diff} under rotation"))?;

        let real = integer_points(&mut rng, 25, 0, 20);
        let gen = integer_points(&mut rng, 25, 3, 23);
        let shift = array![[rng.random_range(-50..50) as f64, rng.random_range(-50..50) as f64]];
        let motion = |m: &Array2<f64>| {
            // swap axes, flip one, translate
            let mut out = Array2::zeros(m.dim());
            for i in 0..m.nrows() {
                out[(i, 0)] = m[(i, 1)] + shift[(0, 0)];
                out[(i, 1)] = -m[(i, 0)] + shift[(0, 1)];
            }
            out
        };
        let k = PrSpec { neighborhood_k: 1 + (case as usize % 3) };
        let before = precision_recall(&set(real.clone(), "base"), &set(gen.clone(), "base"), &k).map_err(|e| e.to_string())?;
        let after = precision_recall(&set(motion(&real), "base"), &set(motion(&gen), "base"), &k).map_err(|e| e.to_string())?;
        ensure(
            (before.0.value, before.1.value) == (after.0.value, after.1.value),
            || format!("case {case}: PR changed under rigid motion"),
        )?;
    }
    Ok("Fréchet scales by c², trace product symmetric, KID rotation-invariant, PR rigid-motion exact".into())
}

fn format_round_trip() -> Outcome {
    let mut rng = rng(707);
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for case in 0..20 {
        let (n, d) = (rng.random_range(1..40), rng.random_range(1..20));
        // The payload is single precision; start from representable values.
        let single = |m: Array2<f64>| m.mapv(|v| v as f32 as f64);
        let data: GembData = if case % 2 == 0 {
            EmbeddingSet::new(single(normal_matrix(&mut rng, n, d) * 1e3), "domain-resnet", "DB")
                .unwrap()
                .into()
        } else {
            let p = single(random_probabilities(&mut rng, n, d + 1, false));
            ProbabilitySet::new(p, "base-inception", "real").unwrap().into()
        };
        let path = dir.path().join(format!("set-{case}.gemb"));
        write_gemb_file(&data, &path).map_err(|e| e.to_string())?;
        let first = std::fs::read(&path).map_err(|e| e.to_string())?;
        write_gemb_file(&data, &path).map_err(|e| e.to_string())?;
        let second = std::fs::read(&path).map_err(|e| e.to_string())?;
        ensure(first == second, || format!("case {case}: double write differs"))?;
        let back = read_gemb_file(&path).map_err(|e| e.to_string())?;
        ensure(back == data, || format!("case {case}: round trip changed the data"))?;

        let bytes = encode_gemb(&data).map_err(|e| e.to_string())?;
        let positions: Vec<usize> = if bytes.len() <= 4096 {
            (0..bytes.len()).collect()
        } else {
            (0..4096).map(|_| rng.random_range(0..bytes.len())).collect()
        };
        for pos in positions {
            let mut bad = bytes.clone();
            bad[pos] ^= rng.random_range(1..=255u8);
            ensure(decode_gemb(&bad).is_err(), || format!("case {case}: flip at byte {pos} undetected"))?;
        }
    }
    Ok("20 files value-identical; every single-byte corruption rejected; double write byte-identical".into())
}

fn sweep_sanity() -> Outcome {
    let mut rng = rng(808);
    let bundle = |m: Array2<f64>| SetBundle {
        embeddings: vec![set(m, "base")],
        probabilities: vec![],
    };
    let real = bundle(normal_matrix(&mut rng, 2000, 16));
    let gen = bundle(normal_matrix(&mut rng, 2000, 16));
    let suite = SuiteSpec {
        metrics: vec![MetricName::FID],
        ..SuiteSpec::default()
    };
    let sizes = vec![50, 100, 200, 400];
    let spec = SweepSpec { sizes: sizes.clone(), repeats: 20, seed: 9 };
    let rows = sweep(&real, &gen, &suite, &spec).map_err(|e| e.to_string())?;
    let medians: Vec<f64> = sizes
        .iter()
        .map(|&s| {
            let mut v: Vec<f64> = rows.iter().filter(|r| r.size == s).map(|r| r.result.value).collect();
            v.sort_by(f64::total_cmp);
            0.5 * (v[v.len() / 2 - 1] + v[v.len() / 2])
        })
        .collect();
    ensure(medians.windows(2).all(|w| w[1] < w[0]), || format!("medians {medians:?}"))?;
    let shown: Vec<String> = medians.iter().map(|m| format!("{m:.3}")).collect();
    Ok(format!("median FID at 50/100/200/400: {}", shown.join(" > ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("Fréchet oracle", frechet_oracle),
        ("singular regime", singular_regime),
        ("KID oracle", kid_oracle),
        ("precision/recall oracle", pr_oracle),
        ("IS properties", inception_properties),
        ("scaling/symmetry suite", scaling_and_symmetry),
        ("format round-trip", format_round_trip),
        ("sweep sanity", sweep_sanity),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
