//! Acceptance gate: every criterion at its stated tolerance, one line each.
//!
//! Run with `cargo test --test acceptance`. Exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use padua_core::bench::{preset, run_experiment, ExperimentConfig, ExperimentResult, Method, SensorSpec};
use padua_core::field::FieldKind;
use padua_core::lsq::{
    block_pseudoinverse, condition_number, gram_orthonormality, lebesgue_estimate, MatrixNorm, WeightedVandermonde,
};
use padua_core::measurement::{born_probability, estimate_field, sample_shots, stream_rng};
use padua_core::padua::{interpolate_fast, interpolate_kernel, kernel_star, lagrange_matrix, PaduaInterpolant, PaduaSamples};
use padua_core::points::{linspace, padua_count, padua_points_curve, padua_points_grid, Point2};
use padua_core::Interpolant;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn grid(n: usize) -> Vec<Point2> {
    let a = linspace(n);
    a.iter().flat_map(|&y| a.iter().map(move |&x| Point2 { x, y })).collect()
}

fn within(limit: Duration, start: Instant, detail: String) -> Outcome {
    let t = start.elapsed();
    if t > limit {
        Err(format!("{detail}; took {:.1}s, limit {:.0}s", t.as_secs_f64(), limit.as_secs_f64()))
    } else {
        Ok(format!("{detail}; {:.2}s", t.as_secs_f64()))
    }
}

fn construction_equivalence() -> Outcome {
    let start = Instant::now();
    for k in 1..=15 {
        let a = padua_points_curve(k).map_err(|e| e.to_string())?;
        let b = padua_points_grid(k).map_err(|e| e.to_string())?;
        for p in a.points() {
            if !b.points().iter().any(|q| (p.x - q.x).abs() <= 1e-12 && (p.y - q.y).abs() <= 1e-12) {
                return Err(format!("order {k}: curve point {p:?} missing from grid construction"));
            }
        }
        if a.len() != b.len() {
            return Err(format!("order {k}: {} vs {} points", a.len(), b.len()));
        }
    }
    for k in 1..=20 {
        let n = padua_points_curve(k).map_err(|e| e.to_string())?.len();
        if n != (k + 1) * (k + 2) / 2 {
            return Err(format!("order {k}: {n} points"));
        }
    }
    within(Duration::from_secs(1), start, "orders 1..15 set-equal, counts exact to 20".into())
}

fn cardinal_property() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for k in 1..=10 {
        let set = padua_points_curve(k).map_err(|e| e.to_string())?;
        let nodes = set.points();
        // literal kernel ratios, not the precomputed cardinal matrix
        for (i, p) in nodes.iter().enumerate() {
            let d = kernel_star(k, p, p).map_err(|e| e.to_string())?;
            for (j, q) in nodes.iter().enumerate() {
                let l = kernel_star(k, p, q).map_err(|e| e.to_string())? / d;
                worst = worst.max((l - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
        let m = lagrange_matrix(&set, nodes).map_err(|e| e.to_string())?;
        worst = worst.max((m - DMatrix::identity(set.len(), set.len())).amax());
    }
    if worst >= 1e-10 {
        return Err(format!("max deviation from identity {worst:.3e}"));
    }
    within(Duration::from_secs(5), start, format!("max deviation {worst:.2e}"))
}

fn polynomial_exactness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let targets = grid(41);
    let mut worst = 0.0f64;
    for k in 1..=8 {
        for _ in 0..20 {
            let mut coef = Vec::new();
            for i in 0..=k {
                for j in 0..=(k - i) {
                    coef.push((i as i32, j as i32, rng.random_range(-1.0..1.0)));
                }
            }
            let poly = |p: &Point2| coef.iter().map(|&(i, j, c)| c * p.x.powi(i) * p.y.powi(j)).sum::<f64>();
            let s = PaduaSamples::from_fn(k, poly).map_err(|e| e.to_string())?;
            let out = PaduaInterpolant::fit(&s)
                .and_then(|f| f.evaluate(&targets))
                .map_err(|e| e.to_string())?;
            for (v, t) in out.iter().zip(&targets) {
                worst = worst.max((v - poly(t)).abs());
            }
        }
    }
    if worst >= 1e-8 {
        return Err(format!("max error {worst:.3e}"));
    }
    within(Duration::from_secs(30), start, format!("max error {worst:.2e}"))
}

fn dual_path_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let axis = linspace(21);
    let targets = grid(21);
    let mut worst = 0.0f64;
    for k in 1..=10 {
        let set = padua_points_curve(k).map_err(|e| e.to_string())?;
        let vals = (0..set.len()).map(|_| rng.random_range(0.0..PI)).collect();
        let s = PaduaSamples::new(set, vals).map_err(|e| e.to_string())?;
        let fast = interpolate_fast(&s, &axis, &axis).map_err(|e| e.to_string())?;
        let slow = interpolate_kernel(&s, &targets).map_err(|e| e.to_string())?;
        for (i, v) in slow.iter().enumerate() {
            worst = worst.max((fast[(i / 21, i % 21)] - v).abs());
        }
    }
    if worst >= 1e-9 {
        return Err(format!("max disagreement {worst:.3e}"));
    }
    within(Duration::from_secs(30), start, format!("max disagreement {worst:.2e}"))
}

fn weight_kernel_duality() -> Outcome {
    let mut worst = 0.0f64;
    for k in 1..=10 {
        let set = padua_points_curve(k).map_err(|e| e.to_string())?;
        for (p, w) in set.points().iter().zip(set.weights()) {
            let inv = 1.0 / kernel_star(k, p, p).map_err(|e| e.to_string())?;
            worst = worst.max(((w - inv) / inv).abs());
        }
    }
    if worst >= 1e-10 {
        return Err(format!("max relative deviation {worst:.3e}"));
    }
    Ok(format!("max relative deviation {worst:.2e}"))
}

fn optimal_conditioning() -> Outcome {
    let mut worst_eta = 0.0f64;
    let mut worst_gram = 0.0f64;
    for k in 1..=8 {
        let v = WeightedVandermonde::padua(k).map_err(|e| e.to_string())?;
        let eta = condition_number(&v, MatrixNorm::Spectral).map_err(|e| e.to_string())?;
        worst_eta = worst_eta.max((eta - 1.0).abs());
        let n = padua_count(k);
        worst_gram = worst_gram.max((gram_orthonormality(&v) - DMatrix::identity(n, n)).amax());
    }
    if worst_eta > 1e-6 || worst_gram > 1e-8 {
        return Err(format!("|η−1| {worst_eta:.3e}, Gram deviation {worst_gram:.3e}"));
    }
    Ok(format!("spectral |η−1| ≤ {worst_eta:.2e}, Gram deviation ≤ {worst_gram:.2e}"))
}

fn lebesgue_growth() -> Outcome {
    let start = Instant::now();
    let mut values = Vec::new();
    for k in 1..=20 {
        values.push(lebesgue_estimate(k, 201).map_err(|e| e.to_string())?.value);
    }
    if let Some(k) = (1..values.len()).find(|&i| values[i] < values[i - 1]) {
        return Err(format!("Λ decreases from order {k} to {}", k + 1));
    }
    let ratios: Vec<f64> = (2..=20).map(|k| values[k - 1] / ((k + 1) as f64).ln().powi(2)).collect();
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    if hi / lo >= 10.0 {
        return Err(format!("Λ/log²(κ+1) band ratio {:.2}", hi / lo));
    }
    within(
        Duration::from_secs(60),
        start,
        format!("Λ_2 = {:.3}, Λ_20 = {:.3}, band ratio {:.2}", values[1], values[19], hi / lo),
    )
}

fn block_pseudoinverse_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let a = DMatrix::from_fn(4, 3, |_, _| rng.random_range(-1.0..1.0));
        let b = DMatrix::from_fn(4, 3, |_, _| rng.random_range(-1.0..1.0));
        let c = &a + &b;
        // normal-equations inverse; the random sum has full column rank
        let direct = (c.transpose() * &c).try_inverse().ok_or("singular sum")? * c.transpose();
        let got = block_pseudoinverse(&a, &b).map_err(|e| e.to_string())?;
        worst = worst.max((got - direct).amax());
    }
    if worst >= 1e-8 {
        return Err(format!("max deviation {worst:.3e}"));
    }
    Ok(format!("max deviation {worst:.2e}"))
}

fn estimator_consistency() -> Outcome {
    let f = 1.0;
    let p = born_probability(f).map_err(|e| e.to_string())?;
    let ms = [10u64, 100, 1000, 10_000];
    let mut pts = Vec::new();
    for &m in &ms {
        let mut sq = 0.0;
        for t in 0..500 {
            let mut rng = stream_rng(42, t, m);
            let k = sample_shots(p, m, &mut rng).map_err(|e| e.to_string())?;
            sq += (estimate_field(k, m).map_err(|e| e.to_string())? - f).powi(2);
        }
        pts.push(((m as f64).ln(), (sq / 500.0).sqrt().ln()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    if (slope + 0.5).abs() > 0.1 {
        return Err(format!("log-log slope {slope:.3}"));
    }
    Ok(format!("log-log slope {slope:.3}"))
}

fn run(c: &ExperimentConfig) -> Result<ExperimentResult, String> {
    run_experiment(c).map_err(|e| e.to_string())
}

fn pooled(a: &ExperimentResult, b: &ExperimentResult) -> f64 {
    (a.std_err.powi(2) + b.std_err.powi(2)).sqrt()
}

fn fig1b_ordering() -> Outcome {
    let start = Instant::now();
    let configs = preset("fig1b").map_err(|e| e.to_string())?;
    let mut detail = Vec::new();
    for n in 1..=5 {
        let at_n: Vec<&ExperimentConfig> = configs.iter().filter(|c| c.field.degree == n).collect();
        let padua = at_n.iter().find(|c| c.method == Method::PaduaLagrange).ok_or("missing padua config")?;
        let rbf = at_n
            .iter()
            .find(|c| c.method == Method::Rbf && c.sensors == SensorSpec::Regular { d: 9, remove_overlaps: true })
            .ok_or("missing rbf d=9 config")?;
        let (p, r) = (run(padua)?, run(rbf)?);
        let margin = r.mean - p.mean;
        detail.push(format!("n={n}: {:.3} vs {:.3} ({} sensors)", p.mean, r.mean, r.sensor_count));
        if margin <= pooled(&p, &r) {
            return Err(format!("n={n}: padua {:.4} vs rbf {:.4}, margin below pooled std error", p.mean, r.mean));
        }
    }
    within(Duration::from_secs(600), start, detail.join(", "))
}

fn fig2a_ordering() -> Outcome {
    let configs = preset("fig2a").map_err(|e| e.to_string())?;
    let results = configs.iter().map(run).collect::<Result<Vec<_>, _>>()?;
    let padua: Vec<&ExperimentResult> = results.iter().filter(|r| r.config.method == Method::PaduaLagrange).collect();
    let k1 = padua.iter().find(|r| r.config.sensors == SensorSpec::Padua { order: 1 }).ok_or("missing κ=1")?;
    if let Some(better) = results.iter().find(|r| r.mean < k1.mean) {
        return Err(format!(
            "{} {:?} mean {:.4} beats padua κ=1 {:.4}",
            better.config.method.as_str(),
            better.config.sensors,
            better.mean,
            k1.mean
        ));
    }
    let mut inversions = 0;
    for w in padua.windows(2).skip(1) {
        if w[1].mean < w[0].mean {
            inversions += 1;
            if w[0].mean - w[1].mean > pooled(w[0], w[1]) || inversions > 1 {
                return Err(format!(
                    "padua error falls from {:.4} ({:?}) to {:.4} ({:?})",
                    w[0].mean, w[0].config.sensors, w[1].mean, w[1].config.sensors
                ));
            }
        }
    }
    let seq: Vec<String> = padua.iter().map(|r| format!("{:.3}", r.mean)).collect();
    Ok(format!("κ=1 minimal; padua means [{}], {inversions} inversion(s) within std error", seq.join(", ")))
}

fn fig3_trends() -> Outcome {
    let configs = preset("fig3").map_err(|e| e.to_string())?;
    let pick = |kind: FieldKind, order: usize| -> Vec<ExperimentConfig> {
        configs
            .iter()
            .filter(|c| c.field.kind == kind && c.sensors == SensorSpec::Padua { order })
            .cloned()
            .collect()
    };
    let linear = pick(FieldKind::Linear, 1).iter().map(run).collect::<Result<Vec<_>, _>>()?;
    for w in linear.windows(2) {
        if w[1].mean > w[0].mean {
            return Err(format!(
                "linear κ=1 error rises from {:.4} (m={}) to {:.4} (m={})",
                w[0].mean, w[0].config.shots, w[1].mean, w[1].config.shots
            ));
        }
    }
    let mut detail = vec![format!("linear κ=1 {:.3}→{:.3}", linear[0].mean, linear.last().unwrap().mean)];
    for order in [1, 4, 10] {
        let sweep = pick(FieldKind::Nonpoly, order);
        let mut ideal = sweep[0].clone();
        ideal.noiseless = true;
        ideal.trials = 1;
        let floor = run(&ideal)?.mean;
        let at = |m: u64| sweep.iter().find(|c| c.shots == m).ok_or("missing m").map(run);
        let r500 = at(500)??;
        let r1000 = at(1000)??;
        let ok = floor > 0.5
            && r1000.mean >= floor - 2.0 * r1000.std_err
            && (r1000.mean - r500.mean).abs() <= 0.05 * floor
            && r1000.mean - floor <= 0.1 * floor;
        if !ok {
            return Err(format!(
                "nonpoly κ={order}: floor {floor:.3}, m=500 {:.3}, m=1000 {:.3} ± {:.3} is not a plateau",
                r500.mean, r1000.mean, r1000.std_err
            ));
        }
        detail.push(format!("nonpoly κ={order} floor {floor:.3}, m=1000 {:.3}", r1000.mean));
    }
    Ok(detail.join(", "))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for threads in ["1", "8"] {
        let out = dir.path().join(format!("fig2a_{threads}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_padua"))
            .args(["bench", "--preset", "fig2a", "--seed", "42", "--no-timing", "--threads", threads, "--out"])
            .arg(&out)
            .status()
            .map_err(|e| e.to_string())?;
        if !status.success() {
            return Err(format!("bench exited with {status}"));
        }
        outputs.push(std::fs::read(&out).map_err(|e| e.to_string())?);
    }
    if outputs[0] != outputs[1] {
        return Err("outputs differ between --threads 1 and --threads 8".into());
    }
    Ok(format!("{} identical bytes at 1 and 8 threads", outputs[0].len()))
}

fn main() {
    let criteria: [Criterion; 13] = [
        ("construction equivalence", construction_equivalence),
        ("cardinal property", cardinal_property),
        ("polynomial exactness", polynomial_exactness),
        ("dual-path equivalence", dual_path_equivalence),
        ("weight/kernel duality", weight_kernel_duality),
        ("optimal conditioning", optimal_conditioning),
        ("Lebesgue growth", lebesgue_growth),
        ("block pseudoinverse identity", block_pseudoinverse_identity),
        ("estimator consistency", estimator_consistency),
        ("padua vs RBF ordering (polynomial fields)", fig1b_ordering),
        ("linear-field ordering", fig2a_ordering),
        ("shot scaling and basis-mismatch plateau", fig3_trends),
        ("bench determinism across thread counts", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} acceptance criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
