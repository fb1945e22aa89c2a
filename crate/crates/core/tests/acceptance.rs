//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sensbounds::envelope::{
    delta_bound, envelope_crossings, hyperbolic_envelope, linear_sensitivity_value_bound, min_admissible_deviation,
    min_admissible_deviation_hyperbolic, min_admissible_deviation_linear, sensitivity_value_bound, Envelope,
};
use sensbounds::network::enumerate_profiles;
use sensbounds::sensfun::{derive_family, FunctionKind, SensitivityFamily};
use sensbounds::sweep::{fixture_scenarios, random_corpus, skip_reason, verify_corpus, Scenario, SweepOptions};

const SEED: u64 = 7;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn corpus() -> Vec<Scenario> {
    let mut all = random_corpus(20, SEED);
    all.extend(fixture_scenarios());
    all
}

fn linear_worked_example() -> Outcome {
    let d = match min_admissible_deviation_linear(0.8, 0.8, 0.2) {
        Ok(d) => d,
        Err(e) => return outcome(false, e.to_string()),
    };
    let pass = close(d.alpha, 0.3, 1e-12)
        && close(d.beta, 0.2, 1e-12)
        && close(d.x_alpha, 0.5, 1e-12)
        && close(d.x_beta, 1.0, 1e-12);
    outcome(
        pass,
        format!(
            "(alpha, beta) = ({}, {}), interval [{}, {}]",
            d.alpha, d.beta, d.x_alpha, d.x_beta
        ),
    )
}

fn zero_gap_anchor() -> Outcome {
    let mut checked = 0;
    let mut bad = Vec::new();
    for i in 1..=10 {
        let x0 = i as f64 / 11.0;
        for j in 1..=10 {
            let p = 0.05 * j as f64;
            for kind in [FunctionKind::Hyperbolic, FunctionKind::Linear] {
                checked += 1;
                match min_admissible_deviation(x0, p, p, kind) {
                    Ok(d) if d.alpha == 0.0 && d.beta == 0.0 => {}
                    other => bad.push(format!("{kind} x0={x0} p={p}: {other:?}")),
                }
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("{checked} evaluations, {} nonzero{}", bad.len(), first_example(&bad)),
    )
}

fn bound_surface() -> Outcome {
    let n = 200;
    let axis: Vec<f64> = (1..=n).map(|j| j as f64 / (n + 1) as f64).collect();
    let mut worst_mid = f64::MIN;
    let mut worst_linear = f64::MIN;
    let mut worst_gap = f64::MIN;
    for &p0 in &axis {
        worst_mid = worst_mid.max(sensitivity_value_bound(0.5, p0).unwrap());
    }
    for &x0 in &axis {
        for &p0 in &axis {
            let lin = linear_sensitivity_value_bound(x0, p0).unwrap();
            let hyp = sensitivity_value_bound(x0, p0).unwrap();
            worst_linear = worst_linear.max(lin);
            worst_gap = worst_gap.max(lin - hyp);
        }
    }
    let pass = worst_mid <= 1.0 + 1e-12 && worst_linear <= 1.0 + 1e-12 && worst_gap <= 1e-12;
    outcome(
        pass,
        format!("max at x0=0.5: {worst_mid}; max linear: {worst_linear}; max linear - hyperbolic: {worst_gap:e}"),
    )
}

fn random_anchor(rng: &mut ChaCha8Rng) -> (f64, f64) {
    (rng.gen_range(0.01..0.99), rng.gen_range(0.01..0.99))
}

fn delta_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (x0, p0) = random_anchor(&mut rng);
        let env = hyperbolic_envelope(x0, p0).unwrap();
        for j in 0..=1000 {
            let x = j as f64 / 1000.0;
            let (lo, hi) = env.bounds_at(x);
            let d = delta_bound(x0, p0, x).unwrap();
            worst = worst.max((lo - d.lower).abs()).max((hi - d.upper).abs());
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-12 && elapsed < Duration::from_secs(10),
        format!(
            "max gap {worst:e} over 1000 anchors x 1001 points in {:.2} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn envelope_derivative() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut worst_closed = 0.0f64;
    let mut worst_fd = 0.0f64;
    for _ in 0..1000 {
        let (x0, p0) = random_anchor(&mut rng);
        let env = hyperbolic_envelope(x0, p0).unwrap();
        let bound = sensitivity_value_bound(x0, p0).unwrap();
        let scale = bound.max(1.0);
        for slope in [env.increasing_slope(x0).abs(), env.decreasing_slope(x0).abs()] {
            worst_closed = worst_closed.max((slope - bound).abs() / scale);
        }
        let h = 1e-6 * x0.min(1.0 - x0);
        let fd_i = (env.increasing_at(x0 + h) - env.increasing_at(x0 - h)) / (2.0 * h);
        let fd_d = (env.decreasing_at(x0 + h) - env.decreasing_at(x0 - h)) / (2.0 * h);
        for fd in [fd_i.abs(), fd_d.abs()] {
            worst_fd = worst_fd.max((fd - bound).abs() / bound);
        }
    }
    outcome(
        worst_closed <= 1e-9 && worst_fd <= 1e-5,
        format!("closed form gap {worst_closed:e} (scaled), finite difference gap {worst_fd:e} (relative)"),
    )
}

fn oracle_containment() -> Outcome {
    let start = Instant::now();
    let scenarios = corpus();
    let report = match verify_corpus(&scenarios, &SweepOptions::default()) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let mut records = 0;
    let mut containment = 0;
    let mut mismatches = 0;
    let mut structural_linear_records = 0;
    let mut worst = 0.0f64;
    for n in &report.networks {
        for r in &n.parameters {
            records += r.records.iter().filter(|rec| rec.envelope_checked).count();
            containment += r.aggregate.containment_violations.len();
            mismatches += r.aggregate.linearity.mismatches;
            if r.structural_linear {
                structural_linear_records += r.records.iter().filter(|rec| rec.envelope_checked).count();
            }
            worst = r
                .records
                .iter()
                .map(|rec| rec.max_envelope_violation)
                .fold(worst, f64::max);
        }
    }
    let elapsed = start.elapsed();
    outcome(
        containment == 0 && mismatches == 0 && structural_linear_records > 0 && elapsed < Duration::from_secs(60),
        format!(
            "{} networks, {records} functions ({structural_linear_records} structurally linear), \
             {containment} containment violations, {mismatches} linearity mismatches, \
             max excursion {worst:e}, {:.2} s",
            scenarios.len(),
            elapsed.as_secs_f64()
        ),
    )
}

/// Every analyzed (scenario, parameter, profile) with its exact family.
fn corpus_families(scenarios: &[Scenario]) -> Vec<(String, SensitivityFamily)> {
    let mut out = Vec::new();
    for s in scenarios {
        let profiles = enumerate_profiles(&s.network, &s.observables, u128::MAX).unwrap();
        for pref in s.network.parameters() {
            if skip_reason(&s.network, &pref).is_some() {
                continue;
            }
            for e in &profiles {
                let label = format!(
                    "{} {} {}",
                    s.name,
                    s.network.describe_parameter(&pref),
                    e.label(&s.network)
                );
                if let Ok(f) = derive_family(&s.network, s.target.0, e, &pref) {
                    out.push((label, f));
                }
            }
        }
    }
    out
}

/// Admissible interval of the winner found by scanning a uniform grid outward from `x0`.
fn grid_scan_interval(family: &SensitivityFamily, winner: usize, step: f64) -> (f64, f64) {
    let n = (1.0 / step).round() as i64;
    let value = |k: usize, x: f64| {
        let (c1, c2) = family.numerators[k];
        let (c3, c4) = family.denominator;
        (c1 * x + c2) / (c3 * x + c4)
    };
    let wins = |x: f64| {
        let w = value(winner, x);
        (0..family.numerators.len()).all(|k| k == winner || value(k, x) <= w + 1e-12)
    };
    let x0 = family.x0;
    let mut lower = x0;
    let mut j = (x0 / step).floor() as i64;
    while j >= 0 && wins(j as f64 * step) {
        lower = j as f64 * step;
        j -= 1;
    }
    let mut upper = x0;
    let mut j = (x0 / step).ceil() as i64;
    while j <= n && wins(j as f64 * step) {
        upper = j as f64 * step;
        j += 1;
    }
    (lower, upper)
}

fn deviation_soundness() -> Outcome {
    let scenarios = corpus();
    let report = verify_corpus(&scenarios, &SweepOptions::default()).unwrap();
    let mut sound_checked = 0;
    let mut unsound = 0;
    for n in &report.networks {
        for r in &n.parameters {
            sound_checked += r.records.iter().filter(|rec| rec.deviation_sound.is_some()).count();
            unsound += r.aggregate.deviation_violations.len();
        }
    }
    let step = 1e-4;
    let mut scanned = 0;
    let mut scan_mismatch = Vec::new();
    let mut undefined = 0;
    for (label, family) in corpus_families(&scenarios) {
        let Ok(exact) = family.admissible_deviation() else {
            undefined += 1;
            continue;
        };
        if exact.tie {
            continue;
        }
        scanned += 1;
        let (lo, hi) = grid_scan_interval(&family, exact.winner, step);
        if !close(lo, exact.lower, step + 1e-9) || !close(hi, exact.upper, step + 1e-9) {
            scan_mismatch.push(format!(
                "{label}: scan [{lo}, {hi}] exact [{}, {}]",
                exact.lower, exact.upper
            ));
        }
    }
    outcome(
        unsound == 0 && sound_checked > 0 && scan_mismatch.is_empty() && scanned > 0,
        format!(
            "{sound_checked} bound intervals checked, {unsound} unsound; {scanned} exact intervals vs grid scan, \
             {} mismatches{}; {undefined} functions undefined at an endpoint excluded",
            scan_mismatch.len(),
            first_example(&scan_mismatch)
        ),
    )
}

fn first_example<T: std::fmt::Debug>(items: &[T]) -> String {
    items.first().map(|x| format!(", first {x:?}")).unwrap_or_default()
}

fn hyperbolic_self_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let mut worst = 0.0f64;
    let mut n = 0;
    while n < 1000 {
        let x0: f64 = rng.gen_range(0.01..0.99);
        let p1: f64 = rng.gen_range(0.01..0.99);
        let p2: f64 = rng.gen_range(0.0..(1.0 - p1).min(p1));
        if p2 >= p1 || p2 <= 0.0 {
            continue;
        }
        n += 1;
        let d = min_admissible_deviation_hyperbolic(x0, p1, p2).unwrap();
        let (xa, xb) = envelope_crossings(x0, p1, p2, FunctionKind::Hyperbolic).unwrap();
        worst = worst.max((d.x_alpha - xa).abs()).max((d.x_beta - xb).abs());
    }
    // worked example at (0.1, 0.8, 0.2): pinned to the oracle crossings 1/37 and 4/13
    let d = min_admissible_deviation_hyperbolic(0.1, 0.8, 0.2).unwrap();
    let (xa, xb) = envelope_crossings(0.1, 0.8, 0.2, FunctionKind::Hyperbolic).unwrap();
    let example = close(d.x_alpha, xa, 1e-9)
        && close(d.x_beta, xb, 1e-9)
        && close(d.x_alpha, 1.0 / 37.0, 1e-12)
        && close(d.x_beta, 4.0 / 13.0, 1e-12);
    outcome(
        worst <= 1e-9 && example,
        format!(
            "max gap {worst:e} over {n} triples; example (0.1, 0.8, 0.2) gives ({:.6}, {:.6})",
            d.alpha, d.beta
        ),
    )
}

fn normalization() -> Outcome {
    let families = corpus_families(&corpus());
    let mut worst = 0.0f64;
    for (_, f) in &families {
        let c1: f64 = f.numerators.iter().map(|n| n.0).sum();
        let c2: f64 = f.numerators.iter().map(|n| n.1).sum();
        worst = worst
            .max((c1 - f.denominator.0).abs())
            .max((c2 - f.denominator.1).abs());
    }
    outcome(
        worst <= 1e-12 && !families.is_empty(),
        format!("max coefficient gap {worst:e} over {} families", families.len()),
    )
}

fn determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_sensbounds"))
            .args(["verify", "--random", "20", "--seed", "7", "--format", "json"])
            .env_remove("SENSBOUNDS_SEED")
            .output()
            .expect("binary runs")
    };
    let (a, b) = (run(), run());
    let pass = a.status.success() && b.status.success() && a.stdout == b.stdout && !a.stdout.is_empty();
    outcome(
        pass,
        format!("{} bytes, identical: {}", a.stdout.len(), a.stdout == b.stdout),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("linear deviation worked example", linear_worked_example),
        ("zero-gap anchor", zero_gap_anchor),
        ("sensitivity-value bound surface", bound_surface),
        ("envelope and delta-bound equivalence", delta_equivalence),
        ("envelope derivative at the anchor", envelope_derivative),
        ("oracle containment on the corpus", oracle_containment),
        ("deviation soundness on the corpus", deviation_soundness),
        ("hyperbolic deviation self-consistency", hyperbolic_self_consistency),
        ("numerator coefficients sum to the denominator", normalization),
        ("verify output is byte-identical across runs", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
