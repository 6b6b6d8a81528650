//! Acceptance criteria 1 to 9. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use competing_types::analysis::competition::{eval_p, eval_pa, eval_pm};
use competing_types::analysis::thresholds::Parameter;
use competing_types::analysis::zeros::ZeroSearch;
use competing_types::analysis::CompetitionFunction;
use competing_types::experiments::verify::{additive_cases, random_model, random_reachable_states};
use competing_types::experiments::{
    check_descent, flow_run, phase_scan, run_ensemble, stepped, DescentBound, DominationRule, Engine, LyapunovParams,
    S2Choice,
};
use competing_types::rng::run_rng;
use competing_types::sim::{drift_from_aggregates, exact_drift, InitialGraph, SimConfig, SimState};
use competing_types::urn::{enumerate_graph_exact, enumerate_urn_exact, total_variation};
use competing_types::{parse_rational, FitnessModel, Rational, TypeAssignment};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn within(limit: Duration, elapsed: Duration) -> bool {
    elapsed <= limit
}

fn q(s: &str) -> Rational {
    parse_rational(s).expect("literal")
}

fn drift_identity() -> Outcome {
    let start = Instant::now();
    let states = random_reachable_states(2024, 1200);
    let mut kinds = [0usize; 3];
    let mut worst = 0.0f64;
    for (ta, fm, agg) in &states {
        kinds[fm.kind() as usize] += 1;
        worst = worst.max(drift_from_aggregates(ta, fm, agg).discrepancy());
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-12 && kinds.iter().all(|&k| k > 0) && within(Duration::from_secs(10), elapsed),
        format!(
            "{} states (plain/mult/additive = {:?}), max relative gap {worst:.2e}, {elapsed:.2?}",
            states.len(),
            kinds
        ),
    )
}

fn thresholds() -> Outcome {
    let start = Instant::now();
    let mult = |phi: f64| FitnessModel::Multiplicative { phi, alpha: 0.0 };
    let add = |a: f64, b: f64| FitnessModel::Additive {
        alpha_red: a,
        alpha_blue: b,
    };
    let phi = 1.2;
    let (a1, a2) = (0.0, 1.0);
    #[rustfmt::skip]
    let cases: Vec<(&str, Vec<f64>, FitnessModel<f64>, Parameter, (f64, f64), f64)> = vec![
        ("p=(0,1/2,1/2,1) phi", vec![0.0, 0.5, 0.5, 1.0], mult(1.0), Parameter::Phi, (1.0, 2.0), 5.0 / 4.0),
        ("p=(0,1/4,3/4,1) phi", vec![0.0, 0.25, 0.75, 1.0], mult(1.0), Parameter::Phi, (1.0, 2.0), 8.0 / 7.0),
        ("p=(0,1,1,1) phi", vec![0.0, 1.0, 1.0, 1.0], mult(1.0), Parameter::Phi, (1.5, 2.5), 2.0),
        ("p=(0,1,1,1) fold", vec![0.0, 1.0, 1.0, 1.0], mult(1.0), Parameter::Phi, (1.5, 2.5), (3.0 + 2f64.sqrt()) / 2.0),
        ("p=(0,0,9/10,1) phi", vec![0.0, 0.0, 0.9, 1.0], mult(1.0), Parameter::Phi, (1.0, 1.6), 20.0 / 13.0),
        ("m2 mult p1 = phi - 1/2", vec![0.0, 0.5, 1.0], mult(phi), Parameter::P(1), (0.0, 1.0), phi - 0.5),
        ("m2 mult p1 = 3/2 - 1/phi", vec![0.0, 0.5, 1.0], mult(phi), Parameter::P(1), (0.0, 1.0), 1.5 - 1.0 / phi),
        ("m2 add p1 upper", vec![0.0, 0.5, 1.0], add(a1, a2), Parameter::P(1), (0.0, 1.0), 0.5 + (a2 - a1) / (2.0 * a1 + 4.0)),
        ("m2 add p1 lower", vec![0.0, 0.5, 1.0], add(a1, a2), Parameter::P(1), (0.0, 1.0), 0.5 + (a2 - a1) / (2.0 * a2 + 4.0)),
        ("m3 add alpha2 = 3/2(alpha1+1)", vec![0.0, 0.5, 0.5, 1.0], add(0.0, 1.0), Parameter::AlphaBlue, (0.5, 3.0), 1.5),
        ("m3 add alpha1 = (3 alpha2 - 21)/10", vec![0.0, 0.0, 0.9, 1.0], add(0.0, 10.0), Parameter::AlphaRed, (0.0, 2.0), 0.9),
    ];
    let mut worst = 0.0f64;
    let mut fails = Vec::new();
    for (name, p, fm, param, (lo, hi), want) in cases {
        let ta = TypeAssignment::new(p).unwrap();
        let grid = stepped(lo, hi, 0.01).unwrap();
        let found = phase_scan(&ta, &fm, param, &grid, ZeroSearch::default())
            .ok()
            .and_then(|s| s.nearest_boundary(want).map(|b| b.value));
        let err = found.map_or(f64::INFINITY, |v| (v - want).abs());
        worst = worst.max(err);
        if err > 1e-6 {
            fails.push(format!("{name}: {found:?} vs {want}"));
        }
    }
    let elapsed = start.elapsed();
    outcome(
        fails.is_empty() && within(Duration::from_secs(5), elapsed),
        format!("11 thresholds, max error {worst:.2e}, {elapsed:.2?} {}", fails.join("; ")),
    )
}

fn enumeration() -> Outcome {
    let start = Instant::now();
    let mut cases = 0;
    let mut worst = Rational::zero();
    let mut errors = Vec::new();
    let assignments: [(&[&str], usize); 4] = [
        (&["0", "1"], 1),
        (&["1/4", "2/3"], 1),
        (&["0", "1/3", "1"], 2),
        (&["1/5", "1/2", "4/5"], 2),
    ];
    for (p, m) in assignments {
        let ta = TypeAssignment::new(p.iter().map(|s| q(s)).collect()).unwrap();
        let g0 = InitialGraph::default_for(m);
        for phi in ["1", "3/2", "2"] {
            let fm = FitnessModel::Multiplicative { phi: q(phi), alpha: Rational::zero() };
            for n in 0..=5 {
                match (enumerate_graph_exact(&g0, &ta, &fm, n), enumerate_urn_exact(&g0, &ta, &q(phi), n)) {
                    (Ok(a), Ok(b)) => {
                        let tv = total_variation(&a, &b);
                        if tv > worst {
                            worst = tv;
                        }
                    }
                    (Err(e), _) | (_, Err(e)) => errors.push(format!("m={m} phi={phi} n={n}: {e}")),
                }
                cases += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        errors.is_empty() && worst.is_zero() && within(Duration::from_secs(60), elapsed),
        format!("{cases} (m, p, phi, n) cases, max TV = {worst}, {elapsed:.2?} {}", errors.join("; ")),
    )
}

fn domination_by_phi() -> Outcome {
    let start = Instant::now();
    let (runs, steps) = (500, 20_000);
    let ta = TypeAssignment::new(vec![0.0, 0.0, 0.9, 1.0]).unwrap();
    let grid = [1.0, 1.1, 1.2, 1.3, 1.4, 1.45, 1.5];
    let mut results = Vec::new();
    for (i, &phi) in grid.iter().enumerate() {
        let cfg = SimConfig::new(
            ta.clone(),
            FitnessModel::Multiplicative { phi, alpha: 0.0 },
            steps,
            1000 + i as u64,
        );
        let r = run_ensemble(&cfg, runs, DominationRule::new(steps), Engine::Graph).expect("ensemble");
        results.push((phi, r.red));
    }
    let elapsed = start.elapsed();
    let main: Vec<_> = results.iter().filter(|(phi, _)| *phi != 1.45).collect();
    let a = results[0].1.count > 0;
    let mut b = true;
    for i in 0..main.len() {
        for j in i + 1..main.len() {
            let (lo, hi) = (&main[i].1, &main[j].1);
            if hi.fraction > lo.fraction && !hi.wilson95.overlaps(&lo.wilson95) {
                b = false;
            }
        }
    }
    let c = results.iter().filter(|(phi, _)| *phi >= 1.45).all(|(_, f)| f.count == 0);
    let counts: Vec<String> = results.iter().map(|(phi, f)| format!("{phi}:{}", f.count)).collect();
    outcome(
        a && b && c && within(Duration::from_secs(600), elapsed),
        format!(
            "red counts /{runs} [{}]; (a) {a} (b) {b} (c) {c}, {elapsed:.2?}",
            counts.join(" ")
        ),
    )
}

fn linear_dominance() -> Outcome {
    let start = Instant::now();
    let (runs, steps, m) = (100, 50_000, 1);
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, fm) in [
        FitnessModel::Multiplicative { phi: 1.5, alpha: 0.0 },
        FitnessModel::Additive {
            alpha_red: 0.0,
            alpha_blue: 1.0,
        },
    ]
    .into_iter()
    .enumerate()
    {
        let cfg = SimConfig::new(TypeAssignment::linear(m), fm.clone(), steps, 500 + i as u64);
        let r = run_ensemble(&cfg, runs, DominationRule::new(steps), Engine::Graph).expect("ensemble");
        let (med, p90) = (r.terminal_quantile(0.5), r.terminal_quantile(0.9));
        pass &= med < 0.05 && p90 < 0.15;
        parts.push(format!("{:?}: median {med:.4} p90 {p90:.4}", fm.kind()));
    }
    let elapsed = start.elapsed();
    outcome(
        pass && within(Duration::from_secs(300), elapsed),
        format!("m={m}, {runs} runs x {steps} steps; {}, {elapsed:.2?}", parts.join("; ")),
    )
}

fn martingale() -> Outcome {
    let (runs, steps, m) = (200u64, 5_000u64, 2);
    let mut pass = true;
    let mut parts = Vec::new();
    for (a, alpha) in [-1.0, 0.0, 3.0].into_iter().enumerate() {
        let fm = FitnessModel::Plain { alpha };
        let mut worst_drift = 0.0f64;
        let mut diffs = Vec::with_capacity(runs as usize);
        for i in 0..runs {
            let mut s = SimState::new(TypeAssignment::linear(m), fm.clone(), &InitialGraph::default_for(m), steps as usize)
                .unwrap();
            let mut rng = run_rng(77 + a as u64, i);
            let q0 = s.red_statistic();
            for _ in 0..steps {
                worst_drift = worst_drift.max(exact_drift(&s).expected()[0].abs());
                s.advance(&mut rng);
            }
            diffs.push(s.red_statistic() - q0);
        }
        let mean = diffs.iter().sum::<f64>() / runs as f64;
        let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (runs - 1) as f64;
        let se = (var / runs as f64).sqrt();
        let ok = worst_drift <= 1e-12 && mean.abs() <= 4.0 * se;
        pass &= ok;
        parts.push(format!("alpha={alpha}: max|drift| {worst_drift:.1e}, mean {mean:+.4} (SE {se:.4})"));
    }
    outcome(pass, format!("m={m}, {runs} runs x {steps} steps; {}", parts.join("; ")))
}

fn state_space() -> Outcome {
    let steps = 10_000u64;
    let mut models: Vec<(TypeAssignment<f64>, FitnessModel<f64>)> = additive_cases()
        .into_iter()
        .map(|(ta, a, b)| (ta, FitnessModel::Additive { alpha_red: a, alpha_blue: b }))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    while models.len() < 24 {
        let (ta, fm) = random_model(&mut rng);
        if matches!(fm, FitnessModel::Additive { .. }) {
            models.push((ta, fm));
        }
    }
    let (mut checked, mut violations, mut absorbing) = (0u64, 0u64, 0);
    let mut first = None;
    for (i, (ta, fm)) in models.iter().enumerate() {
        absorbing += ta.has_absorbing_endpoints() as usize;
        let mut s = SimState::new(ta.clone(), fm.clone(), &InitialGraph::default_for(ta.m()), steps as usize).unwrap();
        let mut r = run_rng(31, i as u64);
        for _ in 0..steps {
            s.advance(&mut r);
            checked += 1;
            if let Err(e) = s.check_invariants() {
                violations += 1;
                first.get_or_insert(e.to_string());
            }
        }
    }
    outcome(
        violations == 0,
        format!(
            "{} additive runs ({absorbing} with p_0 = 0, p_m = 1), {checked} states, {violations} violations {}",
            models.len(),
            first.unwrap_or_default()
        ),
    )
}

fn lyapunov() -> Outcome {
    let mut literal_grid = f64::NEG_INFINITY;
    let mut corrected_grid = f64::NEG_INFINITY;
    let mut flows = [(f64::NEG_INFINITY, 0.0f64), (f64::NEG_INFINITY, 0.0f64)];
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for (ta, a1, a2) in additive_cases().into_iter().take(3) {
        let lp = LyapunovParams::new(&ta, a1, a2).unwrap();
        let grid = lp.grid(25, 20);
        literal_grid = literal_grid.max(check_descent(&lp, &grid, DescentBound::Published).max_excess);
        corrected_grid = corrected_grid.max(check_descent(&lp, &grid, DescentBound::Corrected).max_excess);
        let d = lp.domain();
        for _ in 0..20 {
            let start = d.point(rng.random_range(0.05..0.95), rng.random_range(0.05..0.95));
            for (k, choice) in [S2Choice::Signed, S2Choice::Absolute].into_iter().enumerate() {
                let f = flow_run(&lp, start, 400.0, choice).unwrap();
                flows[k].0 = flows[k].0.max(f.max_increase_rate);
                flows[k].1 = flows[k].1.max(f.terminal_abs_ell.max(f.terminal_abs_pa));
            }
        }
    }
    let flow_ok = |(rate, dist): (f64, f64)| rate <= 1e-7 && dist <= 1e-6;
    let literal = literal_grid <= 1e-8 && flow_ok(flows[0]);
    println!(
        "      corrected bound -2(|l| - sup|g| |P^A|)^2: grid excess {corrected_grid:.2e}, flow max dL/dt {:.2e}, terminal distance {:.2e}",
        flows[1].0, flows[1].1
    );
    outcome(
        literal,
        format!(
            "bound -2(l + S2 P^A)^2 with S2 = sup g: grid excess {literal_grid:.2e} (slack 1e-8); 60 flows, max dL/dt {:.2e}, terminal distance {:.2e}",
            flows[0].0, flows[0].1
        ),
    )
}

fn reductions() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut ok = true;
    for m in 1..=8 {
        let cf = CompetitionFunction::new(TypeAssignment::<Rational>::linear(m), FitnessModel::Plain { alpha: q("1/3") })
            .unwrap();
        ok &= cf.is_degenerate();
    }
    let rat = |rng: &mut ChaCha8Rng, lo: i64, hi: i64| {
        Rational::new(rng.random_range(lo * 12..=hi * 12).into(), 12.into())
    };
    let mut checked = 0;
    for _ in 0..50 {
        let m = rng.random_range(1..=5usize);
        let p: Vec<Rational> = (0..=m).map(|_| rat(&mut rng, 0, 1)).collect();
        let ta = TypeAssignment::new(p).unwrap();
        let alpha = rat(&mut rng, -(m as i64) + 1, 4);
        let mm = Rational::from_integer((m as i64).into());
        let two = Rational::from_integer(2.into());
        let kappa = two.clone() * (mm.clone() + alpha.clone()) / (two.clone() * mm.clone() + alpha.clone());
        for _ in 0..5 {
            let z = rat(&mut rng, 0, 1);
            ok &= eval_pm(&ta, &Rational::one(), &alpha, &z) == kappa.clone() * eval_p(&ta, &z);
            ok &= eval_pa(&ta, &alpha, &alpha, &z) == two.clone() * (mm.clone() + alpha.clone()) * eval_p(&ta, &z);
            checked += 1;
        }
    }
    outcome(
        ok,
        format!("linear P = 0 for m = 1..8; phi = 1 and alpha_1 = alpha_2 reductions exact at {checked} rational points"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("drift identity", drift_identity),
        ("threshold regressions", thresholds),
        ("exact enumeration equivalence", enumeration),
        ("red domination across phi", domination_by_phi),
        ("linear dominance", linear_dominance),
        ("linear martingale", martingale),
        ("state-space invariants", state_space),
        ("lyapunov property", lyapunov),
        ("degeneracy and reductions", reductions),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        failed += !o.passed as usize;
        println!("{} {}. {name}: {}", if o.passed { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("acceptance: {}/9 passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
