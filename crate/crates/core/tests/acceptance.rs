//! Acceptance run: one PASS/FAIL line per criterion. Exits non-zero when
//! any criterion fails.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thrift_core::bench::{
    depth_tables, landscape, landscape_csv, min_steps_by, powerlaw_fit, depth_weight, Engine, EngineOptions, FitPoint, Grid,
    PointEvaluator, SweepConfig,
};
use thrift_core::depth::DepthRegistry;
use thrift_core::exact::{spectral_error, ExactPropagator, Metric, DEFAULT_DENSE_CAP};
use thrift_core::flo::{flo_evaluate_schedule, flo_exact, flo_spectral_error};
use thrift_core::formulas::{
    evaluate_schedule, make_schedule, thrift_error_bound, verify_time_ordered_identity, FormulaKind, Omega8,
};
use thrift_core::magnus::{
    convergence_series, evaluate_factors_dense, magnus_remainder_bound, magnus_thrift_factors, magnus_thrift_window, SplitMode,
    MAX_SERIES_ORDER,
};
use thrift_core::models::{build_model, ModelKind, ModelSpec, PartitionedHamiltonian};
use thrift_core::pauli::{spectral_norm, PauliString, PauliSum};

type Outcome = (bool, String);

fn tfim(l: usize, alpha: f64) -> PartitionedHamiltonian {
    build_model(&ModelSpec::tfim_1d(l, 1.0, alpha)).unwrap()
}

/// Least-squares slope of `ln y` against `ln x`.
fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

fn dense_error(part: &PartitionedHamiltonian, kind: FormulaKind, t: f64, n: u64) -> f64 {
    let s = make_schedule(kind, part, Some(&Omega8::bundled())).unwrap();
    let exact = ExactPropagator::new(&part.full, DEFAULT_DENSE_CAP).unwrap().at(t);
    spectral_error(&exact, &evaluate_schedule(&s, t, n).unwrap()).unwrap()
}

fn base_config(model: ModelSpec, formulas: Vec<FormulaKind>, budget: u64, engine: Engine) -> SweepConfig {
    SweepConfig {
        model,
        metric: Metric::WorstCase,
        epsilon: 0.01,
        alpha: Grid::Values(vec![0.125]),
        time: Grid::Values(vec![1.0]),
        budget,
        formulas,
        n_max: 4096,
        output: None,
        rng_seed: 7,
        engine,
        workers: None,
        magnus_split: None,
        omega8_path: None,
        dense_cap: DEFAULT_DENSE_CAP,
        sizes: Vec::new(),
        time_per_size: None,
    }
}

fn c1_depth_tables() -> Outcome {
    let start = Instant::now();
    let rows = depth_tables(&DepthRegistry::bundled(), None).unwrap();
    let steps = |m: ModelKind| rows.iter().filter(|r| r.model == m).map(|r| r.steps).collect::<Vec<_>>();
    let want: [(ModelKind, Vec<u64>); 4] = [
        (ModelKind::Tfim1d, vec![15, 15, 3, 1, 15, 15, 3, 1, 15, 2, 2]),
        (ModelKind::Tfim2d, vec![26, 17, 3, 1, 26, 17, 3, 1, 26, 1, 3]),
        (ModelKind::Heisenberg1d, vec![15, 15, 3, 1, 15, 15, 3, 1, 2]),
        (ModelKind::FermiHubbard1d, vec![20, 15, 3, 1, 8, 7, 1, 0, 3]),
    ];
    let mismatches: Vec<String> = want.iter().filter(|(m, w)| steps(*m) != *w).map(|(m, _)| m.to_string()).collect();
    let fh_exceeds = rows.iter().any(|r| r.model == ModelKind::FermiHubbard1d && r.formula == FormulaKind::Thrift8Opt && r.steps == 0);
    let elapsed = start.elapsed().as_secs_f64();
    (
        mismatches.is_empty() && fh_exceeds && elapsed < 1.0,
        format!("mismatched tables {mismatches:?}, FH opt-THRIFT-8 exceeds budget: {fh_exceeds}, {elapsed:.3}s"),
    )
}

fn c2_alpha_scaling() -> Outcome {
    let alphas: Vec<f64> = (0..5).map(|i| 10f64.powf(-3.0 + 0.5 * i as f64)).collect();
    let slope = |kind| {
        let errs: Vec<f64> = alphas.iter().map(|&a| dense_error(&tfim(6, a), kind, 0.5, 1)).collect();
        loglog_slope(&alphas, &errs)
    };
    let (thrift, trotter) = (slope(FormulaKind::Thrift1), slope(FormulaKind::Trotter1));
    ((thrift - 2.0).abs() <= 0.2 && (trotter - 1.0).abs() <= 0.2, format!("thrift1 slope {thrift:.3} (2 +- 0.2), trotter1 slope {trotter:.3} (1 +- 0.2)"))
}

fn c3_time_order() -> Outcome {
    let part = tfim(6, 0.125);
    let t = 1.0;
    let cases = [
        (FormulaKind::Trotter1, [16u64, 32, 64]),
        (FormulaKind::Thrift1, [16, 32, 64]),
        (FormulaKind::Trotter2, [8, 16, 32]),
        (FormulaKind::Thrift2, [8, 16, 32]),
        (FormulaKind::Trotter4, [2, 4, 8]),
        (FormulaKind::Thrift4, [2, 4, 8]),
        (FormulaKind::OmelyanSmallA4, [2, 4, 8]),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (kind, ns) in cases {
        let errs: Vec<f64> = ns.iter().map(|&n| dense_error(&part, kind, t, n)).collect();
        let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
        let order = -loglog_slope(&xs, &errs);
        ok &= (order - kind.order() as f64).abs() <= 0.25;
        parts.push(format!("{kind} {order:.2}"));
    }
    (ok, parts.join(", "))
}

fn c4_bound_dominance() -> Outcome {
    let mut worst_ratio: f64 = 0.0;
    for i in 0..5 {
        for j in 0..5 {
            let t = 0.05 + 0.45 * i as f64 / 4.0;
            let alpha = 0.01 + 0.19 * j as f64 / 4.0;
            let part = tfim(4, alpha);
            let measured = dense_error(&part, FormulaKind::Thrift1, t, 1);
            let bound = thrift_error_bound(&part, t, 24).unwrap();
            worst_ratio = worst_ratio.max(measured / bound);
        }
    }
    (worst_ratio <= 1.0, format!("max measured/bound over 25 points = {worst_ratio:.4}"))
}

fn magnus_error(part: &PartitionedHamiltonian, t: f64, n: u64, order: u32, split: SplitMode) -> f64 {
    let f = magnus_thrift_factors(part, 0.0, t, n, order, split).unwrap();
    let exact = ExactPropagator::new(&part.full, DEFAULT_DENSE_CAP).unwrap().at(t);
    spectral_error(&exact, &evaluate_factors_dense(&f, part.n_qubits, DEFAULT_DENSE_CAP).unwrap()).unwrap()
}

fn c5_magnus_scaling() -> Outcome {
    let alphas: Vec<f64> = (0..5).map(|i| 10f64.powf(-3.0 + 0.5 * i as f64)).collect();
    let slope = |order| {
        let errs: Vec<f64> = alphas.iter().map(|&a| magnus_error(&tfim(4, a), 1.0, 2, order, SplitMode::matching(order))).collect();
        loglog_slope(&alphas, &errs)
    };
    let (s1, s2) = (slope(1), slope(2));
    let part = tfim(4, 0.3);
    let mut chain = 0.0f64;
    for order in [1, 2] {
        let split = SplitMode::matching(order);
        let whole = magnus_thrift_window(&part, 0.0, 1.2, 3, order, split).unwrap();
        let first = magnus_thrift_window(&part, 0.0, 0.4, 1, order, split).unwrap();
        let second = magnus_thrift_window(&part, 0.4, 1.2, 2, order, split).unwrap();
        chain = chain.max(spectral_error(&whole, &second.compose(&first).unwrap()).unwrap());
    }
    (
        (s1 - 2.0).abs() <= 0.2 && (s2 - 3.0).abs() <= 0.3 && chain <= 1e-10,
        format!("order-1 slope {s1:.3} (2 +- 0.2), order-2 slope {s2:.3} (3 +- 0.3), chaining defect {chain:.2e}"),
    )
}

fn c6_convergence() -> Outcome {
    let series = convergence_series(MAX_SERIES_ORDER).unwrap();
    let threshold_ok = (series.threshold - 1.08687).abs() <= 1e-4;
    let x1_ok = (series.x(1) - 1.0).abs() <= 1e-15;
    let mut dominated = true;
    let mut worst: f64 = 0.0;
    for alpha in [0.01, 0.03, 0.1] {
        let part = tfim(4, alpha);
        let h1_norm = spectral_norm(&part.h1(), DEFAULT_DENSE_CAP).unwrap();
        for t in [0.3, 1.0, 2.0] {
            let measured = magnus_error(&part, t, 1, 1, SplitMode::Exact);
            let bound = magnus_remainder_bound(1, alpha, t, t * h1_norm, &series).unwrap().value;
            dominated &= measured <= bound;
            worst = worst.max(measured / bound);
        }
    }
    (
        threshold_ok && x1_ok && dominated,
        format!("threshold {:.6}, x_1 = {}, max measured/bound {worst:.4}", series.threshold, series.x(1)),
    )
}

fn c7_flo_cross_validation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let kinds = [
        FormulaKind::Trotter1,
        FormulaKind::Trotter2,
        FormulaKind::Trotter4,
        FormulaKind::Thrift1,
        FormulaKind::Thrift2,
        FormulaKind::Thrift4,
        FormulaKind::OmelyanSmallA4,
    ];
    let omega = Omega8::bundled();
    let mut worst: f64 = 0.0;
    for _ in 0..40 {
        let l = rng.gen_range(2..=8);
        let kind = kinds[rng.gen_range(0..kinds.len())];
        let alpha = 10f64.powf(rng.gen_range(-2.0..0.0));
        let t = rng.gen_range(0.2..4.0);
        let n = rng.gen_range(1..=6);
        let part = tfim(l, alpha);
        let s = make_schedule(kind, &part, Some(&omega)).unwrap();
        let dense = dense_error(&part, kind, t, n);
        let flo = flo_spectral_error(&flo_exact(&part.full, t).unwrap(), &flo_evaluate_schedule(&s, t, n).unwrap()).unwrap();
        worst = worst.max((flo - dense).abs());
    }
    let big = tfim(100, 0.125);
    let start = Instant::now();
    let s = make_schedule(FormulaKind::Thrift2, &big, None).unwrap();
    let g = flo_evaluate_schedule(&s, 1.0, 1).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let orthogonal = g.orthogonality_defect() < 1e-10;
    (
        worst <= 1e-7 && elapsed < 1.0 && orthogonal,
        format!("max |flo - dense| over 40 points {worst:.2e}; L=100 thrift2 step {elapsed:.3}s"),
    )
}

fn random_two_qubit(rng: &mut ChaCha8Rng) -> (PauliSum, PauliSum) {
    let diag = ["ZI", "IZ", "ZZ"];
    let all = ["XI", "IX", "YI", "IY", "XX", "XY", "YX", "YY", "XZ", "ZX", "YZ", "ZY", "ZI", "IZ", "ZZ"];
    let h0 = PauliSum::from_real_terms(2, diag.iter().map(|s| (PauliString::parse(s).unwrap(), rng.gen_range(-1.0..1.0)))).unwrap();
    let a = PauliSum::from_real_terms(2, all.iter().map(|s| (PauliString::parse(s).unwrap(), rng.gen_range(-0.5..0.5)))).unwrap();
    (h0, a)
}

fn c8_time_ordered_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (h0, a) = random_two_qubit(&mut rng);
    let d: Vec<f64> = [8u64, 16, 32, 64].iter().map(|&n| verify_time_ordered_identity(&h0, &a, 0.3, 1.8, n).unwrap()).collect();
    let ratios: Vec<f64> = d.windows(2).map(|w| w[0] / w[1]).collect();
    let ok = ratios.iter().all(|r| (r - 2.0).abs() <= 0.4);
    (ok, format!("distances {:?}, ratios {:?}", d.iter().map(|v| format!("{v:.3e}")).collect::<Vec<_>>(), ratios.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>()))
}

fn c9_landscapes() -> Outcome {
    let all_tfim = FormulaKind::ALL.to_vec();
    // (a) long chain, tiny perturbation, long time
    let mut cfg = base_config(ModelSpec::tfim_1d(16, 1.0, 1.0), all_tfim.clone(), 31, Engine::Flo);
    cfg.alpha = Grid::Values(vec![1e-3]);
    cfg.time = Grid::Values(vec![10.0]);
    let a = landscape(&cfg).unwrap().best_at(1e-3, 10.0);
    let a_ok = a == Some(FormulaKind::MagnusThrift2);

    // (b) 3x3 lattice
    let mut cfg = base_config(ModelSpec::tfim_2d(3, 3, 1.0, 1.0), all_tfim, 105, Engine::Dense);
    cfg.alpha = Grid::Values(vec![0.125]);
    let land = landscape(&cfg).unwrap();
    let err = |f: FormulaKind| land.rows.iter().find(|r| r.formula == f).map(|r| r.error.error).unwrap();
    let pairs = [(FormulaKind::Thrift1, FormulaKind::Trotter1), (FormulaKind::Thrift2, FormulaKind::Trotter2), (FormulaKind::Thrift4, FormulaKind::Trotter4)];
    let b_wins: Vec<String> = pairs.iter().filter(|(th, tr)| err(*th) < err(*tr)).map(|(th, _)| th.to_string()).collect();
    let b_ok = !b_wins.is_empty();

    // (c) Fermi-Hubbard
    let fh_formulas: Vec<FormulaKind> = FormulaKind::ALL.into_iter().filter(|f| !f.is_magnus() && *f != FormulaKind::Thrift8Opt).collect();
    let mut cfg = base_config(ModelSpec::fermi_hubbard_1d(4, -0.5, 1.0), fh_formulas, 61, Engine::Dense);
    cfg.alpha = Grid::Values(vec![0.5]);
    let c = landscape(&cfg).unwrap().best_at(0.5, 1.0);
    let c_ok = c.is_some_and(|f| !f.is_thrift_family());

    (
        a_ok && b_ok && c_ok,
        format!("(a) best {a:?}; (b) THRIFT beating Trotter: {b_wins:?}; (c) best {c:?}"),
    )
}

fn fit_exponents(sizes: &[usize], engine: Engine) -> Vec<(FormulaKind, f64, f64)> {
    let registry = DepthRegistry::bundled();
    let mut cfg = base_config(ModelSpec::tfim_1d(4, 1.0, 0.125), vec![FormulaKind::Trotter2], 0, engine);
    cfg.n_max = 1 << 14;
    let opts = EngineOptions::from_config(&cfg).unwrap();
    let formulas = [FormulaKind::Trotter2, FormulaKind::Thrift2, FormulaKind::Trotter4, FormulaKind::Thrift4];
    let mut points: Vec<Vec<FitPoint>> = vec![Vec::new(); formulas.len()];
    for &l in sizes {
        let t = l as f64;
        let eval = PointEvaluator::new(tfim(l, 0.125), &opts).unwrap();
        let reference = eval.reference(t).unwrap();
        for (i, f) in formulas.iter().enumerate() {
            let runner = eval.runner(*f).unwrap();
            let m = min_steps_by(0.01, cfg.n_max, |n| Ok(runner.error(&reference, t, n)?.error)).unwrap();
            let df = registry.formula(ModelKind::Tfim1d, *f).unwrap().two_qubit;
            let depth = df.at(m.steps) as f64;
            points[i].push(FitPoint { size: l as f64, depth, weight: depth_weight(depth, df.slope as f64) });
        }
    }
    formulas
        .iter()
        .zip(points)
        .map(|(f, p)| {
            let fit = powerlaw_fit(&p).unwrap();
            let target = if f.order() == 2 { 2.0 } else { 1.5 };
            (*f, fit.k, target)
        })
        .collect()
}

fn c10_power_laws() -> Outcome {
    let small = fit_exponents(&[4, 5, 6, 7, 8, 9, 10], Engine::Auto);
    let stretch = fit_exponents(&[8, 12, 16, 20, 24, 28, 32, 40], Engine::Flo);
    let describe = |fits: &[(FormulaKind, f64, f64)]| {
        fits.iter().map(|(f, k, target)| format!("{f} {k:.2} ({target} +- 0.3)")).collect::<Vec<_>>().join(", ")
    };
    let ok = |fits: &[(FormulaKind, f64, f64)]| fits.iter().all(|(_, k, target)| (k - target).abs() <= 0.3);
    (
        ok(&small) && ok(&stretch),
        format!("L=4..10: {}; L=8..40 (free-fermion): {}", describe(&small), describe(&stretch)),
    )
}

fn c11_determinism() -> Outcome {
    let mut cfg = base_config(
        ModelSpec::heisenberg_1d(5, 1.0, 1.0, 3),
        vec![FormulaKind::Thrift2, FormulaKind::Trotter1, FormulaKind::Trotter2, FormulaKind::OmelyanSmallA4],
        31,
        Engine::Dense,
    );
    cfg.alpha = Grid::Values(vec![0.05, 0.3]);
    cfg.time = Grid::Values(vec![0.5, 2.0]);
    let first = landscape_csv(&cfg, &landscape(&cfg).unwrap()).body();
    let second = landscape_csv(&cfg, &landscape(&cfg).unwrap()).body();
    cfg.formulas.reverse();
    let reordered = landscape_csv(&cfg, &landscape(&cfg).unwrap()).body();
    (first == second && first == reordered, format!("{} body bytes, repeat identical: {}, reordered identical: {}", first.len(), first == second, first == reordered))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("depth-table replay", c1_depth_tables),
        ("THRIFT alpha^2 scaling", c2_alpha_scaling),
        ("order in time", c3_time_order),
        ("commutator bound dominance", c4_bound_dominance),
        ("Magnus-THRIFT alpha scaling and chaining", c5_magnus_scaling),
        ("convergence threshold and remainder bound", c6_convergence),
        ("free-fermion cross-validation", c7_flo_cross_validation),
        ("time-ordered product identity", c8_time_ordered_identity),
        ("landscape spot checks", c9_landscapes),
        ("power-law exponents", c10_power_laws),
        ("determinism", c11_determinism),
    ];
    let filter: Option<usize> = std::env::args().skip(1).find_map(|a| a.strip_prefix("--only=").and_then(|v| v.parse().ok()));
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        if filter.is_some_and(|f| f != i + 1) {
            continue;
        }
        let start = Instant::now();
        let (ok, detail) = check();
        failures += usize::from(!ok);
        println!("{} [{}] {name}: {detail} ({:.1}s)", if ok { "PASS" } else { "FAIL" }, i + 1, start.elapsed().as_secs_f64());
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
