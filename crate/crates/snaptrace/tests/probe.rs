// Temporary calibration probe — deleted before shipping.
use snaptrace::bench::{build_benchmark, default_domain, default_trace, BenchmarkId};
use snaptrace::optim::{AlgorithmKind, OptimizerConfig};
use snaptrace::sphere::{trace_path, ScheduleMode, SphereSchedule, TraceParams};

fn run(label: &str, mode: ScheduleMode, seed: u64, pop: usize, max_gens: usize) {
    let verbose = std::env::var("P_VERBOSE").is_ok();
    let algo = match std::env::var("P_ALGO").as_deref() {
        Ok("best2") => AlgorithmKind::DeBest2Bin,
        Ok("pso") => AlgorithmKind::PsoStd,
        _ => AlgorithmKind::DeRand1Bin,
    };
    let id = match label {
        "twentyfour" => BenchmarkId::TwentyFourMember,
        _ => BenchmarkId::SixteenMember,
    };
    let model = build_benchmark(id);
    let base = default_domain(id);
    let defaults = default_trace(id);
    let mut optimizer = OptimizerConfig::new(algo, seed);
    optimizer.population_size = pop;
    optimizer.max_generations = max_gens;
    let increment = if label == "twentyfour" { defaults.r0 } else { 5.0 };
    let schedule = match mode {
        ScheduleMode::Fixed => SphereSchedule::fixed(defaults.r0).unwrap(),
        ScheduleMode::Halving => SphereSchedule::halving(defaults.r0, 0.5).unwrap(),
        ScheduleMode::Additive => SphereSchedule::additive(defaults.r0, increment).unwrap(),
    };
    let d_max = std::env::var("P_DMAX")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(defaults.d_max);
    let mut params = TraceParams::new(schedule, optimizer, d_max);
    params.lambda_scale = defaults.lambda_scale;
    params.seed_half_displacement = defaults.seed_half_displacement;
    params.seed_half_lambda = defaults.seed_half_lambda;
    let t0 = std::time::Instant::now();
    let result = match trace_path(&model, &base, &params) {
        Ok(r) => r,
        Err(e) => {
            println!("{label} seed={seed} pop={pop} gens={max_gens}: ERROR {e}");
            return;
        }
    };
    let wall = t0.elapsed();
    let path = result.center_path();
    let mut monotone = true;
    for w in path.windows(2) {
        if w[1][0] < w[0][0] - 1e-9 {
            monotone = false;
        }
    }
    let mut efforts: Vec<usize> = result.episodes.iter().map(|e| e.generations).collect();
    efforts.sort_unstable();
    let median = efforts.get(efforts.len() / 2).copied().unwrap_or(0);
    let max = efforts.last().copied().unwrap_or(0);
    let final_d = path.last().map(|p| p[0]).unwrap_or(f64::NAN);
    println!(
        "{label} seed={seed} pop={pop} gens={max_gens} algo={algo:?}: stop={:?} centers={} \
         final_d={final_d:.2} monotone={monotone} effort med={median} max={max} ratio={:.1} wall={:.0?}",
        result.stop,
        result.centers.len(),
        max as f64 / median.max(1) as f64,
        wall
    );
    if !verbose {
        return;
    }
    for (i, p) in path.iter().enumerate() {
        if i < 3 || i + 6 >= path.len() || i % 5 == 0 {
            println!("  c[{i:3}] d={:9.3} lam={:8.4}", p[0], p[1]);
        }
    }
    println!("  episodes:");
    for e in &result.episodes {
        println!(
            "    sphere={:3} r={:5.1} trials={:2} gens={:6} {:?}",
            e.sphere_index, e.radius, e.trials, e.generations, e.outcome
        );
    }
    if std::env::var("P_SAMPLES").is_ok() {
        if let Some(last) = result.episodes.last() {
            println!("  samples of last two spheres (d, lam, center?):");
            for s in &result.all_optimal {
                if s.sphere_index + 1 >= last.sphere_index {
                    println!(
                        "    sph={:3} d={:9.3} lam={:8.4} obj={:.2e} center={}",
                        s.sphere_index,
                        s.d,
                        s.candidate.lambda,
                        s.candidate.objective.unwrap_or(f64::NAN),
                        s.is_center
                    );
                }
            }
        }
    }
}

#[test]
fn cross_check() {
    // Evaluate the Rust objective at an externally computed equilibrium point
    // (written to /tmp/pypoint.txt as "lambda\nu0 u1 ... u14").
    let Ok(text) = std::fs::read_to_string("/tmp/pypoint.txt") else {
        println!("cross_check: no /tmp/pypoint.txt, skipping");
        return;
    };
    let mut lines = text.lines();
    let lambda: f64 = lines.next().unwrap().trim().parse().unwrap();
    let u: Vec<f64> = lines
        .next()
        .unwrap()
        .split_whitespace()
        .map(|s| s.parse().unwrap())
        .collect();
    let model = build_benchmark(BenchmarkId::SixteenMember);
    let cand = snaptrace::model::Candidate::new(u, lambda);
    let obj = model.objective(&cand).unwrap();
    let d = model.control_point(&cand).unwrap();
    println!("cross_check: d={d:.6} lambda={lambda:.6} rust_objective={obj:.3e}");
}

#[test]
fn probe() {
    // crude knobs via env to avoid recompiles
    let pop: usize = std::env::var("P_POP").ok().and_then(|v| v.parse().ok()).unwrap_or(50);
    let gens: usize = std::env::var("P_GENS").ok().and_then(|v| v.parse().ok()).unwrap_or(2000);
    let seeds: Vec<u64> = std::env::var("P_SEEDS")
        .unwrap_or_else(|_| "1".into())
        .split_whitespace()
        .map(|s| s.parse().unwrap())
        .collect();
    let mode = match std::env::var("P_MODE").as_deref() {
        Ok("additive") => ScheduleMode::Additive,
        Ok("halving") => ScheduleMode::Halving,
        _ => ScheduleMode::Fixed,
    };
    let bench = std::env::var("P_BENCH").unwrap_or_else(|_| "sixteen".into());
    for seed in seeds {
        run(&bench, mode, seed, pop, gens);
    }
}
