//! Exit-gate checks. Runs without the libtest harness so that every
//! criterion prints one PASS/FAIL line regardless of output capture.

mod common;

use std::f64::consts::LN_2;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use mtsc::ceo::{
    erasure_bt_counterexample, erasure_curve, erasure_sum_rate, g_function, g_power_shape, g_shape_report,
    gaussian_counterexample_search, gaussian_min_sum_rate, noise_info_minimum, oohama_gap, ErasureParams,
    GaussianParams,
};
use mtsc::model::{build_full_joint, casebook, expected_distortion, Casebook, XChannel};
use mtsc::regions::{
    bt_inner_constraints, bt_outer_constraints, contrapolymatroid_vertex, new_outer_constraints,
    optimize_bt_inner_sum_rate, EncoderSet, OptimizerConfig, RegionConstraints,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Outcome of one criterion: failures found and a short summary.
struct Check {
    failures: Vec<String>,
    summary: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Self {
            failures: Vec::new(),
            summary: Vec::new(),
        }
    }

    fn expect(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn near(&mut self, label: &str, value: f64, target: f64, tol: f64) {
        self.expect((value - target).abs() <= tol, format!("{label} = {value:.12} not within {tol:e} of {target:.12}"));
    }

    fn note(&mut self, s: impl Into<String>) {
        self.summary.push(s.into());
    }
}

fn toy_example(c: &mut Check) {
    let toy = casebook(Casebook::Toy).unwrap();
    let joint = build_full_joint(&toy.model, None, &toy.gamma).unwrap();
    let y = ["Y1", "Y2"];
    let both = joint.mutual_information(&y, &["U1", "U2"]).unwrap().0;
    let first = joint.mutual_information(&y, &["U1"]).unwrap().0;
    let cond = joint.conditional_mutual_information(&y, &["U1"], &["U2"]).unwrap().0;
    let d1 = expected_distortion(&toy.model, &toy.gamma, 1).unwrap();
    c.near("I(Y;U1,U2)", both, 1.25 * LN_2, 1e-12);
    c.near("I(Y;U1)", first, 0.5 * LN_2, 1e-12);
    c.near("I(Y;U1|U2)", cond, 0.75 * LN_2, 1e-12);
    c.near("E[d1]", d1, 0.0, 1e-12);
    c.note(format!("I(Y;U1|U2) = {cond:.9}"));
}

fn appendix_c(c: &mut Check) {
    let ce = erasure_bt_counterexample().unwrap();
    let optimal = erasure_sum_rate(&ErasureParams::new(0.5, 2, 0.6).unwrap()).0;
    c.expect(ce.i_joint > 0.6268 && ce.i_joint <= 0.6273, format!("I_joint = {} outside (0.6268, 0.6273]", ce.i_joint));
    c.expect(ce.i_cond > 0.3243 && ce.i_cond <= 0.3248, format!("I_cond = {} outside (0.3243, 0.3248]", ce.i_cond));
    c.expect(ce.distortion == 0.6, format!("Pr(Z1=0) = {:.17} is not 0.6", ce.distortion));
    let margin = optimal - 2.0 * ce.i_cond;
    c.expect(margin >= 0.006, format!("2 I_cond margin {margin} below 0.006"));
    // the bt-outer region of the same system carries the same numbers
    let case = casebook(Casebook::AppendixC).unwrap();
    let outer = bt_outer_constraints(&case.model, &case.gamma).unwrap();
    c.near("bt-outer sum", outer.sum_rate(), ce.i_joint, 1e-12);
    c.note(format!(
        "I_joint = {:.6}, I_cond = {:.6}, margin = {margin:.6}",
        ce.i_joint, ce.i_cond
    ));
}

/// Binary entropy in bits.
fn h_bits(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        -(x * x.log2() + (1.0 - x) * (1.0 - x).log2())
    }
}

/// Base-2 re-evaluation of `(1 - D) ln 2 + L g(D^{1/L})`.
fn sum_rate_reference(p: f64, l: usize, d: f64) -> f64 {
    let x = d.powf(1.0 / l as f64).max(p);
    let g_bits = h_bits(x) - (1.0 - p) * h_bits((x - p) / (1.0 - p));
    LN_2 * ((1.0 - d) + l as f64 * g_bits)
}

fn erasure_consistency(c: &mut Check) {
    let v = erasure_sum_rate(&ErasureParams::new(0.5, 2, 0.6).unwrap()).0;
    c.near("sum rate vs base-2 evaluation", v, sum_rate_reference(0.5, 2, 0.6), 1e-12);
    // 40-digit evaluation of the closed form
    c.near("sum rate vs 40-digit value", v, 0.656_283_897_37, 1e-10);
    c.near("sum rate vs quoted value", v, 0.656323, 2e-4);
    c.expect(v >= 0.6562, format!("sum rate {v} below 0.6562"));
    for l in [1usize, 2, 3, 10] {
        let floor = 0.5f64.powi(l as i32);
        let one = erasure_sum_rate(&ErasureParams::new(0.5, l, 1.0).unwrap()).0;
        c.expect(one == 0.0, format!("L={l}: D=1 gives {one}"));
        let low = erasure_sum_rate(&ErasureParams::new(0.5, l, floor).unwrap()).0;
        c.near(&format!("L={l}: D=p^L"), low, (1.0 - floor) * LN_2 + l as f64 * LN_2, 1e-12);
        let curve = erasure_curve(0.5, &[l], 1000).unwrap();
        let rises = curve.windows(2).filter(|w| w[1].sum_rate_nats > w[0].sum_rate_nats).count();
        c.expect(rises == 0, format!("L={l}: curve increases at {rises} grid steps"));
    }
    c.note(format!("sum rate(0.5, 2, 0.6) = {v:.9}"));
}

fn converse_program(c: &mut Check) {
    let mut worst: f64 = 0.0;
    for p in [0.1f64, 0.3, 0.5, 0.7, 0.9] {
        for l in [1usize, 2, 3] {
            let floor = p.powi(l as i32);
            for i in 0..7 {
                let d = floor + (1.0 - floor) * i as f64 / 6.0;
                let params = ErasureParams::new(p, l, d).unwrap();
                let found = noise_info_minimum(&params).0;
                let target = g_function(d.powf(1.0 / l as f64).max(p), p).unwrap().0;
                worst = worst.max((found - target).abs());
                c.near(&format!("p={p} L={l} D={d:.4}"), found, target, 1e-6);
            }
        }
    }
    c.note(format!("max deviation {worst:.2e} over 105 points"));
}

fn convexity(c: &mut Check) {
    for p in [0.1, 0.5, 0.9] {
        let r = g_shape_report(p, 10_000).unwrap();
        c.expect(r.max_first_difference <= 1e-12, format!("p={p}: first difference {}", r.max_first_difference));
        c.expect(r.min_second_difference >= -1e-9, format!("p={p}: second difference {}", r.min_second_difference));
        c.expect(r.first_inequality_slack >= -1e-10, format!("p={p}: first inequality {}", r.first_inequality_slack));
        c.expect(r.second_inequality_slack >= -1e-10, format!("p={p}: second inequality {}", r.second_inequality_slack));
    }
    let (first, second) = g_power_shape(0.5, 3, 2.0, 10_000).unwrap();
    c.expect(first <= 1e-12 && second >= -1e-9, format!("g(y^(1/3)): differences {first}, {second}"));
    c.note("p in {0.1, 0.5, 0.9} and g(y^(1/3))");
}

fn gaussian_ceo(c: &mut Check) {
    let params = GaussianParams::new(1.0, vec![1.0, 1.0]).unwrap();
    let s = gaussian_min_sum_rate(&params, 0.5).unwrap().sum_rate.0;
    c.near("min sum rate", s, 1.5 * LN_2, 1e-9);
    match gaussian_counterexample_search(0.04) {
        Ok(found) => {
            c.expect(found.sigma_w2 > 0.0, "search returned sigma_W^2 = 0");
            c.expect(
                found.worst_bound() <= 1.5 * LN_2 - 0.04,
                format!("max bound {} above target", found.worst_bound()),
            );
            c.near("MMSE", found.distortion, 0.5, 1e-12);
            c.note(format!(
                "sigma_W^2 = {:.6}, max(I_joint, 2 I_cond) = {:.6}",
                found.sigma_w2,
                found.worst_bound()
            ));
        }
        Err(e) => c.expect(false, format!("search failed: {e}")),
    }
}

fn oohama_fuzz(c: &mut Check) {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut lowest, mut singles, mut worst_single) = (f64::INFINITY, 0, 0.0f64);
    for _ in 0..1000 {
        let l = rng.random_range(1..=4usize);
        let sigma2 = rng.random_range(0.05..20.0);
        let noise: Vec<f64> = (0..l).map(|_| rng.random_range(0.05..20.0)).collect();
        let q: Vec<f64> = (0..l).map(|_| rng.random_range(0.01..50.0)).collect();
        let a = EncoderSet::from_bits(rng.random_range(1..1u32 << l));
        let params = GaussianParams::new(sigma2, noise).unwrap();
        let gap = oohama_gap(&params, &q, a).unwrap();
        lowest = lowest.min(gap);
        if a.len() == 1 {
            singles += 1;
            worst_single = worst_single.max(gap.abs());
        }
    }
    c.expect(lowest >= -1e-10, format!("gap {lowest} below -1e-10"));
    c.expect(worst_single <= 1e-9, format!("single-encoder gap {worst_single} above 1e-9"));
    c.note(format!("min gap {lowest:.2e}, {singles} single-encoder cases within {worst_single:.1e}"));
}

fn max_bound_difference(a: &RegionConstraints, b: &RegionConstraints) -> f64 {
    let l = a.encoders();
    EncoderSet::nonempty(l).map(|s| (a.bound(s) - b.bound(s)).abs()).fold(0.0, f64::max)
}

fn structural_identities(c: &mut Check) {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut worst_a, mut worst_b, mut worst_c) = (0.0f64, 0.0f64, 0.0f64);
    for trial in 0..200 {
        let l = 1 + trial % 3;
        let model = common::random_source(&mut rng, l);
        let hidden = XChannel::hidden(&model).unwrap();

        let fixed = common::random_system(&mut rng, &model, true);
        let inner = bt_inner_constraints(&model, &fixed).unwrap();
        let outer_fixed = new_outer_constraints(&model, &hidden, &fixed).unwrap();
        worst_a = worst_a.max(max_bound_difference(&inner, &outer_fixed));

        let shared = common::random_system(&mut rng, &model, false);
        let everything = XChannel::observations(&model).unwrap();
        let new_outer = new_outer_constraints(&model, &everything, &shared).unwrap();
        let bt_outer = bt_outer_constraints(&model, &shared).unwrap();
        worst_b = worst_b.max(max_bound_difference(&new_outer, &bt_outer));

        for order in common::permutations(l) {
            let v = contrapolymatroid_vertex(&inner, &order).unwrap();
            let slack = inner.min_slack(&v.rates).unwrap();
            let total: f64 = v.rates.iter().sum();
            worst_c = worst_c.max((-slack).max(0.0)).max((total - inner.sum_rate()).abs());
        }
    }
    c.expect(worst_a <= 1e-10, format!("(a) deterministic W: max difference {worst_a:e}"));
    c.expect(worst_b <= 1e-10, format!("(b) X = Y: max difference {worst_b:e}"));
    c.expect(worst_c <= 1e-10, format!("(c) vertices: max violation {worst_c:e}"));
    c.note(format!("200 models, max errors {worst_a:.1e} / {worst_b:.1e} / {worst_c:.1e}"));
}

fn optimizer_sanity(c: &mut Check) {
    let e = casebook(Casebook::Erasure {
        p: 0.5,
        encoders: 2,
        distortion: 0.6,
    })
    .unwrap();
    let closed = erasure_sum_rate(&ErasureParams::new(0.5, 2, 0.6).unwrap()).0;
    let config = OptimizerConfig {
        cardinalities: vec![3, 3],
        budget: 10_000,
        seed: 7,
        restarts: 8,
    };
    let first = optimize_bt_inner_sum_rate(&e.model, &[0.6], &config).unwrap();
    let second = optimize_bt_inner_sum_rate(&e.model, &[0.6], &config).unwrap();
    match (&first.best, &second.best) {
        (Some(a), Some(b)) => {
            c.expect(a.sum_rate <= 0.6570, format!("erasure optimum {} above 0.6570", a.sum_rate));
            c.expect(a.sum_rate >= closed - 1e-9, format!("erasure optimum {} below closed form", a.sum_rate));
            c.expect(a.sum_rate == b.sum_rate && a.gamma == b.gamma, "repeated run differs");
            c.note(format!("erasure {:.6}", a.sum_rate));
        }
        _ => c.expect(false, "erasure search found no feasible system"),
    }

    let toy = casebook(Casebook::Toy).unwrap();
    let out = optimize_bt_inner_sum_rate(&toy.model, &[0.0], &OptimizerConfig::for_model(&toy.model)).unwrap();
    match out.best {
        Some(best) => {
            c.expect(best.sum_rate <= 2.0 * LN_2 + 1e-6, format!("toy optimum {} above 2 ln 2", best.sum_rate));
            c.note(format!("toy {:.9}", best.sum_rate));
        }
        None => c.expect(false, "toy search found no feasible system"),
    }
}

type Criterion = (&'static str, u64, fn(&mut Check));

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("toy example", 1, toy_example),
        ("correlated-flag erasure system", 1, appendix_c),
        ("erasure sum rate", 5, erasure_consistency),
        ("converse program", 30, converse_program),
        ("convexity of g", 5, convexity),
        ("Gaussian CEO", 1, gaussian_ceo),
        ("Gaussian information inequality", 5, oohama_fuzz),
        ("structural identities", 60, structural_identities),
        ("optimizer", 120, optimizer_sanity),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let mut check = Check::new();
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| run(&mut check)));
        let elapsed = start.elapsed();
        if let Err(panic) = outcome {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            check.failures.push(format!("panicked: {msg}"));
        }
        if elapsed > Duration::from_secs(*limit) {
            check.failures.push(format!("took {elapsed:.2?}, limit {limit} s"));
        }
        let verdict = if check.failures.is_empty() { "PASS" } else { "FAIL" };
        println!(
            "criterion {} {name}: {verdict} ({:.2?}) {}",
            i + 1,
            elapsed,
            check.summary.join("; ")
        );
        for f in &check.failures {
            println!("    {f}");
        }
        if !check.failures.is_empty() {
            failed += 1;
        }
    }
    println!("{} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
