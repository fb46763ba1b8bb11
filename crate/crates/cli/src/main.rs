//! `mtsc`: rate-region bounds, CEO closed forms and reproduction checks.
//!
//! Exit status is 0 on success, 2 when a check fails (a Markov condition, a
//! reproduction tolerance, an infeasible search) and 1 on usage or I/O errors.

mod inputs;
mod output;
mod repro;

use clap::{Parser, Subcommand, ValueEnum};
use mtsc::ceo::{erasure_curve, erasure_sum_rate, gaussian_min_sum_rate, gaussian_region_contains, gaussian_subset_bound};
use mtsc::ceo::{ErasureParams, GaussianParams};
use mtsc::model::{check_chi, check_gamma_class, expected_distortion, AuxSystem, GammaClass, MarkovReport, SourceModel};
use mtsc::regions::{
    bt_inner_constraints, bt_outer_constraints, new_outer_constraints, optimize_bt_inner_sum_rate, EncoderSet,
    OptimizerConfig, RatePoint, RegionConstraints,
};
use serde_json::Value;
use std::process::ExitCode;

use output::{cell, num, object, Report, Units};

#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
    report: Option<Report>,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
            report: None,
        }
    }

    fn failed(message: impl Into<String>, report: Report) -> Self {
        Self {
            code: 2,
            message: message.into(),
            report: Some(report),
        }
    }
}

impl std::fmt::Debug for Report {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Report({})", self.json)
    }
}

impl From<mtsc::Error> for CliError {
    fn from(e: mtsc::Error) -> Self {
        CliError::usage(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    BtInner,
    BtOuter,
    NewOuter,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReproTarget {
    Toy,
    AppendixC,
    AppendixE,
    ErasureFigure,
}

#[derive(Parser)]
#[command(name = "mtsc", version, about = "Multiterminal source coding bounds and CEO closed forms")]
struct Cli {
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,
    /// Show rates in bits instead of nats.
    #[arg(long, global = true)]
    bits: bool,
    /// Write the result here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Summarize a source model and, optionally, an auxiliary system.
    Info {
        /// Source model: JSON file or casebook:NAME (toy, toy-bt-gamma, appendix-c, erasure:P,L,D).
        #[arg(long)]
        model: String,
        /// Auxiliary system: JSON file or casebook entry.
        #[arg(long)]
        gamma: Option<String>,
        /// JSON file, casebook entry, or hidden|observations|constant.
        #[arg(long)]
        x: Option<String>,
    },
    /// Subset bounds of one region for a fixed auxiliary system.
    Bounds {
        /// Source model: JSON file or casebook entry.
        #[arg(long)]
        model: String,
        /// Auxiliary system: JSON file or casebook entry.
        #[arg(long)]
        gamma: String,
        /// Attached variable for new-outer: JSON file, casebook entry, or hidden|observations|constant.
        #[arg(long)]
        x: Option<String>,
        #[arg(long, value_enum)]
        kind: Kind,
    },
    /// Optimal sum rate of the binary erasure CEO problem.
    ErasureCeo {
        /// Erasure probability.
        #[arg(long)]
        p: f64,
        /// Encoder count; a comma list is accepted with --curve.
        #[arg(long = "L", value_delimiter = ',', required = true)]
        encoders: Vec<usize>,
        /// Target Hamming distortion.
        #[arg(long = "D", conflicts_with = "curve", required_unless_present = "curve")]
        distortion: Option<f64>,
        /// Number of grid points over [p^L, 1].
        #[arg(long)]
        curve: Option<usize>,
    },
    /// Minimum sum rate of the quadratic Gaussian CEO problem, or membership of a rate point.
    GaussianCeo {
        /// Variance of the hidden source.
        #[arg(long)]
        sigma2: f64,
        /// Observation noise variances, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        noise: Vec<f64>,
        /// Target squared-error distortion.
        #[arg(long = "D")]
        distortion: f64,
        /// Per-encoder noise-information rates r_l (nats).
        #[arg(long, value_delimiter = ',', requires = "rates")]
        witness: Option<Vec<f64>>,
        /// Rate point (nats) tested against the witness.
        #[arg(long, value_delimiter = ',', requires = "witness")]
        rates: Option<Vec<f64>>,
    },
    /// Recompute a published example and judge it with the acceptance tolerances.
    Repro {
        #[arg(value_enum)]
        target: ReproTarget,
    },
    /// Search the Berger-Tung inner bound for a small sum rate under distortion caps.
    Optimize {
        /// Source model: JSON file or casebook entry.
        #[arg(long)]
        model: String,
        /// Distortion caps, one per distortion measure.
        #[arg(long, value_delimiter = ',', required = true)]
        caps: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Objective evaluations per restart.
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        /// |U_l| per encoder; defaults to the cardinality bound.
        #[arg(long, value_delimiter = ',')]
        cardinalities: Option<Vec<usize>>,
    },
}

fn markov_json(report: &MarkovReport) -> Value {
    let conditions = report
        .conditions
        .iter()
        .map(|c| {
            object(vec![
                ("condition", Value::from(c.label.clone())),
                ("residual", num(c.residual)),
                ("pass", Value::from(c.pass)),
            ])
        })
        .collect();
    object(vec![
        ("pass", Value::from(report.pass)),
        ("tolerance", num(report.tolerance)),
        ("conditions", Value::Array(conditions)),
    ])
}

fn markov_rows(scope: &str, report: &MarkovReport) -> Vec<Vec<String>> {
    report
        .conditions
        .iter()
        .map(|c| vec![scope.to_string(), c.label.clone(), cell(c.residual), c.pass.to_string()])
        .collect()
}

fn info(model: &SourceModel, gamma: Option<&AuxSystem>, x: Option<&str>) -> Result<Report, CliError> {
    let big_l = model.encoders();
    let sizes: Vec<Value> = model
        .joint()
        .variables()
        .iter()
        .map(|v| object(vec![("name", Value::from(v.name.clone())), ("size", Value::from(v.size))]))
        .collect();
    let repro: Vec<Value> = model.distortions().iter().map(|d| Value::from(d.reproduction_size)).collect();
    let bounds: Vec<Value> = (1..=big_l).map(|l| Value::from(model.cardinality_bound(l))).collect();
    let mut fields = vec![
        ("encoders", Value::from(big_l)),
        ("sources", Value::Array(sizes)),
        ("reproduction_sizes", Value::from(repro)),
        ("cardinality_bounds", Value::from(bounds)),
    ];
    let mut rows = Vec::new();
    if let Some(gamma) = gamma {
        let distortions = (1..=model.distortion_count())
            .map(|k| expected_distortion(model, gamma, k))
            .collect::<mtsc::Result<Vec<f64>>>()?;
        for (k, d) in distortions.iter().enumerate() {
            rows.push(vec!["distortion".into(), format!("E[d{}]", k + 1), cell(*d), String::new()]);
        }
        let mut classes = serde_json::Map::new();
        for (class, label) in [
            (GammaClass::Outer, "outer"),
            (GammaClass::BtInner, "bt-inner"),
            (GammaClass::BtOuter, "bt-outer"),
        ] {
            let report = check_gamma_class(model, None, gamma, class)?;
            rows.extend(markov_rows(label, &report));
            classes.insert(label.to_string(), markov_json(&report));
        }
        fields.push(("expected_distortions", Value::Array(distortions.iter().map(|d| num(*d)).collect())));
        fields.push(("classes", Value::Object(classes)));
    }
    if let Some(source) = x {
        let x = inputs::x(source, model)?;
        let report = check_chi(model, &x)?;
        rows.extend(markov_rows("x", &report));
        fields.push(("x_conditions", markov_json(&report)));
    }
    Ok(Report::new(object(fields), &["scope", "quantity", "value", "pass"], rows))
}

fn constraints_report(kind: &str, c: &RegionConstraints, units: Units) -> Report {
    let big_l = c.encoders();
    let key = units.key("bound");
    let mut bounds = Vec::new();
    let mut rows = Vec::new();
    for a in EncoderSet::nonempty(big_l) {
        let v = units.rate(c.bound(a));
        bounds.push(object(vec![("A", Value::from(a.to_literal(big_l))), (key.as_str(), num(v))]));
        rows.push(vec![a.to_literal(big_l), cell(v)]);
    }
    let json = object(vec![
        ("kind", Value::from(kind)),
        ("encoders", Value::from(big_l)),
        ("bounds", Value::Array(bounds)),
        (units.key("sum_rate").as_str(), num(units.rate(c.sum_rate()))),
        ("distortions", Value::Array(c.distortions().iter().map(|d| num(*d)).collect())),
    ]);
    Report::new(json, &["A", key.as_str()], rows)
}

fn bounds(model: &SourceModel, gamma: &AuxSystem, x: Option<&str>, kind: Kind, units: Units) -> Result<Report, CliError> {
    let mut reports = Vec::new();
    let x = match (kind, x) {
        (Kind::NewOuter, None) => return Err(CliError::usage("--kind new-outer needs --x")),
        (Kind::NewOuter, Some(source)) => {
            let x = inputs::x(source, model)?;
            reports.push(("x", check_chi(model, &x)?));
            Some(x)
        }
        _ => None,
    };
    let (label, class) = match kind {
        Kind::BtInner => ("bt-inner", GammaClass::BtInner),
        Kind::BtOuter => ("bt-outer", GammaClass::BtOuter),
        Kind::NewOuter => ("new-outer", GammaClass::Outer),
    };
    reports.push(("gamma", check_gamma_class(model, None, gamma, class)?));
    if reports.iter().any(|(_, r)| !r.pass) {
        let mut rows = Vec::new();
        let mut json = serde_json::Map::new();
        for (scope, r) in &reports {
            rows.extend(markov_rows(scope, r));
            json.insert(scope.to_string(), markov_json(r));
        }
        let worst = reports.iter().map(|(_, r)| r.max_residual()).fold(0.0, f64::max);
        let report = Report::new(Value::Object(json), &["scope", "condition", "residual", "pass"], rows);
        return Err(CliError::failed(
            format!("{label}: Markov conditions fail (largest residual {worst:.3e})"),
            report,
        ));
    }
    let c = match (kind, &x) {
        (Kind::BtInner, _) => bt_inner_constraints(model, gamma)?,
        (Kind::BtOuter, _) => bt_outer_constraints(model, gamma)?,
        (Kind::NewOuter, Some(x)) => new_outer_constraints(model, x, gamma)?,
        (Kind::NewOuter, None) => unreachable!("checked above"),
    };
    Ok(constraints_report(label, &c, units))
}

fn erasure(p: f64, encoders: &[usize], distortion: Option<f64>, curve: Option<usize>, units: Units) -> Result<Report, CliError> {
    let key = units.key("sum_rate");
    if let Some(points) = curve {
        let pts = erasure_curve(p, encoders, points)?;
        let mut rows = Vec::new();
        let mut json = Vec::new();
        for pt in &pts {
            let v = units.rate(pt.sum_rate_nats);
            rows.push(vec![cell(pt.distortion), pt.encoders.to_string(), cell(v)]);
            json.push(object(vec![
                ("D", num(pt.distortion)),
                ("L", Value::from(pt.encoders)),
                (key.as_str(), num(v)),
            ]));
        }
        return Ok(Report::new(Value::Array(json), &["D", "L", key.as_str()], rows));
    }
    let [l] = encoders else {
        return Err(CliError::usage("--D takes a single --L value"));
    };
    let d = distortion.expect("clap requires --D without --curve");
    let v = units.rate(erasure_sum_rate(&ErasureParams::new(p, *l, d)?).0);
    let json = object(vec![
        ("p", num(p)),
        ("L", Value::from(*l)),
        ("D", num(d)),
        (key.as_str(), num(v)),
    ]);
    Ok(Report::new(json, &["p", "L", "D", key.as_str()], vec![vec![cell(p), l.to_string(), cell(d), cell(v)]]))
}

fn gaussian(
    params: &GaussianParams,
    distortion: f64,
    witness: Option<&[f64]>,
    rates: Option<&[f64]>,
    units: Units,
) -> Result<Report, CliError> {
    let big_l = params.encoders();
    let (Some(r), Some(rates)) = (witness, rates) else {
        let s = gaussian_min_sum_rate(params, distortion)?;
        let v = units.rate(s.sum_rate.0);
        let r: Vec<f64> = s.r.iter().map(|x| units.rate(*x)).collect();
        let key = units.key("sum_rate");
        let json = object(vec![
            ("D", num(distortion)),
            (key.as_str(), num(v)),
            (units.key("witness").as_str(), Value::Array(r.iter().map(|x| num(*x)).collect())),
        ]);
        let mut rows = vec![vec!["sum_rate".to_string(), cell(v)]];
        rows.extend(r.iter().enumerate().map(|(i, x)| vec![format!("r{}", i + 1), cell(*x)]));
        return Ok(Report::new(json, &["quantity", &units.key("value")], rows));
    };
    let point = RatePoint {
        rates: rates.to_vec(),
        distortions: vec![distortion],
    };
    let contains = gaussian_region_contains(params, &point, r)?;
    let key = units.key("bound");
    let mut bounds = Vec::new();
    let mut rows = Vec::new();
    for bits in 0..1u32 << big_l {
        let a = EncoderSet::from_bits(bits);
        let bound = units.rate(gaussian_subset_bound(params, distortion, r, a)?);
        let sum = units.rate(a.members().iter().map(|&l| rates[l - 1]).sum());
        bounds.push(object(vec![
            ("A", Value::from(a.to_literal(big_l))),
            (key.as_str(), num(bound)),
            ("rate_sum", num(sum)),
        ]));
        rows.push(vec![a.to_literal(big_l), cell(bound), cell(sum)]);
    }
    let json = object(vec![("contains", Value::from(contains)), ("bounds", Value::Array(bounds))]);
    Ok(Report::new(json, &["A", key.as_str(), "rate_sum"], rows))
}

fn optimize(model: &SourceModel, caps: &[f64], config: OptimizerConfig, units: Units) -> Result<Report, CliError> {
    let out = optimize_bt_inner_sum_rate(model, caps, &config)?;
    let Some(best) = out.best else {
        let json = object(vec![
            ("feasible", Value::from(false)),
            ("evaluations", Value::from(out.evaluations)),
            ("lowest_distortions", Value::Array(out.lowest_distortions.iter().map(|d| num(*d)).collect())),
        ]);
        let rows = out
            .lowest_distortions
            .iter()
            .enumerate()
            .map(|(k, d)| vec![format!("lowest E[d{}]", k + 1), cell(*d)])
            .collect();
        let report = Report::new(json, &["quantity", "value"], rows);
        return Err(CliError::failed("no evaluated system meets the caps", report));
    };
    let mut report = constraints_report("bt-inner", &best.constraints, units);
    if let Value::Object(m) = &mut report.json {
        m.insert("feasible".into(), Value::from(true));
        m.insert("restart".into(), Value::from(best.restart));
        m.insert("evaluations".into(), Value::from(out.evaluations));
        m.insert("seed".into(), Value::from(config.seed));
        // kernel probabilities stay at full precision so the system can be fed back in
        m.insert("gamma".into(), serde_json::to_value(&best.gamma).map_err(|e| CliError::usage(e.to_string()))?);
    }
    Ok(report)
}

fn run(cli: Cli) -> Result<Report, CliError> {
    let units = Units { bits: cli.bits };
    match cli.command {
        Command::Info { model, gamma, x } => {
            let m = inputs::model(&model)?;
            let g = gamma.as_deref().map(inputs::gamma).transpose()?;
            info(&m, g.as_ref(), x.as_deref())
        }
        Command::Bounds { model, gamma, x, kind } => {
            let m = inputs::model(&model)?;
            let g = inputs::gamma(&gamma)?;
            bounds(&m, &g, x.as_deref(), kind, units)
        }
        Command::ErasureCeo {
            p,
            encoders,
            distortion,
            curve,
        } => erasure(p, &encoders, distortion, curve, units),
        Command::GaussianCeo {
            sigma2,
            noise,
            distortion,
            witness,
            rates,
        } => {
            let params = GaussianParams::new(sigma2, noise)?;
            gaussian(&params, distortion, witness.as_deref(), rates.as_deref(), units)
        }
        Command::Repro { target } => {
            let name = match target {
                ReproTarget::Toy => "toy",
                ReproTarget::AppendixC => "appendix-c",
                ReproTarget::AppendixE => "appendix-e",
                ReproTarget::ErasureFigure => "erasure-figure",
            };
            repro::run(name, units)
        }
        Command::Optimize {
            model,
            caps,
            seed,
            budget,
            restarts,
            cardinalities,
        } => {
            let m = inputs::model(&model)?;
            let mut config = OptimizerConfig::for_model(&m);
            config.seed = seed;
            config.budget = budget;
            config.restarts = restarts;
            if let Some(c) = cardinalities {
                config.cardinalities = c;
            }
            optimize(&m, &caps, config, units)
        }
    }
}

fn emit(report: &Report, csv_format: bool, path: Option<&str>) -> Result<(), CliError> {
    let text = report.render(csv_format).map_err(CliError::usage)?;
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::usage(format!("cannot write `{p}`: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Ok(n) = std::env::var("MTSC_THREADS") {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: MTSC_THREADS must be a positive integer, got `{n}`");
                return ExitCode::from(1);
            }
        }
    }
    let csv_format = matches!(cli.format, Format::Csv);
    let path = cli.output.clone();
    match run(cli) {
        Ok(report) => {
            if let Err(e) = emit(&report, csv_format, path.as_deref()) {
                eprintln!("error: {}", e.message);
                return ExitCode::from(1);
            }
            ExitCode::from(if report.failed { 2 } else { 0 })
        }
        Err(e) => {
            if let Some(report) = &e.report {
                if let Err(w) = emit(report, csv_format, path.as_deref()) {
                    eprintln!("error: {}", w.message);
                }
            }
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
