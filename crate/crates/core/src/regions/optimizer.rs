//! Multi-restart coordinate search for the Berger-Tung inner-bound sum rate
//! with `W` and `T` constant.
//!
//! Each encoder row is a softmax of free logits (the last logit of a row is
//! pinned at 0). A sweep visits every logit and runs a golden-section search
//! on a bracket around it, plus a probe at the lower limit, where the
//! entry becomes an exact zero; a move is kept only if it strictly lowers
//! `rate + sum_k mu_k * E[d_k]`. The decoder is recomputed as the
//! Bayes-optimal deterministic map at every evaluation. After each sweep the
//! multipliers `mu_k` move multiplicatively towards the distortion caps, and
//! the best feasible system seen at any evaluation is kept.
//!
//! Every restart starts from a deterministic encoder map: restart 0 from the
//! identity embedding `U_l = Y_l`, the others from random maps with jittered
//! off-symbol logits, drawn from a ChaCha stream selected by the restart index.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{bt_inner_constraints, RegionConstraints};
use crate::error::{Error, Result};
use crate::model::{names, AuxSystem, SourceModel};
use crate::prob::{for_each_index, xlnx_neg, Channel, Variable};

/// A system counts as feasible when each distortion is at most its cap plus this.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-9;

const LOGIT_LIMIT: f64 = 50.0;
const GOLDEN_STEPS: usize = 12;
/// Logit gap of the chosen symbol in the deterministic starting encoders.
const START_GAP: f64 = 40.0;
const START_JITTER: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizerConfig {
    /// `|U_l|` for each encoder.
    pub cardinalities: Vec<usize>,
    /// Objective evaluations per restart.
    pub budget: usize,
    pub seed: u64,
    pub restarts: usize,
}

impl OptimizerConfig {
    /// Cardinalities from [`SourceModel::cardinality_bound`], 10^4 evaluations, 8 restarts.
    pub fn for_model(model: &SourceModel) -> Self {
        Self {
            cardinalities: (1..=model.encoders()).map(|l| model.cardinality_bound(l)).collect(),
            budget: 10_000,
            seed: 0,
            restarts: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizedSystem {
    /// Full-set inner bound, recomputed exactly on `gamma`.
    pub sum_rate: f64,
    pub gamma: AuxSystem,
    pub constraints: RegionConstraints,
    /// Restart that produced the system; `restarts` denotes the constant system.
    pub restart: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizerOutcome {
    /// `None` when no evaluated system met the caps.
    pub best: Option<OptimizedSystem>,
    pub evaluations: usize,
    /// Smallest distortions reached per component (over all evaluations).
    pub lowest_distortions: Vec<f64>,
}

/// Fast evaluation of `I(Y; U | Y_{L+1})` and Bayes distortions for product
/// encoders, working directly on the support of the source law.
struct Evaluator {
    support: Vec<SupportPoint>,
    y_sizes: Vec<usize>,
    u_sizes: Vec<usize>,
    n_u: usize,
    n_side: usize,
    side_entropy: f64,
    z_sizes: Vec<usize>,
    tables: Vec<Vec<f64>>,
}

struct SupportPoint {
    prob: f64,
    obs: Vec<usize>,
    side: usize,
    flat: usize,
}

struct Evaluation {
    rate: f64,
    distortions: Vec<f64>,
    /// Per component, the reproduction chosen for each `(side, u)` cell.
    decoders: Vec<Vec<usize>>,
}

impl Evaluator {
    fn new(model: &SourceModel, u_sizes: Vec<usize>) -> Self {
        let big_l = model.encoders();
        let vars = model.joint().variables();
        let sizes: Vec<usize> = vars.iter().map(|v| v.size).collect();
        let probs = model.joint().probs();
        let mut support = Vec::new();
        for_each_index(&sizes, |flat, d| {
            if probs[flat] > 0.0 {
                support.push(SupportPoint {
                    prob: probs[flat],
                    obs: d[1..=big_l].to_vec(),
                    side: d[big_l + 1],
                    flat,
                });
            }
        });
        let n_side = model.side_information_size();
        let mut side_probs = vec![0.0; n_side];
        for s in &support {
            side_probs[s.side] += s.prob;
        }
        Self {
            y_sizes: sizes[1..=big_l].to_vec(),
            n_u: u_sizes.iter().product(),
            u_sizes,
            n_side,
            side_entropy: side_probs.iter().map(|&p| xlnx_neg(p)).sum(),
            z_sizes: model.distortions().iter().map(|d| d.reproduction_size).collect(),
            tables: model.distortions().iter().map(|d| d.table.clone()).collect(),
            support,
        }
    }

    fn evaluate(&self, kernels: &[Vec<f64>]) -> Evaluation {
        let cells = self.n_side * self.n_u;
        let mut joint = vec![0.0; cells];
        let mut costs: Vec<Vec<f64>> = self.z_sizes.iter().map(|&z| vec![0.0; cells * z]).collect();
        let mut noise_entropy = 0.0;
        let mut prod = Vec::with_capacity(self.n_u);
        let mut next = Vec::with_capacity(self.n_u);
        for s in &self.support {
            prod.clear();
            prod.push(1.0);
            for (l, &y) in s.obs.iter().enumerate() {
                let size = self.u_sizes[l];
                let row = &kernels[l][y * size..(y + 1) * size];
                noise_entropy += s.prob * row.iter().map(|&q| xlnx_neg(q)).sum::<f64>();
                next.clear();
                for &a in prod.iter() {
                    next.extend(row.iter().map(|&q| a * q));
                }
                std::mem::swap(&mut prod, &mut next);
            }
            let base = s.side * self.n_u;
            for (u, &q) in prod.iter().enumerate() {
                if q == 0.0 {
                    continue;
                }
                let w = s.prob * q;
                joint[base + u] += w;
                for (k, cost) in costs.iter_mut().enumerate() {
                    let z_size = self.z_sizes[k];
                    let d = &self.tables[k][s.flat * z_size..(s.flat + 1) * z_size];
                    let cell = &mut cost[(base + u) * z_size..(base + u + 1) * z_size];
                    for (c, &dz) in cell.iter_mut().zip(d) {
                        *c += w * dz;
                    }
                }
            }
        }
        let joint_entropy: f64 = joint.iter().map(|&p| xlnx_neg(p)).sum();
        let rate = (joint_entropy - self.side_entropy - noise_entropy).max(0.0);
        let mut distortions = Vec::with_capacity(costs.len());
        let mut decoders = Vec::with_capacity(costs.len());
        for (k, cost) in costs.iter().enumerate() {
            let z_size = self.z_sizes[k];
            let mut total = 0.0;
            let mut map = Vec::with_capacity(cells);
            for cell in cost.chunks(z_size) {
                let (z, c) = cell
                    .iter()
                    .enumerate()
                    .fold((0, f64::INFINITY), |best, (z, &c)| if c < best.1 { (z, c) } else { best });
                total += c;
                map.push(z);
            }
            distortions.push(total);
            decoders.push(map);
        }
        Evaluation {
            rate,
            distortions,
            decoders,
        }
    }
}

fn softmax_rows(logits: &[f64], size: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(logits.len());
    for row in logits.chunks(size) {
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let start = out.len();
        out.extend(row.iter().map(|&x| if x <= -LOGIT_LIMIT { 0.0 } else { (x - max).exp() }));
        let sum: f64 = out[start..].iter().sum();
        out[start..].iter_mut().for_each(|p| *p /= sum);
    }
    out
}

struct Candidate {
    rate: f64,
    kernels: Vec<Vec<f64>>,
}

struct RestartResult {
    best: Option<Candidate>,
    evaluations: usize,
    lowest: Vec<f64>,
}

struct Search<'a> {
    eval: &'a Evaluator,
    caps: &'a [f64],
    logits: Vec<Vec<f64>>,
    mu: Vec<f64>,
    evaluations: usize,
    budget: usize,
    best: Option<Candidate>,
    lowest: Vec<f64>,
}

impl Search<'_> {
    fn kernels(&self) -> Vec<Vec<f64>> {
        self.logits
            .iter()
            .zip(&self.eval.u_sizes)
            .map(|(l, &size)| softmax_rows(l, size))
            .collect()
    }

    fn objective(&mut self) -> (f64, Vec<f64>) {
        let kernels = self.kernels();
        let e = self.eval.evaluate(&kernels);
        self.evaluations += 1;
        for (low, &d) in self.lowest.iter_mut().zip(&e.distortions) {
            *low = low.min(d);
        }
        let feasible = e
            .distortions
            .iter()
            .zip(self.caps)
            .all(|(&d, &cap)| d <= cap + FEASIBILITY_TOLERANCE);
        if feasible && self.best.as_ref().is_none_or(|b| e.rate < b.rate) {
            self.best = Some(Candidate { rate: e.rate, kernels });
        }
        let value = e.rate + self.mu.iter().zip(&e.distortions).map(|(m, d)| m * d).sum::<f64>();
        (value, e.distortions)
    }

    fn exhausted(&self) -> bool {
        self.evaluations >= self.budget
    }

    /// Golden-section search on one logit; keeps the best strictly improving probe.
    fn line_search(&mut self, l: usize, i: usize, bracket: f64, incumbent: f64) -> f64 {
        let x0 = self.logits[l][i];
        let (mut a, mut b) = ((x0 - bracket).max(-LOGIT_LIMIT), (x0 + bracket).min(LOGIT_LIMIT));
        let ratio = (5f64.sqrt() - 1.0) / 2.0;
        let mut best = (incumbent, x0);
        let probe = |s: &mut Self, x: f64, best: &mut (f64, f64)| {
            s.logits[l][i] = x;
            let (v, _) = s.objective();
            if v < best.0 {
                *best = (v, x);
            }
            v
        };
        // a logit at the lower limit is an exact zero in the kernel
        if x0 > -LOGIT_LIMIT {
            probe(self, -LOGIT_LIMIT, &mut best);
            if self.exhausted() {
                self.logits[l][i] = best.1;
                return best.0;
            }
        }
        let mut c = b - ratio * (b - a);
        let mut d = a + ratio * (b - a);
        let mut fc = probe(self, c, &mut best);
        let mut fd = if self.exhausted() { f64::INFINITY } else { probe(self, d, &mut best) };
        for _ in 2..GOLDEN_STEPS {
            if self.exhausted() {
                break;
            }
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - ratio * (b - a);
                fc = probe(self, c, &mut best);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + ratio * (b - a);
                fd = probe(self, d, &mut best);
            }
        }
        self.logits[l][i] = best.1;
        best.0
    }

    fn run(&mut self) {
        let free: Vec<(usize, usize)> = self
            .logits
            .iter()
            .enumerate()
            .flat_map(|(l, row)| {
                let size = self.eval.u_sizes[l];
                (0..row.len()).filter(move |i| size > 1 && i % size != size - 1).map(move |i| (l, i))
            })
            .collect();
        let k = self.mu.len();
        let mut step = vec![2.0f64; k];
        let mut last_dir = vec![0i8; k];
        let mut bracket = 16.0;
        let (mut value, _) = self.objective();
        while !self.exhausted() {
            for &(l, i) in &free {
                if self.exhausted() {
                    break;
                }
                value = self.line_search(l, i, bracket, value);
            }
            bracket = (bracket * 0.75).max(1.0);
            if self.exhausted() {
                break;
            }
            let (_, dist) = self.objective();
            for j in 0..k {
                let dir: i8 = if dist[j] > self.caps[j] + FEASIBILITY_TOLERANCE { 1 } else { -1 };
                if last_dir[j] != 0 && dir != last_dir[j] {
                    step[j] = step[j].sqrt().max(1.0 + 1e-4);
                }
                last_dir[j] = dir;
                if dir > 0 {
                    self.mu[j] = (self.mu[j] * step[j]).min(1e8);
                } else {
                    self.mu[j] = (self.mu[j] / step[j]).max(1e-8);
                }
            }
            if self.exhausted() {
                break;
            }
            (value, _) = self.objective();
        }
    }
}

fn run_restart(eval: &Evaluator, caps: &[f64], budget: usize, seed: u64, restart: usize) -> RestartResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    let logits: Vec<Vec<f64>> = eval
        .y_sizes
        .iter()
        .zip(&eval.u_sizes)
        .map(|(&y_size, &u_size)| {
            let mut row = vec![0.0; y_size * u_size];
            for y in 0..y_size {
                let chosen = if restart == 0 { y % u_size } else { rng.random_range(0..u_size) };
                let r = &mut row[y * u_size..(y + 1) * u_size];
                for (u, x) in r[..u_size - 1].iter_mut().enumerate() {
                    let noise = if restart == 0 { 0.0 } else { rng.random_range(-START_JITTER..START_JITTER) };
                    *x = if u == chosen { START_GAP } else if chosen == u_size - 1 { -START_GAP + noise } else { noise };
                }
            }
            row
        })
        .collect();
    let mut search = Search {
        eval,
        caps,
        logits,
        mu: vec![1.0; caps.len()],
        evaluations: 0,
        budget,
        best: None,
        lowest: vec![f64::INFINITY; caps.len()],
    };
    search.run();
    RestartResult {
        best: search.best,
        evaluations: search.evaluations,
        lowest: search.lowest,
    }
}

fn assemble(model: &SourceModel, eval: &Evaluator, kernels: &[Vec<f64>]) -> Result<AuxSystem> {
    let big_l = model.encoders();
    let decoders = eval.evaluate(kernels).decoders;
    let encoders = (1..=big_l)
        .map(|l| {
            let size = eval.u_sizes[l - 1];
            let rows = kernels[l - 1].chunks(size).map(|r| r.to_vec()).collect();
            Channel::new(
                vec![
                    Variable::new(names::observation(l), eval.y_sizes[l - 1]),
                    Variable::new(names::SHARED, 1),
                    Variable::new(names::TIME_SHARING, 1),
                ],
                Variable::new(names::auxiliary(l), size),
                rows,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let mut inputs: Vec<Variable> = (1..=big_l)
        .map(|l| Variable::new(names::auxiliary(l), eval.u_sizes[l - 1]))
        .collect();
    inputs.push(Variable::new(names::side_information(big_l), eval.n_side));
    inputs.push(Variable::new(names::TIME_SHARING, 1));
    let z_size: usize = eval.z_sizes.iter().product();
    let decoder = Channel::deterministic(inputs, Variable::new(names::DECODER_OUTPUT, z_size), |d| {
        let u = d[..big_l].iter().zip(&eval.u_sizes).fold(0, |acc, (&x, &s)| acc * s + x);
        let cell = d[big_l] * eval.n_u + u;
        decoders
            .iter()
            .zip(&eval.z_sizes)
            .fold(0, |acc, (map, &s)| acc * s + map[cell])
    })?;
    AuxSystem::new(AuxSystem::trivial_wt(), encoders, decoder)
}

/// Searches for a Berger-Tung inner-bound system meeting `caps` with small
/// sum rate. The result is an upper estimate of the true minimum.
pub fn optimize_bt_inner_sum_rate(
    model: &SourceModel,
    caps: &[f64],
    config: &OptimizerConfig,
) -> Result<OptimizerOutcome> {
    let big_l = model.encoders();
    if caps.len() != model.distortion_count() {
        return Err(Error::ShapeMismatch(format!(
            "{} caps for {} distortion measures",
            caps.len(),
            model.distortion_count()
        )));
    }
    if let Some(c) = caps.iter().find(|c| !c.is_finite() || **c < 0.0) {
        return Err(Error::InvalidParameter(format!("distortion cap {c} must be finite and nonnegative")));
    }
    if config.cardinalities.len() != big_l || config.cardinalities.contains(&0) {
        return Err(Error::InvalidParameter(format!(
            "need {big_l} positive cardinalities, got {:?}",
            config.cardinalities
        )));
    }
    if config.budget == 0 || config.restarts == 0 {
        return Err(Error::InvalidParameter("budget and restarts must be positive".into()));
    }
    let eval = Evaluator::new(model, config.cardinalities.clone());
    let results: Vec<RestartResult> = (0..config.restarts)
        .into_par_iter()
        .map(|r| run_restart(&eval, caps, config.budget, config.seed, r))
        .collect();

    let mut evaluations = 0;
    let mut lowest = vec![f64::INFINITY; caps.len()];
    let mut best: Option<(f64, usize, Vec<Vec<f64>>)> = None;
    let mut consider = |rate: f64, restart: usize, kernels: Vec<Vec<f64>>| {
        if best.as_ref().is_none_or(|b| (rate, restart) < (b.0, b.1)) {
            best = Some((rate, restart, kernels));
        }
    };
    for (r, res) in results.into_iter().enumerate() {
        evaluations += res.evaluations;
        for (low, d) in lowest.iter_mut().zip(res.lowest) {
            *low = low.min(d);
        }
        if let Some(c) = res.best {
            consider(c.rate, r, c.kernels);
        }
    }
    // the zero-rate system: every encoder sends its first symbol
    let constant: Vec<Vec<f64>> = eval
        .y_sizes
        .iter()
        .zip(&eval.u_sizes)
        .map(|(&y, &u)| (0..y * u).map(|i| if i % u == 0 { 1.0 } else { 0.0 }).collect())
        .collect();
    let e = eval.evaluate(&constant);
    evaluations += 1;
    for (low, &d) in lowest.iter_mut().zip(&e.distortions) {
        *low = low.min(d);
    }
    if e.distortions.iter().zip(caps).all(|(&d, &c)| d <= c + FEASIBILITY_TOLERANCE) {
        consider(e.rate, config.restarts, constant);
    }

    let best = match best {
        Some((_, restart, kernels)) => {
            let gamma = assemble(model, &eval, &kernels)?;
            let constraints = bt_inner_constraints(model, &gamma)?;
            Some(OptimizedSystem {
                sum_rate: constraints.sum_rate(),
                gamma,
                constraints,
                restart,
            })
        }
        None => None,
    };
    Ok(OptimizerOutcome {
        best,
        evaluations,
        lowest_distortions: lowest,
    })
}
