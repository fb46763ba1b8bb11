//! Quadratic Gaussian CEO problem: `Y_l = Y0 + N_l` with independent
//! Gaussian `Y0 ~ N(0, sigma2)` and `N_l ~ N(0, sigma_l^2)`.

use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

use super::linear_gaussian::LinearGaussian;
use crate::error::{Error, Result};
use crate::prob::Nats;
use crate::regions::{EncoderSet, RatePoint};

/// Slack allowed when testing membership with a witness.
pub const MEMBERSHIP_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianParams {
    pub sigma2: f64,
    pub noise: Vec<f64>,
}

impl GaussianParams {
    pub fn new(sigma2: f64, noise: Vec<f64>) -> Result<Self> {
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(Error::InvalidParameter(format!("source variance {sigma2} must be positive")));
        }
        if noise.is_empty() || noise.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidParameter(format!(
                "noise variances {noise:?} must be a nonempty list of positive values"
            )));
        }
        Ok(Self { sigma2, noise })
    }

    pub fn encoders(&self) -> usize {
        self.noise.len()
    }

    /// `(1/sigma2 + sum_l 1/sigma_l^2)^{-1}`, the distortion with all observations revealed.
    pub fn min_distortion(&self) -> f64 {
        1.0 / (1.0 / self.sigma2 + self.noise.iter().map(|v| 1.0 / v).sum::<f64>())
    }
}

/// `max(ln x, 0)`.
pub fn log_plus(x: f64) -> f64 {
    x.ln().max(0.0)
}

fn check_witness(params: &GaussianParams, r: &[f64]) -> Result<()> {
    if r.len() != params.encoders() {
        return Err(Error::ShapeMismatch(format!(
            "{} witness rates for {} encoders",
            r.len(),
            params.encoders()
        )));
    }
    if let Some(v) = r.iter().find(|v| !(**v >= 0.0) || v.is_infinite()) {
        return Err(Error::InvalidParameter(format!("witness rate {v} must be finite and nonnegative")));
    }
    Ok(())
}

/// `1/2 log+[(1/D)(1/sigma2 + sum_{l not in A} (1 - e^{-2 r_l})/sigma_l^2)^{-1}] + sum_{l in A} r_l`.
pub fn gaussian_subset_bound(params: &GaussianParams, distortion: f64, r: &[f64], a: EncoderSet) -> Result<f64> {
    if !(distortion > 0.0) {
        return Err(Error::InvalidParameter(format!("distortion {distortion} must be positive")));
    }
    check_witness(params, r)?;
    let mut precision = 1.0 / params.sigma2;
    let mut own = 0.0;
    for (i, (&rl, &vl)) in r.iter().zip(&params.noise).enumerate() {
        if a.contains(i + 1) {
            own += rl;
        } else {
            precision += -(-2.0 * rl).exp_m1() / vl;
        }
    }
    Ok(0.5 * log_plus(1.0 / (distortion * precision)) + own)
}

/// True when `point` (rates and one distortion) satisfies every subset
/// constraint, the empty set included, for the witness `r`.
pub fn gaussian_region_contains(params: &GaussianParams, point: &RatePoint, r: &[f64]) -> Result<bool> {
    let big_l = params.encoders();
    if point.rates.len() != big_l || point.distortions.len() != 1 {
        return Err(Error::ShapeMismatch(format!(
            "point must carry {big_l} rates and one distortion"
        )));
    }
    let d = point.distortions[0];
    for bits in 0..1u32 << big_l {
        let a = EncoderSet::from_bits(bits);
        let lhs: f64 = a.members().iter().map(|&l| point.rates[l - 1]).sum();
        if lhs - gaussian_subset_bound(params, d, r, a)? < -MEMBERSHIP_TOLERANCE {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Minimum sum rate and the witness `r` achieving it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianSumRate {
    pub sum_rate: Nats,
    pub r: Vec<f64>,
}

/// Minimizes `sum_l r_l + 1/2 log+(sigma2/D)` subject to
/// `1/D <= 1/sigma2 + sum_l (1 - e^{-2 r_l})/sigma_l^2`.
///
/// With `a_l = 1 - e^{-2 r_l}` the optimum is `a_l = max(0, 1 - theta sigma_l^2)`
/// (reverse water-filling); `theta` is found by bisection, or in closed form
/// when all noise variances agree.
pub fn gaussian_min_sum_rate(params: &GaussianParams, distortion: f64) -> Result<GaussianSumRate> {
    let big_l = params.encoders();
    if !(distortion > 0.0) {
        return Err(Error::InvalidParameter(format!("distortion {distortion} must be positive")));
    }
    if distortion >= params.sigma2 {
        return Ok(GaussianSumRate {
            sum_rate: Nats::ZERO,
            r: vec![0.0; big_l],
        });
    }
    let d_min = params.min_distortion();
    if distortion <= d_min {
        return Err(Error::Infeasible(format!(
            "distortion {distortion} is not above the full-information minimum {d_min}"
        )));
    }
    let needed = 1.0 / distortion - 1.0 / params.sigma2;
    let noise = &params.noise;
    let a: Vec<f64> = if noise.iter().all(|&v| v == noise[0]) {
        vec![needed * noise[0] / big_l as f64; big_l]
    } else {
        let supplied = |theta: f64| noise.iter().map(|&v| (1.0 - theta * v).max(0.0) / v).sum::<f64>();
        let (mut lo, mut hi) = (0.0, 1.0 / noise.iter().cloned().fold(f64::INFINITY, f64::min));
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if supplied(mid) > needed {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let theta = 0.5 * (lo + hi);
        noise.iter().map(|&v| (1.0 - theta * v).max(0.0)).collect()
    };
    let r: Vec<f64> = a.iter().map(|&x| -0.5 * (-x).ln_1p()).collect();
    let sum = r.iter().sum::<f64>() + 0.5 * log_plus(params.sigma2 / distortion);
    Ok(GaussianSumRate { sum_rate: Nats(sum), r })
}

/// Latent order: `Y0, N_1..N_L, V_1..V_L`; observations `Y_l` and test
/// channel outputs `U_l = Y_l + V_l`.
fn test_channel_model(params: &GaussianParams, q: &[f64]) -> Result<LinearGaussian> {
    let big_l = params.encoders();
    let mut latents = vec![params.sigma2];
    latents.extend(&params.noise);
    latents.extend(q);
    let mut g = LinearGaussian::new(latents)?;
    g.define("Y0", &[(0, 1.0)])?;
    for l in 1..=big_l {
        g.define(&format!("Y{l}"), &[(0, 1.0), (l, 1.0)])?;
        g.define(&format!("U{l}"), &[(0, 1.0), (l, 1.0), (big_l + l, 1.0)])?;
    }
    Ok(g)
}

/// `RHS - LHS` of
/// `exp(2 I(Y0; U_A)) <= 1 + sum_{l in A} (1 - exp(-2 I(Y_l; U_l | Y0))) sigma2/sigma_l^2`
/// for scalar test channels `U_l = Y_l + V_l` with `V_l ~ N(0, q_l)`.
pub fn oohama_gap(params: &GaussianParams, q: &[f64], a: EncoderSet) -> Result<f64> {
    let big_l = params.encoders();
    if q.len() != big_l || q.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidParameter(format!(
            "need {big_l} positive test-noise variances, got {q:?}"
        )));
    }
    if a.is_empty() || !a.is_subset_of(EncoderSet::full(big_l)) {
        return Err(Error::InvalidParameter(format!("subset {a} is empty or out of range")));
    }
    let g = test_channel_model(params, q)?;
    let members = a.members();
    let us: Vec<String> = members.iter().map(|l| format!("U{l}")).collect();
    let us: Vec<&str> = us.iter().map(String::as_str).collect();
    let lhs = (2.0 * g.mutual_information(&["Y0"], &us)?).exp();
    let mut rhs = 1.0;
    for &l in &members {
        let i = g.conditional_mutual_information(&[&format!("Y{l}")], &[&format!("U{l}")], &["Y0"])?;
        rhs += -(-2.0 * i).exp_m1() * params.sigma2 / params.noise[l - 1];
    }
    Ok(rhs - lhs)
}

/// Information quantities of the two-encoder system with a common
/// perturbation `W` added to `U1` and subtracted from `U2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianCounterexample {
    pub sigma_w2: f64,
    /// `I(Y1,Y2; U1,U2)`.
    pub i_joint: f64,
    /// `I(Y1,Y2; U1 | U2)`.
    pub i_cond: f64,
    /// `E[(Y0 - E[Y0 | U1,U2])^2]`.
    pub distortion: f64,
}

impl GaussianCounterexample {
    /// Largest of the sum-rate bound and twice the per-encoder bound.
    pub fn worst_bound(&self) -> f64 {
        self.i_joint.max(2.0 * self.i_cond)
    }
}

/// Unit-variance source and noises, `U1 = Y1 + V1 + W`, `U2 = Y2 + V2 - W`
/// with unit-variance `V_l` and `W ~ N(0, sigma_w2)`.
pub fn gaussian_bt_counterexample(sigma_w2: f64) -> Result<GaussianCounterexample> {
    if !(sigma_w2 >= 0.0 && sigma_w2.is_finite()) {
        return Err(Error::InvalidParameter(format!("variance {sigma_w2} must be finite and nonnegative")));
    }
    // latents: Y0, N1, N2, V1, V2, W
    let mut g = LinearGaussian::new(vec![1.0, 1.0, 1.0, 1.0, 1.0, sigma_w2])?;
    g.define("Y0", &[(0, 1.0)])?;
    g.define("Y1", &[(0, 1.0), (1, 1.0)])?;
    g.define("Y2", &[(0, 1.0), (2, 1.0)])?;
    g.define("U1", &[(0, 1.0), (1, 1.0), (3, 1.0), (5, 1.0)])?;
    g.define("U2", &[(0, 1.0), (2, 1.0), (4, 1.0), (5, -1.0)])?;
    let y = ["Y1", "Y2"];
    Ok(GaussianCounterexample {
        sigma_w2,
        i_joint: g.mutual_information(&y, &["U1", "U2"])?,
        i_cond: g.conditional_mutual_information(&y, &["U1"], &["U2"])?,
        distortion: g.mmse("Y0", &["U1", "U2"])?,
    })
}

/// Finds `sigma_w2 > 0` minimizing [`GaussianCounterexample::worst_bound`] on
/// `(0, 10]` and returns it if the bound sits at least `margin` below
/// `(3/2) ln 2`, the optimal sum rate at distortion 1/2.
pub fn gaussian_counterexample_search(margin: f64) -> Result<GaussianCounterexample> {
    let worst = |s: f64| gaussian_bt_counterexample(s).map(|c| c.worst_bound());
    const GRID: usize = 1000;
    let step = 10.0 / GRID as f64;
    let (mut best_i, mut best) = (1, f64::INFINITY);
    for i in 1..=GRID {
        let v = worst(step * i as f64)?;
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let (mut a, mut b) = (step * (best_i as f64 - 1.0).max(1e-6), step * (best_i + 1) as f64);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..60 {
        let c = b - ratio * (b - a);
        let d = a + ratio * (b - a);
        if worst(c)? < worst(d)? {
            b = d;
        } else {
            a = c;
        }
    }
    let found = gaussian_bt_counterexample(0.5 * (a + b))?;
    let target = 1.5 * LN_2 - margin;
    if found.worst_bound() <= target {
        Ok(found)
    } else {
        Err(Error::Infeasible(format!(
            "best perturbation reaches {} nats, above {target}",
            found.worst_bound()
        )))
    }
}
