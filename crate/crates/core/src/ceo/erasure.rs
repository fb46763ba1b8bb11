//! Binary erasure CEO problem: `Y0` uniform on ±1 observed through `L`
//! independent erasure channels with erasure probability `p`.

use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::model::{build_full_joint, casebook, Casebook, DEFAULT_LAMBDA};
use crate::prob::{h2, Nats};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErasureParams {
    pub p: f64,
    pub encoders: usize,
    /// Target erasure rate, in `[p^L, 1]`.
    pub distortion: f64,
    /// Penalty for a wrong nonzero guess; only enters distortion tables.
    pub lambda: f64,
}

impl ErasureParams {
    pub fn new(p: f64, encoders: usize, distortion: f64) -> Result<Self> {
        Self::with_lambda(p, encoders, distortion, DEFAULT_LAMBDA)
    }

    pub fn with_lambda(p: f64, encoders: usize, distortion: f64, lambda: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParameter(format!("erasure probability {p} outside (0, 1)")));
        }
        if encoders == 0 {
            return Err(Error::InvalidParameter("at least one encoder is required".into()));
        }
        let floor = p.powi(encoders as i32);
        if !(distortion >= floor && distortion <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "distortion {distortion} outside [p^L, 1] = [{floor}, 1]"
            )));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("penalty {lambda} must be positive and finite")));
        }
        Ok(Self {
            p,
            encoders,
            distortion,
            lambda,
        })
    }

    /// `D^{1/L}`, clamped below at `p` to absorb rounding at `D = p^L`.
    fn per_encoder_erasure(&self) -> f64 {
        self.distortion.powf(1.0 / self.encoders as f64).max(self.p)
    }
}

/// `g(x) = h(x) - (1 - p) h((x - p)/(1 - p))` on `[p, 1]` and 0 beyond.
pub fn g_function(x: f64, p: f64) -> Result<Nats> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("erasure probability {p} outside (0, 1)")));
    }
    if x.is_nan() || x < p {
        return Err(Error::InvalidParameter(format!("g is defined on [p, inf); got x = {x} < p = {p}")));
    }
    Ok(Nats(g_unchecked(x, p)))
}

fn g_unchecked(x: f64, p: f64) -> f64 {
    if x >= 1.0 {
        0.0
    } else {
        h2(x) - (1.0 - p) * h2(((x - p) / (1.0 - p)).clamp(0.0, 1.0))
    }
}

/// Optimal sum rate `(1 - D) ln 2 + L g(D^{1/L})` in the limit of a large
/// wrong-guess penalty.
pub fn erasure_sum_rate(params: &ErasureParams) -> Nats {
    let l = params.encoders as f64;
    Nats((1.0 - params.distortion) * LN_2 + l * g_unchecked(params.per_encoder_erasure(), params.p))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    #[serde(rename = "D")]
    pub distortion: f64,
    #[serde(rename = "L")]
    pub encoders: usize,
    pub sum_rate_nats: f64,
}

/// Sum rate on an `points`-point uniform grid over `[p^L, 1]` for each `L`.
pub fn erasure_curve(p: f64, encoders: &[usize], points: usize) -> Result<Vec<CurvePoint>> {
    if points < 2 {
        return Err(Error::InvalidParameter("a curve needs at least two points".into()));
    }
    let mut out = Vec::with_capacity(points * encoders.len());
    for &l in encoders {
        let floor = ErasureParams::new(p, l, 1.0)?.p.powi(l as i32);
        for i in 0..points {
            let d = if i + 1 == points {
                1.0
            } else {
                floor + (1.0 - floor) * i as f64 / (points - 1) as f64
            };
            let params = ErasureParams::new(p, l, d)?;
            out.push(CurvePoint {
                distortion: d,
                encoders: l,
                sum_rate_nats: erasure_sum_rate(&params).0,
            });
        }
    }
    Ok(out)
}

/// CSV with columns `D,L,sum_rate_nats`.
pub fn curve_csv(points: &[CurvePoint]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for p in points {
        w.serialize(p).map_err(|e| Error::InvalidParameter(format!("csv: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidParameter(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Minimum of `(g(e^a) + g(e^b))/2` over `a, b` in `[ln p, 0]` subject to
/// `(e^{La} + e^{Lb})/2 <= D`.
///
/// Since `g` is nonincreasing the constraint is active, so the search runs
/// over `s = e^{La}` with `e^{Lb} = 2D - s`: a dense grid followed by a
/// golden-section refinement around the best grid cell.
pub fn noise_info_minimum(params: &ErasureParams) -> Nats {
    let (p, l, d) = (params.p, params.encoders as f64, params.distortion);
    if d >= 1.0 {
        return Nats::ZERO;
    }
    let floor = p.powf(l);
    let lo = floor.max(2.0 * d - 1.0);
    let hi = (2.0 * d - floor).min(1.0);
    let objective = |s: f64| {
        let a = s.max(floor).powf(1.0 / l).max(p);
        let b = (2.0 * d - s).max(floor).powf(1.0 / l).max(p);
        0.5 * (g_unchecked(a, p) + g_unchecked(b, p))
    };
    if hi <= lo {
        return Nats(objective(lo));
    }
    const GRID: usize = 2000;
    let step = (hi - lo) / GRID as f64;
    let (mut best_i, mut best) = (0, f64::INFINITY);
    for i in 0..=GRID {
        let v = objective(lo + step * i as f64);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let mut a = lo + step * best_i.saturating_sub(1) as f64;
    let mut b = (lo + step * (best_i + 1) as f64).min(hi);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut e = a + ratio * (b - a);
    let (mut fc, mut fe) = (objective(c), objective(e));
    for _ in 0..80 {
        if fc < fe {
            b = e;
            e = c;
            fe = fc;
            c = b - ratio * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + ratio * (b - a);
            fe = objective(e);
        }
    }
    Nats(best.min(fc).min(fe))
}

/// Worst observed violations of the monotonicity, convexity and calculus
/// inequalities for `g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeReport {
    /// Largest first difference of `g(e^x)` over `[ln p, 1]` (should be <= 1e-12).
    pub max_first_difference: f64,
    /// Smallest second difference (should be >= -1e-9).
    pub min_second_difference: f64,
    /// Smallest slack of `e^x ln(e^x - p) - x e^x <= -p` on `(ln p, 0]`.
    pub first_inequality_slack: f64,
    /// Smallest value of `e^x ln(e^x - p) - e^x (x + 1) + e^{2x}/(e^x - p)` on `(ln p, 0]`.
    pub second_inequality_slack: f64,
    pub pass: bool,
}

fn differences(values: &[f64]) -> (f64, f64) {
    let first = values.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    let second = values
        .windows(3)
        .map(|w| w[2] - 2.0 * w[1] + w[0])
        .fold(f64::INFINITY, f64::min);
    (first, second)
}

pub fn g_shape_report(p: f64, grid_size: usize) -> Result<ShapeReport> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("erasure probability {p} outside (0, 1)")));
    }
    if grid_size < 3 {
        return Err(Error::InvalidParameter("grid needs at least three points".into()));
    }
    let lo = p.ln();
    let step = (1.0 - lo) / (grid_size - 1) as f64;
    let xs: Vec<f64> = (0..grid_size).map(|i| lo + step * i as f64).collect();
    let values: Vec<f64> = xs.iter().map(|&x| g_unchecked(x.exp().max(p), p)).collect();
    let (max_first, min_second) = differences(&values);

    let (mut first_slack, mut second_slack) = (f64::INFINITY, f64::INFINITY);
    for &x in xs.iter().filter(|&&x| x > lo && x <= 0.0) {
        let ex = x.exp();
        let log_gap = (ex - p).ln();
        first_slack = first_slack.min(-p - (ex * log_gap - x * ex));
        second_slack = second_slack.min(ex * log_gap - ex * (x + 1.0) + ex * ex / (ex - p));
    }
    Ok(ShapeReport {
        max_first_difference: max_first,
        min_second_difference: min_second,
        first_inequality_slack: first_slack,
        second_inequality_slack: second_slack,
        pass: max_first <= 1e-12 && min_second >= -1e-9 && first_slack >= -1e-10 && second_slack >= -1e-10,
    })
}

/// `(max first difference, min second difference)` of `y -> g(y^{1/L})` on a
/// uniform grid over `[p^L, upper]`.
pub fn g_power_shape(p: f64, encoders: usize, upper: f64, grid_size: usize) -> Result<(f64, f64)> {
    if !(p > 0.0 && p < 1.0) || encoders == 0 || grid_size < 3 {
        return Err(Error::InvalidParameter("need p in (0,1), L >= 1 and at least three points".into()));
    }
    let l = encoders as f64;
    let lo = p.powf(l);
    if upper <= lo {
        return Err(Error::InvalidParameter(format!("upper end {upper} must exceed p^L = {lo}")));
    }
    let step = (upper - lo) / (grid_size - 1) as f64;
    let values: Vec<f64> = (0..grid_size)
        .map(|i| g_unchecked((lo + step * i as f64).powf(1.0 / l).max(p), p))
        .collect();
    Ok(differences(&values))
}

/// Mutual informations of the correlated-flag system on which the
/// Berger-Tung outer bound undercuts the optimal sum rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErasureCounterexample {
    /// `I(Y1,Y2; U1,U2)`.
    pub i_joint: f64,
    /// `I(Y1,Y2; U1 | U2)`.
    pub i_cond: f64,
    /// `Pr(Z1 = 0)`.
    pub distortion: f64,
}

pub fn erasure_bt_counterexample() -> Result<ErasureCounterexample> {
    let case = casebook(Casebook::AppendixC)?;
    let joint = build_full_joint(&case.model, None, &case.gamma)?;
    let y = ["Y1", "Y2"];
    Ok(ErasureCounterexample {
        i_joint: joint.mutual_information(&y, &["U1", "U2"])?.0,
        i_cond: joint.conditional_mutual_information(&y, &["U1"], &["U2"])?.0,
        // 1 - Pr(Z1 != 0) avoids the rounding tie in f64(0.2) + f64(0.4)
        distortion: 1.0 - joint.probability(&["Z1"], |d| d[0] != 1)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_endpoints() {
        for p in [0.1, 0.5, 0.9] {
            assert_eq!(g_function(1.0, p).unwrap().0, 0.0);
            assert_eq!(g_function(2.0, p).unwrap().0, 0.0);
            assert!((g_function(p, p).unwrap().0 - h2(p)).abs() < 1e-15);
        }
        assert!(g_function(0.4, 0.5).is_err());
    }

    #[test]
    fn g_at_root_point_six() {
        // 40-digit evaluation: 0.18951251257...
        let v = g_function(0.6f64.sqrt(), 0.5).unwrap().0;
        assert!((v - 0.189_512_512_57).abs() < 1e-10, "{v}");
    }

    #[test]
    fn sum_rate_endpoints() {
        let full = ErasureParams::new(0.5, 2, 1.0).unwrap();
        assert_eq!(erasure_sum_rate(&full).0, 0.0);
        let floor = ErasureParams::new(0.5, 2, 0.25).unwrap();
        assert!((erasure_sum_rate(&floor).0 - 2.75 * LN_2).abs() < 1e-12);
    }

    #[test]
    fn params_validation() {
        assert!(ErasureParams::new(0.5, 2, 0.2).is_err());
        assert!(ErasureParams::new(0.0, 2, 0.5).is_err());
        assert!(ErasureParams::new(0.5, 0, 0.5).is_err());
        assert!(ErasureParams::with_lambda(0.5, 2, 0.5, 0.0).is_err());
    }

    #[test]
    fn curve_csv_columns() {
        let pts = erasure_curve(0.5, &[1, 2], 3).unwrap();
        assert_eq!(pts.len(), 6);
        let csv = curve_csv(&pts).unwrap();
        assert!(csv.starts_with("D,L,sum_rate_nats\n0.5,1,"));
        assert!(csv.ends_with("1.0,2,0.0\n"));
    }

    #[test]
    fn converse_program_hits_symmetric_point() {
        let params = ErasureParams::new(0.5, 3, 0.5).unwrap();
        let expected = g_function(0.5f64.powf(1.0 / 3.0), 0.5).unwrap().0;
        assert!((noise_info_minimum(&params).0 - expected).abs() < 1e-6);
        assert_eq!(noise_info_minimum(&ErasureParams::new(0.5, 3, 1.0).unwrap()).0, 0.0);
    }

    #[test]
    fn correlated_flags_undercut_the_sum_rate() {
        let c = erasure_bt_counterexample().unwrap();
        assert_eq!(c.distortion, 0.6);
        assert!(c.i_joint > 0.6268 && c.i_joint <= 0.6273, "{}", c.i_joint);
        assert!(c.i_cond > 0.3243 && c.i_cond <= 0.3248, "{}", c.i_cond);
        let optimal = erasure_sum_rate(&ErasureParams::new(0.5, 2, 0.6).unwrap()).0;
        assert!(2.0 * c.i_cond < optimal);
    }

    #[test]
    fn shape_report_rejects_bad_input() {
        assert!(g_shape_report(0.5, 2).is_err());
        assert!(g_shape_report(1.5, 100).is_err());
    }
}
