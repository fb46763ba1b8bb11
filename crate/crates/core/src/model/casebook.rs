//! Concrete instances: the four-bit coordinate-guessing problem, the
//! binary erasure CEO problem with its optimal test channels, and the
//! correlated-erasure system on which the Berger-Tung outer bound is loose.
//!
//! Symbol conventions for the erasure instances: `Y0` uses index 0 for −1 and
//! 1 for +1; `Y_l`, `U_l` and `Z1` use 0, 1, 2 for −1, 0, +1.

use serde::{Deserialize, Serialize};

use super::{names, AuxSystem, SourceModel, XChannel};
use crate::error::{Error, Result};
use crate::prob::{Channel, JointPmf, Variable};

/// Penalty for a wrong nonzero guess in the erasure distortion.
pub const DEFAULT_LAMBDA: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Casebook {
    /// Four i.i.d. bits, `W` uniform, `U_l = Y_{l,W}`, `Z1 = (U1, U2)`.
    Toy,
    /// Same test channels with the coin moved from `W` into `T`.
    ToyBtGamma,
    /// Erasure source with `p = 1/2`, `L = 2` and correlated transmit flags.
    AppendixC,
    Erasure { p: f64, encoders: usize, distortion: f64 },
}

/// Model, auxiliary system and (where one is natural) `X` of a casebook entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseInstance {
    pub model: SourceModel,
    pub gamma: AuxSystem,
    pub x: Option<XChannel>,
}

pub fn casebook(name: Casebook) -> Result<CaseInstance> {
    match name {
        Casebook::Toy => toy(true),
        Casebook::ToyBtGamma => toy(false),
        Casebook::AppendixC => appendix_c(),
        Casebook::Erasure { p, encoders, distortion } => erasure(p, encoders, distortion),
    }
}

fn ternary(i: usize) -> i32 {
    i as i32 - 1
}

fn ternary_index(v: i32) -> usize {
    (v.signum() + 1) as usize
}

fn toy_model() -> Result<SourceModel> {
    let vars = vec![
        Variable::new("Y0", 1),
        Variable::new("Y1", 4),
        Variable::new("Y2", 4),
        Variable::new("Y3", 1),
    ];
    let joint = JointPmf::uniform(vars)?;
    // Z1 = 2*z_a + z_b guesses (Y_{1c}, Y_{2c}) for some coordinate c
    let d = SourceModel::tabulate(&joint, 4, |s, z| {
        let (y1, y2) = (s[1], s[2]);
        let first = 2 * (y1 >> 1) + (y2 >> 1);
        let second = 2 * (y1 & 1) + (y2 & 1);
        if z == first || z == second {
            0.0
        } else {
            1.0
        }
    });
    SourceModel::new(2, joint, vec![d])
}

fn toy(shared: bool) -> Result<CaseInstance> {
    let model = toy_model()?;
    let (w, t) = if shared { (2, 1) } else { (1, 2) };
    let wt = JointPmf::uniform(vec![Variable::new(names::SHARED, w), Variable::new(names::TIME_SHARING, t)])?;
    let encoders = (1..=2)
        .map(|l| {
            Channel::deterministic(
                vec![
                    Variable::new(names::observation(l), 4),
                    Variable::new(names::SHARED, w),
                    Variable::new(names::TIME_SHARING, t),
                ],
                Variable::new(names::auxiliary(l), 2),
                |d| {
                    let coin = d[1] + d[2];
                    if coin == 0 {
                        d[0] >> 1
                    } else {
                        d[0] & 1
                    }
                },
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let decoder = Channel::deterministic(
        vec![
            Variable::new("U1", 2),
            Variable::new("U2", 2),
            Variable::new("Y3", 1),
            Variable::new(names::TIME_SHARING, t),
        ],
        Variable::new(names::DECODER_OUTPUT, 4),
        |d| 2 * d[0] + d[1],
    )?;
    let gamma = AuxSystem::new(wt, encoders, decoder)?;
    let x = XChannel::constant(&model)?;
    Ok(CaseInstance {
        model,
        gamma,
        x: Some(x),
    })
}

/// Binary erasure CEO source: `Y0` uniform on ±1, `Y_l = N_l·Y0` with
/// `Pr(N_l = 0) = p`, no side information, and the distortion
/// `d(y0, z) = 0` if `z = y0`, `1` if `z = 0`, `lambda` otherwise.
pub fn erasure_source(p: f64, encoders: usize, lambda: f64) -> Result<SourceModel> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("erasure probability {p} outside (0, 1)")));
    }
    if encoders == 0 || encoders > 12 {
        return Err(Error::InvalidParameter(format!("encoder count {encoders} outside 1..=12")));
    }
    if !(lambda.is_finite() && lambda >= 1.0) {
        return Err(Error::InvalidParameter(format!("penalty {lambda} must be finite and at least 1")));
    }
    let mut vars = vec![Variable::new(names::HIDDEN, 2)];
    vars.extend((1..=encoders).map(|l| Variable::new(names::observation(l), 3)));
    vars.push(Variable::new(names::side_information(encoders), 1));
    let mut joint = JointPmf::uniform(vec![Variable::new(names::HIDDEN, 2)])?;
    for l in 1..=encoders {
        let channel = Channel::from_fn(
            vec![Variable::new(names::HIDDEN, 2)],
            Variable::new(names::observation(l), 3),
            |d| {
                let mut row = vec![0.0; 3];
                row[1] = p;
                row[if d[0] == 0 { 0 } else { 2 }] = 1.0 - p;
                row
            },
        )?;
        joint = joint.extend(&channel)?;
    }
    let side = Channel::deterministic(
        vec![Variable::new(names::HIDDEN, 2)],
        Variable::new(names::side_information(encoders), 1),
        |_| 0,
    )?;
    joint = joint.extend(&side)?;
    let d = SourceModel::tabulate(&joint, 3, |s, z| {
        let y0 = 2 * s[0] as i32 - 1;
        match ternary(z) {
            0 => 1.0,
            v if v == y0 => 0.0,
            _ => lambda,
        }
    });
    SourceModel::new(encoders, joint, vec![d])
}

/// Encoder `U = Y·Ñ` erasing each nonzero observation with probability `erase`.
fn erasure_encoder(l: usize, w: usize, erase: impl Fn(usize) -> f64) -> Result<Channel> {
    Channel::from_fn(
        vec![
            Variable::new(names::observation(l), 3),
            Variable::new(names::SHARED, w),
            Variable::new(names::TIME_SHARING, 1),
        ],
        Variable::new(names::auxiliary(l), 3),
        |d| {
            let mut row = vec![0.0; 3];
            if d[0] == 1 {
                row[1] = 1.0;
            } else {
                let q = erase(d[1]);
                row[1] = q;
                row[d[0]] = 1.0 - q;
            }
            row
        },
    )
}

fn sign_decoder(encoders: usize) -> Result<Channel> {
    let mut inputs: Vec<Variable> = (1..=encoders).map(|l| Variable::new(names::auxiliary(l), 3)).collect();
    inputs.push(Variable::new(names::side_information(encoders), 1));
    inputs.push(Variable::new(names::TIME_SHARING, 1));
    Channel::deterministic(inputs, Variable::new(names::DECODER_OUTPUT, 3), |d| {
        ternary_index(d[..encoders].iter().map(|&u| ternary(u)).sum())
    })
}

fn erasure(p: f64, encoders: usize, distortion: f64) -> Result<CaseInstance> {
    let model = erasure_source(p, encoders, DEFAULT_LAMBDA)?;
    let floor = p.powi(encoders as i32);
    if !(distortion >= floor && distortion <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "distortion {distortion} outside [p^L, 1] = [{floor}, 1]"
        )));
    }
    let erase = ((distortion.powf(1.0 / encoders as f64) - p) / (1.0 - p)).clamp(0.0, 1.0);
    let encs = (1..=encoders)
        .map(|l| erasure_encoder(l, 1, |_| erase))
        .collect::<Result<Vec<_>>>()?;
    let gamma = AuxSystem::new(AuxSystem::trivial_wt(), encs, sign_decoder(encoders)?)?;
    let x = XChannel::hidden(&model)?;
    Ok(CaseInstance {
        model,
        gamma,
        x: Some(x),
    })
}

fn appendix_c() -> Result<CaseInstance> {
    let model = erasure_source(0.5, 2, DEFAULT_LAMBDA)?;
    // W = 2*W1 + W2; encoder l transmits when its flag is 1
    let wt = JointPmf::new(
        vec![Variable::new(names::SHARED, 4), Variable::new(names::TIME_SHARING, 1)],
        vec![0.2, 0.4, 0.4, 0.0],
    )?;
    let e1 = erasure_encoder(1, 4, |w| if w >> 1 == 1 { 0.0 } else { 1.0 })?;
    let e2 = erasure_encoder(2, 4, |w| if w & 1 == 1 { 0.0 } else { 1.0 })?;
    let gamma = AuxSystem::new(wt, vec![e1, e2], sign_decoder(2)?)?;
    let x = XChannel::hidden(&model)?;
    Ok(CaseInstance {
        model,
        gamma,
        x: Some(x),
    })
}
