//! Random small source models and auxiliary systems for integration tests.
#![allow(dead_code)]

use mtsc::model::{names, AuxSystem, DistortionMeasure, SourceModel};
use mtsc::{Channel, JointPmf, Variable};
use rand::Rng;

/// Random probability vector; some entries are forced to zero.
pub fn random_distribution(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n)
        .map(|_| if rng.random_bool(0.15) { 0.0 } else { rng.random::<f64>() })
        .collect();
    if v.iter().all(|x| *x == 0.0) {
        v[rng.random_range(0..n)] = 1.0;
    }
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= total);
    v
}

pub fn random_channel(rng: &mut impl Rng, inputs: Vec<Variable>, output: Variable) -> Channel {
    let size = output.size;
    Channel::from_fn(inputs, output, |_| random_distribution(rng, size)).unwrap()
}

/// Source where `Y1..YL` are conditionally independent given `(Y0, Y{L+1})`,
/// so that `X = Y0` is admissible.
pub fn random_source(rng: &mut impl Rng, encoders: usize) -> SourceModel {
    let hidden = rng.random_range(2..=3);
    let side = rng.random_range(1..=2);
    let obs: Vec<usize> = (0..encoders).map(|_| rng.random_range(2..=3)).collect();
    let p0 = random_distribution(rng, hidden);
    let ps: Vec<Vec<f64>> = (0..hidden).map(|_| random_distribution(rng, side)).collect();
    let pl: Vec<Vec<Vec<f64>>> = obs
        .iter()
        .map(|&n| (0..hidden * side).map(|_| random_distribution(rng, n)).collect())
        .collect();

    let mut vars = vec![Variable::new(names::HIDDEN, hidden)];
    for (l, &n) in obs.iter().enumerate() {
        vars.push(Variable::new(names::observation(l + 1), n));
    }
    vars.push(Variable::new(names::side_information(encoders), side));
    let sizes: Vec<usize> = vars.iter().map(|v| v.size).collect();
    let total: usize = sizes.iter().product();
    let mut probs = Vec::with_capacity(total);
    for flat in 0..total {
        let mut digits = vec![0; sizes.len()];
        let mut rest = flat;
        for (d, &n) in digits.iter_mut().zip(&sizes).rev() {
            *d = rest % n;
            rest /= n;
        }
        let (y0, s) = (digits[0], digits[encoders + 1]);
        let mut p = p0[y0] * ps[y0][s];
        for l in 0..encoders {
            p *= pl[l][y0 * side + s][digits[l + 1]];
        }
        probs.push(p);
    }
    let joint = JointPmf::new(vars, probs).unwrap();
    let table: Vec<f64> = (0..total * 2).map(|_| rng.random::<f64>()).collect();
    SourceModel::new(
        encoders,
        joint,
        vec![DistortionMeasure {
            reproduction_size: 2,
            table,
        }],
    )
    .unwrap()
}

/// Random system; with `shared_deterministic` the law of `W` is a point mass.
pub fn random_system(rng: &mut impl Rng, model: &SourceModel, shared_deterministic: bool) -> AuxSystem {
    let big_l = model.encoders();
    let w = rng.random_range(1..=2);
    let t = rng.random_range(1..=2);
    let wt_vars = vec![Variable::new(names::SHARED, w), Variable::new(names::TIME_SHARING, t)];
    let wt = if shared_deterministic {
        let fixed = rng.random_range(0..w);
        let pt = random_distribution(rng, t);
        let probs = (0..w * t)
            .map(|i| if i / t == fixed { pt[i % t] } else { 0.0 })
            .collect();
        JointPmf::new(wt_vars, probs).unwrap()
    } else {
        JointPmf::new(wt_vars, random_distribution(rng, w * t)).unwrap()
    };
    let mut aux = Vec::new();
    let encoders = (1..=big_l)
        .map(|l| {
            let u = rng.random_range(2..=3);
            aux.push(Variable::new(names::auxiliary(l), u));
            random_channel(
                rng,
                vec![
                    Variable::new(names::observation(l), model.observation_size(l)),
                    Variable::new(names::SHARED, w),
                    Variable::new(names::TIME_SHARING, t),
                ],
                Variable::new(names::auxiliary(l), u),
            )
        })
        .collect();
    let mut inputs = aux;
    inputs.push(Variable::new(names::side_information(big_l), model.side_information_size()));
    inputs.push(Variable::new(names::TIME_SHARING, t));
    let decoder = random_channel(rng, inputs, Variable::new(names::DECODER_OUTPUT, 2));
    AuxSystem::new(wt, encoders, decoder).unwrap()
}

/// All permutations of `1..=n`.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for pos in 0..=rest.len() {
            let mut p = rest.clone();
            p.insert(pos, n);
            out.push(p);
        }
    }
    out
}
