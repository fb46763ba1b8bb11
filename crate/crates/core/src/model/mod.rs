//! Source models, auxiliary systems and the Markov-structure checkers.

mod casebook;

pub use casebook::{casebook, erasure_source, CaseInstance, Casebook, DEFAULT_LAMBDA};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::{Channel, JointPmf, Variable};

/// Residual tolerance (nats) under which a Markov condition counts as satisfied.
pub const MARKOV_TOLERANCE: f64 = 1e-9;

pub mod names {
    //! Variable names used in every joint built by this crate.

    pub const HIDDEN: &str = "Y0";
    pub const SHARED: &str = "W";
    pub const TIME_SHARING: &str = "T";
    pub const DECODER_OUTPUT: &str = "Z";
    pub const X: &str = "X";

    pub fn observation(l: usize) -> String {
        format!("Y{l}")
    }

    pub fn side_information(encoders: usize) -> String {
        format!("Y{}", encoders + 1)
    }

    pub fn auxiliary(l: usize) -> String {
        format!("U{l}")
    }

    pub fn reproduction(k: usize) -> String {
        format!("Z{k}")
    }

    /// `Y0, Y1, .., YL, Y{L+1}`.
    pub fn sources(encoders: usize) -> Vec<String> {
        (0..=encoders + 1).map(|i| format!("Y{i}")).collect()
    }
}

fn as_strs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

/// Distortion table `d(y0, y1..yL, y_{L+1}, z)`, row-major with `z` fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionMeasure {
    pub reproduction_size: usize,
    pub table: Vec<f64>,
}

/// Joint law of `(Y0, Y1..YL, Y{L+1})` together with `K` distortion measures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSourceModel", into = "RawSourceModel")]
pub struct SourceModel {
    encoders: usize,
    joint: JointPmf,
    distortions: Vec<DistortionMeasure>,
}

#[derive(Serialize, Deserialize)]
struct RawSourceModel {
    encoders: usize,
    joint: JointPmf,
    distortions: Vec<DistortionMeasure>,
}

impl TryFrom<RawSourceModel> for SourceModel {
    type Error = Error;
    fn try_from(raw: RawSourceModel) -> Result<Self> {
        SourceModel::new(raw.encoders, raw.joint, raw.distortions)
    }
}

impl From<SourceModel> for RawSourceModel {
    fn from(m: SourceModel) -> Self {
        RawSourceModel {
            encoders: m.encoders,
            joint: m.joint,
            distortions: m.distortions,
        }
    }
}

impl SourceModel {
    pub fn new(encoders: usize, joint: JointPmf, distortions: Vec<DistortionMeasure>) -> Result<Self> {
        if encoders == 0 || encoders > 16 {
            return Err(Error::InvalidParameter(format!(
                "encoder count {encoders} outside 1..=16"
            )));
        }
        let expected = names::sources(encoders);
        let actual: Vec<&str> = joint.names().collect();
        if actual != as_strs(&expected) {
            return Err(Error::ShapeMismatch(format!(
                "source joint must list {:?} in order, found {:?}",
                expected, actual
            )));
        }
        let source_tuples = joint.probs().len();
        for (k, d) in distortions.iter().enumerate() {
            if d.reproduction_size == 0 || d.table.len() != source_tuples * d.reproduction_size {
                return Err(Error::ShapeMismatch(format!(
                    "distortion table {} has {} entries, expected {}",
                    k + 1,
                    d.table.len(),
                    source_tuples * d.reproduction_size
                )));
            }
            if let Some(v) = d.table.iter().find(|v| !v.is_finite() || **v < 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "distortion table {} has entry {v}; entries must be finite and nonnegative",
                    k + 1
                )));
            }
        }
        Ok(Self {
            encoders,
            joint,
            distortions,
        })
    }

    /// Builds a distortion table by evaluating `d(sources, z)`.
    pub fn tabulate(
        joint: &JointPmf,
        reproduction_size: usize,
        mut d: impl FnMut(&[usize], usize) -> f64,
    ) -> DistortionMeasure {
        let sizes: Vec<usize> = joint.variables().iter().map(|v| v.size).collect();
        let mut table = Vec::with_capacity(joint.probs().len() * reproduction_size);
        crate::prob::for_each_index(&sizes, |_, digits| {
            for z in 0..reproduction_size {
                table.push(d(digits, z));
            }
        });
        DistortionMeasure {
            reproduction_size,
            table,
        }
    }

    pub fn encoders(&self) -> usize {
        self.encoders
    }

    pub fn distortion_count(&self) -> usize {
        self.distortions.len()
    }

    pub fn joint(&self) -> &JointPmf {
        &self.joint
    }

    pub fn distortions(&self) -> &[DistortionMeasure] {
        &self.distortions
    }

    pub fn observation_size(&self, l: usize) -> usize {
        self.joint.variables()[l].size
    }

    pub fn side_information_size(&self) -> usize {
        self.joint.variables()[self.encoders + 1].size
    }

    pub fn source_names(&self) -> Vec<String> {
        names::sources(self.encoders)
    }

    /// Auxiliary alphabet size `|Y_l| + 2^L + K - 1` that suffices for the
    /// Berger-Tung inner bound; used to size optimizer search spaces.
    pub fn cardinality_bound(&self, l: usize) -> usize {
        self.observation_size(l) + (1 << self.encoders) + self.distortions.len() - 1
    }
}

/// Auxiliary system `(U1..UL, Z1..ZK, W, T)` given by its kernels.
///
/// Encoder `l` maps `(Yl, W, T)` to `Ul`; the decoder maps
/// `(U1..UL, Y{L+1}, T)` to the tuple `Z = (Z1..ZK)` encoded row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAuxSystem", into = "RawAuxSystem")]
pub struct AuxSystem {
    wt: JointPmf,
    encoders: Vec<Channel>,
    decoder: Channel,
}

#[derive(Serialize, Deserialize)]
struct RawAuxSystem {
    wt: JointPmf,
    encoders: Vec<Channel>,
    decoder: Channel,
}

impl TryFrom<RawAuxSystem> for AuxSystem {
    type Error = Error;
    fn try_from(raw: RawAuxSystem) -> Result<Self> {
        AuxSystem::new(raw.wt, raw.encoders, raw.decoder)
    }
}

impl From<AuxSystem> for RawAuxSystem {
    fn from(g: AuxSystem) -> Self {
        RawAuxSystem {
            wt: g.wt,
            encoders: g.encoders,
            decoder: g.decoder,
        }
    }
}

impl AuxSystem {
    pub fn new(wt: JointPmf, encoders: Vec<Channel>, decoder: Channel) -> Result<Self> {
        let wt_names: Vec<&str> = wt.names().collect();
        if wt_names != [names::SHARED, names::TIME_SHARING] {
            return Err(Error::ShapeMismatch(format!(
                "(W,T) law must list [W, T], found {wt_names:?}"
            )));
        }
        let w = wt.variables()[0].size;
        let t = wt.variables()[1].size;
        if encoders.is_empty() {
            return Err(Error::InvalidParameter("auxiliary system without encoders".into()));
        }
        for (i, enc) in encoders.iter().enumerate() {
            let l = i + 1;
            let inputs: Vec<(&str, usize)> = enc.inputs().iter().map(|v| (v.name.as_str(), v.size)).collect();
            let obs = names::observation(l);
            if inputs.len() != 3
                || inputs[0].0 != obs
                || inputs[1] != (names::SHARED, w)
                || inputs[2] != (names::TIME_SHARING, t)
                || enc.output().name != names::auxiliary(l)
            {
                return Err(Error::ShapeMismatch(format!(
                    "encoder {l} must map ({obs}, W[{w}], T[{t}]) to U{l}, found {inputs:?} -> {}",
                    enc.output().name
                )));
            }
        }
        let big_l = encoders.len();
        let mut expected: Vec<(String, usize)> = encoders
            .iter()
            .map(|e| (e.output().name.clone(), e.output().size))
            .collect();
        let side = decoder.inputs().get(big_l).map(|v| v.size).unwrap_or(0);
        expected.push((names::side_information(big_l), side));
        expected.push((names::TIME_SHARING.to_string(), t));
        let found: Vec<(String, usize)> = decoder.inputs().iter().map(|v| (v.name.clone(), v.size)).collect();
        if found != expected || decoder.output().name != names::DECODER_OUTPUT {
            return Err(Error::ShapeMismatch(format!(
                "decoder must map (U1..U{big_l}, Y{}, T) to Z, found {:?} -> {}",
                big_l + 1,
                found,
                decoder.output().name
            )));
        }
        Ok(Self { wt, encoders, decoder })
    }

    /// Law of `(W, T)` with both variables of size one.
    pub fn trivial_wt() -> JointPmf {
        JointPmf::point_mass(
            vec![Variable::new(names::SHARED, 1), Variable::new(names::TIME_SHARING, 1)],
            &[0, 0],
        )
        .expect("valid point mass")
    }

    pub fn wt(&self) -> &JointPmf {
        &self.wt
    }

    pub fn encoders(&self) -> &[Channel] {
        &self.encoders
    }

    pub fn decoder(&self) -> &Channel {
        &self.decoder
    }

    pub fn shared_size(&self) -> usize {
        self.wt.variables()[0].size
    }

    pub fn time_sharing_size(&self) -> usize {
        self.wt.variables()[1].size
    }

    pub fn auxiliary_size(&self, l: usize) -> usize {
        self.encoders[l - 1].output().size
    }

    /// True when `W` is almost surely constant.
    pub fn shared_is_deterministic(&self) -> bool {
        let w = self.wt.marginalize(&[names::SHARED]).expect("W present");
        w.probs().iter().filter(|&&p| p > 0.0).count() <= 1
    }

    fn check_against(&self, model: &SourceModel) -> Result<()> {
        let big_l = model.encoders();
        if self.encoders.len() != big_l {
            return Err(Error::ShapeMismatch(format!(
                "auxiliary system has {} encoders, model has {big_l}",
                self.encoders.len()
            )));
        }
        for (i, enc) in self.encoders.iter().enumerate() {
            if enc.inputs()[0].size != model.observation_size(i + 1) {
                return Err(Error::ShapeMismatch(format!(
                    "encoder {} reads an alphabet of size {}, Y{} has size {}",
                    i + 1,
                    enc.inputs()[0].size,
                    i + 1,
                    model.observation_size(i + 1)
                )));
            }
        }
        if self.decoder.inputs()[big_l].size != model.side_information_size() {
            return Err(Error::ShapeMismatch("decoder side-information alphabet mismatch".into()));
        }
        let z: usize = model.distortions().iter().map(|d| d.reproduction_size).product();
        if self.decoder.output().size != z {
            return Err(Error::ShapeMismatch(format!(
                "decoder output size {} does not match reproduction alphabets (product {z})",
                self.decoder.output().size
            )));
        }
        Ok(())
    }
}

/// Kernel attaching `X` to the sources `(Y0, Y1..YL, Y{L+1})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct XChannel {
    kernel: Channel,
}

impl XChannel {
    pub fn new(kernel: Channel) -> Result<Self> {
        let inputs: Vec<&str> = kernel.inputs().iter().map(|v| v.name.as_str()).collect();
        let big_l = inputs.len().saturating_sub(2);
        if inputs.len() < 3 || inputs != as_strs(&names::sources(big_l)) || kernel.output().name != names::X {
            return Err(Error::ShapeMismatch(format!(
                "X kernel must map (Y0..Y{{L+1}}) to X, found {inputs:?} -> {}",
                kernel.output().name
            )));
        }
        Ok(Self { kernel })
    }

    /// `X = f(y0, y1..yL, y_{L+1})` with `X` of the given alphabet size.
    pub fn deterministic(model: &SourceModel, size: usize, f: impl FnMut(&[usize]) -> usize) -> Result<Self> {
        let kernel = Channel::deterministic(model.joint().variables().to_vec(), Variable::new(names::X, size), f)?;
        Self::new(kernel)
    }

    /// `X = Y0`.
    pub fn hidden(model: &SourceModel) -> Result<Self> {
        let size = model.joint().variables()[0].size;
        Self::deterministic(model, size, |d| d[0])
    }

    /// `X = (Y1, .., YL)` encoded row-major.
    pub fn observations(model: &SourceModel) -> Result<Self> {
        Self::leading(model, model.encoders())
    }

    /// `X = (Y1, .., Y{L-1})`, which always lies in the class.
    pub fn leading_observations(model: &SourceModel) -> Result<Self> {
        Self::leading(model, model.encoders() - 1)
    }

    /// Constant `X`.
    pub fn constant(model: &SourceModel) -> Result<Self> {
        Self::deterministic(model, 1, |_| 0)
    }

    fn leading(model: &SourceModel, count: usize) -> Result<Self> {
        let sizes: Vec<usize> = (1..=count).map(|l| model.observation_size(l)).collect();
        let size = sizes.iter().product::<usize>().max(1);
        Self::deterministic(model, size, |d| {
            (1..=count).fold(0, |acc, l| acc * sizes[l - 1] + d[l])
        })
    }

    pub fn kernel(&self) -> &Channel {
        &self.kernel
    }

    fn check_against(&self, model: &SourceModel) -> Result<()> {
        if self.kernel.inputs() != model.joint().variables() {
            return Err(Error::ShapeMismatch("X kernel inputs do not match the source alphabets".into()));
        }
        Ok(())
    }
}

/// Joint of the sources, `W`, `T`, `U1..UL`, `Z1..ZK` and optionally `X`,
/// in that order. `X` is attached through the sources only (Markov coupling).
pub fn build_full_joint(model: &SourceModel, x: Option<&XChannel>, gamma: &AuxSystem) -> Result<JointPmf> {
    gamma.check_against(model)?;
    let mut joint = model.joint().product(gamma.wt())?;
    for enc in gamma.encoders() {
        joint = joint.extend(enc)?;
    }
    joint = joint.extend(gamma.decoder())?;
    let parts: Vec<Variable> = model
        .distortions()
        .iter()
        .enumerate()
        .map(|(k, d)| Variable::new(names::reproduction(k + 1), d.reproduction_size))
        .collect();
    if !parts.is_empty() {
        joint = joint.split_variable(names::DECODER_OUTPUT, &parts)?;
    }
    if let Some(x) = x {
        x.check_against(model)?;
        joint = joint.extend(x.kernel())?;
    }
    Ok(joint)
}

/// Family of auxiliary systems whose Markov structure is checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GammaClass {
    /// `(W,T)` independent of the sources, `U_l - (Y_l,W,T) - rest`, decoder reads `(U, Y_{L+1}, T)`.
    Outer,
    /// Berger-Tung inner: as `Outer` with `W` absorbed into `T`.
    BtInner,
    /// Berger-Tung outer: the long chain only excludes the other auxiliaries.
    BtOuter,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarkovCondition {
    pub label: String,
    pub residual: f64,
    pub pass: bool,
}

/// Conditional-mutual-information residuals of each Markov condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarkovReport {
    pub conditions: Vec<MarkovCondition>,
    pub tolerance: f64,
    pub pass: bool,
}

impl MarkovReport {
    fn from_residuals(items: Vec<(String, f64)>) -> Self {
        let conditions: Vec<MarkovCondition> = items
            .into_iter()
            .map(|(label, residual)| MarkovCondition {
                pass: residual <= MARKOV_TOLERANCE,
                label,
                residual,
            })
            .collect();
        let pass = conditions.iter().all(|c| c.pass);
        Self {
            conditions,
            tolerance: MARKOV_TOLERANCE,
            pass,
        }
    }

    pub fn max_residual(&self) -> f64 {
        self.conditions.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    /// `Err(MarkovViolation)` naming the worst failing condition.
    pub fn into_result(self) -> Result<Self> {
        match self
            .conditions
            .iter()
            .filter(|c| !c.pass)
            .max_by(|a, b| a.residual.total_cmp(&b.residual))
        {
            Some(c) => Err(Error::MarkovViolation {
                condition: c.label.clone(),
                residual: c.residual,
            }),
            None => Ok(self),
        }
    }
}

/// Checks the Markov conditions of `class` on a kernel-built system.
pub fn check_gamma_class(
    model: &SourceModel,
    x: Option<&XChannel>,
    gamma: &AuxSystem,
    class: GammaClass,
) -> Result<MarkovReport> {
    let joint = build_full_joint(model, x, gamma)?;
    check_joint_class(&joint, model.encoders(), model.distortion_count(), class)
}

/// Checks the Markov conditions of `class` on an arbitrary joint that uses
/// the crate's variable names (see [`names`]).
pub fn check_joint_class(joint: &JointPmf, encoders: usize, distortions: usize, class: GammaClass) -> Result<MarkovReport> {
    let sources = names::sources(encoders);
    let side = names::side_information(encoders);
    let aux: Vec<String> = (1..=encoders).map(names::auxiliary).collect();
    let zs: Vec<String> = (1..=distortions).map(names::reproduction).collect();
    let with_w = class == GammaClass::Outer;

    let mut items = Vec::new();

    let independent: Vec<&str> = if with_w {
        vec![names::SHARED, names::TIME_SHARING]
    } else {
        vec![names::TIME_SHARING]
    };
    let r = joint.mutual_information(&independent, &as_strs(&sources))?.0;
    let label = if with_w {
        "(i) (W,T) independent of sources"
    } else {
        "(i) T independent of sources"
    };
    items.push((label.to_string(), r));

    for l in 1..=encoders {
        let obs = names::observation(l);
        let mut given = vec![obs.as_str()];
        if with_w {
            given.push(names::SHARED);
        }
        given.push(names::TIME_SHARING);
        let mut rest: Vec<&str> = sources.iter().map(String::as_str).filter(|s| *s != obs).collect();
        if class != GammaClass::BtOuter {
            rest.extend(aux.iter().filter(|a| **a != names::auxiliary(l)).map(String::as_str));
        }
        let u = names::auxiliary(l);
        let r = joint.conditional_mutual_information(&[u.as_str()], &rest, &given)?.0;
        items.push((format!("(ii) U{l} - (Y{l}{}T) - rest", if with_w { ",W," } else { "," }), r));
    }

    if !zs.is_empty() {
        let mut upstream: Vec<&str> = sources[..=encoders].iter().map(String::as_str).collect();
        if with_w {
            upstream.push(names::SHARED);
        }
        let mut given: Vec<&str> = aux.iter().map(String::as_str).collect();
        given.push(side.as_str());
        given.push(names::TIME_SHARING);
        let r = joint.conditional_mutual_information(&upstream, &as_strs(&zs), &given)?.0;
        items.push(("(iii) sources - (U,Y_{L+1},T) - Z".to_string(), r));
    }

    Ok(MarkovReport::from_residuals(items))
}

/// Conditional independence of `Y1..YL` given `(X, Y{L+1})`.
pub fn check_chi(model: &SourceModel, x: &XChannel) -> Result<MarkovReport> {
    x.check_against(model)?;
    let joint = model.joint().extend(x.kernel())?;
    let big_l = model.encoders();
    let side = names::side_information(big_l);
    let given = [names::X, side.as_str()];
    let obs: Vec<String> = (1..=big_l).map(names::observation).collect();
    let mut residual = 0.0;
    for l in 2..=big_l {
        residual += joint
            .conditional_mutual_information(&[obs[l - 1].as_str()], &as_strs(&obs[..l - 1]), &given)?
            .0;
    }
    Ok(MarkovReport::from_residuals(vec![(
        "Y1..YL conditionally independent given (X, Y_{L+1})".to_string(),
        residual,
    )]))
}

/// `E[d_k(Y0, Y, Y_{L+1}, Z_k)]` on a joint produced by [`build_full_joint`]; `k` is 1-based.
pub fn expected_distortion_on(model: &SourceModel, joint: &JointPmf, k: usize) -> Result<f64> {
    if k == 0 || k > model.distortion_count() {
        return Err(Error::InvalidParameter(format!(
            "distortion index {k} outside 1..={}",
            model.distortion_count()
        )));
    }
    let mut vars = model.source_names();
    vars.push(names::reproduction(k));
    let marginal = joint.marginalize(&as_strs(&vars))?;
    let table = &model.distortions()[k - 1].table;
    Ok(marginal.probs().iter().zip(table).map(|(p, d)| p * d).sum())
}

/// `E[d_k]` under the system `gamma`; `k` is 1-based.
pub fn expected_distortion(model: &SourceModel, gamma: &AuxSystem, k: usize) -> Result<f64> {
    let joint = build_full_joint(model, None, gamma)?;
    expected_distortion_on(model, &joint, k)
}
