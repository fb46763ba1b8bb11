//! Rate-region constraint sets: Berger-Tung inner and outer bounds, the
//! outer bound built from a conditioning variable `X`, Slepian-Wolf and
//! Berger-Yeung bounds, contrapolymatroid vertices and a heuristic
//! optimizer for the inner-bound sum rate.
//!
//! Subsets of encoders are bitmasks: bit `l - 1` stands for encoder `l`.
//! The representation allows up to 16 encoders; evaluation cost grows as
//! `2^L` joint computations, so in practice `L <= 5`.

mod optimizer;

pub use optimizer::{optimize_bt_inner_sum_rate, OptimizerConfig, OptimizerOutcome, OptimizedSystem};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{
    build_full_joint, check_chi, check_gamma_class, check_joint_class, expected_distortion_on, names, AuxSystem,
    GammaClass, SourceModel, XChannel,
};
use crate::prob::JointPmf;

/// Tolerance used when testing supermodularity of a bound set function.
pub const SUPERMODULAR_TOLERANCE: f64 = 1e-12;

/// A set of encoders stored as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct EncoderSet(u32);

impl EncoderSet {
    pub const EMPTY: EncoderSet = EncoderSet(0);

    pub fn from_bits(bits: u32) -> Self {
        Self(bits)
    }

    /// Set of the given 1-based encoder numbers.
    pub fn from_members(members: &[usize]) -> Result<Self> {
        let mut bits = 0u32;
        for &l in members {
            if l == 0 || l > 16 {
                return Err(Error::InvalidParameter(format!("encoder number {l} outside 1..=16")));
            }
            bits |= 1 << (l - 1);
        }
        Ok(Self(bits))
    }

    pub fn full(encoders: usize) -> Self {
        Self(((1u64 << encoders) - 1) as u32)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn contains(self, l: usize) -> bool {
        l >= 1 && self.0 >> (l - 1) & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn complement(self, encoders: usize) -> Self {
        Self(Self::full(encoders).0 & !self.0)
    }

    pub fn union(self, other: Self) -> Self {
        Self(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        Self(self.0 & other.0)
    }

    pub fn with(self, l: usize) -> Self {
        Self(self.0 | 1 << (l - 1))
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// 1-based encoder numbers in increasing order.
    pub fn members(self) -> Vec<usize> {
        (1..=32).filter(|&l| self.contains(l)).collect()
    }

    /// All nonempty subsets of `{1..L}` in increasing bitmask order.
    pub fn nonempty(encoders: usize) -> impl Iterator<Item = EncoderSet> {
        (1..=Self::full(encoders).0).map(EncoderSet)
    }

    /// Binary literal padded to `encoders` digits, e.g. `0b011`.
    pub fn to_literal(self, encoders: usize) -> String {
        format!("0b{:0width$b}", self.0, width = encoders.max(1))
    }
}

impl fmt::Display for EncoderSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0b{:b}", self.0)
    }
}

impl FromStr for EncoderSet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let digits = s
            .strip_prefix("0b")
            .ok_or_else(|| Error::InvalidParameter(format!("subset `{s}` must be a 0b literal")))?;
        u32::from_str_radix(digits, 2)
            .map(EncoderSet)
            .map_err(|_| Error::InvalidParameter(format!("subset `{s}` is not a binary literal")))
    }
}

/// Lower bounds on `sum_{l in A} R_l` for every nonempty `A`, plus the
/// expected distortions of the system they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionConstraints {
    encoders: usize,
    bounds: Vec<f64>,
    distortions: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct SubsetBound {
    #[serde(rename = "A")]
    subset: String,
    bound_nats: f64,
}

#[derive(Serialize, Deserialize)]
struct RawConstraints {
    encoders: usize,
    bounds: Vec<SubsetBound>,
    distortions: Vec<f64>,
}

impl Serialize for RegionConstraints {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawConstraints {
            encoders: self.encoders,
            bounds: EncoderSet::nonempty(self.encoders)
                .map(|a| SubsetBound {
                    subset: a.to_literal(self.encoders),
                    bound_nats: self.bound(a),
                })
                .collect(),
            distortions: self.distortions.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RegionConstraints {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawConstraints::deserialize(d)?;
        let mut bounds = vec![f64::NAN; 1 << raw.encoders];
        bounds[0] = 0.0;
        for b in raw.bounds {
            let a: EncoderSet = b.subset.parse().map_err(D::Error::custom)?;
            if a.is_empty() || !a.is_subset_of(EncoderSet::full(raw.encoders)) {
                return Err(D::Error::custom(format!("subset {} out of range", b.subset)));
            }
            bounds[a.bits() as usize] = b.bound_nats;
        }
        RegionConstraints::new(raw.encoders, bounds, raw.distortions).map_err(D::Error::custom)
    }
}

impl RegionConstraints {
    /// `bounds` is indexed by bitmask; entry 0 (the empty set) must be 0.
    pub fn new(encoders: usize, bounds: Vec<f64>, distortions: Vec<f64>) -> Result<Self> {
        if encoders == 0 || encoders > 16 {
            return Err(Error::InvalidParameter(format!("encoder count {encoders} outside 1..=16")));
        }
        if bounds.len() != 1 << encoders {
            return Err(Error::ShapeMismatch(format!(
                "{} bounds given, expected {}",
                bounds.len(),
                1usize << encoders
            )));
        }
        if bounds[0] != 0.0 {
            return Err(Error::InvalidParameter("the empty-set bound must be 0".into()));
        }
        if let Some((i, v)) = bounds.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "bound for {} is {v}; bounds must be finite and nonnegative",
                EncoderSet(i as u32).to_literal(encoders)
            )));
        }
        Ok(Self {
            encoders,
            bounds,
            distortions,
        })
    }

    pub fn encoders(&self) -> usize {
        self.encoders
    }

    pub fn bound(&self, a: EncoderSet) -> f64 {
        self.bounds[a.bits() as usize]
    }

    pub fn distortions(&self) -> &[f64] {
        &self.distortions
    }

    /// Bound on the sum of all rates.
    pub fn sum_rate(&self) -> f64 {
        self.bound(EncoderSet::full(self.encoders))
    }

    /// Smallest slack `sum_{l in A} R_l - bound(A)` over nonempty `A`.
    pub fn min_slack(&self, rates: &[f64]) -> Result<f64> {
        if rates.len() != self.encoders {
            return Err(Error::ShapeMismatch(format!(
                "{} rates for {} encoders",
                rates.len(),
                self.encoders
            )));
        }
        Ok(EncoderSet::nonempty(self.encoders)
            .map(|a| a.members().iter().map(|&l| rates[l - 1]).sum::<f64>() - self.bound(a))
            .fold(f64::INFINITY, f64::min))
    }

    /// Checks `f(A u B) + f(A n B) >= f(A) + f(B)` for every pair.
    pub fn check_supermodular(&self, tolerance: f64) -> Result<()> {
        let n = 1u32 << self.encoders;
        for a in 0..n {
            for b in (a + 1)..n {
                let (sa, sb) = (EncoderSet(a), EncoderSet(b));
                let gap = self.bound(sa.union(sb)) + self.bound(sa.intersection(sb)) - self.bound(sa) - self.bound(sb);
                if gap < -tolerance {
                    return Err(Error::NotSupermodular {
                        a: sa.to_literal(self.encoders),
                        b: sb.to_literal(self.encoders),
                        gap,
                    });
                }
            }
        }
        Ok(())
    }

    /// CSV with columns `subset,bound`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::InvalidParameter(format!("csv: {e}"));
        w.write_record(["subset", "bound"]).map_err(io)?;
        for a in EncoderSet::nonempty(self.encoders) {
            w.write_record([a.to_literal(self.encoders), format!("{}", self.bound(a))])
                .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidParameter(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Rates in nats per source symbol and the distortions they are paired with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub rates: Vec<f64>,
    pub distortions: Vec<f64>,
}

fn strs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

fn observation_names(a: EncoderSet) -> Vec<String> {
    a.members().into_iter().map(names::observation).collect()
}

fn auxiliary_names(a: EncoderSet) -> Vec<String> {
    a.members().into_iter().map(names::auxiliary).collect()
}

fn distortions_on(model: &SourceModel, joint: &JointPmf) -> Result<Vec<f64>> {
    (1..=model.distortion_count())
        .map(|k| expected_distortion_on(model, joint, k))
        .collect()
}

/// Fills bounds by evaluating `f(A)` for every nonempty `A`.
fn collect_bounds(encoders: usize, mut f: impl FnMut(EncoderSet) -> Result<f64>) -> Result<Vec<f64>> {
    let mut bounds = vec![0.0; 1 << encoders];
    for a in EncoderSet::nonempty(encoders) {
        bounds[a.bits() as usize] = f(a)?.max(0.0);
    }
    Ok(bounds)
}

/// `I(Y_S; U_A | U_{A^c}, Y_{L+1}, T)` on a joint, where `S` is either `A`
/// or all encoders.
fn bt_bound(joint: &JointPmf, encoders: usize, a: EncoderSet, full_observations: bool) -> Result<f64> {
    let side = names::side_information(encoders);
    let sources = if full_observations {
        observation_names(EncoderSet::full(encoders))
    } else {
        observation_names(a)
    };
    let mut given = auxiliary_names(a.complement(encoders));
    given.push(side);
    given.push(names::TIME_SHARING.to_string());
    Ok(joint
        .conditional_mutual_information(&strs(&sources), &strs(&auxiliary_names(a)), &strs(&given))?
        .0)
}

/// Berger-Tung inner bound: `sum_{l in A} R_l >= I(Y_A; U_A | U_{A^c}, Y_{L+1}, T)`.
pub fn bt_inner_constraints(model: &SourceModel, gamma: &AuxSystem) -> Result<RegionConstraints> {
    let joint = build_full_joint(model, None, gamma)?;
    let big_l = model.encoders();
    check_joint_class(&joint, big_l, model.distortion_count(), GammaClass::BtInner)?.into_result()?;
    let bounds = collect_bounds(big_l, |a| bt_bound(&joint, big_l, a, false))?;
    RegionConstraints::new(big_l, bounds, distortions_on(model, &joint)?)
}

/// Berger-Tung outer bound: `sum_{l in A} R_l >= I(Y; U_A | U_{A^c}, Y_{L+1}, T)`.
pub fn bt_outer_constraints(model: &SourceModel, gamma: &AuxSystem) -> Result<RegionConstraints> {
    let joint = build_full_joint(model, None, gamma)?;
    let big_l = model.encoders();
    check_joint_class(&joint, big_l, model.distortion_count(), GammaClass::BtOuter)?.into_result()?;
    let bounds = collect_bounds(big_l, |a| bt_bound(&joint, big_l, a, true))?;
    RegionConstraints::new(big_l, bounds, distortions_on(model, &joint)?)
}

/// Outer bound from `X`: `I(X; U_A | U_{A^c}, Y_{L+1}, T) + sum_{l in A} I(Y_l; U_l | X, Y_{L+1}, W, T)`.
pub fn new_outer_constraints(model: &SourceModel, x: &XChannel, gamma: &AuxSystem) -> Result<RegionConstraints> {
    check_chi(model, x)?.into_result()?;
    check_gamma_class(model, None, gamma, GammaClass::Outer)?.into_result()?;
    let joint = build_full_joint(model, Some(x), gamma)?;
    let big_l = model.encoders();
    let side = names::side_information(big_l);
    let noise: Vec<f64> = (1..=big_l)
        .map(|l| {
            let given = [names::X, side.as_str(), names::SHARED, names::TIME_SHARING];
            joint
                .conditional_mutual_information(&[names::observation(l).as_str()], &[names::auxiliary(l).as_str()], &given)
                .map(|n| n.0)
        })
        .collect::<Result<_>>()?;
    let bounds = collect_bounds(big_l, |a| {
        let mut given = auxiliary_names(a.complement(big_l));
        given.push(side.clone());
        given.push(names::TIME_SHARING.to_string());
        let common = joint
            .conditional_mutual_information(&[names::X], &strs(&auxiliary_names(a)), &strs(&given))?
            .0;
        Ok(common + a.members().iter().map(|&l| noise[l - 1]).sum::<f64>())
    })?;
    RegionConstraints::new(big_l, bounds, distortions_on(model, &joint)?)
}

/// Greedy vertex for the order `order` (1-based encoder numbers):
/// `R_{order[k]} = f(S_k) - f(S_{k-1})` with `S_k` the first `k` entries.
pub fn contrapolymatroid_vertex(constraints: &RegionConstraints, order: &[usize]) -> Result<RatePoint> {
    let big_l = constraints.encoders();
    let mut seen = EncoderSet::EMPTY;
    for &l in order {
        if l == 0 || l > big_l || seen.contains(l) {
            return Err(Error::InvalidParameter(format!("{order:?} is not a permutation of 1..={big_l}")));
        }
        seen = seen.with(l);
    }
    if order.len() != big_l {
        return Err(Error::InvalidParameter(format!("{order:?} is not a permutation of 1..={big_l}")));
    }
    constraints.check_supermodular(SUPERMODULAR_TOLERANCE)?;
    let mut rates = vec![0.0; big_l];
    let mut prefix = EncoderSet::EMPTY;
    for &l in order {
        let next = prefix.with(l);
        rates[l - 1] = (constraints.bound(next) - constraints.bound(prefix)).max(0.0);
        prefix = next;
    }
    Ok(RatePoint {
        rates,
        distortions: constraints.distortions().to_vec(),
    })
}

/// Lossless region: `sum_{l in A} R_l >= H(Y_A | Y_{A^c})`, side information excluded.
pub fn slepian_wolf_bounds(model: &SourceModel) -> Result<RegionConstraints> {
    let big_l = model.encoders();
    let joint = model.joint();
    let bounds = collect_bounds(big_l, |a| {
        let rest = observation_names(a.complement(big_l));
        Ok(joint
            .conditional_entropy(&strs(&observation_names(a)), &strs(&rest))?
            .0)
    })?;
    RegionConstraints::new(big_l, bounds, Vec::new())
}

/// Berger-Yeung bounds for two encoders where `Y1` determines and is
/// determined by `Y0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BergerYeungBounds {
    pub r1_min: f64,
    pub r2_min: f64,
    pub sum_min: f64,
}

pub fn berger_yeung_bounds(model: &SourceModel, gamma: &AuxSystem) -> Result<BergerYeungBounds> {
    const EXACT: f64 = 1e-12;
    if model.encoders() != 2 {
        return Err(Error::InvalidParameter("Berger-Yeung bounds need exactly two encoders".into()));
    }
    let src = model.joint();
    let loose = src.conditional_entropy(&["Y0"], &["Y1"])?.0.max(src.conditional_entropy(&["Y1"], &["Y0"])?.0);
    if loose > EXACT {
        return Err(Error::InvalidParameter(format!(
            "Y1 is not a relabelling of Y0 (residual entropy {loose:.3e})"
        )));
    }
    let joint = build_full_joint(model, None, gamma)?;
    check_joint_class(&joint, 2, model.distortion_count(), GammaClass::BtInner)?.into_result()?;
    let r1 = joint.conditional_entropy(&["Y1"], &["U2", "T"])?.0;
    let r2 = joint.conditional_mutual_information(&["Y2"], &["U2"], &["Y1", "T"])?.0;
    let h1 = joint.entropy(&["Y1"])?.0;
    Ok(BergerYeungBounds {
        r1_min: r1,
        r2_min: r2,
        sum_min: h1 + r2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{casebook, Casebook, DistortionMeasure};
    use crate::prob::{Channel, Variable};
    use std::f64::consts::LN_2;

    #[test]
    fn encoder_set_literals() {
        let a = EncoderSet::from_members(&[1, 2]).unwrap();
        assert_eq!(a.to_literal(3), "0b011");
        assert_eq!("0b011".parse::<EncoderSet>().unwrap(), a);
        assert_eq!(a.complement(3).members(), vec![3]);
        assert_eq!(EncoderSet::nonempty(2).count(), 3);
        assert!("011".parse::<EncoderSet>().is_err());
    }

    #[test]
    fn constraints_json_layout() {
        let c = RegionConstraints::new(2, vec![0.0, 0.5, 0.25, 1.0], vec![0.1]).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(
            s,
            r#"{"encoders":2,"bounds":[{"A":"0b01","bound_nats":0.5},{"A":"0b10","bound_nats":0.25},{"A":"0b11","bound_nats":1.0}],"distortions":[0.1]}"#
        );
        assert_eq!(serde_json::from_str::<RegionConstraints>(&s).unwrap(), c);
        assert_eq!(c.to_csv().unwrap(), "subset,bound\n0b01,0.5\n0b10,0.25\n0b11,1\n");
    }

    #[test]
    fn rejects_negative_bounds() {
        assert!(RegionConstraints::new(1, vec![0.0, -1.0], vec![]).is_err());
        assert!(RegionConstraints::new(1, vec![0.0], vec![]).is_err());
    }

    #[test]
    fn vertex_order_matches_chain_rule() {
        let c = RegionConstraints::new(2, vec![0.0, 0.5, 0.25, 1.0], vec![]).unwrap();
        // f({1}) is the bound on R1 given the other auxiliary, so it is taken first
        assert_eq!(contrapolymatroid_vertex(&c, &[1, 2]).unwrap().rates, vec![0.5, 0.5]);
        assert_eq!(contrapolymatroid_vertex(&c, &[2, 1]).unwrap().rates, vec![0.75, 0.25]);
        assert!(contrapolymatroid_vertex(&c, &[1, 1]).is_err());
        let bad = RegionConstraints::new(2, vec![0.0, 0.7, 0.7, 1.0], vec![]).unwrap();
        assert!(matches!(
            contrapolymatroid_vertex(&bad, &[1, 2]),
            Err(Error::NotSupermodular { .. })
        ));
        let single = RegionConstraints::new(1, vec![0.0, 0.3], vec![]).unwrap();
        assert_eq!(contrapolymatroid_vertex(&single, &[1]).unwrap().rates, vec![0.3]);
    }

    #[test]
    fn toy_bounds() {
        let toy = casebook(Casebook::Toy).unwrap();
        let outer = bt_outer_constraints(&toy.model, &toy.gamma).unwrap();
        let a1 = EncoderSet::from_members(&[1]).unwrap();
        let a2 = EncoderSet::from_members(&[2]).unwrap();
        assert!((outer.sum_rate() - 1.25 * LN_2).abs() < 1e-12);
        assert!((outer.bound(a1) - 0.75 * LN_2).abs() < 1e-12);
        assert!((outer.bound(a2) - 0.75 * LN_2).abs() < 1e-12);
        assert_eq!(outer.distortions(), &[0.0]);
        // the shared coin breaks the inner-bound chain
        assert!(matches!(
            bt_inner_constraints(&toy.model, &toy.gamma),
            Err(Error::MarkovViolation { .. })
        ));

        let folded = casebook(Casebook::ToyBtGamma).unwrap();
        let inner = bt_inner_constraints(&folded.model, &folded.gamma).unwrap();
        assert!((inner.bound(a1) - LN_2).abs() < 1e-12);
        assert!((inner.sum_rate() - 2.0 * LN_2).abs() < 1e-12);
    }

    #[test]
    fn appendix_c_bounds() {
        let c = casebook(Casebook::AppendixC).unwrap();
        let outer = bt_outer_constraints(&c.model, &c.gamma).unwrap();
        let a1 = EncoderSet::from_members(&[1]).unwrap();
        assert!(outer.sum_rate() > 0.6268 && outer.sum_rate() <= 0.6273, "{}", outer.sum_rate());
        assert!(outer.bound(a1) > 0.3243 && outer.bound(a1) <= 0.3248, "{}", outer.bound(a1));
        assert!((outer.distortions()[0] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn erasure_new_outer_full_set() {
        let e = casebook(Casebook::Erasure { p: 0.5, encoders: 2, distortion: 0.6 }).unwrap();
        let x = e.x.as_ref().unwrap();
        let outer = new_outer_constraints(&e.model, x, &e.gamma).unwrap();
        // 40-digit evaluation of (1 - D) ln 2 + 2 g(sqrt D)
        assert!((outer.sum_rate() - 0.656_283_897_37).abs() < 1e-9, "{}", outer.sum_rate());
        let inner = bt_inner_constraints(&e.model, &e.gamma).unwrap();
        for a in EncoderSet::nonempty(2) {
            assert!((outer.bound(a) - inner.bound(a)).abs() < 1e-10);
        }
        for order in [[1, 2], [2, 1]] {
            let v = contrapolymatroid_vertex(&inner, &order).unwrap();
            assert!((v.rates.iter().sum::<f64>() - inner.sum_rate()).abs() < 1e-10);
            assert!(inner.min_slack(&v.rates).unwrap() >= -1e-10);
        }
    }

    fn constant_gamma(model: &SourceModel) -> AuxSystem {
        let big_l = model.encoders();
        let encs = (1..=big_l)
            .map(|l| {
                Channel::deterministic(
                    vec![
                        Variable::new(names::observation(l), model.observation_size(l)),
                        Variable::new("W", 1),
                        Variable::new("T", 1),
                    ],
                    Variable::new(names::auxiliary(l), 1),
                    |_| 0,
                )
                .unwrap()
            })
            .collect();
        let mut inputs: Vec<Variable> = (1..=big_l).map(|l| Variable::new(names::auxiliary(l), 1)).collect();
        inputs.push(Variable::new(names::side_information(big_l), model.side_information_size()));
        inputs.push(Variable::new("T", 1));
        let z: usize = model.distortions().iter().map(|d| d.reproduction_size).product();
        let dec = Channel::deterministic(inputs, Variable::new("Z", z), |_| 0).unwrap();
        AuxSystem::new(AuxSystem::trivial_wt(), encs, dec).unwrap()
    }

    #[test]
    fn constant_auxiliaries_give_zero_bounds() {
        let e = casebook(Casebook::Erasure { p: 0.3, encoders: 3, distortion: 0.5 }).unwrap();
        let gamma = constant_gamma(&e.model);
        for c in [
            bt_inner_constraints(&e.model, &gamma).unwrap(),
            bt_outer_constraints(&e.model, &gamma).unwrap(),
            new_outer_constraints(&e.model, e.x.as_ref().unwrap(), &gamma).unwrap(),
        ] {
            assert!(EncoderSet::nonempty(3).all(|a| c.bound(a) == 0.0));
        }
    }

    fn binary_pair(probs: [f64; 4]) -> SourceModel {
        let vars = vec![
            Variable::new("Y0", 1),
            Variable::new("Y1", 2),
            Variable::new("Y2", 2),
            Variable::new("Y3", 1),
        ];
        let joint = JointPmf::new(vars, probs.to_vec()).unwrap();
        SourceModel::new(2, joint, vec![]).unwrap()
    }

    #[test]
    fn slepian_wolf_examples() {
        let a1 = EncoderSet::from_members(&[1]).unwrap();
        let sw = slepian_wolf_bounds(&binary_pair([0.25; 4])).unwrap();
        assert!((sw.bound(a1) - LN_2).abs() < 1e-15);
        assert!((sw.sum_rate() - 2.0 * LN_2).abs() < 1e-15);
        let copy = slepian_wolf_bounds(&binary_pair([0.5, 0.0, 0.0, 0.5])).unwrap();
        assert_eq!(copy.bound(a1), 0.0);
        assert!((copy.sum_rate() - LN_2).abs() < 1e-15);
        let dsbs = slepian_wolf_bounds(&binary_pair([0.45, 0.05, 0.05, 0.45])).unwrap();
        // h(0.1) in nats
        assert!((dsbs.bound(a1) - 0.325_082_973_391_448_2).abs() < 1e-12);
    }

    fn berger_yeung_model() -> SourceModel {
        // Y0 = Y1 uniform bit; Y2 = Y1 through a BSC(0.2)
        let vars = vec![
            Variable::new("Y0", 2),
            Variable::new("Y1", 2),
            Variable::new("Y2", 2),
            Variable::new("Y3", 1),
        ];
        let probs = vec![0.4, 0.1, 0.0, 0.0, 0.0, 0.0, 0.1, 0.4];
        let joint = JointPmf::new(vars, probs).unwrap();
        let d = SourceModel::tabulate(&joint, 2, |s, z| if s[0] == z { 0.0 } else { 1.0 });
        SourceModel::new(2, joint, vec![d]).unwrap()
    }

    fn by_gamma(copy_u2: bool) -> AuxSystem {
        let enc = |l: usize, size: usize, copy: bool| {
            Channel::deterministic(
                vec![Variable::new(names::observation(l), 2), Variable::new("W", 1), Variable::new("T", 1)],
                Variable::new(names::auxiliary(l), size),
                move |d| if copy { d[0] } else { 0 },
            )
            .unwrap()
        };
        let u2 = if copy_u2 { 2 } else { 1 };
        let dec = Channel::deterministic(
            vec![
                Variable::new("U1", 2),
                Variable::new("U2", u2),
                Variable::new("Y3", 1),
                Variable::new("T", 1),
            ],
            Variable::new("Z", 2),
            |d| d[0],
        )
        .unwrap();
        AuxSystem::new(AuxSystem::trivial_wt(), vec![enc(1, 2, true), enc(2, u2, copy_u2)], dec).unwrap()
    }

    #[test]
    fn berger_yeung_examples() {
        let model = berger_yeung_model();
        let src = model.joint();
        let h1 = src.entropy(&["Y1"]).unwrap().0;
        let constant = berger_yeung_bounds(&model, &by_gamma(false)).unwrap();
        assert!((constant.r1_min - h1).abs() < 1e-15);
        assert_eq!(constant.r2_min, 0.0);
        assert!((constant.sum_min - h1).abs() < 1e-15);

        let copy = berger_yeung_bounds(&model, &by_gamma(true)).unwrap();
        let h1_given_2 = src.conditional_entropy(&["Y1"], &["Y2"]).unwrap().0;
        let h2_given_1 = src.conditional_entropy(&["Y2"], &["Y1"]).unwrap().0;
        assert!((copy.r1_min - h1_given_2).abs() < 1e-12);
        assert!((copy.r2_min - h2_given_1).abs() < 1e-12);
        assert!((copy.sum_min - src.entropy(&["Y1", "Y2"]).unwrap().0).abs() < 1e-12);

        let toy = casebook(Casebook::ToyBtGamma).unwrap();
        assert!(berger_yeung_bounds(&toy.model, &toy.gamma).is_err());
    }

    #[test]
    fn single_encoder_copy_costs_conditional_entropy() {
        let vars = vec![Variable::new("Y0", 1), Variable::new("Y1", 3), Variable::new("Y2", 2)];
        let joint = JointPmf::new(vars, vec![0.1, 0.2, 0.3, 0.1, 0.25, 0.05]).unwrap();
        let d = DistortionMeasure {
            reproduction_size: 1,
            table: vec![0.0; 6],
        };
        let model = SourceModel::new(1, joint.clone(), vec![d]).unwrap();
        let enc = Channel::deterministic(
            vec![Variable::new("Y1", 3), Variable::new("W", 1), Variable::new("T", 1)],
            Variable::new("U1", 3),
            |d| d[0],
        )
        .unwrap();
        let dec = Channel::deterministic(
            vec![Variable::new("U1", 3), Variable::new("Y2", 2), Variable::new("T", 1)],
            Variable::new("Z", 1),
            |_| 0,
        )
        .unwrap();
        let gamma = AuxSystem::new(AuxSystem::trivial_wt(), vec![enc], dec).unwrap();
        let outer = bt_outer_constraints(&model, &gamma).unwrap();
        let expected = joint.conditional_entropy(&["Y1"], &["Y2"]).unwrap().0;
        assert!((outer.sum_rate() - expected).abs() < 1e-15);
    }
}
