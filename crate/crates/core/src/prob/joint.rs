use serde::{Deserialize, Serialize};

use super::{check_distribution, check_unique, for_each_index, strides, xlnx_neg, Channel, Nats, Variable};
use crate::error::{Error, Result};

/// Dense probability mass function over an ordered list of named variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawJointPmf", into = "RawJointPmf")]
pub struct JointPmf {
    variables: Vec<Variable>,
    probs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawJointPmf {
    variables: Vec<Variable>,
    probs: Vec<f64>,
}

impl TryFrom<RawJointPmf> for JointPmf {
    type Error = Error;
    fn try_from(raw: RawJointPmf) -> Result<Self> {
        JointPmf::new(raw.variables, raw.probs)
    }
}

impl From<JointPmf> for RawJointPmf {
    fn from(j: JointPmf) -> Self {
        RawJointPmf {
            variables: j.variables,
            probs: j.probs,
        }
    }
}

impl JointPmf {
    pub fn new(variables: Vec<Variable>, probs: Vec<f64>) -> Result<Self> {
        check_unique(&variables)?;
        let expected: usize = variables.iter().map(|v| v.size).product();
        if probs.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "{} probabilities for an alphabet of {} tuples",
                probs.len(),
                expected
            )));
        }
        check_distribution(&probs)?;
        Ok(Self { variables, probs })
    }

    /// Uniform law over the product alphabet.
    pub fn uniform(variables: Vec<Variable>) -> Result<Self> {
        let n: usize = variables.iter().map(|v| v.size).product();
        Self::new(variables, vec![1.0 / n as f64; n])
    }

    /// Point mass at the tuple `at`.
    pub fn point_mass(variables: Vec<Variable>, at: &[usize]) -> Result<Self> {
        if at.len() != variables.len() || at.iter().zip(&variables).any(|(&a, v)| a >= v.size) {
            return Err(Error::ShapeMismatch("point-mass index outside alphabet".into()));
        }
        let sizes: Vec<usize> = variables.iter().map(|v| v.size).collect();
        let flat: usize = at.iter().zip(strides(&sizes)).map(|(a, s)| a * s).sum();
        let mut probs = vec![0.0; sizes.iter().product()];
        probs[flat] = 1.0;
        Self::new(variables, probs)
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.variables.iter().map(|v| v.name.as_str())
    }

    pub fn position(&self, name: &str) -> Result<usize> {
        self.variables
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn size_of(&self, name: &str) -> Result<usize> {
        Ok(self.variables[self.position(name)?].size)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.variables.iter().any(|v| v.name == name)
    }

    fn sizes(&self) -> Vec<usize> {
        self.variables.iter().map(|v| v.size).collect()
    }

    /// Probability of the tuple `at` (one index per variable, in order).
    pub fn prob(&self, at: &[usize]) -> f64 {
        let flat: usize = at.iter().zip(strides(&self.sizes())).map(|(a, s)| a * s).sum();
        self.probs[flat]
    }

    /// Joint law of two independent pmfs, `self` variables first.
    pub fn product(&self, other: &JointPmf) -> Result<JointPmf> {
        let mut variables = self.variables.clone();
        variables.extend(other.variables.iter().cloned());
        check_unique(&variables)?;
        let mut probs = Vec::with_capacity(self.probs.len() * other.probs.len());
        for &a in &self.probs {
            probs.extend(other.probs.iter().map(|&b| a * b));
        }
        Ok(JointPmf { variables, probs })
    }

    /// Appends the channel's output, drawn from `channel` given its inputs.
    pub fn extend(&self, channel: &Channel) -> Result<JointPmf> {
        let out = channel.output();
        if self.contains(&out.name) {
            return Err(Error::DuplicateVariable(out.name.clone()));
        }
        let sizes = self.sizes();
        let input_sizes: Vec<usize> = channel.inputs().iter().map(|v| v.size).collect();
        let input_strides = strides(&input_sizes);
        // stride of each joint variable inside the channel row index
        let mut row_stride = vec![0usize; sizes.len()];
        for (k, input) in channel.inputs().iter().enumerate() {
            let pos = self.position(&input.name)?;
            if sizes[pos] != input.size {
                return Err(Error::ShapeMismatch(format!(
                    "channel input `{}` has size {}, joint has {}",
                    input.name, input.size, sizes[pos]
                )));
            }
            row_stride[pos] = input_strides[k];
        }
        let n_out = out.size;
        let rows = channel.flat_rows();
        let mut probs = vec![0.0; self.probs.len() * n_out];
        for_each_index(&sizes, |flat, digits| {
            let p = self.probs[flat];
            if p == 0.0 {
                return;
            }
            let r: usize = digits.iter().zip(&row_stride).map(|(d, s)| d * s).sum();
            let row = &rows[r * n_out..(r + 1) * n_out];
            let dst = &mut probs[flat * n_out..(flat + 1) * n_out];
            for (d, &q) in dst.iter_mut().zip(row) {
                *d = p * q;
            }
        });
        let mut variables = self.variables.clone();
        variables.push(out.clone());
        Ok(JointPmf { variables, probs })
    }

    /// Sums out every variable not in `keep`; the result lists `keep` in the given order.
    pub fn marginalize(&self, keep: &[&str]) -> Result<JointPmf> {
        if keep.is_empty() {
            return Err(Error::EmptyVariableSet);
        }
        let positions = self.positions(keep)?;
        let (variables, probs) = self.marginal_raw(&positions);
        Ok(JointPmf { variables, probs })
    }

    fn positions(&self, names: &[&str]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(names.len());
        for &n in names {
            let p = self.position(n)?;
            if out.contains(&p) {
                return Err(Error::DuplicateVariable(n.to_string()));
            }
            out.push(p);
        }
        Ok(out)
    }

    /// Marginal over the variables at `positions` (in that order); empty gives `[1.0]`.
    fn marginal_raw(&self, positions: &[usize]) -> (Vec<Variable>, Vec<f64>) {
        let sizes = self.sizes();
        let variables: Vec<Variable> = positions.iter().map(|&p| self.variables[p].clone()).collect();
        let kept_sizes: Vec<usize> = variables.iter().map(|v| v.size).collect();
        let kept_strides = strides(&kept_sizes);
        let mut target_stride = vec![0usize; sizes.len()];
        for (k, &p) in positions.iter().enumerate() {
            target_stride[p] = kept_strides[k];
        }
        let mut probs = vec![0.0; kept_sizes.iter().product()];
        if positions.len() == sizes.len() && positions.iter().enumerate().all(|(i, &p)| i == p) {
            probs.copy_from_slice(&self.probs);
            return (variables, probs);
        }
        for_each_index(&sizes, |flat, digits| {
            let t: usize = digits.iter().zip(&target_stride).map(|(d, s)| d * s).sum();
            probs[t] += self.probs[flat];
        });
        (variables, probs)
    }

    /// Reinterprets variable `name` as the consecutive variables `parts`
    /// (first part most significant). The probability array is unchanged.
    pub fn split_variable(&self, name: &str, parts: &[Variable]) -> Result<JointPmf> {
        let pos = self.position(name)?;
        let product: usize = parts.iter().map(|v| v.size).product();
        if parts.is_empty() || product != self.variables[pos].size {
            return Err(Error::ShapeMismatch(format!(
                "cannot split `{name}` of size {} into parts of total size {product}",
                self.variables[pos].size
            )));
        }
        let mut variables = self.variables[..pos].to_vec();
        variables.extend(parts.iter().cloned());
        variables.extend(self.variables[pos + 1..].iter().cloned());
        check_unique(&variables)?;
        Ok(JointPmf {
            variables,
            probs: self.probs.clone(),
        })
    }

    /// Shannon entropy of the listed variables; the empty set has entropy 0.
    pub fn entropy(&self, vars: &[&str]) -> Result<Nats> {
        let positions = self.positions(vars)?;
        let (_, probs) = self.marginal_raw(&positions);
        Ok(Nats(probs.iter().map(|&p| xlnx_neg(p)).sum()))
    }

    /// `H(A | C)`.
    pub fn conditional_entropy(&self, a: &[&str], c: &[&str]) -> Result<Nats> {
        self.conditional_mutual_information(a, a, c)
    }

    /// `I(A; B)`.
    pub fn mutual_information(&self, a: &[&str], b: &[&str]) -> Result<Nats> {
        self.conditional_mutual_information(a, b, &[])
    }

    /// `I(A; B | C)` in nats by exact summation over the joint alphabet.
    ///
    /// `A`, `B`, `C` must be pairwise disjoint, except that `A == B` is
    /// accepted as the degenerate case `I(A; A | C) = H(A | C)`. `C` may be empty.
    pub fn conditional_mutual_information(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<Nats> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::EmptyVariableSet);
        }
        let pa = self.positions(a)?;
        let pb = self.positions(b)?;
        let pc = self.positions(c)?;
        if let Some(&x) = pc.iter().find(|p| pa.contains(p) || pb.contains(p)) {
            return Err(Error::OverlappingSets(self.variables[x].name.clone()));
        }
        let same = {
            let mut sa = pa.clone();
            let mut sb = pb.clone();
            sa.sort_unstable();
            sb.sort_unstable();
            sa == sb
        };
        if same {
            let mut ac = pa.clone();
            ac.extend(&pc);
            let h_ac: f64 = self.marginal_raw(&ac).1.iter().map(|&p| xlnx_neg(p)).sum();
            let h_c: f64 = self.marginal_raw(&pc).1.iter().map(|&p| xlnx_neg(p)).sum();
            return Ok(Nats((h_ac - h_c).max(0.0)));
        }
        if let Some(&x) = pa.iter().find(|p| pb.contains(p)) {
            return Err(Error::OverlappingSets(self.variables[x].name.clone()));
        }

        let mut abc = pa.clone();
        abc.extend(&pb);
        abc.extend(&pc);
        let (vars, p) = self.marginal_raw(&abc);
        let na: usize = vars[..pa.len()].iter().map(|v| v.size).product();
        let nb: usize = vars[pa.len()..pa.len() + pb.len()].iter().map(|v| v.size).product();
        let nc: usize = vars[pa.len() + pb.len()..].iter().map(|v| v.size).product();

        let mut p_ac = vec![0.0; na * nc];
        let mut p_bc = vec![0.0; nb * nc];
        let mut p_c = vec![0.0; nc];
        for ia in 0..na {
            for ib in 0..nb {
                for ic in 0..nc {
                    let v = p[(ia * nb + ib) * nc + ic];
                    p_ac[ia * nc + ic] += v;
                    p_bc[ib * nc + ic] += v;
                    p_c[ic] += v;
                }
            }
        }
        let mut total = 0.0;
        for ia in 0..na {
            for ib in 0..nb {
                for ic in 0..nc {
                    let v = p[(ia * nb + ib) * nc + ic];
                    if v > 0.0 {
                        total += v * (v * p_c[ic] / (p_ac[ia * nc + ic] * p_bc[ib * nc + ic])).ln();
                    }
                }
            }
        }
        Ok(Nats(total.max(0.0)))
    }

    /// Expectation of `f` evaluated on each tuple of the listed variables.
    pub fn expect(&self, vars: &[&str], mut f: impl FnMut(&[usize]) -> f64) -> Result<f64> {
        let positions = self.positions(vars)?;
        let (kept, probs) = self.marginal_raw(&positions);
        let sizes: Vec<usize> = kept.iter().map(|v| v.size).collect();
        let mut total = 0.0;
        for_each_index(&sizes, |flat, digits| {
            let p = probs[flat];
            if p > 0.0 {
                total += p * f(digits);
            }
        });
        Ok(total)
    }

    /// Probability that the predicate holds on the listed variables.
    pub fn probability(&self, vars: &[&str], mut event: impl FnMut(&[usize]) -> bool) -> Result<f64> {
        self.expect(vars, |d| if event(d) { 1.0 } else { 0.0 })
    }
}
