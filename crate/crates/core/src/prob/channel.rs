use serde::{Deserialize, Serialize};

use super::{check_unique, for_each_index, Variable, NORMALIZATION_TOLERANCE};
use crate::error::{Error, Result};

/// A stochastic kernel from a tuple of input variables to one output variable.
///
/// Row `r` is the conditional law of the output given the input tuple whose
/// row-major index (over `inputs`) is `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChannel", into = "RawChannel")]
pub struct Channel {
    inputs: Vec<Variable>,
    output: Variable,
    rows: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawChannel {
    inputs: Vec<Variable>,
    output: Variable,
    rows: Vec<Vec<f64>>,
}

impl TryFrom<RawChannel> for Channel {
    type Error = Error;
    fn try_from(raw: RawChannel) -> Result<Self> {
        Channel::new(raw.inputs, raw.output, raw.rows)
    }
}

impl From<Channel> for RawChannel {
    fn from(c: Channel) -> Self {
        let rows = c.rows.chunks(c.output.size).map(|r| r.to_vec()).collect();
        RawChannel {
            inputs: c.inputs,
            output: c.output,
            rows,
        }
    }
}

impl Channel {
    pub fn new(inputs: Vec<Variable>, output: Variable, rows: Vec<Vec<f64>>) -> Result<Self> {
        let expected: usize = inputs.iter().map(|v| v.size).product();
        if rows.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "channel to `{}` has {} rows, expected {}",
                output.name,
                rows.len(),
                expected
            )));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != output.size) {
            return Err(Error::ShapeMismatch(format!(
                "channel row of length {} for output `{}` of size {}",
                bad.len(),
                output.name,
                output.size
            )));
        }
        Self::from_flat(inputs, output, rows.concat())
    }

    pub(crate) fn from_flat(inputs: Vec<Variable>, output: Variable, rows: Vec<f64>) -> Result<Self> {
        let mut all = inputs.clone();
        all.push(output.clone());
        check_unique(&all)?;
        let n_rows: usize = inputs.iter().map(|v| v.size).product();
        if rows.len() != n_rows * output.size {
            return Err(Error::ShapeMismatch(format!(
                "channel to `{}` has {} entries, expected {}",
                output.name,
                rows.len(),
                n_rows * output.size
            )));
        }
        for (r, row) in rows.chunks(output.size).enumerate() {
            for (j, &value) in row.iter().enumerate() {
                if !value.is_finite() || value < 0.0 {
                    return Err(Error::InvalidProbability {
                        index: r * output.size + j,
                        value,
                    });
                }
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
                return Err(Error::NotNormalized { sum });
            }
        }
        Ok(Self {
            inputs,
            output,
            rows,
        })
    }

    /// Builds a kernel by evaluating `law` on every input tuple.
    pub fn from_fn(
        inputs: Vec<Variable>,
        output: Variable,
        mut law: impl FnMut(&[usize]) -> Vec<f64>,
    ) -> Result<Self> {
        let sizes: Vec<usize> = inputs.iter().map(|v| v.size).collect();
        let mut rows = Vec::with_capacity(sizes.iter().product::<usize>() * output.size);
        let mut shape_err = None;
        for_each_index(&sizes, |_, digits| {
            let row = law(digits);
            if row.len() != output.size && shape_err.is_none() {
                shape_err = Some(row.len());
            }
            rows.extend(row);
        });
        if let Some(len) = shape_err {
            return Err(Error::ShapeMismatch(format!(
                "law returned a row of length {len} for output `{}` of size {}",
                output.name, output.size
            )));
        }
        Self::from_flat(inputs, output, rows)
    }

    /// Builds a deterministic kernel `output = map(inputs)`.
    pub fn deterministic(
        inputs: Vec<Variable>,
        output: Variable,
        mut map: impl FnMut(&[usize]) -> usize,
    ) -> Result<Self> {
        let size = output.size;
        let mut out_of_range = None;
        let channel = Self::from_fn(inputs, output, |d| {
            let mut row = vec![0.0; size];
            let v = map(d);
            if v < size {
                row[v] = 1.0;
            } else {
                out_of_range.get_or_insert(v);
                row[0] = 1.0;
            }
            row
        })?;
        match out_of_range {
            Some(v) => Err(Error::ShapeMismatch(format!(
                "deterministic map produced symbol {v} outside alphabet of size {size}"
            ))),
            None => Ok(channel),
        }
    }

    pub fn inputs(&self) -> &[Variable] {
        &self.inputs
    }

    pub fn output(&self) -> &Variable {
        &self.output
    }

    /// Conditional law of the output for the input tuple with row-major index `r`.
    pub fn row(&self, r: usize) -> &[f64] {
        let n = self.output.size;
        &self.rows[r * n..(r + 1) * n]
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len() / self.output.size
    }

    pub(crate) fn flat_rows(&self) -> &[f64] {
        &self.rows
    }

    /// Same kernel with the output variable renamed.
    pub fn with_output_name(mut self, name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if self.inputs.iter().any(|v| v.name == name) {
            return Err(Error::DuplicateVariable(name));
        }
        self.output.name = name;
        Ok(self)
    }
}
