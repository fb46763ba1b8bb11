//! Finite-alphabet probability: dense joint pmfs, stochastic kernels and
//! exact information measures.
//!
//! All measures are in nats. Entries are stored row-major in variable order,
//! so the last listed variable varies fastest. For two binary variables
//! `A` (listed first) and `B`, the array `[p00, p01, p10, p11]` holds
//! `Pr(A=0,B=0), Pr(A=0,B=1), Pr(A=1,B=0), Pr(A=1,B=1)`:
//!
//! ```json
//! {"variables":[{"name":"A","size":2},{"name":"B","size":2}],
//!  "probs":[0.4, 0.1, 0.2, 0.3]}
//! ```
//!
//! A channel lists one row per input tuple, again row-major over its inputs.

mod channel;
mod joint;

pub use channel::Channel;
pub use joint::JointPmf;

use serde::{Deserialize, Serialize};
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

/// Tolerance applied to normalization of pmfs and kernel rows.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// A named finite random variable taking values in `0..size`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub size: usize,
}

impl Variable {
    pub fn new(name: impl Into<String>, size: usize) -> Self {
        Self {
            name: name.into(),
            size,
        }
    }
}

/// An information quantity in nats.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Nats(pub f64);

impl Nats {
    pub const ZERO: Nats = Nats(0.0);

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn to_bits(self) -> f64 {
        self.0 / std::f64::consts::LN_2
    }
}

impl From<Nats> for f64 {
    fn from(n: Nats) -> f64 {
        n.0
    }
}

impl Add for Nats {
    type Output = Nats;
    fn add(self, rhs: Nats) -> Nats {
        Nats(self.0 + rhs.0)
    }
}

impl Sub for Nats {
    type Output = Nats;
    fn sub(self, rhs: Nats) -> Nats {
        Nats(self.0 - rhs.0)
    }
}

impl Mul<f64> for Nats {
    type Output = Nats;
    fn mul(self, rhs: f64) -> Nats {
        Nats(self.0 * rhs)
    }
}

impl Sum for Nats {
    fn sum<I: Iterator<Item = Nats>>(iter: I) -> Nats {
        Nats(iter.map(|n| n.0).sum())
    }
}

impl fmt::Display for Nats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} nats", self.0)
    }
}

/// `-x ln x` with the `0 ln 0 = 0` convention.
#[inline]
pub(crate) fn xlnx_neg(x: f64) -> f64 {
    if x > 0.0 {
        -x * x.ln()
    } else {
        0.0
    }
}

/// Binary entropy without domain checks; callers guarantee `0 <= x <= 1`.
#[inline]
pub(crate) fn h2(x: f64) -> f64 {
    xlnx_neg(x) + xlnx_neg(1.0 - x)
}

/// Binary entropy function in nats.
pub fn binary_entropy(x: f64) -> Result<Nats> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidParameter(format!(
            "binary entropy argument {x} outside [0, 1]"
        )));
    }
    Ok(Nats(h2(x)))
}

/// Row-major strides for the given sizes.
pub(crate) fn strides(sizes: &[usize]) -> Vec<usize> {
    let mut out = vec![1; sizes.len()];
    for i in (0..sizes.len().saturating_sub(1)).rev() {
        out[i] = out[i + 1] * sizes[i + 1];
    }
    out
}

/// Calls `f(flat, digits)` for every multi-index in row-major order.
pub(crate) fn for_each_index(sizes: &[usize], mut f: impl FnMut(usize, &[usize])) {
    let total: usize = sizes.iter().product();
    if total == 0 {
        return;
    }
    let mut digits = vec![0usize; sizes.len()];
    for flat in 0..total {
        f(flat, &digits);
        for pos in (0..sizes.len()).rev() {
            digits[pos] += 1;
            if digits[pos] < sizes[pos] {
                break;
            }
            digits[pos] = 0;
        }
    }
}

pub(crate) fn check_unique(vars: &[Variable]) -> Result<()> {
    for (i, v) in vars.iter().enumerate() {
        if vars[..i].iter().any(|w| w.name == v.name) {
            return Err(Error::DuplicateVariable(v.name.clone()));
        }
        if v.size == 0 {
            return Err(Error::InvalidParameter(format!(
                "variable `{}` has an empty alphabet",
                v.name
            )));
        }
    }
    Ok(())
}

pub(crate) fn check_distribution(probs: &[f64]) -> Result<()> {
    for (index, &value) in probs.iter().enumerate() {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::InvalidProbability { index, value });
        }
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::NotNormalized { sum });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn binary_entropy_endpoints() {
        assert_eq!(binary_entropy(0.0).unwrap(), Nats(0.0));
        assert_eq!(binary_entropy(1.0).unwrap(), Nats(0.0));
        assert!((binary_entropy(0.5).unwrap().0 - LN_2).abs() < 1e-15);
    }

    #[test]
    fn binary_entropy_interior_value() {
        // 40-digit evaluation of the formula: 0.533661790584267349...
        let v = binary_entropy(0.774597).unwrap().0;
        assert!((v - 0.533_661_790_584_267_3).abs() < 1e-14, "{v}");
    }

    #[test]
    fn binary_entropy_rejects_out_of_range() {
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(1.0 + 1e-9).is_err());
    }

    #[test]
    fn odometer_visits_row_major() {
        let mut seen = Vec::new();
        for_each_index(&[2, 3], |flat, d| seen.push((flat, d[0], d[1])));
        assert_eq!(seen[4], (4, 1, 1));
        assert_eq!(strides(&[2, 3, 4]), vec![12, 4, 1]);
    }
}
