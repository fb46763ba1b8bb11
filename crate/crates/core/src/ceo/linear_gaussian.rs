//! Jointly Gaussian vectors built as linear combinations of independent
//! zero-mean latent Gaussians, with exact information measures from
//! log-determinants.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct LinearGaussian {
    latent_variances: Vec<f64>,
    names: Vec<String>,
    /// One row of latent coefficients per named variable.
    rows: Vec<Vec<f64>>,
}

impl LinearGaussian {
    pub fn new(latent_variances: Vec<f64>) -> Result<Self> {
        if let Some(v) = latent_variances.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidParameter(format!("latent variance {v} must be finite and nonnegative")));
        }
        Ok(Self {
            latent_variances,
            names: Vec::new(),
            rows: Vec::new(),
        })
    }

    /// Adds `name = sum_j coefficients[j] * latent_j`.
    pub fn define(&mut self, name: &str, coefficients: &[(usize, f64)]) -> Result<()> {
        if self.names.iter().any(|n| n == name) {
            return Err(Error::DuplicateVariable(name.to_string()));
        }
        let mut row = vec![0.0; self.latent_variances.len()];
        for &(j, c) in coefficients {
            *row.get_mut(j)
                .ok_or_else(|| Error::InvalidParameter(format!("latent index {j} out of range")))? += c;
        }
        self.names.push(name.to_string());
        self.rows.push(row);
        Ok(())
    }

    fn index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn covariance(&self, vars: &[&str]) -> Result<DMatrix<f64>> {
        let idx: Vec<usize> = vars.iter().map(|v| self.index(v)).collect::<Result<_>>()?;
        let n = idx.len();
        Ok(DMatrix::from_fn(n, n, |i, j| {
            let (a, b) = (&self.rows[idx[i]], &self.rows[idx[j]]);
            a.iter()
                .zip(b)
                .zip(&self.latent_variances)
                .map(|((x, y), v)| x * y * v)
                .sum()
        }))
    }

    fn log_det(&self, vars: &[&str]) -> Result<f64> {
        if vars.is_empty() {
            return Ok(0.0);
        }
        let cov = self.covariance(vars)?;
        let chol = cov
            .cholesky()
            .ok_or_else(|| Error::InvalidParameter(format!("covariance of {vars:?} is singular")))?;
        Ok(2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>())
    }

    /// `I(A; B | C)` in nats; the three sets must be disjoint.
    pub fn conditional_mutual_information(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
        let join = |x: &[&str], y: &[&str]| -> Vec<String> { x.iter().chain(y).map(|s| s.to_string()).collect() };
        let ac = join(a, c);
        let bc = join(b, c);
        let abc = join(&join(a, b).iter().map(String::as_str).collect::<Vec<_>>(), c);
        let value = 0.5 * (self.log_det(&s(&ac))? + self.log_det(&s(&bc))? - self.log_det(c)? - self.log_det(&s(&abc))?);
        Ok(value.max(0.0))
    }

    pub fn mutual_information(&self, a: &[&str], b: &[&str]) -> Result<f64> {
        self.conditional_mutual_information(a, b, &[])
    }

    /// Minimum mean squared error of estimating `target` linearly from `given`.
    pub fn mmse(&self, target: &str, given: &[&str]) -> Result<f64> {
        let mut all = vec![target];
        all.extend_from_slice(given);
        let cov = self.covariance(&all)?;
        let n = given.len();
        let cross = DVector::from_fn(n, |i, _| cov[(0, i + 1)]);
        let inner = cov.view((1, 1), (n, n)).into_owned();
        let chol = inner
            .cholesky()
            .ok_or_else(|| Error::InvalidParameter("observation covariance is singular".into()))?;
        let solved = chol.solve(&cross);
        Ok(cov[(0, 0)] - cross.dot(&solved))
    }
}

fn s(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}
