//! Box-constrained hyperparameter search spaces.
//!
//! Every dimension is mapped to the unit interval before it reaches a
//! surrogate model: linear dimensions affinely, log dimensions affinely in
//! `ln λ`. Integral dimensions are treated as continuous while modelling and
//! rounded (half-to-even) only when a point is materialised for evaluation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dimension {
    pub name: String,
    pub low: f64,
    pub high: f64,
    pub scale: Scale,
    #[serde(default)]
    pub integral: bool,
}

impl Dimension {
    pub fn linear(name: impl Into<String>, low: f64, high: f64) -> Self {
        Self {
            name: name.into(),
            low,
            high,
            scale: Scale::Linear,
            integral: false,
        }
    }

    pub fn log(name: impl Into<String>, low: f64, high: f64) -> Self {
        Self {
            name: name.into(),
            low,
            high,
            scale: Scale::Log,
            integral: false,
        }
    }

    pub fn integral(mut self) -> Self {
        self.integral = true;
        self
    }

    fn validated(mut self) -> Result<Self> {
        if !(self.low.is_finite() && self.high.is_finite()) {
            return Err(Error::domain(format!(
                "dimension `{}` has non-finite bounds",
                self.name
            )));
        }
        if self.integral {
            self.low = self.low.round_ties_even();
            self.high = self.high.round_ties_even();
        }
        if self.low >= self.high {
            return Err(Error::domain(format!(
                "dimension `{}` needs low < high, got [{}, {}]",
                self.name, self.low, self.high
            )));
        }
        if self.scale == Scale::Log && self.low <= 0.0 {
            return Err(Error::domain(format!(
                "log-scaled dimension `{}` needs a positive lower bound",
                self.name
            )));
        }
        Ok(self)
    }

    fn to_unit(&self, value: f64) -> f64 {
        match self.scale {
            Scale::Linear => (value - self.low) / (self.high - self.low),
            Scale::Log => {
                let (lo, hi) = (self.low.ln(), self.high.ln());
                (value.ln() - lo) / (hi - lo)
            }
        }
    }

    fn from_unit(&self, u: f64) -> f64 {
        let raw = match self.scale {
            _ if u <= 0.0 => self.low,
            _ if u >= 1.0 => self.high,
            Scale::Linear => self.low + u * (self.high - self.low),
            Scale::Log => {
                let (lo, hi) = (self.low.ln(), self.high.ln());
                (lo + u * (hi - lo)).exp()
            }
        };
        let raw = if self.integral {
            raw.round_ties_even()
        } else {
            raw
        };
        raw.clamp(self.low, self.high)
    }

    pub fn contains(&self, value: f64) -> bool {
        value >= self.low && value <= self.high
    }
}

/// A point in a [`HyperparameterDomain`], one value per dimension in domain order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HyperparameterVector(Vec<f64>);

impl HyperparameterVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Unchecked; [`HyperparameterDomain::vector`] validates against a domain.
impl From<Vec<f64>> for HyperparameterVector {
    fn from(values: Vec<f64>) -> Self {
        Self(values)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperparameterDomain {
    dims: Vec<Dimension>,
}

impl HyperparameterDomain {
    pub fn new(dims: Vec<Dimension>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::domain("a domain needs at least one dimension"));
        }
        let dims = dims
            .into_iter()
            .map(Dimension::validated)
            .collect::<Result<Vec<_>>>()?;
        for (i, d) in dims.iter().enumerate() {
            if dims[..i].iter().any(|o| o.name == d.name) {
                return Err(Error::domain(format!("duplicate dimension `{}`", d.name)));
            }
        }
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[Dimension] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.dims.iter().position(|d| d.name == name)
    }

    /// Validates raw values against the domain and wraps them.
    pub fn vector(&self, values: Vec<f64>) -> Result<HyperparameterVector> {
        let v = HyperparameterVector(values);
        self.check(&v)?;
        Ok(v)
    }

    pub fn check(&self, lambda: &HyperparameterVector) -> Result<()> {
        if lambda.len() != self.len() {
            return Err(Error::domain(format!(
                "expected {} hyperparameters, got {}",
                self.len(),
                lambda.len()
            )));
        }
        for (d, &x) in self.dims.iter().zip(lambda.values()) {
            if !d.contains(x) {
                return Err(Error::domain(format!(
                    "`{}` = {x} outside [{}, {}]",
                    d.name, d.low, d.high
                )));
            }
            if d.integral && x != x.round() {
                return Err(Error::domain(format!(
                    "`{}` = {x} must be integer-valued",
                    d.name
                )));
            }
        }
        Ok(())
    }

    /// Maps `lambda` into the unit cube.
    pub fn normalize(&self, lambda: &HyperparameterVector) -> Result<Vec<f64>> {
        if lambda.len() != self.len() {
            return Err(Error::domain(format!(
                "expected {} hyperparameters, got {}",
                self.len(),
                lambda.len()
            )));
        }
        self.dims
            .iter()
            .zip(lambda.values())
            .map(|(d, &x)| {
                if d.contains(x) {
                    Ok(d.to_unit(x).clamp(0.0, 1.0))
                } else {
                    Err(Error::domain(format!(
                        "`{}` = {x} outside [{}, {}]",
                        d.name, d.low, d.high
                    )))
                }
            })
            .collect()
    }

    /// Inverse of [`normalize`](Self::normalize); integral dimensions are
    /// rounded half-to-even and clamped into bounds.
    pub fn denormalize(&self, u: &[f64]) -> Result<HyperparameterVector> {
        if u.len() != self.len() {
            return Err(Error::domain(format!(
                "expected {} unit coordinates, got {}",
                self.len(),
                u.len()
            )));
        }
        self.dims
            .iter()
            .zip(u)
            .map(|(d, &ui)| {
                if (0.0..=1.0).contains(&ui) {
                    Ok(d.from_unit(ui))
                } else {
                    Err(Error::domain(format!(
                        "unit coordinate {ui} for `{}` outside [0, 1]",
                        d.name
                    )))
                }
            })
            .collect::<Result<Vec<_>>>()
            .map(HyperparameterVector)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn one(d: Dimension) -> HyperparameterDomain {
        HyperparameterDomain::new(vec![d]).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let lin = one(Dimension::linear("epochs", 1.0, 64.0));
        assert_eq!(lin.normalize(&HyperparameterVector(vec![1.0])).unwrap(), vec![0.0]);

        let log = one(Dimension::log("b", 0.1, 10.0));
        let u = log.normalize(&HyperparameterVector(vec![1.0])).unwrap()[0];
        assert!((u - 0.5).abs() < 1e-12);

        let lot = one(Dimension::linear("lot", 8.0, 512.0));
        let u = lot.normalize(&HyperparameterVector(vec![260.0])).unwrap()[0];
        assert!((u - 0.5).abs() < 1e-15);
    }

    #[test]
    fn denormalize_examples() {
        let lin = one(Dimension::linear("epochs", 1.0, 64.0));
        assert_eq!(lin.denormalize(&[0.0]).unwrap().get(0), 1.0);

        let log = one(Dimension::log("b", 0.1, 10.0));
        assert!((log.denormalize(&[0.5]).unwrap().get(0) - 1.0).abs() < 1e-12);

        // 1 + 0.5 * 399 = 200.5, which rounds to the even neighbour.
        let int = one(Dimension::linear("c", 1.0, 400.0).integral());
        assert_eq!(int.denormalize(&[0.5]).unwrap().get(0), 200.0);
    }

    #[test]
    fn out_of_range_is_a_domain_error() {
        let d = one(Dimension::linear("x", 0.0, 1.0));
        assert!(matches!(
            d.normalize(&HyperparameterVector(vec![1.5])),
            Err(Error::Domain(_))
        ));
        assert!(matches!(d.denormalize(&[-0.1]), Err(Error::Domain(_))));
        assert!(d.vector(vec![0.2, 0.3]).is_err());
    }

    #[test]
    fn invalid_dimensions_rejected() {
        assert!(HyperparameterDomain::new(vec![Dimension::linear("x", 1.0, 1.0)]).is_err());
        assert!(HyperparameterDomain::new(vec![Dimension::log("x", 0.0, 1.0)]).is_err());
        assert!(HyperparameterDomain::new(vec![Dimension::linear("x", 0.3, 0.45).integral()]).is_err());
        assert!(HyperparameterDomain::new(vec![
            Dimension::linear("x", 0.0, 1.0),
            Dimension::linear("x", 0.0, 2.0)
        ])
        .is_err());
    }

    #[test]
    fn integral_check() {
        let d = one(Dimension::linear("c", 1.0, 30.0).integral());
        assert!(d.vector(vec![3.0]).is_ok());
        assert!(d.vector(vec![3.5]).is_err());
    }

    proptest! {
        #[test]
        fn normalize_inverts_denormalize(u in proptest::collection::vec(0.0f64..=1.0, 3)) {
            let d = HyperparameterDomain::new(vec![
                Dimension::linear("a", -3.0, 7.0),
                Dimension::log("b", 1e-3, 1e2),
                Dimension::log("c", 0.5, 0.6),
            ]).unwrap();
            let lam = d.denormalize(&u).unwrap();
            let back = d.normalize(&lam).unwrap();
            for (x, y) in u.iter().zip(&back) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
        }
    }
}
