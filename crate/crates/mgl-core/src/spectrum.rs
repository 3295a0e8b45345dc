//! Singular-value spectra and their squares.
//!
//! A [`Spectrum`] holds the singular values of a map differential sorted in
//! descending order; a [`SquaredSpectrum`] holds their squares in the same
//! order. Region membership tests operate on squared spectra, slope
//! computations accept either form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Negative entries no larger than this (in magnitude) are clamped to zero;
/// they arise from rounding in eigenvalue and quadrature pipelines.
const NEGATIVE_CLAMP: f64 = 1e-12;

fn validated_descending(mut values: Vec<f64>, what: &str) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::InvalidInput(format!("{what} must not be empty")));
    }
    for v in &mut values {
        if !v.is_finite() {
            return Err(Error::InvalidInput(format!(
                "{what} entries must be finite, got {v}"
            )));
        }
        if *v < 0.0 {
            if *v >= -NEGATIVE_CLAMP {
                *v = 0.0;
            } else {
                return Err(Error::InvalidInput(format!(
                    "{what} entries must be non-negative, got {v}"
                )));
            }
        }
    }
    values.sort_unstable_by(|a, b| b.partial_cmp(a).expect("finite entries"));
    Ok(values)
}

/// Singular values λ₁ ≥ λ₂ ≥ … ≥ λ_m ≥ 0 of a map differential.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum(Vec<f64>);

impl Spectrum {
    /// Builds a spectrum from values in any order; sorts descending and
    /// rejects negative or non-finite entries.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Ok(Self(validated_descending(values, "spectrum")?))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest singular value λ₁.
    pub fn max(&self) -> f64 {
        self.0[0]
    }

    /// Entrywise squares, preserving the descending order.
    pub fn squared(&self) -> SquaredSpectrum {
        SquaredSpectrum(self.0.iter().map(|v| v * v).collect())
    }

    /// Volume density of the graph relative to the source: ∏(1+λ_i²)^{1/2}.
    pub fn slope(&self) -> f64 {
        self.squared().slope()
    }
}

/// Squared singular values a_i = λ_i², kept in descending order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SquaredSpectrum(Vec<f64>);

impl SquaredSpectrum {
    /// Builds a squared spectrum from values in any order; sorts descending
    /// and rejects negative or non-finite entries.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Ok(Self(validated_descending(values, "squared spectrum")?))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest entry a₁.
    pub fn max(&self) -> f64 {
        self.0[0]
    }

    /// Entrywise square roots, preserving the descending order.
    pub fn sqrt(&self) -> Spectrum {
        Spectrum(self.0.iter().map(|v| v.sqrt()).collect())
    }

    /// Volume density of the graph relative to the source: ∏(1+a_i)^{1/2}.
    pub fn slope(&self) -> f64 {
        self.0.iter().map(|a| 1.0 + a).product::<f64>().sqrt()
    }
}
