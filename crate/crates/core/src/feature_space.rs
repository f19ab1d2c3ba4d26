//! The data space: per-column standardization, min-max normalization into the
//! unit hypercube, and the distance measures used by training and inference.
//!
//! Normalization parameters are always fitted on training data. Applying them
//! to unseen samples clips the result into `[0, 1]`.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// One sample in feature space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    /// Identifier of the originating image or record, if known.
    pub source_ref: Option<String>,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self {
            values,
            source_ref: None,
        }
    }

    pub fn with_ref(values: Vec<f64>, source_ref: impl Into<String>) -> Self {
        Self {
            values,
            source_ref: Some(source_ref.into()),
        }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// The source reference, or the empty string when there is none.
    pub fn ref_or_empty(&self) -> &str {
        self.source_ref.as_deref().unwrap_or("")
    }
}

impl AsRef<[f64]> for FeatureVector {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

/// Per-column statistics of a training matrix.
///
/// `mean` and `std` describe the raw columns; `min` and `max` describe the
/// columns after standardization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationParams {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl NormalizationParams {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Fits standardization and min-max parameters on a training matrix.
    pub fn fit<V: AsRef<[f64]>>(rows: &[V]) -> Result<Self> {
        Ok(standardize_rows(rows)?.1)
    }

    /// Standardizes then min-max normalizes one raw vector, clipping into `[0, 1]`.
    pub fn transform(&self, raw: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), raw.len(), "normalization input")?;
        Ok(raw
            .iter()
            .enumerate()
            .map(|(j, &v)| self.minmax_value(j, self.standardize_value(j, v)))
            .collect())
    }

    /// [`transform`](Self::transform) over a batch, keeping source references.
    pub fn transform_all(&self, rows: &[FeatureVector]) -> Result<Vec<FeatureVector>> {
        rows.iter()
            .map(|row| {
                Ok(FeatureVector {
                    values: self.transform(&row.values)?,
                    source_ref: row.source_ref.clone(),
                })
            })
            .collect()
    }

    /// Variance of each column in the normalized space.
    ///
    /// Standardized columns have unit sample variance, so after dividing by the
    /// standardized range the variance is `1 / (max - min)^2`.
    pub fn normalized_variance(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|j| {
                let range = self.max[j] - self.min[j];
                if self.std[j] == 0.0 || range <= 0.0 {
                    0.0
                } else {
                    1.0 / (range * range)
                }
            })
            .collect()
    }

    fn standardize_value(&self, j: usize, v: f64) -> f64 {
        if self.std[j] == 0.0 {
            0.0
        } else {
            (v - self.mean[j]) / self.std[j]
        }
    }

    fn minmax_value(&self, j: usize, z: f64) -> f64 {
        let range = self.max[j] - self.min[j];
        if range <= 0.0 {
            0.5
        } else {
            ((z - self.min[j]) / range).clamp(0.0, 1.0)
        }
    }
}

fn matrix_dim<V: AsRef<[f64]>>(rows: &[V]) -> Result<usize> {
    let dim = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
    if dim == 0 {
        return Err(Error::Dimension(
            "feature vectors must have at least one component".into(),
        ));
    }
    for (i, row) in rows.iter().enumerate() {
        let len = row.as_ref().len();
        if len != dim {
            return Err(Error::Dimension(format!(
                "row {i} has {len} components, expected {dim}"
            )));
        }
    }
    Ok(dim)
}

fn standardize_rows<V: AsRef<[f64]>>(rows: &[V]) -> Result<(Vec<Vec<f64>>, NormalizationParams)> {
    if rows.len() < 2 {
        return Err(Error::Dimension(format!(
            "standardization needs at least 2 rows, got {}",
            rows.len()
        )));
    }
    let dim = matrix_dim(rows)?;
    let n = rows.len() as f64;

    let mut mean = vec![0.0; dim];
    for row in rows {
        for (m, &v) in mean.iter_mut().zip(row.as_ref()) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);

    let mut std = vec![0.0; dim];
    for j in 0..dim {
        let first = rows[0].as_ref()[j];
        // constant columns get exactly zero spread regardless of rounding in the mean
        if rows.iter().all(|r| r.as_ref()[j] == first) {
            continue;
        }
        let ss: f64 = rows
            .iter()
            .map(|r| {
                let d = r.as_ref()[j] - mean[j];
                d * d
            })
            .sum();
        std[j] = (ss / (n - 1.0)).sqrt();
    }

    let mut params = NormalizationParams {
        mean,
        std,
        min: vec![f64::INFINITY; dim],
        max: vec![f64::NEG_INFINITY; dim],
    };
    let standardized: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| {
            r.as_ref()
                .iter()
                .enumerate()
                .map(|(j, &v)| params.standardize_value(j, v))
                .collect()
        })
        .collect();
    for row in &standardized {
        for (j, &z) in row.iter().enumerate() {
            params.min[j] = params.min[j].min(z);
            params.max[j] = params.max[j].max(z);
        }
    }
    Ok((standardized, params))
}

/// Standardizes each column to zero mean and unit sample standard deviation.
///
/// Zero-variance columns map to all zeros. The returned parameters also carry
/// the per-column min/max of the standardized matrix, ready for
/// [`minmax_normalize`].
pub fn standardize(rows: &[FeatureVector]) -> Result<(Vec<FeatureVector>, NormalizationParams)> {
    let (standardized, params) = standardize_rows(rows)?;
    let out = standardized
        .into_iter()
        .zip(rows)
        .map(|(values, row)| FeatureVector {
            values,
            source_ref: row.source_ref.clone(),
        })
        .collect();
    Ok((out, params))
}

/// Maps standardized rows into `[0, 1]` using the stored column ranges.
///
/// Values outside the training range are clipped; columns with an empty range
/// map to 0.5.
pub fn minmax_normalize(
    rows: &[FeatureVector],
    params: &NormalizationParams,
) -> Result<Vec<FeatureVector>> {
    rows.iter()
        .map(|row| {
            check_dim(params.dim(), row.dim(), "min-max input")?;
            Ok(FeatureVector {
                values: row
                    .values
                    .iter()
                    .enumerate()
                    .map(|(j, &z)| params.minmax_value(j, z))
                    .collect(),
                source_ref: row.source_ref.clone(),
            })
        })
        .collect()
}

/// Fits parameters on `rows` and returns the normalized matrix.
pub fn fit_normalize(rows: &[FeatureVector]) -> Result<(Vec<FeatureVector>, NormalizationParams)> {
    let (standardized, params) = standardize(rows)?;
    let normalized = minmax_normalize(&standardized, &params)?;
    Ok((normalized, params))
}

/// Squared Euclidean distance. Callers must pass equal-length slices.
#[inline]
pub(crate) fn sq_dist(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter()
        .zip(y)
        .map(|(a, b)| {
            let d = a - b;
            d * d
        })
        .sum()
}

#[inline]
pub(crate) fn sq_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// `Σ_j (x_j − y_j)²`.
pub fn euclidean_sq(x: &[f64], y: &[f64]) -> Result<f64> {
    check_dim(x.len(), y.len(), "euclidean distance")?;
    Ok(sq_dist(x, y))
}

/// Distance between the directions of two vectors, `‖x/‖x‖ − y/‖y‖‖`.
///
/// For an angle θ between `x` and `y` this equals `sqrt(2 − 2cos θ)`.
pub fn angular_dissimilarity(x: &[f64], y: &[f64]) -> Result<f64> {
    check_dim(x.len(), y.len(), "angular dissimilarity")?;
    let nx = sq_norm(x).sqrt();
    let ny = sq_norm(y).sqrt();
    if nx == 0.0 || ny == 0.0 {
        return Err(Error::DegenerateInput(
            "angular dissimilarity of a zero vector".into(),
        ));
    }
    Ok(x.iter()
        .zip(y)
        .map(|(a, b)| {
            let d = a / nx - b / ny;
            d * d
        })
        .sum::<f64>()
        .sqrt())
}

/// Chord length between two unit vectors 30° apart: `sqrt(2 − 2cos 30°)`.
pub fn similarity_radius() -> f64 {
    default_radius_sq().sqrt()
}

/// Square of [`similarity_radius`], the initial squared radius of every data cloud.
pub fn default_radius_sq() -> f64 {
    2.0 - 2.0 * 30f64.to_radians().cos()
}
