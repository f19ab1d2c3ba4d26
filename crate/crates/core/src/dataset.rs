//! Labelled feature datasets.

use crate::error::{check_dim, Error, Result};
use crate::feature_space::{fit_normalize, FeatureVector, NormalizationParams};
use crate::learner::ClassId;

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub class_id: ClassId,
    pub features: FeatureVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    /// Class names indexed by class id.
    pub labels: Vec<String>,
    pub dim: usize,
    pub samples: Vec<Sample>,
}

impl Dataset {
    pub fn new(labels: Vec<String>, dim: usize) -> Self {
        Self {
            labels,
            dim,
            samples: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn push(&mut self, class_id: ClassId, features: FeatureVector) -> Result<()> {
        check_dim(self.dim, features.dim(), "dataset sample")?;
        self.samples.push(Sample { class_id, features });
        Ok(())
    }

    pub fn vectors(&self) -> Vec<FeatureVector> {
        self.samples.iter().map(|s| s.features.clone()).collect()
    }

    pub fn class_ids(&self) -> Vec<ClassId> {
        self.samples.iter().map(|s| s.class_id).collect()
    }

    /// Checks dimensions, finiteness and class indices against `labels`
    /// (when labels are declared).
    pub fn validate(&self) -> Result<()> {
        for (i, s) in self.samples.iter().enumerate() {
            check_dim(self.dim, s.features.dim(), &format!("sample {i}"))?;
            if let Some(j) = s.features.values.iter().position(|v| !v.is_finite()) {
                return Err(Error::Data(format!(
                    "sample {i} ({:?}) has non-finite component {j}",
                    s.features.ref_or_empty()
                )));
            }
            if !self.labels.is_empty() && s.class_id as usize >= self.labels.len() {
                return Err(Error::Data(format!(
                    "sample {i} has class index {} but only {} labels are declared",
                    s.class_id,
                    self.labels.len()
                )));
            }
        }
        Ok(())
    }

    /// Subset of the samples at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            labels: self.labels.clone(),
            dim: self.dim,
            samples: indices.iter().map(|&i| self.samples[i].clone()).collect(),
        }
    }

    /// Returns a copy with features mapped through `params`.
    pub fn normalized_with(&self, params: &NormalizationParams) -> Result<Self> {
        let samples = self
            .samples
            .iter()
            .map(|s| {
                Ok(Sample {
                    class_id: s.class_id,
                    features: FeatureVector {
                        values: params.transform(&s.features.values)?,
                        source_ref: s.features.source_ref.clone(),
                    },
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            labels: self.labels.clone(),
            dim: self.dim,
            samples,
        })
    }

    /// Fits normalization on this dataset and returns the normalized copy.
    pub fn fit_normalized(&self) -> Result<(Self, NormalizationParams)> {
        let (rows, params) = fit_normalize(&self.vectors())?;
        let samples = rows
            .into_iter()
            .zip(&self.samples)
            .map(|(features, s)| Sample {
                class_id: s.class_id,
                features,
            })
            .collect();
        Ok((
            Self {
                labels: self.labels.clone(),
                dim: self.dim,
                samples,
            },
            params,
        ))
    }
}
