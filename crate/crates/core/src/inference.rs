//! Validation-time decisions: Cauchy similarity to prototypes, winner-takes-all
//! within each class, then across classes.

use rayon::prelude::*;

use crate::density::DEGENERATE_EPS;
use crate::error::{check_dim, Error, Result};
use crate::feature_space::sq_dist;
use crate::learner::{ClassId, ClassModel, DataCloud, Model};

/// Kernel scale used in the similarity.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ScaleMode {
    /// σ² = 1 for every cloud; decisions are exactly nearest-prototype.
    #[default]
    Uniform,
    /// σ² = the cloud's squared radius (floored at a small epsilon).
    PerCloud,
}

impl ScaleMode {
    fn scale(self, cloud: &DataCloud) -> f64 {
        match self {
            ScaleMode::Uniform => 1.0,
            ScaleMode::PerCloud => cloud.radius_sq.max(DEGENERATE_EPS),
        }
    }
}

fn scaled_dist(cloud: &DataCloud, x: &[f64], mode: ScaleMode) -> f64 {
    sq_dist(x, &cloud.prototype) / mode.scale(cloud)
}

/// `1 / (1 + ‖x − p‖² / σ²)`.
pub fn similarity(cloud: &DataCloud, x: &[f64], mode: ScaleMode) -> Result<f64> {
    check_dim(cloud.prototype.len(), x.len(), "similarity")?;
    Ok(1.0 / (1.0 + scaled_dist(cloud, x, mode)))
}

/// Best match of a sample within one class.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalDecision {
    pub class_id: ClassId,
    /// λ, the highest similarity to any prototype of the class.
    pub score: f64,
    /// Index of the winning cloud within the class.
    pub cloud: usize,
    pub source_ref: String,
    /// `‖x − p‖² / σ²` of the winning cloud. Compared instead of `score` so
    /// that rounding in the reciprocal cannot merge distinct distances.
    pub scaled_dist: f64,
}

pub fn local_decision(class: &ClassModel, x: &[f64], mode: ScaleMode) -> Result<LocalDecision> {
    let first = class
        .clouds
        .first()
        .ok_or_else(|| Error::State(format!("class {} has no prototypes", class.class_id)))?;
    check_dim(first.prototype.len(), x.len(), "local decision")?;
    let mut best = 0;
    let mut best_dist = f64::INFINITY;
    for (j, cloud) in class.clouds.iter().enumerate() {
        let d = scaled_dist(cloud, x, mode);
        if d < best_dist {
            best = j;
            best_dist = d;
        }
    }
    Ok(LocalDecision {
        class_id: class.class_id,
        score: 1.0 / (1.0 + best_dist),
        cloud: best,
        source_ref: class.clouds[best].source_ref.clone(),
        scaled_dist: best_dist,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub label: ClassId,
    /// λ per class, ascending class id.
    pub per_class_scores: Vec<(ClassId, f64)>,
    /// Winning cloud, indexed within the winning class.
    pub winning_cloud: usize,
    pub winning_similarity: f64,
    /// Prototype reference of the winning cloud: the explanation of the decision.
    pub winning_ref: String,
}

/// Picks the class with the highest λ; ties go to the lowest class id.
pub fn global_decision(per_class: &[LocalDecision]) -> Result<Prediction> {
    let mut sorted: Vec<&LocalDecision> = per_class.iter().collect();
    sorted.sort_by_key(|d| d.class_id);
    let winner = sorted
        .iter()
        .copied()
        .reduce(|best, d| {
            if d.scaled_dist < best.scaled_dist {
                d
            } else {
                best
            }
        })
        .ok_or_else(|| Error::State("no class scores to decide between".into()))?;
    Ok(Prediction {
        label: winner.class_id,
        per_class_scores: sorted.iter().map(|d| (d.class_id, d.score)).collect(),
        winning_cloud: winner.cloud,
        winning_similarity: winner.score,
        winning_ref: winner.source_ref.clone(),
    })
}

/// Classifies one normalized sample.
pub fn predict(model: &Model, x: &[f64], mode: ScaleMode) -> Result<Prediction> {
    check_dim(model.dim, x.len(), "prediction input")?;
    let locals = model
        .classes
        .iter()
        .map(|c| local_decision(c, x, mode))
        .collect::<Result<Vec<_>>>()?;
    global_decision(&locals)
}

/// Classifies a batch of normalized samples in parallel, preserving order.
pub fn predict_batch<V: AsRef<[f64]> + Sync>(
    model: &Model,
    xs: &[V],
    mode: ScaleMode,
) -> Result<Vec<Prediction>> {
    xs.par_iter()
        .map(|x| predict(model, x.as_ref(), mode))
        .collect()
}
