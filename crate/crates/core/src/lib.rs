//! Explainable prototype-based classifier.
//!
//! Training is a single, non-iterative pass over each class's samples that
//! identifies prototypes (actual training samples) as local peaks of a
//! recursively maintained Cauchy density. Neighbouring same-class data clouds
//! are merged into MegaClouds, from which one IF-THEN rule per class is
//! produced. Inference picks the most similar prototype per class and the best
//! class overall, so every prediction comes with the prototype that explains it.
//!
//! - [`feature_space`]: standardization, normalization, distances
//! - [`density`]: recursive statistics, density and typicality
//! - [`learner`]: data clouds and per-class training
//! - [`megaclouds`]: cloud merging, rules and visualization exports
//! - [`inference`]: winner-takes-all prediction
//! - [`model_io`]: feature file and model file formats
//! - [`harness`]: accuracy and the repeated-split evaluation protocol

pub mod dataset;
pub mod density;
pub mod error;
pub mod feature_space;
pub mod harness;
pub mod inference;
pub mod learner;
pub mod megaclouds;
pub mod model_io;

pub use dataset::{Dataset, Sample};
pub use density::{typicality, GlobalStats};
pub use error::{Error, Result};
pub use feature_space::{FeatureVector, NormalizationParams};
pub use harness::{accuracy, evaluate, EvalConfig, EvalReport};
pub use inference::{predict, predict_batch, Prediction, ScaleMode};
pub use learner::{
    fit, train, ClassId, ClassModel, DataCloud, LearnOutcome, Model, TrainingConfig,
};
pub use megaclouds::{generate_rules, MegaCloud, Rule, RuleLevel};
pub use model_io::{load_model, read_features, save_model, write_features};
