//! Single-pass prototype identification.
//!
//! Every class is learned independently from its own sample stream. The first
//! sample of a class seeds one data cloud; each later sample either opens a
//! new cloud (when its density is an extremum relative to all current
//! prototypes) or is absorbed by the nearest cloud.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::density::GlobalStats;
use crate::error::{check_dim, Error, Result};
use crate::feature_space::{default_radius_sq, sq_dist, sq_norm, NormalizationParams};
use crate::megaclouds::{build_adjacency, merge_megaclouds, MegaCloud};

pub type ClassId = u32;

/// A prototype and the statistics of the samples it has absorbed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataCloud {
    pub prototype: Vec<f64>,
    /// Number of member samples, including the one that created the cloud.
    pub support: u64,
    /// Squared radius of the area of influence.
    pub radius_sq: f64,
    /// Reference of the sample that created the cloud.
    pub source_ref: String,
    pub class_id: ClassId,
}

/// How ties between equally near prototypes are resolved.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    #[default]
    LowestIndex,
}

impl TieBreak {
    pub fn as_str(self) -> &'static str {
        match self {
            TieBreak::LowestIndex => "lowest-index",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingConfig {
    pub initial_radius_sq: f64,
    pub tie_break: TieBreak,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            initial_radius_sq: default_radius_sq(),
            tie_break: TieBreak::LowestIndex,
        }
    }
}

impl TrainingConfig {
    /// Config with the initial radius given as a radius rather than its square.
    pub fn with_initial_radius(radius: f64) -> Result<Self> {
        let config = Self {
            initial_radius_sq: radius * radius,
            ..Self::default()
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.initial_radius_sq > 0.0 && self.initial_radius_sq.is_finite()) {
            return Err(Error::Data(format!(
                "initial squared radius must be positive and finite, got {}",
                self.initial_radius_sq
            )));
        }
        Ok(())
    }

    /// Stable textual identity of the configuration. Floats are written as
    /// their IEEE-754 bit patterns.
    pub fn fingerprint(&self) -> String {
        format!(
            "xdnn-train/1;initial_radius_sq={:016x};tie_break={}",
            self.initial_radius_sq.to_bits(),
            self.tie_break.as_str()
        )
    }
}

/// What [`ClassModel::learn`] did with a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LearnOutcome {
    /// The sample seeded the class.
    Initialized,
    /// The sample opened a new cloud with this index.
    NewCloud(usize),
    /// The sample was absorbed by the cloud with this index.
    Updated(usize),
}

/// The clouds and running statistics of one class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassModel {
    pub class_id: ClassId,
    pub clouds: Vec<DataCloud>,
    pub stats: GlobalStats,
}

impl ClassModel {
    /// A class that has not seen any samples yet.
    pub fn empty(class_id: ClassId) -> Self {
        Self {
            class_id,
            clouds: Vec::new(),
            stats: GlobalStats::new(),
        }
    }

    /// Seeds a class from its first sample: one cloud, stats equal to the sample.
    pub fn init(
        x: &[f64],
        source_ref: &str,
        class_id: ClassId,
        config: &TrainingConfig,
    ) -> Result<Self> {
        let mut model = Self::empty(class_id);
        model.stats.update(x)?;
        model.push_cloud(x, source_ref, config);
        Ok(model)
    }

    pub fn dim(&self) -> usize {
        self.stats.dim()
    }

    /// Number of prototypes.
    pub fn len(&self) -> usize {
        self.clouds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clouds.is_empty()
    }

    pub fn total_support(&self) -> u64 {
        self.clouds.iter().map(|c| c.support).sum()
    }

    /// Index of the prototype closest to `x`; ties go to the lowest index.
    pub fn nearest_cloud(&self, x: &[f64]) -> Result<usize> {
        if self.clouds.is_empty() {
            return Err(Error::State(format!(
                "class {} has no prototypes",
                self.class_id
            )));
        }
        check_dim(self.clouds[0].prototype.len(), x.len(), "nearest prototype")?;
        let mut best = 0;
        let mut best_dist = f64::INFINITY;
        for (j, cloud) in self.clouds.iter().enumerate() {
            let d = sq_dist(x, &cloud.prototype);
            if d < best_dist {
                best = j;
                best_dist = d;
            }
        }
        Ok(best)
    }

    /// True when the density of `x` is at least the largest, or at most the
    /// smallest, density among the current prototypes.
    ///
    /// The class statistics are expected to already include `x`.
    pub fn should_add_cloud(&self, x: &[f64]) -> Result<bool> {
        if self.clouds.is_empty() {
            return Ok(true);
        }
        let dx = self.stats.density(x)?;
        let (lo, hi) = self
            .clouds
            .iter()
            .map(|c| self.stats.density_unchecked(&c.prototype))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| {
                (lo.min(d), hi.max(d))
            });
        Ok(dx >= hi || dx <= lo)
    }

    /// Opens a new cloud centred on `x`. Existing clouds are untouched.
    pub fn add_cloud(
        &mut self,
        x: &[f64],
        source_ref: &str,
        config: &TrainingConfig,
    ) -> Result<usize> {
        if let Some(first) = self.clouds.first() {
            check_dim(first.prototype.len(), x.len(), "new prototype")?;
        }
        Ok(self.push_cloud(x, source_ref, config))
    }

    fn push_cloud(&mut self, x: &[f64], source_ref: &str, config: &TrainingConfig) -> usize {
        self.clouds.push(DataCloud {
            prototype: x.to_vec(),
            support: 1,
            radius_sq: config.initial_radius_sq,
            source_ref: source_ref.to_owned(),
            class_id: self.class_id,
        });
        self.clouds.len() - 1
    }

    /// Absorbs `x` into cloud `j`: the prototype moves to the running mean of
    /// its members and the squared radius is averaged with `1 − ‖p‖²`.
    ///
    /// The radius update uses the moved prototype and is clamped at zero.
    pub fn update_cloud(&mut self, j: usize, x: &[f64]) -> Result<()> {
        let n_clouds = self.clouds.len();
        let cloud = self.clouds.get_mut(j).ok_or_else(|| {
            Error::State(format!(
                "cloud index {j} out of range (class has {n_clouds})"
            ))
        })?;
        check_dim(cloud.prototype.len(), x.len(), "cloud update")?;
        let s = cloud.support as f64;
        let keep = s / (s + 1.0);
        let add = 1.0 / (s + 1.0);
        for (p, &v) in cloud.prototype.iter_mut().zip(x) {
            *p = keep * *p + add * v;
        }
        cloud.support += 1;
        cloud.radius_sq = ((cloud.radius_sq + (1.0 - sq_norm(&cloud.prototype))) / 2.0).max(0.0);
        Ok(())
    }

    /// Processes one sample of this class.
    pub fn learn(
        &mut self,
        x: &[f64],
        source_ref: &str,
        config: &TrainingConfig,
    ) -> Result<LearnOutcome> {
        if self.clouds.is_empty() {
            *self = Self::init(x, source_ref, self.class_id, config)?;
            return Ok(LearnOutcome::Initialized);
        }
        check_dim(self.dim(), x.len(), "training sample")?;
        self.stats.update(x)?;
        if self.should_add_cloud(x)? {
            Ok(LearnOutcome::NewCloud(
                self.push_cloud(x, source_ref, config),
            ))
        } else {
            let j = self.nearest_cloud(x)?;
            self.update_cloud(j, x)?;
            Ok(LearnOutcome::Updated(j))
        }
    }
}

/// A trained classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub dim: usize,
    /// Human-readable class names indexed by class id. May be empty.
    pub labels: Vec<String>,
    /// One entry per trained class, ordered by ascending class id.
    pub classes: Vec<ClassModel>,
    pub config: TrainingConfig,
    /// Parameters that map raw features into the model's space, if the model
    /// was fitted on raw data.
    pub normalization: Option<NormalizationParams>,
    pub megaclouds: Vec<MegaCloud>,
}

impl Model {
    /// Assembles a model from trained classes and computes its MegaClouds.
    pub fn from_classes(
        dim: usize,
        labels: Vec<String>,
        mut classes: Vec<ClassModel>,
        config: TrainingConfig,
    ) -> Result<Self> {
        classes.sort_by_key(|c| c.class_id);
        let mut model = Self {
            dim,
            labels,
            classes,
            config,
            normalization: None,
            megaclouds: Vec::new(),
        };
        model.validate()?;
        model.refresh_megaclouds();
        Ok(model)
    }

    /// Total number of prototypes across classes.
    pub fn n_clouds(&self) -> usize {
        self.classes.iter().map(|c| c.clouds.len()).sum()
    }

    /// All clouds in global order (by class, then by index within the class).
    pub fn clouds(&self) -> impl Iterator<Item = &DataCloud> {
        self.classes.iter().flat_map(|c| c.clouds.iter())
    }

    /// Global index of the first cloud of each class.
    pub fn cloud_offsets(&self) -> Vec<usize> {
        let mut offsets = Vec::with_capacity(self.classes.len());
        let mut acc = 0;
        for c in &self.classes {
            offsets.push(acc);
            acc += c.clouds.len();
        }
        offsets
    }

    pub fn class(&self, class_id: ClassId) -> Option<&ClassModel> {
        self.classes
            .binary_search_by_key(&class_id, |c| c.class_id)
            .ok()
            .map(|i| &self.classes[i])
    }

    /// Display name of a class, falling back to its numeric id.
    pub fn label_name(&self, class_id: ClassId) -> String {
        self.labels
            .get(class_id as usize)
            .cloned()
            .unwrap_or_else(|| class_id.to_string())
    }

    pub fn refresh_megaclouds(&mut self) {
        let graph = build_adjacency(self);
        self.megaclouds = merge_megaclouds(self, &graph);
    }

    /// Checks the structural invariants of a trained model.
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Dimension(
                "model dimension must be at least 1".into(),
            ));
        }
        if self.classes.is_empty() {
            return Err(Error::State("model has no classes".into()));
        }
        self.config.validate()?;
        for pair in self.classes.windows(2) {
            if pair[0].class_id >= pair[1].class_id {
                return Err(Error::State(
                    "class ids must be unique and ascending".into(),
                ));
            }
        }
        if let Some(params) = &self.normalization {
            let d = self.dim;
            if params.mean.len() != d
                || params.std.len() != d
                || params.min.len() != d
                || params.max.len() != d
            {
                return Err(Error::Dimension(
                    "normalization parameters do not match model dimension".into(),
                ));
            }
        }
        for class in &self.classes {
            if class.clouds.is_empty() {
                return Err(Error::State(format!(
                    "class {} was never trained",
                    class.class_id
                )));
            }
            check_dim(self.dim, class.stats.dim(), "class statistics")?;
            if class.total_support() != class.stats.count {
                return Err(Error::State(format!(
                    "class {}: supports sum to {} but {} samples were seen",
                    class.class_id,
                    class.total_support(),
                    class.stats.count
                )));
            }
            for cloud in &class.clouds {
                check_dim(self.dim, cloud.prototype.len(), "prototype")?;
                if cloud.class_id != class.class_id {
                    return Err(Error::State(format!(
                        "cloud of class {} stored under class {}",
                        cloud.class_id, class.class_id
                    )));
                }
                if cloud.support == 0 {
                    return Err(Error::State("cloud with zero support".into()));
                }
                if cloud.radius_sq.is_nan() || cloud.radius_sq < 0.0 {
                    return Err(Error::State(
                        "cloud with negative or NaN squared radius".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Trains one class model per distinct class, each on its own samples in
/// stream order. Classes are trained in parallel.
pub fn train(dataset: &Dataset, config: &TrainingConfig) -> Result<Model> {
    train_observed(dataset, config, &|_, _| {})
}

/// [`train`] with a hook that sees every learning step as it happens.
pub fn train_observed(
    dataset: &Dataset,
    config: &TrainingConfig,
    observer: &(dyn Fn(ClassId, LearnOutcome) + Sync),
) -> Result<Model> {
    config.validate()?;
    if dataset.samples.is_empty() {
        return Err(Error::State("cannot train on an empty dataset".into()));
    }
    let mut by_class: BTreeMap<ClassId, Vec<usize>> = BTreeMap::new();
    for (i, s) in dataset.samples.iter().enumerate() {
        check_dim(dataset.dim, s.features.dim(), "training sample")?;
        by_class.entry(s.class_id).or_default().push(i);
    }
    let classes = by_class
        .into_par_iter()
        .map(|(class_id, idx)| {
            let mut model = ClassModel::empty(class_id);
            for i in idx {
                let s = &dataset.samples[i];
                let outcome = model.learn(&s.features.values, s.features.ref_or_empty(), config)?;
                observer(class_id, outcome);
            }
            Ok(model)
        })
        .collect::<Result<Vec<_>>>()?;
    Model::from_classes(dataset.dim, dataset.labels.clone(), classes, config.clone())
}

/// Fits normalization on raw features, then trains on the normalized data.
pub fn fit(raw: &Dataset, config: &TrainingConfig) -> Result<Model> {
    let (normalized, params) = raw.fit_normalized()?;
    let mut model = train(&normalized, config)?;
    model.normalization = Some(params);
    Ok(model)
}
