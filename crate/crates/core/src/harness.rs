//! Accuracy and the repeated stratified-split evaluation protocol.
//!
//! Splits are drawn from ChaCha8 seeded with `seed_from_u64(seed)`. For each
//! class (ascending id) the class's sample indices, in dataset order, are
//! shuffled by Fisher–Yates: for `i` from `n-1` down to 1, swap `i` with
//! `next_u64() % (i + 1)`. The first `round(ratio · n)` shuffled indices
//! (clamped to `[1, n-1]`) go to training. Training samples are then fed to
//! the learner in dataset order. Splits consume the generator one after another.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::inference::{predict_batch, ScaleMode};
use crate::learner::{train, ClassId, TrainingConfig};

/// Identifier of the split procedure described in the module docs.
pub const SPLIT_ALGORITHM: &str = "chacha8-seed_from_u64+fisher-yates-mod/1";

/// Fraction of samples whose predicted label equals the true label.
pub fn accuracy(predicted: &[ClassId], truth: &[ClassId]) -> Result<f64> {
    if predicted.len() != truth.len() {
        return Err(Error::State(format!(
            "{} predictions for {} labels",
            predicted.len(),
            truth.len()
        )));
    }
    if truth.is_empty() {
        return Err(Error::State("accuracy of an empty set".into()));
    }
    let hits = predicted.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(hits as f64 / truth.len() as f64)
}

/// Counts indexed `[true class][predicted class]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn new(n_classes: usize) -> Self {
        Self {
            counts: vec![vec![0; n_classes]; n_classes],
        }
    }

    pub fn record(&mut self, truth: ClassId, predicted: ClassId) {
        let need = truth.max(predicted) as usize + 1;
        if need > self.counts.len() {
            for row in &mut self.counts {
                row.resize(need, 0);
            }
            self.counts.resize(need, vec![0; need]);
        }
        self.counts[truth as usize][predicted as usize] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> u64 {
        (0..self.counts.len()).map(|i| self.counts[i][i]).sum()
    }

    /// `trace / total`.
    pub fn accuracy(&self) -> f64 {
        self.correct() as f64 / self.total() as f64
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub repeats: usize,
    pub train_ratio: f64,
    pub seed: u64,
    pub training: TrainingConfig,
    pub scale_mode: ScaleMode,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            repeats: 10,
            train_ratio: 0.8,
            seed: 42,
            training: TrainingConfig::default(),
            scale_mode: ScaleMode::Uniform,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitResult {
    pub split: usize,
    pub accuracy: f64,
    /// Wall time of the learner alone (normalization and prediction excluded).
    pub train_seconds: f64,
    pub n_train: usize,
    pub n_test: usize,
    pub prototypes: usize,
    pub megaclouds: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub split_algorithm: &'static str,
    pub seed: u64,
    pub repeats: usize,
    pub train_ratio: f64,
    pub scale_mode: &'static str,
    pub labels: Vec<String>,
    pub splits: Vec<SplitResult>,
    pub mean_accuracy: f64,
    /// Sample standard deviation across splits; 0 for a single split.
    pub std_accuracy: f64,
    pub total_train_seconds: f64,
    /// Summed over all splits.
    pub confusion: ConfusionMatrix,
}

impl EvalReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| Error::Format(format!("report serialization failed: {e}")))
    }

    /// Plain-text table for terminals.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} x {:.0}/{:.0} stratified splits, seed {}, scale mode {}",
            self.repeats,
            self.train_ratio * 100.0,
            (1.0 - self.train_ratio) * 100.0,
            self.seed,
            self.scale_mode
        );
        let _ = writeln!(
            out,
            "{:>5} {:>9} {:>8} {:>7} {:>6} {:>6} {:>11}",
            "split", "accuracy", "train", "test", "P", "mc", "train_s"
        );
        for s in &self.splits {
            let _ = writeln!(
                out,
                "{:>5} {:>8.2}% {:>8} {:>7} {:>6} {:>6} {:>11.6}",
                s.split,
                s.accuracy * 100.0,
                s.n_train,
                s.n_test,
                s.prototypes,
                s.megaclouds,
                s.train_seconds
            );
        }
        let _ = writeln!(
            out,
            "accuracy {:.2}% ± {:.2}%, total training time {:.6} s",
            self.mean_accuracy * 100.0,
            self.std_accuracy * 100.0,
            self.total_train_seconds
        );
        let _ = writeln!(out, "confusion (rows: true, columns: predicted)");
        let width = self
            .labels
            .iter()
            .map(|l| l.len())
            .max()
            .unwrap_or(1)
            .max(6);
        let name = |i: usize| self.labels.get(i).cloned().unwrap_or_else(|| i.to_string());
        let _ = write!(out, "{:>width$}", "");
        for j in 0..self.confusion.counts.len() {
            let _ = write!(out, " {:>width$}", name(j));
        }
        out.push('\n');
        for (i, row) in self.confusion.counts.iter().enumerate() {
            let _ = write!(out, "{:>width$}", name(i));
            for c in row {
                let _ = write!(out, " {c:>width$}");
            }
            out.push('\n');
        }
        out
    }
}

fn shuffle(indices: &mut [usize], rng: &mut ChaCha8Rng) {
    for i in (1..indices.len()).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        indices.swap(i, j);
    }
}

/// One stratified split. Returns (train, test) indices, each ascending.
pub fn stratified_split(
    dataset: &Dataset,
    train_ratio: f64,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut by_class: BTreeMap<ClassId, Vec<usize>> = BTreeMap::new();
    for (i, s) in dataset.samples.iter().enumerate() {
        by_class.entry(s.class_id).or_default().push(i);
    }
    let mut train_idx = Vec::new();
    let mut test_idx = Vec::new();
    for (class_id, mut idx) in by_class {
        let n = idx.len();
        if n < 2 {
            return Err(Error::Data(format!(
                "class {class_id} ({}) has {n} sample(s); at least 2 are needed to split",
                dataset
                    .labels
                    .get(class_id as usize)
                    .map(String::as_str)
                    .unwrap_or("unnamed")
            )));
        }
        shuffle(&mut idx, rng);
        let n_train = ((train_ratio * n as f64).round() as usize).clamp(1, n - 1);
        train_idx.extend_from_slice(&idx[..n_train]);
        test_idx.extend_from_slice(&idx[n_train..]);
    }
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    Ok((train_idx, test_idx))
}

fn check_eval_input(dataset: &Dataset, config: &EvalConfig) -> Result<()> {
    if config.repeats == 0 {
        return Err(Error::Data("repeats must be at least 1".into()));
    }
    if !(config.train_ratio > 0.0 && config.train_ratio < 1.0) {
        return Err(Error::Data(format!(
            "train ratio must lie strictly between 0 and 1, got {}",
            config.train_ratio
        )));
    }
    config.training.validate()?;
    dataset.validate()?;
    let mut counts: BTreeMap<ClassId, usize> = BTreeMap::new();
    for s in &dataset.samples {
        *counts.entry(s.class_id).or_default() += 1;
    }
    if counts.len() < 2 {
        return Err(Error::Data(format!(
            "evaluation needs at least 2 classes, found {}",
            counts.len()
        )));
    }
    Ok(())
}

/// Runs `repeats` stratified train/test splits and aggregates the results.
///
/// `dataset` holds raw features; normalization is fitted on each training
/// split and applied to the matching test split.
pub fn evaluate(dataset: &Dataset, config: &EvalConfig) -> Result<EvalReport> {
    check_eval_input(dataset, config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n_classes = dataset.labels.len().max(
        dataset
            .samples
            .iter()
            .map(|s| s.class_id as usize + 1)
            .max()
            .unwrap_or(0),
    );
    let mut confusion = ConfusionMatrix::new(n_classes);
    let mut splits = Vec::with_capacity(config.repeats);

    for split in 0..config.repeats {
        let (train_idx, test_idx) = stratified_split(dataset, config.train_ratio, &mut rng)?;
        let (train_set, params) = dataset.subset(&train_idx).fit_normalized()?;
        let test_set = dataset.subset(&test_idx).normalized_with(&params)?;

        let started = Instant::now();
        let model = train(&train_set, &config.training)?;
        let train_seconds = started.elapsed().as_secs_f64();

        let inputs: Vec<&[f64]> = test_set
            .samples
            .iter()
            .map(|s| s.features.values.as_slice())
            .collect();
        let predicted: Vec<ClassId> = predict_batch(&model, &inputs, config.scale_mode)?
            .into_iter()
            .map(|p| p.label)
            .collect();
        let truth = test_set.class_ids();
        for (&t, &p) in truth.iter().zip(&predicted) {
            confusion.record(t, p);
        }
        splits.push(SplitResult {
            split,
            accuracy: accuracy(&predicted, &truth)?,
            train_seconds,
            n_train: train_set.len(),
            n_test: test_set.len(),
            prototypes: model.n_clouds(),
            megaclouds: model.megaclouds.len(),
        });
    }

    let n = splits.len() as f64;
    let mean_accuracy = splits.iter().map(|s| s.accuracy).sum::<f64>() / n;
    let std_accuracy = if splits.len() < 2 {
        0.0
    } else {
        (splits
            .iter()
            .map(|s| (s.accuracy - mean_accuracy).powi(2))
            .sum::<f64>()
            / (n - 1.0))
            .sqrt()
    };
    Ok(EvalReport {
        split_algorithm: SPLIT_ALGORITHM,
        seed: config.seed,
        repeats: config.repeats,
        train_ratio: config.train_ratio,
        scale_mode: match config.scale_mode {
            ScaleMode::Uniform => "uniform",
            ScaleMode::PerCloud => "per-cloud",
        },
        labels: dataset.labels.clone(),
        total_train_seconds: splits.iter().map(|s| s.train_seconds).sum(),
        splits,
        mean_accuracy,
        std_accuracy,
        confusion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feature_space::FeatureVector;

    #[test]
    fn accuracy_examples() {
        assert_eq!(accuracy(&[1, 2, 3], &[1, 2, 3]).unwrap(), 1.0);
        assert_eq!(accuracy(&[0, 1, 1, 0], &[0, 1, 0, 0]).unwrap(), 0.75);
        assert!(matches!(accuracy(&[0], &[0, 1]), Err(Error::State(_))));
        assert!(matches!(accuracy(&[], &[]), Err(Error::State(_))));
    }

    #[test]
    fn binary_accuracy_matches_tp_tn_form() {
        let truth = [1, 1, 0, 0, 1, 0, 1, 0, 0, 1];
        let pred = [1, 0, 0, 1, 1, 0, 1, 0, 1, 1];
        let (mut tp, mut tn, mut fp, mut fne) = (0, 0, 0, 0);
        for (&t, &p) in truth.iter().zip(&pred) {
            match (t, p) {
                (1, 1) => tp += 1,
                (0, 0) => tn += 1,
                (0, 1) => fp += 1,
                _ => fne += 1,
            }
        }
        let expected = f64::from(tp + tn) / f64::from(tp + fp + tn + fne);
        assert_eq!(accuracy(&pred, &truth).unwrap(), expected);
        let mut cm = ConfusionMatrix::new(2);
        for (&t, &p) in truth.iter().zip(&pred) {
            cm.record(t, p);
        }
        assert_eq!(cm.accuracy(), expected);
    }

    fn blobs(per_class: &[usize]) -> Dataset {
        let mut ds = Dataset::new(
            per_class
                .iter()
                .enumerate()
                .map(|(c, _)| format!("c{c}"))
                .collect(),
            2,
        );
        for (c, &n) in per_class.iter().enumerate() {
            for k in 0..n {
                let v = vec![c as f64 * 10.0 + (k % 3) as f64 * 0.1, (k % 5) as f64 * 0.1];
                ds.push(
                    c as ClassId,
                    FeatureVector::with_ref(v, format!("c{c}_{k}")),
                )
                .unwrap();
            }
        }
        ds
    }

    #[test]
    fn split_is_stratified() {
        let ds = blobs(&[10, 7, 3]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (train_idx, test_idx) = stratified_split(&ds, 0.8, &mut rng).unwrap();
        let count = |idx: &[usize], c: ClassId| {
            idx.iter().filter(|&&i| ds.samples[i].class_id == c).count()
        };
        assert_eq!((count(&train_idx, 0), count(&test_idx, 0)), (8, 2));
        assert_eq!((count(&train_idx, 1), count(&test_idx, 1)), (6, 1));
        assert_eq!((count(&train_idx, 2), count(&test_idx, 2)), (2, 1));
        let mut all: Vec<usize> = train_idx.iter().chain(&test_idx).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..20).collect::<Vec<_>>());
    }

    #[test]
    fn tiny_class_is_data_error() {
        let ds = blobs(&[5, 1]);
        match evaluate(&ds, &EvalConfig::default()) {
            Err(Error::Data(msg)) => assert!(msg.contains("class 1 (c1)"), "{msg}"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            evaluate(&blobs(&[5]), &EvalConfig::default()),
            Err(Error::Data(_))
        ));
    }

    #[test]
    fn single_repeat_has_zero_std() {
        let ds = blobs(&[10, 10]);
        let report = evaluate(
            &ds,
            &EvalConfig {
                repeats: 1,
                ..EvalConfig::default()
            },
        )
        .unwrap();
        assert_eq!(report.splits.len(), 1);
        assert_eq!(report.std_accuracy, 0.0);
        assert_eq!(report.confusion.row_sums(), vec![2, 2]);
        let table = report.render_table();
        assert!(table.contains("confusion"));
        assert!(report.to_json().unwrap().contains("\"mean_accuracy\""));
    }
}
