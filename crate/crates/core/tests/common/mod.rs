//! Helpers shared by the integration test targets: synthetic data, random
//! models, and a scalar re-implementation of the learning procedure used as
//! an oracle.
#![allow(dead_code, clippy::needless_range_loop)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use xdnn::density::GlobalStats;
use xdnn::{ClassModel, DataCloud, Dataset, FeatureVector, Model, TrainingConfig};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Three 2-D Gaussian blobs with unit σ and centres at least 6σ apart,
/// interleaved so that every class streams through the whole file.
pub fn three_blobs(per_class: usize, seed: u64) -> Dataset {
    let centres = [[0.0, 0.0], [8.0, 0.0], [4.0, 7.0]];
    let noise = Normal::new(0.0, 1.0).unwrap();
    let mut r = rng(seed);
    let mut ds = Dataset::new(vec!["west".into(), "east".into(), "north".into()], 2);
    for k in 0..per_class {
        for (c, centre) in centres.iter().enumerate() {
            let v = vec![
                centre[0] + noise.sample(&mut r),
                centre[1] + noise.sample(&mut r),
            ];
            ds.push(
                c as u32,
                FeatureVector::with_ref(v, format!("blob{c}/{k:03}.png")),
            )
            .unwrap();
        }
    }
    ds
}

/// A model with arbitrary prototypes, supports and radii. Class statistics are
/// consistent with the supports (each prototype counted `support` times).
pub fn random_model(
    r: &mut ChaCha8Rng,
    n_classes: u32,
    n_clouds: usize,
    dim: usize,
    max_radius_sq: f64,
) -> Model {
    let mut classes: Vec<ClassModel> = (0..n_classes).map(ClassModel::empty).collect();
    for k in 0..n_clouds {
        // every class gets at least one cloud
        let class_id = if (k as u32) < n_classes {
            k as u32
        } else {
            r.random_range(0..n_classes)
        };
        let prototype: Vec<f64> = (0..dim).map(|_| r.random::<f64>()).collect();
        let support = r.random_range(1..5u64);
        let class = &mut classes[class_id as usize];
        for _ in 0..support {
            class.stats.update(&prototype).unwrap();
        }
        class.clouds.push(DataCloud {
            prototype,
            support,
            radius_sq: r.random::<f64>() * max_radius_sq,
            source_ref: format!("c{class_id}_k{k}"),
            class_id,
        });
    }
    Model::from_classes(dim, vec![], classes, TrainingConfig::default()).unwrap()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScriptedCloud {
    pub prototype: f64,
    pub support: u64,
    pub radius_sq: f64,
}

/// The learning procedure for one class of scalar samples, written out step by
/// step with plain `f64` arithmetic. Returns the cloud list after every sample.
///
/// Prototype updates use the weights `S/(S+1)` and `1/(S+1)`; the squared
/// radius is averaged with `1 - p²` of the moved prototype and kept nonnegative.
pub fn scripted_learning_1d(stream: &[f64], initial_radius_sq: f64) -> Vec<Vec<ScriptedCloud>> {
    let mut history = Vec::with_capacity(stream.len());
    let mut clouds = vec![ScriptedCloud {
        prototype: stream[0],
        support: 1,
        radius_sq: initial_radius_sq,
    }];
    let mut mu = stream[0];
    let mut big_sigma = stream[0] * stream[0];
    history.push(clouds.clone());

    for (k, &x) in stream.iter().enumerate().skip(1) {
        let i = (k + 1) as f64;
        mu = (i - 1.0) / i * mu + 1.0 / i * x;
        big_sigma = (i - 1.0) / i * big_sigma + 1.0 / i * (x * x);
        let var = (big_sigma - mu * mu).max(0.0);
        let density = |z: f64| {
            let d = (z - mu) * (z - mu);
            if var <= 1e-12 {
                if d <= 1e-12 {
                    1.0
                } else {
                    0.0
                }
            } else {
                1.0 / (1.0 + d / var)
            }
        };
        let dx = density(x);
        let max_d = clouds
            .iter()
            .map(|c| density(c.prototype))
            .fold(f64::NEG_INFINITY, f64::max);
        let min_d = clouds
            .iter()
            .map(|c| density(c.prototype))
            .fold(f64::INFINITY, f64::min);
        if dx >= max_d || dx <= min_d {
            clouds.push(ScriptedCloud {
                prototype: x,
                support: 1,
                radius_sq: initial_radius_sq,
            });
        } else {
            let mut j = 0;
            for t in 1..clouds.len() {
                if (x - clouds[t].prototype) * (x - clouds[t].prototype)
                    < (x - clouds[j].prototype) * (x - clouds[j].prototype)
                {
                    j = t;
                }
            }
            let c = &mut clouds[j];
            let s = c.support as f64;
            c.prototype = s / (s + 1.0) * c.prototype + 1.0 / (s + 1.0) * x;
            c.support += 1;
            c.radius_sq = ((c.radius_sq + (1.0 - c.prototype * c.prototype)) / 2.0).max(0.0);
        }
        history.push(clouds.clone());
    }
    history
}

/// A scalar stream drawn around a few centres in [0, 1].
pub fn scripted_stream(n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    let centres = [0.15, 0.5, 0.85];
    let noise = Normal::new(0.0f64, 0.06).unwrap();
    (0..n)
        .map(|_| {
            let c: f64 = centres[r.random_range(0..centres.len())];
            (c + noise.sample(&mut r)).clamp(0.0, 1.0)
        })
        .collect()
}

/// Batch mean and mean squared norm of a sample set.
pub fn batch_stats(samples: &[Vec<f64>]) -> (Vec<f64>, f64) {
    let n = samples.len() as f64;
    let dim = samples[0].len();
    let mut mean = vec![0.0; dim];
    let mut msn = 0.0;
    for s in samples {
        for j in 0..dim {
            mean[j] += s[j];
        }
        msn += s.iter().map(|v| v * v).sum::<f64>();
    }
    (mean.iter().map(|m| m / n).collect(), msn / n)
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// Index of the globally nearest prototype by exhaustive scan (first on ties).
pub fn nearest_prototype_class(model: &Model, x: &[f64]) -> u32 {
    let mut best = (f64::INFINITY, 0u32);
    for c in model.clouds() {
        let mut d = 0.0;
        for j in 0..x.len() {
            d += (x[j] - c.prototype[j]).powi(2);
        }
        if d < best.0 {
            best = (d, c.class_id);
        }
    }
    best.1
}

pub fn fresh_stats(samples: &[Vec<f64>]) -> GlobalStats {
    let mut s = GlobalStats::new();
    for x in samples {
        s.update(x).unwrap();
    }
    s
}

/// Fixed model used for the golden rule files.
pub fn golden_model() -> Model {
    let rows = [
        (0, 0.10, 0.10),
        (0, 0.12, 0.14),
        (0, 0.30, 0.20),
        (0, 0.11, 0.12),
        (0, 0.05, 0.40),
        (1, 0.90, 0.90),
        (1, 0.85, 0.95),
        (1, 0.60, 0.70),
        (1, 0.88, 0.91),
        (2, 0.50, 0.10),
    ];
    let mut ds = Dataset::new(vec!["sky".into(), "road".into(), "sign".into()], 2);
    for (k, &(c, x, y)) in rows.iter().enumerate() {
        ds.push(
            c,
            FeatureVector::with_ref(vec![x, y], format!("img_{k:02}.jpg")),
        )
        .unwrap();
    }
    xdnn::train(&ds, &TrainingConfig::default()).unwrap()
}

pub fn golden_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}
