//! Batch prediction throughput against worker count.
//!
//! cargo run --release -p xdnn --example predict_throughput

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xdnn::{predict_batch, ClassModel, DataCloud, Model, ScaleMode, TrainingConfig};

fn main() {
    let dim = 4096;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut classes: Vec<ClassModel> = (0..10).map(ClassModel::empty).collect();
    for k in 0..300 {
        let class_id = k % 10;
        let prototype: Vec<f64> = (0..dim).map(|_| rng.random()).collect();
        let class = &mut classes[class_id as usize];
        class.stats.update(&prototype).unwrap();
        class.clouds.push(DataCloud {
            prototype,
            support: 1,
            radius_sq: 0.2,
            source_ref: format!("p{k}"),
            class_id,
        });
    }
    let model = Model::from_classes(dim, vec![], classes, TrainingConfig::default()).unwrap();
    let queries: Vec<Vec<f64>> = (0..2000)
        .map(|_| (0..dim).map(|_| rng.random()).collect())
        .collect();

    let max = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    let mut workers = 1;
    let mut base = None;
    while workers <= max {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .unwrap();
        let started = Instant::now();
        pool.install(|| predict_batch(&model, &queries, ScaleMode::Uniform).unwrap());
        let rate = queries.len() as f64 / started.elapsed().as_secs_f64();
        let speedup = rate / *base.get_or_insert(rate);
        println!("{workers:>3} workers: {rate:>10.0} predictions/s  (x{speedup:.2})");
        workers *= 2;
    }
}
