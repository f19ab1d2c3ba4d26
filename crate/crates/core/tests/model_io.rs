mod common;

use common::*;
use rand::Rng;

use xdnn::inference::ScaleMode;
use xdnn::model_io::{model_from_str, model_to_string};
use xdnn::{
    fit, load_model, predict_batch, read_features, save_model, write_features, ClassModel, Error,
    TrainingConfig,
};

#[test]
fn saved_model_predicts_identically() {
    let dir = tempfile::tempdir().unwrap();
    let model = fit(&three_blobs(30, 12), &TrainingConfig::default()).unwrap();
    let path = dir.path().join("blobs.model");
    save_model(&model, &path).unwrap();
    let loaded = load_model(&path).unwrap();
    assert_eq!(loaded, model);
    let mut r = rng(77);
    let probe: Vec<Vec<f64>> = (0..100).map(|_| vec![r.random(), r.random()]).collect();
    assert_eq!(
        predict_batch(&model, &probe, ScaleMode::Uniform).unwrap(),
        predict_batch(&loaded, &probe, ScaleMode::Uniform).unwrap()
    );
}

#[test]
fn future_version_is_rejected() {
    let model = golden_model();
    let text = model_to_string(&model)
        .unwrap()
        .replace("\"format_version\": 1", "\"format_version\": 2");
    assert!(matches!(model_from_str(&text), Err(Error::Format(_))));
    assert!(matches!(model_from_str("{}"), Err(Error::Format(_))));
    assert!(matches!(model_from_str("not json"), Err(Error::Format(_))));
}

#[test]
fn corrupted_numbers_are_format_errors() {
    let text = model_to_string(&golden_model()).unwrap();
    let corrupted = text.replacen("\"support\": 1", "\"support\": \"one\"", 1);
    assert_ne!(corrupted, text);
    assert!(matches!(model_from_str(&corrupted), Err(Error::Format(_))));
    let corrupted = text.replacen("\"support\": 1", "\"support\": 7", 1);
    assert!(matches!(model_from_str(&corrupted), Err(Error::Format(_))));
    let corrupted = text.replacen("\"radius_sq\": ", "\"radius_sq\": -", 1);
    assert!(matches!(model_from_str(&corrupted), Err(Error::Format(_))));
    let corrupted = text.replacen("lowest-index", "highest-index", 1);
    assert!(matches!(model_from_str(&corrupted), Err(Error::Format(_))));
}

#[test]
fn edited_config_breaks_fingerprint() {
    let mut model = golden_model();
    model.config.initial_radius_sq = 0.5;
    let text = model_to_string(&model).unwrap();
    let tampered = text.replace(
        &model.config.fingerprint(),
        "xdnn-train/1;initial_radius_sq=0;tie_break=lowest-index",
    );
    assert!(matches!(model_from_str(&tampered), Err(Error::Format(_))));
}

#[test]
fn untrained_class_cannot_be_saved() {
    let mut model = golden_model();
    model.classes.push(ClassModel::empty(9));
    let dir = tempfile::tempdir().unwrap();
    let err = save_model(&model, dir.path().join("m.model")).unwrap_err();
    assert!(matches!(err, Error::State(_)), "{err}");
    assert!(!dir.path().join("m.model").exists());
}

#[test]
fn feature_files_round_trip_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let ds = three_blobs(10, 3);
    // narrow to f32 so the binary layout is exact
    let mut narrowed = ds.clone();
    for s in &mut narrowed.samples {
        s.features
            .values
            .iter_mut()
            .for_each(|v| *v = f64::from(*v as f32));
    }
    let bin = dir.path().join("d.xdnf");
    write_features(&narrowed, &bin).unwrap();
    assert_eq!(read_features(&bin).unwrap(), narrowed);
    let csv = dir.path().join("d.csv");
    write_features(&ds, &csv).unwrap();
    assert_eq!(read_features(&csv).unwrap(), ds);
    assert!(matches!(
        read_features(dir.path().join("nope.xdnf")),
        Err(Error::Io { .. })
    ));
}
