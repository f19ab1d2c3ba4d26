//! On-disk formats.
//!
//! Feature files (`.xdnf`) are little-endian binary:
//!
//! ```text
//! magic        4 bytes   "XDNF"
//! version      u16       1
//! n_samples    u64
//! n_dims       u32
//! label_count  u32
//! labels       label_count × (u32 byte length, UTF-8 bytes)
//! records      n_samples × (u32 class index,
//!                           u32 byte length + UTF-8 source_ref,
//!                           n_dims × f32)
//! ```
//!
//! Files ending in `.csv` use a text layout instead, with the header
//! `label,source_ref,f0,...,f{n-1}`; labels are class names and class ids are
//! assigned in order of first appearance.
//!
//! Models are pretty-printed JSON documents with a required `format_version`.
//! Floats are written in shortest round-trip form, so loading a saved model
//! reproduces every value bit for bit.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::feature_space::{FeatureVector, NormalizationParams};
use crate::learner::{ClassId, ClassModel, Model, TrainingConfig};
use crate::megaclouds::{check_partition, MegaCloud};

pub const FEATURE_MAGIC: &[u8; 4] = b"XDNF";
pub const FEATURE_VERSION: u16 = 1;
pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Writes `bytes` to a temporary file next to `path`, then renames it into place.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

fn is_csv(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// Reads a feature file, choosing the CSV layout for `.csv` paths.
pub fn read_features(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if is_csv(path) {
        decode_csv(&bytes)
    } else {
        decode_features(&bytes)
    }
}

/// Writes a feature file, choosing the CSV layout for `.csv` paths.
pub fn write_features(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = if is_csv(path) {
        encode_csv(dataset)?
    } else {
        encode_features(dataset)?
    };
    write_atomic(path, &bytes)
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        let avail = self.buf.len() - self.pos;
        if n > avail {
            return Err(Error::Format(format!(
                "truncated {what} at byte offset {}: expected {n} bytes, {avail} available",
                self.pos
            )));
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u16(&mut self, what: &str) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn string(&mut self, what: &str) -> Result<String> {
        let len = self.u32(what)? as usize;
        let at = self.pos;
        let bytes = self.take(len, what)?;
        String::from_utf8(bytes.to_vec())
            .map_err(|_| Error::Format(format!("{what} at byte offset {at} is not valid UTF-8")))
    }
}

/// Decodes the binary feature layout.
pub fn decode_features(bytes: &[u8]) -> Result<Dataset> {
    let mut r = Reader { buf: bytes, pos: 0 };
    let magic = r.take(4, "magic")?;
    if magic != FEATURE_MAGIC {
        return Err(Error::Format(format!(
            "bad magic {magic:?}, expected \"XDNF\""
        )));
    }
    let version = r.u16("version")?;
    if version != FEATURE_VERSION {
        return Err(Error::Format(format!(
            "unsupported feature file version {version} (expected {FEATURE_VERSION})"
        )));
    }
    let n_samples = r.u64("sample count")?;
    let n_dims = r.u32("dimension")? as usize;
    let label_count = r.u32("label count")?;
    if n_samples > 0 && n_dims == 0 {
        return Err(Error::Format(
            "feature dimension is 0 but samples are declared".into(),
        ));
    }
    let mut labels = Vec::new();
    for k in 0..label_count {
        labels.push(r.string(&format!("label {k}"))?);
    }

    // each record needs at least 8 + 4·n_dims bytes; never trust the header for allocation
    let min_record = 8 + 4 * n_dims;
    let cap = (bytes.len() - r.pos) / min_record.max(1);
    let mut samples = Vec::with_capacity(cap.min(n_samples as usize));
    let mut dataset = Dataset::new(labels, n_dims);
    for i in 0..n_samples {
        let class_id = r.u32(&format!("class index of sample {i}"))?;
        let source_ref = r.string(&format!("source_ref of sample {i}"))?;
        let raw = r.take(4 * n_dims, &format!("features of sample {i}"))?;
        let mut values = Vec::with_capacity(n_dims);
        for (j, chunk) in raw.chunks_exact(4).enumerate() {
            let v = f32::from_le_bytes(chunk.try_into().unwrap());
            if !v.is_finite() {
                return Err(Error::Data(format!(
                    "sample {i} ({source_ref:?}) has non-finite component {j}"
                )));
            }
            values.push(f64::from(v));
        }
        if class_id >= label_count {
            return Err(Error::Data(format!(
                "sample {i} has class index {class_id} but only {label_count} labels are declared"
            )));
        }
        samples.push(crate::dataset::Sample {
            class_id,
            features: FeatureVector {
                values,
                source_ref: (!source_ref.is_empty()).then_some(source_ref),
            },
        });
    }
    if r.pos != bytes.len() {
        return Err(Error::Format(format!(
            "{} trailing bytes after the {n_samples} declared samples (byte offset {})",
            bytes.len() - r.pos,
            r.pos
        )));
    }
    dataset.samples = samples;
    Ok(dataset)
}

fn check_writable(dataset: &Dataset) -> Result<()> {
    dataset.validate()?;
    if let Some(s) = dataset
        .samples
        .iter()
        .find(|s| s.class_id as usize >= dataset.labels.len())
    {
        return Err(Error::Data(format!(
            "class index {} has no label name ({} labels)",
            s.class_id,
            dataset.labels.len()
        )));
    }
    Ok(())
}

/// Encodes the binary feature layout. Components are narrowed to `f32`.
pub fn encode_features(dataset: &Dataset) -> Result<Vec<u8>> {
    check_writable(dataset)?;
    let mut out = Vec::with_capacity(22 + dataset.len() * (12 + 4 * dataset.dim));
    out.extend_from_slice(FEATURE_MAGIC);
    out.extend_from_slice(&FEATURE_VERSION.to_le_bytes());
    out.extend_from_slice(&(dataset.len() as u64).to_le_bytes());
    out.extend_from_slice(&(dataset.dim as u32).to_le_bytes());
    out.extend_from_slice(&(dataset.labels.len() as u32).to_le_bytes());
    let put_str = |out: &mut Vec<u8>, s: &str| {
        out.extend_from_slice(&(s.len() as u32).to_le_bytes());
        out.extend_from_slice(s.as_bytes());
    };
    for label in &dataset.labels {
        put_str(&mut out, label);
    }
    for (i, s) in dataset.samples.iter().enumerate() {
        out.extend_from_slice(&s.class_id.to_le_bytes());
        put_str(&mut out, s.features.ref_or_empty());
        for &v in &s.features.values {
            let narrow = v as f32;
            if !narrow.is_finite() {
                return Err(Error::Data(format!(
                    "sample {i}: value {v} does not fit in f32"
                )));
            }
            out.extend_from_slice(&narrow.to_le_bytes());
        }
    }
    Ok(out)
}

fn decode_csv(bytes: &[u8]) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(bytes);
    let header = reader
        .headers()
        .map_err(|e| Error::Format(format!("csv header: {e}")))?
        .clone();
    if header.len() < 3 || &header[0] != "label" || &header[1] != "source_ref" {
        return Err(Error::Format(
            "csv header must be label,source_ref,f0,...,f{n-1}".into(),
        ));
    }
    for (j, name) in header.iter().skip(2).enumerate() {
        if name != format!("f{j}") {
            return Err(Error::Format(format!(
                "csv column {} should be f{j}, found {name:?}",
                j + 2
            )));
        }
    }
    let dim = header.len() - 2;
    let mut ids: HashMap<String, ClassId> = HashMap::new();
    let mut dataset = Dataset::new(Vec::new(), dim);
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Format(format!("csv row {i}: {e}")))?;
        let label = &record[0];
        let class_id = match ids.get(label) {
            Some(&id) => id,
            None => {
                let id = dataset.labels.len() as ClassId;
                ids.insert(label.to_owned(), id);
                dataset.labels.push(label.to_owned());
                id
            }
        };
        let source_ref = &record[1];
        let values = record
            .iter()
            .skip(2)
            .enumerate()
            .map(|(j, field)| {
                let v: f64 = field.trim().parse().map_err(|_| {
                    Error::Format(format!(
                        "csv row {i}, column f{j}: {field:?} is not a number"
                    ))
                })?;
                if !v.is_finite() {
                    return Err(Error::Data(format!(
                        "sample {i} ({source_ref:?}) has non-finite component {j}"
                    )));
                }
                Ok(v)
            })
            .collect::<Result<Vec<_>>>()?;
        dataset.samples.push(crate::dataset::Sample {
            class_id,
            features: FeatureVector {
                values,
                source_ref: (!source_ref.is_empty()).then(|| source_ref.to_owned()),
            },
        });
    }
    Ok(dataset)
}

fn encode_csv(dataset: &Dataset) -> Result<Vec<u8>> {
    check_writable(dataset)?;
    let mut header = vec!["label".to_string(), "source_ref".into()];
    header.extend((0..dataset.dim).map(|j| format!("f{j}")));
    let rows: Vec<Vec<String>> = dataset
        .samples
        .iter()
        .map(|s| {
            let mut rec = vec![
                dataset.labels[s.class_id as usize].clone(),
                s.features.ref_or_empty().to_owned(),
            ];
            rec.extend(s.features.values.iter().map(f64::to_string));
            rec
        })
        .collect();
    Ok(crate::megaclouds::write_csv(&header, &rows)?.into_bytes())
}

#[derive(Serialize, Deserialize)]
struct ModelDocument {
    format_version: u32,
    dim: usize,
    labels: Vec<String>,
    config: TrainingConfig,
    config_fingerprint: String,
    normalization: Option<NormalizationParams>,
    classes: Vec<ClassModel>,
    megaclouds: Vec<MegaCloud>,
}

/// Serializes a model to its JSON document.
pub fn model_to_string(model: &Model) -> Result<String> {
    model.validate()?;
    check_partition(model, &model.megaclouds)?;
    let doc = ModelDocument {
        format_version: MODEL_FORMAT_VERSION,
        dim: model.dim,
        labels: model.labels.clone(),
        config: model.config.clone(),
        config_fingerprint: model.config.fingerprint(),
        normalization: model.normalization.clone(),
        classes: model.classes.clone(),
        megaclouds: model.megaclouds.clone(),
    };
    let mut text = serde_json::to_string_pretty(&doc)
        .map_err(|e| Error::Format(format!("model serialization failed: {e}")))?;
    text.push('\n');
    Ok(text)
}

/// Parses a model document, checking its version and invariants.
pub fn model_from_str(text: &str) -> Result<Model> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| Error::Format(format!("model is not valid JSON: {e}")))?;
    let version = value
        .get("format_version")
        .ok_or_else(|| Error::Format("model has no format_version".into()))?;
    if version.as_u64() != Some(u64::from(MODEL_FORMAT_VERSION)) {
        return Err(Error::Format(format!(
            "unsupported model format_version {version} (expected {MODEL_FORMAT_VERSION})"
        )));
    }
    let doc: ModelDocument = serde_json::from_value(value)
        .map_err(|e| Error::Format(format!("malformed model: {e}")))?;
    if doc.config_fingerprint != doc.config.fingerprint() {
        return Err(Error::Format(format!(
            "config fingerprint {:?} does not match config ({:?})",
            doc.config_fingerprint,
            doc.config.fingerprint()
        )));
    }
    let model = Model {
        dim: doc.dim,
        labels: doc.labels,
        classes: doc.classes,
        config: doc.config,
        normalization: doc.normalization,
        megaclouds: doc.megaclouds,
    };
    model
        .validate()
        .and_then(|_| check_partition(&model, &model.megaclouds))
        .map_err(|e| Error::Format(format!("inconsistent model: {e}")))?;
    Ok(model)
}

pub fn save_model(model: &Model, path: impl AsRef<Path>) -> Result<()> {
    let text = model_to_string(model)?;
    write_atomic(path.as_ref(), text.as_bytes())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<Model> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    model_from_str(&text)
}
