//! Result files: timeline and feature CSVs, binary value maps, model JSON and
//! synthetic ground truth.

use std::path::Path;

use rppg_core::pad::{PadSample, SvmModel};
use rppg_core::scales::{MetricsTimeline, RegionName, ValueMap};
use rppg_core::signal::WindowMetrics;
use rppg_core::synth::{SynthSpec, SynthTruth};
use serde::{Deserialize, Serialize};

use crate::io::{read_json_file, write_bytes, write_json};
use crate::{Error, Result};

pub const TIMELINE_HEADER: [&str; 7] = ["t_start", "f_hr", "bpm", "snr_db", "magnitude", "pi", "rho_ref"];
pub const FEATURE_HEADER: [&str; 7] = ["subject_id", "region", "window", "snr_db", "magnitude", "rho_ref", "label"];
pub const MAP_MAGIC: &[u8; 8] = b"RPPGMAP1";

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

fn reader(path: &Path, header: &[&str]) -> Result<csv::Reader<std::fs::File>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| Error::format(path, e))?;
    let got: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::format(path, e))?
        .iter()
        .map(|s| s.trim().to_string())
        .collect();
    if got != header {
        return Err(Error::format(path, format!("expected header `{}`", header.join(","))));
    }
    Ok(rdr)
}

fn parse<T: std::str::FromStr>(path: &Path, row: usize, s: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    s.trim()
        .parse()
        .map_err(|e| Error::format(path, format!("row {row}: `{s}`: {e}")))
}

fn parse_opt(path: &Path, row: usize, s: &str) -> Result<Option<f64>> {
    if s.trim().is_empty() {
        Ok(None)
    } else {
        parse(path, row, s).map(Some)
    }
}

/// Absent PI or correlation values are written as empty fields.
pub fn write_timeline_csv(path: &Path, tl: &MetricsTimeline) -> Result<()> {
    let rows = tl.entries.iter().map(|e| {
        vec![
            e.t_start.to_string(),
            e.f_hr.to_string(),
            e.bpm.to_string(),
            e.snr_db.to_string(),
            e.magnitude.to_string(),
            opt(e.pi),
            opt(e.rho_ref),
        ]
    });
    write_bytes(path, &csv_bytes(&TIMELINE_HEADER, rows))
}

pub fn read_timeline_csv(path: &Path) -> Result<MetricsTimeline> {
    let mut rdr = reader(path, &TIMELINE_HEADER)?;
    let mut entries = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::format(path, e))?;
        let row = i + 2;
        entries.push(WindowMetrics {
            t_start: parse(path, row, &rec[0])?,
            f_hr: parse(path, row, &rec[1])?,
            bpm: parse(path, row, &rec[2])?,
            snr_db: parse(path, row, &rec[3])?,
            magnitude: parse(path, row, &rec[4])?,
            pi: parse_opt(path, row, &rec[5])?,
            rho_ref: parse_opt(path, row, &rec[6])?,
        });
    }
    Ok(MetricsTimeline { entries })
}

/// `RPPGMAP1`, `u32` width, `u32` height, `u16` name length, UTF-8 name,
/// then row-major `f32` values; all little-endian, NaN marks absent cells.
pub fn encode_map(name: &str, map: &ValueMap) -> Vec<u8> {
    let mut out = Vec::with_capacity(18 + name.len() + 4 * map.values.len());
    out.extend_from_slice(MAP_MAGIC);
    out.extend_from_slice(&(map.width as u32).to_le_bytes());
    out.extend_from_slice(&(map.height as u32).to_le_bytes());
    out.extend_from_slice(&(name.len() as u16).to_le_bytes());
    out.extend_from_slice(name.as_bytes());
    for &v in &map.values {
        let v = if v.is_nan() { f32::NAN } else { v as f32 };
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_map(bytes: &[u8]) -> std::result::Result<(String, ValueMap), String> {
    let take = |at: usize, n: usize| bytes.get(at..at + n).ok_or_else(|| "truncated map".to_string());
    if take(0, 8)? != MAP_MAGIC {
        return Err("not a map file".into());
    }
    let w = u32::from_le_bytes(take(8, 4)?.try_into().unwrap()) as usize;
    let h = u32::from_le_bytes(take(12, 4)?.try_into().unwrap()) as usize;
    let nl = u16::from_le_bytes(take(16, 2)?.try_into().unwrap()) as usize;
    let name = std::str::from_utf8(take(18, nl)?).map_err(|e| e.to_string())?.to_string();
    let body = &bytes[18 + nl..];
    if body.len() != 4 * w * h {
        return Err(format!("expected {} values, found {} bytes", w * h, body.len()));
    }
    let values = body
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
        .collect();
    Ok((
        name,
        ValueMap {
            width: w,
            height: h,
            values,
        },
    ))
}

pub fn write_map(path: &Path, name: &str, map: &ValueMap) -> Result<()> {
    write_bytes(path, &encode_map(name, map))
}

pub fn read_map(path: &Path) -> Result<(String, ValueMap)> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_map(&bytes).map_err(|e| Error::format(path, e))
}

pub fn write_features_csv(path: &Path, samples: &[PadSample]) -> Result<()> {
    let rows = samples.iter().map(|s| {
        vec![
            s.subject_id.clone(),
            s.region.as_str().to_string(),
            s.window_index.to_string(),
            s.features[0].to_string(),
            s.features[1].to_string(),
            s.features[2].to_string(),
            s.label.to_string(),
        ]
    });
    write_bytes(path, &csv_bytes(&FEATURE_HEADER, rows))
}

pub fn read_features_csv(path: &Path) -> Result<Vec<PadSample>> {
    let mut rdr = reader(path, &FEATURE_HEADER)?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::format(path, e))?;
        let row = i + 2;
        let region = RegionName::parse(rec[1].trim())
            .ok_or_else(|| Error::format(path, format!("row {row}: unknown region `{}`", &rec[1])))?;
        let label: u8 = parse(path, row, &rec[6])?;
        if label > 1 {
            return Err(Error::format(path, format!("row {row}: label must be 0 or 1")));
        }
        out.push(PadSample {
            subject_id: rec[0].trim().to_string(),
            region,
            window_index: parse(path, row, &rec[2])?,
            features: [
                parse(path, row, &rec[3])?,
                parse(path, row, &rec[4])?,
                parse(path, row, &rec[5])?,
            ],
            label,
        });
    }
    Ok(out)
}

/// Model file: the trained SVM together with the feature order it expects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub features: Vec<String>,
    pub model: SvmModel,
}

impl ModelFile {
    pub fn new(model: SvmModel) -> Self {
        Self {
            features: FEATURE_HEADER[3..6].iter().map(|s| s.to_string()).collect(),
            model,
        }
    }
}

pub fn save_model(path: &Path, model: &SvmModel) -> Result<()> {
    write_json(path, &ModelFile::new(model.clone()))
}

pub fn load_model(path: &Path) -> Result<SvmModel> {
    let f: ModelFile = read_json_file(path)?;
    if f.features != ModelFile::new(f.model.clone()).features {
        return Err(Error::format(path, "model was trained on a different feature set"));
    }
    Ok(f.model)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthFile {
    pub hr_bpm: f64,
    pub f_hr: f64,
    pub fps: f64,
    pub width: usize,
    pub height: usize,
    /// Relative to the directory holding `truth.json`.
    pub amplitude_map: String,
    pub waveform: String,
    pub spec: SynthSpec,
}

/// Writes `truth.json`, `amplitude.rpmap` and `waveform.csv` into `dir`.
pub fn write_truth(dir: &Path, spec: &SynthSpec, truth: &SynthTruth) -> Result<()> {
    let amp = ValueMap {
        width: truth.width,
        height: truth.height,
        values: truth.amplitude_map.clone(),
    };
    write_map(&dir.join("amplitude.rpmap"), "amplitude", &amp)?;
    let rows = truth
        .waveform
        .iter()
        .enumerate()
        .map(|(i, v)| vec![(i as f64 / spec.fs).to_string(), v.to_string()]);
    write_bytes(&dir.join("waveform.csv"), &csv_bytes(&["t", "pulse"], rows))?;
    write_json(
        &dir.join("truth.json"),
        &TruthFile {
            hr_bpm: truth.hr_bpm,
            f_hr: truth.f_hr,
            fps: spec.fs,
            width: truth.width,
            height: truth.height,
            amplitude_map: "amplitude.rpmap".into(),
            waveform: "waveform.csv".into(),
            spec: spec.clone(),
        },
    )
}
