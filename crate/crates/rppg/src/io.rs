//! Frame directories, raw RGB8 streams, mask images and landmark tables.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rppg_core::exec::Executor;
use rppg_core::imaging::{FrameSequence, RgbImage, RoiMask};
use rppg_core::scales::{LandmarkInput, LandmarkSet};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const SIDECAR: &str = "meta.json";
/// Smallest raw-stream header (length prefix plus padded JSON) the writer emits.
pub const RAW_HEADER_MIN: usize = 48;

/// Contents of `meta.json` and of the raw-stream header.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameMeta {
    pub width: usize,
    pub height: usize,
    pub fps: f64,
    pub count: usize,
}

impl FrameMeta {
    pub fn of(seq: &FrameSequence) -> Self {
        Self {
            width: seq.width,
            height: seq.height,
            fps: seq.fs,
            count: seq.len(),
        }
    }

    fn frame_bytes(&self) -> usize {
        self.width * self.height * 3
    }
}

/// Loads a frame directory or, for a regular file, a raw stream.
pub fn load_frame_sequence<E: Executor>(path: &Path, exec: &E) -> Result<FrameSequence> {
    if path.is_dir() {
        load_frame_dir(path, exec)
    } else {
        load_raw_stream(path)
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    serde_json::from_slice(&read(path)?).map_err(|e| Error::format(path, e))
}

/// Frame files of a directory (`.png` or `.ppm`) in lexicographic order.
pub fn frame_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && matches!(
                    p.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref(),
                    Some("png" | "ppm")
                )
        })
        .collect();
    files.sort();
    Ok(files)
}

fn decode(index: usize, path: &Path) -> Result<RgbImage> {
    let img = image::open(path).map_err(|e| Error::CorruptFrame {
        index,
        reason: format!("{}: {e}", path.display()),
    })?;
    let rgb = img.to_rgb8();
    let (w, h) = (rgb.width() as usize, rgb.height() as usize);
    Ok(RgbImage::new(w, h, rgb.into_raw())?)
}

fn check_dims(index: usize, meta: &FrameMeta, img: &RgbImage) -> Result<()> {
    if img.dims() != (meta.width, meta.height) {
        return Err(Error::DimensionMismatch {
            index,
            expected: (meta.width, meta.height),
            got: img.dims(),
        });
    }
    Ok(())
}

/// Reads `frame_*.png|ppm` plus the `meta.json` sidecar. Frames decode in
/// parallel on `exec`.
pub fn load_frame_dir<E: Executor>(dir: &Path, exec: &E) -> Result<FrameSequence> {
    let side = dir.join(SIDECAR);
    if !side.is_file() {
        return Err(Error::MissingSidecar(side));
    }
    let meta: FrameMeta = read_json(&side)?;
    let files = frame_files(dir)?;
    if files.len() < meta.count {
        return Err(Error::CorruptFrame {
            index: files.len(),
            reason: format!("sidecar declares {} frames, found {}", meta.count, files.len()),
        });
    }
    let frames = exec.map(meta.count, |i| decode(i, &files[i]));
    let frames = frames.into_iter().collect::<Result<Vec<_>>>()?;
    for (i, f) in frames.iter().enumerate() {
        check_dims(i, &meta, f)?;
    }
    Ok(FrameSequence::new(meta.fps, frames)?)
}

/// Writes `frame_%06d.png` files and the sidecar into `dir`.
pub fn write_frame_dir<E: Executor>(dir: &Path, seq: &FrameSequence, exec: &E) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let written = exec.map(seq.len(), |i| save_png(&dir.join(format!("frame_{i:06}.png")), &seq.frames[i]));
    written.into_iter().collect::<Result<Vec<_>>>()?;
    write_json(&dir.join(SIDECAR), &FrameMeta::of(seq))
}

/// Raw stream: `u32` little-endian JSON length, the JSON header (space padded
/// to at least [`RAW_HEADER_MIN`] bytes in total), then frame-major,
/// row-major interleaved RGB8.
pub fn load_raw_stream(path: &Path) -> Result<FrameSequence> {
    let bytes = read(path)?;
    if bytes.len() < 4 {
        return Err(Error::format(path, "truncated header"));
    }
    let n = u32::from_le_bytes(bytes[..4].try_into().unwrap()) as usize;
    let body = bytes.get(4..4 + n).ok_or_else(|| Error::format(path, "truncated header"))?;
    let meta: FrameMeta = serde_json::from_slice(body).map_err(|e| Error::format(path, e))?;
    let fb = meta.frame_bytes();
    if fb == 0 {
        return Err(Error::format(path, "zero frame size"));
    }
    let payload = &bytes[4 + n..];
    let available = payload.len() / fb;
    if available < meta.count {
        return Err(Error::CorruptFrame {
            index: available,
            reason: format!("stream holds {} of {} declared frames", available, meta.count),
        });
    }
    if payload.len() != meta.count * fb {
        return Err(Error::CorruptFrame {
            index: meta.count,
            reason: format!("{} trailing bytes", payload.len() - meta.count * fb),
        });
    }
    let frames = payload
        .chunks_exact(fb)
        .map(|c| RgbImage::new(meta.width, meta.height, c.to_vec()))
        .collect::<rppg_core::Result<Vec<_>>>()?;
    Ok(FrameSequence::new(meta.fps, frames)?)
}

pub fn write_raw_stream(path: &Path, seq: &FrameSequence) -> Result<()> {
    let mut json = serde_json::to_vec(&FrameMeta::of(seq)).expect("meta serializes");
    while json.len() + 4 < RAW_HEADER_MIN {
        json.push(b' ');
    }
    let mut out = Vec::with_capacity(4 + json.len() + seq.len() * seq.width * seq.height * 3);
    out.extend_from_slice(&(json.len() as u32).to_le_bytes());
    out.extend_from_slice(&json);
    for f in &seq.frames {
        out.extend_from_slice(f.as_bytes());
    }
    write_bytes(path, &out)
}

/// Grayscale (or any) image; nonzero pixels are included.
pub fn load_mask(path: &Path) -> Result<RoiMask> {
    let img = image::open(path).map_err(|e| Error::format(path, e))?.to_luma8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    Ok(RoiMask::new(w, h, img.into_raw().into_iter().map(|v| v != 0).collect())?)
}

pub fn save_mask(path: &Path, mask: &RoiMask) -> Result<()> {
    let (w, h) = mask.dims();
    let data = mask.bits().iter().map(|&b| if b { 255 } else { 0 }).collect();
    let img = image::GrayImage::from_raw(w as u32, h as u32, data).expect("mask buffer");
    ensure_parent(path)?;
    img.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| Error::format(path, e))
}

pub fn save_png(path: &Path, img: &RgbImage) -> Result<()> {
    let (w, h) = img.dims();
    let buf = image::RgbImage::from_raw(w as u32, h as u32, img.as_bytes().to_vec()).expect("frame buffer");
    ensure_parent(path)?;
    buf.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| Error::format(path, e))
}

/// Landmarks from CSV: `index,x,y` (68 rows, static) or `frame,index,x,y`
/// (68 rows per frame).
pub fn load_landmarks(path: &Path, width: usize, height: usize) -> Result<LandmarkInput> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| Error::format(path, e))?;
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::format(path, e))?
        .iter()
        .map(|h| h.trim().to_ascii_lowercase())
        .collect();
    let per_frame = match headers.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["index", "x", "y"] => false,
        ["frame", "index", "x", "y"] => true,
        _ => return Err(Error::format(path, "expected header `index,x,y` or `frame,index,x,y`")),
    };
    // frame -> index -> point
    let mut table: std::collections::BTreeMap<usize, std::collections::BTreeMap<usize, (f64, f64)>> =
        Default::default();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::format(path, e))?;
        let field = |i: usize| -> Result<&str> {
            rec.get(i)
                .map(str::trim)
                .ok_or_else(|| Error::format(path, format!("row {}: missing column", line + 2)))
        };
        let int = |i: usize| -> Result<usize> {
            field(i)?
                .parse()
                .map_err(|e| Error::format(path, format!("row {}: {e}", line + 2)))
        };
        let real = |i: usize| -> Result<f64> {
            field(i)?
                .parse()
                .map_err(|e| Error::format(path, format!("row {}: {e}", line + 2)))
        };
        let o = usize::from(per_frame);
        let frame = if per_frame { int(0)? } else { 0 };
        let (idx, x, y) = (int(o)?, real(o + 1)?, real(o + 2)?);
        if table.entry(frame).or_default().insert(idx, (x, y)).is_some() {
            return Err(Error::format(path, format!("duplicate landmark {idx} in frame {frame}")));
        }
    }
    let mut sets = Vec::with_capacity(table.len());
    for (k, (frame, pts)) in table.into_iter().enumerate() {
        if frame != k {
            return Err(Error::format(path, format!("landmarks for frame {k} missing")));
        }
        if pts.keys().copied().ne(0..pts.len()) {
            return Err(Error::format(path, format!("frame {frame}: landmark indices must run 0..{}", pts.len())));
        }
        sets.push(LandmarkSet::new(pts.into_values().collect(), width, height)?);
    }
    match (per_frame, sets.len()) {
        (_, 0) => Err(Error::format(path, "no landmarks")),
        (false, _) => Ok(LandmarkInput::Static(sets.pop().unwrap())),
        (true, _) => Ok(LandmarkInput::PerFrame(sets)),
    }
}

pub fn write_landmarks(path: &Path, lm: &LandmarkSet) -> Result<()> {
    let mut s = String::from("index,x,y\n");
    for (i, (x, y)) in lm.points().iter().enumerate() {
        s.push_str(&format!("{i},{x},{y}\n"));
    }
    write_bytes(path, s.as_bytes())
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    Ok(())
}

pub(crate) fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    ensure_parent(path)?;
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(bytes).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_json<T: Serialize>(path: &Path, v: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    write_bytes(path, s.as_bytes())
}

pub(crate) fn read_json_file<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    read_json(path)
}
