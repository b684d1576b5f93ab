use alloc::vec::Vec;

use crate::{Error, Result};

/// Read access shared by 8-bit and floating-point frames.
pub trait Frame {
    fn width(&self) -> usize;
    fn height(&self) -> usize;
    /// Channel values of the pixel at row-major index `i`.
    fn rgb(&self, i: usize) -> [f64; 3];
}

/// Interleaved, row-major RGB8 image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != width * height * 3 {
            return Err(Error::DimensionMismatch {
                expected: (width, height),
                got: (data.len() / 3, 1),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, color: [u8; 3]) -> Self {
        let data = color.iter().copied().cycle().take(width * height * 3).collect();
        Self {
            width,
            height,
            data,
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> [u8; 3]) -> Self {
        let mut data = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = 3 * (y * self.width + x);
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn set_pixel(&mut self, x: usize, y: usize, v: [u8; 3]) {
        let i = 3 * (y * self.width + x);
        self.data[i..i + 3].copy_from_slice(&v);
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.data
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.data
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }
}

impl Frame for RgbImage {
    fn width(&self) -> usize {
        self.width
    }

    fn height(&self) -> usize {
        self.height
    }

    fn rgb(&self, i: usize) -> [f64; 3] {
        let p = &self.data[3 * i..3 * i + 3];
        [p[0] as f64, p[1] as f64, p[2] as f64]
    }
}

/// Interleaved RGB image with `f32` channels, used for pyramid levels.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f32>,
}

impl FloatImage {
    pub fn from_rgb(img: &RgbImage) -> Self {
        Self {
            width: img.width,
            height: img.height,
            data: img.data.iter().map(|&v| v as f32).collect(),
        }
    }
}

impl Frame for FloatImage {
    fn width(&self) -> usize {
        self.width
    }

    fn height(&self) -> usize {
        self.height
    }

    fn rgb(&self, i: usize) -> [f64; 3] {
        let p = &self.data[3 * i..3 * i + 3];
        [p[0] as f64, p[1] as f64, p[2] as f64]
    }
}

/// Ordered RGB8 frames sampled at `fs` frames per second.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSequence {
    pub width: usize,
    pub height: usize,
    pub fs: f64,
    pub frames: Vec<RgbImage>,
}

impl FrameSequence {
    pub fn new(fs: f64, frames: Vec<RgbImage>) -> Result<Self> {
        let first = frames.first().ok_or(Error::TooShortRecording {
            needed: 1.0 / fs,
            got: 0.0,
        })?;
        let dims = first.dims();
        if let Some(bad) = frames.iter().find(|f| f.dims() != dims) {
            return Err(Error::DimensionMismatch {
                expected: dims,
                got: bad.dims(),
            });
        }
        if !(fs.is_finite() && fs > 0.0) {
            return Err(Error::InvalidConfig(alloc::format!("frame rate {fs} must be positive")));
        }
        Ok(Self {
            width: dims.0,
            height: dims.1,
            fs,
            frames,
        })
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.frames.len() as f64 / self.fs
    }
}

/// Ordered floating-point frames, e.g. one pyramid level of a recording.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatSequence {
    pub width: usize,
    pub height: usize,
    pub fs: f64,
    pub frames: Vec<FloatImage>,
}

impl FloatSequence {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.frames.len() as f64 / self.fs
    }
}

impl From<&FrameSequence> for FloatSequence {
    fn from(seq: &FrameSequence) -> Self {
        Self {
            width: seq.width,
            height: seq.height,
            fs: seq.fs,
            frames: seq.frames.iter().map(FloatImage::from_rgb).collect(),
        }
    }
}
