//! Frame containers and the per-frame image operations used before signal
//! extraction: masking, skin segmentation, translation registration and
//! Gaussian-pyramid downscaling.

mod frame;
mod mask;
mod pyramid;
mod registration;
mod skin;

pub use frame::{FloatImage, FloatSequence, Frame, FrameSequence, RgbImage};
pub use mask::{mean_rgb_over_mask, RoiMask};
pub use pyramid::{downscale_once, pyramid_downscale, pyramid_level_for, pyramid_frame, PyramidLevel};
pub use registration::{register_translation, shift_image, Registration};
pub use skin::{is_skin, rgb_to_cbcr, skin_segment};
