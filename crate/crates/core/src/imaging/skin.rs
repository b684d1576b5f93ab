use super::{RgbImage, RoiMask};

/// Full-range BT.601 chroma of an RGB8 pixel.
pub fn rgb_to_cbcr(p: [u8; 3]) -> (f64, f64) {
    let (r, g, b) = (p[0] as f64, p[1] as f64, p[2] as f64);
    let cb = 128.0 - 0.168_736 * r - 0.331_264 * g + 0.5 * b;
    let cr = 128.0 + 0.5 * r - 0.418_688 * g - 0.081_312 * b;
    (cb, cr)
}

/// YCbCr box rule: 77 ≤ Cb ≤ 127 and 133 ≤ Cr ≤ 173.
pub fn is_skin(p: [u8; 3]) -> bool {
    let (cb, cr) = rgb_to_cbcr(p);
    (77.0..=127.0).contains(&cb) && (133.0..=173.0).contains(&cr)
}

pub fn skin_segment(frame: &RgbImage) -> RoiMask {
    let (w, h) = frame.dims();
    RoiMask::from_fn(w, h, |x, y| is_skin(frame.pixel(x, y)))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent route through the ITU-R BT.601 matrix in Y'PbPr form.
    fn oracle(p: [u8; 3]) -> (f64, f64) {
        let (kr, kb) = (0.299, 0.114);
        let (r, g, b) = (p[0] as f64, p[1] as f64, p[2] as f64);
        let y = kr * r + (1.0 - kr - kb) * g + kb * b;
        (128.0 + (b - y) / (2.0 * (1.0 - kb)), 128.0 + (r - y) / (2.0 * (1.0 - kr)))
    }

    #[test]
    fn conversion_matches_oracle() {
        for p in [[200, 140, 120], [0, 0, 0], [0, 255, 0], [255, 255, 255], [13, 77, 250]] {
            let (cb, cr) = rgb_to_cbcr(p);
            let (ocb, ocr) = oracle(p);
            assert!((cb - ocb).abs() < 1e-3 && (cr - ocr).abs() < 1e-3, "{p:?}");
        }
    }

    #[test]
    fn classification_examples() {
        assert!(is_skin([200, 140, 120]));
        let (cb, cr) = rgb_to_cbcr([0, 0, 0]);
        assert_eq!((cb, cr), (128.0, 128.0));
        assert!(!is_skin([0, 0, 0]));
        assert!(!is_skin([0, 255, 0]));
    }

    #[test]
    fn pointwise() {
        let img = RgbImage::from_fn(4, 1, |x, _| if x % 2 == 0 { [200, 140, 120] } else { [0, 255, 0] });
        let m = skin_segment(&img);
        assert_eq!(m.bits(), &[true, false, true, false]);
    }
}
