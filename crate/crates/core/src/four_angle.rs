//! Normal maps from four hand-shaded images lit from the top, bottom, left
//! and right.
//!
//! Left/right drive the red (X) channel and top/bottom the green (Y)
//! channel. The blue level is the pre-normalization Z weight, so raising it
//! flattens the result.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::raster::{decode_component, to_grayscale, NormalField, RasterImage, ScalarField};

#[derive(Clone, Debug)]
pub struct FourAngleInputs {
    pub top: ScalarField,
    pub bottom: ScalarField,
    pub left: ScalarField,
    pub right: ScalarField,
}

impl FourAngleInputs {
    pub fn new(
        top: ScalarField,
        bottom: ScalarField,
        left: ScalarField,
        right: ScalarField,
    ) -> Result<Self> {
        let dims = top.dimensions();
        for other in [&bottom, &left, &right] {
            if other.dimensions() != dims {
                return Err(Error::mismatch(dims, other.dimensions()));
            }
        }
        Ok(Self {
            top,
            bottom,
            left,
            right,
        })
    }

    /// Converts four color images to luma, in top, bottom, left, right order.
    pub fn from_images(images: [&RasterImage; 4]) -> Result<Self> {
        let [t, b, l, r] = images.map(to_grayscale);
        Self::new(t, b, l, r)
    }

    pub fn dimensions(&self) -> (u32, u32) {
        self.top.dimensions()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MergeMode {
    /// Channel = positive-side light minus negative-side light.
    #[default]
    Difference,
    /// Negative-side image in [0, 127], positive-side image in [128, 255],
    /// combined with [`overlay_blend`].
    Overlay,
}

impl FromStr for MergeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "difference" => Ok(MergeMode::Difference),
            "overlay" => Ok(MergeMode::Overlay),
            other => Err(Error::InvalidParam(format!(
                "unknown merge mode '{other}' (expected difference or overlay)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FourAngleParams {
    pub blue_level: u8,
    pub merge_mode: MergeMode,
}

impl Default for FourAngleParams {
    fn default() -> Self {
        Self {
            blue_level: 255,
            merge_mode: MergeMode::Difference,
        }
    }
}

impl FourAngleParams {
    pub fn validate(&self) -> Result<()> {
        if self.blue_level == 0 {
            return Err(Error::InvalidParam("blue_level must be at least 1".into()));
        }
        Ok(())
    }
}

fn round_div(num: u32, den: u32) -> u32 {
    (2 * num + den) / (2 * den)
}

/// Overlay compositing of `b` onto base `a`: multiply below mid-gray,
/// screen above it.
pub fn overlay_blend(a: u8, b: u8) -> u8 {
    let (a, b) = (a as u32, b as u32);
    let v = if a < 128 {
        round_div(2 * a * b, 255)
    } else {
        255 - round_div(2 * (255 - a) * (255 - b), 255)
    };
    v as u8
}

fn to_byte(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 127.0 + 0.5).floor() as u8
}

/// One channel in overlay mode: the image lit from the negative side is
/// inverted into [0, 127] so brighter means "faces away", the positive side
/// lands in [128, 255].
fn overlay_channel(negative: f64, positive: f64) -> f64 {
    let low = 127 - to_byte(negative);
    let high = 128 + to_byte(positive);
    decode_component(overlay_blend(low, high))
}

pub fn merge_four_angles(inp: &FourAngleInputs, p: &FourAngleParams) -> Result<NormalField> {
    p.validate()?;
    let z = p.blue_level as f64 / 255.0;
    let (w, h) = inp.dimensions();
    Ok(NormalField::from_fn(w, h, |x, y| {
        let (t, b) = (inp.top.get(x, y), inp.bottom.get(x, y));
        let (l, r) = (inp.left.get(x, y), inp.right.get(x, y));
        match p.merge_mode {
            MergeMode::Difference => [r - l, t - b, z],
            MergeMode::Overlay => [overlay_channel(l, r), overlay_channel(b, t), z],
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::{encode_normals, Grid};

    fn uniform(v: f64) -> ScalarField {
        Grid::filled(4, 3, v)
    }

    #[test]
    fn overlay_reference_values() {
        for b in 0..=255u8 {
            assert_eq!(overlay_blend(0, b), 0);
            assert_eq!(overlay_blend(255, b), 255);
        }
        assert_eq!(overlay_blend(64, 128), 64);
        // 2·200·100/255 = 156.86 → screen branch: 255 − round(2·55·155/255)
        assert_eq!(overlay_blend(200, 100), 255 - 67);
    }

    #[test]
    fn identical_inputs_are_flat() {
        let f = Grid::from_fn(5, 5, |x, y| ((x * 3 + y) % 7) as f64 / 7.0);
        let inp = FourAngleInputs::new(f.clone(), f.clone(), f.clone(), f).unwrap();
        let n = merge_four_angles(&inp, &FourAngleParams::default()).unwrap();
        assert!(encode_normals(&n)
            .pixels()
            .all(|p| p == [128, 128, 255, 255]));
    }

    #[test]
    fn lit_from_left_tilts_left() {
        let inp =
            FourAngleInputs::new(uniform(0.5), uniform(0.5), uniform(1.0), uniform(0.0)).unwrap();
        for mode in [MergeMode::Difference, MergeMode::Overlay] {
            let p = FourAngleParams {
                blue_level: 255,
                merge_mode: mode,
            };
            let img = encode_normals(&merge_four_angles(&inp, &p).unwrap());
            assert!(img.pixels().all(|px| px[0] < 128), "{mode:?}");
        }
    }

    #[test]
    fn lit_from_top_tilts_up() {
        let inp =
            FourAngleInputs::new(uniform(0.9), uniform(0.1), uniform(0.5), uniform(0.5)).unwrap();
        for mode in [MergeMode::Difference, MergeMode::Overlay] {
            let p = FourAngleParams {
                blue_level: 200,
                merge_mode: mode,
            };
            let n = merge_four_angles(&inp, &p).unwrap();
            assert!(n.get(1, 1)[1] > 0.0, "{mode:?}");
        }
    }

    #[test]
    fn blue_level_flattens() {
        let inp =
            FourAngleInputs::new(uniform(0.2), uniform(0.7), uniform(0.9), uniform(0.3)).unwrap();
        let mut last = f64::INFINITY;
        for blue in [1u8, 30, 90, 128, 200, 255] {
            let p = FourAngleParams {
                blue_level: blue,
                merge_mode: MergeMode::Difference,
            };
            let n = merge_four_angles(&inp, &p).unwrap().get(0, 0);
            let angle = n[2].acos();
            assert!(angle <= last);
            assert!(n[2] > 0.0);
            last = angle;
        }
    }

    #[test]
    fn rejects_mismatch_and_zero_blue() {
        assert!(FourAngleInputs::new(
            uniform(0.0),
            uniform(0.0),
            uniform(0.0),
            Grid::filled(2, 2, 0.0)
        )
        .is_err());
        let inp =
            FourAngleInputs::new(uniform(0.0), uniform(0.0), uniform(0.0), uniform(0.0)).unwrap();
        let p = FourAngleParams {
            blue_level: 0,
            ..Default::default()
        };
        assert!(merge_four_angles(&inp, &p).is_err());
    }

    #[test]
    fn parses_modes() {
        assert_eq!("overlay".parse::<MergeMode>().unwrap(), MergeMode::Overlay);
        assert!("multiply".parse::<MergeMode>().is_err());
    }
}
