//! Sobel gradients and gradient-to-normal conversion, for color maps and
//! height maps alike.

use crate::error::{Error, Result};
use crate::raster::{to_grayscale, Grid, NormalField, RasterImage, ScalarField};

pub type Kernel3 = [[f64; 3]; 3];

/// Horizontal Sobel kernel, scaled so a unit-slope ramp yields 1.
pub const SOBEL_X: Kernel3 = [
    [-1.0 / 8.0, 0.0, 1.0 / 8.0],
    [-2.0 / 8.0, 0.0, 2.0 / 8.0],
    [-1.0 / 8.0, 0.0, 1.0 / 8.0],
];

pub const SOBEL_Y: Kernel3 = [
    [-1.0 / 8.0, -2.0 / 8.0, -1.0 / 8.0],
    [0.0, 0.0, 0.0],
    [1.0 / 8.0, 2.0 / 8.0, 1.0 / 8.0],
];

/// Alpha below which color-map pixels emit the flat normal.
const COLOR_MAP_ALPHA_CUTOFF: u8 = 128;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EdgePolicy {
    #[default]
    ClampReplicate,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SobelParams {
    /// Gradient multiplier. Larger values tilt normals further from +Z,
    /// which is the same as lowering the blue channel weight.
    pub strength: f64,
    pub edge_policy: EdgePolicy,
}

impl Default for SobelParams {
    fn default() -> Self {
        Self {
            strength: 1.0,
            edge_policy: EdgePolicy::ClampReplicate,
        }
    }
}

impl SobelParams {
    pub fn with_strength(strength: f64) -> Self {
        Self {
            strength,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.strength > 0.0 && self.strength.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "strength must be a positive finite number, got {}",
                self.strength
            )));
        }
        Ok(())
    }
}

/// Per-pixel partial derivatives, in value-per-pixel units. `gy` is the
/// derivative along increasing row index (image down).
#[derive(Clone, Debug, PartialEq)]
pub struct GradientField {
    pub gx: ScalarField,
    pub gy: ScalarField,
}

impl GradientField {
    pub fn dimensions(&self) -> (u32, u32) {
        self.gx.dimensions()
    }

    pub fn magnitude(&self) -> ScalarField {
        let (w, h) = self.dimensions();
        Grid::from_fn(w, h, |x, y| self.gx.get(x, y).hypot(self.gy.get(x, y)))
    }
}

/// 3×3 correlation with clamp-replicate borders:
/// `out(x, y) = Σ kernel[i][j] · src(x + j − 1, y + i − 1)`.
pub fn convolve3x3(src: &ScalarField, kernel: &Kernel3) -> ScalarField {
    let (w, h) = src.dimensions();
    Grid::from_fn(w, h, |x, y| {
        let mut acc = 0.0;
        for (i, row) in kernel.iter().enumerate() {
            for (j, k) in row.iter().enumerate() {
                acc += k * src.get_clamped(x as i64 + j as i64 - 1, y as i64 + i as i64 - 1);
            }
        }
        acc
    })
}

/// Sobel derivatives of `src`.
///
/// Numerically equal to correlating with [`SOBEL_X`] and [`SOBEL_Y`], but the
/// terms are grouped so mirrored or rotated inputs produce exactly negated or
/// swapped outputs, with no rounding drift between the two.
pub fn sobel_gradients(src: &ScalarField) -> GradientField {
    let (w, h) = src.dimensions();
    let mut gx = Grid::filled(w, h, 0.0);
    let mut gy = Grid::filled(w, h, 0.0);
    for y in 0..h {
        for x in 0..w {
            let s = |dx: i64, dy: i64| src.get_clamped(x as i64 + dx, y as i64 + dy);
            let right = (s(1, -1) + s(1, 1)) + 2.0 * s(1, 0);
            let left = (s(-1, -1) + s(-1, 1)) + 2.0 * s(-1, 0);
            let below = (s(-1, 1) + s(1, 1)) + 2.0 * s(0, 1);
            let above = (s(-1, -1) + s(1, -1)) + 2.0 * s(0, -1);
            gx.set(x, y, (right - left) / 8.0);
            gy.set(x, y, (below - above) / 8.0);
        }
    }
    GradientField { gx, gy }
}

/// `n = normalize(−gx·s, gy·s, 1)`. The row derivative keeps its sign because
/// rows grow downward while normal +Y points up.
pub fn gradients_to_normals(g: &GradientField, p: &SobelParams) -> NormalField {
    let (w, h) = g.dimensions();
    let s = p.strength;
    NormalField::from_fn(w, h, |x, y| [-g.gx.get(x, y) * s, g.gy.get(x, y) * s, 1.0])
}

pub fn normal_from_height_map(h: &ScalarField, p: &SobelParams) -> Result<NormalField> {
    p.validate()?;
    Ok(gradients_to_normals(&sobel_gradients(h), p))
}

/// Grayscale → Sobel → normals. Pixels with alpha below 128 get the flat
/// normal.
pub fn normal_from_color_map(img: &RasterImage, p: &SobelParams) -> Result<NormalField> {
    p.validate()?;
    let g = sobel_gradients(&to_grayscale(img));
    let n = gradients_to_normals(&g, p);
    Ok(n.flatten_where_not(|x, y| img.pixel(x, y)[3] >= COLOR_MAP_ALPHA_CUTOFF))
}
