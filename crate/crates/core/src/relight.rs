//! Per-pixel Lambertian point-light shading of a sprite with its normal map.

use crate::error::{Error, Result};
use crate::raster::{NormalField, RasterImage};

/// Distance falloff `1 / (constant + linear·d + quadratic·d²)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Attenuation {
    pub constant: f64,
    pub linear: f64,
    pub quadratic: f64,
}

impl Attenuation {
    pub const NONE: Attenuation = Attenuation {
        constant: 1.0,
        linear: 0.0,
        quadratic: 0.0,
    };

    pub fn factor(&self, distance: f64) -> f64 {
        1.0 / (self.constant + self.linear * distance + self.quadratic * distance * distance)
    }
}

impl Default for Attenuation {
    fn default() -> Self {
        Self::NONE
    }
}

/// Point light. `position` is in pixel units with x right, y down (image
/// rows) and z toward the viewer; the sprite lies in the z = 0 plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LightConfig {
    pub position: [f64; 3],
    pub color: [f64; 3],
    pub ambient: f64,
    pub attenuation: Attenuation,
}

impl LightConfig {
    pub fn white(position: [f64; 3], ambient: f64) -> Self {
        Self {
            position,
            color: [1.0; 3],
            ambient,
            attenuation: Attenuation::NONE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.position.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParam("light position must be finite".into()));
        }
        if !self.color.iter().all(|c| (0.0..=1.0).contains(c)) {
            return Err(Error::InvalidParam(
                "light color channels must lie in [0, 1]".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.ambient) {
            return Err(Error::InvalidParam(format!(
                "ambient must lie in [0, 1], got {}",
                self.ambient
            )));
        }
        let a = self.attenuation;
        if [a.constant, a.linear, a.quadratic]
            .iter()
            .any(|k| !(*k >= 0.0 && k.is_finite()))
            || a.constant + a.linear + a.quadratic <= 0.0
        {
            return Err(Error::InvalidParam(
                "attenuation coefficients must be non-negative with a positive sum".into(),
            ));
        }
        Ok(())
    }
}

/// Light in the upper-right corner, raised by the larger image side.
pub fn standard_validation_light(img_w: u32, img_h: u32) -> LightConfig {
    LightConfig::white([img_w as f64, 0.0, img_w.max(img_h) as f64], 0.2)
}

/// Attenuated Lambert term `max(0, N·L)·att` for the pixel at column `px`,
/// row `py`. Pixels are sampled at their centers; the row axis is flipped so
/// L lives in the same +Y-up space as the normals.
pub fn diffuse_factor(normal: [f64; 3], px: u32, py: u32, light: &LightConfig) -> f64 {
    let cx = px as f64 + 0.5;
    let cy = py as f64 + 0.5;
    let to_light = [
        light.position[0] - cx,
        cy - light.position[1],
        light.position[2],
    ];
    let d =
        (to_light[0] * to_light[0] + to_light[1] * to_light[1] + to_light[2] * to_light[2]).sqrt();
    if d == 0.0 {
        return 0.0;
    }
    let n_dot_l = (normal[0] * to_light[0] + normal[1] * to_light[1] + normal[2] * to_light[2]) / d;
    n_dot_l.max(0.0) * light.attenuation.factor(d)
}

fn shade_channel(albedo: u8, light_channel: f64, ambient: f64, diffuse: f64) -> u8 {
    let a = albedo as f64 / 255.0;
    let v = (a * (ambient + diffuse * light_channel)).clamp(0.0, 1.0);
    (v * 255.0 + 0.5).floor() as u8
}

/// Shades every pixel with non-zero alpha; fully transparent pixels and all
/// alpha values are copied through untouched.
pub fn shade(
    sprite: &RasterImage,
    normals: &NormalField,
    light: &LightConfig,
) -> Result<RasterImage> {
    if sprite.dimensions() != normals.dimensions() {
        return Err(Error::mismatch(sprite.dimensions(), normals.dimensions()));
    }
    light.validate()?;
    Ok(RasterImage::from_fn(
        sprite.width(),
        sprite.height(),
        |x, y| {
            let [r, g, b, a] = sprite.pixel(x, y);
            if a == 0 {
                return [r, g, b, a];
            }
            let diffuse = diffuse_factor(normals.get(x, y), x, y, light);
            [
                shade_channel(r, light.color[0], light.ambient, diffuse),
                shade_channel(g, light.color[1], light.ambient, diffuse),
                shade_channel(b, light.color[2], light.ambient, diffuse),
                a,
            ]
        },
    ))
}
