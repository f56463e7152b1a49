//! One entry point per generation technique, shared by the CLI and the
//! preview server so both produce identical bytes for identical requests.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::bevel::{bevel_normal_map, BevelParams};
use crate::error::{Error, Result};
use crate::four_angle::{merge_four_angles, FourAngleInputs, FourAngleParams, MergeMode};
use crate::gradient::{normal_from_color_map, normal_from_height_map, SobelParams};
use crate::raster::{encode_normals, red_channel, RasterImage};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    SobelColor,
    SobelHeight,
    Bevel,
    FourAngle,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::SobelColor,
        Method::SobelHeight,
        Method::Bevel,
        Method::FourAngle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::SobelColor => "sobel-color",
            Method::SobelHeight => "sobel-height",
            Method::Bevel => "bevel",
            Method::FourAngle => "four-angle",
        }
    }

    /// Number of input images the technique consumes.
    pub fn image_count(self) -> usize {
        match self {
            Method::FourAngle => 4,
            _ => 1,
        }
    }

    /// Parameters accepted by [`MethodParams::from_map`], with defaults and
    /// the slider ranges a front end should offer.
    pub fn param_specs(self) -> Vec<ParamSpec> {
        let spec = |key, default, min, max, integer| ParamSpec {
            key,
            default,
            min,
            max,
            integer,
        };
        match MethodParams::defaults(self) {
            MethodParams::SobelColor(s) | MethodParams::SobelHeight(s) => {
                vec![spec("strength", s.strength, 0.01, 32.0, false)]
            }
            MethodParams::Bevel(b) => vec![
                spec(
                    "alpha_threshold",
                    b.alpha_threshold as f64,
                    1.0,
                    255.0,
                    true,
                ),
                spec("edge_low", b.edge_low, 0.0, 1.0, false),
                spec("edge_high", b.edge_high, 0.0, 1.0, false),
                spec("external_strength", b.external_strength, 0.1, 8.0, false),
                spec("internal_strength", b.internal_strength, 0.1, 8.0, false),
                spec("blend_weight", b.blend_weight, 0.0, 1.0, false),
                spec("sigma", b.gaussian_sigma, 0.0, 8.0, false),
                spec("strength", b.sobel.strength, 0.01, 32.0, false),
            ],
            MethodParams::FourAngle(f) => vec![
                spec("blue_level", f.blue_level as f64, 1.0, 255.0, true),
                spec("mode", 0.0, 0.0, 1.0, true),
            ],
        }
    }
}

/// One tunable parameter of a [`Method`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamSpec {
    pub key: &'static str,
    pub default: f64,
    pub min: f64,
    pub max: f64,
    pub integer: bool,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidParam(format!("unknown method '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MethodParams {
    SobelColor(SobelParams),
    SobelHeight(SobelParams),
    Bevel(BevelParams),
    FourAngle(FourAngleParams),
}

fn byte_param(key: &str, v: f64) -> Result<u8> {
    if v.fract() != 0.0 || !(0.0..=255.0).contains(&v) {
        return Err(Error::InvalidParam(format!(
            "{key} must be an integer in [0, 255], got {v}"
        )));
    }
    Ok(v as u8)
}

impl MethodParams {
    pub fn defaults(method: Method) -> Self {
        match method {
            Method::SobelColor => MethodParams::SobelColor(SobelParams::default()),
            Method::SobelHeight => MethodParams::SobelHeight(SobelParams::default()),
            Method::Bevel => MethodParams::Bevel(BevelParams::default()),
            Method::FourAngle => MethodParams::FourAngle(FourAngleParams::default()),
        }
    }

    pub fn method(&self) -> Method {
        match self {
            MethodParams::SobelColor(_) => Method::SobelColor,
            MethodParams::SobelHeight(_) => Method::SobelHeight,
            MethodParams::Bevel(_) => Method::Bevel,
            MethodParams::FourAngle(_) => Method::FourAngle,
        }
    }

    /// Builds parameters from a flat key → number map, starting from the
    /// method defaults. `mode` is 0 for difference, 1 for overlay. Unknown
    /// keys are rejected.
    pub fn from_map(method: Method, map: &BTreeMap<String, f64>) -> Result<Self> {
        let mut params = Self::defaults(method);
        for (key, &v) in map {
            if !method.param_specs().iter().any(|p| p.key == key) {
                return Err(Error::InvalidParam(format!(
                    "unknown parameter '{key}' for {method}"
                )));
            }
            match &mut params {
                MethodParams::SobelColor(s) | MethodParams::SobelHeight(s) => s.strength = v,
                MethodParams::Bevel(b) => match key.as_str() {
                    "alpha_threshold" => b.alpha_threshold = byte_param(key, v)?,
                    "edge_low" => b.edge_low = v,
                    "edge_high" => b.edge_high = v,
                    "external_strength" => b.external_strength = v,
                    "internal_strength" => b.internal_strength = v,
                    "blend_weight" => b.blend_weight = v,
                    "sigma" => b.gaussian_sigma = v,
                    "strength" => b.sobel.strength = v,
                    _ => unreachable!("filtered by param_specs"),
                },
                MethodParams::FourAngle(f) => match key.as_str() {
                    "blue_level" => f.blue_level = byte_param(key, v)?,
                    "mode" => {
                        f.merge_mode = match v {
                            0.0 => MergeMode::Difference,
                            1.0 => MergeMode::Overlay,
                            _ => {
                                return Err(Error::InvalidParam(format!(
                                    "mode must be 0 (difference) or 1 (overlay), got {v}"
                                )))
                            }
                        }
                    }
                    _ => unreachable!("filtered by param_specs"),
                },
            }
        }
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MethodParams::SobelColor(s) | MethodParams::SobelHeight(s) => s.validate(),
            MethodParams::Bevel(b) => b.validate(),
            MethodParams::FourAngle(f) => f.validate(),
        }
    }
}

/// Runs a technique and returns the encoded normal map. Four-angle inputs
/// are ordered top, bottom, left, right.
pub fn generate(params: &MethodParams, images: &[RasterImage]) -> Result<RasterImage> {
    let method = params.method();
    if images.len() != method.image_count() {
        return Err(Error::InvalidParam(format!(
            "{method} takes {} image(s), got {}",
            method.image_count(),
            images.len()
        )));
    }
    let normals = match params {
        MethodParams::SobelColor(p) => normal_from_color_map(&images[0], p)?,
        MethodParams::SobelHeight(p) => normal_from_height_map(&red_channel(&images[0]), p)?,
        MethodParams::Bevel(p) => bevel_normal_map(&images[0], p)?,
        MethodParams::FourAngle(p) => {
            let inputs =
                FourAngleInputs::from_images([&images[0], &images[1], &images[2], &images[3]])?;
            merge_four_angles(&inputs, p)?
        }
    };
    Ok(encode_normals(&normals))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn method_names_roundtrip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("sobel".parse::<Method>().is_err());
    }

    #[test]
    fn params_from_map() {
        let p = MethodParams::from_map(
            Method::Bevel,
            &map(&[("blend_weight", 0.2), ("sigma", 2.0)]),
        )
        .unwrap();
        let MethodParams::Bevel(b) = p else { panic!() };
        assert_eq!(b.blend_weight, 0.2);
        assert_eq!(b.gaussian_sigma, 2.0);
        assert_eq!(b.edge_low, 0.25);

        let p = MethodParams::from_map(
            Method::FourAngle,
            &map(&[("mode", 1.0), ("blue_level", 90.0)]),
        )
        .unwrap();
        assert_eq!(
            p,
            MethodParams::FourAngle(FourAngleParams {
                blue_level: 90,
                merge_mode: MergeMode::Overlay
            })
        );
    }

    #[test]
    fn published_defaults_round_trip() {
        for m in Method::ALL {
            let specs = m.param_specs();
            let map: BTreeMap<String, f64> = specs
                .iter()
                .map(|p| (p.key.to_string(), p.default))
                .collect();
            assert_eq!(
                MethodParams::from_map(m, &map).unwrap(),
                MethodParams::defaults(m)
            );
            for p in &specs {
                assert!(p.min <= p.default && p.default <= p.max, "{m} {}", p.key);
            }
        }
    }

    #[test]
    fn params_rejections() {
        assert!(MethodParams::from_map(Method::SobelColor, &map(&[("sigma", 1.0)])).is_err());
        assert!(MethodParams::from_map(Method::SobelColor, &map(&[("strength", -1.0)])).is_err());
        assert!(MethodParams::from_map(Method::Bevel, &map(&[("alpha_threshold", 12.5)])).is_err());
        assert!(MethodParams::from_map(Method::FourAngle, &map(&[("mode", 2.0)])).is_err());
        assert!(MethodParams::from_map(Method::FourAngle, &map(&[("blue_level", 0.0)])).is_err());
    }

    #[test]
    fn generate_checks_image_count() {
        let img = RasterImage::filled(4, 4, [10, 10, 10, 255]);
        let p = MethodParams::defaults(Method::FourAngle);
        assert!(generate(&p, std::slice::from_ref(&img)).is_err());
        let p = MethodParams::defaults(Method::Bevel);
        assert!(generate(&p, &[img.clone(), img]).is_err());
    }
}
