//! Normal map generation for pixel-art sprites.
//!
//! Four generators share one set of raster types:
//!
//! - [`gradient::normal_from_color_map`]: Sobel over the sprite's luma.
//! - [`gradient::normal_from_height_map`]: Sobel over a painted height map.
//! - [`bevel::bevel_normal_map`]: heights from silhouette and internal-edge
//!   distance transforms.
//! - [`four_angle::merge_four_angles`]: four shaded drawings lit from each side.
//!
//! [`relight::shade`] renders a sprite under a point light so the maps can be
//! checked by eye.

pub mod bevel;
pub mod error;
pub mod four_angle;
pub mod gradient;
pub mod method;
pub mod raster;
pub mod relight;

pub use bevel::{bevel_normal_map, bevel_stages, BevelParams, BevelStages};
pub use error::{Error, Result};
pub use four_angle::{merge_four_angles, FourAngleInputs, FourAngleParams, MergeMode};
pub use gradient::{normal_from_color_map, normal_from_height_map, SobelParams};
pub use method::{generate, Method, MethodParams, ParamSpec};
pub use raster::{
    decode_normals, decode_png, encode_normals, encode_png, load_image, peek_png_dimensions,
    save_image, BinaryMask, Grid, NormalField, RasterImage, ScalarField,
};
pub use relight::{shade, standard_validation_light, Attenuation, LightConfig};
