//! Pixel containers, PNG I/O, luma conversion and the RGB normal encoding.
//!
//! Normals live in a right-handed tangent space where +X points right, +Y
//! points *up* and +Z points toward the viewer. Pixel rows grow downward, so
//! any code that differentiates along rows has to flip the sign of the
//! vertical derivative before it becomes a normal component.

use std::io::Cursor;
use std::path::Path;

use image::{ColorType, ImageFormat, ImageReader, RgbaImage};

use crate::error::{Error, Result};

/// Tangent-space "straight up" normal, encoded as (128, 128, 255).
pub const UP: [f64; 3] = [0.0, 0.0, 1.0];

/// Decoded vectors shorter than this collapse to [`UP`]. One quantization
/// step is 1/127.5, so this catches every vector whose bytes all sit in the
/// zero cell (127 or 128) and nothing else.
const DEGENERATE_NORM: f64 = 0.01;

/// 8-bit RGBA image, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RasterImage {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl RasterImage {
    pub fn new(width: u32, height: u32, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidDimensions(width, height));
        }
        let expected = width as usize * height as usize * 4;
        if pixels.len() != expected {
            return Err(Error::Malformed(format!(
                "pixel buffer has {} bytes, expected {expected}",
                pixels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Image filled with a single color.
    ///
    /// Panics on zero dimensions.
    pub fn filled(width: u32, height: u32, rgba: [u8; 4]) -> Self {
        Self::from_fn(width, height, |_, _| rgba)
    }

    /// Panics on zero dimensions.
    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> [u8; 4]) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be non-zero");
        let mut pixels = Vec::with_capacity(width as usize * height as usize * 4);
        for y in 0..height {
            for x in 0..width {
                pixels.extend_from_slice(&f(x, y));
            }
        }
        Self {
            width,
            height,
            pixels,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dimensions(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.pixels
    }

    pub fn pixel(&self, x: u32, y: u32) -> [u8; 4] {
        let i = (y as usize * self.width as usize + x as usize) * 4;
        [
            self.pixels[i],
            self.pixels[i + 1],
            self.pixels[i + 2],
            self.pixels[i + 3],
        ]
    }

    pub fn set_pixel(&mut self, x: u32, y: u32, rgba: [u8; 4]) {
        let i = (y as usize * self.width as usize + x as usize) * 4;
        self.pixels[i..i + 4].copy_from_slice(&rgba);
    }

    pub fn pixels(&self) -> impl Iterator<Item = [u8; 4]> + '_ {
        self.pixels
            .chunks_exact(4)
            .map(|p| [p[0], p[1], p[2], p[3]])
    }

    pub fn flip_horizontal(&self) -> Self {
        let w = self.width;
        Self::from_fn(w, self.height, |x, y| self.pixel(w - 1 - x, y))
    }

    /// Rotates 90° counter-clockwise as displayed (rows grow downward).
    pub fn rotate_ccw(&self) -> Self {
        let w = self.width;
        Self::from_fn(self.height, w, |x, y| self.pixel(w - 1 - y, x))
    }
}

/// Row-major grid of plain values. Backs [`ScalarField`] and [`BinaryMask`].
#[derive(Clone, Debug, PartialEq)]
pub struct Grid<T> {
    width: u32,
    height: u32,
    values: Vec<T>,
}

/// Real-valued per-pixel field: grayscale, heights or distances.
pub type ScalarField = Grid<f64>;

/// Per-pixel booleans: silhouettes and edge masks.
pub type BinaryMask = Grid<bool>;

impl<T: Copy> Grid<T> {
    pub fn new(width: u32, height: u32, values: Vec<T>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidDimensions(width, height));
        }
        if values.len() != width as usize * height as usize {
            return Err(Error::Malformed(format!(
                "grid buffer has {} values, expected {}",
                values.len(),
                width as usize * height as usize
            )));
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    /// Panics on zero dimensions.
    pub fn filled(width: u32, height: u32, value: T) -> Self {
        assert!(width > 0 && height > 0, "grid dimensions must be non-zero");
        Self {
            width,
            height,
            values: vec![value; width as usize * height as usize],
        }
    }

    /// Panics on zero dimensions.
    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> T) -> Self {
        assert!(width > 0 && height > 0, "grid dimensions must be non-zero");
        let mut values = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                values.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            values,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dimensions(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn get(&self, x: u32, y: u32) -> T {
        self.values[y as usize * self.width as usize + x as usize]
    }

    /// Reads with clamp-to-edge addressing.
    pub fn get_clamped(&self, x: i64, y: i64) -> T {
        let x = x.clamp(0, self.width as i64 - 1) as u32;
        let y = y.clamp(0, self.height as i64 - 1) as u32;
        self.get(x, y)
    }

    pub fn set(&mut self, x: u32, y: u32, value: T) {
        self.values[y as usize * self.width as usize + x as usize] = value;
    }

    pub fn map<U: Copy>(&self, f: impl FnMut(T) -> U) -> Grid<U> {
        Grid {
            width: self.width,
            height: self.height,
            values: self.values.iter().copied().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.height, self.width, |x, y| self.get(y, x))
    }

    pub fn flip_horizontal(&self) -> Self {
        let w = self.width;
        Self::from_fn(w, self.height, |x, y| self.get(w - 1 - x, y))
    }
}

impl ScalarField {
    /// Largest value, or 0 for fields with no positive entries.
    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Maps to an opaque gray image, scaling by the field maximum.
    pub fn to_image_normalized(&self) -> RasterImage {
        let max = self.max_value();
        let scale = if max > 0.0 { 1.0 / max } else { 0.0 };
        RasterImage::from_fn(self.width, self.height, |x, y| {
            let v = quantize_unit(self.get(x, y) * scale);
            [v, v, v, 255]
        })
    }
}

impl BinaryMask {
    pub fn count(&self) -> usize {
        self.values.iter().filter(|&&b| b).count()
    }

    pub fn invert(&self) -> Self {
        self.map(|b| !b)
    }

    /// White where set, black elsewhere.
    pub fn to_image(&self) -> RasterImage {
        RasterImage::from_fn(self.width, self.height, |x, y| {
            let v = if self.get(x, y) { 255 } else { 0 };
            [v, v, v, 255]
        })
    }
}

/// Per-pixel unit normals. Every stored vector is renormalized on the way in.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalField {
    width: u32,
    height: u32,
    normals: Vec<[f64; 3]>,
}

impl NormalField {
    /// Panics on zero dimensions.
    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> [f64; 3]) -> Self {
        assert!(width > 0 && height > 0, "field dimensions must be non-zero");
        let mut normals = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                normals.push(normalize_or_up(f(x, y)));
            }
        }
        Self {
            width,
            height,
            normals,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dimensions(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn get(&self, x: u32, y: u32) -> [f64; 3] {
        self.normals[y as usize * self.width as usize + x as usize]
    }

    pub fn normals(&self) -> &[[f64; 3]] {
        &self.normals
    }

    /// Replaces every vector where `keep` is false with [`UP`].
    pub fn flatten_where_not(&self, mut keep: impl FnMut(u32, u32) -> bool) -> Self {
        let mut out = self.clone();
        for y in 0..self.height {
            for x in 0..self.width {
                if !keep(x, y) {
                    out.normals[y as usize * self.width as usize + x as usize] = UP;
                }
            }
        }
        out
    }
}

/// Scales `v` to unit length; vectors shorter than the degenerate threshold
/// become [`UP`].
pub fn normalize_or_up(v: [f64; 3]) -> [f64; 3] {
    let len = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if len.is_nan() || len < DEGENERATE_NORM {
        return UP;
    }
    [v[0] / len, v[1] / len, v[2] / len]
}

fn quantize_unit(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0 + 0.5).floor() as u8
}

/// Maps a component in [-1, 1] to a byte, rounding half up.
pub fn encode_component(c: f64) -> u8 {
    (255.0 * (c + 1.0) / 2.0 + 0.5).floor().clamp(0.0, 255.0) as u8
}

pub fn decode_component(byte: u8) -> f64 {
    byte as f64 / 127.5 - 1.0
}

pub fn encode_normal(n: [f64; 3]) -> [u8; 4] {
    [
        encode_component(n[0]),
        encode_component(n[1]),
        encode_component(n[2]),
        255,
    ]
}

/// Decodes one normal map texel to a unit vector.
///
/// The result is the renormalized cell center when that still encodes to
/// `rgb`. Otherwise it is a unit vector picked from inside the quantization
/// cell of `rgb`, so re-encoding a decoded map reproduces it exactly whenever
/// the cell touches the unit sphere.
pub fn decode_normal(rgb: [u8; 3]) -> [f64; 3] {
    let center = rgb.map(decode_component);
    let n = normalize_or_up(center);
    if n == UP || encode_normal(n)[..3] == rgb {
        return n;
    }
    unit_vector_in_cell(rgb).unwrap_or(n)
}

/// A unit vector whose encoding is `rgb`, if one exists.
fn unit_vector_in_cell(rgb: [u8; 3]) -> Option<[f64; 3]> {
    // byte b covers components in [(b - 128) / 127.5, (b - 127) / 127.5)
    const INSET: f64 = 1e-9;
    let lo = rgb.map(|b| (b as f64 - 128.0) / 127.5 + INSET);
    let hi = rgb.map(|b| (b as f64 - 127.0) / 127.5 - INSET);
    let mut near = [0.0; 3];
    let mut far = [0.0; 3];
    for i in 0..3 {
        near[i] = 0.0f64.clamp(lo[i], hi[i]);
        far[i] = if lo[i].abs() > hi[i].abs() {
            lo[i]
        } else {
            hi[i]
        };
    }
    let norm = |v: [f64; 3]| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if norm(near) > 1.0 || norm(far) < 1.0 {
        return None;
    }
    // |p| is non-decreasing from the closest point toward the farthest corner.
    let along = |t: f64| -> [f64; 3] { std::array::from_fn(|i| near[i] + t * (far[i] - near[i])) };
    let (mut a, mut b) = (0.0, 1.0);
    for _ in 0..64 {
        let mid = 0.5 * (a + b);
        if norm(along(mid)) < 1.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    let p = along(b);
    let len = norm(p);
    let v = p.map(|c| c / len);
    (encode_normal(v)[..3] == rgb).then_some(v)
}

/// Quantizes a normal field to an opaque RGB normal map.
pub fn encode_normals(nf: &NormalField) -> RasterImage {
    RasterImage::from_fn(nf.width, nf.height, |x, y| encode_normal(nf.get(x, y)))
}

/// Inverse of [`encode_normals`]; alpha is ignored.
pub fn decode_normals(img: &RasterImage) -> NormalField {
    let mut normals = Vec::with_capacity(img.width as usize * img.height as usize);
    for p in img.pixels() {
        normals.push(decode_normal([p[0], p[1], p[2]]));
    }
    NormalField {
        width: img.width,
        height: img.height,
        normals,
    }
}

/// Rec. 601 luma in [0, 1]. Alpha is ignored.
pub fn to_grayscale(img: &RasterImage) -> ScalarField {
    let values = img
        .pixels()
        .map(|[r, g, b, _]| (0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64) / 255.0)
        .collect();
    Grid {
        width: img.width,
        height: img.height,
        values,
    }
}

/// Height field from the red channel, scaled to [0, 1]. Grayscale PNGs are
/// expanded on load, so for those this is simply the gray level.
pub fn red_channel(img: &RasterImage) -> ScalarField {
    let values = img.pixels().map(|p| p[0] as f64 / 255.0).collect();
    Grid {
        width: img.width,
        height: img.height,
        values,
    }
}

pub fn alpha_mask(img: &RasterImage, threshold: u8) -> BinaryMask {
    let values = img.pixels().map(|p| p[3] >= threshold).collect();
    Grid {
        width: img.width,
        height: img.height,
        values,
    }
}

/// Decodes PNG bytes into RGBA. Gray, gray-alpha, RGB and palette images are
/// expanded; missing alpha becomes 255.
pub fn decode_png(bytes: &[u8]) -> Result<RasterImage> {
    let reader = ImageReader::with_format(Cursor::new(bytes), ImageFormat::Png);
    let decoded = reader.decode().map_err(|e| match e {
        image::ImageError::IoError(io) => Error::Malformed(io.to_string()),
        other => Error::Malformed(other.to_string()),
    })?;
    match decoded.color() {
        ColorType::L8 | ColorType::La8 | ColorType::Rgb8 | ColorType::Rgba8 => {}
        other => return Err(Error::UnsupportedBitDepth(format!("{other:?}"))),
    }
    let rgba = decoded.into_rgba8();
    let (w, h) = rgba.dimensions();
    RasterImage::new(w, h, rgba.into_raw())
}

/// Reads width and height from the PNG header without decoding pixels.
pub fn peek_png_dimensions(bytes: &[u8]) -> Result<(u32, u32)> {
    ImageReader::with_format(Cursor::new(bytes), ImageFormat::Png)
        .into_dimensions()
        .map_err(|e| Error::Malformed(e.to_string()))
}

/// Encodes as 8-bit RGBA PNG. Output bytes depend only on the pixels.
pub fn encode_png(img: &RasterImage) -> Result<Vec<u8>> {
    let buffer = RgbaImage::from_raw(img.width, img.height, img.pixels.clone())
        .expect("buffer length checked at construction");
    let mut out = Cursor::new(Vec::new());
    buffer
        .write_to(&mut out, ImageFormat::Png)
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(out.into_inner())
}

pub fn load_image(path: impl AsRef<Path>) -> Result<RasterImage> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::NotFound(path.to_path_buf())
        } else {
            Error::Io(e)
        }
    })?;
    decode_png(&bytes)
}

pub fn save_image(img: &RasterImage, path: impl AsRef<Path>) -> Result<()> {
    let bytes = encode_png(img)?;
    std::fs::write(path, bytes)?;
    Ok(())
}
