//! Automatic beveling: a height map built from the distance transforms of
//! the sprite silhouette and of its internal edges, smoothed, then turned
//! into normals with Sobel.

use crate::error::{Error, Result};
use crate::gradient::{normal_from_height_map, sobel_gradients, SobelParams};
use crate::raster::{
    alpha_mask, to_grayscale, BinaryMask, Grid, NormalField, RasterImage, ScalarField,
};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BevelParams {
    /// Minimum alpha for a pixel to belong to the silhouette.
    pub alpha_threshold: u8,
    /// Normalized edge magnitudes in `[edge_low, edge_high]` become internal edges.
    pub edge_low: f64,
    pub edge_high: f64,
    /// Exponent `1/s` applied to the normalized silhouette distance.
    pub external_strength: f64,
    /// Exponent `1/s` applied to the normalized internal-edge distance.
    pub internal_strength: f64,
    /// Weight of the internal-edge term in the merge.
    pub blend_weight: f64,
    pub gaussian_sigma: f64,
    pub sobel: SobelParams,
}

impl Default for BevelParams {
    fn default() -> Self {
        Self {
            alpha_threshold: 128,
            edge_low: 0.25,
            edge_high: 1.0,
            external_strength: 1.0,
            internal_strength: 1.0,
            blend_weight: 0.5,
            gaussian_sigma: 1.0,
            sobel: SobelParams::with_strength(4.0),
        }
    }
}

impl BevelParams {
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::InvalidParam(format!(
                    "{name} must lie in [0, 1], got {v}"
                )))
            }
        };
        unit("edge_low", self.edge_low)?;
        unit("edge_high", self.edge_high)?;
        unit("blend_weight", self.blend_weight)?;
        if self.edge_low > self.edge_high {
            return Err(Error::InvalidParam(format!(
                "edge_low ({}) exceeds edge_high ({})",
                self.edge_low, self.edge_high
            )));
        }
        for (name, v) in [
            ("external_strength", self.external_strength),
            ("internal_strength", self.internal_strength),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParam(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if !(self.gaussian_sigma >= 0.0 && self.gaussian_sigma.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "sigma must be non-negative, got {}",
                self.gaussian_sigma
            )));
        }
        self.sobel.validate()
    }
}

/// Internal edges: pixels inside the silhouette whose normalized Sobel
/// magnitude lies in `[edge_low, edge_high]`.
pub fn edge_mask(img: &RasterImage, p: &BevelParams) -> BinaryMask {
    let magnitude = sobel_gradients(&to_grayscale(img)).magnitude();
    let max = magnitude.max_value();
    let (w, h) = img.dimensions();
    if max <= 0.0 {
        return Grid::filled(w, h, false);
    }
    Grid::from_fn(w, h, |x, y| {
        let m = magnitude.get(x, y) / max;
        m >= p.edge_low && m <= p.edge_high && img.pixel(x, y)[3] >= p.alpha_threshold
    })
}

/// Exact euclidean distance from every pixel center to the nearest unset
/// pixel center (0 on unset pixels).
///
/// Two separable passes of the lower-envelope-of-parabolas transform, first
/// down each column and then along each row. A mask with no unset pixel has
/// no finite answer; every value is then the image diagonal.
pub fn distance_transform(mask: &BinaryMask) -> ScalarField {
    let (w, h) = mask.dimensions();
    if mask.count() == w as usize * h as usize {
        return Grid::filled(w, h, (w as f64).hypot(h as f64));
    }

    let (wu, hu) = (w as usize, h as usize);
    let mut sq = vec![0.0f64; wu * hu];
    let mut scratch = Scratch::new(wu.max(hu));

    let mut column = vec![0.0; hu];
    let mut out = vec![0.0; hu];
    for x in 0..wu {
        for (y, c) in column.iter_mut().enumerate() {
            *c = if mask.get(x as u32, y as u32) {
                f64::INFINITY
            } else {
                0.0
            };
        }
        scratch.transform(&column, &mut out);
        for (y, v) in out.iter().enumerate() {
            sq[y * wu + x] = *v;
        }
    }

    let mut row = vec![0.0; wu];
    let mut out = vec![0.0; wu];
    for y in 0..hu {
        row.copy_from_slice(&sq[y * wu..(y + 1) * wu]);
        scratch.transform(&row, &mut out);
        sq[y * wu..(y + 1) * wu].copy_from_slice(&out);
    }

    Grid::new(w, h, sq.into_iter().map(f64::sqrt).collect()).expect("dimensions preserved")
}

struct Scratch {
    vertices: Vec<usize>,
    bounds: Vec<f64>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Self {
            vertices: vec![0; n],
            bounds: vec![0.0; n + 1],
        }
    }

    /// 1D squared distance transform of a sampled function `f` (0 on sites,
    /// +inf elsewhere, or squared column distances in the second pass).
    fn transform(&mut self, f: &[f64], out: &mut [f64]) {
        let n = f.len();
        // Leading infinite samples cannot host a parabola.
        let Some(first) = f.iter().position(|v| v.is_finite()) else {
            out.iter_mut().for_each(|o| *o = f64::INFINITY);
            return;
        };
        let v = &mut self.vertices;
        let z = &mut self.bounds;
        let mut k = 0usize;
        v[0] = first;
        z[0] = f64::NEG_INFINITY;
        z[1] = f64::INFINITY;
        for q in first + 1..n {
            if !f[q].is_finite() {
                continue;
            }
            // z[0] is -inf, so the envelope never pops below one parabola.
            let mut s = intersection(f, v[k], q);
            while s <= z[k] {
                k -= 1;
                s = intersection(f, v[k], q);
            }
            k += 1;
            v[k] = q;
            z[k] = s;
            z[k + 1] = f64::INFINITY;
        }
        let mut k = 0usize;
        for (q, o) in out.iter_mut().enumerate() {
            while z[k + 1] < q as f64 {
                k += 1;
            }
            let d = q as f64 - v[k] as f64;
            *o = d * d + f[v[k]];
        }
    }
}

/// Abscissa where the parabolas rooted at `p` and `q` (p < q) intersect.
fn intersection(f: &[f64], p: usize, q: usize) -> f64 {
    ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64))
}

fn normalize_and_shape(field: &ScalarField, strength: f64) -> ScalarField {
    let max = field.max_value();
    if max <= 0.0 {
        return field.map(|_| 0.0);
    }
    let exponent = 1.0 / strength;
    field.map(|v| (v / max).clamp(0.0, 1.0).powf(exponent))
}

/// Weighted merge of the silhouette distance `ext` and the internal-edge
/// distance `int_`.
///
/// Each field is divided by its own maximum and raised to `1/strength`, then
/// `h = (1 − w)·ext′ + w·int′`. Both terms vanish at their edges, so the
/// silhouette rim and internal contours become valleys.
pub fn combine_heights(
    ext: &ScalarField,
    int_: &ScalarField,
    p: &BevelParams,
) -> Result<ScalarField> {
    if ext.dimensions() != int_.dimensions() {
        return Err(Error::mismatch(ext.dimensions(), int_.dimensions()));
    }
    let e = normalize_and_shape(ext, p.external_strength);
    let i = normalize_and_shape(int_, p.internal_strength);
    let w = p.blend_weight;
    let (width, height) = ext.dimensions();
    Ok(Grid::from_fn(width, height, |x, y| {
        ((1.0 - w) * e.get(x, y) + w * i.get(x, y)).clamp(0.0, 1.0)
    }))
}

/// Normalized 1D Gaussian weights for offsets `0..=radius`.
fn gaussian_half_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as usize;
    let mut weights: Vec<f64> = (0..=radius)
        .map(|k| (-((k * k) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let total = weights[0] + 2.0 * weights[1..].iter().sum::<f64>();
    weights.iter_mut().for_each(|w| *w /= total);
    weights
}

/// Separable Gaussian blur with radius `ceil(3σ)` and clamp-replicate
/// borders. `sigma <= 0` returns the input unchanged.
pub fn gaussian_blur(src: &ScalarField, sigma: f64) -> ScalarField {
    if sigma.is_nan() || sigma <= 0.0 {
        return src.clone();
    }
    let weights = gaussian_half_kernel(sigma);
    let (w, h) = src.dimensions();
    // Symmetric offsets are paired before weighting so mirrored inputs blur
    // to exactly mirrored outputs.
    let horizontal = Grid::from_fn(w, h, |x, y| {
        let (x, y) = (x as i64, y as i64);
        let mut acc = weights[0] * src.get_clamped(x, y);
        for (k, wk) in weights.iter().enumerate().skip(1) {
            let k = k as i64;
            acc += wk * (src.get_clamped(x - k, y) + src.get_clamped(x + k, y));
        }
        acc
    });
    Grid::from_fn(w, h, |x, y| {
        let (x, y) = (x as i64, y as i64);
        let mut acc = weights[0] * horizontal.get_clamped(x, y);
        for (k, wk) in weights.iter().enumerate().skip(1) {
            let k = k as i64;
            acc += wk * (horizontal.get_clamped(x, y - k) + horizontal.get_clamped(x, y + k));
        }
        acc
    })
}

/// Every intermediate of [`bevel_normal_map`], in pipeline order.
#[derive(Clone, Debug)]
pub struct BevelStages {
    pub silhouette: BinaryMask,
    pub edges: BinaryMask,
    pub external_distance: ScalarField,
    /// Distance to the nearest internal edge, zeroed outside the silhouette.
    pub internal_distance: ScalarField,
    pub merged: ScalarField,
    pub blurred: ScalarField,
    pub normals: NormalField,
}

impl BevelStages {
    /// Grayscale/RGB renderings named `stage0.png` .. `stage6.png`.
    pub fn debug_images(&self) -> Vec<(&'static str, RasterImage)> {
        vec![
            ("stage0.png", self.silhouette.to_image()),
            ("stage1.png", self.edges.to_image()),
            ("stage2.png", self.external_distance.to_image_normalized()),
            ("stage3.png", self.internal_distance.to_image_normalized()),
            ("stage4.png", self.merged.to_image_normalized()),
            ("stage5.png", self.blurred.to_image_normalized()),
            ("stage6.png", crate::raster::encode_normals(&self.normals)),
        ]
    }
}

pub fn bevel_stages(img: &RasterImage, p: &BevelParams) -> Result<BevelStages> {
    p.validate()?;
    let silhouette = alpha_mask(img, p.alpha_threshold);
    if silhouette.count() == 0 {
        return Err(Error::FullyTransparent(p.alpha_threshold));
    }
    let external_distance = distance_transform(&silhouette);
    let edges = edge_mask(img, p);
    let to_edges = distance_transform(&edges.invert());
    // Outside the silhouette the internal term is meaningless and would make
    // its normalization depend on how much transparent margin surrounds the
    // sprite.
    let (w, h) = img.dimensions();
    let internal_distance = Grid::from_fn(w, h, |x, y| {
        if silhouette.get(x, y) {
            to_edges.get(x, y)
        } else {
            0.0
        }
    });
    let merged = combine_heights(&external_distance, &internal_distance, p)?;
    let blurred = gaussian_blur(&merged, p.gaussian_sigma);
    let raw = normal_from_height_map(&blurred, &p.sobel)?;
    let normals = raw.flatten_where_not(|x, y| silhouette.get(x, y));
    Ok(BevelStages {
        silhouette,
        edges,
        external_distance,
        internal_distance,
        merged,
        blurred,
        normals,
    })
}

pub fn bevel_normal_map(img: &RasterImage, p: &BevelParams) -> Result<NormalField> {
    bevel_stages(img, p).map(|s| s.normals)
}
