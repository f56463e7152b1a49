//! Command-line front end. `run` parses arguments, dispatches to the
//! matching pipeline and maps the outcome to an exit status:
//! 0 on success, 1 on processing errors, 2 on usage errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use hibit_core::{
    bevel_stages, decode_normals, encode_normals, generate, load_image, save_image, shade,
    standard_validation_light, BevelParams, FourAngleParams, LightConfig, MergeMode, MethodParams,
    RasterImage, SobelParams,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "hibit", version, about = "Normal maps for pixel-art sprites")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sobel gradients of the sprite's luma.
    SobelColor(SobelArgs),
    /// Sobel gradients of a grayscale height map (red channel).
    SobelHeight(SobelArgs),
    /// Height map from silhouette and internal-edge distance transforms.
    Bevel(BevelArgs),
    /// Merge four drawings lit from the top, bottom, left and right.
    FourAngle(FourAngleArgs),
    /// Shade a sprite with its normal map under a point light.
    Relight(RelightArgs),
    /// Serve the browser previewer.
    Preview(PreviewArgs),
}

#[derive(Debug, Args)]
pub struct SobelArgs {
    #[arg(long = "in", value_name = "PNG")]
    pub input: PathBuf,
    #[arg(long, value_name = "PNG")]
    pub out: PathBuf,
    /// Gradient multiplier; higher tilts normals further.
    #[arg(long, default_value_t = SobelParams::default().strength)]
    pub strength: f64,
}

#[derive(Debug, Args)]
pub struct BevelArgs {
    #[arg(long = "in", value_name = "PNG")]
    pub input: PathBuf,
    #[arg(long, value_name = "PNG")]
    pub out: PathBuf,
    /// Minimum alpha of silhouette pixels.
    #[arg(long, default_value_t = BevelParams::default().alpha_threshold)]
    pub alpha_threshold: u8,
    /// Lower clip on normalized edge magnitude.
    #[arg(long, default_value_t = BevelParams::default().edge_low)]
    pub edge_low: f64,
    /// Upper clip on normalized edge magnitude.
    #[arg(long, default_value_t = BevelParams::default().edge_high)]
    pub edge_high: f64,
    #[arg(long, default_value_t = BevelParams::default().external_strength)]
    pub external_strength: f64,
    #[arg(long, default_value_t = BevelParams::default().internal_strength)]
    pub internal_strength: f64,
    /// Weight of the internal-edge distance in the merge.
    #[arg(long, default_value_t = BevelParams::default().blend_weight)]
    pub blend_weight: f64,
    /// Gaussian smoothing of the merged heights, in pixels.
    #[arg(long, default_value_t = BevelParams::default().gaussian_sigma)]
    pub sigma: f64,
    /// Sobel gradient multiplier.
    #[arg(long, default_value_t = BevelParams::default().sobel.strength)]
    pub strength: f64,
    /// Write every pipeline stage as stage0.png .. stage6.png into DIR.
    #[arg(long, value_name = "DIR")]
    pub debug_stages: Option<PathBuf>,
}

impl BevelArgs {
    fn params(&self) -> BevelParams {
        BevelParams {
            alpha_threshold: self.alpha_threshold,
            edge_low: self.edge_low,
            edge_high: self.edge_high,
            external_strength: self.external_strength,
            internal_strength: self.internal_strength,
            blend_weight: self.blend_weight,
            gaussian_sigma: self.sigma,
            sobel: SobelParams::with_strength(self.strength),
        }
    }
}

#[derive(Debug, Args)]
pub struct FourAngleArgs {
    #[arg(long, value_name = "PNG")]
    pub top: PathBuf,
    #[arg(long, value_name = "PNG")]
    pub bottom: PathBuf,
    #[arg(long, value_name = "PNG")]
    pub left: PathBuf,
    #[arg(long, value_name = "PNG")]
    pub right: PathBuf,
    #[arg(long, value_name = "PNG")]
    pub out: PathBuf,
    /// Z weight before normalization; higher is flatter.
    #[arg(long, default_value_t = FourAngleParams::default().blue_level,
          value_parser = clap::value_parser!(u8).range(1..))]
    pub blue_level: u8,
    /// difference | overlay
    #[arg(long, default_value = "difference", value_parser = MergeMode::from_str)]
    pub mode: MergeMode,
}

/// `upper-right` or an explicit `x,y,z` position in pixels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LightPlacement {
    UpperRight,
    At([f64; 3]),
}

impl FromStr for LightPlacement {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "upper-right" {
            return Ok(LightPlacement::UpperRight);
        }
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| format!("expected upper-right or x,y,z: {e}"))?;
        match parts.as_slice() {
            [x, y, z] if parts.iter().all(|v| v.is_finite()) => {
                Ok(LightPlacement::At([*x, *y, *z]))
            }
            _ => Err("expected upper-right or three comma-separated numbers".into()),
        }
    }
}

#[derive(Debug, Args)]
pub struct RelightArgs {
    /// Color sprite.
    #[arg(long = "in", value_name = "PNG")]
    pub input: PathBuf,
    #[arg(long, value_name = "PNG")]
    pub normals: PathBuf,
    #[arg(long, value_name = "PNG")]
    pub out: PathBuf,
    #[arg(long, default_value = "upper-right", value_parser = LightPlacement::from_str)]
    pub light: LightPlacement,
    /// Ambient term in [0, 1].
    #[arg(long, default_value_t = standard_validation_light(1, 1).ambient)]
    pub ambient: f64,
}

impl RelightArgs {
    pub fn light_config(&self, width: u32, height: u32) -> LightConfig {
        let mut light = standard_validation_light(width, height);
        if let LightPlacement::At(p) = self.light {
            light.position = p;
        }
        light.ambient = self.ambient;
        light
    }
}

#[derive(Debug, Args)]
pub struct PreviewArgs {
    #[arg(long, default_value_t = hibit_preview::DEFAULT_PORT)]
    pub port: u16,
    /// Open the previewer in the default browser.
    #[arg(long)]
    pub open: bool,
    /// Directory holding the built web UI.
    #[arg(long, value_name = "DIR", default_value = "web-ui/dist")]
    pub assets: PathBuf,
}

#[derive(Debug)]
pub struct CliError(String);

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<hibit_core::Error> for CliError {
    fn from(e: hibit_core::Error) -> Self {
        CliError(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError(e.to_string())
    }
}

fn load(path: &Path) -> Result<RasterImage, CliError> {
    load_image(path).map_err(|e| CliError(format!("{}: {e}", path.display())))
}

fn save(img: &RasterImage, path: &Path) -> Result<(), CliError> {
    save_image(img, path).map_err(|e| CliError(format!("{}: {e}", path.display())))
}

pub fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::SobelColor(a) => {
            let params = MethodParams::SobelColor(SobelParams::with_strength(a.strength));
            save(&generate(&params, &[load(&a.input)?])?, &a.out)
        }
        Command::SobelHeight(a) => {
            let params = MethodParams::SobelHeight(SobelParams::with_strength(a.strength));
            save(&generate(&params, &[load(&a.input)?])?, &a.out)
        }
        Command::Bevel(a) => {
            let img = load(&a.input)?;
            let stages = bevel_stages(&img, &a.params())?;
            if let Some(dir) = &a.debug_stages {
                std::fs::create_dir_all(dir)?;
                for (name, stage) in stages.debug_images() {
                    save(&stage, &dir.join(name))?;
                }
            }
            save(&encode_normals(&stages.normals), &a.out)
        }
        Command::FourAngle(a) => {
            let params = MethodParams::FourAngle(FourAngleParams {
                blue_level: a.blue_level,
                merge_mode: a.mode,
            });
            let images = [&a.top, &a.bottom, &a.left, &a.right]
                .into_iter()
                .map(|p| load(p))
                .collect::<Result<Vec<_>, _>>()?;
            save(&generate(&params, &images)?, &a.out)
        }
        Command::Relight(a) => {
            let sprite = load(&a.input)?;
            let normals = decode_normals(&load(&a.normals)?);
            let light = a.light_config(sprite.width(), sprite.height());
            save(&shade(&sprite, &normals, &light)?, &a.out)
        }
        Command::Preview(a) => preview(a),
    }
}

fn preview(a: PreviewArgs) -> Result<(), CliError> {
    let runtime = tokio::runtime::Runtime::new()?;
    let url = format!("http://127.0.0.1:{}/", a.port);
    eprintln!("serving {} on {url}", a.assets.display());
    if a.open {
        open_browser(&url);
    }
    runtime.block_on(hibit_preview::serve(a.port, a.assets))?;
    Ok(())
}

fn open_browser(url: &str) {
    let opener = if cfg!(target_os = "macos") {
        "open"
    } else if cfg!(windows) {
        "explorer"
    } else {
        "xdg-open"
    };
    if let Err(e) = std::process::Command::new(opener).arg(url).spawn() {
        eprintln!("could not open a browser ({e}); visit {url}");
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}
