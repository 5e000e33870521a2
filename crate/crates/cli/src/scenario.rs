//! Turns a validated configuration into a basis, a state and pixel layouts.

use std::fs::File;
use std::io::BufReader;

use flipmode::detection::{detection_frame, PixelLayout};
use flipmode::modes::export::{read_modes_csv, read_pgm};
use flipmode::modes::{hermite_gauss_basis, Grid, ModeBasis};
use flipmode::state::{make_state, GaussianState, SqueezerSpec, StateDocument};
use flipmode::Complex64;
use serde::Serialize;

use crate::config::{BasisKind, LayoutConfig, NamedTarget, ScenarioConfig, SqueezeTarget};
use crate::error::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct BasisInfo {
    pub kind: BasisKind,
    pub size: usize,
    pub max_orthonormality_deviation: f64,
    pub truncation_residual: Option<f64>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub grid: Grid,
    /// The configured basis before any detection-mode reframing.
    pub pool: ModeBasis,
    pub basis: ModeBasis,
    pub basis_info: BasisInfo,
    pub state: GaussianState,
    pub layout: Option<PixelLayout>,
}

fn core(key: &str) -> impl Fn(flipmode::Error) -> CliError + '_ {
    move |e| CliError::from_core(key, e)
}

pub fn build_layout(grid: Grid, cfg: &LayoutConfig, key: &str) -> Result<PixelLayout, CliError> {
    let gains = cfg.gains.clone();
    if let Some(p) = cfg.primitive {
        return PixelLayout::from_primitive(grid, p, gains).map_err(core(key));
    }
    if let Some(a) = cfg.pixel_array {
        return PixelLayout::pixel_array(grid, a.kx, a.ky, gains).map_err(core(key));
    }
    let path = cfg.mask_file.as_ref().expect("validated: one layout source");
    let mask_key = format!("{key}.mask_file");
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::config(&mask_key, format!("cannot read {}: {e}", path.display())))?;
    let image = read_pgm(&bytes).map_err(core(&mask_key))?;
    PixelLayout::from_label_image(grid, &image, gains).map_err(core(&mask_key))
}

fn build_basis(cfg: &ScenarioConfig, grid: Grid) -> Result<ModeBasis, CliError> {
    let b = &cfg.basis;
    match b.kind {
        BasisKind::HermiteGauss => {
            let order = b.max_order.expect("validated");
            let waist = b.waist.expect("validated");
            hermite_gauss_basis(order, waist, grid).map_err(core("basis"))
        }
        BasisKind::File => {
            let path = b.path.as_ref().expect("validated");
            let file = File::open(path)
                .map_err(|e| CliError::config("basis.path", format!("cannot read {}: {e}", path.display())))?;
            let modes = read_modes_csv(grid, BufReader::new(file)).map_err(core("basis.path"))?;
            ModeBasis::new(modes, cfg.analysis.tolerances.orthonormality).map_err(core("basis.path"))
        }
    }
}

fn build_state(cfg: &ScenarioConfig, dim: usize) -> Result<GaussianState, CliError> {
    let s = &cfg.state;
    for (i, c) in s.coherent.iter().enumerate() {
        if c.mode >= dim {
            return Err(CliError::config(
                format!("state.coherent[{i}].mode"),
                format!("mode {} out of range for a basis of {dim} modes", c.mode),
            ));
        }
    }
    let mut squeezers = Vec::new();
    for (i, sq) in s.squeezers.iter().enumerate() {
        if let SqueezeTarget::Index(k) = sq.mode {
            if k >= dim {
                return Err(CliError::config(
                    format!("state.squeezers[{i}].mode"),
                    format!("mode {k} out of range for a basis of {dim} modes"),
                ));
            }
            squeezers.push(SqueezerSpec::new(k, sq.r, sq.angle));
        }
    }
    let coherent: Vec<(usize, Complex64)> = s
        .coherent
        .iter()
        .map(|c| (c.mode, Complex64::new(c.re, c.im)))
        .collect();

    match &s.cov_file {
        None => make_state(dim, &coherent, &squeezers).map_err(core("state")),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::config("state.cov_file", format!("cannot read {}: {e}", path.display())))?;
            let rows: Vec<Vec<f64>> = serde_json::from_str(&text)
                .map_err(|e| CliError::config("state.cov_file", e.to_string()))?;
            let mut mean = vec![[0.0, 0.0]; dim];
            for (k, z) in &coherent {
                mean[*k] = [z.re, z.im];
            }
            StateDocument {
                dim,
                mean,
                squeezers: Vec::new(),
                cov: Some(rows),
            }
            .to_state()
            .map_err(core("state.cov_file"))
        }
    }
}

impl Scenario {
    pub fn build(cfg: &ScenarioConfig) -> Result<Self, CliError> {
        let g = &cfg.grid;
        let grid = Grid::new(g.nx, g.ny, g.width_x, g.width_y).map_err(core("grid"))?;
        let pool = build_basis(cfg, grid)?;
        let basis_info = BasisInfo {
            kind: cfg.basis.kind,
            size: pool.len(),
            max_orthonormality_deviation: pool.max_orthonormality_deviation(),
            truncation_residual: pool.metadata().truncation_residual,
            warnings: pool.metadata().warnings.clone(),
        };
        for w in &basis_info.warnings {
            log::warn!("basis: {w}");
        }
        let layout = cfg
            .layout
            .as_ref()
            .map(|l| build_layout(grid, l, "layout"))
            .transpose()?;
        let mut state = build_state(cfg, pool.len())?;
        let mut basis = pool.clone();

        let detection_squeezer = cfg
            .state
            .squeezers
            .iter()
            .find(|s| s.mode == SqueezeTarget::Named(NamedTarget::Detection));
        if let Some(sq) = detection_squeezer {
            let layout = layout.as_ref().expect("validated: detection squeezer needs a layout");
            let frame = detection_frame(&state, &basis, layout).map_err(core("state.squeezers"))?;
            log::debug!(
                "detection frame: {} modes, w1 at index {}",
                frame.basis.len(),
                frame.w1_index
            );
            state = frame
                .state
                .apply_squeezer(&SqueezerSpec::new(frame.w1_index, sq.r, sq.angle))
                .map_err(core("state.squeezers"))?;
            basis = frame.basis;
        }

        Ok(Scenario {
            grid,
            pool,
            basis,
            basis_info,
            state,
            layout,
        })
    }

    pub fn require_layout(&self) -> Result<&PixelLayout, CliError> {
        self.layout
            .as_ref()
            .ok_or_else(|| CliError::config("layout", "this command needs a layout"))
    }
}
