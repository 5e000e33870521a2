//! Scenario configuration (strict JSON schema).

use std::path::{Path, PathBuf};

use flipmode::detection::{LayoutPrimitive, DIFFERENCE_TOL, DUAL_PATH_TOL};
use flipmode::modes::HERMITE_ORTHO_TOL;
use flipmode::montecarlo::SimConfig;
use flipmode::state::RANK_TOL;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub grid: GridConfig,
    pub basis: BasisConfig,
    #[serde(default)]
    pub state: StateConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<LayoutConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multi: Option<MultiConfig>,
    #[serde(default)]
    pub analysis: AnalysisConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub nx: usize,
    pub ny: usize,
    pub width_x: f64,
    pub width_y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    HermiteGauss,
    File,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisConfig {
    #[serde(rename = "type")]
    pub kind: BasisKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub waist: Option<f64>,
    /// CSV written by `export-modes` (columns `mode,x,y,re,im`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateConfig {
    #[serde(default)]
    pub coherent: Vec<CoherentEntry>,
    #[serde(default)]
    pub squeezers: Vec<SqueezerEntry>,
    /// JSON array of 2n rows holding the full quadrature covariance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cov_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoherentEntry {
    pub mode: usize,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// Either a basis index or `"detection"`, the detection mode of the layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(untagged)]
pub enum SqueezeTarget {
    Index(usize),
    Named(NamedTarget),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedTarget {
    Detection,
}

impl<'de> Deserialize<'de> for SqueezeTarget {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct Visitor;
        impl serde::de::Visitor<'_> for Visitor {
            type Value = SqueezeTarget;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a mode index or \"detection\"")
            }

            fn visit_u64<E: serde::de::Error>(self, v: u64) -> Result<Self::Value, E> {
                usize::try_from(v)
                    .map(SqueezeTarget::Index)
                    .map_err(|_| E::custom("mode index too large"))
            }

            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<Self::Value, E> {
                match v {
                    "detection" => Ok(SqueezeTarget::Named(NamedTarget::Detection)),
                    _ => Err(E::invalid_value(serde::de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(Visitor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SqueezerEntry {
    pub mode: SqueezeTarget,
    pub r: f64,
    #[serde(default)]
    pub angle: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PixelArrayConfig {
    pub kx: usize,
    pub ky: usize,
}

/// Exactly one of `primitive`, `mask_file`, `pixel_array` selects the pixels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primitive: Option<LayoutPrimitive>,
    /// PGM label image, one grey level per pixel index.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mask_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pixel_array: Option<PixelArrayConfig>,
    pub gains: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiConfig {
    pub layouts: Vec<LayoutConfig>,
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandName {
    Analyze,
    Degree,
    Multi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    #[serde(default = "default_commands")]
    pub commands: Vec<CommandName>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monte_carlo: Option<SimConfig>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            commands: default_commands(),
            tolerances: Tolerances::default(),
            monte_carlo: None,
        }
    }
}

fn default_commands() -> Vec<CommandName> {
    vec![CommandName::Analyze]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_dual_path")]
    pub dual_path: f64,
    #[serde(default = "default_rank")]
    pub rank: f64,
    #[serde(default = "default_difference")]
    pub difference: f64,
    /// Accepted orthonormality deviation of the mode basis.
    #[serde(default = "default_orthonormality")]
    pub orthonormality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            dual_path: DUAL_PATH_TOL,
            rank: RANK_TOL,
            difference: DIFFERENCE_TOL,
            orthonormality: HERMITE_ORTHO_TOL,
        }
    }
}

fn default_dual_path() -> f64 {
    DUAL_PATH_TOL
}
fn default_rank() -> f64 {
    RANK_TOL
}
fn default_difference() -> f64 {
    DIFFERENCE_TOL
}
fn default_orthonormality() -> f64 {
    HERMITE_ORTHO_TOL
}

/// Renders a deserialization failure as `path.field: message`.
fn describe(err: serde_path_to_error::Error<serde_json::Error>) -> CliError {
    let path = err.path().to_string();
    let inner = err.inner();
    let text = inner.to_string();
    // serde_json appends " at line L column C"; keep it out of the key path.
    let message = match text.rfind(" at line ") {
        Some(i) if inner.line() > 0 => text[..i].to_string(),
        _ => text,
    };
    let quoted = |prefix: &str| {
        message
            .strip_prefix(prefix)
            .and_then(|rest| rest.split('`').next())
            .map(str::to_string)
    };
    let join = |field: String| {
        if path == "." || path.is_empty() {
            field
        } else if path.ends_with(&field) {
            path.clone()
        } else {
            format!("{path}.{field}")
        }
    };
    let key = if let Some(field) = quoted("missing field `") {
        join(field)
    } else if let Some(field) = quoted("unknown field `") {
        join(field)
    } else if path == "." {
        "<root>".to_string()
    } else {
        path.clone()
    };
    CliError::config(key, message)
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: ScenarioConfig = serde_path_to_error::deserialize(de).map_err(describe)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads the file and resolves relative paths against its directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config("<file>", format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&text)?;
        if let Some(dir) = path.parent() {
            cfg.resolve_paths(dir);
        }
        Ok(cfg)
    }

    fn resolve_paths(&mut self, dir: &Path) {
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(p) = p {
                if p.is_relative() {
                    *p = dir.join(&*p);
                }
            }
        };
        fix(&mut self.basis.path);
        fix(&mut self.state.cov_file);
        if let Some(l) = &mut self.layout {
            fix(&mut l.mask_file);
        }
        if let Some(m) = &mut self.multi {
            for l in &mut m.layouts {
                fix(&mut l.mask_file);
            }
        }
    }

    /// Structural checks that need no file access.
    pub fn validate(&self) -> Result<(), CliError> {
        let g = &self.grid;
        for (key, v) in [("grid.width_x", g.width_x), ("grid.width_y", g.width_y)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::config(key, format!("must be finite and positive, got {v}")));
            }
        }
        for (key, v) in [("grid.nx", g.nx), ("grid.ny", g.ny)] {
            if v < 2 {
                return Err(CliError::config(key, format!("must be at least 2, got {v}")));
            }
        }

        let b = &self.basis;
        match b.kind {
            BasisKind::HermiteGauss => {
                if b.max_order.is_none() {
                    return Err(CliError::config("basis.max_order", "required for type hermite_gauss"));
                }
                match b.waist {
                    None => return Err(CliError::config("basis.waist", "required for type hermite_gauss")),
                    Some(w) if !(w.is_finite() && w > 0.0) => {
                        return Err(CliError::config("basis.waist", format!("must be finite and positive, got {w}")))
                    }
                    _ => {}
                }
                if b.path.is_some() {
                    return Err(CliError::config("basis.path", "only valid for type file"));
                }
            }
            BasisKind::File => {
                if b.path.is_none() {
                    return Err(CliError::config("basis.path", "required for type file"));
                }
                if b.max_order.is_some() || b.waist.is_some() {
                    return Err(CliError::config(
                        "basis.max_order",
                        "max_order and waist are only valid for type hermite_gauss",
                    ));
                }
            }
        }

        let s = &self.state;
        let mut seen = std::collections::BTreeSet::new();
        for (i, c) in s.coherent.iter().enumerate() {
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(CliError::config(format!("state.coherent[{i}]"), "amplitude must be finite"));
            }
            if !seen.insert(c.mode) {
                return Err(CliError::config(
                    format!("state.coherent[{i}].mode"),
                    format!("duplicate amplitude for mode {}", c.mode),
                ));
            }
        }
        let mut squeezed = std::collections::BTreeSet::new();
        for (i, sq) in s.squeezers.iter().enumerate() {
            if !(sq.r.is_finite() && sq.angle.is_finite()) {
                return Err(CliError::config(format!("state.squeezers[{i}]"), "r and angle must be finite"));
            }
            if !squeezed.insert(sq.mode) {
                return Err(CliError::config(
                    format!("state.squeezers[{i}].mode"),
                    "at most one squeezer per mode",
                ));
            }
            if sq.mode == SqueezeTarget::Named(NamedTarget::Detection) && self.layout.is_none() {
                return Err(CliError::config(
                    format!("state.squeezers[{i}].mode"),
                    "squeezing the detection mode needs a layout",
                ));
            }
        }
        if s.cov_file.is_some() && !s.squeezers.is_empty() {
            return Err(CliError::config("state.cov_file", "cannot be combined with squeezers"));
        }

        if let Some(l) = &self.layout {
            l.validate("layout")?;
        }
        if let Some(m) = &self.multi {
            if m.layouts.is_empty() {
                return Err(CliError::config("multi.layouts", "at least one layout is required"));
            }
            for (i, l) in m.layouts.iter().enumerate() {
                l.validate(&format!("multi.layouts[{i}]"))?;
            }
            if !m.r.is_finite() {
                return Err(CliError::config("multi.r", "must be finite"));
            }
        }

        let t = &self.analysis.tolerances;
        for (key, v) in [
            ("analysis.tolerances.dual_path", t.dual_path),
            ("analysis.tolerances.rank", t.rank),
            ("analysis.tolerances.difference", t.difference),
            ("analysis.tolerances.orthonormality", t.orthonormality),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::config(key, format!("must be finite and positive, got {v}")));
            }
        }
        if let Some(mc) = &self.analysis.monte_carlo {
            mc.validate()
                .map_err(|e| CliError::config("analysis.monte_carlo", e.to_string()))?;
        }
        if self.analysis.commands.is_empty() {
            return Err(CliError::config("analysis.commands", "at least one command is required"));
        }
        Ok(())
    }
}

impl LayoutConfig {
    fn validate(&self, prefix: &str) -> Result<(), CliError> {
        let chosen = [
            self.primitive.is_some(),
            self.mask_file.is_some(),
            self.pixel_array.is_some(),
        ]
        .iter()
        .filter(|&&b| b)
        .count();
        if chosen != 1 {
            return Err(CliError::config(
                prefix,
                "exactly one of primitive, mask_file, pixel_array is required",
            ));
        }
        let expected = match (&self.primitive, &self.pixel_array) {
            (Some(p), _) => Some(p.pixel_count()),
            (_, Some(a)) => Some(a.kx * a.ky),
            _ => None,
        };
        if let Some(n) = expected {
            if self.gains.len() != n {
                return Err(CliError::config(
                    format!("{prefix}.gains"),
                    format!("expected {n} gains, got {}", self.gains.len()),
                ));
            }
        }
        if self.gains.iter().any(|g| !g.is_finite()) {
            return Err(CliError::config(format!("{prefix}.gains"), "gains must be finite"));
        }
        Ok(())
    }
}
