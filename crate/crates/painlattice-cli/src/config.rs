//! Run configuration: defaults, optional TOML file, flag overrides (flags
//! win).

use painlattice::lattice::ScalingVariant;
use serde::Deserialize;
use std::path::PathBuf;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub precision_bits: u32,
    pub loop_nodes: usize,
    pub ray_nodes: usize,
    pub fd_step: f64,
    pub scaling: ScalingVariant,
    pub out_dir: PathBuf,
    pub cache_dir: Option<PathBuf>,
    pub include_s1: bool,
    pub boundary_resolution: usize,
    pub near_boundary_margin: f64,
    /// Capture window for quantization residuals (radians).
    pub quant_capture: f64,
    /// Relative vanishing threshold for the wedge integrals.
    pub vanish_tol: f64,
    /// σ₂/σ₁ threshold for the moment-matrix rank check.
    pub sigma_tol: f64,
    pub fekete_tol: f64,
    /// Allowed deviation of fitted log–log slopes.
    pub slope_tol: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            precision_bits: 256,
            loop_nodes: 512,
            ray_nodes: 400,
            fd_step: 1e-4,
            scaling: ScalingVariant::Natural,
            out_dir: PathBuf::from("out"),
            cache_dir: None,
            include_s1: true,
            boundary_resolution: 400,
            near_boundary_margin: 0.15,
            quant_capture: std::f64::consts::FRAC_PI_2,
            vanish_tol: 1e-8,
            sigma_tol: 1e-8,
            fekete_tol: 1e-25,
            slope_tol: 0.3,
        }
    }
}

/// TOML schema; every field optional so partial files work.
#[derive(Debug, Default, Deserialize)]
pub struct FileConfig {
    pub precision_bits: Option<u32>,
    pub loop_nodes: Option<usize>,
    pub ray_nodes: Option<usize>,
    pub fd_step: Option<f64>,
    pub scaling: Option<String>,
    pub out_dir: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub include_s1: Option<bool>,
    pub boundary_resolution: Option<usize>,
    pub near_boundary_margin: Option<f64>,
    pub quant_capture: Option<f64>,
    pub vanish_tol: Option<f64>,
    pub sigma_tol: Option<f64>,
    pub fekete_tol: Option<f64>,
    pub slope_tol: Option<f64>,
}

impl RunConfig {
    pub fn apply_file(&mut self, file: &FileConfig) -> Result<(), String> {
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(v) = &file.$f { self.$f = v.clone(); } )* };
        }
        take!(
            precision_bits,
            loop_nodes,
            ray_nodes,
            fd_step,
            out_dir,
            include_s1,
            boundary_resolution,
            near_boundary_margin,
            quant_capture,
            vanish_tol,
            sigma_tol,
            fekete_tol,
            slope_tol
        );
        if file.cache_dir.is_some() {
            self.cache_dir = file.cache_dir.clone();
        }
        if let Some(s) = &file.scaling {
            self.scaling = parse_scaling(s)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.precision_bits < 64 {
            return Err("precision_bits must be at least 64".into());
        }
        for (name, v) in [
            ("fd_step", self.fd_step),
            ("near_boundary_margin", self.near_boundary_margin),
            ("quant_capture", self.quant_capture),
            ("vanish_tol", self.vanish_tol),
            ("sigma_tol", self.sigma_tol),
            ("fekete_tol", self.fekete_tol),
            ("slope_tol", self.slope_tol),
        ] {
            if v.is_nan() || v <= 0.0 {
                return Err(format!("{name} must be positive, got {v}"));
            }
        }
        if self.boundary_resolution < 100 {
            return Err("boundary_resolution must be at least 100".into());
        }
        Ok(())
    }
}

pub fn parse_scaling(s: &str) -> Result<ScalingVariant, String> {
    match s.to_ascii_lowercase().as_str() {
        "natural" => Ok(ScalingVariant::Natural),
        "conjecture" => Ok(ScalingVariant::Conjecture),
        other => Err(format!("unknown scaling {other:?} (natural|conjecture)")),
    }
}

/// "A:B" inclusive.
pub fn parse_n_range(s: &str) -> Result<Vec<usize>, String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("bad n-range {s:?}, expected A:B"))?;
    let a: usize = a.trim().parse().map_err(|_| format!("bad range start {a:?}"))?;
    let b: usize = b.trim().parse().map_err(|_| format!("bad range end {b:?}"))?;
    if a == 0 || b < a {
        return Err(format!("empty or invalid range {s:?}"));
    }
    Ok((a..=b).collect())
}

/// "RE,IM".
pub fn parse_probe(s: &str) -> Result<(f64, f64), String> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| format!("bad probe {s:?}, expected RE,IM"))?;
    let re: f64 = re.trim().parse().map_err(|_| format!("bad probe re {re:?}"))?;
    let im: f64 = im.trim().parse().map_err(|_| format!("bad probe im {im:?}"))?;
    Ok((re, im))
}
