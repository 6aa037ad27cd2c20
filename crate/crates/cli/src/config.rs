use std::path::{Path, PathBuf};

use cylwave_core::model::{Family, Geometry, Medium, ModeSpec, Quadratures};
use cylwave_core::quantize::Hbar;
use cylwave_core::verify::SuiteConfig;
use serde::Deserialize;

use crate::args::{FamilyArg, Format, GeometryArg, Global};
use crate::error::CliError;

/// Contents of a `--config` file. Every key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: Option<GeometryArg>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub epsilon_r: Option<f64>,
    pub mu_r: Option<f64>,
    pub family: Option<FamilyArg>,
    pub n: Option<u32>,
    pub m: Option<u32>,
    #[serde(rename = "L")]
    pub length: Option<f64>,
    pub l: Option<i64>,
    #[serde(rename = "X")]
    pub x: Option<f64>,
    #[serde(rename = "Y")]
    pub y: Option<f64>,
    pub theta0: Option<f64>,
    pub phi0: Option<f64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub hbar: Option<f64>,
    pub freq: Option<f64>,
    pub verify: Option<SuiteConfig>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Flags merged over the config file over the defaults.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub geometry: Geometry,
    pub medium: Medium,
    pub spec: ModeSpec,
    pub length: f64,
    pub l: i64,
    pub q: Quadratures,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub hbar: Hbar,
    pub hbar_given: Option<f64>,
    pub strict: bool,
    pub seed: Option<u64>,
    pub freq: Option<f64>,
    pub verify: SuiteConfig,
}

pub fn resolve(g: &Global) -> Result<Resolved, CliError> {
    let cfg = match &g.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let kind = g.geometry.or(cfg.geometry).unwrap_or(GeometryArg::Coax);
    let a = g.a.or(cfg.a).unwrap_or(0.01);
    let geometry = match kind {
        GeometryArg::Coax => Geometry::coaxial(a, g.b.or(cfg.b).unwrap_or(2.0 * a))?,
        GeometryArg::Hollow => {
            if g.b.or(cfg.b).is_some() {
                return Err(CliError::Usage("--b applies to the coaxial geometry only".into()));
            }
            Geometry::hollow(a)?
        }
    };
    let medium = Medium::relative(g.epsilon_r.or(cfg.epsilon_r).unwrap_or(1.0), g.mu_r.or(cfg.mu_r).unwrap_or(1.0))?;
    let family = match g.family.or(cfg.family).unwrap_or(FamilyArg::Tem) {
        FamilyArg::Tem => Family::Tem,
        FamilyArg::Tm => Family::Tm,
        FamilyArg::Te => Family::Te,
    };
    let (n, m) = (g.n.or(cfg.n), g.m.or(cfg.m));
    let spec = if family == Family::Tem {
        if n.unwrap_or(0) != 0 || m.is_some_and(|m| m != 0) {
            return Err(CliError::Usage("TEM modes take no --n/--m indices".into()));
        }
        ModeSpec::tem()
    } else {
        ModeSpec::new(family, n.unwrap_or(0), m.unwrap_or(1))
    };
    let spec = spec.with_phases(g.theta0.or(cfg.theta0).unwrap_or(0.0), g.phi0.or(cfg.phi0).unwrap_or(0.0));
    spec.validate(&geometry)?;
    let q = Quadratures::new(g.x.or(cfg.x).unwrap_or(1.0), g.y.or(cfg.y).unwrap_or(0.0))?;
    let hbar_given = g.hbar.or(cfg.hbar);
    let hbar = match hbar_given {
        Some(h) => Hbar::new(h)?,
        None => Hbar::default(),
    };
    let freq = g.freq.or(cfg.freq);
    if let Some(f) = freq {
        if !(f > 0.0 && f.is_finite()) {
            return Err(CliError::Usage(format!("--freq must be positive, got {f}")));
        }
    }
    Ok(Resolved {
        geometry,
        medium,
        spec,
        length: g.length.or(cfg.length).unwrap_or(0.1),
        l: g.l.or(cfg.l).unwrap_or(1),
        q,
        format: g.format.or(cfg.format),
        out: g.out.clone().or(cfg.out),
        hbar,
        hbar_given,
        strict: g.strict,
        seed: g.seed,
        freq,
        verify: cfg.verify.unwrap_or_default(),
    })
}
