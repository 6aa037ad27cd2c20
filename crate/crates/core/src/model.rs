//! Geometry, medium, mode labels and the solved propagating mode.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::EnvVals;
use crate::profiles;
use crate::specfun::{self, find_roots, RootList};

pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
pub const MU_0: f64 = 1.256_637_062_12e-6;

/// Lower end of every cutoff scan, in units of the dimensionless argument.
const SCAN_START: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Medium {
    epsilon: f64,
    mu: f64,
}

impl Medium {
    pub fn new(epsilon: f64, mu: f64) -> Result<Self> {
        if !(epsilon > 0.0 && mu > 0.0 && epsilon.is_finite() && mu.is_finite()) {
            return Err(Error::Invalid(format!("medium needs epsilon > 0 and mu > 0, got {epsilon}, {mu}")));
        }
        Ok(Medium { epsilon, mu })
    }

    pub fn vacuum() -> Self {
        Medium { epsilon: EPSILON_0, mu: MU_0 }
    }

    pub fn relative(epsilon_r: f64, mu_r: f64) -> Result<Self> {
        Medium::new(epsilon_r * EPSILON_0, mu_r * MU_0)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Light speed in the medium.
    pub fn c(&self) -> f64 {
        1.0 / (self.mu * self.epsilon).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Geometry {
    Coaxial { a: f64, b: f64 },
    Hollow { a: f64 },
}

impl Geometry {
    pub fn coaxial(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > a && b.is_finite()) {
            return Err(Error::Invalid(format!("coaxial guide needs 0 < a < b, got a = {a}, b = {b}")));
        }
        Ok(Geometry::Coaxial { a, b })
    }

    pub fn hollow(a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Invalid(format!("hollow guide needs a > 0, got a = {a}")));
        }
        Ok(Geometry::Hollow { a })
    }

    pub fn a(&self) -> f64 {
        match *self {
            Geometry::Coaxial { a, .. } | Geometry::Hollow { a } => a,
        }
    }

    pub fn b(&self) -> Option<f64> {
        match *self {
            Geometry::Coaxial { b, .. } => Some(b),
            Geometry::Hollow { .. } => None,
        }
    }

    pub fn ratio(&self) -> Option<f64> {
        self.b().map(|b| b / self.a())
    }

    pub fn is_coaxial(&self) -> bool {
        matches!(self, Geometry::Coaxial { .. })
    }

    /// Radial extent of the guide interior.
    pub fn r_range(&self) -> (f64, f64) {
        match *self {
            Geometry::Coaxial { a, b } => (a, b),
            Geometry::Hollow { a } => (0.0, a),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "TEM")]
    Tem,
    #[serde(rename = "TM")]
    Tm,
    #[serde(rename = "TE")]
    Te,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Tem => "TEM",
            Family::Tm => "TM",
            Family::Te => "TE",
        })
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "TEM" => Ok(Family::Tem),
            "TM" => Ok(Family::Tm),
            "TE" => Ok(Family::Te),
            _ => Err(Error::Invalid(format!("unknown wave family '{s}' (expected TEM, TM or TE)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSpec {
    pub family: Family,
    /// Azimuthal index, 0 for TEM.
    pub n: u32,
    /// Radial index, 0 for TEM.
    pub m: u32,
    pub theta0: f64,
    pub phi0: f64,
}

impl ModeSpec {
    pub fn tem() -> Self {
        ModeSpec { family: Family::Tem, n: 0, m: 0, theta0: 0.0, phi0: 0.0 }
    }

    pub fn tm(n: u32, m: u32) -> Self {
        ModeSpec { family: Family::Tm, n, m, theta0: 0.0, phi0: 0.0 }
    }

    pub fn te(n: u32, m: u32) -> Self {
        ModeSpec { family: Family::Te, n, m, theta0: 0.0, phi0: 0.0 }
    }

    pub fn new(family: Family, n: u32, m: u32) -> Self {
        match family {
            Family::Tem => ModeSpec::tem(),
            _ => ModeSpec { family, n, m, theta0: 0.0, phi0: 0.0 },
        }
    }

    pub fn with_phases(self, theta0: f64, phi0: f64) -> Self {
        ModeSpec { theta0, phi0, ..self }
    }

    pub fn validate(&self, geometry: &Geometry) -> Result<()> {
        if !self.theta0.is_finite() || !self.phi0.is_finite() {
            return Err(Error::Invalid("theta0 and phi0 must be finite".into()));
        }
        match self.family {
            Family::Tem if !geometry.is_coaxial() => {
                Err(Error::Invalid("no TEM mode exists in a hollow guide".into()))
            }
            Family::Tem if self.n != 0 || self.m != 0 => Err(Error::Invalid("TEM modes carry no (n, m) indices".into())),
            Family::Tm | Family::Te if self.m < 1 => Err(Error::Invalid(format!("{} modes need m >= 1", self.family))),
            Family::Tm | Family::Te if self.n > 64 => Err(Error::Invalid("azimuthal index above 64 is not supported".into())),
            _ => Ok(()),
        }
    }

    pub fn label(&self) -> String {
        match self.family {
            Family::Tem => "TEM".into(),
            f => format!("{f}{},{}", self.n, self.m),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct NormalizationData {
    pub a_nm: Option<f64>,
    pub r_max: Option<f64>,
    pub a_m: Option<f64>,
    pub a_m_prime: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadratures {
    pub x: f64,
    pub y: f64,
}

impl Quadratures {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::Invalid("quadratures must be finite".into()));
        }
        Ok(Quadratures { x, y })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropagatingMode {
    spec: ModeSpec,
    geometry: Geometry,
    medium: Medium,
    length: f64,
    l: i64,
    beta: f64,
    k_c: f64,
    k: f64,
    omega: f64,
    v_phi: f64,
    norm: NormalizationData,
}

impl PropagatingMode {
    pub fn spec(&self) -> &ModeSpec {
        &self.spec
    }
    pub fn family(&self) -> Family {
        self.spec.family
    }
    pub fn n(&self) -> u32 {
        self.spec.n
    }
    pub fn m(&self) -> u32 {
        self.spec.m
    }
    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }
    pub fn medium(&self) -> &Medium {
        &self.medium
    }
    pub fn length(&self) -> f64 {
        self.length
    }
    pub fn l(&self) -> i64 {
        self.l
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn k_c(&self) -> f64 {
        self.k_c
    }
    pub fn k(&self) -> f64 {
        self.k
    }
    pub fn omega(&self) -> f64 {
        self.omega
    }
    pub fn omega_c(&self) -> f64 {
        self.medium.c() * self.k_c
    }
    pub fn v_phi(&self) -> f64 {
        self.v_phi
    }
    pub fn norm(&self) -> &NormalizationData {
        &self.norm
    }
    pub fn a(&self) -> f64 {
        self.geometry.a()
    }
    pub fn b(&self) -> Option<f64> {
        self.geometry.b()
    }
    /// `k_c a`
    pub fn x_a(&self) -> f64 {
        self.k_c * self.geometry.a()
    }
    /// TE modes with n = 0 carry their flux on virtual diameter planes.
    pub fn is_virtual(&self) -> bool {
        self.spec.family == Family::Te && self.spec.n == 0
    }
    pub fn label(&self) -> String {
        let g = match self.geometry {
            Geometry::Coaxial { a, b } => format!("coax b/a={}", b / a),
            Geometry::Hollow { .. } => "hollow".to_string(),
        };
        format!("{} {}", self.spec.label(), g)
    }

    pub fn env_vals(&self, q: Quadratures, z: f64, t: f64) -> EnvVals {
        let (f, ft) = envelope(self, q, z, t);
        EnvVals { f, ft, beta: self.beta, omega: self.omega }
    }
}

/// `(f, f̃)` at `(z, t)`.
pub fn envelope(mode: &PropagatingMode, q: Quadratures, z: f64, t: f64) -> (f64, f64) {
    let psi = mode.omega * t - mode.beta * z + mode.spec.phi0;
    let (s, c) = psi.sin_cos();
    (q.x * c + q.y * s, q.x * s - q.y * c)
}

/// Cutoff equation in the dimensionless variable `x = k_c a`.
pub fn cutoff_function(family: Family, n: u32, geometry: &Geometry) -> Result<Box<dyn Fn(f64) -> f64>> {
    let n = n as i32;
    match (family, geometry.ratio()) {
        (Family::Tem, _) => Err(Error::Unsupported("TEM modes have no cutoff equation".into())),
        (Family::Tm, Some(l)) => Ok(Box::new(move |x| specfun::cross_tm_unchecked(n, x, l))),
        (Family::Te, Some(l)) => Ok(Box::new(move |x| specfun::cross_te_unchecked(n, x, l))),
        (Family::Tm, None) => Ok(Box::new(move |x| specfun::j(n, x))),
        (Family::Te, None) => Ok(Box::new(move |x| specfun::j(n - 1, x) - specfun::j(n + 1, x))),
    }
}

fn scan_plan(n: u32, m: usize, geometry: &Geometry) -> (f64, f64) {
    match geometry.ratio() {
        Some(l) => {
            let step = PI / 8.0 * (1.0 / (l - 1.0)).min(1.0);
            (step, (m as f64 + 1.0) * PI / (l - 1.0) + 2.0 * n as f64 + 10.0)
        }
        None => (PI / 8.0, (m as f64 + 0.5 * n as f64 + 2.0) * PI + 10.0),
    }
}

/// The first `count` positive roots of the cutoff equation, as `k_c a`.
pub fn cutoff_roots(family: Family, n: u32, geometry: &Geometry, count: usize) -> Result<RootList> {
    let f = cutoff_function(family, n, geometry)?;
    let (step, mut window) = scan_plan(n, count, geometry);
    for attempt in 0..2 {
        let scan = find_roots(&f, SCAN_START, window, step, 1e-15)?;
        if scan.roots.len() >= count {
            return Ok(RootList::new(scan.roots.values()[..count].to_vec()));
        }
        if attempt == 0 {
            window *= 2.0;
        }
    }
    Err(Error::RootWindow { what: format!("{family}{n} cutoff"), m: count, window })
}

pub fn solve_mode(spec: ModeSpec, geometry: Geometry, medium: Medium, length: f64, l: i64) -> Result<PropagatingMode> {
    spec.validate(&geometry)?;
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::Invalid(format!("guide length must be positive, got {length}")));
    }
    if l == 0 {
        return Err(Error::Invalid(
            "l = 0 gives beta = 0, i.e. a mode exactly at cutoff that does not propagate".into(),
        ));
    }
    let beta = 2.0 * PI * l as f64 / length;
    let k_c = match spec.family {
        Family::Tem => 0.0,
        f => {
            let roots = cutoff_roots(f, spec.n, &geometry, spec.m as usize)?;
            roots.nth(spec.m as usize).expect("root count checked") / geometry.a()
        }
    };
    let k = if spec.family == Family::Tem { beta.abs() } else { (k_c * k_c + beta * beta).sqrt() };
    let c = medium.c();
    let mut mode = PropagatingMode {
        spec,
        geometry,
        medium,
        length,
        l,
        beta,
        k_c,
        k,
        omega: c * k,
        v_phi: c * k / beta.abs(),
        norm: NormalizationData::default(),
    };
    mode.norm = profiles::normalization(&mode)?;
    Ok(mode)
}
