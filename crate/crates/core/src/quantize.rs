//! Modal capacitance and inductance, the single-quantum field amplitude and
//! the cutoff energy scales.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::emdyn;
use crate::error::{Error, Result};
use crate::model::{Family, PropagatingMode, Quadratures};

/// Reduced Planck constant in J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hbar(f64);

impl Hbar {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value.is_finite() {
            Ok(Hbar(value))
        } else {
            Err(Error::Invalid(format!("hbar must be positive and finite, got {value}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for Hbar {
    fn default() -> Self {
        Hbar(HBAR)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModalCoefficients {
    /// F
    pub c_h: f64,
    /// F
    pub c_p: f64,
    /// Inverse of `L_H`, with `L_H` in H/m².
    pub l_h_inv: f64,
    /// `L_H / β²`, H.
    pub l_h_over_beta2: f64,
    pub gamma_n: u32,
    /// Transverse length `2πa/γ[n]`, or the virtual-plane moment for TE0.
    pub transverse_length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantizationResult {
    pub c_h: f64,
    pub c_p: f64,
    pub l_h_inv: f64,
    pub l_h_over_beta2: f64,
    /// Wb
    pub phi_m: f64,
    /// V/m
    pub e_m: f64,
    /// T
    pub b_m: f64,
    /// J
    pub gap: f64,
    /// kg
    pub photon_mass: f64,
    pub gamma_n: u32,
    pub hbar: f64,
}

pub fn gamma(n: u32) -> u32 {
    if n == 0 {
        1
    } else {
        2
    }
}

pub fn modal_coefficients(mode: &PropagatingMode) -> Result<ModalCoefficients> {
    let mc = emdyn::modal_constants(mode)?;
    let g = gamma(mode.n());
    let w = match mode.family() {
        Family::Tem => 2.0 * PI * mode.a(),
        _ if mode.is_virtual() => emdyn::transverse_weight(mode)?,
        _ => 2.0 * PI * mode.a() / g as f64,
    };
    let len = mode.length();
    let c_h = mc.c_d * w * len;
    let kb2 = (mode.k() / mode.beta()).powi(2);
    let (c_p, l_h_inv) = if mode.family() == Family::Tm {
        (c_h * kb2, mc.l_d_inv * kb2 * kb2 * w * len)
    } else {
        (c_h, mc.l_d_inv * w * len)
    };
    Ok(ModalCoefficients {
        c_h,
        c_p,
        l_h_inv,
        l_h_over_beta2: 1.0 / (l_h_inv * mode.beta().powi(2)),
        gamma_n: g,
        transverse_length: w,
    })
}

/// `(φ_m, E_m)` with `2 C_P ω φ_m² = ħ`.
pub fn quantum_amplitude(mode: &PropagatingMode, hbar: Hbar) -> Result<(f64, f64)> {
    let c_p = modal_coefficients(mode)?.c_p;
    let w = mode.omega();
    let phi = (hbar.value() / (2.0 * c_p * w)).sqrt();
    let h = emdyn::compute_h_eff(mode)?.h_eff;
    Ok((phi, phi * w / h))
}

/// `(gap, photon_mass)`: `ħω_c` and, for TE, `ħω_c/c²`.
pub fn cutoff_quanta(mode: &PropagatingMode, hbar: Hbar) -> (f64, f64) {
    let gap = hbar.value() * mode.omega_c();
    match mode.family() {
        Family::Tem => (0.0, 0.0),
        Family::Tm => (gap, 0.0),
        Family::Te => (gap, gap / mode.medium().c().powi(2)),
    }
}

pub fn quantize(mode: &PropagatingMode, hbar: Hbar) -> Result<QuantizationResult> {
    let co = modal_coefficients(mode)?;
    let (phi_m, e_m) = quantum_amplitude(mode, hbar)?;
    let (gap, photon_mass) = cutoff_quanta(mode, hbar);
    Ok(QuantizationResult {
        c_h: co.c_h,
        c_p: co.c_p,
        l_h_inv: co.l_h_inv,
        l_h_over_beta2: co.l_h_over_beta2,
        phi_m,
        e_m,
        b_m: e_m / mode.medium().c(),
        gap,
        photon_mass,
        gamma_n: co.gamma_n,
        hbar: hbar.value(),
    })
}

/// `ħω(X² + Y²)/4` and `ħβ(X² + Y²)/4`.
pub fn quadrature_energy_momentum(mode: &PropagatingMode, hbar: Hbar, q: Quadratures) -> (f64, f64) {
    let s = q.norm_sqr() / 4.0;
    (hbar.value() * mode.omega() * s, hbar.value() * mode.beta() * s)
}

/// Flux and charge amplitudes on the reference electrode:
/// `φ_max = φ_m f̃`, `Q_max = C_P ∂φ_max/∂t = C_P φ_m ω f`.
pub fn flux_charge_amplitudes(mode: &PropagatingMode, hbar: Hbar, q: Quadratures, z: f64, t: f64) -> Result<(f64, f64)> {
    let co = modal_coefficients(mode)?;
    let (phi, _) = quantum_amplitude(mode, hbar)?;
    let ev = mode.env_vals(q, z, t);
    Ok((phi * ev.ft, co.c_p * phi * mode.omega() * ev.f))
}
