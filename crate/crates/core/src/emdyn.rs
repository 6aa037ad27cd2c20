//! Effective lengths, capacitance and inductance densities, generalized
//! fluxes, surface charges and currents, energy and momentum.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{Angular, Component, Env, EnvVals, Expr};
use crate::gauge;
use crate::model::{Family, Geometry, PropagatingMode, Quadratures};
use crate::profiles::{self, g_real_angular, g_vir_expr};
use crate::quad::{integrate, integrate_vec, QuadOptions};
use crate::specfun::{j, y};

const H_EFF_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HEff {
    pub h_eff: f64,
    pub h_eff_prime: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModalConstants {
    pub h_eff: f64,
    pub h_eff_prime: Option<f64>,
    pub c_d: f64,
    /// `1 / (μ h_eff)`
    pub l_d_inv: f64,
    pub k: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ElectrodeId {
    In,
    Out,
    Front,
    Back,
    VirTop { theta_p: f64 },
    VirBottom { theta_p: f64 },
}

impl ElectrodeId {
    pub fn name(&self) -> &'static str {
        match self {
            ElectrodeId::In => "in",
            ElectrodeId::Out => "out",
            ElectrodeId::Front => "front",
            ElectrodeId::Back => "back",
            ElectrodeId::VirTop { .. } => "vir_top",
            ElectrodeId::VirBottom { .. } => "vir_bottom",
        }
    }

    pub fn is_virtual(&self) -> bool {
        matches!(self, ElectrodeId::VirTop { .. } | ElectrodeId::VirBottom { .. })
    }
}

/// Position along an electrode: the angle on a cylinder, the radius on a
/// virtual plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Coord {
    Theta(f64),
    R(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceState {
    pub sigma: f64,
    pub j_z: f64,
    /// In-surface transverse component: along `u_θ` on cylinders, `u_r` on
    /// virtual planes.
    pub j_t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantsOfMotion {
    pub h: f64,
    pub p_z: f64,
    pub j_ang: f64,
    /// Transverse momentum components, zero by structure.
    pub p_x: f64,
    pub p_y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineChargeCurrent {
    pub q_full: f64,
    pub i_full: f64,
    pub q_lobe: f64,
    pub i_lobe: f64,
}

/// Surface charge and current of one electrode as symbolic components in the
/// electrode coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceExprs {
    pub sigma: Component,
    pub j_z: Component,
    pub j_t: Component,
    /// Cylinder radius, `None` for virtual planes.
    pub radius: Option<f64>,
}

fn lommel_j(nu: i32, k: f64, r: f64) -> f64 {
    let x = k * r;
    0.5 * r * r * (j(nu, x).powi(2) - j(nu - 1, x) * j(nu + 1, x))
}

/// Cylinder function `J_1(x_a) Y_ν(x) − Y_1(x_a) J_ν(x)`.
fn coax_z(nu: i32, xa: f64, x: f64) -> f64 {
    j(1, xa) * y(nu, x) - y(1, xa) * j(nu, x)
}

/// `∫ r C_ν(k r)² dr` antiderivative for the coaxial TE0 combination.
fn lommel_coax(nu: i32, xa: f64, k: f64, r: f64) -> f64 {
    let x = k * r;
    0.5 * r * r * (coax_z(nu, xa, x).powi(2) - coax_z(nu - 1, xa, x) * coax_z(nu + 1, xa, x))
}

pub type Integrand = Box<dyn Fn(f64) -> f64>;

/// Integrand and interval of the non-analytic effective lengths.
pub fn h_eff_integral_form(mode: &PropagatingMode) -> Option<(Integrand, f64, f64)> {
    let Geometry::Coaxial { a, b } = *mode.geometry() else { return None };
    let n = mode.n() as i32;
    let kc = mode.k_c();
    let xa = mode.x_a();
    match mode.family() {
        Family::Tem => None,
        Family::Tm => {
            let (jna, yna) = (j(n, xa), y(n, xa));
            let f = move |r: f64| {
                let x = kc * r;
                a * PI * PI / 2.0 * kc * kc * r / 2.0 * (j(n, x) * yna - jna * y(n, x)).powi(2)
            };
            Some((Box::new(f), a, b))
        }
        Family::Te if n > 0 => {
            let dj = j(n + 1, xa) - j(n - 1, xa);
            let dy = y(n + 1, xa) - y(n - 1, xa);
            let den = dj * y(n, xa) - j(n, xa) * dy;
            let nf = n as f64;
            let f = move |r: f64| {
                let x = kc * r;
                a * 2.0 / (nf * nf) * kc * kc * r / 2.0 * ((dj * y(n, x) - j(n, x) * dy) / den).powi(2)
            };
            Some((Box::new(f), a, b))
        }
        Family::Te => {
            let a_m = mode.norm().a_m.expect("normalized TE0 mode");
            let (j1a, y1a) = (j(1, xa), y(1, xa));
            let f = move |r: f64| {
                let x = kc * r;
                a * 4.0 * r / (a * a) * ((j(1, x) * y1a - j1a * y(1, x)) / (a_m * xa)).powi(2)
            };
            Some((Box::new(f), a, b))
        }
    }
}

pub fn compute_h_eff(mode: &PropagatingMode) -> Result<HEff> {
    let n = mode.n() as i32;
    let nf = n as f64;
    let a = mode.a();
    let xa = mode.x_a();
    let h = match (mode.family(), mode.geometry()) {
        (Family::Tem, Geometry::Coaxial { b, .. }) => a * (b / a).ln(),
        (_, Geometry::Coaxial { .. }) => {
            let (f, lo, hi) = h_eff_integral_form(mode).expect("coaxial integral form");
            integrate(f, lo, hi, QuadOptions::rel(H_EFF_TOL))?
        }
        (Family::Tm, Geometry::Hollow { .. }) => {
            let jm = j(n - 1, xa);
            a * 2.0 * (jm / (jm - j(n + 1, xa))).powi(2)
        }
        (Family::Te, Geometry::Hollow { .. }) if n > 0 => {
            let (jn, jn1) = (j(n, xa), j(n + 1, xa));
            a * (xa / nf).powi(2) * (xa * jn * jn - 2.0 * nf * jn * jn1 + xa * jn1 * jn1) / (2.0 * xa * jn * jn)
        }
        (Family::Te, Geometry::Hollow { .. }) => {
            let a_m = mode.norm().a_m.expect("normalized TE0 mode");
            a * 2.0 * (j(0, xa).powi(2) + j(1, xa).powi(2)) / (a_m * a_m)
        }
        (Family::Tem, Geometry::Hollow { .. }) => unreachable!("validated at construction"),
    };
    let h_prime = match *mode.geometry() {
        Geometry::Coaxial { b, .. } => {
            let xb = mode.k_c() * b;
            match mode.family() {
                Family::Tem => Some(b / a * h),
                Family::Tm => Some(b / a * (j(n, xb) / j(n, xa)).abs() * h),
                Family::Te if n > 0 => {
                    let br = (j(n + 1, xb) - j(n - 1, xb)) * y(n, xa) - j(n, xa) * (y(n + 1, xb) - y(n - 1, xb));
                    Some(b / a * (PI / 4.0 * xb * br).abs() * h)
                }
                Family::Te => None,
            }
        }
        Geometry::Hollow { .. } => None,
    };
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Invalid(format!("non-positive effective length {h} for {}", mode.label())));
    }
    Ok(HEff { h_eff: h, h_eff_prime: h_prime })
}

pub fn modal_constants(mode: &PropagatingMode) -> Result<ModalConstants> {
    let h = compute_h_eff(mode)?;
    let md = mode.medium();
    Ok(ModalConstants {
        h_eff: h.h_eff,
        h_eff_prime: h.h_eff_prime,
        c_d: md.epsilon() / h.h_eff,
        l_d_inv: 1.0 / (md.mu() * h.h_eff),
        k: gauge::k_coefficient(mode)?,
    })
}

/// `φ_m = E_m h_eff / ω`
pub fn phi_m(mode: &PropagatingMode, e_m: f64) -> Result<f64> {
    Ok(e_m * compute_h_eff(mode)?.h_eff / mode.omega())
}

/// Transverse flux profile: `g_real(θ)` or `g_vir(r)`.
pub fn flux_profile(mode: &PropagatingMode) -> Result<Expr> {
    if mode.is_virtual() {
        g_vir_expr(mode)
    } else {
        Ok(Expr::constant(1.0, g_real_angular(mode)))
    }
}

/// `φ = φ_m g f̃` as a symbolic component.
pub fn flux_component(mode: &PropagatingMode, phi_m: f64) -> Result<Component> {
    Ok(Component::new(flux_profile(mode)? * phi_m, Env::Ft))
}

fn coord_point(mode: &PropagatingMode, coord: Coord) -> Result<(f64, f64)> {
    match (mode.is_virtual(), coord) {
        (false, Coord::Theta(th)) => Ok((mode.a(), th - mode.spec().theta0)),
        (true, Coord::R(r)) => {
            profiles::check_r(mode, r)?;
            Ok((r, 0.0))
        }
        (false, Coord::R(_)) => Err(Error::Invalid("real-electrode fluxes are addressed by theta".into())),
        (true, Coord::Theta(_)) => Err(Error::Invalid("virtual-electrode fluxes are addressed by r".into())),
    }
}

pub fn generalized_flux(mode: &PropagatingMode, e_m: f64, q: Quadratures, coord: Coord, z: f64, t: f64) -> Result<f64> {
    let (r, vt) = coord_point(mode, coord)?;
    let phi = flux_component(mode, phi_m(mode, e_m)?)?;
    Ok(phi.value(r, vt, &mode.env_vals(q, z, t)))
}

/// Electrode on which line charge and current are reported.
pub fn reference_electrode(mode: &PropagatingMode) -> ElectrodeId {
    if mode.is_virtual() {
        ElectrodeId::VirTop { theta_p: mode.spec().theta0 }
    } else if mode.geometry().is_coaxial() {
        ElectrodeId::In
    } else {
        ElectrodeId::Front
    }
}

pub fn electrodes(mode: &PropagatingMode) -> Vec<ElectrodeId> {
    let th = mode.spec().theta0;
    let mut out = if mode.geometry().is_coaxial() {
        vec![ElectrodeId::In, ElectrodeId::Out]
    } else {
        vec![ElectrodeId::Front, ElectrodeId::Back]
    };
    if mode.is_virtual() {
        out.push(ElectrodeId::VirTop { theta_p: th });
        out.push(ElectrodeId::VirBottom { theta_p: th });
    }
    out
}

fn check_electrode(mode: &PropagatingMode, el: ElectrodeId) -> Result<()> {
    let ok = match el {
        ElectrodeId::In | ElectrodeId::Out => mode.geometry().is_coaxial(),
        ElectrodeId::Front | ElectrodeId::Back => !mode.geometry().is_coaxial(),
        ElectrodeId::VirTop { theta_p } | ElectrodeId::VirBottom { theta_p } => mode.is_virtual() && theta_p.is_finite(),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Invalid(format!("electrode '{}' does not exist for {}", el.name(), mode.label())))
    }
}

fn sign_pow(e: u32) -> f64 {
    if e.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

pub fn surface_exprs(mode: &PropagatingMode, e_m: f64, el: ElectrodeId) -> Result<SurfaceExprs> {
    check_electrode(mode, el)?;
    let hh = compute_h_eff(mode)?;
    let pm = e_m * hh.h_eff / mode.omega();
    let md = mode.medium();
    let c_d = md.epsilon() / hh.h_eff;
    let l_inv = 1.0 / (md.mu() * hh.h_eff);
    let (beta, omega, kc) = (mode.beta(), mode.omega(), mode.k_c());
    let g = flux_profile(mode)?;
    let (n, m) = (mode.n(), mode.m());
    let nf = n as f64;
    let a = mode.a();
    let kap2 = if mode.family() == Family::Tm { (mode.k() / beta).powi(2) } else { 1.0 };
    // ∂tφ, ∂zφ, ∂θφ as components
    let dt = Component::new(&g * (pm * omega), Env::F);
    let dz = Component::new(&g * (-pm * beta), Env::F);
    let dth = Component::new(g.d_theta() * pm, Env::Ft);
    let zero = Component::zero;
    let radius = match el {
        ElectrodeId::Out => mode.b(),
        ElectrodeId::VirTop { .. } | ElectrodeId::VirBottom { .. } => None,
        _ => Some(a),
    };
    let primed = |hp: Option<f64>| -> (f64, f64) {
        let hp = hp.expect("primed length on coaxial guides");
        (md.epsilon() / hp, 1.0 / (md.mu() * hp))
    };
    let s = |sigma: Component, j_z: Component, j_t: Component| Ok(SurfaceExprs { sigma, j_z, j_t, radius });

    if mode.is_virtual() {
        let xa = mode.x_a();
        let a_m = mode.norm().a_m.expect("normalized TE0 mode");
        let per = |v: f64| Component::new(Expr::constant(l_inv * v * pm, Angular::ONE), Env::Ft);
        return match (el, mode.geometry()) {
            (ElectrodeId::VirTop { .. } | ElectrodeId::VirBottom { .. }, _) => {
                let sg = if matches!(el, ElectrodeId::VirTop { .. }) { 1.0 } else { -1.0 };
                let rg = Component::new(g.times_r_pow(1).d_r().times_r_pow(-1) * pm, Env::Ft);
                s(dt.scaled(sg * c_d), dz.scaled(-sg * l_inv), rg.scaled(-sg * l_inv))
            }
            (ElectrodeId::In, _) => s(zero(), zero(), per(2.0 * kc * coax_z(0, xa, xa) / (a_m * xa))),
            (ElectrodeId::Out, Geometry::Coaxial { b, .. }) => {
                s(zero(), zero(), per(-2.0 * kc * coax_z(0, xa, kc * b) / (a_m * xa)))
            }
            _ => s(zero(), zero(), per(-2.0 * kc * j(0, xa) / a_m)),
        };
    }

    let periph = |r: f64| (kc * r / nf).powi(2) / r;
    match (mode.family(), el) {
        (Family::Tem, ElectrodeId::In) => s(dt.scaled(c_d), dz.scaled(-l_inv), zero()),
        (Family::Tem, ElectrodeId::Out) => {
            let (cp, lp) = primed(hh.h_eff_prime);
            s(dt.scaled(-cp), dz.scaled(lp), zero())
        }
        (Family::Tm, ElectrodeId::In | ElectrodeId::Front) => s(dt.scaled(c_d), dz.scaled(-l_inv * kap2), zero()),
        (Family::Tm, ElectrodeId::Out) => {
            let (cp, lp) = primed(hh.h_eff_prime);
            let sg = sign_pow(m);
            s(dt.scaled(-sg * cp), dz.scaled(sg * lp * kap2), zero())
        }
        (Family::Tm, ElectrodeId::Back) => {
            let sg = sign_pow(n + 1);
            s(dt.scaled(-sg * c_d), dz.scaled(sg * l_inv * kap2), zero())
        }
        (Family::Te, ElectrodeId::In | ElectrodeId::Front) => {
            s(dt.scaled(c_d), dz.scaled(-l_inv), dth.scaled(-l_inv * periph(a)))
        }
        (Family::Te, ElectrodeId::Out) => {
            let (cp, lp) = primed(hh.h_eff_prime);
            let b = mode.b().expect("coaxial");
            let sg = sign_pow(m + 1);
            s(dt.scaled(-sg * cp), dz.scaled(sg * lp), dth.scaled(sg * lp * periph(b)))
        }
        (Family::Te, ElectrodeId::Back) => {
            let sg = sign_pow(n + 1);
            s(dt.scaled(-sg * c_d), dz.scaled(sg * l_inv), dth.scaled(sg * l_inv * periph(a)))
        }
        _ => Err(Error::Invalid(format!("electrode '{}' does not exist for {}", el.name(), mode.label()))),
    }
}

fn electrode_point(mode: &PropagatingMode, el: ElectrodeId, coord: Coord) -> Result<(f64, f64)> {
    match (el.is_virtual(), coord) {
        (false, Coord::Theta(th)) => Ok((mode.a(), th - mode.spec().theta0)),
        (true, Coord::R(r)) => {
            profiles::check_r(mode, r)?;
            Ok((r, 0.0))
        }
        _ => Err(Error::Invalid(format!(
            "electrode '{}' is addressed by {}",
            el.name(),
            if el.is_virtual() { "r" } else { "theta" }
        ))),
    }
}

/// Surface charge and current. On the back electrode the coordinate is the
/// front angle θ; the physical point sits at θ + π.
#[allow(clippy::too_many_arguments)]
pub fn surface_state(
    mode: &PropagatingMode,
    e_m: f64,
    el: ElectrodeId,
    q: Quadratures,
    coord: Coord,
    z: f64,
    t: f64,
) -> Result<SurfaceState> {
    let (r, vt) = electrode_point(mode, el, coord)?;
    let s = surface_exprs(mode, e_m, el)?;
    let ev = mode.env_vals(q, z, t);
    Ok(SurfaceState { sigma: s.sigma.value(r, vt, &ev), j_z: s.j_z.value(r, vt, &ev), j_t: s.j_t.value(r, vt, &ev) })
}

/// Relative residual of the flux propagation equation at `(coord, z, t)`.
pub fn flux_equation_residual(mode: &PropagatingMode, q: Quadratures, points: &[(Coord, f64, f64)]) -> Result<f64> {
    let phi = flux_component(mode, 1.0)?;
    let (v2, mass) = match mode.family() {
        Family::Tem => (mode.medium().c().powi(2), 0.0),
        Family::Tm => (mode.v_phi().powi(2), 0.0),
        Family::Te => (mode.medium().c().powi(2), mode.k_c().powi(2)),
    };
    let mut worst: f64 = 0.0;
    for &(coord, z, t) in points {
        let (r, vt) = coord_point(mode, coord)?;
        let ev = mode.env_vals(q, z, t);
        let g = phi.e.eval(r, vt);
        let zz = g * second_z(&ev, phi.env);
        let tt = g * second_t(&ev, phi.env) / v2;
        let mm = mass * phi.value(r, vt, &ev);
        let scale = zz.abs().max(tt.abs()).max(mm.abs());
        if scale > 0.0 {
            worst = worst.max((zz - tt - mm).abs() / scale);
        }
    }
    Ok(worst)
}

fn second_z(ev: &EnvVals, e: Env) -> f64 {
    // ∂z applied to the first-derivative result
    match e {
        Env::F => ev.beta * ev.dz(Env::Ft),
        Env::Ft => -ev.beta * ev.dz(Env::F),
    }
}

fn second_t(ev: &EnvVals, e: Env) -> f64 {
    match e {
        Env::F => -ev.omega * ev.dt(Env::Ft),
        Env::Ft => ev.omega * ev.dt(Env::F),
    }
}

/// Relative residual of surface charge conservation on one electrode.
pub fn charge_conservation_residual(
    mode: &PropagatingMode,
    q: Quadratures,
    el: ElectrodeId,
    points: &[(Coord, f64, f64)],
) -> Result<f64> {
    let s = surface_exprs(mode, 1.0, el)?;
    let mut worst: f64 = 0.0;
    for &(coord, z, t) in points {
        let (r, vt) = electrode_point(mode, el, coord)?;
        let ev = mode.env_vals(q, z, t);
        let div_t = match s.radius {
            Some(rad) => s.j_t.d_theta().value(r, vt, &ev) / rad,
            None => s.j_t.d_r().value(r, vt, &ev),
        };
        let div_z = s.j_z.dz_value(r, vt, &ev);
        let ds = s.sigma.dt_value(r, vt, &ev);
        let scale = div_t.abs().max(div_z.abs()).max(ds.abs());
        if scale > 0.0 {
            worst = worst.max((div_t + div_z + ds).abs() / scale);
        }
    }
    Ok(worst)
}

/// Surface energy density on the reference-type electrodes (in, front, back
/// and the virtual planes).
#[allow(clippy::too_many_arguments)]
pub fn surface_energy_density(
    mode: &PropagatingMode,
    e_m: f64,
    q: Quadratures,
    el: ElectrodeId,
    coord: Coord,
    z: f64,
    t: f64,
) -> Result<f64> {
    if mode.is_virtual() != el.is_virtual() || el == ElectrodeId::Out {
        return Err(Error::Invalid(format!("no surface energy density on '{}' for {}", el.name(), mode.label())));
    }
    let hh = compute_h_eff(mode)?;
    let md = mode.medium();
    let c_d = md.epsilon() / hh.h_eff;
    let l_d = md.mu() * hh.h_eff;
    let st = surface_state(mode, e_m, el, q, coord, z, t)?;
    let base = 0.5 * st.sigma * st.sigma / c_d + 0.5 * l_d * st.j_z * st.j_z;
    Ok(match mode.family() {
        Family::Tem => base,
        Family::Tm => {
            let phi = generalized_flux(mode, e_m, q, coord, z, t)?;
            let kap2 = (mode.k() / mode.beta()).powi(2);
            base + 0.5 * c_d * kap2 * (md.c() * mode.k_c()).powi(2) * phi * phi
        }
        Family::Te if mode.n() > 0 => {
            let nf = mode.n() as f64;
            base + 0.5 * l_d * (nf / mode.x_a()).powi(2) * st.j_t * st.j_t
        }
        Family::Te => {
            let Coord::R(r) = coord else { unreachable!("checked by surface_state") };
            (base + 0.5 * l_d * st.j_t * st.j_t) * 2.0 * PI * r / hh.h_eff
        }
    })
}

/// `∫ g² dℓ` and `∫ g_d² dℓ` over the reference electrode, where `g_d` is the
/// profile entering the peripheral term.
fn electrode_moments(mode: &PropagatingMode, h_eff: f64) -> (f64, f64) {
    let a = mode.a();
    let n = mode.n();
    if !mode.is_virtual() {
        let ig = if n == 0 { 2.0 * PI * a } else { PI * a };
        let nf = n as f64;
        return (ig, nf * nf * PI * a);
    }
    let kc = mode.k_c();
    let xa = mode.x_a();
    let a_m = mode.norm().a_m.expect("normalized TE0 mode");
    let w = 2.0 * PI / h_eff;
    match *mode.geometry() {
        Geometry::Coaxial { b, .. } => {
            let c = 2.0 / (a_m * xa);
            let i1 = lommel_coax(1, xa, kc, b) - lommel_coax(1, xa, kc, a);
            let i0 = lommel_coax(0, xa, kc, b) - lommel_coax(0, xa, kc, a);
            (w * c * c * i1, w * (c * kc).powi(2) * i0)
        }
        Geometry::Hollow { .. } => {
            let c = 2.0 / a_m;
            (w * c * c * lommel_j(1, kc, a), w * (c * kc).powi(2) * lommel_j(0, kc, a))
        }
    }
}

/// Transverse weight `∫ g² dℓ` of the reference electrode: `2πa/γ[n]` for
/// real electrodes, the `g_vir` moment (with the `2πr/h_eff` weight) for
/// virtual planes.
pub fn transverse_weight(mode: &PropagatingMode) -> Result<f64> {
    let hh = compute_h_eff(mode)?;
    Ok(electrode_moments(mode, hh.h_eff).0)
}

/// Energy and momentum from the flux forms, with the z integral done over
/// one period of the guide.
pub fn energy_momentum_surface(mode: &PropagatingMode, e_m: f64, q: Quadratures) -> Result<ConstantsOfMotion> {
    let hh = compute_h_eff(mode)?;
    let md = mode.medium();
    let c_d = md.epsilon() / hh.h_eff;
    let l_inv = 1.0 / (md.mu() * hh.h_eff);
    let pm = e_m * hh.h_eff / mode.omega();
    let (beta, omega, kc) = (mode.beta(), mode.omega(), mode.k_c());
    let zint = q.norm_sqr() * mode.length() / 2.0;
    let (ig, id) = electrode_moments(mode, hh.h_eff);
    let kap2 = if mode.family() == Family::Tm { (mode.k() / beta).powi(2) } else { 1.0 };
    let mut dens = 0.5 * c_d * omega * omega * ig + 0.5 * l_inv * kap2 * kap2 * beta * beta * ig;
    match mode.family() {
        Family::Tm => dens += 0.5 * c_d * kap2 * (md.c() * kc).powi(2) * ig,
        Family::Te if mode.n() > 0 => dens += 0.5 * l_inv * (kc / mode.n() as f64).powi(2) * id,
        Family::Te => dens += 0.5 * l_inv * id,
        Family::Tem => {}
    }
    let h = pm * pm * zint * dens;
    let p_z = c_d * kap2 * pm * pm * omega * beta * ig * zint;
    Ok(ConstantsOfMotion { h, p_z, j_ang: 0.0, p_x: 0.0, p_y: 0.0 })
}

/// `∫₀ᴸ f² dz`, `∫₀ᴸ f̃² dz`, `∫₀ᴸ f f̃ dz` and the first moments
/// `∫₀ᴸ z (·) dz`, at `t`.
fn z_moments(mode: &PropagatingMode, q: Quadratures, t: f64) -> ([f64; 3], [f64; 3]) {
    let l = mode.length();
    let s = q.norm_sqr();
    let d = q.x * q.x - q.y * q.y;
    let xy = q.x * q.y;
    let c = 2.0 * (mode.omega() * t + mode.spec().phi0);
    let kap = 2.0 * mode.beta();
    // ∫ z cos(c − κz) = −L sin c / κ, ∫ z sin(c − κz) = L cos c / κ
    let zc = -l * c.sin() / kap;
    let zs = l * c.cos() / kap;
    let z1 = 0.5 * s * l * l / 2.0;
    let m0 = [s * l / 2.0, s * l / 2.0, 0.0];
    let m1 = [z1 + 0.5 * d * zc + xy * zs, z1 - 0.5 * d * zc - xy * zs, 0.5 * d * zs - xy * zc];
    (m0, m1)
}

/// Energy, momentum and angular momentum by volume integration of the
/// field densities, with the z integral done analytically.
pub fn energy_momentum_volume(mode: &PropagatingMode, e_m: f64, q: Quadratures) -> Result<ConstantsOfMotion> {
    energy_momentum_volume_with(mode, e_m, q, QuadOptions::rel(1e-11))
}

pub fn energy_momentum_volume_with(
    mode: &PropagatingMode,
    e_m: f64,
    q: Quadratures,
    opts: QuadOptions,
) -> Result<ConstantsOfMotion> {
    let p = profiles::profile_exprs(mode);
    let th0 = mode.spec().theta0;
    let (lo, hi) = mode.geometry().r_range();
    // transverse integrals over the cross-section:
    // Σg², Pz, Px, Py, r Pθ, y Pz, x Pz with P = gE × gB
    let inner = |r: f64, out: &mut [f64]| -> Result<()> {
        let forms: Vec<_> = p.e.iter().chain(p.b.iter()).map(|e| e.at_r(r)).collect();
        let v = integrate_vec(
            |vt, o: &mut [f64]| {
                let g: Vec<f64> = forms.iter().map(|f| f.eval(vt)).collect();
                let (er, eth, ez, br, bth, bz) = (g[0], g[1], g[2], g[3], g[4], g[5]);
                let pr = eth * bz - ez * bth;
                let pth = ez * br - er * bz;
                let pz = er * bth - eth * br;
                let th = vt + th0;
                let (s, c) = th.sin_cos();
                o[0] = g.iter().map(|x| x * x).sum::<f64>() * r;
                o[1] = pz * r;
                o[2] = (pr * c - pth * s) * r;
                o[3] = (pr * s + pth * c) * r;
                o[4] = pth * r * r;
                o[5] = r * s * pz * r;
                o[6] = r * c * pz * r;
            },
            7,
            0.0,
            2.0 * PI,
            opts,
        )?;
        out.copy_from_slice(&v);
        Ok(())
    };
    let mut failure = None;
    let tot = integrate_vec(
        |r, out: &mut [f64]| {
            if let Err(e) = inner(r, out) {
                failure.get_or_insert(e);
                out.iter_mut().for_each(|v| *v = 0.0);
            }
        },
        7,
        lo,
        hi,
        opts,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let md = mode.medium();
    let eps = md.epsilon();
    let b_m = e_m / md.c();
    let (m0, m1) = z_moments(mode, q, 0.0);
    let h = 0.5 * eps * e_m * e_m * tot[0] * m0[0];
    let pf = eps * e_m * b_m;
    let p_z = pf * tot[1] * m0[0];
    let p_x = pf * tot[2] * m0[2];
    let p_y = pf * tot[3] * m0[2];
    let j_x = pf * (tot[5] * m0[0] - tot[3] * m1[2]);
    let j_y = pf * (tot[2] * m1[2] - tot[6] * m0[0]);
    let j_z = pf * tot[4] * m0[2];
    Ok(ConstantsOfMotion { h, p_z, j_ang: (j_x * j_x + j_y * j_y + j_z * j_z).sqrt(), p_x, p_y })
}

/// Line charge and current on the reference electrode: the integral over the
/// whole transverse extent and, for n ≥ 1, over the lobe centred on the
/// charge maximum.
pub fn line_charge_current(mode: &PropagatingMode, e_m: f64, q: Quadratures, z: f64, t: f64) -> Result<LineChargeCurrent> {
    let el = reference_electrode(mode);
    let s = surface_exprs(mode, e_m, el)?;
    let ev = mode.env_vals(q, z, t);
    let both = |lo: f64, hi: f64, along_r: bool, w: f64| -> Result<(f64, f64)> {
        // full-period integrals vanish, so the tolerance is anchored to the
        // integrand magnitude
        let point = |u: f64| if along_r { (u, 0.0) } else { (mode.a(), u) };
        let peak = (0..=64).fold(0.0f64, |m, i| {
            let (r, vt) = point(lo + (hi - lo) * i as f64 / 64.0);
            m.max(s.sigma.value(r, vt, &ev).abs()).max(s.j_z.value(r, vt, &ev).abs())
        });
        let opts = QuadOptions { abs_tol: 1e-14 * w * peak * (hi - lo), ..QuadOptions::rel(1e-12) };
        let v = integrate_vec(
            |u, o: &mut [f64]| {
                let (r, vt) = point(u);
                o[0] = w * s.sigma.value(r, vt, &ev);
                o[1] = w * s.j_z.value(r, vt, &ev);
            },
            2,
            lo,
            hi,
            opts,
        )?;
        Ok((v[0], v[1]))
    };
    if el.is_virtual() {
        let (lo, hi) = mode.geometry().r_range();
        let (qf, i_f) = both(lo, hi, true, 1.0)?;
        return Ok(LineChargeCurrent { q_full: qf, i_full: i_f, q_lobe: qf, i_lobe: i_f });
    }
    let a = mode.a();
    let (qf, i_f) = both(0.0, 2.0 * PI, false, a)?;
    let (ql, il) = if mode.n() == 0 {
        (qf, i_f)
    } else {
        let c = profiles::peak_angle(mode);
        let half = PI / (2.0 * mode.n() as f64);
        both(c - half, c + half, false, a)?
    };
    Ok(LineChargeCurrent { q_full: qf, i_full: i_f, q_lobe: ql, i_lobe: il })
}
