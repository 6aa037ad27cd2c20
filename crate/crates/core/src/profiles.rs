//! Dimensionless transverse profiles of every mode family, the peak
//! normalization of the n = 0 TE modes, and physical field samples.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{Angular, Component, Env, Expr, VecField};
use crate::model::{Family, Geometry, NormalizationData, PropagatingMode, Quadratures};
use crate::specfun::{find_roots, j, y};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSextet {
    pub g_er: f64,
    pub g_eth: f64,
    pub g_ez: f64,
    pub g_br: f64,
    pub g_bth: f64,
    pub g_bz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    /// `(E_r, E_θ, E_z)` in V/m.
    pub e: [f64; 3],
    /// `(B_r, B_θ, B_z)` in T.
    pub b: [f64; 3],
}

/// Symbolic form of the six profiles, in `(r, θ − θ₀)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileExprs {
    pub e: [Expr; 3],
    pub b: [Expr; 3],
}

/// Angular factor carried by the electrode flux: 1, `cos nϑ` or `sin nϑ`.
pub fn g_real_angular(mode: &PropagatingMode) -> Angular {
    let n = mode.n() as i32;
    match mode.family() {
        Family::Tem => Angular::ONE,
        Family::Tm => Angular::cos(n),
        Family::Te => Angular::sin(n),
    }
}

/// Relative angle of the charge maximum on the reference electrode.
pub fn peak_angle(mode: &PropagatingMode) -> f64 {
    match mode.family() {
        Family::Te if mode.n() > 0 => PI / (2.0 * mode.n() as f64),
        _ => 0.0,
    }
}

fn coax_te0_eq(x_a: f64) -> impl Fn(f64) -> f64 {
    let (j1a, y1a) = (j(1, x_a), y(1, x_a));
    move |x| (j(0, x) - j(2, x)) * y1a - j1a * (y(0, x) - y(2, x))
}

fn first_root<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, what: &str) -> Result<f64> {
    let step = (PI / 64.0).min((hi - lo) / 64.0);
    let scan = find_roots(f, lo, hi, step, 1e-15)?;
    scan.roots.nth(1).ok_or_else(|| Error::RootWindow { what: what.into(), m: 1, window: hi })
}

/// Radius of the first extremum of the virtual-electrode profile.
pub fn solve_r_max(mode: &PropagatingMode) -> Result<f64> {
    if !mode.is_virtual() {
        return Err(Error::Unsupported("r_max is defined for TE modes with n = 0 only".into()));
    }
    let kc = mode.k_c();
    let xa = mode.x_a();
    let x = match *mode.geometry() {
        Geometry::Coaxial { b, .. } => {
            let lo = xa * (1.0 + 1e-12);
            first_root(coax_te0_eq(xa), lo, kc * b, "first extremum above r = a")?
        }
        Geometry::Hollow { .. } => first_root(|x| j(0, x) - j(2, x), 1e-3, xa, "first extremum above r = 0")?,
    };
    Ok(x / kc)
}

/// Peak normalizations `A_m` and, for coaxial guides, `A'_m`.
pub fn solve_peak_normalization(mode: &PropagatingMode) -> Result<(f64, Option<f64>)> {
    let r_max = solve_r_max(mode)?;
    let kc = mode.k_c();
    let xa = mode.x_a();
    let xm = kc * r_max;
    match *mode.geometry() {
        Geometry::Coaxial { b, .. } => {
            let a_m = 2.0 * (j(1, xa) * y(1, xm) - j(1, xm) * y(1, xa)) / xa;
            let (j0a, y0a) = (j(0, xa), y(0, xa));
            let xe = first_root(
                |x| j0a * y(1, x) - j(1, x) * y0a,
                xa * (1.0 + 1e-12),
                kc * b,
                "extremum of the gauge profile",
            )?;
            let a_mp = (j0a * y(0, xe) - j(0, xe) * y0a) / j0a;
            Ok((a_m, Some(a_mp)))
        }
        Geometry::Hollow { .. } => Ok((2.0 * j(1, xm), None)),
    }
}

pub(crate) fn normalization(mode: &PropagatingMode) -> Result<NormalizationData> {
    let n = mode.n() as i32;
    let (kc, k, beta) = (mode.k_c(), mode.k(), mode.beta());
    let a = mode.a();
    let xa = mode.x_a();
    let mut out = NormalizationData::default();
    match (mode.family(), mode.geometry().is_coaxial()) {
        (Family::Tem, _) => {}
        (Family::Tm, true) => out.a_nm = Some(4.0 * beta / (PI * kc * kc * a * y(n, xa))),
        (Family::Tm, false) => out.a_nm = Some(beta / kc * (j(n - 1, xa) - j(n + 1, xa))),
        (Family::Te, _) if n == 0 => {
            let r_max = solve_r_max(mode)?;
            let (a_m, a_mp) = solve_peak_normalization(mode)?;
            out.r_max = Some(r_max);
            out.a_m = Some(a_m);
            out.a_m_prime = a_mp;
            out.a_nm = Some(if mode.geometry().is_coaxial() { -a_m * k * a / y(1, xa) } else { a_m * k / kc });
        }
        (Family::Te, true) => {
            let dy = y(n - 1, xa) - y(n + 1, xa);
            let dj = j(n - 1, xa) - j(n + 1, xa);
            let nf = n as f64;
            out.a_nm = Some(-(2.0 * k * nf / (kc * kc * a)) * (j(n, xa) * dy - dj * y(n, xa)) / dy);
        }
        (Family::Te, false) => out.a_nm = Some(2.0 * k * n as f64 / (kc * kc * a) * j(n, xa)),
    }
    for v in [out.a_nm, out.r_max, out.a_m, out.a_m_prime].into_iter().flatten() {
        if !v.is_finite() || v == 0.0 {
            return Err(Error::Invalid(format!("degenerate normalization constant {v} for {}", mode.label())));
        }
    }
    Ok(out)
}

/// Ratio `rr` weighting the `Y` part of the radial solutions.
fn y_weight(mode: &PropagatingMode) -> f64 {
    let n = mode.n() as i32;
    let xa = mode.x_a();
    match (mode.family(), mode.geometry().is_coaxial()) {
        (_, false) | (Family::Tem, _) => 0.0,
        (Family::Tm, true) => j(n, xa) / y(n, xa),
        (Family::Te, true) => (j(n - 1, xa) - j(n + 1, xa)) / (y(n - 1, xa) - y(n + 1, xa)),
    }
}

/// `c · [Z_n(k_c r)]·ang` with `Z = J − rr·Y`.
fn z_expr(mode: &PropagatingMode, c: f64, nu: i32, ang: Angular) -> Expr {
    let rr = y_weight(mode);
    let kc = mode.k_c();
    let mut e = Expr::j(c, nu, kc, ang);
    if rr != 0.0 {
        e = e + Expr::y(-c * rr, nu, kc, ang);
    }
    e
}

/// `c · [Z_{n−1} − Z_{n+1}]·ang`
fn d_expr(mode: &PropagatingMode, c: f64, ang: Angular) -> Expr {
    let n = mode.n() as i32;
    z_expr(mode, c, n - 1, ang) - z_expr(mode, c, n + 1, ang)
}

pub fn profile_exprs(mode: &PropagatingMode) -> ProfileExprs {
    let n = mode.n() as i32;
    let nf = n as f64;
    let (kc, k, beta) = (mode.k_c(), mode.k(), mode.beta());
    let cs = Angular::cos(n);
    let sn = Angular::sin(n);
    if mode.family() == Family::Tem {
        let a = mode.a();
        let g = Expr::constant(a, Angular::ONE).times_r_pow(-1);
        return ProfileExprs {
            e: [g.clone(), Expr::zero(), Expr::zero()],
            b: [Expr::zero(), g * beta.signum(), Expr::zero()],
        };
    }
    let a_nm = mode.norm().a_nm.expect("normalized mode");
    let kc2 = kc * kc;
    match mode.family() {
        Family::Tm => ProfileExprs {
            e: [
                d_expr(mode, -beta / (kc * a_nm), cs),
                z_expr(mode, 2.0 * beta * nf / (kc2 * a_nm), n, sn).times_r_pow(-1),
                z_expr(mode, 2.0 / a_nm, n, cs),
            ],
            b: [
                z_expr(mode, -2.0 * k * nf / (kc2 * a_nm), n, sn).times_r_pow(-1),
                d_expr(mode, -k / (kc * a_nm), cs),
                Expr::zero(),
            ],
        },
        _ => ProfileExprs {
            e: [
                z_expr(mode, -2.0 * k * nf / (kc2 * a_nm), n, sn).times_r_pow(-1),
                d_expr(mode, -k / (kc * a_nm), cs),
                Expr::zero(),
            ],
            b: [
                d_expr(mode, beta / (kc * a_nm), cs),
                z_expr(mode, -2.0 * beta * nf / (kc2 * a_nm), n, sn).times_r_pow(-1),
                z_expr(mode, -2.0 / a_nm, n, cs),
            ],
        },
    }
}

/// Checks `r` against the guide interior with a relative slack of 1e-12.
pub fn check_r(mode: &PropagatingMode, r: f64) -> Result<()> {
    let (lo, hi) = mode.geometry().r_range();
    let slack = 1e-12 * hi;
    if !(r >= lo - slack && r <= hi + slack) || !r.is_finite() {
        return Err(Error::OutOfDomain { r, lo, hi });
    }
    Ok(())
}

pub fn profile(mode: &PropagatingMode, r: f64, theta: f64) -> Result<ProfileSextet> {
    check_r(mode, r)?;
    let p = profile_exprs(mode);
    let vt = theta - mode.spec().theta0;
    let v = |e: &Expr| e.eval(r, vt);
    Ok(ProfileSextet {
        g_er: v(&p.e[0]),
        g_eth: v(&p.e[1]),
        g_ez: v(&p.e[2]),
        g_br: v(&p.b[0]),
        g_bth: v(&p.b[1]),
        g_bz: v(&p.b[2]),
    })
}

/// Physical `E` and `B` as symbolic components with their envelopes.
pub fn field_exprs(mode: &PropagatingMode, e_m: f64) -> (VecField, VecField) {
    let p = profile_exprs(mode);
    let b_m = e_m / mode.medium().c();
    let [er, eth, ez] = p.e;
    let [br, bth, bz] = p.b;
    (
        VecField {
            r: Component::new(er * e_m, Env::F),
            th: Component::new(eth * e_m, Env::F),
            z: Component::new(ez * e_m, Env::Ft),
        },
        VecField {
            r: Component::new(br * b_m, Env::F),
            th: Component::new(bth * b_m, Env::F),
            z: Component::new(bz * b_m, Env::Ft),
        },
    )
}

#[allow(clippy::too_many_arguments)]
pub fn field_at(
    mode: &PropagatingMode,
    e_m: f64,
    q: Quadratures,
    r: f64,
    theta: f64,
    z: f64,
    t: f64,
) -> Result<FieldSample> {
    if !(e_m > 0.0) {
        return Err(Error::Invalid(format!("field amplitude must be positive, got {e_m}")));
    }
    check_r(mode, r)?;
    let (e, b) = field_exprs(mode, e_m);
    let ev = mode.env_vals(q, z, t);
    let vt = theta - mode.spec().theta0;
    Ok(FieldSample { e: e.values(r, vt, &ev), b: b.values(r, vt, &ev) })
}

/// Virtual-electrode flux profile `g_vir(r)` of the TE n = 0 modes.
pub fn g_vir_expr(mode: &PropagatingMode) -> Result<Expr> {
    if !mode.is_virtual() {
        return Err(Error::Unsupported("g_vir exists for TE modes with n = 0 only".into()));
    }
    let a_m = mode.norm().a_m.expect("normalized TE0 mode");
    let kc = mode.k_c();
    let xa = mode.x_a();
    Ok(match mode.geometry() {
        Geometry::Coaxial { .. } => {
            let c = 2.0 / (a_m * xa);
            Expr::y(c * j(1, xa), 1, kc, Angular::ONE) - Expr::j(c * y(1, xa), 1, kc, Angular::ONE)
        }
        Geometry::Hollow { .. } => Expr::j(2.0 / a_m, 1, kc, Angular::ONE),
    })
}

/// `g_real(θ)` on the reference electrode.
pub fn g_real(mode: &PropagatingMode, theta: f64) -> f64 {
    g_real_angular(mode).eval(theta - mode.spec().theta0)
}
