//! Scalar and vector potentials, potential differences between electrodes,
//! the flux/potential relations and the transverse gauge.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::emdyn::{compute_h_eff, flux_profile};
use crate::error::{Error, Result};
use crate::expr::{Angular, EnvVals, Expr, Radial};
use crate::model::{Family, Geometry, PropagatingMode, Quadratures};
use crate::profiles::{self, g_vir_expr, profile_exprs};
use crate::specfun::{j, y};

/// Free parameters of the gauge function `Π = p f + p̃ f̃`, with
/// `p = (a J_n + b Y_n) cos nϑ + (c J_n + d Y_n) sin nϑ` (for TEM,
/// `p = a ln r + b`). Constants left `None` are derived from the fixing
/// rules of the family or default to zero.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaugeChoice {
    pub alpha: f64,
    pub a_pi: Option<f64>,
    pub b_pi: Option<f64>,
    pub c_pi: Option<f64>,
    pub d_pi: Option<f64>,
    pub a_pi_t: Option<f64>,
    pub b_pi_t: Option<f64>,
    pub c_pi_t: Option<f64>,
    pub d_pi_t: Option<f64>,
}

impl GaugeChoice {
    pub fn with_alpha(alpha: f64) -> Self {
        GaugeChoice { alpha, ..Default::default() }
    }

    /// Coaxial TE n > 0 gauge with equal potential magnitudes on both
    /// conductors.
    pub fn symmetric_te(mode: &PropagatingMode) -> Result<Self> {
        let Geometry::Coaxial { b, .. } = *mode.geometry() else {
            return Err(Error::Unsupported("the symmetric gauge exists for coaxial TE modes only".into()));
        };
        if mode.family() != Family::Te || mode.n() == 0 {
            return Err(Error::Unsupported("the symmetric gauge exists for coaxial TE modes with n > 0".into()));
        }
        let n = mode.n() as i32;
        let (xa, xb) = (mode.x_a(), mode.k_c() * b);
        let s = sign_pow(mode.m() + 1);
        let num = (j(n, xa) - s * j(n, xb)) * (y(n, xb) + s * y(n, xa));
        let den = j(n, xa) * y(n, xb) - j(n, xb) * y(n, xa);
        Ok(GaugeChoice::with_alpha(0.5 * num / den))
    }
}

/// A valid choice with every free constant drawn uniformly from
/// `±scale`, and `α` from `±1` where it is free.
pub fn random_choice<R: rand::Rng>(mode: &PropagatingMode, rng: &mut R, scale: f64) -> GaugeChoice {
    let mut c = GaugeChoice::default();
    let mut v = || Some(rng.gen_range(-scale..scale));
    let n0 = mode.n() == 0;
    match (mode.family(), mode.geometry().is_coaxial(), mode.n()) {
        (Family::Tem, _, _) => {
            c.b_pi = v();
            c.b_pi_t = v();
        }
        (Family::Te, true, 0) => {}
        (Family::Te, false, 0) => c.a_pi_t = v(),
        (Family::Tm, false, _) => {
            c.a_pi = v();
            c.a_pi_t = v();
            if !n0 {
                c.c_pi = v();
                c.c_pi_t = v();
            }
        }
        _ => {
            c.b_pi = v();
            c.b_pi_t = v();
            if !n0 {
                c.d_pi = v();
                c.d_pi_t = v();
            }
        }
    }
    if matches!((mode.family(), mode.geometry().is_coaxial(), mode.n()), (Family::Tm, true, _) | (Family::Te, _, 1..)) {
        c.alpha = rng.gen_range(-1.0..1.0);
    }
    c
}

/// Gauge constants after applying the fixing rules: `[a, b, c, d]` for `p`
/// and `p̃`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResolvedGauge {
    pub alpha: f64,
    pub p: [f64; 4],
    pub p_t: [f64; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialSample {
    pub a: [f64; 3],
    pub v: f64,
    /// Set near the axis of hollow guides, where potentials may diverge.
    pub flagged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PdKind {
    DV,
    DAz,
    DAn,
}

/// Parity coefficients and coordinate of the potential differences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialDifferenceSpec {
    pub sigma_z: f64,
    pub sigma_n: f64,
    pub radial_coord: bool,
    pub effective: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DevoretResidual {
    pub res_t: f64,
    pub res_z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransverseGaugeReport {
    pub k: f64,
    pub res_k_relation: f64,
    pub dv_res: f64,
    pub daz_res: f64,
    /// For TE n = 0: `max |ΔV_eff| / (φ_m ω)`, the distance between the
    /// imposed effective voltage and the vanishing transverse-gauge one.
    pub broken_symmetry: Option<f64>,
}

fn sign_pow(e: u32) -> f64 {
    if e.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Sum of an `f`-carried and an `f̃`-carried profile.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Mixed {
    pub f: Expr,
    pub ft: Expr,
}

impl Mixed {
    pub fn f(e: Expr) -> Self {
        Mixed { f: e, ft: Expr::zero() }
    }

    pub fn ft(e: Expr) -> Self {
        Mixed { f: Expr::zero(), ft: e }
    }

    fn map(&self, g: impl Fn(&Expr) -> Expr) -> Mixed {
        Mixed { f: g(&self.f), ft: g(&self.ft) }
    }

    pub fn d_r(&self) -> Mixed {
        self.map(Expr::d_r)
    }

    pub fn d_theta(&self) -> Mixed {
        self.map(Expr::d_theta)
    }

    pub fn times_r_pow(&self, q: i32) -> Mixed {
        self.map(|e| e.times_r_pow(q))
    }

    pub fn scaled(&self, s: f64) -> Mixed {
        self.map(|e| e * s)
    }

    pub fn dz(&self, beta: f64) -> Mixed {
        Mixed { f: &self.ft * -beta, ft: &self.f * beta }
    }

    pub fn dt(&self, omega: f64) -> Mixed {
        Mixed { f: &self.ft * omega, ft: &self.f * -omega }
    }

    pub fn add(&self, o: &Mixed) -> Mixed {
        Mixed { f: self.f.clone() + o.f.clone(), ft: self.ft.clone() + o.ft.clone() }
    }

    pub fn value(&self, r: f64, vt: f64, ev: &EnvVals) -> f64 {
        let mut v = 0.0;
        if !self.f.is_zero() {
            v += self.f.eval(r, vt) * ev.f;
        }
        if !self.ft.is_zero() {
            v += self.ft.eval(r, vt) * ev.ft;
        }
        v
    }
}

/// Symbolic potentials of a mode.
#[derive(Debug, Clone, PartialEq)]
pub struct Potentials {
    pub a: [Mixed; 3],
    pub v: Mixed,
    beta: f64,
    omega: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedFields {
    pub e: [f64; 3],
    pub b: [f64; 3],
    pub lorenz: f64,
    /// Largest single term of the Lorenz condition.
    pub lorenz_scale: f64,
    /// Largest single term entering `E` and `c B`.
    pub field_scale: f64,
}

impl Potentials {
    pub fn sample(&self, r: f64, vt: f64, ev: &EnvVals) -> ([f64; 3], f64) {
        ([self.a[0].value(r, vt, ev), self.a[1].value(r, vt, ev), self.a[2].value(r, vt, ev)], self.v.value(r, vt, ev))
    }

    /// Fields `E = −∂A/∂t − ∇V`, `B = ∇ × A` and the Lorenz condition.
    pub fn derived(&self, r: f64, vt: f64, ev: &EnvVals, c: f64) -> DerivedFields {
        let (b, w) = (self.beta, self.omega);
        let [ar, at, az] = &self.a;
        let v = &self.v;
        let val = |m: &Mixed| m.value(r, vt, ev);
        let ep = [
            [-val(&ar.dt(w)), -val(&v.d_r())],
            [-val(&at.dt(w)), -val(&v.d_theta()) / r],
            [-val(&az.dt(w)), -val(&v.dz(b))],
        ];
        let bp = [
            [val(&az.d_theta()) / r, -val(&at.dz(b))],
            [val(&ar.dz(b)), -val(&az.d_r())],
            [val(&at.times_r_pow(1).d_r()) / r, -val(&ar.d_theta()) / r],
        ];
        let e = ep.map(|[x, y]| x + y);
        let bf = bp.map(|[x, y]| x + y);
        let field_scale = ep
            .iter()
            .flatten()
            .copied()
            .chain(bp.iter().flatten().map(|x| x * c))
            .fold(0.0f64, |m, x| m.max(x.abs()));
        let terms = [
            val(&ar.times_r_pow(1).d_r()) / r,
            val(&at.d_theta()) / r,
            val(&az.dz(b)),
            val(&v.dt(w)) / (c * c),
        ];
        DerivedFields {
            e,
            b: bf,
            lorenz: terms.iter().sum(),
            lorenz_scale: terms.iter().fold(0.0f64, |m, x| m.max(x.abs())),
            field_scale,
        }
    }
}

fn close(v: f64, target: f64) -> bool {
    (v - target).abs() <= 1e-12 * target.abs().max(1.0)
}

/// Applies the fixing rules of the family to the user's choice.
pub fn resolve(mode: &PropagatingMode, choice: &GaugeChoice) -> Result<ResolvedGauge> {
    let n = mode.n() as i32;
    let xa = mode.x_a();
    let bad = |what: &str| Err(Error::Invalid(format!("gauge choice for {}: {what}", mode.label())));
    let has_alpha = matches!(
        (mode.family(), mode.geometry().is_coaxial(), n),
        (Family::Tm, true, _) | (Family::Te, _, 1..)
    );
    if !choice.alpha.is_finite() || (!has_alpha && choice.alpha != 0.0) {
        return bad("alpha is not a free parameter of this family");
    }
    let users = [
        [choice.a_pi, choice.b_pi, choice.c_pi, choice.d_pi],
        [choice.a_pi_t, choice.b_pi_t, choice.c_pi_t, choice.d_pi_t],
    ];
    if users.iter().flatten().flatten().any(|v| !v.is_finite()) {
        return bad("gauge constants must be finite");
    }
    // ratio r such that a = r b and c = r d; None when a, c are free
    enum Rule {
        Tem,
        Ratio(f64),
        BdZero,
        TeZeroCoax,
        TeZeroHollow,
    }
    let rule = match (mode.family(), *mode.geometry()) {
        (Family::Tem, _) => Rule::Tem,
        (Family::Te, Geometry::Coaxial { .. }) if n == 0 => Rule::TeZeroCoax,
        (Family::Te, Geometry::Hollow { .. }) if n == 0 => Rule::TeZeroHollow,
        (f, Geometry::Coaxial { b, .. }) => {
            let s = if f == Family::Tm { sign_pow(mode.m()) } else { sign_pow(mode.m() + 1) };
            let xb = mode.k_c() * b;
            Rule::Ratio(-(y(n, xa) + s * y(n, xb)) / (j(n, xa) + s * j(n, xb)))
        }
        (Family::Tm, Geometry::Hollow { .. }) => Rule::BdZero,
        (Family::Te, Geometry::Hollow { .. }) => Rule::Ratio(-y(n, xa) / j(n, xa)),
    };
    let mut out = [[0.0; 4]; 2];
    for (slot, u) in out.iter_mut().zip(users.iter()) {
        let free = |v: Option<f64>| v.unwrap_or(0.0);
        let fixed = |v: Option<f64>, target: f64| -> Result<f64> {
            match v {
                Some(x) if !close(x, target) => {
                    Err(Error::Invalid(format!("gauge choice for {}: fixed constant {x} must be {target}", mode.label())))
                }
                _ => Ok(target),
            }
        };
        let [a, b, c, d] = *u;
        *slot = match rule {
            Rule::Tem | Rule::TeZeroCoax | Rule::TeZeroHollow => {
                if c.is_some_and(|v| v != 0.0) || d.is_some_and(|v| v != 0.0) {
                    return bad("sin constants are irrelevant for azimuthally invariant modes");
                }
                match rule {
                    Rule::Tem => [fixed(a, 0.0)?, free(b), 0.0, 0.0],
                    Rule::TeZeroCoax => [fixed(a, 0.0)?, fixed(b, 0.0)?, 0.0, 0.0],
                    _ => [0.0, 0.0, 0.0, 0.0],
                }
            }
            Rule::Ratio(rho) => {
                let (b, d) = (free(b), free(d));
                [fixed(a, rho * b)?, b, fixed(c, rho * d)?, d]
            }
            Rule::BdZero => [free(a), fixed(b, 0.0)?, free(c), fixed(d, 0.0)?],
        };
        if n == 0 && matches!(rule, Rule::Ratio(_) | Rule::BdZero) && (slot[2] != 0.0 || slot[3] != 0.0) {
            return bad("sin constants are irrelevant for n = 0");
        }
    }
    // hollow TE n = 0: only ã is free; a, b, b̃ are fixed at zero
    if let Rule::TeZeroHollow = rule {
        let [a, b, _, _] = users[0];
        let [at, bt, _, _] = users[1];
        if a.is_some_and(|v| v != 0.0) || b.is_some_and(|v| v != 0.0) || bt.is_some_and(|v| v != 0.0) {
            return bad("only the tilde-a constant is free");
        }
        out[1][0] = at.unwrap_or(0.0);
    }
    Ok(ResolvedGauge { alpha: choice.alpha, p: out[0], p_t: out[1] })
}

/// Transverse gauge profile `p` built from `[a, b, c, d]`.
fn gauge_profile(mode: &PropagatingMode, k: [f64; 4]) -> Expr {
    let n = mode.n() as i32;
    let kc = mode.k_c();
    if mode.family() == Family::Tem {
        return Expr::term(k[0], 0, Radial::Log { r0: 1.0 }, Angular::ONE) + Expr::constant(k[1], Angular::ONE);
    }
    let (cs, sn) = (Angular::cos(n), Angular::sin(n));
    Expr::j(k[0], n, kc, cs) + Expr::y(k[1], n, kc, cs) + Expr::j(k[2], n, kc, sn) + Expr::y(k[3], n, kc, sn)
}

/// Profiles `(p, p̃)` of the free part of the gauge.
pub fn gauge_profiles(mode: &PropagatingMode, choice: &GaugeChoice) -> Result<(Expr, Expr)> {
    let rg = resolve(mode, choice)?;
    Ok((gauge_profile(mode, rg.p), gauge_profile(mode, rg.p_t)))
}

/// Residual of the transverse Helmholtz equation of the gauge profiles,
/// relative to the largest term, over the given `(r, θ)` points.
pub fn gauge_profile_residual(mode: &PropagatingMode, choice: &GaugeChoice, points: &[(f64, f64)]) -> Result<f64> {
    let (p, pt) = gauge_profiles(mode, choice)?;
    let k2 = mode.k().powi(2) - mode.beta().powi(2);
    let k2 = if mode.family() == Family::Tem { 0.0 } else { k2 };
    let mut worst: f64 = 0.0;
    for e in [p, pt] {
        let radial = e.d_r().times_r_pow(1).d_r().times_r_pow(-1);
        let ang = e.d_theta().d_theta().times_r_pow(-2);
        for &(r, th) in points {
            let vt = th - mode.spec().theta0;
            let t = [radial.eval(r, vt), ang.eval(r, vt), k2 * e.eval(r, vt)];
            let s = radial.magnitude(r, vt).max(ang.magnitude(r, vt)).max(k2 * e.magnitude(r, vt));
            if s > 0.0 {
                worst = worst.max(t.iter().sum::<f64>().abs() / s);
            }
        }
    }
    Ok(worst)
}

/// Tabulated potentials for the given gauge choice, for field amplitude
/// `e_m`.
pub fn potential_exprs(mode: &PropagatingMode, choice: &GaugeChoice, e_m: f64) -> Result<Potentials> {
    let rg = resolve(mode, choice)?;
    let h = compute_h_eff(mode)?.h_eff;
    let (beta, omega, kc) = (mode.beta(), mode.omega(), mode.k_c());
    let pm = e_m * h / omega;
    let n = mode.n() as i32;
    let nf = n as f64;
    let a = mode.a();
    let xa = mode.x_a();
    let (cs, sn) = (Angular::cos(n), Angular::sin(n));
    let al = rg.alpha;
    let jj = |c: f64, nu: i32, ang: Angular| Expr::j(c, nu, kc, ang);
    let yy = |c: f64, nu: i32, ang: Angular| Expr::y(c, nu, kc, ang);
    // c_j J_n + c_y Y_n and its radial derivative over k_c/2
    let base = |cj: f64, cy: f64, ang: Angular| jj(cj, n, ang) + yy(cy, n, ang);
    let dbase = |cj: f64, cy: f64, ang: Angular| {
        jj(cj, n + 1, ang) - jj(cj, n - 1, ang) + yy(cy, n + 1, ang) - yy(cy, n - 1, ang)
    };

    let (ar, at, az, v) = match (mode.family(), *mode.geometry()) {
        (Family::Tem, Geometry::Coaxial { b, .. }) => {
            let ln = (b / a).ln();
            let br = Expr::constant(0.5, Angular::ONE) - Expr::term(1.0 / ln, 0, Radial::Log { r0: a }, Angular::ONE);
            (Mixed::default(), Mixed::default(), Mixed::f(&br * (pm * beta)), Mixed::f(&br * (pm * omega)))
        }
        (Family::Tm, Geometry::Coaxial { b, .. }) => {
            let s = sign_pow(mode.m());
            let xb = kc * b;
            let dj = j(n, xa) + s * j(n, xb);
            let dy = y(n, xa) + s * y(n, xb);
            let (cj, cy) = ((1.0 - al) / dj, al / dy);
            let c = a * PI / (2.0 * h);
            let (jna, yna) = (j(n, xa), y(n, xa));
            // J_n(k_c r) Y_n(x_a) − J_n(x_a) Y_n(k_c r)
            let cross = |ang: Angular| jj(yna, n, ang) - yy(jna, n, ang);
            let dcross = |ang: Angular| {
                yy(jna, n + 1, ang) - yy(jna, n - 1, ang) - jj(yna, n + 1, ang) + jj(yna, n - 1, ang)
            };
            (
                Mixed::ft((dbase(cj, cy, cs) + dcross(cs) * c) * (pm * kc / 2.0)),
                Mixed::ft((base(cj, cy, sn) - cross(sn) * c).times_r_pow(-1) * (pm * nf)),
                Mixed::f((base(cj, cy, cs) + cross(cs) * (c * kc * kc / (beta * beta))) * (pm * beta)),
                Mixed::f(base(cj, cy, cs) * (pm * omega)),
            )
        }
        (Family::Te, Geometry::Coaxial { b, .. }) if n > 0 => {
            let s = sign_pow(mode.m() + 1);
            let xb = kc * b;
            let dj = j(n, xa) + s * j(n, xb);
            let dy = y(n, xa) + s * y(n, xb);
            let (cj, cy) = ((1.0 - al) / dj, al / dy);
            let dja = j(n + 1, xa) - j(n - 1, xa);
            let dya = y(n + 1, xa) - y(n - 1, xa);
            let den = dja * y(n, xa) - j(n, xa) * dya;
            let ar_extra = (jj(dya, n, sn) - yy(dja, n, sn)).times_r_pow(-1) * (a / (h * den));
            let at_extra = (jj(-dya, n + 1, cs) - jj(-dya, n - 1, cs) + yy(dja, n + 1, cs) - yy(dja, n - 1, cs))
                * (kc * a / (2.0 * nf * h * den));
            (
                Mixed::ft((dbase(cj, cy, sn) * (kc / 2.0) + ar_extra) * pm),
                Mixed::ft((base(cj, cy, cs).times_r_pow(-1) * -nf + at_extra) * pm),
                Mixed::f(base(cj, cy, sn) * (pm * beta)),
                Mixed::f(base(cj, cy, sn) * (pm * omega)),
            )
        }
        (Family::Te, Geometry::Coaxial { .. }) => {
            let app = mode.norm().a_m_prime.expect("normalized TE0 mode");
            let d = app * j(0, xa);
            let y0a = y(0, xa);
            let j0a = j(0, xa);
            let p = (yy(j0a, 0, cs) - jj(y0a, 0, cs)) * (1.0 / d);
            let pr = (yy(j0a, 1, cs) - jj(y0a, 1, cs)) * (kc / d);
            let gv = g_vir_expr(mode)?;
            (
                Mixed::ft(pr * (0.5 * pm)),
                Mixed::ft(gv * (-pm / h)),
                Mixed::f(&p * (0.5 * pm * beta)),
                Mixed::f(&p * (0.5 * pm * omega)),
            )
        }
        (Family::Tm, Geometry::Hollow { .. }) => {
            let jm = j(n - 1, xa);
            let q = (j(n + 1, xa) - j(n - 1, xa)) / (jm * jm);
            let yna = y(n, xa);
            (
                Mixed::ft(
                    ((jj(q / xa, n + 1, cs) - jj(q / xa, n - 1, cs)) - (yy(1.0, n - 1, cs) - yy(1.0, n + 1, cs)) * (0.5 / yna))
                        * (pm * kc / 2.0),
                ),
                Mixed::ft((jj(q / xa, n, sn) + yy(0.5 / yna, n, sn)).times_r_pow(-1) * (pm * nf)),
                Mixed::f((jj(-kc * q / (a * beta * beta), n, cs) + yy(0.5 / yna, n, cs)) * (pm * beta)),
                Mixed::f(yy(0.5 / yna, n, cs) * (pm * omega)),
            )
        }
        (Family::Te, Geometry::Hollow { .. }) if n > 0 => {
            let (cj, cy) = ((1.0 - al) / (2.0 * j(n, xa)), al / (2.0 * y(n, xa)));
            let (jna, jn1) = (j(n, xa), j(n + 1, xa));
            let qd = xa * jna * jna - 2.0 * nf * jna * jn1 + xa * jn1 * jn1;
            let ar_extra = jj(2.0 * nf * nf * jna / (kc * a * qd), n, sn).times_r_pow(-1);
            let at_extra = (jj(1.0, n + 1, cs) - jj(1.0, n - 1, cs)) * (-nf / a * jna / qd);
            (
                Mixed::ft((dbase(cj, cy, sn) * (kc / 2.0) + ar_extra) * pm),
                Mixed::ft((base(cj, cy, cs).times_r_pow(-1) * -nf + at_extra) * pm),
                Mixed::f(base(cj, cy, sn) * (pm * beta)),
                Mixed::f(base(cj, cy, sn) * (pm * omega)),
            )
        }
        (Family::Te, Geometry::Hollow { .. }) => {
            let gv = g_vir_expr(mode)?;
            (Mixed::default(), Mixed::ft(gv * (-pm / h)), Mixed::default(), Mixed::default())
        }
        (Family::Tem, Geometry::Hollow { .. }) => unreachable!("validated at construction"),
    };
    // free part: A += ∇Π, V −= ∂Π/∂t with Π = p f + p̃ f̃
    let pi = Mixed { f: gauge_profile(mode, rg.p), ft: gauge_profile(mode, rg.p_t) };
    let pi = pi.scaled(e_m);
    let grad = [pi.d_r(), pi.d_theta().times_r_pow(-1), pi.dz(beta)];
    let [gr, gt, gz] = grad;
    Ok(Potentials {
        a: [ar.add(&gr), at.add(&gt), az.add(&gz)],
        v: v.add(&pi.dt(omega).scaled(-1.0)),
        beta,
        omega,
    })
}

#[allow(clippy::too_many_arguments)]
pub fn potentials(
    mode: &PropagatingMode,
    choice: &GaugeChoice,
    e_m: f64,
    q: Quadratures,
    r: f64,
    theta: f64,
    z: f64,
    t: f64,
) -> Result<PotentialSample> {
    profiles::check_r(mode, r)?;
    let p = potential_exprs(mode, choice, e_m)?;
    let (a, v) = p.sample(r, theta - mode.spec().theta0, &mode.env_vals(q, z, t));
    let flagged = !mode.geometry().is_coaxial() && r < 1e-6 * mode.a();
    Ok(PotentialSample { a, v, flagged })
}

pub fn difference_spec(mode: &PropagatingMode) -> PotentialDifferenceSpec {
    let (n, m) = (mode.n(), mode.m());
    let (sz, sn, radial) = match (mode.family(), mode.geometry().is_coaxial()) {
        (Family::Tem, _) => (-1.0, -1.0, false),
        (Family::Te, _) if n == 0 => (1.0, -1.0, true),
        (Family::Tm, true) => (sign_pow(m), -sign_pow(m), false),
        (Family::Te, true) => (sign_pow(m + 1), -sign_pow(m + 1), false),
        (_, false) => (sign_pow(n), -sign_pow(n + 1), false),
    };
    PotentialDifferenceSpec { sigma_z: sz, sigma_n: sn, radial_coord: radial, effective: radial }
}

/// Both electrode points of a difference: `(r1, ϑ1, r2, ϑ2)` at unit scale.
fn electrode_pair(mode: &PropagatingMode, coord: f64) -> (f64, f64, f64, f64) {
    let th0 = mode.spec().theta0;
    match (mode.is_virtual(), *mode.geometry()) {
        (true, _) => (coord, 0.0, coord, PI),
        (false, Geometry::Coaxial { a, b }) => (a, coord - th0, b, coord - th0),
        (false, Geometry::Hollow { a }) => (a, coord - th0, a, coord - th0 + PI),
    }
}

fn raw_difference(mode: &PropagatingMode, p: &Potentials, kind: PdKind, coord: f64, ev: &EnvVals) -> f64 {
    let sp = difference_spec(mode);
    let (r1, v1, r2, v2) = electrode_pair(mode, coord);
    let (a1, vv1) = p.sample(r1, v1, ev);
    let (a2, vv2) = p.sample(r2, v2, ev);
    match kind {
        PdKind::DV => vv1 + sp.sigma_z * vv2,
        PdKind::DAz => a1[2] + sp.sigma_z * a2[2],
        PdKind::DAn => {
            if mode.is_virtual() {
                a1[1] - sp.sigma_n * a2[1]
            } else if mode.geometry().is_coaxial() {
                a1[0] - sp.sigma_n * a2[0]
            } else {
                -a1[0] - sp.sigma_n * a2[0]
            }
        }
    }
}

fn check_coord(mode: &PropagatingMode, coord: f64) -> Result<()> {
    if mode.is_virtual() {
        profiles::check_r(mode, coord)
    } else if coord.is_finite() {
        Ok(())
    } else {
        Err(Error::Invalid("electrode angle must be finite".into()))
    }
}

/// Potential difference between facing electrodes. The coordinate is θ on
/// real electrodes and r on virtual planes; for TE n = 0 the voltage and
/// longitudinal differences are the imposed effective ones.
#[allow(clippy::too_many_arguments)]
pub fn potential_difference(
    mode: &PropagatingMode,
    choice: &GaugeChoice,
    e_m: f64,
    q: Quadratures,
    kind: PdKind,
    coord: f64,
    z: f64,
    t: f64,
) -> Result<f64> {
    check_coord(mode, coord)?;
    let ev = mode.env_vals(q, z, t);
    if mode.is_virtual() && kind != PdKind::DAn {
        let pm = e_m * compute_h_eff(mode)?.h_eff / mode.omega();
        let g = g_vir_expr(mode)?.eval(coord, 0.0);
        let s = if kind == PdKind::DV { mode.omega() } else { mode.beta() };
        return Ok(pm * s * g * ev.f);
    }
    let p = potential_exprs(mode, choice, e_m)?;
    Ok(raw_difference(mode, &p, kind, coord, &ev))
}

fn coord_samples(mode: &PropagatingMode, count: usize) -> Vec<f64> {
    if mode.is_virtual() {
        let (lo, hi) = mode.geometry().r_range();
        (0..=count).map(|i| lo + (hi - lo) * i as f64 / count as f64).collect()
    } else {
        (0..count).map(|i| 2.0 * PI * i as f64 / count as f64).collect()
    }
}

const UNIT_F: EnvVals = EnvVals { f: 1.0, ft: 0.0, beta: 0.0, omega: 0.0 };

/// Sup-norm mismatch of `∂φ/∂t = ΔV` and `∂φ/∂z = −ΔA_z` over the electrode
/// coordinate, normalized by `φ_m ω` and `φ_m β`. Both sides carry the same
/// envelope, so it is evaluated at unit `f`.
///
/// For coaxial TE n = 0 this is the gap between the gauge profile and
/// `g_vir`. For hollow TE n = 0 it is the smallest gap any value of the
/// free constant can reach.
pub fn devoret_residual(mode: &PropagatingMode, choice: &GaugeChoice) -> Result<DevoretResidual> {
    let h = compute_h_eff(mode)?.h_eff;
    let pm = h / mode.omega();
    if mode.is_virtual() && !mode.geometry().is_coaxial() {
        let r = hollow_te0_gap(mode)?;
        return Ok(DevoretResidual { res_t: r, res_z: r });
    }
    let p = potential_exprs(mode, choice, 1.0)?;
    let g = flux_profile(mode)?;
    let ev = EnvVals { beta: mode.beta(), omega: mode.omega(), ..UNIT_F };
    let (mut rt, mut rz) = (0.0f64, 0.0f64);
    let samples = if mode.is_virtual() { 4000 } else { 720 };
    let eval = |c: f64| {
        let (r1, v1, _, _) = electrode_pair(mode, c);
        let gv = g.eval(r1, v1);
        let dv = raw_difference(mode, &p, PdKind::DV, c, &ev);
        let daz = raw_difference(mode, &p, PdKind::DAz, c, &ev);
        let et = (gv - dv / (pm * mode.omega())).abs();
        let ez = (gv - daz / (pm * mode.beta())).abs();
        (et, ez)
    };
    let pts = coord_samples(mode, samples);
    for &c in &pts {
        let (et, ez) = eval(c);
        rt = rt.max(et);
        rz = rz.max(ez);
    }
    if mode.is_virtual() {
        // refine around the largest sampled gap
        let (i, _) = pts.iter().enumerate().fold((0, -1.0), |best, (i, &c)| {
            let v = eval(c).0;
            if v > best.1 { (i, v) } else { best }
        });
        let lo = pts[i.saturating_sub(1)];
        let hi = pts[(i + 1).min(pts.len() - 1)];
        let (x, _) = golden_max(|c| eval(c).0, lo, hi);
        let (et, ez) = eval(x);
        rt = rt.max(et);
        rz = rz.max(ez);
    }
    Ok(DevoretResidual { res_t: rt, res_z: rz })
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 > f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// `min_ã sup_r |g_vir(r) + 2 ã J_0(k_c r) / φ_m|` on `[0, a]`.
fn hollow_te0_gap(mode: &PropagatingMode) -> Result<f64> {
    let gv = g_vir_expr(mode)?;
    let kc = mode.k_c();
    let pts: Vec<(f64, f64)> = coord_samples(mode, 4000)
        .into_iter()
        .map(|r| (gv.eval(r, 0.0), j(0, kc * r)))
        .collect();
    let sup = |s: f64| pts.iter().fold(0.0f64, |m, &(g, j0)| m.max((g + s * j0).abs()));
    // sup of affine functions is convex in s
    let (mut lo, mut hi) = (-4.0, 4.0);
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if sup(m1) < sup(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    Ok(sup(0.5 * (lo + hi)))
}

/// Gap between the coaxial TE n = 0 gauge profile and `g_vir` over `[a, b]`.
pub fn fig3_difference(mode: &PropagatingMode) -> Result<f64> {
    if !(mode.is_virtual() && mode.geometry().is_coaxial()) {
        return Err(Error::Unsupported("the profile gap is defined for coaxial TE n = 0 modes".into()));
    }
    Ok(devoret_residual(mode, &GaugeChoice::default())?.res_t)
}

/// Signed gap `g_vir(r) − p(r)` at the given radii, for coaxial TE n = 0.
pub fn fig3_profile(mode: &PropagatingMode, radii: &[f64]) -> Result<Vec<f64>> {
    if !(mode.is_virtual() && mode.geometry().is_coaxial()) {
        return Err(Error::Unsupported("the profile gap is defined for coaxial TE n = 0 modes".into()));
    }
    let pm = compute_h_eff(mode)?.h_eff / mode.omega();
    let p = potential_exprs(mode, &GaugeChoice::default(), 1.0)?;
    let g = flux_profile(mode)?;
    let ev = EnvVals { beta: mode.beta(), omega: mode.omega(), ..UNIT_F };
    radii
        .iter()
        .map(|&r| {
            profiles::check_r(mode, r)?;
            let (r1, v1, _, _) = electrode_pair(mode, r);
            Ok(g.eval(r1, v1) - raw_difference(mode, &p, PdKind::DV, r, &ev) / (pm * mode.omega()))
        })
        .collect()
}

/// Geometric coefficient of the transverse gauge relation.
pub fn k_coefficient(mode: &PropagatingMode) -> Result<f64> {
    let Geometry::Coaxial { a, b } = *mode.geometry() else { return Ok(1.0) };
    let n = mode.n() as i32;
    let nf = n as f64;
    let (xa, xb) = (mode.x_a(), mode.k_c() * b);
    Ok(match mode.family() {
        Family::Tem => a / b,
        Family::Te if n == 0 => 1.0,
        Family::Tm => {
            let v = y(n, xa) * (xb * j(n - 1, xb) - nf * j(n, xb)) - j(n, xa) * (xb * y(n - 1, xb) - nf * y(n, xb));
            a / b * PI / 2.0 * v.abs()
        }
        Family::Te => {
            let v = j(n, xb) * (nf * y(n, xa) - xa * y(n - 1, xa)) - y(n, xb) * (nf * j(n, xa) - xa * j(n - 1, xa));
            a / b * PI / 2.0 * v.abs()
        }
    })
}

/// Potentials of the temporal gauge `V = 0`, `A = −∫E dt`, which also
/// satisfies the Lorenz condition for these modes.
pub fn transverse_gauge_exprs(mode: &PropagatingMode, e_m: f64) -> Potentials {
    let p = profile_exprs(mode);
    let s = e_m / mode.omega();
    Potentials {
        a: [Mixed::ft(&p.e[0] * -s), Mixed::ft(&p.e[1] * -s), Mixed::f(&p.e[2] * s)],
        v: Mixed::default(),
        beta: mode.beta(),
        omega: mode.omega(),
    }
}

/// Checks `(1 + K) φ / h_eff = −ΔA_n` and `ΔV = ΔA_z = 0` in the transverse
/// gauge. Residuals are sup-norms over the electrode coordinate, relative to
/// `φ_m / h_eff`, `φ_m ω` and `φ_m β`.
pub fn transverse_gauge_check(mode: &PropagatingMode) -> Result<TransverseGaugeReport> {
    let h = compute_h_eff(mode)?.h_eff;
    let k = k_coefficient(mode)?;
    let pm = h / mode.omega();
    let p = transverse_gauge_exprs(mode, 1.0);
    let g = flux_profile(mode)?;
    let evt = EnvVals { f: 0.0, ft: 1.0, beta: mode.beta(), omega: mode.omega() };
    let evf = EnvVals { beta: mode.beta(), omega: mode.omega(), ..UNIT_F };
    let (mut r_k, mut rv, mut rz) = (0.0f64, 0.0f64, 0.0f64);
    let mut gmax = 0.0f64;
    for c in coord_samples(mode, 720) {
        let (r1, v1, _, _) = electrode_pair(mode, c);
        let phi = pm * g.eval(r1, v1);
        gmax = gmax.max(g.eval(r1, v1).abs());
        let dan = raw_difference(mode, &p, PdKind::DAn, c, &evt);
        r_k = r_k.max(((1.0 + k) * phi / h + dan).abs() / (pm / h));
        rv = rv.max(raw_difference(mode, &p, PdKind::DV, c, &evf).abs() / (pm * mode.omega()));
        rz = rz.max(raw_difference(mode, &p, PdKind::DAz, c, &evf).abs() / (pm * mode.beta().abs()));
    }
    if let Some(rm) = mode.norm().r_max.filter(|_| mode.is_virtual()) {
        gmax = gmax.max(g.eval(rm, 0.0).abs());
    }
    Ok(TransverseGaugeReport {
        k,
        res_k_relation: r_k,
        dv_res: rv,
        daz_res: rz,
        broken_symmetry: mode.is_virtual().then_some(gmax),
    })
}

/// `K` from the transverse-gauge potentials at the reference angle:
/// `(n·A(1) − σ_n n·A(2)) / (φ/h_eff) − 1`.
pub fn k_from_fields(mode: &PropagatingMode) -> Result<f64> {
    let h = compute_h_eff(mode)?.h_eff;
    let pm = h / mode.omega();
    let p = transverse_gauge_exprs(mode, 1.0);
    let evt = EnvVals { f: 0.0, ft: 1.0, beta: mode.beta(), omega: mode.omega() };
    let c = if mode.is_virtual() {
        profiles::solve_r_max(mode)?
    } else {
        profiles::peak_angle(mode) + mode.spec().theta0
    };
    let (r1, v1, _, _) = electrode_pair(mode, c);
    let phi = pm * flux_profile(mode)?.eval(r1, v1);
    Ok(-raw_difference(mode, &p, PdKind::DAn, c, &evt) * h / phi - 1.0)
}

/// Sup mismatch between the fields derived from the potentials and the mode
/// fields, and the sup Lorenz residual. Both are relative to the largest
/// single term, floored at the field magnitude (`/c` for Lorenz).
pub fn gauge_field_consistency(
    mode: &PropagatingMode,
    choice: &GaugeChoice,
    q: Quadratures,
    points: &[(f64, f64, f64, f64)],
) -> Result<(f64, f64)> {
    let pot = potential_exprs(mode, choice, 1.0)?;
    let (fe, fb) = profiles::field_exprs(mode, 1.0);
    let c = mode.medium().c();
    let (mut worst, mut lor) = (0.0f64, 0.0f64);
    for &(r, th, z, t) in points {
        profiles::check_r(mode, r)?;
        let vt = th - mode.spec().theta0;
        let ev = mode.env_vals(q, z, t);
        let d = pot.derived(r, vt, &ev, c);
        let e0 = fe.values(r, vt, &ev);
        let b0 = fb.values(r, vt, &ev);
        let scale = e0.iter().chain(b0.iter().map(|x| x * c).collect::<Vec<_>>().iter()).fold(0.0f64, |m, x| m.max(x.abs()));
        let lscale = d.lorenz_scale.max(scale / c).max(1e-300);
        let scale = scale.max(d.field_scale).max(1e-300);
        for i in 0..3 {
            worst = worst.max((d.e[i] - e0[i]).abs() / scale).max((d.b[i] - b0[i]).abs() * c / scale);
        }
        lor = lor.max(d.lorenz.abs() / lscale);
    }
    Ok((worst, lor))
}
