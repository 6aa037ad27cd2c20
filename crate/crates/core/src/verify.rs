//! Identity checks over a grid of modes, reported per check and mode.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::emdyn::{self, Coord, ElectrodeId};
use crate::error::{Error, Result};
use crate::expr::VecField;
use crate::gauge::{self, GaugeChoice};
use crate::model::{solve_mode, Family, Geometry, Medium, ModeSpec, PropagatingMode, Quadratures};
use crate::profiles;
use crate::quantize::{self, Hbar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub mode: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Wall time in seconds, recorded only on request.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_s: Option<f64>,
}

impl CheckReport {
    fn new(check: &str, mode: &str, residual: f64, tolerance: f64) -> Self {
        CheckReport {
            check: check.into(),
            mode: mode.into(),
            residual,
            tolerance,
            // NaN residuals fail
            pass: residual <= tolerance,
            elapsed_s: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub strict: bool,
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<CheckReport>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckReport> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub maxwell: f64,
    pub boundary: f64,
    pub surface_sources: f64,
    pub charge_conservation: f64,
    pub energy: f64,
    pub angular_momentum: f64,
    pub propagation: f64,
    pub gauge_fields: f64,
    pub lorenz: f64,
    pub gauge_invariance: f64,
    pub devoret: f64,
    pub transverse_gauge: f64,
    pub k_consistency: f64,
    pub quantization: f64,
    pub photon_mass: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            maxwell: 1e-6,
            boundary: 1e-10,
            surface_sources: 1e-10,
            charge_conservation: 1e-10,
            energy: 1e-6,
            angular_momentum: 1e-8,
            propagation: 1e-10,
            gauge_fields: 1e-6,
            lorenz: 1e-8,
            gauge_invariance: 1e-10,
            devoret: 1e-10,
            transverse_gauge: 1e-10,
            k_consistency: 1e-9,
            quantization: 1e-6,
            photon_mass: 4.0 * f64::EPSILON,
        }
    }
}

impl Tolerances {
    pub fn scaled(&self, s: f64) -> Self {
        Tolerances {
            maxwell: self.maxwell * s,
            boundary: self.boundary * s,
            surface_sources: self.surface_sources * s,
            charge_conservation: self.charge_conservation * s,
            energy: self.energy * s,
            angular_momentum: self.angular_momentum * s,
            propagation: self.propagation * s,
            gauge_fields: self.gauge_fields * s,
            lorenz: self.lorenz * s,
            gauge_invariance: self.gauge_invariance * s,
            devoret: self.devoret * s,
            transverse_gauge: self.transverse_gauge * s,
            k_consistency: self.k_consistency * s,
            quantization: self.quantization * s,
            // already at machine precision
            photon_mass: self.photon_mass,
        }
    }
}

/// Physical bounds stated for the model itself. They are not numerical
/// tolerances and `strict` leaves them alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Bounds {
    pub fig3: f64,
    /// Largest `b/a` the `fig3` bound is applied to.
    pub fig3_max_ratio: f64,
    /// Bound beyond `fig3_max_ratio`: the unit amplitude of `g_vir`.
    pub fig3_wide: f64,
    pub cartesian_cutoff: f64,
    pub cartesian_k: f64,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { fig3: 0.15, fig3_max_ratio: 2.0, fig3_wide: 1.0, cartesian_cutoff: 1e-2, cartesian_k: 1e-2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub coax_ratios: Vec<f64>,
    pub hollow: bool,
    pub tem: bool,
    pub n: Vec<u32>,
    pub m: Vec<u32>,
    pub a: f64,
    pub epsilon_r: f64,
    pub mu_r: f64,
    pub length: f64,
    pub l: i64,
    pub theta0: f64,
    pub phi0: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            coax_ratios: vec![1.2, 2.0, 5.0],
            hollow: true,
            tem: true,
            n: vec![0, 1, 2],
            m: vec![1, 2],
            a: 0.01,
            epsilon_r: 1.0,
            mu_r: 1.0,
            length: 0.1,
            l: 1,
            theta0: 0.3,
            phi0: 0.2,
        }
    }
}

impl GridSpec {
    pub fn modes(&self) -> Result<Vec<PropagatingMode>> {
        let medium = Medium::relative(self.epsilon_r, self.mu_r)?;
        let mut geoms = Vec::new();
        for &r in &self.coax_ratios {
            geoms.push(Geometry::coaxial(self.a, self.a * r)?);
        }
        if self.hollow {
            geoms.push(Geometry::hollow(self.a)?);
        }
        let mut out = Vec::new();
        for g in geoms {
            if self.tem && g.is_coaxial() {
                out.push(solve_mode(ModeSpec::tem().with_phases(self.theta0, self.phi0), g, medium, self.length, self.l)?);
            }
            for fam in [Family::Tm, Family::Te] {
                for &n in &self.n {
                    for &m in &self.m {
                        let spec = ModeSpec::new(fam, n, m).with_phases(self.theta0, self.phi0);
                        out.push(solve_mode(spec, g, medium, self.length, self.l)?);
                    }
                }
            }
        }
        if out.is_empty() {
            return Err(Error::Invalid("the mode grid is empty".into()));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldComponent {
    Er,
    Etheta,
    Ez,
    Br,
    Btheta,
    Bz,
}

/// Multiplies one field component by `factor` before the field checks.
/// Used to confirm that the suite detects a broken mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Perturbation {
    pub component: FieldComponent,
    pub factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub grid: GridSpec,
    pub tolerances: Tolerances,
    pub bounds: Bounds,
    pub strict: bool,
    pub seed: u64,
    pub samples: usize,
    /// Interior points of the Maxwell check.
    pub maxwell_samples: usize,
    pub x: f64,
    pub y: f64,
    pub hbar: Option<f64>,
    pub cartesian_ratios: Vec<f64>,
    pub record_timing: bool,
    pub perturbation: Option<Perturbation>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            grid: GridSpec::default(),
            tolerances: Tolerances::default(),
            bounds: Bounds::default(),
            strict: false,
            seed: 0,
            samples: 16,
            maxwell_samples: 200,
            x: 0.8,
            y: -0.45,
            hbar: None,
            cartesian_ratios: vec![1.01, 1.001],
            record_timing: false,
            perturbation: None,
        }
    }
}

impl SuiteConfig {
    pub fn effective_tolerances(&self) -> Tolerances {
        if self.strict {
            self.tolerances.scaled(0.1)
        } else {
            self.tolerances.clone()
        }
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut v = 0.0;
    while i > 0 {
        v += (i % base) as f64 * f;
        i /= base;
        f *= inv;
    }
    v
}

/// Halton points in `[0, 1)^dim` with a seeded Cranley–Patterson shift.
pub fn sample_points(count: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];
    assert!(dim <= PRIMES.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
    (1..=count as u64)
        .map(|i| (0..dim).map(|d| (radical_inverse(i, PRIMES[d]) + shift[d]).fract()).collect())
        .collect()
}

struct Ctx<'a> {
    mode: &'a PropagatingMode,
    label: String,
    q: Quadratures,
    pts: Vec<Vec<f64>>,
    seed: u64,
}

impl Ctx<'_> {
    fn r_of(&self, u: f64) -> f64 {
        let (lo, hi) = self.mode.geometry().r_range();
        // keep clear of the hollow axis
        lo + (hi - lo) * (0.002 + 0.998 * u)
    }

    fn z_of(&self, u: f64) -> f64 {
        u * self.mode.length()
    }

    fn t_of(&self, u: f64) -> f64 {
        u * 2.0 * PI / self.mode.omega()
    }

    fn volume_points(&self) -> Vec<(f64, f64, f64, f64)> {
        self.pts.iter().map(|p| (self.r_of(p[0]), 2.0 * PI * p[1], self.z_of(p[2]), self.t_of(p[3]))).collect()
    }

    fn electrode_points(&self, el: ElectrodeId) -> Vec<(Coord, f64, f64)> {
        self.pts
            .iter()
            .map(|p| {
                let c = if el.is_virtual() { Coord::R(self.r_of(p[0])) } else { Coord::Theta(2.0 * PI * p[1]) };
                (c, self.z_of(p[2]), self.t_of(p[3]))
            })
            .collect()
    }
}

fn perturbed_fields(mode: &PropagatingMode, pert: Option<Perturbation>) -> (VecField, VecField) {
    let (mut e, mut b) = profiles::field_exprs(mode, 1.0);
    if let Some(p) = pert {
        let c = match p.component {
            FieldComponent::Er => &mut e.r,
            FieldComponent::Etheta => &mut e.th,
            FieldComponent::Ez => &mut e.z,
            FieldComponent::Br => &mut b.r,
            FieldComponent::Btheta => &mut b.th,
            FieldComponent::Bz => &mut b.z,
        };
        *c = c.scaled(p.factor);
    }
    (e, b)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn maxwell_residual(ctx: &Ctx, e: &VecField, b: &VecField) -> f64 {
    let m = ctx.mode;
    let c2 = m.medium().c().powi(2);
    let mut worst = 0.0f64;
    for (r, th, z, t) in ctx.volume_points() {
        let ev = m.env_vals(ctx.q, z, t);
        let vt = th - m.spec().theta0;
        let de = e.div_curl(r, vt, &ev);
        let db = b.div_curl(r, vt, &ev);
        let dbt = b.dt_values(r, vt, &ev);
        let det = e.dt_values(r, vt, &ev);
        let s_e = de.scale.max(max_abs(&dbt)).max(1e-300);
        let s_b = db.scale.max(max_abs(&det) / c2).max(1e-300);
        worst = worst.max(de.div.abs() / s_e).max(db.div.abs() / s_b);
        for k in 0..3 {
            worst = worst.max((de.curl[k] + dbt[k]).abs() / s_e);
            worst = worst.max((db.curl[k] - det[k] / c2).abs() / s_b);
        }
    }
    worst
}

/// Tangential `E` and normal `B` on the conductors, in units of the peak
/// field.
fn conductor_residual(ctx: &Ctx, e: &VecField, b: &VecField) -> f64 {
    let m = ctx.mode;
    let c = m.medium().c();
    let mut radii = vec![m.a()];
    radii.extend(m.b());
    let mut worst = 0.0f64;
    for r in radii {
        for p in &ctx.pts {
            let ev = m.env_vals(ctx.q, ctx.z_of(p[2]), ctx.t_of(p[3]));
            let vt = 2.0 * PI * p[1];
            let ee = e.values(r, vt, &ev);
            let bb = b.values(r, vt, &ev);
            worst = worst.max(ee[1].abs()).max(ee[2].abs()).max((bb[0] * c).abs());
        }
    }
    worst
}

/// On the diameter plane through `θ₀` the normal is `±u_θ`: `E_r`, `E_z`
/// and `B_θ` vanish.
fn virtual_plane_residual(ctx: &Ctx, e: &VecField, b: &VecField) -> f64 {
    let m = ctx.mode;
    let c = m.medium().c();
    let mut worst = 0.0f64;
    for p in &ctx.pts {
        let ev = m.env_vals(ctx.q, ctx.z_of(p[2]), ctx.t_of(p[3]));
        let r = ctx.r_of(p[0]);
        for vt in [0.0, PI] {
            let ee = e.values(r, vt, &ev);
            let bb = b.values(r, vt, &ev);
            worst = worst.max(ee[0].abs()).max(ee[2].abs()).max((bb[1] * c).abs());
        }
    }
    worst
}

/// Surface charge and current against `σ = ε n·E`, `j = n × B / μ`.
fn surface_source_residual(ctx: &Ctx, e: &VecField, b: &VecField) -> Result<f64> {
    let m = ctx.mode;
    let md = m.medium();
    let th0 = m.spec().theta0;
    let mut worst = 0.0f64;
    for el in emdyn::electrodes(m) {
        for (coord, z, t) in ctx.electrode_points(el) {
            let s = emdyn::surface_state(m, 1.0, el, ctx.q, coord, z, t)?;
            let (r, th, sgn, plane) = match (el, coord) {
                (ElectrodeId::In, Coord::Theta(th)) | (ElectrodeId::Front, Coord::Theta(th)) => {
                    (m.a(), th, if m.geometry().is_coaxial() { 1.0 } else { -1.0 }, false)
                }
                (ElectrodeId::Out, Coord::Theta(th)) => (m.b().unwrap_or(m.a()), th, -1.0, false),
                (ElectrodeId::Back, Coord::Theta(th)) => (m.a(), th + PI, -1.0, false),
                (ElectrodeId::VirTop { theta_p }, Coord::R(r)) => (r, theta_p, 1.0, true),
                (ElectrodeId::VirBottom { theta_p }, Coord::R(r)) => (r, theta_p + PI, -1.0, true),
                _ => return Err(Error::Invalid(format!("coordinate does not match electrode {}", el.name()))),
            };
            let ev = m.env_vals(ctx.q, z, t);
            let vt = th - th0;
            let fe = e.values(r, vt, &ev);
            let fb = b.values(r, vt, &ev);
            let (sig, jz, jt) = if plane {
                (md.epsilon() * sgn * fe[1], -sgn * fb[0] / md.mu(), sgn * fb[2] / md.mu())
            } else {
                (md.epsilon() * sgn * fe[0], sgn * fb[1] / md.mu(), -sgn * fb[2] / md.mu())
            };
            let sj = 1.0 / (md.mu() * md.c());
            worst = worst
                .max((s.sigma - sig).abs() / md.epsilon())
                .max((s.j_z - jz).abs() / sj)
                .max((s.j_t - jt).abs() / sj);
        }
    }
    Ok(worst)
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

fn mode_checks(ctx: &Ctx, cfg: &SuiteConfig, tol: &Tolerances, out: &mut Vec<CheckReport>) -> Result<()> {
    let m = ctx.mode;
    let lab = ctx.label.as_str();
    let timed = cfg.record_timing;
    let mut push = |name: &str, res: f64, tol: f64, t0: Instant| {
        let mut r = CheckReport::new(name, lab, res, tol);
        if timed {
            r.elapsed_s = Some(t0.elapsed().as_secs_f64());
        }
        out.push(r);
    };

    let t0 = Instant::now();
    let (e, b) = perturbed_fields(m, cfg.perturbation);
    let dense = Ctx { mode: m, label: String::new(), q: ctx.q, pts: sample_points(cfg.maxwell_samples.max(1), 4, ctx.seed), seed: ctx.seed };
    push("maxwell", maxwell_residual(&dense, &e, &b), tol.maxwell, t0);
    let t0 = Instant::now();
    push("boundary_conductor", conductor_residual(ctx, &e, &b), tol.boundary, t0);
    if m.is_virtual() {
        let t0 = Instant::now();
        push("boundary_virtual_plane", virtual_plane_residual(ctx, &e, &b), tol.boundary, t0);
    }
    let t0 = Instant::now();
    push("surface_sources", surface_source_residual(ctx, &e, &b)?, tol.surface_sources, t0);

    let t0 = Instant::now();
    let mut cc = 0.0f64;
    for el in emdyn::electrodes(m) {
        cc = cc.max(emdyn::charge_conservation_residual(m, ctx.q, el, &ctx.electrode_points(el))?);
    }
    push("charge_conservation", cc, tol.charge_conservation, t0);

    let t0 = Instant::now();
    let fl = emdyn::flux_equation_residual(m, ctx.q, &ctx.electrode_points(emdyn::reference_electrode(m)))?;
    push("propagation", fl, tol.propagation, t0);

    let t0 = Instant::now();
    let s = emdyn::energy_momentum_surface(m, 1.0, ctx.q)?;
    let v = emdyn::energy_momentum_volume(m, 1.0, ctx.q)?;
    push("energy_dual_route", rel(v.h, s.h).max(rel(v.p_z, s.p_z)), tol.energy, t0);
    let t0 = Instant::now();
    push("angular_momentum", v.j_ang.abs() * m.omega() / v.h, tol.angular_momentum, t0);

    let t0 = Instant::now();
    let vp = ctx.volume_points();
    let (fres, lor) = gauge::gauge_field_consistency(m, &GaugeChoice::default(), ctx.q, &vp)?;
    push("gauge_fields", fres, tol.gauge_fields, t0);
    push("lorenz", lor, tol.lorenz, t0);
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let scale = emdyn::phi_m(m, 1.0)?;
    let choices: Vec<GaugeChoice> = (0..5).map(|_| gauge::random_choice(m, &mut rng, scale)).collect();
    let mut inv = 0.0f64;
    for c in &choices {
        inv = inv.max(gauge::gauge_field_consistency(m, c, ctx.q, &vp)?.0);
    }
    push("gauge_invariance", inv, tol.gauge_invariance, t0);

    let t0 = Instant::now();
    if !m.is_virtual() {
        let mut d = 0.0f64;
        for c in std::iter::once(&GaugeChoice::default()).chain(choices.iter()) {
            let r = gauge::devoret_residual(m, c)?;
            d = d.max(r.res_t).max(r.res_z);
        }
        push("devoret", d, tol.devoret, t0);
        let t0 = Instant::now();
        let tg = gauge::transverse_gauge_check(m)?;
        push("transverse_gauge", tg.res_k_relation.max(tg.dv_res).max(tg.daz_res), tol.transverse_gauge, t0);
    } else if m.geometry().is_coaxial() {
        let ratio = m.geometry().ratio().unwrap_or(1.0);
        let bound = if ratio <= cfg.bounds.fig3_max_ratio { cfg.bounds.fig3 } else { cfg.bounds.fig3_wide };
        push("fig3_bound", gauge::fig3_difference(m)?, bound, t0);
    }

    let t0 = Instant::now();
    let k = gauge::k_coefficient(m)?;
    let k_exact = match (m.family(), *m.geometry()) {
        (Family::Tem, Geometry::Coaxial { a, b }) => Some(a / b),
        (_, Geometry::Hollow { .. }) => Some(1.0),
        _ if m.is_virtual() => Some(1.0),
        _ => None,
    };
    match k_exact {
        Some(want) => push("k_exact", (k - want).abs(), 0.0, t0),
        None => push("k_consistency", (k - gauge::k_from_fields(m)?).abs(), tol.k_consistency, t0),
    }

    let t0 = Instant::now();
    let hbar = match cfg.hbar {
        Some(h) => Hbar::new(h)?,
        None => Hbar::default(),
    };
    let (_, e_q) = quantize::quantum_amplitude(m, hbar)?;
    let one = Quadratures::new(1.0, 0.0)?;
    let cq = emdyn::energy_momentum_volume(m, e_q, one)?;
    let (h_want, p_want) = quantize::quadrature_energy_momentum(m, hbar, one);
    push("quantization_closure", rel(cq.h, h_want).max(rel(cq.p_z, p_want)), tol.quantization, t0);
    if m.family() == Family::Te {
        let t0 = Instant::now();
        let (gap, mass) = quantize::cutoff_quanta(m, hbar);
        push("photon_mass", rel(mass * m.medium().c().powi(2), gap), tol.photon_mass, t0);
    }
    Ok(())
}

pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let modes = cfg.grid.modes()?;
    if cfg.samples == 0 {
        return Err(Error::Invalid("at least one sample point is required".into()));
    }
    let tol = cfg.effective_tolerances();
    let q = Quadratures::new(cfg.x, cfg.y)?;
    if q.norm_sqr() == 0.0 {
        return Err(Error::Invalid("the quadratures must not both vanish".into()));
    }
    let mut checks = Vec::new();
    for (i, m) in modes.iter().enumerate() {
        let seed = cfg.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64);
        let ctx = Ctx { mode: m, label: m.label(), q, pts: sample_points(cfg.samples, 4, seed), seed };
        mode_checks(&ctx, cfg, &tol, &mut checks)?;
    }
    if !cfg.cartesian_ratios.is_empty() {
        let t0 = Instant::now();
        let mut cart = cartesian_limit_suite_with(&cfg.cartesian_ratios, &cfg.bounds)?;
        if cfg.record_timing {
            // one shared solve per ratio, so the time is split evenly
            let each = t0.elapsed().as_secs_f64() / cart.len() as f64;
            cart.iter_mut().for_each(|c| c.elapsed_s = Some(each));
        }
        checks.extend(cart);
    }
    let passed = checks.iter().filter(|c| c.pass).count();
    Ok(SuiteReport { seed: cfg.seed, strict: cfg.strict, total: checks.len(), passed, failed: checks.len() - passed, checks })
}

pub fn cartesian_limit_suite(b_over_a: &[f64]) -> Result<Vec<CheckReport>> {
    cartesian_limit_suite_with(b_over_a, &Bounds::default())
}

/// Parallel-plate limit: `k_c (b − a) / (mπ) → 1` for n = 0, `K → 1`, and
/// the TEM profiles flatten to `g_Er → 1`, `g_Bθ → sign β`, all as
/// `b/a → 1`.
pub fn cartesian_limit_suite_with(b_over_a: &[f64], bounds: &Bounds) -> Result<Vec<CheckReport>> {
    if b_over_a.is_empty() {
        return Err(Error::Invalid("no ratios given".into()));
    }
    let mut out = Vec::new();
    let medium = Medium::vacuum();
    let mut prev_k: Option<f64> = None;
    for &ratio in b_over_a {
        if !(ratio > 1.0) {
            return Err(Error::Invalid(format!("b/a must exceed 1, got {ratio}")));
        }
        let g = Geometry::coaxial(1.0, ratio)?;
        let lab = format!("coax b/a={ratio}");
        let d = ratio - 1.0;
        for fam in [Family::Tm, Family::Te] {
            for m in 1..=3u32 {
                let mode = solve_mode(ModeSpec::new(fam, 0, m), g, medium, 1.0, 1)?;
                let res = (mode.k_c() * d / (m as f64 * PI) - 1.0).abs();
                out.push(CheckReport::new(
                    &format!("cartesian_cutoff_{}", mode.spec().label()),
                    &lab,
                    res,
                    bounds.cartesian_cutoff,
                ));
            }
        }
        let mut kmax = 0.0f64;
        for fam in [Family::Tm, Family::Te] {
            for n in 0..=2u32 {
                let mode = solve_mode(ModeSpec::new(fam, n, 1), g, medium, 1.0, 1)?;
                if mode.is_virtual() {
                    continue;
                }
                kmax = kmax.max((gauge::k_coefficient(&mode)? - 1.0).abs());
            }
        }
        out.push(CheckReport::new("cartesian_k", &lab, kmax, bounds.cartesian_k));
        let tm01 = solve_mode(ModeSpec::tm(0, 1), g, medium, 1.0, 1)?;
        let k01 = (gauge::k_coefficient(&tm01)? - 1.0).abs();
        if let Some(p) = prev_k {
            // strictly decreasing towards the plate limit
            let res = if k01 < p { 0.0 } else { k01 - p + f64::MIN_POSITIVE };
            out.push(CheckReport::new("cartesian_k_monotone_TM0,1", &lab, res, 0.0));
        }
        prev_k = Some(k01);

        let tem = solve_mode(ModeSpec::tem(), g, medium, 1.0, 1)?;
        let sb = tem.beta().signum();
        let (mut fe, mut fb) = (0.0f64, 0.0f64);
        for i in 0..=200 {
            let r = 1.0 + d * i as f64 / 200.0;
            let p = profiles::profile(&tem, r, 0.0)?;
            fe = fe.max((p.g_er - 1.0).abs());
            fb = fb.max((p.g_bth - sb).abs());
        }
        // a/r − 1 spans exactly 1 − 1/ratio ≤ ratio − 1
        out.push(CheckReport::new("tem_flatness", &lab, fe.max(fb), d));
    }
    Ok(out)
}
