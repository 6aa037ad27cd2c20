use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use cylwave_core::emdyn::{self, Coord, ElectrodeId};
use cylwave_core::gauge;
use cylwave_core::model::{cutoff_roots, solve_mode, Family, Geometry, ModeSpec, PropagatingMode};
use cylwave_core::profiles::field_at;
use cylwave_core::quantize::{self, modal_coefficients, quantize};
use cylwave_core::verify::{run_suite, SuiteReport};
use serde_json::{json, Value};

use crate::args::Global;
use crate::config::Resolved;
use crate::error::CliError;
use crate::output::{Cell, Table};

const TWO_PI: f64 = 2.0 * PI;

fn family_name(f: Family) -> &'static str {
    match f {
        Family::Tem => "TEM",
        Family::Tm => "TM",
        Family::Te => "TE",
    }
}

fn geometry_json(g: &Geometry) -> Value {
    match *g {
        Geometry::Coaxial { a, b } => json!({"kind": "coax", "a": a, "b": b}),
        Geometry::Hollow { a } => json!({"kind": "hollow", "a": a}),
    }
}

fn common_meta(t: &mut Table, cfg: &Resolved) {
    t.meta("geometry", geometry_json(&cfg.geometry));
    t.meta("epsilon", cfg.medium.epsilon());
    t.meta("mu", cfg.medium.mu());
}

fn mode_meta(t: &mut Table, cfg: &Resolved, m: &PropagatingMode) {
    common_meta(t, cfg);
    t.meta("mode", m.spec().label());
    t.meta("L", m.length());
    t.meta("l", m.l());
    t.meta("theta0", m.spec().theta0);
    t.meta("phi0", m.spec().phi0);
    t.meta("X", cfg.q.x);
    t.meta("Y", cfg.q.y);
    t.meta("beta", m.beta());
    t.meta("omega", m.omega());
    t.meta("frequency_hz", m.omega() / TWO_PI);
}

pub fn solve(cfg: &Resolved) -> Result<PropagatingMode, CliError> {
    let m = solve_mode(cfg.spec, cfg.geometry, cfg.medium, cfg.length, cfg.l)?;
    if let Some(f) = cfg.freq {
        let fc = m.omega_c() / TWO_PI;
        if f < fc {
            return Err(CliError::Usage(format!(
                "{} is below cutoff at {f} Hz (cutoff {fc} Hz)",
                m.label()
            )));
        }
    }
    Ok(m)
}

pub fn cutoffs(cfg: &Resolved, m_max: usize) -> Result<Table, CliError> {
    if m_max == 0 {
        return Err(CliError::Usage("--m-max must be at least 1".into()));
    }
    let mut t = Table::new(
        "cutoffs",
        vec![("m", "-"), ("k_c_a", "-"), ("k_c", "1/m"), ("omega_c", "rad/s"), ("f_c", "Hz"), ("note", "-")],
    );
    common_meta(&mut t, cfg);
    t.meta("family", family_name(cfg.spec.family));
    t.meta("n", cfg.spec.n);
    let a = cfg.geometry.a();
    let c = cfg.medium.c();
    if cfg.spec.family == Family::Tem {
        t.rows.push(vec![Cell::Int(0), 0.0.into(), 0.0.into(), 0.0.into(), 0.0.into(), "k_c = 0 (no cutoff)".into()]);
        return Ok(t);
    }
    let roots = cutoff_roots(cfg.spec.family, cfg.spec.n, &cfg.geometry, m_max)?;
    for (i, &x) in roots.values().iter().enumerate() {
        let kc = x / a;
        t.rows.push(vec![Cell::Int(i as i64 + 1), x.into(), kc.into(), (c * kc).into(), (c * kc / TWO_PI).into(), "".into()]);
    }
    Ok(t)
}

pub fn mode(cfg: &Resolved) -> Result<Value, CliError> {
    let m = solve(cfg)?;
    let mc = emdyn::modal_constants(&m)?;
    let qr = quantize(&m, cfg.hbar)?;
    let co = modal_coefficients(&m)?;
    let s = emdyn::energy_momentum_surface(&m, qr.e_m, cfg.q)?;
    let (h_q, p_q) = quantize::quadrature_energy_momentum(&m, cfg.hbar, cfg.q);
    let units = json!({
        "a": "m", "b": "m", "L": "m", "epsilon": "F/m", "mu": "H/m", "c": "m/s",
        "k_c": "1/m", "beta": "1/m", "k": "1/m", "omega": "rad/s", "omega_c": "rad/s",
        "frequency_hz": "Hz", "cutoff_hz": "Hz", "v_phi": "m/s",
        "h_eff": "m", "h_eff_prime": "m", "C_d": "F/m^2", "L_d_inv": "1/H",
        "C_H": "F", "C_P": "F", "L_H_inv": "m^2/H", "L_H_over_beta2": "H",
        "transverse_length": "m", "phi_m": "Wb", "E_m": "V/m", "B_m": "T",
        "gap": "J", "photon_mass": "kg", "hbar": "J s", "H": "J", "P_z": "kg m/s",
    });
    Ok(json!({
        "command": "mode",
        "version": env!("CARGO_PKG_VERSION"),
        "mode": {
            "family": family_name(m.family()),
            "n": m.n(),
            "m": m.m(),
            "label": m.spec().label(),
            "theta0": m.spec().theta0,
            "phi0": m.spec().phi0,
        },
        "geometry": geometry_json(m.geometry()),
        "medium": {"epsilon": m.medium().epsilon(), "mu": m.medium().mu(), "c": m.medium().c()},
        "dispersion": {
            "L": m.length(),
            "l": m.l(),
            "k_c": m.k_c(),
            "k_c_a": m.x_a(),
            "beta": m.beta(),
            "k": m.k(),
            "omega": m.omega(),
            "frequency_hz": m.omega() / TWO_PI,
            "omega_c": m.omega_c(),
            "cutoff_hz": m.omega_c() / TWO_PI,
            "v_phi": m.v_phi(),
        },
        "normalization": serde_json::to_value(m.norm()).expect("plain data"),
        "modal": {
            "h_eff": mc.h_eff,
            "h_eff_prime": mc.h_eff_prime,
            "C_d": mc.c_d,
            "L_d_inv": mc.l_d_inv,
            "K": mc.k,
        },
        "quantization": {
            "C_H": qr.c_h,
            "C_P": qr.c_p,
            "L_H_inv": qr.l_h_inv,
            "L_H_over_beta2": qr.l_h_over_beta2,
            "transverse_length": co.transverse_length,
            "phi_m": qr.phi_m,
            "E_m": qr.e_m,
            "B_m": qr.b_m,
            "gap": qr.gap,
            "photon_mass": qr.photon_mass,
            "gamma_n": qr.gamma_n,
            "hbar": qr.hbar,
        },
        "quadratures": {"X": cfg.q.x, "Y": cfg.q.y},
        "energy": {"H": s.h, "P_z": s.p_z, "H_quanta": h_q, "P_z_quanta": p_q},
        "units": units,
    }))
}

fn amplitude(cfg: &Resolved, m: &PropagatingMode, em: Option<f64>) -> Result<f64, CliError> {
    match em {
        Some(e) if e > 0.0 && e.is_finite() => Ok(e),
        Some(e) => Err(CliError::Usage(format!("--em must be positive, got {e}"))),
        None => Ok(quantize::quantum_amplitude(m, cfg.hbar)?.1),
    }
}

fn radii(m: &PropagatingMode, count: usize) -> Vec<f64> {
    let (lo, hi) = m.geometry().r_range();
    match m.geometry() {
        Geometry::Coaxial { .. } if count == 1 => vec![lo],
        Geometry::Coaxial { .. } => (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect(),
        // the axis itself is skipped
        Geometry::Hollow { .. } => (0..count).map(|i| hi * (i + 1) as f64 / count as f64).collect(),
    }
}

pub fn fields(cfg: &Resolved, nr: usize, nth: usize, z: f64, tt: f64, em: Option<f64>) -> Result<Table, CliError> {
    if nr == 0 || nth == 0 {
        return Err(CliError::Usage("--nr and --ntheta must be positive".into()));
    }
    let m = solve(cfg)?;
    let e_m = amplitude(cfg, &m, em)?;
    let mut t = Table::new(
        "fields",
        vec![
            ("r", "m"),
            ("theta", "rad"),
            ("E_r", "V/m"),
            ("E_theta", "V/m"),
            ("E_z", "V/m"),
            ("B_r", "T"),
            ("B_theta", "T"),
            ("B_z", "T"),
        ],
    );
    mode_meta(&mut t, cfg, &m);
    t.meta("z", z);
    t.meta("t", tt);
    t.meta("E_m", e_m);
    for r in radii(&m, nr) {
        for j in 0..nth {
            let th = TWO_PI * j as f64 / nth as f64;
            let f = field_at(&m, e_m, cfg.q, r, th, z, tt)?;
            let mut row: Vec<Cell> = vec![r.into(), th.into()];
            row.extend(f.e.iter().chain(f.b.iter()).map(|&v| Cell::Num(v)));
            t.rows.push(row);
        }
    }
    Ok(t)
}

pub fn currents(cfg: &Resolved, ns: usize, z: f64, tt: f64, em: Option<f64>) -> Result<Table, CliError> {
    if ns == 0 {
        return Err(CliError::Usage("--ns must be positive".into()));
    }
    let m = solve(cfg)?;
    let e_m = amplitude(cfg, &m, em)?;
    let mut t = Table::new(
        "currents",
        vec![
            ("electrode", "-"),
            ("coordinate", "-"),
            ("position", "rad or m"),
            ("sigma", "C/m^2"),
            ("j_z", "A/m"),
            ("j_t", "A/m"),
        ],
    );
    mode_meta(&mut t, cfg, &m);
    t.meta("z", z);
    t.meta("t", tt);
    t.meta("E_m", e_m);
    t.meta("j_t_direction", "u_theta on cylinders, u_r on virtual planes");
    for el in emdyn::electrodes(&m) {
        let coords: Vec<Coord> = if el.is_virtual() {
            radii(&m, ns).into_iter().map(Coord::R).collect()
        } else {
            (0..ns).map(|j| Coord::Theta(m.spec().theta0 + TWO_PI * j as f64 / ns as f64)).collect()
        };
        for c in coords {
            let s = emdyn::surface_state(&m, e_m, el, cfg.q, c, z, tt)?;
            let (kind, pos) = match c {
                Coord::Theta(th) => ("theta", th),
                Coord::R(r) => ("r", r),
            };
            t.rows.push(vec![el.name().into(), kind.into(), pos.into(), s.sigma.into(), s.j_z.into(), s.j_t.into()]);
        }
    }
    if m.is_virtual() {
        // the virtual radial current meets the peripheral one where the plane
        // touches a conductor
        let th = m.spec().theta0;
        let top = ElectrodeId::VirTop { theta_p: th };
        let mut pairs = vec![(m.a(), if m.geometry().is_coaxial() { ElectrodeId::In } else { ElectrodeId::Front })];
        if let Some(b) = m.b() {
            pairs.push((b, ElectrodeId::Out));
        }
        let mut worst = 0.0f64;
        let scale = e_m / (m.medium().mu() * m.medium().c());
        // several phases so the check never lands on a node of the envelope
        let phases = [(z, tt), (z + m.length() / 8.0, tt), (z, tt + 0.3 / m.omega())];
        for (r, el) in pairs {
            for &(zz, ts) in &phases {
                let v = emdyn::surface_state(&m, e_m, top, cfg.q, Coord::R(r), zz, ts)?;
                let w = emdyn::surface_state(&m, e_m, el, cfg.q, Coord::Theta(th), zz, ts)?;
                worst = worst.max((v.j_t.abs() - w.j_t.abs()).abs() / scale);
            }
        }
        t.meta("junction_residual", worst);
        t.meta("junction_tolerance", 1e-10);
    }
    Ok(t)
}

pub fn fig3(cfg: &Resolved, ratios: &[f64], ms: &[u32], nr: usize) -> Result<Table, CliError> {
    if ratios.is_empty() || ms.is_empty() || nr < 2 {
        return Err(CliError::Usage("fig3 needs at least one ratio, one m and --nr >= 2".into()));
    }
    let a = cfg.geometry.a();
    let mut t = Table::new(
        "fig3",
        vec![("kind", "-"), ("b_over_a", "-"), ("m", "-"), ("r_over_a", "-"), ("difference", "-")],
    );
    t.meta("a", a);
    t.meta("epsilon", cfg.medium.epsilon());
    t.meta("mu", cfg.medium.mu());
    t.meta("definition", "g_vir(r) - gauge profile(r); the max rows hold max |difference|");
    let mut summary = Vec::new();
    for &ratio in ratios {
        if !(ratio > 1.0 && ratio.is_finite()) {
            return Err(CliError::Usage(format!("b/a must exceed 1, got {ratio}")));
        }
        let g = Geometry::coaxial(a, a * ratio)?;
        for &mm in ms {
            let spec = ModeSpec::te(0, mm).with_phases(cfg.spec.theta0, cfg.spec.phi0);
            let mode = solve_mode(spec, g, cfg.medium, cfg.length, cfg.l)?;
            let rs: Vec<f64> = (0..nr).map(|i| a + a * (ratio - 1.0) * i as f64 / (nr - 1) as f64).collect();
            let d = gauge::fig3_profile(&mode, &rs)?;
            let mut arg = 0;
            for (i, (&r, &v)) in rs.iter().zip(&d).enumerate() {
                if v.abs() > d[arg].abs() {
                    arg = i;
                }
                t.rows.push(vec!["profile".into(), ratio.into(), Cell::Int(mm as i64), (r / a).into(), v.into()]);
            }
            let mx = gauge::fig3_difference(&mode)?;
            summary.push(vec!["max".into(), ratio.into(), Cell::Int(mm as i64), (rs[arg] / a).into(), mx.into()]);
        }
    }
    t.rows.extend(summary);
    Ok(t)
}

pub fn verify(cfg: &Resolved, g: &Global, timing: bool) -> Result<(SuiteReport, String), CliError> {
    let mut sc = cfg.verify.clone();
    sc.strict |= cfg.strict;
    if let Some(s) = cfg.seed {
        sc.seed = s;
    }
    if let Some(h) = cfg.hbar_given {
        sc.hbar = Some(h);
    }
    if let Some(x) = g.x {
        sc.x = x;
    }
    if let Some(y) = g.y {
        sc.y = y;
    }
    sc.record_timing |= timing;
    let report = run_suite(&sc)?;
    let text = summary(&report);
    Ok((report, text))
}

pub fn summary(r: &SuiteReport) -> String {
    let mut groups: BTreeMap<&str, (usize, usize, f64, f64)> = BTreeMap::new();
    for c in &r.checks {
        let e = groups.entry(c.check.as_str()).or_insert((0, 0, f64::NEG_INFINITY, 0.0));
        e.0 += 1;
        if c.pass {
            e.1 += 1;
        }
        if c.residual > e.2 || c.residual.is_nan() {
            e.2 = c.residual;
            e.3 = c.tolerance;
        }
    }
    let mut s = String::new();
    let _ = writeln!(s, "{:<34} {:>6} {:>6}  {:>24}  {:>24}", "check", "count", "pass", "worst residual", "its tolerance");
    for (k, (n, p, w, t)) in groups {
        let _ = writeln!(s, "{k:<34} {n:>6} {p:>6}  {:>24}  {:>24}", crate::output::num(w), crate::output::num(t));
    }
    for c in r.failures() {
        let _ = writeln!(s, "FAIL {} [{}] residual {} > {}", c.check, c.mode, crate::output::num(c.residual), crate::output::num(c.tolerance));
    }
    let _ = writeln!(
        s,
        "{}: {} checks, {} passed, {} failed (seed {}{})",
        if r.all_passed() { "PASS" } else { "FAIL" },
        r.total,
        r.passed,
        r.failed,
        r.seed,
        if r.strict { ", strict" } else { "" }
    );
    s
}
