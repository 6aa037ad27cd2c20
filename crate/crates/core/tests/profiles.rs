use cylwave_core::expr::EnvVals;
use cylwave_core::model::{solve_mode, Family, Geometry, Medium, ModeSpec, PropagatingMode, Quadratures};
use cylwave_core::profiles::{self, field_at, g_vir_expr, peak_angle, profile, profile_exprs};

fn medium() -> Medium {
    Medium::new(2.0, 3.0).unwrap()
}

fn modes(ratio: f64) -> Vec<PropagatingMode> {
    let mut out = Vec::new();
    let coax = Geometry::coaxial(1.0, ratio).unwrap();
    let hollow = Geometry::hollow(1.0).unwrap();
    out.push(solve_mode(ModeSpec::tem(), coax, medium(), 3.0, 1).unwrap());
    for fam in [Family::Tm, Family::Te] {
        for n in 0..3 {
            for m in 1..3 {
                for g in [coax, hollow] {
                    let spec = ModeSpec::new(fam, n, m).with_phases(0.3, 0.2);
                    out.push(solve_mode(spec, g, medium(), 3.0, 1).unwrap());
                }
            }
        }
    }
    out
}

#[test]
fn cutoff_values_at_reference_points() {
    let coax = Geometry::coaxial(1.0, 2.0).unwrap();
    let hollow = Geometry::hollow(1.0).unwrap();
    let cases = [
        (ModeSpec::tm(0, 1), coax, 3.123031),
        (ModeSpec::tm(1, 1), coax, 3.196578),
        (ModeSpec::te(0, 1), coax, 3.196578),
        (ModeSpec::te(1, 1), coax, 0.677336),
        (ModeSpec::tm(0, 1), hollow, 2.404826),
        (ModeSpec::te(0, 1), hollow, 3.831706),
        (ModeSpec::te(1, 1), hollow, 1.841184),
    ];
    for (spec, g, want) in cases {
        let m = solve_mode(spec, g, medium(), 3.0, 1).unwrap();
        assert!((m.k_c() - want).abs() < 2e-6, "{} {}", m.label(), m.k_c());
    }
}

#[test]
fn normalization_and_sign_conventions() {
    for ratio in [1.2, 2.0, 5.0] {
        for m in modes(ratio) {
            if m.is_virtual() {
                let rm = m.norm().r_max.unwrap();
                let p = profile(&m, rm, 0.7).unwrap();
                assert!((p.g_eth - 1.0).abs() < 1e-10, "{} {}", m.label(), p.g_eth);
                let gv = g_vir_expr(&m).unwrap().eval(rm, 0.0);
                assert!((gv - 1.0).abs() < 1e-12);
                continue;
            }
            let th = m.spec().theta0 + peak_angle(&m);
            let g = profile(&m, m.a(), th).unwrap().g_er;
            let n_dot_e = if m.geometry().is_coaxial() { g } else { -g };
            assert!((n_dot_e - 1.0).abs() < 1e-10, "{} n.E = {n_dot_e}", m.label());
            let mut worst: f64 = 0.0;
            for i in 0..720 {
                let th = i as f64 * std::f64::consts::PI / 360.0;
                worst = worst.max(profile(&m, m.a(), th).unwrap().g_er.abs());
            }
            assert!(worst <= 1.0 + 1e-10, "{} max {worst}", m.label());
        }
    }
}

#[test]
fn conductor_boundaries() {
    for m in modes(2.0) {
        let mut radii = vec![m.a()];
        radii.extend(m.b());
        for r in radii {
            for i in 0..13 {
                let th = 0.37 * i as f64;
                let p = profile(&m, r, th).unwrap();
                for v in [p.g_eth, p.g_ez, p.g_br] {
                    assert!(v.abs() < 1e-10, "{} r={r} th={th}: {p:?}", m.label());
                }
            }
        }
    }
}

#[test]
fn family_structure() {
    for m in modes(2.0) {
        for &(r, th) in &[(0.4, 0.3), (0.9, 2.0)] {
            let r = if m.geometry().is_coaxial() { 1.0 + r } else { r };
            let p = profile(&m, r, th).unwrap();
            match m.family() {
                Family::Te => assert_eq!(p.g_ez, 0.0),
                Family::Tm => assert_eq!(p.g_bz, 0.0),
                Family::Tem => assert!(p.g_ez == 0.0 && p.g_bz == 0.0),
            }
            if m.family() == Family::Tm && m.n() == 0 {
                assert_eq!(p.g_eth, 0.0);
                assert_eq!(p.g_br, 0.0);
            }
        }
    }
}

#[test]
fn tem_profile_at_inner_conductor() {
    let g = Geometry::coaxial(1.0, 2.0).unwrap();
    for l in [1, -2] {
        let m = solve_mode(ModeSpec::tem(), g, medium(), 3.0, l).unwrap();
        let p = profile(&m, 1.0, 0.4).unwrap();
        assert_eq!(p.g_er, 1.0);
        assert_eq!(p.g_bth, (l as f64).signum());
        assert_eq!((p.g_eth, p.g_ez, p.g_br, p.g_bz), (0.0, 0.0, 0.0, 0.0));
    }
}

#[test]
fn hollow_axis_limits() {
    let h = Geometry::hollow(1.0).unwrap();
    for (spec, nonzero) in [(ModeSpec::tm(1, 1), true), (ModeSpec::tm(2, 1), false), (ModeSpec::te(1, 1), true)] {
        let m = solve_mode(spec, h, medium(), 3.0, 1).unwrap();
        let p0 = profile(&m, 0.0, 0.9).unwrap();
        let p1 = profile(&m, 1e-7, 0.9).unwrap();
        for (a, b) in [(p0.g_er, p1.g_er), (p0.g_eth, p1.g_eth), (p0.g_br, p1.g_br), (p0.g_bth, p1.g_bth)] {
            assert!(a.is_finite());
            assert!((a - b).abs() < 1e-6, "{} {a} {b}", m.label());
        }
        assert_eq!(p0.g_eth != 0.0 || p0.g_er != 0.0, nonzero);
    }
}

#[test]
fn hollow_te0_peak_constants() {
    let h = Geometry::hollow(1.0).unwrap();
    for mm in 1..4 {
        let m = solve_mode(ModeSpec::te(0, mm), h, medium(), 3.0, 1).unwrap();
        let xm = m.k_c() * m.norm().r_max.unwrap();
        assert!((xm - 1.841184).abs() < 1e-6);
        assert!((m.norm().a_m.unwrap() - 1.16373).abs() < 1e-5);
        assert!(m.norm().r_max.unwrap() < m.a());
    }
    let c = Geometry::coaxial(1.0, 2.0).unwrap();
    let m = solve_mode(ModeSpec::te(0, 1), c, medium(), 3.0, 1).unwrap();
    let rm = m.norm().r_max.unwrap();
    assert!(rm > 1.0 && rm < 2.0);
    assert!(m.norm().a_m.unwrap().is_finite() && m.norm().a_m_prime.unwrap().is_finite());
}

#[test]
fn field_linearity_and_zero() {
    let g = Geometry::coaxial(1.0, 2.0).unwrap();
    let m = solve_mode(ModeSpec::te(1, 2), g, medium(), 3.0, 1).unwrap();
    let q = Quadratures::new(0.6, -0.3).unwrap();
    let s1 = field_at(&m, 1.0, q, 1.4, 0.5, 0.2, 0.1).unwrap();
    let s2 = field_at(&m, 2.0, q, 1.4, 0.5, 0.2, 0.1).unwrap();
    for i in 0..3 {
        assert_eq!(s2.e[i], 2.0 * s1.e[i]);
        assert_eq!(s2.b[i], 2.0 * s1.b[i]);
    }
    let z = field_at(&m, 1.0, Quadratures::new(0.0, 0.0).unwrap(), 1.4, 0.5, 0.2, 0.1).unwrap();
    assert!(z.e.iter().chain(z.b.iter()).all(|v| *v == 0.0));
    assert!(field_at(&m, 1.0, q, 2.5, 0.0, 0.0, 0.0).is_err());
    assert!(field_at(&m, 0.0, q, 1.5, 0.0, 0.0, 0.0).is_err());
}

#[test]
fn maxwell_equations_hold_analytically() {
    for ratio in [1.2, 2.0, 5.0] {
        for m in modes(ratio) {
            let (e, b) = profiles::field_exprs(&m, 1.0);
            let c2 = m.medium().c().powi(2);
            let q = Quadratures::new(0.7, -0.4).unwrap();
            let (lo, hi) = m.geometry().r_range();
            let mut worst: f64 = 0.0;
            for i in 0..25 {
                let u = (i as f64 + 0.5) / 25.0;
                let r = lo + (hi - lo) * u;
                let th = 6.1 * ((i * 7) % 25) as f64 / 25.0;
                let ev: EnvVals = m.env_vals(q, 0.13 * i as f64, 1e-9 * i as f64);
                let vt = th - m.spec().theta0;
                let de = e.div_curl(r, vt, &ev);
                let db = b.div_curl(r, vt, &ev);
                let dbt = b.dt_values(r, vt, &ev);
                let det = e.dt_values(r, vt, &ev);
                let s_e = de.scale.max(dbt.iter().fold(0.0f64, |a, v| a.max(v.abs())));
                let s_b = db.scale.max(det.iter().fold(0.0f64, |a, v| a.max(v.abs())) / c2);
                worst = worst.max(de.div.abs() / s_e).max(db.div.abs() / s_b);
                for k in 0..3 {
                    worst = worst.max((de.curl[k] + dbt[k]).abs() / s_e);
                    worst = worst.max((db.curl[k] - det[k] / c2).abs() / s_b);
                }
            }
            assert!(worst < 1e-10, "{} residual {worst:e}", m.label());
        }
    }
}

#[test]
fn profile_exprs_have_single_harmonic() {
    for m in modes(2.0) {
        let p = profile_exprs(&m);
        for e in p.e.iter().chain(p.b.iter()) {
            for t in e.terms() {
                assert!(t.ang.n == m.n() as i32 || m.family() == Family::Tem);
            }
        }
    }
}
