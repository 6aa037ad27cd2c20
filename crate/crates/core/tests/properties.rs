use std::f64::consts::PI;

use cylwave_core::gauge::k_coefficient;
use cylwave_core::model::{cutoff_function, cutoff_roots, envelope, solve_mode, Family, Geometry, Medium, ModeSpec, Quadratures};
use cylwave_core::profiles::field_exprs;
use cylwave_core::quantize::{quantize, Hbar};
use cylwave_core::specfun::{find_roots, j, jp, y, yp};
use proptest::prelude::*;

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![Just(Family::Tm), Just(Family::Te)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn wronskian(n in 0i32..=10, lx in -3.0f64..=3.0) {
        let x = 10f64.powf(lx);
        let w = 2.0 / (PI * x);
        let v = j(n, x) * yp(n, x) - jp(n, x) * y(n, x);
        prop_assert!((v - w).abs() < 1e-10 * w, "n={} x={} {} {}", n, x, v, w);
    }

    #[test]
    fn recurrence(n in 1i32..=10, lx in -3.0f64..=3.0) {
        let x = 10f64.powf(lx);
        let (a, b, c) = (j(n - 1, x), j(n + 1, x), 2.0 * n as f64 / x * j(n, x));
        let scale = a.abs().max(b.abs()).max(c.abs());
        prop_assert!((a + b - c).abs() <= 1e-9 * scale);
    }

    #[test]
    fn root_scan_refinement_keeps_roots(n in 0i32..=6, hi in 5.0f64..60.0, step in 0.05f64..0.4) {
        let f = |x: f64| j(n, x);
        let coarse = find_roots(f, 0.1, hi, step, 1e-14).unwrap().roots;
        let fine = find_roots(f, 0.1, hi, step / 2.0, 1e-14).unwrap().roots;
        prop_assert!(coarse.values().windows(2).all(|w| w[0] < w[1]));
        prop_assert!(fine.values().windows(2).all(|w| w[0] < w[1]));
        for r in coarse.values() {
            prop_assert!(fine.values().iter().any(|s| (s - r).abs() < 1e-9 * r));
        }
        prop_assert!(fine.len() >= coarse.len());
    }

    #[test]
    fn cutoffs_increase_and_solve(fam in family(), n in 0u32..=3, ratio in 1.05f64..6.0) {
        let g = Geometry::coaxial(1.0, ratio).unwrap();
        let roots = cutoff_roots(fam, n, &g, 3).unwrap();
        prop_assert!(roots.values().windows(2).all(|w| w[0] < w[1]));
        let f = cutoff_function(fam, n, &g).unwrap();
        for &x in roots.values() {
            let h = 1e-6 * x;
            let slope = ((f(x + h) - f(x - h)) / (2.0 * h)).abs();
            prop_assert!(f(x).abs() < 1e-10 * slope.max(f(x + h).abs()), "{} {}", x, f(x));
        }
    }

    #[test]
    fn envelope_identity(x in -3.0f64..3.0, yy in -3.0f64..3.0, z in -5.0f64..5.0, t in -1e-8f64..1e-8, phi0 in 0.0f64..6.3) {
        let spec = ModeSpec::tm(1, 1).with_phases(0.0, phi0);
        let m = solve_mode(spec, Geometry::hollow(0.02).unwrap(), Medium::vacuum(), 0.3, 2).unwrap();
        let q = Quadratures::new(x, yy).unwrap();
        let (f, ft) = envelope(&m, q, z, t);
        prop_assert!((f * f + ft * ft - q.norm_sqr()).abs() < 1e-12 * (1.0 + q.norm_sqr()));
    }

    #[test]
    fn quantum_prefactor(fam in family(), n in 0u32..=2, mm in 1u32..=2, ratio in 1.1f64..5.0, lh in -36.0f64..0.0, l in 1i64..4) {
        let hbar = Hbar::new(10f64.powf(lh)).unwrap();
        let m = solve_mode(ModeSpec::new(fam, n, mm), Geometry::coaxial(0.01, 0.01 * ratio).unwrap(), Medium::vacuum(), 0.2, l).unwrap();
        let r = quantize(&m, hbar).unwrap();
        prop_assert!((2.0 * r.c_p * m.omega() * r.phi_m.powi(2) / hbar.value() - 1.0).abs() < 1e-12);
        prop_assert!(r.c_p >= r.c_h);
    }

    #[test]
    fn k_positive_and_one_for_hollow(fam in family(), n in 0u32..=3, mm in 1u32..=3, ratio in 1.01f64..3.0) {
        let c = solve_mode(ModeSpec::new(fam, n, mm), Geometry::coaxial(1.0, ratio).unwrap(), Medium::vacuum(), 1.0, 1).unwrap();
        prop_assert!(k_coefficient(&c).unwrap() > 0.0);
        let h = solve_mode(ModeSpec::new(fam, n, mm), Geometry::hollow(1.0).unwrap(), Medium::vacuum(), 1.0, 1).unwrap();
        prop_assert_eq!(k_coefficient(&h).unwrap(), 1.0);
    }

    #[test]
    fn maxwell_for_random_media(fam in family(), n in 0u32..=3, mm in 1u32..=3, ratio in 1.05f64..6.0,
                                eps in 1.0f64..10.0, mu in 1.0f64..4.0, u in 0.0f64..1.0, th in 0.0f64..6.3) {
        let md = Medium::relative(eps, mu).unwrap();
        let m = solve_mode(ModeSpec::new(fam, n, mm), Geometry::coaxial(1.0, ratio).unwrap(), md, 2.0, 1).unwrap();
        let (e, b) = field_exprs(&m, 1.0);
        let c2 = md.c().powi(2);
        let ev = m.env_vals(Quadratures::new(0.6, 0.9).unwrap(), 0.7, 0.0);
        let r = 1.0 + (ratio - 1.0) * u;
        let de = e.div_curl(r, th, &ev);
        let db = b.div_curl(r, th, &ev);
        let dbt = b.dt_values(r, th, &ev);
        let det = e.dt_values(r, th, &ev);
        let se = de.scale.max(dbt.iter().fold(0.0f64, |a, v| a.max(v.abs())));
        let sb = db.scale.max(det.iter().fold(0.0f64, |a, v| a.max(v.abs())) / c2);
        prop_assert!(de.div.abs() <= 1e-10 * se && db.div.abs() <= 1e-10 * sb);
        for k in 0..3 {
            prop_assert!((de.curl[k] + dbt[k]).abs() <= 1e-10 * se);
            prop_assert!((db.curl[k] - det[k] / c2).abs() <= 1e-10 * sb);
        }
    }
}
