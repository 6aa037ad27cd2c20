mod common;

use std::f64::consts::{E, PI};

use common::grid::{all_modes, medium, modes, quad};
use cylwave_core::emdyn::{
    self, charge_conservation_residual, compute_h_eff, electrodes, energy_momentum_surface, energy_momentum_volume,
    flux_equation_residual, generalized_flux, h_eff_integral_form, line_charge_current, surface_energy_density,
    surface_state, Coord, ElectrodeId,
};
use cylwave_core::model::{solve_mode, Family, Geometry, ModeSpec, PropagatingMode, Quadratures};
use cylwave_core::profiles::field_at;
use cylwave_core::quad::{integrate, QuadOptions};

fn coord_for(m: &PropagatingMode, el: ElectrodeId, u: f64) -> Coord {
    if el.is_virtual() {
        let (lo, hi) = m.geometry().r_range();
        Coord::R(lo + (hi - lo) * u)
    } else {
        Coord::Theta(2.0 * PI * u)
    }
}

#[test]
fn closed_form_effective_lengths() {
    let tem = solve_mode(ModeSpec::tem(), Geometry::coaxial(1.0, E).unwrap(), medium(), 2.0, 1).unwrap();
    let h = compute_h_eff(&tem).unwrap();
    assert!((h.h_eff - 1.0).abs() < 1e-15);
    assert!((h.h_eff_prime.unwrap() - E).abs() < 1e-15);

    for a in [0.5, 1.0, 3.0] {
        let g = Geometry::hollow(a).unwrap();
        for mm in 1..4 {
            let m = solve_mode(ModeSpec::tm(0, mm), g, medium(), 2.0, 1).unwrap();
            assert!((compute_h_eff(&m).unwrap().h_eff - a / 2.0).abs() < 1e-13 * a);
            let m = solve_mode(ModeSpec::te(0, mm), g, medium(), 2.0, 1).unwrap();
            let a_m = m.norm().a_m.unwrap();
            let want = 2.0 * a * common::j(0, m.x_a()).powi(2) / (a_m * a_m);
            assert!((compute_h_eff(&m).unwrap().h_eff - want).abs() < 1e-11 * want);
        }
    }
}

/// Effective lengths written out directly from the Bessel oracle, integrated
/// with a fixed composite Gauss–Legendre rule.
fn oracle_h_eff(m: &PropagatingMode) -> f64 {
    let (a, b) = (m.a(), m.b().unwrap());
    let n = m.n() as i32;
    let nf = n as f64;
    let kc = m.k_c();
    let xa = kc * a;
    let (j, y) = (common::j, common::y);
    let f: Box<dyn Fn(f64) -> f64> = match m.family() {
        Family::Tm => Box::new(move |r| {
            let x = kc * r;
            a * PI * PI / 4.0 * kc * kc * r * (j(n, x) * y(n, xa) - j(n, xa) * y(n, x)).powi(2)
        }),
        Family::Te if n > 0 => {
            let dj = j(n + 1, xa) - j(n - 1, xa);
            let dy = y(n + 1, xa) - y(n - 1, xa);
            let den = dj * y(n, xa) - j(n, xa) * dy;
            Box::new(move |r| {
                let x = kc * r;
                a / (nf * nf) * kc * kc * r * ((dj * y(n, x) - j(n, x) * dy) / den).powi(2)
            })
        }
        Family::Te => {
            let a_m = m.norm().a_m.unwrap();
            Box::new(move |r| {
                let x = kc * r;
                4.0 * r / a * ((j(1, x) * y(1, xa) - j(1, xa) * y(1, x)) / (a_m * xa)).powi(2)
            })
        }
        Family::Tem => unreachable!(),
    };
    common::composite(f, a, b, 64, &common::gauss_legendre(20))
}

#[test]
fn numerical_effective_lengths_match_fixed_rule() {
    for m in all_modes() {
        if !m.geometry().is_coaxial() || m.family() == Family::Tem {
            continue;
        }
        let h = compute_h_eff(&m).unwrap().h_eff;
        let o = oracle_h_eff(&m);
        assert!(h > 0.0);
        assert!((h - o).abs() < 1e-8 * o, "{} {h} {o}", m.label());
        let (f, lo, hi) = h_eff_integral_form(&m).unwrap();
        let fixed = common::composite(f, lo, hi, 64, &common::gauss_legendre(20));
        assert!((h - fixed).abs() < 1e-10 * h);
    }
}

#[test]
fn coax_tm01_reference_length() {
    let m = solve_mode(ModeSpec::tm(0, 1), Geometry::coaxial(1.0, 2.0).unwrap(), medium(), 2.0, 1).unwrap();
    let h = compute_h_eff(&m).unwrap().h_eff;
    assert!(h.is_finite() && h > 0.0);
    assert!((h - oracle_h_eff(&m)).abs() < 1e-8 * h);
}

#[test]
fn primed_lengths() {
    for m in modes(2.0) {
        let h = compute_h_eff(&m).unwrap();
        let expect_prime = m.geometry().is_coaxial() && !m.is_virtual();
        assert_eq!(h.h_eff_prime.is_some(), expect_prime, "{}", m.label());
        if m.family() == Family::Tem {
            assert!((h.h_eff_prime.unwrap() / h.h_eff - 2.0).abs() < 1e-14);
        }
    }
}

#[test]
fn modal_constant_identities() {
    for m in modes(2.0) {
        let c = emdyn::modal_constants(&m).unwrap();
        let md = m.medium();
        assert!((c.c_d * c.h_eff / md.epsilon() - 1.0).abs() < 1e-14);
        assert!((c.l_d_inv * md.mu() * c.h_eff - 1.0).abs() < 1e-14);
        assert!(c.k > 0.0);
    }
}

#[test]
fn fluxes() {
    let q = quad();
    for m in modes(2.0) {
        if m.is_virtual() {
            assert!(generalized_flux(&m, 1.0, q, Coord::Theta(0.0), 0.0, 0.0).is_err());
            let rm = m.norm().r_max.unwrap();
            let h = compute_h_eff(&m).unwrap().h_eff;
            let (_, ft) = cylwave_core::model::envelope(&m, q, 0.4, 0.0);
            let phi = generalized_flux(&m, 1.0, q, Coord::R(rm), 0.4, 0.0).unwrap();
            assert!((phi - h / m.omega() * ft).abs() < 1e-12 * h / m.omega());
        } else {
            assert!(generalized_flux(&m, 1.0, q, Coord::R(1.0), 0.0, 0.0).is_err());
            if m.n() == 0 {
                let p1 = generalized_flux(&m, 1.0, q, Coord::Theta(0.1), 0.4, 0.0).unwrap();
                let p2 = generalized_flux(&m, 1.0, q, Coord::Theta(2.5), 0.4, 0.0).unwrap();
                assert!((p1 - p2).abs() <= 1e-15 * p1.abs());
            }
        }
    }
}

/// σ = ε n·E and j = n × B / μ on every electrode.
#[test]
fn surface_states_match_boundary_fields() {
    let q = quad();
    for m in all_modes() {
        let md = m.medium();
        for el in electrodes(&m) {
            for (u, z, t) in [(0.13, 0.2, 0.0), (0.41, 1.1, 3e-9), (0.77, 2.5, 1e-8)] {
                let coord = coord_for(&m, el, u);
                let s = surface_state(&m, 1.0, el, q, coord, z, t).unwrap();
                let (r, th, sgn, plane) = match (el, coord) {
                    (ElectrodeId::In, Coord::Theta(th)) | (ElectrodeId::Front, Coord::Theta(th)) => (m.a(), th, if m.geometry().is_coaxial() { 1.0 } else { -1.0 }, false),
                    (ElectrodeId::Out, Coord::Theta(th)) => (m.b().unwrap(), th, -1.0, false),
                    (ElectrodeId::Back, Coord::Theta(th)) => (m.a(), th + PI, -1.0, false),
                    (ElectrodeId::VirTop { theta_p }, Coord::R(r)) => (r, theta_p, 1.0, true),
                    (ElectrodeId::VirBottom { theta_p }, Coord::R(r)) => (r, theta_p + PI, -1.0, true),
                    _ => unreachable!(),
                };
                let f = field_at(&m, 1.0, q, r, th, z, t).unwrap();
                let (sig, jz, jt) = if plane {
                    (md.epsilon() * sgn * f.e[1], -sgn * f.b[0] / md.mu(), sgn * f.b[2] / md.mu())
                } else {
                    (md.epsilon() * sgn * f.e[0], sgn * f.b[1] / md.mu(), -sgn * f.b[2] / md.mu())
                };
                let scale_s = md.epsilon();
                let scale_j = 1.0 / (md.mu() * md.c());
                let lab = format!("{} {}", m.label(), el.name());
                assert!((s.sigma - sig).abs() < 1e-10 * scale_s, "{lab} sigma {} {}", s.sigma, sig);
                assert!((s.j_z - jz).abs() < 1e-10 * scale_j, "{lab} jz {} {}", s.j_z, jz);
                assert!((s.j_t - jt).abs() < 1e-10 * scale_j, "{lab} jt {} {}", s.j_t, jt);
            }
        }
    }
}

#[test]
fn surface_state_rules() {
    let q = quad();
    let tem = solve_mode(ModeSpec::tem(), Geometry::coaxial(1.0, 2.0).unwrap(), medium(), 3.0, 1).unwrap();
    let si = surface_state(&tem, 1.0, ElectrodeId::In, q, Coord::Theta(0.3), 0.4, 0.0).unwrap();
    let so = surface_state(&tem, 1.0, ElectrodeId::Out, q, Coord::Theta(0.3), 0.4, 0.0).unwrap();
    assert!((so.sigma / si.sigma + 0.5).abs() < 1e-14);
    assert!(surface_state(&tem, 1.0, ElectrodeId::Front, q, Coord::Theta(0.3), 0.4, 0.0).is_err());
    assert!(surface_state(&tem, 1.0, ElectrodeId::VirTop { theta_p: 0.0 }, q, Coord::R(1.5), 0.4, 0.0).is_err());
    assert!(surface_state(&tem, 1.0, ElectrodeId::In, q, Coord::R(1.5), 0.4, 0.0).is_err());

    for m in modes(2.0) {
        for el in electrodes(&m) {
            let s = surface_state(&m, 1.0, el, q, coord_for(&m, el, 0.3), 0.7, 0.0).unwrap();
            if matches!(m.family(), Family::Tem | Family::Tm) {
                assert_eq!(s.j_t, 0.0);
            }
        }
        if m.is_virtual() && !m.geometry().is_coaxial() {
            let f = surface_state(&m, 1.0, ElectrodeId::Front, q, Coord::Theta(0.3), 0.7, 0.0).unwrap();
            let b = surface_state(&m, 1.0, ElectrodeId::Back, q, Coord::Theta(0.3), 0.7, 0.0).unwrap();
            assert_eq!(f, b);
            // the virtual radial current meets the wall current at r = a
            let v = surface_state(&m, 1.0, ElectrodeId::VirTop { theta_p: 0.3 }, q, Coord::R(m.a()), 0.7, 0.0).unwrap();
            assert!((v.j_t.abs() - f.j_t.abs()).abs() < 1e-12 * f.j_t.abs(), "{} {} {}", m.label(), v.j_t, f.j_t);
        }
        if m.is_virtual() && m.geometry().is_coaxial() {
            let (a, b) = (m.a(), m.b().unwrap());
            let top = |r| surface_state(&m, 1.0, ElectrodeId::VirTop { theta_p: 1.0 }, q, Coord::R(r), 0.7, 0.0).unwrap();
            let i = surface_state(&m, 1.0, ElectrodeId::In, q, Coord::Theta(0.3), 0.7, 0.0).unwrap();
            let o = surface_state(&m, 1.0, ElectrodeId::Out, q, Coord::Theta(0.3), 0.7, 0.0).unwrap();
            assert!((top(a).j_t.abs() - i.j_t.abs()).abs() < 1e-12 * i.j_t.abs());
            assert!((top(b).j_t.abs() - o.j_t.abs()).abs() < 1e-12 * o.j_t.abs().max(1e-300));
        }
        if m.is_virtual() {
            let a = surface_state(&m, 1.0, ElectrodeId::VirTop { theta_p: 0.0 }, q, Coord::R(m.a() * 0.9), 0.7, 0.0);
            let b = surface_state(&m, 1.0, ElectrodeId::VirTop { theta_p: 2.0 }, q, Coord::R(m.a() * 0.9), 0.7, 0.0);
            if m.geometry().is_coaxial() {
                assert!(a.is_err());
            } else {
                assert_eq!(a.unwrap(), b.unwrap());
            }
        }
    }
}

#[test]
fn energy_routes_agree() {
    let q = quad();
    for m in all_modes() {
        let s = energy_momentum_surface(&m, 1.0, q).unwrap();
        let v = energy_momentum_volume(&m, 1.0, q).unwrap();
        let lab = m.label();
        assert!(s.h > 0.0);
        assert!((s.h - v.h).abs() < 1e-6 * s.h, "{lab} H {} {}", s.h, v.h);
        assert!((s.p_z - v.p_z).abs() < 1e-6 * s.p_z.abs(), "{lab} P {} {}", s.p_z, v.p_z);
        assert!((s.p_z - m.beta() / m.omega() * s.h).abs() < 1e-8 * s.p_z.abs(), "{lab}");
        assert!(v.j_ang * m.omega() / v.h < 1e-8, "{lab} J {}", v.j_ang);
        let pscale = s.p_z.abs();
        assert!(v.p_x.abs() < 1e-10 * pscale && v.p_y.abs() < 1e-10 * pscale, "{lab}");
    }
}

#[test]
fn energy_scaling_and_zero() {
    let m = solve_mode(ModeSpec::te(1, 1), Geometry::coaxial(1.0, 2.0).unwrap(), medium(), 3.0, 1).unwrap();
    let q = quad();
    let h1 = energy_momentum_surface(&m, 1.0, q).unwrap().h;
    let h3 = energy_momentum_surface(&m, 3.0, q).unwrap().h;
    assert!((h3 / h1 - 9.0).abs() < 1e-13);
    let z = Quadratures::new(0.0, 0.0).unwrap();
    let s = energy_momentum_surface(&m, 1.0, z).unwrap();
    assert_eq!((s.h, s.p_z), (0.0, 0.0));
    let l = line_charge_current(&m, 1.0, z, 0.3, 0.0).unwrap();
    assert_eq!((l.q_full, l.i_full, l.q_lobe, l.i_lobe), (0.0, 0.0, 0.0, 0.0));
    let el = emdyn::reference_electrode(&m);
    assert_eq!(surface_energy_density(&m, 1.0, z, el, Coord::Theta(0.3), 0.1, 0.0).unwrap(), 0.0);
}

#[test]
fn propagation_and_conservation_residuals() {
    let q = quad();
    for m in all_modes() {
        for el in electrodes(&m) {
            let pts: Vec<_> = [(0.11, 0.3, 0.0), (0.52, 1.7, 2e-9), (0.93, 2.9, 7e-9)]
                .iter()
                .map(|&(u, z, t)| (coord_for(&m, el, u), z, t))
                .collect();
            let r = charge_conservation_residual(&m, q, el, &pts).unwrap();
            assert!(r < 1e-12, "{} {} {r}", m.label(), el.name());
            if el == emdyn::reference_electrode(&m) {
                let r = flux_equation_residual(&m, q, &pts).unwrap();
                assert!(r < 1e-12, "{} {r}", m.label());
            }
        }
    }
}

#[test]
fn surface_energy_density_integrates_to_energy() {
    let q = quad();
    let opts = QuadOptions::rel(1e-13);
    for m in modes(2.0) {
        let el = emdyn::reference_electrode(&m);
        let h = energy_momentum_surface(&m, 1.0, q).unwrap().h;
        let (lo, hi, w) = if el.is_virtual() {
            let (lo, hi) = m.geometry().r_range();
            (lo, hi, 1.0)
        } else {
            (0.0, 2.0 * PI, m.a())
        };
        let total = integrate(
            |z| {
                integrate(
                    |u| {
                        let c = if el.is_virtual() { Coord::R(u) } else { Coord::Theta(u) };
                        w * surface_energy_density(&m, 1.0, q, el, c, z, 0.0).unwrap()
                    },
                    lo,
                    hi,
                    opts,
                )
                .unwrap()
            },
            0.0,
            m.length(),
            opts,
        )
        .unwrap();
        assert!((total - h).abs() < 1e-10 * h, "{} {total} {h}", m.label());
    }
}

#[test]
fn line_charge_and_current() {
    let q = quad();
    let tem = solve_mode(ModeSpec::tem(), Geometry::coaxial(1.0, 2.0).unwrap(), medium(), 3.0, 1).unwrap();
    let l = line_charge_current(&tem, 1.0, q, 0.4, 1e-9).unwrap();
    let c = emdyn::modal_constants(&tem).unwrap();
    let ev = tem.env_vals(q, 0.4, 1e-9);
    let dphi_dt = emdyn::phi_m(&tem, 1.0).unwrap() * tem.omega() * ev.f;
    assert!((l.q_full - c.c_d * 2.0 * PI * dphi_dt).abs() < 1e-12 * l.q_full.abs());
    assert_eq!(l.q_full, l.q_lobe);
    for m in modes(2.0) {
        let l = line_charge_current(&m, 1.0, q, 0.4, 1e-9).unwrap();
        if m.n() >= 1 {
            assert!(l.q_full.abs() < 1e-12 * l.q_lobe.abs(), "{}", m.label());
            assert!(l.i_full.abs() < 1e-12 * l.i_lobe.abs());
            assert!(l.q_lobe != 0.0);
        }
    }
}
