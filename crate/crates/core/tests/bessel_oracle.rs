mod common;

use cylwave_core::specfun::{self, bessel_j, bessel_jp, bessel_y, cross_te, cross_tm, find_roots, BesselOrder};
use std::f64::consts::PI;

fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64))
        .collect()
}

#[test]
fn oracle_branches_agree_with_each_other() {
    for n in [0u32, 1, 3, 7] {
        let a = common::j_series_dd(n, 7.5);
        let b = common::j(n as i32, 7.5);
        assert!((a - b).abs() < 1e-14, "series n={n}");
    }
    for n in [0i32, 2, 5] {
        let a = common::j_series_dd(n as u32, 39.0);
        let x = 41.0;
        let c = common::j_series_dd(n as u32, x);
        let d = common::j(n, x);
        assert!((c - d).abs() < 1e-12, "dd vs integral n={n} {c} {d} {a}");
    }
    for n in [0i32, 1, 4] {
        let x = 8.0;
        let s = common::y(n, x);
        let i = common::y(n, x + 1e-9);
        assert!((s - i).abs() < 1e-9, "y switch n={n} {s} {i}");
    }
}

#[test]
fn known_zeros_and_extrema() {
    assert!(specfun::j(0, 2.404826).abs() < 1e-6);
    assert!(specfun::jp(1, 1.841184).abs() < 1e-6);
    let r = common::roots(|x| common::jp(1, x), 1.0, 3.0, 0.05, 1)[0];
    assert!((r - 1.841184).abs() < 1e-6);
    assert!(bessel_jp(BesselOrder::new(1), r).unwrap().abs() < 1e-12);
}

#[test]
fn j_matches_oracle() {
    let orders = [0u32, 1, 2, 3, 5, 8, 10, 16, 25, 40, 64];
    for &n in &orders {
        for x in log_grid(1e-6, 1e4, 70) {
            let o = common::j(n as i32, x);
            let v = bessel_j(BesselOrder::new(n), x).unwrap();
            let nf = n as f64;
            let scale = if x < nf {
                if x > 40.0 {
                    continue;
                }
                o.abs()
            } else {
                o.abs().max((2.0 / (PI * x)).sqrt().min(1.0))
            };
            if scale == 0.0 || scale < 1e-290 {
                continue;
            }
            assert!((v - o).abs() <= 1e-10 * scale, "J{n}({x}) = {v}, oracle {o}");
        }
    }
}

#[test]
fn y_matches_oracle() {
    let orders = [0u32, 1, 2, 3, 5, 8, 10, 16, 25, 40, 64];
    for &n in &orders {
        for x in log_grid(1e-6, 1e4, 70) {
            let o = common::y(n as i32, x);
            if !o.is_finite() || o.abs() > 1e290 {
                continue;
            }
            let v = bessel_y(BesselOrder::new(n), x).unwrap();
            let scale = if x < n as f64 { o.abs() } else { o.abs().max((2.0 / (PI * x)).sqrt().min(1.0)) };
            assert!((v - o).abs() <= 1e-10 * scale, "Y{n}({x}) = {v}, oracle {o}");
        }
    }
}

#[test]
fn find_roots_reproduces_j0_and_j1_zeros() {
    let want0 = common::roots(|x| common::j(0, x), 0.5, 12.0, 0.05, 10);
    let got0 = find_roots(|x| specfun::j(0, x), 1e-9, 12.0, PI / 8.0, 1e-14).unwrap();
    // the fourth zero, 11.7915..., also lies below 12
    assert_eq!(want0.len(), 4);
    assert_eq!(got0.roots.len(), 4);
    for (g, w) in got0.roots.values().iter().zip(&want0) {
        assert!((g - w).abs() < 1e-9 * w);
    }
    for (g, lit) in got0.roots.values().iter().zip([2.404826, 5.520078, 8.653728]) {
        assert!((g - lit).abs() < 1e-6);
    }
    let want1 = common::roots(|x| common::j(1, x), 0.5, 9.0, 0.05, 2);
    let got1 = find_roots(|x| specfun::j(1, x), 1e-3, 9.0, PI / 8.0, 1e-14).unwrap();
    assert_eq!(got1.roots.len(), 2);
    for ((g, w), lit) in got1.roots.values().iter().zip(&want1).zip([3.831706, 7.015587]) {
        assert!((g - w).abs() < 1e-9 * w);
        assert!((g - lit).abs() < 1e-6);
    }
}

#[test]
fn cross_product_roots_match_oracle() {
    let tm0 = common::roots(
        |x| common::j(0, x) * common::y(0, 2.0 * x) - common::j(0, 2.0 * x) * common::y(0, x),
        0.1,
        8.0,
        0.05,
        1,
    )[0];
    assert!((tm0 - 3.123).abs() < 1e-3);
    let got = find_roots(|x| cross_tm(0, x, 2.0).unwrap(), 1e-3, 8.0, PI / 8.0, 1e-14).unwrap();
    assert!((got.roots.nth(1).unwrap() - tm0).abs() < 1e-9 * tm0);

    let te1 = common::roots(
        |x| common::jp(1, x) * common::yp(1, 2.0 * x) - common::jp(1, 2.0 * x) * common::yp(1, x),
        0.1,
        8.0,
        0.01,
        1,
    )[0];
    let got = find_roots(|x| cross_te(1, x, 2.0).unwrap(), 1e-3, 8.0, PI / 16.0, 1e-14).unwrap();
    assert!((got.roots.nth(1).unwrap() - te1).abs() < 1e-9 * te1);
    assert!(cross_te(1, te1, 2.0).unwrap().abs() < 1e-12);
}

#[test]
fn cross_products_reject_bad_ratio_and_swap_sign() {
    assert!(cross_tm(0, 1.0, 1.0).is_err());
    assert!(cross_te(0, 1.0, 0.5).is_err());
    let x = 1.7;
    let l = 2.5;
    let fwd = cross_tm(2, x, l).unwrap();
    let swapped = specfun::j(2, l * x) * specfun::y(2, x) - specfun::j(2, x) * specfun::y(2, l * x);
    assert!((fwd + swapped).abs() < 1e-15);
}

#[test]
fn te_roots_approach_parallel_plate_spacing() {
    let l = 1.01;
    let got = find_roots(|x| cross_te(0, x, l).unwrap(), 1e-3, 1000.0, PI / 8.0 / (l - 1.0), 1e-14).unwrap();
    for m in 1..=3 {
        let x = got.roots.nth(m).unwrap();
        let ratio = x * (l - 1.0) / (m as f64 * PI);
        assert!((ratio - 1.0).abs() < 1e-2, "m={m} ratio {ratio}");
    }
}
