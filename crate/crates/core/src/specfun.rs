//! Bessel functions of integer order, cross products and real-root scanning.
//!
//! `J_n` uses the power series for small arguments, Miller's backward
//! recurrence for moderate ones and Hankel's expansion once `x` is large
//! compared to `n²`. `Y_0` and `Y_1` come from the power series, the Neumann
//! series over Miller values, or Hankel's expansion, and higher orders follow
//! by forward recurrence.

use std::f64::consts::{FRAC_2_PI, PI};

use serde::{Deserialize, Serialize};
use thiserror::Error;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_MAX_X: f64 = 4.0;
const NEUMANN_MAX_X: f64 = 25.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecfunError {
    #[error("{func}: argument {x} is outside the domain")]
    Domain { func: &'static str, x: f64 },
    #[error("radius ratio {0} must be finite and greater than 1")]
    Ratio(f64),
    #[error("invalid scan: interval [{lo}, {hi}], step {step}, tolerance {tol}")]
    Scan { lo: f64, hi: f64, step: f64, tol: f64 },
    #[error("bisection failed in {} bracket(s), first [{}, {}]", .brackets.len(), .brackets[0].0, .brackets[0].1)]
    NoConvergence { brackets: Vec<(f64, f64)> },
}

/// Non-negative Bessel order together with the parity sign picked up when a
/// negative order is folded back (`Z_{-n} = (-1)^n Z_n`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BesselOrder(u32);

impl BesselOrder {
    pub fn new(n: u32) -> Self {
        BesselOrder(n)
    }

    pub fn value(self) -> u32 {
        self.0
    }

    /// Folds a signed order, returning the reduced order and its sign factor.
    pub fn reduce(n: i32) -> (Self, f64) {
        let m = n.unsigned_abs();
        let sign = if n < 0 && m % 2 == 1 { -1.0 } else { 1.0 };
        (BesselOrder(m), sign)
    }
}

/// Strictly increasing positive roots, indexed from m = 1.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RootList(Vec<f64>);

impl RootList {
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
        values.dedup();
        RootList(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The m-th root, m starting at 1.
    pub fn nth(&self, m: usize) -> Option<f64> {
        m.checked_sub(1).and_then(|i| self.0.get(i).copied())
    }
}

/// Outcome of a sign-change scan: refined roots plus points where `|f|` has a
/// suspiciously deep local minimum without a sign change.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RootScan {
    pub roots: RootList,
    pub tangencies: Vec<f64>,
}

// ---------------------------------------------------------------- J_n -----

fn j_series(n: u32, x: f64) -> f64 {
    let h = 0.5 * x;
    let mut t = 1.0;
    for i in 1..=n {
        t *= h / i as f64;
    }
    if t == 0.0 {
        return 0.0;
    }
    let q = -h * h;
    let mut sum = t;
    let mut k = 1u32;
    loop {
        t *= q / (k as f64 * (n + k) as f64);
        sum += t;
        if t.abs() <= 1e-17 * sum.abs() || k > 200 {
            break;
        }
        k += 1;
    }
    sum
}

/// `J_0..=J_top` at `x > 0` by normalized backward recurrence.
fn j_miller(top: u32, x: f64) -> Vec<f64> {
    let base = top.max(x.ceil() as u32);
    let mut start = base + 20 + (40.0 * base as f64).sqrt() as u32;
    if start % 2 == 1 {
        start += 1;
    }
    let mut out = vec![0.0; top as usize + 1];
    let two_over_x = 2.0 / x;
    let mut jp1 = 0.0;
    let mut j = 1e-300;
    let mut norm = 0.0;
    let mut k = start;
    while k > 0 {
        let jm1 = k as f64 * two_over_x * j - jp1;
        jp1 = j;
        j = jm1;
        k -= 1;
        if k <= top {
            out[k as usize] = j;
        }
        if k.is_multiple_of(2) && k > 0 {
            norm += 2.0 * j;
        }
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp1 *= 1e-250;
            norm *= 1e-250;
            for v in out.iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    norm += j;
    for v in out.iter_mut() {
        *v /= norm;
    }
    out
}

fn hankel_ok(n: u32, x: f64) -> bool {
    let nf = n as f64;
    x >= NEUMANN_MAX_X + 0.5 * nf * nf
}

/// Hankel's large-argument expansion, returning `(J_n, Y_n)`.
fn hankel(n: u32, x: f64) -> (f64, f64) {
    let mu = 4.0 * (n as f64) * (n as f64);
    let eight_x = 8.0 * x;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * eight_x);
        if term.abs() > last || term == 0.0 {
            break;
        }
        last = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 * p.abs().max(1e-300) {
            break;
        }
    }
    // chi = x - (2n+1) pi/4, phase reduced exactly through (2n+1) mod 8
    let (sx, cx) = x.sin_cos();
    let (sp, cp) = match (2 * n + 1) % 8 {
        1 => (0.5_f64.sqrt(), 0.5_f64.sqrt()),
        3 => (0.5_f64.sqrt(), -(0.5_f64.sqrt())),
        5 => (-(0.5_f64.sqrt()), -(0.5_f64.sqrt())),
        _ => (-(0.5_f64.sqrt()), 0.5_f64.sqrt()),
    };
    let cchi = cx * cp + sx * sp;
    let schi = sx * cp - cx * sp;
    let amp = (FRAC_2_PI / x).sqrt();
    (amp * (p * cchi - q * schi), amp * (p * schi + q * cchi))
}

fn jn_pos(n: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if x < SERIES_MAX_X {
        j_series(n, x)
    } else if hankel_ok(n, x) {
        hankel(n, x).0
    } else {
        j_miller(n, x)[n as usize]
    }
}

// ---------------------------------------------------------------- Y_n -----

fn y01_series(x: f64) -> (f64, f64) {
    let h = 0.5 * x;
    let q = h * h;
    let lg = h.ln() + EULER_GAMMA;
    // Y0
    let mut t = 1.0;
    let mut harm = 0.0;
    let mut s0 = 0.0;
    for k in 1..80 {
        let kf = k as f64;
        t *= -q / (kf * kf);
        harm += 1.0 / kf;
        let add = -t * harm;
        s0 += add;
        if add.abs() < 1e-18 * s0.abs() {
            break;
        }
    }
    let j0 = j_series(0, x);
    let j1 = j_series(1, x);
    let y0 = FRAC_2_PI * (lg * j0 + s0);
    // Y1: psi(k+1) + psi(k+2) = 2 H_k + 1/(k+1) - 2 gamma
    let mut t = 1.0;
    let mut harm = 0.0;
    let mut s1 = 2.0 * harm + 1.0 - 2.0 * EULER_GAMMA;
    for k in 1..80 {
        let kf = k as f64;
        t *= -q / (kf * (kf + 1.0));
        harm += 1.0 / kf;
        let add = t * (2.0 * harm + 1.0 / (kf + 1.0) - 2.0 * EULER_GAMMA);
        s1 += add;
        if add.abs() < 1e-18 * s1.abs() {
            break;
        }
    }
    let y1 = -FRAC_2_PI / x + FRAC_2_PI * h.ln() * j1 - h * s1 / PI;
    (y0, y1)
}

fn y01_neumann(x: f64) -> (f64, f64) {
    let top = (x.ceil() as u32) + 40;
    let j = j_miller(top + 1, x);
    let lg = (0.5 * x).ln() + EULER_GAMMA;
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut k = 1usize;
    while 2 * k < top as usize {
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        s0 += sign * j[2 * k] / k as f64;
        s1 += sign * (j[2 * k - 1] - j[2 * k + 1]) / k as f64;
        k += 1;
    }
    let y0 = FRAC_2_PI * (lg * j[0] - 2.0 * s0);
    let y1 = -FRAC_2_PI * (j[0] / x - lg * j[1] - s1);
    (y0, y1)
}

fn y01(x: f64) -> (f64, f64) {
    if x < SERIES_MAX_X {
        y01_series(x)
    } else if x < NEUMANN_MAX_X {
        y01_neumann(x)
    } else {
        (hankel(0, x).1, hankel(1, x).1)
    }
}

fn yn_pos(n: u32, x: f64) -> f64 {
    if x <= 0.0 {
        return f64::NAN;
    }
    if n > 1 && hankel_ok(n, x) {
        return hankel(n, x).1;
    }
    let (y0, y1) = y01(x);
    if n == 0 {
        return y0;
    }
    let mut a = y0;
    let mut b = y1;
    for k in 1..n {
        let c = 2.0 * k as f64 / x * b - a;
        a = b;
        b = c;
        if !b.is_finite() {
            return b;
        }
    }
    b
}

// ------------------------------------------------------------ public API ---

/// `J_n(x)` for any integer order; `x` must be finite and non-negative.
/// Returns NaN outside the domain (see [`bessel_j`] for the checked form).
pub fn j(n: i32, x: f64) -> f64 {
    if !(x >= 0.0) || !x.is_finite() {
        return f64::NAN;
    }
    let (ord, sign) = BesselOrder::reduce(n);
    sign * jn_pos(ord.value(), x)
}

/// `Y_n(x)` for any integer order; `x` must be positive.
pub fn y(n: i32, x: f64) -> f64 {
    if !(x > 0.0) || !x.is_finite() {
        return f64::NAN;
    }
    let (ord, sign) = BesselOrder::reduce(n);
    sign * yn_pos(ord.value(), x)
}

/// `J'_n(x) = [J_{n-1}(x) - J_{n+1}(x)] / 2`.
pub fn jp(n: i32, x: f64) -> f64 {
    0.5 * (j(n - 1, x) - j(n + 1, x))
}

/// `Y'_n(x) = [Y_{n-1}(x) - Y_{n+1}(x)] / 2`.
pub fn yp(n: i32, x: f64) -> f64 {
    0.5 * (y(n - 1, x) - y(n + 1, x))
}

pub fn bessel_j(n: BesselOrder, x: f64) -> Result<f64, SpecfunError> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(SpecfunError::Domain { func: "bessel_j", x });
    }
    Ok(jn_pos(n.value(), x))
}

pub fn bessel_y(n: BesselOrder, x: f64) -> Result<f64, SpecfunError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(SpecfunError::Domain { func: "bessel_y", x });
    }
    Ok(yn_pos(n.value(), x))
}

pub fn bessel_jp(n: BesselOrder, x: f64) -> Result<f64, SpecfunError> {
    bessel_j(n, x)?;
    Ok(jp(n.value() as i32, x))
}

pub fn bessel_yp(n: BesselOrder, x: f64) -> Result<f64, SpecfunError> {
    bessel_y(n, x)?;
    Ok(yp(n.value() as i32, x))
}

fn check_cross(x_a: f64, ratio: f64) -> Result<(), SpecfunError> {
    if !(ratio > 1.0) || !ratio.is_finite() {
        return Err(SpecfunError::Ratio(ratio));
    }
    if !(x_a > 0.0) || !x_a.is_finite() {
        return Err(SpecfunError::Domain { func: "cross product", x: x_a });
    }
    Ok(())
}

/// `J_n(x_a) Y_n(λ x_a) - J_n(λ x_a) Y_n(x_a)` with `λ = ratio`.
pub fn cross_tm(n: i32, x_a: f64, ratio: f64) -> Result<f64, SpecfunError> {
    check_cross(x_a, ratio)?;
    Ok(cross_tm_unchecked(n, x_a, ratio))
}

/// `J'_n(x_a) Y'_n(λ x_a) - J'_n(λ x_a) Y'_n(x_a)` with `λ = ratio`.
pub fn cross_te(n: i32, x_a: f64, ratio: f64) -> Result<f64, SpecfunError> {
    check_cross(x_a, ratio)?;
    Ok(cross_te_unchecked(n, x_a, ratio))
}

pub(crate) fn cross_tm_unchecked(n: i32, x_a: f64, ratio: f64) -> f64 {
    let x_b = ratio * x_a;
    j(n, x_a) * y(n, x_b) - j(n, x_b) * y(n, x_a)
}

pub(crate) fn cross_te_unchecked(n: i32, x_a: f64, ratio: f64) -> f64 {
    let x_b = ratio * x_a;
    jp(n, x_a) * yp(n, x_b) - jp(n, x_b) * yp(n, x_a)
}

// ----------------------------------------------------------- root finding --

fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, mut flo: f64, tol: f64) -> Option<f64> {
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol * mid.abs().max(f64::MIN_POSITIVE) || mid <= lo || mid >= hi {
            return Some(mid);
        }
        let fm = f(mid);
        if fm.is_nan() {
            return None;
        }
        if fm == 0.0 {
            return Some(mid);
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    None
}

/// Finds every simple sign-change root of `f` in `(x_lo, x_hi)` visible at
/// resolution `scan_step`, refining each bracket by bisection to relative
/// tolerance `tol`.
pub fn find_roots<F: Fn(f64) -> f64>(
    f: F,
    x_lo: f64,
    x_hi: f64,
    scan_step: f64,
    tol: f64,
) -> Result<RootScan, SpecfunError> {
    let bad = !(x_lo < x_hi) || !(scan_step > 0.0) || !(tol > 0.0) || !x_lo.is_finite() || !x_hi.is_finite();
    if bad {
        return Err(SpecfunError::Scan { lo: x_lo, hi: x_hi, step: scan_step, tol });
    }
    let count = ((x_hi - x_lo) / scan_step).ceil() as usize;
    let grid: Vec<f64> = (0..=count)
        .map(|i| if i == count { x_hi } else { x_lo + i as f64 * scan_step })
        .collect();
    let vals: Vec<f64> = grid.iter().map(|&x| f(x)).collect();

    let mut roots = Vec::new();
    let mut failed = Vec::new();
    let mut tangencies = Vec::new();
    for i in 0..count {
        let (a, b) = (grid[i], grid[i + 1]);
        let (fa, fb) = (vals[i], vals[i + 1]);
        if fa.is_nan() || fb.is_nan() {
            continue;
        }
        if fa == 0.0 {
            if i > 0 {
                roots.push(a);
            }
            continue;
        }
        if (fa < 0.0) != (fb < 0.0) && fb != 0.0 {
            match bisect(&f, a, b, fa, tol) {
                Some(r) => roots.push(r),
                None => failed.push((a, b)),
            }
        }
        if i > 0 {
            let fl = vals[i - 1];
            let same = (fl < 0.0) == (fa < 0.0) && (fa < 0.0) == (fb < 0.0);
            if same && fa.abs() < fl.abs() && fa.abs() < fb.abs() && fa.abs() < 1e-3 * fl.abs().min(fb.abs()) {
                tangencies.push(a);
            }
        }
    }
    if !failed.is_empty() {
        return Err(SpecfunError::NoConvergence { brackets: failed });
    }
    let mut merged: Vec<f64> = Vec::with_capacity(roots.len());
    for r in roots {
        match merged.last() {
            Some(&p) if (r - p).abs() <= tol * r.abs().max(1.0) => {}
            _ => merged.push(r),
        }
    }
    Ok(RootScan { roots: RootList::new(merged), tangencies })
}
