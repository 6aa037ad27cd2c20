//! Adaptive Gauss–Kronrod (7/15) quadrature, scalar and vector valued, and a
//! fixed composite Gauss–Legendre rule used as an independent cross-check.

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { abs_tol: 0.0, rel_tol: 1e-12, max_intervals: 2000 }
    }
}

impl QuadOptions {
    pub fn rel(rel_tol: f64) -> Self {
        QuadOptions { rel_tol, ..Self::default() }
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: Vec<f64>,
    error: f64,
}

fn gk15<F: FnMut(f64, &mut [f64])>(f: &mut F, a: f64, b: f64, dim: usize, buf: &mut [f64]) -> Segment {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kron = vec![0.0; dim];
    let mut gauss = vec![0.0; dim];
    f(c, buf);
    for d in 0..dim {
        kron[d] = WGK[7] * buf[d];
        gauss[d] = WG[3] * buf[d];
    }
    for i in 0..7 {
        let dx = h * XGK[i];
        let mut sum = vec![0.0; dim];
        f(c - dx, buf);
        sum.copy_from_slice(&buf[..dim]);
        f(c + dx, buf);
        for d in 0..dim {
            sum[d] += buf[d];
            kron[d] += WGK[i] * sum[d];
            if i % 2 == 1 {
                gauss[d] += WG[i / 2] * sum[d];
            }
        }
    }
    let mut error: f64 = 0.0;
    for d in 0..dim {
        kron[d] *= h;
        gauss[d] *= h;
        error = error.max((kron[d] - gauss[d]).abs());
    }
    Segment { a, b, value: kron, error }
}

/// Integrates a vector-valued function of dimension `dim` over `[a, b]`.
/// The error criterion uses the largest component magnitude as scale.
pub fn integrate_vec<F: FnMut(f64, &mut [f64])>(mut f: F, dim: usize, a: f64, b: f64, opts: QuadOptions) -> Result<Vec<f64>> {
    if !a.is_finite() || !b.is_finite() || dim == 0 {
        return Err(Error::Invalid(format!("quadrature over [{a}, {b}] with dimension {dim}")));
    }
    if a == b {
        return Ok(vec![0.0; dim]);
    }
    let mut buf = vec![0.0; dim];
    let mut segs = vec![gk15(&mut f, a, b, dim, &mut buf)];
    loop {
        let mut total = vec![0.0; dim];
        let mut err = 0.0;
        for s in &segs {
            for (t, v) in total.iter_mut().zip(&s.value) {
                *t += v;
            }
            err += s.error;
        }
        if total.iter().chain(std::iter::once(&err)).any(|v| !v.is_finite()) {
            return Err(Error::Invalid("non-finite integrand".into()));
        }
        let scale = total.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tol = opts.abs_tol.max(opts.rel_tol * scale);
        if err <= tol {
            return Ok(total);
        }
        if segs.len() >= opts.max_intervals {
            return Err(Error::Quadrature { error: err, tol, intervals: segs.len() });
        }
        let (worst, _) = segs
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, s)| if s.error > acc.1 { (i, s.error) } else { acc });
        let s = segs.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        if mid <= s.a || mid >= s.b {
            return Err(Error::Quadrature { error: err, tol, intervals: segs.len() + 1 });
        }
        segs.push(gk15(&mut f, s.a, mid, dim, &mut buf));
        segs.push(gk15(&mut f, mid, s.b, dim, &mut buf));
    }
}

pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<f64> {
    integrate_vec(|x, out: &mut [f64]| out[0] = f(x), 1, a, b, opts).map(|v| v[0])
}

/// Gauss–Legendre nodes and weights of order `k` on `[-1, 1]`.
pub fn gauss_legendre(k: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=k {
                let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = k as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        out.push((z, 2.0 / ((1.0 - z * z) * dp * dp)));
    }
    out
}

/// Composite Gauss–Legendre rule with `panels` equal panels of order `k`.
pub fn composite_gl<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize, k: usize) -> f64 {
    let rule = gauss_legendre(k);
    let w = (b - a) / panels as f64;
    let mut s = 0.0;
    for p in 0..panels {
        let c = a + (p as f64 + 0.5) * w;
        for &(z, wt) in &rule {
            s += wt * f(c + 0.5 * w * z);
        }
    }
    0.5 * w * s
}
