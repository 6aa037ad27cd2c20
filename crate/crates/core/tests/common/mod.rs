//! Reference Bessel values built only from textbook representations, kept
//! apart from the library evaluator.
#![allow(dead_code)]

use std::f64::consts::PI;

const GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Clone, Copy, Debug)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

impl Dd {
    pub fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }
    pub fn value(self) -> f64 {
        self.hi + self.lo
    }
    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let e = e + self.lo + o.lo;
        let (h, l) = two_sum(s, e);
        Dd { hi: h, lo: l }
    }
    pub fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        let e = e + self.hi * o.lo + self.lo * o.hi;
        let (h, l) = two_sum(p, e);
        Dd { hi: h, lo: l }
    }
    pub fn div_f(self, d: f64) -> Dd {
        let q1 = self.hi / d;
        let r = self.add(Dd::new(-q1 * d)).add(Dd::new(-(q1.mul_add(d, -(q1 * d)))));
        let q2 = r.hi / d;
        let (h, l) = two_sum(q1, q2);
        Dd { hi: h, lo: l }
    }
}

/// Power series in double-double arithmetic.
pub fn j_series_dd(n: u32, x: f64) -> f64 {
    let h = Dd::new(0.5 * x);
    let mut t = Dd::new(1.0);
    for i in 1..=n {
        t = t.mul(h).div_f(i as f64);
    }
    let q = h.mul(h);
    let mq = Dd { hi: -q.hi, lo: -q.lo };
    let mut sum = t;
    for k in 1..400u32 {
        t = t.mul(mq).div_f(k as f64 * (n + k) as f64);
        sum = sum.add(t);
        if t.hi.abs() < 1e-34 * sum.hi.abs() && k as f64 > 0.5 * x {
            break;
        }
    }
    sum.value()
}

fn j_series(n: u32, x: f64) -> f64 {
    let h = 0.5 * x;
    let mut t = 1.0;
    for i in 1..=n {
        t *= h / i as f64;
    }
    let mut sum = t;
    for k in 1..200u32 {
        t *= -h * h / (k as f64 * (n + k) as f64);
        sum += t;
        if t.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

fn y_series(n: u32, x: f64) -> f64 {
    let h = 0.5 * x;
    let mut head = 0.0;
    if n > 0 {
        let mut fact = vec![1.0f64; n as usize + 1];
        for i in 1..=n as usize {
            fact[i] = fact[i - 1] * i as f64;
        }
        for k in 0..n {
            head += fact[(n - k - 1) as usize] / fact[k as usize] * (h * h).powi(k as i32);
        }
        head *= -h.powi(-(n as i32)) / PI;
    }
    let psi = |m: u32| -> f64 { -GAMMA + (1..m).map(|i| 1.0 / i as f64).sum::<f64>() };
    let mut t = h.powi(n as i32);
    for i in 1..=n {
        t /= i as f64;
    }
    let mut tail = 0.0;
    for k in 0..200u32 {
        if k > 0 {
            t *= -h * h / (k as f64 * (n + k) as f64);
        }
        let add = (psi(k + 1) + psi(n + k + 1)) * t;
        tail += add;
        if k > 2 && add.abs() < 1e-18 * tail.abs() {
            break;
        }
    }
    head + 2.0 / PI * h.ln() * j_series(n, x) - tail / PI
}

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(k: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let mut z = (PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = z;
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

pub fn composite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize, rule: &[(f64, f64)]) -> f64 {
    let w = (b - a) / panels as f64;
    let mut s = 0.0;
    for p in 0..panels {
        let c = a + (p as f64 + 0.5) * w;
        for &(z, wt) in rule {
            s += wt * f(c + 0.5 * w * z);
        }
    }
    0.5 * w * s
}

/// Bessel's integral, trapezoid rule over the full period.
fn j_integral(n: u32, x: f64) -> f64 {
    let pts = (2.0 * (x + n as f64) + 200.0) as usize;
    let h = 2.0 * PI / pts as f64;
    let mut s = 0.0;
    for i in 0..pts {
        let t = i as f64 * h;
        s += (n as f64 * t - x * t.sin()).cos();
    }
    s / pts as f64
}

/// Schläfli's integral.
fn y_integral(n: u32, x: f64) -> f64 {
    let rule = gauss_legendre(20);
    let nf = n as f64;
    let panels = ((x + nf) / 2.0) as usize + 20;
    let first = composite(|t| (x * t.sin() - nf * t).sin(), 0.0, PI, panels, &rule);
    let g = |t: f64| nf * t - x * t.sinh();
    let tstar = if nf > x { (nf / x).acosh() } else { 0.0 };
    let gmax = g(tstar);
    let mut tend = tstar + 0.5;
    while g(tend) > gmax - 50.0 {
        tend *= 1.5;
    }
    let sgn = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let second = composite(
        |t| ((nf * t - x * t.sinh()).exp()) + sgn * ((-nf * t - x * t.sinh()).exp()),
        0.0,
        tend,
        400,
        &rule,
    );
    (first - second) / PI
}

pub fn j(n: i32, x: f64) -> f64 {
    let m = n.unsigned_abs();
    let s = if n < 0 && m % 2 == 1 { -1.0 } else { 1.0 };
    let v = if x <= 8.0 {
        j_series(m, x)
    } else if x <= 40.0 {
        j_series_dd(m, x)
    } else {
        j_integral(m, x)
    };
    s * v
}

pub fn y(n: i32, x: f64) -> f64 {
    let m = n.unsigned_abs();
    let s = if n < 0 && m % 2 == 1 { -1.0 } else { 1.0 };
    let v = if x <= 8.0 { y_series(m, x) } else { y_integral(m, x) };
    s * v
}

pub fn jp(n: i32, x: f64) -> f64 {
    0.5 * (j(n - 1, x) - j(n + 1, x))
}

pub fn yp(n: i32, x: f64) -> f64 {
    0.5 * (y(n - 1, x) - y(n + 1, x))
}

/// Sign-change scan with plain bisection.
pub fn roots<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, step: f64, want: usize) -> Vec<f64> {
    let mut out = Vec::new();
    let mut a = lo;
    let mut fa = f(a);
    while a < hi && out.len() < want {
        let b = (a + step).min(hi);
        let fb = f(b);
        if fa * fb < 0.0 {
            let (mut l, mut r, mut fl) = (a, b, fa);
            for _ in 0..200 {
                let mid = 0.5 * (l + r);
                let fm = f(mid);
                if (fm < 0.0) == (fl < 0.0) {
                    l = mid;
                    fl = fm;
                } else {
                    r = mid;
                }
                if r - l < 1e-15 * mid {
                    break;
                }
            }
            out.push(0.5 * (l + r));
        }
        a = b;
        fa = fb;
    }
    out
}

pub mod grid;
