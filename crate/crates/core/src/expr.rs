//! Small symbolic layer for transverse profiles.
//!
//! An [`Expr`] is a sum of terms `c · r^p · R(r) · Θ(θ − θ₀)` where `R` is one,
//! `J_ν(k r)`, `Y_ν(k r)` or `ln(r / r₀)` and `Θ` is `cos nϑ` or `sin nϑ`.
//! Radial and angular derivatives stay inside the algebra, which is what the
//! residual checks rely on. A [`Component`] attaches one of the two travelling
//! envelopes `f`, `f̃` to an expression.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::specfun;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Radial {
    One,
    J { nu: i32, k: f64 },
    Y { nu: i32, k: f64 },
    Log { r0: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Cos,
    Sin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Angular {
    pub parity: Parity,
    pub n: i32,
}

impl Angular {
    pub const ONE: Angular = Angular { parity: Parity::Cos, n: 0 };

    pub fn cos(n: i32) -> Self {
        Angular { parity: Parity::Cos, n }
    }

    pub fn sin(n: i32) -> Self {
        Angular { parity: Parity::Sin, n }
    }

    pub fn eval(self, vt: f64) -> f64 {
        match self.parity {
            Parity::Cos => (self.n as f64 * vt).cos(),
            Parity::Sin => (self.n as f64 * vt).sin(),
        }
    }

    fn is_zero(self) -> bool {
        self.parity == Parity::Sin && self.n == 0
    }

    /// Derivative as (factor, angular).
    fn derivative(self) -> (f64, Angular) {
        let n = self.n as f64;
        match self.parity {
            Parity::Cos => (-n, Angular::sin(self.n)),
            Parity::Sin => (n, Angular::cos(self.n)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub c: f64,
    pub p: i32,
    pub rad: Radial,
    pub ang: Angular,
}

impl Term {
    pub fn new(c: f64, p: i32, rad: Radial, ang: Angular) -> Self {
        Term { c, p, rad, ang }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Expr {
    terms: Vec<Term>,
}

/// Angular dependence left after fixing `r`: a linear combination of
/// `cos nϑ` and `sin nϑ` harmonics.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AngForm {
    pub parts: Vec<(Angular, f64)>,
}

impl AngForm {
    pub fn eval(&self, vt: f64) -> f64 {
        self.parts.iter().map(|&(a, c)| c * a.eval(vt)).sum()
    }

    fn push(&mut self, a: Angular, c: f64) {
        if a.is_zero() {
            return;
        }
        match self.parts.iter_mut().find(|(b, _)| *b == a) {
            Some(slot) => slot.1 += c,
            None => self.parts.push((a, c)),
        }
    }
}

fn radial_value(rad: Radial, r: f64) -> f64 {
    match rad {
        Radial::One => 1.0,
        Radial::J { nu, k } => specfun::j(nu, k * r),
        Radial::Y { nu, k } => specfun::y(nu, k * r),
        Radial::Log { r0 } => (r / r0).ln(),
    }
}

/// Limit of `r^p R(r)` at `r = 0`; NaN where it diverges.
fn axis_value(p: i32, rad: Radial) -> f64 {
    match rad {
        Radial::One | Radial::Log { .. } if p > 0 => 0.0,
        Radial::One if p == 0 => 1.0,
        Radial::J { nu, k } => {
            let m = nu.unsigned_abs() as i32;
            let sign = if nu < 0 && m % 2 == 1 { -1.0 } else { 1.0 };
            match (p + m).cmp(&0) {
                std::cmp::Ordering::Greater => 0.0,
                std::cmp::Ordering::Equal => {
                    let mut v = sign;
                    for i in 1..=m {
                        v *= 0.5 * k / i as f64;
                    }
                    v
                }
                std::cmp::Ordering::Less => f64::NAN,
            }
        }
        _ => f64::NAN,
    }
}

impl Expr {
    pub fn zero() -> Self {
        Expr { terms: Vec::new() }
    }

    pub fn from_terms(terms: Vec<Term>) -> Self {
        let mut e = Expr::zero();
        for t in terms {
            e.push(t);
        }
        e
    }

    pub fn term(c: f64, p: i32, rad: Radial, ang: Angular) -> Self {
        Expr::from_terms(vec![Term::new(c, p, rad, ang)])
    }

    /// `c · J_ν(k r) · ang`
    pub fn j(c: f64, nu: i32, k: f64, ang: Angular) -> Self {
        Expr::term(c, 0, Radial::J { nu, k }, ang)
    }

    /// `c · Y_ν(k r) · ang`
    pub fn y(c: f64, nu: i32, k: f64, ang: Angular) -> Self {
        Expr::term(c, 0, Radial::Y { nu, k }, ang)
    }

    pub fn constant(c: f64, ang: Angular) -> Self {
        Expr::term(c, 0, Radial::One, ang)
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn push(&mut self, t: Term) {
        if t.c == 0.0 || t.ang.is_zero() {
            return;
        }
        match self.terms.iter_mut().find(|u| u.p == t.p && u.rad == t.rad && u.ang == t.ang) {
            Some(u) => u.c += t.c,
            None => self.terms.push(t),
        }
    }

    /// Multiplies by `r^q`.
    pub fn times_r_pow(&self, q: i32) -> Expr {
        Expr { terms: self.terms.iter().map(|t| Term { p: t.p + q, ..*t }).collect() }
    }

    pub fn d_r(&self) -> Expr {
        let mut out = Expr::zero();
        for t in &self.terms {
            if t.p != 0 {
                out.push(Term { c: t.c * t.p as f64, p: t.p - 1, ..*t });
            }
            match t.rad {
                Radial::One => {}
                Radial::J { nu, k } => {
                    out.push(Term { c: 0.5 * k * t.c, rad: Radial::J { nu: nu - 1, k }, ..*t });
                    out.push(Term { c: -0.5 * k * t.c, rad: Radial::J { nu: nu + 1, k }, ..*t });
                }
                Radial::Y { nu, k } => {
                    out.push(Term { c: 0.5 * k * t.c, rad: Radial::Y { nu: nu - 1, k }, ..*t });
                    out.push(Term { c: -0.5 * k * t.c, rad: Radial::Y { nu: nu + 1, k }, ..*t });
                }
                Radial::Log { .. } => out.push(Term { p: t.p - 1, rad: Radial::One, ..*t }),
            }
        }
        out
    }

    /// Derivative with respect to θ.
    pub fn d_theta(&self) -> Expr {
        let mut out = Expr::zero();
        for t in &self.terms {
            let (f, a) = t.ang.derivative();
            out.push(Term { c: t.c * f, ang: a, ..*t });
        }
        out
    }

    /// Angular form at fixed `r`. At `r = 0` the analytic axis limit of each
    /// term is used.
    pub fn at_r(&self, r: f64) -> AngForm {
        let mut cache: Vec<(Radial, f64)> = Vec::new();
        let mut out = AngForm::default();
        for t in &self.terms {
            let v = if r == 0.0 {
                axis_value(t.p, t.rad)
            } else {
                let rv = match cache.iter().find(|(k, _)| *k == t.rad) {
                    Some(&(_, v)) => v,
                    None => {
                        let v = radial_value(t.rad, r);
                        cache.push((t.rad, v));
                        v
                    }
                };
                rv * r.powi(t.p)
            };
            out.push(t.ang, t.c * v);
        }
        out
    }

    /// Value at `(r, ϑ)` with `ϑ = θ − θ₀`.
    pub fn eval(&self, r: f64, vt: f64) -> f64 {
        self.at_r(r).eval(vt)
    }

    /// Sum of the absolute values of the individual terms, a scale for
    /// cancellation-prone combinations.
    pub fn magnitude(&self, r: f64, vt: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| (t.c * radial_value(t.rad, r) * r.powi(t.p) * t.ang.eval(vt)).abs())
            .sum()
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(mut self, rhs: Expr) -> Expr {
        for t in rhs.terms {
            self.push(t);
        }
        self
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        self + (-rhs)
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self * -1.0
    }
}

impl Mul<f64> for Expr {
    type Output = Expr;
    fn mul(self, s: f64) -> Expr {
        Expr::from_terms(self.terms.into_iter().map(|t| Term { c: t.c * s, ..t }).collect())
    }
}

impl Mul<f64> for &Expr {
    type Output = Expr;
    fn mul(self, s: f64) -> Expr {
        self.clone() * s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Env {
    F,
    Ft,
}

/// Envelope values and the propagation constants that differentiate them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvVals {
    pub f: f64,
    pub ft: f64,
    pub beta: f64,
    pub omega: f64,
}

impl EnvVals {
    pub fn get(&self, e: Env) -> f64 {
        match e {
            Env::F => self.f,
            Env::Ft => self.ft,
        }
    }

    /// `∂f/∂z = β f̃`, `∂f̃/∂z = −β f`.
    pub fn dz(&self, e: Env) -> f64 {
        match e {
            Env::F => self.beta * self.ft,
            Env::Ft => -self.beta * self.f,
        }
    }

    /// `∂f/∂t = −ω f̃`, `∂f̃/∂t = ω f`.
    pub fn dt(&self, e: Env) -> f64 {
        match e {
            Env::F => -self.omega * self.ft,
            Env::Ft => self.omega * self.f,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub e: Expr,
    pub env: Env,
}

impl Component {
    pub fn new(e: Expr, env: Env) -> Self {
        Component { e, env }
    }

    pub fn zero() -> Self {
        Component { e: Expr::zero(), env: Env::F }
    }

    pub fn value(&self, r: f64, vt: f64, ev: &EnvVals) -> f64 {
        if self.e.is_zero() {
            return 0.0;
        }
        self.e.eval(r, vt) * ev.get(self.env)
    }

    pub fn d_r(&self) -> Component {
        Component { e: self.e.d_r(), env: self.env }
    }

    pub fn d_theta(&self) -> Component {
        Component { e: self.e.d_theta(), env: self.env }
    }

    pub fn dz_value(&self, r: f64, vt: f64, ev: &EnvVals) -> f64 {
        if self.e.is_zero() {
            return 0.0;
        }
        self.e.eval(r, vt) * ev.dz(self.env)
    }

    pub fn dt_value(&self, r: f64, vt: f64, ev: &EnvVals) -> f64 {
        if self.e.is_zero() {
            return 0.0;
        }
        self.e.eval(r, vt) * ev.dt(self.env)
    }

    pub fn scaled(&self, s: f64) -> Component {
        Component { e: &self.e * s, env: self.env }
    }
}

/// Cylindrical vector field `(r, θ, z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VecField {
    pub r: Component,
    pub th: Component,
    pub z: Component,
}

/// Divergence and curl of a cylindrical vector field at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivCurl {
    pub div: f64,
    pub curl: [f64; 3],
    /// Largest single term entering the expressions.
    pub scale: f64,
}

impl VecField {
    pub fn values(&self, r: f64, vt: f64, ev: &EnvVals) -> [f64; 3] {
        [self.r.value(r, vt, ev), self.th.value(r, vt, ev), self.z.value(r, vt, ev)]
    }

    pub fn scaled(&self, s: f64) -> VecField {
        VecField { r: self.r.scaled(s), th: self.th.scaled(s), z: self.z.scaled(s) }
    }

    pub fn div_curl(&self, r: f64, vt: f64, ev: &EnvVals) -> DivCurl {
        let [fr, fth, _] = self.values(r, vt, ev);
        let drr = self.r.d_r().value(r, vt, ev);
        let drth = self.th.d_r().value(r, vt, ev);
        let drz = self.z.d_r().value(r, vt, ev);
        let dthr = self.r.d_theta().value(r, vt, ev);
        let dthth = self.th.d_theta().value(r, vt, ev);
        let dthz = self.z.d_theta().value(r, vt, ev);
        let dzr = self.r.dz_value(r, vt, ev);
        let dzth = self.th.dz_value(r, vt, ev);
        let dzz = self.z.dz_value(r, vt, ev);
        let terms = [fr / r, drr, dthth / r, dzz, dthz / r, dzth, dzr, drz, fth / r, drth, dthr / r];
        DivCurl {
            div: fr / r + drr + dthth / r + dzz,
            curl: [dthz / r - dzth, dzr - drz, (fth + r * drth - dthr) / r],
            scale: terms.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        }
    }

    pub fn dt_values(&self, r: f64, vt: f64, ev: &EnvVals) -> [f64; 3] {
        [self.r.dt_value(r, vt, ev), self.th.dt_value(r, vt, ev), self.z.dt_value(r, vt, ev)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_r(e: &Expr, r: f64, vt: f64) -> f64 {
        let h = 1e-5 * r;
        (e.eval(r + h, vt) - e.eval(r - h, vt)) / (2.0 * h)
    }

    #[test]
    fn radial_derivative_matches_difference() {
        let e = Expr::j(1.3, 2, 2.1, Angular::cos(2)) + Expr::y(-0.4, 1, 0.7, Angular::sin(1)).times_r_pow(-1)
            + Expr::term(0.8, 2, Radial::Log { r0: 0.5 }, Angular::ONE);
        for &(r, vt) in &[(0.7, 0.3), (1.9, 2.0), (3.1, -1.0)] {
            let a = e.d_r().eval(r, vt);
            let b = fd_r(&e, r, vt);
            assert!((a - b).abs() < 1e-8 * (1.0 + a.abs()), "{a} {b}");
        }
    }

    #[test]
    fn theta_derivative() {
        let e = Expr::j(1.0, 3, 1.0, Angular::cos(3)) + Expr::constant(2.0, Angular::sin(2));
        let vt = 0.4;
        let h = 1e-6;
        let fd = (e.eval(1.2, vt + h) - e.eval(1.2, vt - h)) / (2.0 * h);
        assert!((e.d_theta().eval(1.2, vt) - fd).abs() < 1e-8);
    }

    #[test]
    fn axis_limits() {
        let k = 2.0;
        let e = Expr::j(1.0, 1, k, Angular::ONE).times_r_pow(-1);
        assert!((e.eval(0.0, 0.0) - 1.0).abs() < 1e-15);
        let e = Expr::j(1.0, 2, k, Angular::ONE).times_r_pow(-1);
        assert_eq!(e.eval(0.0, 0.0), 0.0);
        let e = Expr::j(1.0, -1, k, Angular::ONE).times_r_pow(-1);
        assert!((e.eval(0.0, 0.0) + 1.0).abs() < 1e-15);
        assert!(Expr::y(1.0, 0, k, Angular::ONE).eval(0.0, 0.0).is_nan());
    }

    #[test]
    fn sin_zero_vanishes() {
        let e = Expr::j(1.0, 0, 1.0, Angular::sin(0));
        assert!(e.is_zero());
        assert!(Expr::constant(1.0, Angular::cos(0)).d_theta().is_zero());
    }

    #[test]
    fn like_terms_merge() {
        let e = Expr::j(1.0, 0, 1.0, Angular::ONE) + Expr::j(2.0, 0, 1.0, Angular::ONE);
        assert_eq!(e.terms().len(), 1);
        assert_eq!(e.terms()[0].c, 3.0);
    }
}
