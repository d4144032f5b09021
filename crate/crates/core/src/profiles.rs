//! The Page constant `a` and the radial profile functions `V(r)`, `f(r)`.
//!
//! All derivatives are closed-form. Writing `s = cos²r`, both profiles are
//! rational in `s`, so the chain rule through `s' = -sin 2r`,
//! `s'' = -2 cos 2r` gives exact first and second derivatives.

use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::numerics::{self, NumericsError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProfileError {
    #[error("quartic bracket check failed: p(0) = {p0}, p(1) = {p1}")]
    Bracket { p0: f64, p1: f64 },
    #[error("r = {0} is outside [0, pi]")]
    OutOfRange(f64),
    #[error("derivative order {0} not supported (0, 1 or 2)")]
    Order(u8),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// `p(x) = x⁴ + 4x³ − 6x² + 12x − 3`, whose root in (0, 1) is the Page constant.
pub fn page_quartic(x: f64) -> f64 {
    (((x + 4.0) * x - 6.0) * x + 12.0) * x - 3.0
}

pub fn page_quartic_derivative(x: f64) -> f64 {
    ((4.0 * x + 12.0) * x - 12.0) * x + 12.0
}

/// Root of the Page quartic in (0, 1), bisection-bracketed and Newton-polished.
pub fn solve_page_constant() -> Result<f64, ProfileError> {
    let (p0, p1) = (page_quartic(0.0), page_quartic(1.0));
    if !(p0 * p1 < 0.0) {
        return Err(ProfileError::Bracket { p0, p1 });
    }
    Ok(numerics::find_root_newton(page_quartic, page_quartic_derivative, 0.0, 1.0, 1e-15)?)
}

/// A value together with its first two derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub fn get(&self, order: u8) -> Option<f64> {
        match order {
            0 => Some(self.value),
            1 => Some(self.d1),
            2 => Some(self.d2),
            _ => None,
        }
    }

    /// Jet of `sqrt(self)`; requires a positive value.
    pub fn sqrt(&self) -> Jet {
        let value = self.value.sqrt();
        let d1 = self.d1 / (2.0 * value);
        let d2 = (self.d2 - 2.0 * d1 * d1) / (2.0 * value);
        Jet { value, d1, d2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProfileName {
    V,
    F,
}

impl std::str::FromStr for ProfileName {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "V" | "v" => Ok(ProfileName::V),
            "f" | "F" => Ok(ProfileName::F),
            other => Err(format!("unknown profile {other:?} (expected V or f)")),
        }
    }
}

/// Location and value of the extrema of a profile on `[0, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extrema {
    pub argmin: f64,
    pub min: f64,
    pub argmax: f64,
    pub max: f64,
}

/// The solved Page constant with the profile functions built from it.
///
/// Immutable once constructed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileSet {
    pub a: f64,
    pub a2: f64,
    pub a4: f64,
    /// `C = (2 / (3 + a²))²` as printed.
    pub c: f64,
    /// `3 + 6a² − a⁴`, the denominator of `f`.
    f_denominator: f64,
}

impl ProfileSet {
    pub fn new() -> Result<Self, ProfileError> {
        Ok(Self::with_constant(solve_page_constant()?))
    }

    /// Profiles for an explicit `a`; used by tests that perturb the constant.
    pub fn with_constant(a: f64) -> Self {
        let a2 = a * a;
        let a4 = a2 * a2;
        let c = (2.0 / (3.0 + a2)).powi(2);
        Self { a, a2, a4, c, f_denominator: 3.0 + 6.0 * a2 - a4 }
    }

    /// `D = sqrt(C)`.
    pub fn d(&self) -> f64 {
        self.c.sqrt()
    }

    pub fn v_jet(&self, r: f64) -> Jet {
        let (sin, cos) = r.sin_cos();
        let s = cos * cos;
        let s1 = -2.0 * sin * cos;
        let s2 = -2.0 * (cos * cos - sin * sin);
        let a2 = self.a2;
        let num = 1.0 - a2 * s;
        let den = 3.0 - a2 - a2 * (1.0 + a2) * s;
        let v_s = -2.0 * a2 * (1.0 - a2) / (den * den);
        let v_ss = -4.0 * self.a4 * (1.0 - a2) * (1.0 + a2) / (den * den * den);
        Jet { value: num / den, d1: v_s * s1, d2: v_ss * s1 * s1 + v_s * s2 }
    }

    pub fn f_jet(&self, r: f64) -> Jet {
        let (sin, cos) = r.sin_cos();
        let s = cos * cos;
        let s1 = -2.0 * sin * cos;
        let s2 = -2.0 * (cos * cos - sin * sin);
        let k = 4.0 / self.f_denominator;
        Jet { value: k * (1.0 - self.a2 * s), d1: -k * self.a2 * s1, d2: -k * self.a2 * s2 }
    }

    /// `U = sqrt(V)`.
    pub fn u_jet(&self, r: f64) -> Jet {
        self.v_jet(r).sqrt()
    }

    /// `h = sqrt(f)`.
    pub fn h_jet(&self, r: f64) -> Jet {
        self.f_jet(r).sqrt()
    }

    pub fn v(&self, r: f64) -> f64 {
        self.v_jet(r).value
    }

    pub fn f(&self, r: f64) -> f64 {
        self.f_jet(r).value
    }

    pub fn eval_profile(&self, name: ProfileName, r: f64, order: u8) -> Result<f64, ProfileError> {
        if !(0.0..=PI).contains(&r) {
            return Err(ProfileError::OutOfRange(r));
        }
        let jet = match name {
            ProfileName::V => self.v_jet(r),
            ProfileName::F => self.f_jet(r),
        };
        jet.get(order).ok_or(ProfileError::Order(order))
    }

    pub fn profile_extrema(&self, name: ProfileName) -> Extrema {
        let eval = |r: f64| match name {
            ProfileName::V => self.v(r),
            ProfileName::F => self.f(r),
        };
        let (argmin, min) = numerics::minimize_on_interval(eval, 0.0, PI, 721, 1e-12);
        let (argmax, neg_max) = numerics::minimize_on_interval(|r| -eval(r), 0.0, PI, 721, 1e-12);
        Extrema { argmin, min, argmax, max: -neg_max }
    }
}
