//! The Page metric in Euler coordinates `(r, φ, ψ, θ)`.
//!
//! Holds the metric matrix, the orthonormal coframe
//!
//! ```text
//! e⁰ = U dr
//! e¹ = ½ h sinθ dφ
//! e² = ½ U⁻¹ D sin r (dψ + cosθ dφ)
//! e³ = ½ h dθ
//! ```
//!
//! with closed-form first and second coordinate derivatives, and an
//! independent finite-difference Christoffel/Riemann oracle that only ever
//! looks at metric components.

use std::f64::consts::PI;

use nalgebra::{Matrix4, Vector4};
use serde::Serialize;
use thiserror::Error;

use crate::connection::{Coframe, MetricField};
use crate::profiles::ProfileSet;

pub type Mat4 = Matrix4<f64>;
pub type Vec4 = Vector4<f64>;
/// `t[i][j][k]`, first index up.
pub type Array3 = [[[f64; 4]; 4]; 4];
/// `t[i][j][k][l]`, first index up.
pub type Array4 = [[[[f64; 4]; 4]; 4]; 4];

/// Margin from the collapsing loci `r, θ ∈ {0, π}` inside which inverse
/// vierbein operations are refused.
pub const DEGENERATE_MARGIN: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("{coord} = {value} outside its chart range")]
    OutOfRange { coord: &'static str, value: f64 },
    #[error("point (r = {r}, θ = {theta}) is within {margin} of a degenerate locus")]
    Degenerate { r: f64, theta: f64, margin: f64 },
    #[error("step {0} must be positive")]
    InvalidStep(f64),
}

/// Coordinate labels in chart order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Coord {
    R = 0,
    Phi = 1,
    Psi = 2,
    Theta = 3,
}

impl Coord {
    pub const ALL: [Coord; 4] = [Coord::R, Coord::Phi, Coord::Psi, Coord::Theta];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Coord::R => "r",
            Coord::Phi => "phi",
            Coord::Psi => "psi",
            Coord::Theta => "theta",
        }
    }

    /// Coordinate period, or the closed range length for `r` and `θ`.
    pub fn range(self) -> (f64, f64) {
        match self {
            Coord::R | Coord::Theta => (0.0, PI),
            Coord::Phi => (0.0, 2.0 * PI),
            Coord::Psi => (0.0, 4.0 * PI),
        }
    }
}

/// A point of the Euler-coordinate chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChartPoint {
    pub r: f64,
    pub phi: f64,
    pub psi: f64,
    pub theta: f64,
}

impl ChartPoint {
    pub fn new(r: f64, phi: f64, psi: f64, theta: f64) -> Result<Self, GeometryError> {
        let p = Self { r, phi, psi, theta };
        for (coord, value) in Coord::ALL.iter().zip(p.coords()) {
            let (lo, hi) = coord.range();
            let closed = matches!(coord, Coord::R | Coord::Theta);
            let ok = value >= lo && if closed { value <= hi } else { value < hi };
            if !ok || !value.is_finite() {
                return Err(GeometryError::OutOfRange { coord: coord.name(), value });
            }
        }
        Ok(p)
    }

    pub fn from_coords(x: [f64; 4]) -> Result<Self, GeometryError> {
        Self::new(x[0], x[1], x[2], x[3])
    }

    pub fn coords(&self) -> [f64; 4] {
        [self.r, self.phi, self.psi, self.theta]
    }

    pub fn vector(&self) -> Vec4 {
        Vec4::from(self.coords())
    }

    /// Distance of `r` and `θ` from the nearest collapsing locus.
    pub fn degeneracy_distance(&self) -> f64 {
        self.r.min(PI - self.r).min(self.theta).min(PI - self.theta)
    }

    pub fn is_degenerate(&self) -> bool {
        self.degeneracy_distance() < DEGENERATE_MARGIN
    }

    pub fn require_margin(&self, margin: f64) -> Result<(), GeometryError> {
        if self.degeneracy_distance() < margin.max(DEGENERATE_MARGIN) {
            Err(GeometryError::Degenerate { r: self.r, theta: self.theta, margin })
        } else {
            Ok(())
        }
    }
}

/// Which constant multiplies the Hopf-fiber term `sin²r / V · σ₃²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// `(1 / (3 + a²))²`: the fiber constant for which the metric is
    /// Einstein with scalar curvature `12(1 + a²)` and closes up smoothly
    /// where the ψ-circles collapse.
    #[default]
    Einstein,
    /// `C = (2 / (3 + a²))²` exactly as printed alongside the profiles.
    AsPrinted,
}

impl std::str::FromStr for Normalization {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "einstein" => Ok(Normalization::Einstein),
            "printed" | "as-printed" => Ok(Normalization::AsPrinted),
            other => Err(format!("unknown normalization {other:?} (einstein|printed)")),
        }
    }
}

impl std::fmt::Display for Normalization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Normalization::Einstein => "einstein",
            Normalization::AsPrinted => "printed",
        })
    }
}

/// Metric and vierbein at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricAtPoint {
    pub g: Mat4,
    /// Rows are the coframe `eᵃ` in the basis `(dr, dφ, dψ, dθ)`; `None` at
    /// degenerate points.
    pub e: Option<Mat4>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Determinant {
    pub direct: f64,
    pub closed_form: f64,
}

/// The Page metric for a fixed profile set and fiber normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct PageMetric {
    profiles: ProfileSet,
    normalization: Normalization,
    fiber_constant: f64,
}

impl PageMetric {
    pub fn new(profiles: ProfileSet, normalization: Normalization) -> Self {
        let fiber_constant = match normalization {
            Normalization::Einstein => 0.25 * profiles.c,
            Normalization::AsPrinted => profiles.c,
        };
        Self { profiles, normalization, fiber_constant }
    }

    pub fn einstein(profiles: ProfileSet) -> Self {
        Self::new(profiles, Normalization::Einstein)
    }

    pub fn as_printed(profiles: ProfileSet) -> Self {
        Self::new(profiles, Normalization::AsPrinted)
    }

    pub fn profiles(&self) -> &ProfileSet {
        &self.profiles
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    /// The constant multiplying `sin²r / (4V)` in `g_ψψ`.
    pub fn fiber_constant(&self) -> f64 {
        self.fiber_constant
    }

    /// Square root of [`Self::fiber_constant`]; plays the role of `D`.
    pub fn fiber_sqrt(&self) -> f64 {
        self.fiber_constant.sqrt()
    }

    /// `C_fib sin²r / (4V)`, the coefficient of `dψ²`.
    pub fn fiber_coefficient(&self, r: f64) -> f64 {
        self.fiber_constant * r.sin().powi(2) / (4.0 * self.profiles.v(r))
    }

    /// Metric components straight from the displayed coordinate expression.
    pub fn metric_components(&self, x: &Vec4) -> Mat4 {
        let (r, theta) = (x[0], x[3]);
        let v = self.profiles.v(r);
        let f = self.profiles.f(r);
        let (sin_t, cos_t) = theta.sin_cos();
        let fib = self.fiber_constant * r.sin().powi(2) / (4.0 * v);
        let mut g = Mat4::zeros();
        g[(0, 0)] = v;
        g[(1, 1)] = 0.25 * f * sin_t * sin_t + fib * cos_t * cos_t;
        g[(2, 2)] = fib;
        g[(1, 2)] = fib * cos_t;
        g[(2, 1)] = fib * cos_t;
        g[(3, 3)] = 0.25 * f;
        g
    }

    pub fn metric_matrix(&self, p: &ChartPoint) -> MetricAtPoint {
        let x = p.vector();
        let g = self.metric_components(&x);
        let e = (!p.is_degenerate()).then(|| self.coframe_matrix(&x));
        MetricAtPoint { g, e }
    }

    pub fn metric_determinant(&self, p: &ChartPoint) -> Determinant {
        let g = self.metric_components(&p.vector());
        let f = self.profiles.f(p.r);
        let closed_form =
            self.fiber_constant / 64.0 * f * f * (p.r.sin() * p.theta.sin()).powi(2);
        Determinant { direct: g.determinant(), closed_form }
    }

    /// Riemannian volume density `sqrt(det G) = (√C_fib / 8) f sin r sinθ`.
    pub fn volume_density(&self, r: f64, theta: f64) -> f64 {
        self.fiber_sqrt() / 8.0 * self.profiles.f(r) * (r.sin() * theta.sin()).abs()
    }

    /// Scalar curvature `12(1 + a²)` of the Einstein-normalized metric.
    pub fn einstein_scalar(&self) -> f64 {
        12.0 * (1.0 + self.profiles.a2)
    }

    fn fiber_jet(&self, r: f64) -> (f64, f64, f64) {
        // k(r) = ½ D_f sin r / U and its first two derivatives
        let u = self.profiles.u_jet(r);
        let half_d = 0.5 * self.fiber_sqrt();
        let (s, c) = r.sin_cos();
        let w = s / u.value;
        let w1 = c / u.value - s * u.d1 / (u.value * u.value);
        let w2 = -s / u.value - 2.0 * c * u.d1 / u.value.powi(2) - s * u.d2 / u.value.powi(2)
            + 2.0 * s * u.d1 * u.d1 / u.value.powi(3);
        (half_d * w, half_d * w1, half_d * w2)
    }

    fn coframe_matrix(&self, x: &Vec4) -> Mat4 {
        let (r, theta) = (x[0], x[3]);
        let u = self.profiles.u_jet(r).value;
        let h = self.profiles.h_jet(r).value;
        let (k, _, _) = self.fiber_jet(r);
        let (st, ct) = theta.sin_cos();
        let mut e = Mat4::zeros();
        e[(0, 0)] = u;
        e[(1, 1)] = 0.5 * h * st;
        e[(2, 1)] = k * ct;
        e[(2, 2)] = k;
        e[(3, 3)] = 0.5 * h;
        e
    }

    /// Finite-difference Christoffel symbols `Γⁱ_jk` from metric components.
    ///
    /// Independent of the frame pipeline: only [`Self::metric_components`]
    /// is sampled.
    pub fn coordinate_christoffels(
        &self,
        p: &ChartPoint,
        step: f64,
        richardson: bool,
    ) -> Result<Array3, GeometryError> {
        if !(step > 0.0) {
            return Err(GeometryError::InvalidStep(step));
        }
        p.require_margin(2.0 * step)?;
        Ok(self.christoffels_at(&p.vector(), step, richardson))
    }

    fn metric_partials_fd(&self, x: &Vec4, step: f64, richardson: bool) -> [Mat4; 4] {
        let diff = |k: usize, h: f64| {
            let mut dx = Vec4::zeros();
            dx[k] = h;
            (self.metric_components(&(x + dx)) - self.metric_components(&(x - dx))) / (2.0 * h)
        };
        std::array::from_fn(|k| {
            if richardson {
                (4.0 * diff(k, 0.5 * step) - diff(k, step)) / 3.0
            } else {
                diff(k, step)
            }
        })
    }

    fn christoffels_at(&self, x: &Vec4, step: f64, richardson: bool) -> Array3 {
        let dg = self.metric_partials_fd(x, step, richardson);
        let ginv = self
            .metric_components(x)
            .try_inverse()
            .expect("metric is invertible away from degenerate loci");
        let mut gamma = [[[0.0; 4]; 4]; 4];
        for (i, gi) in gamma.iter_mut().enumerate() {
            for j in 0..4 {
                for k in 0..4 {
                    let mut s = 0.0;
                    for l in 0..4 {
                        s += ginv[(i, l)] * (dg[j][(l, k)] + dg[k][(l, j)] - dg[l][(j, k)]);
                    }
                    gi[j][k] = 0.5 * s;
                }
            }
        }
        gamma
    }

    /// Coordinate Riemann tensor `Rⁱ_jkl` from nested finite differences of
    /// [`Self::coordinate_christoffels`]; `outer_step` differentiates the
    /// Christoffel symbols, which themselves use `inner_step`.
    pub fn coordinate_riemann(
        &self,
        p: &ChartPoint,
        inner_step: f64,
        outer_step: f64,
    ) -> Result<Array4, GeometryError> {
        if !(inner_step > 0.0) || !(outer_step > 0.0) {
            return Err(GeometryError::InvalidStep(inner_step.min(outer_step)));
        }
        p.require_margin(2.0 * (inner_step + outer_step))?;
        let x = p.vector();
        let gamma = self.christoffels_at(&x, inner_step, true);
        let dgamma: [Array3; 4] = std::array::from_fn(|k| {
            let stencil = |h: f64| {
                let mut dx = Vec4::zeros();
                dx[k] = h;
                let plus = self.christoffels_at(&(x + dx), inner_step, true);
                let minus = self.christoffels_at(&(x - dx), inner_step, true);
                let mut out = [[[0.0; 4]; 4]; 4];
                for i in 0..4 {
                    for j in 0..4 {
                        for l in 0..4 {
                            out[i][j][l] = (plus[i][j][l] - minus[i][j][l]) / (2.0 * h);
                        }
                    }
                }
                out
            };
            let coarse = stencil(outer_step);
            let fine = stencil(0.5 * outer_step);
            let mut out = [[[0.0; 4]; 4]; 4];
            for i in 0..4 {
                for j in 0..4 {
                    for l in 0..4 {
                        out[i][j][l] = (4.0 * fine[i][j][l] - coarse[i][j][l]) / 3.0;
                    }
                }
            }
            out
        });
        let mut riem = [[[[0.0; 4]; 4]; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        let mut s = dgamma[k][i][l][j] - dgamma[l][i][k][j];
                        for m in 0..4 {
                            s += gamma[i][k][m] * gamma[m][l][j] - gamma[i][l][m] * gamma[m][k][j];
                        }
                        riem[i][j][k][l] = s;
                    }
                }
            }
        }
        Ok(riem)
    }

    /// Residual of the geodesic equation along the radial curve through `p`
    /// parametrized by arclength (`dr/ds = 1/U`, other coordinates fixed).
    pub fn radial_geodesic_residual(&self, p: &ChartPoint, step: f64) -> Result<f64, GeometryError> {
        let gamma = self.coordinate_christoffels(p, step, true)?;
        let u = self.profiles.u_jet(p.r);
        let velocity = [1.0 / u.value, 0.0, 0.0, 0.0];
        let acceleration = [-u.d1 / u.value.powi(3), 0.0, 0.0, 0.0];
        let mut worst: f64 = 0.0;
        for mu in 0..4 {
            let mut s = acceleration[mu];
            for nu in 0..4 {
                for la in 0..4 {
                    s += gamma[mu][nu][la] * velocity[nu] * velocity[la];
                }
            }
            worst = worst.max(s.abs());
        }
        Ok(worst)
    }
}

impl Coframe<4> for PageMetric {
    fn matrix(&self, x: &Vec4) -> Mat4 {
        self.coframe_matrix(x)
    }

    fn partial(&self, x: &Vec4, k: usize) -> Mat4 {
        let (r, theta) = (x[0], x[3]);
        let mut d = Mat4::zeros();
        let (st, ct) = theta.sin_cos();
        match k {
            0 => {
                let u = self.profiles.u_jet(r);
                let h = self.profiles.h_jet(r);
                let (_, k1, _) = self.fiber_jet(r);
                d[(0, 0)] = u.d1;
                d[(1, 1)] = 0.5 * h.d1 * st;
                d[(2, 1)] = k1 * ct;
                d[(2, 2)] = k1;
                d[(3, 3)] = 0.5 * h.d1;
            }
            3 => {
                let h = self.profiles.h_jet(r).value;
                let (k0, _, _) = self.fiber_jet(r);
                d[(1, 1)] = 0.5 * h * ct;
                d[(2, 1)] = -k0 * st;
            }
            // φ and ψ are Killing directions
            _ => {}
        }
        d
    }

    fn second_partial(&self, x: &Vec4, k: usize, l: usize) -> Mat4 {
        let (r, theta) = (x[0], x[3]);
        let mut d = Mat4::zeros();
        let (st, ct) = theta.sin_cos();
        match (k.min(l), k.max(l)) {
            (0, 0) => {
                let u = self.profiles.u_jet(r);
                let h = self.profiles.h_jet(r);
                let (_, _, k2) = self.fiber_jet(r);
                d[(0, 0)] = u.d2;
                d[(1, 1)] = 0.5 * h.d2 * st;
                d[(2, 1)] = k2 * ct;
                d[(2, 2)] = k2;
                d[(3, 3)] = 0.5 * h.d2;
            }
            (0, 3) => {
                let h = self.profiles.h_jet(r);
                let (_, k1, _) = self.fiber_jet(r);
                d[(1, 1)] = 0.5 * h.d1 * ct;
                d[(2, 1)] = -k1 * st;
            }
            (3, 3) => {
                let h = self.profiles.h_jet(r).value;
                let (k0, _, _) = self.fiber_jet(r);
                d[(1, 1)] = -0.5 * h * st;
                d[(2, 1)] = -k0 * ct;
            }
            _ => {}
        }
        d
    }
}

impl MetricField<4> for PageMetric {
    fn metric(&self, x: &Vec4) -> Mat4 {
        self.metric_components(x)
    }

    fn metric_partial(&self, x: &Vec4, k: usize) -> Mat4 {
        let e = self.coframe_matrix(x);
        let de = self.partial(x, k);
        de.transpose() * e + e.transpose() * de
    }

    fn metric_second_partial(&self, x: &Vec4, k: usize, l: usize) -> Mat4 {
        let e = self.coframe_matrix(x);
        let dk = self.partial(x, k);
        let dl = self.partial(x, l);
        let dkl = self.second_partial(x, k, l);
        dkl.transpose() * e + dk.transpose() * dl + dl.transpose() * dk + e.transpose() * dkl
    }
}
