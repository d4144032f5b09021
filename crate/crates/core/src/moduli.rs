//! Flat tori inside the Page space: lattice invariants, points of the
//! Teichmüller upper half-plane, and reduction to the PSL(2, ℤ)
//! fundamental domain.
//!
//! Lattice convention: the ψ-cycle (period 4π) is the first lattice vector
//! and lies along the positive real axis; the second cycle sits at the
//! angle between the two cycle directions, so `τ = (L₂ / L_ψ) e^{iΘ}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::geometry::{ChartPoint, Coord, GeometryError, PageMetric};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModuliError {
    #[error("parameter {name} = {value} must lie in the open interval (0, π)")]
    Degenerate { name: &'static str, value: f64 },
    #[error("zero-length lattice vector")]
    ZeroCycle,
    #[error("τ = {0} is not in the upper half-plane")]
    LowerHalfPlane(Complex64),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

fn open_unit(name: &'static str, value: f64) -> Result<(), ModuliError> {
    if value > 0.0 && value < PI {
        Ok(())
    } else {
        Err(ModuliError::Degenerate { name, value })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TorusLattice {
    /// Length of the ψ-cycle.
    pub l_psi: f64,
    /// Length of the second cycle (φ for S1, θ for S3).
    pub l_other: f64,
    pub other_cycle: Coord,
    /// Cosine of the angle between the cycle directions, from the induced
    /// metric.
    pub cos_angle: f64,
    /// The printed cosine formula (S1 only; equals `cos_angle` for S3).
    pub cos_paper: f64,
    /// The printed radius function (S1) or conformal coefficient (S3).
    pub r_paper: f64,
}

impl TorusLattice {
    /// Lattice with explicit lengths and angle, mainly for tests.
    pub fn from_cycles(l_psi: f64, l_other: f64, cos_angle: f64) -> Self {
        Self { l_psi, l_other, other_cycle: Coord::Phi, cos_angle, cos_paper: cos_angle, r_paper: f64::NAN }
    }
}

/// `C⁻¹ f V sin⁻² r`, with the printed constant `C`.
fn printed_ratio(metric: &PageMetric, r0: f64) -> f64 {
    let p = metric.profiles();
    p.f(r0) * p.v(r0) / (p.c * r0.sin().powi(2))
}

/// The ψφ torus through `(r₀, θ₀)`.
pub fn torus_invariants_s1(metric: &PageMetric, r0: f64, theta0: f64) -> Result<TorusLattice, ModuliError> {
    open_unit("r0", r0)?;
    open_unit("theta0", theta0)?;
    let g = metric.metric_components(&ChartPoint::new(r0, 0.0, 0.0, theta0)?.vector());
    let (g_pp, g_ss, g_ps) = (g[(1, 1)], g[(2, 2)], g[(1, 2)]);
    let x = printed_ratio(metric, r0);
    let (st, ct) = theta0.sin_cos();
    Ok(TorusLattice {
        l_psi: 4.0 * PI * g_ss.sqrt(),
        l_other: 2.0 * PI * g_pp.sqrt(),
        other_cycle: Coord::Phi,
        cos_angle: g_ps / (g_pp * g_ss).sqrt(),
        cos_paper: ct / (x * (st / ct).powi(2) + 1.0).sqrt(),
        r_paper: 0.5 * (x * st * st + ct * ct),
    })
}

/// The ψθ torus at `r₀` (θ taken with period 2π).
pub fn torus_invariants_s3(metric: &PageMetric, r0: f64) -> Result<TorusLattice, ModuliError> {
    open_unit("r0", r0)?;
    let p = metric.profiles();
    Ok(TorusLattice {
        l_psi: 4.0 * PI * metric.fiber_coefficient(r0).sqrt(),
        l_other: 2.0 * PI * (p.f(r0) / 4.0).sqrt(),
        other_cycle: Coord::Theta,
        cos_angle: 0.0,
        cos_paper: 0.0,
        r_paper: s3_conformal_coefficient(metric, r0),
    })
}

/// `C sin² r / (f V)` with the printed constant `C`.
pub fn s3_conformal_coefficient(metric: &PageMetric, r: f64) -> f64 {
    1.0 / printed_ratio(metric, r)
}

pub fn teichmuller_point(lat: &TorusLattice) -> Result<Complex64, ModuliError> {
    if !(lat.l_psi > 0.0) || !(lat.l_other > 0.0) {
        return Err(ModuliError::ZeroCycle);
    }
    let cos = lat.cos_angle.clamp(-1.0, 1.0);
    let tau = lat.l_other / lat.l_psi * Complex64::new(cos, (1.0 - cos * cos).sqrt());
    if tau.im > 0.0 {
        Ok(tau)
    } else {
        Err(ModuliError::LowerHalfPlane(tau))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Generator {
    /// `z ↦ z + n`
    T(i64),
    /// `z ↦ −1/z`
    S,
}

impl Generator {
    pub fn apply(self, z: Complex64) -> Complex64 {
        match self {
            Generator::T(n) => z + n as f64,
            Generator::S => -z.inv(),
        }
    }

    pub fn inverse(self) -> Self {
        match self {
            Generator::T(n) => Generator::T(-n),
            Generator::S => Generator::S,
        }
    }
}

/// Moves applied in order.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Word(pub Vec<Generator>);

impl Word {
    pub fn apply(&self, z: Complex64) -> Complex64 {
        self.0.iter().fold(z, |z, g| g.apply(z))
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|g| g.inverse()).collect())
    }
}

/// Tolerance for deciding that a point sits on the unit circle.
const ARC_TOL: f64 = 1e-14;

/// Reduce into `{|Re z| ≤ ½, |z| ≥ 1}` with the canonical boundary choice
/// `Re z ∈ [−½, ½)` and `Re z ≤ 0` on the unit arc.
pub fn reduce_to_fundamental_domain(tau: Complex64) -> Result<(Complex64, Word), ModuliError> {
    if !(tau.im > 0.0) || !tau.re.is_finite() {
        return Err(ModuliError::LowerHalfPlane(tau));
    }
    let mut z = tau;
    let mut word = Vec::new();
    // each S-move strictly increases Im z, so this terminates; the bound
    // only guards against non-finite input slipping through
    for _ in 0..10_000 {
        let n = (z.re + 0.5).floor();
        if n != 0.0 {
            z.re -= n;
            word.push(Generator::T(-(n as i64)));
        }
        if z.norm_sqr() < 1.0 - ARC_TOL {
            z = Generator::S.apply(z);
            word.push(Generator::S);
        } else {
            break;
        }
    }
    if (z.norm_sqr() - 1.0).abs() <= ARC_TOL && z.re > ARC_TOL {
        z = Generator::S.apply(z);
        word.push(Generator::S);
    }
    Ok((z, Word(word)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct S1Row {
    pub r0: f64,
    pub theta0: f64,
    pub r_paper: f64,
    pub cos_paper: f64,
    pub cos_metric: f64,
    pub tau: Complex64,
    pub tau_reduced: Complex64,
}

/// Interior grid `π (i + 1) / (n + 1)`, `i = 0 … n − 1`.
pub fn interior_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| PI * (i + 1) as f64 / (n + 1) as f64).collect()
}

pub fn scan_s1(metric: &PageMetric, n_r: usize, n_theta: usize) -> Result<Vec<S1Row>, ModuliError> {
    let mut rows = Vec::with_capacity(n_r * n_theta);
    for &r0 in &interior_grid(n_r) {
        for &theta0 in &interior_grid(n_theta) {
            let lat = torus_invariants_s1(metric, r0, theta0)?;
            let tau = teichmuller_point(&lat)?;
            let (tau_reduced, _) = reduce_to_fundamental_domain(tau)?;
            rows.push(S1Row {
                r0,
                theta0,
                r_paper: lat.r_paper,
                cos_paper: lat.cos_paper,
                cos_metric: lat.cos_angle,
                tau,
                tau_reduced,
            });
        }
    }
    Ok(rows)
}

/// For S3 the reported "height" is ambiguous; all three candidate readings
/// are emitted as points `i·h` on the imaginary axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct S3Row {
    pub r0: f64,
    /// `C sin² r / (f V)`.
    pub coefficient: f64,
    pub sqrt_coefficient: f64,
    /// `L_θ / L_ψ` for the lattice of the metric in use.
    pub period_ratio: f64,
    pub tau: Complex64,
    pub tau_reduced: Complex64,
    pub coefficient_reduced: Complex64,
    pub sqrt_coefficient_reduced: Complex64,
}

pub fn scan_s3(metric: &PageMetric, n_r: usize) -> Result<Vec<S3Row>, ModuliError> {
    interior_grid(n_r)
        .into_iter()
        .map(|r0| {
            let lat = torus_invariants_s3(metric, r0)?;
            let tau = teichmuller_point(&lat)?;
            let reduce = |h: f64| reduce_to_fundamental_domain(Complex64::new(0.0, h)).map(|(z, _)| z);
            Ok(S3Row {
                r0,
                coefficient: lat.r_paper,
                sqrt_coefficient: lat.r_paper.sqrt(),
                period_ratio: tau.im,
                tau,
                tau_reduced: reduce_to_fundamental_domain(tau)?.0,
                coefficient_reduced: reduce(lat.r_paper)?,
                sqrt_coefficient_reduced: reduce(lat.r_paper.sqrt())?,
            })
        })
        .collect()
}
