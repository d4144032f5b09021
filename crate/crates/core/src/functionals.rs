//! Volume, the normalized Einstein–Hilbert functional and the reference
//! values it is compared with.

use std::f64::consts::PI;

use serde::Serialize;

use crate::geometry::PageMetric;
use crate::numerics::{self, NumericsError, QuadratureResult, Rect};
use crate::profiles::ProfileSet;

/// `π⁴/4 · (a⁴ − 4a² + 16) / ((a² + 3)² (3 + 6a² − a⁴)²)`, as printed.
pub fn volume_closed_form(p: &ProfileSet) -> f64 {
    let dn = 3.0 + 6.0 * p.a2 - p.a4;
    PI.powi(4) / 4.0 * (p.a4 - 4.0 * p.a2 + 16.0) / ((p.a2 + 3.0).powi(2) * dn * dn)
}

/// Exact `∫ √det G` for the given normalization:
/// `16π² √C_fib (3 − a²) / (3 (3 + 6a² − a⁴))`.
pub fn volume_exact(metric: &PageMetric) -> f64 {
    let p = metric.profiles();
    let dn = 3.0 + 6.0 * p.a2 - p.a4;
    2.0 * PI * PI * metric.fiber_sqrt() * 8.0 * (3.0 - p.a2) / (3.0 * dn)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VolumeReport {
    pub closed_form: f64,
    /// `∫ √det G` by 2D adaptive quadrature over `(r, θ)` times the exact
    /// angular factor `8π²`.
    pub quadrature: QuadratureResult,
    /// The displayed volume-form coefficient `(C/64) f² sin²r sin²θ`,
    /// integrated the same way.
    pub printed_integrand: QuadratureResult,
}

pub fn page_volume(metric: &PageMetric, tol: f64) -> Result<VolumeReport, NumericsError> {
    let angular = 8.0 * PI * PI;
    let rect = Rect::new(0.0, PI, 0.0, PI);
    let scale = |q: QuadratureResult| QuadratureResult {
        value: angular * q.value,
        error_estimate: angular * q.error_estimate,
        evaluations: q.evaluations,
    };
    let quadrature = numerics::integrate_2d(|r, t| metric.volume_density(r, t), rect, tol / angular)?;
    let p = metric.profiles();
    let printed_integrand = numerics::integrate_2d(
        |r, t| p.c / 64.0 * p.f(r).powi(2) * (r.sin() * t.sin()).powi(2),
        rect,
        tol / angular,
    )?;
    Ok(VolumeReport {
        closed_form: volume_closed_form(p),
        quadrature: scale(quadrature),
        printed_integrand: scale(printed_integrand),
    })
}

/// `6(1 + a²) π² √(a⁴ − 4a² + 16) / ((a² + 3)(3 + 6a² − a⁴))`, as printed.
pub fn einstein_hilbert_displayed(p: &ProfileSet) -> f64 {
    let dn = 3.0 + 6.0 * p.a2 - p.a4;
    6.0 * (1.0 + p.a2) * PI * PI * (p.a4 - 4.0 * p.a2 + 16.0).sqrt() / ((p.a2 + 3.0) * dn)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EinsteinHilbert {
    pub scalar_curvature: f64,
    /// `R · √Vol` with the closed-form volume.
    pub from_closed_volume: f64,
    pub displayed: f64,
    /// `R · √Vol` with the exact volume of the metric in use.
    pub from_exact_volume: f64,
}

/// For constant scalar curvature `E(g) = Vol^{−1/2} ∫ R dV = R √Vol`.
pub fn einstein_hilbert_page(metric: &PageMetric) -> EinsteinHilbert {
    let p = metric.profiles();
    let scalar_curvature = 12.0 * (1.0 + p.a2);
    EinsteinHilbert {
        scalar_curvature,
        from_closed_volume: scalar_curvature * volume_closed_form(p).sqrt(),
        displayed: einstein_hilbert_displayed(p),
        from_exact_volume: scalar_curvature * volume_exact(metric).sqrt(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceBounds {
    /// `E` of the round 4-sphere, `24π √(2/3)`.
    pub aubin: f64,
    /// `12√2 π`, the Fubini–Study value of CP².
    pub conjectured: f64,
}

pub fn reference_bounds() -> ReferenceBounds {
    ReferenceBounds { aubin: 24.0 * PI * (2.0f64 / 3.0).sqrt(), conjectured: 12.0 * 2.0f64.sqrt() * PI }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OtobaValue {
    pub scalar_curvature: f64,
    pub beta: f64,
    pub k_squared: f64,
    pub action: f64,
}

/// `β = (8 − R)/2`, `k² = (1 + β/√(2 + β²))/2`, `E = 2·2^{1/4} π R √(arcsin k)`.
pub fn otoba_action(r: f64) -> OtobaValue {
    let beta = (8.0 - r) / 2.0;
    let k_squared = 0.5 * (1.0 + beta / (2.0 + beta * beta).sqrt());
    let action = 2.0 * 2.0f64.powf(0.25) * PI * r * k_squared.sqrt().asin().sqrt();
    OtobaValue { scalar_curvature: r, beta, k_squared, action }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OtobaScan {
    pub samples: Vec<(f64, f64)>,
    /// Consecutive sample pairs `(R_i, R_{i+1})` where the action fails to
    /// increase.
    pub violations: Vec<(f64, f64)>,
}

impl OtobaScan {
    pub fn is_increasing(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `n` evenly spaced samples on `[r_min, r_max]`, with monotonicity check.
pub fn otoba_scan(r_min: f64, r_max: f64, n: usize) -> OtobaScan {
    let step = if n > 1 { (r_max - r_min) / (n - 1) as f64 } else { 0.0 };
    let samples: Vec<(f64, f64)> =
        (0..n).map(|i| r_min + step * i as f64).map(|r| (r, otoba_action(r).action)).collect();
    let violations = samples.windows(2).filter(|w| w[1].1 <= w[0].1).map(|w| (w[0].0, w[1].0)).collect();
    OtobaScan { samples, violations }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionalReport {
    pub volume_closed: f64,
    pub volume_quadrature: f64,
    pub volume_quadrature_error: f64,
    pub volume_printed_integrand: f64,
    pub scalar_curvature: f64,
    pub einstein_hilbert: f64,
    pub einstein_hilbert_displayed: f64,
    pub einstein_hilbert_exact_volume: f64,
    pub aubin_bound: f64,
    pub conjectured_yamabe: f64,
    pub otoba_samples: Vec<(f64, f64)>,
    /// Quoted theory, not a computation.
    pub yamabe_minimizer_citation: &'static str,
}

pub fn functional_report(metric: &PageMetric, otoba_r: &[f64]) -> Result<FunctionalReport, NumericsError> {
    let vol = page_volume(metric, 1e-10)?;
    let eh = einstein_hilbert_page(metric);
    let bounds = reference_bounds();
    Ok(FunctionalReport {
        volume_closed: vol.closed_form,
        volume_quadrature: vol.quadrature.value,
        volume_quadrature_error: vol.quadrature.error_estimate,
        volume_printed_integrand: vol.printed_integrand.value,
        scalar_curvature: eh.scalar_curvature,
        einstein_hilbert: eh.from_closed_volume,
        einstein_hilbert_displayed: eh.displayed,
        einstein_hilbert_exact_volume: eh.from_exact_volume,
        aubin_bound: bounds.aubin,
        conjectured_yamabe: bounds.conjectured,
        otoba_samples: otoba_r.iter().map(|&r| (r, otoba_action(r).action)).collect(),
        yamabe_minimizer_citation: "Einstein metrics are Yamabe minimizers in their conformal class (Obata)",
    })
}
