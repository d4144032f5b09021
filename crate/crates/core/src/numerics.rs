//! Shared numerical kernels: bracketed root finding, adaptive Simpson
//! quadrature in one and two dimensions, central finite differences and
//! golden-section extremum refinement.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {flo}, f(hi) = {fhi}")]
    NoSignChange { lo: f64, hi: f64, flo: f64, fhi: f64 },
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("adaptive quadrature exceeded depth {max_depth}; partial value {partial}")]
    MaxDepthExceeded { max_depth: usize, partial: f64 },
    #[error("non-finite integrand value at x = {0}")]
    NonFinite(f64),
}

/// Outcome of an adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

const MAX_BISECTIONS: usize = 400;

/// Bisection on a sign-changing bracket.
///
/// Stops as soon as `|f(x)| < tol` or the bracket has shrunk to adjacent
/// floating point numbers. Deterministic: no randomisation, no adaptive
/// step heuristics, so identical inputs give bit-identical results.
pub fn find_root<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> f64,
{
    check_bracket_args(lo, hi, tol)?;
    let (mut lo, mut hi) = (lo, hi);
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(NumericsError::NoSignChange { lo, hi, flo, fhi });
    }
    let mut best = if flo.abs() < fhi.abs() { lo } else { hi };
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fmid = f(mid);
        best = mid;
        if fmid.abs() < tol || fmid == 0.0 {
            break;
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    Ok(best)
}

/// Safeguarded Newton iteration inside a bracket.
///
/// Newton steps are taken whenever they stay inside the current bracket and
/// shrink the residual fast enough; otherwise a bisection step is taken.
/// Used for the quartic defining the Page constant, where the derivative is
/// available in closed form.
pub fn find_root_newton<F, D>(
    f: F,
    df: D,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    check_bracket_args(lo, hi, tol)?;
    let (mut lo, mut hi) = (lo, hi);
    let flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(NumericsError::NoSignChange { lo, hi, flo, fhi });
    }
    // orient so that f(lo) < 0 < f(hi)
    if flo > 0.0 {
        std::mem::swap(&mut lo, &mut hi);
    }
    let mut x = 0.5 * (lo + hi);
    let mut dx_old = (hi - lo).abs();
    let mut dx = dx_old;
    let mut fx = f(x);
    let mut dfx = df(x);
    for _ in 0..MAX_BISECTIONS {
        let newton_leaves_bracket = ((x - hi) * dfx - fx) * ((x - lo) * dfx - fx) > 0.0;
        let newton_too_slow = (2.0 * fx).abs() > (dx_old * dfx).abs();
        dx_old = dx;
        if newton_leaves_bracket || newton_too_slow {
            dx = 0.5 * (hi - lo);
            x = lo + dx;
        } else {
            dx = fx / dfx;
            x -= dx;
        }
        fx = f(x);
        dfx = df(x);
        if fx.abs() < tol || dx.abs() <= f64::EPSILON * x.abs().max(1.0) {
            // one more Newton step polishes the last bits when it is safe
            if dfx != 0.0 {
                let polished = x - fx / dfx;
                if f(polished).abs() <= fx.abs() {
                    x = polished;
                }
            }
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
    }
    Ok(x)
}

fn check_bracket_args(lo: f64, hi: f64, tol: f64) -> Result<(), NumericsError> {
    if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
        return Err(NumericsError::InvalidInterval { lo, hi });
    }
    if !(tol > 0.0) {
        return Err(NumericsError::InvalidTolerance(tol));
    }
    Ok(())
}

/// Maximum recursion depth for adaptive Simpson.
pub const DEFAULT_MAX_DEPTH: usize = 48;
const MIN_LEVEL: usize = 4;

struct Panel {
    a: f64,
    m: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
}

/// Adaptive Simpson quadrature with Richardson-corrected panels.
///
/// `tol` is an absolute tolerance on the whole integral; it is split evenly
/// between the two halves at every subdivision.
pub fn integrate_1d<F>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadratureResult, NumericsError>
where
    F: Fn(f64) -> f64,
{
    integrate_1d_with_depth(f, a, b, tol, DEFAULT_MAX_DEPTH)
}

pub fn integrate_1d_with_depth<F>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: usize,
) -> Result<QuadratureResult, NumericsError>
where
    F: Fn(f64) -> f64,
{
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(NumericsError::InvalidInterval { lo: a, hi: b });
    }
    if !(tol > 0.0) {
        return Err(NumericsError::InvalidTolerance(tol));
    }
    let eval = |x: f64| -> Result<f64, NumericsError> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(NumericsError::NonFinite(x))
        }
    };
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (eval(a)?, eval(m)?, eval(b)?);
    let whole = (b - a) * (fa + 4.0 * fm + fb) / 6.0;
    let mut evaluations = 3;
    let mut exhausted = false;
    let (value, error_estimate) = simpson_step(
        &eval,
        Panel { a, m, b, fa, fm, fb, whole },
        tol,
        (0, max_depth),
        &mut evaluations,
        &mut exhausted,
    )?;
    if exhausted {
        return Err(NumericsError::MaxDepthExceeded { max_depth, partial: value });
    }
    Ok(QuadratureResult { value, error_estimate, evaluations })
}

fn simpson_step<E>(
    eval: &E,
    p: Panel,
    tol: f64,
    (level, max_depth): (usize, usize),
    evaluations: &mut usize,
    exhausted: &mut bool,
) -> Result<(f64, f64), NumericsError>
where
    E: Fn(f64) -> Result<f64, NumericsError>,
{
    let Panel { a, m, b, fa, fm, fb, whole } = p;
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = eval(lm)?;
    let frm = eval(rm)?;
    *evaluations += 2;
    let left = (m - a) * (fa + 4.0 * flm + fm) / 6.0;
    let right = (b - m) * (fm + 4.0 * frm + fb) / 6.0;
    let delta = left + right - whole;
    // at least sixteen panels, so the first five samples cannot alias
    let forced = level < MIN_LEVEL.min(max_depth);
    let rounding_floor = 64.0 * f64::EPSILON * (left.abs() + right.abs());
    if !forced && (delta.abs() <= 15.0 * tol || delta.abs() <= rounding_floor) {
        return Ok((left + right + delta / 15.0, (delta / 15.0).abs()));
    }
    if level >= max_depth {
        *exhausted = true;
        return Ok((left + right + delta / 15.0, (delta / 15.0).abs()));
    }
    let (lv, le) = simpson_step(
        eval,
        Panel { a, m: lm, b: m, fa, fm: flm, fb: fm, whole: left },
        0.5 * tol,
        (level + 1, max_depth),
        evaluations,
        exhausted,
    )?;
    let (rv, re) = simpson_step(
        eval,
        Panel { a: m, m: rm, b, fa: fm, fm: frm, fb, whole: right },
        0.5 * tol,
        (level + 1, max_depth),
        evaluations,
        exhausted,
    )?;
    Ok((lv + rv, le + re))
}

/// Axis-aligned integration rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }
}

/// Iterated adaptive Simpson over a rectangle.
///
/// The inner integral over `x` is solved to a tighter tolerance than the
/// outer one so that its error does not masquerade as roughness in `y`.
pub fn integrate_2d<F>(f: F, rect: Rect, tol: f64) -> Result<QuadratureResult, NumericsError>
where
    F: Fn(f64, f64) -> f64,
{
    if !(tol > 0.0) {
        return Err(NumericsError::InvalidTolerance(tol));
    }
    let height = rect.y1 - rect.y0;
    if !(height > 0.0) || !(rect.x1 > rect.x0) {
        return Err(NumericsError::InvalidInterval { lo: rect.x0, hi: rect.x1 });
    }
    let inner_tol = 0.1 * tol / height;
    let evaluations = std::cell::Cell::new(0usize);
    let inner_error = std::cell::Cell::new(0.0f64);
    let failure = std::cell::RefCell::new(None);
    let outer = integrate_1d(
        |y| {
            match integrate_1d(|x| f(x, y), rect.x0, rect.x1, inner_tol) {
                Ok(q) => {
                    evaluations.set(evaluations.get() + q.evaluations);
                    inner_error.set(inner_error.get().max(q.error_estimate));
                    q.value
                }
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            }
        },
        rect.y0,
        rect.y1,
        tol,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let outer = outer?;
    Ok(QuadratureResult {
        value: outer.value,
        error_estimate: outer.error_estimate + inner_error.get() * height,
        evaluations: evaluations.get(),
    })
}

/// Central finite difference of order 1 or 2.
///
/// With `richardson` the stencil is evaluated at `step` and `step / 2` and
/// combined to cancel the leading `O(step²)` term.
pub fn central_difference<F>(f: F, x: f64, order: u8, step: f64, richardson: bool) -> f64
where
    F: Fn(f64) -> f64,
{
    let stencil = |h: f64| match order {
        1 => (f(x + h) - f(x - h)) / (2.0 * h),
        2 => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
        _ => panic!("central_difference supports order 1 or 2, got {order}"),
    };
    if richardson {
        let coarse = stencil(step);
        let fine = stencil(0.5 * step);
        (4.0 * fine - coarse) / 3.0
    } else {
        stencil(step)
    }
}

/// Golden-section search for a local minimum of `f` on `[a, b]`.
///
/// Returns `(argmin, min)`. The bracket must contain a single minimum for the
/// result to be meaningful; callers seed it from a grid scan.
pub fn golden_section_min<F>(f: F, a: f64, b: f64, tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (a, b);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    // the endpoints are candidates too: extrema of the profiles sit there
    let mid = 0.5 * (a + b);
    let mut best = (mid, f(mid));
    for x in [a, b] {
        let fx = f(x);
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Grid scan followed by golden-section refinement around the best sample.
/// Returns `(argmin, min)` over `[a, b]`, endpoints included.
pub fn minimize_on_interval<F>(f: F, a: f64, b: f64, samples: usize, tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let n = samples.max(3);
    let h = (b - a) / (n - 1) as f64;
    let mut best_i = 0;
    let mut best_v = f64::INFINITY;
    for i in 0..n {
        let v = f(a + h * i as f64);
        if v < best_v {
            best_v = v;
            best_i = i;
        }
    }
    let lo = (a + h * best_i.saturating_sub(1) as f64).max(a);
    let hi = (a + h * (best_i + 1) as f64).min(b);
    let (x, v) = golden_section_min(&f, lo, hi, tol);
    if v <= best_v {
        (x, v)
    } else {
        (a + h * best_i as f64, best_v)
    }
}
