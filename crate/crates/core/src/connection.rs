//! Cartan structure equations in an orthonormal frame.
//!
//! Everything here is generic over the dimension `N` and only needs a
//! [`Coframe`] with closed-form first and second coordinate derivatives.
//! Conventions:
//!
//! ```text
//! deᵃ = −½ cᵃ_bc eᵇ∧eᶜ          (commutation coefficients)
//! deᵃ = −ωᵃ_b ∧ eᵇ,  ωᵃ_b = Γᵃ_bc eᶜ
//! Rᵃ_b = dωᵃ_b + ωᵃ_c ∧ ωᶜ_b = ½ Rᵃ_bcd eᶜ∧eᵈ
//! ```
//!
//! Frame indices are raised and lowered with the identity.

use nalgebra::{SMatrix, SVector};
use serde::Serialize;
use thiserror::Error;

use crate::geometry::{ChartPoint, GeometryError, PageMetric};

/// Rows of `matrix` are the coframe 1-forms in the coordinate basis.
pub trait Coframe<const N: usize> {
    fn matrix(&self, x: &SVector<f64, N>) -> SMatrix<f64, N, N>;
    fn partial(&self, x: &SVector<f64, N>, k: usize) -> SMatrix<f64, N, N>;
    fn second_partial(&self, x: &SVector<f64, N>, k: usize, l: usize) -> SMatrix<f64, N, N>;
}

/// A metric in coordinates with closed-form derivatives.
pub trait MetricField<const N: usize> {
    fn metric(&self, x: &SVector<f64, N>) -> SMatrix<f64, N, N>;
    fn metric_partial(&self, x: &SVector<f64, N>, k: usize) -> SMatrix<f64, N, N>;
    fn metric_second_partial(&self, x: &SVector<f64, N>, k: usize, l: usize)
        -> SMatrix<f64, N, N>;
}

pub type Rank3<const N: usize> = [[[f64; N]; N]; N];
pub type Rank4<const N: usize> = [[[[f64; N]; N]; N]; N];

fn zeros3<const N: usize>() -> Rank3<N> {
    [[[0.0; N]; N]; N]
}

fn zeros4<const N: usize>() -> Rank4<N> {
    [[[[0.0; N]; N]; N]; N]
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConnectionError {
    #[error("coframe matrix is singular at the requested point")]
    Singular,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// `cᵃ_bc`, antisymmetric in `(b, c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutationCoefficients<const N: usize> {
    pub c: Rank3<N>,
}

impl<const N: usize> CommutationCoefficients<N> {
    /// Coefficient of `eᵇ∧eᶜ` (`b < c`) in `deᵃ`.
    pub fn d_coefficient(&self, a: usize, b: usize, c: usize) -> f64 {
        -self.c[a][b][c]
    }
}

/// `Γᵃ_bc` with `ωᵃ_b = Γᵃ_bc eᶜ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionForms<const N: usize> {
    pub gamma: Rank3<N>,
}

impl<const N: usize> ConnectionForms<N> {
    /// Components of `ωᵃ_b` along `e⁰ … eᴺ⁻¹`.
    pub fn omega(&self, a: usize, b: usize) -> [f64; N] {
        self.gamma[a][b]
    }

    pub fn skew_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..N {
            for b in 0..N {
                for c in 0..N {
                    worst = worst.max((self.gamma[a][b][c] + self.gamma[b][a][c]).abs());
                }
            }
        }
        worst
    }

    /// Largest component of `deᵃ + ωᵃ_b∧eᵇ` given `deᵃ` through `c`.
    pub fn torsion_residual(&self, c: &CommutationCoefficients<N>) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..N {
            for b in 0..N {
                for d in 0..N {
                    let r = c.c[a][b][d] + self.gamma[a][b][d] - self.gamma[a][d][b];
                    worst = worst.max(r.abs());
                }
            }
        }
        worst
    }

    pub fn max_abs_difference(&self, other: &ConnectionForms<N>) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..N {
            for b in 0..N {
                for c in 0..N {
                    worst = worst.max((self.gamma[a][b][c] - other.gamma[a][b][c]).abs());
                }
            }
        }
        worst
    }
}

/// Torsion-free, metric-compatible solution of the structure equations:
/// `Γ_abc = −½ (c_abc + c_bca − c_cab)`.
pub fn solve_connection<const N: usize>(c: &CommutationCoefficients<N>) -> ConnectionForms<N> {
    let mut gamma = zeros3::<N>();
    for a in 0..N {
        for b in 0..N {
            for d in 0..N {
                gamma[a][b][d] = -0.5 * (c.c[a][b][d] + c.c[b][d][a] - c.c[d][a][b]);
            }
        }
    }
    ConnectionForms { gamma }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureAtPoint<const N: usize> {
    /// `Rᵃ_bcd`.
    pub riemann: Rank4<N>,
    /// `Ric_bd = Rᵃ_bad`.
    pub ricci: SMatrix<f64, N, N>,
    pub scalar: f64,
}

impl<const N: usize> CurvatureAtPoint<N> {
    fn from_riemann(riemann: Rank4<N>) -> Self {
        let mut ricci = SMatrix::<f64, N, N>::zeros();
        for b in 0..N {
            for d in 0..N {
                ricci[(b, d)] = (0..N).map(|a| riemann[a][b][a][d]).sum();
            }
        }
        let scalar = ricci.trace();
        Self { riemann, ricci, scalar }
    }

    /// Sectional curvature of the plane spanned by `e_a`, `e_b`.
    pub fn sectional(&self, a: usize, b: usize) -> f64 {
        self.riemann[a][b][a][b]
    }

    /// `‖Ric − (scalar / N)·I‖∞`.
    pub fn einstein_residual(&self) -> f64 {
        let lambda = self.scalar / N as f64;
        (self.ricci - SMatrix::<f64, N, N>::identity() * lambda).abs().max()
    }

    /// Worst violation of the algebraic symmetries
    /// `R_abcd = −R_abdc = −R_bacd` and `R_a[bcd] = 0`.
    pub fn symmetry_residual(&self) -> f64 {
        let r = &self.riemann;
        let mut worst: f64 = 0.0;
        for a in 0..N {
            for b in 0..N {
                for c in 0..N {
                    for d in 0..N {
                        worst = worst
                            .max((r[a][b][c][d] + r[a][b][d][c]).abs())
                            .max((r[a][b][c][d] + r[b][a][c][d]).abs())
                            .max((r[a][b][c][d] + r[a][c][d][b] + r[a][d][b][c]).abs());
                    }
                }
            }
        }
        worst
    }

    pub fn ricci_asymmetry(&self) -> f64 {
        (self.ricci - self.ricci.transpose()).abs().max()
    }
}

/// First-order structure of a coframe at one point: the frame, its inverse,
/// the commutation coefficients and the connection.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameConnection<const N: usize> {
    pub e: SMatrix<f64, N, N>,
    /// Columns are the dual frame vectors `e_b` in coordinates.
    pub e_inv: SMatrix<f64, N, N>,
    pub commutation: CommutationCoefficients<N>,
    pub connection: ConnectionForms<N>,
}

// antisymmetrized coordinate derivative A^a_μν = ∂_μ E^a_ν − ∂_ν E^a_μ
fn curl<const N: usize>(d: &[SMatrix<f64, N, N>; N]) -> Rank3<N> {
    let mut out = zeros3::<N>();
    for a in 0..N {
        for mu in 0..N {
            for nu in 0..N {
                out[a][mu][nu] = d[mu][(a, nu)] - d[nu][(a, mu)];
            }
        }
    }
    out
}

fn to_frame<const N: usize>(t: &Rank3<N>, left: &SMatrix<f64, N, N>, right: &SMatrix<f64, N, N>) -> Rank3<N> {
    let mut out = zeros3::<N>();
    for a in 0..N {
        for b in 0..N {
            for c in 0..N {
                let mut s = 0.0;
                for mu in 0..N {
                    for nu in 0..N {
                        s += t[a][mu][nu] * left[(mu, b)] * right[(nu, c)];
                    }
                }
                out[a][b][c] = s;
            }
        }
    }
    out
}

impl<const N: usize> FrameConnection<N> {
    pub fn at<F: Coframe<N> + ?Sized>(frame: &F, x: &SVector<f64, N>) -> Result<Self, ConnectionError> {
        let e = frame.matrix(x);
        let e_inv = e.try_inverse().ok_or(ConnectionError::Singular)?;
        if !e_inv.iter().all(|v| v.is_finite()) {
            return Err(ConnectionError::Singular);
        }
        let de: [SMatrix<f64, N, N>; N] = std::array::from_fn(|k| frame.partial(x, k));
        let mut c = to_frame(&curl(&de), &e_inv, &e_inv);
        c.iter_mut().flatten().flatten().for_each(|v| *v = -*v);
        let commutation = CommutationCoefficients { c };
        let connection = solve_connection(&commutation);
        Ok(Self { e, e_inv, commutation, connection })
    }
}

/// [`FrameConnection`] together with the frame derivatives of the
/// connection, enough to assemble the curvature.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameGeometry<const N: usize> {
    pub e: SMatrix<f64, N, N>,
    pub e_inv: SMatrix<f64, N, N>,
    pub commutation: CommutationCoefficients<N>,
    pub connection: ConnectionForms<N>,
    /// `dgamma[d][a][b][c] = e_d(Γᵃ_bc)`.
    dgamma: Rank4<N>,
}

impl<const N: usize> FrameGeometry<N> {
    pub fn at<F: Coframe<N> + ?Sized>(frame: &F, x: &SVector<f64, N>) -> Result<Self, ConnectionError> {
        let FrameConnection { e, e_inv, commutation, connection } = FrameConnection::at(frame, x)?;
        let de: [SMatrix<f64, N, N>; N] = std::array::from_fn(|k| frame.partial(x, k));
        let de_inv: [SMatrix<f64, N, N>; N] = std::array::from_fn(|k| -e_inv * de[k] * e_inv);
        let a0 = curl(&de);

        // ∂_l c^a_bc, then ∂_l Γ by linearity, then e_d Γ = Einv^l_d ∂_l Γ
        let mut dgamma_coord: [Rank3<N>; N] = [zeros3::<N>(); N];
        for l in 0..N {
            let dde: [SMatrix<f64, N, N>; N] = std::array::from_fn(|k| frame.second_partial(x, l, k));
            let t1 = to_frame(&curl(&dde), &e_inv, &e_inv);
            let t2 = to_frame(&a0, &de_inv[l], &e_inv);
            let t3 = to_frame(&a0, &e_inv, &de_inv[l]);
            let mut dc = zeros3::<N>();
            for a in 0..N {
                for b in 0..N {
                    for cc in 0..N {
                        dc[a][b][cc] = -(t1[a][b][cc] + t2[a][b][cc] + t3[a][b][cc]);
                    }
                }
            }
            dgamma_coord[l] = solve_connection(&CommutationCoefficients { c: dc }).gamma;
        }
        let mut dgamma = zeros4::<N>();
        for d in 0..N {
            for a in 0..N {
                for b in 0..N {
                    for cc in 0..N {
                        dgamma[d][a][b][cc] =
                            (0..N).map(|l| e_inv[(l, d)] * dgamma_coord[l][a][b][cc]).sum();
                    }
                }
            }
        }
        Ok(Self { e, e_inv, commutation, connection, dgamma })
    }

    /// `e_d(Γᵃ_bc)`.
    pub fn frame_derivative(&self, d: usize, a: usize, b: usize, c: usize) -> f64 {
        self.dgamma[d][a][b][c]
    }

    pub fn curvature(&self) -> CurvatureAtPoint<N> {
        let g = &self.connection.gamma;
        let c = &self.commutation.c;
        let mut riemann = zeros4::<N>();
        for a in 0..N {
            for b in 0..N {
                for cc in 0..N {
                    for d in 0..N {
                        let mut s = self.dgamma[cc][a][b][d] - self.dgamma[d][a][b][cc];
                        for f in 0..N {
                            s -= g[a][b][f] * c[f][cc][d];
                            s += g[a][f][cc] * g[f][b][d] - g[a][f][d] * g[f][b][cc];
                        }
                        riemann[a][b][cc][d] = s;
                    }
                }
            }
        }
        CurvatureAtPoint::from_riemann(riemann)
    }
}

fn page_frame(metric: &PageMetric, p: &ChartPoint) -> Result<FrameGeometry<4>, ConnectionError> {
    p.require_margin(crate::geometry::DEGENERATE_MARGIN)?;
    FrameGeometry::at(metric, &p.vector())
}

pub fn commutation_coefficients(
    metric: &PageMetric,
    p: &ChartPoint,
) -> Result<CommutationCoefficients<4>, ConnectionError> {
    p.require_margin(crate::geometry::DEGENERATE_MARGIN)?;
    Ok(FrameConnection::at(metric, &p.vector())?.commutation)
}

pub fn connection(metric: &PageMetric, p: &ChartPoint) -> Result<ConnectionForms<4>, ConnectionError> {
    p.require_margin(crate::geometry::DEGENERATE_MARGIN)?;
    Ok(FrameConnection::at(metric, &p.vector())?.connection)
}

pub fn curvature(metric: &PageMetric, p: &ChartPoint) -> Result<CurvatureAtPoint<4>, ConnectionError> {
    Ok(page_frame(metric, p)?.curvature())
}

/// Frame connection obtained from the finite-difference coordinate
/// Christoffel symbols, pushed through the vierbein:
/// `Γᵃ_bc = Eᵃ_μ (e_c(Einv^μ_b) + Γ^μ_νλ Einv^ν_c Einv^λ_b)`.
///
/// The derivative of the inverse vierbein is also taken by finite
/// differences so that nothing from the closed-form pipeline leaks in.
pub fn connection_from_christoffels(
    metric: &PageMetric,
    p: &ChartPoint,
    step: f64,
) -> Result<ConnectionForms<4>, ConnectionError> {
    let christoffel = metric.coordinate_christoffels(p, step, true)?;
    let x = p.vector();
    let e = metric.metric_matrix(p).e.ok_or(ConnectionError::Singular)?;
    let e_inv = e.try_inverse().ok_or(ConnectionError::Singular)?;
    let inv_at = |y: &SVector<f64, 4>| metric.matrix(y).try_inverse().expect("non-degenerate");
    let central = |k: usize, h: f64| {
        let mut dx = SVector::<f64, 4>::zeros();
        dx[k] = h;
        (inv_at(&(x + dx)) - inv_at(&(x - dx))) / (2.0 * h)
    };
    // Richardson on h and h/2, matching the Christoffel oracle
    let d_inv: [SMatrix<f64, 4, 4>; 4] =
        std::array::from_fn(|k| (central(k, 0.5 * step) * 4.0 - central(k, step)) / 3.0);
    let mut gamma = zeros3::<4>();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                let mut s = 0.0;
                for mu in 0..4 {
                    let mut inner = 0.0;
                    for nu in 0..4 {
                        inner += e_inv[(nu, c)] * d_inv[nu][(mu, b)];
                        for la in 0..4 {
                            inner += christoffel[mu][nu][la] * e_inv[(nu, c)] * e_inv[(la, b)];
                        }
                    }
                    s += e[(a, mu)] * inner;
                }
                gamma[a][b][c] = s;
            }
        }
    }
    Ok(ConnectionForms { gamma })
}

/// Frame Riemann tensor from the nested finite-difference coordinate oracle.
pub fn curvature_from_coordinates(
    metric: &PageMetric,
    p: &ChartPoint,
    inner_step: f64,
    outer_step: f64,
) -> Result<CurvatureAtPoint<4>, ConnectionError> {
    let coord = metric.coordinate_riemann(p, inner_step, outer_step)?;
    let e = metric.metric_matrix(p).e.ok_or(ConnectionError::Singular)?;
    let e_inv = e.try_inverse().ok_or(ConnectionError::Singular)?;
    let mut riemann = zeros4::<4>();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let mut s = 0.0;
                    for i in 0..4 {
                        for j in 0..4 {
                            for k in 0..4 {
                                for l in 0..4 {
                                    s += e[(a, i)]
                                        * coord[i][j][k][l]
                                        * e_inv[(j, b)]
                                        * e_inv[(k, c)]
                                        * e_inv[(l, d)];
                                }
                            }
                        }
                    }
                    riemann[a][b][c][d] = s;
                }
            }
        }
    }
    Ok(CurvatureAtPoint::from_riemann(riemann))
}

/// One printed coefficient compared against the solver.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparatorEntry {
    /// e.g. `omega^1_0` or `de^2`.
    pub form: String,
    /// e.g. `e3` or `e31`.
    pub basis: String,
    pub printed: f64,
    pub computed: f64,
    pub deviation: f64,
    /// Entry belongs to the set of known printing slips.
    pub known_typo: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationReport {
    pub point: ChartPoint,
    pub entries: Vec<ComparatorEntry>,
}

impl DeviationReport {
    pub fn max_deviation(&self, known_typo: bool) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.known_typo == known_typo)
            .map(|e| e.deviation)
            .fold(0.0, f64::max)
    }

    pub fn find(&self, form: &str, basis: &str) -> Option<&ComparatorEntry> {
        self.entries.iter().find(|e| e.form == form && e.basis == basis)
    }
}

/// Scalar building blocks of the printed tables.
struct PrintedScalars {
    /// `U⁻¹h⁻¹ḣ`
    alpha: f64,
    /// `2h⁻¹cotθ`
    beta: f64,
    /// `sin⁻¹r (U⁻¹ sin r)_r`
    gamma: f64,
    /// `D U⁻¹ h⁻² sin r`
    delta: f64,
    /// `ḣ`
    hdot: f64,
    sin_theta: f64,
}

fn printed_scalars(metric: &PageMetric, p: &ChartPoint) -> PrintedScalars {
    let prof = metric.profiles();
    let u = prof.u_jet(p.r);
    let h = prof.h_jet(p.r);
    let d = metric.fiber_sqrt();
    let (sr, cr) = p.r.sin_cos();
    PrintedScalars {
        alpha: h.d1 / (u.value * h.value),
        beta: 2.0 / (h.value * p.theta.tan()),
        gamma: (cr / u.value - sr * u.d1 / (u.value * u.value)) / sr,
        delta: d * sr / (u.value * h.value * h.value),
        hdot: h.d1,
        sin_theta: p.theta.sin(),
    }
}

/// Compare the printed ambient connection 1-forms with the solver.
///
/// The printed `D` is read as the square root of the metric's fiber
/// constant, so the comparison isolates structural slips from the
/// normalization choice. Every frame component of every listed `ωᵃ_b` is
/// reported, including the ones the table prints as zero.
pub fn paper_connection_table(metric: &PageMetric, p: &ChartPoint) -> Result<DeviationReport, ConnectionError> {
    let solved = connection(metric, p)?;
    let s = printed_scalars(metric, p);
    let half_csc = 0.5 * s.alpha / s.sin_theta;
    // (a, b, printed components, known slips)
    let table: [(usize, usize, [f64; 4], &[usize]); 6] = [
        (1, 0, [0.0, s.alpha, 0.0, half_csc], &[3]),
        (2, 0, [0.0, 0.0, s.gamma, 0.0], &[]),
        (3, 0, [0.0, half_csc, 0.0, 0.0], &[1, 3]),
        (2, 1, [0.0, 0.0, 0.0, s.delta], &[]),
        (1, 3, [half_csc, s.beta, -s.delta, 0.0], &[0]),
        (3, 2, [0.0, s.delta, 0.0, 0.0], &[]),
    ];
    let mut entries = Vec::new();
    for (a, b, printed, typos) in table {
        let computed = solved.omega(a, b);
        for c in 0..4 {
            entries.push(ComparatorEntry {
                form: format!("omega^{a}_{b}"),
                basis: format!("e{c}"),
                printed: printed[c],
                computed: computed[c],
                deviation: (printed[c] - computed[c]).abs(),
                known_typo: typos.contains(&c),
            });
        }
    }
    Ok(DeviationReport { point: *p, entries })
}

/// Compare the printed exterior derivatives `deᵃ` (the structure-equation
/// system) with the commutation coefficients.
pub fn paper_structure_table(metric: &PageMetric, p: &ChartPoint) -> Result<DeviationReport, ConnectionError> {
    let c = commutation_coefficients(metric, p)?;
    let s = printed_scalars(metric, p);
    // printed coefficients of e^{bc} for b < c; e^{31} = −e^{13}, e^{20} = −e^{02}
    let mut printed = [[[0.0; 4]; 4]; 4];
    printed[1][0][1] = s.alpha;
    printed[1][1][3] = -s.beta;
    printed[2][0][2] = s.gamma;
    printed[2][1][3] = 2.0 * s.delta / s.hdot;
    printed[3][0][1] = s.alpha / s.sin_theta;
    let typos = [(2, 1, 3), (3, 0, 1), (3, 0, 3)];
    let mut entries = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for d in (b + 1)..4 {
                let computed = c.d_coefficient(a, b, d);
                entries.push(ComparatorEntry {
                    form: format!("de^{a}"),
                    basis: format!("e{b}{d}"),
                    printed: printed[a][b][d],
                    computed,
                    deviation: (printed[a][b][d] - computed).abs(),
                    known_typo: typos.contains(&(a, b, d)),
                });
            }
        }
    }
    Ok(DeviationReport { point: *p, entries })
}
