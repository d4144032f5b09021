//! The `verify` suites. Each returns a flat list of checks; failures of
//! established printed claims are marked discrepancy-documented so that the
//! exit code reflects only the computation itself.

use std::f64::consts::{FRAC_PI_2, PI};
use std::str::FromStr;

use num_complex::Complex64;
use page_geometry::connection::{self, DeviationReport};
use page_geometry::functionals;
use page_geometry::geometry::Coord;
use page_geometry::moduli::{self, Generator, Word};
use page_geometry::report::{Check, VerificationReport};
use page_geometry::submanifolds::{self, FamilyId, SubmanifoldSpec};
use page_geometry::{ChartPoint, PageMetric};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("{0}")]
    Connection(#[from] connection::ConnectionError),
    #[error("{0}")]
    Submanifold(#[from] submanifolds::SubmanifoldError),
    #[error("{0}")]
    Geometry(#[from] page_geometry::geometry::GeometryError),
    #[error("{0}")]
    Moduli(#[from] moduli::ModuliError),
    #[error("{0}")]
    Numerics(#[from] page_geometry::numerics::NumericsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    Einstein,
    Connection,
    Geodesic,
    Curvature,
    GaussBonnet,
    Functionals,
    Moduli,
}

impl Suite {
    pub const EACH: [Suite; 7] = [
        Suite::Einstein,
        Suite::Connection,
        Suite::Geodesic,
        Suite::Curvature,
        Suite::GaussBonnet,
        Suite::Functionals,
        Suite::Moduli,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Einstein => "einstein",
            Suite::Connection => "connection",
            Suite::Geodesic => "geodesic",
            Suite::Curvature => "curvature",
            Suite::GaussBonnet => "gaussbonnet",
            Suite::Functionals => "functionals",
            Suite::Moduli => "moduli",
        }
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        std::iter::once(Suite::All)
            .chain(Suite::EACH)
            .find(|x| x.name() == s.to_ascii_lowercase())
            .ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteOptions {
    /// Tolerance for the pointwise identity checks (Einstein, symmetries).
    pub tol: f64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { tol: 1e-6, samples: 50, seed: 20_240_501 }
    }
}

/// Sample point used for the printed-table comparisons.
pub fn reference_point() -> ChartPoint {
    ChartPoint::new(1.0, 0.3, 0.5, 1.2).expect("interior point")
}

fn random_points(n: usize, margin: f64, rng: &mut ChaCha8Rng) -> Vec<ChartPoint> {
    (0..n)
        .map(|_| {
            ChartPoint::new(
                rng.gen_range(margin..PI - margin),
                rng.gen_range(0.0..2.0 * PI),
                rng.gen_range(0.0..4.0 * PI),
                rng.gen_range(margin..PI - margin),
            )
            .expect("sampled inside the chart")
        })
        .collect()
}

fn fmt_point(p: &ChartPoint) -> String {
    format!("(r={:.4}, φ={:.4}, ψ={:.4}, θ={:.4})", p.r, p.phi, p.psi, p.theta)
}

pub fn run(suite: Suite, metric: &PageMetric, opts: &SuiteOptions) -> Result<VerificationReport, SuiteError> {
    let checks = match suite {
        Suite::All => {
            let mut all = Vec::new();
            for s in Suite::EACH {
                all.extend(checks_for(s, metric, opts)?);
            }
            all
        }
        s => checks_for(s, metric, opts)?,
    };
    Ok(VerificationReport::new(suite.name(), checks, crate::metadata(metric)))
}

fn checks_for(suite: Suite, metric: &PageMetric, opts: &SuiteOptions) -> Result<Vec<Check>, SuiteError> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    match suite {
        Suite::All => unreachable!("expanded by run"),
        Suite::Einstein => einstein(metric, opts, &mut rng),
        Suite::Connection => connection_suite(metric, opts, &mut rng),
        Suite::Geodesic => geodesic(metric, opts, &mut rng),
        Suite::Curvature => curvature(metric, opts, &mut rng),
        Suite::GaussBonnet => gauss_bonnet(metric),
        Suite::Functionals => functionals_suite(metric),
        Suite::Moduli => moduli_suite(metric, &mut rng),
    }
}

fn einstein(metric: &PageMetric, opts: &SuiteOptions, rng: &mut ChaCha8Rng) -> Result<Vec<Check>, SuiteError> {
    let target = metric.einstein_scalar();
    let lambda = target / 4.0;
    let mut out = Vec::new();
    for (i, p) in random_points(opts.samples, 1e-3, rng).iter().enumerate() {
        let k = connection::curvature(metric, p)?;
        let ric_dev = (k.ricci - nalgebra::Matrix4::identity() * lambda).abs().max();
        out.push(
            Check::measured(
                format!("einstein.ricci.{i:03}"),
                format!("‖Ric − 3(1+a²)·I‖∞ at {}", fmt_point(p)),
                Some(lambda),
                ric_dev,
                ric_dev,
                opts.tol,
            ),
        );
        out.push(Check::measured(
            format!("einstein.scalar.{i:03}"),
            format!("relative scalar curvature deviation from 12(1+a²) at {}", fmt_point(p)),
            Some(target),
            k.scalar,
            (k.scalar - target).abs() / target,
            opts.tol,
        ));
    }
    Ok(out)
}

fn table_checks(prefix: &str, table: &DeviationReport, tol: f64) -> Vec<Check> {
    table
        .entries
        .iter()
        .map(|e| {
            let check = Check::against(
                format!("{prefix}.{}.{}", e.form, e.basis),
                format!("printed {} component along {} vs structure-equation solver", e.form, e.basis),
                e.printed,
                e.computed,
                tol,
            );
            if e.known_typo {
                check.documented("known slip in the printed table; the solver value is cross-checked independently")
            } else {
                check
            }
        })
        .collect()
}

fn connection_suite(
    metric: &PageMetric,
    opts: &SuiteOptions,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Check>, SuiteError> {
    let mut out = Vec::new();
    for (i, p) in random_points(opts.samples, 0.05, rng).iter().enumerate() {
        let solved = connection::connection(metric, p)?;
        let c = connection::commutation_coefficients(metric, p)?;
        let fd = connection::connection_from_christoffels(metric, p, 1e-4)?;
        let oracle = solved.max_abs_difference(&fd);
        out.push(Check::measured(
            format!("connection.oracle.{i:03}"),
            format!("solver vs finite-difference Christoffel oracle at {}", fmt_point(p)),
            None,
            oracle,
            oracle,
            5e-5,
        ));
        let torsion = solved.torsion_residual(&c);
        out.push(Check::measured(format!("connection.torsion.{i:03}"), "torsion residual", None, torsion, torsion, 1e-10));
        let skew = solved.skew_residual();
        out.push(Check::measured(format!("connection.skew.{i:03}"), "Γ_abc + Γ_bac", None, skew, skew, 1e-12));
    }
    let p = reference_point();
    out.extend(table_checks("connection.printed", &connection::paper_connection_table(metric, &p)?, 1e-10));
    out.extend(table_checks("connection.structure", &connection::paper_structure_table(metric, &p)?, 1e-10));
    Ok(out)
}

/// Established outcomes of the totally-geodesic scan at the default sizes.
fn geodesic_note(id: FamilyId) -> &'static str {
    match id {
        FamilyId::S4 => "totally geodesic only on the θ₀ = π/2 slice",
        FamilyId::N1 => "totally geodesic only on the r₀ = π/2 slice",
        _ => "second fundamental form is nonzero on every sampled slice",
    }
}

fn geodesic(metric: &PageMetric, opts: &SuiteOptions, rng: &mut ChaCha8Rng) -> Result<Vec<Check>, SuiteError> {
    let mut out = Vec::new();
    for spec in submanifolds::catalog() {
        let rep = submanifolds::is_totally_geodesic(metric, &spec, 7, 5, 1e-8)?;
        let check = Check::measured(
            format!("geodesic.{}", spec.id),
            format!("max |II| of {} over {} samples on {} slices", spec.id, rep.samples, rep.slices),
            Some(0.0),
            rep.max_ii,
            rep.max_ii,
            1e-8,
        );
        out.push(match spec.id {
            FamilyId::S2 | FamilyId::S5 => check,
            id => check.documented(geodesic_note(id)),
        });
    }
    for (id, coord) in [(FamilyId::S4, Coord::Theta), (FamilyId::N1, Coord::R)] {
        let spec = SubmanifoldSpec::family(id).with_fixed(coord, FRAC_PI_2)?;
        let rep = submanifolds::is_totally_geodesic(metric, &spec, 7, 0, 1e-8)?;
        out.push(Check::measured(
            format!("geodesic.{id}.equatorial"),
            format!("max |II| of {id} on the {} = π/2 slice", coord.name()),
            Some(0.0),
            rep.max_ii,
            rep.max_ii,
            1e-8,
        ));
    }
    for (i, p) in random_points(opts.samples.min(20), 0.05, rng).iter().enumerate() {
        let res = metric.radial_geodesic_residual(p, 1e-4)?;
        out.push(Check::measured(
            format!("geodesic.radial.{i:03}"),
            format!("unit-speed radial curve geodesic residual at {}", fmt_point(p)),
            Some(0.0),
            res,
            res,
            1e-6,
        ));
    }
    Ok(out)
}

fn gaussian(metric: &PageMetric, spec: &SubmanifoldSpec, q: &[f64]) -> Result<f64, SuiteError> {
    Ok(submanifolds::induced_curvature(metric, spec, q)?.gaussian().expect("surface"))
}

fn curvature(metric: &PageMetric, opts: &SuiteOptions, rng: &mut ChaCha8Rng) -> Result<Vec<Check>, SuiteError> {
    let mut out = Vec::new();
    for id in [FamilyId::S1, FamilyId::S3] {
        let spec = SubmanifoldSpec::family(id);
        let mut worst: f64 = 0.0;
        for q in submanifolds::free_grid(&spec, 9) {
            worst = worst.max(gaussian(metric, &spec, &q)?.abs());
        }
        out.push(Check::measured(format!("curvature.flat.{id}"), format!("max |K| on {id}"), Some(0.0), worst, worst, 1e-9));
    }
    for id in [FamilyId::S2, FamilyId::S4, FamilyId::S5, FamilyId::S6] {
        let spec = SubmanifoldSpec::family(id);
        let mut worst: f64 = 0.0;
        for q in submanifolds::free_grid(&spec, 6) {
            let k = gaussian(metric, &spec, &q)?;
            worst = worst.max((k - submanifolds::brioschi_curvature(metric, &spec, &q, 1e-3)?).abs());
        }
        out.push(Check::measured(
            format!("curvature.brioschi.{id}"),
            format!("frame-pipeline K vs Brioschi finite-difference K on {id}"),
            None,
            worst,
            worst,
            1e-5,
        ));
    }
    let s6 = SubmanifoldSpec::family(FamilyId::S6);
    let ks = submanifolds::free_grid(&s6, 9)
        .iter()
        .map(|q| gaussian(metric, &s6, q))
        .collect::<Result<Vec<_>, _>>()?;
    let mean = ks.iter().sum::<f64>() / ks.len() as f64;
    let sd = (ks.iter().map(|k| (k - mean).powi(2)).sum::<f64>() / ks.len() as f64).sqrt();
    out.push(
        Check::measured("curvature.S6.constant", "standard deviation of K over the S6 sphere", Some(0.0), sd, sd, 1e-10)
            .documented("K on S6 varies with θ; the printed constant curvature 4/f does not hold"),
    );
    for spec in submanifolds::catalog() {
        let q: Vec<f64> = spec
            .free
            .iter()
            .map(|c| match c {
                Coord::R => 1.0,
                Coord::Theta => 1.2,
                Coord::Phi => 0.3,
                Coord::Psi => 0.5,
            })
            .collect();
        for e in submanifolds::paper_curvature_formula(metric, &spec, &q)? {
            let check = Check::against(
                format!("curvature.printed.{}", e.form),
                format!("printed {} vs intrinsic pipeline at q = {}", e.form, e.basis),
                e.printed,
                e.computed,
                1e-9,
            );
            out.push(if e.known_typo {
                check.documented("printed induced-curvature expression disagrees with two independent oracles")
            } else {
                check
            });
        }
    }
    for (i, p) in random_points(opts.samples.min(5), 0.2, rng).iter().enumerate() {
        let pipeline = connection::curvature(metric, p)?;
        let fd = connection::curvature_from_coordinates(metric, p, 1e-3, 1e-3)?;
        let mut worst: f64 = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        worst = worst.max((pipeline.riemann[a][b][c][d] - fd.riemann[a][b][c][d]).abs());
                    }
                }
            }
        }
        out.push(Check::measured(
            format!("curvature.coordinate.{i:03}"),
            format!("frame Riemann vs coordinate finite-difference Riemann at {}", fmt_point(p)),
            None,
            worst,
            worst,
            1e-4,
        ));
        let sym = pipeline.symmetry_residual();
        out.push(Check::measured(format!("curvature.symmetry.{i:03}"), "Riemann algebraic symmetries", None, sym, sym, opts.tol));
    }
    Ok(out)
}

fn gauss_bonnet(metric: &PageMetric) -> Result<Vec<Check>, SuiteError> {
    let target = 4.0 * PI;
    let s5 = submanifolds::gauss_bonnet(metric, &SubmanifoldSpec::family(FamilyId::S5), 1e-10)?;
    let mut s5_check = Check::against("gaussbonnet.S5", "∫K dA over S5 vs 4π", target, s5.integral, 1e-6);
    if metric.normalization() != page_geometry::Normalization::Einstein {
        s5_check = s5_check.documented("the printed fiber constant leaves a conical singularity at the S5 poles");
    }
    let s6 = submanifolds::gauss_bonnet(metric, &SubmanifoldSpec::family(FamilyId::S6), 1e-10)?;
    Ok(vec![
        s5_check,
        Check::against("gaussbonnet.S5.printed", "printed S5 integrand integrated over the sphere", target, s5.printed_integral, 1e-6)
            .documented("printed integrand differs from the induced curvature density"),
        Check::against("gaussbonnet.S6", "∫K dA over the S6 slice vs 4π", target, s6.integral, 1e-6)
            .documented("the φθ slice does not close up into a smooth sphere in this chart"),
        Check::against("gaussbonnet.S6.printed", "(4/f)·area of S6 vs 4π", target, s6.printed_integral, 1e-10)
            .documented("the printed constant curvature is not the induced curvature"),
    ])
}

fn functionals_suite(metric: &PageMetric) -> Result<Vec<Check>, SuiteError> {
    let vol = functionals::page_volume(metric, 1e-10)?;
    let eh = functionals::einstein_hilbert_page(metric);
    let bounds = functionals::reference_bounds();
    let exact = functionals::volume_exact(metric);
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    let mut out = vec![
        Check::measured(
            "functionals.volume.quadrature",
            "adaptive quadrature of √det g vs exact volume",
            None,
            vol.quadrature.value,
            rel(vol.quadrature.value, exact),
            1e-8,
        )
        .with_note(format!("quadrature error estimate {:.2e}", vol.quadrature.error_estimate)),
        Check::measured(
            "functionals.volume.closed",
            "printed closed-form volume vs quadrature (relative)",
            Some(vol.closed_form),
            vol.quadrature.value,
            rel(vol.quadrature.value, vol.closed_form),
            1e-6,
        )
        .documented("the printed closed form does not integrate the metric volume form"),
        Check::measured(
            "functionals.volume.printed-integrand",
            "printed volume-form coefficient integrated vs printed closed form (relative)",
            Some(vol.closed_form),
            vol.printed_integrand.value,
            rel(vol.printed_integrand.value, vol.closed_form),
            1e-6,
        )
        .documented("integrating the printed coefficient gives (a⁴ − 4a² + 8) in place of (a⁴ − 4a² + 16)"),
        Check::against("functionals.E", "E = R·√Vol with the closed-form volume", 23.694254, eh.from_closed_volume, 1e-5)
            .documented("the quoted value corresponds to a rounded to 0.2817"),
        Check::measured(
            "functionals.E.identity",
            "displayed closed form for E vs R·√Vol_closed (relative)",
            Some(eh.displayed),
            eh.from_closed_volume,
            rel(eh.from_closed_volume, eh.displayed),
            1e-10,
        ),
        Check::against("functionals.aubin", "24π√(2/3)", 61.562393, bounds.aubin, 1e-5),
        Check::against("functionals.conjectured", "12√2π", 53.314598, bounds.conjectured, 1e-5),
        Check::property(
            "functionals.ordering",
            "E_page < conjectured < Aubin",
            eh.from_closed_volume < bounds.conjectured && bounds.conjectured < bounds.aubin,
            eh.from_closed_volume,
        ),
        Check::property(
            "functionals.ordering.exact",
            "R·√Vol with the exact volume < conjectured",
            eh.from_exact_volume < bounds.conjectured,
            eh.from_exact_volume,
        ),
    ];
    let p = ChartPoint::new(1.0, 0.3, 0.5, 1.2)?;
    let scalar = connection::curvature(metric, &p)?.scalar;
    out.push(Check::measured(
        "functionals.scalar",
        "pipeline scalar curvature vs 12(1+a²)",
        Some(eh.scalar_curvature),
        scalar,
        rel(scalar, eh.scalar_curvature),
        1e-9,
    ));
    let spot = functionals::otoba_action(8.0).action;
    let expected = 8.0 * 2.0f64.powf(0.25) * PI.powf(1.5);
    out.push(Check::measured("functionals.otoba.spot", "E(8) = 8·2^{1/4}·π^{3/2}", Some(expected), spot, rel(spot, expected), 1e-10));
    let scan: Vec<_> = (0..=20_000).map(|i| functionals::otoba_action(-1e4 + i as f64)).collect();
    let k_ok = scan.iter().all(|v| v.k_squared > 0.0 && v.k_squared < 1.0);
    out.push(Check::property("functionals.otoba.k", "k² ∈ (0,1) on R ∈ [−10⁴, 10⁴]", k_ok, scan.len() as f64));
    let min = scan.iter().map(|v| v.action).fold(f64::INFINITY, f64::min);
    let max = scan.iter().map(|v| v.action).fold(f64::NEG_INFINITY, f64::max);
    out.push(Check::property("functionals.otoba.small", "values below 10⁻² on the scan", min < 1e-2, min));
    out.push(
        Check::property("functionals.otoba.large", "values above 10³ on R ∈ [−10⁴, 10⁴]", max > 1e3, max)
            .documented("E grows like √R, so 10³ is first exceeded near R ≈ 1.3·10⁴"),
    );
    out.push(Check::property(
        "functionals.otoba.unbounded",
        "E(10⁶) > 10³",
        functionals::otoba_action(1e6).action > 1e3,
        functionals::otoba_action(1e6).action,
    ));
    let mono = functionals::otoba_scan(1.0, 100.0, 100);
    out.push(
        Check::property("functionals.otoba.monotone", "E strictly increasing on R = 1, 2, …, 100", mono.is_increasing(), mono.violations.len() as f64)
            .documented("E peaks near R ≈ 8.34 and dips to ≈ 49.08 near R ≈ 14.4 before increasing again"),
    );
    Ok(out)
}

fn moduli_suite(metric: &PageMetric, rng: &mut ChaCha8Rng) -> Result<Vec<Check>, SuiteError> {
    let mut worst: f64 = 0.0;
    let mut idempotent = true;
    for _ in 0..20 {
        let tau = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.1..3.0));
        let word = Word(
            (0..rng.gen_range(1..8))
                .map(|_| if rng.gen_bool(0.5) { Generator::S } else { Generator::T(rng.gen_range(-3..=3)) })
                .collect(),
        );
        let (a, _) = moduli::reduce_to_fundamental_domain(tau)?;
        let (b, _) = moduli::reduce_to_fundamental_domain(word.apply(tau))?;
        idempotent &= moduli::reduce_to_fundamental_domain(a)?.0 == a;
        worst = worst.max((a - b).norm());
    }
    let rows = moduli::scan_s1(metric, 200, 200)?;
    let in_range = rows.iter().all(|r| r.cos_paper.abs() <= 1.0);
    let both = rows.iter().any(|r| r.cos_paper > 0.0) && rows.iter().any(|r| r.cos_paper < 0.0);
    let r_min = rows.iter().map(|r| r.r_paper).fold(f64::INFINITY, f64::min);
    let cos_gap = rows.iter().map(|r| (r.cos_paper - r.cos_metric).abs()).fold(0.0, f64::max);
    let s3_max = moduli::s3_conformal_coefficient(metric, FRAC_PI_2);
    Ok(vec![
        Check::measured("moduli.invariance", "reduction agrees on 20 PSL(2,ℤ) images", None, worst, worst, 1e-10),
        Check::property("moduli.idempotent", "reducing a reduced point is the identity", idempotent, 20.0),
        Check::property("moduli.S1.cos-range", "printed cos Θ ∈ [−1, 1] on a 200×200 grid", in_range, rows.len() as f64),
        Check::property("moduli.S1.cos-signs", "printed cos Θ attains both signs", both, rows.len() as f64),
        Check::against("moduli.S1.radius-min", "grid minimum of the printed radius function", 0.408520, r_min, 1e-4)
            .documented("the printed formula has minimum C⁻¹fV/2 ≈ 0.46785 at r = θ = π/2"),
        Check::measured(
            "moduli.S1.cos-metric",
            "printed cos Θ vs g_φψ/√(g_φφ g_ψψ)",
            None,
            cos_gap,
            cos_gap,
            1e-12,
        )
        .documented("the printed expression carries an extra factor |cos θ|"),
        Check::against("moduli.S3.coefficient-max", "S3 conformal coefficient at r = π/2", 1.068802, s3_max, 2e-4)
            .with_note("caption value rounded; computed maximum ≈ 1.06873"),
    ])
}
