//! Acceptance criteria A1–A11. One line per criterion; exits non-zero if any
//! criterion fails. Tolerances are pinned here and nowhere else.

use std::f64::consts::{FRAC_PI_2, PI};
use std::process::ExitCode;

use num_complex::Complex64;
use page_geometry::connection::{self, paper_connection_table};
use page_geometry::functionals::{self, otoba_action};
use page_geometry::geometry::Coord;
use page_geometry::moduli::{self, Generator, Word};
use page_geometry::profiles::{page_quartic, solve_page_constant};
use page_geometry::submanifolds::{self, FamilyId, SubmanifoldSpec};
use page_geometry::{ChartPoint, PageMetric, ProfileSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x5eed_0a6e;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn metric() -> PageMetric {
    PageMetric::einstein(ProfileSet::new().expect("page constant"))
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
            .unwrap()
        })
        .collect()
}

fn a1() -> Outcome {
    let a = solve_page_constant().unwrap();
    let c = ProfileSet::with_constant(a).c;
    let residual = page_quartic(a).abs();
    let pass = residual < 1e-12 && (a - 0.28170).abs() < 5e-6 && (c - 0.42183).abs() < 5e-6;
    outcome(pass, format!("a = {a:.10}, |p(a)| = {residual:.1e}, C = {c:.8}"))
}

fn a2() -> Outcome {
    let p = ProfileSet::new().unwrap();
    let checks = [
        ("V(π/2)", p.v(FRAC_PI_2), 0.342397, 1e-4),
        ("f(π/2)", p.f(FRAC_PI_2), 1.152811, 1e-4),
        ("V(0)", p.v(0.0), 0.324776, 5e-4),
        ("f(0)", p.f(0.0), 1.061462, 5e-4),
    ];
    let pass = checks.iter().all(|&(_, v, r, t)| (v - r).abs() < t);
    let detail = checks.iter().map(|(n, v, r, _)| format!("{n} = {v:.6} (Δ {:.1e})", (v - r).abs())).collect::<Vec<_>>();
    outcome(pass, detail.join(", "))
}

fn a3(rng: &mut ChaCha8Rng) -> Outcome {
    let m = metric();
    let target = 12.0 * (1.0 + m.profiles().a2);
    let (mut scalar_dev, mut ric_dev): (f64, f64) = (0.0, 0.0);
    for p in random_points(500, 1e-3, rng) {
        let k = connection::curvature(&m, &p).unwrap();
        scalar_dev = scalar_dev.max((k.scalar - target).abs() / target);
        ric_dev = ric_dev.max(k.einstein_residual());
    }
    outcome(
        scalar_dev < 1e-6 && ric_dev < 1e-6,
        format!("500 points: max rel |R − 12(1+a²)| = {scalar_dev:.1e}, max ‖Ric − R/4·I‖∞ = {ric_dev:.1e}"),
    )
}

fn a4(rng: &mut ChaCha8Rng) -> Outcome {
    let m = metric();
    let (mut oracle, mut torsion, mut skew): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for p in random_points(100, 0.05, rng) {
        let solved = connection::connection(&m, &p).unwrap();
        let c = connection::commutation_coefficients(&m, &p).unwrap();
        let fd = connection::connection_from_christoffels(&m, &p, 1e-4).unwrap();
        oracle = oracle.max(solved.max_abs_difference(&fd));
        torsion = torsion.max(solved.torsion_residual(&c));
        skew = skew.max(solved.skew_residual());
    }
    outcome(
        oracle < 5e-5 && torsion < 1e-10 && skew < 1e-12,
        format!("100 points: oracle Δ = {oracle:.1e}, torsion = {torsion:.1e}, skew = {skew:.1e}"),
    )
}

fn a5() -> Outcome {
    let m = metric();
    let mut failing = Vec::new();
    let mut worst: f64 = 0.0;
    for spec in submanifolds::catalog() {
        let rep = submanifolds::is_totally_geodesic(&m, &spec, 7, 5, 1e-8).unwrap();
        worst = worst.max(rep.max_ii);
        if !rep.pass {
            failing.push(format!("{}({:.2})", spec.id, rep.max_ii));
        }
    }
    outcome(failing.is_empty(), format!("max|II| = {worst:.3}; not totally geodesic: {}", failing.join(" ")))
}

fn gaussian(m: &PageMetric, spec: &SubmanifoldSpec, q: &[f64]) -> f64 {
    submanifolds::induced_curvature(m, spec, q).unwrap().gaussian().unwrap()
}

fn a6() -> Outcome {
    let m = metric();
    let grid = |spec: &SubmanifoldSpec| submanifolds::free_grid(spec, 9);
    let mut flat: f64 = 0.0;
    for id in [FamilyId::S1, FamilyId::S3] {
        let spec = SubmanifoldSpec::family(id);
        for q in grid(&spec) {
            flat = flat.max(gaussian(&m, &spec, &q).abs());
        }
    }
    let s6 = SubmanifoldSpec::family(FamilyId::S6);
    let ks: Vec<f64> = grid(&s6).iter().map(|q| gaussian(&m, &s6, q)).collect();
    let mean = ks.iter().sum::<f64>() / ks.len() as f64;
    let sd = (ks.iter().map(|k| (k - mean).powi(2)).sum::<f64>() / ks.len() as f64).sqrt();
    let printed = 4.0 / m.profiles().f(s6.fixed_value(Coord::R).unwrap());
    let s6_dev = ks.iter().map(|k| (k - printed).abs()).fold(0.0, f64::max);
    let mut brioschi: f64 = 0.0;
    for id in [FamilyId::S2, FamilyId::S4, FamilyId::S5] {
        let spec = SubmanifoldSpec::family(id);
        for q in submanifolds::free_grid(&spec, 6) {
            let k = gaussian(&m, &spec, &q);
            let b = submanifolds::brioschi_curvature(&m, &spec, &q, 1e-3).unwrap();
            brioschi = brioschi.max((k - b).abs());
        }
    }
    outcome(
        flat < 1e-9 && sd < 1e-10 && s6_dev < 1e-10 && brioschi < 1e-5,
        format!(
            "S1/S3 max|K| = {flat:.1e}; S6 K sd = {sd:.3}, max|K − 4/f| = {s6_dev:.3}; Brioschi Δ = {brioschi:.1e}"
        ),
    )
}

fn a7() -> Outcome {
    let m = metric();
    let s5 = submanifolds::gauss_bonnet(&m, &SubmanifoldSpec::family(FamilyId::S5), 1e-10).unwrap();
    let s6 = submanifolds::gauss_bonnet(&m, &SubmanifoldSpec::family(FamilyId::S6), 1e-10).unwrap();
    let target = 4.0 * PI;
    let (d5, d6) = ((s5.integral - target).abs(), (s6.printed_integral - target).abs());
    outcome(
        d5 < 1e-6 && d6 < 1e-10,
        format!(
            "S5 ∫K dA = {:.10} (Δ {d5:.1e}); S6 (4/f)·area = {:.6} (Δ {d6:.3}), pipeline ∫K dA = {:.1e}",
            s5.integral, s6.printed_integral, s6.integral
        ),
    )
}

fn a8() -> Outcome {
    let m = metric();
    let vol = functionals::page_volume(&m, 1e-10).unwrap();
    let rel = (vol.closed_form - vol.quadrature.value).abs() / vol.closed_form;
    let eh = functionals::einstein_hilbert_page(&m);
    let e_dev = (eh.from_closed_volume - 23.694254).abs();
    let b = functionals::reference_bounds();
    let bounds = (b.aubin - 61.562393).abs() < 1e-5 && (b.conjectured - 53.314598).abs() < 1e-5;
    let ordering = eh.from_closed_volume < 53.314598 && 53.314598 < 61.562393;
    outcome(
        rel < 1e-6 && e_dev < 1e-5 && bounds && ordering,
        format!(
            "Vol closed = {:.6}, quadrature = {:.6} (rel Δ {rel:.2}), printed integrand = {:.6}; \
             E = {:.6} (Δ {e_dev:.1e}); bounds {}; ordering {}",
            vol.closed_form,
            vol.quadrature.value,
            vol.printed_integrand.value,
            eh.from_closed_volume,
            if bounds { "ok" } else { "off" },
            if ordering { "ok" } else { "violated" },
        ),
    )
}

fn a9() -> Outcome {
    let spot = otoba_action(8.0).action;
    let expected = 8.0 * 2.0f64.powf(0.25) * PI.powf(1.5);
    let spot_rel = (spot - expected).abs() / expected;
    let samples: Vec<_> = (0..=20_000).map(|i| otoba_action(-1e4 + i as f64)).collect();
    let k_ok = samples.iter().all(|v| v.k_squared > 0.0 && v.k_squared < 1.0);
    let min = samples.iter().map(|v| v.action).fold(f64::INFINITY, f64::min);
    let max = samples.iter().map(|v| v.action).fold(f64::NEG_INFINITY, f64::max);
    outcome(
        spot_rel < 1e-10 && k_ok && min < 1e-2 && max > 1e3,
        format!("E(8) rel Δ = {spot_rel:.1e}; k² ∈ (0,1): {k_ok}; scan min = {min:.1}, max = {max:.2}"),
    )
}

fn a10(rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut idempotent = true;
    for _ in 0..20 {
        let tau = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.1..3.0));
        let word = Word(
            (0..rng.gen_range(1..8))
                .map(|_| if rng.gen_bool(0.5) { Generator::S } else { Generator::T(rng.gen_range(-3..=3)) })
                .collect(),
        );
        let (a, _) = moduli::reduce_to_fundamental_domain(tau).unwrap();
        let (b, _) = moduli::reduce_to_fundamental_domain(word.apply(tau)).unwrap();
        idempotent &= moduli::reduce_to_fundamental_domain(a).unwrap().0 == a;
        worst = worst.max((a - b).norm());
    }
    let printed = PageMetric::as_printed(ProfileSet::new().unwrap());
    let rows = moduli::scan_s1(&printed, 200, 200).unwrap();
    let in_range = rows.iter().all(|r| r.cos_paper.abs() <= 1.0);
    let both_signs = rows.iter().any(|r| r.cos_paper > 0.0) && rows.iter().any(|r| r.cos_paper < 0.0);
    let r_min = rows.iter().map(|r| r.r_paper).fold(f64::INFINITY, f64::min);
    outcome(
        idempotent && worst < 1e-10 && in_range && both_signs,
        format!(
            "20 transforms: max Δ = {worst:.1e}, idempotent {idempotent}; cosΘ in [−1,1] {in_range}, both signs \
             {both_signs}; grid min R = {r_min:.5} vs printed 0.408520 (Δ {:.3}, discrepancy-documented)",
            r_min - 0.408520
        ),
    )
}

fn a11() -> Outcome {
    let m = metric();
    let p = ChartPoint::new(1.0, 0.3, 0.5, 1.2).unwrap();
    let table = paper_connection_table(&m, &p).unwrap();
    let typo = |form: &str, basis: &str| table.find(form, basis).is_some_and(|e| e.known_typo && e.deviation > 1e-6);
    let omega = typo("omega^1_0", "e3") && typo("omega^3_0", "e1") && typo("omega^3_0", "e3");
    let others = table.max_deviation(false);
    let n1 = submanifolds::paper_curvature_formula(&m, &SubmanifoldSpec::family(FamilyId::N1), &[0.3, 0.5, 1.2]).unwrap();
    let zeros: Vec<_> = n1.iter().filter(|e| e.printed == 0.0).collect();
    let n1_ok = !zeros.is_empty() && zeros.iter().all(|e| e.known_typo && e.deviation > 1e-6);
    outcome(
        omega && n1_ok && others < 1e-10,
        format!(
            "ω¹₀/ω³₀ csc θ entries flagged {omega}; other entries max Δ = {others:.1e}; N1 printed zeros flagged {n1_ok} ({} entries)",
            zeros.len()
        ),
    )
}

fn main() -> ExitCode {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let results = [
        ("A1", "Page constant", a1()),
        ("A2", "profile captions", a2()),
        ("A3", "Einstein pipeline", a3(&mut rng)),
        ("A4", "connection cross-validation", a4(&mut rng)),
        ("A5", "totally geodesic families", a5()),
        ("A6", "surface curvature", a6()),
        ("A7", "Gauss–Bonnet", a7()),
        ("A8", "volume and functional", a8()),
        ("A9", "Otoba action", a9()),
        ("A10", "moduli", a10(&mut rng)),
        ("A11", "known-typo comparators", a11()),
    ];
    let mut failed = 0;
    for (id, name, o) in &results {
        println!("{id:<4} {} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
