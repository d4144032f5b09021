//! CSV writers for figure data. Every file starts with `# source: <id>`,
//! then a header row.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use page_geometry::moduli::{self, ModuliError};
use page_geometry::profiles::page_quartic;
use page_geometry::PageMetric;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileFn {
    V,
    F,
    Quartic,
    ConformalS3,
    RadiusS1,
    RadS6,
}

impl std::str::FromStr for ProfileFn {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "V" | "v" => Ok(ProfileFn::V),
            "f" | "F" => Ok(ProfileFn::F),
            "quartic" => Ok(ProfileFn::Quartic),
            "conformal-s3" => Ok(ProfileFn::ConformalS3),
            "radius-s1" => Ok(ProfileFn::RadiusS1),
            "rad-s6" => Ok(ProfileFn::RadS6),
            other => Err(format!("unknown function {other:?}")),
        }
    }
}

impl ProfileFn {
    pub fn source(self) -> &'static str {
        match self {
            ProfileFn::V => "fig1",
            ProfileFn::F => "fig2",
            ProfileFn::Quartic => "fig3",
            ProfileFn::ConformalS3 => "fig4",
            ProfileFn::RadiusS1 => "fig6",
            ProfileFn::RadS6 => "fig8",
        }
    }
}

/// Range of the quartic plot; contains both real roots.
pub const QUARTIC_RANGE: (f64, f64) = (-6.0, 1.0);

pub struct Table {
    pub source: String,
    pub comments: Vec<String>,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn write_to<W: Write>(&self, w: W) -> io::Result<()> {
        let mut w = io::BufWriter::new(w);
        writeln!(w, "# source: {}", self.source)?;
        for c in &self.comments {
            writeln!(w, "# {c}")?;
        }
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(&self.header)?;
        for row in &self.rows {
            csv.write_record(row.iter().map(|v| v.to_string()))?;
        }
        csv.flush()
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        self.write_to(File::create(path)?)
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

pub fn profile_table(metric: &PageMetric, which: ProfileFn, samples: usize) -> Result<Table, ModuliError> {
    let p = metric.profiles();
    let (header, comments, rows): (Vec<&'static str>, Vec<String>, Vec<Vec<f64>>) = match which {
        ProfileFn::V => (vec!["r", "V"], vec![], linspace(0.0, PI, samples).into_iter().map(|r| vec![r, p.v(r)]).collect()),
        ProfileFn::F => (vec!["r", "f"], vec![], linspace(0.0, PI, samples).into_iter().map(|r| vec![r, p.f(r)]).collect()),
        ProfileFn::Quartic => (
            vec!["x", "p"],
            vec![format!("range: x in [{}, {}]; root in (0,1) at a = {:.12}", QUARTIC_RANGE.0, QUARTIC_RANGE.1, p.a)],
            linspace(QUARTIC_RANGE.0, QUARTIC_RANGE.1, samples).into_iter().map(|x| vec![x, page_quartic(x)]).collect(),
        ),
        ProfileFn::ConformalS3 => (
            vec!["r", "coefficient"],
            vec!["coefficient = C sin^2 r / (f V) with the printed C".into()],
            linspace(0.0, PI, samples)
                .into_iter()
                .map(|r| vec![r, p.c * r.sin().powi(2) / (p.f(r) * p.v(r))])
                .collect(),
        ),
        ProfileFn::RadiusS1 => {
            let mut rows = Vec::new();
            for r in moduli::interior_grid(samples) {
                for t in moduli::interior_grid(samples) {
                    let lat = moduli::torus_invariants_s1(metric, r, t)?;
                    let g_ratio = 0.5 * (lat.l_other / lat.l_psi * 2.0).powi(2);
                    rows.push(vec![r, t, lat.r_paper, g_ratio]);
                }
            }
            (
                vec!["r0", "theta0", "R_printed", "R_metric"],
                vec!["R_printed uses the printed C; R_metric = g_phiphi / (2 g_psipsi) for the metric in use".into()],
                rows,
            )
        }
        ProfileFn::RadS6 => (
            vec!["r", "rad"],
            vec!["rad = f^2 / 16".into()],
            linspace(0.0, PI, samples).into_iter().map(|r| vec![r, p.f(r).powi(2) / 16.0]).collect(),
        ),
    };
    Ok(Table { source: which.source().into(), comments, header, rows })
}

pub fn moduli_s1_table(metric: &PageMetric, n_r: usize, n_theta: usize) -> Result<Table, ModuliError> {
    let rows = moduli::scan_s1(metric, n_r, n_theta)?
        .into_iter()
        .map(|r| {
            vec![r.r0, r.theta0, r.r_paper, r.cos_paper, r.cos_metric, r.tau.re, r.tau.im, r.tau_reduced.re, r.tau_reduced.im]
        })
        .collect();
    Ok(Table {
        source: "fig6".into(),
        comments: vec![format!("tau = (L_phi / L_psi) e^(i Theta), normalization {}", metric.normalization())],
        header: vec!["r0", "theta0", "R_printed", "cos_printed", "cos_metric", "tau_re", "tau_im", "reduced_re", "reduced_im"],
        rows,
    })
}

pub fn moduli_s3_table(metric: &PageMetric, n_r: usize) -> Result<Table, ModuliError> {
    let rows = moduli::scan_s3(metric, n_r)?
        .into_iter()
        .map(|r| {
            vec![
                r.r0,
                r.coefficient,
                r.sqrt_coefficient,
                r.period_ratio,
                r.tau_reduced.im,
                r.coefficient_reduced.im,
                r.sqrt_coefficient_reduced.im,
            ]
        })
        .collect();
    Ok(Table {
        source: "fig7".into(),
        comments: vec![
            "three readings of the torus height: coefficient, its square root, and L_theta / L_psi".into(),
            format!("normalization {}", metric.normalization()),
        ],
        header: vec![
            "r0",
            "coefficient",
            "sqrt_coefficient",
            "period_ratio",
            "period_ratio_reduced",
            "coefficient_reduced",
            "sqrt_coefficient_reduced",
        ],
        rows,
    })
}

pub fn otoba_table(r_min: f64, r_max: f64, samples: usize) -> Table {
    let scan = page_geometry::functionals::otoba_scan(r_min, r_max, samples);
    Table {
        source: "otoba".into(),
        comments: vec![format!("non-increasing steps: {}", scan.violations.len())],
        header: vec!["R", "E"],
        rows: scan.samples.into_iter().map(|(r, e)| vec![r, e]).collect(),
    }
}
