use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use bandtoep_core::regularity::{build_domain, classify_with_tau};
use bandtoep_core::resolvent::{estimate_norm, EstimateOptions};
use bandtoep_core::scan::{flower_preset, fmt17, grid_scan, log_radii_per_decade, ray_scan, ScanOptions, ScanRecord};
use bandtoep_core::{
    exceptional_set, partition, spectrum_curve, Complex64, Error, LaurentSymbol, NonTangentialDomain, ScanReport,
};
use serde::Serialize;

use crate::args::{parse_radii, Command, EstimateArgs, ExampleName, ScanArgs, ScanKind, SymbolIo};

/// Exit status 1 for mathematical infeasibility, 2 for input and I/O problems.
#[derive(Debug)]
pub enum Failure {
    Domain(String),
    Input(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Input(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Domain(m) | Failure::Input(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_domain_error() {
            Failure::Domain(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(format!("I/O error: {e}"))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Input(format!("CSV error: {e}"))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Input(format!("JSON error: {e}"))
    }
}

type Outcome = Result<(), Failure>;

fn load_symbol(path: &Path) -> Result<LaurentSymbol, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    LaurentSymbol::from_json(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Input(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(out: Option<&Path>, value: &T) -> Outcome {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn write_csv<I: IntoIterator<Item = Vec<String>>>(out: Option<&Path>, header: &[&str], rows: I) -> Outcome {
    let mut w = csv::Writer::from_writer(sink(out)?);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn estimate_options(args: &EstimateArgs, base: EstimateOptions) -> EstimateOptions {
    EstimateOptions {
        probes: args.probes.unwrap_or(base.probes),
        truncation: args.truncation.unwrap_or(base.truncation),
        section: match args.sections {
            Some(0) => None,
            Some(n) => Some(n),
            None => base.section,
        },
        grid: args.sup_grid,
        seed: args.seed,
        ..base
    }
}

pub fn run(command: Command) -> Outcome {
    match command {
        Command::Spectrum { io, n } => spectrum(&io, n),
        Command::Exceptional { io } => exceptional(&io),
        Command::Roots { io, w, tau } => {
            let b = load_symbol(&io.symbol)?;
            write_json(io.out.as_deref(), &partition(&b, w, tau)?)
        }
        Command::Regularity { io, w0, tau } => {
            let b = load_symbol(&io.symbol)?;
            write_json(io.out.as_deref(), &classify_with_tau(&b, w0, tau)?)
        }
        Command::Domain { io, w0, c13, eps, grid } => {
            let b = load_symbol(&io.symbol)?;
            let dom = build_domain(&b, w0, c13, eps)?;
            membership(&b, &dom, grid, io.out.as_deref())
        }
        Command::Resolvent { io, w, est, flip } => {
            let b = load_symbol(&io.symbol)?;
            let opts = EstimateOptions { flip_caveat: flip, ..estimate_options(&est, EstimateOptions::default()) };
            write_json(io.out.as_deref(), &estimate_norm(&b, w, &opts)?)
        }
        Command::Scan { kind } => scan(kind),
        Command::Example { name: ExampleName::Flower { out_dir, est } } => example_flower(&out_dir, &est),
    }
}

fn spectrum(io: &SymbolIo, n: usize) -> Outcome {
    let b = load_symbol(&io.symbol)?;
    let curve = spectrum_curve(&b, n)?;
    write_csv(
        io.out.as_deref(),
        &["theta", "re", "im"],
        curve.thetas.iter().zip(&curve.values).map(|(t, v)| vec![fmt17(*t), fmt17(v.re), fmt17(v.im)]),
    )
}

fn exceptional(io: &SymbolIo) -> Outcome {
    let b = load_symbol(&io.symbol)?;
    let k = exceptional_set(&b)?;
    write_csv(
        io.out.as_deref(),
        &["lambda_re", "lambda_im", "K_re", "K_im"],
        k.lambdas.iter().zip(&k.points).map(|(l, p)| vec![fmt17(l.re), fmt17(l.im), fmt17(p.re), fmt17(p.im)]),
    )
}

fn grid_points(center: Complex64, eps: f64, n: usize) -> Result<Vec<Complex64>, Failure> {
    if n < 2 {
        return Err(Failure::Input(format!("grid size must be at least 2, got {n}")));
    }
    let step = 2.0 * eps / (n - 1) as f64;
    Ok((0..n * n)
        .map(|idx| center + Complex64::new(-eps + step * (idx % n) as f64, -eps + step * (idx / n) as f64))
        .collect())
}

fn membership(b: &LaurentSymbol, dom: &NonTangentialDomain, grid: usize, out: Option<&Path>) -> Outcome {
    use rayon::prelude::*;
    let points = grid_points(dom.w0, dom.eps, grid)?;
    let members = points.par_iter().map(|w| dom.contains(b, *w)).collect::<Result<Vec<bool>, Error>>()?;
    write_csv(
        out,
        &["w_re", "w_im", "member"],
        points.iter().zip(&members).map(|(w, m)| vec![fmt17(w.re), fmt17(w.im), u8::from(*m).to_string()]),
    )
}

fn write_scan_csv(out: Option<&Path>, report: &ScanReport) -> Outcome {
    write_csv(out, &ScanRecord::CSV_HEADER, report.records.iter().map(|r| r.csv_fields().to_vec()))
}

#[derive(Serialize)]
struct ScanSummary<'a> {
    w0: Complex64,
    c13: f64,
    eps: f64,
    delta: f64,
    direction: Option<Complex64>,
    report: &'a ScanReport,
}

fn scan(kind: ScanKind) -> Outcome {
    let (common, direction, radii, grid) = match kind {
        ScanKind::Ray { common, direction, radii } => {
            (common, Some(direction), Some(parse_radii(&radii).map_err(Failure::Input)?), None)
        }
        ScanKind::Grid { common, grid } => (common, None, None, Some(grid)),
    };
    let ScanArgs { io, w0, c13, eps, delta, summary, est } = common;
    let b = load_symbol(&io.symbol)?;
    let dom = build_domain(&b, w0, c13, eps)?;
    let report = match (direction, radii, grid) {
        (Some(dir), Some(radii), _) => {
            let norm = dir.norm();
            if norm == 0.0 {
                return Err(Failure::Input("direction must be nonzero".into()));
            }
            let opts = ScanOptions { estimate: estimate_options(&est, ScanOptions::ray().estimate), require_fit: true };
            ray_scan(&b, &dom, dir / norm, &radii, &opts, "ray")?
        }
        (_, _, Some(n)) => {
            let opts =
                ScanOptions { estimate: estimate_options(&est, ScanOptions::grid().estimate), require_fit: false };
            grid_scan(&b, &dom, eps, n, &opts, "grid")?
        }
        _ => unreachable!("scan kind sets either direction or grid"),
    };
    report_fit(&report);
    write_scan_csv(io.out.as_deref(), &report)?;
    if let Some(path) = summary {
        write_json(Some(&path), &ScanSummary { w0, c13, eps, delta, direction, report: &report })?;
    }
    Ok(())
}

fn report_fit(report: &ScanReport) {
    let show = |x: Option<f64>| x.map_or("n/a".to_string(), |v| format!("{v:.6}"));
    eprintln!(
        "{} records, {} in fit: slope lower {}, upper {}, explicit {}; product max/min {}",
        report.records.len(),
        report.fit_records,
        show(report.slope_fit_lower),
        show(report.slope_fit_upper),
        show(report.slope_fit_explicit),
        show(report.product_max_over_min),
    );
}

#[derive(Serialize)]
struct FlowerSummary<'a> {
    preset_name: &'static str,
    symbol: serde_json::Value,
    w0: Complex64,
    c13: f64,
    eps: f64,
    delta: f64,
    sectors: &'a [(f64, f64)],
    shrunk_sectors: Vec<(f64, f64)>,
    guaranteed_c13: f64,
    exceptional_points: Vec<Complex64>,
    roots_at_w0: Vec<Complex64>,
    domain_coeffs: Vec<Complex64>,
    membership_eps: f64,
    membership_grid: usize,
    membership_fraction: f64,
    ray_direction: Complex64,
    ray: &'a ScanReport,
    /// Observational only: the direction where one cosine vanishes.
    tangential_direction: Complex64,
    tangential: &'a ScanReport,
}

const MEMBERSHIP_EPS: f64 = 0.3;
const MEMBERSHIP_GRID: usize = 101;

fn example_flower(out_dir: &Path, est: &EstimateArgs) -> Outcome {
    use std::f64::consts::PI;
    fs::create_dir_all(out_dir)?;
    let p = flower_preset();
    let b = &p.symbol;

    let curve = spectrum_curve(b, 2048)?;
    write_csv(
        Some(&out_dir.join("curve.csv")),
        &["theta", "re", "im"],
        curve.thetas.iter().zip(&curve.values).map(|(t, v)| vec![fmt17(*t), fmt17(v.re), fmt17(v.im)]),
    )?;

    let map_dom = build_domain(b, p.w0, p.domain.c13, MEMBERSHIP_EPS)?;
    membership(b, &map_dom, MEMBERSHIP_GRID, Some(&out_dir.join("membership.csv")))?;
    let points = grid_points(p.w0, MEMBERSHIP_EPS, MEMBERSHIP_GRID)?;
    let members = points.iter().map(|w| map_dom.contains(b, *w)).collect::<Result<Vec<_>, _>>()?;
    let membership_fraction = members.iter().filter(|m| **m).count() as f64 / members.len() as f64;

    let radii = log_radii_per_decade(1e-1, 1e-4, 8);
    let ray_dir = Complex64::from_polar(1.0, PI / 3.0);
    let opts = ScanOptions { estimate: estimate_options(est, ScanOptions::ray().estimate), require_fit: true };
    let ray = ray_scan(b, &p.domain, ray_dir, &radii, &opts, "flower")?;
    report_fit(&ray);
    write_scan_csv(Some(&out_dir.join("ray.csv")), &ray)?;

    let tan_dir = Complex64::from_polar(1.0, 7.0 * PI / 6.0);
    let tangential =
        ray_scan(b, &p.domain, tan_dir, &radii, &ScanOptions { require_fit: false, ..opts }, "flower-tangential")?;

    let summary = FlowerSummary {
        preset_name: "flower",
        symbol: serde_json::from_str(&b.to_json())?,
        w0: p.w0,
        c13: p.domain.c13,
        eps: p.domain.eps,
        delta: p.delta,
        sectors: &p.sectors,
        shrunk_sectors: p.shrunk_sectors(),
        guaranteed_c13: p.guaranteed_c13(),
        exceptional_points: exceptional_set(b)?.points,
        roots_at_w0: partition(b, p.w0, p.domain.tau)?.root_set.roots,
        domain_coeffs: p.domain.entries.iter().map(|e| e.coeff).collect(),
        membership_eps: MEMBERSHIP_EPS,
        membership_grid: MEMBERSHIP_GRID,
        membership_fraction,
        ray_direction: ray_dir,
        ray: &ray,
        tangential_direction: tan_dir,
        tangential: &tangential,
    };
    write_json(Some(&out_dir.join("summary.json")), &summary)?;
    eprintln!("wrote curve.csv, membership.csv, ray.csv, summary.json to {}", out_dir.display());
    Ok(())
}
