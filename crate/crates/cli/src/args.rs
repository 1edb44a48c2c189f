use std::path::PathBuf;

use bandtoep_core::Complex64;
use clap::{Args, Parser, Subcommand};

/// Spectra, local regularity and resolvent-norm bounds for banded Toeplitz operators.
#[derive(Debug, Parser)]
#[command(name = "bandtoep", version = concat!(env!("CARGO_PKG_VERSION"), " (", env!("CARGO_PKG_NAME"), ")"))]
pub struct Cli {
    /// Worker threads for scans and probes (default: all cores).
    #[arg(long, global = true, env = "BANDTOEP_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample the curve b(T) as CSV: theta,re,im.
    Spectrum {
        #[command(flatten)]
        io: SymbolIo,
        /// Number of samples.
        #[arg(long, short = 'n', default_value_t = 2048)]
        n: usize,
    },
    /// Critical points and values as CSV: lambda_re,lambda_im,K_re,K_im.
    Exceptional {
        #[command(flatten)]
        io: SymbolIo,
    },
    /// Roots of z^m (b(z) - w) with their location labels, as JSON.
    Roots {
        #[command(flatten)]
        io: SymbolIo,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        w: Complex64,
        #[arg(long, default_value_t = bandtoep_core::DEFAULT_TAU, value_parser = parse_positive)]
        tau: f64,
    },
    /// Local-regularity report at a boundary point, as JSON.
    Regularity {
        #[command(flatten)]
        io: SymbolIo,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        w0: Complex64,
        #[arg(long, default_value_t = bandtoep_core::DEFAULT_TAU, value_parser = parse_positive)]
        tau: f64,
    },
    /// Domain membership on a grid over w0 + [-eps, eps]^2, as CSV: w_re,w_im,member.
    Domain {
        #[command(flatten)]
        io: SymbolIo,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        w0: Complex64,
        #[arg(long = "C13", value_parser = parse_positive)]
        c13: f64,
        #[arg(long, value_parser = parse_positive)]
        eps: f64,
        #[arg(long, default_value_t = 101)]
        grid: usize,
    },
    /// Two-sided resolvent-norm estimate with diagnostics, as JSON.
    Resolvent {
        #[command(flatten)]
        io: SymbolIo,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        w: Complex64,
        #[command(flatten)]
        est: EstimateArgs,
        /// Also estimate the finite section of the flipped symbol b(1/z).
        #[arg(long)]
        flip: bool,
    },
    /// Ray or grid scan near a boundary point.
    Scan {
        #[command(subcommand)]
        kind: ScanKind,
    },
    /// Reproduce a preset experiment into a directory.
    Example {
        #[command(subcommand)]
        name: ExampleName,
    },
}

#[derive(Debug, Subcommand)]
pub enum ScanKind {
    /// Records at w0 + r direction for each radius.
    Ray {
        #[command(flatten)]
        common: ScanArgs,
        /// Unit direction, "re,im" or "deg:x".
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        direction: Complex64,
        /// Decreasing radii: a comma list, or "hi:lo:per_decade" for log spacing.
        #[arg(long, default_value = "1e-1:1e-4:8")]
        radii: String,
    },
    /// Records on a grid over w0 + [-eps, eps]^2.
    Grid {
        #[command(flatten)]
        common: ScanArgs,
        #[arg(long, default_value_t = 101)]
        grid: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum ExampleName {
    /// b(z) = z^{-1} + z^2 at w0 = 0: curve.csv, membership.csv, ray.csv, summary.json.
    Flower {
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[command(flatten)]
        est: EstimateArgs,
    },
}

#[derive(Debug, Args)]
pub struct SymbolIo {
    /// Symbol JSON file: {"m": 1, "k": 2, "coeffs": {"-1": [1, 0], "2": [1, 0]}}.
    #[arg(long)]
    pub symbol: PathBuf,
    /// Output file (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub io: SymbolIo,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub w0: Complex64,
    #[arg(long = "C13", default_value_t = 1.0 / 12.0, value_parser = parse_positive)]
    pub c13: f64,
    #[arg(long, default_value_t = 0.25, value_parser = parse_positive)]
    pub eps: f64,
    /// Sector shrinkage reported with the scan (radians).
    #[arg(long, default_value_t = std::f64::consts::PI / 36.0, value_parser = parse_positive)]
    pub delta: f64,
    /// Also write the full report (statistics and per-record diagnostics) as JSON.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    #[command(flatten)]
    pub est: EstimateArgs,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct EstimateArgs {
    /// Random unit probes for the lower bound.
    #[arg(long)]
    pub probes: Option<usize>,
    /// Truncation degree of probe vectors.
    #[arg(long = "N")]
    pub truncation: Option<usize>,
    /// Finite-section size; 0 disables sections.
    #[arg(long)]
    pub sections: Option<usize>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Circle grid for sup norms.
    #[arg(long = "sup-grid", default_value_t = 4096)]
    pub sup_grid: usize,
}

/// `"re,im"`, a bare real `"x"`, or `"deg:x"` for `e^{i x pi / 180}`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let s = s.trim();
    if let Some(deg) = s.strip_prefix("deg:") {
        let x: f64 = deg.trim().parse().map_err(|_| format!("bad angle {deg:?}"))?;
        return Ok(Complex64::from_polar(1.0, x.to_radians()));
    }
    let parts: Vec<&str> = s.split(',').collect();
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad number {t:?} in {s:?}"));
    let z = match parts.as_slice() {
        [re] => Complex64::new(num(re)?, 0.0),
        [re, im] => Complex64::new(num(re)?, num(im)?),
        _ => return Err(format!("expected \"re,im\" or \"deg:x\", got {s:?}")),
    };
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(format!("non-finite value {s:?}"))
    }
}

pub fn parse_positive(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

/// Comma list, or `hi:lo:per_decade`.
pub fn parse_radii(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if let [hi, lo, per] = parts.as_slice() {
        let hi = parse_positive(hi)?;
        let lo = parse_positive(lo)?;
        let per: usize = per.trim().parse().map_err(|_| format!("bad points per decade {per:?}"))?;
        if lo >= hi || per == 0 {
            return Err(format!("radii range {s:?} must be hi:lo:per_decade with hi > lo"));
        }
        return Ok(bandtoep_core::scan::log_radii_per_decade(hi, lo, per));
    }
    s.split(',').map(parse_positive).collect()
}
