//! Argument handling and command execution for the `splinegen` binary.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::json;
use splinegen::analysis::{self, StudyReport};
use splinegen::bspline::ComplexOrder;
use splinegen::expspline::RateTuple;
use splinegen::selfref::{
    make_fractal_complex_exp, make_fractal_complex_poly, make_fractal_exp, make_fractal_poly, FixedPointHandle,
    Partition,
};
use splinegen::{Family, GridSpec, SplineError};
use thiserror::Error;

pub const DEFAULT_TOL: f64 = 1e-8;
pub const TOL_ENV: &str = "SPLINEGEN_TOL";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Spline(#[from] SplineError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Numerical breakdowns count as a failed run; everything else is a usage or
    /// validation problem.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Spline(
                SplineError::MaxIterExceeded { .. }
                | SplineError::QuadratureNonConvergence { .. }
                | SplineError::SingularSystem,
            ) => EXIT_FAIL,
            _ => EXIT_USAGE,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(CliError::Usage(msg.into()))
}

/// `re,im`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexArg(pub Complex64);

impl FromStr for ComplexArg {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (re, im) = s.split_once(',').ok_or_else(|| format!("expected re,im, got {s:?}"))?;
        let p = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
        Ok(ComplexArg(Complex64::new(p(re)?, p(im)?)))
    }
}

/// Comma-separated reals.
#[derive(Debug, Clone, PartialEq)]
pub struct ListArg(pub Vec<f64>);

impl FromStr for ListArg {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(ListArg)
    }
}

/// `start:stop:step[:offset]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridArg(pub GridSpec);

impl FromStr for GridArg {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts = s
            .split(':')
            .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let (start, stop, step, offset) = match parts[..] {
            [a, b, c] => (a, b, c, 0.0),
            [a, b, c, d] => (a, b, c, d),
            _ => return Err(format!("expected start:stop:step[:offset], got {s:?}")),
        };
        GridSpec::new(start, stop, step, offset)
            .map(GridArg)
            .map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    Poly,
    ComplexPoly,
    Exp,
    ComplexExp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PartitionKind {
    Bounded,
    ArctanShift,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub family: FamilyKind,
    /// Integer order (poly).
    #[arg(long)]
    pub n: Option<usize>,
    /// Complex order as re,im (complex-poly, complex-exp).
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<ComplexArg>,
    /// Rate tuple a1,...,aN (exp) or the single rate a (complex-exp).
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<ListArg>,
}

#[derive(Debug, Clone, Args)]
pub struct FractalArgs {
    /// Scaling factors; switches sampling to the self-referential fixed point.
    #[arg(long, allow_hyphen_values = true)]
    pub alphas: Option<ListArg>,
    /// Defaults to bounded for poly/exp and arctan-shift for complex families.
    #[arg(long, value_enum)]
    pub partition: Option<PartitionKind>,
    /// Knots 0,x1,...,x_{N-1} of an arctan-shift partition; default 0,1,...,N-1.
    #[arg(long)]
    pub knots: Option<ListArg>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    pub output: OutputFormat,
    /// Write here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    pub fractal: FractalArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub grid: GridArg,
    /// Evaluation tolerance for fixed points (default: $SPLINEGEN_TOL or 1e-8).
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FourierArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Frequency grid start:stop:step[:offset].
    #[arg(long, allow_hyphen_values = true)]
    pub omegas: GridArg,
    /// Quadrature tolerance (default: $SPLINEGEN_TOL or 1e-8).
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ReportOut {
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct FractalStudyArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    pub fractal: FractalArgs,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Study {
    /// ∫ f against f̂(0).
    Integral {
        #[command(flatten)]
        family: FamilyArgs,
        /// Default 1e-10 for compact families, 1e-4 otherwise.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// B_m ∗ B_n against B_{m+n}.
    Convolution {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Distance of B_n to the limiting Gaussian.
    GaussianLimit {
        #[arg(long, default_value = "8,16,24")]
        orders: ListArg,
    },
    /// Log-log slope of |B_z|.
    Decay {
        #[arg(long, allow_hyphen_values = true)]
        z: ComplexArg,
        /// Default: 8 points from 10 to 40, or the last unit of the support for integer z.
        #[arg(long)]
        xs: Option<ListArg>,
    },
    /// Empirical order of periodic cardinal interpolation of sin(2πx).
    InterpOrder {
        #[arg(long)]
        n: usize,
        /// Cells per unit, each twice the previous.
        #[arg(long, default_value = "8,16,32,64")]
        meshes: ListArg,
    },
    /// Riesz bounds of the integer shifts of B_z.
    Riesz {
        #[arg(long, allow_hyphen_values = true)]
        z: ComplexArg,
        #[arg(long, default_value_t = 64)]
        k: usize,
        #[arg(long, default_value_t = 256)]
        omega_points: usize,
    },
    /// Σ_j B_z(x − j) = 1.
    PartitionUnity {
        #[arg(long, allow_hyphen_values = true)]
        z: ComplexArg,
        #[arg(long, default_value = "45,50")]
        window: ListArg,
        #[arg(long, default_value = "0,60")]
        shifts: ListArg,
    },
    /// Self-referential residual at random points.
    Residual {
        #[command(flatten)]
        system: FractalStudyArgs,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Evaluation tolerance (default: $SPLINEGEN_TOL or 1e-8).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Observed contraction ratio of grid iteration.
    Contraction {
        #[command(flatten)]
        system: FractalStudyArgs,
        #[arg(long, default_value_t = 256)]
        m: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 5000)]
        max_iter: usize,
    },
    /// Join-up of Tg at interior knots.
    Joinup {
        #[command(flatten)]
        system: FractalStudyArgs,
        #[arg(long, default_value_t = 256)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        iterations: usize,
        /// Default N − 2 (at most 3) inside the smoothness regime, 0 outside.
        #[arg(long)]
        max_order: Option<usize>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Sample a family, or its fractal fixed point when --alphas is given.
    Sample(SampleArgs),
    /// Same as sample; --alphas is required.
    Fractal(SampleArgs),
    /// Closed-form transform next to the quadrature value.
    Fourier(FourierArgs),
    /// Run one verification study and print its JSON report.
    Verify {
        #[command(subcommand)]
        study: Study,
        #[command(flatten)]
        out: ReportOut,
    },
    /// Run every study with its reference parameters.
    Study {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: ReportOut,
    },
}

#[derive(Debug, Clone, Parser)]
#[command(name = "splinegen", version, about = "B-splines of integer and complex order and their fractal extensions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Explicit value, else $SPLINEGEN_TOL, else 1e-8.
pub fn resolve_tol(explicit: Option<f64>) -> Result<f64> {
    let tol = match explicit {
        Some(t) => t,
        None => match std::env::var(TOL_ENV) {
            Ok(s) => s
                .trim()
                .parse::<f64>()
                .map_err(|e| CliError::Usage(format!("{TOL_ENV}={s:?}: {e}")))?,
            Err(_) => DEFAULT_TOL,
        },
    };
    if !(tol > 0.0) || !tol.is_finite() {
        return usage(format!("tolerance must be positive, got {tol}"));
    }
    Ok(tol)
}

impl FamilyArgs {
    fn order(&self) -> Result<ComplexOrder> {
        match self.z {
            Some(ComplexArg(z)) => Ok(ComplexOrder::new(z)?),
            None => usage("--z re,im is required for complex families"),
        }
    }

    fn single_rate(&self) -> Result<f64> {
        match &self.a {
            Some(ListArg(v)) if v.len() == 1 => Ok(v[0]),
            Some(_) => usage("complex-exp takes a single rate --a"),
            None => usage("--a is required for complex-exp"),
        }
    }

    fn rates(&self) -> Result<RateTuple> {
        match &self.a {
            Some(ListArg(v)) => Ok(RateTuple::new(v.clone())?),
            None => usage("--a a1,...,aN is required for exp"),
        }
    }

    fn integer(&self) -> Result<usize> {
        self.n.ok_or_else(|| CliError::Usage("--n is required for poly".into()))
    }

    pub fn build(&self) -> Result<Family> {
        Ok(match self.family {
            FamilyKind::Poly => Family::poly(self.integer()?)?,
            FamilyKind::ComplexPoly => {
                let z = self.order()?;
                Family::complex_poly(z.re(), z.im())?
            }
            FamilyKind::Exp => Family::exp(self.rates()?.to_vec())?,
            FamilyKind::ComplexExp => {
                let z = self.order()?;
                Family::complex_exp(z.re(), z.im(), self.single_rate()?)?
            }
        })
    }
}

fn arctan_partition(maps: usize, knots: &Option<ListArg>) -> Result<Partition> {
    let knots = match knots {
        Some(ListArg(k)) => k.clone(),
        None => (0..maps).map(|i| i as f64).collect(),
    };
    if knots.len() != maps {
        return usage(format!("{} knots for {maps} maps", knots.len()));
    }
    Ok(Partition::arctan_shift(knots)?)
}

/// Fixed-point handle for the family and scaling vector, or `None` without --alphas.
pub fn build_fractal(family: &FamilyArgs, fractal: &FractalArgs, tol: f64) -> Result<Option<FixedPointHandle>> {
    let Some(ListArg(alphas)) = &fractal.alphas else {
        return Ok(None);
    };
    let maps = alphas.len();
    let complex = matches!(family.family, FamilyKind::ComplexPoly | FamilyKind::ComplexExp);
    let partition = fractal.partition.unwrap_or(if complex {
        PartitionKind::ArctanShift
    } else {
        PartitionKind::Bounded
    });
    let handle = match (family.family, partition) {
        (FamilyKind::Poly, PartitionKind::Bounded) => {
            let n = family.integer()?;
            if n != maps {
                return usage(format!("poly of order {n} needs {n} scaling factors, got {maps}"));
            }
            make_fractal_poly(n, alphas.clone())?
        }
        (FamilyKind::Exp, PartitionKind::Bounded) => make_fractal_exp(family.rates()?, alphas.clone())?,
        (FamilyKind::ComplexPoly, PartitionKind::ArctanShift) => {
            make_fractal_complex_poly(family.order()?, alphas.clone(), arctan_partition(maps, &fractal.knots)?)?
        }
        (FamilyKind::ComplexExp, PartitionKind::ArctanShift) => make_fractal_complex_exp(
            family.order()?,
            family.single_rate()?,
            alphas.clone(),
            arctan_partition(maps, &fractal.knots)?,
        )?,
        (_, PartitionKind::Bounded) => return usage("complex families need --partition arctan-shift"),
        (_, PartitionKind::ArctanShift) => return usage("poly and exp fractals need --partition bounded"),
    };
    Ok(Some(handle.with_tol(tol)))
}

fn fmt_f(v: f64) -> String {
    format!("{v:.16e}")
}

fn render(format: OutputFormat, columns: &[&str], rows: &[Vec<f64>]) -> String {
    match format {
        OutputFormat::Csv => {
            let mut s = columns.join(",");
            s.push('\n');
            for row in rows {
                let cells: Vec<String> = row.iter().map(|&v| fmt_f(v)).collect();
                let _ = writeln!(s, "{}", cells.join(","));
            }
            s
        }
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&json!({ "columns": columns, "rows": rows }))
                .expect("finite rows serialize");
            s.push('\n');
            s
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

pub fn cmd_sample(args: &SampleArgs, require_alphas: bool, stdout: &mut dyn Write) -> Result<i32> {
    if require_alphas && args.fractal.alphas.is_none() {
        return usage("fractal needs --alphas");
    }
    let tol = resolve_tol(args.tol)?;
    let family = args.family.build()?;
    let fractal = build_fractal(&args.family, &args.fractal, tol)?;
    let nodes = args.grid.0.nodes();
    let values: Vec<Complex64> = match &fractal {
        Some(h) => nodes.par_iter().map(|&x| h.eval(x)).collect(),
        None => nodes.par_iter().map(|&x| family.eval(x)).collect(),
    };
    let rows: Vec<Vec<f64>> = nodes.iter().zip(&values).map(|(&x, v)| vec![x, v.re, v.im]).collect();
    emit(&args.output.out, &render(args.output.output, &["x", "re", "im"], &rows), stdout)?;
    Ok(EXIT_PASS)
}

pub fn cmd_fourier(args: &FourierArgs, stdout: &mut dyn Write) -> Result<i32> {
    let tol = resolve_tol(args.tol)?;
    let family = args.family.build()?;
    let omegas = args.omegas.0.nodes();
    let rows = omegas
        .par_iter()
        .map(|&w| {
            let closed = family.closed_ft(w)?;
            let numeric = family.numeric_ft(w, tol)?.value;
            Ok(vec![w, closed.re, closed.im, numeric.re, numeric.im, (closed - numeric).norm()])
        })
        .collect::<std::result::Result<Vec<_>, SplineError>>()?;
    let columns = ["omega", "closed_re", "closed_im", "numeric_re", "numeric_im", "abs_err"];
    emit(&args.output.out, &render(args.output.output, &columns, &rows), stdout)?;
    Ok(EXIT_PASS)
}

fn as_usize_list(l: &ListArg, what: &str) -> Result<Vec<usize>> {
    l.0.iter()
        .map(|&v| {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                usage(format!("{what}: {v} is not a non-negative integer"))
            }
        })
        .collect()
}

fn pair(l: &ListArg, what: &str) -> Result<(f64, f64)> {
    match l.0[..] {
        [a, b] => Ok((a, b)),
        _ => usage(format!("{what} takes two values")),
    }
}

fn fractal_handle(system: &FractalStudyArgs, tol: f64) -> Result<FixedPointHandle> {
    build_fractal(&system.family, &system.fractal, tol)?.ok_or_else(|| CliError::Usage("--alphas is required".into()))
}

/// Evaluation points for the decay fit when none are given: geometric from 10 to
/// 40, or the last unit of the support for integer orders.
pub fn default_decay_points(z: ComplexOrder) -> Vec<f64> {
    match z.as_integer() {
        Some(n) => (0..5).map(|k| n as f64 - 1.0 + 0.18 * k as f64).collect(),
        None => (0..8).map(|k| 10.0 * 4f64.powf(k as f64 / 7.0)).collect(),
    }
}

pub fn omega_grid(points: usize) -> Vec<f64> {
    (0..points).map(|k| 2.0 * PI * k as f64 / points as f64).collect()
}

pub fn run_study(study: &Study) -> Result<StudyReport> {
    Ok(match study {
        Study::Integral { family, tol } => {
            let f = family.build()?;
            let tol = tol.unwrap_or(if f.is_compact() { 1e-10 } else { 1e-4 });
            analysis::integral_check(&f, tol)?
        }
        Study::Convolution { m, n, tol } => analysis::convolution_check(*m, *n, *tol)?,
        Study::GaussianLimit { orders } => analysis::gaussian_limit(&as_usize_list(orders, "orders")?)?,
        Study::Decay { z, xs } => {
            let z = ComplexOrder::new(z.0)?;
            let xs = xs.as_ref().map(|l| l.0.clone()).unwrap_or_else(|| default_decay_points(z));
            analysis::decay_exponent(z, &xs)?
        }
        Study::InterpOrder { n, meshes } => {
            analysis::interpolation_order(*n, |x| (2.0 * PI * x).sin(), &as_usize_list(meshes, "meshes")?)?
        }
        Study::Riesz { z, k, omega_points } => {
            analysis::riesz_bounds(ComplexOrder::new(z.0)?, &omega_grid(*omega_points), *k)?
        }
        Study::PartitionUnity { z, window, shifts } => {
            let (lo, hi) = pair(shifts, "shifts")?;
            if lo.fract() != 0.0 || hi.fract() != 0.0 {
                return usage("shifts must be integers");
            }
            analysis::partition_of_unity(ComplexOrder::new(z.0)?, pair(window, "window")?, (lo as i64, hi as i64))?
        }
        Study::Residual {
            system,
            points,
            seed,
            tol,
        } => {
            let tol = resolve_tol(*tol)?;
            analysis::residual_study(&fractal_handle(system, tol)?, *points, *seed, tol)?
        }
        Study::Contraction {
            system,
            m,
            tol,
            max_iter,
        } => analysis::contraction_study(&fractal_handle(system, DEFAULT_TOL)?, *m, *tol, *max_iter)?,
        Study::Joinup {
            system,
            m,
            iterations,
            max_order,
            tol,
        } => {
            let h = fractal_handle(system, DEFAULT_TOL)?;
            let maps = h.system().partition().maps();
            let order = max_order.unwrap_or(if h.system().check_smoothness_regime().is_ok() {
                maps.saturating_sub(2).min(3)
            } else {
                0
            });
            analysis::joinup_study(&h, *m, *iterations, order, *tol)?
        }
    })
}

/// Every study with its reference parameters, including the reference parameter sets
/// for the fractal families.
pub fn reference_studies() -> Vec<Study> {
    let fam = |family: FamilyKind, n: Option<usize>, z: Option<(f64, f64)>, a: Option<Vec<f64>>| FamilyArgs {
        family,
        n,
        z: z.map(|(re, im)| ComplexArg(Complex64::new(re, im))),
        a: a.map(ListArg),
    };
    let frac = |family: FamilyArgs, alphas: Vec<f64>| FractalStudyArgs {
        family,
        fractal: FractalArgs {
            alphas: Some(ListArg(alphas)),
            partition: None,
            knots: None,
        },
    };
    let bounded = vec![
        frac(fam(FamilyKind::Poly, Some(2), None, None), vec![0.75, 0.75]),
        frac(fam(FamilyKind::Poly, Some(3), None, None), vec![0.25; 3]),
        frac(fam(FamilyKind::Exp, None, None, Some(vec![2.0, -2.0])), vec![0.25, 0.25]),
        frac(fam(FamilyKind::Exp, None, None, Some(vec![4.0, -3.0, 1.0])), vec![0.75, -0.25, 0.5]),
    ];
    let unbounded = vec![
        frac(fam(FamilyKind::ComplexPoly, None, Some((PI, 1.0)), None), vec![0.75, -0.5]),
        frac(
            fam(FamilyKind::ComplexExp, None, Some((std::f64::consts::SQRT_2, 1.0)), Some(vec![1.0])),
            vec![0.75, -0.5],
        ),
    ];
    let c = |re: f64, im: f64| ComplexArg(Complex64::new(re, im));
    let mut studies = vec![
        Study::Integral {
            family: fam(FamilyKind::Poly, Some(3), None, None),
            tol: None,
        },
        Study::Integral {
            family: fam(FamilyKind::ComplexPoly, None, Some((3.5, 0.5)), None),
            tol: None,
        },
        Study::Integral {
            family: fam(FamilyKind::Exp, None, None, Some(vec![1.0, -1.0])),
            tol: None,
        },
    ];
    for (m, n) in [(1, 1), (2, 3), (3, 3)] {
        studies.push(Study::Convolution { m, n, tol: 1e-8 });
    }
    studies.push(Study::GaussianLimit {
        orders: ListArg(vec![8.0, 16.0, 24.0]),
    });
    for z in [c(3.0, 0.0), c(2.5, 1.0)] {
        studies.push(Study::Decay { z, xs: None });
    }
    for n in 2..=4 {
        studies.push(Study::InterpOrder {
            n,
            meshes: ListArg(vec![8.0, 16.0, 32.0, 64.0]),
        });
    }
    for z in [c(2.0, 0.0), c(3.0, 1.0)] {
        studies.push(Study::Riesz {
            z,
            k: 64,
            omega_points: 256,
        });
    }
    for z in [c(4.0, 0.0), c(2.5, 0.0), c(3.0, 1.0)] {
        studies.push(Study::PartitionUnity {
            z,
            window: ListArg(vec![45.0, 50.0]),
            shifts: ListArg(vec![0.0, 60.0]),
        });
    }
    for system in bounded.iter().chain(&unbounded) {
        studies.push(Study::Residual {
            system: system.clone(),
            points: 200,
            seed: 0,
            tol: Some(DEFAULT_TOL),
        });
    }
    for system in &bounded {
        studies.push(Study::Contraction {
            system: system.clone(),
            m: 256,
            tol: 1e-10,
            max_iter: 5000,
        });
        studies.push(Study::Joinup {
            system: system.clone(),
            m: 256,
            iterations: 2,
            max_order: None,
            tol: 1e-10,
        });
    }
    studies
}

fn with_seed(mut study: Study, seed: u64) -> Study {
    if let Study::Residual { seed: s, .. } = &mut study {
        *s = seed;
    }
    study
}

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Sample(args) => cmd_sample(args, false, stdout),
        Command::Fractal(args) => cmd_sample(args, true, stdout),
        Command::Fourier(args) => cmd_fourier(args, stdout),
        Command::Verify { study, out } => {
            let report = run_study(study)?;
            let mut text = report.to_json();
            text.push('\n');
            emit(&out.out, &text, stdout)?;
            Ok(if report.pass { EXIT_PASS } else { EXIT_FAIL })
        }
        Command::Study { seed, out } => {
            let reports = reference_studies()
                .into_iter()
                .map(|s| run_study(&with_seed(s, *seed)))
                .collect::<Result<Vec<_>>>()?;
            let mut text = serde_json::to_string_pretty(&reports).expect("reports serialize");
            text.push('\n');
            emit(&out.out, &text, stdout)?;
            Ok(if reports.iter().all(|r| r.pass) { EXIT_PASS } else { EXIT_FAIL })
        }
    }
}
