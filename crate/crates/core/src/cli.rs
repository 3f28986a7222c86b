//! The `lpsq` command line: argument parsing, dispatch and report writing.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::carleson::{carleson_ratio, dual_pairing, pairing, paraproduct, CarlesonExperiment};
use crate::conditions::{classify, seminorm_report, ClassifyParams, McSettings};
use crate::error::{Error, Result};
use crate::fourier_checks::{
    check_14, decay_profile, default_directions, dyadic_radii, prop3_identity,
};
use crate::grid::{lp_norm, Geometry, SampledFunction, TimeGrid};
use crate::harness::{modulated_gaussian, norm_ratio_sweep, FamilyKind, OperatorSpec, TestFamily};
use crate::kernels::{Kernel, SphereFunction};
use crate::operators::{square_function, time_grid_for};
use crate::weights::{ap_level_trend, log_abs_cell_means, relative_changes, CubeFamily, Weight};

#[derive(Debug, Parser)]
#[command(
    name = "lpsq",
    version,
    about = "Littlewood-Paley square function toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Also write the command's table as CSV.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Exit with status 1 when a numerical flag is raised.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Omit the timestamp so identical runs give identical reports.
    #[arg(long, global = true)]
    pub deterministic: bool,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Clone)]
pub struct KernelArg {
    /// Kernel as JSON, a path to a JSON file, or one of
    /// haar, poisson, poisson2, poisson_kernel, rough.
    #[arg(long, default_value = "haar")]
    pub kernel: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Seminorms and theorem applicability of a kernel.
    CheckKernel {
        #[command(flatten)]
        kernel: KernelArg,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[arg(long, default_value_t = 2.0)]
        u: f64,
        /// Extra `L^q` exponents for the classification.
        #[arg(long, value_delimiter = ',')]
        q: Vec<f64>,
        #[arg(long, default_value_t = 200_000)]
        samples: usize,
    },
    /// Averaged Fourier decay profile and the decay-condition check.
    Spectrum {
        #[command(flatten)]
        kernel: KernelArg,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
    },
    /// Square function of a test function and its norm ratio.
    Sqfn {
        #[command(flatten)]
        kernel: KernelArg,
        /// gaussian, bump, step or band.
        #[arg(long, default_value = "gaussian")]
        f: String,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long)]
        weight: Option<String>,
        /// Box half-width `R`; the default grid for the dimension when omitted.
        #[arg(long)]
        halfwidth: Option<f64>,
        /// Samples per axis, with `--halfwidth`.
        #[arg(long)]
        n: Option<usize>,
    },
    /// `A_p` characteristic of a weight on dyadic cubes at the origin.
    Weights {
        #[arg(long, default_value = r#"{"type":"power","a":0.5}"#)]
        weight: String,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 8)]
        levels: u32,
    },
    /// Carleson ratios of `|psi_t * b|^2 w dx dt/t` on dyadic cubes.
    Carleson {
        #[arg(long, default_value = "poisson")]
        kernel: String,
        /// log or constant.
        #[arg(long, default_value = "log")]
        b: String,
        #[arg(long)]
        weight: Option<String>,
        /// Coarsest dyadic level `j` (side `2R 2^-j`); three levels are used.
        #[arg(long, default_value_t = 5)]
        level: u32,
    },
    /// Truncated paraproduct and its duality check.
    Paraproduct {
        #[arg(long, default_value = "poisson")]
        eta: String,
        #[arg(long, default_value = "haar")]
        psi: String,
        #[arg(long, default_value = "poisson_kernel")]
        phi: String,
        #[arg(long, default_value = "bump")]
        f: String,
        #[arg(long, default_value_t = 0.25)]
        u_min: f64,
        #[arg(long, default_value_t = 2.0)]
        v_max: f64,
    },
    /// Norm-ratio sweep of a square function over a test family.
    Sweep {
        #[command(flatten)]
        kernel: KernelArg,
        /// gaussians, modulated_bumps, band_limited or steps.
        #[arg(long, default_value = "modulated_bumps")]
        family: String,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long)]
        split: Option<usize>,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long)]
        weight: Option<String>,
        /// Box half-width `R`; the default grid for the dimension when omitted.
        #[arg(long)]
        halfwidth: Option<f64>,
        /// Samples per axis, with `--halfwidth`.
        #[arg(long)]
        n: Option<usize>,
    },
    /// The `L^2` log identity at a unit frequency.
    Prop3 {
        #[command(flatten)]
        kernel: KernelArg,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
    },
}

fn read_json_arg(s: &str) -> Result<String> {
    let t = s.trim_start();
    if t.starts_with('{') {
        Ok(s.to_string())
    } else {
        Ok(std::fs::read_to_string(s)?)
    }
}

/// Kernel from a shorthand name, inline JSON or a JSON file.
pub fn parse_kernel(s: &str) -> Result<Kernel> {
    match s {
        "haar" => Ok(Kernel::Haar1D),
        "poisson" => Ok(Kernel::poisson(1)),
        "poisson2" => Ok(Kernel::poisson(2)),
        "poisson_kernel" => Ok(Kernel::PoissonKernel { dim: 1 }),
        "rough" => Kernel::trunc_hom(0.5, SphereFunction::odd_sign(1, 2)),
        _ => Kernel::from_json(&read_json_arg(s)?),
    }
}

pub fn parse_weight(s: &str) -> Result<Weight> {
    Weight::from_json(&read_json_arg(s)?)
}

/// Named test function on `geom`.
pub fn parse_function(s: &str, geom: Geometry) -> Result<SampledFunction> {
    match s {
        "gaussian" => modulated_gaussian(geom, [0.0, 0.0], 1.0, [0.0, 0.0], 0.0),
        "bump" => modulated_gaussian(geom, [0.5, 0.0], 0.7, [0.6, 0.0], 0.3),
        "step" => SampledFunction::from_real_fn(geom, |x| {
            if (0..geom.dim).all(|d| x[d].abs() < 1.0) {
                1.0
            } else {
                0.0
            }
        }),
        "band" => TestFamily::new(FamilyKind::BandLimited, 1, 0)?.member(geom, 0),
        _ => Err(Error::InvalidParameter(format!(
            "unknown test function '{s}'"
        ))),
    }
}

fn parse_family(s: &str) -> Result<FamilyKind> {
    serde_json::from_value(Value::String(s.to_string()))
        .map_err(|_| Error::InvalidParameter(format!("unknown family '{s}'")))
}

struct Outcome {
    result: Value,
    csv: Option<Vec<u8>>,
    flags: Vec<String>,
}

fn geometry_for(dim: usize, halfwidth: Option<f64>, n: Option<usize>) -> Result<Geometry> {
    let d = Geometry::default_for(dim)?;
    Geometry::new(dim, halfwidth.unwrap_or(d.halfwidth), n.unwrap_or(d.n))
}

fn run(cli: &Cli) -> Result<Outcome> {
    let mut flags = Vec::new();
    let mut csv = Vec::new();
    let result = match &cli.command {
        Command::CheckKernel {
            kernel,
            eps,
            u,
            q,
            samples,
        } => {
            let k = parse_kernel(&kernel.kernel)?;
            let mc = McSettings {
                samples: *samples,
                seed: cli.seed,
                ..McSettings::default()
            };
            let report = seminorm_report(&k, *eps, *u, &mc)?;
            let mut params = ClassifyParams::default();
            params.eps.push(*eps);
            params.u.push(*u);
            params.q.extend(q.iter().copied());
            let cls = classify(&k, &params);
            if !cls.checks.iter().any(|c| c.applicable) {
                flags.push("no result applies to this kernel".into());
            }
            json!({ "seminorms": report, "classification": cls })
        }
        Command::Spectrum { kernel, eps } => {
            let k = parse_kernel(&kernel.kernel)?;
            let profile = decay_profile(
                &k,
                &default_directions(k.dim(), 8),
                &dyadic_radii(-8, 8, 4),
                64,
            )?;
            profile.write_csv(&mut csv)?;
            let c14 = check_14(&k, *eps)?;
            if !c14.holds {
                flags.push("decay condition not met".into());
            }
            json!({
                "check_14": c14,
                "small_slope": profile.slope(2f64.powi(-8), 2f64.powi(-4)),
                "large_slope": profile.slope(2f64.powi(4), 2f64.powi(8)),
            })
        }
        Command::Sqfn {
            kernel,
            f,
            p,
            weight,
            halfwidth,
            n,
        } => {
            let k = parse_kernel(&kernel.kernel)?;
            let geom = geometry_for(k.dim(), *halfwidth, *n)?;
            let w = weight.as_deref().map(parse_weight).transpose()?;
            let fun = parse_function(f, geom)?;
            let tg = time_grid_for(&k, &geom);
            let s = square_function(&k, &fun, &tg)?;
            s.write_csv(&mut csv)?;
            let ratio = lp_norm(&s.values, *p, w.as_ref())? / lp_norm(&fun, *p, w.as_ref())?;
            if !(s.tail.is_finite() && ratio.is_finite()) {
                flags.push("square function tail did not decay".into());
            }
            json!({
                "ratio": ratio,
                "tail": s.tail,
                "max_leakage": s.max_leakage,
                "time_grid": tg,
            })
        }
        Command::Weights { weight, p, levels } => {
            let w = parse_weight(weight)?;
            let trend = ap_level_trend(&w, *p, 1.0, *levels)?;
            let changes = relative_changes(&trend);
            let last = changes.last().copied().unwrap_or(0.0);
            if last.abs() >= 0.05 {
                flags.push(format!(
                    "characteristic still changing by {:.1}% per level",
                    100.0 * last
                ));
            }
            writeln!(csv, "levels,characteristic")?;
            for (i, v) in trend.iter().enumerate() {
                writeln!(csv, "{},{v:e}", i + 1)?;
            }
            let in_ap = match &w {
                Weight::Power { a, dim } => Some(Weight::power_in_ap(*a, *dim, *p)),
                _ => None,
            };
            json!({ "characteristic": trend, "relative_changes": changes, "power_in_ap": in_ap })
        }
        Command::Carleson {
            kernel,
            b,
            weight,
            level,
        } => {
            let k = parse_kernel(kernel)?;
            let geom = geometry_for(k.dim(), None, None)?;
            let bf = match b.as_str() {
                "log" => log_abs_cell_means(geom)?,
                "constant" => SampledFunction::from_real_fn(geom, |_| 1.0)?,
                _ => return Err(Error::InvalidParameter(format!("unknown b '{b}'"))),
            };
            let exp = CarlesonExperiment {
                time_grid: time_grid_for(&k, &geom),
                kernel: k,
                b: bf,
                weight: weight.as_deref().map(parse_weight).transpose()?,
                cubes: CubeFamily::dyadic(&geom, *level, level + 2)?,
                bmo_cubes: Some(CubeFamily::dyadic(&geom, *level, level + 6)?),
            };
            let r = carleson_ratio(&exp)?;
            r.write_csv(&mut csv)?;
            if r.rows.iter().any(|row| !row.sliver.is_finite()) {
                flags.push("sliver estimate did not decay".into());
            }
            json!({
                "bmo": r.bmo,
                "sup_ratio": r.sup_ratio,
                "per_scale": r.per_scale,
                "scale_variation": r.scale_variation(),
            })
        }
        Command::Paraproduct {
            eta,
            psi,
            phi,
            f,
            u_min,
            v_max,
        } => {
            let (eta, psi, phi) = (parse_kernel(eta)?, parse_kernel(psi)?, parse_kernel(phi)?);
            let geom = Geometry::new(psi.dim(), 16.0, 1024)?;
            let tg = TimeGrid::new(-4, 1, 8)?;
            let b = log_abs_cell_means(geom)?;
            let fun = parse_function(f, geom)?;
            let g = parse_function("gaussian", geom)?;
            let pi = paraproduct(&eta, &psi, &phi, &b, &fun, &tg, *u_min, *v_max)?;
            pi.write_abs_csv(&mut csv)?;
            let lhs = pairing(&pi, &g)?;
            let rhs = dual_pairing(&eta, &psi, &phi, &b, &fun, &g, &tg, *u_min, *v_max)?;
            let gap = (lhs - rhs).norm() / lhs.norm().max(1.0);
            if gap > 1e-8 {
                flags.push(format!("duality gap {gap:.3e}"));
            }
            json!({
                "pairing": [lhs.re, lhs.im],
                "dual_pairing": [rhs.re, rhs.im],
                "gap": gap,
                "l2_norm": lp_norm(&pi, 2.0, None)?,
            })
        }
        Command::Sweep {
            kernel,
            family,
            count,
            split,
            p,
            weight,
            halfwidth,
            n,
        } => {
            let k = parse_kernel(&kernel.kernel)?;
            let geom = geometry_for(k.dim(), *halfwidth, *n)?;
            let fam = TestFamily::new(parse_family(family)?, *count, cli.seed)?;
            let w = weight.as_deref().map(parse_weight).transpose()?;
            let op = OperatorSpec::SquareFunction {
                kernel: k,
                time_grid: None,
            };
            let r = norm_ratio_sweep(&op, &fam, geom, *p, w.as_ref(), *split)?;
            r.write_csv(&mut csv)?;
            flags.extend(r.flags.iter().cloned());
            serde_json::to_value(&r)?
        }
        Command::Prop3 { kernel, samples } => {
            let k = parse_kernel(&kernel.kernel)?;
            let r = prop3_identity(&k, [1.0, 0.0], *samples, cli.seed)?;
            if r.truncation_flag {
                flags.push("truncation tail above 1%".into());
            }
            if r.rel_gap > 0.01 || r.rhs_im.abs() > 3.0 * r.stderr_im {
                flags.push("identity not reproduced within tolerance".into());
            }
            serde_json::to_value(&r)?
        }
    };
    Ok(Outcome {
        result,
        csv: (!csv.is_empty()).then_some(csv),
        flags,
    })
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::CheckKernel { .. } => "check-kernel",
        Command::Spectrum { .. } => "spectrum",
        Command::Sqfn { .. } => "sqfn",
        Command::Weights { .. } => "weights",
        Command::Carleson { .. } => "carleson",
        Command::Paraproduct { .. } => "paraproduct",
        Command::Sweep { .. } => "sweep",
        Command::Prop3 { .. } => "prop3",
    }
}

/// Numerical failures exit with 1, everything else is a configuration error.
fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Leakage { .. } | Error::TimeGridTooShort { .. } | Error::NonFinite(_) => 1,
        _ => 2,
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("LPSQ_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
    {
        // A pool built earlier in the process wins; that is fine for tests.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}

/// Parses `argv`, runs the command and writes the report. Returns the exit status.
pub fn dispatch<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    2
                }
            };
        }
    };
    configure_threads();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
    };
    let mut report = json!({
        "command": command_name(&cli.command),
        "version": env!("CARGO_PKG_VERSION"),
        "settings": format!("{:?}", cli.command),
        "seed": cli.seed,
        "result": outcome.result,
        "flags": outcome.flags,
    });
    if !cli.deterministic {
        let now = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        report["timestamp"] = json!(now);
    }
    let text = match serde_json::to_string_pretty(&report) {
        Ok(t) => t + "\n",
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return 2;
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &text),
        None => stdout.write_all(text.as_bytes()),
    };
    let csv_written = match (&cli.csv, &outcome.csv) {
        (Some(path), Some(bytes)) => std::fs::write(path, bytes),
        _ => Ok(()),
    };
    if let Err(e) = written.and(csv_written) {
        let _ = writeln!(stderr, "error: {e}");
        return 2;
    }
    if cli.strict && !outcome.flags.is_empty() {
        for f in &outcome.flags {
            let _ = writeln!(stderr, "flag: {f}");
        }
        return 1;
    }
    0
}
