//! Command-line front end: counting and enumeration, exact and Markov
//! chain sampling with CSV or pattern output, character evaluation with
//! decimal-string arguments, the spectral reference ensemble, moment
//! tables, the verification suites, seed sweeps, and SVG plots.
//!
//! Exit codes: 0 on success, 1 when a verification suite fails a check,
//! 2 on usage errors or infeasible requests.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use lozlab::charlib::{
    bessel_b_float, beta_shift_check, box_schur_sum, normalized_schur, normalized_symplectic,
    orthogonal_eval, phi_m_eval, phi_m_normalized, schur_dim, schur_eval, skew_schur_dim,
    symplectic_eval, EvalPoint,
};
use lozlab::gue::{mgf_gue, mgf_gue_mc, sample_gue_corners};
use lozlab::limitshape::{limit_moment_vector, MomentAccumulator};
use lozlab::plot::{histogram_svg, lozenge_svg, moments_svg, MomentRow};
use lozlab::report::SuiteReport;
use lozlab::sampler::{
    exact_sample_hex, mcmc_stream_free, mcmc_stream_hex, rescale_positions, ExactFreeSampler,
    Regime, RngStream,
};
use lozlab::stats::dither;
use lozlab::tiling::{count_free, count_hex, enumerate_free, enumerate_hex, GTPattern,
    PositionVector};
use lozlab::verify::{
    verify_ebk_grid, verify_ebk_identity, verify_exact_suite, verify_gue_convergence,
    verify_limit_shape, verify_mgf_convergence, verify_sampler_uniformity, RegimeSpec,
};
use lozlab::{Error, Scalar, Signature};

#[derive(Parser)]
#[command(name = "lozlab", version, about = "Lozenge tiling laboratory", max_term_width = 100)]
struct Cli {
    /// Seed for all random streams (default: $LOZLAB_SEED, then 0)
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Working precision in bits for decimal output of character values
    #[arg(long, global = true, default_value_t = 256, value_parser = clap::value_parser!(u32).range(64..=4096))]
    precision_bits: u32,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Count tilings of the free-boundary trapezoid or the hexagon
    Count {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: i64,
        /// Count the doubled fixed-boundary hexagon instead
        #[arg(long)]
        hex: bool,
    },
    /// List every pattern, one JSON array-of-arrays per line, bottom row first
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: i64,
        #[arg(long)]
        hex: bool,
        /// Stop after this many patterns
        #[arg(long)]
        limit: Option<u64>,
        /// Output file (default stdout)
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Draw uniform samples as pattern lines or a position CSV
    Sample(SampleArgs),
    /// Character evaluation with decimal-string inputs and outputs
    Char {
        #[command(subcommand)]
        cmd: CharCmd,
    },
    /// The spectral reference ensemble: corner samples and the kernel mean
    Gue {
        #[command(subcommand)]
        cmd: GueCmd,
    },
    /// Moment tables for the boundary measure at a vertical line
    Limitshape {
        #[command(subcommand)]
        cmd: LimitshapeCmd,
    },
    /// Verification suites; prints a JSON report, exits 1 on failure
    Verify {
        #[command(subcommand)]
        cmd: VerifyCmd,
        /// Write the JSON report here instead of stdout
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Run a suite across consecutive seeds and join the reports
    Sweep {
        #[arg(long, value_enum)]
        suite: SweepSuite,
        /// Number of consecutive seeds starting at --seed
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..=64))]
        seeds: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Self-contained SVG views
    Plot {
        #[command(subcommand)]
        cmd: PlotCmd,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Exact,
    Mcmc,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegimeArg {
    Standard,
    Tall,
    Wide,
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Regime {
        match r {
            RegimeArg::Standard => Regime::Standard,
            RegimeArg::Tall => Regime::Tall,
            RegimeArg::Wide => Regime::Wide,
        }
    }
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: i64,
    /// Sample the doubled fixed-boundary hexagon instead
    #[arg(long)]
    hex: bool,
    #[arg(long, default_value_t = 1)]
    samples: usize,
    /// exact inverts the counting table; mcmc runs the heat-bath chain
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Post burn-in sweeps for the chain (default: samples times thin)
    #[arg(long)]
    sweeps: Option<usize>,
    #[arg(long)]
    burn_in: Option<usize>,
    #[arg(long)]
    thin: Option<usize>,
    /// Emit a CSV of the position vectors on lines 1..=K instead of patterns
    #[arg(long, value_name = "K")]
    positions: Option<usize>,
    /// Rescale positions (centred, regime divisor) instead of raw integers
    #[arg(long, requires = "positions")]
    rescale: bool,
    /// Scaling regime used by --rescale
    #[arg(long, value_enum, default_value_t = RegimeArg::Standard)]
    regime: RegimeArg,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CharCmd {
    /// Evaluate one operation; values print as decimals at --precision-bits
    Eval(CharArgs),
}

#[derive(Args)]
struct CharArgs {
    #[arg(long, value_enum)]
    op: CharOp,
    /// Signature, comma separated weakly decreasing integers, e.g. 3,1,0
    #[arg(long)]
    lambda: Option<String>,
    /// Inner signature for skew operations
    #[arg(long)]
    mu: Option<String>,
    /// Evaluation point, comma separated rationals or decimals, e.g. 2,1/2,-0.25
    #[arg(long)]
    x: Option<String>,
    /// Second point for the kernel operation
    #[arg(long)]
    ys: Option<String>,
    /// Number of variables (explicit entries of --x padded with ones)
    #[arg(long)]
    n: Option<usize>,
    /// Box height (ceiling) for the boxed sums
    #[arg(long)]
    m: Option<i64>,
    /// Index-shift parameter
    #[arg(long)]
    beta: Option<u32>,
    /// Print exact rationals verbatim when the computation stayed exact
    #[arg(long)]
    exact: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum CharOp {
    /// Rational Schur polynomial at the point
    Schur,
    /// Symplectic character at the point
    Symplectic,
    /// Odd orthogonal character at the point
    Orthogonal,
    /// Boxed Schur-sum generating function
    Phi,
    /// Boxed sum with all-ones normalization and midpoint drift factor
    PhiNorm,
    /// Schur value normalized at ones, single argument
    SchurNorm,
    /// Symplectic value normalized at ones, single argument
    SymplecticNorm,
    /// Number of tableaux of the shape
    Dim,
    /// Number of skew tableaux
    SkewDim,
    /// Brute-force boxed Schur sum (cross-check path)
    BoxSum,
    /// Multivariate exponential kernel at two real tuples
    Bessel,
    /// Index-shift identity report: lhs, rhs, relative difference
    BetaShift,
}

#[derive(Subcommand)]
enum GueCmd {
    /// Corner process draws as CSV rows level,index,value
    Sample {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        samples: usize,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Kernel mean at x: analytic value, Monte Carlo estimate, standard error
    Mgf {
        /// Comma separated real tuple
        #[arg(long)]
        x: String,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum LimitshapeCmd {
    /// CSV r,analytic,empirical,stderr; sampling columns need --n and --samples
    Moments {
        #[arg(long)]
        a: f64,
        /// Line fraction in (0,1)
        #[arg(long)]
        x: f64,
        #[arg(long, default_value_t = 4)]
        rmax: usize,
        #[arg(long, requires = "samples")]
        n: Option<usize>,
        #[arg(long, requires = "n")]
        samples: Option<usize>,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Exact identities: characters, counts, bijections, marginals
    Exact,
    /// Expectation identity for the kernel mean on enumerable boxes
    Ebk {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        m: i64,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Comma separated real tuple of length k
        #[arg(long, default_value = "1,-1", allow_hyphen_values = true)]
        x: String,
        /// Run the whole small-box grid instead of one point
        #[arg(long, conflicts_with_all = ["n", "m", "k", "x"])]
        grid: bool,
    },
    /// Sampled corners law in a scaling regime
    Corners {
        #[arg(long, value_enum, default_value_t = RegimeArg::Standard)]
        regime: RegimeArg,
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long, default_value_t = 16)]
        m: i64,
        /// Aspect ratio for the standard regime (default m/n)
        #[arg(long)]
        a: Option<f64>,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long)]
        burn_in: Option<usize>,
        #[arg(long)]
        thin: Option<usize>,
    },
    /// Exponent convergence of the normalized generating function
    Mgf {
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        /// Comma separated increasing depths
        #[arg(long, default_value = "8,16,32,64")]
        n_grid: String,
        /// Comma separated real tuple within [-2,2]
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        y: String,
    },
    /// Moment convergence of the boundary measure, free and hexagon
    Shape {
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 0.5)]
        x: f64,
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, default_value_t = 4)]
        rmax: usize,
    },
    /// Distributional exactness of the samplers
    Uniformity,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepSuite {
    Exact,
    Uniformity,
}

#[derive(Subcommand)]
enum PlotCmd {
    /// Lozenge picture of one uniform sample
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: i64,
        #[arg(long)]
        hex: bool,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Histogram of dithered rescaled row-1 positions with the normal curve
    Hist {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: i64,
        #[arg(long, value_enum, default_value_t = RegimeArg::Standard)]
        regime: RegimeArg,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, default_value_t = 40)]
        bins: usize,
        #[arg(long)]
        burn_in: Option<usize>,
        #[arg(long)]
        thin: Option<usize>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Bar chart of sampled moments against the limit values
    Moments {
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 0.5)]
        x: f64,
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, default_value_t = 4)]
        rmax: usize,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> lozlab::Result<i32> {
    let seed = cli.seed.unwrap_or_else(|| {
        std::env::var("LOZLAB_SEED").ok().and_then(|v| v.parse().ok()).unwrap_or(0)
    });
    let bits = cli.precision_bits;
    match cli.cmd {
        Cmd::Count { n, m, hex } => {
            let c = if hex { count_hex(n, m)? } else { count_free(n, m)? };
            println!("{c}");
            Ok(0)
        }
        Cmd::Enumerate { n, m, hex, limit, out } => {
            let mut w = open_out(out.as_deref())?;
            let stream = if hex { enumerate_hex(n, m)? } else { enumerate_free(n, m)? };
            let cap = limit.unwrap_or(u64::MAX);
            for (i, p) in stream.enumerate() {
                if i as u64 >= cap {
                    break;
                }
                writeln!(w, "{}", p.to_json())?;
            }
            w.flush()?;
            Ok(0)
        }
        Cmd::Sample(args) => cmd_sample(args, seed),
        Cmd::Char { cmd: CharCmd::Eval(args) } => cmd_char(args, bits),
        Cmd::Gue { cmd } => cmd_gue(cmd, seed),
        Cmd::Limitshape { cmd } => cmd_limitshape(cmd, seed),
        Cmd::Verify { cmd, out } => cmd_verify(cmd, seed, out.as_deref()),
        Cmd::Sweep { suite, seeds, out } => cmd_sweep(suite, seeds, seed, out.as_deref()),
        Cmd::Plot { cmd } => cmd_plot(cmd, seed),
    }
}

fn usage(msg: &str) -> Error {
    Error::InvalidArgument(msg.to_string())
}

fn open_out(path: Option<&Path>) -> lozlab::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn parse_f64_list(s: &str) -> lozlab::Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| usage(&format!("bad real value `{t}`"))))
        .collect()
}

fn parse_usize_list(s: &str) -> lozlab::Result<Vec<usize>> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| usage(&format!("bad integer `{t}`"))))
        .collect()
}

fn parse_i64_list(s: &str) -> lozlab::Result<Vec<i64>> {
    s.split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|_| usage(&format!("bad integer `{t}`"))))
        .collect()
}

/// Decimal-string rational: `p/q`, an integer, or a decimal like -0.25.
fn parse_rational(s: &str) -> lozlab::Result<Rational> {
    let t = s.trim();
    let bad = || usage(&format!("bad rational `{t}`"));
    if let Some((num, den)) = t.split_once('/') {
        let n: Integer = num.trim().parse().map_err(|_| bad())?;
        let d: Integer = den.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(usage("zero denominator"));
        }
        return Ok(Rational::from((n, d)));
    }
    if let Some((int, frac)) = t.split_once('.') {
        let neg = int.trim_start().starts_with('-');
        let ip: Integer = int.parse().map_err(|_| bad())?;
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let fp: Integer = frac.parse().map_err(|_| bad())?;
        let scale = Integer::from(10).pow(frac.len() as u32);
        let mag = Integer::from(ip.clone().abs() * &scale) + fp;
        let signed = if neg { -mag } else { mag };
        return Ok(Rational::from((signed, scale)));
    }
    let n: Integer = t.parse().map_err(|_| bad())?;
    Ok(Rational::from(n))
}

fn parse_rational_list(s: &str) -> lozlab::Result<Vec<Rational>> {
    s.split(',').map(parse_rational).collect()
}

fn parse_signature(s: &str) -> lozlab::Result<Signature> {
    Signature::from_parts(&parse_i64_list(s)?)
}

fn fmt_float(f: &Float, bits: u32) -> String {
    let digits = ((bits as f64) * std::f64::consts::LOG10_2).floor() as usize;
    let a = f.clone().abs();
    if f.is_zero() || (a >= 1e-6 && a < 1e15) {
        format!("{f:.digits$}")
    } else {
        format!("{f:.digits$e}")
    }
}

fn print_scalar(v: &Scalar, bits: u32, exact: bool, w: &mut dyn Write) -> lozlab::Result<()> {
    match v {
        Scalar::Exact(r) if exact => writeln!(w, "{r}")?,
        _ => writeln!(w, "{}", fmt_float(&v.to_float(bits), bits))?,
    }
    Ok(())
}

/// Feed `count` uniform free-boundary samples to the visitor, drawing
/// exactly when the counting table fits the cap unless a method is forced.
fn for_each_free(
    n: usize,
    m: i64,
    count: usize,
    method: Option<MethodArg>,
    sweeps: Option<usize>,
    burn_in: Option<usize>,
    thin: Option<usize>,
    rng: &mut RngStream,
    visit: &mut dyn FnMut(GTPattern) -> lozlab::Result<()>,
) -> lozlab::Result<&'static str> {
    let exact = match method {
        Some(MethodArg::Exact) => Some(ExactFreeSampler::new(n, m)?),
        Some(MethodArg::Mcmc) => None,
        None => match ExactFreeSampler::new(n, m) {
            Ok(s) => Some(s),
            Err(Error::CapExceeded(_)) => None,
            Err(e) => return Err(e),
        },
    };
    if let Some(s) = exact {
        for _ in 0..count {
            visit(s.draw(rng)?)?;
        }
        return Ok("exact");
    }
    let t = thin.unwrap_or(n.max(1));
    let sweeps = match sweeps {
        Some(s) => s,
        None => count.checked_mul(t).ok_or_else(|| usage("sweep count overflows"))?,
    };
    mcmc_stream_free(n, m, rng, sweeps, burn_in, Some(t), visit)?;
    Ok("mcmc")
}

fn for_each_hex(
    n: usize,
    m: i64,
    count: usize,
    method: Option<MethodArg>,
    sweeps: Option<usize>,
    burn_in: Option<usize>,
    thin: Option<usize>,
    rng: &mut RngStream,
    visit: &mut dyn FnMut(GTPattern) -> lozlab::Result<()>,
) -> lozlab::Result<&'static str> {
    if !matches!(method, Some(MethodArg::Mcmc)) {
        for _ in 0..count {
            visit(exact_sample_hex(n, m, rng)?)?;
        }
        return Ok("exact");
    }
    let t = thin.unwrap_or(2 * n.max(1));
    let sweeps = match sweeps {
        Some(s) => s,
        None => count.checked_mul(t).ok_or_else(|| usage("sweep count overflows"))?,
    };
    mcmc_stream_hex(n, m, rng, sweeps, burn_in, Some(t), visit)?;
    Ok("mcmc")
}

fn cmd_sample(args: SampleArgs, seed: u64) -> lozlab::Result<i32> {
    let SampleArgs {
        n, m, hex, samples, method, sweeps, burn_in, thin, positions, rescale, regime, out,
    } = args;
    let mut rng = RngStream::new(seed, 0);
    let mut w = open_out(out.as_deref())?;
    let regime: Regime = regime.into();
    let depth = if hex { 2 * n } else { n };
    if let Some(kmax) = positions {
        if kmax == 0 || kmax > depth {
            return Err(usage("position lines must satisfy 1 <= K <= depth"));
        }
        write!(w, "line,k")?;
        for i in 1..=kmax {
            write!(w, ",Y_{i}")?;
        }
        writeln!(w)?;
        {
            let mut emit = |p: GTPattern| -> lozlab::Result<()> {
                for j in 1..=kmax {
                    let pos = p.positions(j)?;
                    write!(w, "{j},{j}")?;
                    if rescale {
                        for v in rescale_positions(&pos, n, m, regime)? {
                            write!(w, ",{v:.9}")?;
                        }
                    } else {
                        for v in &pos.entries {
                            write!(w, ",{v}")?;
                        }
                    }
                    for _ in j..kmax {
                        write!(w, ",")?;
                    }
                    writeln!(w)?;
                }
                Ok(())
            };
            if hex {
                for_each_hex(n, m, samples, method, sweeps, burn_in, thin, &mut rng, &mut emit)?;
            } else {
                for_each_free(n, m, samples, method, sweeps, burn_in, thin, &mut rng, &mut emit)?;
            }
        }
    } else {
        let mut emit = |p: GTPattern| -> lozlab::Result<()> {
            writeln!(w, "{}", p.to_json())?;
            Ok(())
        };
        if hex {
            for_each_hex(n, m, samples, method, sweeps, burn_in, thin, &mut rng, &mut emit)?;
        } else {
            for_each_free(n, m, samples, method, sweeps, burn_in, thin, &mut rng, &mut emit)?;
        }
    }
    w.flush()?;
    Ok(0)
}

fn cmd_char(args: CharArgs, bits: u32) -> lozlab::Result<i32> {
    let CharArgs { op, lambda, mu, x, ys, n, m, beta, exact } = args;
    let lambda = lambda.as_deref().map(parse_signature).transpose()?;
    let mu = mu.as_deref().map(parse_signature).transpose()?;
    let xs = x.as_deref().map(parse_rational_list).transpose()?;
    let need = |o: Option<&str>| usage(&format!("this operation needs --{}", o.unwrap_or("?")));
    let point = |xs: &Option<Vec<Rational>>, n: usize| -> lozlab::Result<EvalPoint> {
        let v = xs.as_ref().ok_or_else(|| need(Some("x")))?;
        if v.len() > n {
            return Err(usage("--x has more entries than --n variables"));
        }
        EvalPoint::from_rationals(v, n - v.len())
    };
    let single = |xs: &Option<Vec<Rational>>| -> lozlab::Result<Scalar> {
        let v = xs.as_ref().ok_or_else(|| need(Some("x")))?;
        if v.len() != 1 {
            return Err(usage("this operation takes a single --x value"));
        }
        Ok(Scalar::Exact(v[0].clone()))
    };
    let mut w = BufWriter::new(io::stdout());
    match op {
        CharOp::Schur | CharOp::Symplectic | CharOp::Orthogonal => {
            let lam = lambda.ok_or_else(|| need(Some("lambda")))?;
            let n = n.ok_or_else(|| need(Some("n")))?;
            let pt = point(&xs, n)?;
            let v = match op {
                CharOp::Schur => schur_eval(&lam, &pt, n)?,
                CharOp::Symplectic => symplectic_eval(&lam, &pt, n)?,
                _ => orthogonal_eval(&lam, &pt, n)?,
            };
            print_scalar(&v, bits, exact, &mut w)?;
        }
        CharOp::Phi | CharOp::PhiNorm => {
            let m = m.ok_or_else(|| need(Some("m")))?;
            let n = n.ok_or_else(|| need(Some("n")))?;
            let pt = point(&xs, n)?;
            let v = if matches!(op, CharOp::Phi) {
                phi_m_eval(m, &pt, n)?
            } else {
                phi_m_normalized(m, &pt, n)?
            };
            print_scalar(&v, bits, exact, &mut w)?;
        }
        CharOp::SchurNorm | CharOp::SymplecticNorm => {
            let lam = lambda.ok_or_else(|| need(Some("lambda")))?;
            let n = n.ok_or_else(|| need(Some("n")))?;
            let xv = single(&xs)?;
            let v = if matches!(op, CharOp::SchurNorm) {
                normalized_schur(&lam, &xv, n)?
            } else {
                normalized_symplectic(&lam, &xv, n)?
            };
            print_scalar(&v, bits, exact, &mut w)?;
        }
        CharOp::Dim => {
            let lam = lambda.ok_or_else(|| need(Some("lambda")))?;
            let n = n.ok_or_else(|| need(Some("n")))?;
            writeln!(w, "{}", schur_dim(&lam, n)?)?;
        }
        CharOp::SkewDim => {
            let lam = lambda.ok_or_else(|| need(Some("lambda")))?;
            let mu = mu.ok_or_else(|| need(Some("mu")))?;
            let m = m.ok_or_else(|| need(Some("m")))?;
            writeln!(w, "{}", skew_schur_dim(&lam, &mu, m)?)?;
        }
        CharOp::BoxSum => {
            let m = m.ok_or_else(|| need(Some("m")))?;
            let n = n.ok_or_else(|| need(Some("n")))?;
            let pt = point(&xs, n)?;
            let v = Scalar::Exact(box_schur_sum(m, n, &pt)?);
            print_scalar(&v, bits, exact, &mut w)?;
        }
        CharOp::Bessel => {
            let xv = xs.as_ref().ok_or_else(|| need(Some("x")))?;
            let yv = ys.as_deref().map(parse_rational_list).transpose()?;
            let yv = yv.ok_or_else(|| need(Some("ys")))?;
            let to_floats =
                |v: &[Rational]| v.iter().map(|r| Float::with_val(bits, r)).collect::<Vec<_>>();
            let v = bessel_b_float(&to_floats(xv), &to_floats(&yv))?;
            writeln!(w, "{}", fmt_float(&v, bits))?;
        }
        CharOp::BetaShift => {
            let lam = lambda.ok_or_else(|| need(Some("lambda")))?;
            let n = n.ok_or_else(|| need(Some("n")))?;
            let beta = beta.ok_or_else(|| need(Some("beta")))?;
            let xv = single(&xs)?;
            let rep = beta_shift_check(&lam, n, beta, &xv)?;
            writeln!(w, "lhs,rhs,rel_diff,exact_match")?;
            write!(w, "{},", fmt_float(&rep.lhs.to_float(bits), bits))?;
            write!(w, "{},", fmt_float(&rep.rhs.to_float(bits), bits))?;
            writeln!(w, "{:.3e},{}", rep.rel_diff, rep.exact_match)?;
        }
    }
    w.flush()?;
    Ok(0)
}

fn cmd_gue(cmd: GueCmd, seed: u64) -> lozlab::Result<i32> {
    let mut rng = RngStream::new(seed, 0);
    match cmd {
        GueCmd::Sample { k, samples, out } => {
            let mut w = open_out(out.as_deref())?;
            writeln!(w, "level,index,value")?;
            for _ in 0..samples {
                let c = sample_gue_corners(k, &mut rng)?;
                for j in 1..=k {
                    for (i, v) in c.level(j).iter().enumerate() {
                        writeln!(w, "{j},{},{v:.9}", i + 1)?;
                    }
                }
            }
            w.flush()?;
            Ok(0)
        }
        GueCmd::Mgf { x, samples, out } => {
            let xs = parse_f64_list(&x)?;
            let analytic = mgf_gue(&xs);
            let (est, se) = mgf_gue_mc(&xs, samples, &mut rng)?;
            let mut w = open_out(out.as_deref())?;
            writeln!(w, "analytic,estimate,stderr")?;
            writeln!(w, "{analytic:.9},{est:.9},{se:.9}")?;
            w.flush()?;
            Ok(0)
        }
    }
}

fn cmd_limitshape(cmd: LimitshapeCmd, seed: u64) -> lozlab::Result<i32> {
    let LimitshapeCmd::Moments { a, x, rmax, n, samples, method, out } = cmd;
    let mut w = open_out(out.as_deref())?;
    writeln!(w, "r,analytic,empirical,stderr")?;
    match (n, samples) {
        (Some(n), Some(samples)) => {
            let m = (a * n as f64).round() as i64;
            if m < 1 {
                return Err(usage("a times n rounds to an empty box"));
            }
            let k = (x * n as f64).floor() as usize;
            if k == 0 {
                return Err(usage("the line index floor(x*n) must be at least 1"));
            }
            // compare against the limit at the realized aspect ratio
            let eff_a = m as f64 / n as f64;
            let analytic = limit_moment_vector(rmax, x, eff_a)?;
            let mut acc = MomentAccumulator::new(k, rmax)?;
            let mut rng = RngStream::new(seed, 0);
            for_each_free(n, m, samples, method, None, None, None, &mut rng, &mut |p| {
                acc.push(&p)
            })?;
            let emp = acc.finish(x, eff_a)?;
            for r in 0..=rmax {
                writeln!(
                    w,
                    "{r},{:.12},{:.12},{:.12}",
                    analytic.values[r], emp.values[r], emp.stderr[r]
                )?;
            }
        }
        (None, None) => {
            let analytic = limit_moment_vector(rmax, x, a)?;
            for r in 0..=rmax {
                writeln!(w, "{r},{:.12},,", analytic.values[r])?;
            }
        }
        _ => return Err(usage("--n and --samples go together")),
    }
    w.flush()?;
    Ok(0)
}

fn emit_report(report: &SuiteReport, out: Option<&Path>) -> lozlab::Result<i32> {
    let mut w = open_out(out)?;
    writeln!(w, "{}", report.to_json())?;
    w.flush()?;
    if !report.pass {
        eprintln!(
            "suite {} FAILED: {}",
            report.suite,
            report.failed_names().join(", ")
        );
    }
    Ok(if report.pass { 0 } else { 1 })
}

fn cmd_verify(cmd: VerifyCmd, seed: u64, out: Option<&Path>) -> lozlab::Result<i32> {
    let report = match cmd {
        VerifyCmd::Exact => verify_exact_suite(seed)?,
        VerifyCmd::Ebk { n, m, k, x, grid } => {
            if grid {
                verify_ebk_grid()?
            } else {
                verify_ebk_identity(n, m, k, &parse_f64_list(&x)?)?
            }
        }
        VerifyCmd::Corners { regime, n, m, a, k, samples, burn_in, thin } => {
            let spec = match regime {
                RegimeArg::Standard => {
                    RegimeSpec::standard(n, m, a.unwrap_or(m as f64 / n as f64))?
                }
                RegimeArg::Tall => RegimeSpec::tall(n, m)?,
                RegimeArg::Wide => RegimeSpec::wide(n, m)?,
            };
            let mut rng = RngStream::new(seed, 0);
            verify_gue_convergence(spec, k, samples, burn_in, thin, &mut rng)?
        }
        VerifyCmd::Mgf { a, n_grid, y } => {
            verify_mgf_convergence(a, &parse_usize_list(&n_grid)?, &parse_f64_list(&y)?)?
        }
        VerifyCmd::Shape { a, x, n, samples, rmax } => {
            let mut rng = RngStream::new(seed, 0);
            verify_limit_shape(a, x, n, samples, rmax, &mut rng)?
        }
        VerifyCmd::Uniformity => verify_sampler_uniformity(seed)?,
    };
    emit_report(&report, out)
}

fn cmd_sweep(
    suite: SweepSuite,
    seeds: u64,
    seed: u64,
    out: Option<&Path>,
) -> lozlab::Result<i32> {
    let mut reports = Vec::new();
    for i in 0..seeds {
        let s = seed.wrapping_add(i);
        reports.push(match suite {
            SweepSuite::Exact => verify_exact_suite(s)?,
            SweepSuite::Uniformity => verify_sampler_uniformity(s)?,
        });
    }
    let name = match suite {
        SweepSuite::Exact => "exact_sweep",
        SweepSuite::Uniformity => "uniformity_sweep",
    };
    let joined = SuiteReport::join(name, &reports)?;
    emit_report(&joined, out)
}

fn cmd_plot(cmd: PlotCmd, seed: u64) -> lozlab::Result<i32> {
    let mut rng = RngStream::new(seed, 0);
    match cmd {
        PlotCmd::Sample { n, m, hex, out } => {
            let mut picked: Option<GTPattern> = None;
            {
                let mut keep = |p: GTPattern| -> lozlab::Result<()> {
                    picked = Some(p);
                    Ok(())
                };
                if hex {
                    for_each_hex(n, m, 1, None, None, None, None, &mut rng, &mut keep)?;
                } else {
                    for_each_free(n, m, 1, None, None, None, None, &mut rng, &mut keep)?;
                }
            }
            let p = picked.ok_or_else(|| usage("sampler yielded nothing"))?;
            let svg = lozenge_svg(&p, !hex)?;
            let mut w = open_out(out.as_deref())?;
            w.write_all(svg.as_bytes())?;
            w.flush()?;
            Ok(0)
        }
        PlotCmd::Hist { n, m, regime, samples, bins, burn_in, thin, out } => {
            let regime: Regime = regime.into();
            let base0 =
                rescale_positions(&PositionVector { k: 1, entries: vec![0] }, n, m, regime)?[0];
            let base1 =
                rescale_positions(&PositionVector { k: 1, entries: vec![1] }, n, m, regime)?[0];
            let pitch = base1 - base0;
            let mut raw = Vec::with_capacity(samples);
            for_each_free(n, m, samples, None, None, burn_in, thin, &mut rng, &mut |p| {
                raw.push(p.positions(1)?.entries[0] as f64);
                Ok(())
            })?;
            let vals: Vec<f64> =
                dither(&raw, &mut rng).into_iter().map(|v| base0 + v * pitch).collect();
            let title = format!("row 1 rescaled, n={n}, m={m}, {} samples", raw.len());
            let svg = histogram_svg(&vals, bins, &title)?;
            let mut w = open_out(out.as_deref())?;
            w.write_all(svg.as_bytes())?;
            w.flush()?;
            Ok(0)
        }
        PlotCmd::Moments { a, x, n, samples, rmax, out } => {
            let m = (a * n as f64).round() as i64;
            if m < 1 {
                return Err(usage("a times n rounds to an empty box"));
            }
            let k = (x * n as f64).floor() as usize;
            if k == 0 {
                return Err(usage("the line index floor(x*n) must be at least 1"));
            }
            let eff_a = m as f64 / n as f64;
            let analytic = limit_moment_vector(rmax, x, eff_a)?;
            let mut acc = MomentAccumulator::new(k, rmax)?;
            for_each_free(n, m, samples, None, None, None, None, &mut rng, &mut |p| {
                acc.push(&p)
            })?;
            let emp = acc.finish(x, eff_a)?;
            let rows: Vec<MomentRow> = (1..=rmax)
                .map(|r| MomentRow {
                    r,
                    analytic: analytic.values[r],
                    empirical: emp.values[r],
                    stderr: emp.stderr[r],
                })
                .collect();
            let title = format!("moments at x={x}, a={eff_a}, n={n}, {samples} samples");
            let svg = moments_svg(&rows, &title)?;
            let mut w = open_out(out.as_deref())?;
            w.write_all(svg.as_bytes())?;
            w.flush()?;
            Ok(0)
        }
    }
}
