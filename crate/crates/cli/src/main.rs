//! `delone`: sequence specs in, CSV tables and SVG plots out.
//!
//! Exit status is 0 on success, 1 for bad input (flags, spec files, I/O) and
//! 2 when a computation fails to converge or needs a larger truncation.

mod svg;
mod table;

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use delone::{
    figures, gha_curves, lower_symbol, make_sequence, mu_sequence, quantize_radial, renormalize,
    renormalized_spectrum, stats, Complex64, DeformedBinomial, DeloneSequence, GhaModel, Monomial,
    RenormalizedSequence, SequenceSpec,
};

use table::Table;

#[derive(Debug, Parser)]
#[command(
    name = "delone",
    version,
    about = "Coherent-state quantization with perturbed natural numbers x_n = n + α(n)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Target accuracy of sums, integrals and truncations.
    #[arg(long, global = true, default_value_t = 1e-10, value_parser = positive)]
    tol: f64,

    /// Output file; standard output if absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Svg,
}

#[derive(Debug, Args)]
struct SpecArgs {
    /// JSON sequence description, e.g. {"family":"constant_shift","params":{"epsilon":0.1}}.
    #[arg(long)]
    spec: PathBuf,

    /// Largest index n.
    #[arg(long, default_value_t = 20)]
    nmax: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// The points x_n = n + α(n), with x_0 = 0.
    Seq(SpecArgs),

    /// Moment ratios μ_n = ∫ t^n e^{-t}/𝒩(t) dt / x_n!, where 𝒩(t) = Σ t^n/x_n!.
    Mu(SpecArgs),

    /// Renormalized points x̃_n = (μ_n/μ_{n-1}) x_n and their perturbation x̃_n − n.
    Renorm(SpecArgs),

    /// For x_n = n + ε: the density w(t) e^t t^{-ε}/𝒩(t) of the measure solving
    /// ∫ t^n w(t) dt = x_n!, next to the density 𝒩̃(t)/(μ_0 𝒩(t)) of the
    /// renormalized sequence.
    Measures {
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        #[arg(long, default_value_t = 30.0, value_parser = positive)]
        tmax: f64,
        #[arg(long, default_value_t = 0.25, value_parser = positive)]
        step: f64,
    },

    /// Matrix of the quantized radial symbol on the renormalized basis:
    /// (A_f)_{nn'} = ∫ u^{(n+n')/2} c_{n'-n}(u) du/(μ_0 𝒩(u)) / √(x̃_n! x̃_{n'}!),
    /// with c_k the k-th angular Fourier coefficient of f. With --radius, the
    /// lower symbol ⟨ζ|A|ζ⟩ on a circle of coherent states instead.
    Quantize {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 16)]
        dim: usize,
        #[arg(long, value_enum, default_value_t = SymbolArg::Z)]
        symbol: SymbolArg,
        /// Radius of the circle of coherent states for the lower symbol.
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, default_value_t = 16)]
        points: usize,
    },

    /// Zeros of the monic polynomials q_{n+1} = λ q_n − (x̃_n/2) q_{n−1}, i.e.
    /// eigenvalues of the truncated position operator, for sizes 1..=nmax.
    Spectrum(SpecArgs),

    #[command(subcommand)]
    Stats(StatsCommand),

    /// γ with x + γ(x) = n at x = x_n, δ(x) = γ(x) + α(x + 1 + γ(x)), and α(n).
    /// Uses α(n) = a n/(c n + d) unless --spec is given.
    Gha {
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 0.1)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 2.2)]
        d: f64,
        #[arg(long, default_value_t = 50)]
        nmax: usize,
    },

    /// Datasets of the four standard plots.
    Figures(FigureArgs),
}

#[derive(Debug, Subcommand)]
enum StatsCommand {
    /// Poisson-like law p_n = t^n/(𝒩(t) x_n!).
    Poisson {
        #[command(flatten)]
        seq: SpecArgs,
        #[arg(long, value_parser = non_negative)]
        t: f64,
    },

    /// Deformed binomial law for x_n = n (a + ε + n − 1)/(a + n − 1):
    /// 𝔭_k ∝ C(n,k)_x p^k / ₂F₁(a+k, x_{n−k}; a+ε+k; p), next to the Poisson-like
    /// law at t = n p.
    Binomial {
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Mean parameter t = n p.
        #[arg(long, conflicts_with = "p", required_unless_present = "p")]
        t: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Figure {
    /// Solved and renormalized densities for x_n = n + ε.
    Fig1,
    /// x_n − x̃_n for x_n = n + ε.
    Fig2,
    /// μ_n for α(n) = ε sin(√2 n)/n.
    Fig3,
    /// α, γ and δ for α(n) = a n/(c n + d).
    Fig4,
}

#[derive(Debug, Args)]
struct FigureArgs {
    #[arg(value_enum)]
    figure: Figure,
    /// Defaults: 0.5 for fig1, 0.1 otherwise.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Defaults: 14 for fig2, 300 for fig3, 50 for fig4.
    #[arg(long)]
    nmax: Option<usize>,
    /// Drop the first K rows, e.g. the large oscillations of fig3 near the origin.
    #[arg(long, default_value_t = 0)]
    skip_first: usize,
    #[arg(long, default_value_t = 30.0, value_parser = positive)]
    tmax: f64,
    #[arg(long, default_value_t = 0.25, value_parser = positive)]
    step: f64,
    #[arg(long, default_value_t = 0.1)]
    a: f64,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 2.2)]
    d: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SymbolArg {
    One,
    Z,
    Zbar,
    Zzbar,
    Q,
    P,
}

impl From<SymbolArg> for Monomial {
    fn from(s: SymbolArg) -> Self {
        match s {
            SymbolArg::One => Monomial::One,
            SymbolArg::Z => Monomial::Z,
            SymbolArg::Zbar => Monomial::ZBar,
            SymbolArg::Zzbar => Monomial::ZZBar,
            SymbolArg::Q => Monomial::Q,
            SymbolArg::P => Monomial::P,
        }
    }
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("`{s}` is not a positive number")),
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("`{s}` is not a non-negative number")),
    }
}

fn load_sequence(path: &Path) -> Result<DeloneSequence> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let spec: SequenceSpec = serde_json::from_str(&text)
        .with_context(|| format!("parsing sequence spec {}", path.display()))?;
    Ok(make_sequence(spec)?)
}

fn renormalized(seq: &DeloneSequence, n_max: usize, tol: f64) -> Result<RenormalizedSequence> {
    Ok(renormalize(seq, mu_sequence(seq, n_max, tol)?))
}

fn run(cli: &Cli) -> Result<Table> {
    let tol = cli.output.tol;
    let table = match &cli.command {
        Command::Seq(args) => {
            let seq = load_sequence(&args.spec)?;
            let mut t = Table::new("seq", &["n", "x"]);
            for n in 0..=args.nmax {
                t.push(vec![n as f64, seq.value(n)]);
            }
            t
        }
        Command::Mu(args) => {
            let seq = load_sequence(&args.spec)?;
            let m = mu_sequence(&seq, args.nmax, tol)?;
            let mut t = Table::new("mu", &["n", "mu", "abs_err"]);
            for n in 0..=args.nmax {
                t.push(vec![n as f64, m.mu[n], m.abs_err[n]]);
            }
            t
        }
        Command::Renorm(args) => {
            let seq = load_sequence(&args.spec)?;
            let ren = renormalized(&seq, args.nmax, tol)?;
            let mut t = Table::new("renorm", &["n", "x", "x_tilde", "alpha_tilde"]);
            for n in 0..=args.nmax {
                t.push(vec![n as f64, seq.value(n), ren.value(n), ren.alpha(n)]);
            }
            t
        }
        Command::Measures {
            epsilon,
            tmax,
            step,
        } => {
            let grid = figures::uniform_grid(*tmax, *step);
            let mut t = Table::new("measures", &["t", "solved", "nu"]);
            for r in delone::compare_measures(*epsilon, &grid, tol)? {
                t.push(vec![r.t, r.solved, r.nu]);
            }
            t
        }
        Command::Quantize {
            spec,
            dim,
            symbol,
            radius,
            points,
        } => {
            if *dim == 0 {
                bail!("--dim must be at least 1");
            }
            let seq = load_sequence(spec)?;
            let ren = renormalized(&seq, *dim, tol)?;
            let op = quantize_radial(&ren, &Monomial::from(*symbol), *dim, tol)?;
            match radius {
                None => {
                    let mut t = Table::new("quantize", &["n", "n_prime", "re", "im"]);
                    for (n, m, v) in op.nonzeros() {
                        t.push(vec![n as f64, m as f64, v.re, v.im]);
                    }
                    t
                }
                Some(r) => {
                    if !r.is_finite() || *r < 0.0 || *points == 0 {
                        bail!("--radius must be non-negative and --points positive");
                    }
                    let mut t = Table::new(
                        "lower_symbol",
                        &["re_z", "im_z", "value_re", "value_im", "error_bound"],
                    );
                    for j in 0..*points {
                        let z = Complex64::from_polar(*r, 2.0 * PI * j as f64 / *points as f64);
                        let s = lower_symbol(&op, &ren, z, tol)?;
                        t.push(vec![z.re, z.im, s.value.re, s.value.im, s.error_bound]);
                    }
                    t
                }
            }
        }
        Command::Spectrum(args) => {
            let seq = load_sequence(&args.spec)?;
            let ren = renormalized(&seq, args.nmax + 1, tol)?;
            let mut t = Table::new("spectrum", &["n", "k", "lambda"]);
            for n in 1..=args.nmax {
                for (k, lambda) in renormalized_spectrum(&ren, n)?
                    .eigenvalues
                    .into_iter()
                    .enumerate()
                {
                    t.push(vec![n as f64, k as f64, lambda]);
                }
            }
            t
        }
        Command::Stats(StatsCommand::Poisson { seq: args, t: time }) => {
            let seq = load_sequence(&args.spec)?;
            let mut t = Table::new("poisson", &["n", "pmf"]);
            for n in 0..=args.nmax {
                t.push(vec![n as f64, stats::poisson_like_pmf(&seq, *time, n)?]);
            }
            t
        }
        Command::Stats(StatsCommand::Binomial {
            a,
            epsilon,
            trials,
            t: time,
            p,
        }) => {
            let db = match (time, p) {
                (Some(time), _) => {
                    DeformedBinomial::with_mean_parameter(*a, *epsilon, *trials, *time)?
                }
                (None, Some(p)) => DeformedBinomial::new(*a, *epsilon, *trials, *p)?,
                (None, None) => bail!("one of --t or --p is required"),
            };
            let table = db.table(tol)?;
            let mut t = Table::new("binomial", &["k", "pmf", "poisson_pmf"]);
            for (k, pk) in table.pmf.iter().enumerate() {
                t.push(vec![
                    k as f64,
                    *pk,
                    stats::poisson_like_pmf(db.sequence(), db.t(), k)?,
                ]);
            }
            t
        }
        Command::Gha {
            spec,
            a,
            c,
            d,
            nmax,
        } => {
            let seq = match spec {
                Some(path) => load_sequence(path)?,
                None => make_sequence(SequenceSpec::Homographic {
                    a: *a,
                    b: 0.0,
                    c: *c,
                    d: *d,
                })?,
            };
            let mut t = Table::new("gha", &["n", "alpha", "gamma", "delta"]);
            for r in gha_curves(&GhaModel::new(&seq)?, *nmax)? {
                t.push(vec![r.n as f64, r.alpha, r.gamma, r.delta]);
            }
            t
        }
        Command::Figures(f) => figure(f, tol)?,
    };
    Ok(table)
}

fn figure(f: &FigureArgs, tol: f64) -> Result<Table> {
    let data = match f.figure {
        Figure::Fig1 => figures::measures(
            f.epsilon.unwrap_or(0.5),
            &figures::uniform_grid(f.tmax, f.step),
            tol,
        )?,
        Figure::Fig2 => {
            figures::renormalization_gap(f.epsilon.unwrap_or(0.1), f.nmax.unwrap_or(14), tol)?
        }
        Figure::Fig3 => {
            figures::oscillating_moments(f.epsilon.unwrap_or(0.1), f.nmax.unwrap_or(300), tol)?
        }
        Figure::Fig4 => figures::gha_dataset(f.a, f.c, f.d, f.nmax.unwrap_or(50))?,
    };
    Ok(Table::from(data).skip_first(f.skip_first))
}

fn write_output(cli: &Cli, table: &Table) -> Result<()> {
    let text = match cli.output.format {
        Format::Csv => table.to_csv(),
        Format::Svg => svg::render(table),
    };
    match &cli.output.out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => {
            use std::io::Write;
            std::io::stdout()
                .lock()
                .write_all(text.as_bytes())
                .context("writing to stdout")?;
        }
    }
    Ok(())
}

/// 2 for failures of the numerics, 1 for everything else.
fn exit_code(err: &anyhow::Error) -> u8 {
    let numerical = err
        .chain()
        .find_map(|e| e.downcast_ref::<delone::Error>())
        .is_some_and(|e| e.is_numerical());
    if numerical {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli).and_then(|t| write_output(&cli, &t)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
