use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use derangetropy::checks::{self, Suite};
use derangetropy::figures::{Figure, FigureTable};
use derangetropy::grid::MIN_NODES;
use derangetropy::io::fmt_f64;
use derangetropy::spectral::{
    char_function, gaussian_convergence, t_operator_iterates, CharFunction, FrequencyGrid,
};
use derangetropy::transform::transform_unnormalized;
use derangetropy::{iterate, transform, DistributionSpec, Error, Family, GridDensity, TransformKind};
use serde::Serialize;

const THREADS_ENV: &str = "DLAB_THREADS";

#[derive(Parser, Debug)]
#[command(name = "dlab", version, about = "Entropy-modulated density transforms and their diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Apply one transform and write `x,f,F,transformed`.
    Transform(TransformArgs),
    /// Iterate a transform; long-format trace plus per-step diagnostics.
    Iterate(IterateArgs),
    /// Run a verification suite and write a JSON report.
    Verify(VerifyArgs),
    /// Convergence diagnostics and characteristic-function dumps.
    Spectral(SpectralArgs),
    /// Write the per-family tables behind the reference figures.
    Figures(FiguresArgs),
}

#[derive(Args, Debug)]
struct DistArgs {
    #[arg(long, value_parser = parse_family)]
    dist: Family,
    /// Parameter overrides, e.g. `a=0,b=2` or `mean=1,sd=0.5`.
    #[arg(long, value_parser = parse_params, default_value = "")]
    params: Params,
    /// Number of grid nodes; odd and at least 129.
    #[arg(long = "grid", default_value_t = 4097)]
    grid: usize,
}

#[derive(Args, Debug)]
struct OutArgs {
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args, Debug)]
struct TransformArgs {
    #[command(flatten)]
    dist: DistArgs,
    #[arg(long, value_parser = parse_kind)]
    kind: TransformKind,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct IterateArgs {
    #[command(flatten)]
    dist: DistArgs,
    #[arg(long, value_parser = parse_kind)]
    kind: TransformKind,
    #[arg(long, default_value_t = 30)]
    n: usize,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_parser = parse_suite, default_value = "all")]
    suite: Suite,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SpectralArgs {
    #[command(flatten)]
    dist: DistArgs,
    #[arg(long, value_parser = parse_kind, default_value = "type3")]
    kind: TransformKind,
    #[arg(long, default_value_t = 30)]
    n: usize,
    /// Half-width of the frequency grid used for the CF dumps.
    #[arg(long, default_value_t = 64.0 * std::f64::consts::PI)]
    tmax: f64,
    /// Frequency step is `2 pi / D`.
    #[arg(long = "tstep-div", default_value_t = 64)]
    tstep_div: usize,
    /// Half-width of the window for the distance to the normal CF.
    #[arg(long = "sup-tmax", default_value_t = 5.0)]
    sup_tmax: f64,
    /// Directory for characteristic-function dumps; none written when omitted.
    #[arg(long)]
    outdir: Option<PathBuf>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct FiguresArgs {
    #[arg(long, value_parser = parse_figure)]
    which: Figure,
    #[arg(long, default_value = "figures")]
    outdir: PathBuf,
    #[arg(long = "grid", default_value_t = 4097)]
    grid: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

type Params = Vec<(String, f64)>;

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_kind(s: &str) -> Result<TransformKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_figure(s: &str) -> Result<Figure, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_params(s: &str) -> Result<Params, String> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|pair| {
            let (k, v) = pair.split_once('=').ok_or_else(|| format!("expected key=value, got `{pair}`"))?;
            let v: f64 = v.trim().parse().map_err(|_| format!("`{v}` is not a number"))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Verification(usize),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn io_failure(path: &Path) -> impl FnOnce(io::Error) -> Failure + '_ {
    move |e| Failure::Io(format!("{}: {e}", path.display()))
}

type CliResult = Result<(), Failure>;

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(io_failure(p))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Runs `body` against the output and flushes it, mapping I/O errors.
fn emit(path: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> CliResult {
    let label = path.map_or_else(|| PathBuf::from("<stdout>"), Path::to_path_buf);
    let mut w = open_out(path)?;
    body(&mut w).and_then(|_| w.flush()).map_err(io_failure(&label))
}

fn write_json<T: Serialize>(w: &mut dyn Write, value: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w)
}

fn build_grid(args: &DistArgs) -> Result<GridDensity, Failure> {
    check_grid(args.grid)?;
    let spec = DistributionSpec::from_params(args.dist, &args.params)?;
    Ok(GridDensity::from_analytic(&spec, args.grid)?)
}

fn check_grid(n: usize) -> CliResult {
    if n < MIN_NODES || n.is_multiple_of(2) {
        return Err(Failure::Usage(format!("--grid must be odd and at least {MIN_NODES}, got {n}")));
    }
    Ok(())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct TransformJson<'a> {
    kind: TransformKind,
    raw_integral: f64,
    x: Vec<f64>,
    f: &'a [f64],
    cdf: &'a [f64],
    transformed: &'a [f64],
}

fn cmd_transform(args: TransformArgs) -> CliResult {
    let g = build_grid(&args.dist)?;
    let t = transform(args.kind, &g)?;
    let cdf = g.cdf();
    emit(args.out.out.as_deref(), |w| match args.out.format {
        Format::Csv => {
            writeln!(w, "x,f,F,transformed")?;
            for i in 0..g.len() {
                writeln!(
                    w,
                    "{},{},{},{}",
                    fmt_f64(g.x(i)),
                    fmt_f64(g.values()[i]),
                    fmt_f64(cdf.values()[i]),
                    fmt_f64(t.density.values()[i])
                )?;
            }
            Ok(())
        }
        Format::Json => write_json(
            w,
            &TransformJson {
                kind: args.kind,
                raw_integral: t.raw_integral,
                x: g.nodes().collect(),
                f: g.values(),
                cdf: cdf.values(),
                transformed: t.density.values(),
            },
        ),
    })
}

fn sidecar(path: &Path) -> PathBuf {
    path.with_extension("json")
}

fn cmd_iterate(args: IterateArgs) -> CliResult {
    if args.n == 0 {
        return Err(Failure::Usage("--n must be at least 1".into()));
    }
    let g = build_grid(&args.dist)?;
    let trace = iterate(args.kind, &g, args.n)?;
    let out = args.out.out.as_deref();
    match args.out.format {
        Format::Csv => {
            emit(out, |w| trace.write_csv(w))?;
            if let Some(p) = out {
                let side = sidecar(p);
                emit(Some(&side), |w| writeln!(w, "{}", trace.diagnostics_json()))?;
            }
            Ok(())
        }
        Format::Json => emit(out, |w| writeln!(w, "{}", trace.diagnostics_json())),
    }
}

fn cmd_verify(args: VerifyArgs) -> CliResult {
    let report = checks::run(args.suite)?;
    for c in &report.checks {
        eprintln!("{c}");
    }
    emit(args.out.as_deref(), |w| writeln!(w, "{}", report.to_json()))?;
    match report.failures().count() {
        0 => Ok(()),
        n => Err(Failure::Verification(n)),
    }
}

fn write_cf(dir: &Path, name: &str, phi: &CharFunction) -> CliResult {
    let path = dir.join(name);
    emit(Some(&path), |w| phi.write_csv(w))
}

fn cmd_spectral(args: SpectralArgs) -> CliResult {
    let g = build_grid(&args.dist)?;
    let fg = FrequencyGrid::new(args.tstep_div, args.tmax)?;
    let diag = gaussian_convergence(args.kind, &g, args.n, args.sup_tmax)?;
    if let Some(step) = diag.stopped_at {
        eprintln!("stopped at step {step}: spread below double-precision resolution");
    }
    emit(args.out.out.as_deref(), |w| match args.out.format {
        Format::Csv => diag.write_csv(w),
        Format::Json => write_json(w, &diag),
    })?;
    if let Some(dir) = &args.outdir {
        fs::create_dir_all(dir).map_err(io_failure(dir))?;
        let phi = char_function(&g, fg);
        write_cf(dir, "cf_source.csv", &phi)?;
        let nu = transform_unnormalized(args.kind, &g)?;
        write_cf(dir, &format!("cf_{}.csv", args.kind), &char_function(&nu, fg))?;
        let applications = args.n.min(fg.half_len() / fg.divisor());
        for (k, raw) in t_operator_iterates(&phi, applications)?.iter().enumerate() {
            write_cf(dir, &format!("cf_shift_{}_raw.csv", k + 1), raw)?;
            if let Ok(renorm) = raw.renormalized() {
                write_cf(dir, &format!("cf_shift_{}_renormalized.csv", k + 1), &renorm)?;
            }
        }
    }
    Ok(())
}

fn cmd_figures(args: FiguresArgs) -> CliResult {
    check_grid(args.grid)?;
    fs::create_dir_all(&args.outdir).map_err(io_failure(&args.outdir))?;
    for f in Family::ALL {
        let table = FigureTable::build(args.which, &f.reference(), args.grid)?;
        let path = args.outdir.join(format!("{f}.csv"));
        emit(Some(&path), |w| table.write_csv(w))?;
    }
    Ok(())
}

fn configure_threads() -> CliResult {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Failure::Usage(format!("{THREADS_ENV} must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(format!("cannot size the worker pool: {e}")))
}

fn run(cli: Cli) -> CliResult {
    configure_threads()?;
    match cli.command {
        Command::Transform(a) => cmd_transform(a),
        Command::Iterate(a) => cmd_iterate(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Spectral(a) => cmd_spectral(a),
        Command::Figures(a) => cmd_figures(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Usage(msg) => eprintln!("error: {msg}"),
                Failure::Io(msg) => eprintln!("I/O error: {msg}"),
                Failure::Verification(n) => eprintln!("{n} check(s) failed"),
            }
            ExitCode::from(failure.code())
        }
    }
}
