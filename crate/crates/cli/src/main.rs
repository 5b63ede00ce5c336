use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use fqg::fmt::num;
use fqg::fqg::broom_demo;
use fqg::geometry::{build_level, sample_points, HanoiParams, Point};
use fqg::heat::{default_element_size, full_graph_spectrum, gaussian_diagnostic, measure_regularity};
use fqg::measure::MeasureParams;
use fqg::network::resistance_sequence;
use fqg::spectral::{dimension_fit, refined_spectrum, Bc, FitPolicy, RefinementPolicy};
use fqg::{FqgError, Result};

#[derive(Parser)]
#[command(name = "fqg", version, about = "Hanoi-type fractal quantum graphs: resistance, spectra, heat kernels")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write the level-n metric graph as JSON.
    Build(BuildArgs),
    /// Corner resistances of the shorted and full networks over a range of levels.
    Resistance(ResistanceArgs),
    /// Refined eigenvalues of the mu-weighted Laplacian as CSV.
    Spectrum(SpectralArgs),
    /// Counting-function exponent fit as JSON.
    Dimension(DimensionArgs),
    /// Heat-kernel diagnostics on the full graph with length measure.
    Heat(HeatArgs),
    /// Euclidean and resistance gaps of the infinite broom.
    Broom(BroomArgs),
}

#[derive(Args, Serialize)]
struct BuildArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 3)]
    n0: usize,
    #[arg(long)]
    level: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct ResistanceArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 3)]
    n0: usize,
    /// Inclusive range `a..b`, or a single level.
    #[arg(long, default_value = "0..6")]
    levels: String,
    /// One-based corner indices `i,j`.
    #[arg(long, default_value = "1,2")]
    pair: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
enum BcArg {
    D,
    N,
}

#[derive(Args, Serialize)]
struct SpectralArgs {
    #[arg(long)]
    alpha: f64,
    /// Joining-edge mass, or `critical` for `rs = 1/n0^2`.
    #[arg(long)]
    beta: String,
    #[arg(long, default_value_t = 3)]
    n0: usize,
    #[arg(long, default_value_t = 5)]
    level: usize,
    /// Elements per joining edge; the spectrum is refined against twice this.
    #[arg(long, default_value_t = 2048)]
    fem_nodes: usize,
    #[arg(long, value_enum, default_value = "n")]
    bc: BcArg,
    /// Upper bound on the number of eigenvalues computed.
    #[arg(long, default_value_t = 40_000)]
    max_eigs: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct DimensionArgs {
    #[command(flatten)]
    #[serde(flatten)]
    spec: SpectralArgs,
    /// Also write the spectrum CSV here.
    #[arg(long)]
    spectrum_out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct HeatArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 4)]
    level: usize,
    #[arg(long, default_value_t = 800)]
    kmax: usize,
    /// Element size; defaults to total length / (1.5 kmax).
    #[arg(long)]
    h: Option<f64>,
    /// Time range `a..b`.
    #[arg(long, default_value = "1e-3..1e-1")]
    t: String,
    #[arg(long, default_value_t = 40)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    sample_seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Also write sampled kernel values as CSV.
    #[arg(long)]
    kernel_out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct BroomArgs {
    #[arg(long, default_value_t = 100)]
    kmax: usize,
    #[arg(long)]
    out: PathBuf,
}

fn parse_err(msg: impl Into<String>) -> FqgError {
    FqgError::InvalidParameter(msg.into())
}

fn parse_range<T: std::str::FromStr>(s: &str) -> Result<(T, T)> {
    let one = |x: &str| x.trim().parse::<T>().map_err(|_| parse_err(format!("cannot parse {x:?} in range {s:?}")));
    match s.split_once("..") {
        Some((a, b)) => Ok((one(a)?, one(b.trim_start_matches('='))?)),
        None => {
            let v = one(s)?;
            Ok((one(s)?, v))
        }
    }
}

fn parse_pair(s: &str) -> Result<(usize, usize)> {
    let (a, b) = s.split_once(',').ok_or_else(|| parse_err(format!("pair {s:?} is not of the form i,j")))?;
    let p = |x: &str| x.trim().parse::<usize>().map_err(|_| parse_err(format!("bad corner index {x:?}")));
    let (a, b) = (p(a)?, p(b)?);
    if a == 0 || b == 0 {
        return Err(parse_err("corner indices are one-based"));
    }
    Ok((a - 1, b - 1))
}

fn measure(beta: &str, hp: HanoiParams) -> Result<MeasureParams> {
    if beta == "critical" {
        MeasureParams::critical(hp)
    } else {
        let b = beta.parse::<f64>().map_err(|_| parse_err(format!("cannot parse beta {beta:?}")))?;
        MeasureParams::new(b, hp.n0)
    }
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io = |e: std::io::Error| FqgError::Numerical(format!("writing {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

struct Run {
    outputs: Vec<PathBuf>,
}

impl Run {
    fn write(&mut self, path: &Path, contents: &str) -> Result<()> {
        write_atomic(path, contents)?;
        self.outputs.push(path.to_path_buf());
        Ok(())
    }
}

fn pretty(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn build(a: &BuildArgs, run: &mut Run) -> Result<()> {
    let g = build_level(HanoiParams::new(a.alpha, a.n0)?, a.level)?;
    let mut s = g.to_json();
    s.push('\n');
    run.write(&a.out, &s)
}

fn resistance(a: &ResistanceArgs, run: &mut Run) -> Result<()> {
    let hp = HanoiParams::new(a.alpha, a.n0)?;
    let (lo, hi) = parse_range::<usize>(&a.levels)?;
    if lo > hi {
        return Err(parse_err(format!("empty level range {}", a.levels)));
    }
    let seq = resistance_sequence(hp, lo..=hi, parse_pair(&a.pair)?)?;
    run.write(&a.out, &seq.to_csv())
}

fn spectrum_of(a: &SpectralArgs) -> Result<(HanoiParams, MeasureParams, fqg::spectral::Spectrum)> {
    let hp = HanoiParams::new(a.alpha, a.n0)?;
    let mp = measure(&a.beta, hp)?;
    let g = build_level(hp, a.level)?;
    let bc = match a.bc {
        BcArg::D => Bc::Dirichlet,
        BcArg::N => Bc::Neumann,
    };
    let policy = RefinementPolicy { max_count: a.max_eigs, ..Default::default() };
    let spec = refined_spectrum(&g, &mp, a.fem_nodes, bc, policy)?;
    Ok((hp, mp, spec))
}

fn spectrum(a: &SpectralArgs, run: &mut Run) -> Result<()> {
    let (_, _, spec) = spectrum_of(a)?;
    run.write(&a.out, &spec.to_csv())
}

fn dimension(a: &DimensionArgs, run: &mut Run) -> Result<()> {
    let (hp, mp, spec) = spectrum_of(&a.spec)?;
    if let Some(p) = &a.spectrum_out {
        run.write(p, &spec.to_csv())?;
    }
    let fit = dimension_fit(&spec, &hp, &mp, FitPolicy::default())?;
    run.write(&a.spec.out, &pretty(&fit))
}

fn point_fields(p: Point) -> (usize, f64) {
    match p {
        Point::OnEdge { edge, offset } => (edge, offset),
        Point::Vertex(_) => unreachable!("sampled points lie on edges"),
    }
}

fn heat(a: &HeatArgs, run: &mut Run) -> Result<()> {
    let (t0, t1) = parse_range::<f64>(&a.t)?;
    let hp = HanoiParams::new(a.alpha, 3)?;
    let g = build_level(hp, a.level)?;
    let h = a.h.unwrap_or_else(|| default_element_size(&g, a.kmax));
    let hs = full_graph_spectrum(&g, h, a.kmax)?;
    let gauss = gaussian_diagnostic(&hs, (t0, t1), a.samples, a.sample_seed)?;
    let reg = measure_regularity(&g, (t0, t1), a.samples, a.sample_seed)?;
    let pts = sample_points(&g, a.samples, a.sample_seed);
    let tm = (t0 * t1).sqrt();
    let mut cons: Vec<f64> = Vec::new();
    let mut ck: Vec<f64> = Vec::new();
    for w in pts.windows(2) {
        cons.push((hs.conservation(tm, w[0])? - 1.0).abs());
        let lhs = hs.chapman_kolmogorov(tm / 2.0, tm / 2.0, w[0], w[1])?;
        let rhs = hs.kernel(tm, w[0], w[1])?;
        ck.push(((lhs - rhs) / rhs).abs());
    }
    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    let report = json!({
        "alpha": a.alpha,
        "level": a.level,
        "k_max": hs.k_max(),
        "h": h,
        "t_range": [t0, t1],
        "band": gauss.band,
        "ratio": gauss.ratio,
        "offdiag_slope": gauss.offdiag_slope,
        "corr": gauss.corr,
        "gaussian": gauss,
        "conservation_max_error": max(&cons),
        "chapman_kolmogorov_max_rel_error": max(&ck),
        "ball_measure": reg,
    });
    if let Some(path) = &a.kernel_out {
        let mut s = String::from("t,x_edge,x_off,y_edge,y_off,p\n");
        let ts = [t0, tm, t1];
        for w in pts.windows(2) {
            let ((xe, xo), (ye, yo)) = (point_fields(w[0]), point_fields(w[1]));
            for &t in &ts {
                let p = hs.kernel(t, w[0], w[1])?;
                s.push_str(&format!("{},{xe},{},{ye},{},{}\n", num(t), num(xo), num(yo), num(p)));
            }
        }
        run.write(path, &s)?;
    }
    run.write(&a.out, &pretty(&report))
}

fn broom(a: &BroomArgs, run: &mut Run) -> Result<()> {
    let rows = broom_demo(a.kmax)?;
    let mut s = String::from("k,euclidean_gap,r_gap\n");
    for r in rows {
        s.push_str(&format!("{},{},{}\n", r.k, num(r.euclidean_gap), num(r.r_gap)));
    }
    run.write(&a.out, &s)
}

fn execute(cmd: &Cmd, run: &mut Run) -> Result<(&'static str, Value, PathBuf)> {
    match cmd {
        Cmd::Build(a) => build(a, run).map(|_| ("build", v(a), a.out.clone())),
        Cmd::Resistance(a) => resistance(a, run).map(|_| ("resistance", v(a), a.out.clone())),
        Cmd::Spectrum(a) => spectrum(a, run).map(|_| ("spectrum", v(a), a.out.clone())),
        Cmd::Dimension(a) => dimension(a, run).map(|_| ("dimension", v(a), a.spec.out.clone())),
        Cmd::Heat(a) => heat(a, run).map(|_| ("heat", v(a), a.out.clone())),
        Cmd::Broom(a) => broom(a, run).map(|_| ("broom", v(a), a.out.clone())),
    }
}

fn v<T: Serialize>(args: &T) -> Value {
    serde_json::to_value(args).expect("arguments serialize")
}

fn exit_code(e: &FqgError) -> u8 {
    match e {
        FqgError::InvalidParameter(_) | FqgError::Parse(_) => 2,
        FqgError::ResourceCap(_) => 3,
        FqgError::InsufficientData(_) => 4,
        FqgError::Disconnected(_) | FqgError::Numerical(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("FQG_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let start = Instant::now();
    let mut run = Run { outputs: Vec::new() };
    match execute(&cli.cmd, &mut run) {
        Ok((command, params, out)) => {
            let manifest = json!({
                "command": command,
                "params": params,
                "version": env!("CARGO_PKG_VERSION"),
                "outputs": run.outputs,
                "wall_time_s": start.elapsed().as_secs_f64(),
            });
            match write_atomic(&manifest_path(&out), &pretty(&manifest)) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(exit_code(&e))
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
