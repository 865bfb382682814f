use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;

use ltwist::census::{self, artifact_path, CensusConfig, PlotOptions};
use ltwist::characters::{enumerate_family, write_characters_csv, FamilySpec};
use ltwist::gauss::{self, family_unit_values, log_grid, GaussEngine, HistogramData};
use ltwist::lfun::EllipticCurveData;
use ltwist::rmt::{fit_constant, write_ratio_csv};
use ltwist::verify;

#[derive(Parser)]
#[command(name = "ltwist", version, about = "Vanishing of quartic and sextic twists of elliptic curve L-functions")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the characters of a family as CSV.
    Enumerate(EnumerateArgs),
    /// Angle histogram and Weyl sums of normalized squared Gauss sums.
    GaussStats(GaussStatsArgs),
    /// Evaluate, discretize and count every twist up to --xmax.
    Census(CensusArgs),
    /// Fit the vanishing constant to a finished census and print the ratio series.
    Fit(FitArgs),
    /// Regenerate the CSV outputs of a census from its record store.
    PlotData(PlotDataArgs),
    /// Run the invariant suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct FamilyArg {
    /// ORDER:VARIANT with ORDER in {4,6} and VARIANT in {all,tot,prime}.
    #[arg(long, default_value = "4:prime")]
    family: FamilySpec,
    /// Admit the order-6 characters of conductor 9 into 6:tot.
    #[arg(long)]
    sextic_nine: bool,
}

#[derive(Args)]
struct EnumerateArgs {
    #[command(flatten)]
    fam: FamilyArg,
    #[arg(long)]
    xmax: u64,
    /// Only conductors coprime to this integer.
    #[arg(long, default_value_t = 1)]
    coprime_to: u64,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GaussStatsArgs {
    #[command(flatten)]
    fam: FamilyArg,
    #[arg(long)]
    xmax: u64,
    #[arg(long, default_value_t = gauss::DEFAULT_BINS)]
    bins: usize,
    #[arg(long, default_value_t = 4)]
    kmax: u32,
    #[arg(long, default_value_t = 32)]
    grid_points: usize,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct CensusArgs {
    /// Curve config file, or one of the built-in labels 11a1, 37a1.
    #[arg(long, default_value = "11a1")]
    curve: String,
    /// May be repeated.
    #[arg(long = "family", required = true)]
    families: Vec<FamilySpec>,
    #[arg(long)]
    sextic_nine: bool,
    #[arg(long)]
    xmax: u64,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Defaults to the number of available cores.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, default_value_t = gauss::DEFAULT_BINS)]
    bins: usize,
    #[arg(long, default_value_t = 4)]
    kmax: u32,
    /// Conductors per committed batch.
    #[arg(long, default_value_t = 500)]
    checkpoint_every: u64,
    #[arg(long, default_value_t = 64)]
    grid_points: usize,
    /// Continue from the checkpoints in --out.
    #[arg(long)]
    resume: bool,
    /// Directory for the coefficient cache.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long = "family", required = true)]
    families: Vec<FamilySpec>,
    #[arg(long, default_value_t = 64)]
    grid_points: usize,
}

#[derive(Args)]
struct PlotDataArgs {
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long = "family", required = true)]
    families: Vec<FamilySpec>,
    #[arg(long, default_value_t = gauss::DEFAULT_BINS)]
    bins: usize,
    #[arg(long, default_value_t = 4)]
    kmax: u32,
    #[arg(long, default_value_t = 64)]
    grid_points: usize,
}

#[derive(Args)]
struct VerifyArgs {
    /// Smaller ranges; seconds instead of minutes.
    #[arg(long)]
    quick: bool,
    /// Run only checks whose name contains this.
    #[arg(long)]
    only: Option<String>,
}

fn load_curve(spec: &str) -> Result<EllipticCurveData> {
    let path = Path::new(spec);
    if path.exists() {
        return EllipticCurveData::load(path).with_context(|| format!("reading curve {spec}"));
    }
    match spec {
        "11a1" | "11.a.1" => Ok(EllipticCurveData::cremona_11a1()),
        "37a1" | "37.a.1" => Ok(EllipticCurveData::cremona_37a1()),
        _ => bail!("no curve file {spec} and no built-in curve of that name"),
    }
}

/// Families named on the command line carry the census' own coprimality.
fn as_stored(f: &FamilySpec, out: &Path) -> Result<FamilySpec> {
    let cp = out.join(format!("checkpoint-{}.json", census::family_slug(f)));
    let text = fs::read_to_string(&cp).with_context(|| format!("no census for {f} in {}", out.display()))?;
    let v: serde_json::Value = serde_json::from_str(&text)?;
    Ok(serde_json::from_value(v["family"].clone())?)
}

fn enumerate(a: EnumerateArgs) -> Result<()> {
    let spec = a.fam.family.coprime_to(a.coprime_to).with_sextic_nine(a.fam.sextic_nine);
    let chars = enumerate_family(spec, a.xmax);
    match a.out {
        Some(p) => write_characters_csv(File::create(&p)?, chars)?,
        None => write_characters_csv(io::stdout().lock(), chars)?,
    }
    Ok(())
}

fn gauss_stats(a: GaussStatsArgs) -> Result<()> {
    let spec = a.fam.family.with_sextic_nine(a.fam.sextic_nine);
    fs::create_dir_all(&a.out)?;
    let values = family_unit_values(spec, a.xmax, &GaussEngine::new());
    let h = HistogramData::from_values(spec, a.xmax, &values, a.bins)?;
    let hist = a.out.join(format!("gauss-histogram-{}.csv", census::family_slug(&spec)));
    gauss::write_histogram_csv(File::create(&hist)?, &h)?;
    let grid = log_grid(10, a.xmax, a.grid_points);
    let stats = (1..=a.kmax as i32)
        .map(|k| gauss::weyl_sum(&values, &grid, k))
        .collect::<Result<Vec<_>, _>>()?;
    let weyl = a.out.join(format!("gauss-weyl-{}.csv", census::family_slug(&spec)));
    gauss::write_weyl_csv(File::create(&weyl)?, &spec, &stats)?;
    let mut out = io::stdout().lock();
    writeln!(out, "{spec} X={} members={} max bin deviation={:.4}", a.xmax, h.total(), h.max_relative_deviation())?;
    for s in &stats {
        let last = s.grid.len() - 1;
        writeln!(out, "  k={} |W_k|/|family| = {:.5}", s.k, s.normalized_sum[last].norm())?;
    }
    writeln!(out, "wrote {} and {}", hist.display(), weyl.display())?;
    Ok(())
}

fn run_census(a: CensusArgs) -> Result<()> {
    let curve = load_curve(&a.curve)?;
    let mut cfg = CensusConfig::new(curve, a.families, a.xmax, &a.out);
    cfg.tol = a.tol;
    if let Some(w) = a.workers {
        cfg.workers = w;
    }
    cfg.bins = a.bins;
    cfg.k_max = a.kmax;
    cfg.checkpoint_every = a.checkpoint_every;
    cfg.grid_points = a.grid_points;
    cfg.sextic_nine = a.sextic_nine;
    cfg.resume = a.resume;
    cfg.cache_dir = a.cache_dir;
    let summary = census::run_census(&cfg)?;
    fs::write(a.out.join("census-summary.json"), serde_json::to_vec_pretty(&summary)?)?;
    let mut out = io::stdout().lock();
    for f in &summary.families {
        let last = f.grid.len() - 1;
        writeln!(
            out,
            "{} X={} family={} vanishings={} records={} escalated={}",
            f.family, f.grid[last], f.family_size[last], f.vanishings[last], f.records, f.escalated
        )?;
    }
    for (fam, why) in &summary.skipped {
        writeln!(out, "{fam} skipped: {why}")?;
    }
    writeln!(
        out,
        "quality failures: {}  wall time: {:.1}s",
        summary.quality_failures.len(),
        summary.wall_time_secs
    )?;
    Ok(())
}

fn fit(a: FitArgs) -> Result<()> {
    let mut out = io::stdout().lock();
    for f in &a.families {
        let spec = as_stored(f, &a.out)?;
        let (x, recs) = census::load_family(&a.out, &spec)?;
        let grid = log_grid(10, x, a.grid_points);
        let emp: Vec<(u64, u64)> = grid
            .iter()
            .zip(census::counts_on_grid(&recs, &grid))
            .map(|(&g, c)| (g, c.1))
            .collect();
        let curve = fit_constant(spec, &emp)?;
        write_ratio_csv(File::create(artifact_path(&a.out, "ratio", &spec))?, &curve)?;
        let (n, d) = curve.log_exponent;
        writeln!(out, "{spec} X={x} exponent={n}/{d} b={:.6e}", curve.fitted_b)?;
        match curve.tail_variation(x / 10) {
            Some(v) => writeln!(out, "  ratio variation over the last decade: {:.1}%", 100.0 * v)?,
            None => writeln!(out, "  no vanishings in the last decade")?,
        }
        for p in &curve.grid {
            let r = p.ratio.map_or("-".to_string(), |r| format!("{r:.4}"));
            writeln!(out, "  X={:>9} |V|={:>7} predicted={:>12.2} ratio={r}", p.x, p.empirical, p.predicted)?;
        }
    }
    Ok(())
}

fn plot_data(a: PlotDataArgs) -> Result<()> {
    let opts = PlotOptions {
        bins: a.bins,
        k_max: a.kmax,
        grid_points: a.grid_points,
    };
    for f in &a.families {
        let spec = as_stored(f, &a.out)?;
        for p in census::emit_plot_data(&a.out, &spec, &opts)? {
            println!("{}", p.display());
        }
    }
    Ok(())
}

fn run_verify(a: VerifyArgs) -> Result<bool> {
    info!("checks: {}", verify::check_names().join(", "));
    let results = verify::run_checks(a.quick, a.only.as_deref());
    if results.is_empty() {
        bail!("no check matches {:?}", a.only);
    }
    let mut ok = true;
    for r in &results {
        println!(
            "{} {:<16} {:>7.2}s  {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.seconds,
            r.detail
        );
        ok &= r.passed;
    }
    Ok(ok)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match cli.cmd {
        Command::Enumerate(a) => enumerate(a).map(|_| true),
        Command::GaussStats(a) => gauss_stats(a).map(|_| true),
        Command::Census(a) => run_census(a).map(|_| true),
        Command::Fit(a) => fit(a).map(|_| true),
        Command::PlotData(a) => plot_data(a).map(|_| true),
        Command::Verify(a) => run_verify(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
