//! Census driver: enumerate a family, evaluate and discretize every twist,
//! persist records with checkpoints, and emit counts and plot data.

use std::collections::HashSet;
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::OnceLock;
use std::time::Instant;

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::SpfSieve;
use crate::characters::{characters_of_conductor, DirichletCharacter, FamilySpec, Variant};
use crate::discretize::{discretize_twist, DiscretizeError, TwistRecord};
use crate::gauss::{log_grid, write_histogram_csv, write_weyl_csv, weyl_sum, GaussEngine, GaussError, HistogramData};
use crate::lfun::{
    l_value_with_table, terms_needed, twist_sign, CoefficientTable, EllipticCurveData, LValue,
    LfunError,
};
use crate::rmt::{fit_constant, write_ratio_csv, RmtError};

/// Record store schema version, written into every checkpoint.
pub const STORE_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CensusError {
    #[error("census config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Lfun(#[from] LfunError),
    #[error(transparent)]
    Discretize(#[from] DiscretizeError),
    #[error(transparent)]
    Gauss(#[from] GaussError),
    #[error(transparent)]
    Rmt(#[from] RmtError),
    #[error("cannot resume: {0}")]
    ResumeMismatch(String),
    #[error("corrupt record store {path}: {reason}")]
    CorruptStore { path: PathBuf, reason: String },
    #[error("no census store for family {0}")]
    MissingFamily(String),
    #[error("stopped after conductor {conductor} of family {family}")]
    Interrupted { family: String, conductor: u64 },
    #[error("count mismatch for {0}")]
    CountMismatch(String),
}

#[derive(Debug, Clone)]
pub struct CensusConfig {
    pub curve: EllipticCurveData,
    /// Families as given; `coprime_to` and the sextic-9 flag are set from
    /// the curve and `sextic_nine`.
    pub families: Vec<FamilySpec>,
    pub x_max: u64,
    pub tol: f64,
    pub workers: usize,
    pub out_dir: PathBuf,
    /// Conductors per committed batch.
    pub checkpoint_every: u64,
    pub bins: usize,
    pub k_max: u32,
    pub sextic_nine: bool,
    pub resume: bool,
    pub cache_dir: Option<PathBuf>,
    /// Points on the logarithmic X-grid of the summary.
    pub grid_points: usize,
    /// Stop after the batch containing this conductor, as a kill would.
    pub stop_after: Option<u64>,
}

impl CensusConfig {
    pub fn new(curve: EllipticCurveData, families: Vec<FamilySpec>, x_max: u64, out_dir: impl Into<PathBuf>) -> Self {
        CensusConfig {
            curve,
            families,
            x_max,
            tol: 1e-12,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            out_dir: out_dir.into(),
            checkpoint_every: 500,
            bins: crate::gauss::DEFAULT_BINS,
            k_max: 4,
            sextic_nine: false,
            resume: false,
            cache_dir: None,
            grid_points: 64,
            stop_after: None,
        }
    }

    pub fn validate(&self) -> Result<(), CensusError> {
        let bad = |m: String| Err(CensusError::Config(m));
        if self.x_max < 3 {
            return bad(format!("X_max = {} < 3", self.x_max));
        }
        if !(self.tol > 0.0 && self.tol <= 1e-6) {
            return bad(format!("tolerance {} outside (0, 1e-6]", self.tol));
        }
        if self.families.is_empty() {
            return bad("no families".into());
        }
        if self.workers == 0 || self.checkpoint_every == 0 {
            return bad("workers and checkpoint interval must be positive".into());
        }
        if self.bins < 2 || self.k_max == 0 || self.grid_points < 2 {
            return bad("bins ≥ 2, k_max ≥ 1 and grid_points ≥ 2 required".into());
        }
        Ok(())
    }

    fn family(&self, f: &FamilySpec) -> FamilySpec {
        FamilySpec::new(f.order, f.variant)
            .coprime_to(self.curve.conductor)
            .with_sextic_nine(self.sextic_nine)
    }

    pub fn plot_options(&self) -> PlotOptions {
        PlotOptions {
            bins: self.bins,
            k_max: self.k_max,
            grid_points: self.grid_points,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityFailure {
    pub family: String,
    pub conductor: u64,
    pub conrey_index: u64,
    pub quality: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySummary {
    pub family: FamilySpec,
    pub grid: Vec<u64>,
    pub family_size: Vec<u64>,
    pub vanishings: Vec<u64>,
    pub records: u64,
    pub terms: u64,
    /// Twists recomputed at the tighter tolerance.
    pub escalated: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusSummary {
    pub curve_label: String,
    pub x_max: u64,
    pub families: Vec<FamilySummary>,
    /// Families excluded by the curve's isogeny conditions, with the reason.
    pub skipped: Vec<(String, String)>,
    pub quality_failures: Vec<QualityFailure>,
    pub wall_time_secs: f64,
}

impl CensusSummary {
    pub fn family(&self, f: &FamilySpec) -> Option<&FamilySummary> {
        self.families
            .iter()
            .find(|s| s.family.order == f.order && s.family.variant == f.variant)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotOptions {
    pub bins: usize,
    pub k_max: u32,
    pub grid_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Checkpoint {
    version: u32,
    curve_label: String,
    family: FamilySpec,
    tol: f64,
    last_conductor: u64,
    records: u64,
    bytes: u64,
}

/// `4:prime` → `4-prime`, for file names.
pub fn family_slug(f: &FamilySpec) -> String {
    format!("{}-{}", f.order, f.variant.name())
}

pub fn store_path(dir: &Path, f: &FamilySpec) -> PathBuf {
    dir.join(format!("records-{}.jsonl", family_slug(f)))
}

fn checkpoint_path(dir: &Path, f: &FamilySpec) -> PathBuf {
    dir.join(format!("checkpoint-{}.json", family_slug(f)))
}

/// Output file of a given kind (`summary`, `ratio`, `histogram`, `weyl`).
pub fn artifact_path(dir: &Path, kind: &str, f: &FamilySpec) -> PathBuf {
    dir.join(format!("{kind}-{}.csv", family_slug(f)))
}

fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(tmp, path)
}

fn read_checkpoint(path: &Path) -> Result<Option<Checkpoint>, CensusError> {
    match fs::read(path) {
        Ok(b) => Ok(Some(serde_json::from_slice(&b)?)),
        Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Every record of a store, in file order.
pub fn load_records(path: &Path) -> Result<Vec<TwistRecord>, CensusError> {
    let r = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let rec = serde_json::from_str(&line).map_err(|e| CensusError::CorruptStore {
            path: path.to_path_buf(),
            reason: format!("line {}: {e}", i + 1),
        })?;
        out.push(rec);
    }
    Ok(out)
}

/// Records of the committed part of a family's store.
pub fn load_family(dir: &Path, f: &FamilySpec) -> Result<(u64, Vec<TwistRecord>), CensusError> {
    let cp = read_checkpoint(&checkpoint_path(dir, f))?.ok_or_else(|| CensusError::MissingFamily(f.name()))?;
    let store = store_path(dir, f);
    if !store.exists() {
        return Err(CensusError::MissingFamily(f.name()));
    }
    let mut recs = load_records_prefix(&store, cp.bytes)?;
    if recs.len() as u64 != cp.records {
        return Err(CensusError::CorruptStore {
            path: store,
            reason: format!("{} records, checkpoint says {}", recs.len(), cp.records),
        });
    }
    recs.retain(|r| r.conductor <= cp.last_conductor);
    Ok((cp.last_conductor, recs))
}

fn load_records_prefix(path: &Path, bytes: u64) -> Result<Vec<TwistRecord>, CensusError> {
    use std::io::Read;
    let mut buf = Vec::with_capacity(bytes as usize);
    File::open(path)?.take(bytes).read_to_end(&mut buf)?;
    if (buf.len() as u64) < bytes {
        return Err(CensusError::CorruptStore {
            path: path.to_path_buf(),
            reason: format!("{} bytes, checkpoint says {bytes}", buf.len()),
        });
    }
    let mut out = Vec::new();
    for (i, line) in buf.split(|&b| b == b'\n').filter(|l| !l.is_empty()).enumerate() {
        out.push(serde_json::from_slice(line).map_err(|e| CensusError::CorruptStore {
            path: path.to_path_buf(),
            reason: format!("line {}: {e}", i + 1),
        })?);
    }
    Ok(out)
}

/// `(|family(X)|, |V(X)|)` at each grid point, from records sorted by conductor.
pub fn counts_on_grid(records: &[TwistRecord], grid: &[u64]) -> Vec<(u64, u64)> {
    let mut out = Vec::with_capacity(grid.len());
    let (mut i, mut size, mut van) = (0, 0u64, 0u64);
    for &x in grid {
        while i < records.len() && records[i].conductor <= x {
            size += 1;
            van += records[i].vanished as u64;
            i += 1;
        }
        out.push((size, van));
    }
    out
}

/// Reason a family falls outside the conjectured setting for this curve.
pub fn isogeny_exclusion(e: &EllipticCurveData, f: &FamilySpec) -> Option<String> {
    let d = e.isogeny_torsion?;
    let hit = f.variant == Variant::All && (d == 2 || (f.order == 6 && d == 3));
    hit.then(|| format!("{} has a rational {d}-torsion point or {d}-isogeny", e.label))
}

struct Evaluator<'a> {
    curve: &'a EllipticCurveData,
    periods: (f64, f64),
    tol: f64,
    x_max: u64,
    coeffs: CoefficientTable,
    fine: OnceLock<Result<CoefficientTable, String>>,
    cache_dir: Option<PathBuf>,
    engine: GaussEngine,
}

struct ConductorOutput {
    records: Vec<TwistRecord>,
    failures: Vec<QualityFailure>,
    escalated: u64,
}

impl<'a> Evaluator<'a> {
    fn table(e: &EllipticCurveData, n: usize, dir: &Option<PathBuf>) -> Result<CoefficientTable, LfunError> {
        match dir {
            Some(d) => CoefficientTable::cached(e, n, d).map(|t| if t.n_max > n { t.prefix(n) } else { t }),
            None => Ok(CoefficientTable::build(e, n)),
        }
    }

    fn new(cfg: &'a CensusConfig) -> Result<Self, CensusError> {
        let n = terms_needed(&cfg.curve, cfg.x_max, cfg.tol);
        if n > crate::lfun::N_MAX_CAP {
            return Err(LfunError::ToleranceUnreachable { needed: n, cap: crate::lfun::N_MAX_CAP }.into());
        }
        Ok(Evaluator {
            curve: &cfg.curve,
            periods: cfg.curve.periods()?,
            tol: cfg.tol,
            x_max: cfg.x_max,
            coeffs: Self::table(&cfg.curve, n, &cfg.cache_dir)?,
            fine: OnceLock::new(),
            cache_dir: cfg.cache_dir.clone(),
            engine: GaussEngine::new(),
        })
    }

    fn fine_table(&self) -> Result<&CoefficientTable, LfunError> {
        let t = self.fine.get_or_init(|| {
            let n = terms_needed(self.curve, self.x_max, self.tol / 100.0).min(crate::lfun::N_MAX_CAP);
            Self::table(self.curve, n, &self.cache_dir).map_err(|e| e.to_string())
        });
        t.as_ref().map_err(|e| LfunError::Cache(e.clone()))
    }

    /// Records for `χ` and `χ̄` from one series evaluation.
    fn pair(
        &self,
        chi: &DirichletCharacter,
        bar: &DirichletCharacter,
        coeffs: &CoefficientTable,
        tol: f64,
    ) -> Result<(TwistRecord, TwistRecord), CensusError> {
        let e = self.curve;
        let tau = self.engine.tau(chi);
        let eps = twist_sign(e, chi, tau * tau);
        let l = l_value_with_table(e, chi, &chi.table(), coeffs, eps, tol)?;
        let tau_bar = tau.conj() * chi.parity() as f64;
        let l_bar = LValue { value: l.value.conj(), ..l };
        let r = discretize_twist(e, chi, &l, eps, tau, tau_bar, self.periods)?;
        let rb = discretize_twist(e, bar, &l_bar, eps.conj(), tau_bar, tau, self.periods)?;
        Ok((r, rb))
    }

    fn conductor(&self, spec: &FamilySpec, q: u64, factors: &[(u64, u32)]) -> Result<ConductorOutput, CensusError> {
        let chars = characters_of_conductor(spec, q, factors);
        let mut out = ConductorOutput {
            records: Vec::with_capacity(chars.len()),
            failures: Vec::new(),
            escalated: 0,
        };
        let mut done = HashSet::new();
        for chi in &chars {
            if !done.insert(chi.conrey_index()) {
                continue;
            }
            let bar = chi.conj();
            done.insert(bar.conrey_index());
            let (mut r, mut rb) = self.pair(chi, &bar, &self.coeffs, self.tol)?;
            if !(r.accepted() && rb.accepted()) {
                out.escalated += 2;
                (r, rb) = self.pair(chi, &bar, self.fine_table()?, self.tol / 100.0)?;
            }
            for rec in [r, rb] {
                if !rec.accepted() {
                    out.failures.push(QualityFailure {
                        family: spec.name(),
                        conductor: rec.conductor,
                        conrey_index: rec.conrey_index,
                        quality: rec.quality,
                    });
                }
                out.records.push(rec);
            }
        }
        out.records.sort_by_key(|r| r.conrey_index);
        Ok(out)
    }
}

/// Runs every family of the config, resuming from checkpoints if asked, and
/// writes the record stores, summaries and plot data into `out_dir`.
pub fn run_census(cfg: &CensusConfig) -> Result<CensusSummary, CensusError> {
    cfg.validate()?;
    let start = Instant::now();
    fs::create_dir_all(&cfg.out_dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| CensusError::Config(e.to_string()))?;
    let ev = pool.install(|| Evaluator::new(cfg))?;
    let sieve = SpfSieve::new(cfg.x_max);
    let mut summary = CensusSummary {
        curve_label: cfg.curve.label.clone(),
        x_max: cfg.x_max,
        families: Vec::new(),
        skipped: Vec::new(),
        quality_failures: Vec::new(),
        wall_time_secs: 0.0,
    };
    for f in &cfg.families {
        let spec = cfg.family(f);
        if let Some(reason) = isogeny_exclusion(&cfg.curve, &spec) {
            warn!("skipping {spec}: {reason}");
            summary.skipped.push((spec.name(), reason));
            continue;
        }
        let fam = pool.install(|| run_family(cfg, &spec, &ev, &sieve, &mut summary.quality_failures))?;
        emit_plot_data(&cfg.out_dir, &spec, &cfg.plot_options())?;
        summary.families.push(fam);
    }
    summary.wall_time_secs = start.elapsed().as_secs_f64();
    Ok(summary)
}

fn run_family(
    cfg: &CensusConfig,
    spec: &FamilySpec,
    ev: &Evaluator,
    sieve: &SpfSieve,
    failures: &mut Vec<QualityFailure>,
) -> Result<FamilySummary, CensusError> {
    let store = store_path(&cfg.out_dir, spec);
    let cp_path = checkpoint_path(&cfg.out_dir, spec);
    let mut cp = Checkpoint {
        version: STORE_VERSION,
        curve_label: cfg.curve.label.clone(),
        family: *spec,
        tol: cfg.tol,
        last_conductor: 1,
        records: 0,
        bytes: 0,
    };
    // (conductor, records, vanishings) per nonempty conductor
    let mut per_q: Vec<(u64, u64, u64)> = Vec::new();
    let mut terms = 0u64;
    let mut escalated = 0u64;
    match read_checkpoint(&cp_path)? {
        Some(old) if cfg.resume => {
            if old.version != cp.version
                || old.curve_label != cp.curve_label
                || old.family != cp.family
                || old.tol != cp.tol
            {
                return Err(CensusError::ResumeMismatch(format!(
                    "checkpoint for {} {} tol {} does not match this run",
                    old.curve_label, old.family, old.tol
                )));
            }
            let recs = load_records_prefix(&store, old.bytes)?;
            if recs.len() as u64 != old.records {
                return Err(CensusError::CorruptStore {
                    path: store.clone(),
                    reason: format!("{} records before offset, checkpoint says {}", recs.len(), old.records),
                });
            }
            OpenOptions::new().write(true).open(&store)?.set_len(old.bytes)?;
            for r in &recs {
                terms += r.terms_used as u64;
                match per_q.last_mut() {
                    Some(last) if last.0 == r.conductor => {
                        last.1 += 1;
                        last.2 += r.vanished as u64;
                    }
                    _ => per_q.push((r.conductor, 1, r.vanished as u64)),
                }
            }
            info!("{spec}: resuming after conductor {}", old.last_conductor);
            cp = old;
        }
        _ => {
            File::create(&store)?;
            if cp_path.exists() {
                fs::remove_file(&cp_path)?;
            }
        }
    }

    let mut log = BufWriter::new(OpenOptions::new().append(true).open(&store)?);
    let mut lo = cp.last_conductor + 1;
    while lo <= cfg.x_max {
        let hi = (lo + cfg.checkpoint_every - 1).min(cfg.x_max);
        let batch: Vec<ConductorOutput> = (lo..=hi)
            .into_par_iter()
            .map(|q| ev.conductor(spec, q, &sieve.factor(q)))
            .collect::<Result<_, _>>()?;
        for (q, out) in (lo..=hi).zip(batch) {
            if out.records.is_empty() {
                continue;
            }
            let mut van = 0;
            for r in &out.records {
                let mut line = serde_json::to_vec(r)?;
                line.push(b'\n');
                log.write_all(&line)?;
                cp.bytes += line.len() as u64;
                van += r.vanished as u64;
                terms += r.terms_used as u64;
            }
            cp.records += out.records.len() as u64;
            per_q.push((q, out.records.len() as u64, van));
            escalated += out.escalated;
            failures.extend(out.failures);
        }
        log.flush()?;
        log.get_ref().sync_data()?;
        cp.last_conductor = hi;
        write_atomic(&cp_path, &serde_json::to_vec_pretty(&cp)?)?;
        if hi % (cfg.checkpoint_every * 20) < cfg.checkpoint_every || hi == cfg.x_max {
            info!("{spec}: committed through {hi}, {} records", cp.records);
        }
        if cfg.stop_after.is_some_and(|s| hi >= s) && hi < cfg.x_max {
            return Err(CensusError::Interrupted { family: spec.name(), conductor: hi });
        }
        lo = hi + 1;
    }
    drop(log);

    let grid = log_grid(10, cp.last_conductor.min(cfg.x_max), cfg.grid_points);
    let mut streamed = Vec::with_capacity(grid.len());
    let (mut i, mut size, mut van) = (0, 0, 0);
    for &x in &grid {
        while i < per_q.len() && per_q[i].0 <= x {
            size += per_q[i].1;
            van += per_q[i].2;
            i += 1;
        }
        streamed.push((size, van));
    }
    let (_, recs) = load_family(&cfg.out_dir, spec)?;
    if counts_on_grid(&recs, &grid) != streamed {
        return Err(CensusError::CountMismatch(spec.name()));
    }
    Ok(FamilySummary {
        family: *spec,
        family_size: streamed.iter().map(|c| c.0).collect(),
        vanishings: streamed.iter().map(|c| c.1).collect(),
        grid,
        records: cp.records,
        terms,
        escalated,
    })
}

/// Regenerates `summary`, `ratio`, `histogram` and `weyl` CSVs for one
/// family from its record store.
pub fn emit_plot_data(dir: &Path, f: &FamilySpec, opts: &PlotOptions) -> Result<Vec<PathBuf>, CensusError> {
    let (x, recs) = load_family(dir, f)?;
    if x < 3 {
        return Err(CensusError::MissingFamily(f.name()));
    }
    let grid = log_grid(10, x, opts.grid_points);
    let counts = counts_on_grid(&recs, &grid);

    let summary = artifact_path(dir, "summary", f);
    {
        let mut w = csv::Writer::from_path(&summary)?;
        w.write_record(["family", "X", "family_size", "vanishings"])?;
        for (gx, (size, van)) in grid.iter().zip(&counts) {
            w.write_record([f.name(), gx.to_string(), size.to_string(), van.to_string()])?;
        }
        w.flush()?;
    }

    let ratio = artifact_path(dir, "ratio", f);
    let empirical: Vec<(u64, u64)> = grid.iter().zip(&counts).map(|(&gx, c)| (gx, c.1)).collect();
    match fit_constant(*f, &empirical) {
        Ok(curve) => write_ratio_csv(File::create(&ratio)?, &curve)?,
        Err(RmtError::InsufficientData { need, got }) => {
            warn!("{f}: {got} grid points in the fit window, {need} needed; ratio file left empty");
            let mut w = csv::Writer::from_path(&ratio)?;
            w.write_record(["family", "X", "empirical", "predicted", "ratio"])?;
            w.flush()?;
        }
        Err(e) => return Err(e.into()),
    }

    let values: Vec<(u64, num_complex::Complex64)> = recs.iter().map(|r| (r.conductor, r.gauss_phase)).collect();
    let histogram = artifact_path(dir, "histogram", f);
    let h = HistogramData::from_values(*f, x, &values, opts.bins)?;
    write_histogram_csv(File::create(&histogram)?, &h)?;

    let weyl = artifact_path(dir, "weyl", f);
    let stats = (1..=opts.k_max as i32)
        .map(|k| weyl_sum(&values, &grid, k))
        .collect::<Result<Vec<_>, _>>()?;
    write_weyl_csv(File::create(&weyl)?, f, &stats)?;

    Ok(vec![summary, ratio, histogram, weyl])
}
