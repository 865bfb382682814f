//! Gauss sums, the Hecke character attached to quartic Gauss sums, and
//! equidistribution statistics over character families.

mod sums;

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use sums::{
    additive_roots, direct_from_table, gauss_sum_direct, gauss_sum_factored,
    has_expected_modulus, parity_by_evaluation, tau_sextic_closed, tau_sq_all_quartic,
    tau_sq_closed_totally_quartic, GaussEngine, GaussSumValue, Method, SexticClosed,
};

use crate::arith::gcd;
use crate::characters::{enumerate_family, CharacterError, DirichletCharacter, FamilySpec};
use crate::lfun::EllipticCurveData;
use crate::rings::{primary_associate_gaussian, GaussianInt, RingError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GaussError {
    #[error("closed form needs a character of order 4, got order {0}")]
    WrongOrder(u8),
    #[error("closed form is stated for odd conductor, got {0}")]
    EvenConductor(u64),
    #[error("{0} is not totally sextic of conductor prime to 6")]
    NotTotallySextic(String),
    #[error("conductor {q} shares a factor with N_E = {n}")]
    ConductorNotCoprime { q: u64, n: u64 },
    #[error("Weyl sums need k != 0")]
    ZeroFrequency,
    #[error("a histogram needs at least 2 bins, got {0}")]
    TooFewBins(usize),
    #[error(transparent)]
    Character(#[from] CharacterError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// `λ((α)) = λ_{1+i}(α) α/|α|` with `λ_{1+i}(i^k) = i^{-k}`; equivalently the
/// primary generator of `(α)` divided by its absolute value.
pub fn hecke_lambda(alpha: GaussianInt) -> Result<Complex64, GaussError> {
    let p = primary_associate_gaussian(alpha).map_err(|e| match e {
        RingError::EvenElement(s) => RingError::RamifiedElement(s),
        other => other,
    })?;
    let z = p.to_complex();
    Ok(z / z.norm())
}

/// Root number of `L(E, s, χ)`: `w_E χ(N_E) τ(χ)²/q`.
pub fn functional_equation_sign(
    e: &EllipticCurveData,
    chi: &DirichletCharacter,
    tau_sq: Complex64,
) -> Result<Complex64, GaussError> {
    let q = chi.conductor();
    if gcd(q, e.conductor) != 1 {
        return Err(GaussError::ConductorNotCoprime { q, n: e.conductor });
    }
    Ok(crate::lfun::twist_sign(e, chi, tau_sq))
}

/// `(conductor, τ(χ)²/q)` for every member of the family up to `x`, in
/// enumeration order.
pub fn family_unit_values(spec: FamilySpec, x: u64, engine: &GaussEngine) -> Vec<(u64, Complex64)> {
    let chars: Vec<DirichletCharacter> = enumerate_family(spec, x).collect();
    chars
        .par_iter()
        .map(|chi| (chi.conductor(), engine.normalized_tau_sq(chi)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylStatistic {
    pub k: i32,
    pub grid: Vec<u64>,
    /// `Σ (τ(χ)²/q)^k / |family(X)|` at each grid point.
    pub normalized_sum: Vec<Complex64>,
    pub family_size: Vec<u64>,
}

impl WeylStatistic {
    /// Unnormalized sum at grid index `i`.
    pub fn raw(&self, i: usize) -> Complex64 {
        self.normalized_sum[i] * self.family_size[i] as f64
    }
}

/// Weyl sums of a single frequency over a value list sorted by conductor.
pub fn weyl_sum(values: &[(u64, Complex64)], grid: &[u64], k: i32) -> Result<WeylStatistic, GaussError> {
    if k == 0 {
        return Err(GaussError::ZeroFrequency);
    }
    let mut grid = grid.to_vec();
    grid.sort_unstable();
    let mut normalized = Vec::with_capacity(grid.len());
    let mut sizes = Vec::with_capacity(grid.len());
    let mut acc = Complex64::new(0.0, 0.0);
    let mut i = 0;
    for &x in &grid {
        while i < values.len() && values[i].0 <= x {
            acc += values[i].1.powi(k);
            i += 1;
        }
        sizes.push(i as u64);
        normalized.push(if i == 0 { acc } else { acc / i as f64 });
    }
    Ok(WeylStatistic {
        k,
        grid,
        normalized_sum: normalized,
        family_size: sizes,
    })
}

/// Weyl sums for `k = 1..=k_max` on the given grid.
pub fn weyl_sums(spec: FamilySpec, grid: &[u64], k_max: u32) -> Result<Vec<WeylStatistic>, GaussError> {
    if k_max == 0 {
        return Err(GaussError::ZeroFrequency);
    }
    let x = grid.iter().copied().max().unwrap_or(0);
    let values = family_unit_values(spec, x, &GaussEngine::new());
    (1..=k_max as i32).map(|k| weyl_sum(&values, grid, k)).collect()
}

/// Roughly `n` logarithmically spaced points ending at `x`.
pub fn log_grid(lo: u64, x: u64, n: usize) -> Vec<u64> {
    let lo = lo.max(2).min(x);
    let n = n.max(2);
    let (a, b) = ((lo as f64).ln(), (x as f64).ln());
    let mut g: Vec<u64> = (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp().round() as u64)
        .collect();
    *g.last_mut().unwrap() = x;
    g.dedup();
    g
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramData {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub family: FamilySpec,
    pub x: u64,
}

impl HistogramData {
    pub fn from_values(family: FamilySpec, x: u64, values: &[(u64, Complex64)], bins: usize) -> Result<Self, GaussError> {
        if bins < 2 {
            return Err(GaussError::TooFewBins(bins));
        }
        let bin_edges: Vec<f64> = (0..=bins).map(|i| -PI + 2.0 * PI * i as f64 / bins as f64).collect();
        let mut counts = vec![0u64; bins];
        for &(q, z) in values {
            if q > x {
                continue;
            }
            let t = (z.arg() + PI) / (2.0 * PI);
            let b = ((t * bins as f64) as usize).min(bins - 1);
            counts[b] += 1;
        }
        Ok(HistogramData {
            bin_edges,
            counts,
            family,
            x,
        })
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `max_b |count_b - mean| / mean`.
    pub fn max_relative_deviation(&self) -> f64 {
        let mean = self.total() as f64 / self.counts.len() as f64;
        self.counts
            .iter()
            .map(|&c| (c as f64 - mean).abs() / mean)
            .fold(0.0, f64::max)
    }
}

pub const DEFAULT_BINS: usize = 100;

/// Histogram of `arg(τ(χ)²/q)` over the family up to `x`.
pub fn histogram_args(spec: FamilySpec, x: u64, bins: usize) -> Result<HistogramData, GaussError> {
    if bins < 2 {
        return Err(GaussError::TooFewBins(bins));
    }
    let values = family_unit_values(spec, x, &GaussEngine::new());
    HistogramData::from_values(spec, x, &values, bins)
}

pub fn write_histogram_csv<W: Write>(w: W, h: &HistogramData) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["family", "X", "bin_lo", "bin_hi", "count"])?;
    let family = h.family.name();
    for (i, c) in h.counts.iter().enumerate() {
        out.write_record([
            family.clone(),
            h.x.to_string(),
            format!("{:.12}", h.bin_edges[i]),
            format!("{:.12}", h.bin_edges[i + 1]),
            c.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_weyl_csv<W: Write>(w: W, family: &FamilySpec, stats: &[WeylStatistic]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["family", "k", "X", "re", "im", "family_size"])?;
    let name = family.name();
    for s in stats {
        for (i, &x) in s.grid.iter().enumerate() {
            out.write_record([
                name.clone(),
                s.k.to_string(),
                x.to_string(),
                format!("{:.15e}", s.normalized_sum[i].re),
                format!("{:.15e}", s.normalized_sum[i].im),
                s.family_size[i].to_string(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}
