//! Unitary-ensemble moments, the Barnes G value at 1/2, and the predicted
//! number of vanishing twists per family.

use std::f64::consts::PI;
use std::io::Write;

use log::warn;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::characters::{FamilySpec, Variant};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RmtError {
    #[error("M_U(s, N) has poles for Re(s) <= -1, got s = {0}")]
    PoleRegion(Complex64),
    #[error("need at least {need} points in the tail of the grid, got {got}")]
    InsufficientData { need: usize, got: usize },
    #[error("X must be at least 3, got {0}")]
    SmallX(f64),
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn ln_gamma_lanczos(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

/// Stirling series, accurate for `|z| ≥ 10` off the negative axis.
fn ln_gamma_stirling(z: Complex64) -> Complex64 {
    const B: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360360.0,
        1.0 / 156.0,
        -3617.0 / 122400.0,
    ];
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = inv;
    for b in B {
        series += b * p;
        p *= inv2;
    }
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series
}

/// `log Γ(z)` on the principal branch of the Stirling form; relative error
/// near `1e-15` for `Re z > 0`, with reflection below.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Γ(z)Γ(1-z) = π / sin(πz)
        return Complex64::new(PI.ln(), 0.0) - (PI * z).sin().ln() - ln_gamma(1.0 - z);
    }
    if z.norm() >= 10.0 {
        return ln_gamma_stirling(z);
    }
    // climb to |z| ≥ 10 with Γ(z) = Γ(z + n) / (z (z+1) ... (z+n-1))
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.norm() < 10.0 {
        shift += w.ln();
        w += 1.0;
    }
    let s = ln_gamma_stirling(w) - shift;
    debug_assert!((s - ln_gamma_lanczos(z)).norm() < 1e-10 * s.norm().max(1.0));
    s
}

/// `M_U(s, N) = ∏_{j=1}^N Γ(j) Γ(j+s) / Γ(j+s/2)²`.
pub fn m_u(s: Complex64, n: u32) -> Result<Complex64, RmtError> {
    if s.re <= -1.0 {
        return Err(RmtError::PoleRegion(s));
    }
    let mut log = Complex64::new(0.0, 0.0);
    for j in 1..=n {
        let j = Complex64::new(j as f64, 0.0);
        log += ln_gamma(j) + ln_gamma(j + s) - 2.0 * ln_gamma(j + s / 2.0);
    }
    Ok(log.exp())
}

/// `ζ'(-1) = 1/12 - log A` with the Glaisher–Kinkelin constant `A`.
pub fn zeta_prime_minus_one() -> f64 {
    const GLAISHER: f64 = 1.282_427_129_100_622_636_875_342_568_869_791_727_767_688_927_325;
    1.0 / 12.0 - GLAISHER.ln()
}

/// `G(1/2) = exp(3/2 ζ'(-1) - 1/4 log π + 1/24 log 2)`.
pub fn barnes_g_half() -> f64 {
    (1.5 * zeta_prime_minus_one() - 0.25 * PI.ln() + 2f64.ln() / 24.0).exp()
}

/// Exponent `e` of `log X` in `|V(X)| ~ b X^{1/2} (log X)^e`, as `(num, den)`.
pub fn log_exponent(order: u8, variant: Variant) -> (i32, i32) {
    match (order, variant) {
        (4, Variant::All) => (5, 4),
        (6, Variant::All) => (9, 4),
        (_, Variant::Totally) => (1, 4),
        (_, Variant::Prime) => (-3, 4),
        (other, _) => panic!("no prediction for order {other}"),
    }
}

pub fn log_exponent_f64(spec: &FamilySpec) -> f64 {
    let (n, d) = log_exponent(spec.order, spec.variant);
    n as f64 / d as f64
}

fn shape(x: f64, e: f64) -> f64 {
    x.sqrt() * x.ln().powf(e)
}

/// `b X^{1/2} (log X)^e`.
pub fn predicted_vanishings(spec: &FamilySpec, x: f64, b: f64) -> Result<f64, RmtError> {
    if x < 3.0 {
        return Err(RmtError::SmallX(x));
    }
    Ok(b * shape(x, log_exponent_f64(spec)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioPoint {
    pub x: u64,
    pub predicted: f64,
    pub empirical: u64,
    /// `predicted / empirical`; `None` while nothing has vanished.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionCurve {
    pub family: FamilySpec,
    pub log_exponent: (i32, i32),
    pub fitted_b: f64,
    pub grid: Vec<RatioPoint>,
}

impl PredictionCurve {
    /// `max/min - 1` of the ratios at grid points with `X ≥ from`.
    pub fn tail_variation(&self, from: u64) -> Option<f64> {
        let r: Vec<f64> = self.grid.iter().filter(|p| p.x >= from).filter_map(|p| p.ratio).collect();
        if r.is_empty() {
            return None;
        }
        let hi = r.iter().copied().fold(f64::MIN, f64::max);
        let lo = r.iter().copied().fold(f64::MAX, f64::min);
        Some(hi / lo - 1.0)
    }
}

pub const MIN_TAIL_POINTS: usize = 5;

/// Least-squares `b` on the upper half of the grid, plus the ratio series.
pub fn fit_constant(family: FamilySpec, empirical: &[(u64, u64)]) -> Result<PredictionCurve, RmtError> {
    let e = log_exponent_f64(&family);
    let mut pts: Vec<(u64, u64)> = empirical.iter().copied().filter(|&(x, _)| x >= 3).collect();
    pts.sort_unstable();
    let tail = &pts[pts.len() / 2..];
    if tail.len() < MIN_TAIL_POINTS {
        return Err(RmtError::InsufficientData {
            need: MIN_TAIL_POINTS,
            got: tail.len(),
        });
    }
    let (num, den) = tail.iter().fold((0.0, 0.0), |(n, d), &(x, v)| {
        let f = shape(x as f64, e);
        (n + v as f64 * f, d + f * f)
    });
    let b = num / den;
    let grid = pts
        .iter()
        .map(|&(x, v)| {
            let predicted = b * shape(x as f64, e);
            RatioPoint {
                x,
                predicted,
                empirical: v,
                ratio: (v > 0).then(|| predicted / v as f64),
            }
        })
        .collect();
    Ok(PredictionCurve {
        family,
        log_exponent: log_exponent(family.order, family.variant),
        fitted_b: b,
        grid,
    })
}

/// `2^{1/4} a_E G(1/2)² (log X)^{1/4} c_{E,ℓ} / √q`, clamped to `[0, 1]`.
pub fn vanishing_probability(a_e: f64, c_el: f64, q: u64, x: f64) -> f64 {
    let g = barnes_g_half();
    let p = 2f64.powf(0.25) * a_e * g * g * x.ln().powf(0.25) * c_el / (q as f64).sqrt();
    if !(0.0..=1.0).contains(&p) {
        warn!("vanishing probability {p} clamped (q = {q})");
    }
    p.clamp(0.0, 1.0)
}

pub fn write_ratio_csv<W: Write>(w: W, curve: &PredictionCurve) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["family", "X", "empirical", "predicted", "ratio"])?;
    let name = curve.family.name();
    for p in &curve.grid {
        out.write_record([
            name.clone(),
            p.x.to_string(),
            p.empirical.to_string(),
            format!("{:.12e}", p.predicted),
            p.ratio.map_or(String::new(), |r| format!("{r:.12e}")),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    // 30-digit values from an independent mpmath evaluation.
    const G_HALF: f64 = 0.603244281209446206191429224535;
    const ZETA_PRIME_M1: f64 = -0.165_421_143_700_450_94;

    #[test]
    fn barnes_value() {
        assert!((zeta_prime_minus_one() - ZETA_PRIME_M1).abs() < 1e-15);
        assert!((barnes_g_half() - G_HALF).abs() < 1e-12);
        assert!(barnes_g_half().powi(2) > 0.0);
    }

    #[test]
    fn ln_gamma_values() {
        let cases = [
            (0.5, 0.5 * PI.ln()),
            (1.0, 0.0),
            (2.0, 0.0),
            (10.0, 362880f64.ln()),
            (100.0, 359.134_205_369_575_4),
        ];
        for (x, want) in cases {
            let got = ln_gamma(Complex64::new(x, 0.0));
            assert!((got.re - want).abs() < 1e-12 * want.abs().max(1.0), "{x}: {got}");
        }
        // |Γ(1/2 + it)|² = π / cosh(πt)
        for t in [0.3, 2.0, 7.5] {
            let g = ln_gamma(Complex64::new(0.5, t));
            assert!((2.0 * g.re - (PI / (PI * t).cosh()).ln()).abs() < 1e-12);
            assert!((g - ln_gamma_lanczos(Complex64::new(0.5, t))).norm() < 1e-10);
        }
    }

    #[test]
    fn moments() {
        for n in [1u32, 2, 10, 100, 1000] {
            let m0 = m_u(Complex64::new(0.0, 0.0), n).unwrap();
            assert!((m0 - 1.0).norm() < 1e-12);
            let m2 = m_u(Complex64::new(2.0, 0.0), n).unwrap();
            assert!((m2.re / (n as f64 + 1.0) - 1.0).abs() < 1e-9, "N = {n}: {m2}");
            assert!(m2.im.abs() < 1e-9 * m2.re);
        }
        for s in [-0.9, -0.5, 0.5, 1.0, 3.3] {
            assert!(m_u(Complex64::new(s, 0.0), 50).unwrap().re > 0.0);
        }
        assert!(matches!(m_u(Complex64::new(-1.0, 0.0), 3), Err(RmtError::PoleRegion(_))));
    }

    #[test]
    fn exponent_table() {
        assert_eq!(log_exponent(4, Variant::All), (5, 4));
        assert_eq!(log_exponent(6, Variant::All), (9, 4));
        assert_eq!(log_exponent(4, Variant::Totally), (1, 4));
        assert_eq!(log_exponent(6, Variant::Totally), (1, 4));
        assert_eq!(log_exponent(4, Variant::Prime), (-3, 4));
        assert_eq!(log_exponent(6, Variant::Prime), (-3, 4));
    }

    #[test]
    fn prediction_and_fit() {
        let spec = FamilySpec::new(4, Variant::Prime);
        assert_eq!(predicted_vanishings(&spec, 1e4, 0.0).unwrap(), 0.0);
        assert!(predicted_vanishings(&spec, 2.0, 1.0).is_err());
        let x = 1e5;
        let r = predicted_vanishings(&spec, 2.0 * x, 1.0).unwrap() / predicted_vanishings(&spec, x, 1.0).unwrap();
        let approx = 2f64.sqrt() * (1.0 - 0.75 * 2f64.ln() / x.ln());
        assert!((r / approx - 1.0).abs() < 5e-3);

        let b0 = 0.37;
        let e = log_exponent_f64(&spec);
        let data: Vec<(u64, u64)> = (1..=20)
            .map(|i| {
                let x = 1000 * i * i;
                (x, (b0 * shape(x as f64, e)).round() as u64)
            })
            .collect();
        let fit = fit_constant(spec, &data).unwrap();
        assert!((fit.fitted_b / b0 - 1.0).abs() < 0.01);
        assert!(fit.tail_variation(100_000).unwrap() < 0.05);
        let scaled: Vec<(u64, u64)> = data.iter().map(|&(x, v)| (x, 3 * v)).collect();
        let fit3 = fit_constant(spec, &scaled).unwrap();
        assert!((fit3.fitted_b / fit.fitted_b - 3.0).abs() < 1e-12);
        assert!(matches!(fit_constant(spec, &[]), Err(RmtError::InsufficientData { .. })));

        let mut buf = Vec::new();
        write_ratio_csv(&mut buf, &fit).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("family,X,empirical,predicted,ratio\n"));
    }

    #[test]
    fn probability_is_linear_and_clamped() {
        let p1 = vanishing_probability(0.1, 1.0, 10_000, 1e5);
        let p2 = vanishing_probability(0.2, 1.0, 10_000, 1e5);
        assert!((p2 / p1 - 2.0).abs() < 1e-12);
        assert_eq!(vanishing_probability(1e9, 1.0, 5, 1e5), 1.0);
    }
}
