use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use log::{debug, info};
use rayon::prelude::*;

use super::{EllipticCurveData, LfunError};
use crate::arith::SpfSieve;

/// `a_p = p + 1 - #Ẽ(𝔽_p)`, counting every point of the reduction
/// (including a singular one), which gives 0 or ±1 at bad primes of a
/// minimal model.
pub fn ap_point_count(e: &EllipticCurveData, p: u64) -> i64 {
    if p == 2 {
        return ap_brute_force(e, 2);
    }
    // (2y + a1 x + a3)² = 4x³ + b2 x² + 2 b4 x + b6 =: g(x)
    let pm = p as i128;
    let red = |v: i128| v.rem_euclid(pm) as u64;
    let (c3, c2, c1, c0) = (red(4), red(e.b2()), red(2 * e.b4()), red(e.b6()));
    // Legendre symbol table: 1 on nonzero squares, -1 elsewhere, 0 at 0.
    let mut legendre = vec![-1i8; p as usize];
    legendre[0] = 0;
    let mut sq = 0u64;
    for x in 0..p / 2 {
        // (x+1)² = x² + 2x + 1, kept reduced without division
        sq += 2 * x + 1;
        while sq >= p {
            sq -= p;
        }
        legendre[sq as usize] = 1;
    }
    // forward differences of g at x = 0, 1, 2, ...
    let g = |x: u64| -> u64 {
        let x = x % p;
        (((c3 * x % p + c2) % p * x % p + c1) % p * x % p + c0) % p
    };
    let sub = |a: u64, b: u64| if a >= b { a - b } else { a + p - b };
    let add = |a: u64, b: u64| {
        let s = a + b;
        if s >= p {
            s - p
        } else {
            s
        }
    };
    // LANES interleaved difference chains of stride LANES for more ILP
    const LANES: usize = 4;
    let step = LANES as u64;
    let mut state = [[0u64; 4]; LANES];
    for (lane, st) in state.iter_mut().enumerate() {
        let x = lane as u64;
        let (g0, g1, g2, g3) = (g(x), g(x + step), g(x + 2 * step), g(x + 3 * step));
        let d1 = sub(g1, g0);
        let d2 = sub(sub(g2, g1), d1);
        let d3 = sub(sub(sub(g3, g2), sub(g2, g1)), d2);
        *st = [g0, d1, d2, d3];
    }
    let mut sums = [0i64; LANES];
    let rounds = p / step;
    for _ in 0..rounds {
        for (st, acc) in state.iter_mut().zip(sums.iter_mut()) {
            *acc += legendre[st[0] as usize] as i64;
            st[0] = add(st[0], st[1]);
            st[1] = add(st[1], st[2]);
            st[2] = add(st[2], st[3]);
        }
    }
    let mut sum: i64 = sums.iter().sum();
    for x in rounds * step..p {
        sum += legendre[g(x) as usize] as i64;
    }
    -sum
}

/// Direct count on the original equation; for tests and `p = 2`.
pub fn ap_brute_force(e: &EllipticCurveData, p: u64) -> i64 {
    let pm = p as i128;
    let r = |v: i64| (v as i128).rem_euclid(pm);
    let (a1, a2, a3, a4, a6) = (r(e.a1), r(e.a2), r(e.a3), r(e.a4), r(e.a6));
    let mut count = 1i64;
    for x in 0..pm {
        for y in 0..pm {
            let lhs = y * y + a1 * x * y + a3 * y;
            let rhs = x * x * x + a2 * x * x + a4 * x + a6;
            if (lhs - rhs).rem_euclid(pm) == 0 {
                count += 1;
            }
        }
    }
    p as i64 + 1 - count
}

/// `a_1..a_{n_max}` of `L(E, s)`; index 0 is unused and set to 0.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    pub label: String,
    pub n_max: usize,
    pub a: Vec<i64>,
}

impl CoefficientTable {
    pub fn get(&self, n: usize) -> i64 {
        self.a[n]
    }

    /// Build by point counting at primes and the Hecke recursion at prime
    /// powers.
    pub fn build(e: &EllipticCurveData, n_max: usize) -> Self {
        let n_max = n_max.max(1);
        let sieve = SpfSieve::new(n_max as u64);
        let primes: Vec<u64> = sieve.primes().collect();
        debug!("counting points at {} primes up to {}", primes.len(), n_max);
        let aps: Vec<i64> = primes.par_iter().map(|&p| ap_point_count(e, p)).collect();
        let mut a = vec![0i64; n_max + 1];
        a[1] = 1;
        for (&p, &ap) in primes.iter().zip(&aps) {
            a[p as usize] = ap;
        }
        for n in 2..=n_max {
            let p = sieve.spf(n as u64) as usize;
            let mut pk = p;
            while (n / pk).is_multiple_of(p) {
                pk *= p;
            }
            let m = n / pk;
            if m > 1 {
                a[n] = a[pk] * a[m];
            } else if pk != p {
                let ap = a[p];
                let bad = e.conductor.is_multiple_of(p as u64);
                a[n] = if bad {
                    ap * a[n / p]
                } else {
                    ap * a[n / p] - p as i64 * a[n / p / p]
                };
            }
        }
        CoefficientTable {
            label: e.label.clone(),
            n_max,
            a,
        }
    }

    pub fn prefix(&self, n_max: usize) -> Self {
        assert!(n_max <= self.n_max);
        CoefficientTable {
            label: self.label.clone(),
            n_max,
            a: self.a[..=n_max].to_vec(),
        }
    }

    /// Binary cache: one text header line, then little-endian `i64`s.
    pub fn save(&self, path: &Path) -> Result<(), LfunError> {
        let tmp = path.with_extension("tmp");
        {
            let mut w = BufWriter::new(File::create(&tmp)?);
            writeln!(w, "ltwist-an v1 label={} n_max={}", self.label, self.n_max)?;
            for &x in &self.a[1..] {
                w.write_all(&x.to_le_bytes())?;
            }
            w.flush()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, LfunError> {
        let mut r = BufReader::new(File::open(path)?);
        let mut header = String::new();
        r.read_line(&mut header)?;
        let bad = || LfunError::Cache(format!("{}: bad header {header:?}", path.display()));
        let mut fields = header.split_whitespace();
        if fields.next() != Some("ltwist-an") || fields.next() != Some("v1") {
            return Err(bad());
        }
        let label = fields
            .next()
            .and_then(|f| f.strip_prefix("label="))
            .ok_or_else(bad)?
            .to_string();
        let n_max: usize = fields
            .next()
            .and_then(|f| f.strip_prefix("n_max="))
            .and_then(|v| v.parse().ok())
            .ok_or_else(bad)?;
        let mut bytes = Vec::with_capacity(8 * n_max);
        r.read_to_end(&mut bytes)?;
        if bytes.len() != 8 * n_max {
            return Err(LfunError::Cache(format!("{}: truncated", path.display())));
        }
        let mut a = Vec::with_capacity(n_max + 1);
        a.push(0);
        a.extend(
            bytes
                .chunks_exact(8)
                .map(|c| i64::from_le_bytes(c.try_into().unwrap())),
        );
        Ok(CoefficientTable { label, n_max, a })
    }

    /// Cached table with at least `n_max` coefficients.
    pub fn cached(e: &EllipticCurveData, n_max: usize, dir: &Path) -> Result<Self, LfunError> {
        let path = cache_path(dir, &e.label);
        if let Ok(t) = Self::load(&path) {
            if t.label == e.label && t.n_max >= n_max {
                debug!("coefficient cache hit {}", path.display());
                return Ok(t);
            }
        }
        info!("building a_n for {} up to {}", e.label, n_max);
        let t = Self::build(e, n_max);
        fs::create_dir_all(dir)?;
        t.save(&path)?;
        Ok(t)
    }

    /// `a_1 = 1`, multiplicativity on coprime pairs up to `limit`, and the
    /// Hasse bound at good primes.
    pub fn check_invariants(&self, conductor: u64, limit: usize) -> Result<(), String> {
        if self.a[1] != 1 {
            return Err("a_1 != 1".into());
        }
        let limit = limit.min(self.n_max);
        let sieve = SpfSieve::new(self.n_max as u64);
        for p in sieve.primes() {
            if !conductor.is_multiple_of(p) && (self.a[p as usize] as f64).powi(2) > 4.0 * p as f64 {
                return Err(format!("Hasse bound fails at {p}"));
            }
        }
        for m in 2..=limit {
            for n in 2..=limit / m {
                if crate::arith::gcd(m as u64, n as u64) == 1 && self.a[m * n] != self.a[m] * self.a[n] {
                    return Err(format!("a_{} != a_{} a_{}", m * n, m, n));
                }
            }
        }
        Ok(())
    }
}

pub fn cache_path(dir: &Path, label: &str) -> PathBuf {
    let safe: String = label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' })
        .collect();
    dir.join(format!("{safe}.an"))
}
