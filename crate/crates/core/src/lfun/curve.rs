use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::LfunError;

/// An elliptic curve over ℚ in long Weierstrass form together with the
/// invariants that are taken as inputs rather than computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipticCurveData {
    pub label: String,
    pub a1: i64,
    pub a2: i64,
    pub a3: i64,
    pub a4: i64,
    pub a6: i64,
    pub conductor: u64,
    pub root_number: i8,
    /// Generator of the real period lattice `Λ ∩ ℝ`.
    pub omega_plus: Option<f64>,
    /// `|Ω₋|` where `Ω₋` generates `Λ ∩ iℝ`.
    pub omega_minus: Option<f64>,
    /// Order of a rational torsion point or isogeny that puts the curve
    /// outside the family conditions, if any.
    pub isogeny_torsion: Option<u32>,
}

impl EllipticCurveData {
    pub fn new(label: &str, a: [i64; 5], conductor: u64, root_number: i8) -> Result<Self, LfunError> {
        let e = EllipticCurveData {
            label: label.to_string(),
            a1: a[0],
            a2: a[1],
            a3: a[2],
            a4: a[3],
            a6: a[4],
            conductor,
            root_number,
            omega_plus: None,
            omega_minus: None,
            isogeny_torsion: None,
        };
        e.validate()?;
        Ok(e)
    }

    /// `y² + y = x³ - x² - 10x - 20`, conductor 11, rank 0.
    pub fn cremona_11a1() -> Self {
        Self::new("11.a.1", [0, -1, 1, -10, -20], 11, 1).unwrap()
    }

    /// `y² + y = x³ - x`, conductor 37, rank 1.
    pub fn cremona_37a1() -> Self {
        Self::new("37.a.1", [0, 0, 1, -1, 0], 37, -1).unwrap()
    }

    fn validate(&self) -> Result<(), LfunError> {
        if self.discriminant() == 0 {
            return Err(LfunError::SingularCurve(self.label.clone()));
        }
        if self.root_number != 1 && self.root_number != -1 {
            return Err(LfunError::Config(format!("root number {}", self.root_number)));
        }
        if self.conductor == 0 {
            return Err(LfunError::Config("conductor must be positive".into()));
        }
        if let Some(w) = self.omega_plus {
            if w <= 0.0 {
                return Err(LfunError::Config("omega_plus must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn b2(&self) -> i128 {
        (self.a1 * self.a1 + 4 * self.a2) as i128
    }

    pub fn b4(&self) -> i128 {
        (2 * self.a4 + self.a1 * self.a3) as i128
    }

    pub fn b6(&self) -> i128 {
        (self.a3 * self.a3 + 4 * self.a6) as i128
    }

    pub fn b8(&self) -> i128 {
        let (a1, a2, a3, a4, a6) = (
            self.a1 as i128,
            self.a2 as i128,
            self.a3 as i128,
            self.a4 as i128,
            self.a6 as i128,
        );
        a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    }

    pub fn discriminant(&self) -> i128 {
        let (b2, b4, b6, b8) = (self.b2(), self.b4(), self.b6(), self.b8());
        -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    }

    /// Parse the line-oriented `key = value` format (`#` starts a comment).
    ///
    /// Required keys: `label`, `a1`..`a6` (no `a5`), `conductor`,
    /// `root_number`. Optional: `omega_plus`, `omega_minus`,
    /// `isogeny_torsion`.
    pub fn parse(text: &str) -> Result<Self, LfunError> {
        let mut label = None;
        let mut a = [None::<i64>; 5];
        let mut conductor = None;
        let mut root_number = None;
        let mut omega_plus = None;
        let mut omega_minus = None;
        let mut isogeny_torsion = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| LfunError::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            let bad = |what: &str| LfunError::Config(format!("line {}: bad {what} {v:?}", lineno + 1));
            match k {
                "label" => label = Some(v.to_string()),
                "a1" | "a2" | "a3" | "a4" | "a6" => {
                    let slot = match k {
                        "a1" => 0,
                        "a2" => 1,
                        "a3" => 2,
                        "a4" => 3,
                        _ => 4,
                    };
                    a[slot] = Some(v.parse().map_err(|_| bad(k))?);
                }
                "conductor" => conductor = Some(v.parse().map_err(|_| bad(k))?),
                "root_number" => root_number = Some(v.parse().map_err(|_| bad(k))?),
                "omega_plus" => omega_plus = Some(v.parse().map_err(|_| bad(k))?),
                "omega_minus" => omega_minus = Some(v.parse().map_err(|_| bad(k))?),
                "isogeny_torsion" => isogeny_torsion = Some(v.parse().map_err(|_| bad(k))?),
                other => return Err(LfunError::Config(format!("unknown key {other:?}"))),
            }
        }
        let missing = |k: &str| LfunError::Config(format!("missing key {k}"));
        let coeffs = [
            a[0].ok_or_else(|| missing("a1"))?,
            a[1].ok_or_else(|| missing("a2"))?,
            a[2].ok_or_else(|| missing("a3"))?,
            a[3].ok_or_else(|| missing("a4"))?,
            a[4].ok_or_else(|| missing("a6"))?,
        ];
        let mut e = EllipticCurveData::new(
            &label.ok_or_else(|| missing("label"))?,
            coeffs,
            conductor.ok_or_else(|| missing("conductor"))?,
            root_number.ok_or_else(|| missing("root_number"))?,
        )?;
        e.omega_plus = omega_plus;
        e.omega_minus = omega_minus;
        e.isogeny_torsion = isogeny_torsion;
        e.validate()?;
        Ok(e)
    }

    pub fn load(path: &Path) -> Result<Self, LfunError> {
        let text = fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn to_config(&self) -> String {
        let mut s = format!(
            "label = {}\na1 = {}\na2 = {}\na3 = {}\na4 = {}\na6 = {}\nconductor = {}\nroot_number = {}\n",
            self.label, self.a1, self.a2, self.a3, self.a4, self.a6, self.conductor, self.root_number
        );
        if let Some(w) = self.omega_plus {
            s += &format!("omega_plus = {w:.17e}\n");
        }
        if let Some(w) = self.omega_minus {
            s += &format!("omega_minus = {w:.17e}\n");
        }
        if let Some(t) = self.isogeny_torsion {
            s += &format!("isogeny_torsion = {t}\n");
        }
        s
    }

    /// Periods from the config if present, otherwise by AGM.
    pub fn periods(&self) -> Result<(f64, f64), LfunError> {
        match (self.omega_plus, self.omega_minus) {
            (Some(p), Some(m)) => Ok((p, m)),
            _ => super::compute_periods(self),
        }
    }
}
