use std::collections::HashMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{local_options, DirichletCharacter, LocalCharacter};
use crate::arith::{gcd, SpfSieve};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    All,
    Totally,
    Prime,
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::All => "all",
            Variant::Totally => "tot",
            Variant::Prime => "prime",
        }
    }
}

/// Which family to enumerate: order ℓ ∈ {4, 6} and a variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FamilySpec {
    pub order: u8,
    pub variant: Variant,
    /// Only conductors coprime to this.
    pub coprime_to: u64,
    /// Allow the order-6 characters mod 9 in the totally sextic family.
    pub sextic_nine: bool,
}

impl FamilySpec {
    pub fn new(order: u8, variant: Variant) -> Self {
        assert!(order == 4 || order == 6, "order must be 4 or 6");
        FamilySpec {
            order,
            variant,
            coprime_to: 1,
            sextic_nine: false,
        }
    }

    pub fn coprime_to(mut self, n: u64) -> Self {
        self.coprime_to = n;
        self
    }

    pub fn with_sextic_nine(mut self, yes: bool) -> Self {
        self.sextic_nine = yes;
        self
    }

    /// Short name such as `4:all`.
    pub fn name(&self) -> String {
        format!("{}:{}", self.order, self.variant.name())
    }

    /// Whether `chi` (of any order) belongs to this family.
    pub fn contains(&self, chi: &DirichletCharacter) -> bool {
        if chi.order() != self.order || gcd(chi.conductor(), self.coprime_to) != 1 {
            return false;
        }
        match self.variant {
            Variant::All => true,
            Variant::Totally => {
                chi.is_totally(self.order)
                    && (self.sextic_nine || self.order != 6 || !chi.conductor().is_multiple_of(3))
            }
            Variant::Prime => chi.locals().len() == 1 && chi.locals()[0].exponent() == 1,
        }
    }

    fn local_admissible(&self, c: &LocalCharacter) -> bool {
        match self.variant {
            Variant::All => true,
            Variant::Totally => {
                c.order() == self.order && (self.sextic_nine || c.prime() != 3)
            }
            Variant::Prime => c.order() == self.order && c.exponent() == 1,
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for FamilySpec {
    type Err = String;

    /// Parses `4:all`, `6:tot`, `4:prime`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (o, v) = s
            .split_once(':')
            .ok_or_else(|| format!("expected ORDER:VARIANT, got {s:?}"))?;
        let order = match o.trim() {
            "4" => 4,
            "6" => 6,
            other => return Err(format!("unsupported order {other:?}")),
        };
        let variant = match v.trim() {
            "all" => Variant::All,
            "tot" | "totally" => Variant::Totally,
            "prime" => Variant::Prime,
            other => return Err(format!("unknown variant {other:?}")),
        };
        Ok(FamilySpec::new(order, variant))
    }
}

/// All family members of conductor exactly `q`, by increasing Conrey index.
pub fn characters_of_conductor(
    spec: &FamilySpec,
    q: u64,
    factors: &[(u64, u32)],
) -> Vec<DirichletCharacter> {
    if q == 1 || gcd(q, spec.coprime_to) != 1 {
        return Vec::new();
    }
    if spec.variant == Variant::Prime && (factors.len() != 1 || factors[0].1 != 1) {
        return Vec::new();
    }
    let mut options = Vec::with_capacity(factors.len());
    for &(p, e) in factors {
        let opts: Vec<LocalCharacter> = local_options(p, e, spec.order)
            .into_iter()
            .filter(|c| spec.local_admissible(c))
            .collect();
        if opts.is_empty() {
            return Vec::new();
        }
        options.push(opts);
    }
    let mut out = Vec::new();
    let mut pick = vec![0usize; options.len()];
    loop {
        let locals: Vec<LocalCharacter> = pick
            .iter()
            .zip(&options)
            .map(|(&i, o)| o[i].clone())
            .collect();
        let chi = DirichletCharacter::from_locals(locals);
        if chi.order() == spec.order {
            out.push(chi);
        }
        let mut k = 0;
        while k < pick.len() {
            pick[k] += 1;
            if pick[k] < options[k].len() {
                break;
            }
            pick[k] = 0;
            k += 1;
        }
        if k == pick.len() {
            break;
        }
    }
    out.sort_by_key(DirichletCharacter::conrey_index);
    out
}

/// Every family member with conductor `≤ x`, by nondecreasing conductor.
pub fn enumerate_family(spec: FamilySpec, x: u64) -> impl Iterator<Item = DirichletCharacter> {
    let sieve = SpfSieve::new(x.max(1));
    (2..=x).flat_map(move |q| characters_of_conductor(&spec, q, &sieve.factor(q)))
}

fn local_counts(p: u64, e: u32, spec: &FamilySpec) -> [u64; 13] {
    // c[d] = admissible locals with order exactly d
    let mut c = [0u64; 13];
    for chi in local_options(p, e, spec.order) {
        if spec.local_admissible(&chi) {
            c[chi.order() as usize] += 1;
        }
    }
    c
}

/// Local counts depend on `p` only through `gcd(p-1, 12)` once `p ≥ 5`.
#[derive(Default)]
struct LocalCountCache {
    map: HashMap<(u64, u32, u64), [u64; 13]>,
}

impl LocalCountCache {
    fn get(&mut self, p: u64, e: u32, spec: &FamilySpec) -> [u64; 13] {
        let key = if p < 5 { (p, e, 0) } else { (0, e, gcd(p - 1, 12)) };
        *self.map.entry(key).or_insert_with(|| local_counts(p, e, spec))
    }
}

fn count_with(
    spec: &FamilySpec,
    q: u64,
    factors: &[(u64, u32)],
    cache: &mut LocalCountCache,
) -> u64 {
    if q == 1 || gcd(q, spec.coprime_to) != 1 {
        return 0;
    }
    if spec.variant == Variant::Prime && (factors.len() != 1 || factors[0].1 != 1) {
        return 0;
    }
    let locals: Vec<[u64; 13]> = factors.iter().map(|&(p, e)| cache.get(p, e, spec)).collect();
    // ∏ over primes of (#locals with order | d), then Möbius over divisors d of ℓ.
    let divides = |d: usize| -> u64 {
        locals
            .iter()
            .map(|c| (1..=12).filter(|o| d.is_multiple_of(*o)).map(|o| c[o]).sum::<u64>())
            .product()
    };
    match spec.order {
        4 => divides(4) - divides(2),
        6 => divides(6) + divides(1) - divides(2) - divides(3),
        _ => unreachable!(),
    }
}

/// Number of family members of conductor exactly `q`, without building them.
pub fn count_of_conductor(spec: &FamilySpec, q: u64, factors: &[(u64, u32)]) -> u64 {
    count_with(spec, q, factors, &mut LocalCountCache::default())
}

/// `|family(X)|` for each `X` in `grid`.
pub fn count_family(spec: &FamilySpec, grid: &[u64]) -> Vec<u64> {
    let xmax = grid.iter().copied().max().unwrap_or(0);
    let per_q = conductor_counts(spec, xmax);
    let mut prefix = vec![0u64; per_q.len()];
    let mut acc = 0;
    for (q, c) in per_q.iter().enumerate() {
        acc += c;
        prefix[q] = acc;
    }
    grid.iter().map(|&x| prefix[x as usize]).collect()
}

fn conductor_counts(spec: &FamilySpec, xmax: u64) -> Vec<u64> {
    let sieve = SpfSieve::new(xmax.max(1));
    let mut out = vec![0u64; xmax as usize + 1];
    let mut cache = LocalCountCache::default();
    for q in 2..=xmax {
        out[q as usize] = count_with(spec, q, &sieve.factor(q), &mut cache);
    }
    out
}

/// `Σ cond(χ)^{-1/2}` over `family(X)`.
pub fn sum_inverse_sqrt_conductor(spec: &FamilySpec, x: u64) -> f64 {
    conductor_counts(spec, x)
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(q, &c)| c as f64 / (q as f64).sqrt())
        .sum()
}

/// Tightest family tag of a character of order ℓ.
pub fn variant_tag(chi: &DirichletCharacter) -> Variant {
    let l = chi.order();
    if chi.locals().len() == 1 && chi.locals()[0].exponent() == 1 {
        Variant::Prime
    } else if chi.is_totally(l) {
        Variant::Totally
    } else {
        Variant::All
    }
}

/// CSV with columns `conductor,conrey_index,order,variant,parity`.
pub fn write_characters_csv<W: Write>(
    w: W,
    chars: impl IntoIterator<Item = DirichletCharacter>,
) -> csv::Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["conductor", "conrey_index", "order", "variant", "parity"])?;
    for chi in chars {
        wr.write_record(&[
            chi.conductor().to_string(),
            chi.conrey_index().to_string(),
            chi.order().to_string(),
            variant_tag(&chi).name().to_string(),
            chi.parity().to_string(),
        ])?;
    }
    wr.flush()?;
    Ok(())
}
