//! Exact integer combinatorics: binomial coefficients under the zero
//! convention, colexicographic ranking/unranking of k-subsets, and
//! intersection sizes. Everything downstream builds on this module.
//!
//! Convention used throughout the crate: binom(a,b) = 0 whenever a < b or
//! b < 0, and binom(a,0) = 1 for a ≥ 0.

use crate::{Error, Result};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use std::sync::OnceLock;

/// Rows of Pascal's triangle cached by the shared table. Larger arguments
/// fall back to the multiplicative formula; the value is still exact.
pub const PASCAL_CACHED_ROWS: usize = 512;

struct Pascal {
    rows: Vec<Vec<BigUint>>,
}

impl Pascal {
    fn build(a_max: usize) -> Self {
        let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(a_max + 1);
        for a in 0..=a_max {
            let mut row = Vec::with_capacity(a + 1);
            row.push(BigUint::one());
            for b in 1..=a {
                let prev = &rows[a - 1];
                let left = if b <= a - 1 { prev[b].clone() } else { BigUint::zero() };
                row.push(left + &prev[b - 1]);
            }
            rows.push(row);
        }
        Pascal { rows }
    }
}

fn table() -> &'static Pascal {
    // Built once before any parallel section that uses it; read-only after.
    static TABLE: OnceLock<Pascal> = OnceLock::new();
    TABLE.get_or_init(|| Pascal::build(PASCAL_CACHED_ROWS))
}

/// Exact binomial coefficient with the zero convention: total on all
/// integer inputs, 0 iff a < b or b < 0.
pub fn binomial(a: i64, b: i64) -> BigUint {
    if b < 0 || a < b {
        return BigUint::zero();
    }
    // Here 0 <= b <= a.
    let (a, b) = (a as usize, b as usize);
    let b = b.min(a - b);
    if a < table().rows.len() {
        return table().rows[a][b].clone();
    }
    let mut acc = BigUint::one();
    for j in 0..b {
        acc = acc * BigUint::from(a - j) / BigUint::from(j + 1);
    }
    acc
}

/// Saturating u64 binomial for the ranking hot path. Exact whenever the
/// true value fits in u64.
pub fn binomial_u64(a: u64, b: u64) -> u64 {
    if b > a {
        return 0;
    }
    let b = b.min(a - b);
    let mut acc: u128 = 1;
    for j in 0..b {
        acc = match acc.checked_mul((a - j) as u128) {
            Some(v) => v / (j as u128 + 1),
            None => return u64::MAX,
        };
    }
    acc.try_into().unwrap_or(u64::MAX)
}

/// ln binom(a,b); −∞ when the coefficient is zero. Exact summation of a few
/// logs — b is small everywhere this is used.
pub fn ln_binomial(a: i64, b: i64) -> f64 {
    if b < 0 || a < b {
        return f64::NEG_INFINITY;
    }
    let b = b.min(a - b);
    let mut acc = 0.0;
    for j in 0..b {
        acc += ((a - j) as f64).ln() - ((j + 1) as f64).ln();
    }
    acc
}

/// Exact binom(a,b) as f64 (for small arguments where it fits).
pub fn binomial_f64(a: i64, b: i64) -> f64 {
    binomial(a, b).to_f64().unwrap_or(f64::INFINITY)
}

/// A sorted r-element subset of {1,…,n}: the vertex type of G(n,r,s).
///
/// Elements are strictly increasing, 1-based, all ≤ `ground_n`. Immutable
/// after construction and safe to share across threads.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct KSubset {
    ground_n: u32,
    elems: Vec<u32>,
}

impl KSubset {
    pub fn new(ground_n: u32, mut elems: Vec<u32>) -> Result<Self> {
        elems.sort_unstable();
        if elems.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Precondition("subset elements must be distinct".into()));
        }
        if elems.iter().any(|&e| e < 1 || e > ground_n) {
            return Err(Error::Precondition(format!(
                "subset elements must lie in [1, {ground_n}]"
            )));
        }
        Ok(KSubset { ground_n, elems })
    }

    pub fn ground_n(&self) -> u32 {
        self.ground_n
    }

    pub fn elems(&self) -> &[u32] {
        &self.elems
    }

    pub fn size(&self) -> usize {
        self.elems.len()
    }

    pub fn contains(&self, e: u32) -> bool {
        self.elems.binary_search(&e).is_ok()
    }

    /// Bit-mask fast path, available whenever the ground set fits 128 bits.
    pub fn mask128(&self) -> Option<u128> {
        if self.ground_n > 128 {
            return None;
        }
        let mut m = 0u128;
        for &e in &self.elems {
            m |= 1u128 << (e - 1);
        }
        Some(m)
    }

    /// |self ∩ other|. Mask path and merge-scan path agree by construction
    /// (property-tested).
    pub fn intersection_size(&self, other: &KSubset) -> Result<usize> {
        if self.ground_n != other.ground_n {
            return Err(Error::Contract(format!(
                "ground sets differ: {} vs {}",
                self.ground_n, other.ground_n
            )));
        }
        if let (Some(a), Some(b)) = (self.mask128(), other.mask128()) {
            return Ok((a & b).count_ones() as usize);
        }
        Ok(intersection_size_scan(&self.elems, &other.elems))
    }

    /// Colexicographic rank: Σ_k binom(e_k − 1, k) over 1-based positions.
    pub fn rank(&self) -> u64 {
        self.elems
            .iter()
            .enumerate()
            .map(|(k, &e)| binomial_u64((e - 1) as u64, (k + 1) as u64))
            .sum()
    }

    /// Inverse of [`rank`]: the `index`-th r-subset of [1,n] in colex order.
    pub fn unrank(index: u64, n: u32, r: u32) -> Result<Self> {
        let total = binomial_u64(n as u64, r as u64);
        if index >= total {
            return Err(Error::Range(format!(
                "subset index {index} out of range [0, {total}) for n={n} r={r}"
            )));
        }
        let mut rem = index;
        let mut elems = vec![0u32; r as usize];
        let mut hi = n as u64;
        for k in (1..=r as u64).rev() {
            // Largest c with binom(c, k) <= rem; element is c+1 (1-based).
            let mut c = hi - 1;
            while binomial_u64(c, k) > rem {
                c -= 1;
            }
            rem -= binomial_u64(c, k);
            elems[(k - 1) as usize] = (c + 1) as u32;
            hi = c;
        }
        Ok(KSubset { ground_n: n, elems })
    }

    /// In-place colex successor over r-subsets of [1,n]; false when `self`
    /// is the last one. Used for linear-time vertex enumeration.
    pub fn next_colex(&mut self) -> bool {
        let r = self.elems.len();
        for k in 0..r {
            let cap = if k + 1 < r { self.elems[k + 1] - 1 } else { self.ground_n };
            if self.elems[k] < cap {
                self.elems[k] += 1;
                for (j, slot) in self.elems.iter_mut().enumerate().take(k) {
                    *slot = j as u32 + 1;
                }
                return true;
            }
        }
        false
    }

    /// First r-subset in colex order: {1,…,r}.
    pub fn first(n: u32, r: u32) -> Result<Self> {
        if r > n {
            return Err(Error::Precondition(format!("r={r} exceeds n={n}")));
        }
        Ok(KSubset {
            ground_n: n,
            elems: (1..=r).collect(),
        })
    }

    /// Applies a relabeling permutation (1-based old → new) and re-sorts.
    pub fn relabel(&self, perm: &[u32]) -> KSubset {
        let mut elems: Vec<u32> = self.elems.iter().map(|&e| perm[e as usize]).collect();
        elems.sort_unstable();
        KSubset {
            ground_n: self.ground_n,
            elems,
        }
    }
}

impl std::fmt::Display for KSubset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.elems.iter().map(|e| e.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

fn intersection_size_scan(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// A parsed family file: header `n=<int> r=<int>`, one subset per line as
/// space-separated 1-based integers, `#` comments allowed.
#[derive(Clone, Debug)]
pub struct FamilyFile {
    pub n: u32,
    pub r: u32,
    pub members: Vec<KSubset>,
}

pub fn parse_family(text: &str) -> Result<FamilyFile> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("family file is empty".into()))?;
    let (n, r) = parse_header(header)?;
    let mut members = Vec::new();
    for line in lines {
        let elems: Vec<u32> = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad element {tok:?}")))
            })
            .collect::<Result<_>>()?;
        if elems.len() != r as usize {
            return Err(Error::Parse(format!(
                "member {line:?} has {} elements, expected r={r}",
                elems.len()
            )));
        }
        members.push(KSubset::new(n, elems)?);
    }
    let mut sorted = members.clone();
    sorted.sort();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Parse("family members must be distinct".into()));
    }
    Ok(FamilyFile { n, r, members })
}

fn parse_header(header: &str) -> Result<(u32, u32)> {
    let mut n = None;
    let mut r = None;
    for tok in header.split_whitespace() {
        if let Some(v) = tok.strip_prefix("n=") {
            n = v.parse::<u32>().ok();
        } else if let Some(v) = tok.strip_prefix("r=") {
            r = v.parse::<u32>().ok();
        }
    }
    match (n, r) {
        (Some(n), Some(r)) if r >= 1 && r <= n => Ok((n, r)),
        (Some(_), Some(_)) => Err(Error::Parse("header requires 1 <= r <= n".into())),
        _ => Err(Error::Parse(
            "family file must start with a header line `n=<int> r=<int>`".into(),
        )),
    }
}

pub fn format_family(n: u32, r: u32, members: &[KSubset]) -> String {
    let mut out = format!("n={n} r={r}\n");
    for m in members {
        let parts: Vec<String> = m.elems().iter().map(|e| e.to_string()).collect();
        out.push_str(&parts.join(" "));
        out.push('\n');
    }
    out
}
