//! Numerical evaluation of the closed-form estimates behind the stability
//! analysis: the binomial-difference lower bound and its best constant, the
//! Chernoff tail, the stability threshold p0, the star/outside union-bound
//! total, and the Turán-type double sum with its maximizer analysis. All
//! potentially under/overflowing quantities run in [`LogReal`] arithmetic.
//!
//! Every constant the theory merely asserts to exist (c, c2, c0, α, ε, ε',
//! c̃, t0) lives in [`Constants`]; the defaults are measured by this module
//! itself, deterministically, rather than guessed.

use crate::combinatorics::{binomial, binomial_f64, binomial_u64, ln_binomial};
use crate::graph::edge_density_ratios;
use crate::logreal::LogReal;
use crate::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Which logarithm `log` means in threshold formulas. The default is the
/// natural log; base 2 is provided for sensitivity analysis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogBase {
    Natural,
    Base2,
}

impl LogBase {
    pub fn log(&self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Base2 => x.log2(),
        }
    }
}

/// Uniform reporting shell: both sides of a named inequality at given
/// parameters, in log domain, with the signed margin.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub lhs: LogReal,
    pub rhs: LogReal,
    /// ln(dominant side) − ln(dominated side); positive iff satisfied
    /// strictly. The direction is fixed per bound and documented there.
    pub margin_ln: f64,
    pub satisfied: bool,
}

impl BoundReport {
    fn new(
        name: &str,
        params: &[(&str, f64)],
        lhs: LogReal,
        rhs: LogReal,
        // True when the bound claims lhs >= rhs.
        lhs_dominates: bool,
    ) -> Self {
        let satisfied = if lhs_dominates {
            !matches!(lhs.cmp_value(&rhs), std::cmp::Ordering::Less)
        } else {
            !matches!(rhs.cmp_value(&lhs), std::cmp::Ordering::Less)
        };
        let (hi, lo) = if lhs_dominates { (lhs, rhs) } else { (rhs, lhs) };
        let margin_ln = match (hi.sign, lo.sign) {
            (1, 1) => hi.ln_abs - lo.ln_abs,
            (1, 0) => f64::INFINITY,
            (0, 0) => 0.0,
            _ => f64::NAN,
        };
        BoundReport {
            name: name.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            lhs,
            rhs,
            margin_ln,
            satisfied,
        }
    }
}

// ---------------------------------------------------------------------------
// Binomial-difference lower bound
// ---------------------------------------------------------------------------

/// binom(n−r−1, r−2) − binom(n−r−1−i, r−2) as a signed integer (negative
/// only when i < 0).
pub fn binom_diff(n: i64, r: i64, i: i64) -> BigInt {
    BigInt::from(binomial(n - r - 1, r - 2)) - BigInt::from(binomial(n - r - 1 - i, r - 2))
}

/// Report for `binom_diff(n,r,i) >= c·i·n^{r−3}` at the configured c.
/// Requires i <= n and n >= 2r−4.
pub fn binom_diff_report(n: u32, r: u32, i: i64, c: f64) -> Result<BoundReport> {
    if i > n as i64 || (n as i64) < 2 * r as i64 - 4 {
        return Err(Error::Precondition(format!(
            "need i <= n and n >= 2r-4, got n={n} r={r} i={i}"
        )));
    }
    let lhs_int = binom_diff(n as i64, r as i64, i);
    let lhs = logreal_from_bigint(&lhs_int);
    let rhs = LogReal::from_f64(c * i as f64 * (n as f64).powi(r as i32 - 3));
    Ok(BoundReport::new(
        "binom-diff",
        &[("n", n as f64), ("r", r as f64), ("i", i as f64), ("c", c)],
        lhs,
        rhs,
        true,
    ))
}

fn logreal_from_bigint(x: &BigInt) -> LogReal {
    if x.is_zero() {
        return LogReal::zero();
    }
    let ln = ln_biguint(x.magnitude());
    if x.is_negative() {
        LogReal { sign: -1, ln_abs: ln }
    } else {
        LogReal::from_ln(ln)
    }
}

fn ln_biguint(x: &BigUint) -> f64 {
    // Exact via bit length for values beyond f64 range.
    if let Some(v) = x.to_f64() {
        if v.is_finite() && v > 0.0 {
            return v.ln();
        }
    }
    let bits = x.bits();
    let shifted = x >> (bits - 53);
    (shifted.to_f64().unwrap()).ln() + (bits - 53) as f64 * std::f64::consts::LN_2
}

/// An exact rational witness c = numer/denom together with where the grid
/// minimum (or maximum) was attained.
#[derive(Clone, Debug, Serialize)]
pub struct RationalWitness {
    pub numer: String,
    pub denom: String,
    pub value: f64,
    pub at_n: u32,
    pub at_i: u32,
}

fn make_witness(num: BigUint, den: BigUint, at: (u32, u32)) -> RationalWitness {
    let g = num.gcd(&den);
    let (num, den) = (&num / &g, &den / &g);
    let value = ratio_f64(&num, &den);
    RationalWitness {
        numer: num.to_string(),
        denom: den.to_string(),
        value,
        at_n: at.0,
        at_i: at.1,
    }
}

fn ratio_f64(num: &BigUint, den: &BigUint) -> f64 {
    match (num.to_f64(), den.to_f64()) {
        (Some(a), Some(b)) if b > 0.0 && a.is_finite() && b.is_finite() => a / b,
        _ => (ln_biguint(num) - ln_biguint(den)).exp(),
    }
}

/// The largest constant valid on the grid: inf over n in [n_lo, n_hi] and
/// i in [1, n] of binom_diff(n,r,i) / (i·n^{r−3}), as an exact fraction.
/// Strictly positive whenever binom(n−r−1, r−2) > 0 across the grid.
pub fn binom_diff_best_c(r: u32, n_lo: u32, n_hi: u32) -> Result<RationalWitness> {
    if n_lo > n_hi || (n_lo as i64) < 2 * r as i64 - 4 {
        return Err(Error::Precondition(format!(
            "need 2r-4 <= n_lo <= n_hi, got r={r} n_lo={n_lo} n_hi={n_hi}"
        )));
    }
    let mut best: Option<(BigUint, BigUint, (u32, u32))> = None;
    for n in n_lo..=n_hi {
        let npow = BigUint::from(n).pow(r - 3);
        for i in 1..=n {
            let diff = binom_diff(n as i64, r as i64, i as i64);
            debug_assert!(!diff.is_negative());
            let num = diff.magnitude().clone();
            let den = BigUint::from(i) * &npow;
            let smaller = match &best {
                None => true,
                // num/den < bnum/bden  <=>  num·bden < bnum·den
                Some((bnum, bden, _)) => &num * bden < bnum * &den,
            };
            if smaller {
                best = Some((num, den, (n, i)));
            }
        }
    }
    let (num, den, at) = best.expect("non-empty grid");
    Ok(make_witness(num, den, at))
}

/// Truncated split of the ground set: for 0 <= i <= n−r−1,
/// binom_diff(n,r,i) >= i·binom(n−r−i−1, r−3). Exact integer check.
pub fn vandermonde_truncation_holds(n: i64, r: i64, i: i64) -> bool {
    let lhs = binom_diff(n, r, i);
    let rhs = BigInt::from(i) * BigInt::from(binomial(n - r - i - 1, r - 3));
    lhs >= rhs
}

/// Saturation constant for large i: the exact minimum over the grid, for
/// i >= ⌈n/2⌉, of 1 − binom(n−r−1−i, r−2)/binom(n−r−1, r−2).
pub fn large_i_saturation_c2(r: u32, n_lo: u32, n_hi: u32) -> Result<RationalWitness> {
    if n_lo > n_hi {
        return Err(Error::Precondition("empty grid".into()));
    }
    let mut best: Option<(BigUint, BigUint, (u32, u32))> = None;
    for n in n_lo..=n_hi {
        let base = binomial(n as i64 - r as i64 - 1, r as i64 - 2);
        if base.is_zero() {
            return Err(Error::Precondition(format!(
                "binom(n-r-1, r-2) vanishes at n={n}; start the grid at n >= 2r-1"
            )));
        }
        for i in n.div_ceil(2)..=n {
            let top = binomial(n as i64 - r as i64 - 1 - i as i64, r as i64 - 2);
            // 1 - top/base = (base - top)/base
            let num = &base - &top;
            let den = base.clone();
            let smaller = match &best {
                None => true,
                Some((bnum, bden, _)) => &num * bden < bnum * &den,
            };
            if smaller {
                best = Some((num, den, (n, i)));
            }
        }
    }
    let (num, den, at) = best.expect("non-empty grid");
    Ok(make_witness(num, den, at))
}

// ---------------------------------------------------------------------------
// Chernoff tail and the block-tail rate
// ---------------------------------------------------------------------------

/// Upper tail of Bin(n,p): P(X > (1+δ)μ) <= exp(−δ²μ/(2+δ)), in log domain.
pub fn chernoff_tail(mu: f64, delta: f64) -> LogReal {
    LogReal::from_ln(-(delta * delta) * mu / (2.0 + delta))
}

/// The rate constant of the star-block tail event, as exact fractions.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BlockTailRate {
    /// Rate assembled the displayed way: (1/6²)/(2 + 1/6)·(1/2) = 1/156.
    pub displayed: (u64, u64),
    /// Whether that assembly reduces to exactly 1/156.
    pub displayed_is_1_156: bool,
    /// Rate recomputed from the event itself (at least 2/3 of Bern(1/2)
    /// variables equal 1, i.e. δ = 1/3): (1/3²)/(2 + 1/3)·(1/2) = 1/42.
    pub event_rate: (u64, u64),
}

pub fn block_tail_rate() -> BlockTailRate {
    // (1/36) / (13/6) / 2 = 6 / (36·13·2) = 6/936.
    let displayed = reduce(6, 936);
    // (1/9) / (7/3) / 2 = 3 / (9·7·2) = 3/126.
    let event_rate = reduce(3, 126);
    BlockTailRate {
        displayed,
        displayed_is_1_156: displayed == (1, 156),
        event_rate,
    }
}

fn reduce(a: u64, b: u64) -> (u64, u64) {
    let g = a.gcd(&b);
    (a / g, b / g)
}

// ---------------------------------------------------------------------------
// Stability threshold p0
// ---------------------------------------------------------------------------

/// Threshold probability for the stability of α(G_p(n,r,0)):
/// 3/4 at n = 2r+1, and log(n·binom(n−1,r)) / binom(n−r−1, r−1) above.
pub fn p0_threshold(n: u32, r: u32, base: LogBase) -> Result<f64> {
    if n < 2 * r + 1 {
        return Err(Error::Precondition(format!(
            "p0 is defined for n >= 2r+1, got n={n} r={r}"
        )));
    }
    if n == 2 * r + 1 {
        return Ok(0.75);
    }
    let ln_num = (n as f64).ln() + ln_binomial(n as i64 - 1, r as i64);
    let num = match base {
        LogBase::Natural => ln_num,
        LogBase::Base2 => ln_num / std::f64::consts::LN_2,
    };
    let den = binomial_f64(n as i64 - r as i64 - 1, r as i64 - 1);
    Ok(num / den)
}

// ---------------------------------------------------------------------------
// Star/outside union bound
// ---------------------------------------------------------------------------

/// One term of the union bound at fixed i.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct UnionBoundTerm {
    pub i: u32,
    /// binom(n,2)·binom(n,r)^i · e^{−(1/156)·binom_diff(n,r,i)}
    pub exact: LogReal,
    /// e^{2 ln n + i·r·ln n − (1/156)·binom_diff(n,r,i)}
    pub relaxed: LogReal,
}

#[derive(Clone, Debug, Serialize)]
pub struct UnionBoundEval {
    pub n: u32,
    pub r: u32,
    pub terms: Vec<UnionBoundTerm>,
    pub total: LogReal,
    pub relaxed_total: LogReal,
    /// i of the largest exact term (lowest i among ties).
    pub argmax_i: u32,
}

/// Probability that some reduced subfamily stays independent, summed over
/// the covered-count i = 1..n−2 with the per-i counting factors.
pub fn union_bound_eval(n: u32, r: u32) -> Result<UnionBoundEval> {
    if r < 4 {
        return Err(Error::Precondition(format!("union bound needs r >= 4, got {r}")));
    }
    if n < r + 2 {
        return Err(Error::Precondition(format!("need n >= r+2, got n={n}")));
    }
    let rate = 1.0 / 156.0;
    let ln_pairs = ln_binomial(n as i64, 2);
    let ln_choose = ln_binomial(n as i64, r as i64);
    let ln_n = (n as f64).ln();
    let mut terms = Vec::with_capacity((n - 2) as usize);
    for i in 1..=n - 2 {
        let diff = binom_diff(n as i64, r as i64, i as i64)
            .to_f64()
            .expect("difference fits f64 range");
        let exact = LogReal::from_ln(ln_pairs + i as f64 * ln_choose - rate * diff);
        let relaxed =
            LogReal::from_ln(2.0 * ln_n + i as f64 * r as f64 * ln_n - rate * diff);
        terms.push(UnionBoundTerm { i, exact, relaxed });
    }
    let total = LogReal::sum(terms.iter().map(|t| t.exact));
    let relaxed_total = LogReal::sum(terms.iter().map(|t| t.relaxed));
    let argmax_i = terms
        .iter()
        .max_by(|a, b| {
            a.exact
                .cmp_value(&b.exact)
                .then(b.i.cmp(&a.i)) // strict improvement keeps lowest i
        })
        .map(|t| t.i)
        .unwrap_or(1);
    Ok(UnionBoundEval {
        n,
        r,
        terms,
        total,
        relaxed_total,
        argmax_i,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct UnionBoundScanRow {
    pub n: u32,
    pub total: LogReal,
    pub relaxed_total: LogReal,
    pub argmax_i: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct UnionBoundScan {
    pub r: u32,
    pub rows: Vec<UnionBoundScanRow>,
    /// Least grid n from which the exact total stays < 1.
    pub crossing_below_one: Option<u32>,
    /// Least grid n from which the exact total stays < 10⁻³.
    pub crossing_below_1e3: Option<u32>,
    /// Whether the exact total is non-increasing from `crossing_below_1e3` on.
    pub nonincreasing_after_crossing: bool,
}

/// Default upper end of the scan grid: far enough that the r = 4 total has
/// crossed below 10⁻³ (the counting factor binom(n,r)^i keeps the total
/// enormous until n is in the five-digit range).
pub const DEFAULT_UNION_SCAN_MAX: u32 = 16384;

/// Geometric grid with ~1.09 ratio from max(8, 2r+2) up to and including
/// `n_max`.
pub fn default_scan_grid(r: u32, n_max: u32) -> Vec<u32> {
    let start = (2 * r + 2).max(8);
    let mut grid = Vec::new();
    let mut x = start as f64;
    while (x as u32) < n_max {
        let n = x as u32;
        if grid.last() != Some(&n) {
            grid.push(n);
        }
        x *= 1.09;
    }
    grid.push(n_max);
    grid
}

pub fn union_bound_scan(r: u32, grid: &[u32]) -> Result<UnionBoundScan> {
    let mut rows = Vec::with_capacity(grid.len());
    for &n in grid {
        let eval = union_bound_eval(n, r)?;
        rows.push(UnionBoundScanRow {
            n,
            total: eval.total,
            relaxed_total: eval.relaxed_total,
            argmax_i: eval.argmax_i,
        });
    }
    let crossing = |threshold_ln: f64| -> Option<u32> {
        // Least grid point from which every later total stays below.
        let mut candidate = None;
        for row in &rows {
            if row.total.below_ln(threshold_ln) {
                if candidate.is_none() {
                    candidate = Some(row.n);
                }
            } else {
                candidate = None;
            }
        }
        candidate
    };
    let crossing_below_one = crossing(0.0);
    let crossing_below_1e3 = crossing((1e-3f64).ln());
    let nonincreasing_after_crossing = match crossing_below_1e3 {
        None => false,
        Some(n0) => rows
            .windows(2)
            .filter(|w| w[0].n >= n0)
            .all(|w| !matches!(w[0].total.cmp_value(&w[1].total), std::cmp::Ordering::Less)),
    };
    Ok(UnionBoundScan {
        r,
        rows,
        crossing_below_one,
        crossing_below_1e3,
        nonincreasing_after_crossing,
    })
}

// ---------------------------------------------------------------------------
// Star independence value
// ---------------------------------------------------------------------------

/// Predicted independence number binom(n−s−1, r−s−1), attained by stars for
/// large n. `in_regime` is false when r < 2s+1 (value still returned).
pub fn frankl_furedi_alpha(n: u32, r: u32, s: u32) -> (BigUint, bool) {
    let value = binomial(n as i64 - s as i64 - 1, r as i64 - s as i64 - 1);
    (value, r >= 2 * s + 1)
}

// ---------------------------------------------------------------------------
// Constants configuration
// ---------------------------------------------------------------------------

/// The tunable constants of the Turán-type chain, with lab-measured
/// defaults. Serializable so runs can pin or override them from a file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Constants {
    pub r: u32,
    /// Binomial-difference slope: binom_diff(n,r,i) >= c·i·n^{r−3} on the
    /// derivation grid. Default: exact grid minimum, rounded down.
    pub c: f64,
    /// Large-i saturation: binom(n−r−1−i, r−2) <= (1−c2)·binom(n−r−1, r−2)
    /// for i >= n/2. Default: exact grid minimum, rounded down.
    pub c2: f64,
    /// Edge-density lower constant: e(L) >= c0·l²/m on ground sets of size
    /// m. Default: low edge of the measured ratio band.
    pub c0: f64,
    /// Counting exponent: the number of candidate families with parameters
    /// (i, x) is at most 2^{α·x·ln n}. Default (2r−1)/ln 2, from
    /// binom(N,x) <= N^x with N <= n^{r−2} resp. n^r plus one factor n^x of
    /// headroom for binom(n,2).
    pub alpha: f64,
    /// Outside-count cap: x < ε·n^{r−2}. Default c·ε′ (so that the i-range
    /// implied by x > c·i·n^{r−3} is exactly i < ε′n).
    pub eps: f64,
    /// Covered-count cap: i < ε′·n with ε′ = (c/2)^{1/(r−3)}.
    pub eps_prime: f64,
    /// Covered-count floor: i > c̃·n^{(r−3)/(r−1)}. Default (c·r!)^{1/(r−1)}
    /// from c·i·n^{r−3} < x <= binom(i,r) <= i^r/r!.
    pub c_tilde: f64,
    /// Star-dominance threshold t0 ∈ (1/2, 1). Default: midpoint between
    /// (1 − ε·(r−2)!)^{1/(r−2)} and 1.
    pub t0: f64,
    pub log_base: LogBase,
}

/// Grids the default constants are measured on, fixed so the derivation is
/// reproducible: best-c on n ∈ [max(8, 2r−1+1), 200], saturation on the
/// same, edge band per r below.
pub fn derivation_band_grid(r: u32) -> (Vec<u32>, usize) {
    match r {
        3 => ((20..=60).step_by(8).collect(), 3),
        4 => (vec![16, 20, 24, 28, 32], 3),
        _ => (vec![12, 14, 16], 2),
    }
}

pub const BAND_SEED: u64 = crate::DEFAULT_SEED;
pub const BAND_GROWTH: f64 = 1.2;

/// Measured ratio band [lo, hi] of e(L)·m/l² for random L in G(m,r,1).
pub fn measured_edge_band(r: u32) -> Result<(f64, f64)> {
    let (grid, samples) = derivation_band_grid(r);
    let pts = edge_density_ratios(r, &grid, BAND_GROWTH, samples, BAND_SEED)?;
    let lo = pts.iter().map(|p| p.ratio).fold(f64::INFINITY, f64::min);
    let hi = pts.iter().map(|p| p.ratio).fold(0.0, f64::max);
    Ok((lo, hi))
}

impl Constants {
    /// Measures every default from scratch. Deterministic.
    pub fn derive(r: u32) -> Result<Constants> {
        if r < 4 {
            return Err(Error::Precondition(format!(
                "the chain constants require r >= 4, got {r}"
            )));
        }
        let n_lo = (2 * r).max(8);
        let c_witness = binom_diff_best_c(r, n_lo, 200)?;
        // Round down so the witness inequality stays strict on the grid.
        let c = c_witness.value * (1.0 - 1e-12);
        let c2 = large_i_saturation_c2(r, n_lo, 200)?.value * (1.0 - 1e-12);
        let (band_lo, _) = measured_edge_band(r)?;
        let c0 = band_lo;
        let alpha = (2.0 * r as f64 - 1.0) / std::f64::consts::LN_2;
        let eps_prime = (c / 2.0).powf(1.0 / (r as f64 - 3.0));
        let eps = c * eps_prime;
        let c_tilde = (c * factorial(r) as f64).powf(1.0 / (r as f64 - 1.0));
        let t0_floor = (1.0 - eps * factorial(r - 2) as f64)
            .max(0.0)
            .powf(1.0 / (r as f64 - 2.0))
            .max(0.5);
        let t0 = (t0_floor + 1.0) / 2.0;
        Ok(Constants {
            r,
            c,
            c2,
            c0,
            alpha,
            eps,
            eps_prime,
            c_tilde,
            t0,
            log_base: LogBase::Natural,
        })
    }

    pub fn from_json(text: &str) -> Result<Constants> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("constants file: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("constants serialize")
    }
}

fn factorial(k: u32) -> u64 {
    (1..=k as u64).product::<u64>().max(1)
}

// ---------------------------------------------------------------------------
// Turán-type chain
// ---------------------------------------------------------------------------

/// Per-i row of the double sum.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TuranRow {
    pub i: u64,
    pub x_min: u64,
    pub x_max: u64,
    /// x_min > 2·binom(i−2, r−2), checked exactly at the region edge (the
    /// left edge is the minimum over the row).
    pub edge_ok: bool,
    /// Σ_x 2^{α·x·ln n − c0·x²/i} over the row.
    pub contribution: LogReal,
}

#[derive(Clone, Debug, Serialize)]
pub struct TuranReport {
    pub n: u32,
    pub r: u32,
    pub i_lo: u64,
    pub i_hi: u64,
    /// binom(n−2, r−2) − binom(⌈t0·n⌉−2, r−2): the cap on the outside count
    /// forced by the star-dominance condition.
    pub x_admissible: String,
    /// x_admissible <= ε·n^{r−2} at this n (the choose-t0 claim).
    pub admissible_within_eps: bool,
    /// The unconstrained maximizer x* = α·i·ln n/(2c0) of the summand lies
    /// below the region's left edge c·i·n^{r−3} (i-independent criterion),
    /// so the row maximum sits at the left edge.
    pub x_star_below_left_edge: bool,
    /// Every row satisfied the x > 2·binom(i−2, r−2) check.
    pub region_edge_ok: bool,
    pub rows: Vec<TuranRow>,
    pub double_sum: LogReal,
}

const TURAN_TERM_CAP: u64 = 50_000_000;

/// Evaluates the Turán-type double sum and the chain's side conditions at
/// one n. `t0` overrides the configured default when finite.
pub fn turan_chain(n: u32, t0: f64, k: &Constants) -> Result<TuranReport> {
    let r = k.r;
    if r < 4 {
        return Err(Error::Precondition(format!("chain needs r >= 4, got r={r}")));
    }
    if !(t0 > 0.5 && t0 < 1.0) {
        return Err(Error::Precondition(format!("t0 must lie in (1/2, 1), got {t0}")));
    }
    let expected_eps_prime = (k.c / 2.0).powf(1.0 / (r as f64 - 3.0));
    if (k.eps_prime - expected_eps_prime).abs() > 1e-9 * expected_eps_prime.abs().max(1e-300) {
        return Err(Error::Config(format!(
            "eps_prime={} inconsistent with (c/2)^(1/(r-3))={}",
            k.eps_prime, expected_eps_prime
        )));
    }

    let nf = n as f64;
    let ln_n = nf.ln();
    let i_lo_f = k.c_tilde * nf.powf((r as f64 - 3.0) / (r as f64 - 1.0));
    let i_hi_f = k.eps_prime * nf;
    let i_lo = i_lo_f.floor() as u64 + 1; // strict >
    let i_hi = if i_hi_f.ceil() == i_hi_f {
        (i_hi_f as u64).saturating_sub(1)
    } else {
        i_hi_f.floor() as u64
    };

    let x_admissible_int = {
        let t0n = (t0 * nf).ceil() as i64;
        BigInt::from(binomial(n as i64 - 2, r as i64 - 2))
            - BigInt::from(binomial(t0n - 2, r as i64 - 2))
    };
    let eps_cap = k.eps * nf.powi(r as i32 - 2);
    let admissible_within_eps = x_admissible_int
        .to_f64()
        .map(|v| v <= eps_cap)
        .unwrap_or(false);

    // x* = α·ln n/(2c0)·i vs left edge c·n^{r−3}·i: i cancels.
    let x_star_below_left_edge = k.alpha * ln_n / (2.0 * k.c0) < k.c * nf.powi(r as i32 - 3);

    let ln2 = std::f64::consts::LN_2;
    let mut rows = Vec::new();
    let mut region_edge_ok = true;
    let mut budget: u64 = 0;
    for i in i_lo..=i_hi {
        let x_lo_f = k.c * i as f64 * nf.powi(r as i32 - 3);
        let x_min = x_lo_f.floor() as u64 + 1;
        let cap_f = eps_cap.min(binomial_u64(i, r as u64) as f64);
        let x_max = if cap_f <= x_min as f64 {
            continue;
        } else if cap_f.ceil() == cap_f {
            cap_f as u64 - 1
        } else {
            cap_f.floor() as u64
        };
        if x_max < x_min {
            continue;
        }
        budget += x_max - x_min + 1;
        if budget > TURAN_TERM_CAP {
            return Err(Error::Capacity(format!(
                "double sum exceeds {TURAN_TERM_CAP} terms at n={n}"
            )));
        }
        let edge_ok = {
            let bound = BigUint::from(2u32) * binomial(i as i64 - 2, r as i64 - 2);
            BigUint::from(x_min) > bound
        };
        region_edge_ok &= edge_ok;
        let contribution = LogReal::sum((x_min..=x_max).map(|x| {
            let xf = x as f64;
            let exponent2 = k.alpha * xf * ln_n - k.c0 * xf * xf / i as f64;
            LogReal::from_ln(exponent2 * ln2)
        }));
        rows.push(TuranRow {
            i,
            x_min,
            x_max,
            edge_ok,
            contribution,
        });
    }
    let double_sum = LogReal::sum(rows.iter().map(|r| r.contribution));
    Ok(TuranReport {
        n,
        r,
        i_lo,
        i_hi,
        x_admissible: x_admissible_int.to_string(),
        admissible_within_eps,
        x_star_below_left_edge,
        region_edge_ok,
        rows,
        double_sum,
    })
}

/// Least n (scanning doublings then the gap) where the summand maximizer
/// x* falls below the region's left edge and stays there.
pub fn turan_maximizer_n0(k: &Constants) -> Option<u32> {
    let crit = |n: u32| {
        let nf = n as f64;
        k.alpha * nf.ln() / (2.0 * k.c0) < k.c * nf.powi(k.r as i32 - 3)
    };
    // x*/left-edge ratio is decreasing in n beyond e; find the first hit.
    let mut n = 3u32;
    while n < 1 << 30 {
        if crit(n) {
            let mut lo = n / 2;
            // Walk back to the exact first n.
            while lo >= 3 && crit(lo) {
                lo -= 1;
            }
            return Some(lo + 1);
        }
        n *= 2;
    }
    None
}

#[derive(Clone, Debug, Serialize)]
pub struct TuranScanRow {
    pub n: u32,
    pub double_sum: LogReal,
    pub all_checks: bool,
    /// Number of non-empty i-rows; 0 means the (i,x) region is empty at
    /// this n (the sum is then trivially zero).
    pub region_rows: usize,
}

/// Scans the double sum along a grid; reports the least grid n from which
/// it stays below 1.
pub fn turan_scan(grid: &[u32], t0: f64, k: &Constants) -> Result<(Vec<TuranScanRow>, Option<u32>)> {
    let mut rows = Vec::new();
    for &n in grid {
        let rep = turan_chain(n, t0, k)?;
        rows.push(TuranScanRow {
            n,
            double_sum: rep.double_sum,
            all_checks: rep.region_edge_ok && rep.x_star_below_left_edge,
            region_rows: rep.rows.len(),
        });
    }
    let mut crossing = None;
    for row in &rows {
        if row.double_sum.below_ln(0.0) {
            if crossing.is_none() {
                crossing = Some(row.n);
            }
        } else {
            crossing = None;
        }
    }
    Ok((rows, crossing))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binom_diff_example() {
        // n=10, r=4, i=3: binom(5,2) − binom(2,2) = 10 − 1 = 9.
        assert_eq!(binom_diff(10, 4, 3), BigInt::from(9));
        assert_eq!(binom_diff(10, 4, 0), BigInt::from(0));
    }

    #[test]
    fn binom_diff_monotone_in_i() {
        for r in 4..=6i64 {
            for n in (2 * r - 4)..=60 {
                let mut prev = BigInt::from(-1);
                for i in 0..=n {
                    let d = binom_diff(n, r, i);
                    assert!(d >= prev, "n={n} r={r} i={i}");
                    prev = d;
                }
            }
        }
    }

    #[test]
    fn binom_diff_report_sides() {
        let rep = binom_diff_report(10, 4, 3, 0.01).unwrap();
        assert!(rep.satisfied); // 9 >= 0.01·3·10
        assert!(rep.margin_ln > 0.0);
        let rep = binom_diff_report(10, 4, 3, 1.0).unwrap();
        assert!(!rep.satisfied); // 9 < 1·3·10
        assert!(binom_diff_report(10, 4, 11, 0.01).is_err());
    }

    #[test]
    fn best_c_positive_and_exact() {
        let w = binom_diff_best_c(4, 8, 40).unwrap();
        assert!(w.value > 0.0);
        // The witness really is the minimum: every grid cell dominates it.
        let num: BigUint = w.numer.parse().unwrap();
        let den: BigUint = w.denom.parse().unwrap();
        for n in 8u32..=40 {
            let npow = BigUint::from(n);
            for i in 1..=n {
                let d = binom_diff(n as i64, 4, i as i64).magnitude().clone();
                let cell_den = BigUint::from(i) * &npow;
                assert!(d * &den >= &num * cell_den, "n={n} i={i}");
            }
        }
    }

    #[test]
    fn vandermonde_truncation_in_domain() {
        for r in 4..=6i64 {
            for n in (2 * r)..=60 {
                for i in 0..n / 2 {
                    assert!(vandermonde_truncation_holds(n, r, i), "n={n} r={r} i={i}");
                }
            }
        }
    }

    #[test]
    fn saturation_constant_positive() {
        let w = large_i_saturation_c2(4, 8, 60).unwrap();
        assert!(w.value > 0.0);
        assert!(w.value <= 1.0);
        // The bound binom(n−r−1−i, r−2) <= (1−c2)·binom(n−r−1, r−2) holds
        // with the measured c2 on the grid.
        let c2 = w.value;
        for n in 8i64..=60 {
            for i in (n + 1) / 2..=n {
                let top = binomial_f64(n - 5 - i, 2);
                let base = binomial_f64(n - 5, 2);
                assert!(top <= (1.0 - c2) * base + 1e-9, "n={n} i={i}");
            }
        }
    }

    #[test]
    fn chernoff_examples() {
        // mu=10, delta=1: e^{-10/3}. Reference value from 50-digit
        // arithmetic: 0.035673993347252418559...
        let t = chernoff_tail(10.0, 1.0);
        assert!((t.ln().unwrap() - (-10.0 / 3.0)).abs() < 1e-15);
        assert!((t.to_f64() - 0.03567399334725242).abs() < 1e-15);
        // delta -> 0 gives 1.
        let one = chernoff_tail(10.0, 0.0);
        assert_eq!(one.ln().unwrap(), 0.0);
    }

    #[test]
    fn chernoff_monotone_in_mu_and_delta() {
        let mut prev = f64::INFINITY;
        for mu in [1.0, 5.0, 25.0, 125.0] {
            let v = chernoff_tail(mu, 0.3).ln().unwrap();
            assert!(v < prev);
            prev = v;
        }
        let mut prev = f64::INFINITY;
        for delta in [0.05, 0.1, 0.2, 0.4, 0.8] {
            let v = chernoff_tail(100.0, delta).ln().unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn block_tail_rate_exact() {
        let r = block_tail_rate();
        assert_eq!(r.displayed, (1, 156));
        assert!(r.displayed_is_1_156);
        assert_eq!(r.event_rate, (1, 42));
    }

    #[test]
    fn p0_values() {
        for r in 2..=8u32 {
            assert_eq!(p0_threshold(2 * r + 1, r, LogBase::Natural).unwrap(), 0.75);
        }
        // n=20, r=3: ln(20·binom(19,3)) / binom(16,2) = ln(19380)/120.
        let v = p0_threshold(20, 3, LogBase::Natural).unwrap();
        assert!((v - (19380f64).ln() / 120.0).abs() < 1e-12);
        assert!((v - 0.0822).abs() < 5e-4);
        assert!(p0_threshold(6, 3, LogBase::Natural).is_err());
        // Base-2 variant scales by 1/ln 2.
        let v2 = p0_threshold(20, 3, LogBase::Base2).unwrap();
        assert!((v2 - v / std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn p0_monotone_decreasing_in_n() {
        for r in 2..=6u32 {
            let mut prev = f64::INFINITY;
            for n in (2 * r + 2)..=100 {
                let v = p0_threshold(n, r, LogBase::Natural).unwrap();
                assert!(v < prev, "n={n} r={r}");
                prev = v;
            }
        }
    }

    #[test]
    fn union_bound_zero_difference_term() {
        // At n = r+2 the difference binom(n−r−1, r−2) − … is 0 for every i
        // (both binomials vanish), so each term keeps its counting factor
        // and is >= 1.
        let eval = union_bound_eval(6, 4).unwrap();
        for t in &eval.terms {
            assert!(t.exact.ln().unwrap() >= 0.0, "i={}", t.i);
        }
    }

    #[test]
    fn union_bound_hockey_stick_routes_agree() {
        // Exponent via the direct difference vs via the summed per-block
        // bounds, both in f64: relative agreement to 1e-9.
        for &(n, r) in &[(20i64, 4i64), (40, 5), (80, 6), (200, 4)] {
            for i in 1..=(n - 2) {
                let direct = binom_diff(n, r, i).to_f64().unwrap();
                let mut summed = 0.0;
                for j in 1..=i {
                    summed += binomial_f64(n - r - j - 1, r - 3);
                }
                let scale = direct.abs().max(1.0);
                assert!(
                    (direct - summed).abs() <= 1e-9 * scale,
                    "n={n} r={r} i={i}: {direct} vs {summed}"
                );
            }
        }
    }

    #[test]
    fn union_bound_log_domain_matches_naive_small_n() {
        // Direct f64 product/sum is still finite at n <= 30.
        for n in [10u32, 20, 30] {
            let eval = union_bound_eval(n, 4).unwrap();
            let mut naive = 0.0f64;
            for i in 1..=n - 2 {
                let diff = binom_diff(n as i64, 4, i as i64).to_f64().unwrap();
                naive += binomial_f64(n as i64, 2)
                    * binomial_f64(n as i64, 4).powi(i as i32)
                    * (-diff / 156.0).exp();
            }
            let got = eval.total.ln().unwrap();
            assert!(
                (got - naive.ln()).abs() < 1e-9,
                "n={n}: {got} vs {}",
                naive.ln()
            );
        }
    }

    #[test]
    fn union_bound_argmax_at_boundary_for_large_n() {
        // Far beyond the crossing the exact term is maximal at i = n−2;
        // well before it, the counting factor dominates and the maximum is
        // also at the top boundary. Either way the argmax is a boundary.
        for n in [100u32, 1000, 12000] {
            let eval = union_bound_eval(n, 4).unwrap();
            assert!(
                eval.argmax_i == 1 || eval.argmax_i == n - 2,
                "n={n}: argmax {}",
                eval.argmax_i
            );
        }
    }

    #[test]
    fn scan_grid_shape() {
        let grid = default_scan_grid(4, 2000);
        assert_eq!(*grid.first().unwrap(), 10);
        assert_eq!(*grid.last().unwrap(), 2000);
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn constants_roundtrip_json() {
        let k = Constants::derive(4).unwrap();
        let text = k.to_json();
        let back = Constants::from_json(&text).unwrap();
        assert_eq!(k.c, back.c);
        assert_eq!(k.alpha, back.alpha);
        assert_eq!(k.log_base, back.log_base);
    }

    #[test]
    fn eps_prime_consistency_enforced() {
        let mut k = Constants::derive(4).unwrap();
        k.eps_prime *= 1.5;
        assert!(matches!(
            turan_chain(400, k.t0, &k),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn frankl_furedi_values() {
        let (v, ok) = frankl_furedi_alpha(5, 2, 0);
        assert_eq!(v, BigUint::from(4u32));
        assert!(ok);
        let (v, ok) = frankl_furedi_alpha(10, 4, 1);
        assert_eq!(v, BigUint::from(28u32));
        assert!(ok);
        let (v, ok) = frankl_furedi_alpha(8, 3, 1);
        assert_eq!(v, BigUint::from(6u32));
        assert!(ok);
        let (_, ok) = frankl_furedi_alpha(10, 2, 1);
        assert!(!ok); // r < 2s+1
    }

    #[test]
    fn ln_biguint_handles_huge_values() {
        let x = BigUint::from(2u32).pow(4000);
        let ln = super::ln_biguint(&x);
        assert!((ln - 4000.0 * std::f64::consts::LN_2).abs() < 1e-6);
    }
}
