//! The verification suite: one named check per exit criterion, with the
//! regression values pinned from the first oracle runs. `cargo test` (the
//! `acceptance` integration target) and `jlab verify all` both run exactly
//! this list, so CI and a human exercise the same code.

use crate::bounds::{
    binom_diff_best_c, chernoff_tail, default_scan_grid, union_bound_scan,
    DEFAULT_UNION_SCAN_MAX,
};
use crate::combinatorics::binomial;
use crate::family::{
    analyze_family, check_block_invariants, random_admissible_family, star_blocks,
};
use crate::graph::{edge_density_ratios, DenseGraph, JohnsonParams};
use crate::montecarlo::{sweep, McConfig};
use crate::solver::{self, is_independent, max_independent_set, Budget};
use crate::stream::{substream, Stream};
use num_bigint::BigUint;
use num_traits::Zero;
use std::time::{Duration, Instant};

/// Regression values recorded from the first oracle runs (fixed seeds, the
/// deterministic mix64-v1 stream). Reruns must reproduce them.
pub mod pinned {
    /// Exact α(G(n,3,1)) for n = 8..=12 from the branch-and-bound solver,
    /// confirmed at n = 8 by the independent enumeration oracle. The star
    /// value n−2 is attained only at n ∈ {10, 11}: disjoint 4-block
    /// families (all triples inside disjoint 4-sets, pairwise intersections
    /// 0 or 2) reach 4·⌊n/4⌋ and win at n ∈ {8, 9, 12}.
    pub const ALPHA_G_N_3_1: [(u32, usize); 5] = [(8, 8), (9, 8), (10, 8), (11, 9), (12, 12)];

    /// Exact witness for the binomial-difference slope at r = 4 over
    /// n ∈ [8, 200], i ∈ [1, n]: min of diff/(i·n) = 3/64, attained at
    /// n = i = 8.
    pub const BEST_C_R4: (&str, &str) = ("3", "64");
    /// Same at r = 5 over n ∈ [10, 200]: 1/250 at n = i = 10.
    pub const BEST_C_R5: (&str, &str) = ("1", "250");

    /// Least grid point of the default scan (max 16384) from which the
    /// r = 4 union-bound total stays below 10⁻³. The total peaks near
    /// n ≈ 5400 (ln ≈ 75147) before collapsing; there is no crossing at
    /// n ≤ 2000.
    pub const UNION_CROSSING_R4: u32 = 10753;

    /// Edge-density ratio band for G(n,3,1), n = 20..=60, one random L of
    /// size ⌈1.2·n⌉ per n, default seed: observed [3.0178, 4.4417], pinned
    /// with a hair of margin. Half-width 19% of center.
    pub const EDGE_BAND_R3: (f64, f64) = (3.017, 4.442);

    /// Seed of the Chernoff sampling check (ASCII "cher").
    pub const CHERNOFF_SEED: u64 = 0x6368_6572;
}

/// Outcome of one check.
#[derive(Clone, Debug)]
pub struct CheckResult {
    pub id: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

type CheckFn = fn() -> Result<String, String>;

/// The full list, in criterion order.
pub fn checks() -> Vec<(&'static str, &'static str, CheckFn)> {
    vec![
        ("1", "exact-alpha-values", c1_exact_alpha as CheckFn),
        ("2", "identity-suites", c2_identities),
        ("3", "binom-diff-witness", c3_best_c),
        ("4", "star-block-soundness", c4_blocks),
        ("5", "union-bound-crossing", c5_union_bound),
        ("6", "chernoff-dominance", c6_chernoff),
        ("7", "edge-density-band", c7_edge_band),
        ("8", "mc-coupling-golden", c8_mc_golden),
        ("9", "solver-oracle-equivalence", c9_solver_oracle),
    ]
}

/// Runs every check, catching panics so one failure cannot hide the rest.
pub fn run_all() -> Vec<CheckResult> {
    checks()
        .into_iter()
        .map(|(id, name, f)| {
            let start = Instant::now();
            let outcome = std::panic::catch_unwind(f);
            let elapsed = start.elapsed();
            let (passed, detail) = match outcome {
                Ok(Ok(detail)) => (true, detail),
                Ok(Err(detail)) => (false, detail),
                Err(payload) => {
                    let msg = payload
                        .downcast_ref::<String>()
                        .cloned()
                        .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                        .unwrap_or_else(|| "panicked".to_string());
                    (false, format!("panicked: {msg}"))
                }
            };
            CheckResult {
                id,
                name,
                passed,
                detail,
                elapsed,
            }
        })
        .collect()
}

pub fn format_result(r: &CheckResult) -> String {
    format!(
        "{}  {:>2} {:<26} [{:>7.2?}]  {}",
        if r.passed { "PASS" } else { "FAIL" },
        r.id,
        r.name,
        r.elapsed,
        r.detail
    )
}

// ---------------------------------------------------------------------------

fn c1_exact_alpha() -> Result<String, String> {
    let budget = Budget::default();
    let deadline = Duration::from_secs(60);

    // α(G(5,2,0)) = 4 = binom(4,1).
    let petersen = DenseGraph::build_full(
        JohnsonParams::new(5, 2, 0).map_err(|e| e.to_string())?,
        20_000,
    )
    .map_err(|e| e.to_string())?;
    let res = max_independent_set(&petersen, budget);
    if !(res.optimal && res.alpha == 4 && res.elapsed < deadline) {
        return Err(format!("Petersen: alpha {} optimal {}", res.alpha, res.optimal));
    }
    if !is_independent(&petersen, &res.witness) {
        return Err("Petersen witness not independent".into());
    }

    // α(G(n,3,1)) for n = 8..=12 against the pinned oracle values, with the
    // formula value n−2 compared alongside (deviations reported, not
    // forced).
    let mut deviations = Vec::new();
    for &(n, want) in &pinned::ALPHA_G_N_3_1 {
        let params = JohnsonParams::new(n, 3, 1).map_err(|e| e.to_string())?;
        let g = DenseGraph::build_full(params, 20_000).map_err(|e| e.to_string())?;
        let res = max_independent_set(&g, budget);
        if !res.optimal {
            return Err(format!("n={n}: solver exhausted its budget"));
        }
        if res.elapsed >= deadline {
            return Err(format!("n={n}: took {:?}", res.elapsed));
        }
        if res.alpha != want {
            return Err(format!("n={n}: alpha {} but pinned {want}", res.alpha));
        }
        if !is_independent(&g, &res.witness) || res.witness.len() != res.alpha {
            return Err(format!("n={n}: bad witness"));
        }
        if n == 8 {
            // Independent confirmation by the simple enumeration oracle.
            let masks: Vec<u64> = (0..g.vertex_count())
                .map(|u| g.neighbors(u).fold(0u64, |m, w| m | (1 << w)))
                .collect();
            let confirmed =
                solver::oracle::alpha_by_enumeration(&masks).map_err(|e| e.to_string())?;
            if confirmed as usize != want {
                return Err(format!("n=8: enumeration oracle says {confirmed}"));
            }
        }
        let formula = (n - 2) as usize;
        if res.alpha != formula {
            deviations.push(format!("n={n}: alpha={} vs star {}", res.alpha, formula));
        }
    }
    Ok(format!(
        "Petersen alpha=4; G(n,3,1) alphas match pins; star-formula deviations (expected, 4-block families): {}",
        deviations.join(", ")
    ))
}

fn c2_identities() -> Result<String, String> {
    let start = Instant::now();
    let mut cases = 0u64;
    for r in 4..=7i64 {
        for n in r..=40 {
            // Vandermonde split on its valid domain 0 <= i <= n−r−1 (for
            // larger i the zero convention empties the right side).
            for i in 0..=(n - r - 1).max(0) {
                let lhs = binomial(n - r - 1, r - 2);
                let mut rhs = BigUint::zero();
                for j in 0..=(r - 2) {
                    rhs += binomial(i, j) * binomial(n - r - 1 - i, r - 2 - j);
                }
                if lhs != rhs {
                    return Err(format!("vandermonde r={r} n={n} i={i}"));
                }
                cases += 1;
            }
            // Hockey stick over the full 0 <= i <= n.
            for i in 0..=n {
                let mut sum = BigUint::zero();
                for j in 1..=i {
                    sum += binomial(n - r - j - 1, r - 3);
                }
                let want = binomial(n - r - 1, r - 2) - binomial(n - r - 1 - i, r - 2);
                if sum != want {
                    return Err(format!("hockey-stick r={r} n={n} i={i}"));
                }
                cases += 1;
            }
        }
    }
    if start.elapsed() > Duration::from_secs(10) {
        return Err(format!("identity suites took {:?}", start.elapsed()));
    }
    Ok(format!("{cases} identity instances hold exactly"))
}

fn c3_best_c() -> Result<String, String> {
    let w4 = binom_diff_best_c(4, 8, 200).map_err(|e| e.to_string())?;
    if (w4.numer.as_str(), w4.denom.as_str())
        != (pinned::BEST_C_R4.0, pinned::BEST_C_R4.1)
    {
        return Err(format!("r=4 witness {}/{} differs from pin", w4.numer, w4.denom));
    }
    if w4.value <= 0.0 {
        return Err("r=4 witness not positive".into());
    }
    let w5 = binom_diff_best_c(5, 10, 200).map_err(|e| e.to_string())?;
    if (w5.numer.as_str(), w5.denom.as_str())
        != (pinned::BEST_C_R5.0, pinned::BEST_C_R5.1)
    {
        return Err(format!("r=5 witness {}/{} differs from pin", w5.numer, w5.denom));
    }
    if w5.value <= 0.0 {
        return Err("r=5 witness not positive".into());
    }
    Ok(format!(
        "c(4) = {}/{} at (n={}, i={}); c(5) = {}/{} at (n={}, i={})",
        w4.numer, w4.denom, w4.at_n, w4.at_i, w5.numer, w5.denom, w5.at_n, w5.at_i
    ))
}

fn c4_blocks() -> Result<String, String> {
    let mut total = 0u32;
    for &(n, r) in &[(12u32, 4u32), (14, 4), (14, 5)] {
        for instance in 0..100u64 {
            let seed = substream(crate::DEFAULT_SEED, (n as u64) << 40 | (r as u64) << 32 | instance);
            let mut st = Stream::new(seed);
            let x = 1 + st.next_below(8) as usize;
            let fam = random_admissible_family(n, r, x, st.next_u64())
                .map_err(|e| e.to_string())?;
            let stats = analyze_family(n, r, &fam).map_err(|e| e.to_string())?;
            if stats.best_center != (n - 1, n) {
                return Err(format!("(n={n},r={r}) #{instance}: center drifted"));
            }
            let blocks = star_blocks(&stats).map_err(|e| e.to_string())?;
            check_block_invariants(&stats, &blocks)
                .map_err(|e| format!("(n={n},r={r}) #{instance}: {e}"))?;
            total += 1;
        }
    }
    Ok(format!("{total} randomized instances, all five block invariants hold"))
}

fn c5_union_bound() -> Result<String, String> {
    let grid = default_scan_grid(4, DEFAULT_UNION_SCAN_MAX);
    let scan = union_bound_scan(4, &grid).map_err(|e| e.to_string())?;
    let crossing = scan
        .crossing_below_1e3
        .ok_or("no crossing below 1e-3 on the default grid")?;
    if crossing != pinned::UNION_CROSSING_R4 {
        return Err(format!(
            "crossing {} differs from pinned {}",
            crossing,
            pinned::UNION_CROSSING_R4
        ));
    }
    for row in scan.rows.iter().filter(|r| r.n >= crossing) {
        if !row.total.below_ln((1e-3f64).ln()) {
            return Err(format!("total at n={} back above 1e-3", row.n));
        }
    }
    if !scan.nonincreasing_after_crossing {
        return Err("total not non-increasing beyond the crossing".into());
    }
    // The counting factor keeps the total enormous through n = 2000: the
    // crossing genuinely lies beyond that prefix of the grid.
    let prefix: Vec<u32> = grid.iter().copied().filter(|&n| n <= 2000).collect();
    let small = union_bound_scan(4, &prefix).map_err(|e| e.to_string())?;
    if small.crossing_below_one.is_some() {
        return Err("unexpected crossing within n <= 2000".into());
    }
    Ok(format!(
        "crossing n* = {crossing} (grid max {DEFAULT_UNION_SCAN_MAX}); total < 1e-3 and non-increasing beyond; no crossing at n <= 2000"
    ))
}

fn c6_chernoff() -> Result<String, String> {
    const SAMPLES: u32 = 100_000;
    const N: u32 = 1000;
    let mu = 500.0;
    let mut st = Stream::new(pinned::CHERNOFF_SEED);
    let mut counts = [0u32; 3];
    let thresholds = [525u32, 550, 600]; // (1+δ)·μ for δ = 0.05, 0.1, 0.2
    for _ in 0..SAMPLES {
        let mut x = 0u32;
        for w in 0..16 {
            let word = st.next_u64();
            let bits = if w == 15 { word & ((1u64 << 40) - 1) } else { word };
            x += bits.count_ones();
        }
        debug_assert!(x <= N);
        for (slot, &t) in counts.iter_mut().zip(&thresholds) {
            if x > t {
                *slot += 1;
            }
        }
    }
    let mut parts = Vec::new();
    for (k, &delta) in [0.05f64, 0.1, 0.2].iter().enumerate() {
        let empirical = counts[k] as f64 / SAMPLES as f64;
        let bound = chernoff_tail(mu, delta).to_f64();
        if empirical > bound {
            return Err(format!(
                "delta={delta}: empirical {empirical} exceeds bound {bound}"
            ));
        }
        parts.push(format!("δ={delta}: {empirical:.2e} <= {bound:.2e}"));
    }
    Ok(parts.join("; "))
}

fn c7_edge_band() -> Result<String, String> {
    let (lo, hi) = pinned::EDGE_BAND_R3;
    let center = (lo + hi) / 2.0;
    if (hi - lo) / 2.0 > 0.5 * center {
        return Err("pinned band wider than 50% of its center".into());
    }
    let grid: Vec<u32> = (20..=60).collect();
    let pts =
        edge_density_ratios(3, &grid, 1.2, 1, crate::DEFAULT_SEED).map_err(|e| e.to_string())?;
    for p in &pts {
        if !(lo..=hi).contains(&p.ratio) {
            return Err(format!(
                "n={}: ratio {:.4} outside [{lo}, {hi}]",
                p.n, p.ratio
            ));
        }
    }
    let seen_lo = pts.iter().map(|p| p.ratio).fold(f64::INFINITY, f64::min);
    let seen_hi = pts.iter().map(|p| p.ratio).fold(0.0f64, f64::max);
    Ok(format!(
        "{} ratios in [{seen_lo:.4}, {seen_hi:.4}] ⊆ pinned [{lo}, {hi}]",
        pts.len()
    ))
}

/// Golden sweep parameters for criterion 8.
pub fn golden_sweep_config() -> (McConfig, Vec<f64>) {
    let params = JohnsonParams::new(5, 2, 0).expect("valid params");
    let mut cfg = McConfig::new(params, 1000, crate::DEFAULT_SEED);
    cfg.record_alpha = true;
    let grid: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
    (cfg, grid)
}

const GOLDEN_SWEEP_CSV: &str = include_str!("../data/mc_sweep_petersen_1000.csv");

fn c8_mc_golden() -> Result<String, String> {
    let (cfg, grid) = golden_sweep_config();
    // Per-trial coupling assertions (α non-increasing in p, success
    // non-decreasing) run inside the sweep itself.
    let sw = sweep(&cfg, &grid).map_err(|e| e.to_string())?;
    let csv = sw.to_csv();
    if csv != GOLDEN_SWEEP_CSV {
        let diff = csv
            .lines()
            .zip(GOLDEN_SWEEP_CSV.lines())
            .enumerate()
            .find(|(_, (a, b))| a != b)
            .map(|(k, (a, b))| format!("line {}: {a:?} vs {b:?}", k + 1))
            .unwrap_or_else(|| "length mismatch".to_string());
        return Err(format!("sweep CSV differs from golden: {diff}"));
    }
    let rates: Vec<f64> = sw.batches.iter().map(|b| b.summary.rate).collect();
    Ok(format!(
        "coupled sweep bit-identical to golden; rates along p-grid: {rates:?}"
    ))
}

fn c9_solver_oracle() -> Result<String, String> {
    let start = Instant::now();
    let probs = [0.2f64, 0.5, 0.8];
    let mut checked = 0u32;
    for trial in 0..200u64 {
        let mut st = Stream::new(substream(crate::DEFAULT_SEED, 0x9000 + trial));
        let v = 4 + (trial % 21) as usize; // 4..=24
        let p = probs[(trial % 3) as usize];
        let mut edges = Vec::new();
        let mut masks = vec![0u32; v];
        for a in 0..v {
            for b in a + 1..v {
                if st.next_f64() < p {
                    edges.push((a, b));
                    masks[a] |= 1 << b;
                    masks[b] |= 1 << a;
                }
            }
        }
        let g = solver::BitGraph::from_edges(v, &edges);
        let res = solver::max_independent_set_bits(&g, Budget::default());
        let want = solver::oracle::alpha_by_subset_dp(&masks).map_err(|e| e.to_string())?;
        if !res.optimal || res.alpha as u32 != want {
            return Err(format!(
                "trial {trial} (v={v}, p={p}): solver {} vs oracle {want}",
                res.alpha
            ));
        }
        checked += 1;
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(120) {
        return Err(format!("took {elapsed:?}, limit 120s"));
    }
    Ok(format!("{checked} random graphs agree ({elapsed:.2?})"))
}
