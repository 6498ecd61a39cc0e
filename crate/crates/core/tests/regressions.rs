//! Regression baselines recorded on the first oracle runs (default seed,
//! mix64-v1 stream). Any drift in sampling, solving or formatting shows up
//! here as a byte-level diff.

use jlab_core::bounds::{measured_edge_band, turan_maximizer_n0, turan_scan, Constants};
use jlab_core::graph::JohnsonParams;
use jlab_core::montecarlo::{run_batch, sweep, McConfig};
use jlab_core::DEFAULT_SEED;

#[test]
fn edge_density_bands() {
    // Ratio bands e(L)·n/l² on the derivation grids, pinned from the first
    // oracle run. Both bands stay well-shaped (half-width below half the
    // center), matching the Θ(l²/n) expectation.
    let (lo3, hi3) = measured_edge_band(3).unwrap();
    assert!((3.30..=3.37).contains(&lo3), "r=3 lo {lo3}");
    assert!((4.34..=4.41).contains(&hi3), "r=3 hi {hi3}");
    let (lo4, hi4) = measured_edge_band(4).unwrap();
    assert!((3.76..=3.82).contains(&lo4), "r=4 lo {lo4}");
    assert!((5.81..=5.88).contains(&hi4), "r=4 hi {hi4}");
    for (lo, hi) in [(lo3, hi3), (lo4, hi4)] {
        assert!((hi - lo) / 2.0 <= 0.5 * (hi + lo) / 2.0);
    }
}

#[test]
fn batch_baseline_g10_3_1() {
    // At p = 1/2 and r = 3 the sampled graphs essentially always hold an
    // independent set beyond the star size 8 (no stability at r = 3).
    let params = JohnsonParams::new(10, 3, 1).unwrap();
    let cfg = McConfig::new(params, 1000, DEFAULT_SEED);
    let batch = run_batch(&cfg, 0.5).unwrap();
    let want = "\
# jlab mc run format=1 stream=mix64-v1
# config n=10 r=3 s=1 trials=1000 master_seed=1785487714 target=8
n,r,s,p,trials,successes,unknowns,rate,ci_lo,ci_hi,master_seed
10,3,1,0.5,1000,0,0,0.000000,0.000000,0.003827,1785487714
";
    assert_eq!(batch.to_csv(), want);
}

#[test]
fn sweep_baseline_g12_3_1() {
    // α(G(12,3,1)) = 12 > 10 = star size, and deleting edges only raises
    // α, so no trial can ever match the star at any p.
    let params = JohnsonParams::new(12, 3, 1).unwrap();
    let cfg = McConfig::new(params, 200, DEFAULT_SEED);
    let sw = sweep(&cfg, &[0.25, 0.5, 0.75]).unwrap();
    let want = "\
# jlab mc sweep format=1 stream=mix64-v1
# config n=12 r=3 s=1 trials=200 master_seed=1785487714 budget_nodes=200000000 record_alpha=false target=10
n,r,s,p,trials,successes,unknowns,rate,ci_lo,ci_hi,master_seed
12,3,1,0.25,200,0,0,0.000000,0.000000,0.018846,1785487714
12,3,1,0.5,200,0,0,0.000000,0.000000,0.018846,1785487714
12,3,1,0.75,200,0,0,0.000000,0.000000,0.018846,1785487714
";
    assert_eq!(sw.to_csv(), want);
}

#[test]
fn turan_scan_baseline_r4() {
    let k = Constants::derive(4).unwrap();
    // Derived witnesses: slope 3/64 on the grid, density band floor, and
    // the maximizer threshold.
    assert!((k.c - 3.0 / 64.0).abs() < 1e-9);
    assert!((k.c0 - 3.7924382716049383).abs() < 1e-9);
    assert_eq!(turan_maximizer_n0(&k), Some(97));

    let grid = [64u32, 128, 256, 512, 1024, 2048, 4096, 8192];
    let (rows, crossing) = turan_scan(&grid, k.t0, &k).unwrap();
    // The (i,x) region is empty until n ≈ 300 and first populates at 512.
    let first_nonempty = rows.iter().find(|r| r.region_rows > 0).map(|r| r.n);
    assert_eq!(first_nonempty, Some(512));
    // Empty-region rows contribute zero, so the grid crossing is the first
    // point; the substantive fact is the magnitude at the populated rows.
    assert_eq!(crossing, Some(64));
    let at512 = rows.iter().find(|r| r.n == 512).unwrap();
    let ln512 = at512.double_sum.ln().unwrap();
    assert!(
        (-5128.0..=-5126.0).contains(&ln512),
        "ln sum at 512 drifted: {ln512}"
    );
    assert!(at512.all_checks);
    // Monotone collapse along the populated suffix.
    let populated: Vec<f64> = rows
        .iter()
        .filter(|r| r.region_rows > 0)
        .map(|r| r.double_sum.ln().unwrap())
        .collect();
    assert!(populated.windows(2).all(|w| w[1] < w[0]));
}
