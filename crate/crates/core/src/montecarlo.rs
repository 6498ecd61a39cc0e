//! Deterministic parallel Monte Carlo estimation of
//! P(α(G_p(n,r,s)) = binom(n−s−1, r−s−1)).
//!
//! Trials are independent work items: trial t draws its seed as
//! substream(master_seed, t) and decides, via the early-exit decision
//! solver, whether α of the sampled graph exceeds the star size. A sweep
//! over a p-grid reuses the same per-trial seed for every p (shared-draw
//! coupling): edge sets are then nested along the grid, so per-trial α is
//! non-increasing and per-trial success non-decreasing in p — asserted
//! exactly, not statistically. Budget-exhausted trials surface as
//! `Unknown`, never silently dropped.

use crate::graph::{DenseGraph, JohnsonParams, DEFAULT_VERTEX_BUDGET};
use crate::solver::{alpha_at_least, is_independent, max_independent_set, Budget, Decision};
use crate::stream::{substream, STREAM_VERSION};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

/// Whether a trial's α matched the star size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TriState {
    Yes,
    No,
    Unknown,
}

/// Per-trial outcome at one p.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TrialRecord {
    pub trial: u32,
    pub matches_star: TriState,
    /// Exact α of the sampled graph; recorded only when `record_alpha`.
    pub alpha: Option<u32>,
    pub solver_nodes: u64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Summary {
    pub successes: u32,
    pub unknowns: u32,
    pub rate: f64,
    pub unknown_rate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

/// Results of one (params, p) batch.
#[derive(Clone, Debug)]
pub struct TrialBatch {
    pub params: JohnsonParams,
    pub p: f64,
    pub trials: u32,
    pub master_seed: u64,
    pub target: u64,
    pub records: Vec<TrialRecord>,
    pub summary: Summary,
}

/// Batch configuration; `p` values are supplied per run.
#[derive(Clone, Debug)]
pub struct McConfig {
    pub params: JohnsonParams,
    pub trials: u32,
    pub master_seed: u64,
    pub vertex_budget: usize,
    pub solver_budget: Budget,
    /// Also compute full α per trial (slower; enables the exact
    /// α-monotonicity assertion and per-trial α reporting).
    pub record_alpha: bool,
}

impl McConfig {
    pub fn new(params: JohnsonParams, trials: u32, master_seed: u64) -> Self {
        McConfig {
            params,
            trials,
            master_seed,
            vertex_budget: DEFAULT_VERTEX_BUDGET,
            solver_budget: Budget::default(),
            record_alpha: false,
        }
    }
}

/// A coupled sweep across a p-grid.
#[derive(Clone, Debug)]
pub struct Sweep {
    pub config_desc: String,
    pub params: JohnsonParams,
    pub trials: u32,
    pub master_seed: u64,
    pub target: u64,
    /// Stability threshold overlaid on the report, where defined (s = 0,
    /// n ≥ 2r+1).
    pub p0: Option<f64>,
    pub p_grid: Vec<f64>,
    pub batches: Vec<TrialBatch>,
}

fn wilson95(successes: u32, decided: u32) -> (f64, f64) {
    if decided == 0 {
        return (0.0, 1.0);
    }
    let z = 1.96f64;
    let n = decided as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

fn summarize(records: &[TrialRecord]) -> Summary {
    let successes = records
        .iter()
        .filter(|r| r.matches_star == TriState::Yes)
        .count() as u32;
    let unknowns = records
        .iter()
        .filter(|r| r.matches_star == TriState::Unknown)
        .count() as u32;
    let trials = records.len() as u32;
    let decided = trials - unknowns;
    let (ci_lo, ci_hi) = wilson95(successes, decided);
    Summary {
        successes,
        unknowns,
        rate: if decided == 0 {
            0.0
        } else {
            successes as f64 / decided as f64
        },
        unknown_rate: if trials == 0 {
            0.0
        } else {
            unknowns as f64 / trials as f64
        },
        ci_lo,
        ci_hi,
    }
}

struct TrialCell {
    matches_star: TriState,
    alpha: Option<u32>,
    nodes: u64,
}

fn run_trial_at_p(
    full: &DenseGraph,
    star: &[usize],
    target: u64,
    cfg: &McConfig,
    trial_seed: u64,
    p: f64,
    full_alpha: Option<u32>,
) -> Result<TrialCell> {
    let sampled = full.sample_subgraph(p, trial_seed)?;
    // The star survives edge deletion, so α >= target always; asserted
    // rather than assumed.
    assert!(
        is_independent(&sampled, star),
        "star stopped being independent — sampling is broken"
    );
    let decision = alpha_at_least(&sampled, (target + 1) as usize, cfg.solver_budget);
    let (matches_star, mut nodes) = match decision {
        Decision::Yes(_) => (TriState::No, 0),
        Decision::No => (TriState::Yes, 0),
        Decision::Unknown => (TriState::Unknown, 0),
    };
    let alpha = if cfg.record_alpha {
        let res = max_independent_set(&sampled, cfg.solver_budget);
        nodes = res.nodes_explored;
        if !res.optimal {
            return Ok(TrialCell {
                matches_star: TriState::Unknown,
                alpha: None,
                nodes,
            });
        }
        assert!(res.alpha as u64 >= target, "alpha below the star size");
        if let Some(fa) = full_alpha {
            assert!(
                res.alpha as u32 >= fa,
                "alpha decreased after deleting edges"
            );
        }
        // Cross-check the decision against the exact value.
        match matches_star {
            TriState::Yes => assert_eq!(res.alpha as u64, target),
            TriState::No => assert!(res.alpha as u64 > target),
            TriState::Unknown => {}
        }
        Some(res.alpha as u32)
    } else {
        None
    };
    Ok(TrialCell {
        matches_star,
        alpha,
        nodes,
    })
}

/// Runs `cfg.trials` independent trials at a single p.
pub fn run_batch(cfg: &McConfig, p: f64) -> Result<TrialBatch> {
    let sweep = sweep(cfg, &[p])?;
    Ok(sweep.batches.into_iter().next().expect("one batch"))
}

/// Runs the coupled sweep: one seed per trial shared across the whole
/// p-grid. Aggregation is order-independent; reruns are bit-identical for
/// equal configs regardless of worker count.
pub fn sweep(cfg: &McConfig, p_grid: &[f64]) -> Result<Sweep> {
    if p_grid.is_empty() {
        return Err(Error::Precondition("empty p grid".into()));
    }
    for &p in p_grid {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Precondition(format!("p={p} outside [0,1]")));
        }
    }
    if p_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("p grid must be strictly increasing".into()));
    }
    let full = DenseGraph::build_full(cfg.params, cfg.vertex_budget)?;
    let star = full.star_ranks();
    let target = cfg.params.star_size();
    let full_alpha = if cfg.record_alpha {
        let res = max_independent_set(&full, cfg.solver_budget);
        if !res.optimal {
            return Err(Error::Budget(
                "full-graph alpha did not finish within the solver budget".into(),
            ));
        }
        Some(res.alpha as u32)
    } else {
        None
    };

    let per_trial: Vec<Vec<TrialCell>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let trial_seed = substream(cfg.master_seed, t as u64);
            let mut row = Vec::with_capacity(p_grid.len());
            for &p in p_grid {
                row.push(run_trial_at_p(
                    &full, &star, target, cfg, trial_seed, p, full_alpha,
                )?);
            }
            // Shared-draw coupling: edge sets are nested along the grid, so
            // success is monotone non-decreasing and α non-increasing in p.
            for w in row.windows(2) {
                match (w[0].matches_star, w[1].matches_star) {
                    (TriState::Yes, TriState::No) => {
                        panic!("trial {t}: success flipped off as p grew")
                    }
                    _ => {}
                }
                if let (Some(a0), Some(a1)) = (w[0].alpha, w[1].alpha) {
                    assert!(a0 >= a1, "trial {t}: alpha increased with p");
                }
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;

    let batches = p_grid
        .iter()
        .enumerate()
        .map(|(pi, &p)| {
            let records: Vec<TrialRecord> = per_trial
                .iter()
                .enumerate()
                .map(|(t, row)| TrialRecord {
                    trial: t as u32,
                    matches_star: row[pi].matches_star,
                    alpha: row[pi].alpha,
                    solver_nodes: row[pi].nodes,
                })
                .collect();
            let summary = summarize(&records);
            TrialBatch {
                params: cfg.params,
                p,
                trials: cfg.trials,
                master_seed: cfg.master_seed,
                target,
                records,
                summary,
            }
        })
        .collect();

    let p0 = if cfg.params.s == 0 && cfg.params.n >= 2 * cfg.params.r + 1 {
        crate::bounds::p0_threshold(cfg.params.n, cfg.params.r, crate::bounds::LogBase::Natural)
            .ok()
    } else {
        None
    };

    Ok(Sweep {
        config_desc: config_desc(cfg),
        params: cfg.params,
        trials: cfg.trials,
        master_seed: cfg.master_seed,
        target,
        p0,
        p_grid: p_grid.to_vec(),
        batches,
    })
}

fn config_desc(cfg: &McConfig) -> String {
    let mut desc = format!(
        "n={} r={} s={} trials={} master_seed={} budget_nodes={} record_alpha={}",
        cfg.params.n,
        cfg.params.r,
        cfg.params.s,
        cfg.trials,
        cfg.master_seed,
        cfg.solver_budget.max_nodes,
        cfg.record_alpha
    );
    if let Some(t) = cfg.solver_budget.max_time {
        // A wall-clock budget can turn hard trials Unknown; recorded so a
        // header never silently describes a non-reproducible run as exact.
        desc.push_str(&format!(" budget_secs={}", t.as_secs_f64()));
    }
    desc
}

fn csv_header(kind: &str, desc: &str, target: u64) -> String {
    format!(
        "# jlab mc {kind} format=1 stream={STREAM_VERSION}\n# config {desc} target={target}\nn,r,s,p,trials,successes,unknowns,rate,ci_lo,ci_hi,master_seed\n"
    )
}

fn csv_row(b: &TrialBatch) -> String {
    format!(
        "{},{},{},{},{},{},{},{:.6},{:.6},{:.6},{}\n",
        b.params.n,
        b.params.r,
        b.params.s,
        b.p,
        b.trials,
        b.summary.successes,
        b.summary.unknowns,
        b.summary.rate,
        b.summary.ci_lo,
        b.summary.ci_hi,
        b.master_seed
    )
}

impl TrialBatch {
    pub fn to_csv(&self) -> String {
        let desc = format!(
            "n={} r={} s={} trials={} master_seed={}",
            self.params.n, self.params.r, self.params.s, self.trials, self.master_seed
        );
        let mut out = csv_header("run", &desc, self.target);
        out.push_str(&csv_row(self));
        out
    }

    pub fn to_json(&self, include_trials: bool) -> serde_json::Value {
        let mut v = json!({
            "format": 1,
            "stream": STREAM_VERSION,
            "n": self.params.n,
            "r": self.params.r,
            "s": self.params.s,
            "p": self.p,
            "trials": self.trials,
            "master_seed": self.master_seed,
            "target": self.target,
            "summary": self.summary,
        });
        if include_trials {
            v["records"] = serde_json::to_value(&self.records).expect("records serialize");
        }
        v
    }
}

impl Sweep {
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# jlab mc sweep format=1 stream={STREAM_VERSION}\n# config {} target={}\n",
            self.config_desc, self.target
        );
        if let Some(p0) = self.p0 {
            out.push_str(&format!("# p0 {p0:.6}\n"));
        }
        out.push_str("n,r,s,p,trials,successes,unknowns,rate,ci_lo,ci_hi,master_seed\n");
        for b in &self.batches {
            out.push_str(&csv_row(b));
        }
        out
    }

    pub fn to_json(&self, include_trials: bool) -> serde_json::Value {
        json!({
            "format": 1,
            "stream": STREAM_VERSION,
            "config": self.config_desc,
            "target": self.target,
            "p0": self.p0,
            "p_grid": self.p_grid,
            "batches": self.batches.iter().map(|b| b.to_json(include_trials)).collect::<Vec<_>>(),
        })
    }
}
