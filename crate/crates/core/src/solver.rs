//! Exact maximum-independent-set computation.
//!
//! Branch and bound directly on independence (no complement-clique detour):
//! the branching vertex is a maximum-degree vertex of the residual graph,
//! the upper bound is a greedy clique cover of the candidates, and the
//! initial lower bound is a greedy independent set seeded by the
//! lex-smallest star. All tie-breaking is by lowest vertex rank, so
//! witnesses are deterministic.

use crate::graph::DenseGraph;
use std::time::{Duration, Instant};

/// Node/time limits for one solver instance.
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    pub max_nodes: u64,
    pub max_time: Option<Duration>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_nodes: 200_000_000,
            max_time: None,
        }
    }
}

impl Budget {
    pub fn nodes(max_nodes: u64) -> Self {
        Budget {
            max_nodes,
            max_time: None,
        }
    }
}

/// Result of a maximum-independent-set search.
///
/// When `optimal` is true, `alpha` is exact and `witness` attains it.
/// Otherwise the budget ran out and [`lower_bound`, `upper_bound`] brackets
/// the true value (`alpha` = lower bound = best witness found).
#[derive(Clone, Debug)]
pub struct MisResult {
    pub alpha: usize,
    pub witness: Vec<usize>,
    pub optimal: bool,
    pub upper_bound: usize,
    pub nodes_explored: u64,
    pub elapsed: Duration,
    /// Bounded sample of distinct optimal witnesses; populated only when
    /// requested via [`max_independent_set_sampling`].
    pub optimal_sets_sample: Vec<Vec<usize>>,
}

impl MisResult {
    pub fn lower_bound(&self) -> usize {
        self.alpha
    }
}

/// Tri-state outcome of the decision form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision {
    /// A witness independent set of exactly the requested size.
    Yes(Vec<usize>),
    No,
    /// Budget exhausted before the question was settled.
    Unknown,
}

/// True iff the induced subgraph on `set` has no edges.
pub fn is_independent(g: &DenseGraph, set: &[usize]) -> bool {
    g.edge_count_within(set) == 0
}

/// Plain bit-matrix graph the searches run on; detached from the Johnson
/// structure so oracle tests can feed arbitrary graphs.
#[derive(Clone, Debug)]
pub struct BitGraph {
    v: usize,
    words: usize,
    adj: Vec<u64>,
}

impl BitGraph {
    pub fn from_dense(g: &DenseGraph) -> Self {
        let v = g.vertex_count();
        let words = g.words();
        let mut adj = Vec::with_capacity(v * words);
        for u in 0..v {
            adj.extend_from_slice(g.row(u));
        }
        BitGraph { v, words, adj }
    }

    pub fn from_edges(v: usize, edges: &[(usize, usize)]) -> Self {
        let words = v.div_ceil(64).max(1);
        let mut adj = vec![0u64; v * words];
        for &(a, b) in edges {
            assert!(a < v && b < v && a != b);
            adj[a * words + b / 64] |= 1 << (b % 64);
            adj[b * words + a / 64] |= 1 << (a % 64);
        }
        BitGraph { v, words, adj }
    }

    pub fn vertex_count(&self) -> usize {
        self.v
    }

    #[inline]
    pub fn row(&self, u: usize) -> &[u64] {
        &self.adj[u * self.words..(u + 1) * self.words]
    }

    fn full_mask(&self) -> Vec<u64> {
        let mut m = vec![u64::MAX; self.words];
        if self.v % 64 != 0 {
            m[self.words - 1] = (1u64 << (self.v % 64)) - 1;
        }
        if self.v == 0 {
            m.fill(0);
        }
        m
    }
}

fn popcount(mask: &[u64]) -> usize {
    mask.iter().map(|w| w.count_ones() as usize).sum()
}

fn iter_bits(mask: &[u64]) -> impl Iterator<Item = usize> + '_ {
    mask.iter().enumerate().flat_map(|(wi, &w)| {
        let mut bits = w;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(wi * 64 + b)
            }
        })
    })
}

struct Search<'a> {
    g: &'a BitGraph,
    budget: Budget,
    started: Instant,
    nodes: u64,
    exhausted: bool,
    best: Vec<usize>,
    open_ub: usize,
    collect_ties: usize,
    ties: Vec<Vec<usize>>,
    // Decision mode: stop as soon as a set of `target` exists.
    target: Option<usize>,
    found: Option<Vec<usize>>,
}

impl<'a> Search<'a> {
    fn new(g: &'a BitGraph, budget: Budget) -> Self {
        Search {
            g,
            budget,
            started: Instant::now(),
            nodes: 0,
            exhausted: false,
            best: Vec::new(),
            open_ub: 0,
            collect_ties: 0,
            ties: Vec::new(),
            target: None,
            found: None,
        }
    }

    fn out_of_budget(&mut self) -> bool {
        if self.nodes > self.budget.max_nodes {
            return true;
        }
        if let Some(limit) = self.budget.max_time {
            if self.nodes % 1024 == 0 && self.started.elapsed() > limit {
                return true;
            }
        }
        false
    }

    /// Greedy clique cover of the candidate set: each clique meets an
    /// independent set at most once, so the cover size bounds alpha(cand).
    fn cover_ub(&self, cand: &[u64], cliques: &mut Vec<Vec<u64>>) -> usize {
        cliques.clear();
        for v in iter_bits(cand) {
            let row = self.g.row(v);
            let mut placed = false;
            for c in cliques.iter_mut() {
                // v joins a clique iff adjacent to all its members.
                if c.iter().zip(row).all(|(m, r)| m & !r == 0) {
                    c[v / 64] |= 1 << (v % 64);
                    placed = true;
                    break;
                }
            }
            if !placed {
                let mut c = vec![0u64; self.g.words];
                c[v / 64] |= 1 << (v % 64);
                cliques.push(c);
            }
        }
        cliques.len()
    }

    fn branch_vertex(&self, cand: &[u64]) -> usize {
        let mut best_v = usize::MAX;
        let mut best_deg = usize::MAX;
        for v in iter_bits(cand) {
            let deg: usize = self
                .g
                .row(v)
                .iter()
                .zip(cand)
                .map(|(r, c)| (r & c).count_ones() as usize)
                .sum();
            // Strict > keeps the lowest rank among ties.
            if best_v == usize::MAX || deg > best_deg {
                best_v = v;
                best_deg = deg;
            }
        }
        best_v
    }

    fn recurse(&mut self, cur: &mut Vec<usize>, cand: &[u64]) {
        if self.found.is_some() {
            return;
        }
        self.nodes += 1;
        if self.out_of_budget() {
            self.exhausted = true;
            self.open_ub = self.open_ub.max(cur.len() + popcount(cand));
            return;
        }
        let remaining = popcount(cand);
        if remaining == 0 {
            self.settle(cur);
            return;
        }
        if let Some(t) = self.target {
            if cur.len() + remaining < t {
                return;
            }
        }
        let mut cliques = Vec::new();
        let ub = self.cover_ub(cand, &mut cliques);
        match self.target {
            Some(t) => {
                if cur.len() + ub < t {
                    return;
                }
            }
            None => {
                let keep_ties = if self.collect_ties > 0 { 1 } else { 0 };
                if cur.len() + ub + keep_ties <= self.best.len() {
                    return;
                }
            }
        }

        let v = self.branch_vertex(cand);
        // Include v first: removes its closed neighborhood, reaches deep
        // witnesses early.
        let mut included = cand.to_vec();
        for (w, r) in included.iter_mut().zip(self.g.row(v)) {
            *w &= !r;
        }
        included[v / 64] &= !(1 << (v % 64));
        cur.push(v);
        if self.target.map_or(false, |t| cur.len() >= t) {
            self.found = Some(cur.clone());
            cur.pop();
            return;
        }
        if cur.len() > self.best.len() {
            self.settle(cur);
        }
        self.recurse(cur, &included);
        cur.pop();
        if self.found.is_some() {
            return;
        }

        let mut excluded = cand.to_vec();
        excluded[v / 64] &= !(1 << (v % 64));
        self.recurse(cur, &excluded);
    }

    fn settle(&mut self, cur: &[usize]) {
        if cur.len() > self.best.len() {
            self.best = cur.to_vec();
            if self.collect_ties > 0 {
                self.ties.clear();
                self.ties.push(self.best.clone());
            }
        } else if self.collect_ties > 0
            && cur.len() == self.best.len()
            && self.ties.len() < self.collect_ties
        {
            let mut sorted = cur.to_vec();
            sorted.sort_unstable();
            if !self.ties.iter().any(|t| {
                let mut u = t.clone();
                u.sort_unstable();
                u == sorted
            }) {
                self.ties.push(cur.to_vec());
            }
        }
    }
}

/// Greedy independent set: the star (always independent in a Johnson graph
/// and its edge-subgraphs) extended by ascending rank.
fn greedy_seed(g: &BitGraph, star: Option<&[usize]>) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut blocked = vec![0u64; g.words];
    let mut in_set = vec![0u64; g.words];
    let add = |v: usize, blocked: &mut Vec<u64>, in_set: &mut Vec<u64>, chosen: &mut Vec<usize>| {
        chosen.push(v);
        in_set[v / 64] |= 1 << (v % 64);
        for (b, r) in blocked.iter_mut().zip(g.row(v)) {
            *b |= r;
        }
    };
    if let Some(star) = star {
        for &v in star {
            debug_assert!(blocked[v / 64] >> (v % 64) & 1 == 0);
            add(v, &mut blocked, &mut in_set, &mut chosen);
        }
    }
    for v in 0..g.v {
        let free = blocked[v / 64] >> (v % 64) & 1 == 0;
        let fresh = in_set[v / 64] >> (v % 64) & 1 == 0;
        if free && fresh {
            add(v, &mut blocked, &mut in_set, &mut chosen);
        }
    }
    chosen.sort_unstable();
    chosen
}

fn solve_bits(
    g: &BitGraph,
    star: Option<&[usize]>,
    budget: Budget,
    collect_ties: usize,
) -> MisResult {
    let mut search = Search::new(g, budget);
    search.collect_ties = collect_ties;
    let seed = greedy_seed(g, star);
    search.best = seed;
    if collect_ties > 0 {
        search.ties.push(search.best.clone());
    }
    let cand = g.full_mask();
    let mut cur = Vec::new();
    search.recurse(&mut cur, &cand);
    let alpha = search.best.len();
    let optimal = !search.exhausted;
    let upper_bound = if optimal {
        alpha
    } else {
        alpha.max(search.open_ub)
    };
    let mut witness = search.best;
    witness.sort_unstable();
    let mut ties = search.ties;
    ties.retain(|t| t.len() == alpha);
    for t in &mut ties {
        t.sort_unstable();
    }
    MisResult {
        alpha,
        witness,
        optimal,
        upper_bound,
        nodes_explored: search.nodes,
        elapsed: search.started.elapsed(),
        optimal_sets_sample: ties,
    }
}

/// Exact alpha with witness for a dense Johnson (sub)graph.
pub fn max_independent_set(g: &DenseGraph, budget: Budget) -> MisResult {
    let bits = BitGraph::from_dense(g);
    let star = g.star_ranks();
    let result = solve_bits(&bits, Some(&star), budget, 0);
    debug_assert!(is_independent(g, &result.witness));
    result
}

/// As [`max_independent_set`], additionally collecting up to `sample_limit`
/// distinct optimal witnesses (weaker pruning, more nodes).
pub fn max_independent_set_sampling(
    g: &DenseGraph,
    budget: Budget,
    sample_limit: usize,
) -> MisResult {
    let bits = BitGraph::from_dense(g);
    let star = g.star_ranks();
    solve_bits(&bits, Some(&star), budget, sample_limit)
}

/// Solver entry point for arbitrary bit graphs (no star seed).
pub fn max_independent_set_bits(g: &BitGraph, budget: Budget) -> MisResult {
    solve_bits(g, None, budget, 0)
}

/// Decision form: does `g` contain an independent set of size `k`?
/// Exits at the first witness; `Unknown` when the budget runs out first.
pub fn alpha_at_least(g: &DenseGraph, k: usize, budget: Budget) -> Decision {
    if k == 0 {
        return Decision::Yes(Vec::new());
    }
    let bits = BitGraph::from_dense(g);
    let star = g.star_ranks();
    decide_bits(&bits, Some(&star), k, budget)
}

pub fn decide_bits(g: &BitGraph, star: Option<&[usize]>, k: usize, budget: Budget) -> Decision {
    if k == 0 {
        return Decision::Yes(Vec::new());
    }
    if k > g.v {
        return Decision::No;
    }
    let seed = greedy_seed(g, star);
    if seed.len() >= k {
        return Decision::Yes(seed[..k].to_vec());
    }
    let mut search = Search::new(g, budget);
    search.target = Some(k);
    // The greedy set is a valid incumbent for bounding but decision search
    // only prunes against the target.
    let cand = g.full_mask();
    let mut cur = Vec::new();
    search.recurse(&mut cur, &cand);
    match search.found {
        Some(mut w) => {
            w.sort_unstable();
            Decision::Yes(w)
        }
        None if search.exhausted => Decision::Unknown,
        None => Decision::No,
    }
}

/// Reference implementations used to cross-check the branch-and-bound
/// solver. Deliberately simpler, separate code paths.
pub mod oracle {
    use crate::{Error, Result};

    /// Exhaustive maximum independent set by subset dynamic programming.
    /// O(2^v) time and space; v <= 24.
    pub fn alpha_by_subset_dp(adj: &[u32]) -> Result<u32> {
        let v = adj.len();
        if v > 24 {
            return Err(Error::Capacity(format!("subset DP limited to 24 vertices, got {v}")));
        }
        if v == 0 {
            return Ok(0);
        }
        let full: usize = (1usize << v) - 1;
        let mut f = vec![0u8; full + 1];
        for s in 1..=full {
            let v0 = s.trailing_zeros() as usize;
            let without = f[s & (s - 1)];
            let with = 1 + f[s & !(adj[v0] as usize | (1 << v0))];
            f[s] = without.max(with);
        }
        Ok(f[full] as u32)
    }

    /// Exhaustive recursion on u64 masks (v <= 64): branch on the lowest
    /// candidate vertex, prune only on remaining count.
    pub fn alpha_by_enumeration(adj: &[u64]) -> Result<u32> {
        let v = adj.len();
        if v > 64 {
            return Err(Error::Capacity(format!("enumeration limited to 64 vertices, got {v}")));
        }
        let full = if v == 64 { u64::MAX } else { (1u64 << v) - 1 };
        let mut best = 0u32;
        rec(adj, full, 0, &mut best);
        Ok(best)
    }

    fn rec(adj: &[u64], cand: u64, cur: u32, best: &mut u32) {
        if cur + cand.count_ones() <= *best {
            return;
        }
        if cand == 0 {
            *best = cur;
            return;
        }
        let v = cand.trailing_zeros() as usize;
        rec(adj, cand & !(adj[v] | (1 << v)), cur + 1, best);
        rec(adj, cand & !(1u64 << v), cur, best);
    }
}
