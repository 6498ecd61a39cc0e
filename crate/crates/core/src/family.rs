//! Per-family statistics and the star-block constructions.
//!
//! For a family A of r-subsets, d(A) is the largest intersection of A with
//! any pair star S_{i,j} (the vertices containing both i and j). After
//! relabeling the winning center to {n−1, n}, the members outside the star
//! form X with |X| = x, the ground elements of [n−2] they cover form the
//! covered set I with |I| = i(X). From those the module builds the reduced
//! ("essential") subfamily — star members plus one representative per
//! covered element — and the disjoint star blocks: for each covered element
//! l_j a block of star vertices all meeting the chosen outside vertex u_j
//! in exactly one element, so every block/representative pair is joined by
//! an edge of G(n,r,1).

use crate::combinatorics::{binomial, KSubset};
use crate::graph::enumerate_vertices;
use crate::stream::Stream;
use crate::{Error, Result};
use serde_json::json;

/// Statistics of one family, in normalized labels (center at {n−1, n}).
#[derive(Clone, Debug)]
pub struct FamilyStats {
    pub n: u32,
    pub r: u32,
    pub family_size: usize,
    /// Winning star center in the original labels, lex-smallest among ties.
    pub best_center: (u32, u32),
    /// d(A): members containing both center elements.
    pub d_value: usize,
    /// Relabeling permutation, 1-based old → new; maps the center to
    /// {n−1, n}. Apply the inverse to return outputs to original labels.
    pub relabel: Vec<u32>,
    /// The whole family, relabeled, sorted by colex rank.
    pub members: Vec<KSubset>,
    /// Members outside the star (relabeled): those not containing both n−1
    /// and n. Sorted by colex rank.
    pub outside: Vec<KSubset>,
    /// Ground elements of [n−2] covered by `outside`, ascending.
    pub covered: Vec<u32>,
}

impl FamilyStats {
    pub fn x(&self) -> usize {
        self.outside.len()
    }

    pub fn covered_count(&self) -> usize {
        self.covered.len()
    }

    /// JSON summary with the wire field names used by the CLI.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "size": self.family_size,
            "center": [self.best_center.0, self.best_center.1],
            "d": self.d_value,
            "x": self.x(),
            "iX": self.covered_count(),
            "IX": self.covered,
        })
    }
}

/// Computes d(A) by scanning all binom(n,2) centers, ties broken by the
/// lexicographically smallest pair, and normalizes labels so the winner is
/// {n−1, n}.
pub fn analyze_family(n: u32, r: u32, members: &[KSubset]) -> Result<FamilyStats> {
    if r < 2 {
        return Err(Error::Precondition("family analysis needs r >= 2".into()));
    }
    let mut sorted = members.to_vec();
    sorted.sort();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Precondition("family members must be distinct".into()));
    }
    for m in members {
        if m.ground_n() != n || m.size() != r as usize {
            return Err(Error::Precondition(format!(
                "member {m} does not match n={n} r={r}"
            )));
        }
    }

    let mut best = (1u32, 2u32);
    let mut best_count = 0usize;
    for i in 1..=n {
        for j in i + 1..=n {
            let count = members
                .iter()
                .filter(|m| m.contains(i) && m.contains(j))
                .count();
            if count > best_count {
                best_count = count;
                best = (i, j);
            }
        }
    }
    // Empty family (or no pair covered at all): conventional center (1,2).

    let relabel = center_to_top(n, best.0, best.1);
    let mut relabeled: Vec<KSubset> = members.iter().map(|m| m.relabel(&relabel)).collect();
    relabeled.sort_by_key(|m| m.rank());

    let mut outside: Vec<KSubset> = relabeled
        .iter()
        .filter(|m| !(m.contains(n - 1) && m.contains(n)))
        .cloned()
        .collect();
    outside.sort_by_key(|m| m.rank());

    let mut covered: Vec<u32> = Vec::new();
    for m in &outside {
        for &e in m.elems() {
            if e <= n - 2 && !covered.contains(&e) {
                covered.push(e);
            }
        }
    }
    covered.sort_unstable();

    Ok(FamilyStats {
        n,
        r,
        family_size: members.len(),
        best_center: best,
        d_value: best_count,
        relabel,
        members: relabeled,
        outside,
        covered,
    })
}

/// Permutation of [1,n] sending a → n−1 and b → n (a < b), identity
/// elsewhere up to the two forced swaps.
fn center_to_top(n: u32, a: u32, b: u32) -> Vec<u32> {
    let mut perm: Vec<u32> = (0..=n).collect(); // index 0 unused
    perm.swap(a as usize, (n - 1) as usize);
    // After the first swap, find who currently maps to n and give it to b.
    let holder = perm.iter().position(|&v| v == n).expect("n present") as usize;
    perm.swap(b as usize, holder);
    perm
}

/// The reduced subfamily: all star members of A plus, for every covered
/// element l, the lowest-rank outside member containing l. Always a subset
/// of A, so never larger.
pub fn essential_subfamily(stats: &FamilyStats) -> Vec<KSubset> {
    let n = stats.n;
    let mut keep: Vec<KSubset> = stats
        .members
        .iter()
        .filter(|m| m.contains(n - 1) && m.contains(n))
        .cloned()
        .collect();
    for &l in &stats.covered {
        let rep = stats
            .outside
            .iter()
            .find(|m| m.contains(l))
            .expect("covered element has a witness");
        if !keep.contains(rep) {
            keep.push(rep.clone());
        }
    }
    keep.sort_by_key(|m| m.rank());
    keep
}

/// The disjoint star blocks built from one family's statistics.
#[derive(Clone, Debug)]
pub struct StarBlocks {
    /// Covered elements l_1 < … < l_k anchoring the blocks.
    pub anchors: Vec<u32>,
    /// Chosen outside members u_j with l_j ∈ u_j (lowest rank per anchor).
    pub chosen: Vec<KSubset>,
    /// blocks[j]: every vertex v with {l_j, n−1, n} ⊆ v and
    /// v ∩ ({l_1,…,l_{j−1}} ∪ u_j \ {l_j}) = ∅ (the maximal choice).
    pub blocks: Vec<Vec<KSubset>>,
}

impl StarBlocks {
    /// Guaranteed lower bound for |blocks[j]| (0-based j): binom(n−r−j−2, r−3)
    /// in 0-based indexing, i.e. binom(n−r−(j+1)−1, r−3).
    pub fn block_lower_bound(n: u32, r: u32, j_one_based: usize) -> num_bigint::BigUint {
        binomial(n as i64 - r as i64 - j_one_based as i64 - 1, r as i64 - 3)
    }
}

/// Builds the maximal star blocks. Requires r ≥ 4 (each block member needs
/// r−3 ≥ 1 free slots) and at least one covered element.
pub fn star_blocks(stats: &FamilyStats) -> Result<StarBlocks> {
    let (n, r) = (stats.n, stats.r);
    if r < 4 {
        return Err(Error::Unsupported(format!(
            "star blocks need r >= 4 (free-slot count r-3 degenerates), got r={r}"
        )));
    }
    if stats.covered.is_empty() {
        return Err(Error::Precondition(
            "star blocks need at least one covered element".into(),
        ));
    }

    let anchors = stats.covered.clone();
    let mut chosen = Vec::with_capacity(anchors.len());
    for &l in &anchors {
        let u = stats
            .outside
            .iter()
            .find(|m| m.contains(l))
            .expect("covered element has a witness")
            .clone();
        chosen.push(u);
    }

    // Enumerate candidates once: all vertices containing both n−1 and n.
    let star: Vec<KSubset> = enumerate_vertices(n, r)
        .into_iter()
        .filter(|v| v.contains(n - 1) && v.contains(n))
        .collect();

    let mut blocks = Vec::with_capacity(anchors.len());
    for (j, (&l, u)) in anchors.iter().zip(&chosen).enumerate() {
        let forbidden: Vec<u32> = anchors[..j]
            .iter()
            .copied()
            .chain(u.elems().iter().copied().filter(|&e| e != l))
            .collect();
        let block: Vec<KSubset> = star
            .iter()
            .filter(|v| v.contains(l) && forbidden.iter().all(|&f| !v.contains(f)))
            .cloned()
            .collect();
        blocks.push(block);
    }

    Ok(StarBlocks {
        anchors,
        chosen,
        blocks,
    })
}

/// Checks every structural property the star blocks must have; returns a
/// description of the first violation. Used by the verification suite and
/// the construction tests.
pub fn check_block_invariants(
    stats: &FamilyStats,
    blocks: &StarBlocks,
) -> std::result::Result<(), String> {
    let n = stats.n;
    for (j, block) in blocks.blocks.iter().enumerate() {
        let l = blocks.anchors[j];
        let u = &blocks.chosen[j];
        for v in block {
            // 1. Containment of {l_j, n−1, n}.
            if !(v.contains(l) && v.contains(n - 1) && v.contains(n)) {
                return Err(format!("block {j}: {v} misses the anchor triple"));
            }
            // 2. Avoidance of earlier anchors and of u_j \ {l_j}.
            if blocks.anchors[..j].iter().any(|&e| v.contains(e)) {
                return Err(format!("block {j}: {v} hits an earlier anchor"));
            }
            if u.elems().iter().any(|&e| e != l && v.contains(e)) {
                return Err(format!("block {j}: {v} hits u_j beyond the anchor"));
            }
            // 5. Cross edge: |v ∩ u_j| = 1 exactly.
            match v.intersection_size(u) {
                Ok(1) => {}
                other => return Err(format!("block {j}: {v} meets u_j in {other:?} elements")),
            }
        }
        // 4. Cardinality lower bound.
        let bound = StarBlocks::block_lower_bound(stats.n, stats.r, j + 1);
        if num_bigint::BigUint::from(block.len()) < bound {
            return Err(format!(
                "block {j}: size {} below the bound {bound}",
                block.len()
            ));
        }
    }
    // 3. Pairwise disjointness.
    for a in 0..blocks.blocks.len() {
        for b in a + 1..blocks.blocks.len() {
            for v in &blocks.blocks[a] {
                if blocks.blocks[b].contains(v) {
                    return Err(format!("blocks {a} and {b} share {v}"));
                }
            }
        }
    }
    Ok(())
}

/// Randomized family satisfying the center-avoidance shape: the full star
/// on {n−1, n} plus `x` distinct random r-subsets of [n−2]. The winning
/// center is then {n−1, n} and the relabeling is the identity. The outside
/// part is drawn uniformly over admissible sets of the given size.
pub fn random_admissible_family(n: u32, r: u32, x: usize, seed: u64) -> Result<Vec<KSubset>> {
    if n < r + 2 {
        return Err(Error::Precondition(format!(
            "need n >= r + 2 for outside members, got n={n} r={r}"
        )));
    }
    let pool = crate::combinatorics::binomial_u64((n - 2) as u64, r as u64);
    if (x as u64) > pool {
        return Err(Error::Precondition(format!(
            "cannot pick {x} distinct r-subsets of [n-2], only {pool} exist"
        )));
    }
    let mut members: Vec<KSubset> = enumerate_vertices(n, r)
        .into_iter()
        .filter(|v| v.contains(n - 1) && v.contains(n))
        .collect();
    let mut st = Stream::new(seed);
    for idx in st.sample_distinct(pool, x) {
        // Rank idx within subsets of [1, n-2].
        let sub = KSubset::unrank(idx, n - 2, r)?;
        members.push(KSubset::new(n, sub.elems().to_vec())?);
    }
    Ok(members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn star_family(n: u32, r: u32, a: u32, b: u32) -> Vec<KSubset> {
        enumerate_vertices(n, r)
            .into_iter()
            .filter(|v| v.contains(a) && v.contains(b))
            .collect()
    }

    #[test]
    fn full_star_stats() {
        // The entire star S_{1,2} at n=10, r=4: d = binom(8,2) = 28, no
        // outside members.
        let fam = star_family(10, 4, 1, 2);
        let stats = analyze_family(10, 4, &fam).unwrap();
        assert_eq!(stats.d_value, 28);
        assert_eq!(stats.best_center, (1, 2));
        assert_eq!(stats.x(), 0);
        assert_eq!(stats.covered_count(), 0);
    }

    #[test]
    fn singleton_family() {
        let fam = vec![KSubset::new(6, vec![1, 2, 3]).unwrap()];
        let stats = analyze_family(6, 3, &fam).unwrap();
        assert_eq!(stats.d_value, 1);
        assert_eq!(stats.best_center, (1, 2)); // lex-min of the 3 pairs inside
    }

    #[test]
    fn empty_family_conventional_center() {
        let stats = analyze_family(8, 3, &[]).unwrap();
        assert_eq!(stats.d_value, 0);
        assert_eq!(stats.best_center, (1, 2));
        assert_eq!(stats.x(), 0);
    }

    #[test]
    fn star_plus_one_outside() {
        // S_{1,2} in G(10,4,1) plus {3,4,5,6}: x = 1, covered = {3,4,5,6}.
        let mut fam = star_family(10, 4, 1, 2);
        fam.push(KSubset::new(10, vec![3, 4, 5, 6]).unwrap());
        let stats = analyze_family(10, 4, &fam).unwrap();
        assert_eq!(stats.best_center, (1, 2));
        assert_eq!(stats.x(), 1);
        assert_eq!(stats.covered, vec![3, 4, 5, 6]);
        assert_eq!(stats.covered_count(), 4);
        // Relabeled outside member keeps its elements: {3,4,5,6} ⊆ [8].
        assert_eq!(stats.outside[0].elems(), &[3, 4, 5, 6]);
    }

    #[test]
    fn d_matches_descending_scan() {
        // Brute-force re-count over centers in the opposite iteration order.
        let mut fam = star_family(9, 4, 2, 5);
        fam.push(KSubset::new(9, vec![1, 3, 4, 6]).unwrap());
        fam.push(KSubset::new(9, vec![1, 3, 4, 7]).unwrap());
        let stats = analyze_family(9, 4, &fam).unwrap();
        let mut best = 0usize;
        let mut center = (0, 0);
        for i in (1..=9u32).rev() {
            for j in (1..i).rev() {
                let c = fam.iter().filter(|m| m.contains(i) && m.contains(j)).count();
                if c >= best {
                    best = c;
                    center = (j, i);
                }
            }
        }
        assert_eq!(stats.d_value, best);
        assert_eq!(stats.best_center, center);
    }

    #[test]
    fn relabel_sends_center_to_top() {
        let mut fam = star_family(9, 4, 2, 5);
        fam.push(KSubset::new(9, vec![1, 3, 4, 6]).unwrap());
        let stats = analyze_family(9, 4, &fam).unwrap();
        assert_eq!(stats.best_center, (2, 5));
        assert_eq!(stats.relabel[2], 8);
        assert_eq!(stats.relabel[5], 9);
        // Every relabeled former star member contains {8, 9}.
        let star_members = stats
            .members
            .iter()
            .filter(|m| m.contains(8) && m.contains(9))
            .count();
        assert_eq!(star_members, stats.d_value);
        // Permutation is a bijection of [1,n].
        let mut seen: Vec<u32> = stats.relabel[1..].to_vec();
        seen.sort_unstable();
        assert_eq!(seen, (1..=9).collect::<Vec<_>>());
    }

    #[test]
    fn essential_of_pure_star_is_whole_family() {
        let fam = star_family(10, 4, 1, 2);
        let stats = analyze_family(10, 4, &fam).unwrap();
        let ess = essential_subfamily(&stats);
        assert_eq!(ess.len(), fam.len());
    }

    #[test]
    fn essential_with_single_outside_vertex() {
        // One outside vertex is forced to represent all its elements.
        let mut fam = star_family(10, 4, 1, 2);
        let extra = KSubset::new(10, vec![3, 4, 5, 6]).unwrap();
        fam.push(extra.clone());
        let stats = analyze_family(10, 4, &fam).unwrap();
        let ess = essential_subfamily(&stats);
        assert_eq!(ess.len(), fam.len()); // star + the one representative
        assert!(ess.contains(&extra));
        assert!(ess.len() <= fam.len());
    }

    #[test]
    fn star_blocks_single_anchor_count() {
        // n=12, r=4, one outside vertex u with anchor l ∈ u: the block for l
        // has binom(12−3−3, 1) = 6 members and the guaranteed bound is
        // binom(6,1) = 6, attained.
        let mut fam = star_family(12, 4, 11, 12);
        fam.push(KSubset::new(12, vec![1, 2, 3, 4]).unwrap());
        let stats = analyze_family(12, 4, &fam).unwrap();
        assert_eq!(stats.best_center, (11, 12));
        let blocks = star_blocks(&stats).unwrap();
        assert_eq!(blocks.anchors, vec![1, 2, 3, 4]);
        let bound0 = StarBlocks::block_lower_bound(12, 4, 1).to_usize().unwrap();
        assert_eq!(bound0, 6);
        assert_eq!(blocks.blocks[0].len(), 6);
        for (j, block) in blocks.blocks.iter().enumerate() {
            let bound = StarBlocks::block_lower_bound(12, 4, j + 1).to_usize().unwrap();
            assert!(block.len() >= bound, "block {j}: {} < {bound}", block.len());
        }
    }

    #[test]
    fn degenerate_block_bound_is_zero() {
        // When n−r−j−1 < r−3 the bound collapses to 0 by the convention.
        assert_eq!(StarBlocks::block_lower_bound(9, 4, 5).to_usize().unwrap(), 0);
    }

    #[test]
    fn star_blocks_rejects_r_below_4() {
        let mut fam = star_family(8, 3, 7, 8);
        fam.push(KSubset::new(8, vec![1, 2, 3]).unwrap());
        let stats = analyze_family(8, 3, &fam).unwrap();
        assert!(matches!(star_blocks(&stats), Err(Error::Unsupported(_))));
    }

    #[test]
    fn block_invariants_on_random_instance() {
        let fam = random_admissible_family(12, 4, 3, 0xfeed).unwrap();
        let stats = analyze_family(12, 4, &fam).unwrap();
        assert_eq!(stats.best_center, (11, 12));
        let blocks = star_blocks(&stats).unwrap();
        check_block_invariants(&stats, &blocks).unwrap();
    }

    #[test]
    fn block_bound_telescopes_to_binomial_difference() {
        // Σ_j binom(n−r−j−1, r−3) over j = 1..k equals
        // binom(n−r−1, r−2) − binom(n−r−1−k, r−2).
        for &(n, r) in &[(12i64, 4i64), (14, 5), (20, 6)] {
            for k in 0..=n {
                let mut sum = num_bigint::BigUint::from(0u32);
                for j in 1..=k {
                    sum += binomial(n - r - j - 1, r - 3);
                }
                let want = binomial(n - r - 1, r - 2) - binomial(n - r - 1 - k, r - 2);
                assert_eq!(sum, want, "n={n} r={r} k={k}");
            }
        }
    }

    #[test]
    fn json_field_names() {
        let fam = star_family(10, 4, 1, 2);
        let stats = analyze_family(10, 4, &fam).unwrap();
        let v = stats.to_json();
        assert_eq!(v["size"], 28);
        assert_eq!(v["d"], 28);
        assert_eq!(v["x"], 0);
        assert_eq!(v["iX"], 0);
        assert!(v["IX"].as_array().unwrap().is_empty());
        assert_eq!(v["center"][0], 1);
    }
}
