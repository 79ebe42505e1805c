//! Conflict graph between links and the schedule machinery built on it:
//! maximal-independent-set enumeration, greedy coloring with maximal
//! extension, schedule validity checks and the interference degree.
//!
//! Links are dense indices `0..K`. A set of links may transmit in the same
//! slot only if it is independent in this graph. All link sets handed out by
//! this module are sorted ascending and families of sets are sorted
//! lexicographically, so downstream tie-breaking is deterministic.

use thiserror::Error;

/// Exhaustive MIS enumeration is refused above this many links; larger
/// graphs must use the coloring-restricted, greedy or myopic policies.
pub const MIS_ENUMERATION_CAP: usize = 24;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph has {links} links, exceeding the enumeration cap of {cap}")]
    GraphTooLarge { links: usize, cap: usize },
    #[error("link index {0} out of range")]
    LinkOutOfRange(usize),
    #[error("self-loop on link {0}")]
    SelfLoop(usize),
    #[error("coloring order is not a permutation of 0..{0}")]
    InvalidOrder(usize),
    #[error("graph must have at least one link")]
    Empty,
}

/// Undirected conflict graph over links `0..K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterferenceGraph {
    link_count: usize,
    /// adjacency[l] holds the open neighborhood of l, sorted ascending.
    adjacency: Vec<Vec<usize>>,
}

impl InterferenceGraph {
    /// Builds a graph from an edge list. Edges are unordered pairs; duplicates
    /// collapse, self-loops are rejected.
    pub fn new(link_count: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        if link_count == 0 {
            return Err(GraphError::Empty);
        }
        let mut adjacency = vec![Vec::new(); link_count];
        for &(a, b) in edges {
            if a >= link_count {
                return Err(GraphError::LinkOutOfRange(a));
            }
            if b >= link_count {
                return Err(GraphError::LinkOutOfRange(b));
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            if !adjacency[a].contains(&b) {
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        Ok(Self { link_count, adjacency })
    }

    /// Complete conflict graph: every pair of links interferes, so exactly
    /// one link can transmit per slot.
    pub fn collocated(link_count: usize) -> Self {
        let mut edges = Vec::new();
        for a in 0..link_count {
            for b in (a + 1)..link_count {
                edges.push((a, b));
            }
        }
        Self::new(link_count, &edges).expect("collocated graph is always valid")
    }

    pub fn link_count(&self) -> usize {
        self.link_count
    }

    pub fn are_adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    pub fn degree(&self, l: usize) -> usize {
        self.adjacency[l].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.link_count).map(|l| self.degree(l)).max().unwrap_or(0)
    }

    pub fn neighbors(&self, l: usize) -> &[usize] {
        &self.adjacency[l]
    }

    /// Closed neighborhood: `{l}` plus every link adjacent to `l`.
    pub fn neighborhood(&self, l: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.adjacency[l].len() + 1);
        out.extend_from_slice(&self.adjacency[l]);
        out.push(l);
        out.sort_unstable();
        out
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        for (i, &a) in set.iter().enumerate() {
            for &b in &set[i + 1..] {
                if self.are_adjacent(a, b) {
                    return false;
                }
            }
        }
        true
    }

    /// A schedule is valid when it only contains nonempty links and no two
    /// of its members interfere.
    pub fn is_valid_schedule(&self, schedule: &[usize], nonempty: &[bool]) -> bool {
        if schedule.iter().any(|&l| l >= self.link_count || !nonempty[l]) {
            return false;
        }
        self.is_independent(schedule)
    }

    /// Enumerates every maximal independent set with the default cap.
    pub fn enumerate_mis(&self) -> Result<MaximalIndependentSetFamily, GraphError> {
        self.enumerate_mis_capped(MIS_ENUMERATION_CAP)
    }

    /// Enumerates every maximal independent set via Bron–Kerbosch with
    /// pivoting on the complement graph. Refuses graphs above `cap` links
    /// since the family can be exponential.
    pub fn enumerate_mis_capped(
        &self,
        cap: usize,
    ) -> Result<MaximalIndependentSetFamily, GraphError> {
        if self.link_count > cap {
            return Err(GraphError::GraphTooLarge { links: self.link_count, cap });
        }
        let k = self.link_count;
        let full: u64 = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
        // Non-neighbors in G are neighbors in the complement, where maximal
        // independent sets become maximal cliques.
        let mut comp: Vec<u64> = vec![0; k];
        for l in 0..k {
            let mut adj_mask = 1u64 << l;
            for &n in &self.adjacency[l] {
                adj_mask |= 1u64 << n;
            }
            comp[l] = full & !adj_mask;
        }
        let mut sets_masks = Vec::new();
        bron_kerbosch(&comp, 0, full, 0, &mut sets_masks);
        let mut sets: Vec<Vec<usize>> = sets_masks.iter().map(|&m| mask_to_vec(m)).collect();
        sets.sort_unstable();
        Ok(MaximalIndependentSetFamily { sets })
    }

    /// Greedy coloring along `order`, each color class then extended to a
    /// maximal independent set by adding the lowest-indexed compatible links.
    pub fn greedy_coloring(&self, order: &[usize]) -> Result<ColoringFamily, GraphError> {
        let k = self.link_count;
        let mut seen = vec![false; k];
        if order.len() != k {
            return Err(GraphError::InvalidOrder(k));
        }
        for &l in order {
            if l >= k || seen[l] {
                return Err(GraphError::InvalidOrder(k));
            }
            seen[l] = true;
        }
        let mut color = vec![usize::MAX; k];
        let mut color_count = 0usize;
        for &l in order {
            let mut used = vec![false; color_count + 1];
            for &n in &self.adjacency[l] {
                if color[n] != usize::MAX {
                    if color[n] < used.len() {
                        used[color[n]] = true;
                    }
                }
            }
            let c = (0..).find(|&c| c >= used.len() || !used[c]).unwrap();
            color[l] = c;
            color_count = color_count.max(c + 1);
        }
        let mut color_classes = vec![Vec::new(); color_count];
        for l in 0..k {
            color_classes[color[l]].push(l);
        }
        for class in &mut color_classes {
            class.sort_unstable();
        }
        let extended_sets = color_classes.iter().map(|c| self.extend_to_maximal(c)).collect();
        Ok(ColoringFamily { color_classes, extended_sets })
    }

    /// Default coloring order: descending degree, index ascending on ties.
    pub fn greedy_coloring_default(&self) -> ColoringFamily {
        let mut order: Vec<usize> = (0..self.link_count).collect();
        order.sort_by_key(|&l| (std::cmp::Reverse(self.degree(l)), l));
        self.greedy_coloring(&order).expect("generated order is a permutation")
    }

    /// Extends an independent set to a maximal one by scanning links in
    /// ascending index order.
    pub fn extend_to_maximal(&self, set: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = set.to_vec();
        for l in 0..self.link_count {
            if out.contains(&l) {
                continue;
            }
            if out.iter().all(|&m| !self.are_adjacent(l, m)) {
                out.push(l);
            }
        }
        out.sort_unstable();
        out
    }

    /// Interference degree: the largest number of mutually compatible links
    /// found inside any closed neighborhood.
    pub fn interference_degree(&self) -> usize {
        (0..self.link_count)
            .map(|l| {
                let hood = self.neighborhood(l);
                self.max_independent_size_within(&hood)
            })
            .max()
            .unwrap_or(1)
    }

    fn max_independent_size_within(&self, links: &[usize]) -> usize {
        fn recurse(g: &InterferenceGraph, remaining: &[usize]) -> usize {
            match remaining.split_first() {
                None => 0,
                Some((&first, rest)) => {
                    let skip = recurse(g, rest);
                    let compatible: Vec<usize> =
                        rest.iter().copied().filter(|&o| !g.are_adjacent(first, o)).collect();
                    let take = 1 + recurse(g, &compatible);
                    take.max(skip)
                }
            }
        }
        recurse(self, links)
    }
}

fn mask_to_vec(mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        let l = m.trailing_zeros() as usize;
        out.push(l);
        m &= m - 1;
    }
    out
}

/// Bron–Kerbosch with pivoting over bitmask sets. `adj` is the adjacency of
/// the graph whose maximal cliques are wanted (here: the complement).
fn bron_kerbosch(adj: &[u64], r: u64, p: u64, x: u64, out: &mut Vec<u64>) {
    if p == 0 && x == 0 {
        out.push(r);
        return;
    }
    // Pivot on the candidate covering the most of P.
    let pivot = {
        let mut best = usize::MAX;
        let mut best_cover = 0u32;
        let mut m = p | x;
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            let cover = (adj[v] & p).count_ones();
            if best == usize::MAX || cover > best_cover {
                best = v;
                best_cover = cover;
            }
            m &= m - 1;
        }
        best
    };
    let mut candidates = p & !adj[pivot];
    let mut p = p;
    let mut x = x;
    while candidates != 0 {
        let v = candidates.trailing_zeros() as usize;
        let v_bit = 1u64 << v;
        candidates &= candidates - 1;
        bron_kerbosch(adj, r | v_bit, p & adj[v], x & adj[v], out);
        p &= !v_bit;
        x |= v_bit;
    }
}

/// The complete family of maximal independent sets, canonically ordered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaximalIndependentSetFamily {
    sets: Vec<Vec<usize>>,
}

impl MaximalIndependentSetFamily {
    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn into_sets(self) -> Vec<Vec<usize>> {
        self.sets
    }
}

/// A proper coloring together with each class extended to a maximal
/// independent set; the extensions form a restricted schedule family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoringFamily {
    color_classes: Vec<Vec<usize>>,
    extended_sets: Vec<Vec<usize>>,
}

impl ColoringFamily {
    pub fn chromatic_count(&self) -> usize {
        self.color_classes.len()
    }

    pub fn color_classes(&self) -> &[Vec<usize>] {
        &self.color_classes
    }

    pub fn extended_sets(&self) -> &[Vec<usize>] {
        &self.extended_sets
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> InterferenceGraph {
        InterferenceGraph::new(3, &[(0, 1), (1, 2)]).unwrap()
    }

    /// Definition-level reference: filter all 2^K subsets for independence
    /// and maximality.
    fn brute_force_mis(g: &InterferenceGraph) -> Vec<Vec<usize>> {
        let k = g.link_count();
        let mut out = Vec::new();
        for mask in 0u64..(1 << k) {
            let set = mask_to_vec(mask);
            if !g.is_independent(&set) {
                continue;
            }
            let maximal = (0..k).all(|l| {
                set.contains(&l) || set.iter().any(|&m| g.are_adjacent(l, m))
            });
            if maximal {
                out.push(set);
            }
        }
        out.sort();
        out
    }

    #[test]
    fn mis_no_conflicts_single_set() {
        let g = InterferenceGraph::new(3, &[]).unwrap();
        let fam = g.enumerate_mis().unwrap();
        assert_eq!(fam.sets(), &[vec![0, 1, 2]]);
    }

    #[test]
    fn mis_path() {
        let fam = path3().enumerate_mis().unwrap();
        assert_eq!(fam.sets(), &[vec![0, 2], vec![1]]);
    }

    #[test]
    fn mis_collocated_singletons() {
        let g = InterferenceGraph::collocated(4);
        let fam = g.enumerate_mis().unwrap();
        assert_eq!(fam.sets(), &[vec![0], vec![1], vec![2], vec![3]]);
    }

    #[test]
    fn mis_cap_enforced() {
        let g = InterferenceGraph::new(5, &[]).unwrap();
        assert_eq!(
            g.enumerate_mis_capped(4),
            Err(GraphError::GraphTooLarge { links: 5, cap: 4 })
        );
    }

    #[test]
    fn mis_matches_brute_force_on_random_graphs() {
        // Deterministic LCG so this stays reproducible without an RNG dep here.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for k in 1..=8usize {
            for _ in 0..40 {
                let mut edges = Vec::new();
                for a in 0..k {
                    for b in (a + 1)..k {
                        if next() % 100 < 35 {
                            edges.push((a, b));
                        }
                    }
                }
                let g = InterferenceGraph::new(k, &edges).unwrap();
                let fam = g.enumerate_mis().unwrap();
                assert_eq!(fam.sets(), brute_force_mis(&g).as_slice());
            }
        }
    }

    #[test]
    fn neighborhood_is_closed() {
        let g = path3();
        assert_eq!(g.neighborhood(1), vec![0, 1, 2]);
        assert_eq!(g.neighborhood(0), vec![0, 1]);
        let iso = InterferenceGraph::new(2, &[]).unwrap();
        assert_eq!(iso.neighborhood(1), vec![1]);
    }

    #[test]
    fn coloring_path_natural_order() {
        let fam = path3().greedy_coloring(&[0, 1, 2]).unwrap();
        assert_eq!(fam.color_classes(), &[vec![0, 2], vec![1]]);
        assert_eq!(fam.extended_sets(), &[vec![0, 2], vec![1]]);
    }

    #[test]
    fn coloring_complete_graph_singletons() {
        let g = InterferenceGraph::collocated(3);
        let fam = g.greedy_coloring(&[0, 1, 2]).unwrap();
        assert_eq!(fam.chromatic_count(), 3);
        assert_eq!(fam.color_classes(), &[vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn coloring_star() {
        let g = InterferenceGraph::new(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let fam = g.greedy_coloring(&[0, 1, 2, 3, 4]).unwrap();
        assert_eq!(fam.color_classes(), &[vec![0], vec![1, 2, 3, 4]]);
        assert_eq!(fam.extended_sets()[0], vec![0]);
        assert_eq!(fam.extended_sets()[1], vec![1, 2, 3, 4]);
    }

    #[test]
    fn coloring_rejects_bad_order() {
        assert!(path3().greedy_coloring(&[0, 1, 1]).is_err());
        assert!(path3().greedy_coloring(&[0, 1]).is_err());
    }

    #[test]
    fn coloring_is_proper_and_extensions_maximal_on_random_graphs() {
        let mut state = 0xdeadbeefcafef00du64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for k in 1..=9usize {
            for _ in 0..30 {
                let mut edges = Vec::new();
                for a in 0..k {
                    for b in (a + 1)..k {
                        if next() % 100 < 40 {
                            edges.push((a, b));
                        }
                    }
                }
                let g = InterferenceGraph::new(k, &edges).unwrap();
                let fam = g.greedy_coloring_default();
                // Classes partition the links.
                let mut covered = vec![false; k];
                for class in fam.color_classes() {
                    assert!(g.is_independent(class));
                    for &l in class {
                        assert!(!covered[l]);
                        covered[l] = true;
                    }
                }
                assert!(covered.iter().all(|&c| c));
                assert!(fam.chromatic_count() <= g.max_degree() + 1);
                for (class, ext) in fam.color_classes().iter().zip(fam.extended_sets()) {
                    assert!(class.iter().all(|l| ext.contains(l)));
                    assert!(g.is_independent(ext));
                    // No link can still be added.
                    for l in 0..k {
                        if !ext.contains(&l) {
                            assert!(ext.iter().any(|&m| g.are_adjacent(l, m)));
                        }
                    }
                }
                // Covering condition: every maximal independent set is inside
                // the union of at most chi extended sets (one per color).
                let fam_all = g.enumerate_mis().unwrap();
                for mis in fam_all.sets() {
                    let mut remaining: Vec<usize> = mis.clone();
                    for ext in fam.extended_sets() {
                        remaining.retain(|l| !ext.contains(l));
                    }
                    assert!(remaining.is_empty());
                }
            }
        }
    }

    #[test]
    fn schedule_validity() {
        let g = path3();
        let all = [true, true, true];
        assert!(g.is_valid_schedule(&[0, 2], &all));
        assert!(!g.is_valid_schedule(&[0, 1], &all));
        assert!(!g.is_valid_schedule(&[0], &[false, true, false]));
    }

    #[test]
    fn interference_degree_examples() {
        assert_eq!(InterferenceGraph::collocated(4).interference_degree(), 1);
        let star = InterferenceGraph::new(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert_eq!(star.interference_degree(), 4);
        assert_eq!(path3().interference_degree(), 2);
    }
}
