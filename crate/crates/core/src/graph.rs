//! Bipartite graph of positive user-item interactions, plus ingestion,
//! degree statistics, and leave-one-out splitting.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Observed positive graph: `M` users, `N` items, sparse per-user adjacency.
///
/// Immutable after construction; safe to share across parallel workers.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteGraph {
    user_ids: Vec<String>,
    item_ids: Vec<String>,
    user_index: HashMap<String, u32>,
    item_index: HashMap<String, u32>,
    /// Per-user adjacency, each list sorted ascending, no duplicates.
    adjacency: Vec<Vec<u32>>,
    item_degrees: Vec<u32>,
    edge_count: usize,
}

impl BipartiteGraph {
    pub fn num_users(&self) -> usize {
        self.user_ids.len()
    }

    pub fn num_items(&self) -> usize {
        self.item_ids.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edge_count
    }

    pub fn user_id(&self, m: u32) -> &str {
        &self.user_ids[m as usize]
    }

    pub fn item_id(&self, n: u32) -> &str {
        &self.item_ids[n as usize]
    }

    pub fn user_ids(&self) -> &[String] {
        &self.user_ids
    }

    pub fn item_ids(&self) -> &[String] {
        &self.item_ids
    }

    pub fn user_index(&self, id: &str) -> Option<u32> {
        self.user_index.get(id).copied()
    }

    pub fn item_index(&self, id: &str) -> Option<u32> {
        self.item_index.get(id).copied()
    }

    /// Sorted items liked by user `m`.
    pub fn items_of(&self, m: u32) -> &[u32] {
        &self.adjacency[m as usize]
    }

    pub fn user_degree(&self, m: u32) -> u32 {
        self.adjacency[m as usize].len() as u32
    }

    pub fn item_degree(&self, n: u32) -> u32 {
        self.item_degrees[n as usize]
    }

    /// Membership query in O(log d_m).
    pub fn has_edge(&self, m: u32, n: u32) -> bool {
        self.adjacency[m as usize].binary_search(&n).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(m, items)| items.iter().map(move |&n| (m as u32, n)))
    }

    /// Per-item sorted lists of users, the transpose of the adjacency.
    pub fn item_adjacency(&self) -> Vec<Vec<u32>> {
        let mut t = vec![Vec::new(); self.num_items()];
        for (m, n) in self.edges() {
            t[n as usize].push(m);
        }
        t
    }

    /// Build a graph over explicit id spaces. Duplicate edges collapse;
    /// the duplicate count is returned alongside the graph.
    pub fn from_parts(
        user_ids: Vec<String>,
        item_ids: Vec<String>,
        edges: impl IntoIterator<Item = (u32, u32)>,
    ) -> Result<(Self, usize)> {
        let m_count = user_ids.len();
        let n_count = item_ids.len();
        let mut adjacency = vec![Vec::new(); m_count];
        for (m, n) in edges {
            if (m as usize) >= m_count || (n as usize) >= n_count {
                return Err(Error::Contract(format!(
                    "edge ({m}, {n}) out of bounds for {m_count} users, {n_count} items"
                )));
            }
            adjacency[m as usize].push(n);
        }
        let mut duplicates = 0;
        for list in &mut adjacency {
            list.sort_unstable();
            let before = list.len();
            list.dedup();
            duplicates += before - list.len();
        }
        let mut item_degrees = vec![0u32; n_count];
        let mut edge_count = 0;
        for list in &adjacency {
            edge_count += list.len();
            for &n in list {
                item_degrees[n as usize] += 1;
            }
        }
        let user_index = index_of(&user_ids)?;
        let item_index = index_of(&item_ids)?;
        Ok((
            BipartiteGraph {
                user_ids,
                item_ids,
                user_index,
                item_index,
                adjacency,
                item_degrees,
                edge_count,
            },
            duplicates,
        ))
    }

    /// Parse a line-oriented edge list: `<user-id> <item-id>` per line,
    /// `#` lines and blank lines ignored. Dense indices are assigned in
    /// first-appearance order. Returns the graph and the number of
    /// duplicate lines dropped.
    pub fn load_edges(reader: impl BufRead) -> Result<(Self, usize)> {
        let mut user_ids: Vec<String> = Vec::new();
        let mut item_ids: Vec<String> = Vec::new();
        let mut user_index: HashMap<String, u32> = HashMap::new();
        let mut item_index: HashMap<String, u32> = HashMap::new();
        let mut edges: Vec<(u32, u32)> = Vec::new();

        for (lineno, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io("<edge stream>", e))?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut tokens = trimmed.split_whitespace();
            let (user, item) = match (tokens.next(), tokens.next(), tokens.next()) {
                (Some(u), Some(i), None) => (u, i),
                _ => {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        content: trimmed.to_string(),
                    })
                }
            };
            let m = *user_index.entry(user.to_string()).or_insert_with(|| {
                user_ids.push(user.to_string());
                (user_ids.len() - 1) as u32
            });
            let n = *item_index.entry(item.to_string()).or_insert_with(|| {
                item_ids.push(item.to_string());
                (item_ids.len() - 1) as u32
            });
            edges.push((m, n));
        }
        Self::from_parts(user_ids, item_ids, edges)
    }

    /// Write the edge list. Edges are emitted in an order that makes
    /// first-appearance index assignment reproduce this graph on reload,
    /// whenever such an order exists (it always does for loaded graphs).
    pub fn write_edges(&self, mut w: impl Write) -> std::io::Result<()> {
        for (m, n) in self.emission_order() {
            writeln!(w, "{} {}", self.user_id(m), self.item_id(n))?;
        }
        Ok(())
    }

    /// Order edges so users first appear as 0,1,..,M-1 and items as
    /// 0,1,..,N-1. Falls back to plain sorted order when no such order
    /// exists (isolated vertices, or index assignments that no single
    /// input stream could have produced).
    fn emission_order(&self) -> Vec<(u32, u32)> {
        let m_count = self.num_users();
        let n_count = self.num_items();
        let item_adj = self.item_adjacency();
        let mut intro: Vec<(u32, u32)> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        let (mut mu, mut ni) = (0usize, 0usize);
        let mut ok = true;
        while mu < m_count || ni < n_count {
            // Introduce the next user via an already-introduced item.
            if mu < m_count && self.adjacency[mu].first().is_some_and(|&n| (n as usize) < ni) {
                let n = self.adjacency[mu][0];
                intro.push((mu as u32, n));
                seen.insert((mu as u32, n));
                mu += 1;
            } else if ni < n_count && item_adj[ni].first().is_some_and(|&m| (m as usize) < mu) {
                let m = item_adj[ni][0];
                intro.push((m, ni as u32));
                seen.insert((m, ni as u32));
                ni += 1;
            } else if mu < m_count && ni < n_count && self.has_edge(mu as u32, ni as u32) {
                intro.push((mu as u32, ni as u32));
                seen.insert((mu as u32, ni as u32));
                mu += 1;
                ni += 1;
            } else {
                ok = false;
                break;
            }
        }
        if !ok {
            return self.edges().collect();
        }
        let mut order = intro;
        order.extend(self.edges().filter(|e| !seen.contains(e)));
        order
    }

    /// Degree statistics and the mean-degree identity mu/N = nu/M.
    pub fn degree_stats(&self) -> DegreeStats {
        let user_degrees: Vec<u32> = self.adjacency.iter().map(|a| a.len() as u32).collect();
        let item_degrees = self.item_degrees.clone();
        let m = self.num_users();
        let n = self.num_items();
        let e = self.edge_count as f64;
        let mu = if m == 0 { 0.0 } else { e / m as f64 };
        let nu = if n == 0 { 0.0 } else { e / n as f64 };
        let d_max = item_degrees.iter().copied().max().unwrap_or(0);
        DegreeStats {
            user_histogram: log_binned(&user_degrees),
            item_histogram: log_binned(&item_degrees),
            user_degrees,
            item_degrees,
            mu,
            nu,
            d_max,
        }
    }

    /// Move one uniformly chosen edge per user of degree >= 2 into the
    /// test set. Users of degree <= 1 keep their edges and are listed in
    /// `excluded_users`. Deterministic given `seed`.
    pub fn leave_one_out_split(&self, seed: u64) -> SplitResult {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut test = Vec::new();
        let mut excluded_users = Vec::new();
        let mut train_edges = Vec::with_capacity(self.edge_count);
        for (m, items) in self.adjacency.iter().enumerate() {
            if items.len() < 2 {
                excluded_users.push(m as u32);
                train_edges.extend(items.iter().map(|&n| (m as u32, n)));
                continue;
            }
            let held = items[rng.random_range(0..items.len())];
            test.push((m as u32, held));
            train_edges.extend(items.iter().filter(|&&n| n != held).map(|&n| (m as u32, n)));
        }
        let (train, _) = BipartiteGraph::from_parts(
            self.user_ids.clone(),
            self.item_ids.clone(),
            train_edges,
        )
        .expect("split edges are in bounds");
        SplitResult {
            train,
            test,
            excluded_users,
        }
    }
}

fn index_of(ids: &[String]) -> Result<HashMap<String, u32>> {
    let mut map = HashMap::with_capacity(ids.len());
    for (i, id) in ids.iter().enumerate() {
        if map.insert(id.clone(), i as u32).is_some() {
            return Err(Error::Contract(format!("duplicate id {id:?}")));
        }
    }
    Ok(map)
}

/// A power-of-two degree bin `[lo, hi]` with its vertex count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegreeBin {
    pub lo: u32,
    pub hi: u32,
    pub count: usize,
}

/// Bins: degree 0 alone, then [1], [2,3], [4,7], ...
fn log_binned(degrees: &[u32]) -> Vec<DegreeBin> {
    let mut counts: HashMap<(u32, u32), usize> = HashMap::new();
    for &d in degrees {
        counts
            .entry(degree_bin_bounds(d))
            .and_modify(|c| *c += 1)
            .or_insert(1);
    }
    let mut bins: Vec<DegreeBin> = counts
        .into_iter()
        .map(|((lo, hi), count)| DegreeBin { lo, hi, count })
        .collect();
    bins.sort_by_key(|b| b.lo);
    bins
}

pub fn degree_bin_bounds(d: u32) -> (u32, u32) {
    if d == 0 {
        (0, 0)
    } else {
        let k = 31 - d.leading_zeros();
        (1 << k, (1 << (k + 1)) - 1)
    }
}

#[derive(Debug, Clone)]
pub struct DegreeStats {
    pub user_degrees: Vec<u32>,
    pub item_degrees: Vec<u32>,
    /// Mean user degree |E|/M.
    pub mu: f64,
    /// Mean item degree |E|/N.
    pub nu: f64,
    /// Maximum item degree.
    pub d_max: u32,
    pub user_histogram: Vec<DegreeBin>,
    pub item_histogram: Vec<DegreeBin>,
}

#[derive(Debug, Clone)]
pub struct SplitResult {
    pub train: BipartiteGraph,
    /// Held-out positive edges, at most one per user.
    pub test: Vec<(u32, u32)>,
    /// Users of degree < 2, kept intact in train.
    pub excluded_users: Vec<u32>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::io::Cursor;

    fn load(text: &str) -> Result<(BipartiteGraph, usize)> {
        BipartiteGraph::load_edges(Cursor::new(text))
    }

    #[test]
    fn load_basic() {
        let (g, dupes) = load("u1 i1\nu1 i2\nu2 i1\n").unwrap();
        assert_eq!(g.num_users(), 2);
        assert_eq!(g.num_items(), 2);
        assert_eq!(g.num_edges(), 3);
        assert_eq!(dupes, 0);
        assert!(g.has_edge(0, 0));
        assert!(g.has_edge(0, 1));
        assert!(g.has_edge(1, 0));
        assert!(!g.has_edge(1, 1));
    }

    #[test]
    fn load_dedupes() {
        let (g, dupes) = load("u1 i1\nu1 i1\n").unwrap();
        assert_eq!((g.num_users(), g.num_items(), g.num_edges()), (1, 1, 1));
        assert_eq!(dupes, 1);
    }

    #[test]
    fn load_arity_error() {
        let err = load("u1\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn load_empty_is_empty_graph() {
        let (g, _) = load("# only a comment\n\n").unwrap();
        assert_eq!((g.num_users(), g.num_items(), g.num_edges()), (0, 0, 0));
    }

    #[test]
    fn load_first_appearance_order() {
        let (g, _) = load("b x\na y\n").unwrap();
        assert_eq!(g.user_id(0), "b");
        assert_eq!(g.user_id(1), "a");
        assert_eq!(g.item_id(0), "x");
        assert_eq!(g.item_id(1), "y");
    }

    #[test]
    fn degree_stats_identity() {
        // 2 users, 3 items, 4 edges.
        let (g, _) = load("u1 i1\nu1 i2\nu2 i2\nu2 i3\n").unwrap();
        let s = g.degree_stats();
        assert_eq!(s.mu, 2.0);
        assert!((s.nu - 4.0 / 3.0).abs() < 1e-15);
        assert!((s.mu / 3.0 - s.nu / 2.0).abs() < 1e-12);
    }

    #[test]
    fn degree_stats_single_edge() {
        let (g, _) = load("u i\n").unwrap();
        let s = g.degree_stats();
        assert_eq!((s.mu, s.nu, s.d_max), (1.0, 1.0, 1));
    }

    #[test]
    fn degree_stats_empty() {
        let (g, _) = load("").unwrap();
        let s = g.degree_stats();
        assert_eq!((s.mu, s.nu), (0.0, 0.0));
    }

    #[test]
    fn log_bins() {
        assert_eq!(degree_bin_bounds(0), (0, 0));
        assert_eq!(degree_bin_bounds(1), (1, 1));
        assert_eq!(degree_bin_bounds(2), (2, 3));
        assert_eq!(degree_bin_bounds(3), (2, 3));
        assert_eq!(degree_bin_bounds(4), (4, 7));
        assert_eq!(degree_bin_bounds(1024), (1024, 2047));
    }

    #[test]
    fn split_degree_one_user_excluded() {
        let (g, _) = load("u1 i1\nu2 i1\nu2 i2\n").unwrap();
        let split = g.leave_one_out_split(7);
        assert_eq!(split.excluded_users, vec![0]);
        assert_eq!(split.test.len(), 1);
        assert_eq!(split.train.user_degree(0), 1);
        assert_eq!(split.train.user_degree(1), 1);
    }

    #[test]
    fn split_degree_five_user() {
        let (g, _) =
            load("u i1\nu i2\nu i3\nu i4\nu i5\n").unwrap();
        let split = g.leave_one_out_split(3);
        assert_eq!(split.train.user_degree(0), 4);
        assert_eq!(split.test.len(), 1);
        let (m, n) = split.test[0];
        assert!(g.has_edge(m, n));
        assert!(!split.train.has_edge(m, n));
    }

    #[test]
    fn split_deterministic() {
        let (g, _) = load("a x\na y\nb x\nb z\nc y\n").unwrap();
        let s1 = g.leave_one_out_split(42);
        let s2 = g.leave_one_out_split(42);
        assert_eq!(s1.test, s2.test);
        assert_eq!(s1.excluded_users, s2.excluded_users);
        assert_eq!(s1.train, s2.train);
    }

    fn arbitrary_edge_text() -> impl Strategy<Value = String> {
        proptest::collection::vec((0u32..50, 0u32..50), 1..200).prop_map(|pairs| {
            pairs
                .iter()
                .map(|(u, i)| format!("u{u} i{i}\n"))
                .collect::<String>()
        })
    }

    proptest! {
        #[test]
        fn roundtrip_through_edge_list(text in arbitrary_edge_text()) {
            let (g, _) = load(&text).unwrap();
            let mut buf = Vec::new();
            g.write_edges(&mut buf).unwrap();
            let (g2, dupes) = BipartiteGraph::load_edges(Cursor::new(buf)).unwrap();
            prop_assert_eq!(dupes, 0);
            prop_assert_eq!(&g, &g2);
        }

        #[test]
        fn mean_degree_identity(text in arbitrary_edge_text()) {
            let (g, _) = load(&text).unwrap();
            let s = g.degree_stats();
            let diff = s.mu / g.num_items() as f64 - s.nu / g.num_users() as f64;
            prop_assert!(diff.abs() < 1e-12);
        }

        #[test]
        fn split_partitions_edges(text in arbitrary_edge_text(), seed in 0u64..1000) {
            let (g, _) = load(&text).unwrap();
            let split = g.leave_one_out_split(seed);
            prop_assert_eq!(split.train.num_edges() + split.test.len(), g.num_edges());
            for (m, n) in split.train.edges() {
                prop_assert!(g.has_edge(m, n));
            }
            for &(m, n) in &split.test {
                prop_assert!(g.has_edge(m, n));
                prop_assert!(!split.train.has_edge(m, n));
                prop_assert!(split.train.user_degree(m) >= 1);
            }
        }
    }
}
