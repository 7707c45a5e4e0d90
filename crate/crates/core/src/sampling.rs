//! Sampling hidden graphs: popularity-adjusted item histogram with
//! weighted-tree draws without replacement.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, DegreeStats};
use crate::tree::WeightedTree;

/// Popularity-adjusted multinomial over items: pi_n = d_n^gamma, with the
/// exponent chosen so the most popular item gets weight r * d_max.
#[derive(Debug, Clone)]
pub struct ItemHistogram {
    pi: Vec<f64>,
    gamma: f64,
    r: f64,
    tree: WeightedTree,
}

impl ItemHistogram {
    /// gamma = 1 + log r / log d_max; pi_n = d_n^gamma (zero for d_n = 0).
    // `!(r > 0)` is deliberate: it also rejects NaN.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn build(stats: &DegreeStats, r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::Config(format!("rate parameter r must be positive, got {r}")));
        }
        let gamma = if r == 1.0 {
            1.0
        } else {
            if stats.d_max <= 1 {
                return Err(Error::Config(format!(
                    "cannot adjust histogram with r = {r}: maximum item degree is {} \
                     and log d_max = 0 makes the exponent undefined",
                    stats.d_max
                )));
            }
            1.0 + r.ln() / (stats.d_max as f64).ln()
        };
        let pi: Vec<f64> = stats
            .item_degrees
            .iter()
            // exp2/log2 keeps pi exact on power-of-two degrees (e.g. the
            // r = 1/2, d_max = 1024 -> pi_max = 512 identity).
            .map(|&d| if d == 0 { 0.0 } else { (gamma * (d as f64).log2()).exp2() })
            .collect();
        let tree = WeightedTree::new(&pi);
        Ok(ItemHistogram { pi, gamma, r, tree })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn rate(&self) -> f64 {
        self.r
    }

    pub fn weight(&self, n: u32) -> f64 {
        self.pi[n as usize]
    }

    pub fn weights(&self) -> &[f64] {
        &self.pi
    }

    pub fn num_items(&self) -> usize {
        self.pi.len()
    }

    /// Current tree leaf weights (equal to `weights()` between sessions).
    pub fn tree_weight(&self, n: u32) -> f64 {
        self.tree.weight(n as usize)
    }

    /// Draw up to `k` distinct items outside `exclude`, each with
    /// probability proportional to current weight. Excluded and drawn
    /// items are weight-zeroed during the session and restored on exit.
    pub fn draw_without_replacement(
        &mut self,
        k: usize,
        exclude: &[u32],
        rng: &mut impl Rng,
    ) -> Vec<u32> {
        let mut touched: Vec<(usize, f64)> = Vec::with_capacity(exclude.len() + k);
        for &n in exclude {
            let n = n as usize;
            let w = self.tree.weight(n);
            if w != 0.0 {
                touched.push((n, w));
                self.tree.set_weight(n, 0.0);
            }
        }
        let mut drawn = Vec::with_capacity(k);
        for _ in 0..k {
            match self.tree.sample(rng) {
                Some(n) => {
                    touched.push((n, self.tree.weight(n)));
                    self.tree.set_weight(n, 0.0);
                    drawn.push(n as u32);
                }
                None => break,
            }
        }
        for (n, w) in touched {
            self.tree.set_weight(n, w);
        }
        drawn
    }
}

/// One draw H from q(H): for each user, the observed positives plus the
/// sampled negative items (disjoint from the positives).
#[derive(Debug, Clone, PartialEq)]
pub struct HiddenGraphSample {
    /// Per-user sampled negatives, sorted ascending.
    negatives: Vec<Vec<u32>>,
    pub epoch: u64,
}

impl HiddenGraphSample {
    /// Assemble a sample from explicit per-user negative lists (each must
    /// be sorted ascending and disjoint from the user's positives).
    pub fn from_negatives(negatives: Vec<Vec<u32>>, epoch: u64) -> Self {
        debug_assert!(negatives.iter().all(|l| l.windows(2).all(|w| w[0] < w[1])));
        HiddenGraphSample { negatives, epoch }
    }

    pub fn negatives_of(&self, m: u32) -> &[u32] {
        &self.negatives[m as usize]
    }

    /// Edges of H for user `m` in ascending item order, each tagged with
    /// its observed label g.
    pub fn row(&self, graph: &BipartiteGraph, m: u32) -> Vec<(u32, bool)> {
        let pos = graph.items_of(m);
        let neg = self.negatives_of(m);
        let mut row = Vec::with_capacity(pos.len() + neg.len());
        let (mut i, mut j) = (0, 0);
        while i < pos.len() || j < neg.len() {
            if j >= neg.len() || (i < pos.len() && pos[i] < neg[j]) {
                row.push((pos[i], true));
                i += 1;
            } else {
                row.push((neg[j], false));
                j += 1;
            }
        }
        row
    }

    /// Transpose: per item, users connected in H (ascending) with labels.
    pub fn item_rows(&self, graph: &BipartiteGraph) -> Vec<Vec<(u32, bool)>> {
        let mut rows = vec![Vec::new(); graph.num_items()];
        for m in 0..graph.num_users() as u32 {
            for &(n, g) in &self.row(graph, m) {
                rows[n as usize].push((m, g));
            }
        }
        rows
    }
}

/// Stateless per-(seed, epoch, user) substream derivation (splitmix64).
fn substream(seed: u64, t: u64, m: u64) -> ChaCha8Rng {
    let mut x = seed
        .wrapping_mul(0x9e3779b97f4a7c15)
        .wrapping_add(t)
        .wrapping_mul(0xbf58476d1ce4e5b9)
        .wrapping_add(m);
    x ^= x >> 30;
    x = x.wrapping_mul(0xbf58476d1ce4e5b9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94d049bb133111eb);
    x ^= x >> 31;
    ChaCha8Rng::seed_from_u64(x)
}

/// Sample H: for each user of degree d_m, draw min(d_m, N - d_m) negatives
/// from the histogram, excluding the user's positives. Deterministic given
/// (seed, t) regardless of worker count.
pub fn sample_hidden_graph(
    graph: &BipartiteGraph,
    hist: &ItemHistogram,
    seed: u64,
    t: u64,
) -> HiddenGraphSample {
    let negatives: Vec<Vec<u32>> = (0..graph.num_users() as u32)
        .into_par_iter()
        .map_init(
            || hist.clone(),
            |hist, m| {
                let positives = graph.items_of(m);
                let k = positives
                    .len()
                    .min(graph.num_items() - positives.len());
                let mut rng = substream(seed, t, m as u64);
                let mut neg = hist.draw_without_replacement(k, positives, &mut rng);
                neg.sort_unstable();
                neg
            },
        )
        .collect();
    HiddenGraphSample { negatives, epoch: t }
}

/// Per-item ratio of observed positives to sampled negatives, aggregated
/// over samples. Items that never appear as negatives get +infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioEntry {
    pub item: u32,
    pub positives: usize,
    pub negatives: usize,
    pub ratio: f64,
}

pub fn positive_negative_ratio(
    graph: &BipartiteGraph,
    samples: &[HiddenGraphSample],
) -> Vec<RatioEntry> {
    assert!(!samples.is_empty(), "need at least one sample");
    let mut neg_counts = vec![0usize; graph.num_items()];
    for s in samples {
        for m in 0..graph.num_users() as u32 {
            for &n in s.negatives_of(m) {
                neg_counts[n as usize] += 1;
            }
        }
    }
    (0..graph.num_items() as u32)
        .map(|n| {
            let positives = graph.item_degree(n) as usize * samples.len();
            let negatives = neg_counts[n as usize];
            let ratio = if negatives == 0 {
                f64::INFINITY
            } else {
                positives as f64 / negatives as f64
            };
            RatioEntry {
                item: n,
                positives,
                negatives,
                ratio,
            }
        })
        .collect()
}
