//! Power-of-two-padded prefix-sum tree over nonnegative weights, giving
//! O(log N) weighted draws, weight zeroing, and restoration.

use rand::Rng;

#[derive(Debug, Clone)]
pub struct WeightedTree {
    n_leaves: usize,
    /// Leaf capacity, a power of two. `nodes` holds 2*size entries with
    /// the root at index 1; leaf i lives at size + i.
    size: usize,
    nodes: Vec<f64>,
}

impl WeightedTree {
    pub fn new(weights: &[f64]) -> Self {
        let n_leaves = weights.len();
        let size = n_leaves.next_power_of_two().max(1);
        let mut nodes = vec![0.0; 2 * size];
        nodes[size..size + n_leaves].copy_from_slice(weights);
        for i in (1..size).rev() {
            nodes[i] = nodes[2 * i] + nodes[2 * i + 1];
        }
        WeightedTree {
            n_leaves,
            size,
            nodes,
        }
    }

    pub fn len(&self) -> usize {
        self.n_leaves
    }

    pub fn is_empty(&self) -> bool {
        self.n_leaves == 0
    }

    pub fn total(&self) -> f64 {
        if self.size >= 1 && self.nodes.len() > 1 {
            self.nodes[1]
        } else {
            0.0
        }
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.nodes[self.size + i]
    }

    pub fn set_weight(&mut self, i: usize, w: f64) {
        debug_assert!(w >= 0.0);
        let mut node = self.size + i;
        self.nodes[node] = w;
        while node > 1 {
            node /= 2;
            self.nodes[node] = self.nodes[2 * node] + self.nodes[2 * node + 1];
        }
    }

    /// Draw a leaf with probability proportional to its weight, or `None`
    /// when the total weight is not positive.
    // `!(total > 0)` is deliberate: it also rejects NaN totals.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn sample(&self, rng: &mut impl Rng) -> Option<usize> {
        let total = self.total();
        if !(total > 0.0) {
            return None;
        }
        let mut u = rng.random::<f64>() * total;
        let mut node = 1;
        while node < self.size {
            let left = 2 * node;
            if u < self.nodes[left] {
                node = left;
            } else {
                u -= self.nodes[left];
                node = left + 1;
            }
        }
        let leaf = node - self.size;
        if leaf < self.n_leaves && self.nodes[node] > 0.0 {
            return Some(leaf);
        }
        // Rounding pushed the descent onto a zero leaf; fall back to the
        // first positive weight.
        (0..self.n_leaves).find(|&i| self.weight(i) > 0.0)
    }
}
