//! BPR matrix-factorization baseline with uniform and
//! popularity-proportional negative sampling.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;
use crate::model::{sigmoid, GaussianFactor, Posterior, FLAG_POINT_ESTIMATE};
use crate::tree::WeightedTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NegativeSampling {
    Uniform,
    Popularity,
}

impl NegativeSampling {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(NegativeSampling::Uniform),
            "popularity" => Ok(NegativeSampling::Popularity),
            other => Err(Error::Config(format!("unknown sampling mode: {other}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BprConfig {
    pub k: usize,
    pub learning_rate: f64,
    pub regularization: f64,
    /// Each epoch draws |edges| triples.
    pub epochs: usize,
    pub sampling: NegativeSampling,
    pub seed: u64,
    pub init_std: f64,
}

impl Default for BprConfig {
    fn default() -> Self {
        BprConfig {
            k: 20,
            learning_rate: 0.05,
            regularization: 0.01,
            epochs: 100,
            sampling: NegativeSampling::Uniform,
            seed: 0,
            init_std: 0.1,
        }
    }
}

impl BprConfig {
    // `!(x > 0)` is deliberate: it also rejects NaN.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("K must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::Config("learning_rate must be positive".into()));
        }
        if self.regularization < 0.0 {
            return Err(Error::Config("regularization must be non-negative".into()));
        }
        Ok(())
    }
}

/// Point-estimate factorization: row-major M x K and N x K vectors plus
/// per-item biases.
#[derive(Debug, Clone, PartialEq)]
pub struct BprModel {
    pub k: usize,
    pub user_ids: Vec<String>,
    pub item_ids: Vec<String>,
    pub user_vectors: Vec<f64>,
    pub item_vectors: Vec<f64>,
    pub item_bias: Vec<f64>,
}

impl BprModel {
    pub fn num_users(&self) -> usize {
        self.user_ids.len()
    }

    pub fn num_items(&self) -> usize {
        self.item_ids.len()
    }

    fn user(&self, m: u32) -> &[f64] {
        let m = m as usize;
        &self.user_vectors[m * self.k..(m + 1) * self.k]
    }

    fn item(&self, n: u32) -> &[f64] {
        let n = n as usize;
        &self.item_vectors[n * self.k..(n + 1) * self.k]
    }

    /// Store as a point-estimate posterior (infinite precisions) so the
    /// one text format covers both model families.
    pub fn to_posterior(&self) -> Posterior {
        let mut q = Posterior::new(
            self.user_ids.clone(),
            self.item_ids.clone(),
            self.k,
            true,
        );
        for m in 0..self.num_users() as u32 {
            for k in 0..self.k {
                q.set_user_factor(m, k, self.user(m)[k], f64::INFINITY);
            }
        }
        for n in 0..self.num_items() as u32 {
            for k in 0..self.k {
                q.set_item_factor(n, k, self.item(n)[k], f64::INFINITY);
            }
            q.set_item_bias(
                n,
                GaussianFactor {
                    mean: self.item_bias[n as usize],
                    precision: f64::INFINITY,
                },
            );
        }
        q
    }

    pub fn from_posterior(q: &Posterior) -> Self {
        let k = q.k;
        let mut model = BprModel {
            k,
            user_ids: q.user_ids().to_vec(),
            item_ids: q.item_ids().to_vec(),
            user_vectors: Vec::with_capacity(q.num_users() * k),
            item_vectors: Vec::with_capacity(q.num_items() * k),
            item_bias: Vec::with_capacity(q.num_items()),
        };
        for m in 0..q.num_users() as u32 {
            model.user_vectors.extend_from_slice(q.user_means(m));
        }
        for n in 0..q.num_items() as u32 {
            model.item_vectors.extend_from_slice(q.item_means(n));
            model.item_bias.push(q.item_bias(n).mean);
        }
        model
    }

    pub fn save(&self, w: &mut impl std::io::Write) -> std::io::Result<()> {
        self.to_posterior().save_with_flags(w, FLAG_POINT_ESTIMATE)
    }

    pub fn load(r: impl std::io::BufRead) -> Result<Self> {
        let (q, flags) = Posterior::load_with_flags(r)?;
        if flags & FLAG_POINT_ESTIMATE == 0 {
            return Err(Error::ModelFormat(
                "file does not hold a point-estimate model".into(),
            ));
        }
        Ok(BprModel::from_posterior(&q))
    }
}

/// u_m . v_n + b_n.
pub fn bpr_score(model: &BprModel, m: u32, n: u32) -> f64 {
    model
        .user(m)
        .iter()
        .zip(model.item(n))
        .map(|(&a, &b)| a * b)
        .sum::<f64>()
        + model.item_bias[n as usize]
}

fn init_model(graph: &BipartiteGraph, cfg: &BprConfig, rng: &mut ChaCha8Rng) -> BprModel {
    let gauss = |rng: &mut ChaCha8Rng| {
        let u1: f64 = rng.random::<f64>().max(1e-12);
        let u2: f64 = rng.random();
        cfg.init_std * (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    };
    let m = graph.num_users();
    let n = graph.num_items();
    BprModel {
        k: cfg.k,
        user_ids: graph.user_ids().to_vec(),
        item_ids: graph.item_ids().to_vec(),
        user_vectors: (0..m * cfg.k).map(|_| gauss(rng)).collect(),
        item_vectors: (0..n * cfg.k).map(|_| gauss(rng)).collect(),
        item_bias: vec![0.0; n],
    }
}

/// One SGD step on a triple (m, i, j): ascent on ln sigma(x_mi - x_mj)
/// with L2 shrinkage.
pub fn bpr_step(model: &mut BprModel, cfg: &BprConfig, m: u32, i: u32, j: u32) {
    let x = bpr_score(model, m, i) - bpr_score(model, m, j);
    let g = sigmoid(-x);
    let lr = cfg.learning_rate;
    let reg = cfg.regularization;
    let k = model.k;
    let (mu, iu, ju) = (m as usize * k, i as usize * k, j as usize * k);
    for d in 0..k {
        let u = model.user_vectors[mu + d];
        let vi = model.item_vectors[iu + d];
        let vj = model.item_vectors[ju + d];
        model.user_vectors[mu + d] += lr * (g * (vi - vj) - reg * u);
        model.item_vectors[iu + d] += lr * (g * u - reg * vi);
        model.item_vectors[ju + d] += lr * (-g * u - reg * vj);
    }
    model.item_bias[i as usize] += lr * (g - reg * model.item_bias[i as usize]);
    model.item_bias[j as usize] += lr * (-g - reg * model.item_bias[j as usize]);
}

/// Draw a negative item for user m: not liked in train, by the configured
/// scheme. Returns None when the user likes every item.
fn draw_negative(
    graph: &BipartiteGraph,
    tree: &mut WeightedTree,
    sampling: NegativeSampling,
    m: u32,
    rng: &mut ChaCha8Rng,
) -> Option<u32> {
    let n_items = graph.num_items() as u32;
    if graph.user_degree(m) as usize >= graph.num_items() {
        return None;
    }
    match sampling {
        NegativeSampling::Uniform => loop {
            let j = rng.random_range(0..n_items);
            if !graph.has_edge(m, j) {
                return Some(j);
            }
        },
        NegativeSampling::Popularity => {
            let liked = graph.items_of(m).to_vec();
            let saved: Vec<f64> = liked.iter().map(|&n| tree.weight(n as usize)).collect();
            for &n in &liked {
                tree.set_weight(n as usize, 0.0);
            }
            let drawn = tree.sample(rng).map(|n| n as u32);
            for (&n, &w) in liked.iter().zip(&saved) {
                tree.set_weight(n as usize, w);
            }
            drawn
        }
    }
}

/// SGD over |edges| * epochs triples; the positive edge is uniform over
/// the edge list. Deterministic given the seed.
pub fn bpr_train(graph: &BipartiteGraph, cfg: &BprConfig) -> Result<BprModel> {
    cfg.validate()?;
    if graph.num_edges() == 0 {
        return Err(Error::Config("cannot train BPR on an empty graph".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x0B9_0B90_B90B);
    let mut model = init_model(graph, cfg, &mut rng);
    let edges: Vec<(u32, u32)> = graph.edges().collect();
    let degrees: Vec<f64> = (0..graph.num_items() as u32)
        .map(|n| graph.item_degree(n) as f64)
        .collect();
    let mut tree = WeightedTree::new(&degrees);
    for _ in 0..cfg.epochs {
        for _ in 0..edges.len() {
            let (m, i) = edges[rng.random_range(0..edges.len())];
            if let Some(j) = draw_negative(graph, &mut tree, cfg.sampling, m, &mut rng) {
                bpr_step(&mut model, cfg, m, i, j);
            }
        }
    }
    Ok(model)
}
