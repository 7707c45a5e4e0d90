//! Configuration-model graph generation from prescribed degree
//! distributions: draw i.i.d. degrees, equalize the stub counts by
//! redrawing, then pair half-edges uniformly at random.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;
use crate::tree::WeightedTree;

#[derive(Debug, Clone, PartialEq)]
pub enum DegreeFamily {
    /// p(d) proportional to d^-exponent.
    PowerLaw { exponent: f64 },
    /// p(d) proportional to d^-exponent * exp(-d / cutoff).
    PowerLawWithCutoff { exponent: f64, cutoff: f64 },
    /// Explicit weights for degrees d_min, d_min+1, ...
    Empirical { weights: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistributionSpec {
    pub family: DegreeFamily,
    pub d_min: u32,
    pub d_max: u32,
}

impl DegreeDistributionSpec {
    pub fn validate(&self) -> Result<()> {
        if self.d_min == 0 || self.d_min > self.d_max {
            return Err(Error::Config(format!(
                "degree support [{}, {}] is empty or includes 0",
                self.d_min, self.d_max
            )));
        }
        match &self.family {
            DegreeFamily::PowerLaw { exponent } if *exponent <= 0.0 => Err(Error::Config(
                format!("power-law exponent must be positive, got {exponent}"),
            )),
            DegreeFamily::PowerLawWithCutoff { exponent, cutoff }
                if *exponent <= 0.0 || *cutoff <= 0.0 =>
            {
                Err(Error::Config(format!(
                    "power-law exponent and cutoff must be positive, got {exponent}, {cutoff}"
                )))
            }
            DegreeFamily::Empirical { weights } => {
                let span = (self.d_max - self.d_min + 1) as usize;
                if weights.len() != span {
                    return Err(Error::Config(format!(
                        "empirical histogram has {} weights but support spans {span} degrees",
                        weights.len()
                    )));
                }
                if weights.iter().any(|&w| w < 0.0) || weights.iter().sum::<f64>() <= 0.0 {
                    return Err(Error::Config("empirical weights must be nonnegative and normalizable".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Unnormalized probability weights over [d_min, d_max].
    pub fn weights(&self) -> Vec<f64> {
        (self.d_min..=self.d_max)
            .map(|d| match &self.family {
                DegreeFamily::PowerLaw { exponent } => (d as f64).powf(-exponent),
                DegreeFamily::PowerLawWithCutoff { exponent, cutoff } => {
                    (d as f64).powf(-exponent) * (-(d as f64) / cutoff).exp()
                }
                DegreeFamily::Empirical { weights } => weights[(d - self.d_min) as usize],
            })
            .collect()
    }
}

pub const DEFAULT_REDRAW_BUDGET: usize = 1_000_000;

/// Sample a bipartite graph with the given degree distributions. Draws all
/// degrees i.i.d.; while the stub sums differ, redraws one random user
/// degree and one random item degree; then joins half-edges uniformly and
/// collapses multi-edges.
pub fn generate_graph_from_degrees(
    user_spec: &DegreeDistributionSpec,
    item_spec: &DegreeDistributionSpec,
    num_users: usize,
    num_items: usize,
    seed: u64,
    redraw_budget: usize,
) -> Result<BipartiteGraph> {
    user_spec.validate()?;
    item_spec.validate()?;
    if num_users == 0 || num_items == 0 {
        return Err(Error::Config("M and N must both be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let user_tree = WeightedTree::new(&user_spec.weights());
    let item_tree = WeightedTree::new(&item_spec.weights());
    let draw = |tree: &WeightedTree, d_min: u32, rng: &mut ChaCha8Rng| -> u32 {
        d_min + tree.sample(rng).expect("validated spec has positive mass") as u32
    };

    let mut user_degrees: Vec<u32> = (0..num_users)
        .map(|_| draw(&user_tree, user_spec.d_min, &mut rng))
        .collect();
    let mut item_degrees: Vec<u32> = (0..num_items)
        .map(|_| draw(&item_tree, item_spec.d_min, &mut rng))
        .collect();

    let mut user_sum: u64 = user_degrees.iter().map(|&d| d as u64).sum();
    let mut item_sum: u64 = item_degrees.iter().map(|&d| d as u64).sum();
    let mut redraws = 0;
    while user_sum != item_sum {
        if redraws >= redraw_budget {
            return Err(Error::Generation(format!(
                "stub sums failed to equalize within {redraw_budget} redraws \
                 (users {user_sum}, items {item_sum})"
            )));
        }
        let m = rng.random_range(0..num_users);
        let n = rng.random_range(0..num_items);
        let du = draw(&user_tree, user_spec.d_min, &mut rng);
        let dv = draw(&item_tree, item_spec.d_min, &mut rng);
        user_sum = user_sum - user_degrees[m] as u64 + du as u64;
        item_sum = item_sum - item_degrees[n] as u64 + dv as u64;
        user_degrees[m] = du;
        item_degrees[n] = dv;
        redraws += 1;
    }

    let mut user_stubs: Vec<u32> = Vec::with_capacity(user_sum as usize);
    for (m, &d) in user_degrees.iter().enumerate() {
        user_stubs.extend(std::iter::repeat_n(m as u32, d as usize));
    }
    let mut item_stubs: Vec<u32> = Vec::with_capacity(item_sum as usize);
    for (n, &d) in item_degrees.iter().enumerate() {
        item_stubs.extend(std::iter::repeat_n(n as u32, d as usize));
    }
    item_stubs.shuffle(&mut rng);

    let user_ids = (0..num_users).map(|m| format!("u{m}")).collect();
    let item_ids = (0..num_items).map(|n| format!("i{n}")).collect();
    let edges = user_stubs.into_iter().zip(item_stubs);
    let (graph, _multi) = BipartiteGraph::from_parts(user_ids, item_ids, edges)?;
    Ok(graph)
}
