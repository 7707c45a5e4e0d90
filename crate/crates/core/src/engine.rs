//! Stochastic variational Bayes over sampled hidden graphs: natural
//! gradients per vertex, step-size blending in natural-parameter space,
//! refactorization back to diagonal factors, hyperparameter updates, and
//! the block-partitioned message interface.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;
use crate::model::{
    elbo, lambda_xi, optimal_xi, GammaFactor, GaussianFactor, HyperPriors, Posterior,
};
use crate::sampling::{sample_hidden_graph, HiddenGraphSample, ItemHistogram};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub k: usize,
    pub hyper: HyperPriors,
    /// Sampling rate parameter for the item histogram.
    pub r: f64,
    pub t_max: usize,
    /// Warm-up iterations with step size pinned at 1.
    pub t_eps: usize,
    /// Hyperparameters update only after this iteration.
    pub t_tau: usize,
    /// Partial-update block size; `None` solves all K coordinates at once.
    pub kappa: Option<usize>,
    pub clamp_user_bias: bool,
    pub seed: u64,
    /// Item blocks for the in-process distributed simulation.
    pub block_count: usize,
    pub schedule_exponent: f64,
    pub init_std: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            k: 20,
            hyper: HyperPriors {
                alpha: 0.01,
                beta: 0.01,
            },
            r: 0.5,
            t_max: 100,
            t_eps: 10,
            t_tau: 3,
            kappa: None,
            clamp_user_bias: true,
            seed: 0,
            block_count: 1,
            schedule_exponent: 0.6,
            init_std: 0.1,
        }
    }
}

impl TrainConfig {
    // `!(x > 0)` is deliberate: it also rejects NaN.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("K must be at least 1".into()));
        }
        if let Some(kappa) = self.kappa {
            if kappa == 0 || kappa > self.k {
                return Err(Error::Config(format!(
                    "kappa must lie in 1..=K, got {kappa} with K = {}",
                    self.k
                )));
            }
        }
        if self.block_count == 0 {
            return Err(Error::Config("block_count must be at least 1".into()));
        }
        if !(self.r > 0.0) {
            return Err(Error::Config(format!("r must be positive, got {}", self.r)));
        }
        if !(self.schedule_exponent > 0.0) {
            return Err(Error::Config("schedule exponent must be positive".into()));
        }
        HyperPriors::new(self.hyper.alpha, self.hyper.beta)?;
        Ok(())
    }
}

/// Robbins-Monro style step sizes: eps = 1 through the warm-up, then
/// eps_t = 1/a with a <- (1 - Delta^-0.6) a + 1, Delta = t - t_eps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSchedule {
    pub accumulator: f64,
    pub eps: f64,
    pub exponent: f64,
}

impl StepSchedule {
    pub fn new(exponent: f64) -> Self {
        StepSchedule {
            accumulator: 0.0,
            eps: 1.0,
            exponent,
        }
    }

    /// Advance past iteration `t`. Leaves eps = 1 until t exceeds t_eps.
    pub fn advance(&mut self, t: usize, t_eps: usize) {
        if t <= t_eps {
            self.eps = 1.0;
            return;
        }
        let delta = (t - t_eps) as f64;
        self.accumulator = (1.0 - delta.powf(-self.exponent)) * self.accumulator + 1.0;
        self.eps = 1.0 / self.accumulator;
    }
}

/// Blended natural parameters (precision, mean-times-precision) for one
/// vertex's vector factor.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexState {
    pub precision: DMatrix<f64>,
    pub mean_times_precision: DVector<f64>,
}

/// Per-vertex blending substrate across iterations.
#[derive(Debug, Clone, PartialEq)]
pub struct NaturalGradientState {
    pub users: Vec<VertexState>,
    pub items: Vec<VertexState>,
    /// Scalar (precision, mean-times-precision) pairs.
    pub user_bias: Vec<(f64, f64)>,
    pub item_bias: Vec<(f64, f64)>,
}

impl NaturalGradientState {
    /// Seed the substrate with the current diagonal precisions.
    pub fn from_posterior(q: &Posterior) -> Self {
        let k = q.k;
        let vertex = |means: &[f64], precisions: &[f64]| VertexState {
            precision: DMatrix::from_diagonal(&DVector::from_column_slice(precisions)),
            mean_times_precision: DVector::from_iterator(
                k,
                means.iter().zip(precisions).map(|(&e, &p)| e * p),
            ),
        };
        let bias = |f: GaussianFactor| {
            if f.is_clamped() {
                (1.0, 0.0)
            } else {
                (f.precision, f.mean * f.precision)
            }
        };
        NaturalGradientState {
            users: (0..q.num_users() as u32)
                .map(|m| vertex(q.user_means(m), q.user_precisions(m)))
                .collect(),
            items: (0..q.num_items() as u32)
                .map(|n| vertex(q.item_means(n), q.item_precisions(n)))
                .collect(),
            user_bias: (0..q.num_users() as u32).map(|m| bias(q.user_bias(m))).collect(),
            item_bias: (0..q.num_items() as u32).map(|n| bias(q.item_bias(n))).collect(),
        }
    }
}

/// E_q[v v^T] = eta eta^T + diag(1/omega), accumulated into `acc` with
/// coefficient `c`.
fn add_scaled_outer(acc: &mut DMatrix<f64>, c: f64, means: &[f64], precisions: &[f64]) {
    let k = means.len();
    for i in 0..k {
        for j in 0..k {
            acc[(i, j)] += c * means[i] * means[j];
        }
        acc[(i, i)] += c / precisions[i];
    }
}

/// Natural gradient of a user's vector factor from one H row:
/// P = sum 2 lambda(xi) E[v v^T] + E[tau_u] I,
/// z = sum (g - 1/2 - 2 lambda(xi) E[b_m + b_n]) E[v].
pub fn user_natural_gradient(
    q: &Posterior,
    m: u32,
    row: &[(u32, bool)],
) -> (DMatrix<f64>, DVector<f64>) {
    let k = q.k;
    let mut p = DMatrix::zeros(k, k);
    let mut z = DVector::zeros(k);
    let b_m = q.user_bias(m).mean;
    for &(n, g) in row {
        let xi = optimal_xi(q.moments(m, n));
        let two_lambda = 2.0 * lambda_xi(xi);
        add_scaled_outer(&mut p, two_lambda, q.item_means(n), q.item_precisions(n));
        let coeff = (if g { 1.0 } else { 0.0 }) - 0.5 - two_lambda * (b_m + q.item_bias(n).mean);
        for (zi, &vn) in z.iter_mut().zip(q.item_means(n)) {
            *zi += coeff * vn;
        }
    }
    let e_tau = q.tau_u.mean();
    for i in 0..k {
        p[(i, i)] += e_tau;
    }
    (p, z)
}

/// Mirror of `user_natural_gradient` for an item's vector factor.
pub fn item_natural_gradient(
    q: &Posterior,
    n: u32,
    row: &[(u32, bool)],
) -> (DMatrix<f64>, DVector<f64>) {
    let k = q.k;
    let mut p = DMatrix::zeros(k, k);
    let mut z = DVector::zeros(k);
    let b_n = q.item_bias(n).mean;
    for &(m, g) in row {
        let xi = optimal_xi(q.moments(m, n));
        let two_lambda = 2.0 * lambda_xi(xi);
        add_scaled_outer(&mut p, two_lambda, q.user_means(m), q.user_precisions(m));
        let coeff = (if g { 1.0 } else { 0.0 }) - 0.5 - two_lambda * (q.user_bias(m).mean + b_n);
        for (zi, &um) in z.iter_mut().zip(q.user_means(m)) {
            *zi += coeff * um;
        }
    }
    let e_tau = q.tau_v.mean();
    for i in 0..k {
        p[(i, i)] += e_tau;
    }
    (p, z)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BiasSide {
    User,
    Item,
}

/// Scalar natural gradient for a bias factor:
/// P = sum 2 lambda(xi) + E[tau_b], z = sum (g - 1/2 - 2 lambda(xi) E[u^T v + b_other]).
pub fn bias_natural_gradient(
    q: &Posterior,
    side: BiasSide,
    vertex: u32,
    row: &[(u32, bool)],
) -> (f64, f64) {
    let mut p = 0.0;
    let mut z = 0.0;
    for &(other, g) in row {
        let (m, n) = match side {
            BiasSide::User => (vertex, other),
            BiasSide::Item => (other, vertex),
        };
        let xi = optimal_xi(q.moments(m, n));
        let two_lambda = 2.0 * lambda_xi(xi);
        let dot: f64 = q
            .user_means(m)
            .iter()
            .zip(q.item_means(n))
            .map(|(&a, &b)| a * b)
            .sum();
        let b_other = match side {
            BiasSide::User => q.item_bias(n).mean,
            BiasSide::Item => q.user_bias(m).mean,
        };
        p += two_lambda;
        z += (if g { 1.0 } else { 0.0 }) - 0.5 - two_lambda * (dot + b_other);
    }
    let e_tau = match side {
        BiasSide::User => q.tau_bu.mean(),
        BiasSide::Item => q.tau_bv.mean(),
    };
    (p + e_tau, z)
}

/// Convex combination of natural parameters.
pub fn blend(
    new: (&DMatrix<f64>, &DVector<f64>),
    old: (&DMatrix<f64>, &DVector<f64>),
    eps: f64,
) -> (DMatrix<f64>, DVector<f64>) {
    debug_assert!(eps > 0.0 && eps <= 1.0);
    (
        new.0 * eps + old.0 * (1.0 - eps),
        new.1 * eps + old.1 * (1.0 - eps),
    )
}

pub fn blend_scalar(new: (f64, f64), old: (f64, f64), eps: f64) -> (f64, f64) {
    (
        eps * new.0 + (1.0 - eps) * old.0,
        eps * new.1 + (1.0 - eps) * old.1,
    )
}

fn smallest_eigenvalue(p: &DMatrix<f64>) -> f64 {
    p.clone()
        .symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// Solve mu = P^-1 z and project back to diagonal factors: eta_k = mu_k,
/// omega_k = P_kk.
pub fn refactorize(
    q: &mut Posterior,
    side: BiasSide,
    vertex: u32,
    state: &VertexState,
) -> Result<()> {
    let chol = state.precision.clone().cholesky().ok_or(Error::Numerical {
        vertex: vertex as usize,
        iteration: 0,
        pivot: smallest_eigenvalue(&state.precision),
    })?;
    let mu = chol.solve(&state.mean_times_precision);
    for k in 0..q.k {
        let (mean, precision) = (mu[k], state.precision[(k, k)]);
        match side {
            BiasSide::User => q.set_user_factor(vertex, k, mean, precision),
            BiasSide::Item => q.set_item_factor(vertex, k, mean, precision),
        }
    }
    Ok(())
}

/// Solve only `subset` coordinates, holding the rest at their current
/// means: P_SS mu_S = z_S - P_{S,~S} eta_{~S}.
pub fn partial_refactorize(
    q: &mut Posterior,
    side: BiasSide,
    vertex: u32,
    state: &VertexState,
    subset: &[usize],
) -> Result<()> {
    let k = q.k;
    let s = subset.len();
    let current_means: Vec<f64> = match side {
        BiasSide::User => q.user_means(vertex).to_vec(),
        BiasSide::Item => q.item_means(vertex).to_vec(),
    };
    let in_subset: Vec<bool> = {
        let mut v = vec![false; k];
        for &i in subset {
            v[i] = true;
        }
        v
    };
    let mut p_ss = DMatrix::zeros(s, s);
    let mut rhs = DVector::zeros(s);
    for (a, &i) in subset.iter().enumerate() {
        let mut r = state.mean_times_precision[i];
        for j in 0..k {
            if in_subset[j] {
                continue;
            }
            r -= state.precision[(i, j)] * current_means[j];
        }
        rhs[a] = r;
        for (b, &j) in subset.iter().enumerate() {
            p_ss[(a, b)] = state.precision[(i, j)];
        }
    }
    let chol = p_ss.clone().cholesky().ok_or(Error::Numerical {
        vertex: vertex as usize,
        iteration: 0,
        pivot: smallest_eigenvalue(&p_ss),
    })?;
    let mu_s = chol.solve(&rhs);
    for (a, &i) in subset.iter().enumerate() {
        let (mean, precision) = (mu_s[a], state.precision[(i, i)]);
        match side {
            BiasSide::User => q.set_user_factor(vertex, i, mean, precision),
            BiasSide::Item => q.set_item_factor(vertex, i, mean, precision),
        }
    }
    Ok(())
}

fn refactorize_with_kappa(
    q: &mut Posterior,
    side: BiasSide,
    vertex: u32,
    state: &VertexState,
    kappa: Option<usize>,
) -> Result<()> {
    match kappa {
        None => refactorize(q, side, vertex, state),
        Some(kappa) if kappa >= q.k => refactorize(q, side, vertex, state),
        Some(kappa) => {
            let coords: Vec<usize> = (0..q.k).collect();
            for chunk in coords.chunks(kappa) {
                partial_refactorize(q, side, vertex, state, chunk)?;
            }
            Ok(())
        }
    }
}

/// Gamma updates: shape = alpha + (count)/2, rate = beta + sum of second
/// moments / 2. Clamped user biases keep the prior for tau_bu.
pub fn update_hyperparameters(q: &Posterior, hyper: &HyperPriors) -> [GammaFactor; 4] {
    let m = q.num_users();
    let n = q.num_items();
    let sum_user: f64 = (0..m as u32).map(|i| q.expected_user_norm(i)).sum();
    let sum_item: f64 = (0..n as u32).map(|i| q.expected_item_norm(i)).sum();
    let tau_u = GammaFactor::new(
        hyper.alpha + (q.k * m) as f64 / 2.0,
        hyper.beta + 0.5 * sum_user,
    );
    let tau_v = GammaFactor::new(
        hyper.alpha + (q.k * n) as f64 / 2.0,
        hyper.beta + 0.5 * sum_item,
    );
    let tau_bu = if q.user_bias_clamped {
        GammaFactor::new(hyper.alpha, hyper.beta)
    } else {
        let sum: f64 = (0..m as u32)
            .map(|i| {
                let f = q.user_bias(i);
                f.mean * f.mean + f.variance()
            })
            .sum();
        GammaFactor::new(hyper.alpha + m as f64 / 2.0, hyper.beta + 0.5 * sum)
    };
    let sum_bv: f64 = (0..n as u32)
        .map(|i| {
            let f = q.item_bias(i);
            f.mean * f.mean + f.variance()
        })
        .sum();
    let tau_bv = GammaFactor::new(hyper.alpha + n as f64 / 2.0, hyper.beta + 0.5 * sum_bv);
    [tau_u, tau_v, tau_bu, tau_bv]
}

/// One item block's partial natural gradients for every user.
#[derive(Debug, Clone)]
pub struct NaturalGradientMessage {
    pub block: usize,
    /// Item index range [start, end) this block covers.
    pub items: std::ops::Range<u32>,
    pub precisions: Vec<DMatrix<f64>>,
    pub mean_times_precisions: Vec<DVector<f64>>,
}

/// Contiguous item partition into `count` blocks.
pub fn contiguous_partition(num_items: usize, count: usize) -> Vec<std::ops::Range<u32>> {
    let count = count.max(1);
    (0..count)
        .map(|b| {
            let start = (num_items * b / count) as u32;
            let end = (num_items * (b + 1) / count) as u32;
            start..end
        })
        .collect()
}

/// Per-block partial sums of the user natural gradients; summing over
/// blocks (in block order) and adding E[tau_u] I reproduces the full
/// gradient.
pub fn block_messages(
    graph: &BipartiteGraph,
    hidden: &HiddenGraphSample,
    q: &Posterior,
    partition: &[std::ops::Range<u32>],
) -> Vec<NaturalGradientMessage> {
    partition
        .iter()
        .enumerate()
        .map(|(b, range)| {
            let k = q.k;
            let per_user: Vec<(DMatrix<f64>, DVector<f64>)> = (0..graph.num_users() as u32)
                .into_par_iter()
                .map(|m| {
                    let mut p = DMatrix::zeros(k, k);
                    let mut z = DVector::zeros(k);
                    let b_m = q.user_bias(m).mean;
                    for (n, g) in hidden.row(graph, m) {
                        if n < range.start || n >= range.end {
                            continue;
                        }
                        let xi = optimal_xi(q.moments(m, n));
                        let two_lambda = 2.0 * lambda_xi(xi);
                        add_scaled_outer(&mut p, two_lambda, q.item_means(n), q.item_precisions(n));
                        let coeff = (if g { 1.0 } else { 0.0 })
                            - 0.5
                            - two_lambda * (b_m + q.item_bias(n).mean);
                        for (zi, &vn) in z.iter_mut().zip(q.item_means(n)) {
                            *zi += coeff * vn;
                        }
                    }
                    (p, z)
                })
                .collect();
            let (precisions, mean_times_precisions) = per_user.into_iter().unzip();
            NaturalGradientMessage {
                block: b,
                items: range.clone(),
                precisions,
                mean_times_precisions,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub t: usize,
    pub eps: f64,
    pub elbo: f64,
    pub e_tau_u: f64,
    pub e_tau_v: f64,
    pub e_tau_bu: f64,
    pub e_tau_bv: f64,
}

pub struct TrainOutput {
    pub posterior: Posterior,
    pub log: Vec<IterationRecord>,
}

fn init_rng(seed: u64) -> ChaCha8Rng {
    // Distinct stream from the hidden-graph sampler.
    ChaCha8Rng::seed_from_u64(seed ^ 0xA5A5_5A5A_1234_5678)
}

/// Randomly initialized posterior: vector means N(0, init_std^2),
/// precisions at the hyperprior mean, biases at (0, 1).
pub fn initialize_posterior(graph: &BipartiteGraph, cfg: &TrainConfig) -> Posterior {
    let mut q = Posterior::new(
        graph.user_ids().to_vec(),
        graph.item_ids().to_vec(),
        cfg.k,
        cfg.clamp_user_bias,
    );
    let mut rng = init_rng(cfg.seed);
    let prec = cfg.hyper.alpha / cfg.hyper.beta;
    let gauss = |rng: &mut ChaCha8Rng| {
        let u1: f64 = rng.random::<f64>().max(1e-12);
        let u2: f64 = rng.random();
        cfg.init_std * (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    };
    for m in 0..graph.num_users() as u32 {
        for k in 0..cfg.k {
            let mean = gauss(&mut rng);
            q.set_user_factor(m, k, mean, prec);
        }
    }
    for n in 0..graph.num_items() as u32 {
        for k in 0..cfg.k {
            let mean = gauss(&mut rng);
            q.set_item_factor(n, k, mean, prec);
        }
    }
    q
}

/// One full pass of the four per-vertex update loops at step size `eps`,
/// in the fixed order: user biases, item biases, user vectors, item
/// vectors. `iteration` is only used in error diagnostics.
#[allow(clippy::too_many_arguments)]
fn sweep(
    graph: &BipartiteGraph,
    hidden: &HiddenGraphSample,
    q: &mut Posterior,
    state: &mut NaturalGradientState,
    eps: f64,
    kappa: Option<usize>,
    block_partition: Option<&[std::ops::Range<u32>]>,
    iteration: usize,
) -> Result<()> {
    let item_rows = hidden.item_rows(graph);

    // User biases.
    if !q.user_bias_clamped {
        let grads: Vec<(f64, f64)> = (0..graph.num_users() as u32)
            .into_par_iter()
            .map(|m| bias_natural_gradient(q, BiasSide::User, m, &hidden.row(graph, m)))
            .collect();
        for (m, grad) in grads.into_iter().enumerate() {
            let blended = blend_scalar(grad, state.user_bias[m], eps);
            state.user_bias[m] = blended;
            q.set_user_bias(m as u32, GaussianFactor::new(blended.1 / blended.0, blended.0));
        }
    }

    // Item biases.
    let grads: Vec<(f64, f64)> = (0..graph.num_items() as u32)
        .into_par_iter()
        .map(|n| bias_natural_gradient(q, BiasSide::Item, n, &item_rows[n as usize]))
        .collect();
    for (n, grad) in grads.into_iter().enumerate() {
        let blended = blend_scalar(grad, state.item_bias[n], eps);
        state.item_bias[n] = blended;
        q.set_item_bias(n as u32, GaussianFactor::new(blended.1 / blended.0, blended.0));
    }

    // User vectors, optionally assembled from block messages.
    let grads: Vec<(DMatrix<f64>, DVector<f64>)> = match block_partition {
        Some(partition) if partition.len() > 1 => {
            let messages = block_messages(graph, hidden, q, partition);
            (0..graph.num_users())
                .map(|m| {
                    let k = q.k;
                    let mut p = DMatrix::zeros(k, k);
                    let mut z = DVector::zeros(k);
                    for msg in &messages {
                        p += &msg.precisions[m];
                        z += &msg.mean_times_precisions[m];
                    }
                    let e_tau = q.tau_u.mean();
                    for i in 0..k {
                        p[(i, i)] += e_tau;
                    }
                    (p, z)
                })
                .collect()
        }
        _ => (0..graph.num_users() as u32)
            .into_par_iter()
            .map(|m| user_natural_gradient(q, m, &hidden.row(graph, m)))
            .collect(),
    };
    for (m, (p, z)) in grads.into_iter().enumerate() {
        let (p, z) = blend((&p, &z), (&state.users[m].precision, &state.users[m].mean_times_precision), eps);
        state.users[m] = VertexState {
            precision: p,
            mean_times_precision: z,
        };
        refactorize_with_kappa(q, BiasSide::User, m as u32, &state.users[m], kappa).map_err(
            |e| match e {
                Error::Numerical { vertex, pivot, .. } => Error::Numerical {
                    vertex,
                    iteration,
                    pivot,
                },
                other => other,
            },
        )?;
    }

    // Item vectors.
    let grads: Vec<(DMatrix<f64>, DVector<f64>)> = (0..graph.num_items() as u32)
        .into_par_iter()
        .map(|n| item_natural_gradient(q, n, &item_rows[n as usize]))
        .collect();
    for (n, (p, z)) in grads.into_iter().enumerate() {
        let (p, z) = blend((&p, &z), (&state.items[n].precision, &state.items[n].mean_times_precision), eps);
        state.items[n] = VertexState {
            precision: p,
            mean_times_precision: z,
        };
        refactorize_with_kappa(q, BiasSide::Item, n as u32, &state.items[n], kappa).map_err(
            |e| match e {
                Error::Numerical { vertex, pivot, .. } => Error::Numerical {
                    vertex,
                    iteration,
                    pivot,
                },
                other => other,
            },
        )?;
    }
    Ok(())
}

/// One coordinate-ascent pass over a fixed hidden graph at eps = 1 with
/// hyperparameters frozen. Exposed for bound-monotonicity checks.
pub fn coordinate_sweep(
    graph: &BipartiteGraph,
    hidden: &HiddenGraphSample,
    q: &mut Posterior,
) -> Result<()> {
    let mut state = NaturalGradientState::from_posterior(q);
    sweep(graph, hidden, q, &mut state, 1.0, None, None, 0)
}

/// The full training loop: per iteration, sample H, update all biases,
/// then all vectors, then (past t_tau) the hyperparameters, then the step
/// size. Deterministic given the seed.
pub fn train(graph: &BipartiteGraph, cfg: &TrainConfig) -> Result<TrainOutput> {
    cfg.validate()?;
    if graph.num_edges() == 0 {
        return Err(Error::Config("cannot train on an empty graph".into()));
    }
    let stats = graph.degree_stats();
    let hist = ItemHistogram::build(&stats, cfg.r)?;
    let mut q = initialize_posterior(graph, cfg);
    let mut state = NaturalGradientState::from_posterior(&q);
    let mut schedule = StepSchedule::new(cfg.schedule_exponent);
    let partition = contiguous_partition(graph.num_items(), cfg.block_count);
    let mut log = Vec::with_capacity(cfg.t_max);

    for t in 1..=cfg.t_max {
        let hidden = sample_hidden_graph(graph, &hist, cfg.seed, t as u64);
        sweep(
            graph,
            &hidden,
            &mut q,
            &mut state,
            schedule.eps,
            cfg.kappa,
            if cfg.block_count > 1 {
                Some(&partition)
            } else {
                None
            },
            t,
        )?;
        if t > cfg.t_tau {
            let [tau_u, tau_v, tau_bu, tau_bv] = update_hyperparameters(&q, &cfg.hyper);
            q.tau_u = tau_u;
            q.tau_v = tau_v;
            q.tau_bu = tau_bu;
            q.tau_bv = tau_bv;
        }
        log.push(IterationRecord {
            t,
            eps: schedule.eps,
            elbo: elbo(graph, &hidden, &q, &cfg.hyper),
            e_tau_u: q.tau_u.mean(),
            e_tau_v: q.tau_v.mean(),
            e_tau_bu: q.tau_bu.mean(),
            e_tau_bv: q.tau_bv.mean(),
        });
        schedule.advance(t, cfg.t_eps);
    }
    Ok(TrainOutput { posterior: q, log })
}
