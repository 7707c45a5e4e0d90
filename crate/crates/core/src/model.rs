//! Variational factors, the Jaakkola-Jordan logistic bound, edge moments,
//! and the stochastic objective evaluated on a fixed hidden graph.

use std::io::{BufRead, Write};

use statrs::function::gamma::{digamma, ln_gamma};

use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;
use crate::sampling::HiddenGraphSample;

/// Cap on |a| and xi before exponentiation; overflow guard only.
const EXP_CAP: f64 = 500.0;

const LN_2PI: f64 = 1.8378770664093453;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianFactor {
    pub mean: f64,
    /// Precision (inverse variance). `f64::INFINITY` marks a clamped
    /// point-mass factor.
    pub precision: f64,
}

impl GaussianFactor {
    pub fn new(mean: f64, precision: f64) -> Self {
        debug_assert!(precision > 0.0);
        GaussianFactor { mean, precision }
    }

    pub fn variance(&self) -> f64 {
        1.0 / self.precision
    }

    pub fn is_clamped(&self) -> bool {
        self.precision.is_infinite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaFactor {
    pub shape: f64,
    pub rate: f64,
}

impl GammaFactor {
    pub fn new(shape: f64, rate: f64) -> Self {
        debug_assert!(shape > 0.0 && rate > 0.0);
        GammaFactor { shape, rate }
    }

    pub fn mean(&self) -> f64 {
        self.shape / self.rate
    }

    /// E[log tau] = psi(shape) - log(rate).
    pub fn mean_log(&self) -> f64 {
        digamma(self.shape) - self.rate.ln()
    }

    pub fn entropy(&self) -> f64 {
        self.shape - self.rate.ln() + ln_gamma(self.shape)
            + (1.0 - self.shape) * digamma(self.shape)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperPriors {
    pub alpha: f64,
    pub beta: f64,
}

impl HyperPriors {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if alpha <= 0.0 || beta <= 0.0 {
            return Err(Error::Config(format!(
                "hyperprior parameters must be positive, got alpha={alpha}, beta={beta}"
            )));
        }
        Ok(HyperPriors { alpha, beta })
    }

    /// E_q[log Gamma(tau; alpha, beta)] under a Gamma factor q.
    pub fn expected_log_prior(&self, q: &GammaFactor) -> f64 {
        self.alpha * self.beta.ln() - ln_gamma(self.alpha)
            + (self.alpha - 1.0) * q.mean_log()
            - self.beta * q.mean()
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// log sigma(x), stable for large |x|.
pub fn log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

/// Curvature of the logistic bound: (sigma(xi) - 1/2) / (2 xi), with the
/// continuous limit 1/8 at zero. Even in xi; range (0, 1/8].
pub fn lambda_xi(xi: f64) -> f64 {
    let xi = xi.abs().min(EXP_CAP);
    if xi < 1e-5 {
        // tanh(x/2)/(4x) expanded around 0.
        0.125 - xi * xi / 96.0
    } else {
        (sigmoid(xi) - 0.5) / (2.0 * xi)
    }
}

/// First two moments of a = u^T v + b_m + b_n under independent diagonal
/// Gaussian factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeMoments {
    pub mean: f64,
    pub variance: f64,
}

impl EdgeMoments {
    pub fn second_moment(&self) -> f64 {
        self.variance + self.mean * self.mean
    }
}

pub fn edge_moments(
    u: &[GaussianFactor],
    v: &[GaussianFactor],
    b_m: GaussianFactor,
    b_n: GaussianFactor,
) -> EdgeMoments {
    assert_eq!(u.len(), v.len(), "latent dimensions must match");
    let mut mean = b_m.mean + b_n.mean;
    let mut variance = b_m.variance() + b_n.variance();
    for (fu, fv) in u.iter().zip(v) {
        mean += fu.mean * fv.mean;
        variance += fu.mean * fu.mean * fv.variance()
            + fv.mean * fv.mean * fu.variance()
            + fu.variance() * fv.variance();
    }
    EdgeMoments { mean, variance }
}

/// The bound-optimal per-edge parameter: xi = sqrt(E[a^2]).
pub fn optimal_xi(moments: EdgeMoments) -> f64 {
    moments.second_moment().sqrt()
}

/// Log of the Jaakkola-Jordan lower bound on the single-edge likelihood,
/// evaluated at point a. Requires g = 1 => h = 1.
pub fn jj_bound_edge(g: bool, h: bool, a: f64, xi: f64) -> Result<f64> {
    if g && !h {
        return Err(Error::Contract(
            "g = 1 requires h = 1 on every edge".into(),
        ));
    }
    if !h {
        return Ok(0.0);
    }
    let a = a.clamp(-EXP_CAP, EXP_CAP);
    let xi = xi.clamp(-EXP_CAP, EXP_CAP);
    let g_term = if g { a } else { 0.0 };
    Ok(g_term + log_sigmoid(xi) - 0.5 * (a + xi) - lambda_xi(xi) * (a * a - xi * xi))
}

/// Exact single-edge log-likelihood log p(g | a, h).
pub fn exact_log_likelihood(g: bool, h: bool, a: f64) -> f64 {
    if !h {
        return 0.0; // only reachable when g = 0
    }
    if g {
        log_sigmoid(a)
    } else {
        log_sigmoid(-a)
    }
}

/// All variational factors of the model.
#[derive(Debug, Clone, PartialEq)]
pub struct Posterior {
    pub k: usize,
    user_ids: Vec<String>,
    item_ids: Vec<String>,
    /// Row-major M x K means and precisions.
    user_means: Vec<f64>,
    user_precisions: Vec<f64>,
    item_means: Vec<f64>,
    item_precisions: Vec<f64>,
    user_bias: Vec<GaussianFactor>,
    item_bias: Vec<GaussianFactor>,
    pub tau_u: GammaFactor,
    pub tau_v: GammaFactor,
    pub tau_bu: GammaFactor,
    pub tau_bv: GammaFactor,
    pub user_bias_clamped: bool,
}

impl Posterior {
    pub fn new(
        user_ids: Vec<String>,
        item_ids: Vec<String>,
        k: usize,
        user_bias_clamped: bool,
    ) -> Self {
        let m = user_ids.len();
        let n = item_ids.len();
        let bias = GaussianFactor::new(0.0, 1.0);
        let clamped = GaussianFactor {
            mean: 0.0,
            precision: f64::INFINITY,
        };
        Posterior {
            k,
            user_ids,
            item_ids,
            user_means: vec![0.0; m * k],
            user_precisions: vec![1.0; m * k],
            item_means: vec![0.0; n * k],
            item_precisions: vec![1.0; n * k],
            user_bias: vec![if user_bias_clamped { clamped } else { bias }; m],
            item_bias: vec![bias; n],
            tau_u: GammaFactor::new(1.0, 1.0),
            tau_v: GammaFactor::new(1.0, 1.0),
            tau_bu: GammaFactor::new(1.0, 1.0),
            tau_bv: GammaFactor::new(1.0, 1.0),
            user_bias_clamped,
        }
    }

    pub fn num_users(&self) -> usize {
        self.user_ids.len()
    }

    pub fn num_items(&self) -> usize {
        self.item_ids.len()
    }

    pub fn user_ids(&self) -> &[String] {
        &self.user_ids
    }

    pub fn item_ids(&self) -> &[String] {
        &self.item_ids
    }

    pub fn user_means(&self, m: u32) -> &[f64] {
        &self.user_means[m as usize * self.k..(m as usize + 1) * self.k]
    }

    pub fn user_precisions(&self, m: u32) -> &[f64] {
        &self.user_precisions[m as usize * self.k..(m as usize + 1) * self.k]
    }

    pub fn item_means(&self, n: u32) -> &[f64] {
        &self.item_means[n as usize * self.k..(n as usize + 1) * self.k]
    }

    pub fn item_precisions(&self, n: u32) -> &[f64] {
        &self.item_precisions[n as usize * self.k..(n as usize + 1) * self.k]
    }

    pub fn user_bias(&self, m: u32) -> GaussianFactor {
        self.user_bias[m as usize]
    }

    pub fn item_bias(&self, n: u32) -> GaussianFactor {
        self.item_bias[n as usize]
    }

    pub fn user_factors(&self, m: u32) -> Vec<GaussianFactor> {
        self.user_means(m)
            .iter()
            .zip(self.user_precisions(m))
            .map(|(&mean, &precision)| GaussianFactor { mean, precision })
            .collect()
    }

    pub fn item_factors(&self, n: u32) -> Vec<GaussianFactor> {
        self.item_means(n)
            .iter()
            .zip(self.item_precisions(n))
            .map(|(&mean, &precision)| GaussianFactor { mean, precision })
            .collect()
    }

    pub fn set_user_factor(&mut self, m: u32, k: usize, mean: f64, precision: f64) {
        self.user_means[m as usize * self.k + k] = mean;
        self.user_precisions[m as usize * self.k + k] = precision;
    }

    pub fn set_item_factor(&mut self, n: u32, k: usize, mean: f64, precision: f64) {
        self.item_means[n as usize * self.k + k] = mean;
        self.item_precisions[n as usize * self.k + k] = precision;
    }

    pub fn set_user_bias(&mut self, m: u32, f: GaussianFactor) {
        self.user_bias[m as usize] = f;
    }

    pub fn set_item_bias(&mut self, n: u32, f: GaussianFactor) {
        self.item_bias[n as usize] = f;
    }

    /// Moments of a_mn under the current factors.
    pub fn moments(&self, m: u32, n: u32) -> EdgeMoments {
        let (mi, ni) = (m as usize, n as usize);
        let ub = self.user_bias[mi];
        let ib = self.item_bias[ni];
        let mut mean = ub.mean + ib.mean;
        let mut variance = ub.variance() + ib.variance();
        let um = &self.user_means[mi * self.k..(mi + 1) * self.k];
        let up = &self.user_precisions[mi * self.k..(mi + 1) * self.k];
        let vm = &self.item_means[ni * self.k..(ni + 1) * self.k];
        let vp = &self.item_precisions[ni * self.k..(ni + 1) * self.k];
        for k in 0..self.k {
            mean += um[k] * vm[k];
            let (vu, vv) = (1.0 / up[k], 1.0 / vp[k]);
            variance += um[k] * um[k] * vv + vm[k] * vm[k] * vu + vu * vv;
        }
        EdgeMoments { mean, variance }
    }

    /// E_q[u_m^T u_m] (or the item analogue via `expected_item_norm`).
    pub fn expected_user_norm(&self, m: u32) -> f64 {
        self.user_means(m)
            .iter()
            .zip(self.user_precisions(m))
            .map(|(&e, &p)| e * e + 1.0 / p)
            .sum()
    }

    pub fn expected_item_norm(&self, n: u32) -> f64 {
        self.item_means(n)
            .iter()
            .zip(self.item_precisions(n))
            .map(|(&e, &p)| e * e + 1.0 / p)
            .sum()
    }
}

/// Expected bounded log-likelihood of one H-edge with xi set optimally.
fn edge_objective(g: bool, moments: EdgeMoments) -> f64 {
    let xi = optimal_xi(moments).min(EXP_CAP);
    let g_num = if g { 1.0 } else { 0.0 };
    log_sigmoid(xi) + (g_num - 0.5) * moments.mean - 0.5 * xi
        - lambda_xi(xi) * (moments.second_moment() - xi * xi)
}

/// The stochastic variational objective L_xi for a fixed hidden graph:
/// bounded edge terms over H, expected log-priors, and the entropy of the
/// Gaussian and Gamma factors. Constant terms in q(H) are dropped.
pub fn elbo(
    graph: &BipartiteGraph,
    hidden: &HiddenGraphSample,
    q: &Posterior,
    hyper: &HyperPriors,
) -> f64 {
    let mut total = 0.0;
    for m in 0..graph.num_users() as u32 {
        for (n, g) in hidden.row(graph, m) {
            total += edge_objective(g, q.moments(m, n));
        }
    }

    // Gaussian prior cross-entropies and factor entropies.
    let vec_terms = |means: &[f64], precisions: &[f64], tau: &GammaFactor| -> f64 {
        let e_log_tau = tau.mean_log();
        let e_tau = tau.mean();
        means
            .iter()
            .zip(precisions)
            .map(|(&e, &p)| {
                0.5 * (e_log_tau - LN_2PI) - 0.5 * e_tau * (e * e + 1.0 / p)
                    + 0.5 * ((2.0 * std::f64::consts::PI * std::f64::consts::E) / p).ln()
            })
            .sum()
    };
    total += vec_terms(&q.user_means, &q.user_precisions, &q.tau_u);
    total += vec_terms(&q.item_means, &q.item_precisions, &q.tau_v);

    let bias_terms = |biases: &[GaussianFactor], tau: &GammaFactor| -> f64 {
        biases
            .iter()
            .filter(|f| !f.is_clamped())
            .map(|f| {
                0.5 * (tau.mean_log() - LN_2PI)
                    - 0.5 * tau.mean() * (f.mean * f.mean + f.variance())
                    + 0.5 * ((2.0 * std::f64::consts::PI * std::f64::consts::E) * f.variance()).ln()
            })
            .sum()
    };
    total += bias_terms(&q.user_bias, &q.tau_bu);
    total += bias_terms(&q.item_bias, &q.tau_bv);

    for tau in [&q.tau_u, &q.tau_v, &q.tau_bu, &q.tau_bv] {
        total += hyper.expected_log_prior(tau) + tau.entropy();
    }
    total
}

// ---------------------------------------------------------------------------
// Serialization: versioned text format. Header `K M N flags`, per-user and
// per-item lines `id eta_1 omega_1 .. eta_K omega_K eta_b omega_b`, then one
// line of the four Gamma factors as `shape rate` pairs. 9 significant digits.

const FORMAT_VERSION_LINE: &str = "# rgcf-posterior v1";
pub const FLAG_USER_BIAS_CLAMPED: u32 = 1;
/// Set on serialized point-estimate (zero variance) models.
pub const FLAG_POINT_ESTIMATE: u32 = 2;

fn fmt(x: f64) -> String {
    if x.is_infinite() {
        (if x > 0.0 { "inf" } else { "-inf" }).to_string()
    } else {
        format!("{x:.8e}")
    }
}

fn parse_f64(tok: &str) -> Result<f64> {
    match tok {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => tok
            .parse()
            .map_err(|_| Error::ModelFormat(format!("bad number {tok:?}"))),
    }
}

impl Posterior {
    pub fn save(&self, mut w: impl Write) -> std::io::Result<()> {
        self.save_with_flags(
            &mut w,
            if self.user_bias_clamped {
                FLAG_USER_BIAS_CLAMPED
            } else {
                0
            },
        )
    }

    pub fn save_with_flags(&self, w: &mut impl Write, flags: u32) -> std::io::Result<()> {
        writeln!(w, "{FORMAT_VERSION_LINE}")?;
        writeln!(
            w,
            "{} {} {} {}",
            self.k,
            self.num_users(),
            self.num_items(),
            flags
        )?;
        let write_vertex = |w: &mut dyn Write,
                            id: &str,
                            means: &[f64],
                            precisions: &[f64],
                            bias: GaussianFactor|
         -> std::io::Result<()> {
            write!(w, "{id}")?;
            for (e, p) in means.iter().zip(precisions) {
                write!(w, " {} {}", fmt(*e), fmt(*p))?;
            }
            writeln!(w, " {} {}", fmt(bias.mean), fmt(bias.precision))
        };
        for m in 0..self.num_users() as u32 {
            write_vertex(
                w,
                &self.user_ids[m as usize],
                self.user_means(m),
                self.user_precisions(m),
                self.user_bias(m),
            )?;
        }
        for n in 0..self.num_items() as u32 {
            write_vertex(
                w,
                &self.item_ids[n as usize],
                self.item_means(n),
                self.item_precisions(n),
                self.item_bias(n),
            )?;
        }
        for (i, tau) in [self.tau_u, self.tau_v, self.tau_bu, self.tau_bv]
            .iter()
            .enumerate()
        {
            if i > 0 {
                write!(w, " ")?;
            }
            write!(w, "{} {}", fmt(tau.shape), fmt(tau.rate))?;
        }
        writeln!(w)
    }

    pub fn load(r: impl BufRead) -> Result<Self> {
        let (posterior, _) = Self::load_with_flags(r)?;
        Ok(posterior)
    }

    pub fn load_with_flags(r: impl BufRead) -> Result<(Self, u32)> {
        let mut lines = r.lines();
        let mut next_line = || -> Result<String> {
            lines
                .next()
                .ok_or_else(|| Error::ModelFormat("unexpected end of file".into()))?
                .map_err(|e| Error::io("<model stream>", e))
        };
        let version = next_line()?;
        if version.trim() != FORMAT_VERSION_LINE {
            return Err(Error::ModelFormat(format!(
                "unknown format header {version:?}"
            )));
        }
        let header = next_line()?;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 4 {
            return Err(Error::ModelFormat("header must be `K M N flags`".into()));
        }
        let k: usize = head[0]
            .parse()
            .map_err(|_| Error::ModelFormat("bad K".into()))?;
        let m: usize = head[1]
            .parse()
            .map_err(|_| Error::ModelFormat("bad M".into()))?;
        let n: usize = head[2]
            .parse()
            .map_err(|_| Error::ModelFormat("bad N".into()))?;
        let flags: u32 = head[3]
            .parse()
            .map_err(|_| Error::ModelFormat("bad flags".into()))?;

        type VertexColumns = (Vec<String>, Vec<f64>, Vec<f64>, Vec<GaussianFactor>);
        let mut read_vertices = |count: usize| -> Result<VertexColumns> {
            let mut ids = Vec::with_capacity(count);
            let mut means = Vec::with_capacity(count * k);
            let mut precisions = Vec::with_capacity(count * k);
            let mut biases = Vec::with_capacity(count);
            for _ in 0..count {
                let line = next_line()?;
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.len() != 1 + 2 * k + 2 {
                    return Err(Error::ModelFormat(format!(
                        "vertex line has {} tokens, expected {}",
                        toks.len(),
                        1 + 2 * k + 2
                    )));
                }
                ids.push(toks[0].to_string());
                for i in 0..k {
                    means.push(parse_f64(toks[1 + 2 * i])?);
                    precisions.push(parse_f64(toks[2 + 2 * i])?);
                }
                biases.push(GaussianFactor {
                    mean: parse_f64(toks[1 + 2 * k])?,
                    precision: parse_f64(toks[2 + 2 * k])?,
                });
            }
            Ok((ids, means, precisions, biases))
        };
        let (user_ids, user_means, user_precisions, user_bias) = read_vertices(m)?;
        let (item_ids, item_means, item_precisions, item_bias) = read_vertices(n)?;
        let tau_line = next_line()?;
        let toks: Vec<&str> = tau_line.split_whitespace().collect();
        if toks.len() != 8 {
            return Err(Error::ModelFormat(
                "expected four `shape rate` pairs on the final line".into(),
            ));
        }
        let mut taus = [GammaFactor::new(1.0, 1.0); 4];
        for (i, tau) in taus.iter_mut().enumerate() {
            *tau = GammaFactor {
                shape: parse_f64(toks[2 * i])?,
                rate: parse_f64(toks[2 * i + 1])?,
            };
        }
        Ok((
            Posterior {
                k,
                user_ids,
                item_ids,
                user_means,
                user_precisions,
                item_means,
                item_precisions,
                user_bias,
                item_bias,
                tau_u: taus[0],
                tau_v: taus[1],
                tau_bu: taus[2],
                tau_bv: taus[3],
                user_bias_clamped: flags & FLAG_USER_BIAS_CLAMPED != 0,
            },
            flags,
        ))
    }
}
