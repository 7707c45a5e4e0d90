//! Prediction: variance-corrected like probabilities and ranking scores.

use crate::error::{Error, Result};
use crate::model::{sigmoid, EdgeMoments, Posterior};
use crate::sampling::ItemHistogram;

/// MacKay's Gaussian-input approximation to E[sigma(a)]:
/// sigma(mu / sqrt(1 + pi sigma^2 / 8)).
pub fn like_probability(moments: EdgeMoments) -> f64 {
    sigmoid(moments.mean / (1.0 + std::f64::consts::PI * moments.variance / 8.0).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreMode {
    /// p(like) alone.
    Like,
    /// Adjusted popularity pi_n alone; ignores the posterior.
    Popularity,
    /// Product pi_n * p(like).
    PopularityLike,
}

impl ScoreMode {
    pub fn parse(s: &str) -> Result<ScoreMode> {
        match s {
            "like" => Ok(ScoreMode::Like),
            "popularity" => Ok(ScoreMode::Popularity),
            "popularity-like" => Ok(ScoreMode::PopularityLike),
            other => Err(Error::Config(format!("unknown score mode: {other}"))),
        }
    }
}

/// Score one (user, item) pair. Popularity-backed modes need the item
/// histogram the model was trained against.
pub fn score(
    q: &Posterior,
    m: u32,
    n: u32,
    mode: ScoreMode,
    hist: Option<&ItemHistogram>,
) -> Result<f64> {
    let popularity = |n: u32| -> Result<f64> {
        hist.map(|h| h.weight(n)).ok_or_else(|| {
            Error::Config("popularity scoring requires an item histogram".into())
        })
    };
    Ok(match mode {
        ScoreMode::Like => like_probability(q.moments(m, n)),
        ScoreMode::Popularity => popularity(n)?,
        ScoreMode::PopularityLike => popularity(n)? * like_probability(q.moments(m, n)),
    })
}

/// Rank `items` for user `m`, best first. Ties break toward the lower
/// item index so output is reproducible.
pub fn rank_items(
    q: &Posterior,
    m: u32,
    items: &[u32],
    mode: ScoreMode,
    hist: Option<&ItemHistogram>,
) -> Result<Vec<(u32, f64)>> {
    let mut scored: Vec<(u32, f64)> = items
        .iter()
        .map(|&n| Ok((n, score(q, m, n, mode, hist)?)))
        .collect::<Result<_>>()?;
    scored.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.0.cmp(&b.0))
    });
    Ok(scored)
}
