//! The biased-coin preparation scheme.
//!
//! A box holds coins of type A (head probability `p_A`) and type B (`p_B`);
//! each coin handed out is of type A with probability `w`. A single toss of
//! a random coin shows heads with probability `w·p_A + (1−w)·p_B`, which
//! cannot tell the box apart from any other box with the same marginal.
//! Repeated tosses of the same coin can.
//!
//! Coin `i` draws all its randomness from its own stream: first its type,
//! then its tosses in order. Running with more tosses per coin extends each
//! coin's record without changing the prefix, so experiments at different
//! `k` share common random numbers.

use std::io::Write;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::formats::float17;
use crate::random::{self, tags};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoinType {
    A,
    B,
}

impl CoinType {
    pub fn label(self) -> &'static str {
        match self {
            CoinType::A => "A",
            CoinType::B => "B",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinPreparation {
    pub p_a: f64,
    pub p_b: f64,
    pub w: f64,
}

impl CoinPreparation {
    pub fn new(p_a: f64, p_b: f64, w: f64) -> Result<Self> {
        for (name, x) in [("p_a", p_a), ("p_b", p_b), ("w", w)] {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("{x} is outside [0, 1]"),
                });
            }
        }
        Ok(CoinPreparation { p_a, p_b, w })
    }

    /// Half type A with `p_A = 1/3`, half type B with `p_B = 2/3`.
    pub fn opposite_bias() -> Self {
        CoinPreparation {
            p_a: 1.0 / 3.0,
            p_b: 2.0 / 3.0,
            w: 0.5,
        }
    }

    /// A box of fair coins.
    pub fn fair() -> Self {
        CoinPreparation {
            p_a: 0.5,
            p_b: 0.5,
            w: 0.5,
        }
    }

    /// `w·p_A + (1−w)·p_B`.
    pub fn head_probability(&self) -> f64 {
        self.w * self.p_a + (1.0 - self.w) * self.p_b
    }

    fn head_prob(&self, t: CoinType) -> f64 {
        match t {
            CoinType::A => self.p_a,
            CoinType::B => self.p_b,
        }
    }

    /// `ln P(h heads in k tosses)` under this box.
    pub fn log_head_count_probability(&self, heads: usize, k: usize) -> f64 {
        let ln_binom = ln_choose(k, heads);
        let a = ln(self.w) + ln_binom + log_likelihood(self.p_a, heads, k);
        let b = ln(1.0 - self.w) + ln_binom + log_likelihood(self.p_b, heads, k);
        log_add(a, b)
    }
}

fn ln(x: f64) -> f64 {
    if x > 0.0 {
        x.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// `h ln p + (k−h) ln(1−p)` with `0 · ln 0 = 0`.
fn log_likelihood(p: f64, heads: usize, k: usize) -> f64 {
    let tails = k - heads;
    let mut acc = 0.0;
    if heads > 0 {
        acc += heads as f64 * ln(p);
    }
    if tails > 0 {
        acc += tails as f64 * ln(1.0 - p);
    }
    acc
}

fn ln_choose(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

fn log_add(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Tosses of one coin. `true_type` is hidden from the classifier and used
/// only for scoring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TossRecord {
    pub coin_index: usize,
    pub true_type: CoinType,
    /// `true` for heads.
    pub outcomes: Vec<bool>,
}

impl TossRecord {
    pub fn heads(&self) -> usize {
        self.outcomes.iter().filter(|&&h| h).count()
    }
}

/// Hands out coin `index` and tosses it `k` times.
pub fn toss_coin(prep: &CoinPreparation, k: usize, seed: u64, index: usize) -> TossRecord {
    let mut rng = random::stream(seed, tags::COINS, index as u64);
    let true_type = if rng.random::<f64>() < prep.w {
        CoinType::A
    } else {
        CoinType::B
    };
    let p = prep.head_prob(true_type);
    let outcomes = (0..k).map(|_| rng.random::<f64>() < p).collect();
    TossRecord {
        coin_index: index,
        true_type,
        outcomes,
    }
}

/// Records for coins `0..n_coins`, in index order.
pub fn toss_coins(prep: &CoinPreparation, k: usize, n_coins: usize, seed: u64) -> Vec<TossRecord> {
    (0..n_coins)
        .into_par_iter()
        .map(|i| toss_coin(prep, k, seed, i))
        .collect()
}

fn head_counts(prep: &CoinPreparation, k: usize, n_coins: usize, seed: u64) -> Vec<(CoinType, usize)> {
    (0..n_coins)
        .into_par_iter()
        .map(|i| {
            let r = toss_coin(prep, k, seed, i);
            (r.true_type, r.heads())
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyEstimate {
    pub p_hat: f64,
    /// Binomial standard error `√(p̂(1−p̂)/n)`.
    pub stderr: f64,
    pub n: usize,
}

/// One toss each of `n_coins` coins.
pub fn single_toss_frequency(prep: &CoinPreparation, n_coins: usize, seed: u64) -> Result<FrequencyEstimate> {
    if n_coins == 0 {
        return Err(Error::InvalidParameter {
            name: "n_coins",
            reason: "at least one coin is needed".into(),
        });
    }
    let heads: usize = head_counts(prep, 1, n_coins, seed).iter().map(|c| c.1).sum();
    let n = n_coins as f64;
    let p_hat = heads as f64 / n;
    Ok(FrequencyEstimate {
        p_hat,
        stderr: (p_hat * (1.0 - p_hat) / n).sqrt(),
        n: n_coins,
    })
}

/// Posterior probability of type A after `heads` heads in `k` tosses, with
/// prior `w`. Log-odds within rounding of zero give exactly `1/2`.
pub fn posterior_a(prep: &CoinPreparation, heads: usize, k: usize) -> f64 {
    let log_a = ln(prep.w) + log_likelihood(prep.p_a, heads, k);
    let log_b = ln(1.0 - prep.w) + log_likelihood(prep.p_b, heads, k);
    if log_a == f64::NEG_INFINITY {
        return 0.0;
    }
    if log_b == f64::NEG_INFINITY {
        return 1.0;
    }
    let odds = log_b - log_a;
    if odds.abs() <= 1e-12 * (1.0 + log_a.abs() + log_b.abs()) {
        0.5
    } else {
        1.0 / (1.0 + odds.exp())
    }
}

/// Bayes decision; ties go to A.
pub fn decide(posterior_a: f64) -> CoinType {
    if posterior_a >= 0.5 {
        CoinType::A
    } else {
        CoinType::B
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinVerdict {
    pub coin_index: usize,
    pub heads: usize,
    pub k: usize,
    pub posterior_a: f64,
    pub decision: CoinType,
    pub true_type: CoinType,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub accuracy: f64,
    pub per_coin: Vec<CoinVerdict>,
}

impl Classification {
    /// CSV with columns `coin_index,true_type,heads,k,posterior_A,decision`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "coin_index,true_type,heads,k,posterior_A,decision")?;
        for v in &self.per_coin {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                v.coin_index,
                v.true_type.label(),
                v.heads,
                v.k,
                float17(v.posterior_a),
                v.decision.label()
            )?;
        }
        Ok(())
    }
}

fn require_distinct(prep: &CoinPreparation) -> Result<()> {
    if prep.p_a == prep.p_b {
        return Err(Error::DegenerateCoins {
            prior_accuracy: prep.w.max(1.0 - prep.w),
        });
    }
    Ok(())
}

/// Tosses each of `n_coins` coins `k` times and classifies it by the exact
/// Bayes posterior.
pub fn repeated_toss_classify(
    prep: &CoinPreparation,
    k: usize,
    n_coins: usize,
    seed: u64,
) -> Result<Classification> {
    if k == 0 || n_coins == 0 {
        return Err(Error::InvalidParameter {
            name: "k",
            reason: "need at least one toss and one coin".into(),
        });
    }
    require_distinct(prep)?;
    let posteriors: Vec<f64> = (0..=k).map(|h| posterior_a(prep, h, k)).collect();
    let per_coin: Vec<CoinVerdict> = head_counts(prep, k, n_coins, seed)
        .into_iter()
        .enumerate()
        .map(|(i, (true_type, heads))| CoinVerdict {
            coin_index: i,
            heads,
            k,
            posterior_a: posteriors[heads],
            decision: decide(posteriors[heads]),
            true_type,
        })
        .collect();
    let correct = per_coin.iter().filter(|v| v.decision == v.true_type).count();
    Ok(Classification {
        accuracy: correct as f64 / n_coins as f64,
        per_coin,
    })
}

/// Exact expected accuracy of the Bayes classifier with `k` tosses, by
/// enumerating head counts.
pub fn expected_accuracy(prep: &CoinPreparation, k: usize) -> Result<f64> {
    require_distinct(prep)?;
    Ok((0..=k)
        .map(|h| {
            let lc = ln_choose(k, h);
            let pa = prep.w * (lc + log_likelihood(prep.p_a, h, k)).exp();
            let pb = (1.0 - prep.w) * (lc + log_likelihood(prep.p_b, h, k)).exp();
            match decide(posterior_a(prep, h, k)) {
                CoinType::A => pa,
                CoinType::B => pb,
            }
        })
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoxDecision {
    /// The data favour the first (generating) box.
    First,
    Second,
    Inconclusive,
}

impl BoxDecision {
    pub fn label(self) -> &'static str {
        match self {
            BoxDecision::First => "first",
            BoxDecision::Second => "second",
            BoxDecision::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxTest {
    /// `Σ_coins [ln P₁(hᵢ) − ln P₂(hᵢ)]` over per-coin head counts.
    pub statistic: f64,
    /// Fraction of bootstrap resamples whose statistic does not share the
    /// sign of the observed one.
    pub p_value_proxy: f64,
    pub decision: BoxDecision,
    pub per_coin_mean: f64,
    pub per_coin_stderr: f64,
}

pub const BOOTSTRAP_RESAMPLES: usize = 1000;
pub const BOX_TEST_LEVEL: f64 = 0.05;

/// Hands out `n_coins` coins from `first`, tosses each `k` times, and
/// compares the two boxes as mixture-of-binomials models of the per-coin
/// head counts by log-likelihood ratio.
pub fn distinguish_boxes(
    first: &CoinPreparation,
    second: &CoinPreparation,
    k: usize,
    n_coins: usize,
    seed: u64,
) -> Result<BoxTest> {
    let (m1, m2) = (first.head_probability(), second.head_probability());
    if (m1 - m2).abs() > 1e-12 {
        return Err(Error::BarycenterMismatch {
            first: m1,
            second: m2,
        });
    }
    if k == 0 || n_coins == 0 {
        return Err(Error::InvalidParameter {
            name: "k",
            reason: "need at least one toss and one coin".into(),
        });
    }
    let contribution: Vec<f64> = (0..=k)
        .map(|h| first.log_head_count_probability(h, k) - second.log_head_count_probability(h, k))
        .collect();
    let mut histogram = vec![0u64; k + 1];
    for (_, h) in head_counts(first, k, n_coins, seed) {
        histogram[h] += 1;
    }
    let stat_of = |hist: &[u64]| -> f64 {
        hist.iter()
            .zip(&contribution)
            .filter(|(&c, _)| c > 0)
            .map(|(&c, &x)| c as f64 * x)
            .sum()
    };
    let statistic = stat_of(&histogram);
    let n = n_coins as f64;
    let per_coin_mean = statistic / n;
    let second_moment: f64 = histogram
        .iter()
        .zip(&contribution)
        .filter(|(&c, _)| c > 0)
        .map(|(&c, &x)| c as f64 * x * x)
        .sum::<f64>()
        / n;
    let per_coin_stderr = ((second_moment - per_coin_mean * per_coin_mean).max(0.0) / n).sqrt();

    // Contributions below this are rounding noise of identical models.
    let noise_floor = 1e-9 * n;
    if statistic.is_finite() && statistic.abs() <= noise_floor {
        return Ok(BoxTest {
            statistic,
            p_value_proxy: 1.0,
            decision: BoxDecision::Inconclusive,
            per_coin_mean,
            per_coin_stderr,
        });
    }

    let resampled: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .into_par_iter()
        .map(|r| {
            let mut rng = random::stream(seed, tags::BOOTSTRAP, r as u64);
            stat_of(&multinomial(&histogram, n_coins as u64, &mut rng))
        })
        .collect();
    let against = resampled
        .iter()
        .filter(|&&s| if statistic > 0.0 { s <= 0.0 } else { s >= 0.0 })
        .count();
    let p_value_proxy = against as f64 / BOOTSTRAP_RESAMPLES as f64;
    let decision = if p_value_proxy >= BOX_TEST_LEVEL {
        BoxDecision::Inconclusive
    } else if statistic > 0.0 {
        BoxDecision::First
    } else {
        BoxDecision::Second
    };
    Ok(BoxTest {
        statistic,
        p_value_proxy,
        decision,
        per_coin_mean,
        per_coin_stderr,
    })
}

/// Resamples `n` items from the empirical distribution `histogram` by
/// sequential conditional binomials.
fn multinomial<R: Rng>(histogram: &[u64], n: u64, rng: &mut R) -> Vec<u64> {
    let total: u64 = histogram.iter().sum();
    let mut remaining_n = n;
    let mut remaining_mass = total;
    histogram
        .iter()
        .map(|&c| {
            if remaining_n == 0 || c == 0 {
                remaining_mass -= c;
                return 0;
            }
            let p = (c as f64 / remaining_mass as f64).min(1.0);
            remaining_mass -= c;
            let draw = Binomial::new(remaining_n, p).expect("valid binomial").sample(rng);
            remaining_n -= draw;
            draw
        })
        .collect()
}
