//! Small-blocklength simulation of the superposition wiretap code.
//!
//! An inner codebook of `|ℐ|` words `u(i) ~ P_U^{⊗n}` carries confusion
//! randomness only; for each `i` an outer codebook of `|𝒥| × |ℳ|` words
//! `v(i, j, m) ~ P_{V|U}^{⊗n}(· | u(i))` is drawn. To send `m` the encoder
//! picks `(i, j)` uniformly and transmits `x ~ P_{X|V}^{⊗n}(· | v(i, j, m))`.
//! The decoder looks for the unique `(i, j, m)` whose words are jointly
//! letter-typical with the received `y`.
//!
//! Messages are 0-based; the decoder's fallback output is message 0.

mod exact;

pub use exact::{
    divergence_check, exact_leakage, exact_leakage_with, kl_tv_bound, theta, theta_max,
    DivergenceCheck, DEFAULT_MAX_STATES,
};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::capacity::AuxJoint;
use crate::channel::WiretapChannel;
use crate::error::{Error, Result};
use crate::prob::{conditional_mutual_information, counts_typical, mutual_information, CondPmf, JointPmf};
use crate::rng::{sample_index, stream, stream2, Purpose};

/// Default bound on stored codebook symbols, `(|ℐ| + |ℐ||𝒥||ℳ|) · n`.
pub const DEFAULT_MAX_SYMBOLS: u128 = 1 << 26;
pub const DEFAULT_DELTA: f64 = 0.2;
/// Normal quantile for two-sided 95% intervals.
const Z95: f64 = 1.959963984540054;

/// Rates in bits per channel use: message `R`, inner `R1`, outer `R2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateTriple {
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "R1")]
    pub r1: f64,
    #[serde(rename = "R2")]
    pub r2: f64,
}

impl RateTriple {
    pub fn new(r: f64, r1: f64, r2: f64) -> Result<Self> {
        for (name, v) in [("R", r), ("R1", r1), ("R2", r2)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidArgument(format!("rate {name} = {v} must be finite and >= 0")));
            }
        }
        Ok(Self { r, r1, r2 })
    }
}

/// `⌈2^{n rate}⌉`, with exponents within 1e-9 of an integer treated as exact.
pub fn index_set_size(n: usize, rate: f64) -> Option<u128> {
    let e = n as f64 * rate;
    if e >= 120.0 {
        return None;
    }
    let k = e.round();
    let size = if (e - k).abs() < 1e-9 { 2f64.powi(k as i32) } else { 2f64.powf(e).ceil() };
    Some(size as u128)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuperpositionCodebook {
    n: usize,
    rates: RateTriple,
    seed: u64,
    inner: usize,
    outer: usize,
    messages: usize,
    u_size: usize,
    v_size: usize,
    /// `inner × n` letters.
    u_words: Vec<u32>,
    /// `(i, j, m)`-major, `n` letters each.
    v_words: Vec<u32>,
    #[serde(skip)]
    dist: AuxJoint,
}

/// Draws a codebook from `dist`; deterministic in `seed`.
pub fn sample_codebook(dist: &AuxJoint, n: usize, rates: RateTriple, seed: u64) -> Result<SuperpositionCodebook> {
    sample_codebook_bounded(dist, n, rates, seed, DEFAULT_MAX_SYMBOLS)
}

pub fn sample_codebook_bounded(
    dist: &AuxJoint,
    n: usize,
    rates: RateTriple,
    seed: u64,
    max_symbols: u128,
) -> Result<SuperpositionCodebook> {
    if n == 0 {
        return Err(Error::InvalidArgument("blocklength must be at least 1".into()));
    }
    let sizes = [rates.r1, rates.r2, rates.r].map(|r| index_set_size(n, r));
    let overflow = |words: u128| Error::SizeOverflow {
        words,
        n,
        bound: max_symbols,
    };
    let [Some(inner), Some(outer), Some(messages)] = sizes else {
        return Err(overflow(u128::MAX));
    };
    let words = inner
        .checked_mul(outer)
        .and_then(|w| w.checked_mul(messages))
        .and_then(|w| w.checked_add(inner))
        .ok_or_else(|| overflow(u128::MAX))?;
    if words.saturating_mul(n as u128) > max_symbols {
        return Err(overflow(words));
    }
    let (inner, outer, messages) = (inner as usize, outer as usize, messages as usize);

    let pu = dist.p_u();
    let pvu = dist.p_v_given_u();
    let mut rng = stream(seed, Purpose::Codebook, 0);
    let u_words: Vec<u32> = (0..inner * n).map(|_| sample_index(&mut rng, pu.probs()) as u32).collect();
    let per_inner = outer * messages * n;
    let mut v_words = vec![0u32; inner * per_inner];
    v_words
        .par_chunks_mut(per_inner.max(1))
        .enumerate()
        .for_each(|(i, block)| {
            let mut rng = stream(seed, Purpose::Codebook, i as u64 + 1);
            let u = &u_words[i * n..(i + 1) * n];
            for (k, s) in block.iter_mut().enumerate() {
                *s = sample_index(&mut rng, pvu.row(u[k % n] as usize)) as u32;
            }
        });
    Ok(SuperpositionCodebook {
        n,
        rates,
        seed,
        inner,
        outer,
        messages,
        u_size: dist.u_size(),
        v_size: dist.v_size(),
        u_words,
        v_words,
        dist: dist.clone(),
    })
}

impl SuperpositionCodebook {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rates(&self) -> RateTriple {
        self.rates
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn inner_size(&self) -> usize {
        self.inner
    }

    pub fn outer_size(&self) -> usize {
        self.outer
    }

    pub fn message_count(&self) -> usize {
        self.messages
    }

    pub fn dist(&self) -> &AuxJoint {
        &self.dist
    }

    pub fn u_word(&self, i: usize) -> &[u32] {
        &self.u_words[i * self.n..(i + 1) * self.n]
    }

    pub fn v_word(&self, i: usize, j: usize, m: usize) -> &[u32] {
        let k = (i * self.outer + j) * self.messages + m;
        &self.v_words[k * self.n..(k + 1) * self.n]
    }

    fn check_message(&self, m: usize) -> Result<()> {
        if m >= self.messages {
            return Err(Error::MessageOutOfRange {
                m,
                size: self.messages,
            });
        }
        Ok(())
    }
}

/// One encoder output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Encoding {
    pub i: usize,
    pub j: usize,
    pub x: Vec<usize>,
}

/// Stochastic encoder with its randomness drawn from `rng`.
pub fn encode_with<R: Rng + ?Sized>(cb: &SuperpositionCodebook, m: usize, rng: &mut R) -> Result<Encoding> {
    cb.check_message(m)?;
    let i = rng.random_range(0..cb.inner);
    let j = rng.random_range(0..cb.outer);
    let pxv = cb.dist.p_x_given_v();
    let x = cb
        .v_word(i, j, m)
        .iter()
        .map(|&v| sample_index(rng, pxv.row(v as usize)))
        .collect();
    Ok(Encoding { i, j, x })
}

/// [`encode_with`] on the encoder stream for `(seed, m)`.
pub fn encode(cb: &SuperpositionCodebook, m: usize, seed: u64) -> Result<Encoding> {
    encode_with(cb, m, &mut stream(seed, Purpose::Encoder, m as u64))
}

/// Passes `x` through the channel, returning `(y, z)`.
pub fn transmit<R: Rng + ?Sized>(ch: &WiretapChannel, x: &[usize], rng: &mut R) -> (Vec<usize>, Vec<usize>) {
    let nz = ch.z_size();
    x.iter()
        .map(|&xt| {
            let o = sample_index(rng, ch.kernel().row(xt));
            (o / nz, o % nz)
        })
        .unzip()
}

/// Joint-typicality decoder against `T_δ^n(P_{U,V,Y})`.
#[derive(Debug, Clone)]
pub struct Decoder<'a> {
    cb: &'a SuperpositionCodebook,
    delta: f64,
    y_size: usize,
    p_uvy: Vec<f64>,
    p_uy: Vec<f64>,
}

impl<'a> Decoder<'a> {
    pub fn new(cb: &'a SuperpositionCodebook, ch: &WiretapChannel, delta: f64) -> Result<Self> {
        if !(delta >= 0.0) {
            return Err(Error::InvalidArgument(format!("typicality slack {delta} must be >= 0")));
        }
        let (to_y, _) = ch.marginal_kernels();
        let uvy = cb.dist.joint_through(to_y)?;
        let p_uy = uvy.marginal(&[0, 2]).probs().to_vec();
        Ok(Self {
            cb,
            delta,
            y_size: ch.y_size(),
            p_uvy: uvy.probs().to_vec(),
            p_uy,
        })
    }

    /// The decoded message: `m` of the unique typical `(i, j, m)`, else 0.
    pub fn decode(&self, y: &[usize]) -> usize {
        let cb = self.cb;
        let n = cb.n;
        if y.len() != n || y.iter().any(|&s| s >= self.y_size) {
            return 0;
        }
        let (nv, ny) = (cb.v_size, self.y_size);
        let mut found = None;
        let mut uy = vec![0usize; self.p_uy.len()];
        let mut uvy = vec![0usize; self.p_uvy.len()];
        for i in 0..cb.inner {
            let u = cb.u_word(i);
            uy.iter_mut().for_each(|c| *c = 0);
            for (&ut, &yt) in u.iter().zip(y) {
                uy[ut as usize * ny + yt] += 1;
            }
            // Joint typicality of (u, v, y) implies that of (u, y).
            if !counts_typical(&uy, n, &self.p_uy, self.delta) {
                continue;
            }
            for j in 0..cb.outer {
                for m in 0..cb.messages {
                    uvy.iter_mut().for_each(|c| *c = 0);
                    for ((&ut, &vt), &yt) in u.iter().zip(cb.v_word(i, j, m)).zip(y) {
                        uvy[(ut as usize * nv + vt as usize) * ny + yt] += 1;
                    }
                    if counts_typical(&uvy, n, &self.p_uvy, self.delta) {
                        if found.is_some() {
                            return 0;
                        }
                        found = Some(m);
                    }
                }
            }
        }
        found.unwrap_or(0)
    }
}

pub fn decode(cb: &SuperpositionCodebook, ch: &WiretapChannel, y: &[usize], delta: f64) -> Result<usize> {
    Ok(Decoder::new(cb, ch, delta)?.decode(y))
}

/// Monte Carlo error estimate with binomial (Wald) 95% half-widths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorEstimate {
    pub avg_error: f64,
    pub avg_error_half_width: f64,
    pub max_error: f64,
    pub max_error_half_width: f64,
    pub per_message: Vec<f64>,
    pub trials_per_message: usize,
}

fn half_width(p: f64, trials: usize) -> f64 {
    Z95 * (p * (1.0 - p) / trials as f64).sqrt()
}

/// Estimates `e_m` for every message with `trials` independent uses each.
pub fn estimate_error(
    cb: &SuperpositionCodebook,
    ch: &WiretapChannel,
    trials: usize,
    delta: f64,
    seed: u64,
) -> Result<ErrorEstimate> {
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial per message is required".into()));
    }
    let decoder = Decoder::new(cb, ch, delta)?;
    let errors: Vec<usize> = (0..cb.messages)
        .into_par_iter()
        .map(|m| {
            (0..trials)
                .filter(|&t| {
                    let mut enc_rng = stream2(seed, Purpose::Encoder, m as u64, t as u64);
                    let mut ch_rng = stream2(seed, Purpose::ChannelNoise, m as u64, t as u64);
                    let enc = encode_with(cb, m, &mut enc_rng).expect("message in range");
                    let (y, _) = transmit(ch, &enc.x, &mut ch_rng);
                    decoder.decode(&y) != m
                })
                .count()
        })
        .collect();
    let per_message: Vec<f64> = errors.iter().map(|&e| e as f64 / trials as f64).collect();
    let total: usize = errors.iter().sum();
    let avg_error = total as f64 / (trials * cb.messages) as f64;
    let max_error = per_message.iter().cloned().fold(0.0, f64::max);
    Ok(ErrorEstimate {
        avg_error,
        avg_error_half_width: half_width(avg_error, trials * cb.messages),
        max_error,
        max_error_half_width: half_width(max_error, trials),
        per_message,
        trials_per_message: trials,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostEstimate {
    /// Monte Carlo `E[C_n(X(m))]` per message.
    pub per_message: Vec<f64>,
    /// Largest per-letter cost `C_n(x)` over every sampled codeword.
    pub per_codeword_max: f64,
}

/// Per-message expected cost of the encoder output, by simulation.
pub fn measure_cost(cb: &SuperpositionCodebook, ch: &WiretapChannel, trials: usize, seed: u64) -> Result<CostEstimate> {
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial per message is required".into()));
    }
    if ch.x_size() != cb.dist.x_size() {
        return Err(Error::DimensionMismatch("codebook and channel input alphabets differ".into()));
    }
    let cost = ch.cost();
    let n = cb.n as f64;
    let per: Vec<(f64, f64)> = (0..cb.messages)
        .into_par_iter()
        .map(|m| {
            let mut sum = 0.0;
            let mut max = f64::NEG_INFINITY;
            for t in 0..trials {
                let mut rng = stream2(seed, Purpose::CostTrial, m as u64, t as u64);
                let enc = encode_with(cb, m, &mut rng).expect("message in range");
                let c = enc.x.iter().map(|&x| cost[x]).sum::<f64>() / n;
                sum += c;
                max = max.max(c);
            }
            (sum / trials as f64, max)
        })
        .collect();
    Ok(CostEstimate {
        per_message: per.iter().map(|p| p.0).collect(),
        per_codeword_max: per.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max),
    })
}

/// Which rate condition failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateConstraint {
    /// `R2 + R < I(V;Y|U)`.
    Reliability,
    /// `R1 + R2 + R < I(U,V;Y)`.
    JointReliability,
    /// `R2 > I(V;Z|U)`.
    Secrecy,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRegionCheck {
    pub i_v_y_given_u: f64,
    pub i_uv_y: f64,
    pub i_v_z_given_u: f64,
    /// Positive slack means the strict inequality holds.
    pub reliability_slack: f64,
    pub joint_reliability_slack: f64,
    pub secrecy_slack: f64,
    pub violated: Vec<RateConstraint>,
}

impl RateRegionCheck {
    pub fn ok(&self) -> bool {
        self.violated.is_empty()
    }
}

/// Evaluates the three rate conditions at `dist` composed with `ch`.
pub fn check_rate_region(dist: &AuxJoint, ch: &WiretapChannel, rates: RateTriple) -> Result<RateRegionCheck> {
    let (to_y, to_z) = ch.marginal_kernels();
    let uvy = dist.joint_through(to_y)?;
    let uvz = dist.joint_through(to_z)?;
    let i_v_y_given_u = conditional_mutual_information(&uvy, 0);
    let i_v_z_given_u = conditional_mutual_information(&uvz, 0);
    let pairs = JointPmf::new(vec![dist.u_size() * dist.v_size(), ch.y_size()], uvy.probs().to_vec())?;
    let i_uv_y = mutual_information(&pairs);
    let reliability_slack = i_v_y_given_u - (rates.r2 + rates.r);
    let joint_reliability_slack = i_uv_y - (rates.r1 + rates.r2 + rates.r);
    let secrecy_slack = rates.r2 - i_v_z_given_u;
    let mut violated = Vec::new();
    for (c, s) in [
        (RateConstraint::Reliability, reliability_slack),
        (RateConstraint::JointReliability, joint_reliability_slack),
        (RateConstraint::Secrecy, secrecy_slack),
    ] {
        if !(s > 0.0) {
            violated.push(c);
        }
    }
    Ok(RateRegionCheck {
        i_v_y_given_u,
        i_uv_y,
        i_v_z_given_u,
        reliability_slack,
        joint_reliability_slack,
        secrecy_slack,
        violated,
    })
}

/// Parameters of one [`simulate`] run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub n: usize,
    pub rates: RateTriple,
    pub trials: usize,
    pub delta: f64,
    pub seed: u64,
    pub max_symbols: u128,
    pub max_states: u128,
}

impl SimulationConfig {
    pub fn new(n: usize, rates: RateTriple, trials: usize, seed: u64) -> Self {
        Self {
            n,
            rates,
            trials,
            delta: DEFAULT_DELTA,
            seed,
            max_symbols: DEFAULT_MAX_SYMBOLS,
            max_states: DEFAULT_MAX_STATES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub n: usize,
    pub rates: RateTriple,
    pub inner_size: usize,
    pub outer_size: usize,
    pub message_count: usize,
    pub delta: f64,
    pub trials: usize,
    pub seed: u64,
    pub avg_error: f64,
    pub avg_error_half_width: f64,
    pub max_error: f64,
    pub max_error_half_width: f64,
    pub per_message_error: Vec<f64>,
    pub per_message_cost: Vec<f64>,
    pub per_codeword_max_cost: f64,
    /// `I(M; Z^n) / n` under uniform messages; `None` when `|Z|^n` is too large.
    pub leakage_weak: Option<f64>,
    /// `I(M; Z^n)` under uniform messages.
    pub leakage_strong: Option<f64>,
    pub theta_max: Option<f64>,
    /// Largest exact divergence and its bound from `theta`, over messages.
    pub divergence_max: Option<f64>,
    pub divergence_bound_max: Option<f64>,
    pub rate_region: RateRegionCheck,
}

/// Samples one codebook and measures error, cost, leakage and `θ`.
pub fn simulate(ch: &WiretapChannel, dist: &AuxJoint, cfg: &SimulationConfig) -> Result<SimulationReport> {
    if ch.x_size() != dist.x_size() {
        return Err(Error::DimensionMismatch(format!(
            "distribution is over |X| = {}, channel has {}",
            dist.x_size(),
            ch.x_size()
        )));
    }
    let rate_region = check_rate_region(dist, ch, cfg.rates)?;
    let cb = sample_codebook_bounded(dist, cfg.n, cfg.rates, cfg.seed, cfg.max_symbols)?;
    let err = estimate_error(&cb, ch, cfg.trials, cfg.delta, cfg.seed)?;
    let cost = measure_cost(&cb, ch, cfg.trials, cfg.seed)?;

    let uniform = crate::prob::Pmf::uniform(cb.messages);
    let (leakage, theta_max, div) = match exact_leakage_with(&cb, ch, &uniform, cfg.max_states) {
        Ok(l) => {
            let checks = (0..cb.messages)
                .map(|m| divergence_check(&cb, ch, m, cfg.max_states))
                .collect::<Result<Vec<_>>>()?;
            let t = checks.iter().map(|c| c.theta).fold(0.0, f64::max);
            let d = checks.iter().map(|c| c.divergence).fold(0.0, f64::max);
            let b = checks.iter().map(|c| c.bound).fold(0.0, f64::max);
            (Some(l), Some(t), Some((d, b)))
        }
        Err(Error::StateSpaceTooLarge { .. }) => (None, None, None),
        Err(e) => return Err(e),
    };
    Ok(SimulationReport {
        n: cfg.n,
        rates: cfg.rates,
        inner_size: cb.inner,
        outer_size: cb.outer,
        message_count: cb.messages,
        delta: cfg.delta,
        trials: cfg.trials,
        seed: cfg.seed,
        avg_error: err.avg_error,
        avg_error_half_width: err.avg_error_half_width,
        max_error: err.max_error,
        max_error_half_width: err.max_error_half_width,
        per_message_error: err.per_message,
        per_message_cost: cost.per_message,
        per_codeword_max_cost: cost.per_codeword_max,
        leakage_weak: leakage.map(|l| l / cfg.n as f64),
        leakage_strong: leakage,
        theta_max,
        divergence_max: div.map(|d| d.0),
        divergence_bound_max: div.map(|d| d.1),
        rate_region,
    })
}

/// Per-letter kernel `V -> Z` (or `U -> Z`) induced by `dist` and `ch`.
pub(crate) fn v_to_z(dist: &AuxJoint, ch: &WiretapChannel) -> Result<CondPmf> {
    dist.p_x_given_v().then(ch.marginal_kernels().1)
}
