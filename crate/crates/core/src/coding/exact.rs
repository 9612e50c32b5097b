//! Exact eavesdropper statistics by enumeration of `Z^n`.
//!
//! Sequences are indexed big-endian, `z_0` most significant. The law of `Z^n`
//! given a codeword factorizes per letter, so each codeword contributes a
//! Kronecker product; long blocks are split into a high and a low half so the
//! accumulation can run in parallel over disjoint output chunks.

use rayon::prelude::*;
use serde::Serialize;

use super::{v_to_z, SuperpositionCodebook};
use crate::channel::WiretapChannel;
use crate::error::{Error, Result};
use crate::prob::{entropy_of, CondPmf, Pmf};

/// Default bound on `|Z|^n` for exact enumeration.
pub const DEFAULT_MAX_STATES: u128 = 1 << 20;
/// Letters in the low half of the split.
const LOW_LETTERS: usize = 10;
/// Below this many states the accumulation stays on one thread.
const PARALLEL_STATES: usize = 1 << 14;

fn state_count(nz: usize, n: usize, bound: u128) -> Result<usize> {
    let states = (0..n).try_fold(1u128, |acc, _| acc.checked_mul(nz as u128));
    match states {
        Some(s) if s <= bound => Ok(s as usize),
        Some(s) => Err(Error::StateSpaceTooLarge { states: s, bound }),
        None => Err(Error::StateSpaceTooLarge {
            states: u128::MAX,
            bound,
        }),
    }
}

fn kronecker(letters: &[u32], kernel: &CondPmf) -> Vec<f64> {
    let nz = kernel.outputs();
    let mut out = vec![1.0];
    for &s in letters {
        let w = kernel.row(s as usize);
        out = out.iter().flat_map(|&p| w.iter().map(move |&q| p * q)).collect();
    }
    debug_assert_eq!(out.len(), nz.pow(letters.len() as u32));
    out
}

/// `(1/|words|) Σ_w Π_t kernel(z_t | w_t)` over all `z ∈ Z^n`.
fn mixture(words: &[&[u32]], kernel: &CondPmf, states: usize) -> Vec<f64> {
    let n = words.first().map_or(0, |w| w.len());
    let split = n.saturating_sub(LOW_LETTERS);
    let low = states / kernel.outputs().pow(split as u32);
    let scale = 1.0 / words.len() as f64;
    let mut out = vec![0.0; states];
    for w in words {
        let hi = kronecker(&w[..split], kernel);
        let lo = kronecker(&w[split..], kernel);
        let add = |(chunk, &h): (&mut [f64], &f64)| {
            let h = h * scale;
            for (o, &l) in chunk.iter_mut().zip(&lo) {
                *o += h * l;
            }
        };
        if states >= PARALLEL_STATES {
            out.par_chunks_mut(low).zip(hi.par_iter()).for_each(add);
        } else {
            out.chunks_mut(low).zip(hi.iter()).for_each(add);
        }
    }
    out
}

fn message_words(cb: &SuperpositionCodebook, m: usize) -> Vec<&[u32]> {
    (0..cb.inner_size())
        .flat_map(|i| (0..cb.outer_size()).map(move |j| cb.v_word(i, j, m)))
        .collect()
}

/// `I(M; Z^n)` under uniform messages, with the default state bound.
pub fn exact_leakage(cb: &SuperpositionCodebook, ch: &WiretapChannel) -> Result<f64> {
    exact_leakage_with(cb, ch, &Pmf::uniform(cb.message_count()), DEFAULT_MAX_STATES)
}

/// `I(M; Z^n)` for message law `pm`, computed exactly.
pub fn exact_leakage_with(
    cb: &SuperpositionCodebook,
    ch: &WiretapChannel,
    pm: &Pmf,
    max_states: u128,
) -> Result<f64> {
    if pm.len() != cb.message_count() {
        return Err(Error::DimensionMismatch(format!(
            "message law has {} entries for {} messages",
            pm.len(),
            cb.message_count()
        )));
    }
    let kernel = v_to_z(cb.dist(), ch)?;
    let states = state_count(kernel.outputs(), cb.n(), max_states)?;
    let mut pz = vec![0.0; states];
    let mut h_cond = 0.0;
    for m in 0..cb.message_count() {
        let w = pm.get(m);
        if w == 0.0 {
            continue;
        }
        let pzm = mixture(&message_words(cb, m), &kernel, states);
        h_cond += w * entropy_of(&pzm);
        pz.iter_mut().zip(&pzm).for_each(|(a, b)| *a += w * b);
    }
    Ok((entropy_of(&pz) - h_cond).max(0.0))
}

/// Exact `θ(m)`, its KL counterpart and the bound on the latter from the former.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivergenceCheck {
    pub theta: f64,
    /// `D(P_{I,Z|M=m} ‖ P_I P_{Z|U}^{⊗n})` in bits.
    pub divergence: f64,
    /// [`kl_tv_bound`] at `theta`.
    pub bound: f64,
}

/// Upper bound on `D(P‖Q)` (bits) from `ε = TV(P, Q)` when `P ≪ Q`, where
/// `q_min` is the smallest positive mass of `Q` and `support` its size:
///
/// `D(P‖Q) ≤ ε log(1/q_min) + H(Q) - H(P)` and the entropy difference is at
/// most `ε log(support - 1) + h(ε)` for `ε ≤ 1 - 1/support`, else `log support`.
pub fn kl_tv_bound(eps: f64, q_min: f64, support: usize) -> f64 {
    if eps <= 0.0 {
        return 0.0;
    }
    let cross = eps * (1.0 / q_min).log2();
    let d = support as f64;
    let entropy_gap = if support <= 1 {
        0.0
    } else if eps <= 1.0 - 1.0 / d {
        eps * (d - 1.0).log2() + entropy_of(&[eps, 1.0 - eps])
    } else {
        d.log2()
    };
    cross + entropy_gap
}

struct PerInner {
    actual: Vec<f64>,
    reference: Vec<f64>,
}

fn per_inner(cb: &SuperpositionCodebook, ch: &WiretapChannel, m: usize, max_states: u128) -> Result<Vec<PerInner>> {
    if m >= cb.message_count() {
        return Err(Error::MessageOutOfRange {
            m,
            size: cb.message_count(),
        });
    }
    let vz = v_to_z(cb.dist(), ch)?;
    let uz = cb.dist().p_v_given_u().then(&vz)?;
    let states = state_count(vz.outputs(), cb.n(), max_states)?;
    Ok((0..cb.inner_size())
        .map(|i| {
            let words: Vec<&[u32]> = (0..cb.outer_size()).map(|j| cb.v_word(i, j, m)).collect();
            PerInner {
                actual: mixture(&words, &vz, states),
                reference: mixture(&[cb.u_word(i)], &uz, states),
            }
        })
        .collect())
}

/// `θ(m) = (1/|ℐ|) Σ_i TV(P_{Z^n|M=m,I=i}, P_{Z|U}^{⊗n}(· | u(i)))`.
pub fn theta(cb: &SuperpositionCodebook, ch: &WiretapChannel, m: usize) -> Result<f64> {
    Ok(divergence_check(cb, ch, m, DEFAULT_MAX_STATES)?.theta)
}

/// `max_m θ(m)`.
pub fn theta_max(cb: &SuperpositionCodebook, ch: &WiretapChannel) -> Result<f64> {
    (0..cb.message_count()).try_fold(0.0f64, |acc, m| Ok(acc.max(theta(cb, ch, m)?)))
}

pub fn divergence_check(
    cb: &SuperpositionCodebook,
    ch: &WiretapChannel,
    m: usize,
    max_states: u128,
) -> Result<DivergenceCheck> {
    let parts = per_inner(cb, ch, m, max_states)?;
    let w = 1.0 / parts.len() as f64;
    let (mut theta, mut divergence) = (0.0, 0.0);
    let mut q_min = f64::INFINITY;
    let mut support = 0usize;
    for PerInner { actual, reference } in &parts {
        let mut tv = 0.0;
        for (k, (&p, &q)) in actual.iter().zip(reference).enumerate() {
            tv += (p - q).abs();
            if q > 0.0 {
                support += 1;
                q_min = q_min.min(w * q);
                if p > 0.0 {
                    divergence += w * p * (p / q).log2();
                }
            } else if p > 0.0 {
                return Err(Error::AbsoluteContinuityViolated { index: k, p });
            }
        }
        theta += w * 0.5 * tv;
    }
    let theta = theta.clamp(0.0, 1.0);
    Ok(DivergenceCheck {
        theta,
        divergence: divergence.max(0.0),
        bound: kl_tv_bound(theta, q_min, support),
    })
}
