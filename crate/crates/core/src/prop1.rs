//! A cost-constrained wiretap channel on which two auxiliaries are strictly
//! necessary.
//!
//! The input is a pair `(x̃, z̃)`, enumerated `(0,0), (0,1), (1,0), (1,1)`.
//! The eavesdropper sees `z̃`; the legitimate receiver sees `x̃` when `z̃ = 1`
//! and a fair coin otherwise. Sending `z̃ = 1` costs 1, budget 0.5.

use rand::Rng;
use serde::Serialize;

use crate::capacity::{
    maximize_single_aux, maximize_two_aux, objective_single_aux, objective_two_aux, AuxJoint,
    CapacityResult, OptimizerOptions, SingleAuxJoint,
};
use crate::channel::WiretapChannel;
use crate::error::{Error, Result};
use crate::prob::{joint_entropy, CondPmf, JointPmf};
use crate::rng::uniform_simplex;

pub const BUDGET: f64 = 0.5;
/// The two-auxiliary value certified by [`witness_distribution`].
pub const WITNESS_VALUE: f64 = 0.5;
/// Single-auxiliary values at or above `two_aux_lb - GAP_MARGIN` are treated
/// as an optimizer failure.
pub const GAP_MARGIN: f64 = 1e-4;

/// Input index of `(x̃, z̃)`.
pub fn input_index(xt: usize, zt: usize) -> usize {
    2 * xt + zt
}

pub fn build_channel() -> WiretapChannel {
    // Output index y * 2 + z.
    let rows = (0..4)
        .map(|x| {
            let (xt, zt) = (x / 2, x % 2);
            let mut row = vec![0.0; 4];
            if zt == 1 {
                row[xt * 2 + 1] = 1.0;
            } else {
                row[0] = 0.5;
                row[2] = 0.5;
            }
            row
        })
        .collect();
    let kernel = CondPmf::from_rows(rows).expect("rows are distributions");
    WiretapChannel::new(2, 2, kernel, vec![0.0, 1.0, 0.0, 1.0], BUDGET).expect("valid channel")
}

/// `U = z̃ ~ Ber(0.5)`, `x̃ ~ Ber(0.5)` independent, `V = X`.
pub fn witness_distribution() -> AuxJoint {
    let mut p_uv = vec![0.0; 8];
    for x in 0..4 {
        p_uv[(x % 2) * 4 + x] = 0.25;
    }
    let rows = (0..4).map(|v| crate::prob::Pmf::point_mass(4, v).into_vec()).collect();
    AuxJoint::new(2, 4, p_uv, rows).expect("valid witness")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub two_aux_lb: f64,
    pub single_aux_best: f64,
    pub gap: f64,
    pub witness_value: f64,
    /// Best single-auxiliary value per `|V|` tried.
    pub single_aux_by_v_size: Vec<(usize, f64)>,
    pub two_aux_search: CapacityResult,
}

/// Runs the two-auxiliary search and the single-auxiliary search at `|V| = 4`
/// and `|V| = 16` (or the single `opts.v_size` if set) and reports the gap.
pub fn verify_gap(opts: &OptimizerOptions) -> Result<GapReport> {
    let ch = build_channel();
    let witness_value = objective_two_aux(&witness_distribution(), &ch)?;
    let two = maximize_two_aux(
        &ch,
        &OptimizerOptions {
            v_size: None,
            u_size: None,
            ..opts.clone()
        },
    )?;
    let two_aux_lb = two.value.max(witness_value);

    let v_sizes = match opts.v_size {
        Some(v) => vec![v],
        None => vec![4, 16],
    };
    let mut single_aux_by_v_size = Vec::with_capacity(v_sizes.len());
    for v in v_sizes {
        let r = maximize_single_aux(
            &ch,
            &OptimizerOptions {
                v_size: Some(v),
                ..opts.clone()
            },
        )?;
        single_aux_by_v_size.push((v, r.value));
    }
    let single_aux_best = single_aux_by_v_size
        .iter()
        .map(|&(_, v)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    if single_aux_best >= two_aux_lb - GAP_MARGIN {
        return Err(Error::GapNotEstablished {
            two_aux: two_aux_lb,
            single_aux: single_aux_best,
        });
    }
    Ok(GapReport {
        two_aux_lb,
        single_aux_best,
        gap: two_aux_lb - single_aux_best,
        witness_value,
        single_aux_by_v_size,
        two_aux_search: two,
    })
}

/// A uniformly random `P_{V,X}` meeting the budget (rejection from the
/// Dirichlet(1) law on the `|V| × 4` simplex).
pub fn random_feasible_single_aux<R: Rng + ?Sized>(rng: &mut R, v_size: usize) -> SingleAuxJoint {
    loop {
        let p = uniform_simplex(rng, v_size * 4);
        let cost: f64 = p.chunks(4).map(|r| r[1] + r[3]).sum();
        if cost <= BUDGET {
            return SingleAuxJoint::new(p.chunks(4).map(<[f64]>::to_vec).collect())
                .expect("sampled rows are a joint pmf");
        }
    }
}

/// The four quantities whose simultaneous equalities a single-auxiliary
/// distribution would need in order to reach the two-auxiliary value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProofConditions {
    /// `P(z̃ = 1)`; needs to be 0.5.
    pub p_zt_one: f64,
    /// `H(Y | z̃ = 1)`; needs to be 1.
    pub h_y_given_zt_one: f64,
    /// `I(X̃; Y | Z̃, V)`; needs to be 0.
    pub i_xt_y_given_zt_v: f64,
    /// `I(V; Z̃ | Y)`; needs to be 0.
    pub i_v_zt_given_y: f64,
}

impl ProofConditions {
    pub fn of(s: &SingleAuxJoint) -> Result<Self> {
        if s.x_size() != 4 {
            return Err(Error::DimensionMismatch(format!(
                "expected |X| = 4, got {}",
                s.x_size()
            )));
        }
        let ch = build_channel();
        let (to_y, _) = ch.marginal_kernels();
        // Axes (v, x̃, z̃, y).
        let nv = s.v_size;
        let mut probs = vec![0.0; nv * 8];
        for v in 0..nv {
            for x in 0..4 {
                for y in 0..2 {
                    probs[((v * 2 + x / 2) * 2 + x % 2) * 2 + y] = s.p_vx[v][x] * to_y.get(x, y);
                }
            }
        }
        let j = JointPmf::new(vec![nv, 2, 2, 2], probs)?;
        let h = |axes: &[usize]| joint_entropy(&j.marginal(axes));
        let (v, xt, zt, y) = (0, 1, 2, 3);

        let pz = j.marginal_pmf(zt);
        let p_zt_one = pz.get(1);
        // H(Y | z̃ = 1) = H(Y, Z̃ = 1 slice) / P(z̃ = 1).
        let yz = j.marginal(&[zt, y]);
        let h_y_given_zt_one = if p_zt_one > 0.0 {
            let slice = [yz.probs()[2] / p_zt_one, yz.probs()[3] / p_zt_one];
            crate::prob::entropy_of(&slice)
        } else {
            0.0
        };
        Ok(Self {
            p_zt_one,
            h_y_given_zt_one,
            i_xt_y_given_zt_v: h(&[v, xt, zt]) + h(&[v, zt, y]) - h(&[v, zt]) - h(&[v, xt, zt, y]),
            i_v_zt_given_y: h(&[v, y]) + h(&[zt, y]) - h(&[y]) - h(&[v, zt, y]),
        })
    }

    /// True when every equality holds within `tol`.
    pub fn all_hold(&self, tol: f64) -> bool {
        (self.p_zt_one - 0.5).abs() <= tol
            && (self.h_y_given_zt_one - 1.0).abs() <= tol
            && self.i_xt_y_given_zt_v.abs() <= tol
            && self.i_v_zt_given_y.abs() <= tol
    }
}

/// `I(V;Y) - I(V;Z)` on the fixed channel.
pub fn single_aux_value(s: &SingleAuxJoint) -> Result<f64> {
    objective_single_aux(s, &build_channel())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::is_feasible;
    use crate::prob::conditional_mutual_information;
    use crate::rng::{stream, Purpose};

    #[test]
    fn kernel_rows_and_cost() {
        let ch = build_channel();
        assert_eq!(ch.kernel().row(input_index(1, 1)), &[0.0, 0.0, 0.0, 1.0]);
        assert_eq!(ch.kernel().row(input_index(0, 0)), &[0.5, 0.0, 0.5, 0.0]);
        assert_eq!(ch.cost(), &[0.0, 1.0, 0.0, 1.0]);
        assert_eq!(ch.budget(), 0.5);
    }

    #[test]
    fn witness_value_cost_and_leakage() {
        let ch = build_channel();
        let w = witness_distribution();
        assert!((objective_two_aux(&w, &ch).unwrap() - 0.5).abs() < 1e-12);
        assert!((ch.expected_cost(&w.p_x()) - 0.5).abs() < 1e-15);
        assert!(is_feasible(&w, &ch));
        let (_, to_z) = ch.marginal_kernels();
        let uvz = w.joint_through(to_z).unwrap();
        assert!(conditional_mutual_information(&uvz, 0).abs() < 1e-15);
    }

    #[test]
    fn legitimate_output_is_independent_of_timing_letter() {
        let ch = build_channel();
        let w = witness_distribution();
        let (to_y, _) = ch.marginal_kernels();
        let uvy = w.joint_through(to_y).unwrap();
        let uy = uvy.marginal(&[0, 2]);
        for u in 0..2 {
            let pu = uy.probs()[u * 2] + uy.probs()[u * 2 + 1];
            assert!((uy.probs()[u * 2 + 1] / pu - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn random_single_aux_never_reaches_witness() {
        let mut rng = stream(1, Purpose::Sampling, 0);
        for i in 0..2000 {
            let s = random_feasible_single_aux(&mut rng, 2 + i % 7);
            let v = single_aux_value(&s).unwrap();
            assert!(v <= 0.5 + 1e-9);
            if v > 0.5 - 1e-6 {
                assert!(!ProofConditions::of(&s).unwrap().all_hold(1e-6));
            }
        }
    }

    #[test]
    fn conditions_on_a_known_point() {
        // V = x̃ with z̃ ~ Ber(0.5) independent: the single-aux optimum.
        let s = SingleAuxJoint::new(vec![vec![0.25, 0.25, 0.0, 0.0], vec![0.0, 0.0, 0.25, 0.25]])
            .unwrap();
        let c = ProofConditions::of(&s).unwrap();
        assert!((c.p_zt_one - 0.5).abs() < 1e-15);
        assert!((c.h_y_given_zt_one - 1.0).abs() < 1e-12);
        assert!(c.i_xt_y_given_zt_v.abs() < 1e-12);
        assert!(c.i_v_zt_given_y > 1e-3);
        assert!(!c.all_hold(1e-6));
        let h14 = crate::prob::entropy_of(&[0.25, 0.75]);
        assert!((single_aux_value(&s).unwrap() - (1.0 - h14)).abs() < 1e-12);
    }
}
