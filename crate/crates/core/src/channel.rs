//! The cost-constrained wiretap channel `(X, Y, Z, P_{Y,Z|X}, C, b)` and its
//! JSON interchange format.

use serde::{Deserialize, Serialize};

use crate::capacity::{self, OptimizerOptions, SingleAuxJoint};
use crate::error::{Error, Result};
use crate::prob::{mutual_information, CondPmf, JointPmf, Pmf};
use crate::rng::Purpose;

/// On-disk channel description. Kernel rows are flattened row-major over
/// `(y, z)` with `y` as the major axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub x_size: usize,
    pub y_size: usize,
    pub z_size: usize,
    pub kernel: Vec<Vec<f64>>,
    pub cost: Vec<f64>,
    pub budget: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WiretapChannel {
    x_size: usize,
    y_size: usize,
    z_size: usize,
    kernel: CondPmf,
    cost: Vec<f64>,
    budget: f64,
    to_y: CondPmf,
    to_z: CondPmf,
}

impl WiretapChannel {
    /// `kernel` maps `X` to the flattened `(y, z)` alphabet.
    pub fn new(
        y_size: usize,
        z_size: usize,
        kernel: CondPmf,
        cost: Vec<f64>,
        budget: f64,
    ) -> Result<Self> {
        let x_size = kernel.inputs();
        if y_size == 0 || z_size == 0 || kernel.outputs() != y_size * z_size {
            return Err(Error::DimensionMismatch(format!(
                "kernel has {} outputs, expected {y_size}x{z_size}",
                kernel.outputs()
            )));
        }
        if cost.len() != x_size {
            return Err(Error::DimensionMismatch(format!(
                "{} costs for {x_size} input letters",
                cost.len()
            )));
        }
        if let Some(c) = cost.iter().find(|c| !c.is_finite() || **c < 0.0) {
            return Err(Error::InvalidArgument(format!("cost {c} is not a nonnegative real")));
        }
        if !budget.is_finite() {
            return Err(Error::InvalidArgument(format!("budget {budget} is not finite")));
        }
        let c_min = cost.iter().cloned().fold(f64::INFINITY, f64::min);
        if budget < c_min {
            return Err(Error::BudgetBelowMinCost { budget, c_min });
        }
        let mut y = vec![0.0; x_size * y_size];
        let mut z = vec![0.0; x_size * z_size];
        for x in 0..x_size {
            let row = kernel.row(x);
            for yi in 0..y_size {
                for zi in 0..z_size {
                    let p = row[yi * z_size + zi];
                    y[x * y_size + yi] += p;
                    z[x * z_size + zi] += p;
                }
            }
        }
        Ok(Self {
            x_size,
            y_size,
            z_size,
            to_y: CondPmf::from_flat(x_size, y_size, y)?,
            to_z: CondPmf::from_flat(x_size, z_size, z)?,
            kernel,
            cost,
            budget,
        })
    }

    /// Channel whose outputs are conditionally independent given the input:
    /// `P(y, z | x) = P(y | x) P(z | x)`.
    pub fn from_marginals(
        to_y: &CondPmf,
        to_z: &CondPmf,
        cost: Vec<f64>,
        budget: f64,
    ) -> Result<Self> {
        if to_y.inputs() != to_z.inputs() {
            return Err(Error::DimensionMismatch("marginal kernels differ in inputs".into()));
        }
        let (ny, nz) = (to_y.outputs(), to_z.outputs());
        let rows = (0..to_y.inputs())
            .map(|x| {
                (0..ny * nz)
                    .map(|k| to_y.get(x, k / nz) * to_z.get(x, k % nz))
                    .collect()
            })
            .collect();
        Self::new(ny, nz, CondPmf::from_rows(rows)?, cost, budget)
    }

    /// Physically degraded cascade `X -> Y -> Z`.
    pub fn cascade(to_y: &CondPmf, y_to_z: &CondPmf, cost: Vec<f64>, budget: f64) -> Result<Self> {
        if to_y.outputs() != y_to_z.inputs() {
            return Err(Error::DimensionMismatch("cascade stages do not chain".into()));
        }
        let (ny, nz) = (to_y.outputs(), y_to_z.outputs());
        let rows = (0..to_y.inputs())
            .map(|x| {
                (0..ny * nz)
                    .map(|k| to_y.get(x, k / nz) * y_to_z.get(k / nz, k % nz))
                    .collect()
            })
            .collect();
        Self::new(ny, nz, CondPmf::from_rows(rows)?, cost, budget)
    }

    pub fn from_spec(spec: &ChannelSpec) -> Result<Self> {
        let malformed = |msg: String| Error::MalformedChannelFile(msg);
        if spec.kernel.len() != spec.x_size {
            return Err(malformed(format!(
                "kernel has {} rows, x_size is {}",
                spec.kernel.len(),
                spec.x_size
            )));
        }
        if let Some((x, row)) = spec
            .kernel
            .iter()
            .enumerate()
            .find(|(_, r)| r.len() != spec.y_size * spec.z_size)
        {
            return Err(malformed(format!(
                "kernel row {x} has {} entries, expected y_size*z_size = {}",
                row.len(),
                spec.y_size * spec.z_size
            )));
        }
        if spec.cost.len() != spec.x_size {
            return Err(malformed(format!(
                "cost has {} entries, x_size is {}",
                spec.cost.len(),
                spec.x_size
            )));
        }
        let kernel = CondPmf::from_rows(spec.kernel.clone()).map_err(|e| malformed(e.to_string()))?;
        Self::new(spec.y_size, spec.z_size, kernel, spec.cost.clone(), spec.budget).map_err(
            |e| match e {
                Error::BudgetBelowMinCost { .. } => e,
                other => malformed(other.to_string()),
            },
        )
    }

    pub fn to_spec(&self) -> ChannelSpec {
        ChannelSpec {
            x_size: self.x_size,
            y_size: self.y_size,
            z_size: self.z_size,
            kernel: self.kernel.rows().map(<[f64]>::to_vec).collect(),
            cost: self.cost.clone(),
            budget: self.budget,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ChannelSpec =
            serde_json::from_str(text).map_err(|e| Error::MalformedChannelFile(e.to_string()))?;
        Self::from_spec(&spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_spec()).expect("channel spec serializes")
    }

    pub fn x_size(&self) -> usize {
        self.x_size
    }

    pub fn y_size(&self) -> usize {
        self.y_size
    }

    pub fn z_size(&self) -> usize {
        self.z_size
    }

    pub fn kernel(&self) -> &CondPmf {
        &self.kernel
    }

    pub fn cost(&self) -> &[f64] {
        &self.cost
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn c_min(&self) -> f64 {
        self.cost.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn c_max(&self) -> f64 {
        self.cost.iter().cloned().fold(0.0, f64::max)
    }

    /// Same channel and cost function under a different budget.
    pub fn with_budget(&self, budget: f64) -> Result<Self> {
        let c_min = self.c_min();
        if !(budget >= c_min) {
            return Err(Error::BudgetBelowMinCost { budget, c_min });
        }
        Ok(Self {
            budget,
            ..self.clone()
        })
    }

    /// The channel with the roles of the legitimate receiver and the
    /// eavesdropper exchanged.
    pub fn swapped(&self) -> Self {
        let (ny, nz) = (self.y_size, self.z_size);
        let rows = (0..self.x_size)
            .map(|x| {
                let row = self.kernel.row(x);
                (0..nz * ny).map(|k| row[(k % ny) * nz + k / ny]).collect()
            })
            .collect();
        Self::new(
            nz,
            ny,
            CondPmf::from_rows(rows).expect("permuted rows stay stochastic"),
            self.cost.clone(),
            self.budget,
        )
        .expect("swapping outputs preserves validity")
    }

    /// `(P_{Y|X}, P_{Z|X})`.
    pub fn marginal_kernels(&self) -> (&CondPmf, &CondPmf) {
        (&self.to_y, &self.to_z)
    }

    /// `E[C(X)]` under `px`.
    pub fn expected_cost(&self, px: &Pmf) -> f64 {
        px.expect(&self.cost)
    }
}

/// Which ordering a less-noisy query asks about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseOrder {
    /// `Y` is less noisy than `Z`: `I(U;Y) >= I(U;Z)` for every `P_{U,X}`.
    YOverZ,
    /// `Z` is less noisy than `Y`.
    ZOverY,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum LessNoisyVerdict {
    /// No violating `P_{U,X}` was found by the search.
    Holds { best_gap: f64, starts: usize },
    /// A certified violation: `gap` is the directly evaluated
    /// `I(U;worse) - I(U;better)` at `p_ux` (rows indexed by `u`).
    Counterexample { p_ux: Vec<Vec<f64>>, gap: f64 },
}

impl LessNoisyVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, LessNoisyVerdict::Holds { .. })
    }
}

/// A violation must exceed this after direct re-evaluation to be reported.
pub const LESS_NOISY_CERT_TOL: f64 = 1e-9;
pub const LESS_NOISY_DEFAULT_STARTS: usize = 200;

/// `I(U;Y) - I(U;Z)` for a joint `P_{U,X}` given as rows `p_ux[u][x]`.
pub fn auxiliary_advantage(ch: &WiretapChannel, p_ux: &[Vec<f64>]) -> Result<f64> {
    let (to_y, to_z) = ch.marginal_kernels();
    let flat: Vec<f64> = p_ux.iter().flatten().cloned().collect();
    let joint = JointPmf::new(vec![p_ux.len(), ch.x_size()], flat)?;
    let pu = joint.marginal_pmf(0);
    let through = |k: &CondPmf| -> Result<f64> {
        let mut out = Vec::with_capacity(p_ux.len() * k.outputs());
        for row in p_ux {
            let mut acc = vec![0.0; k.outputs()];
            for (x, &p) in row.iter().enumerate() {
                for (o, &w) in k.row(x).iter().enumerate() {
                    acc[o] += p * w;
                }
            }
            out.extend(acc);
        }
        Ok(mutual_information(&JointPmf::new(vec![pu.len(), k.outputs()], out)?))
    };
    Ok(through(to_y)? - through(to_z)?)
}

/// Randomized falsifier for a less-noisy ordering. Searches binary `U` by
/// multi-start maximization of the violation and certifies any hit by
/// re-evaluating it directly.
pub fn check_less_noisy(
    ch: &WiretapChannel,
    order: NoiseOrder,
    samples: usize,
    seed: u64,
) -> Result<LessNoisyVerdict> {
    if samples == 0 {
        return Err(Error::InvalidArgument("less-noisy search needs at least one start".into()));
    }
    // Violating "Y over Z" means maximizing I(U;Z) - I(U;Y): the single-
    // auxiliary objective on the channel with outputs exchanged.
    let worse_first = match order {
        NoiseOrder::YOverZ => ch.swapped(),
        NoiseOrder::ZOverY => ch.clone(),
    };
    let free = worse_first.with_free_cost();
    let opts = OptimizerOptions {
        starts: samples,
        seed,
        v_size: Some(2),
        ..OptimizerOptions::default()
    };
    let result = capacity::maximize_single_aux_with(&free, &opts, Purpose::LessNoisyStart)?;
    let p_vx = match &result.argmax {
        capacity::Argmax::Single(SingleAuxJoint { p_vx, .. }) => p_vx.clone(),
        capacity::Argmax::Two(_) => unreachable!("single-aux search returns a single-aux joint"),
    };
    let gap = auxiliary_advantage(&worse_first, &p_vx)?;
    if gap > LESS_NOISY_CERT_TOL {
        Ok(LessNoisyVerdict::Counterexample { p_ux: p_vx, gap })
    } else {
        Ok(LessNoisyVerdict::Holds {
            best_gap: gap,
            starts: samples,
        })
    }
}

impl WiretapChannel {
    /// The same kernel with every cost zero and budget zero.
    pub(crate) fn with_free_cost(&self) -> Self {
        Self {
            cost: vec![0.0; self.x_size],
            budget: 0.0,
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn bsc(eps: f64) -> CondPmf {
        CondPmf::from_rows(vec![vec![1.0 - eps, eps], vec![eps, 1.0 - eps]]).unwrap()
    }

    fn prop1_like() -> WiretapChannel {
        crate::prop1::build_channel()
    }

    #[test]
    fn prop1_eavesdropper_sees_the_timing_letter() {
        let ch = prop1_like();
        let (_, to_z) = ch.marginal_kernels();
        for (x, zt) in [(0, 0), (1, 1), (2, 0), (3, 1)] {
            assert_eq!(to_z.get(x, zt), 1.0);
        }
    }

    #[test]
    fn identity_channel_marginals() {
        let k = 3;
        let rows = (0..k)
            .map(|x| (0..k * k).map(|o| if o == x * k + x { 1.0 } else { 0.0 }).collect())
            .collect();
        let ch = WiretapChannel::new(k, k, CondPmf::from_rows(rows).unwrap(), vec![0.0; k], 0.0)
            .unwrap();
        let (y, z) = ch.marginal_kernels();
        assert_eq!(y, &CondPmf::identity(k));
        assert_eq!(z, &CondPmf::identity(k));
    }

    #[test]
    fn random_kernel_marginals_are_stochastic() {
        let mut rng = crate::rng::stream(11, Purpose::Sampling, 0);
        let rows: Vec<Vec<f64>> = (0..3)
            .map(|_| crate::rng::uniform_simplex(&mut rng, 4))
            .collect();
        let ch = WiretapChannel::new(2, 2, CondPmf::from_rows(rows.clone()).unwrap(), vec![0.0; 3], 0.0)
            .unwrap();
        let (y, z) = ch.marginal_kernels();
        for x in 0..3 {
            assert!((y.row(x).iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!((z.row(x).iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!((y.get(x, 0) - rows[x][0] - rows[x][1]).abs() < 1e-15);
            assert!((z.get(x, 1) - rows[x][1] - rows[x][3]).abs() < 1e-15);
        }
    }

    #[test]
    fn expected_cost_examples() {
        let ch = prop1_like();
        // Z̃ ~ Ber(0.5), X̃ independent uniform.
        let px = Pmf::uniform(4);
        assert!((ch.expected_cost(&px) - 0.5).abs() < 1e-15);
        assert_eq!(ch.expected_cost(&Pmf::point_mass(4, 0)), ch.c_min());
    }

    #[test]
    fn budget_below_min_cost_is_rejected() {
        let ch = WiretapChannel::from_marginals(&bsc(0.1), &bsc(0.2), vec![1.0, 2.0], 1.0).unwrap();
        assert!(matches!(
            ch.with_budget(0.5),
            Err(Error::BudgetBelowMinCost { .. })
        ));
    }

    #[test]
    fn spec_round_trip_is_bitwise() {
        let ch = WiretapChannel::cascade(&bsc(0.1), &bsc(0.15), vec![0.3, 0.7], 0.5).unwrap();
        let text = ch.to_json();
        let back = WiretapChannel::from_json(&text).unwrap();
        assert_eq!(back, ch);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn malformed_files_are_reported() {
        let bad_rows = r#"{"x_size":2,"y_size":1,"z_size":2,"kernel":[[0.5,0.5],[0.5,0.6]],"cost":[0,0],"budget":0}"#;
        assert!(matches!(
            WiretapChannel::from_json(bad_rows),
            Err(Error::MalformedChannelFile(_))
        ));
        let bad_dims = r#"{"x_size":2,"y_size":2,"z_size":2,"kernel":[[0.5,0.5],[0.5,0.5]],"cost":[0,0],"budget":0}"#;
        assert!(matches!(
            WiretapChannel::from_json(bad_dims),
            Err(Error::MalformedChannelFile(_))
        ));
        let low_budget = r#"{"x_size":2,"y_size":1,"z_size":2,"kernel":[[0.5,0.5],[0.5,0.5]],"cost":[1,2],"budget":0.5}"#;
        assert!(matches!(
            WiretapChannel::from_json(low_budget),
            Err(Error::BudgetBelowMinCost { .. })
        ));
    }

    #[test]
    fn swapped_exchanges_marginals() {
        let ch = WiretapChannel::from_marginals(&bsc(0.1), &CondPmf::from_rows(vec![vec![0.2, 0.3, 0.5], vec![0.6, 0.1, 0.3]]).unwrap(), vec![0.0; 2], 0.0).unwrap();
        let s = ch.swapped();
        assert_eq!(s.marginal_kernels().0, ch.marginal_kernels().1);
        assert_eq!(s.marginal_kernels().1, ch.marginal_kernels().0);
        assert_eq!(s.swapped(), ch);
    }

    #[test]
    fn degraded_cascade_is_less_noisy() {
        let ch = WiretapChannel::cascade(&bsc(0.1), &bsc(0.15), vec![0.0; 2], 0.0).unwrap();
        let v = check_less_noisy(&ch, NoiseOrder::YOverZ, 32, 5).unwrap();
        assert!(v.holds(), "{v:?}");
    }

    #[test]
    fn reversed_cascade_has_a_certified_counterexample() {
        let ch = WiretapChannel::cascade(&bsc(0.1), &bsc(0.15), vec![0.0; 2], 0.0)
            .unwrap()
            .swapped();
        match check_less_noisy(&ch, NoiseOrder::YOverZ, 32, 5).unwrap() {
            LessNoisyVerdict::Counterexample { p_ux, gap } => {
                let direct = -auxiliary_advantage(&ch, &p_ux).unwrap();
                assert!(direct > LESS_NOISY_CERT_TOL);
                assert!((direct - gap).abs() < 1e-12);
            }
            v => panic!("expected a counterexample, got {v:?}"),
        }
    }

    #[test]
    fn prop1_channel_is_not_y_over_z() {
        let v = check_less_noisy(&prop1_like(), NoiseOrder::YOverZ, 32, 9).unwrap();
        assert!(!v.holds());
    }
}
