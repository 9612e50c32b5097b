//! Secrecy objectives and their maximization.
//!
//! * two auxiliaries: `max I(V;Y|U) - I(V;Z|U)` over `P_{U,V} P_{X|V}` with
//!   `E[C(X)] <= b`;
//! * one auxiliary: `max I(V;Y) - I(V;Z)` over `P_{V,X}` with the same cost
//!   restriction;
//! * no auxiliary (less-noisy channels): `max I(X;Y) - I(X;Z)` over `P_X`.
//!
//! All three are solved by multi-start projected gradient ascent. Reported
//! values are re-evaluated through [`crate::prob`] at the returned
//! distribution, so they are certified lower bounds on the true maxima.

pub mod ascent;
pub mod objective;
pub mod projection;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{NoiseOrder, WiretapChannel};
use crate::error::{Error, Result};
use crate::prob::{conditional_mutual_information, mutual_information, CondPmf, JointPmf, Pmf};
use crate::rng::{stream2, uniform_simplex, Purpose};

use ascent::{ascend, AscentOutcome, AscentSettings};
use objective::Dims;
use projection::{project_capped_simplex, project_simplex, project_simplex_face};

/// Feasibility slack on the cost constraint.
pub const FEASIBILITY_TOL: f64 = 1e-9;
/// Budgets within this distance of `c_min` are treated as the degenerate face.
const DEGENERATE_BUDGET_TOL: f64 = 1e-12;

/// `P_{U,V,X} = P_{U,V} P_{X|V}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AuxJointFile", into = "AuxJointFile")]
pub struct AuxJoint {
    p_uv: JointPmf,
    p_x_given_v: CondPmf,
}

/// JSON form: `p_uv` row-major over `(u, v)`, `p_x_given_v` one row per `v`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AuxJointFile {
    u_size: usize,
    v_size: usize,
    p_uv: Vec<f64>,
    p_x_given_v: Vec<Vec<f64>>,
}

impl TryFrom<AuxJointFile> for AuxJoint {
    type Error = Error;

    fn try_from(f: AuxJointFile) -> Result<Self> {
        AuxJoint::new(f.u_size, f.v_size, f.p_uv, f.p_x_given_v)
    }
}

impl From<AuxJoint> for AuxJointFile {
    fn from(a: AuxJoint) -> Self {
        AuxJointFile {
            u_size: a.u_size(),
            v_size: a.v_size(),
            p_uv: a.p_uv.probs().to_vec(),
            p_x_given_v: a.p_x_given_v.rows().map(<[f64]>::to_vec).collect(),
        }
    }
}

impl AuxJoint {
    pub fn new(
        u_size: usize,
        v_size: usize,
        p_uv: Vec<f64>,
        p_x_given_v: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if p_x_given_v.len() != v_size {
            return Err(Error::DimensionMismatch(format!(
                "{} rows of P(x|v) for |V| = {v_size}",
                p_x_given_v.len()
            )));
        }
        Ok(Self {
            p_uv: JointPmf::new(vec![u_size, v_size], p_uv)?.with_names(&["u", "v"]),
            p_x_given_v: CondPmf::from_rows(p_x_given_v)?,
        })
    }

    pub fn from_parts(p_uv: JointPmf, p_x_given_v: CondPmf) -> Result<Self> {
        if p_uv.dims().len() != 2 || p_uv.dims()[1] != p_x_given_v.inputs() {
            return Err(Error::DimensionMismatch(
                "P(u,v) and P(x|v) disagree on |V|".into(),
            ));
        }
        Ok(Self { p_uv, p_x_given_v })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("distribution file: {e}")))
    }

    pub fn u_size(&self) -> usize {
        self.p_uv.dims()[0]
    }

    pub fn v_size(&self) -> usize {
        self.p_uv.dims()[1]
    }

    pub fn x_size(&self) -> usize {
        self.p_x_given_v.outputs()
    }

    pub fn p_uv(&self) -> &JointPmf {
        &self.p_uv
    }

    pub fn p_x_given_v(&self) -> &CondPmf {
        &self.p_x_given_v
    }

    pub fn p_u(&self) -> Pmf {
        self.p_uv.marginal_pmf(0)
    }

    pub fn p_v(&self) -> Pmf {
        self.p_uv.marginal_pmf(1)
    }

    pub fn p_x(&self) -> Pmf {
        self.p_x_given_v.push(&self.p_v())
    }

    /// `P_{V|U}` rows; rows for zero-probability `u` are uniform.
    pub fn p_v_given_u(&self) -> CondPmf {
        let (nu, nv) = (self.u_size(), self.v_size());
        let rows = (0..nu)
            .map(|u| {
                let row = &self.p_uv.probs()[u * nv..(u + 1) * nv];
                let s: f64 = row.iter().sum();
                if s > 0.0 {
                    row.iter().map(|p| p / s).collect()
                } else {
                    vec![1.0 / nv as f64; nv]
                }
            })
            .collect();
        CondPmf::from_rows(rows).expect("normalized rows")
    }

    /// `P_{U,V,O}` for a kernel `W: X -> O`, axes `(u, v, o)`.
    pub fn joint_through(&self, w: &CondPmf) -> Result<JointPmf> {
        if w.inputs() != self.x_size() {
            return Err(Error::DimensionMismatch(format!(
                "distribution is over |X| = {}, kernel expects {}",
                self.x_size(),
                w.inputs()
            )));
        }
        let v_to_o = self.p_x_given_v.then(w)?;
        let (nu, nv, no) = (self.u_size(), self.v_size(), w.outputs());
        let mut probs = Vec::with_capacity(nu * nv * no);
        for u in 0..nu {
            for v in 0..nv {
                let p = self.p_uv.probs()[u * nv + v];
                probs.extend(v_to_o.row(v).iter().map(|w| p * w));
            }
        }
        Ok(JointPmf::new(vec![nu, nv, no], probs)?.with_names(&["u", "v", "o"]))
    }

    fn to_params(&self) -> (Vec<f64>, Vec<f64>) {
        let (nu, nv, nx) = (self.u_size(), self.v_size(), self.x_size());
        let pv = self.p_v();
        let mut q = vec![0.0; nv * nx];
        let mut r = vec![0.0; nv * nu];
        for v in 0..nv {
            for x in 0..nx {
                q[v * nx + x] = pv.get(v) * self.p_x_given_v.get(v, x);
            }
            for u in 0..nu {
                r[v * nu + u] = if pv.get(v) > 0.0 {
                    self.p_uv.probs()[u * nv + v] / pv.get(v)
                } else {
                    1.0 / nu as f64
                };
            }
        }
        (q, r)
    }

    fn from_params(q: &[f64], r: &[f64], dims: Dims, fallback_x: usize) -> Result<Self> {
        let Dims { u: nu, v: nv, x: nx } = dims;
        let mut p_uv = vec![0.0; nu * nv];
        let mut rows = Vec::with_capacity(nv);
        for v in 0..nv {
            let row = &q[v * nx..(v + 1) * nx];
            let pv: f64 = row.iter().sum();
            let rsum: f64 = r[v * nu..(v + 1) * nu].iter().sum();
            for u in 0..nu {
                p_uv[u * nv + v] = pv * r[v * nu + u] / rsum;
            }
            rows.push(if pv > 0.0 {
                row.iter().map(|p| p / pv).collect()
            } else {
                Pmf::point_mass(nx, fallback_x).into_vec()
            });
        }
        Self::new(nu, nv, p_uv, rows)
    }
}

/// `P_{V,X}` for the single-auxiliary problem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingleAuxJoint {
    pub v_size: usize,
    pub p_vx: Vec<Vec<f64>>,
    #[serde(skip)]
    joint: JointPmf,
}

impl SingleAuxJoint {
    pub fn new(p_vx: Vec<Vec<f64>>) -> Result<Self> {
        let v_size = p_vx.len();
        let x_size = p_vx.first().map_or(0, Vec::len);
        if p_vx.iter().any(|r| r.len() != x_size) {
            return Err(Error::DimensionMismatch("ragged P(v,x) rows".into()));
        }
        let joint = JointPmf::new(vec![v_size, x_size], p_vx.concat())?.with_names(&["v", "x"]);
        let p_vx = joint.probs().chunks(x_size).map(<[f64]>::to_vec).collect();
        Ok(Self {
            v_size,
            p_vx,
            joint,
        })
    }

    pub fn x_size(&self) -> usize {
        self.joint.dims()[1]
    }

    pub fn joint(&self) -> &JointPmf {
        &self.joint
    }

    pub fn p_v(&self) -> Pmf {
        self.joint.marginal_pmf(0)
    }

    pub fn p_x(&self) -> Pmf {
        self.joint.marginal_pmf(1)
    }

    /// `P_{V,O}` for a kernel `W: X -> O`.
    pub fn joint_through(&self, w: &CondPmf) -> Result<JointPmf> {
        if w.inputs() != self.x_size() {
            return Err(Error::DimensionMismatch(format!(
                "distribution is over |X| = {}, kernel expects {}",
                self.x_size(),
                w.inputs()
            )));
        }
        let mut probs = Vec::with_capacity(self.v_size * w.outputs());
        for row in &self.p_vx {
            let mut acc = vec![0.0; w.outputs()];
            for (x, &p) in row.iter().enumerate() {
                for (o, &wx) in w.row(x).iter().enumerate() {
                    acc[o] += p * wx;
                }
            }
            probs.extend(acc);
        }
        JointPmf::new(vec![self.v_size, w.outputs()], probs)
    }

    /// The same distribution as an [`AuxJoint`] with a constant `U`.
    pub fn as_aux_joint(&self) -> AuxJoint {
        let pv = self.p_v();
        let rows = self
            .p_vx
            .iter()
            .zip(pv.probs())
            .map(|(row, &p)| {
                if p > 0.0 {
                    row.iter().map(|x| x / p).collect()
                } else {
                    vec![1.0 / self.x_size() as f64; self.x_size()]
                }
            })
            .collect();
        AuxJoint::new(1, self.v_size, pv.into_vec(), rows).expect("slice of a valid joint")
    }
}

/// `Ĩ = I(V;Y|U) - I(V;Z|U)` under `a` composed with the channel.
pub fn objective_two_aux(a: &AuxJoint, ch: &WiretapChannel) -> Result<f64> {
    let (to_y, to_z) = ch.marginal_kernels();
    let uvy = a.joint_through(to_y)?;
    let uvz = a.joint_through(to_z)?;
    Ok(conditional_mutual_information(&uvy, 0) - conditional_mutual_information(&uvz, 0))
}

/// `I(V;Y) - I(V;Z)` under `s` composed with the channel.
pub fn objective_single_aux(s: &SingleAuxJoint, ch: &WiretapChannel) -> Result<f64> {
    let (to_y, to_z) = ch.marginal_kernels();
    Ok(mutual_information(&s.joint_through(to_y)?) - mutual_information(&s.joint_through(to_z)?))
}

pub fn is_feasible(a: &AuxJoint, ch: &WiretapChannel) -> bool {
    a.x_size() == ch.x_size() && ch.expected_cost(&a.p_x()) <= ch.budget() + FEASIBILITY_TOL
}

pub fn is_feasible_single(s: &SingleAuxJoint, ch: &WiretapChannel) -> bool {
    s.x_size() == ch.x_size() && ch.expected_cost(&s.p_x()) <= ch.budget() + FEASIBILITY_TOL
}

/// Optimizer knobs shared by every maximization routine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerOptions {
    pub starts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
    /// `|U|`; defaults to `|X|`.
    pub u_size: Option<usize>,
    /// `|V|`; defaults to `|X|²` (two auxiliaries) or `|X|` (one).
    pub v_size: Option<usize>,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            starts: 64,
            max_iters: 2000,
            tol: 1e-8,
            seed: 0,
            u_size: None,
            v_size: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Argmax {
    Two(AuxJoint),
    Single(SingleAuxJoint),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityResult {
    pub value: f64,
    pub budget: f64,
    pub argmax: Argmax,
    pub starts_run: usize,
    /// `None` when no start beat the constant-auxiliary point (value 0).
    pub best_start_index: Option<usize>,
    pub converged: bool,
    pub iterations: usize,
    pub final_gradient_norm: f64,
}

impl CapacityResult {
    pub fn expected_cost(&self, ch: &WiretapChannel) -> f64 {
        match &self.argmax {
            Argmax::Two(a) => ch.expected_cost(&a.p_x()),
            Argmax::Single(s) => ch.expected_cost(&s.p_x()),
        }
    }

    /// Re-evaluates the objective at the argmax.
    pub fn reevaluate(&self, ch: &WiretapChannel) -> Result<f64> {
        match &self.argmax {
            Argmax::Two(a) => objective_two_aux(a, ch),
            Argmax::Single(s) => objective_single_aux(s, ch),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub budget: f64,
    pub result: CapacityResult,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Two,
    Single,
    /// `V = X`: the variable is `P_X` alone.
    Input,
}

#[derive(Debug, Clone)]
enum CostSet {
    Simplex,
    Face(Vec<bool>),
    Capped(Vec<f64>, f64),
}

/// One instance of the parameterized problem on a fixed channel and budget.
struct Problem<'a> {
    ch: &'a WiretapChannel,
    kind: Kind,
    dims: Dims,
    set: CostSet,
}

impl<'a> Problem<'a> {
    fn new(ch: &'a WiretapChannel, kind: Kind, opts: &OptimizerOptions) -> Result<Self> {
        let nx = ch.x_size();
        let dims = match kind {
            Kind::Two => Dims {
                u: opts.u_size.unwrap_or(nx),
                v: opts.v_size.unwrap_or(nx * nx),
                x: nx,
            },
            Kind::Single => Dims {
                u: 1,
                v: opts.v_size.unwrap_or(nx),
                x: nx,
            },
            Kind::Input => Dims { u: 1, v: 1, x: nx },
        };
        if dims.u == 0 || dims.v == 0 {
            return Err(Error::InvalidArgument("auxiliary alphabets must be nonempty".into()));
        }
        let (b, c_min, c_max) = (ch.budget(), ch.c_min(), ch.c_max());
        if b < c_min {
            return Err(Error::BudgetBelowMinCost { budget: b, c_min });
        }
        let letter_cost = ch.cost();
        let blocks = if kind == Kind::Input { 1 } else { dims.v };
        let set = if b >= c_max {
            CostSet::Simplex
        } else if b <= c_min + DEGENERATE_BUDGET_TOL {
            let allowed = letter_cost.iter().map(|&c| c <= c_min + DEGENERATE_BUDGET_TOL);
            let allowed: Vec<bool> = allowed.collect();
            CostSet::Face(allowed.repeat(blocks))
        } else {
            CostSet::Capped(letter_cost.repeat(blocks), b)
        };
        Ok(Self { ch, kind, dims, set })
    }

    fn q_len(&self) -> usize {
        match self.kind {
            Kind::Input => self.dims.x,
            _ => self.dims.v * self.dims.x,
        }
    }

    fn len(&self) -> usize {
        match self.kind {
            Kind::Two => self.q_len() + self.dims.v * self.dims.u,
            _ => self.q_len(),
        }
    }

    fn project(&self, x: &mut [f64]) {
        let (q, r) = x.split_at_mut(self.q_len());
        match &self.set {
            CostSet::Simplex => project_simplex(q),
            CostSet::Face(allowed) => project_simplex_face(q, allowed),
            CostSet::Capped(cost, b) => project_capped_simplex(q, cost, *b),
        }
        if self.kind == Kind::Two {
            r.chunks_mut(self.dims.u).for_each(project_simplex);
        }
    }

    fn eval(&self, x: &[f64], grad: Option<&mut [f64]>) -> f64 {
        let (to_y, to_z) = self.ch.marginal_kernels();
        let Dims { u, v, x: nx } = self.dims;
        match self.kind {
            Kind::Two => {
                let (q, r) = x.split_at(self.q_len());
                objective::two_aux(q, r, self.dims, to_y, to_z, grad)
            }
            Kind::Single => objective::single_aux(x, v, nx, to_y, to_z, grad),
            Kind::Input => {
                let mut q = vec![0.0; nx * nx];
                for (k, &p) in x.iter().enumerate() {
                    q[k * nx + k] = p;
                }
                debug_assert_eq!(u, 1);
                match grad {
                    None => objective::single_aux(&q, nx, nx, to_y, to_z, None),
                    Some(g) => {
                        let mut gq = vec![0.0; nx * nx];
                        let f = objective::single_aux(&q, nx, nx, to_y, to_z, Some(&mut gq));
                        for (k, gk) in g.iter_mut().enumerate() {
                            *gk = gq[k * nx + k];
                        }
                        f
                    }
                }
            }
        }
    }

    /// Even starts draw every block from Dirichlet(1). Odd starts are vertex
    /// starts: Dirichlet(1) masses on `V` with deterministic rows of
    /// `P_{X|V}` and `P_{U|V}`, which seeds the search near the boundary
    /// points where optima of these objectives typically sit.
    fn random_start(&self, seed: u64, purpose: Purpose, start: usize, stream_id: u64) -> Vec<f64> {
        let mut rng = stream2(seed, purpose, start as u64, stream_id);
        let vertex = start % 2 == 1 && self.kind != Kind::Input;
        let letters: Vec<usize> = match &self.set {
            CostSet::Face(allowed) => (0..self.dims.x).filter(|&x| allowed[x]).collect(),
            _ => (0..self.dims.x).collect(),
        };
        let mut x = if vertex {
            let pv = uniform_simplex(&mut rng, self.dims.v);
            let mut q = vec![0.0; self.q_len()];
            for (v, p) in pv.into_iter().enumerate() {
                q[v * self.dims.x + letters[rng.random_range(0..letters.len())]] = p;
            }
            q
        } else {
            match &self.set {
                CostSet::Face(allowed) => {
                    let w = uniform_simplex(&mut rng, allowed.iter().filter(|&&a| a).count());
                    let mut it = w.into_iter();
                    allowed
                        .iter()
                        .map(|&a| if a { it.next().unwrap() } else { 0.0 })
                        .collect()
                }
                _ => uniform_simplex(&mut rng, self.q_len()),
            }
        };
        if self.kind == Kind::Two {
            for _ in 0..self.dims.v {
                if vertex {
                    let mut row = vec![0.0; self.dims.u];
                    row[rng.random_range(0..self.dims.u)] = 1.0;
                    x.extend(row);
                } else {
                    x.extend(uniform_simplex(&mut rng, self.dims.u));
                }
            }
        }
        self.project(&mut x);
        x
    }

    /// The constant-auxiliary point: all mass on one cheapest letter.
    fn trivial_point(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.len()];
        x[self.cheapest_letter()] = 1.0;
        if self.kind == Kind::Two {
            let q_len = self.q_len();
            for v in 0..self.dims.v {
                x[q_len + v * self.dims.u] = 1.0;
            }
        }
        x
    }

    fn cheapest_letter(&self) -> usize {
        let cost = self.ch.cost();
        (0..cost.len())
            .min_by(|&a, &b| cost[a].partial_cmp(&cost[b]).unwrap())
            .expect("nonempty input alphabet")
    }

    fn argmax(&self, x: &[f64]) -> Result<Argmax> {
        let nx = self.dims.x;
        Ok(match self.kind {
            Kind::Two => {
                let (q, r) = x.split_at(self.q_len());
                Argmax::Two(AuxJoint::from_params(q, r, self.dims, self.cheapest_letter())?)
            }
            Kind::Single => Argmax::Single(SingleAuxJoint::new(
                x.chunks(nx).map(<[f64]>::to_vec).collect(),
            )?),
            Kind::Input => {
                let rows = (0..nx)
                    .map(|v| (0..nx).map(|k| if k == v { x[k] } else { 0.0 }).collect())
                    .collect();
                Argmax::Single(SingleAuxJoint::new(rows)?)
            }
        })
    }

    fn params_of(&self, argmax: &Argmax) -> Option<Vec<f64>> {
        match (self.kind, argmax) {
            (Kind::Two, Argmax::Two(a))
                if a.u_size() == self.dims.u && a.v_size() == self.dims.v =>
            {
                let (mut q, r) = a.to_params();
                q.extend(r);
                Some(q)
            }
            (Kind::Single, Argmax::Single(s)) if s.v_size == self.dims.v => Some(s.p_vx.concat()),
            _ => None,
        }
    }
}

struct Run {
    result: CapacityResult,
    params: Vec<f64>,
}

fn run_multistart(
    problem: &Problem,
    opts: &OptimizerOptions,
    purpose: Purpose,
    stream_id: u64,
    warm: Option<Vec<f64>>,
) -> Result<Run> {
    if opts.starts == 0 {
        return Err(Error::InvalidArgument("at least one optimizer start is required".into()));
    }
    let settings = AscentSettings {
        max_iters: opts.max_iters,
        tol: opts.tol,
    };
    let outcomes: Vec<AscentOutcome> = (0..opts.starts)
        .into_par_iter()
        .map(|s| {
            let x0 = match (&warm, s) {
                (Some(w), 0) => w.clone(),
                _ => problem.random_start(opts.seed, purpose, s, stream_id),
            };
            ascend(x0, &settings, |x, g| problem.eval(x, g), |x| problem.project(x))
        })
        .collect();

    let mut best: Option<usize> = None;
    for (i, o) in outcomes.iter().enumerate() {
        if o.value.is_finite() && best.is_none_or(|b| o.value > outcomes[b].value) {
            best = Some(i);
        }
    }
    let ch = problem.ch;
    let certify = |params: &[f64]| -> Result<(Argmax, f64)> {
        let argmax = problem.argmax(params)?;
        let value = match &argmax {
            Argmax::Two(a) => objective_two_aux(a, ch)?,
            Argmax::Single(s) => objective_single_aux(s, ch)?,
        };
        Ok((argmax, value))
    };
    let mut chosen = None;
    if let Some(b) = best {
        let o = &outcomes[b];
        let (argmax, value) = certify(&o.x)?;
        if value >= 0.0 {
            chosen = Some((o.x.clone(), argmax, value, Some(b), o.converged, o.iterations, o.gradient_norm));
        }
    }
    let (params, argmax, value, best_start_index, converged, iterations, gradient_norm) = match chosen {
        Some(c) => c,
        None => {
            let params = problem.trivial_point();
            let (argmax, value) = certify(&params)?;
            (params, argmax, value, None, true, 0, 0.0)
        }
    };
    Ok(Run {
        result: CapacityResult {
            value,
            budget: ch.budget(),
            argmax,
            starts_run: opts.starts,
            best_start_index,
            converged,
            iterations,
            final_gradient_norm: gradient_norm,
        },
        params,
    })
}

/// `C̄(b)`: best feasible `P_{U,V,X}` found by multi-start ascent.
pub fn maximize_two_aux(ch: &WiretapChannel, opts: &OptimizerOptions) -> Result<CapacityResult> {
    let problem = Problem::new(ch, Kind::Two, opts)?;
    Ok(run_multistart(&problem, opts, Purpose::OptimizerStart, 0, None)?.result)
}

/// The single-auxiliary benchmark `max I(V;Y) - I(V;Z)` subject to the cost.
pub fn maximize_single_aux(ch: &WiretapChannel, opts: &OptimizerOptions) -> Result<CapacityResult> {
    maximize_single_aux_with(ch, opts, Purpose::OptimizerStart)
}

pub(crate) fn maximize_single_aux_with(
    ch: &WiretapChannel,
    opts: &OptimizerOptions,
    purpose: Purpose,
) -> Result<CapacityResult> {
    let problem = Problem::new(ch, Kind::Single, opts)?;
    Ok(run_multistart(&problem, opts, purpose, 0, None)?.result)
}

/// `max_{P_X : E[C(X)] <= b} I(X;Y) - I(X;Z)`, which equals `C̄(b)` when `Y`
/// is less noisy than `Z`. If the caller asserts `Z` less noisy than `Y` the
/// capacity is zero and no search is run.
///
/// The less-noisy hypothesis is the caller's responsibility; see
/// [`crate::channel::check_less_noisy`].
pub fn less_noisy_capacity(
    ch: &WiretapChannel,
    order: NoiseOrder,
    opts: &OptimizerOptions,
) -> Result<CapacityResult> {
    let problem = Problem::new(ch, Kind::Input, opts)?;
    match order {
        NoiseOrder::YOverZ => Ok(run_multistart(&problem, opts, Purpose::OptimizerStart, 0, None)?.result),
        NoiseOrder::ZOverY => {
            let params = problem.trivial_point();
            Ok(CapacityResult {
                value: 0.0,
                budget: ch.budget(),
                argmax: problem.argmax(&params)?,
                starts_run: 0,
                best_start_index: None,
                converged: true,
                iterations: 0,
                final_gradient_norm: 0.0,
            })
        }
    }
}

/// `C̄(b)` over an ascending budget grid. Each point after the first is
/// warm-started from the previous argmax (start 0) plus fresh random starts.
pub fn sweep_budget(
    ch: &WiretapChannel,
    grid: &[f64],
    opts: &OptimizerOptions,
) -> Result<Vec<SweepPoint>> {
    if grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::InvalidArgument("budget grid must be sorted ascending".into()));
    }
    let mut out: Vec<SweepPoint> = Vec::with_capacity(grid.len());
    let mut warm: Option<Vec<f64>> = None;
    for (k, &b) in grid.iter().enumerate() {
        let at = ch.with_budget(b)?;
        let problem = Problem::new(&at, Kind::Two, opts)?;
        let run = run_multistart(&problem, opts, Purpose::OptimizerStart, k as u64 + 1, warm.take())?;
        warm = Some(run.params);
        out.push(SweepPoint {
            budget: b,
            result: run.result,
        });
    }
    Ok(out)
}

/// Runs the two-auxiliary search with an explicit starting point added as
/// start 0 (e.g. a known witness).
pub fn maximize_two_aux_from(
    ch: &WiretapChannel,
    opts: &OptimizerOptions,
    start: &AuxJoint,
) -> Result<CapacityResult> {
    let problem = Problem::new(ch, Kind::Two, opts)?;
    let warm = problem.params_of(&Argmax::Two(start.clone()));
    if warm.is_none() {
        return Err(Error::DimensionMismatch(
            "starting point does not match the auxiliary cardinalities".into(),
        ));
    }
    Ok(run_multistart(&problem, opts, Purpose::OptimizerStart, 0, warm)?.result)
}
