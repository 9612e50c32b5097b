//! Finite-alphabet probability vectors, kernels, joints, and the information
//! measures built on them. All information quantities are in bits.
//!
//! Constructors validate and (within [`RENORM_TOL`]) renormalize, so every
//! value of these types satisfies its invariants and the measures below never
//! fail on a well-formed input.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Accepted deviation of a stored probability vector from summing to one.
pub const PMF_TOL: f64 = 1e-12;
/// Inputs within this distance of summing to one are renormalized; anything
/// further away is rejected.
pub const RENORM_TOL: f64 = 1e-9;

/// `x log2 x` with the `0 log 0 = 0` convention.
#[inline]
pub(crate) fn xlog2x(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

/// Entropy of a nonnegative vector (not required to be normalized).
#[inline]
pub(crate) fn entropy_of(v: &[f64]) -> f64 {
    -v.iter().map(|&x| xlog2x(x)).sum::<f64>()
}

fn validated(mut probs: Vec<f64>) -> Result<Vec<f64>> {
    if probs.is_empty() {
        return Err(Error::InvalidPmf("empty alphabet".into()));
    }
    if let Some((i, &x)) = probs
        .iter()
        .enumerate()
        .find(|(_, x)| !x.is_finite() || **x < 0.0)
    {
        return Err(Error::InvalidPmf(format!("entry {i} is {x}")));
    }
    let sum: f64 = probs.iter().sum();
    let dev = (sum - 1.0).abs();
    if dev > RENORM_TOL {
        return Err(Error::InvalidPmf(format!("entries sum to {sum}")));
    }
    if dev > PMF_TOL {
        probs.iter_mut().for_each(|x| *x /= sum);
    }
    Ok(probs)
}

/// A probability mass function on `{0, .., k-1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Pmf {
    probs: Vec<f64>,
}

impl Pmf {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        Ok(Self {
            probs: validated(probs)?,
        })
    }

    pub fn uniform(k: usize) -> Self {
        assert!(k > 0, "uniform PMF needs a nonempty alphabet");
        Self {
            probs: vec![1.0 / k as f64; k],
        }
    }

    pub fn point_mass(k: usize, at: usize) -> Self {
        assert!(at < k, "point mass index {at} outside alphabet of size {k}");
        let mut probs = vec![0.0; k];
        probs[at] = 1.0;
        Self { probs }
    }

    /// `Ber(p)` on `{0, 1}` with `P(1) = p`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        Self::new(vec![1.0 - p, p])
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, x: usize) -> f64 {
        self.probs[x]
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.probs
    }

    /// Expectation of `f` indexed by symbol.
    pub fn expect(&self, f: &[f64]) -> f64 {
        assert_eq!(f.len(), self.len(), "function length must match alphabet");
        self.probs.iter().zip(f).map(|(p, c)| p * c).sum()
    }

    /// Applies a relabeling `perm` so that symbol `x` becomes `perm[x]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.len());
        let mut probs = vec![0.0; self.len()];
        for (x, &p) in self.probs.iter().enumerate() {
            probs[perm[x]] = p;
        }
        Self { probs }
    }
}

impl<'de> Deserialize<'de> for Pmf {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let probs = Vec::<f64>::deserialize(d)?;
        Pmf::new(probs).map_err(serde::de::Error::custom)
    }
}

/// A row-stochastic kernel from an input alphabet of size `inputs` to an
/// output alphabet of size `outputs`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CondPmf {
    inputs: usize,
    outputs: usize,
    data: Vec<f64>,
}

impl CondPmf {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let inputs = rows.len();
        if inputs == 0 {
            return Err(Error::InvalidPmf("kernel has no rows".into()));
        }
        let outputs = rows[0].len();
        let mut data = Vec::with_capacity(inputs * outputs);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != outputs {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {outputs}",
                    row.len()
                )));
            }
            let row = validated(row).map_err(|e| match e {
                Error::InvalidPmf(msg) => Error::InvalidPmf(format!("row {i}: {msg}")),
                other => other,
            })?;
            data.extend(row);
        }
        Ok(Self {
            inputs,
            outputs,
            data,
        })
    }

    pub fn from_flat(inputs: usize, outputs: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != inputs * outputs || inputs == 0 {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {inputs}x{outputs} kernel",
                data.len()
            )));
        }
        Self::from_rows(data.chunks(outputs).map(<[f64]>::to_vec).collect())
    }

    pub fn identity(k: usize) -> Self {
        let mut data = vec![0.0; k * k];
        for i in 0..k {
            data[i * k + i] = 1.0;
        }
        Self {
            inputs: k,
            outputs: k,
            data,
        }
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.outputs..(i + 1) * self.outputs]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.outputs)
    }

    pub fn get(&self, i: usize, o: usize) -> f64 {
        self.data[i * self.outputs + o]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    /// Kernel composition: `(self ∘ next)(o | i) = Σ_k self(k | i) next(o | k)`.
    pub fn then(&self, next: &CondPmf) -> Result<CondPmf> {
        if self.outputs != next.inputs {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose {}->{} with {}->{}",
                self.inputs, self.outputs, next.inputs, next.outputs
            )));
        }
        let mut data = vec![0.0; self.inputs * next.outputs];
        for i in 0..self.inputs {
            let out = &mut data[i * next.outputs..(i + 1) * next.outputs];
            for (k, &w) in self.row(i).iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                for (o, &v) in next.row(k).iter().enumerate() {
                    out[o] += w * v;
                }
            }
        }
        CondPmf::from_flat(self.inputs, next.outputs, data)
    }

    /// Output distribution for input law `p`.
    pub fn push(&self, p: &Pmf) -> Pmf {
        assert_eq!(p.len(), self.inputs, "input law does not match kernel");
        let mut out = vec![0.0; self.outputs];
        for (i, &pi) in p.probs().iter().enumerate() {
            for (o, &w) in self.row(i).iter().enumerate() {
                out[o] += pi * w;
            }
        }
        Pmf::new(out).expect("pushforward of a PMF is a PMF")
    }

    /// Joint law `P(i, o) = p(i) K(o | i)`.
    pub fn joint_with(&self, p: &Pmf) -> JointPmf {
        assert_eq!(p.len(), self.inputs, "input law does not match kernel");
        let mut probs = Vec::with_capacity(self.inputs * self.outputs);
        for (i, &pi) in p.probs().iter().enumerate() {
            probs.extend(self.row(i).iter().map(|w| pi * w));
        }
        JointPmf::new(vec![self.inputs, self.outputs], probs).expect("product law is a PMF")
    }
}

/// A PMF over a product alphabet, stored as a dense row-major tensor.
/// Axes carry optional names so callers can refer to them by role.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    dims: Vec<usize>,
    names: Vec<String>,
    probs: Vec<f64>,
}

impl JointPmf {
    pub fn new(dims: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        let size: usize = dims.iter().product();
        if dims.is_empty() || size != probs.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for dims {dims:?}",
                probs.len()
            )));
        }
        let names = (0..dims.len()).map(|a| format!("axis{a}")).collect();
        Ok(Self {
            dims,
            names,
            probs: validated(probs)?,
        })
    }

    pub fn with_names(mut self, names: &[&str]) -> Self {
        assert_eq!(names.len(), self.dims.len(), "one name per axis");
        self.names = names.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn axis(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for a in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * self.dims[a + 1];
        }
        strides
    }

    /// Marginal over `keep` (in the given order), summing out every other axis.
    pub fn marginal(&self, keep: &[usize]) -> JointPmf {
        assert!(!keep.is_empty(), "marginal must keep at least one axis");
        assert!(keep.iter().all(|&a| a < self.dims.len()), "axis out of range");
        let strides = self.strides();
        let dims: Vec<usize> = keep.iter().map(|&a| self.dims[a]).collect();
        let mut out_strides = vec![1; keep.len()];
        for a in (0..keep.len().saturating_sub(1)).rev() {
            out_strides[a] = out_strides[a + 1] * dims[a + 1];
        }
        let mut probs = vec![0.0; dims.iter().product()];
        for (flat, &p) in self.probs.iter().enumerate() {
            let mut idx = 0;
            for (k, &a) in keep.iter().enumerate() {
                idx += (flat / strides[a]) % self.dims[a] * out_strides[k];
            }
            probs[idx] += p;
        }
        JointPmf {
            dims,
            names: keep.iter().map(|&a| self.names[a].clone()).collect(),
            probs,
        }
    }

    pub fn marginal_pmf(&self, axis: usize) -> Pmf {
        Pmf {
            probs: self.marginal(&[axis]).probs,
        }
    }

    /// Permutes the axes so that new axis `k` is old axis `order[k]`.
    pub fn permute_axes(&self, order: &[usize]) -> JointPmf {
        assert_eq!(order.len(), self.dims.len());
        self.marginal(order)
    }

    /// Independent product `p ⊗ q` as a 2-way joint.
    pub fn product(p: &Pmf, q: &Pmf) -> JointPmf {
        let probs = p
            .probs()
            .iter()
            .flat_map(|&a| q.probs().iter().map(move |&b| a * b))
            .collect();
        JointPmf {
            dims: vec![p.len(), q.len()],
            names: vec!["axis0".into(), "axis1".into()],
            probs,
        }
    }

    /// Flattens the joint into a single-axis PMF.
    pub fn flatten(&self) -> Pmf {
        Pmf {
            probs: self.probs.clone(),
        }
    }
}

/// Shannon entropy `H(p)` in bits.
pub fn entropy(p: &Pmf) -> f64 {
    entropy_of(p.probs()).max(0.0)
}

/// Entropy of a joint over all of its axes.
pub fn joint_entropy(j: &JointPmf) -> f64 {
    entropy_of(j.probs()).max(0.0)
}

/// `I(A;B)` for a 2-way joint.
pub fn mutual_information(j: &JointPmf) -> f64 {
    assert_eq!(j.dims().len(), 2, "mutual_information expects a 2-way joint");
    let (na, nb) = (j.dims()[0], j.dims()[1]);
    let mut pa = vec![0.0; na];
    let mut pb = vec![0.0; nb];
    for a in 0..na {
        for b in 0..nb {
            let p = j.probs()[a * nb + b];
            pa[a] += p;
            pb[b] += p;
        }
    }
    (entropy_of(&pa) + entropy_of(&pb) - entropy_of(j.probs())).max(0.0)
}

/// `I(A;B | U)` for a 3-way joint, where `given` names the conditioning axis
/// and the other two axes (in order) play `A` and `B`.
pub fn conditional_mutual_information(j: &JointPmf, given: usize) -> f64 {
    assert_eq!(j.dims().len(), 3, "conditional MI expects a 3-way joint");
    assert!(given < 3, "conditioning axis out of range");
    let rest: Vec<usize> = (0..3).filter(|&a| a != given).collect();
    let t = j.permute_axes(&[given, rest[0], rest[1]]);
    let (nu, na, nb) = (t.dims[0], t.dims[1], t.dims[2]);
    let mut total = 0.0;
    for u in 0..nu {
        let block = &t.probs[u * na * nb..(u + 1) * na * nb];
        let pu: f64 = block.iter().sum();
        if pu <= 0.0 {
            continue;
        }
        let mut pa = vec![0.0; na];
        let mut pb = vec![0.0; nb];
        for a in 0..na {
            for b in 0..nb {
                let p = block[a * nb + b] / pu;
                pa[a] += p;
                pb[b] += p;
            }
        }
        let joint: Vec<f64> = block.iter().map(|p| p / pu).collect();
        total += pu * (entropy_of(&pa) + entropy_of(&pb) - entropy_of(&joint)).max(0.0);
    }
    total
}

/// `D(p ‖ q)` in bits.
pub fn kl_divergence(p: &Pmf, q: &Pmf) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch(format!(
            "alphabets of size {} and {}",
            p.len(),
            q.len()
        )));
    }
    let mut d = 0.0;
    for (index, (&a, &b)) in p.probs().iter().zip(q.probs()).enumerate() {
        if a > 0.0 {
            if b <= 0.0 {
                return Err(Error::AbsoluteContinuityViolated { index, p: a });
            }
            d += a * (a / b).log2();
        }
    }
    Ok(d.max(0.0))
}

/// Total variation distance `½ Σ |p - q|`.
pub fn total_variation(p: &Pmf, q: &Pmf) -> f64 {
    assert_eq!(p.len(), q.len(), "total variation needs a shared alphabet");
    tv_of(p.probs(), q.probs())
}

#[inline]
pub(crate) fn tv_of(p: &[f64], q: &[f64]) -> f64 {
    (0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()).clamp(0.0, 1.0)
}

/// Letter counts of `seq` over an alphabet of size `alphabet`.
pub fn letter_counts(seq: &[usize], alphabet: usize) -> Result<Vec<usize>> {
    let mut counts = vec![0usize; alphabet];
    for &s in seq {
        if s >= alphabet {
            return Err(Error::UnknownSymbol {
                symbol: s,
                alphabet,
            });
        }
        counts[s] += 1;
    }
    Ok(counts)
}

/// Empirical PMF `ν(x) = count(x) / n`.
pub fn empirical_pmf(seq: &[usize], alphabet: usize) -> Result<Pmf> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    let counts = letter_counts(seq, alphabet)?;
    let n = seq.len() as f64;
    Ok(Pmf {
        probs: counts.into_iter().map(|c| c as f64 / n).collect(),
    })
}

/// Letter-typicality test `|ν(x) - p(x)| ≤ δ p(x)` for every symbol.
///
/// A symbol outside `p`'s alphabet makes the sequence atypical.
pub fn is_typical(seq: &[usize], p: &Pmf, delta: f64) -> bool {
    assert!(delta >= 0.0, "typicality slack must be nonnegative");
    if seq.is_empty() {
        return false;
    }
    match letter_counts(seq, p.len()) {
        Ok(counts) => counts_typical(&counts, seq.len(), p.probs(), delta),
        Err(_) => false,
    }
}

/// Typicality test on precomputed letter counts.
#[inline]
pub(crate) fn counts_typical(counts: &[usize], n: usize, p: &[f64], delta: f64) -> bool {
    let n = n as f64;
    // The 1e-12 relative slack absorbs rounding in `c / n` at exact boundaries.
    counts.iter().zip(p).all(|(&c, &px)| {
        if px <= 0.0 {
            c == 0
        } else {
            (c as f64 / n - px).abs() <= (delta + 1e-12) * px
        }
    })
}
