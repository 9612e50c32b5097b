//! Allocation-light evaluation of the secrecy objectives and their exact
//! gradients in the optimizer's parameterization.
//!
//! The optimizer works with `q = P_{V,X}` (a `v × x` table) and, for the
//! two-auxiliary problem, `r = P_{U|V}` (a `v × u` table of rows). Then
//! `P_{U,V,X} = q(v, x) r(u | v)` satisfies `U - V - X` by construction and
//! the cost constraint is linear in `q` alone.
//!
//! For a kernel `W: X -> O` write `A(v, o) = Σ_x q(v, x) W(o | x)`. Then
//! `I(V;O|U) = Σ r(u|v) A(v,o) log[A(v,o) P(u) / (q(v) P(u,o))]`, and the
//! partial derivative with respect to the joint cell `P(u, v, o)` is the log
//! ratio itself (the `1/ln 2` terms of the four entropies cancel).

use crate::prob::CondPmf;

/// Floor applied inside logarithms so that boundary points produce large
/// finite slopes instead of infinities.
const LOG_FLOOR: f64 = 1e-300;

#[inline]
fn lg(x: f64) -> f64 {
    x.max(LOG_FLOOR).log2()
}

#[derive(Debug, Clone, Copy)]
pub struct Dims {
    pub u: usize,
    pub v: usize,
    pub x: usize,
}

/// Adds `sign * ∂I(V;O|U)` into the gradients and returns `I(V;O|U)`.
fn conditional_term(
    q: &[f64],
    r: &[f64],
    dims: Dims,
    w: &CondPmf,
    sign: f64,
    grad: Option<(&mut [f64], &mut [f64])>,
) -> f64 {
    let Dims { u: nu, v: nv, x: nx } = dims;
    let no = w.outputs();
    let mut a = vec![0.0; nv * no];
    let mut qv = vec![0.0; nv];
    for v in 0..nv {
        let row = &q[v * nx..(v + 1) * nx];
        let av = &mut a[v * no..(v + 1) * no];
        for (x, &p) in row.iter().enumerate() {
            qv[v] += p;
            if p == 0.0 {
                continue;
            }
            for (o, &wx) in w.row(x).iter().enumerate() {
                av[o] += p * wx;
            }
        }
    }
    let mut pu = vec![0.0; nu];
    let mut puo = vec![0.0; nu * no];
    for v in 0..nv {
        for u in 0..nu {
            let ruv = r[v * nu + u];
            pu[u] += ruv * qv[v];
            for o in 0..no {
                puo[u * no + o] += ruv * a[v * no + o];
            }
        }
    }
    let lpu: Vec<f64> = pu.iter().map(|&x| lg(x)).collect();
    let lpuo: Vec<f64> = puo.iter().map(|&x| lg(x)).collect();

    let mut value = 0.0;
    match grad {
        None => {
            for v in 0..nv {
                let lqv = lg(qv[v]);
                for o in 0..no {
                    let avo = a[v * no + o];
                    if avo <= 0.0 {
                        continue;
                    }
                    let la = lg(avo);
                    for u in 0..nu {
                        let cell = r[v * nu + u] * avo;
                        if cell > 0.0 {
                            value += cell * (la + lpu[u] - lqv - lpuo[u * no + o]);
                        }
                    }
                }
            }
        }
        Some((gq, gr)) => {
            let mut h = vec![0.0; no];
            for v in 0..nv {
                if qv[v] <= 0.0 {
                    // Unused letter: along e_x the ratio A(v,o) / q(v) tends to W(o|x).
                    for x in 0..nx {
                        let mut s = 0.0;
                        for (o, &wx) in w.row(x).iter().enumerate() {
                            if wx > 0.0 {
                                for u in 0..nu {
                                    if pu[u] > 0.0 {
                                        s += wx * r[v * nu + u] * (lg(wx) + lpu[u] - lpuo[u * no + o]);
                                    }
                                }
                            }
                        }
                        gq[v * nx + x] += sign * s;
                    }
                    continue;
                }
                let lqv = lg(qv[v]);
                h.iter_mut().for_each(|x| *x = 0.0);
                for o in 0..no {
                    let avo = a[v * no + o];
                    let la = lg(avo);
                    for u in 0..nu {
                        let ruv = r[v * nu + u];
                        // An unused `u` contributes nothing to first order.
                        let g = if pu[u] > 0.0 { la + lpu[u] - lqv - lpuo[u * no + o] } else { 0.0 };
                        let cell = ruv * avo;
                        if cell > 0.0 {
                            value += cell * g;
                        }
                        h[o] += ruv * g;
                        gr[v * nu + u] += sign * g * avo;
                    }
                }
                for x in 0..nx {
                    let wx = w.row(x);
                    let s: f64 = wx.iter().zip(&h).map(|(a, b)| a * b).sum();
                    gq[v * nx + x] += sign * s;
                }
            }
        }
    }
    value
}

/// `I(V;Y|U) - I(V;Z|U)` at `(q, r)`; fills `grad = [∂q | ∂r]` when given.
pub fn two_aux(
    q: &[f64],
    r: &[f64],
    dims: Dims,
    to_y: &CondPmf,
    to_z: &CondPmf,
    grad: Option<&mut [f64]>,
) -> f64 {
    let nq = dims.v * dims.x;
    match grad {
        None => {
            conditional_term(q, r, dims, to_y, 1.0, None)
                - conditional_term(q, r, dims, to_z, -1.0, None)
        }
        Some(g) => {
            g.iter_mut().for_each(|x| *x = 0.0);
            let (gq, gr) = g.split_at_mut(nq);
            let iy = conditional_term(q, r, dims, to_y, 1.0, Some((gq, gr)));
            let iz = conditional_term(q, r, dims, to_z, -1.0, Some((gq, gr)));
            iy - iz
        }
    }
}

/// `I(V;Y) - I(V;Z)` at `q`; the `U`-constant slice of [`two_aux`].
pub fn single_aux(
    q: &[f64],
    v: usize,
    x: usize,
    to_y: &CondPmf,
    to_z: &CondPmf,
    grad: Option<&mut [f64]>,
) -> f64 {
    let dims = Dims { u: 1, v, x };
    let r = vec![1.0; v];
    match grad {
        None => two_aux(q, &r, dims, to_y, to_z, None),
        Some(g) => {
            let mut full = vec![0.0; v * x + v];
            let f = two_aux(q, &r, dims, to_y, to_z, Some(&mut full));
            g.copy_from_slice(&full[..v * x]);
            f
        }
    }
}
