//! Spectral projected gradient ascent.

#[derive(Debug, Clone)]
pub struct AscentSettings {
    pub max_iters: usize,
    pub tol: f64,
}

#[derive(Debug, Clone)]
pub struct AscentOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `‖P(x + ∇f) - x‖₂`, the norm of the unit-step projected gradient map.
    pub gradient_norm: f64,
}

const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-18;
const MIN_SPECTRAL: f64 = 1e-10;
const MAX_SPECTRAL: f64 = 1e10;
/// Window of the nonmonotone acceptance test.
const MEMORY: usize = 10;
/// Consecutive iterations of negligible progress after which a run stops.
const STALL_LIMIT: usize = 50;

fn norm_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Maximizes `eval` over the convex set described by `project`, starting
/// from `x0`, by spectral projected gradient ascent: the trial step is the
/// Barzilai-Borwein length, the direction is `P(x + λ∇f) - x`, and the
/// step along it is backtracked until a nonmonotone Armijo test passes.
///
/// `eval(x, Some(g))` must return the value at `x` and write the gradient
/// into `g`; `eval(x, None)` returns only the value.
pub fn ascend<E, P>(x0: Vec<f64>, settings: &AscentSettings, mut eval: E, project: P) -> AscentOutcome
where
    E: FnMut(&[f64], Option<&mut [f64]>) -> f64,
    P: Fn(&mut [f64]),
{
    let n = x0.len();
    let mut x = x0;
    project(&mut x);
    let mut grad = vec![0.0; n];
    let mut f = eval(&x, Some(&mut grad));
    let mut history = vec![f];
    let mut best_f = f;
    let mut best_x = x.clone();
    // Projected-gradient norm at the best point; filled in on the next pass.
    let mut best_gradient_norm = None;
    let mut dir = vec![0.0; n];
    let mut cand = vec![0.0; n];
    let mut new_grad = vec![0.0; n];
    let mut lambda = 1.0;
    let mut iterations = 0;
    let mut stalled = 0;
    let mut converged = false;
    let mut gradient_norm;

    loop {
        for ((c, xi), gi) in cand.iter_mut().zip(&x).zip(&grad) {
            *c = xi + gi;
        }
        project(&mut cand);
        gradient_norm = norm_diff(&cand, &x);
        if best_gradient_norm.is_none() {
            best_gradient_norm = Some(gradient_norm);
        }
        if gradient_norm <= settings.tol {
            converged = true;
            break;
        }
        if iterations >= settings.max_iters || stalled >= STALL_LIMIT {
            break;
        }
        iterations += 1;

        for ((d, xi), gi) in dir.iter_mut().zip(&x).zip(&grad) {
            *d = xi + lambda * gi;
        }
        project(&mut dir);
        dir.iter_mut().zip(&x).for_each(|(d, xi)| *d -= xi);
        let slope = dot(&grad, &dir);
        let f_ref = history.iter().cloned().fold(f64::INFINITY, f64::min);

        let mut alpha = 1.0;
        let mut accepted = None;
        while alpha >= MIN_STEP {
            for ((c, xi), di) in cand.iter_mut().zip(&x).zip(&dir) {
                *c = xi + alpha * di;
            }
            let fc = eval(&cand, None);
            if fc.is_finite() && fc >= f_ref + ARMIJO * alpha * slope {
                accepted = Some(fc);
                break;
            }
            alpha *= 0.5;
        }
        let Some(fc) = accepted else {
            break;
        };
        if fc - best_f <= 1e-15 * (1.0 + best_f.abs()) {
            stalled += 1;
        } else {
            stalled = 0;
        }
        let fc = eval(&cand, Some(&mut new_grad));
        // s = cand - x, y = new_grad - grad; ascent wants s·y < 0.
        let (mut ss, mut sy) = (0.0, 0.0);
        for k in 0..n {
            let sk = cand[k] - x[k];
            ss += sk * sk;
            sy += sk * (new_grad[k] - grad[k]);
        }
        lambda = if sy < 0.0 { (ss / -sy).clamp(MIN_SPECTRAL, MAX_SPECTRAL) } else { MAX_SPECTRAL };
        std::mem::swap(&mut x, &mut cand);
        std::mem::swap(&mut grad, &mut new_grad);
        f = fc;
        if f > best_f {
            best_f = f;
            best_x.copy_from_slice(&x);
            best_gradient_norm = None;
        }
        history.push(f);
        if history.len() > MEMORY {
            history.remove(0);
        }
    }

    // The nonmonotone search may leave the best iterate; report that one.
    if f < best_f {
        return AscentOutcome {
            x: best_x,
            value: best_f,
            iterations,
            converged: false,
            gradient_norm: best_gradient_norm.unwrap_or(gradient_norm),
        };
    }
    AscentOutcome {
        x,
        value: f,
        iterations,
        converged,
        gradient_norm,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::projection::project_simplex;

    #[test]
    fn maximizes_a_concave_quadratic_on_the_simplex() {
        // max -‖x - c‖² with c outside the simplex: optimum is P(c).
        let c = [0.9, 0.6, -0.2];
        let out = ascend(
            vec![1.0 / 3.0; 3],
            &AscentSettings {
                max_iters: 500,
                tol: 1e-12,
            },
            |x, g| {
                if let Some(g) = g {
                    for ((gi, xi), ci) in g.iter_mut().zip(x).zip(&c) {
                        *gi = -2.0 * (xi - ci);
                    }
                }
                -x.iter().zip(&c).map(|(a, b)| (a - b).powi(2)).sum::<f64>()
            },
            project_simplex,
        );
        assert!(out.converged);
        let mut expect = c.to_vec();
        project_simplex(&mut expect);
        assert!(norm_diff(&out.x, &expect) < 1e-10);
    }

    #[test]
    fn entropy_is_maximized_at_uniform() {
        let out = ascend(
            vec![0.7, 0.2, 0.05, 0.05],
            &AscentSettings {
                max_iters: 2000,
                tol: 1e-10,
            },
            |x, g| {
                if let Some(g) = g {
                    for (gi, &xi) in g.iter_mut().zip(x) {
                        *gi = -(xi.max(1e-300).log2() + std::f64::consts::LOG2_E);
                    }
                }
                crate::prob::entropy_of(x)
            },
            project_simplex,
        );
        assert!((out.value - 2.0).abs() < 1e-9, "{}", out.value);
    }
}
