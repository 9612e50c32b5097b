//! Euclidean projections onto the probability simplex and onto its
//! intersection with a linear cost half-space.

/// Projects `y` onto `{x >= 0, Σ x = 1}` in place (sort-based).
pub fn project_simplex(y: &mut [f64]) {
    let n = y.len();
    if n == 0 {
        return;
    }
    let mut sorted: Vec<f64> = y.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite coordinates"));
    let mut cum = 0.0;
    let mut tau = 0.0;
    for (i, &s) in sorted.iter().enumerate() {
        cum += s;
        let t = (cum - 1.0) / (i + 1) as f64;
        if s - t > 0.0 {
            tau = t;
        } else {
            break;
        }
    }
    y.iter_mut().for_each(|v| *v = (*v - tau).max(0.0));
    // Renormalize away the last few ulps.
    let s: f64 = y.iter().sum();
    if s > 0.0 {
        y.iter_mut().for_each(|v| *v /= s);
    }
}

/// Projects onto the simplex restricted to coordinates with `allowed[i]`;
/// the others are set to zero.
pub fn project_simplex_face(y: &mut [f64], allowed: &[bool]) {
    let mut sub: Vec<f64> = y
        .iter()
        .zip(allowed)
        .filter(|(_, &a)| a)
        .map(|(&v, _)| v)
        .collect();
    project_simplex(&mut sub);
    let mut it = sub.into_iter();
    for (v, &a) in y.iter_mut().zip(allowed) {
        *v = if a { it.next().expect("one value per allowed slot") } else { 0.0 };
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Projects `y` onto `{x >= 0, Σ x = 1, c·x <= budget}`.
///
/// The minimizer is `P_simplex(y - μ c)` for the smallest `μ >= 0` meeting the
/// budget; `μ` is found by bisection and the returned point is always on the
/// feasible side. Requires `budget > min c` (the degenerate face is handled by
/// [`project_simplex_face`]).
pub fn project_capped_simplex(y: &mut [f64], cost: &[f64], budget: f64) {
    debug_assert_eq!(y.len(), cost.len());
    let base = y.to_vec();
    let at = |mu: f64, out: &mut [f64]| {
        for ((o, b), c) in out.iter_mut().zip(&base).zip(cost) {
            *o = b - mu * c;
        }
        project_simplex(out);
    };
    at(0.0, y);
    if dot(y, cost) <= budget {
        return;
    }
    let mut work = vec![0.0; y.len()];
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    loop {
        at(hi, &mut work);
        if dot(&work, cost) <= budget {
            break;
        }
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            break;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        at(mid, &mut work);
        if dot(&work, cost) <= budget {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    at(hi, y);
}
