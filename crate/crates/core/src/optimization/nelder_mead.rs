//! Adaptive Nelder–Mead simplex search.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    pub max_evals: usize,
    /// Stop once the spread of simplex values is at most this.
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexOutcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Minimizes `f` from `x0` with initial edge lengths `step`.
///
/// Non-finite values are treated as `+inf`. After convergence the search is
/// restarted from the best vertex until a restart stops improving.
pub fn minimize<F>(mut f: F, x0: &[f64], step: &[f64], opts: SimplexOptions) -> SimplexOutcome
where
    F: FnMut(&[f64]) -> f64,
{
    let mut eval = |x: &[f64]| {
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };
    let n = x0.len();
    if n == 0 {
        let v = eval(x0);
        return SimplexOutcome { x: Vec::new(), f: v, evaluations: 1, converged: true };
    }
    let mut best = SimplexOutcome { x: x0.to_vec(), f: f64::INFINITY, evaluations: 0, converged: false };
    let mut scale = 1.0;
    for _ in 0..4 {
        let budget = opts.max_evals.saturating_sub(best.evaluations);
        if budget <= n + 1 {
            break;
        }
        let steps: Vec<f64> = step.iter().map(|s| s * scale).collect();
        let run = simplex_pass(&mut eval, &best.x, &steps, budget, opts.tolerance);
        let improved = best.f - run.f;
        let total = best.evaluations + run.evaluations;
        let first = !best.f.is_finite() && best.evaluations == 0;
        if run.f <= best.f {
            best.x = run.x;
            best.f = run.f;
        }
        best.evaluations = total;
        best.converged = run.converged;
        if !run.converged || (!first && !(improved > opts.tolerance)) {
            break;
        }
        scale *= 0.5;
    }
    best
}

fn simplex_pass<F>(eval: &mut F, x0: &[f64], step: &[f64], budget: usize, tol: f64) -> SimplexOutcome
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let nf = n as f64;
    let (alpha, beta, gamma, delta) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);

    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    pts.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += step[i];
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| eval(p)).collect();
    let mut evals = n + 1;
    let mut order: Vec<usize> = (0..=n).collect();
    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut trial2 = vec![0.0; n];

    let converged = loop {
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        let (lo, hi, second) = (order[0], order[n], order[n - 1]);
        let spread = vals[hi] - vals[lo];
        if vals[lo].is_finite() && spread <= tol {
            break true;
        }
        if evals >= budget {
            break false;
        }
        centroid.iter_mut().for_each(|c| *c = 0.0);
        for &i in &order[..n] {
            for (c, p) in centroid.iter_mut().zip(&pts[i]) {
                *c += p / nf;
            }
        }
        for k in 0..n {
            trial[k] = centroid[k] + alpha * (centroid[k] - pts[hi][k]);
        }
        let fr = eval(&trial);
        evals += 1;
        if fr < vals[lo] {
            for k in 0..n {
                trial2[k] = centroid[k] + beta * (trial[k] - centroid[k]);
            }
            let fe = eval(&trial2);
            evals += 1;
            if fe < fr {
                pts[hi].copy_from_slice(&trial2);
                vals[hi] = fe;
            } else {
                pts[hi].copy_from_slice(&trial);
                vals[hi] = fr;
            }
            continue;
        }
        if fr < vals[second] {
            pts[hi].copy_from_slice(&trial);
            vals[hi] = fr;
            continue;
        }
        let outside = fr < vals[hi];
        for k in 0..n {
            trial2[k] = if outside {
                centroid[k] + gamma * (trial[k] - centroid[k])
            } else {
                centroid[k] - gamma * (centroid[k] - pts[hi][k])
            };
        }
        let fc = eval(&trial2);
        evals += 1;
        if (outside && fc <= fr) || (!outside && fc < vals[hi]) {
            pts[hi].copy_from_slice(&trial2);
            vals[hi] = fc;
            continue;
        }
        let best = pts[lo].clone();
        for &i in &order[1..] {
            for k in 0..n {
                pts[i][k] = best[k] + delta * (pts[i][k] - best[k]);
            }
            vals[i] = eval(&pts[i]);
        }
        evals += n;
    };
    let lo = (0..=n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap_or(0);
    SimplexOutcome { x: pts[lo].clone(), f: vals[lo], evaluations: evals, converged }
}

#[cfg(test)]
mod tests {
    use super::*;

    const OPTS: SimplexOptions = SimplexOptions { max_evals: 20_000, tolerance: 1e-14 };

    #[test]
    fn quadratic_bowl() {
        let r = minimize(|x| (x[0] - 1.0).powi(2) + 10.0 * (x[1] + 2.0).powi(2), &[0.0, 0.0], &[0.5, 0.5], OPTS);
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] + 2.0).abs() < 1e-6);
    }

    #[test]
    fn rosenbrock() {
        let r =
            minimize(|x| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2), &[-1.2, 1.0], &[0.5, 0.5], OPTS);
        assert!(r.f < 1e-10, "{r:?}");
    }

    #[test]
    fn infinite_region_is_avoided() {
        let r = minimize(|x| if x[0] < 0.0 { f64::NAN } else { (x[0] - 0.3).powi(2) }, &[1.0], &[0.5], OPTS);
        assert!((r.x[0] - 0.3).abs() < 1e-6);
    }

    #[test]
    fn never_worse_than_start() {
        let f = |x: &[f64]| x.iter().map(|v| v.cos()).sum::<f64>();
        let x0 = [0.1, 2.0, -0.4];
        let r = minimize(f, &x0, &[1.0; 3], SimplexOptions { max_evals: 30, tolerance: 1e-12 });
        assert!(r.f <= f(&x0));
    }

    #[test]
    fn zero_dimensional() {
        let r = minimize(|_| 3.0, &[], &[], OPTS);
        assert_eq!(r.f, 3.0);
        assert!(r.converged);
    }
}
