//! Lawson–Hanson active-set solver for `min ‖A x − b‖₂` subject to `x ≥ 0`.

use nalgebra::{DMatrix, DVector};

#[derive(Clone, Copy, Debug, Default)]
pub struct NnlsOptions {
    /// Stop when no inactive gradient component exceeds this; `None` picks
    /// `10 · ε · ‖A‖₁ · max(rows, cols)`.
    pub tolerance: Option<f64>,
    pub max_iterations: usize,
}

#[derive(Clone, Debug)]
pub struct NnlsSolution {
    pub x: DVector<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn least_squares_on(a: &DMatrix<f64>, b: &DVector<f64>, passive: &[usize]) -> DVector<f64> {
    let sub = a.select_columns(passive);
    let svd = sub.svd(true, true);
    let eps = f64::EPSILON * a.nrows().max(passive.len()) as f64;
    let cutoff = eps * svd.singular_values.iter().copied().fold(0.0, f64::max);
    svd.solve(b, cutoff)
        .unwrap_or_else(|_| DVector::zeros(passive.len()))
}

pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>, opts: NnlsOptions) -> NnlsSolution {
    let (m, n) = a.shape();
    assert_eq!(b.len(), m, "right-hand side length");
    let norm1 = (0..n)
        .map(|j| a.column(j).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let tol = opts
        .tolerance
        .unwrap_or(10.0 * f64::EPSILON * norm1 * m.max(n) as f64);
    let max_iter = if opts.max_iterations == 0 {
        3 * n.max(10)
    } else {
        opts.max_iterations
    };

    let mut x = DVector::zeros(n);
    let mut in_passive = vec![false; n];
    let mut passive: Vec<usize> = Vec::new();
    let mut iterations = 0;
    let mut converged = false;

    // columns rejected since the last change of x
    let mut blocked = vec![false; n];
    loop {
        let w = a.transpose() * (b - a * &x);
        let candidate = (0..n)
            .filter(|&j| !in_passive[j] && !blocked[j])
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(t) = candidate.filter(|&t| w[t] > tol) else {
            converged = true;
            break;
        };
        if iterations >= max_iter {
            break;
        }
        in_passive[t] = true;
        passive.push(t);

        // a column whose own coefficient comes out nonpositive is a
        // round-off artifact; rejecting it prevents cycling
        let z = least_squares_on(a, b, &passive);
        iterations += 1;
        if z[passive.len() - 1] <= 0.0 {
            passive.pop();
            in_passive[t] = false;
            blocked[t] = true;
            continue;
        }
        blocked.iter_mut().for_each(|v| *v = false);
        let mut z = Some(z);

        loop {
            let z = match z.take() {
                Some(z) => z,
                None => {
                    iterations += 1;
                    least_squares_on(a, b, &passive)
                }
            };
            if z.iter().all(|&v| v > 0.0) {
                for (k, &j) in passive.iter().enumerate() {
                    x[j] = z[k];
                }
                break;
            }
            // step back towards x until the first passive entry hits zero
            let mut step = f64::INFINITY;
            for (k, &j) in passive.iter().enumerate() {
                if z[k] <= 0.0 {
                    let denom = x[j] - z[k];
                    if denom > 0.0 {
                        step = step.min(x[j] / denom);
                    }
                }
            }
            if !step.is_finite() {
                step = 0.0;
            }
            for (k, &j) in passive.iter().enumerate() {
                x[j] += step * (z[k] - x[j]);
            }
            let zero_tol = 10.0 * f64::EPSILON;
            passive.retain(|&j| {
                let keep = x[j] > zero_tol;
                if !keep {
                    x[j] = 0.0;
                    in_passive[j] = false;
                }
                keep
            });
            if passive.is_empty() || iterations >= max_iter {
                break;
            }
        }
    }

    let residual_norm = (a * &x - b).norm();
    NnlsSolution {
        x,
        residual_norm,
        iterations,
        converged,
    }
}
