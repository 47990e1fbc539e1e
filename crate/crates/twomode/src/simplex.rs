//! Small Nelder-Mead simplex minimizer for the derivative-free searches in
//! this crate (passive-group optimization, waveplate fitting). Not exposed:
//! the parameter spaces here are 3-4 dimensional tori where the textbook
//! algorithm with standard coefficients is entirely adequate.

pub(crate) struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    // Callers judge success by their own value thresholds; the flag only
    // records whether the simplex collapsed before the iteration cap.
    #[allow(dead_code)]
    pub converged: bool,
}

/// Minimizes `f` starting from `x0`, with an initial simplex of edge
/// `initial_step` along each coordinate. Stops when every vertex is within
/// `param_tol` of the best one (converged) or after `max_iter` iterations.
pub(crate) fn minimize(
    f: &dyn Fn(&[f64]) -> f64,
    x0: &[f64],
    initial_step: f64,
    param_tol: f64,
    max_iter: usize,
) -> SimplexResult {
    let n = x0.len();
    let mut vertices: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    vertices.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += initial_step;
        vertices.push(v);
    }
    let mut values: Vec<f64> = vertices.iter().map(|v| f(v)).collect();

    let mut converged = false;
    for _ in 0..max_iter {
        // Order: best first, worst last.
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap());
        let best = order[0];
        let worst = order[n];
        let second_worst = order[n - 1];

        let spread = vertices
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&vertices[best])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max)
            })
            .fold(0.0f64, f64::max);
        if spread < param_tol {
            converged = true;
            break;
        }

        // Centroid of all but the worst vertex.
        let mut centroid = vec![0.0; n];
        for (i, v) in vertices.iter().enumerate() {
            if i == worst {
                continue;
            }
            for k in 0..n {
                centroid[k] += v[k];
            }
        }
        for c in centroid.iter_mut() {
            *c /= n as f64;
        }

        let lerp = |t: f64| -> Vec<f64> {
            (0..n)
                .map(|k| centroid[k] + t * (centroid[k] - vertices[worst][k]))
                .collect()
        };

        let reflected = lerp(1.0);
        let f_reflected = f(&reflected);
        if f_reflected < values[best] {
            let expanded = lerp(2.0);
            let f_expanded = f(&expanded);
            if f_expanded < f_reflected {
                vertices[worst] = expanded;
                values[worst] = f_expanded;
            } else {
                vertices[worst] = reflected;
                values[worst] = f_reflected;
            }
            continue;
        }
        if f_reflected < values[second_worst] {
            vertices[worst] = reflected;
            values[worst] = f_reflected;
            continue;
        }
        let contracted = if f_reflected < values[worst] {
            lerp(0.5)
        } else {
            lerp(-0.5)
        };
        let f_contracted = f(&contracted);
        if f_contracted < values[worst].min(f_reflected) {
            vertices[worst] = contracted;
            values[worst] = f_contracted;
            continue;
        }
        // Shrink toward the best vertex.
        let best_vertex = vertices[best].clone();
        for (i, v) in vertices.iter_mut().enumerate() {
            if i == best {
                continue;
            }
            for k in 0..n {
                v[k] = best_vertex[k] + 0.5 * (v[k] - best_vertex[k]);
            }
            values[i] = f(v);
        }
    }

    let mut best = 0;
    for i in 1..=n {
        if values[i] < values[best] {
            best = i;
        }
    }
    SimplexResult {
        x: vertices[best].clone(),
        value: values[best],
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_minimum() {
        let f = |x: &[f64]| (x[0] - 1.5).powi(2) + 3.0 * (x[1] + 0.5).powi(2);
        let r = minimize(&f, &[0.0, 0.0], 0.5, 1e-10, 500);
        assert!(r.converged);
        assert!((r.x[0] - 1.5).abs() < 1e-8);
        assert!((r.x[1] + 0.5).abs() < 1e-8);
    }

    #[test]
    fn finds_rosenbrock_valley() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let r = minimize(&f, &[-1.2, 1.0], 0.5, 1e-12, 2000);
        assert!(r.value < 1e-10);
    }

    #[test]
    fn reports_non_convergence_when_starved() {
        let f = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
        let r = minimize(&f, &[5.0, 5.0, 5.0], 1.0, 1e-14, 3);
        assert!(!r.converged);
    }
}
