//! Small numerical building blocks for the fitters.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Ordinary least squares y = slope x + intercept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// sqrt of the summed squared residuals.
    pub residual_norm: f64,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> Option<LineFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual_norm = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - slope * a - intercept).powi(2))
        .sum::<f64>()
        .sqrt();
    Some(LineFit {
        slope,
        intercept,
        residual_norm,
    })
}

pub const BOOTSTRAP_RESAMPLES: usize = 200;
pub const BOOTSTRAP_SEED: u64 = 0xb007_57a9;

/// Rng for resample `index`, independent of scheduling.
pub fn resample_rng(index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(BOOTSTRAP_SEED.wrapping_add(index as u64 * 0x9e37_79b9))
}

/// Standard deviation of `estimator` over residual-bootstrap resamples of
/// `fitted + residuals`. Resamples where the estimator fails are skipped.
pub fn residual_bootstrap<const K: usize>(
    fitted: &[f64],
    residuals: &[f64],
    estimator: impl Fn(&[f64]) -> Option<[f64; K]> + Sync,
) -> [f64; K] {
    let n = fitted.len();
    let samples: Vec<[f64; K]> = (0..BOOTSTRAP_RESAMPLES)
        .into_par_iter()
        .filter_map(|b| {
            let mut rng = resample_rng(b);
            let y: Vec<f64> = fitted
                .iter()
                .map(|f| f + residuals[rng.random_range(0..n)])
                .collect();
            estimator(&y)
        })
        .collect();
    let mut out = [0.0; K];
    if samples.len() < 2 {
        return out;
    }
    let m = samples.len() as f64;
    for (k, o) in out.iter_mut().enumerate() {
        let mean = samples.iter().map(|s| s[k]).sum::<f64>() / m;
        *o = (samples.iter().map(|s| (s[k] - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt();
    }
    out
}

/// Natural cubic spline through strictly increasing knots.
#[derive(Debug, Clone)]
pub struct Spline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl Spline {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Option<Self> {
        let n = x.len();
        if n < 2 || y.len() != n || x.windows(2).any(|w| w[1] <= w[0]) {
            return None;
        }
        // Second derivatives from the tridiagonal system (Thomas algorithm).
        let mut m = vec![0.0; n];
        if n > 2 {
            let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
            let k = n - 2;
            let mut diag = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            for i in 0..k {
                diag[i] = 2.0 * (h[i] + h[i + 1]);
                rhs[i] = 6.0 * ((y[i + 2] - y[i + 1]) / h[i + 1] - (y[i + 1] - y[i]) / h[i]);
            }
            for i in 1..k {
                let w = h[i] / diag[i - 1];
                diag[i] -= w * h[i];
                rhs[i] -= w * rhs[i - 1];
            }
            m[k] = rhs[k - 1] / diag[k - 1];
            for i in (0..k - 1).rev() {
                m[i + 1] = (rhs[i] - h[i + 1] * m[i + 2]) / diag[i];
            }
        }
        Some(Self { x, y, m })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    /// Value at `t`; None outside the knot range.
    pub fn eval(&self, t: f64) -> Option<f64> {
        let (lo, hi) = self.domain();
        if !(lo..=hi).contains(&t) {
            return None;
        }
        let i = match self.x.partition_point(|&v| v <= t) {
            0 => 0,
            p => (p - 1).min(self.x.len() - 2),
        };
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        Some(
            a * self.y[i]
                + b * self.y[i + 1]
                + ((a.powi(3) - a) * self.m[i] + (b.powi(3) - b) * self.m[i + 1]) * h * h / 6.0,
        )
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Nelder-Mead simplex minimization starting from `x0` with per-coordinate
/// initial steps `scale`.
pub fn nelder_mead(
    f: impl Fn(&[f64]) -> f64,
    x0: &[f64],
    scale: &[f64],
    tol: f64,
    max_iter: usize,
) -> Minimum {
    let d = x0.len();
    let eval = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    simplex.push((x0.to_vec(), eval(x0)));
    for i in 0..d {
        let mut x = x0.to_vec();
        x[i] += scale[i];
        let v = eval(&x);
        simplex.push((x, v));
    }
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (best, worst) = (simplex[0].1, simplex[d].1);
        let size = simplex[1..]
            .iter()
            .map(|(x, _)| {
                x.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if (worst - best).abs() <= tol * (best.abs() + tol) && size <= tol.sqrt() {
            converged = true;
            break;
        }
        iterations += 1;
        let centroid: Vec<f64> = (0..d)
            .map(|k| simplex[..d].iter().map(|(x, _)| x[k]).sum::<f64>() / d as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[d].0)
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };
        let xr = along(-1.0);
        let fr = eval(&xr);
        if fr < simplex[0].1 {
            let xe = along(-2.0);
            let fe = eval(&xe);
            simplex[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[d - 1].1 {
            simplex[d] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[d].1 {
                let x = along(-0.5);
                let v = eval(&x);
                (x, v)
            } else {
                let x = along(0.5);
                let v = eval(&x);
                (x, v)
            };
            if fc < simplex[d].1.min(fr) {
                simplex[d] = (xc, fc);
            } else {
                let x_best = simplex[0].0.clone();
                for (x, v) in simplex.iter_mut().skip(1) {
                    for (xi, bi) in x.iter_mut().zip(&x_best) {
                        *xi = bi + 0.5 * (*xi - bi);
                    }
                    *v = eval(x);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    Minimum {
        x: simplex[0].0.clone(),
        value: simplex[0].1,
        converged,
        iterations,
    }
}

/// Index window [start, end] of widest extent in `x`, with at least
/// `min_points` points, whose consecutive slopes all lie within `rel_tol` of
/// the window's least-squares slope. Ties go to the later window.
pub fn stationary_window(
    x: &[f64],
    y: &[f64],
    min_points: usize,
    rel_tol: f64,
) -> Option<(usize, usize)> {
    let n = x.len();
    let min_points = min_points.max(2);
    if n < min_points {
        return None;
    }
    let local: Vec<f64> = (0..n - 1)
        .map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i]))
        .collect();
    // Prefix sums for O(1) window regressions.
    let mut sx = vec![0.0; n + 1];
    let mut sy = vec![0.0; n + 1];
    let mut sxx = vec![0.0; n + 1];
    let mut sxy = vec![0.0; n + 1];
    for i in 0..n {
        sx[i + 1] = sx[i] + x[i];
        sy[i + 1] = sy[i] + y[i];
        sxx[i + 1] = sxx[i] + x[i] * x[i];
        sxy[i + 1] = sxy[i] + x[i] * y[i];
    }
    let slope = |a: usize, b: usize| {
        let m = (b - a + 1) as f64;
        let (tx, ty) = (sx[b + 1] - sx[a], sy[b + 1] - sy[a]);
        let txx = sxx[b + 1] - sxx[a];
        let txy = sxy[b + 1] - sxy[a];
        (m * txy - tx * ty) / (m * txx - tx * tx)
    };
    let mut candidates: Vec<(usize, usize)> = (0..=n - min_points)
        .flat_map(|a| (a + min_points - 1..n).map(move |b| (a, b)))
        .collect();
    candidates.sort_by(|p, q| {
        (x[q.1] - x[q.0])
            .total_cmp(&(x[p.1] - x[p.0]))
            .then(q.0.cmp(&p.0))
    });
    candidates.into_iter().find(|&(a, b)| {
        let s = slope(a, b);
        s.is_finite() && s != 0.0 && local[a..b].iter().all(|&l| ((l - s) / s).abs() <= rel_tol)
    })
}
