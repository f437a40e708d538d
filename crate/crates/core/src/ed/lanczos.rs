//! Lanczos with full reorthogonalization and locking of converged vectors.

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigh, C64};

pub const LANCZOS_SEED: u64 = 0x5eed_1a2c;
/// Krylov dimension limit per locked eigenpair.
pub const MAX_KRYLOV: usize = 300;
/// Ritz residual ||H y - theta y|| accepted as converged.
pub const RESIDUAL_TOL: f64 = 1e-9;

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Removes the components of `w` along every vector in `sets` (two passes).
fn orthogonalize(w: &mut [C64], sets: &[&[Vec<C64>]]) {
    for _ in 0..2 {
        for set in sets {
            for v in set.iter() {
                let c = dot(v, w);
                for (x, y) in w.iter_mut().zip(v) {
                    *x -= c * y;
                }
            }
        }
    }
}

fn random_unit(dim: usize, rng: &mut ChaCha8Rng, locked: &[Vec<C64>]) -> Option<Vec<C64>> {
    for _ in 0..4 {
        let mut v: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        orthogonalize(&mut v, &[locked]);
        let nv = norm(&v);
        if nv > 1e-8 {
            v.iter_mut().for_each(|x| *x /= nv);
            return Some(v);
        }
    }
    None
}

/// Lowest `count` eigenpairs of the Hermitian operator `apply` (y = H x) on a
/// space of dimension `dim`. Each pair is found in the complement of the
/// previously converged ones, so degenerate levels are resolved.
pub fn lowest_eigenpairs(
    dim: usize,
    count: usize,
    apply: impl Fn(&[C64], &mut [C64]),
) -> Result<(Vec<f64>, Vec<Vec<C64>>)> {
    if count > dim {
        return Err(Error::Precondition(format!(
            "{count} eigenpairs requested from dimension {dim}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(LANCZOS_SEED);
    let mut values = Vec::with_capacity(count);
    let mut locked: Vec<Vec<C64>> = Vec::with_capacity(count);
    let mut w = vec![C64::new(0.0, 0.0); dim];

    while locked.len() < count {
        let remaining = dim - locked.len();
        let limit = MAX_KRYLOV.min(remaining);
        let Some(v0) = random_unit(dim, &mut rng, &locked) else {
            return Err(Error::Eigensolver(
                "no start vector outside the locked space".into(),
            ));
        };
        let mut basis: Vec<Vec<C64>> = vec![v0];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut found = None;

        loop {
            let j = basis.len() - 1;
            apply(&basis[j], &mut w);
            let a = dot(&basis[j], &w).re;
            alpha.push(a);
            orthogonalize(&mut w, &[&locked, &basis]);
            let b = norm(&w);

            let invariant = b < 1e-12;
            let at_limit = basis.len() == limit;
            if invariant || at_limit || basis.len().is_multiple_of(5) {
                let m = alpha.len();
                let t = Mat::<f64>::from_fn(m, m, |r, c| {
                    if r == c {
                        alpha[r]
                    } else if r + 1 == c {
                        beta[r]
                    } else if c + 1 == r {
                        beta[c]
                    } else {
                        0.0
                    }
                });
                let (theta, s) = symmetric_eigh(&t)?;
                let residual = b * s[(m - 1, 0)].abs();
                if invariant || residual <= RESIDUAL_TOL * theta[0].abs().max(1.0) {
                    found = Some((theta[0], (0..m).map(|r| s[(r, 0)]).collect::<Vec<f64>>()));
                    break;
                }
                if at_limit {
                    break;
                }
            }
            w.iter_mut().for_each(|x| *x /= b);
            beta.push(b);
            basis.push(w.clone());
        }

        let Some((theta, coeffs)) = found else {
            return Err(Error::Eigensolver(format!(
                "eigenpair {} not converged within {limit} Lanczos steps",
                locked.len()
            )));
        };
        let mut y = vec![C64::new(0.0, 0.0); dim];
        for (c, v) in coeffs.iter().zip(&basis) {
            for (yi, vi) in y.iter_mut().zip(v) {
                *yi += *c * vi;
            }
        }
        orthogonalize(&mut y, &[&locked]);
        let ny = norm(&y);
        y.iter_mut().for_each(|x| *x /= ny);
        values.push(theta);
        locked.push(y);
    }

    // Locking can return pairs slightly out of order for near-degenerate levels.
    let mut order: Vec<usize> = (0..count).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let values_sorted = order.iter().map(|&i| values[i]).collect();
    let vectors_sorted = order.iter().map(|&i| locked[i].clone()).collect();
    Ok((values_sorted, vectors_sorted))
}
