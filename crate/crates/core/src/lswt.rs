//! Linear spin-wave theory around the fully polarized down state.
//!
//! Bosons are expanded to first order in 1/S with 2S = 1. Each momentum
//! carries a 4x4 dynamical matrix over (b_k, a_k, b^dag_-k, a^dag_-k) that is
//! pseudo-Hermitian with respect to eta = diag(1, 1, -1, -1).

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{golden_section, C64};
use crate::params::{ModelParams, MomentumGrid};

/// |Im E| above this marks a dynamically unstable mode.
pub const INSTABILITY_TOL: f64 = 1e-10;
/// |Im E| above INSTABILITY_TOL but below this is reported as marginal.
pub const MARGINAL_TOL: f64 = 1e-8;
/// Coarse momentum scan used to locate the first unstable mode.
pub const THRESHOLD_SCAN_POINTS: usize = 4096;

const METRIC: [f64; 4] = [1.0, 1.0, -1.0, -1.0];

/// g_k = 2 g e^{ik/2} cos(phi + k/2).
pub fn coupling(g: f64, phi: f64, k: f64) -> C64 {
    C64::from_polar(2.0 * g * (phi + 0.5 * k).cos(), 0.5 * k)
}

pub fn magnon_energy(p: &ModelParams, k: f64) -> f64 {
    p.omega_b + 2.0 * p.j * k.cos()
}

#[derive(Debug, Clone)]
pub struct HopfieldMatrix {
    pub k: f64,
    pub l: Mat<C64>,
}

pub fn build_hopfield(p: &ModelParams, k: f64) -> HopfieldMatrix {
    let om = C64::new(magnon_energy(p, k), 0.0);
    let w0 = C64::new(p.omega_a, 0.0);
    let gk = coupling(p.g, p.phi, k);
    let gm = coupling(p.g, p.phi, -k);
    let z = C64::new(0.0, 0.0);
    let rows = [
        [om, gm.conj(), z, gk],
        [gm, w0, gm, z],
        [z, -gm.conj(), -om, -gk],
        [-gk.conj(), z, -gk.conj(), -w0],
    ];
    HopfieldMatrix {
        k,
        l: Mat::from_fn(4, 4, |i, j| rows[i][j]),
    }
}

impl HopfieldMatrix {
    /// max |eta L eta - L^dag|.
    pub fn pseudo_hermiticity_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                let lhs = self.l[(i, j)] * METRIC[i] * METRIC[j];
                worst = worst.max((lhs - self.l[(j, i)].conj()).norm());
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LswtModes {
    pub k: f64,
    /// Sorted by real part, then imaginary part.
    pub eigenvalues: Vec<Complex64>,
    pub stable: bool,
    /// Largest |Im E| lies in the (INSTABILITY_TOL, MARGINAL_TOL] band.
    pub marginal: bool,
    /// Energies of the positive-norm modes, ascending; empty when unstable.
    pub particle_energies: Vec<f64>,
    /// Matching eigenvectors normalized to v^dag eta v = 1.
    #[serde(skip)]
    pub particle_vectors: Vec<[C64; 4]>,
}

impl LswtModes {
    pub fn max_imag(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, e| m.max(e.im.abs()))
    }

    /// Band energies E^(1) <= E^(2) of the positive-norm modes.
    pub fn bands(&self) -> Option<[f64; 2]> {
        (self.stable && self.particle_energies.len() == 2)
            .then(|| [self.particle_energies[0], self.particle_energies[1]])
    }
}

pub fn para_diagonalize(h: &HopfieldMatrix) -> Result<LswtModes> {
    let eig =
        h.l.eigen()
            .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let s = eig.S().column_vector();
    let u = eig.U();
    let mut pairs: Vec<(C64, [C64; 4])> = (0..4)
        .map(|c| (s[c], [u[(0, c)], u[(1, c)], u[(2, c)], u[(3, c)]]))
        .collect();
    pairs.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    let eigenvalues: Vec<C64> = pairs.iter().map(|p| p.0).collect();
    let max_imag = eigenvalues.iter().fold(0.0f64, |m, e| m.max(e.im.abs()));
    let stable = max_imag <= INSTABILITY_TOL;
    let marginal = max_imag > INSTABILITY_TOL && max_imag <= MARGINAL_TOL;

    let mut particle_energies = Vec::new();
    let mut particle_vectors = Vec::new();
    if stable {
        for (e, v) in &pairs {
            let norm: f64 = (0..4).map(|i| METRIC[i] * v[i].norm_sqr()).sum();
            if norm > 1e-12 {
                let scale = 1.0 / norm.sqrt();
                particle_energies.push(e.re);
                particle_vectors.push(v.map(|x| x * scale));
            }
        }
    }
    Ok(LswtModes {
        k: h.k,
        eigenvalues,
        stable,
        marginal,
        particle_energies,
        particle_vectors,
    })
}

pub fn modes(p: &ModelParams, k: f64) -> Result<LswtModes> {
    para_diagonalize(&build_hopfield(p, k))
}

/// Coupling at which mode k satisfies |g_-k|^2 + |g_k|^2 = omega0 Omega_k / 2.
pub fn mode_threshold(p: &ModelParams, k: f64) -> f64 {
    let denom = 8.0 * (1.0 + (2.0 * p.phi).cos() * k.cos());
    if denom <= 0.0 {
        return f64::INFINITY;
    }
    let num = p.omega_a * magnon_energy(p, k);
    if num <= 0.0 {
        return 0.0;
    }
    (num / denom).sqrt()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LswtThreshold {
    pub g_c: f64,
    pub k_c: f64,
    /// Branch minima at k = 0 and k = pi as (k, g).
    pub candidates: Vec<(f64, f64)>,
    /// |g_-k|^2 + |g_k|^2 - omega0 Omega_k / 2 at (g_c, k_c).
    pub condition_residual: f64,
}

pub fn instability_threshold(p: &ModelParams) -> Result<LswtThreshold> {
    let grid = MomentumGrid::uniform(THRESHOLD_SCAN_POINTS)?;
    let f = |k: f64| mode_threshold(p, k);
    let mut best = (0.0, f(0.0));
    for &k in grid.points.iter().chain(&[PI]) {
        let v = f(k);
        if v < best.1 {
            best = (k, v);
        }
    }
    let step = 2.0 * PI / THRESHOLD_SCAN_POINTS as f64;
    let (k_ref, g_ref) = golden_section(f, best.0 - step, best.0 + step, 1e-12);
    let (k_c, g_c) = if g_ref < best.1 { (k_ref, g_ref) } else { best };
    let k_c = k_c.rem_euclid(2.0 * PI);
    let k_c = if k_c > PI { k_c - 2.0 * PI } else { k_c };
    if !g_c.is_finite() {
        return Err(Error::Precondition(
            "no unstable mode at any finite coupling".into(),
        ));
    }
    let gk = coupling(g_c, p.phi, k_c);
    let gm = coupling(g_c, p.phi, -k_c);
    let condition_residual =
        gk.norm_sqr() + gm.norm_sqr() - 0.5 * p.omega_a * magnon_energy(p, k_c);
    Ok(LswtThreshold {
        g_c,
        k_c,
        candidates: vec![(0.0, f(0.0)), (PI, f(PI))],
        condition_residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LswtPoint {
    pub g: f64,
    /// <S^z> averaged over all spins.
    pub magnetization: f64,
    /// Zero-point energy per spin relative to the polarized state.
    pub energy: f64,
}

/// Ground-state magnetization and energy per spin from the quadratic boson
/// theory on `grid`. Errors beyond the instability threshold.
pub fn lswt_point(p: &ModelParams, grid: &MomentumGrid) -> Result<LswtPoint> {
    let threshold = instability_threshold(p)?;
    if p.g > threshold.g_c {
        return Err(Error::BeyondInstability {
            g: p.g,
            threshold: threshold.g_c,
        });
    }
    let per_k: Vec<(f64, f64)> = grid
        .points
        .par_iter()
        .map(|&k| -> Result<(f64, f64)> {
            let m = modes(p, k)?;
            let Some(bands) = m.bands() else {
                return Err(Error::BeyondInstability {
                    g: p.g,
                    threshold: threshold.g_c,
                });
            };
            let zero_point = 0.5 * (bands[0] + bands[1] - magnon_energy(p, k) - p.omega_a);
            // Boson number of b_-k and a_-k from the creation components.
            let bosons: f64 = m
                .particle_vectors
                .iter()
                .map(|v| v[2].norm_sqr() + v[3].norm_sqr())
                .sum();
            Ok((zero_point, bosons))
        })
        .collect::<Result<_>>()?;
    let spins = 2.0 * grid.count() as f64;
    let energy = per_k.iter().map(|x| x.0).sum::<f64>() / spins;
    let bosons = per_k.iter().map(|x| x.1).sum::<f64>();
    Ok(LswtPoint {
        g: p.g,
        magnetization: -0.5 + bosons / spins,
        energy,
    })
}

pub fn lswt_observables(
    p: &ModelParams,
    gs: &[f64],
    grid: &MomentumGrid,
) -> Result<Vec<LswtPoint>> {
    gs.iter().map(|&g| lswt_point(&p.with_g(g), grid)).collect()
}
