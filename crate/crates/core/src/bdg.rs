//! Bloch BdG Hamiltonian of the quadratic model, its symmetries, band
//! structure, gap scans and the analytic critical lines.

use std::f64::consts::{FRAC_PI_4, PI};

use nalgebra::{Matrix4, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{golden_section, C64};
use crate::params::{ModelParams, MomentumGrid};

/// Gaps below this are treated as closed.
pub const ZERO_GAP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochSymbols {
    pub omega_k: f64,
    pub gamma_k: C64,
    pub upsilon_k: C64,
}

pub fn symbols(p: &ModelParams, k: f64) -> BlochSymbols {
    let phase = C64::from_polar(1.0, -k / 2.0);
    BlochSymbols {
        omega_k: p.omega_b + 2.0 * p.j * k.cos(),
        gamma_k: C64::new(0.0, 2.0 * p.g * (p.phi - k / 2.0).sin()) * phase,
        upsilon_k: phase * (2.0 * p.g * (p.phi - k / 2.0).cos()),
    }
}

/// H_k in the Nambu basis (b_k, c_k, b_{-k}^dag, c_{-k}^dag).
#[derive(Debug, Clone, PartialEq)]
pub struct BlochMatrix {
    pub k: f64,
    pub entries: Matrix4<C64>,
    pub symbols: BlochSymbols,
}

pub fn build_bloch(p: &ModelParams, k: f64) -> BlochMatrix {
    let s = symbols(p, k);
    let m = symbols(p, -k);
    let z = C64::new(0.0, 0.0);
    let re = |x: f64| C64::new(x, 0.0);
    #[rustfmt::skip]
    let entries = Matrix4::new(
        re(s.omega_k),           s.upsilon_k.conj(),      z,                       -m.gamma_k,
        s.upsilon_k,             re(p.omega_a),           s.gamma_k,               z,
        z,                       s.gamma_k.conj(),        re(-s.omega_k),          -m.upsilon_k,
        -m.gamma_k.conj(),       z,                       -m.upsilon_k.conj(),     re(-p.omega_a),
    );
    BlochMatrix {
        k,
        entries,
        symbols: s,
    }
}

impl BlochMatrix {
    pub fn hermiticity_residual(&self) -> f64 {
        max_abs(&(self.entries - self.entries.adjoint()))
    }

    /// Ascending eigenvalues; near-degenerate pairs are ordered by particle
    /// (first two components) weight, larger first.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let eig = SymmetricEigen::new(self.entries);
        let mut order: Vec<(f64, f64)> = (0..4)
            .map(|c| {
                let v = eig.eigenvectors.column(c);
                (eig.eigenvalues[c], v[0].norm_sqr() + v[1].norm_sqr())
            })
            .collect();
        order.sort_by(|a, b| {
            if (a.0 - b.0).abs() <= 1e-12 {
                b.1.total_cmp(&a.1)
            } else {
                a.0.total_cmp(&b.0)
            }
        });
        [order[0].0, order[1].0, order[2].0, order[3].0]
    }

    /// Smallest |E|.
    pub fn gap(&self) -> f64 {
        SymmetricEigen::new(self.entries)
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |m, e| m.min(e.abs()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandStructure {
    pub grid: MomentumGrid,
    pub bands: Vec<[f64; 4]>,
    /// Constant J sum_k cos k + N (omega0 + Omega0) / 2 with N the grid size.
    pub constant: Option<f64>,
}

pub fn band_structure(p: &ModelParams, grid: &MomentumGrid) -> BandStructure {
    let bands = grid
        .points
        .par_iter()
        .map(|&k| build_bloch(p, k).eigenvalues())
        .collect();
    let n = grid.count() as f64;
    let constant =
        p.j * grid.points.iter().map(|k| k.cos()).sum::<f64>() + n * (p.omega_a + p.omega_b) / 2.0;
    BandStructure {
        grid: grid.clone(),
        bands,
        constant: Some(constant),
    }
}

pub(crate) fn max_abs(m: &Matrix4<C64>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

fn sigma_x_kron_i() -> Matrix4<C64> {
    let o = C64::new(1.0, 0.0);
    let z = C64::new(0.0, 0.0);
    #[rustfmt::skip]
    let x = Matrix4::new(
        z, z, o, z,
        z, z, z, o,
        o, z, z, z,
        z, o, z, z,
    );
    x
}

fn i_kron_sigma_z() -> Matrix4<C64> {
    let d = [1.0, -1.0, 1.0, -1.0].map(|x| C64::new(x, 0.0));
    Matrix4::from_diagonal(&nalgebra::Vector4::from(d))
}

/// max |X conj(H_k) X + H_{-k}| for X = sigma_x (x) 1.
pub fn phc_residual(h_k: &Matrix4<C64>, h_minus_k: &Matrix4<C64>) -> f64 {
    let x = sigma_x_kron_i();
    max_abs(&(x * h_k.conjugate() * x + h_minus_k))
}

/// Particle-hole constraint between k and -k, to 1e-12.
pub fn check_phc(p: &ModelParams, k: f64) -> bool {
    phc_residual(&build_bloch(p, k).entries, &build_bloch(p, -k).entries) <= 1e-12
}

/// max |S conj(H_k) S - H_{-k}| for S = 1 (x) sigma_z.
pub fn antiunitary_residual(h_k: &Matrix4<C64>, h_minus_k: &Matrix4<C64>) -> f64 {
    let s = i_kron_sigma_z();
    max_abs(&(s * h_k.conjugate() * s - h_minus_k))
}

/// The extra antiunitary symmetry that only exists at phi = pi/2.
pub fn check_antiunitary_pi_half(p: &ModelParams, k: f64) -> Result<bool> {
    if (p.phi - PI / 2.0).abs() > 1e-12 {
        return Err(Error::Precondition(format!(
            "antiunitary symmetry needs phi = pi/2, got {}",
            p.phi
        )));
    }
    Ok(antiunitary_residual(&build_bloch(p, k).entries, &build_bloch(p, -k).entries) <= 1e-12)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GapBranch {
    /// Gap closes at k = 0 (phi < pi/4).
    KZero,
    /// Gap closes at k = pi (phi > pi/4).
    KPi,
}

impl GapBranch {
    pub fn momentum(self) -> f64 {
        match self {
            GapBranch::KZero => 0.0,
            GapBranch::KPi => PI,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CriticalCoupling {
    Finite { g: f64, branch: GapBranch },
    NoTransition,
}

impl CriticalCoupling {
    pub fn value(self) -> Option<f64> {
        match self {
            CriticalCoupling::Finite { g, .. } => Some(g),
            CriticalCoupling::NoTransition => None,
        }
    }
}

/// Coupling at which the single-particle gap closes.
pub fn critical_coupling(omega_a: f64, omega_b: f64, j: f64, phi: f64) -> CriticalCoupling {
    if (phi - FRAC_PI_4).abs() < 1e-12 {
        return CriticalCoupling::NoTransition;
    }
    let c2 = (2.0 * phi).cos();
    let (radicand, branch) = if phi < FRAC_PI_4 {
        (omega_a * (omega_b + 2.0 * j) / c2, GapBranch::KZero)
    } else {
        (omega_a * (omega_b - 2.0 * j) / c2.abs(), GapBranch::KPi)
    };
    if radicand.is_finite() && radicand >= 0.0 {
        CriticalCoupling::Finite {
            g: 0.5 * radicand.sqrt(),
            branch,
        }
    } else {
        CriticalCoupling::NoTransition
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapScan {
    pub min_gap: f64,
    pub k_star: f64,
    pub closed: bool,
}

fn wrap_momentum(k: f64) -> f64 {
    let mut k = k % (2.0 * PI);
    if k <= -PI {
        k += 2.0 * PI;
    } else if k > PI {
        k -= 2.0 * PI;
    }
    k
}

/// Minimum over k of the smallest |E| on `grid` (plus k = 0 and k = pi),
/// refined by golden section around the coarse minimum.
pub fn gap_scan(p: &ModelParams, grid: &MomentumGrid) -> GapScan {
    let gap_at = |k: f64| build_bloch(p, k).gap();
    let mut best = (f64::INFINITY, 0.0);
    let mut spacing = 2.0 * PI;
    for (i, &k) in grid.points.iter().enumerate() {
        if i > 0 {
            spacing = spacing.min(k - grid.points[i - 1]);
        }
        let e = gap_at(k);
        if e < best.0 {
            best = (e, k);
        }
    }
    for k in [0.0, PI] {
        let e = gap_at(k);
        if e < best.0 {
            best = (e, k);
        }
    }
    if best.0 > ZERO_GAP_TOL && spacing.is_finite() {
        let (k, e) = golden_section(gap_at, best.1 - spacing, best.1 + spacing, 1e-12);
        if e < best.0 {
            best = (e, wrap_momentum(k));
        }
    }
    GapScan {
        min_gap: best.0,
        k_star: best.1,
        closed: best.0 <= ZERO_GAP_TOL,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapClosing {
    pub g: f64,
    pub min_gap: f64,
    pub k_star: f64,
}

/// Locates the coupling in `[0, g_max]` where the scanned gap closes: a coarse
/// scan in g on a thinned k grid, then golden-section minimization of the full
/// gap scan. Returns `None` when the minimum stays above `1e-5`.
pub fn gap_closing_coupling(
    p: &ModelParams,
    grid: &MomentumGrid,
    g_max: f64,
) -> Option<GapClosing> {
    let coarse_grid = MomentumGrid {
        points: grid
            .points
            .iter()
            .copied()
            .step_by((grid.count() / 256).max(1))
            .collect(),
    };
    let steps = 128;
    let dg = g_max / steps as f64;
    let (_, g0) = (0..=steps)
        .map(|i| {
            let g = i as f64 * dg;
            (gap_scan(&p.with_g(g), &coarse_grid).min_gap, g)
        })
        .fold((f64::INFINITY, 0.0), |best, cur| {
            if cur.0 < best.0 {
                cur
            } else {
                best
            }
        });
    let lo = (g0 - dg).max(0.0);
    let hi = (g0 + dg).min(g_max);
    let (g, gap) = golden_section(|g| gap_scan(&p.with_g(g), grid).min_gap, lo, hi, 1e-7);
    let scan = gap_scan(&p.with_g(g), grid);
    (gap <= 1e-5).then_some(GapClosing {
        g,
        min_gap: scan.min_gap,
        k_star: scan.k_star,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrongCoupling {
    /// Flat quasiparticle levels, ascending.
    pub levels: [f64; 4],
    pub gs_energy_per_site: f64,
}

/// Dispersionless limit g >> omega0, Omega0, J.
pub fn strong_coupling(g: f64, phi: f64) -> StrongCoupling {
    let a = 2.0 * g * (phi.cos() + phi.sin());
    let b = 2.0 * g * (phi.cos() - phi.sin());
    let mut levels = [a, -a, b, -b];
    levels.sort_by(f64::total_cmp);
    let gs = if phi <= FRAC_PI_4 {
        -4.0 * g * phi.cos()
    } else {
        -4.0 * g * phi.sin()
    };
    StrongCoupling {
        levels,
        gs_energy_per_site: gs,
    }
}
