//! Majorana-basis Bloch matrices, the Z2 Pfaffian invariant, real-space BdG
//! spectra, zero modes and the local density of states.

use std::f64::consts::PI;

use faer::Mat;
use nalgebra::Matrix4;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bdg::{build_bloch, max_abs};
use crate::error::{Error, Result};
use crate::linalg::{antisymmetric_eigh, C64};
use crate::params::{Boundary, ModelParams};

/// H~_k = U H_k U^dag with U = [[1, 1], [i, -i]] acting on Nambu blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct MajoranaBloch {
    pub k: f64,
    pub entries: Matrix4<C64>,
}

fn majorana_basis_change() -> Matrix4<C64> {
    let o = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let z = C64::new(0.0, 0.0);
    #[rustfmt::skip]
    let u = Matrix4::new(
        o, z, o, z,
        z, o, z, o,
        i, z, -i, z,
        z, i, z, -i,
    );
    u
}

pub fn majorana_bloch(p: &ModelParams, k: f64) -> MajoranaBloch {
    let u = majorana_basis_change();
    MajoranaBloch {
        k,
        entries: u * build_bloch(p, k).entries * u.adjoint(),
    }
}

impl MajoranaBloch {
    /// i H~_k as a real antisymmetric matrix. Only exists at k = 0 and k = pi;
    /// elsewhere (or for a broken basis change) the residual check fails.
    pub fn real_antisymmetric(&self) -> Result<Matrix4<f64>> {
        let a = self.entries * C64::new(0.0, 1.0);
        let scale = max_abs(&a).max(1.0);
        let imag = a.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
        let re = a.map(|z| z.re);
        let asym = (re + re.transpose()).abs().max();
        let residual = imag.max(asym);
        if residual > 1e-10 * scale {
            return Err(Error::NotAntisymmetric { residual });
        }
        Ok((re - re.transpose()) * 0.5)
    }
}

/// Pfaffian of a 4x4 real antisymmetric matrix.
pub fn pfaffian4(a: &Matrix4<f64>) -> Result<f64> {
    let residual = (a + a.transpose()).abs().max();
    if residual > 1e-10 * a.abs().max().max(1.0) {
        return Err(Error::NotAntisymmetric { residual });
    }
    Ok(a[(0, 1)] * a[(2, 3)] - a[(0, 2)] * a[(1, 3)] + a[(0, 3)] * a[(1, 2)])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Z2 {
    Trivial,
    Topological,
}

impl Z2 {
    pub fn sign(self) -> i8 {
        match self {
            Z2::Trivial => 1,
            Z2::Topological => -1,
        }
    }
}

/// Kitaev invariant sgn(Pf[i H~_0] Pf[i H~_pi]).
pub fn z2_invariant(p: &ModelParams) -> Result<Z2> {
    let pf0 = pfaffian4(&majorana_bloch(p, 0.0).real_antisymmetric()?)?;
    let pfpi = pfaffian4(&majorana_bloch(p, PI).real_antisymmetric()?)?;
    Ok(if pf0 * pfpi < 0.0 {
        Z2::Topological
    } else {
        Z2::Trivial
    })
}

/// Quadratic fermion Hamiltonian H = f^dag h f + (f^dag Delta f^dag + h.c.)/2
/// over modes f_{2n} = b_n (chain B) and f_{2n+1} = c_n (chain A).
#[derive(Debug, Clone)]
pub struct RealSpaceBdG {
    pub n: usize,
    pub boundary: Boundary,
    pub h: Mat<C64>,
    pub delta: Mat<C64>,
}

pub fn build_realspace(p: &ModelParams) -> Result<RealSpaceBdG> {
    let n = p.n;
    if n < 2 {
        return Err(Error::invalid(
            "N",
            format!("{n} sites per chain, need at least 2"),
        ));
    }
    let dim = 2 * n;
    let mut h = Mat::<C64>::zeros(dim, dim);
    let mut delta = Mat::<C64>::zeros(dim, dim);
    let b = |site: usize| 2 * (site % n);
    let c = |site: usize| 2 * site + 1;
    for s in 0..n {
        h[(b(s), b(s))] = C64::new(p.omega_b, 0.0);
        h[(c(s), c(s))] = C64::new(p.omega_a, 0.0);
    }
    let bonds = match p.boundary {
        Boundary::Open => n - 1,
        Boundary::Periodic => n,
    };
    let t1 = C64::from_polar(p.g, p.phi);
    let t2 = C64::from_polar(p.g, -p.phi);
    for s in 0..bonds {
        let (bs, bn, cs) = (b(s), b(s + 1), c(s));
        h[(bs, bn)] += C64::new(p.j, 0.0);
        h[(bn, bs)] += C64::new(p.j, 0.0);
        // c_s couples to b_{s+1} with phase e^{i phi} ...
        h[(cs, bn)] += t1;
        h[(bn, cs)] += t1.conj();
        delta[(cs, bn)] += t1;
        delta[(bn, cs)] -= t1;
        // ... and to b_s with phase e^{-i phi}.
        h[(cs, bs)] += t2;
        h[(bs, cs)] += t2.conj();
        delta[(cs, bs)] -= t2;
        delta[(bs, cs)] += t2;
    }
    Ok(RealSpaceBdG {
        n,
        boundary: p.boundary,
        h,
        delta,
    })
}

/// Eigenpairs of i A, the Majorana form of the BdG matrix.
#[derive(Debug, Clone)]
pub struct BdgSpectrum {
    /// Ascending; symmetric about zero.
    pub energies: Vec<f64>,
    /// Columns are eigenvectors in the Majorana basis a_{2j} = f_j + f_j^dag,
    /// a_{2j+1} = i (f_j^dag - f_j).
    pub vectors: Mat<C64>,
}

impl RealSpaceBdG {
    pub fn modes(&self) -> usize {
        2 * self.n
    }

    pub fn trace_h(&self) -> f64 {
        (0..self.modes()).map(|i| self.h[(i, i)].re).sum()
    }

    /// [[h, Delta], [-conj(Delta), -conj(h)]] acting on (f, f^dag).
    pub fn matrix(&self) -> Mat<C64> {
        let m = self.modes();
        Mat::from_fn(2 * m, 2 * m, |i, j| match (i < m, j < m) {
            (true, true) => self.h[(i, j)],
            (true, false) => self.delta[(i, j - m)],
            (false, true) => -self.delta[(i - m, j)].conj(),
            (false, false) => -self.h[(i - m, j - m)].conj(),
        })
    }

    /// Real antisymmetric A with H = (i/4) a^T A a + Tr(h)/2.
    pub fn majorana(&self) -> Mat<f64> {
        let m = self.modes();
        let mut a = Mat::<f64>::zeros(2 * m, 2 * m);
        for i in 0..m {
            for j in 0..m {
                let plus = self.h[(i, j)] + self.delta[(i, j)];
                let minus = self.h[(i, j)] - self.delta[(i, j)];
                a[(2 * i, 2 * j)] = plus.im;
                a[(2 * i, 2 * j + 1)] = minus.re;
                a[(2 * i + 1, 2 * j)] = -plus.re;
                a[(2 * i + 1, 2 * j + 1)] = minus.im;
            }
        }
        a
    }

    pub fn spectrum(&self) -> Result<BdgSpectrum> {
        let (energies, vectors) = antisymmetric_eigh(&self.majorana())?;
        Ok(BdgSpectrum { energies, vectors })
    }
}

impl BdgSpectrum {
    /// Index of the eigenvalue closest to zero, preferring the non-negative one.
    pub fn lowest_index(&self) -> usize {
        let half = self.energies.len() / 2;
        (half..self.energies.len())
            .min_by(|&a, &b| self.energies[a].abs().total_cmp(&self.energies[b].abs()))
            .unwrap_or(0)
    }

    /// Weight of eigenvector `col` on each lattice site (sum of its four
    /// Majorana components).
    pub fn site_weights(&self, col: usize) -> Vec<f64> {
        let sites = self.vectors.nrows() / 4;
        (0..sites)
            .map(|s| {
                (0..4)
                    .map(|c| self.vectors[(4 * s + c, col)].norm_sqr())
                    .sum()
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroModes {
    pub e_min: f64,
    pub edge_weight: f64,
}

/// Sites counted as edge on each side: 10% of the chain, at least one.
pub fn edge_window(n: usize) -> usize {
    ((n as f64 * 0.1).ceil() as usize).max(1)
}

/// Smallest |E| of the open-chain BdG spectrum and the weight of its mode on
/// the outer 10% of sites at either end.
pub fn zero_modes(p: &ModelParams) -> Result<ZeroModes> {
    let spec = build_realspace(&p.with_boundary(Boundary::Open))?.spectrum()?;
    let idx = spec.lowest_index();
    let weights = spec.site_weights(idx);
    let w = edge_window(p.n);
    let total: f64 = weights.iter().sum();
    let edge: f64 = weights[..w].iter().sum::<f64>() + weights[p.n - w..].iter().sum::<f64>();
    Ok(ZeroModes {
        e_min: spec.energies[idx].abs(),
        edge_weight: edge / total,
    })
}

pub const DEFAULT_BROADENING: f64 = 0.02;

/// Local density of states from one eigen-decomposition, reused for any
/// number of energies.
#[derive(Debug, Clone)]
pub struct Ldos {
    spectrum: BdgSpectrum,
    n: usize,
}

impl Ldos {
    pub fn new(p: &ModelParams) -> Result<Self> {
        Ok(Ldos {
            spectrum: build_realspace(p)?.spectrum()?,
            n: p.n,
        })
    }

    pub fn from_spectrum(spectrum: BdgSpectrum) -> Self {
        let n = spectrum.vectors.nrows() / 4;
        Ldos { spectrum, n }
    }

    pub fn spectrum(&self) -> &BdgSpectrum {
        &self.spectrum
    }

    /// rho(omega, site) = -(1/pi) Im Tr[(omega + i eta - H)^{-1}]_{site},
    /// traced over the four components of the site.
    pub fn at(&self, omega: f64, site: usize, eta: f64) -> Result<f64> {
        if eta <= 0.0 {
            return Err(Error::invalid(
                "broadening",
                format!("{eta} must be positive"),
            ));
        }
        if site >= self.n {
            return Err(Error::invalid(
                "site",
                format!("{site} outside 0..{}", self.n),
            ));
        }
        let v = &self.spectrum.vectors;
        let rho = self
            .spectrum
            .energies
            .iter()
            .enumerate()
            .map(|(col, &e)| {
                let w: f64 = (0..4).map(|c| v[(4 * site + c, col)].norm_sqr()).sum();
                w * eta / ((omega - e).powi(2) + eta * eta)
            })
            .sum::<f64>();
        Ok(rho / PI)
    }

    pub fn scan(&self, omegas: &[f64], site: usize, eta: f64) -> Result<Vec<f64>> {
        omegas.par_iter().map(|&w| self.at(w, site, eta)).collect()
    }
}

pub fn ldos(p: &ModelParams, omega: f64, site: usize, eta: f64) -> Result<f64> {
    Ldos::new(p)?.at(omega, site, eta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bdg::critical_coupling;
    use crate::linalg::hermitian_eigvals;
    use crate::params::{open_chain_momenta, MomentumGrid};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn paper(g: f64, phi: f64, n: usize) -> ModelParams {
        ModelParams::default().with_g(g).with_phi(phi).with_n(n)
    }

    #[test]
    fn pfaffian4_cases() {
        let mut a = Matrix4::<f64>::zeros();
        a[(0, 1)] = 2.0;
        a[(1, 0)] = -2.0;
        a[(2, 3)] = -3.0;
        a[(3, 2)] = 3.0;
        assert_eq!(pfaffian4(&a).unwrap(), -6.0);
        let mut b = Matrix4::<f64>::zeros();
        for (i, j, x) in [
            (0, 1, 1.0),
            (0, 2, 2.0),
            (0, 3, 3.0),
            (1, 2, 4.0),
            (1, 3, 5.0),
            (2, 3, 6.0),
        ] {
            b[(i, j)] = x;
            b[(j, i)] = -x;
        }
        assert_eq!(pfaffian4(&b).unwrap(), 8.0);
        b[(0, 1)] = 7.0;
        assert!(pfaffian4(&b).is_err());
    }

    #[test]
    fn majorana_form_real_only_at_high_symmetry_points() {
        let p = paper(1.0, 0.6, 8);
        assert!(majorana_bloch(&p, 0.0).real_antisymmetric().is_ok());
        assert!(majorana_bloch(&p, PI).real_antisymmetric().is_ok());
        assert!(majorana_bloch(&p, 0.9).real_antisymmetric().is_err());
    }

    #[test]
    fn invariant_on_both_sides() {
        assert_eq!(z2_invariant(&paper(0.2, 0.0, 8)).unwrap(), Z2::Trivial);
        assert_eq!(
            z2_invariant(&paper(2.0, FRAC_PI_2, 8)).unwrap(),
            Z2::Topological
        );
        for phi in [0.0, 0.3, 0.6, 1.0, 1.3, FRAC_PI_2] {
            let gc = critical_coupling(2.5, 2.5, 1.0, phi).value().unwrap();
            assert_eq!(
                z2_invariant(&paper(gc - 1e-3, phi, 8)).unwrap(),
                Z2::Trivial
            );
            assert_eq!(
                z2_invariant(&paper(gc + 1e-3, phi, 8)).unwrap(),
                Z2::Topological
            );
        }
        for g in [0.5, 3.0, 20.0] {
            assert_eq!(z2_invariant(&paper(g, FRAC_PI_4, 8)).unwrap(), Z2::Trivial);
        }
    }

    fn sorted(mut v: Vec<f64>) -> Vec<f64> {
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn decoupled_open_chain_spectrum() {
        let n = 7;
        let rs = build_realspace(&paper(0.0, 0.4, n)).unwrap();
        let got = rs.spectrum().unwrap().energies;
        let mut expect = Vec::new();
        for q in open_chain_momenta(n) {
            let e = 2.5 + 2.0 * q.cos();
            expect.extend([e, -e, 2.5, -2.5]);
        }
        for (a, b) in got.iter().zip(sorted(expect)) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn nambu_and_majorana_spectra_agree() {
        let rs = build_realspace(&paper(1.3, 0.7, 6)).unwrap();
        let m = rs.matrix();
        let herm = Mat::<C64>::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] - m[(j, i)].conj());
        assert!(herm.norm_max() < 1e-14);
        let direct = hermitian_eigvals(&m).unwrap();
        let maj = rs.spectrum().unwrap().energies;
        for (a, b) in direct.iter().zip(&maj) {
            assert!((a - b).abs() < 1e-12);
        }
        for i in 0..maj.len() {
            assert!((maj[i] + maj[maj.len() - 1 - i]).abs() < 1e-12);
        }
    }

    #[test]
    fn ring_spectrum_equals_bloch_bands() {
        let n = 12;
        let p = paper(0.9, 0.5, n).with_boundary(Boundary::Periodic);
        let real = build_realspace(&p).unwrap().spectrum().unwrap().energies;
        let grid = MomentumGrid::uniform(n).unwrap();
        let bands: Vec<f64> = grid
            .points
            .iter()
            .flat_map(|&k| build_bloch(&p, k).eigenvalues())
            .collect();
        for (a, b) in real.iter().zip(sorted(bands)) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn open_chain_converges_to_bands() {
        let n = 200;
        let p = paper(0.4, 0.3, n);
        let spec = build_realspace(&p).unwrap().spectrum().unwrap();
        let grid = MomentumGrid::uniform(4096).unwrap();
        let bands: Vec<f64> = grid
            .points
            .iter()
            .flat_map(|&k| build_bloch(&p, k).eigenvalues())
            .collect();
        let nearest = |x: f64, set: &[f64]| {
            set.iter()
                .map(|y| (x - y).abs())
                .fold(f64::INFINITY, f64::min)
        };
        let w = edge_window(n);
        for (col, &e) in spec.energies.iter().enumerate() {
            let weights = spec.site_weights(col);
            let edge: f64 = weights[..w].iter().chain(&weights[n - w..]).sum();
            // Boundary-bound levels (the uncoupled last A site) have no bulk partner.
            if edge < 0.5 {
                assert!(nearest(e, &bands) < 5e-2, "level {e}");
            }
        }
        for &b in bands.iter().step_by(5) {
            assert!(nearest(b, &spec.energies) < 5e-2, "band value {b}");
        }
    }

    #[test]
    fn edge_modes_in_topological_phase() {
        let z = zero_modes(&paper(2.0, FRAC_PI_2, 200)).unwrap();
        assert!(z.e_min < 1e-6 && z.edge_weight > 0.9, "{z:?}");
        let z = zero_modes(&paper(0.2, 0.0, 200)).unwrap();
        assert!(z.e_min > 0.4, "{z:?}");
    }

    #[test]
    fn ldos_features() {
        // No states inside the gap: rho(0) is pure Lorentzian tail, linear in eta.
        let trivial = Ldos::new(&paper(0.2, 0.0, 60)).unwrap();
        for site in [0, 30, 59] {
            let a = trivial.at(0.0, site, 0.01).unwrap();
            let b = trivial.at(0.0, site, 0.005).unwrap();
            assert!(a < 1e-2 && (a / b - 2.0).abs() < 1e-3, "{a} {b}");
            assert!(trivial.at(0.0, site, 0.001).unwrap() < 1e-3);
        }
        let topo = Ldos::new(&paper(2.0, FRAC_PI_2, 60)).unwrap();
        let edge = topo.at(0.0, 0, DEFAULT_BROADENING).unwrap();
        let bulk = topo.at(0.0, 30, DEFAULT_BROADENING).unwrap();
        assert!(edge > 1.0 && bulk < 1e-2 * edge, "edge {edge} bulk {bulk}");
        assert!(topo.at(0.0, 0, 0.0).is_err());
        assert!(topo.at(0.0, 60, 0.1).is_err());
    }

    #[test]
    fn ldos_sum_rule() {
        let n = 10;
        let l = Ldos::new(&paper(1.1, 0.8, n)).unwrap();
        let eta = 0.05;
        let (lo, hi, steps) = (-40.0, 40.0, 160_000);
        let dw = (hi - lo) / steps as f64;
        let omegas: Vec<f64> = (0..steps).map(|i| lo + (i as f64 + 0.5) * dw).collect();
        let total: f64 = (0..n)
            .map(|s| l.scan(&omegas, s, eta).unwrap().iter().sum::<f64>() * dw)
            .sum();
        // Lorentzian tails beyond the window carry ~ (2 eta / pi) / 40 per state.
        assert!((total - 4.0 * n as f64).abs() < 0.1, "{total}");
    }

    proptest! {
        #[test]
        fn pfaffian4_congruence(entries in prop::array::uniform6(-2.0..2.0f64), q in prop::array::uniform16(-1.0..1.0f64)) {
            let mut a = Matrix4::<f64>::zeros();
            let idx = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
            for ((i, j), x) in idx.iter().zip(entries) {
                a[(*i, *j)] = x;
                a[(*j, *i)] = -x;
            }
            // Orthogonal Q from the QR factorization of a random matrix.
            let q = Matrix4::from_row_slice(&q).qr().q();
            let lhs = pfaffian4(&(q * a * q.transpose())).unwrap();
            let rhs = q.determinant() * pfaffian4(&a).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-10);
            let det = a.determinant();
            let pf = pfaffian4(&a).unwrap();
            prop_assert!((pf * pf - det).abs() <= 1e-8 * det.abs().max(1e-12));
        }

        #[test]
        fn ldos_non_negative(omega in -6.0..6.0f64, site in 0usize..8) {
            let l = Ldos::new(&paper(1.2, 0.9, 8)).unwrap();
            prop_assert!(l.at(omega, site, 0.05).unwrap() >= 0.0);
        }
    }
}
