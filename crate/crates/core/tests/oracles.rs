//! Cross-checks of the free-fermion and ED engines against dense Fock-space
//! diagonalization.

mod common;

use chiral_ladder::ed::{entanglement_ed, ground_state, observables};
use chiral_ladder::freefermion::{
    chirality_ff, covariance_for, entanglement_ff, quadratic_ground_energy, spin_correlator, Chain,
    Filling, SpinAxis,
};
use chiral_ladder::topology::build_realspace;
use chiral_ladder::ModelParams;
use common::*;

fn params(j: f64, g: f64, phi: f64, n: usize) -> ModelParams {
    ModelParams::default()
        .with_j(j)
        .with_g(g)
        .with_phi(phi)
        .with_n(n)
}

fn spec(p: &ModelParams, quadratic_hopping: bool) -> LadderSpec {
    LadderSpec {
        n: p.n,
        omega_a: p.omega_a,
        omega_b: p.omega_b,
        j: p.j,
        g: p.g,
        phi: p.phi,
        quadratic_hopping,
    }
}

#[test]
fn covariance_matches_fock_two_cells() {
    for (g, phi) in [(0.8, 0.6), (1.4, 1.3), (2.2, 0.2)] {
        let p = params(1.0, g, phi, 2);
        let h = ladder_hamiltonian(&spec(&p, true));
        let (e0, psi, gap) = ground(&h);
        assert!(gap > 1e-3);
        let cov = covariance_for(&p, Filling::Strict).unwrap();
        assert!(
            (cov.energy - e0).abs() < 1e-10,
            "energy {} vs {e0}",
            cov.energy
        );
        let modes = 4;
        let ops: Vec<_> = (0..modes).map(|i| fermion(2, i)).collect();
        for a in 0..modes {
            for b in 0..modes {
                let cab = expect(&(ops[a].adjoint() * &ops[b]), &psi);
                let fab = expect(&(&ops[a] * &ops[b]), &psi);
                assert!(
                    (cov.c[(a, b)] - cab).norm() < 1e-8,
                    "C[{a},{b}]: {} vs {cab}",
                    cov.c[(a, b)]
                );
                assert!(
                    (cov.f[(a, b)] - fab).norm() < 1e-8,
                    "F[{a},{b}]: {} vs {fab}",
                    cov.f[(a, b)]
                );
            }
        }
    }
}

#[test]
fn string_correlators_and_chirality_match_fock_five_cells() {
    let n = 5;
    let l = 2 * n;
    for (j, g, phi) in [
        (0.7, 0.9, 0.4),
        (0.0, 1.0, std::f64::consts::PI / 3.0),
        (1.0, 2.0, 1.2),
    ] {
        let p = params(j, g, phi, n);
        let h = ladder_hamiltonian(&spec(&p, true));
        let (e0, psi, gap) = ground(&h);
        assert!(gap > 1e-4, "gap {gap}");
        let e_ff = quadratic_ground_energy(&build_realspace(&p).unwrap()).unwrap();
        assert!((e_ff - e0).abs() < 1e-10);
        let cov = covariance_for(&p, Filling::Strict).unwrap();
        for (axis, chain, op) in [
            (SpinAxis::XB, Chain::B, spin_x()),
            (SpinAxis::YB, Chain::B, spin_y()),
            (SpinAxis::XA, Chain::A, spin_x()),
            (SpinAxis::YA, Chain::A, spin_y()),
        ] {
            let q = |s: usize| if chain == Chain::A { qa(s) } else { qb(s) };
            for a in 0..n {
                for b in a + 1..n {
                    let exact = expect(&embed(l, &[(q(a), op), (q(b), op)]), &psi).re;
                    let ff = spin_correlator(&cov, axis, a, b).unwrap();
                    assert!(
                        (ff - exact).abs() < 1e-8,
                        "{axis:?} ({a},{b}): {ff} vs {exact}"
                    );
                }
            }
        }
        for chain in [Chain::A, Chain::B] {
            for bond in 0..n - 1 {
                let (qi, qj) = match chain {
                    Chain::A => (qa(bond), qa(bond + 1)),
                    Chain::B => (qb(bond), qb(bond + 1)),
                };
                let exact = chirality(l, qi, qj, &psi);
                let ff = chirality_ff(&cov, chain, bond).unwrap();
                assert!(
                    (ff - exact).abs() < 1e-8,
                    "{chain:?} bond {bond}: {ff} vs {exact}"
                );
            }
        }
    }
}

#[test]
fn ed_observables_match_dense_eigenvectors() {
    let n = 3;
    let l = 2 * n;
    for (g, phi) in [(0.9, 0.5), (1.7, 1.1)] {
        let p = params(1.0, g, phi, n);
        let (e0, psi, gap) = ground(&ladder_hamiltonian(&spec(&p, false)));
        assert!(gap > 1e-6);
        let gs = ground_state(&p).unwrap();
        assert!((gs.energy - e0).abs() < 1e-10);
        let obs = observables(&gs.state, n, phi).unwrap();
        for a in 0..n {
            let mz = expect(&embed(l, &[(qa(a), spin_z())]), &psi).re;
            assert!((obs.magnetization_a[a] - mz).abs() < 1e-10);
            let mz = expect(&embed(l, &[(qb(a), spin_z())]), &psi).re;
            assert!((obs.magnetization_b[a] - mz).abs() < 1e-10);
            for b in a + 1..n {
                let xb = expect(&embed(l, &[(qb(a), spin_x()), (qb(b), spin_x())]), &psi).re;
                let ya = expect(&embed(l, &[(qa(a), spin_y()), (qa(b), spin_y())]), &psi).re;
                assert!((obs.corr_xb[a][b] - xb).abs() < 1e-10);
                assert!((obs.corr_ya[a][b] - ya).abs() < 1e-10);
            }
        }
        for bond in 0..n - 1 {
            assert!(
                (obs.chirality_a[bond] - chirality(l, qa(bond), qa(bond + 1), &psi)).abs() < 1e-10
            );
            assert!(
                (obs.chirality_b[bond] - chirality(l, qb(bond), qb(bond + 1), &psi)).abs() < 1e-10
            );
        }
    }
}

#[test]
fn ed_entanglement_matches_free_fermions_without_hopping() {
    let p = params(0.0, 1.3, 0.9, 5);
    let gs = ground_state(&p).unwrap();
    let cov = covariance_for(&p, Filling::Strict).unwrap();
    for cut in 1..5 {
        let ed = entanglement_ed(&gs.state, 5, cut).unwrap();
        let ff = entanglement_ff(&cov, cut).unwrap();
        assert!(
            (ed.entropy - ff.entropy).abs() < 1e-8,
            "cut {cut}: {} vs {}",
            ed.entropy,
            ff.entropy
        );
        for (a, b) in ed.rdm_spectrum.iter().zip(&ff.rdm_spectrum).take(16) {
            assert!((a - b).abs() < 1e-8);
        }
    }
}
