//! Brute-force Fock-space oracle built from explicit Kronecker products.
#![allow(dead_code)]

use chiral_ladder::linalg::C64;
use faer::Mat;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// 2x2 single-spin matrices in the basis (down, up).
pub fn sigma_plus() -> [[C64; 2]; 2] {
    [[c(0.0, 0.0), c(0.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]
}
pub fn sigma_minus() -> [[C64; 2]; 2] {
    [[c(0.0, 0.0), c(1.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]]
}
pub fn spin_x() -> [[C64; 2]; 2] {
    [[c(0.0, 0.0), c(0.5, 0.0)], [c(0.5, 0.0), c(0.0, 0.0)]]
}
pub fn spin_y() -> [[C64; 2]; 2] {
    // S^y = (1/2)[[0, -i], [i, 0]] in (up, down); reordered to (down, up).
    [[c(0.0, 0.0), c(0.0, 0.5)], [c(0.0, -0.5), c(0.0, 0.0)]]
}
pub fn spin_z() -> [[C64; 2]; 2] {
    [[c(-0.5, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.5, 0.0)]]
}
pub fn number() -> [[C64; 2]; 2] {
    [[c(0.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]
}
/// (-1)^n.
pub fn string() -> [[C64; 2]; 2] {
    [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]]
}

fn kron(a: &Mat<C64>, b: &[[C64; 2]; 2]) -> Mat<C64> {
    let n = a.nrows();
    Mat::from_fn(2 * n, 2 * n, |i, j| a[(i / 2, j / 2)] * b[i % 2][j % 2])
}

/// Operator acting with `factors` on the given qubits of an `l`-qubit space,
/// identity elsewhere. Qubit q is bit q of the basis index.
pub fn embed(l: usize, factors: &[(usize, [[C64; 2]; 2])]) -> Mat<C64> {
    let id = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
    let mut m = Mat::<C64>::from_fn(1, 1, |_, _| c(1.0, 0.0));
    for q in (0..l).rev() {
        let mut f = id;
        for (qq, op) in factors {
            if *qq == q {
                f = mul2(op, &f);
            }
        }
        m = kron(&m, &f);
    }
    m
}

fn mul2(a: &[[C64; 2]; 2], b: &[[C64; 2]; 2]) -> [[C64; 2]; 2] {
    let mut out = [[c(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Qubit of chain-A site n and chain-B site n.
pub fn qa(n: usize) -> usize {
    2 * n
}
pub fn qb(n: usize) -> usize {
    2 * n + 1
}

/// Jordan-Wigner ordering B_0, A_0, B_1, A_1, ... as qubits.
pub fn jw_qubits(n: usize) -> Vec<usize> {
    (0..n).flat_map(|s| [qb(s), qa(s)]).collect()
}

/// Annihilator of JW mode `i`: string over earlier modes times sigma^-.
pub fn fermion(n: usize, i: usize) -> Mat<C64> {
    let order = jw_qubits(n);
    let mut factors: Vec<(usize, [[C64; 2]; 2])> =
        order[..i].iter().map(|&q| (q, string())).collect();
    factors.push((order[i], sigma_minus()));
    embed(2 * n, &factors)
}

pub struct LadderSpec {
    pub n: usize,
    pub omega_a: f64,
    pub omega_b: f64,
    pub j: f64,
    pub g: f64,
    pub phi: f64,
    /// Replace the chain-B spin hopping by fermion hopping (drops the string).
    pub quadratic_hopping: bool,
}

/// Dense Hamiltonian of the open ladder.
pub fn ladder_hamiltonian(s: &LadderSpec) -> Mat<C64> {
    let l = 2 * s.n;
    let dim = 1usize << l;
    let mut h = Mat::<C64>::zeros(dim, dim);
    let mut add = |m: Mat<C64>, z: C64| {
        for i in 0..dim {
            for j in 0..dim {
                h[(i, j)] += z * m[(i, j)];
            }
        }
    };
    for n in 0..s.n {
        add(embed(l, &[(qa(n), number())]), c(s.omega_a, 0.0));
        add(embed(l, &[(qb(n), number())]), c(s.omega_b, 0.0));
    }
    let e1 = C64::from_polar(s.g, s.phi);
    let e2 = C64::from_polar(s.g, -s.phi);
    for n in 0..s.n - 1 {
        if s.quadratic_hopping {
            let f0 = fermion(s.n, 2 * n);
            let f1 = fermion(s.n, 2 * n + 2);
            let hop = f0.adjoint() * &f1;
            let hop_dag = hop.adjoint().to_owned();
            add(hop, c(s.j, 0.0));
            add(hop_dag, c(s.j, 0.0));
        } else {
            add(
                embed(l, &[(qb(n), sigma_plus()), (qb(n + 1), sigma_minus())]),
                c(s.j, 0.0),
            );
            add(
                embed(l, &[(qb(n), sigma_minus()), (qb(n + 1), sigma_plus())]),
                c(s.j, 0.0),
            );
        }
        // 2g sigma^+_n (e^{i phi} S^x_{n+1} + e^{-i phi} S^x_n) + h.c.
        add(
            embed(l, &[(qa(n), sigma_plus()), (qb(n + 1), spin_x())]),
            2.0 * e1,
        );
        add(
            embed(l, &[(qa(n), sigma_minus()), (qb(n + 1), spin_x())]),
            2.0 * e1.conj(),
        );
        add(
            embed(l, &[(qa(n), sigma_plus()), (qb(n), spin_x())]),
            2.0 * e2,
        );
        add(
            embed(l, &[(qa(n), sigma_minus()), (qb(n), spin_x())]),
            2.0 * e2.conj(),
        );
    }
    h
}

/// Ground energy, ground vector and the gap to the next level.
pub fn ground(h: &Mat<C64>) -> (f64, Vec<C64>, f64) {
    let eig = h.self_adjoint_eigen(faer::Side::Lower).unwrap();
    let vals: Vec<f64> = eig.S().column_vector().iter().map(|z| z.re).collect();
    let u = eig.U();
    let v = (0..h.nrows()).map(|i| u[(i, 0)]).collect();
    (vals[0], v, vals[1] - vals[0])
}

pub fn expect(op: &Mat<C64>, psi: &[C64]) -> C64 {
    let n = psi.len();
    let mut total = c(0.0, 0.0);
    for i in 0..n {
        let mut row = c(0.0, 0.0);
        for j in 0..n {
            row += op[(i, j)] * psi[j];
        }
        total += psi[i].conj() * row;
    }
    total
}

/// <(S_i x S_j)^z> with spin-1/2 operators on qubits i, j.
pub fn chirality(l: usize, i: usize, j: usize, psi: &[C64]) -> f64 {
    let xy = embed(l, &[(i, spin_x()), (j, spin_y())]);
    let yx = embed(l, &[(i, spin_y()), (j, spin_x())]);
    (expect(&xy, psi) - expect(&yx, psi)).re
}
