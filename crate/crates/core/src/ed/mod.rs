//! Exact diagonalization of the spin ladder, resolved by spin parity.
//!
//! Basis states are bit strings with chain-A site n on bit 2n and chain-B
//! site n on bit 2n+1; a set bit is spin up. Parity sectors are addressed by
//! dropping bit 0, which is fixed by the popcount of the remaining bits.

pub mod lanczos;

use std::f64::consts::FRAC_PI_4;

use faer::Mat;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freefermion::{bulk_mean, Chain, EntanglementData};
use crate::linalg::{hermitian_eigh, hermitian_eigvals, C64};
use crate::params::{Boundary, ModelParams};
use crate::topology::build_realspace;

/// Largest number of spins (both chains) accepted.
pub const MAX_SPINS: usize = 16;
/// Sectors up to this dimension are diagonalized densely.
pub const DENSE_LIMIT: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpinBasis {
    /// Sites per chain.
    pub n: usize,
}

impl SpinBasis {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(
                "N",
                format!("{n} sites per chain, need at least 2"),
            ));
        }
        if 2 * n > MAX_SPINS {
            return Err(Error::SizeCap {
                spins: 2 * n,
                cap: MAX_SPINS,
            });
        }
        Ok(Self { n })
    }

    pub fn n_spins(&self) -> usize {
        2 * self.n
    }

    pub fn dimension(&self) -> usize {
        1 << self.n_spins()
    }

    pub fn sector_dimension(&self) -> usize {
        self.dimension() / 2
    }

    pub fn bit(&self, chain: Chain, site: usize) -> usize {
        match chain {
            Chain::A => 2 * site,
            Chain::B => 2 * site + 1,
        }
    }

    /// Basis state with index `idx` inside the sector of the given parity.
    pub fn sector_state(&self, parity: i8, idx: usize) -> usize {
        let odd = usize::from(parity < 0);
        (idx << 1) | ((idx.count_ones() as usize & 1) ^ odd)
    }

    pub fn sector_index(state: usize) -> usize {
        state >> 1
    }

    pub fn parity_of(state: usize) -> i8 {
        if state.count_ones().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

/// Single-spin operator acting on one bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinOp {
    Plus,
    Minus,
    /// Projector on spin up, S^+ S^-.
    Up,
    X,
    Y,
    Z,
}

impl SpinOp {
    /// Image of basis `state` under the operator at `bit`, if nonzero.
    pub fn act(self, bit: usize, state: usize) -> Option<(usize, C64)> {
        let up = state >> bit & 1 == 1;
        let flipped = state ^ (1 << bit);
        let re = |x: f64| C64::new(x, 0.0);
        match (self, up) {
            (SpinOp::Plus, false) | (SpinOp::Minus, true) => Some((flipped, re(1.0))),
            (SpinOp::Plus, true) | (SpinOp::Minus, false) => None,
            (SpinOp::Up, true) => Some((state, re(1.0))),
            (SpinOp::Up, false) => None,
            (SpinOp::X, _) => Some((flipped, re(0.5))),
            (SpinOp::Y, true) => Some((flipped, C64::new(0.0, 0.5))),
            (SpinOp::Y, false) => Some((flipped, C64::new(0.0, -0.5))),
            (SpinOp::Z, true) => Some((state, re(0.5))),
            (SpinOp::Z, false) => Some((state, re(-0.5))),
        }
    }
}

/// Applies a product of single-spin operators, rightmost first.
pub fn apply_product(ops: &[(usize, SpinOp)], state: usize) -> Option<(usize, C64)> {
    let mut s = state;
    let mut amp = C64::new(1.0, 0.0);
    for &(bit, op) in ops.iter().rev() {
        let (t, c) = op.act(bit, s)?;
        s = t;
        amp *= c;
    }
    Some((s, amp))
}

#[derive(Debug, Clone)]
struct Term {
    coeff: C64,
    ops: Vec<(usize, SpinOp)>,
}

/// The spin Hamiltonian as a list of operator products.
#[derive(Debug, Clone)]
pub struct SpinHamiltonian {
    pub basis: SpinBasis,
    terms: Vec<Term>,
}

fn check_params(p: &ModelParams) -> Result<()> {
    for (name, v) in [
        ("omega0", p.omega_a),
        ("Omega0", p.omega_b),
        ("J", p.j),
        ("g", p.g),
        ("phi", p.phi),
    ] {
        if !v.is_finite() {
            return Err(Error::invalid(name, "not finite"));
        }
    }
    Ok(())
}

pub fn build_hamiltonian(p: &ModelParams) -> Result<SpinHamiltonian> {
    check_params(p)?;
    let basis = SpinBasis::new(p.n)?;
    let n = p.n;
    let a = |s: usize| basis.bit(Chain::A, s);
    let b = |s: usize| basis.bit(Chain::B, s);
    let bonds: Vec<(usize, usize)> = match p.boundary {
        Boundary::Open => (0..n - 1).map(|s| (s, s + 1)).collect(),
        Boundary::Periodic => (0..n).map(|s| (s, (s + 1) % n)).collect(),
    };

    let mut terms = Vec::new();
    let mut push = |coeff: C64, ops: Vec<(usize, SpinOp)>| {
        if coeff.norm() > 0.0 {
            terms.push(Term { coeff, ops });
        }
    };
    let re = |x: f64| C64::new(x, 0.0);
    for s in 0..n {
        push(re(p.omega_a), vec![(a(s), SpinOp::Up)]);
        push(re(p.omega_b), vec![(b(s), SpinOp::Up)]);
    }
    let t1 = C64::from_polar(p.g, p.phi);
    let t2 = C64::from_polar(p.g, -p.phi);
    for &(s, t) in &bonds {
        push(re(p.j), vec![(b(s), SpinOp::Plus), (b(t), SpinOp::Minus)]);
        push(re(p.j), vec![(b(s), SpinOp::Minus), (b(t), SpinOp::Plus)]);
        // 2g sigma^+_s S^x_t = g sigma^+_s (S^+_t + S^-_t), plus conjugate.
        for op in [SpinOp::Plus, SpinOp::Minus] {
            push(t1, vec![(a(s), SpinOp::Plus), (b(t), op)]);
            push(t1.conj(), vec![(a(s), SpinOp::Minus), (b(t), flip(op))]);
            push(t2, vec![(a(s), SpinOp::Plus), (b(s), op)]);
            push(t2.conj(), vec![(a(s), SpinOp::Minus), (b(s), flip(op))]);
        }
    }
    Ok(SpinHamiltonian { basis, terms })
}

fn flip(op: SpinOp) -> SpinOp {
    match op {
        SpinOp::Plus => SpinOp::Minus,
        SpinOp::Minus => SpinOp::Plus,
        other => other,
    }
}

/// Sector-restricted matrix in compressed rows.
#[derive(Debug, Clone)]
pub struct SectorMatrix {
    pub parity: i8,
    pub basis: SpinBasis,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl SpinHamiltonian {
    /// Nonzero entries <t|H|state> as (t, value), duplicates merged.
    fn column(&self, state: usize) -> Vec<(usize, C64)> {
        let mut out: Vec<(usize, C64)> = self
            .terms
            .iter()
            .filter_map(|term| apply_product(&term.ops, state).map(|(t, c)| (t, term.coeff * c)))
            .collect();
        out.sort_by_key(|e| e.0);
        let mut merged: Vec<(usize, C64)> = Vec::with_capacity(out.len());
        for (t, v) in out {
            match merged.last_mut() {
                Some(last) if last.0 == t => last.1 += v,
                _ => merged.push((t, v)),
            }
        }
        merged
    }

    /// y = H x on the full space.
    pub fn apply_full(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); x.len()];
        for (s, xs) in x.iter().enumerate() {
            if xs.norm_sqr() == 0.0 {
                continue;
            }
            for (t, v) in self.column(s) {
                y[t] += v * xs;
            }
        }
        y
    }

    pub fn sector(&self, parity: i8) -> Result<SectorMatrix> {
        let dim = self.basis.sector_dimension();
        let rows: Vec<Vec<(usize, C64)>> = (0..dim)
            .into_par_iter()
            .map(|idx| {
                let state = self.basis.sector_state(parity, idx);
                // H is Hermitian, so row `state` is the conjugate of its column.
                self.column(state)
                    .into_iter()
                    .map(|(t, v)| (t, SpinBasis::parity_of(t), v.conj()))
                    .map(|(t, pt, v)| {
                        if pt != parity {
                            Err(Error::Precondition(format!(
                                "term maps {state:#b} out of its parity sector"
                            )))
                        } else {
                            Ok((SpinBasis::sector_index(t), v))
                        }
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        let mut row_start = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_start.push(0);
        for row in rows {
            for (c, v) in row {
                cols.push(c);
                vals.push(v);
            }
            row_start.push(cols.len());
        }
        Ok(SectorMatrix {
            parity,
            basis: self.basis,
            row_start,
            cols,
            vals,
        })
    }
}

impl SectorMatrix {
    pub fn dimension(&self) -> usize {
        self.row_start.len() - 1
    }

    pub fn apply(&self, x: &[C64], y: &mut [C64]) {
        y.par_iter_mut().enumerate().for_each(|(i, yi)| {
            let (lo, hi) = (self.row_start[i], self.row_start[i + 1]);
            *yi = self.cols[lo..hi]
                .iter()
                .zip(&self.vals[lo..hi])
                .map(|(&c, v)| v * x[c])
                .sum();
        });
    }

    pub fn to_dense(&self) -> Mat<C64> {
        let dim = self.dimension();
        let mut m = Mat::<C64>::zeros(dim, dim);
        for i in 0..dim {
            for k in self.row_start[i]..self.row_start[i + 1] {
                m[(i, self.cols[k])] += self.vals[k];
            }
        }
        m
    }

    /// Embeds a sector vector into the full basis.
    pub fn embed(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.basis.dimension()];
        for (idx, x) in v.iter().enumerate() {
            out[self.basis.sector_state(self.parity, idx)] = *x;
        }
        out
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SectorSpectrum {
    pub sector: i8,
    /// Ascending.
    pub energies: Vec<f64>,
    /// Eigenvectors in the full basis, when requested.
    #[serde(skip)]
    pub states: Option<Vec<Vec<C64>>>,
    pub n_kept: usize,
}

fn solve_sector(m: &SectorMatrix, n_states: usize, want_vectors: bool) -> Result<SectorSpectrum> {
    let dim = m.dimension();
    let count = n_states.min(dim);
    let (energies, states) = if dim <= DENSE_LIMIT {
        let dense = m.to_dense();
        if want_vectors {
            let (vals, vecs) = hermitian_eigh(&dense)?;
            let states = (0..count)
                .map(|c| m.embed(&(0..dim).map(|r| vecs[(r, c)]).collect::<Vec<_>>()))
                .collect();
            (vals[..count].to_vec(), Some(states))
        } else {
            (hermitian_eigvals(&dense)?[..count].to_vec(), None)
        }
    } else {
        let (vals, vecs) = lanczos::lowest_eigenpairs(dim, count, |x, y| m.apply(x, y))?;
        let states = want_vectors.then(|| vecs.iter().map(|v| m.embed(v)).collect());
        (vals, states)
    };
    Ok(SectorSpectrum {
        sector: m.parity,
        energies,
        states,
        n_kept: count,
    })
}

/// Lowest `n_states` levels of the even (+1) and odd (-1) parity sectors.
pub fn sector_spectra(
    p: &ModelParams,
    n_states: usize,
    want_vectors: bool,
) -> Result<(SectorSpectrum, SectorSpectrum)> {
    let h = build_hamiltonian(p)?;
    let even = solve_sector(&h.sector(1)?, n_states, want_vectors)?;
    let odd = solve_sector(&h.sector(-1)?, n_states, want_vectors)?;
    Ok((even, odd))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gaps {
    /// E_GS(odd) - E_GS(even).
    pub delta0: f64,
    /// E_1st(odd) - E_GS(even).
    pub delta1: f64,
}

pub fn gaps(p: &ModelParams) -> Result<Gaps> {
    let (even, odd) = sector_spectra(p, 2, false)?;
    Ok(gaps_from(&even, &odd))
}

pub fn gaps_from(even: &SectorSpectrum, odd: &SectorSpectrum) -> Gaps {
    Gaps {
        delta0: odd.energies[0] - even.energies[0],
        delta1: odd.energies[1] - even.energies[0],
    }
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub parity: i8,
    pub state: Vec<C64>,
}

/// Lowest state over both sectors; ties go to the even sector.
pub fn ground_state(p: &ModelParams) -> Result<GroundState> {
    let (even, odd) = sector_spectra(p, 1, true)?;
    let pick = if odd.energies[0] < even.energies[0] {
        odd
    } else {
        even
    };
    let state = pick
        .states
        .and_then(|mut s| s.drain(..).next())
        .expect("vectors were requested");
    Ok(GroundState {
        energy: pick.energies[0],
        parity: pick.sector,
        state,
    })
}

/// <psi| O_1 O_2 ... |psi> for a product of single-spin operators.
pub fn expectation(state: &[C64], ops: &[(usize, SpinOp)]) -> C64 {
    state
        .iter()
        .enumerate()
        .filter(|(_, x)| x.norm_sqr() > 0.0)
        .filter_map(|(s, x)| apply_product(ops, s).map(|(t, c)| state[t].conj() * c * x))
        .sum()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdOrderParameter {
    pub chain_b: f64,
    pub chain_a: f64,
    pub separation: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdObservables {
    /// <S^x_n S^x_m> on chain B, indexed [n][m], spin-1/2 operators.
    pub corr_xb: Vec<Vec<f64>>,
    pub corr_xa: Vec<Vec<f64>>,
    pub corr_ya: Vec<Vec<f64>>,
    /// <(S_n x S_{n+1})^z> per bond.
    pub chirality_a: Vec<f64>,
    pub chirality_b: Vec<f64>,
    /// Bond averages excluding the two outermost bonds when N >= 4.
    pub mean_chirality_a: f64,
    pub mean_chirality_b: f64,
    /// <S^z> per site.
    pub magnetization_a: Vec<f64>,
    pub magnetization_b: Vec<f64>,
    /// Correlator amplitudes between the two chain ends.
    pub order_parameter: EdOrderParameter,
}

pub fn correlation_matrix(
    state: &[C64],
    basis: SpinBasis,
    chain: Chain,
    op: SpinOp,
) -> Vec<Vec<f64>> {
    let n = basis.n;
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = if i == j {
                0.25
            } else {
                expectation(
                    state,
                    &[(basis.bit(chain, i), op), (basis.bit(chain, j), op)],
                )
                .re
            };
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    out
}

/// <(S_n x S_{n+1})^z> = -Im <S^+_n S^-_{n+1}>.
pub fn chirality_ed(state: &[C64], basis: SpinBasis, chain: Chain, bond: usize) -> f64 {
    let z = expectation(
        state,
        &[
            (basis.bit(chain, bond), SpinOp::Plus),
            (basis.bit(chain, bond + 1), SpinOp::Minus),
        ],
    );
    -z.im
}

pub fn observables(state: &[C64], n: usize, phi: f64) -> Result<EdObservables> {
    let basis = SpinBasis::new(n)?;
    if state.len() != basis.dimension() {
        return Err(Error::Precondition(format!(
            "state of length {} for {} spins",
            state.len(),
            basis.n_spins()
        )));
    }
    let norm: f64 = state.iter().map(|x| x.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::Precondition(format!("state norm squared {norm}")));
    }
    let corr_xb = correlation_matrix(state, basis, Chain::B, SpinOp::X);
    let corr_xa = correlation_matrix(state, basis, Chain::A, SpinOp::X);
    let corr_ya = correlation_matrix(state, basis, Chain::A, SpinOp::Y);
    let chirality_a: Vec<f64> = (0..n - 1)
        .map(|s| chirality_ed(state, basis, Chain::A, s))
        .collect();
    let chirality_b: Vec<f64> = (0..n - 1)
        .map(|s| chirality_ed(state, basis, Chain::B, s))
        .collect();
    let mag = |chain| -> Vec<f64> {
        (0..n)
            .map(|s| expectation(state, &[(basis.bit(chain, s), SpinOp::Z)]).re)
            .collect()
    };
    let r = n - 1;
    let stagger = if phi > FRAC_PI_4 && r % 2 == 1 {
        -1.0
    } else {
        1.0
    };
    let corr_a = if phi > FRAC_PI_4 { &corr_ya } else { &corr_xa };
    let order_parameter = EdOrderParameter {
        chain_b: (stagger * corr_xb[0][r]).max(0.0).sqrt(),
        chain_a: (stagger * corr_a[0][r]).max(0.0).sqrt(),
        separation: r,
    };
    Ok(EdObservables {
        mean_chirality_a: bulk_mean(&chirality_a),
        mean_chirality_b: bulk_mean(&chirality_b),
        magnetization_a: mag(Chain::A),
        magnetization_b: mag(Chain::B),
        corr_xb,
        corr_xa,
        corr_ya,
        chirality_a,
        chirality_b,
        order_parameter,
    })
}

/// Schmidt decomposition between unit cells [0, cut) and the rest.
pub fn entanglement_ed(state: &[C64], n: usize, cut: usize) -> Result<EntanglementData> {
    let basis = SpinBasis::new(n)?;
    if cut == 0 || cut >= n {
        return Err(Error::invalid("cut", format!("{cut} outside 1..{n}")));
    }
    if state.len() != basis.dimension() {
        return Err(Error::Precondition(format!(
            "state of length {}",
            state.len()
        )));
    }
    let low = 2 * cut;
    let rows = 1usize << low;
    let cols = basis.dimension() >> low;
    let m = Mat::<C64>::from_fn(rows, cols, |a, b| state[(b << low) | a]);
    let svd = m
        .thin_svd()
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let mut rdm_spectrum: Vec<f64> = svd
        .S()
        .column_vector()
        .iter()
        .map(|s| s.re * s.re)
        .collect();
    rdm_spectrum.sort_by(|a, b| b.total_cmp(a));
    let entropy = rdm_spectrum
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.ln())
        .sum();
    let schmidt_gap = rdm_spectrum[0] - rdm_spectrum.get(1).copied().unwrap_or(0.0);
    Ok(EntanglementData {
        cut,
        rdm_spectrum,
        entropy,
        schmidt_gap,
        single_particle: Vec::new(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JwReport {
    pub ed_energy: f64,
    pub quadratic_energy: f64,
    /// ed_energy - quadratic_energy.
    pub discrepancy: f64,
    /// True when J = 0 or g = 0, where the two must agree.
    pub exact_limit: bool,
}

/// Compares the open-chain ED ground energy with the quadratic fermion model
/// that drops the string factor of the chain-B hopping.
pub fn jw_consistency(p: &ModelParams) -> Result<JwReport> {
    let p = p.with_boundary(Boundary::Open);
    let (even, odd) = sector_spectra(&p, 1, false)?;
    let ed_energy = even.energies[0].min(odd.energies[0]);
    let quadratic_energy = crate::freefermion::quadratic_ground_energy(&build_realspace(&p)?)?;
    Ok(JwReport {
        ed_energy,
        quadratic_energy,
        discrepancy: ed_energy - quadratic_energy,
        exact_limit: p.j == 0.0 || p.g == 0.0,
    })
}
