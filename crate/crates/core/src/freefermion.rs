//! Ground states of the quadratic model: covariance matrices, entanglement,
//! string correlators and chirality.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_4;

use faer::Mat;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{antisymmetric_eigh, pfaffian, C64};
use crate::params::{Boundary, ModelParams};
use crate::topology::{build_realspace, RealSpaceBdG};

/// |E| at or below this counts as a zero mode under strict filling.
pub const STRICT_ZERO_TOL: f64 = 1e-10;
/// Width of the zero-mode subspace when filling an even-parity state.
pub const DEGENERATE_ZERO_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Filling {
    /// Fill every negative-energy mode; zero modes are an error.
    Strict,
    /// Lowest state in the even fermion-parity sector.
    EvenParity,
}

#[derive(Debug, Clone)]
pub struct CovarianceData {
    pub n: usize,
    /// C_ij = <f_i^dag f_j>.
    pub c: Mat<C64>,
    /// F_ij = <f_i f_j>.
    pub f: Mat<C64>,
    /// M_ab = (i/2) <[a_a, a_b]> over Majoranas a_{2j} = f_j + f_j^dag,
    /// a_{2j+1} = i (f_j^dag - f_j). The vacuum has M_{2j,2j+1} = -1.
    pub majorana_m: Mat<f64>,
    pub energy: f64,
}

fn add_outer_imag(m: &mut Mat<f64>, u: &Mat<C64>, cols: &[usize], scale: f64) {
    if cols.is_empty() {
        return;
    }
    let sub = Mat::<C64>::from_fn(u.nrows(), cols.len(), |i, j| u[(i, cols[j])]);
    let p = &sub * sub.adjoint();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            m[(i, j)] += scale * p[(i, j)].im;
        }
    }
}

/// Real orthonormal basis of the span of complex columns `cols` of `u` closed
/// under conjugation (the zero-mode subspace of a real antisymmetric matrix).
fn real_basis(u: &Mat<C64>, cols: &[usize]) -> Result<Mat<f64>> {
    let d = cols.len();
    let stacked = Mat::<f64>::from_fn(u.nrows(), 2 * d, |i, j| {
        let z = u[(i, cols[j % d])];
        if j < d {
            z.re
        } else {
            z.im
        }
    });
    let svd = stacked
        .thin_svd()
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    Ok(svd.U().subcols(0, d).to_owned())
}

pub fn ground_covariance(rs: &RealSpaceBdG, filling: Filling) -> Result<CovarianceData> {
    let modes = rs.modes();
    let (energies, vectors) = antisymmetric_eigh(&rs.majorana())?;
    let e_min = energies.iter().fold(f64::INFINITY, |m, e| m.min(e.abs()));
    let zero_tol = match filling {
        Filling::Strict => {
            if e_min <= STRICT_ZERO_TOL {
                return Err(Error::AmbiguousFilling { e_min });
            }
            STRICT_ZERO_TOL
        }
        Filling::EvenParity => DEGENERATE_ZERO_TOL,
    };

    let positive: Vec<usize> = (0..energies.len())
        .filter(|&i| energies[i] > zero_tol)
        .collect();
    let zero: Vec<usize> = (0..energies.len())
        .filter(|&i| energies[i].abs() <= zero_tol)
        .collect();

    let mut m = Mat::<f64>::zeros(2 * modes, 2 * modes);
    add_outer_imag(&mut m, &vectors, &positive, -2.0);
    let mut energy = 0.5 * rs.trace_h() - 0.5 * positive.iter().map(|&i| energies[i]).sum::<f64>();

    // Zero modes: pair up a real basis of the null space.
    let zero_pairs = if zero.is_empty() {
        None
    } else {
        let basis = real_basis(&vectors, &zero)?;
        for p in 0..basis.ncols() / 2 {
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    let (v1, v2) = (basis.col(2 * p), basis.col(2 * p + 1));
                    m[(i, j)] += v1[i] * v2[j] - v2[i] * v1[j];
                }
            }
        }
        Some(basis)
    };

    if filling == Filling::EvenParity && pfaffian(m.as_ref())? < 0.0 {
        if let Some(basis) = zero_pairs.filter(|b| b.ncols() >= 2) {
            let (v1, v2) = (basis.col(0), basis.col(1));
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    m[(i, j)] -= 2.0 * (v1[i] * v2[j] - v2[i] * v1[j]);
                }
            }
        } else {
            // Excite the lowest quasiparticle.
            let low = *positive
                .iter()
                .min_by(|&&a, &&b| energies[a].total_cmp(&energies[b]))
                .ok_or_else(|| Error::Precondition("no modes to flip".into()))?;
            add_outer_imag(&mut m, &vectors, &[low], 4.0);
            energy += energies[low];
        }
    }

    let (c, f) = fermion_correlations(&m, modes);
    Ok(CovarianceData {
        n: rs.n,
        c,
        f,
        majorana_m: m,
        energy,
    })
}

/// C and F from <a_p a_q> = delta_pq - i M_pq.
fn fermion_correlations(m: &Mat<f64>, modes: usize) -> (Mat<C64>, Mat<C64>) {
    let i = C64::new(0.0, 1.0);
    let g = |p: usize, q: usize| {
        let d = if p == q { 1.0 } else { 0.0 };
        C64::new(d, -m[(p, q)])
    };
    let c = Mat::<C64>::from_fn(modes, modes, |a, b| {
        let (xa, ya, xb, yb) = (2 * a, 2 * a + 1, 2 * b, 2 * b + 1);
        (g(xa, xb) + i * g(xa, yb) - i * g(ya, xb) + g(ya, yb)) * 0.25
    });
    let f = Mat::<C64>::from_fn(modes, modes, |a, b| {
        let (xa, ya, xb, yb) = (2 * a, 2 * a + 1, 2 * b, 2 * b + 1);
        (g(xa, xb) + i * g(xa, yb) + i * g(ya, xb) - g(ya, yb)) * 0.25
    });
    (c, f)
}

/// Lowest energy of the quadratic Hamiltonian over both fermion parities.
pub fn quadratic_ground_energy(rs: &RealSpaceBdG) -> Result<f64> {
    let (energies, _) = antisymmetric_eigh(&rs.majorana())?;
    Ok(0.5 * rs.trace_h() - 0.5 * energies.iter().filter(|&&e| e > 0.0).sum::<f64>())
}

/// Builds the open-chain quadratic Hamiltonian and its ground covariance.
pub fn covariance_for(p: &ModelParams, filling: Filling) -> Result<CovarianceData> {
    ground_covariance(&build_realspace(p)?, filling)
}

impl CovarianceData {
    /// Fermion parity of the state, +1 even.
    pub fn parity(&self) -> Result<i8> {
        Ok(if pfaffian(self.majorana_m.as_ref())? >= 0.0 {
            1
        } else {
            -1
        })
    }

    /// <a_{p_1} ... a_{p_2m}> for distinct Majorana indices in the given order.
    pub fn majorana_expectation(&self, idx: &[usize]) -> Result<C64> {
        if idx.len() % 2 == 1 {
            return Ok(C64::new(0.0, 0.0));
        }
        let sub = Mat::<f64>::from_fn(idx.len(), idx.len(), |a, b| {
            if a == b {
                0.0
            } else {
                self.majorana_m[(idx[a], idx[b])]
            }
        });
        let pf = pfaffian(sub.as_ref())?;
        // (-i)^m
        let phase = match (idx.len() / 2) % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, -1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, 1.0),
        };
        Ok(phase * pf)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntanglementData {
    /// Unit cells [0, cut) form the subsystem.
    pub cut: usize,
    /// Largest reduced-density-matrix eigenvalues, descending.
    pub rdm_spectrum: Vec<f64>,
    /// Von Neumann entropy in nats.
    pub entropy: f64,
    pub schmidt_gap: f64,
    /// Single-particle levels nu in [0, 1], descending.
    pub single_particle: Vec<f64>,
}

pub const ES_KEEP: usize = 64;

fn binary_entropy(p: f64) -> f64 {
    let h = |x: f64| if x > 0.0 { -x * x.ln() } else { 0.0 };
    h(p) + h(1.0 - p)
}

#[derive(PartialEq)]
struct Node {
    cost: f64,
    last: usize,
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // Min-heap on cost.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then(other.last.cmp(&self.last))
    }
}

/// The `keep` smallest subset sums of non-negative `costs` (sorted ascending),
/// the empty subset included, in ascending order.
fn smallest_subset_sums(costs: &[f64], keep: usize) -> Vec<f64> {
    let mut out = vec![0.0];
    let mut heap = BinaryHeap::new();
    if !costs.is_empty() && costs[0].is_finite() {
        heap.push(Node {
            cost: costs[0],
            last: 0,
        });
    }
    while out.len() < keep {
        let Some(Node { cost, last }) = heap.pop() else {
            break;
        };
        out.push(cost);
        if let Some(&next) = costs.get(last + 1) {
            if next.is_finite() {
                heap.push(Node {
                    cost: cost + next,
                    last: last + 1,
                });
                heap.push(Node {
                    cost: cost - costs[last] + next,
                    last: last + 1,
                });
            }
        }
    }
    out
}

/// Entanglement of unit cells [0, cut) with the rest.
pub fn entanglement_ff(cov: &CovarianceData, cut: usize) -> Result<EntanglementData> {
    if cut == 0 || cut >= cov.n {
        return Err(Error::invalid("cut", format!("{cut} outside 1..{}", cov.n)));
    }
    let dim = 4 * cut;
    let sub = Mat::<f64>::from_fn(dim, dim, |a, b| cov.majorana_m[(a, b)]);
    let (vals, _) = antisymmetric_eigh(&sub)?;
    let mut nu: Vec<f64> = vals[dim / 2..].iter().map(|v| v.clamp(0.0, 1.0)).collect();
    nu.sort_by(|a, b| b.total_cmp(a));

    let entropy = nu.iter().map(|&v| binary_entropy(0.5 * (1.0 + v))).sum();
    let log_top: f64 = nu.iter().map(|&v| (0.5 * (1.0 + v)).ln()).sum();
    let mut costs: Vec<f64> = nu
        .iter()
        .map(|&v| {
            let (hi, lo) = (0.5 * (1.0 + v), 0.5 * (1.0 - v));
            if lo <= 0.0 {
                f64::INFINITY
            } else {
                (hi / lo).ln()
            }
        })
        .collect();
    costs.sort_by(f64::total_cmp);
    let rdm_spectrum: Vec<f64> = smallest_subset_sums(&costs, ES_KEEP)
        .into_iter()
        .map(|c| (log_top - c).exp())
        .collect();
    let schmidt_gap = rdm_spectrum[0] - rdm_spectrum.get(1).copied().unwrap_or(0.0);
    Ok(EntanglementData {
        cut,
        rdm_spectrum,
        entropy,
        schmidt_gap,
        single_particle: nu,
    })
}

/// Half-chain Schmidt gap of the even-parity open-chain ground state on a
/// (phi, g) grid; rows follow `phis`, columns `gs`. Failed points are `None`.
pub fn schmidt_gap_map(base: &ModelParams, gs: &[f64], phis: &[f64]) -> Vec<Vec<Option<f64>>> {
    let cells: Vec<Option<f64>> = phis
        .iter()
        .flat_map(|&phi| gs.iter().map(move |&g| (phi, g)))
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(phi, g)| {
            let p = base.with_g(g).with_phi(phi).with_boundary(Boundary::Open);
            covariance_for(&p, Filling::EvenParity)
                .and_then(|cov| entanglement_ff(&cov, p.n / 2))
                .map(|e| e.schmidt_gap)
                .map_err(|e| log::debug!("schmidt gap at g={g}, phi={phi}: {e}"))
                .ok()
        })
        .collect();
    cells.chunks(gs.len().max(1)).map(|r| r.to_vec()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpinAxis {
    /// S^x on chain B.
    XB,
    /// sigma^x on chain A.
    XA,
    /// sigma^y on chain A.
    YA,
    /// S^y on chain B.
    YB,
}

impl std::str::FromStr for SpinAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "xB" | "xb" | "XB" => Ok(SpinAxis::XB),
            "xA" | "xa" | "XA" => Ok(SpinAxis::XA),
            "yA" | "ya" | "YA" => Ok(SpinAxis::YA),
            "yB" | "yb" | "YB" => Ok(SpinAxis::YB),
            other => Err(Error::invalid("axis", format!("unknown axis `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Chain {
    A,
    B,
}

/// Position of a spin in the Jordan-Wigner ordering B_0, A_0, B_1, A_1, ...
pub fn jw_position(chain: Chain, site: usize) -> usize {
    match chain {
        Chain::B => 2 * site,
        Chain::A => 2 * site + 1,
    }
}

/// <X_i X_j> (`y == false`) or <Y_i Y_j> for Pauli operators at JW positions
/// i < j, as a Pfaffian over the string between them.
pub fn pauli_string_correlator(cov: &CovarianceData, i: usize, j: usize, y: bool) -> Result<f64> {
    if i >= j || j >= 2 * cov.n {
        return Err(Error::invalid(
            "site",
            format!("need i < j < {}, got ({i}, {j})", 2 * cov.n),
        ));
    }
    let m = j - i;
    let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    if !y {
        let idx: Vec<usize> = (2 * i + 1..=2 * j).collect();
        let sub = Mat::<f64>::from_fn(idx.len(), idx.len(), |a, b| {
            cov.majorana_m[(idx[a], idx[b])]
        });
        Ok(sign * pfaffian(sub.as_ref())?)
    } else {
        let mut idx = vec![2 * i];
        idx.extend(2 * i + 2..2 * j);
        idx.push(2 * j + 1);
        let sub = Mat::<f64>::from_fn(idx.len(), idx.len(), |a, b| {
            cov.majorana_m[(idx[a], idx[b])]
        });
        Ok(-sign * pfaffian(sub.as_ref())?)
    }
}

/// <S^a_n S^a_m> (spin-1/2) between sites n < m of one chain.
pub fn spin_correlator(cov: &CovarianceData, axis: SpinAxis, n: usize, m: usize) -> Result<f64> {
    if n >= m || m >= cov.n {
        return Err(Error::invalid(
            "site",
            format!("need n < m < {}, got ({n}, {m})", cov.n),
        ));
    }
    if n == 0 || m == cov.n - 1 {
        log::debug!("correlator ({n}, {m}) touches the chain boundary");
    }
    let (chain, y) = match axis {
        SpinAxis::XB => (Chain::B, false),
        SpinAxis::YB => (Chain::B, true),
        SpinAxis::XA => (Chain::A, false),
        SpinAxis::YA => (Chain::A, true),
    };
    Ok(0.25 * pauli_string_correlator(cov, jw_position(chain, n), jw_position(chain, m), y)?)
}

/// <(S_n x S_{n+1})^z> on one chain, spin-1/2 normalization, from the
/// fermionic image (i/2) <(f_i^dag f_j - f_j^dag f_i)(1 - 2 n_p)> with p the
/// mode sitting between i and j in JW order.
pub fn chirality_ff(cov: &CovarianceData, chain: Chain, bond: usize) -> Result<f64> {
    if bond + 1 >= cov.n {
        return Err(Error::invalid(
            "bond",
            format!("{bond} outside 0..{}", cov.n - 1),
        ));
    }
    let i = jw_position(chain, bond);
    let j = jw_position(chain, bond + 1);
    let p = i + 1;
    // f^dag_i = (x_i - i y_i)/2, f_j = (x_j + i y_j)/2, 1 - 2 n_p = -i x_p y_p.
    let im = C64::new(0.0, 1.0);
    let one = C64::new(1.0, 0.0);
    let mut x = C64::new(0.0, 0.0);
    for (a, ca) in [(2 * i, one), (2 * i + 1, -im)] {
        for (b, cb) in [(2 * j, one), (2 * j + 1, im)] {
            x += ca * cb * cov.majorana_expectation(&[a, b, 2 * p, 2 * p + 1])?;
        }
    }
    x *= -im * 0.25;
    // (i/2)(X - X^*) = -Im X.
    Ok(-x.im)
}

/// Mean over bulk bonds; the two outer bonds are dropped when there are at
/// least three.
pub fn bulk_mean(per_bond: &[f64]) -> f64 {
    let bulk = if per_bond.len() >= 3 {
        &per_bond[1..per_bond.len() - 1]
    } else {
        per_bond
    };
    bulk.iter().sum::<f64>() / bulk.len() as f64
}

/// Chirality of one chain averaged over bulk bonds.
pub fn mean_chirality_ff(cov: &CovarianceData, chain: Chain) -> Result<f64> {
    let per_bond = (0..cov.n - 1)
        .map(|b| chirality_ff(cov, chain, b))
        .collect::<Result<Vec<_>>>()?;
    Ok(bulk_mean(&per_bond))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderParameter {
    /// sqrt of the chain-B S^x correlator.
    pub chain_b: f64,
    /// sqrt of the chain-A correlator along `axis_a` (x below pi/4, y above).
    pub chain_a: f64,
    pub axis_a: SpinAxis,
    pub separation: usize,
}

/// In-plane order parameter from correlators between sites N/8 and N/8 + 3N/4
/// of the even-parity open-chain ground state.
pub fn order_parameter_ff(p: &ModelParams) -> Result<OrderParameter> {
    if !p.n.is_multiple_of(4) || p.n < 8 {
        return Err(Error::invalid(
            "N",
            format!("{} must be a multiple of 4 and at least 8", p.n),
        ));
    }
    let cov = covariance_for(&p.with_boundary(Boundary::Open), Filling::EvenParity)?;
    let start = p.n / 8;
    let r = 3 * p.n / 4;
    // Stripe-XY correlations alternate in sign with distance.
    let stagger = if p.phi > FRAC_PI_4 && r % 2 == 1 {
        -1.0
    } else {
        1.0
    };
    let axis_a = if p.phi > FRAC_PI_4 {
        SpinAxis::YA
    } else {
        SpinAxis::XA
    };
    let amplitude = |axis| -> Result<f64> {
        let v = stagger * spin_correlator(&cov, axis, start, start + r)?;
        if v < -1e-8 {
            return Err(Error::Precondition(format!(
                "correlator {v} along {axis:?} is negative"
            )));
        }
        Ok(v.max(0.0).sqrt())
    };
    Ok(OrderParameter {
        chain_b: amplitude(SpinAxis::XB)?,
        chain_a: amplitude(axis_a)?,
        axis_a,
        separation: r,
    })
}
