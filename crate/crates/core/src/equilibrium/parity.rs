//! Three-bath solver on the two parity blocks of `H_S′`.
//!
//! `P = σ_z ⊗ (−1)^{n₁} ⊗ (−1)^{n₂} ⊗ I` commutes with the three-bath
//! Hamiltonian: `S_x x₁` and `S_y x₂` each flip both the spin and one RC
//! parity, `S_z x₃` touches neither. Each block has dimension `n³`.
//!
//! Conjugating RC-y by `exp(iπ n₂/2)` sends `x₂` to `i(a† − a)/√(2Ω)`, so
//! `S_y x₂` becomes `(iS_y) ⊗ (a† − a)/√(2Ω)`, a product of two real
//! antisymmetric matrices. Every block is then real symmetric. The rotation
//! acts on a traced-out factor and leaves the reduced spin state unchanged.
//!
//! Off-diagonal spin elements connect opposite parities, so the reduced
//! state is `diag(p↑, p↓)`.

use faer::{Mat, Side};

use crate::error::{Error, Result};
use crate::linalg::gibbs_weights;
use crate::model::{ModelConfig, Topology, HBAR, LARMOR, SPIN_LENGTH};

struct Block {
    eigenvalues: Vec<f64>,
    /// Spin-up weight of each eigenvector.
    up_fraction: Vec<f64>,
}

/// Basis state `(spin, n₁, n₂, n₃)`; spin 0 is `|↑⟩` (`S_z = +½`).
type State = [usize; 4];

fn parity(s: &State) -> i32 {
    let sigma = if s[0] == 0 { 1 } else { -1 };
    if (s[1] + s[2]).is_multiple_of(2) {
        sigma
    } else {
        -sigma
    }
}

fn solve_block(cfg: &ModelConfig, sector: i32) -> Result<Block> {
    let n = cfg.n_max;
    let omega = cfg.bath.omega0;
    let lambda = cfg.bath.lambda();
    let c = (HBAR / (2.0 * omega)).sqrt();

    let mut states: Vec<State> = Vec::with_capacity(n * n * n);
    let mut local = vec![usize::MAX; 2 * n * n * n];
    let flat = |s: &State| ((s[0] * n + s[1]) * n + s[2]) * n + s[3];
    for spin in 0..2 {
        for n1 in 0..n {
            for n2 in 0..n {
                for n3 in 0..n {
                    let s = [spin, n1, n2, n3];
                    if parity(&s) == sector {
                        local[flat(&s)] = states.len();
                        states.push(s);
                    }
                }
            }
        }
    }
    let dim = states.len();
    let mut h = Mat::<f64>::zeros(dim, dim);
    for (col, s) in states.iter().enumerate() {
        let sz = if s[0] == 0 { SPIN_LENGTH } else { -SPIN_LENGTH };
        let quanta = (s[1] + s[2] + s[3]) as f64;
        h[(col, col)] = -LARMOR * sz + HBAR * omega * (quanta + 1.5);

        let flipped = 1 - s[0];
        for up in [false, true] {
            // λ S_x x₁: ⟨s̄|S_x|s⟩ = ½
            if let Some(m) = step(s[1], up, n) {
                let target = [flipped, m, s[2], s[3]];
                h[(local[flat(&target)], col)] += lambda * 0.5 * c * ladder(s[1], m);
            }
            // λ (iS_y) ⊗ (a† − a)/√(2Ω): ⟨↑|iS_y|↓⟩ = ½, ⟨↓|iS_y|↑⟩ = −½
            if let Some(m) = step(s[2], up, n) {
                let spin_elem = if s[0] == 1 { 0.5 } else { -0.5 };
                let osc_elem = if up {
                    ladder(s[2], m)
                } else {
                    -ladder(s[2], m)
                };
                let target = [flipped, s[1], m, s[3]];
                h[(local[flat(&target)], col)] += lambda * spin_elem * c * osc_elem;
            }
            // λ S_z x₃
            if let Some(m) = step(s[3], up, n) {
                let target = [s[0], s[1], s[2], m];
                h[(local[flat(&target)], col)] += lambda * sz * c * ladder(s[3], m);
            }
        }
    }

    let evd = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::EigenConvergence { dim })?;
    let values = evd.S();
    let vectors = evd.U();
    let eigenvalues: Vec<f64> = (0..dim).map(|k| values[k]).collect();
    let up_rows: Vec<usize> = (0..dim).filter(|&r| states[r][0] == 0).collect();
    let up_fraction = (0..dim)
        .map(|k| {
            up_rows
                .iter()
                .map(|&r| vectors[(r, k)] * vectors[(r, k)])
                .sum()
        })
        .collect();
    Ok(Block {
        eigenvalues,
        up_fraction,
    })
}

fn step(k: usize, up: bool, n: usize) -> Option<usize> {
    if up {
        (k + 1 < n).then_some(k + 1)
    } else {
        k.checked_sub(1)
    }
}

/// `√max(k, m)` for neighbouring Fock levels.
fn ladder(k: usize, m: usize) -> f64 {
    (k.max(m) as f64).sqrt()
}

/// Spin populations `(p↑, p↓)` of the three-bath mean-force state at
/// inverse temperature `beta` (`+inf` for the ground eigenspace).
pub fn three_bath_spin_populations(cfg: &ModelConfig, beta: f64) -> Result<(f64, f64)> {
    if cfg.topology != Topology::ThreeBath {
        return Err(Error::validation(
            "parity solver only handles the three-bath topology",
        ));
    }
    cfg.validate()?;
    let even = solve_block(cfg, 1)?;
    let odd = solve_block(cfg, -1)?;
    let eigenvalues: Vec<f64> = even
        .eigenvalues
        .iter()
        .chain(&odd.eigenvalues)
        .copied()
        .collect();
    let fractions = even.up_fraction.iter().chain(&odd.up_fraction);
    let weights = gibbs_weights(&eigenvalues, beta)?;
    let up: f64 = weights.iter().zip(fractions).map(|(w, f)| w * f).sum();
    let up = up.clamp(0.0, 1.0);
    Ok((up, 1.0 - up))
}
