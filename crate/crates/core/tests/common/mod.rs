//! Brute-force tensor-product constructions used as independent oracles.
//! Nothing here touches the crate's symmetric-basis machinery beyond reading
//! basis labels, so agreement is a real cross-check.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rydsqueeze::DickeBasis;

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Full `3^N` product space of three-level atoms (0 = a, 1 = b, 2 = r).
pub struct ThreeLevelSpace {
    pub n_atoms: usize,
    pub dim: usize,
}

impl ThreeLevelSpace {
    pub fn new(n_atoms: usize) -> Self {
        Self {
            n_atoms,
            dim: 3usize.pow(n_atoms as u32),
        }
    }

    pub fn levels(&self, mut s: usize) -> Vec<u8> {
        (0..self.n_atoms)
            .map(|_| {
                let l = (s % 3) as u8;
                s /= 3;
                l
            })
            .collect()
    }

    /// Collective transfer operator `sum_i |to><from|_i`.
    pub fn collective_transfer(&self, from: u8, to: u8) -> DMatrix<C64> {
        let mut m = DMatrix::<C64>::zeros(self.dim, self.dim);
        for s in 0..self.dim {
            let lv = self.levels(s);
            for (atom, &l) in lv.iter().enumerate() {
                if l == from {
                    let step = 3usize.pow(atom as u32);
                    let t = s - from as usize * step + to as usize * step;
                    m[(t, s)] += C64::new(1.0, 0.0);
                }
            }
        }
        m
    }

    /// Isometry from the Dicke basis into the product space: column
    /// `(n_a, n_r)` is the normalized symmetric combination of product
    /// states with those occupation counts.
    pub fn symmetric_embedding(&self, basis: &DickeBasis) -> DMatrix<C64> {
        assert_eq!(basis.n_atoms(), self.n_atoms);
        let mut e = DMatrix::<C64>::zeros(self.dim, basis.dimension());
        for (col, (n_a, n_r)) in basis.iter() {
            let n_b = self.n_atoms - n_a - n_r;
            let count = factorial(self.n_atoms) / (factorial(n_a) * factorial(n_b) * factorial(n_r));
            let amp = 1.0 / count.sqrt();
            for s in 0..self.dim {
                let lv = self.levels(s);
                let na = lv.iter().filter(|&&l| l == 0).count();
                let nr = lv.iter().filter(|&&l| l == 2).count();
                if na == n_a && nr == n_r {
                    e[(s, col)] = C64::new(amp, 0.0);
                }
            }
        }
        e
    }

    /// Project a product-space operator onto the symmetric subspace spanned
    /// by `basis`: `E^dagger A E`.
    pub fn project(&self, basis: &DickeBasis, a: &DMatrix<C64>) -> DMatrix<C64> {
        let e = self.symmetric_embedding(basis);
        e.adjoint() * a * e
    }
}

/// Full `2^N` product space of two-level atoms (bit 1 = a, bit 0 = b).
pub struct TwoLevelSpace {
    pub n_atoms: usize,
    pub dim: usize,
}

impl TwoLevelSpace {
    pub fn new(n_atoms: usize) -> Self {
        Self {
            n_atoms,
            dim: 1usize << n_atoms,
        }
    }

    /// `J+ = sum_i |a><b|_i` (sets bit i).
    pub fn jplus(&self) -> DMatrix<C64> {
        let mut m = DMatrix::<C64>::zeros(self.dim, self.dim);
        for s in 0..self.dim {
            for i in 0..self.n_atoms {
                if s & (1 << i) == 0 {
                    m[(s | (1 << i), s)] += C64::new(1.0, 0.0);
                }
            }
        }
        m
    }

    /// Literal pairwise realization `omega * sum_{i != j} (t+_i t+_j + h.c.)`.
    pub fn pairwise_hamiltonian(&self, omega: f64) -> DMatrix<C64> {
        let mut m = DMatrix::<C64>::zeros(self.dim, self.dim);
        for s in 0..self.dim {
            for i in 0..self.n_atoms {
                for j in 0..self.n_atoms {
                    if i == j {
                        continue;
                    }
                    if s & (1 << i) == 0 && s & (1 << j) == 0 {
                        let t = s | (1 << i) | (1 << j);
                        m[(t, s)] += C64::new(omega, 0.0);
                        m[(s, t)] += C64::new(omega, 0.0);
                    }
                }
            }
        }
        m
    }

    /// Isometry from the ground-manifold Dicke basis (max_rydberg = 0).
    pub fn symmetric_embedding(&self, basis: &DickeBasis) -> DMatrix<C64> {
        assert_eq!(basis.n_atoms(), self.n_atoms);
        assert_eq!(basis.max_rydberg(), 0);
        let mut e = DMatrix::<C64>::zeros(self.dim, basis.dimension());
        for (col, (n_a, _)) in basis.iter() {
            let count = factorial(self.n_atoms)
                / (factorial(n_a) * factorial(self.n_atoms - n_a));
            let amp = 1.0 / count.sqrt();
            for s in 0..self.dim {
                if (s.count_ones() as usize) == n_a {
                    e[(s, col)] = C64::new(amp, 0.0);
                }
            }
        }
        e
    }

    /// Reduced density matrix after tracing out atom 0.
    pub fn trace_out_first(&self, psi: &[C64]) -> DMatrix<C64> {
        let half = self.dim / 2;
        let mut rho = DMatrix::<C64>::zeros(half, half);
        for rest in 0..half {
            for rest2 in 0..half {
                let mut acc = C64::new(0.0, 0.0);
                for b0 in 0..2usize {
                    // atom 0 is bit 0
                    acc += psi[(rest << 1) | b0] * psi[(rest2 << 1) | b0].conj();
                }
                rho[(rest, rest2)] = acc;
            }
        }
        rho
    }

    /// `J_theta` in the halved convention on this space.
    pub fn j_theta(&self, theta: f64) -> DMatrix<C64> {
        let jp = self.jplus();
        let ph = C64::from_polar(0.5, theta);
        &jp * ph + jp.adjoint() * ph.conj()
    }
}

pub fn expectation(rho: &DMatrix<C64>, op: &DMatrix<C64>) -> f64 {
    (rho * op).trace().re
}

pub fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    let mut worst = 0.0_f64;
    for (x, y) in a.iter().zip(b.iter()) {
        worst = worst.max((x - y).norm());
    }
    worst
}
