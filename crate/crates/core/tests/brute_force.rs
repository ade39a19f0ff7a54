//! Cross-checks of the symmetric-basis machinery against full tensor-product
//! constructions for small atom numbers.

mod common;

use common::{max_abs_diff, ThreeLevelSpace, TwoLevelSpace};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rydsqueeze::{
    evolve_ideal, jz_operator, spin_operator, DickeBasis, DickeState, IdealConfig, Ladder,
};

fn dicke_dense(basis: &DickeBasis, op: &rydsqueeze::SparseOp) -> DMatrix<C64> {
    let mut m = DMatrix::<C64>::zeros(basis.dimension(), basis.dimension());
    for e in op.entries() {
        m[(e.row, e.col)] += C64::new(e.weight, 0.0);
    }
    m
}

fn spin_dense(basis: &DickeBasis, theta: f64) -> DMatrix<C64> {
    let op = spin_operator(basis, theta);
    let d = op.to_dense();
    let n = basis.dimension();
    DMatrix::from_fn(n, n, |r, c| d[r][c])
}

#[test]
fn ladder_operators_match_tensor_projection() {
    // Every collective ladder operator equals the symmetric-subspace
    // projection of sum_i |to><from|_i in the full 3^N space (N <= 4).
    let cases = [
        (Ladder::AdagB, 1u8, 0u8),
        (Ladder::BdagA, 0, 1),
        (Ladder::RdagA, 0, 2),
        (Ladder::AdagR, 2, 0),
        (Ladder::RdagB, 1, 2),
        (Ladder::BdagR, 2, 1),
    ];
    for n in 1..=4usize {
        let space = ThreeLevelSpace::new(n);
        let basis = DickeBasis::new(n, 1.min(n)).unwrap();
        for (ladder, from, to) in cases {
            let tensor = space.collective_transfer(from, to);
            let projected = space.project(&basis, &tensor);
            let dicke = dicke_dense(&basis, &basis.ladder(ladder));
            // The projection keeps matrix elements into n_r = 2 states out
            // of the truncated basis automatically.
            let diff = max_abs_diff(&projected, &dicke);
            assert!(
                diff < 1e-12,
                "N={n} {ladder:?}: projection differs by {diff:.2e}"
            );
        }
    }
}

#[test]
fn spin_operators_match_tensor_projection() {
    for n in 1..=4usize {
        let space = ThreeLevelSpace::new(n);
        let basis = DickeBasis::new(n, 1.min(n)).unwrap();
        for theta in [0.0, 0.7, -std::f64::consts::FRAC_PI_4] {
            let tensor = {
                let t_ab = space.collective_transfer(1, 0); // a†b analogue
                let ph = C64::from_polar(0.5, theta);
                &t_ab * ph + t_ab.adjoint() * ph.conj()
            };
            let projected = space.project(&basis, &tensor);
            let dicke = spin_dense(&basis, theta);
            let diff = max_abs_diff(&projected, &dicke);
            assert!(diff < 1e-12, "N={n} theta={theta}: differs by {diff:.2e}");
        }
    }
}

#[test]
fn commutator_and_casimir_on_ground_manifold() {
    // [J_x, J_y] = i J_z and J_x^2 + J_y^2 + J_z^2 = (N/2)(N/2 + 1) on the
    // n_r = 0 sector, entrywise for N <= 6.
    for n in 1..=6usize {
        let basis = DickeBasis::new(n, 0).unwrap();
        let jx = spin_dense(&basis, 0.0);
        let jy = spin_dense(&basis, -std::f64::consts::FRAC_PI_2);
        let jz = {
            let d = jz_operator(&basis).to_dense();
            DMatrix::from_fn(basis.dimension(), basis.dimension(), |r, c| d[r][c])
        };
        let comm = &jx * &jy - &jy * &jx;
        let expect = &jz * C64::new(0.0, 1.0);
        assert!(max_abs_diff(&comm, &expect) < 1e-12, "commutator fails at N={n}");

        let casimir = &jx * &jx + &jy * &jy + &jz * &jz;
        let j = n as f64 / 2.0;
        let ident = DMatrix::<C64>::identity(basis.dimension(), basis.dimension());
        let expect = ident * C64::new(j * (j + 1.0), 0.0);
        assert!(max_abs_diff(&casimir, &expect) < 1e-12, "casimir fails at N={n}");
    }
}

#[test]
fn hermiticity_of_spin_operators() {
    for n in [2usize, 5] {
        for max_r in [0usize, 1] {
            let basis = DickeBasis::new(n, max_r).unwrap();
            for theta in [0.0, 1.1, 2.9] {
                let m = spin_dense(&basis, theta);
                assert!(max_abs_diff(&m, &m.adjoint()) < 1e-14);
            }
        }
    }
}

#[test]
fn ideal_evolution_matches_pairwise_tensor_model() {
    // Evolving the all-a state under the literal sum_{i != j} pair-transfer
    // Hamiltonian in the 2^N space reproduces the Dicke amplitudes.
    for n in 2..=4usize {
        let omega = 3e-3;
        let t_final = 20.0;
        let basis = DickeBasis::new(n, 0).unwrap();
        let cfg = IdealConfig::with_auto_steps(n, omega, t_final).unwrap();
        let trace_state = {
            // integrate in the Dicke basis with the crate's own engine
            let init = DickeState::all_in_a(basis.clone());
            let h = rydsqueeze::build_ideal_hamiltonian(&basis, omega).unwrap();
            let mut psi = init.into_amplitudes();
            let mut rk = rydsqueeze::integrate::Rk4::new(basis.dimension());
            let dt = cfg.t_final / cfg.n_steps as f64;
            for step in 0..cfg.n_steps {
                rydsqueeze::integrate::HamiltonianAction::dim(&h);
                rk.step(&h, step as f64 * dt, dt, &mut psi);
            }
            psi
        };

        let space = TwoLevelSpace::new(n);
        let h_full = space.pairwise_hamiltonian(omega);
        let embed = space.symmetric_embedding(&basis);
        // same integrator, same step count, on the full space
        let mut psi_full = vec![C64::new(0.0, 0.0); space.dim];
        psi_full[space.dim - 1] = C64::new(1.0, 0.0); // all bits set = all a
        struct Dense(DMatrix<C64>);
        impl rydsqueeze::integrate::HamiltonianAction for Dense {
            fn dim(&self) -> usize {
                self.0.nrows()
            }
            fn apply(&self, _t: f64, psi: &[C64], out: &mut [C64]) {
                for r in 0..self.0.nrows() {
                    let mut acc = C64::new(0.0, 0.0);
                    for c in 0..self.0.ncols() {
                        acc += self.0[(r, c)] * psi[c];
                    }
                    out[r] = acc;
                }
            }
        }
        let dense = Dense(h_full);
        let mut rk = rydsqueeze::integrate::Rk4::new(space.dim);
        let dt = cfg.t_final / cfg.n_steps as f64;
        for step in 0..cfg.n_steps {
            rk.step(&dense, step as f64 * dt, dt, &mut psi_full);
        }
        // project the full state onto the symmetric basis and compare
        for (col, _) in basis.iter() {
            let mut overlap = C64::new(0.0, 0.0);
            for s in 0..space.dim {
                overlap += embed[(s, col)].conj() * psi_full[s];
            }
            let diff = (overlap - trace_state[col]).norm();
            assert!(
                diff < 1e-8,
                "N={n} component {col}: tensor vs Dicke amplitude differ by {diff:.2e}"
            );
        }
    }
}

#[test]
fn loss_of_one_atom_matches_trace_out_oracle() {
    // Tracing one atom out of a symmetric squeezed pure state reproduces
    // var' = var (1 - 2/N) + 1/4 exactly, for N <= 4 and both the x and
    // -pi/4 axes.
    for n in 2..=4usize {
        let omega = 2e-3;
        // evolve to a mildly squeezed state
        let basis = DickeBasis::new(n, 0).unwrap();
        let cfg = IdealConfig::with_auto_steps(n, omega, 12.0).unwrap();
        let trace = evolve_ideal(&cfg, &DickeState::all_in_a(basis.clone())).unwrap();
        assert!(trace.rows.last().unwrap().s > 1.0);

        // rebuild the final state in the 2^N space by direct integration
        let space = TwoLevelSpace::new(n);
        let h_full = space.pairwise_hamiltonian(omega);
        struct Dense(DMatrix<C64>);
        impl rydsqueeze::integrate::HamiltonianAction for Dense {
            fn dim(&self) -> usize {
                self.0.nrows()
            }
            fn apply(&self, _t: f64, psi: &[C64], out: &mut [C64]) {
                for r in 0..self.0.nrows() {
                    let mut acc = C64::new(0.0, 0.0);
                    for c in 0..self.0.ncols() {
                        acc += self.0[(r, c)] * psi[c];
                    }
                    out[r] = acc;
                }
            }
        }
        let dense = Dense(h_full);
        let mut psi = vec![C64::new(0.0, 0.0); space.dim];
        psi[space.dim - 1] = C64::new(1.0, 0.0);
        let mut rk = rydsqueeze::integrate::Rk4::new(space.dim);
        let dt = cfg.t_final / cfg.n_steps as f64;
        for step in 0..cfg.n_steps {
            rk.step(&dense, step as f64 * dt, dt, &mut psi);
        }

        for theta in [0.0, -std::f64::consts::FRAC_PI_4] {
            let j_full = space.j_theta(theta);
            let mean = {
                let ap = &j_full * DMatrix::from_column_slice(space.dim, 1, &psi);
                psi.iter()
                    .zip(ap.column(0).iter())
                    .map(|(a, b)| (a.conj() * b).re)
                    .sum::<f64>()
            };
            let second = {
                let ap = &j_full * DMatrix::from_column_slice(space.dim, 1, &psi);
                ap.column(0).iter().map(|z| z.norm_sqr()).sum::<f64>()
            };
            // permutation-symmetric states from the all-a start have zero
            // transverse mean, so moment = variance
            assert!(mean.abs() < 1e-10);

            let rho = space.trace_out_first(&psi);
            let small = TwoLevelSpace::new(n - 1);
            let j_small = small.j_theta(theta);
            let second_after = common::expectation(&rho, &(&j_small * &j_small));

            let predicted = rydsqueeze::variance_after_single_loss(second, n).unwrap();
            assert!(
                (second_after - predicted).abs() < 1e-10,
                "N={n} theta={theta}: traced {second_after:.12} vs rule {predicted:.12}"
            );
        }
    }
}
