//! Gate application on the chain representation.
//!
//! Single-qubit gates touch one site tensor and nothing else. Two-qubit gates
//! on adjacent sites contract the pair into a two-site block, apply the gate,
//! and split the block again with an SVD; the singular values of the
//! boundary-weighted block are exactly the new Schmidt coefficients, so the
//! canonical gauge survives every update. Distant pairs are routed together
//! with a ladder of adjacent swaps and routed back afterwards.

use ndarray::{s, Array2, Array3, Order};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mps::{adjoint, MpsState};
use crate::numerics::{self, ComplexMatrix, TolerancePolicy};

/// A 2x2 unitary bound to a target qubit.
#[derive(Clone, Debug)]
pub struct Gate1Q {
    matrix: ComplexMatrix,
    target: usize,
}

impl Gate1Q {
    /// Validates the matrix shape and unitarity (default tolerance policy).
    pub fn new(matrix: ComplexMatrix, target: usize) -> Result<Self> {
        if matrix.dim() != (2, 2) {
            return Err(Error::Shape(format!(
                "single-qubit gate must be 2x2, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if !numerics::check_unitary(&matrix, &TolerancePolicy::default())? {
            return Err(Error::Gate("matrix is not unitary".into()));
        }
        Ok(Self { matrix, target })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn target(&self) -> usize {
        self.target
    }

    /// The inverse gate on the same target.
    pub fn dagger(&self) -> Self {
        Self {
            matrix: adjoint(&self.matrix.view()),
            target: self.target,
        }
    }
}

/// A 4x4 unitary bound to an ordered pair of distinct qubits. The first
/// target supplies the high bit of the matrix index, the second the low bit.
#[derive(Clone, Debug)]
pub struct Gate2Q {
    matrix: ComplexMatrix,
    targets: (usize, usize),
}

impl Gate2Q {
    pub fn new(matrix: ComplexMatrix, t1: usize, t2: usize) -> Result<Self> {
        if matrix.dim() != (4, 4) {
            return Err(Error::Shape(format!(
                "two-qubit gate must be 4x4, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if t1 == t2 {
            return Err(Error::Gate(format!(
                "targets must be distinct, both are {t1}"
            )));
        }
        if !numerics::check_unitary(&matrix, &TolerancePolicy::default())? {
            return Err(Error::Gate("matrix is not unitary".into()));
        }
        Ok(Self {
            matrix,
            targets: (t1, t2),
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn targets(&self) -> (usize, usize) {
        self.targets
    }

    pub fn dagger(&self) -> Self {
        Self {
            matrix: adjoint(&self.matrix.view()),
            targets: self.targets,
        }
    }
}

/// The 4x4 swap permutation used for routing.
pub(crate) fn swap_matrix() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros((4, 4));
    m[(0, 0)] = Complex64::new(1.0, 0.0);
    m[(1, 2)] = Complex64::new(1.0, 0.0);
    m[(2, 1)] = Complex64::new(1.0, 0.0);
    m[(3, 3)] = Complex64::new(1.0, 0.0);
    m
}

/// Conjugates a 4x4 gate by the swap permutation, exchanging the roles of the
/// two qubits.
fn swap_conjugate(m: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_shape_fn((4, 4), |(row, col)| {
        let (i, j) = (row >> 1, row & 1);
        let (p, q) = (col >> 1, col & 1);
        m[(j * 2 + i, q * 2 + p)]
    })
}

impl MpsState {
    /// Applies a single-qubit gate. Only the target's site tensor changes;
    /// every bond vector and every other site tensor is untouched.
    pub fn apply_1q(&mut self, gate: &Gate1Q) -> Result<()> {
        let k = gate.target();
        if k >= self.n() {
            return Err(Error::Index(format!(
                "qubit {k} out of range for {} qubits",
                self.n()
            )));
        }
        let g = &self.gammas[k];
        let (dl, _, dr) = g.dim();
        let u = gate.matrix();
        let mut out = Array3::<Complex64>::zeros((dl, 2, dr));
        for a in 0..dl {
            for b in 0..dr {
                for i in 0..2 {
                    out[(a, i, b)] = u[(i, 0)] * g[(a, 0, b)] + u[(i, 1)] * g[(a, 1, b)];
                }
            }
        }
        self.gammas[k] = out;
        Ok(())
    }

    /// Applies a two-qubit gate to adjacent targets. Only the two site
    /// tensors and the bond between them change.
    pub fn apply_2q_adjacent(&mut self, gate: &Gate2Q) -> Result<()> {
        let (t1, t2) = gate.targets();
        self.check_targets(t1, t2)?;
        if t1.abs_diff(t2) != 1 {
            return Err(Error::Gate(format!(
                "targets {t1} and {t2} are not adjacent"
            )));
        }
        let oriented = if t1 < t2 {
            gate.matrix().clone()
        } else {
            swap_conjugate(gate.matrix())
        };
        self.apply_v_adjacent(t1.min(t2), &oriented)
    }

    /// Applies a two-qubit gate to any pair of distinct targets, routing
    /// distant pairs together with `2 (d - 1)` adjacent swaps for distance `d`.
    pub fn apply_2q(&mut self, gate: &Gate2Q) -> Result<()> {
        let (t1, t2) = gate.targets();
        self.check_targets(t1, t2)?;
        let low = t1.min(t2);
        let high = t1.max(t2);
        let oriented = if t1 < t2 {
            gate.matrix().clone()
        } else {
            swap_conjugate(gate.matrix())
        };
        if high - low == 1 {
            return self.apply_v_adjacent(low, &oriented);
        }
        let swap = swap_matrix();
        for site in low..high - 1 {
            self.apply_v_adjacent(site, &swap)?;
        }
        self.apply_v_adjacent(high - 1, &oriented)?;
        for site in (low..high - 1).rev() {
            self.apply_v_adjacent(site, &swap)?;
        }
        Ok(())
    }

    /// Cuts bond `bond` down to at most `chi_cap` Schmidt terms, keeping the
    /// largest. Returns the discarded squared Schmidt weight `w`; the retained
    /// spectrum is renormalized, and the fidelity of the truncated state
    /// against the original is exactly `1 - w`.
    pub fn truncate_bond(&mut self, bond: usize, chi_cap: usize) -> Result<f64> {
        if self.n() < 2 || bond >= self.n() - 1 {
            return Err(Error::Index(format!(
                "bond {bond} out of range for {} qubits",
                self.n()
            )));
        }
        let cap = chi_cap.max(1);
        let current = self.lambdas[bond].len();
        if cap >= current {
            return Ok(0.0);
        }
        let dropped: f64 = self.lambdas[bond][cap..].iter().map(|x| x * x).sum();
        let kept_weight: f64 = self.lambdas[bond][..cap].iter().map(|x| x * x).sum();
        let scale = kept_weight.sqrt();
        self.lambdas[bond] = self.lambdas[bond][..cap]
            .iter()
            .map(|x| x / scale)
            .collect();
        self.gammas[bond] = self.gammas[bond].slice(s![.., .., ..cap]).to_owned();
        self.gammas[bond + 1] = self.gammas[bond + 1].slice(s![..cap, .., ..]).to_owned();
        self.discarded_weight += dropped;
        Ok(dropped)
    }

    fn check_targets(&self, t1: usize, t2: usize) -> Result<()> {
        for t in [t1, t2] {
            if t >= self.n() {
                return Err(Error::Index(format!(
                    "qubit {t} out of range for {} qubits",
                    self.n()
                )));
            }
        }
        Ok(())
    }

    /// Core two-site update at sites `(k, k + 1)` for a gate matrix whose
    /// high bit belongs to site `k`.
    ///
    /// The two-site block contracted with the boundary bond vectors is the
    /// wavefunction of the bipartition through bond `k`, so its singular
    /// values replace `lambda[k]` exactly. The new site tensors are recovered
    /// by dividing the boundary weights back out; rows or columns whose
    /// boundary weight is degenerate (within 10x the rank tolerance of the
    /// largest) are instead rebuilt from the block itself, which divides only
    /// by the fresh singular values.
    fn apply_v_adjacent(&mut self, k: usize, v: &ComplexMatrix) -> Result<()> {
        let n = self.n();
        debug_assert!(k + 1 < n);
        let (dl, _, dm) = self.gammas[k].dim();
        let (_, _, dr) = self.gammas[k + 1].dim();
        let one = [1.0f64];

        // Two-site block theta[(a i), (j g)] with the shared bond contracted.
        let mut left = self.gammas[k]
            .to_shape(((dl * 2, dm), Order::RowMajor))
            .expect("site tensor flattens by fusing left and physical axes")
            .to_owned();
        for (b, &lv) in self.lambdas[k].iter().enumerate() {
            left.column_mut(b).mapv_inplace(|z| z * lv);
        }
        let right = self.gammas[k + 1]
            .to_shape(((dm, 2 * dr), Order::RowMajor))
            .expect("site tensor flattens by fusing physical and right axes");
        let merged = left.dot(&right);
        let mut theta = Array2::<Complex64>::zeros((dl * 2, 2 * dr));
        for a in 0..dl {
            for g in 0..dr {
                for i in 0..2 {
                    for j in 0..2 {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for p in 0..2 {
                            for q in 0..2 {
                                acc += v[(i * 2 + j, p * 2 + q)] * merged[(a * 2 + p, q * dr + g)];
                            }
                        }
                        theta[(a * 2 + i, j * dr + g)] = acc;
                    }
                }
            }
        }

        let lam_l: &[f64] = if k == 0 { &one } else { &self.lambdas[k - 1] };
        let lam_r: &[f64] = if k + 1 == n - 1 {
            &one
        } else {
            &self.lambdas[k + 1]
        };

        // Weighting by the boundary bond vectors turns the block into the
        // actual bipartite wavefunction across bond k.
        let mut m = theta.clone();
        for (a, &la) in lam_l.iter().enumerate() {
            for i in 0..2 {
                m.row_mut(a * 2 + i).mapv_inplace(|z| z * la);
            }
        }
        for (g, &lg) in lam_r.iter().enumerate() {
            for j in 0..2 {
                m.column_mut(j * dr + g).mapv_inplace(|z| z * lg);
            }
        }
        let dec = numerics::svd(&m)?;
        let rank = numerics::effective_rank(&dec.singulars, &self.policy)?.max(1);
        let keep = match self.chi_cap {
            Some(cap) => rank.min(cap.max(1)),
            None => rank,
        };
        let dropped: f64 = dec.singulars[keep..].iter().map(|x| x * x).sum();
        let kept_weight: f64 = dec.singulars[..keep].iter().map(|x| x * x).sum();
        self.discarded_weight += dropped;
        let scale = kept_weight.sqrt();
        let lam_new: Vec<f64> = dec.singulars[..keep].iter().map(|x| x / scale).collect();

        let guard_l = 10.0 * self.policy.rank_tol * lam_l.iter().cloned().fold(0.0, f64::max);
        let mut left_new = dec.left.slice(s![.., ..keep]).to_owned();
        let mut alt_left: Option<Array2<Complex64>> = None;
        for (a, &la) in lam_l.iter().enumerate() {
            if la >= guard_l {
                for i in 0..2 {
                    left_new.row_mut(a * 2 + i).mapv_inplace(|z| z / la);
                }
            } else {
                // Degenerate boundary weight: the same rows follow from
                // theta * lam_r * V / sigma with the division by la cancelled
                // analytically.
                let alt = alt_left.get_or_insert_with(|| {
                    let mut weighted = theta.clone();
                    for (g, &lg) in lam_r.iter().enumerate() {
                        for j in 0..2 {
                            weighted.column_mut(j * dr + g).mapv_inplace(|z| z * lg);
                        }
                    }
                    let vmat = adjoint(&dec.right_dag.slice(s![..keep, ..]));
                    let mut alt = weighted.dot(&vmat);
                    for (b, &sv) in dec.singulars[..keep].iter().enumerate() {
                        alt.column_mut(b).mapv_inplace(|z| z / sv);
                    }
                    alt
                });
                for i in 0..2 {
                    for b in 0..keep {
                        left_new[(a * 2 + i, b)] = alt[(a * 2 + i, b)];
                    }
                }
            }
        }

        let guard_r = 10.0 * self.policy.rank_tol * lam_r.iter().cloned().fold(0.0, f64::max);
        let mut right_new = dec.right_dag.slice(s![..keep, ..]).to_owned();
        let mut alt_right: Option<Array2<Complex64>> = None;
        for (g, &lg) in lam_r.iter().enumerate() {
            if lg >= guard_r {
                for j in 0..2 {
                    right_new.column_mut(j * dr + g).mapv_inplace(|z| z / lg);
                }
            } else {
                let alt = alt_right.get_or_insert_with(|| {
                    let mut weighted = theta.clone();
                    for (a, &la) in lam_l.iter().enumerate() {
                        for i in 0..2 {
                            weighted.row_mut(a * 2 + i).mapv_inplace(|z| z * la);
                        }
                    }
                    let umat = adjoint(&dec.left.slice(s![.., ..keep]));
                    let mut alt = umat.dot(&weighted);
                    for (b, &sv) in dec.singulars[..keep].iter().enumerate() {
                        alt.row_mut(b).mapv_inplace(|z| z / sv);
                    }
                    alt
                });
                for j in 0..2 {
                    for b in 0..keep {
                        right_new[(b, j * dr + g)] = alt[(b, j * dr + g)];
                    }
                }
            }
        }

        self.gammas[k] = left_new
            .into_shape_with_order((dl, 2, keep))
            .expect("left factor reshapes to a site tensor");
        self.lambdas[k] = lam_new;
        self.gammas[k + 1] = right_new
            .into_shape_with_order((keep, 2, dr))
            .expect("right factor reshapes to a site tensor");
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::DenseState;
    use crate::mps::MpsState;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn h_gate(target: usize) -> Gate1Q {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Gate1Q::new(
            ndarray::array![[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]],
            target,
        )
        .unwrap()
    }

    fn x_gate(target: usize) -> Gate1Q {
        Gate1Q::new(
            ndarray::array![[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
            target,
        )
        .unwrap()
    }

    fn cx_gate(t1: usize, t2: usize) -> Gate2Q {
        let mut m = ComplexMatrix::zeros((4, 4));
        m[(0, 0)] = c(1.0, 0.0);
        m[(1, 1)] = c(1.0, 0.0);
        m[(2, 3)] = c(1.0, 0.0);
        m[(3, 2)] = c(1.0, 0.0);
        Gate2Q::new(m, t1, t2).unwrap()
    }

    fn random_unitary(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
        // Modified Gram-Schmidt on a random complex matrix.
        let mut cols: Vec<Vec<Complex64>> = (0..dim)
            .map(|_| {
                (0..dim)
                    .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                    .collect()
            })
            .collect();
        for j in 0..dim {
            for i in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let (src, dst) = (&done[i], &mut rest[0]);
                let proj: Complex64 = src.iter().zip(dst.iter()).map(|(a, b)| a.conj() * b).sum();
                for (d, s) in dst.iter_mut().zip(src) {
                    *d -= proj * s;
                }
            }
            let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for z in &mut cols[j] {
                *z /= norm;
            }
        }
        ComplexMatrix::from_shape_fn((dim, dim), |(r, col)| cols[col][r])
    }

    fn random_state(n: usize, seed: u64) -> (MpsState, DenseState) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut amps: Vec<Complex64> = (0..1usize << n)
            .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|z| *z /= norm);
        let dense = DenseState::from_amplitudes(n, amps).unwrap();
        let mps = MpsState::from_dense(&dense, TolerancePolicy::default()).unwrap();
        (mps, dense)
    }

    fn max_diff(a: &DenseState, b: &DenseState) -> f64 {
        a.amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn x_flips_qubit() {
        let mut psi = MpsState::init_zero(1).unwrap();
        psi.apply_1q(&x_gate(0)).unwrap();
        let dense = psi.to_dense().unwrap();
        assert_eq!(dense.amplitude("1").unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn h_then_cx_builds_bell_pair() {
        let mut psi = MpsState::init_zero(2).unwrap();
        psi.apply_1q(&h_gate(0)).unwrap();
        psi.apply_2q_adjacent(&cx_gate(0, 1)).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let lam = psi.schmidt_at_cut(0).unwrap();
        assert_eq!(lam.len(), 2);
        assert!((lam[0] - s).abs() < 1e-14);
        assert!((lam[1] - s).abs() < 1e-14);
        let dense = psi.to_dense().unwrap();
        assert!((dense.amplitude("00").unwrap() - c(s, 0.0)).norm() < 1e-14);
        assert!((dense.amplitude("11").unwrap() - c(s, 0.0)).norm() < 1e-14);
        assert!(psi.validate_canonical().passed);
    }

    #[test]
    fn reversed_targets_swap_control_role() {
        // Control on qubit 1: |01> -> |11>.
        let mut psi = MpsState::init_zero(2).unwrap();
        psi.apply_1q(&x_gate(1)).unwrap();
        psi.apply_2q_adjacent(&cx_gate(1, 0)).unwrap();
        let dense = psi.to_dense().unwrap();
        assert!((dense.amplitude("11").unwrap() - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn distant_gate_routes_and_restores_order() {
        let mut psi = MpsState::init_zero(5).unwrap();
        psi.apply_1q(&x_gate(0)).unwrap();
        psi.apply_2q(&cx_gate(0, 4)).unwrap();
        let dense = psi.to_dense().unwrap();
        assert!((dense.amplitude("10001").unwrap() - c(1.0, 0.0)).norm() < 1e-13);
        assert!(psi.validate_canonical().passed);
        // The routed state is back to a product of the right qubits.
        assert_eq!(psi.chi(), 1);
    }

    #[test]
    fn routed_gate_matches_adjacent_and_dense() {
        for seed in 0..5 {
            let (mps, dense) = random_state(6, 300 + seed);
            let mut rng = ChaCha8Rng::seed_from_u64(900 + seed);
            let v = random_unitary(4, &mut rng);
            let gate = Gate2Q::new(v, 1, 4).unwrap();
            let mut via_mps = mps.clone();
            via_mps.apply_2q(&gate).unwrap();
            let mut via_dense = dense.clone();
            via_dense.apply_2q(&gate).unwrap();
            assert!(max_diff(&via_mps.to_dense().unwrap(), &via_dense) < 1e-10);
            assert!(via_mps.validate_canonical().max_deviation <= 1e-10);
        }
    }

    #[test]
    fn apply_2q_delegates_for_adjacent_targets() {
        let (mps, _) = random_state(4, 17);
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        let v = random_unitary(4, &mut rng);
        let mut a = mps.clone();
        let mut b = mps;
        a.apply_2q(&Gate2Q::new(v.clone(), 2, 3).unwrap()).unwrap();
        b.apply_2q_adjacent(&Gate2Q::new(v, 2, 3).unwrap()).unwrap();
        assert!(max_diff(&a.to_dense().unwrap(), &b.to_dense().unwrap()) < 1e-14);
    }

    #[test]
    fn one_qubit_update_is_strictly_local() {
        let (mps, _) = random_state(6, 55);
        let mut rng = ChaCha8Rng::seed_from_u64(56);
        let u = random_unitary(2, &mut rng);
        let target = 3;
        let mut after = mps.clone();
        after.apply_1q(&Gate1Q::new(u, target).unwrap()).unwrap();
        for site in 0..6 {
            if site != target {
                assert_eq!(mps.gamma(site), after.gamma(site), "site {site} changed");
            }
        }
        for bond in 0..5 {
            assert_eq!(mps.lambda(bond), after.lambda(bond), "bond {bond} changed");
        }
    }

    #[test]
    fn two_qubit_update_is_local_to_the_pair() {
        let (mps, _) = random_state(7, 58);
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        let v = random_unitary(4, &mut rng);
        let k = 3;
        let mut after = mps.clone();
        after
            .apply_2q_adjacent(&Gate2Q::new(v, k, k + 1).unwrap())
            .unwrap();
        for site in 0..7 {
            if site != k && site != k + 1 {
                assert_eq!(mps.gamma(site), after.gamma(site), "site {site} changed");
            }
        }
        for bond in 0..6 {
            if bond != k {
                assert_eq!(mps.lambda(bond), after.lambda(bond), "bond {bond} changed");
            }
        }
    }

    #[test]
    fn inverse_gate_restores_state() {
        let (mps, dense) = random_state(5, 61);
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        let v = random_unitary(4, &mut rng);
        let gate = Gate2Q::new(v, 1, 2).unwrap();
        let mut working = mps;
        working.apply_2q_adjacent(&gate).unwrap();
        working.apply_2q_adjacent(&gate.dagger()).unwrap();
        assert!(max_diff(&working.to_dense().unwrap(), &dense) < 1e-12);
    }

    #[test]
    fn degenerate_boundary_weight_stays_canonical() {
        // Nearly product across the first bond: the tiny Schmidt coefficient
        // sits inside the guard band, where direct division would wreck the
        // neighboring tensor.
        let eps = 5e-12f64;
        let mut amps = vec![c(0.0, 0.0); 8];
        amps[0b000] = c((1.0 - eps * eps).sqrt(), 0.0);
        amps[0b110] = c(eps, 0.0);
        let dense = DenseState::from_amplitudes(3, amps).unwrap();
        let mps = MpsState::from_dense(&dense, TolerancePolicy::default()).unwrap();
        assert_eq!(mps.lambda(0).len(), 2, "tiny coefficient must survive");
        let mut rng = ChaCha8Rng::seed_from_u64(63);
        let v = random_unitary(4, &mut rng);
        let gate = Gate2Q::new(v, 1, 2).unwrap();
        let mut via_mps = mps;
        via_mps.apply_2q_adjacent(&gate).unwrap();
        let mut via_dense = dense;
        via_dense.apply_2q(&gate).unwrap();
        assert!(max_diff(&via_mps.to_dense().unwrap(), &via_dense) < 1e-10);
        let report = via_mps.validate_canonical();
        assert!(
            report.max_deviation <= 1e-10,
            "guard failed: deviation {}",
            report.max_deviation
        );
    }

    #[test]
    fn truncate_bond_keeps_largest_terms() {
        let mut psi = MpsState::init_zero(2).unwrap();
        psi.apply_1q(&h_gate(0)).unwrap();
        psi.apply_2q_adjacent(&cx_gate(0, 1)).unwrap();
        let dropped = psi.truncate_bond(0, 1).unwrap();
        assert!((dropped - 0.5).abs() < 1e-14);
        assert_eq!(psi.chi(), 1);
        assert!((psi.discarded_weight() - 0.5).abs() < 1e-14);
        let dense = psi.to_dense().unwrap();
        assert!((dense.amplitude("00").unwrap().norm() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn truncate_bond_with_slack_is_identity() {
        let (mps, _) = random_state(4, 71);
        let mut after = mps.clone();
        let dropped = after.truncate_bond(1, 64).unwrap();
        assert_eq!(dropped, 0.0);
        for site in 0..4 {
            assert_eq!(mps.gamma(site), after.gamma(site));
        }
        for bond in 0..3 {
            assert_eq!(mps.lambda(bond), after.lambda(bond));
        }
    }

    #[test]
    fn chi_cap_truncates_during_application() {
        let (mut mps, _) = random_state(6, 81);
        mps.set_chi_cap(Some(2));
        let mut rng = ChaCha8Rng::seed_from_u64(82);
        let v = random_unitary(4, &mut rng);
        mps.apply_2q_adjacent(&Gate2Q::new(v, 2, 3).unwrap())
            .unwrap();
        assert!(mps.lambda(2).len() <= 2);
        assert!(mps.discarded_weight() > 0.0);
        let total: f64 = mps.lambda(2).iter().map(|x| x * x).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gate_constructors_reject_bad_input() {
        let not_unitary = ndarray::array![[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(2.0, 0.0)]];
        assert!(matches!(Gate1Q::new(not_unitary, 0), Err(Error::Gate(_))));
        assert!(matches!(
            Gate1Q::new(ComplexMatrix::zeros((3, 3)), 0),
            Err(Error::Shape(_))
        ));
        assert!(matches!(
            Gate2Q::new(swap_matrix(), 1, 1),
            Err(Error::Gate(_))
        ));
        let mut psi = MpsState::init_zero(2).unwrap();
        assert!(matches!(psi.apply_2q(&cx_gate(0, 3)), Err(Error::Index(_))));
        assert!(matches!(
            psi.apply_2q_adjacent(&cx_gate(0, 3)),
            Err(Error::Index(_))
        ));
        let mut wide = MpsState::init_zero(4).unwrap();
        assert!(matches!(
            wide.apply_2q_adjacent(&cx_gate(0, 2)),
            Err(Error::Gate(_))
        ));
    }

    #[test]
    fn truncate_bond_rejects_out_of_range() {
        let mut psi = MpsState::init_zero(3).unwrap();
        assert!(matches!(psi.truncate_bond(2, 1), Err(Error::Index(_))));
    }
}
