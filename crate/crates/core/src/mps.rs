//! Canonical tensor-chain representation of an n-qubit pure state.
//!
//! The state is stored as alternating site tensors and bond vectors,
//!
//! ```text
//! G[0] -- lambda[0] -- G[1] -- lambda[1] -- .. -- G[n-1]
//! ```
//!
//! where `G[k]` has shape `(chi_{k-1}, 2, chi_k)` (boundary bond dimensions
//! are 1) and `lambda[k]` holds the Schmidt coefficients of the bipartition
//! between qubits `k` and `k+1`: strictly positive, descending, squares
//! summing to one. The amplitude of a basis state is the chain product
//!
//! ```text
//! <i_0 .. i_{n-1}|psi> = G[0]^{i_0} diag(lambda[0]) G[1]^{i_1} .. G[n-1]^{i_{n-1}}
//! ```
//!
//! This gauge is doubly canonical: for every site, contracting the site
//! tensor with its left bond vector gives an isometry from the left, and
//! contracting with its right bond vector gives an isometry from the right.
//! Both conditions are what [`MpsState::validate_canonical`] measures, and
//! they are what makes every `lambda[k]` an exact Schmidt spectrum rather
//! than a gauge artifact.
//!
//! Storage is `sum_k chi_{k-1} * 2 * chi_k + sum_k chi_k` scalars, at most
//! `(2 chi^2 + chi) n` for maximum bond dimension chi.

use ndarray::{s, Array2, Array3, ArrayView2, Order};
use num_complex::Complex64;

use crate::dense::{DenseState, DENSE_QUBIT_LIMIT};
use crate::error::{Error, Result};
use crate::numerics::{self, TolerancePolicy};

/// Site tensor with axes (left bond, physical, right bond).
pub type GammaTensor = Array3<Complex64>;

/// Schmidt coefficients across one bond, descending, squares summing to 1.
pub type LambdaVector = Vec<f64>;

/// Per-site canonical-form deviations produced by
/// [`MpsState::validate_canonical`].
#[derive(Clone, Debug)]
pub struct CanonicalReport {
    /// Worst deviation from the left and right isometry conditions at each site.
    pub site_deviations: Vec<f64>,
    /// Maximum over all sites.
    pub max_deviation: f64,
    /// Whether `max_deviation` is within the policy's canonical tolerance.
    pub passed: bool,
}

/// Pure n-qubit state in canonical chain form.
#[derive(Clone, Debug)]
pub struct MpsState {
    pub(crate) gammas: Vec<GammaTensor>,
    pub(crate) lambdas: Vec<LambdaVector>,
    pub(crate) policy: TolerancePolicy,
    pub(crate) chi_cap: Option<usize>,
    pub(crate) discarded_weight: f64,
}

impl MpsState {
    /// The all-zeros computational basis state on `n` qubits.
    pub fn init_zero(n: usize) -> Result<Self> {
        Self::init_zero_with_policy(n, TolerancePolicy::default())
    }

    /// Like [`MpsState::init_zero`] with an explicit tolerance policy.
    pub fn init_zero_with_policy(n: usize, policy: TolerancePolicy) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("state needs at least one qubit".into()));
        }
        let gammas = (0..n)
            .map(|_| {
                let mut g = GammaTensor::zeros((1, 2, 1));
                g[(0, 0, 0)] = Complex64::new(1.0, 0.0);
                g
            })
            .collect();
        let lambdas = vec![vec![1.0]; n - 1];
        Ok(Self {
            gammas,
            lambdas,
            policy,
            chi_cap: None,
            discarded_weight: 0.0,
        })
    }

    /// Number of qubits.
    pub fn n(&self) -> usize {
        self.gammas.len()
    }

    pub fn policy(&self) -> &TolerancePolicy {
        &self.policy
    }

    /// Caps the bond dimension of every subsequent two-qubit update; `None`
    /// disables truncation. A cap of 0 is treated as 1.
    pub fn set_chi_cap(&mut self, cap: Option<usize>) {
        self.chi_cap = cap;
    }

    pub fn chi_cap(&self) -> Option<usize> {
        self.chi_cap
    }

    /// Total squared Schmidt weight discarded by truncation so far.
    pub fn discarded_weight(&self) -> f64 {
        self.discarded_weight
    }

    /// Site tensor at `site`. Panics if out of range.
    pub fn gamma(&self, site: usize) -> &GammaTensor {
        &self.gammas[site]
    }

    /// Schmidt coefficients across bond `bond` (between qubits `bond` and
    /// `bond + 1`). Panics if out of range.
    pub fn lambda(&self, bond: usize) -> &[f64] {
        &self.lambdas[bond]
    }

    /// Bond dimensions, one per internal bond.
    pub fn bond_dims(&self) -> Vec<usize> {
        self.lambdas.iter().map(|l| l.len()).collect()
    }

    /// Maximum bond dimension over all cuts (1 for a single qubit).
    pub fn chi(&self) -> usize {
        self.lambdas.iter().map(|l| l.len()).max().unwrap_or(1)
    }

    /// Entanglement measure `log2(chi)`; 0 exactly for product states.
    pub fn e_chi(&self) -> f64 {
        (self.chi() as f64).log2()
    }

    /// Number of stored scalars: all site-tensor entries plus all bond
    /// coefficients.
    pub fn storage_count(&self) -> usize {
        let gamma_total: usize = self.gammas.iter().map(|g| g.len()).sum();
        let lambda_total: usize = self.lambdas.iter().map(|l| l.len()).sum();
        gamma_total + lambda_total
    }

    /// Schmidt coefficients of the bipartition between qubits `cut` and
    /// `cut + 1`, available without any computation.
    pub fn schmidt_at_cut(&self, cut: usize) -> Result<Vec<f64>> {
        if self.n() < 2 || cut >= self.n() - 1 {
            return Err(Error::Index(format!(
                "cut {cut} out of range for {} qubits",
                self.n()
            )));
        }
        Ok(self.lambdas[cut].clone())
    }

    /// Builds the chain form of a dense state by splitting off one qubit at a
    /// time with a singular value decomposition. Cost is exponential in `n` by
    /// nature of the input; the result is canonical by construction.
    pub fn from_dense(psi: &DenseState, policy: TolerancePolicy) -> Result<Self> {
        let n = psi.n();
        let norm = psi.norm();
        if (norm - 1.0).abs() > policy.canonical_tol {
            return Err(Error::Normalization(format!(
                "state norm is {norm}, expected 1"
            )));
        }
        let amps: Vec<Complex64> = psi.amplitudes().iter().map(|z| z / norm).collect();
        let mut rest =
            Array2::from_shape_vec((1, 1 << n), amps).expect("amplitude count matches 2^n");
        let mut gammas: Vec<GammaTensor> = Vec::with_capacity(n);
        let mut lambdas: Vec<LambdaVector> = Vec::with_capacity(n.saturating_sub(1));
        for k in 0..n.saturating_sub(1) {
            let chi_prev = rest.nrows();
            let width = rest.ncols();
            let m = rest
                .into_shape_with_order((chi_prev * 2, width / 2))
                .expect("row split preserves element count");
            let dec = numerics::svd(&m)?;
            let rank = numerics::effective_rank(&dec.singulars, &policy)?.max(1);
            // Site tensor: kept left singular vectors, rows divided by the
            // previous bond vector to restore the chain gauge.
            let mut gamma = dec
                .left
                .slice(s![.., ..rank])
                .to_owned()
                .into_shape_with_order((chi_prev, 2, rank))
                .expect("left factor reshapes to a site tensor");
            if k > 0 {
                let prev = &lambdas[k - 1];
                for (a, &lp) in prev.iter().enumerate() {
                    gamma.slice_mut(s![a, .., ..]).mapv_inplace(|z| z / lp);
                }
            }
            gammas.push(gamma);
            let mut lam: LambdaVector = dec.singulars[..rank].to_vec();
            let lam_norm = lam.iter().map(|x| x * x).sum::<f64>().sqrt();
            lam.iter_mut().for_each(|x| *x /= lam_norm);
            lambdas.push(lam);
            // Remainder carried to the next split keeps the raw singular
            // values so the chain contraction telescopes exactly.
            let mut next = dec.right_dag.slice(s![..rank, ..]).to_owned();
            for (b, &sv) in dec.singulars[..rank].iter().enumerate() {
                next.row_mut(b).mapv_inplace(|z| z * sv);
            }
            rest = next;
        }
        let chi_last = rest.nrows();
        let mut last = rest
            .into_shape_with_order((chi_last, 2, 1))
            .expect("remainder reshapes to the final site tensor");
        if n > 1 {
            let prev = &lambdas[n - 2];
            for (a, &lp) in prev.iter().enumerate() {
                last.slice_mut(s![a, .., ..]).mapv_inplace(|z| z / lp);
            }
        }
        gammas.push(last);
        Ok(Self {
            gammas,
            lambdas,
            policy,
            chi_cap: None,
            discarded_weight: 0.0,
        })
    }

    /// Contracts the chain into a full amplitude vector. Refuses more than
    /// [`DENSE_QUBIT_LIMIT`] qubits.
    pub fn to_dense(&self) -> Result<DenseState> {
        self.to_dense_with_limit(DENSE_QUBIT_LIMIT)
    }

    /// Like [`MpsState::to_dense`] with an explicit qubit limit.
    pub fn to_dense_with_limit(&self, limit: usize) -> Result<DenseState> {
        let n = self.n();
        if n > limit || n > DENSE_QUBIT_LIMIT {
            return Err(Error::Capacity(format!(
                "{n} qubits exceeds the dense limit of {}",
                limit.min(DENSE_QUBIT_LIMIT)
            )));
        }
        let mut acc = Array2::from_elem((1, 1), Complex64::new(1.0, 0.0));
        for k in 0..n {
            let g = &self.gammas[k];
            let (dl, _, dr) = g.dim();
            let gm = g
                .to_shape(((dl, 2 * dr), Order::RowMajor))
                .expect("site tensor flattens by fusing physical and right axes");
            let next = acc.dot(&gm);
            let mut next = next
                .into_shape_with_order((acc.nrows() * 2, dr))
                .expect("prefix absorbs the physical index");
            if k < n - 1 {
                for (b, &lv) in self.lambdas[k].iter().enumerate() {
                    next.column_mut(b).mapv_inplace(|z| z * lv);
                }
            }
            acc = next;
        }
        let amps: Vec<Complex64> = acc.into_iter().collect();
        DenseState::from_amplitudes_with_tol(n, amps, self.policy.canonical_tol)
    }

    /// Squared norm of the represented state via a transfer-matrix
    /// contraction; 1 for any state the crate's operations produce.
    pub fn global_norm(&self) -> f64 {
        let n = self.n();
        let mut env = Array2::from_elem((1, 1), Complex64::new(1.0, 0.0));
        for k in 0..n {
            let g = &self.gammas[k];
            let (dl, _, dr) = g.dim();
            let mut next = Array2::<Complex64>::zeros((dr, dr));
            for i in 0..2 {
                let gi = g.slice(s![.., i, ..]);
                let tmp = env.dot(&gi);
                next = next + adjoint(&gi).dot(&tmp);
            }
            if k < n - 1 {
                let lam = &self.lambdas[k];
                for (a, &la) in lam.iter().enumerate() {
                    for (b, &lb) in lam.iter().enumerate() {
                        next[(a, b)] *= la * lb;
                    }
                }
            }
            let _ = dl;
            env = next;
        }
        env[(0, 0)].re
    }

    /// Measures how far each site is from the two isometry conditions that
    /// define the canonical gauge.
    pub fn validate_canonical(&self) -> CanonicalReport {
        let n = self.n();
        let one = [1.0f64];
        let mut site_deviations = Vec::with_capacity(n);
        for k in 0..n {
            let g = &self.gammas[k];
            let (dl, _, dr) = g.dim();
            let lam_l: &[f64] = if k == 0 { &one } else { &self.lambdas[k - 1] };
            let lam_r: &[f64] = if k == n - 1 { &one } else { &self.lambdas[k] };
            // Left condition: sum_i (L G^i)^dag (L G^i) = I over the right bond.
            let mut left_sum = Array2::<Complex64>::zeros((dr, dr));
            // Right condition: sum_i (G^i R) (G^i R)^dag = I over the left bond.
            let mut right_sum = Array2::<Complex64>::zeros((dl, dl));
            for i in 0..2 {
                let gi = g.slice(s![.., i, ..]);
                let mut weighted_l = gi.to_owned();
                for (a, &la) in lam_l.iter().enumerate() {
                    weighted_l.row_mut(a).mapv_inplace(|z| z * la);
                }
                left_sum = left_sum + adjoint(&weighted_l.view()).dot(&weighted_l);
                let mut weighted_r = gi.to_owned();
                for (b, &lb) in lam_r.iter().enumerate() {
                    weighted_r.column_mut(b).mapv_inplace(|z| z * lb);
                }
                right_sum = right_sum + weighted_r.dot(&adjoint(&weighted_r.view()));
            }
            let mut dev = 0.0f64;
            for a in 0..dr {
                for b in 0..dr {
                    let expect = if a == b { 1.0 } else { 0.0 };
                    dev = dev.max((left_sum[(a, b)] - expect).norm());
                }
            }
            for a in 0..dl {
                for b in 0..dl {
                    let expect = if a == b { 1.0 } else { 0.0 };
                    dev = dev.max((right_sum[(a, b)] - expect).norm());
                }
            }
            site_deviations.push(dev);
        }
        let max_deviation = site_deviations.iter().cloned().fold(0.0, f64::max);
        CanonicalReport {
            site_deviations,
            max_deviation,
            passed: max_deviation <= self.policy.canonical_tol,
        }
    }
}

pub(crate) fn adjoint(m: &ArrayView2<Complex64>) -> Array2<Complex64> {
    m.t().mapv(|z| z.conj())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::DenseState;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_dense(n: usize, seed: u64) -> DenseState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut amps: Vec<Complex64> = (0..1usize << n)
            .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|z| *z /= norm);
        DenseState::from_amplitudes(n, amps).unwrap()
    }

    fn ghz_dense(n: usize) -> DenseState {
        let mut amps = vec![c(0.0, 0.0); 1 << n];
        let s = std::f64::consts::FRAC_1_SQRT_2;
        amps[0] = c(s, 0.0);
        amps[(1 << n) - 1] = c(s, 0.0);
        DenseState::from_amplitudes(n, amps).unwrap()
    }

    fn max_amp_diff(a: &DenseState, b: &DenseState) -> f64 {
        a.amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn init_zero_is_product_state() {
        let psi = MpsState::init_zero(5).unwrap();
        assert_eq!(psi.n(), 5);
        assert_eq!(psi.chi(), 1);
        assert_eq!(psi.e_chi(), 0.0);
        assert_eq!(psi.bond_dims(), vec![1, 1, 1, 1]);
        let dense = psi.to_dense().unwrap();
        assert_eq!(dense.amplitudes()[0], c(1.0, 0.0));
        assert!(dense.amplitudes()[1..].iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn init_zero_rejects_empty() {
        assert!(matches!(MpsState::init_zero(0), Err(Error::Domain(_))));
    }

    #[test]
    fn single_qubit_round_trip() {
        let psi = random_dense(1, 3);
        let mps = MpsState::from_dense(&psi, TolerancePolicy::default()).unwrap();
        assert_eq!(mps.n(), 1);
        assert_eq!(mps.chi(), 1);
        assert!(max_amp_diff(&mps.to_dense().unwrap(), &psi) < 1e-14);
    }

    #[test]
    fn bell_state_spectrum_and_rank() {
        let psi = ghz_dense(2);
        let mps = MpsState::from_dense(&psi, TolerancePolicy::default()).unwrap();
        let lam = mps.schmidt_at_cut(0).unwrap();
        assert_eq!(lam.len(), 2);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((lam[0] - s).abs() < 1e-14);
        assert!((lam[1] - s).abs() < 1e-14);
        assert_eq!(mps.chi(), 2);
        assert!((mps.e_chi() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ghz_round_trip_and_all_cuts() {
        let psi = ghz_dense(6);
        let mps = MpsState::from_dense(&psi, TolerancePolicy::default()).unwrap();
        assert!(max_amp_diff(&mps.to_dense().unwrap(), &psi) < 1e-12);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for cut in 0..5 {
            let lam = mps.schmidt_at_cut(cut).unwrap();
            assert_eq!(lam.len(), 2, "cut {cut}");
            assert!((lam[0] - s).abs() < 1e-13);
            assert!((lam[1] - s).abs() < 1e-13);
        }
    }

    #[test]
    fn w_state_spectrum_matches_reduced_density_eigenvalues() {
        let s3 = 1.0 / 3f64.sqrt();
        let mut amps = vec![c(0.0, 0.0); 8];
        amps[0b100] = c(s3, 0.0);
        amps[0b010] = c(s3, 0.0);
        amps[0b001] = c(s3, 0.0);
        let psi = DenseState::from_amplitudes(3, amps).unwrap();
        let mps = MpsState::from_dense(&psi, TolerancePolicy::default()).unwrap();
        let lam = mps.schmidt_at_cut(0).unwrap();
        assert!((lam[0] - (2f64 / 3.0).sqrt()).abs() < 1e-13);
        assert!((lam[1] - (1f64 / 3.0).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn random_round_trip_is_tight() {
        for n in 1..=8 {
            let psi = random_dense(n, 100 + n as u64);
            let mps = MpsState::from_dense(&psi, TolerancePolicy::default()).unwrap();
            let back = mps.to_dense().unwrap();
            assert!(
                max_amp_diff(&back, &psi) < 1e-12,
                "round trip too loose at n = {n}"
            );
        }
    }

    #[test]
    fn lambda_invariants_hold_after_from_dense() {
        let psi = random_dense(7, 42);
        let mps = MpsState::from_dense(&psi, TolerancePolicy::default()).unwrap();
        for bond in 0..6 {
            let lam = mps.lambda(bond);
            assert!(lam.iter().all(|&x| x > 0.0));
            assert!(lam.windows(2).all(|w| w[0] >= w[1]));
            let total: f64 = lam.iter().map(|x| x * x).sum();
            assert!((total - 1.0).abs() < 1e-12, "bond {bond} weight {total}");
        }
    }

    #[test]
    fn from_dense_rejects_unnormalized() {
        // Norm is sqrt(0.75); the loose construction tolerance lets the dense
        // state through so the conversion has to do its own check.
        let amps = vec![c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.0, 0.0)];
        let psi = DenseState::from_amplitudes_with_tol(2, amps, 1.0).unwrap();
        assert!(matches!(
            MpsState::from_dense(&psi, TolerancePolicy::default()),
            Err(Error::Normalization(_))
        ));
    }

    #[test]
    fn storage_counts() {
        // Product state: n site tensors of 2 entries, n-1 unit bonds.
        let psi = MpsState::init_zero(5).unwrap();
        assert_eq!(psi.storage_count(), 5 * 2 + 4);
        // GHZ on 4 qubits: tensors 1x2x2, 2x2x2, 2x2x2, 2x2x1 plus bonds 2+2+2.
        let ghz = MpsState::from_dense(&ghz_dense(4), TolerancePolicy::default()).unwrap();
        assert_eq!(ghz.storage_count(), 30);
        // General bound for chain length n and max bond chi.
        let psi = random_dense(6, 9);
        let mps = MpsState::from_dense(&psi, TolerancePolicy::default()).unwrap();
        let chi = mps.chi();
        assert!(mps.storage_count() <= (2 * chi * chi + chi) * 6);
    }

    #[test]
    fn canonical_validation_passes_for_constructed_states() {
        let zero = MpsState::init_zero(4).unwrap();
        let report = zero.validate_canonical();
        assert!(report.passed);
        assert!(report.max_deviation < 1e-15);
        for n in 2..=8 {
            let mps =
                MpsState::from_dense(&random_dense(n, 200 + n as u64), TolerancePolicy::default())
                    .unwrap();
            let report = mps.validate_canonical();
            assert_eq!(report.site_deviations.len(), n);
            assert!(report.passed, "n = {n}: {}", report.max_deviation);
            assert!(report.max_deviation <= 1e-10);
        }
    }

    #[test]
    fn canonical_validation_flags_corruption() {
        let mut mps =
            MpsState::from_dense(&random_dense(5, 77), TolerancePolicy::default()).unwrap();
        mps.gammas[2][(0, 0, 0)] += c(0.1, 0.0);
        let report = mps.validate_canonical();
        assert!(!report.passed);
        assert!(report.site_deviations[2] > 1e-3);
    }

    #[test]
    fn global_norm_scales_with_lambda() {
        let mut mps = MpsState::from_dense(&ghz_dense(4), TolerancePolicy::default()).unwrap();
        assert!((mps.global_norm() - 1.0).abs() < 1e-12);
        // Doubling one bond vector scales the squared norm by 4.
        mps.lambdas[1].iter_mut().for_each(|x| *x *= 2.0);
        assert!((mps.global_norm() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn schmidt_at_cut_rejects_out_of_range() {
        let mps = MpsState::init_zero(3).unwrap();
        assert!(mps.schmidt_at_cut(1).is_ok());
        assert!(matches!(mps.schmidt_at_cut(2), Err(Error::Index(_))));
        let single = MpsState::init_zero(1).unwrap();
        assert!(matches!(single.schmidt_at_cut(0), Err(Error::Index(_))));
    }

    #[test]
    fn to_dense_respects_limit() {
        let mps = MpsState::init_zero(5).unwrap();
        assert!(matches!(
            mps.to_dense_with_limit(4),
            Err(Error::Capacity(_))
        ));
        assert!(mps.to_dense_with_limit(5).is_ok());
    }
}
