//! Expectation values, amplitudes, and measurement sampling on the chain
//! representation. None of these mutate the state.

use std::collections::BTreeMap;

use ndarray::{s, Array1, Array2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mps::{adjoint, MpsState};
use crate::numerics::ComplexMatrix;

/// Hermiticity tolerance for observable factors.
const HERMITIAN_TOL: f64 = 1e-10;

/// Imaginary residue above which an expectation value is reported as a
/// numeric inconsistency.
const IMAG_WARN_TOL: f64 = 1e-8;

/// Tensor product of one single-site Hermitian factor per qubit.
#[derive(Clone, Debug)]
pub struct ProductObservable {
    factors: Vec<ComplexMatrix>,
}

impl ProductObservable {
    /// Validates that every factor is a 2x2 Hermitian matrix.
    pub fn new(factors: Vec<ComplexMatrix>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Domain("observable needs at least one factor".into()));
        }
        for (k, m) in factors.iter().enumerate() {
            if m.dim() != (2, 2) {
                return Err(Error::Shape(format!(
                    "factor {k} must be 2x2, got {}x{}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NumericInput);
            }
            let mut dev = 0.0f64;
            for i in 0..2 {
                for j in 0..2 {
                    dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
                }
            }
            if dev > HERMITIAN_TOL {
                return Err(Error::Observable(format!(
                    "factor {k} is not Hermitian (deviation {dev:.3e})"
                )));
            }
        }
        Ok(Self { factors })
    }

    /// Builds an observable from a Pauli string such as `"ZZIX"`,
    /// case-insensitive, one character per qubit.
    pub fn from_pauli_str(paulis: &str) -> Result<Self> {
        let factors: Vec<ComplexMatrix> =
            paulis.chars().map(pauli_matrix).collect::<Result<_>>()?;
        Self::new(factors)
    }

    pub fn factors(&self) -> &[ComplexMatrix] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
}

/// The 2x2 matrix of one Pauli operator (`I`, `X`, `Y`, or `Z`).
pub fn pauli_matrix(name: char) -> Result<ComplexMatrix> {
    let c = Complex64::new;
    let m = match name.to_ascii_uppercase() {
        'I' => ndarray::array![[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]],
        'X' => ndarray::array![[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
        'Y' => ndarray::array![[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]],
        'Z' => ndarray::array![[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]],
        other => {
            return Err(Error::Observable(format!(
                "unknown Pauli operator {other:?}"
            )))
        }
    };
    Ok(m)
}

/// Measurement counts from [`MpsState::sample`].
#[derive(Clone, Debug)]
pub struct SampleResult {
    /// Outcome bitstring (qubit order) to occurrence count.
    pub counts: BTreeMap<String, u64>,
    pub shots: u64,
    pub seed: u64,
    /// Name of the pseudo-random generator driving the draws.
    pub algorithm: &'static str,
}

impl MpsState {
    /// Expectation value of a product observable with one factor per qubit.
    ///
    /// A single left-to-right transfer contraction, cost `O(n chi^3)`. The
    /// result of a Hermitian observable is real; any imaginary residue beyond
    /// 1e-8 is logged as a warning and dropped.
    pub fn expect_product(&self, observable: &ProductObservable) -> Result<f64> {
        let n = self.n();
        if observable.len() != n {
            return Err(Error::Shape(format!(
                "observable has {} factors for {n} qubits",
                observable.len()
            )));
        }
        let mut env = Array2::from_elem((1, 1), Complex64::new(1.0, 0.0));
        for k in 0..n {
            let g = &self.gammas[k];
            let (_, _, dr) = g.dim();
            let o = &observable.factors()[k];
            let mut next = Array2::<Complex64>::zeros((dr, dr));
            for ip in 0..2 {
                for i in 0..2 {
                    if o[(ip, i)].norm_sqr() == 0.0 {
                        continue;
                    }
                    let bra = g.slice(s![.., ip, ..]);
                    let ket = g.slice(s![.., i, ..]);
                    let tmp = env.dot(&ket);
                    next = next + adjoint(&bra).dot(&tmp).mapv(|z| z * o[(ip, i)]);
                }
            }
            if k < n - 1 {
                let lam = &self.lambdas[k];
                for (a, &la) in lam.iter().enumerate() {
                    for (b, &lb) in lam.iter().enumerate() {
                        next[(a, b)] *= la * lb;
                    }
                }
            }
            env = next;
        }
        let value = env[(0, 0)];
        if value.im.abs() > IMAG_WARN_TOL {
            log::warn!(
                "expectation value has imaginary residue {:.3e}; check the observable",
                value.im
            );
        }
        Ok(value.re)
    }

    /// Amplitude of one computational basis state given as a bitstring in
    /// qubit order. Cost `O(n chi^2)`.
    pub fn amplitude(&self, bits: &str) -> Result<Complex64> {
        let n = self.n();
        if bits.len() != n {
            return Err(Error::Domain(format!(
                "bitstring length {} does not match {n} qubits",
                bits.len()
            )));
        }
        let mut v = Array1::from_elem(1, Complex64::new(1.0, 0.0));
        for (k, ch) in bits.chars().enumerate() {
            let bit = match ch {
                '0' => 0usize,
                '1' => 1,
                other => {
                    return Err(Error::Domain(format!(
                        "bitstring may only contain 0 and 1, found {other:?}"
                    )))
                }
            };
            let slice = self.gammas[k].slice(s![.., bit, ..]);
            let mut w = v.dot(&slice);
            if k < n - 1 {
                for (b, &lb) in self.lambdas[k].iter().enumerate() {
                    w[b] *= lb;
                }
            }
            v = w;
        }
        Ok(v[0])
    }

    /// Draws `shots` computational-basis measurements by walking the chain
    /// once per shot, conditioning on each qubit in turn. The canonical gauge
    /// makes the marginal probabilities available from the visited prefix
    /// alone, so each shot costs `O(n chi^2)`.
    ///
    /// Sampling is deterministic in `seed`.
    pub fn sample(&self, shots: u64, seed: u64) -> SampleResult {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        let n = self.n();
        for _ in 0..shots {
            let mut v = Array1::from_elem(1, Complex64::new(1.0, 0.0));
            let mut bits = String::with_capacity(n);
            for k in 0..n {
                if k > 0 {
                    for (a, &la) in self.lambdas[k - 1].iter().enumerate() {
                        v[a] *= la;
                    }
                }
                let w0 = v.dot(&self.gammas[k].slice(s![.., 0, ..]));
                let w1 = v.dot(&self.gammas[k].slice(s![.., 1, ..]));
                let weight = |w: &Array1<Complex64>| -> f64 {
                    if k < n - 1 {
                        w.iter()
                            .zip(self.lambdas[k].iter())
                            .map(|(z, l)| z.norm_sqr() * l * l)
                            .sum()
                    } else {
                        w.iter().map(|z| z.norm_sqr()).sum()
                    }
                };
                let p0 = weight(&w0);
                let p1 = weight(&w1);
                let draw = rng.random::<f64>() * (p0 + p1);
                if draw < p0 {
                    bits.push('0');
                    v = w0;
                } else {
                    bits.push('1');
                    v = w1;
                }
            }
            *counts.entry(bits).or_insert(0) += 1;
        }
        SampleResult {
            counts,
            shots,
            seed,
            algorithm: "chacha8",
        }
    }
}
