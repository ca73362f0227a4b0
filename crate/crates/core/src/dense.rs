//! Dense state-vector backend used as an independent oracle for the tensor
//! network code. Everything here works directly on the full 2^n amplitude
//! vector by bit manipulation, so it shares no algorithmic machinery with the
//! chain representation it cross-checks.
//!
//! Bit convention: qubit 0 is the most significant bit of the basis index, so
//! the amplitude of `|b_0 b_1 .. b_{n-1}>` lives at index
//! `b_0 * 2^{n-1} + .. + b_{n-1}`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gate::{Gate1Q, Gate2Q};
use crate::numerics::{self, ComplexMatrix, TolerancePolicy};

/// Largest qubit count accepted by dense-vector operations (2^14 amplitudes).
pub const DENSE_QUBIT_LIMIT: usize = 14;

/// Full state vector over `n` qubits, normalized on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    n: usize,
    amps: Vec<Complex64>,
}

impl DenseState {
    /// The all-zeros computational basis state.
    pub fn zero(n: usize) -> Result<Self> {
        Self::check_capacity(n)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    /// Wraps an amplitude vector, requiring unit norm within the default
    /// canonical tolerance.
    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        Self::from_amplitudes_with_tol(n, amps, TolerancePolicy::default().canonical_tol)
    }

    /// Like [`DenseState::from_amplitudes`] with an explicit norm tolerance.
    pub fn from_amplitudes_with_tol(n: usize, amps: Vec<Complex64>, tol: f64) -> Result<Self> {
        Self::check_capacity(n)?;
        if amps.len() != 1 << n {
            return Err(Error::Shape(format!(
                "expected {} amplitudes for {n} qubits, got {}",
                1usize << n,
                amps.len()
            )));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NumericInput);
        }
        let state = Self { n, amps };
        let norm = state.norm();
        if (norm - 1.0).abs() > tol {
            return Err(Error::Normalization(format!(
                "state norm is {norm}, expected 1"
            )));
        }
        Ok(state)
    }

    fn check_capacity(n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::Domain("state needs at least one qubit".into()));
        }
        if n > DENSE_QUBIT_LIMIT {
            return Err(Error::Capacity(format!(
                "{n} qubits exceeds the dense limit of {DENSE_QUBIT_LIMIT}"
            )));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|z| z.norm_sqr()).collect()
    }

    /// Amplitude of one computational basis state given as a bitstring in
    /// qubit order, e.g. `"010"`.
    pub fn amplitude(&self, bits: &str) -> Result<Complex64> {
        Ok(self.amps[self.bit_index(bits)?])
    }

    fn bit_index(&self, bits: &str) -> Result<usize> {
        if bits.len() != self.n {
            return Err(Error::Domain(format!(
                "bitstring length {} does not match {} qubits",
                bits.len(),
                self.n
            )));
        }
        let mut index = 0usize;
        for ch in bits.chars() {
            index = index << 1
                | match ch {
                    '0' => 0,
                    '1' => 1,
                    other => {
                        return Err(Error::Domain(format!(
                            "bitstring may only contain 0 and 1, found {other:?}"
                        )))
                    }
                };
        }
        Ok(index)
    }

    /// Applies a single-qubit gate by direct index arithmetic.
    pub fn apply_1q(&mut self, gate: &Gate1Q) -> Result<()> {
        let target = gate.target();
        if target >= self.n {
            return Err(Error::Index(format!(
                "qubit {target} out of range for {} qubits",
                self.n
            )));
        }
        let u = gate.matrix();
        let stride = 1usize << (self.n - 1 - target);
        let mut base = 0usize;
        while base < self.amps.len() {
            for offset in base..base + stride {
                let a0 = self.amps[offset];
                let a1 = self.amps[offset + stride];
                self.amps[offset] = u[(0, 0)] * a0 + u[(0, 1)] * a1;
                self.amps[offset + stride] = u[(1, 0)] * a0 + u[(1, 1)] * a1;
            }
            base += stride << 1;
        }
        Ok(())
    }

    /// Applies a two-qubit gate. The first target supplies the high bit of the
    /// gate-matrix index, the second the low bit; the targets need not be
    /// adjacent or ordered.
    pub fn apply_2q(&mut self, gate: &Gate2Q) -> Result<()> {
        let (t1, t2) = gate.targets();
        for t in [t1, t2] {
            if t >= self.n {
                return Err(Error::Index(format!(
                    "qubit {t} out of range for {} qubits",
                    self.n
                )));
            }
        }
        let v = gate.matrix();
        let s1 = 1usize << (self.n - 1 - t1);
        let s2 = 1usize << (self.n - 1 - t2);
        for index in 0..self.amps.len() {
            // Visit each 4-amplitude block once, from its (00) member.
            if index & s1 != 0 || index & s2 != 0 {
                continue;
            }
            let idx = [index, index | s2, index | s1, index | s1 | s2];
            let old = idx.map(|i| self.amps[i]);
            for (row, &i) in idx.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (col, &a) in old.iter().enumerate() {
                    acc += v[(row, col)] * a;
                }
                self.amps[i] = acc;
            }
        }
        Ok(())
    }

    /// Schmidt coefficients across the cut between qubits `cut` and `cut + 1`,
    /// in descending order with zeros (relative to `rank_tol`) removed.
    ///
    /// Computed by reshaping the amplitude vector into a 2^{cut+1} by
    /// 2^{n-cut-1} matrix and taking its singular values, independently of the
    /// chain representation.
    pub fn schmidt_at_cut(&self, cut: usize, policy: &TolerancePolicy) -> Result<Vec<f64>> {
        if self.n < 2 || cut >= self.n - 1 {
            return Err(Error::Index(format!(
                "cut {cut} out of range for {} qubits",
                self.n
            )));
        }
        let rows = 1usize << (cut + 1);
        let cols = 1usize << (self.n - 1 - cut);
        let m = ComplexMatrix::from_shape_fn((rows, cols), |(i, j)| self.amps[i * cols + j]);
        let dec = numerics::svd(&m)?;
        let rank = numerics::effective_rank(&dec.singulars, policy)?.max(1);
        Ok(dec.singulars[..rank].to_vec())
    }
}
