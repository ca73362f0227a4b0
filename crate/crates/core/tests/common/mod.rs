//! Helpers shared by the integration suites. Everything here is independent
//! of the MPS engine internals so cross-checks stay meaningful.
#![allow(dead_code)]

use mpsim::{Circuit, Complex64, ComplexMatrix, DenseState, GateKind, MpsState, ProductObservable};
use ndarray::Array2;
use rand::prelude::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Haar-ish random unitary built by Gram-Schmidt on a random complex matrix.
/// Orthonormality is re-checked to 1e-12 so downstream unitarity validation
/// never trips on construction noise.
pub fn random_unitary(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    loop {
        let mut cols: Vec<Vec<Complex64>> = (0..dim)
            .map(|_| {
                (0..dim)
                    .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                    .collect()
            })
            .collect();
        let mut ok = true;
        for i in 0..dim {
            // Two orthogonalization passes keep the residual at rounding level.
            for _ in 0..2 {
                for j in 0..i {
                    let (done, rest) = cols.split_at_mut(i);
                    let (src, dst) = (&done[j], &mut rest[0]);
                    let proj: Complex64 =
                        src.iter().zip(dst.iter()).map(|(a, b)| a.conj() * b).sum();
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d -= proj * s;
                    }
                }
            }
            let norm: f64 = cols[i].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-6 {
                ok = false;
                break;
            }
            for z in &mut cols[i] {
                *z /= norm;
            }
        }
        if ok {
            return Array2::from_shape_fn((dim, dim), |(r, col)| cols[col][r]);
        }
    }
}

/// Random normalized dense state on `n` qubits.
pub fn random_dense_state(n: usize, rng: &mut ChaCha8Rng) -> DenseState {
    let dim = 1usize << n;
    let mut amps: Vec<Complex64> = (0..dim)
        .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    DenseState::from_amplitudes(n, amps).unwrap()
}

/// Random circuit drawn from {h, t, rz, cx, cz, swap} with arbitrary distinct
/// targets (non-adjacent pairs included).
pub fn random_circuit(n: usize, gates: usize, rng: &mut ChaCha8Rng) -> Circuit {
    const KINDS: [GateKind; 6] = [
        GateKind::H,
        GateKind::T,
        GateKind::Rz,
        GateKind::Cx,
        GateKind::Cz,
        GateKind::Swap,
    ];
    let mut circuit = Circuit::new(n).unwrap();
    for _ in 0..gates {
        let kind = *KINDS.choose(rng).unwrap();
        match kind {
            GateKind::H | GateKind::T => {
                let q = rng.random_range(0..n);
                circuit.push_named(kind, &[q], &[]).unwrap();
            }
            GateKind::Rz => {
                let q = rng.random_range(0..n);
                let angle = rng.random::<f64>() * std::f64::consts::TAU;
                circuit.push_named(kind, &[q], &[angle]).unwrap();
            }
            _ => {
                let a = rng.random_range(0..n);
                let mut b = rng.random_range(0..n);
                while b == a {
                    b = rng.random_range(0..n);
                }
                circuit.push_named(kind, &[a, b], &[]).unwrap();
            }
        }
    }
    circuit
}

/// Maximum |amplitude difference| between an MPS state and a dense state.
pub fn max_amp_diff(mps: &MpsState, dense: &DenseState) -> f64 {
    let reconstructed = mps.to_dense().unwrap();
    reconstructed
        .amplitudes()
        .iter()
        .zip(dense.amplitudes())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

/// Applies a 2x2 operator (not necessarily unitary) to one qubit of a raw
/// amplitude vector. Qubit 0 is the most significant bit.
fn apply_factor(amps: &mut [Complex64], n: usize, target: usize, op: &ComplexMatrix) {
    let stride = 1usize << (n - 1 - target);
    let mut base = 0;
    while base < amps.len() {
        for offset in base..base + stride {
            let lo = amps[offset];
            let hi = amps[offset + stride];
            amps[offset] = op[(0, 0)] * lo + op[(0, 1)] * hi;
            amps[offset + stride] = op[(1, 0)] * lo + op[(1, 1)] * hi;
        }
        base += 2 * stride;
    }
}

/// Dense-side expectation oracle for a product observable: applies each factor
/// to a copy of the amplitudes and takes the inner product with the original.
pub fn dense_expect_product(dense: &DenseState, observable: &ProductObservable) -> f64 {
    let n = dense.n();
    assert_eq!(observable.len(), n);
    let mut transformed: Vec<Complex64> = dense.amplitudes().to_vec();
    for (q, factor) in observable.factors().iter().enumerate() {
        apply_factor(&mut transformed, n, q, factor);
    }
    let value: Complex64 = dense
        .amplitudes()
        .iter()
        .zip(&transformed)
        .map(|(a, t)| a.conj() * t)
        .sum();
    value.re
}

/// Total-variation distance between empirical counts and a probability vector
/// indexed by big-endian bitstring value.
pub fn total_variation(counts: &std::collections::BTreeMap<String, u64>, probs: &[f64]) -> f64 {
    let shots: u64 = counts.values().sum();
    let mut tv = 0.0;
    for (index, p) in probs.iter().enumerate() {
        let n = probs.len().trailing_zeros() as usize;
        let bits: String = (0..n)
            .map(|q| {
                if index >> (n - 1 - q) & 1 == 1 {
                    '1'
                } else {
                    '0'
                }
            })
            .collect();
        let empirical = *counts.get(&bits).unwrap_or(&0) as f64 / shots as f64;
        tv += (empirical - p).abs();
    }
    tv / 2.0
}
