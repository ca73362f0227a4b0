//! Circuit execution with per-gate reporting, plus the benchmark circuit
//! families used to study scaling.

use std::str::FromStr;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, CircuitOp, GateKind};
use crate::dense::{DenseState, DENSE_QUBIT_LIMIT};
use crate::error::{Error, Result};
use crate::gate::{Gate1Q, Gate2Q};
use crate::mps::MpsState;
use crate::numerics::TolerancePolicy;
use crate::observables::{ProductObservable, SampleResult};

/// Applies one circuit operation to a chain state.
pub fn apply_op_mps(state: &mut MpsState, op: &CircuitOp) -> Result<()> {
    let matrix = op.matrix()?;
    match op.targets.len() {
        1 => state.apply_1q(&Gate1Q::new(matrix, op.targets[0])?),
        2 => state.apply_2q(&Gate2Q::new(matrix, op.targets[0], op.targets[1])?),
        other => Err(Error::ContractViolation(format!(
            "operation has {other} targets"
        ))),
    }
}

/// Applies one circuit operation to a dense state.
pub fn apply_op_dense(state: &mut DenseState, op: &CircuitOp) -> Result<()> {
    let matrix = op.matrix()?;
    match op.targets.len() {
        1 => state.apply_1q(&Gate1Q::new(matrix, op.targets[0])?),
        2 => state.apply_2q(&Gate2Q::new(matrix, op.targets[0], op.targets[1])?),
        other => Err(Error::ContractViolation(format!(
            "operation has {other} targets"
        ))),
    }
}

/// Snapshot taken after one gate of a run.
#[derive(Clone, Debug)]
pub struct GateRecord {
    /// 1-based position of the gate in the circuit.
    pub index: usize,
    pub mnemonic: &'static str,
    pub targets: Vec<usize>,
    /// Maximum bond dimension after the gate.
    pub chi: usize,
    pub e_chi: f64,
    /// Wall time since the start of the run.
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct AmplitudeRecord {
    pub bits: String,
    pub value: Complex64,
    pub probability: f64,
}

#[derive(Clone, Debug)]
pub struct ExpectationRecord {
    pub observable: String,
    pub value: f64,
}

/// Everything a run produces besides the final state.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub n: usize,
    pub gate_count: usize,
    /// Per-gate snapshots; filled only when requested.
    pub gates: Vec<GateRecord>,
    pub final_chi: usize,
    pub final_e_chi: f64,
    pub final_storage: usize,
    /// Largest storage footprint observed after any gate.
    pub peak_storage: usize,
    pub discarded_weight: f64,
    pub elapsed: Duration,
    pub amplitudes: Vec<AmplitudeRecord>,
    pub expectations: Vec<ExpectationRecord>,
    pub samples: Option<SampleResult>,
    /// Maximum amplitude error against the dense oracle, when tracked.
    pub dense_max_error: Option<f64>,
}

/// Options controlling [`run_circuit`].
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Truncate every two-qubit update to this bond dimension.
    pub chi_cap: Option<usize>,
    /// Override the default rank tolerance.
    pub rank_tol: Option<f64>,
    /// Abort with a capacity error if the bond dimension ever exceeds this.
    pub max_chi: Option<usize>,
    /// Evolve a dense state in parallel and report the deviation.
    pub compare_dense: bool,
    /// Record per-gate snapshots.
    pub trace_gates: bool,
    /// Basis states whose amplitudes to report.
    pub amplitudes: Vec<String>,
    /// Pauli strings whose expectation values to report.
    pub expectations: Vec<String>,
    /// Number of measurement shots to draw, if any.
    pub shots: Option<u64>,
    /// Seed for sampling.
    pub seed: u64,
}

/// Scalar count of the tensors and Schmidt vectors lying in the inclusive
/// site window `lo..=hi`, the only region a gate on those targets may touch.
fn span_storage(state: &MpsState, lo: usize, hi: usize) -> usize {
    let gamma_total: usize = (lo..=hi).map(|site| state.gamma(site).len()).sum();
    let lambda_total: usize = (lo..hi).map(|bond| state.lambda(bond).len()).sum();
    gamma_total + lambda_total
}

/// Runs a circuit from the all-zeros state and reports on the evolution.
/// Returns the report together with the final state.
pub fn run_circuit(circuit: &Circuit, opts: &RunOptions) -> Result<(RunReport, MpsState)> {
    let policy = match opts.rank_tol {
        Some(rt) => TolerancePolicy::default().with_rank_tol(rt)?,
        None => TolerancePolicy::default(),
    };
    let mut state = MpsState::init_zero_with_policy(circuit.n, policy)?;
    state.set_chi_cap(opts.chi_cap);
    let mut dense = if opts.compare_dense {
        if circuit.n > DENSE_QUBIT_LIMIT {
            return Err(Error::Capacity(format!(
                "dense comparison supports at most {DENSE_QUBIT_LIMIT} qubits, circuit has {}",
                circuit.n
            )));
        }
        Some(DenseState::zero(circuit.n)?)
    } else {
        None
    };

    let start = Instant::now();
    let mut gates = Vec::new();
    // A gate only rewrites tensors between its targets, so the storage total
    // is maintained by span-local deltas; recounting the whole chain per gate
    // would make shallow circuits on many qubits quadratic in n.
    let mut storage = state.storage_count();
    let mut peak_storage = storage;
    let needs_chi = opts.trace_gates || opts.max_chi.is_some();
    for (i, op) in circuit.ops.iter().enumerate() {
        let lo = op.targets.iter().copied().min().unwrap_or(0);
        let hi = op.targets.iter().copied().max().unwrap_or(0);
        storage -= span_storage(&state, lo, hi);
        apply_op_mps(&mut state, op)?;
        storage += span_storage(&state, lo, hi);
        if let Some(d) = dense.as_mut() {
            apply_op_dense(d, op)?;
        }
        peak_storage = peak_storage.max(storage);
        let chi = if needs_chi { state.chi() } else { 0 };
        if opts.trace_gates {
            gates.push(GateRecord {
                index: i + 1,
                mnemonic: op.mnemonic(),
                targets: op.targets.clone(),
                chi,
                e_chi: state.e_chi(),
                elapsed: start.elapsed(),
            });
        }
        if let Some(max_chi) = opts.max_chi {
            if chi > max_chi {
                return Err(Error::Capacity(format!(
                    "bond dimension {chi} exceeds the limit {max_chi} after gate {} ({})",
                    i + 1,
                    op.mnemonic()
                )));
            }
        }
    }
    debug_assert_eq!(
        storage,
        state.storage_count(),
        "span-local storage tracking drifted"
    );
    let elapsed = start.elapsed();

    let mut amplitudes = Vec::new();
    for bits in &opts.amplitudes {
        let value = state.amplitude(bits)?;
        amplitudes.push(AmplitudeRecord {
            bits: bits.clone(),
            value,
            probability: value.norm_sqr(),
        });
    }
    let mut expectations = Vec::new();
    for paulis in &opts.expectations {
        let observable = ProductObservable::from_pauli_str(paulis)?;
        let value = state.expect_product(&observable)?;
        expectations.push(ExpectationRecord {
            observable: paulis.clone(),
            value,
        });
    }
    let samples = opts.shots.map(|shots| state.sample(shots, opts.seed));
    let dense_max_error = match &dense {
        Some(d) => {
            let back = state.to_dense()?;
            Some(
                back.amplitudes()
                    .iter()
                    .zip(d.amplitudes())
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max),
            )
        }
        None => None,
    };

    let report = RunReport {
        n: circuit.n,
        gate_count: circuit.ops.len(),
        gates,
        final_chi: state.chi(),
        final_e_chi: state.e_chi(),
        final_storage: state.storage_count(),
        peak_storage,
        discarded_weight: state.discarded_weight(),
        elapsed,
        amplitudes,
        expectations,
        samples,
        dense_max_error,
    };
    Ok((report, state))
}

/// Benchmark circuit families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BenchFamily {
    /// Hadamard then a chain of adjacent cx gates; bond dimension stays 2.
    Ghz,
    /// Single-qubit gates only; bond dimension stays 1.
    Product,
    /// Brickwork layers of random single-qubit gates and adjacent cx/cz.
    RandomLocal,
}

impl BenchFamily {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Ghz => "ghz",
            Self::Product => "product",
            Self::RandomLocal => "random-local",
        }
    }
}

impl FromStr for BenchFamily {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "ghz" => Ok(Self::Ghz),
            "product" => Ok(Self::Product),
            "random-local" => Ok(Self::RandomLocal),
            other => Err(format!(
                "unknown family {other:?} (expected ghz, product, or random-local)"
            )),
        }
    }
}

/// Hadamard on qubit 0 followed by a cx ladder.
pub fn ghz_circuit(n: usize) -> Result<Circuit> {
    let mut circuit = Circuit::new(n)?;
    circuit.push_named(GateKind::H, &[0], &[])?;
    for k in 0..n.saturating_sub(1) {
        circuit.push_named(GateKind::Cx, &[k, k + 1], &[])?;
    }
    Ok(circuit)
}

/// Three layers of single-qubit gates; entanglement stays zero.
pub fn product_circuit(n: usize) -> Result<Circuit> {
    let mut circuit = Circuit::new(n)?;
    for k in 0..n {
        circuit.push_named(GateKind::H, &[k], &[])?;
    }
    for k in 0..n {
        circuit.push_named(GateKind::T, &[k], &[])?;
    }
    for k in 0..n {
        circuit.push_named(GateKind::Rz, &[k], &[0.1 + 0.05 * k as f64])?;
    }
    Ok(circuit)
}

/// Brickwork circuit: each layer applies a random single-qubit gate to every
/// qubit, then cx or cz across alternating adjacent pairs. Deterministic in
/// `seed`.
pub fn random_local_circuit(n: usize, depth: usize, seed: u64) -> Result<Circuit> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut circuit = Circuit::new(n)?;
    for layer in 0..depth {
        for k in 0..n {
            match rng.random_range(0..3) {
                0 => circuit.push_named(GateKind::H, &[k], &[])?,
                1 => circuit.push_named(GateKind::T, &[k], &[])?,
                _ => {
                    let angle = rng.random::<f64>() * std::f64::consts::TAU;
                    circuit.push_named(GateKind::Rz, &[k], &[angle])?;
                }
            }
        }
        let offset = layer % 2;
        let mut k = offset;
        while k + 1 < n {
            let kind = if rng.random::<bool>() {
                GateKind::Cx
            } else {
                GateKind::Cz
            };
            circuit.push_named(kind, &[k, k + 1], &[])?;
            k += 2;
        }
    }
    Ok(circuit)
}

pub fn family_circuit(family: BenchFamily, n: usize, depth: usize, seed: u64) -> Result<Circuit> {
    match family {
        BenchFamily::Ghz => ghz_circuit(n),
        BenchFamily::Product => product_circuit(n),
        BenchFamily::RandomLocal => random_local_circuit(n, depth, seed),
    }
}

/// One measured benchmark point.
#[derive(Clone, Debug)]
pub struct BenchRow {
    pub n: usize,
    pub gate_count: usize,
    /// Best wall time over the repeats.
    pub best: Duration,
    pub peak_storage: usize,
    pub final_chi: usize,
    pub repeats: u32,
}

/// Runs a family at each size, repeating each measurement and keeping the
/// fastest run to suppress scheduler noise.
pub fn bench_family(
    family: BenchFamily,
    sizes: &[usize],
    depth: usize,
    seed: u64,
    repeats: u32,
    chi_cap: Option<usize>,
) -> Result<Vec<BenchRow>> {
    if sizes.is_empty() {
        return Err(Error::Domain("bench needs at least one size".into()));
    }
    let repeats = repeats.max(1);
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let circuit = family_circuit(family, n, depth, seed)?;
        let mut best = Duration::MAX;
        let mut peak_storage = 0usize;
        let mut final_chi = 0usize;
        for _ in 0..repeats {
            let mut state = MpsState::init_zero(n)?;
            state.set_chi_cap(chi_cap);
            let start = Instant::now();
            let mut peak = state.storage_count();
            for op in &circuit.ops {
                apply_op_mps(&mut state, op)?;
                peak = peak.max(state.storage_count());
            }
            let elapsed = start.elapsed();
            if elapsed < best {
                best = elapsed;
            }
            peak_storage = peak;
            final_chi = state.chi();
        }
        rows.push(BenchRow {
            n,
            gate_count: circuit.ops.len(),
            best,
            peak_storage,
            final_chi,
            repeats,
        });
    }
    Ok(rows)
}
