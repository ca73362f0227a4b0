//! C ABI for the mpsim simulator.
//!
//! The interface follows the usual opaque-handle pattern: `mpsim_sim_new`
//! allocates a simulator, every call returns an [`MpsimStatus`] code, results
//! travel through out-pointers, and `mpsim_sim_free` releases the handle.
//! A failing call stores a message retrievable with
//! `mpsim_last_error_message` until the next failure on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use mpsim::{parse, Complex64, ComplexMatrix, Error, Gate1Q, Gate2Q, MpsState, ProductObservable};

/// Result code returned by every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MpsimStatus {
    /// The call succeeded.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument was malformed or out of domain.
    InvalidArgument = 2,
    /// A qubit, bond, or cut index was out of range.
    IndexOutOfRange = 3,
    /// A gate matrix was rejected (wrong size, not unitary, bad targets).
    GateError = 4,
    /// Circuit text failed to parse.
    ParseError = 5,
    /// A capacity limit (dense conversion size, bond dimension) was exceeded.
    CapacityExceeded = 6,
    /// A numeric routine failed or received non-finite input.
    NumericFailure = 7,
    /// An output buffer was too small; the required length was written.
    BufferTooSmall = 8,
}

/// Opaque simulator handle.
pub struct MpsimSim {
    state: MpsState,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let sanitized: String = message.chars().filter(|&ch| ch != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn fail(status: MpsimStatus, message: &str) -> MpsimStatus {
    set_last_error(message);
    status
}

fn fail_with(err: &Error) -> MpsimStatus {
    let status = match err {
        Error::Parse { .. } => MpsimStatus::ParseError,
        Error::Capacity(_) => MpsimStatus::CapacityExceeded,
        Error::Index(_) => MpsimStatus::IndexOutOfRange,
        Error::Gate(_) => MpsimStatus::GateError,
        Error::NumericInput | Error::NumericFailure => MpsimStatus::NumericFailure,
        _ => MpsimStatus::InvalidArgument,
    };
    fail(status, &err.to_string())
}

/// Message describing the most recent failure on this thread, or an empty
/// string. The pointer stays valid until the next failing call on the same
/// thread.
#[no_mangle]
pub extern "C" fn mpsim_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

unsafe fn sim_ref<'a>(sim: *const MpsimSim) -> Option<&'a MpsimSim> {
    sim.as_ref()
}

unsafe fn sim_mut<'a>(sim: *mut MpsimSim) -> Option<&'a mut MpsimSim> {
    sim.as_mut()
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, MpsimStatus> {
    if ptr.is_null() {
        return Err(fail(MpsimStatus::NullPointer, "string argument is null"));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| fail(MpsimStatus::InvalidArgument, "string argument is not UTF-8"))
}

fn matrix_from_re_im(values: &[f64], dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_shape_fn((dim, dim), |(r, c)| {
        let at = 2 * (r * dim + c);
        Complex64::new(values[at], values[at + 1])
    })
}

/// Allocates a simulator in the all-zeros state on `num_qubits` qubits.
///
/// # Safety
/// `out_sim` must be a valid pointer. Free the result with `mpsim_sim_free`.
#[no_mangle]
pub unsafe extern "C" fn mpsim_sim_new(
    num_qubits: usize,
    out_sim: *mut *mut MpsimSim,
) -> MpsimStatus {
    if out_sim.is_null() {
        return fail(MpsimStatus::NullPointer, "out_sim is null");
    }
    match MpsState::init_zero(num_qubits) {
        Ok(state) => {
            *out_sim = Box::into_raw(Box::new(MpsimSim { state }));
            MpsimStatus::Ok
        }
        Err(err) => fail_with(&err),
    }
}

/// Releases a simulator. A null pointer is ignored.
///
/// # Safety
/// `sim` must have come from `mpsim_sim_new` and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mpsim_sim_free(sim: *mut MpsimSim) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Writes the qubit count to `out`.
///
/// # Safety
/// `sim` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mpsim_sim_num_qubits(
    sim: *const MpsimSim,
    out: *mut usize,
) -> MpsimStatus {
    let Some(sim) = sim_ref(sim) else {
        return fail(MpsimStatus::NullPointer, "sim is null");
    };
    if out.is_null() {
        return fail(MpsimStatus::NullPointer, "out is null");
    }
    *out = sim.state.n();
    MpsimStatus::Ok
}

/// Caps the bond dimension of subsequent two-qubit updates; 0 disables the cap.
///
/// # Safety
/// `sim` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mpsim_sim_set_chi_cap(sim: *mut MpsimSim, chi_cap: usize) -> MpsimStatus {
    let Some(sim) = sim_mut(sim) else {
        return fail(MpsimStatus::NullPointer, "sim is null");
    };
    sim.state
        .set_chi_cap(if chi_cap == 0 { None } else { Some(chi_cap) });
    MpsimStatus::Ok
}

/// Applies a named gate from the builtin library. `targets` has
/// `num_targets` entries and `params` has `num_params` angles in radians.
///
/// # Safety
/// `sim` and `mnemonic` must be valid; `targets` and `params` must point to
/// arrays of the stated lengths (null is accepted for length 0).
#[no_mangle]
pub unsafe extern "C" fn mpsim_sim_apply_named(
    sim: *mut MpsimSim,
    mnemonic: *const c_char,
    targets: *const usize,
    num_targets: usize,
    params: *const f64,
    num_params: usize,
) -> MpsimStatus {
    let Some(sim) = sim_mut(sim) else {
        return fail(MpsimStatus::NullPointer, "sim is null");
    };
    let mnemonic = match read_str(mnemonic) {
        Ok(s) => s,
        Err(status) => return status,
    };
    if targets.is_null() && num_targets > 0 {
        return fail(MpsimStatus::NullPointer, "targets is null");
    }
    if params.is_null() && num_params > 0 {
        return fail(MpsimStatus::NullPointer, "params is null");
    }
    let targets = if num_targets == 0 {
        &[]
    } else {
        std::slice::from_raw_parts(targets, num_targets)
    };
    let params = if num_params == 0 {
        &[]
    } else {
        std::slice::from_raw_parts(params, num_params)
    };
    let matrix = match mpsim::builtin_gate(mnemonic, params) {
        Ok(m) => m,
        Err(err) => return fail_with(&err),
    };
    let result = match targets {
        [t] => Gate1Q::new(matrix, *t).and_then(|g| sim.state.apply_1q(&g)),
        [t1, t2] => Gate2Q::new(matrix, *t1, *t2).and_then(|g| sim.state.apply_2q(&g)),
        _ => Err(Error::Gate(format!(
            "{mnemonic} cannot take {num_targets} targets"
        ))),
    };
    match result {
        Ok(()) => MpsimStatus::Ok,
        Err(err) => fail_with(&err),
    }
}

/// Applies a raw single-qubit gate given as 8 numbers: row-major
/// real/imaginary pairs of the 2x2 matrix.
///
/// # Safety
/// `sim` must be valid and `matrix_re_im` must point to 8 doubles.
#[no_mangle]
pub unsafe extern "C" fn mpsim_sim_apply_raw_1q(
    sim: *mut MpsimSim,
    target: usize,
    matrix_re_im: *const f64,
) -> MpsimStatus {
    let Some(sim) = sim_mut(sim) else {
        return fail(MpsimStatus::NullPointer, "sim is null");
    };
    if matrix_re_im.is_null() {
        return fail(MpsimStatus::NullPointer, "matrix_re_im is null");
    }
    let values = std::slice::from_raw_parts(matrix_re_im, 8);
    let matrix = matrix_from_re_im(values, 2);
    match Gate1Q::new(matrix, target).and_then(|g| sim.state.apply_1q(&g)) {
        Ok(()) => MpsimStatus::Ok,
        Err(err) => fail_with(&err),
    }
}

/// Applies a raw two-qubit gate given as 32 numbers: row-major real/imaginary
/// pairs of the 4x4 matrix, with `target1` as the high index bit.
///
/// # Safety
/// `sim` must be valid and `matrix_re_im` must point to 32 doubles.
#[no_mangle]
pub unsafe extern "C" fn mpsim_sim_apply_raw_2q(
    sim: *mut MpsimSim,
    target1: usize,
    target2: usize,
    matrix_re_im: *const f64,
) -> MpsimStatus {
    let Some(sim) = sim_mut(sim) else {
        return fail(MpsimStatus::NullPointer, "sim is null");
    };
    if matrix_re_im.is_null() {
        return fail(MpsimStatus::NullPointer, "matrix_re_im is null");
    }
    let values = std::slice::from_raw_parts(matrix_re_im, 32);
    let matrix = matrix_from_re_im(values, 4);
    match Gate2Q::new(matrix, target1, target2).and_then(|g| sim.state.apply_2q(&g)) {
        Ok(()) => MpsimStatus::Ok,
        Err(err) => fail_with(&err),
    }
}

/// Parses circuit text and applies every operation. The circuit's qubit
/// count must equal the simulator's.
///
/// # Safety
/// `sim` and `text` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mpsim_sim_apply_circuit_text(
    sim: *mut MpsimSim,
    text: *const c_char,
) -> MpsimStatus {
    let Some(sim) = sim_mut(sim) else {
        return fail(MpsimStatus::NullPointer, "sim is null");
    };
    let text = match read_str(text) {
        Ok(s) => s,
        Err(status) => return status,
    };
    let circuit = match parse(text) {
        Ok(c) => c,
        Err(err) => return fail_with(&err),
    };
    if circuit.n != sim.state.n() {
        return fail(
            MpsimStatus::InvalidArgument,
            &format!(
                "circuit has {} qubits, simulator has {}",
                circuit.n,
                sim.state.n()
            ),
        );
    }
    for op in &circuit.ops {
        if let Err(err) = mpsim::apply_op_mps(&mut sim.state, op) {
            return fail_with(&err);
        }
    }
    MpsimStatus::Ok
}

/// Writes the maximum bond dimension to `out`.
///
/// # Safety
/// `sim` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mpsim_sim_chi(sim: *const MpsimSim, out: *mut usize) -> MpsimStatus {
    let Some(sim) = sim_ref(sim) else {
        return fail(MpsimStatus::NullPointer, "sim is null");
    };
    if out.is_null() {
        return fail(MpsimStatus::NullPointer, "out is null");
    }
    *out = sim.state.chi();
    MpsimStatus::Ok
}

/// Writes `log2` of the maximum bond dimension to `out`.
///
/// # Safety
/// `sim` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mpsim_sim_e_chi(sim: *const MpsimSim, out: *mut f64) -> MpsimStatus {
    let Some(sim) = sim_ref(sim) else {
        return fail(MpsimStatus::NullPointer, "sim is null");
    };
    if out.is_null() {
        return fail(MpsimStatus::NullPointer, "out is null");
    }
    *out = sim.state.e_chi();
    MpsimStatus::Ok
}

/// Writes the number of stored scalars to `out`.
///
/// # Safety
/// `sim` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mpsim_sim_storage_count(
    sim: *const MpsimSim,
    out: *mut usize,
) -> MpsimStatus {
    let Some(sim) = sim_ref(sim) else {
        return fail(MpsimStatus::NullPointer, "sim is null");
    };
    if out.is_null() {
        return fail(MpsimStatus::NullPointer, "out is null");
    }
    *out = sim.state.storage_count();
    MpsimStatus::Ok
}

/// Writes the squared norm of the state to `out`.
///
/// # Safety
/// `sim` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mpsim_sim_global_norm(sim: *const MpsimSim, out: *mut f64) -> MpsimStatus {
    let Some(sim) = sim_ref(sim) else {
        return fail(MpsimStatus::NullPointer, "sim is null");
    };
    if out.is_null() {
        return fail(MpsimStatus::NullPointer, "out is null");
    }
    *out = sim.state.global_norm();
    MpsimStatus::Ok
}

/// Writes the cumulative discarded Schmidt weight to `out`.
///
/// # Safety
/// `sim` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mpsim_sim_discarded_weight(
    sim: *const MpsimSim,
    out: *mut f64,
) -> MpsimStatus {
    let Some(sim) = sim_ref(sim) else {
        return fail(MpsimStatus::NullPointer, "sim is null");
    };
    if out.is_null() {
        return fail(MpsimStatus::NullPointer, "out is null");
    }
    *out = sim.state.discarded_weight();
    MpsimStatus::Ok
}

/// Writes the worst canonical-form deviation and whether it passes the
/// policy's tolerance.
///
/// # Safety
/// `sim`, `out_max_deviation`, and `out_passed` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mpsim_sim_validate_canonical(
    sim: *const MpsimSim,
    out_max_deviation: *mut f64,
    out_passed: *mut bool,
) -> MpsimStatus {
    let Some(sim) = sim_ref(sim) else {
        return fail(MpsimStatus::NullPointer, "sim is null");
    };
    if out_max_deviation.is_null() || out_passed.is_null() {
        return fail(MpsimStatus::NullPointer, "output pointer is null");
    }
    let report = sim.state.validate_canonical();
    *out_max_deviation = report.max_deviation;
    *out_passed = report.passed;
    MpsimStatus::Ok
}

/// Truncates bond `bond` to at most `chi_cap` Schmidt terms and writes the
/// discarded squared weight to `out_discarded` (which may be null).
///
/// # Safety
/// `sim` must be valid; `out_discarded` must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn mpsim_sim_truncate_bond(
    sim: *mut MpsimSim,
    bond: usize,
    chi_cap: usize,
    out_discarded: *mut f64,
) -> MpsimStatus {
    let Some(sim) = sim_mut(sim) else {
        return fail(MpsimStatus::NullPointer, "sim is null");
    };
    match sim.state.truncate_bond(bond, chi_cap) {
        Ok(discarded) => {
            if !out_discarded.is_null() {
                *out_discarded = discarded;
            }
            MpsimStatus::Ok
        }
        Err(err) => fail_with(&err),
    }
}

/// Copies the Schmidt coefficients across the cut between qubits `cut` and
/// `cut + 1` into `out_values`. The full spectrum length is always written to
/// `out_len`; if `capacity` is too small and `out_values` is non-null the
/// call returns `BufferTooSmall`. Passing a null `out_values` just queries
/// the length.
///
/// # Safety
/// `sim` and `out_len` must be valid; `out_values` must be null or point to
/// `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn mpsim_sim_schmidt_at_cut(
    sim: *const MpsimSim,
    cut: usize,
    out_values: *mut f64,
    capacity: usize,
    out_len: *mut usize,
) -> MpsimStatus {
    let Some(sim) = sim_ref(sim) else {
        return fail(MpsimStatus::NullPointer, "sim is null");
    };
    if out_len.is_null() {
        return fail(MpsimStatus::NullPointer, "out_len is null");
    }
    let values = match sim.state.schmidt_at_cut(cut) {
        Ok(v) => v,
        Err(err) => return fail_with(&err),
    };
    *out_len = values.len();
    if out_values.is_null() {
        return MpsimStatus::Ok;
    }
    if capacity < values.len() {
        return fail(
            MpsimStatus::BufferTooSmall,
            &format!(
                "spectrum has {} values, buffer holds {capacity}",
                values.len()
            ),
        );
    }
    std::ptr::copy_nonoverlapping(values.as_ptr(), out_values, values.len());
    MpsimStatus::Ok
}

/// Writes the amplitude of the basis state named by the bitstring `bits`
/// (e.g. `"010"`, qubit order) to `out_re` and `out_im`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn mpsim_sim_amplitude(
    sim: *const MpsimSim,
    bits: *const c_char,
    out_re: *mut f64,
    out_im: *mut f64,
) -> MpsimStatus {
    let Some(sim) = sim_ref(sim) else {
        return fail(MpsimStatus::NullPointer, "sim is null");
    };
    if out_re.is_null() || out_im.is_null() {
        return fail(MpsimStatus::NullPointer, "output pointer is null");
    }
    let bits = match read_str(bits) {
        Ok(s) => s,
        Err(status) => return status,
    };
    match sim.state.amplitude(bits) {
        Ok(value) => {
            *out_re = value.re;
            *out_im = value.im;
            MpsimStatus::Ok
        }
        Err(err) => fail_with(&err),
    }
}

/// Writes the expectation value of a Pauli string (e.g. `"ZZI"`, one
/// character per qubit) to `out`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn mpsim_sim_expect_pauli(
    sim: *const MpsimSim,
    paulis: *const c_char,
    out: *mut f64,
) -> MpsimStatus {
    let Some(sim) = sim_ref(sim) else {
        return fail(MpsimStatus::NullPointer, "sim is null");
    };
    if out.is_null() {
        return fail(MpsimStatus::NullPointer, "out is null");
    }
    let paulis = match read_str(paulis) {
        Ok(s) => s,
        Err(status) => return status,
    };
    let observable = match ProductObservable::from_pauli_str(paulis) {
        Ok(o) => o,
        Err(err) => return fail_with(&err),
    };
    match sim.state.expect_product(&observable) {
        Ok(value) => {
            *out = value;
            MpsimStatus::Ok
        }
        Err(err) => fail_with(&err),
    }
}

/// Draws `shots` measurements and writes the distinct outcomes as parallel
/// arrays: `out_codes[i]` is the big-endian value of the outcome bitstring
/// (qubit 0 is the most significant bit) and `out_counts[i]` its occurrence
/// count, sorted by code. The number of distinct outcomes is always written
/// to `out_len`; if it exceeds `capacity` the call returns `BufferTooSmall`.
/// Requires at most 64 qubits. Deterministic in `seed`.
///
/// # Safety
/// `sim` and `out_len` must be valid; `out_codes` and `out_counts` must be
/// null or point to `capacity` entries each.
#[no_mangle]
pub unsafe extern "C" fn mpsim_sim_sample(
    sim: *const MpsimSim,
    shots: u64,
    seed: u64,
    out_codes: *mut u64,
    out_counts: *mut u64,
    capacity: usize,
    out_len: *mut usize,
) -> MpsimStatus {
    let Some(sim) = sim_ref(sim) else {
        return fail(MpsimStatus::NullPointer, "sim is null");
    };
    if out_len.is_null() {
        return fail(MpsimStatus::NullPointer, "out_len is null");
    }
    if sim.state.n() > 64 {
        return fail(
            MpsimStatus::InvalidArgument,
            "sampling over the C interface supports at most 64 qubits",
        );
    }
    let result = sim.state.sample(shots, seed);
    *out_len = result.counts.len();
    if out_codes.is_null() || out_counts.is_null() {
        return MpsimStatus::Ok;
    }
    if capacity < result.counts.len() {
        return fail(
            MpsimStatus::BufferTooSmall,
            &format!(
                "{} distinct outcomes, buffer holds {capacity}",
                result.counts.len()
            ),
        );
    }
    for (i, (bits, count)) in result.counts.iter().enumerate() {
        let mut code = 0u64;
        for ch in bits.chars() {
            code = code << 1 | u64::from(ch == '1');
        }
        *out_codes.add(i) = code;
        *out_counts.add(i) = *count;
    }
    MpsimStatus::Ok
}

/// Writes the full amplitude vector as row-major real/imaginary pairs in
/// basis order (qubit 0 is the most significant index bit). `capacity` and
/// `out_len` count complex amplitudes, so the buffer must hold
/// `2 * capacity` doubles. Limited to 14 qubits.
///
/// # Safety
/// `sim` and `out_len` must be valid; `out_re_im` must be null or point to
/// `2 * capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn mpsim_sim_to_dense(
    sim: *const MpsimSim,
    out_re_im: *mut f64,
    capacity: usize,
    out_len: *mut usize,
) -> MpsimStatus {
    let Some(sim) = sim_ref(sim) else {
        return fail(MpsimStatus::NullPointer, "sim is null");
    };
    if out_len.is_null() {
        return fail(MpsimStatus::NullPointer, "out_len is null");
    }
    let dense = match sim.state.to_dense() {
        Ok(d) => d,
        Err(err) => return fail_with(&err),
    };
    let amps = dense.amplitudes();
    *out_len = amps.len();
    if out_re_im.is_null() {
        return MpsimStatus::Ok;
    }
    if capacity < amps.len() {
        return fail(
            MpsimStatus::BufferTooSmall,
            &format!("{} amplitudes, buffer holds {capacity}", amps.len()),
        );
    }
    for (i, z) in amps.iter().enumerate() {
        *out_re_im.add(2 * i) = z.re;
        *out_re_im.add(2 * i + 1) = z.im;
    }
    MpsimStatus::Ok
}
