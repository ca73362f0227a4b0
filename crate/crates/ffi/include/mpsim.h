/* C interface to the mpsim matrix product state simulator. */

#ifndef MPSIM_H
#define MPSIM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code returned by every call.
typedef enum MpsimStatus {
  // The call succeeded.
  MPSIM_STATUS_OK = 0,
  // A required pointer argument was null.
  MPSIM_STATUS_NULL_POINTER = 1,
  // An argument was malformed or out of domain.
  MPSIM_STATUS_INVALID_ARGUMENT = 2,
  // A qubit, bond, or cut index was out of range.
  MPSIM_STATUS_INDEX_OUT_OF_RANGE = 3,
  // A gate matrix was rejected (wrong size, not unitary, bad targets).
  MPSIM_STATUS_GATE_ERROR = 4,
  // Circuit text failed to parse.
  MPSIM_STATUS_PARSE_ERROR = 5,
  // A capacity limit (dense conversion size, bond dimension) was exceeded.
  MPSIM_STATUS_CAPACITY_EXCEEDED = 6,
  // A numeric routine failed or received non-finite input.
  MPSIM_STATUS_NUMERIC_FAILURE = 7,
  // An output buffer was too small; the required length was written.
  MPSIM_STATUS_BUFFER_TOO_SMALL = 8,
} MpsimStatus;

// Opaque simulator handle.
typedef struct MpsimSim MpsimSim;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the most recent failure on this thread, or an empty
// string. The pointer stays valid until the next failing call on the same
// thread.
const char *mpsim_last_error_message(void);

// Allocates a simulator in the all-zeros state on `num_qubits` qubits.
//
// # Safety
// `out_sim` must be a valid pointer. Free the result with `mpsim_sim_free`.
enum MpsimStatus mpsim_sim_new(size_t num_qubits, struct MpsimSim **out_sim);

// Releases a simulator. A null pointer is ignored.
//
// # Safety
// `sim` must have come from `mpsim_sim_new` and must not be used afterwards.
void mpsim_sim_free(struct MpsimSim *sim);

// Writes the qubit count to `out`.
//
// # Safety
// `sim` and `out` must be valid pointers.
enum MpsimStatus mpsim_sim_num_qubits(const struct MpsimSim *sim, size_t *out);

// Caps the bond dimension of subsequent two-qubit updates; 0 disables the cap.
//
// # Safety
// `sim` must be a valid pointer.
enum MpsimStatus mpsim_sim_set_chi_cap(struct MpsimSim *sim, size_t chi_cap);

// Applies a named gate from the builtin library. `targets` has
// `num_targets` entries and `params` has `num_params` angles in radians.
//
// # Safety
// `sim` and `mnemonic` must be valid; `targets` and `params` must point to
// arrays of the stated lengths (null is accepted for length 0).
enum MpsimStatus mpsim_sim_apply_named(struct MpsimSim *sim,
                                       const char *mnemonic,
                                       const size_t *targets,
                                       size_t num_targets,
                                       const double *params,
                                       size_t num_params);

// Applies a raw single-qubit gate given as 8 numbers: row-major
// real/imaginary pairs of the 2x2 matrix.
//
// # Safety
// `sim` must be valid and `matrix_re_im` must point to 8 doubles.
enum MpsimStatus mpsim_sim_apply_raw_1q(struct MpsimSim *sim,
                                        size_t target,
                                        const double *matrix_re_im);

// Applies a raw two-qubit gate given as 32 numbers: row-major real/imaginary
// pairs of the 4x4 matrix, with `target1` as the high index bit.
//
// # Safety
// `sim` must be valid and `matrix_re_im` must point to 32 doubles.
enum MpsimStatus mpsim_sim_apply_raw_2q(struct MpsimSim *sim,
                                        size_t target1,
                                        size_t target2,
                                        const double *matrix_re_im);

// Parses circuit text and applies every operation. The circuit's qubit
// count must equal the simulator's.
//
// # Safety
// `sim` and `text` must be valid pointers.
enum MpsimStatus mpsim_sim_apply_circuit_text(struct MpsimSim *sim, const char *text);

// Writes the maximum bond dimension to `out`.
//
// # Safety
// `sim` and `out` must be valid pointers.
enum MpsimStatus mpsim_sim_chi(const struct MpsimSim *sim, size_t *out);

// Writes `log2` of the maximum bond dimension to `out`.
//
// # Safety
// `sim` and `out` must be valid pointers.
enum MpsimStatus mpsim_sim_e_chi(const struct MpsimSim *sim, double *out);

// Writes the number of stored scalars to `out`.
//
// # Safety
// `sim` and `out` must be valid pointers.
enum MpsimStatus mpsim_sim_storage_count(const struct MpsimSim *sim, size_t *out);

// Writes the squared norm of the state to `out`.
//
// # Safety
// `sim` and `out` must be valid pointers.
enum MpsimStatus mpsim_sim_global_norm(const struct MpsimSim *sim, double *out);

// Writes the cumulative discarded Schmidt weight to `out`.
//
// # Safety
// `sim` and `out` must be valid pointers.
enum MpsimStatus mpsim_sim_discarded_weight(const struct MpsimSim *sim, double *out);

// Writes the worst canonical-form deviation and whether it passes the
// policy's tolerance.
//
// # Safety
// `sim`, `out_max_deviation`, and `out_passed` must be valid pointers.
enum MpsimStatus mpsim_sim_validate_canonical(const struct MpsimSim *sim,
                                              double *out_max_deviation,
                                              bool *out_passed);

// Truncates bond `bond` to at most `chi_cap` Schmidt terms and writes the
// discarded squared weight to `out_discarded` (which may be null).
//
// # Safety
// `sim` must be valid; `out_discarded` must be valid or null.
enum MpsimStatus mpsim_sim_truncate_bond(struct MpsimSim *sim,
                                         size_t bond,
                                         size_t chi_cap,
                                         double *out_discarded);

// Copies the Schmidt coefficients across the cut between qubits `cut` and
// `cut + 1` into `out_values`. The full spectrum length is always written to
// `out_len`; if `capacity` is too small and `out_values` is non-null the
// call returns `BufferTooSmall`. Passing a null `out_values` just queries
// the length.
//
// # Safety
// `sim` and `out_len` must be valid; `out_values` must be null or point to
// `capacity` doubles.
enum MpsimStatus mpsim_sim_schmidt_at_cut(const struct MpsimSim *sim,
                                          size_t cut,
                                          double *out_values,
                                          size_t capacity,
                                          size_t *out_len);

// Writes the amplitude of the basis state named by the bitstring `bits`
// (e.g. `"010"`, qubit order) to `out_re` and `out_im`.
//
// # Safety
// All pointers must be valid.
enum MpsimStatus mpsim_sim_amplitude(const struct MpsimSim *sim,
                                     const char *bits,
                                     double *out_re,
                                     double *out_im);

// Writes the expectation value of a Pauli string (e.g. `"ZZI"`, one
// character per qubit) to `out`.
//
// # Safety
// All pointers must be valid.
enum MpsimStatus mpsim_sim_expect_pauli(const struct MpsimSim *sim,
                                        const char *paulis,
                                        double *out);

// Draws `shots` measurements and writes the distinct outcomes as parallel
// arrays: `out_codes[i]` is the big-endian value of the outcome bitstring
// (qubit 0 is the most significant bit) and `out_counts[i]` its occurrence
// count, sorted by code. The number of distinct outcomes is always written
// to `out_len`; if it exceeds `capacity` the call returns `BufferTooSmall`.
// Requires at most 64 qubits. Deterministic in `seed`.
//
// # Safety
// `sim` and `out_len` must be valid; `out_codes` and `out_counts` must be
// null or point to `capacity` entries each.
enum MpsimStatus mpsim_sim_sample(const struct MpsimSim *sim,
                                  uint64_t shots,
                                  uint64_t seed,
                                  uint64_t *out_codes,
                                  uint64_t *out_counts,
                                  size_t capacity,
                                  size_t *out_len);

// Writes the full amplitude vector as row-major real/imaginary pairs in
// basis order (qubit 0 is the most significant index bit). `capacity` and
// `out_len` count complex amplitudes, so the buffer must hold
// `2 * capacity` doubles. Limited to 14 qubits.
//
// # Safety
// `sim` and `out_len` must be valid; `out_re_im` must be null or point to
// `2 * capacity` doubles.
enum MpsimStatus mpsim_sim_to_dense(const struct MpsimSim *sim,
                                    double *out_re_im,
                                    size_t capacity,
                                    size_t *out_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MPSIM_H */
