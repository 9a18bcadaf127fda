#pragma once

#include <stdexcept>
#include <string>

#include "imopt/harness.hpp"

namespace imopt {

class TraceIoError : public std::runtime_error {
 public:
  explicit TraceIoError(const std::string& what) : std::runtime_error(what) {}
};

// CSV layout, one row per (k, algorithm), rows ordered by k then by the
// algorithm order of the experiment:
//
//   k,alg,x_1..x_n,xstar_1..xstar_n,err,cum_err,phase
//
// Floats use 17 significant digits so that reading them back is exact.
// `phase` is warmup/structured/fallback for P-SIMBO and "none" otherwise.

void write_trace_csv(const Trace& trace, const std::string& path);

/// Inverse of write_trace_csv. Events, d_hat snapshots, checksums and the
/// seed are not part of the CSV and come back empty.
Trace read_trace_csv(const std::string& path);

/// Run metadata, per-algorithm events, installed controllers (in the event
/// details) and the d_hat snapshot of every step.
void write_trace_json(const Trace& trace, const std::string& path);

std::string summary_to_json(const Summary& summary);
void write_summary_json(const Summary& summary, const std::string& path);

/// Fixed-width plain-text table for terminals.
std::string summary_to_table(const Summary& summary);

}  // namespace imopt
