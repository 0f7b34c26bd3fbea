#pragma once

#include <filesystem>
#include <ostream>
#include <span>

#include "aefem/config.hpp"

namespace aefem {

/// Header plus one row per record. err columns are empty when the record carries no error.
void write_convergence_csv(std::ostream& out, std::span<const IterationRecord> records);

/// Final estimator report, PML diagnostics and run summary as JSON text.
std::string report_json(const RunConfig& config, const ConvergenceHistory& history);

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;  // overrides config.output.directory
  std::optional<bool> write_fields;              // overrides config.output.write_fields
  std::ostream* progress = nullptr;
};

/// Runs the adaptive loop and writes convergence.csv, report.json and, if requested,
/// fields_####.vtk into the output directory. On failure the rows completed so far are
/// written before the exception propagates.
ConvergenceHistory run(const RunConfig& config, const RunOptions& options = {});

}  // namespace aefem
