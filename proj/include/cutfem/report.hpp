#pragma once

#include "cutfem/experiments.hpp"

#include <filesystem>
#include <ostream>

namespace cutfem {

/// results.csv: one row per level, empty fields where a value does not apply.
void write_csv(std::ostream& os, const Study& study);

/// convergence.svg: log-log errors against h with dashed reference slopes.
void write_svg(std::ostream& os, const Study& study);

/// Flat key = value metadata.
void write_metadata(std::ostream& os, const Study& study);

/// Writes results.csv, convergence.svg and metadata.txt into dir (created if needed).
void write_artifacts(const std::filesystem::path& dir, const Study& study);

} // namespace cutfem
