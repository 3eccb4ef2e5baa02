#pragma once

#include <filesystem>
#include <string>

#include "phaseret/coherence.hpp"
#include "phaseret/numerics.hpp"

namespace phaseret {

/// Thrown for malformed configs and data files; carries file/line context.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Matrix CSV: header "row,col,re,im", one line per entry, row-major order.
/// Readers size the matrix from the largest indices; absent entries are zero.
void write_matrix_csv(const std::filesystem::path& path, const ComplexMatrix& M);
ComplexMatrix read_matrix_csv(const std::filesystem::path& path);

/// Vector CSV: header "index,re,im".
void write_vector_csv(const std::filesystem::path& path, const ComplexVector& v);
ComplexVector read_vector_csv(const std::filesystem::path& path);

/// Coherence structure file: JSON {"groups": [[0], [1, 3], [2, 4]]}.
void write_coherence_json(const std::filesystem::path& path, const CoherenceStructure& s);
CoherenceStructure read_coherence_json(const std::filesystem::path& path);

}  // namespace phaseret
