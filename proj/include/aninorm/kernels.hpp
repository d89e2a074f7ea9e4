#pragma once

#include <cstddef>
#include <exception>
#include <vector>

namespace aninorm {

enum class Execution { Serial, Parallel };

/// Evaluates eval(j, out) for j = 0..count-1, where out points at `width`
/// slots reserved for node j, and returns the count x width buffer.
///
/// The parallel path writes the same slots from an OpenMP loop, so callers
/// that reduce the buffer in node order get bit-identical results from both
/// paths. The first exception thrown by any node is rethrown after the loop.
template <class Eval>
std::vector<double> evaluate_nodes(std::size_t count, std::size_t width,
                                   Eval&& eval, Execution exec) {
  std::vector<double> buffer(count * width, 0.0);
  if (exec == Execution::Serial) {
    for (std::size_t j = 0; j < count; ++j) eval(j, buffer.data() + j * width);
    return buffer;
  }

  std::exception_ptr failure;
  const long long total = static_cast<long long>(count);
#pragma omp parallel for schedule(static)
  for (long long j = 0; j < total; ++j) {
    try {
      eval(static_cast<std::size_t>(j), buffer.data() + j * width);
    } catch (...) {
#pragma omp critical(aninorm_evaluate_nodes)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return buffer;
}

/// Column sums of a count x width buffer, accumulated in node order.
inline std::vector<double> column_sums(const std::vector<double>& buffer,
                                       std::size_t width) {
  std::vector<double> sums(width, 0.0);
  for (std::size_t j = 0; j < buffer.size(); j += width)
    for (std::size_t k = 0; k < width; ++k) sums[k] += buffer[j + k];
  return sums;
}

}  // namespace aninorm
