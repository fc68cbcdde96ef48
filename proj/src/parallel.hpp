#pragma once

#include <cstddef>
#include <exception>
#include <vector>

namespace gazesim::detail {

// OpenMP loop over [0, count) that carries exceptions out of the parallel
// region. When several iterations throw, the one with the lowest index wins,
// so the reported error does not depend on scheduling.
template <typename Body>
void parallel_for(std::ptrdiff_t count, Body&& body) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count > 0 ? count : 0));
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    try {
      body(k);
    } catch (...) {
      errors[static_cast<std::size_t>(k)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace gazesim::detail
