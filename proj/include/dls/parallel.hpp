#pragma once

#include <exception>
#include <vector>

namespace dls {

enum class Execution { serial, parallel };

/// Calls f(i) for i in [0, n). In parallel mode the calls are spread over
/// OpenMP threads; an exception thrown by any call is rethrown after the loop
/// (the one from the lowest index, so failures are reproducible).
template <class F>
void for_each_index(int n, Execution execution, F&& f) {
  if (execution == Execution::serial) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    try {
      f(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace dls
