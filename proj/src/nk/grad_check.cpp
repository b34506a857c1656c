#include "mtlkd/nk/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace mtlkd::nk {

GradCheckResult grad_check(const LossFn& f, ParameterStore& store, double eps) {
  Gradients analytic;
  {
    Tape tape;
    Var loss = f(tape);
    analytic = tape.backward(loss, store);
  }
  auto eval = [&] {
    Tape tape(false);
    return static_cast<double>(f(tape).value().item());
  };
  GradCheckResult res;
  for (std::size_t p = 0; p < store.size(); ++p) {
    auto values = store[p].value.values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const Real saved = values[i];
      const double mid = eval();
      double numeric = 0.0;
      for (double h = eps, tries = 0; tries < 3; h *= 1e-2, ++tries) {
        values[i] = static_cast<Real>(saved + h);
        const double up = eval();
        values[i] = static_cast<Real>(saved - h);
        const double down = eval();
        values[i] = saved;
        numeric = (up - down) / (2 * h);
        const double right = (up - mid) / h, left = (mid - down) / h;
        if (std::abs(right - left) <= kKinkTolerance) break;
        if (tries == 0) ++res.kinks;
      }
      const double a = analytic[p][i];
      const double rel = std::abs(a - numeric) / std::max(1.0, std::abs(a));
      if (rel > res.max_rel_error) {
        res.max_rel_error = rel;
        res.worst_param = p;
        res.worst_index = i;
      }
      ++res.checked;
    }
  }
  return res;
}

}  // namespace mtlkd::nk
