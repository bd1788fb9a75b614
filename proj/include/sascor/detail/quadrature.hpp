#pragma once

#include <cstddef>

namespace sascor::detail {

// Composite Simpson rule with a fixed odd point count. Deterministic and
// cheap; the integrands here are smooth apart from top-hat edges, which the
// callers handle by integrating exactly over the transmission support.
template <typename F>
double simpson(F&& f, double a, double b, std::size_t points = 257) {
    if (b <= a) return 0.0;
    if (points % 2 == 0) ++points;
    const std::size_t n = points - 1;  // even interval count
    const double h = (b - a) / static_cast<double>(n);
    double acc = f(a) + f(b);
    for (std::size_t i = 1; i < n; ++i) {
        const double x = a + h * static_cast<double>(i);
        acc += f(x) * ((i % 2 == 1) ? 4.0 : 2.0);
    }
    return acc * h / 3.0;
}

}  // namespace sascor::detail
