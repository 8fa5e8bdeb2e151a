#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>

namespace loopsec {

struct Bracket {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t iterations = 0;
};

/// Bisection on a monotone predicate: `pred(lo)` is false, `pred(hi)` is true.
/// Stops when hi - lo <= rel_tol * hi or after max_iter halvings.
/// The caller picks which side to keep; `hi` is the side satisfying `pred`.
template <std::predicate<double> Pred>
Bracket bisect_predicate(Pred&& pred, double lo, double hi, double rel_tol, std::size_t max_iter = 400) {
    Bracket b{lo, hi, 0};
    while (b.hi - b.lo > rel_tol * std::abs(b.hi) && b.iterations < max_iter) {
        const double mid = 0.5 * (b.lo + b.hi);
        if (mid <= b.lo || mid >= b.hi) {
            break;
        }
        if (pred(mid)) {
            b.hi = mid;
        } else {
            b.lo = mid;
        }
        ++b.iterations;
    }
    return b;
}

} // namespace loopsec
