#pragma once

#include <complex>

namespace subdiff {

using cplx = std::complex<double>;

/// Where the right-hand side of a step is sampled in time.
///
/// `weighted_average` pairs (1-alpha/2) f(t_n) + (alpha/2) f(t_{n-1}),
/// `shifted_point` evaluates f(t_n - alpha*tau/2), `current_point` is f(t_n).
/// Starting weights follow the same choice.
enum class TimeSampling { weighted_average, shifted_point, current_point };

/// How levels 1..S are obtained when correction terms are active.
///
/// `coupled` solves the first S levels as one block system. `exact` copies
/// them from the exact solution, which must then be supplied.
enum class StartPolicy { coupled, exact };

const char* to_string(TimeSampling s);
const char* to_string(StartPolicy p);
TimeSampling parse_time_sampling(const char* name);
StartPolicy parse_start_policy(const char* name);

} // namespace subdiff
