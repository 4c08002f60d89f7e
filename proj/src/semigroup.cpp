#include "dualiscope/semigroup.hpp"

#include <algorithm>
#include <cmath>

#include "dualiscope/errors.hpp"
#include "dualiscope/parallel.hpp"

namespace dualiscope {

UniformizedOperator uniformize(const GeneratorMatrix& G) {
  UniformizedOperator P;
  P.n = G.state_count();
  double max_out = 0;
  for (const auto& r : G.out_rate) max_out = std::max(max_out, to_double(r));
  // Nudge up so the uniformized diagonal 1 - out/lambda never rounds negative.
  P.lambda = max_out * (1.0 + 4e-16);
  P.row_ptr.assign(P.n + 1, 0);
  if (P.lambda == 0) {  // every state absorbing: P = I
    for (int i = 0; i < P.n; ++i) {
      P.row_ptr[i + 1] = i + 1;
      P.col.push_back(i);
      P.val.push_back(1.0);
    }
    return P;
  }
  for (int i = 0; i < P.n; ++i) {
    P.col.push_back(i);
    P.val.push_back(1.0 - to_double(G.out_rate[i]) / P.lambda);
    for (const auto& e : G.rows[i]) {
      P.col.push_back(e.to);
      P.val.push_back(to_double(e.rate) / P.lambda);
    }
    P.row_ptr[i + 1] = static_cast<int>(P.col.size());
  }
  return P;
}

void spmv_reference(const UniformizedOperator& P, const double* x, double* y) {
  for (int i = 0; i < P.n; ++i) {
    double acc = 0;
    for (int j = P.row_ptr[i]; j < P.row_ptr[i + 1]; ++j)
      acc += P.val[j] * x[P.col[j]];
    y[i] = acc;
  }
}

void spmv(const UniformizedOperator& P, const double* x, double* y, int jobs) {
#ifdef _OPENMP
  if (jobs > 1 && P.n >= 128) {
#pragma omp parallel for schedule(static) num_threads(jobs)
    for (int i = 0; i < P.n; ++i) {
      double acc = 0;
      for (int j = P.row_ptr[i]; j < P.row_ptr[i + 1]; ++j)
        acc += P.val[j] * x[P.col[j]];
      y[i] = acc;
    }
    return;
  }
#else
  (void)jobs;
#endif
  spmv_reference(P, x, y);
}

SemigroupResult semigroup_apply(const UniformizedOperator& P,
                                const std::vector<double>& f, double t,
                                double eps, int jobs) {
  if (eps <= 0) throw InvalidParameter("uniformization tolerance must be > 0");
  if (t < 0) throw InvalidParameter("negative time");
  if (static_cast<int>(f.size()) != P.n)
    throw InvalidConfig("function length does not match the state space");
  jobs = resolve_jobs(jobs);

  double norm_f = 0;
  for (double v : f) norm_f = std::max(norm_f, std::abs(v));

  SemigroupResult out;
  const double mu = P.lambda * t;
  if (mu == 0 || norm_f == 0) {
    out.values = f;
    out.terms = 1;
    return out;
  }

  // Poisson weights; the direct recurrence underflows past mu ~ 700, switch
  // to per-term log evaluation there. Truncation is certified through the
  // geometric tail bound sum_{j>k} w_j <= w_{k+1} / (1 - mu/(k+2)), valid
  // once k+2 > mu; a 1e-9 relative inflation covers the rounding of the
  // weight recurrence itself. (The alternative criterion "cumulative weight
  // >= 1 - eps/|f|" is unusable near 1e-14 where the partial sums stall.)
  const bool log_weights = mu > 700.0;
  double w = log_weights ? 0.0 : std::exp(-mu);
  auto weight_at = [&](long k) {
    return log_weights
               ? std::exp(-mu + k * std::log(mu) - std::lgamma(k + 1.0))
               : w;
  };

  std::vector<double> u = f, next(P.n), result(P.n, 0.0);
  const long k_cap =
      static_cast<long>(mu + 60.0 * std::sqrt(mu + 1.0) + 1000.0);
  long k = 0;
  double tail_bound = 1.0;
  while (true) {
    const double wk = weight_at(k);
    if (wk > 0)
      for (int i = 0; i < P.n; ++i) result[i] += wk * u[i];
    if (k + 2 > mu) {
      const double ratio = mu / (k + 2);
      const double w_next = log_weights ? weight_at(k + 1) : wk * mu / (k + 1);
      tail_bound = w_next / (1.0 - ratio) * (1.0 + 1e-9);
      if (tail_bound * norm_f <= eps) {
        ++k;
        break;
      }
    }
    ++k;
    if (k > k_cap)
      throw ResourceError("uniformization did not reach the tolerance");
    spmv(P, u.data(), next.data(), jobs);
    u.swap(next);
    if (!log_weights) w *= mu / k;
  }
  out.values = std::move(result);
  out.truncation_error = tail_bound * norm_f;
  out.terms = k;
  return out;
}

SemigroupResult semigroup_apply(const GeneratorMatrix& G,
                                const std::vector<double>& f, double t,
                                double eps, int jobs) {
  return semigroup_apply(uniformize(G), f, t, eps, jobs);
}

}  // namespace dualiscope
