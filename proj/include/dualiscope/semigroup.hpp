#pragma once

#include <vector>

#include "dualiscope/generator.hpp"

namespace dualiscope {

// Row-stochastic jump matrix P = I + G/Lambda in CSR form, Lambda >= max
// total out-rate. e^{tG} f is evaluated as a Poisson mixture of P^k f
// (uniformization), truncated once the remaining Poisson mass times |f|_inf
// is below the requested tolerance.
struct UniformizedOperator {
  int n = 0;
  std::vector<int> row_ptr;
  std::vector<int> col;
  std::vector<double> val;
  double lambda = 0;
};

UniformizedOperator uniformize(const GeneratorMatrix& G);

struct SemigroupResult {
  std::vector<double> values;
  double truncation_error = 0;  // certified sup-norm bound
  long terms = 0;
};

// y = P x. The reference kernel is the plain serial loop kept as the
// testing oracle; the parallel kernel splits rows across threads and is
// bitwise identical to it for any thread count.
void spmv_reference(const UniformizedOperator& P, const double* x, double* y);
void spmv(const UniformizedOperator& P, const double* x, double* y, int jobs);

SemigroupResult semigroup_apply(const UniformizedOperator& P,
                                const std::vector<double>& f, double t,
                                double eps, int jobs = 0);
SemigroupResult semigroup_apply(const GeneratorMatrix& G,
                                const std::vector<double>& f, double t,
                                double eps, int jobs = 0);

}  // namespace dualiscope
