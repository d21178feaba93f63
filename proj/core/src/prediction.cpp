#include "imcorrect/prediction.hpp"

#include <string>

#include "imcorrect/errors.hpp"
#include "imcorrect/parallel.hpp"

namespace imc {

namespace {

void check_dims(const InteractionMatrix& r, const MappingMatrix& w) {
  if (r.num_items() != w.dim()) {
    throw DimensionMismatchError(
        "interaction matrix has " + std::to_string(r.num_items()) +
        " items but mapping dim is " + std::to_string(w.dim()));
  }
}

}  // namespace

ScoreMatrix predict(const InteractionMatrix& r, const MappingMatrix& w) {
  check_dims(r, w);
  ScoreMatrix scores(r.num_users(), r.num_items());
  parallel_for(r.num_users(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t u = begin; u < end; ++u) {
      auto acc = scores.row(static_cast<Index>(u));
      for (Index i : r.row(static_cast<Index>(u))) {
        w.accumulate_row(i, acc);
      }
    }
  });
  return scores;
}

std::vector<double> predict_row(const InteractionMatrix& r,
                                const MappingMatrix& w, Index user) {
  check_dims(r, w);
  std::vector<double> acc(r.num_items(), 0.0);
  for (Index i : r.row(user)) w.accumulate_row(i, acc);
  return acc;
}

}  // namespace imc
