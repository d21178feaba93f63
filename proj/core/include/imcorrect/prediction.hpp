#pragma once

#include <span>
#include <vector>

#include "imcorrect/interaction_matrix.hpp"
#include "imcorrect/mapping_matrix.hpp"

namespace imc {

// Dense matrix of predicted scores. Rows are users.
class ScoreMatrix {
 public:
  ScoreMatrix(Index num_users, Index num_items)
      : num_users_(num_users),
        num_items_(num_items),
        data_(static_cast<std::size_t>(num_users) * num_items, 0.0) {}

  Index num_users() const { return num_users_; }
  Index num_items() const { return num_items_; }

  double operator()(Index user, Index item) const {
    return data_[static_cast<std::size_t>(user) * num_items_ + item];
  }

  std::span<const double> row(Index user) const {
    return {data_.data() + static_cast<std::size_t>(user) * num_items_,
            num_items_};
  }
  std::span<double> row(Index user) {
    return {data_.data() + static_cast<std::size_t>(user) * num_items_,
            num_items_};
  }

 private:
  Index num_users_;
  Index num_items_;
  std::vector<double> data_;
};

// score[u][j] = sum_i r_ui * w_ij. Parallel over users.
ScoreMatrix predict(const InteractionMatrix& r, const MappingMatrix& w);

// One user's score row, independent of every other row.
std::vector<double> predict_row(const InteractionMatrix& r,
                                const MappingMatrix& w, Index user);

}  // namespace imc
