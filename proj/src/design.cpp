#include "design.hpp"

#include <string>

#include "likefarm/error.hpp"
#include "likefarm/simd/kernels.hpp"

namespace likefarm::detail {

int sign_of(const Label& label) {
  if (label.is_farm()) return 1;
  if (label.is_baseline()) return -1;
  throw InvalidArgument("training vectors must be labeled farm or baseline");
}

LabelKind kind_of(int sign) { return sign > 0 ? LabelKind::Farm : LabelKind::Baseline; }

void check_features(const std::vector<std::size_t>& features) {
  if (features.empty()) throw InvalidArgument("feature set is empty");
  std::vector<bool> seen(kFeatureCount, false);
  for (std::size_t f : features) {
    if (f >= kFeatureCount) throw InvalidArgument("feature index " + std::to_string(f) + " out of range");
    if (seen[f]) throw InvalidArgument("feature index " + std::to_string(f) + " repeated");
    seen[f] = true;
  }
}

void check_both_classes(std::span<const FeatureVector> vectors) {
  bool farm = false;
  bool baseline = false;
  for (const FeatureVector& v : vectors) {
    sign_of(v.label);
    farm = farm || v.label.is_farm();
    baseline = baseline || v.label.is_baseline();
  }
  if (!farm || !baseline) throw InvalidArgument("training data must contain both farm and baseline users");
}

std::vector<double> scaled_row(const Scaler& scaler, const std::vector<std::size_t>& features,
                               const FeatureVector& vector) {
  std::vector<double> row(features.size());
  for (std::size_t c = 0; c < features.size(); ++c) {
    row[c] = scaler.transform(features[c], vector.values[features[c]]);
  }
  return row;
}

std::vector<double> scaled_rows(const Scaler& scaler, const std::vector<std::size_t>& features,
                                std::span<const FeatureVector> vectors) {
  const std::size_t dim = features.size();
  std::vector<double> out(vectors.size() * dim);
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    for (std::size_t c = 0; c < dim; ++c) {
      out[i * dim + c] = scaler.transform(features[c], vectors[i].values[features[c]]);
    }
  }
  return out;
}

std::vector<double> pairwise_squared_distances(std::span<const double> a, std::size_t a_rows,
                                               std::span<const double> b, std::size_t b_rows,
                                               std::size_t dim) {
  const auto& kern = simd::active();
  std::vector<double> out(a_rows * b_rows);
  for (std::size_t i = 0; i < a_rows; ++i) {
    kern.squared_distances(a.data() + i * dim, b.data(), b_rows, dim, out.data() + i * b_rows);
  }
  return out;
}

}  // namespace likefarm::detail
