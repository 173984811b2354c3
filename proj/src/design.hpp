#pragma once

// Helpers shared by the learners: label coding, column selection and
// scaled design matrices.

#include <span>
#include <vector>

#include "likefarm/features.hpp"

namespace likefarm::detail {

/// +1 for Farm, -1 for Baseline; throws InvalidArgument otherwise.
int sign_of(const Label& label);
LabelKind kind_of(int sign);

/// Throws InvalidArgument for an empty, out-of-range or repeated index.
void check_features(const std::vector<std::size_t>& features);

/// Throws InvalidArgument unless both classes occur.
void check_both_classes(std::span<const FeatureVector> vectors);

std::vector<double> scaled_row(const Scaler& scaler, const std::vector<std::size_t>& features,
                               const FeatureVector& vector);

/// Row-major n x dim block of scaled rows.
std::vector<double> scaled_rows(const Scaler& scaler, const std::vector<std::size_t>& features,
                                std::span<const FeatureVector> vectors);

/// out[i * b_rows + j] = |a_i - b_j|^2 for row-major blocks.
std::vector<double> pairwise_squared_distances(std::span<const double> a, std::size_t a_rows,
                                               std::span<const double> b, std::size_t b_rows,
                                               std::size_t dim);

}  // namespace likefarm::detail
