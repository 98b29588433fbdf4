#pragma once

#include "edcast/features/matrix.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace edcast::ml {

/// How categorical features become numeric columns.
enum class CategoricalEncoding {
    one_hot_drop_first,  // linear models: indicators for levels 2..L
    one_hot_full,        // distance-based models: indicators for levels 1..L
};

struct EncodedColumn {
    std::size_t source = 0;  // feature index in the schema
    int level = 0;           // categorical level, 0 for numeric/flag
    std::string name;
};

class Encoder {
public:
    Encoder(const features::Schema& schema, CategoricalEncoding mode);

    const std::vector<EncodedColumn>& columns() const { return columns_; }
    std::size_t size() const { return columns_.size(); }

    Eigen::MatrixXd encode(const features::ModelMatrix& m) const;
    void encode_row(const double* raw, double* out) const;

private:
    std::vector<EncodedColumn> columns_;
    std::vector<features::FeatureKind> kinds_;
};

} // namespace edcast::ml
