#include "edcast/ml/encoding.hpp"

namespace edcast::ml {

Encoder::Encoder(const features::Schema& schema, CategoricalEncoding mode) {
    for (std::size_t i = 0; i < schema.size(); ++i) {
        const auto& f = schema.features[i];
        kinds_.push_back(f.kind);
        if (f.kind != features::FeatureKind::categorical) {
            columns_.push_back({i, 0, f.name});
            continue;
        }
        int first = mode == CategoricalEncoding::one_hot_drop_first ? 2 : 1;
        for (int level = first; level <= f.levels; ++level) {
            columns_.push_back({i, level, f.name + "=" + std::to_string(level)});
        }
    }
}

Eigen::MatrixXd Encoder::encode(const features::ModelMatrix& m) const {
    Eigen::MatrixXd X(static_cast<long>(m.rows()), static_cast<long>(columns_.size()));
    for (std::size_t c = 0; c < columns_.size(); ++c) {
        const auto& col = m.column(columns_[c].source);
        const int level = columns_[c].level;
        for (std::size_t r = 0; r < m.rows(); ++r) {
            X(static_cast<long>(r), static_cast<long>(c)) =
                level == 0 ? col[r] : (static_cast<int>(col[r]) == level ? 1.0 : 0.0);
        }
    }
    return X;
}

void Encoder::encode_row(const double* raw, double* out) const {
    for (std::size_t c = 0; c < columns_.size(); ++c) {
        const double v = raw[columns_[c].source];
        const int level = columns_[c].level;
        out[c] = level == 0 ? v : (static_cast<int>(v) == level ? 1.0 : 0.0);
    }
}

} // namespace edcast::ml
