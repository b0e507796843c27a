#pragma once

#include <vector>

#include "oracle.hpp"
#include "rdal/hypothesis.hpp"

namespace support {

inline rdal::HypothesisClass to_class(const oracle::Matrix& m) {
    std::vector<std::vector<rdal::Label>> rows;
    for (const auto& r : m) rows.emplace_back(r.begin(), r.end());
    return rdal::HypothesisClass(m.front().size(), rows);
}

inline std::vector<int> row_of(const rdal::HypothesisClass& cls, rdal::HypothesisIndex h) {
    auto r = cls.row(h);
    return std::vector<int>(r.begin(), r.end());
}

} // namespace support
