#include "pplla/types.hpp"

#include <algorithm>
#include <iterator>

namespace pplla {

IndexSet set_union(const IndexSet& a, const IndexSet& b) {
    IndexSet out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

IndexSet set_difference(const IndexSet& a, const IndexSet& b) {
    IndexSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

bool set_contains(const IndexSet& s, Index j) {
    return std::binary_search(s.begin(), s.end(), j);
}

IndexSet complement(const IndexSet& s, Index size) {
    IndexSet out;
    out.reserve(static_cast<std::size_t>(size));
    for (Index j = 0; j < size; ++j) {
        if (!set_contains(s, j)) out.push_back(j);
    }
    return out;
}

Vec gather(const Vec& v, const IndexSet& idx) {
    Vec out(static_cast<Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) out(static_cast<Index>(k)) = v(idx[k]);
    return out;
}

Mat gather_cols(const Mat& m, const IndexSet& idx) {
    Mat out(m.rows(), static_cast<Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) out.col(static_cast<Index>(k)) = m.col(idx[k]);
    return out;
}

Mat gather_block(const Mat& m, const IndexSet& rows, const IndexSet& cols) {
    Mat out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            out(static_cast<Index>(i), static_cast<Index>(j)) = m(rows[i], cols[j]);
        }
    }
    return out;
}

void scatter(Vec& dest, const IndexSet& idx, const Vec& values) {
    for (std::size_t k = 0; k < idx.size(); ++k) dest(idx[k]) = values(static_cast<Index>(k));
}

}  // namespace pplla
