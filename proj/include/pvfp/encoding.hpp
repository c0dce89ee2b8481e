#pragma once

// Trace encoding: binarization of a trace per feature unit (activity or
// directly-follows edge), Haar vectorization of each indicator series, and
// stacking into sparse design-matrix rows over a layout shared by both variants.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pvfp/csv.hpp"
#include "pvfp/error.hpp"
#include "pvfp/eventlog.hpp"
#include "pvfp/haar.hpp"

namespace pvfp {

enum class FeatureKind { Event, Edge };

struct FeatureUnit {
    FeatureKind kind = FeatureKind::Event;
    std::string source;
    std::string target;  // empty for Event units

    static FeatureUnit event(std::string activity) { return {FeatureKind::Event, std::move(activity), {}}; }
    static FeatureUnit edge(std::string from, std::string to) {
        return {FeatureKind::Edge, std::move(from), std::move(to)};
    }

    bool is_edge() const noexcept { return kind == FeatureKind::Edge; }

    // Report form: A  or  ('A', 'B')
    std::string label() const { return is_edge() ? "('" + source + "', '" + target + "')" : source; }
    // Column-header form: A  or  A->B
    std::string key() const { return is_edge() ? source + "->" + target : source; }

    auto operator<=>(const FeatureUnit&) const = default;
};

// 0-based positions where the unit occurs; for edges, the position of the source event.
inline std::vector<std::size_t> occurrences(const Trace& trace, const FeatureUnit& unit) {
    std::vector<std::size_t> pos;
    if (!unit.is_edge()) {
        for (std::size_t i = 0; i < trace.size(); ++i)
            if (trace.activity(i) == unit.source) pos.push_back(i);
    } else {
        for (std::size_t i = 0; i + 1 < trace.size(); ++i)
            if (trace.activity(i) == unit.source && trace.activity(i + 1) == unit.target) pos.push_back(i);
    }
    return pos;
}

inline bool contains(const Trace& trace, const FeatureUnit& unit) {
    if (!unit.is_edge()) {
        return std::any_of(trace.events.begin(), trace.events.end(),
                           [&](const Event& e) { return e.activity == unit.source; });
    }
    for (std::size_t i = 0; i + 1 < trace.size(); ++i)
        if (trace.activity(i) == unit.source && trace.activity(i + 1) == unit.target) return true;
    return false;
}

// Indicator series of `unit` over `trace`, zero-padded to `dim`.
// Event units span |trace| positions, edge units |trace| - 1.
inline TimeSeries binarize(const Trace& trace, const FeatureUnit& unit, std::size_t dim) {
    const std::size_t len = unit.is_edge() ? (trace.size() > 0 ? trace.size() - 1 : 0) : trace.size();
    if (dim < len)
        throw Error("binarize: dimension " + std::to_string(dim) + " shorter than required length " +
                    std::to_string(len));
    TimeSeries out{std::vector<double>(dim, 0.0), std::max<std::size_t>(len, 1)};
    for (std::size_t p : occurrences(trace, unit)) out.values[p] = 1.0;
    return out;
}

// Dense column order of a design matrix: unit-major, coefficient-minor.
class ColumnLayout {
public:
    ColumnLayout(std::vector<FeatureUnit> units, std::size_t dim) : units_(std::move(units)), dim_(dim) {
        for (std::size_t i = 0; i < units_.size(); ++i) {
            if (!index_.emplace(units_[i], static_cast<std::uint32_t>(i)).second)
                throw Error("duplicate feature unit '" + units_[i].key() + "' in layout");
        }
    }

    const std::vector<FeatureUnit>& units() const noexcept { return units_; }
    std::size_t dim() const noexcept { return dim_; }
    std::size_t columns() const noexcept { return units_.size() * dim_; }

    std::optional<std::uint32_t> index_of(const FeatureUnit& u) const {
        const auto it = index_.find(u);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    // "unit:index" with a 0-based coefficient index.
    std::string column_name(std::size_t col) const {
        return units_[col / dim_].key() + ":" + std::to_string(col % dim_);
    }

    bool operator==(const ColumnLayout& o) const { return units_ == o.units_ && dim_ == o.dim_; }

private:
    std::vector<FeatureUnit> units_;
    std::size_t dim_;
    std::map<FeatureUnit, std::uint32_t> index_;
};

// One design-matrix row. Only blocks of units occurring in the trace are stored,
// sorted by unit index; absent blocks are zero vectors.
struct StackedVector {
    std::string trace_ref;
    std::vector<std::pair<std::uint32_t, WaveletVector>> blocks;

    const WaveletVector* block(std::uint32_t unit_index) const {
        const auto it = std::lower_bound(blocks.begin(), blocks.end(), unit_index,
                                         [](const auto& b, std::uint32_t u) { return b.first < u; });
        return it != blocks.end() && it->first == unit_index ? &it->second : nullptr;
    }
    bool has(std::uint32_t unit_index) const { return block(unit_index) != nullptr; }

    bool operator==(const StackedVector&) const = default;
};

inline StackedVector encode_trace(const Trace& trace, const ColumnLayout& layout, const HaarBasis& basis) {
    if (basis.dim() != layout.dim())
        throw Error("encode_trace: basis dimension does not match layout dimension");
    StackedVector row{trace.case_id, {}};
    if (layout.units().empty()) return row;
    const bool edges = std::any_of(layout.units().begin(), layout.units().end(),
                                   [](const FeatureUnit& u) { return u.is_edge(); });
    const bool events = std::any_of(layout.units().begin(), layout.units().end(),
                                    [](const FeatureUnit& u) { return !u.is_edge(); });
    const std::size_t need = events ? trace.size() : trace.size() - 1;
    if (need > basis.dim())
        throw Error("encode_trace: trace '" + trace.case_id + "' longer than basis dimension");

    std::map<std::uint32_t, std::vector<double>> series;
    auto mark = [&](const FeatureUnit& u, std::size_t pos) {
        if (const auto idx = layout.index_of(u)) {
            auto& s = series[*idx];
            if (s.empty()) s.assign(basis.dim(), 0.0);
            s[pos] = 1.0;
        }
    };
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (events) mark(FeatureUnit::event(trace.activity(i)), i);
        if (edges && i + 1 < trace.size()) mark(FeatureUnit::edge(trace.activity(i), trace.activity(i + 1)), i);
    }
    row.blocks.reserve(series.size());
    for (auto& [idx, x] : series) row.blocks.emplace_back(idx, basis.dwt(x));
    return row;
}

// Convenience overload over an ad-hoc unit list.
inline StackedVector encode_trace(const Trace& trace, const std::vector<FeatureUnit>& units,
                                  const HaarBasis& basis) {
    return encode_trace(trace, ColumnLayout(units, basis.dim()), basis);
}

struct DesignMatrix {
    std::vector<StackedVector> rows;
    int variant_id = 1;
    std::shared_ptr<const ColumnLayout> layout;
};

inline DesignMatrix build_design(const EventLog& variant, std::shared_ptr<const ColumnLayout> layout,
                                 const HaarBasis& basis, int variant_id) {
    if (!layout) throw Error("build_design: missing column layout");
    DesignMatrix d{{}, variant_id, layout};
    d.rows.reserve(variant.size());
    for (const Trace& t : variant.traces()) d.rows.push_back(encode_trace(t, *layout, basis));
    return d;
}

inline std::vector<double> densify(const StackedVector& row, const ColumnLayout& layout) {
    std::vector<double> out(layout.columns(), 0.0);
    for (const auto& [idx, w] : row.blocks)
        std::copy(w.coeffs.begin(), w.coeffs.end(), out.begin() + static_cast<std::ptrdiff_t>(idx * layout.dim()));
    return out;
}

inline StackedVector sparsify(std::span<const double> dense, const ColumnLayout& layout, std::string trace_ref = {}) {
    if (dense.size() != layout.columns()) throw Error("sparsify: width does not match layout");
    StackedVector row{std::move(trace_ref), {}};
    for (std::size_t u = 0; u < layout.units().size(); ++u) {
        const auto block = dense.subspan(u * layout.dim(), layout.dim());
        if (std::any_of(block.begin(), block.end(), [](double v) { return v != 0.0; }))
            row.blocks.emplace_back(static_cast<std::uint32_t>(u),
                                    WaveletVector{std::vector<double>(block.begin(), block.end())});
    }
    return row;
}

// X = ( D1 | 1 ; D2 | 2 )
struct AugmentedDesignMatrix {
    DesignMatrix design1;
    DesignMatrix design2;
    std::vector<int> labels;

    std::size_t rows() const noexcept { return labels.size(); }
    const StackedVector& row(std::size_t i) const {
        return i < design1.rows.size() ? design1.rows[i] : design2.rows[i - design1.rows.size()];
    }
    const ColumnLayout& layout() const { return *design1.layout; }
    // Feature columns plus the label column.
    std::size_t logical_columns() const { return layout().columns() + 1; }
};

inline AugmentedDesignMatrix augment(DesignMatrix d1, DesignMatrix d2) {
    if (!d1.layout || !d2.layout || !(*d1.layout == *d2.layout))
        throw Error("augment: design matrices do not share a column layout");
    AugmentedDesignMatrix aug;
    aug.labels.assign(d1.rows.size(), 1);
    aug.labels.insert(aug.labels.end(), d2.rows.size(), 2);
    aug.design1 = std::move(d1);
    aug.design2 = std::move(d2);
    aug.design1.variant_id = 1;
    aug.design2.variant_id = 2;
    return aug;
}

// Candidate units: the universal alphabet, or every directly-follows pair seen
// in either variant. Sorted.
inline std::vector<FeatureUnit> enumerate_candidates(const VariantSplit& split, FeatureKind kind) {
    std::vector<FeatureUnit> out;
    if (kind == FeatureKind::Event) {
        for (const auto& a : split.universal_alphabet) out.push_back(FeatureUnit::event(a));
        return out;
    }
    std::set<FeatureUnit> edges;
    for (const EventLog* log : {&split.variant1, &split.variant2})
        for (const Trace& t : log->traces())
            for (std::size_t i = 0; i + 1 < t.size(); ++i)
                edges.insert(FeatureUnit::edge(t.activity(i), t.activity(i + 1)));
    out.assign(edges.begin(), edges.end());
    return out;
}

// Common layout for a split: one block per candidate, dimension = next power of
// two >= the longest trace in either variant.
inline std::shared_ptr<const ColumnLayout> make_layout(const VariantSplit& split, FeatureKind kind) {
    const std::size_t dim = std::size_t{1} << haar_exponent_for(std::max<std::size_t>(split.max_trace_len, 1));
    return std::make_shared<const ColumnLayout>(enumerate_candidates(split, kind), dim);
}

inline AugmentedDesignMatrix encode_split(const VariantSplit& split, FeatureKind kind) {
    auto layout = make_layout(split, kind);
    const auto basis = haar_basis(haar_exponent_for(layout->dim()));
    return augment(build_design(split.variant1, layout, *basis, 1), build_design(split.variant2, layout, *basis, 2));
}

// Dense CSV dump: case_id, label, then one "unit:index" column per feature.
inline void write_design_csv(const DesignMatrix& d, std::ostream& out) {
    const ColumnLayout& layout = *d.layout;
    out << "case_id,label";
    for (std::size_t c = 0; c < layout.columns(); ++c) {
        out << ',';
        csv::write_field(out, layout.column_name(c));
    }
    out << '\n';
    for (const auto& row : d.rows) {
        csv::write_field(out, row.trace_ref);
        out << ',' << d.variant_id;
        for (double v : densify(row, layout)) out << ',' << csv::number(v);
        out << '\n';
    }
}

}  // namespace pvfp
