// Encodes two toy traces and prints their stacked Haar coefficient rows.

#include <chrono>
#include <iomanip>
#include <iostream>

#include "pvfp/pvfp.hpp"

namespace {

pvfp::Trace make_trace(const std::string& id, std::initializer_list<const char*> acts) {
    pvfp::Trace t;
    t.case_id = id;
    auto ts = pvfp::Timestamp{} + std::chrono::hours(24 * 20000);
    for (const char* a : acts) {
        t.events.push_back({a, id, ts, {}});
        ts += std::chrono::hours(1);
    }
    return t;
}

}  // namespace

int main() {
    pvfp::EventLog v1({make_trace("s1", {"e1", "e2", "e1", "e1"})});
    pvfp::EventLog v2({make_trace("s2", {"e1", "e2", "e3", "e1"})});
    const auto split = pvfp::make_split(v1, v2);
    const auto aug = pvfp::encode_split(split, pvfp::FeatureKind::Event);

    std::cout << "dwt(3, 5, 9, 1) =";
    const double x[] = {3, 5, 9, 1};
    for (double w : pvfp::haar_basis(2)->dwt(x).coeffs) std::cout << ' ' << w;
    std::cout << "\n\ncolumns:";
    for (std::size_t c = 0; c < aug.layout().columns(); ++c) std::cout << ' ' << aug.layout().column_name(c);
    std::cout << '\n';
    for (std::size_t i = 0; i < aug.rows(); ++i) {
        std::cout << "label " << aug.labels[i] << ":";
        for (double v : pvfp::densify(aug.row(i), aug.layout())) std::cout << ' ' << std::setw(5) << v;
        std::cout << '\n';
    }
}
