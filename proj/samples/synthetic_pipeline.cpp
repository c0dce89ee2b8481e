// Plants one edge in variant 1 of a synthetic log, runs selection and prints
// the discriminatory units and the variant-1 fingerprint.

#include <iostream>

#include "pvfp/pvfp.hpp"

int main(int argc, char** argv) {
    const std::uint64_t seed = argc > 1 ? std::stoull(argv[1]) : 7;

    pvfp::PlantSpec spec;
    spec.n_traces_per_variant = 500;
    spec.seed = seed;
    spec.base_model = {{{"A", "B", "C", "X", "Y", "E"}, 4.0},
                       {{"A", "D", "B", "C", "E"}, 2.0},
                       {{"A", "C", "B", "D", "E"}, 2.0},
                       {{"A", "D", "E"}, 2.0}};
    spec.planted_edges = {{"X", "Y", 0.6, 0}};
    spec.planted_durations = {{"A", "D", 2.0, 4.0, 0.5}};
    const auto logs = pvfp::generate(spec);

    pvfp::SelectionConfig cfg;
    cfg.seed = seed;
    const auto split = pvfp::make_split(logs.variant1, logs.variant2);
    const auto report = pvfp::run_selection(split, cfg);

    std::cout << "discriminatory:";
    for (const auto& u : report.discriminatory_units()) std::cout << ' ' << u.label();
    std::cout << "\n\n";

    auto fp1 = pvfp::build_fingerprint(split.variant1, report.discriminatory_units(), 1);
    auto fp2 = pvfp::build_fingerprint(split.variant2, report.discriminatory_units(), 2);
    const auto durations = pvfp::annotate_durations(fp1, fp2, split.variant1, split.variant2, cfg.alpha);
    pvfp::write_durations_csv(durations, std::cout);
    std::cout << '\n' << pvfp::emit_dot(fp1);
}
