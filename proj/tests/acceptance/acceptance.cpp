// Runs the ten acceptance criteria and prints one line per criterion.
//
// Exit status is nonzero when any criterion fails, except those listed with
// --known-red; a known-red criterion that starts passing is also an error so
// the list cannot go stale.

#include "nonsmooth/validation.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    nonsmooth::ValidationOptions options;
    bool verbose = false;
    std::vector<int> known_red;
    app.add_flag("-v,--verbose", verbose, "Print every measured check");
    app.add_option("--known-red", known_red, "Criteria expected to fail")
        ->check(CLI::Range(1, 10));
    app.add_option("--seed", options.seed, "Seed for the randomized criteria");
    CLI11_PARSE(app, argc, argv);

    const auto report = nonsmooth::run_validation(options);
    if (verbose) std::cout << report.table() << '\n';

    int unexpected = 0;
    const auto& titles = nonsmooth::criterion_titles();
    for (std::size_t i = 0; i < titles.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        const bool ok = report.criterion_passed(id);
        const bool red = std::find(known_red.begin(), known_red.end(), id) != known_red.end();
        std::printf("[%s] criterion %2d: %s%s\n", ok ? "PASS" : "FAIL", id,
                    titles[i].c_str(), red ? " (known red)" : "");
        if (!ok) {
            for (const auto& c : report.checks) {
                if (c.criterion != id || c.pass) continue;
                if (c.relation == "in") {
                    std::printf("         %s: measured %.6g, required in [%.6g, %.6g]\n",
                                c.name.c_str(), c.measured, c.threshold, c.upper);
                } else {
                    std::printf("         %s: measured %.6g, required %s %.6g\n",
                                c.name.c_str(), c.measured, c.relation.c_str(), c.threshold);
                }
            }
        }
        if (ok == red) {
            ++unexpected;
            if (ok) std::printf("         criterion %d passes but is listed as known red\n", id);
        }
    }
    return unexpected == 0 ? 0 : 1;
}
