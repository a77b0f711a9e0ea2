#pragma once

#include "cutfem/analysis.hpp"

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cutfem {

/// Columns of a convergence study: l2, h1, h2, energy.
constexpr int num_norms = 4;
using NormRow = std::array<std::optional<double>, num_norms>;

/// Overrides of the built-in case parameters; unset fields keep the defaults.
struct StudyOptions
{
    int levels = 0; // 0: case default
    std::optional<double> beta;
    std::optional<double> gamma;
    std::optional<int> order;
    std::optional<int> depth;
    std::optional<double> eps;
};

struct LevelRecord
{
    double h = 0.0;
    int nno = 0;
    int dofs_full = 0;
    int dofs_reduced = 0;
    NormRow errors; // energy column holds sqrt(a_Omega(e, e))
    std::optional<double> cond_est;
};

struct Study
{
    std::string name;
    std::vector<LevelRecord> rows;
    NormRow expected_rates;
    std::vector<NormRow> eoc; // eoc[i] between rows i and i + 1
    std::vector<std::pair<std::string, std::string>> metadata;

    void add(const std::string& key, const std::string& value) { metadata.emplace_back(key, value); }
    std::optional<std::string> find(const std::string& key) const;
};

struct Criterion
{
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

const std::vector<std::string>& study_names();

/// Runs a built-in case. Throws std::invalid_argument for an unknown case or fewer than two levels.
Study run_study(const std::string& name, const StudyOptions& options = {});

/// Acceptance thresholds that apply to the case.
std::vector<Criterion> check_study(const Study& study);

/// Max pointwise errors of the four patch problems: poisson, interface, biharmonic, triharmonic.
struct PatchResult
{
    std::string name;
    double max_error = 0.0;
};
std::vector<PatchResult> patch_tests();
Criterion check_patch_tests(const std::vector<PatchResult>& results);

/// Number formatting shared by all text artifacts.
std::string format_number(double x);

} // namespace cutfem
