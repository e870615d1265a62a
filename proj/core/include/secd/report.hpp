#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "secd/dispatch.hpp"

namespace secd {

struct ReportRun {
    DispatchResult result;
    std::optional<ValidationSeries> validation;

    /// "<scenario>_<mode>", the column and row label in every file.
    std::string label() const;
};

/// Writes hourly_costs.csv (slot plus one column per run),
/// violations.csv, temperatures.csv, pv_curtailment.csv and
/// summary.json into `out_dir`. Runs without a schedule appear only in
/// the summary. No timings are written, so equal inputs give equal
/// bytes. All files are rendered before any is written; an empty run
/// list or duplicate labels throw InvalidArgument and write nothing.
std::vector<std::filesystem::path> write_report(const std::vector<ReportRun>& runs, const std::filesystem::path& out_dir);

std::string hourly_costs_csv(const std::vector<ReportRun>& runs);
std::string violations_csv(const std::vector<ReportRun>& runs);
std::string temperatures_csv(const std::vector<ReportRun>& runs);
std::string pv_curtailment_csv(const std::vector<ReportRun>& runs);
std::string summary_json(const std::vector<ReportRun>& runs);

}  // namespace secd
