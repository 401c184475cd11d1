#pragma once

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "salobj/pipeline.hpp"

namespace salobj {

/// `fold,n_train,n_test,f,precision,recall,f_at_threshold` plus a `mean` row.
void write_folds_csv(const ExperimentResult& result, const std::filesystem::path& path);

/// `K,F`
void write_ksweep_csv(std::span<const KPoint> points, const std::filesystem::path& path);

/// Fixed-width table: one row per algorithm, one column per dataset.
struct TableRow {
  std::string label;
  std::vector<double> values;
};

void write_text_table(std::ostream& out, const std::string& title, std::span<const std::string> columns,
                      std::span<const TableRow> rows);

} // namespace salobj
