#include "salobj/report.hpp"

#include <algorithm>
#include <cstdio>

#include "csv.hpp"

namespace salobj {

void write_folds_csv(const ExperimentResult& result, const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  out << "fold,n_train,n_test,f,precision,recall,f_at_threshold\n";
  for (const auto& f : result.folds) {
    out << f.fold << ',' << f.n_train << ',' << f.n_test << ',' << f.score.f << ',' << f.score.precision << ','
        << f.score.recall << ',' << f.f_at_threshold << '\n';
  }
  out << "mean,,," << result.mean_f << ',' << result.mean_precision << ',' << result.mean_recall << ','
      << result.mean_f_at_threshold << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

void write_ksweep_csv(std::span<const KPoint> points, const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  out << "K,F\n";
  for (const auto& p : points) out << p.K << ',' << p.f << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

void write_text_table(std::ostream& out, const std::string& title, std::span<const std::string> columns,
                      std::span<const TableRow> rows) {
  std::size_t label_width = 10;
  for (const auto& r : rows) label_width = std::max(label_width, r.label.size());
  std::size_t col_width = 10;
  for (const auto& c : columns) col_width = std::max(col_width, c.size() + 2);

  out << title << '\n';
  const std::size_t total = label_width + columns.size() * col_width;
  out << std::string(total, '-') << '\n';
  out << std::string(label_width, ' ');
  for (const auto& c : columns) out << std::string(col_width - c.size(), ' ') << c;
  out << '\n' << std::string(total, '-') << '\n';
  for (const auto& r : rows) {
    out << r.label << std::string(label_width - r.label.size(), ' ');
    for (double v : r.values) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.4f", v);
      const std::string s = buf;
      out << std::string(col_width > s.size() ? col_width - s.size() : 1, ' ') << s;
    }
    out << '\n';
  }
  out << std::string(total, '-') << '\n';
}

} // namespace salobj
