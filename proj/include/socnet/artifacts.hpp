// CSV tables written by the command-line front end. Every file starts with a
// '#' comment line naming the tool version, seed and configuration hash,
// followed by a column header and the rows.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "socnet/likelihood.hpp"
#include "socnet/netstate.hpp"
#include "socnet/nullstats.hpp"
#include "socnet/userclasses.hpp"

namespace socnet {

inline constexpr const char* kToolVersion = "0.1.0";

struct Provenance {
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
};

/// "%.10g"; NaN as "NA", infinities as "inf" / "-inf".
std::string format_number(double v);
std::string format_hash(std::uint64_t h);

/// In-memory table; cells are already formatted.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);

  void add_row(std::vector<std::string> cells);

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  /// Header comment, column line, rows.
  void write(std::ostream& out, const Provenance& prov) const;
  void write_file(const std::string& path, const Provenance& prov) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

std::string provenance_line(const Provenance& prov);

struct MechanismZByDegree {
  Mechanism mechanism = Mechanism::Grandparent;
  ZByDegree curve;
};

struct MechanismLyapunov {
  Mechanism mechanism = Mechanism::Grandparent;
  LyapunovCurve curve;
};

struct ModelCurve {
  std::string model;
  std::vector<CurvePoint> points;
};

CsvTable zreport_table(std::span<const ZReport> reports);
CsvTable z_by_k_table(std::span<const MechanismZByDegree> curves);
CsvTable lyapunov_table(std::span<const MechanismLyapunov> curves);
CsvTable rank_bias_table(std::span<const RankBias> biases);

CsvTable overlap_table(const MechanismOverlap& overlap);
CsvTable growth_table(const SummaryStats& stats);
/// Both distributions, with a row for degree 0.
CsvTable degree_table(const SummaryStats& stats);
CsvTable efficiency_table(const EfficiencyReport& report);
CsvTable efficiency_links_table(const EfficiencyReport& report);

/// Table 1 shape, best model first.
CsvTable fit_table(std::span<const FitResult> fits);
CsvTable curve_table(std::span<const ModelCurve> curves);
CsvTable surface_table(std::span<const CurvePoint> surface);

/// `labels` maps internal user ids to external ones; empty means identity.
CsvTable user_fits_table(std::span<const UserFit> fits, std::span<const std::uint64_t> labels = {});
CsvTable classes_table(const Clustering& clustering);
CsvTable cv_table(const Clustering& clustering);
CsvTable profiles_table(std::span<const ClassProfile> profiles);
CsvTable ternary_table(std::span<const UserFit> fits, const Clustering& clustering,
                       std::span<const std::uint64_t> labels = {});

}  // namespace socnet
