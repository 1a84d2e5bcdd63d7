#include "socnet/artifacts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace socnet {

std::string format_number(double v) {
  if (std::isnan(v)) return "NA";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v == 0.0 ? 0.0 : v);
  return buf;
}

std::string format_hash(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string provenance_line(const Provenance& prov) {
  return "# socnet " + std::string(kToolVersion) + " seed=" + std::to_string(prov.seed) +
         " config=" + format_hash(prov.config_hash);
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns_.size()) throw std::logic_error("csv row width does not match header");
  rows_.push_back(std::move(cells));
}

void CsvTable::write(std::ostream& out, const Provenance& prov) const {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  out << provenance_line(prov) << '\n';
  line(columns_);
  for (const auto& r : rows_) line(r);
}

void CsvTable::write_file(const std::string& path, const Provenance& prov) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write(out, prov);
  if (!out) throw std::runtime_error("write failed for " + path);
}

namespace {

std::string num(double v) { return format_number(v); }
std::string num(std::uint32_t v) { return std::to_string(v); }
std::string num(std::uint64_t v) { return std::to_string(v); }
std::string num(int v) { return std::to_string(v); }
std::string name(Mechanism m) { return std::string(to_string(m)); }

std::string label_of(UserId u, std::span<const std::uint64_t> labels) {
  return std::to_string(u < labels.size() ? labels[u] : std::uint64_t{u});
}

std::vector<std::string> box_cells(const BoxStats& b) {
  return {num(b.q1), num(b.median), num(b.mean), num(b.q3), num(b.p99)};
}

}  // namespace

CsvTable zreport_table(std::span<const ZReport> reports) {
  CsvTable t({"mechanism", "S", "E", "sigma", "z", "p_value", "n"});
  for (const auto& r : reports) {
    t.add_row({name(r.mechanism), num(r.observed), num(r.expected), num(r.sigma), r.z ? num(*r.z) : "NA",
               num(r.p_value), num(r.n_links_used)});
  }
  return t;
}

CsvTable z_by_k_table(std::span<const MechanismZByDegree> curves) {
  CsvTable t({"mechanism", "k_bin_lo", "k_bin_hi", "z", "n"});
  for (const auto& c : curves) {
    for (const auto& b : c.curve.bins) {
      t.add_row({name(c.mechanism), num(b.k_lo), num(b.k_hi), b.report.z ? num(*b.report.z) : "NA",
                 num(b.report.n_links_used)});
    }
  }
  return t;
}

CsvTable lyapunov_table(std::span<const MechanismLyapunov> curves) {
  CsvTable t({"mechanism", "n", "ratio"});
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < c.curve.n.size(); ++i) t.add_row({name(c.mechanism), num(c.curve.n[i]), num(c.curve.ratio[i])});
  }
  return t;
}

CsvTable rank_bias_table(std::span<const RankBias> biases) {
  CsvTable t({"mechanism", "pct_bin_lo", "pct_bin_hi", "density"});
  for (const auto& b : biases) {
    for (std::size_t i = 0; i < b.density.size(); ++i) {
      const double lo = static_cast<double>(i) * b.bin_width;
      t.add_row({name(b.mechanism), num(lo), num(std::min(100.0, lo + b.bin_width)), num(b.density[i])});
    }
  }
  return t;
}

CsvTable overlap_table(const MechanismOverlap& overlap) {
  CsvTable t({"set", "G", "O", "tri", "fraction"});
  for (int p = 0; p < 8; ++p) {
    std::string set;
    if (p & 1) set += "G";
    if (p & 2) set += set.empty() ? "O" : "&O";
    if (p & 4) set += set.empty() ? "tri" : "&tri";
    if (set.empty()) set = "none";
    t.add_row({set, num(p & 1 ? 1 : 0), num(p & 2 ? 1 : 0), num(p & 4 ? 1 : 0), num(overlap.pattern[p])});
  }
  t.add_row({"marginal_G", "1", "NA", "NA", num(overlap.grandparent)});
  t.add_row({"marginal_O", "NA", "1", "NA", num(overlap.origin)});
  t.add_row({"marginal_tri", "NA", "NA", "1", num(overlap.triadic)});
  t.add_row({"marginal_GuO", "NA", "NA", "NA", num(overlap.shortcut)});
  return t;
}

CsvTable growth_table(const SummaryStats& stats) {
  CsvTable t({"seq", "time", "users", "links", "posts", "reposts"});
  for (const auto& g : stats.growth) {
    t.add_row({num(g.seq), num(g.time), num(g.users), num(g.links), num(g.posts), num(g.reposts)});
  }
  return t;
}

CsvTable degree_table(const SummaryStats& stats) {
  CsvTable t({"degree", "bin_lo", "bin_hi", "users"});
  auto emit = [&](const char* which, std::uint64_t zero, const std::vector<DegreeBin>& bins) {
    t.add_row({which, "0", "0", num(zero)});
    for (const auto& b : bins) t.add_row({which, num(b.lo), num(b.hi), num(b.users)});
  };
  emit("in", stats.zero_in_degree, stats.in_degree);
  emit("out", stats.zero_out_degree, stats.out_degree);
  return t;
}

CsvTable efficiency_table(const EfficiencyReport& report) {
  CsvTable t({"group", "measure", "n", "q1", "median", "mean", "q3", "p99"});
  for (const auto& g : report.groups) {
    auto emit = [&](const char* measure, const std::optional<BoxStats>& b) {
      if (!b) return;
      auto cells = box_cells(*b);
      cells.insert(cells.begin(), {std::string(to_string(g.group)), measure, num(b->n)});
      t.add_row(std::move(cells));
    };
    emit("eta_seen", g.seen);
    emit("eta_repost", g.repost);
  }
  return t;
}

CsvTable efficiency_links_table(const EfficiencyReport& report) {
  CsvTable t({"link_index", "eta_seen", "eta_repost", "is_g", "is_o", "is_tri"});
  for (const auto& l : report.links) {
    t.add_row({num(l.link_index), num(l.eta_seen), num(l.eta_repost), num(int(l.is_g)), num(int(l.is_o)),
               num(int(l.is_tri))});
  }
  return t;
}

CsvTable fit_table(std::span<const FitResult> fits) {
  // Validates that every fit shares one context set.
  (void)model_comparison(fits);
  std::vector<const FitResult*> order;
  for (const auto& f : fits) order.push_back(&f);
  std::stable_sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->loglik > b->loglik; });

  CsvTable t({"strategy", "model", "p1", "p2", "p_random", "loglik", "grid_resolution", "boundary", "n_links"});
  for (const FitResult* f : order) {
    const std::size_t n = f->spec.components.size();
    const char* category = n == 0 ? "Baseline" : n == 1 ? "Single" : "Combined";
    t.add_row({category, f->spec.name(), n >= 1 ? num(f->params[0]) : "NA", n >= 2 ? num(f->params[1]) : "NA",
               num(f->p_random()), num(f->loglik), num(f->grid_resolution), num(int(f->boundary_flag)),
               num(f->n_links)});
  }
  return t;
}

CsvTable curve_table(std::span<const ModelCurve> curves) {
  CsvTable t({"model", "p", "logL"});
  for (const auto& c : curves) {
    for (const auto& p : c.points) t.add_row({c.model, num(p.p1), num(p.loglik)});
  }
  return t;
}

CsvTable surface_table(std::span<const CurvePoint> surface) {
  CsvTable t({"p1", "p2", "logL"});
  for (const auto& p : surface) t.add_row({num(p.p1), num(p.p2), num(p.loglik)});
  return t;
}

CsvTable user_fits_table(std::span<const UserFit> fits, std::span<const std::uint64_t> labels) {
  CsvTable t({"user", "n_links", "p_traffic", "p_structure", "p_random", "loglik"});
  for (const auto& f : fits) {
    t.add_row({label_of(f.user, labels), num(f.n_links), num(f.mix.traffic), num(f.mix.structure),
               num(f.mix.random), num(f.loglik)});
  }
  return t;
}

CsvTable classes_table(const Clustering& clustering) {
  CsvTable t({"class", "weight", "mean_p_traffic", "mean_p_structure", "mean_p_random", "n_members"});
  std::size_t total = 0;
  StrategyMix all{0.0, 0.0, 0.0};
  for (const auto& c : clustering.classes) {
    t.add_row({c.label, num(c.weight), num(c.mean_mix.traffic), num(c.mean_mix.structure), num(c.mean_mix.random),
               num(c.members.size())});
    const auto m = static_cast<double>(c.members.size());
    all.traffic += m * c.mean_mix.traffic;
    all.structure += m * c.mean_mix.structure;
    all.random += m * c.mean_mix.random;
    total += c.members.size();
  }
  if (total > 0) {
    const auto n = static_cast<double>(total);
    t.add_row({"All", "1", num(all.traffic / n), num(all.structure / n), num(all.random / n), num(total)});
  }
  return t;
}

CsvTable cv_table(const Clustering& clustering) {
  CsvTable t({"k", "cv_loglik_per_point", "se", "selected"});
  for (std::size_t i = 0; i < clustering.k_values.size(); ++i) {
    t.add_row({num(clustering.k_values[i]), num(clustering.cv_score[i]), num(clustering.cv_se[i]),
               num(int(clustering.k_values[i] == clustering.k))});
  }
  return t;
}

CsvTable profiles_table(std::span<const ClassProfile> profiles) {
  CsvTable t({"class", "feature", "q1", "median", "mean", "q3", "p99", "members", "low_confidence"});
  for (const auto& p : profiles) {
    for (const auto& f : p.features) {
      auto cells = box_cells(f.stats);
      cells.insert(cells.begin(), {p.label, f.feature});
      cells.push_back(num(p.members));
      cells.push_back(num(int(p.low_confidence)));
      t.add_row(std::move(cells));
    }
  }
  return t;
}

CsvTable ternary_table(std::span<const UserFit> fits, const Clustering& clustering,
                       std::span<const std::uint64_t> labels) {
  if (clustering.assignment.size() != fits.size()) {
    throw std::invalid_argument("ternary table: clustering does not match the fits");
  }
  CsvTable t({"user", "p_traffic", "p_structure", "p_random", "class"});
  for (std::size_t i = 0; i < fits.size(); ++i) {
    const auto& f = fits[i];
    t.add_row({label_of(f.user, labels), num(f.mix.traffic), num(f.mix.structure), num(f.mix.random),
               clustering.classes[static_cast<std::size_t>(clustering.assignment[i])].label});
  }
  return t;
}

}  // namespace socnet
