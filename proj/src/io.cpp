#include "selfsim/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include "selfsim/errors.hpp"

namespace selfsim::io {

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string join(const std::vector<std::string>& cells) {
  std::string s;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) s += ',';
    s += cells[i];
  }
  return s;
}

json number_or_null(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

std::string Table::trailer(const std::string& key) const {
  const std::string tag = key + "=";
  for (const auto& c : trailing_comments) {
    const auto pos = c.find(tag);
    if (pos != std::string::npos) return c.substr(pos + tag.size());
  }
  return {};
}

double Table::number(std::size_t row, const std::string& column) const {
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == column) return std::strtod(rows.at(row).at(j).c_str(), nullptr);
  }
  throw ParameterError("column '" + column + "' not in table");
}

Table read_csv(std::istream& in) {
  Table t;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      (t.header.empty() ? t.leading_comments : t.trailing_comments).push_back(line);
      continue;
    }
    if (t.header.empty()) {
      t.header = split(line);
      continue;
    }
    if (!t.trailing_comments.empty()) {
      throw ParameterError("data row after trailing comment: " + line);
    }
    auto cells = split(line);
    if (cells.size() != t.header.size()) {
      throw ParameterError("row has " + std::to_string(cells.size()) + " cells, header has " +
                           std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  if (t.header.empty()) throw ParameterError("no CSV header found");
  return t;
}

void write_csv(std::ostream& out, const Table& t) {
  for (const auto& c : t.leading_comments) out << c << '\n';
  out << join(t.header) << '\n';
  for (const auto& r : t.rows) out << join(r) << '\n';
  for (const auto& c : t.trailing_comments) out << c << '\n';
}

json table_to_json(const Table& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    json o = json::object();
    for (std::size_t j = 0; j < t.header.size(); ++j) {
      char* end = nullptr;
      const double v = std::strtod(r[j].c_str(), &end);
      if (end && *end == '\0' && !r[j].empty()) {
        o[t.header[j]] = std::isfinite(v) ? json(v) : json(r[j]);
      } else {
        o[t.header[j]] = r[j];
      }
    }
    rows.push_back(std::move(o));
  }
  json meta = json::array();
  for (const auto& c : t.trailing_comments) meta.push_back(c);
  return {{"columns", t.header}, {"rows", rows}, {"trailer", meta}};
}

Table profile_table(const Problem& pb, const ProfileTrajectory& traj, const std::string& meta) {
  Table t;
  if (!meta.empty()) t.leading_comments.push_back("# " + meta);
  t.header = {"xi", "f", "fm_prime", "X", "Y", "Z"};
  for (const auto& s : traj.samples) {
    const PhasePair ph = profile_to_phase(pb, s);
    t.rows.push_back({fmt(s.xi), fmt(s.f), fmt(s.v), fmt(ph.chart1.X), fmt(ph.chart1.Y),
                      fmt(ph.chart1.Z)});
  }
  std::string trailer = std::string("# event=") + to_string(traj.terminal_event);
  if (traj.vanish_by_collapse) trailer += " vanish_by_collapse=1";
  if (traj.min_location) trailer += " min_location=" + fmt(*traj.min_location);
  t.trailing_comments.push_back(trailer);
  return t;
}

Table phase_table(const PhaseTrajectory& traj, const std::string& meta) {
  Table t;
  if (!meta.empty()) t.leading_comments.push_back("# " + meta);
  t.header = {"eta1", "x", "y", "z", "X", "Y", "Z"};
  for (const auto& s : traj.samples) {
    t.rows.push_back({fmt(s.eta1), fmt(s.x), fmt(s.y), fmt(s.z), fmt(s.X), fmt(s.Y), fmt(s.Z)});
  }
  std::string trailer = std::string("# omega_tag=") + to_string(traj.omega_tag);
  if (!traj.budget_reason.empty()) trailer += " reason=\"" + traj.budget_reason + "\"";
  t.trailing_comments.push_back(trailer);
  return t;
}

Table sweep_table(const SweepResult& sweep, const std::string& meta) {
  Table t;
  if (!meta.empty()) t.leading_comments.push_back("# " + meta);
  t.header = {"A", "C", "kind", "xi_end", "terminal_Y", "terminal_Z", "tail_slope"};
  for (const auto& e : sweep.entries) {
    const auto& d = e.result.diagnostics;
    t.rows.push_back({fmt(e.A), fmt(e.C), to_string(e.result.kind), fmt(d.xi_end),
                      fmt(d.terminal_Y), fmt(d.terminal_Z),
                      d.tail_slope_fit ? fmt(*d.tail_slope_fit) : std::string()});
  }
  t.trailing_comments.push_back(std::string("# ordering=") + (sweep.ordering_ok ? "ok" : "VIOLATED"));
  if (!sweep.ordering_ok) t.trailing_comments.push_back("# alarm=" + sweep.alarm);
  return t;
}

json to_json(const ProblemParams& p) {
  return {{"m", p.m}, {"p", p.p}, {"sigma", p.sigma}, {"dim", p.dim}};
}

json to_json(const DerivedConstants& c) {
  return {{"alpha", c.alpha},
          {"beta", c.beta},
          {"L", c.L},
          {"p_fujita", c.p_fujita},
          {"gamma0", c.gamma0},
          {"Z0", number_or_null(c.Z0)},
          {"K_sing", number_or_null(c.K_sing)},
          {"vss_integrable", c.vss_integrable},
          {"subcritical", c.subcritical}};
}

json to_json(const OriginExpansion& ex) {
  return {{"amplitude", ex.amplitude},
          {"order", ex.order},
          {"pme_coeffs", ex.pme_coeffs},
          {"sigma_term_coeff", ex.sigma_term_coeff}};
}

json to_json(const CriticalPointInfo& info) {
  json o;
  o["id"] = to_string(info.id);
  o["chart"] = info.chart == Chart::kFinite     ? "finite"
               : info.chart == Chart::kInfinite ? "infinite"
                                                : "poincare";
  if (info.gamma) o["gamma"] = *info.gamma;
  if (info.location) o["location"] = *info.location;
  if (info.jacobian) {
    o["jacobian"] = *info.jacobian;
    json ev = json::array();
    json vecs = json::array();
    for (int k = 0; k < 3; ++k) {
      ev.push_back({info.eigenvalues[k].real(), info.eigenvalues[k].imag()});
      json v = json::array();
      for (int i = 0; i < 3; ++i)
        v.push_back({info.eigenvectors[k][i].real(), info.eigenvectors[k][i].imag()});
      vecs.push_back(v);
    }
    o["eigenvalues"] = ev;
    o["eigenvectors"] = vecs;
  }
  o["stability"] = to_string(info.stability);
  o["profile_law"] = info.profile_law;
  o["notes"] = info.notes;
  return o;
}

json to_json(const ProfileClass& c, double A, double C) {
  const auto& d = c.diagnostics;
  json o = {{"A", A},
            {"C", C},
            {"kind", to_string(c.kind)},
            {"xi_end", d.xi_end},
            {"terminal_Y", d.terminal_Y},
            {"terminal_Z", d.terminal_Z},
            {"tail_slope_fit", number_or_null(d.tail_slope_fit)},
            {"min_location", number_or_null(d.min_location)},
            {"omega_tag", to_string(d.omega_tag)}};
  if (!d.note.empty()) o["note"] = d.note;
  return o;
}

json to_json(const SearchResult& r) {
  json hist = json::array();
  for (const auto& h : r.history) {
    hist.push_back({{"A", h.A},
                    {"kind", to_string(h.result.kind)},
                    {"predicate", h.predicate},
                    {"terminal_Y", h.result.diagnostics.terminal_Y},
                    {"terminal_Z", h.result.diagnostics.terminal_Z}});
  }
  json o = {{"target", to_string(r.target)},
            {"bracket", {r.lo, r.hi}},
            {"midpoint", r.midpoint},
            {"iterations", r.iterations},
            {"history", hist},
            {"warnings", r.warnings}};
  if (r.limit_kind) o["limit_kind"] = to_string(*r.limit_kind);
  json diag = json::object();
  switch (r.target) {
    case SearchTarget::kAStarLower:
      diag["p2_band_Y"] = number_or_null(r.p2_band_Y);
      diag["p2_band_ok"] = r.p2_band_ok;
      diag["interface_xi0"] = number_or_null(r.interface_xi0);
      diag["interface_C"] = number_or_null(r.interface_C);
      break;
    case SearchTarget::kAZero:
      diag["terminal_Z_lo"] = number_or_null(r.z_lo);
      diag["terminal_Z_hi"] = number_or_null(r.z_hi);
      diag["a_star_upper"] = number_or_null(r.a_star_upper);
      diag["gap"] = number_or_null(r.gap);
      diag["gap_uncertainty"] = number_or_null(r.gap_uncertainty);
      break;
    case SearchTarget::kAStarUpper:
      diag["min_location_hi"] = number_or_null(r.min_location_hi);
      diag["min_location_drift"] = number_or_null(r.min_location_drift);
      break;
  }
  o["terminal_diagnostics"] = diag;
  return o;
}

}  // namespace selfsim::io
