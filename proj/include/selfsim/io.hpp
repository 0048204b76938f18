#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "selfsim/asymptotics.hpp"
#include "selfsim/classifier.hpp"
#include "selfsim/critical_search.hpp"
#include "selfsim/phase.hpp"
#include "selfsim/profile.hpp"

namespace selfsim::io {

using nlohmann::json;

// Shortest decimal text that reads back to the same double.
std::string fmt(double v);

// A CSV as written by this library: leading and trailing '#' lines, one
// header row, and data rows kept as text so that a rewrite is lossless.
struct Table {
  std::vector<std::string> leading_comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> trailing_comments;

  // Value of `key=` in the trailing comments, empty if absent.
  std::string trailer(const std::string& key) const;
  double number(std::size_t row, const std::string& column) const;
};

Table read_csv(std::istream& in);
void write_csv(std::ostream& out, const Table& t);
json table_to_json(const Table& t);

// meta: a "# generated ..." line is written first when non-empty.
Table profile_table(const Problem& pb, const ProfileTrajectory& traj, const std::string& meta);
Table phase_table(const PhaseTrajectory& traj, const std::string& meta);
Table sweep_table(const SweepResult& sweep, const std::string& meta);

json to_json(const ProblemParams& p);
json to_json(const DerivedConstants& c);
json to_json(const OriginExpansion& ex);
json to_json(const CriticalPointInfo& info);
json to_json(const ProfileClass& c, double A, double C);
json to_json(const SearchResult& r);

}  // namespace selfsim::io
