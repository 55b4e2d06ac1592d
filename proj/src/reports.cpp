#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "lipemb/stats.hpp"

namespace lipemb {

namespace {

// log10 L_j without forming L_j, which overflows at the paper's constants.
double log10_L(int j, const ParameterSet& p) { return std::pow(p.alpha, j) * std::log10(static_cast<double>(p.L0)); }

double ratio_of(double empirical, double log10_bound) {
  const double bound = std::pow(10.0, log10_bound);
  if (bound == 0) return empirical == 0 ? 0 : std::numeric_limits<double>::infinity();
  return empirical / bound;
}

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// JSON has no infinities; they are written as strings.
nlohmann::json jnum(double v) {
  if (std::isfinite(v)) return v;
  return num(v);
}

using GroupKey = std::pair<int, int>;  // (family, level)

template <class Sample>
std::map<GroupKey, std::vector<const Sample*>> group(const std::vector<Sample>& samples) {
  std::map<GroupKey, std::vector<const Sample*>> g;
  for (const auto& s : samples) g[{static_cast<int>(s.family), s.level}].push_back(&s);
  return g;
}

}  // namespace

std::vector<double> default_x_grid(int j, const ParameterSet& p) {
  std::vector<double> xs = {1e-3, 1e-2, 1.0 / 32, 1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2};
  xs.push_back(1 - std::pow(10.0, -log10_L(j, p)));
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

std::vector<TailRow> tail_report(const std::vector<SSample>& samples, const ParameterSet& p,
                                 const std::vector<double>& xs, std::int64_t vmax) {
  std::vector<double> grid = xs;
  std::sort(grid.begin(), grid.end());
  std::vector<TailRow> rows;
  for (const auto& [key, list] : group(samples)) {
    std::vector<const SSample*> known;
    for (const SSample* s : list)
      if (!std::isnan(s->s)) known.push_back(s);
    if (known.empty()) continue;
    const int j = key.second;
    const double lL = log10_L(j, p);
    for (std::int64_t v = 1; v <= vmax; ++v)
      for (double x : (grid.empty() ? default_x_grid(j, p) : grid)) {
        TailRow r;
        r.family = static_cast<Family>(key.first);
        r.level = j;
        r.x = x;
        r.v = v;
        r.total = known.size();
        for (const SSample* s : known)
          if (s->s <= x && s->v >= v) ++r.count;
        r.empirical = static_cast<double>(r.count) / static_cast<double>(r.total);
        r.log10_bound = p.m_j(j) * std::log10(x) - p.beta * lL - p.gamma * static_cast<double>(v - 1) * lL;
        r.ratio = ratio_of(r.empirical, r.log10_bound);
        rows.push_back(r);
      }
  }
  return rows;
}

std::vector<SizeRow> size_report(const std::vector<SSample>& samples, const ParameterSet& p, std::int64_t vmax) {
  std::vector<SizeRow> rows;
  for (const auto& [key, list] : group(samples)) {
    const int j = key.second;
    for (std::int64_t v = 1; v <= vmax; ++v) {
      SizeRow r;
      r.family = static_cast<Family>(key.first);
      r.level = j;
      r.v = v;
      r.total = list.size();
      for (const SSample* s : list)
        if (s->v >= v) ++r.count;
      r.empirical = static_cast<double>(r.count) / static_cast<double>(r.total);
      r.log10_bound = -p.gamma * static_cast<double>(v - 1) * log10_L(j, p);
      r.ratio = ratio_of(r.empirical, r.log10_bound);
      rows.push_back(r);
    }
  }
  return rows;
}

std::vector<GoodRow> good_prob_report(const std::vector<GoodSample>& samples, const ParameterSet& p) {
  std::vector<GoodRow> rows;
  for (const auto& [key, list] : group(samples)) {
    GoodRow r;
    r.family = static_cast<Family>(key.first);
    r.level = key.second;
    r.trials = list.size();
    for (const GoodSample* s : list) r.successes += s->good ? 1 : 0;
    r.frequency = static_cast<double>(r.successes) / static_cast<double>(r.trials);
    const Interval ci = clopper_pearson(r.successes, r.trials);
    r.lower = ci.lower;
    r.upper = ci.upper;
    r.log10_target_deficit = -p.gamma * log10_L(r.level, p);
    r.target = 1 - std::pow(10.0, r.log10_target_deficit);
    rows.push_back(r);
  }
  return rows;
}

// ---------------------------------------------------------------------------

std::string tail_csv(const std::vector<TailRow>& rows) {
  std::ostringstream o;
  o << "# schema_version=" << kReportSchemaVersion << "\n";
  o << "family,level,x,v,count,total,empirical,log10_bound,ratio\n";
  for (const auto& r : rows)
    o << family_name(r.family) << ',' << r.level << ',' << num(r.x) << ',' << r.v << ',' << r.count << ','
      << r.total << ',' << num(r.empirical) << ',' << num(r.log10_bound) << ',' << num(r.ratio) << '\n';
  return o.str();
}

std::string size_csv(const std::vector<SizeRow>& rows) {
  std::ostringstream o;
  o << "# schema_version=" << kReportSchemaVersion << "\n";
  o << "family,level,v,count,total,empirical,log10_bound,ratio\n";
  for (const auto& r : rows)
    o << family_name(r.family) << ',' << r.level << ',' << r.v << ',' << r.count << ',' << r.total << ','
      << num(r.empirical) << ',' << num(r.log10_bound) << ',' << num(r.ratio) << '\n';
  return o.str();
}

std::string good_csv(const std::vector<GoodRow>& rows) {
  std::ostringstream o;
  o << "# schema_version=" << kReportSchemaVersion << "\n";
  o << "family,level,trials,successes,frequency,ci_lower,ci_upper,target,log10_target_deficit\n";
  for (const auto& r : rows)
    o << family_name(r.family) << ',' << r.level << ',' << r.trials << ',' << r.successes << ','
      << num(r.frequency) << ',' << num(r.lower) << ',' << num(r.upper) << ',' << num(r.target) << ','
      << num(r.log10_target_deficit) << '\n';
  return o.str();
}

std::string tail_jsonl(const std::vector<TailRow>& rows) {
  std::string out;
  for (const auto& r : rows) {
    nlohmann::ordered_json j{{"schema_version", kReportSchemaVersion},
                             {"report", "tail"},
                             {"family", family_name(r.family)},
                             {"level", r.level},
                             {"x", jnum(r.x)},
                             {"v", r.v},
                             {"count", r.count},
                             {"total", r.total},
                             {"empirical", jnum(r.empirical)},
                             {"log10_bound", jnum(r.log10_bound)},
                             {"ratio", jnum(r.ratio)}};
    out += j.dump() + "\n";
  }
  return out;
}

std::string size_jsonl(const std::vector<SizeRow>& rows) {
  std::string out;
  for (const auto& r : rows) {
    nlohmann::ordered_json j{{"schema_version", kReportSchemaVersion},
                             {"report", "size"},
                             {"family", family_name(r.family)},
                             {"level", r.level},
                             {"v", r.v},
                             {"count", r.count},
                             {"total", r.total},
                             {"empirical", jnum(r.empirical)},
                             {"log10_bound", jnum(r.log10_bound)},
                             {"ratio", jnum(r.ratio)}};
    out += j.dump() + "\n";
  }
  return out;
}

std::string good_jsonl(const std::vector<GoodRow>& rows) {
  std::string out;
  for (const auto& r : rows) {
    nlohmann::ordered_json j{{"schema_version", kReportSchemaVersion},
                             {"report", "good"},
                             {"family", family_name(r.family)},
                             {"level", r.level},
                             {"trials", r.trials},
                             {"successes", r.successes},
                             {"frequency", jnum(r.frequency)},
                             {"ci_lower", jnum(r.lower)},
                             {"ci_upper", jnum(r.upper)},
                             {"target", jnum(r.target)},
                             {"log10_target_deficit", jnum(r.log10_target_deficit)}};
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace lipemb
