#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lipemb/fields.hpp"
#include "lipemb/hierarchy.hpp"
#include "lipemb/params.hpp"

namespace lipemb {

using Rational = boost::multiprecision::cpp_rational;

struct Interval {
  double lower = 0, upper = 1;
};

// Exact (Clopper-Pearson) two-sided interval.
Interval clopper_pearson(std::uint64_t successes, std::uint64_t trials, double confidence = 0.95);

struct ProbabilityEstimate {
  double point = 0;
  std::uint64_t trials = 0, successes = 0;
  double lower = 0, upper = 1;
  std::uint64_t seed = 0;
  double std_error() const;  // binomial standard error at the point estimate
};

ProbabilityEstimate make_estimate(std::uint64_t successes, std::uint64_t trials, std::uint64_t seed);

// Runs fn(i) for i in [0, n) on `workers` threads; fn must only write to slot i.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

// ---------------------------------------------------------------------------
// Level 0, exact.

struct ClassProbabilities {
  Rational good, zero, one;
};
ClassProbabilities y0_class_probabilities(std::int64_t M0);
double to_double(const Rational& r);

// values: X bits or Y0Class codes, one per cell of the component. Y side:
// product over cells of (good ? 1 : 1/2); X side: product of
// p_good + p_match(bit).
Rational exact_S0(Family f, const std::vector<std::uint8_t>& values, const ParameterSet& p);

ProbabilityEstimate estimate_S0(Family f, const std::vector<std::uint8_t>& values, const ParameterSet& p,
                                std::uint64_t trials, std::uint64_t seed, int workers = 1);

// Embedding probability of component `comp` at level j of h: fresh partner
// structures over the component's neighbourhood, success when the external
// buffers are not conjoined and embeds_level finds a witness.
ProbabilityEstimate estimate_S(const Hierarchy& h, int j, std::int32_t comp, std::uint64_t trials,
                               std::uint64_t seed, int workers = 1);

// ---------------------------------------------------------------------------
// Reports. Bounds are reported, never asserted.

struct SSample {
  Family family = Family::X;
  int level = 0;
  double s = 1;
  std::int64_t v = 1;
};

struct TailRow {
  Family family = Family::X;
  int level = 0;
  double x = 0;
  std::int64_t v = 1;
  std::uint64_t count = 0, total = 0;
  double empirical = 0;
  double log10_bound = 0;
  double ratio = 0;  // empirical / bound (inf when the bound underflows)
};

struct SizeRow {
  Family family = Family::X;
  int level = 0;
  std::int64_t v = 1;
  std::uint64_t count = 0, total = 0;
  double empirical = 0;
  double log10_bound = 0;
  double ratio = 0;
};

struct GoodSample {
  Family family = Family::X;
  int level = 0;
  bool good = false;
};

struct GoodRow {
  Family family = Family::X;
  int level = 0;
  std::uint64_t trials = 0, successes = 0;
  double frequency = 0, lower = 0, upper = 1;
  double log10_target_deficit = 0;  // log10 of L_j^-gamma
  double target = 1;
};

std::vector<double> default_x_grid(int j, const ParameterSet& p);
std::vector<TailRow> tail_report(const std::vector<SSample>& samples, const ParameterSet& p,
                                 const std::vector<double>& xs, std::int64_t vmax);
std::vector<SizeRow> size_report(const std::vector<SSample>& samples, const ParameterSet& p, std::int64_t vmax);
std::vector<GoodRow> good_prob_report(const std::vector<GoodSample>& samples, const ParameterSet& p);

inline constexpr int kReportSchemaVersion = 1;
std::string tail_csv(const std::vector<TailRow>& rows);
std::string size_csv(const std::vector<SizeRow>& rows);
std::string good_csv(const std::vector<GoodRow>& rows);
std::string tail_jsonl(const std::vector<TailRow>& rows);
std::string size_jsonl(const std::vector<SizeRow>& rows);
std::string good_jsonl(const std::vector<GoodRow>& rows);

// Samples from `windows` seeded hierarchies per family (trial i uses seed
// mix(seed, i)). Level >= 1 embedding probabilities use s_trials partner
// draws each and are skipped when s_trials is 0.
struct ReportSamples {
  std::vector<SSample> s;
  std::vector<GoodSample> good;
};
ReportSamples collect_report_samples(const ParameterSet& p, std::uint64_t seed, int depth, Rect top,
                                     std::uint64_t windows, std::uint64_t s_trials, int workers);

}  // namespace lipemb
