#pragma once

#include <lalm/solver.hpp>

#include <string>
#include <vector>

namespace lalm {

enum class TraceColumn { obj_gap, feas, kkt_stat, erg_obj_gap, erg_feas };

inline TraceColumn trace_column_from_string(const std::string& s) {
  if (s == "obj_gap") return TraceColumn::obj_gap;
  if (s == "feas") return TraceColumn::feas;
  if (s == "kkt_stat") return TraceColumn::kkt_stat;
  if (s == "erg_obj_gap") return TraceColumn::erg_obj_gap;
  if (s == "erg_feas") return TraceColumn::erg_feas;
  throw InvalidArgument("unknown trace column '" + s + "'");
}

inline std::optional<double> column_value(const TraceRecord& r, TraceColumn c) {
  switch (c) {
    case TraceColumn::obj_gap: return r.obj_gap;
    case TraceColumn::feas: return r.feas;
    case TraceColumn::kkt_stat: return r.kkt_stat;
    case TraceColumn::erg_obj_gap: return r.erg_obj_gap;
    case TraceColumn::erg_feas: return r.erg_feas;
  }
  return std::nullopt;
}

inline constexpr std::size_t kMinRateSamples = 10;

/// Least-squares slope of log(value) against log(epoch) over epochs in
/// [lo, hi].  Nonpositive, non-finite or missing values and epoch 0 are
/// dropped; fewer than kMinRateSamples survivors is an error.
inline double rate_fit(const std::vector<double>& epochs, const std::vector<double>& values, double lo, double hi) {
  require(epochs.size() == values.size(), "rate_fit: epochs and values differ in length");
  require(lo <= hi, "rate_fit: empty epoch window");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    const double e = epochs[i], v = values[i];
    if (e < lo || e > hi || e <= 0.0 || !(v > 0.0) || !std::isfinite(v)) continue;
    lx.push_back(std::log(e));
    ly.push_back(std::log(v));
  }
  if (lx.size() < kMinRateSamples) {
    throw InvalidArgument("rate_fit: " + std::to_string(lx.size()) + " usable samples in window, need " +
                          std::to_string(kMinRateSamples));
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) throw InvalidArgument("rate_fit: window holds a single epoch");
  return sxy / sxx;
}

inline double rate_fit(const std::vector<TraceRecord>& trace, TraceColumn column, double lo, double hi) {
  std::vector<double> epochs, values;
  for (const auto& r : trace) {
    const auto v = column_value(r, column);
    if (!v) continue;
    epochs.push_back(static_cast<double>(r.epoch));
    values.push_back(*v);
  }
  return rate_fit(epochs, values, lo, hi);
}

}  // namespace lalm
