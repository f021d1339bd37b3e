#pragma once

#include <lalm/solver.hpp>

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace lalm {

inline constexpr const char* kTraceHeader =
    "method,epoch,obj,obj_gap,feas,kkt_stat,erg_obj_gap,erg_feas,eta_max,time_ms";

struct CsvOptions {
  bool timing = true;  ///< false leaves time_ms empty so traces compare byte for byte
};

namespace detail {

inline std::string csv_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_optional(const std::optional<double>& v) { return v ? csv_number(*v) : std::string(); }

}  // namespace detail

inline void write_trace_csv(std::ostream& out, const std::string& method, const std::vector<TraceRecord>& trace,
                            const CsvOptions& opt = {}) {
  out << kTraceHeader << '\n';
  for (const auto& r : trace) {
    out << method << ',' << r.epoch << ',' << detail::csv_number(r.obj) << ',' << detail::csv_optional(r.obj_gap)
        << ',' << detail::csv_number(r.feas) << ',' << detail::csv_number(r.kkt_stat) << ','
        << detail::csv_optional(r.erg_obj_gap) << ',' << detail::csv_optional(r.erg_feas) << ','
        << detail::csv_number(r.eta_max) << ',' << (opt.timing ? detail::csv_number(r.time_ms) : std::string())
        << '\n';
  }
}

inline std::string trace_csv(const std::string& method, const std::vector<TraceRecord>& trace,
                             const CsvOptions& opt = {}) {
  std::ostringstream out;
  write_trace_csv(out, method, trace, opt);
  return out.str();
}

inline void save_trace_csv(const std::string& path, const std::string& method, const std::vector<TraceRecord>& trace,
                           const CsvOptions& opt = {}) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_trace_csv(out, method, trace, opt);
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace lalm
