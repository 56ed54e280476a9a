#include "moistpe/timeseries.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

namespace moistpe {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), ptr);
}

TimeseriesRow to_timeseries_row(long step, double time, const InvariantReport& r) {
  TimeseriesRow row;
  row.step = step;
  const auto& T = r[Scalar::T];
  const auto& qv = r[Scalar::Qv];
  const auto& qc = r[Scalar::Qc];
  const auto& qr = r[Scalar::Qr];
  row.values = {time,           T.min.value,  T.max.value,     qv.min.value,  qv.max.value,
                qc.min.value,   qc.max.value, qr.min.value,    qr.max.value,  r.u_l2_sq,
                r.t_l1,         r.energy,     r.dissipation,   r.div_residual, r.h_cancel_residual,
                r.q_sev_residual};
  return row;
}

bool append_timeseries(const TimeseriesRow& row, const std::filesystem::path& path) {
  if (!row.step) throw TimeseriesError("timeseries row is missing column 'step'");
  for (std::size_t n = 0; n < row.values.size(); ++n)
    if (!row.values[n])
      throw TimeseriesError("timeseries row is missing column '" + std::string(kTimeseriesColumns[n + 1]) + "'");

  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
  std::ofstream os(path, std::ios::app);
  if (!os) throw TimeseriesError("cannot open " + path.string());
  if (fresh) {
    for (std::size_t n = 0; n < kTimeseriesColumns.size(); ++n) os << (n ? "," : "") << kTimeseriesColumns[n];
    os << '\n';
  }
  bool flagged = false;
  os << *row.step;
  for (const auto& v : row.values) {
    flagged |= !std::isfinite(*v);
    os << ',' << format_double(*v);
  }
  os << '\n';
  if (!os) throw TimeseriesError("write failed for " + path.string());
  return flagged;
}

}  // namespace moistpe
