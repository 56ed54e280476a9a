#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "moistpe/diagnostics.hpp"

namespace moistpe {

class TimeseriesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::array<std::string_view, 17> kTimeseriesColumns{
    "step",   "t",      "min_T",  "max_T", "min_qv",      "max_qv",       "min_qc",           "max_qc",
    "min_qr", "max_qr", "l2_u",   "l1_T",  "energy",      "dissipation",  "div_residual",     "H_cancel_residual",
    "Q_sev_residual"};

/// One CSV row. Every column is mandatory; values[n] corresponds to kTimeseriesColumns[n + 1].
struct TimeseriesRow {
  std::optional<long> step;
  std::array<std::optional<double>, 16> values{};
};

TimeseriesRow to_timeseries_row(long step, double time, const InvariantReport& report);

/// Appends one row, writing the header first when the file is new or empty.
/// Non-finite values are written as nan / inf / -inf and make the call return true.
/// Throws TimeseriesError when a column is missing or the file cannot be written.
bool append_timeseries(const TimeseriesRow& row, const std::filesystem::path& path);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double x);

}  // namespace moistpe
