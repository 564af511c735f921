#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hestonfit/params.hpp"

namespace hestonfit {

struct Date {
    int year = 0, month = 0, day = 0;
    auto operator<=>(const Date&) const = default;
    std::string iso() const;
};

/// Dated close prices: strictly increasing dates, positive closes, n >= 2.
struct PriceSeries {
    std::vector<Date> dates;
    std::vector<double> closes;

    std::size_t size() const { return closes.size(); }
    void validate() const;
};

/// One non-overlapping centred-or-raw log-return series for a given lag.
struct ReturnPath {
    TimeLag tau;
    int path_index = 1;  // j in [1, tau]
    std::vector<double> returns;
    bool centred = false;
};

/// Per-lag trimming bounds, lower < 0 < upper.
struct TrimBounds {
    double lower = 0.0;
    double upper = 0.0;
    void validate() const;
};

struct TrimResult {
    std::vector<double> kept;
    std::size_t removed = 0;
};

/// Parse `date,close` delimiter-separated text (comma or tab), ISO-8601
/// dates, header required. Throws ParseError with the 1-based row number on
/// malformed rows, non-positive closes, or out-of-order dates.
PriceSeries parse_prices(std::istream& in);
PriceSeries parse_prices_file(const std::string& path);

/// Single overlapping series r_t = ln(P_{t+tau}/P_t), t = 1..n-tau.
std::vector<double> overlapping_returns(const PriceSeries& prices, TimeLag tau);

/// tau interleaved stride-tau series; path j starts at price j (1-based) and
/// has floor((n-j)/tau) returns, so no price interval is reused anywhere.
std::vector<ReturnPath> path_returns(const PriceSeries& prices, TimeLag tau);

TrimResult trim_returns(const std::vector<double>& series, const TrimBounds& bounds);

/// Subtract the sample mean (the per-lag estimator of mu*t).
std::vector<double> center_returns(const std::vector<double>& series);

/// Population-moment excess kurtosis m4/m2^2 - 3.
double excess_kurtosis(const std::vector<double>& series);

/// Fixed per-lag trimming table (lags 1..250); nullopt for other lags.
std::optional<TrimBounds> reference_trim_bounds(TimeLag tau);

} // namespace hestonfit
