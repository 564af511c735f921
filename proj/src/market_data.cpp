#include "hestonfit/market_data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <sstream>

#include "hestonfit/errors.hpp"

namespace hestonfit {

namespace {

std::string trim_ws(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool split2(const std::string& line, std::string& a, std::string& b) {
    std::size_t pos = line.find(',');
    if (pos == std::string::npos) pos = line.find('\t');
    if (pos == std::string::npos) return false;
    a = trim_ws(line.substr(0, pos));
    b = trim_ws(line.substr(pos + 1));
    return true;
}

bool parse_date(const std::string& s, Date& d) {
    // ISO-8601 calendar date: YYYY-MM-DD
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    auto num = [](const char* b, const char* e, int& out) {
        auto [p, ec] = std::from_chars(b, e, out);
        return ec == std::errc() && p == e;
    };
    const char* c = s.data();
    if (!num(c, c + 4, d.year) || !num(c + 5, c + 7, d.month) || !num(c + 8, c + 10, d.day))
        return false;
    return d.month >= 1 && d.month <= 12 && d.day >= 1 && d.day <= 31;
}

} // namespace

std::string Date::iso() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

void PriceSeries::validate() const {
    if (dates.size() != closes.size())
        throw ParseError("PriceSeries: dates/closes length mismatch");
    if (size() < 2) throw ParseError("PriceSeries: need at least 2 prices");
    for (std::size_t i = 0; i < size(); ++i) {
        if (!(closes[i] > 0.0) || !std::isfinite(closes[i]))
            throw ParseError("PriceSeries: non-positive close at index " + std::to_string(i));
        if (i > 0 && !(dates[i - 1] < dates[i]))
            throw ParseError("PriceSeries: dates not strictly increasing at index " +
                             std::to_string(i));
    }
}

void TrimBounds::validate() const {
    if (!(lower < 0.0 && 0.0 < upper))
        throw DomainError("TrimBounds: require lower < 0 < upper");
}

PriceSeries parse_prices(std::istream& in) {
    PriceSeries out;
    std::string line;
    std::size_t row = 0;

    if (!std::getline(in, line)) throw ParseError("row 1: missing header");
    ++row;
    std::string h1, h2;
    if (!split2(line, h1, h2)) throw ParseError("row 1: header must be 'date,close'");
    auto lower = [](std::string s) {
        std::transform(s.begin(), s.end(), s.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        return s;
    };
    if (lower(h1) != "date" || lower(h2) != "close")
        throw ParseError("row 1: header must be 'date,close', got '" + line + "'");

    while (std::getline(in, line)) {
        ++row;
        if (trim_ws(line).empty()) continue;
        std::string ds, cs;
        if (!split2(line, ds, cs))
            throw ParseError("row " + std::to_string(row) + ": expected 'date,close'");
        Date d;
        if (!parse_date(ds, d))
            throw ParseError("row " + std::to_string(row) + ": bad ISO-8601 date '" + ds + "'");
        double close = 0.0;
        try {
            std::size_t used = 0;
            close = std::stod(cs, &used);
            if (used != cs.size()) throw std::invalid_argument("trailing junk");
        } catch (const std::exception&) {
            throw ParseError("row " + std::to_string(row) + ": bad close '" + cs + "'");
        }
        if (!(close > 0.0) || !std::isfinite(close))
            throw ParseError("row " + std::to_string(row) + ": close must be > 0, got " + cs);
        if (!out.dates.empty() && !(out.dates.back() < d))
            throw ParseError("row " + std::to_string(row) + ": dates not strictly increasing ('" +
                             out.dates.back().iso() + "' then '" + d.iso() + "')");
        out.dates.push_back(d);
        out.closes.push_back(close);
    }
    if (out.size() < 2)
        throw ParseError("need at least 2 price rows, got " + std::to_string(out.size()));
    return out;
}

PriceSeries parse_prices_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open price file '" + path + "'");
    return parse_prices(in);
}

std::vector<double> overlapping_returns(const PriceSeries& prices, TimeLag tau) {
    tau.validate();
    const std::size_t n = prices.size();
    const std::size_t t = static_cast<std::size_t>(tau.tau);
    if (n <= t)
        throw DomainError("overlapping_returns: need n > tau (n=" + std::to_string(n) +
                          ", tau=" + std::to_string(tau.tau) + ")");
    std::vector<double> out(n - t);
    for (std::size_t i = 0; i + t < n; ++i)
        out[i] = std::log(prices.closes[i + t] / prices.closes[i]);
    return out;
}

std::vector<ReturnPath> path_returns(const PriceSeries& prices, TimeLag tau) {
    tau.validate();
    const std::size_t n = prices.size();
    const std::size_t t = static_cast<std::size_t>(tau.tau);
    if (n < 2 * t)
        throw DomainError("path_returns: need n >= 2*tau (n=" + std::to_string(n) +
                          ", tau=" + std::to_string(tau.tau) + ")");
    std::vector<ReturnPath> paths;
    paths.reserve(t);
    for (std::size_t j = 1; j <= t; ++j) {
        ReturnPath path;
        path.tau = tau;
        path.path_index = static_cast<int>(j);
        const std::size_t m = (n - j) / t;  // full strides from price index j (1-based)
        path.returns.reserve(m);
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t a = j - 1 + i * t;  // 0-based
            path.returns.push_back(std::log(prices.closes[a + t] / prices.closes[a]));
        }
        paths.push_back(std::move(path));
    }
    return paths;
}

TrimResult trim_returns(const std::vector<double>& series, const TrimBounds& bounds) {
    bounds.validate();
    TrimResult res;
    res.kept.reserve(series.size());
    for (double r : series) {
        if (r >= bounds.lower && r <= bounds.upper)
            res.kept.push_back(r);
        else
            ++res.removed;
    }
    return res;
}

std::vector<double> center_returns(const std::vector<double>& series) {
    if (series.empty()) throw DomainError("center_returns: empty series");
    const double mean =
        std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(series.size());
    std::vector<double> out(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) out[i] = series[i] - mean;
    return out;
}

double excess_kurtosis(const std::vector<double>& series) {
    const std::size_t n = series.size();
    if (n < 4) throw DomainError("excess_kurtosis: need at least 4 values");
    const double mean =
        std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
    double m2 = 0.0, m4 = 0.0;
    for (double r : series) {
        const double d = r - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m2 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);
    if (!(m2 > 0.0)) throw DomainError("excess_kurtosis: zero variance");
    return m4 / (m2 * m2) - 3.0;
}

std::optional<TrimBounds> reference_trim_bounds(TimeLag tau) {
    switch (tau.tau) {
        case 1: return TrimBounds{-0.04, 0.04};
        case 5: return TrimBounds{-0.08, 0.08};
        case 20: return TrimBounds{-0.13, 0.15};
        case 40: return TrimBounds{-0.17, 0.20};
        case 80: return TrimBounds{-0.18, 0.25};
        case 100: return TrimBounds{-0.20, 0.28};
        case 200: return TrimBounds{-0.22, 0.38};
        case 250: return TrimBounds{-0.22, 0.44};
        default: return std::nullopt;
    }
}

} // namespace hestonfit
