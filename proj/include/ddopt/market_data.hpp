#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ddopt/error.hpp"

namespace ddopt {

/// Asset-by-date price matrix with a per-day index-membership mask.
/// Immutable after loading; absent observations are stored as NaN.
class PricePanel {
 public:
  PricePanel() = default;

  PricePanel(std::vector<std::string> assets, std::vector<std::string> dates,
             std::vector<double> prices, std::vector<std::uint8_t> membership)
      : assets_(std::move(assets)),
        dates_(std::move(dates)),
        prices_(std::move(prices)),
        membership_(std::move(membership)) {
    validate();
  }

  std::size_t num_assets() const { return assets_.size(); }
  std::size_t num_dates() const { return dates_.size(); }

  const std::vector<std::string>& assets() const { return assets_; }
  const std::vector<std::string>& dates() const { return dates_; }

  double price(std::size_t asset, std::size_t date) const {
    return prices_[asset * dates_.size() + date];
  }
  bool is_member(std::size_t asset, std::size_t date) const {
    return membership_[asset * dates_.size() + date] != 0;
  }

  bool has_price(std::size_t asset, std::size_t date) const {
    double v = price(asset, date);
    return std::isfinite(v) && v > 0.0;
  }

  /// Checks the panel invariants; throws ValidationError on violation.
  void validate() const {
    if (prices_.size() != assets_.size() * dates_.size() ||
        membership_.size() != prices_.size()) {
      throw ValidationError("price panel: matrix shape does not match axes");
    }
    for (std::size_t t = 1; t < dates_.size(); ++t) {
      if (!(dates_[t - 1] < dates_[t])) {
        throw ValidationError("price panel: dates must be strictly increasing");
      }
    }
    for (std::size_t i = 0; i < assets_.size(); ++i) {
      for (std::size_t t = 0; t < dates_.size(); ++t) {
        if (is_member(i, t) && !(price(i, t) > 0.0)) {
          throw ValidationError("price panel: nonpositive price for member asset " +
                                assets_[i] + " on " + dates_[t]);
        }
      }
    }
  }

 private:
  std::vector<std::string> assets_;      // sorted lexicographically
  std::vector<std::string> dates_;       // sorted ascending, unique
  std::vector<double> prices_;           // row-major, NaN where absent
  std::vector<std::uint8_t> membership_; // same shape
};

/// Index level series on the same date axis as the panel slice it is
/// compared against.
struct IndexSeries {
  std::vector<std::string> dates;
  std::vector<double> values;
};

namespace detail {

inline std::string strip(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(strip(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_positive_real(const std::string& s, std::size_t line_no,
                                  const char* what) {
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ParseError(std::string("cannot parse ") + what + " '" + s + "'", line_no);
  }
  if (pos != s.size() || !std::isfinite(v)) {
    throw ParseError(std::string("cannot parse ") + what + " '" + s + "'", line_no);
  }
  return v;
}

}  // namespace detail

/// Loads a long-format CSV (`date,asset,price,member`; member optional,
/// defaulting to 1) into a validated PricePanel. Assets come out sorted
/// lexicographically, dates ascending. A (date,asset) pair may appear at
/// most once.
inline PricePanel load_panel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open price file: " + path);

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty price file: " + path);
  ++line_no;
  auto header = detail::split_csv_line(line);
  if (header.size() < 3 || header[0] != "date" || header[1] != "asset" ||
      header[2] != "price" || (header.size() == 4 && header[3] != "member") ||
      header.size() > 4) {
    throw ParseError("expected header 'date,asset,price[,member]'", line_no);
  }

  struct Obs {
    double price;
    bool member;
  };
  std::map<std::string, std::map<std::string, Obs>> by_asset;  // asset -> date -> obs
  std::vector<std::string> dates;

  while (std::getline(in, line)) {
    ++line_no;
    if (detail::strip(line).empty()) continue;
    auto fields = detail::split_csv_line(line);
    if (fields.size() != 3 && fields.size() != 4) {
      throw ParseError("expected 3 or 4 fields, got " + std::to_string(fields.size()),
                       line_no);
    }
    const std::string& date = fields[0];
    const std::string& asset = fields[1];
    if (date.empty() || asset.empty()) throw ParseError("empty date or asset id", line_no);
    double price = detail::parse_positive_real(fields[2], line_no, "price");
    bool member = true;
    if (fields.size() == 4) {
      if (fields[3] == "0")
        member = false;
      else if (fields[3] == "1")
        member = true;
      else
        throw ParseError("member flag must be 0 or 1, got '" + fields[3] + "'", line_no);
    }
    if (member && !(price > 0.0)) {
      throw ValidationError("nonpositive price " + fields[2] + " for member asset " +
                            asset + " on " + date);
    }
    auto& per_date = by_asset[asset];
    if (!per_date.emplace(date, Obs{price, member}).second) {
      throw ValidationError("duplicate (date, asset) pair: (" + date + ", " + asset + ")");
    }
    dates.push_back(date);
  }
  if (by_asset.empty()) throw ValidationError("price file has no data rows: " + path);

  std::sort(dates.begin(), dates.end());
  dates.erase(std::unique(dates.begin(), dates.end()), dates.end());

  std::vector<std::string> assets;
  assets.reserve(by_asset.size());
  for (const auto& [asset, _] : by_asset) assets.push_back(asset);  // map is sorted

  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> prices(assets.size() * dates.size(), nan);
  std::vector<std::uint8_t> membership(assets.size() * dates.size(), 0);
  for (std::size_t i = 0; i < assets.size(); ++i) {
    const auto& per_date = by_asset[assets[i]];
    for (std::size_t t = 0; t < dates.size(); ++t) {
      auto it = per_date.find(dates[t]);
      if (it != per_date.end()) {
        prices[i * dates.size() + t] = it->second.price;
        membership[i * dates.size() + t] = it->second.member ? 1 : 0;
      }
    }
  }
  return PricePanel(std::move(assets), std::move(dates), std::move(prices),
                    std::move(membership));
}

/// Loads a `date,value` CSV into an IndexSeries (values must be positive).
inline IndexSeries load_index_series(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open index file: " + path);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty index file: " + path);
  ++line_no;
  auto header = detail::split_csv_line(line);
  if (header.size() != 2 || header[0] != "date" || header[1] != "value") {
    throw ParseError("expected header 'date,value'", line_no);
  }
  IndexSeries out;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::strip(line).empty()) continue;
    auto fields = detail::split_csv_line(line);
    if (fields.size() != 2) throw ParseError("expected 2 fields", line_no);
    double v = detail::parse_positive_real(fields[1], line_no, "value");
    if (!(v > 0.0)) throw ValidationError("index level must be positive (line " +
                                          std::to_string(line_no) + ")");
    if (!out.dates.empty() && !(out.dates.back() < fields[0])) {
      throw ValidationError("index dates must be strictly increasing (line " +
                            std::to_string(line_no) + ")");
    }
    out.dates.push_back(fields[0]);
    out.values.push_back(v);
  }
  if (out.dates.empty()) throw ValidationError("index file has no data rows: " + path);
  return out;
}

/// Returns the T-column slice of `panel` ending at `end_index`, restricted to
/// assets that are index members on the slice's final date and have a full
/// positive price history over the slice. Member assets dropped for gappy
/// history are appended to `excluded` when given.
inline PricePanel window(const PricePanel& panel, std::size_t end_index, std::size_t T,
                         std::vector<std::string>* excluded = nullptr) {
  if (T == 0) throw std::out_of_range("window: T must be positive");
  if (end_index >= panel.num_dates()) throw std::out_of_range("window: end_index out of range");
  if (end_index + 1 < T) throw std::out_of_range("window: end_index < T-1");
  const std::size_t start = end_index + 1 - T;

  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < panel.num_assets(); ++i) {
    if (!panel.is_member(i, end_index)) continue;
    bool full = true;
    for (std::size_t t = start; t <= end_index; ++t) {
      if (!panel.has_price(i, t)) {
        full = false;
        break;
      }
    }
    if (full) {
      keep.push_back(i);
    } else if (excluded) {
      excluded->push_back(panel.assets()[i]);
    }
  }

  std::vector<std::string> assets;
  assets.reserve(keep.size());
  for (std::size_t i : keep) assets.push_back(panel.assets()[i]);
  std::vector<std::string> dates(panel.dates().begin() + static_cast<std::ptrdiff_t>(start),
                                 panel.dates().begin() + static_cast<std::ptrdiff_t>(end_index + 1));
  std::vector<double> prices(keep.size() * T);
  std::vector<std::uint8_t> membership(keep.size() * T);
  for (std::size_t k = 0; k < keep.size(); ++k) {
    for (std::size_t t = 0; t < T; ++t) {
      prices[k * T + t] = panel.price(keep[k], start + t);
      membership[k * T + t] = panel.is_member(keep[k], start + t) ? 1 : 0;
    }
  }
  return PricePanel(std::move(assets), std::move(dates), std::move(prices),
                    std::move(membership));
}

}  // namespace ddopt
