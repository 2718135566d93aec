/*
 * Copyright 2026 The tkgr Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "date.hpp"

namespace tkgr::market {

enum class Direction : std::uint8_t { kDown = 0, kUp = 1 };

std::string_view to_string(Direction d);
std::optional<Direction> parse_direction(std::string_view text);

struct PricePoint {
  Date date;
  double adj_close;
};

// Adjusted-close series. The dates present are the trading calendar.
class PriceSeries {
 public:
  // Throws Error{kInvariantViolation} unless dates strictly increase and
  // every close is positive.
  PriceSeries(std::string ticker, std::vector<PricePoint> points);

  const std::string& ticker() const { return ticker_; }
  std::span<const PricePoint> points() const { return points_; }
  std::optional<std::size_t> index_of(Date d) const;

 private:
  std::string ticker_;
  std::vector<PricePoint> points_;
};

// (close[t+h] - close[t]) / close[t], with t+h counted in trading days.
// Throws Error{kMissingDate} or Error{kInsufficientHistory}.
double forward_return(const PriceSeries& series, Date date, int horizon = 1);

struct Label {
  std::string ticker;
  Date date;
  int horizon = 1;
  double forward_return = 0.0;
  Direction direction = Direction::kDown;
};

// Zero return maps to DOWN.
constexpr Direction direction_of(double forward_return) {
  return forward_return > 0.0 ? Direction::kUp : Direction::kDown;
}

Label label(const PriceSeries& series, Date date, int horizon = 1);

class LabelTable {
 public:
  LabelTable() = default;
  LabelTable(std::vector<Label> labels, std::size_t skipped);

  std::span<const Label> labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  // Rows lacking an h-step successor inside the series.
  std::size_t skipped() const { return skipped_; }
  const Label* find(std::string_view ticker, Date date) const;

 private:
  std::vector<Label> labels_;  // (ticker, date) order
  std::map<std::pair<std::string, Date>, std::size_t, std::less<>> index_;
  std::size_t skipped_ = 0;
};

// One label per (ticker, date in range) with sufficient forward history.
LabelTable label_table(std::span<const PriceSeries> series, DateRange range,
                       int horizon = 1);

struct PriceIngestReport {
  std::size_t rows_accepted = 0;
  std::size_t tickers = 0;
  struct Rejected {
    std::size_t line;
    std::string reason;
  };
  std::vector<Rejected> rejected;
  // |daily return| > 50%; reported, never dropped.
  struct ExtremeMove {
    std::string ticker;
    Date date;
    double daily_return;
  };
  std::vector<ExtremeMove> extreme_moves;

  nlohmann::ordered_json to_json() const;
};

struct PriceData {
  std::vector<PriceSeries> series;  // ticker order
  PriceIngestReport report;

  const PriceSeries* find(std::string_view ticker) const;
};

// `ticker,date,adj_close` CSV with header. Rows may arrive in any order;
// unparsable rows, non-positive closes and repeated (ticker, date) pairs are
// rejected into the report. Throws ParseError on a wrong header.
PriceData read_prices_csv(std::istream& is);
// Throws Error{kIo} if the file cannot be opened.
PriceData read_prices_file(const std::filesystem::path& path);
void write_prices_csv(std::ostream& os, std::span<const PriceSeries> series);

}  // namespace tkgr::market
