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

#include "market.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "error.hpp"
#include "util.hpp"

namespace tkgr::market {

std::string_view to_string(Direction d) {
  return d == Direction::kUp ? "UP" : "DOWN";
}

std::optional<Direction> parse_direction(std::string_view text) {
  if (text == "UP") return Direction::kUp;
  if (text == "DOWN") return Direction::kDown;
  return std::nullopt;
}

PriceSeries::PriceSeries(std::string ticker, std::vector<PricePoint> points)
    : ticker_(std::move(ticker)), points_(std::move(points)) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!(points_[i].adj_close > 0.0) || !std::isfinite(points_[i].adj_close)) {
      throw Error(ErrorCode::kInvariantViolation,
                  ticker_ + ": non-positive close on " + points_[i].date.iso());
    }
    if (i > 0 && !(points_[i - 1].date < points_[i].date)) {
      throw Error(ErrorCode::kInvariantViolation,
                  ticker_ + ": dates not strictly increasing at " +
                      points_[i].date.iso());
    }
  }
}

std::optional<std::size_t> PriceSeries::index_of(Date d) const {
  const auto it = std::lower_bound(
      points_.begin(), points_.end(), d,
      [](const PricePoint& p, Date v) { return p.date < v; });
  if (it == points_.end() || it->date != d) return std::nullopt;
  return static_cast<std::size_t>(it - points_.begin());
}

double forward_return(const PriceSeries& series, Date date, int horizon) {
  if (horizon < 1) {
    throw Error(ErrorCode::kInvalidArgument, "horizon must be positive");
  }
  const auto idx = series.index_of(date);
  if (!idx) {
    throw Error(ErrorCode::kMissingDate,
                series.ticker() + " has no close on " + date.iso());
  }
  const auto pts = series.points();
  if (*idx + horizon >= pts.size()) {
    throw Error(ErrorCode::kInsufficientHistory,
                series.ticker() + " lacks " + std::to_string(horizon) +
                    " trading day(s) after " + date.iso());
  }
  const double now = pts[*idx].adj_close;
  return (pts[*idx + horizon].adj_close - now) / now;
}

Label label(const PriceSeries& series, Date date, int horizon) {
  const double r = forward_return(series, date, horizon);
  return Label{series.ticker(), date, horizon, r, direction_of(r)};
}

LabelTable::LabelTable(std::vector<Label> labels, std::size_t skipped)
    : labels_(std::move(labels)), skipped_(skipped) {
  std::sort(labels_.begin(), labels_.end(), [](const Label& a, const Label& b) {
    return std::tie(a.ticker, a.date) < std::tie(b.ticker, b.date);
  });
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    index_.emplace(std::make_pair(labels_[i].ticker, labels_[i].date), i);
  }
}

const Label* LabelTable::find(std::string_view ticker, Date date) const {
  const auto it = index_.find(std::make_pair(std::string(ticker), date));
  return it == index_.end() ? nullptr : &labels_[it->second];
}

LabelTable label_table(std::span<const PriceSeries> series, DateRange range,
                       int horizon) {
  std::vector<Label> out;
  std::size_t skipped = 0;
  for (const auto& s : series) {
    const auto pts = s.points();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (!range.contains(pts[i].date)) continue;
      if (i + horizon >= pts.size()) {
        ++skipped;
        continue;
      }
      out.push_back(label(s, pts[i].date, horizon));
    }
  }
  return LabelTable(std::move(out), skipped);
}

nlohmann::ordered_json PriceIngestReport::to_json() const {
  nlohmann::ordered_json j;
  j["rows_accepted"] = rows_accepted;
  j["tickers"] = tickers;
  auto rej = nlohmann::ordered_json::array();
  for (const auto& r : rejected) {
    rej.push_back({{"line", r.line}, {"reason", r.reason}});
  }
  j["rejected"] = std::move(rej);
  auto extreme = nlohmann::ordered_json::array();
  for (const auto& m : extreme_moves) {
    extreme.push_back({{"ticker", m.ticker},
                       {"date", m.date.iso()},
                       {"daily_return", m.daily_return}});
  }
  j["extreme_moves"] = std::move(extreme);
  return j;
}

const PriceSeries* PriceData::find(std::string_view ticker) const {
  const auto it = std::lower_bound(
      series.begin(), series.end(), ticker,
      [](const PriceSeries& s, std::string_view t) { return s.ticker() < t; });
  if (it == series.end() || it->ticker() != ticker) return nullptr;
  return &*it;
}

namespace {

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::string_view trim_cr(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  return s;
}

}  // namespace

PriceData read_prices_csv(std::istream& is) {
  PriceData data;
  auto& report = data.report;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(is, line)) return data;
  ++line_no;
  if (trim_cr(line) != "ticker,date,adj_close") {
    throw ParseError(1, "expected header 'ticker,date,adj_close'");
  }
  struct Row {
    std::string ticker;
    PricePoint point;
    std::size_t line;
  };
  std::vector<Row> rows;
  while (std::getline(is, line)) {
    ++line_no;
    const auto text = trim_cr(line);
    if (text.empty()) continue;
    const auto cells = split_csv(text);
    if (cells.size() != 3 || cells[0].empty()) {
      report.rejected.push_back({line_no, "expected 3 cells"});
      continue;
    }
    try {
      const Date d = Date::parse(cells[1]);
      double close = 0.0;
      const auto [ptr, ec] = std::from_chars(
          cells[2].data(), cells[2].data() + cells[2].size(), close);
      if (ec != std::errc{} || ptr != cells[2].data() + cells[2].size()) {
        throw ParseError(0, "unparsable adj_close");
      }
      if (!(close > 0.0) || !std::isfinite(close)) {
        throw ParseError(0, "adj_close must be positive");
      }
      rows.push_back(Row{std::string(cells[0]), PricePoint{d, close}, line_no});
    } catch (const ParseError& ex) {
      report.rejected.push_back({line_no, ex.what()});
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::tie(a.ticker, a.point.date) < std::tie(b.ticker, b.point.date);
  });
  std::size_t i = 0;
  while (i < rows.size()) {
    std::size_t j = i;
    std::vector<PricePoint> pts;
    while (j < rows.size() && rows[j].ticker == rows[i].ticker) {
      if (!pts.empty() && pts.back().date == rows[j].point.date) {
        report.rejected.push_back({rows[j].line, "duplicate (ticker, date)"});
      } else {
        pts.push_back(rows[j].point);
      }
      ++j;
    }
    for (std::size_t k = 1; k < pts.size(); ++k) {
      const double r = (pts[k].adj_close - pts[k - 1].adj_close) /
                       pts[k - 1].adj_close;
      if (std::abs(r) > 0.5) {
        report.extreme_moves.push_back({rows[i].ticker, pts[k].date, r});
      }
    }
    report.rows_accepted += pts.size();
    data.series.emplace_back(rows[i].ticker, std::move(pts));
    i = j;
  }
  report.tickers = data.series.size();
  std::sort(report.rejected.begin(), report.rejected.end(),
            [](const auto& a, const auto& b) { return a.line < b.line; });
  return data;
}

PriceData read_prices_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return read_prices_csv(is);
}

void write_prices_csv(std::ostream& os, std::span<const PriceSeries> series) {
  os << "ticker,date,adj_close\n";
  for (const auto& s : series) {
    for (const auto& p : s.points()) {
      os << s.ticker() << ',' << p.date.iso() << ','
         << format_double(p.adj_close) << '\n';
    }
  }
}

}  // namespace tkgr::market
