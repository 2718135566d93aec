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

#include <chrono>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace tkgr {

// Calendar date at day granularity, stored as days since 1970-01-01.
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::int32_t days_since_epoch)
      : days_(days_since_epoch) {}

  static Date from_ymd(int year, unsigned month, unsigned day);
  // Strict ISO-8601 `YYYY-MM-DD`; throws ParseError otherwise.
  static Date parse(std::string_view text);

  std::string iso() const;
  constexpr std::int32_t days() const noexcept { return days_; }
  // 0 = Sunday ... 6 = Saturday.
  unsigned weekday() const;

  constexpr Date operator+(std::int32_t n) const { return Date(days_ + n); }
  constexpr Date operator-(std::int32_t n) const { return Date(days_ - n); }
  constexpr std::int32_t operator-(Date other) const {
    return days_ - other.days_;
  }

  friend constexpr auto operator<=>(Date, Date) = default;

 private:
  std::int32_t days_ = 0;
};

// Half-open interval [start, end).
struct DateRange {
  Date start;
  Date end;

  bool contains(Date d) const { return start <= d && d < end; }
  bool empty() const { return !(start < end); }
};

}  // namespace tkgr

template <>
struct std::hash<tkgr::Date> {
  std::size_t operator()(tkgr::Date d) const noexcept {
    return std::hash<std::int32_t>{}(d.days());
  }
};
