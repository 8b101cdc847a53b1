#include "solarcast/series.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "solarcast/astro.hpp"
#include "solarcast/error.hpp"

namespace solarcast {

namespace chr = std::chrono;

namespace {

constexpr int kHours = SeriesLayout::hours_per_day;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    cells.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

template <typename T>
bool parse_int(std::string_view s, T& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

// Minutes since the epoch plus an explicit UTC offset (minutes) when present.
struct ParsedTime {
  long long minutes = 0;
  bool has_offset = false;
  int offset_minutes = 0;
};

bool parse_timestamp(std::string_view s, ParsedTime& out) {
  // YYYY-MM-DD[T ]HH:MM[:SS][Z|+HH:MM|-HH:MM]
  if (s.size() < 16 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') || s[13] != ':')
    return false;
  int y = 0;
  unsigned mo = 0, d = 0;
  int hh = 0, mm = 0, ss = 0;
  if (!parse_int(s.substr(0, 4), y) || !parse_int(s.substr(5, 2), mo) || !parse_int(s.substr(8, 2), d) ||
      !parse_int(s.substr(11, 2), hh) || !parse_int(s.substr(14, 2), mm))
    return false;
  std::string_view rest = s.substr(16);
  if (!rest.empty() && rest.front() == ':') {
    if (rest.size() < 3 || !parse_int(rest.substr(1, 2), ss)) return false;
    rest.remove_prefix(3);
    if (!rest.empty() && rest.front() == '.') {
      rest.remove_prefix(1);
      while (!rest.empty() && rest.front() >= '0' && rest.front() <= '9') rest.remove_prefix(1);
    }
  }
  if (!rest.empty()) {
    if (rest == "Z") {
      out.has_offset = true;
      out.offset_minutes = 0;
    } else if ((rest.front() == '+' || rest.front() == '-') && rest.size() == 6 && rest[3] == ':') {
      int oh = 0, om = 0;
      if (!parse_int(rest.substr(1, 2), oh) || !parse_int(rest.substr(4, 2), om)) return false;
      out.has_offset = true;
      out.offset_minutes = (rest.front() == '-' ? -1 : 1) * (oh * 60 + om);
    } else {
      return false;
    }
  }
  const chr::year_month_day ymd{chr::year{y}, chr::month{mo}, chr::day{d}};
  if (!ymd.ok() || hh < 0 || hh > 23 || mm < 0 || mm > 59 || ss < 0 || ss > 60) return false;
  const long long day_count = Day{ymd}.time_since_epoch().count();
  out.minutes = day_count * 1440 + hh * 60 + mm + (ss >= 30 ? 1 : 0);
  return true;
}

long long floor_div(long long a, long long b) {
  long long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

void append_double(std::string& out, double v) {
  if (std::isnan(v)) return;
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.append(buf.data(), ptr);
}

}  // namespace

void SiteGeometry::validate() const {
  if (!(latitude >= -90.0 && latitude <= 90.0))
    throw Error(ErrorKind::schema, "latitude must lie in [-90, 90]");
  if (!(longitude >= -180.0 && longitude <= 180.0))
    throw Error(ErrorKind::schema, "longitude must lie in [-180, 180]");
}

std::string format_number(double v) {
  std::string out;
  append_double(out, v);
  return out;
}

int day_of_year(Day d) noexcept {
  const chr::year_month_day ymd{d};
  return static_cast<int>((d - Day{ymd.year() / chr::January / 1}).count()) + 1;
}

std::size_t year_slot_index(int doy, int slot) noexcept {
  const int d = std::min(doy, SeriesLayout::days_per_year);
  return static_cast<std::size_t>((d - 1) * kHours + slot);
}

// --- HourlySeries -----------------------------------------------------------

HourlySeries::HourlySeries(Day first_day, std::vector<double> values, std::vector<bool> missing)
    : first_day_(first_day), values_(std::move(values)), missing_(std::move(missing)) {
  if (values_.size() % kHours != 0)
    throw Error(ErrorKind::shape, "series length " + std::to_string(values_.size()) +
                                      " is not a whole number of 9-hour days");
  if (missing_.empty()) {
    missing_.resize(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) missing_[i] = std::isnan(values_[i]);
  }
  if (missing_.size() != values_.size()) throw Error(ErrorKind::shape, "missing mask length mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (missing_[i])
      values_[i] = kNaN;
    else if (!std::isfinite(values_[i]))
      throw Error(ErrorKind::shape, "non-finite value at slot " + std::to_string(i));
  }
}

HourlySeries HourlySeries::constant(Day first_day, std::size_t days, double value) {
  return HourlySeries(first_day, std::vector<double>(days * kHours, value));
}

std::size_t HourlySeries::missing_count() const noexcept {
  return static_cast<std::size_t>(std::count(missing_.begin(), missing_.end(), true));
}

Day HourlySeries::last_day() const noexcept {
  return first_day_ + chr::days{static_cast<long>(days()) - 1};
}

Day HourlySeries::day(std::size_t i) const noexcept {
  return first_day_ + chr::days{static_cast<long>(i / kHours)};
}

chr::year_month_day HourlySeries::date(std::size_t i) const noexcept { return chr::year_month_day{day(i)}; }

unsigned HourlySeries::month(std::size_t i) const noexcept { return unsigned{date(i).month()}; }

int HourlySeries::day_of_year(std::size_t i) const noexcept { return solarcast::day_of_year(day(i)); }

std::size_t HourlySeries::year_slot(std::size_t i) const noexcept {
  return year_slot_index(day_of_year(i), slot(i));
}

std::size_t HourlySeries::index_of(Day d) const {
  const auto offset = (d - first_day_).count();
  if (offset < 0 || static_cast<std::size_t>(offset) >= days())
    throw Error(ErrorKind::bounds, "day outside series");
  return static_cast<std::size_t>(offset) * kHours;
}

HourlySeries HourlySeries::with_values(std::vector<double> values) const {
  if (values.size() != values_.size()) throw Error(ErrorKind::shape, "with_values: length mismatch");
  return HourlySeries(first_day_, std::move(values));
}

HourlySeries HourlySeries::slice_days(std::size_t first, std::size_t count) const {
  if (first + count > days()) throw Error(ErrorKind::bounds, "slice beyond end of series");
  const auto b = static_cast<std::ptrdiff_t>(first * kHours);
  const auto e = static_cast<std::ptrdiff_t>((first + count) * kHours);
  return HourlySeries(first_day_ + chr::days{static_cast<long>(first)},
                      std::vector<double>(values_.begin() + b, values_.begin() + e),
                      std::vector<bool>(missing_.begin() + b, missing_.begin() + e));
}

bool HourlySeries::same_grid(const HourlySeries& other) const noexcept {
  return first_day_ == other.first_day_ && size() == other.size();
}

// --- panel ------------------------------------------------------------------

void ExogenousPanel::validate(const HourlySeries& reference) const {
  const std::array<std::pair<const char*, const HourlySeries*>, 4> cols{{{"nebulosity", &nebulosity},
                                                                          {"pressure", &pressure},
                                                                          {"temperature", &temperature},
                                                                          {"rain", &rain}}};
  for (const auto& [name, col] : cols) {
    if (!col->same_grid(reference))
      throw Error(ErrorKind::shape, std::string(name) + " column is not aligned with the radiation series");
  }
  for (std::size_t i = 0; i < nebulosity.size(); ++i) {
    if (!nebulosity.missing(i) && (nebulosity[i] < 0.0 || nebulosity[i] > 8.0))
      throw Error(ErrorKind::bounds, "nebulosity outside [0, 8] octas at slot " + std::to_string(i));
    if (!rain.missing(i) && rain[i] < 0.0)
      throw Error(ErrorKind::bounds, "negative rain at slot " + std::to_string(i));
  }
}

ExogenousPanel ExogenousPanel::slice_days(std::size_t first, std::size_t count) const {
  return {nebulosity.slice_days(first, count), pressure.slice_days(first, count),
          temperature.slice_days(first, count), rain.slice_days(first, count)};
}

Dataset Dataset::slice_days(std::size_t first, std::size_t count) const {
  return {ghi.slice_days(first, count), panel.slice_days(first, count)};
}

// --- CSV --------------------------------------------------------------------

Dataset read_series(std::istream& in, const CsvSchema& schema, const SiteGeometry& site) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::parse, "empty input, header row expected");
  const auto header = split_csv(line);
  const std::array<const std::string*, 6> wanted{&schema.timestamp, &schema.ghi,         &schema.nebulosity,
                                                 &schema.pressure,  &schema.temperature, &schema.rain};
  std::array<std::size_t, 6> col{};
  for (std::size_t k = 0; k < wanted.size(); ++k) {
    const auto it = std::find(header.begin(), header.end(), *wanted[k]);
    if (it == header.end()) throw Error(ErrorKind::parse, "header lacks column '" + *wanted[k] + "'");
    col[k] = static_cast<std::size_t>(it - header.begin());
  }

  // slot key = day * 9 + slot
  std::map<long long, std::array<double, 5>> rows;
  std::set<long long> seen;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() < header.size())
      throw Error(ErrorKind::parse, "row " + std::to_string(row) + ": expected " +
                                        std::to_string(header.size()) + " cells");
    ParsedTime t;
    if (!parse_timestamp(cells[col[0]], t))
      throw Error(ErrorKind::parse, "row " + std::to_string(row) + ": malformed timestamp '" +
                                        std::string(cells[col[0]]) + "'");
    if (!seen.insert(t.minutes - t.offset_minutes).second)
      throw Error(ErrorKind::duplicate_timestamp, "row " + std::to_string(row) + ": '" +
                                                      std::string(cells[col[0]]) + "' already seen");
    long long solar_minutes = t.minutes;
    if (schema.basis == TimeBasis::utc) {
      const long long utc = t.minutes - t.offset_minutes;
      const int doy = day_of_year(Day{chr::days{floor_div(utc, 1440)}});
      solar_minutes = utc + std::llround(4.0 * site.longitude + astro::equation_of_time(doy));
    } else if (t.has_offset && t.offset_minutes != 0) {
      throw Error(ErrorKind::parse, "row " + std::to_string(row) + ": UTC offsets require time_basis utc");
    }
    const long long hour_index = floor_div(solar_minutes + 30, 60);
    const long long dayn = floor_div(hour_index, 24);
    const int hour = static_cast<int>(hour_index - dayn * 24);
    if (hour < SeriesLayout::day_start_hour || hour >= SeriesLayout::day_start_hour + kHours) continue;

    std::array<double, 5> v{};
    for (std::size_t k = 1; k < 6; ++k) {
      const auto cell = cells[col[k]];
      if (cell.empty()) {
        v[k - 1] = kNaN;
        continue;
      }
      double x = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), x);
      if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(x))
        throw Error(ErrorKind::parse, "row " + std::to_string(row) + ": bad number '" + std::string(cell) +
                                          "' in column '" + *wanted[k] + "'");
      v[k - 1] = x;
    }
    const long long key = dayn * kHours + (hour - SeriesLayout::day_start_hour);
    if (!rows.emplace(key, v).second)
      throw Error(ErrorKind::duplicate_timestamp,
                  "row " + std::to_string(row) + ": maps onto an already filled solar-time slot");
  }
  if (rows.empty()) throw Error(ErrorKind::parse, "no rows inside the 8:00-16:00 daylight window");

  const long long first_day = floor_div(rows.begin()->first, kHours);
  const long long last_day = floor_div(rows.rbegin()->first, kHours);
  const auto n = static_cast<std::size_t>((last_day - first_day + 1) * kHours);
  std::array<std::vector<double>, 5> cols;
  for (auto& c : cols) c.assign(n, kNaN);
  for (const auto& [key, v] : rows) {
    const auto i = static_cast<std::size_t>(key - first_day * kHours);
    for (std::size_t k = 0; k < 5; ++k) cols[k][i] = v[k];
  }
  const Day start{chr::days{first_day}};
  Dataset d{HourlySeries(start, std::move(cols[0])),
            {HourlySeries(start, std::move(cols[1])), HourlySeries(start, std::move(cols[2])),
             HourlySeries(start, std::move(cols[3])), HourlySeries(start, std::move(cols[4]))}};
  d.validate();
  return d;
}

Dataset load_series(const std::filesystem::path& path, const CsvSchema& schema, const SiteGeometry& site) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  return read_series(in, schema, site);
}

std::string format_timestamp(Day d, int hour) {
  const chr::year_month_day ymd{d};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:00:00", int{ymd.year()}, unsigned{ymd.month()},
                unsigned{ymd.day()}, hour);
  return buf;
}

void write_series(std::ostream& out, const Dataset& data, std::span<const DerivedColumn> extra) {
  data.validate();
  for (const auto& c : extra) {
    if (c.series == nullptr || !c.series->same_grid(data.ghi))
      throw Error(ErrorKind::shape, "derived column '" + c.name + "' not aligned");
  }
  std::string buf = "timestamp,ghi,nebulosity,pressure,temperature,rain";
  for (const auto& c : extra) buf += "," + c.name;
  buf += '\n';
  const std::array<const HourlySeries*, 5> base{&data.ghi, &data.panel.nebulosity, &data.panel.pressure,
                                                &data.panel.temperature, &data.panel.rain};
  for (std::size_t i = 0; i < data.ghi.size(); ++i) {
    buf += format_timestamp(data.ghi.day(i), HourlySeries::hour(i));
    for (const auto* s : base) {
      buf += ',';
      append_double(buf, (*s)[i]);
    }
    for (const auto& c : extra) {
      buf += ',';
      append_double(buf, (*c.series)[i]);
    }
    buf += '\n';
    if (buf.size() > (1u << 16)) {
      out << buf;
      buf.clear();
    }
  }
  out << buf;
}

void save_series(const std::filesystem::path& path, const Dataset& data, std::span<const DerivedColumn> extra) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  write_series(out, data, extra);
}

// --- cleaning / scaling / splitting -----------------------------------------

HourlySeries clean_missing(const HourlySeries& s, double max_missing_fraction) {
  const std::size_t missing = s.missing_count();
  if (missing == 0) return s;
  if (static_cast<double>(missing) >= max_missing_fraction * static_cast<double>(s.size()))
    throw Error(ErrorKind::too_many_missing, std::to_string(missing) + " of " + std::to_string(s.size()) +
                                                 " slots missing");
  std::array<double, kHours> sum{};
  std::array<std::size_t, kHours> count{};
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.missing(i)) continue;
    sum[HourlySeries::slot(i)] += s[i];
    ++count[HourlySeries::slot(i)];
  }
  std::vector<double> out(s.data());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!s.missing(i)) continue;
    const int k = HourlySeries::slot(i);
    if (count[k] == 0)
      throw Error(ErrorKind::unrecoverable_gap,
                  "no observed value at " + std::to_string(HourlySeries::hour(i)) + ":00 to average");
    out[i] = sum[k] / static_cast<double>(count[k]);
  }
  return s.with_values(std::move(out));
}

Dataset clean_missing(const Dataset& d, double max_missing_fraction) {
  return {clean_missing(d.ghi, max_missing_fraction),
          {clean_missing(d.panel.nebulosity, max_missing_fraction),
           clean_missing(d.panel.pressure, max_missing_fraction),
           clean_missing(d.panel.temperature, max_missing_fraction),
           clean_missing(d.panel.rain, max_missing_fraction)}};
}

AffineMap fit_interval(std::span<const double> values, double lo, double hi) {
  if (!(hi > lo)) throw Error(ErrorKind::degenerate_range, "target interval must satisfy hi > lo");
  double mn = std::numeric_limits<double>::infinity();
  double mx = -mn;
  for (double v : values) {
    if (std::isnan(v)) continue;
    mn = std::min(mn, v);
    mx = std::max(mx, v);
  }
  if (!(mx > mn)) throw Error(ErrorKind::degenerate_range, "constant or empty series cannot be rescaled");
  const double scale = (hi - lo) / (mx - mn);
  return {scale, lo - scale * mn};
}

std::pair<HourlySeries, AffineMap> normalize_interval(const HourlySeries& s, double lo, double hi) {
  const AffineMap map = fit_interval(s.values(), lo, hi);
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = map.apply(s[i]);
  return {s.with_values(std::move(out)), map};
}

HourlySeries invert_interval(const HourlySeries& s, const AffineMap& map) {
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = map.invert(s[i]);
  return s.with_values(std::move(out));
}

int calendar_years(const HourlySeries& s) noexcept {
  if (s.empty()) return 0;
  const chr::year_month_day a{s.first_day()};
  const chr::year_month_day b{s.last_day()};
  return int{b.year()} - int{a.year()} + 1;
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& d, int train_years) {
  const int total = calendar_years(d.ghi);
  if (train_years <= 0) throw Error(ErrorKind::bounds, "train partition would be empty");
  if (train_years >= total)
    throw Error(ErrorKind::bounds, "train_years " + std::to_string(train_years) + " leaves no test data (" +
                                       std::to_string(total) + " years available)");
  const chr::year_month_day first{d.ghi.first_day()};
  const Day boundary{(first.year() + chr::years{train_years}) / chr::January / 1};
  const auto train_days = static_cast<std::size_t>((boundary - d.ghi.first_day()).count());
  return {d.slice_days(0, train_days), d.slice_days(train_days, d.ghi.days() - train_days)};
}

}  // namespace solarcast
