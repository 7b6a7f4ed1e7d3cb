#include "stes/data.hpp"

#include <chrono>
#include <cmath>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/core.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "stes/error.hpp"

namespace stes {
namespace {

using nlohmann::json;

std::int64_t days_since_epoch(int y, unsigned m, unsigned d) {
  using namespace std::chrono;
  const sys_days sd = year_month_day{year{y}, month{m}, day{d}};
  return sd.time_since_epoch().count();
}

HourStamp stamp_from_local_hours(std::int64_t local_hours, int offset_minutes) {
  using namespace std::chrono;
  std::int64_t days = local_hours / 24;
  std::int64_t hour = local_hours % 24;
  if (hour < 0) {
    hour += 24;
    --days;
  }
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  HourStamp s;
  s.year = static_cast<int>(ymd.year());
  s.month = static_cast<unsigned>(ymd.month());
  s.day = static_cast<unsigned>(ymd.day());
  s.hour = static_cast<unsigned>(hour);
  s.offset_minutes = offset_minutes;
  s.utc_hour = local_hours - offset_minutes / 60;
  return s;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  s = s.substr(b, e - b + 1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    s = s.substr(1, s.size() - 2);
  }
  return s;
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') quoted = !quoted;
    if (c == delim && !quoted) {
      out.push_back(trim(cell));
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  out.push_back(trim(cell));
  return out;
}

std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

bool digits(const std::string& s, std::size_t pos, std::size_t n, int& out) {
  if (pos + n > s.size()) return false;
  out = 0;
  for (std::size_t i = pos; i < pos + n; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    out = out * 10 + (s[i] - '0');
  }
  return true;
}

// JSON helpers that reject unknown keys and name the path of bad values.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw InputError(path_ + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    used_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw InputError(fmt::format("{}.{}: wrong type", path_, key));
    }
  }
  void get_path(const char* key, std::filesystem::path& out,
                const std::filesystem::path& base) {
    std::string s;
    get(key, s);
    if (!s.empty()) {
      std::filesystem::path p(s);
      out = p.is_absolute() ? p : base / p;
    }
  }
  const json* child(const char* key) {
    used_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }
  std::string path(const char* key) const { return path_ + "." + key; }
  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!used_.count(k)) {
        throw InputError(fmt::format("{}: unknown key '{}'", path_, k));
      }
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

void read_storage(const json& j, const std::string& path, StorageParams& sp) {
  Reader r(j, path);
  r.get("capacity_kwh", sp.e_max);
  r.get("min_kwh", sp.e_min);
  r.get("eta_charge", sp.eta_ch);
  r.get("eta_discharge", sp.eta_dis);
  r.get("max_charge_kw", sp.p_ch_max);
  r.get("max_discharge_kw", sp.p_dis_max);
  double loss = (1.0 - sp.rho) * 100.0;
  r.get("self_discharge_pct_per_hour", loss);
  sp.rho = StorageParams::retention_from_loss_pct(loss);
  r.get("initial_kwh", sp.e_init);
  if (const json* v = r.child("final_kwh")) {
    if (v->is_null()) {
      sp.e_end.reset();
    } else if (v->is_number()) {
      sp.e_end = v->get<double>();
    } else {
      throw InputError(r.path("final_kwh") + ": wrong type");
    }
  }
  r.finish();
}

json storage_json(const StorageParams& sp) {
  json j;
  j["capacity_kwh"] = sp.e_max;
  j["min_kwh"] = sp.e_min;
  j["eta_charge"] = sp.eta_ch;
  j["eta_discharge"] = sp.eta_dis;
  j["max_charge_kw"] = sp.p_ch_max;
  j["max_discharge_kw"] = sp.p_dis_max;
  j["self_discharge_pct_per_hour"] = (1.0 - sp.rho) * 100.0;
  j["initial_kwh"] = sp.e_init;
  j["final_kwh"] = sp.e_end ? json(*sp.e_end) : json(nullptr);
  return j;
}

std::pair<unsigned, unsigned> parse_month_day(const std::string& s,
                                              const std::string& path) {
  int m = 0;
  int d = 0;
  if (s.size() != 5 || s[2] != '-' || !digits(s, 0, 2, m) ||
      !digits(s, 3, 2, d) || m < 1 || m > 12 || d < 1 || d > 31) {
    throw InputError(fmt::format("{}: expected MM-DD, got '{}'", path, s));
  }
  return {static_cast<unsigned>(m), static_cast<unsigned>(d)};
}

}  // namespace

bool SummerWindow::contains(unsigned month, unsigned day) const {
  const unsigned key = month * 100 + day;
  const unsigned lo = start_month * 100 + start_day;
  const unsigned hi = end_month * 100 + end_day;
  return key >= lo && key <= hi;
}

CaseConfig CaseConfig::residential_case() {
  CaseConfig c;
  c.battery.e_max = 49.0;
  c.battery.e_min = 0.0;
  c.battery.eta_ch = 0.97;
  c.battery.eta_dis = 0.97;
  c.battery.p_ch_max = 16.0;
  c.battery.p_dis_max = 10.0;
  c.battery.rho = StorageParams::retention_from_loss_pct(0.01);
  c.battery.e_init = 0.0;
  c.battery.e_end = 0.0;
  c.heat_storage.e_max = 4640.0;
  c.heat_storage.e_min = 0.0;
  c.heat_storage.eta_ch = 0.78;
  c.heat_storage.eta_dis = 0.78;
  c.heat_storage.p_ch_max = 10.2;
  c.heat_storage.p_dis_max = 9.18;
  c.heat_storage.rho = StorageParams::retention_from_loss_pct(0.007);
  c.heat_storage.e_init = 3000.0;
  c.heat_storage.e_end = 3000.0;
  c.heat_pump = {4.0, 15.0};
  return c;
}

EnergyNetwork CaseConfig::network() const {
  return EnergyNetwork::canonical(battery, heat_storage, heat_pump);
}

YearBoundary CaseConfig::year_boundary() const {
  YearBoundary b;
  b.e_init = {battery.e_init, heat_storage.e_init};
  b.e_end = {battery.e_end.value_or(battery.e_init),
             heat_storage.e_end.value_or(heat_storage.e_init)};
  return b;
}

std::vector<Violation> CaseConfig::validate() const {
  std::vector<Violation> v = validate_network(network());
  if (!(transport_fee >= 0.0)) {
    v.push_back({"transport_fee", "must be >= 0"});
  }
  if (!(pv_panels >= 0.0)) v.push_back({"pv.panels", "must be >= 0"});
  if (!(st_area_m2 >= 0.0)) v.push_back({"solar_thermal.area_m2", "must be >= 0"});
  if (!(st_efficiency >= 0.0 && st_efficiency <= 1.0)) {
    v.push_back({"solar_thermal.efficiency", "must lie in [0, 1]"});
  }
  auto valid_date = [](unsigned m, unsigned d) {
    using namespace std::chrono;
    // A leap year so that 02-29 is a valid window edge.
    return year_month_day{year{2000}, month{m}, day{d}}.ok();
  };
  if (!valid_date(summer.start_month, summer.start_day) ||
      !valid_date(summer.end_month, summer.end_day) ||
      summer.start_month * 100 + summer.start_day >
          summer.end_month * 100 + summer.end_day) {
    v.push_back({"summer", "window must be an ordered range of dates within the year"});
  }
  TimeGrid grid{1, dt_hours, 1};
  for (const auto& g : grid.validate()) v.push_back(g);
  return v;
}

CaseConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(fmt::format("config: {}", e.what()));
  }
  CaseConfig c = CaseConfig::residential_case();
  Reader r(j, "config");
  if (const json* f = r.child("files")) {
    Reader fr(*f, "config.files");
    fr.get_path("electric_demand", c.files.electric_demand, base_dir);
    fr.get_path("heat_source", c.files.heat_source, base_dir);
    fr.get_path("pv_unit", c.files.pv_unit, base_dir);
    fr.get_path("irradiance", c.files.irradiance, base_dir);
    fr.get_path("spot_price", c.files.spot_price, base_dir);
    fr.finish();
  }
  if (const json* f = r.child("csv")) {
    Reader cr(*f, "config.csv");
    cr.get("timestamp_column", c.schema.timestamp_column);
    cr.get("value_column", c.schema.value_column);
    std::string delim(1, c.schema.delimiter);
    cr.get("delimiter", delim);
    if (delim.size() != 1) {
      throw InputError("config.csv.delimiter: must be a single character");
    }
    c.schema.delimiter = delim[0];
    cr.finish();
  }
  if (const json* f = r.child("pv")) {
    Reader pr(*f, "config.pv");
    pr.get("panels", c.pv_panels);
    pr.get("unit_kw", c.pv_unit_kw);
    pr.finish();
  }
  if (const json* f = r.child("solar_thermal")) {
    Reader sr(*f, "config.solar_thermal");
    sr.get("area_m2", c.st_area_m2);
    sr.get("efficiency", c.st_efficiency);
    sr.finish();
  }
  if (const json* f = r.child("battery")) {
    read_storage(*f, "config.battery", c.battery);
  }
  if (const json* f = r.child("heat_storage")) {
    read_storage(*f, "config.heat_storage", c.heat_storage);
  }
  if (const json* f = r.child("heat_pump")) {
    Reader hr(*f, "config.heat_pump");
    hr.get("cop", c.heat_pump.cop);
    hr.get("max_heat_kw", c.heat_pump.p_heat_max);
    hr.finish();
  }
  r.get("transport_fee", c.transport_fee);
  if (const json* f = r.child("summer")) {
    Reader wr(*f, "config.summer");
    std::string start = fmt::format("{:02}-{:02}", c.summer.start_month,
                                    c.summer.start_day);
    std::string end =
        fmt::format("{:02}-{:02}", c.summer.end_month, c.summer.end_day);
    wr.get("start", start);
    wr.get("end", end);
    wr.finish();
    std::tie(c.summer.start_month, c.summer.start_day) =
        parse_month_day(start, "config.summer.start");
    std::tie(c.summer.end_month, c.summer.end_day) =
        parse_month_day(end, "config.summer.end");
  }
  r.get("dt_hours", c.dt_hours);
  r.get("year_steps", c.year_steps);
  r.finish();

  const auto problems = c.validate();
  if (!problems.empty()) {
    throw InputError(fmt::format("config: {}: {}", problems.front().subject,
                                 problems.front().rule));
  }
  return c;
}

CaseConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open config {}", path.string()));
  return parse_config(in, path.parent_path());
}

std::string config_to_json(const CaseConfig& c) {
  json j;
  auto path = [](const std::filesystem::path& p) { return p.string(); };
  j["files"] = {{"electric_demand", path(c.files.electric_demand)},
                {"heat_source", path(c.files.heat_source)},
                {"pv_unit", path(c.files.pv_unit)},
                {"irradiance", path(c.files.irradiance)},
                {"spot_price", path(c.files.spot_price)}};
  j["csv"] = {{"timestamp_column", c.schema.timestamp_column},
              {"value_column", c.schema.value_column},
              {"delimiter", std::string(1, c.schema.delimiter)}};
  j["pv"] = {{"panels", c.pv_panels}, {"unit_kw", c.pv_unit_kw}};
  j["solar_thermal"] = {{"area_m2", c.st_area_m2},
                        {"efficiency", c.st_efficiency}};
  j["battery"] = storage_json(c.battery);
  j["heat_storage"] = storage_json(c.heat_storage);
  j["heat_pump"] = {{"cop", c.heat_pump.cop},
                    {"max_heat_kw", c.heat_pump.p_heat_max}};
  j["transport_fee"] = c.transport_fee;
  j["summer"] = {
      {"start", fmt::format("{:02}-{:02}", c.summer.start_month, c.summer.start_day)},
      {"end", fmt::format("{:02}-{:02}", c.summer.end_month, c.summer.end_day)}};
  j["dt_hours"] = c.dt_hours;
  j["year_steps"] = c.year_steps;
  return j.dump(2) + "\n";
}

std::string HourStamp::to_string() const {
  return fmt::format("{:04}-{:02}-{:02}T{:02}:00", year, month, day, hour);
}

std::optional<HourStamp> parse_timestamp(const std::string& text) {
  const std::string s = trim(text);
  int y = 0;
  int mo = 0;
  int d = 0;
  int h = 0;
  if (!digits(s, 0, 4, y) || s.size() < 13 || s[4] != '-' ||
      !digits(s, 5, 2, mo) || s[7] != '-' || !digits(s, 8, 2, d) ||
      (s[10] != 'T' && s[10] != ' ') || !digits(s, 11, 2, h)) {
    return std::nullopt;
  }
  std::size_t pos = 13;
  for (int part = 0; part < 2 && pos < s.size() && s[pos] == ':'; ++part) {
    int v = 0;
    if (!digits(s, pos + 1, 2, v) || v != 0) return std::nullopt;
    pos += 3;
  }
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    while (pos < s.size() && s[pos] == '0') ++pos;
  }
  int offset = 0;
  if (pos < s.size()) {
    if (s[pos] == 'Z' && pos + 1 == s.size()) {
      pos = s.size();
    } else if (s[pos] == '+' || s[pos] == '-') {
      const int sign = s[pos] == '-' ? -1 : 1;
      int oh = 0;
      int om = 0;
      if (!digits(s, pos + 1, 2, oh)) return std::nullopt;
      std::size_t q = pos + 3;
      if (q < s.size() && s[q] == ':') ++q;
      if (q < s.size()) {
        if (!digits(s, q, 2, om)) return std::nullopt;
        q += 2;
      }
      if (q != s.size()) return std::nullopt;
      offset = sign * (oh * 60 + om);
    } else {
      return std::nullopt;
    }
  }
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23) return std::nullopt;
  HourStamp st;
  st.year = y;
  st.month = static_cast<unsigned>(mo);
  st.day = static_cast<unsigned>(d);
  st.hour = static_cast<unsigned>(h);
  st.offset_minutes = offset;
  const std::int64_t local =
      days_since_epoch(y, st.month, st.day) * 24 + static_cast<std::int64_t>(h);
  // Offsets that are not whole hours shift the UTC clock by a fraction;
  // cadence checks use whole hours of the written clock in that case.
  st.utc_hour = local - offset / 60;
  return st;
}

HourlySeries read_hourly_csv(std::istream& in, const std::string& name,
                             const CsvSchema& schema) {
  std::string line;
  std::size_t row = 0;
  if (!std::getline(in, line)) throw InputError(name + ": file is empty");
  ++row;
  const auto header = split(line, schema.delimiter);
  std::ptrdiff_t ts_col = -1;
  std::ptrdiff_t val_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    std::string h = header[i];
    if (i == 0 && h.rfind("\xEF\xBB\xBF", 0) == 0) h = h.substr(3);
    if (h == schema.timestamp_column) ts_col = static_cast<std::ptrdiff_t>(i);
    if (h == schema.value_column) val_col = static_cast<std::ptrdiff_t>(i);
  }
  if (ts_col < 0 || val_col < 0) {
    throw InputError(fmt::format("{} row 1: header lacks column '{}' or '{}'",
                                 name, schema.timestamp_column,
                                 schema.value_column));
  }

  // Hourly grid with gaps marked as missing.
  struct Slot {
    HourStamp stamp;
    std::optional<double> value;
    std::size_t row;
  };
  std::vector<Slot> slots;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split(line, schema.delimiter);
    const auto need = static_cast<std::size_t>(std::max(ts_col, val_col));
    if (cells.size() <= need) {
      throw InputError(fmt::format("{} row {}: expected at least {} cells, got {}",
                                   name, row, need + 1, cells.size()));
    }
    const auto stamp = parse_timestamp(cells[static_cast<std::size_t>(ts_col)]);
    if (!stamp) {
      throw InputError(fmt::format("{} row {}: bad timestamp '{}'", name, row,
                                   cells[static_cast<std::size_t>(ts_col)]));
    }
    const std::string& cell = cells[static_cast<std::size_t>(val_col)];
    std::optional<double> value;
    if (!cell.empty()) {
      value = parse_number(cell);
      if (!value) {
        throw InputError(
            fmt::format("{} row {}: non-numeric value '{}'", name, row, cell));
      }
    }
    if (!slots.empty()) {
      const std::int64_t step = stamp->utc_hour - slots.back().stamp.utc_hour;
      if (step <= 0) {
        throw InputError(fmt::format(
            "{} row {}: timestamp {} does not advance past {}", name, row,
            stamp->to_string(), slots.back().stamp.to_string()));
      }
      const std::int64_t local_prev =
          slots.back().stamp.utc_hour + slots.back().stamp.offset_minutes / 60;
      for (std::int64_t k = 1; k < step; ++k) {
        slots.push_back({stamp_from_local_hours(local_prev + k,
                                                slots.back().stamp.offset_minutes),
                         std::nullopt, row});
      }
    }
    slots.push_back({*stamp, value, row});
  }
  if (slots.empty()) throw InputError(name + ": no data rows");

  HourlySeries out;
  std::size_t leap_rows = 0;
  std::vector<Slot> kept;
  kept.reserve(slots.size());
  for (Slot& s : slots) {
    if (s.stamp.month == 2 && s.stamp.day == 29) {
      ++leap_rows;
      continue;
    }
    kept.push_back(std::move(s));
  }
  if (leap_rows > 0) {
    out.warnings.push_back(
        fmt::format("{}: dropped {} February 29 hours", name, leap_rows));
  }

  std::size_t filled = 0;
  for (std::size_t i = 0; i < kept.size();) {
    if (kept[i].value) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < kept.size() && !kept[j].value) ++j;
    const std::size_t run = j - i;
    if (i == 0 || j == kept.size() || run > 3) {
      throw InputError(fmt::format(
          "{} row {}: {} consecutive missing hours starting {}{}", name,
          kept[i].row, run, kept[i].stamp.to_string(),
          run > 3 ? " (at most 3 are interpolated)"
                  : " at the edge of the data"));
    }
    const double v0 = *kept[i - 1].value;
    const double v1 = *kept[j].value;
    for (std::size_t k = i; k < j; ++k) {
      const double w = static_cast<double>(k - i + 1) / static_cast<double>(run + 1);
      kept[k].value = v0 + (v1 - v0) * w;
    }
    filled += run;
    i = j;
  }
  if (filled > 0) {
    out.warnings.push_back(
        fmt::format("{}: interpolated {} missing hours", name, filled));
  }
  out.stamps.reserve(kept.size());
  out.values.reserve(kept.size());
  for (const Slot& s : kept) {
    out.stamps.push_back(s.stamp);
    out.values.push_back(*s.value);
  }
  return out;
}

HourlySeries read_hourly_csv(const std::filesystem::path& path,
                             const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open {}", path.string()));
  return read_hourly_csv(in, path.string(), schema);
}

SeriesBundle assemble_bundle(const CaseConfig& cfg,
                             const std::vector<HourStamp>& stamps,
                             const std::vector<double>& electric_demand,
                             const std::vector<double>& heat_source,
                             const std::vector<double>& pv_unit,
                             const std::vector<double>& irradiance,
                             const std::vector<double>& spot_price) {
  const std::size_t n = stamps.size();
  for (const auto* v : {&electric_demand, &heat_source, &pv_unit, &irradiance,
                        &spot_price}) {
    if (v->size() != n) throw InputError("raw series lengths differ");
  }
  SeriesBundle b;
  b.d_de = electric_demand;
  b.d_dh.resize(n);
  b.p_ac.resize(n);
  b.p_pv.resize(n);
  b.p_st.resize(n);
  b.c_buy.resize(n);
  b.c_sell = spot_price;
  for (std::size_t t = 0; t < n; ++t) {
    const bool summer = cfg.summer.contains(stamps[t].month, stamps[t].day);
    b.d_dh[t] = summer ? 0.0 : heat_source[t];
    b.p_ac[t] = summer ? heat_source[t] : 0.0;
    b.p_pv[t] = cfg.pv_panels * pv_unit[t];
    b.p_st[t] = cfg.st_area_m2 * cfg.st_efficiency * irradiance[t];
    b.c_buy[t] = spot_price[t] + cfg.transport_fee;
  }
  return b;
}

SeriesBundle ingest(const CaseConfig& cfg) {
  struct Input {
    const char* key;
    const std::filesystem::path* path;
    bool nonnegative;
  };
  const Input inputs[] = {
      {"electric_demand", &cfg.files.electric_demand, true},
      {"heat_source", &cfg.files.heat_source, true},
      {"pv_unit", &cfg.files.pv_unit, true},
      {"irradiance", &cfg.files.irradiance, true},
      {"spot_price", &cfg.files.spot_price, false},
  };
  std::vector<HourlySeries> raw;
  for (const Input& in : inputs) {
    if (in.path->empty()) {
      throw InputError(fmt::format("config.files.{} is not set", in.key));
    }
    if (!std::filesystem::exists(*in.path)) {
      throw InputError(fmt::format("config.files.{}: {} does not exist", in.key,
                                   in.path->string()));
    }
    HourlySeries s = read_hourly_csv(*in.path, cfg.schema);
    for (const auto& w : s.warnings) spdlog::warn("{}", w);
    if (in.nonnegative) {
      for (std::size_t t = 0; t < s.values.size(); ++t) {
        if (s.values[t] < 0.0) {
          throw InputError(fmt::format("{} at {}: negative value {}",
                                       in.path->string(),
                                       s.stamps[t].to_string(), s.values[t]));
        }
      }
    }
    raw.push_back(std::move(s));
  }
  for (std::size_t k = 1; k < raw.size(); ++k) {
    const std::string name = inputs[k].path->string();
    if (raw[k].values.size() != raw[0].values.size()) {
      throw InputError(fmt::format("{}: {} hours, but {} has {}", name,
                                   raw[k].values.size(),
                                   inputs[0].path->string(),
                                   raw[0].values.size()));
    }
    for (std::size_t t = 0; t < raw[k].stamps.size(); ++t) {
      if (raw[k].stamps[t].utc_hour != raw[0].stamps[t].utc_hour) {
        throw InputError(fmt::format("{}: hour {} is {}, but {} has {}", name,
                                     t + 1, raw[k].stamps[t].to_string(),
                                     inputs[0].path->string(),
                                     raw[0].stamps[t].to_string()));
      }
    }
  }
  if (cfg.year_steps > raw[0].values.size()) {
    throw InputError(fmt::format("config.year_steps is {} but the data has {} hours",
                                 cfg.year_steps, raw[0].values.size()));
  }
  SeriesBundle b = assemble_bundle(cfg, raw[0].stamps, raw[0].values,
                                   raw[1].values, raw[2].values, raw[3].values,
                                   raw[4].values);
  spdlog::info("ingested {} hours from {} to {}, checksum {:016x}", b.size(),
               raw[0].stamps.front().to_string(),
               raw[0].stamps.back().to_string(), b.checksum());
  return b;
}

}  // namespace stes
