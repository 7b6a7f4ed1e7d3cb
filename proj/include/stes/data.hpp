#pragma once

// Case configuration and hourly CSV ingestion.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stes/horizon.hpp"
#include "stes/network.hpp"

namespace stes {

// Column names and delimiter of the input CSVs.
struct CsvSchema {
  std::string timestamp_column = "timestamp";
  std::string value_column = "value";
  char delimiter = ',';
};

// Input files, one hourly series each.
struct SeriesFiles {
  std::filesystem::path electric_demand;  // kW
  std::filesystem::path heat_source;      // heater consumption, kW
  std::filesystem::path pv_unit;          // output of one panel, kW
  std::filesystem::path irradiance;       // kW/m^2
  std::filesystem::path spot_price;       // EUR/kWh
};

// Inclusive calendar range of the cooling season.
struct SummerWindow {
  unsigned start_month = 6;
  unsigned start_day = 1;
  unsigned end_month = 9;
  unsigned end_day = 30;

  bool contains(unsigned month, unsigned day) const;
};

struct CaseConfig {
  SeriesFiles files;
  CsvSchema schema;
  double pv_panels = 80.0;
  double pv_unit_kw = 0.25;  // rating of one panel, documentation only
  double st_area_m2 = 12.0;
  double st_efficiency = 0.9;
  StorageParams battery;
  StorageParams heat_storage;
  HeatPumpParams heat_pump;
  double transport_fee = 0.20;  // EUR/kWh added to the spot price to buy
  SummerWindow summer;
  double dt_hours = 1.0;
  // Steps of the simulated year; data beyond it is read only by the
  // minimum-horizon search. Zero means all data.
  std::size_t year_steps = 0;

  // The residential case: 49 kWh battery, 4640 kWh heat storage, 15 kW heat
  // pump, 80 panels, 12 m^2 of collectors. File paths are empty.
  static CaseConfig residential_case();

  EnergyNetwork network() const;
  // Initial and final levels of both storages; a missing final level
  // equals the initial one.
  YearBoundary year_boundary() const;
  std::vector<Violation> validate() const;
};

// Reads a JSON configuration. Keys absent from the file keep the values of
// residential_case(). Relative file paths resolve against the config file's
// directory. Self-discharge is given in percent per hour and converted to a
// retention factor here. Throws InputError naming the offending key.
CaseConfig load_config(const std::filesystem::path& path);
CaseConfig parse_config(std::istream& in, const std::filesystem::path& base_dir);
std::string config_to_json(const CaseConfig& cfg);

// Date and hour as written in a timestamp cell.
struct HourStamp {
  int year = 0;
  unsigned month = 0;
  unsigned day = 0;
  unsigned hour = 0;
  int offset_minutes = 0;     // UTC offset as written
  std::int64_t utc_hour = 0;  // hours since the epoch in UTC

  std::string to_string() const;
};

// Parses "YYYY-MM-DD[T ]HH[:MM[:SS]][Z|(+|-)HH[:MM]]". Minutes and seconds
// must be zero. Returns nullopt on malformed input.
std::optional<HourStamp> parse_timestamp(const std::string& text);

struct HourlySeries {
  std::vector<HourStamp> stamps;
  std::vector<double> values;
  std::vector<std::string> warnings;
};

// Reads one hourly CSV. February 29 rows are dropped, up to three
// consecutive missing hours are filled by linear interpolation (both with a
// warning), longer gaps, unparsable cells and non-increasing timestamps
// throw InputError naming the file and row.
HourlySeries read_hourly_csv(std::istream& in, const std::string& name,
                             const CsvSchema& schema);
HourlySeries read_hourly_csv(const std::filesystem::path& path,
                             const CsvSchema& schema);

// Combines raw series into model inputs: heat demand is the heat source
// outside the summer window, absorbed cooling heat the heat source inside
// it; PV is panels times the unit series; solar thermal is area times
// efficiency times irradiance; the purchase price is spot plus fee.
SeriesBundle assemble_bundle(const CaseConfig& cfg,
                             const std::vector<HourStamp>& stamps,
                             const std::vector<double>& electric_demand,
                             const std::vector<double>& heat_source,
                             const std::vector<double>& pv_unit,
                             const std::vector<double>& irradiance,
                             const std::vector<double>& spot_price);

// Reads all files of the configuration. Throws InputError when files are
// missing, malformed, or disagree in length or start time. Logs the bundle
// checksum.
SeriesBundle ingest(const CaseConfig& cfg);

}  // namespace stes
