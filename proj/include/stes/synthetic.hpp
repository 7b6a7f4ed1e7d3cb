#pragma once

// Reproducible synthetic case data: winter-peaking heating, summer-only
// cooling heat, diurnal PV and collector output, and a spot price with
// occasional negative midday dips.

#include <cstdint>
#include <filesystem>
#include <vector>

#include "stes/data.hpp"

namespace stes {

struct SyntheticSpec {
  std::size_t days = 365;
  int year = 2021;  // data start on January 1 of this year
  std::uint64_t seed = 2021;
  // Scales every deviation from the base levels; 0 gives constant series.
  double amplitude = 1.0;

  double electric_base_kw = 1.2;
  double electric_diurnal = 0.5;   // relative
  double heat_base_kw = 3.5;       // mean heating load outside summer
  double heat_seasonal = 0.8;      // relative, peaks mid January
  double heat_diurnal = 0.25;      // relative
  double heat_cap_kw = 12.0;       // below heat pump plus storage discharge
  double cooling_base_kw = 1.0;    // mean cooling heat inside summer
  double load_noise = 0.1;         // relative standard deviation
  double pv_unit_mean_kw = 0.03;   // per panel, yearly mean
  double irradiance_mean = 0.13;   // kW/m^2, yearly mean
  double price_mean = 0.10;        // EUR/kWh
  double price_daily = 0.03;       // evening peak amplitude
  double price_seasonal = 0.02;    // winter premium amplitude
  double price_noise = 0.015;      // AR(1) innovation standard deviation
  double price_persistence = 0.8;  // AR(1) coefficient
  double dip_probability = 0.04;   // per day
  double dip_depth = 0.16;         // midday drop on dip days
  SummerWindow summer;
};

// Raw per-hour inputs in the shape of the case files.
struct SyntheticData {
  std::vector<HourStamp> stamps;
  std::vector<double> electric_demand;
  std::vector<double> heat_source;
  std::vector<double> pv_unit;
  std::vector<double> irradiance;
  std::vector<double> spot_price;
};

SyntheticData generate_synthetic_raw(const SyntheticSpec& spec);

// Raw data assembled with the case parameters (panels, collector area, fee,
// summer window of `spec`).
SeriesBundle generate_synthetic(
    const SyntheticSpec& spec,
    const CaseConfig& cfg = CaseConfig::residential_case());

// Writes the five input CSVs and a config.json referencing them into `dir`;
// returns the config path.
std::filesystem::path write_synthetic(
    const SyntheticSpec& spec, const std::filesystem::path& dir,
    const CaseConfig& cfg = CaseConfig::residential_case());

}  // namespace stes
