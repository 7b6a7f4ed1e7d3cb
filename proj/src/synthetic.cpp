#include "stes/synthetic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>

#include <fmt/core.h>

#include "stes/error.hpp"

namespace stes {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Distributions computed from raw engine output so that results do not
// depend on the standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double normal() {
    if (spare_) {
      const double v = *spare_;
      spare_.reset();
      return v;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(kTwoPi * u2);
    return r * std::cos(kTwoPi * u2);
  }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

// Rescales a nonnegative shape to the given mean, blending towards the
// constant mean as amplitude goes to zero.
void to_mean(std::vector<double>& v, double mean, double amplitude) {
  double s = 0.0;
  for (double x : v) s += x;
  const double shape_mean = v.empty() ? 0.0 : s / static_cast<double>(v.size());
  for (double& x : v) {
    const double rel = shape_mean > 0.0 ? x / shape_mean : 1.0;
    x = std::max(0.0, mean * (1.0 + amplitude * (rel - 1.0)));
  }
}

void write_csv(const std::filesystem::path& path,
               const std::vector<HourStamp>& stamps,
               const std::vector<double>& values) {
  std::ofstream out(path);
  if (!out) throw InputError(fmt::format("cannot write {}", path.string()));
  out << "timestamp,value\n";
  for (std::size_t t = 0; t < stamps.size(); ++t) {
    out << stamps[t].to_string() << ':' << "00," << fmt::format("{}", values[t])
        << '\n';
  }
}

}  // namespace

SyntheticData generate_synthetic_raw(const SyntheticSpec& spec) {
  using namespace std::chrono;
  SyntheticData d;
  const std::size_t n = spec.days * 24;
  const double a = spec.amplitude;
  Rng rng(spec.seed);

  const sys_days first = year_month_day{year{spec.year}, January, day{1}};
  d.stamps.reserve(n);
  std::vector<double> pv_shape(n);
  std::vector<double> irr_shape(n);
  double price_state = 0.0;
  double cloud = 1.0;
  bool dip_day = false;
  sys_days date = first;
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t h = t % 24;
    if (h == 0) {
      cloud = 0.25 + 0.75 * rng.uniform();
      dip_day = rng.uniform() < spec.dip_probability;
      if (t > 0) {
        date += days{1};
        // February 29 is skipped to keep 365-day years.
        const year_month_day next{date};
        if (next.month() == February && next.day() == day{29}) date += days{1};
      }
    }
    const year_month_day ymd{date};
    HourStamp st;
    st.year = static_cast<int>(ymd.year());
    st.month = static_cast<unsigned>(ymd.month());
    st.day = static_cast<unsigned>(ymd.day());
    st.hour = static_cast<unsigned>(h);
    st.utc_hour = date.time_since_epoch().count() * 24 +
                  static_cast<std::int64_t>(h);
    d.stamps.push_back(st);

    const double doy =
        static_cast<double>((date - sys_days{ymd.year() / January / 1}).count());
    const double hd = static_cast<double>(h);
    const bool summer = spec.summer.contains(st.month, st.day);

    const double elec =
        spec.electric_base_kw *
        (1.0 + a * (spec.electric_diurnal * 0.5 *
                        (std::cos(kTwoPi * (hd - 19.0) / 24.0) +
                         0.6 * std::cos(kTwoPi * (hd - 8.0) / 24.0)) +
                    spec.load_noise * rng.normal()));
    d.electric_demand.push_back(std::max(0.0, elec));

    double heat = 0.0;
    if (summer) {
      const double bell = std::max(0.0, std::sin(kTwoPi * (hd - 9.0) / 24.0));
      heat = spec.cooling_base_kw *
             (1.0 + a * (1.2 * bell - 0.4 + spec.load_noise * rng.normal()));
    } else {
      const double season = std::cos(kTwoPi * (doy - 15.0) / 365.0);
      const double diurnal = std::cos(kTwoPi * (hd - 7.0) / 24.0);
      heat = spec.heat_base_kw *
             (1.0 + a * (spec.heat_seasonal * season +
                         spec.heat_diurnal * diurnal +
                         spec.load_noise * rng.normal()));
    }
    d.heat_source.push_back(std::clamp(heat, 0.0, spec.heat_cap_kw));

    const double daylen = 12.0 + 4.0 * std::sin(kTwoPi * (doy - 80.0) / 365.0);
    const double sunrise = 12.5 - daylen / 2.0;
    const double sun =
        hd + 0.5 > sunrise && hd + 0.5 < sunrise + daylen
            ? std::sin(std::numbers::pi * (hd + 0.5 - sunrise) / daylen)
            : 0.0;
    const double elevation = 0.6 + 0.4 * std::sin(kTwoPi * (doy - 80.0) / 365.0);
    pv_shape[t] = sun * elevation * cloud;
    irr_shape[t] = sun * elevation * cloud;

    price_state = spec.price_persistence * price_state +
                  spec.price_noise * rng.normal();
    double price = spec.price_daily * std::cos(kTwoPi * (hd - 18.0) / 24.0) +
                   spec.price_seasonal * std::cos(kTwoPi * (doy - 15.0) / 365.0) +
                   price_state;
    if (dip_day && h >= 11 && h <= 15) price -= spec.dip_depth;
    d.spot_price.push_back(spec.price_mean + a * price);
  }
  to_mean(pv_shape, spec.pv_unit_mean_kw, a);
  to_mean(irr_shape, spec.irradiance_mean, a);
  d.pv_unit = std::move(pv_shape);
  d.irradiance = std::move(irr_shape);
  return d;
}

SeriesBundle generate_synthetic(const SyntheticSpec& spec,
                                const CaseConfig& cfg) {
  const SyntheticData d = generate_synthetic_raw(spec);
  CaseConfig c = cfg;
  c.summer = spec.summer;
  return assemble_bundle(c, d.stamps, d.electric_demand, d.heat_source,
                         d.pv_unit, d.irradiance, d.spot_price);
}

std::filesystem::path write_synthetic(const SyntheticSpec& spec,
                                      const std::filesystem::path& dir,
                                      const CaseConfig& cfg) {
  std::filesystem::create_directories(dir);
  const SyntheticData d = generate_synthetic_raw(spec);
  CaseConfig c = cfg;
  c.summer = spec.summer;
  c.files = {"electric_demand.csv", "heat_source.csv", "pv_unit.csv",
             "irradiance.csv", "spot_price.csv"};
  write_csv(dir / c.files.electric_demand, d.stamps, d.electric_demand);
  write_csv(dir / c.files.heat_source, d.stamps, d.heat_source);
  write_csv(dir / c.files.pv_unit, d.stamps, d.pv_unit);
  write_csv(dir / c.files.irradiance, d.stamps, d.irradiance);
  write_csv(dir / c.files.spot_price, d.stamps, d.spot_price);
  const auto config_path = dir / "config.json";
  std::ofstream out(config_path);
  if (!out) {
    throw InputError(fmt::format("cannot write {}", config_path.string()));
  }
  out << config_to_json(c);
  return config_path;
}

}  // namespace stes
