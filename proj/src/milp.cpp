#include "stes/milp.hpp"

#include <algorithm>

namespace stes {

const char* to_string(RowKind kind) {
  switch (kind) {
    case RowKind::DemandElectric: return "demand_electric";
    case RowKind::DemandHeat: return "demand_heat";
    case RowKind::PvBalance: return "pv_balance";
    case RowKind::SolarThermalCap: return "solar_thermal_cap";
    case RowKind::AcHeatCap: return "ac_heat_cap";
    case RowKind::StateBattery: return "state_battery";
    case RowKind::StateHeat: return "state_heat";
    case RowKind::HeatPumpRatio: return "heat_pump_ratio";
    case RowKind::HeatPumpCap: return "heat_pump_cap";
    case RowKind::ChargeBound: return "charge_bound";
    case RowKind::DischargeBound: return "discharge_bound";
    case RowKind::EndLevel: return "end_level";
    case RowKind::ObjectiveCut: return "objective_cut";
    case RowKind::Other: return "other";
  }
  return "other";
}

int MilpInstance::add_variable(Variable v) {
  variables.push_back(std::move(v));
  return static_cast<int>(variables.size()) - 1;
}

int MilpInstance::add_constraint(Constraint c) {
  constraints.push_back(std::move(c));
  return static_cast<int>(constraints.size()) - 1;
}

std::size_t MilpInstance::num_binaries() const {
  return static_cast<std::size_t>(
      std::count_if(variables.begin(), variables.end(),
                    [](const Variable& v) { return v.is_binary; }));
}

std::size_t MilpInstance::num_nonzeros() const {
  std::size_t nnz = 0;
  for (const auto& c : constraints) nnz += c.index.size();
  return nnz;
}

double MilpInstance::objective(const std::vector<double>& x) const {
  double f = 0.0;
  for (std::size_t j = 0; j < variables.size(); ++j) {
    f += variables[j].cost * x[j];
  }
  return f;
}

double MilpInstance::activity(std::size_t row,
                              const std::vector<double>& x) const {
  const Constraint& c = constraints[row];
  double a = 0.0;
  for (std::size_t k = 0; k < c.index.size(); ++k) {
    a += c.value[k] * x[static_cast<std::size_t>(c.index[k])];
  }
  return a;
}

MilpInstance MilpInstance::relaxed() const {
  MilpInstance out = *this;
  for (auto& v : out.variables) v.is_binary = false;
  return out;
}

}  // namespace stes
