#pragma once

// Sparse mixed-binary linear program: minimize cost^T x subject to rows
// (coefficient vector, sense, rhs) and per-variable bounds.

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace stes {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Sense : std::uint8_t { Equal, LessEqual, GreaterEqual };

// What a row encodes. Used by the audit and by row naming.
enum class RowKind : std::uint8_t {
  DemandElectric,
  DemandHeat,
  PvBalance,
  SolarThermalCap,
  AcHeatCap,
  StateBattery,
  StateHeat,
  HeatPumpRatio,
  HeatPumpCap,
  ChargeBound,
  DischargeBound,
  EndLevel,
  ObjectiveCut,
  Other,
};

inline constexpr std::size_t kRowKindCount =
    static_cast<std::size_t>(RowKind::Other) + 1;

const char* to_string(RowKind kind);

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInfinity;
  bool is_binary = false;
  double cost = 0.0;

  friend bool operator==(const Variable&, const Variable&) = default;
};

struct Constraint {
  std::string name;
  RowKind kind = RowKind::Other;
  std::vector<int> index;
  std::vector<double> value;
  Sense sense = Sense::Equal;
  double rhs = 0.0;

  friend bool operator==(const Constraint&, const Constraint&) = default;
};

// Where the flow, state and binary variables of a window live. Empty for
// instances that do not come from the window builder (e.g. read from an LP
// file). Index -1 marks an absent binary.
struct VariableLayout {
  std::size_t steps = 0;
  // flow[arc][t]
  std::vector<std::vector<int>> flow;
  // state[s][t], s = 0 battery, s = 1 heat storage
  std::array<std::vector<int>, 2> state;
  // binary[s][t], -1 where the step carries no binary
  std::array<std::vector<int>, 2> binary;

  friend bool operator==(const VariableLayout&, const VariableLayout&) =
      default;
};

struct MilpInstance {
  std::vector<Variable> variables;
  std::vector<Constraint> constraints;
  VariableLayout layout;

  int add_variable(Variable v);
  int add_constraint(Constraint c);

  std::size_t num_binaries() const;
  std::size_t num_nonzeros() const;

  // cost^T x
  double objective(const std::vector<double>& x) const;
  // Row activity a_i^T x.
  double activity(std::size_t row, const std::vector<double>& x) const;

  // Copy with every binary relaxed to a continuous [lower, upper] variable.
  MilpInstance relaxed() const;
};

}  // namespace stes
