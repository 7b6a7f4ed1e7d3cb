#include "stes/lp_format.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include <fmt/format.h>

#include "stes/error.hpp"

namespace stes {
namespace {

constexpr std::size_t kTermsPerLine = 8;

std::string number(double v) {
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  return fmt::format("{}", v);
}

void write_terms(std::ostream& out, const std::vector<int>& index,
                 const std::vector<double>& value,
                 const std::vector<Variable>& vars, bool keep_zero = false) {
  std::size_t written = 0;
  for (std::size_t k = 0; k < index.size(); ++k) {
    const double c = value[k];
    if (c == 0.0 && !keep_zero) continue;
    if (written > 0 && written % kTermsPerLine == 0) out << "\n   ";
    out << (std::signbit(c) ? " - " : " + ") << number(std::abs(c)) << ' '
        << vars[static_cast<std::size_t>(index[k])].name;
    ++written;
  }
  if (written == 0 && !vars.empty()) out << " 0 " << vars.front().name;
}

// ---------------------------------------------------------------------------
// Reader

enum class Tok { Name, Number, Op, Sign, Colon };

struct Token {
  Tok kind;
  std::string text;
  double value = 0.0;
  std::size_t line = 0;
  bool line_start = false;
};

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) ||
         std::string_view("!\"#$%&()/,.;?@_`'{}|~[]").find(c) !=
             std::string_view::npos;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return s;
}

std::vector<Token> tokenize(std::istream& in) {
  std::vector<Token> toks;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto c = line.find('\\'); c != std::string::npos) line.resize(c);
    bool first = true;
    std::size_t i = 0;
    while (i < line.size()) {
      const char c = line[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
        continue;
      }
      Token t{Tok::Name, {}, 0.0, lineno, first};
      first = false;
      if (c == '<' || c == '>' || c == '=') {
        std::size_t j = i + 1;
        while (j < line.size() && (line[j] == '=' || line[j] == '<' ||
                                   line[j] == '>')) {
          ++j;
        }
        std::string op = line.substr(i, j - i);
        if (op == "<" || op == "<=" || op == "=<") {
          t.text = "<=";
        } else if (op == ">" || op == ">=" || op == "=>") {
          t.text = ">=";
        } else if (op == "=") {
          t.text = "=";
        } else {
          throw InputError(fmt::format("line {}: bad operator '{}'", lineno, op));
        }
        t.kind = Tok::Op;
        i = j;
      } else if (c == '+' || c == '-') {
        t.kind = Tok::Sign;
        t.text = std::string(1, c);
        ++i;
      } else if (c == ':') {
        t.kind = Tok::Colon;
        ++i;
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        std::size_t j = i;
        while (j < line.size() &&
               (std::isdigit(static_cast<unsigned char>(line[j])) ||
                line[j] == '.')) {
          ++j;
        }
        if (j < line.size() && (line[j] == 'e' || line[j] == 'E')) {
          std::size_t k = j + 1;
          if (k < line.size() && (line[k] == '+' || line[k] == '-')) ++k;
          if (k < line.size() && std::isdigit(static_cast<unsigned char>(line[k]))) {
            while (k < line.size() &&
                   std::isdigit(static_cast<unsigned char>(line[k]))) {
              ++k;
            }
            j = k;
          }
        }
        t.kind = Tok::Number;
        t.text = line.substr(i, j - i);
        const auto res =
            std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.value);
        if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size()) {
          throw InputError(
              fmt::format("line {}: bad number '{}'", lineno, t.text));
        }
        i = j;
      } else if (is_name_char(c)) {
        std::size_t j = i;
        while (j < line.size() && is_name_char(line[j])) ++j;
        t.text = line.substr(i, j - i);
        const std::string lw = lower(t.text);
        if (lw == "inf" || lw == "infinity") {
          t.kind = Tok::Number;
          t.value = kInfinity;
        }
        i = j;
      } else {
        throw InputError(
            fmt::format("line {}: unexpected character '{}'", lineno, c));
      }
      toks.push_back(std::move(t));
    }
  }
  return toks;
}

enum class Section { None, Objective, Constraints, Bounds, Binaries, End };

// Section keyword starting at toks[i], with the number of tokens it spans.
std::pair<Section, std::size_t> section_at(const std::vector<Token>& toks,
                                           std::size_t i, bool& maximize) {
  const Token& t = toks[i];
  if (!t.line_start || t.kind != Tok::Name) return {Section::None, 0};
  const std::string w = lower(t.text);
  if (w == "minimize" || w == "minimum" || w == "min") {
    maximize = false;
    return {Section::Objective, 1};
  }
  if (w == "maximize" || w == "maximum" || w == "max") {
    maximize = true;
    return {Section::Objective, 1};
  }
  if (w == "st" || w == "s.t." || w == "st." ) return {Section::Constraints, 1};
  if ((w == "subject" || w == "such") && i + 1 < toks.size() &&
      toks[i + 1].line == t.line && toks[i + 1].kind == Tok::Name) {
    const std::string w2 = lower(toks[i + 1].text);
    if ((w == "subject" && w2 == "to") || (w == "such" && w2 == "that")) {
      return {Section::Constraints, 2};
    }
  }
  if (w == "bounds" || w == "bound") return {Section::Bounds, 1};
  if (w == "binaries" || w == "binary" || w == "bin") {
    return {Section::Binaries, 1};
  }
  if (w == "general" || w == "generals" || w == "gen" || w == "integers") {
    throw InputError(
        fmt::format("line {}: general integer variables are not supported",
                    t.line));
  }
  if (w == "end") return {Section::End, 1};
  return {Section::None, 0};
}

class LpReader {
 public:
  explicit LpReader(std::vector<Token> toks) : toks_(std::move(toks)) {}

  MilpInstance read() {
    std::size_t i = 0;
    Section sec = Section::None;
    bool maximize = false;
    // Split the token stream into sections first.
    std::vector<std::pair<Section, std::pair<std::size_t, std::size_t>>> parts;
    while (i < toks_.size()) {
      auto [s, span] = section_at(toks_, i, maximize);
      if (s != Section::None) {
        if (!parts.empty()) parts.back().second.second = i;
        parts.push_back({s, {i + span, toks_.size()}});
        sec = s;
        i += span;
        if (s == Section::End) break;
        continue;
      }
      if (sec == Section::None) {
        throw InputError(fmt::format("line {}: expected a section keyword",
                                     toks_[i].line));
      }
      ++i;
    }
    if (parts.empty() || parts.front().first != Section::Objective) {
      throw InputError("LP file must start with Minimize or Maximize");
    }
    for (const auto& [s, range] : parts) {
      switch (s) {
        case Section::Objective: parse_objective(range.first, range.second); break;
        case Section::Constraints: parse_rows(range.first, range.second); break;
        case Section::Bounds: parse_bounds(range.first, range.second); break;
        case Section::Binaries: parse_binaries(range.first, range.second); break;
        case Section::End:
        case Section::None: break;
      }
    }
    if (maximize) {
      for (auto& v : inst_.variables) v.cost = -v.cost;
    }
    return std::move(inst_);
  }

 private:
  int var(const std::string& name) {
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    const int j = inst_.add_variable({name, 0.0, kInfinity, false, 0.0});
    index_.emplace(name, j);
    return j;
  }

  [[noreturn]] void fail(std::size_t i, const std::string& what) const {
    const std::size_t line = i < toks_.size() ? toks_[i].line
                             : toks_.empty()  ? 0
                                              : toks_.back().line;
    throw InputError(fmt::format("line {}: {}", line, what));
  }

  // Parses "[+|-] [coef] name" terms until an operator or the end of the
  // range. A bare number is a constant.
  void parse_expr(std::size_t& i, std::size_t end, std::vector<int>& idx,
                  std::vector<double>& val, double& constant) {
    while (i < end && toks_[i].kind != Tok::Op) {
      double sign = 1.0;
      bool any = false;
      while (i < end && toks_[i].kind == Tok::Sign) {
        if (toks_[i].text == "-") sign = -sign;
        ++i;
        any = true;
      }
      double coef = 1.0;
      bool have_coef = false;
      if (i < end && toks_[i].kind == Tok::Number) {
        coef = toks_[i].value;
        have_coef = true;
        ++i;
      }
      if (i < end && toks_[i].kind == Tok::Name) {
        idx.push_back(var(toks_[i].text));
        val.push_back(sign * coef);
        ++i;
      } else if (have_coef) {
        constant += sign * coef;
      } else if (any) {
        fail(i, "dangling sign");
      } else {
        fail(i, "expected a term");
      }
    }
  }

  void parse_objective(std::size_t i, std::size_t end) {
    if (i + 1 < end && toks_[i].kind == Tok::Name &&
        toks_[i + 1].kind == Tok::Colon) {
      i += 2;
    }
    std::vector<int> idx;
    std::vector<double> val;
    double constant = 0.0;
    parse_expr(i, end, idx, val, constant);
    if (i != end) fail(i, "unexpected operator in objective");
    for (std::size_t k = 0; k < idx.size(); ++k) {
      inst_.variables[static_cast<std::size_t>(idx[k])].cost += val[k];
    }
    if (constant != 0.0) fail(i, "objective constants are not supported");
  }

  void parse_rows(std::size_t i, std::size_t end) {
    while (i < end) {
      Constraint c;
      if (i + 1 < end && toks_[i].kind == Tok::Name &&
          toks_[i + 1].kind == Tok::Colon) {
        c.name = toks_[i].text;
        i += 2;
      } else {
        c.name = fmt::format("R{}", inst_.constraints.size());
      }
      double constant = 0.0;
      parse_expr(i, end, c.index, c.value, constant);
      if (i >= end || toks_[i].kind != Tok::Op) fail(i, "expected <=, >= or =");
      const std::string op = toks_[i].text;
      ++i;
      double sign = 1.0;
      while (i < end && toks_[i].kind == Tok::Sign) {
        if (toks_[i].text == "-") sign = -sign;
        ++i;
      }
      if (i >= end || toks_[i].kind != Tok::Number) {
        fail(i, "expected a right-hand side number");
      }
      c.rhs = sign * toks_[i].value - constant;
      ++i;
      c.sense = op == "=" ? Sense::Equal
                : op == "<=" ? Sense::LessEqual
                             : Sense::GreaterEqual;
      c.kind = row_kind_from_name(c.name);
      inst_.add_constraint(std::move(c));
    }
  }

  // Signed number (possibly infinite) at toks_[i].
  bool signed_number(std::size_t& i, std::size_t end, double& out) const {
    std::size_t j = i;
    double sign = 1.0;
    while (j < end && toks_[j].kind == Tok::Sign) {
      if (toks_[j].text == "-") sign = -sign;
      ++j;
    }
    if (j < end && toks_[j].kind == Tok::Number) {
      out = sign * toks_[j].value;
      i = j + 1;
      return true;
    }
    return false;
  }

  void parse_bounds(std::size_t i, std::size_t end) {
    while (i < end) {
      const std::size_t line = toks_[i].line;
      std::size_t stop = i;
      while (stop < end && toks_[stop].line == line) ++stop;
      parse_bound_line(i, stop);
      i = stop;
    }
  }

  void parse_bound_line(std::size_t i, std::size_t end) {
    double lo_num = 0.0;
    if (signed_number(i, end, lo_num)) {
      // l <= x [<= u]   or   u >= x [>= l]
      if (i >= end || toks_[i].kind != Tok::Op) fail(i, "expected operator");
      const std::string op1 = toks_[i++].text;
      if (i >= end || toks_[i].kind != Tok::Name) fail(i, "expected variable");
      Variable& v = inst_.variables[static_cast<std::size_t>(var(toks_[i++].text))];
      apply_bound(v, op1 == "<=" ? ">=" : op1 == ">=" ? "<=" : "=", lo_num);
      if (i < end) {
        if (toks_[i].kind != Tok::Op) fail(i, "expected operator");
        const std::string op2 = toks_[i++].text;
        double hi_num = 0.0;
        if (!signed_number(i, end, hi_num)) fail(i, "expected number");
        apply_bound(v, op2, hi_num);
      }
    } else {
      if (toks_[i].kind != Tok::Name) fail(i, "expected variable");
      Variable& v = inst_.variables[static_cast<std::size_t>(var(toks_[i++].text))];
      if (i < end && toks_[i].kind == Tok::Name && lower(toks_[i].text) == "free") {
        v.lower = -kInfinity;
        v.upper = kInfinity;
        ++i;
      } else {
        if (i >= end || toks_[i].kind != Tok::Op) fail(i, "expected operator");
        const std::string op = toks_[i++].text;
        double num = 0.0;
        if (!signed_number(i, end, num)) fail(i, "expected number");
        apply_bound(v, op, num);
      }
    }
    if (i != end) fail(i, "trailing tokens in bound");
  }

  // Applies "x op value".
  static void apply_bound(Variable& v, const std::string& op, double value) {
    if (op == "<=") {
      v.upper = value;
    } else if (op == ">=") {
      v.lower = value;
    } else {
      v.lower = v.upper = value;
    }
  }

  void parse_binaries(std::size_t i, std::size_t end) {
    for (; i < end; ++i) {
      if (toks_[i].kind != Tok::Name) fail(i, "expected variable name");
      const int j = var(toks_[i].text);
      Variable& v = inst_.variables[static_cast<std::size_t>(j)];
      v.is_binary = true;
      binary_seen_.push_back(j);
    }
    // Default binary bounds are [0, 1] unless the Bounds section narrowed them.
    for (int j : binary_seen_) {
      Variable& v = inst_.variables[static_cast<std::size_t>(j)];
      if (v.upper == kInfinity) v.upper = 1.0;
    }
  }

  std::vector<Token> toks_;
  MilpInstance inst_;
  std::unordered_map<std::string, int> index_;
  std::vector<int> binary_seen_;
};

}  // namespace

RowKind row_kind_from_name(const std::string& name) {
  static const std::pair<std::string_view, RowKind> prefixes[] = {
      {"dmd_DE_", RowKind::DemandElectric},
      {"dmd_DH_", RowKind::DemandHeat},
      {"pv_t", RowKind::PvBalance},
      {"st_t", RowKind::SolarThermalCap},
      {"ac_t", RowKind::AcHeatCap},
      {"soe_SE_", RowKind::StateBattery},
      {"soe_SH_", RowKind::StateHeat},
      {"hp_ratio_", RowKind::HeatPumpRatio},
      {"hp_cap_", RowKind::HeatPumpCap},
      {"ch_", RowKind::ChargeBound},
      {"dis_", RowKind::DischargeBound},
      {"end_", RowKind::EndLevel},
      {"objective_cut_", RowKind::ObjectiveCut},
  };
  for (const auto& [prefix, kind] : prefixes) {
    if (name.starts_with(prefix)) return kind;
  }
  return RowKind::Other;
}

void write_lp(std::ostream& out, const MilpInstance& inst) {
  const auto& vars = inst.variables;
  out << "\\ dispatch model: " << vars.size() << " variables, "
      << inst.constraints.size() << " rows\n";
  // Every column appears in the objective, zero costs included, so that
  // readers recover the column order from first appearance.
  out << "Minimize\n obj:";
  std::vector<int> idx;
  std::vector<double> val;
  for (std::size_t j = 0; j < vars.size(); ++j) {
    idx.push_back(static_cast<int>(j));
    val.push_back(vars[j].cost);
  }
  write_terms(out, idx, val, vars, true);
  out << "\nSubject To\n";
  for (const auto& c : inst.constraints) {
    out << ' ' << c.name << ':';
    write_terms(out, c.index, c.value, vars);
    switch (c.sense) {
      case Sense::Equal: out << " = "; break;
      case Sense::LessEqual: out << " <= "; break;
      case Sense::GreaterEqual: out << " >= "; break;
    }
    out << number(c.rhs) << '\n';
  }
  out << "Bounds\n";
  for (const auto& v : vars) {
    const double def_hi = v.is_binary ? 1.0 : kInfinity;
    if (v.lower == 0.0 && v.upper == def_hi) continue;
    if (v.lower == -kInfinity && v.upper == kInfinity) {
      out << ' ' << v.name << " free\n";
    } else if (v.lower == v.upper) {
      out << ' ' << v.name << " = " << number(v.lower) << '\n';
    } else {
      out << ' ' << number(v.lower) << " <= " << v.name << " <= "
          << number(v.upper) << '\n';
    }
  }
  bool any_binary = false;
  for (const auto& v : vars) {
    if (!v.is_binary) continue;
    if (!any_binary) out << "Binaries\n";
    any_binary = true;
    out << ' ' << v.name << '\n';
  }
  out << "End\n";
}

std::string to_lp_string(const MilpInstance& inst) {
  std::ostringstream os;
  write_lp(os, inst);
  return os.str();
}

MilpInstance read_lp(std::istream& in) {
  return LpReader(tokenize(in)).read();
}

void write_solution(std::ostream& out, const MilpInstance& inst,
                    const SolveResult& result) {
  out << "# status " << to_string(result.status) << '\n';
  out << "# objective " << number(result.objective) << '\n';
  for (std::size_t j = 0; j < inst.variables.size() && j < result.x.size();
       ++j) {
    out << inst.variables[j].name << ' ' << number(result.x[j]) << '\n';
  }
}

SolutionFile read_solution(std::istream& in) {
  SolutionFile sol;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream is(line);
    if (line.front() == '#') {
      std::string hash, key;
      is >> hash >> key;
      if (key == "status") {
        is >> sol.status;
      } else if (key == "objective") {
        std::string v;
        is >> v;
        sol.objective = std::stod(v);
      }
      continue;
    }
    std::string name, v;
    if (!(is >> name >> v)) {
      throw InputError(fmt::format("solution line {}: expected 'name value'",
                                   lineno));
    }
    try {
      sol.values[name] = std::stod(v);
    } catch (const std::exception&) {
      throw InputError(
          fmt::format("solution line {}: bad value '{}'", lineno, v));
    }
  }
  return sol;
}

std::vector<double> align_solution(const SolutionFile& sol,
                                   const MilpInstance& inst) {
  std::vector<double> x;
  x.reserve(inst.variables.size());
  for (const auto& v : inst.variables) {
    auto it = sol.values.find(v.name);
    if (it == sol.values.end()) {
      throw InputError("solution file lacks variable " + v.name);
    }
    x.push_back(it->second);
  }
  return x;
}

}  // namespace stes
