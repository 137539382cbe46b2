// Shared admissible configurations for the catalog cases, used by both the
// unit tests and the acceptance suite.  Constants were tuned so each case's
// derived metric stays SPD on its interval.
#pragma once

#include <map>
#include <string>

#include "bmx/catalog.hpp"

namespace bmx_testcfg {

inline bmx::SolutionCase make_case(
    bmx::CaseId id, double group_alpha,
    std::map<std::string, double> constants,
    std::map<std::string, std::string> functions, double t0, double t1) {
  bmx::SolutionCase c;
  c.id = id;
  c.group_alpha = group_alpha;
  c.constants = std::move(constants);
  for (auto& [k, v] : functions) c.functions[k] = bmx::dsl::parse(v);
  c.t0 = t0;
  c.t1 = t1;
  return c;
}

inline bmx::SolutionCase g1_identity() {
  return make_case(bmx::CaseId::G1_16b, 0.0,
                   {{"beta1", 1}, {"beta2", 2}, {"beta3", 3}},
                   {{"eta11", "1"},
                    {"eta12", "0"},
                    {"eta13", "0"},
                    {"eta22", "1"},
                    {"eta23", "0"},
                    {"eta33", "1"}},
                   0.0, 2.0);
}

inline bmx::SolutionCase g1_curved() {
  return make_case(bmx::CaseId::G1_16b, 0.0,
                   {{"beta1", 0.5}, {"beta2", -0.3}, {"beta3", 0.2}},
                   {{"eta11", "1 + 0.1*sin(t)"},
                    {"eta12", "0.1*cos(t)"},
                    {"eta13", "0.05"},
                    {"eta22", "1.2"},
                    {"eta23", "0.02*t"},
                    {"eta33", "1 + 0.05*t"}},
                   0.0, 2.0);
}

inline bmx::SolutionCase vii_4_1_1a() {
  return make_case(bmx::CaseId::VII_4_1_1a, 1.0,
                   {{"c", 1.0}, {"omega0", 1.0}},
                   {{"beta1", "0.2 + 0.055*t"},
                    {"beta2", "0.3 - 0.05*t"},
                    {"eta", "1"},
                    {"eta13", "0"},
                    {"eta23", "0"}},
                   0.0, 1.0);
}

inline bmx::SolutionCase vii_4_1_1b() {
  return make_case(bmx::CaseId::VII_4_1_1b, 1.0, {{"c", 1.0}},
                   {{"omega", "0.2 + t"},
                    {"beta1", "0.2 + 0.05*t"},
                    {"beta2", "0.3 - 0.04*t"},
                    {"eta", "1"},
                    {"eta13", "0"},
                    {"eta23", "0"}},
                   0.0, 1.0);
}

inline bmx::SolutionCase vii_4_1_1c() {
  return make_case(bmx::CaseId::VII_4_1_1c, 1.0, {{"a", 1.0}},
                   {{"beta1", "0.05 + 0.07*t"},
                    {"beta2", "0.3 - 0.03*t"},
                    {"eta", "1"},
                    {"eta13", "0"},
                    {"eta23", "0"}},
                   0.0, 1.0);
}

inline bmx::SolutionCase vii_4_1_2a() {
  return make_case(bmx::CaseId::VII_4_1_2a, 1.0, {{"a", 1.0}},
                   {{"beta2", "0.3 - 0.05*t"},
                    {"eta11", "1.5 + 0.1*sin(t)"},
                    {"eta", "1"},
                    {"eta13", "0"},
                    {"eta23", "0"}},
                   0.0, 1.0);
}

inline bmx::SolutionCase vii_4_1_2b() {
  return make_case(bmx::CaseId::VII_4_1_2b, 1.0, {{"a", 0.2}, {"c", 1.0}},
                   {{"omega", "0.5 + 0.3*t"},
                    {"eta11", "1"},
                    {"eta", "1 + 0.2*sin(t)"},
                    {"eta13", "0.2"},
                    {"eta23", "0.1"}},
                   0.0, 1.0);
}

inline bmx::SolutionCase vii_4_2_1() {
  return make_case(bmx::CaseId::VII_4_2_1, 1.0, {{"c", 1.0}},
                   {{"beta1", "0.4 - 0.2*t"},
                    {"beta2", "0.2 + 0.04*t"},
                    {"eta", "1"},
                    {"eta13", "0"},
                    {"eta23", "0"}},
                   0.0, 1.0);
}

inline bmx::SolutionCase vii_4_2_2() {
  return make_case(bmx::CaseId::VII_4_2_2, 1.0, {{"c", 1.0}},
                   {{"omega", "0.2 + t"},
                    {"eta22", "1.2"},
                    {"eta", "1"},
                    {"eta13", "0.1"},
                    {"eta23", "0"}},
                   0.0, 1.0);
}

/// Decreasing-angle configuration matching the alternate consistent branch;
/// here the branch variant, not the primary, carries the SPD metric.
inline bmx::SolutionCase vii_4_2_2_reversed() {
  return make_case(bmx::CaseId::VII_4_2_2, 1.0, {{"c", 1.0}},
                   {{"omega", "-t"},
                    {"eta22", "1.2"},
                    {"eta", "1"},
                    {"eta13", "0.1"},
                    {"eta23", "0"}},
                   0.1, 1.5);
}

inline std::vector<bmx::SolutionCase> all_admissible() {
  return {g1_identity(),  vii_4_1_1a(), vii_4_1_1b(), vii_4_1_1c(),
          vii_4_1_2a(),   vii_4_1_2b(), vii_4_2_1(),  vii_4_2_2()};
}

}  // namespace bmx_testcfg
