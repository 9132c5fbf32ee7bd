#pragma once

#include "jumpsas/core.hpp"

#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

namespace jumpsas::verify {

struct CheckResult {
    std::string name;
    double statistic = 0.0;
    double threshold = 0.0;
    bool pass = false;
    std::string detail;

    nlohmann::json to_json() const;
};

/// Radii and sample sizes for the numerical theory checks. The defaults are
/// the ones the acceptance thresholds were pinned against.
struct TheoryOptions {
    std::uint64_t seed = 7280841;
    double lemma1_radius = 1e-3;
    double theorem1_radius = 1e-2;
    double lemma3_radius = 1e-3;
    double theorem2_radius = 5e-3;
    double theorem3_radius = 5e-3;
    double corollary1_radius = 2e-2; // compared against its half
    int theorem1_m_outer = 100000;
    int theorem2_m_outer = 20000;
    int theorem3_m_outer = 2000000;
    int corollary1_m_outer = 1000000;
};

CheckResult check_a_p_constants();
CheckResult check_lemma1(const TheoryOptions& opts);
CheckResult check_theorem1(const TheoryOptions& opts);
CheckResult check_lemma3_single(const TheoryOptions& opts);
CheckResult check_lemma3_two_jumps(const TheoryOptions& opts);
CheckResult check_theorem2(const TheoryOptions& opts);
CheckResult check_theorem3(const TheoryOptions& opts, const std::string& fn);
CheckResult check_corollary1_smooth_rate(const TheoryOptions& opts);
CheckResult check_corollary1_jump_stable(const TheoryOptions& opts);

std::vector<CheckResult> run_all(const TheoryOptions& opts = {});

} // namespace jumpsas::verify
