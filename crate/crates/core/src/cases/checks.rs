//! Pass/fail thresholds behind the `check` command.

use std::collections::BTreeMap;
use std::fmt;

use super::CaseName;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub metric: &'static str,
    pub value: f64,
    /// `true` when `value` must not exceed `limit`, `false` for a lower bound.
    pub upper: bool,
    pub limit: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        if self.upper {
            self.value <= self.limit
        } else {
            self.value >= self.limit
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = if self.upper { "<=" } else { ">=" };
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {} = {:.6e} ({op} {:e})", self.metric, self.value, self.limit)
    }
}

/// Thresholds for the metrics of `case`. A missing metric reads as NaN and
/// fails.
pub fn acceptance_checks(case: CaseName, metrics: &BTreeMap<String, f64>) -> Vec<Check> {
    let table: &[(&'static str, bool, f64)] = match case {
        CaseName::PatchVertical => &[
            ("p_midline_rel_l2", true, 0.02),
            ("p_center_abs_err", true, 0.02),
            ("vx_mean_rel_err", true, 0.02),
        ],
        CaseName::PatchHorizontal => &[
            ("p_linf", true, 0.02),
            ("vx_mean_lower_rel_err", true, 0.05),
            ("vx_mean_upper_rel_err", true, 0.05),
        ],
        CaseName::PatchInclined => &[("p_midline_rel_l2_fd", true, 0.03)],
        CaseName::TransportHole => &[
            ("c_min", false, -1e-3),
            ("c_max", true, 1.0 + 1e-3),
            ("fd_c_min", true, -f64::MIN_POSITIVE),
        ],
        CaseName::ReactionUniform | CaseName::ReactionExplicit => &[
            ("c_a_min", false, -1e-3),
            ("c_b_min", false, -1e-3),
            ("c_c_min", false, -1e-3),
            ("c_a_max", true, 1.0 + 1e-3),
            ("c_b_max", true, 1.0 + 1e-3),
            ("c_c_max", true, 1.0 + 1e-3),
            ("c_c_corner_max", true, 1e-2),
            ("c_c_peak_y_min", false, 0.35),
            ("c_c_peak_y_max", true, 0.75),
            ("c_a_upper_lower_ratio", false, 3.0),
            ("c_b_lower_upper_ratio", false, 3.0),
        ],
        CaseName::Custom => &[("p_linf", true, 0.1), ("vx_mean_rel_err", true, 0.1)],
    };
    table
        .iter()
        .map(|&(metric, upper, limit)| Check {
            metric,
            value: metrics.get(metric).copied().unwrap_or(f64::NAN),
            upper,
            limit,
        })
        .collect()
}
