#pragma once

#include "pcond/geometry.hpp"

#include <json.hpp>
#include <string>

namespace pcond::geometry {

// JSON layout:
//   { "profile": { "kind": "flat" | "power", "params": {...} },
//     "epsilon": 0.01,
//     "outer": { "radius": 4.0 },
//     "inclusion_closure": { "cap_radius": 0.25, "split": 0.5 },
//     "dirichlet": { "coeffs": [[a0, b0], [a1, b1], ...] } }
// Flat params: sigma_half_width, curvature_coeff, patch_radius.
// Power params: gamma, amp (or amp_plus / amp_minus), c0, patch_radius.
// Missing optional keys take the defaults of DomainSpec::with_profile.

nlohmann::json to_json(const DomainSpec& spec);
DomainSpec spec_from_json(const nlohmann::json& doc);

DomainSpec load_spec(const std::string& path);
void save_spec(const DomainSpec& spec, const std::string& path);

} // namespace pcond::geometry
