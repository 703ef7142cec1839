#include "pcond/spec_json.hpp"

#include <fstream>
#include <stdexcept>

namespace pcond::geometry {

using nlohmann::json;

json to_json(const DomainSpec& spec)
{
    json doc;
    if (const auto* f = std::get_if<FlatProfile>(&spec.profile)) {
        doc["profile"] = {{"kind", "flat"},
                          {"params",
                           {{"sigma_half_width", f->sigma_half_width},
                            {"curvature_coeff", f->curvature_coeff},
                            {"patch_radius", f->patch_radius}}}};
    } else {
        const auto& p = std::get<PowerProfile>(spec.profile);
        json params = {{"gamma", p.gamma}, {"c0", p.c0}, {"patch_radius", p.patch_radius}};
        if (p.constant_amp()) {
            params["amp"] = p.amp_plus;
        } else {
            params["amp_plus"] = p.amp_plus;
            params["amp_minus"] = p.amp_minus;
        }
        doc["profile"] = {{"kind", "power"}, {"params", params}};
    }
    doc["epsilon"] = spec.epsilon;
    doc["outer"] = {{"radius", spec.outer_radius}};
    doc["inclusion_closure"] = {{"cap_radius", spec.cap_radius}, {"split", spec.split}};
    json coeffs = json::array();
    for (const auto& c : spec.dirichlet.coeffs)
        coeffs.push_back({c[0], c[1]});
    doc["dirichlet"] = {{"coeffs", coeffs}};
    return doc;
}

DomainSpec spec_from_json(const json& doc)
{
    const json& prof = doc.at("profile");
    const std::string kind = prof.at("kind").get<std::string>();
    const json params = prof.value("params", json::object());
    Profile profile;
    if (kind == "flat") {
        FlatProfile f;
        f.sigma_half_width = params.value("sigma_half_width", f.sigma_half_width);
        f.curvature_coeff = params.value("curvature_coeff", f.curvature_coeff);
        f.patch_radius = params.value("patch_radius", f.patch_radius);
        profile = f;
    } else if (kind == "power") {
        PowerProfile p;
        p.gamma = params.value("gamma", p.gamma);
        const double amp = params.value("amp", 1.0);
        p.amp_plus = params.value("amp_plus", amp);
        p.amp_minus = params.value("amp_minus", amp);
        p.c0 = params.value("c0", p.c0);
        p.patch_radius = params.value("patch_radius", p.patch_radius);
        profile = p;
    } else {
        throw std::invalid_argument("unknown profile kind '" + kind + "'");
    }

    DomainSpec spec = DomainSpec::with_profile(profile, doc.value("epsilon", 0.01));
    if (doc.contains("outer"))
        spec.outer_radius = doc["outer"].value("radius", spec.outer_radius);
    if (doc.contains("inclusion_closure")) {
        spec.cap_radius = doc["inclusion_closure"].value("cap_radius", spec.cap_radius);
        spec.split = doc["inclusion_closure"].value("split", spec.split);
    }
    if (doc.contains("dirichlet")) {
        spec.dirichlet.coeffs.clear();
        for (const auto& c : doc["dirichlet"].at("coeffs"))
            spec.dirichlet.coeffs.push_back({c.at(0).get<double>(), c.at(1).get<double>()});
    }
    return spec;
}

DomainSpec load_spec(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open spec file " + path);
    return spec_from_json(json::parse(in));
}

void save_spec(const DomainSpec& spec, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write spec file " + path);
    out << to_json(spec).dump(2) << '\n';
}

} // namespace pcond::geometry
