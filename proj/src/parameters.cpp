#include "spme/parameters.hpp"

#include "spme/errors.hpp"
#include "spme/io.hpp"

#include <functional>
#include <vector>

namespace spme {

namespace {

struct NamedField {
    std::string key;
    std::function<double&(ParameterSet&)> ref;
};

const std::vector<NamedField>& all_fields() {
    static const std::vector<NamedField> fields = [] {
        std::vector<NamedField> v;
        auto add_electrode = [&v](const std::string& pre, ElectrodeParams ParameterSet::*region) {
            auto f = [region](double ElectrodeParams::*member) {
                return [region, member](ParameterSet& p) -> double& { return (p.*region).*member; };
            };
            v.push_back({pre + "porosity", f(&ElectrodeParams::porosity)});
            v.push_back({pre + "max_concentration", f(&ElectrodeParams::max_concentration)});
            v.push_back({pre + "conductivity", f(&ElectrodeParams::conductivity)});
            v.push_back({pre + "diffusivity", f(&ElectrodeParams::diffusivity)});
            v.push_back({pre + "particle_radius", f(&ElectrodeParams::particle_radius)});
            v.push_back({pre + "surface_area_density", f(&ElectrodeParams::surface_area)});
            v.push_back({pre + "reaction_rate", f(&ElectrodeParams::reaction_rate)});
            v.push_back({pre + "thickness", f(&ElectrodeParams::thickness)});
            v.push_back({pre + "reference_ocp", f(&ElectrodeParams::reference_ocp)});
        };
        add_electrode("n_", &ParameterSet::negative);
        v.push_back({"s_porosity", [](ParameterSet& p) -> double& { return p.separator.porosity; }});
        v.push_back({"s_thickness", [](ParameterSet& p) -> double& { return p.separator.thickness; }});
        add_electrode("p_", &ParameterSet::positive);
        auto shared = [&v](const char* key, double ParameterSet::*member) {
            v.push_back({key, [member](ParameterSet& p) -> double& { return p.*member; }});
        };
        shared("electrolyte_concentration", &ParameterSet::electrolyte_concentration);
        shared("electrolyte_diffusivity", &ParameterSet::electrolyte_diffusivity);
        shared("electrolyte_conductivity", &ParameterSet::electrolyte_conductivity);
        shared("faraday_constant", &ParameterSet::faraday);
        shared("gas_constant", &ParameterSet::gas_constant);
        shared("temperature", &ParameterSet::temperature);
        shared("bruggeman", &ParameterSet::bruggeman);
        shared("transference_number", &ParameterSet::transference);
        shared("typical_current_density", &ParameterSet::typical_current);
        return v;
    }();
    return fields;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw DomainError("invalid parameter: " + what);
}

void validate_electrode(const ElectrodeParams& e, const std::string& name) {
    require(e.porosity > 0.0 && e.porosity <= 1.0, name + " porosity must lie in (0, 1]");
    require(e.max_concentration > 0.0, name + " max concentration must be positive");
    require(e.conductivity > 0.0, name + " conductivity must be positive");
    require(e.diffusivity > 0.0, name + " diffusivity must be positive");
    require(e.particle_radius > 0.0, name + " particle radius must be positive");
    require(e.surface_area > 0.0, name + " surface area density must be positive");
    require(e.reaction_rate > 0.0, name + " reaction rate must be positive");
    require(e.thickness > 0.0, name + " thickness must be positive");
}

}  // namespace

void ParameterSet::validate() const {
    validate_electrode(negative, "negative");
    validate_electrode(positive, "positive");
    require(separator.porosity > 0.0 && separator.porosity <= 1.0, "separator porosity must lie in (0, 1]");
    require(separator.thickness > 0.0, "separator thickness must be positive");
    require(electrolyte_concentration > 0.0, "electrolyte concentration must be positive");
    require(electrolyte_diffusivity > 0.0, "electrolyte diffusivity must be positive");
    require(electrolyte_conductivity > 0.0, "electrolyte conductivity must be positive");
    require(faraday > 0.0 && gas_constant > 0.0 && temperature > 0.0, "F, R and T must be positive");
    require(bruggeman > 0.0, "Bruggeman coefficient must be positive");
    require(transference > 0.0 && transference < 1.0, "transference number must lie in (0, 1)");
}

std::string to_config_text(const ParameterSet& params) {
    ParameterSet copy = params;
    std::string out = "# cell parameters, SI units\n";
    for (const auto& field : all_fields()) {
        out += field.key + " = " + io::format_double(field.ref(copy)) + "\n";
    }
    return out;
}

ParameterSet parse_parameters(std::string_view text) {
    const auto doc = io::parse_ini(text);
    ParameterSet params;
    for (const auto& [section, entries] : doc) {
        if (!section.empty()) throw ConfigError("parameter files take no sections, found [" + section + "]");
        for (const auto& [key, value] : entries) {
            bool found = false;
            for (const auto& field : all_fields()) {
                if (field.key == key) {
                    field.ref(params) = io::parse_double(value);
                    found = true;
                    break;
                }
            }
            if (!found) throw ConfigError("unknown parameter key '" + key + "'");
        }
    }
    params.validate();
    return params;
}

ParameterSet load_parameters(const std::filesystem::path& path) {
    return parse_parameters(io::read_text(path));
}

void save_parameters(const ParameterSet& params, const std::filesystem::path& path) {
    io::write_text_atomic(path, to_config_text(params));
}

}  // namespace spme
