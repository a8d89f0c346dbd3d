#include "ghost/scenario.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "ghost/errors.hpp"

namespace ghost {

namespace pt = boost::property_tree;

namespace {

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& text, const std::string& key) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v))
        fail(ErrorKind::InvalidInput, key + ": not a finite number: '" + text + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& text, const std::string& key) {
    std::uint64_t v = 0;
    const char* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end) fail(ErrorKind::InvalidInput, key + ": not an unsigned integer: '" + text + "'");
    return v;
}

bool parse_bool(const std::string& text, const std::string& key) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    fail(ErrorKind::InvalidInput, key + ": expected true or false, got '" + text + "'");
}

std::string resolve(const std::string& path, const std::string& base_dir) {
    std::filesystem::path p(path);
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    return std::filesystem::absolute(p).lexically_normal().string();
}

// Reads one section and rejects keys it does not know.
class Section {
public:
    Section(const pt::ptree& root, const std::string& name, std::set<std::string> known) : name_(name) {
        if (auto child = root.get_child_optional(name)) node_ = &*child;
        if (!node_) return;
        for (const auto& [key, value] : *node_) {
            if (!value.empty()) fail(ErrorKind::InvalidInput, "[" + name + "] " + key + ": nested values are not allowed");
            if (!known.count(key)) fail(ErrorKind::InvalidInput, "[" + name + "] unknown key '" + key + "'");
        }
    }

    std::optional<std::string> text(const std::string& key) const {
        if (!node_) return std::nullopt;
        auto v = node_->get_optional<std::string>(key);
        if (!v) return std::nullopt;
        if (v->empty()) fail(ErrorKind::InvalidInput, label(key) + ": empty value");
        return *v;
    }
    std::optional<double> number(const std::string& key) const {
        auto t = text(key);
        return t ? std::optional<double>(parse_double(*t, label(key))) : std::nullopt;
    }
    std::string label(const std::string& key) const { return "[" + name_ + "] " + key; }

private:
    std::string name_;
    const pt::ptree* node_ = nullptr;
};

Scheme parse_scheme(const std::string& t) {
    if (t == "I" || t == "1") return Scheme::SchemeI;
    if (t == "II" || t == "2") return Scheme::SchemeII;
    fail(ErrorKind::InvalidInput, "[geometry] scheme: expected I or II, got '" + t + "'");
}

SourceKind parse_source(const std::string& t) {
    if (t == "thermal" || t == "classical") return SourceKind::ThermalClassical;
    if (t == "quantum" || t == "entangled") return SourceKind::QuantumEntangled;
    if (t == "dual") return SourceKind::DualTypeI;
    fail(ErrorKind::InvalidInput, "[source] kind: expected thermal, quantum or dual, got '" + t + "'");
}

const char* source_key(SourceKind s) {
    switch (s) {
        case SourceKind::ThermalClassical: return "thermal";
        case SourceKind::QuantumEntangled: return "quantum";
        case SourceKind::DualTypeI: return "dual";
    }
    return "quantum";
}

ObjectSpec parse_object(const Section& sec, const std::string& base_dir) {
    const std::string type = *sec.text("type");
    auto need = [&](const char* key) {
        auto v = sec.number(key);
        if (!v) fail(ErrorKind::InvalidInput, sec.label(key) + " is required for type " + type);
        return *v;
    };
    if (type == "single_slit") return SingleSlit{need("width"), sec.number("center").value_or(0.0)};
    if (type == "double_slit") return DoubleSlit{need("separation"), need("width")};
    if (type == "gaussian") return GaussianAperture{need("waist")};
    if (type == "uniform") return Uniform{};
    if (type == "table") {
        auto p = sec.text("path");
        if (!p) fail(ErrorKind::InvalidInput, sec.label("path") + " is required for type table");
        return TableFile{resolve(*p, base_dir)};
    }
    fail(ErrorKind::InvalidInput, sec.label("type") + ": unknown object type '" + type + "'");
}

void put_object(std::ostream& os, const ObjectSpec& spec) {
    std::visit(
        [&](const auto& o) {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, SingleSlit>)
                os << "type = single_slit\nwidth = " << fmt(o.width) << "\ncenter = " << fmt(o.center) << '\n';
            else if constexpr (std::is_same_v<T, DoubleSlit>)
                os << "type = double_slit\nseparation = " << fmt(o.separation) << "\nwidth = " << fmt(o.width) << '\n';
            else if constexpr (std::is_same_v<T, GaussianAperture>)
                os << "type = gaussian\nwaist = " << fmt(o.waist) << '\n';
            else if constexpr (std::is_same_v<T, TableFile>)
                os << "type = table\npath = " << o.path << '\n';
            else
                os << "type = uniform\n";
        },
        spec);
}

}  // namespace

std::string spectrum_to_string(const SpectrumSpec& spec) {
    return std::visit(
        [](const auto& s) -> std::string {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, FlatSpectrum>)
                return std::isinf(s.bandwidth) ? "flat" : "flat:" + fmt(s.bandwidth);
            else if constexpr (std::is_same_v<T, GaussianSpectrum>)
                return "gaussian:" + fmt(s.width);
            else
                return "table:" + s.path;
        },
        spec);
}

SpectrumSpec spectrum_from_string(const std::string& text, const std::string& base_dir) {
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (head == "flat") {
        if (arg.empty() || arg == "inf") return FlatSpectrum{};
        return FlatSpectrum{parse_double(arg, "flat bandwidth")};
    }
    if (head == "gaussian" && !arg.empty()) return GaussianSpectrum{parse_double(arg, "gaussian width")};
    if (head == "table" && !arg.empty()) return TableFile{resolve(arg, base_dir)};
    fail(ErrorKind::InvalidInput, "spectrum: expected flat, flat:<b>, gaussian:<sigma> or table:<path>, got '" + text + "'");
}

Scenario parse_scenario(const std::string& text, const std::string& base_dir) {
    pt::ptree root;
    try {
        std::istringstream in(text);
        pt::read_ini(in, root);
    } catch (const pt::ini_parser_error& e) {
        fail(ErrorKind::InvalidInput, std::string("scenario syntax: ") + e.what());
    }
    for (const auto& [name, child] : root) {
        static const std::set<std::string> sections{"geometry", "source", "object", "grid", "run"};
        if (child.empty() || !sections.count(name))
            fail(ErrorKind::InvalidInput, "unknown section or top-level key '" + name + "'");
    }

    Scenario s;
    const Section geo(root, "geometry", {"scheme", "z1", "z2", "z3", "f", "fc", "wavelength_nm"});
    if (auto t = geo.text("scheme")) s.scheme = parse_scheme(*t);
    s.z1 = geo.number("z1");
    s.z2 = geo.number("z2");
    s.z3 = geo.number("z3");
    s.f = geo.number("f");
    s.fc = geo.number("fc");
    s.wavelength_nm = geo.number("wavelength_nm");
    if (s.wavelength_nm && !(*s.wavelength_nm > 0.0)) fail(ErrorKind::InvalidInput, "[geometry] wavelength_nm must be > 0");

    const Section src(root, "source", {"kind", "thermal_spectrum", "biphoton_spectrum", "w_cl", "w_qu"});
    if (auto t = src.text("kind")) s.source = parse_source(*t);
    if (auto t = src.text("thermal_spectrum")) s.thermal_spectrum = spectrum_from_string(*t, base_dir);
    if (auto t = src.text("biphoton_spectrum")) s.biphoton_spectrum = spectrum_from_string(*t, base_dir);
    s.weights.classical = src.number("w_cl").value_or(1.0);
    s.weights.quantum = src.number("w_qu").value_or(1.0);
    validate(s.weights);

    const Section obj(root, "object", {"type", "width", "center", "separation", "waist", "path"});
    if (obj.text("type")) s.object = parse_object(obj, base_dir);

    const Section grid(root, "grid", {"n", "length"});
    if (auto t = grid.text("n")) s.n = static_cast<std::size_t>(parse_u64(*t, grid.label("n")));
    s.length = grid.number("length");

    const Section run(root, "run", {"realizations", "seed", "fixed_coordinate", "allow_defocus", "object_height", "stem"});
    if (auto t = run.text("realizations")) s.realizations = static_cast<std::size_t>(parse_u64(*t, run.label("realizations")));
    if (auto t = run.text("seed")) s.seed = parse_u64(*t, run.label("seed"));
    s.fixed_coordinate = run.number("fixed_coordinate").value_or(0.0);
    if (auto t = run.text("allow_defocus")) s.allow_defocus = parse_bool(*t, run.label("allow_defocus"));
    s.object_height = run.number("object_height");
    if (auto t = run.text("stem")) {
        if (t->find_first_of("/\\") != std::string::npos) fail(ErrorKind::InvalidInput, "[run] stem must be a plain file name");
        s.stem = *t;
    }
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::InvalidInput, "cannot open scenario " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const auto dir = std::filesystem::absolute(path).parent_path().string();
    return parse_scenario(buf.str(), dir);
}

std::string to_ini(const Scenario& s) {
    std::ostringstream os;
    os << "# lengths in mm, wavelength in nm\n";
    os << "[geometry]\nscheme = " << to_string(s.scheme) << '\n';
    auto opt = [&](const char* key, const std::optional<double>& v) {
        if (v) os << key << " = " << fmt(*v) << '\n';
    };
    opt("z1", s.z1);
    opt("z2", s.z2);
    opt("z3", s.z3);
    opt("f", s.f);
    opt("fc", s.fc);
    opt("wavelength_nm", s.wavelength_nm);
    os << "\n[source]\nkind = " << source_key(s.source) << '\n'
       << "thermal_spectrum = " << spectrum_to_string(s.thermal_spectrum) << '\n'
       << "biphoton_spectrum = " << spectrum_to_string(s.biphoton_spectrum) << '\n'
       << "w_cl = " << fmt(s.weights.classical) << "\nw_qu = " << fmt(s.weights.quantum) << '\n';
    if (s.object) {
        os << "\n[object]\n";
        put_object(os, *s.object);
    }
    if (s.n || s.length) {
        os << "\n[grid]\n";
        if (s.n) os << "n = " << *s.n << '\n';
        opt("length", s.length);
    }
    os << "\n[run]\nrealizations = " << s.realizations << "\nseed = " << s.seed
       << "\nfixed_coordinate = " << fmt(s.fixed_coordinate) << "\nallow_defocus = " << (s.allow_defocus ? "true" : "false")
       << '\n';
    opt("object_height", s.object_height);
    os << "stem = " << s.stem << '\n';
    return os.str();
}

double wavenumber(const Scenario& s) {
    if (!s.wavelength_nm) fail(ErrorKind::InvalidInput, "[geometry] wavelength_nm is required");
    return 2.0 * std::numbers::pi / (*s.wavelength_nm * 1e-6);
}

Geometry to_geometry(const Scenario& s, bool optics) {
    if (!s.z2) fail(ErrorKind::InvalidInput, "[geometry] z2 is required");
    if (!s.f) fail(ErrorKind::InvalidInput, "[geometry] f is required");
    Geometry g;
    g.scheme = s.scheme;
    g.z1 = s.z1;
    g.z2 = *s.z2;
    g.z3 = s.z3;
    g.f = *s.f;
    if (optics) {
        if (!s.fc) fail(ErrorKind::InvalidInput, "[geometry] fc is required");
        g.fc = *s.fc;
        g.k = wavenumber(s);
    } else {
        g.fc = s.fc.value_or(0.0);
        g.k = s.wavelength_nm ? wavenumber(s) : 0.0;
    }
    return g;
}

Grid1D to_grid(const Scenario& s) {
    if (!s.n || !s.length) fail(ErrorKind::InvalidInput, "[grid] n and length are required");
    return make_grid(*s.n, *s.length);
}

}  // namespace ghost
