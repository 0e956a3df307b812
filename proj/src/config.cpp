#include "fpcomp/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fpcomp/norm_estimation.hpp"

namespace fpcomp {

namespace {

struct KeySpec {
    const char* key;
    const char* default_value;  // nullptr = required
};

// the full key registry; everything else is a spelling error
const KeySpec kKeys[] = {
    {"experiment", nullptr},
    {"model", ""},  // optional; implied by the experiment where unambiguous
    {"dimension", "2"},
    {"seed", "1"},
    {"out_dir", "runs/out"},
    {"workers", "0"},
    {"snapshots", "0"},

    {"weights", "exponential"},
    {"weights.rate", "1"},
    {"weights.value", "1"},
    {"weights.a", "0"},
    {"weights.b", "1"},
    {"weights.atom_p", "0"},
    {"weights.tail_rate", "1"},
    {"atom_threshold", "0.5"},

    {"radius", "constant"},
    {"radius.value", "1"},
    {"radius.rate", "1"},
    {"radius.cap", "1"},
    {"t_cap", "50"},
    {"r_cap", "0"},
    {"mesh_pitch", "0.1"},
    {"pad", "6"},

    {"sites", "-1 0 ; 1 0"},
    {"sites_on_norm_sphere", "false"},
    {"site_scale", "1"},

    {"norm", "l2"},

    {"scales", "16 32 64"},
    {"replicates", "100"},
    {"epsilon", "0.15"},
    {"delta", "0"},
    {"box_multiplier", "3"},
    {"guard_factor", "0.5"},
    {"grid_pitch", "1"},
    {"shell_factor", "1"},
    {"radius_fractions", "0.4 0.55 0.7 0.85 1.0"},
    {"tail_window", "0.25"},

    {"norm.kmax", "16"},
    {"norm.step", "4"},
    {"norm.reps", "48"},
    {"norm.directions", "lattice"},
    {"norm.lambda_reps", "16"},
    {"norm.estimate_lambda", "true"},

    {"line.x", "32 0"},
    {"line.lambda", "8"},
    {"line.epsilon", "0.2"},
    {"line.alpha_points", "21"},
    {"line.reps", "200"},
    {"line.norm_x", "0"},

    {"audit.samples", "10000"},
};

const char* kExperiments[] = {"territories", "norm",  "theorem11", "theorem12",
                              "coexistence", "line",  "audit"};

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

const KeySpec* find_key(const std::string& key) {
    for (const auto& spec : kKeys)
        if (key == spec.key) return &spec;
    return nullptr;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

RunConfig RunConfig::parse_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("config file not found: " + path.string());
    std::stringstream buf;
    buf << is.rdbuf();
    return parse_text(buf.str());
}

RunConfig RunConfig::parse_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            std::ostringstream os;
            os << "config line " << lineno << ": expected key = value, got '" << line << "'";
            throw std::invalid_argument(os.str());
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!find_key(key)) {
            std::ostringstream os;
            os << "config line " << lineno << ": unknown key '" << key << "'";
            throw std::invalid_argument(os.str());
        }
        if (cfg.values_.count(key)) {
            std::ostringstream os;
            os << "config line " << lineno << ": duplicate key '" << key << "'";
            throw std::invalid_argument(os.str());
        }
        cfg.values_[key] = value;
    }
    if (!cfg.values_.count("experiment"))
        throw std::invalid_argument("config: missing required field 'experiment'");
    cfg.experiment_ = cfg.values_["experiment"];
    return cfg;
}

void RunConfig::set(const std::string& key, const std::string& value) {
    if (!find_key(key)) throw std::invalid_argument("config: unknown key '" + key + "'");
    values_[key] = value;
    if (key == "experiment") experiment_ = value;
}

std::string RunConfig::get_string(const std::string& key) const {
    const auto it = values_.find(key);
    if (it != values_.end()) return it->second;
    const auto* spec = find_key(key);
    if (!spec) throw std::invalid_argument("config: unknown key '" + key + "'");
    if (!spec->default_value)
        throw std::invalid_argument("config: missing required field '" + key + "'");
    return spec->default_value;
}

double RunConfig::get_double(const std::string& key) const {
    const std::string v = get_string(key);
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return d;
    } catch (...) {
        throw std::invalid_argument("config: field '" + key + "' is not a number: '" + v + "'");
    }
}

std::int64_t RunConfig::get_int(const std::string& key) const {
    const std::string v = get_string(key);
    try {
        std::size_t pos = 0;
        const long long i = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return i;
    } catch (...) {
        throw std::invalid_argument("config: field '" + key + "' is not an integer: '" + v + "'");
    }
}

bool RunConfig::get_bool(const std::string& key) const {
    const std::string v = get_string(key);
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::invalid_argument("config: field '" + key + "' is not a boolean: '" + v + "'");
}

std::vector<double> RunConfig::get_doubles(const std::string& key) const {
    const std::string v = get_string(key);
    std::vector<double> out;
    std::istringstream is(v);
    std::string tok;
    while (is >> tok) {
        try {
            out.push_back(std::stod(tok));
        } catch (...) {
            throw std::invalid_argument("config: field '" + key + "' has a bad number: '" + tok +
                                        "'");
        }
    }
    if (out.empty())
        throw std::invalid_argument("config: field '" + key + "' must list numbers");
    return out;
}

bool RunConfig::is_continuum() const {
    const std::string m = get_string("model");
    if (m == "lattice") return false;
    if (m == "continuum") return true;
    if (!m.empty()) throw std::invalid_argument("config: model must be lattice or continuum");
    // implied by the experiment where it is unambiguous
    if (experiment_ == "theorem11") return false;
    if (experiment_ == "theorem12") return true;
    return false;  // default lattice
}

LatticeModel RunConfig::lattice_model() const {
    LatticeModel m;
    m.dim = static_cast<int>(get_int("dimension"));
    const std::string kind = get_string("weights");
    if (kind == "constant")
        m.weights = EdgeWeightDistribution::constant(get_double("weights.value"));
    else if (kind == "exponential")
        m.weights = EdgeWeightDistribution::exponential(get_double("weights.rate"));
    else if (kind == "uniform")
        m.weights = EdgeWeightDistribution::uniform(get_double("weights.a"), get_double("weights.b"));
    else if (kind == "atom")
        m.weights = EdgeWeightDistribution::atom_mixture(get_double("weights.atom_p"),
                                                         get_double("weights.tail_rate"));
    else
        throw std::invalid_argument("config: weights must be constant|exponential|uniform|atom");
    m.guard_factor = get_double("guard_factor");
    return m;
}

std::optional<std::string> RunConfig::weight_warning() const {
    if (is_continuum()) return std::nullopt;
    const auto m = lattice_model();
    return m.weights.validate(m.dim, get_double("atom_threshold"));
}

ContinuumModel RunConfig::continuum_model() const {
    ContinuumModel m;
    m.dim = static_cast<int>(get_int("dimension"));
    const std::string kind = get_string("radius");
    if (kind == "constant")
        m.law = RadiusLaw::constant(get_double("radius.value"));
    else if (kind == "exponential")
        m.law = RadiusLaw::exponential(get_double("radius.rate"));
    else if (kind == "truncexp")
        m.law = RadiusLaw::truncated_exponential(get_double("radius.rate"), get_double("radius.cap"));
    else
        throw std::invalid_argument("config: radius must be constant|exponential|truncexp");
    m.t_cap = get_double("t_cap");
    m.r_cap = get_double("r_cap");
    m.mesh_pitch = get_double("mesh_pitch");
    m.pad = get_double("pad");
    return m;
}

ExperimentPlan RunConfig::plan() const {
    ExperimentPlan p;
    p.continuum = is_continuum();
    p.lattice = lattice_model();
    p.continuum_model = continuum_model();

    const std::string sites = get_string("sites");
    std::istringstream is(sites);
    std::string part;
    while (std::getline(is, part, ';')) {
        std::istringstream ps(part);
        std::vector<double> point;
        double c;
        while (ps >> c) point.push_back(c);
        if (!point.empty()) p.sites.sites.push_back(std::move(point));
    }
    if (p.sites.sites.empty())
        throw std::invalid_argument("config: field 'sites' lists no points");
    p.sites.scale = get_double("site_scale");
    p.sites_on_norm_sphere = get_bool("sites_on_norm_sphere");
    p.scale_ladder = get_doubles("scales");
    p.n_reps = static_cast<int>(get_int("replicates"));
    p.epsilon = get_double("epsilon");
    p.delta = get_double("delta");
    p.box_multiplier = get_double("box_multiplier");
    p.guard_factor = get_double("guard_factor");
    p.grid_pitch = get_double("grid_pitch");
    p.shell_factor = get_double("shell_factor");
    p.radius_fractions = get_doubles("radius_fractions");
    p.tail_window = get_double("tail_window");
    p.master_seed = seed();
    return p;
}

Norm RunConfig::comparison_norm() const {
    const int dim = static_cast<int>(get_int("dimension"));
    const std::string spec = get_string("norm");
    if (spec == "l1") return Norm::l1(dim);
    if (spec == "l2") return Norm::l2(dim);
    if (spec == "linf") return Norm::linf(dim);
    if (spec.rfind("euclid:", 0) == 0)
        return Norm::scaled_euclidean(dim, std::stod(spec.substr(7)));
    if (spec.rfind("file:", 0) == 0) {
        const auto est = NormEstimate::load(spec.substr(5));
        if (est.dim != dim)
            throw std::invalid_argument("config: norm file dimension mismatch");
        return est.to_norm();
    }
    throw std::invalid_argument("config: norm must be l1|l2|linf|euclid:<mu>|file:<path>");
}

LineCompetitionConfig RunConfig::line_config() const {
    LineCompetitionConfig cfg;
    cfg.x = get_doubles("line.x");
    cfg.lambda = get_double("line.lambda");
    cfg.epsilon = get_double("line.epsilon");
    cfg.n_reps = static_cast<int>(get_int("line.reps"));
    cfg.alpha_points = static_cast<int>(get_int("line.alpha_points"));
    cfg.n_of_x = get_double("line.norm_x");
    cfg.seed = seed();
    if (cfg.n_of_x == 0.0) {
        // evaluate the configured norm at x
        cfg.n_of_x = comparison_norm()(cfg.x);
    }
    return cfg;
}

RunConfig::NormRun RunConfig::norm_run() const {
    NormRun nr;
    nr.k_max = static_cast<int>(get_int("norm.kmax"));
    nr.step = get_double("norm.step");
    nr.n_reps = static_cast<int>(get_int("norm.reps"));
    nr.directions = get_string("norm.directions");
    nr.lambda_reps = static_cast<int>(get_int("norm.lambda_reps"));
    nr.estimate_lambda = get_bool("norm.estimate_lambda");
    return nr;
}

void RunConfig::validate() const {
    bool known = false;
    for (const char* e : kExperiments) known = known || experiment_ == e;
    if (!known)
        throw std::invalid_argument("config: field 'experiment' must be one of "
                                    "territories|norm|theorem11|theorem12|coexistence|line|audit");
    const int dim = static_cast<int>(get_int("dimension"));
    if (dim < 2 || dim > 8)
        throw std::invalid_argument("config: field 'dimension' must be in [2, 8]");
    if (is_continuum())
        (void)continuum_model();
    else
        (void)lattice_model().weights.validate(dim, get_double("atom_threshold"));
    if (experiment_ == "theorem11" && is_continuum())
        throw std::invalid_argument("config: theorem11 runs on the lattice model");
    if (experiment_ == "theorem12" && !is_continuum())
        throw std::invalid_argument("config: theorem12 runs on the continuum model");
    if (experiment_ == "theorem11" || experiment_ == "theorem12" ||
        experiment_ == "coexistence" || experiment_ == "territories")
        plan().validate();
    if (experiment_ == "line") {
        const auto lc = line_config();
        if (!(lc.n_of_x > 0.0))
            throw std::invalid_argument("config: line.norm_x (or the norm at line.x) must be > 0");
    }
    if (experiment_ == "norm") {
        const auto nr = norm_run();
        if (nr.k_max < 4) throw std::invalid_argument("config: norm.kmax must be >= 4");
        if (nr.n_reps < 2) throw std::invalid_argument("config: norm.reps must be >= 2");
        if (nr.directions != "lattice" && nr.directions.rfind("planar", 0) != 0)
            throw std::invalid_argument("config: norm.directions must be lattice or planar<count>");
    }
    if (get_int("audit.samples") < 100)
        throw std::invalid_argument("config: audit.samples must be >= 100");
    (void)comparison_norm();
    (void)seed();
}

std::string RunConfig::resolved_text() const {
    std::ostringstream os;
    for (const auto& spec : kKeys) {
        const auto it = values_.find(spec.key);
        std::string value;
        if (it != values_.end()) value = it->second;
        else if (spec.default_value) value = spec.default_value;
        else continue;
        os << spec.key << " = " << value << '\n';
    }
    return os.str();
}

std::uint64_t RunConfig::config_hash() const { return fnv1a64(resolved_text()); }

}  // namespace fpcomp
