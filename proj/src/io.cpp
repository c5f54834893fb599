#include "mixlab/io.hpp"

#include "mixlab/error.hpp"
#include "mixlab/models.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace mixlab {

namespace fs = std::filesystem;

namespace {

Vector vector_from_json(const Json& j, const char* what) {
    if (!j.is_array()) throw Error(ErrorCode::InvalidInput, std::string(what) + " must be an array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw Error(ErrorCode::InvalidInput, std::string(what) + " entries must be numbers");
        v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    }
    return v;
}

Json vector_to_json(const Vector& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

}  // namespace

MarkovChain chain_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("matrix")) throw Error(ErrorCode::InvalidInput, "chain JSON needs a \"matrix\" field");
    const Json& m = j.at("matrix");
    if (!m.is_array() || m.empty()) throw Error(ErrorCode::InvalidInput, "matrix must be a nonempty array of rows");
    const auto rows = static_cast<Eigen::Index>(m.size());
    if (!m[0].is_array()) throw Error(ErrorCode::InvalidInput, "matrix rows must be arrays");
    const auto cols = static_cast<Eigen::Index>(m[0].size());
    Matrix k(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        Vector row = vector_from_json(m[static_cast<std::size_t>(r)], "matrix row");
        if (row.size() != cols) throw Error(ErrorCode::DimensionMismatch, "matrix rows differ in length");
        k.row(r) = row.transpose();
    }
    std::optional<Vector> pi;
    if (j.contains("stationary") && !j.at("stationary").is_null()) pi = vector_from_json(j.at("stationary"), "stationary");
    std::string label = j.value("label", std::string("chain"));
    return MarkovChain::from_kernel(std::move(k), label, pi);
}

Json chain_to_json(const MarkovChain& chain) {
    Json m = Json::array();
    for (Eigen::Index r = 0; r < chain.kernel().rows(); ++r) m.push_back(vector_to_json(chain.kernel().row(r).transpose()));
    return Json{{"label", chain.label()}, {"matrix", m}, {"stationary", vector_to_json(chain.stationary())}};
}

Json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::InvalidInput, path.string() + ": " + e.what());
    }
}

MarkovChain load_chain(const fs::path& path) { return chain_from_json(read_json_file(path)); }

void save_chain(const MarkovChain& chain, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + path.string());
    out << std::setprecision(17) << chain_to_json(chain).dump(2) << "\n";
}

ProductSpec product_from_json(const Json& j, const fs::path& base_dir) {
    if (!j.is_object() || !j.contains("coords") || !j.contains("weights"))
        throw Error(ErrorCode::InvalidInput, "product JSON needs \"coords\" and \"weights\"");
    ProductSpec spec;
    for (const Json& c : j.at("coords")) {
        if (c.is_string()) {
            fs::path p = c.get<std::string>();
            spec.coords.push_back(load_chain(p.is_absolute() ? p : base_dir / p));
        } else {
            spec.coords.push_back(chain_from_json(c));
        }
    }
    Vector w = vector_from_json(j.at("weights"), "weights");
    spec.weights.assign(w.data(), w.data() + w.size());
    spec.validate();
    return spec;
}

Json product_to_json(const ProductSpec& spec) {
    Json coords = Json::array();
    for (const auto& c : spec.coords) coords.push_back(chain_to_json(c));
    return Json{{"coords", coords}, {"weights", spec.weights}};
}

ProductSpec load_product(const fs::path& path) { return product_from_json(read_json_file(path), path.parent_path()); }

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(17) << x;
    return os.str();
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header) : out_(out), columns_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << "\n";
}

void CsvWriter::sep() {
    if (filled_ >= columns_) throw Error(ErrorCode::InvalidArgument, "too many CSV cells in row");
    if (filled_++ > 0) out_ << ",";
}

CsvWriter& CsvWriter::cell(double x) {
    sep();
    out_ << format_number(x);
    return *this;
}

CsvWriter& CsvWriter::cell(long long x) {
    sep();
    out_ << x;
    return *this;
}

CsvWriter& CsvWriter::cell(const std::string& s) {
    sep();
    out_ << s;
    return *this;
}

CsvWriter& CsvWriter::empty() {
    sep();
    return *this;
}

void CsvWriter::end_row() {
    while (filled_ < columns_) empty();
    out_ << "\n";
    filled_ = 0;
}

ModelParams parse_model_params(const std::vector<std::string>& items) {
    ModelParams out;
    for (const auto& item : items) {
        auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw Error(ErrorCode::InvalidArgument, "expected key=value, got " + item);
        out[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return out;
}

double param_double(const ModelParams& p, const std::string& key, double fallback) {
    auto it = p.find(key);
    if (it == p.end()) return fallback;
    try {
        std::size_t used = 0;
        double v = std::stod(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument(key);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidArgument, "parameter " + key + " is not a number");
    }
}

int param_int(const ModelParams& p, const std::string& key, int fallback) {
    double v = param_double(p, key, fallback);
    if (v != std::floor(v)) throw Error(ErrorCode::InvalidArgument, "parameter " + key + " must be an integer");
    return static_cast<int>(v);
}

std::vector<std::string> model_names() {
    return {"two-state", "cycle", "ehrenfest", "lazy-path", "two-state-product", "lacoin", "interleaved"};
}

namespace {

FamilyMember model_at(const std::string& name, const ModelParams& p, int n) {
    if (name == "two-state") return two_state_chain({param_double(p, "alpha", 0.5), param_double(p, "beta", 0.5)});
    if (name == "cycle") return cycle_chain(n);
    if (name == "ehrenfest") return ehrenfest_chain(n);
    if (name == "lazy-path") return lazy_path_chain(n);
    if (name == "two-state-product")
        return two_state_product_lumped(n, {param_double(p, "alpha", 0.5), param_double(p, "beta", 0.5)});
    if (name == "lacoin") {
        LacoinParams lp{n, param_double(p, "a", 0.01), param_double(p, "b", 0.1), param_double(p, "beta", 0.0)};
        return lacoin_chain(lp);
    }
    if (name == "interleaved") {
        FamilySpec fam = interleaved_family(param_double(p, "r", 0.5));
        return fam.generator(n);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown model " + name);
}

}  // namespace

FamilyMember make_model(const std::string& name, const ModelParams& params) {
    const int n = param_int(params, name == "interleaved" ? "m" : "n", name == "lacoin" ? 5 : 8);
    return model_at(name, params, n);
}

FamilySpec make_family(const std::string& name, const ModelParams& params) {
    bool known = false;
    for (const auto& m : model_names()) known = known || m == name;
    if (!known) throw Error(ErrorCode::InvalidArgument, "unknown model " + name);
    FamilySpec fam;
    fam.label = name;
    fam.generator = [name, params](int n) { return model_at(name, params, n); };
    if (name == "two-state-product") {
        // The all-zero configuration; with alpha = beta every point mass is equivalent.
        fam.start = [](int n) { return Start::state(n + 1, 0); };
    }
    return fam;
}

}  // namespace mixlab
