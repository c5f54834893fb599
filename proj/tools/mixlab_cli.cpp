#include "mixlab/cutoff_lab.hpp"
#include "mixlab/error.hpp"
#include "mixlab/io.hpp"
#include "mixlab/models.hpp"
#include "mixlab/product.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace mixlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitPartial = 4;

struct Options {
    std::string config;
    std::string chain_path;
    std::string product_path;
    std::string model;
    std::vector<std::string> params;
    std::string kind = "tv";
    double epsilon = -1.0;
    double delta = 0.9;
    std::string t_grid;
    std::string n_range;
    std::vector<int> n_list;
    bool doubling = false;
    std::string out;
    std::string report;
    double tail_tol = 1e-12;
    std::string start = "max";
    bool discrete = false;
    double tail_epsilon_tv = 0.25;
    double tail_epsilon_hellinger = 0.125;
    std::vector<double> r_c;
    std::vector<int> r_m;
};

Error input_error(const std::string& message) { return Error(ErrorCode::InvalidArgument, message); }

std::vector<double> parse_t_grid(const std::string& text) {
    if (text.empty()) throw input_error("--t-grid is required (a:b:steps)");
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.size() != 3) throw input_error("--t-grid expects a:b:steps, got " + text);
    double a = 0, b = 0;
    long long steps = 0;
    try {
        a = std::stod(parts[0]);
        b = std::stod(parts[1]);
        steps = std::stoll(parts[2]);
    } catch (const std::exception&) {
        throw input_error("--t-grid has a non-numeric field: " + text);
    }
    if (!std::isfinite(a) || !std::isfinite(b) || a < 0 || b < a) throw input_error("--t-grid needs 0 <= a <= b");
    if (steps <= 0) throw input_error("--t-grid is empty");
    if (steps == 1) return {a};
    std::vector<double> grid(static_cast<std::size_t>(steps));
    for (long long k = 0; k < steps; ++k) grid[static_cast<std::size_t>(k)] = a + (b - a) * static_cast<double>(k) / static_cast<double>(steps - 1);
    grid.back() = b;
    return grid;
}

std::vector<int> resolve_indices(const Options& o) {
    if (!o.n_list.empty()) return o.n_list;
    if (o.n_range.empty()) throw input_error("--n-range or --n-list is required");
    auto colon = o.n_range.find(':');
    if (colon == std::string::npos) throw input_error("--n-range expects a:b");
    int a = 0, b = 0;
    try {
        a = std::stoi(o.n_range.substr(0, colon));
        b = std::stoi(o.n_range.substr(colon + 1));
    } catch (const std::exception&) {
        throw input_error("--n-range has a non-integer field: " + o.n_range);
    }
    if (a < 1 || b < a) throw input_error("--n-range needs 1 <= a <= b");
    std::vector<int> out;
    if (o.doubling) {
        for (long long n = a; n <= b; n *= 2) out.push_back(static_cast<int>(n));
    } else {
        for (int n = a; n <= b; ++n) out.push_back(n);
    }
    return out;
}

UniformizationParams uniformization(const Options& o) {
    UniformizationParams p;
    p.tail_tol = o.tail_tol;
    p.validate();
    return p;
}

MixingOptions mixing_options(const Options& o) {
    MixingOptions m;
    m.params = uniformization(o);
    return m;
}

FamilyMember load_member(const Options& o) {
    int sources = !o.chain_path.empty() + !o.product_path.empty() + !o.model.empty();
    if (sources != 1) throw input_error("give exactly one of --chain, --product, --model");
    if (!o.chain_path.empty()) return load_chain(o.chain_path);
    if (!o.product_path.empty()) return load_product(o.product_path);
    return make_model(o.model, parse_model_params(o.params));
}

MarkovChain member_as_chain(const FamilyMember& member) {
    if (const auto* chain = std::get_if<MarkovChain>(&member)) return *chain;
    return dense_product_chain(std::get<ProductSpec>(member));
}

Start parse_start(const std::string& text, const MarkovChain& chain) {
    if (text == "max") return Start::max();
    if (text == "stationary") return Start::from(chain.stationary());
    try {
        std::size_t used = 0;
        long long x = std::stoll(text, &used);
        if (used == text.size() && x >= 0 && x < chain.size()) return Start::state(chain.size(), x);
    } catch (const std::exception&) {
    }
    throw input_error("--start must be max, stationary or a state index below " + std::to_string(chain.size()));
}

double epsilon_or_default(const Options& o, Kind kind) {
    if (o.epsilon > 0) return o.epsilon;
    if (o.epsilon == -1.0) return kind == Kind::L2 ? 0.25 : default_epsilon(kind);
    throw input_error("--epsilon must be positive");
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw Error(ErrorCode::InvalidInput, "cannot write " + path);
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

int cmd_validate(const Options& o) {
    Json report;
    FamilyMember member = load_member(o);
    if (const auto* chain = std::get_if<MarkovChain>(&member)) {
        report = {{"ok", true}, {"states", chain->size()}, {"reversible", chain->reversible()}, {"label", chain->label()}};
    } else {
        const auto& spec = std::get<ProductSpec>(member);
        report = {{"ok", true}, {"coordinates", spec.size()}, {"state_count", spec.state_count()}, {"q", spec.q()}};
    }
    Output out(o.out);
    out.stream() << std::setprecision(17) << report.dump(2) << "\n";
    return kExitOk;
}

int cmd_model_emit(const Options& o) {
    if (o.model.empty()) throw input_error("--model is required");
    FamilyMember member = make_model(o.model, parse_model_params(o.params));
    Json j = std::holds_alternative<MarkovChain>(member) ? chain_to_json(std::get<MarkovChain>(member))
                                                         : product_to_json(std::get<ProductSpec>(member));
    Output out(o.out);
    out.stream() << std::setprecision(17) << j.dump(2) << "\n";
    return kExitOk;
}

int cmd_distance_curve(const Options& o) {
    const Kind kind = parse_kind(o.kind);
    std::vector<double> grid = parse_t_grid(o.t_grid);
    MarkovChain chain = member_as_chain(load_member(o));
    Start start = parse_start(o.start, chain);
    DistanceEvaluator eval(chain, kind, start, uniformization(o));

    std::ostringstream buf;
    CsvWriter csv(buf, {o.discrete ? "t_steps" : "t_chain_time", "value", "kind", "start"});
    for (double t : grid) {
        double v = 0.0;
        if (o.discrete) {
            if (t != std::floor(t)) throw input_error("--discrete needs an integer grid");
            v = eval.discrete(static_cast<long long>(t));
        } else {
            v = eval.continuous(t);
        }
        csv.cell(t).cell(v).cell(std::string(kind_name(kind))).cell(o.start).end_row();
    }
    Output out(o.out);
    out.stream() << buf.str();
    return kExitOk;
}

int cmd_mix_time(const Options& o) {
    const Kind kind = parse_kind(o.kind);
    const double eps = epsilon_or_default(o, kind);
    MarkovChain chain = member_as_chain(load_member(o));
    Start start = parse_start(o.start, chain);
    MixingTime mt = mixing_time(chain, kind, eps, start, o.discrete ? TimeMode::Discrete : TimeMode::Continuous,
                                mixing_options(o));
    std::ostringstream buf;
    CsvWriter csv(buf, {"kind", "epsilon", "start", "mode", o.discrete ? "T_steps" : "T_chain_time", "resolution"});
    csv.cell(std::string(kind_name(kind))).cell(eps).cell(o.start).cell(std::string(o.discrete ? "discrete" : "continuous"))
        .cell(mt.value).cell(mt.resolution).end_row();
    Output out(o.out);
    out.stream() << buf.str();
    return kExitOk;
}

template <class F>
void optional_cell(CsvWriter& csv, F&& compute) {
    try {
        csv.cell(compute());
    } catch (const Error& e) {
        if (e.code() != ErrorCode::TimeTooSmall && e.code() != ErrorCode::TooLarge) throw;
        csv.empty();
    }
}

int cmd_product_eval(const Options& o) {
    const Kind kind = parse_kind(o.kind);
    (void)rho(kind);
    std::vector<double> grid = parse_t_grid(o.t_grid);
    FamilyMember member = load_member(o);
    if (!std::holds_alternative<ProductSpec>(member)) throw input_error("product-eval needs a product (--product or a product model)");
    const ProductSpec& spec = std::get<ProductSpec>(member);
    spec.validate();
    const ProductStart starts = all_max(spec);
    const UniformizationParams params = uniformization(o);
    ProdMixingOptions pm;
    pm.mixing = mixing_options(o);

    const MixingOptions mix = mixing_options(o);
    std::vector<double> eps_tv(spec.size(), o.tail_epsilon_tv), eps_h(spec.size(), o.tail_epsilon_hellinger);
    std::vector<double> u_tv, u_h;
    for (const auto& c : spec.coords) {
        u_tv.push_back(coordinate_mixing_time(c, Kind::TV, o.tail_epsilon_tv, mix));
        u_h.push_back(coordinate_mixing_time(c, Kind::Hellinger, o.tail_epsilon_hellinger, mix));
    }
    const bool dense = spec.state_count() <= kDenseProductLimit;

    std::ostringstream buf;
    CsvWriter csv(buf, {"t_chain_time", "hellinger_exact", "tv_bracket_lower", "tv_bracket_upper", "prodmixing_kind",
                        "prodmixing_lower", "prodmixing_upper", "tail_bound_tv", "tail_bound_hellinger", "dense_tv",
                        "dense_hellinger"});
    for (double t : grid) {
        CoordinateDistances coord_h(spec, Kind::Hellinger, starts, params);
        CoordinateDistances coord_tv(spec, Kind::TV, starts, params);
        std::vector<double> dh = coord_h.at(t);
        std::vector<double> dtv = coord_tv.at(t);
        BoundBracket tvb = tv_bracket_from(dtv);
        ProdMixingBounds pb = prodmixing_from(kind == Kind::TV ? dtv : dh, kind);
        csv.cell(t).cell(combine_hellinger(dh)).cell(tvb.lower).cell(tvb.upper);
        csv.cell(std::string(kind_name(kind))).cell(pb.bracket.lower).cell(pb.bracket.upper);
        optional_cell(csv, [&] { return tail_bound_tv(spec, t, eps_tv, u_tv); });
        optional_cell(csv, [&] { return tail_bound_hellinger(spec, t, eps_h, u_h); });
        if (dense) {
            csv.cell(dense_product_distance(spec, Kind::TV, t, starts, params));
            csv.cell(dense_product_distance(spec, Kind::Hellinger, t, starts, params));
        }
        csv.end_row();
    }
    Output out(o.out);
    out.stream() << buf.str();
    return kExitOk;
}

int cmd_lacoin_bounds(const Options& o) {
    std::vector<double> grid = parse_t_grid(o.t_grid);
    ModelParams mp = parse_model_params(o.params);
    LacoinParams lp{param_int(mp, "n", 5), param_double(mp, "a", 0.01), param_double(mp, "b", 0.1),
                    param_double(mp, "beta", 0.0)};
    MarkovChain chain = lacoin_chain(lp);
    const UniformizationParams params = uniformization(o);
    DistanceEvaluator h(chain, Kind::Hellinger, Start::max(), params);
    DistanceEvaluator tv(chain, Kind::TV, Start::max(), params);
    const double pi_2n = chain.stationary()[2 * lp.n];

    std::ostringstream buf;
    CsvWriter csv(buf, {"t_chain_time", "hellinger_sq_max", "tv_max", "hd_upper1", "hd_upper2", "hd_lower1", "tv_lower",
                        "pi_2n"});
    for (double t : grid) {
        LacoinEnvelope env = lacoin_bound_envelope(lp, t);
        const double dh = h.continuous(t);
        csv.cell(t).cell(dh * dh).cell(tv.continuous(t));
        for (const auto& bound : {env.hd_upper1, env.hd_upper2, env.hd_lower1, env.tv_lower}) {
            if (bound) {
                csv.cell(*bound);
            } else {
                csv.empty();
            }
        }
        csv.cell(pi_2n).end_row();
    }
    Output out(o.out);
    out.stream() << buf.str();
    return kExitOk;
}

Json failures_json(const std::vector<FailedIndex>& failures) {
    Json arr = Json::array();
    for (const auto& f : failures) arr.push_back({{"n", f.n}, {"code", error_code_name(f.code)}, {"message", f.message}});
    return arr;
}

int cmd_cutoff_scan(const Options& o) {
    if (o.model.empty()) throw input_error("cutoff-scan needs --model");
    const Kind kind = parse_kind(o.kind);
    (void)rho(kind);
    const double eps = o.epsilon == -1.0 ? 0.1 : o.epsilon;
    std::vector<int> indices = resolve_indices(o);
    ModelParams mp = parse_model_params(o.params);
    FamilySpec family = make_family(o.model, mp);
    const MixingOptions mix = mixing_options(o);

    CutoffReport rep = cutoff_ratio_diagnostic(family, kind, eps, o.delta, indices, {}, mix);

    std::function<double(int)> log_weight;
    if (o.model == "interleaved") {
        InterleavedFamily fam{param_double(mp, "r", 0.5)};
        log_weight = [fam](int n) { return std::log(fam.weight(n)); };
    }
    std::optional<DnDecomposition> dn;
    if (log_weight && rep.indices.size() >= 1) dn = dn_from_times(rep.indices, rep.t_eps, log_weight);

    std::ostringstream buf;
    CsvWriter csv(buf, {"n", "T_eps_chain_time", "T_delta_chain_time", "ratio", "window_chain_time", "relative_window", "D_n"});
    for (std::size_t k = 0; k < rep.indices.size(); ++k) {
        csv.cell(static_cast<long long>(rep.indices[k])).cell(rep.t_eps[k]).cell(rep.t_delta[k]).cell(rep.ratios[k]);
        csv.cell(rep.windows[k]).cell(rep.relative_windows[k]);
        if (dn) {
            csv.cell(dn->D[k]);
        } else {
            csv.empty();
        }
        csv.end_row();
    }

    std::set<int> failed;
    for (const auto& f : rep.failures) failed.insert(f.n);

    Json report = {
        {"model", o.model},
        {"kind", kind_name(kind)},
        {"epsilon", eps},
        {"delta", o.delta},
        {"indices", rep.indices},
        {"requested_indices", indices},
        {"ratios", rep.ratios},
        {"verdict", verdict_name(rep.verdict)},
        {"rule", rep.trend.rule},
        {"trend",
         {{"last_ratio", rep.trend.last_ratio},
          {"tail_mean", rep.trend.tail_mean},
          {"tail_max_step", rep.trend.tail_max_step},
          {"sharpness_slope", rep.trend.sharpness_slope},
          {"tail_strictly_decreasing", rep.trend.tail_strictly_decreasing}}},
        {"thresholds",
         {{"min_indices", rep.thresholds.min_indices},
          {"tail", rep.thresholds.tail},
          {"near_one_tol", rep.thresholds.near_one_tol},
          {"growth_min", rep.thresholds.growth_min},
          {"flat_max", rep.thresholds.flat_max},
          {"bounded_away", rep.thresholds.bounded_away}}},
        {"partial", !failed.empty()},
        {"failures", failures_json(rep.failures)},
    };

    if (!o.r_c.empty()) {
        if (o.model != "interleaved") throw input_error("the R(c) grid is available for the interleaved model only");
        ProductFamily pf = interleaved_odd_family(param_double(mp, "r", 0.5));
        std::vector<int> m_list = o.r_m.empty() ? std::vector<int>{0, 1, 2} : o.r_m;
        Json grid = Json::array();
        for (double c : o.r_c) {
            RDiagnostic r = r_estimator(pf, kind, c, indices, m_list, {}, mix);
            Json rows = Json::array();
            for (std::size_t i = 0; i < r.n_list.size(); ++i) {
                Json row = {{"n", r.n_list[i]}, {"log_S", Json::array()}};
                for (double v : r.log_S[i]) row["log_S"].push_back(format_number(v));
                rows.push_back(row);
            }
            grid.push_back({{"c", c}, {"m", m_list}, {"rows", rows}});
        }
        report["R_grid"] = grid;
    }

    Output out(o.out);
    out.stream() << buf.str();
    std::string report_path = !o.report.empty() ? o.report : (!o.out.empty() ? o.out + ".report.json" : "");
    if (!report_path.empty()) {
        std::ofstream r(report_path);
        if (!r) throw Error(ErrorCode::InvalidInput, "cannot write " + report_path);
        r << std::setprecision(17) << report.dump(2) << "\n";
    } else {
        std::cerr << "verdict: " << verdict_name(rep.verdict) << " (" << rep.trend.rule << ")\n";
    }
    for (const auto& f : rep.failures) std::cerr << "index " << f.n << " failed: " << f.message << "\n";

    if (2 * failed.size() > indices.size()) return kExitPartial;
    return kExitOk;
}

// Appends "--key value" tokens from a JSON config for every option not given on the command line.
std::vector<std::string> config_tokens(const Json& cfg, const CLI::App& sub) {
    std::vector<std::string> tokens;
    if (!cfg.is_object()) throw Error(ErrorCode::InvalidInput, "config must be a JSON object");
    for (const auto& [key, value] : cfg.items()) {
        const CLI::Option* opt = nullptr;
        try {
            opt = sub.get_option("--" + key);
        } catch (const CLI::OptionNotFound&) {
            throw Error(ErrorCode::InvalidInput, "unknown config key " + key);
        }
        if (opt->count() > 0 || key == "config") continue;
        auto scalar = [&](const Json& v) {
            if (v.is_string()) return v.get<std::string>();
            if (v.is_number_integer()) return std::to_string(v.get<long long>());
            if (v.is_number()) return format_number(v.get<double>());
            throw Error(ErrorCode::InvalidInput, "config value for " + key + " must be a string or number");
        };
        if (value.is_boolean()) {
            if (value.get<bool>()) tokens.push_back("--" + key);
        } else if (value.is_array()) {
            for (const auto& v : value) {
                tokens.push_back("--" + key);
                tokens.push_back(scalar(v));
            }
        } else {
            tokens.push_back("--" + key);
            tokens.push_back(scalar(value));
        }
    }
    return tokens;
}

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--config", o.config, "JSON file with option values; flags override it");
    sub->add_option("--chain", o.chain_path, "chain JSON file");
    sub->add_option("--product", o.product_path, "product JSON file");
    sub->add_option("--model", o.model, "registered model name");
    sub->add_option("--param,-p", o.params, "model parameter key=value (repeatable)");
    sub->add_option("--kind", o.kind, "tv, hellinger or l2");
    sub->add_option("--epsilon", o.epsilon, "mixing level");
    sub->add_option("--t-grid", o.t_grid, "time grid a:b:steps (steps points, chain-time units)");
    sub->add_option("--n-range", o.n_range, "index range a:b");
    sub->add_option("--n-list", o.n_list, "explicit indices")->delimiter(',');
    sub->add_flag("--doubling", o.doubling, "use a, 2a, 4a, ... within --n-range");
    sub->add_option("--out", o.out, "output path (stdout when absent)");
    sub->add_option("--report", o.report, "JSON report path (cutoff-scan)");
    sub->add_option("--tail-tol", o.tail_tol, "uniformization tail tolerance");
    sub->add_option("--start", o.start, "max, stationary or a state index");
    sub->add_flag("--discrete", o.discrete, "discrete-time chain");
    sub->add_option("--delta", o.delta, "second level for the ratio diagnostic");
    sub->add_option("--tail-epsilon-tv", o.tail_epsilon_tv, "coordinate TV level for the tail bound");
    sub->add_option("--tail-epsilon-hellinger", o.tail_epsilon_hellinger, "coordinate Hellinger level for the tail bound");
    sub->add_option("--r-c", o.r_c, "c values for the R(c) grid")->delimiter(',');
    sub->add_option("--r-m", o.r_m, "m values for the R(c) grid")->delimiter(',');
}

int run(int argc, char** argv) {
    struct Command {
        const char* name;
        const char* help;
        int (*run)(const Options&);
    };
    const std::vector<Command> commands = {
        {"validate", "check a chain or product file and summarise it as JSON", cmd_validate},
        {"distance-curve", "distance to stationarity on a time grid", cmd_distance_curve},
        {"mix-time", "mixing time at one level", cmd_mix_time},
        {"product-eval", "exact Hellinger, brackets and tail bounds for a product chain", cmd_product_eval},
        {"cutoff-scan", "mixing-time ratios, windows and a cutoff verdict over a family", cmd_cutoff_scan},
        {"lacoin-bounds", "exact Lacoin distances next to the bound envelope", cmd_lacoin_bounds},
        {"model-emit", "write a registered model as chain or product JSON", cmd_model_emit},
    };

    std::vector<std::string> args(argv + 1, argv + argc);
    for (int pass = 0; pass < 2; ++pass) {
        Options o;
        CLI::App app{"Mixing times, distance curves and cutoff diagnostics for finite Markov chains", "mixlab"};
        app.require_subcommand(1);
        std::vector<CLI::App*> subs;
        for (const auto& cmd : commands) {
            subs.push_back(app.add_subcommand(cmd.name, cmd.help));
            add_common(subs.back(), o);
        }
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        try {
            app.parse(reversed);
        } catch (const CLI::ParseError& e) {
            int code = app.exit(e);
            return code == 0 ? kExitOk : kExitInput;
        }
        for (std::size_t k = 0; k < subs.size(); ++k) {
            if (!subs[k]->parsed()) continue;
            if (pass == 0 && !o.config.empty()) {
                std::vector<std::string> extra = config_tokens(read_json_file(o.config), *subs[k]);
                args.insert(args.end(), extra.begin(), extra.end());
                break;
            }
            return commands[k].run(o);
        }
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return is_input_error(e.code()) ? kExitInput : kExitNumeric;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
}
