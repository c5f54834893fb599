#pragma once

#include "mixlab/chain.hpp"
#include "mixlab/family.hpp"
#include "mixlab/product.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace mixlab {

using Json = nlohmann::json;

// {"label": str, "matrix": [[...]], "stationary": [...] (optional)}; InvalidInput on any violation.
MarkovChain chain_from_json(const Json& j);
Json chain_to_json(const MarkovChain& chain);
MarkovChain load_chain(const std::filesystem::path& path);
void save_chain(const MarkovChain& chain, const std::filesystem::path& path);

// {"coords": [path or inline chain, ...], "weights": [...]}; paths resolve against base_dir.
ProductSpec product_from_json(const Json& j, const std::filesystem::path& base_dir = {});
Json product_to_json(const ProductSpec& spec);
ProductSpec load_product(const std::filesystem::path& path);

Json read_json_file(const std::filesystem::path& path);

// 17 significant digits; non-finite values become "inf", "-inf" or "nan".
std::string format_number(double x);

class CsvWriter {
public:
    CsvWriter(std::ostream& out, const std::vector<std::string>& header);

    CsvWriter& cell(double x);
    CsvWriter& cell(long long x);
    CsvWriter& cell(const std::string& s);
    CsvWriter& empty();  // absent marker
    void end_row();

private:
    std::ostream& out_;
    std::size_t columns_;
    std::size_t filled_ = 0;
    void sep();
};

// key=value model parameters.
using ModelParams = std::map<std::string, std::string>;

ModelParams parse_model_params(const std::vector<std::string>& items);
double param_double(const ModelParams& p, const std::string& key, double fallback);
int param_int(const ModelParams& p, const std::string& key, int fallback);

std::vector<std::string> model_names();

// A single member: two-state(alpha,beta), cycle(n), ehrenfest(n), lazy-path(n),
// two-state-product(n,alpha,beta), lacoin(n,a,b,beta), interleaved(r,m).
FamilyMember make_model(const std::string& name, const ModelParams& params);

// The same models indexed by n (the "n" or "m" parameter is replaced by the index).
FamilySpec make_family(const std::string& name, const ModelParams& params);

}  // namespace mixlab
