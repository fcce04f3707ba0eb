#include "blockspec/spec_io.hpp"

#include <fstream>
#include <map>

#include <json.hpp>

namespace blockspec {

namespace {

using nlohmann::json;

std::vector<BlockName> parse_names(const json& j, std::map<std::string, int>& index) {
    if (!j.contains("block_names") || !j["block_names"].is_object())
        throw ValidationError("spec needs a 'block_names' object");
    std::vector<BlockName> names;
    for (const auto& [label, body] : j["block_names"].items()) {
        BlockName nm;
        nm.label = label;
        nm.selfadjoint = body.value("selfadjoint", false);
        if (body.contains("correlated_with")) {
            const auto& c = body["correlated_with"];
            if (!c.contains("name") || !c.contains("rho"))
                throw ValidationError("correlated_with needs 'name' and 'rho' (" + label + ")");
            nm.correlated_with = c["name"].get<std::string>();
            nm.rho = c["rho"].get<double>();
        }
        index[label] = static_cast<int>(names.size());
        names.push_back(std::move(nm));
    }
    return names;
}

std::optional<BlockRef> parse_entry(const json& cell, const std::map<std::string, int>& index,
                                    int i, int j) {
    if (cell.is_null()) return std::nullopt;
    if (!cell.is_object() || !cell.contains("name"))
        throw ValidationError("grid entry (" + std::to_string(i + 1) + "," +
                              std::to_string(j + 1) + ") must be null or carry a 'name'");
    const std::string label = cell["name"].get<std::string>();
    const auto it = index.find(label);
    if (it == index.end())
        throw ValidationError("grid entry (" + std::to_string(i + 1) + "," +
                              std::to_string(j + 1) + ") references undeclared name '" +
                              label + "'");
    return BlockRef{it->second, cell.value("adjoint", false), cell.value("scale", 1.0)};
}

std::vector<std::optional<BlockRef>> parse_grid(const json& j, int rows, int cols,
                                                const std::map<std::string, int>& index) {
    const auto& g = j["grid"];
    if (!g.is_array() || static_cast<int>(g.size()) != rows)
        throw ValidationError("grid must have " + std::to_string(rows) + " rows");
    std::vector<std::optional<BlockRef>> entries(static_cast<std::size_t>(rows) * cols);
    for (int i = 0; i < rows; ++i) {
        if (!g[i].is_array() || static_cast<int>(g[i].size()) != cols)
            throw ValidationError("grid row " + std::to_string(i + 1) + " must have " +
                                  std::to_string(cols) + " entries");
        for (int c = 0; c < cols; ++c) entries[i * cols + c] = parse_entry(g[i][c], index, i, c);
    }
    return entries;
}

CovarianceTensor parse_sigma(const json& j, int d) {
    CovarianceTensor cov(d);
    for (const auto& e : j["sigma"]) {
        for (const char* key : {"i", "j", "k", "l"})
            if (!e.contains(key))
                throw ValidationError("sigma entries need 1-based indices i,j,k,l");
        cov.set(e["i"].get<int>() - 1, e["j"].get<int>() - 1, e["k"].get<int>() - 1,
                e["l"].get<int>() - 1, Complex(e.value("re", 0.0), e.value("im", 0.0)));
    }
    return cov;
}

DimensionProfile parse_dims(const json& j, int d, bool rectangular) {
    if (!rectangular) return DimensionProfile::square(d);
    if (j.contains("sizes")) {
        std::vector<std::int64_t> sizes = j["sizes"].get<std::vector<std::int64_t>>();
        if (static_cast<int>(sizes.size()) != d)
            throw ValidationError("'sizes' must list d block sizes");
        return DimensionProfile::rectangular(sizes);
    }
    if (j.contains("alpha")) {
        std::vector<Rational> alpha;
        for (const auto& a : j["alpha"])
            alpha.push_back(a.is_string() ? Rational::parse(a.get<std::string>())
                                          : Rational(a.get<std::int64_t>()));
        if (static_cast<int>(alpha.size()) != d)
            throw ValidationError("'alpha' must list d rationals");
        return DimensionProfile::rectangular_alpha(alpha);
    }
    throw ValidationError("rectangular spec needs 'sizes' or 'alpha'");
}

AnySpec parse_json(const json& j) {
    if (!j.contains("kind")) throw ValidationError("spec needs a 'kind' field");
    const std::string kind = j["kind"].get<std::string>();
    AnySpec out;

    if (kind == "square" || kind == "rectangular") {
        if (!j.contains("d")) throw ValidationError("spec needs 'd'");
        const int d = j["d"].get<int>();
        DimensionProfile dims = parse_dims(j, d, kind == "rectangular");
        if (j.contains("grid")) {
            std::map<std::string, int> index;
            auto names = parse_names(j, index);
            BlockGrid grid(d, std::move(names), parse_grid(j, d, d, index));
            ModelSpec spec{derive_sigma(grid), std::move(dims), std::move(grid)};
            auto bad = validate_sigma(spec.cov, spec.dims);
            if (!bad.empty()) throw ValidationError(bad.front().what);
            out.model = std::move(spec);
        } else if (j.contains("sigma")) {
            ModelSpec spec{parse_sigma(j, d), std::move(dims), std::nullopt};
            auto bad = validate_sigma(spec.cov, spec.dims);
            if (!bad.empty()) throw ValidationError(bad.front().what);
            out.model = std::move(spec);
        } else {
            throw ValidationError("spec needs a 'grid' or an explicit 'sigma'");
        }
        return out;
    }

    if (kind == "wishart") {
        for (const char* key : {"r", "s", "row_sizes", "col_sizes"})
            if (!j.contains(key))
                throw ValidationError(std::string("wishart spec needs '") + key + "'");
        const int r = j["r"].get<int>();
        const int s = j["s"].get<int>();
        std::map<std::string, int> index;
        auto names = parse_names(j, index);
        out.wishart = WishartSpec(r, s, std::move(names), parse_grid(j, r, s, index),
                                  j["row_sizes"].get<std::vector<std::int64_t>>(),
                                  j["col_sizes"].get<std::vector<std::int64_t>>());
        return out;
    }

    throw ValidationError("unknown spec kind '" + kind + "'");
}

}  // namespace

AnySpec parse_spec(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("JSON parse error: ") + e.what());
    }
    return parse_json(j);
}

AnySpec load_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open spec file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_spec(text);
}

}  // namespace blockspec
