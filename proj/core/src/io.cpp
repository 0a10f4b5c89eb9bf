#include "coupdoob/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "coupdoob/errors.hpp"
#include "coupdoob/report.hpp"

namespace coupdoob {

namespace {

using json = nlohmann::ordered_json;

double parse_probability(const std::string &text, const std::string &context) {
    double value = 0.0;
    const char *begin = text.data();
    const char *end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        throw InputError(context + ": '" + text + "' is not a decimal probability");
    if (!(value >= 0.0))
        throw InputError(context + ": probability '" + text + "' is negative");
    return value;
}

ChainVariant from_json(const json &doc, std::string_view source) {
    const std::string src(source);
    if (!doc.is_object())
        throw InputError(src + ": chain document must be a JSON object");

    if (doc.contains("gallery")) {
        if (!doc["gallery"].is_string())
            throw InputError(src + ": \"gallery\" must be an entry name");
        std::vector<double> params;
        if (doc.contains("params")) {
            if (!doc["params"].is_array())
                throw InputError(src + ": \"params\" must be an array of numbers");
            for (const auto &p : doc["params"]) {
                if (!p.is_number())
                    throw InputError(src + ": \"params\" must be an array of numbers");
                params.push_back(p.get<double>());
            }
        }
        return build_gallery(doc["gallery"].get<std::string>(), params);
    }

    if (!doc.contains("states") || !doc["states"].is_array())
        throw InputError(src + ": missing \"states\" array");
    if (!doc.contains("rows") || !doc["rows"].is_object())
        throw InputError(src + ": missing \"rows\" map");

    std::vector<std::string> labels;
    for (const auto &s : doc["states"]) {
        if (!s.is_string())
            throw InputError(src + ": state labels must be strings");
        labels.push_back(s.get<std::string>());
    }
    StateSpacePtr space = make_space(std::move(labels));

    std::vector<SparseRow> rows(space->size());
    std::vector<bool> seen(space->size(), false);
    for (const auto &[label, row_obj] : doc["rows"].items()) {
        auto x = space->find(label);
        if (!x)
            throw InputError(src + ": row for unknown state '" + label + "'");
        if (seen[*x])
            throw InputError(src + ": duplicate row for state '" + label + "'");
        seen[*x] = true;
        if (!row_obj.is_object())
            throw InputError(src + ": row '" + label + "' must map states to decimal strings");
        for (const auto &[target, prob] : row_obj.items()) {
            auto y = space->find(target);
            if (!y)
                throw InputError(src + ": row '" + label + "' references unknown state '" +
                                 target + "'");
            if (!prob.is_string())
                throw InputError(src + ": row '" + label + "', state '" + target +
                                 "': probabilities must be decimal strings");
            rows[*x].push_back(
                {*y, parse_probability(prob.get<std::string>(),
                                       src + ": row '" + label + "', state '" + target + "'")});
        }
    }
    for (std::size_t x = 0; x < space->size(); ++x)
        if (!seen[x])
            throw InputError(src + ": missing row for state '" + space->label(x) + "'");

    return FiniteChain(std::move(space), std::move(rows));
}

} // namespace

ChainVariant parse_chain_text(std::string_view text, std::string_view source_name) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        // nlohmann reports "parse error at line L, column C: ..."; keep it.
        throw InputError(std::string(source_name) + ": " + e.what());
    }
    return from_json(doc, source_name);
}

ChainVariant load_chain_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open chain file '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_chain_text(buffer.str(), path.string());
}

std::string chain_file_text(const FiniteChain &chain) {
    json doc;
    doc["states"] = json::array();
    for (const std::string &label : chain.space()->labels())
        doc["states"].push_back(label);
    json rows = json::object();
    for (std::size_t x = 0; x < chain.size(); ++x) {
        json row = json::object();
        for (const Transition &t : chain.row(x))
            row[chain.space()->label(t.target)] = format_double(t.probability);
        rows[chain.space()->label(x)] = std::move(row);
    }
    doc["rows"] = std::move(rows);
    return doc.dump(2) + "\n";
}

void save_chain_file(const FiniteChain &chain, const std::filesystem::path &path) {
    std::ofstream out(path);
    if (!out)
        throw InputError("cannot write chain file '" + path.string() + "'");
    out << chain_file_text(chain);
}

} // namespace coupdoob
