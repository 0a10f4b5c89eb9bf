#include "coupdoob/report.hpp"

#include <array>
#include <charconv>

#include <json.hpp>

#include "coupdoob/errors.hpp"

namespace coupdoob {

std::string format_double(double value) {
    std::array<char, 32> buffer{};
    auto [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
    detail::internal_check(ec == std::errc(), "to_chars failed for a double");
    return std::string(buffer.data(), ptr);
}

namespace {

using json = nlohmann::ordered_json;

json pairs_to_json(const std::vector<PairCheck> &pairs, const StateSpace &space) {
    json out = json::array();
    for (const PairCheck &p : pairs) {
        json item;
        item["x"] = space.label(p.x);
        item["y"] = space.label(p.y);
        if (p.n)
            item["n"] = *p.n;
        else
            item["n"] = nullptr;
        out.push_back(std::move(item));
    }
    return out;
}

} // namespace

std::string verdict_to_json(const DoobVerdict &verdict, const StateSpace &space) {
    json doc;
    doc["classification"] = verdict.classification;
    doc["ipm_count"] = verdict.ipm_count;
    doc["n_max"] = verdict.n_max;
    doc["horizon"] = verdict.horizon;
    doc["threshold"] = verdict.threshold;
    doc["thm1_assumption_holds"] = verdict.thm1_assumption_holds;
    doc["cor1_assumption_holds"] = verdict.cor1_assumption_holds;
    doc["conclusion_allx"] = verdict.conclusion_allx;
    doc["conclusion_mu_ae"] = verdict.conclusion_mu_ae;
    doc["thm1_pairs"] = pairs_to_json(verdict.thm1_pairs, space);
    doc["cor1_pairs"] = pairs_to_json(verdict.cor1_pairs, space);
    json ipms = json::array();
    for (const IpmVerdict &iv : verdict.per_ipm) {
        json item;
        json weights = json::object();
        for (std::size_t s : iv.ipm.support())
            weights[space.label(s)] = iv.ipm[s];
        item["weights"] = std::move(weights);
        item["thm2_assumption_holds"] = iv.thm2_assumption_holds;
        item["conclusion_holds"] = iv.conclusion_holds;
        item["thm2_pairs"] = pairs_to_json(iv.thm2_pairs, space);
        ipms.push_back(std::move(item));
    }
    doc["ipms"] = std::move(ipms);
    return doc.dump(2) + "\n";
}

} // namespace coupdoob
