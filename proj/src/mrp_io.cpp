#include "mrpeval/mrp_io.hpp"

#include <fstream>

#include "mrpeval/errors.hpp"

namespace mrpeval {

namespace {

nlohmann::json parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("malformed JSON in " + path.string() + ": " + e.what());
    }
    return j;
}

} // namespace

Mrp mrp_from_json(const nlohmann::json& j) {
    try {
        Mrp mrp;
        mrp.discount = j.at("discount").get<double>();
        mrp.reward_noise = j.at("reward_noise").get<double>();
        mrp.rewards = j.at("rewards").get<std::vector<double>>();
        const auto& rows = j.at("transitions");
        if (!rows.is_array()) throw ValidationError("mrp json: transitions must be an array");
        const std::size_t d = rows.size();
        mrp.transitions = Matrix(d, d);
        for (std::size_t i = 0; i < d; ++i) {
            const auto row = rows[i].get<std::vector<double>>();
            if (row.size() != d)
                throw ValidationError("mrp json: transitions must be square");
            for (std::size_t k = 0; k < d; ++k) mrp.transitions(i, k) = row[k];
        }
        return mrp;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("mrp json: ") + e.what());
    }
}

nlohmann::json mrp_to_json(const Mrp& mrp) {
    nlohmann::json j;
    j["discount"] = mrp.discount;
    j["reward_noise"] = mrp.reward_noise;
    j["rewards"] = mrp.rewards;
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < mrp.dim(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t k = 0; k < mrp.dim(); ++k) row.push_back(mrp.transitions(i, k));
        rows.push_back(std::move(row));
    }
    j["transitions"] = std::move(rows);
    return j;
}

Mrp load_mrp(const std::filesystem::path& path) {
    return validate(mrp_from_json(parse_file(path)));
}

void save_mrp(const Mrp& mrp, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << mrp_to_json(mrp).dump(2) << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

Vector load_vector(const std::filesystem::path& path) {
    const nlohmann::json j = parse_file(path);
    if (!j.is_array()) throw ValidationError("expected a JSON array in " + path.string());
    try {
        return j.get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("vector json: ") + e.what());
    }
}

} // namespace mrpeval
