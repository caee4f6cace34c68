#include "nodallab/records.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "nodallab/common.hpp"

namespace nlab {

std::string Record::json_line() const {
    nlohmann::json j;
    j["schema"] = schema;
    j["manifold"] = manifold;
    j["lambda"] = lambda;
    j["seed"] = seed;
    j["quantity"] = quantity;
    j["value"] = value;
    j["meta"] = meta;
    return j.dump();
}

Record Record::from_json_line(const std::string& line) {
    const auto j = nlohmann::json::parse(line);
    Record r;
    r.schema = j.value("schema", 1);
    r.manifold = j.at("manifold").get<std::string>();
    r.lambda = j.at("lambda").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.quantity = j.at("quantity").get<std::string>();
    r.value = j.at("value").get<double>();
    if (j.contains("meta")) r.meta = j.at("meta");
    return r;
}

bool record_key_less(const Record& a, const Record& b) {
    if (a.manifold != b.manifold) return a.manifold < b.manifold;
    if (a.lambda != b.lambda) return a.lambda < b.lambda;
    if (a.seed != b.seed) return a.seed < b.seed;
    return a.quantity < b.quantity;
}

bool same_key(const Record& a, const Record& b) {
    return a.manifold == b.manifold && a.lambda == b.lambda && a.seed == b.seed &&
           a.quantity == b.quantity;
}

std::vector<Record> read_records(const std::filesystem::path& file) {
    std::vector<Record> out;
    std::ifstream is(file);
    if (!is) return out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        out.push_back(Record::from_json_line(line));
    }
    return out;
}

void write_records(const std::filesystem::path& file, std::vector<Record> records) {
    std::stable_sort(records.begin(), records.end(), record_key_less);
    records.erase(std::unique(records.begin(), records.end(), same_key), records.end());
    if (!file.parent_path().empty()) std::filesystem::create_directories(file.parent_path());
    const auto tmp = file.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::trunc);
        if (!os) throw std::runtime_error("write_records: cannot open " + tmp);
        for (const auto& r : records) os << r.json_line() << "\n";
    }
    std::filesystem::rename(tmp, file);
}

namespace {

struct Stats {
    std::vector<double> values;
    double quantile(double q) const {
        if (values.empty()) return 0.0;
        std::vector<double> v = values;
        std::sort(v.begin(), v.end());
        const double pos = q * double(v.size() - 1);
        const std::size_t i = std::size_t(pos);
        const double frac = pos - double(i);
        if (i + 1 < v.size()) return v[i] * (1.0 - frac) + v[i + 1] * frac;
        return v.back();
    }
    double mean() const {
        double s = 0.0;
        for (double v : values) s += v;
        return values.empty() ? 0.0 : s / double(values.size());
    }
};

std::map<double, Stats> group_by_lambda(const std::vector<Record>& records,
                                        const std::string& quantity) {
    std::map<double, Stats> groups;
    for (const auto& r : records)
        if (r.quantity == quantity) groups[r.lambda].values.push_back(r.value);
    return groups;
}

}  // namespace

void write_summary_csv(const std::filesystem::path& file, const std::vector<Record>& records,
                       const std::string& quantity) {
    const auto groups = group_by_lambda(records, quantity);
    std::ofstream os(file, std::ios::trunc);
    if (!os) throw std::runtime_error("write_summary_csv: cannot open " + file.string());
    os << "lambda,count,mean,median,q1,q3\n";
    os.precision(17);
    for (const auto& [lambda, s] : groups)
        os << lambda << ',' << s.values.size() << ',' << s.mean() << ',' << s.quantile(0.5) << ','
           << s.quantile(0.25) << ',' << s.quantile(0.75) << "\n";
}

void write_plot_csv(const std::filesystem::path& file, const std::vector<Record>& records,
                    const std::string& quantity) {
    const auto groups = group_by_lambda(records, quantity);
    std::ofstream os(file, std::ios::trunc);
    if (!os) throw std::runtime_error("write_plot_csv: cannot open " + file.string());
    os << "lambda,median,q1,q3\n";
    os.precision(17);
    for (const auto& [lambda, s] : groups)
        os << lambda << ',' << s.quantile(0.5) << ',' << s.quantile(0.25) << ','
           << s.quantile(0.75) << "\n";
}

}  // namespace nlab
