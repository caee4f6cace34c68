#ifndef NODALLAB_RECORDS_HPP
#define NODALLAB_RECORDS_HPP

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace nlab {

// One measurement. Files hold one JSON object per line, sorted by key
// (manifold, lambda, seed, quantity), which makes reruns byte-identical.
struct Record {
    int schema = 1;
    std::string manifold;
    double lambda = 0.0;
    std::uint64_t seed = 0;
    std::string quantity;
    double value = 0.0;
    nlohmann::json meta;  // tolerance and provenance metadata

    std::string json_line() const;
    static Record from_json_line(const std::string& line);
};

bool record_key_less(const Record& a, const Record& b);
bool same_key(const Record& a, const Record& b);

std::vector<Record> read_records(const std::filesystem::path& file);  // empty if absent
// Sorts by key, drops exact duplicate keys (first wins), writes atomically.
void write_records(const std::filesystem::path& file, std::vector<Record> records);

// Per-quantity summary: one CSV row per lambda with ensemble statistics.
void write_summary_csv(const std::filesystem::path& file, const std::vector<Record>& records,
                       const std::string& quantity);

// Plot-ready CSV: lambda, median, q1, q3.
void write_plot_csv(const std::filesystem::path& file, const std::vector<Record>& records,
                    const std::string& quantity);

}  // namespace nlab

#endif
