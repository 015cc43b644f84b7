#pragma once

#include "levylab/errors.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace levylab {

/// 64-bit FNV-1a hash of a byte string.
inline std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

/// Writes `content` to a temporary sibling and renames it over `path`.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error("cannot open " + tmp.string() + " for writing");
        os << content;
        if (!os) throw Error("failed to write " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

/// JSON number, or the strings "inf" / "-inf" for infinite values.
inline nlohmann::json number_to_json(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

inline double number_from_json(const nlohmann::json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw ValidationError("expected a number or \"inf\", got \"" + s + "\"");
    }
    if (!j.is_number()) throw ValidationError("expected a number");
    return j.get<double>();
}

/// Minimal CSV table with a provenance comment line.
class CsvTable {
public:
    CsvTable(std::vector<std::string> columns, std::string provenance)
        : columns_(std::move(columns)), provenance_(std::move(provenance)) {}

    void add(const std::vector<std::string>& row) {
        if (row.size() != columns_.size()) throw ParameterError("CSV row width does not match the header");
        rows_.push_back(row);
    }

    static std::string num(double v) {
        std::ostringstream os;
        os << std::setprecision(17) << v;
        return os.str();
    }

    [[nodiscard]] std::string str() const {
        std::ostringstream os;
        os << "# " << provenance_ << '\n';
        for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
        os << '\n';
        for (const auto& r : rows_) {
            for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
            os << '\n';
        }
        return os.str();
    }

    [[nodiscard]] bool empty() const { return rows_.empty(); }

private:
    std::vector<std::string> columns_;
    std::string provenance_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace levylab
