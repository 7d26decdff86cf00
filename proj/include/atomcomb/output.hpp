#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "atomcomb/errors.hpp"
#include "atomcomb/version.hpp"

namespace atomcomb {

/// FNV-1a 64-bit over a byte string.
inline std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

inline std::string to_hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// Shortest round-trip decimal form of a double; stable across runs.
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(const std::vector<double>& values) {
        std::vector<std::string> row;
        row.reserve(values.size());
        for (double v : values) row.push_back(format_double(v));
        rows.push_back(std::move(row));
    }

    std::string render() const {
        std::ostringstream os;
        for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
        os << '\n';
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
            os << '\n';
        }
        return os.str();
    }
};

/// Ordered nested key/value document; dotted keys become indentation levels.
class SummaryDoc {
public:
    void set(const std::string& dotted_key, const std::string& value) { entries_.emplace_back(dotted_key, value); }
    void set(const std::string& dotted_key, double value) { set(dotted_key, format_double(value)); }
    void set(const std::string& dotted_key, std::uint64_t value) { set(dotted_key, std::to_string(value)); }
    void set(const std::string& dotted_key, long long value) { set(dotted_key, std::to_string(value)); }
    void set(const std::string& dotted_key, int value) { set(dotted_key, std::to_string(value)); }
    void set(const std::string& dotted_key, bool value) { set(dotted_key, std::string(value ? "true" : "false")); }

    std::string render() const {
        std::ostringstream os;
        std::vector<std::string> open;  // currently open prefix path
        for (const auto& [key, value] : entries_) {
            std::vector<std::string> parts;
            std::size_t start = 0;
            for (std::size_t dot = key.find('.'); dot != std::string::npos; dot = key.find('.', start)) {
                parts.push_back(key.substr(start, dot - start));
                start = dot + 1;
            }
            parts.push_back(key.substr(start));

            std::size_t common = 0;
            while (common < open.size() && common + 1 < parts.size() && open[common] == parts[common]) ++common;
            open.resize(common);
            for (std::size_t i = common; i + 1 < parts.size(); ++i) {
                os << std::string(2 * i, ' ') << parts[i] << ":\n";
                open.push_back(parts[i]);
            }
            os << std::string(2 * (parts.size() - 1), ' ') << parts.back() << ": " << value << '\n';
        }
        return os.str();
    }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

struct ManifestEntry {
    std::string name;
    std::uint64_t checksum = 0;
    std::uint64_t bytes = 0;
};

struct Manifest {
    std::string command;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> inputs;
    std::vector<ManifestEntry> files;

    std::string render() const {
        std::ostringstream os;
        os << "atomcomb manifest\n";
        os << "version: " << kVersion << '\n';
        os << "command: " << command << '\n';
        os << "seed: " << seed << '\n';
        for (const auto& [k, v] : inputs) os << "input " << k << ": " << v << '\n';
        for (const ManifestEntry& f : files)
            os << "file " << f.name << " fnv1a64=" << to_hex(f.checksum) << " bytes=" << f.bytes << '\n';
        return os.str();
    }
};

/// Writes bytes and records (name, checksum, size) in the manifest.
class OutputWriter {
public:
    explicit OutputWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
    }

    const std::filesystem::path& dir() const { return dir_; }

    void write(Manifest& manifest, const std::string& name, const std::string& bytes) const {
        const std::filesystem::path p = dir_ / name;
        std::ofstream os(p, std::ios::binary);
        if (!os) throw IoError("cannot open " + p.string() + " for writing");
        os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!os) throw IoError("short write to " + p.string());
        manifest.files.push_back({name, fnv1a64(bytes), bytes.size()});
    }

    void finalize(const Manifest& manifest) const {
        const std::filesystem::path p = dir_ / "manifest.txt";
        std::ofstream os(p, std::ios::binary);
        if (!os) throw IoError("cannot open " + p.string() + " for writing");
        const std::string bytes = manifest.render();
        os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    }

private:
    std::filesystem::path dir_;
};

}  // namespace atomcomb
