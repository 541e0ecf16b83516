#include "palmtex/manifest.hpp"

#include "palmtex/error.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

namespace palmtex {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

int parse_int(const std::string& s, const std::string& what, std::size_t line_no) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::InvalidManifest, "line " + std::to_string(line_no) + ": bad " + what + " '" + s + "'");
}

}  // namespace

std::vector<ManifestRow> read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::UnreadableFile, "cannot open manifest " + path.string());
    const auto base = path.parent_path();

    std::vector<ManifestRow> rows;
    std::set<std::tuple<std::string, int, int>> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1 && line.rfind("subject_id", 0) == 0) continue;
        const auto f = split_csv(line);
        if (f.size() < 4 || f.size() > 5)
            throw Error(ErrorCode::InvalidManifest, "line " + std::to_string(line_no) + ": expected 4 or 5 fields");
        ManifestRow row;
        row.key.subject_id = f[0];
        if (row.key.subject_id.empty())
            throw Error(ErrorCode::InvalidManifest, "line " + std::to_string(line_no) + ": empty subject_id");
        row.key.session = parse_int(f[1], "session", line_no);
        row.key.sample_index = parse_int(f[2], "sample_index", line_no);
        row.path = f[3];
        if (row.path.is_relative()) row.path = base / row.path;
        if (f.size() == 5) row.band = f[4];
        if (!seen.emplace(row.key.subject_id, row.key.session, row.key.sample_index).second)
            throw Error(ErrorCode::InvalidManifest, "line " + std::to_string(line_no) + ": duplicate sample key");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error(ErrorCode::InvalidManifest, "manifest " + path.string() + " has no rows");
    return rows;
}

void write_manifest(const std::vector<ManifestRow>& rows, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
    out << "subject_id,session,sample_index,path,band\n";
    for (const auto& r : rows)
        out << r.key.subject_id << ',' << r.key.session << ',' << r.key.sample_index << ',' << r.path.generic_string()
            << ',' << r.band << '\n';
    if (!out) throw Error(ErrorCode::IoFailure, "short write to " + path.string());
}

std::vector<SampleKey> keys_of(const std::vector<ManifestRow>& rows) {
    std::vector<SampleKey> keys;
    keys.reserve(rows.size());
    for (const auto& r : rows) keys.push_back(r.key);
    return keys;
}

}  // namespace palmtex
