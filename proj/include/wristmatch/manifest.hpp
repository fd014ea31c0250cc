#ifndef WRISTMATCH_MANIFEST_HPP
#define WRISTMATCH_MANIFEST_HPP

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "wristmatch/errors.hpp"
#include "wristmatch/image.hpp"
#include "wristmatch/image_io.hpp"

namespace wristmatch {

enum class SetTag { kGallery, kProbe };

inline const char* set_tag_name(SetTag t) {
    return t == SetTag::kGallery ? "gallery" : "probe";
}

/// One dataset row. `path` is relative to the workspace root; `flip` asks
/// for a horizontal mirror on load (right wrists are stored unmirrored and
/// flipped into the left-wrist frame here).
struct ManifestRecord {
    std::string path;
    std::string wrist_id;
    std::string subject_id;
    SetTag set = SetTag::kGallery;
    bool flip = false;
};

struct DatasetManifest {
    std::vector<ManifestRecord> records;

    std::vector<const ManifestRecord*> subset(SetTag tag) const {
        std::vector<const ManifestRecord*> out;
        for (const auto& r : records)
            if (r.set == tag) out.push_back(&r);
        return out;
    }

    /// Sorted unique wrist ids over both sets.
    std::vector<std::string> wrist_ids() const {
        std::vector<std::string> ids;
        for (const auto& r : records) ids.push_back(r.wrist_id);
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        return ids;
    }
};

inline constexpr const char* kManifestHeader =
    "path,wrist_id,subject_id,set,flip";

/// Protocol checks shared by the loader and the synthetic generator: a
/// nonempty gallery and no probe wrist without gallery images. A manifest
/// without probes is fine (training-only use); experiments check for probes
/// themselves.
inline void validate_manifest(const DatasetManifest& m) {
    if (m.records.empty()) throw DataError("manifest: no records");
    std::set<std::string> gallery_ids;
    for (const auto& r : m.records)
        if (r.set == SetTag::kGallery) gallery_ids.insert(r.wrist_id);
    if (gallery_ids.empty()) throw DataError("manifest: no gallery records");

    std::set<std::string> missing;
    for (const auto& r : m.records)
        if (r.set == SetTag::kProbe && !gallery_ids.count(r.wrist_id))
            missing.insert(r.wrist_id);
    if (!missing.empty()) {
        std::string msg = "manifest: probe wrists missing from the gallery:";
        for (const auto& id : missing) msg += " " + id;
        throw DataError(msg);
    }
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    fields.push_back(cur);
    return fields;
}

} // namespace detail

/// Parse and validate the CSV manifest (header line above, then one record
/// per line). Images are not touched; use load_record_image for that.
inline DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("manifest: cannot open: " + path);

    std::string line;
    if (!std::getline(in, line)) throw DataError("manifest: empty file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kManifestHeader)
        throw DataError("manifest: bad header, expected '" +
                        std::string(kManifestHeader) + "': " + path);

    DatasetManifest m;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto f = detail::split_csv_line(line);
        const std::string where =
            path + ":" + std::to_string(lineno) + ": ";
        if (f.size() != 5)
            throw DataError("manifest: " + where + "expected 5 fields, got " +
                            std::to_string(f.size()));
        ManifestRecord rec;
        rec.path = f[0];
        rec.wrist_id = f[1];
        rec.subject_id = f[2];
        if (rec.path.empty() || rec.wrist_id.empty())
            throw DataError("manifest: " + where + "empty path or wrist id");
        if (f[3] == "gallery")
            rec.set = SetTag::kGallery;
        else if (f[3] == "probe")
            rec.set = SetTag::kProbe;
        else
            throw DataError("manifest: " + where + "bad set tag '" + f[3] +
                            "' (want gallery or probe)");
        if (f[4] == "0")
            rec.flip = false;
        else if (f[4] == "1")
            rec.flip = true;
        else
            throw DataError("manifest: " + where + "bad flip flag '" + f[4] +
                            "' (want 0 or 1)");
        m.records.push_back(std::move(rec));
    }
    validate_manifest(m);
    return m;
}

inline void save_manifest(const DatasetManifest& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("manifest: cannot open for writing: " + path);
    out << kManifestHeader << "\n";
    for (const auto& r : m.records)
        out << r.path << "," << r.wrist_id << "," << r.subject_id << ","
            << set_tag_name(r.set) << "," << (r.flip ? 1 : 0) << "\n";
    if (!out) throw DataError("manifest: write failed: " + path);
}

inline std::string join_workspace(const std::string& workspace,
                                  const std::string& rel) {
    if (workspace.empty()) return rel;
    if (!rel.empty() && rel.front() == '/') return rel;
    return workspace.back() == '/' ? workspace + rel : workspace + "/" + rel;
}

/// Read a record's image, applying the flip flag.
inline RgbImage load_record_image(const std::string& workspace,
                                  const ManifestRecord& rec) {
    RgbImage img = read_image(join_workspace(workspace, rec.path));
    return rec.flip ? flip_horizontal(img) : img;
}

} // namespace wristmatch

#endif
