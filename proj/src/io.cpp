#include "rbsn/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "json.hpp"
#include "rbsn/errors.hpp"

namespace rbsn {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

fs::path temp_sibling(const fs::path& path)
{
    fs::path tmp = path;
    tmp += ".tmp" + std::to_string(::getpid());
    return tmp;
}

fs::path parent_or_cwd(const fs::path& path)
{
    const auto parent = path.parent_path();
    return parent.empty() ? fs::path(".") : parent;
}

}  // namespace

void check_writable(const fs::path& path)
{
    std::error_code ec;
    const auto dir = parent_or_cwd(path);
    if (!fs::is_directory(dir, ec))
        throw IoError("output directory does not exist: " + dir.string());
    if (fs::exists(path, ec) && fs::is_directory(path, ec))
        throw IoError("output path is a directory: " + path.string());
    const auto probe = temp_sibling(path);
    {
        std::ofstream out(probe, std::ios::binary);
        if (!out)
            throw IoError("cannot write to " + path.string());
    }
    fs::remove(probe, ec);
}

void write_file_atomic(const fs::path& path, const std::string& content)
{
    const auto tmp = temp_sibling(path);
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out)
            throw IoError("cannot write to " + path.string());
        out << content;
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw IoError("write failed for " + path.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot move output into place: " + path.string());
    }
}

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad())
        throw IoError("read failed for " + path.string());
    return ss.str();
}

// ---------------------------------------------------------------------------

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> cells)
{
    if (cells.size() != header_.size())
        throw std::invalid_argument("CSV row has " + std::to_string(cells.size()) + " cells, header has "
                                    + std::to_string(header_.size()));
    rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const
{
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i)
                out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(header_);
    for (const auto& r : rows_)
        line(r);
    return out;
}

// ---------------------------------------------------------------------------

namespace {

json vec(Vec2 v) { return json::array({v.x, v.y}); }

Vec2 to_vec(const json& j)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw IoError("expected a coordinate pair, got " + j.dump());
    return {j[0].get<double>(), j[1].get<double>()};
}

bool uses_triangles(TessellationKind k)
{
    return k == TessellationKind::Random || k == TessellationKind::CenteredRandom;
}

}  // namespace

std::string tessellation_to_json(const Tessellation& t)
{
    json j;
    j["version"] = 1;
    j["dim"] = t.dim;
    j["domain"] = {{"min", vec(t.domain.min)}, {"max", vec(t.domain.max)}};
    j["seed"] = t.seed;
    j["kind"] = to_string(t.kind);
    j["l_min"] = t.l_min;
    j["nodes"] = json::array();
    for (auto p : t.nodes)
        j["nodes"].push_back(vec(p));
    j["vertices"] = json::array();
    for (auto p : t.vertices)
        j["vertices"].push_back(vec(p));
    j["bodies"] = json::array();
    for (std::size_t i = 0; i < t.bodies.size(); ++i) {
        json b{{"node_id", i}};
        if (uses_triangles(t.kind))
            b["triangles"] = t.bodies[i].loops;
        else
            b["polygon"] = t.bodies[i].loops.empty() ? std::vector<int>{} : t.bodies[i].loops.front();
        j["bodies"].push_back(std::move(b));
    }
    j["contacts"] = json::array();
    for (const auto& c : t.contacts)
        j["contacts"].push_back({{"a", c.a},
                                 {"b", c.b},
                                 {"face", c.face},
                                 {"A", c.area},
                                 {"l", c.length},
                                 {"n", vec(c.normal)},
                                 {"t", vec(c.contact)},
                                 {"c", vec(c.centroid)},
                                 {"chi", c.chi}});
    return j.dump() + "\n";
}

Tessellation tessellation_from_json(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw IoError(std::string("malformed tessellation JSON: ") + e.what());
    }
    try {
        if (j.at("version").get<int>() != 1)
            throw IoError("unsupported tessellation version " + j.at("version").dump());
        Tessellation t;
        t.dim = j.at("dim").get<int>();
        if (t.dim != 2)
            throw IoError("only 2D tessellations are supported");
        t.domain.min = to_vec(j.at("domain").at("min"));
        t.domain.max = to_vec(j.at("domain").at("max"));
        t.domain.validate();
        t.seed = j.at("seed").get<std::uint64_t>();
        t.kind = tessellation_kind_from_string(j.at("kind").get<std::string>());
        t.l_min = j.at("l_min").get<double>();
        if (!(t.l_min > 0.0))
            throw IoError("l_min must be positive");
        for (const auto& p : j.at("nodes"))
            t.nodes.push_back(to_vec(p));
        for (const auto& p : j.at("vertices"))
            t.vertices.push_back(to_vec(p));
        const auto nv = static_cast<int>(t.vertices.size());
        t.bodies.resize(t.nodes.size());
        for (const auto& b : j.at("bodies")) {
            const auto id = b.at("node_id").get<std::size_t>();
            if (id >= t.nodes.size())
                throw IoError("body refers to missing node " + std::to_string(id));
            if (b.contains("triangles"))
                t.bodies[id].loops = b.at("triangles").get<std::vector<std::vector<int>>>();
            else
                t.bodies[id].loops = {b.at("polygon").get<std::vector<int>>()};
            for (const auto& loop : t.bodies[id].loops) {
                if (loop.size() < 3)
                    throw IoError("body " + std::to_string(id) + " has a loop with fewer than 3 vertices");
                for (int v : loop)
                    if (v < 0 || v >= nv)
                        throw IoError("body " + std::to_string(id) + " refers to missing vertex " + std::to_string(v));
            }
        }
        const auto nn = static_cast<int>(t.nodes.size());
        if (j.contains("contacts") && !j.at("contacts").empty()) {
            for (const auto& c : j.at("contacts")) {
                ContactElement e;
                e.a = c.at("a").get<int>();
                e.b = c.at("b").get<int>();
                if (e.a < 0 || e.b >= nn || e.a >= e.b)
                    throw IoError("contact has invalid node pair " + c.at("a").dump() + ", " + c.at("b").dump());
                e.face = c.at("face").get<std::array<int, 2>>();
                e.area = c.at("A").get<double>();
                e.length = c.at("l").get<double>();
                e.normal = to_vec(c.at("n"));
                e.contact = to_vec(c.at("t"));
                e.centroid = to_vec(c.at("c"));
                e.chi = c.at("chi").get<double>();
                t.contacts.push_back(e);
            }
        } else {
            t.contacts = extract_contacts(t);
        }
        return t;
    } catch (const json::exception& e) {
        throw IoError(std::string("invalid tessellation document: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw IoError(std::string("invalid tessellation document: ") + e.what());
    }
}

void save_tessellation(const Tessellation& t, const fs::path& path)
{
    write_file_atomic(path, tessellation_to_json(t));
}

Tessellation load_tessellation(const fs::path& path)
{
    return tessellation_from_json(read_file(path));
}

}  // namespace rbsn
