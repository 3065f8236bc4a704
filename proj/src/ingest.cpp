#include "stcomp/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace stcomp::ingest {

namespace {

constexpr double kEarthRadius = 6371000.0;
constexpr double kKnot = 1852.0 / 3600.0;

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

/// Shortest round-trip decimal form, so written datasets reload bit-exact.
std::string fmt_exact(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (char c : line) {
        if (quoted) {
            if (c == '"')
                quoted = false;
            else
                cur.push_back(c);
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    cells.push_back(cur);
    return cells;
}

double parse_double(const std::string& cell, std::size_t row, const char* what) {
    std::string t = trim(cell);
    char* end = nullptr;
    double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v))
        raise(errc::parse, "row " + std::to_string(row) + ": bad " + what + " value '" + cell + "'");
    return v;
}

TrajId parse_id(const std::string& cell, std::size_t row) {
    std::string t = trim(cell);
    TrajId v = 0;
    auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
        raise(errc::parse, "row " + std::to_string(row) + ": bad trajectory id '" + cell + "'");
    return v;
}

// days since 1970-01-01 for a civil date (proleptic Gregorian)
long long days_from_civil(long long y, unsigned m, unsigned d) {
    y -= m <= 2;
    long long era = (y >= 0 ? y : y - 399) / 400;
    auto yoe = static_cast<unsigned>(y - era * 400);
    unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long long>(doe) - 719468;
}

double civil_seconds(long long y, unsigned mo, unsigned d, unsigned h, unsigned mi, double s,
                     std::size_t row) {
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || s < 0.0 || s >= 61.0)
        raise(errc::parse, "row " + std::to_string(row) + ": implausible date/time field");
    return static_cast<double>(days_from_civil(y, mo, d)) * 86400.0 + h * 3600.0 + mi * 60.0 + s;
}

double parse_timestamp(const std::string& cell, const std::string& format, std::size_t row) {
    std::string t = trim(cell);
    std::string fmt = format;
    if (fmt.empty()) {  // auto-detect
        if (t.find('/') != std::string::npos)
            fmt = "dmy_hms";
        else if (t.find(':') != std::string::npos)
            fmt = "iso8601";
        else
            fmt = "epoch";
    }
    if (fmt == "epoch") return parse_double(t, row, "timestamp");
    long long y = 0;
    unsigned mo = 0;
    unsigned d = 0;
    unsigned h = 0;
    unsigned mi = 0;
    double s = 0.0;
    if (fmt == "iso8601") {
        if (std::sscanf(t.c_str(), "%lld-%u-%u%*1[T ]%u:%u:%lf", &y, &mo, &d, &h, &mi, &s) != 6)
            raise(errc::parse, "row " + std::to_string(row) + ": bad iso8601 timestamp '" + t + "'");
        return civil_seconds(y, mo, d, h, mi, s, row);
    }
    if (fmt == "dmy_hms") {
        if (std::sscanf(t.c_str(), "%u/%u/%lld %u:%u:%lf", &d, &mo, &y, &h, &mi, &s) != 6)
            raise(errc::parse,
                  "row " + std::to_string(row) + ": bad dd/mm/yyyy timestamp '" + t + "'");
        return civil_seconds(y, mo, d, h, mi, s, row);
    }
    raise(errc::schema, "unknown time_format '" + format + "'");
}

int find_column(const std::vector<std::string>& header, const std::string& declared,
                std::initializer_list<const char*> fallbacks, const char* what, bool required) {
    if (!declared.empty()) {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (lower(trim(header[i])) == lower(trim(declared))) return static_cast<int>(i);
        raise(errc::schema, std::string("declared ") + what + " column '" + declared +
                                "' not present in header");
    }
    for (const char* name : fallbacks)
        for (std::size_t i = 0; i < header.size(); ++i)
            if (lower(trim(header[i])) == name) return static_cast<int>(i);
    if (required) raise(errc::schema, std::string("no ") + what + " column found");
    return -1;
}

double to_math_radians(double v, const std::string& unit, std::size_t row) {
    double rad;
    if (unit == "radians")
        rad = v;
    else if (unit == "compass_degrees")
        // compass: 0 = north, clockwise; math: 0 = east, counter-clockwise
        rad = std::numbers::pi / 2.0 - v * std::numbers::pi / 180.0;
    else
        raise(errc::schema, "unknown cog_unit '" + unit + "'");
    rad = std::fmod(rad, 2.0 * std::numbers::pi);
    if (rad < 0.0) rad += 2.0 * std::numbers::pi;
    (void)row;
    return rad;
}

}  // namespace

// ------------------------------------------------------------------ schema

SchemaConfig load_schema(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(errc::io, "cannot open schema file " + path);
    SchemaConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            raise(errc::parse, "schema line " + std::to_string(lineno) + ": expected key = value");
        std::string key = lower(trim(t.substr(0, eq)));
        std::string value = trim(t.substr(eq + 1));
        if (key == "id") cfg.id_column = value;
        else if (key == "time") cfg.time_column = value;
        else if (key == "lat") cfg.lat_column = value;
        else if (key == "lon") cfg.lon_column = value;
        else if (key == "x") cfg.x_column = value;
        else if (key == "y") cfg.y_column = value;
        else if (key == "sog") cfg.sog_column = value;
        else if (key == "cog") cfg.cog_column = value;
        else if (key == "time_format") cfg.time_format = value;
        else if (key == "sog_unit") cfg.sog_unit = value;
        else if (key == "cog_unit") cfg.cog_unit = value;
        else if (key == "ref_lat") cfg.ref_lat = parse_double(value, lineno, "ref_lat");
        else if (key == "ref_lon") cfg.ref_lon = parse_double(value, lineno, "ref_lon");
        else
            raise(errc::schema, "schema line " + std::to_string(lineno) + ": unknown key '" +
                                    key + "'");
    }
    return cfg;
}

// -------------------------------------------------------------- projection

Vec2 project(double lat, double lon, const ProjectionRef& ref) {
    double rad = std::numbers::pi / 180.0;
    return {kEarthRadius * std::cos(ref.lat * rad) * (lon - ref.lon) * rad,
            kEarthRadius * (lat - ref.lat) * rad};
}

void unproject(const Vec2& p, const ProjectionRef& ref, double& lat, double& lon) {
    double deg = 180.0 / std::numbers::pi;
    lat = ref.lat + p.y / kEarthRadius * deg;
    lon = ref.lon + p.x / (kEarthRadius * std::cos(ref.lat * std::numbers::pi / 180.0)) * deg;
}

// ----------------------------------------------------------------- loading

std::size_t LoadResult::total_points() const {
    std::size_t n = 0;
    for (const auto& [id, t] : trajectories) n += t.points.size();
    return n;
}

LoadResult load_csv(const std::string& path, const SchemaConfig& schema,
                    std::optional<ProjectionRef> force_ref) {
    std::ifstream in(path);
    if (!in) raise(errc::io, "cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) raise(errc::empty_input, path + " is empty");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

    LoadResult out;
    out.header = split_line(line);

    int ci = find_column(out.header, schema.id_column, {"id", "traj_id", "trajectory_id", "mmsi"},
                         "id", true);
    int ct = find_column(out.header, schema.time_column,
                         {"ts", "t", "timestamp", "time", "# timestamp"}, "time", true);
    int cx = find_column(out.header, schema.x_column, {"x"}, "x", false);
    int cy = find_column(out.header, schema.y_column, {"y"}, "y", false);
    int clat = find_column(out.header, schema.lat_column, {"lat", "latitude"}, "lat", false);
    int clon = find_column(out.header, schema.lon_column, {"lon", "lng", "longitude"}, "lon", false);
    int csog = find_column(out.header, schema.sog_column, {"sog", "speed"}, "sog", false);
    int ccog = find_column(out.header, schema.cog_column, {"cog", "course", "heading"}, "cog",
                           false);

    bool planar = cx >= 0 && cy >= 0;
    if (!planar && (clat < 0 || clon < 0))
        raise(errc::schema, path + ": need either x+y or lat+lon columns");

    struct Rec {
        Point p;
        double lat = 0.0;
        double lon = 0.0;
        std::size_t row = 0;
        std::vector<std::string> cells;
    };
    std::vector<Rec> recs;
    double lat_sum = 0.0;
    double lon_sum = 0.0;

    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        Rec r;
        r.cells = split_line(line);
        r.row = row;
        if (r.cells.size() != out.header.size())
            raise(errc::parse, "row " + std::to_string(row) + ": expected " +
                                   std::to_string(out.header.size()) + " cells, got " +
                                   std::to_string(r.cells.size()));
        r.p.id = parse_id(r.cells[ci], row);
        r.p.ts = parse_timestamp(r.cells[ct], schema.time_format, row);
        if (planar) {
            r.p.x = parse_double(r.cells[cx], row, "x");
            r.p.y = parse_double(r.cells[cy], row, "y");
        } else {
            r.lat = parse_double(r.cells[clat], row, "lat");
            r.lon = parse_double(r.cells[clon], row, "lon");
            if (r.lat < -90.0 || r.lat > 90.0)
                raise(errc::out_of_range,
                      "row " + std::to_string(row) + ": latitude " + std::to_string(r.lat));
            if (r.lon < -180.0 || r.lon > 180.0)
                raise(errc::out_of_range,
                      "row " + std::to_string(row) + ": longitude " + std::to_string(r.lon));
            lat_sum += r.lat;
            lon_sum += r.lon;
        }
        if (csog >= 0 && !trim(r.cells[csog]).empty()) {
            double sog = parse_double(r.cells[csog], row, "sog");
            if (schema.sog_unit == "knots")
                sog *= kKnot;
            else if (schema.sog_unit != "ms")
                raise(errc::schema, "unknown sog_unit '" + schema.sog_unit + "'");
            r.p.sog = sog;
        }
        if (ccog >= 0 && !trim(r.cells[ccog]).empty())
            r.p.cog = to_math_radians(parse_double(r.cells[ccog], row, "cog"), schema.cog_unit,
                                      row);
        recs.push_back(std::move(r));
    }
    if (recs.empty()) raise(errc::empty_input, path + " holds no data rows");

    if (!planar) {
        ProjectionRef ref;
        if (force_ref)
            ref = *force_ref;
        else if (schema.ref_lat && schema.ref_lon)
            ref = {*schema.ref_lat, *schema.ref_lon};
        else
            ref = {lat_sum / static_cast<double>(recs.size()),
                   lon_sum / static_cast<double>(recs.size())};
        out.projection = ref;
        for (Rec& r : recs) {
            Vec2 v = project(r.lat, r.lon, ref);
            r.p.x = v.x;
            r.p.y = v.y;
        }
    } else if (force_ref) {
        out.projection = force_ref;
    }

    std::map<TrajId, std::vector<Rec*>> groups;
    for (Rec& r : recs) groups[r.p.id].push_back(&r);
    for (auto& [id, g] : groups) {
        std::stable_sort(g.begin(), g.end(),
                         [](const Rec* a, const Rec* b) { return a->p.ts < b->p.ts; });
        Trajectory t;
        t.id = id;
        t.points.reserve(g.size());
        auto& cells = out.rows[id];
        cells.reserve(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (i > 0 && g[i]->p.ts == g[i - 1]->p.ts)
                raise(errc::integrity, "trajectory " + std::to_string(id) +
                                           ": duplicate timestamp at rows " +
                                           std::to_string(g[i - 1]->row) + " and " +
                                           std::to_string(g[i]->row));
            t.points.push_back(g[i]->p);
            cells.push_back(std::move(g[i]->cells));
        }
        out.trajectories.emplace(id, std::move(t));
    }
    return out;
}

std::vector<Point> merge_stream(const std::map<TrajId, Trajectory>& trajectories) {
    std::vector<Point> out;
    for (const auto& [id, t] : trajectories) {
        for (std::size_t i = 1; i < t.points.size(); ++i)
            if (!(t.points[i - 1].ts < t.points[i].ts))
                raise(errc::ordering,
                      "trajectory " + std::to_string(id) + " is not strictly increasing in time");
        out.insert(out.end(), t.points.begin(), t.points.end());
    }
    std::sort(out.begin(), out.end(), [](const Point& a, const Point& b) {
        if (a.ts != b.ts) return a.ts < b.ts;
        return a.id < b.id;
    });
    return out;
}

// ----------------------------------------------------------------- writing

void write_canonical_csv(const std::map<TrajId, Trajectory>& trajectories, std::ostream& out,
                         bool sog_cog) {
    out << (sog_cog ? "id,ts,x,y,sog,cog" : "id,ts,x,y") << '\n';
    for (const auto& [id, t] : trajectories) {
        for (const Point& p : t.points) {
            out << id << ',' << fmt_exact(p.ts) << ',' << fmt_exact(p.x) << ',' << fmt_exact(p.y);
            if (sog_cog) {
                out << ',';
                if (p.sog) out << fmt_exact(*p.sog);
                out << ',';
                if (p.cog) out << fmt_exact(*p.cog);
            }
            out << '\n';
        }
    }
}

void write_sample_csv(const LoadResult& origin, const std::map<TrajId, Sample>& samples,
                      std::ostream& out) {
    for (std::size_t i = 0; i < origin.header.size(); ++i)
        out << (i ? "," : "") << origin.header[i];
    out << ",kept\n";
    for (const auto& [id, s] : samples) {
        auto traj = origin.trajectories.find(id);
        auto cells = origin.rows.find(id);
        if (traj == origin.trajectories.end() || cells == origin.rows.end())
            raise(errc::integrity, "sample for trajectory " + std::to_string(id) +
                                       " has no loaded original");
        const auto& pts = traj->second.points;
        std::size_t i = 0;
        for (const Point& sp : s.points) {
            while (i < pts.size() && pts[i].ts < sp.ts) ++i;
            if (i >= pts.size() || pts[i].ts != sp.ts)
                raise(errc::integrity, "sample point not present in original trajectory " +
                                           std::to_string(id));
            const auto& row = cells->second[i];
            for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
            out << ",1\n";
            ++i;
        }
    }
}

}  // namespace stcomp::ingest
