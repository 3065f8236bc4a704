#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stcomp/types.hpp"

namespace stcomp::ingest {

// ------------------------------------------------------------------ schema

/// Column names and units of one dataset file. Empty names fall back to
/// auto-detection against common spellings (id/traj_id/mmsi, ts/timestamp,
/// lat/latitude, lon/longitude, x, y, sog, cog — case-insensitive). Either
/// lat+lon or x+y must resolve; sog/cog are optional.
struct SchemaConfig {
    std::string id_column;
    std::string time_column;
    std::string lat_column;
    std::string lon_column;
    std::string x_column;
    std::string y_column;
    std::string sog_column;
    std::string cog_column;
    std::string time_format;           // "" = auto | epoch | iso8601 | dmy_hms
    std::string sog_unit = "ms";       // ms | knots
    std::string cog_unit = "radians";  // radians | compass_degrees
    std::optional<double> ref_lat;     // projection reference override, degrees
    std::optional<double> ref_lon;
};

/// Parses a `key = value` schema file (# comments, blank lines ignored).
SchemaConfig load_schema(const std::string& path);

// -------------------------------------------------------------- projection

/// Local equirectangular reference, degrees. x grows east, y grows north:
///   x = R * cos(ref_lat) * (lon - ref_lon in radians)
///   y = R * (lat - ref_lat in radians),  R = 6371000 m.
/// Inverse: lat = ref_lat + y/R (as degrees), lon = ref_lon + x/(R cos ref_lat).
struct ProjectionRef {
    double lat = 0.0;
    double lon = 0.0;
};

Vec2 project(double lat, double lon, const ProjectionRef& ref);
void unproject(const Vec2& p, const ProjectionRef& ref, double& lat, double& lon);

// ----------------------------------------------------------------- loading

struct LoadResult {
    std::map<TrajId, Trajectory> trajectories;
    std::optional<ProjectionRef> projection;  // set when the input was lat/lon
    std::vector<std::string> header;          // original column order
    // Original cell rows per point (same order as trajectory points), so
    // sample output can echo the input schema byte for byte.
    std::map<TrajId, std::vector<std::vector<std::string>>> rows;

    std::size_t total_points() const;
};

/// Loads a trajectory CSV. Rows may arrive in any order; each trajectory is
/// sorted by ts. Malformed cells, out-of-bounds lat/lon and duplicate
/// (id, ts) pairs are reported with their row numbers. When force_ref is set
/// it overrides the projection reference (used so a sample file evaluates in
/// the same plane as its original).
LoadResult load_csv(const std::string& path, const SchemaConfig& schema = {},
                    std::optional<ProjectionRef> force_ref = std::nullopt);

/// Interleaves all trajectories into one stream ordered by (ts, id).
std::vector<Point> merge_stream(const std::map<TrajId, Trajectory>& trajectories);

// ----------------------------------------------------------------- writing

/// Canonical column set: id,ts,x,y[,sog,cog]. Synthetic datasets and any
/// programmatic output use this schema; it reloads without projection.
void write_canonical_csv(const std::map<TrajId, Trajectory>& trajectories, std::ostream& out,
                         bool sog_cog = true);

/// Input schema + a trailing kept=1 marker, rows restricted to the sample
/// points with their original cells echoed back.
void write_sample_csv(const LoadResult& origin, const std::map<TrajId, Sample>& samples,
                      std::ostream& out);

}  // namespace stcomp::ingest
