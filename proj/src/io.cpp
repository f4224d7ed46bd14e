#include "luxplace/io.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace luxplace {
namespace {

constexpr int kScenarioSchemaVersion = 1;

nlohmann::json emitters_to_json(const EmitterConfig& config) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : config)
        arr.push_back({{"x", e.position.x}, {"y", e.position.y}, {"b", e.brightness}});
    return arr;
}

EmitterConfig emitters_from_json(const nlohmann::json& arr) {
    EmitterConfig config;
    for (const auto& e : arr)
        config.push_back({{e.at("x").get<double>(), e.at("y").get<double>()},
                          e.at("b").get<double>()});
    return config;
}

nlohmann::json lighting_to_json(const LightingParams& p) {
    return {{"rays_per_source", p.rays_per_source},
            {"max_reflections", p.max_reflections},
            {"brightness_scale", p.brightness_scale},
            {"hit_epsilon", p.hit_epsilon},
            {"max_path", p.max_path},
            {"min_distance_clamp", p.min_distance_clamp}};
}

LightingParams lighting_from_json(const nlohmann::json& j) {
    LightingParams p;
    p.rays_per_source = j.at("rays_per_source").get<int>();
    p.max_reflections = j.at("max_reflections").get<int>();
    p.brightness_scale = j.at("brightness_scale").get<double>();
    p.hit_epsilon = j.at("hit_epsilon").get<double>();
    p.max_path = j.at("max_path").get<double>();
    p.min_distance_clamp = j.at("min_distance_clamp").get<double>();
    return p;
}

}  // namespace

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << content;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_field_csv(const std::filesystem::path& path, const LightField& field,
                     const GridMap& grid) {
    std::ostringstream out;
    out << "row,col,value\n";
    out.precision(17);
    for (const Cell& c : grid.free_cells())
        out << c.row << ',' << c.col << ',' << field.at(c) << '\n';
    write_text_file(path, out.str());
}

void write_field_pgm(const std::filesystem::path& path, const LightField& field,
                     const GridMap& grid) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const Cell& c : grid.free_cells()) {
        lo = std::min(lo, field.at(c));
        hi = std::max(hi, field.at(c));
    }
    if (grid.free_cells().empty()) lo = hi = 0.0;
    const double span = hi - lo;

    std::ostringstream out;
    out << "P5\n" << grid.width() << ' ' << grid.height() << "\n255\n";
    for (int r = grid.height() - 1; r >= 0; --r) {  // row 0 at the bottom of the image
        for (int col = 0; col < grid.width(); ++col) {
            const Cell c{r, col};
            unsigned char v = 0;
            if (grid.is_free(c) && span > 0.0)
                v = static_cast<unsigned char>(std::lround(255.0 * (field.at(c) - lo) / span));
            out.put(static_cast<char>(v));
        }
    }
    write_text_file(path, out.str());

    nlohmann::json sidecar{{"min", lo}, {"max", hi},
                           {"width", grid.width()}, {"height", grid.height()},
                           {"obstacle_cells_rendered_as", 0}};
    write_text_file(path.string() + ".json", sidecar.dump(2) + "\n");
}

void write_belief_csv(const std::filesystem::path& path, const BeliefField& belief,
                      const GridMap& grid) {
    std::ostringstream out;
    out << "row,col,mu_s,sigma_s,mu_u,sigma_u,mu,sigma\n";
    out.precision(17);
    for (const Cell& c : grid.free_cells()) {
        const std::size_t i = belief.index(c);
        out << c.row << ',' << c.col << ',' << belief.mu_s[i] << ',' << belief.sigma_s[i] << ','
            << belief.mu_u[i] << ',' << belief.sigma_u[i] << ',' << belief.mu_total[i] << ','
            << belief.sigma_total[i] << '\n';
    }
    write_text_file(path, out.str());
}

nlohmann::json scenario_to_json(const Scenario& s) {
    nlohmann::json j;
    j["schema_version"] = kScenarioSchemaVersion;
    j["env_seed"] = s.env_seed;
    j["start_seed"] = s.start_seed;
    j["level"] = task_level_name(s.level);
    j["counts"] = {{"num_obstacles", s.counts.num_obstacles},
                   {"num_unknown", s.counts.num_unknown},
                   {"num_target", s.counts.num_target},
                   {"num_configured", s.counts.num_configured}};
    j["gen"] = {{"width_cells", s.gen.width_cells},
                {"height_cells", s.gen.height_cells},
                {"spacing", s.gen.spacing},
                {"obstacle_half_extent_min", s.gen.obstacle_half_extent_min},
                {"obstacle_half_extent_max", s.gen.obstacle_half_extent_max},
                {"reflectivity_min", s.gen.reflectivity_min},
                {"reflectivity_max", s.gen.reflectivity_max},
                {"target_brightness_min", s.gen.target_brightness_min},
                {"target_brightness_max", s.gen.target_brightness_max},
                {"unknown_brightness", s.gen.unknown_brightness},
                {"initial_brightness", s.gen.initial_brightness},
                {"min_free_fraction", s.gen.min_free_fraction},
                {"max_attempts", s.gen.max_attempts},
                {"lighting", lighting_to_json(s.gen.lighting)}};
    nlohmann::json obstacles = nlohmann::json::array();
    for (const auto& o : s.obstacles.obstacles())
        obstacles.push_back({{"min_x", o.rect.min.x},
                             {"min_y", o.rect.min.y},
                             {"max_x", o.rect.max.x},
                             {"max_y", o.rect.max.y},
                             {"reflectivity", o.reflectivity}});
    j["obstacles"] = std::move(obstacles);
    j["target_emitters"] = emitters_to_json(s.target_emitters);
    j["unknown_emitters"] = emitters_to_json(s.unknown_emitters);
    j["initial_config"] = emitters_to_json(s.initial_config);
    j["desired"] = {{"width", s.desired.width},
                    {"height", s.desired.height},
                    {"values", s.desired.values}};
    j["start_cell"] = {{"row", s.start_cell.row}, {"col", s.start_cell.col}};
    j["max_steps"] = s.max_steps;
    j["sim_noise_sigma"] = s.sim_noise_sigma;
    return j;
}

Scenario scenario_from_json(const nlohmann::json& j) {
    if (j.at("schema_version").get<int>() != kScenarioSchemaVersion)
        throw std::runtime_error("scenario_from_json: unsupported schema version");
    Scenario s;
    s.env_seed = j.at("env_seed").get<std::uint64_t>();
    s.start_seed = j.at("start_seed").get<std::uint64_t>();
    s.level = task_level_from_string(j.at("level").get<std::string>());
    const auto& counts = j.at("counts");
    s.counts = {counts.at("num_obstacles").get<int>(), counts.at("num_unknown").get<int>(),
                counts.at("num_target").get<int>(), counts.at("num_configured").get<int>()};
    const auto& gen = j.at("gen");
    s.gen.width_cells = gen.at("width_cells").get<int>();
    s.gen.height_cells = gen.at("height_cells").get<int>();
    s.gen.spacing = gen.at("spacing").get<double>();
    s.gen.obstacle_half_extent_min = gen.at("obstacle_half_extent_min").get<double>();
    s.gen.obstacle_half_extent_max = gen.at("obstacle_half_extent_max").get<double>();
    s.gen.reflectivity_min = gen.at("reflectivity_min").get<double>();
    s.gen.reflectivity_max = gen.at("reflectivity_max").get<double>();
    s.gen.target_brightness_min = gen.at("target_brightness_min").get<double>();
    s.gen.target_brightness_max = gen.at("target_brightness_max").get<double>();
    s.gen.unknown_brightness = gen.at("unknown_brightness").get<double>();
    s.gen.initial_brightness = gen.at("initial_brightness").get<double>();
    s.gen.min_free_fraction = gen.at("min_free_fraction").get<double>();
    s.gen.max_attempts = gen.at("max_attempts").get<int>();
    s.gen.lighting = lighting_from_json(gen.at("lighting"));

    std::vector<Obstacle> obstacles;
    for (const auto& o : j.at("obstacles"))
        obstacles.push_back({{{o.at("min_x").get<double>(), o.at("min_y").get<double>()},
                              {o.at("max_x").get<double>(), o.at("max_y").get<double>()}},
                             o.at("reflectivity").get<double>()});
    s.obstacles = ObstacleSet(std::move(obstacles));
    s.grid = GridMap(s.gen.width_cells, s.gen.height_cells, s.gen.spacing, {0.0, 0.0},
                     s.obstacles);
    s.target_emitters = emitters_from_json(j.at("target_emitters"));
    s.unknown_emitters = emitters_from_json(j.at("unknown_emitters"));
    s.initial_config = emitters_from_json(j.at("initial_config"));

    const auto& desired = j.at("desired");
    s.desired = LightField(desired.at("width").get<int>(), desired.at("height").get<int>());
    s.desired.values = desired.at("values").get<std::vector<double>>();

    s.start_cell = {j.at("start_cell").at("row").get<int>(),
                    j.at("start_cell").at("col").get<int>()};
    s.max_steps = j.at("max_steps").get<int>();
    s.sim_noise_sigma = j.at("sim_noise_sigma").get<double>();

    // derived, not serialized
    s.unknown_truth = render_field(s.unknown_emitters, s.obstacles, s.grid, s.gen.lighting);
    return s;
}

}  // namespace luxplace
