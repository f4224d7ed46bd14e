#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "luxplace/belief_field.hpp"

namespace luxplace {

// row,col,value rows over the free cells
void write_field_csv(const std::filesystem::path& path, const LightField& field,
                     const GridMap& grid);

// 8-bit grayscale PGM heatmap (min-max normalized, row 0 of the grid at the
// bottom); normalization bounds go to a `.json` sidecar next to the image.
void write_field_pgm(const std::filesystem::path& path, const LightField& field,
                     const GridMap& grid);

// row,col,mu_s,sigma_s,mu_u,sigma_u,mu,sigma over the free cells
void write_belief_csv(const std::filesystem::path& path, const BeliefField& belief,
                      const GridMap& grid);

nlohmann::json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& j);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace luxplace
