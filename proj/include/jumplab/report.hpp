#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "jumplab/coupling.hpp"
#include "jumplab/law.hpp"
#include "jumplab/sde.hpp"

namespace jumplab {

// Formats a double with 17 significant digits; the same bits always give the
// same text. Non-finite values come back as "inf", "-inf", or "nan".
std::string format_g17(double v);

// Serializes the tree with every float at 17 significant digits and no
// locale dependence. Non-finite floats become null.
std::string dump_json_17(const nlohmann::ordered_json& j, int indent = 2);

void write_text_file(const std::string& path, const std::string& content);

// CSV emitters; every float uses format_g17 and rows end with '\n'.
void write_tv_csv(const std::string& path, const TvCurve& curve);          // t,tv,stderr
void write_tail_csv(const std::string& path, const std::vector<TailPoint>& tail);  // t,tail,n
void write_law_csv(const std::string& path, const EmpiricalLaw& law);      // centers,mass
void write_trajectory_csv(const std::string& path, const Trajectory& traj);
void write_terminals_csv(const std::string& path, const std::vector<Vec>& terminals);

nlohmann::ordered_json law_summary_json(const EmpiricalLaw& law);
nlohmann::ordered_json tv_curve_json(const TvCurve& curve);

}  // namespace jumplab
