// SPDX-License-Identifier: MIT
/**
 * @file output.hpp
 * @brief Artifact writers of the command-line tool (JSON and CSV).
 *
 * Numbers are written with 17 significant digits (CSV) or as the shortest
 * round-trip representation (JSON), so every artifact reproduces the library
 * values exactly. Nothing time- or host-dependent is written.
 */
#pragma once

#include "panelfactor/panelfactor.hpp"

#include "json.hpp"

#include <string>

namespace pf::cli {

using Json = nlohmann::ordered_json;

std::string format_number(double v);

void write_text(const std::string& dir, const std::string& file, const std::string& text);
void write_json(const std::string& dir, const std::string& file, const Json& j);

/// time, F1..Fd
std::string factors_csv(const FactorStructure& fs, const std::vector<std::string>& time_labels);
/// unit, L1..Ld
std::string loadings_csv(const FactorStructure& fs, const std::vector<std::string>& unit_labels);
/// kind,label,value with rows mu, alpha (per unit) and theta (per time)
std::string effects_csv(const AdditiveEffects& a, Effects effects, bool has_intercept,
                        const std::vector<std::string>& time_labels, const std::vector<std::string>& unit_labels);

Json coefficients_json(const SummaryTable& table);
Json dims_json(const DimReport& rep);
Json test_json(const TestResult& r);

/// Plain-text criterion table for the console.
std::string dims_table(const DimReport& rep);

}  // namespace pf::cli
