#pragma once

// Series literal: {"dim": n, "terms": [{"m": [m1, ..., mn], "re": x, "im": y}, ...]}
// An optional "max_degree" raises the truncation bound above the largest term degree.

#include <json.hpp>

#include "bergman/series.hpp"

namespace bergman {

inline PowerSeries series_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object()) throw invalid_argument_error("series literal must be a JSON object");
    const auto n = j.at("dim").get<long long>();
    if (n <= 0) throw invalid_argument_error("series literal: dim must be positive");
    PowerSeries::Coefficients terms;
    unsigned degree = 0;
    for (const auto& t : j.at("terms")) {
      std::vector<unsigned> entries;
      for (const auto& e : t.at("m")) {
        const auto v = e.get<long long>();
        if (v < 0) throw invalid_argument_error("series literal: negative exponent");
        entries.push_back(static_cast<unsigned>(v));
      }
      MultiIndex m(std::move(entries));
      if (m.size() != static_cast<std::size_t>(n))
        throw invalid_argument_error("series literal: index " + m.to_string() + " does not have length " +
                                     std::to_string(n));
      const complex a{t.value("re", 0.0), t.value("im", 0.0)};
      degree = std::max(degree, m.degree());
      if (!terms.emplace(m, a).second)
        throw invalid_argument_error("series literal: duplicate index " + m.to_string());
    }
    if (j.contains("max_degree")) {
      const auto md = j.at("max_degree").get<long long>();
      if (md < static_cast<long long>(degree))
        throw invalid_argument_error("series literal: max_degree below the degree of a term");
      degree = static_cast<unsigned>(md);
    }
    return PowerSeries(static_cast<std::size_t>(n), degree, std::move(terms));
  } catch (const nlohmann::json::exception& e) {
    throw invalid_argument_error(std::string("series literal: ") + e.what());
  }
}

inline nlohmann::json series_to_json(const PowerSeries& f) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [m, a] : f.coefficients()) {
    terms.push_back({{"m", std::vector<unsigned>(m.entries().begin(), m.entries().end())},
                     {"re", a.real()},
                     {"im", a.imag()}});
  }
  return {{"dim", f.dimension()}, {"max_degree", f.max_degree()}, {"terms", std::move(terms)}};
}

}  // namespace bergman
