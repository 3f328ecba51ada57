#include "mints/harness/aggregate.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace mints::harness {

LogFit fit_log_growth(std::span<const double> t, std::span<const double> regret) {
  if (t.size() != regret.size() || t.size() < 2) {
    throw Error("fit_log_growth: need at least two (T, R) pairs of equal length");
  }
  const double n = static_cast<double>(t.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > 0.0)) throw Error("fit_log_growth: T must be > 0");
    mx += std::log(t[i]);
    my += regret[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double dx = std::log(t[i]) - mx;
    const double dy = regret[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw Error("fit_log_growth: need two distinct T values");
  LogFit fit;
  fit.b = sxy / sxx;
  fit.a = my - fit.b * mx;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

RunRecord record_of(const RunSummary& s) {
  return {to_string(s.config.family), s.config.policy(), hex64(s.hash), s.config.replications,
          s.checkpoints};
}

RunRecord load_run(const std::filesystem::path& dir) {
  const auto path = dir / "run.json";
  std::ifstream f(path);
  if (!f) throw RunError("cannot read " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
    if (j.at("schema_version").get<int>() != kSchemaVersion) {
      throw RunError(path.string() + ": unsupported schema_version");
    }
    RunRecord r;
    r.family = j.at("family").get<std::string>();
    r.policy = j.at("policy").get<std::string>();
    r.config_hash = j.at("config_hash").get<std::string>();
    r.replications = j.at("replications").get<std::size_t>();
    for (const auto& c : j.at("checkpoints")) {
      r.checkpoints.push_back({c.at("t").get<std::size_t>(), c.at("mean_regret").get<double>(),
                               c.at("stderr_regret").get<double>()});
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw RunError(path.string() + ": " + e.what());
  }
}

std::vector<AggregateRow> aggregate(const std::vector<RunRecord>& runs) {
  std::map<std::pair<std::string, std::string>, std::vector<const RunRecord*>> groups;
  for (const auto& r : runs) groups[{r.config_hash, r.policy}].push_back(&r);

  std::vector<AggregateRow> rows;
  for (const auto& [key, members] : groups) {
    const RunRecord& first = *members.front();
    RunRecord pooled{first.family, first.policy, first.config_hash, 0, {}};
    for (const auto* m : members) {
      if (m->family != first.family) throw RunError("config_hash " + key.first + " spans two families");
      std::vector<std::size_t> a, b;
      for (const auto& c : m->checkpoints) a.push_back(c.t);
      for (const auto& c : first.checkpoints) b.push_back(c.t);
      if (a != b) throw RunError("config_hash " + key.first + ": runs disagree on checkpoints");
      pooled.replications += m->replications;
    }
    const double total = static_cast<double>(pooled.replications);
    for (std::size_t i = 0; i < first.checkpoints.size(); ++i) {
      // Mean of means weighted by replications; variances combine the same way.
      double mean = 0.0, var = 0.0;
      for (const auto* m : members) {
        const double w = static_cast<double>(m->replications) / total;
        mean += w * m->checkpoints[i].mean;
        var += w * w * m->checkpoints[i].stderr_mean * m->checkpoints[i].stderr_mean;
      }
      pooled.checkpoints.push_back({first.checkpoints[i].t, mean, std::sqrt(var)});
    }
    AggregateRow row{pooled, {}};
    if (pooled.checkpoints.size() >= 2) {
      std::vector<double> ts, rs;
      for (const auto& c : pooled.checkpoints) {
        ts.push_back(static_cast<double>(c.t));
        rs.push_back(c.mean);
      }
      row.fit = fit_log_growth(ts, rs);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string aggregate_csv(const std::vector<AggregateRow>& rows) {
  std::ostringstream out;
  out << "config_hash,family,policy,replications,t,mean_regret,ci_halfwidth,log_fit_a,log_fit_b,"
         "log_fit_r2\n";
  for (const auto& row : rows) {
    const RunRecord& r = row.pooled;
    for (const auto& c : r.checkpoints) {
      out << r.config_hash << ',' << r.family << ',' << r.policy << ',' << r.replications << ','
          << c.t << ',' << format_double(c.mean) << ',' << format_double(2.0 * c.stderr_mean) << ','
          << format_double(row.fit.a) << ',' << format_double(row.fit.b) << ','
          << format_double(row.fit.r2) << '\n';
    }
  }
  return out.str();
}

}  // namespace mints::harness
