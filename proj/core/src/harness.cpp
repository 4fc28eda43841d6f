#include "ccg/harness.hpp"

#include <cmath>
#include <map>

#include "ccg/csv.hpp"
#include "ccg/errors.hpp"
#include "ccg/parallel.hpp"
#include "json.hpp"

namespace ccg {

std::vector<std::uint64_t> resolve_seeds(const ScenarioConfig& config,
                                         std::optional<std::size_t> reps) {
  const std::uint64_t base = config.variants.front().zo.seed;
  if (reps) {
    if (*reps < 1) throw ValidationError("--reps must be >= 1");
    std::vector<std::uint64_t> seeds(*reps);
    for (std::size_t r = 0; r < *reps; ++r) seeds[r] = base + r;
    return seeds;
  }
  if (!config.seeds.empty()) return config.seeds;
  return {base};
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& runs,
                                  const std::vector<std::string>& variant_order) {
  std::vector<SummaryRow> rows;
  for (const auto& variant : variant_order) {
    std::vector<const ZoTrace*> traces;
    for (const auto& run : runs) {
      if (run.variant == variant && run.trace) traces.push_back(&*run.trace);
    }
    if (traces.empty()) continue;
    std::size_t length = traces.front()->rows.size();
    for (const auto* t : traces) length = std::min(length, t->rows.size());

    for (std::size_t it = 0; it < length; ++it) {
      const auto count = static_cast<double>(traces.size());
      double phi_sum = 0.0;
      double gap_sum = 0.0;
      double wall_sum = 0.0;
      for (const auto* t : traces) {
        phi_sum += t->rows[it].phi_hat;
        gap_sum += t->rows[it].audit_gap;
        wall_sum += t->rows[it].wall_ms;
      }
      const double mean = phi_sum / count;
      double half = 0.0;
      if (traces.size() > 1) {
        double sq = 0.0;
        for (const auto* t : traces) sq += (t->rows[it].phi_hat - mean) * (t->rows[it].phi_hat - mean);
        half = kZ99 * std::sqrt(sq / (count - 1.0)) / std::sqrt(count);
      }
      rows.push_back({variant, traces.front()->rows[it].outer_iter, mean, mean - half, mean + half,
                      gap_sum / count, wall_sum / count});
    }
  }
  return rows;
}

void write_metrics(std::ostream& out, const RunRecord& run, bool timing) {
  CsvWriter w(out);
  w.row({"run_id", "seed", "outer_iter", "phi_hat", "fw_gap", "wall_ms", "peak_memory_bytes",
         "lmo_calls", "samples_drawn"});
  if (!run.trace) return;
  for (const auto& r : run.trace->rows) {
    std::string memory;
    if (timing && r.peak_memory_bytes) memory = std::to_string(*r.peak_memory_bytes);
    w.row({run.run_id, std::to_string(run.seed), std::to_string(r.outer_iter),
           format_double(r.phi_hat), format_double(r.audit_gap),
           format_double(timing ? r.wall_ms : 0.0), memory, std::to_string(r.lmo_calls),
           std::to_string(r.samples_drawn)});
  }
}

void write_summary(std::ostream& out, const std::vector<SummaryRow>& rows) {
  CsvWriter w(out);
  w.row({"variant", "outer_iter", "phi_mean", "phi_ci99_lo", "phi_ci99_hi", "gap_mean",
         "wall_ms_mean"});
  for (const auto& r : rows) {
    w.row({r.variant, std::to_string(r.outer_iter), format_double(r.phi_mean),
           format_double(r.phi_ci99_lo), format_double(r.phi_ci99_hi), format_double(r.gap_mean),
           format_double(r.wall_ms_mean)});
  }
}

namespace {

nlohmann::json describe(const ScenarioConfig& config, const Instance& instance,
                        const RunOptions& options) {
  nlohmann::json doc;
  doc["scenario"] = config.name;
  doc["seeds"] = options.seeds;
  doc["notes"] = instance.notes();
  doc["theta0"] = instance.theta0();
  doc["resources"] = instance.zdd().resource_count();
  doc["zdd_nodes"] = instance.zdd().node_count();
  doc["cost"] = {{"family", config.cost.family}, {"C", config.cost.c_scale}};
  for (const auto& v : config.variants) {
    doc["variants"].push_back({
        {"name", v.name},
        {"inner",
         {{"T", v.inner.T},
          {"lmo", to_string(v.inner.lmo)},
          {"scheme", to_string(v.inner.scheme)},
          {"m", v.inner.m},
          {"gap_every", v.inner.gap_every}}},
        {"zo",
         {{"K", v.zo.K},
          {"B", v.zo.B},
          {"rho", v.zo.rho},
          {"eta", v.zo.eta},
          {"directions", to_string(v.zo.directions)},
          {"interiorize", v.zo.interiorize}}},
    });
  }
  return doc;
}

}  // namespace

ScenarioReport run_scenario(const ScenarioConfig& config, const Instance& instance,
                            const RunOptions& options) {
  if (options.seeds.empty()) throw ValidationError("run_scenario needs at least one seed");
  ScenarioReport report;
  std::vector<std::string> order;
  for (const auto& v : config.variants) {
    order.push_back(v.name);
    for (auto seed : options.seeds) {
      RunRecord r;
      r.variant = v.name;
      r.seed = seed;
      r.run_id = v.name + "-seed" + std::to_string(seed);
      r.file = options.out / "runs" / (r.run_id + ".csv");
      report.runs.push_back(std::move(r));
    }
  }

  // Spread workers over runs first; a single run gets them for its inner solves.
  const std::size_t outer_workers = std::min(options.workers, report.runs.size());
  const std::size_t inner_workers = report.runs.size() == 1 ? options.workers : 1;

  parallel_for(report.runs.size(), outer_workers, [&](std::size_t i) {
    auto& run = report.runs[i];
    const auto& variant = config.variants[i / options.seeds.size()];
    try {
      FwOptions fw;
      fw.T = variant.inner.T;
      fw.gap_every = variant.inner.gap_every;
      const auto oracle = make_phi_oracle(instance.model(), instance.lmo(variant.inner), fw);
      ZoConfig zo = variant.zo;
      zo.seed = run.seed;
      zo.workers = inner_workers;
      run.trace = zo_stackelberg(oracle, instance.theta0(), zo);
      auto out = open_output(run.file);
      write_metrics(out, run, options.timing);
    } catch (const std::exception& e) {
      run.trace.reset();
      run.error = e.what();
    }
  });

  for (const auto& run : report.runs) report.failures += run.trace ? 0 : 1;
  report.summary = summarize(report.runs, order);
  if (!options.timing) {
    for (auto& row : report.summary) row.wall_ms_mean = 0.0;
  }
  report.summary_file = options.out / "summary.csv";
  {
    auto out = open_output(report.summary_file);
    write_summary(out, report.summary);
  }
  {
    auto out = open_output(options.out / "run_config.json");
    out << describe(config, instance, options).dump(2) << '\n';
  }
  if (report.failures > 0) {
    auto out = open_output(options.out / "failures.csv");
    CsvWriter w(out);
    w.row({"run_id", "error"});
    for (const auto& run : report.runs) {
      if (run.trace) continue;
      std::string message = run.error;
      for (char& c : message) {
        if (c == ',' || c == '\n') c = ';';
      }
      w.row({run.run_id, message});
    }
  }
  return report;
}

}  // namespace ccg
