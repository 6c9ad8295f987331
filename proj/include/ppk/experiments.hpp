#pragma once

#include "ppk/config.hpp"

#include <map>
#include <string>
#include <vector>

namespace ppk {

// One batch run: files written (run_summary.json last) plus the flat scalar
// summary that also lands in the JSON. Runners are deterministic for a fixed
// config and seed; the thread count never changes results.
struct RunResult {
    std::vector<std::string> outputs;
    std::map<std::string, double> scalars;
};

RunResult run_sweep_flux(const Config& cfg, const std::string& out_dir,
                         unsigned long long seed, unsigned threads);
RunResult run_reflection(const Config& cfg, const std::string& out_dir,
                         unsigned long long seed, unsigned threads);
RunResult run_noise(const Config& cfg, const std::string& out_dir,
                    unsigned long long seed, unsigned threads);
RunResult run_cooling(const Config& cfg, const std::string& out_dir,
                      unsigned long long seed, unsigned threads);
RunResult run_sensing(const Config& cfg, const std::string& out_dir,
                      unsigned long long seed, unsigned threads);
RunResult run_fit(const Config& cfg, const std::string& out_dir,
                  unsigned long long seed, unsigned threads);
RunResult run_oracle_check(const Config& cfg, const std::string& out_dir,
                           unsigned long long seed, unsigned threads);
RunResult run_flux_model(const Config& cfg, const std::string& out_dir,
                         unsigned long long seed, unsigned threads);
RunResult run_quasimodes(const Config& cfg, const std::string& out_dir,
                         unsigned long long seed, unsigned threads);
RunResult run_fit_suite(const Config& cfg, const std::string& out_dir,
                        unsigned long long seed, unsigned threads);
RunResult run_landscape(const Config& cfg, const std::string& out_dir,
                        unsigned long long seed, unsigned threads);

// Embedded configuration for a named preset; throws validation_error for an
// unknown name. Valid names: fig2 fig3 fig4 fig5 s3 s6 s7 s8, plus "oracle"
// (the default oracle-check setup).
std::string preset_config_text(const std::string& name);

// Dispatches a preset to its runner.
RunResult run_preset(const std::string& name, const std::string& out_dir,
                     unsigned long long seed, unsigned threads);

} // namespace ppk
