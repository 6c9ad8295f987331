#pragma once

#include "ppk/kerr_steady_state.hpp"
#include "ppk/types.hpp"

#include <string>
#include <vector>

namespace ppk {

// generic numeric table; cells are printed with 17 significant digits so
// identical doubles serialize to identical bytes
void write_csv(const std::string& path,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

void write_sweep_csv(const std::string& path,
                     const std::vector<SweepPoint>& sweep);

// columns: omega_Hz, detuning_Hz, re_S11, im_S11, abs_S11_dB
void write_reflection_csv(const std::string& path,
                          const std::vector<double>& omega,
                          const std::vector<cplx>& s11, double omega_ref);

// columns: omega_Hz + one column per named series
void write_series_csv(const std::string& path,
                      const std::vector<double>& omega,
                      const std::vector<std::string>& names,
                      const std::vector<std::vector<double>>& series);

// columns: t, re_alpha, im_alpha, phi, dphi_dt
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

void write_text(const std::string& path, const std::string& text);

// Reader for the tables written above: one header line, numeric cells.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    // column index by name; throws validation_error when absent
    std::size_t col(const std::string& name) const;
    std::vector<double> column(const std::string& name) const;
};
CsvTable read_csv(const std::string& path);

} // namespace ppk
