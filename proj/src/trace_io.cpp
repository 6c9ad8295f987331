#include "ppk/trace_io.hpp"

#include "ppk/constants.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

namespace ppk {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw io_error("cannot open for writing: " + path);
    out << std::setprecision(17);
    return out;
}

void finish(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out)
        throw io_error("write failure on: " + path);
}

} // namespace

void write_csv(const std::string& path,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out = open_out(path);
    for (std::size_t c = 0; c < columns.size(); ++c)
        out << columns[c] << (c + 1 < columns.size() ? "," : "\n");
    for (const auto& row : rows) {
        if (row.size() != columns.size())
            throw validation_error("write_csv: row width mismatch in " + path);
        for (std::size_t c = 0; c < row.size(); ++c)
            out << row[c] << (c + 1 < row.size() ? "," : "\n");
    }
    finish(out, path);
}

void write_sweep_csv(const std::string& path,
                     const std::vector<SweepPoint>& sweep) {
    std::ofstream out = open_out(path);
    out << "phi_b,phi_total,omega0_Hz,n_d,phi_d_rad,branch,kappa_eff_Hz\n";
    for (const SweepPoint& pt : sweep) {
        out << pt.flux.phi_b << "," << pt.flux.phi_total << ","
            << pt.flux.omega0 / two_pi << "," << pt.state.n_d << ","
            << pt.state.phi_d << "," << branch_name(pt.state.branch) << ","
            << pt.kappa_eff / two_pi << "\n";
    }
    finish(out, path);
}

void write_reflection_csv(const std::string& path,
                          const std::vector<double>& omega,
                          const std::vector<cplx>& s11, double omega_ref) {
    if (omega.size() != s11.size())
        throw validation_error("write_reflection_csv: size mismatch");
    std::ofstream out = open_out(path);
    out << "omega_Hz,detuning_Hz,re_S11,im_S11,abs_S11_dB\n";
    for (std::size_t i = 0; i < omega.size(); ++i) {
        out << omega[i] / two_pi << "," << (omega[i] - omega_ref) / two_pi
            << "," << s11[i].real() << "," << s11[i].imag() << ","
            << 20.0 * std::log10(std::abs(s11[i])) << "\n";
    }
    finish(out, path);
}

void write_series_csv(const std::string& path,
                      const std::vector<double>& omega,
                      const std::vector<std::string>& names,
                      const std::vector<std::vector<double>>& series) {
    if (names.size() != series.size())
        throw validation_error("write_series_csv: name/series mismatch");
    for (const auto& s : series)
        if (s.size() != omega.size())
            throw validation_error("write_series_csv: series length mismatch");
    std::ofstream out = open_out(path);
    out << "omega_Hz";
    for (const auto& n : names) out << "," << n;
    out << "\n";
    for (std::size_t i = 0; i < omega.size(); ++i) {
        out << omega[i] / two_pi;
        for (const auto& s : series) out << "," << s[i];
        out << "\n";
    }
    finish(out, path);
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    std::ofstream out = open_out(path);
    out << "t,re_alpha,im_alpha,phi,dphi_dt\n";
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        out << traj.t[i] << "," << traj.alpha[i].real() << ","
            << traj.alpha[i].imag() << "," << traj.phi[i] << ","
            << traj.dphi_dt[i] << "\n";
    }
    finish(out, path);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out = open_out(path);
    out << text;
    finish(out, path);
}

std::size_t CsvTable::col(const std::string& name) const {
    for (std::size_t c = 0; c < columns.size(); ++c)
        if (columns[c] == name) return c;
    throw validation_error("csv column not found: " + name);
}

std::vector<double> CsvTable::column(const std::string& name) const {
    std::size_t c = col(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(row[c]);
    return out;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot open for reading: " + path);
    CsvTable table;
    std::string line;
    if (!std::getline(in, line))
        throw io_error("empty csv: " + path);
    std::size_t start = 0;
    while (start <= line.size()) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) comma = line.size();
        table.columns.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        row.reserve(table.columns.size());
        start = 0;
        while (start <= line.size()) {
            std::size_t comma = line.find(',', start);
            if (comma == std::string::npos) comma = line.size();
            std::string cell = line.substr(start, comma - start);
            start = comma + 1;
            // non-numeric cells (branch labels) read as NaN
            try {
                std::size_t used = 0;
                double v = std::stod(cell, &used);
                row.push_back(used == cell.size()
                                  ? v
                                  : std::numeric_limits<double>::quiet_NaN());
            } catch (const std::exception&) {
                row.push_back(std::numeric_limits<double>::quiet_NaN());
            }
        }
        if (row.size() != table.columns.size())
            throw io_error("ragged csv row in " + path);
        table.rows.push_back(std::move(row));
    }
    return table;
}

} // namespace ppk
