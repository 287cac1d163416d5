#include "rod/io.hpp"

#include <cstdio>
#include <fstream>

namespace rod {

namespace {

const char* kFieldNames[4] = {"m", "n", "B", "D"};

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file '" + path + "'");
    return out;
}

}  // namespace

std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_trajectory_csv(const std::string& path, const SimResult& res) {
    std::ofstream out = open_out(path);
    const int level = res.initial.level;

    out << "s";
    for (int i = 0; i <= level; ++i)
        for (int c = 1; c <= 3; ++c) out << ',' << kFieldNames[i] << c;
    out << ",H";
    for (std::size_t c = 0; c < res.sample_ledgers.front().casimirs.size(); ++c)
        out << ",C" << (c + 1);
    for (const IntegralEntry& e : res.sample_ledgers.front().integrals)
        out << ',' << e.name;
    out << '\n';

    for (std::size_t r = 0; r < res.sample_s.size(); ++r) {
        out << format_g17(res.sample_s[r]);
        for (double v : res.sample_states[r].flat()) out << ',' << format_g17(v);
        const InvariantLedger& led = res.sample_ledgers[r];
        out << ',' << format_g17(led.hamiltonian);
        for (double v : led.casimirs) out << ',' << format_g17(v);
        for (const IntegralEntry& e : led.integrals) out << ',' << format_g17(e.value);
        out << '\n';
    }
}

void write_section_csv(const std::string& path, const std::vector<SectionPoint>& pts) {
    std::ofstream out = open_out(path);
    out << "orbit_id,s,theta,p_theta,residual\n";
    for (const SectionPoint& pt : pts)
        out << pt.orbit_id << ',' << format_g17(pt.s) << ',' << format_g17(pt.theta)
            << ',' << format_g17(pt.p_theta) << ',' << format_g17(pt.residual) << '\n';
}

void write_reduced_csv(const std::string& path, const std::vector<double>& s,
                       const std::vector<CanonicalState>& states,
                       const std::vector<std::string>& extra_names,
                       const std::vector<std::vector<double>>& extra_cols) {
    if (states.size() != s.size())
        throw ConfigError("write_reduced_csv: sample count mismatch");
    for (const auto& col : extra_cols)
        if (col.size() != s.size())
            throw ConfigError("write_reduced_csv: extra column length mismatch");

    std::ofstream out = open_out(path);
    out << "s,theta,psi,phi,p_theta,p_psi,p_phi";
    for (const std::string& name : extra_names) out << ',' << name;
    out << '\n';
    for (std::size_t r = 0; r < s.size(); ++r) {
        out << format_g17(s[r]);
        for (double v : states[r].flat()) out << ',' << format_g17(v);
        for (const auto& col : extra_cols) out << ',' << format_g17(col[r]);
        out << '\n';
    }
}

void write_curve_csv(const std::string& path, const FramedCurve& curve) {
    std::ofstream out = open_out(path);
    out << "s,x,y,z,d1x,d1y,d1z,d2x,d2y,d2z,d3x,d3y,d3z\n";
    for (std::size_t r = 0; r < curve.s.size(); ++r) {
        out << format_g17(curve.s[r]);
        const Vec3& pos = curve.centreline[r];
        out << ',' << format_g17(pos.x) << ',' << format_g17(pos.y) << ','
            << format_g17(pos.z);
        for (std::size_t j = 0; j < 3; ++j) {
            const Vec3 d = curve.frames[r].col(j);
            out << ',' << format_g17(d.x) << ',' << format_g17(d.y) << ','
                << format_g17(d.z);
        }
        out << '\n';
    }
}

}  // namespace rod
