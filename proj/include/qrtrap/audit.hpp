#pragma once

// Phase-diagram output files and the printed-vs-quadrature audits.

#include <qrtrap/csv.hpp>
#include <qrtrap/variational.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <vector>

namespace qrtrap {

struct AuditRow {
    double sigma = 0.0;
    double alpha = 0.0;
    double gamma_printed = 0.0;
    double gamma_numeric = 0.0;
    double energy_printed = 0.0;     // printed H at gamma_numeric
    double energy_quadrature = 0.0;  // quadrature H at gamma_numeric
    double slope_residual = 0.0;     // |dH/dalpha| at gamma_numeric
    double slope_bound = 0.0;        // 1e-6 (1 + |H|)
};

inline std::vector<AuditRow> discrepancy_audit(const PhaseDiagram& pd) {
    std::vector<AuditRow> out;
    out.reserve(pd.rows.size());
    for (const auto& r : pd.rows) {
        AuditRow a{r.sigma, r.alpha, r.gamma_printed, r.gamma_numeric};
        a.energy_printed = ansatz_energy_printed(r.alpha, r.sigma, r.gamma_numeric);
        a.energy_quadrature = ansatz_energy_quadrature(r.alpha, r.sigma, r.gamma_numeric);
        a.slope_residual = std::abs(ansatz_energy_slope(r.alpha, r.sigma, r.gamma_numeric));
        a.slope_bound = 1e-6 * (1.0 + std::abs(a.energy_quadrature));
        out.push_back(a);
    }
    return out;
}

inline void write_phase_diagram(std::ostream& out, const PhaseDiagram& pd) {
    out << "sigma,alpha,gamma_printed,gamma_numeric\n";
    for (const auto& r : pd.rows)
        out << csv::exact(r.sigma) << ',' << csv::exact(r.alpha) << ',' << csv::exact(r.gamma_printed) << ','
            << csv::exact(r.gamma_numeric) << '\n';
}

inline void write_discrepancy_audit(std::ostream& out, const std::vector<AuditRow>& rows) {
    out << "sigma,alpha,gamma_printed,gamma_numeric,gamma_difference,energy_printed,energy_quadrature,"
           "slope_residual,slope_bound\n";
    for (const auto& r : rows)
        out << csv::exact(r.sigma) << ',' << csv::exact(r.alpha) << ',' << csv::exact(r.gamma_printed) << ','
            << csv::exact(r.gamma_numeric) << ',' << csv::exact(r.gamma_printed - r.gamma_numeric) << ','
            << csv::exact(r.energy_printed) << ',' << csv::exact(r.energy_quadrature) << ','
            << csv::exact(r.slope_residual) << ',' << csv::exact(r.slope_bound) << '\n';
}

inline void write_large_width_audit(std::ostream& out, const std::vector<LargeWidthAuditRow>& rows) {
    out << "sigma,alpha,potential_printed,potential_quadrature,lower_bound\n";
    for (const auto& r : rows)
        out << csv::exact(r.sigma) << ',' << csv::exact(r.alpha) << ',' << csv::exact(r.potential_printed) << ','
            << csv::exact(r.potential_quadrature) << ',' << csv::exact(r.lower_bound) << '\n';
}

/// Plain-text note on the large-width behaviour of the printed energy.
inline void write_large_width_notes(std::ostream& out, const std::vector<LargeWidthAuditRow>& rows) {
    out << "Step-potential term of the Gaussian-ansatz energy, printed closed form vs quadrature.\n\n"
           "printed:    -s^2 (2/sqrt(pi) exp(-1/a^2) - a erfc(1/a))\n"
           "quadrature: -s^2 int_{x>=1} |phi|^2 dx = -s^2 (erfc(1/a) + 2/(sqrt(pi) a) exp(-1/a^2))\n\n"
           "The quadrature term stays in [-s^2, 0] and tends to -s^2 as a grows.\n"
           "The printed term behaves like s^2 (a - 4/sqrt(pi)) for large a: it turns\n"
           "positive at a = 1.8811 and grows without bound.\n"
           "Stationarity and stability use the quadrature term.\n\n";
    for (const auto& r : rows) {
        const bool outside = r.potential_printed < r.lower_bound || r.potential_printed > 0.0;
        out << "sigma=" << csv::brief(r.sigma) << " alpha=" << csv::brief(r.alpha)
            << " printed=" << csv::brief(r.potential_printed) << " quadrature=" << csv::brief(r.potential_quadrature)
            << (outside ? "  printed term outside [-s^2, 0]" : "") << '\n';
    }
}

/// Widths used for the large-width audit.
inline std::vector<double> large_width_alphas() { return {0.5, 1.0, 1.5, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0}; }

struct PhaseDiagramFiles {
    std::filesystem::path diagram, audit, large_width, notes;
};

inline PhaseDiagramFiles write_phase_diagram_bundle(const std::filesystem::path& dir, const PhaseDiagram& pd,
                                                    const std::vector<AuditRow>& audit) {
    std::filesystem::create_directories(dir);
    PhaseDiagramFiles f{dir / "phase_diagram.csv", dir / "discrepancy_audit.csv", dir / "large_width_audit.csv",
                        dir / "large_width_notes.txt"};
    std::vector<double> sigmas;
    for (const auto& r : pd.rows)
        if (sigmas.empty() || sigmas.back() != r.sigma) sigmas.push_back(r.sigma);
    std::vector<LargeWidthAuditRow> wide;
    for (double s : sigmas) {
        if (s == 0.0) continue;
        const auto rows = large_width_audit(s, large_width_alphas());
        wide.insert(wide.end(), rows.begin(), rows.end());
    }
    if (wide.empty()) wide = large_width_audit(1.0, large_width_alphas());

    auto open = [](const std::filesystem::path& p) {
        std::ofstream out(p);
        if (!out) throw Error("cannot write " + p.string());
        return out;
    };
    {
        auto o = open(f.diagram);
        write_phase_diagram(o, pd);
    }
    {
        auto o = open(f.audit);
        write_discrepancy_audit(o, audit);
    }
    {
        auto o = open(f.large_width);
        write_large_width_audit(o, wide);
    }
    {
        auto o = open(f.notes);
        write_large_width_notes(o, wide);
    }
    return f;
}

}  // namespace qrtrap
