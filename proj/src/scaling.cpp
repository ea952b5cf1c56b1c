#include "lgtsim/scaling.hpp"

#include "lgtsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace lgtsim::harness {

namespace {

struct LineFit {
    double slope, intercept, slope_stderr, r_squared;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    if (n < 2 || y.size() != n) throw std::invalid_argument("least_squares: need at least 2 points");
    double sx = 0, sy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0) throw std::invalid_argument("least_squares: degenerate abscissa");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0;
    for (size_t i = 0; i < n; ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ss_res += r * r;
    }
    f.slope_stderr = n > 2 ? std::sqrt(ss_res / (n - 2) / sxx) : 0.0;
    f.r_squared = syy > 0 ? 1.0 - ss_res / syy : 1.0;
    return f;
}

}  // namespace

SlopeFit fit_early_slope(const std::vector<double>& t, const std::vector<double>& eps,
                         double eps_plateau) {
    if (t.size() != eps.size() || t.size() < 8)
        throw std::invalid_argument("fit_early_slope: need at least 8 samples");
    if (eps_plateau <= 0) throw std::invalid_argument("fit_early_slope: plateau must be positive");

    const double cap = 0.1 * eps_plateau;
    double t_hi = std::min(5.0, t.back());
    for (size_t i = 0; i < t.size(); ++i) {
        if (eps[i] >= cap) {
            t_hi = std::min(t_hi, t[i]);
            break;
        }
    }
    const double t_lo = std::min(0.5, t_hi / 4.0);

    std::vector<double> xs, ys;
    for (size_t i = 3; i < t.size(); ++i) {
        if (t[i] < t_lo || t[i] > t_hi) continue;
        xs.push_back(t[i]);
        ys.push_back(eps[i]);
    }
    if (xs.size() < 4)
        throw std::runtime_error("fit_early_slope: fewer than 4 samples in the fit window [" +
                                 std::to_string(t_lo) + ", " + std::to_string(t_hi) +
                                 "]; refine the output grid");

    const LineFit lf = least_squares(xs, ys);
    SlopeFit fit;
    fit.slope = lf.slope;
    fit.intercept = lf.intercept;
    fit.slope_stderr = lf.slope_stderr;
    fit.t_lo = t_lo;
    fit.t_hi = t_hi;
    fit.n_points = static_cast<int>(xs.size());
    return fit;
}

int CsvTable::column(const std::string& name) const {
    for (size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return static_cast<int>(i);
    return -1;
}

std::vector<double> CsvTable::numeric(const std::string& name) const {
    const int c = column(name);
    if (c < 0) throw std::invalid_argument("csv: missing column " + name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(std::stod(row[c]));
    return out;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("csv: cannot open " + path);
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (first) {
            table.columns = cells;
            first = false;
        } else {
            if (cells.size() != table.columns.size())
                throw std::runtime_error("csv: ragged row in " + path);
            table.rows.push_back(cells);
        }
    }
    return table;
}

ScalingFit fit_scaling(const std::string& index_path) {
    const CsvTable index = read_csv(index_path);
    if (index.rows.size() < 3)
        throw std::runtime_error("fit-scaling: need at least 3 runs in the index");

    const std::vector<double> gammas = index.numeric("gamma");
    const std::vector<double> vs = index.numeric("V");
    const std::vector<double> plateaus = index.numeric("eps_plateau");
    const int file_col = index.column("file");
    if (file_col < 0) throw std::runtime_error("fit-scaling: index lacks a file column");

    const std::set<double> unique_gamma(gammas.begin(), gammas.end());
    const std::set<double> unique_v(vs.begin(), vs.end());
    const bool vary_gamma = unique_gamma.size() > 1;
    const bool vary_v = unique_v.size() > 1;
    if (vary_gamma && vary_v)
        throw std::runtime_error("fit-scaling: runs vary both gamma and V (confounded sweep)");
    if (!vary_gamma && !vary_v)
        throw std::runtime_error("fit-scaling: runs vary neither gamma nor V");

    namespace fs = std::filesystem;
    const fs::path base = fs::path(index_path).parent_path();

    ScalingFit fit;
    fit.varied = vary_v ? "V" : "gamma";
    for (size_t i = 0; i < index.rows.size(); ++i) {
        const CsvTable run = read_csv((base / index.rows[i][file_col]).string());
        const SlopeFit s =
            fit_early_slope(run.numeric("time"), run.numeric("violation"), plateaus[i]);
        fit.values.push_back(vary_v ? vs[i] : gammas[i]);
        fit.slopes.push_back(s);
    }

    if (vary_v) {
        std::vector<double> lx, ly;
        for (size_t i = 0; i < fit.values.size(); ++i) {
            if (fit.values[i] <= 0 || fit.slopes[i].slope <= 0)
                throw std::runtime_error("fit-scaling: non-positive V or slope in power-law fit");
            lx.push_back(std::log(fit.values[i]));
            ly.push_back(std::log(fit.slopes[i].slope));
        }
        const LineFit lf = least_squares(lx, ly);
        fit.beta_hat = -lf.slope;
        fit.beta_stderr = lf.slope_stderr;
        fit.r_squared = lf.r_squared;
    } else {
        std::vector<double> ratio;
        for (size_t i = 0; i < fit.values.size(); ++i) {
            if (fit.values[i] <= 0)
                throw std::runtime_error("fit-scaling: gamma sweep requires positive gamma");
            ratio.push_back(fit.slopes[i].slope / fit.values[i]);
        }
        const double mean = std::accumulate(ratio.begin(), ratio.end(), 0.0) / ratio.size();
        double dev = 0.0;
        for (double r : ratio) dev = std::max(dev, std::abs(r - mean) / std::abs(mean));
        fit.max_linearity_deviation = dev;
    }
    return fit;
}

std::string render_scaling_report(const ScalingFit& fit) {
    std::ostringstream out;
    out << "scaling fit: varied parameter = " << fit.varied << "\n";
    for (size_t i = 0; i < fit.values.size(); ++i) {
        out << "  " << fit.varied << " = " << format_double(fit.values[i])
            << "  slope = " << format_double(fit.slopes[i].slope) << "  window = ["
            << format_double(fit.slopes[i].t_lo) << ", " << format_double(fit.slopes[i].t_hi)
            << "]  points = " << fit.slopes[i].n_points << "\n";
    }
    if (fit.varied == "V") {
        out << "power law: slope ~ V^(-beta), beta_hat = " << format_double(fit.beta_hat)
            << " +- " << format_double(fit.beta_stderr) << "  R^2 = " << format_double(fit.r_squared)
            << "\n";
    } else {
        out << "linearity: max relative deviation of slope/gamma = "
            << format_double(fit.max_linearity_deviation) << "\n";
    }
    return out.str();
}

}  // namespace lgtsim::harness
