#include "f3c/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace f3c {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310002;

// kernel bandwidth in bins; a couple of bins suppresses the spectral-lattice
// aliasing without washing out resonance structure
constexpr double kKernelBins = 2.0;

// 4-point Gauss-Legendre rule on [-1, 1] for the reference convolution
constexpr double kGaussX[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                               0.8611363115940526};
constexpr double kGaussW[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                               0.3478548451374538};

/// Gaussian kernel density estimate over the eigenvalue atoms. Eigenvalues
/// arrive sorted, so only atoms within the kernel tail matter.
double kernel_density(const Eigen::VectorXd& points, const Eigen::VectorXd& weights, double x,
                      double sigma) {
    const double cut = 9.0 * sigma;
    const double* begin = points.data();
    const double* end = begin + points.size();
    const double* lo = std::lower_bound(begin, end, x - cut);
    const double* hi = std::upper_bound(begin, end, x + cut);
    double acc = 0.0;
    for (const double* p = lo; p != hi; ++p) {
        const double d = (x - *p) / sigma;
        acc += weights[static_cast<Eigen::Index>(p - begin)] * std::exp(-0.5 * d * d);
    }
    return acc / (kSqrt2Pi * sigma);
}

/// Closed-form density convolved with the same Gaussian kernel, by composite
/// quadrature fine enough to resolve dressed resonances much narrower than
/// the kernel.
double smoothed_reference(const ModelConfig& config, int level, double x, double sigma) {
    const double half = 6.0 * sigma;
    const int panels =
        std::clamp(static_cast<int>(std::ceil(2.0 * half / 0.002)), 240, 40000);
    const double pw = 2.0 * half / panels;
    double acc = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double center = x - half + (p + 0.5) * pw;
        for (int k = 0; k < 4; ++k) {
            const double y = center + 0.5 * pw * kGaussX[k];
            const double d = (y - x) / sigma;
            acc += kGaussW[k] * std::exp(-0.5 * d * d) *
                   bound_probabilities(config, y).at(level);
        }
    }
    return acc * 0.5 * pw / (kSqrt2Pi * sigma);
}

}  // namespace

DiscretizationSpec validate_spec(const ModelConfig& config, const DiscretizationSpec& spec) {
    if (!(spec.span_min < spec.span_max)) {
        fail(ErrorCode::SpanTooNarrow, "span must satisfy min < max");
    }
    if (spec.bins < 2) {
        fail(ErrorCode::SpanTooNarrow, "need at least 2 bins");
    }
    const Topology t = config.topo();
    double feature = std::abs(config.energy(t.bounds[0]) - config.energy(t.bounds[1]));
    for (const auto& [level, c] : config.couplings) feature = std::max(feature, c.gamma());
    if (config.g) feature = std::max(feature, std::abs(*config.g));
    const double w = spec.width();
    if (w < 20.0 * feature) {
        std::ostringstream os;
        os << "span width " << w << " MHz is below 20x the largest feature scale " << feature;
        fail(ErrorCode::SpanTooNarrow, os.str());
    }
    for (int level : t.bounds) {
        const double e = config.energy(level);
        if (e < spec.span_min + 0.25 * w || e > spec.span_max - 0.25 * w) {
            std::ostringstream os;
            os << "bound level " << level << " at " << e
               << " MHz is outside the central half of the span";
            fail(ErrorCode::SpanTooNarrow, os.str());
        }
    }
    return spec;
}

Eigen::MatrixXd assemble_hamiltonian(const ModelConfig& config, const DiscretizationSpec& spec) {
    validate_spec(config, spec);
    const Topology t = config.topo();
    const int n = spec.bins + 2;
    const double root_bin = std::sqrt(spec.bin_width());

    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    h(0, 0) = config.energy(t.bounds[0]);
    h(1, 1) = config.energy(t.bounds[1]);
    if (config.g) h(0, 1) = h(1, 0) = *config.g;
    for (int k = 0; k < spec.bins; ++k) h(2 + k, 2 + k) = spec.bin_center(k);
    for (int b = 0; b < 2; ++b) {
        const auto it = config.couplings.find(t.bounds[b]);
        if (it == config.couplings.end()) continue;
        const double coupling = it->second.v * root_bin;
        for (int k = 0; k < spec.bins; ++k) h(b, 2 + k) = h(2 + k, b) = coupling;
    }
    return h;
}

SpectralDecomposition diagonalize(const Eigen::MatrixXd& matrix) {
    return SpectralDecomposition(matrix);
}

OracleResult reconstruct_density(const ModelConfig& config, const SpectralDecomposition& eig,
                                 const DiscretizationSpec& spec,
                                 const std::vector<double>& query) {
    const double margin = 0.1 * spec.width();
    for (double x : query) {
        if (x < spec.span_min + margin || x > spec.span_max - margin) {
            std::ostringstream os;
            os << "query point " << x << " is within 10% of the span edge";
            fail(ErrorCode::GridOutsideSpan, os.str());
        }
    }

    const Topology t = config.topo();
    OracleResult out;
    out.eigenvalues = eig.eigenvalues();
    out.spec = spec;
    out.query = query;
    const double sigma = kKernelBins * spec.bin_width();
    for (int b = 0; b < 2; ++b) {
        const int level = t.bounds[b];
        const Eigen::VectorXd row = eig.basis_row(b);
        Eigen::VectorXd weights = row.array().square();
        out.bound_weights[level] = weights;
        std::vector<double> density(query.size());
        for (std::size_t i = 0; i < query.size(); ++i) {
            density[i] = kernel_density(out.eigenvalues, weights, query[i], sigma);
        }
        out.densities[level] = std::move(density);
    }
    return out;
}

std::string CompareReport::summary() const {
    std::ostringstream os;
    os << (pass ? "pass" : "fail") << " max_rel=" << max_rel << " median_rel=" << median_rel
       << " tol=" << tolerance << " points=" << points;
    for (const auto& [level, v] : max_rel_by_level) {
        os << " level" << level << "_max=" << v;
    }
    return os.str();
}

CompareReport compare(const ModelConfig& config, const DiscretizationSpec& spec,
                      const std::vector<double>& grid, double tolerance) {
    validate_spec(config, spec);
    const Eigen::MatrixXd h = assemble_hamiltonian(config, spec);
    const SpectralDecomposition eig = diagonalize(h);
    const OracleResult oracle = reconstruct_density(config, eig, spec, grid);

    const Topology t = config.topo();
    const double sigma = kKernelBins * spec.bin_width();
    CompareReport report;
    report.tolerance = tolerance;
    std::vector<double> all_devs;

    for (int level : t.bounds) {
        // kernel-smoothed closed form, same smoothing the oracle applies
        std::vector<double> ref(grid.size());
        double peak = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            ref[i] = smoothed_reference(config, level, grid[i], sigma);
            peak = std::max(peak, ref[i]);
        }
        const double floor = 0.05 * peak;
        const auto& got = oracle.densities.at(level);
        double level_max = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double dev = std::abs(got[i] - ref[i]) / std::max(ref[i], floor);
            level_max = std::max(level_max, dev);
            all_devs.push_back(dev);
        }
        report.max_rel_by_level[level] = level_max;
        report.max_rel = std::max(report.max_rel, level_max);
    }

    std::sort(all_devs.begin(), all_devs.end());
    report.points = static_cast<int>(grid.size());
    report.median_rel = all_devs.empty() ? 0.0 : all_devs[all_devs.size() / 2];
    report.pass = report.max_rel < tolerance;
    return report;
}

}  // namespace f3c
