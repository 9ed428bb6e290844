#ifndef TIPP_METRICS_HPP
#define TIPP_METRICS_HPP

#include <cmath>

#include <Eigen/Dense>

#include "errors.hpp"
#include "gp_core.hpp"
#include "transect.hpp"

namespace tipp {

/// Measurements over a grid; values(row-1, col-1).
struct FieldRealization {
    TransectGrid grid;
    Eigen::MatrixXd values;

    void validate() const {
        grid.validate();
        if (values.rows() != grid.rows || values.cols() != grid.cols)
            throw Error(ErrorKind::DimensionMismatch, "field values do not match grid dimensions");
        if (!values.allFinite()) throw Error(ErrorKind::InvalidArgument, "field values must be finite");
    }

    [[nodiscard]] double at(int col, int row) const { return values(row - 1, col - 1); }
};

namespace detail {

inline void require_unobserved(const TransectGrid& g, const Path& path) {
    validate_path(path, g);
    if (static_cast<int>(path.robots()) >= g.rows)
        throw Error(ErrorKind::NoUnobserved, "path samples every location");
}

/// Measurements in the order produced by path_locations / unobserved_locations.
inline Eigen::VectorXd gather_values(const FieldRealization& f, const Path& path, bool observed) {
    std::vector<double> out;
    for (std::size_t i = 0; i < path.length(); ++i) {
        const auto rows = observed ? path.actions[i].rows : complement(path.actions[i], f.grid.rows).rows;
        for (int row : rows) out.push_back(f.at(static_cast<int>(i) + 1, row));
    }
    return Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size()));
}

} // namespace detail

/// EN: H(Z_u | Z_x), posterior entropy left at the unobserved locations.
inline double en_metric(const Path& path, const TransectGrid& grid, const GpHyperParams& params) {
    detail::require_unobserved(grid, path);
    return conditional_entropy(unobserved_locations(grid, path), path_locations(grid, path), params);
}

/// MI: I(Z_x; Z_u) = H(Z_u) - H(Z_u | Z_x).
inline double mi_metric(const Path& path, const TransectGrid& grid, const GpHyperParams& params) {
    detail::require_unobserved(grid, path);
    return mutual_information(path_locations(grid, path), unobserved_locations(grid, path), {}, params);
}

/// Sample mean of the path's measurements, the prior-mean plug-in used when
/// no mean is supplied.
inline double plug_in_mean(const Path& path, const FieldRealization& field) {
    field.validate();
    validate_path(path, field.grid);
    return detail::gather_values(field, path, true).mean();
}

/// ER: ||z_u - mu_{u|x}||^2 / (mean(z_u)^2 n(r-k)), prediction from the
/// posterior mean with params.prior_mean as the constant prior.
inline double er_metric(const Path& path, const FieldRealization& field, const GpHyperParams& params) {
    field.validate();
    detail::require_unobserved(field.grid, path);
    const Eigen::VectorXd z_x = detail::gather_values(field, path, true);
    const Eigen::VectorXd z_u = detail::gather_values(field, path, false);
    const double mean_u = z_u.mean();
    if (std::abs(mean_u) < 1e-12) throw Error(ErrorKind::ZeroMeanField, "unobserved mean is zero");
    const Eigen::VectorXd pred =
        posterior_mean(unobserved_locations(field.grid, path), path_locations(field.grid, path), z_x, params);
    return (z_u - pred).squaredNorm() / (mean_u * mean_u * static_cast<double>(z_u.size()));
}

} // namespace tipp

#endif
