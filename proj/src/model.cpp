#include "berkson/model.hpp"

#include "berkson/error.hpp"

namespace berkson {

BerksonModel::BerksonModel(GaussianMixture fx, Matrix error_cov)
    : BerksonModel(std::move(fx), std::move(error_cov), Matrix()) {}

BerksonModel::BerksonModel(GaussianMixture fx, Matrix error_cov, Matrix kernel_cov)
    : fx_(std::move(fx)), error_cov_(std::move(error_cov)), kernel_cov_(std::move(kernel_cov)) {
    const Eigen::Index p = fx_.dim();
    if (kernel_cov_.size() == 0) kernel_cov_ = Matrix::Identity(p, p);
    if (error_cov_.rows() != p || error_cov_.cols() != p) {
        fail(ErrorKind::Shape, "error covariance dimension differs from f_X");
    }
    if (kernel_cov_.rows() != p || kernel_cov_.cols() != p) {
        fail(ErrorKind::Shape, "kernel covariance dimension differs from f_X");
    }
    require_psd(error_cov_, "error covariance");
    require_spd(kernel_cov_, "kernel covariance");
}

BerksonModel BerksonModel::scalar(GaussianMixture fx, double error_var, double kernel_var) {
    if (fx.dim() != 1) fail(ErrorKind::UnsupportedDimension, "scalar model needs p = 1");
    return BerksonModel(std::move(fx), Matrix::Constant(1, 1, error_var),
                        Matrix::Constant(1, 1, kernel_var));
}

BerksonModel BerksonModel::with_error(Matrix error_cov) const {
    return BerksonModel(fx_, std::move(error_cov), kernel_cov_);
}

GaussianMixture BerksonModel::fy() const { return convolve_with_normal(fx_, error_cov_); }

}  // namespace berkson
