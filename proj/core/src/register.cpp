#include "pickplace/register.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <optional>
#include <string>

#include "pickplace/error.hpp"
#include "pickplace/kdtree.hpp"

namespace pickplace {

void IcpParams::validate() const {
  if (max_iterations < 1) throw Error(ErrorKind::InvalidArgument, "max_iterations must be >= 1");
  if (!(max_correspondence_dist > 0.0)) throw Error(ErrorKind::InvalidArgument, "max_correspondence_dist must be > 0");
  if (!(convergence_delta_rmse > 0.0)) throw Error(ErrorKind::InvalidArgument, "convergence_delta_rmse must be > 0");
}

Pose umeyama_fit(std::span<const Vec3> src, std::span<const Vec3> dst) {
  if (src.size() != dst.size()) {
    throw Error(ErrorKind::LengthMismatch,
                "src has " + std::to_string(src.size()) + " points, dst has " + std::to_string(dst.size()));
  }
  if (src.size() < 3) throw Error(ErrorKind::DegenerateGeometry, "need at least 3 correspondences");

  const double n = static_cast<double>(src.size());
  Vec3 mu_s = Vec3::Zero(), mu_d = Vec3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    mu_s += src[i];
    mu_d += dst[i];
  }
  mu_s /= n;
  mu_d /= n;

  Mat3 sigma = Mat3::Zero();
  Mat3 cov_s = Mat3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const Vec3 ds = src[i] - mu_s;
    sigma += (dst[i] - mu_d) * ds.transpose();
    cov_s += ds * ds.transpose();
  }
  sigma /= n;
  cov_s /= n;

  // A collinear source leaves rotation about the line undetermined.
  const Eigen::SelfAdjointEigenSolver<Mat3> eig_s(cov_s);
  const double spread = eig_s.eigenvalues()[2];
  if (!(spread > 0.0) || eig_s.eigenvalues()[1] <= 1e-12 * spread) {
    throw Error(ErrorKind::DegenerateGeometry, "source points are collinear");
  }

  const Eigen::JacobiSVD<Mat3> svd(sigma, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d& s = svd.singularValues();
  if (s[1] <= 1e-12 * s[0]) throw Error(ErrorKind::DegenerateGeometry, "cross-covariance has rank < 2");

  Mat3 d = Mat3::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) d(2, 2) = -1.0;
  const Mat3 r = svd.matrixU() * d * svd.matrixV().transpose();
  return Pose(r, mu_d - r * mu_s);
}

namespace {

struct Correspondences {
  std::vector<std::size_t> src;  // source indices
  std::vector<std::size_t> dst;  // target indices
  double sum_sq = 0.0;

  double rmse() const { return src.empty() ? 0.0 : std::sqrt(sum_sq / static_cast<double>(src.size())); }
};

Correspondences correspond(const std::vector<Vec3>& moved, const KdTree& tree, double gate) {
  Correspondences c;
  c.src.reserve(moved.size());
  c.dst.reserve(moved.size());
  for (std::size_t i = 0; i < moved.size(); ++i) {
    const Neighbor nb = tree.nearest(moved[i]);
    if (nb.distance <= gate) {
      c.src.push_back(i);
      c.dst.push_back(nb.index);
      c.sum_sq += nb.distance * nb.distance;
    }
  }
  return c;
}

void apply(const Pose& t, const std::vector<Vec3>& in, std::vector<Vec3>& out) {
  const Mat3 r = t.rotation_matrix();
  out.resize(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = r * in[i] + t.translation;
}

std::optional<Pose> point_to_point_step(const std::vector<Vec3>& moved, const PointCloud& target,
                                        const Correspondences& c) {
  std::vector<Vec3> a, b;
  a.reserve(c.src.size());
  b.reserve(c.src.size());
  for (std::size_t k = 0; k < c.src.size(); ++k) {
    a.push_back(moved[c.src[k]]);
    b.push_back(target.points[c.dst[k]]);
  }
  try {
    return umeyama_fit(a, b);
  } catch (const Error&) {
    return std::nullopt;
  }
}

// Small-angle linearization of sum ((R q + t - p) . n)^2, solved as a 6x6 system.
std::optional<Pose> point_to_plane_step(const std::vector<Vec3>& moved, const PointCloud& target,
                                        const Correspondences& c) {
  Eigen::Matrix<double, 6, 6> ata = Eigen::Matrix<double, 6, 6>::Zero();
  Eigen::Matrix<double, 6, 1> atb = Eigen::Matrix<double, 6, 1>::Zero();
  for (std::size_t k = 0; k < c.src.size(); ++k) {
    const Vec3& q = moved[c.src[k]];
    const Vec3& p = target.points[c.dst[k]];
    const Vec3& n = target.normals[c.dst[k]];
    Eigen::Matrix<double, 6, 1> row;
    row.head<3>() = q.cross(n);
    row.tail<3>() = n;
    const double rhs = -(q - p).dot(n);
    ata += row * row.transpose();
    atb += row * rhs;
  }
  const Eigen::LDLT<Eigen::Matrix<double, 6, 6>> ldlt(ata);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return std::nullopt;
  const Eigen::Matrix<double, 6, 1> x = ldlt.solve(atb);
  if (!x.allFinite()) return std::nullopt;
  return Pose(rodrigues_exp(x.head<3>()), x.tail<3>());
}

}  // namespace

constexpr int kMaxStepHalvings = 4;

AlignmentResult icp(const PointCloud& source, const PointCloud& target, const Pose& init, const IcpParams& params) {
  params.validate();
  if (source.empty() || target.empty()) throw Error(ErrorKind::EmptyCloud, "icp needs two nonempty clouds");
  if (params.variant == IcpVariant::PointToPlane && !target.has_normals()) {
    throw Error(ErrorKind::MissingNormals, "point-to-plane icp needs target normals");
  }

  const KdTree tree(target.points);
  const double gate = params.max_correspondence_dist;
  std::vector<Vec3> moved;

  AlignmentResult result;
  result.transform = init;
  apply(init, source.points, moved);
  Correspondences corr = correspond(moved, tree, gate);
  if (corr.src.empty()) {
    throw Error(ErrorKind::NoCorrespondences, "no source point within " + std::to_string(gate) + " m at init");
  }
  double rmse = corr.rmse();
  result.rmse_history.push_back(rmse);

  std::vector<Vec3> trial;
  bool plane_stalled = false;
  for (int it = 0; it < params.max_iterations; ++it) {
    // A full step can raise the inlier rmse when points enter or leave the
    // gate; halve it a few times before giving up so the rmse never grows.
    // A point-to-plane step that cannot be accepted falls back to a
    // point-to-point step from the same correspondences, and later
    // iterations stay point-to-point.
    Pose candidate;
    Correspondences next;
    double next_rmse = 0.0;
    bool accepted = false;
    auto try_step = [&](const std::optional<Pose>& delta) {
      if (!delta) return;
      const Vec3 rot_step =
          rotation_angle(delta->rotation) < kPi - 1e-6 ? rodrigues_log(delta->rotation) : Vec3::Zero();
      for (int halving = 0; halving <= kMaxStepHalvings && !accepted; ++halving) {
        const double scale = std::ldexp(1.0, -halving);
        const Pose step = halving == 0 ? *delta : Pose(rodrigues_exp(scale * rot_step), scale * delta->translation);
        candidate = compose(step, result.transform);
        apply(candidate, source.points, trial);
        next = correspond(trial, tree, gate);
        if (next.src.empty()) continue;
        next_rmse = next.rmse();
        accepted = next_rmse <= rmse + 1e-12;
      }
    };
    if (params.variant == IcpVariant::PointToPlane && !plane_stalled) {
      try_step(point_to_plane_step(moved, target, corr));
      plane_stalled = !accepted;
    }
    if (!accepted) try_step(point_to_point_step(moved, target, corr));
    if (!accepted) break;

    result.transform = candidate;
    moved.swap(trial);
    corr = std::move(next);
    result.iterations = it + 1;
    result.rmse_history.push_back(next_rmse);
    const double change = rmse - next_rmse;
    rmse = next_rmse;
    if (change < params.convergence_delta_rmse) {
      result.converged = true;
      break;
    }
  }

  result.fitness = static_cast<double>(corr.src.size()) / static_cast<double>(source.size());
  result.inlier_rmse = rmse;
  return result;
}

namespace {

struct PrincipalFrame {
  Vec3 mean;
  Mat3 axes;  // columns: major, middle, minor; right-handed
};

PrincipalFrame principal_frame(const PointCloud& cloud, const char* which) {
  if (cloud.size() < 3) {
    throw Error(ErrorKind::DegenerateGeometry, std::string(which) + " cloud has fewer than 3 points");
  }
  const Vec3 mean = centroid(cloud);
  Mat3 cov = Mat3::Zero();
  for (const Vec3& p : cloud.points) {
    const Vec3 d = p - mean;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(cloud.size());
  const Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
  const Eigen::Vector3d ev = eig.eigenvalues();  // ascending
  if (std::sqrt(std::max(ev[1], 0.0)) < 1e-9) {
    throw Error(ErrorKind::DegenerateGeometry, std::string(which) + " cloud is collinear");
  }
  Mat3 axes;
  axes.col(0) = eig.eigenvectors().col(2);
  axes.col(1) = eig.eigenvectors().col(1);
  axes.col(2) = axes.col(0).cross(axes.col(1)).normalized();
  return {mean, axes};
}

}  // namespace

std::vector<Pose> coarse_align_pca(const PointCloud& source, const PointCloud& target) {
  const PrincipalFrame s = principal_frame(source, "source");
  const PrincipalFrame t = principal_frame(target, "target");
  static const double kSigns[4][3] = {{1, 1, 1}, {-1, -1, 1}, {-1, 1, -1}, {1, -1, -1}};
  std::vector<Pose> out;
  out.reserve(4);
  for (const auto& sg : kSigns) {
    const Mat3 flip = Eigen::Vector3d(sg[0], sg[1], sg[2]).asDiagonal();
    const Mat3 r = t.axes * flip * s.axes.transpose();
    out.emplace_back(r, t.mean - r * s.mean);
  }
  return out;
}

AlignmentResult align_object(const PointCloud& registered, const PointCloud& scanned, const IcpParams& params) {
  params.validate();
  const std::vector<Pose> hypotheses = coarse_align_pca(registered, scanned);
  std::optional<AlignmentResult> best;
  std::optional<Error> last_error;
  for (const Pose& h : hypotheses) {
    try {
      AlignmentResult r = icp(registered, scanned, h, params);
      if (!best || r.fitness > best->fitness ||
          (r.fitness == best->fitness && r.inlier_rmse < best->inlier_rmse)) {
        best = std::move(r);
      }
    } catch (const Error& e) {
      last_error = e;
    }
  }
  if (!best) throw *last_error;
  return *best;
}

FitnessScore compute_fitness(const PointCloud& source, const PointCloud& target, const Pose& t, double gate) {
  if (!(gate > 0.0)) throw Error(ErrorKind::InvalidArgument, "gate must be positive");
  if (source.empty() || target.empty()) return {};
  const KdTree tree(target.points);
  std::vector<Vec3> moved;
  apply(t, source.points, moved);
  const Correspondences c = correspond(moved, tree, gate);
  return {static_cast<double>(c.src.size()) / static_cast<double>(source.size()), c.rmse()};
}

}  // namespace pickplace
