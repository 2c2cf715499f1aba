#include "pickplace/handeye.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <tuple>

#include "lm.hpp"
#include "pickplace/error.hpp"

namespace pickplace {

std::vector<MotionPair> relative_motions(const std::vector<StationSample>& samples, bool all_pairs) {
  if (samples.size() < 3) {
    throw Error(ErrorKind::TooFewSamples, "need at least 3 stations, got " + std::to_string(samples.size()));
  }
  std::vector<MotionPair> pairs;
  auto add = [&](std::size_t i, std::size_t j) {
    pairs.push_back({compose(samples[j].base_to_ee, invert(samples[i].base_to_ee)),
                     compose(samples[j].cam_to_marker, invert(samples[i].cam_to_marker))});
  };
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    if (all_pairs) {
      for (std::size_t j = i + 1; j < samples.size(); ++j) add(i, j);
    } else {
      add(i, i + 1);
    }
  }
  return pairs;
}

namespace {

Vec3 rotation_axis(const Quat& q) {
  const Quat c = canonical(q);
  const double s = c.vec().norm();
  return s > 0.0 ? Vec3(c.vec() / s) : Vec3::UnitZ();
}

}  // namespace

std::pair<double, double> ax_xb_residuals(const std::vector<MotionPair>& pairs, const Pose& x) {
  double rot = 0.0, trans = 0.0;
  for (const MotionPair& p : pairs) {
    const PoseError e = pose_error(compose(p.a, x), compose(x, p.b));
    rot += e.rot_angle * e.rot_angle;
    trans += e.trans_dist * e.trans_dist;
  }
  const double n = static_cast<double>(pairs.size());
  return {std::sqrt(rot / n), std::sqrt(trans / n)};
}

AxXbSolution solve_ax_xb(const std::vector<MotionPair>& pairs, const HandEyeOptions& options) {
  if (pairs.size() < 2) throw Error(ErrorKind::TooFewPairs, "need at least 2 motion pairs");

  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double angle = rotation_angle(pairs[i].a.rotation);
    if (angle <= options.min_motion_angle || angle >= kPi - options.min_motion_angle) {
      throw Error(ErrorKind::DegenerateMotions, "motion " + std::to_string(i) + " rotates by " +
                                                    std::to_string(angle) + " rad, outside the usable range");
    }
  }
  double widest = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const Vec3 ai = rotation_axis(pairs[i].a.rotation);
    for (std::size_t j = i + 1; j < pairs.size(); ++j) {
      const double c = std::min(1.0, std::abs(ai.dot(rotation_axis(pairs[j].a.rotation))));
      widest = std::max(widest, std::acos(c));
    }
  }
  if (widest <= options.min_axis_angle) {
    throw Error(ErrorKind::DegenerateMotions, "all motion axes are parallel");
  }

  const auto n = static_cast<Eigen::Index>(pairs.size());
  // Rotation: skew(Pa + Pb) P' = Pb - Pa with P = 2 sin(theta/2) axis.
  Eigen::MatrixXd m(3 * n, 3);
  Eigen::VectorXd rhs(3 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const MotionPair& p = pairs[static_cast<std::size_t>(i)];
    const Vec3 pa = 2.0 * canonical(p.a.rotation).vec();
    const Vec3 pb = 2.0 * canonical(p.b.rotation).vec();
    m.block<3, 3>(3 * i, 0) = skew(pa + pb);
    rhs.segment<3>(3 * i) = pb - pa;
  }
  const Vec3 pprime = m.colPivHouseholderQr().solve(rhs);
  const Vec3 px = 2.0 * pprime / std::sqrt(1.0 + pprime.squaredNorm());
  const double px2 = px.squaredNorm();
  const Mat3 rx = (1.0 - 0.5 * px2) * Mat3::Identity() +
                  0.5 * (px * px.transpose() + std::sqrt(std::max(0.0, 4.0 - px2)) * skew(px));

  // Translation: (Ra - I) tx = Rx tb - ta.
  Eigen::MatrixXd c(3 * n, 3);
  Eigen::VectorXd d(3 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const MotionPair& p = pairs[static_cast<std::size_t>(i)];
    c.block<3, 3>(3 * i, 0) = p.a.rotation_matrix() - Mat3::Identity();
    d.segment<3>(3 * i) = rx * p.b.translation - p.a.translation;
  }
  const Vec3 tx = c.colPivHouseholderQr().solve(d);

  AxXbSolution out;
  out.x = Pose(rx, tx);
  std::tie(out.rot_residual, out.trans_residual) = ax_xb_residuals(pairs, out.x);
  return out;
}

namespace {

// Joint least squares over (X, Y) of the loop base_to_ee * Y = X * cam_to_marker,
// measured on a few marker-frame points so rotation and translation share units.
std::pair<Pose, Pose> refine_closure(const std::vector<StationSample>& samples, const Pose& x0, const Pose& y0) {
  const std::array<Vec3, 4> probes = {Vec3(0, 0, 0), Vec3(0.1, 0, 0), Vec3(0, 0.1, 0), Vec3(0, 0, 0.1)};
  using State = std::pair<Pose, Pose>;
  detail::LmProblem<State> problem;
  problem.residuals = [&](const State& s) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(samples.size() * probes.size() * 3));
    Eigen::Index row = 0;
    for (const StationSample& st : samples) {
      const Pose via_robot = compose(st.base_to_ee, s.second);
      const Pose via_camera = compose(s.first, st.cam_to_marker);
      for (const Vec3& p : probes) {
        r.segment<3>(row) = transform_point(via_robot, p) - transform_point(via_camera, p);
        row += 3;
      }
    }
    return r;
  };
  problem.plus = [](const State& s, const Eigen::VectorXd& d) {
    return State{Pose(rodrigues_exp(d.segment<3>(0)) * s.first.rotation, s.first.translation + d.segment<3>(3)),
                 Pose(rodrigues_exp(d.segment<3>(6)) * s.second.rotation, s.second.translation + d.segment<3>(9))};
  };
  problem.steps = Eigen::VectorXd::Constant(12, 1e-7);
  const auto outcome = detail::levenberg_marquardt(problem, State{x0, y0}, detail::LmSettings{});
  return outcome.state;
}

}  // namespace

HandEyeResult calibrate_eye_to_hand(const std::vector<StationSample>& samples, const HandEyeOptions& options) {
  const std::vector<MotionPair> pairs = relative_motions(samples, options.all_pairs);
  const AxXbSolution sol = solve_ax_xb(pairs, options);

  std::vector<Quat> rotations;
  Vec3 t = Vec3::Zero();
  for (const StationSample& s : samples) {
    const Pose ee_to_marker = compose(invert(s.base_to_ee), compose(sol.x, s.cam_to_marker));
    rotations.push_back(ee_to_marker.rotation);
    t += ee_to_marker.translation;
  }
  HandEyeResult out;
  out.base_to_camera = sol.x;
  out.ee_to_marker = Pose(average_rotation(rotations), t / static_cast<double>(samples.size()));
  if (options.refine) {
    std::tie(out.base_to_camera, out.ee_to_marker) = refine_closure(samples, out.base_to_camera, out.ee_to_marker);
  }
  std::tie(out.rot_residual, out.trans_residual) = ax_xb_residuals(pairs, out.base_to_camera);
  return out;
}

std::array<Vec3, 4> MarkerSpec::corners() const {
  const double h = 0.5 * side_length;
  return {Vec3(-h, h, 0.0), Vec3(-h, -h, 0.0), Vec3(h, -h, 0.0), Vec3(h, h, 0.0)};
}

MarkerPose marker_pnp(const CameraIntrinsics& k, const MarkerSpec& spec, const std::array<Vec2, 4>& corners_px) {
  k.validate();
  if (!(spec.side_length > 0.0)) throw Error(ErrorKind::InvalidArgument, "marker side length must be positive");
  const std::array<Vec3, 4> obj = spec.corners();

  PlanarView normalized;
  for (std::size_t i = 0; i < 4; ++i) {
    normalized.object_points.push_back(obj[i]);
    normalized.image_points.push_back(undistort_normalized(k, corners_px[i]));
  }
  const Homography h = estimate_homography(normalized);
  CameraIntrinsics unit;
  const Pose init = extrinsics_from_homography(unit, h);

  detail::LmProblem<Pose> problem;
  problem.residuals = [&](const Pose& p) {
    Eigen::VectorXd r(8);
    for (std::size_t i = 0; i < 4; ++i) {
      const Vec3 pc = transform_point(p, obj[i]);
      const Vec2 uv = pc.z() > 1e-9 ? project(k, pc) : Vec2(1e6, 1e6);
      r.segment<2>(static_cast<Eigen::Index>(2 * i)) = uv - corners_px[i];
    }
    return r;
  };
  problem.plus = [](const Pose& p, const Eigen::VectorXd& d) {
    return Pose(rodrigues_exp(d.head<3>()) * p.rotation, p.translation + d.tail<3>());
  };
  problem.steps = Eigen::VectorXd::Constant(6, 1e-7);

  const auto outcome = detail::levenberg_marquardt(problem, init, detail::LmSettings{});
  // Only improving steps are accepted, so the final state is never worse than init.
  const Eigen::VectorXd r = problem.residuals(outcome.state);
  return {outcome.state, std::sqrt(r.squaredNorm() / static_cast<double>(r.size()))};
}

}  // namespace pickplace
