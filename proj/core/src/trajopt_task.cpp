// Copyright 2026 The Juggle Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "juggle/trajopt_task.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "juggle/csv.hpp"

namespace juggle::trajopt_task {
namespace {

// Cyclic component pairs of a cross product: (u x r)_c = u_a r_b - u_b r_a.
constexpr int kCrossA[3] = {1, 2, 0};
constexpr int kCrossB[3] = {2, 0, 1};

int largest_component(const Vec3& v) {
  int index = 0;
  double best = std::abs(v[0]);
  for (int i = 1; i < 3; ++i) {
    if (std::abs(v[i]) > best) {
      best = std::abs(v[i]);
      index = i;
    }
  }
  return index;
}

}  // namespace

IntegratedStates integrate_jerk(const VecX& x0, const VecX& v0, const VecX& a0, const MatX& jerks,
                                double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_jerk requires dt > 0");
  const Eigen::Index dim = x0.size();
  const Eigen::Index steps = jerks.rows();
  if (jerks.cols() != dim || v0.size() != dim || a0.size() != dim) {
    throw std::invalid_argument("integrate_jerk: dimension mismatch");
  }
  IntegratedStates states;
  states.positions.resize(steps + 1, dim);
  states.velocities.resize(steps + 1, dim);
  states.accelerations.resize(steps + 1, dim);
  states.positions.row(0) = x0.transpose();
  states.velocities.row(0) = v0.transpose();
  states.accelerations.row(0) = a0.transpose();
  const double dt2 = dt * dt;
  const double dt3 = dt2 * dt;
  for (Eigen::Index k = 0; k < steps; ++k) {
    const auto x = states.positions.row(k);
    const auto v = states.velocities.row(k);
    const auto a = states.accelerations.row(k);
    const auto j = jerks.row(k);
    states.positions.row(k + 1) = x + v * dt + 0.5 * a * dt2 + (1.0 / 6.0) * j * dt3;
    states.velocities.row(k + 1) = v + a * dt + 0.5 * j * dt2;
    states.accelerations.row(k + 1) = a + j * dt;
  }
  return states;
}

JerkMaps build_jerk_maps(int support_count, double dt) {
  JerkMaps maps;
  const int K = support_count;
  maps.position = MatX::Zero(K + 1, K);
  maps.velocity = MatX::Zero(K + 1, K);
  maps.acceleration = MatX::Zero(K + 1, K);
  // Column m: states produced by a unit jerk on interval m only.
  for (int m = 0; m < K; ++m) {
    double x = 0, v = 0, a = 0;
    for (int k = 0; k < K; ++k) {
      const double j = k == m ? 1.0 : 0.0;
      const double xn = x + v * dt + 0.5 * a * dt * dt + (1.0 / 6.0) * j * dt * dt * dt;
      const double vn = v + a * dt + 0.5 * j * dt * dt;
      const double an = a + j * dt;
      x = xn;
      v = vn;
      a = an;
      maps.position(k + 1, m) = x;
      maps.velocity(k + 1, m) = v;
      maps.acceleration(k + 1, m) = a;
    }
  }
  return maps;
}

JerkProgram::JerkProgram(int dim, int support_count, double dt, const VecX& x0, const VecX& v0,
                         const VecX& a0)
    : dim_(dim), support_count_(support_count), dt_(dt), x0_(x0), v0_(v0), a0_(a0) {
  if (dim < 1 || support_count < 1) throw std::invalid_argument("JerkProgram: bad sizes");
  maps_ = build_jerk_maps(support_count, dt);
  base_ = integrate_jerk(x0, v0, a0, MatX::Zero(support_count, dim), dt);
}

void JerkProgram::position_row(int k, int axis, VecX* row) const {
  row->setZero(variables());
  row->segment(axis * support_count_, support_count_) = maps_.position.row(k).transpose();
}

void JerkProgram::velocity_row(int k, int axis, VecX* row) const {
  row->setZero(variables());
  row->segment(axis * support_count_, support_count_) = maps_.velocity.row(k).transpose();
}

void JerkProgram::acceleration_row(int k, int axis, VecX* row) const {
  row->setZero(variables());
  row->segment(axis * support_count_, support_count_) = maps_.acceleration.row(k).transpose();
}

void JerkProgram::build_cost(MatX* H, VecX* c) const {
  const int K = support_count_;
  const MatX block = 2.0 * maps_.acceleration.transpose() * maps_.acceleration;
  H->setZero(variables(), variables());
  c->setZero(variables());
  for (int axis = 0; axis < dim_; ++axis) {
    H->block(axis * K, axis * K, K, K) = block;
    c->segment(axis * K, K) =
        2.0 * maps_.acceleration.transpose() * base_.accelerations.col(axis);
  }
}

IntegratedStates JerkProgram::integrate(const MatX& jerks) const {
  return integrate_jerk(x0_, v0_, a0_, jerks, dt_);
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kMaxIterations:
      return "max-iterations";
  }
  return "unknown";
}

double ConstraintResiduals::max_equality() const {
  double r = touch_down_position;
  r = std::max(r, take_off_position);
  r = std::max(r, take_off_velocity);
  r = std::max(r, take_off_acceleration);
  r = std::max(r, pre_touch_down_collinearity);
  r = std::max(r, post_take_off_collinearity);
  return r;
}

void TrajectorySolution::sample(double t, VecX* x, VecX* v, VecX* a) const {
  const double total = duration();
  const double eps = 1e-9 * std::max(1.0, total);
  if (t < -eps || t > total + eps) {
    throw std::out_of_range("sample time " + format_double(t) + " outside [0, " +
                            format_double(total) + "]");
  }
  t = std::min(std::max(t, 0.0), total);
  int k = static_cast<int>(std::floor(t / dt));
  k = std::min(k, support_count - 1);
  const double tau = t - k * dt;
  const VecX xk = positions.row(k).transpose();
  const VecX vk = velocities.row(k).transpose();
  const VecX ak = accelerations.row(k).transpose();
  const VecX jk = jerks.row(k).transpose();
  if (x != nullptr) {
    *x = xk + vk * tau + 0.5 * ak * tau * tau + (1.0 / 6.0) * jk * tau * tau * tau;
  }
  if (v != nullptr) *v = vk + ak * tau + 0.5 * jk * tau * tau;
  if (a != nullptr) *a = ak + jk * tau;
}

void CycleProblem::validate() const {
  if (support_count < 4) throw std::invalid_argument("support_count must be >= 4");
  if (!(cycle_time > 0.0)) throw std::invalid_argument("cycle_time must be > 0");
  if (take_off_index != support_count) {
    throw std::invalid_argument("take_off_index must equal support_count");
  }
  if (!(touch_down_index > 0 && touch_down_index < take_off_index)) {
    throw std::invalid_argument("touch_down_index must satisfy 0 < k_TD < k_TO");
  }
  if (static_cast<int>(post_take_off.size()) > touch_down_index - 1) {
    throw std::invalid_argument("N_TO exceeds k_TD - 1");
  }
  if (static_cast<int>(pre_touch_down.size()) > take_off_index - touch_down_index) {
    throw std::invalid_argument("N_TD exceeds k_TO - k_TD");
  }
  for (const auto& point : pre_touch_down) {
    if (point.index < 1 || point.index >= touch_down_index) {
      throw std::invalid_argument("pre-touch-down index outside (0, k_TD)");
    }
  }
  for (const auto& point : post_take_off) {
    if (point.index < 1 || point.index >= touch_down_index) {
      throw std::invalid_argument("post-take-off index outside (0, k_TD)");
    }
  }
  if (std::abs(hand_normal.norm() - 1.0) > 1e-6) {
    throw std::invalid_argument("hand_normal must be a unit vector");
  }
  if (!(jerk_limit > 0.0)) throw std::invalid_argument("jerk_limit must be > 0");
  const double speed = touch_down_velocity.norm();
  if (speed > 0.0) {
    const double cosine = hand_normal.dot(-touch_down_velocity) / speed;
    const double angle = std::acos(std::min(1.0, std::max(-1.0, cosine)));
    if (angle > deg_to_rad(hand_normal_angle_cap_deg) + 1e-9) {
      throw std::invalid_argument("hand normal deviates from reversed touch-down velocity by " +
                                  format_double(rad_to_deg(angle)) + " deg (cap " +
                                  format_double(hand_normal_angle_cap_deg) + ")");
    }
  }
}

CycleProblem build_problem(const pattern::CycleEvent& event, const ballistics::BallState& incoming,
                           const Vec3& previous_position, const Vec3& previous_velocity,
                           const Vec3& previous_acceleration, const CycleBuildConfig& config,
                           double alpha, const Vec3& gravity, double catch_plane_z) {
  CycleProblem problem;
  problem.cycle_time = event.cycle_time;
  problem.support_count = config.support_count;
  problem.take_off_index = config.support_count;
  problem.initial_position = previous_position;
  problem.initial_velocity = previous_velocity;
  problem.initial_acceleration = previous_acceleration;
  problem.gravity = gravity;
  problem.alpha = alpha;
  problem.jerk_limit = config.jerk_limit;
  problem.hand_normal_angle_cap_deg = config.hand_normal_angle_cap_deg;
  problem.take_off_position = event.take_off_location;
  problem.next_touch_down_target = event.target_touch_down_location;
  problem.flight_time = event.flight_time;

  const double cycle_start = event.take_off_time - event.cycle_time;
  const auto prediction = ballistics::predict_touchdown(incoming, catch_plane_z, gravity);
  if (!prediction.has_value()) {
    throw InfeasibleError("incoming ball never reaches the catch plane");
  }
  const double dt = problem.dt();
  const int k_td = static_cast<int>(std::lround((prediction->time - cycle_start) / dt));
  const int min_index = std::max(1, config.n_post_take_off + 1);
  if (k_td < min_index) {
    throw InfeasibleError("predicted touch-down at support " + std::to_string(k_td) +
                          " is earlier than the minimum reachable index " +
                          std::to_string(min_index));
  }
  if (k_td > config.support_count - 1) {
    throw InfeasibleError("predicted touch-down at support " + std::to_string(k_td) +
                          " falls outside the cycle window");
  }
  if (config.n_pre_touch_down > config.support_count - k_td) {
    throw InfeasibleError("N_TD = " + std::to_string(config.n_pre_touch_down) +
                          " does not fit between touch-down and take-off");
  }
  if (k_td - config.n_pre_touch_down < 1) {
    throw InfeasibleError("N_TD = " + std::to_string(config.n_pre_touch_down) +
                          " reaches before the first support point");
  }
  problem.touch_down_index = k_td;

  const double snapped_time = cycle_start + k_td * dt;
  problem.touch_down_position = ballistics::position_at(incoming, snapped_time, gravity);
  problem.touch_down_position.z() =
      std::abs(problem.touch_down_position.z() - catch_plane_z) < 1e-9
          ? catch_plane_z
          : problem.touch_down_position.z();
  problem.touch_down_velocity = ballistics::velocity_at(incoming, snapped_time, gravity);
  problem.hand_normal = (-problem.touch_down_velocity).normalized();

  problem.pre_touch_down.clear();
  for (int i = 1; i <= config.n_pre_touch_down; ++i) {
    const double t = cycle_start + (k_td - i) * dt;
    problem.pre_touch_down.push_back({k_td - i, ballistics::velocity_at(incoming, t, gravity)});
  }
  problem.post_take_off.clear();
  for (int j = 1; j <= config.n_post_take_off; ++j) {
    problem.post_take_off.push_back({j, problem.hand_normal});
  }
  problem.validate();
  return problem;
}

TrajectorySolution solve_cycle(const CycleProblem& problem) {
  problem.validate();
  const int K = problem.support_count;
  const double dt = problem.dt();
  const Vec3& g = problem.gravity;

  JerkProgram program(3, K, dt, problem.initial_position, problem.initial_velocity,
                      problem.initial_acceleration);
  MatX H;
  VecX c;
  program.build_cost(&H, &c);

  const Vec3 take_off_velocity = ballistics::takeoff_velocity(
      problem.take_off_position, problem.next_touch_down_target, problem.flight_time,
      problem.alpha, g);

  std::vector<VecX> rows;
  std::vector<double> rhs;
  VecX row(program.variables());

  const auto add_position = [&](int k, const Vec3& target) {
    for (int axis = 0; axis < 3; ++axis) {
      program.position_row(k, axis, &row);
      rows.push_back(row);
      rhs.push_back(target[axis] - program.position_base(k, axis));
    }
  };
  const auto add_velocity = [&](int k, const Vec3& target) {
    for (int axis = 0; axis < 3; ++axis) {
      program.velocity_row(k, axis, &row);
      rows.push_back(row);
      rhs.push_back(target[axis] - program.velocity_base(k, axis));
    }
  };
  const auto add_acceleration = [&](int k, const Vec3& target) {
    for (int axis = 0; axis < 3; ++axis) {
      program.acceleration_row(k, axis, &row);
      rows.push_back(row);
      rhs.push_back(target[axis] - program.acceleration_base(k, axis));
    }
  };

  // Cross-product constraint u x r = 0 for an affine state quantity u. Two of
  // the three rows are independent; the row matching the largest component of
  // r is their linear combination and is dropped to keep full row rank.
  const auto add_cross = [&](int k, bool velocity_quantity, const Vec3& reference,
                             const Vec3& offset) {
    if (reference.norm() < 1e-12) return;  // degenerate reference, constraint vanishes
    const int drop = largest_component(reference);
    VecX row_a(program.variables()), row_b(program.variables());
    for (int comp = 0; comp < 3; ++comp) {
      if (comp == drop) continue;
      const int a = kCrossA[comp], b = kCrossB[comp];
      double base_a, base_b;
      if (velocity_quantity) {
        program.velocity_row(k, a, &row_a);
        program.velocity_row(k, b, &row_b);
        base_a = program.velocity_base(k, a) + offset[a];
        base_b = program.velocity_base(k, b) + offset[b];
      } else {
        program.acceleration_row(k, a, &row_a);
        program.acceleration_row(k, b, &row_b);
        base_a = program.acceleration_base(k, a) + offset[a];
        base_b = program.acceleration_base(k, b) + offset[b];
      }
      rows.push_back(reference[b] * row_a - reference[a] * row_b);
      rhs.push_back(-(reference[b] * base_a - reference[a] * base_b));
    }
  };

  add_position(problem.touch_down_index, problem.touch_down_position);
  add_position(K, problem.take_off_position);
  add_velocity(K, take_off_velocity);
  add_acceleration(K, g);
  for (const auto& point : problem.pre_touch_down) {
    add_cross(point.index, true, point.reference, Vec3::Zero());
  }
  for (const auto& point : problem.post_take_off) {
    add_cross(point.index, false, point.reference, -g);
  }

  const int n = program.variables();
  MatX A(static_cast<Eigen::Index>(rows.size()), n);
  VecX b(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    A.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    b[static_cast<Eigen::Index>(i)] = rhs[i];
  }
  const VecX lower = VecX::Constant(n, -problem.jerk_limit);
  const VecX upper = VecX::Constant(n, problem.jerk_limit);

  const qp::QpResult qp_result = qp::solve_box_qp(H, c, A, b, lower, upper);

  TrajectorySolution solution;
  solution.dim = 3;
  solution.support_count = K;
  solution.dt = dt;
  solution.qp_iterations = qp_result.iterations;
  solution.active_bound_count =
      static_cast<int>(qp_result.active_lower.size() + qp_result.active_upper.size());
  solution.note = qp_result.note;
  switch (qp_result.status) {
    case qp::QpStatus::kOptimal:
      solution.status = SolveStatus::kOptimal;
      break;
    case qp::QpStatus::kInfeasible:
      solution.status = SolveStatus::kInfeasible;
      break;
    case qp::QpStatus::kMaxIterations:
      solution.status = SolveStatus::kMaxIterations;
      break;
  }

  solution.jerks.resize(K, 3);
  for (int axis = 0; axis < 3; ++axis) {
    solution.jerks.col(axis) = qp_result.x.segment(axis * K, K);
  }
  const IntegratedStates states = program.integrate(solution.jerks);
  solution.positions = states.positions;
  solution.velocities = states.velocities;
  solution.accelerations = states.accelerations;
  solution.cost = states.accelerations.squaredNorm();
  solution.residuals.kkt = qp_result.kkt_residual;

  auto& res = solution.residuals;
  res.touch_down_position =
      (solution.position3(problem.touch_down_index) - problem.touch_down_position)
          .cwiseAbs()
          .maxCoeff();
  res.take_off_position =
      (solution.position3(K) - problem.take_off_position).cwiseAbs().maxCoeff();
  res.take_off_velocity = (solution.velocity3(K) - take_off_velocity).cwiseAbs().maxCoeff();
  res.take_off_acceleration = (solution.acceleration3(K) - g).cwiseAbs().maxCoeff();
  for (const auto& point : problem.pre_touch_down) {
    const Vec3 cross = solution.velocity3(point.index).cross(point.reference);
    res.pre_touch_down_collinearity =
        std::max(res.pre_touch_down_collinearity, cross.cwiseAbs().maxCoeff());
  }
  for (const auto& point : problem.post_take_off) {
    const Vec3 cross = (solution.acceleration3(point.index) - g).cross(point.reference);
    res.post_take_off_collinearity =
        std::max(res.post_take_off_collinearity, cross.cwiseAbs().maxCoeff());
  }
  res.jerk_bound = std::max(0.0, solution.jerks.cwiseAbs().maxCoeff() - problem.jerk_limit);
  return solution;
}

void sample_trajectory(const TrajectorySolution& solution, double t, Vec3* x, Vec3* v, Vec3* a) {
  VecX xv, vv, av;
  solution.sample(t, x != nullptr ? &xv : nullptr, v != nullptr ? &vv : nullptr,
                  a != nullptr ? &av : nullptr);
  if (x != nullptr) *x = xv;
  if (v != nullptr) *v = vv;
  if (a != nullptr) *a = av;
}

std::string to_csv(const TrajectorySolution& solution) {
  std::vector<std::string> columns{"t"};
  const char* names[] = {"x", "y", "z"};
  const int dim = solution.dim;
  for (int axis = 0; axis < dim; ++axis) {
    const std::string label = dim <= 3 ? names[axis] : "q" + std::to_string(axis);
    columns.push_back("pos_" + label);
    columns.push_back("vel_" + label);
    columns.push_back("acc_" + label);
    columns.push_back("jerk_" + label);
  }
  Table table(std::move(columns));
  for (int k = 0; k <= solution.support_count; ++k) {
    auto row = table.row();
    row.add(k * solution.dt);
    const int jk = std::min(k, solution.support_count - 1);
    for (int axis = 0; axis < dim; ++axis) {
      row.add(solution.positions(k, axis));
      row.add(solution.velocities(k, axis));
      row.add(solution.accelerations(k, axis));
      row.add(solution.jerks(jk, axis));
    }
  }
  return table.to_csv();
}

}  // namespace juggle::trajopt_task
