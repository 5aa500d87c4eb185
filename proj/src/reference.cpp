#include "phbench/reference.hpp"

#include "phbench/errors.hpp"
#include "phbench/so3.hpp"

#include <cmath>

namespace phbench {

namespace {

constexpr double kTwoPi = 6.283185307179586;
// Switching instants are compared with this slack so that sample times
// like 0.7 - 0.5 land on the intended side.
constexpr double kTimeSlack = 1e-9;

void check_axis(const RobotModel& model, int axis, const char* what) {
  if (axis < 0 || axis >= model.task_dim()) {
    throw ConfigError(std::string(what) + " must be a task index below " + std::to_string(model.task_dim()));
  }
}

void check_translational(const RobotModel& model, int axis, const char* what) {
  check_axis(model, axis, what);
  if (model.task_rows[axis] > 2) throw ConfigError(std::string(what) + " must be a translational task axis");
}

}  // namespace

const char* to_string(ReferenceKind kind) {
  switch (kind) {
    case ReferenceKind::constant: return "constant";
    case ReferenceKind::step: return "step";
    case ReferenceKind::gait: return "gait";
    case ReferenceKind::jump_sequence: return "jump_sequence";
    case ReferenceKind::sinusoid: return "sinusoid";
    case ReferenceKind::ramp: return "ramp";
  }
  return "unknown";
}

ReferenceSignal::ReferenceSignal(const RobotModel& model, ReferenceKind kind, const Pose& base)
    : kind_(kind), task_rows_(model.task_rows), base_(base) {}

ReferenceSignal ReferenceSignal::constant(const RobotModel& model, const Pose& pose) {
  return ReferenceSignal(model, ReferenceKind::constant, pose);
}

ReferenceSignal ReferenceSignal::step(const RobotModel& model, const Pose& base, int axis, double amplitude,
                                      double time) {
  check_axis(model, axis, "step axis");
  ReferenceSignal r(model, ReferenceKind::step, base);
  r.step_ = {axis, amplitude, time};
  return r;
}

ReferenceSignal ReferenceSignal::gait(const RobotModel& model, const Pose& base, double step_length, double period,
                                      double step_height, int forward_axis, int vertical_axis) {
  if (!(period > 0.0)) throw ConfigError("gait period must be > 0");
  if (step_length < 0.0 || step_height < 0.0) throw ConfigError("gait step length and height must be >= 0");
  check_translational(model, forward_axis, "gait forward axis");
  check_translational(model, vertical_axis, "gait vertical axis");
  if (forward_axis == vertical_axis) throw ConfigError("gait forward and vertical axes must differ");
  ReferenceSignal r(model, ReferenceKind::gait, base);
  r.step_length_ = step_length;
  r.period_ = period;
  r.step_height_ = step_height;
  r.forward_axis_ = forward_axis;
  r.vertical_axis_ = vertical_axis;
  return r;
}

ReferenceSignal ReferenceSignal::jump_sequence(const RobotModel& model, const Pose& rest, double drop,
                                               double return_delay, double start, int count, double repeat_period,
                                               int vertical_axis) {
  if (drop < 0.0) throw ConfigError("jump drop must be >= 0");
  if (!(return_delay > 0.0)) throw ConfigError("jump return delay must be > 0");
  if (count < 1) throw ConfigError("jump count must be >= 1");
  if (count > 1 && !(repeat_period > return_delay)) throw ConfigError("jump repeat period must exceed the return delay");
  check_translational(model, vertical_axis, "jump vertical axis");
  ReferenceSignal r(model, ReferenceKind::jump_sequence, rest);
  r.drop_ = drop;
  r.return_delay_ = return_delay;
  r.start_ = start;
  r.count_ = count;
  r.repeat_period_ = repeat_period;
  r.vertical_axis_ = vertical_axis;
  return r;
}

ReferenceSignal ReferenceSignal::sinusoid(const RobotModel& model, const Pose& base, const Eigen::VectorXd& amplitude,
                                          const Eigen::VectorXd& omega, const Eigen::VectorXd& phase) {
  const int k = model.task_dim();
  if (amplitude.size() != k || omega.size() != k || phase.size() != k) {
    throw ConfigError("sinusoid amplitude, omega and phase need " + std::to_string(k) + " entries");
  }
  for (int i = 0; i < k; ++i) {
    if (amplitude[i] != 0.0 && model.task_rows[i] > 2) {
      throw ConfigError("sinusoid references move translational axes only");
    }
  }
  ReferenceSignal r(model, ReferenceKind::sinusoid, base);
  r.amplitude_ = amplitude;
  r.omega_ = omega;
  r.phase_ = phase;
  return r;
}

ReferenceSignal ReferenceSignal::ramp(const RobotModel& model, const Pose& base, const Eigen::VectorXd& velocity) {
  const int k = model.task_dim();
  if (velocity.size() != k) throw ConfigError("ramp velocity needs " + std::to_string(k) + " entries");
  for (int i = 0; i < k; ++i) {
    if (velocity[i] != 0.0 && model.task_rows[i] > 2) throw ConfigError("ramp references move translational axes only");
  }
  ReferenceSignal r(model, ReferenceKind::ramp, base);
  r.amplitude_ = velocity;
  return r;
}

ReferenceSample ReferenceSignal::hold(const Pose& pose) const {
  return {pose, Eigen::VectorXd::Zero(task_dim()), Eigen::VectorXd::Zero(task_dim())};
}

Pose ReferenceSignal::offset_axis(const Pose& pose, int axis, double amount) const {
  Pose out = pose;
  const int row = task_rows_[axis];
  if (row < 3) {
    out.position[row] += amount;
  } else {
    out.rotation = pose.rotation * exp_so3(Eigen::Vector3d::Unit(row - 3) * amount);
  }
  return out;
}

ReferenceSample ReferenceSignal::evaluate(double t) const {
  ReferenceSample s;
  switch (kind_) {
    case ReferenceKind::constant:
      return hold(base_);
    case ReferenceKind::step:
      return hold(t >= step_.time - kTimeSlack ? offset_axis(base_, step_.axis, step_.amplitude) : base_);
    case ReferenceKind::jump_sequence: {
      bool down = false;
      if (t >= start_ - kTimeSlack) {
        const double rel = t - start_;
        const int index = count_ > 1 ? static_cast<int>(std::floor((rel + kTimeSlack) / repeat_period_)) : 0;
        if (index < count_) {
          const double local = rel - index * (count_ > 1 ? repeat_period_ : 0.0);
          down = local < return_delay_ - kTimeSlack;
        }
      }
      return hold(down ? offset_axis(base_, vertical_axis_, -drop_) : base_);
    }
    case ReferenceKind::gait: {
      s = hold(base_);
      const double phase = std::fmod(std::max(t, 0.0), period_) / period_;
      const double half = 0.5 * period_;
      const int fwd = task_rows_[forward_axis_];
      const int up = task_rows_[vertical_axis_];
      if (phase < 0.5) {
        // stance: foot sweeps backwards at constant speed
        const double u = phase / 0.5;
        s.pose.position[fwd] += step_length_ * (0.5 - u);
        s.velocity[forward_axis_] = -step_length_ / half;
      } else {
        // swing: cycloid forward with a raised arc
        const double u = (phase - 0.5) / 0.5;
        const double a = kTwoPi * u;
        s.pose.position[fwd] += step_length_ * (u - std::sin(a) / kTwoPi - 0.5);
        s.pose.position[up] += 0.5 * step_height_ * (1.0 - std::cos(a));
        s.velocity[forward_axis_] = step_length_ * (1.0 - std::cos(a)) / half;
        s.velocity[vertical_axis_] = 0.5 * step_height_ * kTwoPi * std::sin(a) / half;
        s.acceleration[forward_axis_] = step_length_ * kTwoPi * std::sin(a) / (half * half);
        s.acceleration[vertical_axis_] = 0.5 * step_height_ * kTwoPi * kTwoPi * std::cos(a) / (half * half);
      }
      break;
    }
    case ReferenceKind::ramp: {
      s = hold(base_);
      for (int i = 0; i < task_dim(); ++i) {
        s.pose.position[task_rows_[i]] += amplitude_[i] * t;
        s.velocity[i] = amplitude_[i];
      }
      break;
    }
    case ReferenceKind::sinusoid: {
      s = hold(base_);
      for (int i = 0; i < task_dim(); ++i) {
        if (amplitude_[i] == 0.0) continue;
        const double arg = omega_[i] * t + phase_[i];
        s.pose.position[task_rows_[i]] += amplitude_[i] * std::sin(arg);
        s.velocity[i] = amplitude_[i] * omega_[i] * std::cos(arg);
        s.acceleration[i] = -amplitude_[i] * omega_[i] * omega_[i] * std::sin(arg);
      }
      break;
    }
  }
  if (position_only_) {
    s.velocity.setZero();
    s.acceleration.setZero();
  }
  return s;
}

ReferenceSample ReferenceSignal::evaluate_before_start() const {
  switch (kind_) {
    case ReferenceKind::step:
      return step_.time <= 0.0 ? hold(base_) : evaluate(0.0);
    case ReferenceKind::jump_sequence:
      return start_ <= 0.0 ? hold(base_) : evaluate(0.0);
    default:
      return evaluate(0.0);
  }
}

ReferenceSignal ReferenceSignal::position_only() const {
  ReferenceSignal r = *this;
  r.position_only_ = true;
  return r;
}

bool ReferenceSignal::quasi_static() const {
  switch (kind_) {
    case ReferenceKind::constant:
    case ReferenceKind::step:
    case ReferenceKind::jump_sequence:
      return true;
    case ReferenceKind::gait:
      return position_only_ || (step_length_ == 0.0 && step_height_ == 0.0);
    case ReferenceKind::sinusoid:
    case ReferenceKind::ramp:
      return position_only_ || amplitude_.isZero(0.0);
  }
  return false;
}

}  // namespace phbench
