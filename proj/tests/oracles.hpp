#pragma once

// Straight-line transcriptions of the reward formulas on raw doubles, kept
// free of library helpers so they can serve as independent references.

#include <cmath>

namespace oracle {

inline double len2(double x, double y) { return std::sqrt(x * x + y * y); }
inline double len3(double x, double y, double z) { return std::sqrt(x * x + y * y + z * z); }

inline double ball_vel(double tx, double ty, double bx, double by, double eps) {
    const double tn = len2(tx, ty);
    const double a = len2(tx - bx, ty - by) / (tn + eps);
    const double b = (tn - len2(bx, by)) / (tn + eps);
    return std::exp(-10.0 * (a * a + 0.1 * b * b));
}

inline double ball_root_pos(double bx, double by, double rx, double ry) {
    const double dx = bx - rx;
    const double dy = by - ry;
    return std::exp(-10.0 * (dx * dx + dy * dy));
}

inline double root_vel(double tx, double ty, double vx, double vy, double rx, double ry, double bx, double by,
                       double eps) {
    const double tn = len2(tx, ty);
    const double dl = len2(bx - rx, by - ry);
    const double dx = (bx - rx) / dl;
    const double dy = (by - ry) / dl;
    const double a = len2(tn * dx - vx, tn * dy - vy) / (tn + eps);
    const double b = (tn - len2(vx, vy)) / (tn + eps);
    return std::exp(-10.0 * (a * a + 0.1 * b * b));
}

inline double dribble(double tx, double ty, double bx, double by, double bvx, double bvy, double rx, double ry,
                      double rvx, double rvy, double eps) {
    return 0.6 * ball_vel(tx, ty, bvx, bvy, eps) + 0.2 * ball_root_pos(bx, by, rx, ry) +
           0.2 * root_vel(tx, ty, rvx, rvy, rx, ry, bx, by, eps);
}

inline double trap_before(const double ball[3], const double body[3]) {
    const double dx = ball[0] - body[0], dy = ball[1] - body[1], dz = ball[2] - body[2];
    return std::exp(-10.0 * (dx * dx + dy * dy + dz * dz));
}

inline double trap_after(const double vb[3], const double vr[3]) {
    const double dx = vb[0] - vr[0], dy = vb[1] - vr[1], dz = vb[2] - vr[2];
    return std::exp(-10.0 * (dx * dx + dy * dy + dz * dz));
}

inline double move_task(double tx, double ty, double vx, double vy, double fx, double fy, double dx, double dy,
                        double eps) {
    const double tn = len2(tx, ty);
    const double a = len2(tx - vx, ty - vy) / (tn + eps);
    const double b = (tn - len2(vx, vy)) / (tn + eps);
    const double r_vel = std::exp(-0.25 * (a * a + 0.1 * b * b));
    const double r_dir = fx * dx + fy * dy;
    return 0.7 * r_vel + 0.3 * r_dir;
}

inline double move_total(double task, double sim, bool degcl) { return degcl ? 0.5 * task + 0.5 * sim : task; }

inline double kick(const double t[3], const double v[3], double eps) {
    const double e = len3(t[0] - v[0], t[1] - v[1], t[2] - v[2]) / (len3(t[0], t[1], t[2]) + eps);
    return std::exp(-(e * e));
}

}  // namespace oracle
