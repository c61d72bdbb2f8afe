#include "cwalk/kernel.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>

#include "cwalk/errors.hpp"
#include "cwalk/io.hpp"
#include "cwalk/simd.hpp"

namespace cwalk {
namespace {

constexpr double kTwoOverPi = 2.0 / std::numbers::pi;
constexpr int kGaussPoints = 20;
// Phasors are re-seeded from exact cos/sin this often along a row.
constexpr std::int64_t kResyncInterval = 64;

struct QuadratureNodes {
  std::vector<double> theta;
  std::vector<double> decay;   // t(theta), cosh t = 2 - cos theta
  std::vector<double> weight;  // (2/pi) * w / sinh t
  std::vector<double> cos_theta;
  std::vector<double> sin_theta;
};

// Panels of width pi/P with P = ceil(extent/2) + 8 keep at most about one
// oscillation of cos(extent * theta) per 20-point panel.
QuadratureNodes make_nodes(std::int64_t extent) {
  using Rule = boost::math::quadrature::gauss<double, kGaussPoints>;
  const auto& abscissa = Rule::abscissa();
  const auto& gw = Rule::weights();
  const std::int64_t panels = (extent + 1) / 2 + 8;
  const double h = std::numbers::pi / static_cast<double>(panels);

  QuadratureNodes q;
  const auto total = static_cast<std::size_t>(panels * kGaussPoints);
  q.theta.reserve(total);
  q.weight.reserve(total);
  for (std::int64_t p = 0; p < panels; ++p) {
    const double mid = (static_cast<double>(p) + 0.5) * h;
    for (std::size_t i = 0; i < abscissa.size(); ++i) {
      for (int sign : {-1, 1}) {
        q.theta.push_back(mid + sign * abscissa[i] * h / 2);
        q.weight.push_back(gw[i] * h / 2);
      }
    }
  }
  q.decay.resize(total);
  q.cos_theta.resize(total);
  q.sin_theta.resize(total);
  for (std::size_t k = 0; k < total; ++k) {
    const double s = std::sin(q.theta[k] / 2);
    const double u = 2.0 * s * s;  // cosh t - 1
    const double sinh_t = std::sqrt(u * (u + 2.0));
    q.decay[k] = std::log1p(u + sinh_t);
    q.weight[k] *= kTwoOverPi / sinh_t;
    q.cos_theta[k] = std::cos(q.theta[k]);
    q.sin_theta[k] = std::sin(q.theta[k]);
  }
  return q;
}

std::size_t octant_size(std::int64_t extent) {
  return static_cast<std::size_t>((extent + 1) * (extent + 2) / 2);
}

}  // namespace

double asymptotic_a(double r) {
  if (!(r >= 1.0)) throw std::invalid_argument("asymptotic_a: r must be >= 1");
  return kTwoOverPi * std::log(r) + kKappa;
}

double refined_asymptotic_a(LatticePoint p) {
  const double x = static_cast<double>(p.x);
  const double y = static_cast<double>(p.y);
  const double r2 = x * x + y * y;
  const double x2 = x * x / r2;
  const double y2 = y * y / r2;
  const double c4 = x2 * x2 - 6.0 * x2 * y2 + y2 * y2;
  const double c8 = 2.0 * c4 * c4 - 1.0;
  const double inv_r2 = 1.0 / r2;
  return 0.5 * kTwoOverPi * std::log(r2) + kKappa -
         c4 * inv_r2 / (6.0 * std::numbers::pi) -
         (0.15 * c4 + (5.0 / 24.0) * c8) * inv_r2 * inv_r2 / std::numbers::pi;
}

PotentialKernel::PotentialKernel(double max_radius, std::int64_t extent, std::vector<double> table)
    : max_radius_(max_radius), extent_(extent), table_(std::move(table)) {
  measure_constants();
}

PotentialKernel PotentialKernel::build(double max_radius, const KernelBuildOptions& options) {
  if (!(max_radius >= 2.0)) throw std::invalid_argument("build_kernel: max_radius must be >= 2");
  const auto extent = static_cast<std::int64_t>(std::floor(max_radius));
  const double table_bytes = static_cast<double>(extent + 1) * static_cast<double>(extent + 2) / 2 * 8;
  const double node_bytes = 7.0 * 8.0 * kGaussPoints * static_cast<double>(extent / 2 + 9);
  if (table_bytes + node_bytes > static_cast<double>(options.memory_cap_bytes))
    throw ResourceError("build_kernel: table for radius " + std::to_string(max_radius) +
                        " exceeds the memory cap");

  const QuadratureNodes q = make_nodes(extent);
  const std::size_t m = q.theta.size();
  double total_weight = 0.0;
  for (double w : q.weight) total_weight += w;

  std::vector<double> table(octant_size(extent));
  std::vector<double> row_weight(m), re(m), im(m);
  // Row i holds a(i, j) for j = 0..i, using e^{-i t} cos(j theta).
  for (std::int64_t i = 0; i <= extent; ++i) {
    for (std::size_t k = 0; k < m; ++k) row_weight[k] = q.weight[k] * std::exp(-static_cast<double>(i) * q.decay[k]);
    for (std::int64_t j = 0; j <= i; ++j) {
      if (j % kResyncInterval == 0) {
        for (std::size_t k = 0; k < m; ++k) {
          re[k] = std::cos(static_cast<double>(j) * q.theta[k]);
          im[k] = std::sin(static_cast<double>(j) * q.theta[k]);
        }
      }
      const double s = simd::dot_and_rotate(row_weight, re, im, q.cos_theta, q.sin_theta);
      table[static_cast<std::size_t>(i * (i + 1) / 2 + j)] = total_weight - s;
    }
  }
  table[0] = 0.0;
  if (extent >= 1) table[1] = 1.0;  // a(1,0) = 1 exactly
  return PotentialKernel(max_radius, extent, std::move(table));
}

void PotentialKernel::measure_constants() {
  double c_asym = 0.0;
  double c_exp = 0.0;
  const double inner = std::max(10.0, max_radius_ / 2);
  for (std::int64_t i = 0; i <= extent_; ++i) {
    for (std::int64_t j = 0; j <= i; ++j) {
      const LatticePoint p{i, j};
      const double r = p.norm();
      if (r < 10.0 || r > max_radius_) continue;
      const double v = table_[static_cast<std::size_t>(i * (i + 1) / 2 + j)];
      c_asym = std::max(c_asym, std::abs(v - asymptotic_a(r)) * r * r);
      if (r >= inner) {
        const double r6 = r * r * r * r * r * r;
        c_exp = std::max(c_exp, std::abs(v - refined_asymptotic_a(p)) * r6);
      }
    }
  }
  asymptotic_constant_ = c_asym;
  expansion_constant_ = std::max(1.0, 2.0 * c_exp);
}

bool PotentialKernel::tabulated(LatticePoint p) const {
  return std::max(std::abs(p.x), std::abs(p.y)) <= extent_;
}

KernelValue PotentialKernel::query(LatticePoint p) const {
  if (tabulated(p)) return {(*this)(p), 0.0, true};
  const double r2 = static_cast<double>(p.x) * static_cast<double>(p.x) +
                    static_cast<double>(p.y) * static_cast<double>(p.y);
  const double v = refined_asymptotic_a(p);
  return {v, expansion_constant_ / (r2 * r2 * r2) + 16.0 * std::numeric_limits<double>::epsilon() * v, false};
}

void PotentialKernel::write_csv(std::ostream& out) const {
  out << "x,y,a\n";
  for (std::int64_t i = 0; i <= extent_; ++i)
    for (std::int64_t j = 0; j <= i; ++j)
      out << i << ',' << j << ',' << io::format_double(table_[static_cast<std::size_t>(i * (i + 1) / 2 + j)])
          << '\n';
}

PotentialKernel PotentialKernel::read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("x,y,a", 0) != 0)
    throw std::invalid_argument("kernel CSV: missing header 'x,y,a'");
  std::vector<std::tuple<std::int64_t, std::int64_t, double>> rows;
  std::int64_t extent = -1;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::string xs, ys, as;
    if (!std::getline(ss, xs, ',') || !std::getline(ss, ys, ',') || !std::getline(ss, as))
      throw std::invalid_argument("kernel CSV: malformed row '" + line + "'");
    const std::int64_t x = std::stoll(xs);
    const std::int64_t y = std::stoll(ys);
    if (y < 0 || y > x) throw std::invalid_argument("kernel CSV: row outside octant 0<=y<=x");
    rows.emplace_back(x, y, io::parse_double(as));
    extent = std::max(extent, x);
  }
  if (extent < 2) throw std::invalid_argument("kernel CSV: table too small");
  std::vector<double> table(octant_size(extent), std::nan(""));
  for (const auto& [x, y, a] : rows) table[static_cast<std::size_t>(x * (x + 1) / 2 + y)] = a;
  for (double v : table)
    if (std::isnan(v)) throw std::invalid_argument("kernel CSV: octant incomplete");
  return PotentialKernel(static_cast<double>(extent), extent, std::move(table));
}

PotentialKernel load_or_build_kernel(double max_radius) {
  const char* dir = std::getenv("CWALK_KERNEL_CACHE");
  if (dir == nullptr || *dir == '\0') return PotentialKernel::build(max_radius);
  const auto extent = static_cast<std::int64_t>(std::floor(max_radius));
  const std::filesystem::path path =
      std::filesystem::path(dir) / ("kernel_" + std::to_string(extent) + ".csv");
  if (std::ifstream in(path); in) return PotentialKernel::read_csv(in);
  PotentialKernel kernel = PotentialKernel::build(max_radius);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (std::ofstream out(path); out) kernel.write_csv(out);
  return kernel;
}

}  // namespace cwalk
