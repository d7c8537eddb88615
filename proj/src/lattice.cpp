#include "brw/lattice.hpp"

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace brw {

std::vector<Site> neighborhood(int dim) {
  check_dim(dim);
  std::vector<Site> out;
  out.reserve(stencil_size(dim));
  out.push_back(Site::Zero());
  for (int k = 0; k < dim; ++k) {
    Site e = Site::Zero();
    e(k) = -1;
    out.push_back(e);
    e(k) = 1;
    out.push_back(e);
  }
  return out;
}

Field transition_field(int n, int dim, std::optional<int> clamp) {
  if (n < 0) throw std::invalid_argument("step count must be >= 0");
  Field f = Field::delta(dim);
  for (int i = 0; i < n; ++i) f = apply_markov(f, clamp);
  return f;
}

Site sample_step(int dim, Rng& rng) {
  std::uniform_int_distribution<int> pick(0, 2 * dim);
  const int j = pick(rng);
  Site e = Site::Zero();
  if (j > 0) e((j - 1) / 2) = (j % 2 == 1) ? -1 : 1;
  return e;
}

std::vector<Site> sample_srw(int n, int dim, Rng& rng) {
  check_dim(dim);
  if (n < 0) throw std::invalid_argument("step count must be >= 0");
  std::vector<Site> path;
  path.reserve(n + 1);
  path.push_back(Site::Zero());
  for (int i = 0; i < n; ++i) path.push_back(path.back() + sample_step(dim, rng));
  return path;
}

void write_field_csv(std::ostream& os, const Field& f) {
  os << "# dim=" << f.dim() << " n=" << f.steps() << " radius=" << f.radius()
     << " tail_bound=" << std::setprecision(17) << f.tail_bound() << '\n';
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const Site x = f.site(i);
    for (int k = 0; k < f.dim(); ++k) os << x(k) << ',';
    os << std::setprecision(17) << f.values()(i) << '\n';
  }
}

Field read_field_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0) {
    throw std::runtime_error("field csv: missing header");
  }
  int dim = 0, n = 0, radius = -1;
  double tail = 0.0;
  {
    std::istringstream hs(line.substr(2));
    std::string tok;
    while (hs >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = tok.substr(0, eq);
      const std::string val = tok.substr(eq + 1);
      if (key == "dim") dim = std::stoi(val);
      else if (key == "n") n = std::stoi(val);
      else if (key == "radius") radius = std::stoi(val);
      else if (key == "tail_bound") tail = std::stod(val);
    }
  }
  Field f(dim, radius);
  f.set_steps(n);
  f.set_tail_bound(tail);
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    Site x = Site::Zero();
    std::string cell;
    for (int k = 0; k < dim; ++k) {
      std::getline(ls, cell, ',');
      x(k) = std::stoi(cell);
    }
    std::getline(ls, cell);
    f.at(x) = std::stod(cell);
  }
  return f;
}

}  // namespace brw
