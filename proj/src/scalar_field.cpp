#include "asep/scalar_field.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace asep {

int64_t ScalarField::size() const {
  int64_t n = 1;
  for (const auto& a : axes) n *= a.n;
  return n;
}

bool ScalarField::same_grid(const ScalarField& other) const {
  if (dim != other.dim) return false;
  for (int i = 0; i < dim; ++i) {
    const auto& a = axes[i];
    const auto& b = other.axes[i];
    if (a.n != b.n || a.periodic != b.periodic) return false;
    if (std::fabs(a.origin - b.origin) > 1e-12) return false;
    if (std::fabs(a.spacing - b.spacing) > 1e-12) return false;
  }
  return true;
}

double& ScalarField::at(std::span<const int> idx) {
  int64_t flat = 0;
  for (int i = 0; i < dim; ++i) flat = flat * axes[i].n + idx[i];
  return values[size_t(flat)];
}

double ScalarField::at(std::span<const int> idx) const {
  return const_cast<ScalarField*>(this)->at(idx);
}

ScalarField ScalarField::zeros(const std::vector<Axis>& axes) {
  ScalarField f;
  f.dim = int(axes.size());
  f.axes = axes;
  f.values.assign(size_t(f.size()), 0.0);
  return f;
}

ScalarField ScalarField::lattice_grid(const Lattice& lattice) {
  std::vector<Axis> axes(lattice.dim());
  const int side = lattice.side();
  for (int i = 0; i < lattice.dim(); ++i) {
    Axis& a = axes[i];
    a.n = side;
    if (i == 0 && !lattice.wraps_axis0()) {
      a.origin = -1.0;
      a.spacing = lattice.eps();
      a.periodic = false;
    } else {
      a.spacing = 2.0 / side;
      a.origin = -double(lattice.inv_eps()) * a.spacing;
      a.periodic = true;
    }
  }
  ScalarField f = zeros(axes);
  f.meta.eps = lattice.eps();
  return f;
}

void write_field_csv(const std::string& path, const ScalarField& field) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("field: cannot open " + path);
  std::fprintf(f, "# columns: u1..u%d,value\n", field.dim);
  std::vector<int> idx(field.dim, 0);
  const int64_t n = field.size();
  for (int64_t flat = 0; flat < n; ++flat) {
    for (int i = 0; i < field.dim; ++i)
      std::fprintf(f, "%.17g,", field.node_position(i, idx[i]));
    std::fprintf(f, "%.17g\n", field.values[size_t(flat)]);
    for (int i = field.dim - 1; i >= 0; --i) {
      if (++idx[i] < field.axes[i].n) break;
      idx[i] = 0;
    }
  }
  std::fclose(f);

  nlohmann::json side;
  side["dim"] = field.dim;
  auto& ax = side["axes"] = nlohmann::json::array();
  for (const auto& a : field.axes)
    ax.push_back({{"n", a.n},
                  {"origin", a.origin},
                  {"spacing", a.spacing},
                  {"periodic", a.periodic}});
  nlohmann::json meta = nlohmann::json::object();
  if (field.meta.eps) meta["eps"] = *field.meta.eps;
  if (field.meta.block_radius) meta["block_radius"] = *field.meta.block_radius;
  if (field.meta.time) meta["time"] = *field.meta.time;
  if (field.meta.seed) meta["seed"] = *field.meta.seed;
  if (!field.meta.variant.empty()) meta["variant"] = field.meta.variant;
  side["meta"] = meta;
  std::ofstream out(path + ".json");
  if (!out) throw std::runtime_error("field: cannot open " + path + ".json");
  out << side.dump(2) << "\n";
}

ScalarField read_field_csv(const std::string& path) {
  std::ifstream side_in(path + ".json");
  if (!side_in)
    throw std::runtime_error("field: missing sidecar " + path + ".json");
  nlohmann::json side;
  side_in >> side;

  ScalarField field;
  field.dim = side.at("dim").get<int>();
  for (const auto& a : side.at("axes")) {
    ScalarField::Axis axis;
    axis.n = a.at("n").get<int>();
    axis.origin = a.at("origin").get<double>();
    axis.spacing = a.at("spacing").get<double>();
    axis.periodic = a.at("periodic").get<bool>();
    field.axes.push_back(axis);
  }
  const auto& meta = side.at("meta");
  if (meta.contains("eps")) field.meta.eps = meta["eps"].get<double>();
  if (meta.contains("block_radius"))
    field.meta.block_radius = meta["block_radius"].get<int>();
  if (meta.contains("time")) field.meta.time = meta["time"].get<double>();
  if (meta.contains("seed")) field.meta.seed = meta["seed"].get<uint64_t>();
  if (meta.contains("variant"))
    field.meta.variant = meta["variant"].get<std::string>();

  field.values.reserve(size_t(field.size()));
  std::ifstream in(path);
  if (!in) throw std::runtime_error("field: cannot open " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    size_t pos = line.rfind(',');
    if (pos == std::string::npos)
      throw std::runtime_error("field: malformed row in " + path);
    field.values.push_back(std::strtod(line.c_str() + pos + 1, nullptr));
  }
  if (int64_t(field.values.size()) != field.size())
    throw std::runtime_error("field: row count does not match grid in " + path);
  return field;
}

}  // namespace asep
