#include <numeric>

#include "emg/harness.hpp"

namespace emg {

namespace {

std::vector<double> beta_grid() {
  std::vector<double> out;
  for (int i = 0; i <= 20; ++i) out.push_back(i / 20.0);
  return out;
}

std::vector<double> r_grid() {
  std::vector<double> out{1.0, 1.05};
  for (int r = 2; r <= 11; ++r) out.push_back(r);
  return out;
}

FigurePreset make(std::string name, std::string title, FigureKind kind, std::vector<double> betas, std::vector<double> rs) {
  FigurePreset p;
  p.name = std::move(name);
  p.title = std::move(title);
  p.kind = kind;
  p.spec.beta_values = std::move(betas);
  p.spec.r_values = std::move(rs);
  p.spec.runs_per_point = 100;
  p.spec.base_seed = 1;
  return p;
}

}  // namespace

UnknownFigureError::UnknownFigureError(const std::string& name)
    : std::invalid_argument("unknown figure '" + name + "'; valid names: " +
                            std::accumulate(std::next(figure_names().begin()), figure_names().end(), figure_names().front(),
                                            [](std::string acc, const std::string& n) { return acc + ", " + n; })) {}

const std::vector<std::string>& figure_names() {
  static const std::vector<std::string> names{"fig1a", "fig1b", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7"};
  return names;
}

FigurePreset figure_preset(std::string_view name) {
  if (name == "fig1a") return make("fig1a", "Strategy distribution, beta = 0.2", FigureKind::histogram, {0.2}, {1.0, 2.0, 5.0});
  if (name == "fig1b") return make("fig1b", "Strategy distribution, beta = 0.8", FigureKind::histogram, {0.8}, {1.0, 1.05, 5.0});
  if (name == "fig2") {
    return make("fig2", "sigma_g versus beta", FigureKind::sigma_g, beta_grid(), {1.0, 1.02, 1.05, 1.2, 2.0, 5.0});
  }
  if (name == "fig3") {
    FigurePreset p = make("fig3", "Price trajectories", FigureKind::trajectories, {0.2, 0.8}, {1.0, 1.05, 1.2, 5.0});
    p.dump_trajectories = true;
    return p;
  }
  if (name == "fig4") return make("fig4", "sigma_P versus beta", FigureKind::sigma_p, beta_grid(), {1.0, 2.0, 5.0});
  if (name == "fig5") {
    return make("fig5", "sigma_P versus mean strategy, beta = 0.2", FigureKind::scatter_fit, {0.2}, {1.0, 2.0, 5.0});
  }
  if (name == "fig6") return make("fig6", "Predictability H versus R", FigureKind::predictability, {0.0, 0.2, 0.4}, r_grid());
  if (name == "fig7") return make("fig7", "Winning probability versus R", FigureKind::winning, {0.0, 0.2, 0.4}, r_grid());
  throw UnknownFigureError(std::string(name));
}

}  // namespace emg
