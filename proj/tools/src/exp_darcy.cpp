#include "common.hpp"
#include "experiments.hpp"

namespace gpbayes::cli {

namespace {

constexpr const char* kSection = "darcy";

class DarcyDemo final : public Experiment {
 public:
  explicit DarcyDemo(const Config& cfg) : model_(read_darcy(cfg, kSection)) {
    k_ = read_vector(cfg, kSection, "permeability", static_cast<int>(model_.parameter_dim()),
                     std::vector<double>{1.0, 2.0});
    if ((k_.array() <= 0.0).any()) throw cfg.error(kSection, "permeability", "must be positive");
  }

  void run(OutputDir& out, const RunOptions& /*options*/) override {
    const DarcySolution sol = solve_darcy(model_, k_);
    std::vector<Row> p;
    for (Eigen::Index i = 0; i < sol.nodes.size(); ++i) p.push_back({cell(sol.nodes[i]), cell(sol.pressure[i])});
    out.csv("pressure.csv", {"x", "pressure"}, p);

    const Eigen::VectorXd flux = sol.fluxes();
    std::vector<Row> c;
    for (Eigen::Index i = 0; i < sol.face_permeability.size(); ++i) {
      c.push_back({cell(sol.nodes[i]), cell(sol.nodes[i + 1]), cell(sol.face_permeability[i]), cell(flux[i])});
    }
    out.csv("permeability.csv", {"x_left", "x_right", "permeability", "flux"}, c);

    std::vector<Row> o;
    for (std::size_t i = 0; i < model_.observation_points.size(); ++i) {
      o.push_back({cell(model_.observation_points[i]), cell(sol.observations[static_cast<Eigen::Index>(i)])});
    }
    out.csv("observations.csv", {"x", "pressure"}, o);
    out.key_values("diagnostics.txt", {{"cells", cell(model_.cells)},
                                       {"layers", cell(model_.parameter_dim())},
                                       {"flux_min", cell(flux.minCoeff())},
                                       {"flux_max", cell(flux.maxCoeff())}});
  }

 private:
  DarcyModel model_;
  Eigen::VectorXd k_;
};

}  // namespace

std::unique_ptr<Experiment> make_darcy_demo(const Config& cfg) { return std::make_unique<DarcyDemo>(cfg); }

}  // namespace gpbayes::cli
