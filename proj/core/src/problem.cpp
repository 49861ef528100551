#include "gapolyak/problem.hpp"

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace gapolyak {

namespace {

void check_agent(const RegressionTask& task, int agent) {
  if (agent < 0 || agent >= task.num_agents)
    throw std::out_of_range("agent index out of range");
}

}  // namespace

RegressionTask generate_regression_task(int num_agents, int dim,
                                        int samples_per_agent,
                                        double noise_sigma,
                                        std::uint64_t rng_seed) {
  if (num_agents < 1 || dim < 1 || samples_per_agent < 1)
    throw std::invalid_argument("task dimensions must be positive");
  if (noise_sigma < 0.0)
    throw std::invalid_argument("noise_sigma must be nonnegative");

  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> standard_normal(0.0, 1.0);

  RegressionTask task;
  task.num_agents = num_agents;
  task.dim = dim;
  task.samples_per_agent = samples_per_agent;
  task.noise_sigma = noise_sigma;
  task.seed = rng_seed;

  task.true_param = Eigen::VectorXd(dim);
  for (int m = 0; m < dim; ++m) task.true_param(m) = standard_normal(rng);

  task.features.resize(num_agents);
  task.targets.resize(num_agents);
  task.optimal_values.resize(num_agents);
  for (int k = 0; k < num_agents; ++k) {
    Eigen::MatrixXd h(samples_per_agent, dim);
    for (int n = 0; n < samples_per_agent; ++n)
      for (int m = 0; m < dim; ++m) h(n, m) = standard_normal(rng);
    Eigen::VectorXd noise = Eigen::VectorXd::Zero(samples_per_agent);
    if (noise_sigma > 0.0)
      for (int n = 0; n < samples_per_agent; ++n)
        noise(n) = noise_sigma * standard_normal(rng);
    task.features[k] = h;
    task.targets[k] = h * task.true_param + noise;
    // The finite-sample value at w_true; exactly 0 in the noiseless case.
    task.optimal_values[k] =
        noise_sigma > 0.0
            ? noise.squaredNorm() / (2.0 * samples_per_agent)
            : 0.0;
  }
  return task;
}

OracleSample stochastic_oracle(const RegressionTask& task, int agent,
                               const Eigen::VectorXd& w, int sample_index) {
  check_agent(task, agent);
  if (sample_index < 0 || sample_index >= task.samples_per_agent)
    throw std::out_of_range("sample index out of range");
  const Eigen::VectorXd h = task.features[agent].row(sample_index).transpose();
  const double residual = task.targets[agent](sample_index) - h.dot(w);
  OracleSample out;
  out.agent = agent;
  out.sample_index = sample_index;
  out.objective_value = 0.5 * residual * residual;
  out.gradient = -h * residual;
  return out;
}

double full_objective(const RegressionTask& task, int agent,
                      const Eigen::VectorXd& w) {
  check_agent(task, agent);
  const Eigen::VectorXd residual =
      task.targets[agent] - task.features[agent] * w;
  return residual.squaredNorm() / (2.0 * task.samples_per_agent);
}

Eigen::VectorXd full_gradient(const RegressionTask& task, int agent,
                              const Eigen::VectorXd& w) {
  check_agent(task, agent);
  const Eigen::VectorXd residual =
      task.targets[agent] - task.features[agent] * w;
  return -(task.features[agent].transpose() * residual) /
         static_cast<double>(task.samples_per_agent);
}

double smoothness_constant(const RegressionTask& task, int agent) {
  check_agent(task, agent);
  const Eigen::MatrixXd hessian =
      task.features[agent].transpose() * task.features[agent] /
      static_cast<double>(task.samples_per_agent);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hessian);
  return solver.eigenvalues().maxCoeff();
}

void save_task_csv(const RegressionTask& task, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  char buf[32];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  out << "agents,dim,samples,sigma,seed\n";
  out << task.num_agents << ',' << task.dim << ',' << task.samples_per_agent
      << ',' << num(task.noise_sigma) << ',' << task.seed << '\n';
  out << "true_param";
  for (int m = 0; m < task.dim; ++m) out << ',' << num(task.true_param(m));
  out << "\noptimal_values";
  for (double v : task.optimal_values) out << ',' << num(v);
  out << '\n';
  for (int k = 0; k < task.num_agents; ++k)
    for (int n = 0; n < task.samples_per_agent; ++n) {
      out << k << ',' << n;
      for (int m = 0; m < task.dim; ++m)
        out << ',' << num(task.features[k](n, m));
      out << ',' << num(task.targets[k](n)) << '\n';
    }
}

RegressionTask load_task_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  auto next_fields = [&in, &path]() {
    std::string line;
    if (!std::getline(in, line))
      throw std::runtime_error("truncated task file " + path);
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    return fields;
  };

  next_fields();  // header labels
  auto dims = next_fields();
  if (dims.size() != 5) throw std::runtime_error("bad task header in " + path);
  RegressionTask task;
  task.num_agents = std::stoi(dims[0]);
  task.dim = std::stoi(dims[1]);
  task.samples_per_agent = std::stoi(dims[2]);
  task.noise_sigma = std::stod(dims[3]);
  task.seed = std::stoull(dims[4]);

  auto wline = next_fields();
  if (wline.size() != static_cast<std::size_t>(task.dim) + 1)
    throw std::runtime_error("bad true_param row in " + path);
  task.true_param = Eigen::VectorXd(task.dim);
  for (int m = 0; m < task.dim; ++m) task.true_param(m) = std::stod(wline[m + 1]);

  auto oline = next_fields();
  if (oline.size() != static_cast<std::size_t>(task.num_agents) + 1)
    throw std::runtime_error("bad optimal_values row in " + path);
  task.optimal_values.resize(task.num_agents);
  for (int k = 0; k < task.num_agents; ++k)
    task.optimal_values[k] = std::stod(oline[k + 1]);

  task.features.assign(task.num_agents,
                       Eigen::MatrixXd(task.samples_per_agent, task.dim));
  task.targets.assign(task.num_agents,
                      Eigen::VectorXd(task.samples_per_agent));
  for (int k = 0; k < task.num_agents; ++k)
    for (int n = 0; n < task.samples_per_agent; ++n) {
      auto row = next_fields();
      if (row.size() != static_cast<std::size_t>(task.dim) + 3 ||
          std::stoi(row[0]) != k || std::stoi(row[1]) != n)
        throw std::runtime_error("bad data row in " + path);
      for (int m = 0; m < task.dim; ++m)
        task.features[k](n, m) = std::stod(row[m + 2]);
      task.targets[k](n) = std::stod(row[task.dim + 2]);
    }
  return task;
}

}  // namespace gapolyak
