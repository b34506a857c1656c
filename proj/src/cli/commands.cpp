#include "mtlkd/cli/commands.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>

#include "mtlkd/cli/config.hpp"
#include "mtlkd/core/binary_io.hpp"
#include "mtlkd/core/error.hpp"
#include "mtlkd/data/benchmark.hpp"
#include "mtlkd/data/dataset.hpp"
#include "mtlkd/policy/policy.hpp"
#include "mtlkd/search/exact.hpp"
#include "mtlkd/search/r3c.hpp"
#include "mtlkd/train/checkpoint.hpp"
#include "mtlkd/train/parallel.hpp"
#include "mtlkd/train/training.hpp"

namespace mtlkd::cli {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

VariantSpec variant_key(Settings& s, const std::string& key, const std::string& fallback) {
  const std::string name = s.str(key, fallback);
  const auto v = VariantSpec::parse(name);
  if (!v) throw ConfigError("config: unknown variant '" + name + "'");
  return *v;
}

int positive(Settings& s, const std::string& key, long long fallback) {
  const long long v = s.integer(key, fallback);
  if (v < 1 || v > 1'000'000'000) throw ConfigError("config: " + key + " must be positive");
  return static_cast<int>(v);
}

void write_text(const std::string& path, const std::string& text) {
  write_file(path, std::vector<char>(text.begin(), text.end()));
}

std::string report_header(const std::string& verb, std::uint64_t seed, const Settings& s) {
  return "# mtlkd " + verb + "\n# seed=" + std::to_string(seed) + "\n# config_hash=" +
         hex64(s.hash()) + "\n";
}

// A loaded model together with the variants it was trained on.
struct LoadedModel {
  std::unique_ptr<policy::Policy> policy;
  train::ModelKind kind = train::ModelKind::kTeacher;
  std::vector<VariantSpec> seen;
};

LoadedModel load_model(const std::string& path) {
  const train::Checkpoint ck = train::load_checkpoint(path);
  LoadedModel m;
  m.kind = ck.kind;
  if (ck.kind == train::ModelKind::kTeacher) {
    m.policy = std::make_unique<policy::TeacherModel>(train::teacher_from(ck));
    m.seen = {ck.task};
  } else {
    m.policy = std::make_unique<policy::StudentModel>(train::student_from(ck));
    m.seen = ck.tasks;
  }
  return m;
}

// Zero-shot flag for a student; a teacher refuses any other variant.
bool route_variant(const LoadedModel& m, VariantSpec v) {
  for (const auto& s : m.seen) {
    if (s == v) return false;
  }
  if (m.kind == train::ModelKind::kTeacher) {
    throw ConfigError("eval: teacher trained on " + m.seen.front().name() +
                      " cannot solve " + v.name());
  }
  return true;
}

struct SolveMode {
  bool r3c = false;
  int iterations = 0;
  std::string text;
};

SolveMode parse_mode(const std::string& text) {
  SolveMode m;
  m.text = text;
  if (text == "st") return m;
  if (text.rfind("r3c:", 0) == 0) {
    m.r3c = true;
    try {
      std::size_t used = 0;
      m.iterations = std::stoi(text.substr(4), &used);
      if (used == text.size() - 4 && m.iterations >= 0) return m;
    } catch (const std::exception&) {
    }
  }
  throw ConfigError("config: mode must be st or r3c:K, got '" + text + "'");
}

double solve_one(const policy::Policy& model, const Instance& inst, const SolveMode& mode,
                 std::uint64_t seed, std::uint64_t index) {
  Rng rng(seed, index);
  const Solution st = policy::construct_with(model, inst, rng).solution;
  if (!mode.r3c) return evaluate(inst, st);
  search::R3CConfig cfg;
  cfg.iterations = mode.iterations;
  cfg.seed = Rng(seed, index).next_u64();
  return search::r3c_run(inst, st, cfg, &model).objective;
}

std::vector<double> solve_all(const policy::Policy& model, const std::vector<Instance>& instances,
                              const SolveMode& mode, std::uint64_t seed, int threads) {
  std::vector<double> obj(instances.size());
  train::parallel_for(static_cast<int>(instances.size()), threads, [&](int i) {
    obj[i] = solve_one(model, instances[i], mode, seed, static_cast<std::uint64_t>(i));
  });
  return obj;
}

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

std::string pad(const std::string& s, std::size_t w) {
  return s.size() >= w ? s + " " : s + std::string(w - s.size(), ' ');
}

// Aligned rendering of tab-separated rows.
std::string text_table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& r : rows) {
    width.resize(std::max(width.size(), r.size()), 0);
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size() + 2);
  }
  std::string out;
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) out += pad(r[c], width[c]);
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += "\n";
  }
  return out;
}

std::string tsv(const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) out += (c ? "\t" : "") + r[c];
    out += "\n";
  }
  return out;
}

// ---- gen

int cmd_gen(Settings& s, std::ostream& out) {
  const VariantSpec v = variant_key(s, "variant", "CVRP");
  const int n = positive(s, "n", 100);
  const int count = positive(s, "count", 1000);
  const std::uint64_t seed = s.seed();
  const std::string path = s.str("out");
  const std::string optima = s.str("optima", "");
  const int threads = positive(s, "threads", 1);
  s.reject_unused();
  if (!optima.empty() && n > search::kExactMaxCustomers) {
    throw ConfigError("gen: optima need n <= " + std::to_string(search::kExactMaxCustomers));
  }

  const data::Dataset ds = data::generate_dataset(v, n, count, seed);
  data::save_dataset(path, ds);
  out << report_header("gen", seed, s) << "wrote " << count << " " << v.name() << " instances (n="
      << n << ") to " << path << "\n";
  if (!optima.empty()) {
    std::vector<double> best(ds.instances.size());
    train::parallel_for(count, threads,
                        [&](int i) { best[i] = search::exact_solve(ds.instances[i]).objective; });
    write_baseline(optima, best);
    out << "wrote optimal objectives to " << optima << "\n";
  }
  return kExitOk;
}

// ---- training

train::TrainConfig read_train_config(Settings& s, bool student) {
  const std::string preset = s.str("preset", "toy");
  train::TrainConfig c;
  if (preset == "toy") {
    c = student ? train::TrainConfig::toy_student() : train::TrainConfig::toy_teacher();
  } else if (preset == "paper") {
    c = student ? train::TrainConfig::paper_student() : train::TrainConfig::paper_teacher();
  } else {
    throw ConfigError("config: preset must be toy or paper");
  }
  c.epochs = static_cast<int>(s.integer("epochs", c.epochs));
  c.instances_per_epoch = positive(s, "instances_per_epoch", c.instances_per_epoch);
  c.n = positive(s, "n", c.n);
  c.lr0 = s.real("lr0", c.lr0);
  c.lr_hold = static_cast<int>(s.integer("lr_hold", c.lr_hold));
  c.lr_period = static_cast<int>(s.integer("lr_period", c.lr_period));
  c.seed = s.seed(c.seed);
  c.threads = positive(s, "threads", c.threads);
  if (student) {
    c.per_task_batch = positive(s, "per_task_batch", c.per_task_batch);
    const std::string traj = s.str("kd_trajectory", "sample");
    if (traj != "sample" && traj != "greedy") {
      throw ConfigError("config: kd_trajectory must be sample or greedy");
    }
    c.kd_trajectory = traj == "sample" ? DecodeMode::kSample : DecodeMode::kGreedy;
    c.starts = 1;  // unused by distillation
  } else {
    c.batch_size = positive(s, "batch_size", c.batch_size);
    c.starts = positive(s, "starts", c.starts);
  }
  return c;
}

policy::TeacherConfig read_teacher_arch(Settings& s, bool paper) {
  policy::TeacherConfig a = paper ? policy::TeacherConfig::paper() : policy::TeacherConfig{};
  a.encoder_layers = positive(s, "encoder_layers", a.encoder_layers);
  a.embed_dim = positive(s, "embed_dim", a.embed_dim);
  a.heads = positive(s, "heads", a.heads);
  a.ff_hidden = positive(s, "ff_hidden", a.ff_hidden);
  return a;
}

policy::StudentConfig read_student_arch(Settings& s, bool paper) {
  policy::StudentConfig a = paper ? policy::StudentConfig::paper(128) : policy::StudentConfig{};
  a.encoder_layers = positive(s, "encoder_layers", a.encoder_layers);
  a.decoder_layers = positive(s, "decoder_layers", a.decoder_layers);
  a.embed_dim = positive(s, "embed_dim", a.embed_dim);
  a.heads = positive(s, "heads", a.heads);
  a.ff_hidden = positive(s, "ff_hidden", a.ff_hidden);
  return a;
}

// Appends to the log when resuming, otherwise starts it with a header.
struct LogSink {
  std::ofstream file;
  std::ostream& out;
  LogSink(const std::string& path, bool append, std::ostream& o) : out(o) {
    if (path.empty()) return;
    file.open(path, append ? std::ios::app : std::ios::trunc);
    if (!file) throw DataError("cannot write " + path);
    if (!append) file << "epoch\tloss\tlr\twallclock\n";
  }
  void operator()(const train::EpochLog& l) {
    const std::string line = train::format_log_line(l);
    out << line << "\n";
    if (file.is_open()) file << line << "\n" << std::flush;
  }
};

int cmd_train_teacher(Settings& s, std::ostream& out) {
  const std::string resume = s.str("resume", "");
  const VariantSpec task = variant_key(s, "task", "CVRP");
  const bool paper = s.str("preset", "toy") == "paper";
  const train::TrainConfig cfg = read_train_config(s, false);
  const policy::TeacherConfig arch = read_teacher_arch(s, paper);
  const std::string ck_path = s.str("out");
  const std::string log_path = s.str("log", "");
  const int every = static_cast<int>(s.integer("checkpoint_every", 0));
  s.reject_unused();
  cfg.validate();
  arch.validate();

  std::optional<policy::TeacherModel> model;
  train::TrainState state;
  if (!resume.empty()) {
    const train::Checkpoint ck = train::load_checkpoint(resume);
    if (ck.kind != train::ModelKind::kTeacher || !(ck.task == task)) {
      throw ConfigError("train-teacher: resume checkpoint is not a " + task.name() + " teacher");
    }
    model.emplace(train::teacher_from(ck));
    state = train::restore_state(ck);
  } else {
    model.emplace(arch, cfg.seed);
    state = train::initial_train_state(model->params(), cfg.seed);
  }
  out << report_header("train-teacher", cfg.seed, s);
  LogSink log(log_path, !resume.empty(), out);
  while (state.epoch < cfg.epochs) {
    const int until = every > 0 ? std::min(cfg.epochs, state.epoch + every) : cfg.epochs;
    train::train_teacher(*model, task, cfg, state, until, std::ref(log));
    if (until < cfg.epochs) train::save_checkpoint(ck_path, train::make_checkpoint(*model, task, cfg, state));
  }
  train::save_checkpoint(ck_path, train::make_checkpoint(*model, task, cfg, state));
  out << "checkpoint " << ck_path << " at epoch " << state.epoch << "\n";
  return kExitOk;
}

int cmd_train_student(Settings& s, std::ostream& out) {
  const std::string resume = s.str("resume", "");
  std::vector<VariantSpec> tasks;
  for (const auto& name : s.list("tasks", "CVRP,OVRP,VRPB,VRPL,VRPTW,OVRPTW")) {
    const auto v = VariantSpec::parse(name);
    if (!v) throw ConfigError("config: unknown variant '" + name + "'");
    tasks.push_back(*v);
  }
  if (tasks.empty()) throw ConfigError("train-student: no seen tasks");
  const bool paper = s.str("preset", "toy") == "paper";
  train::TrainConfig cfg = read_train_config(s, true);
  cfg.batch_size = cfg.per_task_batch * static_cast<int>(tasks.size());
  const policy::StudentConfig arch = read_student_arch(s, paper);
  const std::vector<std::string> teacher_paths = s.list("teachers", "");
  const std::string ck_path = s.str("out");
  const std::string log_path = s.str("log", "");
  const int every = static_cast<int>(s.integer("checkpoint_every", 0));
  s.reject_unused();
  cfg.validate();
  arch.validate();

  std::vector<policy::TeacherModel> teachers;
  std::vector<VariantSpec> teacher_tasks;
  teachers.reserve(teacher_paths.size());
  for (const auto& p : teacher_paths) {
    const train::Checkpoint ck = train::load_checkpoint(p);
    if (ck.kind != train::ModelKind::kTeacher) throw ConfigError("train-student: " + p + " is not a teacher");
    if (std::find(tasks.begin(), tasks.end(), ck.task) == tasks.end()) {
      throw ConfigError("train-student: teacher " + p + " is for " + ck.task.name() +
                        ", which is not a seen task");
    }
    if (std::find(teacher_tasks.begin(), teacher_tasks.end(), ck.task) != teacher_tasks.end()) {
      throw ConfigError("train-student: two teachers for " + ck.task.name());
    }
    teachers.push_back(train::teacher_from(ck));
    teacher_tasks.push_back(ck.task);
  }
  std::vector<train::TeacherSlot> slots;
  for (const auto& t : tasks) {
    const auto it = std::find(teacher_tasks.begin(), teacher_tasks.end(), t);
    if (it == teacher_tasks.end()) {
      throw ConfigError("train-student: missing teacher checkpoint for seen task " + t.name());
    }
    slots.push_back({t, &teachers[it - teacher_tasks.begin()]});
  }

  std::optional<policy::StudentModel> model;
  train::TrainState state;
  if (!resume.empty()) {
    const train::Checkpoint ck = train::load_checkpoint(resume);
    if (ck.kind != train::ModelKind::kStudent || ck.tasks != tasks) {
      throw ConfigError("train-student: resume checkpoint does not match the seen tasks");
    }
    model.emplace(train::student_from(ck));
    state = train::restore_state(ck);
  } else {
    model.emplace(arch, cfg.seed);
    state = train::initial_train_state(model->params(), cfg.seed);
  }
  out << report_header("train-student", cfg.seed, s);
  LogSink log(log_path, !resume.empty(), out);
  while (state.epoch < cfg.epochs) {
    const int until = every > 0 ? std::min(cfg.epochs, state.epoch + every) : cfg.epochs;
    train::train_student(*model, slots, cfg, state, until, std::ref(log));
    if (until < cfg.epochs) train::save_checkpoint(ck_path, train::make_checkpoint(*model, tasks, cfg, state));
  }
  train::save_checkpoint(ck_path, train::make_checkpoint(*model, tasks, cfg, state));
  out << "checkpoint " << ck_path << " at epoch " << state.epoch << "\n";
  return kExitOk;
}

// ---- eval

int cmd_eval(Settings& s, std::ostream& out) {
  const std::string model_path = s.str("model");
  const std::vector<std::string> datasets = s.list("datasets", "");
  const std::vector<std::string> baselines = s.list("baselines", "");
  const SolveMode mode = parse_mode(s.str("mode", "st"));
  const std::uint64_t seed = s.seed();
  const int threads = positive(s, "threads", 1);
  const std::string report = s.str("report", "");
  s.reject_unused();
  if (datasets.empty()) throw ConfigError("eval: no datasets");
  if (!baselines.empty() && baselines.size() != datasets.size()) {
    throw ConfigError("eval: baselines must match datasets one to one");
  }

  const LoadedModel model = load_model(model_path);
  std::vector<std::vector<std::string>> rows = {
      {"variant", "n", "count", "mode", "mean_objective", "mean_baseline", "gap_pct", "zero_shot",
       "wallclock"}};
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    const data::Dataset ds = data::load_dataset(datasets[d]);
    const bool zero_shot = route_variant(model, ds.header.variant);
    const auto t0 = Clock::now();
    const std::vector<double> obj = solve_all(*model.policy, ds.instances, mode, seed, threads);
    const double wall = seconds_since(t0);
    std::string base_col = "-", gap_col = "-";
    if (!baselines.empty()) {
      const std::vector<double> base = read_baseline(baselines[d]);
      if (base.size() != obj.size()) {
        throw DataError("eval: " + baselines[d] + " has " + std::to_string(base.size()) +
                        " objectives for " + std::to_string(obj.size()) + " instances");
      }
      base_col = fmt("%.6f", mean(base));
      gap_col = fmt("%.2f", 100.0 * gap(mean(obj), mean(base)));
    }
    rows.push_back({ds.header.variant.name(), std::to_string(ds.header.n),
                    std::to_string(obj.size()), mode.text, fmt("%.6f", mean(obj)), base_col,
                    gap_col, zero_shot ? "1" : "0", fmt("%.3f", wall)});
  }
  const std::string header = report_header("eval", seed, s);
  out << header << text_table(rows);
  if (!report.empty()) write_text(report, header + tsv(rows));
  return kExitOk;
}

// ---- bench

int cmd_bench(Settings& s, std::ostream& out, std::ostream& err) {
  const std::vector<std::string> files = s.list("files", "");
  const std::string optima_path = s.str("optima", "");
  const std::string model_path = s.str("model");
  const SolveMode mode = parse_mode(s.str("mode", "st"));
  const std::uint64_t seed = s.seed();
  const int threads = positive(s, "threads", 1);
  const std::string report = s.str("report", "");
  s.reject_unused();
  if (files.empty()) throw ConfigError("bench: no files");

  const LoadedModel model = load_model(model_path);
  const std::map<std::string, double> optima =
      optima_path.empty() ? std::map<std::string, double>{} : read_optima(optima_path);
  std::vector<Instance> instances;
  for (const auto& f : files) {
    try {
      Instance inst = data::parse_benchmark(read_file(f));
      route_variant(model, inst.variant);
      instances.push_back(std::move(inst));
    } catch (const DataError& e) {
      err << "skipping " << f << ": " << e.what() << "\n";
    }
  }
  std::vector<double> obj(instances.size());
  std::vector<double> wall(instances.size());
  train::parallel_for(static_cast<int>(instances.size()), threads, [&](int i) {
    const auto t0 = Clock::now();
    obj[i] = solve_one(*model.policy, instances[i], mode, seed, static_cast<std::uint64_t>(i)) *
             instances[i].distance_scale;
    wall[i] = seconds_since(t0);
  });
  std::vector<std::vector<std::string>> rows = {
      {"instance", "variant", "n", "mode", "objective", "optimum", "gap_pct", "wallclock"}};
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto it = optima.find(instances[i].name);
    const bool known = it != optima.end();
    rows.push_back({instances[i].name, instances[i].variant.name(),
                    std::to_string(instances[i].num_nodes() - 1), mode.text, fmt("%.4f", obj[i]),
                    known ? fmt("%.4f", it->second) : "-",
                    known ? fmt("%.2f", 100.0 * gap(obj[i], it->second)) : "-",
                    fmt("%.3f", wall[i])});
  }
  const std::string header = report_header("bench", seed, s);
  out << header << text_table(rows);
  if (!report.empty()) write_text(report, header + tsv(rows));
  return kExitOk;
}

// ---- r3c-trace

int cmd_r3c_trace(Settings& s, std::ostream& out) {
  const std::string dataset = s.str("dataset");
  const int index = static_cast<int>(s.integer("index", 0));
  const std::string backend = s.str("reoptimizer", "model");
  const std::string model_path = s.str("model", "");
  search::R3CConfig cfg;
  cfg.iterations = static_cast<int>(s.integer("iterations", 200));
  const std::string segment = s.str("segment", "random");
  cfg.min_customers = positive(s, "min_customers", cfg.min_customers);
  cfg.max_customers = positive(s, "max_customers", cfg.max_customers);
  cfg.enable_reorder = s.flag("reorder", true);
  cfg.enable_reversal = s.flag("reversal", true);
  const std::uint64_t seed = s.seed();
  const std::string trace_path = s.str("out", "");
  positive(s, "threads", 1);  // accepted for uniformity; one instance runs on one thread
  s.reject_unused();
  if (cfg.iterations < 0) throw ConfigError("config: iterations must be >= 0");
  if (segment == "random") {
    cfg.mode = search::SegmentMode::kRandom;
  } else if (segment.rfind("fixed:", 0) == 0) {
    cfg.mode = search::SegmentMode::kFixed;
    try {
      cfg.fixed_k = std::stoi(segment.substr(6));
    } catch (const std::exception&) {
      throw ConfigError("config: segment must be random or fixed:K");
    }
    if (cfg.fixed_k < 1) throw ConfigError("config: fixed segment length must be positive");
  } else {
    throw ConfigError("config: segment must be random or fixed:K");
  }
  if (backend == "model") {
    cfg.reoptimizer = search::Reoptimizer::kModel;
    if (model_path.empty()) throw ConfigError("r3c-trace: the model re-optimizer needs model=");
  } else if (backend == "exact") {
    cfg.reoptimizer = search::Reoptimizer::kExact;
  } else {
    throw ConfigError("config: reoptimizer must be model or exact");
  }
  cfg.seed = seed;

  const data::Dataset ds = data::load_dataset(dataset);
  if (index < 0 || index >= static_cast<int>(ds.instances.size())) {
    throw ConfigError("r3c-trace: index out of range");
  }
  const Instance& inst = ds.instances[index];
  std::optional<LoadedModel> model;
  if (!model_path.empty()) {
    model.emplace(load_model(model_path));
    route_variant(*model, inst.variant);
  }
  Rng rng(seed, static_cast<std::uint64_t>(index));
  const Solution initial =
      model ? policy::construct_with(*model->policy, inst, rng).solution
            : construct(inst, uniform_policy(), rng, {DecodeMode::kSample}).solution;
  const double initial_obj = evaluate(inst, initial);
  const search::R3CResult r =
      search::r3c_run(inst, initial, cfg, model ? model->policy.get() : nullptr);
  const std::string header = report_header("r3c-trace", seed, s);
  const std::string body = search::trace_tsv(initial_obj, r.trace);
  if (!trace_path.empty()) write_text(trace_path, header + body);
  out << header << "initial " << fmt("%.6f", initial_obj) << " final " << fmt("%.6f", r.objective)
      << " accepted " << r.accepted << "/" << cfg.iterations << "\n";
  return kExitOk;
}

}  // namespace

double gap(double objective, double baseline) { return (objective - baseline) / baseline; }

std::vector<double> read_baseline(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<double> v;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::istringstream ls(line);
    double x;
    if (!(ls >> x)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw DataError(path + ": not a number: '" + line + "'");
    }
    v.push_back(x);
  }
  return v;
}

void write_baseline(const std::string& path, const std::vector<double>& objectives) {
  std::string text;
  for (double x : objectives) text += fmt("%.9f", x) + "\n";
  write_text(path, text);
}

std::map<std::string, double> read_optima(const std::string& path) {
  std::istringstream in(read_file(path));
  std::map<std::string, double> m;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::istringstream ls(line);
    std::string name;
    double x;
    if (!(ls >> name)) continue;
    if (!(ls >> x)) throw DataError(path + ": missing objective for " + name);
    m[name] = x;
  }
  return m;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-task routing with knowledge distillation"};
  app.require_subcommand(1);
  struct Verb {
    std::string name;
    std::string help;
    CLI::App* sub = nullptr;
  };
  std::vector<Verb> verbs = {
      {"gen", "generate a dataset"},
      {"train-teacher", "train a single-task teacher"},
      {"train-student", "distill teachers into a multi-task student"},
      {"eval", "evaluate a model on datasets"},
      {"bench", "solve CVRPLIB/Solomon files"},
      {"r3c-trace", "run R3C on one instance and export the trace"},
  };
  std::string config_path;
  std::vector<std::string> settings;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  for (auto& v : verbs) {
    v.sub = app.add_subcommand(v.name, v.help);
    v.sub->add_option("--config", config_path, "flat key=value config file");
    v.sub->add_option("--threads", threads, "worker threads (never changes results)");
    v.sub->add_option("--seed", seed, "seed (else MTLKD_SEED, else 1)");
    v.sub->add_option("settings", settings, "key=value overrides");
  }
  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    Settings s;
    if (!config_path.empty()) s.merge_file(config_path);
    for (const auto& t : settings) s.set_token(t);
    if (threads) s.set("threads", std::to_string(*threads));
    if (seed) s.set("seed", std::to_string(*seed));
    for (const auto& v : verbs) {
      if (!v.sub->parsed()) continue;
      if (v.name == "gen") return cmd_gen(s, out);
      if (v.name == "train-teacher") return cmd_train_teacher(s, out);
      if (v.name == "train-student") return cmd_train_student(s, out);
      if (v.name == "eval") return cmd_eval(s, out);
      if (v.name == "bench") return cmd_bench(s, out, err);
      if (v.name == "r3c-trace") return cmd_r3c_trace(s, out);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitConfig;
}

}  // namespace mtlkd::cli
