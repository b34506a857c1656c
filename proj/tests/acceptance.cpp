// Acceptance run: one PASS/FAIL line per criterion. Usage: acceptance [N...]
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mtlkd/cli/commands.hpp"
#include "mtlkd/core/binary_io.hpp"
#include "mtlkd/core/construct.hpp"
#include "mtlkd/core/verify.hpp"
#include "mtlkd/data/benchmark.hpp"
#include "mtlkd/data/generate.hpp"
#include "mtlkd/nk/grad_check.hpp"
#include "mtlkd/policy/student.hpp"
#include "mtlkd/policy/teacher.hpp"
#include "mtlkd/search/exact.hpp"
#include "mtlkd/search/r3c.hpp"
#include "mtlkd/train/losses.hpp"
#include "mtlkd/train/training.hpp"
#include "support/oracles.hpp"

using namespace mtlkd;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

DecodeState random_state(const Instance& inst, int steps, Rng& rng) {
  DecodeState s = initial_state(inst);
  for (int t = 0; t < steps && !s.done; ++t) {
    const FeasibilityMask m = feasibility_mask(inst, s);
    std::vector<double> w(m.allowed.begin(), m.allowed.end());
    apply_action(inst, s, static_cast<int>(rng.categorical(w)));
  }
  return s;
}

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0 : s / double(v.size());
}

// Toy models shared between criteria 4, 5 and 7.
struct ToyModels {
  std::vector<VariantSpec> tasks = {kCVRP, kOVRP};
  std::vector<policy::TeacherModel> teachers;
  std::optional<policy::StudentModel> student;
  double kl_before = 0, kl_after = 0;
};

ToyModels& toy_teachers() {
  static std::optional<ToyModels> m;
  if (!m) {
    m.emplace();
    const train::TrainConfig cfg = train::TrainConfig::toy_teacher();
    for (const VariantSpec v : m->tasks) {
      policy::TeacherModel t(policy::TeacherConfig{}, 100 + v.bits());
      train::TrainState st = train::initial_train_state(t.params(), cfg.seed + v.bits());
      train::train_teacher(t, v, cfg, st, cfg.epochs);
      m->teachers.push_back(std::move(t));
    }
  }
  return *m;
}

std::vector<Instance> kd_held_out(const ToyModels& m) {
  std::vector<Instance> held;
  for (const VariantSpec v : m.tasks) {
    const auto h = data::generate_instances(v, 10, 32, 999);
    held.insert(held.end(), h.begin(), h.end());
  }
  return held;
}

ToyModels& toy_student() {
  ToyModels& m = toy_teachers();
  if (!m.student) {
    const std::vector<train::TeacherSlot> slots = {{m.tasks[0], &m.teachers[0]},
                                                   {m.tasks[1], &m.teachers[1]}};
    const std::vector<Instance> held = kd_held_out(m);
    m.student.emplace(policy::StudentConfig{}, 5);
    const train::TrainConfig cfg = train::TrainConfig::toy_student();
    train::TrainState st = train::initial_train_state(m.student->params(), cfg.seed);
    Rng r0(42);
    m.kl_before = train::mean_step_kl(*m.student, slots, held, r0);
    train::train_student(*m.student, slots, cfg, st, cfg.epochs);
    Rng r1(42);
    m.kl_after = train::mean_step_kl(*m.student, slots, held, r1);
  }
  return m;
}

// 1. Every masked random rollout passes verify().
Outcome feasibility_fuzz() {
  const int ns[3] = {5, 20, 50};
  int feasible = 0;
  const int total = 10'000;
  for (int i = 0; i < total; ++i) {
    const VariantSpec v = all_variants()[i % 16];
    const Instance inst = data::generate_instance(v, ns[(i / 16) % 3], 50'000 + i);
    Rng rng(i, 1);
    const Construction c = construct(inst, uniform_policy(), rng, {DecodeMode::kSample});
    feasible += verify(inst, c.solution).feasible;
  }
  return {feasible == total, std::to_string(feasible) + "/" + std::to_string(total) +
                                 " rollouts feasible (need all)"};
}

// 2. Exact DP equals exhaustive enumeration at n = 7.
Outcome oracle_equivalence() {
  double worst = 0;
  int count = 0;
  for (const VariantSpec v : {kCVRP, kOVRP, kVRPTW}) {
    for (int i = 0; i < 100; ++i) {
      const Instance inst = data::generate_instance(v, 7, 70'000 + i);
      const double dp = search::exact_solve(inst).objective;
      const double en = testing::enumerate_optimum(inst).cost;
      worst = std::max(worst, std::abs(dp - en));
      ++count;
    }
  }
  return {worst < 1e-9, std::to_string(count) + " instances, max |dp - enumeration| = " +
                            fmt("%.3g (need < 1e-9)", worst)};
}

// 3. Finite-difference checks of full decode steps.
Outcome gradient_checks() {
  auto step_loss = [](const policy::Policy& m, const Instance& inst, const DecodeState& s) {
    return [&m, &inst, &s](nk::Tape& tape) {
      auto roll = m.begin(tape, inst);
      nk::Var lp = roll->log_probs({&s, 1});
      std::vector<nk::PickEntry> pick;
      const FeasibilityMask mask = feasibility_mask(inst, s);
      for (int j = 0; j < inst.num_nodes(); ++j) {
        if (mask.allowed[j]) pick.push_back({0, static_cast<std::size_t>(j), 1.0 + j});
      }
      return nk::weighted_pick(lp, pick);
    };
  };
  double worst_student = 0, worst_teacher = 0;
  Rng rng(31);
  for (const char* name : {"CVRP", "VRPTW", "OVRPBL", "OVRPBLTW"}) {
    const Instance inst = data::generate_instance(*VariantSpec::parse(name), 5, rng.next_u64());
    const DecodeState s = random_state(inst, 2, rng);
    policy::StudentModel st(policy::StudentConfig{}, rng.next_u64());
    policy::TeacherConfig tc;
    tc.encoder_layers = 3;
    policy::TeacherModel te(tc, rng.next_u64());
    worst_student = std::max(worst_student, nk::grad_check(step_loss(st, inst, s), st.params()).max_rel_error);
    worst_teacher = std::max(worst_teacher, nk::grad_check(step_loss(te, inst, s), te.params()).max_rel_error);
  }
  return {worst_student < 1e-4 && worst_teacher < 1e-4,
          fmt("max relative error student %.3g, teacher %.3g (need < 1e-4)", worst_student,
              worst_teacher)};
}

// 4. Copied-student anchor and toy distillation.
Outcome kd_sanity() {
  policy::StudentModel s(policy::StudentConfig{}, 3);
  const policy::StudentModel copy = s;
  std::vector<train::TeacherSlot> slots;
  std::vector<Instance> batch;
  for (const VariantSpec v : all_variants()) {
    slots.push_back({v, &copy});
    const auto b = data::generate_instances(v, 10, 2, 5);
    batch.insert(batch.end(), b.begin(), b.end());
  }
  Rng rng(7);
  const double anchor = std::abs(train::kd_student_step(s, slots, batch, rng).loss);
  const ToyModels& m = toy_student();
  const double reduction = 1.0 - m.kl_after / m.kl_before;
  return {anchor < 1e-9 && reduction >= 0.80,
          fmt("anchor loss %.3g (need < 1e-9); held-out KL %.4f -> ", anchor, m.kl_before) +
              fmt("%.4f, reduction %.1f%% (need >= 80%%)", m.kl_after, 100 * reduction)};
}

// 5. Toy REINFORCE closes the random-to-optimal gap.
Outcome teacher_learning() {
  const auto held = data::generate_instances(kCVRP, 10, 64, 777);
  std::vector<double> opt, rnd;
  for (const auto& inst : held) {
    opt.push_back(search::exact_solve(inst).objective);
    Rng r(5);
    double sum = 0;
    for (int k = 0; k < 10; ++k) {
      sum += evaluate(inst, construct(inst, uniform_policy(), r, {DecodeMode::kSample}).solution);
    }
    rnd.push_back(sum / 10);
  }
  const ToyModels& m = toy_teachers();
  const double greedy = mean(train::greedy_objectives(m.teachers[0], held));
  const double closure = (mean(rnd) - greedy) / (mean(rnd) - mean(opt));
  return {closure >= 0.60, fmt("random %.4f, teacher greedy %.4f, optimal %.4f", mean(rnd), greedy,
                               mean(opt)) +
                               fmt(", gap closed %.1f%% (need >= 60%%)", 100 * closure)};
}

bool non_increasing(double initial, const std::vector<double>& trace) {
  double prev = initial;
  for (double t : trace) {
    if (t > prev) return false;
    prev = t;
  }
  return true;
}

// 6. R3C traces are monotone; the exact backend reaches the optimum at n = 8.
Outcome r3c_reach() {
  int reached = 0, monotone = 0;
  for (int i = 0; i < 100; ++i) {
    const Instance inst = data::generate_instance(kCVRP, 8, 80'000 + i);
    Rng rng(i, 2);
    const Solution init = construct(inst, uniform_policy(), rng, {DecodeMode::kSample}).solution;
    search::R3CConfig cfg;
    cfg.iterations = 200;
    cfg.reoptimizer = search::Reoptimizer::kExact;
    cfg.seed = 1000 + i;
    const search::R3CResult r = search::r3c_run(inst, init, cfg);
    monotone += non_increasing(evaluate(inst, init), r.trace);
    reached += r.objective <= search::exact_solve(inst).objective + 1e-9;
  }
  return {monotone == 100 && reached >= 95,
          std::to_string(monotone) + "/100 traces monotone (need all), optimum reached on " +
              std::to_string(reached) + "/100 (need >= 95)"};
}

// 7. Random segment length against fixed k, student re-optimizer, n = 50.
Outcome segment_length() {
  const ToyModels& m = toy_student();
  const policy::StudentModel& student = *m.student;
  struct Arm {
    std::string name;
    search::SegmentMode mode;
    int k;
    double total = 0;
  };
  std::vector<Arm> arms = {{"random", search::SegmentMode::kRandom, 0},
                           {"k=5", search::SegmentMode::kFixed, 5},
                           {"k=10", search::SegmentMode::kFixed, 10},
                           {"k=20", search::SegmentMode::kFixed, 20}};
  bool monotone = true;
  for (int i = 0; i < 20; ++i) {
    const Instance inst = data::generate_instance(kCVRP, 50, 90'000 + i);
    Rng rng(i, 3);
    const Solution init = policy::construct_with(student, inst, rng).solution;
    const double init_obj = evaluate(inst, init);
    for (auto& arm : arms) {
      for (int seed = 0; seed < 5; ++seed) {
        search::R3CConfig cfg;
        cfg.iterations = 50;
        cfg.mode = arm.mode;
        cfg.fixed_k = arm.k;
        cfg.seed = 500 + seed;
        const search::R3CResult r = search::r3c_run(inst, init, cfg, &student);
        monotone = monotone && non_increasing(init_obj, r.trace);
        arm.total += r.objective;
      }
    }
  }
  bool best = true;
  std::string detail = "mean final objective";
  for (auto& arm : arms) {
    arm.total /= 100;
    detail += " " + arm.name + fmt(" %.4f", arm.total);
    if (arm.total < arms[0].total) best = false;
  }
  return {best && monotone, detail + " (need random <= every fixed k; traces monotone: " +
                                (monotone ? "yes" : "no") + ")"};
}

// 8. Padding and infeasible entries carry exactly zero mass; batching is
// transparent.
Outcome mask_pad_exactness() {
  policy::StudentModel m(policy::StudentConfig{}, 21);
  Rng rng(8);
  long long masked_entries = 0, leaks = 0, pads = 0, pad_errors = 0;
  double worst = 0;
  for (int step = 0; step < 1000; ++step) {
    const int b = 2 + static_cast<int>(rng.uniform_int(0, 4));
    std::vector<Instance> insts;
    std::vector<DecodeState> states;
    for (int i = 0; i < b; ++i) {
      const VariantSpec v = all_variants()[rng.uniform_int(0, 15)];
      insts.push_back(data::generate_instance(v, static_cast<int>(rng.uniform_int(4, 16)), rng.next_u64()));
    }
    for (int i = 0; i < b; ++i) {
      states.push_back(random_state(insts[i], static_cast<int>(rng.uniform_int(0, insts[i].num_nodes())), rng));
      if (states.back().done) states.back() = initial_state(insts[i]);
    }
    nk::Tape tape(false);
    std::vector<policy::DecodeItem> items;
    for (int i = 0; i < b; ++i) items.push_back({m.encode(tape, insts[i]), &insts[i], &states[i]});
    const policy::PaddedBatch pb = m.pad_batch(tape, items);
    for (int i = 0; i < b; ++i) {
      int unvisited = 0;
      for (int j = 1; j < insts[i].num_nodes(); ++j) unvisited += !states[i].visited[j];
      const std::size_t real = 2 + static_cast<std::size_t>(unvisited);  // last, depot, customers
      for (std::size_t p = 0; p < pb.max_len; ++p) {
        const bool is_pad = p >= real;
        pads += is_pad;
        pad_errors += is_pad != nk::is_masked(pb.pad_mask(i, p));
      }
    }
    const std::vector<nk::Var> batched = m.decode_batch(tape, items);
    for (int i = 0; i < b; ++i) {
      const nk::Tensor lp = batched[i].value();
      const FeasibilityMask mask = feasibility_mask(insts[i], states[i]);
      const std::vector<double> p = policy::row_probabilities(lp);
      for (std::size_t j = 0; j < p.size(); ++j) {
        if (!mask.allowed[j]) {
          ++masked_entries;
          leaks += !(p[j] == 0.0 && std::isinf(double(lp(0, j))));
        }
      }
      const std::vector<nk::Var> single = m.decode_batch(tape, {&items[i], 1});
      const std::vector<double> q = policy::row_probabilities(single[0].value());
      for (std::size_t j = 0; j < p.size(); ++j) worst = std::max(worst, std::abs(p[j] - q[j]));
    }
  }
  return {leaks == 0 && pad_errors == 0 && worst <= 1e-9,
          std::to_string(masked_entries) + " infeasible entries with " + std::to_string(leaks) +
              " nonzero, " + std::to_string(pads) + " padded positions with " +
              std::to_string(pad_errors) + " unmasked, batched vs single max diff " +
              fmt("%.3g (need <= 1e-9)", worst)};
}

// 9. Printed gap pairing and benchmark headers.
Outcome metric_fidelity() {
  const std::string gap = fmt("%.2f", 100.0 * cli::gap(16.06, 15.53));
  const std::string dir = MTLKD_TEST_DATA;
  std::string parsed;
  bool ok = gap == "3.41";
  try {
    const auto x = data::parse_cvrplib_header(read_file(dir + "/X-n101-k25.header.vrp"));
    const auto r = data::parse_solomon_header(read_file(dir + "/R101.excerpt.txt"));
    ok = ok && x.name == "X-n101-k25" && x.dimension == 101 && x.capacity == 206 &&
         r.name == "R101" && r.capacity == 200;
    parsed = x.name + " (dimension " + std::to_string(x.dimension) + ", capacity " +
             fmt("%g", x.capacity) + "), " + r.name + fmt(" (capacity %g)", r.capacity);
  } catch (const std::exception& e) {
    ok = false;
    parsed = std::string("parse error: ") + e.what();
  }
  return {ok, "gap(16.06, 15.53) = " + gap + "% (need 3.41); parsed " + parsed};
}

// 10. Re-running commands with the same seed gives identical reports for
// thread counts 1 and 4.
Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "mtlkd_acceptance";
  fs::remove_all(root);
  const std::string data_dir = MTLKD_TEST_DATA;
  auto strip = [](const std::string& text) {
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line)) {
      if (!line.empty() && line[0] != '#') {
        const auto tab = line.rfind('\t');
        if (tab != std::string::npos) line.resize(tab);  // wallclock
      }
      out += line + "\n";
    }
    return out;
  };
  // Same directory every time, so the commands are literally identical.
  auto session = [&](int threads) {
    const fs::path dir = root / "run";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto p = [&](const char* f) { return (dir / f).string(); };
    const std::string t = std::to_string(threads);
    const std::vector<std::vector<std::string>> commands = {
        {"gen", "variant=CVRP", "n=8", "count=16", "seed=4", "out=" + p("cvrp.bin"), "optima=" + p("cvrp.opt")},
        {"gen", "variant=VRPLTW", "n=8", "count=16", "seed=4", "out=" + p("ltw.bin")},
        {"train-teacher", "task=CVRP", "n=8", "epochs=3", "instances_per_epoch=32", "batch_size=16", "seed=4", "out=" + p("t1.ck"), "log=" + p("t1.log")},
        {"train-teacher", "task=OVRP", "n=8", "epochs=3", "instances_per_epoch=32", "batch_size=16", "seed=4", "out=" + p("t2.ck"), "log=" + p("t2.log")},
        {"train-student", "tasks=CVRP,OVRP", "teachers=" + p("t1.ck") + "," + p("t2.ck"), "n=8", "epochs=3", "instances_per_epoch=16", "per_task_batch=8", "seed=4", "out=" + p("s.ck"), "log=" + p("s.log")},
        {"eval", "model=" + p("s.ck"), "datasets=" + p("cvrp.bin") + "," + p("ltw.bin"), "baselines=" + p("cvrp.opt") + "," + p("cvrp.opt"), "mode=st", "seed=4", "report=" + p("st.tsv")},
        {"eval", "model=" + p("s.ck"), "datasets=" + p("cvrp.bin"), "mode=r3c:20", "seed=4", "report=" + p("r3c.tsv")},
        {"bench", "model=" + p("s.ck"), "files=" + data_dir + "/tiny.vrp," + data_dir + "/R101.excerpt.txt", "mode=r3c:10", "seed=4", "report=" + p("bench.tsv")},
        {"r3c-trace", "model=" + p("s.ck"), "dataset=" + p("cvrp.bin"), "index=3", "iterations=30", "seed=4", "out=" + p("trace.tsv")},
    };
    std::string all;
    for (auto cmd : commands) {
      cmd.push_back("threads=" + t);
      std::ostringstream out, err;
      const int code = cli::run(cmd, out, err);
      all += cmd[0] + " exit " + std::to_string(code) + "\n";
      if (code != 0) all += err.str();
    }
    for (const char* f : {"cvrp.bin", "cvrp.opt", "ltw.bin", "t1.ck", "t2.ck", "s.ck", "t1.log", "t2.log",
                          "s.log", "st.tsv", "r3c.tsv", "bench.tsv", "trace.tsv"}) {
      all += std::string("== ") + f + "\n" + strip(read_file(p(f)));
    }
    return all;
  };
  std::string a, b, c;
  try {
    a = session(1);
    b = session(4);
    c = session(1);
  } catch (const std::exception& e) {
    fs::remove_all(root);
    return {false, std::string("command failed: ") + e.what()};
  }
  fs::remove_all(root);
  const bool clean = a.find("exit 0\n") != std::string::npos && a.find("exit 1") == std::string::npos &&
                     a.find("exit 2") == std::string::npos && a.find("exit 3") == std::string::npos;
  return {clean && a == b && a == c,
          std::string("9 commands x 3 runs; threads 1 vs 4 ") + (a == b ? "identical" : "DIFFER") +
              ", rerun " + (a == c ? "identical" : "DIFFERS") + (clean ? "" : ", a command failed")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"feasibility fuzz", feasibility_fuzz},
      {"oracle equivalence", oracle_equivalence},
      {"gradient checks", gradient_checks},
      {"distillation sanity", kd_sanity},
      {"teacher learning", teacher_learning},
      {"r3c monotonicity and reach", r3c_reach},
      {"random segment length", segment_length},
      {"mask and padding exactness", mask_pad_exactness},
      {"metric fidelity", metric_fidelity},
      {"determinism", determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d %s: %s: %s [%.1fs]\n", id, o.pass ? "PASS" : "FAIL",
                criteria[i].first.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
