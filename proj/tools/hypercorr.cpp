// Command-line surface for the cube laboratory: inequality checks, extremal
// scans, flow-conjecture checks, tribes tables, family enumeration and
// average-case checks. All reports are JSON (exact rationals as strings);
// sweep tables can also be emitted as CSV.
//
// Exit codes: 0 ok / reported, 1 input or class error, 2 hard-assert checker
// failed, 3 resource-limit refusal.

#include <chrono>
#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "hypercorr/io.hpp"

using namespace hypercorr;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

std::vector<int> parse_perm(const std::string& s) {
  std::vector<int> out;
  if (s.empty()) return out;
  size_t pos = 0;
  while (pos < s.size()) {
    size_t comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    out.push_back(std::stoi(s.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

std::string join_args(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

int default_jobs() {
  if (const char* env = std::getenv("HYPERCORR_JOBS")) {
    int j = std::atoi(env);
    if (j >= 1) return j;
  }
  return 1;
}

families::FamilyClass parse_class(const std::string& s) {
  auto c = families::family_class_from_name(s);
  if (!c)
    throw_input("unknown family class: " + s +
                " (increasing, decreasing, increasing-intersecting, maximal-intersecting, "
                "balanced-increasing)");
  return *c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hypercorr: exact correlation-inequality laboratory on the discrete cube"};
  app.require_subcommand(1);
  std::string command_line = join_args(argc, argv);

  // check
  auto* check = app.add_subcommand("check", "evaluate one inequality checker on families");
  std::string ck_id, ck_a, ck_b, ck_perm, ck_out = "-";
  double ck_alpha = 0.5, ck_gamma = 1.0, ck_awin = 1.0;
  check->add_option("--ineq", ck_id, "checker id")->required();
  check->add_option("--A", ck_a, "family file for A");
  check->add_option("--B", ck_b, "family file for B");
  check->add_option("--alpha", ck_alpha, "alpha parameter");
  check->add_option("--gamma", ck_gamma, "gamma parameter");
  check->add_option("--a", ck_awin, "measure-window exponent");
  check->add_option("--perm", ck_perm, "coordinate order, e.g. 3,1,2");
  check->add_option("--out", ck_out, "output file (- for stdout)");

  // scan
  auto* scan_cmd = app.add_subcommand("scan", "extremal scan over family classes");
  int sc_n = 3, sc_jobs = default_jobs();
  std::string sc_acl = "increasing", sc_bcl = "increasing", sc_id, sc_obj = "min-margin";
  std::string sc_budget = "exhaustive", sc_perm, sc_out = "-";
  uint64_t sc_seed = 0;
  double sc_alpha = 0.5, sc_awin = 1.0;
  scan_cmd->add_option("--n", sc_n, "dimension")->required();
  scan_cmd->add_option("--A-class", sc_acl, "class of A");
  scan_cmd->add_option("--B-class", sc_bcl, "class of B");
  scan_cmd->add_option("--ineq", sc_id, "checker id")->required();
  scan_cmd->add_option("--objective", sc_obj, "min-margin or min-ratio");
  scan_cmd->add_option("--budget", sc_budget, "instance count, or 'exhaustive'");
  scan_cmd->add_option("--seed", sc_seed, "random seed");
  scan_cmd->add_option("--alpha", sc_alpha, "alpha parameter");
  scan_cmd->add_option("--a", sc_awin, "measure-window exponent");
  scan_cmd->add_option("--perm", sc_perm, "coordinate order");
  scan_cmd->add_option("--jobs", sc_jobs, "worker threads (HYPERCORR_JOBS)");
  scan_cmd->add_option("--out", sc_out, "output file");

  // flow
  auto* flow_cmd = app.add_subcommand("flow", "Kahn flow check for a maximal intersecting family");
  std::string fl_family, fl_scheme = "max", fl_perm, fl_out = "-";
  flow_cmd->add_option("--family", fl_family, "family file")->required();
  flow_cmd->add_option("--scheme", fl_scheme, "max or average");
  flow_cmd->add_option("--perm", fl_perm, "coordinate order for the max scheme");
  flow_cmd->add_option("--out", fl_out, "output file");

  // tribes
  auto* tribes_cmd = app.add_subcommand("tribes", "tribes statistics or sweep");
  int tr_r = 0, tr_m = 0, tr_rmax = 0;
  bool tr_exact = false;
  std::string tr_out = "-", tr_csv;
  tribes_cmd->add_option("--r", tr_r, "tribe size")->required();
  tribes_cmd->add_option("--m", tr_m, "tribe count (default: balances mu_B)");
  tribes_cmd->add_option("--r-max", tr_rmax, "sweep up to this tribe size");
  tribes_cmd->add_flag("--exact", tr_exact, "exact truth-table mode (r*m <= 24)");
  tribes_cmd->add_option("--csv", tr_csv, "also write the table as CSV");
  tribes_cmd->add_option("--out", tr_out, "output file");

  // enumerate
  auto* enum_cmd = app.add_subcommand("enumerate", "enumerate families of a class");
  int en_n = 3;
  std::string en_class = "increasing", en_out = "-";
  bool en_count = false;
  enum_cmd->add_option("--n", en_n, "dimension")->required();
  enum_cmd->add_option("--class", en_class, "family class");
  enum_cmd->add_flag("--count-only", en_count, "print the exact count only");
  enum_cmd->add_option("--out", en_out, "output file");

  // avg
  auto* avg_cmd = app.add_subcommand("avg", "average-case checks over an ensemble");
  std::string av_files, av_id, av_out = "-";
  double av_gamma = 1.0;
  avg_cmd->add_option("--families", av_files, "ensemble file (array of family files)")->required();
  avg_cmd->add_option("--ineq", av_id, "avg_dream, avg_chvatal or avg_sgamma")->required();
  avg_cmd->add_option("--gamma", av_gamma, "gamma for avg_sgamma");
  avg_cmd->add_option("--out", av_out, "output file");

  CLI11_PARSE(app, argc, argv);

  Timer timer;
  try {
    if (*check) {
      const ineq::CheckerInfo* info = ineq::find_checker(ck_id);
      if (!info) throw_input("unknown inequality checker: " + ck_id);
      bool need_a = info->operands != "B", need_b = info->operands != "A";
      if (need_a && ck_a.empty()) throw_input("checker " + ck_id + " needs --A");
      if (need_b && ck_b.empty()) throw_input("checker " + ck_id + " needs --B");
      SetFamily A = ck_a.empty() ? io::load_family(ck_b) : io::load_family(ck_a);
      SetFamily B = ck_b.empty() ? A : io::load_family(ck_b);
      ineq::Params params;
      params.alpha = ck_alpha;
      params.gamma = ck_gamma;
      params.a = ck_awin;
      params.permutation = parse_perm(ck_perm);
      ineq::InequalityReport rep = ineq::evaluate(ck_id, A, B, params);
      io::json j = io::inequality_report_json(rep);
      j["statement"] = info->statement;
      j["inputs"] = io::json{{"A", io::family_to_json(A)}, {"B", io::family_to_json(B)}};
      io::write_report(ck_out, io::envelope(command_line, std::nullopt, j, timer.ms()));
      bool hard = rep.kind == ineq::CheckerKind::ExactAssert ||
                  rep.kind == ineq::CheckerKind::FloatAssert;
      return hard && rep.verdict == ineq::Verdict::Fails ? 2 : 0;
    }

    if (*scan_cmd) {
      search::ScanSpec spec;
      spec.n = sc_n;
      spec.a_class = parse_class(sc_acl);
      spec.b_class = parse_class(sc_bcl);
      spec.checker = sc_id;
      if (sc_obj == "min-margin")
        spec.objective = search::Objective::MinMargin;
      else if (sc_obj == "min-ratio")
        spec.objective = search::Objective::MinRatio;
      else
        throw_input("objective must be min-margin or min-ratio");
      if (sc_budget != "exhaustive") spec.budget = std::stoull(sc_budget);
      spec.seed = sc_seed;
      spec.params.alpha = sc_alpha;
      spec.params.a = sc_awin;
      spec.params.permutation = parse_perm(sc_perm);
      spec.jobs = sc_jobs;
      search::ExtremalRecord rec = search::scan(spec);
      io::json j = io::extremal_json(rec);
      j["checker"] = sc_id;
      j["objective"] = sc_obj;
      io::write_report(sc_out, io::envelope(command_line, sc_seed, j, timer.ms()));
      return 0;
    }

    if (*flow_cmd) {
      SetFamily fam = io::load_family(fl_family);
      flow::LambdaScheme scheme;
      if (fl_scheme == "max")
        scheme.kind = flow::LambdaKind::MaxCoordinate;
      else if (fl_scheme == "average")
        scheme.kind = flow::LambdaKind::Average;
      else
        throw_input("scheme must be max or average");
      scheme.permutation = parse_perm(fl_perm);
      flow::KahnFlowCheck chk = flow::check_kahn_flow(fam, scheme);
      io::json j = io::flow_result_json(chk.result);
      j["lambda"] = io::lambda_json(chk.lambda);
      j["family"] = io::family_to_json(fam);
      j["scheme"] = fl_scheme;
      io::write_report(fl_out, io::envelope(command_line, std::nullopt, j, timer.ms()));
      return 0;
    }

    if (*tribes_cmd) {
      std::vector<families::TribesStats> rows;
      if (tr_rmax > 0) {
        rows = search::tribes_sweep(tr_r, tr_rmax, tr_exact);
      } else {
        families::TribesParams p{tr_r, tr_m > 0 ? tr_m : families::tribes_balanced_m(tr_r)};
        rows.push_back(tr_exact ? families::tribes_exact(p) : families::tribes_closed_form(p));
      }
      io::json arr = io::json::array();
      for (const auto& s : rows) arr.push_back(io::tribes_json(s));
      if (!tr_csv.empty()) io::write_text(tr_csv, io::tribes_csv(rows));
      io::write_report(tr_out, io::envelope(command_line, std::nullopt, arr, timer.ms()));
      return 0;
    }

    if (*enum_cmd) {
      families::FamilyClass klass = parse_class(en_class);
      if (en_count) {
        uint64_t c = families::count_families(en_n, klass);
        io::write_text(en_out, std::to_string(c));
        return 0;
      }
      if (en_n > 5) throw_limit("enumerate: listing limited to n <= 5 (use --count-only)");
      io::json arr = io::json::array();
      families::for_each_family(en_n, klass,
                                [&](const SetFamily& f) { arr.push_back(io::family_to_json(f)); });
      io::json j;
      j["count"] = arr.size();
      j["families"] = std::move(arr);
      io::write_report(en_out, io::envelope(command_line, std::nullopt, j, timer.ms()));
      return 0;
    }

    if (*avg_cmd) {
      std::vector<SetFamily> fams = io::ensemble_from_json(io::read_json_file(av_files));
      ineq::Params params;
      params.gamma = av_gamma;
      ineq::EnsembleReport rep = ineq::evaluate_ensemble(av_id, fams, params);
      io::write_report(av_out,
                       io::envelope(command_line, std::nullopt, io::ensemble_report_json(rep),
                                    timer.ms()));
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == Error::Kind::Limit ? 3 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
