#include <algdep/aps.hpp>
#include <algdep/hitting.hpp>
#include <algdep/jacobian.hpp>
#include <algdep/protocol.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace algdep;

namespace {

// Exit convention: 0 = computed / positive decision, 1 = negative decision
// (not dependent, not APS, not a hitting set), 2 = usage or input error,
// 3 = a resource cap was hit.
enum ExitCode { kYes = 0, kNo = 1, kUsage = 2, kResource = 3 };

struct Opts {
  std::string instance;
  std::string witness;
  std::string family;
  std::string candidates;
  std::string format = "text";
  ResourceCaps caps;
  u64 seed = 0;
  u32 trials = 10;
  u32 jac_trials = 4;
  u32 rounds = 64;
  u32 ext_degree = 1;
  u64 r = 1;
  u32 h = 1;
  u64 budget = 100;
  u64 degree_bound = 0;
  bool oracle = false;
  bool sweep = false;
  bool exhaustive = false;

  bool tsv() const { return format == "tsv"; }
};

void add_output_flags(CLI::App* sub, Opts& o) {
  sub->add_option("--format", o.format, "report format")->check(CLI::IsMember({"text", "tsv"}));
  sub->add_option("--max-terms", o.caps.max_terms, "cap on expanded polynomial terms");
  sub->add_option("--max-matrix-cells", o.caps.max_matrix_cells, "cap on linear system size");
  sub->add_option("--max-enum-points", o.caps.max_enum_points, "cap on exhaustive sweeps");
  sub->add_option("--max-field-scan", o.caps.max_field_scan, "cap on field element scans");
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::SyntaxError, "cannot open " + path);
  return parse_instance(in);
}

// "y1^2+y2" rendering for headline summaries; unit coefficients are dropped.
std::string compact_poly(const Polynomial& a, const std::string& pfx) {
  if (a.terms.empty()) return "0";
  std::string s;
  for (auto it = a.terms.rbegin(); it != a.terms.rend(); ++it) {
    const auto& [m, c] = *it;
    if (!s.empty()) s += '+';
    std::string cs = format_element(a.field, c);
    if (m.deg == 0) {
      s += cs;
      continue;
    }
    if (cs != "1") {
      s += cs;
      s += '*';
    }
    bool first = true;
    for (u32 i = 0; i < a.nvars; ++i) {
      if (m.e[i] == 0) continue;
      if (!first) s += '*';
      first = false;
      s += pfx + std::to_string(i + 1);
      if (m.e[i] > 1) s += '^' + std::to_string(m.e[i]);
    }
  }
  return s;
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string join_names(const Instance& inst, const std::vector<u32>& idx) {
  std::string s;
  for (u32 i : idx) {
    if (!s.empty()) s += ' ';
    s += inst.circuits[i].name;
  }
  return s;
}

/// Lowest-degree annihilator of a dependent instance; the caller has already
/// established dependence, so the scan terminates at or before the subset
/// degree bound.
Polynomial lowest_annihilator(const Instance& inst, const ResourceCaps& caps) {
  for (u64 d = 1;; ++d) {
    AnnSpace sp = annihilator_space(inst, d, caps);
    if (!sp.basis.empty()) return sp.basis[0];
  }
}

int cmd_trdeg(const Opts& o) {
  Instance inst = load_instance(o.instance);
  TrdegResult t = trdeg(inst, o.caps);
  if (o.tsv()) {
    std::cout << "trdeg\t" << t.k << '\n';
    std::cout << "m\t" << inst.circuits.size() << '\n';
    std::cout << "witness\t" << join_names(inst, t.witness) << '\n';
  } else {
    std::cout << "trdeg: " << t.k << " (m = " << inst.circuits.size() << ")\n";
    std::cout << "independent subset: " << join_names(inst, t.witness) << '\n';
  }
  return kYes;
}

int cmd_depend(const Opts& o) {
  Instance inst = load_instance(o.instance);
  TrdegResult t = trdeg(inst, o.caps);
  if (t.k == inst.circuits.size()) {
    if (o.tsv())
      std::cout << "dependent\tno\n";
    else
      std::cout << "independent\n";
    return kNo;
  }
  Polynomial a = lowest_annihilator(inst, o.caps);
  if (o.tsv()) {
    std::cout << "dependent\tyes\n";
    std::cout << "annihilator\t" << compact_poly(a, "y") << '\n';
    std::cout << "degree\t" << a.total_degree() << '\n';
  } else {
    std::cout << "dependent; annihilator " << compact_poly(a, "y") << '\n';
  }
  return kYes;
}

int cmd_annihilator(const Opts& o, bool bounded) {
  Instance inst = load_instance(o.instance);
  AnnSpace sp;
  if (bounded) {
    sp = annihilator_space(inst, o.degree_bound, o.caps);
    if (sp.basis.empty()) {
      if (o.tsv())
        std::cout << "basis\t0\n";
      else
        std::cout << "no annihilator up to degree " << o.degree_bound << '\n';
      return kNo;
    }
  } else {
    TrdegResult t = trdeg(inst, o.caps);
    if (t.k == inst.circuits.size()) {
      if (o.tsv())
        std::cout << "basis\t0\n";
      else
        std::cout << "independent; the annihilator ideal is trivial\n";
      return kNo;
    }
    Polynomial a = lowest_annihilator(inst, o.caps);
    sp.d = static_cast<u64>(a.total_degree());
    sp.basis = {std::move(a)};
  }
  if (o.tsv()) {
    std::cout << "basis\t" << sp.basis.size() << '\n';
    std::cout << "degree\t" << sp.d << '\n';
    for (size_t i = 0; i < sp.basis.size(); ++i)
      std::cout << "A" << (i + 1) << '\t' << poly_to_string(sp.basis[i], "y") << '\n';
  } else {
    std::cout << "annihilator basis at degree " << sp.d << " (" << sp.basis.size()
              << " element" << (sp.basis.size() == 1 ? "" : "s") << "):\n";
    for (size_t i = 0; i < sp.basis.size(); ++i)
      std::cout << "A" << (i + 1) << " = " << poly_to_string(sp.basis[i], "y") << '\n';
  }
  return kYes;
}

int cmd_jacobian(const Opts& o) {
  Instance inst = load_instance(o.instance);
  JacobianReport rep = jacobian_rank(inst, o.seed, o.jac_trials);
  size_t m = inst.circuits.size();
  bool full = rep.rank == m;
  if (o.tsv()) {
    std::cout << "rank\t" << rep.rank << '\n';
    std::cout << "m\t" << m << '\n';
    std::cout << "full\t" << (full ? "yes" : "no") << '\n';
    std::cout << "applicable\t" << (rep.applicable ? "yes" : "no") << '\n';
    if (!rep.reason.empty()) std::cout << "reason\t" << rep.reason << '\n';
    std::cout << "trials\t" << rep.trials << '\n';
  } else {
    std::cout << "jacobian rank: " << rep.rank << " of m = " << m << " ("
              << (full ? "full" : "deficient") << ")\n";
    std::cout << "rank criterion applicable: " << (rep.applicable ? "yes" : "no");
    if (!rep.reason.empty()) std::cout << " (" << rep.reason << ")";
    std::cout << '\n';
  }
  return full ? kNo : kYes;
}

int cmd_gap(const Opts& o, bool am) {
  Instance inst = load_instance(o.instance);
  GapReport r = fiber_stats(inst, o.ext_degree, o.caps);
  GapVerdict v = am ? check_am_gap(r) : check_coam_gap(r);
  u64 d = static_cast<u64>(r.deg_product);
  if (o.tsv()) {
    std::cout << "qprime\t" << r.qprime << '\n';
    std::cout << "domain\t" << r.domain << '\n';
    std::cout << "D\t" << u128_to_string(r.deg_product) << '\n';
    std::cout << "Dmax\t" << r.deg_max << '\n';
    std::cout << "image\t" << r.image_size << '\n';
    std::cout << "fiber_le_D\t" << r.points_with_fiber_le(d) << '\n';
    std::cout << "fiber_le_2D\t" << r.points_with_fiber_le(2 * d) << '\n';
    for (const auto& [fib, cnt] : r.histogram)
      std::cout << "fiber" << fib << '\t' << cnt << '\n';
    std::cout << "verdict\t" << to_string(v) << '\n';
  } else {
    std::cout << (am ? "preimage" : "image") << " statistics over q' = " << r.qprime
              << " (domain " << r.domain << ", D = " << u128_to_string(r.deg_product)
              << ", max degree " << r.deg_max << ")\n";
    std::cout << "image size: " << r.image_size << '\n';
    std::cout << "points with fiber <= D: " << r.points_with_fiber_le(d) << '\n';
    std::cout << "points with fiber <= 2D: " << r.points_with_fiber_le(2 * d) << '\n';
    for (const auto& [fib, cnt] : r.histogram)
      std::cout << "  fiber " << fib << ": " << cnt << " image point" << (cnt == 1 ? "" : "s")
                << '\n';
    std::cout << "verdict: " << to_string(v) << '\n';
  }
  return kYes;
}

std::string round_body(const GsRound& r) {
  std::string s = "rows=";
  char buf[32];
  for (size_t i = 0; i < r.rows.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%llx", static_cast<unsigned long long>(r.rows[i]));
    s += (i ? "," : "") + std::string(buf);
  }
  std::snprintf(buf, sizeof buf, "%llx", static_cast<unsigned long long>(r.offset));
  s += " offset=";
  s += buf;
  if (r.response)
    s += " response=" + std::to_string(*r.response);
  else
    s += " response=-";
  s += r.accept ? " accept" : " reject";
  return s;
}

int cmd_decide(const Opts& o, bool am) {
  Instance inst = load_instance(o.instance);
  ProtocolParams pp{o.ext_degree, o.rounds, o.seed};
  DecideResult res = am ? am_decide(inst, pp, o.caps) : coam_decide(inst, pp, o.caps);
  const char* proto = am ? "AM" : "coAM";
  if (o.tsv()) {
    std::cout << "protocol\t" << proto << '\n';
    std::cout << "dependent\t" << (res.dependent ? "yes" : "no") << '\n';
    std::cout << "accepts\t" << res.accepts << '\n';
    std::cout << "rounds\t" << res.rounds << '\n';
    std::cout << "claim\t" << res.claim << '\n';
    std::cout << "hash_bits\t" << res.hash_bits << '\n';
    std::cout << "threshold\t" << fixed6(res.threshold) << '\n';
    if (am) std::cout << "anchor\t" << res.anchor << '\n';
    for (size_t i = 0; i < res.transcript.size(); ++i)
      std::cout << "round" << (i + 1) << '\t' << round_body(res.transcript[i]) << '\n';
  } else {
    std::cout << proto << " decision: " << (res.dependent ? "dependent" : "independent")
              << " (accepts " << res.accepts << "/" << res.rounds << ", threshold "
              << fixed6(res.threshold) << ")\n";
    std::cout << "set-size claim: " << res.claim << " with " << res.hash_bits << " hash bits\n";
    if (am) std::cout << "anchor point: " << res.anchor << '\n';
    for (size_t i = 0; i < res.transcript.size(); ++i)
      std::cout << "round " << (i + 1) << ": " << round_body(res.transcript[i]) << '\n';
  }
  return res.dependent ? kYes : kNo;
}

int cmd_aps(const Opts& o) {
  Instance inst = load_instance(o.instance);
  ApsOptions opt;
  opt.trials = o.trials;
  opt.seed = o.seed;
  opt.sweep = o.sweep;
  opt.caps = o.caps;
  ApsVerdict v = aps_decide(inst, opt);
  std::string seeds;
  for (size_t i = 0; i < v.trial_seeds.size(); ++i)
    seeds += (i ? " " : "") + std::to_string(v.trial_seeds[i]);
  if (o.tsv()) {
    std::cout << "answer\t" << (v.answer ? "YES" : "NO") << '\n';
    std::cout << "route\t" << to_string(v.route) << '\n';
    std::cout << "trials\t" << v.trials_used << '\n';
    if (!seeds.empty()) std::cout << "trial_seeds\t" << seeds << '\n';
  } else {
    std::cout << "APS: " << (v.answer ? "YES" : "NO") << " (route=" << to_string(v.route)
              << ")\n";
    if (v.trials_used > 0) {
      std::cout << "trials: " << v.trials_used;
      if (!seeds.empty()) std::cout << " (attempt indices " << seeds << ")";
      std::cout << '\n';
    }
  }
  if (o.oracle) {
    bool direct = ann_at_zero_direct(inst, o.caps);
    bool agree = direct == v.answer;
    if (o.tsv()) {
      std::cout << "oracle\t" << (direct ? "YES" : "NO") << '\n';
      std::cout << "oracle_agrees\t" << (agree ? "yes" : "no") << '\n';
    } else {
      std::cout << "direct oracle: " << (direct ? "YES" : "NO")
                << (agree ? " (agrees)" : " (MISMATCH)") << '\n';
    }
    if (!agree) std::cerr << "warning: randomized decision disagrees with the direct oracle\n";
  }
  return v.answer ? kYes : kNo;
}

int cmd_verify_witness(const Opts& o) {
  Instance inst = load_instance(o.instance);
  std::ifstream win(o.witness);
  if (!win) fail(ErrorKind::SyntaxError, "cannot open " + o.witness);
  Witness w = parse_witness(win, inst);
  WitnessReport rep = verify_witness(inst, w, o.caps);
  if (o.tsv()) {
    std::cout << "verified\t" << (rep.ok ? "yes" : "no") << '\n';
    for (size_t i = 0; i < rep.warnings.size(); ++i)
      std::cout << "warning" << (i + 1) << '\t' << rep.warnings[i] << '\n';
  } else {
    for (const std::string& wmsg : rep.warnings) std::cout << "warning: " << wmsg << '\n';
    std::cout << (rep.ok ? "witness verified: every circuit value lies in the ideal (eps)"
                         : "witness rejected: some circuit value lies outside the ideal (eps)")
              << '\n';
  }
  return rep.ok ? kYes : kNo;
}

std::string point_line(const FieldDesc& f, const std::vector<FieldElement>& pt) {
  std::string s;
  for (size_t i = 0; i < pt.size(); ++i) s += (i ? ", " : "") + format_element(f, pt[i]);
  return s;
}

HittingInstance load_hitting(const Opts& o) {
  std::ifstream fin(o.family);
  if (!fin) fail(ErrorKind::SyntaxError, "cannot open " + o.family);
  HittingFamily fam = parse_family(fin);
  std::ifstream cin_(o.candidates);
  if (!cin_) fail(ErrorKind::SyntaxError, "cannot open " + o.candidates);
  auto pts = parse_points(cin_, fam.field, fam.nx());
  return HittingInstance{std::move(fam), o.r, std::move(pts)};
}

int cmd_hitting_certify(const Opts& o) {
  HittingInstance hi = load_hitting(o);
  ApsOptions opt;
  opt.trials = o.trials;
  opt.seed = o.seed;
  opt.caps = o.caps;
  bool ok = certify(hi, opt);
  std::optional<std::vector<FieldElement>> cx;
  if (!ok) {
    try {
      cx = brute_counterexample(hi, o.caps);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ResourceLimit) throw;  // scan too large: skip quietly
    }
  }
  if (o.tsv()) {
    std::cout << "certified\t" << (ok ? "yes" : "no") << '\n';
    std::cout << "points\t" << hi.points.size() << '\n';
    std::cout << "r\t" << hi.r << '\n';
    if (cx) std::cout << "counterexample\t" << point_line(hi.family.field, *cx) << '\n';
  } else {
    std::cout << "hitting set certified: " << (ok ? "YES" : "NO") << " (|H| = "
              << hi.points.size() << ", r = " << hi.r << ")\n";
    if (cx)
      std::cout << "missed member at parameters: " << point_line(hi.family.field, *cx) << '\n';
  }
  return ok ? kYes : kNo;
}

int cmd_hitting_search(const Opts& o) {
  std::ifstream fin(o.family);
  if (!fin) fail(ErrorKind::SyntaxError, "cannot open " + o.family);
  HittingFamily fam = parse_family(fin);
  ApsOptions opt;
  opt.trials = o.trials;
  opt.seed = o.seed;
  opt.caps = o.caps;
  auto got = o.exhaustive ? exhaustive_search(fam, o.r, o.h, opt)
                          : search(fam, o.r, o.h, static_cast<u32>(o.budget), o.seed, opt);
  if (!got) {
    if (o.tsv())
      std::cout << "found\tno\n";
    else if (o.exhaustive)
      std::cout << "no certified candidate of size " << o.h << " exists\n";
    else
      std::cout << "no certified candidate within budget " << o.budget << '\n';
    return kNo;
  }
  if (o.tsv()) {
    std::cout << "found\tyes\n";
    for (size_t i = 0; i < got->size(); ++i)
      std::cout << "point" << (i + 1) << '\t' << point_line(fam.field, (*got)[i]) << '\n';
  } else {
    // printed in candidate-file form so the output can feed `hitting certify`
    if (o.exhaustive)
      std::cout << "# first certified candidate in sweep order\n";
    else
      std::cout << "# certified candidate (seed " << o.seed << ", budget " << o.budget << ")\n";
    for (const auto& pt : *got) std::cout << point_line(fam.field, pt) << '\n';
  }
  return kYes;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "algdep: exact algebraic-dependence testing, gap-protocol simulation,\n"
      "approximate-satisfiability decision and hitting-set certification over\n"
      "finite fields"};
  app.require_subcommand(1);

  Opts o;
  int rc = kYes;

  auto add_instance_arg = [&](CLI::App* sub) {
    sub->add_option("instance", o.instance, "instance file")
        ->required()
        ->check(CLI::ExistingFile);
    add_output_flags(sub, o);
  };

  CLI::App* trdegc = app.add_subcommand("trdeg", "transcendence degree of the instance");
  add_instance_arg(trdegc);
  trdegc->callback([&] { rc = cmd_trdeg(o); });

  CLI::App* dependc = app.add_subcommand("depend", "decide algebraic dependence");
  add_instance_arg(dependc);
  dependc->callback([&] { rc = cmd_depend(o); });

  CLI::App* annc = app.add_subcommand("annihilator", "compute an annihilator basis");
  add_instance_arg(annc);
  CLI::Option* dbopt =
      annc->add_option("--degree-bound", o.degree_bound, "basis of all annihilators up to this degree");
  annc->callback([&] { rc = cmd_annihilator(o, dbopt->count() > 0); });

  CLI::App* jacc = app.add_subcommand("jacobian", "randomized rank of the Jacobian matrix");
  add_instance_arg(jacc);
  jacc->add_option("--seed", o.seed, "evaluation point seed");
  jacc->add_option("--trials", o.jac_trials, "random evaluation points");
  jacc->callback([&] { rc = cmd_jacobian(o); });

  CLI::App* amgapc = app.add_subcommand("am-gap", "exhaustive preimage statistics and gap check");
  add_instance_arg(amgapc);
  amgapc->add_option("--qprime-degree", o.ext_degree, "extension degree for q'");
  amgapc->callback([&] { rc = cmd_gap(o, true); });

  CLI::App* coamgapc = app.add_subcommand("coam-gap", "exhaustive image statistics and gap check");
  add_instance_arg(coamgapc);
  coamgapc->add_option("--qprime-degree", o.ext_degree, "extension degree for q'");
  coamgapc->callback([&] { rc = cmd_gap(o, false); });

  CLI::App* amdc = app.add_subcommand("am-decide", "statistical dependence decision (preimage protocol)");
  add_instance_arg(amdc);
  amdc->add_option("--qprime-degree", o.ext_degree, "extension degree for q'");
  amdc->add_option("--rounds", o.rounds, "protocol rounds");
  amdc->add_option("--seed", o.seed, "protocol seed");
  amdc->callback([&] { rc = cmd_decide(o, true); });

  CLI::App* coamdc = app.add_subcommand("coam-decide", "statistical dependence decision (image protocol)");
  add_instance_arg(coamdc);
  coamdc->add_option("--qprime-degree", o.ext_degree, "extension degree for q'");
  coamdc->add_option("--rounds", o.rounds, "protocol rounds");
  coamdc->add_option("--seed", o.seed, "protocol seed");
  coamdc->callback([&] { rc = cmd_decide(o, false); });

  CLI::App* apsc = app.add_subcommand("aps", "decide approximate-polynomials satisfiability");
  add_instance_arg(apsc);
  apsc->add_option("--trials", o.trials, "preserving reduction trials");
  apsc->add_option("--seed", o.seed, "trial seed");
  apsc->add_flag("--oracle", o.oracle, "cross-check against the direct decision");
  apsc->add_flag("--sweep", o.sweep, "enumerate every reduction plan instead of sampling");
  apsc->callback([&] { rc = cmd_aps(o); });

  CLI::App* vwc = app.add_subcommand("verify-witness", "check an approximate solution witness");
  vwc->add_option("instance", o.instance, "instance file")->required()->check(CLI::ExistingFile);
  vwc->add_option("witness", o.witness, "witness file")->required()->check(CLI::ExistingFile);
  add_output_flags(vwc, o);
  vwc->callback([&] { rc = cmd_verify_witness(o); });

  CLI::App* hitc = app.add_subcommand("hitting", "hitting-set certification for a circuit family");
  hitc->require_subcommand(1);

  CLI::App* certc = hitc->add_subcommand("certify", "certify a candidate hitting set");
  certc->add_option("--family", o.family, "family file")->required()->check(CLI::ExistingFile);
  certc->add_option("--candidates", o.candidates, "candidate point file")
      ->required()
      ->check(CLI::ExistingFile);
  certc->add_option("--r", o.r, "points are (r+1)-st roots of unity")->required();
  certc->add_option("--trials", o.trials, "reduction trials per decision");
  certc->add_option("--seed", o.seed, "decision seed");
  add_output_flags(certc, o);
  certc->callback([&] { rc = cmd_hitting_certify(o); });

  CLI::App* searchc = hitc->add_subcommand("search", "search for a certified hitting set");
  searchc->set_help_flag("--help", "print this help message and exit");  // frees -h for --h
  searchc->add_option("--family", o.family, "family file")->required()->check(CLI::ExistingFile);
  searchc->add_option("--r", o.r, "points are (r+1)-st roots of unity")->capture_default_str();
  searchc->add_option("--h", o.h, "candidate size")->required();
  searchc->add_option("--budget", o.budget, "candidates to try");
  searchc->add_option("--seed", o.seed, "search seed");
  searchc->add_option("--trials", o.trials, "reduction trials per decision");
  searchc->add_flag("--exhaustive", o.exhaustive,
                    "sweep every candidate in index order (needs q^{nh} <= 2^20)");
  add_output_flags(searchc, o);
  searchc->callback([&] { rc = cmd_hitting_search(o); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kYes : kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::ResourceLimit ? kResource : kUsage;
  }
  return rc;
}
