// stoqlab: simulate reversible-circuit verifiers, build distinguishability
// instances, amplify soundness, run the dual-access tester, and work with
// set-constraint instances.
//
// Exit codes: 0 success; 1 negative verdict (no witness pair, equivalent
// circuits); 2 input error; 3 resource cap exceeded.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "stoqlab/gadgets.hpp"
#include "stoqlab/setcsp.hpp"
#include "stoqlab/tester.hpp"
#include "stoqlab/verifier.hpp"

using namespace stoqlab;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

struct Output {
  bool records = false;

  void kv(const std::string& key, const std::string& value) const {
    if (records)
      std::printf("%s=%s\n", key.c_str(), value.c_str());
    else
      std::printf("%s: %s\n", key.c_str(), value.c_str());
  }
  void kv(const std::string& key, double value) const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12f", value);
    kv(key, std::string(buf));
  }
  void kv_exact(const std::string& key, double value) const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    kv(key, std::string(buf));
  }
  void kv(const std::string& key, std::uint64_t value) const {
    kv(key, std::to_string(value));
  }
};

// --easy-witness forms: "uniform", "subset:s1,s2,...", "setcsp:FILE"
EasyWitness parse_easy_witness(const std::string& spec, int n_w) {
  if (spec == "uniform") {
    return EasyWitness::from_predicate(n_w, [](BitString) { return true; });
  }
  if (spec.rfind("subset:", 0) == 0) {
    std::vector<BitString> strings;
    std::istringstream ss(spec.substr(7));
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      if (static_cast<int>(item.size()) != n_w)
        throw std::runtime_error("subset string length must equal n_w");
      strings.push_back(parse_bits(item));
    }
    return EasyWitness::from_state(subset_state(n_w, strings));
  }
  if (spec.rfind("setcsp:", 0) == 0) {
    SetCSPInstance inst = parse_setcsp(slurp(spec.substr(7)));
    if (inst.n != n_w) throw std::runtime_error("set-constraint instance has the wrong width");
    SubsetSpec good = easy_witness(inst);
    return EasyWitness::from_predicate(n_w, good.member);
  }
  throw std::runtime_error("unknown easy-witness spec '" + spec + "'");
}

std::vector<BitString> parse_string_list(const std::string& list, int width) {
  std::vector<BitString> out;
  std::istringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (static_cast<int>(item.size()) != width)
      throw std::runtime_error("bitstring '" + item + "' has the wrong length");
    out.push_back(parse_bits(item));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "reversible-circuit verifier laboratory\n"
      "exit codes: 0 ok, 1 negative verdict, 2 input error, 3 resource cap"};
  app.require_subcommand(1);
  Output out;
  app.add_flag_callback("--records", [&] { out.records = true; },
                        "machine-readable key=value output");

  int exit_code = 0;

  // simulate: exact acceptance probability of a verifier on a witness
  auto* sim = app.add_subcommand("simulate", "exact acceptance probability of a witness");
  std::string sim_verifier, sim_witness;
  sim->add_option("--verifier", sim_verifier, "verifier file")->required();
  sim->add_option("--witness", sim_witness, "witness file")->required();
  sim->callback([&] {
    StoqVerifier v = parse_verifier(slurp(sim_verifier));
    NonNegState w = parse_witness(slurp(sim_witness));
    out.kv("accept_prob", accept_prob(v, w));
  });

  // maxaccept: dominant-eigenpair maximum acceptance
  auto* ma = app.add_subcommand("maxaccept", "maximum acceptance probability and witness");
  std::string ma_verifier, ma_method = "power";
  ma->add_option("--verifier", ma_verifier, "verifier file")->required();
  ma->add_option("--method", ma_method, "power|dense")->check(CLI::IsMember({"power", "dense"}));
  ma->callback([&] {
    StoqVerifier v = parse_verifier(slurp(ma_verifier));
    MaxAccept r = max_accept(
        v, ma_method == "dense" ? EigenMethod::Dense : EigenMethod::PowerIteration);
    out.kv("max_accept", r.prob);
    out.kv("lambda_max", r.lambda_max);
    out.kv("witness_support", static_cast<std::uint64_t>(r.witness.support_size()));
    for (const auto& e : r.witness.entries)
      out.kv("witness." + render_bits(e.key, r.witness.width), e.mass);
  });

  // rcd: build / distance / extremal / witness-search / norandom
  auto* rcd = app.add_subcommand("rcd", "circuit-distinguishability operations");
  rcd->require_subcommand(1);

  auto* rcd_build = rcd->add_subcommand("build", "derive an instance from a verifier");
  std::string rb_verifier, rb_out;
  double rb_alpha = 0.0, rb_beta = 1.0;
  rcd_build->add_option("--verifier", rb_verifier)->required();
  rcd_build->add_option("--alpha", rb_alpha, "YES threshold on the squared Hellinger distance");
  rcd_build->add_option("--beta", rb_beta, "NO threshold");
  rcd_build->add_option("-o,--output", rb_out, "instance file to write");
  rcd_build->callback([&] {
    RCDInstance inst = rcd_from_verifier(parse_verifier(slurp(rb_verifier)), rb_alpha, rb_beta);
    std::string text = serialize_rcd_instance(inst);
    if (rb_out.empty())
      std::fputs(text.c_str(), stdout);
    else
      spit(rb_out, text);
  });

  auto* rcd_dist = rcd->add_subcommand("distance", "squared Hellinger distance at a witness");
  std::string rd_instance, rd_witness;
  rcd_dist->add_option("--instance", rd_instance)->required();
  rcd_dist->add_option("--witness", rd_witness)->required();
  rcd_dist->callback([&] {
    RCDInstance inst = parse_rcd_instance(slurp(rd_instance));
    NonNegState w = parse_witness(slurp(rd_witness));
    out.kv("distance", rcd_distance(inst, w));
  });

  auto* rcd_ext = rcd->add_subcommand("extremal", "minimum ||R0-R1||^2 over witnesses");
  std::string re_instance;
  rcd_ext->add_option("--instance", re_instance)->required();
  rcd_ext->callback([&] {
    RCDInstance inst = parse_rcd_instance(slurp(re_instance));
    double d = rcd_extremal_distance(inst);
    out.kv("extremal_sq_norm", d);
    out.kv("max_accept", 1.0 - d / 4.0);
  });

  auto* rcd_ws = rcd->add_subcommand("witness-search", "find matching string pairs");
  std::string rw_instance, rw_support;
  int rw_jobs = 0;
  rcd_ws->add_option("--instance", rw_instance)->required();
  rcd_ws->add_option("--support", rw_support, "comma-separated witness strings (default: all)");
  rcd_ws->add_option("--jobs", rw_jobs, "worker count (0 = all cores)");
  rcd_ws->callback([&] {
    RCDInstance inst = parse_rcd_instance(slurp(rw_instance));
    std::vector<BitString> support;
    if (rw_support.empty()) {
      for (BitString s = 0; s < (BitString{1} << inst.layout.n_w); ++s) support.push_back(s);
    } else {
      support = parse_string_list(rw_support, inst.layout.n_w);
    }
    auto pair = exact_rcd_witness_search(inst, support, rw_jobs);
    if (!pair) {
      out.kv("witness_pair", "NONE");
      exit_code = 1;
      return;
    }
    std::string r0 = inst.layout.n_plus ? render_bits(pair->r0, inst.layout.n_plus) : "-";
    std::string r1 = inst.layout.n_plus ? render_bits(pair->r1, inst.layout.n_plus) : "-";
    std::printf("%s %s | %s %s\n", render_bits(pair->s0, inst.layout.n_w).c_str(), r0.c_str(),
                render_bits(pair->s1, inst.layout.n_w).c_str(), r1.c_str());
  });

  auto* rcd_nr = rcd->add_subcommand("norandom", "decide instances with no |+> ancillas");
  std::string rn_instance;
  rcd_nr->add_option("--instance", rn_instance)->required();
  rcd_nr->callback([&] {
    RCDInstance inst = parse_rcd_instance(slurp(rn_instance));
    NoRandomResult r = no_random_bits_decision(inst.c0, inst.c1, inst.layout);
    if (!r.distinguishable) {
      out.kv("verdict", "EQUIVALENT");
      exit_code = 1;
      return;
    }
    out.kv("verdict", "DISTINGUISHABLE");
    out.kv("s_i", render_bits(r.si, inst.layout.n_w));
    out.kv("s_j", render_bits(r.sj, inst.layout.n_w));
  });

  // amplify: conjunction repetition report
  auto* amp = app.add_subcommand("amplify", "conjunction-repetition soundness report");
  std::string am_verifier;
  int am_r = 2;
  amp->add_option("--verifier", am_verifier)->required();
  amp->add_option("-r,--rounds", am_r, "repetition count")->required();
  amp->callback([&] {
    StoqVerifier v = parse_verifier(slurp(am_verifier));
    AmplifyReport rep = soundness_amplify_check(v, am_r);
    out.kv_exact("lambda", rep.lambda_base);
    out.kv_exact("lambda_repeated", rep.lambda_repeated);
    out.kv_exact("lambda_power", rep.lambda_power);
    out.kv_exact("rel_error", rep.rel_error);
    out.kv("accept_base", 0.5 + 0.5 * std::max(rep.lambda_base, 0.0));
    out.kv("accept_repeated", 0.5 + 0.5 * std::max(rep.lambda_repeated, 0.0));
  });

  // test: seeded tester trials
  auto* tst = app.add_subcommand("test", "dual-access acceptance tester trials");
  std::string t_verifier, t_witness, t_easy;
  double t_a = 0, t_b = 0;
  std::uint64_t t_seed = 0, t_trials = 1;
  int t_jobs = 0;
  tst->add_option("--verifier", t_verifier)->required();
  tst->add_option("--witness", t_witness, "witness file");
  tst->add_option("--easy-witness", t_easy, "uniform | subset:... | setcsp:FILE");
  tst->add_option("--a", t_a)->required();
  tst->add_option("--b", t_b)->required();
  tst->add_option("--seed", t_seed)->required();
  tst->add_option("--trials", t_trials);
  tst->add_option("--jobs", t_jobs, "worker count (0 = all cores)");
  tst->callback([&] {
    StoqVerifier v = parse_verifier(slurp(t_verifier));
    if (t_witness.empty() == t_easy.empty())
      throw CLI::ValidationError("test", "give exactly one of --witness / --easy-witness");
    EasyWitness w = t_witness.empty()
                        ? parse_easy_witness(t_easy, v.layout.n_w)
                        : EasyWitness::from_state(parse_witness(slurp(t_witness)));
    TesterConfig cfg;
    cfg.a = t_a;
    cfg.b = t_b;
    std::vector<Verdict> verdicts;
    TrialStats stats = run_trials(v, w, cfg, t_seed, t_trials, t_jobs, &verdicts);
    for (std::uint64_t i = 0; i < verdicts.size(); ++i)
      out.kv("trial." + std::to_string(i),
             verdicts[static_cast<size_t>(i)] == Verdict::Accept ? "ACCEPT" : "REJECT");
    out.kv("accepts", stats.accepts);
    out.kv("trials", stats.trials);
    out.kv("accept_rate", stats.rate());
    out.kv("samples_per_trial", cfg.m_prime() + 2 * cfg.m());
    out.kv("queries_per_trial", cfg.m());
  });

  // setcsp: frustration / compile / minimize
  auto* sc = app.add_subcommand("setcsp", "set-constraint instance operations");
  sc->require_subcommand(1);

  auto* sc_fr = sc->add_subcommand("frustration", "frustration of a subset");
  std::string sf_instance, sf_subset;
  sc_fr->add_option("--instance", sf_instance)->required();
  sc_fr->add_option("--subset", sf_subset, "comma-separated strings")->required();
  sc_fr->callback([&] {
    SetCSPInstance inst = parse_setcsp(slurp(sf_instance));
    std::vector<BitString> s = parse_string_list(sf_subset, inst.n);
    out.kv("set_unsat", total_frustration(inst, s));
  });

  auto* sc_co = sc->add_subcommand("compile", "compile to a Hadamard-basis verifier");
  std::string sc_instance, sc_out;
  sc_co->add_option("--instance", sc_instance)->required();
  sc_co->add_option("-o,--output", sc_out, "verifier file to write");
  sc_co->callback([&] {
    SetCSPInstance inst = parse_setcsp(slurp(sc_instance));
    CompiledVerifier cv = compile_to_stoqma(inst);
    out.kv_exact("c0", cv.c0);
    out.kv_exact("c1", cv.c1);
    out.kv("selection_wires", static_cast<std::uint64_t>(cv.n_sel));
    out.kv("branch_values", cv.branch_values);
    out.kv("pad_values", cv.pad_values);
    std::string text = serialize_verifier(cv.verifier);
    if (sc_out.empty())
      std::fputs(text.c_str(), stdout);
    else
      spit(sc_out, text);
  });

  auto* sc_mi = sc->add_subcommand("minimize", "minimum frustration over subsets");
  std::string sm_instance;
  bool sm_heuristic = false;
  int sm_jobs = 0;
  sc_mi->add_option("--instance", sm_instance)->required();
  sc_mi->add_flag("--heuristic", sm_heuristic, "allow greedy search above the exhaustive cap");
  sc_mi->add_option("--jobs", sm_jobs, "worker count (0 = all cores)");
  sc_mi->callback([&] {
    SetCSPInstance inst = parse_setcsp(slurp(sm_instance));
    MinFrustrationOptions opts;
    opts.allow_heuristic = sm_heuristic;
    opts.jobs = sm_jobs;
    MinFrustration r = min_frustration(inst, opts);
    out.kv_exact("min_set_unsat", r.value);
    out.kv("heuristic", r.heuristic ? "yes" : "no");
    std::string subset;
    for (size_t i = 0; i < r.subset.size(); ++i)
      subset += (i ? "," : "") + render_bits(r.subset[i], inst.n);
    out.kv("subset", subset);
  });

  // cstoqma-ma: classical-witness identity
  auto* cm = app.add_subcommand("cstoqma-ma",
                                "computational-basis transform for a classical witness");
  std::string cm_verifier, cm_bits;
  cm->add_option("--verifier", cm_verifier)->required();
  cm->add_option("--witness-bits", cm_bits, "classical witness bitstring")->required();
  cm->callback([&] {
    StoqVerifier v = parse_verifier(slurp(cm_verifier));
    if (static_cast<int>(cm_bits.size()) != v.layout.n_w)
      throw std::runtime_error("witness bitstring length must equal n_w");
    BitString s = parse_bits(cm_bits);
    MAPredicateVerifier mv = cstoqma_to_ma(v, s);
    double tilde = ma_predicate_accept(mv);
    double orig = accept_prob(v, basis_state(v.layout.n_w, s));
    out.kv("accept_original", orig);
    out.kv("accept_transformed", tilde);
    out.kv("identity_residual", orig - (0.5 + 0.5 * tilde));
  });

  // flatten: expand controlled blocks for export
  auto* fl = app.add_subcommand("flatten", "rewrite controlled blocks into plain gates");
  std::string fl_circuit, fl_out;
  fl->add_option("--circuit", fl_circuit)->required();
  fl->add_option("-o,--output", fl_out);
  fl->callback([&] {
    ReversibleCircuit c = parse_circuit(slurp(fl_circuit));
    std::string text = serialize(flatten(c));
    if (fl_out.empty())
      std::fputs(text.c_str(), stdout);
    else
      spit(fl_out, text);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 2 : 0;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const CapExceeded& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return exit_code;
}
