#include "endoring/report.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "endoring/inertia.hpp"
#include "endoring/linmap.hpp"
#include "endoring/oracle.hpp"

namespace endoring {

using json = nlohmann::json;

std::vector<unsigned> parse_levels(const std::string& text) {
  std::vector<unsigned> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos)
      throw UsageError("bad level '" + item + "'");
    unsigned long v = std::stoul(item);
    if (v == 0 || v > 64) throw UsageError("levels must lie in 1..64");
    if (!out.empty() && v <= out.back()) throw UsageError("levels must be strictly ascending");
    out.push_back(static_cast<unsigned>(v));
  }
  if (out.empty()) throw UsageError("no levels given");
  return out;
}

namespace {

json j_card(const Cardinal& c) { return c ? json(*c) : json("omega"); }
json j_bound(const Bound& b) { return b ? json(*b) : json("inf"); }

json j_primes(const std::vector<Prime>& ps) {
  json a = json::array();
  for (Prime p : ps) a.push_back(p);
  return a;
}

json j_selector(const PrimeSelector& s) { return {{"cofinite", s.default_member}, {"primes", j_primes(s.exceptions)}}; }

json j_mult(const MultValue& v) { return to_string(v); }

json j_jelement(const JElement& x) {
  json ex = json::object();
  for (const auto& [p, v] : x.exceptions()) ex[std::to_string(p)] = to_string(v);
  return {{"default", to_string(x.default_value())}, {"exceptions", ex}};
}

json j_hdesc(const HDescriptor& d) {
  json o = json::object();
  for (const auto& [p, b] : d) o[std::to_string(p)] = {{"e", j_bound(b.e)}, {"eps", j_bound(b.eps)}};
  return o;
}

json j_group(const GroupDesc& g) {
  json o;
  o["name"] = g.name;
  o["text"] = serialize(g);
  o["periodic"] = g.is_periodic();
  o["finite"] = g.is_finite();
  o["ftfr"] = g.has_ftfr();
  Invariants inv = invariants(g);
  json primes = json::object();
  for (const auto& [p, pi] : inv.primes)
    primes[std::to_string(p)] = {{"max_k", pi.max_k}, {"eps_k", pi.eps_k}, {"d", j_card(pi.d)}, {"s_rank", pi.s_rank},
                                 {"e", j_bound(pi.e)},   {"eps", j_bound(pi.eps)}, {"c", pi.c}, {"critical", pi.critical}};
  o["invariants"] = {{"r0", j_card(inv.r0)},
                     {"primes", primes},
                     {"pi0", j_selector(inv.pi0)},
                     {"pi_star", j_selector(inv.pi_star)},
                     {"pi_c", j_selector(inv.pi_c)}};
  if (g.has_ftfr()) {
    o["h_descriptor"] = j_hdesc(h_descriptor(g));
    json nm = json::object();
    for (const auto& [p, c] : nm_type(g)) nm[std::to_string(p)] = c;
    o["nm_type"] = nm;
  }
  return o;
}

json j_classify(const Endo& phi) {
  EndoClass c = classify(phi);
  json o;
  o["finitary"] = c.finitary;
  o["fm"] = c.fm;
  o["multiplication"] = c.multiplication ? j_mult(*c.multiplication) : json(nullptr);
  o["quasi"] = c.quasi ? json{{"r", to_string(c.quasi->r)}, {"pi", j_primes(c.quasi->pi)}, {"scalar", j_mult(c.quasi->scalar)}}
                       : json(nullptr);
  o["semi"] = c.semi ? json{{"n", to_string(c.semi->n)}, {"pi", j_primes(c.semi->pi)}, {"alpha", j_mult(c.semi->alpha)}}
                     : json(nullptr);
  o["mini"] = c.mini ? json{{"n", to_string(c.mini->n)}, {"pi", j_primes(c.mini->pi)}} : json(nullptr);
  return o;
}

json j_certificate(const InertialCertificate& c) {
  json pp = json::object();
  for (const auto& [p, x] : c.per_prime) {
    json e;
    e["alpha_cyc"] = x.alpha_cyc ? json(to_string(x.alpha_cyc->value) + " mod " + to_string(x.alpha_cyc->modulus()))
                                 : json(nullptr);
    e["alpha_div"] = x.alpha_div ? json(to_string(*x.alpha_div)) : json(nullptr);
    e["bridged"] = x.bridged;
    pp[std::to_string(p)] = e;
  }
  return {{"r", c.r ? json(to_string(*c.r)) : json(nullptr)},
          {"pi", j_primes(c.pi)},
          {"per_prime", pp},
          {"exempt_blocks", c.exempt_blocks}};
}

json j_violation(const Violation& v) {
  return {{"kind", to_string(v.kind)},
          {"site", v.site},
          {"prime", v.prime ? json(*v.prime) : json(nullptr)},
          {"hint", v.hint},
          {"message", v.message}};
}

json j_index(const IndexValue& v) { return to_string(v); }

json j_evidence(const InertnessEvidence& ev) {
  json levels = json::array();
  for (const auto& r : ev.per_level)
    levels.push_back({{"level", r.level}, {"max_index", j_index(r.max_index)}, {"argmax", r.argmax_family}});
  return {{"per_level", levels},
          {"untruncated_max", j_index(ev.untruncated_max)},
          {"untruncated_argmax", ev.untruncated_argmax},
          {"families", ev.sampled_families},
          {"hint", to_string(ev.hint)}};
}

json j_fs(const FsReport& fs) {
  json levels = json::array();
  for (const auto& [n, v] : fs.per_level) levels.push_back({{"level", n}, {"max_ratio", to_string(v)}});
  return {{"per_level", levels}, {"hint", to_string(fs.hint)}};
}

json j_witness(const std::optional<WitnessFamily>& w) {
  if (!w) return nullptr;
  json idx = json::array();
  for (const auto& [n, v] : w->indices) idx.push_back({{"n", n}, {"index", j_index(v)}});
  json first = json::array();
  if (!w->members.empty())
    for (const auto& x : w->members.back().generators) first.push_back(to_string(*w->members.back().group, x));
  return {{"family", w->name}, {"indices", idx}, {"unbounded", w->unbounded}, {"last_generators", first}};
}

struct Context {
  const SessionConfig& cfg;
  bool contradiction = false;
  bool usage_problem = false;
};

Verdict verdict_of(const Endo& phi, const SessionConfig& cfg) {
  Verdict v = is_inertial(phi);
  if (!cfg.inject_wrong_verdict) return v;
  if (std::holds_alternative<InertialCertificate>(v))
    return Violation{ViolationKind::TfNotScalar, {}, std::nullopt, "rank-jump", "injected"};
  return InertialCertificate{};
}

/// Verdict plus oracle cross-check; `full` adds the FS profile and the
/// exhaustive truncation scan.
json check_endo(Context& ctx, const std::string& name, const Endo& raw, bool full) {
  json o;
  o["name"] = name;
  o["group"] = raw.g().name;
  auto issues = validate(raw);
  o["issues"] = issues;
  if (!issues.empty()) {
    o["valid"] = false;
    ctx.usage_problem = true;
    return o;
  }
  o["valid"] = true;
  Endo phi = normalize(raw);
  o["classify"] = j_classify(phi);
  Verdict v = verdict_of(phi, ctx.cfg);
  bool inertial = std::holds_alternative<InertialCertificate>(v);
  o["inertial"] = inertial;
  bool agree = true;
  if (inertial) {
    o["certificate"] = j_certificate(std::get<InertialCertificate>(v));
    InertnessEvidence ev = inertness_profile(phi, ctx.cfg.levels, ctx.cfg.samples, ctx.cfg.seed);
    o["evidence"] = j_evidence(ev);
    agree = ev.hint != Hint::Growing && ev.untruncated_max.has_value();
  } else {
    const Violation& viol = std::get<Violation>(v);
    o["violation"] = j_violation(viol);
    auto w = witness_search(phi, viol, ctx.cfg.budget);
    o["witness"] = j_witness(w);
    agree = w && w->unbounded;
  }
  if (full && phi.g().is_periodic()) {
    FsReport fs = fs_profile(phi, ctx.cfg.levels, ctx.cfg.samples, ctx.cfg.seed);
    o["fs_profile"] = j_fs(fs);
    if (inertial && fs.hint == Hint::Growing) agree = false;
  }
  if (full && ctx.cfg.enumerate_all) {
    json ex = json::array();
    for (unsigned n : ctx.cfg.levels) {
      TruncatedEndo te = truncate_endo(phi, n);
      if (te.group->blocks.empty() || finite_order(*te.group) > 1024) continue;
      Integer best = 1;
      auto subs = enumerate_all_subgroups(te.group);
      for (const auto& h : subs) {
        IndexValue idx = index_in_sum(h, te.phi);
        if (idx && *idx > best) best = *idx;
      }
      ex.push_back({{"level", n}, {"subgroups", subs.size()}, {"max_index", to_string(best)}});
    }
    o["exhaustive"] = ex;
  }
  o["oracle_agrees"] = agree;
  if (!agree) ctx.contradiction = true;
  return o;
}

json decompose_endo(Context& ctx, const std::string& name, const Endo& raw) {
  json o;
  o["name"] = name;
  o["group"] = raw.g().name;
  auto issues = validate(raw);
  if (!issues.empty()) {
    o["valid"] = false;
    o["issues"] = issues;
    ctx.usage_problem = true;
    return o;
  }
  o["valid"] = true;
  Endo phi = normalize(raw);
  Verdict v = is_inertial(phi);
  if (auto* viol = std::get_if<Violation>(&v)) {
    o["inertial"] = false;
    o["violation"] = j_violation(*viol);
    return o;
  }
  o["inertial"] = true;
  Decomposition d = decompose(phi, std::get<InertialCertificate>(v));
  o["sm"] = serialize("sm", d.sm);
  o["ui"] = serialize("ui", d.ui);
  o["nm"] = serialize("nm", d.nm);
  o["phi1"] = serialize("phi1", d.phi1);
  o["phi2"] = serialize("phi2", d.phi2);
  json bridge = json::object();
  for (const auto& [p, s] : d.bridge) bridge[std::to_string(p)] = to_string(s);
  o["bridge"] = bridge;
  EndoClass sm_class = classify(d.sm);
  EndoClass nm_class = classify(d.nm);
  bool sum_ok = equal(add(add(d.sm, d.ui), d.nm), phi);
  bool sm_ok = sm_class.semi.has_value() || sm_class.multiplication.has_value() || is_finitary(d.sm);
  bool ui_ok = phi.g().has_ftfr() ? is_uniform(d.ui) : is_finitary(d.ui);
  bool nm_ok = nm_class.mini.has_value() || equal(d.nm, Endo::zero(phi.group));
  o["checks"] = {{"sum_equal", sum_ok}, {"sm_semi", sm_ok}, {"ui_uniform", ui_ok}, {"nm_mini", nm_ok}};
  if (phi.g().has_ftfr() && ui_ok) {
    HElement h = ui_class_in_H(d.ui);
    o["ui_class"] = {{"value", j_jelement(h.value)}, {"descriptor", j_hdesc(h.descriptor)}};
  }
  if (phi.g().is_periodic()) {
    auto split = fm_split(d.ui);
    o["ui_fm_split"] = split ? json{{"fin", serialize("fin", split->fin)}, {"qm", serialize("qm", split->qm)}} : json(nullptr);
  }
  if (!(sum_ok && sm_ok && ui_ok && nm_ok)) ctx.contradiction = true;
  return o;
}

json defect_matrix(Context& ctx, const std::string& name, const ExactMatrix& m) {
  json o;
  o["name"] = name;
  o["field"] = m.field.is_rational() ? std::string("Q") : "F_" + std::to_string(m.field.p);
  o["n"] = m.size();
  auto rows = [](const ExactMatrix& x) {
    json a = json::array();
    for (const auto& r : x.rows) {
      json row = json::array();
      for (const auto& v : r) row.push_back(to_string(v));
      a.push_back(row);
    }
    return a;
  };
  auto result = [&](const DefectResult& d) {
    return json{{"lambda", d.lambda ? json(to_string(*d.lambda)) : json(nullptr)},
                {"defect", d.defect},
                {"finitary_part", rows(d.finitary_part)}};
  };
  DefectResult d = scalar_defect(m);
  o["scalar_defect"] = result(d);
  o["nonzero_scalar_defect"] = result(scalar_defect(m, true));
  GrowthReport g = growth_bound_check(m, ctx.cfg.samples, ctx.cfg.seed);
  o["growth_check"] = {{"trials", g.trials}, {"max_observed", g.max_observed}, {"violations", g.violations}};
  if (g.violations > 0) ctx.contradiction = true;
  if (!m.field.is_rational()) {
    std::uint64_t budget = ctx.cfg.enumerate_all ? (1u << 20) : (1u << 12);
    if (subspace_count(m.field.p, m.size()) <= Integer(static_cast<unsigned long>(budget))) {
      std::size_t mx = max_inert_codim(m, budget);
      o["max_inert_codim"] = mx;
      o["max_equals_defect"] = mx == d.defect;
    }
  }
  return o;
}

}  // namespace

RunResult run_documents(const SessionConfig& cfg, const std::vector<std::string>& labels,
                        const std::vector<Document>& docs) {
  RunResult res;
  try {
    if (cfg.samples == 0) throw UsageError("samples must be at least 1");
    Context ctx{cfg};
    json results = json::array();
    auto selected = [&](const std::string& name) { return !cfg.only || *cfg.only == name; };
    bool any = false;
    for (const auto& doc : docs) {
      if (cfg.command == "analyze") {
        for (const auto& g : doc.groups) results.push_back({{"kind", "group"}, {"group", j_group(*g)}});
        for (const auto& e : doc.endos) {
          if (!selected(e.name)) continue;
          auto issues = validate(e.endo);
          json o{{"kind", "endo"}, {"name", e.name}, {"group", e.endo.g().name}, {"issues", issues}};
          if (issues.empty()) o["classify"] = j_classify(normalize(e.endo));
          results.push_back(o);
        }
        any = true;
      } else if (cfg.command == "check" || cfg.command == "oracle") {
        for (const auto& e : doc.endos)
          if (selected(e.name)) {
            results.push_back(check_endo(ctx, e.name, e.endo, cfg.command == "oracle"));
            any = true;
          }
      } else if (cfg.command == "decompose") {
        for (const auto& e : doc.endos)
          if (selected(e.name)) {
            results.push_back(decompose_endo(ctx, e.name, e.endo));
            any = true;
          }
      } else if (cfg.command == "defect") {
        for (const auto& m : doc.matrices)
          if (selected(m.name)) {
            results.push_back(defect_matrix(ctx, m.name, m.matrix));
            any = true;
          }
      } else {
        throw UsageError("unknown command '" + cfg.command + "'");
      }
    }
    if (!any) throw UsageError("nothing to do: no matching " + std::string(cfg.command == "defect" ? "matrix" : "endo"));
    json report;
    report["command"] = cfg.command;
    report["inputs"] = labels;
    report["results"] = results;
    report["seed"] = cfg.seed;
    report["version"] = kVersion;
    res.report = report.dump();
    res.exit_code = ctx.contradiction ? 2 : (ctx.usage_problem ? 1 : 0);
    if (ctx.usage_problem) res.error = "invalid endomorphism in input";
  } catch (const UsageError& e) {
    res.exit_code = 1;
    res.error = e.what();
  } catch (const UnsupportedError& e) {
    res.exit_code = 1;
    res.error = e.what();
  }
  return res;
}

RunResult run(const SessionConfig& cfg) {
  std::vector<Document> docs;
  try {
    if (cfg.inputs.empty()) throw UsageError("no input files");
    for (const auto& path : cfg.inputs) docs.push_back(parse_file(path));
  } catch (const UsageError& e) {
    RunResult r;
    r.exit_code = 1;
    r.error = e.what();
    return r;
  }
  return run_documents(cfg, cfg.inputs, docs);
}

}  // namespace endoring
