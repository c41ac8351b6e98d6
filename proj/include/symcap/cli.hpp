#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "symcap/builders.hpp"
#include "symcap/capacities.hpp"
#include "symcap/certificate.hpp"
#include "symcap/certificate_json.hpp"
#include "symcap/known_values.hpp"
#include "symcap/packing.hpp"
#include "symcap/toric.hpp"
#include "symcap/weights.hpp"

namespace symcap::cli {

enum ExitCode : int { kOk = 0, kNegative = 1, kUsage = 2, kResource = 3 };

/// Decimal scientific notation with `digits` significant digits, rounded
/// down or up so that intervals print outward.
inline std::string scientific(const BigRational& q, int digits, bool up) {
  if (q == 0) return "0";
  if (q < 0) return "-" + scientific(-q, digits, !up);
  long e = static_cast<long>(mpz_sizeinbase(q.get_num_mpz_t(), 10)) -
           static_cast<long>(mpz_sizeinbase(q.get_den_mpz_t(), 10));
  auto pow10 = [](long k) { return BigRational(pow_int(BigInt(10), static_cast<unsigned long>(k))); };
  auto scale = [&](long k) { return k >= 0 ? pow10(k) : BigRational(1) / pow10(-k); };
  while (q >= scale(e + 1)) ++e;
  while (q < scale(e)) --e;
  BigRational scaled = q * scale(digits - 1 - e);
  BigInt m = up ? ceil_of(scaled) : floor_of(scaled);
  if (m == pow_int(BigInt(10), static_cast<unsigned long>(digits))) {
    m /= 10;
    ++e;
  }
  std::string s = m.get_str();
  std::string out = s.substr(0, 1);
  if (s.size() > 1) out += "." + s.substr(1);
  return out + "e" + std::to_string(e);
}

inline std::string interval_string(const IntervalApprox& iv, int digits = 16) {
  return "[" + scientific(iv.lo, digits, false) + ", " + scientific(iv.hi, digits, true) + "]";
}

inline Json interval_json(const IntervalApprox& iv) {
  return Json{{"lo", to_string(iv.lo)}, {"hi", to_string(iv.hi)}, {"bits", iv.precision_bits},
              {"lo_decimal", scientific(iv.lo, 20, false)}, {"hi_decimal", scientific(iv.hi, 20, true)}};
}

/// "w" or "w^m" entries separated by commas.
inline std::vector<WeightEntry> parse_balls(const std::string& text) {
  std::vector<WeightEntry> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto caret = item.find('^');
    BigRational w = parse_rational(item.substr(0, caret));
    BigInt m = caret == std::string::npos ? BigInt(1) : parse_integer(item.substr(caret + 1));
    out.push_back(WeightEntry{w, m});
  }
  if (out.empty()) throw InvalidInput("no balls given");
  return out;
}

inline std::string witness_string(const OptimalityWitness& w) { return w.to_string(); }

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(const std::vector<std::string>& args) {
    CLI::App app{"Exact symplectic embedding obstructions and certificates", "symcap"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Expand all help");
    std::string bits_env = std::getenv("SYMCAP_BITS") ? std::getenv("SYMCAP_BITS") : "";
    unsigned long bits = 4096;
    if (!bits_env.empty()) {
      try {
        bits = std::stoul(bits_env);
      } catch (const std::exception&) {
        err_ << "error: SYMCAP_BITS must be an integer\n";
        return kUsage;
      }
    }
    app.add_option("--bits", bits, "Precision budget in bits (default 4096 or $SYMCAP_BITS)");
    app.add_flag("--json", json_, "Machine-readable output");

    std::string axes;
    std::size_t count = 0;
    auto* eh = app.add_subcommand("eh", "Ekeland-Hofer capacities of an ellipsoid");
    eh->add_option("axes", axes, "Comma-separated axes, e.g. 1,3/2,2")->required();
    eh->add_option("--count", count, "Number of capacities")->default_val(10);

    std::string e_str, f_str, target_str;
    auto* weights = app.add_subcommand("weights", "Continued fraction and weight expansion of f/e");
    weights->add_option("e", e_str)->required();
    weights->add_option("f", f_str)->required();
    weights->add_option("--target", target_str, "c,d: print the ball problem for E(e,f) -> E(c,d)");

    std::string mu_str, balls_str, ellipsoid_str;
    auto* pack = app.add_subcommand("pack", "Ball packing feasibility");
    pack->add_option("mu", mu_str, "Target ball capacity");
    pack->add_option("balls", balls_str, "Ball capacities, w or w^m, comma-separated");
    pack->add_option("--ellipsoid", ellipsoid_str, "e,f,c,d: decide E(e,f) -> E(c,d) instead");

    unsigned long k_pn = 0;
    auto* pn = app.add_subcommand("packing-number", "Packing number p_k of the 4-ball");
    pn->add_option("k", k_pn)->required();

    std::string a_str, b_str;
    std::size_t max_count = kDefaultEhCount;
    auto* fval = app.add_subcommand("fval", "Bounds on f(a,b)");
    fval->add_option("a", a_str)->required();
    fval->add_option("b", b_str)->required();
    fval->add_option("--max-count", max_count, "Capacities used for the lower bound")->default_val(kDefaultEhCount);

    std::string kind;
    std::vector<std::string> params;
    std::string out_file;
    auto* certify = app.add_subcommand("certify", "Build a certificate (JSON)");
    certify->add_option("kind", kind, "olga2|olga3|olga4|fullfill2|lambdatrick|pack|fval")->required();
    certify->add_option("params", params, "Builder parameters")->required();
    certify->add_option("-o,--output", out_file, "Write to a file instead of stdout");

    std::string cert_file;
    auto* verify = app.add_subcommand("verify", "Verify a certificate file");
    verify->add_option("file", cert_file)->required()->check(CLI::ExistingFile);

    unsigned n_stab = 3;
    unsigned long stab_bits = 64;
    bool remark = false;
    auto* stab = app.add_subcommand("stability", "beta_n and M_n");
    stab->add_option("n", n_stab)->default_val(3);
    stab->add_option("--interval-bits", stab_bits, "Width of the printed intervals")->default_val(64);
    stab->add_flag("--remark", remark, "Also print the volume-filling hypothesis bound");

    std::string toric_kind;
    std::vector<unsigned long> toric_args;
    bool refined = false;
    auto* toric = app.add_subcommand("toric", "Lattice polytope decompositions");
    toric->add_option("kind", toric_kind, "subdivide K N | fig2 K X | unit S")->required();
    toric->add_option("args", toric_args)->required();
    toric->add_flag("--refined", refined, "fig2: replace upward triangles by unit triangles");

    std::string a_max = "3", b_max = "9";
    unsigned steps = 12, threads = 0;
    std::size_t map_count = 100;
    auto* fig1 = app.add_subcommand("fig1-map", "Sweep f over a rational grid");
    fig1->add_option("--a-max", a_max)->default_val("3");
    fig1->add_option("--b-max", b_max)->default_val("9");
    fig1->add_option("--steps", steps, "Grid subdivisions per axis")->default_val(12);
    fig1->add_option("--max-count", map_count, "Capacities used for lower bounds")->default_val(100);
    fig1->add_option("--threads", threads, "Worker threads (0 = hardware)")->default_val(0);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
      app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
      out_ << app.help();
      return kOk;
    } catch (const CLI::CallForAllHelp&) {
      out_ << app.help("", CLI::AppFormatMode::All);
      return kOk;
    } catch (const CLI::ParseError& e) {
      err_ << "error: " << e.what() << "\n";
      return kUsage;
    }

    try {
      budget_ = PrecisionBudget(bits);
      if (*eh) return cmd_eh(axes, count);
      if (*weights) return cmd_weights(e_str, f_str, target_str);
      if (*pack) return cmd_pack(mu_str, balls_str, ellipsoid_str);
      if (*pn) return cmd_packing_number(k_pn);
      if (*fval) return cmd_fval(a_str, b_str, max_count);
      if (*certify) return cmd_certify(kind, params, out_file);
      if (*verify) return cmd_verify(cert_file);
      if (*stab) return cmd_stability(n_stab, stab_bits, remark);
      if (*toric) return cmd_toric(toric_kind, toric_args, refined);
      if (*fig1) return cmd_fig1(a_max, b_max, steps, map_count, threads);
    } catch (const HypothesisViolated& e) {
      err_ << "hypothesis violated: " << e.what() << "\n";
      return kNegative;
    } catch (const VerificationFailed& e) {
      err_ << "verification failed: " << e.what() << "\n";
      return kNegative;
    } catch (const PrecisionExhausted& e) {
      err_ << "precision exhausted: " << e.what() << "\n";
      return kResource;
    } catch (const ResourceLimit& e) {
      err_ << "resource limit: " << e.what() << "\n";
      return kResource;
    } catch (const Error& e) {
      err_ << "error: " << e.what() << "\n";
      return kUsage;
    }
    return kUsage;
  }

 private:
  void emit(const Json& j) { out_ << j.dump(2) << "\n"; }

  int cmd_eh(const std::string& axes, std::size_t count) {
    Ellipsoid e = Ellipsoid::parse(axes);
    CapacityList caps = ek_capacities(e, count, budget_);
    if (json_) {
      emit(Json{{"schema", "symcap.eh/1"}, {"axes", detail::tuple_json(e.axes())}, {"capacities", detail::tuple_json(caps)}});
    } else {
      out_ << format_list(caps) << "\n";
    }
    return kOk;
  }

  int cmd_weights(const std::string& e_str, const std::string& f_str, const std::string& target) {
    BigRational e = parse_rational(e_str), f = parse_rational(f_str);
    WeightExpansion w = weight_expansion(e, f);
    std::optional<BallPackingProblem> problem;
    if (!target.empty()) {
      auto cd = parse_expr_list(target);
      if (cd.size() != 2 || !cd[0].is_rational() || !cd[1].is_rational() || !is_integer(e) || !is_integer(f) ||
          !is_integer(cd[0].rational_value()) || !is_integer(cd[1].rational_value()))
        throw InvalidInput("--target needs integers c,d and integer e, f");
      problem = ellipsoid_to_ball_problem(e.get_num(), f.get_num(), cd[0].rational_value().get_num(),
                                          cd[1].rational_value().get_num());
    }
    auto entries_json = [](const std::vector<WeightEntry>& es) {
      Json arr = Json::array();
      for (const auto& x : es) arr.push_back(Json{{"weight", to_string(x.weight)}, {"multiplicity", x.multiplicity.get_str()}});
      return arr;
    };
    auto entries_text = [](const std::vector<WeightEntry>& es) {
      std::string s;
      for (std::size_t i = 0; i < es.size(); ++i)
        s += (i ? ", " : "") + to_string(es[i].weight) + (es[i].multiplicity == 1 ? "" : "^" + es[i].multiplicity.get_str());
      return s;
    };
    if (json_) {
      Json j{{"schema", "symcap.weights/1"}, {"e", to_string(e)}, {"f", to_string(f)}, {"weights", entries_json(w.entries)}};
      if (is_integer(e) && is_integer(f))
        j["continued_fraction"] = continued_fraction(e.get_num(), f.get_num()).to_string();
      if (problem) j["problem"] = Json{{"target", to_string(problem->target)}, {"balls", entries_json(problem->balls)}};
      emit(j);
    } else {
      if (is_integer(e) && is_integer(f)) out_ << "continued fraction: " << continued_fraction(e.get_num(), f.get_num()).to_string() << "\n";
      out_ << "weights: " << entries_text(w.entries) << "\n";
      if (problem) out_ << "problem: B(" << to_string(problem->target) << ") <- " << entries_text(problem->balls) << "\n";
    }
    return kOk;
  }

  int cmd_pack(const std::string& mu, const std::string& balls, const std::string& ellipsoid) {
    BallPackingProblem p;
    if (!ellipsoid.empty()) {
      if (!mu.empty()) throw InvalidInput("give either mu and balls or --ellipsoid");
      auto v = parse_expr_list(ellipsoid);
      if (v.size() != 4) throw InvalidInput("--ellipsoid needs e,f,c,d");
      std::vector<BigInt> z;
      for (const auto& x : v) {
        if (!x.is_rational() || !is_integer(x.rational_value())) throw InvalidInput("--ellipsoid needs integers");
        z.push_back(x.rational_value().get_num());
      }
      p = ellipsoid_to_ball_problem(z[0], z[1], z[2], z[3]);
    } else {
      if (mu.empty() || balls.empty()) throw InvalidInput("pack needs mu and balls");
      p = BallPackingProblem{parse_rational(mu), parse_balls(balls)};
    }
    FeasibilityResult r = feasible(p);
    if (json_) {
      Json j{{"schema", "symcap.pack-result/1"}, {"status", r.feasible() ? "Feasible" : "Infeasible"}, {"moves", r.moves}};
      if (r.class_witness) {
        Json m = Json::array();
        for (const auto& x : r.class_witness->mults) m.push_back(x.get_str());
        j["witness"] = Json{{"type", "class"}, {"degree", r.class_witness->degree.get_str()}, {"multiplicities", m}};
      } else if (r.volume_witness) {
        j["witness"] = Json{{"type", "volume"},
                            {"target_squared", to_string(r.volume_witness->target_squared)},
                            {"sum_of_squares", to_string(r.volume_witness->sum_of_squares)}};
      }
      if (r.witness_truncated) j["witness_truncated"] = true;
      emit(j);
    } else {
      out_ << r.describe() << "\n";
    }
    return r.feasible() ? kOk : kNegative;
  }

  int cmd_packing_number(unsigned long k) {
    PackingNumber p = packing_number_detail(k);
    if (json_) {
      Json j{{"schema", "symcap.packing-number/1"}, {"k", k}, {"value", to_string(p.value)}};
      j["binding"] = p.binding_class ? Json(p.binding_class->to_string()) : Json("volume");
      emit(j);
    } else {
      out_ << to_string(p.value) << "\n";
    }
    return kOk;
  }

  int cmd_fval(const std::string& a_str, const std::string& b_str, std::size_t count) {
    RealExpr a = parse_expr(a_str), b = parse_expr(b_str);
    FBounds fb = f_bounds(a, b, count, budget_);
    if (json_) {
      Json j{{"schema", "symcap.fval/1"}, {"a", format(a)}, {"b", format(b)}, {"lower", format(fb.lower)}, {"upper", format(fb.upper)}};
      if (fb.known)
        j["known"] = Json{{"value", format(fb.known->value)}, {"region", fb.known->justification},
                          {"witness", fb.known->witness.to_string()}};
      if (fb.certificate) j["certificate"] = certificate_to_json(*fb.certificate);
      emit(j);
    } else {
      out_ << "lower: " << format(fb.lower) << "\n";
      out_ << "upper: " << format(fb.upper) << "\n";
      if (fb.known)
        out_ << "known: " << format(fb.known->value) << " (" << fb.known->justification << ", " << fb.known->witness.to_string()
             << ")\n";
    }
    return kOk;
  }

  int cmd_certify(const std::string& kind, const std::vector<std::string>& p, const std::string& out_file) {
    auto need = [&](std::size_t n) {
      if (p.size() != n) throw InvalidInput(kind + " takes " + std::to_string(n) + " parameters");
    };
    auto uint = [&](std::size_t i) {
      BigInt z = parse_integer(p[i]);
      if (z < 0 || !z.fits_ulong_p()) throw InvalidInput("parameter out of range: " + p[i]);
      return z.get_ui();
    };
    Json j;
    if (kind == "olga2") {
      need(2);
      j = certificate_to_json(build_olga2(parse_integer(p[0]), uint(1)));
    } else if (kind == "olga3") {
      need(2);
      j = certificate_to_json(build_olga3(parse_integer(p[0]), static_cast<unsigned>(uint(1)), budget_));
    } else if (kind == "olga4") {
      need(2);
      j = certificate_to_json(build_olga4(parse_expr(p[0]), static_cast<unsigned>(uint(1)), budget_));
    } else if (kind == "fullfill2") {
      need(2);
      j = certificate_to_json(build_fullfill2(parse_expr(p[0]), parse_expr(p[1]), budget_));
    } else if (kind == "lambdatrick") {
      need(4);
      j = certificate_to_json(build_lambdatrick(parse_integer(p[0]), parse_integer(p[1]), parse_integer(p[2]), parse_integer(p[3])));
    } else if (kind == "pack") {
      need(2);
      j = pack_to_json(build_pack(parse_integer(p[0]), static_cast<unsigned>(uint(1)), budget_));
    } else if (kind == "fval") {
      need(2);
      FBounds fb = f_bounds(parse_expr(p[0]), parse_expr(p[1]), kDefaultEhCount, budget_);
      if (!fb.certificate) {
        RealExpr b = parse_expr(p[1]);
        ChainBuilder ch({RealExpr(1), parse_expr(p[0]), b});
        ch.include(AxisTuple(3, b));
        fb.certificate = ch.finish(Ellipsoid::ball(b, 3));
      }
      j = certificate_to_json(*fb.certificate);
    } else {
      throw InvalidInput("unknown certificate kind '" + kind + "'");
    }
    if (out_file.empty()) {
      emit(j);
    } else {
      std::ofstream f(out_file);
      if (!f) throw InvalidInput("cannot write " + out_file);
      f << j.dump(2) << "\n";
    }
    return kOk;
  }

  int cmd_verify(const std::string& file) {
    std::ifstream in(file);
    std::stringstream ss;
    ss << in.rdbuf();
    Json j;
    try {
      j = Json::parse(ss.str());
    } catch (const nlohmann::json::exception& e) {
      throw InvalidInput(std::string("not valid JSON: ") + e.what());
    }
    VerificationResult r;
    if (j.value("schema", "") == kPackSchema) {
      PackCertificate pc{parse_integer(j.at("k").get<std::string>()), j.at("n").get<unsigned>(), {}, true,
                         certificate_from_json(j.at("ellipsoid"))};
      r = verify_pack(pc, budget_);
    } else {
      r = verify_certificate(certificate_from_json(j), budget_);
    }
    if (json_)
      emit(Json{{"schema", "symcap.verify/1"}, {"valid", r.valid}, {"step", r.step}, {"reason", r.reason}});
    else
      out_ << r.to_string() << "\n";
    return r.valid ? kOk : kNegative;
  }

  int cmd_stability(unsigned n, unsigned long bits, bool remark) {
    StabilityBounds s = stability_bounds(n, bits, budget_);
    std::optional<IntervalApprox> bound;
    if (remark) bound = fullfill_hypothesis_bound(bits, budget_);
    if (json_) {
      Json j{{"schema", "symcap.stability/1"}, {"n", n}, {"M", format(s.M)}, {"M_interval", interval_json(s.M_interval)}};
      if (s.beta) {
        j["beta"] = format(*s.beta);
        j["beta_interval"] = interval_json(*s.beta_interval);
        j["M_equals_beta"] = s.beta_dominates;
      }
      if (bound) j["fullfill_bound"] = interval_json(*bound);
      emit(j);
    } else {
      if (s.beta) out_ << "beta_" << n << " in " << interval_string(*s.beta_interval) << "\n";
      if (s.M.is_rational())
        out_ << "M_" << n << " = " << format(s.M) << "\n";
      else
        out_ << "M_" << n << " in " << interval_string(s.M_interval) << (n >= 3 ? (s.beta_dominates ? " (= beta)" : " (= M_" + std::to_string(n - 1) + "^2)") : "") << "\n";
      if (bound) out_ << "volume-filling hypothesis bound in " << interval_string(*bound) << "\n";
    }
    return kOk;
  }

  int cmd_toric(const std::string& kind, const std::vector<unsigned long>& a, bool refined) {
    Decomposition d;
    if (kind == "subdivide") {
      if (a.size() != 2) throw InvalidInput("toric subdivide K N");
      d = subdivide(a[0], a[1]).as_decomposition(BigInt(a[0]));
    } else if (kind == "fig2") {
      if (a.size() != 2) throw InvalidInput("toric fig2 K X");
      d = refined ? fig2_refined(a[0], a[1]) : fig2_decomposition(a[0], a[1]);
    } else if (kind == "unit") {
      if (a.size() != 1) throw InvalidInput("toric unit S");
      d = unit_subdivide(a[0]);
    } else {
      throw InvalidInput("unknown toric kind '" + kind + "'");
    }
    TilingReport r = verify_tiling(d);
    if (json_) {
      Json j = decomposition_to_json(d);
      j["valid"] = r.ok;
      if (!r.ok) j["reason"] = r.reason;
      emit(j);
    } else {
      out_ << (r.ok ? "Valid tiling" : "Invalid tiling: " + r.reason) << ", " << d.parts.size() << " parts";
      std::string inv;
      for (const auto& [cap, m] : d.inventory()) inv += (inv.empty() ? "" : ", ") + to_string(cap) + "^" + std::to_string(m);
      out_ << " (" << inv << ")\n";
    }
    return r.ok ? kOk : kNegative;
  }

  int cmd_fig1(const std::string& a_max_s, const std::string& b_max_s, unsigned steps, std::size_t count, unsigned threads) {
    BigRational a_max = parse_rational(a_max_s), b_max = parse_rational(b_max_s);
    if (a_max < 1 || b_max < a_max) throw InvalidInput("need 1 <= a-max <= b-max");
    if (steps == 0) throw InvalidInput("steps must be positive");
    struct Cell {
      BigRational a, b;
      std::string region, lower, upper;
      bool tight = false;
    };
    std::vector<Cell> cells;
    for (unsigned i = 0; i <= steps; ++i)
      for (unsigned j = 0; j <= steps; ++j) {
        BigRational a = 1 + (a_max - 1) * BigRational(i) / BigRational(steps);
        BigRational b = 1 + (b_max - 1) * BigRational(j) / BigRational(steps);
        if (a <= b) cells.push_back(Cell{a, b, "", "", "", false});
      }
    unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::optional<std::string> failure;
    auto work = [&] {
      for (std::size_t i = next++; i < cells.size(); i = next++) {
        try {
          FBounds fb = f_bounds(RealExpr(cells[i].a), RealExpr(cells[i].b), count, budget_);
          cells[i].region = fb.known ? fb.known->justification : "-";
          cells[i].lower = format(fb.lower);
          cells[i].upper = format(fb.upper);
          cells[i].tight = compare(fb.lower, fb.upper, budget_) == Ordering::Equal;
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!failure) failure = e.what();
        }
      }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (failure) throw ResourceLimit("fig1-map cell failed: " + *failure);
    std::sort(cells.begin(), cells.end(), [](const Cell& x, const Cell& y) { return x.a != y.a ? x.a < y.a : x.b < y.b; });
    if (json_) {
      Json arr = Json::array();
      for (const auto& c : cells)
        arr.push_back(Json{{"a", to_string(c.a)}, {"b", to_string(c.b)}, {"region", c.region}, {"lower", c.lower},
                           {"upper", c.upper}, {"tight", c.tight}});
      emit(Json{{"schema", "symcap.fig1-map/1"}, {"cells", std::move(arr)}});
    } else {
      out_ << "a\tb\tregion\tlower\tupper\n";
      for (const auto& c : cells)
        out_ << to_string(c.a) << "\t" << to_string(c.b) << "\t" << c.region << "\t" << c.lower << "\t" << c.upper << "\n";
    }
    return kOk;
  }

  std::ostream& out_;
  std::ostream& err_;
  bool json_ = false;
  PrecisionBudget budget_;
};

/// Runs the command line `args` (without the program name).
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return Runner(out, err).run(args);
}

}  // namespace symcap::cli
