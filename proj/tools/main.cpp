// Command-line front end: classify a field file, canonicalize generators,
// audit the built-in tables, integrate trajectories, run involution reports.
// Exit codes: 0 ok, 1 check failure, 2 parse error, 3 Maxwell audit failure,
// 4 oracle disagreement, 5 degenerate canon input.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lorsym/catalog.hpp"
#include "lorsym/dynamics.hpp"
#include "lorsym/expr.hpp"
#include "lorsym/fields.hpp"
#include "lorsym/liealg.hpp"
#include "lorsym/optimal.hpp"
#include "lorsym/verify.hpp"

namespace {

using nlohmann::json;
using namespace lorsym;

std::string fmt(double v, const char* spec = "%.4g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Reports end with exactly one newline so identical runs emit identical bytes.
void emit(const std::string& outPath, std::string text) {
  if (text.empty() || text.back() != '\n') text += '\n';
  if (outPath.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(outPath, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file " + outPath);
  f << text;
}

// Row-indexed worker pool; fn(i) must not throw.
template <typename Fn>
void parallelFor(int n, Fn&& fn) {
  if (n <= 0) return;
  int workers = std::min(n, std::max(1, (int)std::thread::hardware_concurrency()));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& t : pool) t.join();
}

// "0.316228 v4 + 0.948683 v8"
std::string comboLabel(const Vec8<double>& c) {
  double big = c.cwiseAbs().maxCoeff();
  if (big == 0.0) return "0";
  std::string out;
  for (int i = 0; i < 8; ++i) {
    if (std::abs(c[i]) < 1e-9 * big) continue;
    if (out.empty()) {
      if (c[i] < 0) out += "-";
    } else {
      out += c[i] < 0 ? " - " : " + ";
    }
    double av = std::abs(c[i]);
    if (std::abs(av - 1.0) > 1e-9) out += fmt(av, "%.6g") + " ";
    out += "v" + std::to_string(i + 1);
  }
  return out;
}

int loadFieldFile(const std::string& path, FieldSpec& fs) {
  std::string text;
  try {
    text = slurp(path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  try {
    fs = parseFieldFile(text);
  } catch (const ParseError& pe) {
    std::cerr << "parse error: " << pe.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "field error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

json matchesToJson(const std::vector<CatalogMatch>& ms) {
  json arr = json::array();
  for (const auto& m : ms) {
    json jm;
    jm["label"] = catalogMatchLabel(m);
    jm["reference"] = m.reference;
    jm["residual"] = m.residual;
    json params = json::object();
    for (const auto& [k, v] : m.params) params[k] = formatRational(v);
    jm["params"] = params;
    arr.push_back(jm);
  }
  return arr;
}

// ---------------------------------------------------------------------------
// classify

int cmdClassify(const std::string& input, double tol, std::uint64_t seed,
                const std::string& format, const std::string& out) {
  FieldSpec fs;
  if (int rc = loadFieldFile(input, fs)) return rc;

  auto pts = samplePoints(fs.domain, 30, seed);
  auto [divB, curlE] = maxwellResidual(fs, pts);
  if (divB > 1e-8 || curlE > 1e-8) {
    std::cerr << "Maxwell audit failed: div B residual " << fmt(divB)
              << ", curl E residual " << fmt(curlE)
              << "; the potentials do not define a consistent field\n";
    return 3;
  }

  SymmetrySampler sampler;
  sampler.seed = seed;
  ClassReport rep = detectSymmetries(fs, sampler, tol);
  auto symMatches = rep.basis.empty() ? std::vector<CatalogMatch>{}
                                      : matchDetectedSpan(rep.basis, false);
  auto noeMatches = rep.noetherBasis.empty() ? std::vector<CatalogMatch>{}
                                             : matchDetectedSpan(rep.noetherBasis, true);

  if (format == "json") {
    json j = json::parse(toJson(rep));
    j["maxwell"] = {{"divB", divB}, {"curlE", curlE}};
    j["matches"] = matchesToJson(symMatches);
    j["noetherMatches"] = matchesToJson(noeMatches);
    emit(out, j.dump(2));
  } else {
    std::ostringstream os;
    os << "symmetry dimension: " << rep.dimension << "\n";
    os << "basis over v1..v8:\n";
    for (const auto& b : rep.basis) os << "  " << comboLabel(b) << "\n";
    os << "singular values:";
    for (double s : rep.singularValues) os << " " << fmt(s, "%.3g");
    os << "\ngap ratio: " << (std::isfinite(rep.gapRatio) ? fmt(rep.gapRatio, "%.3g") : "inf")
       << "\n";
    os << "noether subspace dimension: " << rep.noetherBasis.size() << " (c8 = 2 c7)\n";
    for (const auto& b : rep.noetherBasis) os << "  " << comboLabel(b) << "\n";
    os << "oracle agreement: " << (rep.oracleAgreement ? "yes" : "NO")
       << " (worst residual " << fmt(rep.oracleWorst) << ")\n";
    os << "maxwell residuals: div B " << fmt(divB) << ", curl E " << fmt(curlE) << "\n";
    os << "matches:" << (symMatches.empty() ? " none" : "") << "\n";
    for (const auto& m : symMatches)
      os << "  " << catalogMatchLabel(m) << "  (residual " << fmt(m.residual) << ")\n";
    os << "noether matches:" << (noeMatches.empty() ? " none" : "") << "\n";
    for (const auto& m : noeMatches)
      os << "  " << catalogMatchLabel(m) << "  (residual " << fmt(m.residual) << ")\n";
    if (!rep.warnings.empty()) {
      os << "warnings:\n";
      for (const auto& w : rep.warnings) os << "  " << w << "\n";
    }
    emit(out, os.str());
  }

  if (!rep.oracleAgreement) {
    std::cerr << "oracle disagreement: the prolongation check does not confirm "
                 "the detected basis (worst residual "
              << fmt(rep.oracleWorst) << ")\n";
    return 4;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// canon

const char* stepName(AdjointKind k) {
  switch (k) {
    case AdjointKind::TransX: return "trans-x";
    case AdjointKind::TransY: return "trans-y";
    case AdjointKind::TransZ: return "trans-z";
    case AdjointKind::RotZ: return "rot-z";
    case AdjointKind::RotY: return "rot-y";
    case AdjointKind::RotX: return "rot-x";
    case AdjointKind::ScaleSpace: return "scale-space";
    case AdjointKind::ScaleTime: return "scale-time";
    case AdjointKind::ShiftPhi: return "shift-phi";
    case AdjointKind::Gauge: return "gauge";
  }
  return "?";
}

int cmdCanon(const std::string& input, const std::string& format, const std::string& out) {
  std::string text;
  auto firstNonSpace = input.find_first_not_of(" \t\r\n");
  if (firstNonSpace != std::string::npos && input[firstNonSpace] == '{') {
    text = input;
  } else {
    try {
      text = slurp(input);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
  }

  EquivGenerator V;
  try {
    V = equivGeneratorFromJson(text);
  } catch (const ParseError& pe) {
    std::cerr << "parse error: " << pe.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "generator error: " << e.what() << "\n";
    return 2;
  }

  CanonicalClass1D c = canonicalize1D(V);
  if (c.classId == 0) {
    if (format == "json") {
      json j;
      j["classId"] = 0;
      j["degenerateReason"] = c.degenerateReason;
      emit(out, j.dump(2));
    } else {
      emit(out, "degenerate input: " + c.degenerateReason);
    }
    return 5;
  }

  EquivGeneratorD want = representative1DNumeric(c);
  EquivGeneratorD got = replayWitness(c, V);
  double replayErr = (got.c - want.c).cwiseAbs().maxCoeff();

  std::string gaugeText =
      c.residualGauge.isConstZero()
          ? std::string()
          : (containsNumFn(c.residualGauge) ? std::string("(numeric)")
                                            : printExpr(c.residualGauge));

  if (format == "json") {
    json j;
    j["classId"] = c.classId;
    j["exact"] = c.exact;
    json params = json::object();
    for (const auto& [k, v] : c.params) params[k] = v;
    j["params"] = params;
    json paramsExact = json::object();
    for (const auto& [k, v] : c.paramsExact) paramsExact[k] = formatRational(v);
    j["paramsExact"] = paramsExact;
    if (c.exact) j["scale"] = formatRational(c.scale);
    j["scaleNumeric"] = c.scaleD;
    json steps = json::array();
    for (const auto& st : c.witness) {
      json js;
      js["kind"] = stepName(st.kind);
      js["exact"] = st.exact;
      if (st.exact)
        js["eps"] = formatRational(st.eps);
      else
        js["eps"] = st.epsD;
      if (st.kind == AdjointKind::Gauge) js["f"] = printExpr(st.gauge);
      steps.push_back(js);
    }
    j["witness"] = steps;
    j["replayError"] = replayErr;
    json repc = json::array();
    for (int i = 0; i < 9; ++i) repc.push_back(want.c[i]);
    j["representative"] = repc;
    if (!gaugeText.empty()) j["residualGauge"] = gaugeText;
    emit(out, j.dump(2));
  } else {
    std::ostringstream os;
    os << "class: table 2 row " << c.classId << "\n";
    if (!c.params.empty()) {
      os << "parameters:";
      for (const auto& [k, v] : c.params) {
        os << " " << k << " = ";
        auto it = c.paramsExact.find(k);
        if (it != c.paramsExact.end())
          os << formatRational(it->second);
        else
          os << fmt(v, "%.12g");
      }
      os << "\n";
    }
    os << "scale: " << (c.exact ? formatRational(c.scale) : fmt(c.scaleD, "%.12g")) << "\n";
    os << "witness: " << c.witness.size()
       << " adjoint steps (rotation steps count quarter turns), replay error "
       << fmt(replayErr) << "\n";
    os << "representative:";
    for (int i = 0; i < 9; ++i) os << " " << fmt(want.c[i], "%.6g");
    os << "\n";
    if (!gaugeText.empty()) os << "gauge part carried along: " << gaugeText << "\n";
    emit(out, os.str());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// verify-tables

struct RowAudit {
  FieldTable table = FieldTable::Sym2;
  int row = 0;
  std::string reference;
  std::string status = "FAIL";
  double maxwellDiv = 0, maxwellCurl = 0;
  double residual = 0, prolong = 0;
  bool scalingExact = true;
  double shiftSpread = 0;
  double drift = -1;  // -1 means not checked
  std::string note;
};

RowAudit auditCatalogRow(FieldTable t, int row, double tol, std::uint64_t seed,
                         bool noether) {
  RowAudit a;
  a.table = t;
  a.row = row;
  a.reference = catalogRowReference(t, row);
  std::vector<std::string> problems;
  std::vector<std::string> extras;
  try {
    CatalogKey key;
    key.table = t;
    key.row = row;
    FieldSpec fs = catalogInstance(key);
    auto pts = samplePoints(fs.domain, 10, seed + 100ull * tableIndex(t) + row);
    std::tie(a.maxwellDiv, a.maxwellCurl) = maxwellResidual(fs, pts);
    if (a.maxwellDiv > 1e-8 || a.maxwellCurl > 1e-8)
      problems.push_back("maxwell residual above 1e-8");

    auto gens = catalogGenerators(t, row, catalogDefaultParams(t, row));
    ResidualAssembler asmb(fs);
    double scale = 1.0;
    for (const auto& p : pts) scale = std::max(scale, asmb.matrixAt(p).norm());
    const Eigen::Vector3d probes[2] = {{0.3, -0.2, 0.5}, {-0.4, 0.1, 0.2}};
    for (const auto& g : gens) {
      Vec8<double> c;
      for (int i = 0; i < 8; ++i) c[i] = g[i].toDouble();
      double cn = c.norm();
      if (cn > 0) c /= cn;
      if (noether && !(g[7] == Rational(2) * g[6])) a.scalingExact = false;
      for (const auto& p : pts) {
        a.residual = std::max(a.residual, asmb.residual(c, p).norm() / scale);
        for (const auto& v : probes) {
          PhaseState st;
          st.x = p;
          st.v = v;
          a.prolong = std::max(a.prolong, prolongationResidual(fs, c, st).norm() / scale);
        }
      }
    }
    if (a.residual > tol || a.prolong > 10 * tol)
      problems.push_back("claimed generators do not satisfy the classifying equations");

    if (noether) {
      if (!a.scalingExact) problems.push_back("generator violates c8 = 2 c7");
      std::vector<InvariantFn> invs;
      bool pipelineOk = true;
      int idx = 0;
      for (const auto& g : gens) {
        ++idx;
        Vec8<double> c8v;
        for (int i = 0; i < 8; ++i) c8v[i] = g[i].toDouble();
        auto ps = potentialShift(fs, c8v, pts);
        a.shiftSpread = std::max(a.shiftSpread, ps.spread);
        if (ps.spread > 1e-6 * (1 + std::abs(ps.c9))) {
          problems.push_back("potential shift inconsistent across sample points");
          pipelineOk = false;
          continue;
        }
        Vec9<double> c9v;
        c9v.head<8>() = c8v;
        c9v[8] = ps.c9;
        auto gr = gaugeReconstruct(fs, c9v);
        if (!gr.ok) {
          problems.push_back("gauge function is not reconstructible");
          pipelineOk = false;
          continue;
        }
        invs.push_back(makeNoetherInvariant(fs, 0.0, c9v, gr, "I" + std::to_string(idx)));
      }
      if (pipelineOk && !invs.empty()) {
        PhaseState s0;
        s0.x = pts.front();
        double calm = std::numeric_limits<double>::infinity();
        for (const auto& p : pts) {
          double level = fieldB(fs, p).norm() + fieldE(fs, p).norm();
          if (level < calm) {
            calm = level;
            s0.x = p;
          }
        }
        s0.v = Eigen::Vector3d(0.15, -0.1, 0.12);
        double tEnd = 2.0;
        bool done = false;
        for (int attempt = 0; attempt < 4 && !done; ++attempt) {
          try {
            auto traj = integrate(fs, s0, tEnd, Adaptive{1e-10, 1e-10});
            std::size_t stride = std::max<std::size_t>(1, traj.size() / 25);
            double worst = 0;
            for (const auto& I : invs) {
              double i0 = I.value(traj.front());
              for (std::size_t k = stride; k < traj.size(); k += stride)
                worst = std::max(worst, std::abs(I.value(traj[k]) - i0));
              worst = std::max(worst, std::abs(I.value(traj.back()) - i0));
            }
            a.drift = worst;
            done = true;
          } catch (const std::exception&) {
            tEnd *= 0.25;
            s0.v *= 0.5;
          }
        }
        if (done) {
          if (a.drift > 1e-6) problems.push_back("integral drift above 1e-6");
        } else {
          extras.push_back("sampled orbits kept leaving the chart; drift unchecked");
        }
      }
    }

    std::string caveat = catalogRowInfo(t, row).caveat;
    if (!problems.empty() && !caveat.empty()) {
      a.status = "WARN";
      a.note = caveat;
    } else if (!problems.empty()) {
      a.status = "FAIL";
      std::string joined;
      for (const auto& p : problems) joined += (joined.empty() ? "" : "; ") + p;
      a.note = joined;
    } else {
      a.status = "PASS";
      a.note = caveat;
      for (const auto& e : extras) a.note += (a.note.empty() ? "" : "; ") + e;
    }
  } catch (const std::exception& e) {
    a.status = "FAIL";
    a.note = std::string("audit error: ") + e.what();
  }
  return a;
}

struct InvolutionCheck {
  std::string name;
  double maxBracket = 0;
  int rank = 0;
  double maxDrift = 0;
  std::string status = "FAIL";
  std::string note;
};

InvolutionCheck runTriple(const std::string& name, const FieldSpec& fs,
                          const std::vector<InvariantFn>& invs,
                          const PhaseState& start, std::uint64_t seed) {
  InvolutionCheck c;
  c.name = name;
  try {
    InvolutionOptions o;
    o.seed = seed;
    o.tEnd = 50.0;
    o.start = start;
    auto rep = involutionReport(fs, invs, o);
    for (int i = 0; i < rep.brackets.rows(); ++i)
      for (int j = 0; j < rep.brackets.cols(); ++j)
        if (i != j) c.maxBracket = std::max(c.maxBracket, std::abs(rep.brackets(i, j)));
    c.rank = rep.jacobianRank;
    for (double d : rep.drifts) c.maxDrift = std::max(c.maxDrift, d);
    bool ok = c.maxBracket < 1e-6 && c.rank == 3 && c.maxDrift < 1e-7;
    c.status = ok ? "PASS" : "FAIL";
    if (!ok) c.note = "expected pairwise brackets < 1e-6, rank 3, drift < 1e-7";
  } catch (const std::exception& e) {
    c.note = std::string("check error: ") + e.what();
  }
  return c;
}

std::vector<InvolutionCheck> involutionTriples(std::uint64_t seed) {
  auto X = [] { return Expr::variable(0); };
  auto Y = [] { return Expr::variable(1); };
  auto Z = [] { return Expr::variable(2); };
  auto U = [] { return Expr::param("u"); };
  auto unit9 = [](int k) {
    Vec9<double> c = Vec9<double>::Zero();
    c[k] = 1.0;
    return c;
  };
  std::vector<InvolutionCheck> out;

  {
    // radial field: energy, squared total angular-type integral, one component
    FieldSpec fs = monopoleField(Rational(3, 2));
    Expr r = sqrt(X() * X() + Y() * Y() + Z() * Z());
    Expr rho2 = X() * X() + Y() * Y();
    Expr lam = Expr::number(Rational(3, 2));
    auto J1 = makeNoetherInvariant(fs, 0.0, unit9(3), Expr::zero(), "J1");
    auto J2 = makeNoetherInvariant(fs, 0.0, unit9(4), simplify(lam * Y() * r / rho2), "J2");
    auto J3 = makeNoetherInvariant(fs, 0.0, unit9(5), simplify(lam * X() * r / rho2), "J3");
    auto C = makeSumOfSquares({J1, J2, J3}, "C");
    PhaseState s0;
    s0.x = Eigen::Vector3d(1, 0.4, 0.6);
    s0.v = Eigen::Vector3d(0.1, 0.25, -0.2);
    out.push_back(runTriple("radial field triple", fs,
                            {makeHamiltonian(fs), C, J3}, s0, seed));
  }
  {
    CatalogKey key;
    key.table = FieldTable::Noe3;
    key.row = 2;
    key.params = catalogDefaultParams(key.table, key.row);
    for (auto& [k, v] : key.params) v = Rational(0);
    key.profiles = {{"F1", parseExpr("u^2")},
                    {"F2", U()},
                    {"F3", parseExpr("u^2")},
                    {"G", parseExpr("u^2")}};
    FieldSpec fs = catalogInstance(key);
    fs.domain.offBranchCut = false;  // the angular term is off at lambda2 = 0
    auto I1 = makeNoetherInvariant(fs, 0.0, unit9(2), Expr::zero(), "I1");
    auto I2 = makeNoetherInvariant(fs, 0.0, unit9(3), Expr::zero(), "I2");
    PhaseState s0;
    s0.x = Eigen::Vector3d(1, 0.2, 0.3);
    s0.v = Eigen::Vector3d(0, 0.4, 0.1);
    out.push_back(runTriple("planar trap triple", fs,
                            {makeHamiltonian(fs), I1, I2}, s0, seed));
  }
  {
    CatalogKey key;
    key.table = FieldTable::Noe3;
    key.row = 5;
    key.params = catalogDefaultParams(key.table, key.row);
    for (auto& [k, v] : key.params) v = Rational(0);
    key.profiles = {{"F2", U()}, {"F3", parseExpr("u^2")}, {"G", parseExpr("u^2")}};
    FieldSpec fs = catalogInstance(key);
    auto I1 = makeNoetherInvariant(fs, 0.0, unit9(1), Expr::zero(), "I1");
    auto I2 = makeNoetherInvariant(fs, 0.0, unit9(2), Expr::zero(), "I2");
    PhaseState s0;
    s0.x = Eigen::Vector3d(0.3, 0, 0);
    s0.v = Eigen::Vector3d(0.2, 0.1, -0.15);
    out.push_back(runTriple("unidirectional trap triple", fs,
                            {makeHamiltonian(fs), I1, I2}, s0, seed));
  }
  return out;
}

json rowAuditJson(const RowAudit& a, bool noether) {
  json j;
  j["reference"] = a.reference;
  j["table"] = tableIndex(a.table);
  j["row"] = a.row;
  j["status"] = a.status;
  j["maxwell"] = {{"divB", a.maxwellDiv}, {"curlE", a.maxwellCurl}};
  j["residual"] = a.residual;
  j["prolongation"] = a.prolong;
  if (noether) {
    j["scalingExact"] = a.scalingExact;
    j["shiftSpread"] = a.shiftSpread;
    if (a.drift >= 0) j["drift"] = a.drift;
  }
  if (!a.note.empty()) j["note"] = a.note;
  return j;
}

int cmdVerifyTables(const std::string& scope, double tol, std::uint64_t seed,
                    const std::string& format, const std::string& out) {
  bool doOptimal = scope == "optimal" || scope == "all";
  bool doSymmetry = scope == "symmetry" || scope == "all";
  bool doNoether = scope == "noether" || scope == "all";

  int failures = 0, warnings = 0, passes = 0;
  std::ostringstream os;
  json root;
  root["scope"] = scope;

  std::optional<OptimalTablesReport> optRep;
  if (doOptimal) {
    optRep = verifyOptimalTables((unsigned)seed);
    int bad = 0;
    for (const auto& r : optRep->rows)
      if (!r.closed || !r.conditionsHonored) ++bad;
    failures += bad;
    passes += (int)optRep->rows.size() - bad;
    os << "== optimal tables ==\n";
    os << optRep->rows.size() << " rows; closure "
       << (optRep->allClosed ? "holds everywhere" : "FAILS somewhere") << "\n";
    for (const auto& r : optRep->rows)
      if (!r.closed || !r.conditionsHonored || !r.selfMatched)
        os << "  table " << r.table << " row " << r.row << ": "
           << (r.closed ? "" : "not closed ") << (r.conditionsHonored ? "" : "conditions broken ")
           << (r.selfMatched ? "" : "matcher missed ") << r.note << "\n";
    for (const auto& n : optRep->needDeeperAnalysis)
      os << "  signature tie: " << n << "\n";
    json jo = json::parse(optRep->json);
    jo["pass"] = bad == 0;
    root["optimal"] = jo;
  }

  auto sweep = [&](const std::vector<FieldTable>& tables, bool noether,
                   const char* heading, const char* key) {
    std::vector<std::pair<FieldTable, int>> rows;
    for (FieldTable t : tables)
      for (int r = 1; r <= catalogRowCount(t); ++r) rows.emplace_back(t, r);
    std::vector<RowAudit> audits(rows.size());
    parallelFor((int)rows.size(), [&](int i) {
      audits[i] = auditCatalogRow(rows[i].first, rows[i].second, tol, seed, noether);
    });
    os << "== " << heading << " ==\n";
    json arr = json::array();
    for (const auto& a : audits) {
      if (a.status == "PASS") ++passes;
      if (a.status == "WARN") ++warnings;
      if (a.status == "FAIL") ++failures;
      os << a.reference << ": " << a.status;
      if (a.status == "PASS") {
        os << "  (generators " << fmt(a.residual) << ", oracle " << fmt(a.prolong)
           << ", maxwell " << fmt(a.maxwellDiv) << "/" << fmt(a.maxwellCurl);
        if (noether && a.drift >= 0) os << ", drift " << fmt(a.drift);
        os << ")";
        if (!a.note.empty()) os << "  note: " << a.note;
      } else {
        os << "  " << a.note;
      }
      os << "\n";
      arr.push_back(rowAuditJson(a, noether));
    }
    root[key] = arr;
  };

  if (doSymmetry)
    sweep({FieldTable::Sym2, FieldTable::Sym3, FieldTable::Sym4}, false,
          "symmetry tables 5-7", "catalog");
  if (doNoether) {
    sweep({FieldTable::Noe2, FieldTable::Noe3, FieldTable::Noe4}, true,
          "noether tables 8-10", "noether");
    auto checks = involutionTriples(seed);
    os << "== complete integrability ==\n";
    json arr = json::array();
    for (const auto& c : checks) {
      if (c.status == "FAIL") ++failures;
      os << c.name << ": " << c.status << "  (bracket " << fmt(c.maxBracket)
         << ", rank " << c.rank << ", drift " << fmt(c.maxDrift) << ")";
      if (!c.note.empty()) os << "  " << c.note;
      os << "\n";
      json jc;
      jc["name"] = c.name;
      jc["status"] = c.status;
      jc["maxBracket"] = c.maxBracket;
      jc["jacobianRank"] = c.rank;
      jc["maxDrift"] = c.maxDrift;
      if (!c.note.empty()) jc["note"] = c.note;
      arr.push_back(jc);
    }
    root["involution"] = arr;
  }

  os << "== summary ==\n";
  os << passes << " pass, " << warnings << " warn, " << failures << " fail\n";
  root["failures"] = failures;
  root["warnings"] = warnings;
  root["passes"] = passes;

  emit(out, format == "json" ? root.dump(2) : os.str());
  return failures > 0 ? 1 : 0;
}

// ---------------------------------------------------------------------------
// integrate

InvariantFn invariantFromSpec(const FieldSpec& fs, const std::string& spec) {
  if (spec == "hamiltonian") return makeHamiltonian(fs);
  EquivGenerator V = equivGeneratorFromJson(slurp(spec));
  Vec9<double> c;
  for (int i = 0; i < 9; ++i) c[i] = V.c[i].toDouble();
  std::string label = spec;
  auto slash = label.find_last_of("/\\");
  if (slash != std::string::npos) label = label.substr(slash + 1);
  auto dot = label.rfind('.');
  if (dot != std::string::npos && dot > 0) label = label.substr(0, dot);
  return makeNoetherInvariant(fs, 0.0, c, V.gauge, label);
}

int cmdIntegrate(const std::string& input, const std::vector<double>& state,
                 double tEnd, double step, double tol,
                 const std::vector<std::string>& invSpecs, const std::string& out) {
  FieldSpec fs;
  if (int rc = loadFieldFile(input, fs)) return rc;

  std::vector<InvariantFn> invs;
  for (const auto& spec : invSpecs) {
    try {
      invs.push_back(invariantFromSpec(fs, spec));
    } catch (const std::exception& e) {
      std::cerr << "invariant error (" << spec << "): " << e.what() << "\n";
      return 2;
    }
  }

  PhaseState s0;
  s0.x = Eigen::Vector3d(state[0], state[1], state[2]);
  s0.v = Eigen::Vector3d(state[3], state[4], state[5]);

  auto run = [&](const PhaseState& from, double target) {
    return step > 0 ? integrate(fs, from, target, Rk4{step})
                    : integrate(fs, from, target, Adaptive{tol, tol});
  };

  std::vector<PhaseState> traj;
  std::string stopNote;
  try {
    traj = run(s0, tEnd);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& primary) {
    // recover the valid prefix chunk by chunk
    stopNote = primary.what();
    traj = {s0};
    const int chunks = 256;
    for (int k = 1; k <= chunks; ++k) {
      double target = tEnd * k / chunks;
      if (target <= traj.back().t) continue;
      try {
        auto part = run(traj.back(), target);
        traj.insert(traj.end(), part.begin() + 1, part.end());
      } catch (const std::exception&) {
        break;
      }
    }
  }

  std::ostringstream os;
  os << "t,x,y,z,vx,vy,vz";
  for (const auto& I : invs) os << "," << (I.label.empty() ? "I" : I.label);
  os << "\n";
  char buf[64];
  for (const auto& s : traj) {
    const double base[7] = {s.t, s.x.x(), s.x.y(), s.x.z(), s.v.x(), s.v.y(), s.v.z()};
    for (int i = 0; i < 7; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", base[i]);
      os << (i ? "," : "") << buf;
    }
    for (const auto& I : invs) {
      double v;
      try {
        v = I.value(s);
      } catch (const std::exception&) {
        v = std::numeric_limits<double>::quiet_NaN();
      }
      std::snprintf(buf, sizeof buf, "%.17g", v);
      os << "," << buf;
    }
    os << "\n";
  }
  emit(out, os.str());

  if (!stopNote.empty()) {
    const PhaseState& last = traj.back();
    std::cerr << "integration stopped early: " << stopNote << "\n"
              << "last valid state: t = " << fmt(last.t, "%.12g") << ", x = ("
              << fmt(last.x.x(), "%.12g") << ", " << fmt(last.x.y(), "%.12g") << ", "
              << fmt(last.x.z(), "%.12g") << "), v = (" << fmt(last.v.x(), "%.12g")
              << ", " << fmt(last.v.y(), "%.12g") << ", " << fmt(last.v.z(), "%.12g")
              << ")\n";
    return 1;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// involution

int cmdInvolution(const std::string& input, const std::vector<double>& state,
                  double tEnd, double tol, double detTol, std::uint64_t seed,
                  const std::vector<std::string>& invSpecs, const std::string& format,
                  const std::string& out) {
  FieldSpec fs;
  if (int rc = loadFieldFile(input, fs)) return rc;

  auto pts = samplePoints(fs.domain, 30, seed);
  auto [divB, curlE] = maxwellResidual(fs, pts);
  if (divB > 1e-8 || curlE > 1e-8) {
    std::cerr << "Maxwell audit failed: div B residual " << fmt(divB)
              << ", curl E residual " << fmt(curlE) << "\n";
    return 3;
  }

  SymmetrySampler sampler;
  sampler.seed = seed;
  ClassReport rep = detectSymmetries(fs, sampler, detTol);
  std::vector<std::string> warnings = rep.warnings;

  std::vector<InvariantFn> invs = {makeHamiltonian(fs)};
  std::optional<Eigen::Vector3d> anchor;
  int idx = 0;
  for (const auto& b : rep.noetherBasis) {
    ++idx;
    std::string label = "I" + std::to_string(idx);
    auto ps = potentialShift(fs, b, pts);
    if (ps.spread > 1e-6 * (1 + std::abs(ps.c9))) {
      warnings.push_back(label + ": potential shift inconsistent; generator skipped");
      continue;
    }
    Vec9<double> c;
    c.head<8>() = b;
    c[8] = ps.c9;
    auto gr = gaugeReconstruct(fs, c);
    if (!gr.ok) {
      warnings.push_back(label + ": gauge function not reconstructible (curl residual " +
                         fmt(gr.curlResidual) + "); generator skipped");
      continue;
    }
    anchor = gr.anchor;
    invs.push_back(makeNoetherInvariant(fs, 0.0, c, gr, label));
  }
  for (const auto& spec : invSpecs) {
    if (spec == "hamiltonian") continue;
    try {
      invs.push_back(invariantFromSpec(fs, spec));
    } catch (const std::exception& e) {
      std::cerr << "invariant error (" << spec << "): " << e.what() << "\n";
      return 2;
    }
  }

  InvolutionOptions o;
  o.seed = seed;
  o.tEnd = tEnd;
  o.method = Adaptive{tol, tol};
  PhaseState s0;
  if (!state.empty()) {
    s0.x = Eigen::Vector3d(state[0], state[1], state[2]);
    s0.v = Eigen::Vector3d(state[3], state[4], state[5]);
  } else if (anchor) {
    // quadrature-backed values are chart-local, so the drift orbit starts
    // where the reconstructed gauge functions vanish
    s0.x = *anchor;
    s0.v = Eigen::Vector3d(0.15, -0.1, 0.12);
  } else {
    auto six = samplePoints(fs.domain, 6, seed);
    s0.x = six.front();
    double calm = std::numeric_limits<double>::infinity();
    for (const auto& p : six) {
      double level = fieldB(fs, p).norm() + fieldE(fs, p).norm();
      if (level < calm) {
        calm = level;
        s0.x = p;
      }
    }
    s0.v = Eigen::Vector3d(0.15, -0.1, 0.12);
  }
  o.start = s0;

  std::optional<InvolutionReport> result;
  std::string lastError;
  for (int attempt = 0; attempt < 4 && !result; ++attempt) {
    try {
      result = involutionReport(fs, invs, o);
    } catch (const std::exception& e) {
      lastError = e.what();
      o.tEnd *= 0.25;
      s0.v *= 0.5;
      o.start = s0;
    }
  }
  if (!result) {
    std::cerr << "involution report failed: " << lastError << "\n";
    return 1;
  }
  if (o.tEnd != tEnd)
    warnings.push_back("orbit shortened to t = " + fmt(o.tEnd, "%.6g") +
                       " after the sampled start kept leaving the chart");

  if (format == "json") {
    json j;
    json labels = json::array();
    for (const auto& I : invs) labels.push_back(I.label.empty() ? "I" : I.label);
    j["labels"] = labels;
    json m = json::array();
    for (int i = 0; i < result->brackets.rows(); ++i) {
      json rowj = json::array();
      for (int jj = 0; jj < result->brackets.cols(); ++jj)
        rowj.push_back(result->brackets(i, jj));
      m.push_back(rowj);
    }
    j["brackets"] = m;
    j["jacobianRank"] = result->jacobianRank;
    j["drifts"] = result->drifts;
    j["tEnd"] = o.tEnd;
    j["warnings"] = warnings;
    emit(out, j.dump(2));
  } else {
    std::ostringstream os;
    os << "invariants:";
    for (const auto& I : invs) os << " " << (I.label.empty() ? "I" : I.label);
    os << "\nmax |{Ii, Ij}| over " << o.stateCount << " sampled states:\n";
    for (int i = 0; i < result->brackets.rows(); ++i) {
      os << " ";
      for (int jj = 0; jj < result->brackets.cols(); ++jj)
        os << " " << fmt(result->brackets(i, jj), "%9.3g");
      os << "\n";
    }
    os << "jacobian rank: " << result->jacobianRank << "\n";
    os << "drift along one orbit to t = " << fmt(o.tEnd, "%.6g") << ":\n";
    for (std::size_t i = 0; i < result->drifts.size(); ++i)
      os << "  " << (invs[i].label.empty() ? "I" : invs[i].label) << "  "
         << fmt(result->drifts[i]) << "\n";
    if (!warnings.empty()) {
      os << "warnings:\n";
      for (const auto& w : warnings) os << "  " << w << "\n";
    }
    emit(out, os.str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "lorsym: point symmetries, first integrals and integrability checks for "
      "charged-particle motion in stationary electromagnetic fields"};
  app.require_subcommand(1);

  std::string clInput, clFormat = "text", clOut;
  double clTol = 1e-8;
  std::uint64_t clSeed = 0;
  auto* classify = app.add_subcommand(
      "classify", "detect the point symmetries of a field file and match the catalog");
  classify->add_option("field", clInput, "field file with [potential], [params], [domain]")
      ->required();
  classify->add_option("--tol", clTol, "singular-value threshold for the nullspace cut")
      ->capture_default_str();
  classify->add_option("--seed", clSeed, "sampling seed")->capture_default_str();
  classify->add_option("--format", clFormat, "report format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  classify->add_option("--out", clOut, "write the report to this file instead of stdout");

  std::string caInput, caFormat = "text", caOut;
  auto* canon = app.add_subcommand(
      "canon", "canonical form of a one-dimensional equivalence subalgebra");
  canon
      ->add_option("generator", caInput,
                   "generator JSON file, or an inline JSON object "
                   "{\"c\":[nine rationals],\"f\":\"expression\"}")
      ->required();
  canon->add_option("--format", caFormat, "report format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  canon->add_option("--out", caOut, "write the report to this file instead of stdout");

  std::string vtScope = "all", vtFormat = "text", vtOut;
  double vtTol = 1e-8;
  std::uint64_t vtSeed = 0;
  auto* vt = app.add_subcommand("verify-tables", "audit the built-in tables");
  vt->add_option("scope", vtScope, "which tables to audit")
      ->check(CLI::IsMember({"optimal", "symmetry", "noether", "all"}))
      ->capture_default_str();
  vt->add_option("--tol", vtTol, "residual threshold for the generator audit")
      ->capture_default_str();
  vt->add_option("--seed", vtSeed, "sampling seed")->capture_default_str();
  vt->add_option("--format", vtFormat, "report format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  vt->add_option("--out", vtOut, "write the report to this file instead of stdout");

  std::string inInput, inOut;
  std::vector<double> inState;
  std::vector<std::string> inInvs;
  double inTEnd = 10.0, inStep = 0.0, inTol = 1e-10;
  auto* integ = app.add_subcommand("integrate", "integrate the motion equations to CSV");
  integ->add_option("field", inInput, "field file")->required();
  integ
      ->add_option("--state", inState,
                   "initial state x,y,z,vx,vy,vz (comma or space separated)")
      ->expected(6)
      ->delimiter(',')
      ->required();
  integ->add_option("--t-end", inTEnd, "integration end time")->capture_default_str();
  integ->add_option("--step", inStep,
                    "fixed fourth-order step; when omitted the adaptive 5(4) pair runs");
  integ->add_option("--tol", inTol, "adaptive tolerance (absolute and relative)")
      ->capture_default_str();
  integ->add_option("--invariant", inInvs,
                    "extra CSV column: 'hamiltonian' or a generator JSON file "
                    "(c holds c1..c9, f the gauge function)");
  integ->add_option("--out", inOut, "write CSV to this file instead of stdout");

  std::string ivInput, ivFormat = "text", ivOut;
  std::vector<double> ivState;
  std::vector<std::string> ivInvs;
  double ivTEnd = 20.0, ivTol = 1e-10, ivDetTol = 1e-8;
  std::uint64_t ivSeed = 0;
  auto* inv = app.add_subcommand(
      "involution", "conservation and involution report for detected integrals");
  inv->add_option("field", ivInput, "field file")->required();
  inv->add_option("--state", ivState, "orbit start x,y,z,vx,vy,vz (default: sampled)")
      ->expected(6)
      ->delimiter(',');
  inv->add_option("--t-end", ivTEnd, "orbit length for the drift check")
      ->capture_default_str();
  inv->add_option("--tol", ivTol, "adaptive integrator tolerance")->capture_default_str();
  inv->add_option("--det-tol", ivDetTol, "symmetry-detection threshold")
      ->capture_default_str();
  inv->add_option("--seed", ivSeed, "sampling seed")->capture_default_str();
  inv->add_option("--invariant", ivInvs, "extra invariant: generator JSON file");
  inv->add_option("--format", ivFormat, "report format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  inv->add_option("--out", ivOut, "write the report to this file instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*classify) return cmdClassify(clInput, clTol, clSeed, clFormat, clOut);
    if (*canon) return cmdCanon(caInput, caFormat, caOut);
    if (*vt) return cmdVerifyTables(vtScope, vtTol, vtSeed, vtFormat, vtOut);
    if (*integ)
      return cmdIntegrate(inInput, inState, inTEnd, inStep, inTol, inInvs, inOut);
    if (*inv)
      return cmdInvolution(ivInput, ivState, ivTEnd, ivTol, ivDetTol, ivSeed, ivInvs,
                           ivFormat, ivOut);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
