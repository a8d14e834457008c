// travwave: wave-speed solver and profile reconstruction for bistable
// reaction-diffusion-convection problems with p-Laplacian diffusion.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "travwave/conditions.hpp"
#include "travwave/config.hpp"
#include "travwave/pde.hpp"
#include "travwave/profile.hpp"
#include "travwave/report.hpp"
#include "travwave/speeds.hpp"

namespace {

using namespace travwave;

struct CommonArgs {
    std::string problemPath;
    std::string outPath; // empty -> stdout
    double tol = 1e-6;
    double matchTol = 1e-7;
    double relTol = 1e-10;
    double absTol = 1e-10;
    double maxStep = 0.01;
};

void addCommon(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("problem", a.problemPath, "problem file (.toml or .json)")->required();
    cmd->add_option("-o,--out", a.outPath, "write the JSON report here instead of stdout");
    cmd->add_option("--tol", a.tol, "bisection tolerance on the wave speed");
    cmd->add_option("--match-tol", a.matchTol, "terminal matching tolerance");
    cmd->add_option("--rel-tol", a.relTol, "integrator relative tolerance");
    cmd->add_option("--abs-tol", a.absTol, "integrator absolute tolerance");
    cmd->add_option("--max-step", a.maxStep, "integrator maximum step");
}

SpeedOptions speedOptions(const CommonArgs& a) {
    SpeedOptions o;
    o.integ.relTol = a.relTol;
    o.integ.absTol = a.absTol;
    o.integ.maxStep = a.maxStep;
    o.integ.zeroThreshold = std::max(1e-8, 10.0 * a.absTol);
    o.matchTol = a.matchTol;
    return o;
}

void emit(const CommonArgs& a, const JsonWriter& w) {
    if (a.outPath.empty()) {
        std::fputs(w.str().c_str(), stdout);
        std::fputc('\n', stdout);
    } else {
        std::ofstream out(a.outPath, std::ios::binary);
        if (!out) throw Error("cannot open '" + a.outPath + "' for writing");
        out << w.str() << "\n";
    }
}

void envelope(JsonWriter& w, const char* command, const LoadedProblem& lp, const CommonArgs& a) {
    w.kv("tool", "travwave");
    w.kv("version", "0.1.0");
    w.kv("command", command);
    w.key("problem").beginObject();
    w.kv("path", lp.path);
    w.kv("hash", "fnv1a:" + fnv1a_hex(lp.rawBytes));
    w.endObject();
    w.key("tolerances").beginObject();
    w.kv("tol", a.tol);
    w.kv("matchTol", a.matchTol);
    w.kv("relTol", a.relTol);
    w.kv("absTol", a.absTol);
    w.kv("maxStep", a.maxStep);
    w.endObject();
}

void writeWitnesses(JsonWriter& w, const std::vector<Witness>& ws) {
    w.beginArray();
    for (const auto& x : ws) {
        w.beginObject();
        w.kv("t", x.t);
        w.kv("value", x.value);
        w.kv("note", x.note);
        w.endObject();
    }
    w.endArray();
}

void writeConditionReport(JsonWriter& w, const ConditionReport& r) {
    w.beginObject();
    w.kv("condition", r.condition);
    w.kv("verdict", to_string(r.verdict));
    w.kv("detail", r.detail);
    w.kv("minMargin", r.minMargin);
    w.key("witnesses");
    writeWitnesses(w, r.witnesses);
    w.key("limitDiagnostics");
    writeWitnesses(w, r.limitDiagnostics);
    w.endObject();
}

void writeThreshold(JsonWriter& w, const ThresholdResult& r) {
    w.beginObject();
    w.kv("which", r.which == ThresholdKind::FrontCF ? "cF" : "cB");
    w.kv("value", r.value);
    w.kv("terminalValueAtSStar", r.terminalValueAtSStar);
    w.kv("converged", r.converged);
    w.kv("saturatedAtEndpoint", r.saturatedAtEndpoint);
    w.key("primaryBracket").beginArray().value(r.primaryBracket[0]).value(r.primaryBracket[1]).endArray();
    w.key("rungValues").beginArray();
    for (const auto& rv : r.rungValues)
        w.beginArray().value(rv[0]).value(rv[1]).endArray();
    w.endArray();
    w.key("bracketHistory").beginArray();
    for (const auto& bh : r.bracketHistory)
        w.beginArray().value(bh[0]).value(bh[1]).endArray();
    w.endArray();
    w.endObject();
}

void writeBrackets(JsonWriter& w, const SpeedBrackets& b) {
    w.beginObject();
    w.key("cFPrimary").beginArray().value(b.loFPrimary).value(b.hiFPrimary).endArray();
    w.key("cFSharpened").beginArray().value(b.loF).value(b.hiF).endArray();
    w.key("cBPrimary").beginArray().value(b.loBPrimary).value(b.hiBPrimary).endArray();
    w.key("cBSharpened").beginArray().value(b.loB).value(b.hiB).endArray();
    w.key("cStarWindow").beginArray().value(b.cStarLo).value(b.cStarHi).endArray();
    w.endObject();
}

void writeDerived(JsonWriter& w, const DerivedQuantities& dq) {
    w.kv("p", dq.p);
    w.kv("pPrime", dq.pPrime);
    w.kv("sStar", dq.sStar);
    w.kv("kappa", dq.kappa);
    w.kv("hm", dq.hm);
    w.kv("hM", dq.hM);
    w.kv("hAtSStar", dq.hAtSStar);
    w.kv("hInf", dq.hInfGlobal);
    w.kv("hSup", dq.hSupGlobal);
    w.kv("HsStar", dq.HsStar);
    w.kv("H1", dq.H1);
    w.kv("fIntegral", dq.fIntegral);
    w.kv("fIntegralConverged", dq.fIntegralConverged);
    w.key("muTilde").beginObject();
    w.kv("value", dq.muTilde.value);
    w.kv("argmax", dq.muTilde.argmax);
    w.kv("finite", dq.muTilde.finite);
    w.endObject();
    w.key("muHat").beginObject();
    w.kv("value", dq.muHat.value);
    w.kv("argmax", dq.muHat.argmax);
    w.kv("finite", dq.muHat.finite);
    w.endObject();
    w.key("nuTilde").beginObject();
    w.kv("value", dq.nuTilde.value);
    w.kv("converged", dq.nuTilde.converged);
    w.endObject();
    w.key("nuHat").beginObject();
    w.kv("value", dq.nuHat.value);
    w.kv("converged", dq.nuHat.converged);
    w.endObject();
}

void dumpTrajectory(const std::string& prefix, const Trajectory& tr, const char* tag) {
    std::ofstream csv(prefix + tag + ".csv");
    if (!csv) throw Error("cannot open trajectory CSV for writing");
    csv << "t,y\n";
    char buf[80];
    for (const auto& [t, y] : tr.nodes()) {
        std::snprintf(buf, sizeof buf, "%.12e,%.12e\n", t, y);
        csv << buf;
    }
    JsonWriter w;
    w.beginObject();
    w.kv("direction", tag);
    w.kv("c", tr.c());
    if (tr.exit()) {
        w.key("exit").beginObject();
        w.kv("t", tr.exit()->t);
        w.kv("kind", tr.exit()->kind == ExitKind::HitZero ? "hitZero" : "reachedEnd");
        w.endObject();
    } else {
        w.key("exit").null();
    }
    w.kv("terminalValue", tr.terminalValue());
    w.kv("fVanishesNearStart", tr.fVanishesNearStart());
    w.kv("bootstrapWidth", tr.bootstrapWidth());
    w.endObject();
    std::ofstream js(prefix + tag + ".json");
    js << w.str() << "\n";
}

int runValidate(const CommonArgs& a) {
    LoadedProblem lp = load_problem_file(a.problemPath);
    auto rep = validate_problem(lp.spec);
    JsonWriter w;
    w.beginObject();
    envelope(w, "validate", lp, a);
    w.kv("overall", to_string(rep.overall()));
    w.key("hypotheses").beginArray();
    for (const auto& item : rep.items) {
        w.beginObject();
        w.kv("id", item.id);
        w.kv("verdict", to_string(item.verdict));
        w.kv("detail", item.detail);
        w.key("witnesses");
        writeWitnesses(w, item.witnesses);
        w.endObject();
    }
    w.endArray();
    w.kv("fIntegral", rep.fIntegral);
    w.kv("fIntegralConverged", rep.fIntegralConverged);
    w.endObject();
    emit(a, w);
    return 0;
}

int runQuantities(const CommonArgs& a) {
    LoadedProblem lp = load_problem_file(a.problemPath);
    auto dq = derived_quantities(lp.spec);
    auto br = speed_bounds(lp.spec, dq);
    JsonWriter w;
    w.beginObject();
    envelope(w, "quantities", lp, a);
    writeDerived(w, dq);
    w.key("brackets");
    writeBrackets(w, br);
    w.endObject();
    emit(a, w);
    return 0;
}

int runThresholds(const CommonArgs& a) {
    LoadedProblem lp = load_problem_file(a.problemPath);
    auto opt = speedOptions(a);
    auto rF = threshold_cF(lp.spec, a.tol, opt);
    auto rB = threshold_cB(lp.spec, a.tol, opt);
    JsonWriter w;
    w.beginObject();
    envelope(w, "thresholds", lp, a);
    w.key("cF");
    writeThreshold(w, rF);
    w.key("cB");
    writeThreshold(w, rB);
    w.endObject();
    emit(a, w);
    return 0;
}

int runSpeed(const CommonArgs& a, const std::string& dumpPrefix) {
    LoadedProblem lp = load_problem_file(a.problemPath);
    auto rep = critical_speed(lp.spec, a.tol, speedOptions(a));
    JsonWriter w;
    w.beginObject();
    envelope(w, "speed", lp, a);
    w.kv("verdict", to_string(rep.verdict));
    if (rep.cStar) w.kv("cStar", *rep.cStar);
    else w.key("cStar").null();
    w.kv("cF", rep.cF);
    w.kv("cB", rep.cB);
    w.kv("cFConverged", rep.cFConverged);
    w.kv("cBConverged", rep.cBConverged);
    w.kv("iterations", rep.iterations);
    w.key("probes").beginArray();
    for (const auto& pr : rep.evidence) {
        w.beginObject();
        w.kv("c", pr.c);
        w.kv("class", to_string(pr.kind));
        w.endObject();
    }
    w.endArray();
    w.key("warnings").beginArray();
    for (const auto& s : rep.warnings) w.value(s);
    w.endArray();
    w.key("brackets");
    writeBrackets(w, rep.brackets);
    w.endObject();
    emit(a, w);

    if (!dumpPrefix.empty() && rep.cStar) {
        auto traj = critical_trajectories(lp.spec, *rep.cStar, speedOptions(a).integ,
                                          std::max(a.matchTol, 1e-6));
        dumpTrajectory(dumpPrefix, *traj.forward, "forward");
        dumpTrajectory(dumpPrefix, *traj.backward, "backward");
    }
    return 0;
}

int runProfile(const CommonArgs& a, const std::string& csvPath, int nSamples) {
    LoadedProblem lp = load_problem_file(a.problemPath);
    auto rep = critical_speed(lp.spec, a.tol, speedOptions(a));
    if (rep.verdict != WaveVerdict::UniqueWaveExists) {
        JsonWriter w;
        w.beginObject();
        envelope(w, "profile", lp, a);
        w.kv("verdict", to_string(rep.verdict));
        w.kv("error", "no admissible wave speed: nothing to reconstruct");
        w.endObject();
        emit(a, w);
        return 0;
    }
    auto traj = critical_trajectories(lp.spec, *rep.cStar, speedOptions(a).integ,
                                      std::max(a.matchTol, 1e-6));
    auto wp = reconstruct_profile(lp.spec, traj, nSamples);
    auto rs = profile_residual(lp.spec, wp, traj, *rep.cStar, 256);
    write_profile_csv(csvPath, wp);

    JsonWriter w;
    w.beginObject();
    envelope(w, "profile", lp, a);
    w.kv("cStar", *rep.cStar);
    w.kv("csv", csvPath);
    w.kv("samples", wp.z.size());
    w.kv("z0", wp.z0);
    w.kv("z1", wp.z1);
    w.key("zetas").beginArray();
    for (double z : wp.zetas) w.value(z);
    w.endArray();
    auto frontObj = [&](const FrontInfo& f) {
        w.beginObject();
        w.kv("finite", f.finite);
        w.kv("z", f.z);
        w.kv("tailExponent", f.tailExponent);
        w.kv("exponentReliable", f.exponentReliable);
        w.kv("sumRatio", f.sumRatio);
        w.endObject();
    };
    w.key("leftFront");
    frontObj(wp.leftFront);
    w.key("rightFront");
    frontObj(wp.rightFront);
    w.key("residual").beginObject();
    w.kv("maxAbs", rs.maxAbs);
    w.kv("pairs", rs.pairs);
    w.key("fluxMismatch").beginArray();
    for (double v : rs.fluxMismatch) w.value(v);
    w.endArray();
    w.key("uPrimeJump").beginArray();
    for (double v : rs.uPrimeJump) w.value(v);
    w.endArray();
    w.endObject();
    w.endObject();
    emit(a, w);
    return 0;
}

int runCheck(const CommonArgs& a, double speedToCheck, bool haveSpeed) {
    LoadedProblem lp = load_problem_file(a.problemPath);
    auto reports = check_all(lp.spec);
    if (haveSpeed) reports.push_back(check_necessary_speed(lp.spec, speedToCheck));

    JsonWriter w;
    w.beginObject();
    envelope(w, "check", lp, a);
    w.key("reports").beginArray();
    for (const auto& r : reports) writeConditionReport(w, r);
    w.endArray();
    w.endObject();
    emit(a, w);

    std::string summary;
    for (const auto& r : reports) {
        if (!summary.empty()) summary += ", ";
        summary += r.condition + "=" + to_string(r.verdict);
    }
    std::fprintf(stderr, "%s\n", summary.c_str());
    return 0;
}

int runSimulate(const CommonArgs& a, double L, int cells, double tMax, double cfl,
                int snapshots, const std::string& outPrefix) {
    LoadedProblem lp = load_problem_file(a.problemPath);
    SimulateOptions so;
    so.nSnapshots = snapshots;
    auto field = simulate(lp.spec, L, cells, tMax, cfl, so);
    double speed = measure_front_speed(field);
    if (!outPrefix.empty()) write_snapshots_csv(outPrefix, field);

    JsonWriter w;
    w.beginObject();
    envelope(w, "simulate", lp, a);
    w.kv("L", L);
    w.kv("nCells", cells);
    w.kv("tMax", tMax);
    w.kv("cflSafety", cfl);
    w.kv("steps", field.steps);
    w.kv("snapshots", field.times.size());
    w.kv("measuredFrontSpeed", speed);
    w.endObject();
    emit(a, w);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"traveling-wave speed solver for bistable reaction-diffusion-convection "
                 "equations with p-Laplacian diffusion"};
    app.require_subcommand(1);

    CommonArgs a;
    std::string dumpPrefix, csvPath = "profile.csv", simPrefix;
    int nSamples = 512, cells = 1024, snapshots = 64;
    double L = 40.0, tMax = 30.0, cfl = 0.8;
    double speedToCheck = 0.0;

    auto* vCmd = app.add_subcommand("validate", "check the structural hypotheses");
    addCommon(vCmd, a);
    auto* qCmd = app.add_subcommand("quantities", "derived scalar quantities and speed brackets");
    addCommon(qCmd, a);
    auto* tCmd = app.add_subcommand("thresholds", "sub-interval threshold speeds");
    addCommon(tCmd, a);
    auto* sCmd = app.add_subcommand("speed", "critical wave speed by shooting bisection");
    addCommon(sCmd, a);
    sCmd->add_option("--dump-trajectory", dumpPrefix,
                     "write the critical forward/backward trajectories with this file prefix");
    auto* pCmd = app.add_subcommand("profile", "reconstruct the wave profile U(z)");
    addCommon(pCmd, a);
    pCmd->add_option("--csv", csvPath, "profile CSV output path");
    pCmd->add_option("--samples", nSamples, "number of profile samples");
    auto* cCmd = app.add_subcommand("check", "theorem-level condition checks");
    addCommon(cCmd, a);
    auto* speedOpt = cCmd->add_option("--c", speedToCheck, "also check this claimed wave speed");
    auto* simCmd = app.add_subcommand("simulate", "PDE evolution cross-check");
    addCommon(simCmd, a);
    simCmd->add_option("--length", L, "half-width of the spatial domain");
    simCmd->add_option("--cells", cells, "number of finite-volume cells");
    simCmd->add_option("--tmax", tMax, "final time");
    simCmd->add_option("--cfl", cfl, "CFL safety factor in (0,1)");
    simCmd->add_option("--snapshots", snapshots, "number of stored snapshots");
    simCmd->add_option("--out-prefix", simPrefix, "write snapshot CSVs with this prefix");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (vCmd->parsed()) return runValidate(a);
        if (qCmd->parsed()) return runQuantities(a);
        if (tCmd->parsed()) return runThresholds(a);
        if (sCmd->parsed()) return runSpeed(a, dumpPrefix);
        if (pCmd->parsed()) return runProfile(a, csvPath, nSamples);
        if (cCmd->parsed()) return runCheck(a, speedToCheck, speedOpt->count() > 0);
        if (simCmd->parsed()) return runSimulate(a, L, cells, tMax, cfl, snapshots, simPrefix);
    } catch (const SyntaxError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 1;
    }
    return 0;
}
