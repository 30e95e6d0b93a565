// qcm: quantum causal models on the command line.
//
// Exit codes: 0 success/pass, 1 check failed, 2 input error, 3 resource
// limit, 4 undefined query, 5 unsupported graph shape.

#include "qcm/calculus.hpp"
#include "qcm/circuit.hpp"
#include "qcm/errors.hpp"
#include "qcm/io.hpp"
#include "qcm/rng.hpp"
#include "qcm/version.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

namespace {

using namespace qcm;

std::string baseDirOf(const std::string& path) {
    const auto parent = std::filesystem::path(path).parent_path();
    return parent.empty() ? "." : parent.string();
}

bool looksLikeModel(const std::string& text) {
    const auto j = nlohmann::json::parse(text, nullptr, false);
    return !j.is_discarded() && j.is_object() && j.contains("wires");
}

FunctionalModel overrideSeeds(FunctionalModel m, std::uint64_t seed) {
    std::uint64_t counter = 0;
    for (auto& g : m.gates) {
        if (auto* u = std::get_if<Unitary>(&g); u && u->fromHaar) {
            u->haarSeed = subseed(seed, counter++);
            u->matrix = haarUnitary(static_cast<int>(u->matrix.rows()), u->haarSeed);
            if (u->haarAdjoint) u->matrix = Matrix(u->matrix.adjoint());
        }
    }
    return m;
}

int cmdSimulate(const std::string& modelPath, const std::string& outPath,
                const std::string& graphOutPath, std::optional<std::uint64_t> seedOverride) {
    FunctionalModel m = io::parseModel(io::readFile(modelPath), baseDirOf(modelPath));
    std::string prov = io::inputsDigest({{"model", modelPath}});
    if (seedOverride) {
        m = overrideSeeds(std::move(m), *seedOverride);
        prov += ";seed_override=" + std::to_string(*seedOverride);
    }
    const JointDistribution p = simulate(m);
    io::writeFile(outPath, io::serializeDistribution(p, prov));
    if (!graphOutPath.empty())
        io::writeFile(graphOutPath, io::serializeGraph(deriveDag(m), prov));
    std::cout << "wrote " << p.cellCount() << " rows to " << outPath << "\n";
    return 0;
}

int cmdMarkov(const std::string& distPath, const std::string& graphPath, double tol,
              const std::string& outPath) {
    const JointDistribution p = io::parseDistribution(io::readFile(distPath));
    const CausalGraph g = io::parseGraph(io::readFile(graphPath));
    const MarkovReport rep = markovCheck(p, g, tol);
    const std::string prov = io::inputsDigest({{"dist", distPath}, {"graph", graphPath}});
    if (!outPath.empty()) io::writeFile(outPath, io::serializeMarkovReport(rep, prov));
    std::cout << (rep.pass ? "PASS" : "FAIL") << " worst_residual="
              << io::formatDouble17(rep.worstResidual) << " tolerance="
              << io::formatDoubleShort(rep.tolerance) << "\n";
    if (!rep.pass) {
        for (const auto& t : rep.triples) {
            if (t.separated && t.residual > tol) {
                std::cout << "offending triple: u=" << io::formatSet(t.u)
                          << " v=" << io::formatSet(t.v) << " w=" << io::formatSet(t.w)
                          << " residual=" << io::formatDouble17(t.residual) << "\n";
                break;
            }
        }
    }
    return rep.pass ? 0 : 1;
}

struct ActionInput {
    std::optional<FunctionalModel> model;
    JointDistribution dist;
    CausalGraph graph;
    std::string provenance;
};

ActionInput loadActionInput(const std::string& inputPath, const std::string& graphPath,
                            bool needModel) {
    ActionInput in;
    const std::string text = io::readFile(inputPath);
    if (looksLikeModel(text)) {
        in.model = io::parseModel(text, baseDirOf(inputPath));
        in.dist = simulate(*in.model);
        in.graph = deriveDag(*in.model);
        in.provenance = io::inputsDigest({{"model", inputPath}});
    } else {
        if (needModel)
            throw ParseError("method=surgery/both needs a model file, not a distribution");
        in.dist = io::parseDistribution(text);
        if (graphPath.empty())
            throw ParseError("--graph is required when the input is a distribution");
        in.graph = io::parseGraph(io::readFile(graphPath));
        in.provenance = io::inputsDigest({{"dist", inputPath}, {"graph", graphPath}});
    }
    return in;
}

int cmdIntervene(const std::string& inputPath, const std::string& graphPath,
                 const std::string& node, int value, const std::string& method,
                 const std::string& variantName, const std::string& outPrefix) {
    const bool doFormula = method == "formula" || method == "both";
    const bool doSurgery = method == "surgery" || method == "both";
    const InterventionVariant variant = variantName == "asPrinted"
                                            ? InterventionVariant::AsPrinted
                                            : InterventionVariant::AncestorMarginal;
    ActionInput in = loadActionInput(inputPath, graphPath, doSurgery);

    std::optional<InterventionResult> formula;
    std::optional<JointDistribution> surgered;
    if (doFormula) formula = interveneFormula(in.dist, in.graph, node, value, variant);
    if (doSurgery) surgered = simulate(applyInterventionSurgery(*in.model, node, value));

    std::optional<double> tv;
    if (formula && surgered) tv = tvDistance(formula->distribution, *surgered);

    if (formula)
        io::writeFile(outPrefix + ".formula.csv",
                      io::serializeDistribution(formula->distribution, in.provenance));
    if (surgered)
        io::writeFile(outPrefix + ".surgery.csv",
                      io::serializeDistribution(*surgered, in.provenance));
    if (formula) {
        io::writeFile(outPrefix + ".report.txt",
                      io::serializeInterventionReport(*formula, method, tv, in.provenance));
    }
    if (tv) std::cout << "tv_distance: " << io::formatDouble17(*tv) << "\n";
    return 0;
}

int cmdUnmeasure(const std::string& inputPath, const std::string& graphPath,
                 const std::string& node, const std::string& method,
                 const std::string& outPrefix) {
    const bool doFormula = method == "formula" || method == "both";
    const bool doSurgery = method == "surgery" || method == "both";
    ActionInput in = loadActionInput(inputPath, graphPath, doSurgery);

    std::optional<UnmeasurementResult> formula;
    std::optional<JointDistribution> surgered;
    if (doFormula) {
        const int dz = in.graph.node(node).dim;
        formula = unmeasureFormula(in.dist, in.graph, node, dz);
    }
    if (doSurgery) surgered = simulate(applyUnmeasurementSurgery(*in.model, node));

    std::optional<double> tv;
    if (formula && surgered) tv = tvDistance(formula->distribution, *surgered);

    if (formula)
        io::writeFile(outPrefix + ".formula.csv",
                      io::serializeDistribution(formula->distribution, in.provenance));
    if (surgered)
        io::writeFile(outPrefix + ".surgery.csv",
                      io::serializeDistribution(*surgered, in.provenance));
    if (formula)
        io::writeFile(outPrefix + ".report.txt",
                      io::serializeUnmeasurementReport(*formula, method, tv, in.provenance));
    if (tv) std::cout << "tv_distance: " << io::formatDouble17(*tv) << "\n";
    return 0;
}

int cmdInvert(const std::string& modelPath, const std::string& outModelPath,
              const std::string& outGraphPath) {
    const FunctionalModel m = io::parseModel(io::readFile(modelPath), baseDirOf(modelPath));
    const std::string prov = io::inputsDigest({{"model", modelPath}});
    const FunctionalModel rev = timeReverse(m);
    if (!outModelPath.empty()) io::writeFile(outModelPath, io::serializeModel(rev, prov));
    if (!outGraphPath.empty())
        io::writeFile(outGraphPath, io::serializeGraph(causalInvert(deriveDag(m)), prov));
    return 0;
}

int cmdSic(int dim, std::uint64_t seed, double tol, long maxIter, const std::string& outPath,
           const std::string& reportPath) {
    const double effectiveTol = tol > 0 ? tol : (dim <= 3 ? 1e-10 : 1e-7);
    Fiducial f = (dim == 2 || dim == 3) ? builtinFiducial(dim)
                                        : searchFiducial(dim, seed, effectiveTol, maxIter);
    const SicValidationReport rep = validateSic(whPovmFromFiducial(f), effectiveTol);
    std::string prov = "dim=" + std::to_string(dim) + ";seed=" + std::to_string(seed) +
                       ";tol=" + io::formatDoubleShort(effectiveTol);
    if (!outPath.empty()) io::writeFile(outPath, io::serializeFiducial(f, prov));
    if (!reportPath.empty())
        io::writeFile(reportPath, io::serializeSicReport(rep, dim, prov));
    std::cout << (rep.pass ? "PASS" : "FAIL") << " max_gram_error="
              << io::formatDouble17(rep.maxGramError) << "\n";
    return rep.pass ? 0 : 1;
}

int cmdInfer(const std::string& distPath, double tol, int maxNodes,
             const std::string& outPath) {
    const JointDistribution p = io::parseDistribution(io::readFile(distPath));
    const auto graphs = compatibleQdags(p, tol, maxNodes);
    const std::string prov = io::inputsDigest({{"dist", distPath}});
    if (!outPath.empty()) io::writeFile(outPath, io::serializeGraphList(graphs, prov));
    std::cout << "compatible_qdags: " << graphs.size() << "\n";
    return 0;
}

int cmdDiff(const std::string& aPath, const std::string& bPath) {
    const JointDistribution a = io::parseDistribution(io::readFile(aPath));
    const JointDistribution b = io::parseDistribution(io::readFile(bPath));
    std::cout << "tv_distance: " << io::formatDouble17(tvDistance(a, b)) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"QBist quantum causal models: simulate, check, intervene, un-measure"};
    app.require_subcommand(1);

    // simulate
    std::string simModel, simOut, simGraphOut;
    std::optional<std::uint64_t> simSeed;
    auto* simulateCmd = app.add_subcommand("simulate", "simulate a functional model exactly");
    simulateCmd->add_option("model", simModel, "model file")->required();
    simulateCmd->add_option("--out", simOut, "output distribution CSV")->required();
    simulateCmd->add_option("--graph-out", simGraphOut, "write the derived DAG here");
    simulateCmd->add_option("--seed-override", simSeed,
                            "re-seed every haar_random gate from this seed");

    // markov
    std::string mkDist, mkGraph, mkOut;
    double mkTol = 1e-9;
    auto* markovCmd = app.add_subcommand("markov", "check the Quantum Markov Condition");
    markovCmd->add_option("dist", mkDist, "distribution CSV")->required();
    markovCmd->add_option("graph", mkGraph, "graph file")->required();
    markovCmd->add_option("--tol", mkTol, "residual tolerance (default 1e-9)");
    markovCmd->add_option("--out", mkOut, "write the full report here");

    // intervene
    std::string intInput, intGraph, intNode, intMethod = "both",
                intVariant = "ancestorMarginal", intOut;
    int intValue = 0;
    auto* intervene = app.add_subcommand("intervene", "intervention by formula and/or surgery");
    intervene->add_option("input", intInput, "model file or distribution CSV")->required();
    intervene->add_option("--graph", intGraph, "graph file (required for CSV input)");
    intervene->add_option("--node", intNode, "node to intervene on")->required();
    intervene->add_option("--value", intValue, "outcome to set (1..d^2)")->required();
    intervene->add_option("--method", intMethod, "formula|surgery|both (default both)")
        ->check(CLI::IsMember({"formula", "surgery", "both"}));
    intervene->add_option("--variant", intVariant,
                          "ancestorMarginal|asPrinted (default ancestorMarginal)")
        ->check(CLI::IsMember({"ancestorMarginal", "asPrinted"}));
    intervene->add_option("--out", intOut, "output prefix")->required();

    // unmeasure
    std::string unInput, unGraph, unNode, unMethod = "both", unOut;
    auto* unmeasure = app.add_subcommand("unmeasure", "un-measurement by formula and/or surgery");
    unmeasure->add_option("input", unInput, "model file or distribution CSV")->required();
    unmeasure->add_option("--graph", unGraph, "graph file (required for CSV input)");
    unmeasure->add_option("--node", unNode, "measurement to remove")->required();
    unmeasure->add_option("--method", unMethod, "formula|surgery|both (default both)")
        ->check(CLI::IsMember({"formula", "surgery", "both"}));
    unmeasure->add_option("--out", unOut, "output prefix")->required();

    // invert
    std::string invModel, invOutModel, invOutGraph;
    auto* invert = app.add_subcommand("invert", "time-reverse a model / invert its DAG");
    invert->add_option("model", invModel, "model file")->required();
    invert->add_option("--out-model", invOutModel, "write the reversed model here");
    invert->add_option("--out-graph", invOutGraph, "write the inverted DAG here");

    // sic
    int sicDim = 2;
    std::uint64_t sicSeed = 1;
    double sicTol = 0.0;
    long sicMaxIter = 100000;
    std::string sicOut, sicReport;
    auto* sic = app.add_subcommand("sic", "construct or search a SIC-POVM fiducial");
    sic->add_option("--dim", sicDim, "Hilbert dimension")->required();
    sic->add_option("--seed", sicSeed, "search seed (default 1)");
    sic->add_option("--tol", sicTol, "validation tolerance (default 1e-10 built-in, 1e-7 search)");
    sic->add_option("--max-iter", sicMaxIter, "search budget (default 100000)");
    sic->add_option("--out", sicOut, "write the fiducial here");
    sic->add_option("--report", sicReport, "write the validation report here");

    // infer
    std::string infDist, infOut;
    double infTol = 1e-9;
    int infMaxNodes = 5;
    auto* infer = app.add_subcommand("infer", "enumerate compatible QDAGs");
    infer->add_option("dist", infDist, "distribution CSV")->required();
    infer->add_option("--tol", infTol, "Markov tolerance (default 1e-9)");
    infer->add_option("--max-nodes", infMaxNodes, "enumeration cap (default and max 5)");
    infer->add_option("--out", infOut, "write the graph list here");

    // diff
    std::string diffA, diffB;
    auto* diff = app.add_subcommand("diff", "total variation distance between two tables");
    diff->add_option("a", diffA, "first distribution CSV")->required();
    diff->add_option("b", diffB, "second distribution CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (simulateCmd->parsed())
            return cmdSimulate(simModel, simOut, simGraphOut, simSeed);
        if (markovCmd->parsed()) return cmdMarkov(mkDist, mkGraph, mkTol, mkOut);
        if (intervene->parsed())
            return cmdIntervene(intInput, intGraph, intNode, intValue, intMethod, intVariant,
                                intOut);
        if (unmeasure->parsed()) return cmdUnmeasure(unInput, unGraph, unNode, unMethod, unOut);
        if (invert->parsed()) return cmdInvert(invModel, invOutModel, invOutGraph);
        if (sic->parsed()) return cmdSic(sicDim, sicSeed, sicTol, sicMaxIter, sicOut, sicReport);
        if (infer->parsed()) return cmdInfer(infDist, infTol, infMaxNodes, infOut);
        if (diff->parsed()) return cmdDiff(diffA, diffB);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ResourceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const UndefinedQueryError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const UnsupportedShapeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
