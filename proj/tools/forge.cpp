// forge: command-line front end for the workbench. Every command prints one
// JSON report {toolVersion, command, status, payload, seconds}; the exit code
// is 0 pass, 1 fail, 2 usage or input error, 3 budget exhausted or
// inconclusive.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "forge/error.hpp"
#include "forge/free_algebra.hpp"
#include "forge/metalang.hpp"
#include "forge/model_finder.hpp"
#include "forge/monad.hpp"
#include "forge/monad_laws.hpp"
#include "forge/presentation.hpp"
#include "forge/subsume.hpp"
#include "forge/tensor.hpp"
#include "forge/theorify.hpp"
#include "forge/theory.hpp"
#include "forge/theory_dsl.hpp"

using nlohmann::json;
using namespace forge;

namespace {

struct Outcome {
    std::string status = "pass";  // pass | fail | inconclusive | partial
    json payload = json::object();
    std::string text;             // replaces the JSON on stdout when set
};

struct UsageError : Error {
    using Error::Error;
};

int exit_code(const std::string& status)
{
    if (status == "pass")
        return 0;
    if (status == "fail")
        return 1;
    return 3;
}

// Combines sub-statuses: any fail wins, then partial/inconclusive, then pass.
std::string combine(const std::string& a, const std::string& b)
{
    if (a == "fail" || b == "fail")
        return "fail";
    if (a == "partial" || b == "partial")
        return "partial";
    if (a == "inconclusive" || b == "inconclusive")
        return "inconclusive";
    return "pass";
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw UsageError("cannot read " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

// A built-in theory name, or a path to a theory source file.
Theory load_theory(const std::string& source)
{
    if (std::filesystem::is_regular_file(source))
        return parse_theory(read_file(source));
    return builtin_theory(source);
}

TheoryFamily load_family(const std::string& source)
{
    if (std::filesystem::is_regular_file(source)) {
        Theory t = parse_theory(read_file(source));
        return [t](std::size_t) { return t; };
    }
    return theory_family(source);
}

std::vector<std::string> split_names(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ','))
        if (!item.empty())
            out.push_back(item);
    return out;
}

std::string law_status(const LawReport& r)
{
    if (!r.passed)
        return "fail";
    return r.sampled ? "partial" : "pass";
}

// ---- theory ----------------------------------------------------------------

Outcome theory_show(const std::string& source, bool pretty)
{
    Theory t = load_theory(source);
    Outcome o;
    o.payload = theory_to_json(t);
    if (pretty)
        o.text = print_theory(t);
    return o;
}

Outcome theory_tensor_cmd(const std::string& left, const std::string& right, bool show)
{
    Theory l = load_theory(left), r = load_theory(right);
    Theory t = theory_tensor(l, r);
    std::vector<Equation> added = commutation_equations(l, r);
    Outcome o;
    json eqs = json::array();
    for (const auto& eq : added)
        eqs.push_back(eq.str());
    o.payload = {{"theory", theory_to_json(t)}, {"commutationEquations", eqs}, {"added", added.size()}};
    if (show) {
        std::string text = print_theory(t);
        text += "\n# " + std::to_string(added.size()) + " commutation equations\n";
        for (const auto& eq : added)
            text += eq.str() + "\n";
        o.text = text;
    }
    return o;
}

// ---- free ------------------------------------------------------------------

Outcome free_cmd(const std::string& theory, const std::string& gens, std::size_t depth, std::size_t budget)
{
    QuotientAlgebra q = free_algebra(load_theory(theory), split_names(gens), depth, budget);
    Outcome o;
    o.payload = quotient_to_json(q);
    o.status = q.capped ? "partial" : q.closed ? "pass" : "inconclusive";
    return o;
}

// ---- monad -----------------------------------------------------------------

Outcome monad_laws(const std::string& name, std::size_t maxSize, std::uint64_t budget)
{
    LawCheckOptions opt;
    opt.maxSize = maxSize;
    opt.instanceBudget = budget;
    LawReport r = check_monad_laws(builtin_monad(name), opt);
    Outcome o;
    o.payload = r.to_json();
    o.status = law_status(r);
    return o;
}

Outcome monad_commute(const std::string& name, std::size_t aSize, std::size_t bSize, const std::string& p,
                      const std::string& q)
{
    FiniteMonad m = builtin_monad(name);
    FiniteSet a = atoms(aSize, "a"), b = atoms(bSize, "b");
    Value pv = parse_value(p), qv = parse_value(q);
    if (!m.carrier(a).contains(pv))
        throw UsageError("p is not an element of T A");
    if (!m.carrier(b).contains(qv))
        throw UsageError("q is not an element of T B");
    CommutationResult r = commutes(m, a, b, pv, qv);
    Outcome o;
    o.payload = {{"monad", name}, {"a", a.str()},  {"b", b.str()},           {"p", p},
                 {"q", q},        {"commutes", r.commutes}, {"left", r.left.str()}, {"right", r.right.str()}};
    o.status = r.commutes ? "pass" : "fail";
    return o;
}

Outcome monad_commutative(const std::string& name, std::size_t maxSize)
{
    CommutativityReport r = is_commutative(builtin_monad(name), maxSize);
    Outcome o;
    o.payload = r.to_json();
    if (!r.commutative) {
        o.status = "fail";
        o.payload["witness"]["replay"] = {"monad", "commute", "--monad", name, "--a-size", std::to_string(*r.aSize),
                                          "--b-size", std::to_string(*r.bSize), "--p", r.p->str(), "--q", r.q->str()};
    }
    return o;
}

Outcome monad_theorify(const std::string& name, std::size_t maxArity, bool withTheory)
{
    TheorifyOptions opt;
    opt.maxArity = maxArity;
    TheorifyResult r = theorify(builtin_monad(name), opt);
    Outcome o;
    o.payload = r.report.to_json();
    if (withTheory)
        o.payload["theory"] = theory_to_json(r.theory);
    o.status = r.report.violations == 0 ? "pass" : "fail";
    return o;
}

// ---- metalang --------------------------------------------------------------

Outcome metalang_check(const std::string& file)
{
    MLProgram prog = parse_program(read_file(file));
    MLType t = typecheck(prog.ctx, prog.term, prog.sig);
    Outcome o;
    o.payload = {{"term", prog.term.str()}, {"type", t.str()}};
    return o;
}

Outcome metalang_equiv(const std::string& fileA, const std::string& fileB, const std::string& monad,
                       std::size_t size, std::uint64_t budget)
{
    MLProgram a = parse_program(read_file(fileA));
    MLProgram b = parse_program(read_file(fileB));
    // Both sides are read against the first file's declarations.
    MLType ta = typecheck(a.ctx, a.term, a.sig);
    MLType tb = typecheck(a.ctx, b.term, a.sig);
    if (!(ta == tb))
        throw TypeError("equiv", "sides have types " + ta.str() + " and " + tb.str());
    EquivOptions opt;
    opt.sizeBound = size;
    opt.budget = budget;
    EquivResult r = equiv(a.ctx, a.term, b.term, builtin_monad(monad), a.sig, opt);
    Outcome o;
    o.payload = r.to_json();
    o.payload["type"] = ta.str();
    o.payload["monad"] = monad;
    o.status = !r.equal ? "fail" : r.exhaustive ? "pass" : "partial";
    return o;
}

Outcome metalang_eval(const std::string& file, const std::string& monad, const std::vector<std::string>& bindings)
{
    MLProgram prog = parse_program(read_file(file));
    MLType type = typecheck(prog.ctx, prog.term, prog.sig);
    FiniteMonad m = builtin_monad(monad);
    MLInterpretation in;
    for (const auto& [name, carrier] : prog.sig.bases) {
        if (!carrier)
            throw UsageError("eval needs a carrier for base type " + name);
        in.bases[name] = *carrier;
    }
    for (const auto& [name, f] : prog.sig.functions) {
        if (!f.table)
            throw UsageError("eval needs a table for function " + name);
        in.functions[name] = *f.table;
    }
    std::map<std::string, Value> given;
    for (const auto& b : bindings) {
        auto eq = b.find('=');
        if (eq == std::string::npos)
            throw UsageError("binding must look like name=value: " + b);
        given[b.substr(0, eq)] = parse_value(b.substr(eq + 1));
    }
    std::vector<Value> env;
    for (const auto& [name, t] : prog.ctx) {
        auto it = given.find(name);
        if (it == given.end())
            throw UsageError("no value for variable " + name);
        if (!ml_carrier(t, m, in).contains(it->second))
            throw UsageError(name + " = " + it->second.str() + " is not of type " + t.str());
        env.push_back(it->second);
    }
    Value v = evaluate(prog.term, m, prog.sig, in, prog.ctx, env);
    Outcome o;
    o.payload = {{"term", prog.term.str()}, {"type", type.str()}, {"monad", monad}, {"value", v.str()}};
    return o;
}

// ---- tensor ----------------------------------------------------------------

Outcome tensor_law_check(const std::string& file, const std::string& left, const std::string& right,
                         std::size_t yBound, std::size_t zBound)
{
    Presentation lp = builtin_presentation(left), rp = builtin_presentation(right);
    Theory sum = theory_sum(lp.theory, rp.theory);
    std::vector<std::uint32_t> gens;
    TableAlgebra a = algebra_from_json(json::parse(read_file(file)), sum.signature(), &gens);
    AlgebraCheck model = algebra_of_table(sum, a);
    Outcome o;
    o.payload = {{"left", left}, {"right", right}, {"carrier", a.size()}, {"sumModel", model.to_json(a)}};
    if (!model.ok) {
        o.status = "fail";
        return o;
    }
    auto [la, ra] = split_sum_algebra(lp.theory, rp.theory, a);
    TensorAlgebra ta{FiniteSet(a.elements), em_algebra_of_tables(lp, la), em_algebra_of_tables(rp, ra)};
    EMCheck le = check_em_algebra(ta.t), re = check_em_algebra(ta.s);
    TensorLawOptions opt;
    opt.yBound = yBound;
    opt.zBound = zBound;
    TensorLawReport law = check_tensor_law(ta, opt);
    AlgebraCheck comm = check_commutation_tables(lp.theory, rp.theory, a);
    o.payload["leftAlgebra"] = le.to_json();
    o.payload["rightAlgebra"] = re.to_json();
    o.payload["tensorLaw"] = law.to_json();
    o.payload["commutation"] = comm.to_json(a);
    o.payload["agree"] = law.ok == comm.ok;
    if (!le.ok || !re.ok || !law.ok)
        o.status = "fail";
    else if (law.partial)
        o.status = "partial";
    return o;
}

Outcome tensor_enum(const std::string& left, const std::string& right, const TensorSearchConfig& cfg)
{
    TensorEnumeration e = enumerate_tensor_algebras(load_family(left), load_family(right), cfg);
    e.left = left;
    e.right = right;
    Outcome o;
    o.payload = e.to_json();
    o.status = e.partial ? "partial" : "pass";
    return o;
}

Outcome tensor_saturate(const std::string& monad, std::size_t gens, std::size_t rounds, std::size_t budget)
{
    SaturationReport r = saturate_free_tensor(monad, gens, rounds, budget);
    Outcome o;
    o.payload = r.to_json();
    o.status = r.closure.capped ? "partial" : r.closure.fixpoint ? "pass" : "inconclusive";
    return o;
}

Outcome tensor_verify_state(std::size_t s, std::size_t x, std::size_t maxDepth, std::size_t budget)
{
    StateTensorReport r = verify_state_tensor(s, x, maxDepth, budget);
    Outcome o;
    o.payload = r.to_json();
    o.payload["found"] = r.classes;
    o.status = !r.conclusive() ? "inconclusive" : r.passed() ? "pass" : "fail";
    return o;
}

// ---- subsume ---------------------------------------------------------------

Outcome subsume_decide(const std::string& a, const std::string& x)
{
    Universe u;
    Lasso la = parse_set_lasso(a, u);
    Lasso lx = parse_value_lasso(x, u);
    Alignment al = align(la, lx);
    bool direct = subsumes(la, lx);
    bool chains = subsumes_by_chains(la, lx, u.names.size());
    Outcome o;
    o.payload = {{"a", set_lasso_str(la, u)}, {"x", value_lasso_str(lx, u)},     {"universe", u.names},
                 {"start", al.start},          {"period", al.period},              {"subsumes", direct},
                 {"chainMethod", chains},      {"agree", direct == chains}};
    o.status = direct == chains ? "pass" : "fail";
    return o;
}

Outcome subsume_ramsey(std::size_t samples, std::size_t universe, std::uint64_t seed)
{
    RamseyReport r = ramsey_run(samples, universe, seed);
    Outcome o;
    o.payload = r.to_json();
    o.status = r.passed() ? "pass" : "fail";
    return o;
}

Outcome subsume_catalog_run()
{
    Universe u = catalog_universe();
    json cases = json::array();
    std::size_t agree = 0;
    auto catalog = subsume_catalog();
    for (const auto& c : catalog) {
        bool direct = subsumes(c.a, c.x);
        bool chains = subsumes_by_chains(c.a, c.x, u.names.size());
        agree += direct == chains ? 1 : 0;
        cases.push_back({{"name", c.name},
                         {"a", set_lasso_str(c.a, u)},
                         {"x", value_lasso_str(c.x, u)},
                         {"subsumes", direct},
                         {"chainMethod", chains}});
    }
    Outcome o;
    o.payload = {{"cases", catalog.size()}, {"agree", agree}, {"instances", cases}};
    o.status = agree == catalog.size() ? "pass" : "fail";
    return o;
}

// ---- suites ----------------------------------------------------------------

struct SuitePart {
    std::string name;
    std::function<Outcome()> run;
};

Outcome run_parts(const std::vector<SuitePart>& parts)
{
    Outcome o;
    json results = json::array();
    for (const auto& part : parts) {
        Outcome r = part.run();
        o.status = combine(o.status, r.status);
        results.push_back({{"name", part.name}, {"status", r.status}, {"payload", r.payload}});
    }
    o.payload = {{"parts", results}};
    return o;
}

std::vector<SuitePart> laws_suite()
{
    std::vector<SuitePart> parts;
    for (const auto& name : builtin_monad_catalog())
        parts.push_back({"laws " + name, [name] { return monad_laws(name, 2, 200'000'000); }});
    parts.push_back({"unit laws wellorder size 3", [] {
                         LawCheckOptions opt;
                         opt.maxSize = 3;
                         opt.laws = {MonadLaw::LeftUnit, MonadLaw::RightUnit};
                         LawReport r = check_monad_laws(builtin_monad("wellorder"), opt);
                         return Outcome{law_status(r), r.to_json(), {}};
                     }});
    return parts;
}

std::vector<SuitePart> tensor_suite()
{
    std::vector<SuitePart> parts;
    for (auto [s, x] : {std::pair<std::size_t, std::size_t>{1, 1}, {1, 2}, {2, 1}})
        parts.push_back({"verify-state S=" + std::to_string(s) + " X=" + std::to_string(x),
                         [s, x] { return tensor_verify_state(s, x, 8, 2'000'000); }});
    parts.push_back({"enum Semilattice Unary symmetry-broken vs brute force", [] {
                         TensorSearchConfig cfg;
                         cfg.generators = 1;
                         cfg.maxCarrier = 3;
                         Outcome sb = tensor_enum("Semilattice", "Unary", cfg);
                         cfg.symmetryBreaking = false;
                         Outcome bf = tensor_enum("Semilattice", "Unary", cfg);
                         Outcome o;
                         o.payload = {{"symmetryBroken", sb.payload}, {"bruteForce", bf.payload}};
                         o.status = combine(sb.status, bf.status);
                         if (sb.payload["total"] != bf.payload["total"])
                             o.status = "fail";
                         return o;
                     }});
    parts.push_back({"enum WellOrder Sigma22Free 2 generators", [] {
                         TensorSearchConfig cfg;
                         cfg.generators = 2;
                         cfg.maxCarrier = 2;
                         return tensor_enum("WellOrder", "Sigma22Free", cfg);
                     }});
    parts.push_back({"saturate state:S=1", [] { return tensor_saturate("state:S=1", 1, 8, kDefaultTermBudget); }});
    return parts;
}

std::vector<SuitePart> subsume_suite()
{
    return {{"ramsey 1000 over 4 values", [] { return subsume_ramsey(1000, 4, 1); }},
            {"catalog against chain method", [] { return subsume_catalog_run(); }}};
}

Outcome suite(const std::string& name)
{
    std::vector<SuitePart> parts;
    if (name == "laws" || name == "all")
        for (auto& p : laws_suite())
            parts.push_back(std::move(p));
    if (name == "tensor" || name == "all")
        for (auto& p : tensor_suite())
            parts.push_back(std::move(p));
    if (name == "subsume" || name == "all")
        for (auto& p : subsume_suite())
            parts.push_back(std::move(p));
    if (parts.empty())
        throw UsageError("unknown suite '" + name + "' (laws, tensor, subsume, all)");
    return run_parts(parts);
}

// ---- output ----------------------------------------------------------------

std::string scalar_str(const json& j)
{
    return j.is_string() ? j.get<std::string>() : j.dump();
}

bool is_scalar_array(const json& j)
{
    for (const auto& e : j)
        if (e.is_structured())
            return false;
    return true;
}

// Objects as indented key/value lines; arrays of objects as one row each.
void render(const json& j, std::ostream& out, const std::string& indent)
{
    for (auto it = j.begin(); it != j.end(); ++it) {
        const json& v = it.value();
        std::string key = j.is_object() ? it.key() : "-";
        if (!v.is_structured() || (v.is_array() && is_scalar_array(v) && v.dump().size() < 100)) {
            out << indent << key << ": " << scalar_str(v) << "\n";
        } else if (v.is_array() && !v.empty() && v.front().is_object()) {
            out << indent << key << ":\n";
            for (const auto& row : v) {
                out << indent << "  |";
                for (auto c = row.begin(); c != row.end(); ++c)
                    if (!c.value().is_structured())
                        out << " " << c.key() << "=" << scalar_str(c.value()) << " |";
                out << "\n";
                json nested = json::object();
                for (auto c = row.begin(); c != row.end(); ++c)
                    if (c.value().is_structured())
                        nested[c.key()] = c.value();
                if (!nested.empty())
                    render(nested, out, indent + "    ");
            }
        } else {
            out << indent << key << ":\n";
            render(v, out, indent + "  ");
        }
    }
}

std::string default_out_path(const std::vector<std::string>& args)
{
    const char* dir = std::getenv("FORGE_OUT");
    if (dir == nullptr || *dir == '\0')
        return {};
    std::string stem = "forge";
    for (const auto& a : args) {
        if (a.empty() || a[0] == '-')
            break;
        stem += "-" + a;
    }
    return (std::filesystem::path(dir) / (stem + ".json")).string();
}

struct Globals {
    bool pretty = false;
    std::string out;
    std::string replay;
};

// Parses args (without the program name) into a command and runs it.
Outcome dispatch(const std::vector<std::string>& args, Globals& g)
{
    CLI::App app{"forge: equational theories, finite monads and their tensors"};
    app.require_subcommand(0, 1);
    app.fallthrough();
    app.add_flag("--pretty", g.pretty, "Render the report as indented text");
    app.add_option("--out,--json", g.out, "Write the JSON report to this file (default: $FORGE_OUT/forge-<command>.json)");
    app.add_option("--replay", g.replay, "Re-run the command recorded in a report file");

    std::function<Outcome()> action;
    auto on = [&](CLI::App* cmd, std::function<Outcome()> f) { cmd->callback([&action, f] { action = f; }); };

    // theory
    auto* theory = app.add_subcommand("theory", "Inspect and combine equational theories");
    theory->require_subcommand(1);
    std::string name, left, right, file;
    bool show = false;
    auto* tshow = theory->add_subcommand("show", "Print a built-in or file theory");
    tshow->add_option("theory", name, "Built-in name (e.g. Semilattice, StateTheory(2)) or file")->required();
    on(tshow, [&] { return theory_show(name, g.pretty); });
    auto* tparse = theory->add_subcommand("parse", "Parse a theory source file");
    tparse->add_option("file", file)->required()->check(CLI::ExistingFile);
    on(tparse, [&] { return theory_show(file, g.pretty); });
    auto* tsum = theory->add_subcommand("sum", "Disjoint union of two theories");
    tsum->add_option("--left", left)->required();
    tsum->add_option("--right", right)->required();
    on(tsum, [&] {
        Outcome o;
        Theory t = theory_sum(load_theory(left), load_theory(right));
        o.payload = theory_to_json(t);
        if (g.pretty)
            o.text = print_theory(t);
        return o;
    });
    auto* ttensor = theory->add_subcommand("tensor", "Sum plus all commutation equations");
    ttensor->add_option("--left", left)->required();
    ttensor->add_option("--right", right)->required();
    ttensor->add_flag("--show", show, "Print the theory and the added equations as text");
    on(ttensor, [&] { return theory_tensor_cmd(left, right, show || g.pretty); });

    // free
    std::string gens = "x";
    std::size_t depth = 3, budget = kDefaultTermBudget;
    auto* freeCmd = app.add_subcommand("free", "Free algebra of a theory over generators up to a term depth");
    freeCmd->add_option("--theory", name)->required();
    freeCmd->add_option("--gens", gens, "Comma-separated generator names")->capture_default_str();
    freeCmd->add_option("--depth", depth)->capture_default_str()->check(CLI::PositiveNumber);
    freeCmd->add_option("--budget", budget, "E-node budget")->capture_default_str()->check(CLI::PositiveNumber);
    on(freeCmd, [&] { return free_cmd(name, gens, depth, budget); });

    // monad
    std::string monad;
    std::size_t maxSize = 2, maxArity = 2, aSize = 1, bSize = 1;
    std::uint64_t instanceBudget = 200'000'000;
    std::string p, q;
    bool withTheory = false;
    auto* mon = app.add_subcommand("monad", "Check finite monads");
    mon->require_subcommand(1);
    auto* laws = mon->add_subcommand("laws", "Exhaustive Kleisli-law check");
    laws->add_option("--monad", monad)->required();
    laws->add_option("--max-size", maxSize)->capture_default_str();
    laws->add_option("--budget", instanceBudget, "Instances per size triple before sampling")->capture_default_str();
    on(laws, [&] { return monad_laws(monad, maxSize, instanceBudget); });
    auto* commute = mon->add_subcommand("commute", "Does one pair of programs p in T A, q in T B commute?");
    commute->add_option("--monad", monad)->required();
    commute->add_option("--a-size", aSize, "A = {a0..}")->capture_default_str();
    commute->add_option("--b-size", bSize, "B = {b0..}")->capture_default_str();
    commute->add_option("--p", p)->required();
    commute->add_option("--q", q)->required();
    on(commute, [&] { return monad_commute(monad, aSize, bSize, p, q); });
    auto* commutative = mon->add_subcommand("commutative", "Do all programs commute up to a set size?");
    commutative->add_option("--monad", monad)->required();
    commutative->add_option("--max-size", maxSize)->capture_default_str();
    on(commutative, [&] { return monad_commutative(monad, maxSize); });
    auto* theorifyCmd = mon->add_subcommand("theorify", "Truncated canonical theory of a monad and its schemas");
    theorifyCmd->add_option("--monad", monad)->required();
    theorifyCmd->add_option("--max-arity", maxArity)->capture_default_str();
    theorifyCmd->add_flag("--theory", withTheory, "Include the generated theory");
    on(theorifyCmd, [&] { return monad_theorify(monad, maxArity, withTheory); });

    // metalang
    std::string file2;
    std::vector<std::string> bindings;
    std::uint64_t envBudget = 100'000'000;
    auto* ml = app.add_subcommand("metalang", "Typecheck, evaluate and compare monadic programs (.ml-meta)");
    ml->require_subcommand(1);
    auto* mcheck = ml->add_subcommand("check", "Typecheck a program");
    mcheck->add_option("file", file)->required()->check(CLI::ExistingFile);
    mcheck->add_option("--monad", monad, "Accepted for symmetry; typing does not depend on it");
    on(mcheck, [&] { return metalang_check(file); });
    auto* mequiv = ml->add_subcommand("equiv", "Compare two programs under all small interpretations");
    mequiv->add_option("file1", file)->required()->check(CLI::ExistingFile);
    mequiv->add_option("file2", file2)->required()->check(CLI::ExistingFile);
    mequiv->add_option("--monad", monad)->required();
    mequiv->add_option("--size", maxSize, "Largest size for unfixed base types")->capture_default_str();
    mequiv->add_option("--budget", envBudget, "Environments to try")->capture_default_str();
    on(mequiv, [&] { return metalang_equiv(file, file2, monad, maxSize, envBudget); });
    auto* meval = ml->add_subcommand("eval", "Evaluate a program with every base type and function fixed");
    meval->add_option("file", file)->required()->check(CLI::ExistingFile);
    meval->add_option("--monad", monad)->required();
    meval->add_option("--env", bindings, "name=value for each context variable");
    on(meval, [&] { return metalang_eval(file, monad, bindings); });

    // tensor
    std::size_t yBound = 2, zBound = 2, minCarrier = 1, rounds = 8, stateSize = 2, genCount = 1;
    std::size_t maxDepth = 8, nodeBudgetState = 2'000'000;
    std::uint64_t nodeBudget = 2'000'000'000;
    bool noSymmetry = false;
    auto* ten = app.add_subcommand("tensor", "Tensor algebras: law checks and enumeration");
    ten->require_subcommand(1);
    auto* lawCheck = ten->add_subcommand("law-check", "Check an algebra file against the tensor law");
    lawCheck->add_option("--algebra", file, "JSON {carrier, tables, generators}")->required()->check(CLI::ExistingFile);
    lawCheck->add_option("--left", left, "Monad presented by the left operations")->required();
    lawCheck->add_option("--right", right, "Monad presented by the right operations")->required();
    lawCheck->add_option("--y", yBound)->capture_default_str();
    lawCheck->add_option("--z", zBound)->capture_default_str();
    on(lawCheck, [&] { return tensor_law_check(file, left, right, yBound, zBound); });
    auto* en = ten->add_subcommand("enum", "Reachable tensor algebras up to isomorphism");
    en->add_option("--left", left)->required();
    en->add_option("--right", right)->required();
    en->add_option("--gens", genCount)->capture_default_str();
    en->add_option("--min-size", minCarrier)->capture_default_str()->check(CLI::PositiveNumber);
    en->add_option("--max-size", maxSize)->capture_default_str();
    en->add_option("--budget", nodeBudget, "Search nodes per carrier size")->capture_default_str();
    en->add_flag("--no-symmetry", noSymmetry, "Enumerate all tables and deduplicate afterwards");
    on(en, [&] {
        TensorSearchConfig cfg;
        cfg.generators = genCount;
        cfg.minCarrier = minCarrier;
        cfg.maxCarrier = maxSize;
        cfg.nodeBudget = nodeBudget;
        cfg.symmetryBreaking = !noSymmetry;
        return tensor_enum(left, right, cfg);
    });
    auto* sat = ten->add_subcommand("saturate", "Free semilattice tensor a monad's theory, by alternating closure");
    sat->add_option("--monad", monad)->required();
    sat->add_option("--gens", genCount)->capture_default_str();
    sat->add_option("--rounds", rounds)->capture_default_str();
    sat->add_option("--budget", budget)->capture_default_str();
    on(sat, [&] { return tensor_saturate(monad, genCount, rounds, budget); });
    auto* vs = ten->add_subcommand("verify-state", "Free semilattice tensor state against S -> P(S x X)");
    vs->add_option("--S", stateSize)->capture_default_str()->check(CLI::PositiveNumber);
    vs->add_option("--X", genCount)->capture_default_str()->check(CLI::PositiveNumber);
    vs->add_option("--max-depth", maxDepth)->capture_default_str();
    vs->add_option("--budget", nodeBudgetState)->capture_default_str();
    on(vs, [&] { return tensor_verify_state(stateSize, genCount, maxDepth, nodeBudgetState); });

    // subsume
    std::string la, lx;
    std::size_t samples = 1000, universe = 4;
    std::uint64_t seed = 1;
    auto* sub = app.add_subcommand("subsume", "Subsumption between lasso sequences");
    sub->require_subcommand(0, 1);
    sub->add_option("--a", la, "Set lasso, e.g. pre:[{v}];cyc:[{u},{v}]");
    sub->add_option("--x", lx, "Value lasso, e.g. pre:[];cyc:[u,v]");
    on(sub, [&] {
        if (la.empty() || lx.empty())
            throw UsageError("subsume needs --a and --x, or a subcommand");
        return subsume_decide(la, lx);
    });
    auto* decide = sub->add_subcommand("decide", "Decide subsumption by both methods");
    decide->add_option("--a", la)->required();
    decide->add_option("--x", lx)->required();
    on(decide, [&] { return subsume_decide(la, lx); });
    auto* ramsey = sub->add_subcommand("ramsey", "Union-split property on seeded random instances");
    ramsey->add_option("--samples", samples)->capture_default_str();
    ramsey->add_option("--universe", universe)->capture_default_str();
    ramsey->add_option("--seed", seed)->capture_default_str();
    on(ramsey, [&] { return subsume_ramsey(samples, universe, seed); });
    auto* cat = sub->add_subcommand("catalog", "Both methods on the fixed 50-instance catalog");
    on(cat, [&] { return subsume_catalog_run(); });

    // suite
    std::string suiteName;
    auto* su = app.add_subcommand("suite", "Aggregated acceptance runs: laws, tensor, subsume, all");
    su->add_option("name", suiteName)->required();
    on(su, [&] { return suite(suiteName); });

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        std::exit(0);
    } catch (const CLI::CallForAllHelp&) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        std::exit(0);
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }
    if (!g.replay.empty())
        return {};
    // A subcommand's own help is handled by CLI11; reaching here without an
    // action means only a parent command was given.
    if (!action)
        throw UsageError("missing subcommand");
    // The callbacks only record the action; running here keeps exceptions
    // out of CLI11's parse loop.
    return action();
}

std::string join_args(const std::vector<std::string>& args)
{
    std::string out;
    for (const auto& a : args)
        out += (out.empty() ? "" : " ") + a;
    return out;
}

int emit(const json& report, const Outcome& o, const Globals& g, const std::vector<std::string>& args)
{
    std::string path = g.out.empty() ? default_out_path(args) : g.out;
    if (!path.empty()) {
        std::ofstream f(path);
        if (!f) {
            std::cerr << "forge: cannot write " << path << "\n";
            return 2;
        }
        f << report.dump(2) << "\n";
    }
    if (!o.text.empty()) {
        std::cout << o.text;
    } else if (g.pretty) {
        render(report, std::cout, "");
    } else {
        std::cout << report.dump(2) << "\n";
    }
    return exit_code(report["status"].get<std::string>());
}

json envelope(const std::vector<std::string>& args, const Outcome& o, double seconds)
{
    return {{"toolVersion", FORGE_VERSION},
            {"command", {{"argv", args}, {"line", "forge " + join_args(args)}}},
            {"status", o.status},
            {"payload", o.payload},
            {"seconds", seconds}};
}

}  // namespace

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    Globals g;
    try {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o = dispatch(args, g);
        if (!g.replay.empty()) {
            // Re-run the recorded argv and report whether the status repeats.
            json old = json::parse(read_file(g.replay));
            std::vector<std::string> recorded = old.at("command").at("argv").get<std::vector<std::string>>();
            Globals inner;
            o = dispatch(recorded, inner);
            std::string before = old.at("status").get<std::string>();
            o.payload = {{"replayOf", g.replay},
                         {"recordedStatus", before},
                         {"reproduced", before == o.status},
                         {"report", o.payload}};
            o.text.clear();
            args = recorded;
        }
        double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return emit(envelope(args, o, seconds), o, g, args);
    } catch (const UsageError& e) {
        std::cerr << "forge: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "forge: parse error: " << e.what() << "\n";
        return 2;
    } catch (const TypeError& e) {
        Outcome o;
        o.status = "fail";
        o.payload = {{"status", "fail"}, {"rule", e.rule()}, {"error", e.what()}};
        // An ill-typed program is a usage error everywhere but metalang check,
        // where rejecting it is the answer.
        if (args.size() >= 2 && args[0] == "metalang" && args[1] == "check") {
            emit(envelope(args, o, 0), o, g, args);
            return 1;
        }
        std::cerr << "forge: type error: " << e.what() << "\n";
        return 2;
    } catch (const BudgetExceeded& e) {
        Outcome o;
        o.status = "partial";
        o.payload = {{"error", e.what()}};
        return emit(envelope(args, o, 0), o, g, args);
    } catch (const json::exception& e) {
        std::cerr << "forge: bad JSON input: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "forge: " << e.what() << "\n";
        return 2;
    }
}
