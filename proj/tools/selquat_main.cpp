#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "selquat/oracle.hpp"

using namespace selquat;
using json = nlohmann::ordered_json;

namespace {

Rat parse_rat(std::string const& s)
{
    Rat r;
    if (s.empty() || mpq_set_str(r.get_mpq_t(), s.c_str(), 10) != 0)
        throw input_error("cannot parse rational: '" + s + "'");
    r.canonicalize();
    return r;
}

FieldElem parse_elem(std::string const& s)
{
    auto comma = s.find(',');
    if (comma == std::string::npos)
        return FieldElem::rational(parse_rat(s));
    return FieldElem(parse_rat(s.substr(0, comma)), parse_rat(s.substr(comma + 1)));
}

std::pair<FieldElem, FieldElem> parse_algebra(std::string const& s)
{
    auto semi = s.find(';');
    if (semi != std::string::npos)
        return {parse_elem(s.substr(0, semi)), parse_elem(s.substr(semi + 1))};
    auto comma = s.find(',');
    if (comma == std::string::npos)
        throw input_error("algebra needs two structure constants: 'a,b' or 'a;b'");
    return {parse_elem(s.substr(0, comma)), parse_elem(s.substr(comma + 1))};
}

std::vector<std::string> split(std::string const& s, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty())
            out.push_back(item);
    return out;
}

PrimeIdeal parse_place(FieldPtr const& K, std::string const& s)
{
    auto dot = s.find('.');
    Int p(s.substr(0, dot == std::string::npos ? s.size() : dot));
    auto primes = K->factor_prime(p);
    if (dot == std::string::npos) {
        if (primes.size() != 1)
            throw input_error("prime " + p.get_str() + " splits; use '" + p.get_str() +
                              ".0' or '" + p.get_str() + ".1'");
        return primes[0];
    }
    int idx = std::stoi(s.substr(dot + 1));
    if (idx < 0 || idx >= (int)primes.size())
        throw input_error("no prime with index " + std::to_string(idx) + " above " +
                          p.get_str());
    return primes[idx];
}

std::vector<LocalOrderData> parse_level(FieldPtr const& K, std::string const& s)
{
    std::vector<LocalOrderData> out;
    if (s.empty() || s == "1")
        return out;
    for (auto const& item : split(s, ',')) {
        auto colon = item.find(':');
        if (colon == std::string::npos)
            throw input_error("level entries look like 'p:e' or 'p.i:e'");
        std::string ptok = item.substr(0, colon);
        int e = std::stoi(item.substr(colon + 1));
        auto dot = ptok.find('.');
        std::vector<PrimeIdeal> places;
        if (dot == std::string::npos) {
            Int p(ptok);
            for (auto const& v : K->factor_prime(p))
                places.push_back(v);
        } else {
            places.push_back(parse_place(K, ptok));
        }
        for (auto const& v : places) {
            LocalOrderData d;
            d.place = v;
            d.kind = LocalOrderData::Kind::Eichler;
            d.exponent = e;
            out.push_back(d);
        }
    }
    return out;
}

std::vector<LocalOrderData> parse_custom(FieldPtr const& K, std::string const& s)
{
    /* p[.i]:e:u:o with u, o in {0, 1}: units contained / odd valuations */
    std::vector<LocalOrderData> out;
    if (s.empty())
        return out;
    for (auto const& item : split(s, ',')) {
        auto parts = split(item, ':');
        if (parts.size() != 4)
            throw input_error("custom entries look like 'p[.i]:e:u01:o01'");
        LocalOrderData d;
        d.place = parse_place(K, parts[0]);
        d.kind = LocalOrderData::Kind::Custom;
        d.exponent = std::stoi(parts[1]);
        d.units_contained = parts[2] == "1";
        d.odd_valuations = parts[3] == "1";
        out.push_back(d);
    }
    return out;
}

Ideal parse_conductor(FieldPtr const& K, std::string const& s)
{
    if (s.empty() || s == "1")
        return K->unit_ideal();
    Ideal out = K->unit_ideal();
    for (auto const& item : split(s, '*')) {
        auto caret = item.find('^');
        std::string base = item.substr(0, caret == std::string::npos ? item.size() : caret);
        int e = caret == std::string::npos ? 1 : std::stoi(item.substr(caret + 1));
        Ideal factor;
        if (base.find('.') != std::string::npos)
            factor = parse_place(K, base).ideal;
        else
            factor = K->ideal(parse_rat(base));
        out = K->mul(out, K->pow(factor, e));
    }
    return out;
}

struct Query {
    std::string field = "1";
    std::string algebra = "1,1";
    std::string level;
    std::string custom;
    std::string delta;
    std::string conductor = "1";
    bool optimal = false;
    long oracle_bound = 30;
};

json query_json(Query const& q)
{
    json j;
    j["field"] = q.field;
    j["algebra"] = q.algebra;
    j["level"] = q.level;
    j["custom"] = q.custom;
    j["delta"] = q.delta;
    j["conductor"] = q.conductor;
    j["optimal"] = q.optimal;
    j["oracle_bound"] = q.oracle_bound;
    return j;
}

json gamma_json(GenusClass const& c)
{
    std::string s = "gamma=";
    if (c.gamma.empty())
        s += "()";
    else
        for (int b : c.gamma)
            s += (b ? '1' : '0');
    return s;
}

json run(std::string const& sub, Query const& q)
{
    json out;
    out["query"] = query_json(q);
    out["query"]["subcommand"] = sub;
    json result;
    std::vector<std::string> provenance;

    auto K = BaseField::make(Int(q.field));
    auto [a, b] = parse_algebra(q.algebra);
    auto make_spec = [&]() {
        auto A = QuatAlg::make(K, a, b);
        auto entries = parse_level(K, q.level);
        for (auto const& c : parse_custom(K, q.custom))
            entries.push_back(c);
        return OrderSpec::make(A, entries);
    };
    auto make_ext = [&]() {
        if (q.delta.empty())
            throw input_error("this subcommand needs --delta");
        return QuadExt::make(K, parse_elem(q.delta));
    };

    if (sub == "ramify") {
        auto A = QuatAlg::make(K, a, b);
        json places = json::array();
        for (auto const& v : A.ramified)
            places.push_back(place_str(v));
        result["places"] = places;
        result["disc_ideal_norm"] = K->ideal_norm(A.disc_ideal).get_str();
        result["eichler"] = satisfies_eichler(A);
    } else if (sub == "embeds") {
        auto A = QuatAlg::make(K, a, b);
        auto mk = make_ext();
        if (std::holds_alternative<SplitAlgebra>(mk)) {
            result["split_algebra"] = true;
            result["embeds"] = true;
        } else {
            auto E = std::get<QuadExt>(mk);
            bool ok = field_embeds(A, E);
            result["embeds"] = ok;
            if (!ok) {
                for (auto const& v : A.ramified)
                    if (E.split_type(v) == SplitType::Split) {
                        result["obstruction_place"] = place_str(v);
                        break;
                    }
            }
        }
        provenance.push_back("Theorem 1.1");
    } else if (sub == "genus") {
        auto R = make_spec();
        auto dual = genus_characters(R);
        result["rank"] = dual.rank();
        result["type_number"] = dual.class_count().get_str();
        json basis = json::array();
        for (auto const& chi : dual.basis)
            basis.push_back(chi.delta.str());
        result["dual_basis_deltas"] = basis;
        auto classes = parameterize(R, dual, std::nullopt);
        json primes = json::array();
        for (auto const& v : classes[0].param->generator_primes)
            primes.push_back(v.str());
        result["generator_primes"] = primes;
        provenance.push_back("Theorem 3.1");
        provenance.push_back("Proposition 3.3");
    } else if (sub == "classfield") {
        auto R = make_spec();
        auto mk = make_ext();
        if (std::holds_alternative<SplitAlgebra>(mk))
            throw input_error("classfield needs a field extension, delta is a square");
        auto E = std::get<QuadExt>(mk);
        auto trace = in_class_field_trace(R, E);
        result["contains"] = trace.contains;
        json entries = json::array();
        for (auto const& e : trace.entries) {
            json je;
            je["place"] = place_str(e.place);
            je["rule"] = e.rule;
            je["ok"] = e.ok;
            entries.push_back(je);
        }
        result["trace"] = entries;
        provenance.push_back("Theorem 5.2");
    } else if (sub == "select") {
        auto R = make_spec();
        auto mk = make_ext();
        auto W = QuadOrder::make(mk, parse_conductor(K, q.conductor));
        Verdict v = q.optimal ? decide_optimal(R, W) : decide_embedding(R, W);
        result["outcome"] = outcome_str(v.outcome);
        if (v.outcome == Outcome::Half) {
            json adm = json::array();
            for (auto const& c : v.admitting)
                adm.push_back(gamma_json(c));
            result["admitting"] = adm;
            json cls = json::array();
            for (auto const& c : v.classes)
                cls.push_back(gamma_json(c));
            result["classes"] = cls;
            json primes = json::array();
            for (auto const& p : v.param->generator_primes)
                primes.push_back(p.str());
            result["generator_primes"] = primes;
        }
        provenance.push_back(v.provenance);
    } else if (sub == "verify") {
        auto R = make_spec();
        auto mk = make_ext();
        auto W = QuadOrder::make(mk, parse_conductor(K, q.conductor));
        auto rep = cross_validate(R, W, q.oracle_bound);
        result["embedding_outcome"] = rep.embedding_outcome;
        if (!rep.optimal_outcome.empty())
            result["optimal_outcome"] = rep.optimal_outcome;
        result["consistent"] = rep.consistent;
        json orders = json::array();
        for (auto const& o : rep.orders) {
            json jo;
            jo["label"] = o.label;
            jo["decider_admits"] = o.decider_admits;
            jo["witness_found"] = o.witness_found;
            jo["optimal_witness_found"] = o.optimal_witness_found;
            jo["status"] = o.status;
            orders.push_back(jo);
        }
        result["orders"] = orders;
        result["notes"] = rep.notes;
        provenance.push_back(rep.embedding_provenance);
    } else {
        throw input_error("unknown subcommand: " + sub);
    }

    out["result"] = result;
    out["provenance"] = provenance;
    return out;
}

void load_config(std::string const& path, Query& q)
{
    std::ifstream in(path);
    if (!in)
        throw input_error("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        std::string key, value;
        auto eq = line.find('=');
        if (eq != std::string::npos) {
            key = line.substr(0, eq);
            value = line.substr(eq + 1);
        } else {
            std::stringstream ss(line);
            ss >> key >> value;
        }
        auto trim = [](std::string& s) {
            while (!s.empty() && isspace((unsigned char)s.front()))
                s.erase(s.begin());
            while (!s.empty() && isspace((unsigned char)s.back()))
                s.pop_back();
        };
        trim(key);
        trim(value);
        if (key.empty())
            continue;
        if (key == "field")
            q.field = value;
        else if (key == "algebra")
            q.algebra = value;
        else if (key == "level")
            q.level = value;
        else if (key == "custom")
            q.custom = value;
        else if (key == "delta")
            q.delta = value;
        else if (key == "conductor")
            q.conductor = value;
        else if (key == "optimal")
            q.optimal = (value == "1" || value == "true");
        else if (key == "oracle_bound")
            q.oracle_bound = std::stol(value);
        else
            throw input_error("config line " + std::to_string(lineno) + ": unknown key '" +
                              key + "'");
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"selectivity of quadratic orders in quaternion-order genera"};
    std::string subcommand, config_path, json_out;
    Query q;

    app.add_option("subcommand", subcommand,
                   "one of: ramify, embeds, genus, classfield, select, verify")
        ->required();
    app.add_option("--config", config_path, "flat key-value config file");
    auto* fo = app.add_option("--field", q.field, "squarefree d for K = Q(sqrt(d)); 1 means Q");
    auto* ao = app.add_option("--algebra", q.algebra, "structure constants 'a,b' (or 'a;b')");
    auto* lo = app.add_option("--level", q.level, "Eichler level, 'p:e[,p:e...]'");
    auto* co = app.add_option("--custom", q.custom, "custom local data 'p[.i]:e:u01:o01'");
    auto* dl = app.add_option("--delta", q.delta, "quadratic extension L = K(sqrt(delta))");
    auto* cd = app.add_option("--conductor", q.conductor, "conductor ideal, e.g. '3' or '3.0^2'");
    auto* op = app.add_flag("--optimal", q.optimal, "decide optimal embeddings");
    auto* ob = app.add_option("--oracle-bound", q.oracle_bound, "witness search bound");
    app.add_option("--json-out", json_out, "write the report to a file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const& e) {
        return app.exit(e);
    }

    try {
        Query file_q;
        if (!config_path.empty()) {
            load_config(config_path, file_q);
            /* command-line values override the file */
            if (!*fo)
                q.field = file_q.field;
            if (!*ao)
                q.algebra = file_q.algebra;
            if (!*lo)
                q.level = file_q.level;
            if (!*co)
                q.custom = file_q.custom;
            if (!*dl)
                q.delta = file_q.delta;
            if (!*cd)
                q.conductor = file_q.conductor;
            if (!*op)
                q.optimal = file_q.optimal;
            if (!*ob)
                q.oracle_bound = file_q.oracle_bound;
        }

        auto t0 = std::chrono::steady_clock::now();
        json out = run(subcommand, q);
        auto t1 = std::chrono::steady_clock::now();
        out["timing_ms"] =
            std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
        std::string text = out.dump(2) + "\n";
        if (!json_out.empty()) {
            std::ofstream f(json_out);
            f << text;
        } else {
            std::cout << text;
        }
        return 0;
    } catch (assumptions_error const& e) {
        json err;
        err["error"] = "assumptions-not-met";
        err["message"] = e.what();
        err["coprime_disc_level"] = e.coprime_disc_level;
        err["level_coprime_ramification"] = e.level_coprime_ramification;
        std::cout << err.dump(2) << "\n";
        return 2;
    } catch (std::exception const& e) {
        json err;
        err["error"] = "input";
        err["message"] = e.what();
        std::cout << err.dump(2) << "\n";
        return 1;
    }
}
