#include "spectra_cert/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "spectra_cert/bs.hpp"
#include "spectra_cert/conditions.hpp"
#include "spectra_cert/errors.hpp"
#include "spectra_cert/multiplier.hpp"
#include "spectra_cert/spectral.hpp"

namespace spectra_cert {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kExperiments = {"check-conditions", "bs-norm",           "hs-identity",
                                               "spectrum",         "pseudospectrum",    "identity-check",
                                               "singular-sequence", "magnetic-smoke"};

const std::vector<std::string> kTopLevelKeys = {
    "experiment", "potential", "dimension", "grid_n", "r_max",  "ell_max", "outlier_tol", "z_list", "z_window",
    "levels",     "lambda",    "n_list",    "mode",   "ell",    "box_n",   "magnetic",    "output"};

// Experiments that have a CSV schema.
bool has_csv(const std::string& e) {
    return e == "spectrum" || e == "pseudospectrum" || e == "identity-check" || e == "magnetic-smoke" ||
           e == "bs-norm" || e == "singular-sequence";
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

[[noreturn]] void config_error(const std::string& field, const std::string& what) {
    throw ConfigError("config field '" + field + "': " + what);
}

template <class T>
T get_as(const json& j, const std::string& field) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        config_error(field, "wrong type");
    }
}

cplx parse_complex(const json& j, const std::string& field) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    config_error(field, "expected a number or [re, im]");
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

ParamMap parse_params(const json& j, const std::string& field) {
    if (!j.is_object()) config_error(field, "expected an object");
    ParamMap out;
    for (const auto& [k, v] : j.items()) {
        if (!v.is_number()) config_error(field + "." + k, "expected a number");
        out[k] = v.get<double>();
    }
    return out;
}

// Finite doubles as numbers; infinities and NaN as strings.
json number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
    return v;
}

json constant_json(const Constant& c) { return c.divergent ? json("+inf") : number(c.value); }

std::string csv_num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Applies one dotted `key=value` override to the document.
void apply_override(json& doc, const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq), text = kv.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ConfigError("--set: malformed key '" + key + "'");
        if (!node->is_object()) throw ConfigError("--set: '" + key + "' descends into a non-object");
        if (dot == std::string::npos) {
            (*node)[part] = value;
            return;
        }
        node = &(*node)[part];
        if (node->is_null()) *node = json::object();
        start = dot + 1;
    }
}

void validate(const ExperimentConfig& c) {
    if (!contains(kExperiments, c.experiment)) config_error("experiment", "unknown experiment '" + c.experiment + "'");
    if (c.dimension < 3) config_error("dimension", "must be >= 3");
    if ((c.experiment == "bs-norm" || c.experiment == "hs-identity") && c.dimension != 3)
        throw ConfigError(c.experiment + " requires dimension 3");
    if ((c.experiment == "spectrum" || c.experiment == "pseudospectrum" || c.experiment == "magnetic-smoke") &&
        c.dimension != 3)
        throw ConfigError(c.experiment + " requires dimension 3");
    if (!contains(catalog_names(), c.potential_name))
        config_error("potential.name", "unknown potential '" + c.potential_name + "'");
    const auto keys = catalog_param_keys(c.potential_name);
    for (const auto& [k, v] : c.potential_params)
        if (!contains(keys, k)) config_error("potential.params." + k, "unknown parameter");
    try {
        catalog(c.potential_name, c.potential_params, c.dimension);
    } catch (const std::exception& ex) {
        config_error("potential", ex.what());
    }
    if (c.grid_n < 8) config_error("grid_n", "must be >= 8");
    if (!(c.r_max > 0.0)) config_error("r_max", "must be positive");
    if (c.ell_max < 0) config_error("ell_max", "must be >= 0");
    if (c.outlier_tol && !(*c.outlier_tol > 0.0)) config_error("outlier_tol", "must be positive");
    if (c.mode != "radial" && c.mode != "box") config_error("mode", "expected 'radial' or 'box'");
    if (c.ell < 0) config_error("ell", "must be >= 0");
    if (c.box_n < 8 || c.box_n > 20) config_error("box_n", "must be in [8, 20]");
    if (c.formats.empty()) config_error("output.formats", "must not be empty");
    for (const auto& f : c.formats) {
        if (f != "json" && f != "csv") config_error("output.formats", "unknown format '" + f + "'");
        if (f == "csv" && !has_csv(c.experiment)) config_error("output.formats", "csv is not available for " + c.experiment);
    }
    if (c.output_path.empty()) config_error("output.path", "must not be empty");

    const auto& e = c.experiment;
    if (e == "bs-norm" && c.z_list.empty()) config_error("z_list", "required for bs-norm");
    if (e == "pseudospectrum") {
        if (!c.z_window) config_error("z_window", "required for pseudospectrum");
        if (c.z_window->n_re < 1 || c.z_window->n_im < 1) config_error("z_window", "n_re and n_im must be >= 1");
    }
    if ((e == "identity-check" || e == "singular-sequence" || e == "magnetic-smoke") && !c.lambda)
        config_error("lambda", "required for " + e);
    if (e == "singular-sequence") {
        if (c.n_list.size() < 2) config_error("n_list", "at least two entries required for singular-sequence");
        for (int n : c.n_list)
            if (n < 1) config_error("n_list", "entries must be >= 1");
        if (c.lambda->imag() != 0.0 || c.lambda->real() < 0.0) config_error("lambda", "must be real and >= 0");
    }
    if (e == "magnetic-smoke") {
        if (!c.lambda || !(c.lambda->real() > 0.0)) config_error("lambda", "Re lambda must be positive");
        try {
            magnetic_catalog(c.magnetic_name, c.magnetic_params, c.dimension);
        } catch (const std::exception& ex) {
            config_error("magnetic", ex.what());
        }
    }
}

// ---------------------------------------------------------------------------
// Experiment bodies. Each fills a JSON document, an optional CSV table and a
// list of failed numerical checks.

struct Outcome {
    json doc = json::object();
    std::string csv;
    std::vector<std::string> failures;
};

struct Stages {
    std::vector<StageTiming> timings;

    template <class F>
    auto operator()(const std::string& name, F&& f) {
        const auto t0 = std::chrono::steady_clock::now();
        auto finish = [&] {
            timings.push_back({name, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()});
        };
        try {
            if constexpr (std::is_void_v<decltype(f())>) {
                f();
                finish();
            } else {
                auto r = f();
                finish();
                return r;
            }
        } catch (const PreconditionError& e) {
            throw PreconditionError(name + ": " + e.what());
        } catch (const UnsupportedError& e) {
            throw UnsupportedError(name + ": " + e.what());
        } catch (const ConvergenceError& e) {
            throw ConvergenceError(name + ": " + e.what());
        } catch (const CheckFailure& e) {
            throw CheckFailure(name + ": " + e.what());
        }
    }
};

json identity_json(const IdentityResult& r) {
    json terms = json::array();
    for (const auto& t : r.terms) terms.push_back({{"name", t.name}, {"re", number(t.value.real())}, {"im", number(t.value.imag())}});
    return {{"id", r.id},           {"context", r.context}, {"lhs", number(r.lhs)},
            {"rhs", number(r.rhs)}, {"residual", number(r.residual)}, {"terms", terms}};
}

void identity_csv_rows(std::string& csv, const std::string& id, const IdentityResult& r) {
    for (const auto& t : r.terms)
        csv += id + "," + t.name + "," + csv_num(t.value.real()) + "," + csv_num(t.value.imag()) + "," +
               csv_num(r.residual) + "\n";
}

const char* kIdentityHeader = "identity_id,term_name,value_re,value_im,residual\n";

json chain_json(const std::vector<ChainCheck>& chain) {
    json out = json::array();
    for (const auto& c : chain)
        out.push_back({{"name", c.name}, {"lhs", number(c.lhs)}, {"rhs", number(c.rhs)}, {"holds", c.holds}});
    return out;
}

Outcome run_check_conditions(const ExperimentConfig& c, const Potential& V, Stages& stage) {
    ConditionOptions o;
    o.grid_n = c.grid_n;
    o.r_max = c.r_max;
    o.ell_max = c.ell_max;
    const auto rep = stage("condition-checkers/check_conditions", [&] { return check_conditions(V, o); });
    Outcome out;
    json& j = out.doc;
    j["a"] = number(rep.a);
    j["a_method"] = to_string(rep.a_method);
    j["rollnik"] = rep.rollnik ? constant_json(*rep.rollnik) : json(nullptr);
    j["frank_l32"] = rep.frank_l32 ? constant_json(*rep.frank_l32) : json(nullptr);
    j["sobolev_chain_a"] = rep.sobolev_chain_a ? constant_json(*rep.sobolev_chain_a) : json(nullptr);
    j["Lambda"] = constant_json(rep.Lambda);
    j["b1"] = constant_json(rep.b1);
    j["b2"] = constant_json(rep.b2);
    j["b3"] = constant_json(rep.b3);
    json verdicts = json::object();
    for (const auto& [k, v] : rep.verdicts) verdicts[k] = to_string(v);
    j["verdicts"] = verdicts;
    j["a_variational"] = rep.a_variational ? number(*rep.a_variational) : json(nullptr);
    if (rep.a_variational) {
        const auto pw = subordination_a_pointwise(V);
        if (!pw.divergent && pw.value < *rep.a_variational - 1e-6 * (1.0 + pw.value))
            out.failures.push_back("pointwise a below variational a");
    }
    return out;
}

Outcome run_bs_norm(const ExperimentConfig& c, const Potential& V, Stages& stage) {
    const auto grid = RadialGrid::graded(c.grid_n, c.r_max);
    Outcome out;
    json rows = json::array();
    out.csv = "z_re,z_im,norm,hs_norm,tail_warning\n";
    double norm0 = -1.0;
    stage("birman-schwinger/assemble_bs", [&] {
        norm0 = assemble_bs(V, cplx{0.0}, grid, c.ell_max).norm;
        for (cplx z : c.z_list) {
            const auto m = assemble_bs(V, z, grid, c.ell_max);
            json per = json::array();
            for (double v : m.per_ell_norms) per.push_back(number(v));
            rows.push_back({{"z_re", z.real()},
                            {"z_im", z.imag()},
                            {"norm", number(m.norm)},
                            {"hs_norm", number(m.hs_norm)},
                            {"per_ell_norms", per},
                            {"tail_warning", m.tail_warning}});
            out.csv += csv_num(z.real()) + "," + csv_num(z.imag()) + "," + csv_num(m.norm) + "," + csv_num(m.hs_norm) +
                       "," + (m.tail_warning ? "true" : "false") + "\n";
            if (m.norm > norm0 * 1.02) out.failures.push_back("norm at z exceeds the z = 0 norm by more than 2%");
        }
    });
    out.doc = {{"norm_zero", number(norm0)}, {"grid_n", c.grid_n}, {"r_max", c.r_max}, {"ell_max", c.ell_max},
               {"summaries", rows}};
    return out;
}

Outcome run_hs_identity(const ExperimentConfig& c, const Potential& V, Stages& stage) {
    const auto hs = stage("birman-schwinger/hs_norm", [&] { return hs_norm(V); });
    Outcome out;
    out.doc = {{"hs_direct", number(hs.direct)},
               {"rollnik_over_4pi", number(hs.rollnik_over_4pi)},
               {"relative_gap", number(hs.relative_gap)},
               {"divergent", hs.divergent}};
    if (!hs.divergent) {
        const auto m = stage("birman-schwinger/assemble_bs",
                             [&] { return assemble_bs(V, cplx{0.0}, RadialGrid::uniform(c.grid_n, c.r_max), c.ell_max); });
        out.doc["sigma_max"] = number(m.norm);
        if (m.norm > hs.direct * (1.0 + 1e-9)) out.failures.push_back("operator norm exceeds Hilbert-Schmidt norm");
    }
    return out;
}

DiscretizedOperator discretize(const ExperimentConfig& c, const Potential& V) {
    return c.mode == "box" ? discretize_box(V, c.r_max, c.box_n) : discretize_radial(V, c.ell, c.r_max, c.grid_n);
}

Outcome run_spectrum(const ExperimentConfig& c, const Potential& V, Stages& stage) {
    const auto op = stage("spectral-lab/discretize", [&] { return discretize(c, V); });
    const auto rep = stage("spectral-lab/spectrum", [&] { return spectrum(op, c.outlier_tol); });
    Outcome out;
    std::vector<bool> is_out(rep.eigenvalues.size(), false);
    for (std::size_t i : rep.outliers) is_out[i] = true;
    json eig = json::array();
    out.csv = "re,im,residual,is_outlier\n";
    for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i) {
        const cplx v = rep.eigenvalues[i];
        eig.push_back({{"re", number(v.real())}, {"im", number(v.imag())}, {"residual", number(rep.residuals[i])},
                       {"is_outlier", bool(is_out[i])}});
        out.csv += csv_num(v.real()) + "," + csv_num(v.imag()) + "," + csv_num(rep.residuals[i]) + "," +
                   (is_out[i] ? "true" : "false") + "\n";
        if (rep.residuals[i] > 1e-8 * rep.matrix_norm) out.failures.push_back("eigenpair residual above 1e-8 |op|");
    }
    out.doc = {{"mode", c.mode},
               {"ell", c.ell},
               {"n", op.n},
               {"h", op.h},
               {"domain_radius", op.domain_radius},
               {"continuum_floor", number(rep.continuum_floor)},
               {"outlier_tol", number(rep.outlier_tol)},
               {"matrix_norm", number(rep.matrix_norm)},
               {"outlier_count", rep.outliers.size()},
               {"eigenvalues", eig}};
    return out;
}

Outcome run_pseudospectrum(const ExperimentConfig& c, const Potential& V, Stages& stage) {
    const auto op = stage("spectral-lab/discretize", [&] { return discretize(c, V); });
    const auto& w = *c.z_window;
    const auto ps = stage("spectral-lab/pseudospectrum", [&] {
        return pseudospectrum(op, w.re_min, w.re_max, w.im_min, w.im_max, w.n_re, w.n_im, c.levels);
    });
    Outcome out;
    json field = json::array(), levels = json::array();
    out.csv = "z_re,z_im,sigma_min\n";
    for (const auto& p : ps.field) {
        field.push_back({{"z_re", p.z.real()}, {"z_im", p.z.imag()}, {"sigma_min", number(p.sigma_min)}});
        out.csv += csv_num(p.z.real()) + "," + csv_num(p.z.imag()) + "," + csv_num(p.sigma_min) + "\n";
        if (!(p.sigma_min >= 0.0)) out.failures.push_back("negative or undefined sigma_min");
    }
    for (const auto& [lvl, frac] : ps.level_fractions) levels.push_back({{"level", lvl}, {"fraction", frac}});
    out.doc = {{"field", field}, {"level_fractions", levels}};
    return out;
}

Outcome run_identity_check(const ExperimentConfig& c, const Potential& V, Stages& stage) {
    const int d = c.dimension;
    const cplx lambda = *c.lambda;
    std::vector<TestFunction> probes = {gaussian_bump(d, TestFamily::radial),
                                        gaussian_bump(d, TestFamily::radial, 1.0, 3.0, 0.5),
                                        gaussian_bump(d, TestFamily::ell1_harmonic, 0.5, 2.5, 0.3)};
    std::vector<IdentityCase> cases;
    for (const auto& u : probes)
        for (const auto& G : {multiplier_constant(1.0), multiplier_abs_x(), multiplier_damped_quadratic()})
            cases.push_back({u, lambda, G});
    std::vector<IdentityResult> results = stage("multiplier-lab/identity_sweep", [&] { return identity_sweep(cases); });
    stage("multiplier-lab/canonical_combined_residual", [&] {
        if (lambda.real() >= 0.0)
            for (const auto& u : probes) results.push_back(canonical_combined_residual(u, lambda));
    });

    Outcome out;
    out.csv = kIdentityHeader;
    json ids = json::array();
    for (std::size_t i = 0; i < results.size(); ++i) {
        const std::string id = results[i].id + ":" + std::to_string(i);
        identity_csv_rows(out.csv, id, results[i]);
        json j = identity_json(results[i]);
        j["identity_id"] = id;
        ids.push_back(j);
        if (!(results[i].residual <= 1e-6)) out.failures.push_back(id + " residual above 1e-6");
    }
    out.doc["identities"] = ids;

    // Estimates with f = V u, in whichever half of the proof lambda falls.
    const auto& u = probes[1];
    if (lambda.real() > 0.0 && std::abs(lambda.imag()) <= lambda.real()) {
        const auto r = stage("multiplier-lab/radi_identity_terms", [&] { return radi_identity_terms(u, lambda, V); });
        const std::string id = r.identity.id + ":" + std::to_string(results.size());
        identity_csv_rows(out.csv, id, r.identity);
        json j = identity_json(r.identity);
        j["identity_id"] = id;
        out.doc["potential_terms"] = {{"identity", j}, {"chain", chain_json(r.chain)}, {"verdict", to_string(r.verdict)}};
        if (!(r.identity.residual <= 1e-6)) out.failures.push_back(id + " residual above 1e-6");
    } else if (std::abs(lambda.imag()) > lambda.real()) {
        const auto r = stage("multiplier-lab/case_split_bound", [&] { return case_split_bound(u, lambda, V); });
        json terms = json::array();
        for (const auto& t : r.terms) terms.push_back({{"name", t.name}, {"value", number(t.value.real())}});
        out.doc["case_split"] = {{"verdict", to_string(r.verdict)}, {"vacuous", r.vacuous},
                                 {"Lambda", number(r.Lambda)},        {"coefficient", number(r.coefficient)},
                                 {"terms", terms},                    {"chain", chain_json(r.chain)}};
    }
    return out;
}

Outcome run_singular_sequence(const ExperimentConfig& c, const Potential& V, Stages& stage) {
    const auto a = stage("condition-checkers/subordination_a_pointwise", [&] { return subordination_a_pointwise(V); });
    Outcome out;
    if (a.divergent) {
        out.failures.push_back("subordination constant is infinite");
        out.doc = {{"a", "+inf"}};
        return out;
    }
    std::vector<double> k(c.dimension, 0.0);
    k[0] = std::sqrt(c.lambda->real());
    const auto t = stage("spectral-lab/singular_sequence_decay",
                         [&] { return singular_sequence_decay(bump_profile(), c.dimension, k, c.n_list, a.value); });
    json rows = json::array();
    out.csv = "n,grad_norm,lap_norm,residual,potential_term\n";
    for (const auto& r : t.rows) {
        rows.push_back({{"n", r.n},
                        {"grad_norm", number(r.grad_norm)},
                        {"lap_norm", number(r.lap_norm)},
                        {"residual", number(r.residual)},
                        {"potential_term", number(r.potential_term)}});
        out.csv += std::to_string(r.n) + "," + csv_num(r.grad_norm) + "," + csv_num(r.lap_norm) + "," +
                   csv_num(r.residual) + "," + csv_num(r.potential_term) + "\n";
    }
    out.doc = {{"a", number(a.value)},
               {"k", k},
               {"rows", rows},
               {"residual_slope", number(t.residual_slope)},
               {"potential_slope", number(t.potential_slope)},
               {"expected_residual_slope", number(t.expected_residual_slope)},
               {"normalized", t.normalized}};
    return out;
}

Outcome run_magnetic_smoke(const ExperimentConfig& c, const Potential& V, Stages& stage) {
    const auto A = magnetic_catalog(c.magnetic_name, c.magnetic_params, c.dimension);
    const auto u = gaussian_bump(3, TestFamily::ell1_harmonic, 0.5, 2.5, 0.3);
    const auto m = stage("multiplier-lab/magnetic_identity_smoke",
                         [&] { return magnetic_identity_smoke(u, *c.lambda, V, A); });
    Outcome out;
    json j = identity_json(m.identity);
    j["identity_id"] = m.identity.id + ":0";
    out.doc = {{"magnetic", A.name()},
               {"tangential_max", number(m.tangential_max)},
               {"gauge_max", number(m.gauge_max)},
               {"max_b_tau", number(m.max_b_tau)},
               {"identity", j}};
    out.csv = kIdentityHeader;
    identity_csv_rows(out.csv, m.identity.id + ":0", m.identity);
    if (!(m.identity.residual <= 1e-6)) out.failures.push_back("magnetic identity residual above 1e-6");
    if (!(m.tangential_max <= 1e-10 * (1.0 + m.max_b_tau))) out.failures.push_back("B_tau not tangential");
    if (!(m.gauge_max <= 1e-10 * (1.0 + m.max_b_tau))) out.failures.push_back("gauge check of B_tau . grad_A failed");
    return out;
}

void write_atomic(const fs::path& path, const std::string& bytes) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!f) throw std::runtime_error("write to " + tmp.string() + " failed");
    }
    fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

json config_json(const ExperimentConfig& c) {
    json j;
    j["experiment"] = c.experiment;
    j["potential"] = {{"name", c.potential_name}, {"params", c.potential_params}};
    j["dimension"] = c.dimension;
    j["grid_n"] = c.grid_n;
    j["r_max"] = c.r_max;
    j["ell_max"] = c.ell_max;
    if (c.outlier_tol) j["outlier_tol"] = *c.outlier_tol;
    if (!c.z_list.empty()) {
        j["z_list"] = json::array();
        for (cplx z : c.z_list) j["z_list"].push_back(complex_json(z));
    }
    if (c.z_window) {
        const auto& w = *c.z_window;
        j["z_window"] = {{"re_min", w.re_min}, {"re_max", w.re_max}, {"im_min", w.im_min},
                         {"im_max", w.im_max}, {"n_re", w.n_re},     {"n_im", w.n_im}};
    }
    if (!c.levels.empty()) j["levels"] = c.levels;
    if (c.lambda) j["lambda"] = complex_json(*c.lambda);
    if (!c.n_list.empty()) j["n_list"] = c.n_list;
    j["mode"] = c.mode;
    j["ell"] = c.ell;
    j["box_n"] = c.box_n;
    j["magnetic"] = {{"name", c.magnetic_name}, {"params", c.magnetic_params}};
    j["output"] = {{"path", c.output_path}, {"formats", c.formats}};
    return j;
}

ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [k, v] : j.items())
        if (!contains(kTopLevelKeys, k)) config_error(k, "unknown field");
    ExperimentConfig c;
    if (!j.contains("experiment")) config_error("experiment", "missing");
    c.experiment = get_as<std::string>(j["experiment"], "experiment");
    if (!j.contains("potential")) config_error("potential", "missing");
    const json& p = j["potential"];
    if (!p.is_object() || !p.contains("name")) config_error("potential.name", "missing");
    for (const auto& [k, v] : p.items())
        if (k != "name" && k != "params") config_error("potential." + k, "unknown field");
    c.potential_name = get_as<std::string>(p["name"], "potential.name");
    if (p.contains("params")) c.potential_params = parse_params(p["params"], "potential.params");
    if (j.contains("dimension")) c.dimension = get_as<int>(j["dimension"], "dimension");
    if (j.contains("grid_n")) c.grid_n = get_as<int>(j["grid_n"], "grid_n");
    if (j.contains("r_max")) c.r_max = get_as<double>(j["r_max"], "r_max");
    if (j.contains("ell_max")) c.ell_max = get_as<int>(j["ell_max"], "ell_max");
    if (j.contains("outlier_tol")) c.outlier_tol = get_as<double>(j["outlier_tol"], "outlier_tol");
    if (j.contains("z_list")) {
        if (!j["z_list"].is_array()) config_error("z_list", "expected an array");
        for (const auto& z : j["z_list"]) c.z_list.push_back(parse_complex(z, "z_list"));
    }
    if (j.contains("z_window")) {
        const json& w = j["z_window"];
        if (!w.is_object()) config_error("z_window", "expected an object");
        ZWindow zw;
        auto num = [&](const char* k, double& dst) {
            if (!w.contains(k)) config_error(std::string("z_window.") + k, "missing");
            dst = get_as<double>(w[k], std::string("z_window.") + k);
        };
        num("re_min", zw.re_min);
        num("re_max", zw.re_max);
        num("im_min", zw.im_min);
        num("im_max", zw.im_max);
        if (w.contains("n_re")) zw.n_re = get_as<int>(w["n_re"], "z_window.n_re");
        if (w.contains("n_im")) zw.n_im = get_as<int>(w["n_im"], "z_window.n_im");
        c.z_window = zw;
    }
    if (j.contains("levels")) c.levels = get_as<std::vector<double>>(j["levels"], "levels");
    if (j.contains("lambda")) c.lambda = parse_complex(j["lambda"], "lambda");
    if (j.contains("n_list")) c.n_list = get_as<std::vector<int>>(j["n_list"], "n_list");
    if (j.contains("mode")) c.mode = get_as<std::string>(j["mode"], "mode");
    if (j.contains("ell")) c.ell = get_as<int>(j["ell"], "ell");
    if (j.contains("box_n")) c.box_n = get_as<int>(j["box_n"], "box_n");
    if (j.contains("magnetic")) {
        const json& m = j["magnetic"];
        if (!m.is_object() || !m.contains("name")) config_error("magnetic.name", "missing");
        c.magnetic_name = get_as<std::string>(m["name"], "magnetic.name");
        if (m.contains("params")) c.magnetic_params = parse_params(m["params"], "magnetic.params");
    }
    if (j.contains("output")) {
        const json& o = j["output"];
        if (!o.is_object()) config_error("output", "expected an object");
        if (o.contains("path")) c.output_path = get_as<std::string>(o["path"], "output.path");
        if (o.contains("formats")) c.formats = get_as<std::vector<std::string>>(o["formats"], "output.formats");
    }
    validate(c);
    return c;
}

json parse_document(const std::string& text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw ConfigError("config is not well-formed JSON");
    return doc;
}

}  // namespace

std::vector<std::string> experiment_names() { return kExperiments; }

ExperimentConfig parse_config(const std::string& text) { return config_from_json(parse_document(text)); }

ExperimentConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
    json doc = parse_document(text);
    for (const auto& kv : overrides) apply_override(doc, kv);
    return config_from_json(doc);
}

std::string serialize_config(const ExperimentConfig& config) { return config_json(config).dump(2); }

std::string toolkit_version() { return "0.1.0"; }

std::string fnv1a64_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

RunManifest run(const ExperimentConfig& config) {
    validate(config);
    Stages stage;
    const Potential V = stage("potential-model/catalog",
                              [&] { return catalog(config.potential_name, config.potential_params, config.dimension); });

    using Body = Outcome (*)(const ExperimentConfig&, const Potential&, Stages&);
    const std::vector<std::pair<std::string, Body>> bodies = {
        {"check-conditions", run_check_conditions}, {"bs-norm", run_bs_norm},
        {"hs-identity", run_hs_identity},           {"spectrum", run_spectrum},
        {"pseudospectrum", run_pseudospectrum},     {"identity-check", run_identity_check},
        {"singular-sequence", run_singular_sequence}, {"magnetic-smoke", run_magnetic_smoke}};
    Outcome out;
    for (const auto& [name, body] : bodies)
        if (name == config.experiment) out = body(config, V, stage);

    RunManifest m;
    m.config = serialize_config(config);
    m.version = toolkit_version();
    m.check_failures = out.failures;

    const fs::path dir(config.output_path);
    fs::create_directories(dir);
    auto emit = [&](const std::string& file, const std::string& bytes) {
        const fs::path p = dir / file;
        write_atomic(p, bytes);
        const std::string back = read_file(p);
        const std::string h = fnv1a64_hex(bytes);
        if (fnv1a64_hex(back) != h) throw std::runtime_error("hash mismatch after writing " + p.string());
        m.files.push_back({p.string(), h, bytes.size()});
    };
    stage("cli-runner/write_outputs", [&] {
        for (const auto& f : config.formats) {
            if (f == "json") {
                json doc = {{"experiment", config.experiment},
                            {"potential", {{"name", V.name()}, {"params", V.params()}}},
                            {"dimension", config.dimension},
                            {"result", out.doc},
                            {"check_failures", out.failures}};
                emit(config.experiment + ".json", doc.dump(2) + "\n");
            } else if (f == "csv") {
                emit(config.experiment + ".csv", out.csv);
            }
        }
    });
    m.timings = stage.timings;

    json mj;
    mj["config"] = config_json(config);
    mj["version"] = m.version;
    json timings = json::array(), files = json::array();
    for (const auto& t : m.timings) timings.push_back({{"stage", t.stage}, {"seconds", t.seconds}});
    for (const auto& f : m.files) files.push_back({{"path", f.path}, {"fnv1a64", f.fnv1a64}, {"bytes", f.bytes}});
    mj["timings"] = timings;
    mj["files"] = files;
    mj["check_failures"] = m.check_failures;
    write_atomic(dir / "manifest.json", mj.dump(2) + "\n");
    return m;
}

std::string catalog_listing(int d) {
    if (d < 3) throw ConfigError("--dim must be >= 3");
    json j;
    j["dimension"] = d;
    json pots = json::array();
    for (const auto& n : catalog_names()) pots.push_back({{"name", n}, {"params", catalog_param_keys(n)}});
    j["potentials"] = pots;
    j["magnetic"] = {"zero", "azimuthal_inverse_square", "uniform"};
    const auto t = thresholds(d);
    j["thresholds"] = {{"hardy_constant", hardy_constant(d)},
                       {"thm12_b_max", t.thm12_b_max},
                       {"lambda_star", t.lambda_star},
                       {"sqrt_b3_max", t.sqrt_b3_max},
                       {"weighted_hardy_constant", 4.0 / ((d - 1.0) * (d - 1.0))},
                       {"lambda_case_split_max", (d - 2.0) / 4.0}};
    j["experiments"] = kExperiments;
    return j.dump(2);
}

}  // namespace spectra_cert
