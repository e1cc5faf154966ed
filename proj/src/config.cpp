#include "ptdiff/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ptdiff {

using nlohmann::json;

namespace {

void require_keys(const json& j, const std::string& where, std::set<std::string> allowed) {
    if (!j.is_object()) throw std::invalid_argument("config: '" + where + "' must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw std::invalid_argument("config: unknown key '" + it.key() + "' in " + where);
}

SignalTerm::Kind term_kind(const std::string& s) {
    if (s == "cosine") return SignalTerm::Kind::Cosine;
    if (s == "sine") return SignalTerm::Kind::Sine;
    if (s == "linear") return SignalTerm::Kind::Linear;
    if (s == "polynomial") return SignalTerm::Kind::Polynomial;
    throw std::invalid_argument("config: unknown signal term kind '" + s + "'");
}

std::string term_kind_name(SignalTerm::Kind k) {
    switch (k) {
        case SignalTerm::Kind::Cosine: return "cosine";
        case SignalTerm::Kind::Sine: return "sine";
        case SignalTerm::Kind::Linear: return "linear";
        case SignalTerm::Kind::Polynomial: return "polynomial";
    }
    return "?";
}

FamilyConfig parse_family(const json& j) {
    require_keys(j, "differentiator.family",
                 {"kind", "r", "roots", "gains", "t_star", "theta", "c", "b"});
    FamilyConfig f;
    f.kind = j.at("kind").get<std::string>();
    if (j.contains("r")) f.r = j["r"].get<double>();
    if (j.contains("roots"))
        for (const auto& r : j["roots"])
            f.roots.push_back({r.at(0).get<double>(), r.at(1).get<double>()});
    if (j.contains("gains")) f.gains = j["gains"].get<std::vector<double>>();
    if (j.contains("t_star")) f.t_star = j["t_star"].get<double>();
    if (j.contains("theta")) f.theta = j["theta"].get<double>();
    if (j.contains("c")) f.c = j["c"].get<double>();
    if (j.contains("b")) f.b = j["b"].get<double>();
    return f;
}

json family_json(const FamilyConfig& f) {
    json j{{"kind", f.kind}};
    if (f.kind == "linear") {
        j["r"] = f.r;
        if (!f.roots.empty()) {
            json roots = json::array();
            for (const auto& r : f.roots) roots.push_back({r[0], r[1]});
            j["roots"] = roots;
        }
    }
    if (!f.gains.empty()) j["gains"] = f.gains;
    if (f.kind == "seeber") j["t_star"] = f.t_star;
    if (f.kind == "menard") {
        j["theta"] = f.theta;
        j["c"] = f.c;
        j["b"] = f.b;
    }
    return j;
}

}  // namespace

bool SignalConfig::operator==(const SignalConfig& o) const {
    if (preset != o.preset || terms.size() != o.terms.size()) return false;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const auto &a = terms[i], &b = o.terms[i];
        if (a.kind != b.kind || a.amplitude != b.amplitude || a.frequency != b.frequency ||
            a.degree != b.degree)
            return false;
    }
    return true;
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j = json::parse(text);
    require_keys(j, "(root)",
                 {"differentiator", "signal", "noise", "integration", "initial_state", "settling",
                  "output"});
    ExperimentConfig cfg;

    const json& d = j.at("differentiator");
    require_keys(d, "differentiator",
                 {"order", "alpha", "t_c", "beta", "beta_factor", "rho", "mu", "L",
                  "terminal_gains", "family", "filtering", "monitor"});
    auto& dc = cfg.differentiator;
    dc.order = d.at("order").get<int>();
    dc.alpha = d.at("alpha").get<double>();
    dc.t_c = d.at("t_c").get<double>();
    if (d.contains("beta")) dc.beta = d["beta"].get<double>();
    if (d.contains("beta_factor")) dc.beta_factor = d["beta_factor"].get<double>();
    if (d.contains("rho")) dc.rho = d["rho"].get<double>();
    if (d.contains("mu")) dc.mu = d["mu"].get<double>();
    dc.L = d.at("L").get<double>();
    if (d.contains("terminal_gains")) dc.terminal_gains = d["terminal_gains"].get<std::vector<double>>();
    dc.family = parse_family(d.at("family"));
    if (d.contains("filtering")) {
        require_keys(d["filtering"], "differentiator.filtering", {"n_f", "n_d"});
        dc.filtering = FilteringConfig{d["filtering"].at("n_f").get<int>(),
                                       d["filtering"].at("n_d").get<int>()};
    }
    if (d.contains("monitor")) {
        require_keys(d["monitor"], "differentiator.monitor", {"enabled", "tol", "dwell_samples"});
        dc.monitor.enabled = d["monitor"].value("enabled", false);
        dc.monitor.tol = d["monitor"].value("tol", 1e-6);
        dc.monitor.dwell_samples = d["monitor"].value("dwell_samples", 100);
    }

    const json& s = j.at("signal");
    require_keys(s, "signal", {"preset", "terms"});
    if (s.contains("preset")) cfg.signal.preset = s["preset"].get<std::string>();
    if (s.contains("terms")) {
        for (const auto& t : s["terms"]) {
            require_keys(t, "signal.terms[]", {"kind", "amplitude", "frequency", "degree"});
            SignalTerm term;
            term.kind = term_kind(t.at("kind").get<std::string>());
            term.amplitude = t.at("amplitude").get<double>();
            if (t.contains("frequency")) term.frequency = t["frequency"].get<double>();
            if (t.contains("degree")) term.degree = t["degree"].get<int>();
            cfg.signal.terms.push_back(term);
        }
    }
    if (cfg.signal.preset.empty() == cfg.signal.terms.empty())
        throw std::invalid_argument("config: signal needs exactly one of 'preset' or 'terms'");

    if (j.contains("noise")) {
        require_keys(j["noise"], "noise", {"std_dev", "seed"});
        NoiseConfig nc;
        nc.std_dev = j["noise"].at("std_dev").get<double>();
        nc.seed = j["noise"].value("seed", std::uint64_t{0});
        cfg.noise = nc;
    }

    const json& it = j.at("integration");
    require_keys(it, "integration", {"step", "horizon", "stride"});
    cfg.integration.step = it.at("step").get<double>();
    cfg.integration.horizon = it.at("horizon").get<double>();
    if (it.contains("stride")) cfg.integration.stride = it["stride"].get<int>();

    if (j.contains("initial_state"))
        cfg.initial_state = j["initial_state"].get<std::vector<double>>();

    if (j.contains("settling")) {
        require_keys(j["settling"], "settling", {"tol", "dwell"});
        cfg.settling.tol = j["settling"].value("tol", 1e-3);
        cfg.settling.dwell = j["settling"].value("dwell", 0.1);
    }

    if (j.contains("output")) {
        require_keys(j["output"], "output", {"dir", "stem"});
        cfg.output.dir = j["output"].value("dir", "out");
        cfg.output.stem = j["output"].value("stem", "run");
    }
    return cfg;
}

std::string ExperimentConfig::to_json_text() const {
    json d{{"order", differentiator.order},
           {"alpha", differentiator.alpha},
           {"t_c", differentiator.t_c},
           {"beta_factor", differentiator.beta_factor},
           {"rho", differentiator.rho},
           {"L", differentiator.L},
           {"family", family_json(differentiator.family)}};
    if (differentiator.beta) d["beta"] = *differentiator.beta;
    if (differentiator.mu) d["mu"] = *differentiator.mu;
    if (!differentiator.terminal_gains.empty()) d["terminal_gains"] = differentiator.terminal_gains;
    if (differentiator.filtering)
        d["filtering"] = {{"n_f", differentiator.filtering->n_f},
                          {"n_d", differentiator.filtering->n_d}};
    if (differentiator.monitor.enabled || differentiator.monitor.tol != 1e-6 ||
        differentiator.monitor.dwell_samples != 100)
        d["monitor"] = {{"enabled", differentiator.monitor.enabled},
                        {"tol", differentiator.monitor.tol},
                        {"dwell_samples", differentiator.monitor.dwell_samples}};

    json sig;
    if (!signal.preset.empty()) {
        sig["preset"] = signal.preset;
    } else {
        json terms = json::array();
        for (const auto& t : signal.terms) {
            json jt{{"kind", term_kind_name(t.kind)}, {"amplitude", t.amplitude}};
            if (t.kind == SignalTerm::Kind::Cosine || t.kind == SignalTerm::Kind::Sine)
                jt["frequency"] = t.frequency;
            if (t.kind == SignalTerm::Kind::Polynomial) jt["degree"] = t.degree;
            terms.push_back(jt);
        }
        sig["terms"] = terms;
    }

    json root{{"differentiator", d},
              {"signal", sig},
              {"integration",
               {{"step", integration.step},
                {"horizon", integration.horizon},
                {"stride", integration.stride}}},
              {"settling", {{"tol", settling.tol}, {"dwell", settling.dwell}}},
              {"output", {{"dir", output.dir}, {"stem", output.stem}}}};
    if (noise) root["noise"] = {{"std_dev", noise->std_dev}, {"seed", noise->seed}};
    if (!initial_state.empty()) root["initial_state"] = initial_state;
    return root.dump(2);
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

void ExperimentConfig::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("config: cannot open '" + path + "' for writing");
    out << to_json_text() << "\n";
}

ResolvedExperiment resolve(const ExperimentConfig& cfg) {
    const auto& dc = cfg.differentiator;

    CorrectionFamily family = [&] {
        const auto& f = dc.family;
        if (f.kind == "linear") {
            if (!f.roots.empty()) {
                std::vector<std::complex<double>> roots;
                for (const auto& r : f.roots) roots.emplace_back(r[0], r[1]);
                return CorrectionFamily::linear_from_roots(roots, f.r);
            }
            return CorrectionFamily::linear(dc.order, f.gains, f.r);
        }
        if (f.kind == "levant") return CorrectionFamily::levant(dc.order, dc.L, f.gains);
        if (f.kind == "seeber") return CorrectionFamily::seeber(dc.L, f.t_star);
        if (f.kind == "menard")
            return CorrectionFamily::menard(dc.order, f.theta, f.c, f.b, f.gains);
        throw std::invalid_argument("config: unknown family kind '" + f.kind + "'");
    }();

    RedesignParams p;
    p.n = dc.order;
    p.alpha = dc.alpha;
    p.t_c = dc.t_c;
    p.rho = dc.rho;
    p.L = dc.L;
    p.terminal_gains = dc.terminal_gains;
    if (dc.mu) p.mu = *dc.mu;
    else p.mu = 0.0;  // let the context fill the default
    if (dc.beta) {
        p.beta = *dc.beta;
    } else {
        if (!(dc.beta_factor >= 1.0))
            throw std::invalid_argument("config: beta_factor must be >= 1");
        p.t_f = family.settling_bound();
        p.eta = compute_eta(dc.alpha, p.t_f);
        p.beta = dc.beta_factor * p.beta_min();
    }

    ResolvedExperiment r{RedesignContext::make(p, family),
                         {},
                         {},
                         dc.filtering,
                         MonitorSpec{dc.monitor.enabled, dc.monitor.tol, dc.monitor.dwell_samples},
                         SimOptions{cfg.integration.step, cfg.integration.stride},
                         cfg.integration.horizon,
                         {},
                         cfg.settling,
                         {}};

    if (!(cfg.integration.horizon > 0.0))
        throw std::invalid_argument("config: integration horizon must be > 0");
    if (!(cfg.integration.step > 0.0))
        throw std::invalid_argument("config: integration step must be > 0");
    if (cfg.integration.stride < 1)
        throw std::invalid_argument("config: record stride must be >= 1");

    if (dc.filtering) {
        if (dc.filtering->n_f < 1)
            throw std::invalid_argument("config: filtering needs n_f >= 1");
        if (dc.filtering->n_f + dc.filtering->n_d != dc.order)
            throw std::invalid_argument("config: filtering needs n_f + n_d = order");
    }

    r.signal = cfg.signal.preset.empty() ? TestSignal(cfg.signal.terms)
                                         : make_preset(cfg.signal.preset);
    if (cfg.noise) r.noise = NoiseSpec{cfg.noise->std_dev, cfg.noise->seed};

    const int dim = dc.order + 1;
    if (cfg.initial_state.empty()) {
        r.initial_state = Eigen::VectorXd::Zero(dim);
    } else {
        if (static_cast<int>(cfg.initial_state.size()) != dim)
            throw std::invalid_argument("config: initial_state must have order+1 entries");
        r.initial_state =
            Eigen::Map<const Eigen::VectorXd>(cfg.initial_state.data(), dim);
    }

    // Class-membership check: the signal's actual derivative bound versus the
    // configured L. Violations are logged, not fatal.
    const int bound_order = dc.filtering ? dc.filtering->n_d + 1 : dc.order + 1;
    const double actual = r.signal.derivative_bound(bound_order);
    if (actual > dc.L * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "signal class violation: sup|y^(" << bound_order << ")| = " << actual
           << " exceeds configured L = " << dc.L << "; proceeding anyway";
        r.warnings.push_back(os.str());
    }
    for (const auto& w : family.warnings()) r.warnings.push_back(w);
    return r;
}

}  // namespace ptdiff
