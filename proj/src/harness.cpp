#include "diamondrec/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "diamondrec/errors.hpp"
#include "diamondrec/recovery.hpp"

namespace diamondrec {

namespace {

struct TrialRecord {
    bool ok = false;
    double error = 0.0;
    double ms = 0.0;
};

Field unknown_field(const ExperimentConfig& cfg) {
    switch (cfg.kind) {
        case ExperimentKind::UvRetrieval:
        case ExperimentKind::Deconv:
            return cfg.group == UnitaryGroup::Orthogonal ? Field::Real : Field::Complex;
        case ExperimentKind::ProcessTomo: return Field::Complex;
        case ExperimentKind::LowrankGaussian:
            return cfg.lowrank_ensemble == EnsembleKind::GaussianReal ? Field::Real : Field::Complex;
    }
    return Field::Complex;
}

RecoveryProblem make_instance(const ExperimentConfig& cfg, Index m, int trial) {
    Rng rng(derive_trial_seed(cfg.seed, std::nullopt, m, trial));
    const Field field = unknown_field(cfg);
    EnsembleSpec spec;
    spec.m = m;
    spec.group = cfg.group;
    ComplexMatrix truth;
    switch (cfg.kind) {
        case ExperimentKind::UvRetrieval: {
            const ComplexMatrix U = random_unitary(cfg.n, rng, cfg.group);
            const ComplexMatrix V = random_unitary(cfg.n, rng, cfg.group);
            truth = sandwich_map(U, V).choi().mat();
            spec.kind = EnsembleKind::StructuredUdv;
            spec.dimW = spec.dimV = cfg.n;
            break;
        }
        case ExperimentKind::ProcessTomo:
            truth = random_channel(cfg.n, cfg.n, cfg.kraus_rank, rng).choi().mat();
            spec.kind = EnsembleKind::ProcessTomo;
            spec.dimW = spec.dimV = cfg.n;
            break;
        case ExperimentKind::Deconv: {
            const ComplexMatrix U = random_unitary(cfg.n, rng, cfg.group);
            const ComplexMatrix V = random_unitary(cfg.n, rng, cfg.group);
            truth = sandwich_map(U, V.transpose()).choi().mat();
            spec.kind = EnsembleKind::Deconv;
            spec.dimW = spec.dimV = cfg.n;
            spec.deconv_length = cfg.deconv_length;
            break;
        }
        case ExperimentKind::LowrankGaussian: {
            const Index d = cfg.dimW * cfg.dimV;
            const ComplexMatrix G1 = gaussian_matrix(d, cfg.rank, field, rng);
            const ComplexMatrix G2 = gaussian_matrix(d, cfg.rank, field, rng);
            truth = G1 * G2.adjoint();
            truth /= truth.norm();
            spec.kind = cfg.lowrank_ensemble;
            spec.dimW = cfg.dimW;
            spec.dimV = cfg.dimV;
            break;
        }
    }
    spec.seed = rng();
    RecoveryProblem p;
    p.ensemble = materialize(spec);
    p.y = apply_measurement(p.ensemble, BipartiteOperator(truth, spec.dimW, spec.dimV));
    if (cfg.eta && *cfg.eta > 0.0) {
        p.y = add_noise(p.y, *cfg.eta, rng, p.ensemble.is_real() ? Field::Real : Field::Complex).y;
        p.eta = *cfg.eta;
    } else {
        p.eta = cfg.eta ? 0.0 : eps_policy_eta(p.y);
    }
    p.cpt = cfg.cpt;
    p.field = field;
    p.truth = std::move(truth);
    p.solver = cfg.solver;
    return p;
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t k = v.size() / 2;
    return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

std::string format_row(const ResultRow& r) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%s,%s,%lld,%d,%d,%.12e,%.3f,%llu", r.experiment.c_str(), r.regularizer.c_str(),
                  static_cast<long long>(r.m), r.trials, r.successes, r.mean_frob_error, r.median_solve_ms,
                  static_cast<unsigned long long>(r.seed));
    return buf;
}

}  // namespace

std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::UvRetrieval: return "uv_retrieval";
        case ExperimentKind::ProcessTomo: return "process_tomo";
        case ExperimentKind::Deconv: return "deconv";
        case ExperimentKind::LowrankGaussian: return "lowrank_gaussian";
    }
    return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
    for (ExperimentKind k : {ExperimentKind::UvRetrieval, ExperimentKind::ProcessTomo, ExperimentKind::Deconv,
                             ExperimentKind::LowrankGaussian})
        if (to_string(k) == s) return k;
    throw PreconditionError("unknown experiment '" + s + "'");
}

void ExperimentConfig::validate() const {
    if (trials < 1) throw PreconditionError("experiment: trials must be >= 1");
    if (m_values.empty()) throw PreconditionError("experiment: the m sweep is empty");
    for (std::size_t k = 0; k < m_values.size(); ++k) {
        if (m_values[k] < 1) throw PreconditionError("experiment: m values must be >= 1");
        if (k > 0 && m_values[k] <= m_values[k - 1])
            throw PreconditionError("experiment: the m sweep must be strictly increasing");
    }
    if (m_values.back() >= (Index{1} << 28) || trials >= (1 << 28))
        throw PreconditionError("experiment: m and trials must be below 2^28");
    if (regularizers.empty()) throw PreconditionError("experiment: no regularizer selected");
    if (threads < 1) throw PreconditionError("experiment: threads must be >= 1");
    if (!(threshold > 0.0)) throw PreconditionError("experiment: threshold must be positive");
    if (eta && !(*eta >= 0.0)) throw PreconditionError("experiment: eta must be >= 0");
    if (n < 1 || dimW < 1 || dimV < 1 || rank < 1 || kraus_rank < 1)
        throw PreconditionError("experiment: dimensions and ranks must be >= 1");
}

double eps_policy_eta(const ComplexVector& y) {
    return std::numeric_limits<double>::epsilon() * y.norm();
}

std::uint64_t derive_trial_seed(std::uint64_t master, std::optional<Regularizer> regularizer, Index m, int trial) {
    const std::uint64_t tag = !regularizer ? 0 : (*regularizer == Regularizer::Nuclear ? 1 : 2);
    const std::uint64_t packed = (tag << 56) | (static_cast<std::uint64_t>(m) << 28) | static_cast<std::uint64_t>(trial);
    return mix64(mix64(master) ^ packed);
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::size_t nm = cfg.m_values.size();
    const std::size_t nr = cfg.regularizers.size();
    const std::size_t nt = static_cast<std::size_t>(cfg.trials);
    // records[(r * nm + k) * nt + t]
    std::vector<TrialRecord> records(nr * nm * nt);
    std::vector<TrialFailure> failures;
    std::mutex failure_mutex;

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t task = next.fetch_add(1);
            if (task >= nm * nt) return;
            const std::size_t k = task / nt, t = task % nt;
            const Index m = cfg.m_values[k];
            std::optional<RecoveryProblem> problem;
            std::string instance_error;
            try {
                problem = make_instance(cfg, m, static_cast<int>(t));
            } catch (const std::exception& ex) {
                instance_error = ex.what();
            }
            for (std::size_t r = 0; r < nr; ++r) {
                TrialRecord& rec = records[(r * nm + k) * nt + t];
                std::string message = instance_error;
                if (problem) {
                    try {
                        problem->regularizer = cfg.regularizers[r];
                        const RecoveryResult res = recover(*problem);
                        rec.ok = true;
                        rec.error = *res.frobenius_error;
                        rec.ms = res.solve_ms;
                    } catch (const std::exception& ex) {
                        message = ex.what();
                    }
                }
                if (!rec.ok) {
                    const std::lock_guard<std::mutex> lock(failure_mutex);
                    failures.push_back({to_string(cfg.regularizers[r]), m, static_cast<int>(t), message});
                }
            }
        }
    };
    if (cfg.threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < cfg.threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    ExperimentOutcome out;
    for (std::size_t r = 0; r < nr; ++r)
        for (std::size_t k = 0; k < nm; ++k) {
            ResultRow row;
            row.experiment = to_string(cfg.kind);
            row.regularizer = to_string(cfg.regularizers[r]);
            row.m = cfg.m_values[k];
            row.trials = cfg.trials;
            row.seed = cfg.seed;
            double sum = 0.0;
            int solved = 0;
            std::vector<double> times;
            for (std::size_t t = 0; t < nt; ++t) {
                const TrialRecord& rec = records[(r * nm + k) * nt + t];
                if (!rec.ok) continue;
                ++solved;
                sum += rec.error;
                times.push_back(rec.ms);
                if (rec.error <= cfg.threshold) ++row.successes;
            }
            row.mean_frob_error = solved ? sum / solved : std::numeric_limits<double>::quiet_NaN();
            row.median_solve_ms = cfg.record_timing ? median(times) : 0.0;
            out.rows.push_back(std::move(row));
        }
    std::sort(failures.begin(), failures.end(), [](const TrialFailure& a, const TrialFailure& b) {
        return std::tie(a.regularizer, a.m, a.trial) < std::tie(b.regularizer, b.m, b.trial);
    });
    for (const auto& f : failures)
        std::cerr << "trial failed: regularizer=" << f.regularizer << " m=" << f.m << " trial=" << f.trial << ": "
                  << f.message << '\n';
    out.failures = std::move(failures);
    return out;
}

void write_csv(const std::vector<ResultRow>& rows, std::ostream& os) {
    os << kCsvHeader << '\n';
    for (const auto& r : rows) os << format_row(r) << '\n';
}

void write_csv(const std::vector<ResultRow>& rows, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("write_csv: cannot open '" + path + "' for writing");
    write_csv(rows, f);
    f.flush();
    if (!f) throw IoError("write_csv: write to '" + path + "' failed");
}

std::vector<ResultRow> read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != kCsvHeader) throw PreconditionError("read_csv: missing or unexpected header");
    std::vector<ResultRow> rows;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() != 8) throw PreconditionError("read_csv: line " + std::to_string(lineno) + " has wrong field count");
        try {
            ResultRow r;
            r.experiment = f[0];
            r.regularizer = f[1];
            r.m = std::stoll(f[2]);
            r.trials = std::stoi(f[3]);
            r.successes = std::stoi(f[4]);
            r.mean_frob_error = std::stod(f[5]);
            r.median_solve_ms = std::stod(f[6]);
            r.seed = std::stoull(f[7]);
            rows.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw PreconditionError("read_csv: line " + std::to_string(lineno) + " is malformed");
        }
    }
    return rows;
}

}  // namespace diamondrec
