#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "diamondrec/conic.hpp"
#include "diamondrec/measure.hpp"
#include "diamondrec/programs.hpp"

namespace diamondrec {

enum class ExperimentKind { UvRetrieval, ProcessTomo, Deconv, LowrankGaussian };

std::string to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& s);

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::UvRetrieval;
    Index n = 2;                  // uv_retrieval, process_tomo: dimV = dimW = n; deconv: N
    Index deconv_length = 0;      // deconv L; 0 selects n^2
    Index kraus_rank = 2;         // process_tomo
    Index dimW = 2;               // lowrank_gaussian
    Index dimV = 2;               // lowrank_gaussian
    Index rank = 1;               // lowrank_gaussian
    EnsembleKind lowrank_ensemble = EnsembleKind::GaussianReal;
    UnitaryGroup group = UnitaryGroup::Orthogonal;  // uv_retrieval, deconv
    std::vector<Index> m_values;
    int trials = 20;
    double threshold = 1e-5;
    std::optional<double> eta;    // empty: machine-precision policy
    std::vector<Regularizer> regularizers{Regularizer::Nuclear, Regularizer::Square};
    bool cpt = false;
    std::uint64_t seed = 0;
    int threads = 1;
    bool record_timing = true;    // false writes 0 for median_solve_ms
    conic::SolverOptions solver;

    /// Throws PreconditionError on an invalid sweep or trial count.
    void validate() const;
};

struct ResultRow {
    std::string experiment;
    std::string regularizer;
    Index m = 0;
    int trials = 0;
    int successes = 0;
    double mean_frob_error = 0.0;
    double median_solve_ms = 0.0;
    std::uint64_t seed = 0;

    bool operator==(const ResultRow&) const = default;
};

struct TrialFailure {
    std::string regularizer;
    Index m = 0;
    int trial = 0;
    std::string message;
};

struct ExperimentOutcome {
    std::vector<ResultRow> rows;
    std::vector<TrialFailure> failures;
};

/// Machine-precision noise bound used when the config leaves eta empty.
double eps_policy_eta(const ComplexVector& y);

/// Seed of one trial. `regularizer` empty denotes the instance stream
/// (truth, ensemble, noise) shared by all regularizers.
/// seed = mix64(mix64(master) ^ (tag << 56 | m << 28 | trial)) with tag 0
/// for the instance stream, 1 nuclear, 2 square; injective for m, trial < 2^28.
std::uint64_t derive_trial_seed(std::uint64_t master, std::optional<Regularizer> regularizer, Index m, int trial);

/// Runs every (regularizer, m, trial); rows are ordered by regularizer (in
/// config order) then m. Failed trials count as non-successes.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg);

inline constexpr const char* kCsvHeader =
    "experiment,regularizer,m,trials,successes,mean_frob_error,median_solve_ms,seed";

void write_csv(const std::vector<ResultRow>& rows, std::ostream& os);
/// Throws IoError when the file cannot be written.
void write_csv(const std::vector<ResultRow>& rows, const std::string& path);
/// Throws PreconditionError on a malformed header or row.
std::vector<ResultRow> read_csv(std::istream& is);

}  // namespace diamondrec
