#pragma once

// Zero-failure sampling statistics, the compound Poisson accident model,
// and MIL-STD-882E categorization.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace safedemo {

// K_{N,0}(ρ) = 1 - (1-ρ)^N: probability that a zero-failure plan of size N
// rejects a population with failure proportion ρ.
double power_function(std::uint64_t n, double rho);

// β = (1-ρ)^N. The plan's α is identically 0.
double acceptance_probability(double rho, std::uint64_t n);

inline constexpr double false_rejection_probability = 0.0;

// ρ̂_I = 1 - (1/2)^{1/N}
double indifference_proportion(std::uint64_t n);

// 1 - (1-confidence)^{1/N}
double upper_bound(std::uint64_t n, double confidence = 0.5);

struct sampling_plan
{
    std::uint64_t n = 1;
    double confidence = 0.5;

    void validate() const;
    [[nodiscard]] double bound() const { return upper_bound(n, confidence); }
};

struct intensity
{
    double per_second = 0.0;

    [[nodiscard]] double per_hour() const { return per_second * 3600.0; }
    [[nodiscard]] double per_year() const { return per_second * 3600.0 * 24.0 * 365.25; }
};

// λ̂_I = ρ̂_I(N) · ‖edge‖, with the edge norm in events per second.
intensity indemnify(std::uint64_t n, double edge_norm_per_second);

// e^{-λt} (λt)^k / k!
double poisson_pmf(double lambda, double t, std::uint64_t k);

// Intermittent compound Poisson process; idle_ratio 0 is the plain process.
class compound_poisson_model
{
public:
    // Rates per hour, loss in loss units per arrival.
    compound_poisson_model(double lambda_per_hour, double loss_mean, double idle_ratio = 0.0);

    // Idle ratio derived from mean on/off durations (hours).
    static compound_poisson_model from_durations(double lambda_per_hour, double loss_mean, double mean_on,
                                                 double mean_off);

    // Throws domain_error when the given durations disagree with idle_ratio.
    compound_poisson_model& with_durations(double mean_on, double mean_off);

    [[nodiscard]] double lambda() const { return _lambda; }
    [[nodiscard]] double loss_mean() const { return _loss_mean; }
    [[nodiscard]] double idle_ratio() const { return _idle; }
    [[nodiscard]] std::optional<double> mean_on() const { return _mean_on; }
    [[nodiscard]] std::optional<double> mean_off() const { return _mean_off; }

private:
    double _lambda;
    double _loss_mean;
    double _idle;
    std::optional<double> _mean_on;
    std::optional<double> _mean_off;
};

// (1-ι)·λ·t·μ_L, t in hours.
double cpp_expectation(const compound_poisson_model& m, double t_hours);

// h = (1-ι)·λ·μ_L, loss units per hour.
double statistical_risk(const compound_poisson_model& m);

// Σ h_i over independent hazards.
double combined_risk(const std::vector<compound_poisson_model>& models);

enum class probability_level
{
    A,
    B,
    C,
    D,
    E,
    F,
};

enum class risk_value
{
    high,
    serious,
    medium,
    low,
    eliminated,
};

char to_char(probability_level level);
std::string to_string(probability_level level);
std::string level_description(probability_level level);
std::string to_string(risk_value v);
probability_level parse_level(const std::string& text);

// Lower thresholds of levels A..D; E covers the rest.
inline constexpr std::array<double, 4> level_thresholds{1e-1, 1e-2, 1e-3, 1e-6};

probability_level classify_level(double annual_probability, bool eliminated = false);

// Severity category 1..4 from monetary loss in dollars.
int severity_category(double monetary_loss);
std::string category_description(int category);

risk_value risk_matrix(probability_level level, int category);

struct mil_std_assessment
{
    int severity_category = 4;
    probability_level level = probability_level::E;
    risk_value risk = risk_value::low;
};

mil_std_assessment assess(double annual_probability, double monetary_loss, bool eliminated = false);

// U = κ(1-ι)N/p
double standardize_exposure(double natural_units, double kappa, double iota, double years_per_life);

// Probability of at least one arrival of rate λ (per hour) within t hours.
double probability_of_occurrence(double lambda_per_hour, double t_hours);

// Row/column layout of the published tables.
inline constexpr std::array<std::uint64_t, 14> table_sample_sizes{1, 5, 10, 15, 20, 30, 50,
                                                                  100, 200, 500, 1000, 2000, 5000, 10000};
inline constexpr std::array<double, 6> table_proportions{.001, .01, .05, .10, .50, .90};

enum class table_format
{
    text,
    csv,
};

std::string power_table(table_format format);
std::string indifference_table(table_format format);
std::string risk_matrix_table(table_format format);

// "0.1234" printed as ".1234"; values of 1 keep their leading digit.
std::string format_fraction(double x, int decimals);

} // namespace safedemo
