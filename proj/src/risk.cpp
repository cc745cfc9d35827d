#include "safedemo/risk.hpp"

#include "safedemo/error.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace safedemo {

namespace {

void require_sample_size(std::uint64_t n)
{
    if (n < 1)
        throw domain_error("sample size must be at least 1");
}

void require_proportion(double rho, const char* what)
{
    if (!(rho >= 0.0 && rho <= 1.0))
        throw domain_error(std::string(what) + " must lie in [0, 1], got " + std::to_string(rho));
}

} // namespace

double power_function(std::uint64_t n, double rho)
{
    require_sample_size(n);
    require_proportion(rho, "failure proportion");
    if (rho == 1.0)
        return 1.0;
    return -std::expm1(static_cast<double>(n) * std::log1p(-rho));
}

double acceptance_probability(double rho, std::uint64_t n)
{
    require_sample_size(n);
    require_proportion(rho, "failure proportion");
    if (rho == 1.0)
        return 0.0;
    return 1.0 - power_function(n, rho);
}

double indifference_proportion(std::uint64_t n)
{
    return upper_bound(n, 0.5);
}

double upper_bound(std::uint64_t n, double confidence)
{
    require_sample_size(n);
    if (!(confidence > 0.0 && confidence < 1.0))
        throw domain_error("confidence must lie in (0, 1), got " + std::to_string(confidence));
    // 1 - (1-c)^{1/N} = -expm1(log1p(-c) / N)
    return -std::expm1(std::log1p(-confidence) / static_cast<double>(n));
}

void sampling_plan::validate() const
{
    require_sample_size(n);
    if (!(confidence > 0.0 && confidence < 1.0))
        throw domain_error("confidence must lie in (0, 1)");
}

intensity indemnify(std::uint64_t n, double edge_norm_per_second)
{
    if (!(edge_norm_per_second >= 0.0))
        throw domain_error("counting norm must be non-negative");
    return intensity{indifference_proportion(n) * edge_norm_per_second};
}

double poisson_pmf(double lambda, double t, std::uint64_t k)
{
    if (!(lambda >= 0.0) || !(t >= 0.0))
        throw domain_error("Poisson rate and duration must be non-negative");
    const double mean = lambda * t;
    if (mean == 0.0)
        return k == 0 ? 1.0 : 0.0;
    const double kd = static_cast<double>(k);
    return std::exp(kd * std::log(mean) - mean - std::lgamma(kd + 1.0));
}

compound_poisson_model::compound_poisson_model(double lambda_per_hour, double loss_mean, double idle_ratio)
    : _lambda{lambda_per_hour}
    , _loss_mean{loss_mean}
    , _idle{idle_ratio}
{
    if (!(_lambda >= 0.0))
        throw domain_error("arrival rate must be non-negative");
    if (!(_loss_mean >= 0.0))
        throw domain_error("mean loss must be non-negative");
    require_proportion(_idle, "idle ratio");
}

compound_poisson_model compound_poisson_model::from_durations(double lambda_per_hour, double loss_mean,
                                                              double mean_on, double mean_off)
{
    if (!(mean_on >= 0.0) || !(mean_off >= 0.0) || !(mean_on + mean_off > 0.0))
        throw domain_error("on/off durations must be non-negative and not both zero");
    compound_poisson_model m{lambda_per_hour, loss_mean, mean_off / (mean_on + mean_off)};
    m._mean_on = mean_on;
    m._mean_off = mean_off;
    return m;
}

compound_poisson_model& compound_poisson_model::with_durations(double mean_on, double mean_off)
{
    const auto derived = from_durations(_lambda, _loss_mean, mean_on, mean_off);
    if (std::abs(derived.idle_ratio() - _idle) > 1e-9)
        throw domain_error("idle ratio " + std::to_string(_idle) + " disagrees with on/off durations (implies "
                           + std::to_string(derived.idle_ratio()) + ")");
    _mean_on = mean_on;
    _mean_off = mean_off;
    return *this;
}

double cpp_expectation(const compound_poisson_model& m, double t_hours)
{
    if (!(t_hours >= 0.0))
        throw domain_error("duration must be non-negative");
    return (1.0 - m.idle_ratio()) * m.lambda() * t_hours * m.loss_mean();
}

double statistical_risk(const compound_poisson_model& m)
{
    return (1.0 - m.idle_ratio()) * m.lambda() * m.loss_mean();
}

double combined_risk(const std::vector<compound_poisson_model>& models)
{
    double sum = 0.0;
    for (const auto& m : models)
        sum += statistical_risk(m);
    return sum;
}

char to_char(probability_level level)
{
    return static_cast<char>('A' + static_cast<int>(level));
}

std::string to_string(probability_level level)
{
    return std::string(1, to_char(level));
}

std::string level_description(probability_level level)
{
    switch (level) {
    case probability_level::A: return "Frequent";
    case probability_level::B: return "Probable";
    case probability_level::C: return "Occasional";
    case probability_level::D: return "Remote";
    case probability_level::E: return "Improbable";
    case probability_level::F: return "Eliminated";
    }
    return "";
}

std::string to_string(risk_value v)
{
    switch (v) {
    case risk_value::high: return "High";
    case risk_value::serious: return "Serious";
    case risk_value::medium: return "Medium";
    case risk_value::low: return "Low";
    case risk_value::eliminated: return "Eliminated";
    }
    return "";
}

probability_level parse_level(const std::string& text)
{
    if (text.size() == 1 && text[0] >= 'A' && text[0] <= 'F')
        return static_cast<probability_level>(text[0] - 'A');
    throw domain_error("probability level must be one of A..F, got '" + text + "'");
}

probability_level classify_level(double p, bool eliminated)
{
    require_proportion(p, "probability of occurrence");
    if (eliminated)
        return probability_level::F;
    for (std::size_t i = 0; i < level_thresholds.size(); ++i)
        if (p >= level_thresholds[i])
            return static_cast<probability_level>(i);
    return probability_level::E;
}

int severity_category(double monetary_loss)
{
    if (!(monetary_loss >= 0.0))
        throw domain_error("monetary loss must be non-negative");
    if (monetary_loss >= 10e6)
        return 1;
    if (monetary_loss >= 1e6)
        return 2;
    if (monetary_loss >= 100e3)
        return 3;
    return 4;
}

std::string category_description(int category)
{
    switch (category) {
    case 1: return "Catastrophic";
    case 2: return "Critical";
    case 3: return "Marginal";
    case 4: return "Negligible";
    default: throw domain_error("severity category must be 1..4");
    }
}

risk_value risk_matrix(probability_level level, int category)
{
    using enum risk_value;
    // Rows A..E, columns categories 1..4.
    static constexpr risk_value cells[5][4] = {
        {high, high, serious, medium},
        {high, high, serious, medium},
        {high, serious, medium, low},
        {serious, medium, medium, low},
        {medium, medium, medium, low},
    };
    if (category < 1 || category > 4)
        throw domain_error("severity category must be 1..4");
    if (level == probability_level::F)
        return eliminated;
    return cells[static_cast<int>(level)][category - 1];
}

mil_std_assessment assess(double annual_probability, double monetary_loss, bool eliminated)
{
    mil_std_assessment out;
    out.severity_category = severity_category(monetary_loss);
    out.level = classify_level(annual_probability, eliminated);
    out.risk = risk_matrix(out.level, out.severity_category);
    return out;
}

double standardize_exposure(double natural_units, double kappa, double iota, double years_per_life)
{
    if (!(years_per_life > 0.0))
        throw domain_error("years per life must be positive");
    require_proportion(iota, "idle ratio");
    return kappa * (1.0 - iota) / years_per_life * natural_units;
}

double probability_of_occurrence(double lambda_per_hour, double t_hours)
{
    if (!(lambda_per_hour >= 0.0) || !(t_hours >= 0.0))
        throw domain_error("rate and duration must be non-negative");
    return -std::expm1(-lambda_per_hour * t_hours);
}

std::string format_fraction(double x, int decimals)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
    std::string s = buf;
    if (s.rfind("0.", 0) == 0)
        s.erase(0, 1);
    return s;
}

namespace {

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

std::string render(const std::vector<std::vector<std::string>>& rows, table_format format)
{
    std::ostringstream out;
    if (format == table_format::csv) {
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i)
                out << (i ? "," : "") << csv_field(row[i]);
            out << "\r\n";
        }
        return out.str();
    }
    std::vector<std::size_t> width;
    for (const auto& row : rows) {
        width.resize(std::max(width.size(), row.size()), 0);
        for (std::size_t i = 0; i < row.size(); ++i)
            width[i] = std::max(width[i], row[i].size());
    }
    for (const auto& row : rows) {
        std::string line;
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i)
                line += "  ";
            line += std::string(width[i] - row[i].size(), ' ') + row[i];
        }
        out << line << "\n";
    }
    return out.str();
}

} // namespace

std::string power_table(table_format format)
{
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header{"N"};
    for (const double rho : table_proportions)
        header.push_back("K_{N,0}(" + format_fraction(rho, rho < 0.01 ? 3 : 2) + ")");
    rows.push_back(std::move(header));
    for (const auto n : table_sample_sizes) {
        std::vector<std::string> row{std::to_string(n)};
        for (const double rho : table_proportions)
            row.push_back(format_fraction(power_function(n, rho), 4));
        rows.push_back(std::move(row));
    }
    return render(rows, format);
}

std::string indifference_table(table_format format)
{
    std::vector<std::vector<std::string>> rows{{"N", "rho_indifference"}};
    for (const auto n : table_sample_sizes)
        rows.push_back({std::to_string(n), format_fraction(indifference_proportion(n), 5)});
    return render(rows, format);
}

std::string risk_matrix_table(table_format format)
{
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header{"SEVERITY / PROBABILITY"};
    for (int c = 1; c <= 4; ++c)
        header.push_back(category_description(c) + " (" + std::to_string(c) + ")");
    rows.push_back(std::move(header));
    for (int l = 0; l <= 5; ++l) {
        const auto level = static_cast<probability_level>(l);
        std::vector<std::string> row{level_description(level) + " (" + to_string(level) + ")"};
        for (int c = 1; c <= 4; ++c)
            row.push_back(to_string(risk_matrix(level, c)));
        rows.push_back(std::move(row));
    }
    return render(rows, format);
}

} // namespace safedemo
