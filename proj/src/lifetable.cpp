#include "codamort/lifetable.hpp"

#include "codamort/errors.hpp"
#include "codamort/rng.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <sstream>
#include <string>

namespace codamort {

Eigen::VectorXd DeathGrid::row_for_year(int year) const {
    const auto it = std::find(years.begin(), years.end(), year);
    if (it == years.end()) {
        throw DataError("year " + std::to_string(year) + " not present in grid");
    }
    return values.row(it - years.begin());
}

DeathGrid DeathGrid::up_to_year(int last_year_inclusive) const {
    const auto it = std::find(years.begin(), years.end(), last_year_inclusive);
    if (it == years.end()) {
        throw DataError("year " + std::to_string(last_year_inclusive) + " not present in grid");
    }
    const auto rows = static_cast<Eigen::Index>(it - years.begin()) + 1;
    DeathGrid out;
    out.years.assign(years.begin(), years.begin() + rows);
    out.values = values.topRows(rows);
    out.radix = radix;
    return out;
}

DeathGrid make_death_grid(std::vector<int> years, Eigen::MatrixXd values, double radix) {
    if (radix <= 0.0) {
        throw DataError("radix must be positive");
    }
    if (values.rows() == 0 || values.cols() < 2) {
        throw DataError("death grid needs at least one year and two ages");
    }
    if (static_cast<Eigen::Index>(years.size()) != values.rows()) {
        throw DataError("year list does not match the number of rows");
    }
    for (std::size_t i = 1; i < years.size(); ++i) {
        if (years[i] != years[i - 1] + 1) {
            throw DataError("years are not consecutive: " + std::to_string(years[i - 1]) +
                            " followed by " + std::to_string(years[i]));
        }
    }
    for (Eigen::Index t = 0; t < values.rows(); ++t) {
        if (!(values.row(t).minCoeff() > 0.0)) {
            throw DataError("non-positive death count in year " + std::to_string(years[t]));
        }
        const double sum = values.row(t).sum();
        if (std::abs(sum - radix) / radix >= 1e-6) {
            throw DataError("row sum " + std::to_string(sum) + " violates radix " +
                            std::to_string(radix) + " in year " + std::to_string(years[t]));
        }
    }
    DeathGrid grid;
    grid.years = std::move(years);
    grid.values = std::move(values);
    grid.radix = radix;
    return grid;
}

namespace {

bool is_blank(const std::string& line) {
    return line.find_first_not_of(" \t\r\n") == std::string::npos;
}

std::optional<double> parse_value(const std::string& token) {
    if (token == ".") {
        return std::nullopt;
    }
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(token, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("bad number '" + token + "'");
    }
    if (pos != token.size()) {
        throw std::invalid_argument("bad number '" + token + "'");
    }
    return v;
}

int parse_age(const std::string& token) {
    std::string digits = token;
    if (!digits.empty() && digits.back() == '+') {
        digits.pop_back(); // open age group, e.g. "110+"
    }
    std::size_t pos = 0;
    int age = 0;
    try {
        age = std::stoi(digits, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("bad age '" + token + "'");
    }
    if (pos != digits.size() || age < 0) {
        throw std::invalid_argument("bad age '" + token + "'");
    }
    return age;
}

} // namespace

std::vector<LifeTableRecord> parse_hmd_table(std::istream& in) {
    std::vector<LifeTableRecord> records;
    std::string line;
    long line_no = 0;
    int header_remaining = 2;

    while (std::getline(in, line)) {
        ++line_no;
        if (header_remaining > 0) {
            --header_remaining;
            continue;
        }
        if (is_blank(line)) {
            continue;
        }
        std::istringstream ls(line);
        std::vector<std::string> tokens;
        std::string tok;
        while (ls >> tok) {
            tokens.push_back(tok);
        }
        if (!tokens.empty() && tokens[0] == "Year") {
            continue; // residual column-header line
        }
        if (tokens.size() != 10) {
            throw ParseError("expected 10 columns, found " + std::to_string(tokens.size()),
                             line_no);
        }
        LifeTableRecord rec;
        try {
            rec.year = std::stoi(tokens[0]);
            rec.age = parse_age(tokens[1]);
            rec.qx = parse_value(tokens[3]);
            rec.lx = parse_value(tokens[5]).value_or(std::nan(""));
            rec.dx_reported = parse_value(tokens[6]).value_or(std::nan(""));
        } catch (const std::invalid_argument& e) {
            throw ParseError(e.what(), line_no);
        }
        if (rec.qx && (*rec.qx < 0.0 || *rec.qx > 1.0)) {
            throw ParseError("qx outside [0,1]: " + tokens[3], line_no);
        }
        records.push_back(rec);
    }
    if (records.empty()) {
        throw DataError("life table contains no data rows");
    }

    // Structural checks: consecutive years, identical age range per year.
    std::map<int, std::vector<int>> ages_by_year;
    for (const auto& r : records) {
        ages_by_year[r.year].push_back(r.age);
    }
    int prev_year = ages_by_year.begin()->first - 1;
    const std::size_t ages_per_year = ages_by_year.begin()->second.size();
    for (auto& [year, ages] : ages_by_year) {
        if (year != prev_year + 1) {
            throw DataError("non-contiguous years: " + std::to_string(prev_year) +
                            " followed by " + std::to_string(year));
        }
        prev_year = year;
        if (ages.size() != ages_per_year) {
            throw DataError("year " + std::to_string(year) + " has " +
                            std::to_string(ages.size()) + " ages, expected " +
                            std::to_string(ages_per_year));
        }
        std::sort(ages.begin(), ages.end());
        for (std::size_t i = 0; i < ages.size(); ++i) {
            if (ages[i] != static_cast<int>(i)) {
                throw DataError("year " + std::to_string(year) +
                                " does not cover ages 0.." +
                                std::to_string(ages_per_year - 1));
            }
        }
    }
    return records;
}

namespace {

// Fill missing q by linear interpolation in age; boundary gaps copy the
// nearest observed value.
void fill_missing_q(std::vector<std::optional<double>>& q, int year) {
    const int K = static_cast<int>(q.size());
    int first = -1;
    int last = -1;
    for (int x = 0; x < K; ++x) {
        if (q[x]) {
            if (first < 0) {
                first = x;
            }
            last = x;
        }
    }
    if (first < 0) {
        throw DataError("year " + std::to_string(year) + " has no qx values");
    }
    for (int x = 0; x < first; ++x) {
        q[x] = *q[first];
    }
    for (int x = last + 1; x < K; ++x) {
        q[x] = *q[last];
    }
    int x = first;
    while (x <= last) {
        if (q[x]) {
            ++x;
            continue;
        }
        int right = x;
        while (!q[right]) {
            ++right;
        }
        const int left = x - 1;
        const double span = right - left;
        for (int i = x; i < right; ++i) {
            const double w = (i - left) / span;
            q[i] = (1.0 - w) * *q[left] + w * *q[right];
        }
        x = right;
    }
}

} // namespace

DeathGrid rebuild_death_grid(const std::vector<LifeTableRecord>& records, double radix) {
    if (radix <= 0.0) {
        throw std::domain_error("radix must be positive");
    }
    std::map<int, std::map<int, std::optional<double>>> q_by_year;
    for (const auto& r : records) {
        q_by_year[r.year][r.age] = r.qx;
    }
    if (q_by_year.empty()) {
        throw DataError("no records to rebuild from");
    }
    const std::size_t K = q_by_year.begin()->second.size();
    if (K < 2) {
        throw DataError("need at least two ages");
    }
    for (const auto& [year, by_age] : q_by_year) {
        if (by_age.size() != K) {
            throw DataError("year " + std::to_string(year) + " has " +
                            std::to_string(by_age.size()) + " ages, expected " +
                            std::to_string(K));
        }
    }

    std::vector<int> years;
    Eigen::MatrixXd values(q_by_year.size(), K);
    Eigen::Index row = 0;
    for (const auto& [year, by_age] : q_by_year) {
        std::vector<std::optional<double>> q(K);
        for (const auto& [age, qx] : by_age) {
            if (age < 0 || age >= static_cast<int>(K)) {
                throw DataError("age " + std::to_string(age) + " outside 0.." +
                                std::to_string(K - 1));
            }
            q[age] = qx;
        }
        fill_missing_q(q, year);
        double l = radix;
        for (std::size_t x = 0; x + 1 < K; ++x) {
            const double qx = *q[x];
            if (qx < 0.0 || qx > 1.0) {
                throw std::domain_error("qx outside [0,1] at year " + std::to_string(year) +
                                        " age " + std::to_string(x));
            }
            const double d = l * qx;
            values(row, static_cast<Eigen::Index>(x)) = d;
            l -= d;
        }
        values(row, static_cast<Eigen::Index>(K - 1)) = l; // close the table: q = 1

        // Floor rounding-level zeros and renormalize the row to the radix.
        bool floored = false;
        for (Eigen::Index x = 0; x < static_cast<Eigen::Index>(K); ++x) {
            if (values(row, x) < kMinDeaths) {
                values(row, x) = kMinDeaths;
                floored = true;
            }
        }
        if (floored) {
            values.row(row) *= radix / values.row(row).sum();
        }
        years.push_back(year);
        ++row;
    }
    return make_death_grid(std::move(years), std::move(values), radix);
}

DeathGrid synthetic_grid(int n_years, std::uint64_t seed) {
    if (n_years < 2) {
        throw std::invalid_argument("synthetic grid needs at least two years");
    }
    constexpr int K = 111;
    constexpr double radix = 100000.0;
    constexpr double slope = 0.105;      // Gompertz slope
    constexpr double background = 4e-4;  // age-independent hazard

    std::mt19937_64 rng(splitmix64(seed));
    Eigen::MatrixXd values(n_years, K);
    std::vector<int> years(n_years);

    for (int t = 0; t < n_years; ++t) {
        years[t] = 2014 - n_years + 1 + t;
        const double modal_age = std::min(72.0 + 0.25 * t, 102.0);
        // Infant level decays over the years, with a small seeded jitter.
        // Only the infant component is jittered so the adult peak location
        // stays a deterministic, non-decreasing function of t.
        const double u = 2.0 * (static_cast<double>(rng()) /
                                static_cast<double>(std::mt19937_64::max())) - 1.0;
        const double infant = 0.02 * std::exp(-0.012 * t) * (1.0 + 0.08 * u);

        double l = radix;
        for (int x = 0; x + 1 < K; ++x) {
            const double mid = x + 0.5;
            const double hazard = slope * std::exp(slope * (mid - modal_age)) +
                                  infant * std::exp(-mid / 2.5) + background;
            const double q = 1.0 - std::exp(-hazard);
            const double d = l * q;
            values(t, x) = d;
            l -= d;
        }
        values(t, K - 1) = l;
        bool floored = false;
        for (int x = 0; x < K; ++x) {
            if (values(t, x) < kMinDeaths) {
                values(t, x) = kMinDeaths;
                floored = true;
            }
        }
        if (floored) {
            values.row(t) *= radix / values.row(t).sum();
        }
    }
    return make_death_grid(std::move(years), std::move(values), radix);
}

} // namespace codamort
