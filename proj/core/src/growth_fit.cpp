#include "nlfront/csv.hpp"
#include "nlfront/error.hpp"
#include "nlfront/front.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace nlfront {

namespace {

struct Line {
    double intercept = 0.0;
    double slope = 0.0;
};

Line least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = double(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
    return {my - slope * mx, slope};
}

template <class Model>
double relative_rms(const std::vector<double>& t, const std::vector<double>& X, Model&& model) {
    double acc = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double d = (model(t[i]) - X[i]) / X[i];
        acc += d * d;
    }
    return std::sqrt(acc / double(t.size()));
}

}  // namespace

std::string_view to_string(GrowthLaw law) noexcept {
    switch (law) {
        case GrowthLaw::linear: return "linear";
        case GrowthLaw::exponential: return "exponential-in-t";
        case GrowthLaw::power: return "power";
        case GrowthLaw::t_log_power: return "t-log-power";
    }
    return "unknown";
}

GrowthLaw growth_law_from_string(std::string_view name) {
    for (auto l : {GrowthLaw::linear, GrowthLaw::exponential, GrowthLaw::power, GrowthLaw::t_log_power})
        if (to_string(l) == name) return l;
    fail(ErrorCode::parameter_out_of_range, "unknown growth law '" + std::string(name) + "'");
}

GrowthFit classify_growth(const std::vector<double>& times, const std::vector<double>& positions) {
    require(times.size() == positions.size(), ErrorCode::insufficient_data, "times and positions differ in length");
    const std::size_t burn = times.size() / 5;
    std::vector<double> t(times.begin() + std::ptrdiff_t(burn), times.end());
    std::vector<double> X(positions.begin() + std::ptrdiff_t(burn), positions.end());
    require(t.size() >= 12, ErrorCode::insufficient_data,
            "need at least 12 points after burn-in, have " + std::to_string(t.size()));
    for (std::size_t i = 0; i < t.size(); ++i)
        require(X[i] > 0.0 && t[i] > 0.0, ErrorCode::insufficient_data, "positions and times must be positive");

    GrowthFit out;
    out.candidates.resize(4);

    std::vector<double> logX(X.size()), logt(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        logX[i] = std::log(X[i]);
        logt[i] = std::log(t[i]);
    }

    {
        auto& c = out.candidates[0];
        c.law = GrowthLaw::linear;
        const Line l = least_squares(t, X);
        c.coefficient = l.intercept;
        c.parameter = l.slope;
        c.residual = relative_rms(t, X, [&](double s) { return l.intercept + l.slope * s; });
        c.points = int(t.size());
        c.available = true;
    }
    {
        auto& c = out.candidates[1];
        c.law = GrowthLaw::exponential;
        const Line l = least_squares(t, logX);
        c.coefficient = std::exp(l.intercept);
        c.parameter = l.slope;
        c.residual = relative_rms(t, X, [&](double s) { return std::exp(l.intercept + l.slope * s); });
        c.points = int(t.size());
        c.available = true;
    }
    {
        auto& c = out.candidates[2];
        c.law = GrowthLaw::power;
        const Line l = least_squares(logt, logX);
        c.coefficient = std::exp(l.intercept);
        c.parameter = l.slope;
        c.residual = relative_rms(t, X, [&](double s) { return std::exp(l.intercept + l.slope * std::log(s)); });
        c.points = int(t.size());
        c.available = true;
    }
    {
        auto& c = out.candidates[3];
        c.law = GrowthLaw::t_log_power;
        std::vector<double> tt, xx, yy;
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (t[i] < 10.0) continue;
            tt.push_back(t[i]);
            xx.push_back(std::log(std::log(t[i])));
            yy.push_back(logX[i] - logt[i]);
        }
        c.points = int(tt.size());
        if (tt.size() >= 3) {
            const Line l = least_squares(xx, yy);
            c.coefficient = std::exp(l.intercept);
            c.parameter = l.slope;
            std::vector<double> Xs;
            for (std::size_t i = 0; i < t.size(); ++i)
                if (t[i] >= 10.0) Xs.push_back(X[i]);
            c.residual = relative_rms(tt, Xs, [&](double s) {
                return std::exp(l.intercept + std::log(s) + l.slope * std::log(std::log(s)));
            });
            c.available = true;
        } else {
            c.residual = std::numeric_limits<double>::max();
        }
    }

    std::size_t best = 0;
    for (std::size_t k = 1; k < out.candidates.size(); ++k)
        if (out.candidates[k].available && out.candidates[k].residual < out.candidates[best].residual) best = k;
    out.law = out.candidates[best].law;
    return out;
}

GrowthFit classify_growth(const FrontTrace& trace, double level) {
    auto [t, X] = trace.series(level);
    return classify_growth(t, X);
}

void write_fit_csv(const GrowthFit& fit, std::ostream& os) {
    CsvWriter csv(os);
    csv.header({"law", "coefficient", "parameter", "residual", "points", "selected"});
    for (const auto& c : fit.candidates) {
        csv.cell(to_string(c.law));
        if (c.available)
            csv.cell(c.coefficient).cell(c.parameter).cell(c.residual);
        else
            csv.cell(std::string_view("")).cell(std::string_view("")).cell(std::string_view(""));
        csv.cell(c.points).cell(c.law == fit.law);
        csv.end_row();
    }
}

}  // namespace nlfront
