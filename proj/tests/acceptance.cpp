// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include "mixlab/cutoff_lab.hpp"
#include "mixlab/distances.hpp"
#include "mixlab/io.hpp"
#include "mixlab/kernel_eval.hpp"
#include "mixlab/models.hpp"
#include "mixlab/product.hpp"

#include "test_support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace mixlab;
using mixlab::testing::Rng;
using mixlab::testing::uniform;
using mixlab::testing::uniform_int;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) detail << "first failure: " << what << "; ";
        pass = pass && ok;
    }
};

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

std::string fmt_list(const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return s + "]";
}

constexpr double kSlack = 1e-12;

void criterion_1(Outcome& o) {
    Rng rng(1001);
    double worst = INFINITY;
    auto check = [&](double tv, double h, const std::string& where) {
        SandwichGaps s = sandwich_gaps(tv, h);
        HdTvGaps g = hdtv_gaps(tv, h);
        worst = std::min({worst, s.lower_gap, s.upper_gap, g.first, g.second});
        o.require(s.lower_gap >= -kSlack && s.upper_gap >= -kSlack, "sandwich at " + where);
        o.require(g.first >= -kSlack && g.second >= -kSlack, "hdtv at " + where);
    };
    for (int k = 0; k < 1000; ++k) {
        const int n = uniform_int(rng, 2, 50);
        Vector mu = mixlab::testing::random_distribution(rng, n);
        Vector nu = mixlab::testing::random_distribution(rng, n);
        check(tv_distance(mu, nu), hellinger_distance(mu, nu), "pair " + std::to_string(k));
    }
    for (int k = 0; k < 200; ++k) {
        MarkovChain c = mixlab::testing::random_chain(rng, uniform_int(rng, 2, 8));
        const double t = uniform(rng, 0.0, 5.0);
        Vector mu = mixlab::testing::random_distribution(rng, c.size());
        Vector row = heat_kernel_row(c, mu, t);
        check(tv_distance(row, c.stationary()), hellinger_distance(row, c.stationary()), "fixed start " + std::to_string(k));
        check(max_distance_at(c, Kind::TV, t), max_distance_at(c, Kind::Hellinger, t), "max start " + std::to_string(k));
    }
    o.detail << "min gap over 1000 pairs and 200 chain samples = " << fmt(worst) << " (need >= -1e-12)";
}

ProductStart random_starts(Rng& rng, const ProductSpec& spec) {
    ProductStart s;
    for (const auto& c : spec.coords) s.push_back(Start::from(mixlab::testing::random_distribution(rng, c.size())));
    return s;
}

void criterion_2(Outcome& o) {
    Rng rng(2002);
    double worst_h = 0.0, worst_bracket = INFINITY;
    for (int k = 0; k < 50; ++k) {
        ProductSpec spec = mixlab::testing::random_product(rng);
        ProductStart starts = random_starts(rng, spec);
        for (int j = 0; j < 20; ++j) {
            const double t = 0.25 * j;
            const double h = product_hellinger_exact(spec, t, starts);
            const double h_dense = dense_product_distance(spec, Kind::Hellinger, t, starts);
            worst_h = std::max(worst_h, std::abs(h - h_dense));
            o.require(std::abs(h - h_dense) <= 1e-9, "Hellinger oracle, spec " + std::to_string(k));

            const double tv = dense_product_distance(spec, Kind::TV, t, starts);
            BoundBracket b1 = product_tv_bracket(spec, t, starts);
            ProdMixingBounds b2 = prodmixing_bounds(spec, t, Kind::TV, starts);
            const double margin = std::min({tv - b1.lower, b1.upper - tv, tv - b2.bracket.lower, b2.bracket.upper - tv});
            worst_bracket = std::min(worst_bracket, margin);
            o.require(margin >= -kSlack, "TV bracket, spec " + std::to_string(k));
        }
    }
    o.detail << "max |structured - dense| Hellinger = " << fmt(worst_h) << " (need <= 1e-9); min bracket margin = "
             << fmt(worst_bracket);
}

void criterion_3(Outcome& o) {
    Rng rng(2002);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
        ProductSpec spec = mixlab::testing::random_product(rng);
        random_starts(rng, spec);  // keep the corpus aligned with criterion 2
        const Matrix dense_kernel = dense_product_chain(spec).kernel();
        for (int j = 0; j < 20; ++j) {
            const double t = 0.25 * j;
            Matrix dense = heat_kernel_matrix(dense_kernel, t);
            Matrix tensor = product_heat_kernel_tensor(spec, t);
            const double err = (dense - tensor).cwiseAbs().maxCoeff();
            worst = std::max(worst, err);
            o.require(err <= 1e-9, "tensor factorization, spec " + std::to_string(k));
        }
    }
    o.detail << "max entrywise |H_t - tensor| = " << fmt(worst) << " (need <= 1e-9)";
}

void criterion_4(Outcome& o) {
    Rng rng(4004);
    double worst = 0.0, worst_bracket = INFINITY;
    for (int k = 0; k < 20; ++k) {
        TwoStateParams p{uniform(rng, 0.02, 1.0), uniform(rng, 0.02, 1.0)};
        MarkovChain c = two_state_chain(p);
        DistanceEvaluator tv(c, Kind::TV, Start::state(2, 0));
        DistanceEvaluator h(c, Kind::Hellinger, Start::state(2, 0));
        DistanceEvaluator l2(c, Kind::L2, Start::state(2, 0));
        for (int j = 0; j <= 80; ++j) {
            const double t = 0.25 * j;
            const double dh = h.continuous(t), dl = l2.continuous(t);
            const double err = std::max({std::abs(two_state::tv(p, t) - tv.continuous(t)),
                                         std::abs(two_state::hellinger_sq(p, t) - dh * dh),
                                         std::abs(two_state::l2_sq(p, t) - dl * dl)});
            worst = std::max(worst, err);
            o.require(err <= 1e-8, "closed form at t=" + fmt(t));
            auto b = two_state::hellinger_sq_bracket(p, t);
            const double margin = std::min(dh * dh - b.lower, b.upper - dh * dh);
            worst_bracket = std::min(worst_bracket, margin);
            o.require(margin >= -kSlack, "bracket at t=" + fmt(t));
        }
    }
    o.detail << "max |closed form - numerics| = " << fmt(worst) << " (need <= 1e-8); min bracket margin = "
             << fmt(worst_bracket);
}

void criterion_5(Outcome& o) {
    double worst = INFINITY;
    for (int e = 4; e <= 10; ++e) {
        const double n = std::ldexp(1.0, e);
        for (double c : {-1.0, 0.0, 1.0, 2.0}) {
            const double f = ex2p_fn(n, c);
            const double margin = std::min(f - std::exp(-c) / 8, std::exp(-c) / (2 * std::sqrt(2.0)) - f);
            worst = std::min(worst, margin);
            o.require(margin >= 0, "f_n bracket at n=" + fmt(n) + ", c=" + fmt(c));
        }
    }
    std::vector<double> ratios;
    for (int e = 4; e <= 10; ++e) {
        const int n = 1 << e;
        MarkovChain c = two_state_product_lumped(n, {0.5, 0.5});
        MixingTime mt = mixing_time(c, Kind::TV, 0.25, Start::state(n + 1, 0), TimeMode::Continuous);
        ratios.push_back(mt.value / (0.5 * n * std::log(static_cast<double>(n))));
    }
    const double last = ratios.back();
    o.require(last >= 0.5 && last <= 1.5, "final ratio inside [0.5, 1.5]");
    const std::size_t k = ratios.size();
    bool toward_one = true;
    for (std::size_t i = k - 3; i < k; ++i) toward_one = toward_one && std::abs(ratios[i] - 1) < std::abs(ratios[i - 1] - 1);
    o.require(toward_one, "monotone approach to 1 over the last three doublings");
    o.detail << "min f_n bracket margin = " << fmt(worst) << "; T/(n log n / 2) for n=16..1024 = " << fmt_list(ratios);
}

void criterion_6(Outcome& o) {
    Rng rng(6006);
    double worst = -INFINITY;
    for (int k = 0; k < 20; ++k) {
        MarkovChain c = mixlab::testing::random_reversible_chain(rng, uniform_int(rng, 2, 8));
        DistanceEvaluator tv(c, Kind::TV, Start::max());
        DistanceEvaluator h(c, Kind::Hellinger, Start::max());
        for (int j = 0; j < 100; ++j) {
            const double t = uniform(rng, 0.0, 6.0), s = uniform(rng, 0.0, 6.0);
            const double vh = 4 * h.continuous(t + s) - (4 * h.continuous(t)) * (4 * h.continuous(s));
            const double vtv = 2 * tv.continuous(t + s) - (2 * tv.continuous(t)) * (2 * tv.continuous(s));
            worst = std::max({worst, vh, vtv});
            o.require(vh <= 1e-10 && vtv <= 1e-10, "submultiplicativity on chain " + std::to_string(k));
        }
    }
    o.detail << "max violation f(t+s) - f(t) f(s) = " << fmt(worst) << " (need <= 1e-10)";
}

void criterion_7(Outcome& o) {
    const double a = 0.3, b = 0.1;
    MarkovChain c = two_state_chain({a, b});
    Vector d0 = point_mass(2, 0);
    long long m = 0;
    while (distance(Kind::TV, power_distribution(d0, c.kernel(), m), c.stationary()) >= 1e-4) ++m;
    Vector mu = power_distribution(d0, c.kernel(), m);
    const double tv = tv_distance(mu, c.stationary());
    const double h = hellinger_distance(mu, c.stationary());
    const double ratio = (tv * tv / (1 + std::sqrt(1 - tv * tv))) / (h * h);
    const double target = 4 * a * b / ((a + b) * (a + b));
    o.require(std::abs(ratio / target - 1) <= 0.01, "ratio within 1% of 0.75");
    o.detail << "m = " << m << ", ratio = " << fmt(ratio) << " vs " << fmt(target);
}

const std::vector<int> kScanIndices = {8, 16, 32, 64, 128};

void criterion_8(Outcome& o) {
    CutoffReport e = cutoff_ratio_diagnostic(make_family("ehrenfest", {}), Kind::TV, 0.1, 0.9, kScanIndices);
    CutoffReport l = cutoff_ratio_diagnostic(make_family("lazy-path", {}), Kind::TV, 0.1, 0.9, kScanIndices);
    o.require(e.failures.empty() && l.failures.empty(), "every index computed");
    bool decreasing = true;
    for (std::size_t i = 1; i < e.ratios.size(); ++i) decreasing = decreasing && e.ratios[i] < e.ratios[i - 1];
    o.require(decreasing, "Ehrenfest ratios decreasing");
    o.require(!e.ratios.empty() && e.ratios.back() <= 1.35, "Ehrenfest final ratio <= 1.35");
    o.require(!l.ratios.empty() && l.ratios.back() >= 1.6, "lazy-path final ratio >= 1.6");
    o.require(l.verdict == Verdict::ConsistentWithNoCutoff, "lazy-path trend flat");
    o.detail << "Ehrenfest T(0.1)/T(0.9) = " << fmt_list(e.ratios) << " (" << verdict_name(e.verdict)
             << "); lazy path = " << fmt_list(l.ratios) << " (" << verdict_name(l.verdict) << ", slope "
             << fmt(l.trend.sharpness_slope) << ")";
}

void criterion_9(Outcome& o) {
    int checked = 0;
    double worst = INFINITY;
    for (int n : {5, 8, 12}) {
        for (double a : {0.001, 0.01}) {
            LacoinParams p{n, a, 10 * a, 0.0};
            MarkovChain c = lacoin_chain(p);
            const double pi2n = c.stationary()[2 * n];
            o.require(1 - 2 * a < pi2n && pi2n < 1 - a, "pi(2n) bracket at n=" + std::to_string(n));
            DistanceEvaluator h(c, Kind::Hellinger, Start::max());
            DistanceEvaluator tv(c, Kind::TV, Start::max());
            for (int j = 1; j <= 200; ++j) {
                const double t = 4.0 * n * j / 200.0;
                LacoinEnvelope env = lacoin_bound_envelope(p, t);
                const double h2 = std::pow(h.continuous(t), 2), d = tv.continuous(t);
                auto upper = [&](const std::optional<double>& bound, const char* name) {
                    if (!bound) return;
                    ++checked;
                    worst = std::min(worst, *bound - h2);
                    o.require(h2 <= *bound + kSlack, std::string(name) + " at n=" + std::to_string(n) + ", t=" + fmt(t));
                };
                upper(env.hd_upper1, "hd_upper1");
                upper(env.hd_upper2, "hd_upper2");
                if (env.hd_lower1) {
                    ++checked;
                    worst = std::min(worst, h2 - *env.hd_lower1);
                    o.require(h2 >= *env.hd_lower1 - kSlack, "hd_lower1 at n=" + std::to_string(n) + ", t=" + fmt(t));
                }
                if (env.tv_lower) {
                    ++checked;
                    worst = std::min(worst, d - *env.tv_lower);
                    o.require(d >= *env.tv_lower - kSlack, "tv_lower at n=" + std::to_string(n) + ", t=" + fmt(t));
                }
            }
        }
    }
    o.detail << checked << " in-window bound checks, min margin = " << fmt(worst);
}

void criterion_10(Outcome& o) {
    std::vector<double> lo, hi;
    for (int n = 64; n <= 4096; n *= 2) {
        auto w = weight_schedule({ScheduleKind::LogRatio}, n);
        std::vector<double> b(static_cast<std::size_t>(n), std::pow(n, -0.5));
        lo.push_back(b_n_delta(w.p, b, 0.3).B);
        hi.push_back(b_n_delta(w.p, b, 0.7).B);
    }
    for (std::size_t i = 1; i < lo.size(); ++i) {
        o.require(lo[i] < lo[i - 1], "B_n(0.3) decreasing");
        o.require(hi[i] > hi[i - 1], "B_n(0.7) increasing");
    }
    o.detail << "B_n(0.3) = " << fmt_list(lo) << "; B_n(0.7) = " << fmt_list(hi);
}

ProductFamily cycle_product_family(double gamma) {
    ProductFamily fam;
    fam.label = "psrw";
    fam.size = [](int n) { return n; };
    fam.coordinate = [](int, int i) { return cycle_chain(i); };
    fam.log_weight = [gamma](int, int i) { return 2.0 * std::log(static_cast<double>(i)) - std::pow(i, gamma); };
    return fam;
}

void criterion_11(Outcome& o) {
    ProductFamily fam = cycle_product_family(2.0);
    std::vector<int> n_list;
    for (int n = 8; n <= 64; ++n) n_list.push_back(n);
    const std::vector<int> m_list = {0, 1, 2, 3, 4};
    const std::vector<double> c_list = {0.25, 0.5, 1.0, 2.0};
    std::vector<RDiagnostic> grids;
    for (double c : c_list) grids.push_back(r_estimator(fam, Kind::TV, c, n_list, m_list, [](int, int) { return 0.25; }));
    const RDiagnostic& main = grids[1];

    for (std::size_t m = 0; m < m_list.size(); ++m) {
        for (std::size_t i = 1; i < n_list.size(); ++i) {
            const double prev = main.log_S[i - 1][m], cur = main.log_S[i][m];
            if (m_list[m] == 0) {
                // On this family S(n,0) = (2 eps)^c + S(n,1), with S(n,1) below one ulp of the leading term.
                o.require(cur <= prev, "S(n,0,0.5) non-increasing at n=" + std::to_string(n_list[i]));
                o.require(main.log_S[i][0] == 0.5 * std::log(0.5), "S(n,0,0.5) equals its leading term");
            } else {
                o.require(cur < prev, "S(n," + std::to_string(m_list[m]) + ",0.5) decreasing at n=" + std::to_string(n_list[i]));
            }
        }
    }
    for (std::size_t g = 0; g < grids.size(); ++g) {
        for (std::size_t i = 0; i < n_list.size(); ++i) {
            for (std::size_t m = 1; m < m_list.size(); ++m)
                o.require(grids[g].log_S[i][m] <= grids[g].log_S[i][m - 1], "monotone in m");
            if (g > 0) {
                for (std::size_t m = 0; m < m_list.size(); ++m)
                    o.require(grids[g].log_S[i][m] <= grids[g - 1].log_S[i][m], "monotone in c");
            }
        }
    }
    std::vector<double> first, last;
    for (std::size_t m = 0; m < m_list.size(); ++m) {
        first.push_back(main.log_S.front()[m]);
        last.push_back(main.log_S.back()[m]);
    }
    o.detail << "log S(8, m=0..4) = " << fmt_list(first) << "; log S(64, m=0..4) = " << fmt_list(last)
             << " (m=0 row constant in n)";
}

void criterion_12(Outcome& o) {
    int checked = 0;
    double worst = INFINITY;
    for (const char* model : {"ehrenfest", "lazy-path"}) {
        for (int n : kScanIndices) {
            MarkovChain c = std::get<MarkovChain>(make_family(model, {}).generator(n));
            for (double eps : {0.1, 0.9}) {
                MixingTime lo = mixing_time(c, Kind::TV, eps * std::sqrt(2 - eps * eps), Start::max(), TimeMode::Continuous);
                MixingTime mid = mixing_time(c, Kind::Hellinger, eps, Start::max(), TimeMode::Continuous);
                MixingTime hi = mixing_time(c, Kind::TV, eps * eps, Start::max(), TimeMode::Continuous);
                const double m1 = mid.value - (lo.value - lo.resolution);
                const double m2 = hi.value - (mid.value - mid.resolution);
                worst = std::min({worst, m1, m2});
                ++checked;
                o.require(m1 >= 0 && m2 >= 0, std::string(model) + " n=" + std::to_string(n) + " eps=" + fmt(eps));
            }
        }
    }
    o.detail << checked << " (family, n, eps) brackets T_TV(e sqrt(2-e^2)) <= T_H(e) <= T_TV(e^2), min margin = "
             << fmt(worst);
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria = {
        {"sandwich suite", criterion_1},
        {"product oracle equivalence", criterion_2},
        {"tensor factorization", criterion_3},
        {"two-state closed forms", criterion_4},
        {"two-state product reproduction", criterion_5},
        {"submultiplicativity", criterion_6},
        {"Hellinger/TV limit ratio", criterion_7},
        {"cutoff vs no-cutoff discrimination", criterion_8},
        {"Lacoin envelope", criterion_9},
        {"B_n(delta) trends", criterion_10},
        {"R(c) diagnostic sanity", criterion_11},
        {"mixing-time comparison", criterion_12},
    };
    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            criteria[k].second(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += o.pass ? 0 : 1;
        std::printf("[%s] criterion %zu (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first,
                    o.detail.str().c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
