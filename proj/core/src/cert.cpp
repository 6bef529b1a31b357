#include "auglasso/cert.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "auglasso/linalg.hpp"

namespace auglasso {

Theorem2Constants theorem2_constants(int n, int p, double delta) {
    if (n < 100) {
        throw std::invalid_argument(
            "theorem2_constants requires n >= 100 (got n = " +
            std::to_string(n) + ")");
    }
    if (!(delta > 0.0 && delta < 1.0 / 7.0)) {
        throw std::invalid_argument(
            "theorem2_constants requires delta in (0, 1/7)");
    }
    const double rn = std::sqrt(static_cast<double>(n));
    const double log_p = std::log(static_cast<double>(p));
    const double log_n = std::log(static_cast<double>(n));

    Theorem2Constants out;
    const double a1_raw = 1.0 - (4.3 + std::sqrt(2.0 * std::log(9.0 / delta))) / rn;
    out.tp.a1 = std::max(a1_raw, 0.0);
    out.tp.clamped = a1_raw <= 0.0;
    out.tp.a2 = 1.2 * std::sqrt(2.0 * log_p / n);

    out.ip.b1 = (4.8 * std::sqrt(2.0) + std::sqrt(2.0 * std::log(81.0 / delta))) / rn;
    out.ip.b2 = out.tp.a2;
    out.ip.b3 = 1.2 * std::sqrt(2.0 * log_n / n);

    out.atp.c1 =
        0.75 - (17.5 + 9.6 * std::sqrt(2.0 * std::log(2.0 / delta))) / rn;
    out.atp.c2 = 3.6 * std::sqrt(2.0 * log_p / n);
    out.atp.c3 = 2.4 * std::sqrt(2.0 * log_n / n);
    out.atp.vacuous = out.atp.c1 <= 0.0;
    return out;
}

AtpConstants combine_atp(const TpConstants& tp, const IpConstants& ip,
                         double alpha, CombineRule rule) {
    const double gap = tp.a1 * tp.a1 - ip.b1;
    if (gap <= 0.0) {
        throw std::invalid_argument(
            "combine_atp requires a1^2 > b1; admissible alpha interval is empty");
    }
    const double bound = std::sqrt(gap);
    if (!(alpha > 0.0 && alpha < bound)) {
        throw std::invalid_argument("alpha must lie in (0, " +
                                    std::to_string(bound) + ")");
    }
    const double factor = rule == CombineRule::supplement ? 1.0 : 2.0;
    AtpConstants out;
    out.c1 = std::sqrt(gap - alpha * alpha);
    out.c2 = tp.a2 + factor * ip.b2 / alpha;
    out.c3 = factor * ip.b3 / alpha;
    return out;
}

void CertReport::merge(const CertReport& other) {
    n_samples += other.n_samples;
    n_violations += other.n_violations;
    if (other.n_samples > 0 &&
        (n_samples == other.n_samples || other.min_slack < min_slack)) {
        min_slack = other.min_slack;
        worst_v = other.worst_v;
        worst_u = other.worst_u;
    }
}

double tp_slack(const Eigen::MatrixXd& X, const Eigen::MatrixXd& sigma_half,
                const TpConstants& c, const Eigen::VectorXd& v) {
    const double rn = std::sqrt(static_cast<double>(X.rows()));
    return (X * v).norm() / rn - c.a1 * (sigma_half * v).norm() +
           c.a2 * v.lpNorm<1>();
}

double ip_slack(const Eigen::MatrixXd& X, const Eigen::MatrixXd& sigma_half,
                const IpConstants& c, const Eigen::VectorXd& v,
                const Eigen::VectorXd& u) {
    const double rn = std::sqrt(static_cast<double>(X.rows()));
    const double lhs = std::abs(u.dot(X * v) / rn);
    const double sv = (sigma_half * v).norm();
    const double rhs = c.b1 * sv * u.norm() + c.b2 * v.lpNorm<1>() * u.norm() +
                       c.b3 * sv * u.lpNorm<1>();
    return rhs - lhs;
}

double atp_slack(const Eigen::MatrixXd& X, const Eigen::MatrixXd& sigma_half,
                 const AtpConstants& c, const Eigen::VectorXd& v,
                 const Eigen::VectorXd& u) {
    const double rn = std::sqrt(static_cast<double>(X.rows()));
    const Eigen::VectorXd w = X * v / rn + u;
    const double stacked =
        std::sqrt((sigma_half * v).squaredNorm() + u.squaredNorm());
    return w.norm() - c.c1 * stacked + c.c2 * v.lpNorm<1>() + c.c3 * u.lpNorm<1>();
}

namespace {

Eigen::VectorXd sign_vector(const Eigen::VectorXd& v) {
    Eigen::VectorXd s(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        s[i] = v[i] > 0.0 ? 1.0 : (v[i] < 0.0 ? -1.0 : 0.0);
    }
    return s;
}

Eigen::VectorXd sparse_gaussian(int dim, int k, Rng& rng) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    k = std::min(k, dim);
    std::vector<int> pool(dim);
    for (int i = 0; i < dim; ++i) pool[i] = i;
    for (int i = 0; i < k; ++i) {
        const auto j = i + static_cast<int>(rng.uniform_below(
                               static_cast<std::uint64_t>(dim - i)));
        std::swap(pool[i], pool[j]);
        v[pool[i]] = rng.normal();
    }
    return v;
}

Eigen::VectorXd dense_gaussian(int dim, Rng& rng) {
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = rng.normal();
    return v;
}

/// One draw of the directed mixture for sample index k out of n_total.
Eigen::VectorXd mixture_draw(int dim, int k, int n_total,
                             const SamplerSpec& spec, Rng& rng) {
    const int n_basis =
        spec.include_basis ? std::min(dim, std::max(n_total / 4, 1)) : 0;
    if (k < n_basis) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
        v[k % dim] = 1.0;
        return v;
    }
    const int rest = k - n_basis;
    const int n_after = n_total - n_basis;
    if (!spec.sparse_ks.empty() && rest < n_after / 2) {
        const int kk = spec.sparse_ks[rest % spec.sparse_ks.size()];
        return sparse_gaussian(dim, kk, rng);
    }
    return dense_gaussian(dim, rng);
}

struct SlackTracker {
    CertReport report;
    std::vector<std::pair<double, long>> ranked;  // (slack, sample id)

    void record(double slack, const Eigen::VectorXd& v,
                const Eigen::VectorXd* u) {
        ++report.n_samples;
        if (slack < 0.0) ++report.n_violations;
        if (report.n_samples == 1 || slack < report.min_slack) {
            report.min_slack = slack;
            report.worst_v = v;
            if (u != nullptr) report.worst_u = *u;
        }
    }
};

double step_size(int iter) { return 0.1 / std::sqrt(static_cast<double>(iter)); }

}  // namespace

CertReport check_tp(const Eigen::MatrixXd& X, const Eigen::MatrixXd& sigma,
                    const TpConstants& consts, const SamplerSpec& sampler,
                    int n_samples, Rng& rng) {
    if (n_samples < 1) throw std::invalid_argument("need n_samples >= 1");
    if (sigma.rows() != X.cols() || sigma.cols() != X.cols()) {
        throw std::invalid_argument("sigma must be p x p");
    }
    const int p = static_cast<int>(X.cols());
    const Eigen::MatrixXd S = symmetric_sqrt(sigma);
    const Eigen::MatrixXd A = X / std::sqrt(static_cast<double>(X.rows()));

    auto slack_of = [&](const Eigen::VectorXd& v) {
        return (A * v).norm() - consts.a1 * (S * v).norm() +
               consts.a2 * v.lpNorm<1>();
    };

    SlackTracker tracker;
    tracker.report.property = Property::TP;
    {
        std::ostringstream os;
        os << "TP(a1=" << consts.a1 << ", a2=" << consts.a2 << ")";
        tracker.report.constants = os.str();
    }

    std::vector<std::pair<double, Eigen::VectorXd>> worst;
    for (int k = 0; k < n_samples; ++k) {
        Eigen::VectorXd v = mixture_draw(p, k, n_samples, sampler, rng);
        const double s = slack_of(v);
        tracker.record(s, v, nullptr);
        worst.emplace_back(s, std::move(v));
    }
    std::partial_sort(worst.begin(),
                      worst.begin() + std::min<std::size_t>(
                                          sampler.adversarial_starts, worst.size()),
                      worst.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });

    const int starts =
        std::min<int>(sampler.adversarial_starts, static_cast<int>(worst.size()));
    for (int sidx = 0; sidx < starts; ++sidx) {
        Eigen::VectorXd v = worst[sidx].second;
        if (v.norm() == 0.0) continue;
        v /= v.norm();
        for (int iter = 1; iter <= sampler.adversarial_steps; ++iter) {
            const Eigen::VectorXd av = A * v;
            const Eigen::VectorXd sv = S * v;
            Eigen::VectorXd grad = consts.a2 * sign_vector(v);
            if (av.norm() > 0.0) grad += A.transpose() * av / av.norm();
            if (sv.norm() > 0.0) grad -= consts.a1 * S.transpose() * sv / sv.norm();
            const double gnorm = grad.norm();
            if (gnorm == 0.0) break;
            v -= step_size(iter) * grad / gnorm;  // descend the slack
            const double vnorm = v.norm();
            if (vnorm == 0.0) break;
            v /= vnorm;
            tracker.record(slack_of(v), v, nullptr);
        }
    }
    return tracker.report;
}

CertReport check_ip(const Eigen::MatrixXd& X, const Eigen::MatrixXd& sigma,
                    const IpConstants& consts, const SamplerSpec& sampler,
                    int n_samples, Rng& rng) {
    if (n_samples < 1) throw std::invalid_argument("need n_samples >= 1");
    if (sigma.rows() != X.cols() || sigma.cols() != X.cols()) {
        throw std::invalid_argument("sigma must be p x p");
    }
    const int n = static_cast<int>(X.rows());
    const int p = static_cast<int>(X.cols());
    const Eigen::MatrixXd S = symmetric_sqrt(sigma);
    const Eigen::MatrixXd A = X / std::sqrt(static_cast<double>(n));

    auto lhs_of = [&](const Eigen::VectorXd& v, const Eigen::VectorXd& u) {
        return std::abs(u.dot(A * v));
    };
    auto rhs_of = [&](const Eigen::VectorXd& v, const Eigen::VectorXd& u) {
        const double sv = (S * v).norm();
        return consts.b1 * sv * u.norm() + consts.b2 * v.lpNorm<1>() * u.norm() +
               consts.b3 * sv * u.lpNorm<1>();
    };

    SlackTracker tracker;
    tracker.report.property = Property::IP;
    {
        std::ostringstream os;
        os << "IP(b1=" << consts.b1 << ", b2=" << consts.b2
           << ", b3=" << consts.b3 << ")";
        tracker.report.constants = os.str();
    }

    std::vector<std::tuple<double, Eigen::VectorXd, Eigen::VectorXd>> worst;
    for (int k = 0; k < n_samples; ++k) {
        Eigen::VectorXd v = mixture_draw(p, k, n_samples, sampler, rng);
        Eigen::VectorXd u = mixture_draw(n, k, n_samples, sampler, rng);
        const double s = rhs_of(v, u) - lhs_of(v, u);
        tracker.record(s, v, &u);
        worst.emplace_back(s, std::move(v), std::move(u));
    }
    // Rank refinement starts by LHS/RHS ratio (worst alignment first).
    const int starts =
        std::min<int>(sampler.adversarial_starts, static_cast<int>(worst.size()));
    std::partial_sort(
        worst.begin(), worst.begin() + starts, worst.end(),
        [](const auto& a, const auto& b) { return std::get<0>(a) < std::get<0>(b); });

    for (int sidx = 0; sidx < starts; ++sidx) {
        Eigen::VectorXd v = std::get<1>(worst[sidx]);
        Eigen::VectorXd u = std::get<2>(worst[sidx]);
        if (v.norm() == 0.0 || u.norm() == 0.0) continue;
        v /= v.norm();
        u /= u.norm();
        for (int iter = 1; iter <= sampler.adversarial_steps; ++iter) {
            const Eigen::VectorXd av = A * v;
            const Eigen::VectorXd sv = S * v;
            const double lhs_signed = u.dot(av);
            const double lhs = std::abs(lhs_signed);
            const double rhs = rhs_of(v, u);
            if (rhs <= 0.0) break;
            const double sgn = lhs_signed >= 0.0 ? 1.0 : -1.0;
            const double svn = sv.norm();
            const double un2 = u.norm();
            const double un1 = u.lpNorm<1>();
            const double vn1 = v.lpNorm<1>();

            Eigen::VectorXd dlhs_v = sgn * (A.transpose() * u);
            Eigen::VectorXd dlhs_u = sgn * av;
            Eigen::VectorXd drhs_v = consts.b2 * un2 * sign_vector(v);
            if (svn > 0.0) {
                drhs_v += (consts.b1 * un2 + consts.b3 * un1) *
                          (S.transpose() * sv) / svn;
            }
            Eigen::VectorXd drhs_u = consts.b3 * svn * sign_vector(u);
            if (un2 > 0.0) {
                drhs_u += (consts.b1 * svn + consts.b2 * vn1) * u / un2;
            }
            // gradient of the ratio LHS/RHS
            Eigen::VectorXd gv = (dlhs_v * rhs - lhs * drhs_v) / (rhs * rhs);
            Eigen::VectorXd gu = (dlhs_u * rhs - lhs * drhs_u) / (rhs * rhs);
            const double gnorm = std::sqrt(gv.squaredNorm() + gu.squaredNorm());
            if (gnorm == 0.0) break;
            v += step_size(iter) * gv / gnorm;  // ascend the ratio
            u += step_size(iter) * gu / gnorm;
            if (v.norm() == 0.0 || u.norm() == 0.0) break;
            v /= v.norm();
            u /= u.norm();
            tracker.record(rhs_of(v, u) - lhs_of(v, u), v, &u);
        }
    }
    return tracker.report;
}

CertReport check_atp(const Eigen::MatrixXd& X, const Eigen::MatrixXd& sigma,
                     const AtpConstants& consts, const SamplerSpec& sampler,
                     int n_samples, Rng& rng) {
    if (n_samples < 1) throw std::invalid_argument("need n_samples >= 1");
    if (sigma.rows() != X.cols() || sigma.cols() != X.cols()) {
        throw std::invalid_argument("sigma must be p x p");
    }
    const int n = static_cast<int>(X.rows());
    const int p = static_cast<int>(X.cols());
    const Eigen::MatrixXd S = symmetric_sqrt(sigma);
    const Eigen::MatrixXd A = X / std::sqrt(static_cast<double>(n));

    auto slack_of = [&](const Eigen::VectorXd& v, const Eigen::VectorXd& u) {
        const Eigen::VectorXd w = A * v + u;
        const double stacked = std::sqrt((S * v).squaredNorm() + u.squaredNorm());
        return w.norm() - consts.c1 * stacked + consts.c2 * v.lpNorm<1>() +
               consts.c3 * u.lpNorm<1>();
    };

    SlackTracker tracker;
    tracker.report.property = Property::ATP;
    {
        std::ostringstream os;
        os << "ATP(c1=" << consts.c1 << ", c2=" << consts.c2
           << ", c3=" << consts.c3 << (consts.vacuous ? ", vacuous" : "") << ")";
        tracker.report.constants = os.str();
    }

    std::vector<std::tuple<double, Eigen::VectorXd, Eigen::VectorXd>> worst;
    for (int k = 0; k < n_samples; ++k) {
        Eigen::VectorXd v = mixture_draw(p, k, n_samples, sampler, rng);
        Eigen::VectorXd u = mixture_draw(n, k, n_samples, sampler, rng);
        const double s = slack_of(v, u);
        tracker.record(s, v, &u);
        worst.emplace_back(s, std::move(v), std::move(u));
    }
    const int starts =
        std::min<int>(sampler.adversarial_starts, static_cast<int>(worst.size()));
    std::partial_sort(
        worst.begin(), worst.begin() + starts, worst.end(),
        [](const auto& a, const auto& b) { return std::get<0>(a) < std::get<0>(b); });

    for (int sidx = 0; sidx < starts; ++sidx) {
        Eigen::VectorXd v = std::get<1>(worst[sidx]);
        Eigen::VectorXd u = std::get<2>(worst[sidx]);
        const double joint0 = std::sqrt(v.squaredNorm() + u.squaredNorm());
        if (joint0 == 0.0) continue;
        v /= joint0;
        u /= joint0;
        for (int iter = 1; iter <= sampler.adversarial_steps; ++iter) {
            const Eigen::VectorXd w = A * v + u;
            const Eigen::VectorXd sv = S * v;
            const double wn = w.norm();
            const double stacked = std::sqrt(sv.squaredNorm() + u.squaredNorm());
            Eigen::VectorXd gv = consts.c2 * sign_vector(v);
            Eigen::VectorXd gu = consts.c3 * sign_vector(u);
            if (wn > 0.0) {
                gv += A.transpose() * w / wn;
                gu += w / wn;
            }
            if (stacked > 0.0) {
                gv -= consts.c1 * (S.transpose() * sv) / stacked;
                gu -= consts.c1 * u / stacked;
            }
            const double gnorm = std::sqrt(gv.squaredNorm() + gu.squaredNorm());
            if (gnorm == 0.0) break;
            v -= step_size(iter) * gv / gnorm;  // descend the slack
            u -= step_size(iter) * gu / gnorm;
            const double joint = std::sqrt(v.squaredNorm() + u.squaredNorm());
            if (joint == 0.0) break;
            v /= joint;
            u /= joint;
            tracker.record(slack_of(v, u), v, &u);
        }
    }
    return tracker.report;
}

double re_estimate(const Eigen::MatrixXd& sigma, int s, double c0,
                   int n_samples, Rng& rng) {
    const int p = static_cast<int>(sigma.rows());
    if (s < 1 || s > p) throw std::invalid_argument("need 1 <= s <= p");
    if (c0 < 0.0) throw std::invalid_argument("need c0 >= 0");
    if (n_samples < 1) throw std::invalid_argument("need n_samples >= 1");
    const Eigen::MatrixXd S = symmetric_sqrt(sigma);

    double best = std::numeric_limits<double>::infinity();
    std::vector<int> pool(p);
    const double t_levels[] = {0.0, 0.5, 1.0};
    for (int k = 0; k < n_samples; ++k) {
        for (int i = 0; i < p; ++i) pool[i] = i;
        for (int i = 0; i < s; ++i) {
            const auto j = i + static_cast<int>(rng.uniform_below(
                                   static_cast<std::uint64_t>(p - i)));
            std::swap(pool[i], pool[j]);
        }
        Eigen::VectorXd v_on = Eigen::VectorXd::Zero(p);
        for (int i = 0; i < s; ++i) v_on[pool[i]] = rng.normal();
        const double on_l2 = v_on.norm();
        const double on_l1 = v_on.lpNorm<1>();
        if (on_l2 == 0.0) continue;

        Eigen::VectorXd off = Eigen::VectorXd::Zero(p);
        for (int i = s; i < p; ++i) off[pool[i]] = rng.normal();
        const double off_l1 = off.lpNorm<1>();

        for (double t : t_levels) {
            Eigen::VectorXd v = v_on;
            if (t > 0.0 && off_l1 > 0.0) {
                v += off * (t * c0 * on_l1 / off_l1);
            }
            best = std::min(best, (S * v).norm() / on_l2);
        }
    }
    return best;
}

WidthEstimate gaussian_width_b1(const Eigen::MatrixXd& sigma, int n_samples,
                                Rng& rng) {
    if (n_samples < 1) throw std::invalid_argument("need n_samples >= 1");
    const int p = static_cast<int>(sigma.rows());
    const Eigen::MatrixXd S = symmetric_sqrt(sigma);
    double mean = 0.0;
    double m2 = 0.0;  // Welford
    Eigen::VectorXd xi(p);
    for (int k = 1; k <= n_samples; ++k) {
        for (int i = 0; i < p; ++i) xi[i] = rng.normal();
        const double w = (S * xi).lpNorm<Eigen::Infinity>();
        const double delta = w - mean;
        mean += delta / k;
        m2 += delta * (w - mean);
    }
    WidthEstimate est;
    est.value = mean;
    est.n_samples = n_samples;
    est.std_error =
        n_samples > 1 ? std::sqrt(m2 / (n_samples - 1) / n_samples) : 0.0;
    return est;
}

WidthBound width_bound(const Eigen::MatrixXd& sigma) {
    const int p = static_cast<int>(sigma.rows());
    WidthBound out;
    out.value = std::sqrt(sigma.diagonal().maxCoeff()) *
                std::sqrt(2.0 * std::log(static_cast<double>(p)));
    out.vacuous = p == 1;
    return out;
}

ConditionReport theorem1_condition(int s, int o, double kappa,
                                   const AtpConstants& atp, double b2) {
    if (s < 0 || o < 0) throw std::invalid_argument("need s, o >= 0");
    if (!(kappa > 0.0)) throw std::invalid_argument("need kappa > 0");
    if (!(atp.c1 > 0.0)) {
        throw std::invalid_argument("theorem1_condition requires c1 > 0");
    }
    ConditionReport rep;
    rep.lhs = s / (kappa * kappa) + o;
    const double denom = std::max({atp.c2, atp.c3, 5.0 * b2 / atp.c1});
    if (denom == 0.0) {
        rep.rhs = std::numeric_limits<double>::infinity();
        rep.holds = true;
        rep.margin = 0.0;
        return rep;
    }
    rep.rhs = atp.c1 * atp.c1 / (400.0 * denom * denom);
    rep.holds = rep.lhs <= rep.rhs;
    rep.margin = rep.lhs / rep.rhs;
    return rep;
}

double theorem1_bound(double lambda, int s, int o, double kappa,
                      const AtpConstants& atp, double b3) {
    if (s < 0 || o < 0) throw std::invalid_argument("need s, o >= 0");
    if (!(kappa > 0.0)) throw std::invalid_argument("need kappa > 0");
    if (!(atp.c1 > 0.0)) {
        throw std::invalid_argument("theorem1_bound requires c1 > 0");
    }
    const double c1 = atp.c1;
    const double lead = (24.0 * lambda / (c1 * c1)) *
                        std::max(2.0 * atp.c2 / c1, b3 / (c1 * c1)) *
                        (s / (kappa * kappa) + 7.0 * o);
    return lead + 5.0 * lambda * std::sqrt(static_cast<double>(s)) /
                      (6.0 * c1 * c1 * kappa);
}

}  // namespace auglasso
