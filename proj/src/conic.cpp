#include "mrecon/conic.hpp"

#include "mrecon/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

namespace mrecon::conic {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

double Result::merit() const
{
    return std::max({primal_infeasibility, dual_infeasibility, relative_gap});
}

Mat centered_basis(int k)
{
    // Householder reflector mapping e_0 onto 1/sqrt(k); its other columns span 1⊥
    Vec ones = Vec::Ones(k);
    Eigen::HouseholderQR<Mat> qr(ones);
    Mat q = qr.householderQ();
    return q.rightCols(k - 1);
}

namespace {

inline Mat sym(const Mat& a) { return 0.5 * (a + a.transpose()); }

struct Layout {
    int k = 0;
    int m = 0;
    int npairs = 0;
    int nrows = 0;
    Mat V;
    std::vector<int> pi, pj;
    std::vector<int> rp;
    Vec a, s, g, b; // a: weight of the squared distance in each row
    std::vector<int> slack_rows;
    bool has_t = true;
    double tw = 0.0;
    double ct = 1.0;

    Mat full(const Mat& x) const { return V * x * V.transpose(); }

    // a_p^T F a_p for every pair
    Vec pair_values(const Mat& f) const
    {
        Vec out(npairs);
        for (int p = 0; p < npairs; ++p)
            out(p) = f(pi[p], pi[p]) + f(pj[p], pj[p]) - 2.0 * f(pi[p], pj[p]);
        return out;
    }

    Vec on_rows(const Vec& per_pair) const
    {
        Vec out(nrows);
        for (int r = 0; r < nrows; ++r)
            out(r) = a(r) * per_pair(rp[r]);
        return out;
    }

    Vec sum_to_pairs(const Vec& per_row) const
    {
        Vec out = Vec::Zero(npairs);
        for (int r = 0; r < nrows; ++r)
            out(rp[r]) += a(r) * per_row(r);
        return out;
    }

    // V^T (sum_p v_p a_p a_p^T) V
    Mat adjoint(const Vec& v) const
    {
        Mat lap = Mat::Zero(k, k);
        for (int p = 0; p < npairs; ++p) {
            const int i = pi[p], j = pj[p];
            lap(i, i) += v(p);
            lap(j, j) += v(p);
            lap(i, j) -= v(p);
            lap(j, i) -= v(p);
        }
        return V.transpose() * lap * V;
    }
};

// Largest a with x + a*dx inside the cone (PSD block plus nonnegative entries).
double max_step(const Mat& x, const Mat& dx, const Vec& v, const Vec& dv)
{
    Eigen::LLT<Mat> llt(x);
    if (llt.info() != Eigen::Success)
        return 0.0;
    Mat y = llt.matrixL().solve(dx);
    y = llt.matrixL().solve(y.transpose().eval());
    Eigen::SelfAdjointEigenSolver<Mat> es(sym(y), Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues()(0);
    double a = lo >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lo;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (dv(i) < 0.0)
            a = std::min(a, -v(i) / dv(i));
    return a;
}

struct Iterate {
    Mat X, Z;
    Vec x, z, y; // x, z sized to all rows; entries of equality rows are unused
    double t = 0.0, zt = 0.0;
};

struct Direction {
    Mat dX, dZ;
    Vec dx, dz, dy;
    double dt = 0.0, dzt = 0.0;
};

} // namespace

Result solve(const Problem& p, const Options& opt)
{
    if (p.k < 2)
        throw InvalidArgument("conic problem needs k >= 2");
    if (p.rows.empty())
        throw InvalidArgument("conic problem has no rows");

    Layout L;
    L.k = p.k;
    L.m = p.k - 1;
    L.npairs = static_cast<int>(p.pairs.size());
    L.nrows = static_cast<int>(p.rows.size());
    L.V = centered_basis(p.k);
    L.has_t = p.has_t;
    L.tw = p.trace_weight;
    L.ct = p.has_t ? p.t_weight : 0.0;
    for (auto [i, j] : p.pairs) {
        if (i == j || i < 0 || j < 0 || i >= p.k || j >= p.k)
            throw InvalidArgument("bad pair in conic problem");
        L.pi.push_back(i);
        L.pj.push_back(j);
    }
    L.a.resize(L.nrows);
    L.s.resize(L.nrows);
    L.g.resize(L.nrows);
    L.b.resize(L.nrows);
    for (int r = 0; r < L.nrows; ++r) {
        const Row& row = p.rows[r];
        if (row.pair < 0 || row.pair >= L.npairs)
            throw InvalidArgument("row refers to a missing pair");
        L.rp.push_back(row.pair);
        L.a(r) = row.coef;
        L.s(r) = row.slack;
        L.g(r) = p.has_t ? row.tcoef : 0.0;
        L.b(r) = row.rhs;
        if (row.slack != 0)
            L.slack_rows.push_back(r);
    }

    const int m = L.m;
    const int R = L.nrows;
    const Vec& s = L.s;
    const Vec& g = L.g;
    const Vec& b = L.b;
    const Mat C = L.tw * Mat::Identity(m, m);
    const double bnorm = 1.0 + b.cwiseAbs().maxCoeff();
    const double cnorm = 1.0 + std::max(std::abs(L.ct), std::abs(L.tw));
    const int cone_dim = m + static_cast<int>(L.slack_rows.size()) + (L.has_t ? 1 : 0);

    Iterate it;
    it.X = Mat::Identity(m, m);
    it.Z = Mat::Identity(m, m);
    it.x = Vec::Ones(R);
    it.z = Vec::Ones(R);
    it.y = Vec::Zero(R);
    it.t = L.has_t ? 1.0 : 0.0;
    it.zt = L.has_t ? 1.0 : 0.0;
    if (opt.start) {
        if (opt.start->rows() != p.k || opt.start->cols() != p.k)
            throw InvalidArgument("start matrix has the wrong size");
        // shift the guess into the interior, then size t and the slacks to match it
        Eigen::SelfAdjointEigenSolver<Mat> es(sym(L.V.transpose() * *opt.start * L.V));
        const Vec lam = es.eigenvalues().cwiseMax(0.0);
        const double shift = std::max(0.1 * lam.maxCoeff(), 1e-3);
        it.X = es.eigenvectors() * (lam.array() + shift).matrix().asDiagonal() *
               es.eigenvectors().transpose();
        const Vec e = L.on_rows(L.pair_values(L.full(it.X)));
        if (L.has_t) {
            double need = 0.0;
            for (int r : L.slack_rows)
                if (L.g(r) != 0.0)
                    need = std::max(need, -L.s(r) * (L.b(r) - e(r)) / std::abs(L.g(r)));
            it.t = need + 1.0;
        }
        for (int r : L.slack_rows)
            it.x(r) = std::max(L.s(r) * (L.b(r) - e(r) - L.g(r) * it.t), 1.0);
        // dual start on the central path of that primal point
        double mu0 = it.X.trace() + (L.has_t ? it.t : 0.0);
        for (int r : L.slack_rows)
            mu0 += it.x(r);
        mu0 /= (m + static_cast<int>(L.slack_rows.size()) + (L.has_t ? 1 : 0));
        it.Z = mu0 * sym(it.X.inverse());
        for (int r : L.slack_rows)
            it.z(r) = mu0 / it.x(r);
        if (L.has_t)
            it.zt = mu0 / it.t;
    }

    // residual helpers on the slack rows only
    auto slack_mask = [&](Vec v) {
        Vec out = Vec::Zero(R);
        for (int r : L.slack_rows)
            out(r) = v(r);
        return out;
    };

    Result best;
    best.K = L.full(it.X);
    double best_merit = std::numeric_limits<double>::infinity();
    int since_best = 0;

    Mat S(L.npairs, L.npairs);
    Mat M(R, R);
    Vec D(R), js(R);

    for (int iter = 0;; ++iter) {
        const Mat Xf = L.full(it.X);
        const Vec Rp = b - (L.on_rows(L.pair_values(Xf)) + s.cwiseProduct(it.x) + g * it.t);
        const Mat Rd = sym(C - it.Z - L.adjoint(L.sum_to_pairs(it.y)));
        const Vec Rdl = slack_mask(-it.z - s.cwiseProduct(it.y));
        const double Rdt = L.has_t ? L.ct - it.zt - g.dot(it.y) : 0.0;

        double gap = (it.X.cwiseProduct(it.Z)).sum() + it.t * it.zt;
        for (int r : L.slack_rows)
            gap += it.x(r) * it.z(r);
        const double mu = gap / cone_dim;
        const double pobj = L.tw * it.X.trace() + L.ct * it.t;
        const double dobj = b.dot(it.y);

        Result cur;
        cur.primal_infeasibility = Rp.cwiseAbs().maxCoeff() / bnorm;
        cur.dual_infeasibility =
            std::max({Rd.cwiseAbs().maxCoeff(), Rdl.cwiseAbs().maxCoeff(), std::abs(Rdt)}) / cnorm;
        cur.relative_gap = std::max(gap, 0.0) / (1.0 + std::abs(pobj) + std::abs(dobj));
        cur.iterations = iter;
        const double merit = cur.merit();
        if (std::isfinite(merit) && merit < best_merit) {
            // count as progress only if the merit dropped meaningfully
            if (merit < 0.7 * best_merit)
                since_best = 0;
            else
                ++since_best;
            best_merit = merit;
            best = cur;
            best.K = Xf;
            best.t = it.t;
        } else {
            ++since_best;
        }
        best.iterations = iter;
        if (merit < opt.tol) {
            best.converged = true;
            break;
        }
        if (iter >= opt.max_iter || since_best > 20)
            break;

        // Nesterov-Todd scaling W with W Z W = X
        Eigen::LLT<Mat> lx(it.X), lz(it.Z);
        if (lx.info() != Eigen::Success || lz.info() != Eigen::Success)
            break;
        const Mat Lx = lx.matrixL();
        const Mat Lz = lz.matrixL();
        Eigen::JacobiSVD<Mat> svd(Lz.transpose() * Lx, Eigen::ComputeFullV);
        const Vec sv = svd.singularValues();
        if (sv.minCoeff() <= 0.0)
            break;
        const Mat Gs = Lx * svd.matrixV() * sv.cwiseSqrt().cwiseInverse().asDiagonal();
        const Mat W = Gs * Gs.transpose();
        Mat Zinv = lz.solve(Mat::Identity(m, m));
        Zinv = sym(Zinv);
        const Mat Wf = L.full(W);

        for (int q = 0; q < L.npairs; ++q) {
            const int iq = L.pi[q], jq = L.pj[q];
            for (int pp = 0; pp <= q; ++pp) {
                const int ip = L.pi[pp], jp = L.pj[pp];
                const double gpq = Wf(ip, iq) - Wf(ip, jq) - Wf(jp, iq) + Wf(jp, jq);
                S(pp, q) = S(q, pp) = gpq * gpq;
            }
        }
        const double beta = L.has_t ? it.t / it.zt : 0.0;
        D.setZero();
        for (int r : L.slack_rows)
            D(r) = it.x(r) / it.z(r);
        for (int r = 0; r < R; ++r)
            js(r) = 1.0 / std::sqrt(std::max(L.a(r) * L.a(r) * S(L.rp[r], L.rp[r]) + beta * g(r) * g(r) + D(r), 1e-300));
        auto build_M = [&](double shift) {
            for (int c = 0; c < R; ++c)
                for (int r = 0; r < R; ++r)
                    M(r, c) = js(r) * js(c) * (L.a(r) * L.a(c) * S(L.rp[r], L.rp[c]) + beta * g(r) * g(c));
            M.diagonal() += js.cwiseProduct(js).cwiseProduct(D) + Vec::Constant(R, shift);
        };
        // near the optimum M can lose definiteness to rounding; a tiny shift
        // is absorbed by the refinement steps below
        build_M(0.0);
        Eigen::LLT<Eigen::Ref<Mat>> chol(M);
        for (double shift = 1e-13; chol.info() != Eigen::Success && shift < 1e-5; shift *= 100.0) {
            build_M(shift);
            chol.compute(M);
        }
        if (chol.info() != Eigen::Success)
            break;

        auto apply_M = [&](const Vec& v) {
            Vec out = L.on_rows(S * L.sum_to_pairs(v)) + D.cwiseProduct(v);
            if (L.has_t)
                out += beta * g * g.dot(v);
            return out;
        };
        auto solve_M = [&](const Vec& h) {
            Vec v = js.cwiseProduct(chol.solve(js.cwiseProduct(h)));
            for (int pass = 0; pass < 2; ++pass) {
                const Vec res = h - apply_M(v);
                v += js.cwiseProduct(chol.solve(js.cwiseProduct(res)));
            }
            return v;
        };

        auto direction = [&](double nu, const Mat* cX, const Vec* cl, double ctc) {
            Direction d;
            Mat T = nu * Zinv - it.X - W * Rd * W;
            if (cX)
                T -= *cX;
            T = sym(T);
            Vec Tl = Vec::Zero(R);
            for (int r : L.slack_rows) {
                const double corr = cl ? (*cl)(r) : 0.0;
                Tl(r) = (nu - corr) / it.z(r) - it.x(r) - it.x(r) * Rdl(r) / it.z(r);
            }
            const double Tt =
                L.has_t ? (nu - ctc) / it.zt - it.t - it.t * Rdt / it.zt : 0.0;
            const Vec h = Rp - (L.on_rows(L.pair_values(L.full(T))) + s.cwiseProduct(Tl) + g * Tt);
            d.dy = solve_M(h);
            const Mat Ad = L.adjoint(L.sum_to_pairs(d.dy));
            d.dZ = sym(Rd - Ad);
            d.dz = slack_mask(Rdl - s.cwiseProduct(d.dy));
            d.dzt = L.has_t ? Rdt - g.dot(d.dy) : 0.0;
            d.dX = sym(T + W * Ad * W);
            d.dx = Vec::Zero(R);
            for (int r : L.slack_rows) {
                const double corr = cl ? (*cl)(r) : 0.0;
                d.dx(r) = (nu - corr) / it.z(r) - it.x(r) - it.x(r) * d.dz(r) / it.z(r);
            }
            d.dt = L.has_t ? (nu - ctc) / it.zt - it.t - it.t * d.dzt / it.zt : 0.0;
            return d;
        };

        auto lp_parts = [&](const Vec& v, const Vec& dv, double tv, double dtv) {
            const int n = static_cast<int>(L.slack_rows.size()) + (L.has_t ? 1 : 0);
            Vec a(n), da(n);
            int c = 0;
            for (int r : L.slack_rows) {
                a(c) = v(r);
                da(c++) = dv(r);
            }
            if (L.has_t) {
                a(c) = tv;
                da(c) = dtv;
            }
            return std::make_pair(a, da);
        };
        auto steps = [&](const Direction& d, double frac) {
            auto [xp, dxp] = lp_parts(it.x, d.dx, it.t, d.dt);
            auto [zp, dzp] = lp_parts(it.z, d.dz, it.zt, d.dzt);
            const double ap = std::min(1.0, frac * max_step(it.X, d.dX, xp, dxp));
            const double ad = std::min(1.0, frac * max_step(it.Z, d.dZ, zp, dzp));
            return std::make_pair(ap, ad);
        };

        // Mehrotra predictor-corrector
        const Direction aff = direction(0.0, nullptr, nullptr, 0.0);
        auto [ap0, ad0] = steps(aff, 1.0);
        double gap_aff = ((it.X + ap0 * aff.dX).cwiseProduct(it.Z + ad0 * aff.dZ)).sum() +
                         (it.t + ap0 * aff.dt) * (it.zt + ad0 * aff.dzt);
        for (int r : L.slack_rows)
            gap_aff += (it.x(r) + ap0 * aff.dx(r)) * (it.z(r) + ad0 * aff.dz(r));
        const double sigma = std::clamp(std::pow(std::max(gap_aff, 0.0) / gap, 3.0), 0.0, 1.0);
        // second-order term in the NT-scaled space, where X and Z both become diag(sv)
        const Mat GsInv = sv.cwiseSqrt().asDiagonal() * svd.matrixV().transpose() *
                          Lx.triangularView<Eigen::Lower>().solve(Mat::Identity(m, m));
        const Mat dXs = GsInv * aff.dX * GsInv.transpose();
        const Mat dZs = Gs.transpose() * aff.dZ * Gs;
        Mat H = sym(dXs * dZs);
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < m; ++i)
                H(i, j) *= 2.0 / (sv(i) + sv(j));
        const Mat cX = sym(Gs * H * Gs.transpose());
        const Vec cl = aff.dx.cwiseProduct(aff.dz);
        const Direction dir = direction(sigma * mu, &cX, &cl, aff.dt * aff.dzt);
        auto [ap, ad] = steps(dir, opt.step_fraction);
        if (ap < 1e-12 && ad < 1e-12)
            break;

        it.X = sym(it.X + ap * dir.dX);
        it.x += ap * dir.dx;
        it.t += ap * dir.dt;
        it.Z = sym(it.Z + ad * dir.dZ);
        it.z += ad * dir.dz;
        it.zt += ad * dir.dzt;
        it.y += ad * dir.dy;
    }
    return best;
}

} // namespace mrecon::conic
