#include "mrecon/topology.hpp"

#include "mrecon/embedding.hpp"
#include "mrecon/errors.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <unordered_map>

namespace mrecon {

namespace {

Ball ball_through(const PointCloud& pts, const std::vector<int>& R)
{
    Ball b;
    if (R.empty()) {
        b.radius = -1.0;
        return b;
    }
    const Eigen::VectorXd p0 = pts.point(R[0]);
    if (R.size() == 1) {
        b.center = p0;
        return b;
    }
    if (R.size() == 2) {
        const Eigen::VectorXd p1 = pts.point(R[1]);
        b.center = 0.5 * (p0 + p1);
        b.radius = 0.5 * (p1 - p0).norm();
        return b;
    }
    // circumcenter inside the affine hull of R
    const int m = static_cast<int>(R.size()) - 1;
    Eigen::MatrixXd A(pts.dim(), m);
    for (int c = 0; c < m; ++c)
        A.col(c) = pts.point(R[c + 1]) - p0;
    const Eigen::MatrixXd G = A.transpose() * A;
    const Eigen::VectorXd rhs = 0.5 * G.diagonal();
    const Eigen::VectorXd lam = G.completeOrthogonalDecomposition().solve(rhs);
    b.center = p0 + A * lam;
    b.radius = 0.0;
    for (int v : R)
        b.radius = std::max(b.radius, (pts.point(v) - b.center).norm());
    return b;
}

bool inside(const Ball& b, const Eigen::VectorXd& p)
{
    if (b.radius < 0.0)
        return false;
    return (p - b.center).norm() <= b.radius + 1e-12 * std::max(1.0, b.radius);
}

Ball welzl(const PointCloud& pts, std::vector<int>& P, std::size_t n, std::vector<int>& R)
{
    if (n == 0 || R.size() == static_cast<std::size_t>(pts.dim()) + 1)
        return ball_through(pts, R);
    const int p = P[n - 1];
    Ball b = welzl(pts, P, n - 1, R);
    if (inside(b, pts.point(p)))
        return b;
    R.push_back(p);
    b = welzl(pts, P, n - 1, R);
    R.pop_back();
    return b;
}

using Column = std::vector<std::pair<long, mpz_class>>; // sorted by row

void make_primitive(Column& col)
{
    mpz_class g = 0;
    for (auto& e : col)
        g = gcd(g, e.second);
    if (g > 1)
        for (auto& e : col)
            e.second /= g;
}

// col_j <- a col_j - b col_i, where a, b cancel the shared pivot
void eliminate(Column& cj, const Column& ci)
{
    const mpz_class a = ci.back().second;
    const mpz_class b = cj.back().second;
    Column out;
    out.reserve(cj.size() + ci.size());
    std::size_t x = 0, y = 0;
    while (x < cj.size() || y < ci.size()) {
        if (y == ci.size() || (x < cj.size() && cj[x].first < ci[y].first)) {
            out.emplace_back(cj[x].first, a * cj[x].second);
            ++x;
        } else if (x == cj.size() || ci[y].first < cj[x].first) {
            out.emplace_back(ci[y].first, -b * ci[y].second);
            ++y;
        } else {
            mpz_class v = a * cj[x].second - b * ci[y].second;
            if (v != 0)
                out.emplace_back(cj[x].first, std::move(v));
            ++x;
            ++y;
        }
    }
    make_primitive(out);
    cj = std::move(out);
}

} // namespace

Ball min_enclosing_ball(const PointCloud& points, const std::vector<int>& subset)
{
    if (subset.empty())
        throw InvalidArgument("enclosing ball of an empty set");
    for (int v : subset)
        if (v < 0 || v >= points.count())
            throw InvalidArgument("subset index out of range");
    std::vector<int> P = subset;
    std::vector<int> R;
    return welzl(points, P, P.size(), R);
}

std::size_t SimplicialComplex::size() const
{
    std::size_t n = 0;
    for (const auto& layer : by_dim)
        n += layer.size();
    return n;
}

bool SimplicialComplex::contains(const std::vector<int>& vertices) const
{
    if (vertices.empty())
        return false;
    const std::size_t p = vertices.size() - 1;
    if (p >= by_dim.size())
        return false;
    const auto& layer = by_dim[p];
    auto it = std::lower_bound(layer.begin(), layer.end(), vertices,
                               [](const Simplex& s, const std::vector<int>& v) {
                                   return s.vertices < v;
                               });
    return it != layer.end() && it->vertices == vertices;
}

SimplicialComplex cech_complex(const PointCloud& landmarks, double r, int p_max)
{
    if (!(r > 0.0))
        throw InvalidArgument("radius must be positive");
    if (p_max < 1)
        throw InvalidArgument("p_max must be at least 1");
    const int L = static_cast<int>(landmarks.count());
    if (L < 1)
        throw InvalidArgument("need at least one landmark");

    SimplicialComplex c;
    c.vertex_count = L;
    c.p_max = p_max;
    c.r = r;
    c.by_dim.assign(p_max + 1, {});
    for (int v = 0; v < L; ++v)
        c.by_dim[0].push_back({{v}, 0.0});

    // Rips precondition: every pair within 2r
    std::vector<std::vector<char>> near(L, std::vector<char>(L, 0));
    for (int i = 0; i < L; ++i)
        for (int j = i + 1; j < L; ++j)
            near[i][j] = near[j][i] =
                (landmarks.coords.row(i) - landmarks.coords.row(j)).norm() <= 2.0 * r;

    for (int p = 1; p <= p_max; ++p) {
        for (const Simplex& s : c.by_dim[p - 1]) {
            for (int v = s.vertices.back() + 1; v < L; ++v) {
                bool ok = true;
                for (int u : s.vertices)
                    if (!near[u][v]) {
                        ok = false;
                        break;
                    }
                if (!ok)
                    continue;
                std::vector<int> cand = s.vertices;
                cand.push_back(v);
                const Ball b = min_enclosing_ball(landmarks, cand);
                if (b.radius <= r)
                    c.by_dim[p].push_back({std::move(cand), b.radius});
            }
        }
        // parents are visited in lexicographic order, so each layer is already sorted
    }
    return c;
}

long boundary_rank(const SimplicialComplex& c, int p)
{
    if (p <= 0 || p >= static_cast<int>(c.by_dim.size()))
        return 0;
    const auto& faces = c.by_dim[p - 1];
    std::map<std::vector<int>, long> index;
    for (std::size_t i = 0; i < faces.size(); ++i)
        index.emplace(faces[i].vertices, static_cast<long>(i));

    std::unordered_map<long, std::size_t> owner; // pivot row -> reduced column
    std::vector<Column> reduced;
    long rank = 0;
    for (const Simplex& s : c.by_dim[p]) {
        Column col;
        for (std::size_t drop = 0; drop < s.vertices.size(); ++drop) {
            std::vector<int> f;
            for (std::size_t q = 0; q < s.vertices.size(); ++q)
                if (q != drop)
                    f.push_back(s.vertices[q]);
            col.emplace_back(index.at(f), drop % 2 == 0 ? 1 : -1);
        }
        std::sort(col.begin(), col.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        while (!col.empty()) {
            auto it = owner.find(col.back().first);
            if (it == owner.end())
                break;
            eliminate(col, reduced[it->second]);
        }
        if (!col.empty()) {
            owner.emplace(col.back().first, reduced.size());
            reduced.push_back(std::move(col));
            ++rank;
        }
    }
    return rank;
}

BettiVector betti(const SimplicialComplex& c)
{
    BettiVector out;
    const int top = static_cast<int>(c.by_dim.size()) - 1;
    std::vector<long> rk(top + 2, 0);
    for (int p = 1; p <= top; ++p)
        rk[p] = boundary_rank(c, p);
    for (int p = 0; p < std::max(top, 1); ++p) {
        const long np = p <= top ? static_cast<long>(c.by_dim[p].size()) : 0;
        out.betti.push_back(np - rk[p] - rk[p + 1]);
    }
    return out;
}

SandwichReport sandwich_check(const PointCloud& landmarks_M, const PointCloud& landmarks_S,
                              double sigma, const ReachConstants& consts, int p_max)
{
    if (landmarks_M.count() != landmarks_S.count())
        throw InvalidArgument("landmark sets must share one index set");
    SandwichReport rep;
    rep.sigma = sigma;
    rep.sigma_prime = sigma_prime(sigma, consts);
    rep.sigma_double_prime = sigma_double_prime(sigma, consts);
    const SimplicialComplex inner = cech_complex(landmarks_M, rep.sigma_double_prime, p_max);
    const SimplicialComplex middle = cech_complex(landmarks_S, sigma, p_max);
    const SimplicialComplex outer = cech_complex(landmarks_M, rep.sigma_prime, p_max);
    rep.inner_size = inner.size();
    rep.middle_size = middle.size();
    rep.outer_size = outer.size();
    for (const auto& layer : inner.by_dim)
        for (const Simplex& s : layer)
            if (rep.inner_ok && !middle.contains(s.vertices)) {
                rep.inner_ok = false;
                rep.inner_witness = s.vertices;
            }
    for (const auto& layer : middle.by_dim)
        for (const Simplex& s : layer)
            if (rep.outer_ok && !outer.contains(s.vertices)) {
                rep.outer_ok = false;
                rep.outer_witness = s.vertices;
            }
    return rep;
}

Landmarks farthest_point_landmarks(const DistanceMatrix& d, int count)
{
    const int k = static_cast<int>(d.size());
    if (count < 1 || count > k)
        throw InvalidArgument("landmark count must lie in [1, k]");
    Landmarks out;
    std::vector<double> gap(k, std::numeric_limits<double>::infinity());
    int next = 0;
    for (int c = 0; c < count; ++c) {
        out.indices.push_back(next);
        for (int i = 0; i < k; ++i)
            gap[i] = std::min(gap[i], d(i, next));
        next = static_cast<int>(std::max_element(gap.begin(), gap.end()) - gap.begin());
    }
    out.delta = *std::max_element(gap.begin(), gap.end());
    return out;
}

Recovery recover_topology(const DistanceMatrix& d, const ReachConstants& consts,
                          const RecoveryOptions& opts)
{
    Recovery out;
    out.radius = cech_radius_check(opts.sigma, consts, opts.eps);
    if (!out.radius.pass)
        throw InvalidArgument("sigma fails the Cech radius conditions");
    out.landmarks = farthest_point_landmarks(d, opts.landmark_count);
    // rho(delta) = (1 + c1 delta) delta must not exceed sigma'
    const double sp = out.radius.sigma_prime;
    const double required = 2.0 * sp / (1.0 + std::sqrt(1.0 + 4.0 * consts.c1 * sp));
    if ((1.0 + consts.c1 * out.landmarks.delta) * out.landmarks.delta > sp)
        throw NetTooCoarse(out.landmarks.delta, required);

    SdpProblem prob;
    try {
        prob = build_problem(d, opts.eps, consts.c2);
    } catch (const Error& e) {
        throw StageError("build_problem", e.what());
    }
    try {
        out.solution = solve(prob, opts.solver);
    } catch (const Error& e) {
        throw StageError("solve", e.what());
    }
    const Certificate cert = certify(prob, out.solution);
    if (!out.solution.converged || !cert.passes(opts.solver.tol))
        throw StageError("certify", "solution is not certified at tol " +
                                        std::to_string(opts.solver.tol));
    const int n = opts.n > 0 ? opts.n : static_cast<int>(d.size());
    try {
        out.recovered = gram_to_points(out.solution.gram, n).points;
    } catch (const Error& e) {
        throw StageError("gram_to_points", e.what());
    }
    Eigen::MatrixXd lm(out.landmarks.indices.size(), out.recovered.dim());
    for (std::size_t i = 0; i < out.landmarks.indices.size(); ++i)
        lm.row(i) = out.recovered.coords.row(out.landmarks.indices[i]);
    out.betti = betti(cech_complex(PointCloud(lm), opts.sigma, opts.p_max));
    return out;
}

BettiVector recover_betti(const DistanceMatrix& d, int landmark_count, double sigma, double eps,
                          const ReachConstants& consts, int p_max, const SolverConfig& cfg)
{
    RecoveryOptions o;
    o.landmark_count = landmark_count;
    o.sigma = sigma;
    o.eps = eps;
    o.p_max = p_max;
    o.solver = cfg;
    return recover_topology(d, consts, o).betti;
}

} // namespace mrecon
