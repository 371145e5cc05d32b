// Copyright 2026 The Funnel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "funnel/polytope.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_set>
#include <utility>

namespace funnel {

Polytope Polytope::from_inequalities(Eigen::MatrixXd a_mat,
                                     Eigen::VectorXd b_vec) {
  Polytope p;
  p.A = std::move(a_mat);
  p.b = std::move(b_vec);
  p.E = Eigen::MatrixXd(0, p.A.cols());
  p.f = Eigen::VectorXd(0);
  return p;
}

Polytope Polytope::with_equalities(Eigen::MatrixXd a_mat, Eigen::VectorXd b_vec,
                                   Eigen::MatrixXd e_mat, Eigen::VectorXd f_vec) {
  Polytope p;
  p.A = std::move(a_mat);
  p.b = std::move(b_vec);
  p.E = std::move(e_mat);
  p.f = std::move(f_vec);
  if (p.E.cols() != p.A.cols()) {
    throw DimensionMismatch("equality and inequality blocks disagree on dimension");
  }
  return p;
}

Polytope Polytope::simplex(int d) {
  Polytope p;
  p.A = -Eigen::MatrixXd::Identity(d, d);
  p.b = Eigen::VectorXd::Zero(d);
  p.E = Eigen::MatrixXd::Ones(1, d);
  p.f = Eigen::VectorXd::Ones(1);
  return p;
}

bool contains(const Polytope& p, const Eigen::VectorXd& v, double tol) {
  if (v.size() != p.dim()) throw DimensionMismatch("point dimension mismatch");
  if (p.A.rows() > 0 && ((p.A * v - p.b).array() > tol).any()) return false;
  if (p.E.rows() > 0 && ((p.E * v - p.f).array().abs() > tol).any()) return false;
  return true;
}

namespace {

// Tight-constraint sets as fixed-width bitsets; all sets in one enumeration
// share the same word count.
using Words = std::vector<std::uint64_t>;

int popcount_and(const Words& a, const Words& b) {
  int n = 0;
  for (std::size_t w = 0; w < a.size(); ++w) n += std::popcount(a[w] & b[w]);
  return n;
}

bool subset_of(const Words& sub, const Words& super) {
  for (std::size_t w = 0; w < sub.size(); ++w) {
    if (sub[w] & ~super[w]) return false;
  }
  return true;
}

struct WordsHash {
  std::size_t operator()(const Words& w) const {
    std::size_t h = 0xcbf29ce484222325ull;
    for (std::uint64_t v : w) {
      h ^= v;
      h *= 0x100000001b3ull;
    }
    return h;
  }
};

struct WorkingVertex {
  Eigen::VectorXd t;      // projected coordinates
  Eigen::VectorXd slack;  // b - A t over all rows (real + frame)
  Words tight;            // tight bits among inserted rows
};

struct ProjectedSystem {
  Eigen::MatrixXd rows;   // normalised inequality rows, real rows first
  Eigen::VectorXd rhs;
  int real_rows = 0;      // rows [0, real_rows) are the user's inequalities
  int k = 0;              // projected dimension
  Eigen::MatrixXd lift;   // d x k nullspace basis (orthonormal)
  Eigen::VectorXd offset; // particular solution of the equalities
};

class DoubleDescription {
 public:
  DoubleDescription(const ProjectedSystem& sys, const EnumerationOptions& opt)
      : sys_(sys), opt_(opt) {
    total_rows_ = static_cast<int>(sys_.rows.rows());
    words_ = static_cast<std::size_t>((total_rows_ + 63) / 64);
  }

  std::vector<Eigen::VectorXd> run();

 private:
  void seed_frame();
  void insert(int row);
  void mark_tight_only(int row);
  Eigen::VectorXd slack_vector(const Eigen::VectorXd& t) const {
    return sys_.rhs - sys_.rows * t;
  }
  Words tight_bits(const Eigen::VectorXd& slack) const;
  void check_budget(std::size_t n) const;
  std::vector<Eigen::VectorXd> finalize();

  const ProjectedSystem& sys_;
  EnumerationOptions opt_;
  int total_rows_ = 0;
  std::size_t words_ = 0;
  std::vector<WorkingVertex> verts_;
  std::vector<char> inserted_;
};

Words DoubleDescription::tight_bits(const Eigen::VectorXd& slack) const {
  Words bits(words_, 0);
  for (int j = 0; j < total_rows_; ++j) {
    if (inserted_[j] && std::abs(slack(j)) <= opt_.feas_tol) {
      bits[j / 64] |= (1ull << (j % 64));
    }
  }
  return bits;
}

void DoubleDescription::check_budget(std::size_t n) const {
  if (n > opt_.max_vertices) {
    throw BudgetExceeded("vertex budget of " + std::to_string(opt_.max_vertices) +
                         " exceeded during enumeration");
  }
}

void DoubleDescription::seed_frame() {
  const int k = sys_.k;
  const double r = opt_.frame_radius;
  inserted_.assign(total_rows_, 0);
  // Frame rows sit after the real rows: -t_i <= R for each i, then
  // sum(t) <= k R. Their k+1 intersection vertices enclose the ball of
  // radius R around the origin of the projected coordinates.
  for (int j = sys_.real_rows; j < total_rows_; ++j) inserted_[j] = 1;

  verts_.clear();
  WorkingVertex corner;
  corner.t = Eigen::VectorXd::Constant(k, -r);
  corner.slack = slack_vector(corner.t);
  corner.tight = tight_bits(corner.slack);
  verts_.push_back(std::move(corner));
  for (int i = 0; i < k; ++i) {
    WorkingVertex apex;
    apex.t = Eigen::VectorXd::Constant(k, -r);
    apex.t(i) = (2.0 * k - 1.0) * r;
    apex.slack = slack_vector(apex.t);
    apex.tight = tight_bits(apex.slack);
    verts_.push_back(std::move(apex));
  }
}

void DoubleDescription::mark_tight_only(int row) {
  inserted_[row] = 1;
  for (auto& v : verts_) {
    if (std::abs(v.slack(row)) <= opt_.feas_tol) {
      v.tight[row / 64] |= (1ull << (row % 64));
    }
  }
}

void DoubleDescription::insert(int row) {
  const double tol = opt_.feas_tol;
  std::vector<int> in, on, out;
  in.reserve(verts_.size());
  for (int i = 0; i < static_cast<int>(verts_.size()); ++i) {
    const double s = verts_[i].slack(row);
    if (s > tol) {
      in.push_back(i);
    } else if (s < -tol) {
      out.push_back(i);
    } else {
      on.push_back(i);
    }
  }
  inserted_[row] = 1;
  if (out.empty()) {
    for (int i : on) verts_[i].tight[row / 64] |= (1ull << (row % 64));
    return;
  }
  if (in.empty() && on.empty()) {
    throw EmptyPolytope("all vertices violate an inequality; feasible set is empty");
  }

  // Tight sets of kept vertices after this cut, used to drop candidate
  // duplicates in degenerate configurations.
  std::unordered_set<Words, WordsHash> seen;
  for (int i : on) {
    verts_[i].tight[row / 64] |= (1ull << (row % 64));
    seen.insert(verts_[i].tight);
  }

  std::vector<WorkingVertex> created;
  const int need = sys_.k - 1;
  for (int qi : out) {
    const WorkingVertex& q = verts_[qi];
    for (int pi : in) {
      const WorkingVertex& p = verts_[pi];
      if (popcount_and(p.tight, q.tight) < need) continue;
      // Combinatorial adjacency: p,q span an edge iff no other vertex is
      // tight on all rows both share.
      Words common(words_);
      for (std::size_t w = 0; w < words_; ++w) common[w] = p.tight[w] & q.tight[w];
      bool adjacent = true;
      for (int ri = 0; ri < static_cast<int>(verts_.size()); ++ri) {
        if (ri == pi || ri == qi) continue;
        if (subset_of(common, verts_[ri].tight)) {
          adjacent = false;
          break;
        }
      }
      if (!adjacent) continue;

      const double sp = p.slack(row);
      const double sq = q.slack(row);
      const double lambda = sp / (sp - sq);
      WorkingVertex w;
      w.t = p.t + lambda * (q.t - p.t);
      w.slack = slack_vector(w.t);
      w.slack(row) = 0.0;
      w.tight = tight_bits(w.slack);
      if (seen.insert(w.tight).second) {
        created.push_back(std::move(w));
        check_budget(in.size() + on.size() + created.size());
      }
    }
  }

  std::vector<WorkingVertex> next;
  next.reserve(in.size() + on.size() + created.size());
  for (int i : in) next.push_back(std::move(verts_[i]));
  for (int i : on) next.push_back(std::move(verts_[i]));
  for (auto& w : created) next.push_back(std::move(w));
  verts_ = std::move(next);
  if (verts_.empty()) {
    throw EmptyPolytope("no vertex survived an inequality; feasible set is empty");
  }
}

std::vector<Eigen::VectorXd> DoubleDescription::finalize() {
  const int k = sys_.k;
  const double tol = opt_.feas_tol;

  // Any vertex still resting on the artificial frame means the true
  // feasible set escapes it.
  for (const auto& v : verts_) {
    for (int j = sys_.real_rows; j < total_rows_; ++j) {
      if (v.slack(j) <= tol) {
        throw UnboundedPolytope(
            "feasible set touches the enumeration frame (radius " +
            std::to_string(opt_.frame_radius) +
            "); polytope is unbounded or exceeds the frame");
      }
    }
  }

  std::vector<Eigen::VectorXd> points;
  points.reserve(verts_.size());
  for (auto& v : verts_) {
    std::vector<int> tight_rows;
    for (int j = 0; j < sys_.real_rows; ++j) {
      if (std::abs(v.slack(j)) <= tol) tight_rows.push_back(j);
    }
    if (static_cast<int>(tight_rows.size()) < k) continue;
    Eigen::MatrixXd at(tight_rows.size(), k);
    Eigen::VectorXd bt(tight_rows.size());
    for (std::size_t i = 0; i < tight_rows.size(); ++i) {
      at.row(i) = sys_.rows.row(tight_rows[i]);
      bt(i) = sys_.rhs(tight_rows[i]);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(at);
    qr.setThreshold(1e-8);
    if (qr.rank() < k) continue;  // interior of a face, not a vertex
    // Re-solve the tight system to shed interpolation drift; keep the
    // polished point only if it stays feasible.
    Eigen::VectorXd polished = qr.solve(bt);
    Eigen::VectorXd s = slack_vector(polished);
    bool ok = true;
    for (int j = 0; j < total_rows_; ++j) {
      if (s(j) < -tol) {
        ok = false;
        break;
      }
    }
    points.push_back(ok ? polished : v.t);
  }

  std::sort(points.begin(), points.end(),
            [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
              for (Eigen::Index i = 0; i < a.size(); ++i) {
                if (a(i) != b(i)) return a(i) < b(i);
              }
              return false;
            });
  std::vector<Eigen::VectorXd> unique;
  for (auto& pt : points) {
    bool dup = false;
    for (auto it = unique.rbegin(); it != unique.rend(); ++it) {
      if (pt(0) - (*it)(0) > opt_.dedupe_tol) break;
      if (((*it) - pt).lpNorm<Eigen::Infinity>() <= opt_.dedupe_tol) {
        dup = true;
        break;
      }
    }
    if (!dup) unique.push_back(std::move(pt));
  }
  return unique;
}

std::vector<Eigen::VectorXd> DoubleDescription::run() {
  seed_frame();

  const int n = sys_.real_rows;
  std::vector<int> remaining(n);
  std::iota(remaining.begin(), remaining.end(), 0);
  std::vector<long long> violations(n, 0);
  for (int j : remaining) {
    for (const auto& v : verts_) {
      if (v.slack(j) < -opt_.feas_tol) ++violations[j];
    }
  }

  while (!remaining.empty()) {
    auto best = std::max_element(
        remaining.begin(), remaining.end(),
        [&](int a, int b) { return violations[a] < violations[b]; });
    const int row = *best;
    if (violations[row] == 0) {
      // Remaining rows cut nothing now and never will: new points are convex
      // combinations of current ones. Record tightness and stop cutting.
      for (int j : remaining) mark_tight_only(j);
      break;
    }
    remaining.erase(best);

    // Update violation counts incrementally: subtract exiting vertices now,
    // add newly created ones after the cut. insert() rebuilds verts_ as
    // [in..., on..., created...], so survivors occupy the leading slots.
    std::size_t survivors = 0;
    for (const auto& v : verts_) {
      if (v.slack(row) < -opt_.feas_tol) {
        for (int j : remaining) {
          if (v.slack(j) < -opt_.feas_tol) --violations[j];
        }
      } else {
        ++survivors;
      }
    }
    insert(row);
    for (std::size_t i = survivors; i < verts_.size(); ++i) {
      for (int j : remaining) {
        if (verts_[i].slack(j) < -opt_.feas_tol) ++violations[j];
      }
    }
  }

  return finalize();
}

ProjectedSystem project_equalities(const Polytope& p, const EnumerationOptions& opt) {
  const int d = p.dim();
  if (d < 1) throw DimensionMismatch("polytope dimension must be >= 1");

  ProjectedSystem sys;
  if (p.E.rows() == 0) {
    sys.lift = Eigen::MatrixXd::Identity(d, d);
    sys.offset = Eigen::VectorXd::Zero(d);
    sys.k = d;
  } else {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        p.E, Eigen::ComputeFullV | Eigen::ComputeThinU);
    const double smax = svd.singularValues().size() > 0
                            ? svd.singularValues()(0)
                            : 0.0;
    const double rank_tol =
        std::max(p.E.rows(), p.E.cols()) *
        std::numeric_limits<double>::epsilon() * std::max(smax, 1.0);
    int rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
      if (svd.singularValues()(i) > rank_tol) ++rank;
    }
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(svd.singularValues().size());
    for (int i = 0; i < rank; ++i) inv(i) = 1.0 / svd.singularValues()(i);
    sys.offset = svd.matrixV().leftCols(inv.size()) * inv.asDiagonal() *
                 (svd.matrixU().transpose() * p.f);
    const double residual = (p.E * sys.offset - p.f).lpNorm<Eigen::Infinity>();
    if (residual > opt.feas_tol * std::max(1.0, p.f.lpNorm<Eigen::Infinity>())) {
      throw EmptyPolytope("equality constraints are inconsistent");
    }
    sys.k = d - rank;
    sys.lift = svd.matrixV().rightCols(sys.k);
  }

  // Project inequalities, normalise rows to unit max coefficient, and drop
  // vacuous constant rows.
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> rhs;
  if (p.A.rows() > 0) {
    Eigen::MatrixXd projected = p.A * sys.lift;
    Eigen::VectorXd shifted = p.b - p.A * sys.offset;
    for (Eigen::Index i = 0; i < projected.rows(); ++i) {
      const double scale = projected.row(i).lpNorm<Eigen::Infinity>();
      if (scale < 1e-14) {
        if (shifted(i) < -opt.feas_tol) {
          throw EmptyPolytope("an inequality is infeasible on the equality subspace");
        }
        continue;
      }
      rows.push_back(projected.row(i).transpose() / scale);
      rhs.push_back(shifted(i) / scale);
    }
  }

  sys.real_rows = static_cast<int>(rows.size());
  const int k = sys.k;
  const int frame_rows = k > 0 ? k + 1 : 0;
  sys.rows = Eigen::MatrixXd(sys.real_rows + frame_rows, std::max(k, 1));
  sys.rhs = Eigen::VectorXd(sys.real_rows + frame_rows);
  if (k > 0) {
    sys.rows.setZero();
    for (int i = 0; i < sys.real_rows; ++i) {
      sys.rows.row(i) = rows[i].transpose();
      sys.rhs(i) = rhs[i];
    }
    for (int i = 0; i < k; ++i) {
      sys.rows(sys.real_rows + i, i) = -1.0;
      sys.rhs(sys.real_rows + i) = opt.frame_radius;
    }
    sys.rows.row(sys.real_rows + k).setOnes();
    sys.rhs(sys.real_rows + k) = static_cast<double>(k) * opt.frame_radius;
  }
  return sys;
}

}  // namespace

VertexSet enumerate_vertices(const Polytope& p, const EnumerationOptions& options) {
  ProjectedSystem sys = project_equalities(p, options);

  VertexSet out;
  out.dedupe_tol = options.dedupe_tol;

  if (sys.k == 0) {
    // Equalities pin a single point; it is the unique vertex iff feasible.
    Eigen::VectorXd v = sys.offset;
    if (!contains(p, v, options.feas_tol)) {
      throw EmptyPolytope("equality solution violates the inequalities");
    }
    out.points.push_back(std::move(v));
    return out;
  }

  DoubleDescription dd(sys, options);
  std::vector<Eigen::VectorXd> projected = dd.run();
  out.points.reserve(projected.size());
  for (const auto& t : projected) {
    Eigen::VectorXd v = sys.offset + sys.lift * t;
    if (!v.allFinite()) {
      throw UnboundedPolytope("non-finite vertex after lifting");
    }
    out.points.push_back(std::move(v));
  }
  return out;
}

}  // namespace funnel
