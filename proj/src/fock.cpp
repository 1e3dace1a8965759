#include "vibroq/fock.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "vibroq/errors.hpp"
#include "vibroq/thermo.hpp"

namespace vibroq::fock {

namespace {

constexpr Complex kI{0.0, 1.0};

Eigen::Matrix2d coupling_profile(double eps) {
  Eigen::Matrix2d r;
  r << 1.0, eps, eps, 2.0;
  return r;
}

// Truncated single-mode lowering operator embedded in the product space.
Eigen::MatrixXcd lowering(int cutoff, int mode) {
  const int k = cutoff + 1;
  const int dim = k * k;
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n1 = 0; n1 <= cutoff; ++n1) {
    for (int n2 = 0; n2 <= cutoff; ++n2) {
      const int src = n1 * k + n2;
      if (mode == 0 && n1 >= 1) {
        a((n1 - 1) * k + n2, src) = std::sqrt(double(n1));
      }
      if (mode == 1 && n2 >= 1) {
        a(n1 * k + (n2 - 1), src) = std::sqrt(double(n2));
      }
    }
  }
  return a;
}

struct Term {
  int src;
  Complex coef;
};

// Enumerates every generator contribution to the output element
// (row m = (m1,m2), col n = (n1,n2)). Compositions of two ladder operators
// are those of the truncated operators, so intermediate states outside the
// box drop the term; this keeps the generator exactly trace preserving.
template <typename Emit>
void enumerate_terms(const Generator& g, int m1, int m2, int n1, int n2, Emit&& emit) {
  const int c = g.cutoff;
  const int k = c + 1;
  const int dim = k * k;
  const auto idx = [k, dim](int r1, int r2, int q1, int q2) {
    return (q1 * k + q2) * dim + (r1 * k + r2);
  };
  const auto sq = [](int v) { return std::sqrt(double(v)); };

  if (g.include_hamiltonian) {
    const double de = g.w1 * (n1 - m1) + g.w2 * (n2 - m2);
    if (de != 0.0) {
      emit(idx(m1, m2, n1, n2), kI * de);
    }
    if (n1 + 1 <= c && n2 >= 1) {
      emit(idx(m1, m2, n1 + 1, n2 - 1), kI * (g.u * sq(n1 + 1) * sq(n2)));
    }
    if (n1 >= 1 && n2 + 1 <= c) {
      emit(idx(m1, m2, n1 - 1, n2 + 1), kI * (g.u * sq(n1) * sq(n2 + 1)));
    }
    if (m1 >= 1 && m2 + 1 <= c) {
      emit(idx(m1 - 1, m2 + 1, n1, n2), -kI * (g.u * sq(m1) * sq(m2 + 1)));
    }
    if (m1 + 1 <= c && m2 >= 1) {
      emit(idx(m1 + 1, m2 - 1, n1, n2), -kI * (g.u * sq(m1 + 1) * sq(m2)));
    }
  }

  const int m[2] = {m1, m2};
  const int n[2] = {n1, n2};
  for (int j = 0; j < 2; ++j) {
    for (int p = 0; p < 2; ++p) {
      const double a = g.decay(j, p);
      const double b = g.pump(j, p);
      int e[2];

      if (a != 0.0) {
        // a_p rho a_j^dag
        if (m[p] + 1 <= c && n[j] + 1 <= c) {
          e[0] = m1 + (p == 0);
          e[1] = m2 + (p == 1);
          const int r1 = e[0], r2 = e[1];
          e[0] = n1 + (j == 0);
          e[1] = n2 + (j == 1);
          emit(idx(r1, r2, e[0], e[1]), a * sq(m[p] + 1) * sq(n[j] + 1));
        }
        // -1/2 a_j^dag a_p rho, source row m + e_p - e_j
        {
          const int k1 = m1 + (p == 0) - (j == 0);
          const int k2 = m2 + (p == 1) - (j == 1);
          if (k1 >= 0 && k1 <= c && k2 >= 0 && k2 <= c) {
            const int kp = (p == 0) ? k1 : k2;
            const int kj = (j == 0) ? k1 : k2;
            const double coef = sq(kp) * sq(kj + 1 - (j == p));
            if (coef != 0.0) {
              emit(idx(k1, k2, n1, n2), -0.5 * a * coef);
            }
          }
        }
        // -1/2 rho a_j^dag a_p, source col n + e_j - e_p
        {
          const int k1 = n1 + (j == 0) - (p == 0);
          const int k2 = n2 + (j == 1) - (p == 1);
          if (k1 >= 0 && k1 <= c && k2 >= 0 && k2 <= c) {
            const double coef = sq(n[p]) * sq(n[j] + 1 - (j == p));
            if (coef != 0.0) {
              emit(idx(m1, m2, k1, k2), -0.5 * a * coef);
            }
          }
        }
      }

      if (b != 0.0) {
        // a_p^dag rho a_j
        if (m[p] >= 1 && n[j] >= 1) {
          emit(idx(m1 - (p == 0), m2 - (p == 1), n1 - (j == 0), n2 - (j == 1)),
               b * sq(m[p]) * sq(n[j]));
        }
        // -1/2 a_j a_p^dag rho, source row m - e_p + e_j; the intermediate
        // raise must stay in the box (k_p + 1 <= c)
        {
          const int k1 = m1 - (p == 0) + (j == 0);
          const int k2 = m2 - (p == 1) + (j == 1);
          if (k1 >= 0 && k1 <= c && k2 >= 0 && k2 <= c) {
            const int kp = (p == 0) ? k1 : k2;
            const int kj = (j == 0) ? k1 : k2;
            if (kp + 1 <= c) {
              const double coef = sq(kp + 1) * sq(kj + (j == p));
              if (coef != 0.0) {
                emit(idx(k1, k2, n1, n2), -0.5 * b * coef);
              }
            }
          }
        }
        // -1/2 rho a_j a_p^dag, source col n + e_p - e_j
        {
          if (n[p] + 1 <= c) {
            const int k1 = n1 + (p == 0) - (j == 0);
            const int k2 = n2 + (p == 1) - (j == 1);
            if (k1 >= 0 && k1 <= c && k2 >= 0 && k2 <= c) {
              const double coef = sq(n[p] + 1) * sq(n[j] + (j == p));
              if (coef != 0.0) {
                emit(idx(m1, m2, k1, k2), -0.5 * b * coef);
              }
            }
          }
        }
      }
    }
  }
}

}

FockDensityMatrix FockDensityMatrix::vacuum(int cutoff) {
  if (cutoff < 1) {
    throw std::invalid_argument("FockDensityMatrix: cutoff must be >= 1");
  }
  FockDensityMatrix f;
  f.cutoff = cutoff;
  f.rho = Eigen::MatrixXcd::Zero(f.dim(), f.dim());
  f.rho(0, 0) = 1.0;
  return f;
}

Generator make_generator(const PhysicalParams& p, int cutoff, bool secular) {
  p.validate();
  if (cutoff < 1) {
    throw std::invalid_argument("make_generator: cutoff must be >= 1");
  }
  const Eigen::Matrix2d m = model::bath_diffusion(p, 1) + model::bath_diffusion(p, 2);
  Generator g;
  g.cutoff = cutoff;
  g.w1 = p.omega1();
  g.w2 = p.omega2();
  g.u = p.u();
  g.pump = 2.0 * p.gamma_psinv * m;
  g.decay = g.pump + 2.0 * p.gamma_psinv * coupling_profile(p.adiabatic);
  if (secular) {
    g.pump(0, 1) = g.pump(1, 0) = 0.0;
    g.decay(0, 1) = g.decay(1, 0) = 0.0;
  }
  return g;
}

Generator make_bath_generator(const PhysicalParams& p, int cutoff, int bath, bool secular) {
  p.validate();
  if (cutoff < 1) {
    throw std::invalid_argument("make_bath_generator: cutoff must be >= 1");
  }
  Generator g;
  g.cutoff = cutoff;
  g.w1 = p.omega1();
  g.w2 = p.omega2();
  g.u = p.u();
  g.include_hamiltonian = false;
  g.pump = 2.0 * p.gamma_psinv * model::bath_diffusion(p, bath);
  g.decay = g.pump + 2.0 * model::bath_drift(p, bath).cast<double>();
  if (secular) {
    g.pump(0, 1) = g.pump(1, 0) = 0.0;
    g.decay(0, 1) = g.decay(1, 0) = 0.0;
  }
  return g;
}

void lindblad_rhs_reference(const Generator& g, const Eigen::MatrixXcd& rho,
                            Eigen::MatrixXcd& drho) {
  const int dim = (g.cutoff + 1) * (g.cutoff + 1);
  if (rho.rows() != dim || rho.cols() != dim) {
    throw std::invalid_argument("lindblad_rhs_reference: dimension mismatch");
  }
  const Eigen::MatrixXcd a[2] = {lowering(g.cutoff, 0), lowering(g.cutoff, 1)};
  drho = Eigen::MatrixXcd::Zero(dim, dim);

  if (g.include_hamiltonian) {
    Eigen::MatrixXcd h = g.w1 * (a[0].adjoint() * a[0]) + g.w2 * (a[1].adjoint() * a[1]) +
                         g.u * (a[0].adjoint() * a[1] + a[1].adjoint() * a[0]);
    drho += kI * (rho * h - h * rho);
  }
  for (int j = 0; j < 2; ++j) {
    for (int p = 0; p < 2; ++p) {
      if (g.decay(j, p) != 0.0) {
        const Eigen::MatrixXcd num = a[j].adjoint() * a[p];
        drho += g.decay(j, p) *
                (a[p] * rho * a[j].adjoint() - 0.5 * (num * rho + rho * num));
      }
      if (g.pump(j, p) != 0.0) {
        const Eigen::MatrixXcd rev = a[j] * a[p].adjoint();
        drho += g.pump(j, p) *
                (a[p].adjoint() * rho * a[j] - 0.5 * (rev * rho + rho * rev));
      }
    }
  }
}

CompiledGenerator::CompiledGenerator(const Generator& g) {
  const int k = g.cutoff + 1;
  dim_ = k * k;
  const int rows = dim_ * dim_;

  row_ptr_re_.assign(rows + 1, 0);
  row_ptr_im_.assign(rows + 1, 0);
  std::vector<Term> terms;
  terms.reserve(32);

  // two passes: count, then fill
  for (int pass = 0; pass < 2; ++pass) {
    for (int q = 0; q < dim_; ++q) {
      const int n1 = q / k;
      const int n2 = q % k;
      for (int r = 0; r < dim_; ++r) {
        const int m1 = r / k;
        const int m2 = r % k;
        const int out = q * dim_ + r;

        terms.clear();
        enumerate_terms(g, m1, m2, n1, n2,
                        [&](int src, Complex coef) { terms.push_back({src, coef}); });
        std::sort(terms.begin(), terms.end(),
                  [](const Term& x, const Term& y) { return x.src < y.src; });

        int nre = 0;
        int nim = 0;
        std::size_t i = 0;
        while (i < terms.size()) {
          Complex coef = terms[i].coef;
          const int src = terms[i].src;
          while (i + 1 < terms.size() && terms[i + 1].src == src) {
            coef += terms[++i].coef;
          }
          ++i;
          if (coef.real() != 0.0) {
            if (pass == 1) {
              const int slot = row_ptr_re_[out] + nre;
              col_re_[slot] = src;
              val_re_[slot] = coef.real();
            }
            ++nre;
          }
          if (coef.imag() != 0.0) {
            if (pass == 1) {
              const int slot = row_ptr_im_[out] + nim;
              col_im_[slot] = src;
              val_im_[slot] = coef.imag();
            }
            ++nim;
          }
        }
        if (pass == 0) {
          row_ptr_re_[out + 1] = nre;
          row_ptr_im_[out + 1] = nim;
        }
      }
    }
    if (pass == 0) {
      for (int o = 0; o < rows; ++o) {
        row_ptr_re_[o + 1] += row_ptr_re_[o];
        row_ptr_im_[o + 1] += row_ptr_im_[o];
      }
      col_re_.resize(row_ptr_re_[rows]);
      val_re_.resize(row_ptr_re_[rows]);
      col_im_.resize(row_ptr_im_[rows]);
      val_im_.resize(row_ptr_im_[rows]);
    }
  }
}

namespace {

// one output element of the split sparse generator; shared by the public
// apply and the fused integration loops so the two paths stay bit-identical
struct GeneratorView {
  const int* rp_re;
  const int* col_re;
  const double* val_re;
  const int* rp_im;
  const int* col_im;
  const double* val_im;
};

inline void apply_row(const GeneratorView& m, int o, const double* re_in,
                      const double* im_in, double& out_re, double& out_im) {
  double ar = 0.0;
  double ai = 0.0;
  for (int t = m.rp_re[o]; t < m.rp_re[o + 1]; ++t) {
    const int s = m.col_re[t];
    const double v = m.val_re[t];
    ar += v * re_in[s];
    ai += v * im_in[s];
  }
  for (int t = m.rp_im[o]; t < m.rp_im[o + 1]; ++t) {
    const int s = m.col_im[t];
    const double v = m.val_im[t];
    ar -= v * im_in[s];
    ai += v * re_in[s];
  }
  out_re = ar;
  out_im = ai;
}

// Hermitian-packed form of the generator: the evolution preserves
// rho = rho^dag, so only the lower triangle (column-major packed) is carried.
// Sources in the upper triangle are remapped to the conjugate of their
// mirror. Coefficients split into four streams by (re/im coefficient) x
// (direct/conjugated source).
struct PackedGenerator {
  int dim = 0;
  int rows = 0; // dim*(dim+1)/2
  std::vector<int> rp_rd, rp_rc, rp_id, rp_ic;
  std::vector<int> col_rd, col_rc, col_id, col_ic;
  std::vector<double> val_rd, val_rc, val_id, val_ic;

  // packed index of (r, q) with r >= q
  static int pidx(int dim, int r, int q) { return q * dim + r - (q * (q + 1)) / 2; }
};

PackedGenerator pack_generator(const Generator& g) {
  const int k = g.cutoff + 1;
  PackedGenerator pg;
  pg.dim = k * k;
  pg.rows = pg.dim * (pg.dim + 1) / 2;

  struct Entry {
    int col;
    double val;
  };
  std::vector<Term> terms;
  std::vector<Entry> rd, rc, id, ic;
  pg.rp_rd.assign(pg.rows + 1, 0);
  pg.rp_rc.assign(pg.rows + 1, 0);
  pg.rp_id.assign(pg.rows + 1, 0);
  pg.rp_ic.assign(pg.rows + 1, 0);

  for (int q = 0; q < pg.dim; ++q) {
    const int n1 = q / k;
    const int n2 = q % k;
    for (int r = q; r < pg.dim; ++r) {
      const int m1 = r / k;
      const int m2 = r % k;
      const int out = PackedGenerator::pidx(pg.dim, r, q);

      terms.clear();
      enumerate_terms(g, m1, m2, n1, n2,
                      [&](int src, Complex coef) { terms.push_back({src, coef}); });
      std::sort(terms.begin(), terms.end(),
                [](const Term& x, const Term& y) { return x.src < y.src; });

      rd.clear();
      rc.clear();
      id.clear();
      ic.clear();
      std::size_t i = 0;
      while (i < terms.size()) {
        Complex coef = terms[i].coef;
        const int src = terms[i].src;
        while (i + 1 < terms.size() && terms[i + 1].src == src) {
          coef += terms[++i].coef;
        }
        ++i;
        const int sr = src % pg.dim;
        const int sq = src / pg.dim;
        const bool lower = sr >= sq;
        const int packed =
            lower ? PackedGenerator::pidx(pg.dim, sr, sq) : PackedGenerator::pidx(pg.dim, sq, sr);
        if (coef.real() != 0.0) {
          (lower ? rd : rc).push_back({packed, coef.real()});
        }
        if (coef.imag() != 0.0) {
          (lower ? id : ic).push_back({packed, coef.imag()});
        }
      }
      const auto flush = [out](std::vector<int>& rp, std::vector<int>& col,
                               std::vector<double>& val, const std::vector<Entry>& src) {
        rp[out + 1] = rp[out] + static_cast<int>(src.size());
        for (const Entry& e : src) {
          col.push_back(e.col);
          val.push_back(e.val);
        }
      };
      flush(pg.rp_rd, pg.col_rd, pg.val_rd, rd);
      flush(pg.rp_rc, pg.col_rc, pg.val_rc, rc);
      flush(pg.rp_id, pg.col_id, pg.val_id, id);
      flush(pg.rp_ic, pg.col_ic, pg.val_ic, ic);
    }
  }
  return pg;
}

// drho[o] for one packed row. Conjugated sources flip the sign rules:
//   real coef * conj(x) -> (v*xr, -v*xi);  i*imag coef * conj(x) -> (v*xi, v*xr)
inline void apply_packed_row(const PackedGenerator& m, int o, const double* xr,
                             const double* xi, double& out_re, double& out_im) {
  double ar = 0.0;
  double ai = 0.0;
  for (int t = m.rp_rd[o]; t < m.rp_rd[o + 1]; ++t) {
    ar += m.val_rd[t] * xr[m.col_rd[t]];
    ai += m.val_rd[t] * xi[m.col_rd[t]];
  }
  for (int t = m.rp_rc[o]; t < m.rp_rc[o + 1]; ++t) {
    ar += m.val_rc[t] * xr[m.col_rc[t]];
    ai -= m.val_rc[t] * xi[m.col_rc[t]];
  }
  for (int t = m.rp_id[o]; t < m.rp_id[o + 1]; ++t) {
    ar -= m.val_id[t] * xi[m.col_id[t]];
    ai += m.val_id[t] * xr[m.col_id[t]];
  }
  for (int t = m.rp_ic[o]; t < m.rp_ic[o + 1]; ++t) {
    ar += m.val_ic[t] * xi[m.col_ic[t]];
    ai += m.val_ic[t] * xr[m.col_ic[t]];
  }
  out_re = ar;
  out_im = ai;
}

}

void CompiledGenerator::apply(const double* re_in, const double* im_in, double* re_out,
                              double* im_out, ExecMode mode) const {
  const int rows = dim_ * dim_;
  const bool parallel = (mode == ExecMode::Parallel);
  const GeneratorView view{row_ptr_re_.data(), col_re_.data(), val_re_.data(),
                           row_ptr_im_.data(), col_im_.data(), val_im_.data()};
#pragma omp parallel for schedule(static) if (parallel)
  for (int o = 0; o < rows; ++o) {
    apply_row(view, o, re_in, im_in, re_out[o], im_out[o]);
  }
}

void CompiledGenerator::apply(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& drho,
                              ExecMode mode) const {
  if (rho.rows() != dim_ || rho.cols() != dim_) {
    throw std::invalid_argument("CompiledGenerator: dimension mismatch");
  }
  const int rows = dim_ * dim_;
  Eigen::ArrayXd re_in(rows), im_in(rows), re_out(rows), im_out(rows);
  for (int q = 0; q < dim_; ++q) {
    for (int r = 0; r < dim_; ++r) {
      re_in[q * dim_ + r] = rho(r, q).real();
      im_in[q * dim_ + r] = rho(r, q).imag();
    }
  }
  apply(re_in.data(), im_in.data(), re_out.data(), im_out.data(), mode);
  drho.resize(dim_, dim_);
  for (int q = 0; q < dim_; ++q) {
    for (int r = 0; r < dim_; ++r) {
      drho(r, q) = Complex(re_out[q * dim_ + r], im_out[q * dim_ + r]);
    }
  }
}

namespace {

struct SplitObservables {
  double trace;
  double n1;
  double n2;
  Complex coherence;
};

// observables of the packed-Hermitian state
SplitObservables packed_observables(const double* re, const double* im, int cutoff) {
  const int k = cutoff + 1;
  const int dim = k * k;
  SplitObservables o{0.0, 0.0, 0.0, {0.0, 0.0}};
  for (int m1 = 0; m1 <= cutoff; ++m1) {
    for (int m2 = 0; m2 <= cutoff; ++m2) {
      const int d = m1 * k + m2;
      const double pop = re[PackedGenerator::pidx(dim, d, d)];
      o.trace += pop;
      o.n1 += m1 * pop;
      o.n2 += m2 * pop;
      // Tr(rho a1^dag a2) reads rho[(m1,m2), (m1+1,m2-1)], an upper-triangle
      // element: the conjugate of its packed mirror
      if (m1 + 1 <= cutoff && m2 >= 1) {
        const int col = (m1 + 1) * k + (m2 - 1);
        const int s = PackedGenerator::pidx(dim, col, d);
        o.coherence += std::sqrt(double((m1 + 1) * m2)) * Complex(re[s], -im[s]);
      }
    }
  }
  return o;
}

}

OracleResult integrate_oracle(const PhysicalParams& p, int cutoff,
                              std::span<const double> grid_ps, bool secular,
                              ExecMode mode) {
  p.validate();
  if (cutoff < 1) {
    throw std::invalid_argument("integrate_oracle: cutoff must be >= 1");
  }
  if (grid_ps.size() < 2 || grid_ps.front() != 0.0) {
    throw std::invalid_argument("integrate_oracle: grid must start at 0");
  }
  const double dt = grid_ps[1] - grid_ps[0];
  for (std::size_t i = 1; i < grid_ps.size(); ++i) {
    if (std::abs(grid_ps[i] - grid_ps[i - 1] - dt) > 1e-9 * dt) {
      throw std::invalid_argument("integrate_oracle: grid must be uniform");
    }
  }

  const Generator gen = make_generator(p, cutoff, secular);
  const PackedGenerator pgen = pack_generator(gen);
  const int dim = pgen.dim;
  const int rows = pgen.rows;

  Eigen::ArrayXd yr = Eigen::ArrayXd::Zero(rows), yi = Eigen::ArrayXd::Zero(rows);
  yr[PackedGenerator::pidx(dim, 0, 0)] = 1.0; // vacuum
  Eigen::ArrayXd accr(rows), acci(rows), t1r(rows), t1i(rows), t2r(rows), t2i(rows);

  const std::size_t steps = grid_ps.size() - 1;
  OracleResult result;
  result.trajectory.t_ps.assign(grid_ps.begin(), grid_ps.end());
  result.trajectory.samples.resize(grid_ps.size());
  OracleDiagnostics diag{0.0, 0.0, 0.0};

  const auto record = [&](std::size_t i) {
    const SplitObservables o = packed_observables(yr.data(), yi.data(), cutoff);
    gaussian::Sample s;
    s.n1 = o.n1;
    s.n2 = o.n2;
    s.coherence = o.coherence;
    if (o.n1 + o.n2 >= 1e-12) {
      s.m_z = (o.n1 - o.n2) / (o.n1 + o.n2);
    }
    model::Matrix2c n;
    n << o.n1, o.coherence, std::conj(o.coherence), o.n2;
    const auto [j1, j2] = thermo::heat_currents(n, p);
    s.j1_ev_ps = j1;
    s.j2_ev_ps = j2;
    result.trajectory.samples[i] = s;
    diag.max_trace_drift = std::max(diag.max_trace_drift, std::abs(o.trace - 1.0));
  };

  // full spectral checks are O(dim^3); run them on a sparse schedule.
  // Hermiticity is carried by the packed representation, so its residue is
  // the imaginary drift of the stored diagonal.
  const std::size_t check_every = std::max<std::size_t>(1, steps / 16);
  const auto spectral_check = [&] {
    Eigen::MatrixXcd rho(dim, dim);
    for (int q = 0; q < dim; ++q) {
      for (int r = q; r < dim; ++r) {
        const int s = PackedGenerator::pidx(dim, r, q);
        rho(r, q) = Complex(yr[s], yi[s]);
        rho(q, r) = Complex(yr[s], -yi[s]);
      }
    }
    for (int d = 0; d < dim; ++d) {
      diag.max_hermiticity_err = std::max(
          diag.max_hermiticity_err, std::abs(yi[PackedGenerator::pidx(dim, d, d)]));
      rho(d, d) = yr[PackedGenerator::pidx(dim, d, d)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
    diag.min_eigenvalue = std::min(diag.min_eigenvalue, es.eigenvalues().minCoeff());
  };

  record(0);

  // One parallel region for the whole run; the four classical stages are
  // fused loops (generator row + stage update) separated by the implied
  // barriers. Stage buffers alternate so no loop gathers from an array it
  // is writing.
  double* const pyr = yr.data();
  double* const pyi = yi.data();
  double* const par = accr.data();
  double* const pai = acci.data();
  double* const p1r = t1r.data();
  double* const p1i = t1i.data();
  double* const p2r = t2r.data();
  double* const p2i = t2i.data();
  const double half = 0.5 * dt;
  const double sixth = dt / 6.0;
  const bool parallel = (mode == ExecMode::Parallel);

#pragma omp parallel if (parallel)
  {
    for (std::size_t i = 1; i <= steps; ++i) {
#pragma omp for schedule(static)
      for (int o = 0; o < rows; ++o) { // k1 from y
        double kr, ki;
        apply_packed_row(pgen, o, pyr, pyi, kr, ki);
        par[o] = kr;
        pai[o] = ki;
        p1r[o] = pyr[o] + half * kr;
        p1i[o] = pyi[o] + half * ki;
      }
#pragma omp for schedule(static)
      for (int o = 0; o < rows; ++o) { // k2 from t1
        double kr, ki;
        apply_packed_row(pgen, o, p1r, p1i, kr, ki);
        par[o] += 2.0 * kr;
        pai[o] += 2.0 * ki;
        p2r[o] = pyr[o] + half * kr;
        p2i[o] = pyi[o] + half * ki;
      }
#pragma omp for schedule(static)
      for (int o = 0; o < rows; ++o) { // k3 from t2
        double kr, ki;
        apply_packed_row(pgen, o, p2r, p2i, kr, ki);
        par[o] += 2.0 * kr;
        pai[o] += 2.0 * ki;
        p1r[o] = pyr[o] + dt * kr;
        p1i[o] = pyi[o] + dt * ki;
      }
#pragma omp for schedule(static)
      for (int o = 0; o < rows; ++o) { // k4 from t1; combine
        double kr, ki;
        apply_packed_row(pgen, o, p1r, p1i, kr, ki);
        pyr[o] += sixth * (par[o] + kr);
        pyi[o] += sixth * (pai[o] + ki);
      }
#pragma omp single
      {
        record(i);
        if (i % check_every == 0 || i == steps) {
          spectral_check();
        }
      }
    }
  }

  const gaussian::Sample& last = result.trajectory.samples.back();
  const double max_pop = std::max(last.n1, last.n2);
  if (max_pop > 0.25 * cutoff) {
    const int required = static_cast<int>(std::ceil(4.0 * max_pop));
    throw CutoffTooSmallError(
        "integrate_oracle: containment violated; need cutoff >= " +
            std::to_string(required),
        required);
  }
  result.diagnostics = diag;
  return result;
}

gaussian::Observables fock_observables(const Eigen::MatrixXcd& op, int cutoff) {
  const model::Matrix2c n = fock_moments(op, cutoff);
  gaussian::Observables o;
  o.n1 = n(0, 0).real();
  o.n2 = n(1, 1).real();
  o.coherence = n(0, 1);
  if (o.n1 + o.n2 >= 1e-12) {
    o.m_z = (o.n1 - o.n2) / (o.n1 + o.n2);
  }
  return o;
}

model::Matrix2c fock_moments(const Eigen::MatrixXcd& op, int cutoff) {
  const int k = cutoff + 1;
  model::Matrix2c n = model::Matrix2c::Zero();
  for (int m1 = 0; m1 <= cutoff; ++m1) {
    for (int m2 = 0; m2 <= cutoff; ++m2) {
      const int d = m1 * k + m2;
      n(0, 0) += double(m1) * op(d, d);
      n(1, 1) += double(m2) * op(d, d);
      if (m1 + 1 <= cutoff && m2 >= 1) { // Tr(op a1^dag a2)
        n(0, 1) += std::sqrt(double((m1 + 1) * m2)) * op(d, (m1 + 1) * k + (m2 - 1));
      }
      if (m2 + 1 <= cutoff && m1 >= 1) { // Tr(op a2^dag a1)
        n(1, 0) += std::sqrt(double((m2 + 1) * m1)) * op(d, (m1 - 1) * k + (m2 + 1));
      }
    }
  }
  return n;
}

double trace_real(const Eigen::MatrixXcd& op) { return op.trace().real(); }

}
