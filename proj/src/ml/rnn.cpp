#include "goxlens/ml/rnn.hpp"

#include <cmath>
#include <numeric>
#include <optional>

#include "goxlens/error.hpp"
#include "goxlens/rng.hpp"

namespace goxlens::ml {

namespace {

double sigmoid(double a) { return 1.0 / (1.0 + std::exp(-a)); }

struct View {
  Eigen::Map<const MatXd> W, U;
  Eigen::Map<const VecXd> b, v;
  double c;
};

struct GradView {
  Eigen::Map<MatXd> W, U;
  Eigen::Map<VecXd> b, v;
  double& c;
};

Eigen::Index offset_U(int G, int H, int D) { return static_cast<Eigen::Index>(G) * H * D; }
Eigen::Index offset_b(int G, int H, int D) { return offset_U(G, H, D) + static_cast<Eigen::Index>(G) * H * H; }
Eigen::Index offset_v(int G, int H, int D) { return offset_b(G, H, D) + static_cast<Eigen::Index>(G) * H; }

View view(const VecXd& t, int G, int H, int D) {
  const double* p = t.data();
  return {Eigen::Map<const MatXd>(p, G * H, D), Eigen::Map<const MatXd>(p + offset_U(G, H, D), G * H, H),
          Eigen::Map<const VecXd>(p + offset_b(G, H, D), G * H), Eigen::Map<const VecXd>(p + offset_v(G, H, D), H),
          t(t.size() - 1)};
}

GradView grad_view(VecXd& t, int G, int H, int D) {
  double* p = t.data();
  return {Eigen::Map<MatXd>(p, G * H, D), Eigen::Map<MatXd>(p + offset_U(G, H, D), G * H, H),
          Eigen::Map<VecXd>(p + offset_b(G, H, D), G * H), Eigen::Map<VecXd>(p + offset_v(G, H, D), H),
          t(t.size() - 1)};
}

}  // namespace

Rnn::Rnn(Cell cell, int inputs, int hidden) : cell_(cell), inputs_(inputs), hidden_(hidden) {
  theta_ = VecXd::Zero(offset_v(gates(), hidden, inputs) + hidden + 1);
}

void Rnn::initialize(std::uint64_t seed) {
  CounterRng rng(seed, 0x726e6eULL);
  const double a = 1.0 / std::sqrt(static_cast<double>(hidden_));
  for (Eigen::Index i = 0; i + 1 < theta_.size(); ++i) theta_(i) = a * (2.0 * rng.uniform() - 1.0);
  theta_(theta_.size() - 1) = 0.0;
}

double Rnn::run(const MatXd& seq, double scale, VecXd* grad, MatXd* dx) const {
  const int G = gates(), H = hidden_, D = inputs_;
  const View p = view(theta_, G, H, D);
  const auto T = seq.rows();
  // Gate activations per step (G*H), hidden and cell states per step boundary.
  std::vector<VecXd> act(static_cast<std::size_t>(T)), hs(static_cast<std::size_t>(T + 1)), cs;
  std::vector<VecXd> un(static_cast<std::size_t>(T));
  hs[0] = VecXd::Zero(H);
  if (cell_ == Cell::lstm) cs.assign(static_cast<std::size_t>(T + 1), VecXd::Zero(H));
  for (Eigen::Index t = 0; t < T; ++t) {
    const auto tu = static_cast<std::size_t>(t);
    const VecXd x = seq.row(t).transpose();
    const VecXd& h = hs[tu];
    VecXd a(G * H);
    if (cell_ == Cell::gru) {
      a.head(2 * H) = p.W.topRows(2 * H) * x + p.U.topRows(2 * H) * h + p.b.head(2 * H);
      VecXd z = a.head(H).unaryExpr(&sigmoid), r = a.segment(H, H).unaryExpr(&sigmoid);
      un[tu] = p.U.bottomRows(H) * h;
      VecXd n = (p.W.bottomRows(H) * x + r.cwiseProduct(un[tu]) + p.b.tail(H)).array().tanh().matrix();
      hs[tu + 1] = (1.0 - z.array()) * n.array() + z.array() * h.array();
      a << z, r, n;
    } else {
      a = p.W * x + p.U * h + p.b;
      VecXd i = a.segment(0, H).unaryExpr(&sigmoid), f = a.segment(H, H).unaryExpr(&sigmoid);
      VecXd g = a.segment(2 * H, H).array().tanh().matrix(), o = a.segment(3 * H, H).unaryExpr(&sigmoid);
      cs[tu + 1] = f.cwiseProduct(cs[tu]) + i.cwiseProduct(g);
      hs[tu + 1] = o.array() * cs[tu + 1].array().tanh();
      a << i, f, g, o;
    }
    act[tu] = std::move(a);
  }
  const double pred = p.v.dot(hs[static_cast<std::size_t>(T)]) + p.c;
  if (!grad && !dx) return pred;

  std::optional<GradView> gv;
  if (grad) gv.emplace(grad_view(*grad, G, H, D));
  if (gv) {
    gv->v += scale * hs[static_cast<std::size_t>(T)];
    gv->c += scale;
  }
  if (dx) dx->setZero(T, D);
  VecXd dh = scale * p.v;
  VecXd dc = VecXd::Zero(H);
  for (Eigen::Index t = T - 1; t >= 0; --t) {
    const auto tu = static_cast<std::size_t>(t);
    const VecXd x = seq.row(t).transpose();
    const VecXd& h = hs[tu];
    const VecXd& a = act[tu];
    VecXd da(G * H), dh_prev(H);
    if (cell_ == Cell::gru) {
      const auto z = a.head(H).array(), r = a.segment(H, H).array(), n = a.tail(H).array();
      const VecXd dn = dh.array() * (1.0 - z);
      const VecXd dz = dh.array() * (h.array() - n);
      dh_prev = dh.array() * z;
      const VecXd dan = dn.array() * (1.0 - n.square());
      const VecXd dr = dan.array() * un[tu].array();
      const VecXd du = dan.array() * r;
      da << dz.array() * z * (1.0 - z), dr.array() * r * (1.0 - r), dan;
      dh_prev += p.U.topRows(2 * H).transpose() * da.head(2 * H) + p.U.bottomRows(H).transpose() * du;
      if (gv) {
        gv->W += da * x.transpose();
        gv->U.topRows(2 * H) += da.head(2 * H) * h.transpose();
        gv->U.bottomRows(H) += du * h.transpose();
        gv->b += da;
      }
    } else {
      const auto i = a.segment(0, H).array(), f = a.segment(H, H).array();
      const auto g = a.segment(2 * H, H).array(), o = a.segment(3 * H, H).array();
      const VecXd tc = cs[tu + 1].array().tanh();
      const VecXd dout = dh.array() * tc.array();
      dc += (dh.array() * o * (1.0 - tc.array().square())).matrix();
      da << (dc.array() * g) * i * (1.0 - i), (dc.array() * cs[tu].array()) * f * (1.0 - f),
          (dc.array() * i) * (1.0 - g.square()), dout.array() * o * (1.0 - o);
      dc = dc.array() * f;
      dh_prev = p.U.transpose() * da;
      if (gv) {
        gv->W += da * x.transpose();
        gv->U += da * h.transpose();
        gv->b += da;
      }
    }
    if (dx) dx->row(t) = (p.W.transpose() * da).transpose();
    dh = std::move(dh_prev);
  }
  return pred;
}

double Rnn::predict(const MatXd& sequence) const { return run(sequence, 0.0, nullptr, nullptr); }

double Rnn::loss_and_gradient(const std::vector<MatXd>& sequences, const VecXd& targets, VecXd& grad) const {
  grad = VecXd::Zero(theta_.size());
  const auto B = static_cast<double>(sequences.size());
  // First pass for residuals, second to backpropagate 2 (pred - y) / B.
  double loss = 0;
  for (std::size_t s = 0; s < sequences.size(); ++s) {
    const double e = predict(sequences[s]) - targets(static_cast<Eigen::Index>(s));
    loss += e * e / B;
    run(sequences[s], 2.0 * e / B, &grad, nullptr);
  }
  return loss;
}

MatXd Rnn::input_gradient(const MatXd& sequence) const {
  MatXd dx;
  run(sequence, 1.0, nullptr, &dx);
  return dx;
}

namespace {

MatXd window(const MatXd& Z, Eigen::Index end, int len) { return Z.middleRows(end - len + 1, len); }

}  // namespace

VecXd RnnModel::predict(const MatXd& X) const {
  const MatXd Z = ((X.rowwise() - x_mean.transpose()).array().rowwise() / x_scale.transpose().array()).matrix();
  const Eigen::Index n = std::max<Eigen::Index>(0, X.rows() - seq_len + 1);
  VecXd out(n);
  for (Eigen::Index k = 0; k < n; ++k) out(k) = y_mean + y_scale * net.predict(window(Z, k + seq_len - 1, seq_len));
  return out;
}

RnnModel train_rnn(const LaggedDataset& ds, const RnnParams& params, std::uint64_t seed) {
  if (ds.split < kMinRnnRows)
    throw InsufficientDataError("recurrent model needs at least " + std::to_string(kMinRnnRows) + " training rows, got " +
                                std::to_string(ds.split));
  if (params.seq_len < 1 || params.batch < 1 || params.hidden < 1) throw DataError("invalid recurrent model parameters");
  RnnModel m;
  m.seq_len = params.seq_len;
  const auto train = ds.train_X();
  m.x_mean = train.colwise().mean().transpose();
  m.x_scale = ((train.rowwise() - m.x_mean.transpose()).array().square().colwise().mean().sqrt()).transpose();
  for (Eigen::Index j = 0; j < m.x_scale.size(); ++j)
    if (!(m.x_scale(j) > 0)) m.x_scale(j) = 1.0;
  m.y_mean = ds.train_y().mean();
  m.y_scale = std::sqrt((ds.train_y().array() - m.y_mean).square().mean());
  if (!(m.y_scale > 0)) m.y_scale = 1.0;

  const MatXd Z = ((ds.X.rowwise() - m.x_mean.transpose()).array().rowwise() / m.x_scale.transpose().array()).matrix();
  const VecXd yz = (ds.y.array() - m.y_mean) / m.y_scale;

  m.net = Rnn(params.cell, static_cast<int>(ds.features()), params.hidden);
  m.net.initialize(seed);

  std::vector<Eigen::Index> train_ends;
  for (Eigen::Index t = params.seq_len - 1; t < ds.split; ++t) train_ends.push_back(t);

  auto train_loss = [&] {
    double s = 0;
    for (Eigen::Index t : train_ends) {
      const double e = m.net.predict(window(Z, t, params.seq_len)) - yz(t);
      s += e * e;
    }
    return s / static_cast<double>(train_ends.size());
  };
  const double initial = train_loss();
  m.loss_trace.push_back(initial);

  VecXd grad;
  std::vector<MatXd> batch;
  VecXd targets;
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    CounterRng rng(seed, 0x65706f6368ULL + static_cast<std::uint64_t>(epoch));
    std::vector<Eigen::Index> order = train_ends;
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(params.batch)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(params.batch));
      batch.clear();
      targets.resize(static_cast<Eigen::Index>(end - start));
      for (std::size_t k = start; k < end; ++k) {
        batch.push_back(window(Z, order[k], params.seq_len));
        targets(static_cast<Eigen::Index>(k - start)) = yz(order[k]);
      }
      m.net.loss_and_gradient(batch, targets, grad);
      const double norm = grad.norm();
      if (params.clip_norm > 0 && norm > params.clip_norm) grad *= params.clip_norm / norm;
      m.net.parameters() -= params.learning_rate * grad;
    }
    const double loss = train_loss();
    m.loss_trace.push_back(loss);
    if (!std::isfinite(loss) || loss > 1e3 * initial)
      throw DivergenceError("recurrent model diverged at epoch " + std::to_string(epoch + 1), m.loss_trace);
  }

  m.importance = VecXd::Zero(ds.features());
  double se = 0, se_mean = 0;
  Eigen::Index count = 0;
  for (Eigen::Index t = std::max<Eigen::Index>(ds.split, params.seq_len - 1); t < ds.rows(); ++t) {
    const MatXd w = window(Z, t, params.seq_len);
    const double pred = m.y_mean + m.y_scale * m.net.predict(w);
    se += (pred - ds.y(t)) * (pred - ds.y(t));
    se_mean += (m.y_mean - ds.y(t)) * (m.y_mean - ds.y(t));
    m.importance += m.net.input_gradient(w).cwiseAbs().colwise().sum().transpose();
    ++count;
  }
  if (count > 0) {
    m.importance /= static_cast<double>(count);
    m.test_loss = se / static_cast<double>(count);
    m.mean_predictor_loss = se_mean / static_cast<double>(count);
  }
  return m;
}

}  // namespace goxlens::ml
