// Copyright 2026 The lodsdf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lodsdf/kernel.hpp"

#include <string>

namespace lodsdf {

template <class T>
void MfnKernel<T>::Gradients::set_zero() {
  for (auto& m : omega) m.setZero();
  for (auto& v : phi) v.setZero();
  for (auto& m : weight) m.setZero();
  for (auto& v : bias) v.setZero();
  for (auto& v : head_weight) v.setZero();
  for (auto& b : head_bias) b = T(0);
}

template <class T>
MfnKernel<T>::MfnKernel(const NetworkParams& params) : config_(params.config) {
  for (const auto& layer : params.frequency) {
    omega_.push_back(layer.omega().template cast<T>());
    phi_.push_back(layer.phi.template cast<T>());
  }
  for (const auto& layer : params.hidden) {
    weight_.push_back(layer.weight.template cast<T>());
    bias_.push_back(layer.bias.template cast<T>());
  }
  for (const auto& head : params.heads) {
    head_weight_.push_back(head.weight.template cast<T>());
    head_bias_.push_back(static_cast<T>(head.bias));
  }
}

template <class T>
typename MfnKernel<T>::Gradients MfnKernel<T>::make_gradients() const {
  Gradients g;
  for (const auto& m : omega_) g.omega.push_back(Mat::Zero(m.rows(), m.cols()));
  for (const auto& v : phi_) g.phi.push_back(Vec::Zero(v.size()));
  for (const auto& m : weight_) g.weight.push_back(Mat::Zero(m.rows(), m.cols()));
  for (const auto& v : bias_) g.bias.push_back(Vec::Zero(v.size()));
  for (const auto& v : head_weight_) g.head_weight.push_back(Vec::Zero(v.size()));
  g.head_bias.assign(head_bias_.size(), T(0));
  return g;
}

template <class T>
void MfnKernel<T>::forward(Workspace& ws, int max_level, OpCounter* counter) const {
  const int levels = config_.levels();
  if (max_level < 1 || max_level > levels) {
    throw std::out_of_range("level " + std::to_string(max_level) + " outside [1, " +
                            std::to_string(levels) + "]");
  }
  const auto design = config_.conditioning;
  const Eigen::Index d_h = config_.hidden_dim;
  const Eigen::Index d_l = config_.latent_dim;
  const Eigen::Index cols = ws.points.cols();
  if (ws.points.rows() != 3 || ws.latent.size() != d_l) {
    throw std::invalid_argument("kernel input dimensions do not match the network");
  }

  ws.max_level = max_level;
  ws.pre.resize(static_cast<std::size_t>(max_level) + 1);
  ws.g.resize(ws.pre.size());
  ws.a.resize(ws.pre.size());
  ws.z.resize(ws.pre.size());
  ws.sdf.resize(max_level, cols);
  if (counter && counter->layer_columns.size() < static_cast<std::size_t>(config_.layers)) {
    counter->layer_columns.resize(static_cast<std::size_t>(config_.layers), 0);
  }

  for (int i = 0; i <= max_level; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    auto& pre = ws.pre[ui];
    if (design == Conditioning::kInputConcat) {
      const Vec shift = omega_[ui].rightCols(d_l) * ws.latent + phi_[ui];
      pre.noalias() = omega_[ui].leftCols(3) * ws.points;
      pre.colwise() += shift;
    } else {
      pre.noalias() = omega_[ui] * ws.points;
      pre.colwise() += phi_[ui];
    }
    ws.g[ui] = pre.array().sin().matrix();
    const auto& g = ws.g[ui];
    auto& z = ws.z[ui];

    if (i == 0) {
      if (design == Conditioning::kHiddenConcat) {
        z.resize(d_h + d_l, cols);
        z.topRows(d_h) = g;
        z.bottomRows(d_l) = ws.latent.replicate(1, cols);
      } else {
        z = g;
      }
    } else {
      auto& a = ws.a[ui];
      a.noalias() = weight_[ui - 1] * ws.z[ui - 1];
      a.colwise() += bias_[ui - 1];
      if (design == Conditioning::kHiddenConcat) {
        z.resize(d_h + d_l, cols);
        z.topRows(d_h) = g.cwiseProduct(a.topRows(d_h));
        z.bottomRows(d_l) = a.bottomRows(d_l).array().colwise() * ws.latent.array();
      } else {
        z = g.cwiseProduct(a);
      }
      const auto& hw = head_weight_[ui - 1];
      T offset = head_bias_[ui - 1];
      if (design == Conditioning::kOutputConcat) {
        offset += hw.tail(d_l).dot(ws.latent);
        ws.sdf.row(i - 1).noalias() = hw.head(d_h).transpose() * z;
      } else {
        ws.sdf.row(i - 1).noalias() = hw.transpose() * z;
      }
      ws.sdf.row(i - 1).array() += offset;
    }
    if (counter) counter->layer_columns[ui] += static_cast<std::size_t>(cols);
    if (!z.allFinite()) {
      throw NumericalError("non-finite activation at layer " + std::to_string(i));
    }
  }
}

template <class T>
void MfnKernel<T>::embedding_backward(const Workspace& ws, int layer, const Mat& dg,
                                      Gradients* grads, Vec* dlatent) const {
  const auto ul = static_cast<std::size_t>(layer);
  const Eigen::Index d_l = config_.latent_dim;
  const Mat dpre = dg.cwiseProduct(ws.pre[ul].array().cos().matrix());
  const bool input_concat = config_.conditioning == Conditioning::kInputConcat;
  if (!grads && !(input_concat && dlatent)) return;
  const Vec row_sum = dpre.rowwise().sum();
  if (grads) {
    grads->phi[ul] += row_sum;
    grads->omega[ul].leftCols(3).noalias() += dpre * ws.points.transpose();
    if (input_concat) grads->omega[ul].rightCols(d_l).noalias() += row_sum * ws.latent.transpose();
  }
  if (input_concat && dlatent) {
    dlatent->noalias() += omega_[ul].rightCols(d_l).transpose() * row_sum;
  }
}

template <class T>
void MfnKernel<T>::backward(const Workspace& ws, const Mat& dsdf, Gradients* grads,
                            Vec* dlatent) const {
  const auto design = config_.conditioning;
  const Eigen::Index d_h = config_.hidden_dim;
  const Eigen::Index d_l = config_.latent_dim;
  const Eigen::Index cols = ws.points.cols();
  const int top = ws.max_level;
  if (dsdf.rows() != top || dsdf.cols() != cols) {
    throw std::invalid_argument("backward: dsdf shape does not match the forward pass");
  }
  if (dlatent && dlatent->size() != d_l) throw std::invalid_argument("backward: latent size");

  Mat dz = Mat::Zero(config_.width(), cols);
  Mat da;
  Mat dg;
  for (int i = top; i >= 1; --i) {
    const auto ui = static_cast<std::size_t>(i);
    const auto ds = dsdf.row(i - 1);
    const auto& hw = head_weight_[ui - 1];
    const T ds_sum = ds.sum();
    if (design == Conditioning::kOutputConcat) {
      if (grads) {
        grads->head_weight[ui - 1].head(d_h).noalias() += ws.z[ui] * ds.transpose();
        grads->head_weight[ui - 1].tail(d_l) += ws.latent * ds_sum;
      }
      if (dlatent) *dlatent += hw.tail(d_l) * ds_sum;
      dz.noalias() += hw.head(d_h) * ds;
    } else {
      if (grads) grads->head_weight[ui - 1].noalias() += ws.z[ui] * ds.transpose();
      dz.noalias() += hw * ds;
    }
    if (grads) grads->head_bias[ui - 1] += ds_sum;

    const auto& a = ws.a[ui];
    const auto& g = ws.g[ui];
    if (design == Conditioning::kHiddenConcat) {
      da.resize(d_h + d_l, cols);
      da.topRows(d_h) = dz.topRows(d_h).cwiseProduct(g);
      da.bottomRows(d_l) = dz.bottomRows(d_l).array().colwise() * ws.latent.array();
      dg = dz.topRows(d_h).cwiseProduct(a.topRows(d_h));
      if (dlatent) {
        *dlatent += dz.bottomRows(d_l).cwiseProduct(a.bottomRows(d_l)).rowwise().sum();
      }
    } else {
      da = dz.cwiseProduct(g);
      dg = dz.cwiseProduct(a);
    }
    if (grads) {
      grads->weight[ui - 1].noalias() += da * ws.z[ui - 1].transpose();
      grads->bias[ui - 1] += da.rowwise().sum();
    }
    dz.noalias() = weight_[ui - 1].transpose() * da;
    embedding_backward(ws, i, dg, grads, dlatent);
  }
  // z_0 is the (possibly latent-extended) embedding itself.
  if (design == Conditioning::kHiddenConcat) {
    if (dlatent) *dlatent += dz.bottomRows(d_l).rowwise().sum();
    dg = dz.topRows(d_h);
  } else {
    dg = dz;
  }
  embedding_backward(ws, 0, dg, grads, dlatent);
}

template <class T>
void MfnKernel<T>::accumulate(const NetworkParams& params, const Gradients& g,
                              NetworkParams& out) {
  for (std::size_t i = 0; i < params.frequency.size(); ++i) {
    const auto& layer = params.frequency[i];
    const Eigen::ArrayXXd t = layer.omega_raw.array().tanh();
    out.frequency[i].omega_raw.array() +=
        g.omega[i].template cast<double>().array() * (layer.bound * (1.0 - t.square()));
    out.frequency[i].phi += g.phi[i].template cast<double>();
  }
  for (std::size_t i = 0; i < params.hidden.size(); ++i) {
    out.hidden[i].weight += g.weight[i].template cast<double>();
    out.hidden[i].bias += g.bias[i].template cast<double>();
  }
  for (std::size_t i = 0; i < params.heads.size(); ++i) {
    out.heads[i].weight += g.head_weight[i].template cast<double>();
    out.heads[i].bias += static_cast<double>(g.head_bias[i]);
  }
}

template class MfnKernel<float>;
template class MfnKernel<double>;

}  // namespace lodsdf
