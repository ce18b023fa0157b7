#pragma once

#include <Eigen/Dense>

#include "skp/rng.hpp"

namespace skp {

// One LSTM layer. Gate pre-activations are packed row-wise in order
// i, f, o, z, so a step costs two matrix-vector products:
//
//   i_t = sigmoid(U_i x_t + V_i y_{t-1} + b_i)
//   f_t = sigmoid(U_f x_t + V_f y_{t-1} + b_f)
//   o_t = sigmoid(U_o x_t + V_o y_{t-1} + b_o)
//   z_t = tanh  (U_z x_t + V_z y_{t-1} + b_z)
//   c_t = i_t . z_t + f_t . c_{t-1}
//   y_t = o_t . tanh(c_t)
struct LstmLayerParams {
    Eigen::MatrixXd u;  // 4H x in_dim
    Eigen::MatrixXd v;  // 4H x H
    Eigen::VectorXd b;  // 4H

    int hidden() const { return static_cast<int>(v.cols()); }
    int input_dim() const { return static_cast<int>(u.cols()); }

    static LstmLayerParams make(int hidden, int in_dim) {
        LstmLayerParams p;
        p.u = Eigen::MatrixXd::Zero(4 * hidden, in_dim);
        p.v = Eigen::MatrixXd::Zero(4 * hidden, hidden);
        p.b = Eigen::VectorXd::Zero(4 * hidden);
        return p;
    }
    void randomize(Rng& rng, double range) {
        for (auto* m : {&u, &v})
            for (long i = 0; i < m->size(); ++i) m->data()[i] = rng.uniform(-range, range);
        for (long i = 0; i < b.size(); ++i) b[i] = rng.uniform(-range, range);
    }
};

struct LstmState {
    Eigen::VectorXd c;  // cell state
    Eigen::VectorXd y;  // output / short-term state

    static LstmState zero(int hidden) {
        return {Eigen::VectorXd::Zero(hidden), Eigen::VectorXd::Zero(hidden)};
    }
};

// Everything the backward pass needs from one forward step.
struct LstmStepCache {
    int x_index = -1;        // set when the input was a one-hot token
    Eigen::VectorXd x_dense; // set when the input was a dense vector
    Eigen::VectorXd i, f, o, z, c, tanh_c, y, c_prev, y_prev;
};

// x given as a one-hot index (token input, layer 1).
LstmState lstm_step(const LstmLayerParams& p, int x_index, const LstmState& prev,
                    LstmStepCache* cache = nullptr);

// x given as a dense vector (stacked layer input).
LstmState lstm_step_dense(const LstmLayerParams& p, const Eigen::VectorXd& x,
                          const LstmState& prev, LstmStepCache* cache = nullptr);

// Accumulates parameter gradients for one step. On entry dc/dy hold the loss
// gradients w.r.t. c_t and y_t; on exit they hold the gradients w.r.t.
// c_{t-1} and y_{t-1}. dx, when non-null, receives the gradient w.r.t. a
// dense input.
void lstm_step_backward(const LstmLayerParams& p, const LstmStepCache& cache,
                        Eigen::VectorXd& dc, Eigen::VectorXd& dy, LstmLayerParams& grads,
                        Eigen::VectorXd* dx = nullptr);

}  // namespace skp
