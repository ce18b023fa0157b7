#include "skp/lstm.hpp"

namespace skp {

namespace {

inline Eigen::ArrayXd sigmoid(const Eigen::ArrayXd& a) {
    return 1.0 / (1.0 + (-a).exp());
}

LstmState finish_step(const LstmLayerParams& p, Eigen::VectorXd pre, const LstmState& prev,
                      LstmStepCache* cache) {
    const int h = p.hidden();
    Eigen::ArrayXd i = sigmoid(pre.segment(0, h).array());
    Eigen::ArrayXd f = sigmoid(pre.segment(h, h).array());
    Eigen::ArrayXd o = sigmoid(pre.segment(2 * h, h).array());
    Eigen::ArrayXd z = pre.segment(3 * h, h).array().tanh();

    LstmState next;
    next.c = (i * z + f * prev.c.array()).matrix();
    Eigen::ArrayXd tc = next.c.array().tanh();
    next.y = (o * tc).matrix();

    if (cache) {
        cache->i = i.matrix();
        cache->f = f.matrix();
        cache->o = o.matrix();
        cache->z = z.matrix();
        cache->c = next.c;
        cache->tanh_c = tc.matrix();
        cache->y = next.y;
        cache->c_prev = prev.c;
        cache->y_prev = prev.y;
    }
    return next;
}

}  // namespace

LstmState lstm_step(const LstmLayerParams& p, int x_index, const LstmState& prev,
                    LstmStepCache* cache) {
    Eigen::VectorXd pre = p.u.col(x_index) + p.b;
    pre.noalias() += p.v * prev.y;
    if (cache) cache->x_index = x_index;
    return finish_step(p, std::move(pre), prev, cache);
}

LstmState lstm_step_dense(const LstmLayerParams& p, const Eigen::VectorXd& x,
                          const LstmState& prev, LstmStepCache* cache) {
    Eigen::VectorXd pre = p.b;
    pre.noalias() += p.u * x;
    pre.noalias() += p.v * prev.y;
    if (cache) {
        cache->x_index = -1;
        cache->x_dense = x;
    }
    return finish_step(p, std::move(pre), prev, cache);
}

void lstm_step_backward(const LstmLayerParams& p, const LstmStepCache& cache,
                        Eigen::VectorXd& dc, Eigen::VectorXd& dy, LstmLayerParams& grads,
                        Eigen::VectorXd* dx) {
    const int h = p.hidden();
    const Eigen::ArrayXd i = cache.i.array(), f = cache.f.array(), o = cache.o.array(),
                         z = cache.z.array(), tc = cache.tanh_c.array();

    Eigen::ArrayXd do_ = dy.array() * tc;
    Eigen::ArrayXd dct = dc.array() + dy.array() * o * (1.0 - tc * tc);

    Eigen::ArrayXd di = dct * z;
    Eigen::ArrayXd dz = dct * i;
    Eigen::ArrayXd df = dct * cache.c_prev.array();

    Eigen::VectorXd dpre(4 * h);
    dpre.segment(0, h) = (di * i * (1.0 - i)).matrix();
    dpre.segment(h, h) = (df * f * (1.0 - f)).matrix();
    dpre.segment(2 * h, h) = (do_ * o * (1.0 - o)).matrix();
    dpre.segment(3 * h, h) = (dz * (1.0 - z * z)).matrix();

    grads.b += dpre;
    grads.v.noalias() += dpre * cache.y_prev.transpose();
    if (cache.x_index >= 0) {
        grads.u.col(cache.x_index) += dpre;
    } else {
        grads.u.noalias() += dpre * cache.x_dense.transpose();
        if (dx) dx->noalias() = p.u.transpose() * dpre;
    }

    dc = (dct * f).matrix();
    dy.noalias() = p.v.transpose() * dpre;
}

}  // namespace skp
