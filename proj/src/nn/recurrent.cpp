#include "ftn/errors.hpp"
#include "ftn/nn/layers.hpp"

namespace ftn::nn {

int gate_count(CellKind kind) {
    switch (kind) {
        case CellKind::srnn: return 1;
        case CellKind::gru: return 3;   // update, reset, candidate
        case CellKind::lstm: return 4;  // input, forget, candidate, output
    }
    return 1;
}

void RecurrentLayer::init(CellKind k, Eigen::Index in_sz, Eigen::Index hidden_sz, bool return_seq,
                          Rng& rng) {
    kind = k;
    in = in_sz;
    hidden = hidden_sz;
    return_sequences = return_seq;
    const Eigen::Index g = gate_count(kind);

    wx = glorot_uniform(g * hidden, in, rng);
    wh.resize(g * hidden, hidden);
    for (Eigen::Index gi = 0; gi < g; ++gi) {
        wh.middleRows(gi * hidden, hidden) = orthogonal(hidden, hidden, rng);
    }
    b = Mat::Zero(g * hidden, 1);
    if (kind == CellKind::lstm) {
        b.block(hidden, 0, hidden, 1).setConstant(1.0);  // forget-gate bias
    }
    dwx = Mat::Zero(wx.rows(), wx.cols());
    dwh = Mat::Zero(wh.rows(), wh.cols());
    db = Mat::Zero(b.rows(), 1);
}

void RecurrentLayer::forward(const std::vector<Mat>& xs, std::vector<Mat>& out, const Mat* h0,
                             const Mat* c0) {
    const std::size_t len = xs.size();
    if (len == 0) throw ContractError("recurrent: empty input sequence");
    if (xs[0].rows() != in) {
        throw ContractError("recurrent: input width " + std::to_string(xs[0].rows()) +
                            " does not match layer input " + std::to_string(in));
    }
    const Eigen::Index batch = xs[0].cols();
    const Eigen::Index n = hidden;

    xs_.assign(xs.begin(), xs.end());
    hs_.resize(len);
    gates_.resize(len);
    if (kind == CellKind::lstm) cs_.resize(len);
    if (kind == CellKind::gru) rh_.resize(len);

    const Eigen::VectorXd bias = b.col(0);
    Mat h = h0 ? *h0 : Mat::Zero(n, batch);
    Mat c = c0 ? *c0 : Mat::Zero(n, batch);
    Mat pre;

    for (std::size_t t = 0; t < len; ++t) {
        switch (kind) {
            case CellKind::srnn: {
                pre.noalias() = wx * xs[t];
                pre.noalias() += wh * h;
                pre.colwise() += bias;
                h = pre.array().tanh();
                gates_[t] = h;
                break;
            }
            case CellKind::lstm: {
                pre.noalias() = wx * xs[t];
                pre.noalias() += wh * h;
                pre.colwise() += bias;
                Mat gates(4 * n, batch);
                gates.topRows(2 * n) = 1.0 / (1.0 + (-pre.topRows(2 * n).array()).exp());
                gates.middleRows(2 * n, n) = pre.middleRows(2 * n, n).array().tanh();
                gates.bottomRows(n) = 1.0 / (1.0 + (-pre.bottomRows(n).array()).exp());
                const auto i = gates.topRows(n).array();
                const auto f = gates.middleRows(n, n).array();
                const auto g = gates.middleRows(2 * n, n).array();
                const auto o = gates.bottomRows(n).array();
                c = (f * c.array() + i * g).matrix();
                h = (o * c.array().tanh()).matrix();
                gates_[t] = std::move(gates);
                cs_[t] = c;
                break;
            }
            case CellKind::gru: {
                pre.noalias() = wx * xs[t];
                pre.middleRows(0, 2 * n).noalias() += wh.middleRows(0, 2 * n) * h;
                pre.topRows(2 * n).colwise() += bias.head(2 * n);
                Mat gates(3 * n, batch);
                gates.topRows(2 * n) = 1.0 / (1.0 + (-pre.topRows(2 * n).array()).exp());
                const auto z = gates.topRows(n).array();
                const auto r = gates.middleRows(n, n).array();
                Mat rh = (r * h.array()).matrix();
                Mat hh_pre = pre.bottomRows(n);
                hh_pre.noalias() += wh.bottomRows(n) * rh;
                hh_pre.colwise() += bias.tail(n);
                gates.bottomRows(n) = hh_pre.array().tanh();
                const auto hh = gates.bottomRows(n).array();
                h = (z * h.array() + (1.0 - z) * hh).matrix();
                gates_[t] = std::move(gates);
                rh_[t] = std::move(rh);
                break;
            }
        }
        hs_[t] = h;
    }

    if (return_sequences) {
        out = hs_;
    } else {
        out.assign(1, hs_[len - 1]);
    }
}

void RecurrentLayer::backward(const std::vector<Mat>& dout, std::vector<Mat>& dxs) {
    const std::size_t len = xs_.size();
    const Eigen::Index n = hidden;
    const Eigen::Index batch = xs_[0].cols();

    dxs.assign(len, Mat());
    const Mat zero_state = Mat::Zero(n, batch);
    Mat dh = Mat::Zero(n, batch);
    Mat dc = Mat::Zero(n, batch);
    Mat dgates;

    for (std::size_t t = len; t-- > 0;) {
        if (return_sequences) {
            dh += dout[t];
        } else if (t == len - 1) {
            dh += dout[0];
        }
        const Mat& h_prev_ref = (t == 0) ? zero_state : hs_[t - 1];

        switch (kind) {
            case CellKind::srnn: {
                dgates = (dh.array() * (1.0 - gates_[t].array().square())).matrix();
                break;
            }
            case CellKind::lstm: {
                const auto i = gates_[t].topRows(n).array();
                const auto f = gates_[t].middleRows(n, n).array();
                const auto g = gates_[t].middleRows(2 * n, n).array();
                const auto o = gates_[t].bottomRows(n).array();
                const Mat tc = cs_[t].array().tanh().matrix();
                const Mat& c_prev = (t == 0) ? zero_state : cs_[t - 1];
                Mat dct = dc;
                dct.array() += dh.array() * o * (1.0 - tc.array().square());
                dgates.resize(4 * n, batch);
                dgates.topRows(n) = (dct.array() * g * i * (1.0 - i)).matrix();
                dgates.middleRows(n, n) =
                    (dct.array() * c_prev.array() * f * (1.0 - f)).matrix();
                dgates.middleRows(2 * n, n) = (dct.array() * i * (1.0 - g.square())).matrix();
                dgates.bottomRows(n) = (dh.array() * tc.array() * o * (1.0 - o)).matrix();
                dc = (dct.array() * f).matrix();
                break;
            }
            case CellKind::gru: {
                const auto z = gates_[t].topRows(n).array();
                const auto r = gates_[t].middleRows(n, n).array();
                const auto hh = gates_[t].bottomRows(n).array();
                dgates.resize(3 * n, batch);
                dgates.bottomRows(n) =
                    (dh.array() * (1.0 - z) * (1.0 - hh.square())).matrix();
                Mat t1;
                t1.noalias() = wh.bottomRows(n).transpose() * dgates.bottomRows(n);
                dgates.topRows(n) =
                    (dh.array() * (h_prev_ref.array() - hh) * z * (1.0 - z)).matrix();
                dgates.middleRows(n, n) =
                    (t1.array() * h_prev_ref.array() * r * (1.0 - r)).matrix();
                // dh_prev assembled below; keep t1*r part here
                Mat dh_prev = (dh.array() * z + t1.array() * r).matrix();
                dh_prev.noalias() +=
                    wh.topRows(2 * n).transpose() * dgates.topRows(2 * n);
                dwx.noalias() += dgates * xs_[t].transpose();
                dwh.topRows(2 * n).noalias() +=
                    dgates.topRows(2 * n) * h_prev_ref.transpose();
                dwh.bottomRows(n).noalias() += dgates.bottomRows(n) * rh_[t].transpose();
                db += dgates.rowwise().sum();
                dxs[t].noalias() = wx.transpose() * dgates;
                dh = std::move(dh_prev);
                continue;
            }
        }

        dwx.noalias() += dgates * xs_[t].transpose();
        dwh.noalias() += dgates * h_prev_ref.transpose();
        db += dgates.rowwise().sum();
        dxs[t].noalias() = wx.transpose() * dgates;
        dh.noalias() = wh.transpose() * dgates;
    }
}

void RecurrentLayer::collect(const std::string& prefix, std::vector<ParamRef>& out) {
    out.push_back({prefix + ".wx", &wx, &dwx});
    out.push_back({prefix + ".wh", &wh, &dwh});
    out.push_back({prefix + ".b", &b, &db});
}

void BidirectionalLayer::init(CellKind k, Eigen::Index in_sz, Eigen::Index hidden_sz,
                              bool return_seq, Rng& rng) {
    return_sequences = return_seq;
    fwd.init(k, in_sz, hidden_sz, true, rng);
    bwd.init(k, in_sz, hidden_sz, true, rng);
}

void BidirectionalLayer::forward(const std::vector<Mat>& xs, std::vector<Mat>& out) {
    const std::size_t len = xs.size();
    std::vector<Mat> rev(len);
    for (std::size_t t = 0; t < len; ++t) rev[t] = xs[len - 1 - t];

    fwd.forward(xs, fwd_out_);
    bwd.forward(rev, bwd_out_);

    const Eigen::Index n = fwd.hidden;
    const Eigen::Index batch = xs[0].cols();
    if (return_sequences) {
        out.resize(len);
        for (std::size_t t = 0; t < len; ++t) {
            out[t].resize(2 * n, batch);
            out[t].topRows(n) = fwd_out_[t];
            out[t].bottomRows(n) = bwd_out_[len - 1 - t];
        }
    } else {
        out.assign(1, Mat(2 * n, batch));
        out[0].topRows(n) = fwd_out_[len - 1];
        out[0].bottomRows(n) = bwd_out_[len - 1];
    }
}

void BidirectionalLayer::backward(const std::vector<Mat>& dout, std::vector<Mat>& dxs) {
    const std::size_t len = fwd.xs_.size();
    const Eigen::Index n = fwd.hidden;

    std::vector<Mat> dfwd(len), dbwd(len);
    const Eigen::Index batch = fwd.xs_[0].cols();
    if (return_sequences) {
        for (std::size_t t = 0; t < len; ++t) {
            dfwd[t] = dout[t].topRows(n);
            dbwd[len - 1 - t] = dout[t].bottomRows(n);
        }
    } else {
        for (std::size_t t = 0; t < len; ++t) {
            dfwd[t] = Mat::Zero(n, batch);
            dbwd[t] = Mat::Zero(n, batch);
        }
        dfwd[len - 1] = dout[0].topRows(n);
        dbwd[len - 1] = dout[0].bottomRows(n);
    }

    std::vector<Mat> dx_f, dx_b;
    fwd.backward(dfwd, dx_f);
    bwd.backward(dbwd, dx_b);

    dxs.resize(len);
    for (std::size_t t = 0; t < len; ++t) {
        dxs[t] = dx_f[t] + dx_b[len - 1 - t];
    }
}

void BidirectionalLayer::collect(const std::string& prefix, std::vector<ParamRef>& out) {
    fwd.collect(prefix + ".fwd", out);
    bwd.collect(prefix + ".bwd", out);
}

}  // namespace ftn::nn
