#include "rnntc/cells.hpp"

#include <cmath>
#include <string>

#include "rnntc/activations.hpp"
#include "rnntc/errors.hpp"

namespace rnntc {

namespace {

void require(bool ok, const char* what) {
    if (!ok) {
        throw ShapeError(what);
    }
}

void check_weight(ConstMatrixView w, std::size_t hidden, std::size_t input, const char* name) {
    if (w.rows() != hidden || w.cols() != hidden + input) {
        throw ShapeError(std::string(name) + ": expected " + std::to_string(hidden) + "x" +
                         std::to_string(hidden + input) + ", got " + std::to_string(w.rows()) + "x" +
                         std::to_string(w.cols()));
    }
}

void check_bias(std::span<const double> b, std::size_t hidden, bool optional, const char* name) {
    if (b.size() != hidden && !(optional && b.empty())) {
        throw ShapeError(std::string(name) + ": expected length " + std::to_string(hidden));
    }
}

// out = W [h, x] + b  (b may be empty)
Vector affine(ConstMatrixView w, std::span<const double> h, std::span<const double> x, std::span<const double> b) {
    const std::size_t rows = w.rows();
    const std::size_t nh = h.size();
    Vector out(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = w.row(r).data();
        double acc = b.empty() ? 0.0 : b[r];
        for (std::size_t j = 0; j < nh; ++j) {
            acc += row[j] * h[j];
        }
        const double* xrow = row + nh;
        for (std::size_t j = 0; j < x.size(); ++j) {
            acc += xrow[j] * x[j];
        }
        out[r] = acc;
    }
    return out;
}

// Given dL/d(pre) for pre = W [h, x] + b: dW += d (x) [h, x], db += d,
// dh += W_h^T d, dx += W_x^T d.
void affine_backward(ConstMatrixView w, std::span<const double> h, std::span<const double> x,
                     std::span<const double> d, MatrixView dw, std::span<double> db, std::span<double> dh,
                     std::span<double> dx) {
    const std::size_t nh = h.size();
    for (std::size_t r = 0; r < w.rows(); ++r) {
        const double dr = d[r];
        if (!db.empty()) {
            db[r] += dr;
        }
        if (dr == 0.0) {
            continue;
        }
        const double* row = w.row(r).data();
        double* grow = dw.row(r).data();
        for (std::size_t j = 0; j < nh; ++j) {
            grow[j] += dr * h[j];
            dh[j] += dr * row[j];
        }
        for (std::size_t j = 0; j < x.size(); ++j) {
            grow[nh + j] += dr * x[j];
            dx[j] += dr * row[nh + j];
        }
    }
}

void check_gru(const GruParams& p, std::size_t hidden, std::size_t input) {
    check_weight(p.w_z, hidden, input, "GRU W_z");
    check_weight(p.w_r, hidden, input, "GRU W_r");
    check_weight(p.w, hidden, input, "GRU W");
    check_bias(p.b_z, hidden, true, "GRU b_z");
    check_bias(p.b_r, hidden, true, "GRU b_r");
    check_bias(p.b_c, hidden, true, "GRU b_c");
}

void check_lstm(const LstmParams& p, std::size_t hidden, std::size_t input) {
    check_weight(p.w_f, hidden, input, "LSTM W_f");
    check_weight(p.w_i, hidden, input, "LSTM W_i");
    check_weight(p.w_g, hidden, input, "LSTM W_g");
    check_weight(p.w_o, hidden, input, "LSTM W_o");
    check_bias(p.b_f, hidden, false, "LSTM b_f");
    check_bias(p.b_i, hidden, false, "LSTM b_i");
    check_bias(p.b_g, hidden, false, "LSTM b_g");
    check_bias(p.b_o, hidden, false, "LSTM b_o");
}

}  // namespace

Vector srnn_step(std::span<const double> x, std::span<const double> h_prev, const SrnnParams& p) {
    check_weight(p.w_h, h_prev.size(), x.size(), "sRNN W_h");
    check_bias(p.b_h, h_prev.size(), false, "sRNN b_h");
    Vector h = affine(p.w_h, h_prev, x, p.b_h);
    for (double& v : h) {
        v = sigmoid(v);
    }
    return h;
}

GruGates gru_gates(std::span<const double> x, std::span<const double> h_prev, const GruParams& p) {
    const std::size_t hidden = h_prev.size();
    check_gru(p, hidden, x.size());
    GruGates g;
    g.update = affine(p.w_z, h_prev, x, p.b_z);
    g.reset = affine(p.w_r, h_prev, x, p.b_r);
    for (std::size_t k = 0; k < hidden; ++k) {
        g.update[k] = sigmoid(g.update[k]);
        g.reset[k] = sigmoid(g.reset[k]);
    }
    Vector gated(hidden);
    for (std::size_t k = 0; k < hidden; ++k) {
        gated[k] = g.reset[k] * h_prev[k];
    }
    g.candidate = affine(p.w, gated, x, p.b_c);
    for (double& v : g.candidate) {
        v = std::tanh(v);
    }
    return g;
}

Vector gru_compose(std::span<const double> update, std::span<const double> h_prev,
                   std::span<const double> candidate) {
    require(update.size() == h_prev.size() && candidate.size() == h_prev.size(), "gru_compose: length mismatch");
    Vector h(h_prev.size());
    for (std::size_t k = 0; k < h.size(); ++k) {
        h[k] = (1.0 - update[k]) * h_prev[k] + update[k] * candidate[k];
    }
    return h;
}

LstmGates lstm_gates(std::span<const double> x, std::span<const double> h_prev, const LstmParams& p) {
    check_lstm(p, h_prev.size(), x.size());
    LstmGates g;
    g.forget = affine(p.w_f, h_prev, x, p.b_f);
    g.input = affine(p.w_i, h_prev, x, p.b_i);
    g.candidate = affine(p.w_g, h_prev, x, p.b_g);
    g.output = affine(p.w_o, h_prev, x, p.b_o);
    for (std::size_t k = 0; k < h_prev.size(); ++k) {
        g.forget[k] = sigmoid(g.forget[k]);
        g.input[k] = sigmoid(g.input[k]);
        g.candidate[k] = std::tanh(g.candidate[k]);
        g.output[k] = sigmoid(g.output[k]);
    }
    return g;
}

CellState lstm_compose(std::span<const double> forget, std::span<const double> input,
                       std::span<const double> candidate, std::span<const double> output,
                       std::span<const double> c_prev) {
    const std::size_t n = c_prev.size();
    require(forget.size() == n && input.size() == n && candidate.size() == n && output.size() == n,
            "lstm_compose: length mismatch");
    CellState s{Vector(n), Vector(n)};
    for (std::size_t k = 0; k < n; ++k) {
        s.c[k] = forget[k] * c_prev[k] + input[k] * candidate[k];
        s.h[k] = output[k] * std::tanh(s.c[k]);
    }
    return s;
}

void srnn_step_backward(std::span<const double> x, std::span<const double> h_prev, std::span<const double> h,
                        std::span<const double> dh, const SrnnParams& p, const SrnnGrads& g,
                        std::span<double> dh_prev, std::span<double> dx) {
    const std::size_t hidden = h.size();
    Vector dpre(hidden);
    for (std::size_t k = 0; k < hidden; ++k) {
        dpre[k] = dh[k] * h[k] * (1.0 - h[k]);
    }
    std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
    affine_backward(p.w_h, h_prev, x, dpre, g.w_h, g.b_h, dh_prev, dx);
}

void gru_step_backward(std::span<const double> x, std::span<const double> h_prev, const GruGates& gates,
                       std::span<const double> dh, const GruParams& p, const GruGrads& g,
                       std::span<double> dh_prev, std::span<double> dx) {
    const std::size_t hidden = h_prev.size();
    const auto& z = gates.update;
    const auto& r = gates.reset;
    const auto& c = gates.candidate;

    Vector dz_pre(hidden);
    Vector dc_pre(hidden);
    Vector gated(hidden);
    for (std::size_t k = 0; k < hidden; ++k) {
        dh_prev[k] = dh[k] * (1.0 - z[k]);
        const double dz = dh[k] * (c[k] - h_prev[k]);
        dz_pre[k] = dz * z[k] * (1.0 - z[k]);
        const double dc = dh[k] * z[k];
        dc_pre[k] = dc * (1.0 - c[k] * c[k]);
        gated[k] = r[k] * h_prev[k];
    }

    Vector dgated(hidden, 0.0);
    affine_backward(p.w, gated, x, dc_pre, g.w, g.b_c, dgated, dx);

    Vector dr_pre(hidden);
    for (std::size_t k = 0; k < hidden; ++k) {
        dh_prev[k] += dgated[k] * r[k];
        const double dr = dgated[k] * h_prev[k];
        dr_pre[k] = dr * r[k] * (1.0 - r[k]);
    }
    affine_backward(p.w_z, h_prev, x, dz_pre, g.w_z, g.b_z, dh_prev, dx);
    affine_backward(p.w_r, h_prev, x, dr_pre, g.w_r, g.b_r, dh_prev, dx);
}

void lstm_step_backward(std::span<const double> x, std::span<const double> h_prev,
                        std::span<const double> c_prev, const LstmGates& gates, std::span<const double> c,
                        std::span<const double> dh, std::span<double> dc, const LstmParams& p,
                        const LstmGrads& g, std::span<double> dh_prev, std::span<double> dx) {
    const std::size_t hidden = h_prev.size();
    Vector df(hidden), di(hidden), dg(hidden), dout(hidden);
    for (std::size_t k = 0; k < hidden; ++k) {
        const double tc = std::tanh(c[k]);
        const double o = gates.output[k];
        dout[k] = dh[k] * tc * o * (1.0 - o);
        const double dck = dc[k] + dh[k] * o * (1.0 - tc * tc);
        const double f = gates.forget[k];
        const double i = gates.input[k];
        const double gc = gates.candidate[k];
        df[k] = dck * c_prev[k] * f * (1.0 - f);
        di[k] = dck * gc * i * (1.0 - i);
        dg[k] = dck * i * (1.0 - gc * gc);
        dc[k] = dck * f;
    }
    std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
    affine_backward(p.w_f, h_prev, x, df, g.w_f, g.b_f, dh_prev, dx);
    affine_backward(p.w_i, h_prev, x, di, g.w_i, g.b_i, dh_prev, dx);
    affine_backward(p.w_g, h_prev, x, dg, g.w_g, g.b_g, dh_prev, dx);
    affine_backward(p.w_o, h_prev, x, dout, g.w_o, g.b_o, dh_prev, dx);
}

}  // namespace rnntc
