#include <cmath>
#include <stdexcept>
#include <utility>

#include "polecart/ad/tensor.hpp"

namespace polecart::ad {

namespace {

using detail::Node;

[[noreturn]] void shape_error(const char* op, const Tensor& a, const Tensor& b) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " + a.shape_str() +
                                " vs " + b.shape_str());
}

bool tracking(const Tensor& a) {
    return detail::grad_enabled() && a.requires_grad();
}

bool tracking(const Tensor& a, const Tensor& b) {
    return detail::grad_enabled() && (a.requires_grad() || b.requires_grad());
}

void attach(Tensor& out, std::vector<std::shared_ptr<Node>> parents,
            std::function<void(Node&)> backprop) {
    Node& n = *out.node();
    n.requires_grad = true;
    n.parents = std::move(parents);
    n.backprop = std::move(backprop);
}

enum class EwKind { Add, Sub, Mul };

// Elementwise binary op. Accepts exact shape match, or b as a [1 x n] row
// broadcast over the rows of a.
Tensor elementwise(const Tensor& a, const Tensor& b, EwKind kind, const char* name) {
    const bool exact = a.rows() == b.rows() && a.cols() == b.cols();
    const bool row_bcast = !exact && b.rows() == 1 && b.cols() == a.cols();
    if (!exact && !row_bcast) shape_error(name, a, b);

    const int m = a.rows(), n = a.cols();
    std::vector<double> v(static_cast<std::size_t>(m) * n);
    const double* pa = a.values().data();
    const double* pb = b.values().data();
    for (int r = 0; r < m; ++r) {
        const double* brow = row_bcast ? pb : pb + static_cast<std::size_t>(r) * n;
        double* vrow = v.data() + static_cast<std::size_t>(r) * n;
        const double* arow = pa + static_cast<std::size_t>(r) * n;
        switch (kind) {
            case EwKind::Add:
                for (int j = 0; j < n; ++j) vrow[j] = arow[j] + brow[j];
                break;
            case EwKind::Sub:
                for (int j = 0; j < n; ++j) vrow[j] = arow[j] - brow[j];
                break;
            case EwKind::Mul:
                for (int j = 0; j < n; ++j) vrow[j] = arow[j] * brow[j];
                break;
        }
    }

    Tensor out(m, n, std::move(v));
    if (tracking(a, b)) {
        attach(out, {a.node(), b.node()}, [kind, row_bcast, m, n](Node& self) {
            Node& A = *self.parents[0];
            Node& B = *self.parents[1];
            const double* g = self.adj.data();
            if (A.requires_grad) {
                double* da = A.adj.data();
                const std::size_t total = static_cast<std::size_t>(m) * n;
                if (kind == EwKind::Mul) {
                    const double* pb = B.value.data();
                    for (int r = 0; r < m; ++r) {
                        const double* brow = row_bcast ? pb : pb + static_cast<std::size_t>(r) * n;
                        for (int j = 0; j < n; ++j)
                            da[static_cast<std::size_t>(r) * n + j] +=
                                g[static_cast<std::size_t>(r) * n + j] * brow[j];
                    }
                } else {
                    for (std::size_t i = 0; i < total; ++i) da[i] += g[i];
                }
            }
            if (B.requires_grad) {
                double* db = B.adj.data();
                const double* pa = A.value.data();
                const double sign = kind == EwKind::Sub ? -1.0 : 1.0;
                for (int r = 0; r < m; ++r) {
                    const std::size_t off = static_cast<std::size_t>(r) * n;
                    const std::size_t boff = row_bcast ? 0 : off;
                    for (int j = 0; j < n; ++j) {
                        const double contrib = kind == EwKind::Mul ? g[off + j] * pa[off + j]
                                                                   : sign * g[off + j];
                        db[boff + j] += contrib;
                    }
                }
            }
        });
    }
    return out;
}

Tensor unary(const Tensor& a, double (*fwd)(double),
             std::function<void(Node&)> backprop) {
    std::vector<double> v(a.values().size());
    const double* pa = a.values().data();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = fwd(pa[i]);
    Tensor out(a.rows(), a.cols(), std::move(v));
    if (tracking(a)) attach(out, {a.node()}, std::move(backprop));
    return out;
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) { return elementwise(a, b, EwKind::Add, "add"); }
Tensor sub(const Tensor& a, const Tensor& b) { return elementwise(a, b, EwKind::Sub, "sub"); }
Tensor mul(const Tensor& a, const Tensor& b) { return elementwise(a, b, EwKind::Mul, "mul"); }

Tensor scale(const Tensor& a, double s) {
    std::vector<double> v(a.values().size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.values()[i] * s;
    Tensor out(a.rows(), a.cols(), std::move(v));
    if (tracking(a)) {
        attach(out, {a.node()}, [s](Node& self) {
            Node& A = *self.parents[0];
            if (!A.requires_grad) return;
            for (std::size_t i = 0; i < self.adj.size(); ++i) A.adj[i] += s * self.adj[i];
        });
    }
    return out;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.cols() != b.rows()) shape_error("matmul", a, b);
    const int m = a.rows(), k = a.cols(), n = b.cols();
    std::vector<double> v(static_cast<std::size_t>(m) * n, 0.0);
    {
        const double* pa = a.values().data();
        const double* pb = b.values().data();
        double* pc = v.data();
        for (int i = 0; i < m; ++i) {
            for (int kk = 0; kk < k; ++kk) {
                const double av = pa[static_cast<std::size_t>(i) * k + kk];
                const double* brow = pb + static_cast<std::size_t>(kk) * n;
                double* crow = pc + static_cast<std::size_t>(i) * n;
                for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
            }
        }
    }
    Tensor out(m, n, std::move(v));
    if (tracking(a, b)) {
        attach(out, {a.node(), b.node()}, [m, k, n](Node& self) {
            Node& A = *self.parents[0];
            Node& B = *self.parents[1];
            const double* g = self.adj.data();
            if (A.requires_grad) {
                // dA = g . B^T
                double* da = A.adj.data();
                const double* pb = B.value.data();
                for (int i = 0; i < m; ++i) {
                    const double* grow = g + static_cast<std::size_t>(i) * n;
                    for (int kk = 0; kk < k; ++kk) {
                        const double* brow = pb + static_cast<std::size_t>(kk) * n;
                        double acc = 0.0;
                        for (int j = 0; j < n; ++j) acc += grow[j] * brow[j];
                        da[static_cast<std::size_t>(i) * k + kk] += acc;
                    }
                }
            }
            if (B.requires_grad) {
                // dB = A^T . g
                double* db = B.adj.data();
                const double* pa = A.value.data();
                for (int i = 0; i < m; ++i) {
                    const double* grow = g + static_cast<std::size_t>(i) * n;
                    for (int kk = 0; kk < k; ++kk) {
                        const double av = pa[static_cast<std::size_t>(i) * k + kk];
                        double* brow = db + static_cast<std::size_t>(kk) * n;
                        for (int j = 0; j < n; ++j) brow[j] += av * grow[j];
                    }
                }
            }
        });
    }
    return out;
}

Tensor transpose(const Tensor& a) {
    const int m = a.rows(), n = a.cols();
    std::vector<double> v(static_cast<std::size_t>(m) * n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            v[static_cast<std::size_t>(j) * m + i] = a.values()[static_cast<std::size_t>(i) * n + j];
    Tensor out(n, m, std::move(v));
    if (tracking(a)) {
        attach(out, {a.node()}, [m, n](Node& self) {
            Node& A = *self.parents[0];
            if (!A.requires_grad) return;
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < n; ++j)
                    A.adj[static_cast<std::size_t>(i) * n + j] +=
                        self.adj[static_cast<std::size_t>(j) * m + i];
        });
    }
    return out;
}

Tensor tanh(const Tensor& a) {
    return unary(a, [](double x) { return std::tanh(x); }, [](Node& self) {
        Node& A = *self.parents[0];
        if (!A.requires_grad) return;
        for (std::size_t i = 0; i < self.adj.size(); ++i) {
            const double y = self.value[i];
            A.adj[i] += self.adj[i] * (1.0 - y * y);
        }
    });
}

Tensor sigmoid(const Tensor& a) {
    return unary(a, [](double x) { return 1.0 / (1.0 + std::exp(-x)); }, [](Node& self) {
        Node& A = *self.parents[0];
        if (!A.requires_grad) return;
        for (std::size_t i = 0; i < self.adj.size(); ++i) {
            const double y = self.value[i];
            A.adj[i] += self.adj[i] * y * (1.0 - y);
        }
    });
}

Tensor relu(const Tensor& a) {
    return unary(a, [](double x) { return x > 0.0 ? x : 0.0; }, [](Node& self) {
        Node& A = *self.parents[0];
        if (!A.requires_grad) return;
        for (std::size_t i = 0; i < self.adj.size(); ++i) {
            if (A.value[i] > 0.0) A.adj[i] += self.adj[i];
        }
    });
}

Tensor softmax_rows(const Tensor& a) {
    const int m = a.rows(), n = a.cols();
    std::vector<double> v(static_cast<std::size_t>(m) * n);
    for (int r = 0; r < m; ++r) {
        const double* x = a.values().data() + static_cast<std::size_t>(r) * n;
        double* y = v.data() + static_cast<std::size_t>(r) * n;
        double mx = x[0];
        for (int j = 1; j < n; ++j) mx = std::max(mx, x[j]);
        double z = 0.0;
        for (int j = 0; j < n; ++j) {
            y[j] = std::exp(x[j] - mx);
            z += y[j];
        }
        for (int j = 0; j < n; ++j) y[j] /= z;
    }
    Tensor out(m, n, std::move(v));
    if (tracking(a)) {
        attach(out, {a.node()}, [m, n](Node& self) {
            Node& A = *self.parents[0];
            if (!A.requires_grad) return;
            for (int r = 0; r < m; ++r) {
                const std::size_t off = static_cast<std::size_t>(r) * n;
                const double* y = self.value.data() + off;
                const double* g = self.adj.data() + off;
                double dot = 0.0;
                for (int j = 0; j < n; ++j) dot += g[j] * y[j];
                for (int j = 0; j < n; ++j) A.adj[off + j] += y[j] * (g[j] - dot);
            }
        });
    }
    return out;
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps) {
    const int m = x.rows(), n = x.cols();
    if (gain.rows() != 1 || gain.cols() != n) shape_error("layer_norm gain", x, gain);
    if (bias.rows() != 1 || bias.cols() != n) shape_error("layer_norm bias", x, bias);

    std::vector<double> normalized(static_cast<std::size_t>(m) * n);
    std::vector<double> inv_std(m);
    std::vector<double> v(static_cast<std::size_t>(m) * n);
    for (int r = 0; r < m; ++r) {
        const double* xr = x.values().data() + static_cast<std::size_t>(r) * n;
        double mu = 0.0;
        for (int j = 0; j < n; ++j) mu += xr[j];
        mu /= n;
        double var = 0.0;
        for (int j = 0; j < n; ++j) var += (xr[j] - mu) * (xr[j] - mu);
        var /= n;
        const double inv = 1.0 / std::sqrt(var + eps);
        inv_std[r] = inv;
        for (int j = 0; j < n; ++j) {
            const double yh = (xr[j] - mu) * inv;
            normalized[static_cast<std::size_t>(r) * n + j] = yh;
            v[static_cast<std::size_t>(r) * n + j] = yh * gain.values()[j] + bias.values()[j];
        }
    }

    Tensor out(m, n, std::move(v));
    if (detail::grad_enabled() &&
        (x.requires_grad() || gain.requires_grad() || bias.requires_grad())) {
        attach(out, {x.node(), gain.node(), bias.node()},
               [m, n, normalized = std::move(normalized),
                inv_std = std::move(inv_std)](Node& self) {
                   Node& X = *self.parents[0];
                   Node& G = *self.parents[1];
                   Node& B = *self.parents[2];
                   const double* g = self.adj.data();
                   for (int r = 0; r < m; ++r) {
                       const std::size_t off = static_cast<std::size_t>(r) * n;
                       const double* yh = normalized.data() + off;
                       if (X.requires_grad) {
                           double s1 = 0.0, s2 = 0.0;
                           for (int j = 0; j < n; ++j) {
                               const double dyh = g[off + j] * G.value[j];
                               s1 += dyh;
                               s2 += dyh * yh[j];
                           }
                           for (int j = 0; j < n; ++j) {
                               const double dyh = g[off + j] * G.value[j];
                               X.adj[off + j] +=
                                   inv_std[r] * (dyh - s1 / n - yh[j] * s2 / n);
                           }
                       }
                       if (G.requires_grad)
                           for (int j = 0; j < n; ++j) G.adj[j] += g[off + j] * yh[j];
                       if (B.requires_grad)
                           for (int j = 0; j < n; ++j) B.adj[j] += g[off + j];
                   }
               });
    }
    return out;
}

Tensor mse_loss(const Tensor& pred, const Tensor& target) {
    if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
        shape_error("mse_loss", pred, target);
    }
    const std::size_t n = pred.values().size();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = pred.values()[i] - target.values()[i];
        acc += d * d;
    }
    Tensor out(1, 1, {acc / static_cast<double>(n)});
    if (tracking(pred, target)) {
        attach(out, {pred.node(), target.node()}, [n](Node& self) {
            Node& P = *self.parents[0];
            Node& T = *self.parents[1];
            const double g = self.adj[0];
            const double k = 2.0 / static_cast<double>(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double d = k * (P.value[i] - T.value[i]) * g;
                if (P.requires_grad) P.adj[i] += d;
                if (T.requires_grad) T.adj[i] -= d;
            }
        });
    }
    return out;
}

Tensor sum_all(const Tensor& a) {
    double acc = 0.0;
    for (double v : a.values()) acc += v;
    Tensor out(1, 1, {acc});
    if (tracking(a)) {
        attach(out, {a.node()}, [](Node& self) {
            Node& A = *self.parents[0];
            if (!A.requires_grad) return;
            const double g = self.adj[0];
            for (std::size_t i = 0; i < A.adj.size(); ++i) A.adj[i] += g;
        });
    }
    return out;
}

Tensor concat_rows(const std::vector<Tensor>& parts) {
    if (parts.empty()) throw std::invalid_argument("concat_rows: no inputs");
    const int n = parts[0].cols();
    int rows = 0;
    for (const Tensor& p : parts) {
        if (p.cols() != n) shape_error("concat_rows", parts[0], p);
        rows += p.rows();
    }
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(rows) * n);
    for (const Tensor& p : parts) v.insert(v.end(), p.values().begin(), p.values().end());

    Tensor out(rows, n, std::move(v));
    bool any_grad = false;
    for (const Tensor& p : parts) any_grad = any_grad || p.requires_grad();
    if (detail::grad_enabled() && any_grad) {
        std::vector<std::shared_ptr<Node>> parents;
        parents.reserve(parts.size());
        for (const Tensor& p : parts) parents.push_back(p.node());
        attach(out, std::move(parents), [](Node& self) {
            std::size_t off = 0;
            for (auto& p : self.parents) {
                if (p->requires_grad) {
                    for (std::size_t i = 0; i < p->adj.size(); ++i)
                        p->adj[i] += self.adj[off + i];
                }
                off += p->value.size();
            }
        });
    }
    return out;
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
    if (parts.empty()) throw std::invalid_argument("concat_cols: no inputs");
    const int m = parts[0].rows();
    int cols = 0;
    for (const Tensor& p : parts) {
        if (p.rows() != m) shape_error("concat_cols", parts[0], p);
        cols += p.cols();
    }
    std::vector<double> v(static_cast<std::size_t>(m) * cols);
    int coff = 0;
    for (const Tensor& p : parts) {
        for (int r = 0; r < m; ++r)
            for (int j = 0; j < p.cols(); ++j)
                v[static_cast<std::size_t>(r) * cols + coff + j] = p.at(r, j);
        coff += p.cols();
    }

    Tensor out(m, cols, std::move(v));
    bool any_grad = false;
    for (const Tensor& p : parts) any_grad = any_grad || p.requires_grad();
    if (detail::grad_enabled() && any_grad) {
        std::vector<std::shared_ptr<Node>> parents;
        parents.reserve(parts.size());
        for (const Tensor& p : parts) parents.push_back(p.node());
        attach(out, std::move(parents), [m, cols](Node& self) {
            int coff = 0;
            for (auto& p : self.parents) {
                const int pc = p->cols;
                if (p->requires_grad) {
                    for (int r = 0; r < m; ++r)
                        for (int j = 0; j < pc; ++j)
                            p->adj[static_cast<std::size_t>(r) * pc + j] +=
                                self.adj[static_cast<std::size_t>(r) * cols + coff + j];
                }
                coff += pc;
            }
        });
    }
    return out;
}

Tensor slice_row(const Tensor& a, int r) {
    if (r < 0 || r >= a.rows()) {
        throw std::invalid_argument("slice_row: row " + std::to_string(r) +
                                    " out of range for " + a.shape_str());
    }
    const int n = a.cols();
    std::vector<double> v(a.values().begin() + static_cast<std::size_t>(r) * n,
                          a.values().begin() + static_cast<std::size_t>(r + 1) * n);
    Tensor out(1, n, std::move(v));
    if (tracking(a)) {
        attach(out, {a.node()}, [r, n](Node& self) {
            Node& A = *self.parents[0];
            if (!A.requires_grad) return;
            for (int j = 0; j < n; ++j)
                A.adj[static_cast<std::size_t>(r) * n + j] += self.adj[j];
        });
    }
    return out;
}

Tensor gather_cols(const Tensor& a, const std::vector<int>& col_per_row) {
    if (static_cast<int>(col_per_row.size()) != a.rows()) {
        throw std::invalid_argument("gather_cols: need one column index per row of " +
                                    a.shape_str());
    }
    const int m = a.rows(), n = a.cols();
    std::vector<double> v(m);
    for (int r = 0; r < m; ++r) {
        const int c = col_per_row[r];
        if (c < 0 || c >= n) {
            throw std::invalid_argument("gather_cols: column " + std::to_string(c) +
                                        " out of range for " + a.shape_str());
        }
        v[r] = a.at(r, c);
    }
    Tensor out(m, 1, std::move(v));
    if (tracking(a)) {
        attach(out, {a.node()}, [idx = col_per_row, n](Node& self) {
            Node& A = *self.parents[0];
            if (!A.requires_grad) return;
            for (std::size_t r = 0; r < idx.size(); ++r)
                A.adj[r * n + idx[r]] += self.adj[r];
        });
    }
    return out;
}

}  // namespace polecart::ad
