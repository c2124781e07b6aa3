#include "sers/photon_stats.hpp"

#include "sers/parallel.hpp"

#include <Eigen/UmfPackSupport>

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <sstream>

namespace sers {

namespace {

constexpr double min_population = 1e-14;

// Sensor excitation count of a basis state; the two sensors are the last two
// (fastest varying) subsystems.
int sensor_excitations(std::size_t basis_index) {
    return static_cast<int>((basis_index & 1U) + ((basis_index >> 1U) & 1U));
}

double relative_move(double a, double b) {
    return std::abs(a - b) / std::max(std::abs(a), 1e-300);
}

std::string describe(double x) {
    std::ostringstream os;
    os.precision(3);
    os << x;
    return os.str();
}

}  // namespace

void SensorConfig::validate() const {
    if (!(Gamma > 0.0) || !std::isfinite(Gamma)) throw ParameterError("SensorConfig: Gamma must be positive");
    if (!(epsilon >= 0.0) || epsilon > Gamma / 20.0) {
        throw ParameterError("SensorConfig: epsilon must lie in [0, Gamma/20] (weak-sensor regime)");
    }
    if (!std::isfinite(omega_1) || !std::isfinite(omega_2)) throw ParameterError("SensorConfig: non-finite frequency");
}

SensorConfig raman_sensors(const LindbladModel& model, double Gamma, double epsilon_ratio) {
    SensorConfig cfg{model.omega_L - model.omega_v, model.omega_L + model.omega_v, Gamma, Gamma * epsilon_ratio};
    cfg.validate();
    return cfg;
}

LindbladModel attach_sensors(const LindbladModel& model, const SensorConfig& cfg) {
    cfg.validate();
    if (model.space->contains(labels::sensor1) || model.space->contains(labels::sensor2)) {
        throw DimensionError("attach_sensors: model already carries sensor subsystems");
    }
    LindbladModel out;
    out.kind = model.kind;
    out.omega_L = model.omega_L;
    out.omega_v = model.omega_v;
    out.cavity_label = model.cavity_label;
    out.space = std::make_shared<const CompositeSpace>(
        model.space->extended({SubsystemSpec::two_level(labels::sensor1), SubsystemSpec::two_level(labels::sensor2)}));

    const SparseMat id4 = identity(4).matrix();
    auto lift = [&](const Operator& op) { return Operator(out.space, kron(op.matrix(), id4)); };

    const Operator s1 = out.local(labels::sensor1, sigma_minus());
    const Operator s2 = out.local(labels::sensor2, sigma_minus());
    const Operator a = out.cavity_annihilator();
    const Operator ad = a.adjoint();
    out.H = lift(model.H) + (cfg.omega_1 - model.omega_L) * (s1.adjoint() * s1) +
            (cfg.omega_2 - model.omega_L) * (s2.adjoint() * s2) +
            cfg.epsilon * (ad * s1 + a * s1.adjoint() + ad * s2 + a * s2.adjoint());
    for (const auto& c : model.collapses) out.collapses.push_back({c.rate, lift(c.op)});
    out.collapses.push_back({cfg.Gamma, s1});
    out.collapses.push_back({cfg.Gamma, s2});
    return out;
}

namespace {

// Steady states of sensor-augmented models without factorizing the full
// augmented Liouvillian.
//
// Order the vectorized state by sensor sector (ket sensor state k, bra sensor
// state b) with the sensor-excitation count n(k) + n(b) as the outer key, and
// apply the diagonal scaling r^(n(k)+n(b)), r = epsilon/Gamma. In those
// coordinates every coupling that lowers the excitation count is O(r^2)
// relative to the sector diagonal blocks, which are the base Liouvillian plus
// a constant shift. The block lower-triangular part is therefore an excellent
// preconditioner, and defect-correction sweeps on the exact operator converge
// in a few iterations. Each distinct shift is factorized once per solver and
// reused across sensor configurations.
class SensorSolver {
public:
    explicit SensorSolver(const LindbladModel& base) : base_dim_(base.space->dimension()) {
        base_ = assemble(base);
        // Verifies the base kernel is one-dimensional; the damped sensors
        // cannot add steady states of their own.
        steady_state(base_);
    }

    SensorReadout readout(const LindbladModel& base, const SensorConfig& cfg);

private:
    struct ShiftKey {
        double re, im;
        bool operator<(const ShiftKey& o) const { return re < o.re || (re == o.re && im < o.im); }
    };
    using Lu = Eigen::UmfPackLU<SparseMat>;

    Lu& block_factor(const SparseMat& block, bool bordered, cplx shift);

    std::size_t base_dim_;
    Liouvillian base_;
    std::map<ShiftKey, std::unique_ptr<Lu>> cache_;
    std::unique_ptr<Lu> bordered_;
    std::vector<std::unique_ptr<SparseMat>> held_blocks_;
};

SensorSolver::Lu& SensorSolver::block_factor(const SparseMat& block, bool bordered, cplx shift) {
    if (bordered) {
        if (!bordered_) {
            held_blocks_.push_back(std::make_unique<SparseMat>(block));
            bordered_ = std::make_unique<Lu>();
            bordered_->umfpackControl()(UMFPACK_ORDERING) = UMFPACK_ORDERING_METIS;
            {
                std::lock_guard<std::mutex> lock(ordering_mutex());
                bordered_->analyzePattern(*held_blocks_.back());
            }
            bordered_->factorize(*held_blocks_.back());
            if (bordered_->info() != Eigen::Success) throw SolverError("sensor solve: bordered base block is singular");
        }
        return *bordered_;
    }
    const double unit = 1e-12 * std::max(1.0, std::abs(shift));
    const ShiftKey key{std::round(shift.real() / unit) * unit, std::round(shift.imag() / unit) * unit};
    auto it = cache_.find(key);
    if (it != cache_.end()) return *it->second;
    held_blocks_.push_back(std::make_unique<SparseMat>(block));
    auto lu = std::make_unique<Lu>();
    lu->umfpackControl()(UMFPACK_ORDERING) = UMFPACK_ORDERING_METIS;
    {
        std::lock_guard<std::mutex> lock(ordering_mutex());
        lu->analyzePattern(*held_blocks_.back());
    }
    lu->factorize(*held_blocks_.back());
    if (lu->info() != Eigen::Success) throw SolverError("sensor solve: shifted base block is singular");
    return *cache_.emplace(key, std::move(lu)).first->second;
}

SensorReadout SensorSolver::readout(const LindbladModel& base, const SensorConfig& cfg) {
    const LindbladModel aug = attach_sensors(base, cfg);
    const Liouvillian full = assemble(aug);
    const auto D = static_cast<Eigen::Index>(base_dim_);
    const Eigen::Index Dt = 4 * D;
    const Eigen::Index n0 = D * D;
    const Eigen::Index n = Dt * Dt;
    const double r = cfg.epsilon > 0.0 ? cfg.epsilon / cfg.Gamma : 1.0;

    // Sector order: by excitation count, then by sector id k + 4b.
    std::array<int, 16> order{};
    std::array<int, 16> position{};
    std::array<int, 16> excitations{};
    for (int sg = 0; sg < 16; ++sg) {
        order[static_cast<std::size_t>(sg)] = sg;
        excitations[static_cast<std::size_t>(sg)] = sensor_excitations(static_cast<std::size_t>(sg % 4)) +
                                                    sensor_excitations(static_cast<std::size_t>(sg / 4));
    }
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
        return excitations[static_cast<std::size_t>(x)] < excitations[static_cast<std::size_t>(y)];
    });
    for (int pos = 0; pos < 16; ++pos) position[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])] = pos;

    auto permute = [&](Eigen::Index q) {
        const Eigen::Index I = q % Dt;
        const Eigen::Index J = q / Dt;
        const auto sg = static_cast<std::size_t>((I % 4) + 4 * (J % 4));
        return static_cast<Eigen::Index>(position[sg]) * n0 + (I / 4) + (J / 4) * D;
    };
    std::vector<double> pow_r(5, 1.0);
    for (std::size_t k = 1; k < pow_r.size(); ++k) pow_r[k] = pow_r[k - 1] * r;
    auto block_scale = [&](Eigen::Index pos) {
        return pow_r[static_cast<std::size_t>(excitations[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])])];
    };

    // Scaled, permuted, bordered operator and its pieces.
    std::vector<Eigen::Triplet<cplx>> all, lower;
    std::array<std::vector<Eigen::Triplet<cplx>>, 16> diag;
    all.reserve(static_cast<std::size_t>(full.L.nonZeros() + Dt));
    auto add = [&](Eigen::Index p, Eigen::Index q, cplx v) {
        const Eigen::Index bp = p / n0, bq = q / n0;
        const cplx sv = v * (block_scale(bq) / block_scale(bp));
        all.emplace_back(p, q, sv);
        if (bp == bq) {
            diag[static_cast<std::size_t>(bp)].emplace_back(p % n0, q % n0, sv);
        } else if (excitations[static_cast<std::size_t>(order[static_cast<std::size_t>(bp)])] >
                   excitations[static_cast<std::size_t>(order[static_cast<std::size_t>(bq)])]) {
            lower.emplace_back(p, q, sv);
        }
    };
    for (Eigen::Index col = 0; col < full.L.outerSize(); ++col) {
        for (SparseMat::InnerIterator it(full.L, col); it; ++it) {
            if (it.row() == 0) continue;
            add(permute(it.row()), permute(col), it.value());
        }
    }
    for (Eigen::Index I = 0; I < Dt; ++I) add(0, permute(I + I * Dt), 1.0);
    for (std::size_t b = 0; b < 16; ++b) {
        for (Eigen::Index q = 0; q < n0; ++q) diag[b].emplace_back(q, q, 0.0);
    }

    SparseMat M(n, n), low(n, n);
    M.setFromTriplets(all.begin(), all.end());
    low.setFromTriplets(lower.begin(), lower.end());
    all.clear();
    lower.clear();

    // Diagonal blocks: the bordered base system for the ground sector and
    // L0 + c I elsewhere.
    std::array<Lu*, 16> factors{};
    const SparseMat& L0 = base_.L;
    for (std::size_t b = 0; b < 16; ++b) {
        SparseMat block(n0, n0);
        block.setFromTriplets(diag[b].begin(), diag[b].end());
        diag[b].clear();
        cplx shift{0.0, 0.0};
        if (b > 0) {
            shift = block.coeff(1, 1) - L0.coeff(1, 1);
            SparseMat diff = block - L0;
            for (Eigen::Index q = 0; q < n0; ++q) diff.coeffRef(q, q) -= shift;
            double mismatch = 0.0;
            for (Eigen::Index k = 0; k < diff.nonZeros(); ++k) mismatch = std::max(mismatch, std::abs(diff.valuePtr()[k]));
            if (mismatch > 1e-9 * std::max(1.0, one_norm(L0))) {
                throw SolverError("sensor solve: sector block is not a shifted base Liouvillian");
            }
        }
        block.makeCompressed();
        factors[b] = &block_factor(block, b == 0, shift);
    }

    auto precondition = [&](const Eigen::VectorXcd& rhs) {
        Eigen::VectorXcd y = Eigen::VectorXcd::Zero(n);
        Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(n);
        for (Eigen::Index b = 0; b < 16; ++b) {
            const Eigen::VectorXcd local = rhs.segment(b * n0, n0) - acc.segment(b * n0, n0);
            y.segment(b * n0, n0) = factors[static_cast<std::size_t>(b)]->solve(local);
            acc.noalias() += low.middleCols(b * n0, n0) * y.segment(b * n0, n0);
        }
        return y;
    };

    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
    rhs(0) = 1.0;
    Eigen::VectorXcd y = precondition(rhs);
    double res = 0.0;
    for (int it = 0; it < 60; ++it) {
        const Eigen::VectorXcd defect = rhs - M * y;
        res = defect.cwiseAbs().maxCoeff();
        if (!std::isfinite(res)) break;
        if (res < 1e-13) break;
        y += precondition(defect);
    }
    if (!std::isfinite(res) || res > 1e-11) {
        throw SolverError("sensor solve: defect correction did not converge (residual " + describe(res) + ")");
    }
    // Residual of the unscaled Liouvillian equations.
    {
        const Eigen::VectorXcd defect = rhs - M * y;
        double worst = 0.0;
        for (Eigen::Index p = 0; p < n; ++p) worst = std::max(worst, std::abs(defect(p)) * block_scale(p / n0));
        if (worst > 1e-9) throw SolverError("sensor solve: steady-state residual " + describe(worst) + " too large");
    }

    // Sector populations tr X_kk (unscaled).
    std::array<double, 4> pop{};
    for (std::size_t k = 0; k < 4; ++k) {
        const Eigen::Index b = position[k + 4 * k];
        double tr = 0.0;
        for (Eigen::Index i = 0; i < D; ++i) tr += y(b * n0 + i + i * D).real();
        pop[k] = tr * block_scale(b);
    }
    const double total = pop[0] + pop[1] + pop[2] + pop[3];
    SensorReadout out;
    out.n1 = (pop[2] + pop[3]) / total;
    out.n2 = (pop[1] + pop[3]) / total;
    out.n12 = pop[3] / total;
    if (!(out.n1 >= min_population) || !(out.n2 >= min_population)) {
        throw UndefinedCorrelationError("filtered g2: sensor population below 1e-14 (n1 = " + describe(out.n1) +
                                        ", n2 = " + describe(out.n2) + ")");
    }
    out.g2 = out.n12 / (out.n1 * out.n2);
    return out;
}

G2Set g2_set(SensorSolver& solver, const LindbladModel& model, const SensorConfig& cfg) {
    SensorConfig auto1 = cfg;
    auto1.omega_2 = cfg.omega_1;
    SensorConfig auto2 = cfg;
    auto2.omega_1 = cfg.omega_2;
    const SensorReadout x = solver.readout(model, cfg);
    G2Set s;
    s.cross = x.g2;
    s.n1 = x.n1;
    s.n2 = x.n2;
    s.auto_1 = solver.readout(model, auto1).g2;
    s.auto_2 = solver.readout(model, auto2).g2;
    return s;
}

}  // namespace

SensorReadout sensor_readout(const LindbladModel& model, const SensorConfig& cfg) {
    cfg.validate();
    SensorSolver solver(model);
    return solver.readout(model, cfg);
}

G2Set filtered_g2_set(const LindbladModel& model, const SensorConfig& cfg) {
    cfg.validate();
    SensorSolver solver(model);
    return g2_set(solver, model, cfg);
}

CsiResult filtered_g2(const LindbladModel& model, const SensorConfig& cfg, double tolerance) {
    cfg.validate();
    SensorSolver solver(model);
    const G2Set full = g2_set(solver, model, cfg);
    SensorConfig half = cfg;
    half.epsilon = 0.5 * cfg.epsilon;
    const G2Set h = g2_set(solver, model, half);

    CsiResult r;
    r.g2_cross = full.cross;
    r.g2_11 = full.auto_1;
    r.g2_22 = full.auto_2;
    r.R = r.g2_cross * r.g2_cross / (r.g2_11 * r.g2_22);
    r.g2_cross_half = h.cross;
    r.g2_11_half = h.auto_1;
    r.g2_22_half = h.auto_2;
    r.R_half = r.g2_cross_half * r.g2_cross_half / (r.g2_11_half * r.g2_22_half);
    r.n1 = full.n1;
    r.n2 = full.n2;
    r.converged = relative_move(r.g2_cross, r.g2_cross_half) < tolerance &&
                  relative_move(r.g2_11, r.g2_11_half) < tolerance &&
                  relative_move(r.g2_22, r.g2_22_half) < tolerance && relative_move(r.R, r.R_half) < tolerance;
    return r;
}

RatioMap csi_map(const ModelParams& p, const CsiMapSpec& spec) {
    if (spec.kind == ModelKind::bright) throw ConfigError("csi_map: the bright-mode model is not supported");
    if (spec.omega_c_prime.empty() || spec.omega_r.empty()) throw ConfigError("csi_map: empty grid");
    RatioMap map(spec.omega_c_prime, spec.omega_r);
    map.value_name = "log10R";
    const std::size_t ny = spec.omega_r.size();
    struct Cell {
        double value{0.0};
        bool ok{false};
        bool converged{false};
        std::string error;
    };
    std::vector<Cell> cells(map.size());
    parallel_for(map.size(), spec.workers, [&](std::size_t k) {
        Cell& c = cells[k];
        try {
            ModelParams q = p;
            q.omega_r = spec.omega_r[k % ny];
            const LindbladModel m = build_model(spec.kind, q, spec.g_om, spec.omega_c_prime[k / ny] - q.omega_L);
            const CsiResult r = filtered_g2(m, raman_sensors(m, spec.Gamma, spec.epsilon_ratio));
            if (!(r.R > 0.0) || !std::isfinite(r.R)) throw UndefinedCorrelationError("non-positive R");
            c.value = std::log10(r.R);
            c.converged = r.converged;
            c.ok = true;
        } catch (const Error& e) {
            c.error = e.what();
        }
    });
    for (std::size_t k = 0; k < cells.size(); ++k) {
        if (cells[k].ok) {
            map.set(k / ny, k % ny, cells[k].value);
            map.converged[k] = cells[k].converged;
        } else {
            map.mask(k / ny, k % ny, cells[k].error);
        }
    }
    return map;
}

}  // namespace sers
