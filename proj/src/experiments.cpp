#include "quasiflow/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "quasiflow/norms.hpp"
#include "quasiflow/paradiff.hpp"

namespace qf {

namespace {

double weak_index(double s, double alpha, double eps_prime, int sign) {
    return s - 1.0 + std::max(alpha - 1.0, 0.0) +
           (sign >= 0 ? eps_prime : -eps_prime);
}

RealField project_retained(const RealField& u) {
    return inverse_transform_real(dealias(forward_transform(u)));
}

int grid_size_for(double lambda) {
    // Exactly proportional grids keep the retained band kappa = k/lambda
    // identical across the family, so norm trends are not polluted by
    // resolution changes. A fixed floor would widen the band at small n.
    const int wanted = static_cast<int>(std::ceil(32.0 * lambda));
    int n = 64;
    while (n < wanted) n *= 2;
    return n;
}

std::vector<double> gap_seeds(double x_w, double lambda) {
    return {x_w, x_w + 0.5 / lambda, x_w - 0.5 / lambda};
}

// run one worker pool over the n range; body(i, record) fills records[i]
void run_pool(int jobs, int threads,
              const std::function<void(int)>& body) {
    threads = std::min(threads, jobs);
    if (threads <= 1) {
        for (int i = 0; i < jobs; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < jobs; i = next.fetch_add(1))
                body(i);
        });
    for (auto& th : pool) th.join();
}

SeparationRecord base_record(const RegimeExponents& r, int n,
                             const ExperimentConfig& cfg) {
    SeparationRecord rec;
    rec.n = n;
    rec.lambda = std::pow(2.0, n);
    rec.epsilon = cfg.force_epsilon_zero ? 0.0 : std::pow(rec.lambda, -r.delta1);
    rec.tau = std::pow(rec.lambda, -r.delta2);
    rec.grid_n = grid_size_for(rec.lambda);
    return rec;
}

void fill_norm_fields(SeparationRecord& rec, double d0, double d_tau,
                      double d_tau_weak) {
    rec.d0 = d0;
    rec.d_tau = d_tau;
    rec.d_tau_weak = d_tau_weak;
    rec.weak_ratio = d0 > 0.0 ? d_tau_weak / d0 : 0.0;
}

void fill_gap_fields(SeparationRecord& rec, const Trajectory& tu,
                     const Trajectory& tv, double x_w) {
    const auto seeds = gap_seeds(x_w, rec.lambda);
    const FlowMap fu = integrate_flow(tu, 0.0, rec.tau, seeds);
    const FlowMap fv = integrate_flow(tv, 0.0, rec.tau, seeds);
    rec.support_gap = std::abs(fu.positions[0] - fv.positions[0]);
    rec.gap_times_lambda = rec.support_gap * rec.lambda;
}

}  // namespace

int resolve_thread_count(int requested, int jobs) {
    int n = requested > 0 ? requested
                          : static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    if (const char* env = std::getenv("QUASIFLOW_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) n = std::min(n, cap);
    }
    return std::max(1, std::min(n, std::max(jobs, 1)));
}

std::vector<SeparationRecord> run_separation(double alpha,
                                             const RegimeExponents& r, int n_lo,
                                             int n_hi, double s,
                                             double eps_prime,
                                             const ExperimentConfig& cfg) {
    if (n_hi < n_lo) throw InvalidOrder("bad sweep range");
    const int jobs = n_hi - n_lo + 1;
    std::vector<SeparationRecord> out(jobs);
    const double sw = weak_index(s, alpha, eps_prime, cfg.eps_prime_sign);

    auto body = [&](int i) {
        const auto t0 = std::chrono::steady_clock::now();
        SeparationRecord rec = base_record(r, n_lo + i, cfg);
        try {
            const TorusGrid grid = TorusGrid::make(rec.grid_n);
            const AnsatzPair pair =
                make_ansatz_pair(grid, rec.lambda, rec.epsilon, s, cfg.x_w);
            const RealField u0 = project_retained(pair.u0);
            const RealField v0 = project_retained(pair.v0);
            const RealField u1 = linear_propagate(u0, alpha, -rec.tau,
                                                  cfg.solver.dispersive_kind);
            const RealField v1 = linear_propagate(v0, alpha, -rec.tau,
                                                  cfg.solver.dispersive_kind);
            const double d0 = sobolev_norm(u1 - v1, s);
            const Trajectory tu =
                solve_dispersive_burgers(u1, alpha, rec.tau, cfg.solver);
            const Trajectory tv =
                solve_dispersive_burgers(v1, alpha, rec.tau, cfg.solver);
            const RealField diff = tu.final_state() - tv.final_state();
            fill_norm_fields(rec, d0, sobolev_norm(diff, s),
                             sobolev_norm(diff, sw));
            if (cfg.with_flows) fill_gap_fields(rec, tu, tv, cfg.x_w);
        } catch (const std::exception& e) {
            rec.error = e.what();
        }
        rec.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        out[i] = rec;
    };
    run_pool(jobs, resolve_thread_count(cfg.threads, jobs), body);
    return out;
}

std::vector<SeparationRecord> run_system_separation(double gamma_order,
                                                    const RegimeExponents& r,
                                                    int n_lo, int n_hi, double s,
                                                    double eps_prime,
                                                    const ExperimentConfig& cfg) {
    if (n_hi < n_lo) throw InvalidOrder("bad sweep range");
    const int jobs = n_hi - n_lo + 1;
    std::vector<SeparationRecord> out(jobs);
    const double sw = weak_index(s, gamma_order, eps_prime, cfg.eps_prime_sign);

    auto pair_norm = [](const RealField& a1, const RealField& a2, double idx) {
        const double x = sobolev_norm(a1, idx), y = sobolev_norm(a2, idx);
        return std::sqrt(x * x + y * y);
    };

    auto body = [&](int i) {
        const auto t0 = std::chrono::steady_clock::now();
        SeparationRecord rec = base_record(r, n_lo + i, cfg);
        try {
            const TorusGrid grid = TorusGrid::make(rec.grid_n);
            const GridSymbol gamma = GridSymbol::from_multiplier(
                grid, multiplier_frac_abs(gamma_order));
            const AnsatzPair pair =
                make_ansatz_pair(grid, rec.lambda, rec.epsilon, s, cfg.x_w);
            const RealField zero = RealField::zeros(grid);
            auto [u1_1, u1_2] = system_linear_propagate(
                project_retained(pair.u0), zero, gamma, -rec.tau);
            auto [v1_1, v1_2] = system_linear_propagate(
                project_retained(pair.v0), zero, gamma, -rec.tau);
            const double d0 = pair_norm(u1_1 - v1_1, u1_2 - v1_2, s);
            const PairTrajectory tu = solve_symmetrized_system(
                u1_1, u1_2, gamma, v_rule_first_component(), rec.tau, cfg.solver);
            const PairTrajectory tv = solve_symmetrized_system(
                v1_1, v1_2, gamma, v_rule_first_component(), rec.tau, cfg.solver);
            const RealField diff1 = tu.states1.back() - tv.states1.back();
            const RealField diff2 = tu.states2.back() - tv.states2.back();
            fill_norm_fields(rec, d0, pair_norm(diff1, diff2, s),
                             pair_norm(diff1, diff2, sw));
            if (cfg.with_flows) {
                // transport velocity is the first component
                Trajectory first;
                first.times = tu.times;
                first.states = tu.states1;
                first.derivs = tu.derivs1;
                first.dt = tu.dt;
                Trajectory second;
                second.times = tv.times;
                second.states = tv.states1;
                second.derivs = tv.derivs1;
                second.dt = tv.dt;
                fill_gap_fields(rec, first, second, cfg.x_w);
            }
        } catch (const std::exception& e) {
            rec.error = e.what();
        }
        rec.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        out[i] = rec;
    };
    run_pool(jobs, resolve_thread_count(cfg.threads, jobs), body);
    return out;
}

namespace {

const char* kCsvHeader =
    "n,lambda,epsilon,tau,d0,d_tau,d_tau_weak,weak_ratio,support_gap,"
    "gap_times_lambda,grid_n,wall_time_s,error";

std::string fmt_double(double v) {
    if (!std::isfinite(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string csv_safe(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '"') c = ';';
    return s;
}

void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot open " + tmp);
        f << content;
        if (!f.good()) throw IoError("short write to " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw IoError("cannot rename " + tmp + " to " + path);
}

nlohmann::json json_number_or_null(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

}  // namespace

void export_records_csv(const std::vector<SeparationRecord>& rs,
                        const std::string& path) {
    std::ostringstream os;
    os << kCsvHeader << "\n";
    for (const auto& r : rs) {
        os << r.n << ',' << fmt_double(r.lambda) << ',' << fmt_double(r.epsilon)
           << ',' << fmt_double(r.tau) << ',' << fmt_double(r.d0) << ','
           << fmt_double(r.d_tau) << ',' << fmt_double(r.d_tau_weak) << ','
           << fmt_double(r.weak_ratio) << ',' << fmt_double(r.support_gap) << ','
           << fmt_double(r.gap_times_lambda) << ',' << r.grid_n << ','
           << fmt_double(r.wall_time_s) << ',' << csv_safe(r.error) << "\n";
    }
    atomic_write(path, os.str());
}

void export_records_jsonl(const std::vector<SeparationRecord>& rs,
                          const std::string& path) {
    std::ostringstream os;
    for (const auto& r : rs) {
        nlohmann::json j;
        j["n"] = r.n;
        j["lambda"] = json_number_or_null(r.lambda);
        j["epsilon"] = json_number_or_null(r.epsilon);
        j["tau"] = json_number_or_null(r.tau);
        j["d0"] = json_number_or_null(r.d0);
        j["d_tau"] = json_number_or_null(r.d_tau);
        j["d_tau_weak"] = json_number_or_null(r.d_tau_weak);
        j["weak_ratio"] = json_number_or_null(r.weak_ratio);
        j["support_gap"] = json_number_or_null(r.support_gap);
        j["gap_times_lambda"] = json_number_or_null(r.gap_times_lambda);
        j["grid_n"] = r.grid_n;
        j["wall_time_s"] = json_number_or_null(r.wall_time_s);
        j["error"] = r.error;
        os << j.dump() << "\n";
    }
    atomic_write(path, os.str());
}

std::vector<SeparationRecord> parse_records_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(f, line)) throw IoError("empty csv " + path);
    if (line != kCsvHeader) throw IoError("unexpected csv header in " + path);
    std::vector<SeparationRecord> out;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        while (cells.size() < 13) cells.emplace_back();  // trailing empty error
        SeparationRecord r;
        r.n = std::stoi(cells[0]);
        r.lambda = std::stod(cells[1]);
        r.epsilon = std::stod(cells[2]);
        r.tau = std::stod(cells[3]);
        r.d0 = std::stod(cells[4]);
        r.d_tau = std::stod(cells[5]);
        r.d_tau_weak = std::stod(cells[6]);
        r.weak_ratio = std::stod(cells[7]);
        r.support_gap = std::stod(cells[8]);
        r.gap_times_lambda = std::stod(cells[9]);
        r.grid_n = std::stoi(cells[10]);
        r.wall_time_s = std::stod(cells[11]);
        r.error = cells[12];
        out.push_back(r);
    }
    return out;
}

std::vector<SeparationRecord> parse_records_jsonl(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open " + path);
    std::vector<SeparationRecord> out;
    std::string line;
    auto num = [](const nlohmann::json& j, const char* key) {
        const auto& v = j.at(key);
        return v.is_null() ? std::nan("") : v.get<double>();
    };
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        const nlohmann::json j = nlohmann::json::parse(line);
        SeparationRecord r;
        r.n = j.at("n").get<int>();
        r.lambda = num(j, "lambda");
        r.epsilon = num(j, "epsilon");
        r.tau = num(j, "tau");
        r.d0 = num(j, "d0");
        r.d_tau = num(j, "d_tau");
        r.d_tau_weak = num(j, "d_tau_weak");
        r.weak_ratio = num(j, "weak_ratio");
        r.support_gap = num(j, "support_gap");
        r.gap_times_lambda = num(j, "gap_times_lambda");
        r.grid_n = j.at("grid_n").get<int>();
        r.wall_time_s = num(j, "wall_time_s");
        r.error = j.at("error").get<std::string>();
        out.push_back(r);
    }
    return out;
}

}  // namespace qf
