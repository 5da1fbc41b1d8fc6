#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "gkpsim/io.hpp"
#include "gkpsim/lattice_pdf.hpp"
#include "gkpsim/resource.hpp"
#include "gkpsim/tableau.hpp"
#include "gkpsim/theta.hpp"
#include "gkpsim/zgw.hpp"

#ifndef GKPSIM_GIT_DESCRIBE
#define GKPSIM_GIT_DESCRIBE "unknown"
#endif

using json = nlohmann::json;
using namespace gkpsim;

namespace {

const char* kManifestSchema = "gkpsim-manifest/1";

std::string sha256_hex(const std::string& data)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return os.str();
}

std::string utc_now()
{
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct Run {
    std::vector<std::string> argv;
    std::string command;
    std::string out_path;       // empty: stdout
    std::string manifest_path;  // empty: next to the output, or stderr
    std::optional<std::uint64_t> seed;
    int threads_flag = 0;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    std::string started_at = utc_now();

    int threads() const
    {
        if (threads_flag > 0) return threads_flag;
        if (const char* env = std::getenv("GKPSIM_THREADS")) {
            try {
                const int t = std::stoi(env);
                if (t > 0) return t;
            } catch (const std::exception&) {
            }
            throw ValidationError("threads", "GKPSIM_THREADS must be a positive integer");
        }
        return 1;
    }

    void emit(const std::string& content) const
    {
        if (out_path.empty()) {
            std::cout << content;
            std::cout.flush();
        } else {
            std::ofstream f(out_path, std::ios::binary);
            if (!f) throw std::runtime_error("cannot write " + out_path);
            f << content;
        }
        json m;
        m["schema_version"] = kManifestSchema;
        m["circuit_schema"] = "gkpsim-circuit/1";
        m["command"] = command;
        m["arguments"] = argv;
        m["seed"] = seed ? json(*seed) : json(nullptr);
        m["git_describe"] = GKPSIM_GIT_DESCRIBE;
        m["started_at"] = started_at;
        m["wall_clock_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        m["threads"] = threads();
        m["outputs"] = json::array({{{"path", out_path.empty() ? "-" : out_path}, {"sha256", sha256_hex(content)}}});
        const std::string text = m.dump(2) + "\n";
        std::string path = manifest_path;
        if (path.empty() && !out_path.empty()) path = out_path + ".manifest.json";
        if (path.empty()) {
            std::cerr << text;
        } else {
            std::ofstream f(path, std::ios::binary);
            if (!f) throw std::runtime_error("cannot write " + path);
            f << text;
        }
    }
};

void add_common(CLI::App* app, Run& run)
{
    app->add_option("--out", run.out_path, "output file (default stdout)");
    app->add_option("--manifest", run.manifest_path, "manifest file (default <out>.manifest.json, or stderr)");
    app->add_option("--threads", run.threads_flag, "worker threads (fallback GKPSIM_THREADS)")->check(CLI::PositiveNumber);
}

json rational_matrix_json(const RationalMatrix& M)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(format_rational(M(i, j)));
        rows.push_back(row);
    }
    return rows;
}

void require_ideal_zero(const CircuitDescription& c)
{
    for (const auto& in : c.inputs)
        if (in.kind != InputKind::Ideal || in.label != 0)
            throw ValidationError("ideal_zero_inputs", "lattice PDFs take ideal |0> inputs on every mode");
}

AngleSpec angle_from_flags(const std::string& cot, const std::string& pi_multiple, bool irrational)
{
    const int given = !cot.empty() + !pi_multiple.empty() + irrational;
    if (given != 1) throw ValidationError("angle", "give exactly one of --cot, --pi-multiple, --irrational");
    if (!cot.empty()) return AngleSpec::cotangent(parse_rational(cot));
    if (!pi_multiple.empty()) return AngleSpec::pi_fraction(parse_rational(pi_multiple));
    return AngleSpec::irrational();
}

const char* variant_name(AngleClass::Variant v)
{
    switch (v) {
        case AngleClass::Variant::RationalCotangent: return "rational-cotangent";
        case AngleClass::Variant::PiMultiple: return "pi-multiple";
        case AngleClass::Variant::IrrationalCotangent: return "irrational-cotangent";
    }
    return "?";
}

// Realistic inputs take --delta-db when it is given.
void override_delta(CircuitDescription& c, const std::string& delta_db)
{
    if (delta_db.empty()) return;
    const double delta = parse_delta(delta_db.find("dB") == std::string::npos ? delta_db + "dB" : delta_db);
    for (auto& in : c.inputs)
        if (in.kind == InputKind::Realistic) in.delta = delta;
}

struct ModeZGW {
    bool ideal = false;
    IdealZGW ideal_zgw;
    ZGWGridSingleMode grid;
};

std::vector<ModeZGW> mode_zgws(const CircuitDescription& c, int resolution, int threads)
{
    const GKPParameters p = GKPParameters::make(c.d);
    std::vector<ModeZGW> out;
    for (const auto& in : c.inputs) {
        ModeZGW m;
        if (in.kind == InputKind::Ideal) {
            std::vector<cdouble> psi(c.d, 0.0);
            psi[in.label] = 1.0;
            m.ideal = true;
            m.ideal_zgw = zgw_ideal(LogicalDensityMatrix::pure(psi));
        } else {
            GaussianSum g;
            double delta = 1.0;
            if (in.kind == InputKind::Vacuum) {
                g = vacuum_state();
            } else {
                RealisticGKPState st;
                st.d = c.d;
                st.delta = delta = in.delta;
                st.amplitudes = in.amplitudes;
                g = st.gaussian_sum();
            }
            m.grid = zgw_grid(characteristic_table(g, c.d, zgw_truncation(p.ell, delta), threads), resolution, 0.5, threads);
        }
        out.push_back(std::move(m));
    }
    return out;
}

std::vector<double> linspace(double lo, double hi, int n)
{
    if (n < 1) throw ValidationError("nonempty_grid", "grid needs at least one point");
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    return v;
}

}  // namespace

int main(int argc, char** argv)
{
    Run run;
    run.argv.assign(argv, argv + argc);
    CLI::App app{"gkpsim: classical simulation of GKP circuits"};
    app.require_subcommand(1);

    // pdf
    std::string circuit_path;
    auto* pdf = app.add_subcommand("pdf", "exact lattice PDF of an ideal-GKP Gaussian circuit");
    pdf->add_option("--circuit", circuit_path, "circuit JSON")->required();
    add_common(pdf, run);

    // sample
    std::size_t count = 0;
    std::uint64_t seed = 0;
    std::string window = "-10:10";
    auto* smp = app.add_subcommand("sample", "sample outcome vectors from the lattice PDF");
    smp->add_option("--circuit", circuit_path, "circuit JSON")->required();
    smp->add_option("--count", count, "number of samples")->required();
    smp->add_option("--seed", seed, "master seed");
    smp->add_option("--window", window, "lo:hi box applied to every mode");
    add_common(smp, run);

    // spacing / theta-scan
    std::string cot, pi_multiple;
    bool irrational = false;
    double eps = 1e-3, x_lo = -5, x_hi = 5;
    int points = 2001;
    auto* spc = app.add_subcommand("spacing", "comb spacing of a rotated ideal GKP state");
    auto* tsc = app.add_subcommand("theta-scan", "regularised rotated-comb density as CSV");
    for (auto* sc : {spc, tsc}) {
        sc->add_option("--cot", cot, "cot(theta) as p/q");
        sc->add_option("--pi-multiple", pi_multiple, "theta / pi as p/q");
        sc->add_flag("--irrational", irrational, "irrational cotangent");
        sc->add_option("--eps", eps, "regularisation epsilon");
        add_common(sc, run);
    }
    tsc->add_option("--x-lo", x_lo, "scan start in x");
    tsc->add_option("--x-hi", x_hi, "scan end in x");
    tsc->add_option("--points", points, "number of scan points")->check(CLI::PositiveNumber);

    // tableau run
    std::size_t shots = 1;
    auto* tab = app.add_subcommand("tableau", "qudit stabilizer tableau simulation");
    tab->require_subcommand(1);
    auto* tab_run = tab->add_subcommand("run", "run a Clifford circuit with measurements");
    tab_run->add_option("--circuit", circuit_path, "circuit JSON")->required();
    tab_run->add_option("--shots", shots, "shots")->check(CLI::PositiveNumber);
    tab_run->add_option("--seed", seed, "master seed");
    add_common(tab_run, run);

    // zgw
    std::string delta_db;
    int resolution = 256;
    double epsilon = 0.05, fail_prob = 0.05, bin_width = 0;
    std::size_t samples = 0;
    auto* zgw = app.add_subcommand("zgw", "Zak-Gross Wigner functions");
    zgw->require_subcommand(1);
    auto* zg_grid = zgw->add_subcommand("grid", "ZGW values on a grid, CSV (mode, u, v, value)");
    auto* zg_neg = zgw->add_subcommand("negativity", "per-mode and total negativity M");
    auto* zg_est = zgw->add_subcommand("estimate", "negativity-weighted estimate of the modular-position PDF");
    for (auto* sc : {zg_grid, zg_neg, zg_est}) {
        sc->add_option("--circuit", circuit_path, "circuit JSON")->required();
        sc->add_option("--delta-db", delta_db, "squeezing of realistic inputs, in dB");
        sc->add_option("--resolution", resolution, "grid points per axis")->check(CLI::PositiveNumber);
        add_common(sc, run);
    }
    zg_est->add_option("--epsilon", epsilon, "additive error");
    zg_est->add_option("--delta", fail_prob, "failure probability");
    zg_est->add_option("--samples", samples, "sample count (default: the Hoeffding bound)");
    zg_est->add_option("--bin-width", bin_width, "bin width (default ell/64)");
    auto* est_seed = zg_est->add_option("--seed", seed, "master seed")->required();
    (void)est_seed;

    // rom
    std::string state = "gkp", theta_text = "0", phi_text = "pi/4";
    std::optional<double> threshold;
    int theta_steps = 100, delta_steps = 100, zak_grid = 64;
    double delta_min = 0.05, delta_max = 1.0;
    auto* rom_cmd = app.add_subcommand("rom", "robustness of magic of GKP-projected states");
    rom_cmd->require_subcommand(1);
    auto* rom_single = rom_cmd->add_subcommand("single", "ROM of one projected state, JSON");
    auto* rom_sw = rom_cmd->add_subcommand("sweep", "ROM over a (theta, delta) grid, CSV");
    for (auto* sc : {rom_single, rom_sw}) {
        sc->add_option("--phi", phi_text, "relative phase, e.g. pi/4");
        sc->add_option("--threshold", threshold, "distillation threshold R*");
        sc->add_option("--zak-grid", zak_grid, "quadrature points per axis");
        add_common(sc, run);
    }
    rom_single->add_option("--state", state, "vacuum or gkp")->check(CLI::IsMember({"vacuum", "gkp"}));
    rom_single->add_option("--delta-db", delta_db, "squeezing in dB");
    rom_single->add_option("--theta", theta_text, "Bloch angle theta");
    rom_sw->add_option("--theta-steps", theta_steps, "theta grid over [0, pi]")->check(CLI::PositiveNumber);
    rom_sw->add_option("--delta-steps", delta_steps, "delta grid size")->check(CLI::PositiveNumber);
    rom_sw->add_option("--delta-min", delta_min, "smallest delta");
    rom_sw->add_option("--delta-max", delta_max, "largest delta");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: arguments: " << e.what() << "\n";
        return 2;
    }

    try {
        if (pdf->parsed()) {
            run.command = "pdf";
            const CircuitDescription c = load_circuit(circuit_path);
            require_ideal_zero(c);
            const LatticePDF p = build_pdf(c.total_operation());
            const SpacingSummary s = spacing_summary(p);
            json j;
            j["RinvT"] = rational_matrix_json(p.RinvT_exact);
            json t = json::array();
            for (Eigen::Index i = 0; i < p.t.size(); ++i) t.push_back(p.t[i].convert_to<int>());
            j["t"] = t;
            j["c"] = std::vector<double>(p.c.data(), p.c.data() + p.c.size());
            json ss;
            json so = json::array();
            for (const auto& q : s.spacing_over_sqrt_pi) so.push_back(format_rational(q));
            ss["spacing_over_sqrt_pi"] = so;
            ss["spacing"] = s.spacing;
            ss["offset"] = s.offset;
            ss["cell_volume"] = s.cell_volume;
            j["spacing_summary"] = ss;
            run.emit(j.dump(2) + "\n");
        } else if (smp->parsed()) {
            run.command = "sample";
            run.seed = seed;
            const CircuitDescription c = load_circuit(circuit_path);
            require_ideal_zero(c);
            const auto colon = window.find(':');
            if (colon == std::string::npos) throw ValidationError("window", "window must be lo:hi");
            const double lo = parse_real(window.substr(0, colon)), hi = parse_real(window.substr(colon + 1));
            if (!(lo < hi)) throw ValidationError("window", "window needs lo < hi");
            Box box{Vector<double>::Constant(c.n, lo), Vector<double>::Constant(c.n, hi)};
            const auto pts = sample(build_pdf(c.total_operation()), count, box, seed);
            std::vector<std::string> header;
            for (int i = 0; i < c.n; ++i) header.push_back("x" + std::to_string(i));
            CsvTable csv(header);
            for (const auto& x : pts) {
                std::vector<std::string> row;
                for (Eigen::Index i = 0; i < x.size(); ++i) row.push_back(format_real(x[i]));
                csv.add(row);
            }
            run.emit(csv.str());
        } else if (spc->parsed()) {
            run.command = "spacing";
            const AngleClass cls = classify_angle(angle_from_flags(cot, pi_multiple, irrational));
            json j;
            j["variant"] = variant_name(cls.variant);
            if (cls.variant == AngleClass::Variant::RationalCotangent) {
                j["cot"] = format_rational(Rational(cls.u, cls.v));
                j["branch"] = cls.v % 2 == 1 ? "odd-v" : "even-v";
            } else {
                j["theta_over_pi"] = cls.k.str();
                j["branch"] = "pi-multiple";
            }
            const CombSpacing sp = rotated_comb_spacing(cls, eps);
            j["spacing"] = sp.spacing;
            j["spacing_over_sqrt_pi"] = sp.spacing / std::sqrt(std::numbers::pi);
            j["source"] = sp.source == CombSpacing::Source::Formula ? "formula" : "numeric";
            run.emit(j.dump(2) + "\n");
        } else if (tsc->parsed()) {
            run.command = "theta-scan";
            const AngleClass cls = classify_angle(angle_from_flags(cot, pi_multiple, irrational));
            CsvTable csv({"x", "density"});
            for (double x : linspace(x_lo, x_hi, points)) csv.add({format_real(x), format_real(rotated_pdf_numeric(x, cls, eps))});
            run.emit(csv.str());
        } else if (tab_run->parsed()) {
            run.command = "tableau run";
            run.seed = seed;
            const CircuitDescription c = load_circuit(circuit_path);
            const auto records = run_tableau_circuit(c, shots, seed, run.threads());
            const std::size_t k = records.empty() ? 0 : records[0].outcomes.size();
            std::vector<std::string> header{"shot"};
            for (std::size_t i = 0; i < k; ++i) header.push_back("m" + std::to_string(i));
            for (std::size_t i = 0; i < k; ++i) header.push_back("deterministic" + std::to_string(i));
            CsvTable csv(header);
            for (std::size_t s = 0; s < records.size(); ++s) {
                std::vector<std::string> row{std::to_string(s)};
                for (long o : records[s].outcomes) row.push_back(std::to_string(o));
                for (bool b : records[s].deterministic) row.push_back(b ? "1" : "0");
                csv.add(row);
            }
            run.emit(csv.str());
        } else if (zg_grid->parsed() || zg_neg->parsed()) {
            run.command = zg_grid->parsed() ? "zgw grid" : "zgw negativity";
            CircuitDescription c = load_circuit(circuit_path);
            override_delta(c, delta_db);
            const auto modes = mode_zgws(c, resolution, run.threads());
            if (zg_grid->parsed()) {
                CsvTable csv({"mode", "u", "v", "value"});
                for (std::size_t m = 0; m < modes.size(); ++m) {
                    if (modes[m].ideal) {
                        const IdealZGW& z = modes[m].ideal_zgw;
                        for (int a = 0; a < z.d; ++a)
                            for (int b = 0; b < z.d; ++b)
                                csv.add({std::to_string(m), format_real(a * z.ell), format_real(b * z.ell), format_real(z.weights(a, b))});
                        continue;
                    }
                    const ZGWGridSingleMode& g = modes[m].grid;
                    for (int a = 0; a < g.resolution; ++a)
                        for (int b = 0; b < g.resolution; ++b)
                            csv.add({std::to_string(m), format_real(g.coord(a)), format_real(g.coord(b)), format_real(g.at(a, b))});
                }
                run.emit(csv.str());
            } else {
                json per = json::array();
                double total = 1;
                bool ok = true;
                for (const auto& m : modes) {
                    const NegativityReport r = m.ideal ? negativity(m.ideal_zgw) : negativity(m.grid);
                    json e;
                    e["M"] = r.total_M;
                    e["standardisation_ok"] = r.standardisation_ok;
                    if (!m.ideal) {
                        e["integral"] = m.grid.integral();
                        e["min_value"] = m.grid.min_value();
                    }
                    per.push_back(e);
                    total *= r.total_M;
                    ok = ok && r.standardisation_ok;
                }
                json j;
                j["per_mode"] = per;
                j["total_M"] = total;
                j["standardisation_ok"] = ok;
                run.emit(j.dump(2) + "\n");
            }
        } else if (zg_est->parsed()) {
            run.command = "zgw estimate";
            run.seed = seed;
            CircuitDescription c = load_circuit(circuit_path);
            override_delta(c, delta_db);
            EstimatorConfig cfg;
            cfg.epsilon = epsilon;
            cfg.delta = fail_prob;
            cfg.N = samples;
            cfg.bin_width = bin_width;
            cfg.resolution = resolution;
            cfg.threads = run.threads();
            const EstimateResult r = estimate_pdf(c, cfg, seed);
            std::vector<std::string> header;
            for (std::size_t i = 0; i < r.measured_modes.size(); ++i) header.push_back("bin_center" + std::to_string(r.measured_modes[i]));
            header.push_back("probability");
            header.push_back("stderr");
            CsvTable csv(header);
            for (const auto& b : r.bins) {
                std::vector<std::string> row;
                for (double x : b.centre) row.push_back(format_real(x));
                row.push_back(format_real(b.probability));
                row.push_back(format_real(b.stderr_));
                csv.add(row);
            }
            run.emit(csv.str());
        } else if (rom_single->parsed()) {
            run.command = "rom single";
            SSDConfig cfg;
            cfg.zak_grid = zak_grid;
            LogicalDensityMatrix rho;
            double delta = 0;
            if (state == "vacuum") {
                rho = stabilizer_ssd(vacuum_state(), 2, cfg);
            } else {
                if (delta_db.empty()) throw ValidationError("squeezing", "--delta-db is required for gkp states");
                delta = parse_delta(delta_db.find("dB") == std::string::npos ? delta_db + "dB" : delta_db);
                rho = stabilizer_ssd(gkp_theta_family(delta, parse_real(theta_text), parse_real(phi_text)).gaussian_sum(), 2, cfg);
            }
            const ROMReport r = rom(rho, threshold);
            json j;
            j["state"] = state;
            if (state == "gkp") {
                j["delta"] = delta;
                j["theta"] = parse_real(theta_text);
                j["phi"] = parse_real(phi_text);
            }
            j["bloch"] = {r.bloch.x, r.bloch.y, r.bloch.z};
            j["rom"] = r.rom;
            j["fidelity_T"] = r.fidelity_to_T;
            j["distillable"] = r.distillable;
            j["threshold"] = threshold ? json(*threshold) : json(nullptr);
            run.emit(j.dump(2) + "\n");
        } else if (rom_sw->parsed()) {
            run.command = "rom sweep";
            SSDConfig cfg;
            cfg.zak_grid = zak_grid;
            const ROMSweep sw = rom_sweep(linspace(delta_min, delta_max, delta_steps), linspace(0, std::numbers::pi, theta_steps),
                                          parse_real(phi_text), cfg, threshold, run.threads());
            CsvTable csv({"theta", "delta", "rom", "fidelity_T", "distillable"});
            for (const auto& cell : sw.cells)
                csv.add({format_real(cell.theta), format_real(cell.delta), format_real(cell.report.rom),
                         format_real(cell.report.fidelity_to_T), cell.report.distillable ? "1" : "0"});
            run.emit(csv.str());
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
