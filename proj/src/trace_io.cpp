#include "sparsemix/trace_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace sparsemix {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << std::setprecision(17);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    return in;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        out.push_back(cell);
    }
    return out;
}

}  // namespace

void ensure_directory(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create directory " + dir + ": " + ec.message());
}

void write_trace(const ChainTrace& trace, const std::string& dir) {
    ensure_directory(dir);

    json meta;
    meta["family"] = trace.family == Family::sfm ? "sfm" : "dpm";
    meta["model_order"] = trace.model_order;
    meta["n_obs"] = trace.n_obs;
    meta["theta_dim"] = trace.theta_dim;
    meta["theta_names"] = trace.theta_names;
    meta["has_shared_hyper"] = trace.has_shared_hyper;
    meta["n_sweeps"] = trace.sweeps.size();
    {
        auto out = open_out(dir + "/meta.json");
        out << meta.dump(2) << '\n';
    }

    {
        auto out = open_out(dir + "/trace.csv");
        out << "sweep,kplus,precision,loglik";
        if (trace.has_shared_hyper) out << ",b0";
        out << '\n';
        for (const auto& s : trace.sweeps) {
            out << s.sweep << ',' << s.kplus << ',' << s.precision << ',' << s.loglik;
            if (trace.has_shared_hyper) out << ',' << s.shared_hyper;
            out << '\n';
        }
    }

    {
        auto out = open_out(dir + "/theta.csv");
        out << "sweep,component,weight";
        for (const auto& name : trace.theta_names) out << ',' << name;
        out << '\n';
        for (const auto& s : trace.sweeps) {
            for (std::size_t c = 0; c < s.component_ids.size(); ++c) {
                out << s.sweep << ',' << s.component_ids[c] + 1 << ',' << s.component_weights[c];
                for (double v : s.component_theta[c]) out << ',' << v;
                out << '\n';
            }
        }
    }

    const bool has_alloc = !trace.sweeps.empty() && !trace.sweeps.front().allocations.empty();
    if (has_alloc) {
        auto out = open_out(dir + "/allocations.csv");
        out << "sweep";
        for (int i = 1; i <= trace.n_obs; ++i) out << ",s" << i;
        out << '\n';
        for (const auto& s : trace.sweeps) {
            out << s.sweep;
            for (int lab : s.allocations) out << ',' << lab + 1;
            out << '\n';
        }
    }
}

ChainTrace read_trace(const std::string& dir) {
    ChainTrace trace;
    {
        auto in = open_in(dir + "/meta.json");
        json meta = json::parse(in);
        trace.family = meta.at("family").get<std::string>() == "dpm" ? Family::dpm : Family::sfm;
        trace.model_order = meta.at("model_order").get<int>();
        trace.n_obs = meta.at("n_obs").get<int>();
        trace.theta_dim = meta.at("theta_dim").get<int>();
        trace.theta_names = meta.at("theta_names").get<std::vector<std::string>>();
        trace.has_shared_hyper = meta.at("has_shared_hyper").get<bool>();
    }

    std::map<long, std::size_t> sweep_row;
    {
        auto in = open_in(dir + "/trace.csv");
        std::string line;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto cells = split_csv(line);
            SweepRecord rec;
            rec.sweep = std::stol(cells.at(0));
            rec.kplus = std::stoi(cells.at(1));
            rec.precision = std::stod(cells.at(2));
            rec.loglik = std::stod(cells.at(3));
            if (trace.has_shared_hyper && cells.size() > 4) rec.shared_hyper = std::stod(cells[4]);
            sweep_row[rec.sweep] = trace.sweeps.size();
            trace.sweeps.push_back(std::move(rec));
        }
    }

    {
        auto in = open_in(dir + "/theta.csv");
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto cells = split_csv(line);
            long sweep = std::stol(cells.at(0));
            auto it = sweep_row.find(sweep);
            if (it == sweep_row.end())
                throw std::invalid_argument("theta.csv references unknown sweep");
            auto& rec = trace.sweeps[it->second];
            rec.component_ids.push_back(std::stoi(cells.at(1)) - 1);
            rec.component_weights.push_back(std::stod(cells.at(2)));
            std::vector<double> theta;
            for (std::size_t j = 3; j < cells.size(); ++j) theta.push_back(std::stod(cells[j]));
            if (static_cast<int>(theta.size()) != trace.theta_dim)
                throw std::invalid_argument("theta.csv row width disagrees with meta.json");
            rec.component_theta.push_back(std::move(theta));
        }
    }

    if (fs::exists(dir + "/allocations.csv")) {
        auto in = open_in(dir + "/allocations.csv");
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto cells = split_csv(line);
            long sweep = std::stol(cells.at(0));
            auto it = sweep_row.find(sweep);
            if (it == sweep_row.end())
                throw std::invalid_argument("allocations.csv references unknown sweep");
            auto& rec = trace.sweeps[it->second];
            for (std::size_t j = 1; j < cells.size(); ++j)
                rec.allocations.push_back(std::stoi(cells[j]) - 1);
            if (static_cast<int>(rec.allocations.size()) != trace.n_obs)
                throw std::invalid_argument("allocations.csv row width disagrees with meta.json");
        }
    }
    return trace;
}

void write_kplus_posterior(const KplusPosterior& post, const std::string& path) {
    json j;
    j["mode"] = post.mode;
    j["n_sweeps"] = post.n_sweeps;
    json pmf = json::object();
    for (const auto& [k, p] : post.pmf) pmf[std::to_string(k)] = p;
    j["pmf"] = pmf;
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

void write_identified(const IdentifiedModel& model, const std::string& dir) {
    ensure_directory(dir);
    json j;
    j["khat"] = model.khat;
    j["n_draws_used"] = model.n_draws_used;
    j["n_draws_discarded"] = model.n_draws_discarded;
    j["theta_names"] = model.theta_names;
    json comps = json::array();
    for (const auto& c : model.components) {
        json jc;
        jc["weight"] = {{"mean", c.weight_mean},
                        {"hpd_low", c.weight_hpd_low},
                        {"hpd_high", c.weight_hpd_high}};
        json params = json::array();
        for (std::size_t d = 0; d < c.mean.size(); ++d) {
            params.push_back({{"name", model.theta_names[d]},
                              {"mean", c.mean[d]},
                              {"hpd_low", c.hpd_low[d]},
                              {"hpd_high", c.hpd_high[d]}});
        }
        jc["params"] = params;
        jc["n_draws"] = c.n_draws;
        comps.push_back(jc);
    }
    j["components"] = comps;
    {
        auto out = open_out(dir + "/identified.json");
        out << j.dump(2) << '\n';
    }
    if (!model.final_partition.empty()) {
        auto out = open_out(dir + "/partition.csv");
        out << "obs,label\n";
        for (std::size_t i = 0; i < model.final_partition.size(); ++i)
            out << i + 1 << ',' << model.final_partition[i] + 1 << '\n';
    }
}

void write_evidence_csv(const std::vector<EvidenceRow>& rows, const std::string& path) {
    auto out = open_out(path);
    out << "K,method,log_evidence,std_error,note\n";
    for (const auto& r : rows) {
        out << r.K << ',' << r.method << ',';
        if (r.method == "unsupported")
            out << ",,";
        else
            out << r.log_value << ',' << r.std_error << ',';
        out << r.note << '\n';
    }
}

void write_prior_kplus_csv(const std::vector<double>& pmf, const std::string& path) {
    auto out = open_out(path);
    out << "kplus,probability\n";
    for (std::size_t k = 0; k < pmf.size(); ++k) out << k + 1 << ',' << pmf[k] << '\n';
}

void write_simstudy_csv(const std::vector<SimCellResult>& results, const std::string& path) {
    auto out = open_out(path);
    out << "prior,method,K,row,precision_mean,khat,ari,err,note\n";
    for (const auto& cell : results) {
        std::string head = cell.prior + ',' + cell.method + ',' +
                           (cell.K > 0 ? std::to_string(cell.K) : std::string());
        for (const auto& rep : cell.reps) {
            out << head << ",rep" << rep.replication << ',';
            if (rep.ok)
                out << rep.precision_mean << ',' << rep.khat << ',' << rep.ari << ',' << rep.err;
            else
                out << ",,,";
            out << ',' << rep.error << '\n';
        }
        out << head << ",mean," << cell.mean_precision << ',' << cell.mean_khat << ','
            << cell.mean_ari << ',' << cell.mean_err << ',' << cell.n_ok << " ok\n";
    }
}

}  // namespace sparsemix
