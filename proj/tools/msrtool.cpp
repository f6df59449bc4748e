// Command-line front end: shard files with the MSR code, rebuild them from
// any k shards, repair a single lost shard with optimal access, and run the
// construction verifier.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "msr/msr.hpp"

namespace {

void print_params(const msr::CodeParams& p) {
    std::cout << "n=" << p.n << " k=" << p.k << " d=" << p.d << "\n"
              << "q=" << p.q << " t=" << p.t << " r=" << p.r << "\n"
              << "alpha=" << p.alpha << " (q^ceil(n/q))"
              << " beta=" << p.beta << "\n"
              << "field GF(2^" << p.m << "), Q=" << (1u << p.m) << "\n"
              << "repair download d*beta=" << static_cast<std::uint64_t>(p.d) * p.beta
              << " of k*alpha=" << static_cast<std::uint64_t>(p.k) * p.alpha << " symbols\n";
    if (p.delta > 0)
        std::cout << "shortened code: delta=" << p.delta << " virtual zero node"
                  << (p.delta > 1 ? "s" : "") << " (base n=" << p.n_base << ")\n";
}

int run(int argc, char** argv) {
    CLI::App app{"optimal-access MSR erasure code tool"};
    app.require_subcommand(1);

    int n = 0, k = 0, d = 0;
    std::string input, output, shards_dir;
    int failed_id = -1;
    bool exhaustive = false;
    int trials = 100;

    auto add_nkd = [&](CLI::App* cmd) {
        cmd->add_option("--n", n, "total nodes")->required();
        cmd->add_option("--k", k, "data nodes")->required();
        cmd->add_option("--d", d, "helper count (k+1..k+3)")->required();
    };

    CLI::App* cmd_params = app.add_subcommand("params", "print derived code parameters");
    add_nkd(cmd_params);

    CLI::App* cmd_encode = app.add_subcommand("encode", "shard a file across n nodes");
    add_nkd(cmd_encode);
    cmd_encode->add_option("--input", input, "file to shard")->required();
    cmd_encode->add_option("--out-dir", shards_dir, "directory for the shard files")->required();

    CLI::App* cmd_decode = app.add_subcommand("decode", "rebuild the file from >= k shards");
    cmd_decode->add_option("--shards", shards_dir, "directory holding shard files")->required();
    cmd_decode->add_option("--out", output, "path for the rebuilt file")->required();

    CLI::App* cmd_repair = app.add_subcommand("repair", "rebuild one lost shard from d helpers");
    cmd_repair->add_option("--failed", failed_id, "node id of the lost shard")->required();
    cmd_repair->add_option("--shards", shards_dir, "directory holding shard files")->required();
    cmd_repair->add_option("--out", output, "path for the rebuilt shard")->required();

    CLI::App* cmd_verify = app.add_subcommand("verify", "run the construction verifier");
    add_nkd(cmd_verify);
    cmd_verify->add_flag("--exhaustive", exhaustive,
                         "enumerate every pattern regardless of the sampling budget");
    cmd_verify->add_option("--trials", trials, "random theta draws for the determinant check");

    CLI11_PARSE(app, argc, argv);

    if (cmd_params->parsed()) {
        print_params(msr::derive_params(n, k, d));
        return 0;
    }
    if (cmd_encode->parsed()) {
        const msr::CodeParams p = msr::derive_params(n, k, d);
        const msr::Field f(p.m);
        const msr::ThetaTable tt = msr::assign_thetas(p, f);
        msr::encode_file(p, tt, input, shards_dir);
        std::cout << "wrote " << p.n << " shards to " << shards_dir << "\n";
        return 0;
    }
    if (cmd_decode->parsed()) {
        msr::decode_file(shards_dir, output);
        std::cout << "rebuilt " << output << "\n";
        return 0;
    }
    if (cmd_repair->parsed()) {
        const msr::FileRepairStats stats = msr::repair_file(shards_dir, failed_id, output);
        std::cout << "rebuilt shard for node " << failed_id << " -> " << output << "\n";
        std::cout << "helpers:";
        for (int h : stats.helpers) std::cout << " " << h;
        std::cout << "\nbytes read per helper: " << stats.bytes_read_per_helper << " ("
                  << stats.stripe_count << " stripes x beta symbols)\n";
        return 0;
    }
    // verify
    const msr::CodeParams p = msr::derive_params(n, k, d);
    const msr::Field f(p.m);
    const msr::ThetaTable tt = msr::assign_thetas(p, f);
    const std::uint64_t budget = exhaustive ? UINT64_MAX : 100000;
    bool ok = true;
    for (const msr::VerificationReport& report :
         {msr::verify_thetas(p, tt), msr::verify_base_determinants(p, tt, trials),
          msr::verify_mds(p, tt, budget), msr::verify_repair(p, tt, budget)}) {
        report.render(std::cout);
        ok = ok && report.all_pass();
    }
    if (!ok) {
        std::cout << "verification FAILED\n";
        return 2;
    }
    std::cout << "all checks passed\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const msr::internal_error& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    } catch (const msr::singular_error& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    } catch (const msr::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
