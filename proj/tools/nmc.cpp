#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "nmc/codec.hpp"
#include "nmc/container.hpp"
#include "nmc/error.hpp"
#include "nmc/metrics.hpp"
#include "nmc/pgm.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int exit_usage = 2;
constexpr int exit_io = 3;
constexpr int exit_format = 4;
constexpr int exit_crc = 5;
constexpr int exit_convergence = 6;

const std::vector<std::size_t> default_k_grid = {10, 20, 30, 40, 50, 75, 100, 150};

struct CompressOpts {
  std::string input, output;
  int method = 0;
  std::size_t k = 0;
  std::size_t block = 0;
  bool f64 = false;
};

struct BenchOpts {
  std::vector<std::string> images;
  std::vector<std::size_t> ks = default_k_grid;
  std::vector<int> methods = {1, 2, 3, 4};
  std::size_t block = 0;
  bool f64 = false;
  bool timing = false;
  std::string outdir = ".";
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_text(const fs::path& path, const std::string& text) {
  std::vector<std::uint8_t> bytes(text.begin(), text.end());
  nmc::write_file(path.string(), bytes);
}

void run_compress(const CompressOpts& o) {
  const nmc::Method method = nmc::method_from_int(o.method);
  const std::vector<std::uint8_t> raw = nmc::read_file(o.input);
  const nmc::Image img = nmc::read_pgm(raw);
  const nmc::BlockGrid grid = nmc::compress_image(img, method, o.k, o.block);
  const std::vector<std::uint8_t> bytes = nmc::serialize(grid, o.f64 ? 8 : 4);
  nmc::write_file(o.output, bytes);

  const nmc::TilePlan plan = nmc::plan_tiles(img.width, img.height, o.block);
  const std::uint64_t elements =
      std::uint64_t(grid.blocks.size()) * nmc::element_count(method, plan.block, o.k);
  const double cr_el = double(img.width) * double(img.height) / double(elements);
  const double cr_by =
      nmc::cr_bytes(std::uint64_t(img.width) * img.height, bytes.size());
  std::cout << "CR (elements): " << nmc::format_fixed(cr_el) << "\n"
            << "CR (bytes): " << nmc::format_fixed(cr_by) << "\n";
}

void run_decompress(const std::string& input, const std::string& output) {
  const nmc::BlockGrid grid = nmc::deserialize(nmc::read_file(input));
  nmc::save_pgm(output, nmc::decompress_grid(grid));
}

void run_metrics(const std::string& original, const std::string& reconstructed) {
  const nmc::Image a = nmc::load_pgm(original);
  const nmc::Image b = nmc::load_pgm(reconstructed);
  const double m = nmc::mse(a, b);
  std::cout << "MSE: " << nmc::format_fixed(m) << "\n"
            << "PSNR: " << nmc::format_fixed(nmc::psnr_from_mse(m)) << "\n";
}

void run_inspect(const std::string& input) {
  const nmc::ContainerHeader h = nmc::inspect(nmc::read_file(input));
  const nmc::TilePlan plan = nmc::plan_tiles(h.width, h.height, h.block_size);
  std::cout << "version: " << int(h.version) << "\n"
            << "method: " << nmc::method_name(h.method) << "\n"
            << "scalar width: " << int(h.scalar_width) << "\n"
            << "width: " << h.width << "\n"
            << "height: " << h.height << "\n"
            << "block size: " << h.block_size << "\n"
            << "k: " << h.k << "\n"
            << "blocks: " << plan.cols * plan.rows << "\n";
}

/// Per-image spectra, computed once and re-truncated across the whole k grid.
struct BlockSpectra {
  nmc::Matrix x;
  nmc::SymSpectrum sym;
  nmc::SkewSpectrum skew;
  nmc::SvdFactors svd;
};

std::string csv_header() { return "k,method1,method2,method3,method4"; }

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const nmc::CrcError*>(&e)) return exit_crc;
  if (dynamic_cast<const nmc::FormatError*>(&e)) return exit_format;
  if (dynamic_cast<const nmc::IoError*>(&e)) return exit_io;
  if (dynamic_cast<const nmc::ConvergenceError*>(&e)) return exit_convergence;
  if (dynamic_cast<const nmc::ArgumentError*>(&e) ||
      dynamic_cast<const nmc::DimensionError*>(&e))
    return exit_usage;
  return 1;
}

int run_bench(const BenchOpts& o) {
  std::set<int> methods(o.methods.begin(), o.methods.end());
  for (int m : methods) nmc::method_from_int(m);  // validates
  if (o.ks.empty()) throw nmc::ArgumentError("bench: empty k list");
  const fs::path outdir = o.outdir;
  fs::create_directories(outdir);

  std::string cr_rows;
  std::string cr_bytes_rows;
  std::string timing_rows = "image,method1,method2,method3,method4\n";
  bool wrote_cr = false;
  int first_failure = 0;

  for (const std::string& path : o.images) {
    try {
      const nmc::Image img = nmc::read_pgm(nmc::read_file(path));
      const nmc::TilePlan plan = nmc::plan_tiles(img.width, img.height, o.block);
      const std::size_t n = plan.block;
      for (std::size_t k : o.ks)
        if (k < 1 || k > n)
          throw nmc::ArgumentError("bench: k " + std::to_string(k) +
                                   " is outside [1, " + std::to_string(n) + "]");

      const bool want_sym = methods.count(1) || methods.count(3);
      const bool want_skew = methods.count(2) || methods.count(3);
      const bool want_svd = methods.count(4) != 0;
      double t_sym = 0.0, t_skew = 0.0, t_svd = 0.0;

      std::vector<BlockSpectra> spectra;
      for (nmc::Matrix& m : nmc::tile(img, o.block)) {
        BlockSpectra s;
        s.x = std::move(m);
        if (want_sym) {
          const auto t0 = std::chrono::steady_clock::now();
          s.sym = nmc::eig_symmetric(nmc::symmetric_part(s.x));
          t_sym += seconds_since(t0);
        }
        if (want_skew) {
          const auto t0 = std::chrono::steady_clock::now();
          s.skew = nmc::eig_skew(nmc::skew_symmetric_part(s.x));
          t_skew += seconds_since(t0);
        }
        if (want_svd) {
          const auto t0 = std::chrono::steady_clock::now();
          s.svd = nmc::svd(s.x);
          t_svd += seconds_since(t0);
        }
        spectra.push_back(std::move(s));
      }

      auto reconstruct = [&](int method, std::size_t k) {
        std::vector<nmc::Matrix> mats(spectra.size());
        nmc::parallel_for(spectra.size(), [&](std::size_t i) {
          const BlockSpectra& s = spectra[i];
          nmc::EncodedBlock e;
          switch (method) {
            case 1: e = nmc::make_block_m1(s.x, s.sym, k); break;
            case 2: e = nmc::make_block_m2(s.x, s.skew, k); break;
            case 3: e = nmc::make_block_m3(s.x, s.sym, s.skew, k); break;
            default: e = nmc::make_block_m4(s.x, s.svd, k); break;
          }
          mats[i] = nmc::decode_block(e);
        });
        return nmc::untile(plan, mats);
      };

      std::string psnr_rows = csv_header() + "\n";
      for (std::size_t k : o.ks) {
        psnr_rows += std::to_string(k);
        for (int m = 1; m <= 4; ++m) {
          psnr_rows += ",";
          if (methods.count(m))
            psnr_rows += nmc::format_fixed(nmc::psnr(img, reconstruct(m, k)));
        }
        psnr_rows += "\n";
      }
      const std::string stem = fs::path(path).stem().string();
      write_text(outdir / ("psnr_" + stem + ".csv"), psnr_rows);

      if (!wrote_cr) {
        // CR is a pure function of (method, n, k); the first image's block
        // order fixes n for the whole run.
        cr_rows = csv_header() + "\n";
        cr_bytes_rows = csv_header() + "\n";
        const std::size_t count = plan.cols * plan.rows;
        for (std::size_t k : o.ks) {
          cr_rows += std::to_string(k);
          cr_bytes_rows += std::to_string(k);
          for (int m = 1; m <= 4; ++m) {
            cr_rows += ",";
            cr_bytes_rows += ",";
            if (methods.count(m)) {
              const nmc::Method method = nmc::method_from_int(m);
              cr_rows += nmc::format_fixed(nmc::cr_elements(method, n, k));
              const std::uint64_t file_bytes =
                  nmc::container_header_bytes +
                  count * nmc::detail::block_payload_bytes(method, n, k, o.f64 ? 8 : 4) +
                  4;
              cr_bytes_rows += nmc::format_fixed(nmc::cr_bytes(
                  std::uint64_t(img.width) * img.height, file_bytes));
            }
          }
          cr_rows += "\n";
          cr_bytes_rows += "\n";
        }
        write_text(outdir / "cr.csv", cr_rows);
        write_text(outdir / "cr_bytes.csv", cr_bytes_rows);
        wrote_cr = true;
      }

      timing_rows += stem;
      const double per_method[4] = {t_sym, t_skew, t_sym + t_skew, t_svd};
      for (int m = 1; m <= 4; ++m) {
        timing_rows += ",";
        if (methods.count(m)) timing_rows += nmc::format_fixed(per_method[m - 1]);
      }
      timing_rows += "\n";
    } catch (const std::exception& e) {
      std::cerr << "bench: " << path << ": " << e.what() << "\n";
      if (first_failure == 0) first_failure = exit_code_for(e);
    }
  }
  if (o.timing) write_text(outdir / "timing.csv", timing_rows);
  return first_failure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Eigendecomposition and SVD truncation codec for grayscale images"};
  app.require_subcommand(1);
  int rc = 0;

  CompressOpts copts;
  CLI::App* compress = app.add_subcommand("compress", "Compress a PGM image");
  compress->add_option("input", copts.input, "source .pgm")->required();
  compress->add_option("output", copts.output, "destination .nmc")->required();
  compress->add_option("--method", copts.method, "1=symmetric 2=skew 3=joint 4=svd")
      ->required();
  compress->add_option("--k", copts.k, "retained spectral terms")->required();
  compress->add_option("--block", copts.block, "square block size (0 = whole image)");
  compress->add_flag("--f64", copts.f64, "store 64-bit scalars");
  compress->callback([&] { run_compress(copts); });

  std::string din, dout;
  CLI::App* decompress = app.add_subcommand("decompress", "Reconstruct a PGM image");
  decompress->add_option("input", din, "source .nmc")->required();
  decompress->add_option("output", dout, "destination .pgm")->required();
  decompress->callback([&] { run_decompress(din, dout); });

  std::string morig, mrecon;
  CLI::App* metrics = app.add_subcommand("metrics", "MSE and PSNR of an image pair");
  metrics->add_option("original", morig, "reference .pgm")->required();
  metrics->add_option("reconstructed", mrecon, "candidate .pgm")->required();
  metrics->callback([&] { run_metrics(morig, mrecon); });

  std::string iin;
  CLI::App* inspect = app.add_subcommand("inspect", "Print a container header");
  inspect->add_option("input", iin, "source .nmc")->required();
  inspect->callback([&] { run_inspect(iin); });

  BenchOpts bopts;
  CLI::App* bench = app.add_subcommand("bench", "PSNR/CR tables across a k grid");
  bench->add_option("images", bopts.images, "input .pgm files")->required();
  bench->add_option("--k", bopts.ks, "k grid (default 10 20 30 40 50 75 100 150)");
  bench->add_option("--methods", bopts.methods, "subset of 1 2 3 4");
  bench->add_option("--block", bopts.block, "square block size (0 = whole image)");
  bench->add_flag("--f64", bopts.f64, "byte CR assumes 64-bit scalars");
  bench->add_flag("--timing", bopts.timing, "also write timing.csv");
  bench->add_option("--out", bopts.outdir, "output directory (default .)");
  bench->callback([&] { rc = run_bench(bopts); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "nmc: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return rc;
}
