#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "krein/commands.hpp"

namespace {

using krein::commands::CommandResult;
using krein::commands::CommonOptions;
using krein::io::json;

// "name=value" overrides for the tolerance set.
void apply_tolerance(CommonOptions& opt, const std::string& item) {
  const auto eq = item.find('=');
  if (eq == std::string::npos) throw krein::io::SchemaError("--tol expects name=value, got '" + item + "'");
  const std::string name = item.substr(0, eq);
  double value;
  try {
    std::size_t used = 0;
    value = std::stod(item.substr(eq + 1), &used);
    if (used != item.size() - eq - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw krein::io::SchemaError("bad tolerance value in '" + item + "'");
  }
  if (!(value > 0.0)) throw krein::io::SchemaError("tolerances must be positive");
  if (name == "sep_min") opt.tol.sep_min = value;
  else if (name == "root_tol") opt.tol.root_tol = value;
  else if (name == "rank_tol") opt.tol.rank_tol = value;
  else if (name == "degenerate_tol") opt.tol.degenerate_tol = value;
  else if (name == "coeff_trim") opt.tol.coeff_trim = value;
  else if (name == "loc_tol") opt.loc_tol = value;
  else throw krein::io::SchemaError("unknown tolerance '" + name + "'");
}

int emit(const CommandResult& r, const std::string& report_path, const std::string& plot_path,
         const std::string& instance_path) {
  const std::string text = r.report.dump(2) + "\n";
  std::cout << text;
  try {
    if (!report_path.empty()) krein::io::write_text_file(report_path, text);
    if (!plot_path.empty()) krein::io::write_text_file(plot_path, krein::io::plot_csv(r.plot));
    if (r.instance && !instance_path.empty()) krein::io::write_text_file(instance_path, r.instance->dump(2) + "\n");
  } catch (const std::exception& e) {
    std::cerr << "kreinctl: " << e.what() << "\n";
    return r.exit_code == 0 ? 1 : r.exit_code;
  }
  return r.exit_code;
}

int schema_failure(const std::string& command, const std::string& message) {
  json j = {{"command", command}, {"status", "error"}, {"error", message}, {"exit_code", 2}};
  std::cout << j.dump(2) << "\n";
  std::cerr << "kreinctl: " << message << "\n";
  return krein::commands::exit_code::schema;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectra and models of regular extensions over finite atomic Herglotz spaces"};
  app.require_subcommand(1);
  app.fallthrough();

  std::vector<std::string> tol_items;
  std::uint64_t seed = 1;
  std::string report_path, plot_path;
  app.add_option("--tol", tol_items, "tolerance override name=value (sep_min, root_tol, rank_tol, degenerate_tol, coeff_trim, loc_tol)")
      ->expected(1)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  app.add_option("--seed", seed, "seed for sampled points and random instances");
  app.add_option("--report", report_path, "write the JSON report here as well as to stdout");
  app.add_option("--plot-data", plot_path, "write CSV plot data here");

  auto* spec = app.add_subcommand("spectrum", "spectrum of an instance file");
  std::string instance_path;
  spec->add_option("instance", instance_path, "instance JSON file")->required();

  auto* ver = app.add_subcommand("verify", "run the invariant suites");
  std::string verify_path;
  std::optional<int> random_dim;
  int trials = 50;
  std::string fault;
  ver->add_option("instance", verify_path, "instance JSON file (default: random instances)");
  ver->add_option("--random", random_dim, "dimension of random instances");
  ver->add_option("--trials", trials, "number of trials")->check(CLI::NonNegativeNumber);
  ver->add_option("--inject-fault", fault, "deliberately corrupt a quantity (kernel)")->check(CLI::IsMember({"kernel"}));

  auto* interp = app.add_subcommand("interpolate", "extension with prescribed non-real spectrum");
  std::string space_path, interp_zeros, interp_out = "interpolated_instance.json";
  interp->add_option("--space", space_path, "space (or instance) JSON file")->required();
  interp->add_option("--zeros", interp_zeros, "zeros 'a+bi[:m],...'")->required();
  interp->add_option("--out", interp_out, "instance output path")->capture_default_str();

  auto* bl = app.add_subcommand("blaschke", "model space of a finite Blaschke product");
  std::string bl_zeros, bl_out = "blaschke_instance.json";
  double phase = 0.0;
  bl->add_option("--zeros", bl_zeros, "zeros in the upper half-plane 'a+bi,...'")->required();
  bl->add_option("--phase", phase, "phase angle theta of the unimodular constant")->capture_default_str();
  bl->add_option("--out", bl_out, "instance output path")->capture_default_str();

  auto* pert = app.add_subcommand("perturb", "rank-one perturbation of a diagonal matrix");
  std::string diag_text, y_text, nu_text;
  pert->add_option("--diag", diag_text, "diagonal entries")->required();
  pert->add_option("--y", y_text, "perturbation vector 'a+bi,...'")->required();
  pert->add_option("--nu", nu_text, "atom weights (default 1/(1+t^2))");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return krein::commands::exit_code::schema;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  CommonOptions opt;
  opt.seed = seed;
  try {
    for (const auto& item : tol_items) apply_tolerance(opt, item);
  } catch (const std::exception& e) {
    return schema_failure(command, e.what());
  }

  CommandResult result;
  std::string out_path;
  try {
    if (*spec) {
      json doc;
      try {
        doc = krein::io::read_json_file(instance_path);
      } catch (const std::exception& e) {
        return schema_failure(command, e.what());
      }
      result = krein::commands::spectrum(doc, opt);
    } else if (*ver) {
      krein::verify::VerifyOptions vopt;
      vopt.trials = trials;
      vopt.seed = seed;
      vopt.tol = opt.tol;
      vopt.inject_fault = fault;
      if (!verify_path.empty() && random_dim) return schema_failure(command, "give an instance or --random, not both");
      if (random_dim) {
        if (*random_dim < 1) return schema_failure(command, "--random needs a positive dimension");
        vopt.dim = *random_dim;
      }
      if (!verify_path.empty()) {
        std::string err;
        std::optional<krein::verify::Instance> inst;
        try {
          inst = krein::commands::verify_instance(krein::io::read_json_file(verify_path), err);
        } catch (const std::exception& e) {
          err = e.what();
        }
        if (!inst) return schema_failure(command, err);
        vopt.instance = std::move(inst);
      }
      result = krein::commands::verify_cmd(vopt, opt);
    } else if (*interp) {
      json doc;
      try {
        doc = krein::io::read_json_file(space_path);
      } catch (const std::exception& e) {
        return schema_failure(command, e.what());
      }
      result = krein::commands::interpolate(doc, interp_zeros, opt);
      out_path = interp_out;
    } else if (*bl) {
      result = krein::commands::blaschke(bl_zeros, phase, opt);
      out_path = bl_out;
    } else if (*pert) {
      std::vector<double> diag, nu;
      std::vector<krein::Complex> y;
      try {
        diag = krein::io::parse_real_list(diag_text);
        y = krein::io::parse_complex_list(y_text);
        nu = krein::io::parse_real_list(nu_text);
      } catch (const std::exception& e) {
        return schema_failure(command, e.what());
      }
      result = krein::commands::perturb(diag, y, nu, opt);
    }
  } catch (const std::exception& e) {
    std::cerr << "kreinctl: unexpected failure: " << e.what() << "\n";
    return krein::commands::exit_code::certification;
  }
  return emit(result, report_path, plot_path, out_path);
}
