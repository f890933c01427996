#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mcgrids/baselines.hpp"
#include "mcgrids/field_spec.hpp"
#include "mcgrids/mesh_io.hpp"
#include "mcgrids/metrics.hpp"
#include "mcgrids/pipeline.hpp"

namespace fs = std::filesystem;
using namespace mcgrids;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNotConverged = 3;

constexpr const char* kFieldHelp = R"(Field specifications:
  sphere:r=1                     torus:R=1,r=0.25
  box:hx=1,hy=1,hz=1             roundbox:hx=1,hy=1,hz=1,rr=0.1
  gyroid:scale=4,thickness=0.1,e=1
  plane:nx=0,ny=0,nz=1,d=0       const:v=1
  slabbumps                      mesh:path=model.obj[,sign=auto|pseudo|winding]
  grid:path=field.grid
  csg:union(A,B)  csg:intersect(A,B)  csg:subtract(A,B)
Primitives also take cx,cy,cz (translation), s (scale) and rx,ry,rz (degrees).

Config files hold one "key = value" per line ('#' starts a comment). Keys:
  field domain alpha gamma tau vmin eps_merge eps_cvt iters batch cvt_iters
  cvt midpoint interleave seed max_passes
Command-line flags override the file.

Exit codes: 0 ok, 1 I/O error, 2 usage error, 3 finished with residual above tau.)";

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flags shared by both subcommands. String-valued so that the config file and
// the command line go through the same parser.
struct RunFlags {
  std::string field;
  std::string config;
  std::string domain, alpha, gamma, tau, vmin, eps_merge, eps_cvt, iters, batch, cvt_iters, seed,
      max_passes;
  bool no_cvt = false;
  bool no_midpoint = false;
  bool interleave = false;
  bool verbose = false;
};

void add_run_flags(CLI::App& app, RunFlags& f, bool tau_list) {
  app.add_option("--field", f.field, "Field specification (see --help)");
  app.add_option("--config", f.config, "Key-value config file");
  app.add_option("--domain", f.domain, "Half-width h or lx,ly,lz,hx,hy,hz");
  app.add_option("--alpha", f.alpha, "Iso-value");
  app.add_option("--gamma", f.gamma, "Density offset (default 0.05 * domain diagonal)");
  app.add_option("--tau", f.tau,
                 tau_list ? "Residual tolerance; a comma list runs one McGrids row per value"
                          : "Midpoint residual tolerance");
  app.add_option("--vmin", f.vmin, "Smallest refinable tet volume");
  app.add_option("--eps-merge", f.eps_merge, "Merge distance for new points");
  app.add_option("--eps-cvt", f.eps_cvt, "Lloyd step tolerance");
  app.add_option("--iters", f.iters, "Generation iterations");
  app.add_option("--batch", f.batch, "Samples per generation iteration");
  app.add_option("--cvt-iters", f.cvt_iters, "Lloyd steps per inserted point");
  app.add_option("--seed", f.seed, "Random seed");
  app.add_option("--max-passes", f.max_passes, "Refinement pass limit");
  app.add_flag("--no-cvt", f.no_cvt, "Disable CVT relaxation");
  app.add_flag("--no-midpoint", f.no_midpoint, "Refine by resampling instead of midpoints");
  app.add_flag("--interleave", f.interleave, "Refine after every generation iteration too");
  app.add_flag("-v,--verbose", f.verbose, "Progress on stderr");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

struct Setup {
  PipelineConfig config;
  std::string field_spec;
  fs::path field_base;
};

// Config file first, then flags. The --tau flag is left to the caller when it
// may be a list.
Setup build_setup(const RunFlags& f, bool apply_tau) {
  Setup s;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw IoError("cannot open config file: " + f.config);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      line = trim(line.substr(0, line.find('#')));
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument(f.config + ":" + std::to_string(lineno) + ": expected key = value");
      const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
      if (key == "field") {
        s.field_spec = value;
        s.field_base = fs::path(f.config).parent_path();
      } else {
        s.config.set(key, value);
      }
    }
  }
  if (!f.field.empty()) {
    s.field_spec = f.field;
    s.field_base = fs::current_path();
  }
  if (s.field_spec.empty()) throw std::invalid_argument("no field given (--field or config 'field')");

  const std::pair<const char*, const std::string*> flags[] = {
      {"domain", &f.domain}, {"alpha", &f.alpha},         {"gamma", &f.gamma},
      {"vmin", &f.vmin},     {"eps_merge", &f.eps_merge}, {"eps_cvt", &f.eps_cvt},
      {"iters", &f.iters},   {"batch", &f.batch},         {"cvt_iters", &f.cvt_iters},
      {"seed", &f.seed},     {"max_passes", &f.max_passes}};
  for (const auto& [key, value] : flags)
    if (!value->empty()) s.config.set(key, *value);
  if (apply_tau && !f.tau.empty()) s.config.set("tau", f.tau);
  if (f.no_cvt) s.config.cvt = false;
  if (f.no_midpoint) s.config.midpoint_insertion = false;
  if (f.interleave) s.config.interleave = true;
  s.config.validate();
  return s;
}

FieldPtr make_field(const Setup& s) { return parse_field_spec(s.field_spec, s.field_base); }

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

// "out.obj" -> "out.<suffix>"
fs::path sibling(const fs::path& mesh, const std::string& suffix) {
  fs::path p = mesh;
  p.replace_extension(suffix);
  return p;
}

// A reference is either a mesh file or "mc:N" on the field itself.
TriangleMesh load_reference(const std::string& ref, const Setup& s) {
  if (ref.rfind("mc:", 0) == 0) {
    int n = 0;
    try {
      n = std::stoi(ref.substr(3));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad reference: " + ref);
    }
    if (n < 2) throw std::invalid_argument("reference resolution must be at least 2");
    return marching_cubes(*make_field(s), s.config.domain, n, s.config.alpha);
  }
  try {
    return read_mesh(ref);
  } catch (const std::runtime_error& e) {
    throw IoError(e.what());
  }
}

struct ExtractArgs {
  RunFlags run;
  std::string output;
  std::string report;
  std::string trace;
  std::string timing;
  std::string dump_grid;
  std::string dump_pdf;
  std::string reference;
  bool normals = false;
};

int cmd_extract(const ExtractArgs& a) {
  const Setup s = build_setup(a.run, true);
  const FieldPtr field = make_field(s);
  const fs::path out = a.output;
  const fs::path report_path = a.report.empty() ? sibling(out, ".report.txt") : fs::path(a.report);
  const fs::path trace_path = a.trace.empty() ? sibling(out, ".trace.txt") : fs::path(a.trace);

  std::ofstream grid_out, pdf_out;
  RunOutputs outputs;
  if (a.run.verbose) outputs.progress = &std::cerr;
  if (!a.dump_grid.empty()) {
    grid_out = open_output(a.dump_grid);
    outputs.grid = &grid_out;
  }
  if (!a.dump_pdf.empty()) {
    pdf_out = open_output(a.dump_pdf);
    outputs.pdf = &pdf_out;
  }

  const RunResult r = run_pipeline(*field, s.config, outputs);

  std::optional<QualityReport> quality;
  if (!a.reference.empty() && !r.mesh.empty()) {
    quality = evaluate_quality(r.mesh, load_reference(a.reference, s));
  }
  try {
    write_mesh(out, r.mesh, a.normals);
  } catch (const std::runtime_error& e) {
    throw IoError(e.what());
  }
  {
    std::ofstream rep = open_output(report_path);
    write_report(rep, r, s.field_spec, quality);
  }
  {
    std::ofstream tr = open_output(trace_path);
    write_trace(tr, r);
  }
  if (!a.timing.empty()) {
    std::ofstream tm = open_output(a.timing);
    write_timing(tm, r);
  }
  std::cerr << "mcgrids: " << r.mesh.triangles.size() << " triangles, " << r.queries
            << " queries, " << r.passes.size() << " refine passes, " << std::setprecision(3)
            << r.wall_seconds << " s\n";
  if (!r.converged) {
    std::cerr << "mcgrids: warning: residual above tau (" << r.max_residual << ") after "
              << r.passes.size() << " passes\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

struct CompareArgs {
  RunFlags run;
  std::string methods;
  std::string reference = "mc:256";
  std::string output;
  std::string out_dir;
  bool cvt_ablation = false;
  std::size_t samples = 100000;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> items;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

struct Method {
  enum class Kind { mcgrids, mc, mt } kind;
  std::string param;  // tau text or resolution
  std::optional<bool> cvt;
  std::string label;
};

std::vector<Method> parse_methods(const CompareArgs& a, const Setup& s) {
  std::vector<std::string> taus = split_list(a.run.tau);
  if (taus.empty()) {
    std::ostringstream t;
    t << s.config.tau;
    taus.push_back(t.str());
  }
  std::vector<Method> out;
  auto add_mcgrids = [&](const std::string& tau) {
    if (a.cvt_ablation) {
      out.push_back({Method::Kind::mcgrids, tau, true, "McGrids_" + tau + " (w CVT)"});
      out.push_back({Method::Kind::mcgrids, tau, false, "McGrids_" + tau + " (w/o CVT)"});
    } else {
      std::string label = "McGrids_" + tau;
      if (!s.config.cvt) label += " (w/o CVT)";
      out.push_back({Method::Kind::mcgrids, tau, std::nullopt, label});
    }
  };
  const std::vector<std::string> items =
      a.methods.empty() ? std::vector<std::string>{"mcgrids"} : split_list(a.methods);
  for (const std::string& item : items) {
    const auto colon = item.find(':');
    const std::string name = item.substr(0, colon);
    const std::string param = colon == std::string::npos ? "" : item.substr(colon + 1);
    if (name == "mcgrids") {
      if (param.empty()) {
        for (const std::string& t : taus) add_mcgrids(t);
      } else {
        add_mcgrids(param);
      }
    } else if (name == "mc" || name == "mt") {
      if (param.empty()) throw std::invalid_argument("method " + name + " needs a resolution, e.g. " + name + ":128");
      const Method::Kind k = name == "mc" ? Method::Kind::mc : Method::Kind::mt;
      out.push_back({k, param, std::nullopt, (name == "mc" ? "MC_" : "MT_") + param});
    } else {
      throw std::invalid_argument("unknown method: " + item);
    }
  }
  return out;
}

struct Row {
  std::string label;
  std::optional<QualityReport> q;
  std::uint64_t queries = 0;
  double seconds = 0.0;
  std::size_t memory = 0;
  int passes = -1;
  bool converged = true;
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

int cmd_compare(const CompareArgs& a) {
  const Setup s = build_setup(a.run, false);
  const std::vector<Method> methods = parse_methods(a, s);
  if (methods.empty()) throw std::invalid_argument("no methods to run");
  if (!a.out_dir.empty()) fs::create_directories(a.out_dir);

  std::cerr << "compare: building reference " << a.reference << '\n';
  const TriangleMesh reference = load_reference(a.reference, s);
  if (reference.empty()) throw std::invalid_argument("reference mesh is empty");
  MetricParams mp;
  mp.n_samples = a.samples;

  std::vector<Row> rows;
  bool all_converged = true;
  for (const Method& m : methods) {
    const FieldPtr field = make_field(s);  // fresh counter per method
    Row row;
    row.label = m.label;
    TriangleMesh mesh;
    const auto t0 = std::chrono::steady_clock::now();
    if (m.kind == Method::Kind::mcgrids) {
      PipelineConfig c = s.config;
      c.set("tau", m.param);
      if (m.cvt) c.cvt = *m.cvt;
      RunOutputs outputs;
      if (a.run.verbose) outputs.progress = &std::cerr;
      RunResult r = run_pipeline(*field, c, outputs);
      row.passes = static_cast<int>(r.passes.size());
      row.converged = r.converged;
      all_converged = all_converged && r.converged;
      mesh = std::move(r.mesh);
    } else {
      int n = 0;
      try {
        n = std::stoi(m.param);
      } catch (const std::exception&) {
        throw std::invalid_argument("bad resolution in " + m.label);
      }
      if (n < 2) throw std::invalid_argument("resolution must be at least 2");
      mesh = m.kind == Method::Kind::mc ? marching_cubes(*field, s.config.domain, n, s.config.alpha)
                                        : marching_tets_uniform(*field, s.config.domain, n, s.config.alpha);
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    row.queries = field->query_count();
    row.memory = peak_memory_bytes();
    if (!mesh.empty()) row.q = evaluate_quality(mesh, reference, mp);
    if (!a.out_dir.empty()) {
      std::string name = m.label;
      for (char& ch : name)
        if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '.' && ch != '-') ch = '_';
      try {
        write_mesh(fs::path(a.out_dir) / (name + ".obj"), mesh);
      } catch (const std::runtime_error& e) {
        throw IoError(e.what());
      }
    }
    std::cerr << "compare: " << row.label << " done (" << row.queries << " queries, "
              << fmt(row.seconds, 3) << " s)\n";
    rows.push_back(std::move(row));
  }

  const bool show_passes = a.cvt_ablation;
  std::vector<std::string> header = {"Method", "CD", "NC", "ECD", "F1", "EF1", "#Query", "Time(s)", "Memory(MB)"};
  if (show_passes) header.push_back("Passes");
  std::vector<std::vector<std::string>> cells;
  for (const Row& r : rows) {
    std::vector<std::string> c = {r.label};
    if (r.q) {
      for (double v : {r.q->cd, r.q->nc, r.q->ecd, r.q->f1, r.q->ef1}) c.push_back(fmt(v));
    } else {
      for (int i = 0; i < 5; ++i) c.push_back("nan");
    }
    c.push_back(std::to_string(r.queries));
    c.push_back(fmt(r.seconds, 3));
    c.push_back(fmt(static_cast<double>(r.memory) / (1024.0 * 1024.0), 4));
    if (show_passes) c.push_back(r.passes < 0 ? "-" : std::to_string(r.passes) + (r.converged ? "" : "*"));
    cells.push_back(std::move(c));
  }

  std::vector<std::size_t> width(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) {
    width[i] = header[i].size();
    for (const auto& c : cells) width[i] = std::max(width[i], c[i].size());
  }
  auto print_row = [&](const std::vector<std::string>& c) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      std::cout << (i == 0 ? std::left : std::right) << std::setw(static_cast<int>(width[i])) << c[i]
                << (i + 1 < c.size() ? "  " : "\n");
    }
  };
  print_row(header);
  for (const auto& c : cells) print_row(c);
  std::cout << "# metrics in the reference bounding-box frame scaled to unit longest side\n";
  if (!all_converged) std::cout << "# * residual above tau at max-passes\n";

  if (!a.output.empty()) {
    std::ofstream tsv = open_output(a.output);
    for (std::size_t i = 0; i < header.size(); ++i) tsv << header[i] << (i + 1 < header.size() ? '\t' : '\n');
    for (const auto& c : cells)
      for (std::size_t i = 0; i < c.size(); ++i) tsv << c[i] << (i + 1 < c.size() ? '\t' : '\n');
  }
  return all_converged ? kExitOk : kExitNotConverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive iso-surface extraction on Monte Carlo tetrahedral grids"};
  app.footer(kFieldHelp);
  app.set_version_flag("--version", "mcgrids 0.1.0");
  app.require_subcommand(1);

  ExtractArgs ex;
  CLI::App* extract = app.add_subcommand("extract", "Extract a mesh from a field");
  add_run_flags(*extract, ex.run, false);
  extract->add_option("-o,--output", ex.output, "Mesh file (.obj or .ply)")->required();
  extract->add_option("--report", ex.report, "Report file (default: <output>.report.txt)");
  extract->add_option("--trace", ex.trace, "Trace file (default: <output>.trace.txt)");
  extract->add_option("--timing", ex.timing, "Write wall time and peak memory here");
  extract->add_option("--dump-grid", ex.dump_grid, "Write the final tetrahedral grid");
  extract->add_option("--dump-pdf", ex.dump_pdf, "Write the final per-vertex density table");
  extract->add_option("--reference", ex.reference, "Mesh file or mc:N; adds quality metrics to the report");
  extract->add_flag("--normals", ex.normals, "Write vertex normals");

  CompareArgs cmp;
  CLI::App* compare = app.add_subcommand("compare", "Compare McGrids with uniform-grid baselines");
  add_run_flags(*compare, cmp.run, true);
  compare->add_option("--methods", cmp.methods, "Comma list of mcgrids[:tau], mc:N, mt:N");
  compare->add_option("--reference", cmp.reference, "Mesh file or mc:N")->capture_default_str();
  compare->add_option("--samples", cmp.samples, "Surface samples per mesh for metrics")->capture_default_str();
  compare->add_flag("--cvt-ablation", cmp.cvt_ablation, "Run every McGrids row with and without CVT");
  compare->add_option("-o,--output", cmp.output, "Also write the table as TSV");
  compare->add_option("--out-dir", cmp.out_dir, "Write each method's mesh here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*extract) return cmd_extract(ex);
    return cmd_compare(cmp);
  } catch (const IoError& e) {
    std::cerr << "mcgrids: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "mcgrids: " << e.what() << '\n';
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "mcgrids: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    // Unreadable field files surface as runtime errors from the field parser.
    std::cerr << "mcgrids: " << e.what() << '\n';
    return kExitIo;
  }
}
