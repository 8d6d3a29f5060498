#include "report_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace framecert::report_io {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json vec_to_json(const Eigen::VectorXd& v) {
  ordered_json arr = ordered_json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

std::string block_summary(const certify::Certificate& c) {
  // Table-style accounting: moment side, count x side of the box
  // localizers, then the compliance block sides.
  std::string moment;
  int box_count = 0;
  int box_side = 0;
  std::vector<int> pmi;
  for (const auto& [label, side] : c.block_sizes) {
    if (label.rfind("moment", 0) == 0) {
      moment = std::to_string(side);
    } else if (label.rfind("box", 0) == 0) {
      ++box_count;
      box_side = side;
    } else {
      pmi.push_back(side);
    }
  }
  std::string out = moment + ", " + std::to_string(box_count) + "x" +
                    std::to_string(box_side);
  for (int side : pmi) out += ", " + std::to_string(side);
  return out;
}

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[40];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

}  // namespace

std::string report_json(const certify::HierarchyReport& report) {
  ordered_json doc;
  doc["model"] = report.model_name;
  doc["n_vars"] = report.n_vars;
  doc["w_bar"] = report.w_bar;
  doc["delta0"] = report.delta0;
  doc["box_upper"] = vec_to_json(report.box_upper);
  doc["infimum_compliance"] = vec_to_json(report.infimum_compliance);
  doc["termination"] = report.termination;
  doc["final_weight"] = report.final_weight;
  doc["final_design"] = vec_to_json(report.final_design);

  ordered_json stages = ordered_json::array();
  for (const auto& c : report.stages) {
    ordered_json s;
    s["order"] = c.order;
    s["lower_bound"] = c.lower_bound;
    s["upper_bound"] = c.upper_bound;
    s["gap"] = c.gap;
    s["delta_star"] = c.delta_star;
    s["ratios"] = vec_to_json(c.ratios);
    s["design"] = vec_to_json(c.design);
    s["compliances"] = vec_to_json(c.compliances);
    s["first_order_moments"] = vec_to_json(c.first_order_moments);
    s["gap_identity_residual"] = c.gap_identity_residual;
    s["rank_moment"] = c.flatness.rank;
    s["rank_submoment"] = c.flatness.rank_sub;
    s["flat"] = c.flatness.flat;
    ordered_json ex;
    switch (c.extraction.status) {
      case certify::Extraction::Status::not_attempted: ex["status"] = "not_attempted"; break;
      case certify::Extraction::Status::extracted: ex["status"] = "extracted"; break;
      case certify::Extraction::Status::unavailable: ex["status"] = "unavailable"; break;
    }
    if (c.extraction.status == certify::Extraction::Status::extracted) {
      ex["design"] = vec_to_json(c.extraction.design);
      ex["weight"] = c.extraction.weight;
      ex["moment_residual"] = c.extraction.moment_residual;
    } else if (!c.extraction.note.empty()) {
      ex["note"] = c.extraction.note;
    }
    s["extraction"] = ex;
    ordered_json blocks = ordered_json::array();
    for (const auto& [label, side] : c.block_sizes) {
      blocks.push_back(ordered_json::array({label, side}));
    }
    s["blocks"] = blocks;
    s["block_summary"] = block_summary(c);
    s["n"] = c.y_dim;
    ordered_json solver;
    solver["status"] = sdp::to_string(c.solver_status);
    solver["iterations"] = c.solver_iterations;
    solver["gap"] = c.solver_gap;
    solver["loosened"] = c.solver_loosened;
    s["solver"] = solver;
    stages.push_back(s);
  }
  doc["stages"] = stages;

  ordered_json timings;
  timings["total_seconds"] = report.total_seconds;
  ordered_json stage_times = ordered_json::array();
  for (const auto& c : report.stages) {
    stage_times.push_back(ordered_json::array({c.order, c.stage_seconds, c.solve_seconds}));
  }
  timings["stages"] = stage_times;
  doc["timings"] = timings;

  return doc.dump(2) + "\n";
}

std::string report_markdown(const certify::HierarchyReport& report) {
  std::ostringstream out;
  out << "# Hierarchy report: " << report.model_name << "\n\n";
  out << "- groups: " << report.n_vars << "\n";
  out << "- scaling of the unit direction: delta0 = " << fmt(report.delta0, "%.6g")
      << ", upper-bound weight wbar = " << fmt(report.w_bar, "%.6g") << "\n";
  out << "- compliance infimum per load case:";
  for (int j = 0; j < report.infimum_compliance.size(); ++j) {
    out << " " << fmt(report.infimum_compliance[j], "%.6g");
  }
  out << "\n- termination: " << report.termination << "\n\n";
  out << "| r | LB | UB | time [s] | blocks | n |\n";
  out << "|---|----|----|----------|--------|---|\n";
  for (const auto& c : report.stages) {
    out << "| " << c.order << " | " << fmt(c.lower_bound, "%.4f") << " | "
        << fmt(c.upper_bound, "%.4f") << " | " << fmt(c.stage_seconds, "%.2f")
        << " | " << block_summary(c) << " | " << c.y_dim << " |\n";
  }
  out << "\nFinal weight: " << fmt(report.final_weight, "%.6g") << "\n";
  return out.str();
}

std::string report_csv(const certify::HierarchyReport& report) {
  std::ostringstream out;
  out << "r,lower_bound,upper_bound,gap,delta_star,flat,rank,time_seconds,blocks,n\n";
  for (const auto& c : report.stages) {
    out << c.order << "," << fmt(c.lower_bound, "%.10g") << ","
        << fmt(c.upper_bound, "%.10g") << "," << fmt(c.gap, "%.10g") << ","
        << fmt(c.delta_star, "%.10g") << "," << (c.flatness.flat ? 1 : 0) << ","
        << c.flatness.rank << "," << fmt(c.stage_seconds, "%.3f") << ",\""
        << block_summary(c) << "\"," << c.y_dim << "\n";
  }
  return out.str();
}

std::string convergence_svg(const certify::HierarchyReport& report) {
  const int width = 480;
  const int height = 360;
  const int mleft = 60;
  const int mright = 20;
  const int mtop = 20;
  const int mbottom = 45;

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  int rmin = 0;
  int rmax = 0;
  for (const auto& c : report.stages) {
    lo = std::min({lo, c.lower_bound, c.upper_bound});
    hi = std::max({hi, c.lower_bound, c.upper_bound});
    rmin = rmin == 0 ? c.order : std::min(rmin, c.order);
    rmax = std::max(rmax, c.order);
  }
  if (report.stages.empty()) {
    lo = 0.0;
    hi = 1.0;
    rmin = 1;
    rmax = 1;
  }
  const double pad = (hi - lo) * 0.1 + 1e-12;
  lo -= pad;
  hi += pad;
  const double xspan = std::max(1, rmax - rmin);

  auto xpos = [&](double r) {
    return mleft + (r - rmin) / xspan * (width - mleft - mright);
  };
  auto ypos = [&](double w) {
    return height - mbottom - (w - lo) / (hi - lo) * (height - mtop - mbottom);
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << mleft << "\" y1=\"" << height - mbottom << "\" x2=\""
      << width - mright << "\" y2=\"" << height - mbottom
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << mleft << "\" y1=\"" << mtop << "\" x2=\"" << mleft
      << "\" y2=\"" << height - mbottom << "\" stroke=\"black\"/>\n";

  auto polyline = [&](bool upper, const char* dash) {
    out << "<polyline fill=\"none\" stroke=\"black\"" << dash << " points=\"";
    for (const auto& c : report.stages) {
      const double v = upper ? c.upper_bound : c.lower_bound;
      out << fmt(xpos(c.order), "%.2f") << "," << fmt(ypos(v), "%.2f") << " ";
    }
    out << "\"/>\n";
    for (const auto& c : report.stages) {
      const double v = upper ? c.upper_bound : c.lower_bound;
      out << "<circle cx=\"" << fmt(xpos(c.order), "%.2f") << "\" cy=\""
          << fmt(ypos(v), "%.2f") << "\" r=\"3\" fill=\"black\"/>\n";
    }
  };
  polyline(false, "");
  polyline(true, " stroke-dasharray=\"6 3\"");

  for (int r = rmin; r <= rmax; ++r) {
    out << "<text x=\"" << fmt(xpos(r), "%.2f") << "\" y=\"" << height - mbottom + 18
        << "\" font-size=\"12\" text-anchor=\"middle\">" << r << "</text>\n";
  }
  for (int t = 0; t <= 4; ++t) {
    const double w = lo + (hi - lo) * t / 4.0;
    out << "<text x=\"" << mleft - 6 << "\" y=\"" << fmt(ypos(w) + 4, "%.2f")
        << "\" font-size=\"11\" text-anchor=\"end\">" << fmt(w, "%.4g")
        << "</text>\n";
  }
  out << "<text x=\"" << (mleft + width - mright) / 2 << "\" y=\"" << height - 8
      << "\" font-size=\"13\" text-anchor=\"middle\">relaxation order r</text>\n";
  out << "<text x=\"14\" y=\"" << (mtop + height - mbottom) / 2
      << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
      << (mtop + height - mbottom) / 2
      << ")\">weight (solid: LB, dashed: UB)</text>\n";
  out << "</svg>\n";
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace framecert::report_io
