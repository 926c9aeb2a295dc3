#include "faceswap/trace.hpp"

#include <fstream>
#include <sstream>

#include "faceswap/errors.hpp"

namespace faceswap {

void write_pose_trace(const std::filesystem::path& path,
                      const std::vector<PoseState>& trace,
                      const std::vector<TrackStatus>* statuses) {
  if (statuses && statuses->size() != trace.size())
    throw LengthMismatch("statuses do not match trace length");
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  f << "frame,tx,ty,s,rx,ry,rz,alpha";
  if (statuses) f << ",status";
  f << "\n";
  f.precision(9);
  for (size_t i = 0; i < trace.size(); ++i) {
    const PoseState& p = trace[i];
    f << i << ',' << p.tx << ',' << p.ty << ',' << p.s << ',' << p.rx << ','
      << p.ry << ',' << p.rz << ',' << p.alpha;
    if (statuses) f << ',' << to_string((*statuses)[i]);
    f << '\n';
  }
  if (!f) throw IoError("write failed: " + path.string());
}

LoadedTrace read_pose_trace(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open: " + path.string());
  std::string header;
  if (!std::getline(f, header) ||
      header.rfind("frame,tx,ty,s,rx,ry,rz,alpha", 0) != 0)
    throw IoError("bad pose trace header in " + path.string());
  bool has_status = header.find(",status") != std::string::npos;

  LoadedTrace out;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() < 8) throw IoError("bad pose trace row: " + line);
    PoseState p;
    p.tx = std::stod(fields[1]);
    p.ty = std::stod(fields[2]);
    p.s = std::stod(fields[3]);
    p.rx = std::stod(fields[4]);
    p.ry = std::stod(fields[5]);
    p.rz = std::stod(fields[6]);
    p.alpha = std::stod(fields[7]);
    out.poses.push_back(p);
    if (has_status && fields.size() >= 9)
      out.statuses.push_back(fields[8] == "Lost" ? TrackStatus::Lost
                                                 : TrackStatus::Tracking);
  }
  return out;
}

}  // namespace faceswap
