#include <fstream>
#include <ostream>

#include "bbm/error.hpp"
#include "bbm/io.hpp"

namespace bbm {

void write_diagnostics_csv(std::ostream& os, const std::vector<DiagnosticsRow>& rows) {
  os << kDiagnosticsHeader << "\n";
  for (const auto& r : rows) {
    os << format_double(r.t) << ',' << format_double(r.v_l2) << ',' << format_double(r.v_h1) << ','
       << format_double(r.vdot_h1) << ',' << format_double(r.energy) << ',' << format_double(r.grad_sq) << ','
       << format_double(r.y) << "\n";
  }
}

void write_text_file(const std::filesystem::path& file, const std::string& text) {
  if (file.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(file.parent_path(), ec);
  }
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + file.string() + "' for writing");
  out << text;
  out.close();
  if (!out) throw IoError("failed writing '" + file.string() + "'");
}

}  // namespace bbm
