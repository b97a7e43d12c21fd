#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "tph/centre_field.hpp"
#include "tph/conjugation.hpp"
#include "tph/curves.hpp"
#include "tph/torus_endo.hpp"

namespace tph {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// All floats are written with 17 significant digits.
std::string fmt17(double v);

// `key = value` lines; `#` starts a comment. Duplicate keys are an error.
std::map<std::string, std::string> parse_key_values(const std::string& text, const std::string& origin);

// Directory layout: manifest.txt, g.knots, shear<i>.knots.
void save_endo(const TorusEndo& f, const std::filesystem::path& dir);
TorusEndo load_endo(const std::filesystem::path& dir);

void write_text(const std::filesystem::path& file, const std::string& text);
std::string read_text(const std::filesystem::path& file);

// x,y,dir_x,dir_y,n_used,residual,sign_class
std::string field_csv(const std::vector<CentreSample>& samples);
// curve,index,x,y
std::string curves_csv(const std::vector<CurveSegment>& curves);

nlohmann::json to_json(const IntMat2& m);
nlohmann::json to_json(const ConjugationResult& r);
nlohmann::json lamination_json(const std::vector<AnnulusFamily>& levels);

}  // namespace tph
