#pragma once

#include "fem.hpp"

#include <string>

namespace framecert::model_io {

// Parses the model JSON document described in the README.  Law names may
// refer to entries of the document's "laws" object or to the built-in
// cross-section families.
fem::FrameModel load_model_string(const std::string& json_text);
fem::FrameModel load_model_file(const std::string& path);

}  // namespace framecert::model_io
