#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "narwhal/module_language.hpp"

namespace narwhal::test {

inline std::string readCorpus(const std::string& file) {
  std::ifstream in(std::string(NARWHAL_CORPUS_DIR) + "/" + file);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline TheoryPtr loadCorpus(const std::string& file) { return parseModule(readCorpus(file)); }

}  // namespace narwhal::test
