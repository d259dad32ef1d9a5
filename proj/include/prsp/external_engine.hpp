#pragma once

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <string>
#include <utility>

#include <sys/wait.h>

#include "prsp/engine.hpp"
#include "prsp/error.hpp"
#include "prsp/ntriples.hpp"
#include "prsp/solution.hpp"

namespace prsp {

/// Adapter for out-of-process engines. Per window the graph is written as an
/// N-Triples file and the command is invoked as
///   <cmd> --graph <ntriples-file> --query <sparql-file>
/// The command must print a TSV header of variable names followed by one row
/// per solution, terms in N-Triples syntax.
class ExternalCommandEngine final : public EnginePlugin {
 public:
  explicit ExternalCommandEngine(std::string command)
      : command_(std::move(command)) {
    namespace fs = std::filesystem;
    static std::atomic<unsigned> counter{0};
    std::random_device rd;
    workdir_ = fs::temp_directory_path() /
               ("prsp-ext-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter.fetch_add(1)) + "-" +
                std::to_string(rd() % 0xffffff));
    fs::create_directories(workdir_);
  }

  ~ExternalCommandEngine() override {
    std::error_code ec;
    std::filesystem::remove_all(workdir_, ec);
  }

  ExternalCommandEngine(const ExternalCommandEngine&) = delete;
  ExternalCommandEngine& operator=(const ExternalCommandEngine&) = delete;

  void load(const Graph& graph) override {
    graph_path_ = (workdir_ / "graph.nt").string();
    std::ofstream out(graph_path_, std::ios::binary);
    if (!out) fail(Errc::IoError, "cannot write " + graph_path_);
    write_ntriples(out, graph);
    out.flush();
    if (!out) fail(Errc::IoError, "short write to " + graph_path_);
    loaded_ = true;
  }

  SolutionSet execute(const SparqlQuery& query) override {
    if (!loaded_)
      fail(Errc::EngineNotLoaded, "execute called before load");
    std::string query_path = (workdir_ / "query.rq").string();
    {
      std::ofstream out(query_path, std::ios::binary);
      if (!out) fail(Errc::IoError, "cannot write " + query_path);
      out << serialize_sparql(query) << '\n';
    }
    std::string cmdline = command_ + " --graph " + shell_quote(graph_path_) +
                          " --query " + shell_quote(query_path);
    std::string output = run_capture(cmdline);
    SolutionSet result = parse_result_tsv(output);
    return result;
  }

  std::string name() const override { return "external:" + command_; }

  void reset() override { loaded_ = false; }

 private:
  static std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
      if (c == '\'') out += "'\\''";
      else out += c;
    }
    out += "'";
    return out;
  }

  std::string run_capture(const std::string& cmdline) const {
    FILE* pipe = ::popen(cmdline.c_str(), "r");
    if (!pipe) fail(Errc::EngineError, "cannot spawn: " + cmdline);
    std::string output;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0)
      output.append(buf, n);
    int status = ::pclose(pipe);
    if (status == -1)
      fail(Errc::EngineError, "wait failed for: " + cmdline);
    if (WIFEXITED(status) && WEXITSTATUS(status) != 0)
      fail(Errc::EngineError, "external engine exited with status " +
                                  std::to_string(WEXITSTATUS(status)) + ": " +
                                  cmdline);
    if (WIFSIGNALED(status))
      fail(Errc::EngineError, "external engine killed by signal " +
                                  std::to_string(WTERMSIG(status)) + ": " +
                                  cmdline);
    return output;
  }

  std::string command_;
  std::filesystem::path workdir_;
  std::string graph_path_;
  bool loaded_ = false;
};

}  // namespace prsp
