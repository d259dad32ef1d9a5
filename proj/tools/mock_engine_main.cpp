// Mock external SPARQL engine speaking the command adapter protocol:
// invoked as `prsp-mock-engine --graph <file.nt> --query <file.rq>`, prints
// the result TSV on stdout. Internally it is just the brute-force oracle, so
// any adapter wiring bug shows up as a grading mismatch.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "prsp/csparql.hpp"
#include "prsp/engine.hpp"
#include "prsp/ntriples.hpp"
#include "prsp/solution.hpp"

int main(int argc, char** argv) {
  std::string graph_path, query_path;
  std::uint64_t budget = prsp::kDefaultOracleBudget;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    auto need_value = [&](const char* flag) -> std::string {
      if (i + 1 >= argc) {
        std::cerr << "error: EngineError: missing value for " << flag << "\n";
        std::exit(2);
      }
      return argv[++i];
    };
    if (arg == "--graph") graph_path = need_value("--graph");
    else if (arg == "--query") query_path = need_value("--query");
    else if (arg == "--budget") budget = std::stoull(need_value("--budget"));
    else {
      std::cerr << "error: EngineError: unknown flag " << arg << "\n";
      return 2;
    }
  }
  if (graph_path.empty() || query_path.empty()) {
    std::cerr << "usage: prsp-mock-engine --graph <file.nt> --query <file.rq>\n";
    return 2;
  }

  try {
    prsp::Graph graph = prsp::read_ntriples_file(graph_path);
    std::ifstream qin(query_path, std::ios::binary);
    if (!qin) {
      std::cerr << "error: IoError: cannot open " << query_path << "\n";
      return 2;
    }
    std::ostringstream qtext;
    qtext << qin.rdbuf();
    prsp::SparqlQuery query = prsp::parse_sparql(qtext.str());

    prsp::OracleEngine oracle(budget);
    oracle.load(graph);
    prsp::SolutionSet result = oracle.execute(query);
    prsp::write_result_tsv(std::cout, result);
    return 0;
  } catch (const prsp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == prsp::Errc::OracleTooLarge ? 4 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
