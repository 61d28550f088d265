#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace toggleflow {

struct TraceRecord {
  long long t;   // iteration counter, 1-based
  int elem;      // toggled element: arc id, or d for recursive batches
  double delta;
  double obj;    // running objective after the toggle
};

struct SolverTrace {
  std::vector<TraceRecord> records;
  std::uint64_t seed = 0;
  double eps = 0.0;
  double tau = 0.0;
  long long K = 0;
  long long iterations_run = 0;
  std::string algo;
  bool recording = false;

  void add(long long t, int elem, double delta, double obj) {
    if (recording) records.push_back({t, elem, delta, obj});
  }

  void write_jsonl(const std::string& path) const {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw std::runtime_error("cannot open trace file " + path);
    for (const TraceRecord& r : records)
      std::fprintf(fp, "{\"t\":%lld,\"elem\":%d,\"delta\":%.17g,\"obj\":%.17g}\n", r.t, r.elem,
                   r.delta, r.obj);
    std::fprintf(fp,
                 "{\"algo\":\"%s\",\"seed\":%llu,\"eps\":%.17g,\"tau\":%.17g,\"K\":%lld,"
                 "\"iterations_run\":%lld}\n",
                 algo.c_str(), static_cast<unsigned long long>(seed), eps, tau, K, iterations_run);
    std::fclose(fp);
  }
};

}  // namespace toggleflow
