#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "tibs/engine.hpp"

namespace tibs {

// Bernoulli outcomes from a child process. Protocol (bit-exact): the child
// writes one trial per line to its standard output, each line exactly an
// ASCII '0' (failure) or '1' (success) followed by a single line feed
// (0x0A), flushed per line. Any other byte sequence, end of stream, or a
// spawn failure raises SourceError with the trials consumed so far.
//
// On stop the child's standard input is closed to signal shutdown (the
// engine never writes to it otherwise), the read side is dropped, and the
// child is force-killed if still alive after the grace period.
class ExternalSource final : public TrialSource {
 public:
  explicit ExternalSource(
      std::string command, std::vector<std::string> arguments = {},
      std::chrono::milliseconds grace = std::chrono::milliseconds{5000});
  ~ExternalSource() override;

  ExternalSource(const ExternalSource&) = delete;
  ExternalSource& operator=(const ExternalSource&) = delete;

  std::string descriptor() const override;

  // Close stdin, wait out the grace period, kill if needed. Idempotent;
  // invoked by the destructor.
  void shutdown() noexcept;

 private:
  bool draw() override;

  std::string command_;
  std::vector<std::string> arguments_;
  std::chrono::milliseconds grace_;
  long pid_ = -1;
  int child_stdin_ = -1;
  int child_stdout_ = -1;
};

}  // namespace tibs
